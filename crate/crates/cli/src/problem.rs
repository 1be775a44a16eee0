//! Problem files: boundary data `f*`, `φ` and the source `g`.
//!
//! Two encodings are accepted. The line format (any extension other than
//! `.json`) has one entry per line:
//!
//! ```text
//! # comment
//! fstar <n> <re> <im>      Fourier coefficient of f* at index n
//! phi   <n> <re> <im>      Fourier coefficient of φ at index n
//! g <j> <k> <re> <im>      coefficient of w^j w̄^k in g
//! g constant <M>           g ≡ M
//! ```
//!
//! Repeated entries for the same index are summed. The JSON encoding is
//! selected by a `.json` extension:
//!
//! ```json
//! {"fstar": [[1, 1.0, 0.0]], "phi": [], "g": {"constant": 64.0}}
//! ```
//!
//! with `g` either `{"constant": M}` or a list of `[j, k, re, im]` rows.

use std::path::Path;

use biharm_core::{BidegreePoly, BoundaryFourier, Complex64, ProblemSpec};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest accepted `|n|` for Fourier indices.
pub const MAX_FOURIER_INDEX: i64 = 512;
/// Largest accepted exponent in `g`.
pub const MAX_BIDEGREE: usize = 16;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("invalid JSON problem: {0}")]
    Json(String),
    #[error("{0}")]
    Limit(String),
}

type Result<T> = std::result::Result<T, ProblemError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    Lines,
    Json,
}

impl Encoding {
    pub fn for_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Encoding::Json,
            _ => Encoding::Lines,
        }
    }
}

pub fn load_problem(path: &Path) -> Result<ProblemSpec> {
    let text = std::fs::read_to_string(path).map_err(|source| ProblemError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_problem(&text, Encoding::for_path(path))
}

pub fn parse_problem(text: &str, encoding: Encoding) -> Result<ProblemSpec> {
    match encoding {
        Encoding::Lines => parse_lines(text),
        Encoding::Json => parse_json(text),
    }
}

#[derive(Default)]
struct Builder {
    f_star: Vec<(i64, Complex64)>,
    phi: Vec<(i64, Complex64)>,
    g: Vec<(usize, usize, Complex64)>,
}

impl Builder {
    fn build(self) -> ProblemSpec {
        ProblemSpec::new(
            BoundaryFourier::from_terms(self.f_star),
            BoundaryFourier::from_terms(self.phi),
            BidegreePoly::from_terms(self.g),
        )
    }
}

fn check_index(n: i64) -> std::result::Result<(), String> {
    if n.abs() > MAX_FOURIER_INDEX {
        Err(format!(
            "Fourier index {n} exceeds the limit |n| <= {MAX_FOURIER_INDEX}"
        ))
    } else {
        Ok(())
    }
}

fn check_exponents(j: usize, k: usize) -> std::result::Result<(), String> {
    if j.max(k) > MAX_BIDEGREE {
        Err(format!(
            "source term w^{j} w̄^{k} exceeds the bidegree limit {MAX_BIDEGREE}"
        ))
    } else {
        Ok(())
    }
}

fn check_finite(values: &[f64]) -> std::result::Result<(), String> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err("coefficients must be finite".into())
    }
}

fn parse_lines(text: &str) -> Result<ProblemSpec> {
    let mut b = Builder::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let err = |message: String| ProblemError::Line { line, message };
        let limit = |message: String| ProblemError::Limit(format!("line {line}: {message}"));
        let num = |i: usize, what: &str| -> Result<f64> {
            fields[i].parse::<f64>().map_err(|_| {
                err(format!(
                    "field {} ({what}) is not a number: '{}'",
                    i + 1,
                    fields[i]
                ))
            })
        };
        match fields[0] {
            key @ ("fstar" | "phi") => {
                if fields.len() != 4 {
                    return Err(err(format!(
                        "'{key}' expects 3 fields (n re im), found {}",
                        fields.len() - 1
                    )));
                }
                let n: i64 = fields[1].parse().map_err(|_| {
                    err(format!(
                        "field 2 (index) is not an integer: '{}'",
                        fields[1]
                    ))
                })?;
                check_index(n).map_err(limit)?;
                let (re, im) = (num(2, "real part")?, num(3, "imaginary part")?);
                check_finite(&[re, im]).map_err(err)?;
                let entry = (n, Complex64::new(re, im));
                if key == "fstar" {
                    b.f_star.push(entry);
                } else {
                    b.phi.push(entry);
                }
            }
            "g" if fields.get(1) == Some(&"constant") => {
                if fields.len() != 3 {
                    return Err(err(format!(
                        "'g constant' expects 1 value, found {}",
                        fields.len() - 2
                    )));
                }
                let m = num(2, "constant")?;
                check_finite(&[m]).map_err(err)?;
                b.g.push((0, 0, Complex64::new(m, 0.0)));
            }
            "g" => {
                if fields.len() != 5 {
                    return Err(err(format!(
                        "'g' expects 4 fields (j k re im), found {}",
                        fields.len() - 1
                    )));
                }
                let exp = |i: usize| -> Result<usize> {
                    fields[i].parse().map_err(|_| {
                        err(format!(
                            "field {} (exponent) is not a nonnegative integer: '{}'",
                            i + 1,
                            fields[i]
                        ))
                    })
                };
                let (j, k) = (exp(1)?, exp(2)?);
                check_exponents(j, k).map_err(limit)?;
                let (re, im) = (num(3, "real part")?, num(4, "imaginary part")?);
                check_finite(&[re, im]).map_err(err)?;
                b.g.push((j, k, Complex64::new(re, im)));
            }
            other => {
                return Err(err(format!(
                    "unknown key '{other}'; expected fstar, phi or g"
                )))
            }
        }
    }
    Ok(b.build())
}

/// JSON form of a problem file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default)]
    pub fstar: Vec<(i64, f64, f64)>,
    #[serde(default)]
    pub phi: Vec<(i64, f64, f64)>,
    #[serde(default)]
    pub g: SourceFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SourceFile {
    Constant { constant: f64 },
    Terms(Vec<(usize, usize, f64, f64)>),
}

impl Default for SourceFile {
    fn default() -> Self {
        SourceFile::Terms(Vec::new())
    }
}

fn parse_json(text: &str) -> Result<ProblemSpec> {
    let file: ProblemFile =
        serde_json::from_str(text).map_err(|e| ProblemError::Json(e.to_string()))?;
    let mut b = Builder::default();
    for (key, rows, out) in [
        ("fstar", &file.fstar, &mut b.f_star),
        ("phi", &file.phi, &mut b.phi),
    ] {
        for (i, &(n, re, im)) in rows.iter().enumerate() {
            check_index(n).map_err(|m| ProblemError::Limit(format!("{key}[{i}]: {m}")))?;
            check_finite(&[re, im]).map_err(|m| ProblemError::Json(format!("{key}[{i}]: {m}")))?;
            out.push((n, Complex64::new(re, im)));
        }
    }
    match &file.g {
        SourceFile::Constant { constant } => {
            check_finite(&[*constant]).map_err(|m| ProblemError::Json(format!("g: {m}")))?;
            b.g.push((0, 0, Complex64::new(*constant, 0.0)));
        }
        SourceFile::Terms(rows) => {
            for (i, &(j, k, re, im)) in rows.iter().enumerate() {
                check_exponents(j, k).map_err(|m| ProblemError::Limit(format!("g[{i}]: {m}")))?;
                check_finite(&[re, im]).map_err(|m| ProblemError::Json(format!("g[{i}]: {m}")))?;
                b.g.push((j, k, Complex64::new(re, im)));
            }
        }
    }
    Ok(b.build())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sharp_example_file() {
        let spec = parse_problem("# g ≡ 64\ng constant 64\n", Encoding::Lines).unwrap();
        assert!(spec.f_star.is_zero() && spec.phi.is_zero());
        assert_eq!(spec.g.degree(), 0);
        assert_eq!(spec.g.coeff(0, 0), c(64.0, 0.0));
    }

    #[test]
    fn phi_entry_gives_constant_phi1() {
        let spec = parse_problem("phi 1 -1 0", Encoding::Lines).unwrap();
        assert_eq!(spec.phi.coeff(1), c(-1.0, 0.0));
        let phi1 = spec.phi1();
        assert_eq!(phi1.degree(), 0);
        assert_eq!(phi1.coeff(0), c(-1.0, 0.0));
        assert!((spec.phi.eval(0.3) + Complex64::from_polar(1.0, 0.3)).norm() < 1e-15);
    }

    #[test]
    fn malformed_row_names_the_line() {
        let err = parse_problem("fstar 1 1 0\nfstar 2 abc 0\n", Encoding::Lines).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, ProblemError::Line { line: 2, .. }), "{msg}");
        assert!(msg.contains("line 2") && msg.contains("abc"), "{msg}");
        assert!(parse_problem("fstar 1 1", Encoding::Lines).is_err());
        assert!(parse_problem("psi 1 1 0", Encoding::Lines).is_err());
        assert!(parse_problem("g 1 x 1 0", Encoding::Lines).is_err());
        assert!(parse_problem("g constant", Encoding::Lines).is_err());
        assert!(parse_problem("fstar 1 nan 0", Encoding::Lines).is_err());
    }

    #[test]
    fn limits_are_enforced() {
        assert!(parse_problem("fstar 512 1 0", Encoding::Lines).is_ok());
        assert!(matches!(
            parse_problem("fstar -513 1 0", Encoding::Lines),
            Err(ProblemError::Limit(_))
        ));
        assert!(parse_problem("g 16 16 1 0", Encoding::Lines).is_ok());
        assert!(matches!(
            parse_problem("g 17 0 1 0", Encoding::Lines),
            Err(ProblemError::Limit(_))
        ));
        assert!(matches!(
            parse_problem(r#"{"phi": [[600, 1, 0]]}"#, Encoding::Json),
            Err(ProblemError::Limit(_))
        ));
    }

    #[test]
    fn repeated_entries_accumulate() {
        let spec = parse_problem(
            "fstar 1 1 0\nfstar 1 0.5 1\n g 1 1 1 0\ng 1 1 1 0",
            Encoding::Lines,
        )
        .unwrap();
        assert_eq!(spec.f_star.coeff(1), c(1.5, 1.0));
        assert_eq!(spec.g.coeff(1, 1), c(2.0, 0.0));
    }

    #[test]
    fn json_matches_line_format() {
        let lines = "fstar 1 1 0\nfstar -2 0 0.5\nphi 0 0.25 0\ng 1 1 1 0\ng 0 2 0 -1\n";
        let json = r#"{"fstar": [[1, 1, 0], [-2, 0, 0.5]], "phi": [[0, 0.25, 0]], "g": [[1, 1, 1, 0], [0, 2, 0, -1]]}"#;
        assert_eq!(
            parse_problem(lines, Encoding::Lines).unwrap(),
            parse_problem(json, Encoding::Json).unwrap()
        );
        let sharp = parse_problem(r#"{"g": {"constant": 64}}"#, Encoding::Json).unwrap();
        assert_eq!(sharp.g.coeff(0, 0), c(64.0, 0.0));
        assert!(parse_problem(r#"{"fstar": [], "extra": 1}"#, Encoding::Json).is_err());
    }

    #[test]
    fn encoding_follows_extension() {
        assert_eq!(Encoding::for_path(Path::new("a/b.JSON")), Encoding::Json);
        assert_eq!(Encoding::for_path(Path::new("a/b.cfg")), Encoding::Lines);
        assert_eq!(Encoding::for_path(Path::new("problem")), Encoding::Lines);
    }
}
