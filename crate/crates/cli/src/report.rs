//! Rendering of results as aligned text, CSV rows or schema-tagged JSON.
//!
//! CSV and JSON renderings round-trip: [`bound_report_from_csv`] and
//! [`from_json`] rebuild field-equal values. Floats are written in Rust's
//! shortest round-trip form, so no precision is lost.

use std::fmt::Write as _;
use std::str::FromStr;

use biharm_core::bounds::SchwarzEstimate;
use biharm_core::landau::AaRadii;
use biharm_core::{
    BoundId, BoundReport, Complex64, GradResult, LandauResult, LipschitzReport, Sample,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Csv,
    /// Schema-versioned JSON document.
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" | "structured" => Ok(Format::Json),
            other => Err(format!(
                "unknown format '{other}'; expected text, csv or json"
            )),
        }
    }
}

pub const SCHEMA_VERSION: u32 = 1;

/// Top-level JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema: String,
    pub version: u32,
    pub data: T,
}

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Schema(String),
}

/// A result that can be rendered in every output format.
pub trait Render: Serialize {
    /// Schema name used in the JSON envelope.
    const SCHEMA: &'static str;

    fn text(&self) -> String;

    fn csv(&self) -> Result<String, RenderError>;

    fn json(&self) -> Result<String, RenderError> {
        let env = Envelope {
            schema: Self::SCHEMA.to_string(),
            version: SCHEMA_VERSION,
            data: self,
        };
        Ok(serde_json::to_string_pretty(&env)? + "\n")
    }

    fn render(&self, format: Format) -> Result<String, RenderError> {
        match format {
            Format::Text => Ok(self.text()),
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }
}

/// Parses a JSON document written by [`Render::json`], checking its schema.
pub fn from_json<T: Render + DeserializeOwned>(text: &str) -> Result<T, RenderError> {
    let env: Envelope<T> = serde_json::from_str(text)?;
    if env.schema != T::SCHEMA || env.version != SCHEMA_VERSION {
        return Err(RenderError::Schema(format!(
            "expected schema {} v{SCHEMA_VERSION}, found {} v{}",
            T::SCHEMA,
            env.schema,
            env.version
        )));
    }
    Ok(env.data)
}

fn write_csv<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<String, RenderError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| RenderError::Schema(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn fmt_z(z: Complex64) -> String {
    format!("{:+.6}{:+.6}i", z.re, z.im)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct SampleRow {
    z_re: f64,
    z_im: f64,
    lhs: f64,
    rhs: f64,
    margin: f64,
}

impl Render for BoundReport {
    const SCHEMA: &'static str = "biharm.bound-report";

    fn text(&self) -> String {
        let mut s = String::new();
        let verdict = if self.violated { "VIOLATED" } else { "holds" };
        writeln!(s, "bound       {}", self.bound_id).unwrap();
        writeln!(s, "samples     {}", self.samples.len()).unwrap();
        writeln!(s, "min margin  {:.6e}", self.min_margin).unwrap();
        writeln!(s, "worst point {}", fmt_z(self.worst_point)).unwrap();
        writeln!(s, "tolerance   {:e}", self.tol_report).unwrap();
        writeln!(s, "verdict     {verdict}").unwrap();
        s
    }

    fn csv(&self) -> Result<String, RenderError> {
        write_csv(self.samples.iter().map(|s| SampleRow {
            z_re: s.z.re,
            z_im: s.z.im,
            lhs: s.lhs,
            rhs: s.rhs,
            margin: s.margin,
        }))
    }
}

/// Rebuilds a report from its CSV samples.
pub fn bound_report_from_csv(
    text: &str,
    bound_id: BoundId,
    tol_report: f64,
) -> Result<BoundReport, RenderError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let samples = r
        .deserialize::<SampleRow>()
        .map(|row| {
            row.map(|s| Sample {
                z: Complex64::new(s.z_re, s.z_im),
                lhs: s.lhs,
                rhs: s.rhs,
                margin: s.margin,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BoundReport::from_samples(bound_id, samples, tol_report))
}

impl Render for LandauResult {
    const SCHEMA: &'static str = "biharm.landau";

    fn text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "r0          {:.15}", self.r0).unwrap();
        writeln!(s, "m0          {:.15}", self.m0).unwrap();
        writeln!(s, "lambda0     {:.15}", self.lambda0).unwrap();
        writeln!(
            s,
            "bracket     [{:.15}, {:.15}]",
            self.bracket.0, self.bracket.1
        )
        .unwrap();
        writeln!(s, "iterations  {}", self.iterations).unwrap();
        writeln!(s, "residual    {:.3e}", self.residual).unwrap();
        s
    }

    fn csv(&self) -> Result<String, RenderError> {
        #[derive(Serialize)]
        struct Row {
            r0: f64,
            m0: f64,
            lambda0: f64,
            bracket_lo: f64,
            bracket_hi: f64,
            iterations: usize,
            residual: f64,
        }
        write_csv([Row {
            r0: self.r0,
            m0: self.m0,
            lambda0: self.lambda0,
            bracket_lo: self.bracket.0,
            bracket_hi: self.bracket.1,
            iterations: self.iterations,
            residual: self.residual,
        }])
    }
}

impl Render for AaRadii {
    const SCHEMA: &'static str = "biharm.aa-radii";

    fn text(&self) -> String {
        format!(
            "rho2        {:.15}\nR2          {:.15}\nrho3        {:.15}\nR3          {:.15}\n",
            self.rho2, self.r2, self.rho3, self.r3
        )
    }

    fn csv(&self) -> Result<String, RenderError> {
        write_csv([self])
    }
}

impl Render for LipschitzReport {
    const SCHEMA: &'static str = "biharm.lipschitz";

    fn text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "L(phi1)     {:.9}", self.l_phi1).unwrap();
        writeln!(s, "|phi1|      {:.9}", self.phi1_norm).unwrap();
        writeln!(s, "|g|         {:.9}", self.g_norm).unwrap();
        writeln!(s, "bound       {:.9}", self.bound).unwrap();
        writeln!(s, "sup ratio   {:.9}", self.sup_ratio).unwrap();
        if let Some((a, b)) = self.worst_pair {
            writeln!(s, "worst pair  {} {}", fmt_z(a), fmt_z(b)).unwrap();
        }
        writeln!(
            s,
            "pairs       {} interior, {} boundary",
            self.pairs, self.boundary_pairs
        )
        .unwrap();
        writeln!(
            s,
            "verdict     {}",
            if self.pass { "holds" } else { "VIOLATED" }
        )
        .unwrap();
        s
    }

    fn csv(&self) -> Result<String, RenderError> {
        #[derive(Serialize)]
        struct Row {
            l_phi1: f64,
            phi1_norm: f64,
            g_norm: f64,
            bound: f64,
            sup_ratio: f64,
            pairs: usize,
            boundary_pairs: usize,
            pass: bool,
        }
        write_csv([Row {
            l_phi1: self.l_phi1,
            phi1_norm: self.phi1_norm,
            g_norm: self.g_norm,
            bound: self.bound,
            sup_ratio: self.sup_ratio,
            pairs: self.pairs,
            boundary_pairs: self.boundary_pairs,
            pass: self.pass,
        }])
    }
}

impl Render for SchwarzEstimate {
    const SCHEMA: &'static str = "biharm.boundary-schwarz";

    fn text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "eta         {}", fmt_z(self.eta)).unwrap();
        writeln!(s, "{:>22}  {:>18}", "r", "quotient").unwrap();
        for (r, q) in &self.quotients {
            writeln!(s, "{r:>22.15}  {q:>18.12}").unwrap();
        }
        writeln!(s, "liminf est  {:.12}", self.liminf_est).unwrap();
        writeln!(s, "lower bound {:.12}", self.rhs).unwrap();
        writeln!(
            s,
            "verdict     {}",
            if self.pass { "holds" } else { "VIOLATED" }
        )
        .unwrap();
        s
    }

    fn csv(&self) -> Result<String, RenderError> {
        #[derive(Serialize)]
        struct Row {
            r: f64,
            quotient: f64,
            lower_bound: f64,
        }
        write_csv(self.quotients.iter().map(|&(r, quotient)| Row {
            r,
            quotient,
            lower_bound: self.rhs,
        }))
    }
}

/// Solution values at a list of points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveTable {
    pub rows: Vec<SolveRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveRow {
    pub z_re: f64,
    pub z_im: f64,
    pub f_re: f64,
    pub f_im: f64,
    /// Difference between the last two refinements, when refinement was requested.
    pub est_error: Option<f64>,
}

impl Render for SolveTable {
    const SCHEMA: &'static str = "biharm.solve";

    fn text(&self) -> String {
        let mut s = format!(
            "{:>12} {:>12}  {:>22} {:>22}\n",
            "re z", "im z", "re f", "im f"
        );
        for r in &self.rows {
            write!(
                s,
                "{:>12.6} {:>12.6}  {:>22.15e} {:>22.15e}",
                r.z_re, r.z_im, r.f_re, r.f_im
            )
            .unwrap();
            if let Some(e) = r.est_error {
                write!(s, "  (est. error {e:.1e})").unwrap();
            }
            s.push('\n');
        }
        s
    }

    fn csv(&self) -> Result<String, RenderError> {
        write_csv(&self.rows)
    }
}

/// Wirtinger derivatives at a list of points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradTable {
    pub rows: Vec<(Complex64, GradResult)>,
}

impl Render for GradTable {
    const SCHEMA: &'static str = "biharm.grad";

    fn text(&self) -> String {
        let mut s = format!(
            "{:>22}  {:>30}  {:>30}  {:>12} {:>12} {:>12}\n",
            "z", "f_z", "f_zbar", "|f_z|+|f_zb|", "lambda", "jacobian"
        );
        for (z, g) in &self.rows {
            writeln!(
                s,
                "{:>22}  {:>30}  {:>30}  {:>12.6e} {:>12.6e} {:>12.6e}",
                fmt_z(*z),
                fmt_z(g.f_z),
                fmt_z(g.f_zbar),
                g.op_norm,
                g.lambda,
                g.jacobian
            )
            .unwrap();
        }
        s
    }

    fn csv(&self) -> Result<String, RenderError> {
        #[derive(Serialize)]
        struct Row {
            z_re: f64,
            z_im: f64,
            fz_re: f64,
            fz_im: f64,
            fzbar_re: f64,
            fzbar_im: f64,
            op_norm: f64,
            lambda: f64,
            jacobian: f64,
        }
        write_csv(self.rows.iter().map(|(z, g)| Row {
            z_re: z.re,
            z_im: z.im,
            fz_re: g.f_z.re,
            fz_im: g.f_z.im,
            fzbar_re: g.f_zbar.re,
            fzbar_im: g.f_zbar.im,
            op_norm: g.op_norm,
            lambda: g.lambda,
            jacobian: g.jacobian,
        }))
    }
}

/// Outcome of the kernel self-test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestTable {
    pub checks: Vec<SelftestCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestCheck {
    pub name: String,
    /// Largest observed deviation from the reference.
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl SelftestTable {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

impl Render for SelftestTable {
    const SCHEMA: &'static str = "biharm.kernels-selftest";

    fn text(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut s = String::new();
        for c in &self.checks {
            writeln!(
                s,
                "{:<width$}  error {:>9.2e}  tol {:>7.0e}  {}",
                c.name,
                c.error,
                c.tolerance,
                if c.pass { "ok" } else { "FAIL" }
            )
            .unwrap();
        }
        s
    }

    fn csv(&self) -> Result<String, RenderError> {
        write_csv(&self.checks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn report() -> BoundReport {
        let samples = vec![
            Sample::inequality(c(0.0, 0.0), 1.0, 2.273_239_544_735_162_7),
            Sample::inequality(c(0.1, -0.3), 1.0 / 3.0, 2.5),
            Sample::inequality(Complex64::from_polar(0.9, 1.0), 0.7, 9.1),
        ];
        BoundReport::from_samples(BoundId::Thm3, samples, 1e-7)
    }

    #[test]
    fn csv_has_header_and_one_row_per_sample() {
        let csv = report().csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "z_re,z_im,lhs,rhs,margin");
    }

    #[test]
    fn csv_round_trip() {
        let rep = report();
        let back =
            bound_report_from_csv(&rep.csv().unwrap(), rep.bound_id, rep.tol_report).unwrap();
        assert_eq!(back, rep);
    }

    #[test]
    fn json_round_trip() {
        let rep = report();
        let back: BoundReport = from_json(&rep.json().unwrap()).unwrap();
        assert_eq!(back, rep);
        let landau = biharm_core::landau::landau_solve(
            &biharm_core::LandauInput::new(1.0, 0.0, 0.0).unwrap(),
            1e-15,
        )
        .unwrap();
        let back: LandauResult = from_json(&landau.json().unwrap()).unwrap();
        assert_eq!(back, landau);
        let wrong = landau.json().unwrap();
        assert!(from_json::<BoundReport>(&wrong).is_err());
    }

    #[test]
    fn landau_text_block() {
        let landau = biharm_core::landau::landau_solve(
            &biharm_core::LandauInput::new(1.0, 0.0, 0.0).unwrap(),
            1e-15,
        )
        .unwrap();
        let text = landau.text();
        for key in ["r0", "m0", "lambda0", "residual"] {
            assert!(text.lines().any(|l| l.starts_with(key)), "{text}");
        }
    }

    #[test]
    fn format_names() {
        assert_eq!("structured".parse::<Format>().unwrap(), Format::Json);
        assert_eq!("CSV".parse::<Format>().unwrap(), Format::Csv);
        assert!("yaml".parse::<Format>().is_err());
    }
}
