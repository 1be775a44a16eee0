//! Majorants and Lipschitz-type moduli of continuity.
//!
//! A majorant is a continuous nondecreasing `ω` with `ω(0) = 0` and
//! `ω(t)/t` nonincreasing. For data with `f = 0` on the circle the solution
//! satisfies `|f(z₁) - f(z₂)| ≤ K ω(|z₁ - z₂|)` with
//! `K = 8Lc + 4Lω(2) + 2||φ₁||∞ + (23/48)||g||∞`, where `L` is the
//! `ω`-Lipschitz constant of `φ₁` and `c = limsup_{t→0} ω(t)/t`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::source_sup_norm;
use crate::error::{Error, Result};
use crate::quadrature::DiskRule;
use crate::solver::{solve_eval, BoundaryFourier, ProblemSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Majorant {
    /// `ω(t) = a t`
    Linear { a: f64 },
    /// `ω(t) = arctan t`
    Arctan,
    /// Piecewise-linear interpolation of `(0, 0)` and the knots `(ts, values)`,
    /// constant beyond the last knot.
    Table { ts: Vec<f64>, values: Vec<f64> },
}

impl Majorant {
    pub fn identity() -> Self {
        Majorant::Linear { a: 1.0 }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Majorant::Linear { a } => a * t,
            Majorant::Arctan => t.atan(),
            Majorant::Table { ts, values } => {
                if ts.is_empty() || t <= 0.0 {
                    return 0.0;
                }
                let i = ts.partition_point(|&k| k < t);
                if i == ts.len() {
                    return values[values.len() - 1];
                }
                let (t0, v0) = if i == 0 {
                    (0.0, 0.0)
                } else {
                    (ts[i - 1], values[i - 1])
                };
                v0 + (values[i] - v0) * (t - t0) / (ts[i] - t0)
            }
        }
    }

    /// `c = limsup_{t→0} ω(t)/t`.
    pub fn c(&self) -> f64 {
        match self {
            Majorant::Linear { a } => *a,
            Majorant::Arctan => 1.0,
            Majorant::Table { ts, values } => match (ts.first(), values.first()) {
                (Some(t), Some(v)) => v / t,
                _ => f64::NAN,
            },
        }
    }

    fn structural_problems(&self) -> Vec<String> {
        let mut reasons = Vec::new();
        match self {
            Majorant::Linear { a } => {
                if !(a.is_finite() && *a > 0.0) {
                    reasons.push(format!("slope must be positive and finite, got {a}"));
                }
            }
            Majorant::Arctan => {}
            Majorant::Table { ts, values } => {
                if ts.is_empty() || ts.len() != values.len() {
                    reasons.push(format!(
                        "table needs matching nonempty knot lists, got {} abscissae and {} values",
                        ts.len(),
                        values.len()
                    ));
                } else {
                    if ts.iter().chain(values).any(|x| !x.is_finite()) {
                        reasons.push("table entries must be finite".into());
                    }
                    if ts[0] <= 0.0 || ts.windows(2).any(|w| w[0] >= w[1]) {
                        reasons.push(
                            "table abscissae must be positive and strictly increasing".into(),
                        );
                    }
                }
            }
        }
        reasons
    }
}

/// Outcome of [`majorant_validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorantCheck {
    pub valid: bool,
    /// `ω(t)/t` at the smallest grid point.
    pub c: f64,
    pub reasons: Vec<String>,
}

/// Relative slack for the sampled monotonicity tests.
const MONOTONE_SLACK: f64 = 1e-12;

/// Checks the majorant axioms on `samples` log-spaced points of `[1e-9, 2]`.
pub fn majorant_validate(m: &Majorant, samples: usize) -> MajorantCheck {
    let mut reasons = m.structural_problems();
    if !reasons.is_empty() {
        return MajorantCheck {
            valid: false,
            c: f64::NAN,
            reasons,
        };
    }
    let samples = samples.max(2);
    let (lo, hi) = (1e-9f64.ln(), 2f64.ln());
    let ts: Vec<f64> = (0..samples)
        .map(|i| (lo + (hi - lo) * i as f64 / (samples - 1) as f64).exp())
        .collect();
    let values: Vec<f64> = ts.iter().map(|&t| m.eval(t)).collect();

    if m.eval(0.0) != 0.0 {
        reasons.push(format!("ω(0) = {} is not 0", m.eval(0.0)));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
        reasons.push(format!(
            "ω({}) = {} is not a finite nonnegative value",
            ts[i], values[i]
        ));
    }
    if let Some(i) = (1..samples).find(|&i| values[i] < values[i - 1] * (1.0 - MONOTONE_SLACK)) {
        reasons.push(format!(
            "ω decreases between t = {} and t = {}",
            ts[i - 1],
            ts[i]
        ));
    }
    if let Some(i) = (1..samples)
        .find(|&i| values[i] / ts[i] > values[i - 1] / ts[i - 1] * (1.0 + MONOTONE_SLACK))
    {
        reasons.push(format!(
            "ω(t)/t increases between t = {} and t = {}",
            ts[i - 1],
            ts[i]
        ));
    }
    let c = values[0] / ts[0];
    let declared = m.c();
    if !(c.is_finite() && c > 0.0) {
        reasons.push(format!(
            "limsup ω(t)/t is not finite and positive (sampled {c})"
        ));
    } else if (c - declared).abs() > 1e-6 * declared.abs().max(1.0) {
        reasons.push(format!(
            "sampled ω(t)/t near 0 is {c}, declared constant is {declared}"
        ));
    }
    MajorantCheck {
        valid: reasons.is_empty(),
        c,
        reasons,
    }
}

/// Grid size used when a majorant is validated implicitly.
pub const VALIDATION_SAMPLES: usize = 2000;

fn require_valid(m: &Majorant) -> Result<()> {
    let check = majorant_validate(m, VALIDATION_SAMPLES);
    if check.valid {
        Ok(())
    } else {
        Err(Error::InvalidMajorant(check.reasons))
    }
}

/// `8Lc + 4Lω(2) + 2||φ₁||∞ + (23/48)||g||∞`.
pub fn thm5_constant(l: f64, m: &Majorant, phi1_norm: f64, g_norm: f64) -> Result<f64> {
    require_valid(m)?;
    if !(l >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "L must be nonnegative, got {l}"
        )));
    }
    Ok(8.0 * l * m.c() + 4.0 * l * m.eval(2.0) + 2.0 * phi1_norm + 23.0 / 48.0 * g_norm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    /// Sampled `ω`-Lipschitz constant of `φ₁`, inflated by [`L_INFLATION`].
    pub l_phi1: f64,
    pub phi1_norm: f64,
    pub g_norm: f64,
    pub bound: f64,
    pub sup_ratio: f64,
    /// Pair attaining `sup_ratio` (lowest index among ties).
    pub worst_pair: Option<(Complex64, Complex64)>,
    pub pairs: usize,
    pub boundary_pairs: usize,
    pub pass: bool,
}

/// Safety factor applied to the sampled boundary constant, which is a lower
/// bound for the true one.
pub const L_INFLATION: f64 = 1.05;
/// Boundary pairs used for the first estimate of `L`.
pub const BOUNDARY_PAIRS: usize = 4096;
/// Interior points are sampled in `|z| ≤ INTERIOR_RADIUS`.
pub const INTERIOR_RADIUS: f64 = 0.98;
const PASS_SLACK: f64 = 1e-6;

/// Pairs closer than this are skipped in difference quotients.
const MIN_SEPARATION: f64 = 1e-12;

/// Max sampled `|ψ(e^{it}) - ψ(e^{iθ})| / ω(|e^{it} - e^{iθ}|)`, before inflation.
pub fn boundary_lipschitz(psi: &BoundaryFourier, m: &Majorant, pairs: usize, seed: u64) -> f64 {
    if psi.is_zero() {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let angles: Vec<(f64, f64)> = (0..pairs)
        .map(|_| (rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI)))
        .collect();
    angles
        .par_iter()
        .map(|&(t, s)| {
            let d = (Complex64::from_polar(1.0, t) - Complex64::from_polar(1.0, s)).norm();
            if d < MIN_SEPARATION {
                0.0
            } else {
                (psi.eval(t) - psi.eval(s)).norm() / m.eval(d)
            }
        })
        .reduce(|| 0.0, f64::max)
}

/// The first `count` interior pairs for `seed`; extending `count` keeps the
/// prefix unchanged.
pub fn interior_pairs(count: usize, seed: u64) -> Vec<(Complex64, Complex64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = move || {
        let r = INTERIOR_RADIUS * rng.gen::<f64>().sqrt();
        Complex64::from_polar(r, rng.gen_range(0.0..2.0 * PI))
    };
    (0..count).map(|_| (point(), point())).collect()
}

/// Estimates the `ω`-modulus of the solution for data vanishing on the
/// circle and compares it with [`thm5_constant`].
///
/// If the sampled ratio exceeds the bound, the boundary constant is
/// re-estimated with sixteen times as many pairs before the verdict.
pub fn modulus_estimate(
    spec: &ProblemSpec,
    m: &Majorant,
    pair_count: usize,
    seed: u64,
    rule: &DiskRule,
) -> Result<LipschitzReport> {
    if !spec.f_star.is_zero() {
        return Err(Error::hypothesis(
            "boundary-zero",
            "f* must vanish on the circle",
        ));
    }
    require_valid(m)?;
    let phi1 = spec.phi1();
    let phi1_norm = phi1.sup_norm();
    let g_norm = source_sup_norm(&spec.g);

    let pairs = interior_pairs(pair_count, seed);
    let ratios: Vec<f64> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let d = (a - b).norm();
            if d < MIN_SEPARATION {
                return Ok(0.0);
            }
            Ok((solve_eval(spec, a, rule)? - solve_eval(spec, b, rule)?).norm() / m.eval(d))
        })
        .collect::<Result<_>>()?;
    let mut sup_ratio = 0.0;
    let mut worst_pair = None;
    for (p, &q) in pairs.iter().zip(&ratios) {
        if q > sup_ratio {
            sup_ratio = q;
            worst_pair = Some(*p);
        }
    }

    let mut boundary_pairs = BOUNDARY_PAIRS;
    let mut l_phi1 = boundary_lipschitz(&phi1, m, boundary_pairs, seed) * L_INFLATION;
    let mut bound = thm5_constant(l_phi1, m, phi1_norm, g_norm)?;
    if sup_ratio > bound + PASS_SLACK {
        boundary_pairs *= 16;
        l_phi1 = l_phi1.max(boundary_lipschitz(&phi1, m, boundary_pairs, seed) * L_INFLATION);
        bound = thm5_constant(l_phi1, m, phi1_norm, g_norm)?;
    }
    Ok(LipschitzReport {
        l_phi1,
        phi1_norm,
        g_norm,
        bound,
        sup_ratio,
        worst_pair,
        pairs: pair_count,
        boundary_pairs,
        pass: sup_ratio <= bound + PASS_SLACK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::BidegreePoly;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn majorant_examples() {
        let id = majorant_validate(&Majorant::identity(), 500);
        assert!(id.valid, "{:?}", id.reasons);
        assert!((id.c - 1.0).abs() < 1e-12);
        let at = majorant_validate(&Majorant::Arctan, 500);
        assert!(at.valid, "{:?}", at.reasons);
        assert!((at.c - 1.0).abs() < 1e-12);
        let square = Majorant::Table {
            ts: vec![0.5, 1.0, 2.0],
            values: vec![0.25, 1.0, 4.0],
        };
        let chk = majorant_validate(&square, 500);
        assert!(!chk.valid);
        assert!(chk.reasons.iter().any(|r| r.contains("ω(t)/t increases")));
        assert!(!majorant_validate(&Majorant::Linear { a: -1.0 }, 10).valid);
        let concave = Majorant::Table {
            ts: vec![0.5, 1.0],
            values: vec![0.5, 0.75],
        };
        assert!(majorant_validate(&concave, 500).valid);
        assert_eq!(concave.eval(0.25), 0.25);
        assert_eq!(concave.eval(0.75), 0.625);
        assert_eq!(concave.eval(3.0), 0.75);
    }

    #[test]
    fn constant_examples() {
        let id = Majorant::identity();
        assert_eq!(thm5_constant(0.0, &id, 1.0, 0.0).unwrap(), 2.0);
        assert_eq!(thm5_constant(1.0, &id, 0.0, 0.0).unwrap(), 16.0);
        assert_eq!(thm5_constant(0.0, &id, 0.0, 48.0).unwrap(), 23.0);
        let bad = Majorant::Table {
            ts: vec![1.0, 2.0],
            values: vec![1.0, 4.0],
        };
        assert!(matches!(
            thm5_constant(0.0, &bad, 0.0, 0.0),
            Err(Error::InvalidMajorant(_))
        ));
    }

    #[test]
    fn constant_is_linear() {
        let m = Majorant::Arctan;
        let base = thm5_constant(0.0, &m, 0.0, 0.0).unwrap();
        assert_eq!(base, 0.0);
        let l = thm5_constant(1.0, &m, 0.0, 0.0).unwrap();
        let p = thm5_constant(0.0, &m, 1.0, 0.0).unwrap();
        let g = thm5_constant(0.0, &m, 0.0, 1.0).unwrap();
        let mixed = thm5_constant(2.5, &m, 3.0, 7.0).unwrap();
        assert!((mixed - (2.5 * l + 3.0 * p + 7.0 * g)).abs() < 1e-12);
    }

    #[test]
    fn remark_example_passes() {
        let spec = ProblemSpec::new(
            BoundaryFourier::zero(),
            BoundaryFourier::monomial(1, c(-1.0, 0.0)),
            BidegreePoly::zero(),
        );
        let rep =
            modulus_estimate(&spec, &Majorant::identity(), 500, 3, &DiskRule::default()).unwrap();
        assert_eq!(rep.l_phi1, 0.0);
        assert_eq!(rep.bound, 2.0);
        assert!(rep.sup_ratio < 2.0 && rep.sup_ratio > 1.0);
        assert!(rep.pass);
    }

    #[test]
    fn zero_data_gives_zero_ratio() {
        let spec = ProblemSpec::new(
            BoundaryFourier::zero(),
            BoundaryFourier::zero(),
            BidegreePoly::zero(),
        );
        let rep = modulus_estimate(&spec, &Majorant::Arctan, 100, 1, &DiskRule::default()).unwrap();
        assert_eq!(rep.sup_ratio, 0.0);
        assert!(rep.pass);
    }

    #[test]
    fn nonzero_boundary_values_rejected() {
        let spec = ProblemSpec::new(
            BoundaryFourier::monomial(1, c(1.0, 0.0)),
            BoundaryFourier::zero(),
            BidegreePoly::zero(),
        );
        let err = modulus_estimate(&spec, &Majorant::identity(), 10, 1, &DiskRule::default())
            .unwrap_err();
        assert!(matches!(
            err,
            Error::Hypothesis {
                gate: "boundary-zero",
                ..
            }
        ));
    }

    #[test]
    fn interior_pairs_extend_as_prefix() {
        let a = interior_pairs(50, 9);
        let b = interior_pairs(80, 9);
        assert_eq!(a[..], b[..50]);
        assert!(b
            .iter()
            .all(|(p, q)| p.norm() <= INTERIOR_RADIUS && q.norm() <= INTERIOR_RADIUS));
    }

    #[test]
    fn boundary_constant_of_rotation() {
        // |e^{it} - e^{is}| / ω(|e^{it} - e^{is}|) = 1 for ω = id.
        let psi = BoundaryFourier::monomial(1, c(1.0, 0.0));
        let l = boundary_lipschitz(&psi, &Majorant::identity(), 256, 4);
        assert!((l - 1.0).abs() < 1e-9);
    }
}
