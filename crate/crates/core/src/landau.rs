//! Univalence radius for normalised solutions (`f(0) = 0`, `J_f(0) = 1`).
//!
//! Given bounds `|f| ≤ M1` on the disk, `|φ| ≤ M2` on the circle and
//! `|g| ≤ M3`, the radius `r0` is the root of the strictly decreasing function
//! [`landau_h`]; `f` is univalent on `|z| < r0` and its image covers a disk of
//! radius at least `m0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::DiskRule;
use crate::solver::{solve_eval, BoundaryFourier, PolarGrid, ProblemSpec};
use num_complex::Complex64;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandauInput {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

impl LandauInput {
    pub fn new(m1: f64, m2: f64, m3: f64) -> Result<Self> {
        if !(m1 > 0.0 && m1.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "M1 must be positive, got {m1}"
            )));
        }
        for (name, v) in [("M2", m2), ("M3", m3)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "{name} must be nonnegative, got {v}"
                )));
            }
        }
        Ok(LandauInput { m1, m2, m3 })
    }

    /// Lower bound for `λ(D_f(0))`: `1/((4/π)(M1+M2) + M1 + (23/24)M3)`.
    pub fn lambda0(&self) -> f64 {
        1.0 / (4.0 / PI * (self.m1 + self.m2) + self.m1 + 23.0 / 24.0 * self.m3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandauResult {
    pub r0: f64,
    pub m0: f64,
    pub lambda0: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub residual: f64,
}

fn check_radius(what: &'static str, r: f64) -> Result<()> {
    if (0.0..1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::Domain { what, modulus: r })
    }
}

/// Terms subtracted from `λ0` in the radius equation, in the order
/// `[analytic part, φ part, quadratic, source, boundary integrals]`.
fn subtracted_terms(r: f64, p: &LandauInput) -> [f64; 5] {
    let (m1, m2, m3) = (p.m1, p.m2, p.m3);
    let one_m = 1.0 - r;
    let one_m2 = 1.0 - r * r;
    [
        4.0 * (m1 + m2) / PI * r * (2.0 - r) / (one_m * one_m),
        2.0 * m2 * r,
        r * r / one_m2 * (2.0 * m1 + 4.0 * m2 / PI),
        101.0 * m3 / 120.0 * r,
        2.0 * m1 * r * (2.0 + 2.0 * r + r * r) / (one_m * one_m2),
    ]
}

/// The radius function whose root is `r0`.
pub fn landau_h(r: f64, input: &LandauInput) -> Result<f64> {
    check_radius("landau_h", r)?;
    Ok(input.lambda0() - subtracted_terms(r, input).iter().sum::<f64>())
}

/// Growth bound `τ(r)` for `|f_z(z) - f_z(0)| + |f_z̄(z) - f_z̄(0)|` on `|z| = r`.
/// Strictly increasing, and `landau_h(r) = λ0 - τ(r)`.
pub fn tau_eval(r: f64, input: &LandauInput) -> Result<f64> {
    check_radius("tau_eval", r)?;
    let (m1, m2, m3) = (input.m1, input.m2, input.m3);
    let one_m = 1.0 - r;
    let one_m2 = 1.0 - r * r;
    Ok(4.0 * (m1 + m2) / PI * r * (2.0 - r) / (one_m * one_m)
        + 2.0 * r * r * m1 / one_m2
        + 2.0 * m2 * r
        + 4.0 * m2 * r * r / (PI * one_m2)
        + m3 * r / 8.0
        + 43.0 * m3 * r / 60.0
        + 2.0 * m1 * r * (2.0 + 2.0 * r + r * r) / (one_m * one_m2))
}

/// The same growth bound before the source term `M3 r (1 - r²)/8` is
/// relaxed to `M3 r / 8`. Never exceeds [`tau_eval`].
pub fn gradient_deviation_bound(r: f64, input: &LandauInput) -> Result<f64> {
    let tau = tau_eval(r, input)?;
    Ok(tau - input.m3 * r * r * r / 8.0)
}

/// Bisection for the root of a strictly decreasing function on `(lo, hi)`
/// with `f(lo) > 0 > f(hi)`. Returns `(root, final bracket, iterations)`.
pub(crate) fn bisect_decreasing<F>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> (f64, (f64, f64), usize)
where
    F: Fn(f64) -> f64,
{
    let mut iterations = 0;
    while hi - lo > tol && iterations < 200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        iterations += 1;
        if v == 0.0 {
            return (mid, (lo, hi), iterations);
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi), (lo, hi), iterations)
}

/// Upper bracket candidates `0.5, 0.75, 0.9, 0.99, …, 1 - 1e-9`.
fn bracket_candidates() -> impl Iterator<Item = f64> {
    [0.5, 0.75]
        .into_iter()
        .chain((1..=9).map(|k| 1.0 - 10f64.powi(-k)))
}

pub fn landau_solve(input: &LandauInput, tol: f64) -> Result<LandauResult> {
    let input = LandauInput::new(input.m1, input.m2, input.m3)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let h = |r: f64| landau_h(r, &input).expect("bracket stays inside [0, 1)");
    let hi = bracket_candidates()
        .find(|&r| h(r) < 0.0)
        .ok_or(Error::Bracket("landau_h"))?;
    let (r0, bracket, iterations) = bisect_decreasing(h, 0.0, hi, tol);
    let lambda0 = input.lambda0();
    let (m1, m2, m3) = (input.m1, input.m2, input.m3);
    let q = r0 * r0 / (1.0 - r0 * r0);
    let m0 = r0
        * (1.0 / (8.0 / PI * (m1 + m2) + 2.0 * m1 + 23.0 / 12.0 * m3)
            + 2.0 * m2 * q / (3.0 * PI)
            + m1 * q / 3.0);
    Ok(LandauResult {
        r0,
        m0,
        lambda0,
        bracket,
        iterations,
        residual: h(r0),
    })
}

/// Comparison radii for biharmonic mappings with harmonic parts bounded by `M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AaRadii {
    pub rho2: f64,
    pub r2: f64,
    pub rho3: f64,
    pub r3: f64,
}

/// Residual of the first comparison equation, decreasing in `ρ`.
pub fn aa1_residual(rho: f64, m: f64) -> f64 {
    PI / (4.0 * m) - 2.0 * m * rho - 4.0 * m * rho / ((1.0 - rho) * (1.0 - rho))
}

/// Residual of the second comparison equation, decreasing in `ρ`.
pub fn aa2_residual(rho: f64, m: f64) -> f64 {
    PI / (4.0 * m)
        - 4.0 * m * rho / (1.0 - rho)
        - 2.0 * m * rho * (2.0 - rho) / ((1.0 - rho) * (1.0 - rho))
}

pub fn aa_radii(m: f64) -> Result<AaRadii> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidInput(format!("M must be positive, got {m}")));
    }
    let solve = |f: &dyn Fn(f64) -> f64, name: &'static str| -> Result<f64> {
        let hi = bracket_candidates()
            .find(|&r| f(r) < 0.0)
            .ok_or(Error::Bracket(name))?;
        Ok(bisect_decreasing(f, 0.0, hi, 1e-16).0)
    };
    let rho2 = solve(&|r| aa1_residual(r, m), "aa1")?;
    let rho3 = solve(&|r| aa2_residual(r, m), "aa2")?;
    let k = PI / (4.0 * m);
    Ok(AaRadii {
        rho2,
        r2: k * rho2 - 2.0 * m * (rho2.powi(3) + rho2 * rho2) / (1.0 - rho2),
        rho3,
        r3: k * rho3 * rho3 - 2.0 * m * rho3.powi(4) / (1.0 - rho3),
    })
}

/// `ν(s) = ((1-s²)/(8s²)) ((1+s²)/(1-s²) - ((1-s²)/(2s)) log((1+s)/(1-s)))`,
/// which decreases from `1/3` at `0⁺` to `1/4` at `1⁻`.
pub fn nu_eval(s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain {
            what: "nu_eval",
            modulus: s,
        });
    }
    if s < 1e-3 {
        let s2 = s * s;
        return Ok(1.0 / 3.0 - s2 / 15.0 - s2 * s2 / 105.0 - s2 * s2 * s2 / 315.0);
    }
    let one_m2 = 1.0 - s * s;
    let log = (2.0 * s / (1.0 - s)).ln_1p();
    Ok(((1.0 + s * s) - one_m2 * one_m2 * log / (2.0 * s)) / (8.0 * s * s))
}

/// Coefficient sums of a bounded harmonic function against their bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffReport {
    pub bound: f64,
    pub a0: f64,
    /// `(n, |a_n| + |b_n|)` for `n = 1..=degree`.
    pub sums: Vec<(usize, f64)>,
    pub max_sum: f64,
    pub pass: bool,
}

/// For `P[ψ] = Σ a_n z^n + Σ b̄_n z̄^n` with `|P[ψ]| ≤ M`, checks `|a_0| ≤ M`
/// and `|a_n| + |b_n| ≤ 4M/π`. `b̄_n` is the Fourier coefficient at `-n`; only
/// moduli enter, so the conjugation is immaterial.
pub fn harmonic_coeff_check(psi: &BoundaryFourier, m: f64) -> Result<CoeffReport> {
    let sup = psi.sup_norm();
    if sup > m + 1e-9 {
        return Err(Error::hypothesis(
            "extension-sup",
            format!("sup of the extension {sup} exceeds M = {m}"),
        ));
    }
    let bound = 4.0 * m / PI;
    let a0 = psi.coeff(0).norm();
    let sums: Vec<(usize, f64)> = (1..=psi.degree())
        .map(|n| {
            (
                n,
                psi.coeff(n as i64).norm() + psi.coeff(-(n as i64)).norm(),
            )
        })
        .collect();
    let max_sum = sums.iter().map(|s| s.1).fold(0.0, f64::max);
    Ok(CoeffReport {
        bound,
        a0,
        pass: a0 <= m + 1e-12 && max_sum <= bound + 1e-12,
        sums,
        max_sum,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub injective: bool,
    pub witness: Option<(Complex64, Complex64)>,
}

/// Heuristic injectivity probe: evaluates `f` on a polar grid of `|z| ≤ r`
/// and looks for two images closer than `separation` whose preimages are
/// farther apart than the grid spacing. Not a proof of univalence.
pub fn univalence_probe(
    spec: &ProblemSpec,
    r: f64,
    radial: usize,
    angular: usize,
    separation: f64,
    rule: &DiskRule,
) -> Result<ProbeResult> {
    check_radius("univalence_probe", r)?;
    let grid = PolarGrid::new(radial.max(2), angular.max(1), r);
    let pts = grid.points();
    let images: Vec<Complex64> = pts
        .par_iter()
        .map(|&z| solve_eval(spec, z, rule))
        .collect::<Result<_>>()?;
    let spacing = (r / (grid.radial - 1) as f64).max(2.0 * PI * r / grid.angular as f64);

    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| images[a].re.total_cmp(&images[b].re).then(a.cmp(&b)));
    for (i, &a) in order.iter().enumerate() {
        for &b in &order[i + 1..] {
            if images[b].re - images[a].re >= separation {
                break;
            }
            if (images[a] - images[b]).norm() < separation && (pts[a] - pts[b]).norm() > spacing {
                let (p, q) = if a < b {
                    (pts[a], pts[b])
                } else {
                    (pts[b], pts[a])
                };
                return Ok(ProbeResult {
                    injective: false,
                    witness: Some((p, q)),
                });
            }
        }
    }
    Ok(ProbeResult {
        injective: true,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::BidegreePoly;

    fn unit() -> LandauInput {
        LandauInput::new(1.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn h_examples() {
        let p = unit();
        assert!((landau_h(0.0, &p).unwrap() - PI / (4.0 + PI)).abs() < 1e-15);
        // Hand evaluation of the three nonzero terms at r = 0.05:
        // (4/π)(0.05·1.95/0.9025) + 2·0.0025/0.9975 + 0.1·2.1025/(0.95·0.9975)
        let terms = 4.0 / PI * 0.05 * 1.95 / 0.9025
            + 2.0 * 0.0025 / 0.9975
            + 0.1 * 2.1025 / (0.95 * 0.9975);
        assert!((landau_h(0.05, &p).unwrap() - (PI / (4.0 + PI) - terms)).abs() < 1e-14);
        assert!((landau_h(0.05, &p).unwrap() - 0.0755).abs() < 1e-3);
        assert!((landau_h(0.07, &p).unwrap() + 0.0933).abs() < 1e-3);
        assert!(landau_h(1.0, &p).is_err());
    }

    #[test]
    fn input_validation() {
        assert!(LandauInput::new(0.0, 0.0, 0.0).is_err());
        assert!(LandauInput::new(1.0, -1.0, 0.0).is_err());
        assert!(LandauInput::new(1.0, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn solve_unit_case() {
        let res = landau_solve(&unit(), 1e-15).unwrap();
        assert!(res.r0 > 0.05 && res.r0 < 0.07);
        assert!(res.residual.abs() <= 1e-12);
        assert!(res.bracket.0 <= res.r0 && res.r0 <= res.bracket.1);
        assert!(res.iterations <= 60);
        assert!((res.lambda0 - PI / (4.0 + PI)).abs() < 1e-15);
        assert!(res.m0 > 0.0);
    }

    #[test]
    fn m0_matches_covering_estimate() {
        // m0 = r0 (λ0 - half the linear terms - a third of the quadratic ones),
        // which collapses to the closed form once h(r0) = 0.
        for (m1, m2, m3) in [(1.0, 0.0, 0.0), (2.0, 0.5, 3.0), (0.3, 1.0, 10.0)] {
            let p = LandauInput::new(m1, m2, m3).unwrap();
            let res = landau_solve(&p, 1e-15).unwrap();
            let t = subtracted_terms(res.r0, &p);
            let covering = res.r0 * (p.lambda0() - (t[0] + t[1] + t[3] + t[4]) / 2.0 - t[2] / 3.0);
            assert!(
                (covering - res.m0).abs() < 1e-12,
                "{covering} vs {}",
                res.m0
            );
            let floor = res.r0 / (8.0 / PI * (m1 + m2) + 2.0 * m1 + 23.0 / 12.0 * m3);
            assert!(res.m0 >= floor);
        }
    }

    #[test]
    fn h_strictly_decreasing_and_tau_increasing() {
        let p = LandauInput::new(1.0, 1.0, 1.0).unwrap();
        let mut prev_h = f64::INFINITY;
        let mut prev_tau = -1.0;
        for i in 0..1000 {
            let r = 0.99 * i as f64 / 999.0;
            let h = landau_h(r, &p).unwrap();
            let tau = tau_eval(r, &p).unwrap();
            assert!(h < prev_h);
            assert!(tau > prev_tau);
            assert!((h - (p.lambda0() - tau)).abs() < 1e-14 * (1.0 + tau));
            assert!(gradient_deviation_bound(r, &p).unwrap() <= tau);
            prev_h = h;
            prev_tau = tau;
        }
        assert_eq!(tau_eval(0.0, &p).unwrap(), 0.0);
    }

    #[test]
    fn tau_example() {
        let t = tau_eval(0.05, &unit()).unwrap();
        assert!((t - 0.364).abs() < 1e-3);
    }

    #[test]
    fn aa_radii_unit() {
        assert!(aa1_residual(0.0, 1.0) > 0.0);
        assert!((aa1_residual(0.5, 1.0) - (PI / 4.0 - 1.0 - 8.0)).abs() < 1e-14);
        let a = aa_radii(1.0).unwrap();
        assert!(a.rho2 > 0.0 && a.rho2 < 0.5);
        assert!(aa1_residual(a.rho2, 1.0).abs() <= 1e-12);
        assert!(aa2_residual(a.rho3, 1.0).abs() <= 1e-12);
        assert!(a.r2 > 0.0 && a.r3 > 0.0);
        assert!(aa_radii(0.0).is_err());
    }

    #[test]
    fn nu_limits_and_range() {
        assert!((nu_eval(1e-9).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((nu_eval(1.0 - 1e-9).unwrap() - 0.25).abs() < 1e-6);
        let mid = nu_eval(0.5).unwrap();
        assert!((0.25..=0.3334).contains(&mid));
        // The two branches agree at the switch point.
        let s: f64 = 1e-3;
        let direct = {
            let one_m2 = 1.0 - s * s;
            ((1.0 + s * s) - one_m2 * one_m2 * (2.0 * s / (1.0 - s)).ln_1p() / (2.0 * s))
                / (8.0 * s * s)
        };
        assert!((direct - nu_eval(s * 0.999_999).unwrap()).abs() < 1e-9);
        for i in 1..10_000 {
            let s = 1e-6 + (1.0 - 2e-6) * i as f64 / 10_000.0;
            let v = nu_eval(s).unwrap();
            assert!((0.25..=1.0 / 3.0).contains(&v), "nu({s}) = {v}");
        }
        assert!(nu_eval(0.0).is_err());
        assert!(nu_eval(1.0).is_err());
    }

    #[test]
    fn coefficient_examples() {
        let e1 = BoundaryFourier::monomial(1, Complex64::new(1.0, 0.0));
        let rep = harmonic_coeff_check(&e1, 1.0).unwrap();
        assert!((rep.max_sum - 1.0).abs() < 1e-15);
        assert!(rep.pass);
        let k = BoundaryFourier::constant(Complex64::new(0.7, 0.0));
        let rep = harmonic_coeff_check(&k, 1.0).unwrap();
        assert!((rep.a0 - 0.7).abs() < 1e-15 && rep.pass);
        assert!(harmonic_coeff_check(&e1, 0.5).is_err());
    }

    #[test]
    fn probe_examples() {
        let rule = DiskRule::default();
        let id = ProblemSpec::new(
            BoundaryFourier::monomial(1, Complex64::new(1.0, 0.0)),
            BoundaryFourier::zero(),
            BidegreePoly::zero(),
        );
        assert!(
            univalence_probe(&id, 0.5, 64, 128, 1e-8, &rule)
                .unwrap()
                .injective
        );
        let sq = ProblemSpec::new(
            BoundaryFourier::monomial(2, Complex64::new(1.0, 0.0)),
            BoundaryFourier::zero(),
            BidegreePoly::zero(),
        );
        let res = univalence_probe(&sq, 0.5, 64, 128, 1e-8, &rule).unwrap();
        assert!(!res.injective);
        let (a, b) = res.witness.unwrap();
        assert!((a + b).norm() < 1e-12, "{a} {b}");
    }
}
