//! Pointwise inequality checks and grid sweeps.
//!
//! Every check returns the two sides of an inequality `lhs ≤ rhs`; the grid
//! sweep [`grid_verify`] collects them into a [`BoundReport`]. The
//! inequalities hold exactly, so a report only flags a violation when the
//! margin falls below `-tol_report`, which absorbs quadrature noise.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_closed_disk, check_open_disk, Error, Result};
use crate::quadrature::{disk_integrate_abs_green, disk_integrate_abs_green_gradient, DiskRule};
use crate::solver::{
    solution_sup_norm, solve_eval, solve_gradient, BidegreePoly, BoundaryFourier, PolarGrid,
    ProblemSpec, DOMAIN_MARGIN,
};

/// Default report tolerance.
pub const TOL_REPORT: f64 = 1e-7;

/// Slack allowed on unit-ball hypotheses such as `sup |f| ≤ 1`.
pub const GATE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundId {
    Thm1,
    Thm3,
    Heinz,
    Pavlovic,
    Colonna,
    GreenMass,
    GradGreenMass,
    BoundarySchwarz,
}

impl BoundId {
    pub const ALL: [BoundId; 8] = [
        BoundId::Thm1,
        BoundId::Thm3,
        BoundId::Heinz,
        BoundId::Pavlovic,
        BoundId::Colonna,
        BoundId::GreenMass,
        BoundId::GradGreenMass,
        BoundId::BoundarySchwarz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundId::Thm1 => "thm1",
            BoundId::Thm3 => "thm3",
            BoundId::Heinz => "heinz",
            BoundId::Pavlovic => "pavlovic",
            BoundId::Colonna => "colonna",
            BoundId::GreenMass => "green-mass",
            BoundId::GradGreenMass => "grad-green-mass",
            BoundId::BoundarySchwarz => "boundary-schwarz",
        }
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        BoundId::ALL
            .into_iter()
            .find(|id| id.name() == key)
            .ok_or_else(|| Error::InvalidInput(format!("unknown bound '{s}'")))
    }
}

/// One evaluated point of an inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub z: Complex64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

impl Sample {
    /// Sample of an inequality `lhs ≤ rhs`.
    pub fn inequality(z: Complex64, lhs: f64, rhs: f64) -> Self {
        Sample {
            z,
            lhs,
            rhs,
            margin: rhs - lhs,
        }
    }

    /// Sample of an identity `lhs = rhs`; the margin is `-|lhs - rhs|`.
    pub fn identity(z: Complex64, lhs: f64, rhs: f64) -> Self {
        Sample {
            z,
            lhs,
            rhs,
            margin: -(lhs - rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_id: BoundId,
    pub samples: Vec<Sample>,
    pub min_margin: f64,
    pub violated: bool,
    pub worst_point: Complex64,
    pub tol_report: f64,
}

impl BoundReport {
    /// Assembles a report; the worst point is the first sample attaining the
    /// minimum margin.
    pub fn from_samples(bound_id: BoundId, samples: Vec<Sample>, tol_report: f64) -> Self {
        let mut min_margin = f64::INFINITY;
        let mut worst_point = Complex64::new(0.0, 0.0);
        for s in &samples {
            if s.margin < min_margin || s.margin.is_nan() && !min_margin.is_nan() {
                min_margin = s.margin;
                worst_point = s.z;
            }
        }
        BoundReport {
            bound_id,
            violated: !(min_margin >= -tol_report),
            samples,
            min_margin,
            worst_point,
            tol_report,
        }
    }
}

/// Sup norms entering the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    /// `||P[f*]||∞`
    pub p_f_star: f64,
    /// `||P[|f*|]||∞`
    pub p_abs_f_star: f64,
    /// `||P[φ₁]||∞`
    pub p_phi1: f64,
    /// `||φ||∞` on the circle
    pub phi: f64,
    /// `||g||∞` on the closed disk
    pub g: f64,
    /// `||f||∞` on the closed disk, when computed
    pub f: Option<f64>,
}

/// Grid used for `||g||∞`; polynomial sources of bidegree up to 16 are
/// resolved well by it.
pub fn source_sup_norm(g: &BidegreePoly) -> f64 {
    if g.is_zero() {
        return 0.0;
    }
    PolarGrid::new(65, 256, 1.0)
        .points()
        .into_iter()
        .map(|w| g.eval(w).norm())
        .fold(0.0, f64::max)
}

impl Norms {
    /// Norms of the data. Harmonic extensions attain their sup on the
    /// circle, so dense boundary sampling suffices for them.
    pub fn of_data(spec: &ProblemSpec) -> Self {
        let f_sup = spec.f_star.sup_norm();
        Norms {
            p_f_star: f_sup,
            p_abs_f_star: f_sup,
            p_phi1: spec.phi1().sup_norm(),
            phi: spec.phi.sup_norm(),
            g: source_sup_norm(&spec.g),
            f: None,
        }
    }

    /// Adds `||f||∞`, estimated on `grid` together with the boundary values.
    pub fn with_solution(
        mut self,
        spec: &ProblemSpec,
        grid: &PolarGrid,
        rule: &DiskRule,
    ) -> Result<Self> {
        self.f = Some(solution_sup_norm(spec, grid, rule)?);
        Ok(self)
    }

    pub fn compute(spec: &ProblemSpec, grid: &PolarGrid, rule: &DiskRule) -> Result<Self> {
        Self::of_data(spec).with_solution(spec, grid, rule)
    }

    fn solution(&self) -> Result<f64> {
        self.f
            .ok_or_else(|| Error::InvalidInput("sup of the solution was not computed".into()))
    }
}

/// `f(z)` on the closed disk; on the circle the boundary model is used.
fn eval_closed(spec: &ProblemSpec, z: Complex64, rule: &DiskRule) -> Result<Complex64> {
    check_closed_disk("thm1_check", z)?;
    let r = z.norm();
    if r >= 1.0 {
        return Ok(spec.f_star.eval(z.arg()));
    }
    solve_eval(spec, z, rule)
}

/// Both sides of the Schwarz-type bound for `f` recentred by its data at 0.
pub fn thm1_check(
    spec: &ProblemSpec,
    z: Complex64,
    norms: &Norms,
    rule: &DiskRule,
) -> Result<(f64, f64)> {
    let f = eval_closed(spec, z, rule)?;
    let r = z.norm().min(1.0);
    let r2 = r * r;
    let pf0 = spec.f_star.coeff(0);
    let pphi1_0 = spec.phi.coeff(1);
    let lhs = (f - pf0 * ((1.0 - r2) / (1.0 + r2))
        + pphi1_0 * ((1.0 - r2) * (1.0 - r2) / (1.0 + r2)))
        .norm();
    let at = r.atan();
    let rhs = 4.0 / PI * norms.p_f_star * at
        + 4.0 / PI * norms.p_phi1 * (1.0 - r2) * at
        + norms.p_abs_f_star * r
        + norms.g * (1.0 - r2) * (1.0 - r2) / 64.0;
    Ok((lhs, rhs))
}

fn gate_solution_in_ball(norms: &Norms) -> Result<f64> {
    let f = norms.solution()?;
    if f > 1.0 + GATE_SLACK {
        return Err(Error::hypothesis(
            "sup-f",
            format!("sup |f| = {f} exceeds 1; the map must send the closed disk into itself"),
        ));
    }
    Ok(f)
}

/// Both sides of the gradient bound for maps of the closed disk into itself.
/// `lhs = |f_z| + |f_z̄|`.
pub fn thm3_check(
    spec: &ProblemSpec,
    z: Complex64,
    norms: &Norms,
    rule: &DiskRule,
) -> Result<(f64, f64)> {
    let f_norm = gate_solution_in_ball(norms)?;
    let grad = solve_gradient(spec, z, rule)?;
    Ok((grad.op_norm, thm3_rhs(z.norm(), f_norm, norms.phi, norms.g)))
}

pub fn thm3_rhs(r: f64, f_norm: f64, phi_norm: f64, g_norm: f64) -> f64 {
    let r2 = r * r;
    (4.0 + PI * (1.0 + 2.0 * r + 3.0 * r2)) / (PI * (1.0 - r2)) * f_norm
        + (2.0 * r + 4.0 / PI) * phi_norm
        + 23.0 / 24.0 * g_norm
}

/// Classical comparison values for a harmonic map `h = P[f*]` of the disk
/// into the closed disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classics {
    /// `|h(z)|`
    pub value: f64,
    /// `(4/π) arctan |z|`
    pub heinz_rhs: f64,
    /// `|h(z) - (1-|z|²)/(1+|z|²) h(0)|`
    pub pavlovic_lhs: f64,
    pub pavlovic_rhs: f64,
    /// `|h_z| + |h_z̄|`
    pub colonna_lhs: f64,
    /// `(4/π)/(1 - |z|²)`
    pub colonna_rhs: f64,
    /// `(|z| + |h(0)|)/(1 + |z||h(0)|)`, a bound for analytic `h`.
    pub kra_rhs: f64,
}

fn gate_harmonic_in_ball(f_star: &BoundaryFourier) -> Result<()> {
    let sup = f_star.sup_norm();
    if sup > 1.0 + GATE_SLACK {
        return Err(Error::hypothesis(
            "harmonic-sup",
            format!("sup of the harmonic extension {sup} exceeds 1"),
        ));
    }
    Ok(())
}

pub fn harmonic_classics(f_star: &BoundaryFourier, z: Complex64) -> Result<Classics> {
    check_open_disk("harmonic_classics", z)?;
    gate_harmonic_in_ball(f_star)?;
    Ok(classics_unchecked(f_star, z))
}

fn classics_unchecked(f_star: &BoundaryFourier, z: Complex64) -> Classics {
    let r = z.norm();
    let r2 = r * r;
    let h = f_star.extension_unchecked(z);
    let h0 = f_star.coeff(0);
    let (hz, hzb) = f_star.extension_gradient(z).expect("z is inside the disk");
    let heinz_rhs = 4.0 / PI * r.atan();
    Classics {
        value: h.norm(),
        heinz_rhs,
        pavlovic_lhs: (h - h0 * ((1.0 - r2) / (1.0 + r2))).norm(),
        pavlovic_rhs: heinz_rhs,
        colonna_lhs: hz.norm() + hzb.norm(),
        colonna_rhs: 4.0 / PI / (1.0 - r2),
        kra_rhs: (r + h0.norm()) / (1.0 + r * h0.norm()),
    }
}

/// Result of the boundary Schwarz estimate at a boundary point `η`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchwarzEstimate {
    pub eta: Complex64,
    /// `(r_k, |f(η) - f(r_k η)|/(1 - r_k))`
    pub quotients: Vec<(f64, f64)>,
    pub liminf_est: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Radii `1 - 2^{-k}`, `k = 4..=16`.
pub fn default_schwarz_radii() -> Vec<f64> {
    (4..=16).map(|k| 1.0 - 0.5f64.powi(k)).collect()
}

/// Tolerance on `|f(r η)| → 1`, checked at the largest radius.
const BOUNDARY_MODULUS_TOL: f64 = 1e-3;

/// Estimates `liminf_{r→1} |f(η) - f(rη)|/(1 - r)` for data satisfying the
/// boundary Schwarz hypotheses and compares it with
/// `(1 - |P[f*](0)|)/(1 + |P[f*](0)|) - 2||P[φ₁]||∞`.
///
/// The liminf is estimated by the minimum over the last half of `r_list`.
pub fn boundary_schwarz_estimate(
    spec: &ProblemSpec,
    eta: Complex64,
    r_list: &[f64],
    rule: &DiskRule,
) -> Result<SchwarzEstimate> {
    if (eta.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!(
            "η must be unimodular, |η| = {}",
            eta.norm()
        )));
    }
    if r_list.is_empty() || r_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(
            "radii must be nonempty and increasing".into(),
        ));
    }
    if let Some(&r) = r_list.iter().find(|&&r| !(0.0..1.0).contains(&r)) {
        return Err(Error::Domain {
            what: "boundary_schwarz_estimate",
            modulus: r,
        });
    }
    if !spec.f_star.is_analytic() {
        return Err(Error::hypothesis(
            "analytic-boundary",
            "boundary data has negative Fourier modes",
        ));
    }
    let data_sup = spec.f_star.sup_norm();
    if data_sup > 1.0 + GATE_SLACK {
        return Err(Error::hypothesis(
            "boundary-bound",
            format!("sup of the boundary data {data_sup} exceeds 1"),
        ));
    }
    let p_phi1 = spec.phi1().sup_norm();
    if !(p_phi1 < 0.5) {
        return Err(Error::hypothesis(
            "phi1-norm",
            format!("||P[φ₁]|| = {p_phi1} is not below 1/2"),
        ));
    }
    let c0 = spec.f_star.coeff(0).norm();
    let centre_bound = (1.0 - 2.0 * p_phi1) / (1.0 + 2.0 * p_phi1);
    if !(c0 < centre_bound) {
        return Err(Error::hypothesis(
            "centre",
            format!("|P[f*](0)| = {c0} is not below {centre_bound}"),
        ));
    }
    if !spec.g.is_zero() && r_list[r_list.len() - 1] > DOMAIN_MARGIN {
        return Err(Error::Domain {
            what: "boundary_schwarz_estimate: radii with a nonzero source",
            modulus: r_list[r_list.len() - 1],
        });
    }

    let f_eta = spec.f_star.eval(eta.arg());
    let values: Vec<Complex64> = r_list
        .par_iter()
        .map(|&r| solve_eval(spec, eta * r, rule))
        .collect::<Result<_>>()?;
    let last = values[values.len() - 1].norm();
    if (last - 1.0).abs() > BOUNDARY_MODULUS_TOL {
        return Err(Error::hypothesis(
            "boundary-modulus",
            format!("|f(rη)| = {last} at the largest radius is not close to 1"),
        ));
    }
    let quotients: Vec<(f64, f64)> = r_list
        .iter()
        .zip(&values)
        .map(|(&r, &v)| (r, (f_eta - v).norm() / (1.0 - r)))
        .collect();
    let tail = &quotients[quotients.len() / 2..];
    let liminf_est = tail.iter().map(|q| q.1).fold(f64::INFINITY, f64::min);
    let rhs = (1.0 - c0) / (1.0 + c0) - 2.0 * p_phi1;
    Ok(SchwarzEstimate {
        eta,
        liminf_est,
        rhs,
        pass: liminf_est >= rhs - TOL_REPORT,
        quotients,
    })
}

impl SchwarzEstimate {
    /// One sample per radius: `lhs` is the theorem's lower bound and `rhs`
    /// the difference quotient.
    pub fn report(&self, tol_report: f64) -> BoundReport {
        let samples = self
            .quotients
            .iter()
            .map(|&(r, q)| Sample::inequality(self.eta * r, self.rhs, q))
            .collect();
        BoundReport::from_samples(BoundId::BoundarySchwarz, samples, tol_report)
    }
}

/// `((1/16π) ∫_D |G(z, w)| dA(w), (1 - |z|²)²/64)`.
pub fn green_mass_identity(z: Complex64, rule: &DiskRule) -> Result<(f64, f64)> {
    let numeric = disk_integrate_abs_green(z, rule)? / (16.0 * PI);
    let dz = 1.0 - z.norm_sqr();
    Ok((numeric, dz * dz / 64.0))
}

/// `(1/8π) ∫_D (|G_z(z, w)| + |G_z̄(z, w)|) dA(w)`, which never exceeds 23/24.
pub fn grad_green_mass_bound(z: Complex64, rule: &DiskRule) -> Result<f64> {
    Ok(disk_integrate_abs_green_gradient(z, rule)? / (8.0 * PI))
}

pub const GRAD_GREEN_MASS_LIMIT: f64 = 23.0 / 24.0;

/// Sweeps `grid` and reports the selected inequality. Hypotheses are
/// checked once up front; grid points are evaluated in parallel and the
/// report is assembled in scan order.
pub fn grid_verify(
    bound_id: BoundId,
    spec: &ProblemSpec,
    grid: &PolarGrid,
    rule: &DiskRule,
) -> Result<BoundReport> {
    grid_verify_with(bound_id, spec, grid, rule, TOL_REPORT)
}

/// Radius of the grid used for `||f||∞` in the gradient bound.
const SOLUTION_SUP_RADIUS: f64 = 0.99;

pub fn grid_verify_with(
    bound_id: BoundId,
    spec: &ProblemSpec,
    grid: &PolarGrid,
    rule: &DiskRule,
    tol_report: f64,
) -> Result<BoundReport> {
    let points = grid.points();
    let sweep = |f: &(dyn Fn(Complex64) -> Result<Sample> + Sync)| -> Result<Vec<Sample>> {
        points.par_iter().map(|&z| f(z)).collect()
    };
    let samples = match bound_id {
        BoundId::Thm1 => {
            let norms = Norms::of_data(spec);
            sweep(&|z| thm1_check(spec, z, &norms, rule).map(|(l, r)| Sample::inequality(z, l, r)))?
        }
        BoundId::Thm3 => {
            let sup_grid =
                PolarGrid::new(grid.radial.max(2), grid.angular.max(1), SOLUTION_SUP_RADIUS);
            let norms = Norms::compute(spec, &sup_grid, rule)?;
            gate_solution_in_ball(&norms)?;
            sweep(&|z| thm3_check(spec, z, &norms, rule).map(|(l, r)| Sample::inequality(z, l, r)))?
        }
        BoundId::Heinz | BoundId::Pavlovic | BoundId::Colonna => {
            gate_harmonic_in_ball(&spec.f_star)?;
            if bound_id == BoundId::Heinz && spec.f_star.coeff(0).norm() > 1e-12 {
                return Err(Error::hypothesis(
                    "heinz-origin",
                    "the harmonic map must vanish at the origin",
                ));
            }
            sweep(&|z| {
                check_open_disk("harmonic_classics", z)?;
                let c = classics_unchecked(&spec.f_star, z);
                Ok(match bound_id {
                    BoundId::Heinz => Sample::inequality(z, c.value, c.heinz_rhs),
                    BoundId::Pavlovic => Sample::inequality(z, c.pavlovic_lhs, c.pavlovic_rhs),
                    _ => Sample::inequality(z, c.colonna_lhs, c.colonna_rhs),
                })
            })?
        }
        BoundId::GreenMass => {
            sweep(&|z| green_mass_identity(z, rule).map(|(n, c)| Sample::identity(z, n, c)))?
        }
        BoundId::GradGreenMass => sweep(&|z| {
            grad_green_mass_bound(z, rule).map(|v| Sample::inequality(z, v, GRAD_GREEN_MASS_LIMIT))
        })?,
        BoundId::BoundarySchwarz => {
            return Err(Error::InvalidInput(
                "the boundary Schwarz estimate runs along a ray, not over a grid".into(),
            ))
        }
    };
    Ok(BoundReport::from_samples(bound_id, samples, tol_report))
}
