//! Quadrature on the unit circle and the unit disk.
//!
//! Circle integrals use the periodic trapezoid rule. Disk integrals use a
//! polar product rule: composite Gauss–Legendre panels in the radius, graded
//! dyadically toward `ρ = 0`, times the trapezoid rule in angle. Green-kernel
//! integrals are evaluated after the Möbius substitution centred at the
//! evaluation point, so the only non-smooth factor (`ρ² log ρ`) sits at the
//! origin of the integration variable where the grading resolves it.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_open_disk, Error, Result};
use crate::kernels::{green_dz_pullback_parts, radial_profile};

/// Equispaced nodes `θ_k = 2πk/M` with weight `2π/M`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleRule {
    nodes: Vec<f64>,
    units: Vec<Complex64>,
}

impl CircleRule {
    /// Panics if `node_count == 0`.
    pub fn new(node_count: usize) -> Self {
        assert!(node_count > 0, "circle rule needs at least one node");
        let step = 2.0 * PI / node_count as f64;
        let nodes: Vec<f64> = (0..node_count).map(|k| k as f64 * step).collect();
        let units = nodes
            .iter()
            .map(|&t| Complex64::from_polar(1.0, t))
            .collect();
        CircleRule { nodes, units }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn weight(&self) -> f64 {
        2.0 * PI / self.nodes.len() as f64
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `e^{iθ_k}` for every node.
    pub fn units(&self) -> &[Complex64] {
        &self.units
    }
}

/// `Σ_k (2π/M) f(θ_k)`. Callers apply any `1/2π` normalisation.
pub fn circle_integrate<F>(mut f: F, rule: &CircleRule) -> Result<Complex64>
where
    F: FnMut(f64) -> Complex64,
{
    let mut sum = Complex64::new(0.0, 0.0);
    for (k, &t) in rule.nodes.iter().enumerate() {
        let v = f(t);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite { node: k });
        }
        sum += v;
    }
    Ok(sum * rule.weight())
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order > 0);
    let n = order;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, t);
            let dt = p / d;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, t);
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// Construction parameters of a [`DiskRule`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiskRuleParams {
    pub angular_nodes: usize,
    /// Uniform panels covering `[1/2, 1]`.
    pub radial_panels: usize,
    /// Gauss–Legendre points per panel.
    pub panel_order: usize,
    /// Dyadic panels `[2^{-k-1}, 2^{-k}]` for `k = 1..L`, plus `[0, 2^{-L-1}]`.
    pub grading_levels: usize,
}

impl Default for DiskRuleParams {
    fn default() -> Self {
        DiskRuleParams {
            angular_nodes: 256,
            radial_panels: 4,
            panel_order: 16,
            grading_levels: 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct RadialNode {
    rho: f64,
    /// Gauss weight times `ρ` (the polar area factor).
    weight: f64,
    log_rho: f64,
}

/// Polar product rule on the unit disk. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskRule {
    params: DiskRuleParams,
    radial: Vec<RadialNode>,
    angular: CircleRule,
}

impl Default for DiskRule {
    fn default() -> Self {
        DiskRule::new(DiskRuleParams::default()).expect("default parameters are valid")
    }
}

impl DiskRule {
    pub fn new(params: DiskRuleParams) -> Result<Self> {
        if params.angular_nodes == 0 || params.radial_panels == 0 || params.panel_order == 0 {
            return Err(Error::InvalidInput(format!(
                "disk rule needs positive node counts, got {params:?}"
            )));
        }
        if params.grading_levels > 48 {
            return Err(Error::InvalidInput(
                "grading levels above 48 underflow".into(),
            ));
        }
        let (gx, gw) = gauss_legendre(params.panel_order);
        let mut breaks = vec![0.0];
        for k in (1..=params.grading_levels).rev() {
            breaks.push(0.5f64.powi(k as i32 + 1));
        }
        for p in 0..=params.radial_panels {
            breaks.push(0.5 + 0.5 * p as f64 / params.radial_panels as f64);
        }
        let mut radial = Vec::with_capacity((breaks.len() - 1) * params.panel_order);
        for pair in breaks.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (x, w) in gx.iter().zip(&gw) {
                let rho = mid + half * x;
                radial.push(RadialNode {
                    rho,
                    weight: half * w * rho,
                    log_rho: rho.ln(),
                });
            }
        }
        Ok(DiskRule {
            params,
            radial,
            angular: CircleRule::new(params.angular_nodes),
        })
    }

    pub fn params(&self) -> DiskRuleParams {
        self.params
    }

    pub fn angular(&self) -> &CircleRule {
        &self.angular
    }

    /// Radial abscissae in increasing order.
    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        self.radial.iter().map(|n| n.rho)
    }

    pub fn node_count(&self) -> usize {
        self.radial.len() * self.angular.node_count()
    }

    /// Sum of all area weights; `π` up to round-off.
    pub fn total_weight(&self) -> f64 {
        self.radial.iter().map(|n| n.weight).sum::<f64>() * 2.0 * PI
    }
}

/// `∫_D f dA` by the polar product rule.
pub fn disk_integrate<F>(mut f: F, rule: &DiskRule) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Complex64,
{
    let mut total = Complex64::new(0.0, 0.0);
    let units = rule.angular.units();
    for (j, node) in rule.radial.iter().enumerate() {
        let mut ring = Complex64::new(0.0, 0.0);
        for (k, u) in units.iter().enumerate() {
            let v = f(u * node.rho);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite {
                    node: j * units.len() + k,
                });
            }
            ring += v;
        }
        total += ring * node.weight;
    }
    Ok(total * rule.angular.weight())
}

/// One node of the Möbius-pulled-back rule centred at `z`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PullbackNode {
    pub zeta: Complex64,
    /// `(z - ζ)/(1 - z̄ζ)`.
    pub w: Complex64,
    pub r2: f64,
    pub log_rho: f64,
    /// `|1 - z̄ζ|²`.
    pub q: f64,
}

/// Sums `weight · f(node)` over the rule in the variable `ζ`. The caller's `f`
/// is responsible for including the area Jacobian of `ζ ↦ w` where needed.
pub(crate) fn pullback_sum<T, F>(z: Complex64, rule: &DiskRule, mut f: F) -> Result<T>
where
    T: Copy + std::ops::AddAssign + std::ops::Mul<f64, Output = T> + Default + IsFinite,
    F: FnMut(&PullbackNode) -> T,
{
    let one = Complex64::new(1.0, 0.0);
    let zb = z.conj();
    let units = rule.angular.units();
    let mut total = T::default();
    for (j, node) in rule.radial.iter().enumerate() {
        let r2 = node.rho * node.rho;
        let mut ring = T::default();
        for (k, u) in units.iter().enumerate() {
            let zeta = u * node.rho;
            let a = one - zb * zeta;
            let pb = PullbackNode {
                zeta,
                w: (z - zeta) / a,
                r2,
                log_rho: node.log_rho,
                q: a.norm_sqr(),
            };
            let v = f(&pb);
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    node: j * units.len() + k,
                });
            }
            ring += v;
        }
        total += ring * node.weight;
    }
    Ok(total * rule.angular.weight())
}

pub(crate) trait IsFinite {
    fn is_finite(&self) -> bool;
}

impl IsFinite for f64 {
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl IsFinite for Complex64 {
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Pair(pub Complex64, pub Complex64);

impl std::ops::AddAssign for Pair {
    fn add_assign(&mut self, rhs: Self) {
        self.0 += rhs.0;
        self.1 += rhs.1;
    }
}

impl std::ops::Mul<f64> for Pair {
    type Output = Pair;
    fn mul(self, rhs: f64) -> Pair {
        Pair(self.0 * rhs, self.1 * rhs)
    }
}

impl IsFinite for Pair {
    fn is_finite(&self) -> bool {
        IsFinite::is_finite(&self.0) && IsFinite::is_finite(&self.1)
    }
}

/// `∫_D g(w) G(z, w) dA(w)`, integrated in the Möbius variable centred at `z`.
pub fn disk_integrate_green<G>(z: Complex64, g: G, rule: &DiskRule) -> Result<Complex64>
where
    G: Fn(Complex64) -> Complex64,
{
    check_open_disk("disk_integrate_green", z)?;
    let dz = 1.0 - z.norm_sqr();
    let d4 = dz * dz * dz * dz;
    // G(z,w(ζ)) · Jacobian = -(1-|z|²)^4 (2ρ² log ρ + 1 - ρ²) / |1 - z̄ζ|^6
    pullback_sum(z, rule, |n| {
        let q3 = n.q * n.q * n.q;
        g(n.w) * (-d4 * radial_profile(n.r2, n.log_rho) / q3)
    })
}

/// `∫_D |G(z, w)| dA(w)` with the same pullback rule.
pub fn disk_integrate_abs_green(z: Complex64, rule: &DiskRule) -> Result<f64> {
    check_open_disk("disk_integrate_abs_green", z)?;
    let dz = 1.0 - z.norm_sqr();
    let d4 = dz * dz * dz * dz;
    pullback_sum(z, rule, |n| {
        d4 * radial_profile(n.r2, n.log_rho).abs() / (n.q * n.q * n.q)
    })
}

/// `(∫_D g G_z dA, ∫_D g G_z̄ dA)` at `z`.
pub fn disk_integrate_green_gradient<G>(
    z: Complex64,
    g: G,
    rule: &DiskRule,
) -> Result<(Complex64, Complex64)>
where
    G: Fn(Complex64) -> Complex64,
{
    check_open_disk("disk_integrate_green_gradient", z)?;
    let dz = 1.0 - z.norm_sqr();
    let d2 = dz * dz;
    let pair = pullback_sum(z, rule, |n| {
        let gz = green_dz_pullback_parts(z, n.zeta, n.r2, n.log_rho);
        let jac = d2 / (n.q * n.q);
        let gw = g(n.w) * jac;
        Pair(gw * gz, gw * gz.conj())
    })?;
    Ok((pair.0, pair.1))
}

/// `∫_D (|G_z| + |G_z̄|) dA(w)` at `z`.
pub fn disk_integrate_abs_green_gradient(z: Complex64, rule: &DiskRule) -> Result<f64> {
    check_open_disk("disk_integrate_abs_green_gradient", z)?;
    let dz = 1.0 - z.norm_sqr();
    let d2 = dz * dz;
    pullback_sum(z, rule, |n| {
        let gz = green_dz_pullback_parts(z, n.zeta, n.r2, n.log_rho);
        2.0 * gz.norm() * d2 / (n.q * n.q)
    })
}

/// A rule that can be refined by doubling its node counts.
pub trait Refine: Sized {
    fn refined(&self) -> Result<Self>;
}

impl Refine for CircleRule {
    fn refined(&self) -> Result<Self> {
        Ok(CircleRule::new(2 * self.node_count()))
    }
}

impl Refine for DiskRule {
    /// Doubles the angular nodes and the outer panels, adds one grading level.
    fn refined(&self) -> Result<Self> {
        let p = self.params;
        DiskRule::new(DiskRuleParams {
            angular_nodes: 2 * p.angular_nodes,
            radial_panels: 2 * p.radial_panels,
            panel_order: p.panel_order,
            grading_levels: p.grading_levels + 1,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Refined<R> {
    pub value: Complex64,
    pub est_error: f64,
    pub doublings: usize,
    pub rule: R,
}

/// Evaluates `f` on successively doubled rules until two consecutive values
/// differ by less than `tol`.
pub fn refine_until<R, F>(
    initial: R,
    mut f: F,
    tol: f64,
    max_doublings: usize,
) -> Result<Refined<R>>
where
    R: Refine,
    F: FnMut(&R) -> Result<Complex64>,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut rule = initial;
    let mut value = f(&rule)?;
    let mut est_error = f64::INFINITY;
    for doubling in 1..=max_doublings {
        let next_rule = rule.refined()?;
        let next = f(&next_rule)?;
        est_error = (next - value).norm();
        rule = next_rule;
        value = next;
        if est_error < tol {
            return Ok(Refined {
                value,
                est_error,
                doublings: doubling,
                rule,
            });
        }
    }
    Err(Error::NonConvergence {
        best: value,
        est_error,
    })
}
