//! Dirichlet data, the representation formula and its derivatives.
//!
//! For boundary data `f*`, `φ` on the circle and a source `g`, the solution is
//!
//! ```text
//! f(z) = P[f*](z) + B[f*](z) - (1 - |z|²) P[φ₁](z) - (1/16π) ∫_D g(w) G(z, w) dA(w)
//! ```
//!
//! with `φ₁(e^{it}) = φ(e^{it}) e^{-it}` and `B` the boundary correction
//! `(1/2π) ∫ z̄ e^{it} f*(e^{it}) (1 - |z|²)/(1 - z̄ e^{it})² dt`.
//!
//! Boundary data are finite Fourier series, so `P` and `B` have closed
//! forms: expanding `1/(1 - x)² = Σ (m+1) x^m` with `x = z̄ e^{it}` gives
//! `B[f*](z) = (1 - |z|²) Σ_{k≥1} k c_{-k} z̄^k`. Only the volume term needs
//! quadrature.
//!
//! The representation is evaluated for any triple `(f*, φ, g)`. The boundary
//! condition `f_z̄ = φ` is only meaningful for compatible data and is not
//! checked.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_open_disk, Error, Result};
use crate::quadrature::{disk_integrate_green, disk_integrate_green_gradient, DiskRule};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Solutions with a nonzero source are not evaluated beyond this radius.
pub const DOMAIN_MARGIN: f64 = 0.999;

/// Finite Fourier series `Σ_{n=-N}^{N} c_n e^{int}` on the unit circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFourier {
    degree: usize,
    /// `coeffs[n + degree] = c_n`.
    coeffs: Vec<Complex64>,
}

impl Default for BoundaryFourier {
    fn default() -> Self {
        BoundaryFourier::zero()
    }
}

impl BoundaryFourier {
    pub fn zero() -> Self {
        BoundaryFourier {
            degree: 0,
            coeffs: vec![ZERO],
        }
    }

    pub fn constant(c: Complex64) -> Self {
        BoundaryFourier {
            degree: 0,
            coeffs: vec![c],
        }
    }

    /// `c e^{int}`.
    pub fn monomial(n: i64, c: Complex64) -> Self {
        Self::from_terms([(n, c)])
    }

    /// Builds a series from `(n, c_n)` pairs; repeated indices accumulate.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let terms: Vec<_> = terms.into_iter().collect();
        let degree = terms
            .iter()
            .map(|(n, _)| n.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        let mut coeffs = vec![ZERO; 2 * degree + 1];
        for (n, c) in terms {
            coeffs[(n + degree as i64) as usize] += c;
        }
        BoundaryFourier { degree, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.degree {
            ZERO
        } else {
            self.coeffs[(n + self.degree as i64) as usize]
        }
    }

    /// Nonzero `(n, c_n)` pairs in increasing `n`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let d = self.degree as i64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(move |(i, c)| (i as i64 - d, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    /// True when no negative index carries a nonzero coefficient, i.e. the
    /// harmonic extension is analytic.
    pub fn is_analytic(&self) -> bool {
        self.terms().all(|(n, _)| n >= 0)
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.terms()
            .map(|(n, c)| c * Complex64::from_polar(1.0, n as f64 * t))
            .sum()
    }

    /// Multiplication by `e^{ikt}`.
    pub fn shifted(&self, k: i64) -> Self {
        Self::from_terms(self.terms().map(|(n, c)| (n + k, c)))
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self::from_terms(self.terms().map(|(n, c)| (n, c * s)))
    }

    pub fn combine(a: Complex64, x: &Self, b: Complex64, y: &Self) -> Self {
        Self::from_terms(
            x.terms()
                .map(|(n, c)| (n, a * c))
                .chain(y.terms().map(|(n, c)| (n, b * c))),
        )
    }

    /// Number of samples used by [`Self::sup_norm`].
    pub fn sup_samples(&self) -> usize {
        16 * self.degree + 256
    }

    /// `max |ψ|` over a dense equispaced sample of the circle.
    ///
    /// By the maximum principle this is also the sup of `|P[ψ]|` and
    /// `P[|ψ|]` over the disk.
    pub fn sup_norm(&self) -> f64 {
        let m = self.sup_samples();
        (0..m)
            .map(|k| self.eval(2.0 * PI * k as f64 / m as f64).norm())
            .fold(0.0, f64::max)
    }

    /// Poisson extension `Σ_{n≥0} c_n z^n + Σ_{n<0} c_n z̄^{|n|}`.
    pub fn harmonic_extension(&self, z: Complex64) -> Result<Complex64> {
        check_open_disk("harmonic_extension", z)?;
        Ok(self.extension_unchecked(z))
    }

    pub(crate) fn extension_unchecked(&self, z: Complex64) -> Complex64 {
        let mut sum = self.coeff(0);
        let (mut zp, mut zbp) = (ONE, ONE);
        let zb = z.conj();
        for n in 1..=self.degree as i64 {
            zp *= z;
            zbp *= zb;
            sum += self.coeff(n) * zp + self.coeff(-n) * zbp;
        }
        sum
    }

    /// Wirtinger derivatives `(∂_z, ∂_z̄)` of the Poisson extension.
    pub fn extension_gradient(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        check_open_disk("extension_gradient", z)?;
        let (mut dz, mut dzb) = (ZERO, ZERO);
        let (mut zp, mut zbp) = (ONE, ONE);
        let zb = z.conj();
        for n in 1..=self.degree as i64 {
            let k = n as f64;
            dz += self.coeff(n) * zp * k;
            dzb += self.coeff(-n) * zbp * k;
            zp *= z;
            zbp *= zb;
        }
        Ok((dz, dzb))
    }
}

/// Poisson extension of `ψ` at `z`.
pub fn harmonic_extension(psi: &BoundaryFourier, z: Complex64) -> Result<Complex64> {
    psi.harmonic_extension(z)
}

/// `(S, S')` with `S(z̄) = Σ_{k≥1} k c_{-k} z̄^k` and `S'` its derivative in `z̄`.
fn correction_series(f_star: &BoundaryFourier, zb: Complex64) -> (Complex64, Complex64) {
    let (mut s, mut ds) = (ZERO, ZERO);
    let mut p = ONE;
    for k in 1..=f_star.degree() as i64 {
        let c = f_star.coeff(-k);
        let kf = k as f64;
        ds += c * p * (kf * kf);
        p *= zb;
        s += c * p * kf;
    }
    (s, ds)
}

/// `(1 - |z|²) Σ_{k≥1} k c_{-k} z̄^k`.
pub fn boundary_correction_term(f_star: &BoundaryFourier, z: Complex64) -> Result<Complex64> {
    check_open_disk("boundary_correction_term", z)?;
    let (s, _) = correction_series(f_star, z.conj());
    Ok(s * (1.0 - z.norm_sqr()))
}

/// Polynomial `Σ a_{jk} w^j w̄^k` in `w` and `w̄`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BidegreePoly {
    degree: usize,
    /// Row-major `(degree+1) × (degree+1)`, entry `j*(degree+1)+k`.
    coeffs: Vec<Complex64>,
}

impl Default for BidegreePoly {
    fn default() -> Self {
        BidegreePoly::zero()
    }
}

impl BidegreePoly {
    pub fn zero() -> Self {
        BidegreePoly {
            degree: 0,
            coeffs: vec![ZERO],
        }
    }

    pub fn constant(m: Complex64) -> Self {
        BidegreePoly {
            degree: 0,
            coeffs: vec![m],
        }
    }

    /// Builds from `(j, k, a_jk)` triples; repeated entries accumulate.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let terms: Vec<_> = terms.into_iter().collect();
        let degree = terms
            .iter()
            .map(|(j, k, _)| (*j).max(*k))
            .max()
            .unwrap_or(0);
        let mut coeffs = vec![ZERO; (degree + 1) * (degree + 1)];
        for (j, k, a) in terms {
            coeffs[j * (degree + 1) + k] += a;
        }
        BidegreePoly { degree, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, j: usize, k: usize) -> Complex64 {
        if j > self.degree || k > self.degree {
            ZERO
        } else {
            self.coeffs[j * (self.degree + 1) + k]
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        let d = self.degree + 1;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != ZERO)
            .map(move |(i, a)| (i / d, i % d, *a))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|a| *a == ZERO)
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        if self.degree == 0 {
            return self.coeffs[0];
        }
        let d = self.degree + 1;
        let wb = w.conj();
        let mut sum = ZERO;
        let mut wj = ONE;
        for j in 0..d {
            // Horner in w̄ for fixed j.
            let mut row = ZERO;
            for k in (0..d).rev() {
                row = row * wb + self.coeffs[j * d + k];
            }
            sum += row * wj;
            wj *= w;
        }
        sum
    }

    /// `Δ = 4 ∂_w ∂_w̄`, exact by index shift.
    pub fn laplacian(&self) -> Self {
        Self::from_terms(
            self.terms()
                .filter(|(j, k, _)| *j > 0 && *k > 0)
                .map(|(j, k, a)| (j - 1, k - 1, a * (4.0 * (j * k) as f64))),
        )
    }

    pub fn combine(a: Complex64, x: &Self, b: Complex64, y: &Self) -> Self {
        Self::from_terms(
            x.terms()
                .map(|(j, k, c)| (j, k, a * c))
                .chain(y.terms().map(|(j, k, c)| (j, k, b * c))),
        )
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self::from_terms(self.terms().map(|(j, k, c)| (j, k, c * s)))
    }
}

/// One Dirichlet problem: boundary values `f*`, boundary `z̄`-derivative `φ`, source `g`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub f_star: BoundaryFourier,
    pub phi: BoundaryFourier,
    pub g: BidegreePoly,
}

impl ProblemSpec {
    pub fn new(f_star: BoundaryFourier, phi: BoundaryFourier, g: BidegreePoly) -> Self {
        ProblemSpec { f_star, phi, g }
    }

    /// `φ₁(e^{it}) = φ(e^{it}) e^{-it}`.
    pub fn phi1(&self) -> BoundaryFourier {
        self.phi.shifted(-1)
    }

    /// `a·x + b·y`, componentwise.
    pub fn combine(a: Complex64, x: &Self, b: Complex64, y: &Self) -> Self {
        ProblemSpec {
            f_star: BoundaryFourier::combine(a, &x.f_star, b, &y.f_star),
            phi: BoundaryFourier::combine(a, &x.phi, b, &y.phi),
            g: BidegreePoly::combine(a, &x.g, b, &y.g),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let s = Complex64::new(s, 0.0);
        ProblemSpec {
            f_star: self.f_star.scaled(s),
            phi: self.phi.scaled(s),
            g: self.g.scaled(s),
        }
    }
}

/// Wirtinger derivatives and the derived matrix quantities of `D_f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradResult {
    pub f_z: Complex64,
    pub f_zbar: Complex64,
    /// `|f_z| + |f_z̄|`
    pub op_norm: f64,
    /// `||f_z| - |f_z̄||`
    pub lambda: f64,
    /// `|f_z|² - |f_z̄|²`
    pub jacobian: f64,
}

impl GradResult {
    pub fn new(f_z: Complex64, f_zbar: Complex64) -> Self {
        let (a, b) = (f_z.norm(), f_zbar.norm());
        GradResult {
            f_z,
            f_zbar,
            op_norm: a + b,
            lambda: (a - b).abs(),
            jacobian: f_z.norm_sqr() - f_zbar.norm_sqr(),
        }
    }
}

fn check_margin(spec: &ProblemSpec, z: Complex64, what: &'static str) -> Result<()> {
    check_open_disk(what, z)?;
    if !spec.g.is_zero() && z.norm() > DOMAIN_MARGIN {
        return Err(Error::Domain {
            what,
            modulus: z.norm(),
        });
    }
    Ok(())
}

/// `f(z)` from the representation formula.
///
/// With a nonzero source, points beyond [`DOMAIN_MARGIN`] are refused.
pub fn solve_eval(spec: &ProblemSpec, z: Complex64, rule: &DiskRule) -> Result<Complex64> {
    check_margin(spec, z, "solve_eval")?;
    let dz = 1.0 - z.norm_sqr();
    let mut f = spec.f_star.extension_unchecked(z) + boundary_correction_term(&spec.f_star, z)?
        - spec.phi1().extension_unchecked(z) * dz;
    if !spec.g.is_zero() {
        f -= disk_integrate_green(z, |w| spec.g.eval(w), rule)? / (16.0 * PI);
    }
    Ok(f)
}

/// `(f_z, f_z̄)` from the differentiated representation.
pub fn solve_gradient(spec: &ProblemSpec, z: Complex64, rule: &DiskRule) -> Result<GradResult> {
    check_margin(spec, z, "solve_gradient")?;
    let dz = 1.0 - z.norm_sqr();
    let zb = z.conj();
    let (pf_z, pf_zb) = spec.f_star.extension_gradient(z)?;
    let phi1 = spec.phi1();
    let p1 = phi1.extension_unchecked(z);
    let (p1_z, p1_zb) = phi1.extension_gradient(z)?;
    // B = (1 - z z̄) S(z̄)
    let (s, ds) = correction_series(&spec.f_star, zb);
    let b_z = -zb * s;
    let b_zb = -z * s + ds * dz;

    let mut f_z = pf_z + b_z + zb * p1 - p1_z * dz;
    let mut f_zbar = pf_zb + b_zb + z * p1 - p1_zb * dz;
    if !spec.g.is_zero() {
        let (vz, vzb) = disk_integrate_green_gradient(z, |w| spec.g.eval(w), rule)?;
        f_z -= vz / (16.0 * PI);
        f_zbar -= vzb / (16.0 * PI);
    }
    Ok(GradResult::new(f_z, f_zbar))
}

/// Central-difference Wirtinger derivatives of [`solve_eval`].
pub fn fd_gradient(
    spec: &ProblemSpec,
    z: Complex64,
    h: f64,
    rule: &DiskRule,
) -> Result<GradResult> {
    if !(h > 0.0) || z.norm() + h >= 1.0 {
        return Err(Error::Domain {
            what: "fd_gradient: step too large",
            modulus: z.norm() + h,
        });
    }
    let f = |p: Complex64| solve_eval(spec, p, rule);
    let fx = (f(z + Complex64::new(h, 0.0))? - f(z - Complex64::new(h, 0.0))?) / (2.0 * h);
    let fy = (f(z + Complex64::new(0.0, h))? - f(z - Complex64::new(0.0, h))?) / (2.0 * h);
    let i = Complex64::new(0.0, 1.0);
    Ok(GradResult::new((fx - i * fy) * 0.5, (fx + i * fy) * 0.5))
}

/// `ΔΔf(z) - g(z)` using two nested five-point Laplacians of [`solve_eval`].
pub fn biharmonic_residual(
    spec: &ProblemSpec,
    z: Complex64,
    h: f64,
    rule: &DiskRule,
) -> Result<Complex64> {
    if !(h > 0.0) || z.norm() + 2.0 * h >= 1.0 {
        return Err(Error::Domain {
            what: "biharmonic_residual: step too large",
            modulus: z.norm() + 2.0 * h,
        });
    }
    let offsets = [
        Complex64::new(h, 0.0),
        Complex64::new(-h, 0.0),
        Complex64::new(0.0, h),
        Complex64::new(0.0, -h),
    ];
    let lap = |p: Complex64| -> Result<Complex64> {
        let mut s = solve_eval(spec, p, rule)? * -4.0;
        for o in offsets {
            s += solve_eval(spec, p + o, rule)?;
        }
        Ok(s / (h * h))
    };
    let mut bilap = lap(z)? * -4.0;
    for o in offsets {
        bilap += lap(z + o)?;
    }
    Ok(bilap / (h * h) - spec.g.eval(z))
}

/// Polar sample grid `{r_j e^{iθ_k}}`. With more than one radius the radii
/// run from `0` to `r_max` inclusive and the centre appears once.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    pub radial: usize,
    pub angular: usize,
    pub r_max: f64,
}

impl Default for PolarGrid {
    fn default() -> Self {
        PolarGrid {
            radial: 20,
            angular: 48,
            r_max: 0.95,
        }
    }
}

impl PolarGrid {
    pub fn new(radial: usize, angular: usize, r_max: f64) -> Self {
        PolarGrid {
            radial,
            angular,
            r_max,
        }
    }

    /// Points in scan order: radius outermost, angle innermost.
    pub fn points(&self) -> Vec<Complex64> {
        let mut pts = Vec::new();
        if self.radial == 0 || self.angular == 0 {
            return pts;
        }
        let radii: Vec<f64> = if self.radial == 1 {
            vec![self.r_max]
        } else {
            (0..self.radial)
                .map(|j| self.r_max * j as f64 / (self.radial - 1) as f64)
                .collect()
        };
        for r in radii {
            if r == 0.0 {
                pts.push(ZERO);
                continue;
            }
            for k in 0..self.angular {
                pts.push(Complex64::from_polar(
                    r,
                    2.0 * PI * k as f64 / self.angular as f64,
                ));
            }
        }
        pts
    }
}

/// `max |fn|` over a polar grid; a lower bound for the sup over the disk.
pub fn grid_sup_norm<F>(f: F, radial_count: usize, angular_count: usize, r_max: f64) -> f64
where
    F: Fn(Complex64) -> Complex64,
{
    PolarGrid::new(radial_count, angular_count, r_max)
        .points()
        .into_iter()
        .map(|z| f(z).norm())
        .fold(0.0, f64::max)
}

/// Fallible, parallel version of [`grid_sup_norm`].
pub fn try_grid_sup_norm<F>(f: F, grid: &PolarGrid) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let values: Vec<f64> = grid
        .points()
        .par_iter()
        .map(|&z| f(z).map(|v| v.norm()))
        .collect::<Result<_>>()?;
    Ok(values.into_iter().fold(0.0, f64::max))
}

/// Estimate of `sup |f|` over the closed disk: the grid sup of the solution
/// combined with the boundary sup of `f*`.
pub fn solution_sup_norm(spec: &ProblemSpec, grid: &PolarGrid, rule: &DiskRule) -> Result<f64> {
    let interior = try_grid_sup_norm(|z| solve_eval(spec, z, rule), grid)?;
    Ok(interior.max(spec.f_star.sup_norm()))
}
