//! Closed-form kernels on the unit disk.
//!
//! `G(z, w) = |z-w|² log|(1 - z w̄)/(z - w)|² - (1 - |z|²)(1 - |w|²)` is the
//! biharmonic Green function, `P(z, e^{iθ}) = (1 - |z|²)/|1 - z e^{-iθ}|²` the
//! Poisson kernel. Both are real valued, so every `z̄`-derivative here is the
//! conjugate of the corresponding `z`-derivative.
//!
//! The `*_pullback` variants express the Green kernel in the Möbius variable
//! `ζ = (z - w)/(1 - z̄ w)`, which moves the logarithmic point to `ζ = 0` and
//! avoids the cancellation in `|z - w|² log|z - w|` near the diagonal.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_open_disk, Error, Result};
use crate::quadrature::{circle_integrate, CircleRule};

/// Wirtinger derivatives `(∂/∂z, ∂/∂z̄)` of a kernel in its first argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelGradient {
    pub d_z: Complex64,
    pub d_zbar: Complex64,
}

/// Value and Wirtinger derivatives of the Poisson kernel at one boundary angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonEval {
    pub value: f64,
    pub d_z: Complex64,
    pub d_zbar: Complex64,
}

/// `log|(1 - z w̄)/(z - w)|²`, the pseudo-hyperbolic logarithm shared by `G` and its gradient.
#[inline]
fn log_ratio_sq(z: Complex64, w: Complex64) -> f64 {
    let num = (Complex64::new(1.0, 0.0) - z * w.conj()).norm_sqr();
    let den = (z - w).norm_sqr();
    (num / den).ln()
}

/// Biharmonic Green function of the unit disk. Always `<= 0`.
///
/// On the diagonal the removable singularity is filled in with `-(1 - |z|²)²`.
pub fn green(z: Complex64, w: Complex64) -> Result<f64> {
    check_open_disk("green: z", z)?;
    check_open_disk("green: w", w)?;
    let dz = 1.0 - z.norm_sqr();
    if z == w {
        return Ok(-dz * dz);
    }
    let d2 = (z - w).norm_sqr();
    Ok(d2 * log_ratio_sq(z, w) - dz * (1.0 - w.norm_sqr()))
}

/// `(G_z, G_z̄)` at `z != w`.
pub fn green_gradient(z: Complex64, w: Complex64) -> Result<KernelGradient> {
    check_open_disk("green_gradient: z", z)?;
    check_open_disk("green_gradient: w", w)?;
    if z == w {
        return Err(Error::Singularity("green_gradient"));
    }
    let one = Complex64::new(1.0, 0.0);
    let diff_bar = (z - w).conj();
    let w2 = w.norm_sqr();
    let d_z = diff_bar * log_ratio_sq(z, w)
        + diff_bar * (w2 - 1.0) / (one - z * w.conj())
        + z.conj() * (1.0 - w2);
    Ok(KernelGradient {
        d_z,
        d_zbar: d_z.conj(),
    })
}

/// Preimage `w = (z - ζ)/(1 - z̄ ζ)` of the Möbius variable.
#[inline]
pub fn mobius(z: Complex64, zeta: Complex64) -> Complex64 {
    (z - zeta) / (Complex64::new(1.0, 0.0) - z.conj() * zeta)
}

/// `|(1 - z̄ζ)|^{-4} (1 - |z|²)²`, the area Jacobian of `ζ ↦ w`.
#[inline]
pub fn mobius_jacobian(z: Complex64, zeta: Complex64) -> f64 {
    let dz = 1.0 - z.norm_sqr();
    let q = (Complex64::new(1.0, 0.0) - z.conj() * zeta).norm_sqr();
    dz * dz / (q * q)
}

/// `2ρ² log ρ + 1 - ρ²` given `ρ²` and `log ρ`; nonnegative on `[0, 1]`.
#[inline]
pub(crate) fn radial_profile(rho_sq: f64, log_rho: f64) -> f64 {
    if rho_sq == 0.0 {
        1.0
    } else {
        2.0 * rho_sq * log_rho + 1.0 - rho_sq
    }
}

/// `G(z, w(ζ))` written in the Möbius variable.
pub fn green_pullback(z: Complex64, zeta: Complex64) -> Result<f64> {
    check_open_disk("green_pullback: z", z)?;
    check_open_disk("green_pullback: zeta", zeta)?;
    let r2 = zeta.norm_sqr();
    let log_rho = if r2 > 0.0 { 0.5 * r2.ln() } else { 0.0 };
    Ok(green_pullback_parts(z, zeta, r2, log_rho))
}

/// Same as [`green_pullback`] with `|ζ|²` and `log|ζ|` supplied by the caller.
#[inline]
pub(crate) fn green_pullback_parts(z: Complex64, zeta: Complex64, r2: f64, log_rho: f64) -> f64 {
    let dz = 1.0 - z.norm_sqr();
    let q = (Complex64::new(1.0, 0.0) - z.conj() * zeta).norm_sqr();
    -dz * dz / q * radial_profile(r2, log_rho)
}

/// `G_z(z, w(ζ))` in the Möbius variable:
/// `-2ζ̄(1-|z|²) log|ζ| / (1 - z ζ̄) + (1-|z|²)(1-|ζ|²)(z̄ - ζ̄)/|1 - z̄ζ|²`.
///
/// Finite at `ζ = 0`, where it equals `z̄(1 - |z|²)`.
pub fn green_gradient_pullback(z: Complex64, zeta: Complex64) -> Result<KernelGradient> {
    check_open_disk("green_gradient_pullback: z", z)?;
    check_open_disk("green_gradient_pullback: zeta", zeta)?;
    let r2 = zeta.norm_sqr();
    let log_rho = if r2 > 0.0 { 0.5 * r2.ln() } else { 0.0 };
    let d_z = green_dz_pullback_parts(z, zeta, r2, log_rho);
    Ok(KernelGradient {
        d_z,
        d_zbar: d_z.conj(),
    })
}

#[inline]
pub(crate) fn green_dz_pullback_parts(
    z: Complex64,
    zeta: Complex64,
    r2: f64,
    log_rho: f64,
) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let dz = 1.0 - z.norm_sqr();
    let zb = zeta.conj();
    let a = one - z.conj() * zeta;
    let log_term = if r2 > 0.0 {
        -2.0 * zb * (dz * log_rho) / a.conj()
    } else {
        Complex64::new(0.0, 0.0)
    };
    log_term + (z.conj() - zb) * (dz * (1.0 - r2) / a.norm_sqr())
}

/// Poisson kernel and its Wirtinger derivatives at `(z, e^{iθ})`.
pub fn poisson_eval(z: Complex64, theta: f64) -> Result<PoissonEval> {
    check_open_disk("poisson_eval", z)?;
    let e_minus = Complex64::from_polar(1.0, -theta);
    let a = Complex64::new(1.0, 0.0) - z * e_minus;
    let value = (1.0 - z.norm_sqr()) / a.norm_sqr();
    // P = 1/(1 - z e^{-iθ}) + 1/(1 - z̄ e^{iθ}) - 1
    let d_z = e_minus / (a * a);
    Ok(PoissonEval {
        value,
        d_z,
        d_zbar: d_z.conj(),
    })
}

/// `F(z, w) = log|(1 - z w̄)/(z - w)|`, positive on the disk.
pub fn f_kernel(z: Complex64, w: Complex64) -> Result<f64> {
    check_open_disk("f_kernel: z", z)?;
    check_open_disk("f_kernel: w", w)?;
    if z == w {
        return Err(Error::Singularity("f_kernel"));
    }
    Ok(0.5 * log_ratio_sq(z, w))
}

/// Both sides of the circle-mean identity
/// `(1/2π)∫ |1 - r e^{iθ}|^{-2α} dθ = Σ (Γ(n+α)/(n! Γ(α)))² r^{2n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesIntegral {
    pub quadrature: f64,
    pub series: f64,
    pub terms: usize,
    /// `false` when the series hit its term cap or the trapezoid resolution
    /// is too coarse for `r` at the requested node count.
    pub converged: bool,
}

const SERIES_TAIL: f64 = 1e-15;
const SERIES_CAP: usize = 1_000_000;

pub fn kernel_series_integral(alpha: f64, r: f64, nodes: usize) -> Result<SeriesIntegral> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain {
            what: "kernel_series_integral: r",
            modulus: r,
        });
    }
    if nodes == 0 {
        return Err(Error::InvalidInput("node count must be positive".into()));
    }
    let rule = CircleRule::new(nodes);
    let quad = circle_integrate(
        |theta| {
            let d = Complex64::new(1.0 - r * theta.cos(), -r * theta.sin()).norm_sqr();
            Complex64::new(d.powf(-alpha), 0.0)
        },
        &rule,
    )?
    .re / (2.0 * PI);

    // c_n = Γ(n+α)/(n! Γ(α)) via c_{n+1} = c_n (n+α)/(n+1).
    let x = r * r;
    let mut coeff = 1.0_f64;
    let mut power = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut terms = 1;
    let mut series_done = x == 0.0;
    while !series_done && terms < SERIES_CAP {
        let n = (terms - 1) as f64;
        coeff *= (n + alpha) / (n + 1.0);
        power *= x;
        let term = coeff * coeff * power;
        sum += term;
        terms += 1;
        let next_ratio = ((n + 1.0 + alpha) / (n + 2.0)).powi(2) * x;
        // Geometric tail estimate once consecutive ratios are below one.
        if next_ratio < 1.0 && term * next_ratio / (1.0 - next_ratio) < SERIES_TAIL {
            series_done = true;
        }
    }

    // Fourier coefficients of the kernel decay like r^k k^{α-1}; the trapezoid
    // aliasing error is governed by the first aliased mode k = nodes.
    let alias =
        r.powf(nodes as f64) * (nodes as f64).powf((alpha - 1.0).max(0.0)) / (1.0 - x).powf(alpha);
    Ok(SeriesIntegral {
        quadrature: quad,
        series: sum,
        terms,
        converged: series_done && alias < 1e-12,
    })
}
