//! Consistency checks of the kernels against closed forms and each other.

use std::f64::consts::PI;

use biharm_core::bounds::{grad_green_mass_bound, green_mass_identity};
use biharm_core::kernels::{
    green, green_gradient, green_pullback, kernel_series_integral, mobius, poisson_eval,
};
use biharm_core::quadrature::circle_integrate;
use biharm_core::{CircleRule, Complex64, DiskRule, Result};

use crate::report::{SelftestCheck, SelftestTable};

/// Fixed probe points inside the disk.
fn probes() -> Vec<Complex64> {
    let mut pts = vec![Complex64::new(0.0, 0.0)];
    for (k, &r) in [0.1, 0.35, 0.6, 0.85, 0.97].iter().enumerate() {
        for j in 0..5 {
            let t = 2.0 * PI * j as f64 / 5.0 + 0.37 * k as f64;
            pts.push(Complex64::from_polar(r, t));
        }
    }
    pts
}

fn check(name: &str, error: f64, tolerance: f64) -> SelftestCheck {
    SelftestCheck {
        name: name.to_string(),
        error,
        tolerance,
        pass: error.is_finite() && error <= tolerance,
    }
}

fn pairs(pts: &[Complex64]) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
    pts.iter()
        .enumerate()
        .flat_map(move |(i, &z)| pts[i + 1..].iter().map(move |&w| (z, w)))
}

pub fn run(rule: &DiskRule) -> Result<SelftestTable> {
    let pts = probes();
    let mut checks = Vec::new();

    let mut asym: f64 = 0.0;
    let mut positive: f64 = 0.0;
    for (z, w) in pairs(&pts) {
        let a = green(z, w)?;
        let b = green(w, z)?;
        asym = asym.max((a - b).abs());
        positive = positive.max(a);
    }
    checks.push(check("green symmetry", asym, 1e-14));
    checks.push(check("green nonpositive", positive.max(0.0), 0.0));

    let mut pull: f64 = 0.0;
    for (z, zeta) in pairs(&pts) {
        let direct = green(z, mobius(z, zeta))?;
        let p = green_pullback(z, zeta)?;
        pull = pull.max((direct - p).abs() / direct.abs().max(1e-300).max(1e-3));
    }
    checks.push(check("pullback matches direct", pull, 1e-10));

    let h = 1e-6;
    let mut fd: f64 = 0.0;
    for (z, w) in pairs(&pts) {
        if (z - w).norm() < 0.05 {
            continue;
        }
        let dx = (green(z + h, w)? - green(z - h, w)?) / (2.0 * h);
        let iy = Complex64::new(0.0, h);
        let dy = (green(z + iy, w)? - green(z - iy, w)?) / (2.0 * h);
        let expect = Complex64::new(dx, -dy) * 0.5;
        fd = fd.max((green_gradient(z, w)?.d_z - expect).norm());
    }
    checks.push(check("gradient matches differences", fd, 1e-7));

    let circle = CircleRule::new(512);
    let mut mean: f64 = 0.0;
    for &z in pts.iter().filter(|z| z.norm() < 0.9) {
        let v = circle_integrate(
            |t| {
                poisson_eval(z, t)
                    .map(|p| Complex64::new(p.value, 0.0))
                    .unwrap_or_default()
            },
            &circle,
        )?;
        mean = mean.max((v.re / (2.0 * PI) - 1.0).abs());
    }
    checks.push(check("poisson mean", mean, 1e-12));

    let origin = Complex64::new(0.0, 0.0);
    let (mass, _) = green_mass_identity(origin, rule)?;
    checks.push(check(
        "green mass at origin",
        (mass - 1.0 / 64.0).abs(),
        1e-12,
    ));

    let mut mass_err: f64 = 0.0;
    for &z in pts.iter().filter(|z| z.norm() < 0.9) {
        let (numeric, closed) = green_mass_identity(z, rule)?;
        mass_err = mass_err.max((numeric - closed).abs());
    }
    checks.push(check("green mass identity", mass_err, 1e-12));

    let grad_mass = grad_green_mass_bound(origin, rule)?;
    checks.push(check(
        "gradient mass at origin",
        (grad_mass - 2.0 / 45.0).abs(),
        1e-10,
    ));

    let series = kernel_series_integral(2.0, 0.5, 256)?;
    let series_err = (series.quadrature - 80.0 / 27.0)
        .abs()
        .max((series.series - 80.0 / 27.0).abs());
    checks.push(check("circle series", series_err, 1e-12));

    Ok(SelftestTable { checks })
}
