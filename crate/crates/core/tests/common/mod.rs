#![allow(dead_code)]

use biharm_core::solver::solution_sup_norm;
use biharm_core::{
    BidegreePoly, BoundaryFourier, Complex64, DiskRule, DiskRuleParams, PolarGrid, ProblemSpec,
};
use rand::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_fourier<R: Rng>(rng: &mut R, degree: i64) -> BoundaryFourier {
    BoundaryFourier::from_terms(
        (-degree..=degree)
            .map(|n| (n, random_complex(rng)))
            .collect::<Vec<_>>(),
    )
}

pub fn random_analytic<R: Rng>(rng: &mut R, degree: i64) -> BoundaryFourier {
    BoundaryFourier::from_terms(
        (0..=degree)
            .map(|n| (n, random_complex(rng)))
            .collect::<Vec<_>>(),
    )
}

pub fn random_bidegree<R: Rng>(rng: &mut R, degree: usize) -> BidegreePoly {
    let mut terms = Vec::new();
    for j in 0..=degree {
        for k in 0..=degree - j {
            terms.push((j, k, random_complex(rng)));
        }
    }
    BidegreePoly::from_terms(terms)
}

pub fn random_spec<R: Rng>(
    rng: &mut R,
    f_degree: i64,
    phi_degree: i64,
    g_degree: usize,
) -> ProblemSpec {
    ProblemSpec::new(
        random_fourier(rng, f_degree),
        random_fourier(rng, phi_degree),
        random_bidegree(rng, g_degree),
    )
}

/// Grid on which [`scale_into_disk`] measures the solution.
pub fn sup_grid() -> PolarGrid {
    PolarGrid::new(20, 48, 0.99)
}

/// Rescales `spec` so that the sampled sup of its solution is at most one.
pub fn scale_into_disk(spec: &ProblemSpec, grid: &PolarGrid, rule: &DiskRule) -> ProblemSpec {
    let sup = solution_sup_norm(spec, grid, rule).expect("solution is finite on the grid");
    spec.scaled((1.0 - 1e-12) / sup)
}

/// A light rule for sweeps over smooth low-degree sources.
pub fn sweep_rule() -> DiskRule {
    DiskRule::new(DiskRuleParams {
        angular_nodes: 64,
        radial_panels: 2,
        panel_order: 8,
        grading_levels: 3,
    })
    .unwrap()
}

pub fn sharp(m: f64) -> ProblemSpec {
    ProblemSpec::new(
        BoundaryFourier::zero(),
        BoundaryFourier::zero(),
        BidegreePoly::constant(c(m, 0.0)),
    )
}

/// Data of `f(z) = 1 - |z|²`: `f* = 0`, `φ = -e^{it}`, `g = 0`.
pub fn remark() -> ProblemSpec {
    ProblemSpec::new(
        BoundaryFourier::zero(),
        BoundaryFourier::monomial(1, c(-1.0, 0.0)),
        BidegreePoly::zero(),
    )
}

pub fn identity() -> ProblemSpec {
    ProblemSpec::new(
        BoundaryFourier::monomial(1, c(1.0, 0.0)),
        BoundaryFourier::zero(),
        BidegreePoly::zero(),
    )
}

/// Taylor data of `(z - a)/(1 - a z)` for real `a`, truncated at `degree`.
pub fn mobius(a: f64, degree: i64) -> ProblemSpec {
    let terms = std::iter::once((0, c(-a, 0.0)))
        .chain((1..=degree).map(|n| (n, c((1.0 - a * a) * a.powi(n as i32 - 1), 0.0))));
    ProblemSpec::new(
        BoundaryFourier::from_terms(terms),
        BoundaryFourier::zero(),
        BidegreePoly::zero(),
    )
}
