//! Shared fixtures for the benchmarks.

use biharm_core::{BidegreePoly, BoundaryFourier, Complex64, ProblemSpec};

/// Mixed data with nonzero `f*`, `φ` and a quadratic source.
pub fn mixed_spec() -> ProblemSpec {
    let c = Complex64::new;
    ProblemSpec::new(
        BoundaryFourier::from_terms([(1, c(0.5, 0.0)), (-2, c(0.1, 0.2))]),
        BoundaryFourier::from_terms([(0, c(0.2, 0.0)), (3, c(0.0, -0.1))]),
        BidegreePoly::from_terms([
            (0, 0, c(8.0, 0.0)),
            (1, 1, c(-2.0, 0.0)),
            (2, 0, c(0.0, 1.0)),
        ]),
    )
}

/// Evaluation points at increasing distance from the centre.
pub fn radii_points() -> Vec<Complex64> {
    [0.0, 0.5, 0.9, 0.99]
        .iter()
        .map(|&r| Complex64::from_polar(r, 0.7))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_inside_the_disk() {
        assert!(radii_points().iter().all(|z| z.norm() < 1.0));
        assert!(!mixed_spec().g.is_zero());
    }
}
