//! Shared fixtures for the criterion benchmarks.

use actnet::{uniform_partition, CoverAssign, Partition, Result};

/// Evenly spaced sine samples, the stock compile workload.
pub fn sin_partition(knots: usize) -> Partition {
    uniform_partition(0.0, std::f64::consts::PI, knots, f64::sin).unwrap()
}

/// Assigns unit `i` the band from the start up to interval `i`. The
/// incidence matrix is lower triangular, so the cover always solves.
pub fn staircase_cover(units: usize) -> Result<CoverAssign> {
    CoverAssign::new((0..units).map(|i| (0, i)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use actnet::{compile_scalar, solve_cover, verify_equivalent, ActivationKind};

    #[test]
    fn staircase_cover_solves_and_matches_the_direct_compile() {
        let p = sin_partition(17);
        let direct = compile_scalar(&p, ActivationKind::HardLinear);
        let covered = solve_cover(&p, &staircase_cover(16).unwrap()).unwrap();
        let rep = verify_equivalent(&covered, &direct, p.span(), 501, 1e-9).unwrap();
        assert!(rep.equivalent, "deviation {}", rep.max_deviation);
    }
}
