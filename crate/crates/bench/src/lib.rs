//! Fixtures shared by the benchmarks.

use hypineq_core::catalog::Params;
use hypineq_core::sharpness::{DiscreteGrid, Problem};
use hypineq_core::{ModelKind, RadialProfile};

/// Hardy–Poincaré instance with `n = 3`, `p = 2`, `α = 0` on hyperbolic space.
pub fn hardy_poincare() -> Problem {
    Problem::builtin(
        "hardy-poincare",
        Params::new(3).with_alpha(0.0).with_p(2.0),
        ModelKind::Hyperbolic,
    )
    .expect("built-in instance")
}

/// Rellich instance with `n = 5`, `α = 1.5`.
pub fn rellich_grad() -> Problem {
    Problem::builtin("rellich-grad", Params::new(5).with_alpha(1.5), ModelKind::Hyperbolic).expect("built-in instance")
}

pub fn hpw(n: u32) -> Problem {
    Problem::builtin("hpw", Params::new(n), ModelKind::Hyperbolic).expect("built-in instance")
}

pub fn bump(seed: u64) -> RadialProfile {
    RadialProfile::seeded_bump(seed, hypineq_core::profiles::DEFAULT_WINDOW).expect("default window")
}

pub fn grid(points: usize) -> DiscreteGrid {
    DiscreteGrid {
        points,
        ..DiscreteGrid::default()
    }
}
