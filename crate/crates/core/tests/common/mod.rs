#![allow(dead_code)]

use oscillint_core::riccati::ComparisonInstance;
use oscillint_core::transform::{RiccatiProblem, SystemSpec};
use rand::Rng;

/// `c0 + c1 sin(w t + c2)` with the given offset range and amplitude bound.
pub fn wave<R: Rng>(rng: &mut R, offset: (f64, f64), amplitude: f64) -> String {
    let c0 = rng.gen_range(offset.0..=offset.1);
    let c1 = rng.gen_range(-amplitude..=amplitude);
    let w = rng.gen_range(0.2..2.0);
    let ph = rng.gen_range(0.0..std::f64::consts::TAU);
    format!("{c0} + {c1}*sin({w}*t + {ph})")
}

/// Homogeneous system with smooth bounded coefficients and `q > 0`.
pub fn homogeneous_system<R: Rng>(rng: &mut R) -> SystemSpec {
    let q0 = rng.gen_range(0.3..2.0);
    let q = format!("{q0} + {}*cos({}*t)", rng.gen_range(0.0..0.9 * q0), rng.gen_range(0.2..2.0));
    let p = wave(rng, (-0.3, 0.3), 0.3);
    let s = wave(rng, (-0.3, 0.3), 0.3);
    let r = wave(rng, (-2.0, 0.5), 1.0);
    SystemSpec::parse([&p, &q, &r, &s, "0", "0"], 0.0).unwrap()
}

/// Forced system whose λ-feasibility set may or may not be empty.
pub fn forced_system<R: Rng>(rng: &mut R) -> SystemSpec {
    let p = wave(rng, (-0.2, 0.2), 0.3);
    let f = wave(rng, (-0.5, 1.0), 0.8);
    let r = wave(rng, (-1.0, 1.0), 1.0);
    let g = wave(rng, (-0.5, 1.0), 0.8);
    SystemSpec::parse([&p, "1", &r, "0", &f, &g], 0.0).unwrap()
}

/// Comparison pair with `f₁ = f₂ ≥ 0`, `g₁ = g₂` and `h₂ ≥ h₁`.
pub fn comparison_instance<R: Rng>(rng: &mut R) -> ComparisonInstance {
    let span = (0.0, rng.gen_range(2.0..6.0));
    let f0 = rng.gen_range(0.0..1.5);
    let f = format!("{f0} + {}*sin({}*t)", rng.gen_range(0.0..=f0), rng.gen_range(0.2..2.0));
    let g = wave(rng, (-1.0, 1.0), 1.0);
    let h1 = wave(rng, (-1.0, 1.0), 1.0);
    let d0 = rng.gen_range(0.0..1.0);
    let h2 = format!("{h1} + {d0} + {}*cos({}*t)^2", rng.gen_range(0.0..1.0), rng.gen_range(0.2..2.0));
    let p1 = RiccatiProblem::parse([&f, &g, &h1], span).unwrap();
    let p2 = RiccatiProblem::parse([&f, &g, &h2], span).unwrap();
    let y2 = rng.gen_range(-1.0..1.0);
    ComparisonInstance::new(p1, p2, y2, rng.gen_range(0.0..1.0))
}
