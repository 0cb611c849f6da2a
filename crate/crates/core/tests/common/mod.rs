//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use equiloc::localization::EquivariantClassAtF;
use equiloc::model::ManifoldPresentation;
use equiloc::ring::qi;
use equiloc::witten::TestFunction;
use equiloc::C64;

/// `rho = 1` on every component.
pub fn rho_one(p: &ManifoldPresentation) -> Vec<EquivariantClassAtF> {
    p.components
        .iter()
        .map(|f| EquivariantClassAtF::constant(&f.ring, qi(1)))
        .collect()
}

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> C64, a: f64, b: f64, n: usize) -> C64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += f(a + h * i as f64) * w;
    }
    s * (h / 3.0)
}

/// `int phi(x) / (x + i eps)^k dx`: the constant `phi(0)` is integrated in
/// closed form over the support, the remainder by Simpson's rule.
pub fn regularized_pair(phi: &TestFunction<f64>, k: i32, eps: f64) -> C64 {
    let a = phi.delta2;
    let lo = C64::new(-a, eps);
    let hi = C64::new(a, eps);
    let constant = if k == 1 {
        hi.ln() - lo.ln()
    } else {
        (hi.powi(1 - k) - lo.powi(1 - k)) / (1 - k) as f64
    };
    let phi0 = phi.value(0.0);
    let rest = simpson(
        |x| C64::new(phi.value(x) - phi0, 0.0) / C64::new(x, eps).powi(k),
        -a,
        a,
        200_000,
    );
    constant * phi0 + rest
}

/// Limit `eps -> 0+` of [`regularized_pair`] by Richardson extrapolation over
/// `eps` in `{1e-2, 1e-3, 1e-4, 1e-5}` assuming an expansion in powers of `eps`.
pub fn epsilon_limit(phi: &TestFunction<f64>, k: i32) -> C64 {
    let mut table: Vec<C64> = [1e-2, 1e-3, 1e-4, 1e-5]
        .iter()
        .map(|&e| regularized_pair(phi, k, e))
        .collect();
    let mut factor = 10.0;
    while table.len() > 1 {
        table = table
            .windows(2)
            .map(|w| (w[1] * factor - w[0]) / (factor - 1.0))
            .collect();
        factor *= 10.0;
    }
    table[0]
}

/// `int (e^{2 pi i m x} - 1) / (2 pi i x) phi(x) dx` with the integrand's
/// removable singularity handled by its Taylor value.
pub fn cp1_flat_pairing(phi: &TestFunction<f64>, m: u64) -> C64 {
    let m = m as f64;
    let f = |x: f64| {
        let v = if x.abs() < 1e-8 {
            C64::new(m, 0.0) + C64::new(0.0, PI * m * m * x)
        } else {
            (C64::new(0.0, 2.0 * PI * m * x).exp() - 1.0) / C64::new(0.0, 2.0 * PI * x)
        };
        v * phi.value(x)
    };
    simpson(f, -phi.delta2, phi.delta2, 400_000)
}
