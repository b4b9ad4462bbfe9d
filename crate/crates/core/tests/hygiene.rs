//! Numerical checks of the map layer against independent references.

use shadowlab_core::conditions::{compute_alpha, s_minimum};
use shadowlab_core::maps::{ipow, INVERSE_TOL};
use shadowlab_core::rng::Stream;
use shadowlab_core::*;

fn fd_jacobian(spec: &MapSpec, p: Point2, h: f64) -> [[f64; 2]; 2] {
    let col = |dx: f64, dy: f64| {
        let a = spec.apply2(Point2::new(p.x + dx, p.y + dy));
        let b = spec.apply2(Point2::new(p.x - dx, p.y - dy));
        ((a.x - b.x) / (2.0 * h), (a.y - b.y) / (2.0 * h))
    };
    let (gx, hx) = col(h, 0.0);
    let (gy, hy) = col(0.0, h);
    [[gx, gy], [hx, hy]]
}

fn perturbed_saddle() -> MapSpec {
    MapSpec::PlanarSaddle {
        n: 1,
        m: 2,
        x_terms: vec![Monomial::new(0.3, 2, 1)],
        y_terms: vec![Monomial::new(0.1, 2, 1), Monomial::new(-0.2, 0, 6)],
    }
}

#[test]
fn inverse_roundtrips_per_family() {
    let mut rng = Stream::new(11);
    let cubic = MapSpec::cubic();
    let quartic = MapSpec::Expanding1D { n: 2, x_terms: vec![Monomial::new(1.0, 6, 0)] };
    for _ in 0..10_000 {
        let x = 0.8 * rng.symmetric();
        for spec in [&cubic, &quartic] {
            let back = spec.inverse1(spec.apply1(x), INVERSE_TOL).unwrap();
            assert!((back - x).abs() <= 1e-10, "{spec:?} {x}");
        }
    }
    let saddle = MapSpec::saddle(1, 1);
    let perturbed = perturbed_saddle();
    let skew = MapSpec::NonisolatedSkew;
    for _ in 0..10_000 {
        let p = Point2::new(0.3 * rng.symmetric(), 0.3 * rng.symmetric());
        for spec in [&saddle, &perturbed] {
            let back = spec.inverse2(spec.apply2(p), INVERSE_TOL).unwrap();
            assert!(back.dist(p) <= 1e-10, "{spec:?} {p:?}");
        }
        let q = Point2::new(0.99 * rng.symmetric(), 2.0 * rng.symmetric());
        let back = skew.inverse2(skew.apply2(q), INVERSE_TOL).unwrap();
        assert!(back.dist(q) <= 1e-10);
    }
}

#[test]
fn jacobians_match_central_differences() {
    let mut rng = Stream::new(12);
    let specs = [MapSpec::saddle(1, 1), MapSpec::saddle(2, 3), perturbed_saddle(), MapSpec::NonisolatedSkew];
    for _ in 0..1000 {
        let p = Point2::new(0.5 * rng.symmetric(), 0.5 * rng.symmetric());
        for spec in &specs {
            let exact = spec.jacobian2(p);
            let approx = fd_jacobian(spec, p, 1e-6);
            for i in 0..2 {
                for j in 0..2 {
                    let e = exact[i][j];
                    assert!((e - approx[i][j]).abs() <= 1e-6 * (1.0 + e.abs()), "{spec:?} {p:?} {i}{j}");
                }
            }
        }
        let x = 0.9 * rng.symmetric();
        let cubic = MapSpec::Expanding1D { n: 1, x_terms: vec![Monomial::new(1.0, 4, 0)] };
        let fd = (cubic.apply1(x + 1e-6) - cubic.apply1(x - 1e-6)) / 2e-6;
        let e = cubic.derivative1(x);
        assert!((e - fd).abs() <= 1e-6 * (1.0 + e.abs()));
    }
}

/// `((x+ε)^{2n+1} − x^{2n+1})/ε` by direct powers, independent of the library's expansion.
fn s_direct(n: u32, x: f64, eps: f64) -> f64 {
    let k = 2 * n as i32 + 1;
    ((x + eps).powi(k) - x.powi(k)) / eps
}

#[test]
fn alpha_satisfies_the_lower_bound_on_random_samples() {
    for n in 1..=3u32 {
        let alpha = compute_alpha(n).unwrap();
        assert!(alpha > 0.0);
        let c = 1.0 / (1.0 + ipow(2.0, 2 * n));
        let mut rng = Stream::new(100 + n as u64);
        for _ in 0..100_000 {
            let x = rng.symmetric();
            let eps = 1.0 - rng.unit();
            let lhs = s_direct(n, x, eps) - c * ipow(eps, 2 * n);
            let rhs = alpha * (ipow(x, 2 * n) + ipow(eps, 2 * n));
            assert!(lhs >= rhs - 1e-12 * (1.0 + rhs), "n={n} x={x} ε={eps}");
        }
    }
}

#[test]
fn s_minimum_is_a_power_of_a_quarter() {
    for n in 1..=3 {
        let (x, s) = s_minimum(n);
        assert!((s - 0.25f64.powi(n as i32)).abs() <= 1e-9);
        assert!((x + 0.5).abs() <= 1e-6);
        assert!((s_direct(n, -0.5, 1.0) - s).abs() <= 1e-9);
    }
}

#[test]
fn alpha_for_the_cubic_matches_the_quadratic_form() {
    // for n = 1 the ratio is (3x² + 3x + 4/5)/(x² + 1); its minimum is the
    // smaller root of λ² − 3.8λ + 0.15 = 0
    let lambda = (3.8 - (3.8f64 * 3.8 - 0.6).sqrt()) / 2.0;
    let a1 = compute_alpha(1).unwrap();
    assert!((a1 - 0.99 * lambda).abs() < 1e-9, "{a1} vs {}", 0.99 * lambda);
    assert!(compute_alpha(2).unwrap() < a1);
}
