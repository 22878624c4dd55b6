//! The closed-form fractional Laplacian of a Gaussian against an inverse-Fourier quadrature,
//! its local limits alpha = 0 and alpha = 2, and structural properties.

use fracrbf::frlap_kernel::{frac_laplacian_constant, frlap_gaussian, frlap_oracle_fourier, FracOrder, GaussianRbf};
use proptest::prelude::*;

fn order(alpha: f64, d: usize) -> FracOrder<f64> {
    FracOrder::new(alpha, d).unwrap()
}

#[test]
fn agrees_with_fourier_quadrature() {
    let scaled = [0.0, 0.3, 1.0, 2.5, 5.0, 10.0, 20.0, 40.0];
    for alpha in [0.4, 1.0, 1.5, 2.0] {
        for d in 1..=3 {
            for eps in [1.0, 2.5] {
                for &er in &scaled {
                    let r = er / eps;
                    let closed = frlap_gaussian(order(alpha, d), eps, r).unwrap();
                    let quad = frlap_oracle_fourier(order(alpha, d), eps, r, 1e-10).unwrap();
                    assert!(
                        (closed - quad).abs() <= 1e-9,
                        "alpha {alpha} d {d} eps {eps} r {r}: {closed} vs {quad}"
                    );
                }
            }
        }
    }
}

#[test]
fn alpha_two_is_the_negative_laplacian() {
    for d in 1..=3 {
        let df = d as f64;
        for eps in [0.5f64, 1.0, 3.0] {
            for r in [0.0, 0.2, 0.7, 1.5] {
                let e2 = eps * eps;
                let g = (-e2 * r * r).exp();
                let expect = (2.0 * df * e2 - 4.0 * e2 * e2 * r * r) * g;
                let scale = 2.0 * df * e2 * g;
                let v = frlap_gaussian(order(2.0, d), eps, r).unwrap();
                assert!((v - expect).abs() <= 1e-11 * scale, "d {d} eps {eps} r {r}: {v} vs {expect}");
            }
        }
    }
}

#[test]
fn alpha_zero_is_the_identity() {
    for d in 1..=3 {
        for eps in [0.5f64, 2.0] {
            for r in [0.0, 0.4, 1.3] {
                let g = (-eps * eps * r * r).exp();
                for alpha in [0.0, 1e-14] {
                    let v = frlap_gaussian(order(alpha, d), eps, r).unwrap();
                    assert!((v - g).abs() <= 1e-12, "alpha {alpha} d {d}: {v} vs {g}");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_law(alpha in 0.05f64..1.95, d in 1usize..4, eps in 0.1f64..20.0, er in 0.0f64..60.0) {
        let r = er / eps;
        let lhs = frlap_gaussian(order(alpha, d), eps, r).unwrap();
        let rhs = eps.powf(alpha) * frlap_gaussian(order(alpha, d), 1.0, er).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn translation_and_reflection(
        alpha in 0.05f64..1.95,
        c in prop::array::uniform2(-2.0f64..2.0),
        x in prop::array::uniform2(-2.0f64..2.0),
        s in prop::array::uniform2(-5.0f64..5.0),
        eps in 0.5f64..8.0,
    ) {
        let o = order(alpha, 2);
        let base = GaussianRbf::new(c.to_vec(), eps).unwrap().frlap(o, &x).unwrap();
        let moved = GaussianRbf::new(vec![c[0] + s[0], c[1] + s[1]], eps)
            .unwrap()
            .frlap(o, &[x[0] + s[0], x[1] + s[1]])
            .unwrap();
        let mirrored = GaussianRbf::new(vec![-c[0], -c[1]], eps).unwrap().frlap(o, &[-x[0], -x[1]]).unwrap();
        prop_assert!((base - moved).abs() <= 1e-11 * base.abs().max(1e-12));
        prop_assert!((base - mirrored).abs() <= 1e-14 * base.abs().max(1e-300));
    }

    #[test]
    fn positive_at_center_and_algebraic_tail(alpha in 0.05f64..1.95, d in 1usize..4, eps in 0.2f64..5.0) {
        let o = order(alpha, d);
        prop_assert!(frlap_gaussian(o, eps, 0.0).unwrap() > 0.0);
        // far away the operator sees the Gaussian as a point mass of weight (pi / eps^2)^(d/2)
        let r = 200.0 / eps;
        let v = frlap_gaussian(o, eps, r).unwrap();
        let mass = (std::f64::consts::PI / (eps * eps)).powf(d as f64 / 2.0);
        let tail = -frac_laplacian_constant(o) * mass * r.powf(-(d as f64) - alpha);
        prop_assert!(((v - tail) / tail).abs() < 1e-3, "{} vs {}", v, tail);
    }
}
