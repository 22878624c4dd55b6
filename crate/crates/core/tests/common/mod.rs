#![allow(dead_code)]

use fracrbf::frlap_kernel::FracOrder;
use fracrbf::oracle::{hypersingular, OracleOptions};
use fracrbf::problems::{ProblemId, ProblemSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Interior points kept away from the kinks of the compactly supported solutions.
pub fn sample(id: ProblemId, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match id {
        ProblemId::Ex1 { .. } | ProblemId::Ex4 => vec![rng.gen_range(-0.95..0.95)],
        ProblemId::Ex2 => {
            let r: f64 = 0.95 * rng.gen_range(0.0f64..1.0).sqrt();
            let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            vec![r * t.cos(), r * t.sin()]
        }
        ProblemId::Ex3 => vec![rng.gen_range(-1.9..1.9), rng.gen_range(-1.9..1.9)],
        ProblemId::Ex5 => vec![rng.gen_range(-0.95..0.95), rng.gen_range(-0.95..0.95)],
    }
}

/// Largest |f - oracle| over `points` random interior points.
pub fn worst_gap(id: ProblemId, alpha: f64, points: usize, seed: u64) -> f64 {
    let spec = ProblemSpec::<f64>::new(id, alpha).unwrap();
    let order = FracOrder::new(alpha, spec.dim()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..points {
        let x = sample(id, &mut rng);
        let u = spec.u_exact.clone();
        let brute = hypersingular(|y: &[f64]| u(y), order, &x, &spec.kinks, &OracleOptions::default()).unwrap();
        let f = (spec.f)(&x).unwrap();
        worst = worst.max((f - brute).abs());
    }
    worst
}
