//! Lagrange function Psi_gamma, quasi-interpolation, saturation coefficients and the
//! Fourier symbols of the collocation and Galerkin forms.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::specfun::{cos_pi, sin_pi};

/// Psi_gamma(x) = prod_j (gamma/pi) sin(pi x_j) / sinh(gamma x_j).
pub fn psi_gamma<T: Real>(x: &[T], gamma: T) -> T {
    x.iter().map(|&t| psi_factor(t, gamma)).fold(T::one(), |a, b| a * b)
}

fn psi_factor<T: Real>(t: T, gamma: T) -> T {
    if t == T::zero() {
        return T::one();
    }
    let s = sin_pi(t);
    if s == T::zero() {
        return T::zero();
    }
    let gt = gamma * t;
    if gt.abs() < T::lit(1e-4) {
        // sinh(u)/u = 1 + u^2/6 + u^4/120
        let u2 = gt * gt;
        let shc = T::one() + u2 / T::lit(6.0) + u2 * u2 / T::lit(120.0);
        return s / (T::PI() * t * shc);
    }
    gamma / T::PI() * s / gt.sinh()
}

/// Fourier transform of Psi_gamma: prod_j sinh(c) / (cosh(pi xi_j / gamma) + cosh(c)), c = pi^2/gamma.
///
/// Each factor is formed in log space, so tiny gamma and large |xi| neither overflow nor lose digits.
pub fn psi_gamma_hat<T: Real>(xi: &[T], gamma: T) -> T {
    xi.iter()
        .map(|&t| ln_psi_hat_factor(t, gamma))
        .fold(T::zero(), |a, b| a + b)
        .exp()
}

fn ln_psi_hat_factor<T: Real>(xi: T, gamma: T) -> T {
    let c = T::PI() * T::PI() / gamma;
    let w = (T::PI() * xi / gamma).abs();
    let e2c = (-T::lit(2.0) * c).exp();
    let num = (-e2c).ln_1p();
    let e2w = (-T::lit(2.0) * w).exp();
    if w <= c {
        num - ((w - c).exp() * (T::one() + e2w) + T::one() + e2c).ln()
    } else {
        num + (c - w) - (T::one() + e2w + (T::one() + e2c) * (c - w).exp()).ln()
    }
}

fn psi_hat_complex<T: Real>(z: Complex<T>, gamma: T) -> Complex<T> {
    let one = Complex::new(T::one(), T::zero());
    let c = T::PI() * T::PI() / gamma;
    let mut w = z * (T::PI() / gamma);
    if w.re < T::zero() {
        w = -w;
    }
    let e2c = (-T::lit(2.0) * c).exp();
    let e2w = (-w * T::lit(2.0)).exp();
    if w.re <= c {
        let den = (w - c).exp() * (one + e2w) + one * (T::one() + e2c);
        one * (T::one() - e2c) / den
    } else {
        let t = (-w + c).exp();
        t * (T::one() - e2c) / (one + e2w + t * (T::one() + e2c))
    }
}

// 1 - Psi_hat(z) without cancellation near z = 0.
fn one_minus_psi_hat<T: Real>(z: Complex<T>, gamma: T) -> Complex<T> {
    let c = T::PI() * T::PI() / gamma;
    let mut w = z * (T::PI() / gamma);
    if w.re < T::zero() {
        w = -w;
    }
    if w.re > c {
        return Complex::new(T::one(), T::zero()) - psi_hat_complex(z, gamma);
    }
    let e2c = (-T::lit(2.0) * c).exp();
    let a = (w - c).exp() + (-w - c).exp();
    (a + e2c * T::lit(2.0)) / (a + T::one() + e2c)
}

/// Samples u(h m) on the box of lattice indices lo_j <= m_j < lo_j + shape_j, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeWindow<T> {
    pub lo: Vec<i64>,
    pub shape: Vec<usize>,
    pub values: Vec<T>,
}

impl<T: Real> LatticeWindow<T> {
    pub fn new(lo: Vec<i64>, shape: Vec<usize>, values: Vec<T>) -> Result<Self> {
        if lo.len() != shape.len() || lo.is_empty() {
            return Err(Error::InvalidParameter(
                "window needs matching, nonempty lo and shape".into(),
            ));
        }
        let count: usize = shape.iter().product();
        if count != values.len() {
            return Err(Error::DimensionMismatch {
                expected: count,
                found: values.len(),
            });
        }
        Ok(Self { lo, shape, values })
    }

    /// Samples a function on the window.
    pub fn sample(lo: Vec<i64>, shape: Vec<usize>, h: T, u: impl Fn(&[T]) -> T) -> Result<Self> {
        let d = shape.len();
        let count: usize = shape.iter().product();
        let mut values = Vec::with_capacity(count);
        let mut x = vec![T::zero(); d];
        for flat in 0..count {
            let mut rem = flat;
            for axis in (0..d).rev() {
                let k = rem % shape[axis];
                rem /= shape[axis];
                x[axis] = h * T::lit((lo[axis] + k as i64) as f64);
            }
            values.push(u(&x));
        }
        Self::new(lo, shape, values)
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }
}

/// Value of the quasi-interpolant together with a bound on the contribution of
/// lattice points outside the window (assuming the samples stay below their window maximum).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiValue<T> {
    pub value: T,
    pub tail_bound: T,
}

impl<T: Real> QuasiValue<T> {
    pub fn window_adequate(&self) -> bool {
        self.tail_bound <= T::lit(1e-14)
    }
}

/// I_h u(x) = sum_m u(h m) Psi_gamma(x/h - m) over the window.
pub fn quasi_interpolant<T: Real>(
    samples: &LatticeWindow<T>,
    gamma: T,
    h: T,
    x: &[T],
) -> Result<QuasiValue<T>> {
    let d = samples.dim();
    if x.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: x.len(),
        });
    }
    if !(gamma > T::zero()) || !(h > T::zero()) {
        return Err(Error::InvalidParameter("gamma and h must be positive".into()));
    }
    let t: Vec<T> = x.iter().map(|&v| v / h).collect();
    let factors: Vec<Vec<T>> = (0..d)
        .map(|axis| {
            (0..samples.shape[axis])
                .map(|k| {
                    let m = T::lit((samples.lo[axis] + k as i64) as f64);
                    psi_factor(t[axis] - m, gamma)
                })
                .collect()
        })
        .collect();
    let mut value = T::zero();
    for (flat, &u) in samples.values.iter().enumerate() {
        let mut rem = flat;
        let mut w = T::one();
        for axis in (0..d).rev() {
            let k = rem % samples.shape[axis];
            rem /= samples.shape[axis];
            w *= factors[axis][k];
        }
        value += u * w;
    }

    let umax = samples
        .values
        .iter()
        .fold(T::zero(), |m, &v| m.max(v.abs()));
    let mut tail = T::zero();
    for axis in 0..d {
        let lo = T::lit(samples.lo[axis] as f64);
        let hi = lo + T::from_count(samples.shape[axis]) - T::one();
        let outside = envelope_sum(hi + T::one() - t[axis], gamma) + envelope_sum(t[axis] - lo + T::one(), gamma);
        let mut others = T::one();
        for other in 0..d {
            if other != axis {
                others *= envelope_total(t[other], gamma);
            }
        }
        tail += outside * others;
    }
    Ok(QuasiValue {
        value,
        tail_bound: umax * tail,
    })
}

fn psi_envelope<T: Real>(t: T, gamma: T) -> T {
    let a = (gamma * t.abs()).sinh();
    if a == T::zero() {
        T::one()
    } else {
        (gamma / T::PI() / a).min(T::one())
    }
}

// Bound on sum_{k >= 0} |Psi factor(s + k)| for the leftover lattice points beyond a window edge.
fn envelope_sum<T: Real>(s: T, gamma: T) -> T {
    let mut total = T::zero();
    let mut k = 0usize;
    loop {
        let e = psi_envelope(s + T::from_count(k), gamma);
        let far = s + T::from_count(k) > T::zero();
        total += e;
        k += 1;
        if (far && e < T::lit(1e-30)) || k > 100_000 {
            break;
        }
    }
    total
}

fn envelope_total<T: Real>(t: T, gamma: T) -> T {
    let f = t.floor();
    envelope_sum(t - f, gamma) + envelope_sum(f + T::one() - t, gamma)
}

/// Parameters of a saturation-coefficient computation in one dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationQuery<T> {
    /// gamma = (eps h)^2.
    pub gamma: T,
    /// Evaluation point in lattice units.
    pub x: T,
    pub beta: u32,
    pub alpha_max: usize,
}

/// Contour and lattice-sum settings for [`saturation_coeffs_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourRule<T> {
    pub nodes: usize,
    /// Defaults to min(1, 0.8 sqrt(pi^2 + gamma^2)).
    pub radius: Option<T>,
    pub lattice_cut: usize,
}

impl<T> Default for ContourRule<T> {
    fn default() -> Self {
        Self {
            nodes: 256,
            radius: None,
            lattice_cut: 30,
        }
    }
}

/// g(xi) = xi^beta - theta_gamma^(beta)(x, xi), the generating function of the saturation
/// coefficients: theta sums (xi + 2 pi n)^beta Psi_hat(xi + 2 pi n) e^(2 pi i x n) over |n| <= cut.
pub fn saturation_function<T: Real>(x: T, xi: Complex<T>, gamma: T, beta: u32, cut: usize) -> Complex<T> {
    let mut acc = xi.powu(beta) * one_minus_psi_hat(xi, gamma);
    for n in 1..=cut {
        acc = acc - lattice_pair(x, xi, gamma, beta, n);
    }
    acc
}

// Terms n and -n of theta; the phase is reduced exactly so symmetric cancellations are exact.
fn lattice_pair<T: Real>(x: T, xi: Complex<T>, gamma: T, beta: u32, n: usize) -> Complex<T> {
    let shift = T::TAU() * T::from_count(n);
    let zp = xi + shift;
    let zm = xi - shift;
    let arg = T::lit(2.0) * x * T::from_count(n);
    let phase = Complex::new(cos_pi(arg), sin_pi(arg));
    zp.powu(beta) * psi_hat_complex(zp, gamma) * phase + zm.powu(beta) * psi_hat_complex(zm, gamma) * phase.conj()
}

/// |a_alpha^(beta)(x)| / alpha! for alpha = 0..=alpha_max, with the default contour rule.
pub fn saturation_coeffs<T: Real>(q: &SaturationQuery<T>) -> Result<Vec<T>> {
    saturation_coeffs_with(q, &ContourRule::default())
}

/// Taylor coefficients of [`saturation_function`] at xi = 0 by the trapezoidal rule on
/// the circle |xi| = rho. The constant term is evaluated directly.
pub fn saturation_coeffs_with<T: Real>(q: &SaturationQuery<T>, rule: &ContourRule<T>) -> Result<Vec<T>> {
    if !(q.gamma > T::zero()) || !q.x.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "saturation query needs gamma > 0 and finite x (got {}, {})",
            q.gamma, q.x
        )));
    }
    let limit = (T::PI() * T::PI() + q.gamma * q.gamma).sqrt();
    let rho = rule
        .radius
        .unwrap_or_else(|| T::one().min(T::lit(0.8) * limit));
    if !(rho > T::zero()) || rho >= limit {
        return Err(Error::ContourRadius {
            rho: rho.as_f64(),
            limit: limit.as_f64(),
        });
    }
    if rule.nodes <= 2 * q.alpha_max + 1 {
        return Err(Error::InvalidParameter(format!(
            "{} contour nodes cannot resolve order {}",
            rule.nodes, q.alpha_max
        )));
    }

    let k = rule.nodes;
    let values: Vec<Complex<T>> = (0..k)
        .map(|j| {
            let theta = T::TAU() * T::from_count(j) / T::from_count(k);
            let z = Complex::from_polar(rho, theta);
            saturation_function(q.x, z, q.gamma, q.beta, rule.lattice_cut)
        })
        .collect();

    let scale = values.iter().fold(T::zero(), |m, v| m.max(v.norm()));
    let mut tail = T::zero();
    for v in [Complex::new(rho, T::zero()), Complex::new(-rho, T::zero())] {
        let next = lattice_pair(q.x, v, q.gamma, q.beta, rule.lattice_cut + 1).norm();
        tail = tail.max(next * T::lit(2.0));
    }
    if tail > T::epsilon() * scale && tail > T::min_positive_value() {
        return Err(Error::Truncation {
            cut: rule.lattice_cut,
            tail: tail.as_f64(),
        });
    }

    let mut out = Vec::with_capacity(q.alpha_max + 1);
    let zero = Complex::new(T::zero(), T::zero());
    out.push(saturation_function(q.x, zero, q.gamma, q.beta, rule.lattice_cut).norm());
    for a in 1..=q.alpha_max {
        let mut acc = zero;
        for (j, v) in values.iter().enumerate() {
            let theta = T::TAU() * T::from_count((a * j) % k) / T::from_count(k);
            acc = acc + *v * Complex::from_polar(T::one(), -theta);
        }
        out.push(acc.norm() / T::from_count(k) / rho.powi(a as i32));
    }
    Ok(out)
}

/// Evaluation point of the Fourier symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolQuery<T> {
    pub h: T,
    pub gamma: T,
    pub alpha: T,
    pub dim: usize,
    /// Frequency in (-pi, pi)^dim.
    pub xi: Vec<T>,
    /// Lattice-sum truncation |j|_inf <= j_cut; chosen automatically when `None`.
    pub j_cut: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolValue<T> {
    pub value: T,
    pub j_cut: usize,
}

/// E_C(h, xi) = sum_j |eta/h|^alpha phi_hat^eps(eta/h) with eta = xi - 2 pi j and eps = sqrt(gamma)/h.
pub fn symbol_collocation<T: Real>(q: &SymbolQuery<T>) -> Result<SymbolValue<T>> {
    validate_symbol(q)?;
    let d = T::from_count(q.dim);
    let norm = (T::PI() / q.gamma).powf(d / T::lit(2.0)) * q.h.powf(d);
    let (alpha, h, four_gamma) = (q.alpha, q.h, T::lit(4.0) * q.gamma);
    lattice_symbol(q, move |r| norm * radial_power(r / h, alpha) * (-r * r / four_gamma).exp())
}

/// E_G(h, xi) = h^(-d) sum_j |eta/h|^alpha |phi_hat^eps(eta/h)|^2.
pub fn symbol_galerkin<T: Real>(q: &SymbolQuery<T>) -> Result<SymbolValue<T>> {
    validate_symbol(q)?;
    let d = T::from_count(q.dim);
    let norm = (T::PI() / q.gamma).powf(d) * q.h.powf(d);
    let (alpha, h, two_gamma) = (q.alpha, q.h, T::lit(2.0) * q.gamma);
    lattice_symbol(q, move |r| norm * radial_power(r / h, alpha) * (-r * r / two_gamma).exp())
}

/// E_phi(xi) = (pi/gamma)^d sum_j e^(-|xi - 2 pi j|^2 / (2 gamma)).
pub fn symbol_gram<T: Real>(q: &SymbolQuery<T>) -> Result<SymbolValue<T>> {
    validate_symbol(q)?;
    let norm = (T::PI() / q.gamma).powi(q.dim as i32);
    let two_gamma = T::lit(2.0) * q.gamma;
    lattice_symbol(q, move |r| norm * (-r * r / two_gamma).exp())
}

fn radial_power<T: Real>(r: T, alpha: T) -> T {
    if alpha == T::zero() {
        T::one()
    } else {
        r.powf(alpha)
    }
}

fn validate_symbol<T: Real>(q: &SymbolQuery<T>) -> Result<()> {
    if q.dim == 0 || q.xi.len() != q.dim {
        return Err(Error::DimensionMismatch {
            expected: q.dim,
            found: q.xi.len(),
        });
    }
    if !(q.h > T::zero()) || !(q.gamma > T::zero()) || !(q.alpha >= T::zero()) {
        return Err(Error::InvalidParameter(
            "symbols need h > 0, gamma > 0 and alpha >= 0".into(),
        ));
    }
    if q.xi.iter().any(|&t| !(t.abs() <= T::PI())) {
        return Err(Error::InvalidParameter("xi must lie in [-pi, pi]^d".into()));
    }
    Ok(())
}

// Sum of term(|xi - 2 pi j|) over |j|_inf <= cut. The term must be radially
// nonincreasing beyond distance pi, which holds for every symbol here.
fn lattice_symbol<T: Real>(q: &SymbolQuery<T>, term: impl Fn(T) -> T) -> Result<SymbolValue<T>> {
    let d = q.dim;
    let shell_sum = |k: usize| -> T {
        let k = k as i64;
        let side = (2 * k + 1) as usize;
        let mut total = T::zero();
        let mut j = vec![0i64; d];
        for flat in 0..side.pow(d as u32) {
            let mut rem = flat;
            for slot in j.iter_mut() {
                *slot = (rem % side) as i64 - k;
                rem /= side;
            }
            if j.iter().map(|v| v.abs()).max().unwrap_or(0) != k {
                continue;
            }
            let r2: T = q
                .xi
                .iter()
                .zip(&j)
                .map(|(&x, &jj)| {
                    let e = x - T::TAU() * T::lit(jj as f64);
                    e * e
                })
                .sum();
            total += term(r2.sqrt());
        }
        total
    };
    // Every point of shell k > cut lies at distance >= (2k - 1) pi from xi.
    let tail_after = |cut: usize| -> T {
        let mut bound = T::zero();
        for k in cut + 1..cut + 60 {
            let count = T::from_count((2 * k + 1).pow(d as u32) - (2 * k - 1).pow(d as u32));
            let r = T::PI() * T::from_count(2 * k - 1);
            bound += count * term(r);
        }
        bound
    };
    let target = T::lit(1e-16);
    let mut sum = shell_sum(0);
    match q.j_cut {
        Some(cut) => {
            for k in 1..=cut {
                sum += shell_sum(k);
            }
            let tail = tail_after(cut);
            if tail > target * sum {
                return Err(Error::Truncation {
                    cut,
                    tail: tail.as_f64(),
                });
            }
            Ok(SymbolValue { value: sum, j_cut: cut })
        }
        None => {
            let mut cut = 0;
            while cut < 1 || tail_after(cut) > target * sum {
                cut += 1;
                if cut > 1000 {
                    return Err(Error::Truncation {
                        cut,
                        tail: tail_after(cut).as_f64(),
                    });
                }
                sum += shell_sum(cut);
            }
            Ok(SymbolValue { value: sum, j_cut: cut })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, Tolerance};
    use std::f64::consts::PI;

    #[test]
    fn psi_cardinality() {
        assert_eq!(psi_gamma(&[0.0f64], 0.36), 1.0);
        for m in [-3.0, -1.0, 1.0, 2.0, 17.0] {
            assert_eq!(psi_gamma(&[m], 0.36), 0.0);
        }
        assert_eq!(psi_gamma(&[0.0, 3.0], 0.25), 0.0);
        let v = psi_gamma(&[0.5f64], 0.36);
        assert!((v - 0.36 / PI / 0.18f64.sinh()).abs() < 1e-16);
    }

    #[test]
    fn psi_hat_at_origin_and_far_out() {
        let g = 0.36f64;
        let c = PI * PI / g;
        let v = psi_gamma_hat(&[0.0], g);
        assert!((v - c.sinh() / (1.0 + c.cosh())).abs() < 1e-15);
        // far out the factor behaves like 2 sinh(c) e^(-pi xi / gamma)
        let xi = 40.0;
        let v = psi_gamma_hat(&[xi], g);
        let asym = ((2.0 * c.sinh()).ln() - PI * xi / g).exp();
        assert!(((v - asym) / asym).abs() < 1e-12);
        // tiny gamma stays finite
        let v: f64 = psi_gamma_hat(&[0.3, -1.0], 1e-3);
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn psi_hat_is_the_transform_of_psi() {
        let g = 0.36f64;
        for xi in [0.0, 1.0, PI, 4.0] {
            let f = |t: f64| 2.0 * psi_gamma(&[t], g) * (xi * t).cos();
            let breaks: Vec<f64> = (1..120).map(|k| k as f64).collect();
            let (v, _) = integrate(f, 0.0, 120.0, &breaks, Tolerance::absolute(1e-13)).unwrap();
            assert!((v - psi_gamma_hat(&[xi], g)).abs() < 1e-8, "xi = {xi}");
        }
    }

    #[test]
    fn quasi_interpolant_reproduces_constants_up_to_saturation() {
        let g = 0.36;
        let h = 0.1;
        let w = LatticeWindow::sample(vec![-150], vec![301], h, |_| 1.0f64).unwrap();
        let at_node = quasi_interpolant(&w, g, h, &[0.3]).unwrap();
        assert!(at_node.window_adequate());
        assert!((at_node.value - 1.0).abs() < 1e-14);
        let off = quasi_interpolant(&w, g, h, &[0.025]).unwrap();
        let gap = (off.value - 1.0).abs();
        assert!((gap - 2.4808e-12).abs() < 1e-15, "{gap:e}");
        let small = LatticeWindow::sample(vec![-5], vec![11], h, |_| 1.0f64).unwrap();
        assert!(!quasi_interpolant(&small, g, h, &[0.0]).unwrap().window_adequate());
    }

    #[test]
    fn table_a1_entries() {
        let q = SaturationQuery {
            gamma: 0.36f64,
            x: 0.25,
            beta: 0,
            alpha_max: 8,
        };
        let c = saturation_coeffs(&q).unwrap();
        assert!(((c[0] - 2.4808e-12) / 2.4808e-12).abs() < 5e-5);
        assert!(((c[8] - 2.0695e-9) / 2.0695e-9).abs() < 5e-5);
        let half = saturation_coeffs(&SaturationQuery { x: 0.5, ..q }).unwrap();
        for a in [1, 3, 5, 7] {
            assert!(half[a] < 1e-20);
        }
    }

    #[test]
    fn saturation_periodic_and_symmetric() {
        for beta in [0, 2] {
            let q = SaturationQuery {
                gamma: 0.36f64,
                x: 0.25,
                beta,
                alpha_max: 6,
            };
            let a = saturation_coeffs(&q).unwrap();
            let b = saturation_coeffs(&SaturationQuery { x: 1.25, ..q }).unwrap();
            let c = saturation_coeffs(&SaturationQuery { x: 0.75, ..q }).unwrap();
            for i in 1..=6 {
                assert!(((a[i] - b[i]) / a[i]).abs() < 1e-10);
                assert!(((a[i] - c[i]) / a[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn contour_refinement_is_stable() {
        let q = SaturationQuery {
            gamma: 0.25f64,
            x: 0.5,
            beta: 2,
            alpha_max: 8,
        };
        let a = saturation_coeffs(&q).unwrap();
        let rule = ContourRule {
            nodes: 512,
            ..ContourRule::default()
        };
        let b = saturation_coeffs_with(&q, &rule).unwrap();
        for i in (0..=8).step_by(2) {
            assert!(((a[i] - b[i]) / a[i]).abs() < 1e-3);
        }
        assert!(((a[2] - 4.2387e-14) / 4.2387e-14).abs() < 5e-5);
    }

    #[test]
    fn saturation_rejects_bad_contour() {
        let q = SaturationQuery {
            gamma: 0.36f64,
            x: 0.25,
            beta: 0,
            alpha_max: 4,
        };
        let rule = ContourRule {
            radius: Some(3.2),
            ..ContourRule::default()
        };
        assert!(matches!(
            saturation_coeffs_with(&q, &rule),
            Err(Error::ContourRadius { .. })
        ));
        let rule = ContourRule {
            lattice_cut: 0,
            ..ContourRule::default()
        };
        assert!(matches!(
            saturation_coeffs_with(&SaturationQuery { gamma: 9.0, ..q }, &rule),
            Err(Error::Truncation { .. })
        ));
    }

    fn query(alpha: f64, dim: usize, xi: Vec<f64>) -> SymbolQuery<f64> {
        SymbolQuery {
            h: 0.1,
            gamma: 0.25,
            alpha,
            dim,
            xi,
            j_cut: None,
        }
    }

    #[test]
    fn collocation_symbol_at_origin() {
        let q = SymbolQuery {
            j_cut: Some(20),
            ..query(0.0, 1, vec![0.0])
        };
        let v = symbol_collocation(&q).unwrap().value;
        let lead = (PI / 0.25f64).sqrt() * 0.1;
        let rest: f64 = (1..=20)
            .map(|j| 2.0 * lead * (-(2.0 * PI * j as f64).powi(2) / 1.0).exp())
            .sum();
        assert!(((v - lead - rest) / v).abs() < 1e-15);
        assert!(rest < 1e-16 * lead * 1e4);
    }

    #[test]
    fn gram_symbol_symmetric_at_pi() {
        let q = query(0.0, 1, vec![PI]);
        let v = symbol_gram(&q).unwrap();
        let pair = 2.0 * (PI / 0.25) * (-(PI * PI) / 0.5f64).exp();
        assert!(((v.value - pair) / v.value).abs() < 1e-12);
        assert!(v.j_cut >= 1);
    }

    #[test]
    fn comparison_inequality_small_grid() {
        for d in [1, 2] {
            for k in 0..11 {
                let t = -PI + 2.0 * PI * k as f64 / 10.0;
                let xi = vec![t; d];
                let q = query(1.0, d, xi);
                let ec = symbol_collocation(&q).unwrap().value;
                let eg = symbol_galerkin(&q).unwrap().value;
                assert!(ec - (0.25 / PI).powf(d as f64 / 2.0) * eg >= 0.0);
            }
        }
    }

    #[test]
    fn explicit_cut_is_certified() {
        let q = SymbolQuery {
            gamma: 4.0,
            j_cut: Some(1),
            ..query(1.0, 1, vec![0.5])
        };
        assert!(matches!(symbol_collocation(&q), Err(Error::Truncation { .. })));
    }
}
