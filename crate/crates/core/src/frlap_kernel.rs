//! Fractional Laplacian of the Gaussian RBF in closed form.

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};
use crate::scalar::Real;
use crate::specfun::{kummer_1f1, ln_gamma, recip_gamma, SeriesControl};

/// Order alpha of (-Delta)^(alpha/2) together with the spatial dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder<T> {
    alpha: T,
    dim: usize,
}

impl<T: Real> FracOrder<T> {
    /// Accepts 0 <= alpha <= 2; alpha = 0 is the identity and alpha = 2 the Laplacian.
    pub fn new(alpha: T, dim: usize) -> Result<Self> {
        if !(alpha >= T::zero() && alpha <= T::lit(2.0)) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in [0, 2], got {alpha}"
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        Ok(Self { alpha, dim })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn half_dim(&self) -> T {
        T::from_count(self.dim) / T::lit(2.0)
    }
}

/// A Gaussian e^(-eps^2 |x - center|^2).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianRbf<T> {
    pub center: Vec<T>,
    pub eps: T,
}

impl<T: Real> GaussianRbf<T> {
    pub fn new(center: Vec<T>, eps: T) -> Result<Self> {
        if !(eps > T::zero()) {
            return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
        }
        Ok(Self { center, eps })
    }

    pub fn value(&self, x: &[T]) -> T {
        (-self.eps * self.eps * dist2(x, &self.center)).exp()
    }

    pub fn frlap(&self, order: FracOrder<T>, x: &[T]) -> Result<T> {
        frlap_gaussian(order, self.eps, dist2(x, &self.center).sqrt())
    }
}

pub(crate) fn dist2<T: Real>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).map(|(&a, &b)| (a - b) * (a - b)).sum()
}

/// 2^alpha Gamma((d+alpha)/2) / Gamma(d/2) eps^alpha.
pub fn frlap_prefactor<T: Real>(order: FracOrder<T>, eps: T) -> T {
    let a = order.half_dim() + order.alpha / T::lit(2.0);
    let b = order.half_dim();
    let log = order.alpha * (T::LN_2() + eps.ln())
        + ln_gamma(a).expect("positive argument")
        - ln_gamma(b).expect("positive argument");
    log.exp()
}

/// (-Delta)^(alpha/2) e^(-eps^2 |x|^2) evaluated at |x| = r.
pub fn frlap_gaussian<T: Real>(order: FracOrder<T>, eps: T, r: T) -> Result<T> {
    frlap_gaussian_with(order, eps, r, SeriesControl::default())
}

pub fn frlap_gaussian_with<T: Real>(
    order: FracOrder<T>,
    eps: T,
    r: T,
    ctrl: SeriesControl<T>,
) -> Result<T> {
    if !(eps > T::zero()) || !(r >= T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "frlap_gaussian needs eps > 0 and r >= 0 (got {eps}, {r})"
        )));
    }
    let a = order.half_dim() + order.alpha / T::lit(2.0);
    let b = order.half_dim();
    let z = -(eps * r) * (eps * r);
    Ok(frlap_prefactor(order, eps) * kummer_1f1(a, b, z, ctrl)?)
}

/// Normalizing constant C_{d,alpha} of the hypersingular integral form,
/// 2^(alpha-1) alpha Gamma((alpha+d)/2) / (pi^(d/2) Gamma(1 - alpha/2)).
///
/// Vanishes at alpha = 0 and alpha = 2, where the operator is local.
pub fn frac_laplacian_constant<T: Real>(order: FracOrder<T>) -> T {
    let alpha = order.alpha;
    if alpha == T::zero() {
        return T::zero();
    }
    let two = T::lit(2.0);
    let g = ln_gamma((alpha + T::from_count(order.dim)) / two).expect("positive argument");
    let log = (alpha - T::one()) * T::LN_2() + alpha.ln() + g - order.half_dim() * T::PI().ln();
    log.exp() * recip_gamma(T::one() - alpha / two)
}

/// Reference value of frlap_gaussian from the inverse Fourier integral of
/// |xi|^alpha phi_hat(xi), with phi_hat(xi) = pi^(d/2) eps^(-d) e^(-|xi|^2 / (4 eps^2)).
///
/// In one dimension this is (1/pi) int_0^inf rho^alpha phi_hat(rho) cos(r rho) d rho. For
/// d >= 2 the transverse directions are integrated first, which avoids Bessel functions:
/// the integrand becomes cos(r s) times |S^(d-2)| int_0^inf t^(d-2) F(sqrt(s^2 + t^2)) dt.
pub fn frlap_oracle_fourier<T: Real>(order: FracOrder<T>, eps: T, r: T, quad_tol: T) -> Result<T> {
    if !(eps > T::zero()) || !(r >= T::zero()) || !(quad_tol > T::zero()) {
        return Err(Error::InvalidParameter(
            "oracle needs eps > 0, r >= 0 and quad_tol > 0".into(),
        ));
    }
    let d = order.dim;
    let df = T::from_count(d);
    let alpha = order.alpha;
    let four_eps2 = T::lit(4.0) * eps * eps;
    let norm = T::PI().powf(df / T::lit(2.0)) / eps.powi(d as i32);
    let symbol = move |rho: T| -> T {
        let power = if alpha == T::zero() { T::one() } else { rho.powf(alpha) };
        power * norm * (-rho * rho / four_eps2).exp()
    };

    // Truncation radius: e^(-X^2/(4 eps^2)) X^(alpha+d-1) below quad_tol / 10 relative to the norm.
    let target = quad_tol / T::lit(10.0);
    let mut cut = T::lit(2.0) * eps;
    while (-cut * cut / four_eps2).exp() * cut.powf(alpha + df) * norm > target {
        cut *= T::lit(1.25);
    }
    let tol = Tolerance::absolute(quad_tol / T::lit(4.0));

    // Split the oscillatory range at multiples of the half period.
    let breaks = oscillation_breaks(r, cut);
    let radial = if d == 1 {
        integrate(|s| symbol(s) * (r * s).cos(), T::zero(), cut, &breaks, tol)?.0
    } else {
        let sphere = T::lit(2.0) * T::PI().powf((df - T::one()) / T::lit(2.0))
            / crate::specfun::gamma((df - T::one()) / T::lit(2.0))?;
        let inner_tol = Tolerance::absolute(quad_tol / (T::lit(8.0) * cut.max(T::one())));
        let transverse = |s: T| -> T {
            let f = |t: T| {
                let rho = (s * s + t * t).sqrt();
                t.powi(d as i32 - 2) * symbol(rho)
            };
            let upper = (cut * cut - s * s).max(T::zero()).sqrt();
            if upper == T::zero() {
                return T::zero();
            }
            match integrate(f, T::zero(), upper, &[], inner_tol) {
                Ok((v, _)) => v,
                Err(_) => T::nan(),
            }
        };
        let v = integrate(|s| sphere * transverse(s) * (r * s).cos(), T::zero(), cut, &breaks, tol)?.0;
        if !v.is_finite() {
            return Err(Error::Quadrature {
                estimate: v.as_f64(),
                error: f64::INFINITY,
            });
        }
        v
    };
    // (2 pi)^(-d) times 2 from folding s onto [0, inf).
    Ok(radial * T::lit(2.0) / T::TAU().powi(d as i32))
}

fn oscillation_breaks<T: Real>(r: T, cut: T) -> Vec<T> {
    if r == T::zero() {
        return Vec::new();
    }
    let step = T::PI() / r;
    let count = (cut / step).floor().to_usize().unwrap_or(0).min(4000);
    (1..=count).map(|k| step * T::from_count(k)).collect()
}
