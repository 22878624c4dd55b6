//! Brute-force (-Delta)^(alpha/2) u(x) from the hypersingular integral, for checking
//! closed-form right-hand sides.
//!
//! With C = C_{d,alpha} the operator is C int_0^inf D(r) r^(-1-alpha) dr, where D(r) is the
//! symmetrized second difference 2u(x) - u(x + r e) - u(x - r e) integrated over directions
//! e in a half sphere. Three pieces are summed: a Taylor term on (0, delta), adaptive
//! quadrature on (delta, far) and the substitution r = far/s on (far, inf).

use crate::error::{Error, Result};
use crate::frlap_kernel::{frac_laplacian_constant, FracOrder};
use crate::quadrature::{integrate, Tolerance};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions<T> {
    /// Radius of the Taylor-expanded core.
    pub delta: T,
    /// Step of the central differences used for the second derivatives.
    pub fd_step: T,
    /// Minimum start of the far field; moved out past every kink automatically.
    pub far: T,
    pub abs_tol: T,
}

impl<T: Real> Default for OracleOptions<T> {
    fn default() -> Self {
        Self {
            delta: T::lit(1e-4),
            fd_step: T::lit(1e-4),
            far: T::lit(4.0),
            abs_tol: T::lit(1e-9),
        }
    }
}

/// (-Delta)^(alpha/2) u at x for d = 1 or 2. `kinks` lists radii of origin-centred spheres
/// across which u is not smooth; they become quadrature breakpoints.
pub fn hypersingular<T: Real, U: Fn(&[T]) -> T>(
    u: U,
    order: FracOrder<T>,
    x: &[T],
    kinks: &[T],
    opts: &OracleOptions<T>,
) -> Result<T> {
    if x.len() != order.dim() {
        return Err(Error::DimensionMismatch {
            expected: order.dim(),
            found: x.len(),
        });
    }
    let alpha = order.alpha();
    if !(alpha > T::zero() && alpha < T::lit(2.0)) {
        return Err(Error::InvalidParameter(format!(
            "the hypersingular form needs 0 < alpha < 2, got {alpha}"
        )));
    }
    let c = frac_laplacian_constant(order);
    let xnorm = x.iter().map(|&v| v * v).sum::<T>().sqrt();
    let reach = kinks.iter().fold(T::zero(), |m, &k| m.max(k));
    let far = opts.far.max(T::lit(2.0) * (xnorm + reach));
    let raw = match order.dim() {
        1 => one_dim(&u, alpha, x[0], kinks, far, opts)?,
        2 => two_dim(&u, alpha, [x[0], x[1]], kinks, far, opts)?,
        d => {
            return Err(Error::InvalidParameter(format!(
                "oracle implemented for d = 1, 2 only (got {d})"
            )))
        }
    };
    Ok(c * raw)
}

fn one_dim<T: Real, U: Fn(&[T]) -> T>(u: &U, alpha: T, x: T, kinks: &[T], far: T, opts: &OracleOptions<T>) -> Result<T> {
    let two = T::lit(2.0);
    let at = |y: T| u(&[y]);
    let u0 = at(x);
    let step = opts.fd_step;
    let second = (at(x + step) - two * u0 + at(x - step)) / (step * step);
    let core = -second * opts.delta.powf(two - alpha) / (two - alpha);

    let mut breaks = Vec::new();
    for &k in kinks {
        for p in [k - x, -k - x, x - k, x + k] {
            if p > opts.delta && p < far {
                breaks.push(p);
            }
        }
    }
    let tol = Tolerance::absolute(opts.abs_tol / T::lit(4.0));
    let mid = integrate(
        |t: T| (two * u0 - at(x + t) - at(x - t)) * t.powf(-T::one() - alpha),
        opts.delta,
        far,
        &breaks,
        tol,
    )?
    .0;

    let outer = integrate(
        |s: T| {
            if s == T::zero() {
                return T::zero();
            }
            let t = far / s;
            (at(x + t) + at(x - t)) * s.powf(alpha - T::one())
        },
        T::zero(),
        T::one(),
        &[],
        tol,
    )?
    .0;
    let tail = far.powf(-alpha) * (two * u0 / alpha - outer);
    Ok(core + mid + tail)
}

fn two_dim<T: Real, U: Fn(&[T]) -> T>(
    u: &U,
    alpha: T,
    x: [T; 2],
    kinks: &[T],
    far: T,
    opts: &OracleOptions<T>,
) -> Result<T> {
    let two = T::lit(2.0);
    let pi = T::PI();
    let u0 = u(&x);
    let step = opts.fd_step;
    let lap = (u(&[x[0] + step, x[1]]) + u(&[x[0] - step, x[1]]) + u(&[x[0], x[1] + step]) + u(&[x[0], x[1] - step])
        - T::lit(4.0) * u0)
        / (step * step);
    let core = -pi / two * lap * opts.delta.powf(two - alpha) / (two - alpha);

    let xnorm = (x[0] * x[0] + x[1] * x[1]).sqrt();
    let phi = x[1].atan2(x[0]);
    let inner_tol = Tolerance::absolute(opts.abs_tol * T::lit(1e-6)).with_rel(T::lit(1e-12));
    // int_0^pi (u(x + r e) + u(x - r e)) d theta
    let ring = |r: T| -> T {
        let mut breaks = Vec::new();
        if xnorm > T::zero() {
            for &k in kinks {
                let q = (k * k - xnorm * xnorm - r * r) / (two * r * xnorm);
                if q.abs() < T::one() {
                    let a = q.acos();
                    for theta in [phi + a, phi - a] {
                        let t = theta - pi * (theta / pi).floor();
                        breaks.push(t);
                    }
                }
            }
        }
        let f = |theta: T| {
            let (s, c) = theta.sin_cos();
            u(&[x[0] + r * c, x[1] + r * s]) + u(&[x[0] - r * c, x[1] - r * s])
        };
        match integrate(f, T::zero(), pi, &breaks, inner_tol) {
            Ok((v, _)) => v,
            Err(_) => T::nan(),
        }
    };

    let mut breaks = Vec::new();
    for &k in kinks {
        for p in [(k - xnorm).abs(), k + xnorm] {
            if p > opts.delta && p < far {
                breaks.push(p);
            }
        }
    }
    let tol = Tolerance::absolute(opts.abs_tol / T::lit(4.0));
    let mid = integrate(
        |r: T| (two * pi * u0 - ring(r)) * r.powf(-T::one() - alpha),
        opts.delta,
        far,
        &breaks,
        tol,
    )?
    .0;
    let outer = integrate(
        |s: T| {
            if s == T::zero() {
                return T::zero();
            }
            ring(far / s) * s.powf(alpha - T::one())
        },
        T::zero(),
        T::one(),
        &[],
        tol,
    )?
    .0;
    let total = core + mid + far.powf(-alpha) * (two * pi * u0 / alpha - outer);
    if !total.is_finite() {
        return Err(Error::Quadrature {
            estimate: total.as_f64(),
            error: f64::INFINITY,
        });
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frlap_kernel::frlap_gaussian;

    #[test]
    fn gaussian_one_dim() {
        for alpha in [0.4, 1.0, 1.5] {
            let order = FracOrder::new(alpha, 1).unwrap();
            for x in [0.0f64, 0.3, 1.1] {
                let v = hypersingular(|y: &[f64]| (-y[0] * y[0]).exp(), order, &[x], &[], &OracleOptions::default()).unwrap();
                let w = frlap_gaussian(order, 1.0, x.abs()).unwrap();
                assert!((v - w).abs() < 1e-8, "alpha {alpha} x {x}: {v} vs {w}");
            }
        }
    }

    #[test]
    fn gaussian_two_dim() {
        for alpha in [0.4, 1.5] {
            let order = FracOrder::new(alpha, 2).unwrap();
            let x = [0.3f64, -0.2];
            let v = hypersingular(
                |y: &[f64]| (-(y[0] * y[0] + y[1] * y[1])).exp(),
                order,
                &x,
                &[],
                &OracleOptions::default(),
            )
            .unwrap();
            let w = frlap_gaussian(order, 1.0, (0.13f64).sqrt()).unwrap();
            assert!((v - w).abs() < 1e-8, "alpha {alpha}: {v} vs {w}");
        }
    }
}
