//! Nonhomogeneous extended Dirichlet data by an auxiliary Gaussian fit on a boundary collar.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::assembly::{assemble_dense, StiffnessOperator};
use crate::error::{Error, Result};
use crate::frlap_kernel::{dist2, frac_laplacian_constant, frlap_gaussian, FracOrder};
use crate::lattice::{lattice_points_where, Domain, LatticeGrid, PointSet};
use crate::quadrature::gauss_legendre;
use crate::scalar::Real;
use crate::solver::{solve, Evaluate, RbfSolution, SolveOptions, SolveReport};
use crate::specfun::gamma;

/// Closed collar of the given width around an interval or box domain, with the
/// lattice of fit centers (spacing `fit_h`, anchored at the domain's lower corner).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryLayer<T> {
    lo: Vec<T>,
    hi: Vec<T>,
    width: T,
    fit_h: T,
    fit_eps: T,
}

impl<T: Real> BoundaryLayer<T> {
    pub fn collar(domain: &Domain<T>, width: T, fit_h: T, fit_eps: T) -> Result<Self> {
        if matches!(domain, Domain::Disk { .. }) {
            return Err(Error::InvalidParameter(
                "boundary collars are implemented for intervals and boxes only".into(),
            ));
        }
        if !(width > T::zero()) || !(fit_h > T::zero()) || !(fit_eps > T::zero()) {
            return Err(Error::InvalidParameter(
                "collar width, fit spacing and fit eps must be positive".into(),
            ));
        }
        let (lo, hi) = domain.bounding_box();
        Ok(Self {
            lo,
            hi,
            width,
            fit_h,
            fit_eps,
        })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn width(&self) -> T {
        self.width
    }

    pub fn fit_h(&self) -> T {
        self.fit_h
    }

    pub fn fit_eps(&self) -> T {
        self.fit_eps
    }

    /// Sup-norm signed distance outside the inner box (negative inside).
    fn excess(&self, x: &[T]) -> T {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(x)
            .map(|((&l, &h), &xi)| (l - xi).max(xi - h))
            .fold(T::neg_infinity(), T::max)
    }

    fn tolerance(&self) -> T {
        T::lit(1e-12) * (self.width + self.diameter())
    }

    fn diameter(&self) -> T {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| (h - l) * (h - l))
            .sum::<T>()
            .sqrt()
    }

    /// Membership in the closed collar.
    pub fn contains(&self, x: &[T]) -> bool {
        let e = self.excess(x);
        let tol = self.tolerance();
        e >= -tol && e <= self.width + tol
    }

    fn outer_box(&self, extra: T) -> (Vec<T>, Vec<T>) {
        let grow = self.width + extra;
        (
            self.lo.iter().map(|&l| l - grow).collect(),
            self.hi.iter().map(|&h| h + grow).collect(),
        )
    }

    fn points_with_step(&self, step: T) -> PointSet<T> {
        let (lo, hi) = self.outer_box(T::zero());
        let (_, coords) = lattice_points_where(&lo, &hi, &self.lo, step, |x| self.contains(x));
        PointSet::new(self.dim(), coords).expect("consistent dimension")
    }

    pub fn fit_centers(&self) -> PointSet<T> {
        self.points_with_step(self.fit_h)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryFit<T> {
    pub centers: PointSet<T>,
    pub eps: T,
    pub lambda: Vec<T>,
    pub fit_rms: T,
}

impl<T: Real> AuxiliaryFit<T> {
    /// w_h(x) = sum_l lambda_l e^(-eps^2 |x - x_l|^2).
    pub fn value(&self, x: &[T]) -> T {
        let e2 = self.eps * self.eps;
        let cutoff = T::lit(745.0);
        self.centers
            .iter()
            .zip(&self.lambda)
            .map(|(c, &l)| {
                let q = e2 * dist2(x, c);
                if q > cutoff {
                    T::zero()
                } else {
                    l * (-q).exp()
                }
            })
            .sum()
    }

    /// (-Delta)^(alpha/2) w_h at x, from the closed form.
    pub fn frlap(&self, order: FracOrder<T>, x: &[T]) -> Result<T> {
        let mut total = T::zero();
        for (c, &l) in self.centers.iter().zip(&self.lambda) {
            if l != T::zero() {
                total += l * frlap_gaussian(order, self.eps, dist2(x, c).sqrt())?;
            }
        }
        Ok(total)
    }
}

/// Fits w_h to g by interpolation at the collar centers, then measures the RMS misfit
/// on the collar at spacing fit_h / 4.
pub fn fit_auxiliary<T: Real>(
    g: impl Fn(&[T]) -> T + Sync,
    layer: &BoundaryLayer<T>,
    tol: T,
) -> Result<AuxiliaryFit<T>> {
    let centers = layer.fit_centers();
    let m = centers.len();
    let rhs: Vec<T> = centers.iter().map(&g).collect();
    if let Some(bad) = rhs.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "boundary datum is not finite at fit center {bad}"
        )));
    }
    let e2 = layer.fit_eps * layer.fit_eps;
    let gram = DMatrix::from_fn(m, m, |j, k| (-e2 * dist2(centers.point(j), centers.point(k))).exp());
    let lambda = if rhs.iter().all(|&v| v == T::zero()) {
        vec![T::zero(); m]
    } else {
        let lu = T::lu_factor(gram.clone());
        T::lu_solve(&lu, &rhs).ok_or(Error::Singular)?
    };
    let mut fit = AuxiliaryFit {
        centers,
        eps: layer.fit_eps,
        lambda,
        fit_rms: T::zero(),
    };
    let probe = layer.points_with_step(layer.fit_h / T::lit(4.0));
    let dim = probe.dim();
    let sum: T = probe
        .coords()
        .par_chunks(dim)
        .map(|x| {
            let e = fit.value(x) - g(x);
            e * e
        })
        .collect::<Vec<T>>()
        .into_iter()
        .sum();
    fit.fit_rms = (sum / T::from_count(probe.len())).sqrt();
    if !(fit.fit_rms <= tol) {
        let sv = T::symmetric_singular_values(gram);
        let max = sv.iter().copied().fold(T::zero(), T::max);
        let min = sv.iter().copied().fold(T::infinity(), T::min);
        return Err(Error::FitTolerance {
            achieved: fit.fit_rms.as_f64(),
            tol: tol.as_f64(),
            condition: (max / min).as_f64(),
        });
    }
    Ok(fit)
}

/// Settings for the correction integral over the exterior of the collar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionQuad<T> {
    /// Gauss-Legendre points per panel and axis.
    pub panel_order: usize,
    /// Divides every panel size; 1 is the default grading.
    pub panel_refine: usize,
    /// Starting truncation offset beyond the collar; defaults to 4 diam(domain).
    pub radius: Option<T>,
    pub max_radius: T,
    /// |w_h - g|(y) <= decay_constant |y|^(-decay_p) far away.
    pub decay_p: T,
    pub decay_constant: T,
    pub tol: T,
}

impl<T: Real> CorrectionQuad<T> {
    pub fn new(decay_p: T) -> Self {
        Self {
            panel_order: 12,
            panel_refine: 1,
            radius: None,
            max_radius: T::lit(1e12),
            decay_p,
            decay_constant: T::one(),
            tol: T::lit(1e-10),
        }
    }
}

/// Precomputed nodes, weights and values w_h - g of the correction integral,
/// shared by all interior evaluation points.
#[derive(Debug, Clone)]
pub struct CorrectionRule<T> {
    nodes: PointSet<T>,
    weights: Vec<T>,
    values: Vec<T>,
    radius: T,
    tail_bound: T,
    order: FracOrder<T>,
    constant: T,
}

fn sphere_area<T: Real>(d: usize) -> Result<T> {
    let half = T::from_count(d) / T::lit(2.0);
    Ok(T::lit(2.0) * T::PI().powf(half) / gamma(half)?)
}

// Tensor Gauss-Legendre nodes on a box subdivided into cells of about `size`.
fn panel_box<T: Real>(
    lo: &[T],
    hi: &[T],
    size: T,
    gl: &(Vec<T>, Vec<T>),
    nodes: &mut Vec<T>,
    weights: &mut Vec<T>,
) {
    let dim = lo.len();
    let counts: Vec<usize> = lo
        .iter()
        .zip(hi)
        .map(|(&l, &h)| ((h - l) / size).ceil().to_usize().unwrap_or(1).max(1))
        .collect();
    let q = gl.0.len();
    let cells: usize = counts.iter().product();
    let per_cell = q.pow(dim as u32);
    for cell in 0..cells {
        let mut rem = cell;
        let mut cell_lo = vec![T::zero(); dim];
        let mut cell_w = vec![T::zero(); dim];
        for a in (0..dim).rev() {
            let i = rem % counts[a];
            rem /= counts[a];
            let w = (hi[a] - lo[a]) / T::from_count(counts[a]);
            cell_lo[a] = lo[a] + w * T::from_count(i);
            cell_w[a] = w;
        }
        for node in 0..per_cell {
            let mut rem = node;
            let mut weight = T::one();
            for a in (0..dim).rev() {
                let i = rem % q;
                rem /= q;
                let half = cell_w[a] / T::lit(2.0);
                nodes.push(cell_lo[a] + half * (gl.0[i] + T::one()));
                weight *= half * gl.1[i];
            }
            // coordinates were pushed last axis first
            let start = nodes.len() - dim;
            nodes[start..].reverse();
            weights.push(weight);
        }
    }
}

// Shell between the box grown by t0 and by t1, split into 2d disjoint slabs.
fn shell_slabs<T: Real>(layer: &BoundaryLayer<T>, t0: T, t1: T) -> Vec<(Vec<T>, Vec<T>)> {
    let (ilo, ihi) = layer.outer_box(t0);
    let (olo, ohi) = layer.outer_box(t1);
    let dim = layer.dim();
    let mut out = Vec::with_capacity(2 * dim);
    for a in 0..dim {
        for side in 0..2 {
            let mut lo = Vec::with_capacity(dim);
            let mut hi = Vec::with_capacity(dim);
            for b in 0..dim {
                if b == a {
                    if side == 0 {
                        lo.push(olo[b]);
                        hi.push(ilo[b]);
                    } else {
                        lo.push(ihi[b]);
                        hi.push(ohi[b]);
                    }
                } else if b < a {
                    lo.push(ilo[b]);
                    hi.push(ihi[b]);
                } else {
                    lo.push(olo[b]);
                    hi.push(ohi[b]);
                }
            }
            out.push((lo, hi));
        }
    }
    out
}

impl<T: Real> CorrectionRule<T> {
    /// Builds graded panels over the exterior of the collar out to a truncation offset R,
    /// doubling R until the analytic tail bound falls below tol / 10.
    pub fn build(
        fit: &AuxiliaryFit<T>,
        g: impl Fn(&[T]) -> T + Sync,
        layer: &BoundaryLayer<T>,
        order: FracOrder<T>,
        quad: &CorrectionQuad<T>,
    ) -> Result<Self> {
        let dim = layer.dim();
        if order.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: order.dim(),
            });
        }
        let constant = frac_laplacian_constant(order);
        let alpha = order.alpha();
        let d = T::from_count(dim);
        // interior points satisfy |x| <= a; the tail region lies beyond |y - c| >= R
        let center: Vec<T> = layer.lo.iter().zip(&layer.hi).map(|(&l, &h)| (l + h) / T::lit(2.0)).collect();
        let c_norm = center.iter().map(|&c| c * c).sum::<T>().sqrt();
        let a = layer
            .lo
            .iter()
            .zip(&layer.hi)
            .map(|(&l, &h)| l.abs().max(h.abs()).powi(2))
            .sum::<T>()
            .sqrt();
        let area = sphere_area::<T>(dim)?;
        let tail_bound = |radius: T| -> T {
            let r0 = radius - c_norm;
            if !(r0 > a) {
                return T::infinity();
            }
            let ratio = (r0 / (r0 - a)).powf(d + alpha);
            constant * quad.decay_constant * area * ratio * r0.powf(-quad.decay_p - alpha)
                / (quad.decay_p + alpha)
        };
        let mut radius = quad.radius.unwrap_or(T::lit(4.0) * layer.diameter());
        let target = quad.tol / T::lit(10.0);
        while tail_bound(radius) > target {
            if radius > quad.max_radius {
                return Err(Error::TailTooLarge {
                    radius: radius.as_f64(),
                    bound: tail_bound(radius).as_f64(),
                    tol: quad.tol.as_f64(),
                });
            }
            radius *= T::lit(2.0);
        }
        if alpha == T::zero() || constant == T::zero() {
            radius = T::zero();
        }

        // reach of the Gaussian part of w_h beyond the collar
        let lam_max = fit.lambda.iter().fold(T::zero(), |m, &l| m.max(l.abs()));
        let reach = if lam_max > T::zero() {
            (lam_max / T::lit(1e-18)).ln().max(T::zero()).sqrt() / fit.eps
        } else {
            T::zero()
        };
        let gl = gauss_legendre::<T>(quad.panel_order);
        let refine = T::from_count(quad.panel_refine.max(1));
        let mut coords = Vec::new();
        let mut weights = Vec::new();
        let mut t0 = T::zero();
        let mut width = layer.width;
        while t0 < radius {
            let mut t1 = (t0 + width).min(radius);
            let mut size = width;
            if t0 < reach {
                // w_h is cut off at the reach, so no panel straddles it
                t1 = t1.min(reach);
                size = size.min(T::lit(2.0) / fit.eps);
            }
            size /= refine;
            for (lo, hi) in shell_slabs(layer, t0, t1) {
                panel_box(&lo, &hi, size, &gl, &mut coords, &mut weights);
            }
            t0 = t1;
            width *= T::lit(2.0);
        }
        let nodes = PointSet::new(dim, coords)?;
        let (box_lo, box_hi) = layer.outer_box(T::zero());
        let values: Vec<T> = nodes
            .coords()
            .par_chunks(dim)
            .map(|y| {
                // sup distance beyond the fit-center box
                let out = box_lo
                    .iter()
                    .zip(&box_hi)
                    .zip(y)
                    .map(|((&l, &h), &v)| (l - v).max(v - h).max(T::zero()))
                    .fold(T::zero(), T::max);
                let w = if out > reach { T::zero() } else { fit.value(y) };
                w - g(y)
            })
            .collect();
        Ok(Self {
            nodes,
            weights,
            values,
            radius,
            tail_bound: tail_bound(radius.max(T::lit(4.0) * layer.diameter())),
            order,
            constant,
        })
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn tail_bound(&self) -> T {
        self.tail_bound
    }

    pub fn node_count(&self) -> usize {
        self.weights.len()
    }

    /// C_{d,alpha} times the integral of (w_h - g)(y) |y - x|^(-d-alpha) over the panels.
    pub fn correction(&self, x: &[T]) -> T {
        if self.constant == T::zero() {
            return T::zero();
        }
        let expo = -(T::from_count(self.order.dim()) + self.order.alpha()) / T::lit(2.0);
        let sum: T = self
            .nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.values)
            .map(|((y, &w), &v)| w * v * dist2(x, y).powf(expo))
            .sum();
        self.constant * sum
    }
}

/// (-Delta)^(alpha/2) w at x, where w equals w_h on the domain and collar and g beyond.
pub fn frlap_w_with_rule<T: Real>(fit: &AuxiliaryFit<T>, rule: &CorrectionRule<T>, x: &[T]) -> Result<T> {
    Ok(fit.frlap(rule.order, x)? + rule.correction(x))
}

/// One-off evaluation of (-Delta)^(alpha/2) w; builds the correction rule internally.
pub fn frlap_w<T: Real>(
    fit: &AuxiliaryFit<T>,
    g: impl Fn(&[T]) -> T + Sync,
    layer: &BoundaryLayer<T>,
    order: FracOrder<T>,
    quad: &CorrectionQuad<T>,
    x: &[T],
) -> Result<T> {
    let rule = CorrectionRule::build(fit, g, layer, order, quad)?;
    frlap_w_with_rule(fit, &rule, x)
}

/// u = v + w_h on the closed domain.
#[derive(Debug, Clone)]
pub struct NonhomogeneousSolution<T: Real> {
    pub v: RbfSolution<T>,
    pub fit: AuxiliaryFit<T>,
    pub report: SolveReport<T>,
}

impl<T: Real> Evaluate<T> for NonhomogeneousSolution<T> {
    fn spacing(&self) -> T {
        self.v.grid.h()
    }

    fn evaluate_at(&self, x: &[T]) -> T {
        self.v.value(x) + self.fit.value(x)
    }
}

/// Boundary-layer configuration for a nonhomogeneous run.
#[derive(Debug, Clone)]
pub struct BoundarySetup<T> {
    pub layer: BoundaryLayer<T>,
    pub quad: CorrectionQuad<T>,
    pub fit_tol: T,
}

/// Stage one fits w_h to g, stage two solves for v with right-hand side f - (-Delta)^(alpha/2) w.
#[allow(clippy::too_many_arguments)]
pub fn solve_nonhomogeneous<T: Real>(
    f: impl Fn(&[T]) -> T + Sync,
    g: impl Fn(&[T]) -> T + Sync,
    order: FracOrder<T>,
    setup: &BoundarySetup<T>,
    grid: &LatticeGrid<T>,
    c_star: T,
    opts: &SolveOptions<T>,
) -> Result<NonhomogeneousSolution<T>> {
    let fit = fit_auxiliary(&g, &setup.layer, setup.fit_tol)?;
    let eps = c_star / grid.h();
    let stiffness = StiffnessOperator::Dense(assemble_dense(grid, order, eps)?);
    let rule = CorrectionRule::build(&fit, &g, &setup.layer, order, &setup.quad)?;
    let dim = grid.dim();
    let rhs: Vec<Result<T>> = grid
        .points()
        .coords()
        .par_chunks(dim)
        .map(|x| {
            Ok(f(x) - frlap_w_with_rule(&fit, &rule, x)?)
        })
        .collect();
    let rhs: Vec<T> = rhs.into_iter().collect::<Result<_>>()?;
    let (v, report) = solve(&stiffness, &rhs, opts)?;
    Ok(NonhomogeneousSolution { v, fit, report })
}
