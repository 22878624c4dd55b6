//! Linear solves, evaluation of the ansatz, RMS errors and condition numbers.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::assembly::{LinearOperator, StiffnessOperator, ToeplitzStiffness};
use crate::error::{Error, Result};
use crate::frlap_kernel::dist2;
use crate::lattice::{evaluation_grid, Domain, LatticeGrid, PointSet};
use crate::scalar::Real;

/// Largest system handled by dense factorization or full eigendecomposition.
pub const DENSE_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    /// Direct up to [`DENSE_LIMIT`] unknowns, CG above.
    Auto,
    Direct,
    Cg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Direct,
    Cg,
    /// CG restarted as MINRES after meeting non-positive curvature.
    Minres,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionMode {
    ExactSvd,
    Estimate,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions<T> {
    pub tol: T,
    pub solver: SolverChoice,
    pub max_iterations: Option<usize>,
    /// Circulant preconditioner for CG on Toeplitz operators.
    pub preconditioner: bool,
    pub condition: Option<ConditionMode>,
}

impl<T: Real> Default for SolveOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-13),
            solver: SolverChoice::Auto,
            max_iterations: None,
            preconditioner: false,
            condition: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RbfSolution<T: Real> {
    pub grid: LatticeGrid<T>,
    pub eps: T,
    pub lambda: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport<T> {
    pub method: Method,
    pub iterations: usize,
    pub residual: T,
    /// ||r|| / (||A|| ||lambda|| + ||f||), with ||A|| bounded below by the largest column norm.
    pub backward_error: T,
    pub condition: Option<T>,
}

fn norm<T: Real>(v: &[T]) -> T {
    v.iter().map(|&x| x * x).sum::<T>().sqrt()
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn axpy<T: Real>(y: &mut [T], a: T, x: &[T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn relative_residual<T: Real>(op: &dyn LinearOperator<T>, x: &[T], f: &[T]) -> Result<T> {
    let ax = op.apply(x)?;
    let r: Vec<T> = f.iter().zip(&ax).map(|(&b, &y)| b - y).collect();
    let fb = norm(f);
    Ok(if fb == T::zero() { norm(&r) } else { norm(&r) / fb })
}

/// Dense LU with up to three steps of iterative refinement. Returns the solution, the
/// relative residual and the normwise backward error.
fn direct_solve<T: Real>(matrix: &DMatrix<T>, f: &[T], tol: T) -> Result<(Vec<T>, T, T)> {
    let lu = T::lu_factor(matrix.clone());
    let mut x = T::lu_solve(&lu, f).ok_or(Error::Singular)?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular);
    }
    let residual_of = |x: &[T]| -> Vec<T> {
        let v = nalgebra::DVector::from_column_slice(x);
        let ax = matrix * v;
        f.iter().zip(ax.iter()).map(|(&b, &y)| b - y).collect()
    };
    let fb = norm(f).max(T::min_positive_value());
    let mut r = residual_of(&x);
    let mut res = norm(&r) / fb;
    for _ in 0..3 {
        if res <= tol * T::lit(0.01) {
            break;
        }
        let dx = T::lu_solve(&lu, &r).ok_or(Error::Singular)?;
        let cand: Vec<T> = x.iter().zip(&dx).map(|(&a, &b)| a + b).collect();
        let rc = residual_of(&cand);
        let rcn = norm(&rc) / fb;
        if !(rcn < res) {
            break;
        }
        x = cand;
        r = rc;
        res = rcn;
    }
    if norm(f) == T::zero() {
        res = norm(&r);
    }
    Ok((x.clone(), res, backward_error(matrix, &x, f, &r)))
}

fn backward_error<T: Real>(matrix: &DMatrix<T>, x: &[T], f: &[T], r: &[T]) -> T {
    let a_norm = matrix
        .column_iter()
        .map(|c| c.iter().map(|&v| v * v).sum::<T>().sqrt())
        .fold(T::zero(), T::max);
    let den = a_norm * norm(x) + norm(f);
    if den == T::zero() {
        T::zero()
    } else {
        norm(r) / den
    }
}

// Inverse of the clamped circulant-embedding spectrum, used as a preconditioner.
fn circulant_preconditioner<T: Real>(op: &ToeplitzStiffness<T>) -> Vec<T> {
    let spec = op.circulant_spectrum();
    let top = spec.iter().fold(T::zero(), |m, &s| m.max(s));
    let floor = top * T::lit(1e-10);
    spec.iter().map(|&s| T::one() / s.max(floor)).collect()
}

struct Krylov<T> {
    x: Vec<T>,
    iterations: usize,
    breakdown: bool,
}

// Preconditioned CG from x0; stops on the recursive residual or on non-positive curvature.
fn cg<T: Real>(
    op: &dyn LinearOperator<T>,
    precond: Option<&dyn Fn(&[T]) -> Vec<T>>,
    f: &[T],
    x0: Vec<T>,
    target: T,
    max_iter: usize,
) -> Result<Krylov<T>> {
    let mut x = x0;
    let ax = op.apply(&x)?;
    let mut r: Vec<T> = f.iter().zip(&ax).map(|(&b, &y)| b - y).collect();
    let apply_m = |r: &[T]| match precond {
        Some(m) => m(r),
        None => r.to_vec(),
    };
    let mut z = apply_m(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut iterations = 0;
    while norm(&r) > target && iterations < max_iter {
        let ap = op.apply(&p)?;
        let curvature = dot(&p, &ap);
        if !(curvature > T::zero()) {
            return Ok(Krylov {
                x,
                iterations,
                breakdown: true,
            });
        }
        let a = rz / curvature;
        axpy(&mut x, a, &p);
        axpy(&mut r, -a, &ap);
        z = apply_m(&r);
        let rz_new = dot(&r, &z);
        let b = rz_new / rz;
        rz = rz_new;
        for (pi, &zi) in p.iter_mut().zip(&z) {
            *pi = zi + b * *pi;
        }
        iterations += 1;
    }
    Ok(Krylov {
        x,
        iterations,
        breakdown: false,
    })
}

// Unpreconditioned MINRES for symmetric, possibly indefinite operators.
fn minres<T: Real>(
    op: &dyn LinearOperator<T>,
    f: &[T],
    x0: Vec<T>,
    target: T,
    max_iter: usize,
) -> Result<Krylov<T>> {
    let n = f.len();
    let mut x = x0;
    let ax = op.apply(&x)?;
    let r: Vec<T> = f.iter().zip(&ax).map(|(&b, &y)| b - y).collect();
    let beta1 = norm(&r);
    if beta1 <= target {
        return Ok(Krylov {
            x,
            iterations: 0,
            breakdown: false,
        });
    }
    let zero = vec![T::zero(); n];
    let mut q_prev = zero.clone();
    let mut q: Vec<T> = r.iter().map(|&v| v / beta1).collect();
    let mut beta = T::zero();
    let (mut c1, mut s1) = (T::one(), T::zero());
    let (mut c2, mut s2) = (T::one(), T::zero());
    let mut p1 = zero.clone();
    let mut p2 = zero;
    let mut xi = beta1;
    let mut iterations = 0;
    while xi.abs() > target && iterations < max_iter {
        let aq = op.apply(&q)?;
        let alpha = dot(&q, &aq);
        let mut next: Vec<T> = aq
            .iter()
            .zip(&q)
            .zip(&q_prev)
            .map(|((&a, &qi), &qp)| a - alpha * qi - beta * qp)
            .collect();
        let beta_next = norm(&next);
        // previous two rotations applied to the new tridiagonal column
        let eps_k = s2 * beta;
        let tmp = c2 * beta;
        let delta = c1 * tmp + s1 * alpha;
        let gamma_bar = -s1 * tmp + c1 * alpha;
        let gamma = gamma_bar.hypot(beta_next);
        if gamma == T::zero() {
            break;
        }
        let (c, s) = (gamma_bar / gamma, beta_next / gamma);
        let p: Vec<T> = q
            .iter()
            .zip(&p1)
            .zip(&p2)
            .map(|((&qi, &a), &b)| (qi - delta * a - eps_k * b) / gamma)
            .collect();
        axpy(&mut x, c * xi, &p);
        xi = -s * xi;
        p2 = std::mem::replace(&mut p1, p);
        c2 = c1;
        s2 = s1;
        c1 = c;
        s1 = s;
        iterations += 1;
        if beta_next == T::zero() {
            break;
        }
        for v in next.iter_mut() {
            *v /= beta_next;
        }
        q_prev = std::mem::replace(&mut q, next);
        beta = beta_next;
    }
    Ok(Krylov {
        x,
        iterations,
        breakdown: false,
    })
}

fn iterative_solve<T: Real>(
    op: &StiffnessOperator<T>,
    f: &[T],
    opts: &SolveOptions<T>,
) -> Result<(Vec<T>, Method, usize, T)> {
    let n = f.len();
    let max_iter = opts.max_iterations.unwrap_or(20 * n + 100);
    let fb = norm(f);
    if fb == T::zero() {
        return Ok((vec![T::zero(); n], Method::Cg, 0, T::zero()));
    }
    let target = opts.tol * fb;
    let precond_spec = match (opts.preconditioner, op) {
        (true, StiffnessOperator::Toeplitz(t)) => Some(circulant_preconditioner(t)),
        _ => None,
    };
    let precond_fn = precond_spec.as_ref().map(|spec| {
        let t = match op {
            StiffnessOperator::Toeplitz(t) => t,
            StiffnessOperator::Dense(_) => unreachable!(),
        };
        move |r: &[T]| t.masked_spectral_apply(r, spec)
    });
    let precond: Option<&dyn Fn(&[T]) -> Vec<T>> = precond_fn.as_ref().map(|f| f as &dyn Fn(&[T]) -> Vec<T>);

    let mut x = vec![T::zero(); n];
    let mut method = Method::Cg;
    let mut total = 0;
    let mut best = (T::infinity(), x.clone());
    // Restarts from the true residual recover accuracy lost to recursive updates.
    for _ in 0..8 {
        let remaining = max_iter.saturating_sub(total).max(1);
        let run = if method == Method::Cg {
            let k = cg(op, precond, f, x.clone(), target, remaining)?;
            if k.breakdown {
                method = Method::Minres;
                minres(op, f, k.x, target, remaining)?
            } else {
                k
            }
        } else {
            minres(op, f, x.clone(), target, remaining)?
        };
        total += run.iterations;
        x = run.x;
        let res = relative_residual(op, &x, f)?;
        if res < best.0 {
            best = (res, x.clone());
        }
        if res <= opts.tol {
            return Ok((x, method, total, res));
        }
        if total >= max_iter || run.iterations == 0 {
            break;
        }
    }
    Err(Error::Stagnation {
        iterations: total,
        best_residual: best.0.as_f64(),
    })
}

/// Solves A lambda = f. The returned residual is recomputed with the operator itself.
pub fn solve<T: Real>(
    stiffness: &StiffnessOperator<T>,
    f: &[T],
    opts: &SolveOptions<T>,
) -> Result<(RbfSolution<T>, SolveReport<T>)> {
    let n = stiffness.size();
    if f.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: f.len(),
        });
    }
    let direct = match opts.solver {
        SolverChoice::Direct => true,
        SolverChoice::Cg => false,
        SolverChoice::Auto => n <= DENSE_LIMIT,
    };
    let (lambda, method, iterations, residual, backward) = if direct {
        if n > DENSE_LIMIT && !matches!(stiffness, StiffnessOperator::Dense(_)) {
            return Err(Error::TooLarge {
                n,
                limit: DENSE_LIMIT,
            });
        }
        let matrix = match stiffness {
            StiffnessOperator::Dense(d) => std::borrow::Cow::Borrowed(d.matrix()),
            StiffnessOperator::Toeplitz(t) => std::borrow::Cow::Owned(t.to_dense()),
        };
        let (x, res, backward) = direct_solve(&matrix, f, opts.tol)?;
        (x, Method::Direct, 0, res, backward)
    } else {
        let (x, method, iterations, res) = iterative_solve(stiffness, f, opts)?;
        let mut e0 = vec![T::zero(); n];
        e0[0] = T::one();
        let a_norm = norm(&stiffness.apply(&e0)?);
        let fb = norm(f);
        let den = a_norm * norm(&x) + fb;
        let backward = if den == T::zero() { T::zero() } else { res * fb / den };
        (x, method, iterations, res, backward)
    };
    // A backward-stable factorization cannot push the relative residual below about
    // eps ||A|| ||lambda|| / ||f||, so the direct path may certify by backward error instead.
    let certified = residual <= opts.tol || (direct && backward <= opts.tol);
    if !certified {
        return Err(Error::ResidualTooLarge {
            residual: residual.as_f64(),
            tol: opts.tol.as_f64(),
        });
    }
    let condition = match opts.condition {
        Some(mode) => Some(condition_number(stiffness, mode)?),
        None => None,
    };
    Ok((
        RbfSolution {
            grid: stiffness.grid().clone(),
            eps: stiffness.eps(),
            lambda,
        },
        SolveReport {
            method,
            iterations,
            residual,
            backward_error: backward,
            condition,
        },
    ))
}

/// Anything that can be evaluated pointwise and knows its center spacing.
pub trait Evaluate<T: Real>: Sync {
    fn spacing(&self) -> T;
    fn evaluate_at(&self, x: &[T]) -> T;
}

impl<T: Real> RbfSolution<T> {
    /// u_h(x) = sum_k lambda_k e^(-eps^2 |x - x_k|^2).
    pub fn value(&self, x: &[T]) -> T {
        let e2 = self.eps * self.eps;
        let cutoff = T::lit(745.0);
        self.grid
            .points()
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
}

impl<T: Real> Evaluate<T> for RbfSolution<T> {
    fn spacing(&self) -> T {
        self.grid.h()
    }

    fn evaluate_at(&self, x: &[T]) -> T {
        self.value(x)
    }
}

/// Values of `sol` at every point of `points`.
pub fn evaluate<T: Real, E: Evaluate<T>>(sol: &E, points: &PointSet<T>) -> Vec<T> {
    let dim = points.dim();
    points
        .coords()
        .par_chunks(dim)
        .map(|x| sol.evaluate_at(x))
        .collect()
}

/// RMS of exact - sol over the evaluation grid of spacing h / refine on the closed domain.
pub fn rms_error<T: Real, E: Evaluate<T>, F: Fn(&[T]) -> T + Sync>(
    sol: &E,
    exact: F,
    domain: &Domain<T>,
    refine: usize,
) -> Result<T> {
    let pts = evaluation_grid(domain, sol.spacing(), refine)?;
    let dim = pts.dim();
    let sum: T = pts
        .coords()
        .par_chunks(dim)
        .map(|x| {
            let e = exact(x) - sol.evaluate_at(x);
            e * e
        })
        .collect::<Vec<T>>()
        .into_iter()
        .sum();
    Ok((sum / T::from_count(pts.len())).sqrt())
}

// splitmix64 start vector, fixed seed.
fn start_vector<T: Real>(n: usize) -> Vec<T> {
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    (0..n)
        .map(|_| {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^= z >> 31;
            T::lit((z >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
        })
        .collect()
}

// Largest |eigenvalue| of a symmetric map by Lanczos with full reorthogonalization,
// stopped when the extreme Ritz value settles to `rel_tol`.
fn extreme_eigenvalue<T: Real>(
    apply: &dyn Fn(&[T]) -> Result<Vec<T>>,
    n: usize,
    rel_tol: T,
) -> Result<T> {
    let mut v = start_vector::<T>(n);
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut basis: Vec<Vec<T>> = vec![v];
    let mut alphas: Vec<T> = Vec::new();
    let mut betas: Vec<T> = Vec::new();
    let mut last = T::zero();
    let max_steps = n.min(300);
    for step in 0..max_steps {
        let q = &basis[step];
        let mut w = apply(q)?;
        let alpha = dot(q, &w);
        alphas.push(alpha);
        for b in &basis {
            let c = dot(b, &w);
            axpy(&mut w, -c, b);
        }
        for b in &basis {
            let c = dot(b, &w);
            axpy(&mut w, -c, b);
        }
        let k = alphas.len();
        let t = DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                alphas[i]
            } else if i + 1 == j {
                betas[i]
            } else if j + 1 == i {
                betas[j]
            } else {
                T::zero()
            }
        });
        let ritz = T::symmetric_singular_values(t)
            .into_iter()
            .fold(T::zero(), T::max);
        let beta = norm(&w);
        let settled = step > 0 && (ritz - last).abs() <= rel_tol * ritz;
        last = ritz;
        if settled || beta <= T::epsilon() * ritz || step + 1 == max_steps {
            break;
        }
        betas.push(beta);
        w.iter_mut().for_each(|x| *x /= beta);
        basis.push(w);
    }
    Ok(last)
}

/// 2-norm condition number sigma_max / sigma_min.
pub fn condition_number<T: Real>(stiffness: &StiffnessOperator<T>, mode: ConditionMode) -> Result<T> {
    let n = stiffness.size();
    let tiny = T::min_positive_value().max(T::lit(1e-300));
    match mode {
        ConditionMode::ExactSvd => {
            if n > DENSE_LIMIT {
                return Err(Error::TooLarge {
                    n,
                    limit: DENSE_LIMIT,
                });
            }
            let sv = T::symmetric_singular_values(stiffness.to_dense());
            let max = sv.iter().copied().fold(T::zero(), T::max);
            let min = sv.iter().copied().fold(T::infinity(), T::min);
            if !(min > tiny) {
                return Err(Error::Singular);
            }
            Ok(max / min)
        }
        ConditionMode::Estimate => {
            let rel = T::lit(1e-6);
            let forward = |v: &[T]| stiffness.apply(v);
            let sigma_max = extreme_eigenvalue(&forward, n, rel)?;
            let inv_max = if n <= DENSE_LIMIT {
                let lu = T::lu_factor(stiffness.to_dense());
                let inverse = |v: &[T]| T::lu_solve(&lu, v).ok_or(Error::Singular);
                extreme_eigenvalue(&inverse, n, rel)?
            } else {
                let opts = SolveOptions {
                    solver: SolverChoice::Cg,
                    ..SolveOptions::default()
                };
                let inverse = |v: &[T]| iterative_solve(stiffness, v, &opts).map(|r| r.0);
                extreme_eigenvalue(&inverse, n, rel)?
            };
            if !(inv_max.is_finite()) || !(T::one() / inv_max > tiny) {
                return Err(Error::Singular);
            }
            Ok(sigma_max * inv_max)
        }
    }
}
