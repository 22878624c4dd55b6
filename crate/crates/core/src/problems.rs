//! Manufactured solutions: right-hand sides, boundary data and exact solutions.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use std::time::Instant;

use rayon::prelude::*;

use crate::assembly::{assemble_dense, assemble_toeplitz, StiffnessOperator};
use crate::boundary::{
    fit_auxiliary, frlap_w_with_rule, AuxiliaryFit, BoundaryLayer, BoundarySetup, CorrectionQuad, CorrectionRule,
};
use crate::error::{Error, Result};
use crate::frlap_kernel::FracOrder;
use crate::lattice::{generate_centers, Domain};
use crate::scalar::Real;
use crate::solver::{
    condition_number, rms_error, solve, ConditionMode, Evaluate, Method, RbfSolution, SolveOptions, SolverChoice,
    DENSE_LIMIT,
};
use crate::specfun::{gamma_ratio, gauss_2f1, kummer_1f1, SeriesControl};

fn norm2<T: Real>(x: &[T]) -> T {
    x.iter().map(|&v| v * v).sum()
}

/// f for u = [(1 - x^2)_+]^s on (-1, 1).
pub fn ex1_f<T: Real>(s: T, alpha: T, x: T) -> Result<T> {
    let two = T::lit(2.0);
    let pref = two.powf(alpha)
        * gamma_ratio(&[(alpha + T::one()) / two, s + T::one()], &[s + T::one() - alpha / two])?
        / T::PI().sqrt();
    let hyp = gauss_2f1(
        (alpha + T::one()) / two,
        -s + alpha / two,
        T::lit(0.5),
        x * x,
        SeriesControl::default(),
    )?;
    Ok(pref * hyp)
}

pub fn ex1_u<T: Real>(s: T, x: T) -> T {
    let q = T::one() - x * x;
    if q > T::zero() {
        q.powf(s)
    } else {
        T::zero()
    }
}

/// f for u = [(1 - |x|^2)_+]^4 on the unit disk.
pub fn ex2_f<T: Real>(alpha: T, x: &[T]) -> Result<T> {
    let two = T::lit(2.0);
    // alpha 2^(alpha-1) Gamma(alpha/2) = 2^alpha Gamma(1 + alpha/2), finite at alpha = 0
    let pref = two.powf(alpha) * T::lit(24.0) * gamma_ratio(&[T::one() + alpha / two], &[T::lit(5.0) - alpha / two])?;
    let hyp = gauss_2f1(
        alpha / two + T::one(),
        alpha / two - T::lit(4.0),
        T::one(),
        norm2(x),
        SeriesControl::default(),
    )?;
    Ok(pref * hyp)
}

pub fn ex2_u<T: Real>(x: &[T]) -> T {
    let q = T::one() - norm2(x);
    if q > T::zero() {
        q.powi(4)
    } else {
        T::zero()
    }
}

/// f for u = y e^(-9 |x|^2) in two dimensions.
pub fn ex3_f<T: Real>(alpha: T, x: &[T]) -> Result<T> {
    let two = T::lit(2.0);
    let pref = T::lit(6.0).powf(alpha) * gamma_ratio(&[two + alpha / two], &[])?;
    let hyp = kummer_1f1(two + alpha / two, two, -T::lit(9.0) * norm2(x), SeriesControl::default())?;
    Ok(pref * hyp * x[1])
}

pub fn ex3_u<T: Real>(x: &[T]) -> T {
    x[1] * (-T::lit(9.0) * norm2(x)).exp()
}

/// (f, g, u) for u = g = 1/(1 + x^2) in one dimension.
pub fn ex4_data<T: Real>(alpha: T, x: T) -> Result<(T, T, T)> {
    let two = T::lit(2.0);
    let pref = two.powf(alpha) * gamma_ratio(&[(T::one() + alpha) / two, T::one() + alpha / two], &[])?
        / T::PI().sqrt();
    let hyp = gauss_2f1(
        (T::one() + alpha) / two,
        T::one() + alpha / two,
        T::lit(0.5),
        -x * x,
        SeriesControl::default(),
    )?;
    let u = T::one() / (T::one() + x * x);
    Ok((pref * hyp, u, u))
}

/// (f, g, u) for u = g = x/(1 + |x|^2) in two dimensions.
pub fn ex5_data<T: Real>(alpha: T, x: &[T]) -> Result<(T, T, T)> {
    let two = T::lit(2.0);
    let pref = two.powf(alpha) * gamma_ratio(&[T::one() + alpha / two, two + alpha / two], &[])?;
    let hyp = gauss_2f1(
        two + alpha / two,
        T::one() + alpha / two,
        two,
        -norm2(x),
        SeriesControl::default(),
    )?;
    let u = x[0] / (T::one() + norm2(x));
    Ok((pref * hyp * x[0], u, u))
}

/// Problem identifier; Example 1 carries its exponent s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProblemId {
    Ex1 { s: f64 },
    Ex2,
    Ex3,
    Ex4,
    Ex5,
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemId::Ex1 { s } if *s == 4.0 => write!(f, "ex1"),
            ProblemId::Ex1 { s } => write!(f, "ex1:{s}"),
            ProblemId::Ex2 => write!(f, "ex2"),
            ProblemId::Ex3 => write!(f, "ex3"),
            ProblemId::Ex4 => write!(f, "ex4"),
            ProblemId::Ex5 => write!(f, "ex5"),
        }
    }
}

impl FromStr for ProblemId {
    type Err = Error;

    /// Accepts ex1 (s = 4), ex1:<s>, ex2 ... ex5.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "ex1" => Ok(ProblemId::Ex1 { s: 4.0 }),
            "ex2" => Ok(ProblemId::Ex2),
            "ex3" => Ok(ProblemId::Ex3),
            "ex4" => Ok(ProblemId::Ex4),
            "ex5" => Ok(ProblemId::Ex5),
            other => match other.strip_prefix("ex1:") {
                Some(v) => v
                    .parse::<f64>()
                    .ok()
                    .filter(|s| *s > 0.0)
                    .map(|s| ProblemId::Ex1 { s })
                    .ok_or_else(|| Error::InvalidParameter(format!("bad exponent in '{s}'"))),
                None => Err(Error::InvalidParameter(format!("unknown problem '{s}'"))),
            },
        }
    }
}

pub type PointFn<T> = Arc<dyn Fn(&[T]) -> Result<T> + Send + Sync>;
pub type ExactFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;

/// A problem instance at a fixed alpha.
#[derive(Clone)]
pub struct ProblemSpec<T: Real> {
    pub id: ProblemId,
    pub alpha: T,
    pub domain: Domain<T>,
    pub f: PointFn<T>,
    pub g: ExactFn<T>,
    pub u_exact: ExactFn<T>,
    /// Far-field decay exponent of |g|; `None` for homogeneous data.
    pub g_decay_p: Option<T>,
    /// Radii of spheres where u_exact is not smooth.
    pub kinks: Vec<T>,
}

impl<T: Real> fmt::Debug for ProblemSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("id", &self.id)
            .field("alpha", &self.alpha)
            .field("domain", &self.domain)
            .finish()
    }
}

impl<T: Real> ProblemSpec<T> {
    pub fn new(id: ProblemId, alpha: T) -> Result<Self> {
        if !(alpha > T::zero() && alpha < T::lit(2.0)) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (0, 2), got {alpha}")));
        }
        let zero: ExactFn<T> = Arc::new(|_| T::zero());
        let spec = match id {
            ProblemId::Ex1 { s } => {
                let s = T::lit(s);
                if !(s > alpha / T::lit(2.0)) {
                    return Err(Error::InvalidParameter(format!("ex1 needs s > alpha/2, got s = {s}")));
                }
                ProblemSpec {
                    id,
                    alpha,
                    domain: Domain::interval(-T::one(), T::one())?,
                    f: Arc::new(move |x: &[T]| ex1_f(s, alpha, x[0])),
                    g: zero,
                    u_exact: Arc::new(move |x: &[T]| ex1_u(s, x[0])),
                    g_decay_p: None,
                    kinks: vec![T::one()],
                }
            }
            ProblemId::Ex2 => ProblemSpec {
                id,
                alpha,
                domain: Domain::unit_disk(),
                f: Arc::new(move |x: &[T]| ex2_f(alpha, x)),
                g: zero,
                u_exact: Arc::new(|x: &[T]| ex2_u(x)),
                g_decay_p: None,
                kinks: vec![T::one()],
            },
            ProblemId::Ex3 => ProblemSpec {
                id,
                alpha,
                domain: Domain::cube(-T::lit(2.0), T::lit(2.0), 2)?,
                f: Arc::new(move |x: &[T]| ex3_f(alpha, x)),
                g: zero,
                u_exact: Arc::new(|x: &[T]| ex3_u(x)),
                g_decay_p: None,
                kinks: Vec::new(),
            },
            ProblemId::Ex4 => ProblemSpec {
                id,
                alpha,
                domain: Domain::interval(-T::one(), T::one())?,
                f: Arc::new(move |x: &[T]| ex4_data(alpha, x[0]).map(|d| d.0)),
                g: Arc::new(|x: &[T]| T::one() / (T::one() + x[0] * x[0])),
                u_exact: Arc::new(|x: &[T]| T::one() / (T::one() + x[0] * x[0])),
                g_decay_p: Some(T::lit(2.0)),
                kinks: Vec::new(),
            },
            ProblemId::Ex5 => ProblemSpec {
                id,
                alpha,
                domain: Domain::cube(-T::one(), T::one(), 2)?,
                f: Arc::new(move |x: &[T]| ex5_data(alpha, x).map(|d| d.0)),
                g: Arc::new(|x: &[T]| x[0] / (T::one() + norm2(x))),
                u_exact: Arc::new(|x: &[T]| x[0] / (T::one() + norm2(x))),
                g_decay_p: Some(T::one()),
                kinks: Vec::new(),
            },
        };
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Lattice spacing for n points per axis across the domain.
    pub fn spacing_for(&self, n: usize) -> T {
        let (lo, hi) = self.domain.bounding_box();
        (hi[0] - lo[0]) / T::from_count(n + 1)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.g_decay_p.is_none()
    }

    /// Collar, fit and quadrature settings for problems with nonzero boundary data.
    pub fn boundary_setup(&self) -> Result<Option<BoundarySetup<T>>> {
        let p = match self.g_decay_p {
            Some(p) => p,
            None => return Ok(None),
        };
        let width = match self.id {
            ProblemId::Ex4 => T::lit(0.25),
            _ => T::lit(1.0 / 16.0),
        };
        let layer = BoundaryLayer::collar(&self.domain, width, T::lit(1.0 / 32.0), T::lit(1.4))?;
        Ok(Some(BoundarySetup {
            layer,
            quad: CorrectionQuad::new(p),
            fit_tol: T::lit(1e-7),
        }))
    }
}

/// Settings of a single solve-and-measure run.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions<T> {
    pub c_star: T,
    /// Evaluation grid refinement for the RMS error.
    pub refine: usize,
    pub solve: SolveOptions<T>,
    pub condition: Option<ConditionMode>,
}

impl<T: Real> RunOptions<T> {
    pub fn new(c_star: T) -> Self {
        Self {
            c_star,
            refine: 4,
            solve: SolveOptions::default(),
            condition: None,
        }
    }
}

/// Everything reported about one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemRun<T> {
    pub unknowns: usize,
    pub h: T,
    pub c_star: T,
    pub alpha: T,
    pub rms_error: T,
    pub condition: Option<T>,
    pub method: Method,
    pub iterations: usize,
    pub residual: T,
    pub fit_rms: Option<T>,
    /// Wall time of the linear solve alone.
    pub solve_seconds: f64,
}

struct Combined<'a, T: Real> {
    v: &'a RbfSolution<T>,
    w: Option<&'a AuxiliaryFit<T>>,
}

impl<T: Real> Evaluate<T> for Combined<'_, T> {
    fn spacing(&self) -> T {
        self.v.grid.h()
    }

    fn evaluate_at(&self, x: &[T]) -> T {
        self.v.value(x) + self.w.map_or(T::zero(), |w| w.value(x))
    }
}

/// Solves the problem on the lattice of spacing h and measures the RMS error against u_exact.
///
/// Dense assembly and LU are used for the direct path, the Toeplitz operator for CG.
/// The auxiliary fit w_h and its correction rule for a nonhomogeneous problem. Both depend on
/// the problem and alpha only, so one preparation serves every grid and shape parameter.
#[derive(Debug, Clone)]
pub struct PreparedBoundary<T: Real> {
    pub fit: AuxiliaryFit<T>,
    pub rule: CorrectionRule<T>,
}

/// Builds the exterior treatment of `spec`, or `None` for homogeneous data.
pub fn prepare_boundary<T: Real>(spec: &ProblemSpec<T>) -> Result<Option<PreparedBoundary<T>>> {
    let Some(s) = spec.boundary_setup()? else {
        return Ok(None);
    };
    let order = FracOrder::new(spec.alpha, spec.dim())?;
    let g = spec.g.clone();
    let fit = fit_auxiliary(|x: &[T]| g(x), &s.layer, s.fit_tol)?;
    let rule = CorrectionRule::build(&fit, |x: &[T]| g(x), &s.layer, order, &s.quad)?;
    Ok(Some(PreparedBoundary { fit, rule }))
}

pub fn run_problem<T: Real>(spec: &ProblemSpec<T>, h: T, opts: &RunOptions<T>) -> Result<ProblemRun<T>> {
    let prepared = prepare_boundary(spec)?;
    run_problem_with(spec, h, opts, prepared.as_ref())
}

/// As [`run_problem`] with a reusable boundary preparation; it must come from the same spec.
pub fn run_problem_with<T: Real>(
    spec: &ProblemSpec<T>,
    h: T,
    opts: &RunOptions<T>,
    prepared: Option<&PreparedBoundary<T>>,
) -> Result<ProblemRun<T>> {
    if prepared.is_some() != spec.g_decay_p.is_some() {
        return Err(Error::InvalidParameter(
            "boundary preparation does not match the problem".into(),
        ));
    }
    let grid = generate_centers(&spec.domain, h)?;
    let order = FracOrder::new(spec.alpha, spec.dim())?;
    let eps = opts.c_star / h;
    let n = grid.len();
    let iterative = match opts.solve.solver {
        SolverChoice::Direct => false,
        SolverChoice::Cg => true,
        SolverChoice::Auto => n > DENSE_LIMIT,
    };
    let stiffness = if iterative {
        StiffnessOperator::Toeplitz(assemble_toeplitz(&grid, order, eps)?)
    } else {
        StiffnessOperator::Dense(assemble_dense(&grid, order, eps)?)
    };
    let fit = prepared.map(|p| &p.fit);
    let rule = prepared.map(|p| &p.rule);
    let dim = grid.dim();
    let rhs: Vec<Result<T>> = grid
        .points()
        .coords()
        .par_chunks(dim)
        .map(|x| {
            let f = (spec.f)(x)?;
            match (fit, rule) {
                (Some(fit), Some(rule)) => Ok(f - frlap_w_with_rule(fit, rule, x)?),
                _ => Ok(f),
            }
        })
        .collect();
    let rhs: Vec<T> = rhs.into_iter().collect::<Result<_>>()?;

    let solve_opts = SolveOptions {
        condition: None,
        ..opts.solve
    };
    let start = Instant::now();
    let (v, report) = solve(&stiffness, &rhs, &solve_opts)?;
    let solve_seconds = start.elapsed().as_secs_f64();

    let condition = match opts.condition {
        Some(mode) => Some(condition_number(&stiffness, mode)?),
        None => None,
    };
    let combined = Combined { v: &v, w: fit };
    let exact = spec.u_exact.clone();
    let rms = rms_error(&combined, |x: &[T]| exact(x), &spec.domain, opts.refine)?;
    Ok(ProblemRun {
        unknowns: n,
        h,
        c_star: opts.c_star,
        alpha: spec.alpha,
        rms_error: rms,
        condition,
        method: report.method,
        iterations: report.iterations,
        residual: report.residual,
        fit_rms: fit.map(|f| f.fit_rms),
        solve_seconds,
    })
}
