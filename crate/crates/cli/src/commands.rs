//! The five experiments. Inputs are validated before any heavy work starts.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use fracrbf::analysis::{saturation_coeffs, symbol_collocation, symbol_galerkin, SaturationQuery, SymbolQuery};
use fracrbf::assembly::{assemble_dense, assemble_toeplitz, toeplitz_matvec, LinearOperator};
use fracrbf::frlap_kernel::FracOrder;
use fracrbf::lattice::generate_centers;
use fracrbf::problems::{prepare_boundary, run_problem_with, ProblemSpec, RunOptions};
use fracrbf::solver::SolveOptions;

use crate::settings::{Settings, Sizes};
use crate::CliError;

pub struct Table {
    header: &'static [&'static str],
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &'static [&'static str]) -> Self {
        Self { header, rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, out: Box<dyn Write>) -> Result<(), CliError> {
        let fail = |e: csv::Error| CliError::Output(e.to_string());
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header).map_err(fail)?;
        for row in &self.rows {
            w.write_record(row).map_err(fail)?;
        }
        w.flush().map_err(|e| CliError::Output(e.to_string()))
    }
}

/// 17 significant digits.
fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn timing(v: f64, enabled: bool) -> String {
    if enabled {
        real(v)
    } else {
        String::new()
    }
}

fn specs(s: &Settings) -> Result<Vec<ProblemSpec<f64>>, CliError> {
    let id = s.problem()?;
    s.reals("alpha", &[1.0])?
        .into_iter()
        .map(|alpha| ProblemSpec::new(id, alpha).map_err(|e| CliError::Usage(e.to_string())))
        .collect()
}

fn positive(key: &str, values: &[f64]) -> Result<(), CliError> {
    if values.iter().all(|&v| v > 0.0) {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--{key}: values must be positive")))
    }
}

fn spacings(spec: &ProblemSpec<f64>, sizes: &Sizes) -> Vec<f64> {
    match sizes {
        Sizes::PerAxis(n) => n.iter().map(|&n| spec.spacing_for(n)).collect(),
        Sizes::Spacing(h) => h.clone(),
    }
}

fn solve_options(s: &Settings) -> Result<SolveOptions<f64>, CliError> {
    let tol = s.real("tol", 1e-13)?;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(CliError::Usage("--tol must lie in (0, 1)".into()));
    }
    Ok(SolveOptions {
        tol,
        solver: s.solver()?,
        ..SolveOptions::default()
    })
}

pub fn solve(s: &Settings) -> Result<Table, CliError> {
    let specs = specs(s)?;
    let cstars = s.reals("cstar", &[0.5])?;
    positive("cstar", &cstars)?;
    let sizes = s.sizes(Sizes::PerAxis(vec![7, 15, 31]))?;
    let refine = s.count("refine", 4)?.max(1);
    let solve_opts = solve_options(s)?;
    let condition = s.condition()?;
    let clock = s.wall_time()?;

    let mut table = Table::new(&[
        "N", "h", "c_star", "alpha", "rms_error", "condition", "iterations", "wall_time",
    ]);
    for spec in &specs {
        let prepared = prepare_boundary(spec)?;
        for &c_star in &cstars {
            for h in spacings(spec, &sizes) {
                let unknowns = generate_centers(&spec.domain, h)?.len();
                let opts = RunOptions {
                    c_star,
                    refine,
                    solve: solve_opts,
                    condition: condition.mode(unknowns),
                };
                let run = run_problem_with(spec, h, &opts, prepared.as_ref())?;
                table.push(vec![
                    run.unknowns.to_string(),
                    real(run.h),
                    real(run.c_star),
                    real(run.alpha),
                    real(run.rms_error),
                    run.condition.map(real).unwrap_or_default(),
                    run.iterations.to_string(),
                    timing(run.solve_seconds, clock),
                ]);
            }
        }
    }
    Ok(table)
}

pub fn sweep(s: &Settings) -> Result<Table, CliError> {
    let specs = specs(s)?;
    if specs.len() != 1 {
        return Err(CliError::Usage("sweep takes a single --alpha".into()));
    }
    let spec = &specs[0];
    let cstars = s.reals("cstar", &[0.5, 0.65, 0.8])?;
    positive("cstar", &cstars)?;
    let sizes = s.sizes(Sizes::PerAxis(vec![7, 15, 31, 63, 127]))?;
    let refine = s.count("refine", 4)?.max(1);
    let solve_opts = solve_options(s)?;

    let mut table = Table::new(&["c_star", "N", "rms"]);
    let prepared = prepare_boundary(spec)?;
    for &c_star in &cstars {
        for h in spacings(spec, &sizes) {
            let opts = RunOptions {
                c_star,
                refine,
                solve: solve_opts,
                condition: None,
            };
            let run = run_problem_with(spec, h, &opts, prepared.as_ref())?;
            table.push(vec![real(c_star), run.unknowns.to_string(), real(run.rms_error)]);
        }
    }
    Ok(table)
}

pub fn saturation(s: &Settings) -> Result<Table, CliError> {
    let beta = s.count("beta", 0)?;
    let query = SaturationQuery {
        gamma: s.single_real("gamma", 0.36)?,
        x: s.single_real("x", 0.25)?,
        beta: u32::try_from(beta).map_err(|_| CliError::Usage("--beta is too large".into()))?,
        alpha_max: s.count("alpha_max", 8)?,
    };
    if !(query.gamma > 0.0) {
        return Err(CliError::Usage("--gamma must be positive".into()));
    }
    let coeffs = saturation_coeffs(&query)?;
    let mut table = Table::new(&["alpha_index", "value"]);
    for (k, v) in coeffs.into_iter().enumerate() {
        table.push(vec![k.to_string(), real(v)]);
    }
    Ok(table)
}

pub fn symbols(s: &Settings) -> Result<Table, CliError> {
    let alpha = s.single_real("alpha", 1.0)?;
    let gamma = s.single_real("gamma", 0.25)?;
    let h = match s.sizes(Sizes::Spacing(vec![0.1]))? {
        Sizes::Spacing(h) if h.len() == 1 => h[0],
        _ => return Err(CliError::Usage("symbols takes a single --h".into())),
    };
    let dim = s.count("dim", 1)?;
    let points = s.count("points", 101)?;
    if !(alpha > 0.0 && alpha < 2.0) || !(gamma > 0.0) || dim == 0 || points < 2 {
        return Err(CliError::Usage(
            "symbols needs 0 < alpha < 2, gamma > 0, dim >= 1 and points >= 2".into(),
        ));
    }
    let weight = (gamma / PI).powf(dim as f64 / 2.0);
    let mut table = Table::new(&["xi", "E_C", "E_G", "gap"]);
    for k in 0..points {
        // frequencies along the diagonal xi = (t, ..., t)
        let t = -PI + 2.0 * PI * k as f64 / (points - 1) as f64;
        let q = SymbolQuery {
            h,
            gamma,
            alpha,
            dim,
            xi: vec![t; dim],
            j_cut: None,
        };
        let ec = symbol_collocation(&q)?.value;
        let eg = symbol_galerkin(&q)?.value;
        table.push(vec![real(t), real(ec), real(eg), real(ec - weight * eg)]);
    }
    Ok(table)
}

pub fn bench(s: &Settings) -> Result<Table, CliError> {
    let domain = s.domain("disk:1")?;
    let alpha = s.single_real("alpha", 1.0)?;
    let c_star = s.single_real("cstar", 0.5)?;
    let order = FracOrder::new(alpha, domain.dim()).map_err(|e| CliError::Usage(e.to_string()))?;
    if !(c_star > 0.0) {
        return Err(CliError::Usage("--cstar must be positive".into()));
    }
    let (lo, hi) = domain.bounding_box();
    let spacings = match s.sizes(Sizes::Spacing(vec![1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0]))? {
        Sizes::Spacing(h) => h,
        Sizes::PerAxis(n) => n.iter().map(|&n| (hi[0] - lo[0]) / (n + 1) as f64).collect(),
    };
    let repeats = s.count("repeats", 5)?.max(1);
    let clock = s.wall_time()?;

    let mut table = Table::new(&["N", "h", "dense_seconds", "fft_seconds"]);
    for h in spacings {
        let grid = generate_centers(&domain, h)?;
        let dense = assemble_dense(&grid, order, c_star / h)?;
        let toeplitz = assemble_toeplitz(&grid, order, c_star / h)?;
        let v: Vec<f64> = (0..grid.len()).map(|i| ((i % 11) as f64 - 5.0) / 5.0).collect();
        let mut best_dense = f64::INFINITY;
        let mut best_fft = f64::INFINITY;
        for _ in 0..repeats {
            let t = Instant::now();
            std::hint::black_box(dense.apply(&v)?);
            best_dense = best_dense.min(t.elapsed().as_secs_f64());
            let t = Instant::now();
            std::hint::black_box(toeplitz_matvec(&toeplitz, &v)?);
            best_fft = best_fft.min(t.elapsed().as_secs_f64());
        }
        table.push(vec![
            grid.len().to_string(),
            real(h),
            timing(best_dense, clock),
            timing(best_fft, clock),
        ]);
    }
    Ok(table)
}
