//! Resolution of every option from the command line, then the config file, then defaults.

use std::fs::File;
use std::io::{self, Write};
use std::str::FromStr;

use fracrbf::problems::ProblemId;
use fracrbf::solver::{ConditionMode, SolverChoice};
use fracrbf::Domain;

use crate::config::Config;
use crate::{CliError, Flags};

/// Lattice resolution requested either as points per axis or as spacings.
#[derive(Debug, Clone, PartialEq)]
pub enum Sizes {
    PerAxis(Vec<usize>),
    Spacing(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionChoice {
    /// Exact SVD up to `EXACT_CONDITION_LIMIT` unknowns, Lanczos estimate above.
    Auto,
    Exact,
    Estimate,
    None,
}

pub const EXACT_CONDITION_LIMIT: usize = 1024;

impl ConditionChoice {
    pub fn mode(self, unknowns: usize) -> Option<ConditionMode> {
        match self {
            ConditionChoice::Auto if unknowns <= EXACT_CONDITION_LIMIT => Some(ConditionMode::ExactSvd),
            ConditionChoice::Auto | ConditionChoice::Estimate => Some(ConditionMode::Estimate),
            ConditionChoice::Exact => Some(ConditionMode::ExactSvd),
            ConditionChoice::None => None,
        }
    }
}

pub struct Settings {
    flags: Flags,
    config: Config,
}

fn flag_value<'a>(flags: &'a Flags, key: &str) -> Option<&'a str> {
    let v = match key {
        "problem" => &flags.problem,
        "alpha" => &flags.alpha,
        "cstar" => &flags.cstar,
        "n" => &flags.n,
        "h" => &flags.h,
        "domain" => &flags.domain,
        "refine" => &flags.refine,
        "tol" => &flags.tol,
        "solver" => &flags.solver,
        "out" => &flags.out,
        "condition" => &flags.condition,
        "gamma" => &flags.gamma,
        "x" => &flags.x,
        "beta" => &flags.beta,
        "alpha_max" => &flags.alpha_max,
        "dim" => &flags.dim,
        "points" => &flags.points,
        "repeats" => &flags.repeats,
        _ => return None,
    };
    v.as_deref()
}

pub fn parse_real(key: &str, s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    let bad = || CliError::Usage(format!("--{key}: '{s}' is not a number"));
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            a / b
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn parse_list<T>(key: &str, s: &str, item: impl Fn(&str) -> Result<T, CliError>) -> Result<Vec<T>, CliError> {
    let items: Vec<&str> = s.split(',').map(str::trim).filter(|p| !p.is_empty()).collect();
    if items.is_empty() {
        return Err(CliError::Usage(format!("--{key}: the list is empty")));
    }
    items.into_iter().map(item).collect()
}

fn parse_int<T: FromStr>(key: &str, s: &str) -> Result<T, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("--{key}: '{}' is not a non-negative integer", s.trim())))
}

impl Settings {
    pub fn new(flags: Flags, config: Config) -> Self {
        Self { flags, config }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        flag_value(&self.flags, key).or_else(|| self.config.get(key))
    }

    pub fn real(&self, key: &str, default: f64) -> Result<f64, CliError> {
        self.raw(key).map_or(Ok(default), |s| parse_real(key, s))
    }

    pub fn reals(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        match self.raw(key) {
            Some(s) => parse_list(key, s, |p| parse_real(key, p)),
            None => Ok(default.to_vec()),
        }
    }

    /// A single real; lists are rejected.
    pub fn single_real(&self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = self.reals(key, &[default])?;
        if v.len() != 1 {
            return Err(CliError::Usage(format!("--{key} takes a single value here")));
        }
        Ok(v[0])
    }

    pub fn count(&self, key: &str, default: usize) -> Result<usize, CliError> {
        self.raw(key).map_or(Ok(default), |s| parse_int(key, s))
    }

    pub fn problem(&self) -> Result<ProblemId, CliError> {
        let s = self
            .raw("problem")
            .ok_or_else(|| CliError::Usage("--problem is required".into()))?;
        s.parse().map_err(|e: fracrbf::Error| CliError::Usage(e.to_string()))
    }

    pub fn sizes(&self, default: Sizes) -> Result<Sizes, CliError> {
        let from_flags = self.flags.n.is_some() || self.flags.h.is_some();
        let (n, h) = if from_flags {
            (self.flags.n.as_deref(), self.flags.h.as_deref())
        } else {
            (self.config.get("n"), self.config.get("h"))
        };
        match (n, h) {
            (Some(_), Some(_)) => Err(CliError::Usage("give either n or h, not both".into())),
            (Some(s), None) => {
                let v = parse_list("n", s, |p| parse_int::<usize>("n", p))?;
                if v.contains(&0) {
                    return Err(CliError::Usage("--n: counts must be positive".into()));
                }
                Ok(Sizes::PerAxis(v))
            }
            (None, Some(s)) => {
                let v = parse_list("h", s, |p| parse_real("h", p))?;
                if v.iter().any(|&h| h <= 0.0) {
                    return Err(CliError::Usage("--h: spacings must be positive".into()));
                }
                Ok(Sizes::Spacing(v))
            }
            (None, None) => Ok(default),
        }
    }

    pub fn solver(&self) -> Result<SolverChoice, CliError> {
        match self.raw("solver").map(|s| s.trim().to_ascii_lowercase()) {
            None => Ok(SolverChoice::Auto),
            Some(s) => match s.as_str() {
                "auto" => Ok(SolverChoice::Auto),
                "direct" => Ok(SolverChoice::Direct),
                "cg" => Ok(SolverChoice::Cg),
                other => Err(CliError::Usage(format!("--solver: unknown solver '{other}'"))),
            },
        }
    }

    pub fn condition(&self) -> Result<ConditionChoice, CliError> {
        match self.raw("condition").map(|s| s.trim().to_ascii_lowercase()) {
            None => Ok(ConditionChoice::Auto),
            Some(s) => match s.as_str() {
                "auto" => Ok(ConditionChoice::Auto),
                "exact" => Ok(ConditionChoice::Exact),
                "estimate" => Ok(ConditionChoice::Estimate),
                "none" => Ok(ConditionChoice::None),
                other => Err(CliError::Usage(format!("--condition: unknown mode '{other}'"))),
            },
        }
    }

    pub fn wall_time(&self) -> Result<bool, CliError> {
        if self.flags.no_wall_time {
            return Ok(false);
        }
        match self.config.get("wall_time").map(|s| s.to_ascii_lowercase()) {
            None => Ok(true),
            Some(s) => match s.as_str() {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                other => Err(CliError::Usage(format!("wall_time: expected true or false, got '{other}'"))),
            },
        }
    }

    pub fn domain(&self, default: &str) -> Result<Domain, CliError> {
        let s = self.raw("domain").unwrap_or(default);
        parse_domain(s)
    }

    /// Opens the output now so that an unwritable path fails before any computation.
    pub fn out(&self) -> Result<Box<dyn Write>, CliError> {
        match self.raw("out") {
            None | Some("-") => Ok(Box::new(io::stdout().lock())),
            Some(path) => File::create(path)
                .map(|f| Box::new(io::BufWriter::new(f)) as Box<dyn Write>)
                .map_err(|e| CliError::Usage(format!("--out: cannot write {path}: {e}"))),
        }
    }
}

pub fn parse_domain(s: &str) -> Result<Domain, CliError> {
    let bad = |msg: &str| CliError::Usage(format!("--domain '{s}': {msg}"));
    let (kind, args) = s.trim().split_once(':').ok_or_else(|| bad("expected kind:parameters"))?;
    let nums = parse_list("domain", args, |p| parse_real("domain", p))?;
    let made = match (kind.trim().to_ascii_lowercase().as_str(), nums.as_slice()) {
        ("interval", [a, b]) => Domain::interval(*a, *b),
        ("cube", [a, b, d]) if *d >= 1.0 && d.fract() == 0.0 => Domain::cube(*a, *b, *d as usize),
        ("disk", [r]) => Domain::disk([0.0, 0.0], *r),
        ("disk", [cx, cy, r]) => Domain::disk([*cx, *cy], *r),
        _ => return Err(bad("expected interval:a,b | cube:a,b,dim | disk:r | disk:cx,cy,r")),
    };
    made.map_err(|e| bad(&e.to_string()))
}
