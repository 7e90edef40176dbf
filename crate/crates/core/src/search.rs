//! Nelder-Mead search for configurations with small `|D|` or small
//! conjecture gaps.
//!
//! With the gauge fixed, `p_1` sits at the origin, `p_2 = (0, x_0, 0)`,
//! `p_3 = (0, x_1, x_2)` and the remaining points are free, leaving `3n - 6`
//! coordinates. Candidates are rescaled to unit mean edge before the
//! objective is evaluated, which removes the remaining scale direction.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_forms::{ConjectureGaps, EdgeLengths4};
use crate::determinant::atiyah_det;
use crate::error::{Error, Result};
use crate::geometry::{base_frame, Configuration, Point3};
use crate::verify::generators::{random_rotation, unit_vector, GeneratorKind, GeneratorSpec};

/// Candidates with two points closer than this (relative to the mean edge)
/// score `+inf`.
pub const COLLAPSE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// `|D|`.
    AbsD,
    /// `(|det M| - 64 prod r) / l^6`.
    Gap2,
    /// `(|det M|^2 - prod_faces (d3 + 8abc)) / l^12`; four points only.
    Gap3,
}

impl Objective {
    pub fn name(&self) -> &'static str {
        match self {
            Objective::AbsD => "abs-d",
            Objective::Gap2 => "gap2",
            Objective::Gap3 => "gap3",
        }
    }

    /// Value at `cfg`. Scale-free: the configuration is measured in units
    /// of its mean edge.
    pub fn evaluate(&self, cfg: &Configuration) -> Result<f64> {
        if cfg.min_edge() < COLLAPSE_TOLERANCE * cfg.mean_edge() {
            return Err(Error::ObjectiveUndefined(format!(
                "points closer than {COLLAPSE_TOLERANCE:e} of the mean edge"
            )));
        }
        self.evaluate_unguarded(cfg)
    }

    /// [`Objective::evaluate`] without the collapse guard.
    fn evaluate_unguarded(&self, cfg: &Configuration) -> Result<f64> {
        let l = cfg.mean_edge();
        if *self == Objective::Gap3 && cfg.len() != 4 {
            return Err(Error::ObjectiveUndefined(format!("gap3 needs four points, got {}", cfg.len())));
        }
        let det = atiyah_det(cfg).map_err(|e| Error::ObjectiveUndefined(e.to_string()))?;
        let value = match self {
            Objective::AbsD => det.d.norm(),
            Objective::Gap2 => {
                let product: f64 = cfg.pairs().map(|(_, _, r)| r / l).product();
                det.det_m.norm() / l.powi(6) - 64.0 * product
            }
            Objective::Gap3 => {
                let e = EdgeLengths4::from_config(cfg)?;
                ConjectureGaps::from_abs_det(&e, det.det_m.norm()).gap3 / l.powi(12)
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::ObjectiveUndefined(format!("non-finite value {value}")))
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "abs-d" | "absd" => Ok(Objective::AbsD),
            "gap2" => Ok(Objective::Gap2),
            "gap3" => Ok(Objective::Gap3),
            _ => Err(Error::InvalidInput(format!("unknown objective {s:?} (abs-D, gap2, gap3)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchProblem {
    pub n: usize,
    pub objective: Objective,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    /// Edge of the initial simplex, in units of the mean edge.
    pub simplex_scale: f64,
    /// Optimise over the `3n - 6` gauge-fixed coordinates instead of all `3n`.
    pub gauge: bool,
    /// Worker threads for the restarts; 0 lets rayon decide.
    #[serde(skip)]
    pub workers: usize,
}

impl SearchProblem {
    pub fn new(n: usize, objective: Objective) -> Self {
        Self { n, objective, restarts: 20, max_iters: 4000, seed: 0, simplex_scale: 0.25, gauge: true, workers: 0 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidInput(format!("search needs n >= 3, got {}", self.n)));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidInput("need at least one restart".into()));
        }
        if !(self.simplex_scale.is_finite() && self.simplex_scale > 0.0) {
            return Err(Error::InvalidInput("simplex scale must be positive".into()));
        }
        if self.objective == Objective::Gap3 && self.n != 4 {
            return Err(Error::InvalidInput("gap3 is defined for four points only".into()));
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        if self.gauge {
            3 * self.n - 6
        } else {
            3 * self.n
        }
    }

    /// Configuration for a coordinate vector, rescaled to unit mean edge.
    pub fn configuration(&self, x: &[f64]) -> Result<Configuration> {
        let points: Vec<Point3> = if self.gauge {
            let mut pts = vec![Point3::ORIGIN, Point3::new(0.0, x[0], 0.0), Point3::new(0.0, x[1], x[2])];
            pts.extend(x[3..].chunks(3).map(|c| Point3::new(c[0], c[1], c[2])));
            pts
        } else {
            x.chunks(3).map(|c| Point3::new(c[0], c[1], c[2])).collect()
        };
        let cfg = Configuration::new(points).map_err(|e| Error::ObjectiveUndefined(e.to_string()))?;
        let l = cfg.mean_edge();
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::ObjectiveUndefined("degenerate scale".into()));
        }
        cfg.scaled(1.0 / l)
    }

    /// Coordinates of `cfg` in this problem's parametrisation.
    pub fn coordinates(&self, cfg: &Configuration) -> Result<Vec<f64>> {
        if cfg.len() != self.n {
            return Err(Error::InvalidInput(format!("expected {} points, got {}", self.n, cfg.len())));
        }
        if !self.gauge {
            return Ok(cfg.points().iter().flat_map(|p| [p.t, p.u, p.v]).collect());
        }
        let f = base_frame(cfg)?;
        let mut x = vec![f.point(1).u, f.point(2).u, f.point(2).v];
        x.extend(f.points()[3..].iter().flat_map(|p| [p.t, p.u, p.v]));
        Ok(x)
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.configuration(x).and_then(|c| self.objective.evaluate(&c)).unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub index: usize,
    pub start: GeneratorKind,
    pub best: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// Relative change of the objective under a random similarity of the
    /// restart's best configuration.
    pub gauge_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_value: f64,
    pub best_configuration: Configuration,
    pub restart: usize,
    /// Best-so-far value of the winning restart, sampled at most 200 times.
    pub trace: Vec<f64>,
    pub restarts: Vec<RestartSummary>,
    /// Largest distance from the best-fit line, over the diameter.
    pub collinearity: f64,
}

/// Best over independent Nelder-Mead restarts. Ties go to the lower restart
/// index, so the result does not depend on the number of workers.
pub fn minimize(problem: &SearchProblem) -> Result<SearchResult> {
    problem.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(problem.workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let runs: Vec<(RestartSummary, Vec<f64>, Vec<f64>)> =
        pool.install(|| (0..problem.restarts).into_par_iter().map(|r| restart(problem, r)).collect());

    let (winner, _) = runs
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, (s, _, _))| if s.best < bv { (i, s.best) } else { (bi, bv) });
    let (summary, x, trace) = &runs[winner];
    if !summary.best.is_finite() {
        return Err(Error::ObjectiveUndefined("no restart found a finite objective value".into()));
    }
    let best_configuration = problem.configuration(x)?;
    let best_value = problem.objective.evaluate(&best_configuration)?;
    Ok(SearchResult {
        best_value,
        collinearity: collinearity(&best_configuration),
        best_configuration,
        restart: winner,
        trace: thin(trace, 200),
        restarts: runs.into_iter().map(|(s, _, _)| s).collect(),
    })
}

fn restart(problem: &SearchProblem, index: usize) -> (RestartSummary, Vec<f64>, Vec<f64>) {
    let kind = GeneratorKind::ALL[index % GeneratorKind::ALL.len()];
    let spec = GeneratorSpec::new(kind, problem.n, problem.seed).with_degeneracy(0.3);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.trial_seed(index as u64) ^ 0x6e6d);
    let start = spec
        .generate(index as u64)
        .and_then(|c| problem.coordinates(&c))
        .unwrap_or_else(|_| (0..problem.dimension()).map(|_| rng.random_range(-1.0..1.0)).collect());

    let f = |x: &[f64]| problem.value(x);
    let run = nelder_mead(&f, &start, problem.simplex_scale, problem.max_iters);

    let gauge_residual = match problem.configuration(&run.x) {
        Ok(cfg) => gauge_check(problem.objective, &cfg, &mut rng),
        Err(_) => f64::INFINITY,
    };
    let summary = RestartSummary {
        index,
        start: kind,
        best: run.value,
        iterations: run.iterations,
        evaluations: run.evaluations,
        gauge_residual,
    };
    (summary, run.x, run.trace)
}

/// Relative change of the objective after a random rotation, translation
/// and scaling.
fn gauge_check(objective: Objective, cfg: &Configuration, rng: &mut ChaCha8Rng) -> f64 {
    let before = match objective.evaluate(cfg) {
        Ok(v) => v,
        Err(_) => return f64::INFINITY,
    };
    let rot = random_rotation(rng);
    let shift = unit_vector(rng).scale(rng.random_range(0.0..5.0));
    let lambda = rng.random_range(0.1..10.0);
    let moved = cfg.rotated(&rot).and_then(|c| c.translated(shift)).and_then(|c| c.scaled(lambda));
    // minimisers of the gaps sit near the collapse boundary; rounding in the
    // motion must not push them across it
    match moved.and_then(|c| objective.evaluate_unguarded(&c)) {
        Ok(after) => (after - before).abs() / before.abs().max(1.0),
        Err(_) => f64::INFINITY,
    }
}

/// Largest distance of a point from the line through the two farthest
/// points, divided by that distance. Zero for collinear configurations.
pub fn collinearity(cfg: &Configuration) -> f64 {
    let (mut a, mut b, mut d) = (0, 1, 0.0);
    for (i, j, r) in cfg.pairs() {
        if r > d {
            (a, b, d) = (i, j, r);
        }
    }
    let dir = (cfg.point(b) - cfg.point(a)).scale(1.0 / d);
    cfg.points()
        .iter()
        .map(|p| {
            let w = *p - cfg.point(a);
            (w - dir.scale(w.dot(&dir))).norm() / d
        })
        .fold(0.0, f64::max)
}

fn thin(trace: &[f64], max: usize) -> Vec<f64> {
    if trace.len() <= max {
        return trace.to_vec();
    }
    let step = trace.len().div_ceil(max - 1);
    let mut out: Vec<f64> = trace.iter().step_by(step).copied().collect();
    if !(trace.len() - 1).is_multiple_of(step) {
        out.push(*trace.last().expect("non-empty"));
    }
    out
}

#[derive(Debug, Clone)]
pub struct NelderMeadRun {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// Best value after each iteration.
    pub trace: Vec<f64>,
}

/// Nelder-Mead with reflection 1, expansion 2, contraction 1/2 and shrink
/// 1/2, started from the axis simplex of edge `step` at `x0`.
pub fn nelder_mead(f: &impl Fn(&[f64]) -> f64, x0: &[f64], step: f64, max_iters: usize) -> NelderMeadRun {
    const ALPHA: f64 = 1.0;
    const GAMMA: f64 = 2.0;
    const RHO: f64 = 0.5;
    const SIGMA: f64 = 0.5;

    let dim = x0.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for k in 0..dim {
        let mut x = x0.to_vec();
        x[k] += step;
        let v = eval(&x);
        simplex.push((x, v));
    }

    let affine = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p + t * (q - p)).collect() };
    let mut trace = Vec::with_capacity(max_iters);
    let mut iterations = 0;
    while iterations < max_iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (lo, hi) = (simplex[0].1, simplex[dim].1);
        let size = simplex[1..].iter().map(|(x, _)| dist(x, &simplex[0].0)).fold(0.0, f64::max);
        if size < 1e-13 || (hi.is_finite() && (hi - lo).abs() <= 1e-16 * lo.abs().max(1e-300) && size < 1e-9) {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let worst = simplex[dim].0.clone();
        let second = simplex[dim - 1].1;

        let xr = affine(&centroid, &worst, -ALPHA);
        let fr = eval(&xr);
        if fr < lo {
            let xe = affine(&centroid, &worst, -GAMMA);
            let fe = eval(&xe);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < second {
            simplex[dim] = (xr, fr);
        } else {
            let (xc, fc) = if fr < hi {
                let xc = affine(&centroid, &xr, RHO);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = affine(&centroid, &worst, RHO);
                let fc = eval(&xc);
                (xc, fc)
            };
            if fc < fr.min(hi) {
                simplex[dim] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x = affine(&best, &entry.0, SIGMA);
                    let v = eval(&x);
                    *entry = (x, v);
                }
            }
        }
        trace.push(simplex.iter().map(|s| s.1).fold(f64::INFINITY, f64::min));
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    NelderMeadRun { x, value, iterations, evaluations, trace }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

/// Appends `{seed, problem, result}` as one JSON line.
pub fn append_archive(path: &Path, problem: &SearchProblem, result: &SearchResult) -> Result<()> {
    #[derive(Serialize)]
    struct Record<'a> {
        seed: u64,
        problem: &'a SearchProblem,
        result: &'a SearchResult,
    }
    let line = serde_json::to_string(&Record { seed: problem.seed, problem, result })?;
    let mut file = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
    writeln!(file, "{line}")?;
    Ok(())
}
