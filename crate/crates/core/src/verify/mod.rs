//! Seeded verification suites.
//!
//! Each suite runs a fixed number of trials over configurations from a
//! [`GeneratorSpec`]. Every check yields a residual made dimensionless by the
//! mean edge raised to the homogeneity degree of the identity; a residual
//! above the suite tolerance becomes a [`Failure`]. Trials run in parallel
//! but are reduced in trial order, so reports do not depend on the number of
//! workers.

pub mod generators;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_forms::{
    area_product_reduction_check, area_quadric_check, cayley_menger_144v2, det_m_n3, heron_16a2, re_det_m_n4,
    signed_projected_area, ConjectureGaps, EdgeLengths4,
};
use crate::determinant::{atiyah_det, atiyah_matrix_with, PairConvention};
use crate::error::{Error, Result};
use crate::geometry::{base_frame, lift, Configuration};
use crate::symmetry::{VertexPermutation, FACES};

pub use generators::{random_rotation, GeneratorKind, GeneratorSpec};

/// Trials, tolerance and thread count shared by the suites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub trials: u64,
    pub tolerance: f64,
    /// Worker threads; 0 lets rayon decide.
    pub workers: usize,
}

impl SuiteOptions {
    pub fn new(trials: u64, tolerance: f64) -> Self {
        Self { trials, tolerance, workers: 0 }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub trial: u64,
    pub check: String,
    pub residual: f64,
    pub configuration: Configuration,
}

/// Per-trial numbers from a conjecture scan, normalised by powers of the
/// mean edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapRecord {
    pub trial: u64,
    pub mean_edge: f64,
    pub abs_d: f64,
    /// `(Re det M - 60 prod r) / l^6`.
    pub proved_margin: f64,
    /// `(|det M| - 64 prod r) / l^6`.
    pub gap2: f64,
    /// `(|det M|^2 - prod_faces (d3 + 8abc)) / l^12`.
    pub gap3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub spec: GeneratorSpec,
    pub seed: u64,
    pub trials: u64,
    pub tolerance: f64,
    pub failures: Vec<Failure>,
    pub worst_residual: f64,
    /// Largest residual seen per check.
    pub worst_by_check: BTreeMap<String, f64>,
    /// Checks that could not be formed, for example a flat base triangle.
    pub skipped: BTreeMap<String, u64>,
    pub min_gap2: Option<f64>,
    pub min_gap3: Option<f64>,
    pub min_proved_margin: Option<f64>,
    #[serde(skip)]
    pub gaps: Vec<GapRecord>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Report {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise")
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    /// One row per trial for the scan suite; one row per failure otherwise.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if self.gaps.is_empty() {
            out.push_str("trial,check,residual\n");
            for f in &self.failures {
                out.push_str(&format!("{},{},{:e}\n", f.trial, f.check, f.residual));
            }
        } else {
            out.push_str("trial,mean_edge,abs_d,proved_margin,gap2,gap3\n");
            for g in &self.gaps {
                out.push_str(&format!(
                    "{},{:e},{:e},{:e},{:e},{:e}\n",
                    g.trial, g.mean_edge, g.abs_d, g.proved_margin, g.gap2, g.gap3
                ));
            }
        }
        out
    }

    /// One line per check: `name worst [FAIL]`.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "{} ({} x {}, seed {}): {} failures, worst residual {:.3e}\n",
            self.suite,
            self.trials,
            self.spec.kind,
            self.seed,
            self.failures.len(),
            self.worst_residual
        );
        for (check, worst) in &self.worst_by_check {
            let flag = if *worst > self.tolerance { "  FAIL" } else { "" };
            out.push_str(&format!("  {check:<24} {worst:.3e}{flag}\n"));
        }
        for (check, count) in &self.skipped {
            out.push_str(&format!("  {check:<24} skipped {count}\n"));
        }
        for (name, v) in [("min gap2", self.min_gap2), ("min gap3", self.min_gap3), ("min Re - 60 prod r", self.min_proved_margin)] {
            if let Some(v) = v {
                out.push_str(&format!("  {name:<24} {v:.6e}\n"));
            }
        }
        out
    }
}

/// What one trial produced.
#[derive(Debug, Default)]
struct TrialLog {
    residuals: Vec<(&'static str, f64)>,
    skipped: Vec<&'static str>,
    gaps: Option<GapRecord>,
}

impl TrialLog {
    fn record(&mut self, check: &'static str, residual: f64) {
        // NaN must not pass as small
        self.residuals.push((check, if residual.is_nan() { f64::INFINITY } else { residual }));
    }

    fn record_result(&mut self, check: &'static str, residual: Result<f64>) {
        match residual {
            Ok(r) => self.record(check, r),
            Err(Error::DegenerateDenominator(_)) => self.skipped.push(check),
            Err(_) => self.record(check, f64::INFINITY),
        }
    }
}

fn run_suite<F>(name: &str, spec: &GeneratorSpec, options: &SuiteOptions, trial: F) -> Result<Report>
where
    F: Fn(u64, &Configuration, &mut TrialLog) + Sync,
{
    spec.validate()?;
    let start = Instant::now();
    let work = || -> Vec<(Configuration, TrialLog)> {
        (0..options.trials)
            .into_par_iter()
            .map(|k| {
                let cfg = spec.generate(k).expect("spec validated");
                let mut log = TrialLog::default();
                trial(k, &cfg, &mut log);
                (cfg, log)
            })
            .collect()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let logs = pool.install(work);

    let mut report = Report {
        suite: name.to_string(),
        spec: *spec,
        seed: spec.seed,
        trials: options.trials,
        tolerance: options.tolerance,
        failures: Vec::new(),
        worst_residual: 0.0,
        worst_by_check: BTreeMap::new(),
        skipped: BTreeMap::new(),
        min_gap2: None,
        min_gap3: None,
        min_proved_margin: None,
        gaps: Vec::new(),
        elapsed: Duration::ZERO,
    };
    for (k, (cfg, log)) in logs.into_iter().enumerate() {
        for (check, r) in log.residuals {
            let worst = report.worst_by_check.entry(check.to_string()).or_insert(0.0);
            *worst = worst.max(r);
            report.worst_residual = report.worst_residual.max(r);
            if r > options.tolerance {
                report.failures.push(Failure {
                    trial: k as u64,
                    check: check.to_string(),
                    residual: r,
                    configuration: cfg.clone(),
                });
            }
        }
        for check in log.skipped {
            *report.skipped.entry(check.to_string()).or_insert(0) += 1;
        }
        if let Some(g) = log.gaps {
            let min = |slot: &mut Option<f64>, v: f64| *slot = Some(slot.map_or(v, |s: f64| s.min(v)));
            min(&mut report.min_gap2, g.gap2);
            min(&mut report.min_gap3, g.gap3);
            min(&mut report.min_proved_margin, g.proved_margin);
            report.gaps.push(g);
        }
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let m = a.norm().max(b.norm());
    if m == 0.0 {
        0.0
    } else {
        (a - b).norm() / m
    }
}

/// Closed forms against coordinate computations.
///
/// * `n3.*`: `det M = d3 + 8abc`, real, and at least `8abc`.
/// * `adef.re`, `adef.im`: `z_ij conj(z_kj)` against projected distances
///   and Heron's formula on the projected triangle.
/// * `quadric`: `16 A_ijk A_ijl` in the base frame, with the height
///   correction for the off-plane point.
/// * `cayley_menger`, `heron`, `volume_height`: volume and face areas from
///   edges against cross products.
/// * `re_closed_form`: `Re(det M)` against the edge-length formula.
/// * `area_product`: the reduction of `A_ijk A_lmn` for planar inputs.
pub fn run_identity_suite(spec: &GeneratorSpec, options: &SuiteOptions) -> Result<Report> {
    run_suite("identity", spec, options, |_, cfg, log| identity_trial(cfg, log))
}

fn identity_trial(cfg: &Configuration, log: &mut TrialLog) {
    let n = cfg.len();
    let l = cfg.mean_edge();
    let det = match atiyah_det(cfg) {
        Ok(d) => d,
        Err(_) => return log.record("det", f64::INFINITY),
    };
    match n {
        2 => log.record("n2", (det.det_m - Complex64::new(2.0 * cfg.distance(0, 1), 0.0)).norm() / l),
        3 => {
            let (a, b, c) = (cfg.distance(0, 1), cfg.distance(0, 2), cfg.distance(1, 2));
            log.record("n3.closed_form", (det.det_m.re - det_m_n3(a, b, c)).abs() / l.powi(3));
            log.record("n3.imaginary", det.det_m.im.abs() / l.powi(3));
            log.record("n3.lower_bound", (8.0 * a * b * c - det.det_m.re).max(0.0) / l.powi(3));
        }
        _ => {}
    }

    // projected triangle identities
    let z = |i: usize, j: usize| cfg.point(i).zeta() - cfg.point(j).zeta();
    let (mut worst_re, mut worst_im) = (0.0f64, 0.0f64);
    for i in 0..n.min(5) {
        for j in 0..n.min(5) {
            for k in 0..n.min(5) {
                if i == j || j == k || i == k {
                    continue;
                }
                let p = z(i, j) * z(k, j).conj();
                let (dij, dkj, dki) = (z(i, j).norm(), z(k, j).norm(), z(k, i).norm());
                let re = 0.5 * (dij * dij + dkj * dkj - dki * dki);
                worst_re = worst_re.max((p.re - re).abs() / (l * l));
                let a = signed_projected_area(cfg, i, j, k);
                let heron = heron_16a2(dij, dkj, dki);
                worst_im = worst_im.max((16.0 * a * a - heron).abs() / l.powi(4));
                worst_im = worst_im.max((p.im - 2.0 * a).abs() / (l * l));
            }
        }
    }
    log.record("adef.re", worst_re);
    log.record("adef.im", worst_im);

    if n != 4 {
        return;
    }
    let edges = match EdgeLengths4::from_config(cfg) {
        Ok(e) => e,
        Err(_) => return log.record("edges", f64::INFINITY),
    };
    let p = |i: usize| cfg.point(i);
    let cross = (p(1) - p(0)).cross(&(p(2) - p(0)));
    let triple = cross.dot(&(p(3) - p(0)));
    // 144 V^2 = 4 triple^2
    log.record("cayley_menger", (cayley_menger_144v2(&edges) - 4.0 * triple * triple).abs() / l.powi(6));

    let mut worst_heron = 0.0f64;
    for [i, j, k] in FACES {
        let (i, j, k) = (i - 1, j - 1, k - 1);
        let area2 = (p(j) - p(i)).cross(&(p(k) - p(i))).norm_sqr();
        let h = heron_16a2(cfg.distance(i, j), cfg.distance(i, k), cfg.distance(j, k));
        worst_heron = worst_heron.max((h - 4.0 * area2).abs() / l.powi(4));
    }
    log.record("heron", worst_heron);

    match re_det_m_n4(&edges) {
        Ok(re) => log.record("re_closed_form", (det.det_m.re - re).abs() / l.powi(6)),
        Err(_) => log.record("re_closed_form", f64::INFINITY),
    }

    match base_frame(cfg) {
        Ok(frame) => {
            // V = r A / 3 with A the base triangle and r the height of p_3
            let base = 0.5 * cross.norm();
            let height = frame.point(3).t.abs();
            log.record("volume_height", (triple.abs() / 6.0 - height * base / 3.0).abs() / l.powi(3));
            let mut worst = 0.0f64;
            for (i, j) in [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)] {
                let rest: Vec<usize> = (0..4).filter(|&x| x != i && x != j).collect();
                match area_quadric_check(&frame, [i, j, rest[0], rest[1]]) {
                    Ok(r) => worst = worst.max(r / l.powi(4)),
                    Err(_) => worst = f64::INFINITY,
                }
            }
            log.record("quadric", worst);
        }
        Err(_) => {
            log.skipped.push("volume_height");
            log.skipped.push("quadric");
        }
    }

    if cfg.points().iter().all(|q| q.t == cfg.point(0).t) {
        log.record_result(
            "area_product",
            area_product_reduction_check(cfg, [0, 1, 2], [3, 1, 2]).map(|r| r / l.powi(4)),
        );
    }
}

/// Symmetries of `det M`: rotations, translations, relabelling, reflection
/// (conjugates), scaling (weight `n(n-1)/2`), the scale-free `D`, and the
/// choice of which end of each pair takes the plain lift (a sign
/// `(-1)^(n(n-1)/2)`). Residuals are relative.
pub fn run_invariance_suite(spec: &GeneratorSpec, options: &SuiteOptions) -> Result<Report> {
    run_suite("invariance", spec, options, |k, cfg, log| invariance_trial(spec, k, cfg, log))
}

fn invariance_trial(spec: &GeneratorSpec, k: u64, cfg: &Configuration, log: &mut TrialLog) {
    // a second stream, independent of the one that drew the configuration
    let mut rng = spec.rng(k ^ 0xa5a5_a5a5_0000_0000);
    let n = cfg.len();
    let det = |c: Result<Configuration>| c.and_then(|c| atiyah_det(&c));
    let base = match atiyah_det(cfg) {
        Ok(d) => d,
        Err(_) => return log.record("det", f64::INFINITY),
    };
    let mut check = |name: &'static str, r: Result<f64>| log.record_result(name, r);

    let rot = random_rotation(&mut rng);
    check("rotation", det(cfg.rotated(&rot)).map(|d| rel(d.det_m, base.det_m)));

    let shift = generators::unit_vector(&mut rng).scale(spec.scale * rng.random_range(0.0..3.0));
    check("translation", det(cfg.translated(shift)).map(|d| rel(d.det_m, base.det_m)));

    let orders: Vec<Vec<usize>> = if n <= 4 {
        permutations(n)
    } else {
        (0..24)
            .map(|_| {
                let mut o: Vec<usize> = (0..n).collect();
                o.shuffle(&mut rng);
                o
            })
            .collect()
    };
    let mut worst = Ok(0.0f64);
    for order in &orders {
        worst = worst.and_then(|w| det(cfg.permuted(order)).map(|d| w.max(rel(d.det_m, base.det_m))));
    }
    check("permutation", worst);

    check("reflection", det(cfg.reflected()).map(|d| rel(d.det_m, base.det_m.conj())));

    let lambda: f64 = rng.random_range(0.25..4.0);
    let weight = (n * (n - 1) / 2) as i32;
    let scaled = det(cfg.scaled(lambda));
    check(
        "scaling",
        scaled.as_ref().map(|d| rel(d.det_m, base.det_m * lambda.powi(weight))).map_err(clone_err),
    );
    check("scale_free_d", scaled.map(|d| rel(d.d, base.d)));

    let swapped = atiyah_matrix_with(cfg, PairConvention::LaterLifts, |_, _, v| lift(v)).and_then(|m| m.determinant());
    check("pair_convention", swapped.map(|d| rel(d, base.det_m * PairConvention::swap_sign(n))));
}

fn clone_err(e: &Error) -> Error {
    Error::NumericalBreakdown(e.to_string())
}

/// All orderings of `0..n`, identity first.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 4 {
        return VertexPermutation::all().iter().map(|p| (1..=4).map(|i| p.apply(i) - 1).collect()).collect();
    }
    let mut out = vec![Vec::new()];
    for k in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..=k).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, k);
                    q
                })
            })
            .collect();
    }
    out.sort();
    out
}

/// Four-point scan of the proved bound `Re(det M) >= 60 prod r` and the two
/// conjectured gaps. Violations of any of the three beyond `-tolerance`
/// (after normalisation) are failures; the minima are reported either way.
pub fn run_conjecture_scan(spec: &GeneratorSpec, options: &SuiteOptions) -> Result<Report> {
    if spec.n != 4 {
        return Err(Error::InvalidInput(format!("the conjecture scan needs n = 4, got {}", spec.n)));
    }
    run_suite("conjecture-scan", spec, options, scan_trial)
}

fn scan_trial(k: u64, cfg: &Configuration, log: &mut TrialLog) {
    let (det, edges) = match (atiyah_det(cfg), EdgeLengths4::from_config(cfg)) {
        (Ok(d), Ok(e)) => (d, e),
        _ => return log.record("det", f64::INFINITY),
    };
    let l = cfg.mean_edge();
    let gaps = ConjectureGaps::from_abs_det(&edges, det.det_m.norm());
    let record = GapRecord {
        trial: k,
        mean_edge: l,
        abs_d: det.d.norm(),
        proved_margin: (det.det_m.re - 60.0 * edges.product()) / l.powi(6),
        gap2: gaps.gap2 / l.powi(6),
        gap3: gaps.gap3 / l.powi(12),
    };
    log.record("proved_bound", (-record.proved_margin).max(0.0));
    log.record("conjecture2", (-record.gap2).max(0.0));
    log.record("conjecture3", (-record.gap3).max(0.0));
    log.gaps = Some(record);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_lists() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(4)[0], vec![0, 1, 2, 3]);
        assert_eq!(permutations(2), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn small_identity_run_is_clean() {
        let spec = GeneratorSpec::new(GeneratorKind::UniformBall, 4, 42);
        let report = run_identity_suite(&spec, &SuiteOptions::new(50, 1e-8)).unwrap();
        assert!(report.is_clean(), "{}", report.summary());
        for check in ["adef.re", "adef.im", "cayley_menger", "heron", "quadric", "re_closed_form", "volume_height"] {
            assert!(report.worst_by_check.contains_key(check), "{check}");
        }
    }

    #[test]
    fn planar_runs_include_the_area_product() {
        let spec = GeneratorSpec::new(GeneratorKind::Planar, 4, 5).with_degeneracy(0.0);
        let report = run_identity_suite(&spec, &SuiteOptions::new(50, 1e-8)).unwrap();
        assert!(report.is_clean(), "{}", report.summary());
        assert!(report.worst_by_check.contains_key("area_product"));
    }

    #[test]
    fn scan_reports_minima() {
        let spec = GeneratorSpec::new(GeneratorKind::UniformBall, 4, 9);
        let report = run_conjecture_scan(&spec, &SuiteOptions::new(100, 1e-9)).unwrap();
        assert!(report.is_clean());
        assert_eq!(report.gaps.len(), 100);
        assert!(report.min_gap2.unwrap() > 0.0);
        assert!(report.min_proved_margin.unwrap() > 0.0);
        assert!(report.to_csv().lines().count() == 101);
        assert!(run_conjecture_scan(&GeneratorSpec::new(GeneratorKind::UniformBall, 3, 9), &SuiteOptions::new(1, 1e-9)).is_err());
    }

    #[test]
    fn failures_match_worst_residual() {
        let spec = GeneratorSpec::new(GeneratorKind::UniformBall, 4, 1);
        // an absurd tolerance turns rounding noise into failures
        let report = run_invariance_suite(&spec, &SuiteOptions::new(20, 0.0)).unwrap();
        assert!(!report.is_clean());
        assert!(report.worst_residual > report.tolerance);
        assert!(report.failures.iter().all(|f| f.residual > 0.0));
    }
}
