//! End-to-end workflow: geometry, coupling model, normalization, exhaustive
//! oracle, QAOA training, far-field validation and the run report.
//!
//! Every number in a [`RunReport`] except the `timing` block is a pure
//! function of the configuration (including `qaoa.seed`), so two runs of the
//! same configuration serialize to identical JSON once timing is stripped.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, ScenarioSection};
use crate::coupling::{build_model, normalize, IsingInstance, ModelId};
use crate::error::Result;
use crate::geometry::{build_geometry, ArrayGeometry, Direction};
use crate::ising::{build_cost_diagonal_capped, cost_of_index, Bitstring};
use crate::metrics;
use crate::oracle::{exhaustive_search_capped, OracleResult};
use crate::qaoa::{most_probable_bitstring, optimize, ConvergenceTrace, OptimizerConfig, QaoaParams};
use crate::validator::{validate_bitstring, RadiationPattern};

pub const REPORT_FORMAT: &str = "ris-qaoa-run-report/1";
pub const BITSTRING_CONVENTION: &str = "character i is element i (row-major, i = row * cols + col, element 0 leftmost); \
     '1' is a pi phase shift (spin -1); basis index bit i is element i";
pub const OBJECTIVE_CONVENTION: &str = "objectives are normalized coupling-model values to maximize; \
     the QAOA cost Hamiltonian is their negation";
pub const OVERHEAD_LABEL: &str = "instance construction + exhaustive oracle";
/// Optimal bitstrings listed in a report before truncation.
pub const ORACLE_SET_LIMIT: usize = 64;
/// Lower bound of the heatmap color scale.
pub const HEATMAP_FLOOR_DB: f64 = -40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineOptions {
    pub run_oracle: bool,
    pub run_qaoa: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self { run_oracle: true, run_qaoa: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEcho {
    pub model: ModelId,
    pub alpha: f64,
    /// Resolved cutoff in meters (models 2 and 3).
    pub cutoff_m: f64,
    /// Resolved numerator of the `1/d` penalty (model 2).
    pub inverse_distance_scale: f64,
    pub edge_count: usize,
    pub normalization_sum: f64,
    /// Constant `sum |B_i|^2 / normalization_sum` (model 4; 0 otherwise).
    pub diagonal_offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidatorEcho {
    pub alpha: f64,
    pub theta_step_deg: f64,
    pub phi_step_deg: f64,
    pub element_exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub objective_max: f64,
    pub objective_min: f64,
    pub degeneracy: usize,
    pub tolerance: f64,
    pub optimal_set: Vec<Bitstring>,
    pub optimal_set_truncated: bool,
}

impl OracleSummary {
    fn new(oracle: &OracleResult) -> Self {
        let set = oracle.optimal_set();
        Self {
            objective_max: -oracle.c_min,
            objective_min: -oracle.c_max,
            degeneracy: oracle.degeneracy(),
            tolerance: oracle.tolerance,
            optimal_set_truncated: set.len() > ORACLE_SET_LIMIT,
            optimal_set: set.into_iter().take(ORACLE_SET_LIMIT).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaSummary {
    pub best_bitstring: Bitstring,
    pub probability: f64,
    pub objective: f64,
    pub oracle_optimal: Option<bool>,
    pub expected_objective: f64,
    pub approx_ratio: Option<f64>,
    pub overlap: Option<f64>,
    pub best_restart: usize,
    pub best_params: QaoaParams,
    pub restart_expected_objectives: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointingSummary {
    pub bitstring: Bitstring,
    pub target: Direction,
    pub peak: Direction,
    pub epsilon_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub qaoa: Option<PointingSummary>,
    /// The lowest-index oracle-optimal bitstring.
    pub oracle: Option<PointingSummary>,
}

/// Wall-clock fields; the only non-deterministic part of a report.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Timing {
    pub overhead_label: String,
    pub overhead_s: f64,
    pub optimization_s: f64,
    pub iterations: usize,
    pub per_iteration_s: Option<f64>,
    pub validation_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub format: String,
    pub bitstring_convention: String,
    pub objective_convention: String,
    pub scenario: ScenarioSection,
    pub model: ModelEcho,
    pub optimizer: OptimizerConfig,
    pub validator: ValidatorEcho,
    pub oracle: Option<OracleSummary>,
    pub qaoa: Option<QaoaSummary>,
    pub validation: ValidationSummary,
    pub timing: Timing,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are finite")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| crate::Error::Parse(e.to_string()))
    }

    /// The report with every wall-clock field zeroed.
    pub fn without_timing(&self) -> Self {
        Self { timing: Timing::default(), ..self.clone() }
    }
}

/// A report plus the artifacts written next to it.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub trace: Option<ConvergenceTrace>,
    /// Pattern of the QAOA bitstring, or of the oracle optimum without QAOA.
    pub pattern: Option<RadiationPattern>,
    /// Normalized objective couplings.
    pub edge_list: String,
}

impl RunOutput {
    /// Writes `report.json`, `edges.txt` and, when present, `trace.csv`,
    /// `pattern.csv` and `pattern.pgm`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.report.to_json())?;
        fs::write(dir.join("edges.txt"), &self.edge_list)?;
        if let Some(trace) = &self.trace {
            fs::write(dir.join("trace.csv"), trace.to_csv())?;
        }
        if let Some(p) = &self.pattern {
            fs::write(dir.join("pattern.csv"), p.to_csv())?;
            fs::write(dir.join("pattern.pgm"), p.to_pgm(HEATMAP_FLOOR_DB))?;
        }
        Ok(())
    }
}

fn pointing(
    geom: &ArrayGeometry,
    bits: &Bitstring,
    cfg: &RunConfig,
) -> Result<(PointingSummary, RadiationPattern)> {
    let (pattern, rep) = validate_bitstring(geom, bits, cfg.validation_alpha(), &cfg.validator.grid())?;
    let summary = PointingSummary {
        bitstring: bits.clone(),
        target: rep.target,
        peak: rep.actual,
        epsilon_deg: rep.epsilon_deg,
    };
    Ok((summary, pattern))
}

/// Runs every enabled stage for one configuration.
pub fn run(cfg: &RunConfig, opts: PipelineOptions) -> Result<RunOutput> {
    cfg.validate()?;
    let n = cfg.scenario().element_count();
    let max_qubits = cfg.qaoa.max_qubits;

    let t0 = Instant::now();
    let geom = build_geometry(&cfg.scenario())?;
    let spec = cfg.model.spec();
    let built = build_model(&geom, &spec)?;
    let objective = normalize(&built.instance)?;
    let hamiltonian = objective.clone().into_hamiltonian();
    let oracle = if opts.run_oracle {
        Some(exhaustive_search_capped(&hamiltonian, max_qubits)?)
    } else {
        None
    };
    let overhead_s = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let mut trace = None;
    let mut qaoa = None;
    if opts.run_qaoa {
        let diag = build_cost_diagonal_capped(&hamiltonian, max_qubits)?;
        let result = optimize(&diag, oracle.as_ref(), &cfg.qaoa)?;
        let (best, probability) = most_probable_bitstring(&result.final_state);
        let index = best.to_index().expect("at most 64 qubits");
        let metric = |f: &dyn Fn(&OracleResult) -> Result<f64>| oracle.as_ref().map(f).transpose();
        qaoa = Some(QaoaSummary {
            objective: -cost_of_index(&hamiltonian, index),
            oracle_optimal: oracle.as_ref().map(|o| o.is_optimal(index)),
            expected_objective: -result.final_expectation,
            approx_ratio: metric(&|o| metrics::approximation_ratio(result.final_expectation, o.c_min, o.c_max))?,
            overlap: metric(&|o| metrics::overlap(result.final_state.amplitudes(), &o.optimal_indices))?,
            best_bitstring: best,
            probability,
            best_restart: result.best_restart,
            best_params: result.best_params.clone(),
            restart_expected_objectives: result.restarts.iter().map(|r| -r.final_expectation).collect(),
        });
        trace = Some(result.trace);
    }
    let optimization_s = t1.elapsed().as_secs_f64();

    let t2 = Instant::now();
    let mut pattern = None;
    let qaoa_pointing = match &qaoa {
        Some(q) => {
            let (summary, p) = pointing(&geom, &q.best_bitstring, cfg)?;
            pattern = Some(p);
            Some(summary)
        }
        None => None,
    };
    let oracle_pointing = match &oracle {
        Some(o) => {
            let first = Bitstring::from_index(o.optimal_indices[0], n);
            let (summary, p) = pointing(&geom, &first, cfg)?;
            pattern.get_or_insert(p);
            Some(summary)
        }
        None => None,
    };
    let validation_s = t2.elapsed().as_secs_f64();

    let iterations = if opts.run_qaoa { cfg.qaoa.steps * cfg.qaoa.restarts } else { 0 };
    let report = RunReport {
        format: REPORT_FORMAT.into(),
        bitstring_convention: BITSTRING_CONVENTION.into(),
        objective_convention: OBJECTIVE_CONVENTION.into(),
        scenario: cfg.scenario.clone(),
        model: ModelEcho {
            model: spec.model,
            alpha: spec.alpha,
            cutoff_m: spec.resolved_cutoff(&geom),
            inverse_distance_scale: spec.resolved_inverse_distance_scale(&geom),
            edge_count: objective.edge_count(),
            normalization_sum: objective.normalization_sum.unwrap_or(1.0),
            diagonal_offset: objective.diagonal_offset,
        },
        optimizer: cfg.qaoa.clone(),
        validator: ValidatorEcho {
            alpha: cfg.validation_alpha(),
            theta_step_deg: cfg.validator.theta_step_deg,
            phi_step_deg: cfg.validator.phi_step_deg,
            element_exponent: cfg.validator.element_exponent,
        },
        oracle: oracle.as_ref().map(OracleSummary::new),
        qaoa,
        validation: ValidationSummary { qaoa: qaoa_pointing, oracle: oracle_pointing },
        timing: Timing {
            overhead_label: OVERHEAD_LABEL.into(),
            overhead_s,
            optimization_s,
            iterations,
            per_iteration_s: (iterations > 0).then(|| optimization_s / iterations as f64),
            validation_s,
        },
    };
    Ok(RunOutput { report, trace, pattern, edge_list: objective.to_edge_list() })
}

/// Loads a TOML configuration and runs it.
pub fn run_pipeline(config_path: &Path, opts: PipelineOptions) -> Result<RunOutput> {
    run(&RunConfig::load(config_path)?, opts)
}

/// Normalized objective instance of the configured model, as exported to `edges.txt`.
pub fn objective_instance(cfg: &RunConfig) -> Result<IsingInstance> {
    cfg.validate()?;
    let geom = build_geometry(&cfg.scenario())?;
    normalize(&build_model(&geom, &cfg.model.spec())?.instance)
}

/// Pattern and pointing error of an explicit bitstring.
pub fn pattern_for(cfg: &RunConfig, bits: &Bitstring) -> Result<(PointingSummary, RadiationPattern)> {
    cfg.validate()?;
    let geom = build_geometry(&cfg.scenario())?;
    pointing(&geom, bits, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub model: ModelId,
    pub edge_count: usize,
    pub epsilon_qaoa_deg: Option<f64>,
    pub epsilon_oracle_deg: Option<f64>,
    pub approx_ratio: Option<f64>,
    pub overlap: Option<f64>,
    pub oracle_match: Option<bool>,
}

impl ComparisonRow {
    fn new(report: &RunReport) -> Self {
        Self {
            model: report.model.model,
            edge_count: report.model.edge_count,
            epsilon_qaoa_deg: report.validation.qaoa.as_ref().map(|p| p.epsilon_deg),
            epsilon_oracle_deg: report.validation.oracle.as_ref().map(|p| p.epsilon_deg),
            approx_ratio: report.qaoa.as_ref().and_then(|q| q.approx_ratio),
            overlap: report.qaoa.as_ref().and_then(|q| q.overlap),
            oracle_match: report.qaoa.as_ref().and_then(|q| q.oracle_optimal),
        }
    }
}

fn cell(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.digits$}"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub runs: Vec<RunReport>,
}

impl ComparisonReport {
    pub fn to_table(&self) -> String {
        let mut out = String::from("model  edges  eps_qaoa_deg  eps_oracle_deg  approx_ratio  overlap  oracle_match\n");
        for r in &self.rows {
            writeln!(
                out,
                "{:>5}  {:>5}  {:>12}  {:>14}  {:>12}  {:>7}  {:>12}",
                r.model.number(),
                r.edge_count,
                cell(r.epsilon_qaoa_deg, 3),
                cell(r.epsilon_oracle_deg, 3),
                cell(r.approx_ratio, 4),
                cell(r.overlap, 4),
                r.oracle_match.map_or("-".to_string(), |m| m.to_string()),
            )
            .unwrap();
        }
        out
    }
}

/// Runs all four models on the configured scenario.
pub fn compare_models(cfg: &RunConfig, opts: PipelineOptions) -> Result<ComparisonReport> {
    let mut runs = Vec::with_capacity(ModelId::ALL.len());
    for model in ModelId::ALL {
        let mut c = cfg.clone();
        c.model.model = model;
        runs.push(run(&c, opts)?.report);
    }
    Ok(ComparisonReport { rows: runs.iter().map(ComparisonRow::new).collect(), runs })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub validation_alpha: f64,
    pub epsilon_qaoa_deg: Option<f64>,
    pub epsilon_oracle_deg: Option<f64>,
    pub approx_ratio: Option<f64>,
    pub overlap: Option<f64>,
    pub oracle_match: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub model: ModelId,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn min_epsilon_oracle(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.epsilon_oracle_deg).reduce(f64::min)
    }

    pub fn min_epsilon_qaoa(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.epsilon_qaoa_deg).reduce(f64::min)
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("model {}\nalpha  val_alpha  eps_qaoa_deg  eps_oracle_deg  approx_ratio  overlap\n", self.model.number());
        for r in &self.rows {
            writeln!(
                out,
                "{:>5}  {:>9}  {:>12}  {:>14}  {:>12}  {:>7}",
                r.alpha,
                r.validation_alpha,
                cell(r.epsilon_qaoa_deg, 3),
                cell(r.epsilon_oracle_deg, 3),
                cell(r.approx_ratio, 4),
                cell(r.overlap, 4),
            )
            .unwrap();
        }
        out
    }
}

/// Runs the configured model once per coupling strength. The validation
/// model follows `alpha` unless `validator.alpha` is set.
pub fn alpha_sweep(cfg: &RunConfig, alphas: &[f64], opts: PipelineOptions) -> Result<SweepReport> {
    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let mut c = cfg.clone();
        c.model.alpha = alpha;
        let report = run(&c, opts)?.report;
        let row = ComparisonRow::new(&report);
        rows.push(SweepRow {
            alpha,
            validation_alpha: report.validator.alpha,
            epsilon_qaoa_deg: row.epsilon_qaoa_deg,
            epsilon_oracle_deg: row.epsilon_oracle_deg,
            approx_ratio: row.approx_ratio,
            overlap: row.overlap,
            oracle_match: row.oracle_match,
        });
    }
    Ok(SweepReport { model: cfg.model.model, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(size: usize, model: ModelId) -> RunConfig {
        let mut cfg = RunConfig::default();
        cfg.scenario.rows = size;
        cfg.scenario.cols = size;
        cfg.model.model = model;
        cfg.qaoa.steps = 20;
        cfg.qaoa.restarts = 2;
        cfg.qaoa.depth = 2;
        cfg.validator.theta_step_deg = 2.0;
        cfg.validator.phi_step_deg = 2.0;
        cfg
    }

    #[test]
    fn report_is_complete_and_round_trips() {
        let out = run(&small(2, ModelId::FarField), PipelineOptions::default()).unwrap();
        let r = &out.report;
        assert_eq!(r.model.edge_count, 6);
        let q = r.qaoa.as_ref().unwrap();
        let o = r.oracle.as_ref().unwrap();
        assert!(q.approx_ratio.unwrap() <= 1.0 + 1e-12);
        assert!(o.objective_max >= q.expected_objective);
        assert!(r.validation.qaoa.is_some() && r.validation.oracle.is_some());
        assert_eq!(r.timing.iterations, 40);
        assert_eq!(out.trace.as_ref().unwrap().records.len(), 2 * 21);
        let json = r.to_json();
        let back = RunReport::from_json(&json).unwrap();
        assert_eq!(&back, r);
        assert_eq!(back.to_json(), json);
    }

    #[test]
    fn stages_can_be_skipped() {
        let cfg = small(2, ModelId::IdealPhase);
        let out = run(&cfg, PipelineOptions { run_oracle: false, run_qaoa: true }).unwrap();
        assert!(out.report.oracle.is_none());
        let q = out.report.qaoa.unwrap();
        assert!(q.approx_ratio.is_none() && q.oracle_optimal.is_none());
        assert!(out.trace.unwrap().to_csv().lines().nth(1).unwrap().ends_with(",,"));

        let out = run(&cfg, PipelineOptions { run_oracle: true, run_qaoa: false }).unwrap();
        assert!(out.report.qaoa.is_none() && out.trace.is_none());
        assert!(out.pattern.is_some());
        assert_eq!(out.report.timing.per_iteration_s, None);
    }

    #[test]
    fn optimal_set_is_truncated() {
        let oracle = OracleResult {
            n: 8,
            c_min: -1.0,
            c_max: 1.0,
            optimal_indices: (0..100).collect(),
            tolerance: 2e-9,
        };
        let s = OracleSummary::new(&oracle);
        assert_eq!(s.degeneracy, 100);
        assert_eq!(s.optimal_set.len(), ORACLE_SET_LIMIT);
        assert!(s.optimal_set_truncated);
        assert_eq!(s.optimal_set[1].to_string(), "10000000");
        assert_eq!((s.objective_max, s.objective_min), (1.0, -1.0));
    }

    #[test]
    fn artifacts_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let out = run(&small(2, ModelId::SphericalWave), PipelineOptions::default()).unwrap();
        out.write_to(dir.path()).unwrap();
        for f in ["report.json", "edges.txt", "trace.csv", "pattern.csv", "pattern.pgm"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let edges: IsingInstance = fs::read_to_string(dir.path().join("edges.txt")).unwrap().parse().unwrap();
        assert_eq!(edges.edge_count(), out.report.model.edge_count);
    }

    #[test]
    fn comparison_and_sweep_tables() {
        let cmp = compare_models(&small(2, ModelId::IdealPhase), PipelineOptions::default()).unwrap();
        assert_eq!(cmp.rows.len(), 4);
        assert_eq!(cmp.to_table().lines().count(), 5);
        let sweep = alpha_sweep(&small(2, ModelId::FarField), &[0.1, 0.3], PipelineOptions::default()).unwrap();
        assert_eq!(sweep.rows.len(), 2);
        assert_eq!(sweep.rows[1].validation_alpha, 0.3);
        assert!(sweep.min_epsilon_oracle().unwrap() <= sweep.rows[0].epsilon_oracle_deg.unwrap());
    }
}
