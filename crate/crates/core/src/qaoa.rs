//! Full state-vector QAOA: circuit application, expectation, adjoint
//! gradients, and multi-start Adam training.
//!
//! One layer is `exp(-i beta H_M) exp(-i gamma H_C)` with `H_M = sum_q X_q`,
//! starting from `|+>^n`. `H_C` is diagonal, so the cost layer is one
//! elementwise phase pass and the mixer is `n` single-qubit rotations.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{check_capacity, Bitstring, CostDiagonal, DEFAULT_MAX_QUBITS};
use crate::kernels;
use crate::metrics;
use crate::optim::{Adam, AdamConfig};
use crate::oracle::OracleResult;
use crate::parallel;

/// Restarts run one after another (kernels still parallel) at or above this size.
const SEQUENTIAL_RESTART_QUBITS: usize = 20;

/// Variational angles, one `(gamma, beta)` pair per layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gamma: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        let p = Self { gamma, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn zeros(depth: usize) -> Self {
        Self {
            gamma: vec![0.0; depth],
            beta: vec![0.0; depth],
        }
    }

    pub fn depth(&self) -> usize {
        self.gamma.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma.is_empty() {
            return Err(Error::config("qaoa.depth", "must be at least 1"));
        }
        if self.gamma.len() != self.beta.len() {
            return Err(Error::Dimension {
                expected: self.gamma.len(),
                actual: self.beta.len(),
            });
        }
        Ok(())
    }

    /// `[gamma..., beta...]`.
    pub fn to_flat(&self) -> Vec<f64> {
        self.gamma.iter().chain(&self.beta).copied().collect()
    }

    pub fn from_flat(flat: &[f64]) -> Self {
        let p = flat.len() / 2;
        Self {
            gamma: flat[..p].to_vec(),
            beta: flat[p..].to_vec(),
        }
    }
}

/// A normalized `2^n` amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct QaoaState {
    amplitudes: Vec<Complex64>,
}

impl QaoaState {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        if !amplitudes.len().is_power_of_two() {
            return Err(Error::config("state", "length must be a power of two"));
        }
        Ok(Self { amplitudes })
    }

    pub fn uniform(n: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        kernels::fill_uniform(&mut amplitudes);
        Self { amplitudes }
    }

    pub fn basis(n: usize, index: u64) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[index as usize] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn qubits(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn probability(&self, index: u64) -> f64 {
        self.amplitudes[index as usize].norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        kernels::norm_sqr(&self.amplitudes)
    }
}

/// Expectation value and its gradient with respect to every angle.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub value: f64,
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
}

impl Gradient {
    pub fn to_flat(&self) -> Vec<f64> {
        self.gamma.iter().chain(&self.beta).copied().collect()
    }
}

/// Reusable forward/adjoint buffers for one problem size.
///
/// When the cost diagonal is flip-symmetric the state stays symmetric under
/// the global bit flip, and by default only its lower half is simulated (see
/// [`kernels`]). [`Simulator::full`] disables the reduction.
pub struct Simulator {
    n: usize,
    allow_reduction: bool,
    reduced: bool,
    psi: Vec<Complex64>,
    lam: Vec<Complex64>,
}

impl Simulator {
    pub fn new(n: usize) -> Self {
        Self { n, allow_reduction: true, reduced: false, psi: Vec::new(), lam: Vec::new() }
    }

    /// Always simulates all `2^n` amplitudes.
    pub fn full(n: usize) -> Self {
        Self { allow_reduction: false, ..Self::new(n) }
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    /// Whether the last forward pass used the flip-reduced representation.
    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    fn prepare<'d>(&mut self, diag: &'d CostDiagonal, params: &QaoaParams) -> Result<&'d [f64]> {
        params.validate()?;
        if diag.qubits() != self.n {
            return Err(Error::Dimension { expected: 1 << self.n, actual: diag.len() });
        }
        self.reduced = self.allow_reduction && self.n >= 2 && diag.is_flip_symmetric();
        let len = if self.reduced { diag.len() / 2 } else { diag.len() };
        if self.psi.len() != len {
            self.psi = vec![Complex64::new(0.0, 0.0); len];
            self.lam = Vec::new();
        }
        Ok(&diag.values()[..len])
    }

    fn mix(&mut self, beta: f64) {
        kernels::apply_mixer(&mut self.psi, beta);
        if self.reduced {
            kernels::apply_mirror_mixer(&mut self.psi, beta);
        }
    }

    /// Prepares `|psi(gamma, beta)>` in the internal buffer.
    pub fn forward(&mut self, diag: &CostDiagonal, params: &QaoaParams) -> Result<()> {
        self.forward_observed(diag, params, |_, _| {})
    }

    /// Like [`Simulator::forward`], calling `observe(layer, amplitudes)` after
    /// every layer with the internal (unit-norm, possibly reduced) buffer.
    pub fn forward_observed(
        &mut self,
        diag: &CostDiagonal,
        params: &QaoaParams,
        mut observe: impl FnMut(usize, &[Complex64]),
    ) -> Result<()> {
        let d = self.prepare(diag, params)?;
        kernels::fill_uniform(&mut self.psi);
        for (layer, (&g, &b)) in params.gamma.iter().zip(&params.beta).enumerate() {
            kernels::apply_cost_phase(&mut self.psi, d, g);
            self.mix(b);
            observe(layer, &self.psi);
        }
        Ok(())
    }

    /// `|<k|psi>|^2` of the last forward state.
    pub fn probability(&self, index: u64) -> f64 {
        let k = index as usize;
        if self.reduced {
            let half = self.psi.len();
            let k = if k < half { k } else { 2 * half - 1 - k };
            self.psi[k].norm_sqr() / 2.0
        } else {
            self.psi[k].norm_sqr()
        }
    }

    /// `<psi|H_C|psi>` of the last forward state.
    pub fn expectation(&self, diag: &CostDiagonal) -> f64 {
        kernels::expectation(&self.psi, &diag.values()[..self.psi.len()])
    }

    /// Total probability on `indices`.
    pub fn overlap(&self, indices: &[u64]) -> Result<f64> {
        if indices.is_empty() {
            return Err(Error::Empty("optimal set"));
        }
        let len = 1u64 << self.n;
        indices
            .iter()
            .map(|&i| {
                if i < len {
                    Ok(self.probability(i))
                } else {
                    Err(Error::Index { index: i as usize, len: len as usize })
                }
            })
            .sum()
    }

    /// The last forward state over all `2^n` amplitudes.
    pub fn to_state(&self) -> QaoaState {
        if !self.reduced {
            return QaoaState { amplitudes: self.psi.clone() };
        }
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        let lower = self.psi.iter().map(|a| a * scale);
        let upper = self.psi.iter().rev().map(|a| a * scale);
        QaoaState { amplitudes: lower.chain(upper).collect() }
    }

    /// Adjoint pass. Must follow [`Simulator::forward`] with the same inputs;
    /// the forward state is consumed.
    pub fn backward(&mut self, diag: &CostDiagonal, params: &QaoaParams) -> Result<Gradient> {
        let d = self.prepare(diag, params)?;
        if self.lam.len() != self.psi.len() {
            self.lam = vec![Complex64::new(0.0, 0.0); self.psi.len()];
        }
        let value = kernels::apply_diag(&mut self.lam, &self.psi, d);
        let p = params.depth();
        let mut grad_gamma = vec![0.0; p];
        let mut grad_beta = vec![0.0; p];
        for l in (0..p).rev() {
            let mut inner = kernels::apply_mixer_pair(&mut self.psi, &mut self.lam, -params.beta[l]);
            if self.reduced {
                inner += kernels::apply_mirror_mixer_pair(&mut self.psi, &mut self.lam, -params.beta[l]);
            }
            grad_beta[l] = 2.0 * inner.im;
            let inner = kernels::apply_cost_phase_pair(&mut self.psi, &mut self.lam, d, -params.gamma[l]);
            grad_gamma[l] = 2.0 * inner.im;
        }
        Ok(Gradient { value, gamma: grad_gamma, beta: grad_beta })
    }

    pub fn value_and_gradient(&mut self, diag: &CostDiagonal, params: &QaoaParams) -> Result<Gradient> {
        self.forward(diag, params)?;
        self.backward(diag, params)
    }
}

/// Runs the circuit and returns the final state.
pub fn apply_circuit(diag: &CostDiagonal, params: &QaoaParams) -> Result<QaoaState> {
    let mut sim = Simulator::new(diag.qubits());
    sim.forward(diag, params)?;
    Ok(sim.to_state())
}

/// `<psi|H_C|psi>`.
pub fn expectation(state: &QaoaState, diag: &CostDiagonal) -> Result<f64> {
    if state.amplitudes.len() != diag.len() {
        return Err(Error::Dimension { expected: diag.len(), actual: state.amplitudes.len() });
    }
    Ok(kernels::expectation(&state.amplitudes, diag.values()))
}

/// Exact gradient of the expectation by one forward and one reverse sweep.
pub fn gradient(diag: &CostDiagonal, params: &QaoaParams) -> Result<Gradient> {
    Simulator::new(diag.qubits()).value_and_gradient(diag, params)
}

/// Argmax of `|amplitude|^2`, lowest index on ties.
pub fn most_probable_bitstring(state: &QaoaState) -> (Bitstring, f64) {
    let (idx, p) = most_probable_index(&state.amplitudes);
    (Bitstring::from_index(idx, state.qubits()), p)
}

pub(crate) fn most_probable_index(amps: &[Complex64]) -> (u64, f64) {
    let mut best = (0u64, f64::NEG_INFINITY);
    for (i, a) in amps.iter().enumerate() {
        let p = a.norm_sqr();
        if p > best.1 {
            best = (i as u64, p);
        }
    }
    best
}

/// Draws `shots` measurement outcomes and returns the count per basis index.
/// Only used to cross-check the exact readout.
pub fn sample_counts(state: &QaoaState, shots: usize, seed: u64) -> Vec<u64> {
    use rand::Rng;
    let mut cdf = Vec::with_capacity(state.amplitudes.len());
    let mut acc = 0.0;
    for a in &state.amplitudes {
        acc += a.norm_sqr();
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; cdf.len()];
    for _ in 0..shots {
        let u: f64 = rng.random::<f64>() * acc;
        let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        counts[idx] += 1;
    }
    counts
}

/// Training hyperparameters for [`optimize`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub depth: usize,
    pub steps: usize,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub restarts: usize,
    pub init_noise_sigma: f64,
    pub gamma_max: f64,
    pub beta_max: f64,
    pub seed: u64,
    pub max_qubits: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        let adam = AdamConfig::default();
        Self {
            depth: 6,
            steps: 500,
            learning_rate: adam.learning_rate,
            adam_beta1: adam.beta1,
            adam_beta2: adam.beta2,
            adam_epsilon: adam.epsilon,
            restarts: 5,
            init_noise_sigma: 0.1,
            gamma_max: 1.0,
            beta_max: 1.0,
            seed: 0,
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.depth == 0 {
            return Err(Error::config("qaoa.depth", "must be at least 1"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::config("qaoa.learning_rate", "must be positive"));
        }
        if self.restarts == 0 {
            return Err(Error::config("qaoa.restarts", "must be at least 1"));
        }
        if !(0.0..1.0).contains(&self.adam_beta1) {
            return Err(Error::config("qaoa.adam_beta1", "must lie in [0, 1)"));
        }
        if !(0.0..1.0).contains(&self.adam_beta2) {
            return Err(Error::config("qaoa.adam_beta2", "must lie in [0, 1)"));
        }
        if !(self.adam_epsilon > 0.0) {
            return Err(Error::config("qaoa.adam_epsilon", "must be positive"));
        }
        if !(self.init_noise_sigma >= 0.0 && self.init_noise_sigma.is_finite()) {
            return Err(Error::config("qaoa.init_noise_sigma", "must be finite and non-negative"));
        }
        Ok(())
    }

    fn adam(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            beta1: self.adam_beta1,
            beta2: self.adam_beta2,
            epsilon: self.adam_epsilon,
        }
    }

    /// Ramp initialization for one restart: `gamma_l = gamma_max l / p`,
    /// `beta_l = beta_max (1 - l / p)`, each plus Gaussian noise.
    pub fn initial_params(&self, restart: usize) -> QaoaParams {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(restart as u64);
        let noise = Normal::new(0.0, self.init_noise_sigma).expect("validated sigma");
        let p = self.depth as f64;
        let mut gamma = Vec::with_capacity(self.depth);
        let mut beta = Vec::with_capacity(self.depth);
        for l in 1..=self.depth {
            let frac = l as f64 / p;
            gamma.push(self.gamma_max * frac + noise.sample(&mut rng));
            beta.push(self.beta_max * (1.0 - frac) + noise.sample(&mut rng));
        }
        QaoaParams { gamma, beta }
    }
}

/// One optimizer step of one restart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub restart: usize,
    pub step: usize,
    pub expectation: f64,
    pub approx_ratio: Option<f64>,
    pub overlap: Option<f64>,
}

/// Per-step metrics for every restart. Each restart contributes `steps + 1`
/// records: step 0 is the initialization, step `s` follows `s` updates.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub records: Vec<TraceRecord>,
}

impl ConvergenceTrace {
    pub fn restart(&self, restart: usize) -> impl Iterator<Item = &TraceRecord> {
        self.records.iter().filter(move |r| r.restart == restart)
    }

    /// CSV with header `restart,step,expectation,approx_ratio,overlap`.
    /// Missing metrics are written as empty fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("restart,step,expectation,approx_ratio,overlap\n");
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.17e}")).unwrap_or_default();
        for r in &self.records {
            writeln!(
                out,
                "{},{},{:.17e},{},{}",
                r.restart,
                r.step,
                r.expectation,
                opt(r.approx_ratio),
                opt(r.overlap)
            )
            .unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub restart: usize,
    pub initial: QaoaParams,
    pub final_params: QaoaParams,
    pub final_expectation: f64,
}

#[derive(Debug, Clone)]
pub struct OptimizeResult {
    pub best_params: QaoaParams,
    pub best_restart: usize,
    pub final_expectation: f64,
    pub restarts: Vec<RestartSummary>,
    pub trace: ConvergenceTrace,
    pub final_state: QaoaState,
}

fn record(
    restart: usize,
    step: usize,
    expectation: f64,
    sim: &Simulator,
    oracle: Option<&OracleResult>,
) -> TraceRecord {
    let (approx_ratio, overlap) = match oracle {
        Some(o) => (
            metrics::approximation_ratio(expectation, o.c_min, o.c_max).ok(),
            sim.overlap(&o.optimal_indices).ok(),
        ),
        None => (None, None),
    };
    TraceRecord { restart, step, expectation, approx_ratio, overlap }
}

fn run_restart(
    diag: &CostDiagonal,
    oracle: Option<&OracleResult>,
    cfg: &OptimizerConfig,
    restart: usize,
) -> Result<(RestartSummary, Vec<TraceRecord>)> {
    let initial = cfg.initial_params(restart);
    let mut flat = initial.to_flat();
    let mut adam = Adam::new(cfg.adam(), flat.len());
    let mut sim = Simulator::new(diag.qubits());
    let mut records = Vec::with_capacity(cfg.steps + 1);
    for step in 0..cfg.steps {
        let params = QaoaParams::from_flat(&flat);
        sim.forward(diag, &params)?;
        let overlap = oracle.and_then(|o| sim.overlap(&o.optimal_indices).ok());
        let grad = sim.backward(diag, &params)?;
        let approx_ratio =
            oracle.and_then(|o| metrics::approximation_ratio(grad.value, o.c_min, o.c_max).ok());
        records.push(TraceRecord {
            restart,
            step,
            expectation: grad.value,
            approx_ratio,
            overlap,
        });
        adam.step(&mut flat, &grad.to_flat());
    }
    let final_params = QaoaParams::from_flat(&flat);
    sim.forward(diag, &final_params)?;
    let final_expectation = sim.expectation(diag);
    records.push(record(restart, cfg.steps, final_expectation, &sim, oracle));
    Ok((
        RestartSummary { restart, initial, final_params, final_expectation },
        records,
    ))
}

/// Multi-start Adam minimization of `<H_C>`. Restarts are independent and
/// seeded from `cfg.seed` and their index; the restart with the lowest final
/// expectation wins (lowest index on ties).
pub fn optimize(
    diag: &CostDiagonal,
    oracle: Option<&OracleResult>,
    cfg: &OptimizerConfig,
) -> Result<OptimizeResult> {
    cfg.validate()?;
    check_capacity(diag.qubits(), cfg.max_qubits)?;
    let runs: Vec<Result<_>> = if diag.qubits() >= SEQUENTIAL_RESTART_QUBITS {
        (0..cfg.restarts).map(|r| run_restart(diag, oracle, cfg, r)).collect()
    } else {
        parallel::map_range(cfg.restarts, |r| run_restart(diag, oracle, cfg, r))
    };
    let mut restarts = Vec::with_capacity(cfg.restarts);
    let mut trace = ConvergenceTrace::default();
    for run in runs {
        let (summary, records) = run?;
        restarts.push(summary);
        trace.records.extend(records);
    }
    let best = restarts
        .iter()
        .fold(&restarts[0], |best, r| if r.final_expectation < best.final_expectation { r } else { best });
    let final_state = apply_circuit(diag, &best.final_params)?;
    Ok(OptimizeResult {
        best_params: best.final_params.clone(),
        best_restart: best.restart,
        final_expectation: best.final_expectation,
        restarts: restarts.clone(),
        trace,
        final_state,
    })
}
