//! Exhaustive classical baseline over all `2^n` spin configurations.
//!
//! The Gray-code search walks each index range by single-bit flips and
//! updates the cost in `O(degree)` per step. Floating-point drift is kept out
//! of the result: near-extremal candidates are re-evaluated exactly with the
//! same arithmetic as [`crate::ising::evaluate_cost`], so `c_min`/`c_max`
//! are bit-identical to the extrema of the cost diagonal.

use serde::{Deserialize, Serialize};

use crate::coupling::IsingInstance;
use crate::error::Result;
use crate::ising::{check_capacity, Bitstring, DiagonalTerms, DEFAULT_MAX_QUBITS};
use crate::parallel;

/// Degeneracy tolerance relative to the spectrum width.
pub const DEGENERACY_RTOL: f64 = 1e-9;

/// Low bits enumerated per Gray-code range; the cost is re-seeded exactly at
/// the start of every range.
const RANGE_BITS: usize = 16;

/// Relative window used to keep near-extremal candidates during the scan.
const CANDIDATE_WINDOW: f64 = 1e-6;

/// Global extrema and the full degenerate optimal set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub n: usize,
    pub c_min: f64,
    pub c_max: f64,
    /// Basis indices achieving `c_min` within `tolerance`, ascending.
    pub optimal_indices: Vec<u64>,
    /// Absolute degeneracy tolerance actually used.
    pub tolerance: f64,
}

impl OracleResult {
    pub fn degeneracy(&self) -> usize {
        self.optimal_indices.len()
    }

    pub fn optimal_set(&self) -> Vec<Bitstring> {
        self.optimal_indices
            .iter()
            .map(|&i| Bitstring::from_index(i, self.n))
            .collect()
    }

    pub fn is_optimal(&self, index: u64) -> bool {
        self.optimal_indices.binary_search(&index).is_ok()
    }
}

/// Exhaustive search with the default qubit cap.
pub fn exhaustive_search(instance: &IsingInstance) -> Result<OracleResult> {
    exhaustive_search_capped(instance, DEFAULT_MAX_QUBITS)
}

/// Gray-code exhaustive search.
pub fn exhaustive_search_capped(instance: &IsingInstance, max_qubits: usize) -> Result<OracleResult> {
    let n = instance.n();
    check_capacity(n, max_qubits)?;
    let scan = GrayScan::new(instance);
    let window = CANDIDATE_WINDOW * scan.scale;
    let m = n.min(RANGE_BITS);
    let ranges = 1usize << (n - m);
    let partials = parallel::map_range(ranges, |r| {
        let mut acc = Candidates::new(window);
        scan.walk((r as u64) << m, m, |idx, cost| acc.push(idx, cost));
        acc
    });
    let mut merged = Candidates::new(window);
    for p in partials {
        merged.merge(p);
    }
    Ok(finalize(instance, merged))
}

/// Direct evaluation of every configuration.
pub fn naive_search(instance: &IsingInstance, max_qubits: usize) -> Result<OracleResult> {
    let n = instance.n();
    check_capacity(n, max_qubits)?;
    let terms = DiagonalTerms::new(instance);
    let scale = cost_scale(instance);
    let mut acc = Candidates::new(CANDIDATE_WINDOW * scale);
    for idx in 0..(1u64 << n) {
        acc.push(idx, terms.cost(idx));
    }
    Ok(finalize(instance, acc))
}

/// Costs of every configuration as produced by the incremental Gray-code
/// walk, indexed by basis state. Used to audit the walk against direct evaluation.
pub fn gray_code_costs(instance: &IsingInstance, max_qubits: usize) -> Result<Vec<f64>> {
    let n = instance.n();
    check_capacity(n, max_qubits)?;
    let scan = GrayScan::new(instance);
    let m = n.min(RANGE_BITS);
    let mut out = vec![0.0; 1usize << n];
    for r in 0..(1u64 << (n - m)) {
        scan.walk(r << m, m, |idx, cost| out[idx as usize] = cost);
    }
    Ok(out)
}

fn cost_scale(instance: &IsingInstance) -> f64 {
    let pairs: f64 = instance
        .edges()
        .iter()
        .map(|&(i, j)| 2.0 * instance.coupling(i, j).abs())
        .sum();
    let bias: f64 = instance.bias().iter().map(|h| h.abs()).sum();
    pairs + bias
}

fn finalize(instance: &IsingInstance, acc: Candidates) -> OracleResult {
    let terms = DiagonalTerms::new(instance);
    let exact_min: Vec<(u64, f64)> = acc.low.iter().map(|&(i, _)| (i, terms.cost(i))).collect();
    let exact_max: Vec<(u64, f64)> = acc.high.iter().map(|&(i, _)| (i, terms.cost(i))).collect();
    let c_min = exact_min.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let c_max = exact_max.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let tolerance = DEGENERACY_RTOL * (c_max - c_min);
    let mut optimal_indices: Vec<u64> = exact_min
        .into_iter()
        .filter(|&(_, c)| c <= c_min + tolerance)
        .map(|(i, _)| i)
        .collect();
    optimal_indices.sort_unstable();
    OracleResult {
        n: instance.n(),
        c_min,
        c_max,
        optimal_indices,
        tolerance,
    }
}

/// Running near-minimum and near-maximum candidate lists.
struct Candidates {
    window: f64,
    best_low: f64,
    best_high: f64,
    low: Vec<(u64, f64)>,
    high: Vec<(u64, f64)>,
}

impl Candidates {
    fn new(window: f64) -> Self {
        Self {
            window,
            best_low: f64::INFINITY,
            best_high: f64::NEG_INFINITY,
            low: Vec::new(),
            high: Vec::new(),
        }
    }

    #[inline]
    fn push(&mut self, idx: u64, cost: f64) {
        if cost <= self.best_low + self.window {
            if cost < self.best_low {
                self.best_low = cost;
                let cut = cost + self.window;
                self.low.retain(|&(_, c)| c <= cut);
            }
            self.low.push((idx, cost));
        }
        if cost >= self.best_high - self.window {
            if cost > self.best_high {
                self.best_high = cost;
                let cut = cost - self.window;
                self.high.retain(|&(_, c)| c >= cut);
            }
            self.high.push((idx, cost));
        }
    }

    fn merge(&mut self, other: Candidates) {
        for (i, c) in other.low {
            self.push_low(i, c);
        }
        for (i, c) in other.high {
            self.push_high(i, c);
        }
    }

    fn push_low(&mut self, idx: u64, cost: f64) {
        if cost <= self.best_low + self.window {
            if cost < self.best_low {
                self.best_low = cost;
                let cut = cost + self.window;
                self.low.retain(|&(_, c)| c <= cut);
            }
            self.low.push((idx, cost));
        }
    }

    fn push_high(&mut self, idx: u64, cost: f64) {
        if cost >= self.best_high - self.window {
            if cost > self.best_high {
                self.best_high = cost;
                let cut = cost - self.window;
                self.high.retain(|&(_, c)| c >= cut);
            }
            self.high.push((idx, cost));
        }
    }
}

/// Adjacency-list view of an instance for incremental flips.
struct GrayScan<'a> {
    instance: &'a IsingInstance,
    terms: DiagonalTerms,
    neighbours: Vec<Vec<(usize, f64)>>,
    scale: f64,
}

impl<'a> GrayScan<'a> {
    fn new(instance: &'a IsingInstance) -> Self {
        let n = instance.n();
        let mut neighbours = vec![Vec::new(); n];
        for &(i, j) in instance.edges() {
            let w = instance.coupling(i, j);
            neighbours[i].push((j, w));
            neighbours[j].push((i, w));
        }
        Self {
            instance,
            terms: DiagonalTerms::new(instance),
            neighbours,
            scale: cost_scale(instance),
        }
    }

    /// Visits every index `prefix | gray(t)` for `t < 2^low_bits`.
    fn walk(&self, prefix: u64, low_bits: usize, mut visit: impl FnMut(u64, f64)) {
        let n = self.instance.n();
        let bias = self.instance.bias();
        let mut spins: Vec<f64> = (0..n)
            .map(|i| if prefix >> i & 1 == 0 { 1.0 } else { -1.0 })
            .collect();
        let mut field: Vec<f64> = (0..n)
            .map(|i| self.neighbours[i].iter().map(|&(j, w)| w * spins[j]).sum())
            .collect();
        let mut idx = prefix;
        let mut cost = self.terms.cost(idx);
        visit(idx, cost);
        for t in 1u64..(1u64 << low_bits) {
            let i = t.trailing_zeros() as usize;
            let x = spins[i];
            cost -= 2.0 * x * (2.0 * field[i] + bias[i]);
            spins[i] = -x;
            for &(j, w) in &self.neighbours[i] {
                field[j] -= 2.0 * w * x;
            }
            idx ^= 1 << i;
            visit(idx, cost);
        }
    }
}
