//! Ising cost evaluation and the full diagonal of the cost Hamiltonian.
//!
//! Conventions used everywhere in the crate:
//! - bit `b` of element `i` maps to spin `x_i = 1 - 2b` and to reflection
//!   phase `b * pi` (bit 0 = spin +1 = 0 rad);
//! - in a basis index, element `i` occupies binary digit `i` (element 0 is the
//!   least-significant bit);
//! - printed bitstrings put element `i` at character position `i`.
//!
//! The cost of a configuration is `sum_{i<j} 2 J_ij x_i x_j + sum_i h_i x_i`,
//! i.e. the symmetric form `x^T J x + h^T x` with the diagonal removed.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coupling::IsingInstance;
use crate::error::{Error, Result};
use crate::parallel;

/// Default cap on qubit count for anything that materializes `2^n` values.
pub const DEFAULT_MAX_QUBITS: usize = 25;

/// A binary phase configuration, one bit per element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitstring(Vec<bool>);

impl Bitstring {
    pub fn zeros(n: usize) -> Self {
        Bitstring(vec![false; n])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Bitstring(bits)
    }

    /// Decodes a basis index: element `i` reads binary digit `i`.
    pub fn from_index(index: u64, n: usize) -> Self {
        Bitstring((0..n).map(|i| index >> i & 1 == 1).collect())
    }

    /// Basis index, or `None` if the bitstring is too long for a `u64`.
    pub fn to_index(&self) -> Option<u64> {
        if self.0.len() > 64 {
            return None;
        }
        Some(
            self.0
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i)),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn complement(&self) -> Self {
        Bitstring(self.0.iter().map(|b| !b).collect())
    }

    /// Spins `x_i = 1 - 2 b_i`.
    pub fn to_spins(&self) -> Vec<i8> {
        self.0.iter().map(|&b| if b { -1 } else { 1 }).collect()
    }

    pub fn from_spins(spins: &[i8]) -> Result<Self> {
        spins
            .iter()
            .map(|&s| match s {
                1 => Ok(false),
                -1 => Ok(true),
                other => Err(Error::config("spins", format!("spin must be +1 or -1, got {other}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bitstring)
    }

    /// Reflection phase per element: 0 or pi radians.
    pub fn phases(&self) -> Vec<f64> {
        self.0
            .iter()
            .map(|&b| if b { std::f64::consts::PI } else { 0.0 })
            .collect()
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bitstring {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("bitstring contains `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bitstring)
    }
}

impl Serialize for Bitstring {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bitstring {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Ising cost of a spin configuration, summed in ascending edge order then
/// ascending bias order.
pub fn evaluate_cost(instance: &IsingInstance, spins: &[i8]) -> Result<f64> {
    let n = instance.n();
    if spins.len() != n {
        return Err(Error::Dimension { expected: n, actual: spins.len() });
    }
    let mut cost = 0.0;
    for &(i, j) in instance.edges() {
        let w = 2.0 * instance.coupling(i, j);
        if spins[i] == spins[j] {
            cost += w;
        } else {
            cost -= w;
        }
    }
    if instance.has_bias() {
        for (h, &x) in instance.bias().iter().zip(spins) {
            if x > 0 {
                cost += h;
            } else {
                cost -= h;
            }
        }
    }
    Ok(cost)
}

/// Cost of the configuration encoded by basis index `index`.
pub fn cost_of_index(instance: &IsingInstance, index: u64) -> f64 {
    let terms = DiagonalTerms::new(instance);
    terms.cost(index)
}

/// Precomputed `(bit_i, bit_j, 2 J_ij)` terms in edge order.
pub(crate) struct DiagonalTerms {
    pairs: Vec<(u32, u32, f64)>,
    bias: Option<Vec<f64>>,
}

impl DiagonalTerms {
    pub(crate) fn new(instance: &IsingInstance) -> Self {
        let pairs = instance
            .edges()
            .iter()
            .map(|&(i, j)| (i as u32, j as u32, 2.0 * instance.coupling(i, j)))
            .collect();
        let bias = instance.has_bias().then(|| instance.bias().to_vec());
        Self { pairs, bias }
    }

    #[inline]
    pub(crate) fn cost(&self, index: u64) -> f64 {
        let mut cost = 0.0;
        for &(i, j, w) in &self.pairs {
            if (index >> i ^ index >> j) & 1 == 0 {
                cost += w;
            } else {
                cost -= w;
            }
        }
        if let Some(bias) = &self.bias {
            for (i, &h) in bias.iter().enumerate() {
                if index >> i & 1 == 0 {
                    cost += h;
                } else {
                    cost -= h;
                }
            }
        }
        cost
    }
}

/// Every eigenvalue of the cost Hamiltonian, indexed by basis state.
#[derive(Debug, Clone, PartialEq)]
pub struct CostDiagonal {
    n: usize,
    values: Vec<f64>,
    flip_symmetric: bool,
}

impl CostDiagonal {
    /// Wraps precomputed values; `values.len()` must be a power of two.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if !values.len().is_power_of_two() {
            return Err(Error::config(
                "diagonal",
                format!("length {} is not a power of two", values.len()),
            ));
        }
        let n = values.len().trailing_zeros() as usize;
        let last = values.len() - 1;
        let flip_symmetric = (0..values.len() / 2).all(|k| values[k].to_bits() == values[last - k].to_bits());
        Ok(Self { n, values, flip_symmetric })
    }

    /// Whether `values[k] == values[!k]` bit-for-bit, as for any bias-free instance.
    pub fn is_flip_symmetric(&self) -> bool {
        self.flip_symmetric
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub(crate) fn check_capacity(n: usize, max_qubits: usize) -> Result<()> {
    if n > max_qubits || n >= usize::BITS as usize - 1 {
        return Err(Error::Capacity { qubits: n, limit: max_qubits });
    }
    Ok(())
}

/// Builds the diagonal with the default qubit cap.
pub fn build_cost_diagonal(instance: &IsingInstance) -> Result<CostDiagonal> {
    build_cost_diagonal_capped(instance, DEFAULT_MAX_QUBITS)
}

/// Builds `values[idx] = cost(decode(idx))` for all `2^n` indices. Each entry
/// is bit-identical to [`evaluate_cost`] on the decoded spins.
pub fn build_cost_diagonal_capped(instance: &IsingInstance, max_qubits: usize) -> Result<CostDiagonal> {
    let n = instance.n();
    check_capacity(n, max_qubits)?;
    let terms = DiagonalTerms::new(instance);
    let mut values = vec![0.0; 1usize << n];
    parallel::fill_indexed(&mut values, |idx| terms.cost(idx as u64));
    CostDiagonal::from_values(values)
}
