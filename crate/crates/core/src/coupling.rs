//! Ising interaction matrices for the four coupling models, and the global
//! rescaling applied before optimization.
//!
//! | model | `J_ij` | support |
//! |-------|--------|---------|
//! | 1 | `cos(dphi_ij)` | dense |
//! | 2 | `cos(dphi_ij) + s / d_ij` | `d_ij < cutoff` |
//! | 3 | `cos(dphi_ij) + alpha cos(k d_ij) / d_ij` | `d_ij < cutoff` |
//! | 4 | `Re(B_i conj(B_j))` | dense |
//!
//! All four are stated as objectives to maximize. [`IsingInstance::into_hamiltonian`]
//! flips the sign so the solver side can minimize.

use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;

/// Which of the four `J_ij` constructions to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum ModelId {
    /// Ideal dense phase coupling.
    IdealPhase = 1,
    /// Sparse inverse-distance penalty.
    DistancePenalty = 2,
    /// Sparse real spherical-wave coupling.
    SphericalWave = 3,
    /// Dense far-field projection with complex Green's-function coupling.
    FarField = 4,
}

impl ModelId {
    pub const ALL: [ModelId; 4] = [
        ModelId::IdealPhase,
        ModelId::DistancePenalty,
        ModelId::SphericalWave,
        ModelId::FarField,
    ];

    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn is_sparse(self) -> bool {
        matches!(self, ModelId::DistancePenalty | ModelId::SphericalWave)
    }
}

impl TryFrom<u8> for ModelId {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(ModelId::IdealPhase),
            2 => Ok(ModelId::DistancePenalty),
            3 => Ok(ModelId::SphericalWave),
            4 => Ok(ModelId::FarField),
            other => Err(format!("model id must be 1, 2, 3 or 4, got {other}")),
        }
    }
}

impl From<ModelId> for u8 {
    fn from(m: ModelId) -> u8 {
        m as u8
    }
}

impl std::fmt::Display for ModelId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Parameters of a coupling model. Fields a model does not use are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingModelSpec {
    pub model: ModelId,
    /// Interaction cutoff in meters for models 2 and 3. `None` means 1.2 x pitch (4-neighbour lattice).
    pub cutoff_m: Option<f64>,
    /// Mutual-coupling strength for models 3 and 4.
    pub alpha: f64,
    /// Numerator of the model-2 `1/d` penalty. `None` means the wavenumber.
    pub inverse_distance_scale: Option<f64>,
}

pub const DEFAULT_ALPHA: f64 = 0.2;
pub const DEFAULT_CUTOFF_PITCHES: f64 = 1.2;

impl CouplingModelSpec {
    pub fn new(model: ModelId) -> Self {
        Self {
            model,
            cutoff_m: None,
            alpha: DEFAULT_ALPHA,
            inverse_distance_scale: None,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_cutoff(mut self, cutoff_m: f64) -> Self {
        self.cutoff_m = Some(cutoff_m);
        self
    }

    pub fn resolved_cutoff(&self, geom: &ArrayGeometry) -> f64 {
        self.cutoff_m
            .unwrap_or(DEFAULT_CUTOFF_PITCHES * geom.spacing)
    }

    pub fn resolved_inverse_distance_scale(&self, geom: &ArrayGeometry) -> f64 {
        self.inverse_distance_scale.unwrap_or(geom.wavenumber)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(c) = self.cutoff_m {
            if !(c > 0.0) {
                return Err(Error::config("model.cutoff_m", format!("must be positive, got {c}")));
            }
        }
        if matches!(self.model, ModelId::SphericalWave | ModelId::FarField)
            && !(self.alpha >= 0.0 && self.alpha.is_finite())
        {
            return Err(Error::config(
                "model.alpha",
                format!("must be finite and non-negative, got {}", self.alpha),
            ));
        }
        if let Some(s) = self.inverse_distance_scale {
            if !s.is_finite() {
                return Err(Error::config("model.inverse_distance_scale", "must be finite"));
            }
        }
        Ok(())
    }
}

/// Whether the stored couplings describe an objective to maximize or a
/// Hamiltonian to minimize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Maximize,
    Minimize,
}

/// Symmetric pairwise couplings `J` (zero diagonal) and linear biases `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingInstance {
    n: usize,
    couplings: Vec<f64>,
    bias: Vec<f64>,
    edges: Vec<(usize, usize)>,
    pub model: Option<ModelId>,
    pub sense: Sense,
    /// `sum_{i<j} |J_ij|` before the last [`normalize`]; `None` if never rescaled.
    pub normalization_sum: Option<f64>,
    /// Bitstring-independent energy dropped with the diagonal (model 4: `sum |B_i|^2`),
    /// in the same units and sign as the couplings.
    pub diagonal_offset: f64,
}

impl IsingInstance {
    /// Builds an instance from a dense row-major matrix. The diagonal is discarded
    /// and the matrix must be symmetric.
    pub fn from_dense(n: usize, couplings: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        if couplings.len() != n * n {
            return Err(Error::Dimension { expected: n * n, actual: couplings.len() });
        }
        if bias.len() != n {
            return Err(Error::Dimension { expected: n, actual: bias.len() });
        }
        let mut couplings = couplings;
        for i in 0..n {
            couplings[i * n + i] = 0.0;
            for j in (i + 1)..n {
                if couplings[i * n + j] != couplings[j * n + i] {
                    return Err(Error::config(
                        "couplings",
                        format!("matrix is not symmetric at ({i}, {j})"),
                    ));
                }
            }
        }
        let mut inst = Self {
            n,
            couplings,
            bias,
            edges: Vec::new(),
            model: None,
            sense: Sense::Maximize,
            normalization_sum: None,
            diagonal_offset: 0.0,
        };
        inst.rebuild_edges();
        Ok(inst)
    }

    /// Builds an instance from an `(i, j, J_ij)` list with zero biases.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut dense = vec![0.0; n * n];
        for &(i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::Index { index: i.max(j), len: n });
            }
            if i == j {
                return Err(Error::config("edges", format!("self-coupling on element {i}")));
            }
            dense[i * n + j] = w;
            dense[j * n + i] = w;
        }
        Self::from_dense(n, dense, vec![0.0; n])
    }

    fn rebuild_edges(&mut self) {
        let n = self.n;
        self.edges = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.couplings[i * n + j] != 0.0)
            .collect();
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings[i * self.n + j]
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    /// Pairs `(i, j)`, `i < j`, with nonzero coupling, in ascending order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_bias(&self) -> bool {
        self.bias.iter().any(|&h| h != 0.0)
    }

    /// `sum_{i<j} |J_ij|` in ascending edge order.
    pub fn absolute_coupling_sum(&self) -> f64 {
        self.edges.iter().map(|&(i, j)| self.coupling(i, j).abs()).sum()
    }

    /// Negates every coefficient, turning a maximization objective into the
    /// Hamiltonian the solver minimizes (and vice versa).
    pub fn into_hamiltonian(mut self) -> Self {
        if self.sense == Sense::Minimize {
            return self;
        }
        self.negate();
        self.sense = Sense::Minimize;
        self
    }

    fn negate(&mut self) {
        self.couplings.iter_mut().for_each(|v| *v = -*v);
        self.bias.iter_mut().for_each(|v| *v = -*v);
        self.diagonal_offset = -self.diagonal_offset;
    }

    fn scale(&mut self, factor: f64) {
        self.couplings.iter_mut().for_each(|v| *v *= factor);
        self.bias.iter_mut().for_each(|v| *v *= factor);
        self.diagonal_offset *= factor;
    }

    /// Serializes to the interchange edge list: a `n <count>` header, then one
    /// `i j J_ij` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for &(i, j) in &self.edges {
            writeln!(out, "{i} {j} {:.17e}", self.coupling(i, j)).unwrap();
        }
        out
    }
}

impl FromStr for IsingInstance {
    type Err = Error;

    /// Parses the edge-list format written by [`IsingInstance::to_edge_list`].
    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or(Error::Empty("edge list"))?;
        let n = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["n", count] => count
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad qubit count `{count}`: {e}")))?,
            _ => return Err(Error::Parse(format!("expected `n <count>` header, got `{header}`"))),
        };
        let mut edges = Vec::new();
        for line in lines {
            let parts: Vec<_> = line.split_whitespace().collect();
            let [i, j, w] = parts.as_slice() else {
                return Err(Error::Parse(format!("expected `i j J_ij`, got `{line}`")));
            };
            let parse_idx = |t: &str| {
                t.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad index `{t}`: {e}")))
            };
            let w = w
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad coupling `{w}`: {e}")))?;
            edges.push((parse_idx(i)?, parse_idx(j)?, w));
        }
        IsingInstance::from_edges(n, &edges)
    }
}

/// Effective complex steering vector of model 4 together with the complex
/// coupling matrix it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamVector {
    pub b: Vec<Complex64>,
    /// Row-major `n x n`, symmetric, unit diagonal.
    pub coupling_matrix: Vec<Complex64>,
}

impl BeamVector {
    /// `|sum_i B_i x_i|^2` for a spin configuration.
    pub fn field_power(&self, spins: &[i8]) -> f64 {
        self.b
            .iter()
            .zip(spins)
            .map(|(b, &x)| b * f64::from(x))
            .sum::<Complex64>()
            .norm_sqr()
    }

    /// `sum_i |B_i|^2`, the diagonal contribution dropped from `J`.
    pub fn diagonal_power(&self) -> f64 {
        self.b.iter().map(|b| b.norm_sqr()).sum()
    }
}

/// Output of [`build_model`].
#[derive(Debug, Clone)]
pub struct BuiltModel {
    pub instance: IsingInstance,
    /// Present for model 4 only.
    pub beam: Option<BeamVector>,
}

fn dense_from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let mut dense = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = f(i, j);
            dense[i * n + j] = v;
            dense[j * n + i] = v;
        }
    }
    dense
}

fn finish(n: usize, dense: Vec<f64>, model: ModelId) -> IsingInstance {
    let mut inst = IsingInstance::from_dense(n, dense, vec![0.0; n])
        .expect("model matrices are square and symmetric by construction");
    inst.model = Some(model);
    inst
}

fn phase_cos(geom: &ArrayGeometry, i: usize, j: usize) -> f64 {
    (geom.ideal_phase[i] - geom.ideal_phase[j]).cos()
}

/// Model 1: `J_ij = cos(dphi_ij)` on every pair.
pub fn build_model1(geom: &ArrayGeometry) -> IsingInstance {
    let n = geom.len();
    finish(n, dense_from_fn(n, |i, j| phase_cos(geom, i, j)), ModelId::IdealPhase)
}

/// Model 2: phase term plus `scale / d_ij`, zero at or beyond the cutoff.
pub fn build_model2(geom: &ArrayGeometry, spec: &CouplingModelSpec) -> Result<IsingInstance> {
    spec.validate()?;
    let cutoff = spec.resolved_cutoff(geom);
    let scale = spec.resolved_inverse_distance_scale(geom);
    let n = geom.len();
    let dense = dense_from_fn(n, |i, j| {
        let d = geom.distance(i, j);
        if d < cutoff {
            phase_cos(geom, i, j) + scale / d
        } else {
            0.0
        }
    });
    Ok(finish(n, dense, ModelId::DistancePenalty))
}

/// Model 3: phase term plus `alpha cos(k d_ij) / d_ij`, zero at or beyond the cutoff.
pub fn build_model3(geom: &ArrayGeometry, spec: &CouplingModelSpec) -> Result<IsingInstance> {
    spec.validate()?;
    let cutoff = spec.resolved_cutoff(geom);
    let k = geom.wavenumber;
    let n = geom.len();
    let dense = dense_from_fn(n, |i, j| {
        let d = geom.distance(i, j);
        if d < cutoff {
            phase_cos(geom, i, j) + spec.alpha * (k * d).cos() / d
        } else {
            0.0
        }
    });
    Ok(finish(n, dense, ModelId::SphericalWave))
}

/// Complex free-space coupling `C_ij = alpha exp(-j k d_ij) / d_ij`, `C_ii = 1`.
pub fn green_coupling_matrix(geom: &ArrayGeometry, alpha: f64) -> Vec<Complex64> {
    let n = geom.len();
    let k = geom.wavenumber;
    let mut c = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        c[i * n + i] = Complex64::new(1.0, 0.0);
        for j in (i + 1)..n {
            let d = geom.distance(i, j);
            let v = Complex64::from_polar(alpha / d, -k * d);
            c[i * n + j] = v;
            c[j * n + i] = v;
        }
    }
    c
}

/// Model 4: `B_j = conj(V_in,j) sum_i C_ij V_out,i` and `J_ij = Re(B_i conj(B_j))`.
pub fn build_model4(
    geom: &ArrayGeometry,
    spec: &CouplingModelSpec,
) -> Result<(IsingInstance, BeamVector)> {
    spec.validate()?;
    let n = geom.len();
    let c = green_coupling_matrix(geom, spec.alpha);
    let v_out: Vec<Complex64> = geom.phi_out.iter().map(|&p| Complex64::cis(p)).collect();
    let b: Vec<Complex64> = (0..n)
        .map(|j| {
            let coupled: Complex64 = (0..n).map(|i| c[i * n + j] * v_out[i]).sum();
            Complex64::cis(-geom.phi_in[j]) * coupled
        })
        .collect();
    let dense = dense_from_fn(n, |i, j| (b[i] * b[j].conj()).re);
    let beam = BeamVector { b, coupling_matrix: c };
    let mut inst = finish(n, dense, ModelId::FarField);
    inst.diagonal_offset = beam.diagonal_power();
    Ok((inst, beam))
}

/// Builds whichever model `spec` names.
pub fn build_model(geom: &ArrayGeometry, spec: &CouplingModelSpec) -> Result<BuiltModel> {
    spec.validate()?;
    Ok(match spec.model {
        ModelId::IdealPhase => BuiltModel { instance: build_model1(geom), beam: None },
        ModelId::DistancePenalty => BuiltModel { instance: build_model2(geom, spec)?, beam: None },
        ModelId::SphericalWave => BuiltModel { instance: build_model3(geom, spec)?, beam: None },
        ModelId::FarField => {
            let (instance, beam) = build_model4(geom, spec)?;
            BuiltModel { instance, beam: Some(beam) }
        }
    })
}

/// Divides every coefficient by `sum_{i<j} |J_ij|`, recording that sum.
pub fn normalize(instance: &IsingInstance) -> Result<IsingInstance> {
    let total = instance.absolute_coupling_sum();
    if total == 0.0 {
        return Err(Error::DegenerateInstance);
    }
    let mut out = instance.clone();
    out.scale(1.0 / total);
    out.normalization_sum = Some(total);
    Ok(out)
}
