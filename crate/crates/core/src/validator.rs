//! Far-field validation of a binary phase configuration under the real
//! spherical-wave coupling model.
//!
//! `v_ideal_i = exp(j (Phi_RIS,i - phi_in,i))`, `v_actual = C v_ideal` with
//! `C_ii = 1`, `C_ij = alpha cos(k d_ij) / d_ij`, and the power pattern is
//! `|AF(theta, phi)|^2 cos^m(theta)` with `m = 2` by default.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, Direction};
use crate::ising::Bitstring;
use crate::parallel;

/// Floor applied to `power_db` where the linear power is zero.
pub const POWER_DB_FLOOR: f64 = -300.0;

/// Angular sampling of the upper hemisphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub theta_step_deg: f64,
    pub phi_step_deg: f64,
    /// Exponent `m` of the `cos^m(theta)` element power pattern.
    pub element_exponent: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            theta_step_deg: 0.5,
            phi_step_deg: 0.5,
            element_exponent: 2.0,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta_step_deg > 0.0 && self.theta_step_deg <= 90.0) {
            return Err(Error::config("validator.theta_step_deg", "must lie in (0, 90]"));
        }
        if !(self.phi_step_deg > 0.0 && self.phi_step_deg <= 360.0) {
            return Err(Error::config("validator.phi_step_deg", "must lie in (0, 360]"));
        }
        if !self.element_exponent.is_finite() {
            return Err(Error::config("validator.element_exponent", "must be finite"));
        }
        Ok(())
    }

    /// `0, step, 2 step, ...` up to and including 90 when it lands on the grid.
    pub fn theta_grid(&self) -> Vec<f64> {
        let count = (90.0 / self.theta_step_deg + 1e-9).floor() as usize + 1;
        (0..count).map(|i| i as f64 * self.theta_step_deg).collect()
    }

    /// `0, step, ...` strictly below 360.
    pub fn phi_grid(&self) -> Vec<f64> {
        let count = (360.0 / self.phi_step_deg - 1e-9).ceil() as usize;
        (0..count).map(|i| i as f64 * self.phi_step_deg).collect()
    }
}

/// Ideal and coupled excitations for one bitstring.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationSet {
    pub v_ideal: Vec<Complex64>,
    pub v_actual: Vec<Complex64>,
    /// Row-major `n x n`, symmetric, unit diagonal.
    pub coupling: Vec<f64>,
}

/// `C_ii = 1`, `C_ij = alpha cos(k d_ij) / d_ij`.
pub fn validation_coupling(geom: &ArrayGeometry, alpha: f64) -> Vec<f64> {
    let n = geom.len();
    let k = geom.wavenumber;
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        c[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let d = geom.distance(i, j);
            let v = alpha * (k * d).cos() / d;
            c[i * n + j] = v;
            c[j * n + i] = v;
        }
    }
    c
}

pub fn excitations(geom: &ArrayGeometry, bits: &Bitstring, alpha: f64) -> Result<ExcitationSet> {
    let n = geom.len();
    if bits.len() != n {
        return Err(Error::Dimension { expected: n, actual: bits.len() });
    }
    let v_ideal: Vec<Complex64> = bits
        .phases()
        .iter()
        .zip(&geom.phi_in)
        .map(|(ris, inc)| Complex64::cis(ris - inc))
        .collect();
    let coupling = validation_coupling(geom, alpha);
    let v_actual = (0..n)
        .map(|i| (0..n).map(|j| v_ideal[j] * coupling[i * n + j]).sum())
        .collect();
    Ok(ExcitationSet { v_ideal, v_actual, coupling })
}

/// `sum_i v_i exp(j k (x_i sin t cos p + y_i sin t sin p))`, summed in element order.
pub fn array_factor(geom: &ArrayGeometry, excitation: &[Complex64], dir: Direction) -> Result<Complex64> {
    if excitation.len() != geom.len() {
        return Err(Error::Dimension { expected: geom.len(), actual: excitation.len() });
    }
    Ok(array_factor_unchecked(geom, excitation, dir))
}

fn array_factor_unchecked(geom: &ArrayGeometry, excitation: &[Complex64], dir: Direction) -> Complex64 {
    let (ux, uy) = dir.transverse();
    geom.coords
        .iter()
        .zip(excitation)
        .map(|(&(x, y), v)| v * Complex64::cis(geom.wavenumber * (x * ux + y * uy)))
        .sum()
}

/// Power pattern on a `theta x phi` grid, row-major by theta.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiationPattern {
    pub theta_grid: Vec<f64>,
    pub phi_grid: Vec<f64>,
    pub power: Vec<f64>,
    /// `10 log10(power / max power)`, floored at [`POWER_DB_FLOOR`].
    pub power_db: Vec<f64>,
}

impl RadiationPattern {
    /// Wraps a linear power grid and normalizes it to its peak.
    pub fn from_power(theta_grid: Vec<f64>, phi_grid: Vec<f64>, power: Vec<f64>) -> Result<Self> {
        if theta_grid.is_empty() || phi_grid.is_empty() {
            return Err(Error::Empty("angular grid"));
        }
        let expected = theta_grid.len() * phi_grid.len();
        if power.len() != expected {
            return Err(Error::Dimension { expected, actual: power.len() });
        }
        let peak = power.iter().copied().fold(0.0, f64::max);
        if !(peak > 0.0) {
            return Err(Error::Empty("radiated power"));
        }
        let power_db = power
            .iter()
            .map(|&p| {
                if p > 0.0 {
                    (10.0 * (p / peak).log10()).max(POWER_DB_FLOOR)
                } else {
                    POWER_DB_FLOOR
                }
            })
            .collect();
        Ok(Self { theta_grid, phi_grid, power, power_db })
    }

    pub fn at(&self, theta_idx: usize, phi_idx: usize) -> f64 {
        self.power[theta_idx * self.phi_grid.len() + phi_idx]
    }

    /// CSV with header `theta_deg,phi_deg,power_db`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta_deg,phi_deg,power_db\n");
        for (ti, t) in self.theta_grid.iter().enumerate() {
            for (pi, p) in self.phi_grid.iter().enumerate() {
                let db = self.power_db[ti * self.phi_grid.len() + pi];
                writeln!(out, "{t},{p},{db:.6}").unwrap();
            }
        }
        out
    }

    /// Plain (P2) 8-bit grayscale image: one row per theta, one column per
    /// phi, `0 dB -> 255` and `floor_db -> 0`.
    pub fn to_pgm(&self, floor_db: f64) -> String {
        let (w, h) = (self.phi_grid.len(), self.theta_grid.len());
        let mut out = format!("P2\n# rows: theta_deg, columns: phi_deg, {floor_db} dB to 0 dB\n{w} {h}\n255\n");
        for row in self.power_db.chunks(w) {
            let line: Vec<String> = row
                .iter()
                .map(|&db| {
                    let v = ((db - floor_db) / -floor_db).clamp(0.0, 1.0);
                    ((v * 255.0).round() as u8).to_string()
                })
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Builds the coupled excitation for `bits` and samples the power pattern.
pub fn compute_pattern(
    geom: &ArrayGeometry,
    bits: &Bitstring,
    alpha: f64,
    grid: &GridSpec,
) -> Result<RadiationPattern> {
    grid.validate()?;
    let exc = excitations(geom, bits, alpha)?;
    pattern_from_excitation(geom, &exc.v_actual, grid)
}

/// Samples `|AF|^2 cos^m(theta)` for an arbitrary excitation.
pub fn pattern_from_excitation(
    geom: &ArrayGeometry,
    excitation: &[Complex64],
    grid: &GridSpec,
) -> Result<RadiationPattern> {
    grid.validate()?;
    if excitation.len() != geom.len() {
        return Err(Error::Dimension { expected: geom.len(), actual: excitation.len() });
    }
    let thetas = grid.theta_grid();
    let phis = grid.phi_grid();
    let rows = parallel::map_range(thetas.len(), |ti| {
        let t = thetas[ti];
        let element = t.to_radians().cos().max(0.0).powf(grid.element_exponent);
        phis.iter()
            .map(|&p| {
                let af = array_factor_unchecked(geom, excitation, Direction::new(t, p));
                af.norm_sqr() * element
            })
            .collect::<Vec<_>>()
    });
    RadiationPattern::from_power(thetas, phis, rows.concat())
}

/// Grid argmax; ties go to the smallest theta, then the smallest phi. At
/// zenith the azimuth is reported as 0.
pub fn find_peak(pattern: &RadiationPattern) -> Direction {
    let w = pattern.phi_grid.len();
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, &p) in pattern.power.iter().enumerate() {
        if p > best.1 {
            best = (i, p);
        }
    }
    let theta = pattern.theta_grid[best.0 / w];
    let phi = if theta == 0.0 { 0.0 } else { pattern.phi_grid[best.0 % w] };
    Direction::new(theta, phi)
}

/// Great-circle angle between two directions, degrees.
pub fn pointing_error(target: Direction, actual: Direction) -> f64 {
    let a = target.unit_vector();
    let b = actual.unit_vector();
    let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    dot.clamp(-1.0, 1.0).acos().to_degrees()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointingReport {
    pub target: Direction,
    pub actual: Direction,
    pub epsilon_deg: f64,
}

/// Pattern, peak and pointing error of `bits` against the geometry's target.
pub fn validate_bitstring(
    geom: &ArrayGeometry,
    bits: &Bitstring,
    alpha: f64,
    grid: &GridSpec,
) -> Result<(RadiationPattern, PointingReport)> {
    let pattern = compute_pattern(geom, bits, alpha, grid)?;
    let actual = find_peak(&pattern);
    let report = PointingReport {
        target: geom.target,
        actual,
        epsilon_deg: pointing_error(geom.target, actual),
    };
    Ok((pattern, report))
}
