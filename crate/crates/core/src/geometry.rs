//! Planar array layout and the spatial phase quantities derived from it.
//!
//! Elements sit on a uniform `rows x cols` grid with element `(0, 0)` at the
//! origin. Element index is row-major, `i = row * cols + col`, and that index
//! is used for every bitstring, coupling matrix and pattern in the crate.
//! Angles are degrees at the API boundary and radians internally.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// SI-defined speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// A direction on the upper hemisphere, in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub theta_deg: f64,
    pub phi_deg: f64,
}

impl Direction {
    pub fn new(theta_deg: f64, phi_deg: f64) -> Self {
        Self { theta_deg, phi_deg }
    }

    /// Cartesian unit vector `[sin t cos p, sin t sin p, cos t]`.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta_deg.to_radians().sin_cos();
        let (sp, cp) = self.phi_deg.to_radians().sin_cos();
        [st * cp, st * sp, ct]
    }

    /// In-plane direction cosines `(sin t cos p, sin t sin p)`.
    pub fn transverse(&self) -> (f64, f64) {
        let st = self.theta_deg.to_radians().sin();
        let (sp, cp) = self.phi_deg.to_radians().sin_cos();
        (st * cp, st * sp)
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !(0.0..=90.0).contains(&self.theta_deg) {
            return Err(Error::config(
                format!("{name}.theta_deg"),
                format!("{} is outside [0, 90] degrees", self.theta_deg),
            ));
        }
        if !(0.0..360.0).contains(&self.phi_deg) {
            return Err(Error::config(
                format!("{name}.phi_deg"),
                format!("{} is outside [0, 360) degrees", self.phi_deg),
            ));
        }
        Ok(())
    }
}

/// Physical scenario: carrier, grid and the steering request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub frequency_hz: f64,
    pub element_spacing_m: f64,
    pub rows: usize,
    pub cols: usize,
    pub incident: Direction,
    pub target: Direction,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            frequency_hz: 30e9,
            element_spacing_m: 5e-3,
            rows: 5,
            cols: 5,
            incident: Direction::new(60.0, 30.0),
            target: Direction::new(15.0, 100.0),
        }
    }
}

impl ScenarioConfig {
    /// The default scenario resized to a square `size x size` grid.
    pub fn square(size: usize) -> Self {
        Self {
            rows: size,
            cols: size,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.frequency_hz > 0.0 && self.frequency_hz.is_finite()) {
            return Err(Error::config("scenario.frequency_hz", "must be positive and finite"));
        }
        if !(self.element_spacing_m > 0.0 && self.element_spacing_m.is_finite()) {
            return Err(Error::config("scenario.element_spacing_m", "must be positive and finite"));
        }
        if self.rows == 0 {
            return Err(Error::config("scenario.rows", "must be at least 1"));
        }
        if self.cols == 0 {
            return Err(Error::config("scenario.cols", "must be at least 1"));
        }
        self.incident.validate("scenario.incident")?;
        self.target.validate("scenario.target")?;
        Ok(())
    }

    pub fn element_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.frequency_hz
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavelength()
    }
}

/// Element coordinates plus every per-element and pairwise quantity the
/// coupling models and the validator share.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    pub rows: usize,
    pub cols: usize,
    pub spacing: f64,
    /// `(x, y)` in meters, row-major.
    pub coords: Vec<(f64, f64)>,
    /// Free-space wavenumber, rad/m.
    pub wavenumber: f64,
    pub incident: Direction,
    pub target: Direction,
    /// Incident-wave projection phase per element.
    pub phi_in: Vec<f64>,
    /// Target-direction projection phase per element.
    pub phi_out: Vec<f64>,
    /// Ideal steering phase `phi_out - phi_in`.
    pub ideal_phase: Vec<f64>,
    distances: Vec<f64>,
}

impl ArrayGeometry {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Euclidean distance between elements `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distances[i * self.len() + j]
    }

    /// Row-major `n x n` distance matrix.
    pub fn distance_matrix(&self) -> &[f64] {
        &self.distances
    }

    /// Spatial phase `k (x sin t cos p + y sin t sin p)` of element `i` for a direction.
    pub fn projection_phase(&self, i: usize, dir: &Direction) -> f64 {
        let (ux, uy) = dir.transverse();
        let (x, y) = self.coords[i];
        self.wavenumber * (x * ux + y * uy)
    }

    /// Ideal target phase difference between elements `i` and `j`.
    pub fn phase_difference(&self, i: usize, j: usize) -> Result<f64> {
        let n = self.len();
        for idx in [i, j] {
            if idx >= n {
                return Err(Error::Index { index: idx, len: n });
            }
        }
        Ok(self.ideal_phase[i] - self.ideal_phase[j])
    }

    /// Returns a copy whose coordinates are shifted rigidly by `(dx, dy)`.
    pub fn translated(&self, dx: f64, dy: f64) -> ArrayGeometry {
        let coords: Vec<_> = self.coords.iter().map(|&(x, y)| (x + dx, y + dy)).collect();
        Self::from_coords(
            self.rows,
            self.cols,
            self.spacing,
            coords,
            self.wavenumber,
            self.incident,
            self.target,
        )
    }

    fn from_coords(
        rows: usize,
        cols: usize,
        spacing: f64,
        coords: Vec<(f64, f64)>,
        wavenumber: f64,
        incident: Direction,
        target: Direction,
    ) -> ArrayGeometry {
        let n = coords.len();
        let (inx, iny) = incident.transverse();
        let (outx, outy) = target.transverse();
        let phi_in: Vec<f64> = coords
            .iter()
            .map(|&(x, y)| wavenumber * (x * inx + y * iny))
            .collect();
        let phi_out: Vec<f64> = coords
            .iter()
            .map(|&(x, y)| wavenumber * (x * outx + y * outy))
            .collect();
        let ideal_phase = phi_out.iter().zip(&phi_in).map(|(o, i)| o - i).collect();

        let mut distances = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let (xi, yi) = coords[i];
                let (xj, yj) = coords[j];
                let d = (xi - xj).hypot(yi - yj);
                distances[i * n + j] = d;
                distances[j * n + i] = d;
            }
        }

        ArrayGeometry {
            rows,
            cols,
            spacing,
            coords,
            wavenumber,
            incident,
            target,
            phi_in,
            phi_out,
            ideal_phase,
            distances,
        }
    }
}

/// Lays out the grid and computes the projection phases for `cfg`.
pub fn build_geometry(cfg: &ScenarioConfig) -> Result<ArrayGeometry> {
    cfg.validate()?;
    let d = cfg.element_spacing_m;
    let coords = (0..cfg.rows)
        .flat_map(|r| (0..cfg.cols).map(move |c| (c as f64 * d, r as f64 * d)))
        .collect();
    Ok(ArrayGeometry::from_coords(
        cfg.rows,
        cfg.cols,
        d,
        coords,
        cfg.wavenumber(),
        cfg.incident,
        cfg.target,
    ))
}
