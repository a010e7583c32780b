//! Environmental layers driving ignition and spread.

use std::path::Path;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::case::PowerCase;
use crate::error::{Error, Result};
use crate::geo::{Cell, GridGeometry};

/// Wind-speed coefficient of the directional factor.
pub const WIND_C1: f64 = 0.045;
/// Wind-angle coefficient of the directional factor.
pub const WIND_C2: f64 = 0.131;

/// Probability that a burning cell ignites a fuel neighbour:
/// `q0 (1 + veg) (1 + den) slope wind`, clamped into `[0, 1]`.
pub fn spread_probability<F: Float>(q0: F, veg: F, den: F, slope: F, wind: F) -> F {
    let q = q0 * (F::one() + veg) * (F::one() + den) * slope * wind;
    q.max(F::zero()).min(F::one())
}

/// Per-period fault probability of a component with hourly rate `rate`.
pub fn fault_probability<F: Float>(rate: F) -> F {
    F::one() - (-rate).exp()
}

/// Directional wind factor for spread along bearing `spread_deg` given
/// wind speed (m/s) blowing toward `wind_deg` (bearings clockwise from north).
pub fn wind_factor<F: Float>(speed: F, wind_deg: F, spread_deg: F) -> F {
    let c1 = F::from(WIND_C1).unwrap();
    let c2 = F::from(WIND_C2).unwrap();
    let theta = (spread_deg - wind_deg).to_radians();
    (c1 * speed).exp() * (speed * c2 * (theta.cos() - F::one())).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wind {
    pub speed: f64,
    pub direction_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellState {
    NoFuel,
    Fuel,
    Ignited,
    Burning,
}

impl CellState {
    pub fn on_fire(self) -> bool {
        matches!(self, CellState::Ignited | CellState::Burning)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvLayers {
    pub fuel: Vec<bool>,
    pub q0: Vec<f64>,
    pub vegetation: Vec<f64>,
    pub density: Vec<f64>,
    pub slope: Vec<f64>,
    /// Wind per period (index t-1); empty means calm everywhere.
    pub wind: Vec<Wind>,
    pub ignition_scale: f64,
    base: Vec<f64>,
    n_cols: usize,
}

#[derive(Debug, Deserialize)]
struct RasterRow {
    col: usize,
    row: usize,
    fuel: Option<u8>,
    q0: Option<f64>,
    veg: Option<f64>,
    den: Option<f64>,
    slope: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct WindRow {
    period: usize,
    speed: f64,
    direction_deg: f64,
}

impl EnvLayers {
    /// Uniform layers from the case's environment defaults: full fuel,
    /// calm wind.
    pub fn uniform(case: &PowerCase, geom: &GridGeometry) -> Self {
        let env = &case.environment;
        let n = geom.n_cells();
        let mut layers = EnvLayers {
            fuel: vec![true; n],
            q0: vec![env.spread_reference; n],
            vegetation: vec![env.vegetation; n],
            density: vec![env.density; n],
            slope: vec![env.slope_factor; n],
            wind: Vec::new(),
            ignition_scale: env.ignition_scale,
            base: Vec::new(),
            n_cols: geom.n_cols,
        };
        layers.refresh();
        layers
    }

    /// Recomputes cached per-cell products after editing the layers.
    pub fn refresh(&mut self) {
        self.base = (0..self.q0.len())
            .map(|k| self.q0[k] * (1.0 + self.vegetation[k]) * (1.0 + self.density[k]) * self.slope[k])
            .collect();
    }

    pub fn set_uniform_spread(&mut self, q: f64) {
        self.q0.iter_mut().for_each(|v| *v = q);
        self.vegetation.iter_mut().for_each(|v| *v = 0.0);
        self.density.iter_mut().for_each(|v| *v = 0.0);
        self.slope.iter_mut().for_each(|v| *v = 1.0);
        self.refresh();
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(k) = self.q0.iter().position(|q| !(0.0..=1.0).contains(q)) {
            return Err(Error::validation(format!("cell {k}: reference spread probability outside [0, 1]")));
        }
        Ok(())
    }

    /// Overrides per-cell values from a CSV raster with header
    /// `col,row,fuel,q0,veg,den,slope` (all but `col,row` may be blank).
    pub fn apply_raster(&mut self, geom: &GridGeometry, path: impl AsRef<Path>) -> Result<()> {
        let mut rdr = csv::Reader::from_path(path)?;
        for rec in rdr.deserialize::<RasterRow>() {
            let r = rec?;
            let cell = Cell::new(r.col, r.row);
            if !geom.contains(cell) {
                return Err(Error::validation(format!("raster cell ({}, {}) outside grid", r.col, r.row)));
            }
            let k = geom.index(cell);
            if let Some(f) = r.fuel {
                self.fuel[k] = f != 0;
            }
            if let Some(v) = r.q0 {
                self.q0[k] = v;
            }
            if let Some(v) = r.veg {
                self.vegetation[k] = v;
            }
            if let Some(v) = r.den {
                self.density[k] = v;
            }
            if let Some(v) = r.slope {
                self.slope[k] = v;
            }
        }
        self.refresh();
        self.validate()
    }

    /// Loads a per-period wind table with header `period,speed,direction_deg`.
    pub fn apply_wind(&mut self, horizon: usize, path: impl AsRef<Path>) -> Result<()> {
        let mut wind = vec![Wind { speed: 0.0, direction_deg: 0.0 }; horizon];
        let mut rdr = csv::Reader::from_path(path)?;
        for rec in rdr.deserialize::<WindRow>() {
            let r = rec?;
            if r.period == 0 || r.period > horizon {
                return Err(Error::validation(format!("wind period {} outside 1..={horizon}", r.period)));
            }
            wind[r.period - 1] = Wind { speed: r.speed, direction_deg: r.direction_deg };
        }
        self.wind = wind;
        Ok(())
    }

    /// Spread probability from burning cell `from` into `to` during period `t`.
    pub fn spread_prob(&self, t: usize, from: usize, to: usize) -> f64 {
        let base = self.base[to];
        if base <= 0.0 {
            return 0.0;
        }
        let w = match self.wind.get(t.wrapping_sub(1)) {
            Some(w) if w.speed != 0.0 => {
                let (fc, fr) = ((from % self.n_cols) as f64, (from / self.n_cols) as f64);
                let (tc, tr) = ((to % self.n_cols) as f64, (to / self.n_cols) as f64);
                let bearing = (tc - fc).atan2(tr - fr).to_degrees();
                wind_factor(w.speed, w.direction_deg, bearing)
            }
            _ => 1.0,
        };
        (base * w).clamp(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_factors_give_reference() {
        assert_eq!(spread_probability(0.3_f64, 0.0, 0.0, 1.0, 1.0), 0.3);
    }

    #[test]
    fn zero_reference_gives_zero() {
        assert_eq!(spread_probability(0.0_f64, 0.4, 0.3, 1.2, 1.1), 0.0);
    }

    #[test]
    fn product_is_clamped() {
        let raw = 0.58 * 1.4 * 1.3 * 1.2 * 1.1;
        assert!((raw - 1.393_392).abs() < 1e-9);
        assert_eq!(spread_probability(0.58_f64, 0.4, 0.3, 1.2, 1.1), 1.0);
        assert_eq!(spread_probability(0.58_f32, 0.4, 0.3, 1.2, 1.1), 1.0);
    }

    #[test]
    fn fault_probability_values() {
        assert_eq!(fault_probability(0.0_f64), 0.0);
        assert!((fault_probability(2.0_f64.ln()) - 0.5).abs() < 1e-15);
        let p = fault_probability(0.001_f64);
        // 1 - e^-x = x - x^2/2 + x^3/6 - ...
        let series = 0.001 - 0.001_f64.powi(2) / 2.0 + 0.001_f64.powi(3) / 6.0 - 0.001_f64.powi(4) / 24.0;
        assert!((p - series).abs() < 1e-15);
        assert!((p - 0.000_999_500_166_6).abs() < 1e-12);
    }

    #[test]
    fn downwind_spread_is_favoured() {
        let with = wind_factor(10.0_f64, 90.0, 90.0);
        let against = wind_factor(10.0_f64, 90.0, 270.0);
        assert!(with > 1.0 && against < with);
        assert!((wind_factor(0.0_f64, 0.0, 123.0) - 1.0).abs() < 1e-15);
    }
}
