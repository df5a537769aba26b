//! Log-linear link-efficiency model: attenuation in dB grows linearly with
//! distance from a reference point, and the key rate scales as `10^(LE/10)`.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::orbit::{slant_range, PhysicalConstants};

/// Calibration points from the Micius downlink: 12 kbit/s at 645 km and
/// 1 kbit/s at 1200 km.
pub const MICIUS_POINTS: [(f64, f64); 2] = [(645.0, 12_000.0), (1200.0, 1_000.0)];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkModel {
    slope_db_per_km: f64,
    ref_distance_km: f64,
    base_rate_bps: f64,
}

impl LinkModel {
    pub fn new(slope_db_per_km: f64, ref_distance_km: f64, base_rate_bps: f64) -> Result<Self> {
        if !slope_db_per_km.is_finite() {
            return Err(Error::InvalidLinkModel(format!(
                "slope {slope_db_per_km} is not finite"
            )));
        }
        if !(ref_distance_km > 0.0 && ref_distance_km.is_finite()) {
            return Err(Error::InvalidLinkModel(format!(
                "reference distance {ref_distance_km} km must be > 0"
            )));
        }
        if !(base_rate_bps > 0.0 && base_rate_bps.is_finite()) {
            return Err(Error::InvalidLinkModel(format!(
                "base rate {base_rate_bps} bps must be > 0"
            )));
        }
        Ok(Self {
            slope_db_per_km,
            ref_distance_km,
            base_rate_bps,
        })
    }

    /// Exact fit through two `(distance_km, rate_bps)` points, anchored at the first.
    pub fn fit_from_two_points(d1_km: f64, rate1: f64, d2_km: f64, rate2: f64) -> Result<Self> {
        if d1_km == d2_km {
            return Err(Error::Fit(format!("both points at distance {d1_km} km")));
        }
        if !(rate1 > 0.0 && rate2 > 0.0) {
            return Err(Error::Fit(format!(
                "rates must be positive, got {rate1} and {rate2}"
            )));
        }
        let slope = 10.0 * (rate2 / rate1).log10() / (d2_km - d1_km);
        Self::new(slope, d1_km, rate1).map_err(|e| Error::Fit(e.to_string()))
    }

    /// The default model fitted to [`MICIUS_POINTS`].
    pub fn micius() -> Self {
        let [(d1, r1), (d2, r2)] = MICIUS_POINTS;
        Self::fit_from_two_points(d1, r1, d2, r2).expect("calibration points are valid")
    }

    pub fn slope_db_per_km(&self) -> f64 {
        self.slope_db_per_km
    }

    pub fn ref_distance_km(&self) -> f64 {
        self.ref_distance_km
    }

    pub fn base_rate_bps(&self) -> f64 {
        self.base_rate_bps
    }

    pub fn link_efficiency_db(&self, distance_km: f64) -> f64 {
        self.slope_db_per_km * (distance_km - self.ref_distance_km)
    }

    pub fn rate_at_distance(&self, distance_km: f64) -> f64 {
        self.base_rate_bps * 10f64.powf(self.link_efficiency_db(distance_km) / 10.0)
    }
}

impl Default for LinkModel {
    fn default() -> Self {
        Self::micius()
    }
}

/// Key rate along an elevation grid at fixed altitude; grid order preserved.
pub fn rate_vs_elevation(
    model: &LinkModel,
    h_km: f64,
    theta_grid_deg: &[f64],
    consts: &PhysicalConstants,
) -> Result<Vec<(f64, f64)>> {
    rate_vs_elevation_with(model, h_km, theta_grid_deg, consts, Execution::default())
}

pub fn rate_vs_elevation_with(
    model: &LinkModel,
    h_km: f64,
    theta_grid_deg: &[f64],
    consts: &PhysicalConstants,
    exec: Execution,
) -> Result<Vec<(f64, f64)>> {
    exec.map_slice(theta_grid_deg, |&theta| {
        slant_range(theta, h_km, consts).map(|d| (theta, model.rate_at_distance(d)))
    })
    .into_iter()
    .collect()
}

pub fn rate_vs_slant(model: &LinkModel, d_grid_km: &[f64]) -> Result<Vec<(f64, f64)>> {
    if let Some(&bad) = d_grid_km.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
        return Err(Error::Domain(format!("slant distance {bad} km must be > 0")));
    }
    Ok(d_grid_km
        .iter()
        .map(|&d| (d, model.rate_at_distance(d)))
        .collect())
}
