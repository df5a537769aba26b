//! Single overhead pass: visibility window above a minimum elevation and the
//! key bits accumulated over it.
//!
//! The station is held fixed in the orbital plane and Earth rotation is
//! ignored for the few minutes of a pass, so time enters only through the
//! central angle `phi = omega * t`, with `t = 0` at zenith.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linkbudget::LinkModel;
use crate::orbit::{angular_velocity, orbital_period, KeplerianOrbit, PhysicalConstants};

pub const DEFAULT_MIN_ELEVATION_DEG: f64 = 20.0;
pub const DEFAULT_STEP_S: f64 = 1.0;
const WINDOW_TOLERANCE_S: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassWindow {
    pub t1_s: f64,
    pub t2_s: f64,
}

impl PassWindow {
    pub fn duration_s(&self) -> f64 {
        self.t2_s - self.t1_s
    }

    pub fn is_empty(&self) -> bool {
        self.t2_s <= self.t1_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassSample {
    pub t_s: f64,
    pub distance_km: f64,
    pub rate_bps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PassResult {
    pub altitude_km: f64,
    pub window: PassWindow,
    pub total_bits: f64,
    pub samples: Vec<PassSample>,
}

fn check_altitude(h_km: f64) -> Result<()> {
    if h_km > 0.0 && h_km.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("altitude {h_km} km must be > 0")))
    }
}

fn check_min_elevation(min_elevation_deg: f64) -> Result<()> {
    if min_elevation_deg > 0.0 && min_elevation_deg <= 90.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "minimum elevation {min_elevation_deg} deg outside (0, 90]"
        )))
    }
}

fn mean_motion(h_km: f64, consts: &PhysicalConstants) -> f64 {
    angular_velocity(&KeplerianOrbit::circular(h_km, consts), consts)
}

/// In-plane geometry for central angle `phi` (rad): `(elevation_deg, distance_km)`.
fn geometry_at_angle(h_km: f64, phi: f64, consts: &PhysicalConstants) -> (f64, f64) {
    let r = consts.earth_radius_km;
    let rs = r + h_km;
    let (sin_phi, cos_phi) = phi.abs().sin_cos();
    let distance = (r * r + rs * rs - 2.0 * r * rs * cos_phi).max(0.0).sqrt();
    // components of (sat - stn) along the local vertical and horizontal
    let elevation = (rs * cos_phi - r).atan2(rs * sin_phi).to_degrees();
    (elevation, distance)
}

/// Elevation and law-of-cosines distance `t` seconds from zenith.
pub fn overhead_geometry(h_km: f64, t_s: f64, consts: &PhysicalConstants) -> Result<(f64, f64)> {
    check_altitude(h_km)?;
    let phi = mean_motion(h_km, consts) * t_s;
    if phi.abs() >= PI {
        return Err(Error::Domain(format!(
            "t = {t_s} s is half an orbit or more from zenith"
        )));
    }
    Ok(geometry_at_angle(h_km, phi, consts))
}

/// Symmetric window `[-t*, t*]` around zenith with elevation >= `min_elevation_deg`.
pub fn effective_window(
    h_km: f64,
    min_elevation_deg: f64,
    consts: &PhysicalConstants,
) -> Result<PassWindow> {
    check_altitude(h_km)?;
    check_min_elevation(min_elevation_deg)?;
    if min_elevation_deg >= 90.0 {
        return Ok(PassWindow { t1_s: 0.0, t2_s: 0.0 });
    }
    let omega = mean_motion(h_km, consts);
    let elevation = |t: f64| geometry_at_angle(h_km, omega * t, consts).0;

    // elevation falls monotonically from 90 at t = 0 to -90 at half a period
    let (mut lo, mut hi) = (0.0, PI / omega);
    while hi - lo > WINDOW_TOLERANCE_S {
        let mid = 0.5 * (lo + hi);
        if elevation(mid) >= min_elevation_deg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_star = 0.5 * (lo + hi);
    Ok(PassWindow {
        t1_s: -t_star,
        t2_s: t_star,
    })
}

pub fn integrate_pass(
    h_km: f64,
    model: &LinkModel,
    min_elevation_deg: f64,
    consts: &PhysicalConstants,
) -> Result<PassResult> {
    integrate_pass_with_step(h_km, model, min_elevation_deg, consts, DEFAULT_STEP_S)
}

/// Composite Simpson over the effective window with the largest even number
/// of panels whose width does not exceed `max_step_s`.
pub fn integrate_pass_with_step(
    h_km: f64,
    model: &LinkModel,
    min_elevation_deg: f64,
    consts: &PhysicalConstants,
    max_step_s: f64,
) -> Result<PassResult> {
    if !(max_step_s > 0.0 && max_step_s.is_finite()) {
        return Err(Error::Domain(format!("integration step {max_step_s} s must be > 0")));
    }
    let window = effective_window(h_km, min_elevation_deg, consts)?;
    if window.is_empty() {
        return Ok(PassResult {
            altitude_km: h_km,
            window,
            total_bits: 0.0,
            samples: Vec::new(),
        });
    }
    let omega = mean_motion(h_km, consts);
    let t_star = window.t2_s;

    let mut panels = (window.duration_s() / max_step_s).ceil() as usize;
    panels += panels % 2;
    let panels = panels.max(2);

    // nodes built as t* (2k - n) / n so that +t and -t are exact negations
    let samples: Vec<PassSample> = (0..=panels)
        .map(|k| {
            let t_s = t_star * (2.0 * k as f64 - panels as f64) / panels as f64;
            let (_, distance_km) = geometry_at_angle(h_km, omega * t_s, consts);
            PassSample {
                t_s,
                distance_km,
                rate_bps: model.rate_at_distance(distance_km),
            }
        })
        .collect();

    let weighted: f64 = samples
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let w = if k == 0 || k == panels {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * s.rate_bps
        })
        .sum();
    let step = window.duration_s() / panels as f64;

    Ok(PassResult {
        altitude_km: h_km,
        window,
        total_bits: weighted * step / 3.0,
        samples,
    })
}

/// Total bits per pass for each altitude, in grid order.
pub fn altitude_sweep(
    model: &LinkModel,
    h_grid_km: &[f64],
    min_elevation_deg: f64,
    consts: &PhysicalConstants,
) -> Result<Vec<(f64, f64)>> {
    altitude_sweep_with(model, h_grid_km, min_elevation_deg, consts, Execution::default())
}

pub fn altitude_sweep_with(
    model: &LinkModel,
    h_grid_km: &[f64],
    min_elevation_deg: f64,
    consts: &PhysicalConstants,
    exec: Execution,
) -> Result<Vec<(f64, f64)>> {
    if h_grid_km.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("altitude grid must be ascending".into()));
    }
    exec.map_slice(h_grid_km, |&h| {
        integrate_pass(h, model, min_elevation_deg, consts).map(|p| (h, p.total_bits))
    })
    .into_iter()
    .collect()
}

/// Orbital period at altitude `h_km`, for callers that only know the pass altitude.
pub fn period_at_altitude(h_km: f64, consts: &PhysicalConstants) -> f64 {
    orbital_period(&KeplerianOrbit::circular(h_km, consts), consts)
}
