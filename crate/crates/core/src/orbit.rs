//! Two-body orbital mechanics and satellite/station geometry.
//!
//! Satellites live in an Earth-centered inertial frame; ground stations sit on
//! a spherical Earth rotating about +z, with the prime meridian on +x at t = 0.
//! No J2, drag or precession is modeled.

use std::f64::consts::{PI, TAU};
use std::ops::Sub;

use crate::error::{Error, Result};
use crate::geodesy::GroundStation;

pub const MOLNIYA_ECCENTRICITY: f64 = 0.74;
pub const MOLNIYA_INCLINATION_DEG: f64 = 63.4;
pub const MOLNIYA_ARG_PERIGEE_DEG: f64 = 270.0;

const KEPLER_TOLERANCE: f64 = 1e-13;
const KEPLER_MAX_ITER: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub earth_radius_km: f64,
    /// Gravitational parameter GM in m^3/s^2.
    pub mu_m3_s2: f64,
    pub sidereal_day_s: f64,
    /// Extra clearance above the surface an inter-satellite line must keep.
    pub atmosphere_margin_km: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            earth_radius_km: 6371.0,
            mu_m3_s2: 3.986004418e14,
            sidereal_day_s: 86164.0905,
            atmosphere_margin_km: 100.0,
        }
    }
}

impl PhysicalConstants {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("earth_radius_km", self.earth_radius_km),
            ("mu_m3_s2", self.mu_m3_s2),
            ("sidereal_day_s", self.sidereal_day_s),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConstants(format!("{name} must be > 0, got {v}")));
            }
        }
        // zero margin is a legitimate "bare sphere" clearance
        let m = self.atmosphere_margin_km;
        if !(m >= 0.0 && m.is_finite()) {
            return Err(Error::InvalidConstants(format!(
                "atmosphere_margin_km must be >= 0, got {m}"
            )));
        }
        Ok(())
    }

    /// Earth rotation rate in rad/s.
    pub fn earth_rotation_rate(&self) -> f64 {
        TAU / self.sidereal_day_s
    }

    /// Gravitational parameter in km^3/s^2.
    pub fn mu_km3_s2(&self) -> f64 {
        self.mu_m3_s2 * 1e-9
    }

    /// Semi-major axis giving the requested period.
    pub fn semi_major_axis_for_period(&self, period_s: f64) -> f64 {
        (self.mu_km3_s2() * (period_s / TAU).powi(2)).cbrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeplerianOrbit {
    pub semi_major_axis_km: f64,
    pub eccentricity: f64,
    pub inclination_deg: f64,
    pub raan_deg: f64,
    pub arg_perigee_deg: f64,
    pub mean_anomaly_epoch_deg: f64,
}

impl KeplerianOrbit {
    /// Equatorial circular orbit at `altitude_km`, all angles zero.
    pub fn circular(altitude_km: f64, consts: &PhysicalConstants) -> Self {
        Self {
            semi_major_axis_km: consts.earth_radius_km + altitude_km,
            eccentricity: 0.0,
            inclination_deg: 0.0,
            raan_deg: 0.0,
            arg_perigee_deg: 0.0,
            mean_anomaly_epoch_deg: 0.0,
        }
    }

    /// Classical Molniya: half-sidereal-day period, e = 0.74, i = 63.4 deg,
    /// perigee argument 270 deg (apogee over the northern hemisphere).
    pub fn molniya(consts: &PhysicalConstants) -> Self {
        Self {
            semi_major_axis_km: consts.semi_major_axis_for_period(consts.sidereal_day_s / 2.0),
            eccentricity: MOLNIYA_ECCENTRICITY,
            inclination_deg: MOLNIYA_INCLINATION_DEG,
            raan_deg: 0.0,
            arg_perigee_deg: MOLNIYA_ARG_PERIGEE_DEG,
            mean_anomaly_epoch_deg: 0.0,
        }
    }

    pub fn with_inclination(mut self, deg: f64) -> Self {
        self.inclination_deg = deg;
        self
    }

    pub fn with_raan(mut self, deg: f64) -> Self {
        self.raan_deg = deg;
        self
    }

    pub fn with_mean_anomaly(mut self, deg: f64) -> Self {
        self.mean_anomaly_epoch_deg = deg;
        self
    }

    pub fn validate(&self, consts: &PhysicalConstants) -> Result<()> {
        let angles = [
            self.inclination_deg,
            self.raan_deg,
            self.arg_perigee_deg,
            self.mean_anomaly_epoch_deg,
        ];
        if !self.semi_major_axis_km.is_finite() || angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidOrbit("non-finite element".into()));
        }
        if !(0.0..1.0).contains(&self.eccentricity) {
            return Err(Error::InvalidOrbit(format!(
                "eccentricity {} outside [0, 1)",
                self.eccentricity
            )));
        }
        let perigee = self.perigee_radius_km();
        if perigee <= consts.earth_radius_km {
            return Err(Error::InvalidOrbit(format!(
                "perigee radius {perigee} km does not clear Earth radius {} km",
                consts.earth_radius_km
            )));
        }
        Ok(())
    }

    pub fn perigee_radius_km(&self) -> f64 {
        self.semi_major_axis_km * (1.0 - self.eccentricity)
    }

    pub fn apogee_radius_km(&self) -> f64 {
        self.semi_major_axis_km * (1.0 + self.eccentricity)
    }
}

/// Point in the inertial frame at time `t` (seconds since epoch).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
}

impl Position3 {
    pub fn new(x: f64, y: f64, z: f64, t: f64) -> Self {
        Self { x, y, z, t }
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn distance_to(&self, other: &Self) -> f64 {
        (*self - *other).norm()
    }
}

impl Sub for Position3 {
    type Output = Position3;

    /// Component-wise difference; keeps the left operand's timestamp.
    fn sub(self, rhs: Self) -> Self {
        Position3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z, self.t)
    }
}

/// T = 2 pi sqrt(a^3 / mu), with a converted to meters.
pub fn orbital_period(orbit: &KeplerianOrbit, consts: &PhysicalConstants) -> f64 {
    let a_m = orbit.semi_major_axis_km * 1e3;
    TAU * (a_m.powi(3) / consts.mu_m3_s2).sqrt()
}

/// Mean motion in rad/s.
pub fn angular_velocity(orbit: &KeplerianOrbit, consts: &PhysicalConstants) -> f64 {
    TAU / orbital_period(orbit, consts)
}

/// Solves `E - e sin E = M` for the eccentric anomaly by Newton iteration.
///
/// `M` is reduced to `[0, 2pi)` first, so the returned `E` is also in
/// `[0, 2pi]`.
pub fn solve_kepler(mean_anomaly_rad: f64, eccentricity: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&eccentricity) || !mean_anomaly_rad.is_finite() {
        return Err(Error::Domain(format!(
            "kepler: need finite M and 0 <= e < 1 (M = {mean_anomaly_rad}, e = {eccentricity})"
        )));
    }
    let m = mean_anomaly_rad.rem_euclid(TAU);
    if eccentricity == 0.0 || m == 0.0 {
        return Ok(m);
    }
    let mut e_anom = if eccentricity < 0.8 { m } else { PI };
    for _ in 0..KEPLER_MAX_ITER {
        let f = e_anom - eccentricity * e_anom.sin() - m;
        if f.abs() < KEPLER_TOLERANCE {
            return Ok(e_anom);
        }
        e_anom -= f / (1.0 - eccentricity * e_anom.cos());
    }
    Err(Error::SolverFailure {
        mean_anomaly: mean_anomaly_rad,
        eccentricity,
    })
}

pub fn true_anomaly_from_eccentric(eccentric_anomaly: f64, eccentricity: f64) -> f64 {
    let half = eccentric_anomaly / 2.0;
    2.0 * ((1.0 + eccentricity).sqrt() * half.sin()).atan2((1.0 - eccentricity).sqrt() * half.cos())
}

/// Two-body position at `t` seconds after epoch.
pub fn propagate(orbit: &KeplerianOrbit, t: f64, consts: &PhysicalConstants) -> Result<Position3> {
    let e = orbit.eccentricity;
    let mean = orbit.mean_anomaly_epoch_deg.to_radians() + angular_velocity(orbit, consts) * t;
    let ecc_anom = solve_kepler(mean, e)?;
    let nu = true_anomaly_from_eccentric(ecc_anom, e);
    let r = orbit.semi_major_axis_km * (1.0 - e * ecc_anom.cos());

    let u = orbit.arg_perigee_deg.to_radians() + nu;
    let (raan, inc) = (orbit.raan_deg.to_radians(), orbit.inclination_deg.to_radians());
    let (su, cu) = u.sin_cos();
    let (so, co) = raan.sin_cos();
    let (si, ci) = inc.sin_cos();
    Ok(Position3::new(
        r * (co * cu - so * su * ci),
        r * (so * cu + co * su * ci),
        r * (su * si),
        t,
    ))
}

/// Station on the rotating spherical Earth at time `t`.
pub fn station_position(station: &GroundStation, t: f64, consts: &PhysicalConstants) -> Position3 {
    let lat = station.lat_deg().to_radians();
    let lon = station.lon_deg().to_radians() + consts.earth_rotation_rate() * t;
    let r = consts.earth_radius_km;
    Position3::new(
        r * lat.cos() * lon.cos(),
        r * lat.cos() * lon.sin(),
        r * lat.sin(),
        t,
    )
}

/// Elevation of `sat` above the local horizon at `stn`, in degrees.
pub fn elevation_angle(sat: &Position3, stn: &Position3) -> Result<f64> {
    let los = *sat - *stn;
    let (los_norm, stn_norm) = (los.norm(), stn.norm());
    if los_norm == 0.0 {
        return Err(Error::DegenerateGeometry("satellite and station coincide"));
    }
    if stn_norm == 0.0 {
        return Err(Error::DegenerateGeometry("station at Earth's center"));
    }
    let cos_zenith = (los.dot(stn) / (los_norm * stn_norm)).clamp(-1.0, 1.0);
    Ok(90.0 - cos_zenith.acos().to_degrees())
}

/// Closed-form slant range d = sqrt((R+h)^2 - (R cos th)^2) - R sin th.
pub fn slant_range(theta_deg: f64, h_km: f64, consts: &PhysicalConstants) -> Result<f64> {
    if !(0.0..=90.0).contains(&theta_deg) {
        return Err(Error::Domain(format!(
            "elevation {theta_deg} deg outside [0, 90]"
        )));
    }
    if !(h_km > 0.0 && h_km.is_finite()) {
        return Err(Error::Domain(format!("altitude {h_km} km must be > 0")));
    }
    let r = consts.earth_radius_km;
    let th = theta_deg.to_radians();
    Ok(((r + h_km).powi(2) - (r * th.cos()).powi(2)).sqrt() - r * th.sin())
}

/// Whether the straight segment `p1`-`p2` clears Earth plus the atmosphere margin.
pub fn line_of_sight(p1: &Position3, p2: &Position3, consts: &PhysicalConstants) -> bool {
    let d = *p2 - *p1;
    let dd = d.dot(&d);
    if dd == 0.0 {
        return p1.norm() > consts.earth_radius_km + consts.atmosphere_margin_km;
    }
    // parameter of the closest approach of the infinite line to the origin
    let s = -p1.dot(&d) / dd;
    if s <= 0.0 || s >= 1.0 {
        return true;
    }
    let closest = Position3::new(p1.x + s * d.x, p1.y + s * d.y, p1.z + s * d.z, p1.t);
    closest.norm() > consts.earth_radius_km + consts.atmosphere_margin_km
}
