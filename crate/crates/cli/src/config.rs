//! JSON scenario configuration.
//!
//! All lengths are km, times s, angles degrees, rates bits/s. Every section is
//! optional; unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use satqkd::constellation::{RelayRing, Scenario};
use satqkd::geodesy::{ClusteringParams, GroundStation, DEFAULT_EPS_KM};
use satqkd::linkbudget::LinkModel;
use satqkd::orbit::{KeplerianOrbit, PhysicalConstants};

use crate::error::CliError;
use crate::stations::read_stations_csv;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub constants: ConstantsBlock,
    pub link: Option<LinkBlock>,
    pub stations: Option<StationsBlock>,
    #[serde(default)]
    pub orbits: Vec<OrbitBlock>,
    pub ring: Option<RingBlock>,
    #[serde(default)]
    pub relays: Vec<OrbitBlock>,
    #[serde(default)]
    pub simulation: SimulationBlock,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsBlock {
    pub earth_radius_km: Option<f64>,
    pub mu_m3_s2: Option<f64>,
    pub sidereal_day_s: Option<f64>,
    pub atmosphere_margin_km: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkBlock {
    pub slope_db_per_km: Option<f64>,
    pub ref_distance_km: Option<f64>,
    pub base_rate_bps: Option<f64>,
    pub fit_points: Option<[[f64; 2]; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationRow {
    pub name: String,
    pub lat_deg: f64,
    pub lon_deg: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationsFile {
    pub file: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum StationsBlock {
    Inline(Vec<StationRow>),
    File(StationsFile),
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitBlock {
    /// `"molniya"` fills unspecified elements with the classical Molniya values.
    pub preset: Option<String>,
    pub a_km: Option<f64>,
    pub altitude_km: Option<f64>,
    pub e: Option<f64>,
    pub inc_deg: Option<f64>,
    pub raan_deg: Option<f64>,
    pub argp_deg: Option<f64>,
    #[serde(rename = "M0_deg")]
    pub m0_deg: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingBlock {
    pub count: usize,
    pub altitude_km: f64,
    pub phase_offsets_deg: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationBlock {
    pub duration_s: Option<f64>,
    pub step_s: Option<f64>,
    pub min_elevation_deg: Option<f64>,
    pub isl_loss_db: Option<f64>,
    /// Altitude for the single-satellite curves and pass experiments.
    pub altitude_km: Option<f64>,
    pub eps_km: Option<f64>,
    pub min_samples: Option<usize>,
    /// Spacing of the pairwise-rate samples.
    pub rate_step_s: Option<f64>,
}

/// A parsed config plus the directory relative paths are resolved against.
#[derive(Debug, Default)]
pub struct LoadedConfig {
    pub config: ScenarioConfig,
    pub base_dir: PathBuf,
}

pub const DEFAULT_ALTITUDE_KM: f64 = 400.0;
pub const DEFAULT_RATE_STEP_S: f64 = 60.0;

impl LoadedConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let config: ScenarioConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let loaded = Self {
            config,
            base_dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        };
        loaded.check_referenced_files()?;
        Ok(loaded)
    }

    fn check_referenced_files(&self) -> Result<(), CliError> {
        if let Some(StationsBlock::File(f)) = &self.config.stations {
            let path = self.base_dir.join(&f.file);
            if !path.is_file() {
                return Err(CliError::Config(format!(
                    "stations file {} does not exist",
                    path.display()
                )));
            }
        }
        Ok(())
    }

    pub fn constants(&self) -> Result<PhysicalConstants, CliError> {
        let c = &self.config.constants;
        let d = PhysicalConstants::default();
        let consts = PhysicalConstants {
            earth_radius_km: c.earth_radius_km.unwrap_or(d.earth_radius_km),
            mu_m3_s2: c.mu_m3_s2.unwrap_or(d.mu_m3_s2),
            sidereal_day_s: c.sidereal_day_s.unwrap_or(d.sidereal_day_s),
            atmosphere_margin_km: c.atmosphere_margin_km.unwrap_or(d.atmosphere_margin_km),
        };
        consts.validate()?;
        Ok(consts)
    }

    pub fn link_model(&self) -> Result<LinkModel, CliError> {
        let Some(link) = &self.config.link else {
            return Ok(LinkModel::micius());
        };
        let explicit = [link.slope_db_per_km, link.ref_distance_km, link.base_rate_bps];
        match (link.fit_points, explicit) {
            (Some([[d1, r1], [d2, r2]]), [None, None, None]) => {
                Ok(LinkModel::fit_from_two_points(d1, r1, d2, r2)?)
            }
            (None, [Some(slope), Some(d0), Some(t0)]) => Ok(LinkModel::new(slope, d0, t0)?),
            (None, [None, None, None]) => Ok(LinkModel::micius()),
            _ => Err(CliError::Config(
                "link: give either fit_points or all of slope_db_per_km, ref_distance_km, \
                 base_rate_bps"
                    .into(),
            )),
        }
    }

    /// Stations from the config; `None` when the config has no stations section.
    pub fn stations(&self) -> Result<Option<Vec<GroundStation>>, CliError> {
        match &self.config.stations {
            None => Ok(None),
            Some(StationsBlock::Inline(rows)) => rows
                .iter()
                .map(|r| GroundStation::new(r.name.clone(), r.lat_deg, r.lon_deg))
                .collect::<Result<Vec<_>, _>>()
                .map(Some)
                .map_err(CliError::from),
            Some(StationsBlock::File(f)) => read_stations_csv(&self.base_dir.join(&f.file)).map(Some),
        }
    }

    pub fn clustering(&self) -> Result<ClusteringParams, CliError> {
        let sim = &self.config.simulation;
        Ok(ClusteringParams::new(
            sim.eps_km.unwrap_or(DEFAULT_EPS_KM),
            sim.min_samples.unwrap_or(1),
        )?)
    }

    pub fn altitude_km(&self) -> f64 {
        self.config.simulation.altitude_km.unwrap_or(DEFAULT_ALTITUDE_KM)
    }

    pub fn min_elevation_deg(&self) -> f64 {
        self.config
            .simulation
            .min_elevation_deg
            .unwrap_or(satqkd::passsim::DEFAULT_MIN_ELEVATION_DEG)
    }

    pub fn rate_step_s(&self) -> f64 {
        self.config.simulation.rate_step_s.unwrap_or(DEFAULT_RATE_STEP_S)
    }

    pub fn ring(&self) -> Result<Option<RelayRing>, CliError> {
        self.config
            .ring
            .as_ref()
            .map(|r| match &r.phase_offsets_deg {
                Some(phases) => {
                    if phases.len() != r.count {
                        return Err(CliError::Config(format!(
                            "ring: count {} but {} phase offsets",
                            r.count,
                            phases.len()
                        )));
                    }
                    Ok(RelayRing::with_phases(r.altitude_km, phases.clone())?)
                }
                None => Ok(RelayRing::new(r.count, r.altitude_km)?),
            })
            .transpose()
    }

    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let consts = self.constants()?;
        let stations = self
            .stations()?
            .ok_or_else(|| CliError::Config("scenario needs a stations section".into()))?;
        let mut s = Scenario::new(stations, consts);
        s.link = self.link_model()?;
        s.orbits = self
            .config
            .orbits
            .iter()
            .map(|o| o.to_orbit(&consts))
            .collect::<Result<_, _>>()?;
        s.relays = self
            .config
            .relays
            .iter()
            .map(|o| o.to_orbit(&consts))
            .collect::<Result<_, _>>()?;
        s.ring = self.ring()?;
        let sim = &self.config.simulation;
        if let Some(v) = sim.duration_s {
            s.duration_s = v;
        }
        if let Some(v) = sim.step_s {
            s.step_s = v;
        }
        if let Some(v) = sim.min_elevation_deg {
            s.min_elevation_deg = v;
        }
        if let Some(v) = sim.isl_loss_db {
            s.isl_loss_db = v;
        }
        s.validate()?;
        Ok(s)
    }
}

impl OrbitBlock {
    pub fn to_orbit(&self, consts: &PhysicalConstants) -> Result<KeplerianOrbit, CliError> {
        let base = match self.preset.as_deref() {
            None => None,
            Some("molniya") => Some(KeplerianOrbit::molniya(consts)),
            Some(other) => {
                return Err(CliError::Config(format!("unknown orbit preset '{other}'")));
            }
        };
        let a = match (self.a_km, self.altitude_km, &base) {
            (Some(_), Some(_), _) => {
                return Err(CliError::Config(
                    "orbit: a_km and altitude_km are mutually exclusive".into(),
                ))
            }
            (Some(a), None, _) => a,
            (None, Some(h), _) => consts.earth_radius_km + h,
            (None, None, Some(b)) => b.semi_major_axis_km,
            (None, None, None) => {
                return Err(CliError::Config("orbit: a_km or altitude_km is required".into()))
            }
        };
        let b = base.unwrap_or(KeplerianOrbit::circular(0.0, consts));
        let orbit = KeplerianOrbit {
            semi_major_axis_km: a,
            eccentricity: self.e.unwrap_or(b.eccentricity),
            inclination_deg: self.inc_deg.unwrap_or(b.inclination_deg),
            raan_deg: self.raan_deg.unwrap_or(b.raan_deg),
            arg_perigee_deg: self.argp_deg.unwrap_or(b.arg_perigee_deg),
            mean_anomaly_epoch_deg: self.m0_deg.unwrap_or(b.mean_anomaly_epoch_deg),
        };
        orbit.validate(consts)?;
        Ok(orbit)
    }
}
