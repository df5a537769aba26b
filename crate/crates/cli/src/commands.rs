use std::path::PathBuf;

use clap::{Args, ValueEnum};

use satqkd::constellation::{
    coverage_fraction, hemisphere_dwell, min_ring_altitude, network_key_rate, ring_connected,
    RelayRing, DEFAULT_STEP_S,
};
use satqkd::geodesy::{cluster_centroid, cluster_stations, ClusteringParams, EARTH_RADIUS_KM};
use satqkd::linkbudget::{rate_vs_elevation, rate_vs_slant};
use satqkd::orbit::{orbital_period, KeplerianOrbit, PhysicalConstants};
use satqkd::passsim::{altitude_sweep, integrate_pass};
use satqkd::Execution;

use crate::config::LoadedConfig;
use crate::error::CliError;
use crate::output::{num, Table};
use crate::stations::read_stations_csv;

/// Everything a subcommand needs besides its own flags.
pub struct Context {
    pub config: LoadedConfig,
    pub out_dir: PathBuf,
}

impl Context {
    fn write(&self, table: &Table, name: &str) -> Result<PathBuf, CliError> {
        table.write_to(&self.out_dir, name)
    }
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ClusterArgs {
    /// Station list CSV (header name,lat_deg,lon_deg; decimal degrees). Overrides the config.
    #[arg(long, value_name = "CSV")]
    pub stations: Option<PathBuf>,
    /// DBSCAN neighborhood radius in km [default: 400]
    #[arg(long, value_name = "KM")]
    pub eps_km: Option<f64>,
    /// Minimum neighborhood size (self included) for a core station [default: 1]
    #[arg(long, value_name = "COUNT")]
    pub min_samples: Option<usize>,
}

pub fn cmd_cluster(ctx: &Context, args: &ClusterArgs) -> Result<String, CliError> {
    let stations = match &args.stations {
        Some(path) => read_stations_csv(path)?,
        None => ctx.config.stations()?.ok_or_else(|| {
            CliError::Usage("no stations: pass --stations or a config with a stations section".into())
        })?,
    };
    let defaults = ctx.config.clustering()?;
    let params = ClusteringParams::new(
        args.eps_km.unwrap_or(defaults.eps_km()),
        args.min_samples.unwrap_or(defaults.min_samples()),
    )?;
    let set = cluster_stations(&stations, &params, EARTH_RADIUS_KM)?;

    let mut assignments = Table::new(&["station_name", "cluster_id"]);
    for (station, label) in stations.iter().zip(set.labels(stations.len())) {
        let id = label.map_or_else(|| "noise".to_string(), |id| id.to_string());
        assignments.push(vec![station.name().to_string(), id]);
    }
    let mut centroids = Table::new(&["cluster_id", "lat_deg", "lon_deg", "members"]);
    for (id, members) in set.clusters.iter().enumerate() {
        let (lat, lon) = cluster_centroid(&stations, members)?;
        centroids.push(vec![id.to_string(), num(lat), num(lon), members.len().to_string()]);
    }
    ctx.write(&assignments, "clusters.csv")?;
    ctx.write(&centroids, "centroids.csv")?;
    Ok(format!(
        "clusters={} noise={} stations={} eps_km={} min_samples={}",
        set.clusters.len(),
        set.noise.len(),
        stations.len(),
        params.eps_km(),
        params.min_samples()
    ))
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CurveMode {
    /// Key rate against elevation angle (deg)
    Elevation,
    /// Key rate against slant range (km)
    Slant,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct CurvesArgs {
    #[arg(long, value_enum)]
    pub mode: CurveMode,
    /// Grid start: degrees for elevation, km for slant [default: 5 / 400]
    #[arg(long, value_name = "DEG|KM")]
    pub min: Option<f64>,
    /// Grid end, inclusive: degrees for elevation, km for slant [default: 90 / 2300]
    #[arg(long, value_name = "DEG|KM")]
    pub max: Option<f64>,
    /// Grid spacing: degrees for elevation, km for slant [default: 1 / 50]
    #[arg(long, value_name = "DEG|KM")]
    pub step: Option<f64>,
    /// Explicit comma-separated grid; replaces --min/--max/--step
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    pub values: Option<Vec<f64>>,
    /// Satellite altitude in km for the elevation curve [default: config or 400]
    #[arg(long, value_name = "KM")]
    pub altitude_km: Option<f64>,
}

fn linear_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(min.is_finite() && max.is_finite() && step.is_finite()) || step <= 0.0 || min > max {
        return Err(CliError::Usage(format!(
            "invalid grid: min {min}, max {max}, step {step} (need min <= max, step > 0)"
        )));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| min + step * k as f64).collect())
}

pub fn cmd_curves(ctx: &Context, args: &CurvesArgs) -> Result<String, CliError> {
    let model = ctx.config.link_model()?;
    let consts = ctx.config.constants()?;
    let (lo, hi, step) = match args.mode {
        CurveMode::Elevation => (5.0, 90.0, 1.0),
        CurveMode::Slant => (400.0, 2300.0, 50.0),
    };
    let grid = match &args.values {
        Some(v) if v.is_empty() => return Err(CliError::Usage("--values is empty".into())),
        Some(v) => v.clone(),
        None => linear_grid(
            args.min.unwrap_or(lo),
            args.max.unwrap_or(hi),
            args.step.unwrap_or(step),
        )?,
    };

    let (table, name) = match args.mode {
        CurveMode::Elevation => {
            if let Some(bad) = grid.iter().find(|t| !(0.0..=90.0).contains(*t)) {
                return Err(CliError::Usage(format!("elevation {bad} deg outside [0, 90]")));
            }
            let h = args.altitude_km.unwrap_or(ctx.config.altitude_km());
            let mut t = Table::new(&["theta_deg", "rate_bps"]);
            for (theta, rate) in rate_vs_elevation(&model, h, &grid, &consts)? {
                t.push(vec![num(theta), num(rate)]);
            }
            (t, "rate_vs_elevation.csv")
        }
        CurveMode::Slant => {
            let mut t = Table::new(&["slant_km", "rate_bps"]);
            for (d, rate) in rate_vs_slant(&model, &grid)? {
                t.push(vec![num(d), num(rate)]);
            }
            (t, "rate_vs_slant.csv")
        }
    };
    ctx.write(&table, name)?;
    Ok(format!("rows={} file={name}", table.len()))
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct PassArgs {
    /// Circular-orbit altitude in km [default: config or 400]
    #[arg(long, value_name = "KM")]
    pub altitude_km: Option<f64>,
    /// Minimum elevation in degrees bounding the pass window [default: config or 20]
    #[arg(long, value_name = "DEG")]
    pub min_elevation_deg: Option<f64>,
}

fn positive_altitude(h: f64) -> Result<f64, CliError> {
    if h > 0.0 && h.is_finite() {
        Ok(h)
    } else {
        Err(CliError::Usage(format!("altitude {h} km must be > 0")))
    }
}

pub fn cmd_pass(ctx: &Context, args: &PassArgs) -> Result<String, CliError> {
    let h = positive_altitude(args.altitude_km.unwrap_or(ctx.config.altitude_km()))?;
    let min_el = args.min_elevation_deg.unwrap_or(ctx.config.min_elevation_deg());
    let pass = integrate_pass(h, &ctx.config.link_model()?, min_el, &ctx.config.constants()?)?;

    let mut samples = Table::new(&["t_s", "distance_km", "rate_bps"]);
    for s in &pass.samples {
        samples.push(vec![num(s.t_s), num(s.distance_km), num(s.rate_bps)]);
    }
    let mut summary = Table::new(&["altitude_km", "min_elevation_deg", "t1_s", "t2_s", "total_bits"]);
    summary.push(vec![
        num(h),
        num(min_el),
        num(pass.window.t1_s),
        num(pass.window.t2_s),
        num(pass.total_bits),
    ]);
    ctx.write(&samples, "pass.csv")?;
    ctx.write(&summary, "pass_summary.csv")?;
    Ok(format!(
        "altitude_km={} t1_s={} t2_s={} total_bits={}",
        num(h),
        num(pass.window.t1_s),
        num(pass.window.t2_s),
        num(pass.total_bits)
    ))
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SweepArgs {
    /// Lowest altitude in km
    #[arg(long, value_name = "KM", default_value_t = 400.0)]
    pub h_min: f64,
    /// Highest altitude in km, inclusive
    #[arg(long, value_name = "KM", default_value_t = 1200.0)]
    pub h_max: f64,
    /// Altitude spacing in km
    #[arg(long, value_name = "KM", default_value_t = 50.0)]
    pub step: f64,
    /// Minimum elevation in degrees bounding each pass window [default: config or 20]
    #[arg(long, value_name = "DEG")]
    pub min_elevation_deg: Option<f64>,
}

pub fn cmd_sweep(ctx: &Context, args: &SweepArgs) -> Result<String, CliError> {
    positive_altitude(args.h_min)?;
    let grid = linear_grid(args.h_min, args.h_max, args.step)?;
    let min_el = args.min_elevation_deg.unwrap_or(ctx.config.min_elevation_deg());
    let sweep = altitude_sweep(&ctx.config.link_model()?, &grid, min_el, &ctx.config.constants()?)?;
    let mut table = Table::new(&["altitude_km", "total_bits"]);
    for (h, bits) in &sweep {
        table.push(vec![num(*h), num(*bits)]);
    }
    ctx.write(&table, "sweep.csv")?;
    Ok(format!("rows={} file=sweep.csv", table.len()))
}

fn ring_summary(ring: &RelayRing, step_s: f64, consts: &PhysicalConstants) -> Result<String, CliError> {
    let head = format!("ring count={} altitude_km={}", ring.count(), num(ring.altitude_km()));
    let bound = match min_ring_altitude(ring.count(), consts) {
        Ok(h) => format!("min_altitude_km={}", num(h)),
        Err(e @ satqkd::Error::InfeasibleRing(_)) => {
            return Ok(format!("{head} feasible=false reason=\"{e}\""));
        }
        Err(e) => return Err(e.into()),
    };
    let period = orbital_period(&KeplerianOrbit::circular(ring.altitude_km(), consts), consts);
    let n = ((period / step_s).round() as usize).max(1);
    let connected = (0..n)
        .map(|k| ring_connected(ring, k as f64 * step_s, consts))
        .collect::<Result<Vec<bool>, _>>()?
        .into_iter()
        .filter(|&c| c)
        .count();
    let fraction = connected as f64 / n as f64;
    Ok(format!(
        "{head} {bound} feasible={} connected_fraction={}",
        fraction == 1.0,
        num(fraction)
    ))
}

fn duty_table(relays: &[KeplerianOrbit], step_s: f64, consts: &PhysicalConstants) -> Result<(Table, Vec<String>), CliError> {
    let mut table = Table::new(&["relay_id", "north_fraction", "south_fraction"]);
    let mut notes = Vec::new();
    for (id, relay) in relays.iter().enumerate() {
        let dwell = hemisphere_dwell(relay, orbital_period(relay, consts), step_s, consts)?;
        table.push(vec![id.to_string(), num(dwell.north), num(dwell.south)]);
        if dwell.degenerate {
            notes.push(format!("relay {id}: equatorial orbit, hemisphere dwell undefined"));
        }
    }
    Ok((table, notes))
}

pub fn cmd_coverage(ctx: &Context) -> Result<String, CliError> {
    let scenario = ctx.config.scenario()?;
    let report = coverage_fraction(&scenario)?;

    let mut coverage = Table::new(&["station", "coverage_fraction"]);
    for s in &report.per_station_coverage {
        coverage.push(vec![s.station.clone(), num(s.fraction)]);
    }
    ctx.write(&coverage, "coverage.csv")?;

    let mut duty = Table::new(&["relay_id", "north_fraction", "south_fraction"]);
    for r in &report.relay_duty_cycles {
        duty.push(vec![r.relay_id.to_string(), num(r.dwell.north), num(r.dwell.south)]);
    }
    ctx.write(&duty, "duty_cycles.csv")?;

    let rate_step = ctx.config.rate_step_s();
    if !(rate_step > 0.0 && rate_step.is_finite()) {
        return Err(CliError::Config(format!("rate_step_s {rate_step} must be > 0")));
    }
    let times: Vec<f64> = (0..((scenario.duration_s / rate_step).ceil() as usize).max(1))
        .map(|k| k as f64 * rate_step)
        .filter(|&t| t < scenario.duration_s)
        .collect();
    let per_time = Execution::default().map_slice(&times, |&t| network_key_rate(&scenario, t));
    let mut rates = Table::new(&["station_a", "station_b", "t_s", "rate_bps"]);
    for (t, pairs) in times.iter().zip(per_time) {
        for p in pairs? {
            rates.push(vec![
                scenario.stations[p.station_a].name().to_string(),
                scenario.stations[p.station_b].name().to_string(),
                num(*t),
                num(p.rate_bps),
            ]);
        }
    }
    ctx.write(&rates, "pairwise_rates.csv")?;

    let mut lines = vec![format!(
        "stations={} satellites={} samples={} mean_coverage={}",
        report.per_station_coverage.len(),
        scenario.orbits.len(),
        report.samples,
        num(report.per_station_coverage.iter().map(|s| s.fraction).sum::<f64>()
            / report.per_station_coverage.len() as f64)
    )];
    if let Some(ring) = &scenario.ring {
        lines.push(ring_summary(ring, scenario.step_s, &scenario.constants)?);
        if let Some(f) = report.ring_connected_fraction {
            lines.push(format!("ring_connected_fraction={}", num(f)));
        }
    }
    lines.extend(report.warnings.iter().map(|w| format!("warning: {w}")));
    Ok(lines.join("\n"))
}

pub fn cmd_relay(ctx: &Context) -> Result<String, CliError> {
    let consts = ctx.config.constants()?;
    let relays = ctx
        .config
        .config
        .relays
        .iter()
        .map(|o| o.to_orbit(&consts))
        .collect::<Result<Vec<_>, _>>()?;
    let ring = ctx.config.ring()?;
    if relays.is_empty() && ring.is_none() {
        return Err(CliError::Config("relay: config has neither relays nor a ring".into()));
    }
    let step = ctx.config.config.simulation.step_s.unwrap_or(DEFAULT_STEP_S);
    if !(step > 0.0 && step.is_finite()) {
        return Err(CliError::Config(format!("step_s {step} must be > 0")));
    }

    let (duty, notes) = duty_table(&relays, step, &consts)?;
    ctx.write(&duty, "duty_cycles.csv")?;

    let mut lines = vec![format!("relays={}", relays.len())];
    lines.extend(notes);
    if let Some(ring) = &ring {
        lines.push(ring_summary(ring, step, &consts)?);
    }
    Ok(lines.join("\n"))
}
