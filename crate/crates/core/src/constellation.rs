//! Constellation-level evaluation: equatorial relay rings, Molniya relay
//! hemisphere dwell, time-stepped ground coverage and station-pair key rates
//! through inter-satellite links.

use std::collections::VecDeque;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geodesy::GroundStation;
use crate::linkbudget::LinkModel;
use crate::orbit::{
    elevation_angle, line_of_sight, orbital_period, propagate, station_position, KeplerianOrbit,
    PhysicalConstants, Position3,
};
use crate::passsim::DEFAULT_MIN_ELEVATION_DEG;

pub const DEFAULT_STEP_S: f64 = 10.0;
/// Longest relay path considered, in inter-satellite hops.
pub const MAX_ISL_HOPS: usize = 2;

/// Equatorial circular ring of relay satellites.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayRing {
    count: usize,
    altitude_km: f64,
    phase_offsets_deg: Vec<f64>,
}

impl RelayRing {
    /// Equally spaced ring.
    pub fn new(count: usize, altitude_km: f64) -> Result<Self> {
        let phases = (0..count).map(|i| 360.0 * i as f64 / count as f64).collect();
        Self::with_phases(altitude_km, phases)
    }

    pub fn with_phases(altitude_km: f64, phase_offsets_deg: Vec<f64>) -> Result<Self> {
        let count = phase_offsets_deg.len();
        if count < 2 {
            return Err(Error::InvalidScenario(format!(
                "a relay ring needs at least 2 satellites, got {count}"
            )));
        }
        if !(altitude_km > 0.0 && altitude_km.is_finite()) {
            return Err(Error::InvalidScenario(format!(
                "ring altitude {altitude_km} km must be > 0"
            )));
        }
        let mut reduced: Vec<f64> = phase_offsets_deg.iter().map(|p| p.rem_euclid(360.0)).collect();
        if reduced.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidScenario("non-finite ring phase".into()));
        }
        reduced.sort_by(f64::total_cmp);
        if reduced.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidScenario(
                "ring phases must be distinct modulo 360".into(),
            ));
        }
        Ok(Self {
            count,
            altitude_km,
            phase_offsets_deg: reduced,
        })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn altitude_km(&self) -> f64 {
        self.altitude_km
    }

    /// Phases in ascending order; ring neighbours are consecutive entries.
    pub fn phase_offsets_deg(&self) -> &[f64] {
        &self.phase_offsets_deg
    }

    pub fn orbits(&self, consts: &PhysicalConstants) -> Vec<KeplerianOrbit> {
        self.phase_offsets_deg
            .iter()
            .map(|&p| KeplerianOrbit::circular(self.altitude_km, consts).with_mean_anomaly(p))
            .collect()
    }

    /// Index pairs of ring neighbours. A 2-ring has a single pair.
    fn adjacent_pairs(&self) -> Vec<(usize, usize)> {
        if self.count == 2 {
            return vec![(0, 1)];
        }
        (0..self.count).map(|i| (i, (i + 1) % self.count)).collect()
    }
}

/// Lowest altitude at which equally spaced ring neighbours keep line of sight
/// over Earth plus the atmosphere margin: `(R + margin) / cos(pi / n) - R`.
pub fn min_ring_altitude(count: usize, consts: &PhysicalConstants) -> Result<f64> {
    match count {
        0 | 1 => Err(Error::InvalidScenario(format!(
            "a relay ring needs at least 2 satellites, got {count}"
        ))),
        2 => Err(Error::InfeasibleRing(
            "2-satellite ring: the chord between diametrically opposed satellites passes \
             through Earth's center at every altitude"
                .into(),
        )),
        n => {
            let clearance = consts.earth_radius_km + consts.atmosphere_margin_km;
            Ok(clearance / (PI / n as f64).cos() - consts.earth_radius_km)
        }
    }
}

/// True iff every pair of ring neighbours has line of sight at `t_s`.
pub fn ring_connected(ring: &RelayRing, t_s: f64, consts: &PhysicalConstants) -> Result<bool> {
    let positions = ring
        .orbits(consts)
        .iter()
        .map(|o| propagate(o, t_s, consts))
        .collect::<Result<Vec<_>>>()?;
    Ok(ring
        .adjacent_pairs()
        .into_iter()
        .all(|(i, j)| line_of_sight(&positions[i], &positions[j], consts)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hemisphere {
    North,
    South,
}

/// Fraction of sampled instants spent strictly north / south of the equator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HemisphereDwell {
    pub north: f64,
    pub south: f64,
    /// Set when the orbit lies in the equatorial plane, so neither fraction is meaningful.
    pub degenerate: bool,
}

impl HemisphereDwell {
    pub fn fraction(&self, hemisphere: Hemisphere) -> f64 {
        match hemisphere {
            Hemisphere::North => self.north,
            Hemisphere::South => self.south,
        }
    }
}

fn sample_count(duration_s: f64, step_s: f64) -> usize {
    ((duration_s / step_s).round() as usize).max(1)
}

pub fn hemisphere_dwell(
    relay: &KeplerianOrbit,
    duration_s: f64,
    step_s: f64,
    consts: &PhysicalConstants,
) -> Result<HemisphereDwell> {
    relay.validate(consts)?;
    if !(step_s > 0.0 && step_s.is_finite()) {
        return Err(Error::InvalidScenario(format!("step {step_s} s must be > 0")));
    }
    let period = orbital_period(relay, consts);
    // allow for rounding in callers passing exactly one period
    if duration_s.is_nan() || duration_s < period * (1.0 - 1e-9) {
        return Err(Error::InvalidScenario(format!(
            "duty-cycle duration {duration_s} s is shorter than one orbital period ({period} s)"
        )));
    }
    let n = sample_count(duration_s, step_s);
    let (mut north, mut south) = (0usize, 0usize);
    for k in 0..n {
        let p = propagate(relay, k as f64 * step_s, consts)?;
        if p.z > 0.0 {
            north += 1;
        } else if p.z < 0.0 {
            south += 1;
        }
    }
    Ok(HemisphereDwell {
        north: north as f64 / n as f64,
        south: south as f64 / n as f64,
        degenerate: north == 0 && south == 0,
    })
}

/// Hemisphere-dwell fraction used as the relay duty cycle.
pub fn relay_duty_cycle(
    relay: &KeplerianOrbit,
    hemisphere: Hemisphere,
    duration_s: f64,
    step_s: f64,
    consts: &PhysicalConstants,
) -> Result<f64> {
    hemisphere_dwell(relay, duration_s, step_s, consts).map(|d| d.fraction(hemisphere))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub constants: PhysicalConstants,
    pub stations: Vec<GroundStation>,
    /// Communication satellites (downlink capable).
    pub orbits: Vec<KeplerianOrbit>,
    pub ring: Option<RelayRing>,
    /// Relay satellites (inter-satellite links only), typically Molniya.
    pub relays: Vec<KeplerianOrbit>,
    pub link: LinkModel,
    pub isl_loss_db: f64,
    pub duration_s: f64,
    pub step_s: f64,
    pub min_elevation_deg: f64,
}

impl Scenario {
    /// Stations only; one sidereal day at 10 s steps, 20 deg mask, lossless ISLs.
    pub fn new(stations: Vec<GroundStation>, constants: PhysicalConstants) -> Self {
        Self {
            constants,
            stations,
            orbits: Vec::new(),
            ring: None,
            relays: Vec::new(),
            link: LinkModel::micius(),
            isl_loss_db: 0.0,
            duration_s: constants.sidereal_day_s,
            step_s: DEFAULT_STEP_S,
            min_elevation_deg: DEFAULT_MIN_ELEVATION_DEG,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        if self.stations.is_empty() {
            return Err(Error::InvalidScenario("at least one station is required".into()));
        }
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return Err(Error::InvalidScenario(format!(
                "duration {} s must be > 0",
                self.duration_s
            )));
        }
        if !(self.step_s > 0.0 && self.step_s <= self.duration_s) {
            return Err(Error::InvalidScenario(format!(
                "step {} s must be in (0, duration]",
                self.step_s
            )));
        }
        if !(self.isl_loss_db >= 0.0 && self.isl_loss_db.is_finite()) {
            return Err(Error::InvalidScenario(format!(
                "ISL loss {} dB must be >= 0",
                self.isl_loss_db
            )));
        }
        if !(-90.0..=90.0).contains(&self.min_elevation_deg) {
            return Err(Error::InvalidScenario(format!(
                "minimum elevation {} deg outside [-90, 90]",
                self.min_elevation_deg
            )));
        }
        for o in self.orbits.iter().chain(&self.relays) {
            o.validate(&self.constants)?;
        }
        if let Some(ring) = &self.ring {
            for o in ring.orbits(&self.constants) {
                o.validate(&self.constants)?;
            }
        }
        Ok(())
    }

    fn relay_nodes(&self) -> Vec<KeplerianOrbit> {
        let mut nodes = self
            .ring
            .as_ref()
            .map(|r| r.orbits(&self.constants))
            .unwrap_or_default();
        nodes.extend_from_slice(&self.relays);
        nodes
    }

    fn shortest_period(&self) -> Option<f64> {
        self.orbits
            .iter()
            .chain(&self.relay_nodes())
            .map(|o| orbital_period(o, &self.constants))
            .min_by(f64::total_cmp)
    }

    fn sample_times(&self) -> Vec<f64> {
        (0..sample_count(self.duration_s, self.step_s))
            .map(|k| k as f64 * self.step_s)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationCoverage {
    pub station: String,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelayDuty {
    pub relay_id: usize,
    pub dwell: HemisphereDwell,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub per_station_coverage: Vec<StationCoverage>,
    /// `None` when the scenario has no ring.
    pub ring_connected_fraction: Option<f64>,
    /// Each relay's hemisphere dwell over one of its own orbital periods.
    pub relay_duty_cycles: Vec<RelayDuty>,
    pub samples: usize,
    pub warnings: Vec<String>,
}

pub fn coverage_fraction(scenario: &Scenario) -> Result<CoverageReport> {
    coverage_fraction_with(scenario, Execution::default())
}

pub fn coverage_fraction_with(scenario: &Scenario, exec: Execution) -> Result<CoverageReport> {
    scenario.validate()?;
    let consts = &scenario.constants;
    let times = scenario.sample_times();

    let per_instant = exec.map_slice(&times, |&t| -> Result<(Vec<bool>, bool)> {
        let sats = scenario
            .orbits
            .iter()
            .map(|o| propagate(o, t, consts))
            .collect::<Result<Vec<_>>>()?;
        let covered = scenario
            .stations
            .iter()
            .map(|s| {
                let stn = station_position(s, t, consts);
                for sat in &sats {
                    if elevation_angle(sat, &stn)? >= scenario.min_elevation_deg {
                        return Ok(true);
                    }
                }
                Ok(false)
            })
            .collect::<Result<Vec<bool>>>()?;
        let ring_ok = match &scenario.ring {
            Some(ring) => ring_connected(ring, t, consts)?,
            None => false,
        };
        Ok((covered, ring_ok))
    });

    let mut station_hits = vec![0usize; scenario.stations.len()];
    let mut ring_hits = 0usize;
    for instant in per_instant {
        let (covered, ring_ok) = instant?;
        for (hits, c) in station_hits.iter_mut().zip(covered) {
            *hits += usize::from(c);
        }
        ring_hits += usize::from(ring_ok);
    }
    let n = times.len() as f64;

    let relay_duty_cycles = scenario
        .relays
        .iter()
        .enumerate()
        .map(|(relay_id, relay)| {
            let period = orbital_period(relay, consts);
            hemisphere_dwell(relay, period, scenario.step_s, consts)
                .map(|dwell| RelayDuty { relay_id, dwell })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut warnings = Vec::new();
    if let Some(period) = scenario.shortest_period() {
        if scenario.step_s > period / 100.0 {
            warnings.push(format!(
                "undersampled: step {} s exceeds 1/100 of the shortest orbital period ({:.1} s)",
                scenario.step_s, period
            ));
        }
    }

    Ok(CoverageReport {
        per_station_coverage: scenario
            .stations
            .iter()
            .zip(station_hits)
            .map(|(s, hits)| StationCoverage {
                station: s.name().to_string(),
                fraction: hits as f64 / n,
            })
            .collect(),
        ring_connected_fraction: scenario.ring.as_ref().map(|_| ring_hits as f64 / n),
        relay_duty_cycles,
        samples: times.len(),
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairRate {
    pub station_a: usize,
    pub station_b: usize,
    pub rate_bps: f64,
}

/// Hop counts from `src` over the line-of-sight graph, capped at [`MAX_ISL_HOPS`].
fn isl_hops(adjacent: &[Vec<bool>], src: usize) -> Vec<Option<usize>> {
    let mut hops = vec![None; adjacent.len()];
    hops[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        let h = hops[u].expect("queued nodes have a hop count");
        if h == MAX_ISL_HOPS {
            continue;
        }
        for (v, &linked) in adjacent[u].iter().enumerate() {
            if linked && hops[v].is_none() {
                hops[v] = Some(h + 1);
                queue.push_back(v);
            }
        }
    }
    hops
}

/// Best key rate for every station pair `(a, b)`, `a < b`, at time `t_s`.
///
/// A path downlinks from communication satellite `s1` to `a` and from `s2` to
/// `b` (possibly `s1 == s2`); the two satellites are joined by at most
/// [`MAX_ISL_HOPS`] inter-satellite links through any satellite or relay. The
/// path rate is the weaker downlink times `10^(-isl_loss_db / 10)` per hop.
pub fn network_key_rate(scenario: &Scenario, t_s: f64) -> Result<Vec<PairRate>> {
    scenario.validate()?;
    let consts = &scenario.constants;
    let comm: Vec<Position3> = scenario
        .orbits
        .iter()
        .map(|o| propagate(o, t_s, consts))
        .collect::<Result<_>>()?;
    let mut nodes = comm.clone();
    for o in scenario.relay_nodes() {
        nodes.push(propagate(&o, t_s, consts)?);
    }
    let adjacent: Vec<Vec<bool>> = nodes
        .iter()
        .enumerate()
        .map(|(i, p)| {
            nodes
                .iter()
                .enumerate()
                .map(|(j, q)| i != j && line_of_sight(p, q, consts))
                .collect()
        })
        .collect();
    let hops: Vec<Vec<Option<usize>>> = (0..comm.len()).map(|s| isl_hops(&adjacent, s)).collect();

    // downlink[station][sat]
    let downlink: Vec<Vec<Option<f64>>> = scenario
        .stations
        .iter()
        .map(|s| {
            let stn = station_position(s, t_s, consts);
            comm.iter()
                .map(|sat| {
                    let el = elevation_angle(sat, &stn)?;
                    Ok((el >= scenario.min_elevation_deg)
                        .then(|| scenario.link.rate_at_distance(sat.distance_to(&stn))))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let hop_factor = 10f64.powf(-scenario.isl_loss_db / 10.0);
    let n = scenario.stations.len();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for a in 0..n {
        for b in (a + 1)..n {
            let mut best = 0.0f64;
            for (s1, ra) in downlink[a].iter().enumerate() {
                let Some(ra) = ra else { continue };
                for (s2, rb) in downlink[b].iter().enumerate() {
                    let (Some(rb), Some(h)) = (rb, hops[s1][s2]) else {
                        continue;
                    };
                    best = best.max(ra.min(*rb) * hop_factor.powi(h as i32));
                }
            }
            out.push(PairRate {
                station_a: a,
                station_b: b,
                rate_bps: best,
            });
        }
    }
    Ok(out)
}
