//! Acceptance gate. Run with
//! `cargo test -p satqkd --test acceptance -- --nocapture`
//! to see one PASS/FAIL line per criterion.

mod common;

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use rand::Rng;

use satqkd::constellation::{
    coverage_fraction, hemisphere_dwell, min_ring_altitude, RelayRing, Scenario,
};
use satqkd::geodesy::{dbscan_cluster, distance_matrix, ClusteringParams, GroundStation, EARTH_RADIUS_KM};
use satqkd::linkbudget::{rate_vs_elevation, rate_vs_slant, LinkModel};
use satqkd::orbit::{
    angular_velocity, orbital_period, slant_range, solve_kepler, KeplerianOrbit,
    PhysicalConstants,
};
use satqkd::passsim::{
    altitude_sweep, effective_window, integrate_pass, integrate_pass_with_step, overhead_geometry,
};
use satqkd::Error;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn consts() -> PhysicalConstants {
    PhysicalConstants::default()
}

fn c1_link_calibration() -> Outcome {
    let m = LinkModel::fit_from_two_points(645.0, 12000.0, 1200.0, 1000.0).map_err(|e| e.to_string())?;
    let r645 = m.rate_at_distance(645.0);
    ensure(r645 == 12000.0, || format!("rate(645) = {r645}"))?;
    let ratio = m.rate_at_distance(1200.0) / r645;
    let rel = ((ratio - 1.0 / 12.0) / (1.0 / 12.0)).abs();
    ensure(rel < 1e-9, || format!("ratio rel err {rel:e}"))?;
    let oracle = 10.0 * (1.0f64 / 12.0).log10() / 555.0;
    let slope = m.slope_db_per_km();
    ensure((slope - oracle).abs() < 1e-6, || format!("slope {slope} vs oracle {oracle}"))?;
    ensure((slope - (-0.019445)).abs() < 1e-6, || format!("slope {slope} vs -0.019445"))?;
    Ok(format!("slope = {slope:.7} dB/km, ratio err {rel:.1e}"))
}

fn c2_elevation_monotone() -> Outcome {
    let grid: Vec<f64> = (5..=90).map(f64::from).collect();
    let curve = rate_vs_elevation(&LinkModel::micius(), 400.0, &grid, &consts()).map_err(|e| e.to_string())?;
    if let Some(w) = curve.windows(2).find(|w| w[1].1 <= w[0].1) {
        return Err(format!("not increasing at {:?} -> {:?}", w[0], w[1]));
    }
    Ok(format!("{} points, {:.0} -> {:.0} bps", curve.len(), curve[0].1, curve[85].1))
}

fn c3_slant_monotone() -> Outcome {
    let grid: Vec<f64> = (0..50).map(|i| 400.0 + 1900.0 * i as f64 / 49.0).collect();
    let curve = rate_vs_slant(&LinkModel::micius(), &grid).map_err(|e| e.to_string())?;
    if let Some(w) = curve.windows(2).find(|w| w[1].1 >= w[0].1) {
        return Err(format!("not decreasing at {:?} -> {:?}", w[0], w[1]));
    }
    Ok(format!("{} points strictly decreasing", curve.len()))
}

fn c4_altitude_sweep() -> Outcome {
    let grid: Vec<f64> = (0..17).map(|i| 400.0 + 50.0 * i as f64).collect();
    let sweep = altitude_sweep(&LinkModel::micius(), &grid, 20.0, &consts()).map_err(|e| e.to_string())?;
    ensure(sweep.len() == 17, || format!("{} rows", sweep.len()))?;
    if let Some(w) = sweep.windows(2).find(|w| w[1].1 >= w[0].1) {
        return Err(format!("not decreasing at {:?} -> {:?}", w[0], w[1]));
    }
    Ok(format!("{:.4e} -> {:.4e} bits", sweep[0].1, sweep[16].1))
}

fn c5_orbital_mechanics() -> Outcome {
    let c = consts();
    // oracle: 2 pi sqrt(a^3 / mu), a in meters, evaluated independently
    let oracle = |h: f64| TAU * (((c.earth_radius_km + h) * 1000.0).powi(3) / c.mu_m3_s2).sqrt();
    let t400 = orbital_period(&KeplerianOrbit::circular(400.0, &c), &c);
    let t1200 = orbital_period(&KeplerianOrbit::circular(1200.0, &c), &c);
    ensure((t400 - 5545.2).abs() <= 0.5, || format!("T(400) = {t400}"))?;
    ensure((t1200 - 6556.1).abs() <= 0.5, || format!("T(1200) = {t1200}"))?;
    ensure((t400 - oracle(400.0)).abs() < 1e-9 && (t1200 - oracle(1200.0)).abs() < 1e-9, || {
        "period disagrees with direct formula".into()
    })?;

    let mut worst = 0.0f64;
    for i in 0..100 {
        let e = 0.95 * i as f64 / 99.0;
        for j in 0..100 {
            let m = TAU * j as f64 / 100.0;
            let ecc = solve_kepler(m, e).map_err(|err| err.to_string())?;
            worst = worst.max((ecc - e * ecc.sin() - m).abs());
        }
    }
    ensure(worst < 1e-12, || format!("worst Kepler residual {worst:e}"))?;
    Ok(format!("T400 = {t400:.3} s, T1200 = {t1200:.3} s, max residual {worst:.1e}"))
}

fn c6_geometry_consistency() -> Outcome {
    let c = consts();
    let r = c.earth_radius_km;
    let mut worst = 0.0f64;
    for h in [400.0, 800.0, 1200.0] {
        let zenith = slant_range(90.0, h, &c).map_err(|e| e.to_string())?;
        ensure(zenith == h, || format!("zenith slant range {zenith} != {h}"))?;
        let w = effective_window(h, 20.0, &c).map_err(|e| e.to_string())?;
        let omega = angular_velocity(&KeplerianOrbit::circular(h, &c), &c);
        for k in 0..1000 {
            let t = w.t1_s + w.duration_s() * k as f64 / 999.0;
            let (el, d) = overhead_geometry(h, t, &c).map_err(|e| e.to_string())?;
            let phi = omega * t;
            let law = (r * r + (r + h).powi(2) - 2.0 * r * (r + h) * phi.cos()).sqrt();
            let closed = slant_range(el.clamp(0.0, 90.0), h, &c).map_err(|e| e.to_string())?;
            worst = worst.max((closed - law).abs()).max((d - law).abs());
        }
    }
    ensure(worst < 1e-6, || format!("max disagreement {worst:e} km"))?;
    Ok(format!("max disagreement {worst:.1e} km over 3000 instants"))
}

fn c7_clustering_oracle() -> Outcome {
    let mut rng = common::rng(0x5eed_c1a5);
    let mut checks = 0;
    for set in 0..200 {
        let n = rng.gen_range(1..=15);
        let stations = common::random_stations(&mut rng, n);
        let m = distance_matrix(&stations, EARTH_RADIUS_KM).map_err(|e| e.to_string())?;
        for eps in [100.0, 250.0, 400.0] {
            for min_samples in 1..=3 {
                let got = dbscan_cluster(&m, &ClusteringParams::new(eps, min_samples).unwrap());
                let want = common::brute_force_dbscan(&m, eps, min_samples);
                ensure(got == want, || {
                    format!("set {set} eps {eps} min {min_samples}: {got:?} vs {want:?}")
                })?;
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} comparisons equal (15-city/12-cluster claim excluded)"))
}

fn c8_integration_stability() -> Outcome {
    let c = consts();
    let m = LinkModel::micius();
    let coarse = integrate_pass_with_step(400.0, &m, 20.0, &c, 1.0).map_err(|e| e.to_string())?;
    let fine = integrate_pass_with_step(400.0, &m, 20.0, &c, 0.5).map_err(|e| e.to_string())?;
    let rel = ((coarse.total_bits - fine.total_bits) / fine.total_bits).abs();
    ensure(rel < 1e-6, || format!("step halving changed total by {rel:e}"))?;

    let flat = LinkModel::new(0.0, 645.0, 12000.0).unwrap();
    let p = integrate_pass(400.0, &flat, 20.0, &c).map_err(|e| e.to_string())?;
    let expect = 12000.0 * p.window.duration_s();
    let rel_flat = ((p.total_bits - expect) / expect).abs();
    ensure(rel_flat < 1e-9, || format!("constant model rel err {rel_flat:e}"))?;
    Ok(format!("halving rel change {rel:.1e}, constant-rate rel err {rel_flat:.1e}"))
}

fn c9_molniya_duty_cycle() -> Outcome {
    let c = consts();
    let molniya = KeplerianOrbit::molniya(&c);
    let e = molniya.eccentricity;
    // time from nu = -90 to +90 deg around perigee, via Kepler's equation
    let e90 = 2.0 * (((1.0 - e) / (1.0 + e)).sqrt()).atan();
    let oracle = 1.0 - (e90 - e * e90.sin()) / PI;

    let period = orbital_period(&molniya, &c);
    ensure((period - c.sidereal_day_s / 2.0).abs() < 1e-6, || format!("period {period}"))?;
    let north = hemisphere_dwell(&molniya, period, 10.0, &c).map_err(|e| e.to_string())?.north;
    ensure((north - 0.9236).abs() <= 0.005, || format!("north dwell {north}"))?;
    ensure((north - oracle).abs() <= 0.005, || format!("north dwell {north} vs oracle {oracle}"))?;

    let mut circular = molniya;
    circular.eccentricity = 0.0;
    let half = hemisphere_dwell(&circular, orbital_period(&circular, &c), 10.0, &c)
        .map_err(|e| e.to_string())?
        .north;
    ensure((half - 0.5).abs() <= 0.005, || format!("circular north dwell {half}"))?;
    Ok(format!("Molniya north {north:.4} (oracle {oracle:.4}), circular {half:.4}"))
}

fn c10_ring_feasibility() -> Outcome {
    let c = consts();
    let three = min_ring_altitude(3, &c).map_err(|e| e.to_string())?;
    ensure((three - 6571.0).abs() <= 1.0, || format!("min altitude (3) = {three}"))?;
    let bare = PhysicalConstants {
        atmosphere_margin_km: 0.0,
        ..c
    };
    let four = min_ring_altitude(4, &bare).map_err(|e| e.to_string())?;
    ensure((four - 2638.9).abs() <= 1.0, || format!("min altitude (4, no margin) = {four}"))?;
    ensure(matches!(min_ring_altitude(2, &c), Err(Error::InfeasibleRing(_))), || {
        "2-ring not reported infeasible".into()
    })?;

    let ring = RelayRing::new(3, 7000.0).unwrap();
    let mut scenario = Scenario::new(vec![GroundStation::new("eq", 0.0, 0.0).unwrap()], c);
    scenario.duration_s = orbital_period(&KeplerianOrbit::circular(7000.0, &c), &c);
    scenario.ring = Some(ring);
    let report = coverage_fraction(&scenario).map_err(|e| e.to_string())?;
    ensure(report.ring_connected_fraction == Some(1.0), || {
        format!("ring connected fraction {:?}", report.ring_connected_fraction)
    })?;
    Ok(format!("h3 = {three:.2} km, h4 = {four:.2} km, 2-ring infeasible, 7000 km ring always connected"))
}

fn c11_coverage_sanity() -> Outcome {
    let c = consts();
    let h = 400.0;
    let step = 10.0;
    let sat = KeplerianOrbit::circular(h, &c);
    let omega = angular_velocity(&sat, &c);
    let relative = omega - c.earth_rotation_rate();
    let synodic = TAU / relative;
    // the pass window subtends the same central angle in the rotating frame,
    // swept at the relative rate omega - omega_earth
    let window = effective_window(h, 20.0, &c).map_err(|e| e.to_string())?;
    let rotating_window = window.duration_s() * omega / relative;
    let oracle = rotating_window / synodic;

    let mut scenario = Scenario::new(vec![GroundStation::new("eq", 0.0, 0.0).unwrap()], c);
    scenario.orbits = vec![sat];
    scenario.duration_s = synodic;
    scenario.step_s = step;
    let got = coverage_fraction(&scenario).map_err(|e| e.to_string())?.per_station_coverage[0].fraction;
    let tol = 2.0 * step / orbital_period(&sat, &c);
    ensure((got - oracle).abs() <= tol, || format!("coverage {got} vs oracle {oracle} (tol {tol})"))?;

    let mut rng = common::rng(0xc0_7e7a9e);
    for case in 0..20 {
        let stations = (0..3)
            .map(|i| {
                GroundStation::new(format!("g{i}"), rng.gen_range(-70.0..70.0), rng.gen_range(-180.0..180.0))
                    .unwrap()
            })
            .collect();
        let mut s = Scenario::new(stations, c);
        s.duration_s = 6.0 * 3600.0;
        s.step_s = 30.0;
        let random_orbit = |rng: &mut rand_chacha::ChaCha8Rng| {
            KeplerianOrbit::circular(rng.gen_range(400.0..1500.0), &c)
                .with_inclination(rng.gen_range(0.0..110.0))
                .with_raan(rng.gen_range(0.0..360.0))
                .with_mean_anomaly(rng.gen_range(0.0..360.0))
        };
        s.orbits = vec![random_orbit(&mut rng)];
        let before = coverage_fraction(&s).map_err(|e| e.to_string())?;
        s.orbits.push(random_orbit(&mut rng));
        let after = coverage_fraction(&s).map_err(|e| e.to_string())?;
        for (b, a) in before.per_station_coverage.iter().zip(&after.per_station_coverage) {
            ensure(a.fraction >= b.fraction, || {
                format!("case {case}: {} dropped {} -> {}", b.station, b.fraction, a.fraction)
            })?;
        }
    }
    Ok(format!("coverage {got:.5} vs oracle {oracle:.5} (tol {tol:.5}); 20 monotone cases"))
}

#[test]
fn acceptance() {
    type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);
    let criteria: [Criterion; 11] = [
        ("C1 link-model calibration", c1_link_calibration, Some(Duration::from_secs(1))),
        ("C2 rate vs elevation increasing", c2_elevation_monotone, Some(Duration::from_secs(1))),
        ("C3 rate vs slant decreasing", c3_slant_monotone, Some(Duration::from_secs(1))),
        ("C4 altitude sweep decreasing", c4_altitude_sweep, Some(Duration::from_secs(5))),
        ("C5 orbital mechanics", c5_orbital_mechanics, Some(Duration::from_secs(2))),
        ("C6 geometry consistency", c6_geometry_consistency, None),
        ("C7 clustering oracle", c7_clustering_oracle, None),
        ("C8 integration stability", c8_integration_stability, None),
        ("C9 Molniya duty cycle", c9_molniya_duty_cycle, None),
        ("C10 relay-ring feasibility", c10_ring_feasibility, None),
        ("C11 coverage sanity", c11_coverage_sanity, None),
    ];

    println!();
    let mut failures = Vec::new();
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match (outcome, budget) {
            (Ok(_), Some(limit)) if elapsed > limit => {
                Err(format!("took {elapsed:?}, budget {limit:?}"))
            }
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS  {name:<34} {elapsed:>10.2?}  {detail}"),
            Err(why) => {
                println!("FAIL  {name:<34} {elapsed:>10.2?}  {why}");
                failures.push(name);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
