//! Spherical-Earth geodesy and density-based grouping of ground stations.

use crate::error::{Error, Result};
use crate::exec::Execution;

/// Mean spherical Earth radius used for great-circle distances.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Operative DBSCAN neighborhood radius.
pub const DEFAULT_EPS_KM: f64 = 400.0;

/// Alternative tighter radius preset.
pub const TIGHT_EPS_KM: f64 = 250.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GroundStation {
    name: String,
    lat_deg: f64,
    lon_deg: f64,
}

impl GroundStation {
    pub fn new(name: impl Into<String>, lat_deg: f64, lon_deg: f64) -> Result<Self> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(Error::InvalidStation("name must be non-empty".into()));
        }
        if !(-90.0..=90.0).contains(&lat_deg) {
            return Err(Error::InvalidStation(format!(
                "{name}: latitude {lat_deg} outside [-90, 90]"
            )));
        }
        if !(-180.0..=180.0).contains(&lon_deg) {
            return Err(Error::InvalidStation(format!(
                "{name}: longitude {lon_deg} outside [-180, 180]"
            )));
        }
        Ok(Self {
            name,
            lat_deg,
            lon_deg,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lat_deg(&self) -> f64 {
        self.lat_deg
    }

    pub fn lon_deg(&self) -> f64 {
        self.lon_deg
    }

    fn unit_vector(&self) -> [f64; 3] {
        let (lat, lon) = (self.lat_deg.to_radians(), self.lon_deg.to_radians());
        [lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusteringParams {
    eps_km: f64,
    min_samples: usize,
}

impl ClusteringParams {
    pub fn new(eps_km: f64, min_samples: usize) -> Result<Self> {
        if !(eps_km > 0.0 && eps_km.is_finite()) {
            return Err(Error::InvalidParams(format!("eps_km must be > 0, got {eps_km}")));
        }
        if min_samples == 0 {
            return Err(Error::InvalidParams("min_samples must be >= 1".into()));
        }
        Ok(Self {
            eps_km,
            min_samples,
        })
    }

    pub fn eps_km(&self) -> f64 {
        self.eps_km
    }

    pub fn min_samples(&self) -> usize {
        self.min_samples
    }
}

impl Default for ClusteringParams {
    /// eps = 400 km, min_samples = 1 (no station is ever discarded as noise).
    fn default() -> Self {
        Self {
            eps_km: DEFAULT_EPS_KM,
            min_samples: 1,
        }
    }
}

/// Clusters in discovery order, each with ascending member indices, plus the
/// ascending noise indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClusterSet {
    pub clusters: Vec<Vec<usize>>,
    pub noise: Vec<usize>,
}

impl ClusterSet {
    /// Per-point label: `Some(cluster_id)` or `None` for noise.
    pub fn labels(&self, n: usize) -> Vec<Option<usize>> {
        let mut labels = vec![None; n];
        for (id, members) in self.clusters.iter().enumerate() {
            for &i in members {
                labels[i] = Some(id);
            }
        }
        labels
    }
}

/// Square symmetric matrix of pairwise distances, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates shape, symmetry and a zero diagonal.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::MalformedMatrix(format!(
                "row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        let m = Self { n, data };
        for i in 0..n {
            if m.get(i, i) != 0.0 {
                return Err(Error::MalformedMatrix(format!("diagonal entry {i} is non-zero")));
            }
            for j in (i + 1)..n {
                let (a, b) = (m.get(i, j), m.get(j, i));
                if !(a.is_finite() && a >= 0.0) {
                    return Err(Error::MalformedMatrix(format!("entry ({i},{j}) = {a}")));
                }
                if a != b {
                    return Err(Error::MalformedMatrix(format!(
                        "asymmetric at ({i},{j}): {a} vs {b}"
                    )));
                }
            }
        }
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

/// Great-circle distance on a sphere of radius `r_km` (haversine form).
pub fn haversine_distance(a: &GroundStation, b: &GroundStation, r_km: f64) -> f64 {
    let (phi1, phi2) = (a.lat_deg.to_radians(), b.lat_deg.to_radians());
    let dphi = phi2 - phi1;
    let dlambda = (b.lon_deg - a.lon_deg).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * r_km * h.clamp(0.0, 1.0).sqrt().asin()
}

pub fn distance_matrix(stations: &[GroundStation], r_km: f64) -> Result<DistanceMatrix> {
    distance_matrix_with(stations, r_km, Execution::default())
}

/// Rows are computed independently; the upper triangle is mirrored so the
/// result is exactly symmetric regardless of evaluation order.
pub fn distance_matrix_with(
    stations: &[GroundStation],
    r_km: f64,
    exec: Execution,
) -> Result<DistanceMatrix> {
    if stations.is_empty() {
        return Err(Error::EmptyInput("station list"));
    }
    let n = stations.len();
    let rows = exec.map_range(n, |i| {
        (0..n)
            .map(|j| {
                if i == j {
                    0.0
                } else {
                    let (lo, hi) = (i.min(j), i.max(j));
                    haversine_distance(&stations[lo], &stations[hi], r_km)
                }
            })
            .collect::<Vec<f64>>()
    });
    Ok(DistanceMatrix {
        n,
        data: rows.into_iter().flatten().collect(),
    })
}

fn region_query(matrix: &DistanceMatrix, p: usize, eps: f64) -> Vec<usize> {
    matrix
        .row(p)
        .iter()
        .enumerate()
        .filter(|(_, &d)| d <= eps)
        .map(|(j, _)| j)
        .collect()
}

/// DBSCAN over a precomputed distance matrix.
///
/// A point's neighborhood includes itself. Points are visited in ascending
/// index order and expansion queues are processed FIFO, so a border point
/// reachable from several clusters joins the one discovered first.
pub fn dbscan_cluster(matrix: &DistanceMatrix, params: &ClusteringParams) -> ClusterSet {
    #[derive(Clone, Copy, PartialEq)]
    enum Label {
        Unvisited,
        Noise,
        Cluster(usize),
    }

    let n = matrix.len();
    let eps = params.eps_km;
    let mut labels = vec![Label::Unvisited; n];
    let mut clusters: Vec<Vec<usize>> = Vec::new();

    for p in 0..n {
        if labels[p] != Label::Unvisited {
            continue;
        }
        let neighbors = region_query(matrix, p, eps);
        if neighbors.len() < params.min_samples {
            labels[p] = Label::Noise;
            continue;
        }

        let id = clusters.len();
        let mut members = vec![p];
        labels[p] = Label::Cluster(id);
        let mut queue: std::collections::VecDeque<usize> = neighbors.into_iter().collect();
        while let Some(q) = queue.pop_front() {
            match labels[q] {
                Label::Cluster(_) => continue,
                Label::Noise => {
                    // previously rejected as a seed, but density-reachable: border point
                    labels[q] = Label::Cluster(id);
                    members.push(q);
                }
                Label::Unvisited => {
                    labels[q] = Label::Cluster(id);
                    members.push(q);
                    let q_neighbors = region_query(matrix, q, eps);
                    if q_neighbors.len() >= params.min_samples {
                        queue.extend(
                            q_neighbors
                                .into_iter()
                                .filter(|&r| !matches!(labels[r], Label::Cluster(_))),
                        );
                    }
                }
            }
        }
        members.sort_unstable();
        clusters.push(members);
    }

    let noise = (0..n).filter(|&i| labels[i] == Label::Noise).collect();
    ClusterSet { clusters, noise }
}

/// Distance matrix + DBSCAN in one call.
pub fn cluster_stations(
    stations: &[GroundStation],
    params: &ClusteringParams,
    r_km: f64,
) -> Result<ClusterSet> {
    let matrix = distance_matrix(stations, r_km)?;
    Ok(dbscan_cluster(&matrix, params))
}

/// Spherical mean of the member positions, returned as `(lat_deg, lon_deg)`.
pub fn cluster_centroid(stations: &[GroundStation], members: &[usize]) -> Result<(f64, f64)> {
    if members.is_empty() {
        return Err(Error::EmptyCluster);
    }
    let mut sum = [0.0f64; 3];
    for &i in members {
        let station = stations.get(i).ok_or_else(|| {
            Error::InvalidParams(format!("member index {i} out of range ({})", stations.len()))
        })?;
        let u = station.unit_vector();
        for k in 0..3 {
            sum[k] += u[k];
        }
    }
    let norm = (sum[0] * sum[0] + sum[1] * sum[1] + sum[2] * sum[2]).sqrt();
    if norm < 1e-12 * members.len() as f64 {
        return Err(Error::DegenerateCentroid);
    }
    if members.len() == 1 {
        let s = &stations[members[0]];
        return Ok((s.lat_deg, s.lon_deg));
    }
    let lat = (sum[2] / norm).clamp(-1.0, 1.0).asin().to_degrees();
    let lon = sum[1].atan2(sum[0]).to_degrees();
    Ok((lat, lon))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stn(lat: f64, lon: f64) -> GroundStation {
        GroundStation::new("s", lat, lon).unwrap()
    }

    #[test]
    fn haversine_examples() {
        let o = stn(0.0, 0.0);
        assert_eq!(haversine_distance(&o, &o, 6371.0), 0.0);
        let anti = haversine_distance(&o, &stn(0.0, 180.0), 6371.0);
        assert!((anti - std::f64::consts::PI * 6371.0).abs() < 1e-9);
        assert!((anti - 20015.09).abs() < 0.01);
        let one = haversine_distance(&o, &stn(0.0, 1.0), 6371.0);
        assert!((one - 111.195).abs() < 1e-3);
    }

    #[test]
    fn station_validation() {
        assert!(GroundStation::new("", 0.0, 0.0).is_err());
        assert!(GroundStation::new("x", 90.5, 0.0).is_err());
        assert!(GroundStation::new("x", 0.0, -180.1).is_err());
        assert!(GroundStation::new("x", f64::NAN, 0.0).is_err());
        assert!(GroundStation::new("x", -90.0, 180.0).is_ok());
    }

    #[test]
    fn params_validation() {
        assert!(ClusteringParams::new(0.0, 1).is_err());
        assert!(ClusteringParams::new(10.0, 0).is_err());
        let d = ClusteringParams::default();
        assert_eq!((d.eps_km(), d.min_samples()), (400.0, 1));
    }

    #[test]
    fn matrix_examples() {
        assert_eq!(
            distance_matrix(&[], EARTH_RADIUS_KM),
            Err(Error::EmptyInput("station list"))
        );
        let one = distance_matrix(&[stn(10.0, 10.0)], EARTH_RADIUS_KM).unwrap();
        assert_eq!((one.len(), one.get(0, 0)), (1, 0.0));

        let two = distance_matrix(&[stn(0.0, 0.0), stn(0.0, 180.0)], EARTH_RADIUS_KM).unwrap();
        assert!((two.get(0, 1) - 20015.09).abs() < 0.01);
        assert_eq!(two.get(0, 1), two.get(1, 0));

        let three = [stn(48.85, 2.35), stn(51.5, -0.12), stn(40.7, -74.0)];
        let m = distance_matrix(&three, EARTH_RADIUS_KM).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j {
                    0.0
                } else {
                    haversine_distance(&three[i.min(j)], &three[i.max(j)], EARTH_RADIUS_KM)
                };
                assert_eq!(m.get(i, j), expect);
            }
        }
    }

    #[test]
    fn malformed_matrices_rejected() {
        assert!(matches!(
            DistanceMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0]]),
            Err(Error::MalformedMatrix(_))
        ));
        assert!(matches!(
            DistanceMatrix::from_rows(vec![vec![0.0, 1.0], vec![2.0, 0.0]]),
            Err(Error::MalformedMatrix(_))
        ));
        assert!(matches!(
            DistanceMatrix::from_rows(vec![vec![1.0]]),
            Err(Error::MalformedMatrix(_))
        ));
    }

    #[test]
    fn dbscan_examples() {
        let p = ClusteringParams::new(400.0, 1).unwrap();
        let close = DistanceMatrix::from_rows(vec![
            vec![0.0, 100.0, 200.0],
            vec![100.0, 0.0, 150.0],
            vec![200.0, 150.0, 0.0],
        ])
        .unwrap();
        assert_eq!(
            dbscan_cluster(&close, &p),
            ClusterSet {
                clusters: vec![vec![0, 1, 2]],
                noise: vec![]
            }
        );

        let chain = DistanceMatrix::from_rows(vec![
            vec![0.0, 300.0, 600.0],
            vec![300.0, 0.0, 300.0],
            vec![600.0, 300.0, 0.0],
        ])
        .unwrap();
        assert_eq!(dbscan_cluster(&chain, &p).clusters, vec![vec![0, 1, 2]]);

        let isolated = DistanceMatrix::from_rows(vec![
            vec![0.0, 100.0, 1000.0],
            vec![100.0, 0.0, 1000.0],
            vec![1000.0, 1000.0, 0.0],
        ])
        .unwrap();
        let out = dbscan_cluster(&isolated, &ClusteringParams::new(400.0, 2).unwrap());
        assert_eq!(out.clusters, vec![vec![0, 1]]);
        assert_eq!(out.noise, vec![2]);
    }

    #[test]
    fn border_point_goes_to_first_cluster() {
        // 2 and 4 are the only cores; border point 3 is within eps of both.
        let pos = [0.0, 10.0, 20.0, 115.0, 210.0, 220.0, 230.0];
        let rows = (0..7)
            .map(|i| (0..7).map(|j| f64::abs(pos[i] - pos[j])).collect())
            .collect();
        let m = DistanceMatrix::from_rows(rows).unwrap();
        let out = dbscan_cluster(&m, &ClusteringParams::new(100.0, 4).unwrap());
        assert_eq!(out.clusters, vec![vec![0, 1, 2, 3], vec![4, 5, 6]]);
        assert!(out.noise.is_empty());
    }

    #[test]
    fn centroid_examples() {
        let s = vec![stn(0.0, 10.0), stn(0.0, 20.0), stn(10.0, 0.0), stn(-10.0, 0.0)];
        assert_eq!(cluster_centroid(&s, &[0]).unwrap(), (0.0, 10.0));
        let (lat, lon) = cluster_centroid(&s, &[0, 1]).unwrap();
        assert!(lat.abs() < 1e-12 && (lon - 15.0).abs() < 1e-12);
        let (lat, lon) = cluster_centroid(&s, &[2, 3]).unwrap();
        assert!(lat.abs() < 1e-12 && lon.abs() < 1e-12);
        assert_eq!(cluster_centroid(&s, &[]), Err(Error::EmptyCluster));

        let anti = vec![stn(0.0, 0.0), stn(0.0, 180.0)];
        assert_eq!(cluster_centroid(&anti, &[0, 1]), Err(Error::DegenerateCentroid));
    }

    #[test]
    fn centroid_across_dateline() {
        let s = vec![stn(0.0, 179.0), stn(0.0, -179.0)];
        let (_, lon) = cluster_centroid(&s, &[0, 1]).unwrap();
        assert!((lon.abs() - 180.0).abs() < 1e-9);
    }

    #[test]
    fn parallel_matrix_is_bit_identical() {
        let s: Vec<_> = (0..40)
            .map(|i| stn(-60.0 + 3.0 * i as f64, -170.0 + 8.5 * i as f64))
            .collect();
        let a = distance_matrix_with(&s, EARTH_RADIUS_KM, Execution::Sequential).unwrap();
        let b = distance_matrix_with(&s, EARTH_RADIUS_KM, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
