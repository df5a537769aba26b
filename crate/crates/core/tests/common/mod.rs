#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use satqkd::geodesy::{ClusterSet, DistanceMatrix, GroundStation};

/// Reference DBSCAN: O(n^2) core detection, core-component labels relaxed to
/// a fixpoint (label = smallest core index in the component), border points
/// attached to the lowest-labelled adjacent component.
pub fn brute_force_dbscan(m: &DistanceMatrix, eps: f64, min_samples: usize) -> ClusterSet {
    let n = m.len();
    let near = |i: usize, j: usize| m.get(i, j) <= eps;
    let core: Vec<bool> = (0..n)
        .map(|i| (0..n).filter(|&j| near(i, j)).count() >= min_samples)
        .collect();

    let mut label: Vec<Option<usize>> = (0..n).map(|i| core[i].then_some(i)).collect();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if core[i] && core[j] && near(i, j) {
                    let (li, lj) = (label[i].unwrap(), label[j].unwrap());
                    if lj < li {
                        label[i] = Some(lj);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    for i in 0..n {
        if !core[i] {
            label[i] = (0..n)
                .filter(|&j| core[j] && near(i, j))
                .map(|j| label[j].unwrap())
                .min();
        }
    }

    let mut roots: Vec<usize> = label.iter().flatten().copied().collect();
    roots.sort_unstable();
    roots.dedup();
    let clusters = roots
        .iter()
        .map(|&r| (0..n).filter(|&i| label[i] == Some(r)).collect())
        .collect();
    let noise = (0..n).filter(|&i| label[i].is_none()).collect();
    ClusterSet { clusters, noise }
}

/// `n` stations scattered over a ~2000 km patch of Europe so that every eps
/// in {100, 250, 400} km produces a mix of merged and isolated stations.
pub fn random_stations(rng: &mut ChaCha8Rng, n: usize) -> Vec<GroundStation> {
    (0..n)
        .map(|i| {
            let lat = rng.gen_range(35.0..55.0);
            let lon = rng.gen_range(-5.0..25.0);
            GroundStation::new(format!("s{i}"), lat, lon).unwrap()
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
