//! Random instance generators shared by the integration suites.

use netput_eff_core::{Direction, NetputVector, Technology};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub struct Instance {
    pub tech: Technology,
    pub z: NetputVector,
    pub g: Direction,
}

/// Observations with inputs in `[-3, -0.5]` and outputs in `[0.5, 3]`.
pub fn random_points(rng: &mut ChaCha8Rng, d: usize, m: usize, count: usize) -> Vec<NetputVector> {
    (0..count)
        .map(|_| {
            let values: Vec<f64> = (0..d)
                .map(|k| {
                    let mag = rng.gen_range(0.5..3.0);
                    if k < m {
                        -mag
                    } else {
                        mag
                    }
                })
                .collect();
            NetputVector::new(values, m).unwrap()
        })
        .collect()
}

/// A feasible evaluated point: an observation worsened by per-coordinate
/// offsets in `[lo, hi]`.
pub fn dominated_point(
    rng: &mut ChaCha8Rng,
    points: &[NetputVector],
    lo: f64,
    hi: f64,
) -> NetputVector {
    let base = &points[rng.gen_range(0..points.len())];
    let values: Vec<f64> = base
        .values()
        .iter()
        .map(|v| v - rng.gen_range(lo..hi))
        .collect();
    NetputVector::new(values, base.num_inputs()).unwrap()
}

/// A direction supported on `support` random coordinates with weights in
/// `[0.8, 1.6]`.
pub fn random_direction(rng: &mut ChaCha8Rng, d: usize, support: usize) -> Direction {
    let mut g = vec![0.0; d];
    let mut idx: Vec<usize> = (0..d).collect();
    for k in (1..idx.len()).rev() {
        let j = rng.gen_range(0..=k);
        idx.swap(k, j);
    }
    for &k in idx.iter().take(support.min(d)) {
        g[k] = rng.gen_range(0.8..1.6);
    }
    Direction::new(g).unwrap()
}

pub fn random_vrs_instance(
    rng: &mut ChaCha8Rng,
    d: usize,
    max_points: usize,
    support: usize,
) -> Instance {
    let m = rng.gen_range(1..d);
    let count = rng.gen_range(2..=max_points);
    let points = random_points(rng, d, m, count);
    let z = dominated_point(rng, &points, 0.05, 0.4);
    let g = random_direction(rng, d, support);
    Instance { tech: Technology::vrs_hull(points).unwrap(), z, g }
}

pub fn random_fdh_instance(
    rng: &mut ChaCha8Rng,
    d: usize,
    max_points: usize,
    support: usize,
) -> Instance {
    let m = rng.gen_range(1..d);
    let count = rng.gen_range(2..=max_points);
    let points = random_points(rng, d, m, count);
    let z = dominated_point(rng, &points, 0.05, 0.4);
    let g = random_direction(rng, d, support);
    Instance { tech: Technology::fdh(points).unwrap(), z, g }
}

/// A hull whose observations cluster around one base point, so every score
/// stays small (handy when testing limit behaviour with absolute bounds).
pub fn clustered_vrs_instance(rng: &mut ChaCha8Rng, d: usize) -> Instance {
    let m = rng.gen_range(1..d);
    let base = random_points(rng, d, m, 1).pop().unwrap();
    let count = rng.gen_range(2..=5);
    let points: Vec<NetputVector> = (0..count)
        .map(|_| {
            let values: Vec<f64> = base
                .values()
                .iter()
                .map(|v| v + rng.gen_range(-0.15..0.15))
                .collect();
            NetputVector::new(values, m).unwrap()
        })
        .collect();
    let z = dominated_point(rng, &points, 0.1, 0.3);
    let mut g = vec![0.0; d];
    for gk in g.iter_mut() {
        *gk = rng.gen_range(1.0..1.5);
    }
    Instance { tech: Technology::vrs_hull(points).unwrap(), z, g: Direction::new(g).unwrap() }
}

/// An input-oriented instance: all inputs strictly negative at `z`, with
/// observations clustered so radial contractions stay moderate.
pub fn random_input_instance(rng: &mut ChaCha8Rng, m: usize, n: usize) -> (Technology, NetputVector) {
    let d = m + n;
    let base = random_points(rng, d, m, 1).pop().unwrap();
    let count = rng.gen_range(2..=5);
    let points: Vec<NetputVector> = (0..count)
        .map(|_| {
            let values: Vec<f64> = base
                .values()
                .iter()
                .map(|v| v + rng.gen_range(-0.15..0.15))
                .collect();
            NetputVector::new(values, m).unwrap()
        })
        .collect();
    let pick = &points[rng.gen_range(0..count)];
    // Worsen inputs only (scale them up) and keep outputs reachable.
    let values: Vec<f64> = pick
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| {
            if k < m {
                v * rng.gen_range(1.1..1.6)
            } else {
                v - rng.gen_range(0.0..0.2)
            }
        })
        .collect();
    let z = NetputVector::new(values, m).unwrap();
    (Technology::vrs_hull(points).unwrap(), z)
}
