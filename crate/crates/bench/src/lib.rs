//! Fixed fixtures shared by the benchmarks.

use netput_eff_core::{Direction, NetputVector, Technology};

/// A three-commodity hull with six observations and a strictly dominated
/// evaluation point.
pub fn hull_fixture() -> (Technology, NetputVector, Direction) {
    let raw = [
        [-1.0, -2.0, 2.5],
        [-2.0, -1.0, 2.2],
        [-1.5, -1.5, 2.8],
        [-2.5, -0.8, 1.9],
        [-0.9, -2.4, 2.1],
        [-1.8, -1.2, 2.6],
    ];
    let points = raw
        .iter()
        .map(|v| NetputVector::new(v.to_vec(), 2).unwrap())
        .collect();
    let tech = Technology::vrs_hull(points).unwrap();
    let z = NetputVector::new(vec![-2.2, -2.0, 1.8], 2).unwrap();
    let g = Direction::unit(3);
    (tech, z, g)
}
