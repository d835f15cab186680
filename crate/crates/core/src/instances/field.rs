//! Reconstruction of the five-stop parking-lot field test.
//!
//! Only the topology is reproduced: a depot at the centre and five delivery
//! points on a regular pentagon, with nominal times equal to distance over the
//! 1.2 m/s cruise speed. Coordinates are illustrative, not surveyed.

use crate::model::{Instance, Point};

pub const FIELD_SPEED: f64 = 1.2;
pub const FIELD_RADIUS: f64 = 60.0;

pub fn field_test_pentagon(epsilon: f64) -> Instance {
    let mut coords = vec![Point::new(0.0, 0.0)];
    for k in 0..5 {
        let a = std::f64::consts::FRAC_PI_2 + k as f64 * 2.0 * std::f64::consts::PI / 5.0;
        coords.push(Point::new(FIELD_RADIUS * a.cos(), FIELD_RADIUS * a.sin()));
    }
    let size = coords.len();
    let matrix: Vec<Vec<f64>> =
        (0..size).map(|i| (0..size).map(|j| coords[i].distance(&coords[j]) / FIELD_SPEED).collect()).collect();
    Instance::builder(5)
        .name("field-pentagon")
        .nominal_matrix(matrix)
        .euclidean(coords)
        .epsilon(epsilon)
        .fleet(vec![5])
        .build()
        .expect("static data is valid")
}
