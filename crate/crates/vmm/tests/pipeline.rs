use lastmile_perception::*;
use nalgebra::Vector3;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Tilted, noisy ground with a fraction of points lifted off it.
fn noisy_ground(normal: Vector3<f64>, outlier_share: f64, seed: u64) -> PointCloud {
    let n = normal.normalize();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::new();
    for i in 0..2000 {
        let x = rng.gen_range(0.0..10.0);
        let y = rng.gen_range(-3.0..3.0);
        // Ground height where n · (x, y, z) = 0.
        let ground = -(n.x * x + n.y * y) / n.z;
        let z = if (i as f64) < outlier_share * 2000.0 {
            ground + rng.gen_range(0.5..1.0)
        } else {
            ground + rng.gen_range(-0.01..0.01)
        };
        pts.push([x, y, z]);
    }
    PointCloud::from_xyz(&pts).unwrap()
}

#[test]
fn ransac_recovers_normal_under_outliers() {
    for seed in 0..10 {
        let truth = Vector3::new(0.05, -0.03, 1.0);
        let cloud = noisy_ground(truth, 0.2, seed);
        let fit = fit_plane_ransac(&cloud, &RansacParams { seed, ..RansacParams::default() }).unwrap();
        let angle = fit.plane.angle_to(&truth);
        assert!(angle < 1.0, "seed {seed}: {angle} degrees");
        assert!(fit.inliers.len() >= 1500);
    }
}

#[test]
fn axis_aligned_outliers_leave_horizontal_plane() {
    let cloud = noisy_ground(Vector3::z(), 0.2, 3);
    let fit = fit_plane_ransac(&cloud, &RansacParams::default()).unwrap();
    assert!(fit.plane.angle_to(&Vector3::z()) < 1.0);
}

#[test]
fn moderate_then_smooth_profile_classifies_by_meter() {
    let profile = RoughnessProfile::new(vec![Segment::new(36.0, 0.10), Segment::new(14.0, 0.0)]);
    let cloud = synth_cloud(&profile, 200.0, 11).unwrap();
    let fit = fit_plane_ransac(&cloud, &RansacParams::default()).unwrap();
    assert!(fit.plane.angle_to(&Vector3::z()) < 0.5);
    let grid = roughness_grid(&cloud, &fit.plane);
    let classes = grid.corridor_profile(50, 0.5);
    let moderate = classes.iter().filter(|c| **c == RoughnessClass::Moderate).count();
    let smooth = classes.iter().filter(|c| **c == RoughnessClass::Smooth).count();
    assert_eq!((moderate, smooth), (36, 14));
    assert!(classes[..36].iter().all(|c| *c == RoughnessClass::Moderate));
}

#[test]
fn empty_region_is_unknown() {
    let profile = RoughnessProfile::new(vec![
        Segment::new(3.0, 0.0),
        Segment::new(3.0, 0.0).with_density(0.0),
        Segment::new(3.0, 0.3),
    ]);
    let cloud = synth_cloud(&profile, 100.0, 2).unwrap();
    let grid = roughness_grid(&cloud, &Plane::horizontal());
    let classes = grid.corridor_profile(9, 0.5);
    assert_eq!(&classes[3..6], &[RoughnessClass::Unknown; 3]);
    assert_eq!(classes[7], RoughnessClass::Rough);
    let decision = speed_factor_at(&grid, 3.0, &Lookahead::default());
    assert!(decision.unknown_terrain);
    assert_eq!(decision.beta, 1.0);
}

proptest! {
    #[test]
    fn scaling_residuals_scales_cell_means(seed in 0u64..1000, scale in 0.1f64..5.0) {
        let profile = RoughnessProfile::new(vec![Segment::new(4.0, 0.07), Segment::new(3.0, 0.2)]);
        let cloud = synth_cloud(&profile, 30.0, seed).unwrap();
        let scaled = PointCloud::new(cloud.points().iter().map(|p| Vector3::new(p.x, p.y, p.z * scale)).collect()).unwrap();
        let a = roughness_grid(&cloud, &Plane::horizontal());
        let b = roughness_grid(&scaled, &Plane::horizontal());
        for ((key, ca), (_, cb)) in a.cells().zip(b.cells()) {
            if let (Some(x), Some(y)) = (ca.score(), cb.score()) {
                prop_assert!((y - scale * x).abs() < 1e-9 * (1.0 + y), "cell {:?}", key);
            }
        }
    }

    #[test]
    fn beta_non_increasing(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(beta_for_score(hi) <= beta_for_score(lo));
        prop_assert!(beta_for_score(lo) > 0.0 && beta_for_score(lo) <= 1.0);
    }

    #[test]
    fn class_depends_only_on_mean(mean in 0.0f64..0.5) {
        let pts = [[0.5, 0.5, mean], [0.25, 0.75, -mean]];
        let grid = roughness_grid(&PointCloud::from_xyz(&pts).unwrap(), &Plane::horizontal());
        prop_assert_eq!(grid.get(0, 0).unwrap().class, classify(mean));
    }
}
