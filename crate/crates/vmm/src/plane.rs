//! RANSAC ground-plane fit.
//!
//! Each iteration samples three distinct points and counts the points within
//! `inlier_threshold` of their plane; the hypothesis with the most inliers
//! wins (earliest on ties). A least-squares refit over the winning inliers is
//! kept only when it does not lose inliers.

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cloud::PointCloud;
use crate::error::VmmError;

/// `normal · p + offset = 0`, with `normal` unit length and `normal.z >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub normal: Vector3<f64>,
    pub offset: f64,
}

impl Plane {
    /// Plane through `point` with the given (not necessarily unit) normal.
    pub fn through(point: &Vector3<f64>, normal: Vector3<f64>) -> Option<Plane> {
        let norm = normal.norm();
        if !(norm > 1e-12) {
            return None;
        }
        let mut n = normal / norm;
        if n.z < 0.0 || (n.z == 0.0 && (n.y < 0.0 || (n.y == 0.0 && n.x < 0.0))) {
            n = -n;
        }
        Some(Plane { normal: n, offset: -n.dot(point) })
    }

    pub fn horizontal() -> Plane {
        Plane { normal: Vector3::z(), offset: 0.0 }
    }

    pub fn signed_distance(&self, p: &Vector3<f64>) -> f64 {
        self.normal.dot(p) + self.offset
    }

    pub fn distance(&self, p: &Vector3<f64>) -> f64 {
        self.signed_distance(p).abs()
    }

    /// Angle between the two normals in degrees.
    pub fn angle_to(&self, normal: &Vector3<f64>) -> f64 {
        let c = self.normal.dot(normal) / normal.norm();
        c.clamp(-1.0, 1.0).acos().to_degrees()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RansacParams {
    pub iterations: usize,
    pub inlier_threshold: f64,
    pub seed: u64,
}

impl Default for RansacParams {
    fn default() -> Self {
        RansacParams { iterations: 200, inlier_threshold: 0.03, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlaneFit {
    pub plane: Plane,
    /// Indices into the cloud, ascending.
    pub inliers: Vec<usize>,
}

fn inliers(points: &[Vector3<f64>], plane: &Plane, threshold: f64) -> Vec<usize> {
    (0..points.len()).filter(|&i| plane.distance(&points[i]) <= threshold).collect()
}

/// Three points spanning the cloud, or `Degenerate` when all are collinear.
fn spanning_triple(points: &[Vector3<f64>]) -> Result<(usize, usize, usize), VmmError> {
    let p0 = points[0];
    let (i1, far) = points
        .iter()
        .enumerate()
        .map(|(i, p)| (i, (p - p0).norm()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty");
    if far <= 1e-12 {
        return Err(VmmError::Degenerate);
    }
    let axis = (points[i1] - p0) / far;
    let (i2, off) = points
        .iter()
        .enumerate()
        .map(|(i, p)| (i, axis.cross(&(p - p0)).norm()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty");
    if off <= 1e-9 * far.max(1.0) {
        return Err(VmmError::Degenerate);
    }
    Ok((0, i1, i2))
}

fn least_squares(points: &[Vector3<f64>], idx: &[usize]) -> Option<Plane> {
    if idx.len() < 3 {
        return None;
    }
    let centroid = idx.iter().map(|&i| points[i]).sum::<Vector3<f64>>() / idx.len() as f64;
    let mut cov = Matrix3::zeros();
    for &i in idx {
        let d = points[i] - centroid;
        cov += d * d.transpose();
    }
    let eig = cov.symmetric_eigen();
    let (k, _) = eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1))?;
    Plane::through(&centroid, eig.eigenvectors.column(k).into_owned())
}

pub fn fit_plane_ransac(cloud: &PointCloud, params: &RansacParams) -> Result<PlaneFit, VmmError> {
    let points = cloud.points();
    if points.len() < 3 {
        return Err(VmmError::TooFewPoints(points.len()));
    }
    let (a, b, c) = spanning_triple(points)?;
    let threshold = params.inlier_threshold;
    let seed_plane = Plane::through(&points[a], (points[b] - points[a]).cross(&(points[c] - points[a])))
        .ok_or(VmmError::Degenerate)?;
    let mut best = PlaneFit { inliers: inliers(points, &seed_plane, threshold), plane: seed_plane };

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let len = points.len();
    for _ in 0..params.iterations {
        let i = rng.gen_range(0..len);
        let mut j = rng.gen_range(0..len - 1);
        if j >= i {
            j += 1;
        }
        let mut k = rng.gen_range(0..len - 2);
        for taken in [i.min(j), i.max(j)] {
            if k >= taken {
                k += 1;
            }
        }
        let normal = (points[j] - points[i]).cross(&(points[k] - points[i]));
        let Some(plane) = Plane::through(&points[i], normal) else {
            continue;
        };
        let found = inliers(points, &plane, threshold);
        if found.len() > best.inliers.len() {
            best = PlaneFit { plane, inliers: found };
        }
    }

    if let Some(plane) = least_squares(points, &best.inliers) {
        let found = inliers(points, &plane, threshold);
        if found.len() >= best.inliers.len() {
            best = PlaneFit { plane, inliers: found };
        }
    }
    Ok(best)
}
