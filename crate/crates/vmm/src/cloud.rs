//! Point clouds in the vehicle frame (x forward, y left, z up) and a
//! synthetic ground generator driven by a roughness profile.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::VmmError;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    points: Vec<Vector3<f64>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vector3<f64>>) -> Result<Self, VmmError> {
        if let Some(index) = points.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(VmmError::NonFinite { index });
        }
        Ok(PointCloud { points })
    }

    pub fn from_xyz(points: &[[f64; 3]]) -> Result<Self, VmmError> {
        Self::new(points.iter().map(|p| Vector3::new(p[0], p[1], p[2])).collect())
    }

    pub fn points(&self) -> &[Vector3<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Whitespace-separated `x y z` per line; blank lines and `#` comments skipped.
    pub fn parse(text: &str) -> Result<Self, VmmError> {
        let mut points = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let vals: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse::<f64>).collect();
            match vals {
                Ok(v) if v.len() == 3 && v.iter().all(|c| c.is_finite()) => points.push(Vector3::new(v[0], v[1], v[2])),
                _ => return Err(VmmError::Parse { line: idx + 1, message: format!("expected `x y z`, got {line:?}") }),
            }
        }
        Ok(PointCloud { points })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            let _ = writeln!(out, "{} {} {}", p.x, p.y, p.z);
        }
        out
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, VmmError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), VmmError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// A stretch of ground along +x with a target mean point-to-plane distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub length: f64,
    pub roughness: f64,
    /// Points per square meter; `None` uses the cloud-wide density.
    pub density: Option<f64>,
}

impl Segment {
    pub fn new(length: f64, roughness: f64) -> Self {
        Segment { length, roughness, density: None }
    }

    pub fn with_density(mut self, density: f64) -> Self {
        self.density = Some(density);
        self
    }
}

/// Consecutive segments starting at `x = 0`, each spanning `y ∈ [-width/2, width/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoughnessProfile {
    pub segments: Vec<Segment>,
    pub width: f64,
}

impl RoughnessProfile {
    pub fn new(segments: Vec<Segment>) -> Self {
        RoughnessProfile { segments, width: 2.0 }
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }

    /// Target roughness at distance `x` along the profile.
    pub fn roughness_at(&self, x: f64) -> Option<f64> {
        let mut start = 0.0;
        for s in &self.segments {
            if x >= start && x < start + s.length {
                return Some(s.roughness);
            }
            start += s.length;
        }
        None
    }
}

/// Ground cloud on `z = 0` whose residuals in each segment are uniform on
/// `[-2r, 2r]`, so the expected mean absolute residual is exactly `r`.
pub fn synth_cloud(profile: &RoughnessProfile, density: f64, seed: u64) -> Result<PointCloud, VmmError> {
    if !(density >= 0.0) {
        return Err(VmmError::NegativeDensity(density));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = profile.width / 2.0;
    let mut points = Vec::new();
    let mut x0 = 0.0;
    for (index, seg) in profile.segments.iter().enumerate() {
        if !(seg.length.is_finite() && seg.length >= 0.0 && seg.roughness.is_finite() && seg.roughness >= 0.0) {
            return Err(VmmError::InvalidSegment { index });
        }
        let d = seg.density.unwrap_or(density);
        if !(d >= 0.0) {
            return Err(VmmError::NegativeDensity(d));
        }
        let count = (d * seg.length * profile.width).round() as usize;
        for _ in 0..count {
            let x = x0 + rng.gen::<f64>() * seg.length;
            let y = -half + rng.gen::<f64>() * profile.width;
            let z = if seg.roughness > 0.0 { rng.gen_range(-2.0 * seg.roughness..2.0 * seg.roughness) } else { 0.0 };
            points.push(Vector3::new(x, y, z));
        }
        x0 += seg.length;
    }
    PointCloud::new(points)
}
