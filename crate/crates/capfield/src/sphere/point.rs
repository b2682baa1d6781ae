use serde::{Deserialize, Serialize};

use crate::error::{CapfieldError, Result};

/// Unit-norm tolerance enforced on construction and deserialization.
pub const NORM_TOL: f64 = 1e-12;

/// A point on S^d, stored as d+1 ambient coordinates with |norm - 1| ≤ 1e-12.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl SpherePoint {
    /// Validates the norm; use `normalized` to project a nearby vector first.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(CapfieldError::OutOfRange(format!(
                "sphere points need at least 2 ambient coordinates, got {}",
                coords.len()
            )));
        }
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        let deviation = (norm - 1.0).abs();
        if !deviation.is_finite() || deviation > NORM_TOL {
            return Err(CapfieldError::OffSphere { deviation });
        }
        Ok(SpherePoint { coords })
    }

    /// Projects a nonzero vector to the sphere.
    pub fn normalized(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(CapfieldError::OutOfRange(format!(
                "sphere points need at least 2 ambient coordinates, got {}",
                coords.len()
            )));
        }
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(CapfieldError::OffSphere { deviation: f64::INFINITY });
        }
        Ok(SpherePoint {
            coords: coords.into_iter().map(|c| c / norm).collect(),
        })
    }

    /// N = (0, …, 0, 1) on S^d.
    pub fn north_pole(d: usize) -> Self {
        let mut coords = vec![0.0; d + 1];
        coords[d] = 1.0;
        SpherePoint { coords }
    }

    /// Point of S^1 at the given polar-coordinate angle.
    pub fn from_angle(theta: f64) -> Self {
        SpherePoint {
            coords: vec![theta.cos(), theta.sin()],
        }
    }

    /// Polar-coordinate angle of an S^1 point, in (-π, π].
    pub fn angle(&self) -> Result<f64> {
        if self.d() != 1 {
            return Err(CapfieldError::DimensionMismatch {
                expected: 2,
                got: self.coords.len(),
            });
        }
        Ok(self.coords[1].atan2(self.coords[0]))
    }

    pub fn d(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn antipode(&self) -> SpherePoint {
        SpherePoint {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    /// Chordal (ambient Euclidean) distance; both arguments must share d.
    pub fn dist(&self, other: &SpherePoint) -> f64 {
        debug_assert_eq!(self.coords.len(), other.coords.len());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Geodesic angle to another point, numerically stable at both ends:
    /// θ = 2 atan2(‖u − v‖, ‖u + v‖).
    pub fn angle_to(&self, other: &SpherePoint) -> f64 {
        let mut diff = 0.0;
        let mut sum = 0.0;
        for (a, b) in self.coords.iter().zip(&other.coords) {
            diff += (a - b) * (a - b);
            sum += (a + b) * (a + b);
        }
        2.0 * diff.sqrt().atan2(sum.sqrt())
    }
}

/// Chordal distance with an explicit dimension check.
pub fn chordal_distance(p: &SpherePoint, q: &SpherePoint) -> Result<f64> {
    if p.coords().len() != q.coords().len() {
        return Err(CapfieldError::DimensionMismatch {
            expected: p.coords().len(),
            got: q.coords().len(),
        });
    }
    Ok(p.dist(q))
}

/// Chordal radius of the cap subtending geodesic angle θ: 2 sin(θ/2).
pub fn chord_of_angle(theta: f64) -> f64 {
    2.0 * (0.5 * theta).sin()
}

/// Geodesic angle subtending chordal distance s: 2 asin(s/2).
pub fn angle_of_chord(s: f64) -> f64 {
    2.0 * (0.5 * s.clamp(-2.0, 2.0)).asin()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn north_pole_to_equator_is_sqrt_two() {
        let n = SpherePoint::north_pole(1);
        let q = SpherePoint::new(vec![1.0, 0.0]).unwrap();
        let d = chordal_distance(&n, &q).unwrap();
        assert!((d - 2.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let p = SpherePoint::north_pole(1);
        let q = SpherePoint::north_pole(2);
        assert!(chordal_distance(&p, &q).is_err());
    }

    #[test]
    fn rejects_off_sphere() {
        assert!(SpherePoint::new(vec![0.5, 0.5]).is_err());
        assert!(SpherePoint::normalized(vec![0.5, 0.5]).is_ok());
        assert!(SpherePoint::normalized(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn angle_chord_roundtrip() {
        for &theta in &[1e-9, 0.1, 1.0, std::f64::consts::PI - 1e-6] {
            let s = chord_of_angle(theta);
            assert!((angle_of_chord(s) - theta).abs() < 1e-9);
        }
        // antipodal pair
        let p = SpherePoint::north_pole(2);
        assert!((p.angle_to(&p.antipode()) - std::f64::consts::PI).abs() < 1e-12);
        assert!((p.dist(&p.antipode()) - 2.0).abs() < 1e-15);
    }
}
