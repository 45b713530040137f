use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub type Point3 = [f64; 3];

/// An ordered point set with optional per-point feature rows.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Point3>,
    features: Option<Matrix>,
    id: String,
}

impl PointCloud {
    pub fn new(points: Vec<Point3>) -> Result<Self> {
        Self::with_id(points, "")
    }

    pub fn with_id(points: Vec<Point3>, id: impl Into<String>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if let Some(i) = points.iter().position(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidCloud(format!(
                "point {i} has a non-finite coordinate"
            )));
        }
        Ok(PointCloud {
            points,
            features: None,
            id: id.into(),
        })
    }

    /// Attach an `N × d_f` feature matrix.
    pub fn with_features(mut self, features: Matrix) -> Result<Self> {
        if features.rows() != self.points.len() {
            return Err(Error::ShapeMismatch(format!(
                "feature rows {} != point count {}",
                features.rows(),
                self.points.len()
            )));
        }
        if !features.all_finite() {
            return Err(Error::InvalidCloud("non-finite feature value".into()));
        }
        self.features = Some(features);
        Ok(self)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn point(&self, i: usize) -> Point3 {
        self.points[i]
    }

    pub fn features(&self) -> Option<&Matrix> {
        self.features.as_ref()
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn set_id(&mut self, id: impl Into<String>) {
        self.id = id.into();
    }

    /// Rows the attention layer attends over: features when present,
    /// raw coordinates otherwise.
    pub fn attended(&self) -> Matrix {
        match &self.features {
            Some(f) => f.clone(),
            None => {
                let data = self.points.iter().flat_map(|p| p.iter().copied()).collect();
                Matrix::from_vec(self.points.len(), 3, data).expect("3 columns per point")
            }
        }
    }

    pub fn attended_dim(&self) -> usize {
        self.features.as_ref().map_or(3, Matrix::cols)
    }

    pub fn centroid(&self) -> Point3 {
        let n = self.points.len() as f64;
        let mut c = [0.0; 3];
        for p in &self.points {
            for a in 0..3 {
                c[a] += p[a];
            }
        }
        c.map(|v| v / n)
    }

    /// Restrict to the given indices, carrying feature rows along.
    pub fn select(&self, indices: &[usize]) -> Result<PointCloud> {
        let points = indices.iter().map(|&i| self.points[i]).collect();
        let mut out = PointCloud::with_id(points, self.id.clone())?;
        if let Some(f) = &self.features {
            let rows: Vec<Vec<f64>> = indices.iter().map(|&i| f.row(i).to_vec()).collect();
            out = out.with_features(Matrix::from_rows(&rows)?)?;
        }
        Ok(out)
    }
}

#[inline]
pub fn dist2(a: &Point3, b: &Point3) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

#[inline]
pub fn dist(a: &Point3, b: &Point3) -> f64 {
    dist2(a, b).sqrt()
}

/// Translate to the centroid and scale so the farthest point has norm 1.
/// Clouds whose points all coincide collapse onto the origin.
pub fn normalize_unit_sphere(cloud: &PointCloud) -> PointCloud {
    let c = cloud.centroid();
    let centered: Vec<Point3> = cloud
        .points
        .iter()
        .map(|p| [p[0] - c[0], p[1] - c[1], p[2] - c[2]])
        .collect();
    let max_norm = centered
        .iter()
        .map(|p| dist2(p, &[0.0; 3]).sqrt())
        .fold(0.0, f64::max);
    let points = if max_norm > 0.0 {
        centered.iter().map(|p| p.map(|v| v / max_norm)).collect()
    } else {
        vec![[0.0; 3]; centered.len()]
    };
    PointCloud {
        points,
        features: cloud.features.clone(),
        id: cloud.id.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(matches!(PointCloud::new(vec![]), Err(Error::EmptyCloud)));
        assert!(PointCloud::new(vec![[f64::NAN, 0.0, 0.0]]).is_err());
    }

    #[test]
    fn feature_rows_must_match() {
        let c = PointCloud::new(vec![[0.0; 3], [1.0; 3]]).unwrap();
        assert!(c.clone().with_features(Matrix::zeros(3, 4)).is_err());
        let c = c.with_features(Matrix::zeros(2, 4)).unwrap();
        assert_eq!(c.attended_dim(), 4);
    }

    #[test]
    fn symmetric_pair() {
        let c = PointCloud::new(vec![[2.0, 0.0, 0.0], [-2.0, 0.0, 0.0]]).unwrap();
        let n = normalize_unit_sphere(&c);
        assert_eq!(n.points(), &[[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]);
    }

    #[test]
    fn single_point_maps_to_origin() {
        let c = PointCloud::new(vec![[5.0, 5.0, 5.0]]).unwrap();
        assert_eq!(normalize_unit_sphere(&c).points(), &[[0.0; 3]]);
    }

    #[test]
    fn random_cloud_centroid_and_radius() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Point3> = (0..100)
            .map(|_| {
                [
                    rng.random_range(-4.0..9.0),
                    rng.random_range(0.0..1.0),
                    rng.random(),
                ]
            })
            .collect();
        let n = normalize_unit_sphere(&PointCloud::new(pts).unwrap());
        let c = n.centroid();
        assert!(c.iter().all(|v| v.abs() < 1e-9));
        let max = n
            .points()
            .iter()
            .map(|p| dist(p, &[0.0; 3]))
            .fold(0.0, f64::max);
        assert!((max - 1.0).abs() < 1e-9);

        let again = normalize_unit_sphere(&n);
        for (a, b) in n.points().iter().zip(again.points()) {
            for k in 0..3 {
                assert!((a[k] - b[k]).abs() <= 1e-12);
            }
        }
    }
}
