//! Random projection `v = S x` of real vectors into hyperdimensional space.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{HdcError, Result};
use crate::hv::{rescale_to_atomic_norm, Domain, Hypervector};
use crate::seed;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ProjectionDistribution {
    Gaussian,
    Rademacher,
    /// Entries are `±1/sqrt(density)` with probability `density / 2` each and
    /// `0` otherwise.
    SparseTernary { density: f64 },
}

impl ProjectionDistribution {
    /// Sparse ternary with density `1 / sqrt(in_dim)`.
    pub fn sparse_default(in_dim: usize) -> Self {
        ProjectionDistribution::SparseTernary {
            density: (in_dim as f64).sqrt().recip(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PostProcess {
    /// Raw `S x` as a real hypervector.
    None,
    /// Sign threshold into the given domain (binary or bipolar). Exact zeros
    /// map to `0` in both.
    Threshold(Domain),
    /// Rescale to the atomic norm `sqrt(dim)`.
    Normalize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionConfig {
    pub in_dim: usize,
    pub dim: usize,
    pub distribution: ProjectionDistribution,
    pub seed: u64,
    pub post: PostProcess,
}

/// A materialized projection matrix, fully determined by
/// `(seed, in_dim, dim, distribution)`.
#[derive(Clone, Debug)]
pub struct RandomProjection {
    config: ProjectionConfig,
    /// Row-major `dim x in_dim`.
    matrix: Vec<f64>,
}

impl RandomProjection {
    pub fn new(config: ProjectionConfig) -> Result<Self> {
        if config.in_dim == 0 || config.dim == 0 {
            return Err(HdcError::ZeroDimension);
        }
        if let PostProcess::Threshold(Domain::Real) = config.post {
            return Err(HdcError::InvalidConfig("threshold target must be binary or bipolar".into()));
        }
        let mut rng = seed::rng(seed::derive(config.seed, "projection", ""));
        let n = config.in_dim * config.dim;
        let matrix: Vec<f64> = match config.distribution {
            ProjectionDistribution::Gaussian => (0..n).map(|_| rng.sample(StandardNormal)).collect(),
            ProjectionDistribution::Rademacher => {
                (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect()
            }
            ProjectionDistribution::SparseTernary { density } => {
                if !(density > 0.0 && density <= 1.0) {
                    return Err(HdcError::InvalidConfig(format!("density must be in (0, 1], got {density}")));
                }
                let scale = density.sqrt().recip();
                (0..n)
                    .map(|_| {
                        let u: f64 = rng.random();
                        if u < density / 2.0 {
                            scale
                        } else if u < density {
                            -scale
                        } else {
                            0.0
                        }
                    })
                    .collect()
            }
        };
        Ok(RandomProjection { config, matrix })
    }

    pub fn config(&self) -> &ProjectionConfig {
        &self.config
    }

    pub fn project(&self, x: &[f64]) -> Result<Hypervector> {
        let in_dim = self.config.in_dim;
        if x.len() != in_dim {
            return Err(HdcError::DimensionMismatch {
                expected: in_dim,
                found: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(HdcError::NonFiniteInput);
        }
        let mut v: Vec<f64> = self
            .matrix
            .chunks_exact(in_dim)
            .map(|row| row.iter().zip(x).map(|(s, x)| s * x).sum())
            .collect();
        match self.config.post {
            PostProcess::None => Hypervector::from_real(v),
            PostProcess::Normalize => {
                rescale_to_atomic_norm(&mut v)?;
                Hypervector::from_real(v)
            }
            PostProcess::Threshold(Domain::Binary) => Hypervector::from_bits(v.iter().map(|&s| s > 0.0)),
            PostProcess::Threshold(_) => {
                Hypervector::from_bipolar(v.iter().map(|&s| s.partial_cmp(&0.0).map_or(0, |o| o as i8)).collect())
            }
        }
    }
}

pub fn project_vector(cfg: &ProjectionConfig, x: &[f64]) -> Result<Hypervector> {
    RandomProjection::new(cfg.clone())?.project(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(post: PostProcess) -> ProjectionConfig {
        ProjectionConfig {
            in_dim: 8,
            dim: 2000,
            distribution: ProjectionDistribution::Gaussian,
            seed: 3,
            post,
        }
    }

    #[test]
    fn zero_input() {
        let p = RandomProjection::new(cfg(PostProcess::None)).unwrap();
        let z = p.project(&[0.0; 8]).unwrap();
        assert_eq!(z.norm(), 0.0);
        let n = RandomProjection::new(cfg(PostProcess::Normalize)).unwrap();
        assert!(matches!(n.project(&[0.0; 8]), Err(HdcError::ZeroNorm)));
    }

    #[test]
    fn linearity() {
        let p = RandomProjection::new(cfg(PostProcess::None)).unwrap();
        let x = [0.3, -1.2, 2.0, 0.0, 5.5, -0.25, 1.0, 7.0];
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        assert_eq!(p.project(&x2).unwrap(), p.project(&x).unwrap().scaled(2.0).unwrap());
    }

    #[test]
    fn input_errors() {
        let p = RandomProjection::new(cfg(PostProcess::None)).unwrap();
        assert!(matches!(p.project(&[1.0; 3]), Err(HdcError::DimensionMismatch { .. })));
        let mut x = [1.0; 8];
        x[2] = f64::INFINITY;
        assert!(matches!(p.project(&x), Err(HdcError::NonFiniteInput)));
        assert!(RandomProjection::new(cfg(PostProcess::Threshold(Domain::Real))).is_err());
    }

    #[test]
    fn deterministic_and_post_domains() {
        let x = [1.0, 2.0, 3.0, 4.0, -5.0, 6.0, -7.0, 8.0];
        for dist in [
            ProjectionDistribution::Gaussian,
            ProjectionDistribution::Rademacher,
            ProjectionDistribution::sparse_default(8),
        ] {
            let c = ProjectionConfig {
                distribution: dist,
                ..cfg(PostProcess::Threshold(Domain::Binary))
            };
            let a = project_vector(&c, &x).unwrap();
            assert_eq!(a, project_vector(&c, &x).unwrap());
            assert_eq!(a.domain(), Domain::Binary);
            let b = project_vector(&ProjectionConfig { post: PostProcess::Threshold(Domain::Bipolar), ..c.clone() }, &x).unwrap();
            assert_eq!(b.domain(), Domain::Bipolar);
            let n = project_vector(&ProjectionConfig { post: PostProcess::Normalize, ..c }, &x).unwrap();
            assert!((n.norm() - 2000f64.sqrt()).abs() < 1e-9);
        }
    }
}
