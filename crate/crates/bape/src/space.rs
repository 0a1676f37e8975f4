//! The bounded parameter domain searched by every method.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bounded axis-aligned box: the domain all queries must stay inside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSpace {
    bounds: Vec<(f64, f64)>,
}

impl ParamSpace {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::invalid("parameter space needs at least one axis"));
        }
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::invalid(format!(
                    "axis {i}: bounds ({lo}, {hi}) must be finite with low < high"
                )));
            }
        }
        Ok(ParamSpace { bounds })
    }

    /// The unit cube `(0,1)^d`.
    pub fn unit(dim: usize) -> Self {
        ParamSpace {
            bounds: vec![(0.0, 1.0); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == self.dim()
            && theta
                .iter()
                .zip(&self.bounds)
                .all(|(&x, &(lo, hi))| x >= lo && x <= hi)
    }

    /// log of the uniform density on the box.
    pub fn log_uniform_density(&self) -> f64 {
        -self.bounds.iter().map(|&(lo, hi)| (hi - lo).ln()).sum::<f64>()
    }

    pub fn sample_uniform<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.bounds
            .iter()
            .map(|&(lo, hi)| rng.gen_range(lo..hi))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_bad_bounds() {
        assert!(ParamSpace::new(vec![(1.0, 1.0)]).is_err());
        assert!(ParamSpace::new(vec![(0.0, f64::INFINITY)]).is_err());
        assert!(ParamSpace::new(vec![]).is_err());
    }

    #[test]
    fn uniform_samples_stay_inside() {
        let space = ParamSpace::new(vec![(-2.0, 3.0), (0.5, 0.6)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let s = space.sample_uniform(&mut rng);
            assert!(space.contains(&s));
        }
    }

    #[test]
    fn log_uniform_density_matches_volume() {
        let space = ParamSpace::new(vec![(0.0, 2.0), (0.0, 5.0)]).unwrap();
        assert!((space.log_uniform_density() - (-(10.0f64).ln())).abs() < 1e-12);
    }
}
