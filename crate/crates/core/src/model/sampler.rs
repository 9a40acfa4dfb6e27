use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::BathMode;
use crate::scalar::{count, lit, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingDistribution {
    /// `g_k ~ Normal(0, C/N)`.
    Gaussian,
    /// `g_k = ±sqrt(C/N)` with alternating signs, `+` first; an odd `N`
    /// leaves the unpaired last coupling at `+sqrt(C/N)`.
    Rademacher,
}

/// Random couplings with a common splitting and `⟨g²⟩ = C/N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec<T> {
    pub count: usize,
    pub omega: T,
    pub c_total: T,
    pub distribution: CouplingDistribution,
    pub seed: u64,
}

impl<T: Real> SamplerSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if !self.omega.is_finite() {
            return Err(Error::invalid("sampler.omega", "must be finite"));
        }
        if !self.c_total.is_finite() || self.c_total < T::zero() {
            return Err(Error::invalid("sampler.c_total", "must be finite and non-negative"));
        }
        Ok(())
    }

    /// Draws the bath modes. Mode `k` uses its own ChaCha stream keyed by
    /// `(seed, k)`, so the result does not depend on evaluation order.
    pub fn sample_couplings(&self) -> Result<Vec<BathMode<T>>> {
        self.validate()?;
        if self.count == 0 {
            return Ok(Vec::new());
        }
        let scale = (self.c_total / count::<T>(self.count)).sqrt();
        Ok((0..self.count)
            .map(|k| {
                let g = match self.distribution {
                    CouplingDistribution::Gaussian => {
                        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                        rng.set_stream(k as u64);
                        let z: f64 = StandardNormal.sample(&mut rng);
                        scale * lit::<T>(z)
                    }
                    CouplingDistribution::Rademacher => {
                        if k % 2 == 0 {
                            scale
                        } else {
                            -scale
                        }
                    }
                };
                BathMode::new(self.omega, g)
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(distribution: CouplingDistribution, count: usize, c_total: f64, seed: u64) -> SamplerSpec<f64> {
        SamplerSpec {
            count,
            omega: 1.0,
            c_total,
            distribution,
            seed,
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = spec(CouplingDistribution::Gaussian, 50, 1.0, 42).sample_couplings().unwrap();
        let b = spec(CouplingDistribution::Gaussian, 50, 1.0, 42).sample_couplings().unwrap();
        let c = spec(CouplingDistribution::Gaussian, 50, 1.0, 43).sample_couplings().unwrap();
        let bits = |v: &[BathMode<f64>]| v.iter().map(|m| m.coupling.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        assert_ne!(bits(&a), bits(&c));
        assert!(a.iter().all(|m| m.omega == 1.0));
        // prefix stability: mode k does not depend on N
        let longer = spec(CouplingDistribution::Gaussian, 80, 1.0, 42).sample_couplings().unwrap();
        let rescale = (80.0f64 / 50.0).sqrt();
        assert!((longer[7].coupling * rescale - a[7].coupling).abs() < 1e-15);
    }

    #[test]
    fn rademacher_balanced_order() {
        let g: Vec<f64> = spec(CouplingDistribution::Rademacher, 4, 1.0, 0)
            .sample_couplings()
            .unwrap()
            .iter()
            .map(|m| m.coupling)
            .collect();
        assert_eq!(g, vec![0.5, -0.5, 0.5, -0.5]);
        let odd = spec(CouplingDistribution::Rademacher, 5, 1.0, 0).sample_couplings().unwrap();
        assert!(odd[4].coupling > 0.0);
        let even = spec(CouplingDistribution::Rademacher, 10, 3.0, 0).sample_couplings().unwrap();
        assert_eq!(even.iter().map(|m| m.coupling).sum::<f64>(), 0.0);
        let second: f64 = even.iter().map(|m| m.coupling * m.coupling).sum::<f64>() / 10.0;
        assert!((second - 0.3).abs() < 1e-15);
    }

    #[test]
    fn gaussian_moments() {
        let n = 10_000;
        let g = spec(CouplingDistribution::Gaussian, n, 2.0, 9).sample_couplings().unwrap();
        let mean = g.iter().map(|m| m.coupling).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.05);
        let second = g.iter().map(|m| m.coupling * m.coupling).sum::<f64>() / n as f64;
        let target = 2.0 / n as f64;
        assert!(((second - target) / target).abs() < 5.0 / (n as f64).sqrt());
    }

    #[test]
    fn validation() {
        assert!(spec(CouplingDistribution::Gaussian, 3, -1.0, 0).sample_couplings().is_err());
        assert!(spec(CouplingDistribution::Gaussian, 0, 1.0, 0).sample_couplings().unwrap().is_empty());
    }
}
