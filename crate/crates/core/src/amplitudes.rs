use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::krawtchouk::SpectralBasis;

/// Which single-excitation basis a set of amplitudes is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Chain eigenmodes `|Phi_l^i>`; index `(i, l)`.
    Eigen,
    /// Sites `|i, j>`; index `(i, j)`.
    Site,
}

/// Single-excitation amplitudes of `chains` identical chains plus the vacuum
/// amplitude. Chain 1 of the physics is index 0 here. Reservoir amplitudes are
/// never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Amplitudes {
    basis: Basis,
    chains: usize,
    levels: usize,
    values: Vec<Complex64>,
    pub vacuum: Complex64,
}

impl Amplitudes {
    pub fn zeros(basis: Basis, chains: usize, levels: usize) -> Self {
        Amplitudes {
            basis,
            chains,
            levels,
            values: alloc::vec![Complex64::new(0.0, 0.0); chains * levels],
            vacuum: Complex64::new(0.0, 0.0),
        }
    }

    /// `values` laid out chain-major: `values[i * levels + k]`.
    pub fn from_values(
        basis: Basis,
        chains: usize,
        levels: usize,
        values: Vec<Complex64>,
        vacuum: Complex64,
    ) -> Result<Self> {
        if chains == 0 || levels == 0 {
            return Err(Error::invalid(
                "amplitudes",
                "need at least one chain and level",
            ));
        }
        if values.len() != chains * levels {
            return Err(Error::invalid(
                "amplitudes",
                "length is not chains * levels",
            ));
        }
        Ok(Amplitudes {
            basis,
            chains,
            levels,
            values,
            vacuum,
        })
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn chains(&self) -> usize {
        self.chains
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, chain: usize, level: usize) -> Complex64 {
        self.values[chain * self.levels + level]
    }

    pub fn set(&mut self, chain: usize, level: usize, value: Complex64) {
        self.values[chain * self.levels + level] = value;
    }

    pub fn chain(&self, chain: usize) -> &[Complex64] {
        &self.values[chain * self.levels..(chain + 1) * self.levels]
    }

    /// Total population including the vacuum.
    pub fn norm_sqr(&self) -> f64 {
        self.vacuum.norm_sqr() + self.excited_population()
    }

    /// Population in the single-excitation sector of the chains.
    pub fn excited_population(&self) -> f64 {
        self.values.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Re-express in the other basis; a no-op when already there.
    pub fn to_basis(&self, target: Basis, spectral: &SpectralBasis) -> Self {
        if target == self.basis {
            return self.clone();
        }
        assert_eq!(spectral.sites(), self.levels, "basis dimension mismatch");
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..self.chains {
            let block = self.chain(i);
            let mapped = match target {
                Basis::Site => spectral.to_site(block),
                Basis::Eigen => spectral.to_eigen(block),
            };
            values.extend(mapped);
        }
        Amplitudes {
            basis: target,
            values,
            ..*self
        }
    }
}

/// Amplitudes sampled on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTrajectory {
    pub times: Vec<f64>,
    pub samples: Vec<Amplitudes>,
    /// Reservoir population per sample, when the reservoir was simulated.
    pub reservoir_population: Option<Vec<f64>>,
    /// Set when the horizon exceeds the recurrence time of a discretized
    /// reservoir; later samples contain revivals that a continuum would not.
    pub recurrence_warning: bool,
}

impl AmplitudeTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn to_basis(&self, target: Basis, spectral: &SpectralBasis) -> Self {
        AmplitudeTrajectory {
            times: self.times.clone(),
            samples: self
                .samples
                .iter()
                .map(|s| s.to_basis(target, spectral))
                .collect(),
            reservoir_population: self.reservoir_population.clone(),
            recurrence_warning: self.recurrence_warning,
        }
    }

    /// `|xi_{M-1}^1(t)|` when in the site basis.
    pub fn end_site_fidelity(&self) -> Result<Vec<f64>> {
        self.samples
            .iter()
            .map(|s| {
                if s.basis() != Basis::Site {
                    return Err(Error::invalid(
                        "trajectory",
                        "fidelity needs site amplitudes",
                    ));
                }
                Ok(s.get(0, s.levels() - 1).norm())
            })
            .collect()
    }
}

/// Largest `|a - b|` over all samples and components (vacuum included).
pub fn compare(a: &AmplitudeTrajectory, b: &AmplitudeTrajectory) -> Result<f64> {
    if a.times.len() != b.times.len()
        || a.times
            .iter()
            .zip(&b.times)
            .any(|(x, y)| (x - y).abs() > 1e-12 * x.abs().max(1.0))
    {
        return Err(Error::invalid("trajectory", "time grids differ"));
    }
    let mut worst = 0.0f64;
    for (sa, sb) in a.samples.iter().zip(&b.samples) {
        if sa.basis() != sb.basis() || sa.chains() != sb.chains() || sa.levels() != sb.levels() {
            return Err(Error::invalid("trajectory", "amplitude layouts differ"));
        }
        worst = worst.max((sa.vacuum - sb.vacuum).norm());
        for (x, y) in sa.values().iter().zip(sb.values()) {
            worst = worst.max((x - y).norm());
        }
    }
    Ok(worst)
}
