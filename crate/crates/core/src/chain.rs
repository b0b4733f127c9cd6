//! Isolated chain dynamics in the single-excitation subspace.

use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::krawtchouk::{orthonormal_basis, ChainSpec, SpectralBasis};

/// Amplitudes on the sites `|j>` plus the all-ground (vacuum) amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteState {
    pub amplitudes: Vec<Complex64>,
    pub vacuum: Complex64,
}

impl SiteState {
    /// Single excitation on site `site` of an `sites`-long chain.
    pub fn excited_at(sites: usize, site: usize) -> Result<Self> {
        Error::check_index("site", site, sites.saturating_sub(1))?;
        let mut amplitudes = alloc::vec![Complex64::new(0.0, 0.0); sites];
        amplitudes[site] = Complex64::new(1.0, 0.0);
        Ok(SiteState {
            amplitudes,
            vacuum: Complex64::new(0.0, 0.0),
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.vacuum.norm_sqr() + self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>()
    }

    fn validate(&self, sites: usize) -> Result<()> {
        if self.amplitudes.len() != sites {
            return Err(Error::invalid(
                "state",
                "amplitude count differs from chain length",
            ));
        }
        if (self.norm_sqr().sqrt() - 1.0).abs() > 1e-6 {
            return Err(Error::invalid("state", "state is not normalized"));
        }
        Ok(())
    }
}

/// Transfer fidelity sampled on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelitySeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub amplitudes: Option<Vec<Complex64>>,
}

impl FidelitySeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `(time, value)` of the global maximum; earliest sample wins ties.
    pub fn peak(&self) -> (f64, f64) {
        let mut best = 0;
        for (k, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = k;
            }
        }
        (self.times[best], self.values[best])
    }

    /// Index of the first interior sample that is at least as large as both
    /// neighbours and strictly larger than one of them.
    pub fn first_local_max(&self) -> Option<usize> {
        let v = &self.values;
        (1..v.len().saturating_sub(1))
            .find(|&k| v[k] >= v[k - 1] && v[k] >= v[k + 1] && (v[k] > v[k - 1] || v[k] > v[k + 1]))
    }
}

pub(crate) fn phase(angle: f64) -> Complex64 {
    Complex64::new(angle.cos(), angle.sin())
}

/// One isolated Krawtchouk chain with its spectral data cached.
#[derive(Debug, Clone)]
pub struct ClosedChain {
    spec: ChainSpec,
    basis: SpectralBasis,
}

impl ClosedChain {
    pub fn new(spec: ChainSpec) -> Self {
        ClosedChain {
            basis: orthonormal_basis(&spec),
            spec,
        }
    }

    pub fn spec(&self) -> &ChainSpec {
        &self.spec
    }

    pub fn basis(&self) -> &SpectralBasis {
        &self.basis
    }

    fn eigenphase(&self, l: usize, t: f64) -> Complex64 {
        phase(-(self.spec.omega0() + self.basis.energies()[l]) * t)
    }

    /// `<M-1| exp(-iHt) |0>`, including the common `exp(-i omega0 t)`.
    pub fn transfer_amplitude(&self, t: f64) -> Complex64 {
        let m = self.spec.sites();
        (0..m)
            .map(|l| self.eigenphase(l, t) * (self.basis.u(0, l) * self.basis.u(m - 1, l)))
            .sum()
    }

    /// `exp(-iHt) state`, applied through the eigenbasis.
    pub fn evolve(&self, state: &SiteState, t: f64) -> Result<SiteState> {
        state.validate(self.spec.sites())?;
        let mut eigen = self.basis.to_eigen(&state.amplitudes);
        for (l, c) in eigen.iter_mut().enumerate() {
            *c *= self.eigenphase(l, t);
        }
        Ok(SiteState {
            amplitudes: self.basis.to_site(&eigen),
            vacuum: state.vacuum,
        })
    }

    /// `|<M-1| exp(-iHt) |0>|` on every grid point.
    pub fn fidelity_series(&self, grid: &TimeGrid) -> FidelitySeries {
        let amplitudes: Vec<Complex64> = grid.iter().map(|t| self.transfer_amplitude(t)).collect();
        FidelitySeries {
            times: grid.points().to_vec(),
            values: amplitudes.iter().map(|a| a.norm()).collect(),
            amplitudes: Some(amplitudes),
        }
    }
}

/// `|sin t|^(M-1)`: the closed-form end-to-end transfer law.
pub fn sin_law(sites: usize, t: f64) -> f64 {
    t.sin().abs().powi(sites as i32 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI};
    use proptest::prelude::*;

    fn chain(m: usize, omega0: f64) -> ClosedChain {
        ClosedChain::new(ChainSpec::new(m, omega0).unwrap())
    }

    #[test]
    fn amplitude_examples() {
        for m in 2..=8 {
            assert!(chain(m, 1.0).transfer_amplitude(0.0).norm() < 1e-15);
            assert!((chain(m, 1.0).transfer_amplitude(FRAC_PI_2).norm() - 1.0).abs() < 1e-12);
        }
        let c2 = chain(2, 1.0);
        for t in [0.1, 0.7, 2.0, 5.0] {
            assert!((c2.transfer_amplitude(t).norm() - t.sin().abs()).abs() < 1e-14);
        }
        assert!((chain(3, 1.0).transfer_amplitude(FRAC_PI_4).norm() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn pst_law_pointwise() {
        let grid = TimeGrid::linspace(2.0 * PI, 2001).unwrap();
        for m in 2..=10 {
            let series = chain(m, 1.0).fidelity_series(&grid);
            for (t, v) in series.times.iter().zip(&series.values) {
                assert!((v - sin_law(m, *t)).abs() <= 1e-10, "M={m} t={t}");
            }
        }
    }

    #[test]
    fn fidelity_series_examples() {
        let grid = TimeGrid::new(alloc::vec![FRAC_PI_6, FRAC_PI_2]).unwrap();
        let s = chain(4, 1.0).fidelity_series(&grid);
        assert!((s.values[0] - 0.125).abs() < 1e-12);
        assert!((s.values[1] - 1.0).abs() < 1e-12);

        let s = chain(2, 1.0).fidelity_series(&TimeGrid::new(alloc::vec![0.0, PI]).unwrap());
        assert!(s.values[0] < 1e-15 && s.values[1] < 1e-15);
    }

    #[test]
    fn mirror_at_transfer_time() {
        for m in 2..=12 {
            let c = chain(m, 0.3);
            let out = c
                .evolve(&SiteState::excited_at(m, 0).unwrap(), FRAC_PI_2)
                .unwrap();
            for (j, a) in out.amplitudes.iter().enumerate() {
                let expected = if j == m - 1 { 1.0 } else { 0.0 };
                assert!((a.norm() - expected).abs() < 1e-10, "M={m} j={j}");
            }
        }
    }

    #[test]
    fn evolve_identity_and_validation() {
        let c = chain(5, 1.0);
        let s = SiteState::excited_at(5, 2).unwrap();
        let out = c.evolve(&s, 0.0).unwrap();
        for (a, b) in out.amplitudes.iter().zip(&s.amplitudes) {
            assert!((a - b).norm() < 1e-15);
        }
        let mut bad = s.clone();
        bad.amplitudes[2] = Complex64::new(0.9, 0.0);
        assert!(c.evolve(&bad, 1.0).is_err());
        assert!(SiteState::excited_at(5, 5).is_err());
    }

    #[test]
    fn peak_and_local_max() {
        let grid = TimeGrid::linspace(3.0, 301).unwrap();
        let s = chain(3, 1.0).fidelity_series(&grid);
        let (tp, vp) = s.peak();
        assert!((tp - 1.57).abs() < 0.011 && vp > 0.9999);
        let k = s.first_local_max().unwrap();
        assert_eq!(s.times[k], tp);
    }

    fn random_state(m: usize) -> impl Strategy<Value = SiteState> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), m + 1).prop_filter_map(
            "zero vector",
            move |raw| {
                let n = raw.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
                if n < 1e-3 {
                    return None;
                }
                let mut amps: Vec<Complex64> = raw
                    .iter()
                    .map(|(a, b)| Complex64::new(a / n, b / n))
                    .collect();
                let vacuum = amps.pop().unwrap();
                Some(SiteState {
                    amplitudes: amps,
                    vacuum,
                })
            },
        )
    }

    proptest! {
        #[test]
        fn evolution_is_unitary(state in random_state(6), t in 0.0f64..10.0) {
            let c = chain(6, 1.0);
            let out = c.evolve(&state, t).unwrap();
            prop_assert!((out.norm_sqr().sqrt() - state.norm_sqr().sqrt()).abs() <= 1e-12);
            prop_assert_eq!(out.vacuum, state.vacuum);
        }

        #[test]
        fn evolution_composes(state in random_state(5), t1 in 0.0f64..5.0, t2 in 0.0f64..5.0) {
            let c = chain(5, 0.7);
            let two = c.evolve(&c.evolve(&state, t1).unwrap(), t2).unwrap();
            let one = c.evolve(&state, t1 + t2).unwrap();
            for (a, b) in two.amplitudes.iter().zip(&one.amplitudes) {
                prop_assert!((a - b).norm() <= 1e-10);
            }
        }
    }
}
