//! Exact dynamics of `N` identical chains sharing one Lorentzian reservoir.
//!
//! Each chain couples to the reservoir only through its top eigenmode
//! `|Phi_0^i>`, and all chains couple to the same modes. In the frame
//! rotating with each eigenmode (`C~_l^i = exp(i(omega0 + E_l)t) C_l^i`):
//!
//! * `C~_l^i` for `l >= 1` are constant;
//! * the symmetric combination `S = sum_i C~_0^i` obeys the Volterra equation
//!   `dS/dt = -N int_0^t f(t - t') S(t') dt'` and decays as `S(0) G(t)`;
//! * every difference `C~_0^i - C~_0^k` is dark and constant.
//!
//! With the exponential kernel `f(tau) = (gamma0 lambda / 2) exp(-(lambda - i E_0) tau)`,
//!
//! ```text
//! G(t) = exp(-mu t/2) [cosh(D t/2) + (mu/D) sinh(D t/2)],
//! mu = lambda - i E_0,   D = sqrt(mu^2 - 2 gamma0 lambda N).
//! ```

use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::amplitudes::{Amplitudes, Basis};
use crate::chain::{phase, FidelitySeries};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::krawtchouk::{
    krawtchouk_poly, norm_d, orthonormal_basis, weight, ChainSpec, SpectralBasis,
};
use crate::linalg::RealMatrix;

/// Lorentzian reservoir centred on the chains' transition frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirSpec {
    gamma0: f64,
    lambda: f64,
}

impl ReservoirSpec {
    pub fn new(gamma0: f64, lambda: f64) -> Result<Self> {
        if !(gamma0 > 0.0) || !gamma0.is_finite() {
            return Err(Error::invalid("gamma0", "gamma0 must be > 0"));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::invalid("lambda", "lambda must be > 0"));
        }
        Ok(ReservoirSpec { gamma0, lambda })
    }

    /// Coupling strength; also the unit of time and frequency.
    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    /// Spectral width.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `J(omega) = gamma0 lambda / (2 pi ((omega - omega_c)^2 + lambda^2))`.
    pub fn spectral_density(&self, detuning: f64) -> f64 {
        self.gamma0 * self.lambda
            / (2.0 * core::f64::consts::PI * (detuning * detuning + self.lambda * self.lambda))
    }
}

/// Chain, reservoir and number of chains `N` (one system plus `N - 1`
/// auxiliary copies).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleConfig {
    pub chain: ChainSpec,
    pub reservoir: ReservoirSpec,
    chains: usize,
}

impl EnsembleConfig {
    pub fn new(chain: ChainSpec, reservoir: ReservoirSpec, chains: usize) -> Result<Self> {
        if chains < 1 {
            return Err(Error::invalid("N", "N must be >= 1"));
        }
        Ok(EnsembleConfig {
            chain,
            reservoir,
            chains,
        })
    }

    pub fn chains(&self) -> usize {
        self.chains
    }

    /// `E_0 = M - 1`, the energy of the bright mode.
    pub fn bright_energy(&self) -> f64 {
        self.chain.energy(0)
    }
}

/// Decay of the symmetric bright amplitude under an exponential kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrightDecay {
    /// `lambda - i E_0`
    pub mu: Complex64,
    /// `2 gamma0 lambda N`
    pub strength: f64,
}

impl BrightDecay {
    pub fn new(lambda: f64, bright_energy: f64, gamma0: f64, chains: usize) -> Self {
        BrightDecay {
            mu: Complex64::new(lambda, -bright_energy),
            strength: 2.0 * gamma0 * lambda * chains as f64,
        }
    }

    /// Principal root `D = sqrt(mu^2 - strength)`.
    pub fn d(&self) -> Complex64 {
        (self.mu * self.mu - self.strength).sqrt()
    }

    /// `G(t)`, with `G(0) = 1`.
    pub fn survival(&self, t: f64) -> Complex64 {
        self.survival_with_root(self.d(), t)
    }

    /// `G(t)` for a chosen root of `D^2`; both roots give the same value.
    ///
    /// Evaluated as two decaying exponentials rather than `cosh`/`sinh`,
    /// which overflow for `Re(D) t > ~1400` even though `G` stays bounded.
    pub fn survival_with_root(&self, d: Complex64, t: f64) -> Complex64 {
        if t == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        let half = 0.5 * t;
        if d.norm() < 1e-12 {
            return (-self.mu * half).exp() * (1.0 + self.mu * half);
        }
        let ratio = self.mu / d;
        let plus = ((d - self.mu) * half).exp();
        let minus = ((-d - self.mu) * half).exp();
        0.5 * ((1.0 + ratio) * plus + (1.0 - ratio) * minus)
    }
}

/// Qubit state `ground |0> + excited |1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub ground: Complex64,
    pub excited: Complex64,
}

impl QubitState {
    pub fn new(ground: Complex64, excited: Complex64) -> Result<Self> {
        let norm = ground.norm_sqr() + excited.norm_sqr();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(
                "qubit state",
                "|ground|^2 + |excited|^2 must be 1",
            ));
        }
        Ok(QubitState { ground, excited })
    }

    pub fn excited() -> Self {
        QubitState {
            ground: Complex64::new(0.0, 0.0),
            excited: Complex64::new(1.0, 0.0),
        }
    }
}

/// Reduced state of one qubit. Rows and columns are ordered `(|1>, |0>)`, so
/// `m[0][0]` is the excited population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitDensityMatrix {
    pub m: [[Complex64; 2]; 2],
}

impl QubitDensityMatrix {
    pub fn excited_population(&self) -> f64 {
        self.m[0][0].re
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    /// Largest deviation from `m = m^dagger`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut err = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                err = err.max((self.m[r][c] - self.m[c][r].conj()).norm());
            }
        }
        err
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.m[0][0].re;
        let d = self.m[1][1].re;
        let b = 0.5 * (self.m[0][1] + self.m[1][0].conj());
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        [mean - radius, mean + radius]
    }
}

/// `sqrt(<psi| rho |psi>)`.
pub fn state_fidelity(psi: &QubitState, rho: &QubitDensityMatrix) -> Result<f64> {
    let psi = QubitState::new(psi.ground, psi.excited)?;
    let v = [psi.excited, psi.ground];
    let mut overlap = Complex64::new(0.0, 0.0);
    for r in 0..2 {
        for c in 0..2 {
            overlap += v[r].conj() * rho.m[r][c] * v[c];
        }
    }
    Ok(overlap.re.max(0.0).sqrt())
}

/// Analytic open-system propagator for one [`EnsembleConfig`].
#[derive(Debug, Clone)]
pub struct OpenEnsemble {
    config: EnsembleConfig,
    basis: SpectralBasis,
    decay: BrightDecay,
    /// Site-`j`, mode-`l` coefficients of the site-0 propagator written in
    /// terms of `w`, `d` and `K` directly (column 0 carries the bright mode).
    literal: RealMatrix,
}

impl OpenEnsemble {
    pub fn new(config: EnsembleConfig) -> Self {
        let spec = config.chain;
        let (m, p) = (spec.sites(), spec.p());
        let w = |j| weight(j, m, p).unwrap();
        let d = |l| norm_d(l, m, p).unwrap();
        let literal = RealMatrix::from_fn(m, m, |j, l| {
            if l == 0 {
                w(0) / (d(0) * d(j)).sqrt()
            } else {
                (w(0) * w(l) / (d(l) * d(j))).sqrt() * krawtchouk_poly(l, j, m, p).unwrap()
            }
        });
        let r = config.reservoir;
        OpenEnsemble {
            decay: BrightDecay::new(
                r.lambda(),
                config.bright_energy(),
                r.gamma0(),
                config.chains(),
            ),
            basis: orthonormal_basis(&spec),
            config,
            literal,
        }
    }

    pub fn config(&self) -> &EnsembleConfig {
        &self.config
    }

    pub fn basis(&self) -> &SpectralBasis {
        &self.basis
    }

    pub fn decay(&self) -> &BrightDecay {
        &self.decay
    }

    /// `D = sqrt((lambda - i E_0)^2 - 2 gamma0 lambda N)`, principal branch.
    pub fn d_factor(&self) -> Complex64 {
        self.decay.d()
    }

    /// `G(t)`.
    pub fn survival(&self, t: f64) -> Complex64 {
        self.decay.survival(t)
    }

    fn eigenphase(&self, l: usize, t: f64) -> Complex64 {
        phase(-(self.config.chain.omega0() + self.basis.energies()[l]) * t)
    }

    fn check_init(&self, init: &Amplitudes) -> Result<()> {
        if init.basis() != Basis::Eigen {
            return Err(Error::invalid(
                "initial amplitudes",
                "must be in the eigenbasis",
            ));
        }
        if init.chains() != self.config.chains() || init.levels() != self.config.chain.sites() {
            return Err(Error::invalid(
                "initial amplitudes",
                "shape does not match N x M",
            ));
        }
        if init.norm_sqr() > 1.0 + 1e-9 {
            return Err(Error::invalid("initial amplitudes", "norm exceeds 1"));
        }
        Ok(())
    }

    /// Eigenbasis coefficients of amplitude `xi0` on site 0 of chain 1, with
    /// the rest of the norm on the vacuum.
    pub fn initial_coefficients(&self, xi0: Complex64) -> Result<Amplitudes> {
        if xi0.norm() > 1.0 + 1e-12 {
            return Err(Error::invalid("xi0", "|xi0| must be <= 1"));
        }
        let m = self.config.chain.sites();
        let mut out = Amplitudes::zeros(Basis::Eigen, self.config.chains(), m);
        for l in 0..m {
            out.set(0, l, xi0 * self.basis.u(0, l));
        }
        out.vacuum = Complex64::new((1.0 - xi0.norm_sqr()).max(0.0).sqrt(), 0.0);
        Ok(out)
    }

    /// Rotating-frame bright amplitudes `C~_0^i(t)` for every chain.
    pub fn bright_amplitudes(&self, init: &Amplitudes, t: f64) -> Result<Vec<Complex64>> {
        self.check_init(init)?;
        let n = self.config.chains();
        let mean: Complex64 = (0..n).map(|i| init.get(i, 0)).sum::<Complex64>() / n as f64;
        let g = self.survival(t);
        Ok((0..n).map(|i| init.get(i, 0) - mean + mean * g).collect())
    }

    /// Lab-frame eigenbasis amplitudes `C_l^i(t)`.
    pub fn eigen_amplitudes(&self, init: &Amplitudes, t: f64) -> Result<Amplitudes> {
        let bright = self.bright_amplitudes(init, t)?;
        let mut out = init.clone();
        for i in 0..self.config.chains() {
            out.set(i, 0, bright[i] * self.eigenphase(0, t));
            for l in 1..init.levels() {
                out.set(i, l, init.get(i, l) * self.eigenphase(l, t));
            }
        }
        Ok(out)
    }

    /// Site amplitudes `xi_j^i(t)`, through `U` applied to the eigenbasis
    /// solution.
    pub fn site_amplitudes(&self, init: &Amplitudes, t: f64) -> Result<Amplitudes> {
        Ok(self
            .eigen_amplitudes(init, t)?
            .to_basis(Basis::Site, &self.basis))
    }

    /// Propagator `chi_j(t)` from site 0 to site `j` of chain 1, written out
    /// term by term in `w`, `d` and `K`:
    ///
    /// ```text
    /// chi_j = w(0)/sqrt(d_0 d_j) e^{-i(omega0+E_0)t} ((N-1)/N + G(t)/N)
    ///       + sum_{l>=1} sqrt(w(0) w(l) / (d_l d_j)) K_l(j) e^{-i(omega0+E_l)t}
    /// ```
    ///
    /// This form relies on `w(j)/d_l = w(l)/d_j`, which holds only at
    /// `p = 1/2`; [`Self::site_amplitudes`] is exact for every `p`.
    pub fn chi(&self, j: usize, t: f64) -> Result<Complex64> {
        let m = self.config.chain.sites();
        Error::check_index("j", j, m - 1)?;
        let n = self.config.chains() as f64;
        let bright = (n - 1.0) / n + self.survival(t) / n;
        let mut acc = self.eigenphase(0, t) * bright * self.literal[(j, 0)];
        for l in 1..m {
            acc += self.eigenphase(l, t) * self.literal[(j, l)];
        }
        Ok(acc)
    }

    /// State of the last qubit of chain 1 when `psi` was loaded onto its
    /// first qubit and every other chain started in the ground state.
    pub fn reduced_density_matrix(&self, psi: &QubitState, t: f64) -> Result<QubitDensityMatrix> {
        let psi = QubitState::new(psi.ground, psi.excited)?;
        let m = self.config.chain.sites();
        let xi = self.chi(m - 1, t)? * psi.excited;
        let pop = xi.norm_sqr();
        let coherence = xi * psi.ground.conj();
        Ok(QubitDensityMatrix {
            m: [
                [Complex64::new(pop, 0.0), coherence],
                [coherence.conj(), Complex64::new(1.0 - pop, 0.0)],
            ],
        })
    }

    /// `|chi_{M-1}(t)|` on the grid.
    pub fn fidelity_series(&self, grid: &TimeGrid) -> FidelitySeries {
        let last = self.config.chain.sites() - 1;
        let amplitudes: Vec<Complex64> = grid.iter().map(|t| self.chi(last, t).unwrap()).collect();
        FidelitySeries {
            times: grid.points().to_vec(),
            values: amplitudes.iter().map(|a| a.norm()).collect(),
            amplitudes: Some(amplitudes),
        }
    }
}
