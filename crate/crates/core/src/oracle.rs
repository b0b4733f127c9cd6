//! Numerical reference solutions for the open-system dynamics.
//!
//! Two independent routes, both fixed-step RK4:
//!
//! * [`integrate_memory_kernel`] solves the bright-mode Volterra equation.
//!   For an exponential kernel `A exp(-mu tau)` the history integral
//!   `B(t) = int_0^t exp(-mu (t - t')) S(t') dt'` obeys `dB/dt = S - mu B`, so
//!   the integro-differential system becomes a local ODE with one extra
//!   amplitude.
//! * [`integrate_mode_discretized`] integrates the full Schrödinger equation
//!   of chains plus a finite set of reservoir modes in the site basis. It never
//!   uses the bright/dark decomposition.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::amplitudes::{AmplitudeTrajectory, Amplitudes, Basis};
use crate::chain::phase;
use crate::error::{Error, Result};
use crate::krawtchouk::{orthonormal_basis, weight};
use crate::open::EnsembleConfig;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which exponential kernel stands in for the reservoir correlation function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelVariant {
    /// `(gamma0 lambda / 2) exp(-(lambda - i E_0) tau)`: the kernel whose exact
    /// solution is the closed-form survival amplitude used by
    /// [`crate::open::OpenEnsemble`].
    #[default]
    Analytic,
    /// `(gamma0 / 2) exp(-(lambda + i E_0) tau)`: the Fourier transform of the
    /// Lorentzian spectral density itself (closing the contour on its pole).
    Residue,
}

/// `amplitude * exp(-rate * tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialKernel {
    pub amplitude: f64,
    pub rate: Complex64,
}

impl ExponentialKernel {
    pub fn new(config: &EnsembleConfig, variant: KernelVariant) -> Self {
        let (gamma0, lambda) = (config.reservoir.gamma0(), config.reservoir.lambda());
        let e0 = config.bright_energy();
        match variant {
            KernelVariant::Analytic => ExponentialKernel {
                amplitude: 0.5 * gamma0 * lambda,
                rate: Complex64::new(lambda, -e0),
            },
            KernelVariant::Residue => ExponentialKernel {
                amplitude: 0.5 * gamma0,
                rate: Complex64::new(lambda, e0),
            },
        }
    }

    pub fn value(&self, tau: f64) -> Complex64 {
        (-self.rate * tau).exp() * self.amplitude
    }
}

/// Memory kernel `f(tau)` for `tau >= 0`.
pub fn kernel(tau: f64, config: &EnsembleConfig, variant: KernelVariant) -> Result<Complex64> {
    if !(tau >= 0.0) {
        return Err(Error::Domain {
            name: "tau",
            value: tau,
        });
    }
    Ok(ExponentialKernel::new(config, variant).value(tau))
}

/// Fixed RK4 step `dt`, run to `t_max`, keeping every `record_every`-th state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorSettings {
    dt: f64,
    t_max: f64,
    record_every: usize,
}

impl IntegratorSettings {
    /// `t_max` must be a whole number of steps, and that number a multiple of
    /// `record_every`.
    pub fn new(dt: f64, t_max: f64, record_every: usize) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Configuration(format!("dt = {dt} must be > 0")));
        }
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::Configuration(format!("t_max = {t_max} must be > 0")));
        }
        if record_every == 0 {
            return Err(Error::Configuration("record_every must be >= 1".into()));
        }
        let steps = (t_max / dt).round();
        if steps < 1.0 || (steps * dt - t_max).abs() > 1e-9 * t_max {
            return Err(Error::Configuration(format!(
                "t_max = {t_max} is not a whole number of steps of {dt}"
            )));
        }
        if !(steps as usize).is_multiple_of(record_every) {
            return Err(Error::Configuration(format!(
                "{steps} steps is not a multiple of record_every = {record_every}"
            )));
        }
        Ok(IntegratorSettings {
            dt,
            t_max,
            record_every,
        })
    }

    /// Step of at most `max_dt` that lands exactly on each of `intervals`
    /// equal output intervals of `[0, t_max]`.
    pub fn for_grid(t_max: f64, intervals: usize, max_dt: f64) -> Result<Self> {
        if intervals == 0 {
            return Err(Error::Configuration(
                "need at least one output interval".into(),
            ));
        }
        if !(max_dt > 0.0) {
            return Err(Error::Configuration(format!("dt = {max_dt} must be > 0")));
        }
        let spacing = t_max / intervals as f64;
        let per_interval = (spacing / max_dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        Self::new(spacing / per_interval as f64, t_max, per_interval)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn record_every(&self) -> usize {
        self.record_every
    }

    pub fn steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }

    /// Largest step that resolves the bright decay, chain hopping and
    /// collective coupling: `min(1/lambda, 1/(M-1), 1/(gamma0 N)) / 20`.
    pub fn max_dt(config: &EnsembleConfig) -> f64 {
        let lambda = config.reservoir.lambda();
        let hop = (config.chain.sites() - 1) as f64;
        let collective = config.reservoir.gamma0() * config.chains() as f64;
        (1.0 / lambda).min(1.0 / hop).min(1.0 / collective) / 20.0
    }

    fn check_resolves(&self, config: &EnsembleConfig) -> Result<()> {
        let limit = Self::max_dt(config);
        if self.dt > limit * (1.0 + 1e-9) {
            return Err(Error::Configuration(format!(
                "dt = {} exceeds the resolution limit {limit}",
                self.dt
            )));
        }
        Ok(())
    }

    fn time(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }
}

/// Classical fourth-order Runge-Kutta over a complex state vector.
struct Rk4 {
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
}

impl Rk4 {
    fn new(len: usize) -> Self {
        let zero = alloc::vec![Complex64::new(0.0, 0.0); len];
        Rk4 {
            k: [zero.clone(), zero.clone(), zero.clone(), zero.clone()],
            tmp: zero,
        }
    }

    fn step<F>(&mut self, t: f64, dt: f64, y: &mut [Complex64], rhs: &mut F)
    where
        F: FnMut(f64, &[Complex64], &mut [Complex64]),
    {
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        let half = 0.5 * dt;

        rhs(t, y, k1);
        for ((t_, y_), k_) in tmp.iter_mut().zip(y.iter()).zip(k1.iter()) {
            *t_ = y_ + k_ * half;
        }
        rhs(t + half, tmp, k2);
        for ((t_, y_), k_) in tmp.iter_mut().zip(y.iter()).zip(k2.iter()) {
            *t_ = y_ + k_ * half;
        }
        rhs(t + half, tmp, k3);
        for ((t_, y_), k_) in tmp.iter_mut().zip(y.iter()).zip(k3.iter()) {
            *t_ = y_ + k_ * dt;
        }
        rhs(t + dt, tmp, k4);
        let sixth = dt / 6.0;
        for (n, y_) in y.iter_mut().enumerate() {
            *y_ += (k1[n] + (k2[n] + k3[n]) * 2.0 + k4[n]) * sixth;
        }
    }
}

fn check_init(config: &EnsembleConfig, init: &Amplitudes) -> Result<()> {
    if init.chains() != config.chains() || init.levels() != config.chain.sites() {
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

/// Memory-kernel solution with the chosen kernel variant. Returns lab-frame
/// eigenbasis amplitudes `C_l^i(t)`.
pub fn integrate_memory_kernel(
    config: &EnsembleConfig,
    init: &Amplitudes,
    settings: &IntegratorSettings,
    variant: KernelVariant,
) -> Result<AmplitudeTrajectory> {
    settings.check_resolves(config)?;
    integrate_exponential_kernel(
        config,
        ExponentialKernel::new(config, variant),
        init,
        settings,
    )
}

/// Memory-kernel solution for an arbitrary exponential kernel. Does not apply
/// the step-size check of [`integrate_memory_kernel`].
pub fn integrate_exponential_kernel(
    config: &EnsembleConfig,
    kernel: ExponentialKernel,
    init: &Amplitudes,
    settings: &IntegratorSettings,
) -> Result<AmplitudeTrajectory> {
    check_init(config, init)?;
    let spectral = orthonormal_basis(&config.chain);
    let init = init.to_basis(Basis::Eigen, &spectral);
    let n = config.chains();
    let m = config.chain.sites();
    let omega0 = config.chain.omega0();
    let energies = spectral.energies();

    // y = [C~_0^1 .. C~_0^N, B]
    let mut y: Vec<Complex64> = (0..n).map(|i| init.get(i, 0)).collect();
    y.push(Complex64::new(0.0, 0.0));
    let mut rhs = |_t: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let history = y[n];
        let total: Complex64 = y[..n].iter().sum();
        for d in dy[..n].iter_mut() {
            *d = -kernel.amplitude * history;
        }
        dy[n] = total - kernel.rate * history;
    };

    let lab = |t: f64, y: &[Complex64]| {
        let mut out = init.clone();
        for i in 0..n {
            out.set(i, 0, y[i] * phase(-(omega0 + energies[0]) * t));
            for l in 1..m {
                out.set(i, l, init.get(i, l) * phase(-(omega0 + energies[l]) * t));
            }
        }
        out
    };

    let mut rk = Rk4::new(y.len());
    let mut times = alloc::vec![0.0];
    let mut samples = alloc::vec![lab(0.0, &y)];
    for step in 0..settings.steps() {
        let t = settings.time(step);
        rk.step(t, settings.dt, &mut y, &mut rhs);
        if (step + 1) % settings.record_every == 0 {
            let t = settings.time(step + 1);
            times.push(t);
            samples.push(lab(t, &y));
        }
    }
    Ok(AmplitudeTrajectory {
        times,
        samples,
        reservoir_population: None,
        recurrence_warning: false,
    })
}

/// Finite set of reservoir modes, stored as detunings from the chains'
/// transition frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedReservoir {
    detunings: Vec<f64>,
    couplings: Vec<f64>,
    spacing: f64,
}

impl DiscretizedReservoir {
    /// `modes` midpoints of a uniform grid on `[-half_width, half_width]`
    /// around `omega0`, with `g_k^2 = J(omega_k) * spacing`.
    pub fn lorentzian(config: &EnsembleConfig, modes: usize, half_width: f64) -> Result<Self> {
        if modes == 0 {
            return Err(Error::invalid("modes", "need at least one reservoir mode"));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::invalid("half_width", "must be > 0"));
        }
        let spacing = 2.0 * half_width / modes as f64;
        let detunings: Vec<f64> = (0..modes)
            .map(|k| -half_width + (k as f64 + 0.5) * spacing)
            .collect();
        let couplings = detunings
            .iter()
            .map(|d| (config.reservoir.spectral_density(*d) * spacing).sqrt())
            .collect();
        Ok(DiscretizedReservoir {
            detunings,
            couplings,
            spacing,
        })
    }

    /// Arbitrary modes; `spacing` sets the recurrence time `2 pi / spacing`.
    pub fn new(detunings: Vec<f64>, couplings: Vec<f64>, spacing: f64) -> Result<Self> {
        if detunings.is_empty() || detunings.len() != couplings.len() {
            return Err(Error::invalid(
                "reservoir",
                "need matching, non-empty mode lists",
            ));
        }
        if !(spacing > 0.0) {
            return Err(Error::invalid("reservoir", "spacing must be > 0"));
        }
        Ok(DiscretizedReservoir {
            detunings,
            couplings,
            spacing,
        })
    }

    pub fn modes(&self) -> usize {
        self.detunings.len()
    }

    pub fn detunings(&self) -> &[f64] {
        &self.detunings
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    /// `sum_k g_k^2`.
    pub fn total_coupling(&self) -> f64 {
        self.couplings.iter().map(|g| g * g).sum()
    }

    pub fn recurrence_time(&self) -> f64 {
        2.0 * core::f64::consts::PI / self.spacing
    }

    pub fn max_detuning(&self) -> f64 {
        self.detunings.iter().fold(0.0, |acc, d| acc.max(d.abs()))
    }
}

/// Largest `dt * max|omega_k - omega0|` accepted by
/// [`integrate_mode_discretized`].
pub const MAX_MODE_PHASE_STEP: f64 = 0.25;

/// Schrödinger equation of chains + discretized reservoir in the site basis.
/// Returns lab-frame site amplitudes `xi_j^i(t)` and the reservoir population.
pub fn integrate_mode_discretized(
    config: &EnsembleConfig,
    reservoir: &DiscretizedReservoir,
    init: &Amplitudes,
    settings: &IntegratorSettings,
) -> Result<AmplitudeTrajectory> {
    check_init(config, init)?;
    settings.check_resolves(config)?;
    let phase_step = settings.dt * reservoir.max_detuning();
    if phase_step > MAX_MODE_PHASE_STEP {
        return Err(Error::Configuration(format!(
            "dt * max detuning = {phase_step} exceeds {MAX_MODE_PHASE_STEP}"
        )));
    }

    let spec = config.chain;
    let (n, m) = (config.chains(), spec.sites());
    let k_modes = reservoir.modes();
    // site profile of the reservoir coupling: K~_0(j) = sqrt(w(j))
    let profile: Vec<f64> = (0..m)
        .map(|j| weight(j, m, spec.p()).unwrap().sqrt())
        .collect();
    let hop: Vec<f64> = (0..m - 1).map(|j| spec.coupling(j)).collect();
    let detunings = reservoir.detunings();
    let g = reservoir.couplings();

    // frame rotating at omega0: y = [sites (i-major), modes]
    let site_init = if init.basis() == Basis::Site {
        init.clone()
    } else {
        init.to_basis(Basis::Site, &orthonormal_basis(&spec))
    };
    let mut y: Vec<Complex64> = site_init.values().to_vec();
    y.extend(core::iter::repeat_n(Complex64::new(0.0, 0.0), k_modes));

    let mut rhs = |_t: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let (sites, modes) = y.split_at(n * m);
        let (dsites, dmodes) = dy.split_at_mut(n * m);
        let field: Complex64 = modes.iter().zip(g).map(|(c, g)| c * g).sum();
        let mut source = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let x = &sites[i * m..(i + 1) * m];
            let dx = &mut dsites[i * m..(i + 1) * m];
            for j in 0..m {
                let mut h = field * profile[j];
                if j > 0 {
                    h += x[j - 1] * hop[j - 1];
                }
                if j + 1 < m {
                    h += x[j + 1] * hop[j];
                }
                dx[j] = -I * h;
                source += x[j] * profile[j];
            }
        }
        for k in 0..k_modes {
            dmodes[k] = -I * (modes[k] * detunings[k] + source * g[k]);
        }
    };

    let omega0 = spec.omega0();
    let record = |t: f64, y: &[Complex64]| {
        let rot = phase(-omega0 * t);
        let values = y[..n * m].iter().map(|v| v * rot).collect();
        let sample = Amplitudes::from_values(Basis::Site, n, m, values, site_init.vacuum).unwrap();
        let bath: f64 = y[n * m..].iter().map(|c| c.norm_sqr()).sum();
        (sample, bath)
    };

    let mut rk = Rk4::new(y.len());
    let (first, bath0) = record(0.0, &y);
    let mut times = alloc::vec![0.0];
    let mut samples = alloc::vec![first];
    let mut bath = alloc::vec![bath0];
    for step in 0..settings.steps() {
        rk.step(settings.time(step), settings.dt, &mut y, &mut rhs);
        if (step + 1) % settings.record_every == 0 {
            let t = settings.time(step + 1);
            let (s, b) = record(t, &y);
            times.push(t);
            samples.push(s);
            bath.push(b);
        }
    }
    Ok(AmplitudeTrajectory {
        times,
        samples,
        reservoir_population: Some(bath),
        recurrence_warning: settings.t_max > reservoir.recurrence_time(),
    })
}
