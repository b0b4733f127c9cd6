//! Krawtchouk functions and the spectral data of the perfect-transfer chain.
//!
//! For a chain of `M` sites with couplings `J_j = sqrt((j+1)(M-j-1))` the
//! single-excitation Hamiltonian is diagonalized by the orthonormal
//! Krawtchouk functions
//!
//! ```text
//! K~_l(j) = sqrt(w(j) / d_l) K_l(j),    E_l = M - 1 - 2l,
//! ```
//!
//! with `w` the binomial weight and `d_l` the squared norm of `K_l`. The
//! polynomials themselves are evaluated through their three-term recurrence in
//! the degree; binomial factors go through `lgamma` so chains of a few hundred
//! sites stay finite.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::RealMatrix;

/// Length, on-site frequency and Krawtchouk parameter of one chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    sites: usize,
    omega0: f64,
    p: f64,
}

impl ChainSpec {
    pub const DEFAULT_P: f64 = 0.5;

    /// Chain of `sites` qubits at transition frequency `omega0`, with `p = 1/2`.
    pub fn new(sites: usize, omega0: f64) -> Result<Self> {
        Self::with_parameter(sites, omega0, Self::DEFAULT_P)
    }

    pub fn with_parameter(sites: usize, omega0: f64, p: f64) -> Result<Self> {
        if sites < 2 {
            return Err(Error::invalid("M", "M must be >= 2"));
        }
        if !omega0.is_finite() {
            return Err(Error::invalid("omega0", "must be finite"));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid("p", "p must lie in (0, 1)"));
        }
        Ok(ChainSpec { sites, omega0, p })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Energy of the eigenmode `l`, measured from `omega0`.
    pub fn energy(&self, l: usize) -> f64 {
        (self.sites as f64 - 1.0) - 2.0 * l as f64
    }

    /// Coupling between sites `j` and `j + 1`.
    pub fn coupling(&self, j: usize) -> f64 {
        let m = self.sites as f64;
        let j = j as f64;
        ((j + 1.0) * (m - j - 1.0)).sqrt()
    }
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    if k == 0 || k == n {
        return 0.0;
    }
    let (n, k) = (n as f64, k as f64);
    libm::lgamma(n + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0)
}

fn check_args(name: &'static str, index: usize, sites: usize, p: f64) -> Result<()> {
    if sites < 2 {
        return Err(Error::invalid("M", "M must be >= 2"));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain {
            name: "p",
            value: p,
        });
    }
    Error::check_index(name, index, sites - 1)
}

/// `K_0(j), ..., K_{M-1}(j)` from the degree recurrence
///
/// ```text
/// p(N-n) K_{n+1} = [p(N-n) + n(1-p) - j] K_n - n(1-p) K_{n-1},   N = M-1.
/// ```
fn degree_sweep(j: usize, sites: usize, p: f64, max_degree: usize) -> Vec<f64> {
    let n_top = (sites - 1) as f64;
    let x = j as f64;
    let q = 1.0 - p;
    let mut out = Vec::with_capacity(max_degree + 1);
    out.push(1.0);
    if max_degree == 0 {
        return out;
    }
    out.push(1.0 - x / (p * n_top));
    for n in 1..max_degree {
        let nf = n as f64;
        let forward = p * (n_top - nf);
        let next = ((forward + nf * q - x) * out[n] - nf * q * out[n - 1]) / forward;
        out.push(next);
    }
    out
}

/// `K_l(j) = K_j(l)`: run the recurrence only up to degree `min(l, j)`.
///
/// At small arguments the polynomial is the subdominant solution of the
/// recurrence (the other one grows like `((1-p)/p)^n`), so sweeping the
/// full degree range at `j = 0` loses digits for `p < 1/2`.
fn self_dual(l: usize, j: usize, sites: usize, p: f64) -> f64 {
    let (degree, x) = if l <= j { (l, j) } else { (j, l) };
    degree_sweep(x, sites, p, degree)[degree]
}

/// Krawtchouk polynomial `K_l(j) = 2F1(-j, -l; -(M-1); 1/p)`.
pub fn krawtchouk_poly(l: usize, j: usize, sites: usize, p: f64) -> Result<f64> {
    check_args("l", l, sites, p)?;
    check_args("j", j, sites, p)?;
    Ok(self_dual(l, j, sites, p))
}

/// Binomial weight `w(j) = C(M-1, j) p^j (1-p)^(M-1-j)`.
pub fn weight(j: usize, sites: usize, p: f64) -> Result<f64> {
    check_args("j", j, sites, p)?;
    let n = sites - 1;
    let ln_w = ln_binomial(n, j) + j as f64 * p.ln() + (n - j) as f64 * (-p).ln_1p();
    Ok(ln_w.exp())
}

/// Squared norm `d_l = ((1-p)/p)^l / C(M-1, l)` of `K_l` under `w`.
pub fn norm_d(l: usize, sites: usize, p: f64) -> Result<f64> {
    check_args("l", l, sites, p)?;
    let ln_d = l as f64 * ((1.0 - p) / p).ln() - ln_binomial(sites - 1, l);
    Ok(ln_d.exp())
}

/// Eigenvectors, eigenvalues and couplings of one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    /// `u[(j, l)] = K~_l(j)`; column `l` is eigenvector `l`.
    u: RealMatrix,
    energies: Vec<f64>,
    couplings: Vec<f64>,
}

impl SpectralBasis {
    pub fn sites(&self) -> usize {
        self.energies.len()
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.u
    }

    /// `U_{jl}`: overlap of site `j` with eigenmode `l`.
    pub fn u(&self, j: usize, l: usize) -> f64 {
        self.u[(j, l)]
    }

    /// `E_l = M - 1 - 2l`, relative to `omega0`.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    /// Site amplitudes to eigenmode amplitudes (`U^T v`).
    pub fn to_eigen<T>(&self, site: &[T]) -> Vec<T>
    where
        T: Copy + core::ops::Mul<f64, Output = T> + core::iter::Sum<T>,
    {
        let m = self.sites();
        assert_eq!(site.len(), m);
        (0..m)
            .map(|l| (0..m).map(|j| site[j] * self.u[(j, l)]).sum())
            .collect()
    }

    /// Eigenmode amplitudes to site amplitudes (`U c`).
    pub fn to_site<T>(&self, eigen: &[T]) -> Vec<T>
    where
        T: Copy + core::ops::Mul<f64, Output = T> + core::iter::Sum<T>,
    {
        let m = self.sites();
        assert_eq!(eigen.len(), m);
        (0..m)
            .map(|j| (0..m).map(|l| eigen[l] * self.u[(j, l)]).sum())
            .collect()
    }
}

/// Builds `U`, `E_l` and `J_j` for `spec`. Every column has `U_{0l} > 0`.
///
/// As a function of `j`, column `l` of `U` is the eigenvector with eigenvalue
/// `l` of the symmetric tridiagonal matrix
///
/// ```text
/// T_jj = p(N-j) + (1-p)j,    T_{j-1,j} = -sqrt(p(1-p) j (N-j+1)),
/// ```
///
/// i.e. the normalized dual recurrence. Sweeping that recurrence from one
/// end is unstable past the turning points, so each column is read off a
/// twisted factorization of `T - l` instead.
pub fn orthonormal_basis(spec: &ChainSpec) -> SpectralBasis {
    let m = spec.sites();
    let p = spec.p();
    let n_top = (m - 1) as f64;
    let diag: Vec<f64> = (0..m)
        .map(|j| p * (n_top - j as f64) + (1.0 - p) * j as f64)
        .collect();
    // off[j] couples j-1 and j; off[0] is unused
    let off: Vec<f64> = (0..m)
        .map(|j| {
            let j = j as f64;
            -(p * (1.0 - p) * j * (n_top - j + 1.0)).sqrt()
        })
        .collect();

    let mut u = RealMatrix::zeros(m, m);
    for l in 0..m {
        let column = twisted_eigenvector(&diag, &off, l as f64);
        for (j, v) in column.into_iter().enumerate() {
            u[(j, l)] = v;
        }
    }

    SpectralBasis {
        u,
        energies: (0..m).map(|l| spec.energy(l)).collect(),
        couplings: (0..m - 1).map(|j| spec.coupling(j)).collect(),
    }
}

/// Unit eigenvector of the symmetric tridiagonal `(diag, off)` for the exact
/// eigenvalue `shift`, sign fixed so the first entry is positive.
fn twisted_eigenvector(diag: &[f64], off: &[f64], shift: f64) -> Vec<f64> {
    let m = diag.len();
    let scale = diag
        .iter()
        .chain(off)
        .fold(1.0f64, |acc, v| acc.max(v.abs()));
    let tiny = f64::EPSILON * scale;
    let guard = |d: f64| if d.abs() < tiny { tiny.copysign(d) } else { d };

    // forward pivots of L D L^T and backward pivots of U D U^T
    let mut fwd = Vec::with_capacity(m);
    fwd.push(guard(diag[0] - shift));
    for j in 1..m {
        let d = diag[j] - shift - off[j] * off[j] / fwd[j - 1];
        fwd.push(guard(d));
    }
    let mut bwd = alloc::vec![0.0; m];
    bwd[m - 1] = guard(diag[m - 1] - shift);
    for j in (0..m - 1).rev() {
        let d = diag[j] - shift - off[j + 1] * off[j + 1] / bwd[j + 1];
        bwd[j] = guard(d);
    }

    // twist where the diagonal of the inverse is largest
    let twist = (0..m)
        .min_by(|&a, &b| {
            let ga = (fwd[a] + bwd[a] - (diag[a] - shift)).abs();
            let gb = (fwd[b] + bwd[b] - (diag[b] - shift)).abs();
            ga.total_cmp(&gb)
        })
        .unwrap();

    let mut z = alloc::vec![0.0; m];
    z[twist] = 1.0;
    for j in (0..twist).rev() {
        z[j] = -off[j + 1] * z[j + 1] / fwd[j];
    }
    for j in twist + 1..m {
        z[j] = -off[j] * z[j - 1] / bwd[j];
    }

    let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    let sign = if z[0] < 0.0 { -1.0 } else { 1.0 };
    z.iter_mut().for_each(|v| *v *= sign / norm);
    z
}

/// Tridiagonal single-excitation Hamiltonian: `omega0` on the diagonal,
/// `J_j` on the first off-diagonals.
pub fn hamiltonian(spec: &ChainSpec) -> RealMatrix {
    let m = spec.sites();
    let mut h = RealMatrix::zeros(m, m);
    for j in 0..m {
        h[(j, j)] = spec.omega0();
    }
    for j in 0..m - 1 {
        let c = spec.coupling(j);
        h[(j, j + 1)] = c;
        h[(j + 1, j)] = c;
    }
    h
}
