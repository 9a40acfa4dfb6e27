//! Brute-force reference: evolution of the full `2^(N+1)`-dimensional state.
//!
//! Basis ordering: the system qubit is the most significant bit of the
//! matrix index and bath spin `k` is bit `k`. A bit value of 0 means the
//! `σ_z = +1` state (for the system, the excited state `|1⟩`), so every
//! single-site operator is the Kronecker product
//! `σ_sys ⊗ σ_{N-1} ⊗ ... ⊗ σ_0` with `σ_z = diag(1, -1)`.
//!
//! Nothing here uses the block structure of the Hamiltonian; the oracle only
//! knows the three Kronecker-product terms.

use nalgebra::{DMatrix, RealField, SymmetricEigen};
use num_complex::Complex;
use num_traits::Float;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{BathConfiguration, ModelSpec, ReducedState};
use crate::scalar::{lit, Real};
use crate::trajectory::{validate_grid, Engine, Trajectory, TrajectoryPoint};

/// Largest bath the oracle accepts by default (matrix dimension 2048).
pub const ORACLE_MAX_MODES: usize = 10;

/// Scalars the oracle can work with: the crate's float trait plus what the
/// dense eigensolver needs.
pub trait OracleScalar: Real + RealField {}
impl<T: Real + RealField> OracleScalar for T {}

/// Density matrix of system plus bath.
#[derive(Debug, Clone, PartialEq)]
pub struct FullState<T: OracleScalar> {
    modes: usize,
    matrix: DMatrix<Complex<T>>,
}

impl<T: OracleScalar> FullState<T> {
    pub fn from_matrix(modes: usize, matrix: DMatrix<Complex<T>>) -> Result<Self> {
        let dim = 1usize << (modes + 1);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::invalid(
                "matrix",
                format!("expected {dim}x{dim} for {modes} bath modes, got {}x{}", matrix.nrows(), matrix.ncols()),
            ));
        }
        Ok(Self { modes, matrix })
    }

    /// `I / 2^(N+1)`.
    pub fn maximally_mixed(modes: usize) -> Self {
        let dim = 1usize << (modes + 1);
        let p = Complex::new(T::one() / lit::<T>(dim as f64), T::zero());
        Self {
            modes,
            matrix: DMatrix::from_diagonal_element(dim, dim, p),
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex<T> {
        self.matrix.trace()
    }

    /// Largest entry of `ρ - ρ†`.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let d = (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm();
                worst = Float::max(worst, d);
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part, via the real symmetric
    /// embedding `[[A, -B], [B, A]]` of `A + iB`.
    pub fn min_eigenvalue(&self) -> Result<T> {
        let n = self.dim();
        let mut embed = DMatrix::<T>::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let z = (self.matrix[(i, j)] + self.matrix[(j, i)].conj()) * lit::<T>(0.5);
                embed[(i, j)] = z.re;
                embed[(i + n, j + n)] = z.re;
                embed[(i, j + n)] = -z.im;
                embed[(i + n, j)] = z.im;
            }
        }
        let eig = SymmetricEigen::try_new(embed, T::default_epsilon(), 0)
            .ok_or_else(|| Error::Eigen("no convergence while checking positivity".into()))?;
        Ok(eig.eigenvalues.iter().copied().fold(Float::infinity(), Float::min))
    }

    /// Checks Hermiticity, unit trace and positivity within `tol`.
    pub fn check(&self, tol: T) -> Result<()> {
        let herm = self.hermiticity_defect();
        let tr = (self.trace() - Complex::new(T::one(), T::zero())).norm();
        let min = self.min_eigenvalue()?;
        if herm > tol || tr > tol || min < -tol {
            return Err(Error::Domain(format!(
                "invalid full state: hermiticity defect {herm:e}, trace error {tr:e}, min eigenvalue {min:e}"
            )));
        }
        Ok(())
    }
}

fn pauli_z<T: OracleScalar>() -> DMatrix<T> {
    DMatrix::from_row_slice(2, 2, &[T::one(), T::zero(), T::zero(), -T::one()])
}

fn pauli_x<T: OracleScalar>() -> DMatrix<T> {
    DMatrix::from_row_slice(2, 2, &[T::zero(), T::one(), T::one(), T::zero()])
}

/// `op` acting on bit position `bit` (0 is least significant) of a register
/// of `bits` qubits, identity elsewhere.
fn on_site<T: OracleScalar>(op: &DMatrix<T>, bit: usize, bits: usize) -> DMatrix<T> {
    let mut out = DMatrix::<T>::identity(1, 1);
    for position in (0..bits).rev() {
        let factor = if position == bit { op.clone() } else { DMatrix::identity(2, 2) };
        out = out.kronecker(&factor);
    }
    out
}

fn check_cap(modes: usize, cap: usize) -> Result<()> {
    if modes > cap {
        return Err(Error::TooManyModes {
            engine: "the Hilbert-space oracle",
            modes,
            cap,
            hint: "; use the configuration-sum engine instead",
        });
    }
    Ok(())
}

/// `H = Δσ⁰_z + Σ_k ω_k σ^k_z + σ⁰_x Σ_k g_k σ^k_z`, real symmetric.
pub fn build_full_hamiltonian<T: OracleScalar>(model: &ModelSpec<T>) -> Result<DMatrix<T>> {
    build_full_hamiltonian_with_cap(model, ORACLE_MAX_MODES)
}

pub fn build_full_hamiltonian_with_cap<T: OracleScalar>(model: &ModelSpec<T>, cap: usize) -> Result<DMatrix<T>> {
    check_cap(model.len(), cap)?;
    let n = model.len();
    let bits = n + 1;
    let sz = pauli_z::<T>();
    let mut h = on_site(&sz, n, bits) * model.delta();
    let mut coupling = DMatrix::<T>::zeros(1 << bits, 1 << bits);
    for (k, m) in model.modes().iter().enumerate() {
        let z_k = on_site(&sz, k, bits);
        h += &z_k * m.omega;
        coupling += z_k * m.coupling;
    }
    h += on_site(&pauli_x::<T>(), n, bits) * coupling;
    Ok(h)
}

/// `I_sys ⊗ Σ_k ω_k σ^k_z` on the full space.
pub fn bath_hamiltonian<T: OracleScalar>(model: &ModelSpec<T>) -> Result<DMatrix<T>> {
    check_cap(model.len(), ORACLE_MAX_MODES)?;
    let bits = model.len() + 1;
    let sz = pauli_z::<T>();
    let mut hb = DMatrix::<T>::zeros(1 << bits, 1 << bits);
    for (k, m) in model.modes().iter().enumerate() {
        hb += on_site(&sz, k, bits) * m.omega;
    }
    Ok(hb)
}

/// Thermal bath state `e^{-βH_B}/Z` as a `2^N × 2^N` diagonal matrix in the
/// oracle's bath ordering.
pub fn thermal_bath_state<T: OracleScalar>(model: &ModelSpec<T>) -> DMatrix<Complex<T>> {
    let n = model.len();
    let mask = (1u64 << n) - 1;
    let dim = 1usize << n;
    let mut rho = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        // a set bit here means spin down, the opposite of BathConfiguration
        let config = BathConfiguration::from_index(!(b as u64) & mask, n);
        rho[(b, b)] = Complex::new(model.boltzmann_weight(&config), T::zero());
    }
    rho
}

/// `ρ_S(0) ⊗ e^{-βH_B}/Z` with `ρ_S(0)` the model's initial pure state.
pub fn initial_full_state<T: OracleScalar>(model: &ModelSpec<T>) -> Result<FullState<T>> {
    check_cap(model.len(), ORACLE_MAX_MODES)?;
    let s = ReducedState::projector(&model.initial_state());
    let system = DMatrix::from_row_slice(2, 2, &[s.rho11, s.rho10, s.rho01, s.rho00]);
    Ok(FullState {
        modes: model.len(),
        matrix: system.kronecker(&thermal_bath_state(model)),
    })
}

/// `max_ij |[H, H_B]_ij|` for arbitrary matrices.
pub fn commutator_max_norm<T: OracleScalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> T {
    (a * b - b * a).iter().map(|x| Float::abs(*x)).fold(T::zero(), Float::max)
}

/// `max_ij |[H, H_B]_ij|` for the model Hamiltonian.
pub fn commutator_norm<T: OracleScalar>(model: &ModelSpec<T>) -> Result<T> {
    Ok(commutator_max_norm(&build_full_hamiltonian(model)?, &bath_hamiltonian(model)?))
}

/// `Tr_B ρ`, the 2×2 system state.
pub fn partial_trace_system<T: OracleScalar>(rho: &FullState<T>) -> ReducedState<T> {
    let bath = 1usize << rho.modes;
    let m = &rho.matrix;
    let mut s = ReducedState::from_entries(Complex::new(T::zero(), T::zero()), Complex::new(T::zero(), T::zero()), Complex::new(T::zero(), T::zero()), Complex::new(T::zero(), T::zero()));
    for b in 0..bath {
        s.rho11 += m[(b, b)];
        s.rho10 += m[(b, bath + b)];
        s.rho01 += m[(bath + b, b)];
        s.rho00 += m[(bath + b, bath + b)];
    }
    s
}

/// `Tr_S ρ`, the `2^N × 2^N` bath state.
pub fn partial_trace_bath<T: OracleScalar>(rho: &FullState<T>) -> DMatrix<Complex<T>> {
    let bath = 1usize << rho.modes;
    let m = &rho.matrix;
    DMatrix::from_fn(bath, bath, |i, j| m[(i, j)] + m[(bath + i, bath + j)])
}

/// The model Hamiltonian diagonalised once, ready to evolve any state.
#[derive(Debug, Clone)]
pub struct HilbertOracle<T: OracleScalar> {
    modes: usize,
    eigenvalues: Vec<T>,
    eigenvectors: DMatrix<T>,
}

impl<T: OracleScalar> HilbertOracle<T> {
    pub fn new(model: &ModelSpec<T>) -> Result<Self> {
        Self::from_hamiltonian(model.len(), build_full_hamiltonian(model)?)
    }

    /// Uses an arbitrary real symmetric `h` on the same space, e.g. a
    /// deliberately broken variant of the model Hamiltonian.
    pub fn from_hamiltonian(modes: usize, h: DMatrix<T>) -> Result<Self> {
        let dim = h.nrows();
        let scale = h.iter().map(|x| Float::abs(*x)).fold(T::one(), Float::max);
        let eig = SymmetricEigen::try_new(h, T::default_epsilon(), 0)
            .ok_or_else(|| Error::Eigen(format!("symmetric QR did not converge for dimension {dim}")))?;
        if eig.eigenvalues.iter().any(|x| !Float::is_finite(*x)) {
            return Err(Error::Eigen(format!("non-finite eigenvalue for dimension {dim}")));
        }
        let v = eig.eigenvectors;
        let orth = (v.transpose() * &v - DMatrix::identity(dim, dim))
            .iter()
            .map(|x| Float::abs(*x))
            .fold(T::zero(), Float::max);
        if orth > lit(1e-8) {
            return Err(Error::Eigen(format!(
                "eigenvectors lost orthogonality ({orth:e}) for dimension {dim}, matrix scale {scale:e}"
            )));
        }
        Ok(Self {
            modes,
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            eigenvectors: v,
        })
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// `e^{-iHt} ρ0 e^{iHt}`.
    pub fn evolve(&self, rho0: &FullState<T>, t: T) -> Result<FullState<T>> {
        Ok(self.evolver(rho0)?.at(t))
    }

    /// Prepares `V^T ρ0 V` once so that many times share it.
    pub fn evolver(&self, rho0: &FullState<T>) -> Result<Evolver<'_, T>> {
        if rho0.modes != self.modes {
            return Err(Error::invalid(
                "rho0",
                format!("state has {} bath modes, Hamiltonian has {}", rho0.modes, self.modes),
            ));
        }
        let v = &self.eigenvectors;
        let vt = v.transpose();
        let (re, im) = split(&rho0.matrix);
        Ok(Evolver {
            oracle: self,
            w_re: &vt * re * v,
            w_im: &vt * im * v,
        })
    }

    /// Reduced trajectory of `model`'s initial state on `times`.
    pub fn time_series(&self, model: &ModelSpec<T>, times: &[T], seed: u64) -> Result<Trajectory<T>> {
        validate_grid(times)?;
        let rho0 = initial_full_state(model)?;
        let evolver = self.evolver(&rho0)?;
        let points = times
            .par_iter()
            .map(|&t| TrajectoryPoint::from_state(t, partial_trace_system(&evolver.at(t))))
            .collect();
        Ok(Trajectory {
            engine: Engine::Oracle,
            fingerprint: model.fingerprint(seed),
            points,
        })
    }
}

/// A state expressed in the eigenbasis, see [`HilbertOracle::evolver`].
pub struct Evolver<'a, T: OracleScalar> {
    oracle: &'a HilbertOracle<T>,
    w_re: DMatrix<T>,
    w_im: DMatrix<T>,
}

impl<T: OracleScalar> Evolver<'_, T> {
    pub fn at(&self, t: T) -> FullState<T> {
        let lambda = &self.oracle.eigenvalues;
        let dim = lambda.len();
        let mut x_re = DMatrix::<T>::zeros(dim, dim);
        let mut x_im = DMatrix::<T>::zeros(dim, dim);
        for j in 0..dim {
            for i in 0..dim {
                let (s, c) = Float::sin_cos(-(lambda[i] - lambda[j]) * t);
                let (a, b) = (self.w_re[(i, j)], self.w_im[(i, j)]);
                x_re[(i, j)] = a * c - b * s;
                x_im[(i, j)] = a * s + b * c;
            }
        }
        let v = &self.oracle.eigenvectors;
        let vt = v.transpose();
        let re = v * x_re * &vt;
        let im = v * x_im * &vt;
        FullState {
            modes: self.oracle.modes,
            matrix: DMatrix::from_fn(dim, dim, |i, j| Complex::new(re[(i, j)], im[(i, j)])),
        }
    }
}

fn split<T: OracleScalar>(m: &DMatrix<Complex<T>>) -> (DMatrix<T>, DMatrix<T>) {
    (m.map(|z| z.re), m.map(|z| z.im))
}

/// One-shot convenience around [`HilbertOracle`].
pub fn evolve_density<T: OracleScalar>(model: &ModelSpec<T>, t: T, rho0: &FullState<T>) -> Result<FullState<T>> {
    HilbertOracle::new(model)?.evolve(rho0, t)
}
