//! Model-independent reduction of a harmonic ground state to its
//! entanglement entropy.
//!
//! A discretized free field is an array of coupled oscillators with
//! Hamiltonian `½(πᵀπ + φᵀKφ)`. Its ground state is a Gaussian with kernel
//! `Ω = K^{1/2}`. Tracing out a subset of the oscillators leaves a Gaussian
//! mixed state described by two blocks `β` and `γ`. The generalized
//! eigenvalues `β′ⱼ` of the pair `(β, γ)` each describe one thermal mode,
//! and the entropies of those modes add up to the entanglement entropy.
//!
//! The pipeline is split into the four steps
//! [`omega_from_coupling`] → [`reduce`] → [`mode_spectrum`] →
//! [`entropy_from_spectrum`], composed by [`entanglement_entropy`].
//! [`GroundState`] caches `Ω` and `Ω⁻¹` for evaluating many partitions of one
//! system.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::linalg::{relative_frobenius, submatrix, sym_eigenvalues, symmetrize, SymEigen};
use crate::{Error, Result};

/// Below this value of `β′` the mode entropy is evaluated from its series.
const SERIES_THRESHOLD: f64 = 1e-8;

/// Numerical tolerances of the reduction pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Maximum relative Frobenius error of `Ω·Ω` against `K`.
    pub sqrt_residual: f64,
    /// Width of the band outside `[0, 1)` in which mode eigenvalues are
    /// clamped instead of rejected.
    pub clamp: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            sqrt_residual: 1e-10,
            clamp: 1e-10,
        }
    }
}

/// Symmetric positive-definite coupling matrix `K` of an oscillator array.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingMatrix {
    k: DMatrix<f64>,
}

impl CouplingMatrix {
    /// Wraps `k` after symmetrizing it. Positivity is checked later, when the
    /// square root is taken.
    pub fn new(mut k: DMatrix<f64>) -> Result<Self> {
        if k.nrows() != k.ncols() {
            return Err(Error::NotSquare {
                rows: k.nrows(),
                cols: k.ncols(),
            });
        }
        if k.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if k.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        symmetrize(&mut k);
        Ok(Self { k })
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        Self::new(DMatrix::from_fn(dim, dim, f))
    }

    pub fn dim(&self) -> usize {
        self.k.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.k
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.k
    }

    /// Relabels oscillators: entry `(i, j)` of the result is `K[perm[i], perm[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.dim());
        Self {
            k: submatrix(&self.k, perm, perm),
        }
    }

    /// `c² K`. The ground-state kernel scales by `c`, the spectrum `β′` does not.
    pub fn scaled(&self, c_squared: f64) -> Self {
        Self {
            k: &self.k * c_squared,
        }
    }
}

/// Which oscillators are traced out (`true`) and which are kept (`false`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartitionMask {
    traced: Vec<bool>,
}

impl PartitionMask {
    pub fn new(traced: Vec<bool>) -> Self {
        Self { traced }
    }

    /// Mask of size `dim` tracing exactly the listed oscillators.
    pub fn from_traced_indices(dim: usize, indices: &[usize]) -> Self {
        let mut traced = vec![false; dim];
        for &i in indices {
            traced[i] = true;
        }
        Self { traced }
    }

    pub fn dim(&self) -> usize {
        self.traced.len()
    }

    pub fn traced(&self) -> &[bool] {
        &self.traced
    }

    pub fn is_traced(&self, i: usize) -> bool {
        self.traced[i]
    }

    pub fn traced_count(&self) -> usize {
        self.traced.iter().filter(|&&t| t).count()
    }

    pub fn kept_count(&self) -> usize {
        self.dim() - self.traced_count()
    }

    /// All-traced and all-kept partitions leave a pure state with zero entropy.
    pub fn is_degenerate(&self) -> bool {
        let t = self.traced_count();
        t == 0 || t == self.dim()
    }

    pub fn complement(&self) -> Self {
        Self {
            traced: self.traced.iter().map(|t| !t).collect(),
        }
    }

    pub fn traced_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.traced[i]).collect()
    }

    pub fn kept_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| !self.traced[i]).collect()
    }

    /// Mask matching [`CouplingMatrix::permuted`] with the same `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            traced: perm.iter().map(|&p| self.traced[p]).collect(),
        }
    }
}

/// Ground-state kernel `Ω = K^{1/2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaMatrix {
    omega: DMatrix<f64>,
}

impl OmegaMatrix {
    /// Wraps an already computed kernel. Used by tests and by callers that
    /// obtain `Ω` in closed form.
    pub fn from_matrix(mut omega: DMatrix<f64>) -> Result<Self> {
        if omega.nrows() != omega.ncols() {
            return Err(Error::NotSquare {
                rows: omega.nrows(),
                cols: omega.ncols(),
            });
        }
        symmetrize(&mut omega);
        Ok(Self { omega })
    }

    pub fn dim(&self) -> usize {
        self.omega.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.omega
    }
}

/// The `β` and `γ = C − β` blocks over the kept oscillators.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedBlocks {
    gamma: DMatrix<f64>,
    beta: DMatrix<f64>,
}

impl ReducedBlocks {
    pub fn new(mut gamma: DMatrix<f64>, mut beta: DMatrix<f64>) -> Result<Self> {
        if gamma.nrows() != gamma.ncols() {
            return Err(Error::NotSquare {
                rows: gamma.nrows(),
                cols: gamma.ncols(),
            });
        }
        if beta.shape() != gamma.shape() {
            return Err(Error::DimensionMismatch {
                expected: gamma.nrows(),
                found: beta.nrows(),
            });
        }
        symmetrize(&mut gamma);
        symmetrize(&mut beta);
        Ok(Self { gamma, beta })
    }

    pub fn dim(&self) -> usize {
        self.gamma.nrows()
    }

    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn beta(&self) -> &DMatrix<f64> {
        &self.beta
    }
}

/// Mode eigenvalues `β′ⱼ ∈ [0, 1)`, sorted in descending order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeSpectrum {
    betaprimes: Vec<f64>,
}

impl ModeSpectrum {
    pub fn new(mut betaprimes: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = betaprimes
            .iter()
            .find(|v| !(v.is_finite() && **v >= 0.0 && **v < 1.0))
        {
            return Err(Error::SpectrumOutOfRange { value: bad });
        }
        betaprimes.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { betaprimes })
    }

    pub fn betaprimes(&self) -> &[f64] {
        &self.betaprimes
    }

    pub fn len(&self) -> usize {
        self.betaprimes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betaprimes.is_empty()
    }
}

/// Entanglement entropy with its per-mode decomposition and provenance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyResult {
    pub value: f64,
    pub mode_entropies: Vec<f64>,
    pub metadata: BTreeMap<String, String>,
}

impl EntropyResult {
    /// Zero entropy of a pure (unpartitioned) state.
    pub fn zero() -> Self {
        let mut metadata = BTreeMap::new();
        metadata.insert("short_circuit".into(), "degenerate partition".into());
        Self {
            value: 0.0,
            mode_entropies: Vec::new(),
            metadata,
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }
}

/// Computes `Ω = U K_D^{1/2} Uᵀ` and checks `Ω·Ω ≈ K`.
pub fn omega_from_coupling(k: &CouplingMatrix, tol: &Tolerances) -> Result<OmegaMatrix> {
    let eig = SymEigen::new(k.matrix().clone());
    check_positive(&eig)?;
    let omega = eig.apply(f64::sqrt);
    check_square_root(&omega, k, tol)?;
    Ok(OmegaMatrix { omega })
}

fn check_positive(eig: &SymEigen) -> Result<()> {
    let floor = eig.zero_floor();
    let min = eig.min();
    if min <= floor {
        return Err(Error::NonPositiveCoupling {
            eigenvalue: min,
            tolerance: floor,
        });
    }
    Ok(())
}

fn check_square_root(omega: &DMatrix<f64>, k: &CouplingMatrix, tol: &Tolerances) -> Result<()> {
    let residual = relative_frobenius(&(omega * omega), k.matrix());
    if residual > tol.sqrt_residual {
        return Err(Error::InaccurateSquareRoot {
            residual,
            tolerance: tol.sqrt_residual,
        });
    }
    Ok(())
}

/// Splits `Ω` into kept block `C`, cross block `B` and traced block `A`, and
/// forms `β = ½ Bᵀ A⁻¹ B`, `γ = C − β` through a Cholesky solve on `A`.
pub fn reduce(omega: &OmegaMatrix, mask: &PartitionMask) -> Result<ReducedBlocks> {
    if mask.dim() != omega.dim() {
        return Err(Error::DimensionMismatch {
            expected: omega.dim(),
            found: mask.dim(),
        });
    }
    if mask.is_degenerate() {
        return Err(Error::DegeneratePartition);
    }
    let traced = mask.traced_indices();
    let kept = mask.kept_indices();
    let w = omega.matrix();
    let a = submatrix(w, &traced, &traced);
    let b = submatrix(w, &traced, &kept);
    let c = submatrix(w, &kept, &kept);

    let max_diag = a.diagonal().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let chol = a.cholesky().ok_or(Error::SingularExteriorBlock)?;
    let min_pivot = chol
        .l_dirty()
        .diagonal()
        .iter()
        .fold(f64::INFINITY, |m, v| m.min(*v));
    if min_pivot * min_pivot <= traced.len() as f64 * f64::EPSILON * max_diag {
        return Err(Error::SingularExteriorBlock);
    }
    let a_inv_b = chol.solve(&b);
    let mut beta = b.transpose() * a_inv_b;
    beta *= 0.5;
    symmetrize(&mut beta);
    let mut gamma = c - &beta;
    symmetrize(&mut gamma);
    Ok(ReducedBlocks { gamma, beta })
}

/// Eigenvalues of `β′ = γ_D^{-1/2} V β Vᵀ γ_D^{-1/2}`, clamped into `[0, 1)`
/// and sorted in descending order. The rotation diagonalizing `β′` is never
/// formed, since only its eigenvalues enter the entropy.
pub fn mode_spectrum(blocks: &ReducedBlocks, tol: &Tolerances) -> Result<ModeSpectrum> {
    let eig = SymEigen::new(blocks.gamma.clone());
    let floor = eig.zero_floor();
    if eig.min() <= floor {
        return Err(Error::NonPositiveGamma {
            eigenvalue: eig.min(),
            tolerance: floor,
        });
    }
    // Columns of `t` are γ eigenvectors scaled by γ_D^{-1/2}.
    let mut t = eig.vectors;
    for (c, &g) in eig.values.iter().enumerate() {
        t.column_mut(c).scale_mut(1.0 / g.sqrt());
    }
    let mut bp = t.transpose() * &blocks.beta * &t;
    symmetrize(&mut bp);

    let below_one = 1.0_f64.next_down();
    let mut values = sym_eigenvalues(bp);
    for v in values.iter_mut() {
        if !v.is_finite() || *v < -tol.clamp || *v > 1.0 + tol.clamp {
            return Err(Error::SpectrumOutOfRange { value: *v });
        }
        *v = v.clamp(0.0, below_one);
    }
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(ModeSpectrum { betaprimes: values })
}

/// Von Neumann entropy of one thermal mode with parameter `β′ ∈ [0, 1)`.
///
/// With `ξ = β′ / (1 + √(1 − β′²))` the entropy is
/// `−ln(1 − ξ) − ξ ln ξ / (1 − ξ)`; small `β′` uses the expansion
/// `ξ(1 − ln ξ) + ξ²(½ − ln ξ)`.
pub fn mode_entropy(betaprime: f64) -> f64 {
    if betaprime <= 0.0 {
        return 0.0;
    }
    let b = betaprime.min(1.0_f64.next_down());
    let xi = b / (1.0 + ((1.0 - b) * (1.0 + b)).sqrt());
    let ln_xi = xi.ln();
    if b < SERIES_THRESHOLD {
        return xi * (1.0 - ln_xi) + xi * xi * (0.5 - ln_xi);
    }
    -(-xi).ln_1p() - xi * ln_xi / (1.0 - xi)
}

/// Sums the mode entropies in spectrum order.
pub fn entropy_from_spectrum(spec: &ModeSpectrum) -> EntropyResult {
    let mode_entropies: Vec<f64> = spec.betaprimes.iter().map(|&b| mode_entropy(b)).collect();
    let value = mode_entropies.iter().sum();
    EntropyResult {
        value,
        mode_entropies,
        metadata: BTreeMap::new(),
    }
}

/// Full pipeline from a coupling matrix and a partition to the entropy.
pub fn entanglement_entropy(
    k: &CouplingMatrix,
    mask: &PartitionMask,
    tol: &Tolerances,
) -> Result<EntropyResult> {
    if mask.dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            found: mask.dim(),
        });
    }
    if mask.is_degenerate() {
        return Ok(EntropyResult::zero());
    }
    let omega = omega_from_coupling(k, tol)?;
    let blocks = reduce(&omega, mask)?;
    let spec = mode_spectrum(&blocks, tol)?;
    Ok(entropy_from_spectrum(&spec)
        .with_meta("dim", k.dim())
        .with_meta("traced", mask.traced_count())
        .with_meta("tol_sqrt", tol.sqrt_residual)
        .with_meta("tol_clamp", tol.clamp))
}

/// `Ω` and `Ω⁻¹` of one system from a single eigen-decomposition, for
/// evaluating many partitions.
///
/// Besides the direct reduction, a ground state can form `β` from the kept
/// block alone via the Schur-complement identity
/// `(Ω⁻¹)_kept = (C − Bᵀ A⁻¹ B)⁻¹`, which costs `O(n³)` in the number of
/// kept oscillators instead of the number of traced ones.
#[derive(Clone, Debug)]
pub struct GroundState {
    omega: OmegaMatrix,
    omega_inv: DMatrix<f64>,
    tol: Tolerances,
}

impl GroundState {
    pub fn new(k: &CouplingMatrix, tol: &Tolerances) -> Result<Self> {
        let eig = SymEigen::new(k.matrix().clone());
        check_positive(&eig)?;
        let omega = eig.apply(f64::sqrt);
        check_square_root(&omega, k, tol)?;
        let omega_inv = eig.apply(|v| 1.0 / v.sqrt());
        Ok(Self {
            omega: OmegaMatrix { omega },
            omega_inv,
            tol: *tol,
        })
    }

    pub fn dim(&self) -> usize {
        self.omega.dim()
    }

    pub fn omega(&self) -> &OmegaMatrix {
        &self.omega
    }

    pub fn omega_inverse(&self) -> &DMatrix<f64> {
        &self.omega_inv
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// `β` and `γ` over the kept oscillators of `mask`, from `Ω⁻¹` restricted
    /// to the kept block.
    pub fn reduce_from_kept(&self, mask: &PartitionMask) -> Result<ReducedBlocks> {
        if mask.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: mask.dim(),
            });
        }
        if mask.is_degenerate() {
            return Err(Error::DegeneratePartition);
        }
        let kept = mask.kept_indices();
        let c = submatrix(self.omega.matrix(), &kept, &kept);
        let x = submatrix(&self.omega_inv, &kept, &kept);
        let chol = x.cholesky().ok_or(Error::SingularExteriorBlock)?;
        let x_inv = chol.inverse();
        let mut beta = (&c - x_inv) * 0.5;
        symmetrize(&mut beta);
        let mut gamma = c - &beta;
        symmetrize(&mut gamma);
        Ok(ReducedBlocks { gamma, beta })
    }

    /// Entropy of `mask` through the direct Cholesky reduction.
    pub fn entropy_direct(&self, mask: &PartitionMask) -> Result<EntropyResult> {
        if mask.is_degenerate() && mask.dim() == self.dim() {
            return Ok(EntropyResult::zero());
        }
        let blocks = reduce(&self.omega, mask)?;
        let spec = mode_spectrum(&blocks, &self.tol)?;
        Ok(entropy_from_spectrum(&spec).with_meta("route", "direct"))
    }

    /// Entropy of `mask`, reducing onto whichever side of the partition is
    /// smaller. Both sides carry the same entropy for a pure total state.
    pub fn entropy(&self, mask: &PartitionMask) -> Result<EntropyResult> {
        if mask.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: mask.dim(),
            });
        }
        if mask.is_degenerate() {
            return Ok(EntropyResult::zero());
        }
        let flipped = mask.kept_count() > mask.traced_count();
        let blocks = if flipped {
            self.reduce_from_kept(&mask.complement())?
        } else {
            self.reduce_from_kept(mask)?
        };
        let spec = mode_spectrum(&blocks, &self.tol)?;
        Ok(entropy_from_spectrum(&spec)
            .with_meta("route", "kept-block inverse")
            .with_meta("reduced_side", if flipped { "traced" } else { "kept" }))
    }
}
