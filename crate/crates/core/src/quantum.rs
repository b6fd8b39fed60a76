//! Qubit states, density matrices, and the three conjugate measurement bases.
//!
//! Everything downstream works with pure states of dimension 2 (one qubit),
//! 4 (a qubit pair, or a four-dimensional probe), and 8 (qubit ⊗ probe), so
//! those are the only dimensions the constructors accept.  Composite indices
//! are always first-factor-major: the product state `tensor(a, b)` stores
//! amplitude `a_i · b_j` at index `i·dim(b) + j`.
//!
//! The six signal states come in three mutually unbiased qubit bases:
//!
//! * `Z`: |0⟩, |1⟩,
//! * `X`: (|0⟩ ± |1⟩)/√2,
//! * `Y`: (|0⟩ ± i|1⟩)/√2.
//!
//! Their Bloch vectors are ±x̂, ±ŷ, ±ẑ, and any two states from different
//! bases have overlap |⟨φ|χ⟩|² = 1/2.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dimensions accepted by [`PureState`] and [`DensityMatrix`].
pub const SUPPORTED_DIMS: [usize; 3] = [2, 4, 8];

/// Tolerance used by the validating constructors (Hermiticity, trace,
/// positivity, orthonormality).
pub const VALIDATION_TOL: f64 = 1e-10;

fn check_dim(dim: usize) -> Result<()> {
    if SUPPORTED_DIMS.contains(&dim) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

/// One of the three conjugate qubit measurement bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// Computational basis |0⟩, |1⟩ (Bloch ±ẑ).
    Z,
    /// Hadamard basis (|0⟩ ± |1⟩)/√2 (Bloch ±x̂).
    X,
    /// Circular basis (|0⟩ ± i|1⟩)/√2 (Bloch ±ŷ).
    Y,
}

impl Basis {
    /// All three bases, in the order used throughout: Z, X, Y.
    pub const ALL: [Basis; 3] = [Basis::Z, Basis::X, Basis::Y];

    /// Single-letter label ("Z", "X", "Y").
    pub fn label(self) -> &'static str {
        match self {
            Basis::Z => "Z",
            Basis::X => "X",
            Basis::Y => "Y",
        }
    }

    /// The Bloch axis this basis measures along.
    pub fn axis(self) -> BlochVector {
        match self {
            Basis::Z => BlochVector::new(0.0, 0.0, 1.0),
            Basis::X => BlochVector::new(1.0, 0.0, 0.0),
            Basis::Y => BlochVector::new(0.0, 1.0, 0.0),
        }
    }

    /// The two eigenstates of this basis, ordered so that `states()[bit]`
    /// encodes key bit `bit`.  Bit 0 always lies along the positive Bloch
    /// axis.
    pub fn states(self) -> [PureState; 2] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let q = |a0: Complex64, a1: Complex64| {
            PureState::new(vec![a0, a1]).expect("basis states are unit vectors")
        };
        match self {
            Basis::Z => [q(c(1.0, 0.0), c(0.0, 0.0)), q(c(0.0, 0.0), c(1.0, 0.0))],
            Basis::X => [q(c(s, 0.0), c(s, 0.0)), q(c(s, 0.0), c(-s, 0.0))],
            Basis::Y => [q(c(s, 0.0), c(0.0, s)), q(c(s, 0.0), c(0.0, -s))],
        }
    }
}

impl std::fmt::Display for Basis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// The six signal states as (basis, key bit, state) triples, ordered
/// Z0, Z1, X0, X1, Y0, Y1.
pub fn six_states() -> Vec<(Basis, u8, PureState)> {
    let mut out = Vec::with_capacity(6);
    for basis in Basis::ALL {
        let [s0, s1] = basis.states();
        out.push((basis, 0, s0));
        out.push((basis, 1, s1));
    }
    out
}

/// A normalized pure state of dimension 2, 4, or 8.
///
/// The constructor normalizes its input, so a `PureState` always has unit
/// norm exactly (up to floating-point rounding of the division).
#[derive(Debug, Clone)]
pub struct PureState {
    amps: DVector<Complex64>,
}

impl PureState {
    /// Builds a state from raw amplitudes, normalizing them.
    ///
    /// Fails on unsupported dimensions and on vectors with norm below
    /// `1e-12`.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        Self::from_vector(DVector::from_vec(amps))
    }

    /// Builds a state from an owned amplitude vector, normalizing it.
    pub fn from_vector(v: DVector<Complex64>) -> Result<Self> {
        check_dim(v.len())?;
        let n = v.norm();
        if n < 1e-12 {
            return Err(Error::ZeroNorm(n));
        }
        Ok(Self { amps: v.unscale(n) })
    }

    /// The computational basis state |index⟩ of the given dimension.
    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                left: index,
                right: dim,
            });
        }
        let mut v = DVector::from_element(dim, Complex64::new(0.0, 0.0));
        v[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amps: v })
    }

    /// Dimension of the underlying Hilbert space.
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Amplitude at the given computational-basis index.
    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    /// Full amplitude vector.
    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    /// Inner product ⟨self|other⟩ (conjugate-linear in `self`).
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self.amps.dotc(&other.amps))
    }

    /// The projector |ψ⟩⟨ψ| as a density matrix.
    pub fn density(&self) -> DensityMatrix {
        let n = self.dim();
        let mat = DMatrix::from_fn(n, n, |i, j| self.amps[i] * self.amps[j].conj());
        DensityMatrix::from_trusted(mat)
    }

    /// Bloch vector of a single-qubit state (unit length for pure states).
    pub fn bloch(&self) -> Result<BlochVector> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: 2,
            });
        }
        let cross = self.amps[0].conj() * self.amps[1];
        Ok(BlochVector::new(
            2.0 * cross.re,
            2.0 * cross.im,
            self.amps[0].norm_sqr() - self.amps[1].norm_sqr(),
        ))
    }
}

/// A density matrix: Hermitian, unit-trace, positive semidefinite, of
/// dimension 2, 4, or 8.
///
/// [`DensityMatrix::new`] validates all three properties to `1e-10`
/// tolerance and stores the symmetrized matrix (m + m†)/2, so stored
/// matrices are Hermitian exactly.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates and stores a density matrix.
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch {
                left: mat.nrows(),
                right: mat.ncols(),
            });
        }
        let n = mat.nrows();
        check_dim(n)?;

        let mut herm_dev = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                herm_dev = herm_dev.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
            }
        }
        if herm_dev > VALIDATION_TOL {
            return Err(Error::NotHermitian(herm_dev));
        }

        let trace_dev = (mat.trace() - Complex64::new(1.0, 0.0)).norm();
        if trace_dev > VALIDATION_TOL {
            return Err(Error::NotUnitTrace(trace_dev));
        }

        let sym = (&mat + mat.adjoint()).unscale(2.0);
        let eigs = sym.clone().symmetric_eigen().eigenvalues;
        let min_eig = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < -VALIDATION_TOL {
            return Err(Error::NotPositive(min_eig));
        }

        Ok(Self { mat: sym })
    }

    /// Internal constructor for matrices that are valid by construction
    /// (projectors of normalized states, partial traces of valid inputs).
    /// Symmetrizes but skips the eigenvalue check.
    pub(crate) fn from_trusted(mat: DMatrix<Complex64>) -> Self {
        let sym = (&mat + mat.adjoint()).unscale(2.0);
        Self { mat: sym }
    }

    /// The projector onto a pure state.
    pub fn from_pure(psi: &PureState) -> Self {
        psi.density()
    }

    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// Single entry (row, column).
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    /// Real part of the trace (the imaginary part is zero by Hermiticity).
    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Eigenvalues sorted in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut eigs: Vec<f64> = self
            .mat
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .collect();
        eigs.sort_by(|a, b| a.total_cmp(b));
        eigs
    }

    /// Bloch vector of a single-qubit density matrix (norm ≤ 1).
    pub fn bloch(&self) -> Result<BlochVector> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: 2,
            });
        }
        let off = self.mat[(1, 0)];
        Ok(BlochVector::new(
            2.0 * off.re,
            2.0 * off.im,
            (self.mat[(0, 0)] - self.mat[(1, 1)]).re,
        ))
    }
}

/// A point in (or on) the Bloch ball, identifying a qubit state.
///
/// Pure states sit on the unit sphere; mixed states lie strictly inside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    /// x component (Hadamard-basis axis).
    pub x: f64,
    /// y component (circular-basis axis).
    pub y: f64,
    /// z component (computational-basis axis).
    pub z: f64,
}

impl BlochVector {
    /// Builds a Bloch vector from its components.
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Dot product with another Bloch vector.
    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// The pure state pointing along this (unit) vector.
    ///
    /// Fails if the norm deviates from 1 by more than `1e-8`; smaller
    /// deviations are absorbed by renormalizing.
    pub fn state(&self) -> Result<PureState> {
        let n = self.norm();
        if (n - 1.0).abs() > 1e-8 {
            return Err(Error::OutOfRange {
                name: "bloch norm",
                value: n,
                min: 1.0,
                max: 1.0,
            });
        }
        let (x, y, z) = (self.x / n, self.y / n, self.z / n);
        let theta = z.clamp(-1.0, 1.0).acos();
        let phi = y.atan2(x);
        PureState::new(vec![
            Complex64::new((theta / 2.0).cos(), 0.0),
            Complex64::from_polar((theta / 2.0).sin(), phi),
        ])
    }

    /// The qubit density matrix (1 + b·σ)/2.  Requires norm ≤ 1 (within
    /// `1e-10`), i.e. a point of the Bloch ball.
    pub fn density(&self) -> Result<DensityMatrix> {
        let n = self.norm();
        if n > 1.0 + VALIDATION_TOL {
            return Err(Error::OutOfRange {
                name: "bloch norm",
                value: n,
                min: 0.0,
                max: 1.0,
            });
        }
        let half = |v: f64| v / 2.0;
        let mat = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(half(1.0 + self.z), 0.0),
                Complex64::new(half(self.x), -half(self.y)),
                Complex64::new(half(self.x), half(self.y)),
                Complex64::new(half(1.0 - self.z), 0.0),
            ],
        );
        Ok(DensityMatrix::from_trusted(mat))
    }
}

/// Tensor product of two pure states, first-factor-major.
///
/// The result dimension must again be 2, 4, or 8, so the admissible shapes
/// are 2⊗2, 2⊗4, and 4⊗2.
pub fn tensor(a: &PureState, b: &PureState) -> Result<PureState> {
    let dim = a.dim() * b.dim();
    check_dim(dim)?;
    let v = a.amplitudes().kronecker(b.amplitudes());
    PureState::from_vector(DVector::from_column_slice(v.as_slice()))
}

/// Partial trace of a bipartite density matrix.
///
/// `dims = (d_first, d_second)` gives the factor dimensions (composite
/// indices are first-factor-major), and `keep` selects which factor the
/// result lives on: 0 keeps the first, 1 keeps the second.
pub fn partial_trace(
    rho: &DensityMatrix,
    keep: usize,
    dims: (usize, usize),
) -> Result<DensityMatrix> {
    let (da, db) = dims;
    if da * db != rho.dim() {
        return Err(Error::DimensionMismatch {
            left: da * db,
            right: rho.dim(),
        });
    }
    if keep > 1 {
        return Err(Error::InvalidConfig(format!(
            "keep must be 0 (first factor) or 1 (second factor), got {keep}"
        )));
    }
    let kept = if keep == 0 { da } else { db };
    check_dim(kept)?;

    let mut out = DMatrix::from_element(kept, kept, Complex64::new(0.0, 0.0));
    if keep == 0 {
        for a in 0..da {
            for ap in 0..da {
                let mut acc = Complex64::new(0.0, 0.0);
                for b in 0..db {
                    acc += rho.entry(a * db + b, ap * db + b);
                }
                out[(a, ap)] = acc;
            }
        }
    } else {
        for b in 0..db {
            for bp in 0..db {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in 0..da {
                    acc += rho.entry(a * db + b, a * db + bp);
                }
                out[(b, bp)] = acc;
            }
        }
    }
    Ok(DensityMatrix::from_trusted(out))
}

/// Fidelity ⟨ψ|ρ|ψ⟩ between a pure state and a density matrix, clamped
/// to [0, 1].
pub fn fidelity_pure(psi: &PureState, rho: &DensityMatrix) -> Result<f64> {
    if psi.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            left: psi.dim(),
            right: rho.dim(),
        });
    }
    let v = psi.amplitudes();
    let f = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
    Ok(f.clamp(0.0, 1.0))
}

/// The two-qubit singlet state (|01⟩ − |10⟩)/√2.
///
/// Its reduced state on either qubit is maximally mixed, and measuring the
/// two qubits along any common Bloch axis gives perfectly anticorrelated
/// outcomes.
pub fn make_singlet() -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    PureState::new(vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(0.0, 0.0),
    ])
    .expect("singlet is a unit vector")
}

/// Outcome probabilities of a projective measurement of `rho` in the given
/// orthonormal basis.
///
/// The basis must contain exactly `rho.dim()` mutually orthonormal states
/// of matching dimension (checked to `1e-8`).  The returned probabilities
/// are clamped to be nonnegative and renormalized to sum to exactly 1.
pub fn measure_projective(rho: &DensityMatrix, basis: &[PureState]) -> Result<Vec<f64>> {
    let dim = rho.dim();
    if basis.len() != dim {
        return Err(Error::DimensionMismatch {
            left: basis.len(),
            right: dim,
        });
    }
    let mut ortho_dev = 0.0f64;
    for (i, bi) in basis.iter().enumerate() {
        for (j, bj) in basis.iter().enumerate() {
            let overlap = bi.inner(bj)?;
            let target = if i == j { 1.0 } else { 0.0 };
            ortho_dev = ortho_dev.max((overlap - Complex64::new(target, 0.0)).norm());
        }
    }
    if ortho_dev > 1e-8 {
        return Err(Error::NotOrthonormal(ortho_dev));
    }

    let mut probs: Vec<f64> = basis
        .iter()
        .map(|b| fidelity_pure(b, rho).map(|p| p.max(0.0)))
        .collect::<Result<_>>()?;
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidProbability(format!(
            "projective probabilities sum to {total}, expected 1"
        )));
    }
    for p in &mut probs {
        *p /= total;
    }
    Ok(probs)
}
