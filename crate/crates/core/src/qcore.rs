//! Dense complex linear algebra for the small Hilbert spaces used here.
//!
//! Dimensions are const generics: `N = 2` for a qubit, `N = 3` for the
//! Λ system in the `(|0⟩, |1⟩, |e⟩)` ordering and `N = 4` for two qubits in
//! the `(|00⟩, |01⟩, |10⟩, |11⟩)` ordering. Mixing dimensions is a type error.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::real::Real;

/// Normalized pure state in an `N`-dimensional space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState<T, const N: usize> {
    amps: [Complex<T>; N],
}

impl<T: Real, const N: usize> PureState<T, N> {
    /// Normalizes `amps`; rejects non-finite or all-zero amplitudes.
    pub fn new(amps: [Complex<T>; N]) -> Result<Self> {
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        let norm = norm_sqr(&amps).sqrt();
        if norm == T::zero() {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            amps: amps.map(|a| a.unscale(norm)),
        })
    }

    /// Accepts amplitudes that are already normalized to `T::NORM_TOL`.
    pub fn from_normalized(amps: [Complex<T>; N]) -> Result<Self> {
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        let n = norm_sqr(&amps);
        if (n - T::one()).abs() > T::NORM_TOL {
            return Err(Error::Unnormalized(n.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { amps })
    }

    pub fn basis(k: usize) -> Self {
        assert!(k < N, "basis index {k} out of range for dimension {N}");
        let mut amps = [Complex::zero(); N];
        amps[k] = Complex::one();
        Self { amps }
    }

    pub fn amplitudes(&self) -> &[Complex<T>; N] {
        &self.amps
    }

    pub fn amplitude(&self, k: usize) -> Complex<T> {
        self.amps[k]
    }

    pub fn norm_sqr(&self) -> T {
        norm_sqr(&self.amps)
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    /// Zero-pads into a larger space, e.g. a qubit state into the Λ system.
    pub fn embed<const M: usize>(&self) -> PureState<T, M> {
        assert!(M >= N, "cannot embed dimension {N} into {M}");
        let mut amps = [Complex::zero(); M];
        amps[..N].copy_from_slice(&self.amps);
        PureState { amps }
    }

    /// Population outside the first `k` levels.
    pub fn population_beyond(&self, k: usize) -> T {
        self.amps[k..]
            .iter()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }
}

fn norm_sqr<T: Real>(amps: &[Complex<T>]) -> T {
    amps.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
}

/// |⟨a|b⟩|², clamped to [0, 1] against rounding.
pub fn overlap_probability<T: Real, const N: usize>(a: &PureState<T, N>, b: &PureState<T, N>) -> T {
    a.inner(b).norm_sqr().min(T::one()).max(T::zero())
}

/// Row-major dense `N × N` complex matrix.
///
/// Gate and propagator constructors return unitary values; the Hamiltonian
/// constructor reuses the container without that claim.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix<T, const N: usize> {
    rows: [[Complex<T>; N]; N],
}

impl<T: Real, const N: usize> Matrix<T, N> {
    pub fn zeros() -> Self {
        Self {
            rows: [[Complex::zero(); N]; N],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for k in 0..N {
            m.rows[k][k] = Complex::one();
        }
        m
    }

    pub fn from_rows(rows: [[Complex<T>; N]; N]) -> Result<Self> {
        if rows
            .iter()
            .flatten()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Self { rows })
    }

    /// Builds `|u⟩⟨v|`.
    pub fn outer(u: &[Complex<T>; N], v: &[Complex<T>; N]) -> Self {
        let mut m = Self::zeros();
        for r in 0..N {
            for c in 0..N {
                m.rows[r][c] = u[r] * v[c].conj();
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        self.rows[r][c]
    }

    pub fn rows(&self) -> &[[Complex<T>; N]; N] {
        &self.rows
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for r in 0..N {
            for c in 0..N {
                m.rows[c][r] = self.rows[r][c].conj();
            }
        }
        m
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let mut m = Self::zeros();
        for r in 0..N {
            for c in 0..N {
                let mut acc = Complex::zero();
                for k in 0..N {
                    acc = acc + self.rows[r][k] * rhs.rows[k][c];
                }
                m.rows[r][c] = acc;
            }
        }
        m
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            rows: self.rows.map(|row| row.map(|z| z * s)),
        }
    }

    /// `U·s`. Norm is preserved when `self` is unitary; the result is not
    /// renormalized so callers can observe the defect.
    pub fn apply(&self, s: &PureState<T, N>) -> PureState<T, N> {
        let mut amps = [Complex::zero(); N];
        for (r, out) in amps.iter_mut().enumerate() {
            *out = self.rows[r]
                .iter()
                .zip(s.amps.iter())
                .fold(Complex::zero(), |acc, (m, a)| acc + m * a);
        }
        PureState { amps }
    }

    /// ⟨u|M|v⟩ on raw amplitude arrays.
    pub fn sandwich(&self, u: &[Complex<T>; N], v: &[Complex<T>; N]) -> Complex<T> {
        let mut acc = Complex::zero();
        for r in 0..N {
            for c in 0..N {
                acc = acc + u[r].conj() * self.rows[r][c] * v[c];
            }
        }
        acc
    }

    /// max |M_rc − other_rc|
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.rows
            .iter()
            .flatten()
            .zip(other.rows.iter().flatten())
            .fold(T::zero(), |acc, (a, b)| acc.max((a - b).norm()))
    }

    /// max-entry |U†U − I|
    pub fn unitarity_defect(&self) -> T {
        self.adjoint().matmul(self).max_abs_diff(&Self::identity())
    }

    /// Hermiticity defect, max-entry |M − M†|.
    pub fn hermiticity_defect(&self) -> T {
        self.max_abs_diff(&self.adjoint())
    }

    /// Distance after removing the best global phase, estimated from the
    /// largest-modulus entry of `other`.
    pub fn phase_insensitive_diff(&self, other: &Self) -> T {
        let (mut best, mut idx) = (T::zero(), (0, 0));
        for r in 0..N {
            for c in 0..N {
                let n = other.rows[r][c].norm();
                if n > best {
                    best = n;
                    idx = (r, c);
                }
            }
        }
        let a = self.rows[idx.0][idx.1];
        let b = other.rows[idx.0][idx.1];
        if best == T::zero() || a.norm() == T::zero() {
            return self.max_abs_diff(other);
        }
        let phase = (b / a).unscale((b / a).norm());
        self.scale(phase).max_abs_diff(other)
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> Complex<T> {
        let mut a = self.rows;
        let mut det = Complex::<T>::one();
        for col in 0..N {
            let pivot = (col..N)
                .max_by(|&i, &j| {
                    a[i][col]
                        .norm()
                        .partial_cmp(&a[j][col].norm())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(col);
            if a[pivot][col].norm() == T::zero() {
                return Complex::zero();
            }
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            det = det * a[col][col];
            for r in col + 1..N {
                let factor = a[r][col] / a[col][col];
                for c in col..N {
                    let sub = factor * a[col][c];
                    a[r][c] = a[r][c] - sub;
                }
            }
        }
        det
    }

    /// Top-left `K × K` block.
    pub fn block<const K: usize>(&self) -> Matrix<T, K> {
        assert!(K <= N, "block {K} larger than matrix {N}");
        let mut m = Matrix::<T, K>::zeros();
        for r in 0..K {
            for c in 0..K {
                m.rows[r][c] = self.rows[r][c];
            }
        }
        m
    }
}

impl<T: Real, const N: usize> Mul for Matrix<T, N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.matmul(&rhs)
    }
}

impl<T: Real, const N: usize> Add for Matrix<T, N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for r in 0..N {
            for c in 0..N {
                self.rows[r][c] = self.rows[r][c] + rhs.rows[r][c];
            }
        }
        self
    }
}

impl<T: Real, const N: usize> Sub for Matrix<T, N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for r in 0..N {
            for c in 0..N {
                self.rows[r][c] = self.rows[r][c] - rhs.rows[r][c];
            }
        }
        self
    }
}
