//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

/// Smallest eigenvalue of the symmetric part of `a`.
pub fn min_sym_eig(a: &DMatrix<f64>) -> f64 {
    let s = sym_part(a);
    s.symmetric_eigenvalues().min()
}

/// Largest eigenvalue of the symmetric part of `a`.
pub fn max_sym_eig(a: &DMatrix<f64>) -> f64 {
    let s = sym_part(a);
    s.symmetric_eigenvalues().max()
}

/// max(|λ_min|, |λ_max|) of a symmetric matrix.
pub fn sym_spectral_radius(a: &DMatrix<f64>) -> f64 {
    let ev = sym_part(a).symmetric_eigenvalues();
    ev.iter().fold(0.0_f64, |acc, e| acc.max(e.abs()))
}

/// Operator 2-norm (largest singular value).
pub fn op_norm(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().singular_values().max()
}

pub fn sym_part(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

pub fn is_symmetric(a: &DMatrix<f64>, tol: f64) -> bool {
    a.nrows() == a.ncols() && (a - a.transpose()).amax() <= tol * (1.0 + a.amax())
}

/// ⟨A η, η⟩ for a symmetric matrix.
pub fn quad_form(a: &DMatrix<f64>, eta: &DVector<f64>) -> f64 {
    eta.dot(&(a * eta))
}

/// Matrix exponential. nalgebra uses a Padé approximant with scaling and squaring.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    a.clone().exp()
}

/// The m×m matrix with +1 at (2k, 2k+1) and −1 at (2k+1, 2k); antisymmetric with norm ≤ 1.
pub fn block_rotation(m: usize) -> DMatrix<f64> {
    let mut k = DMatrix::zeros(m, m);
    let mut i = 0;
    while i + 1 < m {
        k[(i, i + 1)] = 1.0;
        k[(i + 1, i)] = -1.0;
        i += 2;
    }
    k
}

/// The m×m exchange matrix (reverses coordinates); symmetric with eigenvalues ±1.
pub fn swap_matrix(m: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m, m, |i, j| if i + j + 1 == m { 1.0 } else { 0.0 })
}
