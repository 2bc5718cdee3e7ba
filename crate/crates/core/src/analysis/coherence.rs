use nalgebra::DMatrix;

use crate::error::{Error, Result};

fn normalize_columns(m: &DMatrix<f64>, offset: usize) -> Result<DMatrix<f64>> {
    let mut out = m.clone();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        let norm = col.norm();
        if !(norm > 0.0) {
            return Err(Error::ZeroColumn { index: offset + j });
        }
        col /= norm;
    }
    Ok(out)
}

/// Mutual coherence `√N · max |⟨ψ_k, φ_j⟩|` over unit-normalized columns.
///
/// Both arguments hold their vectors as columns of length `N`. To measure a
/// sensing matrix Φ (rows are the measurement vectors) pass `Φᵀ`. A zero
/// column of `psi` is reported with index `phi.ncols() + k`.
pub fn coherence(phi: &DMatrix<f64>, psi: &DMatrix<f64>) -> Result<f64> {
    if phi.nrows() != psi.nrows() {
        return Err(Error::DimensionMismatch {
            expected: phi.nrows(),
            actual: psi.nrows(),
        });
    }
    if phi.nrows() == 0 || phi.ncols() == 0 || psi.ncols() == 0 {
        return Err(Error::InvalidParameter("empty basis".into()));
    }
    let phi = normalize_columns(phi, 0)?;
    let psi = normalize_columns(psi, phi.ncols())?;
    let inner = phi.tr_mul(&psi);
    Ok((phi.nrows() as f64).sqrt() * inner.amax())
}

/// Orthonormal DCT-II basis of size `n`, one basis vector per column.
pub fn dct_basis(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, k| {
        let scale = if k == 0 {
            (1.0 / n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
        };
        scale * (std::f64::consts::PI * (i as f64 + 0.5) * k as f64 / n as f64).cos()
    })
}
