use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Largest number of columns accepted by the exhaustive search.
pub const MAX_COLUMNS: usize = 20;
/// Largest number of `k`-subsets accepted by the exhaustive search.
pub const MAX_SUBSETS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RipEstimate {
    pub k: usize,
    pub delta_k: f64,
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

/// Advances `idx` to the next k-combination of `0..n` in lexicographic
/// order; returns false after the last one.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for pos in (0..k).rev() {
        if idx[pos] < n - k + pos {
            idx[pos] += 1;
            for p in pos + 1..k {
                idx[p] = idx[p - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Restricted isometry constant `δ_k` by enumerating every `k`-column
/// submatrix Θ_S and taking the worst of `1 − λ_min` and `λ_max − 1` of
/// `Θ_Sᵀ Θ_S`.
pub fn rip_constant_bruteforce(theta: &DMatrix<f64>, k: usize) -> Result<RipEstimate> {
    let n = theta.ncols();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("need 1 <= k <= N = {n}, got {k}")));
    }
    if n > MAX_COLUMNS {
        return Err(Error::TooLarge(format!("N = {n} exceeds {MAX_COLUMNS}")));
    }
    let subsets = binomial(n, k);
    if subsets > MAX_SUBSETS {
        return Err(Error::TooLarge(format!(
            "C({n}, {k}) = {subsets} subsets exceeds {MAX_SUBSETS}"
        )));
    }
    let gram = DMatrix::from_fn(n, n, |i, j| theta.column(i).dot(&theta.column(j)));
    let mut idx: Vec<usize> = (0..k).collect();
    let mut delta = 0.0f64;
    loop {
        let sub = DMatrix::from_fn(k, k, |a, b| gram[(idx[a], idx[b])]);
        let eig = SymmetricEigen::new(sub).eigenvalues;
        let lo = eig.min();
        let hi = eig.max();
        delta = delta.max(1.0 - lo).max(hi - 1.0);
        if !next_combination(&mut idx, n) {
            break;
        }
    }
    Ok(RipEstimate { k, delta_k: delta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_are_complete() {
        let mut idx = vec![0, 1];
        let mut count = 1;
        while next_combination(&mut idx, 5) {
            count += 1;
        }
        assert_eq!(count, 10);
        assert_eq!(binomial(20, 10), 184_756);
    }

    #[test]
    fn orthogonal_matrix_is_isometry() {
        let m = DMatrix::from_fn(6, 6, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0);
        let q = m.qr().q();
        for k in 1..=6 {
            let est = rip_constant_bruteforce(&q, k).unwrap();
            assert!(est.delta_k < 1e-12, "k={k}: {}", est.delta_k);
        }
    }

    #[test]
    fn scaled_identity() {
        let two = DMatrix::<f64>::identity(4, 4) * 2.0;
        assert_eq!(rip_constant_bruteforce(&two, 1).unwrap().delta_k, 3.0);
    }

    #[test]
    fn guards() {
        let wide = DMatrix::<f64>::zeros(2, 21);
        assert!(matches!(rip_constant_bruteforce(&wide, 1), Err(Error::TooLarge(_))));
        let ok = DMatrix::<f64>::identity(20, 20);
        assert_eq!(rip_constant_bruteforce(&ok, 2).unwrap().delta_k, 0.0);
        assert!(rip_constant_bruteforce(&ok, 0).is_err());
        assert!(rip_constant_bruteforce(&DMatrix::<f64>::identity(3, 3), 4).is_err());
    }
}
