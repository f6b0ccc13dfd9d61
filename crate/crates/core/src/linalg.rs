//! Small dense matrix helpers for the linear sensor plant: matrix-vector
//! products, the characteristic polynomial, a Routh-Hurwitz stability test,
//! and a pivoted solve for the DC-gain diagnostic. Plants here are tiny
//! (n = 1..4), so nothing fancier than row-major `&[f64]` is warranted.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

/// y = A x for row-major square `a` of dimension `n`.
pub fn matvec(a: &[f64], x: &[f64], n: usize) -> Vec<f64> {
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            acc += a[i * n + j] * x[j];
        }
        y[i] = acc;
    }
    y
}

fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

fn trace(a: &[f64], n: usize) -> f64 {
    (0..n).map(|i| a[i * n + i]).sum()
}

/// Coefficients of det(sI - A) = s^n + c[1] s^(n-1) + ... + c[n], returned as
/// [1, c1, ..., cn] (Faddeev-LeVerrier).
pub fn char_poly(a: &[f64], n: usize) -> Vec<f64> {
    let mut coeffs = vec![1.0];
    let mut m = a.to_vec();
    for k in 1..=n {
        let c = -trace(&m, n) / k as f64;
        coeffs.push(c);
        if k < n {
            // M <- A (M + c I)
            let mut mc = m.clone();
            for i in 0..n {
                mc[i * n + i] += c;
            }
            m = matmul(a, &mc, n);
        }
    }
    coeffs
}

/// Routh-Hurwitz test on a monic polynomial given as [1, c1, ..., cn].
/// Returns true iff every root has strictly negative real part. A zero pivot
/// means a root on the imaginary axis (or worse) and fails the test.
pub fn is_hurwitz_poly(coeffs: &[f64]) -> bool {
    let n = coeffs.len() - 1;
    if n == 0 {
        return true;
    }
    // necessary condition: all coefficients strictly positive
    if coeffs.iter().any(|&c| !(c > 0.0) || !c.is_finite()) {
        return false;
    }
    // Routh array, two working rows
    let width = n / 2 + 1;
    let mut row0 = vec![0.0; width + 1];
    let mut row1 = vec![0.0; width + 1];
    for (i, &c) in coeffs.iter().enumerate() {
        if i % 2 == 0 {
            row0[i / 2] = c;
        } else {
            row1[i / 2] = c;
        }
    }
    for _ in 1..n {
        let pivot = row1[0];
        if pivot.abs() < 1e-300 {
            return false;
        }
        let mut next = vec![0.0; width + 1];
        for j in 0..width {
            next[j] = (row1[0] * row0[j + 1] - row0[0] * row1[j + 1]) / pivot;
        }
        if next[0] <= 0.0 {
            return false;
        }
        row0 = row1;
        row1 = next;
    }
    true
}

/// True iff all eigenvalues of the row-major `a` have negative real part.
pub fn is_hurwitz(a: &[f64], n: usize) -> bool {
    is_hurwitz_poly(&char_poly(a, n))
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
/// Returns None when A is singular to working precision.
pub fn solve(a: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if math::abs(m[r * n + col]) > math::abs(m[piv * n + col]) {
                piv = r;
            }
        }
        if math::abs(m[piv * n + col]) < 1e-300 {
            return None;
        }
        if piv != col {
            for j in 0..n {
                m.swap(col * n + j, piv * n + j);
            }
            x.swap(col, piv);
        }
        let d = m[col * n + col];
        for r in col + 1..n {
            let f = m[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                m[r * n + j] -= f * m[col * n + j];
            }
            x[r] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for j in col + 1..n {
            acc -= m[col * n + j] * x[j];
        }
        x[col] = acc / m[col * n + col];
    }
    Some(x)
}

/// c^T A^{-1} b, the quantity whose sign and size enter the singular
/// high-frequency gain k_p(z) = -Phi'(z) C A^{-1} B.
pub fn c_ainv_b(a: &[f64], b: &[f64], c: &[f64], n: usize) -> Option<f64> {
    let x = solve(a, b, n)?;
    Some(c.iter().zip(x.iter()).map(|(ci, xi)| ci * xi).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char_poly_of_2x2() {
        // [[-1,1],[1,1]]: det(sI-A) = s^2 + 0 s - 2
        let c = char_poly(&[-1.0, 1.0, 1.0, 1.0], 2);
        assert!((c[0] - 1.0).abs() < 1e-12);
        assert!(c[1].abs() < 1e-12);
        assert!((c[2] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn hurwitz_rejects_zero_matrix() {
        assert!(!is_hurwitz(&[0.0], 1));
    }

    #[test]
    fn hurwitz_rejects_example1_full_matrix() {
        // eigenvalues +-sqrt(2)
        assert!(!is_hurwitz(&[-1.0, 1.0, 1.0, 1.0], 2));
    }

    #[test]
    fn hurwitz_accepts_dc_motor() {
        assert!(is_hurwitz(&[-17.2], 1));
    }

    #[test]
    fn hurwitz_accepts_stable_3x3() {
        // upper-triangular, eigs -1, -2, -3
        let a = [-1.0, 4.0, 0.5, 0.0, -2.0, 1.0, 0.0, 0.0, -3.0];
        assert!(is_hurwitz(&a, 3));
    }

    #[test]
    fn hurwitz_rejects_marginal_oscillator() {
        // eigs +-i
        assert!(!is_hurwitz(&[0.0, 1.0, -1.0, 0.0], 2));
    }

    #[test]
    fn solve_and_dc_gain() {
        // motor: -C A^{-1} B = 3.9/17.2
        let g = c_ainv_b(&[-17.2], &[3.9], &[1.0], 1).unwrap();
        assert!((-g - 3.9 / 17.2).abs() < 1e-12);
        assert!(solve(&[0.0], &[1.0], 1).is_none());
    }

    #[test]
    fn solve_3x3_roundtrip() {
        let a = [2.0, 1.0, -1.0, -3.0, -1.0, 2.0, -2.0, 1.0, 2.0];
        let b = [8.0, -11.0, -3.0];
        let x = solve(&a, &b, 3).unwrap();
        let back = matvec(&a, &x, 3);
        for i in 0..3 {
            assert!((back[i] - b[i]).abs() < 1e-9);
        }
    }
}
