//! Dense rational matrices for constant frame metrics.

use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::expr::Rational;

pub type Matrix = Vec<Vec<Rational>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect()
}

pub fn is_square(m: &Matrix, n: usize) -> bool {
    m.len() == n && m.iter().all(|row| row.len() == n)
}

pub fn is_symmetric(m: &Matrix) -> bool {
    (0..m.len()).all(|i| (0..i).all(|j| m[i][j] == m[j][i]))
}

pub fn determinant(m: &Matrix) -> Rational {
    let n = m.len();
    let mut a = m.clone();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            let factor = &a[r][col] / &p;
            if factor.is_zero() {
                continue;
            }
            let pivot_row = a[col].clone();
            for (x, pc) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= &factor * pc;
            }
        }
    }
    det
}

/// Sylvester's criterion.
pub fn is_positive_definite(m: &Matrix) -> bool {
    (1..=m.len()).all(|k| {
        let minor: Matrix = m[..k].iter().map(|row| row[..k].to_vec()).collect();
        determinant(&minor) > Rational::zero()
    })
}

/// Gauss-Jordan inverse; `None` for singular input.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a: Matrix = m
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(pivot, col);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x /= &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            let pivot_row = a[col].clone();
            for (x, pc) in a[r].iter_mut().zip(&pivot_row) {
                *x -= &factor * pc;
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{int, ratio};
    use alloc::vec;

    #[test]
    fn inverse_and_determinant() {
        let m = vec![vec![int(2), int(1)], vec![int(1), int(1)]];
        assert_eq!(determinant(&m), int(1));
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, vec![vec![int(1), int(-1)], vec![int(-1), int(2)]]);
        assert!(is_positive_definite(&m));
        let bad = vec![vec![int(1), int(2)], vec![int(2), int(1)]];
        assert!(!is_positive_definite(&bad));
        let sing = vec![vec![int(1), ratio(1, 2)], vec![int(2), int(1)]];
        assert!(inverse(&sing).is_none());
    }
}
