//! Dense complex LU factorisation with partial pivoting for small fixed-size
//! systems.

use num_complex::Complex64;

pub type Matrix<const N: usize> = [[Complex64; N]; N];

/// `P A = L U`, with `L` unit lower triangular stored below the diagonal.
#[derive(Debug, Clone)]
pub struct Lu<const N: usize> {
    lu: Matrix<N>,
    perm: [usize; N],
    singular: bool,
}

impl<const N: usize> Lu<N> {
    pub fn factor(a: &Matrix<N>) -> Self {
        let mut lu = *a;
        let mut perm = [0usize; N];
        for (i, p) in perm.iter_mut().enumerate() {
            *p = i;
        }
        let mut singular = false;
        for k in 0..N {
            let (pivot_row, pivot_abs) = (k..N)
                .map(|r| (r, lu[r][k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_abs == 0.0 {
                singular = true;
                continue;
            }
            if pivot_row != k {
                lu.swap(pivot_row, k);
                perm.swap(pivot_row, k);
            }
            let pivot = lu[k][k];
            for r in k + 1..N {
                let factor = lu[r][k] / pivot;
                lu[r][k] = factor;
                for c in k + 1..N {
                    let u = lu[k][c];
                    lu[r][c] -= factor * u;
                }
            }
        }
        Self { lu, perm, singular }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn solve(&self, b: &[Complex64; N]) -> [Complex64; N] {
        let mut x = [Complex64::new(0.0, 0.0); N];
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = b[self.perm[i]];
        }
        for i in 0..N {
            for j in 0..i {
                let l = self.lu[i][j];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..N).rev() {
            for j in i + 1..N {
                let u = self.lu[i][j];
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] /= self.lu[i][i];
        }
        x
    }

    /// `||A^{-1}||_1`, from the explicit inverse (cheap at this size).
    pub fn inverse_norm1(&self) -> f64 {
        if self.singular {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for j in 0..N {
            let mut e = [Complex64::new(0.0, 0.0); N];
            e[j] = Complex64::new(1.0, 0.0);
            let col = self.solve(&e);
            worst = worst.max(col.iter().map(|z| z.norm()).sum());
        }
        worst
    }
}

pub fn norm1<const N: usize>(a: &Matrix<N>) -> f64 {
    (0..N)
        .map(|j| (0..N).map(|i| a[i][j].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn mat_vec<const N: usize>(a: &Matrix<N>, x: &[Complex64; N]) -> [Complex64; N] {
    let mut out = [Complex64::new(0.0, 0.0); N];
    for (i, o) in out.iter_mut().enumerate() {
        *o = a[i].iter().zip(x).map(|(aij, xj)| aij * xj).sum();
    }
    out
}

/// `max_i |(A x - b)_i|`.
pub fn residual<const N: usize>(a: &Matrix<N>, x: &[Complex64; N], b: &[Complex64; N]) -> f64 {
    mat_vec(a, x)
        .iter()
        .zip(b)
        .map(|(ax, bi)| (ax - bi).norm())
        .fold(0.0, f64::max)
}
