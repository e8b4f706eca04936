//! Small dense Hermitian eigenproblems by cyclic Jacobi rotations.
//!
//! Jacobi keeps small eigenvalues of graded matrices accurate relative to
//! their own block rather than to the largest entry, which matters for
//! partial transposes whose negative eigenvalue is O(ε²) next to an O(1)
//! ground-state population.

use num_complex::Complex;

use crate::scalar::Real;

pub type Matrix<T, const N: usize> = [[Complex<T>; N]; N];

#[derive(Debug, Clone, Copy)]
pub struct Eigen<T, const N: usize> {
    /// Ascending.
    pub values: [T; N],
    /// Column `j` is the eigenvector for `values[j]`.
    pub vectors: Matrix<T, N>,
}

pub fn zero<T: Real, const N: usize>() -> Matrix<T, N> {
    [[Complex::new(T::zero(), T::zero()); N]; N]
}

pub fn identity<T: Real, const N: usize>() -> Matrix<T, N> {
    let mut m = zero();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex::new(T::one(), T::zero());
    }
    m
}

pub fn hermitian_eigen<T: Real, const N: usize>(input: &Matrix<T, N>) -> Eigen<T, N> {
    let mut a = *input;
    // symmetrize and make the diagonal exactly real
    for i in 0..N {
        a[i][i] = Complex::new(a[i][i].re, T::zero());
        for j in (i + 1)..N {
            let avg = (a[i][j] + a[j][i].conj()) * T::of(0.5);
            a[i][j] = avg;
            a[j][i] = avg.conj();
        }
    }
    let mut v: Matrix<T, N> = identity();
    let eps = T::epsilon();

    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[p][q];
                let r = apq.norm();
                if r == T::zero() {
                    continue;
                }
                let app = a[p][p].re;
                let aqq = a[q][q].re;
                if r <= eps * T::of(0.5) * (app.abs() * aqq.abs()).sqrt() && (app != T::zero() || aqq != T::zero()) {
                    a[p][q] = Complex::new(T::zero(), T::zero());
                    a[q][p] = Complex::new(T::zero(), T::zero());
                    continue;
                }
                rotated = true;
                let phase = apq / r;
                let theta = (aqq - app) / (T::of(2.0) * r);
                let t = if theta >= T::zero() {
                    T::one() / (theta + (theta * theta + T::one()).sqrt())
                } else {
                    -T::one() / (-theta + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                // G = diag(1, conj(phase)) · [[c, s], [-s, c]]
                let g_pp = Complex::new(c, T::zero());
                let g_pq = Complex::new(s, T::zero());
                let g_qp = phase.conj() * (-s);
                let g_qq = phase.conj() * c;
                for row in a.iter_mut() {
                    let xp = row[p];
                    let xq = row[q];
                    row[p] = xp * g_pp + xq * g_qp;
                    row[q] = xp * g_pq + xq * g_qq;
                }
                for k in 0..N {
                    let xp = a[p][k];
                    let xq = a[q][k];
                    a[p][k] = g_pp.conj() * xp + g_qp.conj() * xq;
                    a[q][k] = g_pq.conj() * xp + g_qq.conj() * xq;
                }
                a[p][q] = Complex::new(T::zero(), T::zero());
                a[q][p] = Complex::new(T::zero(), T::zero());
                a[p][p] = Complex::new(app - t * r, T::zero());
                a[q][q] = Complex::new(aqq + t * r, T::zero());
                for row in v.iter_mut() {
                    let xp = row[p];
                    let xq = row[q];
                    row[p] = xp * g_pp + xq * g_qp;
                    row[q] = xp * g_pq + xq * g_qq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&i, &j| a[i][i].re.partial_cmp(&a[j][j].re).unwrap_or(std::cmp::Ordering::Equal));
    let mut values = [T::zero(); N];
    let mut vectors = zero();
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = a[src][src].re;
        for k in 0..N {
            vectors[k][dst] = v[k][src];
        }
    }
    Eigen { values, vectors }
}

/// Real symmetric convenience wrapper; eigenvectors are returned as rows.
pub fn symmetric_eigen<T: Real, const N: usize>(input: &[[T; N]; N]) -> ([T; N], [[T; N]; N]) {
    let mut m = zero::<T, N>();
    for i in 0..N {
        for j in 0..N {
            m[i][j] = Complex::new(input[i][j], T::zero());
        }
    }
    let e = hermitian_eigen(&m);
    let mut vecs = [[T::zero(); N]; N];
    for (j, vec) in vecs.iter_mut().enumerate() {
        for (k, slot) in vec.iter_mut().enumerate() {
            *slot = e.vectors[k][j].re;
        }
    }
    (e.values, vecs)
}

pub fn matmul<T: Real, const N: usize>(x: &Matrix<T, N>, y: &Matrix<T, N>) -> Matrix<T, N> {
    let mut out = zero();
    for i in 0..N {
        for j in 0..N {
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in 0..N {
                acc = acc + x[i][k] * y[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn trace<T: Real, const N: usize>(x: &Matrix<T, N>) -> Complex<T> {
    (0..N).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + x[i][i])
}
