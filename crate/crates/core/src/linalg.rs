//! Small dense complex linear-algebra helpers shared across modules.
//!
//! Everything here operates on `DMatrix<Complex64>` at the sizes this crate
//! uses (n <= 10); nalgebra provides LU/SVD/Schur, and the matrix exponential
//! is a scaling-and-squaring Padé(13) implementation kept independent of the
//! ODE machinery so the two can cross-validate.

use crate::scalar::C64;
use nalgebra::{DMatrix, DVector};

/// Eigenvalues of a general complex matrix, sorted by real part then imaginary part.
pub fn eigenvalues_sorted(a: &DMatrix<C64>) -> Vec<C64> {
    let mut ev: Vec<C64> = a
        .clone()
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .or_else(|| {
            // fall back to a higher iteration cap; matrices here are tiny
            a.clone()
                .try_schur(1e-14, 100_000)
                .and_then(|s| s.eigenvalues())
                .map(|v| v.iter().copied().collect())
        })
        .expect("eigenvalue iteration failed");
    ev.sort_by(|x, y| {
        x.re.partial_cmp(&y.re)
            .unwrap()
            .then(x.im.partial_cmp(&y.im).unwrap())
    });
    ev
}

/// Solve `A x = b` by LU with partial pivoting. Returns `None` when singular.
pub fn solve(a: &DMatrix<C64>, b: &DVector<C64>) -> Option<DVector<C64>> {
    a.clone().lu().solve(b)
}

/// Thin wrapper around the SVD carrying rank decisions.
pub struct RankRevealing {
    pub u: DMatrix<C64>,
    pub vt: DMatrix<C64>,
    pub singular_values: Vec<f64>,
    pub rank: usize,
}

impl RankRevealing {
    /// Decompose with relative rank tolerance `rel_tol * sigma_max`.
    pub fn new(a: &DMatrix<C64>, rel_tol: f64) -> Self {
        let svd = a.clone().svd(true, true);
        let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
        let smax = sv.iter().cloned().fold(0.0, f64::max);
        let thresh = rel_tol * smax.max(f64::MIN_POSITIVE);
        let rank = sv.iter().filter(|&&s| s > thresh).count();
        RankRevealing {
            u: svd.u.unwrap(),
            vt: svd.v_t.unwrap(),
            singular_values: sv,
            rank,
        }
    }

    pub fn nullity(&self) -> usize {
        self.vt.nrows() - self.rank
    }

    /// Orthonormal basis of the (right) null space, as matrix columns.
    pub fn kernel_basis(&self) -> DMatrix<C64> {
        let n = self.vt.ncols();
        let k = self.nullity();
        let mut out = DMatrix::zeros(n, k);
        for (j, row) in (self.rank..self.vt.nrows()).enumerate() {
            for i in 0..n {
                out[(i, j)] = self.vt[(row, i)].conj();
            }
        }
        out
    }

    /// Orthonormal basis of the orthogonal complement of the range (columns).
    pub fn corange_complement_basis(&self) -> DMatrix<C64> {
        let m = self.u.nrows();
        let k = self.u.ncols() - self.rank;
        let mut out = DMatrix::zeros(m, k);
        for (j, col) in (self.rank..self.u.ncols()).enumerate() {
            for i in 0..m {
                out[(i, j)] = self.u[(i, col)];
            }
        }
        out
    }

    /// Component of `b` orthogonal to the range of the decomposed matrix.
    pub fn range_defect(&self, b: &DVector<C64>) -> DVector<C64> {
        let w = self.corange_complement_basis();
        if w.ncols() == 0 {
            return DVector::zeros(b.len());
        }
        &w * (w.adjoint() * b)
    }

    /// Minimum-norm least-squares solution (pseudo-inverse applied to `b`).
    pub fn pinv_solve(&self, b: &DVector<C64>) -> DVector<C64> {
        let n = self.vt.ncols();
        let mut x = DVector::zeros(n);
        for r in 0..self.rank {
            let s = self.singular_values[r];
            // coefficient along u_r
            let mut coef = C64::new(0.0, 0.0);
            for i in 0..b.len() {
                coef += self.u[(i, r)].conj() * b[i];
            }
            coef /= s;
            for i in 0..n {
                x[i] += self.vt[(r, i)].conj() * coef;
            }
        }
        x
    }
}

/// Least-squares solve of an overdetermined complex system via SVD.
pub fn lstsq(a: &DMatrix<C64>, b: &DVector<C64>) -> DVector<C64> {
    RankRevealing::new(a, 1e-13).pinv_solve(b)
}

/// 2-norm condition number estimate from the SVD.
pub fn condition_number(a: &DMatrix<C64>) -> f64 {
    let sv = a.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if smin == 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

fn norm_inf(a: &DMatrix<C64>) -> f64 {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling-and-squaring with a Padé(13) approximant.
pub fn expm(a: &DMatrix<C64>) -> DMatrix<C64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    const THETA13: f64 = 5.371920351148152;
    let norm = norm_inf(a);
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let a = a.map(|z| z / C64::new(2f64.powi(s as i32), 0.0));

    // Padé(13) coefficients
    let b: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let id = DMatrix::<C64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let re = |x: f64| C64::new(x, 0.0);
    let u_inner = &a6 * re(b[13]) + &a4 * re(b[11]) + &a2 * re(b[9]);
    let u = &a * (&a6 * u_inner + &a6 * re(b[7]) + &a4 * re(b[5]) + &a2 * re(b[3]) + &id * re(b[1]));
    let v_inner = &a6 * re(b[12]) + &a4 * re(b[10]) + &a2 * re(b[8]);
    let v = &a6 * v_inner + &a6 * re(b[6]) + &a4 * re(b[4]) + &a2 * re(b[2]) + &id * re(b[0]);

    let num = &v + &u;
    let den = &v - &u;
    let mut r = den
        .lu()
        .solve(&num)
        .expect("Padé denominator singular in expm");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c64;

    #[test]
    fn expm_diagonal() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![c64(1.0, 0.0), c64(0.0, 2.0)]));
        let e = expm(&a);
        assert!((e[(0, 0)] - c64(1f64.exp(), 0.0)).norm() < 1e-14);
        let expected = c64(2f64.cos(), 2f64.sin());
        assert!((e[(1, 1)] - expected).norm() < 1e-14);
        assert!(e[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn expm_nilpotent() {
        // exp([[0,1],[0,0]]) = [[1,1],[0,1]]
        let a = DMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]);
        let e = expm(&a);
        assert!((e[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-15);
        assert!((e[(0, 1)] - c64(1.0, 0.0)).norm() < 1e-15);
        assert!((e[(1, 1)] - c64(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn expm_inverse_pairs() {
        // exp(A) exp(-A) = I for a random-ish complex matrix with large norm
        let a = DMatrix::from_row_slice(
            3,
            3,
            &[
                c64(2.0, 1.0),
                c64(-3.0, 0.5),
                c64(0.25, -1.0),
                c64(1.5, -2.0),
                c64(0.0, 4.0),
                c64(1.0, 1.0),
                c64(-0.5, 0.5),
                c64(2.0, -1.5),
                c64(-3.0, 0.0),
            ],
        );
        let e = expm(&a);
        let em = expm(&a.map(|z| -z));
        let prod = &e * &em;
        let id = DMatrix::<C64>::identity(3, 3);
        let err = (&prod - &id).map(|z| z.norm()).max();
        assert!(err < 1e-12, "err {err:e}");
    }

    #[test]
    fn rank_and_kernel() {
        // rank-1 matrix
        let a = DMatrix::from_row_slice(3, 3, &[
            c64(1.0, 0.0), c64(2.0, 0.0), c64(3.0, 0.0),
            c64(2.0, 0.0), c64(4.0, 0.0), c64(6.0, 0.0),
            c64(-1.0, 0.0), c64(-2.0, 0.0), c64(-3.0, 0.0),
        ]);
        let rr = RankRevealing::new(&a, 1e-10);
        assert_eq!(rr.rank, 1);
        assert_eq!(rr.nullity(), 2);
        let k = rr.kernel_basis();
        let prod = &a * &k;
        assert!(prod.map(|z| z.norm()).max() < 1e-12);
    }
}
