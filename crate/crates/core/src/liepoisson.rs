//! Lie-Poisson structures of e(3) and e(4), quadratic Hamiltonians, and the
//! named model cases.
//!
//! Conventions:
//! - e(3)* coordinates are ordered (M1, M2, M3, p1, p2, p3) with
//!   {M_i, M_j} = -eps_{ijk} M_k, {M_i, p_j} = -eps_{ijk} p_k, {p_i, p_j} = 0.
//! - e(4)* coordinates are (M12, M13, M14, M23, M24, M34, p1, p2, p3, p4) with
//!   {M_ij, M_kl} = d_ik M_jl + d_jl M_ik - d_il M_jk - d_jk M_il and
//!   {M_ij, p_k} = d_ik p_j - d_jk p_i.
//! - A Hamiltonian is stored as the symmetric matrix S of the quadratic form
//!   H(x) = x^T S x / 2, so the analytic gradient is exactly S x.
//!
//! Equations of motion are always generated from the structure tensor and S;
//! the systems displayed in the source material serve only as test oracles
//! (see [`displayed_field_discrepancies`]).

use crate::scalar::{c64, C64};
use nalgebra::{DMatrix, DVector};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    E3,
    E4,
}

impl Dim {
    pub fn size(self) -> usize {
        match self {
            Dim::E3 => 6,
            Dim::E4 => 10,
        }
    }

    pub fn coord_names(self) -> &'static [&'static str] {
        match self {
            Dim::E3 => &["M1", "M2", "M3", "p1", "p2", "p3"],
            Dim::E4 => &["M12", "M13", "M14", "M23", "M24", "M34", "p1", "p2", "p3", "p4"],
        }
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dim::E3 => write!(f, "e(3)"),
            Dim::E4 => write!(f, "e(4)"),
        }
    }
}

#[derive(Debug, Error)]
pub enum LieError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(Dim, Dim),
    #[error("model validation failed: {condition}")]
    Validation { condition: String },
    #[error("non-finite entries in state")]
    NonFinite,
}

/// Index pairs (i, j), 1-based, for the six independent entries of an
/// antisymmetric 4x4 matrix, in storage order.
pub const E4_PAIRS: [(usize, usize); 6] = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];

fn e4_pair_index(i: usize, j: usize) -> Option<(usize, f64)> {
    if i == j {
        return None;
    }
    let (a, b, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
    E4_PAIRS
        .iter()
        .position(|&(x, y)| (x, y) == (a, b))
        .map(|k| (k, sign))
}

/// A point of e(3)* or e(4)*. E4 stores the six independent M entries, so
/// antisymmetry of the expanded matrix holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    dim: Dim,
    x: DVector<C64>,
}

impl PhaseState {
    pub fn e3(m: [C64; 3], p: [C64; 3]) -> Self {
        let x = DVector::from_vec(vec![m[0], m[1], m[2], p[0], p[1], p[2]]);
        assert!(x.iter().all(|z| z.re.is_finite() && z.im.is_finite()), "non-finite entry");
        PhaseState { dim: Dim::E3, x }
    }

    /// m is ordered (M12, M13, M14, M23, M24, M34).
    pub fn e4(m: [C64; 6], p: [C64; 4]) -> Self {
        let mut v = m.to_vec();
        v.extend_from_slice(&p);
        let x = DVector::from_vec(v);
        assert!(x.iter().all(|z| z.re.is_finite() && z.im.is_finite()), "non-finite entry");
        PhaseState { dim: Dim::E4, x }
    }

    pub fn zero(dim: Dim) -> Self {
        PhaseState {
            dim,
            x: DVector::zeros(dim.size()),
        }
    }

    pub fn from_vector(dim: Dim, x: DVector<C64>) -> Result<Self, LieError> {
        if x.len() != dim.size() {
            return Err(LieError::DimensionMismatch(dim, dim));
        }
        if !x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(LieError::NonFinite);
        }
        Ok(PhaseState { dim, x })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn coords(&self) -> &DVector<C64> {
        &self.x
    }

    pub fn coord(&self, i: usize) -> C64 {
        self.x[i]
    }

    /// Expanded antisymmetric M matrix (E4) or the hat matrix of M (E3).
    pub fn m_matrix(&self) -> DMatrix<C64> {
        match self.dim {
            Dim::E3 => {
                let (m1, m2, m3) = (self.x[0], self.x[1], self.x[2]);
                let z = c64(0.0, 0.0);
                DMatrix::from_row_slice(3, 3, &[z, -m3, m2, m3, z, -m1, -m2, m1, z])
            }
            Dim::E4 => {
                let mut m = DMatrix::zeros(4, 4);
                for (k, &(i, j)) in E4_PAIRS.iter().enumerate() {
                    m[(i - 1, j - 1)] = self.x[k];
                    m[(j - 1, i - 1)] = -self.x[k];
                }
                m
            }
        }
    }

    pub fn p_vector(&self) -> DVector<C64> {
        match self.dim {
            Dim::E3 => self.x.rows(3, 3).into_owned(),
            Dim::E4 => self.x.rows(6, 4).into_owned(),
        }
    }
}

/// Sparse structure tensor entries: pi^{ab}(x) = sum coeff * x_c over (a, b, c, coeff).
fn structure_terms(dim: Dim) -> Vec<(usize, usize, usize, f64)> {
    let mut t = Vec::new();
    match dim {
        Dim::E3 => {
            let eps = |i: usize, j: usize, k: usize| -> f64 {
                match (i, j, k) {
                    (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
                    (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
                    _ => 0.0,
                }
            };
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        let e = eps(i, j, k);
                        if e != 0.0 {
                            // {M_i, M_j} = -eps_{ijk} M_k
                            t.push((i, j, k, -e));
                            // {M_i, p_j} = -eps_{ijk} p_k and antisymmetric partner
                            t.push((i, 3 + j, 3 + k, -e));
                            t.push((3 + j, i, 3 + k, e));
                        }
                    }
                }
            }
        }
        Dim::E4 => {
            let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
            // {M_ij, M_kl}
            for (a, &(i, j)) in E4_PAIRS.iter().enumerate() {
                for (b, &(k, l)) in E4_PAIRS.iter().enumerate() {
                    for (idx1, idx2, sign) in [
                        (j, l, d(i, k)),
                        (i, k, d(j, l)),
                        (j, k, -d(i, l)),
                        (i, l, -d(j, k)),
                    ] {
                        if sign != 0.0 {
                            if let Some((c, s)) = e4_pair_index(idx1, idx2) {
                                t.push((a, b, c, sign * s));
                            }
                        }
                    }
                }
                // {M_ij, p_k} = d_ik p_j - d_jk p_i
                for k in 1..=4 {
                    let b = 5 + k;
                    if i == k {
                        t.push((a, b, 5 + j, 1.0));
                        t.push((b, a, 5 + j, -1.0));
                    }
                    if j == k {
                        t.push((a, b, 5 + i, -1.0));
                        t.push((b, a, 5 + i, 1.0));
                    }
                }
            }
        }
    }
    t
}

/// Dense Poisson tensor pi(x).
pub fn poisson_matrix(dim: Dim, x: &DVector<C64>) -> DMatrix<C64> {
    let n = dim.size();
    let mut pi = DMatrix::zeros(n, n);
    for &(a, b, c, coeff) in structure_terms(dim).iter() {
        pi[(a, b)] += x[c] * coeff;
    }
    pi
}

/// A homogeneous quadratic vector field x'_a = x^T Q_a x, generated from a
/// Hamiltonian quadratic form S and the structure tensor.
#[derive(Debug, Clone)]
pub struct QuadraticField {
    dim: Dim,
    q: Vec<DMatrix<C64>>,
}

impl QuadraticField {
    pub fn from_hamiltonian(dim: Dim, s: &DMatrix<C64>) -> Self {
        let n = dim.size();
        assert_eq!(s.nrows(), n);
        let mut q = vec![DMatrix::<C64>::zeros(n, n); n];
        for &(a, b, c, coeff) in structure_terms(dim).iter() {
            // x'_a = pi^{ab}(x) (Sx)_b = sum_c coeff x_c sum_d S_{bd} x_d
            for d in 0..n {
                q[a][(c, d)] += s[(b, d)] * coeff;
            }
        }
        QuadraticField { dim, q }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn eval(&self, x: &DVector<C64>) -> DVector<C64> {
        let n = self.dim.size();
        let mut out = DVector::zeros(n);
        for a in 0..n {
            let qa = &self.q[a];
            let mut acc = c64(0.0, 0.0);
            for c in 0..n {
                if x[c] == c64(0.0, 0.0) {
                    continue;
                }
                let mut row = c64(0.0, 0.0);
                for d in 0..n {
                    row += qa[(c, d)] * x[d];
                }
                acc += x[c] * row;
            }
            out[a] = acc;
        }
        out
    }

    /// Generic-scalar evaluation used by the extended-precision integrator.
    pub fn eval_generic<S: crate::scalar::PhaseScalar>(&self, x: &[S]) -> Vec<S> {
        let n = self.dim.size();
        let mut out = vec![S::zero(); n];
        for a in 0..n {
            let qa = &self.q[a];
            let mut acc = S::zero();
            for c in 0..n {
                let mut row = S::zero();
                for d in 0..n {
                    let coef = qa[(c, d)];
                    if coef != c64(0.0, 0.0) {
                        row = row + S::from_c64(coef) * x[d];
                    }
                }
                acc = acc + x[c] * row;
            }
            out[a] = acc;
        }
        out
    }

    /// Exact Jacobian Df(x).
    pub fn jacobian(&self, x: &DVector<C64>) -> DMatrix<C64> {
        let n = self.dim.size();
        let mut j = DMatrix::zeros(n, n);
        for a in 0..n {
            let qa = &self.q[a];
            for e in 0..n {
                let mut acc = c64(0.0, 0.0);
                for c in 0..n {
                    acc += (qa[(e, c)] + qa[(c, e)]) * x[c];
                }
                j[(a, e)] = acc;
            }
        }
        j
    }

    /// Symmetric bilinear form Q(u, v) with Q(x, x) = f(x).
    pub fn bilinear(&self, u: &DVector<C64>, v: &DVector<C64>) -> DVector<C64> {
        let n = self.dim.size();
        let mut out = DVector::zeros(n);
        for a in 0..n {
            let qa = &self.q[a];
            let mut acc = c64(0.0, 0.0);
            for c in 0..n {
                for d in 0..n {
                    acc += qa[(c, d)] * (u[c] * v[d] + v[c] * u[d]) * 0.5;
                }
            }
            out[a] = acc;
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Observables
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservableKind {
    Hamiltonian,
    Casimir,
    FirstIntegral,
    InvariantRelation,
}

type EvalFn = Arc<dyn Fn(&DVector<C64>) -> C64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&DVector<C64>) -> DVector<C64> + Send + Sync>;

/// Named function on phase space with an analytic gradient.
#[derive(Clone)]
pub struct Observable {
    pub name: String,
    pub kind: ObservableKind,
    dim: Dim,
    eval: EvalFn,
    grad: GradFn,
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Observable({}, {:?}, {:?})", self.name, self.kind, self.dim)
    }
}

impl Observable {
    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn eval(&self, x: &PhaseState) -> C64 {
        (self.eval)(x.coords())
    }

    pub fn gradient(&self, x: &PhaseState) -> DVector<C64> {
        (self.grad)(x.coords())
    }

    pub fn eval_raw(&self, x: &DVector<C64>) -> C64 {
        (self.eval)(x)
    }

    pub fn gradient_raw(&self, x: &DVector<C64>) -> DVector<C64> {
        (self.grad)(x)
    }

    /// Coordinate function x_i.
    pub fn coordinate(dim: Dim, i: usize, kind: ObservableKind) -> Observable {
        let n = dim.size();
        assert!(i < n);
        let name = dim.coord_names()[i].to_string();
        Observable {
            name,
            kind,
            dim,
            eval: Arc::new(move |x| x[i]),
            grad: Arc::new(move |_| {
                let mut g = DVector::zeros(n);
                g[i] = c64(1.0, 0.0);
                g
            }),
        }
    }

    /// Linear function v^T x.
    pub fn linear(dim: Dim, v: DVector<C64>, name: &str, kind: ObservableKind) -> Observable {
        let v2 = v.clone();
        Observable {
            name: name.to_string(),
            kind,
            dim,
            eval: Arc::new(move |x| v.dot(x)),
            grad: Arc::new(move |_| v2.clone()),
        }
    }

    /// Quadratic form F(x) = x^T S x / 2 with gradient S x.
    pub fn quadratic(dim: Dim, s: DMatrix<C64>, name: &str, kind: ObservableKind) -> Observable {
        let s2 = s.clone();
        Observable {
            name: name.to_string(),
            kind,
            dim,
            eval: Arc::new(move |x| (x.transpose() * &s * x)[(0, 0)] * 0.5),
            grad: Arc::new(move |x| &s2 * x),
        }
    }

    /// F(x) = sum coef_i q_i(x)^2 where q_i(x) = x^T S_i x / 2.
    pub fn sum_of_squares(
        dim: Dim,
        terms: Vec<(C64, DMatrix<C64>)>,
        name: &str,
        kind: ObservableKind,
    ) -> Observable {
        let terms2 = terms.clone();
        Observable {
            name: name.to_string(),
            kind,
            dim,
            eval: Arc::new(move |x| {
                terms
                    .iter()
                    .map(|(c, s)| {
                        let q = (x.transpose() * s * x)[(0, 0)] * 0.5;
                        *c * q * q
                    })
                    .sum()
            }),
            grad: Arc::new(move |x| {
                let mut g = DVector::zeros(x.len());
                for (c, s) in terms2.iter() {
                    let q = (x.transpose() * s * x)[(0, 0)] * 0.5;
                    g += (s * x) * (*c * q * 2.0);
                }
                g
            }),
        }
    }
}

/// Lie-Poisson bracket {F, G}(x) from the structure tensor and the analytic
/// gradients of the observables.
pub fn bracket(f: &Observable, g: &Observable, x: &PhaseState) -> Result<C64, LieError> {
    if f.dim() != x.dim() {
        return Err(LieError::DimensionMismatch(f.dim(), x.dim()));
    }
    if g.dim() != x.dim() {
        return Err(LieError::DimensionMismatch(g.dim(), x.dim()));
    }
    let pi = poisson_matrix(x.dim(), x.coords());
    let gf = f.gradient(x);
    let gg = g.gradient(x);
    Ok((gf.transpose() * pi * gg)[(0, 0)])
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

/// Full coefficient list of the four-dimensional Chaplygin Hamiltonian.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ChaplyginE4Coeffs {
    pub a1212: C64,
    pub a1313: C64,
    pub a3434: C64,
    pub a1234: C64,
    pub a1213: C64,
    pub a1214: C64,
    pub a1223: C64,
    pub a1224: C64,
    pub a1334: C64,
    pub a1434: C64,
    pub a2334: C64,
    pub a2434: C64,
    pub b121: C64,
    pub b122: C64,
    pub b123: C64,
    pub b124: C64,
    pub b341: C64,
    pub b342: C64,
    pub b343: C64,
    pub b344: C64,
    pub c11: C64,
    pub c33: C64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelCase {
    GenericE3 {
        a: DMatrix<C64>,
        b: DMatrix<C64>,
        c: DMatrix<C64>,
    },
    KirchhoffE3 {
        a1: C64,
        a3: C64,
        b1: C64,
        b3: C64,
        c1: C64,
        c3: C64,
    },
    ChaplyginE3 {
        a1: C64,
        a3: C64,
        a13: C64,
        b1: C64,
        b3: C64,
        c1: C64,
        c3: C64,
    },
    KirchhoffE4 {
        a1212: C64,
        a1313: C64,
        a3434: C64,
        a1234: C64,
        c11: C64,
        c33: C64,
    },
    ChaplyginE4(ChaplyginE4Coeffs),
}

impl ModelCase {
    pub fn label(&self) -> &'static str {
        match self {
            ModelCase::GenericE3 { .. } => "generic_e3",
            ModelCase::KirchhoffE3 { .. } => "kirchhoff_e3",
            ModelCase::ChaplyginE3 { .. } => "chaplygin_e3",
            ModelCase::KirchhoffE4 { .. } => "kirchhoff_e4",
            ModelCase::ChaplyginE4(_) => "chaplygin_e4",
        }
    }
}

/// A validated model: dimension tag, case parameters, and the quadratic form
/// split S = S0 + eps * S1 with the generated fields of all three pieces.
#[derive(Debug, Clone)]
pub struct KirchhoffModel {
    dim: Dim,
    case: ModelCase,
    s_total: DMatrix<C64>,
    s_unperturbed: DMatrix<C64>,
    s_perturbation: DMatrix<C64>,
    epsilon: C64,
    field: QuadraticField,
    field0: QuadraticField,
    field1: QuadraticField,
}

fn e3_block_matrix(a: &DMatrix<C64>, b: &DMatrix<C64>, c: &DMatrix<C64>) -> DMatrix<C64> {
    let mut s = DMatrix::zeros(6, 6);
    for i in 0..3 {
        for j in 0..3 {
            s[(i, j)] = a[(i, j)];
            s[(i, 3 + j)] = b[(i, j)];
            s[(3 + i, j)] = b[(j, i)];
            s[(3 + i, 3 + j)] = c[(i, j)];
        }
    }
    s
}

fn diag3(d1: C64, d2: C64, d3: C64) -> DMatrix<C64> {
    DMatrix::from_diagonal(&DVector::from_vec(vec![d1, d2, d3]))
}

impl KirchhoffModel {
    fn assemble(
        dim: Dim,
        case: ModelCase,
        s_unperturbed: DMatrix<C64>,
        s_perturbation: DMatrix<C64>,
        epsilon: C64,
    ) -> Self {
        let s_total = &s_unperturbed + &s_perturbation * epsilon;
        let field = QuadraticField::from_hamiltonian(dim, &s_total);
        let field0 = QuadraticField::from_hamiltonian(dim, &s_unperturbed);
        let field1 = QuadraticField::from_hamiltonian(dim, &s_perturbation);
        KirchhoffModel {
            dim,
            case,
            s_total,
            s_unperturbed,
            s_perturbation,
            epsilon,
            field,
            field0,
            field1,
        }
    }

    /// General e(3) model from symmetric A, B, C blocks.
    pub fn generic_e3(
        a: DMatrix<C64>,
        b: DMatrix<C64>,
        c: DMatrix<C64>,
    ) -> Result<Self, LieError> {
        for (name, m) in [("A", &a), ("B", &b), ("C", &c)] {
            if m.nrows() != 3 || m.ncols() != 3 {
                return Err(LieError::Validation {
                    condition: format!("{name} must be 3x3"),
                });
            }
            if (m - m.transpose()).map(|z| z.norm()).max() > 1e-14 {
                return Err(LieError::Validation {
                    condition: format!("{name} must be symmetric"),
                });
            }
        }
        let s = e3_block_matrix(&a, &b, &c);
        Ok(Self::assemble(
            Dim::E3,
            ModelCase::GenericE3 { a, b, c },
            s,
            DMatrix::zeros(6, 6),
            c64(0.0, 0.0),
        ))
    }

    /// Axially symmetric case A = diag(a1,a1,a3), B = diag(b1,b1,b3),
    /// C = diag(c1,c1,c3); the perturbation parameter is eps = b3 - b1 and the
    /// split isolates the mixed term M3 p3 (the b1 part is a Casimir multiple).
    pub fn kirchhoff_e3(a1: C64, a3: C64, b1: C64, b3: C64, c1: C64, c3: C64) -> Result<Self, LieError> {
        let a = diag3(a1, a1, a3);
        let b0 = diag3(b1, b1, b1);
        let c = diag3(c1, c1, c3);
        let s0 = e3_block_matrix(&a, &b0, &c);
        // S1: H1 = M3 p3
        let mut s1 = DMatrix::zeros(6, 6);
        s1[(2, 5)] = c64(1.0, 0.0);
        s1[(5, 2)] = c64(1.0, 0.0);
        Ok(Self::assemble(
            Dim::E3,
            ModelCase::KirchhoffE3 { a1, a3, b1, b3, c1, c3 },
            s0,
            s1,
            b3 - b1,
        ))
    }

    /// Chaplygin case in the rotated basis: a1 = a2, a13 != 0, diagonal B and C
    /// with b1 = b2, c1 = c2. The perturbation parameter is eps = a13 and the
    /// split isolates the mixed term M1 M3.
    pub fn chaplygin_e3(
        a1: C64,
        a3: C64,
        a13: C64,
        b1: C64,
        b3: C64,
        c1: C64,
        c3: C64,
    ) -> Result<Self, LieError> {
        if a13.norm() == 0.0 {
            return Err(LieError::Validation {
                condition: "chaplygin_e3 requires a13 != 0 (a13 = 0 degenerates to the Kirchhoff case)"
                    .to_string(),
            });
        }
        let a = diag3(a1, a1, a3);
        let b = diag3(b1, b1, b3);
        let c = diag3(c1, c1, c3);
        let s0 = e3_block_matrix(&a, &b, &c);
        // S1: H1 = M1 M3
        let mut s1 = DMatrix::zeros(6, 6);
        s1[(0, 2)] = c64(1.0, 0.0);
        s1[(2, 0)] = c64(1.0, 0.0);
        Ok(Self::assemble(
            Dim::E3,
            ModelCase::ChaplyginE3 { a1, a3, a13, b1, b3, c1, c3 },
            s0,
            s1,
            a13,
        ))
    }

    /// Four-dimensional Kirchhoff case. Any nonzero B coefficient is rejected:
    /// with M12 and M34 as first integrals the mixed term must vanish.
    pub fn kirchhoff_e4(
        a1212: C64,
        a1313: C64,
        a3434: C64,
        a1234: C64,
        c11: C64,
        c33: C64,
        b_coeffs: &[((usize, usize, usize), C64)],
    ) -> Result<Self, LieError> {
        for &((i, j, k), v) in b_coeffs {
            if v.norm() != 0.0 {
                return Err(LieError::Validation {
                    condition: format!(
                        "kirchhoff_e4 requires B_{{ijk}} = 0 (Proposition 1: M12 and M34 first integrals force B = 0); got B_{i}{j}{k} != 0"
                    ),
                });
            }
        }
        let s = Self::e4_quadratic_form(&ChaplyginE4Coeffs {
            a1212,
            a1313,
            a3434,
            a1234,
            c11,
            c33,
            ..Default::default()
        });
        Ok(Self::assemble(
            Dim::E4,
            ModelCase::KirchhoffE4 { a1212, a1313, a3434, a1234, c11, c33 },
            s,
            DMatrix::zeros(10, 10),
            c64(0.0, 0.0),
        ))
    }

    /// Four-dimensional Chaplygin case with the full coefficient list.
    pub fn chaplygin_e4(coeffs: ChaplyginE4Coeffs) -> Result<Self, LieError> {
        let s = Self::e4_quadratic_form(&coeffs);
        Ok(Self::assemble(
            Dim::E4,
            ModelCase::ChaplyginE4(coeffs),
            s,
            DMatrix::zeros(10, 10),
            c64(0.0, 0.0),
        ))
    }

    /// Quadratic-form matrix on e(4)*: 2H = x^T S x with the display convention
    /// that every listed monomial appears with its printed coefficient.
    fn e4_quadratic_form(k: &ChaplyginE4Coeffs) -> DMatrix<C64> {
        let mut s = DMatrix::zeros(10, 10);
        let pos = |i: usize, j: usize| -> usize {
            E4_PAIRS.iter().position(|&(a, b)| (a, b) == (i, j)).unwrap()
        };
        let mut sym = |i: usize, j: usize, v: C64| {
            if i == j {
                s[(i, i)] += v;
            } else {
                s[(i, j)] += v * 0.5;
                s[(j, i)] += v * 0.5;
            }
        };
        // squares
        sym(pos(1, 2), pos(1, 2), k.a1212);
        for &(i, j) in &[(1, 3), (1, 4), (2, 3), (2, 4)] {
            sym(pos(i, j), pos(i, j), k.a1313);
        }
        sym(pos(3, 4), pos(3, 4), k.a3434);
        // mixed M-M
        sym(pos(1, 2), pos(3, 4), k.a1234);
        sym(pos(1, 2), pos(1, 3), k.a1213);
        sym(pos(1, 2), pos(1, 4), k.a1214);
        sym(pos(1, 2), pos(2, 3), k.a1223);
        sym(pos(1, 2), pos(2, 4), k.a1224);
        sym(pos(1, 3), pos(3, 4), k.a1334);
        sym(pos(1, 4), pos(3, 4), k.a1434);
        sym(pos(2, 3), pos(3, 4), k.a2334);
        sym(pos(2, 4), pos(3, 4), k.a2434);
        // M-p
        for (pair, col, v) in [
            ((1, 2), 0, k.b121),
            ((1, 2), 1, k.b122),
            ((1, 2), 2, k.b123),
            ((1, 2), 3, k.b124),
            ((3, 4), 0, k.b341),
            ((3, 4), 1, k.b342),
            ((3, 4), 2, k.b343),
            ((3, 4), 3, k.b344),
        ] {
            sym(pos(pair.0, pair.1), 6 + col, v);
        }
        // p squares
        sym(6, 6, k.c11);
        sym(7, 7, k.c11);
        sym(8, 8, k.c33);
        sym(9, 9, k.c33);
        s
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn case(&self) -> &ModelCase {
        &self.case
    }

    /// Symmetric matrix of H(x) = x^T S x / 2.
    pub fn quadratic_form(&self) -> &DMatrix<C64> {
        &self.s_total
    }

    pub fn unperturbed_form(&self) -> &DMatrix<C64> {
        &self.s_unperturbed
    }

    pub fn perturbation_form(&self) -> &DMatrix<C64> {
        &self.s_perturbation
    }

    pub fn epsilon(&self) -> C64 {
        self.epsilon
    }

    pub fn field(&self) -> &QuadraticField {
        &self.field
    }

    /// Field of the eps = 0 part of the split.
    pub fn unperturbed_field(&self) -> &QuadraticField {
        &self.field0
    }

    /// Field of the perturbation direction H1 (coefficient of eps).
    pub fn perturbation_field(&self) -> &QuadraticField {
        &self.field1
    }

    pub fn hamiltonian_observable(&self) -> Observable {
        Observable::quadratic(self.dim, self.s_total.clone(), "H", ObservableKind::Hamiltonian)
    }
}

/// Hamiltonian vector field of the model at x, generated from the structure
/// tensor and the analytic gradient S x.
pub fn hamiltonian_field(model: &KirchhoffModel, x: &PhaseState) -> Result<DVector<C64>, LieError> {
    if model.dim() != x.dim() {
        return Err(LieError::DimensionMismatch(model.dim(), x.dim()));
    }
    Ok(model.field().eval(x.coords()))
}

fn e4_bilinear_form(terms: &[((usize, usize), usize, f64)]) -> DMatrix<C64> {
    // q(x) = sum coeff * M_pair * p_col; build S with q = x^T S x / 2
    let mut s = DMatrix::zeros(10, 10);
    for &((i, j), col, coeff) in terms {
        let k = E4_PAIRS.iter().position(|&(a, b)| (a, b) == (i, j)).unwrap();
        s[(k, 6 + col)] += c64(coeff, 0.0);
        s[(6 + col, k)] += c64(coeff, 0.0);
    }
    s
}

/// The four bilinear building blocks of the e(4) quadratic Casimir, in the
/// order they appear in its defining sum of squares.
pub fn e4_casimir_blocks() -> [DMatrix<C64>; 4] {
    [
        // M13 p4 - M14 p3 + M34 p1
        e4_bilinear_form(&[((1, 3), 3, 1.0), ((1, 4), 2, -1.0), ((3, 4), 0, 1.0)]),
        // M23 p1 + M12 p3 - M13 p2
        e4_bilinear_form(&[((2, 3), 0, 1.0), ((1, 2), 2, 1.0), ((1, 3), 1, -1.0)]),
        // M24 p1 - M14 p2 + M12 p4
        e4_bilinear_form(&[((2, 4), 0, 1.0), ((1, 4), 1, -1.0), ((1, 2), 3, 1.0)]),
        // M23 p4 + M34 p2 - M24 p3
        e4_bilinear_form(&[((2, 3), 3, 1.0), ((3, 4), 1, 1.0), ((2, 4), 2, -1.0)]),
    ]
}

/// Pfaffian of the antisymmetric M matrix as a quadratic form:
/// M12 M34 + M14 M23 - M13 M24.
pub fn e4_pfaffian_form() -> DMatrix<C64> {
    let mut s = DMatrix::zeros(10, 10);
    let pos = |i: usize, j: usize| E4_PAIRS.iter().position(|&(a, b)| (a, b) == (i, j)).unwrap();
    for &((u, v), sign) in &[
        ((pos(1, 2), pos(3, 4)), 1.0),
        ((pos(1, 4), pos(2, 3)), 1.0),
        ((pos(1, 3), pos(2, 4)), -1.0),
    ] {
        s[(u, v)] += c64(sign, 0.0);
        s[(v, u)] += c64(sign, 0.0);
    }
    s
}

/// e(4) quadratic Casimir (sum of the four squared blocks).
pub fn e4_casimir_f2() -> Observable {
    let one = c64(1.0, 0.0);
    let terms = e4_casimir_blocks().into_iter().map(|s| (one, s)).collect();
    Observable::sum_of_squares(Dim::E4, terms, "F2", ObservableKind::Casimir)
}

/// The additional quadratic-in-squares first integral of the 4D Kirchhoff
/// case, with symbol binding a1 -> A1313, c1 -> C11, c3 -> C33.
pub fn e4_integral_f5(a1: C64, c1: C64, c3: C64) -> Observable {
    let blocks = e4_casimir_blocks();
    let terms = vec![
        (a1, e4_pfaffian_form()),
        (-c1, blocks[0].clone()),
        (-c3, blocks[1].clone()),
        (-c3, blocks[2].clone()),
        (-c1, blocks[3].clone()),
    ];
    Observable::sum_of_squares(Dim::E4, terms, "F5", ObservableKind::FirstIntegral)
}

fn e3_mp_form() -> DMatrix<C64> {
    let mut s = DMatrix::zeros(6, 6);
    for i in 0..3 {
        s[(i, 3 + i)] = c64(1.0, 0.0);
        s[(3 + i, i)] = c64(1.0, 0.0);
    }
    s
}

fn e3_pp_form() -> DMatrix<C64> {
    let mut s = DMatrix::zeros(6, 6);
    for i in 0..3 {
        s[(3 + i, 3 + i)] = c64(2.0, 0.0);
    }
    s
}

fn e4_pp_form() -> DMatrix<C64> {
    let mut s = DMatrix::zeros(10, 10);
    for i in 0..4 {
        s[(6 + i, 6 + i)] = c64(2.0, 0.0);
    }
    s
}

/// H plus the Casimirs plus the case-specific integrals / invariant relations,
/// each with an analytic gradient.
pub fn invariants_of(model: &KirchhoffModel) -> Vec<Observable> {
    let mut out = vec![model.hamiltonian_observable()];
    match model.dim() {
        Dim::E3 => {
            out.push(Observable::quadratic(Dim::E3, e3_mp_form(), "<M,p>", ObservableKind::Casimir));
            out.push(Observable::quadratic(Dim::E3, e3_pp_form(), "<p,p>", ObservableKind::Casimir));
            match model.case() {
                ModelCase::KirchhoffE3 { .. } => {
                    out.push(Observable::coordinate(Dim::E3, 2, ObservableKind::FirstIntegral));
                }
                ModelCase::ChaplyginE3 { .. } => {
                    // invariant relation in the rotated basis: M3 = 0
                    out.push(Observable::coordinate(Dim::E3, 2, ObservableKind::InvariantRelation));
                }
                _ => {}
            }
        }
        Dim::E4 => {
            out.push(Observable::quadratic(Dim::E4, e4_pp_form(), "F1", ObservableKind::Casimir));
            out.push(e4_casimir_f2());
            match model.case() {
                ModelCase::KirchhoffE4 { a1313, c11, c33, .. } => {
                    out.push(Observable::coordinate(Dim::E4, 0, ObservableKind::FirstIntegral));
                    out.push(Observable::coordinate(Dim::E4, 5, ObservableKind::FirstIntegral));
                    out.push(e4_integral_f5(*a1313, *c11, *c33));
                }
                ModelCase::ChaplyginE4(_) => {
                    out.push(Observable::coordinate(Dim::E4, 0, ObservableKind::InvariantRelation));
                    out.push(Observable::coordinate(Dim::E4, 5, ObservableKind::InvariantRelation));
                }
                _ => {}
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Raw-basis conditions
// ---------------------------------------------------------------------------

/// Check the raw-basis conditions of the invariant-relation family for a
/// diagonal A = diag(a1, a2, a3) and symmetric B, C with a 13 off-diagonal
/// entry, for one sign branch (+1 pairs with the relation
/// M1 sqrt(a2 - a1) - M3 sqrt(a3 - a2)):
///
///   b12 = b23 = c12 = c23 = 0,
///   b13 sqrt(a2 - a1) = sign (b2 - b1) sqrt(a3 - a2),
///   b13 sqrt(a3 - a2) = -sign (b3 - b2) sqrt(a2 - a1),
///
/// and the same for C. Only the rotated-basis form is modeled; this predicate
/// exists to validate raw parameter sets against the branch family.
pub fn chaplygin_conditions_raw(
    a_diag: [C64; 3],
    b: &DMatrix<C64>,
    c: &DMatrix<C64>,
    sign: i8,
    tol: f64,
) -> bool {
    assert!(sign == 1 || sign == -1);
    let s21 = (a_diag[1] - a_diag[0]).sqrt();
    let s32 = (a_diag[2] - a_diag[1]).sqrt();
    let sg = c64(sign as f64, 0.0);
    let mut ok = true;
    for m in [b, c] {
        ok &= m[(0, 1)].norm() <= tol && m[(1, 2)].norm() <= tol;
        let d21 = m[(1, 1)] - m[(0, 0)];
        let d32 = m[(2, 2)] - m[(1, 1)];
        ok &= (m[(0, 2)] * s21 - sg * d21 * s32).norm() <= tol;
        ok &= (m[(0, 2)] * s32 + sg * d32 * s21).norm() <= tol;
    }
    ok
}

/// The raw-basis invariant relation M1 sqrt(a2 - a1) - sign M3 sqrt(a3 - a2).
pub fn raw_invariant_relation(a_diag: [C64; 3], sign: i8) -> Observable {
    let s21 = (a_diag[1] - a_diag[0]).sqrt();
    let s32 = (a_diag[2] - a_diag[1]).sqrt();
    let mut v = DVector::zeros(6);
    v[0] = s21;
    v[2] = -c64(sign as f64, 0.0) * s32;
    Observable::linear(Dim::E3, v, "F4_raw", ObservableKind::InvariantRelation)
}

// ---------------------------------------------------------------------------
// Displayed-system oracles
// ---------------------------------------------------------------------------

/// Per-coordinate discrepancy between the bracket-generated field and a
/// hand-transcribed displayed system, maximized over sample states.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CoordinateDiscrepancy {
    pub coordinate: String,
    pub max_abs_difference: f64,
}

/// Literal transcription of the displayed axially-symmetric system with
/// eps = b3 - b1 (including its second row exactly as printed).
pub fn displayed_system_kirchhoff(a1: C64, a3: C64, eps: C64, c1: C64, c3: C64, x: &DVector<C64>) -> DVector<C64> {
    let (m1, m2, m3) = (x[0], x[1], x[2]);
    let (p1, p2, p3) = (x[3], x[4], x[5]);
    DVector::from_vec(vec![
        (a3 - a1) * m2 * m3 + eps * (m2 * p3 + m3 * p2) + (c3 - c1) * p2 * p3,
        (a1 - a3) * m2 * m3 - eps * (m1 * p3 + m3 * p1) + (c1 - c3) * p1 * p3,
        c64(0.0, 0.0),
        a3 * m3 * p2 - a1 * m2 * p3 + eps * p2 * p3,
        a1 * m1 * p3 - a3 * m3 * p1 - eps * p1 * p3,
        a1 * (p1 * m2 - p2 * m1),
    ])
}

/// Literal transcription of the displayed Chaplygin system with eps = a13
/// (including its second row exactly as printed).
pub fn displayed_system_chaplygin(a1: C64, a3: C64, eps: C64, c1: C64, c3: C64, x: &DVector<C64>) -> DVector<C64> {
    let (m1, m2, m3) = (x[0], x[1], x[2]);
    let (p1, p2, p3) = (x[3], x[4], x[5]);
    DVector::from_vec(vec![
        (a3 - a1) * m2 * m3 + (c3 - c1) * p2 * p3 + eps * m1 * m2,
        (a1 - a3) * m2 * m3 + (c1 - c3) * p1 * p3 + eps * (m3 * m3 - m1 * m1),
        -eps * m2 * m3,
        a3 * m3 * p2 - a1 * m2 * p3 + eps * m1 * p2,
        a1 * m1 * p3 - a3 * m3 * p1 + eps * (m3 * p3 - m1 * p1),
        a1 * (p1 * m2 - p2 * m1) - eps * m3 * p2,
    ])
}

/// Compare the generated field against the displayed system at seeded random
/// complex states. Coordinates where the display disagrees with the generated
/// field are reported, never patched.
pub fn displayed_field_discrepancies(model: &KirchhoffModel, n_samples: usize, seed: u64) -> Vec<CoordinateDiscrepancy> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let displayed: Box<dyn Fn(&DVector<C64>) -> DVector<C64>> = match model.case() {
        ModelCase::KirchhoffE3 { a1, a3, b1, b3, c1, c3 } => {
            let (a1, a3, eps, c1, c3) = (*a1, *a3, *b3 - *b1, *c1, *c3);
            Box::new(move |x| displayed_system_kirchhoff(a1, a3, eps, c1, c3, x))
        }
        ModelCase::ChaplyginE3 { a1, a3, a13, c1, c3, .. } => {
            let (a1, a3, eps, c1, c3) = (*a1, *a3, *a13, *c1, *c3);
            Box::new(move |x| displayed_system_chaplygin(a1, a3, eps, c1, c3, x))
        }
        _ => return Vec::new(),
    };
    let n = model.dim().size();
    let mut max_diff = vec![0.0f64; n];
    for _ in 0..n_samples {
        let x = DVector::from_fn(n, |_, _| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let gen = model.field().eval(&x);
        let disp = displayed(&x);
        for i in 0..n {
            max_diff[i] = max_diff[i].max((gen[i] - disp[i]).norm());
        }
    }
    model
        .dim()
        .coord_names()
        .iter()
        .zip(max_diff)
        .filter(|(_, d)| *d > 1e-12)
        .map(|(name, d)| CoordinateDiscrepancy {
            coordinate: name.to_string(),
            max_abs_difference: d,
        })
        .collect()
}
