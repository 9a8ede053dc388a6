//! Finite log-Laurent series algebra and the regular-singular-point linear
//! solver, plus the first-order perturbation analysis that exhibits the ln(t)
//! obstruction for the axially symmetric and Chaplygin perturbations.
//!
//! A series is a finite sum of c_{s,m} t^s ln(t)^m with integer exponents s
//! and non-negative log powers m. The solver works layer by layer: for the
//! system xi' = (1/t) A xi + forcing, a forcing layer at t^{s-1} ln^m couples
//! as (s I - A) c_{s,m} = g_{s-1,m} - (m+1) c_{s,m+1}, processed from the
//! highest log power downward. When (s I - A) is singular and the right side
//! leaves its range, the log power escalates: that is variation of constants
//! without quadrature, and it is where logarithms are born.

use crate::linalg::RankRevealing;
use crate::liepoisson::{Dim, KirchhoffModel, ModelCase, QuadraticField};
use crate::scalar::{c64, C64};
use nalgebra::{DMatrix, DVector};
use std::collections::BTreeMap;
use thiserror::Error;

/// Coefficients below this magnitude are purged after every operation, so a
/// canonical-form series stores no zeros.
pub const COEFF_EPS: f64 = 1e-15;

#[derive(Debug, Error)]
pub enum FrobeniusError {
    #[error("log-power escalation exceeded {0} (defective resonance chain)")]
    EscalationStuck(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Finite sum of c_{s,m} t^s ln(t)^m in canonical form.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LogLaurentSeries {
    terms: BTreeMap<(i64, u32), C64>,
}

impl LogLaurentSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(s: i64, m: u32, coeff: C64) -> Self {
        let mut out = Self::default();
        out.add_term(s, m, coeff);
        out
    }

    pub fn constant(c: C64) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn add_term(&mut self, s: i64, m: u32, coeff: C64) {
        let entry = self.terms.entry((s, m)).or_insert_with(|| c64(0.0, 0.0));
        *entry += coeff;
        if entry.norm() <= COEFF_EPS {
            self.terms.remove(&(s, m));
        }
    }

    pub fn coeff(&self, s: i64, m: u32) -> C64 {
        self.terms.get(&(s, m)).copied().unwrap_or_else(|| c64(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, u32, C64)> + '_ {
        self.terms.iter().map(|(&(s, m), &c)| (s, m, c))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_log_power(&self) -> u32 {
        self.terms.keys().map(|&(_, m)| m).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (s, m, c) in other.terms() {
            out.add_term(s, m, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (s, m, c) in other.terms() {
            out.add_term(s, m, -c);
        }
        out
    }

    pub fn scale(&self, k: C64) -> Self {
        let mut out = Self::default();
        for (s, m, c) in self.terms() {
            out.add_term(s, m, c * k);
        }
        out
    }

    /// Multiply by t^k.
    pub fn shift(&self, k: i64) -> Self {
        let mut out = Self::default();
        for (s, m, c) in self.terms() {
            out.add_term(s + k, m, c);
        }
        out
    }

    /// Exact Cauchy product: exponents add, log powers add.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (s1, m1, c1) in self.terms() {
            for (s2, m2, c2) in other.terms() {
                out.add_term(s1 + s2, m1 + m2, c1 * c2);
            }
        }
        out
    }

    /// Termwise d/dt: t^s ln^m -> s t^{s-1} ln^m + m t^{s-1} ln^{m-1}.
    pub fn diff(&self) -> Self {
        let mut out = Self::default();
        for (s, m, c) in self.terms() {
            if s != 0 {
                out.add_term(s - 1, m, c * (s as f64));
            }
            if m > 0 {
                out.add_term(s - 1, m - 1, c * (m as f64));
            }
        }
        out
    }

    /// Termwise antiderivative with integration constant 0.
    ///
    /// t^{-1} ln^m -> ln^{m+1}/(m+1); otherwise integration by parts reduces
    /// the log power: the coefficients follow d_m = c/(s+1),
    /// d_{j-1} = -j d_j / (s+1).
    pub fn antideriv(&self) -> Self {
        let mut out = Self::default();
        for (s, m, c) in self.terms() {
            if s == -1 {
                out.add_term(0, m + 1, c / ((m + 1) as f64));
            } else {
                let inv = 1.0 / ((s + 1) as f64);
                let mut d = c * inv;
                out.add_term(s + 1, m, d);
                let mut j = m;
                while j > 0 {
                    d = -d * (j as f64) * inv;
                    out.add_term(s + 1, j - 1, d);
                    j -= 1;
                }
            }
        }
        out
    }

    /// Evaluate with an explicitly supplied branch of ln(t).
    pub fn eval_with_log(&self, t: C64, ln_t: C64) -> C64 {
        let mut acc = c64(0.0, 0.0);
        for (s, m, c) in self.terms() {
            acc += c * t.powi(s as i32) * ln_t.powu(m);
        }
        acc
    }

    /// Evaluate with the principal branch of ln(t).
    pub fn eval(&self, t: C64) -> C64 {
        self.eval_with_log(t, t.ln())
    }

    /// JSON encoding: sorted list of [s, m, [re, im]] triples.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms()
                .map(|(s, m, c)| serde_json::json!([s, m, [c.re, c.im]]))
                .collect(),
        )
    }
}

impl std::fmt::Display for LogLaurentSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (s, m, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)", c.re, c.im)?;
            if s != 0 {
                write!(f, " t^{s}")?;
            }
            if m == 1 {
                write!(f, " ln t")?;
            } else if m > 1 {
                write!(f, " ln^{m} t")?;
            }
        }
        Ok(())
    }
}

/// Linear system xi' = (1/t) A xi + forcing with finite log-Laurent forcing.
#[derive(Debug, Clone)]
pub struct FrobeniusSystem {
    pub a: DMatrix<C64>,
    pub forcing: Vec<LogLaurentSeries>,
}

impl FrobeniusSystem {
    pub fn new(a: DMatrix<C64>, forcing: Vec<LogLaurentSeries>) -> Self {
        assert_eq!(a.nrows(), a.ncols());
        assert_eq!(a.nrows(), forcing.len(), "forcing dimension mismatch");
        FrobeniusSystem { a, forcing }
    }

    pub fn homogeneous(a: DMatrix<C64>) -> Self {
        let n = a.nrows();
        FrobeniusSystem::new(a, vec![LogLaurentSeries::zero(); n])
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// Forcing evaluated at complex time with an explicit log branch.
    pub fn forcing_at(&self, t: C64, ln_t: C64) -> DVector<C64> {
        DVector::from_iterator(
            self.dim(),
            self.forcing.iter().map(|s| s.eval_with_log(t, ln_t)),
        )
    }
}

/// Outcome of the per-exponent layered solve.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ResonanceEvent {
    pub exponent: i64,
    pub kernel_dim: usize,
    pub escalated_log: bool,
    pub obstruction_norm: f64,
}

pub(crate) struct LayerSolution {
    pub layers: Vec<DVector<C64>>,
    pub event: Option<ResonanceEvent>,
}

const MAX_LOG_POWER: usize = 10;
const RANK_REL_TOL: f64 = 1e-10;

/// Solve (s I - A) c_m + (m+1) c_{m+1} = g_m for all layers of one exponent,
/// from the highest log power downward. At a resonance (singular s I - A) an
/// out-of-range right side escalates the log power by injecting a kernel
/// vector one level up; the free kernel component of each particular layer is
/// set to zero.
pub(crate) fn solve_exponent_layers(
    a: &DMatrix<C64>,
    s: i64,
    g_layers: &[DVector<C64>],
) -> Result<LayerSolution, FrobeniusError> {
    let n = a.nrows();
    let b = DMatrix::<C64>::identity(n, n) * c64(s as f64, 0.0) - a;
    let rr = RankRevealing::new(&b, RANK_REL_TOL);
    let scale: f64 = g_layers
        .iter()
        .map(|g| g.iter().map(|z| z.norm()).fold(0.0, f64::max))
        .fold(1.0, f64::max);

    let mut layers: Vec<DVector<C64>> = vec![DVector::zeros(n); g_layers.len() + 1];
    let g_at = |m: usize| -> DVector<C64> {
        g_layers.get(m).cloned().unwrap_or_else(|| DVector::zeros(n))
    };

    if rr.nullity() == 0 {
        let lu = b.lu();
        for m in (0..g_layers.len()).rev() {
            let rhs = g_at(m) - &layers[m + 1] * c64((m + 1) as f64, 0.0);
            layers[m] = lu.solve(&rhs).expect("nonsingular layer solve");
        }
        layers.truncate(g_layers.len().max(1));
        return Ok(LayerSolution { layers, event: None });
    }

    let kernel = rr.kernel_basis();
    let w = rr.corange_complement_basis();
    let mut escalated = false;
    let mut max_obstruction = 0.0f64;

    for m in (0..g_layers.len()).rev() {
        if layers.len() > MAX_LOG_POWER {
            return Err(FrobeniusError::EscalationStuck(MAX_LOG_POWER));
        }
        let mut rhs = g_at(m) - &layers[m + 1] * c64((m + 1) as f64, 0.0);
        let obstruction = w.adjoint() * &rhs;
        let obs_norm = obstruction.norm();
        if obs_norm > 1e-10 * scale {
            max_obstruction = max_obstruction.max(obs_norm);
            escalated = true;
            // kappa in ker(B) with (m+1) W^H kappa = W^H rhs
            let wk = w.adjoint() * &kernel;
            let y = wk
                .clone()
                .lu()
                .solve(&(&obstruction / c64((m + 1) as f64, 0.0)))
                .ok_or(FrobeniusError::EscalationStuck(MAX_LOG_POWER))?;
            let kappa = &kernel * y;
            layers[m + 1] += &kappa;
            rhs -= kappa * c64((m + 1) as f64, 0.0);
            let still = (w.adjoint() * &rhs).norm();
            if still > 1e-9 * scale {
                return Err(FrobeniusError::EscalationStuck(MAX_LOG_POWER));
            }
        }
        layers[m] = rr.pinv_solve(&rhs);
    }
    while layers.len() > 1 && layers.last().map(|v| v.norm() <= COEFF_EPS).unwrap_or(false) {
        layers.pop();
    }
    Ok(LayerSolution {
        layers,
        event: Some(ResonanceEvent {
            exponent: s,
            kernel_dim: rr.nullity(),
            escalated_log: escalated,
            obstruction_norm: max_obstruction,
        }),
    })
}

/// Result of [`frobenius_solve`]: the particular solution with resonance
/// bookkeeping.
#[derive(Debug, Clone)]
pub struct FrobeniusSolution {
    pub series: Vec<LogLaurentSeries>,
    pub resonances: Vec<ResonanceEvent>,
}

/// A particular solution of xi' = (1/t) A xi + forcing, found per
/// (exponent, log power) layer; no quadrature is involved. The residual of
/// the returned series is exactly zero in canonical form (see
/// [`frobenius_residual`]).
pub fn frobenius_solve(sys: &FrobeniusSystem) -> Result<FrobeniusSolution, FrobeniusError> {
    let n = sys.dim();
    // forcing layers grouped by exponent sigma: layer vectors indexed by m
    let mut groups: BTreeMap<i64, Vec<DVector<C64>>> = BTreeMap::new();
    for (i, f) in sys.forcing.iter().enumerate() {
        for (sigma, m, c) in f.terms() {
            let layers = groups.entry(sigma).or_default();
            while layers.len() <= m as usize {
                layers.push(DVector::zeros(n));
            }
            layers[m as usize][i] = c;
        }
    }
    let mut series = vec![LogLaurentSeries::zero(); n];
    let mut resonances = Vec::new();
    for (sigma, layers) in groups {
        let s = sigma + 1;
        let sol = solve_exponent_layers(&sys.a, s, &layers)?;
        for (m, c) in sol.layers.iter().enumerate() {
            for i in 0..n {
                if c[i].norm() > COEFF_EPS {
                    series[i].add_term(s, m as u32, c[i]);
                }
            }
        }
        if let Some(ev) = sol.event {
            resonances.push(ev);
        }
    }
    Ok(FrobeniusSolution { series, resonances })
}

/// Max coefficient of diff(xi) - (1/t) A xi - forcing in canonical form.
pub fn frobenius_residual(sys: &FrobeniusSystem, xi: &[LogLaurentSeries]) -> f64 {
    let n = sys.dim();
    assert_eq!(xi.len(), n);
    let mut worst = 0.0f64;
    for i in 0..n {
        let mut r = xi[i].diff();
        for j in 0..n {
            let aij = sys.a[(i, j)];
            if aij.norm() > 0.0 {
                r = r.sub(&xi[j].shift(-1).scale(aij));
            }
        }
        r = r.sub(&sys.forcing[i]);
        worst = worst.max(r.max_abs_coeff());
    }
    worst
}

// ---------------------------------------------------------------------------
// First-order perturbation of the pole family
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationCase {
    /// Perturbation direction H1 = M3 p3 (eps = b3 - b1).
    Kirchhoff,
    /// Perturbation direction H1 = M1 M3 (eps = a13), on the invariant
    /// manifold M3 = 0.
    Chaplygin,
}

/// Everything the perturbation analysis derives before solving: the pole
/// residue, the 5x5 variational matrix (M3 row/column reduced out), the
/// forcing, and the fundamental basis with exponents (1, 1, 1, -1, -2).
#[derive(Debug, Clone)]
pub struct PerturbationSetup {
    pub case: PerturbationCase,
    pub alpha: C64,
    pub beta: C64,
    pub m3_1: C64,
    /// 6-dim pole residue of the unperturbed model.
    pub residue: DVector<C64>,
    /// 5x5 variational matrix on (M1, M2, p1, p2, p3).
    pub a5: DMatrix<C64>,
    /// Forcing of the first-order system, 5 components.
    pub forcing: Vec<LogLaurentSeries>,
    /// Columns are the basis directions of k1..k5.
    pub basis: DMatrix<C64>,
    pub basis_exponents: [i64; 5],
}

const FIVE_DIM_ROWS: [usize; 5] = [0, 1, 3, 4, 5];

fn model_k3_params(model: &KirchhoffModel) -> Result<(C64, C64, C64, C64), FrobeniusError> {
    match model.case() {
        ModelCase::KirchhoffE3 { a1, a3, b1, b3, c1, c3 } => {
            if b1.norm() > 0.0 || b3.norm() > 0.0 {
                return Err(FrobeniusError::Precondition(
                    "perturbation analysis requires the unperturbed B = 0 form".into(),
                ));
            }
            Ok((*a1, *a3, *c1, *c3))
        }
        other => Err(FrobeniusError::Precondition(format!(
            "perturbation analysis requires a kirchhoff_e3 model, got {}",
            other.label()
        ))),
    }
}

/// Residue of the pole family for given (alpha, beta); 6-dim layout.
pub fn pole_family_residue(a1: C64, c1: C64, c3: C64, alpha: C64, beta: C64) -> DVector<C64> {
    let i = c64(0.0, 1.0);
    let gamma = (a1 * (c3 - c1)).sqrt();
    DVector::from_vec(vec![
        i * alpha / a1,
        i * beta / a1,
        c64(0.0, 0.0),
        i * beta / gamma,
        -i * alpha / gamma,
        c64(1.0, 0.0) / gamma,
    ])
}

pub fn perturbation_setup(
    model: &KirchhoffModel,
    case: PerturbationCase,
    alpha: C64,
    beta: C64,
    m3_1: C64,
) -> Result<PerturbationSetup, FrobeniusError> {
    let (a1, a3, c1, c3) = model_k3_params(model)?;
    if (alpha * alpha + beta * beta - c64(1.0, 0.0)).norm() > 1e-12 {
        return Err(FrobeniusError::Precondition(
            "alpha^2 + beta^2 must equal 1".into(),
        ));
    }
    if (c3 - c1).norm() == 0.0 || a1.norm() == 0.0 {
        return Err(FrobeniusError::Precondition("need c3 != c1 and a1 != 0".into()));
    }
    if case == PerturbationCase::Chaplygin && m3_1.norm() > 0.0 {
        return Err(FrobeniusError::Precondition(
            "the Chaplygin analysis imposes M3 = 0, so M3^1 must be 0".into(),
        ));
    }
    let _ = a3;

    let residue = pole_family_residue(a1, c1, c3, alpha, beta);
    let a6 = model.field().jacobian(&residue);
    let mut a5 = DMatrix::zeros(5, 5);
    for (r, &ri) in FIVE_DIM_ROWS.iter().enumerate() {
        for (c, &ci) in FIVE_DIM_ROWS.iter().enumerate() {
            a5[(r, c)] = a6[(ri, ci)];
        }
    }

    // forcing: eps-linear field evaluated on the order-0 series, generated
    // from the perturbation Hamiltonian, never transcribed.
    let mut s1 = DMatrix::zeros(6, 6);
    match case {
        PerturbationCase::Kirchhoff => {
            // H1 = M3 p3
            s1[(2, 5)] = c64(1.0, 0.0);
            s1[(5, 2)] = c64(1.0, 0.0);
        }
        PerturbationCase::Chaplygin => {
            // H1 = M1 M3
            s1[(0, 2)] = c64(1.0, 0.0);
            s1[(2, 0)] = c64(1.0, 0.0);
        }
    }
    let f1 = QuadraticField::from_hamiltonian(Dim::E3, &s1);
    let g6 = f1.eval(&residue);

    let mut forcing = vec![LogLaurentSeries::zero(); 5];
    for (r, &ri) in FIVE_DIM_ROWS.iter().enumerate() {
        // f1(x0) / t^2
        if g6[ri].norm() > COEFF_EPS {
            forcing[r].add_term(-2, 0, g6[ri]);
        }
        // constant M3^1 couples through the M3 column of the 6-dim Jacobian
        if m3_1.norm() > 0.0 {
            let col = a6[(ri, 2)] * m3_1;
            if col.norm() > COEFF_EPS {
                forcing[r].add_term(-1, 0, col);
            }
        }
    }

    // fundamental basis on (M1, M2, p1, p2, p3): exponents (1, 1, 1, -1, -2)
    let i = c64(0.0, 1.0);
    let gamma = (a1 * (c3 - c1)).sqrt();
    let a = gamma / a1; // consistent branch of sqrt((c3 - c1)/a1)
    let one = c64(1.0, 0.0);
    let zero = c64(0.0, 0.0);
    let cols: [[C64; 5]; 5] = [
        [zero, -a, one, zero, zero],
        [a, zero, zero, one, zero],
        [-i * alpha * a, -i * beta * a, zero, zero, one],
        [-a * beta, a * alpha, alpha, beta, zero],
        [i * alpha * a, i * beta * a, i * beta, -i * alpha, one],
    ];
    let mut basis = DMatrix::zeros(5, 5);
    for (j, col) in cols.iter().enumerate() {
        for r in 0..5 {
            basis[(r, j)] = col[r];
        }
    }
    let basis_exponents = [1i64, 1, 1, -1, -2];

    Ok(PerturbationSetup {
        case,
        alpha,
        beta,
        m3_1,
        residue,
        a5,
        forcing,
        basis,
        basis_exponents,
    })
}

impl PerturbationSetup {
    pub fn frobenius_system(&self) -> FrobeniusSystem {
        FrobeniusSystem::new(self.a5.clone(), self.forcing.clone())
    }

    /// The k4 basis direction evaluated at time r (the log-bearing direction).
    pub fn k4_direction_at(&self, r: f64) -> DVector<C64> {
        let mut v = DVector::zeros(5);
        for i in 0..5 {
            v[i] = self.basis[(i, 3)];
        }
        v / c64(r, 0.0)
    }

    /// Express a vector of series in the k1..k5 coordinates of the basis,
    /// layer by layer: k_j picks up t^{s - s_j} ln^m per solution layer.
    pub fn project_onto_basis(&self, xi: &[LogLaurentSeries]) -> [LogLaurentSeries; 5] {
        let lu = self.basis.clone().lu();
        let mut k: [LogLaurentSeries; 5] = Default::default();
        let mut layers: BTreeMap<(i64, u32), DVector<C64>> = BTreeMap::new();
        for (i, s) in xi.iter().enumerate() {
            for (e, m, c) in s.terms() {
                layers
                    .entry((e, m))
                    .or_insert_with(|| DVector::zeros(5))[i] = c;
            }
        }
        for ((e, m), v) in layers {
            let y = lu.solve(&v).expect("basis is nonsingular");
            for j in 0..5 {
                if y[j].norm() > COEFF_EPS {
                    k[j].add_term(e - self.basis_exponents[j], m, y[j]);
                }
            }
        }
        k
    }
}

/// Report of the first-order perturbation: the five k-functions of variation
/// of constants, their ln coefficients, and the solve diagnostics.
#[derive(Debug, Clone)]
pub struct PerturbationReport {
    pub case: PerturbationCase,
    pub alpha: C64,
    pub beta: C64,
    pub m3_1: C64,
    pub k_functions: [LogLaurentSeries; 5],
    pub ln_present: bool,
    /// ln(t) coefficient per k-index (1-based), for every k carrying one.
    pub ln_coefficients: BTreeMap<usize, C64>,
    /// Coefficient of t in k4 (nonzero only for the Kirchhoff case with
    /// M3^1 != 0).
    pub k4_t_coefficient: C64,
    /// Largest non-constant coefficient in k3 and k5 (both must be constant).
    pub k3_k5_nonconstant_max: f64,
    pub basis_condition: f64,
    pub residual: f64,
    pub resonances: Vec<ResonanceEvent>,
}

/// Assemble the first-order system, solve it, and express the particular
/// solution in the fundamental basis. k3(t) and k5(t) must come out constant;
/// the ln coefficient of k4 is the non-meromorphy witness.
pub fn perturbation_first_order(
    model: &KirchhoffModel,
    case: PerturbationCase,
    alpha: C64,
    beta: C64,
    m3_1: C64,
) -> Result<PerturbationReport, FrobeniusError> {
    let setup = perturbation_setup(model, case, alpha, beta, m3_1)?;
    let sys = setup.frobenius_system();
    let sol = frobenius_solve(&sys)?;
    let residual = frobenius_residual(&sys, &sol.series);
    let k_functions = setup.project_onto_basis(&sol.series);

    let mut ln_coefficients = BTreeMap::new();
    let mut ln_present = false;
    for (j, k) in k_functions.iter().enumerate() {
        let c = k.coeff(0, 1);
        if c.norm() > 1e-13 {
            ln_coefficients.insert(j + 1, c);
        }
        if k.terms().any(|(_, m, c)| m > 0 && c.norm() > 1e-13) {
            ln_present = true;
        }
    }
    let k4_t_coefficient = k_functions[3].coeff(1, 0);
    let k3_k5_nonconstant_max = [3usize, 4]
        .iter()
        .flat_map(|&j| {
            let jj = if j == 3 { 2 } else { 4 }; // k3 index 2, k5 index 4
            k_functions[jj]
                .terms()
                .filter(|&(s, m, _)| !(s == 0 && m == 0))
                .map(|(_, _, c)| c.norm())
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max);

    Ok(PerturbationReport {
        case,
        alpha,
        beta,
        m3_1,
        k_functions,
        ln_present,
        ln_coefficients,
        k4_t_coefficient,
        k3_k5_nonconstant_max,
        basis_condition: crate::linalg::condition_number(&setup.basis),
        residual,
        resonances: sol.resonances,
    })
}
