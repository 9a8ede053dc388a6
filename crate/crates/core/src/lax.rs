//! The Chaplygin Lax pair on the invariant manifold M3 = 0 and its spectral
//! curve.
//!
//! The blocks are built exactly as displayed from the model parameters:
//! L(lambda) = lambda^2 L2 + lambda L1 - L0 with L2 = diag(c1/a1, c1/a1, c3/a1),
//! L1 the hat matrix of M, L0 = p p^T, and Q(lambda) = lambda Q1 + Q0 with
//! Q1 = diag(a1, a1, a3), Q0 the hat matrix of dH/dM. Direct computation shows
//! d/dt L = [L, Q] under the generated flow holds iff c3 - c1 = a3 - a1; that
//! normalization is reachable by the Poisson rescaling p -> nu p with
//! nu^2 = (c3 - c1)/(a3 - a1), and the reports state the defect instead of
//! silently repairing parameters.
//!
//! The spectral curve det(L(lambda) - mu I) = 0 is handled in the monic
//! convention P(mu, lambda) = det(mu I - L(lambda)); its coefficients depend
//! only on the first integrals, so they are flow-invariant even without the
//! normalization.

use crate::dynamics::Trajectory;
use crate::liepoisson::{KirchhoffModel, ModelCase};
use crate::scalar::{c64, C64};
use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LaxError {
    #[error("lax construction requires a chaplygin_e3 model with B = 0, got {0}")]
    ModelNotChaplyginB0(String),
    #[error("state is off the invariant manifold: |M3| = {0:e} > 1e-12")]
    OffInvariantManifold(f64),
    #[error("sigma-invariance violated: odd-lambda coefficient {0:e}")]
    SigmaViolation(f64),
}

/// Model parameters needed by the Lax blocks.
#[derive(Debug, Clone, Copy)]
pub struct ChaplyginParams {
    pub a1: C64,
    pub a3: C64,
    pub a13: C64,
    pub c1: C64,
    pub c3: C64,
}

pub fn chaplygin_b0_params(model: &KirchhoffModel) -> Result<ChaplyginParams, LaxError> {
    match model.case() {
        ModelCase::ChaplyginE3 { a1, a3, a13, b1, b3, c1, c3 } => {
            if b1.norm() > 0.0 || b3.norm() > 0.0 {
                return Err(LaxError::ModelNotChaplyginB0(
                    "chaplygin_e3 with nonzero B".into(),
                ));
            }
            Ok(ChaplyginParams { a1: *a1, a3: *a3, a13: *a13, c1: *c1, c3: *c3 })
        }
        other => Err(LaxError::ModelNotChaplyginB0(other.label().to_string())),
    }
}

/// (c3 - c1) - (a3 - a1); the Lax identity holds exactly iff this vanishes.
pub fn lax_normalization_defect(model: &KirchhoffModel) -> Result<C64, LaxError> {
    let p = chaplygin_b0_params(model)?;
    Ok((p.c3 - p.c1) - (p.a3 - p.a1))
}

/// The evaluated pair at one spectral parameter value.
#[derive(Debug, Clone)]
pub struct LaxPair {
    pub l0: Matrix3<C64>,
    pub l1: Matrix3<C64>,
    pub l2: Matrix3<C64>,
    pub q0: Matrix3<C64>,
    pub q1: Matrix3<C64>,
    pub lambda: C64,
}

impl LaxPair {
    pub fn l_matrix(&self) -> Matrix3<C64> {
        self.l2 * (self.lambda * self.lambda) + self.l1 * self.lambda - self.l0
    }

    pub fn q_matrix(&self) -> Matrix3<C64> {
        self.q1 * self.lambda + self.q0
    }
}

fn hat(v: &Vector3<C64>) -> Matrix3<C64> {
    let z = c64(0.0, 0.0);
    Matrix3::new(z, -v[2], v[1], v[2], z, -v[0], -v[1], v[0], z)
}

fn blocks_at(p: &ChaplyginParams, x: &DVector<C64>) -> (Matrix3<C64>, Matrix3<C64>, Matrix3<C64>, Matrix3<C64>, Matrix3<C64>) {
    let z = c64(0.0, 0.0);
    let m = Vector3::new(x[0], x[1], x[2]);
    let pv = Vector3::new(x[3], x[4], x[5]);
    let l2 = Matrix3::new(
        p.c1 / p.a1, z, z,
        z, p.c1 / p.a1, z,
        z, z, p.c3 / p.a1,
    );
    let l1 = hat(&m);
    let l0 = pv * pv.transpose();
    let q1 = Matrix3::new(p.a1, z, z, z, p.a1, z, z, z, p.a3);
    // Q0 entries as displayed: hat of (a1 M1 + a13 M3, a1 M2, a3 M3 + a13 M1)
    let u = Vector3::new(
        p.a1 * x[0] + p.a13 * x[2],
        p.a1 * x[1],
        p.a3 * x[2] + p.a13 * x[0],
    );
    let q0 = hat(&u);
    (l0, l1, l2, q0, q1)
}

/// Build the pair at a state on the invariant manifold (|M3| <= 1e-12).
pub fn build_lax(model: &KirchhoffModel, x: &crate::liepoisson::PhaseState, lambda: C64) -> Result<LaxPair, LaxError> {
    let p = chaplygin_b0_params(model)?;
    let m3 = x.coord(2).norm();
    if m3 > 1e-12 {
        return Err(LaxError::OffInvariantManifold(m3));
    }
    let (l0, l1, l2, q0, q1) = blocks_at(&p, x.coords());
    Ok(LaxPair { l0, l1, l2, q0, q1, lambda })
}

fn frobenius_norm(m: &Matrix3<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Max over samples and lambda values of ||dL/dt - [L, Q]|| / (1 + ||L|| ||Q||),
/// with dL/dt computed exactly by the chain rule from the generated field.
pub fn lax_residual(
    model: &KirchhoffModel,
    traj: &Trajectory,
    lambda_samples: &[C64],
) -> Result<f64, LaxError> {
    let p = chaplygin_b0_params(model)?;
    let start_m3 = traj.start().x[2].norm();
    if start_m3 > 1e-12 {
        return Err(LaxError::OffInvariantManifold(start_m3));
    }
    let field = model.field();
    let mut worst = 0.0f64;
    for sample in &traj.samples {
        let x = &sample.x;
        let xdot = field.eval(x);
        let (l0, l1, l2, q0, q1) = blocks_at(&p, x);
        let mdot = Vector3::new(xdot[0], xdot[1], xdot[2]);
        let pv = Vector3::new(x[3], x[4], x[5]);
        let pdot = Vector3::new(xdot[3], xdot[4], xdot[5]);
        let l1dot = hat(&mdot);
        let l0dot = pdot * pv.transpose() + pv * pdot.transpose();
        for &lambda in lambda_samples {
            let l = l2 * (lambda * lambda) + l1 * lambda - l0;
            let q = q1 * lambda + q0;
            let ldot = l1dot * lambda - l0dot;
            let commutator = l * q - q * l;
            let resid = frobenius_norm(&(ldot - commutator))
                / (1.0 + frobenius_norm(&l) * frobenius_norm(&q));
            worst = worst.max(resid);
        }
    }
    Ok(worst)
}

/// Coefficients c_{j,k} of mu^j lambda^k for the monic spectral polynomial
/// det(mu I - L(lambda)), j <= 3, k <= 6.
#[derive(Debug, Clone)]
pub struct SpectralPoly {
    pub c: [[C64; 7]; 4],
}

impl SpectralPoly {
    pub fn coeff(&self, j: usize, k: usize) -> C64 {
        self.c[j][k]
    }

    pub fn max_abs(&self) -> f64 {
        self.c
            .iter()
            .flat_map(|row| row.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest odd-lambda coefficient: the involution (lambda, mu) ->
    /// (-lambda, mu) demands these vanish.
    pub fn max_odd_lambda(&self) -> f64 {
        self.c
            .iter()
            .flat_map(|row| row.iter().skip(1).step_by(2))
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.c
                .iter()
                .map(|row| {
                    serde_json::Value::Array(
                        row.iter().map(|z| serde_json::json!([z.re, z.im])).collect(),
                    )
                })
                .collect(),
        )
    }
}

/// Characteristic data of a 3x3 matrix: (trace, second elementary symmetric
/// function, determinant).
fn char_data(l: &Matrix3<C64>) -> (C64, C64, C64) {
    let tr = l[(0, 0)] + l[(1, 1)] + l[(2, 2)];
    let e2 = l[(0, 0)] * l[(1, 1)] - l[(0, 1)] * l[(1, 0)]
        + l[(0, 0)] * l[(2, 2)] - l[(0, 2)] * l[(2, 0)]
        + l[(1, 1)] * l[(2, 2)] - l[(1, 2)] * l[(2, 1)];
    let det = l[(0, 0)] * (l[(1, 1)] * l[(2, 2)] - l[(1, 2)] * l[(2, 1)])
        - l[(0, 1)] * (l[(1, 0)] * l[(2, 2)] - l[(1, 2)] * l[(2, 0)])
        + l[(0, 2)] * (l[(1, 0)] * l[(2, 1)] - l[(1, 1)] * l[(2, 0)]);
    (tr, e2, det)
}

/// Expand det(mu I - L(lambda)) by exact evaluation-interpolation: the
/// characteristic polynomial at 7 lambda nodes, then Vandermonde solves per
/// mu-power. Odd-lambda coefficients are asserted to vanish within
/// 1e-10 * scale (sigma-invariance).
pub fn spectral_poly(model: &KirchhoffModel, x: &crate::liepoisson::PhaseState) -> Result<SpectralPoly, LaxError> {
    let p = chaplygin_b0_params(model)?;
    let m3 = x.coord(2).norm();
    if m3 > 1e-12 {
        return Err(LaxError::OffInvariantManifold(m3));
    }
    let nodes: [f64; 7] = [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0];
    let (l0, l1, l2, _, _) = blocks_at(&p, x.coords());
    // values[j][l]: coefficient of mu^j at node l; monic char poly of L:
    // det(mu I - L) = mu^3 - tr mu^2 + e2 mu - det
    let mut values = [[c64(0.0, 0.0); 7]; 4];
    for (l_idx, &lam) in nodes.iter().enumerate() {
        let lam = c64(lam, 0.0);
        let l = l2 * (lam * lam) + l1 * lam - l0;
        let (tr, e2, det) = char_data(&l);
        values[3][l_idx] = c64(1.0, 0.0);
        values[2][l_idx] = -tr;
        values[1][l_idx] = e2;
        values[0][l_idx] = -det;
    }
    let vmat = DMatrix::from_fn(7, 7, |r, c| c64(nodes[r].powi(c as i32), 0.0));
    let lu = vmat.lu();
    let mut out = SpectralPoly { c: [[c64(0.0, 0.0); 7]; 4] };
    for j in 0..4 {
        let rhs = DVector::from_iterator(7, values[j].iter().copied());
        let sol = lu.solve(&rhs).expect("Vandermonde nodes are distinct");
        for k in 0..7 {
            out.c[j][k] = sol[k];
        }
    }
    let scale = out.max_abs().max(1.0);
    let odd = out.max_odd_lambda();
    if odd > 1e-10 * scale {
        return Err(LaxError::SigmaViolation(odd));
    }
    Ok(out)
}

/// Values of the first integrals entering the printed curve.
fn integral_values(model: &KirchhoffModel, x: &DVector<C64>) -> (C64, C64, C64) {
    let f1 = (x.transpose() * model.quadratic_form() * x)[(0, 0)] * 0.5;
    let f2 = x[0] * x[3] + x[1] * x[4] + x[2] * x[5];
    let f3 = x[3] * x[3] + x[4] * x[4] + x[5] * x[5];
    (f1, f2, f3)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct TermComparison {
    pub term: String,
    pub mu_power: usize,
    pub lambda_power: usize,
    pub predicted: [f64; 2],
    pub measured: [f64; 2],
    pub abs_deviation: f64,
    pub rel_deviation: f64,
}

/// Term-by-term comparison of the measured spectral coefficients against the
/// printed curve, read with lambda_1 identified with the Lax parameter.
#[derive(Debug, Clone)]
pub struct CurveMatchReport {
    pub terms: Vec<TermComparison>,
    pub max_rel_deviation: f64,
    /// Largest measured coefficient outside the printed support.
    pub unlisted_coeff_max: f64,
    pub f1: C64,
    pub f2: C64,
    pub f3: C64,
    /// Whether the whole table also matches under lambda_1^2 = lambda^2 / a1
    /// (the rescaling the display implies when a1 != 1).
    pub matches_with_a1_rescaling: bool,
    pub normalization_defect: C64,
    pub notes: Vec<String>,
}

pub fn curve_match(model: &KirchhoffModel, x: &crate::liepoisson::PhaseState) -> Result<CurveMatchReport, LaxError> {
    let p = chaplygin_b0_params(model)?;
    let poly = spectral_poly(model, x)?;
    let (f1, f2, f3) = integral_values(model, x.coords());
    let one = c64(1.0, 0.0);
    let printed: Vec<(String, usize, usize, C64)> = vec![
        ("mu^3".into(), 3, 0, one),
        ("mu^2 F3".into(), 2, 0, f3),
        ("-lambda^2 mu^2 (c3 + 2 c1)".into(), 2, 2, -(p.c3 + p.c1 * 2.0)),
        (
            "lambda^2 mu (2 F1 - (2 c1 + c3) F3)".into(),
            1,
            2,
            f1 * 2.0 - (p.c1 * 2.0 + p.c3) * f3,
        ),
        ("lambda^4 mu c1 (c1 + 2 c3)".into(), 1, 4, p.c1 * (p.c1 + p.c3 * 2.0)),
        ("-lambda^6 c1^2 c3".into(), 0, 6, -(p.c1 * p.c1 * p.c3)),
        (
            "-lambda^4 (2 c1 F1 - c1 (c1 + c3) F3)".into(),
            0,
            4,
            -(p.c1 * f1 * 2.0 - p.c1 * (p.c1 + p.c3) * f3),
        ),
        ("lambda^2 a1 F2^2".into(), 0, 2, p.a1 * f2 * f2),
    ];
    let scale = poly.max_abs().max(1.0);
    let mut terms = Vec::new();
    let mut max_rel: f64 = 0.0;
    let mut matches_rescaled = true;
    for (term, j, k, predicted) in printed {
        let measured = poly.coeff(j, k);
        let abs_dev = (measured - predicted).norm();
        let rel_dev = abs_dev / predicted.norm().max(1e-12);
        max_rel = max_rel.max(rel_dev);
        // rescaled reading: lambda_1^(2m) |-> lambda^(2m) / a1^m
        let m = (k / 2) as i32;
        let rescaled = predicted / p.a1.powi(m);
        if (measured - rescaled).norm() > 1e-9 * scale {
            matches_rescaled = false;
        }
        terms.push(TermComparison {
            term,
            mu_power: j,
            lambda_power: k,
            predicted: [predicted.re, predicted.im],
            measured: [measured.re, measured.im],
            abs_deviation: abs_dev,
            rel_deviation: rel_dev,
        });
    }
    // coefficients the printed curve does not list must vanish
    let listed: Vec<(usize, usize)> = terms.iter().map(|t| (t.mu_power, t.lambda_power)).collect();
    let mut unlisted_max = 0.0f64;
    for j in 0..4 {
        for k in 0..7 {
            if !listed.contains(&(j, k)) {
                unlisted_max = unlisted_max.max(poly.coeff(j, k).norm());
            }
        }
    }
    let notes = vec![
        "sign convention: the printed curve is compared as det(mu I - L(lambda)) = -det(L - mu I) (odd dimension), monic in mu".into(),
        "lambda_1 of the printed curve is identified with the Lax parameter lambda; deviations scaling like powers of a1 indicate the rescaling lambda_1^2 = lambda^2 / a1".into(),
        "flow invariance of the measured coefficients is the hard criterion; the printed formula is a soft criterion".into(),
    ];
    Ok(CurveMatchReport {
        terms,
        max_rel_deviation: max_rel,
        unlisted_coeff_max: unlisted_max,
        f1,
        f2,
        f3,
        matches_with_a1_rescaling: matches_rescaled,
        normalization_defect: (p.c3 - p.c1) - (p.a3 - p.a1),
        notes,
    })
}

/// Max drift of every spectral coefficient along a trajectory (isospectrality
/// check; holds for the generated flow because the coefficients are functions
/// of the first integrals only).
pub fn spectral_flow_drift(model: &KirchhoffModel, traj: &Trajectory) -> Result<f64, LaxError> {
    let mut reference: Option<SpectralPoly> = None;
    let mut worst = 0.0f64;
    for sample in &traj.samples {
        // project the tiny integration drift of M3 away before rebuilding:
        // states on the manifold stay within integration error of it
        let mut xv = sample.x.clone();
        let m3 = xv[2].norm();
        if m3 > 1e-12 && m3 <= 1e-7 {
            xv[2] = c64(0.0, 0.0);
        }
        let state = crate::liepoisson::PhaseState::from_vector(crate::liepoisson::Dim::E3, xv)
            .expect("finite state");
        let poly = spectral_poly(model, &state)?;
        match &reference {
            None => reference = Some(poly),
            Some(r) => {
                for j in 0..4 {
                    for k in 0..7 {
                        worst = worst.max((poly.coeff(j, k) - r.coeff(j, k)).norm());
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Eigenvalue drift of L(lambda) along a trajectory at fixed lambda values.
pub fn isospectrality_drift(
    model: &KirchhoffModel,
    traj: &Trajectory,
    lambda_samples: &[C64],
) -> Result<f64, LaxError> {
    let p = chaplygin_b0_params(model)?;
    let mut worst = 0.0f64;
    for &lambda in lambda_samples {
        let mut reference: Option<Vec<C64>> = None;
        for sample in &traj.samples {
            let (l0, l1, l2, _, _) = blocks_at(&p, &sample.x);
            let l = l2 * (lambda * lambda) + l1 * lambda - l0;
            let dm = DMatrix::from_fn(3, 3, |r, c| l[(r, c)]);
            let ev = crate::linalg::eigenvalues_sorted(&dm);
            match &reference {
                None => reference = Some(ev),
                Some(r) => {
                    for (a, b) in ev.iter().zip(r.iter()) {
                        worst = worst.max((a - b).norm());
                    }
                }
            }
        }
    }
    Ok(worst)
}
