//! Four-dimensional Kirchhoff and Chaplygin cases on e(4): the integral set,
//! involution verification, the mixed-term obstruction witness, and the
//! invariant relations of the Chaplygin Hamiltonian.

use crate::dynamics::{drift_report, integrate, DynamicsError, TimePath};
use crate::liepoisson::{
    bracket, e4_integral_f5, invariants_of, Dim, KirchhoffModel, ModelCase, Observable,
    ObservableKind, PhaseState, E4_PAIRS,
};
use crate::scalar::{c64, C64};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Dim4Error {
    #[error("model is not a four-dimensional case: {0}")]
    NotE4(String),
    #[error("all B coefficients vanish; the witness search needs a nonzero mixed term")]
    AllBZero,
    #[error("no witness found in {0} samples (this would contradict the mixed-term obstruction)")]
    NoWitness(usize),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Values of the integral set at a state.
#[derive(Debug, Clone, serde::Serialize)]
pub struct IntegralValues4 {
    pub h: [f64; 2],
    pub f1: [f64; 2],
    pub f2: [f64; 2],
    pub f3: [f64; 2],
    pub f4: [f64; 2],
    pub f5: [f64; 2],
}

fn require_e4(model: &KirchhoffModel) -> Result<(), Dim4Error> {
    if model.dim() != Dim::E4 {
        return Err(Dim4Error::NotE4(model.case().label().to_string()));
    }
    Ok(())
}

/// Exact polynomial evaluation of H, F1..F5 (F5 uses the validated binding
/// a1 -> A1313, c1 -> C11, c3 -> C33).
pub fn integrals4(model: &KirchhoffModel, x: &PhaseState) -> Result<IntegralValues4, Dim4Error> {
    require_e4(model)?;
    let obs = integral_set(model)?;
    let v: Vec<C64> = obs.iter().map(|o| o.eval(x)).collect();
    let pair = |z: C64| [z.re, z.im];
    Ok(IntegralValues4 {
        h: pair(v[0]),
        f1: pair(v[1]),
        f2: pair(v[2]),
        f3: pair(v[3]),
        f4: pair(v[4]),
        f5: pair(v[5]),
    })
}

/// H, F1, F2, M12, M34, F5 for the 4D Kirchhoff case (F5 built from the model
/// coefficients); for the Chaplygin case M12/M34 are invariant relations and
/// F5 is omitted.
pub fn integral_set(model: &KirchhoffModel) -> Result<Vec<Observable>, Dim4Error> {
    require_e4(model)?;
    Ok(invariants_of(model))
}

fn random_e4_state(rng: &mut ChaCha12Rng) -> PhaseState {
    let x = DVector::from_fn(10, |_, _| {
        c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    PhaseState::from_vector(Dim::E4, x).unwrap()
}

/// Symmetric matrix of max |{F_i, F_j}| over seeded random complex states.
#[derive(Debug, Clone, serde::Serialize)]
pub struct InvolutionReport {
    pub names: Vec<String>,
    pub max_abs_bracket: Vec<Vec<f64>>,
    pub max_offdiagonal: f64,
    pub n_points: usize,
    pub seed: u64,
}

pub fn involution_matrix(
    model: &KirchhoffModel,
    n_points: usize,
    seed: u64,
) -> Result<InvolutionReport, Dim4Error> {
    assert!(n_points >= 100, "n_points must be at least 100");
    let obs = integral_set(model)?;
    involution_of_observables(&obs, n_points, seed)
}

fn involution_of_observables(
    obs: &[Observable],
    n_points: usize,
    seed: u64,
) -> Result<InvolutionReport, Dim4Error> {
    let k = obs.len();
    let mut max_abs = vec![vec![0.0f64; k]; k];
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    for _ in 0..n_points {
        let x = random_e4_state(&mut rng);
        for i in 0..k {
            for j in (i + 1)..k {
                let v = bracket(&obs[i], &obs[j], &x).unwrap().norm();
                if v > max_abs[i][j] {
                    max_abs[i][j] = v;
                    max_abs[j][i] = v;
                }
            }
        }
    }
    let max_offdiagonal = max_abs
        .iter()
        .flat_map(|row| row.iter())
        .cloned()
        .fold(0.0, f64::max);
    Ok(InvolutionReport {
        names: obs.iter().map(|o| o.name.clone()).collect(),
        max_abs_bracket: max_abs,
        max_offdiagonal,
        n_points,
        seed,
    })
}

/// Outcome of validating the symbol binding inside F5 against involution, and
/// of the fallback search over the 3! candidate bindings when the default one
/// fails.
#[derive(Debug, Clone, serde::Serialize)]
pub struct BindingReport {
    pub default_binding: String,
    pub default_passes: bool,
    pub max_offdiagonal: f64,
    /// Filled only when the default fails: label and verdict per permutation.
    pub searched: Vec<(String, bool)>,
}

pub fn validate_f5_binding(
    model: &KirchhoffModel,
    n_points: usize,
    seed: u64,
    threshold: f64,
) -> Result<BindingReport, Dim4Error> {
    require_e4(model)?;
    let (a1313, c11, c33) = match model.case() {
        ModelCase::KirchhoffE4 { a1313, c11, c33, .. } => (*a1313, *c11, *c33),
        other => return Err(Dim4Error::NotE4(other.label().to_string())),
    };
    let rep = involution_matrix(model, n_points, seed)?;
    let default_passes = rep.max_offdiagonal <= threshold;
    let mut searched = Vec::new();
    if !default_passes {
        let candidates = [a1313, c11, c33];
        let labels = ["A1313", "C11", "C33"];
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        for p in perms {
            let f5 = e4_integral_f5(candidates[p[0]], candidates[p[1]], candidates[p[2]]);
            let mut obs = invariants_of(model);
            obs.pop();
            obs.push(f5);
            let r = involution_of_observables(&obs, n_points, seed)?;
            searched.push((
                format!("a1->{}, c1->{}, c3->{}", labels[p[0]], labels[p[1]], labels[p[2]]),
                r.max_offdiagonal <= threshold,
            ));
        }
    }
    Ok(BindingReport {
        default_binding: "a1->A1313, c1->C11, c3->C33".to_string(),
        default_passes,
        max_offdiagonal: rep.max_offdiagonal,
        searched,
    })
}

/// A state where the mixed term moves M12 or M34.
#[derive(Debug, Clone)]
pub struct Prop1Witness {
    pub state: DVector<C64>,
    /// "M12" or "M34".
    pub observable: String,
    /// d(M12 or M34)/dt under the mixed term alone.
    pub rate: C64,
}

/// Search for a state certifying that a nonzero B coefficient breaks
/// conservation of M12 or M34 (deterministic unit states first, then seeded
/// random states).
pub fn proposition1_witness(
    b_coeffs: &[((usize, usize, usize), C64)],
    seed: u64,
) -> Result<Prop1Witness, Dim4Error> {
    if b_coeffs.iter().all(|(_, v)| v.norm() == 0.0) {
        return Err(Dim4Error::AllBZero);
    }
    // H_B = sum B_ijk M_ij p_k as a quadratic form
    let mut s = DMatrix::zeros(10, 10);
    for &((i, j, k), v) in b_coeffs {
        let pos = E4_PAIRS
            .iter()
            .position(|&(a, b)| (a, b) == (i, j))
            .unwrap_or_else(|| panic!("invalid M index pair ({i},{j})"));
        s[(pos, 5 + k)] += v;
        s[(5 + k, pos)] += v;
    }
    let h_b = Observable::quadratic(Dim::E4, s, "H_B", ObservableKind::Hamiltonian);
    let m12 = Observable::coordinate(Dim::E4, 0, ObservableKind::FirstIntegral);
    let m34 = Observable::coordinate(Dim::E4, 5, ObservableKind::FirstIntegral);

    let check = |state: &PhaseState| -> Option<Prop1Witness> {
        for (obs, name) in [(&m12, "M12"), (&m34, "M34")] {
            let rate = bracket(obs, &h_b, state).unwrap();
            if rate.norm() > 1e-6 {
                return Some(Prop1Witness {
                    state: state.coords().clone(),
                    observable: name.to_string(),
                    rate,
                });
            }
        }
        None
    };

    // deterministic unit candidates: one M entry and one p entry set to 1
    for mi in 0..6 {
        for pi in 0..4 {
            let mut m = [c64(0.0, 0.0); 6];
            let mut p = [c64(0.0, 0.0); 4];
            m[mi] = c64(1.0, 0.0);
            p[pi] = c64(1.0, 0.0);
            let state = PhaseState::e4(m, p);
            if let Some(w) = check(&state) {
                return Ok(w);
            }
        }
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    const SAMPLES: usize = 10_000;
    for _ in 0..SAMPLES {
        let state = random_e4_state(&mut rng);
        if let Some(w) = check(&state) {
            return Ok(w);
        }
    }
    Err(Dim4Error::NoWitness(SAMPLES))
}

/// Invariant-relation check for the 4D Chaplygin case.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Chaplygin4Report {
    /// Max |M12| and |M34| drift along trajectories from submanifold starts.
    pub max_drift_m12: f64,
    pub max_drift_m34: f64,
    pub n_trajectories: usize,
    /// Max |{M12, H}| and |{M34, H}| over random submanifold states.
    pub pointwise_bracket_max: f64,
    /// Max |{M12, H}| over random off-manifold states (generically nonzero:
    /// invariant relation, not a first integral).
    pub off_manifold_bracket_max: f64,
    pub drift_threshold: f64,
}

pub fn chaplygin4_invariant_check(
    model: &KirchhoffModel,
    tol: f64,
    seed: u64,
    n_trajectories: usize,
) -> Result<Chaplygin4Report, Dim4Error> {
    require_e4(model)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let m12 = Observable::coordinate(Dim::E4, 0, ObservableKind::InvariantRelation);
    let m34 = Observable::coordinate(Dim::E4, 5, ObservableKind::InvariantRelation);
    let h = model.hamiltonian_observable();

    let mut max_m12 = 0.0f64;
    let mut max_m34 = 0.0f64;
    let path = TimePath::real_interval(0.0, 1.0)?;
    for _ in 0..n_trajectories {
        let mut x = random_e4_state(&mut rng).coords().clone();
        x[0] = c64(0.0, 0.0);
        x[5] = c64(0.0, 0.0);
        let state = PhaseState::from_vector(Dim::E4, x).unwrap();
        let traj = integrate(model, &state, &path, tol)?;
        let rep = drift_report(&traj, std::slice::from_ref(&m12), tol);
        max_m12 = max_m12.max(rep.per_observable[0].max_abs_drift);
        let rep = drift_report(&traj, std::slice::from_ref(&m34), tol);
        max_m34 = max_m34.max(rep.per_observable[0].max_abs_drift);
    }

    let mut pointwise = 0.0f64;
    for _ in 0..1000 {
        let mut x = random_e4_state(&mut rng).coords().clone();
        x[0] = c64(0.0, 0.0);
        x[5] = c64(0.0, 0.0);
        let state = PhaseState::from_vector(Dim::E4, x).unwrap();
        pointwise = pointwise.max(bracket(&m12, &h, &state).unwrap().norm());
        pointwise = pointwise.max(bracket(&m34, &h, &state).unwrap().norm());
    }

    let mut off_manifold = 0.0f64;
    for _ in 0..100 {
        let mut x = random_e4_state(&mut rng).coords().clone();
        x[0] = c64(0.5, 0.0);
        let state = PhaseState::from_vector(Dim::E4, x).unwrap();
        off_manifold = off_manifold.max(bracket(&m12, &h, &state).unwrap().norm());
    }

    Ok(Chaplygin4Report {
        max_drift_m12: max_m12,
        max_drift_m34: max_m34,
        n_trajectories,
        pointwise_bracket_max: pointwise,
        off_manifold_bracket_max: off_manifold,
        drift_threshold: 100.0 * tol,
    })
}
