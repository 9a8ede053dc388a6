//! Numerical monodromy of linear systems with a regular singular point at
//! t = 0: an independent, non-series confirmation that logarithms are present
//! or absent.
//!
//! For xi' = (1/t) A xi the monodromy around the origin is exactly exp(2 pi i A);
//! the loop integration and the Padé matrix-exponential oracle are kept
//! independent so they cross-validate. Unipotent structure (fewer eigenvectors
//! than eigenvalue multiplicity) certifies logarithmic branching.

use crate::dynamics::{integrate_complex_ode, DynamicsError, TimePath};
use crate::frobenius::FrobeniusSystem;
use crate::linalg::{eigenvalues_sorted, expm};
use crate::scalar::{c64, C64};
use nalgebra::{DMatrix, DVector};

/// Monodromy of the homogeneous system around t = 0.
#[derive(Debug, Clone)]
pub struct MonodromyReport {
    pub matrix: DMatrix<C64>,
    pub eigenvalues: Vec<C64>,
    pub semisimple: bool,
    /// n minus the number of independent eigenvectors.
    pub unipotent_defect: usize,
    pub log_detected: bool,
}

/// Eigenvector-count rank tolerance, deliberately looser than integration
/// accuracy so integration noise cannot fake a unipotent block.
const EIGENVECTOR_RANK_TOL: f64 = 1e-7;
/// Eigenvalue clustering radius for multiplicity counting.
const CLUSTER_EPS: f64 = 1e-5;

fn analyze_monodromy(m: &DMatrix<C64>) -> MonodromyReport {
    let n = m.nrows();
    let eigenvalues = eigenvalues_sorted(m);
    let id = DMatrix::<C64>::identity(n, n);
    let m_scale = m
        .clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max);

    // cluster eigenvalues (union-find over pairwise proximity)
    let mut cluster = (0..n).collect::<Vec<usize>>();
    fn root(cluster: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while cluster[i] != i {
            cluster[i] = cluster[cluster[i]];
            i = cluster[i];
        }
        i
    }
    let eps = CLUSTER_EPS * m_scale.max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            if (eigenvalues[i] - eigenvalues[j]).norm() <= eps {
                let (a, b) = (root(&mut cluster, i), root(&mut cluster, j));
                cluster[a] = b;
            }
        }
    }
    let mut defect = 0usize;
    let mut done = std::collections::BTreeSet::new();
    for i in 0..n {
        let r = root(&mut cluster, i);
        if !done.insert(r) {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&j| root(&mut cluster, j) == r).collect();
        let algebraic = members.len();
        let mean: C64 = members.iter().map(|&j| eigenvalues[j]).sum::<C64>() / algebraic as f64;
        let shifted = m - &id * mean;
        let sv = shifted.singular_values();
        let rank = sv
            .iter()
            .filter(|&&s| s > EIGENVECTOR_RANK_TOL * m_scale.max(1.0))
            .count();
        let geometric = n - rank;
        defect += algebraic.saturating_sub(geometric);
    }

    MonodromyReport {
        matrix: m.clone(),
        eigenvalues,
        semisimple: defect == 0,
        unipotent_defect: defect,
        log_detected: defect > 0,
    }
}

/// Integrate the fundamental matrix of xi' = (1/t) A xi counterclockwise
/// around |t| = radius and analyze the result.
pub fn linear_monodromy(a: &DMatrix<C64>, radius: f64, tol: f64) -> Result<MonodromyReport, DynamicsError> {
    let n = a.nrows();
    let loop_path = TimePath::circle(c64(0.0, 0.0), radius, 0.0, 1.0, 1)?;
    let mut m = DMatrix::<C64>::zeros(n, n);
    let rhs = |t: C64, xi: &DVector<C64>| -> DVector<C64> { (a * xi) / t };
    for j in 0..n {
        let mut e = DVector::zeros(n);
        e[j] = c64(1.0, 0.0);
        let (end, _) = integrate_complex_ode(&rhs, &e, &loop_path, tol, None)?;
        m.set_column(j, &end);
    }
    Ok(analyze_monodromy(&m))
}

/// Loop the same system `turns` times (used by the composition property).
pub fn linear_monodromy_turns(
    a: &DMatrix<C64>,
    radius: f64,
    turns: f64,
    tol: f64,
) -> Result<DMatrix<C64>, DynamicsError> {
    let n = a.nrows();
    let loop_path = TimePath::circle(c64(0.0, 0.0), radius, 0.0, turns, 1)?;
    let mut m = DMatrix::<C64>::zeros(n, n);
    let rhs = |t: C64, xi: &DVector<C64>| -> DVector<C64> { (a * xi) / t };
    for j in 0..n {
        let mut e = DVector::zeros(n);
        e[j] = c64(1.0, 0.0);
        let (end, _) = integrate_complex_ode(&rhs, &e, &loop_path, tol, None)?;
        m.set_column(j, &end);
    }
    Ok(m)
}

/// The matrix-exponential prediction exp(2 pi i A) for the exact Fuchsian
/// system, computed by scaling-and-squaring independently of any integration.
pub fn monodromy_oracle(a: &DMatrix<C64>) -> DMatrix<C64> {
    expm(&(a * c64(0.0, std::f64::consts::TAU)))
}

/// Affine loop result: the homogeneous monodromy plus the jump of the
/// particular solution, measured and predicted.
#[derive(Debug, Clone)]
pub struct AffineMonodromyReport {
    pub homogeneous: MonodromyReport,
    /// Particular-solution value the loop started from, xi_p(r).
    pub start_value: DVector<C64>,
    /// (value after the loop) - (value before): nonzero certifies
    /// non-uniformity in complex time.
    pub particular_shift: DVector<C64>,
    /// Analytic-continuation prediction from the series (ln t -> ln t + 2 pi i).
    pub predicted_shift: DVector<C64>,
    pub shift_in_log_direction: bool,
}

/// Integrate the affine system xi' = (1/t) A xi + forcing once around
/// |t| = radius starting from the series particular solution's value, keeping
/// the log branch continuous along the loop.
pub fn affine_monodromy(
    sys: &FrobeniusSystem,
    radius: f64,
    tol: f64,
) -> Result<AffineMonodromyReport, DynamicsError> {
    let sol = crate::frobenius::frobenius_solve(sys)
        .map_err(|e| DynamicsError::PathInvalid(format!("frobenius solve failed: {e}")))?;
    let n = sys.dim();
    let ln_r = c64(radius.ln(), 0.0);
    let start_value = DVector::from_iterator(
        n,
        sol.series
            .iter()
            .map(|s| s.eval_with_log(c64(radius, 0.0), ln_r)),
    );

    // integrate in the angle variable: t = r e^{i sigma}, ln t = ln r + i sigma,
    // dt/dsigma = i t. The driver sees the real interval [0, 2 pi].
    let sigma_path = TimePath::real_interval(0.0, std::f64::consts::TAU)?;
    let a = sys.a.clone();
    let rhs = move |sigma: C64, xi: &DVector<C64>| -> DVector<C64> {
        let s = sigma.re;
        let t = c64(radius * s.cos(), radius * s.sin());
        let ln_t = c64(radius.ln(), s);
        let f = sys.forcing_at(t, ln_t);
        ((&a * xi) / t + f) * c64(0.0, 1.0) * t
    };
    let (end, _) = integrate_complex_ode(&rhs, &start_value, &sigma_path, tol, None)?;
    let particular_shift = &end - &start_value;

    // prediction: terms with m >= 1 jump by r^s [(ln r + 2 pi i)^m - (ln r)^m]
    let mut predicted_shift = DVector::<C64>::zeros(n);
    let two_pi_i = c64(0.0, std::f64::consts::TAU);
    for (i, s) in sol.series.iter().enumerate() {
        for (e, m, c) in s.terms() {
            if m >= 1 {
                let r_s = c64(radius, 0.0).powi(e as i32);
                let jump = (ln_r + two_pi_i).powu(m) - ln_r.powu(m);
                predicted_shift[i] += c * r_s * jump;
            }
        }
    }

    let homogeneous = linear_monodromy(&sys.a, radius, tol)?;
    let shift_norm = particular_shift.norm();
    let mismatch = (&particular_shift - &predicted_shift).norm();
    let shift_in_log_direction = shift_norm > 0.0 && mismatch <= 1e-5 * shift_norm.max(1e-30);

    Ok(AffineMonodromyReport {
        homogeneous,
        start_value,
        particular_shift,
        predicted_shift,
        shift_in_log_direction,
    })
}

/// Samples of the affine flow on a real-time interval (used by the
/// least-squares cross-validation of the series result).
pub fn affine_flow_samples(
    sys: &FrobeniusSystem,
    y0: &DVector<C64>,
    t_from: f64,
    t_to: f64,
    tol: f64,
) -> Result<Vec<(C64, DVector<C64>)>, DynamicsError> {
    assert!(t_from > 0.0 && t_to > 0.0, "stay on the positive real axis");
    let path = TimePath::real_interval(t_from, t_to)?;
    let a = sys.a.clone();
    let rhs = move |t: C64, xi: &DVector<C64>| -> DVector<C64> {
        (&a * xi) / t + sys.forcing_at(t, t.ln())
    };
    let mut samples = Vec::new();
    let (_, _) = integrate_complex_ode(&rhs, y0, &path, tol, Some(&mut samples))?;
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::{perturbation_setup, PerturbationCase};
    use crate::liepoisson::KirchhoffModel;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn max_entry(m: &DMatrix<C64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn diagonal_integer_spectrum_gives_identity() {
        let a = DMatrix::from_row_slice(2, 2, &[
            c64(1.0, 0.0), c64(0.0, 0.0),
            c64(0.0, 0.0), c64(-1.0, 0.0),
        ]);
        let rep = linear_monodromy(&a, 1.0, 1e-11).unwrap();
        let id = DMatrix::<C64>::identity(2, 2);
        assert!(max_entry(&(&rep.matrix - &id)) <= 1e-8);
        assert!(!rep.log_detected);
        assert!(rep.semisimple);
    }

    #[test]
    fn nilpotent_block_detects_log() {
        let a = DMatrix::from_row_slice(2, 2, &[
            c64(0.0, 0.0), c64(1.0, 0.0),
            c64(0.0, 0.0), c64(0.0, 0.0),
        ]);
        let rep = linear_monodromy(&a, 1.0, 1e-11).unwrap();
        // xi1 = c2 ln t + c1 picks up 2 pi i c2 around the loop
        let expected = DMatrix::from_row_slice(2, 2, &[
            c64(1.0, 0.0), c64(0.0, std::f64::consts::TAU),
            c64(0.0, 0.0), c64(1.0, 0.0),
        ]);
        assert!(max_entry(&(&rep.matrix - &expected)) <= 1e-8);
        assert_eq!(rep.unipotent_defect, 1);
        assert!(rep.log_detected);
        let det = rep.matrix.clone().lu().determinant();
        assert!(det.norm() > 0.5);
    }

    #[test]
    fn kirchhoff_balance_monodromy_is_identity() {
        // integer semisimple spectrum {-2,-1,0,1,1,1}: monodromy must be Id,
        // verified numerically since semisimplicity is not implied by the
        // spectrum alone.
        let model = KirchhoffModel::kirchhoff_e3(
            c64(1.0, 0.0), c64(2.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0), c64(3.0, 0.0),
        )
        .unwrap();
        let residue = crate::frobenius::pole_family_residue(
            c64(1.0, 0.0), c64(1.0, 0.0), c64(3.0, 0.0), c64(0.6, 0.0), c64(0.8, 0.0),
        );
        let a = model.field().jacobian(&residue);
        let rep = linear_monodromy(&a, 1.0, 1e-11).unwrap();
        let id = DMatrix::<C64>::identity(6, 6);
        assert!(max_entry(&(&rep.matrix - &id)) <= 1e-7);
        assert!(!rep.log_detected);
    }

    #[test]
    fn oracle_agreement_random_matrices() {
        let mut rng = ChaCha12Rng::seed_from_u64(71);
        for _ in 0..5 {
            let mut a = DMatrix::from_fn(5, 5, |_, _| {
                c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            // bound the spectrum by 3
            let radius = eigenvalues_sorted(&a)
                .iter()
                .map(|e| e.norm())
                .fold(0.0, f64::max);
            if radius > 3.0 {
                a *= c64(3.0 / radius, 0.0);
            }
            let rep = linear_monodromy(&a, 1.0, 1e-12).unwrap();
            let oracle = monodromy_oracle(&a);
            let rel = max_entry(&(&rep.matrix - &oracle)) / max_entry(&oracle).max(1.0);
            assert!(rel <= 1e-6, "oracle mismatch {rel:e}");
        }
    }

    #[test]
    fn radius_independence_and_composition() {
        let model = KirchhoffModel::kirchhoff_e3(
            c64(1.0, 0.0), c64(2.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0), c64(3.0, 0.0),
        )
        .unwrap();
        let residue = crate::frobenius::pole_family_residue(
            c64(1.0, 0.0), c64(1.0, 0.0), c64(3.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0),
        );
        let a5 = {
            let a6 = model.field().jacobian(&residue);
            let rows = [0usize, 1, 3, 4, 5];
            DMatrix::from_fn(5, 5, |r, c| a6[(rows[r], rows[c])])
        };
        let m_half = linear_monodromy(&a5, 0.5, 1e-12).unwrap().matrix;
        let m_one = linear_monodromy(&a5, 1.0, 1e-12).unwrap().matrix;
        let m_two = linear_monodromy(&a5, 2.0, 1e-12).unwrap().matrix;
        assert!(max_entry(&(&m_half - &m_one)) <= 1e-6);
        assert!(max_entry(&(&m_two - &m_one)) <= 1e-6);

        // a non-identity example for composition: spectrum with half-integers
        let b = DMatrix::from_row_slice(2, 2, &[
            c64(0.5, 0.0), c64(1.0, 0.0),
            c64(0.0, 0.0), c64(-0.5, 0.0),
        ]);
        let once = linear_monodromy(&b, 1.0, 1e-12).unwrap().matrix;
        let twice = linear_monodromy_turns(&b, 1.0, 2.0, 1e-12).unwrap();
        assert!(max_entry(&(&twice - &once.clone() * &once)) <= 1e-6);
    }

    #[test]
    fn affine_zero_forcing_zero_shift() {
        let a = DMatrix::from_row_slice(2, 2, &[
            c64(1.0, 0.0), c64(0.0, 0.0),
            c64(0.0, 0.0), c64(-1.0, 0.0),
        ]);
        let rep = affine_monodromy(&FrobeniusSystem::homogeneous(a), 1.0, 1e-11).unwrap();
        assert!(rep.particular_shift.norm() <= 1e-8);
        assert!(!rep.shift_in_log_direction);
    }

    fn unperturbed_model() -> KirchhoffModel {
        KirchhoffModel::kirchhoff_e3(
            c64(1.0, 0.0), c64(2.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0), c64(3.0, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn kirchhoff_affine_shift_is_pi_times_k4_direction() {
        // ln coefficient -i/2 gives loop shift 2 pi i (-i/2) v4 = pi v4 at r = 1
        let setup = perturbation_setup(
            &unperturbed_model(),
            PerturbationCase::Kirchhoff,
            c64(0.6, 0.0),
            c64(0.8, 0.0),
            c64(0.35, 0.0),
        )
        .unwrap();
        let rep = affine_monodromy(&setup.frobenius_system(), 1.0, 1e-12).unwrap();
        assert!(rep.shift_in_log_direction);
        let v4 = setup.k4_direction_at(1.0);
        let expected = &v4 * c64(std::f64::consts::PI, 0.0);
        let rel = (&rep.particular_shift - &expected).norm() / expected.norm();
        assert!(rel <= 1e-5, "shift mismatch {rel:e}");
        // magnitude check: |shift| = 2 pi |ln coeff| * |v4| / r
        let mag = rep.particular_shift.norm();
        let want = std::f64::consts::TAU * 0.5 * v4.norm();
        assert!((mag - want).abs() / want <= 1e-5);
        // homogeneous part is the identity
        let id = DMatrix::<C64>::identity(5, 5);
        assert!(max_entry(&(&rep.homogeneous.matrix - &id)) <= 1e-7);
        assert!(!rep.homogeneous.log_detected);
    }

    #[test]
    fn chaplygin_affine_shift_matches_ln_coefficient() {
        let setup = perturbation_setup(
            &unperturbed_model(),
            PerturbationCase::Chaplygin,
            c64(0.6, 0.0),
            c64(0.8, 0.0),
            c64(0.0, 0.0),
        )
        .unwrap();
        let rep = affine_monodromy(&setup.frobenius_system(), 1.0, 1e-12).unwrap();
        assert!(rep.shift_in_log_direction);
        let lncoef = c64(0.6 / 2f64.sqrt(), 0.0);
        let v4 = setup.k4_direction_at(1.0);
        let expected = v4 * c64(0.0, std::f64::consts::TAU) * lncoef;
        let rel = (&rep.particular_shift - &expected).norm() / expected.norm();
        assert!(rel <= 1e-5, "shift mismatch {rel:e}");
    }
}
