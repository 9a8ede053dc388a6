//! Monodromy as an independent, non-series detector of logarithms: the
//! homogeneous variational system has identity monodromy, while the affine
//! first-order system picks up a loop shift of 2 pi i times the ln
//! coefficient along the k4 direction.
//!
//! Run with: cargo run --example monodromy_loop

use kirchhoff::frobenius::{perturbation_setup, PerturbationCase};
use kirchhoff::monodromy::{affine_monodromy, linear_monodromy, monodromy_oracle};
use kirchhoff::{c64, KirchhoffModel};
use nalgebra::DMatrix;

fn main() {
    let model = KirchhoffModel::kirchhoff_e3(
        c64(1.0, 0.0), c64(2.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0), c64(3.0, 0.0),
    )
    .unwrap();
    let setup = perturbation_setup(
        &model,
        PerturbationCase::Kirchhoff,
        c64(0.6, 0.0),
        c64(0.8, 0.0),
        c64(0.35, 0.0),
    )
    .unwrap();

    // homogeneous: integer semisimple spectrum, so the loop matrix is Id
    let hom = linear_monodromy(&setup.a5, 1.0, 1e-12).unwrap();
    let id = DMatrix::identity(5, 5);
    let id_dev = (&hom.matrix - &id).iter().map(|z| z.norm()).fold(0.0, f64::max);
    println!("homogeneous monodromy:");
    println!("  eigenvalues: {:?}", hom.eigenvalues.iter().map(|e| format!("{:.6}", e)).collect::<Vec<_>>());
    println!("  |M - Id| = {id_dev:.3e}, unipotent defect = {}, log detected = {}", hom.unipotent_defect, hom.log_detected);

    // cross-validate against the scaling-and-squaring exponential
    let oracle = monodromy_oracle(&setup.a5);
    let oracle_dev = (&hom.matrix - &oracle).iter().map(|z| z.norm()).fold(0.0, f64::max);
    println!("  |M - exp(2 pi i A)| = {oracle_dev:.3e}");

    // a unipotent toy block for contrast: xi1 = c2 ln t + c1
    let nilpotent = DMatrix::from_row_slice(2, 2, &[
        c64(0.0, 0.0), c64(1.0, 0.0),
        c64(0.0, 0.0), c64(0.0, 0.0),
    ]);
    let rep = linear_monodromy(&nilpotent, 1.0, 1e-12).unwrap();
    println!("\nnilpotent block: M[0][1] = {} (expect 2 pi i), log detected = {}", rep.matrix[(0, 1)], rep.log_detected);

    // affine loop: the particular solution jumps by 2 pi i (ln coeff) v4 / r
    let affine = affine_monodromy(&setup.frobenius_system(), 1.0, 1e-12).unwrap();
    println!("\naffine first-order system around |t| = 1:");
    println!("  shift measured : {:?}", affine.particular_shift.iter().map(|z| format!("{:.6}", z)).collect::<Vec<_>>());
    println!("  shift predicted: {:?}", affine.predicted_shift.iter().map(|z| format!("{:.6}", z)).collect::<Vec<_>>());
    println!("  shift in the log direction: {}", affine.shift_in_log_direction);
    let y = setup.basis.clone().lu().solve(&affine.particular_shift).unwrap();
    println!(
        "  |k4 component| = {:.9} (2 pi |ln coeff| = {:.9})",
        y[3].norm(),
        std::f64::consts::TAU * 0.5
    );
}
