//! Lie-Poisson structure on e(3)* and e(4)*: brackets, Casimirs, and the
//! generated equations of motion.
//!
//! Run with: cargo run --example bracket_and_casimirs

use kirchhoff::liepoisson::displayed_field_discrepancies;
use kirchhoff::{bracket, c64, invariants_of, Dim, KirchhoffModel, Observable, ObservableKind, PhaseState};

fn main() {
    // {M1, M2} = -M3 at M = (0, 0, 1)
    let x = PhaseState::e3(
        [c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)],
        [c64(0.0, 0.0); 3],
    );
    let m1 = Observable::coordinate(Dim::E3, 0, ObservableKind::FirstIntegral);
    let m2 = Observable::coordinate(Dim::E3, 1, ObservableKind::FirstIntegral);
    println!("{{M1, M2}} at M = e3      : {}", bracket(&m1, &m2, &x).unwrap());

    // axially symmetric model: A = diag(1,1,2), B = diag(0,0,0.1), C = diag(1,1,3)
    let model = KirchhoffModel::kirchhoff_e3(
        c64(1.0, 0.0), c64(2.0, 0.0), c64(0.0, 0.0), c64(0.1, 0.0), c64(1.0, 0.0), c64(3.0, 0.0),
    )
    .unwrap();
    println!("model case               : {}", model.case().label());
    println!("perturbation parameter   : {} (= b3 - b1)", model.epsilon());

    println!("\ninvariants and Casimirs:");
    let state = PhaseState::e3(
        [c64(1.0, 0.0), c64(2.0, 0.0), c64(3.0, 0.0)],
        [c64(1.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0)],
    );
    for obs in invariants_of(&model) {
        println!("  {:<6} = {}  ({:?})", obs.name, obs.eval(&state), obs.kind);
    }

    // the bracket generates the field; the displayed system is only an oracle,
    // and its second row differs (M2 M3 where the bracket yields M1 M3)
    println!("\ndisplayed-system comparison (200 random states):");
    for d in displayed_field_discrepancies(&model, 200, 1) {
        println!(
            "  row {:<3} disagrees with the generated field, max |delta| = {:.3e}",
            d.coordinate, d.max_abs_difference
        );
    }

    // e(4): F1, F2 commute with every coordinate
    let model4 = KirchhoffModel::kirchhoff_e4(
        c64(1.0, 0.0), c64(1.5, 0.0), c64(2.0, 0.0), c64(0.5, 0.0), c64(1.0, 0.0), c64(2.0, 0.0), &[],
    )
    .unwrap();
    let mut m6 = [c64(0.0, 0.0); 6];
    m6[0] = c64(0.3, 0.1);
    m6[4] = c64(-0.2, 0.4);
    let x4 = PhaseState::e4(m6, [c64(0.5, 0.0), c64(0.1, -0.3), c64(0.7, 0.2), c64(-0.4, 0.0)]);
    let casimirs: Vec<_> = invariants_of(&model4)
        .into_iter()
        .filter(|o| o.kind == ObservableKind::Casimir)
        .collect();
    println!("\ne(4) Casimir brackets with all coordinates:");
    for c in &casimirs {
        let worst = (0..10)
            .map(|i| {
                let g = Observable::coordinate(Dim::E4, i, ObservableKind::FirstIntegral);
                bracket(c, &g, &x4).unwrap().norm()
            })
            .fold(0.0, f64::max);
        println!("  max |{{{}, x_i}}| = {worst:.3e}", c.name);
    }
}
