//! The four-dimensional cases on e(4)*: Liouville integrability of the
//! Kirchhoff case, the mixed-term obstruction, and the invariant relations of
//! the Chaplygin case.
//!
//! Run with: cargo run --example e4_integrability

use kirchhoff::dim4::{
    chaplygin4_invariant_check, integrals4, involution_matrix, proposition1_witness,
    validate_f5_binding,
};
use kirchhoff::liepoisson::ChaplyginE4Coeffs;
use kirchhoff::{c64, KirchhoffModel, PhaseState};

fn main() {
    let model = KirchhoffModel::kirchhoff_e4(
        c64(1.0, 0.0), c64(1.5, 0.0), c64(2.0, 0.0), c64(0.5, 0.0), c64(1.0, 0.0), c64(2.0, 0.0), &[],
    )
    .unwrap();

    // integral values at the unit example state
    let mut m = [c64(0.0, 0.0); 6];
    m[0] = c64(1.0, 0.0);
    let x = PhaseState::e4(m, [c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]);
    let v = integrals4(&model, &x).unwrap();
    println!("integrals at M12 = 1, p = (1,0,0,0):");
    println!("  F1 = {:?}  F2 = {:?}  F3 = {:?}  F4 = {:?}  F5 = {:?}", v.f1, v.f2, v.f3, v.f4, v.f5);

    // involution of {H, F1..F5} at 1000 seeded random complex states
    let inv = involution_matrix(&model, 1000, 42).unwrap();
    println!("\npairwise bracket maxima over 1000 random states:");
    print!("{:>8}", "");
    for n in &inv.names {
        print!("{n:>10}");
    }
    println!();
    for (i, row) in inv.max_abs_bracket.iter().enumerate() {
        print!("{:>8}", inv.names[i]);
        for v in row {
            print!("{v:>10.1e}");
        }
        println!();
    }
    println!("max off-diagonal: {:.3e}", inv.max_offdiagonal);

    let binding = validate_f5_binding(&model, 300, 42, 1e-10).unwrap();
    println!("F5 symbol binding {} validated: {}", binding.default_binding, binding.default_passes);

    // any nonzero mixed term moves M12 or M34
    println!("\nmixed-term obstruction witnesses:");
    for b in [(1, 2, 1), (1, 2, 3), (3, 4, 1), (3, 4, 3)] {
        let w = proposition1_witness(&[(b, c64(1.0, 0.0))], 42).unwrap();
        println!("  B{}{}{} = 1: d{}/dt = {} at a unit state", b.0, b.1, b.2, w.observable, w.rate);
    }

    // Chaplygin case: M12, M34 are invariant relations, not first integrals
    let chaplygin = KirchhoffModel::chaplygin_e4(ChaplyginE4Coeffs {
        a1212: c64(1.0, 0.0),
        a1313: c64(1.5, 0.0),
        a3434: c64(2.0, 0.0),
        a1234: c64(0.5, 0.0),
        a1213: c64(0.3, 0.0),
        a1214: c64(-0.2, 0.0),
        a1223: c64(0.15, 0.0),
        a1224: c64(0.4, 0.0),
        a1334: c64(-0.25, 0.0),
        a1434: c64(0.35, 0.0),
        a2334: c64(0.1, 0.0),
        a2434: c64(-0.3, 0.0),
        b121: c64(0.2, 0.0),
        b122: c64(-0.4, 0.0),
        b123: c64(0.1, 0.0),
        b124: c64(0.3, 0.0),
        b341: c64(-0.15, 0.0),
        b342: c64(0.25, 0.0),
        b343: c64(0.05, 0.0),
        b344: c64(-0.2, 0.0),
        c11: c64(1.0, 0.0),
        c33: c64(2.0, 0.0),
    })
    .unwrap();
    let rep = chaplygin4_invariant_check(&chaplygin, 1e-10, 42, 5).unwrap();
    println!("\nChaplygin e(4) invariant relations (5 submanifold starts, unit time):");
    println!("  M12 drift {:.3e}, M34 drift {:.3e}", rep.max_drift_m12, rep.max_drift_m34);
    println!("  pointwise {{M12, H}}, {{M34, H}} on the submanifold: {:.3e}", rep.pointwise_bracket_max);
    println!("  off the submanifold the bracket is O(1): {:.3e}", rep.off_manifold_bracket_max);
}
