//! The log-Laurent series toolbox: exact arithmetic, the regular-singular
//! solver with resonance escalation, and residual verification.
//!
//! Run with: cargo run --example series_solver

use kirchhoff::frobenius::{frobenius_residual, frobenius_solve, FrobeniusSystem, LogLaurentSeries};
use kirchhoff::c64;
use nalgebra::DMatrix;

fn main() {
    // arithmetic: exponents add, log powers add, antiderivative creates logs
    let t_inv = LogLaurentSeries::monomial(-1, 0, c64(1.0, 0.0));
    println!("t^-1              = {t_inv}");
    println!("antideriv(t^-1)   = {}", t_inv.antideriv());
    let tln = LogLaurentSeries::monomial(1, 1, c64(1.0, 0.0));
    println!("t^-1 * (t ln t)   = {}", t_inv.mul(&tln));
    println!("d/dt (t ln t)     = {}", tln.diff());
    println!("antideriv(t^-1 ln t) = {}", t_inv.mul(&LogLaurentSeries::monomial(0, 1, c64(1.0, 0.0))).antideriv());

    // scalar resonance: xi' = xi/t + 1 has no pure power solution at s = 1;
    // the layer solve escalates the log power and returns xi = t ln t
    let a = DMatrix::from_row_slice(1, 1, &[c64(1.0, 0.0)]);
    let sys = FrobeniusSystem::new(a.clone(), vec![LogLaurentSeries::constant(c64(1.0, 0.0))]);
    let sol = frobenius_solve(&sys).unwrap();
    println!("\nresonant solve of xi' = xi/t + 1:");
    println!("  xi = {}", sol.series[0]);
    println!("  residual (exact substitution): {:.1e}", frobenius_residual(&sys, &sol.series));
    for ev in &sol.resonances {
        println!(
            "  exponent {}: kernel dim {}, escalated to logs = {}",
            ev.exponent, ev.kernel_dim, ev.escalated_log
        );
    }

    // nonresonant forcing stays log-free
    let sys2 = FrobeniusSystem::new(a, vec![LogLaurentSeries::monomial(1, 0, c64(1.0, 0.0))]);
    let sol2 = frobenius_solve(&sys2).unwrap();
    println!("\nnonresonant solve of xi' = xi/t + t:");
    println!("  xi = {}", sol2.series[0]);

    // a 2x2 system with a nilpotent-free double resonance
    let a = DMatrix::from_row_slice(2, 2, &[
        c64(1.0, 0.0), c64(0.0, 0.0),
        c64(0.0, 0.0), c64(1.0, 0.0),
    ]);
    let forcing = vec![
        LogLaurentSeries::constant(c64(2.0, 0.0)),
        LogLaurentSeries::constant(c64(0.0, -1.0)),
    ];
    let sys3 = FrobeniusSystem::new(a, forcing);
    let sol3 = frobenius_solve(&sys3).unwrap();
    println!("\ndouble resonance, both components escalate:");
    for (i, s) in sol3.series.iter().enumerate() {
        println!("  xi_{i} = {s}");
    }
    println!("  residual: {:.1e}", frobenius_residual(&sys3, &sol3.series));
}
