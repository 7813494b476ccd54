//! Sampled suites for the entropy relations underlying the additivity proofs:
//! the flagged-state identity, strong concavity and strong subadditivity.

use eof_core::probes::{check_flagged_identity, check_ssa, check_strong_concavity, CheckReport, SuiteParams};

fn show(r: &CheckReport) {
    println!("{} ({} samples): passed = {}", r.name, r.samples, r.passed);
    for c in &r.components {
        match c.max_abs_residual {
            Some(res) => println!("  {:<20} identity   max |residual| {res:.2e}", c.name),
            None => println!("  {:<20} inequality min gap       {:.2e}", c.name, c.min_gap),
        }
    }
}

fn main() -> eof_core::Result<()> {
    let params = |dims: &[usize]| SuiteParams { samples: 200, dims: dims.to_vec(), seed: 1, tol: 1e-9 };
    show(&check_flagged_identity(&params(&[2, 3, 4]))?);
    show(&check_strong_concavity(&params(&[2, 3]))?);
    show(&check_ssa(&params(&[2, 2, 2]))?);
    Ok(())
}
