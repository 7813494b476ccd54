//! Four-party states `Σ √λ_{αβ} |αα⟩_{AB} |ββ⟩_{A'B'}`: the entropy
//! identities hold exactly and `S(AA')` bounds the sum of the two EoFs.

use eof_core::eof::EofOptions;
use eof_core::probes::{case1_terms, check_case1};
use eof_core::statezoo::Case1Spec;

fn main() -> eof_core::Result<()> {
    let opts = EofOptions { restarts: 6, ..EofOptions::default() };
    let grids = [
        Case1Spec::new(vec![vec![0.25, 0.25], vec![0.25, 0.25]])?,
        Case1Spec::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]])?,
        Case1Spec::random(2, 3, 4)?,
        Case1Spec::random(3, 3, 5)?,
    ];
    for spec in &grids {
        let t = case1_terms(spec, &opts)?;
        let r = check_case1(spec, &opts, 1e-9, 1e-3)?;
        println!(
            "{}x{}: S(AA')={:.5} S(A)={:.5} S(A')={:.5} E(AB)={:.5} E(A'B')={:.5} superadditivity gap {:.2e} [{}]",
            spec.rows(),
            spec.cols(),
            t.s_aa,
            t.s_a,
            t.s_a2,
            t.eof_ab,
            t.eof_a2b2,
            t.s_aa - t.eof_ab - t.eof_a2b2,
            if r.passed { "ok" } else { "FAIL" }
        );
    }
    Ok(())
}
