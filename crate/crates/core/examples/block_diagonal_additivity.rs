//! Products of block-diagonal factors: every member of a sampled
//! decomposition obeys the entropy chain, and the minimized EoF of the
//! product equals the sum of the factor EoFs.

use eof_core::eof::EofOptions;
use eof_core::probes::{check_case2, Case2Params};
use eof_core::statezoo::{case2_factor, Case2Spec};

fn main() -> eof_core::Result<()> {
    let opts = EofOptions { restarts: 6, ..EofOptions::default() };
    let params = Case2Params { decompositions: 10, ..Case2Params::default() };
    let a = Case2Spec::classical_qubits(0.3)?;
    let b = Case2Spec::pure_qubits(0.5)?;
    println!("factor spectra: {:?} {:?}", case2_factor(&a)?.eig().values, case2_factor(&b)?.eig().values);

    let r = check_case2(&a, &b, &opts, &params)?;
    for c in &r.components {
        println!("{:<11} {:?} min gap {:+.3e} passed {}", c.name, c.semantics, c.min_gap, c.passed);
    }
    for s in r.per_sample.iter().flatten().filter(|s| s.component == "additivity") {
        println!("additivity: {}", s.descriptor);
    }
    Ok(())
}
