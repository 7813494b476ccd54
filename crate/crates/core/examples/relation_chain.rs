//! Four minimizations over decompositions of a product state, each expected
//! to equal the sum of the factor EoFs. The product has rank 16, so this
//! takes about a minute.

use eof_core::eof::{eof_wootters_2q, EofOptions};
use eof_core::probes::relation_chain_check;
use eof_core::statezoo::{werner_phi_from_singlet_weight, werner_state};

fn main() -> eof_core::Result<()> {
    let opts = EofOptions { restarts: 6, ..EofOptions::default() };
    let a = werner_state(2, werner_phi_from_singlet_weight(0.9))?;
    let b = werner_state(2, werner_phi_from_singlet_weight(0.75))?;
    println!("factor EoFs {:.6} + {:.6}", eof_wootters_2q(&a)?, eof_wootters_2q(&b)?);
    let r = relation_chain_check(&a, &b, &opts, 5e-2)?;
    for s in r.per_sample.iter().flatten() {
        println!("{:<16} {}  ({:+.2e})", s.component, s.descriptor, s.gap);
    }
    println!("passed: {}", r.passed);
    Ok(())
}
