//! Minimized EoF of two-qubit Werner states next to the closed form.
//!
//! ```text
//! cargo run --release --example werner_eof
//! ```

use eof_core::eof::{concurrence_2q, eof_minimize, eof_wootters_2q, EofOptions};
use eof_core::qstate::Cut;
use eof_core::statezoo::{werner_phi_from_singlet_weight, werner_state};

fn main() -> eof_core::Result<()> {
    let opts = EofOptions { restarts: 8, ..EofOptions::default() };
    println!("{:>6} {:>7} {:>11} {:>11} {:>9}", "p", "phi", "closed", "minimized", "members");
    for p in [0.25, 0.4, 0.55, 0.7, 0.85, 1.0] {
        let phi = werner_phi_from_singlet_weight(p);
        let rho = werner_state(2, phi)?;
        let est = eof_minimize(&rho, &Cut::new([0]), &opts)?;
        println!(
            "{p:>6.2} {phi:>7.3} {:>11.6} {:>11.6} {:>9}   C={:.4}",
            eof_wootters_2q(&rho)?,
            est.value,
            est.best_ensemble.len(),
            concurrence_2q(&rho)?
        );
    }
    Ok(())
}
