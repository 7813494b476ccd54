//! Every decomposition of a mixed state comes from an isometry applied to its
//! eigen-ensemble. Random isometries give different ensembles of the same
//! state with different average entanglement.

use eof_core::ensembles::{hjw_ensemble, mix, Ensemble, PRUNE_TOL};
use eof_core::eof::ensemble_average_entanglement;
use eof_core::qstate::Cut;
use eof_core::statezoo::{random_density_with, random_isometry, stream_rng};

fn main() -> eof_core::Result<()> {
    let rho = random_density_with(&mut stream_rng(11, 0), vec![2, 2], 3)?;
    let cut = Cut::new([0]);
    let eigen = Ensemble::eigen(&rho);
    println!("eigen-ensemble: {} members, <E> = {:.6}", eigen.len(), ensemble_average_entanglement(&eigen, &cut)?);

    for (seed, m) in [(1, 3), (2, 5), (3, 8), (4, 12)] {
        let u = random_isometry(m, 3, seed)?;
        let e = hjw_ensemble(&rho, &u, PRUNE_TOL)?;
        let err = (mix(&e).matrix() - rho.matrix()).frobenius_norm();
        println!(
            "m = {m:>2}: <E> = {:.6}, weights {:?}, reconstruction error {err:.1e}",
            ensemble_average_entanglement(&e, &cut)?,
            e.weights().iter().map(|w| (w * 1e3).round() / 1e3).collect::<Vec<_>>()
        );
    }
    Ok(())
}
