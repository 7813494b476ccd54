//! Writing zoo states to JSON and reading them back.

use eof_core::io::{read_state, write_state, State};
use eof_core::qstate::{reduced_state, von_neumann_entropy};
use eof_core::statezoo::{case1_state, werner_four_qubit, Case1Spec};

fn main() -> eof_core::Result<()> {
    let dir = std::env::temp_dir().join("eof-state-files");
    std::fs::create_dir_all(&dir)?;

    let psi = case1_state(&Case1Spec::new(vec![vec![0.4, 0.1], vec![0.1, 0.4]])?)?;
    let path = dir.join("case1.json");
    write_state(&path, &State::Pure(psi.clone()))?;
    let back = match read_state(&path)? {
        State::Pure(p) => p,
        State::Density(_) => unreachable!("written as a pure state"),
    };
    println!("{}: S(AA') = {:.6}", path.display(), von_neumann_entropy(&reduced_state(&back, &[0, 2])?));

    let path = dir.join("werner4.json");
    write_state(&path, &State::Density(werner_four_qubit(-0.5)?))?;
    let rho = read_state(&path)?.to_density();
    println!("{}: dims {:?}, rank {}", path.display(), rho.dims(), rho.rank(1e-10));
    Ok(())
}
