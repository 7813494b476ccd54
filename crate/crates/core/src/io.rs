//! JSON file formats for states, ensembles and raw matrices.
//!
//! A state file looks like
//!
//! ```json
//! { "dims": [2, 2], "kind": "density", "data": [[0.5, 0.0], [0.0, 0.0], ...] }
//! ```
//!
//! `data` is row-major `[re, im]` pairs (the amplitude list for `"pure"`).
//! Numbers are written in shortest round-trip form, so reading a written file
//! reproduces every entry bit for bit. Readers validate the state invariants.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ensembles::Ensemble;
use crate::error::{Error, Result};
use crate::qmat::{c64, CMatrix, CVector};
use crate::qstate::{DensityMatrix, PureState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Density,
    Pure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub kind: StateKind,
    pub data: Vec<[f64; 2]>,
}

/// A loaded state of either kind.
#[derive(Clone, Debug, PartialEq)]
pub enum State {
    Density(DensityMatrix),
    Pure(PureState),
}

impl State {
    pub fn dims(&self) -> &[usize] {
        match self {
            State::Density(r) => r.dims(),
            State::Pure(p) => p.dims(),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            State::Density(r) => r.clone(),
            State::Pure(p) => p.to_density(),
        }
    }
}

fn pairs(entries: impl IntoIterator<Item = num_complex::Complex64>) -> Vec<[f64; 2]> {
    entries.into_iter().map(|z| [z.re, z.im]).collect()
}

impl StateFile {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        Self { dims: rho.dims().to_vec(), kind: StateKind::Density, data: pairs(rho.matrix().to_row_major()) }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self { dims: psi.dims().to_vec(), kind: StateKind::Pure, data: pairs(psi.vector().iter().copied()) }
    }

    pub fn from_state(s: &State) -> Self {
        match s {
            State::Density(r) => Self::from_density(r),
            State::Pure(p) => Self::from_pure(p),
        }
    }

    /// Validates and converts.
    pub fn to_state(&self) -> Result<State> {
        let entries: Vec<_> = self.data.iter().map(|[re, im]| c64(*re, *im)).collect();
        let n: usize = self.dims.iter().product();
        match self.kind {
            StateKind::Pure => Ok(State::Pure(PureState::new(self.dims.clone(), CVector::from_vec(entries))?)),
            StateKind::Density => {
                if entries.len() != n * n {
                    return Err(Error::Shape(format!(
                        "density data has {} entries, expected {}",
                        entries.len(),
                        n * n
                    )));
                }
                Ok(State::Density(DensityMatrix::new(self.dims.clone(), CMatrix::new(n, n, entries)?)?))
            }
        }
    }

    pub fn to_pure(&self) -> Result<PureState> {
        match self.to_state()? {
            State::Pure(p) => Ok(p),
            State::Density(_) => Err(Error::Argument("expected a pure state".into())),
        }
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        Ok(self.to_state()?.to_density())
    }
}

pub fn read_state(path: impl AsRef<Path>) -> Result<State> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str::<StateFile>(&text)?.to_state()
}

pub fn write_state(path: impl AsRef<Path>, state: &State) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(&StateFile::from_state(state))?)?;
    Ok(())
}

/// One entry of an ensemble file: `{"weight": p, "state": <state file>}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub weight: f64,
    pub state: StateFile,
}

pub fn ensemble_to_file(e: &Ensemble) -> Vec<EnsembleMember> {
    e.members().iter().map(|(w, s)| EnsembleMember { weight: *w, state: StateFile::from_pure(s) }).collect()
}

pub fn ensemble_from_file(members: &[EnsembleMember]) -> Result<Ensemble> {
    let members = members.iter().map(|m| Ok((m.weight, m.state.to_pure()?))).collect::<Result<Vec<_>>>()?;
    Ensemble::new(members)
}

pub fn read_ensemble(path: impl AsRef<Path>) -> Result<Ensemble> {
    let text = std::fs::read_to_string(path)?;
    ensemble_from_file(&serde_json::from_str::<Vec<EnsembleMember>>(&text)?)
}

pub fn write_ensemble(path: impl AsRef<Path>, e: &Ensemble) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(&ensemble_to_file(e))?)?;
    Ok(())
}

/// Row-major complex matrix payload.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        Self { rows: m.rows(), cols: m.cols(), data: pairs(m.to_row_major()) }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        CMatrix::new(self.rows, self.cols, self.data.iter().map(|[re, im]| c64(*re, *im)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statezoo::{random_density, random_isometry, random_pure};
    use proptest::prelude::*;

    #[test]
    fn layout_is_row_major_pairs() {
        let psi = PureState::basis(vec![2, 2], &[0, 1]).unwrap();
        let f = StateFile::from_pure(&psi);
        assert_eq!(f.data[1], [1.0, 0.0]);
        let json = serde_json::to_string(&f).unwrap();
        assert!(json.contains("\"kind\":\"pure\""));

        let mut m = CMatrix::from_real_diagonal(&[0.5, 0.5]);
        m.set(0, 1, c64(0.0, 0.25));
        m.set(1, 0, c64(0.0, -0.25));
        let rho = DensityMatrix::new(vec![2], m).unwrap();
        assert_eq!(StateFile::from_density(&rho).data[1], [0.0, 0.25]);
    }

    #[test]
    fn reader_validates() {
        let bad = StateFile { dims: vec![2], kind: StateKind::Pure, data: vec![[1.0, 0.0], [1.0, 0.0]] };
        assert!(matches!(bad.to_state(), Err(Error::Normalization(_))));
        let bad = StateFile { dims: vec![2], kind: StateKind::Density, data: vec![[1.0, 0.0]; 3] };
        assert!(bad.to_state().is_err());
        let bad = StateFile {
            dims: vec![2],
            kind: StateKind::Density,
            data: vec![[1.0, 0.0], [0.5, 0.0], [0.0, 0.0], [0.0, 0.0]],
        };
        assert!(matches!(bad.to_state(), Err(Error::Symmetry { .. })));
    }

    #[test]
    fn files_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let rho = random_density(3, 2, 1).unwrap();
        let path = dir.path().join("rho.json");
        write_state(&path, &State::Density(rho.clone())).unwrap();
        assert_eq!(read_state(&path).unwrap(), State::Density(rho.clone()));

        let e = crate::ensembles::hjw_ensemble(&rho, &random_isometry(4, 2, 2).unwrap(), 0.0).unwrap();
        let path = dir.path().join("ens.json");
        write_ensemble(&path, &e).unwrap();
        let back = read_ensemble(&path).unwrap();
        assert_eq!(back, e);
    }

    proptest! {
        #[test]
        fn pure_states_round_trip_exactly(seed in any::<u64>(), d1 in 1usize..4, d2 in 1usize..4) {
            let psi = random_pure(vec![d1, d2], seed).unwrap();
            let text = serde_json::to_string(&StateFile::from_pure(&psi)).unwrap();
            let back: StateFile = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back.to_pure().unwrap(), psi);
        }

        #[test]
        fn matrices_round_trip_exactly(seed in any::<u64>(), m in 1usize..5) {
            let u = random_isometry(m + 1, m, seed).unwrap();
            let text = serde_json::to_string(&MatrixFile::from_matrix(u.matrix())).unwrap();
            let back: MatrixFile = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(&back.to_matrix().unwrap(), u.matrix());
        }
    }
}
