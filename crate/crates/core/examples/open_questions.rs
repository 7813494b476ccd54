//! Counterexample searches for the two open member-wise inequalities and for
//! superadditivity. Block-diagonal inputs never violate them; random factors
//! may, and such a violation is a finding about the inequality.

use eof_core::eof::EofOptions;
use eof_core::probes::{
    probe_question1, probe_question2, superadditivity_probe, ProbeParams, ProbeResult, QuestionInput, SuperSource,
};
use eof_core::statezoo::Case2Spec;

fn show(r: &ProbeResult) {
    println!("{:<16} {:<32} min gap {:+.4e}  violation {}", r.name, r.source, r.min_gap, r.violation_found);
    if let Some(i) = &r.implication {
        println!(
            "{:>17}q2 held on {}/{} members, q1 then failed on {}",
            "", i.question2_held, i.instances, i.question1_failed_given_question2
        );
    }
}

fn main() -> eof_core::Result<()> {
    let params = ProbeParams { trials: 100, seed: 3, slack: 1e-9 };
    let qutrit = Case2Spec::qutrit_example(0.5)?;
    let inputs = [QuestionInput::Case2 { a: qutrit.clone(), b: qutrit }, QuestionInput::Random { dims: [2, 2] }];
    for input in &inputs {
        show(&probe_question1(input, &params)?);
        show(&probe_question2(input, &params)?);
    }

    let opts = EofOptions::default();
    let params = ProbeParams { slack: 2e-3, ..params };
    for source in [SuperSource::Case1 { rows: 2, cols: 2 }, SuperSource::Random { dims: [2; 4] }, SuperSource::Werner] {
        show(&superadditivity_probe(&source, &params, &opts)?);
    }

    let worst = probe_question1(&inputs[1], &ProbeParams { trials: 100, seed: 3, slack: 1e-9 })?;
    println!("replayed worst question-1 instance: {:+.4e}", worst.argmin.reevaluate()?);
    Ok(())
}
