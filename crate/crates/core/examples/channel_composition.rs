//! Preparation, computation and measurement as composable stages.

use qsat::circuit::StateVector;
use qsat::cnf::CnfFormula;
use qsat::pipeline::{compose_channels, sat_channels, ChannelStage, ChannelState, StageLabel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = CnfFormula::from_ints(2, &[&[1, 2]])?;
    let (stages, layout) = sat_channels(&f)?;
    let input = ChannelState::Vector(StateVector::zero(layout.num_qubits())?);
    let labels: Vec<_> = stages.iter().map(|s| s.label).collect();
    println!("stages {labels:?}");
    match compose_channels(&stages, input)? {
        ChannelState::Measured(m) => println!(
            "P(result = 1) = {} ; post-measurement state kept: {}",
            m.probability,
            m.post_state.is_some()
        ),
        ChannelState::Vector(_) => unreachable!(),
    }

    let unsat = CnfFormula::from_ints(1, &[&[1], &[-1]])?;
    let (stages, layout) = sat_channels(&unsat)?;
    let out = compose_channels(
        &stages,
        ChannelState::Vector(StateVector::zero(layout.num_qubits())?),
    )?;
    if let ChannelState::Measured(m) = out {
        println!(
            "contradiction: P = {}, post state {:?}",
            m.probability, m.post_state
        );
    }

    let backwards = [
        ChannelStage::identity(StageLabel::Measurement),
        ChannelStage::identity(StageLabel::Computation),
    ];
    let err =
        compose_channels(&backwards, ChannelState::Vector(StateVector::zero(1)?)).unwrap_err();
    println!("out-of-order stages: {err}");
    Ok(())
}
