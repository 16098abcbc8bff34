//! Noisy and ideal simulation, shot sampling and the exact fidelity oracle.

mod density;
mod noise;
mod oracle;
mod shots;

pub use density::DensityMatrix;
pub use noise::NoiseModel;
pub use oracle::{
    exact_process_fidelity, noisy_unitary, process_fidelity_to_target,
    process_fidelity_to_target_with_limit, process_fidelity_unitaries, ORACLE_LIMIT,
};
pub use shots::{
    bitstring, bitstring_index, fake_uniform_shots, ideal_distribution,
    ideal_distribution_with_limit, noisy_distribution, readout_convolved, sample_shots,
    sample_shots_with, OutcomeDistribution, SamplingConfig, SamplingMethod, ShotTable,
    DENSITY_SAMPLING_LIMIT, SAMPLING_LIMIT, STATEVECTOR_LIMIT,
};
