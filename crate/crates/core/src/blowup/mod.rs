//! Recursive blow-up limits: level schedules, masks, sampling, densities and profiles.

mod density;
mod mask;
mod profile;
mod sample;
mod spec;

pub use density::{tind_blowup, DensityInterval, DensityValue, Mode, MAX_MOTIF};
pub use mask::{mask_measure, prune_spec, random_mask, Child, MaskNode, PrunedSpec, MAX_MASK_DEPTH};
pub use profile::{
    family_json, persistence_probe, positive_profile, ProbeReport, ProfileReport, Verdict,
    MAX_PROFILE_SIZE, PROBE_DEPTH,
};
pub use sample::{rng, sample_pruned, tind_step, uniform_index, StepGraphon, MAX_STEP_MOTIF};
pub use spec::{
    mell, spec_from_json, BlowupSpec, CycleQuadratic, LevelRule, Tail, MAX_FINITE_BLOWUP,
};


use crate::error::Result;
use crate::structure::Structure;

/// Anything that draws finite random structures from a seed.
pub trait ModelSource {
    fn sample(&self, n: usize, seed: u64) -> Result<Structure>;
}

impl ModelSource for BlowupSpec {
    fn sample(&self, n: usize, seed: u64) -> Result<Structure> {
        sample_pruned(&PrunedSpec::full(self.clone()), n, seed)
    }
}

impl ModelSource for PrunedSpec {
    fn sample(&self, n: usize, seed: u64) -> Result<Structure> {
        sample_pruned(self, n, seed)
    }
}

impl ModelSource for StepGraphon {
    fn sample(&self, n: usize, seed: u64) -> Result<Structure> {
        Ok(StepGraphon::sample(self, n, seed).to_structure())
    }
}

pub fn sample_model(source: &dyn ModelSource, n: usize, seed: u64) -> Result<Structure> {
    source.sample(n, seed)
}
