use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::generator::{short_mds_generator, vandermonde_parity};
use super::rank::{RankContext, VerifyOptions};
use super::{CodeParams, Layout};
use crate::designs::BlockDesign;
use crate::error::{Error, Result};
use crate::ffield::{FieldMatrix, PrimeField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthesisStrategy {
    /// No long parities needed.
    Empty,
    /// Parity block of a systematic Vandermonde generator.
    Structured,
    /// Seeded uniform random draw number `attempt` (1-based).
    Random { attempt: usize },
}

#[derive(Debug, Clone)]
pub struct SynthesisOutcome {
    pub s: FieldMatrix,
    pub strategy: SynthesisStrategy,
    /// Candidates rejected before the returned one.
    pub failures: usize,
}

/// Draws a uniform `T × M` matrix from `rng`.
pub fn random_s(params: &CodeParams, field: &PrimeField, rng: &mut ChaCha8Rng) -> FieldMatrix {
    let q = field.modulus();
    let entries = (0..params.parity_count * params.m)
        .map(|_| rng.gen_range(0..q))
        .collect();
    FieldMatrix::from_entries(params.parity_count, params.m, entries).expect("sized")
}

/// Finds a verified long-layer matrix `S`: first the structured Vandermonde
/// candidate, then up to `budget` seeded random draws.
pub fn synthesize_s(
    params: &CodeParams,
    design: &BlockDesign,
    field: &PrimeField,
    seed: u64,
    budget: usize,
    verify: &VerifyOptions,
) -> Result<SynthesisOutcome> {
    synthesize_with(params, &Layout::ascending(design), field, seed, budget, verify, true)
}

pub(crate) fn synthesize_with(
    params: &CodeParams,
    layout: &Layout,
    field: &PrimeField,
    seed: u64,
    budget: usize,
    verify: &VerifyOptions,
    try_structured: bool,
) -> Result<SynthesisOutcome> {
    if params.parity_count == 0 {
        return Ok(SynthesisOutcome {
            s: FieldMatrix::zeros(0, params.m),
            strategy: SynthesisStrategy::Empty,
            failures: 0,
        });
    }
    if budget == 0 && !try_structured {
        return Err(Error::InvalidParams("synthesis budget must be at least 1".into()));
    }
    let short_gen = short_mds_generator(params.r, params.t, field)?;
    let ctx = RankContext {
        params,
        field,
        short_gen: &short_gen,
        layout,
    };
    let mut failures = 0;
    let total = params.m + params.parity_count;
    if try_structured && field.modulus() as u128 >= total as u128 {
        let s = vandermonde_parity(total, params.m, field)?;
        if ctx.verify(&s, verify)?.passed() {
            return Ok(SynthesisOutcome {
                s,
                strategy: SynthesisStrategy::Structured,
                failures,
            });
        }
        failures += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=budget {
        let s = random_s(params, field, &mut rng);
        if ctx.verify(&s, verify)?.passed() {
            return Ok(SynthesisOutcome {
                s,
                strategy: SynthesisStrategy::Random { attempt },
                failures,
            });
        }
        failures += 1;
    }
    Err(Error::SynthesisExhausted {
        failures,
        threshold: params.existence_threshold(),
        q: field.modulus(),
    })
}
