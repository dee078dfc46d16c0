//! Monte-Carlo availability of random trace reservoirs.
//!
//! A reservoir is `N` tail vertices whose traces on a core of size `m` are
//! drawn independently from a distribution `μ`. Given `m − 1` traces whose
//! classes form a basis of `F2^U / <1_U>`, each with probability at least
//! `p`, the chance that some basis trace falls below multiplicity `q` is at
//! most `(m − 1)·exp(−Np/8)` once `Np ≥ 2q`.
//!
//! Randomness: trial `i` draws from ChaCha8 seeded with `seed` on stream `i`,
//! so results do not depend on scheduling.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::absorb::CoreSystem;
use crate::error::{Error, Result};
use crate::gf2::{self, BitMatrix, BitVector};
use crate::graph::VertexSet;
use crate::traces::TraceTable;
use crate::witness::quotient_coords_at;

pub const RNG_ALGORITHM: &str = "ChaCha8Rng::seed_from_u64(seed), stream = trial index";

const PROBABILITY_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedTrace {
    /// Core positions `0..m`.
    pub trace: Vec<usize>,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TraceDistribution {
    /// Every subset of the core with probability `2^−m`.
    Uniform,
    Explicit {
        traces: Vec<WeightedTrace>,
        /// `m − 1` traces whose quotient classes form a basis.
        basis: Vec<Vec<usize>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReservoirSpec {
    pub m: usize,
    pub q: u64,
    pub distribution: TraceDistribution,
    pub samples: usize,
    pub trials: usize,
    pub seed: u64,
}

enum Sampler {
    Uniform {
        mask: u64,
    },
    Explicit {
        traces: Vec<BitVector>,
        index: WeightedIndex<f64>,
    },
}

/// A validated spec with its sampler.
struct Prepared {
    sampler: Sampler,
}

fn to_mask(m: usize, trace: &[usize]) -> Result<BitVector> {
    BitVector::from_indices(m, trace.iter().copied())
        .map_err(|_| Error::InvalidDistribution(format!("trace {trace:?} leaves the core 0..{m}")))
}

impl ReservoirSpec {
    fn prepare(&self) -> Result<Prepared> {
        if self.m == 0 {
            return Err(Error::InvalidDistribution(
                "core size must be at least 1".into(),
            ));
        }
        if !self.q.is_power_of_two() {
            return Err(Error::InvalidModulus(self.q, "q must be a power of two"));
        }
        if self.samples == 0 || self.trials == 0 {
            return Err(Error::InvalidDistribution(
                "samples and trials must be at least 1".into(),
            ));
        }
        let m = self.m;
        let sampler = match &self.distribution {
            TraceDistribution::Uniform => {
                if m > 63 {
                    return Err(Error::InvalidDistribution(
                        "uniform sampling needs m <= 63".into(),
                    ));
                }
                Sampler::Uniform {
                    mask: (1u64 << m) - 1,
                }
            }
            TraceDistribution::Explicit { traces, .. } => {
                let mut total = 0.0;
                for t in traces {
                    if !t.probability.is_finite() || t.probability < 0.0 {
                        return Err(Error::InvalidDistribution(format!(
                            "probability {} is not a nonnegative number",
                            t.probability
                        )));
                    }
                    total += t.probability;
                }
                if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
                    return Err(Error::InvalidDistribution(format!(
                        "probabilities sum to {total}"
                    )));
                }
                let masks = traces
                    .iter()
                    .map(|t| to_mask(m, &t.trace))
                    .collect::<Result<_>>()?;
                let weights: Vec<f64> = traces.iter().map(|t| t.probability).collect();
                let index = WeightedIndex::new(&weights)
                    .map_err(|e| Error::InvalidDistribution(e.to_string()))?;
                Sampler::Explicit {
                    traces: masks,
                    index,
                }
            }
        };
        Ok(Prepared { sampler })
    }

    /// The basis family whose availability is measured, and its minimum
    /// probability `p`. Uniform: the singletons other than position 0.
    pub fn basis_family(&self) -> Result<(Vec<BitVector>, f64)> {
        let m = self.m;
        if m == 0 {
            return Err(Error::InvalidDistribution(
                "core size must be at least 1".into(),
            ));
        }
        match &self.distribution {
            TraceDistribution::Uniform => {
                let basis = (1..m).map(|u| to_mask(m, &[u])).collect::<Result<_>>()?;
                Ok((basis, (-(m as f64)).exp2()))
            }
            TraceDistribution::Explicit { traces, basis } => {
                let basis: Vec<BitVector> =
                    basis.iter().map(|b| to_mask(m, b)).collect::<Result<_>>()?;
                let columns: Vec<BitVector> =
                    basis.iter().map(|b| quotient_coords_at(b, 0)).collect();
                if basis.len() != m - 1
                    || gf2::rank(&BitMatrix::from_columns(m - 1, &columns)?) != m - 1
                {
                    return Err(Error::InvalidDistribution(format!(
                        "basis family must be {} traces with independent quotient classes",
                        m - 1
                    )));
                }
                let mut probability: BTreeMap<BitVector, f64> = BTreeMap::new();
                for t in traces {
                    *probability.entry(to_mask(m, &t.trace)?).or_insert(0.0) += t.probability;
                }
                let p = basis
                    .iter()
                    .map(|b| probability.get(b).copied().unwrap_or(0.0))
                    .fold(1.0, f64::min);
                if p <= 0.0 {
                    return Err(Error::InvalidDistribution(
                        "a basis trace has probability zero".into(),
                    ));
                }
                Ok((basis, p))
            }
        }
    }
}

impl Prepared {
    fn sample(&self, spec: &ReservoirSpec, trial: u64) -> Result<TraceTable> {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(trial);
        let mut entries: BTreeMap<BitVector, Vec<usize>> = BTreeMap::new();
        for i in 0..spec.samples {
            let trace = match &self.sampler {
                Sampler::Uniform { mask } => {
                    BitVector::from_u64(spec.m, rng.random::<u64>() & mask)
                }
                Sampler::Explicit { traces, index } => traces[index.sample(&mut rng)].clone(),
            };
            entries.entry(trace).or_default().push(spec.m + i);
        }
        TraceTable::from_entries(VertexSet::range(spec.m), entries)
    }
}

/// The reservoir of one trial. Core ids are `0..m`, tail ids `m..m+N`.
pub fn sample_reservoir(spec: &ReservoirSpec, trial: u64) -> Result<TraceTable> {
    spec.prepare()?.sample(spec, trial)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AvailabilityReport {
    pub spec: ReservoirSpec,
    pub rng: String,
    pub p: f64,
    pub np: f64,
    /// `Np ≥ 2q`; outside it the bound is advisory only.
    pub hypothesis_holds: bool,
    pub bound: f64,
    /// One character per trial: `1` when every basis trace reached multiplicity `q`.
    pub availability_bits: String,
    pub failures: usize,
    pub failure_rate: f64,
    pub rank_rich_rate: f64,
}

/// Samples `trials` reservoirs and measures how often the basis family is
/// fully available and how often the available traces span the quotient.
pub fn estimate_availability(spec: &ReservoirSpec) -> Result<AvailabilityReport> {
    let prepared = spec.prepare()?;
    let (basis, p) = spec.basis_family()?;
    let outcomes: Vec<(bool, bool)> = (0..spec.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let table = prepared.sample(spec, trial)?;
            let available = basis.iter().all(|b| table.count(b) as u64 >= spec.q);
            let spans = spec.m == 1 || CoreSystem::new(&table, spec.q)?.spans();
            if available && !spans {
                return Err(Error::Internal("basis traces available but no span".into()));
            }
            Ok((available, spans))
        })
        .collect::<Result<_>>()?;
    let trials = outcomes.len() as f64;
    let failures = outcomes.iter().filter(|o| !o.0).count();
    let rich = outcomes.iter().filter(|o| o.1).count();
    let np = spec.samples as f64 * p;
    Ok(AvailabilityReport {
        spec: spec.clone(),
        rng: RNG_ALGORITHM.to_string(),
        p,
        np,
        hypothesis_holds: np >= 2.0 * spec.q as f64,
        bound: (spec.m as f64 - 1.0) * (-np / 8.0).exp(),
        availability_bits: outcomes
            .iter()
            .map(|o| if o.0 { '1' } else { '0' })
            .collect(),
        failures,
        failure_rate: failures as f64 / trials,
        rank_rich_rate: rich as f64 / trials,
    })
}

/// Smallest `N` meeting both `Np ≥ 2q` and `(m−1)·exp(−Np/8) ≤ δ` for the
/// uniform distribution, `p = 2^−m`.
pub fn uniform_sample_size(m: usize, q: u64, delta: f64) -> usize {
    let inv_p = (m as f64).exp2();
    let chernoff = if m > 1 {
        8.0 * inv_p * ((m as f64 - 1.0) / delta).ln()
    } else {
        0.0
    };
    (2.0 * q as f64 * inv_p).max(chernoff).ceil() as usize
}
