use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::exec::bit;
use crate::error::{invalid, Error, Result};
use crate::qmath::{QuantumState, StateVector, CONSTRUCTION_TOL};

/// Branches below this Born probability have no conditional state.
pub const EMPTY_BRANCH_PROBABILITY: f64 = 1e-12;

/// All bitstrings of length `k`, in ascending numeric order.
pub fn bitstrings(k: usize) -> Vec<String> {
    (0..1usize << k).map(|i| format_bits(i, k)).collect()
}

pub(crate) fn format_bits(value: usize, k: usize) -> String {
    (0..k)
        .map(|pos| if value >> (k - 1 - pos) & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn check_key(key: &str, k: usize) -> Result<()> {
    if key.len() != k || !key.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(invalid(format!("{key:?} is not a {k}-bit outcome")));
    }
    Ok(())
}

/// Sampled measurement record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCounts {
    num_measured_qubits: usize,
    counts: BTreeMap<String, u64>,
    shots: u64,
}

impl OutcomeCounts {
    pub fn new(num_measured_qubits: usize, counts: BTreeMap<String, u64>) -> Result<Self> {
        for key in counts.keys() {
            check_key(key, num_measured_qubits)?;
        }
        let counts: BTreeMap<String, u64> = counts.into_iter().filter(|(_, n)| *n > 0).collect();
        let shots = counts.values().sum();
        Ok(Self {
            num_measured_qubits,
            counts,
            shots,
        })
    }

    pub fn from_pairs(num_measured_qubits: usize, pairs: &[(&str, u64)]) -> Result<Self> {
        let mut counts = BTreeMap::new();
        for (k, n) in pairs {
            *counts.entry(k.to_string()).or_insert(0) += n;
        }
        Self::new(num_measured_qubits, counts)
    }

    pub fn num_measured_qubits(&self) -> usize {
        self.num_measured_qubits
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn get(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    /// Relative frequencies; errors on an empty record.
    pub fn frequencies(&self) -> Result<OutcomeDistribution> {
        if self.shots == 0 {
            return Err(invalid("no shots recorded"));
        }
        let total = self.shots as f64;
        let probabilities = bitstrings(self.num_measured_qubits)
            .into_iter()
            .map(|k| {
                let p = self.get(&k) as f64 / total;
                (k, p)
            })
            .collect();
        Ok(OutcomeDistribution {
            num_measured_qubits: self.num_measured_qubits,
            probabilities,
        })
    }

    /// Counts on the bit positions in `keep`, in that order.
    pub fn marginal(&self, keep: &[usize]) -> Result<Self> {
        check_positions(keep, self.num_measured_qubits)?;
        let mut out = BTreeMap::new();
        for (key, &n) in &self.counts {
            *out.entry(select_bits(key, keep)).or_insert(0) += n;
        }
        Self::new(keep.len(), out)
    }
}

/// Exact Born-rule outcome probabilities over every bitstring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    num_measured_qubits: usize,
    probabilities: BTreeMap<String, f64>,
}

impl OutcomeDistribution {
    pub fn new(num_measured_qubits: usize, probabilities: BTreeMap<String, f64>) -> Result<Self> {
        for (key, &p) in &probabilities {
            check_key(key, num_measured_qubits)?;
            if p.is_nan() || p < 0.0 {
                return Err(invalid(format!("negative probability {p} for {key}")));
            }
        }
        let mut full: BTreeMap<String, f64> = bitstrings(num_measured_qubits)
            .into_iter()
            .map(|k| (k, 0.0))
            .collect();
        full.extend(probabilities);
        let total: f64 = full.values().sum();
        if (total - 1.0).abs() > CONSTRUCTION_TOL {
            return Err(invalid(format!("probabilities sum to {total}")));
        }
        Ok(Self {
            num_measured_qubits,
            probabilities: full,
        })
    }

    pub fn num_measured_qubits(&self) -> usize {
        self.num_measured_qubits
    }

    pub fn probabilities(&self) -> &BTreeMap<String, f64> {
        &self.probabilities
    }

    pub fn get(&self, key: &str) -> f64 {
        self.probabilities.get(key).copied().unwrap_or(0.0)
    }

    pub fn marginal(&self, keep: &[usize]) -> Result<Self> {
        check_positions(keep, self.num_measured_qubits)?;
        let mut out: BTreeMap<String, f64> = BTreeMap::new();
        for (key, &p) in &self.probabilities {
            *out.entry(select_bits(key, keep)).or_insert(0.0) += p;
        }
        Self::new(keep.len(), out)
    }

    /// Conditional distribution of the remaining bits given `outcome` at
    /// `positions`, with the probability of that outcome.
    pub fn postselect(&self, positions: &[usize], outcome: &str) -> Result<(Self, f64)> {
        let k = self.num_measured_qubits;
        check_positions(positions, k)?;
        check_key(outcome, positions.len())?;
        if positions.len() == k {
            return Err(invalid("post-selection must leave at least one bit"));
        }
        let kept: Vec<usize> = (0..k).filter(|p| !positions.contains(p)).collect();
        let mut out: BTreeMap<String, f64> = BTreeMap::new();
        for (key, &p) in &self.probabilities {
            if select_bits(key, positions) == outcome {
                *out.entry(select_bits(key, &kept)).or_insert(0.0) += p;
            }
        }
        let total: f64 = out.values().sum();
        if total < EMPTY_BRANCH_PROBABILITY {
            return Err(Error::EmptyBranch {
                outcome: outcome.to_string(),
                probability: total,
            });
        }
        for p in out.values_mut() {
            *p /= total;
        }
        Ok((Self::new(kept.len(), out)?, total))
    }

    /// Each bit independently flipped with probability `flip`.
    pub fn with_readout_flip(&self, flip: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&flip) {
            return Err(invalid(format!("readout flip {flip} is not a probability")));
        }
        if flip == 0.0 {
            return Ok(self.clone());
        }
        let k = self.num_measured_qubits;
        let mut probs: Vec<f64> = bitstrings(k).iter().map(|s| self.get(s)).collect();
        for pos in 0..k {
            let m = 1 << (k - 1 - pos);
            let mut next = probs.clone();
            for (i, slot) in next.iter_mut().enumerate() {
                *slot = (1.0 - flip) * probs[i] + flip * probs[i ^ m];
            }
            probs = next;
        }
        let map = bitstrings(k).into_iter().zip(probs).collect();
        Self::new(k, map)
    }

    /// Multinomial draw of `shots` outcomes.
    pub fn sample(&self, shots: u64, seed: u64) -> Result<OutcomeCounts> {
        if shots == 0 {
            return Err(invalid("shots must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut remaining = shots;
        let mut mass = 1.0;
        let mut counts = BTreeMap::new();
        let entries: Vec<(&String, &f64)> = self.probabilities.iter().collect();
        for (idx, (key, &p)) in entries.iter().enumerate() {
            if remaining == 0 {
                break;
            }
            let n = if idx + 1 == entries.len() || mass <= 0.0 {
                remaining
            } else {
                let q = (p / mass).clamp(0.0, 1.0);
                Binomial::new(remaining, q)
                    .map_err(|e| Error::Numerical(e.to_string()))?
                    .sample(&mut rng)
            };
            if n > 0 {
                counts.insert((*key).clone(), n);
            }
            remaining -= n;
            mass -= p;
        }
        OutcomeCounts::new(self.num_measured_qubits, counts)
    }
}

fn check_positions(positions: &[usize], k: usize) -> Result<()> {
    if positions.is_empty() {
        return Err(invalid("no positions selected"));
    }
    for (i, &p) in positions.iter().enumerate() {
        if p >= k || positions[..i].contains(&p) {
            return Err(invalid(format!("bad bit position list {positions:?} for {k} bits")));
        }
    }
    Ok(())
}

fn select_bits(key: &str, positions: &[usize]) -> String {
    let bytes = key.as_bytes();
    positions.iter().map(|&p| bytes[p] as char).collect()
}

fn check_qubits(measured: &[usize], n: usize) -> Result<()> {
    if measured.is_empty() {
        return Err(invalid("no qubits to measure"));
    }
    check_positions(measured, n)
}

/// Born-rule marginal on `measured` (first listed qubit is the first bit).
pub fn exact_probabilities<S: QuantumState>(state: &S, measured: &[usize]) -> Result<OutcomeDistribution> {
    let n = state.num_qubits();
    check_qubits(measured, n)?;
    let probs = state.basis_probabilities();
    let k = measured.len();
    let mut out = vec![0.0; 1 << k];
    for (i, p) in probs.iter().enumerate() {
        let key = measured
            .iter()
            .fold(0, |acc, &q| (acc << 1) | usize::from(i & bit(q, n) != 0));
        out[key] += p.max(0.0);
    }
    let total: f64 = out.iter().sum();
    let map = bitstrings(k)
        .into_iter()
        .zip(out.into_iter().map(|p| p / total))
        .collect();
    OutcomeDistribution::new(k, map)
}

/// Multinomial sample of `shots` measurements of `measured`, with independent
/// per-bit readout flips. Deterministic in `seed`.
pub fn sample_counts<S: QuantumState>(
    state: &S,
    measured: &[usize],
    shots: u64,
    seed: u64,
    readout_flip: f64,
) -> Result<OutcomeCounts> {
    exact_probabilities(state, measured)?
        .with_readout_flip(readout_flip)?
        .sample(shots, seed)
}

/// Projects `ancillas` onto `outcome` and returns the renormalized state on
/// the remaining qubits (original order) with the branch probability.
pub fn postselect(state: &StateVector, ancillas: &[usize], outcome: &str) -> Result<(StateVector, f64)> {
    let n = state.num_qubits();
    check_qubits(ancillas, n)?;
    check_key(outcome, ancillas.len())?;
    if ancillas.len() == n {
        return Err(invalid("post-selection must leave at least one qubit"));
    }
    let kept: Vec<usize> = (0..n).filter(|q| !ancillas.contains(q)).collect();
    let mut want = 0;
    for (q, b) in ancillas.iter().zip(outcome.bytes()) {
        if b == b'1' {
            want |= bit(*q, n);
        }
    }
    let amask: usize = ancillas.iter().map(|&q| bit(q, n)).sum();
    let mut amps = vec![crate::qmath::c(0.0, 0.0); 1 << kept.len()];
    for (i, a) in state.amplitudes().iter().enumerate() {
        if i & amask == want {
            let local = kept
                .iter()
                .fold(0, |acc, &q| (acc << 1) | usize::from(i & bit(q, n) != 0));
            amps[local] = *a;
        }
    }
    let prob: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if prob < EMPTY_BRANCH_PROBABILITY {
        return Err(Error::EmptyBranch {
            outcome: outcome.to_string(),
            probability: prob,
        });
    }
    Ok((StateVector::normalized(amps)?, prob))
}

/// Keeps records whose bits at `ancilla_positions` equal `outcome`, then
/// strips those positions.
pub fn postselect_counts(counts: &OutcomeCounts, ancilla_positions: &[usize], outcome: &str) -> Result<OutcomeCounts> {
    let k = counts.num_measured_qubits();
    check_positions(ancilla_positions, k)?;
    check_key(outcome, ancilla_positions.len())?;
    if ancilla_positions.len() == k {
        return Err(invalid("post-selection must leave at least one bit"));
    }
    let kept: Vec<usize> = (0..k).filter(|p| !ancilla_positions.contains(p)).collect();
    let mut out = BTreeMap::new();
    for (key, &n) in counts.counts() {
        if select_bits(key, ancilla_positions) == outcome {
            *out.entry(select_bits(key, &kept)).or_insert(0) += n;
        }
    }
    let selected = OutcomeCounts::new(kept.len(), out)?;
    if selected.shots() == 0 {
        return Err(Error::EmptyBranch {
            outcome: outcome.to_string(),
            probability: 0.0,
        });
    }
    Ok(selected)
}

/// Mixes a master seed with stream coordinates (SplitMix64 finalizer).
pub fn derive_seed(master: u64, stream: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    stream.iter().fold(mix(master), |acc, &s| {
        mix(acc.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(mix(s)))
    })
}
