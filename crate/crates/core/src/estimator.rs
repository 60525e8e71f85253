//! Monte Carlo estimates of detection probabilities.
//!
//! For a noisy pure state `(1 - q)|psi><psi| + q I/2^n`, every sample draws a
//! local unitary `U_L` from the configured group, rotates the amplitudes to
//! `U_L |psi>`, and counts a hit when the detector (the maximum of its
//! criteria over its measurement bases) exceeds the detection threshold. The
//! noisy density matrix is never materialized: its elements are read from the
//! rotated amplitudes, which also lets one sample serve every `q` of a sweep.
//!
//! Sample `k` always uses the random stream `(seed, k)`, so hit counts do not
//! depend on the execution mode or thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::criteria::{CriterionId, CriterionPlan, NoisyPureElements, DETECTION_THRESHOLD};
use crate::haar::{sample_group, sample_stream, LocalUnitary, UnitaryGroup};
use crate::states::{check_noise, NoiseFamily, QubitCount, StateVector};
use crate::{Error, Result, C64};

pub const DEFAULT_SAMPLES: u64 = 200_000;
pub const DEFAULT_CONFIDENCE: f64 = 0.95;

/// Measurement basis in which a criterion is evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisRotation {
    Computational,
    /// Hadamard on every qubit (sigma_x eigenbasis).
    Hadamard,
    Fixed(LocalUnitary),
}

impl BasisRotation {
    pub fn local_unitary(&self, n: QubitCount) -> LocalUnitary {
        match self {
            BasisRotation::Computational => LocalUnitary::identity(n.get()),
            BasisRotation::Hadamard => LocalUnitary::hadamard(n.get()),
            BasisRotation::Fixed(u) => u.clone(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "comp" | "computational" | "z" => Ok(BasisRotation::Computational),
            "hadamard" | "x" => Ok(BasisRotation::Hadamard),
            _ => Err(Error::arg(format!("unknown basis {s:?} (use comp or hadamard)"))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            BasisRotation::Computational => "comp",
            BasisRotation::Hadamard => "hadamard",
            BasisRotation::Fixed(_) => "fixed",
        }
    }
}

/// Criteria evaluated in chosen bases, combined by maximum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(CriterionId, BasisRotation)>", into = "Vec<(CriterionId, BasisRotation)>")]
pub struct DetectorConfig {
    pairs: Vec<(CriterionId, BasisRotation)>,
}

impl DetectorConfig {
    /// Duplicate pairs are dropped, keeping first occurrences.
    pub fn new(pairs: Vec<(CriterionId, BasisRotation)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::arg("a detector needs at least one (criterion, basis) pair"));
        }
        let mut unique: Vec<(CriterionId, BasisRotation)> = Vec::with_capacity(pairs.len());
        for p in pairs {
            if !unique.contains(&p) {
                unique.push(p);
            }
        }
        Ok(DetectorConfig { pairs: unique })
    }

    /// Every criterion in every basis.
    pub fn grid(criteria: &[CriterionId], bases: &[BasisRotation]) -> Result<Self> {
        let pairs = bases
            .iter()
            .flat_map(|b| criteria.iter().map(move |c| (*c, b.clone())))
            .collect();
        DetectorConfig::new(pairs)
    }

    pub fn pairs(&self) -> &[(CriterionId, BasisRotation)] {
        &self.pairs
    }

    pub fn validate(&self, n: QubitCount) -> Result<()> {
        for (id, basis) in &self.pairs {
            id.validate(n)?;
            if let BasisRotation::Fixed(u) = basis {
                if u.len() != n.get() {
                    return Err(Error::arg(format!(
                        "basis rotation has {} blocks, expected {}",
                        u.len(),
                        n.get()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Pairs grouped by basis, in order of first appearance.
    pub fn by_basis(&self) -> Vec<(&BasisRotation, Vec<CriterionId>)> {
        let mut groups: Vec<(&BasisRotation, Vec<CriterionId>)> = Vec::new();
        for (id, basis) in &self.pairs {
            match groups.iter_mut().find(|(b, _)| *b == basis) {
                Some((_, ids)) => ids.push(*id),
                None => groups.push((basis, vec![*id])),
            }
        }
        groups
    }
}

impl TryFrom<Vec<(CriterionId, BasisRotation)>> for DetectorConfig {
    type Error = Error;
    fn try_from(pairs: Vec<(CriterionId, BasisRotation)>) -> Result<Self> {
        DetectorConfig::new(pairs)
    }
}

impl From<DetectorConfig> for Vec<(CriterionId, BasisRotation)> {
    fn from(d: DetectorConfig) -> Self {
        d.pairs
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityEstimate {
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_samples: u64,
    pub n_hits: u64,
    pub seed: u64,
    pub threshold: f64,
}

impl ProbabilityEstimate {
    pub fn from_counts(n_hits: u64, n_samples: u64, seed: u64, threshold: f64, confidence: f64) -> Result<Self> {
        let (ci_low, ci_high) = wilson_interval(n_hits, n_samples, confidence)?;
        Ok(ProbabilityEstimate {
            p_hat: n_hits as f64 / n_samples as f64,
            ci_low,
            ci_high,
            n_samples,
            n_hits,
            seed,
            threshold,
        })
    }

    pub fn half_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / 2.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub q: f64,
    pub estimate: ProbabilityEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    /// Rayon's global pool.
    #[default]
    Parallel,
    /// One sample after another on the calling thread.
    Sequential,
    /// A dedicated pool with this many threads.
    Threads(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorOptions {
    pub execution: Execution,
    pub threshold: f64,
    pub confidence: f64,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        EstimatorOptions {
            execution: Execution::Parallel,
            threshold: DETECTION_THRESHOLD,
            confidence: DEFAULT_CONFIDENCE,
        }
    }
}

impl EstimatorOptions {
    pub fn sequential() -> Self {
        EstimatorOptions { execution: Execution::Sequential, ..Default::default() }
    }
}

/// Wilson score interval for `hits` successes out of `total` trials.
pub fn wilson_interval(hits: u64, total: u64, confidence: f64) -> Result<(f64, f64)> {
    if total == 0 || hits > total {
        return Err(Error::arg(format!("need 0 <= hits <= total and total >= 1, got {hits}/{total}")));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::arg(format!("confidence must lie in (0, 1), got {confidence}")));
    }
    let z = Normal::standard().inverse_cdf(1.0 - (1.0 - confidence) / 2.0);
    let nf = total as f64;
    let p = hits as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    let low = if hits == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if hits == total { 1.0 } else { (center + half).min(1.0) };
    Ok((low, high))
}

/// Per-run evaluation state shared by all samples.
struct Engine<'a> {
    n: QubitCount,
    base: &'a [C64],
    group: &'a UnitaryGroup,
    seed: u64,
    bases: Vec<(Option<LocalUnitary>, Vec<CriterionPlan>)>,
    qs: &'a [f64],
    threshold: f64,
}

struct Scratch {
    rotated: Vec<C64>,
    in_basis: Vec<C64>,
    hits: Vec<bool>,
}

impl<'a> Engine<'a> {
    fn new(
        base: &'a StateVector,
        qs: &'a [f64],
        group: &'a UnitaryGroup,
        det: &DetectorConfig,
        n_samples: u64,
        seed: u64,
        threshold: f64,
    ) -> Result<Self> {
        let n = base.qubits();
        if n_samples == 0 {
            return Err(Error::arg("need at least one sample"));
        }
        group.validate(n)?;
        if let Some(cap) = group.capacity() {
            if n_samples > cap as u64 {
                return Err(Error::Capability(format!(
                    "fixed unitary list has {cap} entries but {n_samples} samples were requested"
                )));
            }
        }
        det.validate(n)?;
        if !threshold.is_finite() {
            return Err(Error::arg("threshold must be finite"));
        }
        let bases = det
            .by_basis()
            .into_iter()
            .map(|(basis, ids)| {
                let rotation = match basis {
                    BasisRotation::Computational => None,
                    other => Some(other.local_unitary(n)),
                };
                let plans = ids
                    .into_iter()
                    .map(|id| CriterionPlan::new(id, n))
                    .collect::<Result<Vec<_>>>()?;
                Ok((rotation, plans))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Engine { n, base: base.amplitudes(), group, seed, bases, qs, threshold })
    }

    fn scratch(&self) -> Scratch {
        Scratch {
            rotated: vec![C64::new(0.0, 0.0); self.n.dim()],
            in_basis: vec![C64::new(0.0, 0.0); self.n.dim()],
            hits: vec![false; self.qs.len()],
        }
    }

    /// Fills `scratch.hits` with the detection outcome of sample `k` at every q.
    fn run_sample(&self, k: u64, s: &mut Scratch) {
        let mut rng = sample_stream(self.seed, k);
        let u = sample_group(self.group, self.n, k, &mut rng)
            .expect("group and sample count validated up front");
        s.rotated.copy_from_slice(self.base);
        u.apply_to_amplitudes(&mut s.rotated);
        s.hits.iter_mut().for_each(|h| *h = false);
        for (rotation, plans) in &self.bases {
            let amps = match rotation {
                None => &s.rotated,
                Some(v) => {
                    s.in_basis.copy_from_slice(&s.rotated);
                    v.apply_to_amplitudes(&mut s.in_basis);
                    &s.in_basis
                }
            };
            for (hit, &q) in s.hits.iter_mut().zip(self.qs) {
                if *hit {
                    continue;
                }
                let src = NoisyPureElements::new(self.n, amps, q);
                *hit = plans.iter().any(|p| p.evaluate(&src) > self.threshold);
            }
        }
    }

    fn count(&self, n_samples: u64, execution: Execution) -> Result<Vec<u64>> {
        let len = self.qs.len();
        let add = |mut acc: Vec<u64>, s: &Scratch| {
            for (a, &h) in acc.iter_mut().zip(&s.hits) {
                *a += h as u64;
            }
            acc
        };
        let parallel = || {
            (0..n_samples)
                .into_par_iter()
                .fold(
                    || (self.scratch(), vec![0u64; len]),
                    |(mut s, acc), k| {
                        self.run_sample(k, &mut s);
                        let acc = add(acc, &s);
                        (s, acc)
                    },
                )
                .map(|(_, acc)| acc)
                .reduce(
                    || vec![0u64; len],
                    |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
                )
        };
        Ok(match execution {
            Execution::Sequential => {
                let mut s = self.scratch();
                (0..n_samples).fold(vec![0u64; len], |acc, k| {
                    self.run_sample(k, &mut s);
                    add(acc, &s)
                })
            }
            Execution::Parallel => parallel(),
            Execution::Threads(t) => rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::arg(format!("cannot build thread pool: {e}")))?
                .install(parallel),
        })
    }
}

pub fn estimate_probability(
    family: &NoiseFamily,
    group: &UnitaryGroup,
    det: &DetectorConfig,
    n_samples: u64,
    seed: u64,
) -> Result<ProbabilityEstimate> {
    estimate_probability_with(family, group, det, n_samples, seed, &EstimatorOptions::default())
}

pub fn estimate_probability_with(
    family: &NoiseFamily,
    group: &UnitaryGroup,
    det: &DetectorConfig,
    n_samples: u64,
    seed: u64,
    opts: &EstimatorOptions,
) -> Result<ProbabilityEstimate> {
    let mut sweep = sweep_noise_with(family.base(), &[family.q()], group, det, n_samples, seed, opts)?;
    Ok(sweep.points.remove(0).estimate)
}

/// Per-sample detection outcomes, indexed by sample number.
pub fn detection_indicators(
    family: &NoiseFamily,
    group: &UnitaryGroup,
    det: &DetectorConfig,
    n_samples: u64,
    seed: u64,
    opts: &EstimatorOptions,
) -> Result<Vec<bool>> {
    let qs = [family.q()];
    let engine = Engine::new(family.base(), &qs, group, det, n_samples, seed, opts.threshold)?;
    let one = |s: &mut Scratch, k: u64| {
        engine.run_sample(k, s);
        s.hits[0]
    };
    Ok(match opts.execution {
        Execution::Sequential => {
            let mut s = engine.scratch();
            (0..n_samples).map(|k| one(&mut s, k)).collect()
        }
        _ => (0..n_samples).into_par_iter().map_init(|| engine.scratch(), one).collect(),
    })
}

pub fn sweep_noise(
    base: &StateVector,
    q_grid: &[f64],
    group: &UnitaryGroup,
    det: &DetectorConfig,
    n_samples: u64,
    seed: u64,
) -> Result<SweepResult> {
    sweep_noise_with(base, q_grid, group, det, n_samples, seed, &EstimatorOptions::default())
}

/// One estimate per grid point; all points share the same sampled unitaries.
pub fn sweep_noise_with(
    base: &StateVector,
    q_grid: &[f64],
    group: &UnitaryGroup,
    det: &DetectorConfig,
    n_samples: u64,
    seed: u64,
    opts: &EstimatorOptions,
) -> Result<SweepResult> {
    if q_grid.is_empty() {
        return Err(Error::arg("noise grid is empty"));
    }
    for &q in q_grid {
        check_noise(q)?;
    }
    if q_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::arg("noise grid must be strictly increasing"));
    }
    let engine = Engine::new(base, q_grid, group, det, n_samples, seed, opts.threshold)?;
    let counts = engine.count(n_samples, opts.execution)?;
    let points = q_grid
        .iter()
        .zip(counts)
        .map(|(&q, hits)| {
            let estimate = ProbabilityEstimate::from_counts(hits, n_samples, seed, opts.threshold, opts.confidence)?;
            Ok(SweepPoint { q, estimate })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { points })
}
