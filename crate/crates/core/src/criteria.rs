//! Element-wise GME criteria.
//!
//! Both criteria read a handful of density-matrix elements. With `a` the
//! basis index having 1s exactly on part `A` of a bipartition and `ā` its
//! complement,
//!
//! ```text
//! Q0  = |rho[0..0, 1..1]| - sum_{A|B} sqrt(rho[a,a] rho[ā,ā])
//!
//! Q_m = sum_{(α,β)} ( |rho[α,β]| - sqrt(rho[α∩β, α∩β] rho[α∪β, α∪β]) )
//!       - m (n - m - 1) sum_{|α| = m} rho[α,α]
//! ```
//!
//! where the `Q_m` pair sum runs over ordered pairs `α != β` with
//! `|α| = |β| = m` and `|α ∩ β| = m - 1`. Every biseparable state gives a
//! value `<= 0`, so a strictly positive value certifies GME. For `n = 2` the
//! criteria witness ordinary entanglement.
//!
//! Evaluation goes through [`ElementSource`] so that the same compiled
//! [`CriterionPlan`] can read from a dense [`DensityMatrix`] or directly from
//! the amplitudes of a noisy pure state.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::estimator::{BasisRotation, DetectorConfig};
use crate::states::{DensityMatrix, QubitCount, SubsetMask};
use crate::{Error, Result, C64};

/// Values must exceed this to count as a detection.
pub const DETECTION_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum CriterionId {
    Q0,
    Qm(usize),
}

impl CriterionId {
    pub fn validate(self, n: QubitCount) -> Result<()> {
        match self {
            CriterionId::Q0 => Ok(()),
            CriterionId::Qm(m) if m >= 1 && m <= n.get() / 2 => Ok(()),
            CriterionId::Qm(m) => Err(Error::arg(format!(
                "Q_m needs 1 <= m <= {} for {} qubits, got m = {m}",
                n.get() / 2,
                n.get()
            ))),
        }
    }

    /// Every criterion defined for `n` qubits: `Q0, Q1, ..., Q_{n/2}`.
    pub fn all_for(n: QubitCount) -> Vec<CriterionId> {
        std::iter::once(CriterionId::Q0)
            .chain((1..=n.get() / 2).map(CriterionId::Qm))
            .collect()
    }
}

impl fmt::Display for CriterionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriterionId::Q0 => write!(f, "q0"),
            CriterionId::Qm(m) => write!(f, "q{m}"),
        }
    }
}

impl FromStr for CriterionId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let digits = s
            .strip_prefix(['q', 'Q'])
            .ok_or_else(|| Error::arg(format!("criterion must look like q0, q1, ...: {s:?}")))?;
        match digits.parse::<usize>() {
            Ok(0) => Ok(CriterionId::Q0),
            Ok(m) => Ok(CriterionId::Qm(m)),
            Err(_) => Err(Error::arg(format!("criterion must look like q0, q1, ...: {s:?}"))),
        }
    }
}

impl From<CriterionId> for String {
    fn from(c: CriterionId) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for CriterionId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriterionResult {
    pub value: f64,
    pub detected: bool,
}

impl CriterionResult {
    pub fn from_value(value: f64) -> Self {
        CriterionResult { value, detected: value > DETECTION_THRESHOLD }
    }
}

/// An unordered split `{A, B}`, stored by the part containing qubit 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bipartition {
    part_a: SubsetMask,
}

impl Bipartition {
    /// Canonicalizes either side of a nontrivial split.
    pub fn new(part: SubsetMask) -> Result<Self> {
        let n = part.qubits().get();
        if part.popcount() == 0 || part.popcount() == n {
            return Err(Error::arg("a bipartition needs two nonempty parts"));
        }
        let part_a = if part.contains(0) { part } else { part.complement() };
        Ok(Bipartition { part_a })
    }

    /// All `2^(n-1) - 1` bipartitions.
    pub fn all(n: QubitCount) -> impl Iterator<Item = Bipartition> {
        let top = n.bit(0);
        (top..n.dim() - 1).map(move |mask| Bipartition {
            part_a: SubsetMask::new(n, mask).expect("mask below 2^n"),
        })
    }

    pub fn part_a(self) -> SubsetMask {
        self.part_a
    }

    pub fn part_b(self) -> SubsetMask {
        self.part_a.complement()
    }
}

/// Read access to the elements of a state's density matrix.
pub trait ElementSource {
    fn qubits(&self) -> QubitCount;
    fn element(&self, row: usize, col: usize) -> C64;
    fn diagonal(&self, i: usize) -> f64 {
        self.element(i, i).re
    }
}

impl ElementSource for DensityMatrix {
    fn qubits(&self) -> QubitCount {
        DensityMatrix::qubits(self)
    }
    fn element(&self, row: usize, col: usize) -> C64 {
        self.get(row, col)
    }
}

/// Elements of `(1 - q) |psi><psi| + q I / 2^n` computed from the amplitudes.
#[derive(Clone, Copy, Debug)]
pub struct NoisyPureElements<'a> {
    n: QubitCount,
    amps: &'a [C64],
    q: f64,
}

impl<'a> NoisyPureElements<'a> {
    pub fn new(n: QubitCount, amps: &'a [C64], q: f64) -> Self {
        debug_assert_eq!(amps.len(), n.dim());
        NoisyPureElements { n, amps, q }
    }
}

impl ElementSource for NoisyPureElements<'_> {
    fn qubits(&self) -> QubitCount {
        self.n
    }
    fn element(&self, row: usize, col: usize) -> C64 {
        let mut z = self.amps[row] * self.amps[col].conj() * (1.0 - self.q);
        if row == col {
            z += self.q / self.n.dim() as f64;
        }
        z
    }
    fn diagonal(&self, i: usize) -> f64 {
        (1.0 - self.q) * self.amps[i].norm_sqr() + self.q / self.n.dim() as f64
    }
}

/// A criterion compiled for a fixed qubit count: the index lists it reads.
#[derive(Clone, Debug)]
pub struct CriterionPlan {
    id: CriterionId,
    n: QubitCount,
    coherences: Vec<(usize, usize)>,
    populations: Vec<(usize, usize)>,
    penalty: f64,
    penalized: Vec<usize>,
}

impl CriterionPlan {
    pub fn new(id: CriterionId, n: QubitCount) -> Result<Self> {
        id.validate(n)?;
        let plan = match id {
            CriterionId::Q0 => CriterionPlan {
                id,
                n,
                coherences: vec![(0, n.dim() - 1)],
                populations: Bipartition::all(n)
                    .map(|g| (g.part_a().index(), g.part_b().index()))
                    .collect(),
                penalty: 0.0,
                penalized: Vec::new(),
            },
            CriterionId::Qm(m) => {
                let layer: Vec<SubsetMask> = SubsetMask::with_weight(n, m).collect();
                let mut coherences = Vec::new();
                let mut populations = Vec::new();
                for &a in &layer {
                    for &b in &layer {
                        if a != b && a.intersection(b).popcount() == m - 1 {
                            coherences.push((a.index(), b.index()));
                            populations.push((a.intersection(b).index(), a.union(b).index()));
                        }
                    }
                }
                let penalty = (m * (n.get() - m - 1)) as f64;
                let penalized = if penalty == 0.0 {
                    Vec::new()
                } else {
                    layer.iter().map(|a| a.index()).collect()
                };
                CriterionPlan { id, n, coherences, populations, penalty, penalized }
            }
        };
        Ok(plan)
    }

    pub fn id(&self) -> CriterionId {
        self.id
    }

    pub fn qubits(&self) -> QubitCount {
        self.n
    }

    /// Raw criterion value. Products of populations are clamped at zero
    /// before the square root so rounding cannot produce NaN.
    pub fn evaluate<S: ElementSource + ?Sized>(&self, rho: &S) -> f64 {
        debug_assert_eq!(rho.qubits(), self.n);
        let coherence: f64 = self.coherences.iter().map(|&(r, c)| rho.element(r, c).norm()).sum();
        let population: f64 = self
            .populations
            .iter()
            .map(|&(i, j)| (rho.diagonal(i) * rho.diagonal(j)).max(0.0).sqrt())
            .sum();
        let mut value = coherence - population;
        if !self.penalized.is_empty() {
            value -= self.penalty * self.penalized.iter().map(|&i| rho.diagonal(i)).sum::<f64>();
        }
        value
    }

    /// Sorted, deduplicated `(row, col)` pairs read by [`evaluate`](Self::evaluate).
    pub fn required_elements(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .coherences
            .iter()
            .copied()
            .chain(self.populations.iter().flat_map(|&(i, j)| [(i, i), (j, j)]))
            .chain(self.penalized.iter().map(|&i| (i, i)))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

pub fn eval_criterion(rho: &DensityMatrix, id: CriterionId) -> Result<CriterionResult> {
    let plan = CriterionPlan::new(id, rho.qubits())?;
    Ok(CriterionResult::from_value(plan.evaluate(rho)))
}

pub fn eval_q0(rho: &DensityMatrix) -> CriterionResult {
    eval_criterion(rho, CriterionId::Q0).expect("Q0 is defined for every qubit count")
}

pub fn eval_qm(rho: &DensityMatrix, m: usize) -> Result<CriterionResult> {
    eval_criterion(rho, CriterionId::Qm(m))
}

pub fn required_elements(id: CriterionId, n: QubitCount) -> Result<Vec<(usize, usize)>> {
    Ok(CriterionPlan::new(id, n)?.required_elements())
}

/// Maximum over the detector's (criterion, basis) pairs of the criterion on
/// the rotated state.
pub fn eval_detector(rho: &DensityMatrix, det: &DetectorConfig) -> Result<f64> {
    let n = rho.qubits();
    det.validate(n)?;
    let mut best = f64::NEG_INFINITY;
    for (basis, criteria) in det.by_basis() {
        let rotated;
        let view = match basis {
            BasisRotation::Computational => rho,
            other => {
                rotated = rho.apply_local_unitary(&other.local_unitary(n))?;
                &rotated
            }
        };
        for id in criteria {
            best = best.max(CriterionPlan::new(id, n)?.evaluate(view));
        }
    }
    Ok(best)
}
