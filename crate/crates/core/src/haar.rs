//! Haar-random local unitaries.
//!
//! Single-qubit blocks are drawn from SU(2) with the unit-quaternion method:
//! four independent standard normals normalized to a point `(a, b, c, d)` on
//! the 3-sphere give
//!
//! ```text
//! U = [[ a + ib,  c + id],
//!      [-c + id,  a - ib]]
//! ```
//!
//! which is exactly Haar distributed. Global phases cancel under
//! `rho -> U rho U^dag`, so SU(2) covers U(2) for every purpose here.
//!
//! Randomness is counter based: sample `k` of a run with master seed `s`
//! always uses [`sample_stream(s, k)`](sample_stream), independent of which
//! thread evaluates it or in what order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::states::QubitCount;
use crate::{Error, Result, C64};

/// Tolerance accepted on `U^dag U = I` for user-supplied blocks.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

pub type SampleRng = ChaCha8Rng;

/// Independent random stream for draw `index` under `seed`.
pub fn sample_stream(seed: u64, index: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A 2x2 unitary with unit determinant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[C64; 2]; 2]", into = "[[C64; 2]; 2]")]
pub struct SingleQubitUnitary {
    m: [[C64; 2]; 2],
}

impl SingleQubitUnitary {
    /// Accepts any unitary and removes its global phase so that `det = 1`.
    pub fn new(m: [[C64; 2]; 2]) -> Result<Self> {
        if m.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::arg("unitary has non-finite entries"));
        }
        let raw = SingleQubitUnitary { m };
        let dev = raw.unitarity_deviation();
        if dev > UNITARITY_TOLERANCE {
            return Err(Error::arg(format!("matrix is not unitary (deviation {dev:e})")));
        }
        let phase = raw.determinant().sqrt();
        Ok(SingleQubitUnitary { m: m.map(|row| row.map(|z| z / phase)) })
    }

    /// `[[a + ib, c + id], [-c + id, a - ib]]` for a unit quaternion.
    pub fn from_quaternion(a: f64, b: f64, c: f64, d: f64) -> Self {
        SingleQubitUnitary {
            m: [
                [C64::new(a, b), C64::new(c, d)],
                [C64::new(-c, d), C64::new(a, -b)],
            ],
        }
    }

    pub fn identity() -> Self {
        Self::from_quaternion(1.0, 0.0, 0.0, 0.0)
    }

    /// The Hadamard matrix, up to the global phase `-i` that puts it in SU(2).
    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_quaternion(0.0, -h, 0.0, -h)
    }

    pub fn matrix(&self) -> &[[C64; 2]; 2] {
        &self.m
    }

    pub fn determinant(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Largest entry of `|U^dag U - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..2 {
                    s += self.m[k][i].conj() * self.m[k][j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &SingleQubitUnitary) -> SingleQubitUnitary {
        let (a, b) = (&self.m, &rhs.m);
        let mut m = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        SingleQubitUnitary { m }
    }
}

impl TryFrom<[[C64; 2]; 2]> for SingleQubitUnitary {
    type Error = Error;
    fn try_from(m: [[C64; 2]; 2]) -> Result<Self> {
        SingleQubitUnitary::new(m)
    }
}

impl From<SingleQubitUnitary> for [[C64; 2]; 2] {
    fn from(u: SingleQubitUnitary) -> Self {
        u.m
    }
}

/// `U_1 (x) ... (x) U_n`; block `k` acts on qubit `k` (0-based from the left).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LocalUnitary {
    blocks: Vec<SingleQubitUnitary>,
}

impl LocalUnitary {
    pub fn new(blocks: Vec<SingleQubitUnitary>) -> Self {
        LocalUnitary { blocks }
    }

    pub fn identity(n: usize) -> Self {
        Self::uniform(SingleQubitUnitary::identity(), n)
    }

    pub fn uniform(block: SingleQubitUnitary, n: usize) -> Self {
        LocalUnitary { blocks: vec![block; n] }
    }

    /// Hadamard on every qubit: rotation to the sigma_x eigenbasis.
    pub fn hadamard(n: usize) -> Self {
        Self::uniform(SingleQubitUnitary::hadamard(), n)
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[SingleQubitUnitary] {
        &self.blocks
    }

    /// Applying `self` and then `later` equals applying the result.
    pub fn then(&self, later: &LocalUnitary) -> Result<LocalUnitary> {
        if self.len() != later.len() {
            return Err(Error::arg("cannot compose local unitaries of different sizes"));
        }
        let blocks = self.blocks.iter().zip(&later.blocks).map(|(u, v)| v.mul(u)).collect();
        Ok(LocalUnitary { blocks })
    }

    /// In-place `amps <- U_L amps`. `amps.len()` must be `2^len()`.
    pub fn apply_to_amplitudes(&self, amps: &mut [C64]) {
        let n = self.blocks.len();
        debug_assert_eq!(amps.len(), 1 << n);
        for (qubit, block) in self.blocks.iter().enumerate() {
            let [[u00, u01], [u10, u11]] = block.m;
            let stride = 1 << (n - 1 - qubit);
            for i in (0..amps.len()).filter(|i| i & stride == 0) {
                let j = i | stride;
                let (a, b) = (amps[i], amps[j]);
                amps[i] = u00 * a + u01 * b;
                amps[j] = u10 * a + u11 * b;
            }
        }
    }
}

/// The subgroup of local unitaries to integrate over.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitaryGroup {
    /// Independent Haar blocks, SU(2)^n.
    Product,
    /// One Haar block replicated on every qubit, U^(x)n.
    Symmetric,
    /// Draw `k` is element `k` of the list.
    Fixed(Vec<LocalUnitary>),
}

impl UnitaryGroup {
    pub fn validate(&self, n: QubitCount) -> Result<()> {
        if let UnitaryGroup::Fixed(list) = self {
            if let Some(bad) = list.iter().find(|u| u.len() != n.get()) {
                return Err(Error::arg(format!(
                    "fixed unitary has {} blocks, expected {}",
                    bad.len(),
                    n.get()
                )));
            }
        }
        Ok(())
    }

    /// Number of draws available, if finite.
    pub fn capacity(&self) -> Option<usize> {
        match self {
            UnitaryGroup::Fixed(list) => Some(list.len()),
            _ => None,
        }
    }
}

/// Haar-random SU(2) element.
pub fn sample_su2<R: Rng + ?Sized>(rng: &mut R) -> SingleQubitUnitary {
    loop {
        let g: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return SingleQubitUnitary::from_quaternion(g[0] / norm, g[1] / norm, g[2] / norm, g[3] / norm);
        }
    }
}

/// Draw number `index` from `group` for `n` qubits.
pub fn sample_group<R: Rng + ?Sized>(
    group: &UnitaryGroup,
    n: QubitCount,
    index: u64,
    rng: &mut R,
) -> Result<LocalUnitary> {
    match group {
        UnitaryGroup::Product => Ok(LocalUnitary::new((0..n.get()).map(|_| sample_su2(rng)).collect())),
        UnitaryGroup::Symmetric => Ok(LocalUnitary::uniform(sample_su2(rng), n.get())),
        UnitaryGroup::Fixed(list) => {
            let u = usize::try_from(index)
                .ok()
                .and_then(|i| list.get(i))
                .ok_or_else(|| {
                    Error::Capability(format!(
                        "fixed unitary list has {} entries, draw {index} requested",
                        list.len()
                    ))
                })?;
            if u.len() != n.get() {
                return Err(Error::arg("fixed unitary does not match the qubit count"));
            }
            Ok(u.clone())
        }
    }
}
