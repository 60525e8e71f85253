//! Multi-qubit pure states, density matrices and isotropic noise families.
//!
//! Basis ordering: the leftmost ket symbol is qubit 1 and is the most
//! significant bit of the basis index, so `|001>` has index 1, `|010>` index 2
//! and `|100>` index 4. Qubits are addressed 0-based in code (`qubit 0` is the
//! leftmost symbol).

mod file;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::haar::LocalUnitary;
use crate::{Error, Result, C64};

pub use file::{load_density_matrix, read_density_matrix, write_density_matrix, FILE_TOLERANCE};

/// Tolerance on the norm of a [`StateVector`].
pub const NORM_TOLERANCE: f64 = 1e-12;
/// Default tolerance for Hermiticity, trace and positivity of a [`DensityMatrix`].
pub const MATRIX_TOLERANCE: f64 = 1e-10;

/// Number of qubits, restricted to `2..=12` so that dense storage stays small.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct QubitCount(usize);

impl QubitCount {
    pub const MIN: usize = 2;
    pub const MAX: usize = 12;

    pub fn new(n: usize) -> Result<Self> {
        if (Self::MIN..=Self::MAX).contains(&n) {
            Ok(QubitCount(n))
        } else {
            Err(Error::arg(format!(
                "qubit count must be in {}..={}, got {n}",
                Self::MIN,
                Self::MAX
            )))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Hilbert space dimension `2^n`.
    pub fn dim(self) -> usize {
        1 << self.0
    }

    /// Bit of the basis index that holds `qubit` (0-based from the left).
    pub fn bit(self, qubit: usize) -> usize {
        1 << (self.0 - 1 - qubit)
    }
}

impl TryFrom<usize> for QubitCount {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        QubitCount::new(n)
    }
}

impl From<QubitCount> for usize {
    fn from(n: QubitCount) -> usize {
        n.0
    }
}

/// A subset of subsystems, stored as a bitmask whose integer value is the
/// basis index of `|d_alpha>` (1 on every member, 0 elsewhere).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SubsetMask {
    n: QubitCount,
    mask: usize,
}

impl SubsetMask {
    pub fn new(n: QubitCount, mask: usize) -> Result<Self> {
        if mask >= n.dim() {
            return Err(Error::arg(format!("mask {mask:#b} does not fit {} qubits", n.get())));
        }
        Ok(SubsetMask { n, mask })
    }

    /// Builds the mask from 0-based subsystem positions.
    pub fn from_subsystems(n: QubitCount, subsystems: &[usize]) -> Result<Self> {
        let mut mask = 0;
        for &k in subsystems {
            if k >= n.get() {
                return Err(Error::arg(format!("subsystem {k} out of range for {} qubits", n.get())));
            }
            mask |= n.bit(k);
        }
        Ok(SubsetMask { n, mask })
    }

    /// All masks of the given weight, in increasing index order.
    pub fn with_weight(n: QubitCount, weight: usize) -> impl Iterator<Item = SubsetMask> {
        (0..n.dim())
            .filter(move |m| m.count_ones() as usize == weight)
            .map(move |mask| SubsetMask { n, mask })
    }

    pub fn qubits(self) -> QubitCount {
        self.n
    }

    /// Basis index of `|d_alpha>`.
    pub fn index(self) -> usize {
        self.mask
    }

    pub fn contains(self, qubit: usize) -> bool {
        qubit < self.n.get() && self.mask & self.n.bit(qubit) != 0
    }

    pub fn popcount(self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn complement(self) -> SubsetMask {
        SubsetMask { n: self.n, mask: !self.mask & (self.n.dim() - 1) }
    }

    pub fn intersection(self, other: SubsetMask) -> SubsetMask {
        SubsetMask { n: self.n, mask: self.mask & other.mask }
    }

    pub fn union(self, other: SubsetMask) -> SubsetMask {
        SubsetMask { n: self.n, mask: self.mask | other.mask }
    }

    /// 0-based positions of the members.
    pub fn subsystems(self) -> Vec<usize> {
        (0..self.n.get()).filter(|&k| self.contains(k)).collect()
    }
}

/// Normalized pure state on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: QubitCount,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(n: QubitCount, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != n.dim() {
            return Err(Error::arg(format!(
                "expected {} amplitudes, got {}",
                n.dim(),
                amps.len()
            )));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::arg(format!("state norm is {norm}, expected 1")));
        }
        Ok(StateVector { n, amps })
    }

    /// Normalizes the amplitudes before validating.
    pub fn normalized(n: QubitCount, mut amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::arg("cannot normalize a zero or non-finite vector"));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        StateVector::new(n, amps)
    }

    pub fn qubits(&self) -> QubitCount {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `|psi><psi|`.
    pub fn projector(&self) -> DensityMatrix {
        let d = self.amps.len();
        let mut entries = Vec::with_capacity(d * d);
        for a in &self.amps {
            for b in &self.amps {
                entries.push(a * b.conj());
            }
        }
        DensityMatrix { n: self.n, entries }
    }

    /// `U_L |psi>`.
    pub fn apply_local_unitary(&self, u: &LocalUnitary) -> Result<StateVector> {
        check_blocks(self.n, u)?;
        let mut amps = self.amps.clone();
        u.apply_to_amplitudes(&mut amps);
        Ok(StateVector { n: self.n, amps })
    }
}

fn check_blocks(n: QubitCount, u: &LocalUnitary) -> Result<()> {
    if u.len() != n.get() {
        return Err(Error::arg(format!(
            "local unitary has {} blocks but the state has {} qubits",
            u.len(),
            n.get()
        )));
    }
    Ok(())
}

/// Dense `2^n x 2^n` density matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: QubitCount,
    entries: Vec<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity within [`MATRIX_TOLERANCE`].
    pub fn new(n: QubitCount, entries: Vec<C64>) -> Result<Self> {
        Self::with_tolerance(n, entries, MATRIX_TOLERANCE)
    }

    pub fn with_tolerance(n: QubitCount, entries: Vec<C64>, tol: f64) -> Result<Self> {
        let d = n.dim();
        if entries.len() != d * d {
            return Err(Error::arg(format!(
                "expected {} entries for {} qubits, got {}",
                d * d,
                n.get(),
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::arg("density matrix has non-finite entries"));
        }
        let rho = DensityMatrix { n, entries };
        let deviation = rho.hermiticity_deviation();
        if deviation > tol {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = rho.trace().re;
        if (trace - 1.0).abs() > tol {
            return Err(Error::Trace { trace });
        }
        let min_eigenvalue = rho.min_eigenvalue();
        if min_eigenvalue < -tol {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(rho)
    }

    /// Identity / 2^n.
    pub fn maximally_mixed(n: QubitCount) -> Self {
        let d = n.dim();
        let mut entries = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            entries[i * d + i] = C64::new(1.0 / d as f64, 0.0);
        }
        DensityMatrix { n, entries }
    }

    /// Convex combination `sum_i w_i rho_i`. Weights must be nonnegative and sum to 1.
    pub fn mixture(terms: &[(f64, DensityMatrix)]) -> Result<Self> {
        let (_, first) = terms.first().ok_or_else(|| Error::arg("empty mixture"))?;
        let n = first.n;
        let total: f64 = terms.iter().map(|(w, _)| w).sum();
        if terms.iter().any(|(w, r)| *w < 0.0 || r.n != n) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::arg("mixture needs nonnegative weights summing to 1 over equal sizes"));
        }
        let mut entries = vec![C64::new(0.0, 0.0); first.entries.len()];
        for (w, r) in terms {
            for (e, x) in entries.iter_mut().zip(&r.entries) {
                *e += x * *w;
            }
        }
        Ok(DensityMatrix { n, entries })
    }

    pub fn qubits(&self) -> QubitCount {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n.dim()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim() + col]
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// `tr(rho^2)`; for Hermitian rho this is the squared Frobenius norm.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues in ascending order (Hermitian part only).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |r, c| (self.get(r, c) + self.get(c, r).conj()) * 0.5);
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// `U_L rho U_L^dag`.
    pub fn apply_local_unitary(&self, u: &LocalUnitary) -> Result<DensityMatrix> {
        check_blocks(self.n, u)?;
        let d = self.dim();
        let mut e = self.entries.clone();
        for (qubit, block) in u.blocks().iter().enumerate() {
            let [[u00, u01], [u10, u11]] = *block.matrix();
            let stride = self.n.bit(qubit);
            // rows: U rho
            for i in (0..d).filter(|i| i & stride == 0) {
                let j = i | stride;
                for c in 0..d {
                    let (a, b) = (e[i * d + c], e[j * d + c]);
                    e[i * d + c] = u00 * a + u01 * b;
                    e[j * d + c] = u10 * a + u11 * b;
                }
            }
            // columns: (U rho) U^dag
            for r in 0..d {
                let row = &mut e[r * d..(r + 1) * d];
                for i in (0..d).filter(|i| i & stride == 0) {
                    let j = i | stride;
                    let (a, b) = (row[i], row[j]);
                    row[i] = a * u00.conj() + b * u01.conj();
                    row[j] = a * u10.conj() + b * u11.conj();
                }
            }
        }
        Ok(DensityMatrix { n: self.n, entries: e })
    }
}

impl From<&StateVector> for DensityMatrix {
    fn from(psi: &StateVector) -> Self {
        psi.projector()
    }
}

/// `(1 - q) |psi><psi| + q I / 2^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseFamily {
    base: StateVector,
    q: f64,
}

impl NoiseFamily {
    pub fn new(base: StateVector, q: f64) -> Result<Self> {
        check_noise(q)?;
        Ok(NoiseFamily { base, q })
    }

    pub fn base(&self) -> &StateVector {
        &self.base
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn qubits(&self) -> QubitCount {
        self.base.n
    }

    pub fn with_q(&self, q: f64) -> Result<Self> {
        NoiseFamily::new(self.base.clone(), q)
    }
}

pub(crate) fn check_noise(q: f64) -> Result<()> {
    if (0.0..=1.0).contains(&q) {
        Ok(())
    } else {
        Err(Error::arg(format!("noise weight q must lie in [0, 1], got {q}")))
    }
}

fn basis_sum(n: QubitCount, indices: impl Iterator<Item = usize>) -> Result<StateVector> {
    let mut amps = vec![C64::new(0.0, 0.0); n.dim()];
    for i in indices {
        amps[i] = C64::new(1.0, 0.0);
    }
    StateVector::normalized(n, amps)
}

/// `(|0...0> + |1...1>) / sqrt(2)`.
pub fn make_ghz(n: usize) -> Result<StateVector> {
    let n = QubitCount::new(n)?;
    basis_sum(n, [0, n.dim() - 1].into_iter())
}

/// Equal superposition of the `n` single-excitation basis states.
pub fn make_w(n: usize) -> Result<StateVector> {
    make_dicke(n, 1)
}

/// Equal superposition of all basis states with exactly `m` excitations.
pub fn make_dicke(n: usize, m: usize) -> Result<StateVector> {
    let n = QubitCount::new(n)?;
    if m == 0 || m >= n.get() {
        return Err(Error::arg(format!(
            "Dicke excitation count must be in 1..={}, got {m}",
            n.get() - 1
        )));
    }
    basis_sum(n, SubsetMask::with_weight(n, m).map(SubsetMask::index))
}

/// Builds the mixed state of a noise family.
pub fn realize(family: &NoiseFamily) -> DensityMatrix {
    let d = family.qubits().dim();
    let mut rho = family.base.projector();
    let q = family.q;
    rho.entries.iter_mut().for_each(|z| *z *= 1.0 - q);
    for i in 0..d {
        rho.entries[i * d + i] += q / d as f64;
    }
    rho
}

pub fn apply_local_unitary(rho: &DensityMatrix, u: &LocalUnitary) -> Result<DensityMatrix> {
    rho.apply_local_unitary(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::{sample_su2, sample_stream, SingleQubitUnitary};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn ghz_amplitudes() {
        let ghz = make_ghz(3).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (i, a) in ghz.amplitudes().iter().enumerate() {
            let expect = if i == 0 || i == 7 { h } else { 0.0 };
            assert!((a - c(expect)).norm() < 1e-15);
        }
        let rho = ghz.projector();
        assert!((rho.get(0, 7) - c(0.5)).norm() < 1e-15);
        assert!((make_ghz(2).unwrap().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn w_uses_msb_first_ordering() {
        let w = make_w(3).unwrap();
        let nonzero: Vec<usize> =
            (0..8).filter(|&i| w.amplitudes()[i].norm() > 0.0).collect();
        assert_eq!(nonzero, vec![1, 2, 4]);
        let n = QubitCount::new(3).unwrap();
        // |001> excites the third subsystem
        assert_eq!(SubsetMask::from_subsystems(n, &[2]).unwrap().index(), 1);
        assert_eq!(SubsetMask::from_subsystems(n, &[1]).unwrap().index(), 2);
        assert_eq!(SubsetMask::from_subsystems(n, &[0]).unwrap().index(), 4);
        let rho = w.projector();
        for i in [1, 2, 4] {
            assert!((rho.get(i, i).re - 1.0 / 3.0).abs() < 1e-15);
        }
        let w5 = make_w(5).unwrap();
        let amps: Vec<_> = w5.amplitudes().iter().filter(|a| a.norm() > 0.0).collect();
        assert_eq!(amps.len(), 5);
        assert!(amps.iter().all(|a| (a.re - 1.0 / 5f64.sqrt()).abs() < 1e-15));
    }

    #[test]
    fn dicke_states() {
        let d42 = make_dicke(4, 2).unwrap();
        let nz: Vec<usize> = (0..16).filter(|&i| d42.amplitudes()[i].norm() > 0.0).collect();
        assert_eq!(nz, vec![3, 5, 6, 9, 10, 12]);
        assert!(nz.iter().all(|&i| (d42.amplitudes()[i].re - 1.0 / 6f64.sqrt()).abs() < 1e-15));
        assert_eq!(make_dicke(3, 1).unwrap(), make_w(3).unwrap());
        let d21 = make_dicke(2, 1).unwrap();
        assert!((d21.amplitudes()[1].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((d21.amplitudes()[2].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(make_dicke(4, 0).is_err());
        assert!(make_dicke(4, 4).is_err());
        assert!(make_ghz(1).is_err());
        assert!(make_w(13).is_err());
    }

    #[test]
    fn realize_endpoints_and_corner() {
        let ghz = make_ghz(3).unwrap();
        let pure = realize(&NoiseFamily::new(ghz.clone(), 0.0).unwrap());
        assert!((pure.trace().re - 1.0).abs() < 1e-14);
        let ev = pure.eigenvalues();
        assert!((ev[7] - 1.0).abs() < 1e-12 && ev[..7].iter().all(|e| e.abs() < 1e-12));

        let mixed = realize(&NoiseFamily::new(ghz.clone(), 1.0).unwrap());
        let n = QubitCount::new(3).unwrap();
        assert_eq!(mixed, DensityMatrix::maximally_mixed(n));

        let rho = realize(&NoiseFamily::new(ghz.clone(), 0.4).unwrap());
        assert!((rho.get(0, 7) - c(0.3)).norm() < 1e-15);
        assert!(NoiseFamily::new(ghz.clone(), -0.1).is_err());
        assert!(NoiseFamily::new(ghz, 1.5).is_err());
    }

    #[test]
    fn validation_reports_each_violation() {
        let n = QubitCount::new(2).unwrap();
        let mut e = DensityMatrix::maximally_mixed(n).entries().to_vec();
        e[1] = C64::new(0.1, 0.0);
        assert!(matches!(DensityMatrix::new(n, e), Err(Error::NotHermitian { .. })));

        let e: Vec<C64> = DensityMatrix::maximally_mixed(n).entries().iter().map(|z| z * 0.9).collect();
        assert!(matches!(DensityMatrix::new(n, e), Err(Error::Trace { .. })));

        // diag(1.2, -0.2, 0, 0)
        let mut e = vec![C64::new(0.0, 0.0); 16];
        e[0] = c(1.2);
        e[5] = c(-0.2);
        assert!(matches!(DensityMatrix::new(n, e), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn local_unitary_action() {
        let ghz = make_ghz(3).unwrap().projector();
        let id = LocalUnitary::identity(3);
        assert_eq!(ghz.apply_local_unitary(&id).unwrap(), ghz);

        let x = SingleQubitUnitary::new([[c(0.0), c(1.0)], [c(1.0), c(0.0)]]).unwrap();
        let flipped = ghz.apply_local_unitary(&LocalUnitary::uniform(x, 3)).unwrap();
        for (a, b) in flipped.entries().iter().zip(ghz.entries()) {
            assert!((a - b).norm() < 1e-14);
        }

        let mut rng = sample_stream(7, 0);
        let u = LocalUnitary::new((0..3).map(|_| sample_su2(&mut rng)).collect());
        let rotated = ghz.apply_local_unitary(&u).unwrap();
        assert!((rotated.purity() - 1.0).abs() < 1e-10);
        assert!((rotated.trace().re - 1.0).abs() < 1e-10);
        assert!(ghz.apply_local_unitary(&LocalUnitary::identity(2)).is_err());

        // matrix route agrees with the amplitude route
        let psi = make_ghz(3).unwrap().apply_local_unitary(&u).unwrap().projector();
        for (a, b) in psi.entries().iter().zip(rotated.entries()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn subset_mask_algebra() {
        let n = QubitCount::new(4).unwrap();
        let a = SubsetMask::new(n, 0b1100).unwrap();
        let b = SubsetMask::new(n, 0b0110).unwrap();
        assert_eq!(a.intersection(b).index(), 0b0100);
        assert_eq!(a.union(b).index(), 0b1110);
        assert_eq!(a.complement().index(), 0b0011);
        assert_eq!(a.popcount(), 2);
        assert_eq!(a.subsystems(), vec![0, 1]);
        assert!(SubsetMask::new(n, 16).is_err());
        assert_eq!(SubsetMask::with_weight(n, 2).count(), 6);
    }
}
