//! Literal two-copy evaluation of `Q0` and `Q_m`.
//!
//! This module builds `rho (x) rho` densely, materializes each copy-swap
//! permutation operator as a 0/1 matrix, and evaluates
//! `<x| P^dag (rho (x) rho) P |x>` by explicit matrix-vector products. It shares
//! no code with [`crate::criteria`] and exists to check it; it is limited to
//! `n <= 4` (a 256-dimensional two-copy space).

use crate::states::{DensityMatrix, QubitCount};
use crate::{Error, Result, C64};

pub const MAX_ORACLE_QUBITS: usize = 4;

/// Swaps the subsystems in `swap_set` between the two copies.
///
/// Two-copy basis index: `i * 2^n + j` for `|i> (x) |j>`.
#[derive(Clone, Debug)]
pub struct PermutationOperator {
    n: QubitCount,
    swap_set: usize,
    matrix: Vec<f64>,
}

impl PermutationOperator {
    pub fn new(n: QubitCount, swap_set: usize) -> Result<Self> {
        check_size(n)?;
        if swap_set >= n.dim() {
            return Err(Error::arg("swap set does not fit the qubit count"));
        }
        let d = n.dim();
        let big = d * d;
        let mut matrix = vec![0.0; big * big];
        for i in 0..d {
            for j in 0..d {
                let i2 = (i & !swap_set) | (j & swap_set);
                let j2 = (j & !swap_set) | (i & swap_set);
                // column (i, j) has its single 1 in row (i2, j2)
                matrix[(i2 * d + j2) * big + (i * d + j)] = 1.0;
            }
        }
        Ok(PermutationOperator { n, swap_set, matrix })
    }

    pub fn swap_set(&self) -> usize {
        self.swap_set
    }

    pub fn dim(&self) -> usize {
        self.n.dim() * self.n.dim()
    }

    /// Entry `(row, col)` of the 0/1 matrix.
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.matrix[row * self.dim() + col]
    }

    /// Dense `P v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let big = self.dim();
        (0..big)
            .map(|r| (0..big).map(|c| v[c] * self.entry(r, c)).sum())
            .collect()
    }

    /// Dense `P * other`.
    pub fn compose(&self, other: &PermutationOperator) -> Vec<f64> {
        let big = self.dim();
        let mut out = vec![0.0; big * big];
        for r in 0..big {
            for k in 0..big {
                let a = self.entry(r, k);
                if a != 0.0 {
                    for c in 0..big {
                        out[r * big + c] += a * other.entry(k, c);
                    }
                }
            }
        }
        out
    }
}

fn check_size(n: QubitCount) -> Result<()> {
    if n.get() > MAX_ORACLE_QUBITS {
        return Err(Error::Capability(format!(
            "the two-copy oracle supports at most {MAX_ORACLE_QUBITS} qubits, got {}",
            n.get()
        )));
    }
    Ok(())
}

/// Dense `rho (x) rho`.
fn two_copies(rho: &DensityMatrix) -> Vec<C64> {
    let d = rho.dim();
    let big = d * d;
    let mut out = vec![C64::new(0.0, 0.0); big * big];
    for i1 in 0..d {
        for j1 in 0..d {
            for i2 in 0..d {
                for j2 in 0..d {
                    out[(i1 * d + j1) * big + (i2 * d + j2)] = rho.get(i1, i2) * rho.get(j1, j2);
                }
            }
        }
    }
    out
}

fn basis_vector(dim: usize, index: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); dim];
    v[index] = C64::new(1.0, 0.0);
    v
}

/// `<x| P^dag R P |x>` computed as `(P x)^dag R (P x)`.
fn sandwich(p: &PermutationOperator, rr: &[C64], x: &[C64]) -> C64 {
    let big = p.dim();
    let px = p.apply(x);
    let mut acc = C64::new(0.0, 0.0);
    for r in 0..big {
        let row: C64 = (0..big).map(|c| rr[r * big + c] * px[c]).sum();
        acc += px[r].conj() * row;
    }
    acc
}

fn ones(n: QubitCount) -> usize {
    n.dim() - 1
}

pub fn oracle_q0(rho: &DensityMatrix) -> Result<f64> {
    let n = rho.qubits();
    check_size(n)?;
    let d = n.dim();
    let rr = two_copies(rho);
    // |0...0> (x) |1...1>
    let x = basis_vector(d * d, ones(n));
    let mut value = rho.get(0, ones(n)).norm();
    for part in 1..ones(n) {
        // each unordered split once
        if part > (!part & ones(n)) {
            continue;
        }
        let p = PermutationOperator::new(n, part)?;
        value -= sandwich(&p, &rr, &x).re.max(0.0).sqrt();
    }
    Ok(value)
}

pub fn oracle_qm(rho: &DensityMatrix, m: usize) -> Result<f64> {
    let n = rho.qubits();
    check_size(n)?;
    if m == 0 || m > n.get() / 2 {
        return Err(Error::arg(format!("m = {m} out of range for {} qubits", n.get())));
    }
    let d = n.dim();
    let rr = two_copies(rho);
    let layer: Vec<usize> = (0..d).filter(|s| s.count_ones() as usize == m).collect();
    let mut value = 0.0;
    for &alpha in &layer {
        let p = PermutationOperator::new(n, alpha)?;
        for &beta in &layer {
            if (alpha & beta).count_ones() as usize != m - 1 {
                continue;
            }
            let x = basis_vector(d * d, alpha * d + beta);
            value += rho.get(alpha, beta).norm() - sandwich(&p, &rr, &x).re.max(0.0).sqrt();
        }
    }
    let penalty = (m * (n.get() - m - 1)) as f64;
    value -= penalty * layer.iter().map(|&a| rho.get(a, a).re).sum::<f64>();
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_dicke, make_ghz, make_w};

    fn q(n: usize) -> QubitCount {
        QubitCount::new(n).unwrap()
    }

    #[test]
    fn permutations_are_involutions_acting_on_product_basis() {
        for n in 2..=3 {
            let d = 1usize << n;
            let big = d * d;
            for s in 0..d {
                let p = PermutationOperator::new(q(n), s).unwrap();
                let sq = p.compose(&p);
                for r in 0..big {
                    for c in 0..big {
                        assert_eq!(sq[r * big + c], if r == c { 1.0 } else { 0.0 });
                    }
                }
                for a in 0..d {
                    for b in 0..d {
                        let out = p.apply(&basis_vector(big, a * d + b));
                        let (a2, b2) = ((a & !s) | (b & s), (b & !s) | (a & s));
                        assert_eq!(out, basis_vector(big, a2 * d + b2));
                    }
                }
            }
        }
    }

    #[test]
    fn oracle_anchor_values() {
        let ghz3 = make_ghz(3).unwrap().projector();
        assert!((oracle_q0(&ghz3).unwrap() - 0.5).abs() < 1e-12);
        assert!(oracle_qm(&ghz3, 1).unwrap().abs() < 1e-12);

        let mixed = DensityMatrix::maximally_mixed(q(3));
        assert!((oracle_q0(&mixed).unwrap() + 0.375).abs() < 1e-12);

        let mut zero = vec![C64::new(0.0, 0.0); 8];
        zero[0] = C64::new(1.0, 0.0);
        let zero = crate::states::StateVector::new(q(3), zero).unwrap().projector();
        assert_eq!(oracle_q0(&zero).unwrap(), 0.0);

        let w3 = make_w(3).unwrap().projector();
        assert!((oracle_qm(&w3, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!(oracle_q0(&w3).unwrap().abs() < 1e-12);

        let d42 = make_dicke(4, 2).unwrap().projector();
        assert!((oracle_qm(&d42, 2).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_refuses_large_states() {
        let ghz5 = make_ghz(5).unwrap().projector();
        assert!(matches!(oracle_q0(&ghz5), Err(Error::Capability(_))));
        assert!(matches!(oracle_qm(&ghz5, 1), Err(Error::Capability(_))));
    }
}
