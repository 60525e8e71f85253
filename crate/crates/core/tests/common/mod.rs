#![allow(dead_code)]

use gme_core::haar::{sample_su2, LocalUnitary};
use gme_core::states::{DensityMatrix, QubitCount, StateVector};
use gme_core::C64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn qubits(n: usize) -> QubitCount {
    QubitCount::new(n).unwrap()
}

pub fn gaussian_vector(dim: usize, rng: &mut StdRng) -> Vec<C64> {
    (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

pub fn random_pure(n: usize, rng: &mut StdRng) -> StateVector {
    let q = qubits(n);
    StateVector::normalized(q, gaussian_vector(q.dim(), rng)).unwrap()
}

/// `G G^dag / tr` with `G` a Gaussian `d x rank` matrix, rank drawn uniformly.
pub fn random_mixed(n: usize, rng: &mut StdRng) -> DensityMatrix {
    let q = qubits(n);
    let d = q.dim();
    let rank = rng.random_range(1..=d);
    let cols: Vec<Vec<C64>> = (0..rank).map(|_| gaussian_vector(d, rng)).collect();
    let mut e = vec![C64::new(0.0, 0.0); d * d];
    for col in &cols {
        for r in 0..d {
            for c in 0..d {
                e[r * d + c] += col[r] * col[c].conj();
            }
        }
    }
    let tr: f64 = (0..d).map(|i| e[i * d + i].re).sum();
    e.iter_mut().for_each(|z| *z /= tr);
    DensityMatrix::new(q, e).unwrap()
}

pub fn random_local_unitary(n: usize, rng: &mut StdRng) -> LocalUnitary {
    LocalUnitary::new((0..n).map(|_| sample_su2(rng)).collect())
}

/// Packs the bits of `index` selected by `mask` (most significant first).
fn gather(index: usize, mask: usize, n: usize) -> usize {
    let mut out = 0;
    for bit in (0..n).rev() {
        if mask >> bit & 1 == 1 {
            out = out << 1 | (index >> bit & 1);
        }
    }
    out
}

/// `|a>_A (x) |b>_B` for a random nontrivial split `A|B`.
pub fn random_product_across_cut(n: usize, rng: &mut StdRng) -> StateVector {
    let q = qubits(n);
    let d = q.dim();
    let part = rng.random_range(1..d - 1);
    let rest = !part & (d - 1);
    let a = gaussian_vector(1 << part.count_ones(), rng);
    let b = gaussian_vector(1 << rest.count_ones(), rng);
    let amps = (0..d).map(|i| a[gather(i, part, n)] * b[gather(i, rest, n)]).collect();
    StateVector::normalized(q, amps).unwrap()
}

/// Mixture of 1 to 8 pure states, each a product across its own random cut,
/// optionally conjugated by a random local unitary.
pub fn random_biseparable(n: usize, rng: &mut StdRng) -> DensityMatrix {
    let terms = rng.random_range(1..=8);
    let raw: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    let mut mix: Vec<(f64, DensityMatrix)> = raw
        .iter()
        .map(|w| (w / total, random_product_across_cut(n, rng).projector()))
        .collect();
    let drift: f64 = 1.0 - mix.iter().map(|(w, _)| w).sum::<f64>();
    mix[0].0 += drift;
    let rho = DensityMatrix::mixture(&mix).unwrap();
    if rng.random_bool(0.5) {
        rho.apply_local_unitary(&random_local_unitary(n, rng)).unwrap()
    } else {
        rho
    }
}

/// `P rho P^dag` where qubit `k` moves to position `perm[k]`.
pub fn permute_qubits(rho: &DensityMatrix, perm: &[usize]) -> DensityMatrix {
    let q = rho.qubits();
    let n = q.get();
    let d = q.dim();
    let map = |i: usize| {
        (0..n).fold(0, |acc, k| if i & q.bit(k) != 0 { acc | q.bit(perm[k]) } else { acc })
    };
    let mut e = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            e[map(i) * d + map(j)] = rho.get(i, j);
        }
    }
    DensityMatrix::new(q, e).unwrap()
}
