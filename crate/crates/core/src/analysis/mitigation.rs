//! Readout-error mitigation over the observed-bitstring subspace.
//!
//! The tensored flip channel with per-bit probability `p` sends true string
//! `y` to observed `x` with probability `p^d (1-p)^(n-d)`, `d = hamming(x, y)`.
//! The reduced matrix keeps only rows and columns of observed strings; each
//! column is renormalized to sum to one over that subspace so the solution
//! stays a quasi-probability distribution summing to one. Entries smaller
//! than [`ENTRY_CUTOFF`] relative to the diagonal are dropped. The sparse
//! system is solved with Jacobi-preconditioned BiCGSTAB.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Relative residual at which the iterative solve stops.
pub const SOLVER_TOLERANCE: f64 = 1e-6;
/// Off-diagonal entries below this fraction of the diagonal are neglected.
pub const ENTRY_CUTOFF: f64 = 1e-12;
const MAX_ITERATIONS: usize = 1000;

pub type Counts = BTreeMap<BitString, u64>;

/// Histogram of bit strings.
pub fn histogram<'a>(strings: impl IntoIterator<Item = &'a BitString>) -> Counts {
    let mut c = Counts::new();
    for s in strings {
        *c.entry(s.clone()).or_insert(0) += 1;
    }
    c
}

/// Quasi-probabilities over observed bit strings. Values can be negative.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiDist {
    pub entries: Vec<(BitString, f64)>,
}

impl QuasiDist {
    /// Plain empirical distribution of `counts`.
    pub fn empirical(counts: &Counts) -> Self {
        let total: u64 = counts.values().sum();
        QuasiDist {
            entries: counts.iter().map(|(b, &c)| (b.clone(), c as f64 / total as f64)).collect(),
        }
    }

    /// Quasi-probability of `s` (0 when not observed).
    pub fn get(&self, s: &BitString) -> f64 {
        self.entries.iter().find(|(b, _)| b == s).map_or(0.0, |e| e.1)
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// Sum of quasi-probabilities of strings satisfying `pred`.
    pub fn mass(&self, pred: impl Fn(&BitString) -> bool) -> f64 {
        self.entries.iter().filter(|(b, _)| pred(b)).map(|e| e.1).sum()
    }

    /// `sum_b (-1)^{popcount(b & mask)} q(b)`; `mask = None` means all bits.
    pub fn parity_expectation(&self, mask: Option<&BitString>) -> f64 {
        self.entries
            .iter()
            .map(|(b, q)| {
                let odd = match mask {
                    None => b.parity(),
                    Some(m) => b.words().iter().zip(m.words()).map(|(x, y)| (x & y).count_ones()).sum::<u32>() % 2 == 1,
                };
                if odd { -q } else { *q }
            })
            .sum()
    }
}

/// Sparse row-major matrix whose entry `(i, j)` is
/// `powers[d_ij] * col_scale[j]`; only `j` and `d_ij` are stored.
struct Csr {
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    dists: Vec<u8>,
    powers: Vec<f64>,
    col_scale: Vec<f64>,
}

impl Csr {
    fn mul(&self, x: &[f64]) -> Vec<f64> {
        let y: Vec<f64> = x.iter().zip(&self.col_scale).map(|(a, s)| a * s).collect();
        (0..self.row_ptr.len() - 1)
            .into_par_iter()
            .map(|i| {
                let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
                self.cols[a..b]
                    .iter()
                    .zip(&self.dists[a..b])
                    .map(|(&j, &d)| self.powers[d as usize] * y[j as usize])
                    .sum()
            })
            .collect()
    }
}

/// Pairs `(j, d)` with `hamming(strings[i], strings[j]) = d <= d_max`, for
/// every row `i`, in ascending popcount of `strings[j]`.
fn neighbors_within(strings: &[&BitString], d_max: usize) -> Vec<Vec<(u32, u8)>> {
    let w = strings.first().map_or(0, |s| s.words().len());
    let flat: Vec<u64> = strings.iter().flat_map(|s| s.words().iter().copied()).collect();
    let pc: Vec<usize> = strings.iter().map(|s| s.count_ones()).collect();
    // popcounts differ by at most the distance, so scan a popcount window
    let mut order: Vec<usize> = (0..strings.len()).collect();
    order.sort_by_key(|&i| (pc[i], i));
    let sorted_pc: Vec<usize> = order.iter().map(|&i| pc[i]).collect();
    (0..strings.len())
        .into_par_iter()
        .map(|i| {
            let lo = sorted_pc.partition_point(|&p| p + d_max < pc[i]);
            let hi = sorted_pc.partition_point(|&p| p <= pc[i] + d_max);
            let xi = &flat[i * w..(i + 1) * w];
            order[lo..hi]
                .iter()
                .filter_map(|&j| {
                    let xj = &flat[j * w..(j + 1) * w];
                    let mut d = 0usize;
                    for (a, b) in xi.iter().zip(xj) {
                        d += (a ^ b).count_ones() as usize;
                        if d > d_max {
                            return None;
                        }
                    }
                    Some((j as u32, d as u8))
                })
                .collect()
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Jacobi-preconditioned BiCGSTAB for `A x = b`.
fn bicgstab(a: &Csr, diag: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let precond = |v: &[f64]| -> Vec<f64> { v.iter().zip(diag).map(|(x, d)| x / d).collect() };
    let mut x = precond(b);
    let ax = a.mul(&x);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    if norm(&r) <= SOLVER_TOLERANCE * bnorm {
        return Ok(x);
    }
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    for _ in 0..MAX_ITERATIONS {
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        let y = precond(&p);
        v = a.mul(&y);
        alpha = rho_new / dot(&r_hat, &v);
        let s: Vec<f64> = r.iter().zip(&v).map(|(r, v)| r - alpha * v).collect();
        if norm(&s) <= SOLVER_TOLERANCE * bnorm {
            for i in 0..n {
                x[i] += alpha * y[i];
            }
            return Ok(x);
        }
        let z = precond(&s);
        let t = a.mul(&z);
        omega = dot(&t, &s) / dot(&t, &t);
        for i in 0..n {
            x[i] += alpha * y[i] + omega * z[i];
            r[i] = s[i] - omega * t[i];
        }
        if norm(&r) <= SOLVER_TOLERANCE * bnorm {
            return Ok(x);
        }
        rho = rho_new;
    }
    Err(Error::Simulation(format!(
        "readout mitigation did not reach relative residual {SOLVER_TOLERANCE} in {MAX_ITERATIONS} iterations"
    )))
}

/// Mitigated quasi-distribution of `counts` under a known per-bit flip
/// probability `p_ro`.
pub fn mitigate_readout(counts: &Counts, p_ro: f64) -> Result<QuasiDist> {
    if !(0.0..0.5).contains(&p_ro) {
        return Err(Error::InvalidArgument(format!("readout error {p_ro} must lie in [0, 0.5)")));
    }
    if counts.is_empty() {
        return Err(Error::InvalidArgument("no counts to mitigate".into()));
    }
    let empirical = QuasiDist::empirical(counts);
    if p_ro == 0.0 {
        return Ok(empirical);
    }
    let strings: Vec<&BitString> = counts.keys().collect();
    let ratio = p_ro / (1.0 - p_ro);
    // (1-p)^n is common to every entry and cancels under column normalization
    let d_max = (ENTRY_CUTOFF.ln() / ratio.ln()).floor() as usize;
    let powers: Vec<f64> = (0..=d_max).map(|d| ratio.powi(d as i32)).collect();

    let d_max = d_max.min(u8::MAX as usize);
    let pairs = neighbors_within(&strings, d_max);
    let k = strings.len();
    let mut colsum = vec![0.0; k];
    for row in &pairs {
        for &(j, d) in row {
            colsum[j as usize] += powers[d as usize];
        }
    }
    let mut row_ptr = Vec::with_capacity(k + 1);
    row_ptr.push(0);
    let nnz = pairs.iter().map(Vec::len).sum();
    let mut cols = Vec::with_capacity(nnz);
    let mut dists = Vec::with_capacity(nnz);
    for row in pairs {
        for (j, d) in row {
            cols.push(j);
            dists.push(d);
        }
        row_ptr.push(cols.len());
    }
    let col_scale: Vec<f64> = colsum.iter().map(|c| c.recip()).collect();
    let diag = col_scale.clone();
    let matrix = Csr { row_ptr, cols, dists, powers, col_scale };
    let b: Vec<f64> = empirical.entries.iter().map(|e| e.1).collect();
    let x = bicgstab(&matrix, &diag, &b)?;
    Ok(QuasiDist {
        entries: strings.into_iter().cloned().zip(x).collect(),
    })
}
