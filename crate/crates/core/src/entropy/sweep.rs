//! Exhaustive and sampled maximization of `λ_max(P_b)` over strings `b`.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{eigh, inner, max_eigenvalue, CMatrix, HermitianEigen, C64};
use crate::mub::MubSet;
use crate::{Error, Result};

/// Largest number of eigenproblems a full sweep runs without an explicit
/// budget.
pub const DEFAULT_BUDGET: u128 = 1 << 28;
pub const HISTOGRAM_BINS: usize = 100;

/// `d^L`, saturating.
pub fn sweep_count(d: usize, l: usize) -> u128 {
    (0..l).fold(1u128, |acc, _| acc.saturating_mul(d as u128))
}

/// Digits of `index` in base `d`, basis 0 most significant.
pub fn b_from_index(mut index: u128, d: usize, l: usize) -> Vec<usize> {
    let mut b = vec![0; l];
    for slot in b.iter_mut().rev() {
        *slot = (index % d as u128) as usize;
        index /= d as u128;
    }
    b
}

/// Per-set data for fast `P_b` eigenvalues. For `L < d` the nonzero spectrum
/// of `Σ_j |b^(j)><b^(j)|` is that of the `L×L` Gram matrix of the selected
/// vectors, gathered from a table of all cross overlaps. Otherwise the first
/// `L - 1` projectors are diagonalized once per prefix and the last one is
/// added as a rank-one update.
pub struct OverlapTable<'a> {
    ms: &'a MubSet,
    d: usize,
    l: usize,
    overlaps: Vec<C64>,
}

impl<'a> OverlapTable<'a> {
    pub fn new(ms: &'a MubSet) -> Self {
        let (d, l) = (ms.dim(), ms.len());
        let n = d * l;
        let mut overlaps = vec![C64::new(0.0, 0.0); if l < d { n * n } else { 0 }];
        if l < d {
            for j in 0..l {
                for a in 0..d {
                    for k in 0..l {
                        for b in 0..d {
                            overlaps[(j * d + a) * n + k * d + b] =
                                inner(ms.basis(j).vector(a), ms.basis(k).vector(b));
                        }
                    }
                }
            }
        }
        Self { ms, d, l, overlaps }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.l
    }

    pub fn is_empty(&self) -> bool {
        self.l == 0
    }

    /// `λ_max` of the mean-form `P_b`.
    pub fn lambda(&self, b: &[usize]) -> f64 {
        let (d, l) = (self.d, self.l);
        if l < d {
            let n = d * l;
            let g = CMatrix::from_fn(l, l, |j, k| self.overlaps[(j * d + b[j]) * n + k * d + b[k]]);
            max_eigenvalue(&g) / l as f64
        } else {
            let eig = self.prefix_eigen(&b[..l - 1]);
            self.top_with_last(&eig, b[l - 1]) / l as f64
        }
    }

    /// Eigen-decomposition of `Σ_{j < L-1} |b^(j)><b^(j)|`.
    fn prefix_eigen(&self, prefix: &[usize]) -> HermitianEigen {
        let d = self.d;
        let mut m = CMatrix::zeros(d, d);
        for (j, &e) in prefix.iter().enumerate() {
            let v = self.ms.basis(j).vector(e);
            for r in 0..d {
                for c in 0..d {
                    m[(r, c)] += v[r] * v[c].conj();
                }
            }
        }
        eigh(&m)
    }

    /// Top eigenvalue after adding the projector on element `last` of the
    /// final basis: the largest root of `1 + Σ_i w_i / (λ_i - x)`, found by
    /// bisection on `(λ_1, λ_1 + 1]`.
    fn top_with_last(&self, eig: &HermitianEigen, last: usize) -> f64 {
        let d = self.d;
        let v = self.ms.basis(self.l - 1).vector(last);
        let weights: Vec<f64> = (0..d)
            .map(|i| {
                let mut ip = C64::new(0.0, 0.0);
                for r in 0..d {
                    ip += eig.vectors[(r, i)].conj() * v[r];
                }
                ip.norm_sqr()
            })
            .collect();
        let top = eig.values[d - 1];
        let secular = |x: f64| 1.0 + eig.values.iter().zip(&weights).map(|(l, w)| w / (l - x)).sum::<f64>();
        let (mut lo, mut hi) = (top, top + 1.0);
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if secular(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// Counts of `λ_max` values in equal bins over `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    pub bins: Vec<u64>,
}

impl Default for Histogram {
    fn default() -> Self {
        Self { bins: vec![0; HISTOGRAM_BINS] }
    }
}

impl Histogram {
    pub fn add(&mut self, lambda: f64) {
        let k = ((lambda * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
        self.bins[k] += 1;
    }

    pub fn merge(&mut self, other: &Self) {
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
    }

    pub fn total(&self) -> u64 {
        self.bins.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub best: Vec<usize>,
    pub lambda: f64,
    pub histogram: Histogram,
    pub count: u64,
    pub sampled: bool,
}

impl SweepResult {
    fn empty(sampled: bool) -> Self {
        Self { best: Vec::new(), lambda: f64::NEG_INFINITY, histogram: Histogram::default(), count: 0, sampled }
    }

    fn offer(&mut self, b: &[usize], lambda: f64) {
        self.histogram.add(lambda);
        self.count += 1;
        if better(lambda, b, self.lambda, &self.best) {
            self.lambda = lambda;
            self.best.clear();
            self.best.extend_from_slice(b);
        }
    }

    /// Combines two partial results. Larger `λ` wins, ties go to the
    /// lexicographically smaller string, so any chunking gives the same answer.
    pub fn merge(mut self, other: Self) -> Self {
        if better(other.lambda, &other.best, self.lambda, &self.best) {
            self.lambda = other.lambda;
            self.best = other.best;
        }
        self.histogram.merge(&other.histogram);
        self.count += other.count;
        self.sampled |= other.sampled;
        self
    }

    /// `-log2 λ*`, the minimum average min-entropy certified by the sweep.
    pub fn minus_log2(&self) -> f64 {
        -libm::log2(self.lambda)
    }
}

fn better(lambda: f64, b: &[usize], cur: f64, cur_b: &[usize]) -> bool {
    match lambda.total_cmp(&cur) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => cur_b.is_empty() || b < cur_b,
    }
}

/// Strings with index in `start..end`.
pub fn sweep_range(table: &OverlapTable<'_>, start: u128, end: u128) -> SweepResult {
    let (d, l) = (table.d, table.l);
    let mut out = SweepResult::empty(false);
    if start >= end {
        return out;
    }
    let mut b = b_from_index(start, d, l);
    let mut index = start;
    while index < end {
        if l < d {
            out.offer(&b, table.lambda(&b));
            index += 1;
        } else {
            // One decomposition serves every final element with this prefix.
            let eig = table.prefix_eigen(&b[..l - 1]);
            let first = b[l - 1];
            let stop = (first as u128 + (end - index)).min(d as u128) as usize;
            for c in first..stop {
                b[l - 1] = c;
                out.offer(&b, table.top_with_last(&eig, c) / l as f64);
            }
            index += (stop - first) as u128;
            b[l - 1] = d - 1;
        }
        for slot in b.iter_mut().rev() {
            *slot += 1;
            if *slot < d {
                break;
            }
            *slot = 0;
        }
    }
    out
}

/// Serial full sweep over all `d^L` strings.
pub fn sweep_max_eigen(ms: &MubSet, budget: u128) -> Result<SweepResult> {
    let required = sweep_count(ms.dim(), ms.len());
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(sweep_range(&OverlapTable::new(ms), 0, required))
}

/// The `i`-th sampled string for `seed`. Indices below `d` are the constant
/// strings `(c, …, c)`, the rest are uniform.
pub fn sample_b(seed: u64, i: u64, d: usize, l: usize) -> Vec<usize> {
    if (i as usize) < d {
        return vec![i as usize; l];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    (0..l).map(|_| rng.random_range(0..d)).collect()
}

/// Sampled strings `start..end` for `seed`; a lower estimate of `λ*`.
pub fn sample_range(table: &OverlapTable<'_>, seed: u64, start: u64, end: u64) -> SweepResult {
    let mut out = SweepResult::empty(true);
    for i in start..end {
        let b = sample_b(seed, i, table.d, table.l);
        out.offer(&b, table.lambda(&b));
    }
    out
}

pub fn sample_sweep(ms: &MubSet, samples: u64, seed: u64) -> SweepResult {
    sample_range(&OverlapTable::new(ms), seed, 0, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{bounds, hermitian_eigmax, pvec_operator, zeta, Normalization};
    use crate::linalg::eigvalsh;
    use crate::mub::{symmetrize, trace_form_mub_set, Basis};
    use crate::classes::fixture_d4;
    use crate::mub::build_mub_set;
    use crate::pauli::build_gamma_generators;
    use crate::math;

    fn d4(l: usize) -> MubSet {
        let gs = build_gamma_generators(2).unwrap();
        build_mub_set(&gs, &fixture_d4(&gs, l).unwrap()).unwrap()
    }

    #[test]
    fn fixture_optima() {
        let r4 = sweep_max_eigen(&d4(4), DEFAULT_BUDGET).unwrap();
        assert!((r4.lambda - 0.625).abs() < 1e-10);
        assert!((r4.minus_log2() - 0.678072).abs() < 1e-6);
        assert_eq!(r4.count, 256);
        assert_eq!(r4.histogram.total(), 256);
        let r3 = sweep_max_eigen(&d4(3), DEFAULT_BUDGET).unwrap();
        assert!((r3.lambda - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn qubit_pair_matches_circle_maximum() {
        // Grid over the Bloch great circle through both basis axes (X and Y).
        let ms = trace_form_mub_set(1).unwrap().prefix(2).unwrap();
        let r = sweep_max_eigen(&ms, DEFAULT_BUDGET).unwrap();
        let mut grid: f64 = 0.0;
        for k in 0..=20000 {
            let t = 2.0 * core::f64::consts::PI * k as f64 / 20000.0;
            let r = core::f64::consts::FRAC_1_SQRT_2;
            let psi = [C64::new(r, 0.0), C64::new(r * math::cos(t), r * math::sin(t))];
            for b in 0..4 {
                let p0 = ms.basis(0).probabilities(&psi)[b / 2];
                let p1 = ms.basis(1).probabilities(&psi)[b % 2];
                grid = grid.max((p0 + p1) / 2.0);
            }
        }
        let exact = (1.0 + core::f64::consts::FRAC_1_SQRT_2) / 2.0;
        assert!((r.lambda - exact).abs() < 1e-12);
        assert!((grid - exact).abs() < 1e-7);
    }

    #[test]
    fn gram_and_dense_paths_agree() {
        let ms = trace_form_mub_set(2).unwrap().prefix(3).unwrap();
        let table = OverlapTable::new(&ms);
        for idx in 0..64 {
            let b = b_from_index(idx, 4, 3);
            let p = pvec_operator(&ms, &b, Normalization::Mean).unwrap();
            assert!((table.lambda(&b) - eigvalsh(&p.matrix)[3]).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_one_update_matches_full_spectrum() {
        let ms = trace_form_mub_set(2).unwrap();
        let table = OverlapTable::new(&ms);
        let mut worst: f64 = 0.0;
        for idx in 0..sweep_count(4, 5) {
            let b = b_from_index(idx, 4, 5);
            let p = pvec_operator(&ms, &b, Normalization::Mean).unwrap();
            worst = worst.max((table.lambda(&b) - eigvalsh(&p.matrix)[3]).abs());
        }
        assert!(worst < 1e-12, "{worst:e}");
        // A set whose prefix sums are degenerate.
        let ms = d4(4);
        let table = OverlapTable::new(&ms);
        for idx in 0..256 {
            let b = b_from_index(idx, 4, 4);
            let p = pvec_operator(&ms, &b, Normalization::Mean).unwrap();
            assert!((table.lambda(&b) - eigvalsh(&p.matrix)[3]).abs() < 1e-12);
        }
    }

    #[test]
    fn chunking_is_invisible() {
        let ms = trace_form_mub_set(3).unwrap().prefix(3).unwrap();
        let table = OverlapTable::new(&ms);
        let whole = sweep_range(&table, 0, 512);
        let parts = [0u128, 7, 100, 101, 333, 512];
        let merged = parts
            .windows(2)
            .rev()
            .map(|w| sweep_range(&table, w[0], w[1]))
            .fold(SweepResult::empty(false), SweepResult::merge);
        assert_eq!(whole, merged);
        let ms = trace_form_mub_set(2).unwrap();
        let table = OverlapTable::new(&ms);
        let whole = sweep_range(&table, 0, 1024);
        let merged = [0u128, 3, 5, 517, 1024]
            .windows(2)
            .map(|w| sweep_range(&table, w[0], w[1]))
            .fold(SweepResult::empty(false), SweepResult::merge);
        assert_eq!(whole, merged);
        for idx in [0u128, 5, 77, 1023] {
            let b = b_from_index(idx, 4, 5);
            assert_eq!(sweep_range(&table, idx, idx + 1).lambda.to_bits(), table.lambda(&b).to_bits());
        }
    }

    #[test]
    fn zeta_limits_hold_everywhere() {
        for ms in [d4(3), d4(4), trace_form_mub_set(2).unwrap(), trace_form_mub_set(3).unwrap().prefix(3).unwrap()] {
            let (z1, z2) = zeta(ms.len(), ms.dim());
            let table = OverlapTable::new(&ms);
            for idx in 0..sweep_count(ms.dim(), ms.len()) {
                let lam = table.lambda(&b_from_index(idx, ms.dim(), ms.len()));
                assert!(lam <= z1 + 1e-10 && lam <= z2 + 1e-10);
            }
            let r = sweep_max_eigen(&ms, DEFAULT_BUDGET).unwrap();
            assert!(r.minus_log2() >= bounds(ms.len(), ms.dim()).best - 1e-9);
        }
    }

    #[test]
    fn budget_refusal() {
        let ms = d4(4);
        assert_eq!(
            sweep_max_eigen(&ms, 255),
            Err(Error::BudgetExceeded { required: 256, budget: 255 })
        );
        assert_eq!(sweep_count(32, 40), u128::MAX);
    }

    #[test]
    fn sampling_is_reproducible_and_below_the_sweep() {
        let ms = d4(4);
        let a = sample_sweep(&ms, 50, 9);
        assert_eq!(a, sample_sweep(&ms, 50, 9));
        assert!(a.sampled && a.count == 50);
        assert!(a.lambda <= sweep_max_eigen(&ms, DEFAULT_BUDGET).unwrap().lambda + 1e-15);
        let table = OverlapTable::new(&ms);
        assert_eq!(sample_range(&table, 9, 0, 20).merge(sample_range(&table, 9, 20, 50)), a);
    }

    #[test]
    fn constant_string_optimum_symmetrizes() {
        // Strings of cycle-matched elements are mapped to themselves by U, so
        // averaging their top eigenvector over the cycle loses nothing.
        for l in [3, 4] {
            let ms = d4(l);
            let star = sweep_max_eigen(&ms, DEFAULT_BUDGET).unwrap().lambda;
            let u = ms.unitary.as_ref().unwrap();
            let rep = crate::mub::verify_cycle(&ms).unwrap();
            let mut hits = 0;
            for c in 0..4 {
                // The string of matched elements starting from c.
                let mut b = vec![c];
                for j in 0..l - 1 {
                    b.push(rep.permutations[j][b[j]]);
                }
                let p = pvec_operator(&ms, &b, Normalization::Mean).unwrap();
                let (lam, v) = hermitian_eigmax(&p.matrix).unwrap();
                if (lam - star).abs() < 1e-10 {
                    hits += 1;
                }
                let rho = CMatrix::outer(&v);
                let sym = symmetrize(&rho, u, l).unwrap();
                let tr = |m: &CMatrix| m.matmul(&p.matrix).trace().re;
                assert!((tr(&sym) - tr(&rho)).abs() < 1e-10);
                let terms: Vec<f64> = (0..l)
                    .map(|j| {
                        let pr = Basis::projector(ms.basis(j), b[j]);
                        sym.matmul(&pr).trace().re
                    })
                    .collect();
                for t in &terms {
                    assert!((t - terms[0]).abs() < 1e-8);
                }
            }
            // At four bases the optimum is a cycled string; at three it is not.
            assert_eq!(hits > 0, l == 4);
        }
    }
}
