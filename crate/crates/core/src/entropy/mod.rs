//! Rényi entropies of measurement outcomes, the `P_b` eigenvalue reduction
//! and the two analytic lower bounds on the average min-entropy.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::linalg::{eigh, fix_phase, inner, CMatrix, C64};
use crate::math;
use crate::mub::{check_density, Basis, MubSet};
use crate::{Error, Result};

mod optimize;
mod sweep;

pub use optimize::{minimize_avg_entropy, minimize_restart, pick_best, MinimizeConfig, Minimum};
pub use sweep::{
    b_from_index, sample_b, sample_range, sample_sweep, sweep_count, sweep_max_eigen, sweep_range, Histogram, OverlapTable,
    SweepResult, DEFAULT_BUDGET, HISTOGRAM_BINS,
};

/// Largest deviation from unit norm accepted for a pure state.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum State {
    Pure(Vec<C64>),
    Mixed(CMatrix),
}

impl State {
    pub fn dim(&self) -> usize {
        match self {
            State::Pure(v) => v.len(),
            State::Mixed(m) => m.rows(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            State::Pure(v) => {
                let n = crate::linalg::norm(v);
                if !((n - 1.0).abs() < NORM_TOL) {
                    return Err(Error::InvalidState(format!("norm {n} is not 1")));
                }
                Ok(())
            }
            State::Mixed(m) => check_density(m),
        }
    }

    pub fn density(&self) -> CMatrix {
        match self {
            State::Pure(v) => CMatrix::outer(v),
            State::Mixed(m) => m.clone(),
        }
    }

    /// Outcome distribution `<b|ρ|b>`, without validation.
    pub fn probabilities(&self, basis: &Basis) -> Vec<f64> {
        match self {
            State::Pure(v) => basis.probabilities(v),
            State::Mixed(m) => basis
                .vectors()
                .iter()
                .map(|b| inner(b, &m.mul_vec(b)).re.max(0.0))
                .collect(),
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

/// `H_α(p) = log2(Σ p^α) / (1 - α)` in bits, with Shannon at `α = 1` and
/// `-log2 max p` at `α = ∞`.
pub fn renyi_from_probabilities(p: &[f64], alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let h = if alpha == 1.0 {
        -p.iter().filter(|&&x| x > 0.0).map(|&x| x * math::log2(x)).sum::<f64>()
    } else if alpha.is_infinite() {
        -math::log2(p.iter().copied().fold(0.0, f64::max))
    } else {
        // Scale by the largest entry so large orders do not underflow.
        let pmax = p.iter().copied().fold(0.0, f64::max);
        let s: f64 = p.iter().map(|&x| math::powf(x / pmax, alpha)).sum();
        (alpha * math::log2(pmax) + math::log2(s)) / (1.0 - alpha)
    };
    Ok(h.max(0.0))
}

pub fn renyi_entropy(basis: &Basis, state: &State, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    state.validate()?;
    if state.dim() != basis.dim() {
        return Err(Error::InvalidState("dimension mismatch".into()));
    }
    renyi_from_probabilities(&state.probabilities(basis), alpha)
}

/// Mean of the per-basis entropies.
pub fn avg_entropy(ms: &MubSet, state: &State, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    state.validate()?;
    if state.dim() != ms.dim() {
        return Err(Error::InvalidState("dimension mismatch".into()));
    }
    let mut total = 0.0;
    for b in &ms.bases {
        total += renyi_from_probabilities(&state.probabilities(b), alpha)?;
    }
    Ok(total / ms.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundSet {
    /// Two-basis value `-log2[(1 + 1/√d)/2]`.
    pub deutsch: f64,
    pub small_l: f64,
    pub large_l: f64,
    pub best: f64,
}

/// Lower bounds on the average min-entropy for `l` unbiased bases in
/// dimension `d`.
pub fn bounds(l: usize, d: usize) -> BoundSet {
    let (lf, df) = (l as f64, d as f64);
    let deutsch = -math::log2((1.0 + 1.0 / math::sqrt(df)) / 2.0);
    let small_l = -math::log2((1.0 + (lf - 1.0) / math::sqrt(df)) / lf);
    let large_l = -math::log2((1.0 + (df - 1.0) / math::sqrt(lf)) / df);
    BoundSet { deutsch, small_l, large_l, best: small_l.max(large_l) }
}

/// Upper limits on `λ_max` of the mean-form `P_b` matching the two bounds.
pub fn zeta(l: usize, d: usize) -> (f64, f64) {
    let (lf, df) = (l as f64, d as f64);
    ((1.0 + (lf - 1.0) / math::sqrt(df)) / lf, (1.0 + (df - 1.0) / math::sqrt(lf)) / df)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Normalization {
    #[default]
    Mean,
    Sum,
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Self::Mean),
            "sum" => Ok(Self::Sum),
            _ => Err(Error::Parse(format!("normalization must be mean or sum, got {s:?}"))),
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Mean => "mean",
            Self::Sum => "sum",
        })
    }
}

/// One element index per basis. Written as indices joined by `-`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BVector(pub Vec<usize>);

impl BVector {
    pub fn new(entries: Vec<usize>, ms: &MubSet) -> Result<Self> {
        check_b(ms, &entries)?;
        Ok(Self(entries))
    }
}

impl fmt::Display for BVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for BVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split('-')
            .map(|t| t.trim().parse::<usize>().map_err(|e| Error::InvalidBVector(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

fn check_b(ms: &MubSet, b: &[usize]) -> Result<()> {
    if b.len() != ms.len() {
        return Err(Error::InvalidBVector(format!("length {} for {} bases", b.len(), ms.len())));
    }
    if let Some(&bad) = b.iter().find(|&&x| x >= ms.dim()) {
        return Err(Error::IndexOutOfRange { index: bad, count: ms.dim() });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct PvecOperator {
    pub matrix: CMatrix,
    pub normalization: Normalization,
}

/// `Σ_j |b^(j)><b^(j)|`, divided by `L` in mean form.
pub fn pvec_operator(ms: &MubSet, b: &[usize], normalization: Normalization) -> Result<PvecOperator> {
    check_b(ms, b)?;
    let d = ms.dim();
    let mut m = CMatrix::zeros(d, d);
    for (j, &e) in b.iter().enumerate() {
        m.add_assign(&ms.basis(j).projector(e));
    }
    if normalization == Normalization::Mean {
        m = m.scale(C64::new(1.0 / ms.len() as f64, 0.0));
    }
    Ok(PvecOperator { matrix: m, normalization })
}

pub const HERMITIAN_TOL: f64 = 1e-10;

/// Largest eigenvalue with a unit eigenvector. Within a degenerate top
/// eigenspace the vector whose dominant entry comes first is returned, then
/// its phase is fixed.
pub fn hermitian_eigmax(m: &CMatrix) -> Result<(f64, Vec<C64>)> {
    if !m.is_square() {
        return Err(Error::NotHermitian(f64::INFINITY));
    }
    let h = m.hermiticity_residual();
    if !(h < HERMITIAN_TOL) {
        return Err(Error::NotHermitian(h));
    }
    let eig = eigh(m);
    let n = eig.values.len();
    let top = eig.values[n - 1];
    let scale = top.abs().max(1.0);
    let pivot = |v: &[C64]| {
        let max = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
        v.iter().position(|x| x.norm() >= max - 1e-9).unwrap_or(0)
    };
    let mut best: Option<Vec<C64>> = None;
    for i in (0..n).rev().take_while(|&i| eig.values[i] >= top - 1e-12 * scale) {
        let v = eig.vectors.column(i);
        if best.as_ref().is_none_or(|b| pivot(&v) < pivot(b)) {
            best = Some(v);
        }
    }
    let mut v = best.expect("non-empty spectrum");
    fix_phase(&mut v);
    Ok((top, v))
}

/// `"H_2"`-style label for log lines.
pub fn alpha_label(alpha: f64) -> String {
    if alpha.is_infinite() {
        String::from("inf")
    } else {
        format!("{alpha}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{build_classes_2n1, fixture_d4};
    use crate::linalg::{eigvalsh, normalize};
    use crate::mub::{build_mub_set, ramp_states, trace_form_mub_set};
    use crate::pauli::build_gamma_generators;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    pub(crate) fn d4(l: usize) -> MubSet {
        let gs = build_gamma_generators(2).unwrap();
        build_mub_set(&gs, &fixture_d4(&gs, l).unwrap()).unwrap()
    }

    fn random_state(d: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
        let mut v: Vec<C64> = (0..d)
            .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        normalize(&mut v);
        v
    }

    #[test]
    fn deterministic_and_uniform_outcomes() {
        let ms = d4(4);
        for alpha in [0.5, 1.0, 2.0, 7.0, f64::INFINITY] {
            let own = State::Pure(ms.basis(0).vector(2).to_vec());
            assert!(renyi_entropy(ms.basis(0), &own, alpha).unwrap().abs() < 1e-12);
            assert!((renyi_entropy(ms.basis(1), &own, alpha).unwrap() - 2.0).abs() < 1e-12);
            let mixed = State::Mixed(CMatrix::identity(4).scale(C64::new(0.25, 0.0)));
            assert!((avg_entropy(&ms, &mixed, alpha).unwrap() - 2.0).abs() < 1e-12);
        }
        assert!(matches!(renyi_from_probabilities(&[1.0], 0.0), Err(Error::InvalidAlpha(_))));
        let bad = State::Pure(alloc::vec![C64::new(1.0, 0.0); 4]);
        assert!(avg_entropy(&ms, &bad, 2.0).is_err());
    }

    #[test]
    fn entropy_ordering_and_monotonicity() {
        let ms = d4(4);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let alphas = [0.3, 0.7, 1.0, 1.5, 2.0, 3.0, 10.0, f64::INFINITY];
        for _ in 0..1000 {
            let s = State::Pure(random_state(4, &mut rng));
            let h: Vec<f64> = alphas.iter().map(|&a| renyi_entropy(ms.basis(0), &s, a).unwrap()).collect();
            assert!(h[0] <= 2.0 + 1e-12 && *h.last().unwrap() >= 0.0);
            for w in h.windows(2) {
                assert!(w[0] >= w[1] - 1e-12);
            }
            let avg: Vec<f64> = alphas.iter().map(|&a| avg_entropy(&ms, &s, a).unwrap()).collect();
            for w in avg.windows(2) {
                assert!(w[0] >= w[1] - 1e-12);
            }
        }
    }

    #[test]
    fn bound_values() {
        let b = bounds(2, 4);
        assert!((b.small_l + math::log2(0.75)).abs() < 1e-15);
        assert!((b.small_l - b.deutsch).abs() < 1e-15);
        assert!((bounds(4, 4).small_l - 0.678072).abs() < 1e-6);
        for d in [2, 4, 8, 16, 32] {
            let b = bounds(d, d);
            assert!((b.small_l - b.large_l).abs() < 1e-12);
        }
        let b = bounds(9, 8);
        assert!(b.large_l > b.small_l && b.best == b.large_l);
    }

    #[test]
    fn ramp_states_reach_the_bound() {
        let ms = d4(4);
        for s in ramp_states(&ms).unwrap() {
            assert!(s.residual < 1e-8);
        }
        let best = ramp_states(&ms)
            .unwrap()
            .iter()
            .map(|s| avg_entropy(&ms, &State::Pure(s.state.clone()), f64::INFINITY).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!((best - 0.678072).abs() < 1e-6, "{best}");
    }

    #[test]
    fn pvec_forms() {
        let ms = d4(4);
        let b = [0, 1, 2, 3];
        let mean = pvec_operator(&ms, &b, Normalization::Mean).unwrap();
        let sum = pvec_operator(&ms, &b, Normalization::Sum).unwrap();
        assert_eq!(mean.matrix.scale(C64::new(4.0, 0.0)), sum.matrix);
        assert!(mean.matrix.hermiticity_residual() < 1e-12);
        assert!((mean.matrix.trace().re - 1.0).abs() < 1e-12);
        let one = ms.prefix(1).unwrap();
        let p = pvec_operator(&one, &[2], Normalization::Mean).unwrap();
        assert!((hermitian_eigmax(&p.matrix).unwrap().0 - 1.0).abs() < 1e-12);
        assert!(pvec_operator(&ms, &[0, 1], Normalization::Mean).is_err());
        assert!(pvec_operator(&ms, &[0, 1, 2, 4], Normalization::Mean).is_err());
        let parsed: BVector = "0-1-2-3".parse().unwrap();
        assert_eq!(parsed.0, b);
        assert_eq!(alloc::format!("{parsed}"), "0-1-2-3");
    }

    #[test]
    fn eigmax_conventions() {
        let (l, v) = hermitian_eigmax(&CMatrix::identity(3)).unwrap();
        assert_eq!(l, 1.0);
        assert_eq!(v[0], C64::new(1.0, 0.0));
        let (l, v) = hermitian_eigmax(&CMatrix::diagonal(&[0.1, 0.9])).unwrap();
        assert!((l - 0.9).abs() < 1e-15);
        assert!((v[1] - C64::new(1.0, 0.0)).norm() < 1e-15);
        let mut skew = CMatrix::zeros(2, 2);
        skew[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(hermitian_eigmax(&skew), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn eigmax_against_full_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [2, 3, 5, 8, 16] {
            let g = CMatrix::from_fn(d, d, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>()));
            let h = g.add(&g.adjoint());
            let (l, v) = hermitian_eigmax(&h).unwrap();
            let spectrum = eigvalsh(&h);
            assert!((l - spectrum[d - 1]).abs() < 1e-10);
            let hv = h.mul_vec(&v);
            let res: f64 = hv.iter().zip(&v).map(|(a, b)| (a - b * l).norm_sqr()).sum();
            assert!(res.sqrt() < 1e-10);
        }
    }

    #[test]
    fn bound_dominance_on_random_states() {
        let gs = build_gamma_generators(2).unwrap();
        let (part, _) = build_classes_2n1(&gs).unwrap();
        let mut sets = alloc::vec![d4(3), d4(4), build_mub_set(&gs, &part).unwrap()];
        sets.push(trace_form_mub_set(3).unwrap().prefix(5).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for ms in &sets {
            let best = bounds(ms.len(), ms.dim()).best;
            for _ in 0..300 {
                let s = State::Pure(random_state(ms.dim(), &mut rng));
                assert!(avg_entropy(ms, &s, f64::INFINITY).unwrap() >= best - 1e-9);
            }
        }
    }

    #[test]
    fn jensen_chain() {
        let ms = d4(3);
        let star = sweep_max_eigen(&ms, DEFAULT_BUDGET).unwrap().lambda;
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..1000 {
            let psi = random_state(4, &mut rng);
            let s = State::Pure(psi.clone());
            let h = avg_entropy(&ms, &s, f64::INFINITY).unwrap();
            let b: Vec<usize> = ms
                .bases
                .iter()
                .map(|basis| {
                    let p = basis.probabilities(&psi);
                    (0..p.len()).fold(0, |a, i| if p[i] > p[a] { i } else { a })
                })
                .collect();
            let p = pvec_operator(&ms, &b, Normalization::Mean).unwrap();
            let tr = inner(&psi, &p.matrix.mul_vec(&psi)).re;
            assert!(h >= -math::log2(tr) - 1e-12);
            assert!(-math::log2(tr) >= -math::log2(star) - 1e-12);
            let top = eigvalsh(&p.matrix)[3];
            assert!(tr <= top + 1e-12);
        }
    }
}
