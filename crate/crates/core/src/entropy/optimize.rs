//! Randomized local minimization of the average entropy over pure states.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::renyi_from_probabilities;
use crate::linalg::{inner, norm, normalize, C64};
use crate::math;
use crate::mub::MubSet;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinimizeConfig {
    pub alpha: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Iteration cap per descent stage.
    pub max_iter: usize,
}

impl MinimizeConfig {
    pub fn new(alpha: f64, restarts: usize, seed: u64) -> Self {
        Self { alpha, restarts, seed, max_iter: 4000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub state: Vec<C64>,
    pub value: f64,
    pub restart: usize,
}

/// Orders used to approach the min-entropy before the exact polish.
const CONTINUATION: [f64; 5] = [4.0, 16.0, 64.0, 256.0, 1024.0];

struct Objective<'a> {
    ms: &'a MubSet,
}

/// What is being minimized at a given stage.
#[derive(Clone, Copy)]
enum Target<'b> {
    Renyi(f64),
    /// `-(1/L) Σ_j log2 p_{j, b_j}` for a fixed string.
    Fixed(&'b [usize]),
}

impl Objective<'_> {
    fn amplitudes(&self, psi: &[C64]) -> Vec<Vec<C64>> {
        self.ms
            .bases
            .iter()
            .map(|b| b.vectors().iter().map(|v| inner(v, psi)).collect())
            .collect()
    }

    /// Value and the projected gradient on the sphere.
    fn eval(&self, psi: &[C64], target: Target<'_>) -> (f64, Vec<C64>) {
        let amps = self.amplitudes(psi);
        let l = self.ms.len() as f64;
        let d = self.ms.dim();
        let mut value = 0.0;
        let mut grad = alloc::vec![C64::new(0.0, 0.0); d];
        for (j, a) in amps.iter().enumerate() {
            let p: Vec<f64> = a.iter().map(C64::norm_sqr).collect();
            let weights: Vec<f64> = match target {
                Target::Renyi(alpha) => {
                    value += renyi_from_probabilities(&p, alpha).unwrap_or(0.0);
                    renyi_weights(&p, alpha)
                }
                Target::Fixed(b) => {
                    let pb = p[b[j]].max(1e-300);
                    value -= math::log2(pb);
                    let mut w = alloc::vec![0.0; d];
                    w[b[j]] = -1.0 / (pb * core::f64::consts::LN_2);
                    w
                }
            };
            for (bidx, (&w, amp)) in weights.iter().zip(a).enumerate() {
                if w == 0.0 {
                    continue;
                }
                let v = self.ms.basis(j).vector(bidx);
                let s = amp * (2.0 * w / l);
                for (g, x) in grad.iter_mut().zip(v) {
                    *g += x * s;
                }
            }
        }
        let radial = inner(psi, &grad);
        for (g, x) in grad.iter_mut().zip(psi) {
            *g -= x * radial;
        }
        (value / l, grad)
    }

    fn exact(&self, psi: &[C64], alpha: f64) -> f64 {
        let total: f64 = self
            .ms
            .bases
            .iter()
            .map(|b| renyi_from_probabilities(&b.probabilities(psi), alpha).unwrap_or(0.0))
            .sum();
        total / self.ms.len() as f64
    }

    /// Armijo-backtracked projected gradient descent.
    fn descend(&self, psi: &mut Vec<C64>, target: Target<'_>, max_iter: usize) -> f64 {
        let (mut f, mut g) = self.eval(psi, target);
        let mut step = 0.1;
        for _ in 0..max_iter {
            let gn2: f64 = g.iter().map(C64::norm_sqr).sum();
            if gn2 < 1e-26 {
                break;
            }
            let mut accepted = false;
            while step > 1e-14 {
                let mut trial: Vec<C64> = psi.iter().zip(&g).map(|(x, gx)| x - gx * step).collect();
                normalize(&mut trial);
                let (ft, gt) = self.eval(&trial, target);
                if ft <= f - 1e-4 * step * gn2 {
                    *psi = trial;
                    f = ft;
                    g = gt;
                    step *= 2.0;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        f
    }
}

/// `∂H_α/∂p_b`, computed relative to the largest probability.
fn renyi_weights(p: &[f64], alpha: f64) -> Vec<f64> {
    let ln2 = core::f64::consts::LN_2;
    if alpha == 1.0 {
        return p.iter().map(|&x| -(math::log2(x.max(1e-300)) + 1.0 / ln2)).collect();
    }
    let pmax = p.iter().copied().fold(0.0, f64::max);
    let r: Vec<f64> = p.iter().map(|&x| math::powf(x / pmax, alpha - 1.0)).collect();
    let s: f64 = r.iter().zip(p).map(|(ri, &x)| ri * x / pmax).sum();
    let c = alpha / ((1.0 - alpha) * ln2 * pmax * s);
    r.into_iter().map(|ri| c * ri).collect()
}

fn argmax(p: &[f64]) -> usize {
    (0..p.len()).fold(0, |a, i| if p[i] > p[a] { i } else { a })
}

fn random_start(d: usize, seed: u64, restart: usize) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    let mut v: Vec<C64> = (0..d)
        .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    if normalize(&mut v) == 0.0 {
        v[0] = C64::new(1.0, 0.0);
    }
    v
}

/// One restart: a seeded random start followed by local descent. For
/// `α = ∞` the order is raised stepwise, then the exact min-entropy is
/// decreased by descending `-(1/L) Σ_j log2 p_{j,b_j}` with `b` refreshed to
/// the current most likely outcomes. That function bounds the min-entropy
/// from above with equality at the refresh point, so each step can only help.
pub fn minimize_restart(ms: &MubSet, cfg: &MinimizeConfig, restart: usize) -> Result<Minimum> {
    if !(cfg.alpha > 0.0) {
        return Err(Error::InvalidAlpha(cfg.alpha));
    }
    let obj = Objective { ms };
    let mut psi = random_start(ms.dim(), cfg.seed, restart);
    if cfg.alpha.is_infinite() {
        for &a in &CONTINUATION {
            obj.descend(&mut psi, Target::Renyi(a), cfg.max_iter / 8);
        }
        let mut best = obj.exact(&psi, f64::INFINITY);
        for _ in 0..cfg.max_iter {
            let b: Vec<usize> = ms.bases.iter().map(|basis| argmax(&basis.probabilities(&psi))).collect();
            let mut trial = psi.clone();
            obj.descend(&mut trial, Target::Fixed(&b), 50);
            let h = obj.exact(&trial, f64::INFINITY);
            if !(h < best - 1e-15) {
                break;
            }
            best = h;
            psi = trial;
        }
    } else {
        obj.descend(&mut psi, Target::Renyi(cfg.alpha), cfg.max_iter);
    }
    let n = norm(&psi);
    for x in psi.iter_mut() {
        *x /= n;
    }
    crate::linalg::fix_phase(&mut psi);
    let value = obj.exact(&psi, cfg.alpha);
    Ok(Minimum { state: psi, value, restart })
}

/// Lowest value over all restarts; ties go to the earlier restart.
pub fn pick_best(results: impl IntoIterator<Item = Minimum>) -> Option<Minimum> {
    results.into_iter().fold(None, |acc: Option<Minimum>, m| match acc {
        Some(a) if !(m.value < a.value) => Some(a),
        _ => Some(m),
    })
}

/// Serial minimization over `cfg.restarts` seeded restarts.
pub fn minimize_avg_entropy(ms: &MubSet, cfg: &MinimizeConfig) -> Result<Minimum> {
    if cfg.restarts == 0 {
        return Err(Error::NoRestarts);
    }
    let mut all = Vec::with_capacity(cfg.restarts);
    for r in 0..cfg.restarts {
        all.push(minimize_restart(ms, cfg, r)?);
    }
    Ok(pick_best(all).expect("at least one restart"))
}
