//! Unitaries that cyclically permute chosen Clifford generators.
//!
//! The plane rotation `R_{j→k} = Γ_k(Γ_j + Γ_k)/√2 = (I + Γ_kΓ_j)/√2` sends
//! `Γ_j → Γ_k`, `Γ_k → -Γ_j` and fixes every other generator. For a group
//! `(g_0, …, g_{L-1})` the chain `R_{g_0→g_1} R_{g_1→g_2} ⋯ R_{g_{L-2}→g_{L-1}}`
//! already moves `Γ_{g_t}` to `Γ_{g_{t+1}}`, except that `Γ_{g_{L-1}}` lands on
//! `(-1)^{L-1} Γ_{g_0}`. The leftover signs are tracked symbolically and
//! removed at the end by conjugating with a product of an even number of
//! generators, which flips exactly the generators in the product.
//!
//! Whenever the number of flips needed is odd, `Γ_{2n}` joins the product and
//! so maps to `-Γ_{2n}`. That happens only when the permutation of all
//! `2n + 1` generators is odd, for example a single group of even length, and
//! cannot be avoided: conjugation preserves `Γ_{2n} = i^n Γ_0 ⋯ Γ_{2n-1}`.
//!
//! Every construction is checked densely before it is returned.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{CMatrix, C64};
use crate::math;
use crate::pauli::{GammaSet, PauliTerm};
use crate::{Error, Result};

/// Disjoint equal-length groups of generator indices. Each group is cycled
/// forward: `Γ_{g_t} → Γ_{g_{t+1 mod L}}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleSpec {
    n: usize,
    groups: Vec<Vec<usize>>,
}

impl CycleSpec {
    pub fn new(n: usize, groups: Vec<Vec<usize>>) -> Result<Self> {
        let count = 2 * n + 1;
        let Some(first) = groups.first() else {
            return Err(Error::InvalidCycleSpec("no groups".into()));
        };
        let l = first.len();
        if l < 2 {
            return Err(Error::InvalidCycleSpec("groups need at least two generators".into()));
        }
        let mut seen = vec![false; count];
        for g in &groups {
            if g.len() != l {
                return Err(Error::InvalidCycleSpec(format!(
                    "group lengths differ ({} vs {l})",
                    g.len()
                )));
            }
            for &i in g {
                if i >= count {
                    return Err(Error::IndexOutOfRange { index: i, count });
                }
                if seen[i] {
                    return Err(Error::InvalidCycleSpec(format!("index {i} appears twice")));
                }
                seen[i] = true;
            }
        }
        Ok(Self { n, groups })
    }

    /// One group `(0, 1, …, L-1)`.
    pub fn single(n: usize, l: usize) -> Result<Self> {
        Self::new(n, vec![(0..l).collect()])
    }

    /// All `2n + 1` generators in one cycle.
    pub fn full(n: usize) -> Result<Self> {
        Self::single(n, 2 * n + 1)
    }

    /// Consecutive blocks `(gL, …, gL + L - 1)` for `g < 2n / L`.
    pub fn split(n: usize, l: usize) -> Result<Self> {
        if l < 2 || (2 * n) % l != 0 {
            return Err(Error::InvalidCycleSpec(format!("{l} does not divide 2n = {}", 2 * n)));
        }
        Self::new(n, (0..2 * n / l).map(|g| (g * l..(g + 1) * l).collect()).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// Cycle length `L`.
    pub fn len(&self) -> usize {
        self.groups[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Where each generator should go: `perm[m]` is the target index.
    pub fn permutation(&self) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..2 * self.n + 1).collect();
        for g in &self.groups {
            for (t, &i) in g.iter().enumerate() {
                perm[i] = g[(t + 1) % g.len()];
            }
        }
        perm
    }
}

/// Image of one generator under conjugation: `U Γ_m U† = sign · Γ_target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignedIndex {
    pub sign: i8,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseUnitary {
    matrix: CMatrix,
}

pub const UNITARY_TOL: f64 = 1e-10;

impl DenseUnitary {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let r = matrix.unitarity_residual();
        if !(r < UNITARY_TOL) {
            return Err(Error::NotUnitary(r));
        }
        Ok(Self { matrix })
    }

    pub fn identity(d: usize) -> Self {
        Self { matrix: CMatrix::identity(d) }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.matrix.mul_vec(v)
    }

    /// `U A U†`.
    pub fn conjugate(&self, a: &CMatrix) -> CMatrix {
        self.matrix.matmul(a).matmul(&self.matrix.adjoint())
    }

    pub fn pow(&self, k: usize) -> Self {
        Self { matrix: self.matrix.pow(k) }
    }

    /// `||U P - s P' U||_F`, i.e. how far `U P U†` is from `s P'`, without a
    /// cubic product.
    pub fn monomial_residual(&self, p: &PauliTerm, sign: f64, image: &PauliTerm) -> f64 {
        let lhs = p.right_mul(&self.matrix);
        let rhs = image.left_mul(&self.matrix).scale(C64::new(sign, 0.0));
        lhs.distance(&rhs)
    }
}

fn check_index(gs: &GammaSet, i: usize) -> Result<()> {
    if i >= gs.len() {
        return Err(Error::IndexOutOfRange { index: i, count: gs.len() });
    }
    Ok(())
}

/// `A (I + P)/√2`, in `O(d^2)`.
fn right_rotate(a: &CMatrix, p: &PauliTerm) -> CMatrix {
    a.add(&p.right_mul(a)).scale(C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0))
}

/// `R_{j→k} = (I + Γ_k Γ_j)/√2`.
pub fn rotation_unitary(gs: &GammaSet, j: usize, k: usize) -> Result<DenseUnitary> {
    check_index(gs, j)?;
    check_index(gs, k)?;
    if j == k {
        return Err(Error::SameIndex(j));
    }
    let p = gs.gamma(k).mul_unchecked(gs.gamma(j));
    DenseUnitary::new(right_rotate(&CMatrix::identity(gs.dim()), &p))
}

/// Signed generator map of the chain product, before any sign fix.
fn chain_action(count: usize, chain: &[(usize, usize)]) -> Vec<SignedIndex> {
    let rot = |j: usize, k: usize, m: usize| -> (i8, usize) {
        if m == j {
            (1, k)
        } else if m == k {
            (-1, j)
        } else {
            (1, m)
        }
    };
    (0..count)
        .map(|m| {
            let mut cur = SignedIndex { sign: 1, target: m };
            // U = F_1 F_2 ⋯ F_k acts with F_k first.
            for &(j, k) in chain.iter().rev() {
                let (s, t) = rot(j, k, cur.target);
                cur = SignedIndex { sign: cur.sign * s, target: t };
            }
            cur
        })
        .collect()
}

/// The product of rotations, in order, that the spec uses.
fn spec_chain(spec: &CycleSpec) -> Vec<(usize, usize)> {
    spec.groups.iter().flat_map(|g| g.windows(2).map(|w| (w[0], w[1]))).collect()
}

/// Generators conjugated by the final sign fix, ascending.
fn fix_set(n: usize, action: &[SignedIndex]) -> Vec<usize> {
    let mut flips: Vec<usize> = action.iter().filter(|a| a.sign < 0).map(|a| a.target).collect();
    flips.sort_unstable();
    if flips.len() % 2 == 1 {
        let last = 2 * n;
        if let Some(pos) = flips.iter().position(|&g| g == last) {
            flips.remove(pos);
        } else {
            flips.push(last);
        }
    }
    flips
}

/// Predicted generator map of `cycle_unitary(gs, spec)`.
pub fn cycle_action(spec: &CycleSpec) -> Vec<SignedIndex> {
    let mut action = chain_action(2 * spec.n + 1, &spec_chain(spec));
    let flips = fix_set(spec.n, &action);
    for a in action.iter_mut() {
        if flips.contains(&a.target) {
            a.sign = -a.sign;
        }
    }
    action
}

pub fn cycle_unitary(gs: &GammaSet, spec: &CycleSpec) -> Result<DenseUnitary> {
    if spec.n != gs.n() {
        return Err(Error::DimensionMismatch { left: spec.n, right: gs.n() });
    }
    let chain = spec_chain(spec);
    let mut u = CMatrix::identity(gs.dim());
    for &(j, k) in &chain {
        u = right_rotate(&u, &gs.gamma(k).mul_unchecked(gs.gamma(j)));
    }
    let flips = fix_set(spec.n, &chain_action(gs.len(), &chain));
    let fix = gs.gamma_product(&flips, 0)?;
    let u = DenseUnitary::new(fix.left_mul(&u))?;

    let action = cycle_action(spec);
    let perm = spec.permutation();
    for (m, a) in action.iter().enumerate() {
        let forced = m == 2 * spec.n && a.target == m && a.sign < 0;
        if a.target != perm[m] || (a.sign < 0 && !forced) {
            return Err(Error::CycleCheck { generator: m, residual: f64::INFINITY });
        }
        let r = u.monomial_residual(gs.gamma(m), a.sign as f64, gs.gamma(a.target));
        if !(r < UNITARY_TOL) {
            return Err(Error::CycleCheck { generator: m, residual: r });
        }
    }
    Ok(u)
}

/// How far a matrix is from being a multiple of the identity: the largest
/// off-diagonal modulus together with the largest diagonal spread.
pub fn scalar_residual(m: &CMatrix) -> f64 {
    let d0 = m[(0, 0)];
    let spread = (0..m.rows()).map(|i| (m[(i, i)] - d0).norm()).fold(0.0, f64::max);
    m.max_offdiag().max(spread)
}

pub const MONOMIAL_TOL: f64 = 1e-8;

/// Finds `(b, s)` with `U a U† = s·b`, where `b` is the canonical Hermitian
/// representative of its masks. Errors if the image is not a signed monomial.
pub fn conjugate_term(gs: &GammaSet, u: &DenseUnitary, a: &PauliTerm) -> Result<(PauliTerm, i8)> {
    if a.n() != gs.n() || u.dim() != gs.dim() {
        return Err(Error::DimensionMismatch { left: a.n(), right: gs.n() });
    }
    let image = u.conjugate(&a.to_dense());
    let d = gs.dim();
    // The nonzero entry of column 0 sits in row x; the signs along columns
    // e_j then reveal z.
    let (x, pivot) = (0..d)
        .map(|r| (r, image[(r, 0)]))
        .fold((0, C64::new(0.0, 0.0)), |best, cur| if cur.1.norm() > best.1.norm() { cur } else { best });
    if pivot.norm() < 0.5 {
        return Err(Error::NotSignedMonomial(1.0 - pivot.norm()));
    }
    let mut z = 0u32;
    for j in 0..gs.n() {
        let k = 1usize << j;
        let ratio = image[(x ^ k, k)] / pivot;
        if ratio.re < 0.0 {
            z |= 1 << j;
        }
    }
    let trial = PauliTerm::new(gs.n(), x as u32, z, 0)?;
    let (b, _) = gs.canonical(&trial)?;
    let c = b.coefficient_in(&image);
    let sign: i8 = if c.re >= 0.0 { 1 } else { -1 };
    let dense_b = b.to_dense().scale(C64::new(sign as f64, 0.0));
    let mut worst: f64 = 0.0;
    for (p, q) in image.data().iter().zip(dense_b.data()) {
        worst = worst.max((p - q).norm());
    }
    if !(worst < MONOMIAL_TOL) {
        return Err(Error::NotSignedMonomial(worst));
    }
    Ok((b, sign))
}

/// `e^{iθ}` such that `U^L = e^{iθ} I`, after checking that `U^L` is scalar.
pub fn period_phase(u: &DenseUnitary, l: usize) -> Result<C64> {
    let p = u.pow(l);
    let r = scalar_residual(p.matrix());
    if !(r < UNITARY_TOL) {
        return Err(Error::CycleCheck { generator: usize::MAX, residual: r });
    }
    let z = p.matrix()[(0, 0)];
    Ok(math::cis(math::atan2(z.im, z.re)))
}
