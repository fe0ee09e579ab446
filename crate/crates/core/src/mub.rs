//! Common eigenbases of commuting classes, unbiasedness and cycling checks,
//! and states left invariant by the cycling unitary.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::classes::{CommutingClass, Partition};
use crate::linalg::{self, eigh, eigvalsh, fix_phase, inner, CMatrix, C64};
use crate::math;
use crate::pauli::{GammaSet, PauliTerm};
use crate::transform::{cycle_unitary, period_phase, DenseUnitary};
use crate::wigner::Gf2n;
use crate::{Error, Result};

pub const GRAM_TOL: f64 = 1e-10;
pub const EIGEN_TOL: f64 = 1e-8;
pub const BIAS_TOL: f64 = 1e-8;
/// Smallest overlap accepted when matching a cycled projector.
pub const MATCH_OVERLAP: f64 = 1.0 - 1e-6;

/// `d` orthonormal vectors. `signs[b][m]` is the eigenvalue of class member
/// `m` on vector `b` when the basis came from a class.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    vectors: Vec<Vec<C64>>,
    pub label: usize,
    pub signs: Vec<Vec<i8>>,
}

impl Basis {
    pub fn new(vectors: Vec<Vec<C64>>, label: usize) -> Result<Self> {
        let d = vectors.len();
        if d == 0 || vectors.iter().any(|v| v.len() != d) {
            return Err(Error::InvalidBasis(format!("need {d} vectors of length {d}")));
        }
        let mut worst: f64 = 0.0;
        for (a, va) in vectors.iter().enumerate() {
            for (b, vb) in vectors.iter().enumerate().skip(a) {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((inner(va, vb) - C64::new(target, 0.0)).norm());
            }
        }
        if !(worst < GRAM_TOL) {
            return Err(Error::InvalidBasis(format!("Gram matrix off identity by {worst:e}")));
        }
        Ok(Self { vectors, label, signs: Vec::new() })
    }

    pub fn computational(d: usize) -> Self {
        let vectors = (0..d)
            .map(|i| (0..d).map(|k| C64::new((i == k) as u8 as f64, 0.0)).collect())
            .collect();
        Self { vectors, label: 0, signs: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vector(&self, b: usize) -> &[C64] {
        &self.vectors[b]
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn projector(&self, b: usize) -> CMatrix {
        CMatrix::outer(&self.vectors[b])
    }

    /// Vectors as the columns of a matrix.
    pub fn matrix(&self) -> CMatrix {
        CMatrix::from_columns(&self.vectors)
    }

    /// `|<b|ψ>|^2` for every `b`.
    pub fn probabilities(&self, psi: &[C64]) -> Vec<f64> {
        self.vectors.iter().map(|v| inner(v, psi).norm_sqr()).collect()
    }
}

/// Splits the space by the `±1` eigenspaces of each member in turn. Vectors
/// come out in sign-pattern order, member 0 most significant and `+` first.
pub fn common_eigenbasis(class: &CommutingClass, label: usize) -> Result<Basis> {
    let Some(first) = class.members.first() else {
        return Err(Error::InvalidBasis("empty class".into()));
    };
    let d = first.dim();
    let mut spaces: Vec<Vec<Vec<C64>>> = vec![Basis::computational(d).vectors];
    for m in &class.members {
        if m.dim() != d {
            return Err(Error::DimensionMismatch { left: m.n(), right: first.n() });
        }
        let mut next = Vec::with_capacity(spaces.len() * 2);
        for space in spaces {
            let images: Vec<Vec<C64>> = space.iter().map(|v| m.apply(v)).collect();
            let k = space.len();
            let a = CMatrix::from_fn(k, k, |r, c| inner(&space[r], &images[c]));
            let eig = eigh(&a);
            let mut plus = Vec::new();
            let mut minus = Vec::new();
            for (i, &lam) in eig.values.iter().enumerate() {
                let dev = (lam.abs() - 1.0).abs();
                if !(dev < EIGEN_TOL) {
                    return Err(Error::NotSimultaneouslyDiagonalizable(dev));
                }
                let coeffs = eig.vectors.column(i);
                let mut v = vec![C64::new(0.0, 0.0); d];
                for (s, c) in space.iter().zip(&coeffs) {
                    for (x, y) in v.iter_mut().zip(s) {
                        *x += y * c;
                    }
                }
                if lam > 0.0 {
                    plus.push(v);
                } else {
                    minus.push(v);
                }
            }
            // Eigenvalues come out ascending, so restore the + block ordering.
            plus.reverse();
            for part in [plus, minus] {
                if !part.is_empty() {
                    next.push(part);
                }
            }
        }
        spaces = next;
    }
    if spaces.len() != d {
        return Err(Error::InvalidBasis(format!(
            "class determines only {} joint eigenspaces in dimension {d}",
            spaces.len()
        )));
    }
    let mut vectors = Vec::with_capacity(d);
    let mut signs = Vec::with_capacity(d);
    for mut space in spaces {
        let mut v = space.pop().expect("one-dimensional space");
        linalg::normalize(&mut v);
        fix_phase(&mut v);
        let mut pattern = Vec::with_capacity(class.len());
        for m in &class.members {
            let mv = m.apply(&v);
            let lam = inner(&v, &mv).re;
            let s = if lam >= 0.0 { 1.0 } else { -1.0 };
            let res = linalg::norm(&mv.iter().zip(&v).map(|(a, b)| a - b * s).collect::<Vec<_>>());
            if !(res < EIGEN_TOL) {
                return Err(Error::NotSimultaneouslyDiagonalizable(res));
            }
            pattern.push(s as i8);
        }
        vectors.push(v);
        signs.push(pattern);
    }
    let mut basis = Basis::new(vectors, label)?;
    basis.signs = signs;
    Ok(basis)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MubSet {
    pub bases: Vec<Basis>,
    pub unitary: Option<DenseUnitary>,
    pub partition: Option<Partition>,
}

/// Worst `| |<a|b>|^2 - 1/d |` over cross-basis pairs, with its location
/// `(j, k, a, b)`.
pub fn max_bias_deviation(bases: &[Basis]) -> (f64, (usize, usize, usize, usize)) {
    let mut worst = (0.0, (0, 0, 0, 0));
    let Some(first) = bases.first() else {
        return worst;
    };
    let inv_d = 1.0 / first.dim() as f64;
    for (j, bj) in bases.iter().enumerate() {
        for (k, bk) in bases.iter().enumerate().skip(j + 1) {
            for (a, va) in bj.vectors.iter().enumerate() {
                for (b, vb) in bk.vectors.iter().enumerate() {
                    let dev = (inner(va, vb).norm_sqr() - inv_d).abs();
                    if dev > worst.0 {
                        worst = (dev, (j, k, a, b));
                    }
                }
            }
        }
    }
    worst
}

impl MubSet {
    /// Checks dimensions and unbiasedness.
    pub fn new(bases: Vec<Basis>, unitary: Option<DenseUnitary>, partition: Option<Partition>) -> Result<Self> {
        let Some(first) = bases.first() else {
            return Err(Error::InvalidBasis("no bases".into()));
        };
        let d = first.dim();
        if bases.iter().any(|b| b.dim() != d) || unitary.as_ref().is_some_and(|u| u.dim() != d) {
            return Err(Error::InvalidBasis("bases of different dimensions".into()));
        }
        let (dev, (j, k, a, b)) = max_bias_deviation(&bases);
        if !(dev < BIAS_TOL) {
            return Err(Error::Unbiasedness { j, k, a, b, deviation: dev });
        }
        Ok(Self { bases, unitary, partition })
    }

    pub fn dim(&self) -> usize {
        self.bases[0].dim()
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn basis(&self, j: usize) -> &Basis {
        &self.bases[j]
    }

    pub fn bias_deviation(&self) -> f64 {
        max_bias_deviation(&self.bases).0
    }

    /// The first `l` bases, without unitary or partition.
    pub fn prefix(&self, l: usize) -> Result<Self> {
        if l == 0 || l > self.len() {
            return Err(Error::InvalidBasis(format!("cannot take {l} of {} bases", self.len())));
        }
        Ok(Self { bases: self.bases[..l].to_vec(), unitary: None, partition: None })
    }

    fn unitary_or_err(&self) -> Result<&DenseUnitary> {
        self.unitary.as_ref().ok_or(Error::MissingUnitary)
    }
}

/// Eigenbases of every class, plus the cycling unitary of the partition.
pub fn build_mub_set(gs: &GammaSet, part: &Partition) -> Result<MubSet> {
    let u = cycle_unitary(gs, &part.spec)?;
    let bases = part
        .classes
        .iter()
        .enumerate()
        .map(|(j, c)| common_eigenbasis(c, j))
        .collect::<Result<Vec<_>>>()?;
    MubSet::new(bases, Some(u), Some(part.clone()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CycleReport {
    /// `permutations[j][b]` is the index in basis `j + 1` that `U` sends
    /// element `b` of basis `j` to.
    pub permutations: Vec<Vec<usize>>,
    /// Largest `||U P U† - P'||_F` over all matched projectors.
    pub worst_residual: f64,
    /// Lowest matched overlap.
    pub worst_overlap: f64,
    /// `π_{L-1} ∘ … ∘ π_0`.
    pub closure: Vec<usize>,
}

pub fn verify_cycle(ms: &MubSet) -> Result<CycleReport> {
    let u = ms.unitary_or_err()?;
    let l = ms.len();
    let d = ms.dim();
    let mut permutations = Vec::with_capacity(l);
    let mut worst_residual: f64 = 0.0;
    let mut worst_overlap: f64 = 1.0;
    for j in 0..l {
        let next = &ms.bases[(j + 1) % l];
        let mut perm = Vec::with_capacity(d);
        for b in 0..d {
            let w = u.apply(ms.bases[j].vector(b));
            let (best, overlap) = next
                .vectors
                .iter()
                .enumerate()
                .map(|(i, v)| (i, inner(v, &w).norm_sqr()))
                .fold((0, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            if !(overlap >= MATCH_OVERLAP) {
                return Err(Error::NoProjectorMatch { basis: j, element: b, best: overlap });
            }
            let target = next.vector(best);
            let mut acc = 0.0;
            for r in 0..d {
                for c in 0..d {
                    acc += (w[r] * w[c].conj() - target[r] * target[c].conj()).norm_sqr();
                }
            }
            worst_residual = worst_residual.max(math::sqrt(acc));
            worst_overlap = worst_overlap.min(overlap);
            perm.push(best);
        }
        let mut seen = vec![false; d];
        for &p in &perm {
            if seen[p] {
                return Err(Error::NoProjectorMatch { basis: j, element: p, best: worst_overlap });
            }
            seen[p] = true;
        }
        permutations.push(perm);
    }
    let closure = (0..d).map(|b| permutations.iter().fold(b, |x, p| p[x])).collect();
    Ok(CycleReport { permutations, worst_residual, worst_overlap, closure })
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantState {
    pub state: Vec<C64>,
    /// Eigenvalue of `U` on the state.
    pub eigenvalue: C64,
}

/// Eigenvectors of `U` through the spectral projectors
/// `Π_k = (1/L) Σ_m (μ_k^{-1} U)^m`, where `U^L = e^{iθ}` and
/// `μ_k = e^{i(θ + 2πk)/L}`. Together they span the whole space.
pub fn invariant_states(ms: &MubSet) -> Result<Vec<InvariantState>> {
    let u = ms.unitary_or_err()?;
    let l = ms.len();
    let d = ms.dim();
    let theta = period_phase(u, l)?.arg();
    let mut out = Vec::with_capacity(d);
    for k in 0..l {
        let mu = math::cis((theta + 2.0 * PI * k as f64) / l as f64);
        let step = u.matrix().scale(mu.conj());
        let mut power = CMatrix::identity(d);
        let mut acc = CMatrix::identity(d);
        for _ in 1..l {
            power = power.matmul(&step);
            acc.add_assign(&power);
        }
        let proj = acc.scale(C64::new(1.0 / l as f64, 0.0));
        let mut found: Vec<Vec<C64>> = Vec::new();
        for c in 0..d {
            let mut v = proj.column(c);
            for f in &found {
                let ip = inner(f, &v);
                for (x, y) in v.iter_mut().zip(f) {
                    *x -= y * ip;
                }
            }
            if linalg::norm(&v) > 1e-6 {
                linalg::normalize(&mut v);
                found.push(v);
            }
        }
        for mut v in found {
            fix_phase(&mut v);
            out.push(InvariantState { state: v, eigenvalue: mu });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RampState {
    /// Element of basis 0 the superposition starts from.
    pub element: usize,
    pub branch: usize,
    pub state: Vec<C64>,
    pub eigenvalue: C64,
    /// `||U ψ - μ ψ||`.
    pub residual: f64,
}

/// `ψ ∝ Σ_j e^{iπj/L} (cU)^j |b^(0)>`, with `c` rescaling `U` so that
/// `(cU)^L = -I`. The `L` admissible scalings are indexed by `branch`. Each
/// `(cU)^j |b^(0)>` is, up to phase, the cycle-matched element of basis `j`,
/// and `cU ψ = e^{-iπ/L} ψ`, so ψ is an eigenvector of `U`. For `d = L = 4`
/// this is the familiar `½ Σ_j e^{iπj/4} |b^(j)>` up to normalization.
pub fn ramp_state(ms: &MubSet, element: usize, branch: usize) -> Result<RampState> {
    let u = ms.unitary_or_err()?;
    let l = ms.len();
    let d = ms.dim();
    if element >= d {
        return Err(Error::IndexOutOfRange { index: element, count: d });
    }
    let theta = period_phase(u, l)?.arg();
    let c = math::cis((PI - theta + 2.0 * PI * branch as f64) / l as f64);
    let mut term = ms.bases[0].vector(element).to_vec();
    let mut psi = vec![C64::new(0.0, 0.0); d];
    for j in 0..l {
        let ramp = math::cis(PI * j as f64 / l as f64);
        for (p, t) in psi.iter_mut().zip(&term) {
            *p += ramp * t;
        }
        term = u.apply(&term).into_iter().map(|x| x * c).collect();
    }
    linalg::normalize(&mut psi);
    let eigenvalue = math::cis(-PI / l as f64) / c;
    let upsi = u.apply(&psi);
    let residual = linalg::norm(&upsi.iter().zip(&psi).map(|(a, b)| a - b * eigenvalue).collect::<Vec<_>>());
    Ok(RampState { element, branch, state: psi, eigenvalue, residual })
}

/// Every ramp state, element-major.
pub fn ramp_states(ms: &MubSet) -> Result<Vec<RampState>> {
    let mut out = Vec::with_capacity(ms.dim() * ms.len());
    for b in 0..ms.dim() {
        for branch in 0..ms.len() {
            out.push(ramp_state(ms, b, branch)?);
        }
    }
    Ok(out)
}

pub const DENSITY_TOL: f64 = 1e-10;

/// Checks that `rho` is Hermitian, unit trace and positive semidefinite.
pub fn check_density(rho: &CMatrix) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::InvalidState("density matrix must be square".into()));
    }
    let h = rho.hermiticity_residual();
    if !(h < DENSITY_TOL) {
        return Err(Error::InvalidState(format!("not Hermitian (residual {h:e})")));
    }
    let tr = rho.trace();
    if !((tr - C64::new(1.0, 0.0)).norm() < DENSITY_TOL) {
        return Err(Error::InvalidState(format!("trace {tr} is not 1")));
    }
    let min = eigvalsh(rho).first().copied().unwrap_or(0.0);
    if min < -DENSITY_TOL {
        return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
    }
    Ok(())
}

/// `(1/L) Σ_j (U^j)† ρ U^j`.
pub fn symmetrize(rho: &CMatrix, u: &DenseUnitary, l: usize) -> Result<CMatrix> {
    check_density(rho)?;
    if rho.rows() != u.dim() || l == 0 {
        return Err(Error::InvalidState("dimension mismatch with U".into()));
    }
    let mut power = CMatrix::identity(u.dim());
    let mut acc = CMatrix::zeros(u.dim(), u.dim());
    for _ in 0..l {
        acc.add_assign(&power.adjoint().matmul(rho).matmul(&power));
        power = power.matmul(u.matrix());
    }
    Ok(acc.scale(C64::new(1.0 / l as f64, 0.0)))
}

/// Classes of a complete set in dimension `2^n` from the field trace form:
/// `C_m = {X^a Z^{B_m a}}` with `(B_m)_{ij} = Tr(m e_i e_j)` for every field
/// element `m`, followed by the `Z`-only class. `B_m` is symmetric, so each
/// class commutes, and `B_m - B_{m'} = B_{m-m'}` is invertible for `m ≠ m'`,
/// so the classes are disjoint.
pub fn trace_form_classes(n: usize) -> Result<Vec<CommutingClass>> {
    let f = Gf2n::new(n)?;
    let d = 1u32 << n;
    let mut classes = Vec::with_capacity(d as usize + 1);
    for m in 0..d {
        // Column j of B_m, as a z-mask.
        let cols: Vec<u32> = (0..n)
            .map(|j| {
                (0..n).fold(0u32, |acc, i| {
                    let t = f.trace(f.mul(m, f.mul(1 << i, 1 << j)));
                    acc | (t << i)
                })
            })
            .collect();
        let members = (1..d)
            .map(|a| {
                let z = (0..n).filter(|j| a >> j & 1 == 1).fold(0, |acc, j| acc ^ cols[j]);
                PauliTerm::hermitian(n, a, z)
            })
            .collect::<Result<Vec<_>>>()?;
        classes.push(CommutingClass::bare(members));
    }
    let zs = (1..d).map(|b| PauliTerm::hermitian(n, 0, b)).collect::<Result<Vec<_>>>()?;
    classes.push(CommutingClass::bare(zs));
    Ok(classes)
}

/// The `d + 1` bases of [`trace_form_classes`]; no cycling unitary.
pub fn trace_form_mub_set(n: usize) -> Result<MubSet> {
    let bases = trace_form_classes(n)?
        .iter()
        .enumerate()
        .map(|(j, c)| common_eigenbasis(c, j))
        .collect::<Result<Vec<_>>>()?;
    MubSet::new(bases, None, None)
}

/// `"0 -> 1 -> … -> L-1 -> 0"` for log lines.
pub fn cycle_string(l: usize) -> String {
    let mut s = String::new();
    for j in 0..l {
        s.push_str(&format!("{j} -> "));
    }
    s.push('0');
    s
}
