//! Pauli monomials as bitmasks, and the Jordan–Wigner Clifford generators.
//!
//! A [`PauliTerm`] stores `i^phase · X^x Z^z` where `X^x` and `Z^z` are tensor
//! products and, on every qubit, the X factor stands to the left of the Z
//! factor. Mask bit `n-1-q` belongs to qubit `q`, so qubit 0 is the most
//! significant bit of both the masks and the dense basis index. With that
//! alignment the dense matrix has entries
//!
//! ```text
//! M[k ^ x, k] = i^phase · (-1)^popcount(z & k)
//! ```
//!
//! and everything else is zero.
//!
//! Generators: `Γ_{2k} = Y^{⊗k} ⊗ X ⊗ I`, `Γ_{2k+1} = Y^{⊗k} ⊗ Z ⊗ I` and
//! `Γ_{2n} = i^n · Γ_0 ⋯ Γ_{2n-1}`, which is the Hermitian choice of phase for
//! the product of all the others (`i·Γ_0⋯Γ_{2n-1}` is only Hermitian for odd
//! `n`).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::linalg::{i_pow, CMatrix, C64};
use crate::{Error, Result, MAX_QUBITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliTerm {
    n: u8,
    phase: u8,
    x: u32,
    z: u32,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::QubitCount(n));
    }
    Ok(())
}

impl PauliTerm {
    pub fn new(n: usize, xmask: u32, zmask: u32, phase: u8) -> Result<Self> {
        check_n(n)?;
        let limit = 1u32 << n;
        if xmask >= limit || zmask >= limit {
            return Err(Error::MaskOutOfRange { n });
        }
        Ok(Self { n: n as u8, phase: phase & 3, x: xmask, z: zmask })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, 0, 0, 0)
    }

    /// The Hermitian representative with the given masks: the phase is
    /// `i^popcount(x & z)`.
    pub fn hermitian(n: usize, xmask: u32, zmask: u32) -> Result<Self> {
        Self::new(n, xmask, zmask, ((xmask & zmask).count_ones() & 3) as u8)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    #[inline]
    pub fn xmask(&self) -> u32 {
        self.x
    }

    #[inline]
    pub fn zmask(&self) -> u32 {
        self.z
    }

    #[inline]
    pub fn phase(&self) -> u8 {
        self.phase
    }

    /// Masks only, as one key. Terms with equal keys differ by a phase.
    #[inline]
    pub fn key(&self) -> (u32, u32) {
        (self.x, self.z)
    }

    #[inline]
    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn with_phase(self, phase: u8) -> Self {
        Self { phase: phase & 3, ..self }
    }

    /// Multiplies by `i^k`.
    pub fn times_i(self, k: u8) -> Self {
        Self { phase: (self.phase + k) & 3, ..self }
    }

    pub fn neg(self) -> Self {
        self.times_i(2)
    }

    fn same_n(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n(), right: other.n() });
        }
        Ok(())
    }

    /// Exact product `self · other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.same_n(other)?;
        Ok(self.mul_unchecked(other))
    }

    #[inline]
    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        // Z^{a.z} X^{b.x} = (-1)^{a.z·b.x} X^{b.x} Z^{a.z}
        let swap = 2 * ((self.z & other.x).count_ones() & 1) as u8;
        Self {
            n: self.n,
            phase: (self.phase + other.phase + swap) & 3,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        }
    }

    /// Symplectic parity test; no dense work.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.same_n(other)?;
        Ok(self.commutes_unchecked(other))
    }

    #[inline]
    pub(crate) fn commutes_unchecked(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    pub fn is_hermitian(&self) -> bool {
        (self.phase as u32 + (self.x & self.z).count_ones()) % 2 == 0
    }

    pub fn adjoint(&self) -> Self {
        // (i^p X^x Z^z)^† = i^{-p} (-1)^{x·z} X^x Z^z
        let flip = 2 * ((self.x & self.z).count_ones() & 1) as u8;
        Self { phase: (4 - self.phase + flip) & 3, ..*self }
    }

    /// The nonzero entry in column `k`, as `(row, value)`.
    #[inline]
    pub fn column_entry(&self, k: usize) -> (usize, C64) {
        let sign = 2 * ((self.z & k as u32).count_ones() & 1) as u8;
        (k ^ self.x as usize, i_pow(self.phase + sign))
    }

    pub fn to_dense(&self) -> CMatrix {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for k in 0..d {
            let (r, v) = self.column_entry(k);
            m[(r, k)] = v;
        }
        m
    }

    /// `M v` in `O(d)`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let d = self.dim();
        assert_eq!(v.len(), d, "vector length must be 2^n");
        let mut out = vec![C64::new(0.0, 0.0); d];
        for (k, &vk) in v.iter().enumerate() {
            let (r, val) = self.column_entry(k);
            out[r] = val * vk;
        }
        out
    }

    /// `self · A` in `O(d^2)`.
    pub fn left_mul(&self, a: &CMatrix) -> CMatrix {
        let d = self.dim();
        assert_eq!(a.rows(), d);
        let mut out = CMatrix::zeros(d, a.cols());
        for k in 0..d {
            let (r, val) = self.column_entry(k);
            for c in 0..a.cols() {
                out[(r, c)] = val * a[(k, c)];
            }
        }
        out
    }

    /// `A · self` in `O(d^2)`.
    pub fn right_mul(&self, a: &CMatrix) -> CMatrix {
        let d = self.dim();
        assert_eq!(a.cols(), d);
        let mut out = CMatrix::zeros(a.rows(), d);
        for k in 0..d {
            let (r, val) = self.column_entry(k);
            for row in 0..a.rows() {
                out[(row, k)] = a[(row, r)] * val;
            }
        }
        out
    }

    /// `tr(self^† A) / d`, the coefficient of this term in `A`.
    pub fn coefficient_in(&self, a: &CMatrix) -> C64 {
        let d = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..d {
            let (r, val) = self.column_entry(k);
            acc += val.conj() * a[(r, k)];
        }
        acc / d as f64
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "i^{} X:{:x} Z:{:x} n:{}", self.phase, self.x, self.z, self.n)
    }
}

impl FromStr for PauliTerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(alloc::format!("bad Pauli term {s:?}"));
        let mut parts = s.split_whitespace();
        let mut field = |prefix: &str| -> Result<&str> {
            parts.next().and_then(|p| p.strip_prefix(prefix)).ok_or_else(bad)
        };
        let phase: u8 = field("i^")?.parse().map_err(|_| bad())?;
        let x = u32::from_str_radix(field("X:")?, 16).map_err(|_| bad())?;
        let z = u32::from_str_radix(field("Z:")?, 16).map_err(|_| bad())?;
        let n: usize = field("n:")?.parse().map_err(|_| bad())?;
        if parts.next().is_some() || phase > 3 {
            return Err(bad());
        }
        Self::new(n, x, z, phase)
    }
}

/// An ordered product of generators times `i^phase`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GammaWord {
    pub indices: Vec<usize>,
    pub phase: u8,
}

/// Phase that makes an ascending product of `len` distinct generators
/// Hermitian: reversing the product costs `(-1)^{len(len-1)/2}`.
pub fn hermitian_phase(len: usize) -> u8 {
    match len % 4 {
        0 | 1 => 0,
        _ => 1,
    }
}

impl GammaWord {
    pub fn new(indices: Vec<usize>, phase: u8) -> Self {
        Self { indices, phase: phase & 3 }
    }

    /// Sorts the indices and applies the Hermitian phase.
    pub fn hermitian(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        let phase = hermitian_phase(indices.len());
        Self { indices, phase }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

impl fmt::Display for GammaWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.phase {
            0 => {}
            1 => f.write_str("i")?,
            2 => f.write_str("-")?,
            _ => f.write_str("-i")?,
        }
        if self.indices.is_empty() {
            return f.write_str("I");
        }
        for i in &self.indices {
            write!(f, "G{i}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaSet {
    n: usize,
    gammas: Vec<PauliTerm>,
    /// Row-reduced copies of the first 2n generators for decomposition:
    /// `(pivot bit, packed masks, subset of generators)`.
    echelon: Vec<(u32, u64, u32)>,
}

#[inline]
fn pack(t: &PauliTerm) -> u64 {
    ((t.x as u64) << 32) | t.z as u64
}

pub fn build_gamma_generators(n: usize) -> Result<GammaSet> {
    check_n(n)?;
    let mut gammas = Vec::with_capacity(2 * n + 1);
    for k in 0..n {
        // Y on qubits 0..k, then X or Z on qubit k.
        let bit = |q: usize| 1u32 << (n - 1 - q);
        let ys: u32 = (0..k).map(bit).sum();
        let phase = (k & 3) as u8;
        gammas.push(PauliTerm::new(n, ys | bit(k), ys, phase)?);
        gammas.push(PauliTerm::new(n, ys, ys | bit(k), phase)?);
    }
    let mut last = PauliTerm::identity(n)?.times_i((n & 3) as u8);
    for g in &gammas {
        last = last.mul_unchecked(g);
    }
    gammas.push(last);

    let mut echelon: Vec<(u32, u64, u32)> = Vec::new();
    for (i, g) in gammas[..2 * n].iter().enumerate() {
        let mut v = pack(g);
        let mut subset = 1u32 << i;
        for &(pivot, row, rs) in &echelon {
            if v >> pivot & 1 == 1 {
                v ^= row;
                subset ^= rs;
            }
        }
        debug_assert!(v != 0, "generators must be independent");
        let pivot = 63 - v.leading_zeros();
        for e in echelon.iter_mut() {
            if e.1 >> pivot & 1 == 1 {
                e.1 ^= v;
                e.2 ^= subset;
            }
        }
        echelon.push((pivot, v, subset));
    }
    Ok(GammaSet { n, gammas, echelon })
}

impl GammaSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Number of generators, `2n + 1`.
    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    pub fn gamma(&self, i: usize) -> &PauliTerm {
        &self.gammas[i]
    }

    pub fn gammas(&self) -> &[PauliTerm] {
        &self.gammas
    }

    pub fn identity(&self) -> PauliTerm {
        PauliTerm { n: self.n as u8, phase: 0, x: 0, z: 0 }
    }

    fn check_indices(&self, indices: &[usize]) -> Result<()> {
        let mut seen = 0u64;
        for &i in indices {
            if i >= self.len() {
                return Err(Error::IndexOutOfRange { index: i, count: self.len() });
            }
            if seen >> i & 1 == 1 {
                return Err(Error::DuplicateIndex(i));
            }
            seen |= 1 << i;
        }
        Ok(())
    }

    /// `i^extra_phase · Γ_{indices[0]} Γ_{indices[1]} ⋯` in the given order.
    pub fn gamma_product(&self, indices: &[usize], extra_phase: u8) -> Result<PauliTerm> {
        self.check_indices(indices)?;
        let mut t = self.identity().times_i(extra_phase);
        for &i in indices {
            t = t.mul_unchecked(&self.gammas[i]);
        }
        Ok(t)
    }

    pub fn word_term(&self, w: &GammaWord) -> Result<PauliTerm> {
        self.gamma_product(&w.indices, w.phase)
    }

    /// Writes `t` as `i^p` times an ascending product of a subset of
    /// `Γ_0 … Γ_{2n-1}`. That subset is unique.
    pub fn decompose(&self, t: &PauliTerm) -> Result<GammaWord> {
        if t.n() != self.n {
            return Err(Error::DimensionMismatch { left: t.n(), right: self.n });
        }
        let mut v = pack(t);
        let mut subset = 0u32;
        for &(pivot, row, rs) in &self.echelon {
            if v >> pivot & 1 == 1 {
                v ^= row;
                subset ^= rs;
            }
        }
        debug_assert_eq!(v, 0);
        let indices: Vec<usize> = (0..2 * self.n).filter(|i| subset >> i & 1 == 1).collect();
        let base = self.gamma_product(&indices, 0)?;
        Ok(GammaWord::new(indices, (t.phase + 4 - base.phase) & 3))
    }

    /// Shortest ascending word for `t`. Subsets with more than `n` members are
    /// rewritten over their complement together with `Γ_{2n}`.
    pub fn canonical_word(&self, t: &PauliTerm) -> Result<GammaWord> {
        let w = self.decompose(t)?;
        if w.len() <= self.n {
            return Ok(w);
        }
        let mut indices: Vec<usize> = (0..2 * self.n).filter(|i| !w.indices.contains(i)).collect();
        indices.push(2 * self.n);
        let base = self.gamma_product(&indices, 0)?;
        Ok(GammaWord::new(indices, (t.phase + 4 - base.phase) & 3))
    }

    /// Hermitian term with the same masks as `t`, written as its canonical
    /// word with the ascending Hermitian phase.
    pub fn canonical(&self, t: &PauliTerm) -> Result<(PauliTerm, GammaWord)> {
        let w = self.canonical_word(t)?;
        let hw = GammaWord::hermitian(w.indices);
        Ok((self.word_term(&hw)?, hw))
    }
}
