//! Commuting classes `C_0 … C_{L-1}` of `d - 1` Hermitian monomials each,
//! built so that one cycling unitary carries `C_j` onto `C_{j+1}`.
//!
//! Class 0 is the group generated by a singleton generator and `n - 1`
//! further commuting words, mostly disjoint generator pairs. Disjoint pairs
//! commute with each other and with any generator outside them, so the
//! `2^n - 1` nontrivial products form a commuting set. The remaining classes
//! are images of class 0 under the cycling unitary, and the choice of pairs is
//! what keeps the images disjoint:
//!
//! * `L = 2n + 1`: pairs `(k, 2n + 1 - k)` have distinct spacings, so their
//!   orbits never meet, and every index sum is `0 mod L`.
//! * `L | n`, `L` odd prime: blocks of `L` generators cycled separately, pairs
//!   within a block that skip its first generator, and a cross pair joining
//!   the first generators of blocks `2i` and `2i + 1` (see [`generators_ln`]).
//! * `L = 2`, `n` even: blocks `(2k, 2k + 1)`, singleton `Γ_0`, pairs
//!   `(2k + 1, 2k + 2)`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::pauli::{GammaSet, GammaWord, PauliTerm};
use crate::transform::{conjugate_term, cycle_action, CycleSpec, DenseUnitary};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutingClass {
    pub members: Vec<PauliTerm>,
    /// Generator index of the lone single-generator member, if any.
    pub singleton_index: Option<usize>,
}

impl CommutingClass {
    /// Wraps `members`, locating the singleton through `gs`.
    pub fn new(gs: &GammaSet, members: Vec<PauliTerm>) -> Result<Self> {
        let mut singleton_index = None;
        for m in &members {
            let w = gs.canonical_word(m)?;
            if w.len() == 1 {
                if singleton_index.is_some() {
                    singleton_index = None;
                    break;
                }
                singleton_index = Some(w.indices[0]);
            }
        }
        Ok(Self { members, singleton_index })
    }

    /// A class with no generator bookkeeping (used for bases not derived from
    /// a cycle).
    pub fn bare(members: Vec<PauliTerm>) -> Self {
        Self { members, singleton_index: None }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn keys(&self) -> BTreeSet<(u32, u32)> {
        self.members.iter().map(PauliTerm::key).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub n: usize,
    pub l: usize,
    pub spec: CycleSpec,
    pub classes: Vec<CommutingClass>,
}

impl Partition {
    pub fn dim(&self) -> usize {
        1 << self.n
    }
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..p).take_while(|k| k * k <= p).all(|k| p % k != 0)
}

/// Every nonempty product of the given commuting words, in binary counting
/// order: bit `k` of the counter selects word `k`. With the singleton first
/// and the independent words ahead of their products, the sign patterns of
/// the generating words order the eigenbasis.
pub fn words_from_generators(gens: &[Vec<usize>]) -> Vec<GammaWord> {
    let count = 1u64 << gens.len();
    (1..count)
        .map(|m| {
            let mut set = 0u64;
            for (k, g) in gens.iter().enumerate() {
                if m >> k & 1 == 1 {
                    for &i in g {
                        set ^= 1 << i;
                    }
                }
            }
            GammaWord::hermitian((0..64).filter(|i| set >> i & 1 == 1).collect())
        })
        .collect()
}

/// Length-2 words of class 0, `Γ_k Γ_{2n+1-k}` for `k = 1 … n-1`.
pub fn pairs_2n1(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|k| (k, 2 * n + 1 - k)).collect()
}

fn with_singleton(s: usize, pairs: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut gens = vec![vec![s]];
    gens.extend(pairs.iter().map(|&(a, b)| vec![a, b]));
    gens
}

/// Generating words of class 0 for `L = 2n + 1`.
pub fn generators_2n1(n: usize) -> Result<Vec<Vec<usize>>> {
    let p = 2 * n + 1;
    if !is_prime(p) {
        return Err(Error::Unsupported { n, l: p, reason: format!("2n+1 = {p} is not prime") });
    }
    Ok(with_singleton(0, &pairs_2n1(n)))
}

pub fn class0_words_2n1(n: usize) -> Result<Vec<GammaWord>> {
    Ok(words_from_generators(&generators_2n1(n)?))
}

/// Singleton and pairs for a single block pair, `n = L` odd: singleton
/// `(L-1)/2`, pairs `(k, L-k)` for `k ≤ (L-3)/2`, pairs `(L+k, 2L-k)` for
/// `k ≤ (L-1)/2`, and the cross pair `(0, L)`.
fn block_seeds(l: usize) -> (usize, Vec<(usize, usize)>) {
    let mut pairs: Vec<(usize, usize)> = (1..=(l - 3) / 2).map(|k| (k, l - k)).collect();
    pairs.extend((1..=(l - 1) / 2).map(|k| (l + k, 2 * l - k)));
    pairs.push((0, l));
    ((l - 1) / 2, pairs)
}

/// Generating words of class 0 for prime `L` dividing `n`.
///
/// For odd `L` the `n = rL` qubits are treated as `r` registers of `L`
/// qubits, each covering generator blocks `2i` and `2i + 1`. Register `i`
/// repeats the single-register pattern shifted by `2iL`; its singleton also
/// carries `Γ_0 ⋯ Γ_{2iL-1}`, which is the string of `Y`s on the earlier
/// registers, so the class is a tensor product of single-register classes and
/// stays disjoint under the block cycles. For `r = 1` this is the plain
/// singleton-plus-pairs layout.
///
/// For `L = 2` (even `n`) the blocks are `(2k, 2k + 1)`, the singleton is
/// `Γ_0` and the pairs are `(2k + 1, 2k + 2)`.
pub fn generators_ln(n: usize, l: usize) -> Result<Vec<Vec<usize>>> {
    if !is_prime(l) {
        return Err(Error::Unsupported { n, l, reason: format!("L = {l} is not prime") });
    }
    if n % l != 0 {
        return Err(Error::Unsupported { n, l, reason: format!("L = {l} does not divide n = {n}") });
    }
    if l == 2 {
        let pairs: Vec<_> = (0..n - 1).map(|k| (2 * k + 1, 2 * k + 2)).collect();
        return Ok(with_singleton(0, &pairs));
    }
    let (s, pairs) = block_seeds(l);
    let mut gens = Vec::new();
    for i in 0..n / l {
        let o = 2 * i * l;
        let mut single: Vec<usize> = (0..o).collect();
        single.push(o + s);
        gens.push(single);
        gens.extend(pairs.iter().map(|&(a, b)| vec![o + a, o + b]));
    }
    Ok(gens)
}

pub fn class0_words_ln(n: usize, l: usize) -> Result<Vec<GammaWord>> {
    Ok(words_from_generators(&generators_ln(n, l)?))
}

/// Cycle spec matching `build_classes_ln`.
pub fn spec_ln(n: usize, l: usize) -> Result<CycleSpec> {
    generators_ln(n, l)?;
    CycleSpec::split(n, l)
}

fn cycled_partition(
    gs: &GammaSet,
    spec: CycleSpec,
    u: &DenseUnitary,
    words: &[GammaWord],
) -> Result<Partition> {
    let class0 = words.iter().map(|w| gs.word_term(w)).collect::<Result<Vec<_>>>()?;
    let l = spec.len();
    let mut classes = vec![CommutingClass::new(gs, class0)?];
    for _ in 1..l {
        let prev = &classes[classes.len() - 1];
        let next = prev
            .members
            .iter()
            .map(|a| conjugate_term(gs, u, a).map(|(b, _)| b))
            .collect::<Result<Vec<_>>>()?;
        classes.push(CommutingClass::new(gs, next)?);
    }
    Ok(Partition { n: gs.n(), l, spec, classes })
}

/// Classes for `L = 2n + 1` prime, with the cycling unitary used.
pub fn build_classes_2n1(gs: &GammaSet) -> Result<(Partition, DenseUnitary)> {
    let n = gs.n();
    let words = class0_words_2n1(n)?;
    let spec = CycleSpec::full(n)?;
    let u = crate::transform::cycle_unitary(gs, &spec)?;
    Ok((cycled_partition(gs, spec, &u, &words)?, u))
}

/// Classes for prime `L` dividing `n`, with the cycling unitary used.
pub fn build_classes_ln(gs: &GammaSet, l: usize) -> Result<(Partition, DenseUnitary)> {
    let n = gs.n();
    let words = class0_words_ln(n, l)?;
    let spec = spec_ln(n, l)?;
    let u = crate::transform::cycle_unitary(gs, &spec)?;
    Ok((cycled_partition(gs, spec, &u, &words)?, u))
}

/// The two hand-written partitions in dimension 4, members in the order and
/// with the phases they are usually quoted with.
pub fn fixture_d4(gs: &GammaSet, l: usize) -> Result<Partition> {
    if gs.n() != 2 {
        return Err(Error::DimensionMismatch { left: gs.n(), right: 2 });
    }
    let table: &[[&[usize]; 3]] = match l {
        3 => &[[&[0], &[1, 4], &[3, 2]], [&[1], &[2, 4], &[3, 0]], [&[2], &[0, 4], &[3, 1]]],
        4 => &[
            [&[0], &[1, 4], &[2, 3]],
            [&[1], &[2, 4], &[3, 0]],
            [&[2], &[3, 4], &[0, 1]],
            [&[3], &[0, 4], &[1, 2]],
        ],
        _ => {
            return Err(Error::Unsupported { n: 2, l, reason: "fixtures exist for L = 3 and 4".into() })
        }
    };
    let classes = table
        .iter()
        .map(|row| {
            let members = row
                .iter()
                .map(|idx| gs.gamma_product(idx, if idx.len() == 2 { 1 } else { 0 }))
                .collect::<Result<Vec<_>>>()?;
            CommutingClass::new(gs, members)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Partition { n: 2, l, spec: CycleSpec::single(2, l)?, classes })
}

/// Dispatches on `(n, L)`: the `2n + 1` theorem, the `L | n` theorem, or the
/// `d = 4` fixtures for `L ∈ {3, 4}`.
pub fn build_partition(gs: &GammaSet, l: usize) -> Result<(Partition, DenseUnitary)> {
    let n = gs.n();
    if l == 2 * n + 1 && is_prime(l) {
        return build_classes_2n1(gs);
    }
    if is_prime(l) && n % l == 0 {
        return build_classes_ln(gs, l);
    }
    if n == 2 && (l == 3 || l == 4) {
        let part = fixture_d4(gs, l)?;
        let u = crate::transform::cycle_unitary(gs, &part.spec)?;
        return Ok((part, u));
    }
    Err(Error::Unsupported {
        n,
        l,
        reason: "needs L prime with L = 2n+1 or L | n (or n = 2 with L in {3, 4})".into(),
    })
}

/// `(j - i) mod p` for a length-2 word `Γ_i Γ_j`.
pub fn spacing(w: &GammaWord, p: usize) -> Result<usize> {
    if w.len() != 2 {
        return Err(Error::WrongLength(w.len()));
    }
    let (i, j) = (w.indices[0] % p, w.indices[1] % p);
    Ok((j + p - i) % p)
}

/// Sum of the word's indices mod `p`.
pub fn index_sum(w: &GammaWord, p: usize) -> usize {
    w.indices.iter().sum::<usize>() % p
}

/// Adds `k` to every index mod `p` and re-sorts.
pub fn shift_indices(indices: &[usize], k: usize, p: usize) -> Vec<usize> {
    let mut out: Vec<usize> = indices.iter().map(|&i| (i + k) % p).collect();
    out.sort_unstable();
    out
}

/// Image of a word under the generator permutation of a cycle spec, with the
/// symbolic signs ignored.
pub fn cycle_word(spec: &CycleSpec, w: &GammaWord) -> GammaWord {
    let action = cycle_action(spec);
    GammaWord::hermitian(w.indices.iter().map(|&i| action[i].target).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    /// Members of each class commute pairwise.
    pub p1: bool,
    /// Classes are pairwise disjoint.
    pub p2: bool,
    /// Conjugation carries class j onto class j + 1 as sets.
    pub p3: bool,
    pub sizes_ok: bool,
    pub hermitian: bool,
    pub singletons_ok: bool,
    /// Largest `||AB - BA||_F` among members, when checked densely.
    pub worst_commutator: Option<f64>,
    /// Number of members whose image picked up a minus sign.
    pub negative_images: usize,
    pub p3_failures: Vec<(usize, usize)>,
    pub error: Option<Error>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.p1 && self.p2 && self.p3 && self.sizes_ok && self.hermitian && self.singletons_ok
    }
}

/// Qubit counts up to which commutators are also checked densely.
pub const DENSE_CHECK_MAX_N: usize = 3;

pub fn validate_partition(gs: &GammaSet, part: &Partition, u: &DenseUnitary) -> ValidationReport {
    let d = gs.dim();
    let mut report = ValidationReport {
        p1: true,
        p2: true,
        p3: true,
        sizes_ok: part.classes.len() == part.l,
        hermitian: true,
        singletons_ok: true,
        worst_commutator: None,
        negative_images: 0,
        p3_failures: Vec::new(),
        error: None,
    };
    let dense = gs.n() <= DENSE_CHECK_MAX_N;
    let mut worst: f64 = 0.0;
    let mut all_keys = BTreeSet::new();
    let mut total = 0usize;
    for class in &part.classes {
        report.sizes_ok &= class.len() == d - 1;
        report.singletons_ok &= class.singleton_index.is_some();
        let mats: Vec<_> = if dense { class.members.iter().map(PauliTerm::to_dense).collect() } else { Vec::new() };
        for (i, a) in class.members.iter().enumerate() {
            report.hermitian &= a.is_hermitian() && !a.is_identity() && a.n() == gs.n();
            for (j, b) in class.members.iter().enumerate().skip(i + 1) {
                report.p1 &= a.commutes_unchecked(b);
                if dense {
                    worst = worst.max(mats[i].commutator_norm(&mats[j]));
                }
            }
        }
        let keys = class.keys();
        total += class.len();
        report.p2 &= keys.len() == class.len();
        all_keys.extend(keys);
    }
    report.p2 &= all_keys.len() == total;
    if dense {
        report.worst_commutator = Some(worst);
    }

    let l = part.classes.len();
    for (j, class) in part.classes.iter().enumerate() {
        let target = part.classes[(j + 1) % l].keys();
        for (m, a) in class.members.iter().enumerate() {
            match conjugate_term(gs, u, a) {
                Ok((b, s)) => {
                    if !target.contains(&b.key()) {
                        report.p3 = false;
                        report.p3_failures.push((j, m));
                    }
                    // Sign relative to the stored member, not the canonical one.
                    let stored = part.classes[(j + 1) % l].members.iter().find(|t| t.key() == b.key());
                    let rel = stored.map_or(s, |t| if t.phase() == b.phase() { s } else { -s });
                    if rel < 0 {
                        report.negative_images += 1;
                    }
                }
                Err(e) => {
                    report.p3 = false;
                    report.p3_failures.push((j, m));
                    report.error.get_or_insert(e);
                }
            }
        }
    }
    report
}
