//! Discrete phase space over `GF(2^n)`: field arithmetic, striations,
//! phase-point operators and the Wigner function of a complete set.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::entropy::hermitian_eigmax;
use crate::linalg::{CMatrix, C64};
use crate::math;
use crate::mub::{check_density, MubSet};
use crate::{Error, Result};

/// Irreducible polynomial per degree, bit `k` is the coefficient of `x^k`.
const POLYS: [u32; 10] = [
    0b11,           // x + 1
    0b111,          // x^2 + x + 1
    0b1011,         // x^3 + x + 1
    0b10011,        // x^4 + x + 1
    0b100101,       // x^5 + x^2 + 1
    0b1000011,      // x^6 + x + 1
    0b10000011,     // x^7 + x + 1
    0b100011011,    // x^8 + x^4 + x^3 + x + 1
    0b1000010001,   // x^9 + x^4 + 1
    0b10000001001,  // x^10 + x^3 + 1
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gf2n {
    n: usize,
    poly: u32,
}

impl Gf2n {
    pub fn new(n: usize) -> Result<Self> {
        if !(1..=POLYS.len()).contains(&n) {
            return Err(Error::QubitCount(n));
        }
        Ok(Self { n, poly: POLYS[n - 1] })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        1 << self.n
    }

    pub fn poly(&self) -> u32 {
        self.poly
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        a ^ b
    }

    pub fn mul(&self, mut a: u32, mut b: u32) -> u32 {
        let top = 1 << self.n;
        let mut acc = 0;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= self.poly;
            }
        }
        acc
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, (1u64 << self.n) - 2))
    }

    /// Absolute trace `a + a^2 + a^4 + …`, always 0 or 1.
    pub fn trace(&self, a: u32) -> u32 {
        let mut t = 0;
        let mut x = a;
        for _ in 0..self.n {
            t ^= x;
            x = self.mul(x, x);
        }
        t
    }
}

/// Index of the line through `(x, y)` in striation `s`: for `s < d` the lines
/// are `y = s·x + c`, striation `d` holds the verticals `x = c`.
pub fn line_index(f: &Gf2n, s: usize, x: u32, y: u32) -> usize {
    if s == f.order() as usize {
        x as usize
    } else {
        (y ^ f.mul(s as u32, x)) as usize
    }
}

/// Points as `(x, y)` for each line of each striation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Striation {
    /// `None` for the vertical striation.
    pub slope: Option<u32>,
    pub lines: Vec<Vec<(u32, u32)>>,
}

pub fn striations(n: usize) -> Result<Vec<Striation>> {
    let f = Gf2n::new(n)?;
    let d = f.order();
    let mut out = Vec::with_capacity(d as usize + 1);
    for s in 0..=d as usize {
        let mut lines = vec![Vec::with_capacity(d as usize); d as usize];
        for x in 0..d {
            for y in 0..d {
                lines[line_index(&f, s, x, y)].push((x, y));
            }
        }
        let slope = (s < d as usize).then_some(s as u32);
        out.push(Striation { slope, lines });
    }
    Ok(out)
}

/// `maps[s][c]` is the element of basis `s` attached to line `c` of
/// striation `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    maps: Vec<Vec<usize>>,
}

impl Assignment {
    pub fn identity(d: usize) -> Self {
        Self { maps: vec![(0..d).collect(); d + 1] }
    }

    pub fn new(maps: Vec<Vec<usize>>) -> Result<Self> {
        let d = maps.first().map_or(0, Vec::len);
        if d == 0 || maps.len() != d + 1 {
            return Err(Error::InvalidAssignment(format!("need d+1 maps, got {}", maps.len())));
        }
        for (s, m) in maps.iter().enumerate() {
            let mut seen = vec![false; d];
            if m.len() != d {
                return Err(Error::InvalidAssignment(format!("striation {s} has {} entries", m.len())));
            }
            for &b in m {
                if b >= d || seen[b] {
                    return Err(Error::InvalidAssignment(format!("striation {s} is not a bijection")));
                }
                seen[b] = true;
            }
        }
        Ok(Self { maps })
    }

    pub fn dim(&self) -> usize {
        self.maps[0].len()
    }

    pub fn maps(&self) -> &[Vec<usize>] {
        &self.maps
    }

    pub fn get(&self, striation: usize, line: usize) -> usize {
        self.maps[striation][line]
    }
}

fn dims(ms: &MubSet, assign: &Assignment) -> Result<Gf2n> {
    let d = ms.dim();
    if ms.len() != d + 1 {
        return Err(Error::IncompleteSet { got: ms.len(), d });
    }
    if assign.dim() != d {
        return Err(Error::InvalidAssignment(format!("assignment for d={}, set has d={d}", assign.dim())));
    }
    Gf2n::new(d.trailing_zeros() as usize)
}

/// The basis elements selected by the lines through `(x, y)`, one per basis.
pub fn phase_point_string(ms: &MubSet, assign: &Assignment, x: u32, y: u32) -> Result<Vec<usize>> {
    let f = dims(ms, assign)?;
    Ok((0..ms.len()).map(|s| assign.get(s, line_index(&f, s, x, y))).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhasePointOperator {
    pub point: (u32, u32),
    pub matrix: CMatrix,
}

/// `A_α = Σ_{lines ∋ α} Q(line) - I`.
pub fn point_operator(ms: &MubSet, assign: &Assignment, x: u32, y: u32) -> Result<PhasePointOperator> {
    let d = ms.dim();
    let b = phase_point_string(ms, assign, x, y)?;
    let mut m = CMatrix::identity(d).scale(C64::new(-1.0, 0.0));
    for (s, &e) in b.iter().enumerate() {
        m.add_assign(&ms.basis(s).projector(e));
    }
    Ok(PhasePointOperator { point: (x, y), matrix: m })
}

/// All `d^2` operators, point index `x·d + y`.
pub fn point_operators(ms: &MubSet, assign: &Assignment) -> Result<Vec<PhasePointOperator>> {
    let d = ms.dim() as u32;
    let mut out = Vec::with_capacity((d * d) as usize);
    for x in 0..d {
        for y in 0..d {
            out.push(point_operator(ms, assign, x, y)?);
        }
    }
    Ok(out)
}

/// `W_α = tr(A_α ρ) / d`.
pub fn wigner_value(a: &PhasePointOperator, rho: &CMatrix) -> Result<f64> {
    check_density(rho)?;
    let d = a.matrix.rows();
    if rho.rows() != d {
        return Err(Error::InvalidState("dimension mismatch".into()));
    }
    let mut tr = C64::new(0.0, 0.0);
    for r in 0..d {
        for c in 0..d {
            tr += a.matrix[(r, c)] * rho[(c, r)];
        }
    }
    Ok(tr.re / d as f64)
}

/// Largest Wigner value any state reaches at `α`: `λ_max(A_α) / d`.
pub fn wigner_max(a: &PhasePointOperator) -> Result<f64> {
    Ok(hermitian_eigmax(&a.matrix)?.0 / a.matrix.rows() as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpaceRow {
    pub point: (u32, u32),
    pub lambda_max: f64,
    pub w_max: f64,
}

pub fn phase_space_report(ms: &MubSet, assign: &Assignment) -> Result<Vec<PhaseSpaceRow>> {
    point_operators(ms, assign)?
        .iter()
        .map(|a| {
            let lambda_max = hermitian_eigmax(&a.matrix)?.0;
            Ok(PhaseSpaceRow { point: a.point, lambda_max, w_max: lambda_max / ms.dim() as f64 })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct WignerBound {
    /// `-log2[(d·W_max + 1)/(d+1)]` with `W_max` the largest value over all points.
    pub bits: f64,
    /// `-log2[d·(W_max + 1)]`, the formula read without the mean normalization.
    pub literal_bits: f64,
    pub w_max: f64,
    pub argmax: (u32, u32),
    /// `-log2 max_α λ_max(P_b(α), mean)`, computed from the projectors directly.
    pub pb_bits: f64,
}

pub fn wigner_entropy_bound(ms: &MubSet, assign: &Assignment) -> Result<WignerBound> {
    let d = ms.dim() as f64;
    let rows = phase_space_report(ms, assign)?;
    let best = rows
        .iter()
        .fold(&rows[0], |acc, r| if r.w_max > acc.w_max { r } else { acc });
    let mut pb_max = f64::NEG_INFINITY;
    for r in &rows {
        let b = phase_point_string(ms, assign, r.point.0, r.point.1)?;
        let p = crate::entropy::pvec_operator(ms, &b, crate::entropy::Normalization::Mean)?;
        pb_max = pb_max.max(hermitian_eigmax(&p.matrix)?.0);
    }
    Ok(WignerBound {
        bits: -math::log2((d * best.w_max + 1.0) / (d + 1.0)),
        literal_bits: -math::log2(d * (best.w_max + 1.0)),
        w_max: best.w_max,
        argmax: best.point,
        pb_bits: -math::log2(pb_max),
    })
}
