//! The maps `d^{k,l}` of a double successor pair and the tile `d_{I,I''}`.
//!
//! Generators are bit masks. Inside this module two labelings occur: rank
//! masks (bit `k` is the point at rank `k + 1` along `σ_I`) and point masks
//! (bit `p` is marked point `p`). The outer point is bit `m - 1` in both.
//!
//! Unfolding the recursion for `x = y_P y_Q y_R` with `P ⊆ {a,c}`,
//! `Q ⊆ {b,d}` gives the closed form
//!
//! ```text
//! d(x) = (E12 + E21) x + E21 ∂_P x + E12 ∂_Q x + κ ω ∧ (1 + ∂_P)(1 + ∂_Q) x
//! ```
//!
//! where `∂_P` deletes one factor of `y_P` in all possible ways, `E22 = κ ω`
//! and `ω = Σ_i T^{W(i)} y_i`.

use std::collections::BTreeMap;

use crate::exactfield::{BinPoly, RationalFn};
use crate::resolutions::{SuccessorPair, TreeResolution};

use super::ComplexError;

/// A sparse exterior-algebra element keyed by generator mask.
pub type ExtVec = BTreeMap<u64, RationalFn>;

pub(crate) fn ext_add(v: &mut ExtVec, mask: u64, c: RationalFn) {
    if c.is_zero() {
        return;
    }
    match v.get_mut(&mask) {
        Some(x) => {
            *x = x.add_ref(&c);
            if x.is_zero() {
                v.remove(&mask);
            }
        }
        None => {
            v.insert(mask, c);
        }
    }
}

/// `y_i ∧ v`.
pub fn ext_wedge(i: usize, v: &ExtVec) -> ExtVec {
    let bit = 1u64 << i;
    v.iter().filter(|(m, _)| *m & bit == 0).map(|(m, c)| (m | bit, c.clone())).collect()
}

/// The scalars of the four components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scalars {
    pub e12: RationalFn,
    pub e21: RationalFn,
    /// `E22 = kappa · Σ_i T^{W(i)} y_i`.
    pub kappa: RationalFn,
}

impl Scalars {
    pub fn new(segments: [i64; 4], nu: bool) -> Result<Self, ComplexError> {
        let [a, b, c, d] = segments;
        let nc = if nu { c } else { 0 };
        let bc = RationalFn::inv_one_plus_tpow(b + c).map_err(|_| ComplexError::NonGenericWeights)?;
        let cd = RationalFn::inv_one_plus_tpow(c + d).map_err(|_| ComplexError::NonGenericWeights)?;
        Ok(Self {
            e12: cd.mul_tpow(nc),
            e21: bc.mul_tpow(b + nc),
            kappa: bc.mul_ref(&cd).mul_tpow(nc - a),
        })
    }

    pub fn for_pair(pair: &SuccessorPair) -> Result<Self, ComplexError> {
        Self::new(pair.segments, pair.nu)
    }
}

/// Everything needed to evaluate `d_{I,I''}` in rank coordinates.
pub struct PairMap<'a> {
    pub scalars: Scalars,
    src: &'a TreeResolution,
    dst: &'a TreeResolution,
    m: usize,
    p_bits: u64,
    q_bits: u64,
    /// `W` by rank.
    w_rank: Vec<i64>,
    /// The four scalar bases `E12 + E21, E21, E12, κ`.
    bases: [RationalFn; 4],
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Term {
    mask: u64,
    base: u8,
    exp: i64,
}

impl<'a> PairMap<'a> {
    pub fn new(
        pair: &SuccessorPair,
        src: &'a TreeResolution,
        dst: &'a TreeResolution,
        nu_override: Option<bool>,
    ) -> Result<Self, ComplexError> {
        let m = src.sigma.len();
        let scalars = Scalars::new(pair.segments, nu_override.unwrap_or(pair.nu))?;
        let bit = |r: usize| 1u64 << (r - 1);
        let [a, b, c, d] = pair.ranks;
        let w_rank = src.sigma.iter().map(|&p| src.cumweight[p] + pair.w_shift).collect();
        let bases = [
            scalars.e12.add_ref(&scalars.e21),
            scalars.e21.clone(),
            scalars.e12.clone(),
            scalars.kappa.clone(),
        ];
        Ok(Self { scalars, src, dst, m, p_bits: bit(a) | bit(c), q_bits: bit(b) | bit(d), w_rank, bases })
    }

    pub fn ranks_of(&self, points: u64) -> u64 {
        map_bits(points, |p| self.src.rank_of[p])
    }

    pub fn points_of(&self, ranks: u64) -> u64 {
        map_bits(ranks, |k| self.src.sigma[k])
    }

    /// Terms of `d(x)` for a rank mask `x`, each scaled by `T^shift`.
    fn rank_terms(&self, x: u64, shift: i64, out: &mut Vec<Term>) {
        let p = x & self.p_bits;
        let q = x & self.q_bits;
        out.push(Term { mask: x, base: 0, exp: shift });
        for b in bits(p) {
            out.push(Term { mask: x & !(1 << b), base: 1, exp: shift });
        }
        for b in bits(q) {
            out.push(Term { mask: x & !(1 << b), base: 2, exp: shift });
        }
        // (1 + ∂_P)(1 + ∂_Q) x, then ω ∧ each
        let drop_p: Vec<u64> = std::iter::once(0).chain(bits(p).map(|b| 1u64 << b)).collect();
        let drop_q: Vec<u64> = std::iter::once(0).chain(bits(q).map(|b| 1u64 << b)).collect();
        for &dp in &drop_p {
            for &dq in &drop_q {
                let z = x & !dp & !dq;
                for i in 0..self.m {
                    if z >> i & 1 == 0 {
                        out.push(Term { mask: z | 1 << i, base: 3, exp: shift + self.w_rank[i] });
                    }
                }
            }
        }
    }

    /// Relabels to points and eliminates the outer point with the target relation.
    fn to_target(&self, t: Term, out: &mut Vec<Term>) {
        let mask = self.points_of(t.mask);
        let outer = 1u64 << (self.m - 1);
        if mask & outer == 0 {
            out.push(Term { mask, ..t });
            return;
        }
        let rest = mask & !outer;
        for j in 0..self.m - 1 {
            if rest >> j & 1 == 0 {
                out.push(Term { mask: rest | 1 << j, base: t.base, exp: t.exp + self.dst.cumweight[j] });
            }
        }
    }

    fn assemble(&self, mut terms: Vec<Term>) -> Vec<(u64, RationalFn)> {
        terms.sort_unstable();
        let mut out = Vec::new();
        let mut i = 0;
        while i < terms.len() {
            let mask = terms[i].mask;
            let mut coef = RationalFn::zero();
            while i < terms.len() && terms[i].mask == mask {
                let base = terms[i].base;
                let mut exps = Vec::new();
                while i < terms.len() && terms[i].mask == mask && terms[i].base == base {
                    let e = terms[i].exp;
                    let mut k = 0;
                    while i < terms.len() && terms[i].mask == mask && terms[i].base == base && terms[i].exp == e {
                        k += 1;
                        i += 1;
                    }
                    if k % 2 == 1 {
                        exps.push(e);
                    }
                }
                if let Some(&lo) = exps.first() {
                    let poly = BinPoly::from_exponents(exps.iter().map(|&e| (e - lo) as usize));
                    let l = RationalFn::from_poly(poly).mul_tpow(lo);
                    coef = coef.add_ref(&self.bases[base as usize].mul_ref(&l));
                }
            }
            if !coef.is_zero() {
                out.push((mask, coef));
            }
        }
        out
    }

    /// `d_{I,I''}` of the point-basis generator `x` (outer point excluded),
    /// expressed in the target basis.
    pub fn column(&self, x: u64) -> Vec<(u64, RationalFn)> {
        let mut rank_terms = Vec::new();
        self.rank_terms(self.ranks_of(x), 0, &mut rank_terms);
        let mut terms = Vec::with_capacity(rank_terms.len() * 2);
        for t in rank_terms {
            self.to_target(t, &mut terms);
        }
        self.assemble(terms)
    }

    /// `d_{I,I''}(R_I ∧ x)`, where `R_I = Σ_i T^{W(i)} y_i` is the relation
    /// of `Y_I`; zero when the map is well defined on the quotient.
    pub fn relation_image(&self, x: u64) -> Vec<(u64, RationalFn)> {
        let xr = self.ranks_of(x);
        let mut rank_terms = Vec::new();
        for i in 0..self.m {
            if xr >> i & 1 == 0 {
                self.rank_terms(xr | 1 << i, self.w_rank[i], &mut rank_terms);
            }
        }
        let mut terms = Vec::with_capacity(rank_terms.len() * 2);
        for t in rank_terms {
            self.to_target(t, &mut terms);
        }
        self.assemble(terms)
    }

    /// `d(x)` for a rank mask, in rank coordinates, without target reduction.
    pub fn d_rank(&self, x: u64) -> ExtVec {
        let mut terms = Vec::new();
        self.rank_terms(x, 0, &mut terms);
        self.assemble(terms).into_iter().collect()
    }

    /// `E_{kl}` applied to `1`, in rank coordinates.
    pub fn base_value(&self, k: u8, l: u8) -> ExtVec {
        let mut v = ExtVec::new();
        match (k, l) {
            (1, 1) => {}
            (1, 2) => ext_add(&mut v, 0, self.scalars.e12.clone()),
            (2, 1) => ext_add(&mut v, 0, self.scalars.e21.clone()),
            _ => {
                for i in 0..self.m {
                    ext_add(&mut v, 1 << i, self.scalars.kappa.mul_tpow(self.w_rank[i]));
                }
            }
        }
        v
    }

    /// The recursion for `d^{k,l}` applied literally, peeling `factors`
    /// (rank indices) from the front.
    pub fn d_recurse(&self, k: u8, l: u8, factors: &[usize]) -> ExtVec {
        let Some((&i, rest)) = factors.split_first() else {
            return self.base_value(k, l);
        };
        let bit = 1u64 << i;
        let sum = |a: ExtVec, b: ExtVec| {
            let mut a = a;
            for (m, c) in b {
                ext_add(&mut a, m, c);
            }
            a
        };
        if k == 1 && self.p_bits & bit != 0 {
            sum(ext_wedge(i, &self.d_recurse(1, l, rest)), self.d_recurse(2, l, rest))
        } else if l == 1 && self.q_bits & bit != 0 {
            sum(ext_wedge(i, &self.d_recurse(k, 1, rest)), self.d_recurse(k, 2, rest))
        } else {
            ext_wedge(i, &self.d_recurse(k, l, rest))
        }
    }

    /// Replaces the outer generator using the target relation
    /// `y_m = Σ_{j≠m} T^{W''(j)} y_j`; input and output in point coordinates.
    pub fn eliminate_ym(&self, v: &ExtVec) -> ExtVec {
        eliminate_ym(self.dst, v)
    }
}

/// `y_m`-elimination in the relation of `tree` (point coordinates).
pub fn eliminate_ym(tree: &TreeResolution, v: &ExtVec) -> ExtVec {
    let m = tree.sigma.len();
    let outer = 1u64 << (m - 1);
    let mut out = ExtVec::new();
    for (&mask, c) in v {
        if mask & outer == 0 {
            ext_add(&mut out, mask, c.clone());
            continue;
        }
        let rest = mask & !outer;
        for j in 0..m - 1 {
            if rest >> j & 1 == 0 {
                ext_add(&mut out, rest | 1 << j, c.mul_tpow(tree.cumweight[j]));
            }
        }
    }
    out
}

pub(crate) fn bits(mut x: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if x == 0 {
            None
        } else {
            let b = x.trailing_zeros() as usize;
            x &= x - 1;
            Some(b)
        }
    })
}

fn map_bits(x: u64, f: impl Fn(usize) -> usize) -> u64 {
    bits(x).fold(0, |acc, b| acc | 1 << f(b))
}
