//! The E1 term of the May spectral sequence at an odd prime.
//!
//! E1 is the free graded-commutative algebra on trigraded generators
//!
//! * `h_{m,i}` (m >= 1, i >= 0), exterior, tri-degree `(1, 2(p^m-1)p^i, 2m-1)`
//! * `a_m` (m >= 0), polynomial, tri-degree `(1, 2p^m-1, 2m+1)`
//! * `b_{m,i}` (m >= 1, i >= 0), polynomial, tri-degree `(2, 2(p^m-1)p^{i+1}, p(2m-1))`
//!
//! Sign commutativity is governed by `s + t` parity, under which the `h`'s
//! are odd and the `a`'s and `b`'s even. The weight grading `u` is carried
//! as metadata and never used in vanishing decisions.
//!
//! Monomial enumeration at a bidegree `(s, t)` recurses over the finitely
//! many generators with `t` below the target (there are `O(log^2 t)` of
//! them), pruning on the remaining cohomological budget. This keeps scans
//! at `t ~ p^n q` effectively instant, which is the point: emptiness of
//! `E1^{s,t}` is an upper-bound certificate for `Ext^{s,t}`.
//!
//! The d1 differential is the Leibniz extension of
//! `d1(h_{m,i}) = -sum_{0<k<m} h_{m-k,k+i} h_{k,i}`,
//! `d1(a_m) = -sum_{0<=k<m} h_{m-k,k} a_k`, `d1(b_{m,i}) = 0`;
//! it raises `s` by one, preserves `t`, and lowers `u` by one on every term.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::chart::ExtChart;
use crate::exec::{map_range, map_slice, ExecMode};

/// Generator species, in the fixed tie-break order used for sorting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenKind {
    H,
    A,
    B,
}

/// One multiplicative generator of the May E1 term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MayGenerator {
    pub kind: GenKind,
    pub m: u32,
    /// Second index for `h` and `b`; always 0 for `a`.
    pub i: u32,
}

/// The May context: just the odd prime.
#[derive(Debug, Clone, Copy)]
pub struct MayContext {
    pub p: u32,
}

impl MayContext {
    pub fn new(p: u32) -> MayContext {
        assert!(p >= 3 && p % 2 == 1, "p must be an odd prime");
        MayContext { p }
    }

    pub fn q(&self) -> i64 {
        2 * (self.p as i64 - 1)
    }
}

impl MayGenerator {
    pub fn h(m: u32, i: u32) -> MayGenerator {
        assert!(m >= 1);
        MayGenerator {
            kind: GenKind::H,
            m,
            i,
        }
    }

    pub fn a(m: u32) -> MayGenerator {
        MayGenerator {
            kind: GenKind::A,
            m,
            i: 0,
        }
    }

    pub fn b(m: u32, i: u32) -> MayGenerator {
        assert!(m >= 1);
        MayGenerator {
            kind: GenKind::B,
            m,
            i,
        }
    }

    pub fn s(&self) -> u32 {
        match self.kind {
            GenKind::H | GenKind::A => 1,
            GenKind::B => 2,
        }
    }

    pub fn t(&self, ctx: &MayContext) -> i64 {
        let p = ctx.p as i64;
        match self.kind {
            GenKind::H => 2 * (p.pow(self.m) - 1) * p.pow(self.i),
            GenKind::A => 2 * p.pow(self.m) - 1,
            GenKind::B => 2 * (p.pow(self.m) - 1) * p.pow(self.i + 1),
        }
    }

    /// The May weight, carried as metadata only.
    pub fn u(&self, ctx: &MayContext) -> i64 {
        let p = ctx.p as i64;
        match self.kind {
            GenKind::H => 2 * self.m as i64 - 1,
            GenKind::A => 2 * self.m as i64 + 1,
            GenKind::B => p * (2 * self.m as i64 - 1),
        }
    }

    /// Odd generators are exterior (exponent at most one).
    pub fn is_exterior(&self) -> bool {
        self.kind == GenKind::H
    }

    /// Sign parity: `(s + t) mod 2`. Only the `h`'s are odd.
    pub fn is_odd(&self) -> bool {
        self.kind == GenKind::H
    }

    fn sort_key(&self, ctx: &MayContext) -> (i64, GenKind, u32, u32) {
        (self.t(ctx), self.kind, self.m, self.i)
    }
}

impl fmt::Display for MayGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GenKind::H => write!(f, "h_{{{},{}}}", self.m, self.i),
            GenKind::A => write!(f, "a_{}", self.m),
            GenKind::B => write!(f, "b_{{{},{}}}", self.m, self.i),
        }
    }
}

/// Every generator with `t <= t_max`, sorted by `(t, kind, m, i)`.
pub fn generators_up_to(ctx: &MayContext, t_max: i64) -> Vec<MayGenerator> {
    let p = ctx.p as i64;
    let mut out = Vec::new();
    // a_m: t = 2 p^m - 1
    let mut m = 0u32;
    while 2 * p.pow(m) - 1 <= t_max {
        out.push(MayGenerator::a(m));
        m += 1;
    }
    // h_{m,i}: t = 2 (p^m - 1) p^i
    let mut mm = 1u32;
    while 2 * (p.pow(mm) - 1) <= t_max {
        let mut i = 0u32;
        while 2 * (p.pow(mm) - 1) * p.pow(i) <= t_max {
            out.push(MayGenerator::h(mm, i));
            i += 1;
        }
        mm += 1;
    }
    // b_{m,i}: t = 2 (p^m - 1) p^{i+1}
    let mut mm = 1u32;
    while 2 * (p.pow(mm) - 1) * p <= t_max {
        let mut i = 0u32;
        while 2 * (p.pow(mm) - 1) * p.pow(i + 1) <= t_max {
            out.push(MayGenerator::b(mm, i));
            i += 1;
        }
        mm += 1;
    }
    out.sort_by_key(|g| g.sort_key(ctx));
    out
}

/// A monomial in the E1 generators: factors sorted by `(t, kind, m, i)`,
/// exterior exponents at most one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MayMonomial {
    factors: Vec<(MayGenerator, u32)>,
}

impl MayMonomial {
    pub fn one() -> MayMonomial {
        MayMonomial::default()
    }

    /// Canonical monomial from arbitrary factor order; `None` when an
    /// exterior generator appears twice. No sign bookkeeping here.
    pub fn from_factors(
        ctx: &MayContext,
        factors: impl IntoIterator<Item = (MayGenerator, u32)>,
    ) -> Option<MayMonomial> {
        let mut out = MayMonomial::one();
        for (g, e) in factors {
            if e == 0 {
                continue;
            }
            if g.is_exterior() && (e > 1 || out.exponent_of(&g) > 0) {
                return None;
            }
            out.insert(ctx, g, e);
        }
        Some(out)
    }

    fn insert(&mut self, ctx: &MayContext, g: MayGenerator, e: u32) {
        let key = g.sort_key(ctx);
        match self
            .factors
            .binary_search_by_key(&key, |(x, _)| x.sort_key(ctx))
        {
            Ok(i) => self.factors[i].1 += e,
            Err(i) => self.factors.insert(i, (g, e)),
        }
    }

    pub fn factors(&self) -> &[(MayGenerator, u32)] {
        &self.factors
    }

    pub fn exponent_of(&self, g: &MayGenerator) -> u32 {
        self.factors
            .iter()
            .find(|(x, _)| x == g)
            .map_or(0, |(_, e)| *e)
    }

    pub fn s(&self) -> u32 {
        self.factors.iter().map(|(g, e)| g.s() * e).sum()
    }

    pub fn t(&self, ctx: &MayContext) -> i64 {
        self.factors.iter().map(|(g, e)| g.t(ctx) * *e as i64).sum()
    }

    pub fn u(&self, ctx: &MayContext) -> i64 {
        self.factors.iter().map(|(g, e)| g.u(ctx) * *e as i64).sum()
    }

    pub fn tri_degree(&self, ctx: &MayContext) -> (u32, i64, i64) {
        (self.s(), self.t(ctx), self.u(ctx))
    }

    /// Graded-commutative product: `None` when an exterior square appears,
    /// otherwise the canonical monomial and whether the sign flips.
    pub fn mul(&self, ctx: &MayContext, other: &MayMonomial) -> Option<(MayMonomial, bool)> {
        // inversions among odd letters: each odd factor of `other` passes
        // the odd factors of `self` that sort above it
        let mut inversions = 0u32;
        for (g, e) in &other.factors {
            if !g.is_odd() {
                continue;
            }
            if self.exponent_of(g) > 0 {
                return None;
            }
            let above: u32 = self
                .factors
                .iter()
                .filter(|(x, _)| x.is_odd() && x.sort_key(ctx) > g.sort_key(ctx))
                .map(|(_, ee)| *ee)
                .sum();
            inversions += above * e;
        }
        let mut out = self.clone();
        for (g, e) in &other.factors {
            out.insert(ctx, *g, *e);
        }
        Some((out, inversions % 2 == 1))
    }
}

impl fmt::Display for MayMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (g, e) in &self.factors {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{g}")?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// The complete monomial basis of `E1^{s,t}` (all weights `u` merged).
#[derive(Debug, Clone)]
pub struct MayE1Piece {
    pub p: u32,
    pub s: u32,
    pub t: i64,
    pub basis: Vec<MayMonomial>,
}

/// Enumerate the monomial basis of `E1^{s,t}`.
pub fn e1_basis(ctx: &MayContext, s: u32, t: i64) -> MayE1Piece {
    let mut basis = Vec::new();
    if t >= 0 {
        // generators descending by t; every generator has t >= s, so the
        // budget prunes are sharp
        let mut gens = generators_up_to(ctx, t);
        gens.reverse();
        let mut acc: Vec<(MayGenerator, u32)> = Vec::new();
        rec_basis(ctx, &gens, 0, s, t, &mut acc, &mut basis);
    }
    basis.sort();
    MayE1Piece {
        p: ctx.p,
        s,
        t,
        basis,
    }
}

fn rec_basis(
    ctx: &MayContext,
    gens: &[MayGenerator],
    idx: usize,
    rem_s: u32,
    rem_t: i64,
    acc: &mut Vec<(MayGenerator, u32)>,
    out: &mut Vec<MayMonomial>,
) {
    if rem_s == 0 {
        if rem_t == 0 {
            out.push(
                MayMonomial::from_factors(ctx, acc.iter().copied())
                    .expect("accumulated factors are distinct"),
            );
        }
        return;
    }
    if rem_t < rem_s as i64 {
        return; // every generator satisfies t >= s
    }
    if idx == gens.len() {
        return;
    }
    let g = gens[idx];
    let (gs, gt) = (g.s(), g.t(ctx));
    // descending t: nothing from here on can reach rem_t faster than
    // rem_s copies of the current generator
    if rem_t > rem_s as i64 * gt {
        return;
    }
    let mut e_max = rem_s / gs;
    if g.is_exterior() {
        e_max = e_max.min(1);
    }
    e_max = e_max.min((rem_t / gt) as u32);
    for e in (0..=e_max).rev() {
        if e > 0 {
            acc.push((g, e));
        }
        rec_basis(
            ctx,
            gens,
            idx + 1,
            rem_s - e * gs,
            rem_t - e as i64 * gt,
            acc,
            out,
        );
        if e > 0 {
            acc.pop();
        }
    }
}

/// Every monomial with `t <= t_max` (no filtration constraint), in a
/// deterministic order.
pub fn monomials_up_to_t(ctx: &MayContext, t_max: i64) -> Vec<MayMonomial> {
    let mut gens = generators_up_to(ctx, t_max);
    gens.reverse();
    let mut out = Vec::new();
    let mut acc: Vec<(MayGenerator, u32)> = Vec::new();
    rec_all(ctx, &gens, 0, t_max, &mut acc, &mut out);
    out
}

fn rec_all(
    ctx: &MayContext,
    gens: &[MayGenerator],
    idx: usize,
    budget: i64,
    acc: &mut Vec<(MayGenerator, u32)>,
    out: &mut Vec<MayMonomial>,
) {
    if idx == gens.len() {
        out.push(
            MayMonomial::from_factors(ctx, acc.iter().copied())
                .expect("accumulated factors are distinct"),
        );
        return;
    }
    let g = gens[idx];
    let gt = g.t(ctx);
    let mut e_max = (budget / gt) as u32;
    if g.is_exterior() {
        e_max = e_max.min(1);
    }
    for e in 0..=e_max {
        if e > 0 {
            acc.push((g, e));
        }
        rec_all(ctx, gens, idx + 1, budget - e as i64 * gt, acc, out);
        if e > 0 {
            acc.pop();
        }
    }
}

/// A formal F_p-combination of monomials.
pub type MaySum = BTreeMap<MayMonomial, u32>;

fn add_term(sum: &mut MaySum, p: u32, m: MayMonomial, c: u32) {
    if c.is_multiple_of(p) {
        return;
    }
    let e = sum.entry(m).or_insert(0);
    *e = (*e + c) % p;
    if *e == 0 {
        let m2 = sum.iter().find(|(_, &v)| v == 0).map(|(k, _)| k.clone());
        if let Some(k) = m2 {
            sum.remove(&k);
        }
    }
}

/// `d1` on a single generator: a list of (left, right, always-negated)
/// two-letter words.
fn d1_generator(g: &MayGenerator) -> Vec<(MayGenerator, MayGenerator)> {
    match g.kind {
        GenKind::H => (1..g.m)
            .map(|k| (MayGenerator::h(g.m - k, k + g.i), MayGenerator::h(k, g.i)))
            .collect(),
        GenKind::A => (0..g.m)
            .map(|k| (MayGenerator::h(g.m - k, k), MayGenerator::a(k)))
            .collect(),
        GenKind::B => Vec::new(),
    }
}

/// The d1 differential as a canonical formal sum. Raises `s` by one,
/// preserves `t`, lowers `u` by one.
pub fn d1(ctx: &MayContext, mono: &MayMonomial) -> MaySum {
    let p = ctx.p;
    let mut out = MaySum::new();
    let mut prefix_parity = 0u32;
    for (fi, (g, e)) in mono.factors.iter().enumerate() {
        let dg = d1_generator(g);
        if !dg.is_empty() {
            // left part: factors before fi plus g^{e-1}
            let mut left = MayMonomial::default();
            for (x, xe) in &mono.factors[..fi] {
                left.insert(ctx, *x, *xe);
            }
            if *e > 1 {
                left.insert(ctx, *g, e - 1);
            }
            let mut right = MayMonomial::default();
            for (x, xe) in &mono.factors[fi + 1..] {
                right.insert(ctx, *x, *xe);
            }
            // e g^{e-1} d(g) for even g; d(g) for (exterior) odd g
            let mult = if g.is_odd() { 1 } else { *e % p };
            if mult == 0 {
                prefix_parity = (prefix_parity + g.is_odd() as u32 * e) % 2;
                continue;
            }
            for (g1, g2) in &dg {
                let pair = match MayMonomial::from_factors(ctx, [(*g1, 1)])
                    .unwrap()
                    .mul(ctx, &MayMonomial::from_factors(ctx, [(*g2, 1)]).unwrap())
                {
                    Some(pw) => pw,
                    None => continue, // exterior square inside the pair
                };
                let mut negate = pair.1;
                let Some((lp, flip1)) = left.mul(ctx, &pair.0) else {
                    continue;
                };
                negate ^= flip1;
                let Some((full, flip2)) = lp.mul(ctx, &right) else {
                    continue;
                };
                negate ^= flip2;
                // the formulas carry a global minus sign; the Leibniz sign
                // is (-1)^{parity of the prefix}
                negate = !negate;
                if prefix_parity == 1 {
                    negate = !negate;
                }
                let coeff = if negate { (p - mult) % p } else { mult };
                add_term(&mut out, p, full, coeff);
            }
        }
        prefix_parity = (prefix_parity + g.is_odd() as u32 * *e) % 2;
    }
    out
}

/// d1 extended linearly to formal sums.
pub fn d1_sum(ctx: &MayContext, sum: &MaySum) -> MaySum {
    let p = ctx.p;
    let mut out = MaySum::new();
    for (m, c) in sum {
        for (m2, c2) in d1(ctx, m) {
            add_term(&mut out, p, m2, (c * c2) % p);
        }
    }
    out
}

/// One cell of a vanishing scan.
#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub p: u32,
    pub s: u32,
    pub t: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    pub empty: bool,
    pub witnesses: Vec<String>,
}

/// Evaluate `e1_basis` at a list of `(n, t)` pairs (for scans over a
/// degree formula in `n`) and report emptiness with witnesses.
pub fn vanishing_scan(
    ctx: &MayContext,
    s: u32,
    targets: &[(Option<i64>, i64)],
    mode: ExecMode,
) -> Vec<ScanReport> {
    let ctx = *ctx;
    map_slice(mode, targets, |&(n, t)| {
        let piece = e1_basis(&ctx, s, t);
        ScanReport {
            p: ctx.p,
            s,
            t,
            n,
            empty: piece.basis.is_empty(),
            witnesses: piece.basis.iter().map(|m| m.to_string()).collect(),
        }
    })
}

/// One upper-bound violation: a chart entry exceeding its E1 bound.
#[derive(Debug, Clone, Serialize)]
pub struct BoundViolation {
    pub s: i32,
    pub t: i64,
    pub ext_dim: usize,
    pub e1_dim: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct UpperBoundReport {
    pub cells_checked: usize,
    pub violations: Vec<BoundViolation>,
}

impl UpperBoundReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check `dim Ext^{s,t} <= dim E1^{s,t}` for every cell of the chart's
/// certified window.
pub fn upper_bound_check(ctx: &MayContext, chart: &ExtChart, mode: ExecMode) -> UpperBoundReport {
    assert_eq!(ctx.p, chart.p);
    let cells: usize = (chart.max_s as usize + 1) * (chart.max_t as usize + 1);
    let ctx = *ctx;
    let violations: Vec<Option<BoundViolation>> = map_range(mode, cells, |idx| {
        let s = (idx / (chart.max_t as usize + 1)) as i32;
        let t = (idx % (chart.max_t as usize + 1)) as i64;
        let ext_dim = chart.dim(s, t);
        let e1_dim = e1_basis(&ctx, s as u32, t).basis.len();
        if ext_dim > e1_dim {
            Some(BoundViolation {
                s,
                t,
                ext_dim,
                e1_dim,
            })
        } else {
            None
        }
    });
    UpperBoundReport {
        cells_checked: cells,
        violations: violations.into_iter().flatten().collect(),
    }
}
