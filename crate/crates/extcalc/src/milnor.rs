//! The mod-p Steenrod algebra at an odd prime, in the Milnor basis.
//!
//! A basis element is a monomial `Q(E) P(R)` with `E` a finite strictly
//! increasing set of exterior indices and `R` a finite sequence of
//! polynomial exponents. The product is Milnor's: exterior factors of the
//! right operand are absorbed through the polynomial part one at a time
//! (`P(R) Q_k = sum_i Q_{k+i} P(R - p^k e_i)`, with the usual sign for
//! sorting the exterior part), and the polynomial parts multiply through a
//! sum over Milnor matrices weighted by multinomial coefficients mod p.
//!
//! Degrees: `|Q_e| = 2p^e - 1`, `|P(R)| = sum_j 2(p^j - 1) r_j`, and the
//! fundamental even degree is `q = 2(p - 1)`.
//!
//! Correctness of the product is pinned by associativity and
//! anticommutation property tests plus an independently coded Adem-relation
//! oracle for products of pure powers (see the test module).

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fplinalg::Fp;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("context mismatch: element over F_{0} used with algebra over F_{1}")]
    ContextMismatch(u32, u32),
}

/// One Milnor basis monomial `Q(E) P(R)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MilnorElement {
    /// Strictly increasing exterior indices.
    q_part: Vec<u32>,
    /// Polynomial exponents `r_1, r_2, ...` with no trailing zeros.
    p_part: Vec<u32>,
}

impl MilnorElement {
    pub fn new(q_part: Vec<u32>, mut p_part: Vec<u32>) -> MilnorElement {
        assert!(
            q_part.windows(2).all(|w| w[0] < w[1]),
            "q_part must be strictly increasing: {q_part:?}"
        );
        while p_part.last() == Some(&0) {
            p_part.pop();
        }
        MilnorElement { q_part, p_part }
    }

    pub fn unit() -> MilnorElement {
        MilnorElement {
            q_part: Vec::new(),
            p_part: Vec::new(),
        }
    }

    pub fn q(indices: &[u32]) -> MilnorElement {
        MilnorElement::new(indices.to_vec(), Vec::new())
    }

    pub fn p(exponents: &[u32]) -> MilnorElement {
        MilnorElement::new(Vec::new(), exponents.to_vec())
    }

    pub fn is_unit(&self) -> bool {
        self.q_part.is_empty() && self.p_part.is_empty()
    }

    pub fn q_part(&self) -> &[u32] {
        &self.q_part
    }

    pub fn p_part(&self) -> &[u32] {
        &self.p_part
    }

    /// True when the monomial is a product of Q's only.
    pub fn is_pure_q(&self) -> bool {
        self.p_part.is_empty()
    }

    fn q_bitset(&self) -> u64 {
        self.q_part.iter().fold(0u64, |acc, &e| acc | (1u64 << e))
    }
}

// Monomial order: exterior part as a bitset, then polynomial part
// lexicographically. Fixes every downstream matrix layout.
impl Ord for MilnorElement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.q_bitset()
            .cmp(&other.q_bitset())
            .then_with(|| self.p_part.cmp(&other.p_part))
    }
}

impl PartialOrd for MilnorElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MilnorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return write!(f, "1");
        }
        for &e in &self.q_part {
            write!(f, "Q{e}")?;
        }
        if !self.p_part.is_empty() {
            write!(
                f,
                "P({})",
                self.p_part
                    .iter()
                    .map(|r| r.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )?;
        }
        Ok(())
    }
}

/// A homogeneous element: a formal F_p-combination of Milnor monomials of
/// one degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    p: u32,
    degree: i64,
    terms: std::collections::BTreeMap<MilnorElement, u32>,
}

impl AlgebraElement {
    pub fn zero(p: u32, degree: i64) -> AlgebraElement {
        AlgebraElement {
            p,
            degree,
            terms: Default::default(),
        }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MilnorElement, u32)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, m: &MilnorElement) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    fn add_term(&mut self, fp: &Fp, m: MilnorElement, c: u32) {
        if c == 0 {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = fp.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *c != 1 || m.is_unit() {
                write!(f, "{c}*")?;
            }
            if !m.is_unit() {
                write!(f, "{m}")?;
            }
        }
        Ok(())
    }
}

/// A basis product, expanded as a sorted coefficient list.
pub type BasisProduct = Vec<(MilnorElement, u32)>;

/// The Steenrod algebra context for a fixed odd prime: degrees, graded
/// bases, the product, and their memo caches.
pub struct Algebra {
    p: u32,
    q: i64,
    fp: Fp,
    basis_cache: RwLock<HashMap<i64, Arc<Vec<MilnorElement>>>>,
    product_cache: RwLock<HashMap<(MilnorElement, MilnorElement), Arc<BasisProduct>>>,
    binomials: Vec<Vec<u32>>,
}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Algebra").field("p", &self.p).finish()
    }
}

impl Algebra {
    pub fn new(p: u32) -> Algebra {
        let fp = Fp::new(p); // validates odd prime
        Algebra {
            p,
            q: 2 * (p as i64 - 1),
            fp,
            basis_cache: Default::default(),
            product_cache: Default::default(),
            binomials: small_binomials(p),
        }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    /// The fundamental even degree `q = 2(p-1)`.
    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn fp(&self) -> &Fp {
        &self.fp
    }

    fn p_pow(&self, e: u32) -> i64 {
        (self.p as i64).pow(e)
    }

    pub fn degree_of(&self, m: &MilnorElement) -> i64 {
        let mut d = 0i64;
        for &e in &m.q_part {
            d += 2 * self.p_pow(e) - 1;
        }
        for (j, &r) in m.p_part.iter().enumerate() {
            d += 2 * (self.p_pow(j as u32 + 1) - 1) * r as i64;
        }
        d
    }

    /// All Milnor monomials of degree `t`, sorted in the monomial order.
    /// Memoized per degree; concurrent readers are fine.
    pub fn basis_in_degree(&self, t: i64) -> Arc<Vec<MilnorElement>> {
        if let Some(v) = self.basis_cache.read().unwrap().get(&t) {
            return Arc::clone(v);
        }
        let out = Arc::new(self.enumerate_basis(t));
        Arc::clone(self.basis_cache.write().unwrap().entry(t).or_insert(out))
    }

    pub fn dim_in_degree(&self, t: i64) -> usize {
        self.basis_in_degree(t).len()
    }

    fn enumerate_basis(&self, t: i64) -> Vec<MilnorElement> {
        let mut out = Vec::new();
        if t < 0 {
            return out;
        }
        let mut q_subsets: Vec<(Vec<u32>, i64)> = Vec::new();
        self.q_subsets_rec(0, t, &mut Vec::new(), &mut q_subsets);
        for (q_part, qdeg) in q_subsets {
            for p_part in self.p_parts_of_degree(t - qdeg) {
                out.push(MilnorElement::new(q_part.clone(), p_part));
            }
        }
        out.sort();
        out
    }

    fn q_subsets_rec(
        &self,
        from: u32,
        budget: i64,
        current: &mut Vec<u32>,
        out: &mut Vec<(Vec<u32>, i64)>,
    ) {
        out.push((
            current.clone(),
            current.iter().map(|&e| 2 * self.p_pow(e) - 1).sum(),
        ));
        let mut e = from;
        loop {
            let d = 2 * self.p_pow(e) - 1;
            if d > budget {
                break;
            }
            current.push(e);
            self.q_subsets_rec(e + 1, budget - d, current, out);
            current.pop();
            e += 1;
        }
    }

    /// All polynomial parts of exact degree `rem`.
    fn p_parts_of_degree(&self, rem: i64) -> Vec<Vec<u32>> {
        if rem < 0 {
            return Vec::new();
        }
        if rem == 0 {
            return vec![Vec::new()];
        }
        let mut part_degrees = Vec::new();
        let mut j = 1u32;
        loop {
            let d = 2 * (self.p_pow(j) - 1);
            if d > rem {
                break;
            }
            part_degrees.push(d);
            j += 1;
        }
        let mut out = Vec::new();
        if part_degrees.is_empty() {
            return out;
        }
        let mut current = vec![0u32; part_degrees.len()];
        p_parts_rec(
            &part_degrees,
            part_degrees.len(),
            rem,
            &mut current,
            &mut out,
        );
        out
    }

    /// Index of `m` in `basis_in_degree(degree_of(m))`.
    pub fn basis_index(&self, m: &MilnorElement) -> Option<usize> {
        let basis = self.basis_in_degree(self.degree_of(m));
        basis.binary_search(m).ok()
    }

    /// Product of two basis monomials as a sorted coefficient list.
    pub fn multiply_basis(&self, a: &MilnorElement, b: &MilnorElement) -> Arc<BasisProduct> {
        if let Some(v) = self
            .product_cache
            .read()
            .unwrap()
            .get(&(a.clone(), b.clone()))
        {
            return Arc::clone(v);
        }
        let out = Arc::new(self.multiply_basis_uncached(a, b));
        Arc::clone(
            self.product_cache
                .write()
                .unwrap()
                .entry((a.clone(), b.clone()))
                .or_insert(out),
        )
    }

    fn multiply_basis_uncached(&self, a: &MilnorElement, b: &MilnorElement) -> BasisProduct {
        let p = self.p;
        // Stage 1: absorb each exterior factor of b through the polynomial
        // part, left to right. The i = 0 term leaves R unchanged; the term
        // dies when Q_{k+i} is already present.
        let mut terms: Vec<(Vec<u32>, Vec<u32>, u32)> =
            vec![(a.q_part.clone(), a.p_part.clone(), 1)];
        for &k in &b.q_part {
            let pk = (p as u64).pow(k);
            let mut next = Vec::new();
            for (e, r, c) in &terms {
                for i in 0..=r.len() {
                    let idx = k + i as u32;
                    if e.binary_search(&idx).is_ok() {
                        continue;
                    }
                    let mut r2 = r.clone();
                    if i > 0 {
                        if (r[i - 1] as u64) < pk {
                            continue;
                        }
                        r2[i - 1] -= pk as u32;
                        while r2.last() == Some(&0) {
                            r2.pop();
                        }
                    }
                    let larger = e.iter().filter(|&&x| x > idx).count();
                    let coeff = if larger % 2 == 0 { *c } else { self.fp.neg(*c) };
                    let mut e2 = e.clone();
                    let pos = e2.binary_search(&idx).unwrap_err();
                    e2.insert(pos, idx);
                    next.push((e2, r2, coeff));
                }
            }
            terms = next;
        }
        // Stage 2: polynomial parts multiply through Milnor matrices.
        let mut acc: std::collections::BTreeMap<MilnorElement, u32> = Default::default();
        for (e, r, c) in terms {
            for (t_part, coeff) in self.p_product(&r, &b.p_part) {
                let total = self.fp.mul(c, coeff);
                if total == 0 {
                    continue;
                }
                let m = MilnorElement::new(e.clone(), t_part);
                let entry = acc.entry(m).or_insert(0);
                *entry = self.fp.add(*entry, total);
            }
        }
        acc.retain(|_, c| *c != 0);
        acc.into_iter().collect()
    }

    /// `P(R) * P(S)` as `(T, coefficient)` pairs: the sum over Milnor
    /// matrices with multinomial coefficients mod p.
    fn p_product(&self, r: &[u32], s: &[u32]) -> Vec<(Vec<u32>, u32)> {
        if r.is_empty() {
            return vec![(s.to_vec(), 1)];
        }
        if s.is_empty() {
            return vec![(r.to_vec(), 1)];
        }
        // x[i][j] for 0 <= i <= len(r), 0 <= j <= len(s); x[0][0] unused.
        // Row i >= 1 carries sum_j x[i][j] p^j = r[i-1]; column j >= 1
        // carries sum_i x[i][j] = s[j-1]. Free cells are i, j >= 1; the
        // leftovers land in row 0 and column 0.
        let mut out = Vec::new();
        let mut x = vec![vec![0u64; s.len() + 1]; r.len() + 1];
        let mut rem_r: Vec<u64> = r.iter().map(|&v| v as u64).collect();
        let mut rem_s: Vec<u64> = s.iter().map(|&v| v as u64).collect();
        self.p_product_rec(1, 1, &mut x, &mut rem_r, &mut rem_s, &mut out);
        out
    }

    #[allow(clippy::needless_range_loop)] // index arithmetic over matrix diagonals
    fn p_product_rec(
        &self,
        i: usize,
        j: usize,
        x: &mut [Vec<u64>],
        rem_r: &mut [u64],
        rem_s: &mut [u64],
        out: &mut Vec<(Vec<u32>, u32)>,
    ) {
        let p = self.p;
        let rows = rem_r.len();
        let cols = rem_s.len();
        if i > rows {
            for (idx, &v) in rem_r.iter().enumerate() {
                x[idx + 1][0] = v;
            }
            for (idx, &v) in rem_s.iter().enumerate() {
                x[0][idx + 1] = v;
            }
            let mut coeff = 1u32;
            let mut t_part = vec![0u32; rows + cols];
            for n in 1..=(rows + cols) {
                let mut diag = Vec::new();
                let mut total = 0u64;
                for ii in 0..=n {
                    let jj = n - ii;
                    if ii <= rows && jj <= cols {
                        diag.push(x[ii][jj]);
                        total += x[ii][jj];
                    }
                }
                t_part[n - 1] = total as u32;
                coeff = self
                    .fp
                    .mul(coeff, multinomial_mod_p(&diag, p, &self.binomials));
                if coeff == 0 {
                    return;
                }
            }
            while t_part.last() == Some(&0) {
                t_part.pop();
            }
            out.push((t_part, coeff));
            return;
        }
        let (ni, nj) = if j == cols { (i + 1, 1) } else { (i, j + 1) };
        let pj = (p as u64).pow(j as u32);
        let max = std::cmp::min(rem_r[i - 1] / pj, rem_s[j - 1]);
        for v in 0..=max {
            x[i][j] = v;
            rem_r[i - 1] -= v * pj;
            rem_s[j - 1] -= v;
            self.p_product_rec(ni, nj, x, rem_r, rem_s, out);
            rem_r[i - 1] += v * pj;
            rem_s[j - 1] += v;
        }
        x[i][j] = 0;
    }

    pub fn element_from_basis(&self, m: MilnorElement) -> AlgebraElement {
        let degree = self.degree_of(&m);
        let mut e = AlgebraElement::zero(self.p, degree);
        e.terms.insert(m, 1);
        e
    }

    pub fn element_from_terms(
        &self,
        degree: i64,
        terms: impl IntoIterator<Item = (MilnorElement, u32)>,
    ) -> AlgebraElement {
        let mut e = AlgebraElement::zero(self.p, degree);
        for (m, c) in terms {
            debug_assert_eq!(self.degree_of(&m), degree);
            e.add_term(&self.fp, m, c);
        }
        e
    }

    pub fn unit_element(&self) -> AlgebraElement {
        self.element_from_basis(MilnorElement::unit())
    }

    /// Product of homogeneous elements. Degree is additive; the contexts
    /// must match.
    pub fn multiply(
        &self,
        a: &AlgebraElement,
        b: &AlgebraElement,
    ) -> Result<AlgebraElement, AlgebraError> {
        if a.p != self.p {
            return Err(AlgebraError::ContextMismatch(a.p, self.p));
        }
        if b.p != self.p {
            return Err(AlgebraError::ContextMismatch(b.p, self.p));
        }
        let mut out = AlgebraElement::zero(self.p, a.degree + b.degree);
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let c = self.fp.mul(*ca, *cb);
                for (m, coeff) in self.multiply_basis(ma, mb).iter() {
                    out.add_term(&self.fp, m.clone(), self.fp.mul(c, *coeff));
                }
            }
        }
        Ok(out)
    }

    /// `acc += c * a` for homogeneous elements of equal degree.
    pub fn accumulate(&self, acc: &mut AlgebraElement, a: &AlgebraElement, c: u32) {
        debug_assert_eq!(acc.degree, a.degree);
        for (m, coeff) in &a.terms {
            acc.add_term(&self.fp, m.clone(), self.fp.mul(*coeff, c));
        }
    }
}

fn p_parts_rec(
    degs: &[i64],
    pos: usize,
    rem: i64,
    current: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if pos == 0 {
        if rem == 0 {
            let mut r = current.clone();
            while r.last() == Some(&0) {
                r.pop();
            }
            out.push(r);
        }
        return;
    }
    let idx = pos - 1;
    let d = degs[idx];
    for k in 0..=(rem / d) {
        current[idx] = k as u32;
        p_parts_rec(degs, idx, rem - k * d, current, out);
    }
    current[idx] = 0;
}

/// Multinomial coefficient `(sum x_i)! / prod x_i!` mod p via Lucas'
/// theorem on iterated binomials. `table` is Pascal's triangle below p.
pub fn multinomial_mod_p(parts: &[u64], p: u32, table: &[Vec<u32>]) -> u32 {
    let mut total = 0u64;
    let mut acc = 1u32;
    for &x in parts {
        total += x;
        acc = mul_mod(acc, binomial_lucas(total, x, p, table), p);
        if acc == 0 {
            return 0;
        }
    }
    acc
}

fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

/// Pascal's triangle for digits below p.
pub fn small_binomials(p: u32) -> Vec<Vec<u32>> {
    let n = p as usize;
    let mut c = vec![vec![0u32; n]; n];
    for i in 0..n {
        c[i][0] = 1;
        for j in 1..=i {
            c[i][j] = (c[i - 1][j - 1] + c[i - 1][j]) % p;
        }
    }
    c
}

fn binomial_lucas(n: u64, k: u64, p: u32, table: &[Vec<u32>]) -> u32 {
    if k > n {
        return 0;
    }
    let (mut n, mut k) = (n, k);
    let mut acc = 1u32;
    while n > 0 || k > 0 {
        let nd = (n % p as u64) as usize;
        let kd = (k % p as u64) as usize;
        if kd > nd {
            return 0;
        }
        acc = mul_mod(acc, table[nd][kd], p);
        n /= p as u64;
        k /= p as u64;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees() {
        let a5 = Algebra::new(5);
        assert_eq!(a5.degree_of(&MilnorElement::q(&[0])), 1);
        assert_eq!(a5.degree_of(&MilnorElement::p(&[1])), 8); // = q
        assert_eq!(a5.degree_of(&MilnorElement::q(&[1])), 9); // 2p - 1
        assert_eq!(a5.degree_of(&MilnorElement::unit()), 0);
        assert_eq!(a5.degree_of(&MilnorElement::p(&[0, 1])), 48);
        assert_eq!(a5.degree_of(&MilnorElement::new(vec![0], vec![1])), 9);
    }

    #[test]
    fn basis_degree_zero_is_unit() {
        let a5 = Algebra::new(5);
        let b = a5.basis_in_degree(0);
        assert_eq!(&*b, &[MilnorElement::unit()]);
    }

    #[test]
    fn basis_degree_two_empty() {
        let a5 = Algebra::new(5);
        assert!(a5.basis_in_degree(2).is_empty());
    }

    #[test]
    fn basis_degree_nine() {
        // degree 9 at p = 5: Q_1 and Q_0 P(1)
        let a5 = Algebra::new(5);
        let b = a5.basis_in_degree(9);
        assert_eq!(b.len(), 2);
        assert!(b.contains(&MilnorElement::q(&[1])));
        assert!(b.contains(&MilnorElement::new(vec![0], vec![1])));
    }

    #[test]
    fn basis_negative_degree_empty() {
        let a5 = Algebra::new(5);
        assert!(a5.basis_in_degree(-3).is_empty());
    }

    #[test]
    fn basis_complete_by_degree_count() {
        // spot check: every monomial of degree <= 30 at p = 3 appears exactly once
        let a3 = Algebra::new(3);
        for t in 0..=30 {
            let b = a3.basis_in_degree(t);
            let mut seen = b.to_vec();
            seen.dedup();
            assert_eq!(seen.len(), b.len(), "duplicates in degree {t}");
            for m in b.iter() {
                assert_eq!(a3.degree_of(m), t);
            }
        }
    }

    #[test]
    fn exterior_square_vanishes() {
        let a5 = Algebra::new(5);
        let q0 = a5.element_from_basis(MilnorElement::q(&[0]));
        let prod = a5.multiply(&q0, &q0).unwrap();
        assert!(prod.is_zero());
    }

    #[test]
    fn p1_squared() {
        // P(1) * P(1) = 2 P(2) at p = 5 (frozen from the Adem oracle run,
        // see tests/milnor_product.rs)
        let a5 = Algebra::new(5);
        let p1 = a5.element_from_basis(MilnorElement::p(&[1]));
        let prod = a5.multiply(&p1, &p1).unwrap();
        assert_eq!(prod.coefficient(&MilnorElement::p(&[2])), 2);
        assert_eq!(prod.terms().count(), 1);
    }

    #[test]
    fn unit_law() {
        let a5 = Algebra::new(5);
        let one = a5.unit_element();
        for t in [0, 1, 8, 9, 48] {
            for m in a5.basis_in_degree(t).iter() {
                let x = a5.element_from_basis(m.clone());
                assert_eq!(a5.multiply(&one, &x).unwrap(), x);
                assert_eq!(a5.multiply(&x, &one).unwrap(), x);
            }
        }
    }

    #[test]
    fn q_anticommute() {
        let a5 = Algebra::new(5);
        for i in 0..=3u32 {
            for j in 0..=3u32 {
                if i == j {
                    continue;
                }
                let qi = a5.element_from_basis(MilnorElement::q(&[i]));
                let qj = a5.element_from_basis(MilnorElement::q(&[j]));
                let ij = a5.multiply(&qi, &qj).unwrap();
                let ji = a5.multiply(&qj, &qi).unwrap();
                let mut neg = AlgebraElement::zero(5, ji.degree());
                a5.accumulate(&mut neg, &ji, a5.fp().neg(1));
                assert_eq!(ij, neg, "Q{i} Q{j} != -Q{j} Q{i}");
            }
        }
    }

    #[test]
    fn bockstein_commutator_is_q1() {
        // P(1) Q_0 - Q_0 P(1) = Q_1
        let a5 = Algebra::new(5);
        let p1 = a5.element_from_basis(MilnorElement::p(&[1]));
        let q0 = a5.element_from_basis(MilnorElement::q(&[0]));
        let lhs = a5.multiply(&p1, &q0).unwrap();
        let rhs = a5.multiply(&q0, &p1).unwrap();
        let mut diff = lhs.clone();
        a5.accumulate(&mut diff, &rhs, a5.fp().neg(1));
        assert_eq!(diff, a5.element_from_basis(MilnorElement::q(&[1])));
    }

    #[test]
    fn context_mismatch_rejected() {
        let a5 = Algebra::new(5);
        let a3 = Algebra::new(3);
        let x = a3.unit_element();
        let y = a5.unit_element();
        assert!(matches!(
            a5.multiply(&x, &y),
            Err(AlgebraError::ContextMismatch(3, 5))
        ));
    }

    #[test]
    fn degree_additive_on_products() {
        let a3 = Algebra::new(3);
        for ta in 0..=12 {
            for tb in 0..=12 {
                for ma in a3.basis_in_degree(ta).iter() {
                    for mb in a3.basis_in_degree(tb).iter() {
                        for (m, _) in a3.multiply_basis(ma, mb).iter() {
                            assert_eq!(a3.degree_of(m), ta + tb);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn multinomial_examples() {
        let t5 = small_binomials(5);
        assert_eq!(multinomial_mod_p(&[1, 1], 5, &t5), 2);
        assert_eq!(multinomial_mod_p(&[2, 3], 5, &t5), 0); // C(5,2) = 10
        assert_eq!(multinomial_mod_p(&[4, 4], 5, &t5), 0); // C(8,4) = 70
        assert_eq!(multinomial_mod_p(&[1, 1, 1], 5, &t5), 1); // 6 mod 5
        assert_eq!(multinomial_mod_p(&[], 5, &t5), 1);
    }
}
