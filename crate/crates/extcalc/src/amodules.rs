//! Finite-dimensional graded modules over the Steenrod algebra.
//!
//! The modules that matter here are the cohomologies of the Smith-Toda
//! spectra: exterior algebras `E(Q_0, ..., Q_n)` built as cyclic quotients
//! of the Steenrod algebra itself. The action table of such a module is
//! computed, not transcribed: act by multiplying in the algebra and then
//! projecting to the span of pure exterior monomials. [`validate_module`]
//! certifies the result (unit, grading, associativity on all stored pairs).
//!
//! [`cofibration_ses`] packages the short exact sequences
//! `0 -> S^{2p^n-1} E(n-1) -> E(n) -> E(n-1) -> 0` induced by the defining
//! cofibrations, with exactness checked degreewise.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fplinalg::{rref, Fp, SparseMatrix};
use crate::milnor::{Algebra, AlgebraElement, MilnorElement};

#[derive(Debug, Error)]
pub enum ModuleError {
    #[error("Smith-Toda module V({0}) is not supported (n must lie in -1..=2)")]
    UnsupportedRange(i32),
    #[error("module map is not A-linear: {0}")]
    NotLinear(String),
    #[error("sequence is not exact: {0}")]
    NotExact(String),
}

/// A sparse vector over the module basis: sorted `(index, coefficient)`.
pub type ModuleVector = Vec<(usize, u32)>;

fn add_scaled_vec(fp: &Fp, a: &[(usize, u32)], b: &[(usize, u32)], scale: u32) -> ModuleVector {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            let v = fp.mul(scale, b[j].1);
            if v != 0 {
                out.push((b[j].0, v));
            }
            j += 1;
        } else {
            let v = fp.add(a[i].1, fp.mul(scale, b[j].1));
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct BasisElement {
    pub name: String,
    pub degree: i64,
}

/// A finite-dimensional graded module over the Steenrod algebra with an
/// explicit action table for every Milnor monomial of positive degree up to
/// the module's top degree.
#[derive(Debug, Clone)]
pub struct FDModule {
    name: String,
    p: u32,
    basis: Vec<BasisElement>,
    by_degree: BTreeMap<i64, Vec<usize>>,
    top_degree: i64,
    bottom_degree: i64,
    action: HashMap<MilnorElement, Vec<ModuleVector>>,
}

impl fmt::Display for FDModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (p={}, dim {})", self.name, self.p, self.basis.len())
    }
}

impl FDModule {
    /// Assemble a module from raw parts. The action map must contain an
    /// entry (possibly all-zero) for every Milnor monomial of degree
    /// `1..=top`; use [`validate_module`] to certify the result.
    pub fn from_parts(
        name: impl Into<String>,
        p: u32,
        basis: Vec<BasisElement>,
        action: HashMap<MilnorElement, Vec<ModuleVector>>,
    ) -> FDModule {
        let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, b) in basis.iter().enumerate() {
            by_degree.entry(b.degree).or_default().push(i);
        }
        let top_degree = basis.iter().map(|b| b.degree).max().unwrap_or(0);
        let bottom_degree = basis.iter().map(|b| b.degree).min().unwrap_or(0);
        FDModule {
            name: name.into(),
            p,
            basis,
            by_degree,
            top_degree,
            bottom_degree,
            action,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn top_degree(&self) -> i64 {
        self.top_degree
    }

    pub fn bottom_degree(&self) -> i64 {
        self.bottom_degree
    }

    pub fn dim_in_degree(&self, d: i64) -> usize {
        self.by_degree.get(&d).map_or(0, |v| v.len())
    }

    /// Global basis indices in degree `d`, in basis order.
    pub fn indices_in_degree(&self, d: i64) -> &[usize] {
        self.by_degree.get(&d).map_or(&[], |v| v.as_slice())
    }

    /// Position of global index `idx` within its degree.
    pub fn local_index(&self, idx: usize) -> usize {
        self.indices_in_degree(self.basis[idx].degree)
            .iter()
            .position(|&i| i == idx)
            .expect("basis index present in its own degree")
    }

    /// Action of a Milnor monomial on a basis element.
    pub fn act_basis(&self, m: &MilnorElement, idx: usize) -> ModuleVector {
        if m.is_unit() {
            return vec![(idx, 1)];
        }
        match self.action.get(m) {
            Some(rows) => rows.get(idx).cloned().unwrap_or_default(),
            None => Vec::new(), // above the stored window: zero by grading
        }
    }

    /// Action of a homogeneous algebra element on a module vector.
    pub fn act(&self, alg: &Algebra, a: &AlgebraElement, v: &[(usize, u32)]) -> ModuleVector {
        let fp = alg.fp();
        let mut out = Vec::new();
        for (m, c) in a.terms() {
            for &(idx, x) in v {
                let img = self.act_basis(m, idx);
                out = add_scaled_vec(fp, &out, &img, fp.mul(c, x));
            }
        }
        out
    }

    /// The module with all degrees shifted up by `shift`.
    pub fn suspension(&self, alg: &Algebra, shift: i64, name: impl Into<String>) -> FDModule {
        let basis = self
            .basis
            .iter()
            .map(|b| BasisElement {
                name: b.name.clone(),
                degree: b.degree + shift,
            })
            .collect::<Vec<_>>();
        let mut action = self.action.clone();
        // fill the widened monomial window with zero actions
        let top = basis.iter().map(|b| b.degree).max().unwrap_or(0);
        for t in 1..=top {
            for m in alg.basis_in_degree(t).iter() {
                action
                    .entry(m.clone())
                    .or_insert_with(|| vec![Vec::new(); basis.len()]);
            }
        }
        FDModule::from_parts(name, self.p, basis, action)
    }

    /// The full action table as a list sorted by monomial; used by the
    /// resolution store and the JSON export.
    pub fn action_entries(&self) -> Vec<(MilnorElement, Vec<ModuleVector>)> {
        let mut keys: Vec<&MilnorElement> = self.action.keys().collect();
        keys.sort();
        keys.into_iter()
            .map(|m| (m.clone(), self.action[m].clone()))
            .collect()
    }

    /// JSON view: basis, degrees, and all nonzero action entries, in a
    /// deterministic order.
    pub fn to_json(&self) -> serde_json::Value {
        let mut ops: Vec<serde_json::Value> = Vec::new();
        let mut keys: Vec<&MilnorElement> = self.action.keys().collect();
        keys.sort();
        for m in keys {
            let rows = &self.action[m];
            for (idx, row) in rows.iter().enumerate() {
                if row.is_empty() {
                    continue;
                }
                ops.push(serde_json::json!({
                    "op": m.to_string(),
                    "input": self.basis[idx].name,
                    "output": row
                        .iter()
                        .map(|&(i, c)| serde_json::json!([self.basis[i].name, c]))
                        .collect::<Vec<_>>(),
                }));
            }
        }
        serde_json::json!({
            "name": self.name,
            "p": self.p,
            "basis": self.basis.iter().map(|b| serde_json::json!({
                "name": b.name, "degree": b.degree
            })).collect::<Vec<_>>(),
            "action": ops,
        })
    }
}

/// The trivial module: one generator in degree zero, every positive-degree
/// operation acts as zero.
pub fn sphere_module(alg: &Algebra) -> FDModule {
    FDModule::from_parts(
        "S",
        alg.prime(),
        vec![BasisElement {
            name: "1".into(),
            degree: 0,
        }],
        HashMap::new(),
    )
}

fn subset_name(mask: u32) -> String {
    if mask == 0 {
        return "1".into();
    }
    let mut s = String::new();
    for i in 0..32 {
        if mask & (1 << i) != 0 {
            s.push_str(&format!("Q{i}"));
        }
    }
    s
}

fn subset_degree(alg: &Algebra, mask: u32) -> i64 {
    (0..32)
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| 2 * (alg.prime() as i64).pow(i) - 1)
        .sum()
}

fn subset_indices(mask: u32) -> Vec<u32> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// The exterior module `E(Q_0, ..., Q_n)` as a cyclic quotient of the
/// algebra: the action multiplies in the algebra and projects to the span
/// of pure exterior monomials on `Q_0..Q_n`. Supports `n` in `-1..=2`
/// (`n = -1` is the trivial module).
pub fn toda_smith_module(alg: &Algebra, n: i32) -> Result<FDModule, ModuleError> {
    if !(-1..=2).contains(&n) {
        return Err(ModuleError::UnsupportedRange(n));
    }
    if n == -1 {
        return Ok(sphere_module(alg));
    }
    let k = (n + 1) as u32; // number of exterior generators
    let mut masks: Vec<u32> = (0..(1u32 << k)).collect();
    masks.sort_by_key(|&m| (subset_degree(alg, m), m));
    let basis: Vec<BasisElement> = masks
        .iter()
        .map(|&m| BasisElement {
            name: subset_name(m),
            degree: subset_degree(alg, m),
        })
        .collect();
    let top = basis.last().map(|b| b.degree).unwrap_or(0);
    let index_of_mask: HashMap<u32, usize> =
        masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let full_mask = (1u32 << k) - 1;

    let mut action: HashMap<MilnorElement, Vec<ModuleVector>> = HashMap::new();
    for t in 1..=top {
        for m in alg.basis_in_degree(t).iter() {
            let mut rows = vec![Vec::new(); basis.len()];
            for (i, &mask) in masks.iter().enumerate() {
                if subset_degree(alg, mask) + t > top {
                    continue;
                }
                let x = MilnorElement::q(&subset_indices(mask));
                let mut row: ModuleVector = Vec::new();
                for (prod, c) in alg.multiply_basis(m, &x).iter() {
                    if !prod.is_pure_q() {
                        continue; // killed by the quotient
                    }
                    let mask2 = prod.q_part().iter().fold(0u32, |acc, &e| acc | (1u32 << e));
                    if mask2 & !full_mask != 0 {
                        continue; // exterior generator outside the range
                    }
                    let j = index_of_mask[&mask2];
                    row = add_scaled_vec(alg.fp(), &row, &[(j, 1)], *c);
                }
                rows[i] = row;
            }
            action.insert(m.clone(), rows);
        }
    }
    let name = match n {
        0 => "M".to_string(),
        1 => "K".to_string(),
        other => format!("V({other})"),
    };
    Ok(FDModule::from_parts(name, alg.prime(), basis, action))
}

/// Report from [`validate_module`]: empty failure list means pass.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Check the action table: completeness of the stored window, grading,
/// and associativity `(ab) x = a (b x)` for all stored monomial pairs with
/// `deg a + deg b <= top`.
pub fn validate_module(alg: &Algebra, module: &FDModule) -> ValidationReport {
    let mut failures = Vec::new();
    let top = module.top_degree() - module.bottom_degree();
    for t in 1..=top {
        for m in alg.basis_in_degree(t).iter() {
            if !module.action.contains_key(m) {
                failures.push(format!("action of {m} (degree {t}) not stored"));
            }
        }
    }
    for (m, rows) in &module.action {
        let t = alg.degree_of(m);
        if t <= 0 {
            failures.push(format!(
                "stored action for non-positive degree monomial {m}"
            ));
            continue;
        }
        for (idx, row) in rows.iter().enumerate() {
            let d = module.basis[idx].degree;
            for &(j, c) in row {
                if c == 0 || c >= alg.prime() {
                    failures.push(format!("{m} on {}: coefficient {c} out of range", idx));
                }
                if module.basis[j].degree != d + t {
                    failures.push(format!(
                        "grading violated: {m} . {} lands on {} of degree {} (expected {})",
                        module.basis[idx].name,
                        module.basis[j].name,
                        module.basis[j].degree,
                        d + t
                    ));
                }
            }
        }
    }
    // associativity on stored pairs
    for ta in 1..=top {
        for tb in 1..=(top - ta) {
            for a in alg.basis_in_degree(ta).iter() {
                for b in alg.basis_in_degree(tb).iter() {
                    let ab = alg.multiply_basis(a, b);
                    for idx in 0..module.dimension() {
                        if module.basis[idx].degree + ta + tb > module.top_degree() {
                            continue;
                        }
                        let bx = module.act_basis(b, idx);
                        let mut a_bx: ModuleVector = Vec::new();
                        for &(j, c) in &bx {
                            let img = module.act_basis(a, j);
                            a_bx = add_scaled_vec(alg.fp(), &a_bx, &img, c);
                        }
                        let mut ab_x: ModuleVector = Vec::new();
                        for (m, c) in ab.iter() {
                            let img = module.act_basis(m, idx);
                            ab_x = add_scaled_vec(alg.fp(), &ab_x, &img, *c);
                        }
                        if a_bx != ab_x {
                            failures.push(format!(
                                "associativity fails: ({a})({b}) . {} gives {ab_x:?} vs {a_bx:?}",
                                module.basis[idx].name
                            ));
                        }
                    }
                }
            }
        }
    }
    ValidationReport { failures }
}

/// A degree-homogeneous A-linear map between modules, stored as one matrix
/// per source degree (rows indexed by the target degree's basis).
#[derive(Debug, Clone)]
pub struct ModuleMap {
    pub source: Arc<FDModule>,
    pub target: Arc<FDModule>,
    pub degree_shift: i64,
    /// Image of each source basis element, as a global sparse vector.
    images: Vec<ModuleVector>,
}

impl ModuleMap {
    /// Build from images of the source basis (global sparse vectors in the
    /// target), checking grading and A-linearity on every stored monomial.
    pub fn new(
        alg: &Algebra,
        source: Arc<FDModule>,
        target: Arc<FDModule>,
        degree_shift: i64,
        images: &[ModuleVector],
    ) -> Result<ModuleMap, ModuleError> {
        assert_eq!(images.len(), source.dimension());
        for (idx, img) in images.iter().enumerate() {
            let d = source.basis()[idx].degree + degree_shift;
            for &(j, _) in img {
                if target.basis()[j].degree != d {
                    return Err(ModuleError::NotLinear(format!(
                        "image of {} is not homogeneous of degree {d}",
                        source.basis()[idx].name
                    )));
                }
            }
        }
        let map = ModuleMap {
            source,
            target,
            degree_shift,
            images: images.to_vec(),
        };
        map.check_linearity(alg)?;
        Ok(map)
    }

    fn check_linearity(&self, alg: &Algebra) -> Result<(), ModuleError> {
        let top = self.source.top_degree();
        for t in 1..=(top - self.source.bottom_degree()) {
            for m in alg.basis_in_degree(t).iter() {
                for idx in 0..self.source.dimension() {
                    if self.source.basis()[idx].degree + t > top {
                        continue;
                    }
                    // f(m . x) on the source side
                    let mx = self.source.act_basis(m, idx);
                    let mut f_mx: ModuleVector = Vec::new();
                    for &(j, c) in &mx {
                        f_mx = add_scaled_vec(alg.fp(), &f_mx, &self.images[j], c);
                    }
                    // m . f(x) on the target side
                    let mut m_fx: ModuleVector = Vec::new();
                    for &(j, c) in &self.images[idx] {
                        let img = self.target.act_basis(m, j);
                        m_fx = add_scaled_vec(alg.fp(), &m_fx, &img, c);
                    }
                    if f_mx != m_fx {
                        return Err(ModuleError::NotLinear(format!(
                            "f({m} . {}) != {m} . f({})",
                            self.source.basis()[idx].name,
                            self.source.basis()[idx].name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Matrix of the map on source degree `d`: rows = target basis of
    /// degree `d + shift`, columns = source basis of degree `d`.
    pub fn matrix_in_degree(&self, d: i64) -> SparseMatrix {
        let src = self.source.indices_in_degree(d);
        let rows = self.target.dim_in_degree(d + self.degree_shift);
        let mut m = SparseMatrix::zero(rows, src.len());
        let mut entries = Vec::new();
        for (col, &idx) in src.iter().enumerate() {
            for &(j, c) in &self.images[idx] {
                entries.push((self.target.local_index(j), col, c as i64));
            }
        }
        if !entries.is_empty() {
            m = SparseMatrix::from_entries(&Fp::new(self.source.prime()), rows, src.len(), entries);
        }
        m
    }

    /// Image of a source basis element as a global sparse vector.
    pub fn apply_basis(&self, idx: usize) -> ModuleVector {
        self.images[idx].clone()
    }

    /// Image of a homogeneous vector given as a global sparse vector.
    pub fn apply(&self, fp: &Fp, v: &[(usize, u32)]) -> ModuleVector {
        let mut out = Vec::new();
        for &(idx, c) in v {
            out = add_scaled_vec(fp, &out, &self.images[idx], c);
        }
        out
    }

    pub fn rank_in_degree(&self, fp: &Fp, d: i64) -> usize {
        rref(fp, &self.matrix_in_degree(d)).1
    }
}

/// A short exact sequence of modules: `0 -> A -> B -> C -> 0` with the
/// injection and surjection stored as [`ModuleMap`]s.
#[derive(Debug, Clone)]
pub struct ModuleSES {
    pub sub: ModuleMap,      // A -> B
    pub quotient: ModuleMap, // B -> C
}

impl ModuleSES {
    /// Degreewise exactness check: injectivity, surjectivity, additivity
    /// of dimensions and `quotient . sub = 0`.
    pub fn validate(&self, alg: &Algebra) -> Result<(), ModuleError> {
        let fp = alg.fp();
        let a = &self.sub.source;
        let b = &self.sub.target;
        let c = &self.quotient.target;
        let lo = b.bottom_degree();
        let hi = b.top_degree();
        for d in lo..=hi {
            let da = a.dim_in_degree(d);
            let db = b.dim_in_degree(d);
            let dc = c.dim_in_degree(d);
            if da + dc != db {
                return Err(ModuleError::NotExact(format!(
                    "dimension additivity fails in degree {d}: {da} + {dc} != {db}"
                )));
            }
            if self.sub.rank_in_degree(fp, d) != da {
                return Err(ModuleError::NotExact(format!(
                    "injection not injective in degree {d}"
                )));
            }
            if self.quotient.rank_in_degree(fp, d) != dc {
                return Err(ModuleError::NotExact(format!(
                    "surjection not surjective in degree {d}"
                )));
            }
        }
        // composite vanishes; with additivity and the rank conditions this
        // forces im(sub) = ker(quotient) degreewise
        for idx in 0..a.dimension() {
            let mid = self.sub.apply_basis(idx);
            let mut out: ModuleVector = Vec::new();
            for &(j, cc) in &mid {
                out = add_scaled_vec(fp, &out, &self.quotient.apply_basis(j), cc);
            }
            if !out.is_empty() {
                return Err(ModuleError::NotExact(format!(
                    "composite nonzero on {}",
                    a.basis()[idx].name
                )));
            }
        }
        Ok(())
    }
}

/// The short exact sequence of cohomologies induced by the defining
/// cofibration of `V(n)`:
/// `0 -> S^{2p^n-1} H V(n-1) -> H V(n) -> H V(n-1) -> 0`, for n in 0..=2.
pub fn cofibration_ses(alg: &Algebra, n: i32) -> Result<ModuleSES, ModuleError> {
    if !(0..=2).contains(&n) {
        return Err(ModuleError::UnsupportedRange(n));
    }
    let shift = 2 * (alg.prime() as i64).pow(n as u32) - 1;
    let lower = Arc::new(toda_smith_module(alg, n - 1)?);
    let middle = Arc::new(toda_smith_module(alg, n)?);
    let sub_module = Arc::new(lower.suspension(alg, shift, format!("S^{shift} {}", lower.name())));

    // injection: the suspended copy maps onto the span of subsets
    // containing Q_n; x_S -> x_{S + {n}} (no sign: n is the largest index)
    let sub_images: Vec<ModuleVector> = sub_module
        .basis()
        .iter()
        .map(|b| {
            let target_name = if b.name == "1" {
                format!("Q{n}")
            } else {
                format!("{}Q{n}", b.name)
            };
            let j = middle
                .basis()
                .iter()
                .position(|tb| tb.name == target_name)
                .expect("subset with Q_n present in the middle module");
            vec![(j, 1)]
        })
        .collect();
    let sub = ModuleMap::new(
        alg,
        Arc::clone(&sub_module),
        Arc::clone(&middle),
        0,
        &sub_images,
    )?;

    // quotient: kill every subset containing Q_n
    let quot_images: Vec<ModuleVector> = middle
        .basis()
        .iter()
        .map(|b| {
            if b.name.contains(&format!("Q{n}")) {
                Vec::new()
            } else {
                let j = lower
                    .basis()
                    .iter()
                    .position(|tb| tb.name == b.name)
                    .expect("subset without Q_n present in the lower module");
                vec![(j, 1)]
            }
        })
        .collect();
    let quotient = ModuleMap::new(
        alg,
        Arc::clone(&middle),
        Arc::clone(&lower),
        0,
        &quot_images,
    )?;

    let ses = ModuleSES { sub, quotient };
    ses.validate(alg)?;
    Ok(ses)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_is_trivial() {
        let alg = Algebra::new(5);
        let s = sphere_module(&alg);
        assert_eq!(s.dimension(), 1);
        assert_eq!(s.dim_in_degree(0), 1);
        assert_eq!(s.dim_in_degree(1), 0);
        assert!(s.act_basis(&MilnorElement::q(&[0]), 0).is_empty());
        assert!(validate_module(&alg, &s).passed());
    }

    #[test]
    fn moore_module_shape() {
        let alg = Algebra::new(5);
        let m = toda_smith_module(&alg, 0).unwrap();
        assert_eq!(m.dimension(), 2);
        let degrees: Vec<i64> = m.basis().iter().map(|b| b.degree).collect();
        assert_eq!(degrees, vec![0, 1]);
        // Q_0 e_0 = e_1, Q_0 e_1 = 0
        assert_eq!(m.act_basis(&MilnorElement::q(&[0]), 0), vec![(1, 1)]);
        assert!(m.act_basis(&MilnorElement::q(&[0]), 1).is_empty());
        assert!(validate_module(&alg, &m).passed());
    }

    #[test]
    fn v1_module_shape() {
        let alg = Algebra::new(5);
        let k = toda_smith_module(&alg, 1).unwrap();
        let degrees: Vec<i64> = k.basis().iter().map(|b| b.degree).collect();
        assert_eq!(degrees, vec![0, 1, 9, 10]); // 0, 1, q+1, q+2
                                                // Q_1 e_0 = e_{q+1}
        let q1e0 = k.act_basis(&MilnorElement::q(&[1]), 0);
        assert_eq!(q1e0, vec![(2, 1)]);
        assert_eq!(k.basis()[2].degree, 9);
        assert!(validate_module(&alg, &k).passed());
    }

    #[test]
    fn v2_module_validates() {
        let alg = Algebra::new(5);
        let v2 = toda_smith_module(&alg, 2).unwrap();
        assert_eq!(v2.dimension(), 8);
        assert!(validate_module(&alg, &v2).passed());
    }

    #[test]
    fn dimension_is_power_of_two_and_poincare_series() {
        let alg = Algebra::new(5);
        for n in 0..=2i32 {
            let m = toda_smith_module(&alg, n).unwrap();
            assert_eq!(m.dimension(), 1 << (n + 1));
            // Poincare series = prod_{i<=n} (1 + x^{2p^i - 1})
            let mut coeffs: BTreeMap<i64, usize> = BTreeMap::new();
            coeffs.insert(0, 1);
            for i in 0..=n {
                let d = 2 * 5i64.pow(i as u32) - 1;
                let mut next = coeffs.clone();
                for (&deg, &c) in &coeffs {
                    *next.entry(deg + d).or_insert(0) += c;
                }
                coeffs = next;
            }
            for (&deg, &c) in &coeffs {
                assert_eq!(m.dim_in_degree(deg), c, "V({n}) degree {deg}");
            }
        }
    }

    #[test]
    fn out_of_range_rejected() {
        let alg = Algebra::new(5);
        assert!(matches!(
            toda_smith_module(&alg, 3),
            Err(ModuleError::UnsupportedRange(3))
        ));
        assert!(matches!(
            cofibration_ses(&alg, 3),
            Err(ModuleError::UnsupportedRange(3))
        ));
    }

    #[test]
    fn corrupted_action_detected() {
        let alg = Algebra::new(5);
        let m = toda_smith_module(&alg, 1).unwrap();
        let mut action = m.action.clone();
        // corrupt Q_0 . e_0: point it at the wrong basis element
        let q0 = MilnorElement::q(&[0]);
        action.get_mut(&q0).unwrap()[0] = vec![(2, 1)];
        let bad = FDModule::from_parts("bad", 5, m.basis().to_vec(), action);
        let report = validate_module(&alg, &bad);
        assert!(!report.passed());
        assert!(report
            .failures
            .iter()
            .any(|f| f.contains("grading") || f.contains("associativity")));
    }

    #[test]
    fn cofibration_ses_all_n() {
        let alg = Algebra::new(5);
        for n in 0..=2i32 {
            let ses = cofibration_ses(&alg, n).unwrap();
            let shift = 2 * 5i64.pow(n as u32) - 1;
            assert_eq!(
                ses.sub.source.bottom_degree(),
                shift,
                "sub shifted by 2p^n - 1"
            );
            // additivity in every degree of the middle module
            let b = &ses.sub.target;
            for d in b.bottom_degree()..=b.top_degree() {
                assert_eq!(
                    ses.sub.source.dim_in_degree(d) + ses.quotient.target.dim_in_degree(d),
                    b.dim_in_degree(d)
                );
            }
        }
    }

    #[test]
    fn ses_shifts_match_cofibrations() {
        let alg = Algebra::new(5);
        // n = 1: shift q + 1 = 9; n = 2: shift (p+1)q + 1 = 49
        assert_eq!(
            cofibration_ses(&alg, 1).unwrap().sub.source.bottom_degree(),
            9
        );
        assert_eq!(
            cofibration_ses(&alg, 2).unwrap().sub.source.bottom_degree(),
            49
        );
    }

    #[test]
    fn module_json_roundtrip_shape() {
        let alg = Algebra::new(5);
        let m = toda_smith_module(&alg, 0).unwrap();
        let j = m.to_json();
        assert_eq!(j["p"], 5);
        assert_eq!(j["basis"].as_array().unwrap().len(), 2);
        assert!(!j["action"].as_array().unwrap().is_empty());
    }
}
