//! Degree-truncated minimal free resolutions over the Steenrod algebra.
//!
//! The resolution is computed filtration by filtration. With `F_s` known
//! through internal degree `max_t`, the kernel of the differential is
//! computed at every degree (these are independent, so they can run in
//! parallel), and then a serial ascending sweep adjoins new `F_{s+1}`
//! generators wherever the kernel is not yet covered by the image of the
//! generators found so far: lowest degree first, kernel vectors in
//! row-echelon order. Over a connected graded algebra this produces a
//! minimal resolution: no differential coefficient has a degree-zero
//! component, so Ext dimensions are exactly generator counts.
//!
//! Truncation semantics: `Ext^{s,t}` is certified for `s <= max_s` and
//! `t <= max_t`, with kernels computed through degree `max_t` at every
//! filtration. The chart records this window explicitly.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use thiserror::Error;

use crate::amodules::{FDModule, ModuleMap, ModuleSES, ModuleVector};
use crate::chart::{sphere_labels, ChartEntry, ExtChart};
use crate::exec::{map_range, ExecMode};
use crate::fplinalg::{kernel_basis, solve, SparseMatrix, Subspace};
use crate::milnor::{Algebra, AlgebraElement, MilnorElement};

#[derive(Debug, Error)]
pub enum ResolutionError {
    #[error("bidegree (s={0}, t={1}) outside the computed window (s<={2}, t<={3})")]
    OutOfWindow(i32, i64, i32, i64),
    #[error("inconsistent lift at filtration {0}, degree {1}")]
    InconsistentLift(i32, i64),
}

/// A generator of a free module in the resolution, identified by its
/// filtration, position, and internal degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Generator {
    pub degree: i64,
}

/// An element of the free module `F_s`: a sum of generators with
/// homogeneous algebra coefficients. Terms are kept sorted by generator.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FreeElement {
    pub terms: Vec<(usize, AlgebraElement)>,
}

impl FreeElement {
    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(_, a)| a.is_zero())
    }
}

/// A degree-truncated minimal free resolution of a finite module.
pub struct FreeResolution {
    alg: Arc<Algebra>,
    module: Arc<FDModule>,
    max_s: i32,
    max_t: i64,
    /// Generators per filtration, ordered by (degree, adjoin order).
    gens: Vec<Vec<Generator>>,
    /// Augmentation: image of each `F_0` generator in the module.
    aug: Vec<ModuleVector>,
    /// Differentials: `diffs[s][i]` is the boundary of generator `i` of
    /// `F_s` as an element of `F_{s-1}`, for `s >= 1`.
    diffs: Vec<Vec<FreeElement>>,
    matrix_cache: RwLock<HashMap<(i32, i64), Arc<SparseMatrix>>>,
}

impl fmt::Debug for FreeResolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FreeResolution")
            .field("module", &self.module.name())
            .field("max_s", &self.max_s)
            .field("max_t", &self.max_t)
            .finish()
    }
}

/// Compute a minimal resolution of `module` through `(max_s, max_t)` with
/// the default execution mode.
pub fn minimal_resolve(
    alg: Arc<Algebra>,
    module: Arc<FDModule>,
    max_s: i32,
    max_t: i64,
) -> FreeResolution {
    minimal_resolve_with(alg, module, max_s, max_t, ExecMode::default())
}

pub fn minimal_resolve_with(
    alg: Arc<Algebra>,
    module: Arc<FDModule>,
    max_s: i32,
    max_t: i64,
    mode: ExecMode,
) -> FreeResolution {
    let mut r = FreeResolution::new(alg, module);
    r.extend_to(max_s, max_t, mode);
    r
}

impl FreeResolution {
    /// An empty resolution (window `s <= 0`-exclusive, `t < 0`); extend it
    /// with [`FreeResolution::extend_to`].
    pub fn new(alg: Arc<Algebra>, module: Arc<FDModule>) -> FreeResolution {
        assert_eq!(alg.prime(), module.prime());
        FreeResolution {
            alg,
            module,
            max_s: -1,
            max_t: -1,
            gens: Vec::new(),
            aug: Vec::new(),
            diffs: Vec::new(),
            matrix_cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }

    pub fn module(&self) -> &Arc<FDModule> {
        &self.module
    }

    pub fn max_s(&self) -> i32 {
        self.max_s
    }

    pub fn max_t(&self) -> i64 {
        self.max_t
    }

    pub fn generators(&self, s: i32) -> &[Generator] {
        &self.gens[s as usize]
    }

    /// Boundary of generator `i` of `F_s` (s >= 1).
    pub fn differential(&self, s: i32, i: usize) -> &FreeElement {
        &self.diffs[s as usize][i]
    }

    pub fn augmentation(&self, i: usize) -> &ModuleVector {
        &self.aug[i]
    }

    /// Number of filtration-`s` generators of internal degree `t`, which is the
    /// dimension of `Ext^{s,t}` by minimality.
    pub fn num_gens(&self, s: i32, t: i64) -> usize {
        if s < 0 || s > self.max_s {
            return 0;
        }
        self.gens[s as usize]
            .iter()
            .filter(|g| g.degree == t)
            .count()
    }

    /// Indices of filtration-`s` generators of internal degree `t`.
    pub fn gen_indices(&self, s: i32, t: i64) -> Vec<usize> {
        self.gens[s as usize]
            .iter()
            .enumerate()
            .filter(|(_, g)| g.degree == t)
            .map(|(i, _)| i)
            .collect()
    }

    /// Basis of `(F_s)_t` as (generator index, monomial) pairs, ordered by
    /// generator then monomial order. This ordering fixes all matrices.
    pub fn free_basis(&self, s: i32, t: i64) -> Vec<(usize, MilnorElement)> {
        let mut out = Vec::new();
        for (i, g) in self.gens[s as usize].iter().enumerate() {
            if g.degree > t {
                continue;
            }
            for m in self.alg.basis_in_degree(t - g.degree).iter() {
                out.push((i, m.clone()));
            }
        }
        out
    }

    fn free_basis_index(&self, s: i32, t: i64, gen: usize, m: &MilnorElement) -> usize {
        let mut offset = 0;
        for (i, g) in self.gens[s as usize].iter().enumerate() {
            if g.degree > t {
                continue;
            }
            let basis = self.alg.basis_in_degree(t - g.degree);
            if i == gen {
                return offset + basis.binary_search(m).expect("monomial in basis");
            }
            offset += basis.len();
        }
        panic!("generator {gen} not found in F_{s} degree {t}");
    }

    fn free_dim(&self, s: i32, t: i64) -> usize {
        self.gens[s as usize]
            .iter()
            .filter(|g| g.degree <= t)
            .map(|g| self.alg.dim_in_degree(t - g.degree))
            .sum()
    }

    /// Dense coordinates of a homogeneous free element in `(F_s)_t`.
    pub fn element_coords(&self, s: i32, t: i64, e: &FreeElement) -> Vec<u32> {
        let mut v = vec![0; self.free_dim(s, t)];
        for (gen, a) in &e.terms {
            for (m, c) in a.terms() {
                let idx = self.free_basis_index(s, t, *gen, m);
                v[idx] = self.alg.fp().add(v[idx], c);
            }
        }
        v
    }

    /// Free element from dense coordinates over `free_basis(s, t)`.
    pub fn coords_to_element(&self, s: i32, t: i64, coords: &[u32]) -> FreeElement {
        let basis = self.free_basis(s, t);
        assert_eq!(coords.len(), basis.len());
        let mut by_gen: HashMap<usize, Vec<(MilnorElement, u32)>> = HashMap::new();
        for (idx, &c) in coords.iter().enumerate() {
            if c != 0 {
                let (gen, m) = &basis[idx];
                by_gen.entry(*gen).or_default().push((m.clone(), c));
            }
        }
        let mut terms: Vec<(usize, AlgebraElement)> = by_gen
            .into_iter()
            .map(|(gen, ms)| {
                let deg = t - self.gens[s as usize][gen].degree;
                (gen, self.alg.element_from_terms(deg, ms))
            })
            .collect();
        terms.sort_by_key(|(g, _)| *g);
        FreeElement { terms }
    }

    /// Apply the differential to a free element of `F_s` (s >= 1).
    pub fn boundary(&self, s: i32, e: &FreeElement) -> FreeElement {
        let mut acc: HashMap<usize, AlgebraElement> = HashMap::new();
        for (gen, a) in &e.terms {
            for (tgt, b) in &self.diffs[s as usize][*gen].terms {
                let prod = self.alg.multiply(a, b).expect("same context");
                acc.entry(*tgt)
                    .and_modify(|x| self.alg.accumulate(x, &prod, 1))
                    .or_insert(prod);
            }
        }
        let mut terms: Vec<(usize, AlgebraElement)> =
            acc.into_iter().filter(|(_, a)| !a.is_zero()).collect();
        terms.sort_by_key(|(g, _)| *g);
        FreeElement { terms }
    }

    /// Apply the augmentation to a free element of `F_0`.
    pub fn augment(&self, e: &FreeElement) -> ModuleVector {
        let fp = self.alg.fp();
        let mut out: ModuleVector = Vec::new();
        for (gen, a) in &e.terms {
            let img = self.module.act(&self.alg, a, &self.aug[*gen]);
            // img entries already scaled by a's coefficients
            let mut merged = Vec::with_capacity(out.len() + img.len());
            let (mut i, mut j) = (0, 0);
            while i < out.len() || j < img.len() {
                if j == img.len() || (i < out.len() && out[i].0 < img[j].0) {
                    merged.push(out[i]);
                    i += 1;
                } else if i == out.len() || img[j].0 < out[i].0 {
                    merged.push(img[j]);
                    j += 1;
                } else {
                    let c = fp.add(out[i].1, img[j].1);
                    if c != 0 {
                        merged.push((out[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
            out = merged;
        }
        out
    }

    /// Matrix of the differential `(F_s)_t -> (F_{s-1})_t` for `s >= 1`, or
    /// of the augmentation `(F_0)_t -> M_t` for `s = 0`. Cached.
    pub fn diff_matrix(&self, s: i32, t: i64) -> Arc<SparseMatrix> {
        if let Some(m) = self.matrix_cache.read().unwrap().get(&(s, t)) {
            return Arc::clone(m);
        }
        let m = Arc::new(self.build_diff_matrix(s, t));
        Arc::clone(
            self.matrix_cache
                .write()
                .unwrap()
                .entry((s, t))
                .or_insert(m),
        )
    }

    fn build_diff_matrix(&self, s: i32, t: i64) -> SparseMatrix {
        let basis = self.free_basis(s, t);
        if s == 0 {
            let rows = self.module.dim_in_degree(t);
            let tgt = self.module.indices_in_degree(t);
            let mut entries = Vec::new();
            for (col, (gen, m)) in basis.iter().enumerate() {
                let a = self.alg.element_from_basis(m.clone());
                let img = self.module.act(&self.alg, &a, &self.aug[*gen]);
                for (global, c) in img {
                    let row = tgt.iter().position(|&x| x == global).unwrap();
                    entries.push((row, col, c as i64));
                }
            }
            SparseMatrix::from_entries(self.alg.fp(), rows, basis.len(), entries)
        } else {
            let rows = self.free_dim(s - 1, t);
            let mut entries = Vec::new();
            for (col, (gen, m)) in basis.iter().enumerate() {
                let a = self.alg.element_from_basis(m.clone());
                let img = self.boundary(
                    s,
                    &FreeElement {
                        terms: vec![(*gen, a)],
                    },
                );
                for (tgt_gen, coeff) in &img.terms {
                    for (mono, c) in coeff.terms() {
                        let row = self.free_basis_index(s - 1, t, *tgt_gen, mono);
                        entries.push((row, col, c as i64));
                    }
                }
            }
            SparseMatrix::from_entries(self.alg.fp(), rows, basis.len(), entries)
        }
    }

    /// Extend the computed window to `(max_s, max_t)`. The result is
    /// independent of the extension schedule and of the execution mode.
    pub fn extend_to(&mut self, max_s: i32, max_t: i64, mode: ExecMode) {
        assert!(max_s >= 0 && max_t >= 0);
        if self.gens.is_empty() {
            self.gens.push(Vec::new());
            self.diffs.push(Vec::new()); // diffs[0] unused
        }
        if max_t > self.max_t {
            let lo = self.max_t + 1;
            self.extend_f0(lo, max_t);
            for s in 0..self.max_s {
                self.extend_filtration(s, lo, max_t, mode);
            }
            self.max_t = max_t;
        }
        while self.max_s < max_s {
            let s = self.max_s;
            // building F_{s+1}: ensure the slot exists
            if s + 1 >= self.gens.len() as i32 {
                self.gens.push(Vec::new());
                self.diffs.push(Vec::new());
            }
            if s >= 0 {
                self.extend_filtration(s, 0, self.max_t, mode);
            }
            self.max_s += 1;
        }
    }

    /// Adjoin `F_0` generators covering the module's minimal generators in
    /// degrees `lo..=hi`.
    fn extend_f0(&mut self, lo: i64, hi: i64) {
        for t in lo.max(self.module.bottom_degree())..=hi.min(self.module.top_degree()) {
            let dim = self.module.dim_in_degree(t);
            if dim == 0 {
                continue;
            }
            // span of (A_+ . M)_t in local coordinates
            let mut span = Subspace::empty(dim);
            let locals = self.module.indices_in_degree(t);
            for d in self.module.bottom_degree()..t {
                for &src in self.module.indices_in_degree(d) {
                    for m in self.alg.basis_in_degree(t - d).iter() {
                        let img = self.module.act_basis(m, src);
                        if img.is_empty() {
                            continue;
                        }
                        let mut v = vec![0; dim];
                        for (global, c) in img {
                            let li = locals.iter().position(|&x| x == global).unwrap();
                            v[li] = c;
                        }
                        span.insert(self.alg.fp(), &v);
                    }
                }
            }
            for (li, &global) in locals.iter().enumerate() {
                let mut v = vec![0; dim];
                v[li] = 1;
                if span.insert(self.alg.fp(), &v) {
                    self.gens[0].push(Generator { degree: t });
                    self.aug.push(vec![(global, 1)]);
                }
            }
        }
    }

    /// Given `F_s` complete through `hi`, adjoin `F_{s+1}` generators in
    /// degrees `lo..=hi`: kernels at each degree (parallel), then a serial
    /// ascending sweep covering what the image misses.
    fn extend_filtration(&mut self, s: i32, lo: i64, hi: i64, mode: ExecMode) {
        let n = (hi - lo + 1) as usize;
        let kernels: Vec<Subspace> = map_range(mode, n, |i| {
            let t = lo + i as i64;
            kernel_basis(self.alg.fp(), &self.diff_matrix(s, t))
        });
        for (i, ker) in kernels.into_iter().enumerate() {
            let t = lo + i as i64;
            if ker.dim() == 0 {
                continue;
            }
            let dim = self.free_dim(s, t);
            let mut span = Subspace::empty(dim);
            // image of monomial multiples of the F_{s+1} generators found
            // in lower degrees
            let existing: Vec<(usize, i64)> = self.gens[s as usize + 1]
                .iter()
                .enumerate()
                .filter(|(_, g)| g.degree < t)
                .map(|(j, g)| (j, g.degree))
                .collect();
            for (j, d) in existing {
                for m in self.alg.basis_in_degree(t - d).iter() {
                    let a = self.alg.element_from_basis(m.clone());
                    let mut img = FreeElement::default();
                    for (tgt, b) in &self.diffs[s as usize + 1][j].terms {
                        let prod = self.alg.multiply(&a, b).expect("same context");
                        if !prod.is_zero() {
                            img.terms.push((*tgt, prod));
                        }
                    }
                    img.terms.sort_by_key(|(g, _)| *g);
                    let coords = self.element_coords(s, t, &img);
                    span.insert(self.alg.fp(), &coords);
                }
            }
            for v in ker.basis_rows() {
                if span.insert(self.alg.fp(), &v) {
                    let elt = self.coords_to_element(s, t, &v);
                    self.gens[s as usize + 1].push(Generator { degree: t });
                    self.diffs[s as usize + 1].push(elt);
                }
            }
        }
    }

    /// Read the Ext chart off the generator counts.
    pub fn ext_chart(&self) -> ExtChart {
        let is_sphere = self.module.dimension() == 1 && self.module.bottom_degree() == 0;
        let mut entries = std::collections::BTreeMap::new();
        for s in 0..=self.max_s {
            for g in &self.gens[s as usize] {
                let e = entries.entry((s, g.degree)).or_insert_with(|| ChartEntry {
                    dim: 0,
                    labels: Vec::new(),
                });
                e.dim += 1;
            }
        }
        for ((s, t), e) in entries.iter_mut() {
            if is_sphere {
                e.labels = sphere_labels(self.alg.prime(), *s, *t);
            }
        }
        ExtChart {
            p: self.alg.prime(),
            module: self.module.name().to_string(),
            max_s: self.max_s,
            max_t: self.max_t,
            entries,
        }
    }

    /// `d . d = 0` at every stored bidegree; used by tests and by the
    /// store loader.
    pub fn check_differential_squares_to_zero(&self) -> Result<(), String> {
        for s in 1..=self.max_s {
            for (i, e) in self.diffs[s as usize].iter().enumerate() {
                if s == 1 {
                    let img = self.augment(e);
                    if !img.is_empty() {
                        return Err(format!("aug . d nonzero on generator {i} of F_1"));
                    }
                } else {
                    let img = self.boundary(s - 1, e);
                    if !img.is_zero() {
                        return Err(format!("d . d nonzero on generator {i} of F_{s}"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Minimality: no differential coefficient has a degree-zero component.
    pub fn check_minimal(&self) -> Result<(), String> {
        for s in 1..=self.max_s {
            for (i, e) in self.diffs[s as usize].iter().enumerate() {
                for (_, a) in &e.terms {
                    if a.degree() == 0 && !a.is_zero() {
                        return Err(format!(
                            "unit coefficient in differential of generator {i} of F_{s}"
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A functional on the filtration-`s` generators of internal degree `t`.
/// Over a minimal resolution every such functional is automatically a
/// cocycle and represents an Ext class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cocycle {
    pub s: i32,
    pub t: i64,
    /// One coefficient per generator at `(s, t)`, in generator order.
    pub coeffs: Vec<u32>,
}

impl Cocycle {
    /// The dual of the `idx`-th generator at `(s, t)`.
    pub fn generator(r: &FreeResolution, s: i32, t: i64, idx: usize) -> Cocycle {
        let n = r.num_gens(s, t);
        assert!(idx < n, "generator index {idx} out of range at ({s},{t})");
        let mut coeffs = vec![0; n];
        coeffs[idx] = 1;
        Cocycle { s, t, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Value on a free element of `F_s` of internal degree `t`: picks out
    /// the unit-monomial coefficients of the degree-`t` generators.
    pub fn evaluate(&self, r: &FreeResolution, e: &FreeElement) -> u32 {
        let fp = r.alg.fp();
        let gen_ids = r.gen_indices(self.s, self.t);
        let mut acc = 0;
        for (gen, a) in &e.terms {
            if let Some(local) = gen_ids.iter().position(|g| g == gen) {
                if a.degree() == 0 {
                    let unit = a.coefficient(&MilnorElement::unit());
                    acc = fp.add(acc, fp.mul(unit, self.coeffs[local]));
                }
            }
        }
        acc
    }
}

/// A chain map between resolutions: `maps[k]` sends the generators of
/// `F_{s_shift + k}` of the source to elements of `F_k` of the target,
/// lowering internal degree by `t_shift` and commuting with the
/// differentials everywhere it is defined.
#[derive(Debug, Clone)]
pub struct ChainMap {
    pub s_shift: i32,
    pub t_shift: i64,
    maps: Vec<Vec<FreeElement>>,
}

impl ChainMap {
    pub fn filtrations(&self) -> usize {
        self.maps.len()
    }

    pub fn image_of_generator(&self, k: i32, i: usize) -> &FreeElement {
        &self.maps[k as usize][i]
    }

    /// Apply at level `k` to a free element of the source `F_{s_shift+k}`.
    pub fn apply(&self, target: &FreeResolution, k: i32, e: &FreeElement) -> FreeElement {
        apply_maps(target, &self.maps, k, e)
    }

    /// Matrix of the induced map on Ext at `(s, t)` of the target: sends
    /// functionals on target generators at `(s, t)` to functionals on
    /// source generators at `(s + s_shift, t + t_shift)`. Rows are source
    /// generators, columns target generators.
    pub fn ext_matrix(
        &self,
        source: &FreeResolution,
        target: &FreeResolution,
        s: i32,
        t: i64,
    ) -> SparseMatrix {
        assert!(
            (s as usize) < self.maps.len()
                && s <= target.max_s
                && t <= target.max_t
                && s + self.s_shift <= source.max_s
                && t + self.t_shift <= source.max_t,
            "induced map requested outside the lifted window"
        );
        let src_gens = source.gen_indices(s + self.s_shift, t + self.t_shift);
        let tgt_gens = target.gen_indices(s, t);
        let mut entries = Vec::new();
        for (row, &i) in src_gens.iter().enumerate() {
            let img = &self.maps[s as usize][i];
            for (col, &j) in tgt_gens.iter().enumerate() {
                if let Some((_, a)) = img.terms.iter().find(|(g, _)| *g == j) {
                    if a.degree() == 0 {
                        let c = a.coefficient(&MilnorElement::unit());
                        if c != 0 {
                            entries.push((row, col, c as i64));
                        }
                    }
                }
            }
        }
        SparseMatrix::from_entries(source.alg.fp(), src_gens.len(), tgt_gens.len(), entries)
    }
}

/// Lift a cocycle over a resolution of the trivial module to a chain map
/// `F_{s+k} -> F_k` through level `up_to_s`, solving the commuting squares
/// filtration by filtration.
pub fn lift_cocycle(
    r: &FreeResolution,
    c: &Cocycle,
    up_to_s: i32,
) -> Result<ChainMap, ResolutionError> {
    assert!(
        r.module.dimension() == 1 && r.module.bottom_degree() == 0,
        "cocycle lifts are over the trivial module"
    );
    if c.s + up_to_s > r.max_s {
        return Err(ResolutionError::OutOfWindow(
            c.s + up_to_s,
            c.t,
            r.max_s,
            r.max_t,
        ));
    }
    let alg = &r.alg;
    let mut maps: Vec<Vec<FreeElement>> = Vec::new();
    // level 0: generator duals scale the bottom generator
    let gen_ids = r.gen_indices(c.s, c.t);
    let level0: Vec<FreeElement> = (0..r.gens[c.s as usize].len())
        .map(|i| match gen_ids.iter().position(|&g| g == i) {
            Some(local) if c.coeffs[local] != 0 => {
                let mut scaled = AlgebraElement::zero(alg.prime(), 0);
                alg.accumulate(&mut scaled, &alg.unit_element(), c.coeffs[local]);
                FreeElement {
                    terms: vec![(0, scaled)],
                }
            }
            _ => FreeElement::default(),
        })
        .collect();
    maps.push(level0);
    for k in 1..=up_to_s {
        let src_s = c.s + k;
        let mut level = Vec::with_capacity(r.gens[src_s as usize].len());
        for (i, g) in r.gens[src_s as usize].iter().enumerate() {
            let tgt_t = g.degree - c.t;
            if tgt_t < 0 {
                level.push(FreeElement::default());
                continue;
            }
            let rhs = apply_maps(r, &maps, k - 1, &r.diffs[src_s as usize][i]);
            let rhs_coords = r.element_coords(k - 1, tgt_t, &rhs);
            let mat = r.diff_matrix(k, tgt_t);
            match solve(alg.fp(), &mat, &rhs_coords) {
                Some(x) => level.push(r.coords_to_element(k, tgt_t, &x)),
                None => return Err(ResolutionError::InconsistentLift(k, tgt_t)),
            }
        }
        maps.push(level);
    }
    Ok(ChainMap {
        s_shift: c.s,
        t_shift: c.t,
        maps,
    })
}

fn apply_maps(
    target: &FreeResolution,
    maps: &[Vec<FreeElement>],
    k: i32,
    e: &FreeElement,
) -> FreeElement {
    let alg = &target.alg;
    let mut acc: HashMap<usize, AlgebraElement> = HashMap::new();
    for (gen, a) in &e.terms {
        for (tgt, b) in &maps[k as usize][*gen].terms {
            let prod = alg.multiply(a, b).expect("same context");
            acc.entry(*tgt)
                .and_modify(|x| alg.accumulate(x, &prod, 1))
                .or_insert(prod);
        }
    }
    let mut terms: Vec<(usize, AlgebraElement)> =
        acc.into_iter().filter(|(_, a)| !a.is_zero()).collect();
    terms.sort_by_key(|(g, _)| *g);
    FreeElement { terms }
}

/// The Yoneda (composition) product of two Ext classes over the same
/// resolution of the trivial module: lift `b` to a chain map and evaluate
/// `a` on the image.
pub fn yoneda_product(
    r: &FreeResolution,
    a: &Cocycle,
    b: &Cocycle,
) -> Result<Cocycle, ResolutionError> {
    let (s, t) = (a.s + b.s, a.t + b.t);
    if s > r.max_s || t > r.max_t {
        return Err(ResolutionError::OutOfWindow(s, t, r.max_s, r.max_t));
    }
    let lift = lift_cocycle(r, b, a.s)?;
    let coeffs = r
        .gen_indices(s, t)
        .iter()
        .map(|&i| a.evaluate(r, lift.image_of_generator(a.s, i)))
        .collect();
    Ok(Cocycle { s, t, coeffs })
}

/// Lift a module map `f : X -> Y` to a chain map between minimal
/// resolutions of `X` and `Y`, inducing `Ext(Y, k) -> Ext(X, k)`.
pub fn lift_module_map(
    f: &ModuleMap,
    rs: &FreeResolution,
    rt: &FreeResolution,
) -> Result<ChainMap, ResolutionError> {
    let alg = &rs.alg;
    let fp = alg.fp();
    let shift = f.degree_shift;
    let up_to_s = rs.max_s.min(rt.max_s);
    let mut maps: Vec<Vec<FreeElement>> = Vec::new();
    // level 0: cover f through the augmentations
    let mut level0 = Vec::new();
    for (i, g) in rs.gens[0].iter().enumerate() {
        let d = g.degree + shift;
        let img = f.apply(fp, &rs.aug[i]);
        let locals = rt.module.indices_in_degree(d);
        let mut rhs = vec![0; locals.len()];
        for (global, c) in img {
            let li = locals.iter().position(|&x| x == global).unwrap();
            rhs[li] = c;
        }
        let mat = rt.diff_matrix(0, d);
        match solve(fp, &mat, &rhs) {
            Some(x) => level0.push(rt.coords_to_element(0, d, &x)),
            None => return Err(ResolutionError::InconsistentLift(0, d)),
        }
    }
    maps.push(level0);
    for k in 1..=up_to_s {
        let mut level = Vec::new();
        for (i, g) in rs.gens[k as usize].iter().enumerate() {
            let d = g.degree + shift;
            let rhs = apply_maps(rt, &maps, k - 1, &rs.diffs[k as usize][i]);
            let rhs_coords = rt.element_coords(k - 1, d, &rhs);
            let mat = rt.diff_matrix(k, d);
            match solve(fp, &mat, &rhs_coords) {
                Some(x) => level.push(rt.coords_to_element(k, d, &x)),
                None => return Err(ResolutionError::InconsistentLift(k, d)),
            }
        }
        maps.push(level);
    }
    Ok(ChainMap {
        s_shift: 0,
        t_shift: -shift,
        maps,
    })
}

/// The connecting homomorphism of a short exact sequence of modules,
/// realized by the horseshoe perturbation: a degree-preserving map
/// `h_{s+1} : F_{s+1}(quotient) -> F_s(sub)` whose unit coefficients give
/// the matrices of `Ext^{s,t}(sub, k) -> Ext^{s+1,t}(quotient, k)`.
pub struct ConnectingMap {
    /// `h[s]` is defined on the generators of `F_s` of the quotient
    /// resolution, for `s >= 1`, with values in `F_{s-1}` of the sub.
    h: Vec<Vec<FreeElement>>,
    pub max_s: i32,
    pub max_t: i64,
}

impl ConnectingMap {
    /// Matrix of the connecting map `Ext^{s,t}(sub) -> Ext^{s+1,t}(quot)`:
    /// rows are quotient generators at `(s+1, t)`, columns sub generators
    /// at `(s, t)`.
    pub fn ext_matrix(
        &self,
        r_sub: &FreeResolution,
        r_quot: &FreeResolution,
        s: i32,
        t: i64,
    ) -> SparseMatrix {
        assert!(
            s < self.max_s && t <= self.max_t,
            "connecting map requested outside the computed window (s+1 <= {}, t <= {})",
            self.max_s,
            self.max_t
        );
        let rows_g = r_quot.gen_indices(s + 1, t);
        let cols_g = r_sub.gen_indices(s, t);
        let mut entries = Vec::new();
        for (row, &i) in rows_g.iter().enumerate() {
            let img = &self.h[s as usize + 1][i];
            for (col, &j) in cols_g.iter().enumerate() {
                if let Some((_, a)) = img.terms.iter().find(|(g, _)| *g == j) {
                    if a.degree() == 0 {
                        let c = a.coefficient(&MilnorElement::unit());
                        if c != 0 {
                            entries.push((row, col, c as i64));
                        }
                    }
                }
            }
        }
        SparseMatrix::from_entries(r_sub.alg.fp(), rows_g.len(), cols_g.len(), entries)
    }
}

/// Build the connecting data for `ses` from resolutions of its sub and
/// quotient modules. The window is the largest one both resolutions
/// support; an empty window yields empty maps.
pub fn connecting_homomorphism(
    ses: &ModuleSES,
    r_sub: &FreeResolution,
    r_quot: &FreeResolution,
) -> Result<ConnectingMap, ResolutionError> {
    let alg = &r_sub.alg;
    let fp = alg.fp();
    let b_module = &ses.sub.target;
    let max_s = r_quot.max_s.min(r_sub.max_s + 1);
    let max_t = r_sub.max_t.min(r_quot.max_t);

    // sigma: F_0(quotient) -> B, a degreewise lift of the augmentation
    // through the surjection
    let mut sigma: Vec<ModuleVector> = Vec::new();
    for (i, g) in r_quot.gens[0].iter().enumerate() {
        let d = g.degree;
        let locals_c = ses.quotient.target.indices_in_degree(d);
        let mut rhs = vec![0; locals_c.len()];
        for &(global, c) in &r_quot.aug[i] {
            let li = locals_c.iter().position(|&x| x == global).unwrap();
            rhs[li] = c;
        }
        let mat = ses.quotient.matrix_in_degree(d);
        let x = solve(fp, &mat, &rhs).ok_or(ResolutionError::InconsistentLift(0, d))?;
        let locals_b = b_module.indices_in_degree(d);
        let v: ModuleVector = x
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c != 0)
            .map(|(li, &c)| (locals_b[li], c))
            .collect();
        sigma.push(v);
    }

    let mut h: Vec<Vec<FreeElement>> = vec![Vec::new()]; // h[0] unused
                                                         // h_1: solve iota(eps_A(h_1 x)) = -sigma(d x)
    if max_s >= 1 {
        let mut h1 = Vec::new();
        for (i, g) in r_quot.gens[1].iter().enumerate() {
            let d = g.degree;
            if d > max_t {
                h1.push(FreeElement::default());
                continue;
            }
            // sigma(d x) in B, extended A-linearly
            let mut w: ModuleVector = Vec::new();
            for (gen, a) in &r_quot.diffs[1][i].terms {
                let img = b_module.act(alg, a, &sigma[*gen]);
                w = merge_vec(fp, &w, &img, 1);
            }
            // pull back through the injection: iota(u) = -w
            let locals_b = b_module.indices_in_degree(d);
            let mut rhs = vec![0; locals_b.len()];
            for &(global, c) in &w {
                let li = locals_b.iter().position(|&x| x == global).unwrap();
                rhs[li] = fp.neg(c);
            }
            let mat = ses.sub.matrix_in_degree(d);
            let u = solve(fp, &mat, &rhs).ok_or(ResolutionError::InconsistentLift(1, d))?;
            // lift through the augmentation of the sub resolution
            let locals_a = ses.sub.source.indices_in_degree(d);
            let mut aug_rhs = vec![0; locals_a.len()];
            for (li, &c) in u.iter().enumerate() {
                aug_rhs[li] = c;
            }
            let aug_mat = r_sub.diff_matrix(0, d);
            let x = solve(fp, &aug_mat, &aug_rhs).ok_or(ResolutionError::InconsistentLift(1, d))?;
            h1.push(r_sub.coords_to_element(0, d, &x));
        }
        h.push(h1);
    }
    // h_{s+1}: solve d_s h_{s+1} = -h_s d_{s+1}
    for s in 1..max_s {
        let mut hs1 = Vec::new();
        for (i, g) in r_quot.gens[s as usize + 1].iter().enumerate() {
            let d = g.degree;
            if d > max_t {
                hs1.push(FreeElement::default());
                continue;
            }
            let mut rhs_elt: HashMap<usize, AlgebraElement> = HashMap::new();
            for (gen, a) in &r_quot.diffs[s as usize + 1][i].terms {
                for (tgt, b) in &h[s as usize][*gen].terms {
                    let prod = alg.multiply(a, b).expect("same context");
                    rhs_elt
                        .entry(*tgt)
                        .and_modify(|x| alg.accumulate(x, &prod, 1))
                        .or_insert(prod);
                }
            }
            let mut terms: Vec<(usize, AlgebraElement)> =
                rhs_elt.into_iter().filter(|(_, a)| !a.is_zero()).collect();
            terms.sort_by_key(|(g, _)| *g);
            let rhs = FreeElement { terms };
            let mut rhs_coords = r_sub.element_coords(s - 1, d, &rhs);
            for c in rhs_coords.iter_mut() {
                *c = fp.neg(*c);
            }
            let mat = r_sub.diff_matrix(s, d);
            let x =
                solve(fp, &mat, &rhs_coords).ok_or(ResolutionError::InconsistentLift(s + 1, d))?;
            hs1.push(r_sub.coords_to_element(s, d, &x));
        }
        h.push(hs1);
    }
    Ok(ConnectingMap { h, max_s, max_t })
}

fn merge_vec(
    fp: &crate::fplinalg::Fp,
    a: &[(usize, u32)],
    b: &[(usize, u32)],
    scale: u32,
) -> ModuleVector {
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

// ---------------------------------------------------------------------------
// Persistence
//
// A resolution store is a single JSON document with a format tag and
// version. Serialization order is fixed (struct fields, then vectors in
// generator order), so saving the same resolution twice produces identical
// bytes. Loading validates the invariants (d . d = 0, minimality) before
// handing the resolution back.

use serde::{Deserialize, Serialize};

pub const STORE_FORMAT: &str = "extcalc.resolution";
pub const STORE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a resolution store: {0}")]
    Format(String),
    #[error("unsupported store version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("store corrupt: {0}")]
    Corrupt(String),
}

#[derive(Serialize, Deserialize)]
struct ModuleData {
    name: String,
    basis: Vec<crate::amodules::BasisElement>,
    action: Vec<(MilnorElement, Vec<ModuleVector>)>,
}

/// Stored form of one differential: (target generator, terms) pairs.
type StoredElement = Vec<(usize, Vec<(MilnorElement, u32)>)>;

#[derive(Serialize, Deserialize)]
struct ResolutionFile {
    format: String,
    version: u32,
    p: u32,
    max_s: i32,
    max_t: i64,
    module: ModuleData,
    gen_degrees: Vec<Vec<i64>>,
    aug: Vec<ModuleVector>,
    diffs: Vec<Vec<StoredElement>>,
}

impl FreeResolution {
    pub fn to_store_bytes(&self) -> Vec<u8> {
        let file = ResolutionFile {
            format: STORE_FORMAT.to_string(),
            version: STORE_VERSION,
            p: self.alg.prime(),
            max_s: self.max_s,
            max_t: self.max_t,
            module: ModuleData {
                name: self.module.name().to_string(),
                basis: self.module.basis().to_vec(),
                action: self.module.action_entries(),
            },
            gen_degrees: self
                .gens
                .iter()
                .map(|v| v.iter().map(|g| g.degree).collect())
                .collect(),
            aug: self.aug.clone(),
            diffs: self
                .diffs
                .iter()
                .map(|level| {
                    level
                        .iter()
                        .map(|e| {
                            e.terms
                                .iter()
                                .map(|(g, a)| {
                                    (*g, a.terms().map(|(m, c)| (m.clone(), c)).collect())
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        };
        serde_json::to_vec(&file).expect("resolution serialization cannot fail")
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), StoreError> {
        Ok(std::fs::write(path, self.to_store_bytes())?)
    }

    pub fn from_store_bytes(bytes: &[u8]) -> Result<FreeResolution, StoreError> {
        let value: serde_json::Value =
            serde_json::from_slice(bytes).map_err(|e| StoreError::Corrupt(format!("json: {e}")))?;
        match value.get("format").and_then(|f| f.as_str()) {
            Some(STORE_FORMAT) => {}
            other => {
                return Err(StoreError::Format(format!(
                    "format tag {other:?}, expected {STORE_FORMAT:?}"
                )))
            }
        }
        let version = value.get("version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
        if version != STORE_VERSION {
            return Err(StoreError::Version {
                found: version,
                expected: STORE_VERSION,
            });
        }
        let file: ResolutionFile =
            serde_json::from_value(value).map_err(|e| StoreError::Corrupt(format!("json: {e}")))?;
        if file.p < 3 || file.p.is_multiple_of(2) {
            return Err(StoreError::Corrupt(format!(
                "p = {} is not an odd prime",
                file.p
            )));
        }
        let alg = Arc::new(Algebra::new(file.p));
        let module = Arc::new(FDModule::from_parts(
            file.module.name,
            file.p,
            file.module.basis,
            file.module.action.into_iter().collect(),
        ));
        let mut gens = Vec::new();
        for level in &file.gen_degrees {
            gens.push(level.iter().map(|&degree| Generator { degree }).collect());
        }
        let mut diffs: Vec<Vec<FreeElement>> = Vec::new();
        for (s, level) in file.diffs.iter().enumerate() {
            let mut out_level = Vec::new();
            for (i, e) in level.iter().enumerate() {
                if s == 0 {
                    out_level.push(FreeElement::default());
                    continue;
                }
                let own_degree = file
                    .gen_degrees
                    .get(s)
                    .and_then(|v| v.get(i))
                    .copied()
                    .ok_or_else(|| {
                        StoreError::Corrupt("generator table shorter than differentials".into())
                    })?;
                let mut terms = Vec::new();
                for (g, ms) in e {
                    let tgt_degree = file
                        .gen_degrees
                        .get(s - 1)
                        .and_then(|v| v.get(*g))
                        .copied()
                        .ok_or_else(|| {
                            StoreError::Corrupt(format!("dangling generator reference {g}"))
                        })?;
                    let a = alg.element_from_terms(own_degree - tgt_degree, ms.clone());
                    terms.push((*g, a));
                }
                terms.sort_by_key(|(g, _)| *g);
                out_level.push(FreeElement { terms });
            }
            diffs.push(out_level);
        }
        let r = FreeResolution {
            alg,
            module,
            max_s: file.max_s,
            max_t: file.max_t,
            gens,
            aug: file.aug,
            diffs,
            matrix_cache: RwLock::new(HashMap::new()),
        };
        if r.gens.len() != (r.max_s + 1).max(0) as usize {
            return Err(StoreError::Corrupt(format!(
                "generator table has {} filtrations for max_s = {}",
                r.gens.len(),
                r.max_s
            )));
        }
        r.check_differential_squares_to_zero()
            .map_err(StoreError::Corrupt)?;
        r.check_minimal().map_err(StoreError::Corrupt)?;
        Ok(r)
    }

    pub fn load(path: &std::path::Path) -> Result<FreeResolution, StoreError> {
        FreeResolution::from_store_bytes(&std::fs::read(path)?)
    }
}
