//! Exact sparse linear algebra over the prime field F_p, p an odd prime.
//!
//! Everything downstream (resolution differentials, chain map lifts, module
//! validation) reduces to [`rref`], [`kernel_basis`] and [`solve`] over F_p.
//! All arithmetic is exact; there are no tolerances. The pivot rule is fixed
//! (leftmost nonzero column, topmost unused row) so every computed basis is
//! deterministic.
//!
//! Matrices below [`DENSE_COLUMN_THRESHOLD`] columns are row-reduced on a
//! dense working buffer; wider matrices use sparse row operations. Both
//! paths implement the same pivot rule and return identical output.

use std::fmt;

/// Column count below which row reduction runs on a dense buffer.
pub const DENSE_COLUMN_THRESHOLD: usize = 64;

/// The field F_p for an odd prime p, with a cached inverse table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fp {
    p: u32,
    inverses: Vec<u32>,
}

impl Fp {
    /// Panics unless `p` is an odd prime (p >= 3).
    pub fn new(p: u32) -> Fp {
        assert!(p >= 3 && p % 2 == 1, "p must be an odd prime, got {p}");
        assert!(is_prime(p), "p must be an odd prime, got {p}");
        let mut inverses = vec![0; p as usize];
        for a in 1..p {
            inverses[a as usize] = pow_mod(a, p - 2, p);
        }
        Fp { p, inverses }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn reduce(&self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0 && a < self.p, "no inverse for {a} mod {}", self.p);
        self.inverses[a as usize]
    }
}

fn pow_mod(base: u32, mut exp: u32, p: u32) -> u32 {
    let mut acc: u64 = 1;
    let mut b = base as u64 % p as u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p as u64;
        }
        b = b * b % p as u64;
        exp >>= 1;
    }
    acc as u32
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A sparse matrix over F_p in row-major order.
///
/// Each row holds `(column, coefficient)` pairs sorted by column, with no
/// zero coefficients and no duplicate columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, u32)>>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> SparseMatrix {
        SparseMatrix {
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> SparseMatrix {
        SparseMatrix {
            rows: n,
            cols: n,
            data: (0..n).map(|i| vec![(i, 1)]).collect(),
        }
    }

    /// Build from `(row, col, value)` triples. Values are reduced mod p,
    /// duplicates are summed, and zero coefficients are dropped.
    pub fn from_entries(
        fp: &Fp,
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> SparseMatrix {
        let mut m = SparseMatrix::zero(rows, cols);
        for (r, c, v) in entries {
            assert!(r < rows && c < cols, "entry ({r},{c}) out of bounds");
            let v = fp.reduce(v);
            match m.data[r].binary_search_by_key(&c, |e| e.0) {
                Ok(i) => {
                    let s = fp.add(m.data[r][i].1, v);
                    if s == 0 {
                        m.data[r].remove(i);
                    } else {
                        m.data[r][i].1 = s;
                    }
                }
                Err(i) => {
                    if v != 0 {
                        m.data[r].insert(i, (c, v));
                    }
                }
            }
        }
        m
    }

    /// Build from dense rows (values must already lie in `[0, p)`).
    pub fn from_dense_rows(rows: usize, cols: usize, dense: &[Vec<u32>]) -> SparseMatrix {
        assert_eq!(dense.len(), rows);
        let data = dense
            .iter()
            .map(|row| {
                assert_eq!(row.len(), cols);
                row.iter()
                    .enumerate()
                    .filter(|&(_, &v)| v != 0)
                    .map(|(c, &v)| (c, v))
                    .collect()
            })
            .collect();
        SparseMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[(usize, u32)] {
        &self.data[r]
    }

    pub fn entry(&self, r: usize, c: usize) -> u32 {
        match self.data[r].binary_search_by_key(&c, |e| e.0) {
            Ok(i) => self.data[r][i].1,
            Err(_) => 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_empty())
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, v)))
    }

    pub fn dense_row(&self, r: usize) -> Vec<u32> {
        let mut out = vec![0; self.cols];
        for &(c, v) in &self.data[r] {
            out[c] = v;
        }
        out
    }

    /// Matrix-vector product `m * v` with `v` dense of length `cols`.
    pub fn mul_vec(&self, fp: &Fp, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        self.data
            .iter()
            .map(|row| {
                let mut acc = 0u32;
                for &(c, coeff) in row {
                    acc = fp.add(acc, fp.mul(coeff, v[c]));
                }
                acc
            })
            .collect()
    }
}

impl fmt::Display for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row = self.dense_row(r);
            writeln!(
                f,
                "[{}]",
                row.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            )?;
        }
        Ok(())
    }
}

/// Reduced row echelon form and rank.
///
/// Pivot rule: leftmost nonzero column, topmost unused row. Pivots are
/// normalized to 1 and eliminated above and below, zero rows are dropped to
/// the bottom. The row space is preserved and the result is canonical:
/// `rref(rref(m)) == rref(m)`.
pub fn rref(fp: &Fp, m: &SparseMatrix) -> (SparseMatrix, usize) {
    if m.cols < DENSE_COLUMN_THRESHOLD {
        rref_dense(fp, m)
    } else {
        rref_sparse(fp, m)
    }
}

/// Dense-buffer row reduction; used for narrow matrices.
pub fn rref_dense(fp: &Fp, m: &SparseMatrix) -> (SparseMatrix, usize) {
    let mut rows: Vec<Vec<u32>> = (0..m.rows).map(|r| m.dense_row(r)).collect();
    let mut rank = 0;
    for col in 0..m.cols {
        let Some(pr) = (rank..m.rows).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pr);
        let inv = fp.inv(rows[rank][col]);
        if inv != 1 {
            for v in rows[rank].iter_mut() {
                *v = fp.mul(*v, inv);
            }
        }
        for r in 0..m.rows {
            if r != rank && rows[r][col] != 0 {
                let factor = rows[r][col];
                let (pivot_row, other) = if r < rank {
                    let (a, b) = rows.split_at_mut(rank);
                    (&b[0], &mut a[r])
                } else {
                    let (a, b) = rows.split_at_mut(r);
                    (&a[rank], &mut b[0])
                };
                for (cell, &pv) in other[col..].iter_mut().zip(&pivot_row[col..]) {
                    *cell = fp.sub(*cell, fp.mul(factor, pv));
                }
            }
        }
        rank += 1;
        if rank == m.rows {
            break;
        }
    }
    (SparseMatrix::from_dense_rows(m.rows, m.cols, &rows), rank)
}

/// Sparse row reduction; same pivot rule and output as [`rref_dense`].
pub fn rref_sparse(fp: &Fp, m: &SparseMatrix) -> (SparseMatrix, usize) {
    let mut rows: Vec<Vec<(usize, u32)>> = m.data.clone();
    let mut rank = 0;
    loop {
        // leftmost column with a nonzero entry in an unused row, then topmost row
        let mut best: Option<(usize, usize)> = None;
        for (r, row) in rows.iter().enumerate().skip(rank) {
            if let Some(&(c, _)) = row.first() {
                match best {
                    Some((bc, _)) if bc <= c => {}
                    _ => best = Some((c, r)),
                }
            }
        }
        let Some((col, pr)) = best else { break };
        rows.swap(rank, pr);
        let inv = fp.inv(rows[rank][0].1);
        if inv != 1 {
            for e in rows[rank].iter_mut() {
                e.1 = fp.mul(e.1, inv);
            }
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank {
                continue;
            }
            let coeff = match row.binary_search_by_key(&col, |e| e.0) {
                Ok(i) => row[i].1,
                Err(_) => continue,
            };
            *row = add_scaled(fp, row, &pivot_row, fp.neg(coeff));
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    (
        SparseMatrix {
            rows: m.rows,
            cols: m.cols,
            data: rows,
        },
        rank,
    )
}

/// `a + scale * b` on sparse rows.
fn add_scaled(fp: &Fp, a: &[(usize, u32)], b: &[(usize, u32)], scale: u32) -> Vec<(usize, u32)> {
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

/// A subspace of F_p^n, stored as a reduced-row-echelon basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    /// RREF rows: nonzero, strictly increasing pivots, pivot columns
    /// eliminated elsewhere, pivots normalized to 1.
    basis: Vec<Vec<(usize, u32)>>,
}

impl Subspace {
    pub fn empty(ambient: usize) -> Subspace {
        Subspace {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn from_matrix(fp: &Fp, m: &SparseMatrix) -> Subspace {
        let (r, rank) = rref(fp, m);
        Subspace {
            ambient: m.cols,
            basis: r.data.into_iter().take(rank).collect(),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_matrix(&self) -> SparseMatrix {
        SparseMatrix {
            rows: self.basis.len(),
            cols: self.ambient,
            data: self.basis.clone(),
        }
    }

    pub fn basis_rows(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        self.basis.iter().map(|row| {
            let mut v = vec![0; self.ambient];
            for &(c, x) in row {
                v[c] = x;
            }
            v
        })
    }

    /// Reduce `v` against the basis, returning the residue.
    pub fn reduce(&self, fp: &Fp, v: &[u32]) -> Vec<(usize, u32)> {
        assert_eq!(v.len(), self.ambient);
        let mut acc: Vec<(usize, u32)> = v
            .iter()
            .enumerate()
            .filter(|&(_, &x)| x != 0)
            .map(|(c, &x)| (c, x))
            .collect();
        for row in &self.basis {
            let pivot = row[0].0;
            let coeff = match acc.binary_search_by_key(&pivot, |e| e.0) {
                Ok(i) => acc[i].1,
                Err(_) => continue,
            };
            acc = add_scaled(fp, &acc, row, fp.neg(coeff));
        }
        acc
    }

    pub fn contains(&self, fp: &Fp, v: &[u32]) -> bool {
        self.reduce(fp, v).is_empty()
    }

    /// Insert a vector, keeping the basis in RREF. Returns `true` if the
    /// dimension grew (the vector was independent of the span).
    pub fn insert(&mut self, fp: &Fp, v: &[u32]) -> bool {
        let mut residue = self.reduce(fp, v);
        if residue.is_empty() {
            return false;
        }
        let inv = fp.inv(residue[0].1);
        if inv != 1 {
            for e in residue.iter_mut() {
                e.1 = fp.mul(e.1, inv);
            }
        }
        let pivot = residue[0].0;
        // eliminate the new pivot from existing rows
        for row in self.basis.iter_mut() {
            let coeff = match row.binary_search_by_key(&pivot, |e| e.0) {
                Ok(i) => row[i].1,
                Err(_) => continue,
            };
            *row = add_scaled(fp, row, &residue, fp.neg(coeff));
        }
        let pos = self
            .basis
            .binary_search_by_key(&pivot, |row| row[0].0)
            .unwrap_err();
        self.basis.insert(pos, residue);
        true
    }
}

/// Basis of the right kernel `{v : m v = 0}` as a [`Subspace`] of F_p^cols.
///
/// dim kernel = cols - rank(m) always holds.
pub fn kernel_basis(fp: &Fp, m: &SparseMatrix) -> Subspace {
    let (r, rank) = rref(fp, m);
    let mut pivot_cols = Vec::with_capacity(rank);
    for i in 0..rank {
        pivot_cols.push(r.data[i][0].0);
    }
    let mut is_pivot = vec![false; m.cols];
    for &c in &pivot_cols {
        is_pivot[c] = true;
    }
    let mut basis: Vec<Vec<(usize, u32)>> = Vec::new();
    for (free, &pivot) in is_pivot.iter().enumerate() {
        if pivot {
            continue;
        }
        // v[free] = 1, v[pivot_cols[i]] = -r[i][free], other entries 0
        let mut v: Vec<(usize, u32)> = vec![(free, 1)];
        for (i, &pc) in pivot_cols.iter().enumerate() {
            let coeff = r.entry(i, free);
            if coeff != 0 {
                v.push((pc, fp.neg(coeff)));
            }
        }
        v.sort_unstable_by_key(|e| e.0);
        basis.push(v);
    }
    // normalize to RREF for a canonical representation
    let raw = SparseMatrix {
        rows: basis.len(),
        cols: m.cols,
        data: basis,
    };
    Subspace::from_matrix(fp, &raw)
}

/// Solve `m x = b`, returning a particular solution with free variables set
/// to zero, or `None` when the system is inconsistent.
pub fn solve(fp: &Fp, m: &SparseMatrix, b: &[u32]) -> Option<Vec<u32>> {
    assert_eq!(b.len(), m.rows, "solve: rhs length must equal row count");
    // row-reduce the augmented matrix [m | b]
    let mut aug = SparseMatrix::zero(m.rows, m.cols + 1);
    for (r, row) in m.data.iter().enumerate() {
        aug.data[r] = row.clone();
        if b[r] != 0 {
            aug.data[r].push((m.cols, b[r]));
        }
    }
    let (r, rank) = rref(fp, &aug);
    let mut x = vec![0; m.cols];
    for i in 0..rank {
        let pivot = r.data[i][0].0;
        if pivot == m.cols {
            return None; // pivot in the augmented column
        }
        x[pivot] = r.entry(i, m.cols);
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f5() -> Fp {
        Fp::new(5)
    }

    #[test]
    fn rref_identity() {
        let fp = f5();
        let id = SparseMatrix::identity(3);
        let (r, rank) = rref(&fp, &id);
        assert_eq!(r, id);
        assert_eq!(rank, 3);
    }

    #[test]
    fn rref_zero() {
        let fp = f5();
        let z = SparseMatrix::zero(2, 4);
        let (r, rank) = rref(&fp, &z);
        assert_eq!(r, z);
        assert_eq!(rank, 0);
    }

    #[test]
    fn rref_rank_one() {
        // [[1,2],[2,4]] over F_5 row-reduces to [[1,2],[0,0]], rank 1
        let fp = f5();
        let m = SparseMatrix::from_entries(&fp, 2, 2, [(0, 0, 1), (0, 1, 2), (1, 0, 2), (1, 1, 4)]);
        let (r, rank) = rref(&fp, &m);
        assert_eq!(rank, 1);
        assert_eq!(r.dense_row(0), vec![1, 2]);
        assert_eq!(r.dense_row(1), vec![0, 0]);
    }

    #[test]
    fn kernel_zero_matrix() {
        let fp = f5();
        let z = SparseMatrix::zero(2, 3);
        let k = kernel_basis(&fp, &z);
        assert_eq!(k.dim(), 3);
    }

    #[test]
    fn kernel_identity() {
        let fp = f5();
        let k = kernel_basis(&fp, &SparseMatrix::identity(4));
        assert_eq!(k.dim(), 0);
    }

    #[test]
    fn kernel_rank_one() {
        // kernel of [[1,2],[2,4]] over F_5 is spanned by (3,1)
        let fp = f5();
        let m = SparseMatrix::from_entries(&fp, 2, 2, [(0, 0, 1), (0, 1, 2), (1, 0, 2), (1, 1, 4)]);
        let k = kernel_basis(&fp, &m);
        assert_eq!(k.dim(), 1);
        assert!(k.contains(&fp, &[3, 1]));
        for v in k.basis_rows() {
            assert!(m.mul_vec(&fp, &v).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn solve_identity() {
        let fp = f5();
        let m = SparseMatrix::identity(3);
        let b = vec![4, 0, 2];
        assert_eq!(solve(&fp, &m, &b), Some(b));
    }

    #[test]
    fn solve_inconsistent() {
        let fp = f5();
        let m = SparseMatrix::zero(2, 2);
        assert_eq!(solve(&fp, &m, &[1, 0]), None);
    }

    #[test]
    fn solve_free_variables_zeroed() {
        // [[1,2],[0,0]] x = (3,0): pivot solution (3,0)
        let fp = f5();
        let m = SparseMatrix::from_entries(&fp, 2, 2, [(0, 0, 1), (0, 1, 2)]);
        assert_eq!(solve(&fp, &m, &[3, 0]), Some(vec![3, 0]));
    }

    #[test]
    fn subspace_insert_keeps_rref() {
        let fp = f5();
        let mut s = Subspace::empty(3);
        assert!(s.insert(&fp, &[0, 2, 1]));
        assert!(s.insert(&fp, &[1, 1, 0]));
        assert!(!s.insert(&fp, &[2, 2, 0]));
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&fp, &[3, 3, 0]));
        // pivots strictly increasing, normalized
        let piv: Vec<usize> = s.basis.iter().map(|r| r[0].0).collect();
        assert!(piv.windows(2).all(|w| w[0] < w[1]));
        assert!(s.basis.iter().all(|r| r[0].1 == 1));
    }

    fn arb_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = (u32, SparseMatrix)> {
        (
            prop_oneof![Just(3u32), Just(5), Just(7)],
            1..=max_rows,
            1..=max_cols,
        )
            .prop_flat_map(|(p, rows, cols)| {
                (
                    Just(p),
                    Just(rows),
                    Just(cols),
                    proptest::collection::vec(0..p, rows * cols),
                )
            })
            .prop_map(|(p, rows, cols, vals)| {
                let dense: Vec<Vec<u32>> = vals.chunks(cols).map(|ch| ch.to_vec()).collect();
                (p, SparseMatrix::from_dense_rows(rows, cols, &dense))
            })
    }

    proptest! {
        #[test]
        fn rank_nullity((p, m) in arb_matrix(8, 10)) {
            let fp = Fp::new(p);
            let (_, rank) = rref(&fp, &m);
            let k = kernel_basis(&fp, &m);
            prop_assert_eq!(rank + k.dim(), m.cols());
        }

        #[test]
        fn rref_idempotent((p, m) in arb_matrix(8, 10)) {
            let fp = Fp::new(p);
            let (r1, rank1) = rref(&fp, &m);
            let (r2, rank2) = rref(&fp, &r1);
            prop_assert_eq!(r1, r2);
            prop_assert_eq!(rank1, rank2);
        }

        #[test]
        fn dense_and_sparse_paths_agree((p, m) in arb_matrix(8, 10)) {
            let fp = Fp::new(p);
            prop_assert_eq!(rref_dense(&fp, &m), rref_sparse(&fp, &m));
        }

        #[test]
        fn kernel_vectors_annihilate((p, m) in arb_matrix(8, 10)) {
            let fp = Fp::new(p);
            let k = kernel_basis(&fp, &m);
            for v in k.basis_rows() {
                prop_assert!(m.mul_vec(&fp, &v).iter().all(|&x| x == 0));
            }
        }

        #[test]
        fn solve_solutions_verify((p, m) in arb_matrix(8, 10), seed in 0u64..1000) {
            let fp = Fp::new(p);
            // build a consistent rhs from a random x, then check m * solve() == b
            let x: Vec<u32> = (0..m.cols())
                .map(|i| ((seed.wrapping_mul(6364136223846793005).wrapping_add(i as u64)) % p as u64) as u32)
                .collect();
            let b = m.mul_vec(&fp, &x);
            let sol = solve(&fp, &m, &b).expect("consistent system must solve");
            prop_assert_eq!(m.mul_vec(&fp, &sol), b);
        }
    }
}
