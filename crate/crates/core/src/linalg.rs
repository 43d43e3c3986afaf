//! Sparse exact linear algebra over a [`Field`].
//!
//! Matrices are stored column-major as sorted sparse columns with no explicit
//! zeros. All rank/kernel/solve queries go through [`ColumnReduction`], the
//! standard "reduce each column by earlier pivots" elimination that also
//! records the column operations, so one factorisation answers kernel, image
//! and membership questions.

use std::fmt;

use crate::field::{Field, FieldScalar};

/// A sparse vector: `(index, value)` pairs sorted by index, no zero values.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, FieldScalar)>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn unit(index: usize, one: FieldScalar) -> Self {
        Self {
            entries: vec![(index, one)],
        }
    }

    /// Builds a vector from arbitrary `(index, value)` pairs; repeated indices
    /// are summed and zeros dropped.
    pub fn from_entries(entries: impl IntoIterator<Item = (usize, FieldScalar)>) -> Self {
        let mut raw: Vec<(usize, FieldScalar)> = entries.into_iter().collect();
        raw.sort_by_key(|(i, _)| *i);
        let mut out: Vec<(usize, FieldScalar)> = Vec::with_capacity(raw.len());
        for (i, v) in raw {
            match out.last_mut() {
                Some((j, acc)) if *j == i => *acc = &*acc + &v,
                _ => out.push((i, v)),
            }
        }
        out.retain(|(_, v)| !v.is_zero());
        Self { entries: out }
    }

    pub fn from_dense(values: &[FieldScalar]) -> Self {
        Self {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize, field: Field) -> Vec<FieldScalar> {
        let mut out = vec![field.zero(); len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &FieldScalar)> + '_ {
        self.entries.iter().map(|(i, v)| (*i, v))
    }

    pub fn get(&self, index: usize) -> Option<&FieldScalar> {
        self.entries
            .binary_search_by_key(&index, |(i, _)| *i)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    /// Largest index with a nonzero value.
    pub fn last(&self) -> Option<(usize, &FieldScalar)> {
        self.entries.last().map(|(i, v)| (*i, v))
    }

    pub fn scale(&self, c: &FieldScalar) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        Self {
            entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect(),
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: &FieldScalar, other: &SparseVec) {
        if c.is_zero() || other.is_zero() {
            return;
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (0, 0);
        let (xs, ys) = (&self.entries, &other.entries);
        while a < xs.len() || b < ys.len() {
            if b == ys.len() || (a < xs.len() && xs[a].0 < ys[b].0) {
                out.push(xs[a].clone());
                a += 1;
            } else if a == xs.len() || ys[b].0 < xs[a].0 {
                out.push((ys[b].0, c * &ys[b].1));
                b += 1;
            } else {
                let v = &xs[a].1 + &(c * &ys[b].1);
                if !v.is_zero() {
                    out.push((xs[a].0, v));
                }
                a += 1;
                b += 1;
            }
        }
        self.entries = out;
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        if let Some((_, v)) = other.entries.first() {
            let one = v.field().one();
            out.add_scaled(&one, other);
        }
        out
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        if let Some((_, v)) = other.entries.first() {
            let m1 = -v.field().one();
            out.add_scaled(&m1, other);
        }
        out
    }

    pub fn dot(&self, other: &SparseVec, field: Field) -> FieldScalar {
        let mut acc = field.zero();
        let (mut a, mut b) = (0, 0);
        while a < self.entries.len() && b < other.entries.len() {
            let (i, x) = &self.entries[a];
            let (j, y) = &other.entries[b];
            match i.cmp(j) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc = &acc + &(x * y);
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }

    /// Reindexes entries through `map`; entries mapped to `None` are dropped.
    pub fn remap(&self, map: impl Fn(usize) -> Option<usize>) -> SparseVec {
        SparseVec::from_entries(
            self.entries
                .iter()
                .filter_map(|(i, v)| map(*i).map(|j| (j, v.clone()))),
        )
    }

    pub fn retain(&mut self, keep: impl Fn(usize) -> bool) {
        self.entries.retain(|(i, _)| keep(*i));
    }
}

impl fmt::Debug for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.entries.iter().map(|(i, v)| (i, v.to_string())))
            .finish()
    }
}

/// A `rows x cols` sparse matrix over `field`, stored by columns.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    field: Field,
    rows: usize,
    columns: Vec<SparseVec>,
}

impl fmt::Debug for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SparseMatrix {}x{} over {}", self.rows, self.cols(), self.field)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols()).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl SparseMatrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            columns: vec![SparseVec::new(); cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        Self {
            field,
            rows: n,
            columns: (0..n).map(|i| SparseVec::unit(i, field.one())).collect(),
        }
    }

    pub fn from_columns(field: Field, rows: usize, columns: Vec<SparseVec>) -> Self {
        debug_assert!(columns
            .iter()
            .all(|c| c.last().is_none_or(|(i, _)| i < rows)));
        Self {
            field,
            rows,
            columns,
        }
    }

    pub fn from_triplets(
        field: Field,
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, FieldScalar)>,
    ) -> Self {
        let mut per_col: Vec<Vec<(usize, FieldScalar)>> = vec![Vec::new(); cols];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r},{c}) out of range");
            per_col[c].push((r, v));
        }
        Self {
            field,
            rows,
            columns: per_col.into_iter().map(SparseVec::from_entries).collect(),
        }
    }

    /// Dense integer constructor, mainly for tests and small examples.
    pub fn from_dense_i64(field: Field, rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        Self::from_triplets(
            field,
            nrows,
            ncols,
            rows.iter().enumerate().flat_map(|(r, row)| {
                row.iter()
                    .enumerate()
                    .map(move |(c, v)| (r, c, field.from_i64(*v)))
            }),
        )
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, c: usize) -> &SparseVec {
        &self.columns[c]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.columns
    }

    pub fn get(&self, r: usize, c: usize) -> FieldScalar {
        self.columns[c]
            .get(r)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(SparseVec::nnz).sum()
    }

    pub fn mul_vec(&self, x: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (j, v) in x.iter() {
            out.add_scaled(v, &self.columns[j]);
        }
        out
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols(), other.rows, "dimension mismatch in product");
        SparseMatrix {
            field: self.field,
            rows: self.rows,
            columns: other.columns.iter().map(|c| self.mul_vec(c)).collect(),
        }
    }

    pub fn scale(&self, c: &FieldScalar) -> SparseMatrix {
        SparseMatrix {
            field: self.field,
            rows: self.rows,
            columns: self.columns.iter().map(|col| col.scale(c)).collect(),
        }
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut rows: Vec<Vec<(usize, FieldScalar)>> = vec![Vec::new(); self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for (r, v) in col.iter() {
                rows[r].push((c, v.clone()));
            }
        }
        SparseMatrix {
            field: self.field,
            rows: self.cols(),
            columns: rows
                .into_iter()
                .map(|entries| SparseVec { entries })
                .collect(),
        }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.rows, other.rows);
        let mut columns = self.columns.clone();
        columns.extend(other.columns.iter().cloned());
        SparseMatrix {
            field: self.field,
            rows: self.rows,
            columns,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(SparseVec::is_zero)
    }

    pub fn reduce(&self) -> ColumnReduction {
        ColumnReduction::new(self)
    }

    pub fn rank(&self) -> usize {
        self.reduce().rank()
    }

    pub fn kernel_basis(&self) -> Vec<SparseVec> {
        self.reduce().kernel_basis()
    }

    /// Returns `x` with `self * x = b`, or `None` when `b` is not in the image.
    /// Panics if `b` has an index outside the row range.
    pub fn solve(&self, b: &SparseVec) -> Option<SparseVec> {
        self.reduce().solve(b)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols() && self.rank() == self.rows
    }

    /// Inverse of a square invertible matrix.
    pub fn inverse(&self) -> Option<SparseMatrix> {
        if !self.is_invertible() {
            return None;
        }
        let red = self.reduce();
        let columns = (0..self.rows)
            .map(|i| {
                red.solve(&SparseVec::unit(i, self.field.one()))
                    .expect("invertible")
            })
            .collect();
        Some(SparseMatrix {
            field: self.field,
            rows: self.rows,
            columns,
        })
    }

    /// Determinant of a square matrix via fraction-exact elimination.
    pub fn determinant(&self) -> FieldScalar {
        assert_eq!(self.rows, self.cols(), "determinant of non-square matrix");
        let n = self.rows;
        let mut m: Vec<Vec<FieldScalar>> = (0..n)
            .map(|r| (0..n).map(|c| self.get(r, c)).collect())
            .collect();
        let mut det = self.field.one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !m[r][k].is_zero()) else {
                return self.field.zero();
            };
            if p != k {
                m.swap(p, k);
                det = -det;
            }
            det = &det * &m[k][k];
            let inv = m[k][k].inv();
            for r in (k + 1)..n {
                if m[r][k].is_zero() {
                    continue;
                }
                let f = &m[r][k] * &inv;
                for c in k..n {
                    let t = &f * &m[k][c];
                    m[r][c] = &m[r][c] - &t;
                }
            }
        }
        det
    }
}

/// Result of column-reducing a matrix `M`.
///
/// For every column `j` we keep `reduced[j] = M * transform[j]`. Nonzero
/// reduced columns have distinct lowest rows (pivots) normalised to 1; zero
/// reduced columns make `transform[j]` a kernel vector.
#[derive(Clone, Debug)]
pub struct ColumnReduction {
    field: Field,
    rows: usize,
    reduced: Vec<SparseVec>,
    transform: Vec<SparseVec>,
    pivot_of_row: Vec<Option<usize>>,
}

impl ColumnReduction {
    pub fn new(m: &SparseMatrix) -> Self {
        let field = m.field;
        let mut out = ColumnReduction {
            field,
            rows: m.rows,
            reduced: Vec::with_capacity(m.cols()),
            transform: Vec::with_capacity(m.cols()),
            pivot_of_row: vec![None; m.rows],
        };
        for col in &m.columns {
            out.push_column(col.clone());
        }
        out
    }

    /// Appends a column and reduces it; returns `true` when it was independent
    /// of the columns already present.
    pub fn push_column(&mut self, col: SparseVec) -> bool {
        let j = self.reduced.len();
        let mut r = col;
        let mut v = SparseVec::unit(j, self.field.one());
        while let Some((low, val)) = r.last() {
            match self.pivot_of_row[low] {
                Some(k) => {
                    let c = -val;
                    r.add_scaled(&c, &self.reduced[k]);
                    v.add_scaled(&c, &self.transform[k]);
                }
                None => {
                    let inv = val.inv();
                    r = r.scale(&inv);
                    v = v.scale(&inv);
                    self.pivot_of_row[low] = Some(j);
                    break;
                }
            }
        }
        let independent = !r.is_zero();
        self.reduced.push(r);
        self.transform.push(v);
        independent
    }

    pub fn rank(&self) -> usize {
        self.reduced.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn cols(&self) -> usize {
        self.reduced.len()
    }

    pub fn kernel_basis(&self) -> Vec<SparseVec> {
        self.reduced
            .iter()
            .zip(&self.transform)
            .filter(|(r, _)| r.is_zero())
            .map(|(_, v)| v.clone())
            .collect()
    }

    /// Indices of the columns that were independent of all earlier columns.
    pub fn independent_columns(&self) -> Vec<usize> {
        (0..self.reduced.len())
            .filter(|&j| !self.reduced[j].is_zero())
            .collect()
    }

    /// Column echelon basis of the image.
    pub fn image_basis(&self) -> Vec<SparseVec> {
        self.reduced.iter().filter(|c| !c.is_zero()).cloned().collect()
    }

    pub fn solve(&self, b: &SparseVec) -> Option<SparseVec> {
        assert!(
            b.last().is_none_or(|(i, _)| i < self.rows),
            "right-hand side longer than row count"
        );
        let mut r = b.clone();
        let mut x = SparseVec::new();
        while let Some((low, val)) = r.last() {
            let k = self.pivot_of_row[low]?;
            let c = val.clone();
            r.add_scaled(&-&c, &self.reduced[k]);
            x.add_scaled(&c, &self.transform[k]);
        }
        Some(x)
    }

    pub fn contains(&self, b: &SparseVec) -> bool {
        self.solve(b).is_some()
    }

    /// Rows that carry a pivot; the remaining rows index a complement of
    /// the image.
    pub fn pivot_rows(&self) -> Vec<usize> {
        (0..self.rows).filter(|&r| self.pivot_of_row[r].is_some()).collect()
    }

    /// Reduces `b` modulo the image until no entry sits on a pivot row.
    /// This is a linear projection whose kernel is the image.
    pub fn residual(&self, b: &SparseVec) -> SparseVec {
        let mut r = b.clone();
        loop {
            let hit = r
                .iter()
                .filter(|(row, _)| self.pivot_of_row[*row].is_some())
                .last()
                .map(|(row, v)| (row, v.clone()));
            let Some((row, val)) = hit else { break };
            let k = self.pivot_of_row[row].expect("pivot row");
            r.add_scaled(&-&val, &self.reduced[k]);
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn boundary_of_triangle(field: Field) -> SparseMatrix {
        // edges 01, 02, 12 -> vertices 0, 1, 2
        SparseMatrix::from_dense_i64(field, &[vec![-1, -1, 0], vec![1, 0, -1], vec![0, 1, 1]])
    }

    #[test]
    fn rank_examples() {
        let q = Field::Rational;
        assert_eq!(SparseMatrix::zeros(q, 0, 0).rank(), 0);
        assert_eq!(SparseMatrix::identity(q, 3).rank(), 3);
        assert_eq!(boundary_of_triangle(q).rank(), 2);
        assert_eq!(boundary_of_triangle(Field::Prime(2)).rank(), 2);
    }

    #[test]
    fn kernel_examples() {
        let q = Field::Rational;
        assert!(SparseMatrix::identity(q, 4).kernel_basis().is_empty());
        assert_eq!(SparseMatrix::zeros(q, 2, 2).kernel_basis().len(), 2);
        let d = boundary_of_triangle(q);
        let ker = d.kernel_basis();
        assert_eq!(ker.len(), 1);
        assert!(d.mul_vec(&ker[0]).is_zero());
        // the cycle 01 - 02 + 12 up to scale
        let z = &ker[0];
        assert_eq!(z.get(0).unwrap(), &-z.get(1).unwrap());
        assert_eq!(z.get(0).unwrap(), z.get(2).unwrap());
    }

    #[test]
    fn solve_examples() {
        let q = Field::Rational;
        let b = SparseVec::from_dense(&[q.from_i64(3), q.from_i64(-1), q.zero()]);
        assert_eq!(SparseMatrix::identity(q, 3).solve(&b), Some(b.clone()));
        assert_eq!(SparseMatrix::zeros(q, 3, 3).solve(&b), None);
        // boundary of the 2-simplex: column [12, -02, 01] in edge order 01,02,12
        let d2 = SparseMatrix::from_dense_i64(q, &[vec![1], vec![-1], vec![1]]);
        let rhs = d2.column(0).clone();
        assert_eq!(d2.solve(&rhs), Some(SparseVec::unit(0, q.one())));
    }

    #[test]
    fn determinant_and_inverse() {
        let q = Field::Rational;
        let m = SparseMatrix::from_dense_i64(q, &[vec![2, 1], vec![1, 1]]);
        assert_eq!(m.determinant(), q.one());
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), SparseMatrix::identity(q, 2));
        let s = SparseMatrix::from_dense_i64(q, &[vec![1, 2], vec![2, 4]]);
        assert!(s.inverse().is_none());
        assert!(s.determinant().is_zero());
    }

    fn random_matrix(rng: &mut ChaCha8Rng, field: Field) -> SparseMatrix {
        let rows = rng.gen_range(0..9);
        let cols = rng.gen_range(0..9);
        let density = rng.gen_range(0.1..0.7);
        let mut trips = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if rng.gen_bool(density) {
                    trips.push((r, c, field.from_i64(rng.gen_range(-3..=3))));
                }
            }
        }
        SparseMatrix::from_triplets(field, rows, cols, trips)
    }

    #[test]
    fn rank_nullity_and_solve_on_random_matrices() {
        for field in [Field::Rational, Field::Prime(2), Field::Prime(7)] {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for _ in 0..500 {
                let m = random_matrix(&mut rng, field);
                let red = m.reduce();
                let ker = red.kernel_basis();
                assert_eq!(red.rank() + ker.len(), m.cols());
                for v in &ker {
                    assert!(m.mul_vec(v).is_zero());
                }
                let x = SparseVec::from_entries(
                    (0..m.cols()).map(|j| (j, field.from_i64(rng.gen_range(-4..=4)))),
                );
                let b = m.mul_vec(&x);
                let sol = red.solve(&b).expect("b is in the image");
                assert_eq!(m.mul_vec(&sol), b);
            }
        }
    }

    proptest! {
        #[test]
        fn transpose_preserves_rank(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(&mut rng, Field::Rational);
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }
    }
}
