//! Transferring a product across a degree-`n` chain isomorphism, and the
//! sign laws that result.
//!
//! Complexes are cohomologically graded with a single basis; elements are
//! [`SparseVec`]s over it and tensors are indexed by `a * dim + b`. A
//! degree-`k` map `φ` satisfies `d φ = (-1)^k φ d`, and
//! `(φ ⊗ ψ)(x ⊗ y) = (-1)^{|ψ||x|} φ(x) ⊗ ψ(y)`.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::field::{Field, FieldScalar};
use crate::linalg::{SparseMatrix, SparseVec};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignError {
    #[error("differential does not raise degree by one at basis element {0}")]
    BadDegree(usize),
    #[error("differential does not square to zero")]
    NotAComplex,
}

/// A finite-dimensional cochain complex with a homogeneous basis.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedComplex {
    pub field: Field,
    pub degrees: Vec<i64>,
    pub d: SparseMatrix,
}

impl GradedComplex {
    pub fn new(field: Field, degrees: Vec<i64>, d: SparseMatrix) -> Result<Self, SignError> {
        for (k, col) in d.columns().iter().enumerate() {
            if col.iter().any(|(r, _)| degrees[r] != degrees[k] + 1) {
                return Err(SignError::BadDegree(k));
            }
        }
        if !d.mul(&d).is_zero() {
            return Err(SignError::NotAComplex);
        }
        Ok(GradedComplex { field, degrees, d })
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    /// Degree of a nonzero homogeneous element.
    pub fn degree_of(&self, v: &SparseVec) -> Option<i64> {
        let mut it = v.iter().map(|(k, _)| self.degrees[k]);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn basis_of_degree(&self, k: i64) -> Vec<usize> {
        (0..self.dim()).filter(|&b| self.degrees[b] == k).collect()
    }

    /// Degrees that carry basis elements, ascending.
    pub fn occupied_degrees(&self) -> Vec<i64> {
        let mut v = self.degrees.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn differential(&self, v: &SparseVec) -> SparseVec {
        self.d.mul_vec(v)
    }

    /// `d(a ⊗ b) = da ⊗ b + (-1)^{|a|} a ⊗ db` on `C ⊗ C`.
    pub fn tensor_differential(&self, t: &SparseVec) -> SparseVec {
        let n = self.dim();
        let f = self.field;
        let mut out = SparseVec::new();
        for (idx, c) in t.iter() {
            let (a, b) = (idx / n, idx % n);
            let ea = SparseVec::unit(a, f.one());
            let eb = SparseVec::unit(b, f.one());
            out.add_scaled(c, &tensor(&self.d.mul_vec(&ea), &eb, n));
            let s = c * &f.sign(self.degrees[a]);
            out.add_scaled(&s, &tensor(&ea, &self.d.mul_vec(&eb), n));
        }
        out
    }

    /// `C[n]`: the same basis in degrees lowered by `n`, with `d = (-1)^n d_C`
    /// so that the identity `s^n : C[n] -> C` is a degree-`n` chain map.
    pub fn shift(&self, n: i64) -> GradedComplex {
        GradedComplex {
            field: self.field,
            degrees: self.degrees.iter().map(|d| d - n).collect(),
            d: self.d.scale(&self.field.sign(n)),
        }
    }

    /// A random element of degree `k` with small integer coefficients.
    pub fn random_homogeneous<R: Rng>(&self, k: i64, rng: &mut R) -> SparseVec {
        SparseVec::from_entries(
            self.basis_of_degree(k)
                .into_iter()
                .map(|b| (b, self.field.from_i64(rng.gen_range(-3..=3)))),
        )
    }
}

/// `x ⊗ y` in the tensor basis of a `dim`-dimensional space with itself.
pub fn tensor(x: &SparseVec, y: &SparseVec, dim: usize) -> SparseVec {
    let mut out = Vec::new();
    for (a, xa) in x.iter() {
        for (b, yb) in y.iter() {
            out.push((a * dim + b, xa * yb));
        }
    }
    SparseVec::from_entries(out)
}

/// `(φ ⊗ ψ)(t)` with the Koszul sign `(-1)^{|ψ||x|}`.
fn map_tensor(
    phi: &SparseMatrix,
    psi: &SparseMatrix,
    psi_degree: i64,
    source_degrees: &[i64],
    t: &SparseVec,
    field: Field,
) -> SparseVec {
    let n = source_degrees.len();
    let m = phi.rows();
    let mut out = SparseVec::new();
    for (idx, c) in t.iter() {
        let (a, b) = (idx / n, idx % n);
        let s = c * &field.sign(psi_degree * source_degrees[a]);
        out.add_scaled(&s, &tensor(phi.column(a), psi.column(b), m));
    }
    out
}

/// A degree-`n` chain isomorphism `f : A -> B` with inverse `g`.
#[derive(Clone, Debug)]
pub struct DegreeNIso {
    pub n: i64,
    pub source: GradedComplex,
    pub target: GradedComplex,
    pub f: SparseMatrix,
    pub g: SparseMatrix,
}

impl DegreeNIso {
    /// Composes a random degree-preserving automorphism of `a` with the
    /// shift by `n`; the target differential is `(-1)^n f d_A g`.
    pub fn random<R: Rng>(a: &GradedComplex, n: i64, rng: &mut R) -> DegreeNIso {
        let (k, kinv) = random_block_iso(a, rng);
        let field = a.field;
        let target = GradedComplex {
            field,
            degrees: a.degrees.iter().map(|d| d + n).collect(),
            d: k.mul(&a.d).mul(&kinv).scale(&field.sign(n)),
        };
        DegreeNIso {
            n,
            source: a.clone(),
            target,
            f: k,
            g: kinv,
        }
    }

    pub fn apply_f(&self, x: &SparseVec) -> SparseVec {
        self.f.mul_vec(x)
    }

    pub fn apply_g(&self, x: &SparseVec) -> SparseVec {
        self.g.mul_vec(x)
    }

    /// `(f ⊗ f)` on `A ⊗ A`.
    pub fn tensor_f(&self, t: &SparseVec) -> SparseVec {
        map_tensor(&self.f, &self.f, self.n, &self.source.degrees, t, self.source.field)
    }

    /// `(g ⊗ g)` on `B ⊗ B`.
    pub fn tensor_g(&self, t: &SparseVec) -> SparseVec {
        map_tensor(&self.g, &self.g, -self.n, &self.target.degrees, t, self.source.field)
    }

    /// `(f ⊗ f)^{-1} = (-1)^n g ⊗ g`.
    pub fn tensor_inverse(&self, t: &SparseVec) -> SparseVec {
        self.tensor_g(t).scale(&self.source.field.sign(self.n))
    }

    /// First degree where `d_B f = (-1)^n f d_A` fails, if any.
    pub fn chain_map_defect(&self) -> Option<usize> {
        let lhs = self.target.d.mul(&self.f);
        let rhs = self.f.mul(&self.source.d).scale(&self.source.field.sign(self.n));
        (0..self.source.dim()).find(|&k| lhs.column(k) != rhs.column(k))
    }
}

fn random_block_iso<R: Rng>(a: &GradedComplex, rng: &mut R) -> (SparseMatrix, SparseMatrix) {
    let field = a.field;
    let mut trip = Vec::new();
    for k in a.occupied_degrees() {
        let idx = a.basis_of_degree(k);
        let m = idx.len();
        let block = loop {
            let rows: Vec<Vec<i64>> =
                (0..m).map(|_| (0..m).map(|_| rng.gen_range(-2..=2)).collect()).collect();
            let b = SparseMatrix::from_dense_i64(field, &rows);
            if b.is_invertible() {
                break b;
            }
        };
        for c in 0..m {
            for (r, v) in block.column(c).iter() {
                trip.push((idx[r], idx[c], v.clone()));
            }
        }
    }
    let h = SparseMatrix::from_triplets(field, a.dim(), a.dim(), trip);
    let hinv = h.inverse().expect("block-diagonal of invertible blocks");
    (h, hinv)
}

/// A bilinear map `C ⊗ C -> C` of the given degree, stored on basis pairs.
#[derive(Clone, Debug)]
pub struct GradedProduct {
    pub complex: GradedComplex,
    pub degree: i64,
    pub table: Vec<Vec<SparseVec>>,
    pub unit: Option<SparseVec>,
}

impl GradedProduct {
    fn from_fn(
        complex: GradedComplex,
        degree: i64,
        unit: Option<SparseVec>,
        mut f: impl FnMut(usize, usize) -> SparseVec,
    ) -> GradedProduct {
        let n = complex.dim();
        let table = (0..n).map(|a| (0..n).map(|b| f(a, b)).collect()).collect();
        GradedProduct {
            complex,
            degree,
            table,
            unit,
        }
    }

    pub fn apply(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (a, xa) in x.iter() {
            for (b, yb) in y.iter() {
                out.add_scaled(&(xa * yb), &self.table[a][b]);
            }
        }
        out
    }

    pub fn apply_tensor(&self, t: &SparseVec) -> SparseVec {
        let n = self.complex.dim();
        let mut out = SparseVec::new();
        for (idx, c) in t.iter() {
            out.add_scaled(c, &self.table[idx / n][idx % n]);
        }
        out
    }

    /// A basis pair violating `d m = (-1)^k m d`, if any.
    pub fn chain_map_witness(&self) -> Option<(usize, usize)> {
        let c = &self.complex;
        let n = c.dim();
        let sign = c.field.sign(self.degree);
        for a in 0..n {
            for b in 0..n {
                let t = tensor(&SparseVec::unit(a, c.field.one()), &SparseVec::unit(b, c.field.one()), n);
                let lhs = c.differential(&self.table[a][b]);
                let rhs = self.apply_tensor(&c.tensor_differential(&t)).scale(&sign);
                if lhs != rhs {
                    return Some((a, b));
                }
            }
        }
        None
    }
}

/// `Q = f P (f ⊗ f)^{-1}`.
pub fn transfer_q(iso: &DegreeNIso, p: &GradedProduct) -> GradedProduct {
    let n = iso.target.dim();
    let one = iso.target.field.one();
    GradedProduct::from_fn(iso.target.clone(), -iso.n, p.unit.as_ref().map(|u| iso.apply_f(u)), |a, b| {
        let t = tensor(&SparseVec::unit(a, one.clone()), &SparseVec::unit(b, one.clone()), n);
        iso.apply_f(&p.apply_tensor(&iso.tensor_inverse(&t)))
    })
}

/// `Q' = f P (g ⊗ g)`.
pub fn transfer_qprime(iso: &DegreeNIso, p: &GradedProduct) -> GradedProduct {
    let n = iso.target.dim();
    let one = iso.target.field.one();
    GradedProduct::from_fn(iso.target.clone(), -iso.n, p.unit.as_ref().map(|u| iso.apply_f(u)), |a, b| {
        let t = tensor(&SparseVec::unit(a, one.clone()), &SparseVec::unit(b, one.clone()), n);
        iso.apply_f(&p.apply_tensor(&iso.tensor_g(&t)))
    })
}

/// `a ⊠'' b = (-1)^{n|a|} a ⊠' b`.
pub fn transfer_qdoubleprime(iso: &DegreeNIso, p: &GradedProduct) -> GradedProduct {
    let mut q = transfer_qprime(iso, p);
    let f = iso.target.field;
    for (a, row) in q.table.iter_mut().enumerate() {
        let s = f.sign(iso.n * iso.target.degrees[a]);
        for v in row.iter_mut() {
            *v = v.scale(&s);
        }
    }
    q
}

/// `a • b = f(g(a) ⊞ g(b))`.
pub fn dold_bullet(iso: &DegreeNIso, p: &GradedProduct) -> GradedProduct {
    let one = iso.target.field.one();
    GradedProduct::from_fn(iso.target.clone(), -iso.n, p.unit.as_ref().map(|u| iso.apply_f(u)), |a, b| {
        let ga = iso.apply_g(&SparseVec::unit(a, one.clone()));
        let gb = iso.apply_g(&SparseVec::unit(b, one.clone()));
        iso.apply_f(&p.apply(&ga, &gb))
    })
}

fn shifted(iso: &DegreeNIso, p: &GradedProduct, via_inverse: bool) -> GradedProduct {
    let field = iso.target.field;
    let bn = iso.target.shift(iso.n);
    let n = bn.dim();
    let one = field.one();
    let degrees = bn.degrees.clone();
    GradedProduct::from_fn(bn, 0, p.unit.as_ref().map(|u| iso.apply_f(u)), |a, b| {
        // (s^n ⊗ s^n)(ā ⊗ b̄) = (-1)^{n|ā|} a ⊗ b
        let t = tensor(&SparseVec::unit(a, one.clone()), &SparseVec::unit(b, one.clone()), n)
            .scale(&field.sign(iso.n * degrees[a]));
        let back = if via_inverse { iso.tensor_inverse(&t) } else { iso.tensor_g(&t) };
        iso.apply_f(&p.apply_tensor(&back))
    })
}

/// `R = t^n f P (f ⊗ f)^{-1} (s^n ⊗ s^n)` on `B[n]`.
pub fn shifted_r(iso: &DegreeNIso, p: &GradedProduct) -> GradedProduct {
    shifted(iso, p, true)
}

/// `R' = t^n f P (g ⊗ g) (s^n ⊗ s^n)` on `B[n]`.
pub fn shifted_rprime(iso: &DegreeNIso, p: &GradedProduct) -> GradedProduct {
    shifted(iso, p, false)
}

/// A sign relating two vectors, as measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Cell {
    Plus,
    Minus,
    /// Both sides vanished on every sample.
    Vanishes,
    /// Different samples required different signs, or no sign fits.
    Mixed,
}

impl Cell {
    pub fn of(lhs: &SparseVec, rhs: &SparseVec, field: Field) -> Cell {
        if lhs.is_zero() && rhs.is_zero() {
            Cell::Vanishes
        } else if lhs == rhs {
            Cell::Plus
        } else if *lhs == rhs.scale(&field.from_i64(-1)) {
            Cell::Minus
        } else {
            Cell::Mixed
        }
    }

    pub fn from_exponent(e: i64) -> Cell {
        if e.rem_euclid(2) == 0 {
            Cell::Plus
        } else {
            Cell::Minus
        }
    }

    pub fn merge(self, other: Cell) -> Cell {
        match (self, other) {
            (Cell::Vanishes, c) | (c, Cell::Vanishes) => c,
            (a, b) if a == b => a,
            _ => Cell::Mixed,
        }
    }

    /// Whether a measured cell is consistent with a predicted sign.
    pub fn agrees_with(self, predicted: Cell) -> bool {
        self == Cell::Vanishes || self == predicted
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cell::Plus => "+",
            Cell::Minus => "-",
            Cell::Vanishes => "0",
            Cell::Mixed => "?",
        })
    }
}

/// Measured defects of a product over all basis elements.
#[derive(Clone, Debug, Serialize)]
pub struct DefectReport {
    /// `(ab)c = s a(bc)`, keyed by `(|a|, |b|, |c|)`.
    pub associativity: BTreeMap<(i64, i64, i64), Cell>,
    /// `ab = s ba`, keyed by `(|a|, |b|)`.
    pub commutativity: BTreeMap<(i64, i64), Cell>,
    /// `u b = s b`, keyed by `|b|`.
    pub left_unit: BTreeMap<i64, Cell>,
    /// `a u = s a`, keyed by `|a|`.
    pub right_unit: BTreeMap<i64, Cell>,
    /// A basis pair on which the product fails to be a chain map.
    pub chain_map_witness: Option<(usize, usize)>,
}

impl DefectReport {
    /// True when every measured cell of `table` agrees with `predict`.
    pub fn matches<K: Copy + Ord>(table: &BTreeMap<K, Cell>, predict: impl Fn(K) -> Cell) -> bool {
        table.iter().all(|(&k, &c)| c.agrees_with(predict(k)))
    }
}

fn merge_into<K: Ord>(map: &mut BTreeMap<K, Cell>, key: K, c: Cell) {
    let e = map.entry(key).or_insert(Cell::Vanishes);
    *e = e.merge(c);
}

/// Exhaustive defect measurement on basis elements.
pub fn defect_report(p: &GradedProduct) -> DefectReport {
    let c = &p.complex;
    let f = c.field;
    let n = c.dim();
    let e = |k: usize| SparseVec::unit(k, f.one());
    let mut associativity = BTreeMap::new();
    let mut commutativity = BTreeMap::new();
    let mut left_unit = BTreeMap::new();
    let mut right_unit = BTreeMap::new();
    for a in 0..n {
        for b in 0..n {
            let ab = &p.table[a][b];
            let key = (c.degrees[a], c.degrees[b]);
            merge_into(&mut commutativity, key, Cell::of(ab, &p.table[b][a], f));
            for k in 0..n {
                let lhs = p.apply(ab, &e(k));
                let rhs = p.apply(&e(a), &p.table[b][k]);
                merge_into(
                    &mut associativity,
                    (c.degrees[a], c.degrees[b], c.degrees[k]),
                    Cell::of(&lhs, &rhs, f),
                );
            }
        }
        if let Some(u) = &p.unit {
            merge_into(&mut left_unit, c.degrees[a], Cell::of(&p.apply(u, &e(a)), &e(a), f));
            merge_into(&mut right_unit, c.degrees[a], Cell::of(&p.apply(&e(a), u), &e(a), f));
        }
    }
    DefectReport {
        associativity,
        commutativity,
        left_unit,
        right_unit,
        chain_map_witness: p.chain_map_witness(),
    }
}

/// A commutative differential graded algebra on a small basis.
fn algebra(field: Field, degrees: Vec<i64>, d: SparseMatrix, table: Vec<Vec<SparseVec>>) -> GradedProduct {
    GradedProduct {
        complex: GradedComplex::new(field, degrees, d).expect("factor is a complex"),
        degree: 0,
        table,
        unit: Some(SparseVec::unit(0, field.one())),
    }
}

/// `Λ[x]`, `|x|` odd.
fn exterior(field: Field, deg: i64) -> GradedProduct {
    let e = |k| SparseVec::unit(k, field.one());
    algebra(
        field,
        vec![0, deg],
        SparseMatrix::zeros(field, 2, 2),
        vec![vec![e(0), e(1)], vec![e(1), SparseVec::new()]],
    )
}

/// `F[y]/(y^k)`, `|y|` even.
fn truncated(field: Field, deg: i64, k: usize) -> GradedProduct {
    let table = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| if a + b < k { SparseVec::unit(a + b, field.one()) } else { SparseVec::new() })
                .collect()
        })
        .collect();
    algebra(
        field,
        (0..k as i64).map(|i| i * deg).collect(),
        SparseMatrix::zeros(field, k, k),
        table,
    )
}

/// `Λ[x] ⊗ F[y]/(y^2)` with `dx = y`; basis `1, x, y, xy`.
fn koszul(field: Field, xdeg: i64) -> GradedProduct {
    let e = |k| SparseVec::unit(k, field.one());
    let z = SparseVec::new;
    let table = vec![
        vec![e(0), e(1), e(2), e(3)],
        vec![e(1), z(), e(3), z()],
        vec![e(2), e(3), z(), z()],
        vec![e(3), z(), z(), z()],
    ];
    let d = SparseMatrix::from_triplets(field, 4, 4, [(2, 1, field.one())]);
    algebra(field, vec![0, xdeg, xdeg + 1, 2 * xdeg + 1], d, table)
}

/// Graded tensor product of two algebras.
fn tensor_algebra(x: &GradedProduct, y: &GradedProduct) -> GradedProduct {
    let field = x.complex.field;
    let (nx, ny) = (x.complex.dim(), y.complex.dim());
    let dx = &x.complex.degrees;
    let dy = &y.complex.degrees;
    let idx = |i: usize, j: usize| i * ny + j;
    let degrees: Vec<i64> = (0..nx * ny).map(|k| dx[k / ny] + dy[k % ny]).collect();
    let mut trip = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            for (r, v) in x.complex.d.column(i).iter() {
                trip.push((idx(r, j), idx(i, j), v.clone()));
            }
            for (r, v) in y.complex.d.column(j).iter() {
                trip.push((idx(i, r), idx(i, j), v * &field.sign(dx[i])));
            }
        }
    }
    let d = SparseMatrix::from_triplets(field, nx * ny, nx * ny, trip);
    let mut table = vec![vec![SparseVec::new(); nx * ny]; nx * ny];
    for a in 0..nx * ny {
        for b in 0..nx * ny {
            let (i, j) = (a / ny, a % ny);
            let (k, l) = (b / ny, b % ny);
            let s = field.sign(dy[j] * dx[k]);
            let mut out = Vec::new();
            for (r, u) in x.table[i][k].iter() {
                for (c, w) in y.table[j][l].iter() {
                    out.push((idx(r, c), &(u * w) * &s));
                }
            }
            table[a][b] = SparseVec::from_entries(out);
        }
    }
    GradedProduct {
        complex: GradedComplex::new(field, degrees, d).expect("tensor of complexes"),
        degree: 0,
        table,
        unit: Some(SparseVec::unit(0, field.one())),
    }
}

/// Transports an algebra along a random degree-preserving automorphism.
fn conjugate<R: Rng>(p: &GradedProduct, rng: &mut R) -> GradedProduct {
    let (h, hinv) = random_block_iso(&p.complex, rng);
    let c = &p.complex;
    let one = c.field.one();
    let d = h.mul(&c.d).mul(&hinv);
    let complex = GradedComplex::new(c.field, c.degrees.clone(), d).expect("conjugate complex");
    let unit = p.unit.as_ref().map(|u| h.mul_vec(u));
    GradedProduct::from_fn(complex, 0, unit, |a, b| {
        let x = hinv.mul_vec(&SparseVec::unit(a, one.clone()));
        let y = hinv.mul_vec(&SparseVec::unit(b, one.clone()));
        h.mul_vec(&p.apply(&x, &y))
    })
}

/// A random associative, graded-commutative, unital algebra with a
/// compatible differential, of dimension at most 8.
pub fn random_algebra<R: Rng>(field: Field, rng: &mut R) -> GradedProduct {
    let factors = rng.gen_range(1..=3);
    let mut acc: Option<GradedProduct> = None;
    for _ in 0..factors {
        let odd = *[-1i64, 1, 3].choose(rng).expect("nonempty");
        let fac = match rng.gen_range(0..3) {
            0 => exterior(field, odd),
            1 => truncated(field, *[-2i64, 2].choose(rng).expect("nonempty"), rng.gen_range(2..=3)),
            _ => koszul(field, odd),
        };
        acc = Some(match acc {
            None => fac,
            Some(a) if a.complex.dim() * fac.complex.dim() <= 8 => tensor_algebra(&a, &fac),
            Some(a) => a,
        });
    }
    conjugate(&acc.expect("at least one factor"), rng)
}

/// An algebra `A`, a degree-`n` isomorphism out of it, and every product
/// transferred along it.
#[derive(Clone, Debug)]
pub struct Instance {
    pub algebra: GradedProduct,
    pub iso: DegreeNIso,
    pub q: GradedProduct,
    pub qprime: GradedProduct,
    pub qdoubleprime: GradedProduct,
    pub bullet: GradedProduct,
    pub r: GradedProduct,
    pub rprime: GradedProduct,
}

impl Instance {
    pub fn new(algebra: GradedProduct, iso: DegreeNIso) -> Instance {
        Instance {
            q: transfer_q(&iso, &algebra),
            qprime: transfer_qprime(&iso, &algebra),
            qdoubleprime: transfer_qdoubleprime(&iso, &algebra),
            bullet: dold_bullet(&iso, &algebra),
            r: shifted_r(&iso, &algebra),
            rprime: shifted_rprime(&iso, &algebra),
            algebra,
            iso,
        }
    }

    pub fn random<R: Rng>(field: Field, n: i64, rng: &mut R) -> Instance {
        let algebra = random_algebra(field, rng);
        let iso = DegreeNIso::random(&algebra.complex, n, rng);
        Instance::new(algebra, iso)
    }
}

/// The eight sign laws.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Identity {
    IsoTensorInverse,
    QVersusQprime,
    QprimeAssociativity,
    QprimeCommutativity,
    QprimeUnits,
    QdoubleprimeNotChainMap,
    BulletLaws,
    ShiftedRLaws,
}

impl Identity {
    pub const ALL: [Identity; 8] = [
        Identity::IsoTensorInverse,
        Identity::QVersusQprime,
        Identity::QprimeAssociativity,
        Identity::QprimeCommutativity,
        Identity::QprimeUnits,
        Identity::QdoubleprimeNotChainMap,
        Identity::BulletLaws,
        Identity::ShiftedRLaws,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::IsoTensorInverse => "iso-tensor-inverse",
            Identity::QVersusQprime => "q-vs-qprime",
            Identity::QprimeAssociativity => "qprime-associativity",
            Identity::QprimeCommutativity => "qprime-commutativity",
            Identity::QprimeUnits => "qprime-units",
            Identity::QdoubleprimeNotChainMap => "qdoubleprime-not-chain-map",
            Identity::BulletLaws => "bullet-laws",
            Identity::ShiftedRLaws => "shifted-r-laws",
        }
    }

    /// Checks the law on one instance; `Err` describes the first failure.
    pub fn check<R: Rng>(self, inst: &Instance, samples: usize, rng: &mut R) -> Result<(), String> {
        let iso = &inst.iso;
        let p = &inst.algebra;
        let b = &iso.target;
        let field = b.field;
        let n = iso.n;
        let sgn = |e: i64| field.sign(e);
        let degs = b.occupied_degrees();
        let pick = |rng: &mut R| {
            let k = *degs.choose(rng).expect("nonempty");
            (k, b.random_homogeneous(k, rng))
        };
        let expect = |ok: bool, what: &str| if ok { Ok(()) } else { Err(what.to_string()) };
        match self {
            Identity::IsoTensorInverse => {
                let dim = b.dim();
                for x in 0..dim {
                    for y in 0..dim {
                        let t = tensor(&SparseVec::unit(x, field.one()), &SparseVec::unit(y, field.one()), dim);
                        expect(iso.tensor_f(&iso.tensor_inverse(&t)) == t, "(f⊗f)(-1)^n(g⊗g) ≠ id")?;
                        expect(iso.tensor_inverse(&iso.tensor_f(&t)) == t, "(-1)^n(g⊗g)(f⊗f) ≠ id")?;
                    }
                }
                expect(iso.chain_map_defect().is_none(), "f is not a degree-n chain map")
            }
            Identity::QVersusQprime => {
                let q = &inst.q;
                let qp = &inst.qprime;
                for _ in 0..samples {
                    let (ka, a) = pick(rng);
                    let (_, bb) = pick(rng);
                    let lhs = q.apply(&a, &bb);
                    expect(lhs == qp.apply(&a, &bb).scale(&sgn(n)), "Q ≠ (-1)^n Q'")?;
                    let direct = iso.apply_f(&p.apply(&iso.apply_g(&a), &iso.apply_g(&bb)));
                    expect(lhs == direct.scale(&sgn(n + n * ka)), "Q ≠ (-1)^{n+n|a|} f(g a ⊞ g b)")?;
                }
                expect(q.chain_map_witness().is_none(), "Q is not a degree -n chain map")?;
                expect(qp.chain_map_witness().is_none(), "Q' is not a degree -n chain map")
            }
            Identity::QprimeAssociativity => {
                let qp = &inst.qprime;
                for _ in 0..samples {
                    let (ka, a) = pick(rng);
                    let (_, bb) = pick(rng);
                    let (_, c) = pick(rng);
                    let lhs = qp.apply(&qp.apply(&a, &bb), &c);
                    let rhs = qp.apply(&a, &qp.apply(&bb, &c));
                    expect(lhs == rhs.scale(&sgn(n + n * ka)), "(a⊠'b)⊠'c ≠ (-1)^{n+n|a|} a⊠'(b⊠'c)")?;
                }
                Ok(())
            }
            Identity::QprimeCommutativity => {
                let qp = &inst.qprime;
                for _ in 0..samples {
                    let (ka, a) = pick(rng);
                    let (kb, bb) = pick(rng);
                    let lhs = qp.apply(&a, &bb);
                    let rhs = qp.apply(&bb, &a);
                    expect(lhs == rhs.scale(&sgn(ka * kb + n)), "a⊠'b ≠ (-1)^{|a||b|+n} b⊠'a")?;
                }
                Ok(())
            }
            Identity::QprimeUnits => {
                let qp = &inst.qprime;
                let q = &inst.q;
                let u = qp.unit.clone().expect("unital");
                for _ in 0..samples {
                    let (ka, a) = pick(rng);
                    expect(qp.apply(&u, &a) == a.scale(&sgn(n)), "u⊠'b ≠ (-1)^n b")?;
                    expect(qp.apply(&a, &u) == a.scale(&sgn(n * ka)), "a⊠'u ≠ (-1)^{n|a|} a")?;
                    expect(q.apply(&u, &a) == a, "u⊠b ≠ b")?;
                    expect(q.apply(&a, &u) == a.scale(&sgn(n + n * ka)), "a⊠u ≠ (-1)^{n+n|a|} a")?;
                }
                Ok(())
            }
            Identity::QdoubleprimeNotChainMap => {
                let qpp = &inst.qdoubleprime;
                let witness = qpp.chain_map_witness();
                if n.rem_euclid(2) == 1 && !b.d.is_zero() {
                    expect(witness.is_some(), "Q'' unexpectedly a chain map")
                } else {
                    expect(witness.is_none(), "Q'' fails to be a chain map where Q'' = Q'")
                }
            }
            Identity::BulletLaws => {
                let bu = &inst.bullet;
                let u = bu.unit.clone().expect("unital");
                for _ in 0..samples {
                    let (ka, a) = pick(rng);
                    let (kb, bb) = pick(rng);
                    let (_, c) = pick(rng);
                    let ab = bu.apply(&a, &bb);
                    expect(bu.apply(&ab, &c) == bu.apply(&a, &bu.apply(&bb, &c)), "bullet not associative")?;
                    expect(bu.apply(&u, &a) == a && bu.apply(&a, &u) == a, "bullet not unital")?;
                    let ba = bu.apply(&bb, &a);
                    expect(ab == ba.scale(&sgn((ka - n) * (kb - n))), "a•b ≠ (-1)^{(|a|-n)(|b|-n)} b•a")?;
                }
                Ok(())
            }
            Identity::ShiftedRLaws => {
                let r = &inst.r;
                let rp = &inst.rprime;
                let bn = &r.complex;
                let ups = r.unit.clone().expect("unital");
                let sdegs = bn.occupied_degrees();
                for _ in 0..samples {
                    let pk = |rng: &mut R| {
                        let k = *sdegs.choose(rng).expect("nonempty");
                        (k, bn.random_homogeneous(k, rng))
                    };
                    let (ka, a) = pk(rng);
                    let (kb, bb) = pk(rng);
                    let (_, c) = pk(rng);
                    let ab = r.apply(&a, &bb);
                    let direct = iso.apply_f(&p.apply(&iso.apply_g(&a), &iso.apply_g(&bb)));
                    expect(ab == direct, "R ≠ t^n f(g a ⊞ g b)")?;
                    expect(rp.apply(&a, &bb) == ab.scale(&sgn(n)), "R' ≠ (-1)^n R")?;
                    expect(r.apply(&ab, &c) == r.apply(&a, &r.apply(&bb, &c)), "R not associative")?;
                    expect(r.apply(&ups, &a) == a && r.apply(&a, &ups) == a, "R not unital")?;
                    expect(ab == r.apply(&bb, &a).scale(&sgn(ka * kb)), "R not graded commutative")?;
                }
                expect(r.chain_map_witness().is_none(), "R is not a degree-0 chain map")
            }
        }
    }
}

/// Pass/fail tally of one identity at one `n`.
#[derive(Clone, Debug, Serialize)]
pub struct LawOutcome {
    pub identity: Identity,
    pub n: i64,
    pub trials: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl LawOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn trial_rng(seed: u64, n: i64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ ((n as u64) << 48) ^ (trial as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Runs every identity on `trials` random instances for each `n`.
pub fn run_trials(field: Field, ns: &[i64], trials: usize, seed: u64) -> Vec<LawOutcome> {
    let mut out = Vec::new();
    for &n in ns {
        let results: Vec<Vec<Result<(), String>>> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(seed, n, t);
                let inst = Instance::random(field, n, &mut rng);
                Identity::ALL.iter().map(|id| id.check(&inst, 3, &mut rng)).collect()
            })
            .collect();
        for (k, &id) in Identity::ALL.iter().enumerate() {
            let fails: Vec<&String> = results.iter().filter_map(|r| r[k].as_ref().err()).collect();
            out.push(LawOutcome {
                identity: id,
                n,
                trials,
                failures: fails.len(),
                first_failure: fails.first().map(|s| s.to_string()),
            });
        }
    }
    out
}

/// Predicted sign `s` in `f(α ⊞ β) = s · ((f ⊗ f)(α ⊗ β))•` for a
/// degree-`degree` isomorphism, measured on random instances and keyed by the
/// parities of `(|α|, |β|)`.
pub fn transfer_sign_table(field: Field, degree: i64, trials: usize, seed: u64) -> BTreeMap<(i64, i64), Cell> {
    let mut table = BTreeMap::new();
    for t in 0..trials {
        let mut rng = trial_rng(seed, degree, t);
        let inst = Instance::random(field, degree, &mut rng);
        let bu = &inst.bullet;
        let a = &inst.algebra.complex;
        let dim = a.dim();
        for x in 0..dim {
            for y in 0..dim {
                let ex = SparseVec::unit(x, field.one());
                let ey = SparseVec::unit(y, field.one());
                let lhs = inst.iso.apply_f(&inst.algebra.apply(&ex, &ey));
                let rhs = bu.apply_tensor(&inst.iso.tensor_f(&tensor(&ex, &ey, dim)));
                let key = (a.degrees[x].rem_euclid(2), a.degrees[y].rem_euclid(2));
                merge_into(&mut table, key, Cell::of(&lhs, &rhs, field));
            }
        }
    }
    table
}

/// A scalar as `+1`/`-1` when it is a sign.
pub fn as_cell(s: &FieldScalar) -> Cell {
    match s.as_sign() {
        Some(1) => Cell::Plus,
        Some(_) => Cell::Minus,
        None if s.is_zero() => Cell::Vanishes,
        None => Cell::Mixed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_are_cdgas() {
        let f = Field::Rational;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let p = random_algebra(f, &mut rng);
            let r = defect_report(&p);
            assert!(r.associativity.values().all(|c| c.agrees_with(Cell::Plus)));
            assert!(DefectReport::matches(&r.commutativity, |(a, b)| Cell::from_exponent(a * b)));
            assert!(r.left_unit.values().all(|c| *c == Cell::Plus));
            assert!(r.chain_map_witness.is_none());
        }
    }

    #[test]
    fn n_zero_transfers_coincide() {
        let f = Field::Rational;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let inst = Instance::random(f, 0, &mut rng);
        let q = transfer_q(&inst.iso, &inst.algebra);
        let qp = transfer_qprime(&inst.iso, &inst.algebra);
        let r = shifted_r(&inst.iso, &inst.algebra);
        assert_eq!(q.table, qp.table);
        assert_eq!(q.table, r.table);
    }

    #[test]
    fn qprime_associativity_table_for_n_one() {
        let f = Field::Rational;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let alg = conjugate(&tensor_algebra(&exterior(f, 1), &exterior(f, 1)), &mut rng);
        let iso = DegreeNIso::random(&alg.complex, 1, &mut rng);
        let r = defect_report(&transfer_qprime(&iso, &alg));
        assert!(DefectReport::matches(&r.associativity, |(a, _, _)| Cell::from_exponent(1 + a)));
        let bullet = defect_report(&dold_bullet(&iso, &alg));
        assert!(bullet.associativity.values().all(|c| c.agrees_with(Cell::Plus)));
        assert!(DefectReport::matches(&bullet.commutativity, |(a, b)| Cell::from_exponent((a - 1) * (b - 1))));
        let sr = defect_report(&shifted_r(&iso, &alg));
        assert!(sr.associativity.values().all(|c| c.agrees_with(Cell::Plus)));
        assert!(sr.chain_map_witness.is_none());
    }

    #[test]
    fn unit_example_for_n_one() {
        let f = Field::Rational;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let inst = Instance::random(f, 1, &mut rng);
        let q = transfer_q(&inst.iso, &inst.algebra);
        let u = q.unit.clone().unwrap();
        for k in inst.iso.target.occupied_degrees() {
            let b = inst.iso.target.random_homogeneous(k, &mut rng);
            assert_eq!(q.apply(&u, &b), b);
        }
    }

    #[test]
    fn all_laws_hold_on_a_few_trials() {
        for o in run_trials(Field::Rational, &[0, 1, 2, 3], 25, 9) {
            assert!(o.passed(), "{:?} n={} {:?}", o.identity, o.n, o.first_failure);
        }
    }

    #[test]
    fn qdoubleprime_witness_needs_a_differential() {
        let f = Field::Rational;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let alg = koszul(f, 1);
        let iso = DegreeNIso::random(&alg.complex, 1, &mut rng);
        assert!(transfer_qdoubleprime(&iso, &alg).chain_map_witness().is_some());
        let flat = exterior(f, 1);
        let iso = DegreeNIso::random(&flat.complex, 1, &mut rng);
        assert!(transfer_qdoubleprime(&iso, &flat).chain_map_witness().is_none());
    }

    #[test]
    fn transfer_sign_depends_on_first_parity() {
        for n in 0..4i64 {
            let t = transfer_sign_table(Field::Rational, -n, 30, 11);
            for ((a, _), c) in t {
                assert!(c.agrees_with(Cell::from_exponent(n * a)), "n={n} a={a} {c}");
            }
        }
    }
}
