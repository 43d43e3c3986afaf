//! Non-GM intersection chains and their homology.
//!
//! For a perversity `p` the degree-`i` subspace `I_i` consists of chains
//! supported on allowable `i`-simplices outside `X^{n-1}` whose boundary,
//! after zeroing every simplex in `X^{n-1}`, is again supported on allowable
//! simplices. Everything is computed as exact kernels.

use std::sync::Arc;

use crate::complex::StratifiedComplex;
use crate::field::Field;
use crate::linalg::{ColumnReduction, SparseMatrix, SparseVec};
use crate::perversity::Perversity;

/// Whether the `k`-th `d`-simplex is `p`-allowable: every face whose interior
/// lies in a singular stratum `S` has dimension `<= d - codim(S) + p(S)`.
pub fn allowable(x: &StratifiedComplex, p: &Perversity, d: usize, k: usize) -> bool {
    let s = &x.simplices(d)[k];
    s.all_faces().iter().all(|f| {
        let fd = f.dim() as usize;
        let fk = x.index_of(f).expect("face of a simplex");
        if !x.is_singular(fd, fk) {
            return true;
        }
        let st = x.stratum_of(fd, fk);
        let codim = x.strata()[st].codim as i64;
        let pv = p.value(st).expect("perversity on singular stratum");
        fd as i64 <= d as i64 - codim + pv
    })
}

/// The simplicial boundary of a `d`-chain with every simplex of `X^{n-1}`
/// given coefficient zero.
pub fn nongm_boundary(x: &StratifiedComplex, field: Field, d: usize, chain: &SparseVec) -> SparseVec {
    if d == 0 {
        return SparseVec::new();
    }
    let mut entries = Vec::new();
    for (k, c) in chain.iter() {
        for (r, f) in x.simplices(d)[k].facets() {
            let fk = x.index_of(&f).expect("facet");
            if !x.is_singular(d - 1, fk) {
                entries.push((fk, c * &field.sign(r as i64)));
            }
        }
    }
    SparseVec::from_entries(entries)
}

/// Homology of one degree of a finite chain complex.
#[derive(Clone, Debug)]
pub struct HomologyDegree {
    pub degree: usize,
    /// Representative cycles, in the coordinates of the chain group.
    pub representatives: Vec<SparseVec>,
    offset: usize,
    rep_of_column: Vec<Option<usize>>,
    reduction: ColumnReduction,
    cycle_test: SparseMatrix,
}

impl HomologyDegree {
    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    /// Coordinates of the class of a cycle in the representative basis, or
    /// `None` when the vector is not a cycle.
    pub fn class_of(&self, cycle: &SparseVec) -> Option<SparseVec> {
        if !self.cycle_test.mul_vec(cycle).is_zero() {
            return None;
        }
        let full = self.reduction.solve(cycle)?;
        // dependent columns never appear in a solution
        Some(full.remap(|j| j.checked_sub(self.offset).and_then(|c| self.rep_of_column[c])))
    }

    pub fn is_boundary(&self, cycle: &SparseVec) -> bool {
        self.class_of(cycle).is_some_and(|c| c.is_zero())
    }
}

/// Homology of a finite chain complex with explicit representatives.
#[derive(Clone, Debug)]
pub struct Homology {
    pub field: Field,
    pub degrees: Vec<HomologyDegree>,
}

impl Homology {
    /// `boundaries[d]` maps `C_d -> C_{d-1}`; `dims[d]` is `dim C_d`.
    pub fn compute(field: Field, dims: &[usize], boundaries: &[SparseMatrix]) -> Homology {
        let top = dims.len();
        let degrees = (0..top)
            .map(|d| {
                let cycle_test = if d == 0 {
                    SparseMatrix::zeros(field, 0, dims[0])
                } else {
                    boundaries[d].clone()
                };
                let mut reduction = ColumnReduction::new(&SparseMatrix::zeros(field, dims[d], 0));
                if d + 1 < top {
                    for col in boundaries[d + 1].columns() {
                        reduction.push_column(col.clone());
                    }
                }
                let offset = reduction.cols();
                let mut representatives = Vec::new();
                let mut rep_of_column = Vec::new();
                for z in cycle_test.kernel_basis() {
                    if reduction.push_column(z.clone()) {
                        rep_of_column.push(Some(representatives.len()));
                        representatives.push(z);
                    } else {
                        rep_of_column.push(None);
                    }
                }
                HomologyDegree {
                    degree: d,
                    representatives,
                    offset,
                    rep_of_column,
                    reduction,
                    cycle_test,
                }
            })
            .collect();
        Homology { field, degrees }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.degrees.iter().map(HomologyDegree::dim).collect()
    }

    pub fn dim(&self, d: usize) -> usize {
        self.degrees.get(d).map_or(0, HomologyDegree::dim)
    }
}

/// Ordinary simplicial homology of the underlying complex.
pub fn ordinary_homology(x: &StratifiedComplex, field: Field) -> Homology {
    let dims = x.f_vector();
    let bds: Vec<SparseMatrix> = (0..=x.dim()).map(|d| x.boundary_matrix(d, field)).collect();
    Homology::compute(field, &dims, &bds)
}

/// Ordinary Betti numbers from ranks alone: `c_i - rk ∂_i - rk ∂_{i+1}`.
pub fn betti_numbers(x: &StratifiedComplex, field: Field) -> Vec<usize> {
    let n = x.dim();
    let ranks: Vec<usize> = (0..=n + 1)
        .map(|d| if d == 0 || d > n { 0 } else { x.boundary_matrix(d, field).rank() })
        .collect();
    (0..=n).map(|d| x.count(d) - ranks[d] - ranks[d + 1]).collect()
}

/// The perversity-`p` intersection chain complex of a stratified complex.
#[derive(Clone, Debug)]
pub struct IChainComplex {
    complex: Arc<StratifiedComplex>,
    perversity: Perversity,
    field: Field,
    allowable: Vec<Vec<usize>>,
    basis: Vec<Vec<SparseVec>>,
    basis_reduction: Vec<ColumnReduction>,
    boundary: Vec<SparseMatrix>,
    warnings: Vec<String>,
}

impl IChainComplex {
    pub fn build(x: &Arc<StratifiedComplex>, p: &Perversity, field: Field) -> IChainComplex {
        Self::build_restricted(x, p, field, |_, _| true)
    }

    /// Intersection chains supported on the simplices accepted by `keep`,
    /// which must describe a subcomplex (an open subset's intersection chains
    /// when the accepted simplices are those avoiding a vertex).
    fn build_restricted(
        x: &Arc<StratifiedComplex>,
        p: &Perversity,
        field: Field,
        keep: impl Fn(usize, usize) -> bool,
    ) -> IChainComplex {
        let n = x.dim();
        let allowed: Vec<Vec<bool>> = (0..=n)
            .map(|d| {
                (0..x.count(d))
                    .map(|k| !x.is_singular(d, k) && keep(d, k) && allowable(x, p, d, k))
                    .collect()
            })
            .collect();
        let allowable_idx: Vec<Vec<usize>> = allowed
            .iter()
            .map(|v| v.iter().enumerate().filter(|(_, &a)| a).map(|(k, _)| k).collect())
            .collect();

        let mut basis = Vec::with_capacity(n + 1);
        for d in 0..=n {
            let cols = &allowable_idx[d];
            if d == 0 {
                basis.push(cols.iter().map(|&k| SparseVec::unit(k, field.one())).collect());
                continue;
            }
            // rows: level-n (d-1)-simplices that are not allowable
            let mut bad_row = vec![None; x.count(d - 1)];
            let mut nbad = 0;
            for fk in 0..x.count(d - 1) {
                if !x.is_singular(d - 1, fk) && !allowed[d - 1][fk] {
                    bad_row[fk] = Some(nbad);
                    nbad += 1;
                }
            }
            let columns: Vec<SparseVec> = cols
                .iter()
                .map(|&k| {
                    nongm_boundary(x, field, d, &SparseVec::unit(k, field.one()))
                        .remap(|fk| bad_row[fk])
                })
                .collect();
            let m = SparseMatrix::from_columns(field, nbad, columns);
            let kernel = if m.is_zero() {
                (0..cols.len()).map(|j| SparseVec::unit(j, field.one())).collect()
            } else {
                m.kernel_basis()
            };
            basis.push(kernel.iter().map(|v| v.remap(|j| Some(cols[j]))).collect::<Vec<_>>());
        }

        let basis_reduction: Vec<ColumnReduction> = (0..=n)
            .map(|d| {
                ColumnReduction::new(&SparseMatrix::from_columns(field, x.count(d), basis[d].clone()))
            })
            .collect();
        let boundary: Vec<SparseMatrix> = (0..=n)
            .map(|d| {
                if d == 0 {
                    return SparseMatrix::zeros(field, 0, basis[0].len());
                }
                let cols = basis[d]
                    .iter()
                    .map(|b| {
                        let bd = nongm_boundary(x, field, d, b);
                        basis_reduction[d - 1]
                            .solve(&bd)
                            .expect("boundary of an intersection chain is an intersection chain")
                    })
                    .collect();
                SparseMatrix::from_columns(field, basis[d - 1].len(), cols)
            })
            .collect();

        let mut warnings = Vec::new();
        let non_flag = x.validate().non_flag_like;
        if !non_flag.is_empty() {
            warnings.push(format!(
                "{} is not flag-like ({} top simplices, e.g. {}); subdivide once before trusting these groups",
                x.name(),
                non_flag.len(),
                non_flag[0]
            ));
        }

        IChainComplex {
            complex: Arc::clone(x),
            perversity: p.clone(),
            field,
            allowable: allowable_idx,
            basis,
            basis_reduction,
            boundary,
            warnings,
        }
    }

    pub fn complex(&self) -> &Arc<StratifiedComplex> {
        &self.complex
    }

    pub fn perversity(&self) -> &Perversity {
        &self.perversity
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Indices of allowable `d`-simplices outside `X^{n-1}`.
    pub fn allowable_simplices(&self, d: usize) -> &[usize] {
        &self.allowable[d]
    }

    /// Basis of `I_d` as chains on all `d`-simplices.
    pub fn basis(&self, d: usize) -> &[SparseVec] {
        &self.basis[d]
    }

    pub fn rank(&self, d: usize) -> usize {
        self.basis.get(d).map_or(0, Vec::len)
    }

    pub fn ranks(&self) -> Vec<usize> {
        (0..=self.dim()).map(|d| self.rank(d)).collect()
    }

    /// Boundary `I_d -> I_{d-1}` in basis coordinates.
    pub fn boundary(&self, d: usize) -> &SparseMatrix {
        &self.boundary[d]
    }

    /// Basis coordinates of a chain, or `None` if it is not in `I_d`.
    pub fn coords(&self, d: usize, chain: &SparseVec) -> Option<SparseVec> {
        self.basis_reduction[d].solve(chain)
    }

    /// Canonical representative of `chain` modulo `I_d`; zero exactly when
    /// the chain lies in `I_d`.
    pub fn residual(&self, d: usize, chain: &SparseVec) -> SparseVec {
        self.basis_reduction[d].residual(chain)
    }

    pub fn contains(&self, d: usize, chain: &SparseVec) -> bool {
        self.coords(d, chain).is_some()
    }

    /// The chain with the given basis coordinates.
    pub fn chain(&self, d: usize, coords: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (j, c) in coords.iter() {
            out.add_scaled(c, &self.basis[d][j]);
        }
        out
    }

    /// `I_d` as a matrix whose columns are the basis chains.
    pub fn basis_matrix(&self, d: usize) -> SparseMatrix {
        SparseMatrix::from_columns(self.field, self.complex.count(d), self.basis[d].clone())
    }

    pub fn homology(&self) -> Homology {
        Homology::compute(self.field, &self.ranks(), &self.boundary)
    }

    /// Homology of `I(X) / I(X - st v)`, where `X - st v` is the subcomplex
    /// of simplices not containing `v`.
    pub fn relative_homology_at_vertex(&self, v: u32) -> Homology {
        let x = Arc::clone(&self.complex);
        let sub = Self::build_restricted(&x, &self.perversity, self.field, |d, k| {
            !x.simplices(d)[k].contains_vertex(v)
        });
        self.quotient_homology(&sub)
    }

    /// Homology of the quotient by a subcomplex built on the same space.
    fn quotient_homology(&self, sub: &IChainComplex) -> Homology {
        let n = self.dim();
        let field = self.field;
        let red: Vec<ColumnReduction> = (0..=n)
            .map(|d| {
                let cols = sub.basis[d]
                    .iter()
                    .map(|b| self.coords(d, b).expect("subcomplex"))
                    .collect();
                ColumnReduction::new(&SparseMatrix::from_columns(field, self.rank(d), cols))
            })
            .collect();
        // complement coordinates: non-pivot rows
        let complement: Vec<Vec<usize>> = (0..=n)
            .map(|d| {
                let piv = red[d].pivot_rows();
                (0..self.rank(d)).filter(|r| piv.binary_search(r).is_err()).collect()
            })
            .collect();
        let position: Vec<Vec<Option<usize>>> = (0..=n)
            .map(|d| {
                let mut pos = vec![None; self.rank(d)];
                for (i, &r) in complement[d].iter().enumerate() {
                    pos[r] = Some(i);
                }
                pos
            })
            .collect();
        let dims: Vec<usize> = complement.iter().map(Vec::len).collect();
        let bds: Vec<SparseMatrix> = (0..=n)
            .map(|d| {
                if d == 0 {
                    return SparseMatrix::zeros(field, 0, dims[0]);
                }
                let cols = complement[d]
                    .iter()
                    .map(|&r| {
                        let image = self.boundary[d].column(r);
                        red[d - 1].residual(image).remap(|i| position[d - 1][i])
                    })
                    .collect();
                SparseMatrix::from_columns(field, dims[d - 1], cols)
            })
            .collect();
        Homology::compute(field, &dims, &bds)
    }
}

/// Cone-formula prediction for `I^p H_*(cL)` of dimension `n = dim L + 1`:
/// `I^p H_i(L)` below `n - 1 - p(apex)` and zero from there on.
pub fn cone_formula_oracle(link_homology: &[usize], n: usize, apex_value: i64) -> Vec<usize> {
    let cutoff = n as i64 - 1 - apex_value;
    (0..=n)
        .map(|i| {
            if (i as i64) < cutoff {
                link_homology.get(i).copied().unwrap_or(0)
            } else {
                0
            }
        })
        .collect()
}

/// Extends a perversity on `L` to `cL` (as built by [`StratifiedComplex::cone`])
/// by giving the apex the value `apex_value`.
pub fn cone_perversity(
    link: &StratifiedComplex,
    cone: &StratifiedComplex,
    p: &Perversity,
    apex_value: i64,
) -> Perversity {
    let apex = 0;
    let mut table = std::collections::BTreeMap::new();
    for d in 0..=link.dim() {
        for (k, s) in link.simplices(d).iter().enumerate() {
            let js = s.map(|v| v + 1).join(apex);
            let jk = cone.index_of(&js).expect("joined simplex");
            let st = cone.stratum_of(d + 1, jk);
            if let Some(v) = p.value(link.stratum_of(d, k)) {
                table.insert(st, v);
            }
        }
    }
    let ak = cone.index_of(&crate::complex::Simplex::vertex(apex)).expect("apex");
    table.insert(cone.stratum_of(0, ak), apex_value);
    Perversity::from_table(cone, format!("{}|apex={apex_value}", p.name()), &table)
        .expect("cone perversity covers the singular strata")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Simplex;
    use crate::perversity::GmName;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const Q: Field = Field::Rational;

    fn torus() -> StratifiedComplex {
        let mut tops = Vec::new();
        for i in 0..7u32 {
            tops.push(Simplex::new([i, (i + 1) % 7, (i + 3) % 7]));
            tops.push(Simplex::new([i, (i + 2) % 7, (i + 3) % 7]));
        }
        StratifiedComplex::from_top_simplices("T2", 2, &tops).unwrap()
    }

    fn ih(x: &StratifiedComplex, p: &Perversity) -> Vec<usize> {
        IChainComplex::build(&Arc::new(x.clone()), p, Q).homology().dims()
    }

    #[test]
    fn allowability_on_a_cone() {
        let c = StratifiedComplex::simplex_boundary(1).cone();
        let apex = 0;
        let edge = c.index_of(&Simplex::new([apex, 1])).unwrap();
        let p0 = Perversity::constant(&c, 0);
        let p1 = Perversity::constant(&c, 1);
        assert!(!allowable(&c, &p0, 1, edge));
        assert!(allowable(&c, &p1, 1, edge));
        let far = c.index_of(&Simplex::new([1, 2])).unwrap();
        assert!(allowable(&c, &p0, 1, far));

        let ic = IChainComplex::build(&Arc::new(c.clone()), &p0, Q);
        assert!(ic.allowable_simplices(1).iter().all(|&k| !c.simplices(1)[k].contains_vertex(apex)));
        assert!(ic.allowable_simplices(0).iter().all(|&k| c.simplices(0)[k] != Simplex::vertex(apex)));
    }

    #[test]
    fn nongm_boundary_drops_singular_faces() {
        let c = StratifiedComplex::simplex_boundary(1).cone();
        let tri = c.index_of(&Simplex::new([0, 1, 2])).unwrap();
        let bd = nongm_boundary(&c, Q, 2, &SparseVec::unit(tri, Q.one()));
        assert_eq!(bd.nnz(), 3);
        // with the apex vertex singular, ∂' of an apex edge loses the apex
        let e = c.index_of(&Simplex::new([0, 1])).unwrap();
        let bd = nongm_boundary(&c, Q, 1, &SparseVec::unit(e, Q.one()));
        assert_eq!(bd.nnz(), 1);
    }

    #[test]
    fn nongm_boundary_squares_to_zero() {
        let spaces = [torus().suspension(), torus().cone(), StratifiedComplex::simplex_boundary(2).suspension()];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let x = &spaces[rng.gen_range(0..spaces.len())];
            let d = rng.gen_range(2..=x.dim());
            let k = rng.gen_range(0..x.count(d));
            if x.is_singular(d, k) {
                continue;
            }
            let b1 = nongm_boundary(x, Q, d, &SparseVec::unit(k, Q.one()));
            assert!(nongm_boundary(x, Q, d - 1, &b1).is_zero());
        }
    }

    #[test]
    fn manifolds_give_full_chain_complex() {
        let t = torus();
        for c in [-3, 0, 5] {
            let ic = IChainComplex::build(&Arc::new(t.clone()), &Perversity::constant(&t, c), Q);
            assert_eq!(ic.ranks(), t.f_vector());
        }
        assert_eq!(ih(&t, &Perversity::zero(&t)), vec![1, 2, 1]);
        assert_eq!(betti_numbers(&t, Q), vec![1, 2, 1]);
        let s2 = StratifiedComplex::simplex_boundary(2);
        assert_eq!(ih(&s2, &Perversity::zero(&s2)), vec![1, 0, 1]);
    }

    #[test]
    fn boundary_squares_to_zero_on_bases() {
        let x = Arc::new(torus().suspension());
        for g in GmName::ALL {
            let ic = IChainComplex::build(&x, &Perversity::gm(&x, g), Q);
            for d in 2..=3 {
                assert!(ic.boundary(d - 1).mul(ic.boundary(d)).is_zero());
            }
            for d in 0..=3 {
                for b in ic.basis(d) {
                    assert!(b.iter().all(|(k, _)| !x.is_singular(d, k)));
                }
            }
        }
    }

    #[test]
    fn suspended_torus_matches_mayer_vietoris() {
        // two copies of c(T^2) glued along T^2 x (0,1)
        let x = torus().suspension();
        assert_eq!(ih(&x, &Perversity::gm(&x, GmName::LowerMiddle)), vec![1, 2, 0, 1]);
        assert_eq!(ih(&x, &Perversity::gm(&x, GmName::UpperMiddle)), vec![1, 0, 2, 1]);
    }

    #[test]
    fn cone_examples() {
        let circle = StratifiedComplex::simplex_boundary(1);
        let c = circle.cone();
        let p = |v| cone_perversity(&circle, &c, &Perversity::zero(&circle), v);
        assert_eq!(ih(&c, &p(0)), vec![1, 0, 0]);
        assert_eq!(cone_formula_oracle(&[1, 1], 2, 0), vec![1, 0, 0]);
        assert_eq!(ih(&c, &p(-1)), vec![1, 1, 0]);
        assert_eq!(ih(&c, &p(2)), vec![0, 0, 0]);
        assert_eq!(cone_formula_oracle(&[1, 2, 1], 3, 0), vec![1, 2, 0, 0]);
        assert_eq!(cone_formula_oracle(&[1, 2, 1], 3, 2), vec![0, 0, 0, 0]);
    }

    #[test]
    fn dimensions_grow_with_perversity() {
        let x = Arc::new(torus().suspension());
        let ps: Vec<Perversity> = (-1..=3).map(|c| Perversity::constant(&x, c)).collect();
        for w in ps.windows(2) {
            let a = IChainComplex::build(&x, &w[0], Q);
            let b = IChainComplex::build(&x, &w[1], Q);
            for d in 0..=3 {
                assert!(a.rank(d) <= b.rank(d));
                assert!(a.basis(d).iter().all(|v| b.contains(d, v)));
            }
        }
    }

    #[test]
    fn local_homology_at_a_manifold_point() {
        for x in [StratifiedComplex::simplex_boundary(2), torus(), StratifiedComplex::simplex_boundary(3)] {
            let n = x.dim();
            let ic = IChainComplex::build(&Arc::new(x.clone()), &Perversity::zero(&x), Q);
            let mut want = vec![0; n + 1];
            want[n] = 1;
            assert_eq!(ic.relative_homology_at_vertex(0).dims(), want, "{}", x.name());
        }
        let st = torus().suspension();
        let ic = IChainComplex::build(&Arc::new(st.clone()), &Perversity::gm(&st, GmName::LowerMiddle), Q);
        assert_eq!(ic.relative_homology_at_vertex(0).dims(), vec![0, 0, 0, 1]);
    }

    #[test]
    fn class_coordinates() {
        let t = torus();
        let h = ordinary_homology(&t, Q);
        let h1 = &h.degrees[1];
        assert_eq!(h1.dim(), 2);
        for (i, r) in h1.representatives.iter().enumerate() {
            let c = h1.class_of(r).unwrap();
            assert_eq!(c, SparseVec::unit(i, Q.one()));
        }
        let bd = t.boundary_matrix(2, Q).column(0).clone();
        assert!(h1.is_boundary(&bd));
        assert!(h1.class_of(&SparseVec::unit(0, Q.one())).is_none());
    }
}
