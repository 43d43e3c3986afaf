//! Finite simplicial stratified pseudomanifolds.
//!
//! A [`StratifiedComplex`] is a simplicial complex together with an explicit
//! filtration `X = X^n ⊇ X^{n-1} ⊇ … ⊇ X^0` by subcomplexes. Every simplex is
//! assigned the *level* `i` of the first skeleton containing it; the open
//! simplices of level `i` group into connected components, the strata.
//!
//! Simplices carry the canonical vertex order (sorted by vertex id); all
//! orientation signs and face maps are relative to it.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, FieldScalar};
use crate::linalg::SparseVec;

pub type Vertex = u32;

/// A simplex given by its sorted, distinct vertices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Simplex(Vec<Vertex>);

impl Simplex {
    pub fn new(vertices: impl IntoIterator<Item = Vertex>) -> Self {
        let mut v: Vec<Vertex> = vertices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Simplex(v)
    }

    pub fn vertex(v: Vertex) -> Self {
        Simplex(vec![v])
    }

    /// Dimension; the empty simplex has dimension `-1`.
    pub fn dim(&self) -> isize {
        self.0.len() as isize - 1
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Codimension-one faces `(r, σ with vertex r removed)`; the boundary
    /// coefficient of the `r`-th face is `(-1)^r`.
    pub fn facets(&self) -> impl Iterator<Item = (usize, Simplex)> + '_ {
        (0..self.0.len()).filter(|_| self.0.len() > 1).map(move |r| {
            let mut v = self.0.clone();
            v.remove(r);
            (r, Simplex(v))
        })
    }

    /// All nonempty faces, including the simplex itself.
    pub fn all_faces(&self) -> Vec<Simplex> {
        let k = self.0.len();
        (1u32..(1 << k))
            .map(|mask| {
                Simplex(
                    (0..k)
                        .filter(|b| mask & (1 << b) != 0)
                        .map(|b| self.0[b])
                        .collect(),
                )
            })
            .collect()
    }

    /// Front face spanned by the first `k + 1` vertices.
    pub fn front(&self, k: usize) -> Simplex {
        Simplex(self.0[..=k].to_vec())
    }

    /// Back face spanned by the last `k + 1` vertices.
    pub fn back(&self, k: usize) -> Simplex {
        Simplex(self.0[self.0.len() - 1 - k..].to_vec())
    }

    /// Join with a vertex not already present.
    pub fn join(&self, v: Vertex) -> Simplex {
        Simplex::new(self.0.iter().copied().chain(std::iter::once(v)))
    }

    pub fn map(&self, f: impl Fn(Vertex) -> Vertex) -> Simplex {
        Simplex::new(self.0.iter().map(|&v| f(v)))
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("simplex {0} has dimension larger than the complex dimension {1}")]
    TooLarge(Simplex, usize),
    #[error("empty simplex in input")]
    EmptySimplex,
    #[error("skeleton X^{0} is not below the top dimension {1}")]
    BadSkeletonIndex(usize, usize),
    #[error("skeleton generator {0} is not a simplex of the complex")]
    UnknownSkeletonSimplex(Simplex),
    #[error("boundary generator {0} is not a simplex of the complex")]
    UnknownBoundarySimplex(Simplex),
    #[error("products are only supported for trivially filtered factors ({0} is stratified)")]
    UnsupportedStratifiedProduct(String),
    #[error("complex has no simplices")]
    Empty,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrientationError {
    #[error("complex is not orientable over {0}")]
    NotOrientable(Field),
    #[error("complex is disconnected; orient each component separately")]
    Disconnected,
    #[error("complex has a nonempty boundary")]
    HasBoundary,
}

/// One stratum: a connected component of `X^i - X^{i-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub id: usize,
    /// Skeleton index `i`, the dimension of the stratum.
    pub level: usize,
    pub codim: usize,
    /// Lexicographically first simplex in the stratum (smallest dimension first).
    pub representative: Simplex,
}

impl Stratum {
    pub fn is_singular(&self) -> bool {
        self.codim > 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    /// a simplex of X^i has dimension greater than i
    SkeletonDimension,
    /// a top simplex of dimension below n, or an isolated vertex
    NotPure,
    /// an (n-1)-simplex outside X^{n-1} without exactly two cofaces
    NotPseudomanifold,
    /// an n-simplex lies in X^{n-1}
    SingularTopSimplex,
    /// a stratum of level i contains no i-simplex
    DegenerateStratum,
    /// a declared boundary simplex that is not a free face
    BadBoundary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub simplex: Simplex,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at {}: {}", self.kind, self.simplex, self.detail)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Top simplices meeting some skeleton in more than one face.
    pub non_flag_like: Vec<Simplex>,
    pub strata: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn is_flag_like(&self) -> bool {
        self.non_flag_like.is_empty()
    }
}

/// A finite simplicial complex with an explicit filtration by skeleta.
#[derive(Clone, Debug)]
pub struct StratifiedComplex {
    name: String,
    dim: usize,
    simplices: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
    skeleta: BTreeMap<usize, Vec<Simplex>>,
    boundary: Vec<Simplex>,
    in_boundary: Vec<Vec<bool>>,
    level: Vec<Vec<usize>>,
    stratum: Vec<Vec<usize>>,
    strata: Vec<Stratum>,
}

fn closure(tops: &[Simplex]) -> BTreeSet<Simplex> {
    let mut out = BTreeSet::new();
    for t in tops {
        for f in t.all_faces() {
            out.insert(f);
        }
    }
    out
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl StratifiedComplex {
    /// Builds a complex from generating simplices.
    ///
    /// `skeleta[i]` generates new simplices of `X^i`; `X^i` is the closure of
    /// all generators with index `<= i`, and `X^n` is the whole complex.
    /// `boundary` generates a declared boundary subcomplex (free faces allowed
    /// by [`validate`](Self::validate)); cones over closed spaces use it.
    pub fn build(
        name: impl Into<String>,
        dim: usize,
        extra_vertices: &[Vertex],
        top_simplices: &[Simplex],
        skeleta: BTreeMap<usize, Vec<Simplex>>,
        boundary: Vec<Simplex>,
    ) -> Result<Self, ComplexError> {
        let mut gens: Vec<Simplex> = top_simplices.to_vec();
        gens.extend(extra_vertices.iter().map(|&v| Simplex::vertex(v)));
        for s in &gens {
            if s.dim() < 0 {
                return Err(ComplexError::EmptySimplex);
            }
            if s.dim() as usize > dim {
                return Err(ComplexError::TooLarge(s.clone(), dim));
            }
        }
        if gens.is_empty() {
            return Err(ComplexError::Empty);
        }
        let all = closure(&gens);
        let mut simplices: Vec<Vec<Simplex>> = vec![Vec::new(); dim + 1];
        for s in all {
            simplices[s.dim() as usize].push(s);
        }
        let index: Vec<HashMap<Simplex, usize>> = simplices
            .iter()
            .map(|list| list.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect())
            .collect();

        let mut level: Vec<Vec<usize>> = simplices.iter().map(|l| vec![dim; l.len()]).collect();
        let mut skeleta = skeleta;
        skeleta.retain(|_, v| !v.is_empty());
        for (&i, list) in &skeleta {
            if i >= dim {
                return Err(ComplexError::BadSkeletonIndex(i, dim));
            }
            for s in list {
                let d = s.dim();
                if d < 0 || d as usize > dim || !index[d as usize].contains_key(s) {
                    return Err(ComplexError::UnknownSkeletonSimplex(s.clone()));
                }
                for f in s.all_faces() {
                    let fd = f.dim() as usize;
                    let k = index[fd][&f];
                    level[fd][k] = level[fd][k].min(i);
                }
            }
        }

        let mut in_boundary: Vec<Vec<bool>> =
            simplices.iter().map(|l| vec![false; l.len()]).collect();
        for s in &boundary {
            let d = s.dim();
            if d < 0 || d as usize > dim || !index[d as usize].contains_key(s) {
                return Err(ComplexError::UnknownBoundarySimplex(s.clone()));
            }
            for f in s.all_faces() {
                let fd = f.dim() as usize;
                in_boundary[fd][index[fd][&f]] = true;
            }
        }

        // strata: union open simplices of equal level along facet relations
        let offsets: Vec<usize> = simplices
            .iter()
            .scan(0, |acc, l| {
                let o = *acc;
                *acc += l.len();
                Some(o)
            })
            .collect();
        let total: usize = simplices.iter().map(Vec::len).sum();
        let mut uf = UnionFind::new(total);
        for d in 1..=dim {
            for (k, s) in simplices[d].iter().enumerate() {
                for (_, f) in s.facets() {
                    let fk = index[d - 1][&f];
                    if level[d - 1][fk] == level[d][k] {
                        uf.union(offsets[d] + k, offsets[d - 1] + fk);
                    }
                }
            }
        }
        let mut root_to_id: HashMap<usize, usize> = HashMap::new();
        let mut order: Vec<(usize, usize, usize)> = Vec::new(); // (level, dim, k)
        for d in 0..=dim {
            for k in 0..simplices[d].len() {
                order.push((level[d][k], d, k));
            }
        }
        order.sort();
        let mut strata = Vec::new();
        let mut stratum: Vec<Vec<usize>> = simplices.iter().map(|l| vec![0; l.len()]).collect();
        for (lv, d, k) in order {
            let root = uf.find(offsets[d] + k);
            let id = *root_to_id.entry(root).or_insert_with(|| {
                strata.push(Stratum {
                    id: strata.len(),
                    level: lv,
                    codim: dim - lv,
                    representative: simplices[d][k].clone(),
                });
                strata.len() - 1
            });
            stratum[d][k] = id;
        }

        Ok(StratifiedComplex {
            name: name.into(),
            dim,
            simplices,
            index,
            skeleta,
            boundary,
            in_boundary,
            level,
            stratum,
            strata,
        })
    }

    /// A trivially filtered complex (a manifold candidate).
    pub fn from_top_simplices(
        name: impl Into<String>,
        dim: usize,
        tops: &[Simplex],
    ) -> Result<Self, ComplexError> {
        Self::build(name, dim, &[], tops, BTreeMap::new(), Vec::new())
    }

    /// The standard simplex `Δ^k` with its boundary declared.
    pub fn standard_simplex(k: usize) -> Self {
        let top = Simplex::new(0..=k as Vertex);
        let boundary: Vec<Simplex> = top.facets().map(|(_, f)| f).collect();
        Self::build(format!("Delta{k}"), k, &[], &[top], BTreeMap::new(), boundary)
            .expect("standard simplex")
    }

    /// The boundary of `Δ^{n+1}`, a closed triangulated `n`-sphere.
    pub fn simplex_boundary(n: usize) -> Self {
        let top = Simplex::new(0..=(n as Vertex + 1));
        let facets: Vec<Simplex> = if n == 0 {
            vec![Simplex::vertex(0), Simplex::vertex(1)]
        } else {
            top.facets().map(|(_, f)| f).collect()
        };
        Self::from_top_simplices(format!("bdDelta{}", n + 1), n, &facets)
            .expect("simplex boundary")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn simplices(&self, d: usize) -> &[Simplex] {
        self.simplices.get(d).map_or(&[], |v| v.as_slice())
    }

    pub fn count(&self, d: usize) -> usize {
        self.simplices(d).len()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        (0..=self.dim).map(|d| self.count(d)).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        self.simplices(0).iter().map(|s| s.vertices()[0]).collect()
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        let d = s.dim();
        if d < 0 {
            return None;
        }
        self.index.get(d as usize)?.get(s).copied()
    }

    pub fn skeleton_generators(&self) -> &BTreeMap<usize, Vec<Simplex>> {
        &self.skeleta
    }

    pub fn boundary_generators(&self) -> &[Simplex] {
        &self.boundary
    }

    pub fn has_boundary(&self) -> bool {
        !self.boundary.is_empty()
    }

    pub fn is_trivially_filtered(&self) -> bool {
        self.skeleta.is_empty()
    }

    pub fn in_boundary(&self, d: usize, k: usize) -> bool {
        self.in_boundary[d][k]
    }

    /// Skeleton index of the first `X^i` containing the simplex.
    pub fn level(&self, d: usize, k: usize) -> usize {
        self.level[d][k]
    }

    /// `true` when the simplex is contained in `X^{n-1}`.
    pub fn is_singular(&self, d: usize, k: usize) -> bool {
        self.level[d][k] < self.dim
    }

    pub fn stratum_of(&self, d: usize, k: usize) -> usize {
        self.stratum[d][k]
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub fn singular_strata(&self) -> impl Iterator<Item = &Stratum> {
        self.strata.iter().filter(|s| s.is_singular())
    }

    pub fn vertex_is_singular(&self, v: Vertex) -> bool {
        self.index_of(&Simplex::vertex(v))
            .is_some_and(|k| self.is_singular(0, k))
    }

    /// Top-dimensional simplices containing each (n-1)-simplex.
    pub fn top_cofaces(&self) -> Vec<Vec<usize>> {
        let n = self.dim;
        let mut out = vec![Vec::new(); self.count(n.saturating_sub(1))];
        if n == 0 {
            return out;
        }
        for (k, s) in self.simplices(n).iter().enumerate() {
            for (_, f) in s.facets() {
                out[self.index[n - 1][&f]].push(k);
            }
        }
        out
    }

    /// Checks every structural invariant and lists each violation.
    pub fn validate(&self) -> ValidationReport {
        let n = self.dim;
        let mut violations = Vec::new();

        for d in 0..=n {
            for (k, s) in self.simplices[d].iter().enumerate() {
                let lv = self.level[d][k];
                if d > lv {
                    violations.push(Violation {
                        kind: ViolationKind::SkeletonDimension,
                        simplex: s.clone(),
                        detail: format!("{d}-simplex in X^{lv}"),
                    });
                }
            }
        }

        // purity: every simplex is a face of an n-simplex
        let mut covered: Vec<Vec<bool>> =
            self.simplices.iter().map(|l| vec![false; l.len()]).collect();
        for s in &self.simplices[n] {
            for f in s.all_faces() {
                let fd = f.dim() as usize;
                covered[fd][self.index[fd][&f]] = true;
            }
        }
        for d in 0..n {
            for (k, s) in self.simplices[d].iter().enumerate() {
                if !covered[d][k] {
                    // report only maximal uncovered simplices
                    let maximal = d + 1 > n
                        || !self.simplices[d + 1]
                            .iter()
                            .enumerate()
                            .any(|(j, t)| !covered[d + 1][j] && s.vertices().iter().all(|v| t.contains_vertex(*v)));
                    if maximal {
                        violations.push(Violation {
                            kind: ViolationKind::NotPure,
                            simplex: s.clone(),
                            detail: format!("{d}-simplex is not a face of any {n}-simplex"),
                        });
                    }
                }
            }
        }

        for (k, s) in self.simplices[n].iter().enumerate() {
            if self.level[n][k] < n {
                violations.push(Violation {
                    kind: ViolationKind::SingularTopSimplex,
                    simplex: s.clone(),
                    detail: format!("{n}-simplex lies in X^{}", self.level[n][k]),
                });
            }
        }

        if n > 0 {
            let cof = self.top_cofaces();
            for (k, s) in self.simplices[n - 1].iter().enumerate() {
                if self.level[n - 1][k] < n {
                    continue;
                }
                let c = cof[k].len();
                let ok = c == 2 || (c == 1 && self.in_boundary[n - 1][k]);
                if !ok {
                    violations.push(Violation {
                        kind: ViolationKind::NotPseudomanifold,
                        simplex: s.clone(),
                        detail: format!("{}-simplex has {c} top-dimensional cofaces", n - 1),
                    });
                }
                if self.in_boundary[n - 1][k] && c != 1 {
                    violations.push(Violation {
                        kind: ViolationKind::BadBoundary,
                        simplex: s.clone(),
                        detail: format!("declared boundary face has {c} cofaces"),
                    });
                }
            }
        }

        for st in &self.strata {
            let has_top = (0..self.count(st.level)).any(|k| {
                self.level[st.level][k] == st.level && self.stratum[st.level][k] == st.id
            });
            if !has_top {
                violations.push(Violation {
                    kind: ViolationKind::DegenerateStratum,
                    simplex: st.representative.clone(),
                    detail: format!(
                        "stratum {} of level {} contains no {}-simplex",
                        st.id, st.level, st.level
                    ),
                });
            }
        }

        ValidationReport {
            violations,
            non_flag_like: self.non_flag_like_simplices(),
            strata: self.strata.len(),
        }
    }

    fn non_flag_like_simplices(&self) -> Vec<Simplex> {
        let n = self.dim;
        let mut out = Vec::new();
        for s in &self.simplices[n] {
            let mut bad = false;
            for i in 0..n {
                let in_skel: Vec<Vertex> = s
                    .vertices()
                    .iter()
                    .copied()
                    .filter(|&v| self.level[0][self.index[0][&Simplex::vertex(v)]] <= i)
                    .collect();
                if in_skel.len() > 1 {
                    let face = Simplex::new(in_skel);
                    let fd = face.dim() as usize;
                    if self.level[fd][self.index[fd][&face]] > i {
                        bad = true;
                    }
                }
            }
            if bad {
                out.push(s.clone());
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let verts = self.vertices();
        if verts.is_empty() {
            return false;
        }
        let pos: HashMap<Vertex, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut uf = UnionFind::new(verts.len());
        for e in self.simplices(1) {
            uf.union(pos[&e.vertices()[0]], pos[&e.vertices()[1]]);
        }
        let r = uf.find(0);
        (0..verts.len()).all(|i| uf.find(i) == r)
    }

    /// Number of connected components of the regular part `X - X^{n-1}`.
    pub fn regular_components(&self) -> usize {
        self.regular_component_labels().1
    }

    fn regular_component_labels(&self) -> (Vec<usize>, usize) {
        let n = self.dim;
        let tops = self.count(n);
        let mut uf = UnionFind::new(tops);
        if n > 0 {
            for (k, cof) in self.top_cofaces().iter().enumerate() {
                if self.level[n - 1][k] == n {
                    for w in cof.windows(2) {
                        uf.union(w[0], w[1]);
                    }
                }
            }
        }
        let mut ids = HashMap::new();
        let labels: Vec<usize> = (0..tops)
            .map(|k| {
                let r = uf.find(k);
                let next = ids.len();
                *ids.entry(r).or_insert(next)
            })
            .collect();
        (labels, ids.len())
    }

    /// Signs `ε_σ` making `Σ ε_σ σ` a cycle of the boundary that ignores
    /// faces in `X^{n-1}`. Each component of the regular part is seeded with
    /// `+1` on its first top simplex.
    pub fn find_fundamental_cycle(&self, field: Field) -> Result<Orientation, OrientationError> {
        if self.has_boundary() {
            return Err(OrientationError::HasBoundary);
        }
        if !self.is_connected() {
            return Err(OrientationError::Disconnected);
        }
        let n = self.dim;
        let tops = self.count(n);
        let mut signs: Vec<Option<FieldScalar>> = vec![None; tops];
        if n == 0 {
            return Ok(Orientation {
                field,
                signs: vec![field.one(); tops],
            });
        }
        // adjacency through regular codimension-one faces
        let mut adj: Vec<Vec<(usize, FieldScalar)>> = vec![Vec::new(); tops];
        let mut incident: HashMap<usize, Vec<(usize, i64)>> = HashMap::new();
        for (k, s) in self.simplices[n].iter().enumerate() {
            for (r, f) in s.facets() {
                let fk = self.index[n - 1][&f];
                if self.level[n - 1][fk] == n {
                    let c = if r % 2 == 0 { 1 } else { -1 };
                    incident.entry(fk).or_default().push((k, c));
                }
            }
        }
        let mut faces: Vec<_> = incident.into_iter().collect();
        faces.sort_by_key(|(fk, _)| *fk);
        for (_, inc) in faces {
            if inc.len() != 2 {
                return Err(OrientationError::NotOrientable(field));
            }
            let (a, ca) = inc[0];
            let (b, cb) = inc[1];
            // ε_b = -ε_a * c_a / c_b, and c_b = ±1
            let rel = field.from_i64(-ca * cb);
            adj[a].push((b, rel.clone()));
            adj[b].push((a, rel));
        }
        for seed in 0..tops {
            if signs[seed].is_some() {
                continue;
            }
            signs[seed] = Some(field.one());
            let mut queue = VecDeque::from([seed]);
            while let Some(a) = queue.pop_front() {
                let ea = signs[a].clone().expect("visited");
                for (b, rel) in &adj[a] {
                    let want = &ea * rel;
                    match &signs[*b] {
                        Some(eb) if *eb != want => {
                            return Err(OrientationError::NotOrientable(field))
                        }
                        Some(_) => {}
                        None => {
                            signs[*b] = Some(want);
                            queue.push_back(*b);
                        }
                    }
                }
            }
        }
        Ok(Orientation {
            field,
            signs: signs.into_iter().map(|s| s.expect("all visited")).collect(),
        })
    }

    /// Cone `cL`. The apex becomes vertex 0 (the vertices of `L` shift up by
    /// one), a new stratum of codimension `dim L + 1`; `L` becomes the
    /// declared boundary.
    pub fn cone(&self) -> StratifiedComplex {
        let apex: Vertex = 0;
        let sh = |s: &Simplex| s.map(|v| v + 1);
        let n = self.dim + 1;
        let tops: Vec<Simplex> = self.simplices(self.dim).iter().map(|s| sh(s).join(apex)).collect();
        let mut skeleta = BTreeMap::new();
        skeleta.insert(0, vec![Simplex::vertex(apex)]);
        for (&i, gens) in &self.skeleta {
            skeleta.insert(i + 1, gens.iter().map(|s| sh(s).join(apex)).collect());
        }
        let mut boundary: Vec<Simplex> = self.simplices(self.dim).iter().map(sh).collect();
        boundary.extend(self.boundary.iter().map(|s| sh(s).join(apex)));
        StratifiedComplex::build(format!("c({})", self.name), n, &[], &tops, skeleta, boundary)
            .expect("cone of a well-formed complex")
    }

    /// Suspension `ΣL`: two cones glued along `L`. The apexes are vertices 0
    /// and 1 and form `X^0`.
    pub fn suspension(&self) -> StratifiedComplex {
        let (north, south): (Vertex, Vertex) = (0, 1);
        let sh = |s: &Simplex| s.map(|v| v + 2);
        let n = self.dim + 1;
        let mut tops = Vec::new();
        for s in self.simplices(self.dim) {
            tops.push(sh(s).join(north));
            tops.push(sh(s).join(south));
        }
        let mut skeleta = BTreeMap::new();
        skeleta.insert(0, vec![Simplex::vertex(north), Simplex::vertex(south)]);
        for (&i, gens) in &self.skeleta {
            let mut v = Vec::new();
            for s in gens {
                v.push(sh(s).join(north));
                v.push(sh(s).join(south));
            }
            skeleta.insert(i + 1, v);
        }
        let mut boundary = Vec::new();
        for s in &self.boundary {
            boundary.push(sh(s).join(north));
            boundary.push(sh(s).join(south));
        }
        StratifiedComplex::build(format!("S({})", self.name), n, &[], &tops, skeleta, boundary)
            .expect("suspension of a well-formed complex")
    }

    /// Disjoint union with vertices of `other` relabelled above ours.
    pub fn disjoint_union(&self, other: &StratifiedComplex) -> StratifiedComplex {
        assert_eq!(self.dim, other.dim, "disjoint union of different dimensions");
        let shift = self.fresh_vertex();
        let mut tops = self.simplices(self.dim).to_vec();
        tops.extend(other.simplices(other.dim).iter().map(|s| s.map(|v| v + shift)));
        let mut skeleta = self.skeleta.clone();
        for (&i, gens) in &other.skeleta {
            skeleta
                .entry(i)
                .or_default()
                .extend(gens.iter().map(|s| s.map(|v| v + shift)));
        }
        let mut boundary = self.boundary.clone();
        boundary.extend(other.boundary.iter().map(|s| s.map(|v| v + shift)));
        StratifiedComplex::build(
            format!("{}+{}", self.name, other.name),
            self.dim,
            &[],
            &tops,
            skeleta,
            boundary,
        )
        .expect("disjoint union")
    }

    /// Staircase (Eilenberg–Zilber) triangulation of `|X| x |Y|`.
    ///
    /// Vertex `(x, y)` gets id `rank(x) * |V_Y| + rank(y)`, so the canonical
    /// order on product simplices is the staircase order.
    pub fn product(&self, other: &StratifiedComplex) -> Result<StratifiedComplex, ComplexError> {
        for c in [self, other] {
            if !c.is_trivially_filtered() {
                return Err(ComplexError::UnsupportedStratifiedProduct(c.name.clone()));
            }
        }
        let vx = self.vertices();
        let vy = other.vertices();
        let rx: HashMap<Vertex, usize> = vx.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let ry: HashMap<Vertex, usize> = vy.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let id = |x: Vertex, y: Vertex| (rx[&x] * vy.len() + ry[&y]) as Vertex;
        let staircase = |a: &Simplex, b: &Simplex| -> Vec<Simplex> {
            let (p, q) = (a.vertices().len() - 1, b.vertices().len() - 1);
            let mut out = Vec::new();
            // choose which of the p+q steps move in the first factor
            for mask in 0u32..(1 << (p + q)) {
                if mask.count_ones() as usize != p {
                    continue;
                }
                let (mut i, mut j) = (0, 0);
                let mut verts = vec![id(a.vertices()[0], b.vertices()[0])];
                for step in 0..p + q {
                    if mask & (1 << step) != 0 {
                        i += 1;
                    } else {
                        j += 1;
                    }
                    verts.push(id(a.vertices()[i], b.vertices()[j]));
                }
                out.push(Simplex::new(verts));
            }
            out
        };
        let mut tops = Vec::new();
        for a in self.simplices(self.dim) {
            for b in other.simplices(other.dim) {
                tops.extend(staircase(a, b));
            }
        }
        let mut boundary = Vec::new();
        for a in &self.boundary {
            for b in other.simplices(other.dim) {
                boundary.extend(staircase(a, b));
            }
        }
        for a in self.simplices(self.dim) {
            for b in &other.boundary {
                boundary.extend(staircase(a, b));
            }
        }
        StratifiedComplex::build(
            format!("{}x{}", self.name, other.name),
            self.dim + other.dim,
            &[],
            &tops,
            BTreeMap::new(),
            boundary,
        )
    }

    /// Barycentric subdivision. See [`Subdivision`] for the vertex and
    /// stratum correspondences.
    pub fn barycentric_subdivide(&self) -> StratifiedComplex {
        self.subdivide().complex
    }

    /// Barycentric subdivision with its correspondences.
    ///
    /// New vertices are barycentres of old simplices, numbered in order of
    /// increasing dimension of the old simplex (ties broken lexicographically).
    /// In a flag `τ_0 < τ_1 < …` the barycentre of `τ_0`, the most singular
    /// one, therefore comes first.
    pub fn subdivide(&self) -> Subdivision {
        let mut olds: Vec<Simplex> = (0..=self.dim)
            .flat_map(|d| self.simplices(d).iter().cloned())
            .collect();
        olds.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.cmp(b)));
        let ids: HashMap<Simplex, Vertex> = olds
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as Vertex))
            .collect();
        let flags_of = |s: &Simplex| -> Vec<Simplex> {
            let mut out = Vec::new();
            let mut stack = vec![(s.clone(), vec![ids[s]])];
            while let Some((cur, acc)) = stack.pop() {
                if cur.vertices().len() == 1 {
                    out.push(Simplex::new(acc));
                    continue;
                }
                for (_, f) in cur.facets() {
                    let mut a = acc.clone();
                    a.push(ids[&f]);
                    stack.push((f, a));
                }
            }
            out
        };
        let tops: Vec<Simplex> = self
            .simplices(self.dim)
            .iter()
            .flat_map(&flags_of)
            .collect();
        let skeleta = self
            .skeleta
            .iter()
            .map(|(&i, gens)| (i, gens.iter().flat_map(&flags_of).collect()))
            .collect();
        let boundary = self.boundary.iter().flat_map(flags_of).collect();
        let complex = StratifiedComplex::build(
            format!("sd({})", self.name),
            self.dim,
            &[],
            &tops,
            skeleta,
            boundary,
        )
        .expect("subdivision of a well-formed complex");
        let mut stratum_origin = vec![usize::MAX; complex.strata().len()];
        for (old, &v) in &ids {
            let d = old.dim() as usize;
            let old_stratum = self.stratum[d][self.index[d][old]];
            let k = complex.index[0][&Simplex::vertex(v)];
            let new_stratum = complex.stratum[0][k];
            // the barycentre of a simplex of the new stratum's level lies in it
            if complex.level[0][k] == self.level[d][self.index[d][old]] {
                stratum_origin[new_stratum] = old_stratum;
            }
        }
        debug_assert!(stratum_origin.iter().all(|&s| s != usize::MAX));
        let mut vertex_origin = olds;
        vertex_origin.shrink_to_fit();
        Subdivision {
            complex,
            vertex_origin,
            stratum_origin,
        }
    }

    fn fresh_vertex(&self) -> Vertex {
        self.vertices().into_iter().max().map_or(0, |v| v + 1)
    }

    /// Ordinary simplicial boundary matrix `C_d -> C_{d-1}` (no filtration).
    pub fn boundary_matrix(&self, d: usize, field: Field) -> crate::linalg::SparseMatrix {
        let rows = if d == 0 { 0 } else { self.count(d - 1) };
        let mut cols = Vec::with_capacity(self.count(d));
        for s in self.simplices(d) {
            if d == 0 {
                cols.push(SparseVec::new());
                continue;
            }
            cols.push(SparseVec::from_entries(s.facets().map(|(r, f)| {
                (self.index[d - 1][&f], field.sign(r as i64))
            })));
        }
        crate::linalg::SparseMatrix::from_columns(field, rows, cols)
    }
}

/// Barycentric subdivision together with its correspondences.
#[derive(Clone, Debug)]
pub struct Subdivision {
    pub complex: StratifiedComplex,
    /// `vertex_origin[v]` is the old simplex whose barycentre is new vertex `v`.
    pub vertex_origin: Vec<Simplex>,
    /// `stratum_origin[s]` is the old stratum containing new stratum `s`.
    pub stratum_origin: Vec<usize>,
}

/// Coherent signs on the top simplices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation {
    pub field: Field,
    pub signs: Vec<FieldScalar>,
}

impl Orientation {
    /// The fundamental cycle `Σ ε_σ σ` as a chain on top simplices.
    pub fn as_chain(&self) -> SparseVec {
        SparseVec::from_entries(self.signs.iter().cloned().enumerate())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn torus7() -> StratifiedComplex {
        let mut tops = Vec::new();
        for i in 0..7u32 {
            tops.push(Simplex::new([i, (i + 1) % 7, (i + 3) % 7]));
            tops.push(Simplex::new([i, (i + 2) % 7, (i + 3) % 7]));
        }
        StratifiedComplex::from_top_simplices("T2", 2, &tops).unwrap()
    }

    fn rp2() -> StratifiedComplex {
        let t = [
            [1, 2, 3],
            [1, 3, 4],
            [1, 4, 5],
            [1, 5, 6],
            [1, 6, 2],
            [2, 3, 5],
            [3, 4, 6],
            [4, 5, 2],
            [5, 6, 3],
            [6, 2, 4],
        ];
        let tops: Vec<Simplex> = t.iter().map(|s| Simplex::new(s.iter().copied())).collect();
        StratifiedComplex::from_top_simplices("RP2", 2, &tops).unwrap()
    }

    #[test]
    fn sphere_is_valid_with_one_stratum() {
        let s2 = StratifiedComplex::simplex_boundary(2);
        let rep = s2.validate();
        assert!(rep.is_valid(), "{:?}", rep.violations);
        assert_eq!(s2.strata().len(), 1);
        assert_eq!(s2.euler_characteristic(), 2);
    }

    #[test]
    fn lone_triangle_is_not_a_pseudomanifold() {
        let t = StratifiedComplex::from_top_simplices("tri", 2, &[Simplex::new([0, 1, 2])]).unwrap();
        let rep = t.validate();
        assert!(!rep.is_valid());
        assert!(rep
            .violations
            .iter()
            .all(|v| v.kind == ViolationKind::NotPseudomanifold));
        assert_eq!(rep.violations.len(), 3);
    }

    #[test]
    fn suspended_torus_has_three_strata() {
        let st = torus7().suspension();
        let rep = st.validate();
        assert!(rep.is_valid(), "{:?}", rep.violations);
        assert!(rep.is_flag_like());
        assert_eq!(st.strata().len(), 3);
        assert_eq!(st.singular_strata().count(), 2);
        assert!(st.singular_strata().all(|s| s.codim == 3));
        assert_eq!(st.euler_characteristic(), 2);
    }

    #[test]
    fn cone_counts() {
        let c = StratifiedComplex::simplex_boundary(1).cone();
        assert_eq!(c.f_vector(), vec![4, 6, 3]);
        assert!(c.validate().is_valid());
        let apex = c.singular_strata().next().unwrap();
        assert_eq!(apex.codim, 2);

        let pt = StratifiedComplex::from_top_simplices("pt", 0, &[Simplex::vertex(0)]).unwrap();
        let edge = pt.cone();
        assert_eq!(edge.f_vector(), vec![2, 1]);
        assert!(edge.validate().is_valid());

        let ct = torus7().cone();
        assert_eq!(ct.dim(), 3);
        assert_eq!(ct.euler_characteristic(), 1);
        assert!(ct.validate().is_valid());
    }

    #[test]
    fn suspension_counts() {
        let two_points = StratifiedComplex::simplex_boundary(0);
        let circle = two_points.suspension();
        assert_eq!(circle.f_vector(), vec![4, 4]);
        assert_eq!(circle.euler_characteristic(), 0);
        assert!(circle.validate().is_valid());
        let s2 = StratifiedComplex::simplex_boundary(1).suspension();
        assert_eq!(s2.euler_characteristic(), 2);
    }

    #[test]
    fn products() {
        let circle = StratifiedComplex::simplex_boundary(1);
        let pt = StratifiedComplex::from_top_simplices("pt", 0, &[Simplex::vertex(0)]).unwrap();
        let c = circle.product(&pt).unwrap();
        assert_eq!(c.f_vector(), vec![3, 3]);
        let t = circle.product(&circle).unwrap();
        assert_eq!(t.f_vector(), vec![9, 27, 18]);
        assert_eq!(t.euler_characteristic(), 0);
        assert!(t.validate().is_valid());
        let i = StratifiedComplex::standard_simplex(1);
        let sq = i.product(&i).unwrap();
        assert_eq!(sq.count(2), 2);
        assert!(sq.validate().is_valid());
        let err = torus7().suspension().product(&pt).unwrap_err();
        assert!(matches!(err, ComplexError::UnsupportedStratifiedProduct(_)));
    }

    #[test]
    fn subdivision_counts_and_invariants() {
        let e = StratifiedComplex::standard_simplex(1).barycentric_subdivide();
        assert_eq!(e.f_vector(), vec![3, 2]);
        let c = StratifiedComplex::simplex_boundary(1).barycentric_subdivide();
        assert_eq!(c.count(1), 6);
        for x in [torus7(), torus7().suspension(), rp2(), torus7().cone()] {
            let sd = x.subdivide();
            assert_eq!(sd.complex.euler_characteristic(), x.euler_characteristic());
            let rep = sd.complex.validate();
            assert!(rep.is_valid(), "{}: {:?}", x.name(), rep.violations);
            assert!(rep.is_flag_like());
            assert_eq!(sd.complex.strata().len(), x.strata().len());
            for s in sd.complex.strata() {
                assert_eq!(x.strata()[sd.stratum_origin[s.id]].codim, s.codim);
            }
        }
    }

    #[test]
    fn orientations() {
        let s2 = StratifiedComplex::simplex_boundary(2);
        assert!(s2.find_fundamental_cycle(Field::Rational).is_ok());
        assert_eq!(
            rp2().find_fundamental_cycle(Field::Rational),
            Err(OrientationError::NotOrientable(Field::Rational))
        );
        let o = rp2().find_fundamental_cycle(Field::Prime(2)).unwrap();
        assert!(o.signs.iter().all(FieldScalar::is_one));
        assert!(torus7().suspension().find_fundamental_cycle(Field::Rational).is_ok());
        let cone = s2.cone();
        assert_eq!(
            cone.find_fundamental_cycle(Field::Rational),
            Err(OrientationError::HasBoundary)
        );
    }

    #[test]
    fn fundamental_cycle_has_zero_boundary_on_manifolds() {
        for x in [torus7(), StratifiedComplex::simplex_boundary(3)] {
            let o = x.find_fundamental_cycle(Field::Rational).unwrap();
            let d = x.boundary_matrix(x.dim(), Field::Rational);
            assert!(d.mul_vec(&o.as_chain()).is_zero());
        }
    }

    #[test]
    fn filtration_levels() {
        let st = torus7().suspension();
        for d in 0..=3 {
            for k in 0..st.count(d) {
                let s = &st.simplices(d)[k];
                let apex = s.contains_vertex(0) || s.contains_vertex(1);
                assert_eq!(st.is_singular(d, k), d == 0 && apex);
            }
        }
    }
}
