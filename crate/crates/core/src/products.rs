//! Cochains, Alexander–Whitney products, lifts of intersection cochains and
//! the chain-level duality machinery built from them.
//!
//! Ordinary cochains and chains are [`SparseVec`]s indexed by simplices of a
//! fixed dimension. Intersection cochains are coordinate vectors in the dual
//! basis of [`IChainComplex::basis`].
//!
//! Conventions:
//! - `(dα)(x) = (-1)^{|α|+1} α(∂x)`
//! - `(α ∪ β)(σ) = (-1)^{ij} α(front_i σ) β(back_j σ)`
//! - `α ∩ σ = (-1)^{j(m-j)} α(back_j σ) front_{m-j} σ` for `|α| = j`, `|σ| = m`
//!
//! With these, `∂(α ∩ ξ) = dα ∩ ξ + (-1)^j α ∩ ∂ξ`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::complex::{OrientationError, StratifiedComplex};
use crate::field::{Field, FieldScalar};
use crate::ichains::{Homology, HomologyDegree, IChainComplex};
use crate::linalg::{ColumnReduction, SparseMatrix, SparseVec};
use crate::perversity::Perversity;

#[derive(Debug, Error)]
pub enum ProductError {
    #[error(transparent)]
    Orientation(#[from] OrientationError),
    #[error("{0} has singular strata; this operation needs a manifold")]
    NotAManifold(String),
    #[error("class {0} is not in the image of the cap product")]
    NotInImage(usize),
}

/// Sign exponents of a cup/cap convention. Faces are fixed: the cup
/// evaluates its left factor on the front face, and the cap evaluates on the
/// back face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignConvention {
    /// `(-1)^{ij}` in the cup.
    pub cup_koszul: bool,
    /// `(-1)^i` in the cup.
    pub cup_left: bool,
    /// `(-1)^{j(m-j)}` in the cap.
    pub cap_koszul: bool,
    /// `(-1)^{jm}` in the cap.
    pub cap_total: bool,
}

impl SignConvention {
    pub const STANDARD: SignConvention = SignConvention {
        cup_koszul: true,
        cup_left: false,
        cap_koszul: true,
        cap_total: false,
    };

    /// All sixteen combinations, in binary order.
    pub fn family() -> Vec<SignConvention> {
        (0..16u8)
            .map(|b| SignConvention {
                cup_koszul: b & 1 != 0,
                cup_left: b & 2 != 0,
                cap_koszul: b & 4 != 0,
                cap_total: b & 8 != 0,
            })
            .collect()
    }

    fn cup_exponent(&self, i: usize, j: usize) -> i64 {
        (self.cup_koszul as usize * i * j + self.cup_left as usize * i) as i64
    }

    fn cap_exponent(&self, j: usize, m: usize) -> i64 {
        (self.cap_koszul as usize * j * (m - j) + self.cap_total as usize * j * m) as i64
    }

    /// Contract names, in the order they are reported.
    pub const CONTRACTS: [&'static str; 5] =
        ["unit", "leibniz", "augmentation", "cup associativity", "cap associativity"];

    /// Checks each contract on random integer cochains and chains until every
    /// contract has been exercised at least `trials` times (Leibniz needs
    /// `n >= 1`). Returns `(checked, failed)` per contract name.
    pub fn contract_tally<R: Rng>(
        &self,
        x: &StratifiedComplex,
        field: Field,
        trials: usize,
        rng: &mut R,
    ) -> BTreeMap<&'static str, (usize, usize)> {
        let n = x.dim();
        let mut tally: BTreeMap<&'static str, (usize, usize)> =
            Self::CONTRACTS.iter().map(|&c| (c, (0, 0))).collect();
        let mut record = |name: &'static str, ok: bool| {
            let e = tally.get_mut(name).expect("known contract");
            e.0 += 1;
            if !ok {
                e.1 += 1;
            }
        };
        let one = unit_cochain(x, field);
        let cup = |i, a: &SparseVec, j, b: &SparseVec| cup_with(self, x, field, i, a, j, b);
        let cap = |j, a: &SparseVec, m, xi: &SparseVec| cap_with(self, x, field, j, a, m, xi);
        let mut leibniz = 0;
        let mut round = 0;
        while round < trials || (n > 0 && leibniz < trials) {
            round += 1;
            let i = rng.gen_range(0..=n);
            let j = rng.gen_range(0..=n - i);
            let a = random_vec(x.count(i), field, rng);
            let b = random_vec(x.count(j), field, rng);
            record("unit", cup(0, &one, i, &a) == a && cup(i, &a, 0, &one) == a);
            // Leibniz on a pair with room for the coboundary
            if n > 0 {
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(0..n - i);
                let a = random_vec(x.count(i), field, rng);
                let b = random_vec(x.count(j), field, rng);
                let lhs = coboundary(x, field, i + j, &cup(i, &a, j, &b));
                let mut rhs = cup(i + 1, &coboundary(x, field, i, &a), j, &b);
                rhs.add_scaled(&field.sign(i as i64), &cup(i, &a, j + 1, &coboundary(x, field, j, &b)));
                record("leibniz", lhs == rhs);
                leibniz += 1;
            }
            let xi = random_vec(x.count(i), field, rng);
            record("augmentation", aug(&cap(i, &a, i, &xi), field) == a.dot(&xi, field));
            let k = rng.gen_range(0..=n - i - j);
            let c = random_vec(x.count(k), field, rng);
            record(
                "cup associativity",
                cup(i + j, &cup(i, &a, j, &b), k, &c) == cup(i, &a, j + k, &cup(j, &b, k, &c)),
            );
            let m = rng.gen_range(i + j..=n);
            let xi = random_vec(x.count(m), field, rng);
            let lhs = cap(i + j, &cup(i, &a, j, &b), m, &xi);
            let rhs = cap(i, &a, m - j, &cap(j, &b, m, &xi));
            record("cap associativity", lhs == rhs);
        }
        tally
    }

    /// Names of the contracts this convention violates on `x`.
    pub fn contract_failures<R: Rng>(
        &self,
        x: &StratifiedComplex,
        field: Field,
        trials: usize,
        rng: &mut R,
    ) -> Vec<&'static str> {
        let tally = self.contract_tally(x, field, trials, rng);
        Self::CONTRACTS.iter().copied().filter(|c| tally[c].1 > 0).collect()
    }
}

fn random_vec<R: Rng>(len: usize, field: Field, rng: &mut R) -> SparseVec {
    SparseVec::from_entries((0..len).map(|k| (k, field.from_i64(rng.gen_range(-3..=3)))))
}

/// The cochain taking the value 1 on every vertex.
pub fn unit_cochain(x: &StratifiedComplex, field: Field) -> SparseVec {
    SparseVec::from_entries((0..x.count(0)).map(|k| (k, field.one())))
}

pub fn cup_with(
    conv: &SignConvention,
    x: &StratifiedComplex,
    field: Field,
    i: usize,
    alpha: &SparseVec,
    j: usize,
    beta: &SparseVec,
) -> SparseVec {
    let sign = field.sign(conv.cup_exponent(i, j));
    let mut out = Vec::new();
    for (k, s) in x.simplices(i + j).iter().enumerate() {
        let a = alpha.get(x.index_of(&s.front(i)).expect("front face"));
        let b = beta.get(x.index_of(&s.back(j)).expect("back face"));
        if let (Some(a), Some(b)) = (a, b) {
            out.push((k, &(a * b) * &sign));
        }
    }
    SparseVec::from_entries(out)
}

/// `α ∪ β` for an `i`-cochain and a `j`-cochain.
pub fn cup(
    x: &StratifiedComplex,
    field: Field,
    i: usize,
    alpha: &SparseVec,
    j: usize,
    beta: &SparseVec,
) -> SparseVec {
    cup_with(&SignConvention::STANDARD, x, field, i, alpha, j, beta)
}

pub fn cap_with(
    conv: &SignConvention,
    x: &StratifiedComplex,
    field: Field,
    j: usize,
    alpha: &SparseVec,
    m: usize,
    xi: &SparseVec,
) -> SparseVec {
    assert!(j <= m, "cap of a degree-{j} cochain with a degree-{m} chain");
    let sign = field.sign(conv.cap_exponent(j, m));
    let mut out = Vec::new();
    for (k, c) in xi.iter() {
        let s = &x.simplices(m)[k];
        if let Some(a) = alpha.get(x.index_of(&s.back(j)).expect("back face")) {
            let f = x.index_of(&s.front(m - j)).expect("front face");
            out.push((f, &(a * c) * &sign));
        }
    }
    SparseVec::from_entries(out)
}

/// `α ∩ ξ` for a `j`-cochain and an `m`-chain; an `(m - j)`-chain.
pub fn cap(
    x: &StratifiedComplex,
    field: Field,
    j: usize,
    alpha: &SparseVec,
    m: usize,
    xi: &SparseVec,
) -> SparseVec {
    cap_with(&SignConvention::STANDARD, x, field, j, alpha, m, xi)
}

/// Ordinary coboundary of an `i`-cochain.
pub fn coboundary(x: &StratifiedComplex, field: Field, i: usize, alpha: &SparseVec) -> SparseVec {
    if i >= x.dim() {
        return SparseVec::new();
    }
    let bd = x.boundary_matrix(i + 1, field);
    bd.transpose().mul_vec(alpha).scale(&field.sign(i as i64 + 1))
}

/// Sum of the coefficients of a chain (meaningful on 0-chains).
pub fn aug(chain: &SparseVec, field: Field) -> FieldScalar {
    chain.iter().fold(field.zero(), |acc, (_, c)| &acc + c)
}

/// Drops the simplices of a `d`-chain that lie in the singular locus.
pub fn drop_singular(x: &StratifiedComplex, d: usize, chain: &SparseVec) -> SparseVec {
    let mut out = chain.clone();
    out.retain(|k| !x.is_singular(d, k));
    out
}

/// Extension of intersection cochains to ordinary cochains in one degree.
///
/// A lift is supported on a fixed set of pivot simplices on which the basis
/// of `I_d` restricts to an invertible matrix.
#[derive(Clone, Debug)]
pub struct Lift {
    field: Field,
    count: usize,
    pivots: Vec<usize>,
    square: ColumnReduction,
    restriction: SparseMatrix,
    annihilator: Vec<SparseVec>,
}

impl Lift {
    pub fn new(ic: &IChainComplex, d: usize) -> Lift {
        let field = ic.field();
        let count = ic.complex().count(d);
        let restriction = ic.basis_matrix(d).transpose();
        let red = restriction.reduce();
        let pivots = red.independent_columns();
        let square = SparseMatrix::from_columns(
            field,
            restriction.rows(),
            pivots.iter().map(|&k| restriction.column(k).clone()).collect(),
        )
        .reduce();
        let annihilator = red.kernel_basis();
        Lift {
            field,
            count,
            pivots,
            square,
            restriction,
            annihilator,
        }
    }

    /// An ordinary cochain restricting to the given intersection cochain.
    pub fn lift(&self, alpha: &SparseVec) -> SparseVec {
        let y = self.square.solve(alpha).expect("restriction has full rank");
        y.remap(|k| Some(self.pivots[k]))
    }

    /// Restriction of an ordinary cochain to intersection chains.
    pub fn restrict(&self, cochain: &SparseVec) -> SparseVec {
        self.restriction.mul_vec(cochain)
    }

    /// Ordinary cochains vanishing on every intersection chain.
    pub fn annihilator(&self) -> &[SparseVec] {
        &self.annihilator
    }

    pub fn simplex_count(&self) -> usize {
        self.count
    }

    pub fn field(&self) -> Field {
        self.field
    }
}

/// `I_pC^* = Hom(I^pC_*, F)` with `δ_i = (-1)^{i+1} ∂'^T_{i+1}`.
#[derive(Clone, Debug)]
pub struct ICochainComplex {
    field: Field,
    dims: Vec<usize>,
    coboundary: Vec<SparseMatrix>,
    cohomology: Homology,
}

impl ICochainComplex {
    pub fn new(ic: &IChainComplex) -> ICochainComplex {
        let field = ic.field();
        let n = ic.dim();
        let dims = ic.ranks();
        let coboundary: Vec<SparseMatrix> = (0..=n)
            .map(|i| {
                if i == n {
                    SparseMatrix::zeros(field, 0, dims[n])
                } else {
                    ic.boundary(i + 1).transpose().scale(&field.sign(i as i64 + 1))
                }
            })
            .collect();
        // cochain degree i sits in chain degree n - i
        let rdims: Vec<usize> = (0..=n).map(|k| dims[n - k]).collect();
        let rbds: Vec<SparseMatrix> = (0..=n)
            .map(|k| {
                if k == 0 {
                    SparseMatrix::zeros(field, 0, rdims[0])
                } else {
                    coboundary[n - k].clone()
                }
            })
            .collect();
        let cohomology = Homology::compute(field, &rdims, &rbds);
        ICochainComplex {
            field,
            dims,
            coboundary,
            cohomology,
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn rank(&self, i: usize) -> usize {
        self.dims.get(i).copied().unwrap_or(0)
    }

    /// `δ_i : I_pC^i -> I_pC^{i+1}`.
    pub fn coboundary(&self, i: usize) -> &SparseMatrix {
        &self.coboundary[i]
    }

    pub fn degree(&self, i: usize) -> &HomologyDegree {
        &self.cohomology.degrees[self.dim() - i]
    }

    pub fn cohomology_dim(&self, i: usize) -> usize {
        if i > self.dim() {
            0
        } else {
            self.degree(i).dim()
        }
    }

    pub fn cohomology_dims(&self) -> Vec<usize> {
        (0..=self.dim()).map(|i| self.cohomology_dim(i)).collect()
    }

    pub fn representatives(&self, i: usize) -> &[SparseVec] {
        &self.degree(i).representatives
    }

    /// Class coordinates of a cocycle, or `None` if it is not closed.
    pub fn class_of(&self, i: usize, cocycle: &SparseVec) -> Option<SparseVec> {
        self.degree(i).class_of(cocycle)
    }
}

/// Everything attached to one perversity of a duality pair.
#[derive(Clone, Debug)]
pub struct Side {
    pub perversity: Perversity,
    pub chains: IChainComplex,
    pub cochains: ICochainComplex,
    pub homology: Homology,
    pub lifts: Vec<Lift>,
}

impl Side {
    fn new(x: &Arc<StratifiedComplex>, p: &Perversity, field: Field) -> Side {
        let chains = IChainComplex::build(x, p, field);
        let cochains = ICochainComplex::new(&chains);
        let homology = chains.homology();
        let lifts = (0..=x.dim()).map(|d| Lift::new(&chains, d)).collect();
        Side {
            perversity: p.clone(),
            chains,
            cochains,
            homology,
            lifts,
        }
    }

    /// `α(x)` for a cochain in dual coordinates and a chain in `I_d`.
    pub fn evaluate(&self, d: usize, alpha: &SparseVec, chain: &SparseVec) -> Option<FieldScalar> {
        let coords = self.chains.coords(d, chain)?;
        Some(alpha.dot(&coords, self.chains.field()))
    }
}

/// The two halves of a complementary pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Which {
    P,
    Dual,
}

impl Which {
    pub fn other(self) -> Which {
        match self {
            Which::P => Which::Dual,
            Which::Dual => Which::P,
        }
    }
}

/// Outcome of a chain-level certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Certified,
    Failed(String),
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certificate::Certified)
    }
}

/// The duality map in one cohomological degree.
#[derive(Clone, Debug)]
pub struct DualityDegree {
    pub degree: usize,
    /// Lifts actually capped, one per cohomology basis element.
    pub lifts: Vec<SparseVec>,
    /// `(-1)^{in} π(α̃ ∩ Γ)` as simplex chains.
    pub images: Vec<SparseVec>,
    /// Columns are the classes of the images, when they are cycles.
    pub matrix: Option<SparseMatrix>,
    pub certificate: Certificate,
    /// True when the lifts had to be adjusted to land in allowable chains.
    pub repaired: bool,
}

/// The bilinear pairing `ν` in one degree.
#[derive(Clone, Debug)]
pub struct NuDegree {
    pub degree: usize,
    /// `matrix[a][b] = ν(α_a)(β_b)`.
    pub matrix: Vec<Vec<FieldScalar>>,
    pub certificate: Certificate,
}

/// Chain-level data for a complementary pair `(p, Dp)` on an oriented space.
#[derive(Clone, Debug)]
pub struct DualitySetup {
    pub complex: Arc<StratifiedComplex>,
    pub field: Field,
    pub gamma: SparseVec,
    pub p: Side,
    pub dual: Side,
}

impl DualitySetup {
    pub fn new(
        x: &Arc<StratifiedComplex>,
        p: &Perversity,
        field: Field,
    ) -> Result<DualitySetup, ProductError> {
        let gamma = x.find_fundamental_cycle(field)?.as_chain();
        let dp = p.dual();
        Ok(DualitySetup {
            complex: Arc::clone(x),
            field,
            gamma,
            p: Side::new(x, p, field),
            dual: Side::new(x, &dp, field),
        })
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    pub fn side(&self, w: Which) -> &Side {
        match w {
            Which::P => &self.p,
            Which::Dual => &self.dual,
        }
    }

    /// `π(α ∩ Γ)` for an ordinary `i`-cochain.
    pub fn cap_gamma(&self, i: usize, cochain: &SparseVec) -> SparseVec {
        let x = &self.complex;
        let n = x.dim();
        drop_singular(x, n - i, &cap(x, self.field, i, cochain, n, &self.gamma))
    }

    /// Ordinary cochains whose effect on `π(- ∩ Γ)` must be invisible in
    /// homology: the annihilator of `I_i` and lifted coboundaries.
    pub fn perturbations(&self, w: Which, i: usize) -> Vec<SparseVec> {
        let side = self.side(w);
        let mut out: Vec<SparseVec> = side.lifts[i].annihilator().to_vec();
        if i > 0 {
            let d = side.cochains.coboundary(i - 1);
            for k in 0..d.cols() {
                let v = d.column(k);
                if !v.is_zero() {
                    out.push(side.lifts[i].lift(v));
                }
            }
        }
        out
    }

    /// The duality map `I_wH^i -> I^{w'}H_{n-i}` with its certificate.
    pub fn duality(&self, w: Which, i: usize) -> DualityDegree {
        let n = self.dim();
        let j = n - i;
        let field = self.field;
        let side = self.side(w);
        let target = self.side(w.other());
        let sign = field.sign((i * n) as i64);
        let reps = side.cochains.representatives(i);
        let mut lifts: Vec<SparseVec> = reps.iter().map(|a| side.lifts[i].lift(a)).collect();

        let perturb = self.perturbations(w, i);
        let moved: Vec<SparseVec> = perturb
            .iter()
            .map(|v| target.chains.residual(j, &self.cap_gamma(i, v)))
            .collect();
        let mut repaired = false;
        let mut failure = None;
        for (a, lift) in lifts.iter_mut().enumerate() {
            let off = target.chains.residual(j, &self.cap_gamma(i, lift));
            if off.is_zero() {
                continue;
            }
            let m = SparseMatrix::from_columns(field, self.complex.count(j), moved.clone());
            match m.solve(&off.scale(&field.from_i64(-1))) {
                Some(x) => {
                    for (k, c) in x.iter() {
                        lift.add_scaled(c, &perturb[k]);
                    }
                    repaired = true;
                }
                None => {
                    failure.get_or_insert(format!(
                        "no lift of class {a} in degree {i} caps into allowable chains"
                    ));
                }
            }
        }

        let images: Vec<SparseVec> = lifts.iter().map(|l| self.cap_gamma(i, l).scale(&sign)).collect();
        let hom = &target.homology.degrees[j];
        let classes: Option<Vec<SparseVec>> = images
            .iter()
            .map(|c| target.chains.coords(j, c).and_then(|v| hom.class_of(&v)))
            .collect();
        if classes.is_none() && failure.is_none() {
            failure = Some(format!("image of degree {i} is not an intersection cycle"));
        }
        let matrix = classes.map(|cols| SparseMatrix::from_columns(field, hom.dim(), cols));

        if failure.is_none() {
            for (k, v) in moved.iter().enumerate() {
                let ok = v.is_zero()
                    && target
                        .chains
                        .coords(j, &self.cap_gamma(i, &perturb[k]))
                        .is_some_and(|c| hom.is_boundary(&c));
                if !ok {
                    failure = Some(format!(
                        "degree {i}: the image depends on the choice of lift or representative"
                    ));
                    break;
                }
            }
        }
        if failure.is_none() {
            if let Some(m) = &matrix {
                if m.rows() != m.cols() || !m.is_invertible() {
                    failure = Some(format!("degree {i}: induced map is not an isomorphism"));
                }
            }
        }
        DualityDegree {
            degree: i,
            lifts,
            images,
            matrix,
            certificate: failure.map_or(Certificate::Certified, Certificate::Failed),
            repaired,
        }
    }

    /// `ν(α)(β) = (-1)^{ij+n} aug((β̃ ∪ α̃) ∩ Γ)` for `α ∈ I_pH^i`,
    /// `β ∈ I_{Dp}H^{n-i}`, computed on the given lifts.
    pub fn nu_value(&self, i: usize, alpha: &SparseVec, beta: &SparseVec) -> FieldScalar {
        let x = &self.complex;
        let n = x.dim();
        let j = n - i;
        let f = self.field;
        let prod = cup(x, f, j, beta, i, alpha);
        let v = aug(&cap(x, f, n, &prod, n, &self.gamma), f);
        &v * &f.sign((i * j + n) as i64)
    }

    /// `ν` on cohomology bases, certified when every perturbation of either
    /// argument pairs to zero with everything on the other side.
    pub fn nu(&self, i: usize) -> NuDegree {
        let x = &self.complex;
        let n = x.dim();
        let j = n - i;
        let f = self.field;
        let alphas: Vec<SparseVec> = self
            .p
            .cochains
            .representatives(i)
            .iter()
            .map(|a| self.p.lifts[i].lift(a))
            .collect();
        let betas: Vec<SparseVec> = self
            .dual
            .cochains
            .representatives(j)
            .iter()
            .map(|b| self.dual.lifts[j].lift(b))
            .collect();
        let matrix = alphas
            .iter()
            .map(|a| betas.iter().map(|b| self.nu_value(i, a, b)).collect())
            .collect();

        // W[front_j σ, back_i σ] = (-1)^n ε_σ, so ν = b^T W a
        let sign = f.sign(n as i64);
        let mut trip = Vec::new();
        for (k, e) in self.gamma.iter() {
            let s = &x.simplices(n)[k];
            trip.push((
                x.index_of(&s.front(j)).expect("front"),
                x.index_of(&s.back(i)).expect("back"),
                e * &sign,
            ));
        }
        let w = SparseMatrix::from_triplets(f, x.count(j), x.count(i), trip);
        let pa = self.perturbations(Which::P, i);
        let pb = self.perturbations(Which::Dual, j);
        let wa: Vec<SparseVec> = pa.iter().map(|a| w.mul_vec(a)).collect();
        let wt = w.transpose();
        let wb: Vec<SparseVec> = pb.iter().map(|b| wt.mul_vec(b)).collect();
        let certified = wa.iter().all(|v| betas.iter().chain(&pb).all(|b| v.dot(b, f).is_zero()))
            && wb.iter().all(|v| alphas.iter().all(|a| v.dot(a, f).is_zero()));
        NuDegree {
            degree: i,
            matrix,
            certificate: if certified {
                Certificate::Certified
            } else {
                Certificate::Failed(format!(
                    "degree {i}: the pairing depends on the choice of lifts"
                ))
            },
        }
    }

    /// `κ(x)(β) = (-1)^{|x|} β(x)` for a chain in `I^w_j`.
    pub fn kappa_value(&self, w: Which, beta: &SparseVec, j: usize, chain: &SparseVec) -> Option<FieldScalar> {
        let v = self.side(w).evaluate(j, beta, chain)?;
        Some(&v * &self.field.sign(j as i64))
    }

    /// Evaluation of cohomology representatives on homology
    /// representatives: `m[b][a] = α_a(z_b)`. Columns describe the map
    /// `H^i -> Hom(H_i, F)` in the dual basis, i.e. the universal
    /// coefficient isomorphism.
    pub fn uct_matrix(&self, w: Which, i: usize) -> SparseMatrix {
        let side = self.side(w);
        let f = self.field;
        let cycles = &side.homology.degrees[i].representatives;
        let cols = side
            .cochains
            .representatives(i)
            .iter()
            .map(|a| SparseVec::from_entries(cycles.iter().enumerate().map(|(b, z)| (b, a.dot(z, f)))))
            .collect();
        SparseMatrix::from_columns(f, cycles.len(), cols)
    }

    /// `κ' : H^i -> Hom(H_i, F)`, `κ'(α)(x) = α(x)`.
    pub fn kappa_prime_matrix(&self, w: Which, i: usize) -> SparseMatrix {
        self.uct_matrix(w, i)
    }

    /// `κ : H_i -> Hom(H^i, F)`, `κ(x)(α) = (-1)^i α(x)`.
    pub fn kappa_matrix(&self, w: Which, i: usize) -> SparseMatrix {
        self.uct_matrix(w, i).transpose().scale(&self.field.sign(i as i64))
    }
}

/// The double-dual map `f(x)(α) = (-1)^{|α|} α(x)` on `I^pC_*`, in
/// coordinates `f(x) = (-1)^i x`, against `d φ = -∂' φ` on the double dual.
/// Returns the first degree where `f ∂' = d f` fails on a basis element.
pub fn double_dual_defect(ic: &IChainComplex) -> Option<usize> {
    let f = ic.field();
    for i in 1..=ic.dim() {
        let bd = ic.boundary(i);
        for k in 0..ic.rank(i) {
            let x = SparseVec::unit(k, f.one());
            let lhs = bd.mul_vec(&x).scale(&f.sign(i as i64 - 1));
            let rhs = bd.mul_vec(&x.scale(&f.sign(i as i64))).scale(&f.from_i64(-1));
            if lhs != rhs {
                return Some(i);
            }
        }
    }
    None
}

/// Products on the homology and cohomology of an oriented closed manifold.
#[derive(Clone, Debug)]
pub struct ManifoldRing {
    pub setup: DualitySetup,
    cap_inverse: Vec<SparseMatrix>,
}

impl ManifoldRing {
    pub fn new(x: &Arc<StratifiedComplex>, field: Field) -> Result<ManifoldRing, ProductError> {
        if x.singular_strata().next().is_some() {
            return Err(ProductError::NotAManifold(x.name().to_string()));
        }
        let setup = DualitySetup::new(x, &Perversity::zero(x), field)?;
        let n = x.dim();
        let mut cap_inverse = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let c = setup.duality(Which::P, i);
            let m = c
                .matrix
                .expect("manifold caps land in cycles")
                .scale(&field.sign((i * n) as i64));
            cap_inverse.push(m.inverse().expect("cap with the fundamental class is invertible"));
        }
        Ok(ManifoldRing { setup, cap_inverse })
    }

    pub fn dim(&self) -> usize {
        self.setup.dim()
    }

    pub fn field(&self) -> Field {
        self.setup.field
    }

    fn complex(&self) -> &StratifiedComplex {
        &self.setup.complex
    }

    pub fn cohomology_dim(&self, i: usize) -> usize {
        self.setup.p.cochains.cohomology_dim(i)
    }

    pub fn homology_dim(&self, i: usize) -> usize {
        self.setup.p.homology.dim(i)
    }

    fn cocycle(&self, i: usize, class: &SparseVec) -> SparseVec {
        let reps = self.setup.p.cochains.representatives(i);
        let mut out = SparseVec::new();
        for (k, c) in class.iter() {
            out.add_scaled(c, &reps[k]);
        }
        self.setup.p.lifts[i].lift(&out)
    }

    fn cycle(&self, i: usize, class: &SparseVec) -> SparseVec {
        let side = &self.setup.p;
        let reps = &side.homology.degrees[i].representatives;
        let mut out = SparseVec::new();
        for (k, c) in class.iter() {
            out.add_scaled(c, &reps[k]);
        }
        side.chains.chain(i, &out)
    }

    fn homology_class(&self, d: usize, chain: &SparseVec) -> SparseVec {
        let side = &self.setup.p;
        let coords = side.chains.coords(d, chain).expect("ordinary chain");
        side.homology.degrees[d].class_of(&coords).expect("cycle")
    }

    /// Class of the fundamental cycle in `H_n`.
    pub fn fundamental_class(&self) -> SparseVec {
        self.homology_class(self.dim(), &self.setup.gamma)
    }

    /// Cup product of cohomology classes.
    pub fn cup(&self, i: usize, a: &SparseVec, j: usize, b: &SparseVec) -> SparseVec {
        if i + j > self.dim() {
            return SparseVec::new();
        }
        let x = self.complex();
        let prod = cup(x, self.field(), i, &self.cocycle(i, a), j, &self.cocycle(j, b));
        let restricted = self.setup.p.lifts[i + j].restrict(&prod);
        self.setup
            .p
            .cochains
            .class_of(i + j, &restricted)
            .expect("cup of cocycles is a cocycle")
    }

    /// Unit class in `H^0`.
    pub fn unit(&self) -> SparseVec {
        let x = self.complex();
        let one = unit_cochain(x, self.field());
        let r = self.setup.p.lifts[0].restrict(&one);
        self.setup.p.cochains.class_of(0, &r).expect("unit cocycle")
    }

    /// Cap of a cohomology class with a homology class.
    pub fn cap(&self, j: usize, a: &SparseVec, m: usize, x: &SparseVec) -> SparseVec {
        let c = cap(self.complex(), self.field(), j, &self.cocycle(j, a), m, &self.cycle(m, x));
        self.homology_class(m - j, &c)
    }

    /// `D(α) = (-1)^{in} α ∩ Γ` on classes.
    pub fn duality(&self, i: usize, a: &SparseVec) -> SparseVec {
        let n = self.dim();
        let c = self.setup.cap_gamma(i, &self.cocycle(i, a));
        self.homology_class(n - i, &c.scale(&self.field().sign((i * n) as i64)))
    }

    /// Inverse of `α ↦ α ∩ Γ` from `H_{n-i}` to `H^i`.
    pub fn uncap(&self, i: usize, x: &SparseVec) -> SparseVec {
        self.cap_inverse[i].mul_vec(x)
    }

    /// Intersection product `x ⋔ y = (α ∪ β) ∩ Γ` where `α ∩ Γ = x` and
    /// `β ∩ Γ = y`; `x` has degree `n - i`, `y` degree `n - j`.
    pub fn intersect(&self, i: usize, x: &SparseVec, j: usize, y: &SparseVec) -> SparseVec {
        let n = self.dim();
        if i + j > n {
            return SparseVec::new();
        }
        let a = self.uncap(i, x);
        let b = self.uncap(j, y);
        let ab = self.cup(i, &a, j, &b);
        self.cap(i + j, &ab, n, &self.fundamental_class())
    }
}
