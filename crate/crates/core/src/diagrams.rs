//! Homology-level diagram checks over spaces and perversity grids.
//!
//! Every check returns a [`DiagramReport`] whose entries carry an exact
//! status per degree. [`run_suite`] fans the checks out over a rayon pool and
//! returns the reports sorted by key, so the output depends only on the
//! inputs and the seed.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::complex::StratifiedComplex;
use crate::corpus::{self, CorpusSpace, Kind};
use crate::field::{Field, FieldScalar};
use crate::ichains::{betti_numbers, cone_formula_oracle, cone_perversity, IChainComplex};
use crate::linalg::{SparseMatrix, SparseVec};
use crate::perversity::{GmName, Perversity};
use crate::products::{
    double_dual_defect, Certificate, DualitySetup, ICochainComplex, ManifoldRing, SignConvention, Which,
};
use crate::signcalc::{transfer_sign_table, Cell};

/// Outcome for one degree (or degree pair) of a diagram.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Status {
    ExactCommute,
    UpToSign { sign: String },
    DefectWitness { witness: String },
    Skipped { reason: String },
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::ExactCommute => "exact-commute",
            Status::UpToSign { .. } => "up-to-sign",
            Status::DefectWitness { .. } => "defect-witness",
            Status::Skipped { .. } => "skipped",
        }
    }

    fn note(&self) -> &str {
        match self {
            Status::ExactCommute => "",
            Status::UpToSign { sign } => sign,
            Status::DefectWitness { witness } => witness,
            Status::Skipped { reason } => reason,
        }
    }

    fn witness(w: impl Into<String>) -> Status {
        Status::DefectWitness { witness: w.into() }
    }

    fn skipped(r: impl Into<String>) -> Status {
        Status::Skipped { reason: r.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub degree: String,
    #[serde(flatten)]
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagramReport {
    pub diagram: String,
    pub space: String,
    pub field: String,
    pub perversities: Vec<String>,
    /// Witnesses in informational reports do not count as failures.
    pub informational: bool,
    pub entries: Vec<Entry>,
}

impl DiagramReport {
    pub fn new(diagram: &str, space: &str, field: Field, perversities: Vec<String>) -> Self {
        DiagramReport {
            diagram: diagram.to_string(),
            space: space.to_string(),
            field: field.to_string(),
            perversities,
            informational: false,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, degree: impl ToString, status: Status) {
        self.entries.push(Entry { degree: degree.to_string(), status, detail: None });
    }

    pub fn push_detail(&mut self, degree: impl ToString, status: Status, detail: impl Into<String>) {
        self.entries.push(Entry { degree: degree.to_string(), status, detail: Some(detail.into()) });
    }

    pub fn has_witness(&self) -> bool {
        self.entries.iter().any(|e| matches!(e.status, Status::DefectWitness { .. }))
    }

    /// A witness in a non-informational report.
    pub fn is_failure(&self) -> bool {
        !self.informational && self.has_witness()
    }

    pub fn all_skipped(&self) -> bool {
        self.entries.iter().all(|e| matches!(e.status, Status::Skipped { .. }))
    }

    fn key(&self) -> (&str, &str, &str, &[String]) {
        (&self.diagram, &self.space, &self.field, &self.perversities)
    }
}

/// Sorts reports by (diagram, space, field, perversities).
pub fn sort_reports(reports: &mut [DiagramReport]) {
    reports.sort_by(|a, b| a.key().cmp(&b.key()));
}

pub fn render_json(reports: &[DiagramReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
    s.push('\n');
    s
}

pub fn render_tsv(reports: &[DiagramReport]) -> String {
    let mut out = String::from("diagram\tspace\tfield\tperversity\tdegree\tstatus\tnote\tdetail\n");
    for r in reports {
        let diagram = if r.informational { format!("{} (informational)", r.diagram) } else { r.diagram.clone() };
        for e in &r.entries {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                diagram,
                r.space,
                r.field,
                r.perversities.join(" "),
                e.degree,
                e.status.label(),
                e.status.note(),
                e.detail.as_deref().unwrap_or("")
            ));
        }
    }
    out
}

fn sign_text(s: &FieldScalar) -> String {
    s.to_string()
}

fn dims_text(v: &[usize]) -> String {
    v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
}

/// `dim I_pH^i = dim I^pH_i = dim I^{Dp}H_{n-i}`.
pub fn check_duality_ranks(id: &str, x: &Arc<StratifiedComplex>, p: &Perversity, field: Field) -> DiagramReport {
    let dp = p.dual();
    let mut r = DiagramReport::new("duality-ranks", id, field, vec![p.to_string(), dp.to_string()]);
    if let Err(e) = x.find_fundamental_cycle(field) {
        r.push("*", Status::skipped(format!("not a closed oriented pseudomanifold: {e}")));
        return r;
    }
    let n = x.dim();
    let cp = IChainComplex::build(x, p, field);
    let cdp = IChainComplex::build(x, &dp, field);
    let hp = cp.homology().dims();
    let hdp = cdp.homology().dims();
    let cohp = ICochainComplex::new(&cp).cohomology_dims();
    for i in 0..=n {
        let detail = format!("I_pH^{i}={} I^pH_{i}={} I^DpH_{}={}", cohp[i], hp[i], n - i, hdp[n - i]);
        let status = if cohp[i] == hp[i] && hp[i] == hdp[n - i] {
            Status::ExactCommute
        } else {
            Status::witness(detail.clone())
        };
        r.push_detail(i, status, detail);
    }
    r
}

/// `ν(α)(β) = κ(D α)(β)` on basis pairs `α ∈ I_pH^i`, `β ∈ I_{Dp}H^{n-i}`.
/// Degrees whose duality or pairing certificate fails are skipped.
pub fn check_triangle_i(id: &str, s: &DualitySetup) -> DiagramReport {
    let n = s.dim();
    let mut r = DiagramReport::new(
        "triangle-I",
        id,
        s.field,
        vec![s.p.perversity.to_string(), s.dual.perversity.to_string()],
    );
    for i in 0..=n {
        let d = s.duality(Which::P, i);
        let nu = s.nu(i);
        if let Certificate::Failed(why) = &d.certificate {
            r.push(i, Status::skipped(format!("duality map not certified: {why}")));
            continue;
        }
        if let Certificate::Failed(why) = &nu.certificate {
            r.push(i, Status::skipped(format!("pairing not certified: {why}")));
            continue;
        }
        let betas = s.dual.cochains.representatives(n - i);
        let mut witness = None;
        'pairs: for (a, img) in d.images.iter().enumerate() {
            for (b, beta) in betas.iter().enumerate() {
                let k = s.kappa_value(Which::Dual, beta, n - i, img);
                if k.as_ref() != Some(&nu.matrix[a][b]) {
                    witness = Some(format!(
                        "alpha_{a}, beta_{b}: nu={} kappa={}",
                        nu.matrix[a][b],
                        k.map_or("undefined".to_string(), |k| k.to_string())
                    ));
                    break 'pairs;
                }
            }
        }
        let detail = format!("{}x{} pairs{}", d.images.len(), betas.len(), if d.repaired { ", lifts repaired" } else { "" });
        match witness {
            None => r.push_detail(i, Status::ExactCommute, detail),
            Some(w) => r.push_detail(i, Status::witness(w), detail),
        }
    }
    r
}

/// Right square of the main diagram: for `α ∈ I_pH^i`, `β ∈ I_{Dp}H^{n-i}`,
/// `(-1)^{in+n-i} β(α ∩ Γ) = (-1)^n α(β ∩ Γ)`.
pub fn check_verdier_square(id: &str, s: &DualitySetup) -> DiagramReport {
    let n = s.dim();
    let f = s.field;
    let mut r = DiagramReport::new(
        "verdier-square",
        id,
        f,
        vec![s.p.perversity.to_string(), s.dual.perversity.to_string()],
    );
    for i in 0..=n {
        let j = n - i;
        let dp = s.duality(Which::P, i);
        let dd = s.duality(Which::Dual, j);
        let failed = [(&dp.certificate, "p"), (&dd.certificate, "Dp")]
            .into_iter()
            .find_map(|(c, side)| match c {
                Certificate::Failed(why) => Some(format!("{side} duality map not certified: {why}")),
                Certificate::Certified => None,
            });
        if let Some(why) = failed {
            r.push(i, Status::skipped(why));
            continue;
        }
        let alphas = s.p.cochains.representatives(i);
        let betas = s.dual.cochains.representatives(j);
        let mut witness = None;
        'pairs: for (a, alpha) in alphas.iter().enumerate() {
            for (b, beta) in betas.iter().enumerate() {
                // images are (-1)^{in} π(- ∩ Γ); undo that sign on each side
                let lhs = s.dual.evaluate(j, beta, &dp.images[a]).map(|v| &v * &f.sign(j as i64));
                let rhs = s
                    .p
                    .evaluate(i, alpha, &dd.images[b])
                    .map(|v| &v * &f.sign((n + j * n) as i64));
                if lhs.is_none() || lhs != rhs {
                    witness = Some(format!(
                        "alpha_{a}, beta_{b}: {} vs {}",
                        lhs.map_or("undefined".into(), |v| sign_text(&v)),
                        rhs.map_or("undefined".into(), |v| sign_text(&v))
                    ));
                    break 'pairs;
                }
            }
        }
        match witness {
            None => r.push_detail(i, Status::ExactCommute, format!("{}x{} pairs", alphas.len(), betas.len())),
            Some(w) => r.push(i, Status::witness(w)),
        }
    }
    r
}

/// Reruns a certificate-based check on barycentric subdivisions. Degrees
/// skipped at one level are retried on up to `limit` further subdivisions,
/// as long as the subdivided complex has at most `budget` top simplices.
pub fn with_subdivision_retry(
    id: &str,
    setup: &DualitySetup,
    limit: usize,
    budget: usize,
    check: impl Fn(&str, &DualitySetup) -> DiagramReport,
) -> DiagramReport {
    let mut report = check(id, setup);
    let skipped = |r: &DiagramReport| r.entries.iter().any(|e| matches!(e.status, Status::Skipped { .. }));
    let mut x = Arc::clone(&setup.complex);
    let mut p = setup.p.perversity.clone();
    for level in 1..=limit {
        if !skipped(&report) {
            break;
        }
        let sd = x.subdivide();
        let tops = sd.complex.count(sd.complex.dim());
        if tops > budget {
            for e in &mut report.entries {
                if let Status::Skipped { reason } = &mut e.status {
                    reason.push_str(&format!(
                        "; subdivision {level} has {tops} top simplices, over the budget of {budget}"
                    ));
                }
            }
            break;
        }
        p = p.transport(&sd);
        x = Arc::new(sd.complex);
        let Ok(s) = DualitySetup::new(&x, &p, setup.field) else { break };
        let again = check(id, &s);
        for e in &mut report.entries {
            if !matches!(e.status, Status::Skipped { .. }) {
                continue;
            }
            if let Some(n) = again.entries.iter().find(|n| n.degree == e.degree) {
                if matches!(n.status, Status::Skipped { .. }) {
                    if let Status::Skipped { reason } = &mut e.status {
                        reason.push_str(&format!("; still uncertified after {level} subdivision(s)"));
                    }
                } else {
                    let detail = n.detail.clone().unwrap_or_default();
                    *e = Entry {
                        degree: n.degree.clone(),
                        status: n.status.clone(),
                        detail: Some(format!("after {level} subdivision(s); {detail}")),
                    };
                }
            }
        }
    }
    report
}

fn random_coords<R: Rng>(len: usize, field: Field, rng: &mut R) -> SparseVec {
    if len == 0 {
        return SparseVec::new();
    }
    SparseVec::from_entries((0..4).map(|_| (rng.gen_range(0..len), field.from_i64(rng.gen_range(-3..=3)))))
}

fn invertible(m: &SparseMatrix) -> bool {
    m.rows() == m.cols() && (m.rows() == 0 || m.is_invertible())
}

/// `κ`, `κ'` and the universal-coefficient map are isomorphisms on both
/// sides in every degree; the double-dual map is a degree-0 chain map,
/// checked on every basis chain and on `samples` random chains.
pub fn check_evaluation_maps<R: Rng>(id: &str, s: &DualitySetup, samples: usize, rng: &mut R) -> DiagramReport {
    let n = s.dim();
    let f = s.field;
    let mut r = DiagramReport::new(
        "evaluation-maps",
        id,
        f,
        vec![s.p.perversity.to_string(), s.dual.perversity.to_string()],
    );
    for w in [Which::P, Which::Dual] {
        let tag = if w == Which::P { "p" } else { "Dp" };
        for i in 0..=n {
            let bad: Vec<&str> = [
                ("uct", s.uct_matrix(w, i)),
                ("kappa'", s.kappa_prime_matrix(w, i)),
                ("kappa", s.kappa_matrix(w, i)),
            ]
            .iter()
            .filter(|(_, m)| !invertible(m))
            .map(|(name, _)| *name)
            .collect();
            let dim = s.side(w).homology.dim(i);
            if bad.is_empty() {
                r.push_detail(format!("{tag}:{i}"), Status::ExactCommute, format!("rank {dim}"));
            } else {
                r.push(format!("{tag}:{i}"), Status::witness(format!("not invertible: {}", bad.join(", "))));
            }
        }
        let ic = &s.side(w).chains;
        if let Some(d) = double_dual_defect(ic) {
            r.push(format!("{tag}:double-dual"), Status::witness(format!("chain-map identity fails in degree {d}")));
            continue;
        }
        let mut witness = None;
        let mut tried = 0;
        for _ in 0..samples {
            let i = rng.gen_range(1..=n.max(1));
            if i > n {
                break;
            }
            let x = random_coords(ic.rank(i), f, rng);
            let bd = ic.boundary(i);
            // f(x) = (-1)^i x and dφ = -∂'φ on the double dual
            let lhs = bd.mul_vec(&x).scale(&f.sign(i as i64 - 1));
            let rhs = bd.mul_vec(&x.scale(&f.sign(i as i64))).scale(&f.from_i64(-1));
            tried += 1;
            if lhs != rhs {
                witness = Some(format!("degree {i}"));
                break;
            }
        }
        match witness {
            None => r.push_detail(
                format!("{tag}:double-dual"),
                Status::ExactCommute,
                format!("{tried} random chains"),
            ),
            Some(wt) => r.push(format!("{tag}:double-dual"), Status::witness(wt)),
        }
    }
    r
}

/// Intersection homology dimensions before and after one barycentric subdivision.
pub fn check_subdivision_stability(id: &str, x: &Arc<StratifiedComplex>, p: &Perversity, field: Field) -> DiagramReport {
    let mut r = DiagramReport::new("subdivision-stability", id, field, vec![p.to_string()]);
    r.informational = !x.validate().is_flag_like();
    let before = IChainComplex::build(x, p, field).homology().dims();
    let sd = x.subdivide();
    let q = p.transport(&sd);
    let after = IChainComplex::build(&Arc::new(sd.complex), &q, field).homology().dims();
    for (i, (a, b)) in before.iter().zip(&after).enumerate() {
        let detail = format!("{a} -> {b}");
        if a == b {
            r.push_detail(i, Status::ExactCommute, detail);
        } else {
            r.push(i, Status::witness(detail));
        }
    }
    r
}

/// Trivially stratified spaces: `I^pH_*` is ordinary homology for every
/// perversity, and the cochain products meet their contracts on at least
/// `trials` random instances each.
pub fn check_degeneration<R: Rng>(
    id: &str,
    x: &Arc<StratifiedComplex>,
    perversities: &[Perversity],
    field: Field,
    trials: usize,
    rng: &mut R,
) -> DiagramReport {
    let mut r = DiagramReport::new("manifold-degeneration", id, field, perversities.iter().map(|p| p.to_string()).collect());
    if x.singular_strata().next().is_some() {
        r.push("*", Status::skipped("space has singular strata"));
        return r;
    }
    let ordinary = betti_numbers(x, field);
    for p in perversities {
        let ih = IChainComplex::build(x, p, field).homology().dims();
        let detail = format!("{} vs ordinary {}", dims_text(&ih), dims_text(&ordinary));
        if ih == ordinary {
            r.push_detail(format!("homology:{}", p.name()), Status::ExactCommute, detail);
        } else {
            r.push(format!("homology:{}", p.name()), Status::witness(detail));
        }
    }
    let tally = SignConvention::STANDARD.contract_tally(x, field, trials, rng);
    for c in SignConvention::CONTRACTS {
        let (checked, failed) = tally[c];
        let detail = format!("{checked} instances");
        if failed == 0 && checked >= trials {
            r.push_detail(c, Status::ExactCommute, detail);
        } else if failed == 0 {
            r.push(c, Status::skipped(format!("only {checked} instances possible in dimension {}", x.dim())));
        } else {
            r.push_detail(c, Status::witness(format!("{failed} of {checked} instances fail")), detail);
        }
    }
    r
}

/// Sign table predicted for a degree `-n` transfer, keyed by degree parities.
pub fn cube_prediction(field: Field, n: usize, trials: usize, seed: u64) -> BTreeMap<(i64, i64), Cell> {
    transfer_sign_table(field, -(n as i64), trials, seed)
}

/// Back face of the product cube on a closed manifold: compares `D(α ∪ β)`
/// with `⋔((D ⊗ D)(α ⊗ β)) = (-1)^{ni} Dα ⋔ Dβ` on basis classes and
/// matches the observed sign per `(i, j)` against `prediction`.
pub fn check_cube_backface(id: &str, ring: &ManifoldRing, prediction: &BTreeMap<(i64, i64), Cell>) -> DiagramReport {
    let n = ring.dim();
    let f = ring.field();
    let mut r = DiagramReport::new("cube-backface", id, f, vec![Perversity::zero(&ring.setup.complex).to_string()]);
    for i in 0..=n {
        for j in 0..=n - i {
            let key = format!("{i},{j}");
            let predicted = prediction.get(&((i % 2) as i64, (j % 2) as i64)).copied();
            let Some(predicted @ (Cell::Plus | Cell::Minus)) = predicted else {
                r.push(key, Status::skipped("no sign predicted for these parities"));
                continue;
            };
            let mut observed = Cell::Vanishes;
            let mut witness = None;
            for a in 0..ring.cohomology_dim(i) {
                for b in 0..ring.cohomology_dim(j) {
                    let ea = SparseVec::unit(a, f.one());
                    let eb = SparseVec::unit(b, f.one());
                    let lhs = ring.duality(i + j, &ring.cup(i, &ea, j, &eb));
                    let rhs = ring
                        .intersect(i, &ring.duality(i, &ea), j, &ring.duality(j, &eb))
                        .scale(&f.sign((n * i) as i64));
                    let c = Cell::of(&lhs, &rhs, f);
                    observed = observed.merge(c);
                    if witness.is_none() && !c.agrees_with(predicted) {
                        witness = Some(format!("alpha_{a}, beta_{b}: observed {c}, predicted {predicted}"));
                    }
                }
            }
            let detail = format!("observed {observed}, predicted {predicted}");
            match (witness, observed) {
                (Some(w), _) => r.push_detail(key, Status::witness(w), detail),
                (None, Cell::Minus) => r.push_detail(key, Status::UpToSign { sign: "-1".into() }, detail),
                (None, _) => r.push_detail(key, Status::ExactCommute, detail),
            }
        }
    }
    r
}

/// `I^pH_*(cL)` against the cone formula for every apex value in `[-1, n]`.
pub fn check_cone_formula(id: &str, link: &StratifiedComplex, p: &Perversity, field: Field) -> DiagramReport {
    let cone = Arc::new(link.cone());
    let n = cone.dim();
    let mut r = DiagramReport::new("cone-formula", id, field, vec![p.to_string()]);
    let link_ih = IChainComplex::build(&Arc::new(link.clone()), p, field).homology().dims();
    for apex in -1..=n as i64 {
        let q = cone_perversity(link, &cone, p, apex);
        let got = IChainComplex::build(&cone, &q, field).homology().dims();
        let want = cone_formula_oracle(&link_ih, n, apex);
        let detail = format!("{} (oracle {})", dims_text(&got), dims_text(&want));
        let degree = format!("apex={apex}");
        if got == want {
            r.push_detail(degree, Status::ExactCommute, detail);
        } else {
            r.push(degree, Status::witness(detail));
        }
    }
    r
}

/// Which checks a suite run performs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Diagram {
    DualityRanks,
    TriangleI,
    VerdierSquare,
    EvaluationMaps,
    SubdivisionStability,
    ManifoldDegeneration,
    CubeBackface,
}

impl Diagram {
    pub const ALL: [Diagram; 7] = [
        Diagram::DualityRanks,
        Diagram::TriangleI,
        Diagram::VerdierSquare,
        Diagram::EvaluationMaps,
        Diagram::SubdivisionStability,
        Diagram::ManifoldDegeneration,
        Diagram::CubeBackface,
    ];
}

/// How perversities are chosen for each space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PerversityChoice {
    /// [`corpus::perversity_grid`].
    Grid,
    Gm(GmName),
    /// Explicit `{stratum id: value}` table.
    Table(BTreeMap<usize, i64>),
}

impl PerversityChoice {
    pub fn resolve(&self, x: &StratifiedComplex, seed: u64) -> Result<Vec<Perversity>, String> {
        match self {
            PerversityChoice::Grid => Ok(corpus::perversity_grid(x, seed)),
            PerversityChoice::Gm(g) => Ok(vec![Perversity::gm(x, *g)]),
            PerversityChoice::Table(t) => Perversity::from_table(x, "table", t)
                .map(|p| vec![p])
                .map_err(|e| e.to_string()),
        }
    }
}

/// One subdivision of the suspended torus (672 top simplices) fits; the
/// second (16128) takes tens of seconds per perversity pair and does not.
pub const DEFAULT_SUBDIV_BUDGET: usize = 2000;

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    /// Restricts every space to this field; `None` uses each space's own list.
    pub field: Option<Field>,
    pub perversity: PerversityChoice,
    pub seed: u64,
    /// Random chains per side for the double-dual check.
    pub samples: usize,
    /// Minimum random instances per product contract.
    pub contract_trials: usize,
    /// Randomized transfers behind each cube sign prediction.
    pub sign_trials: usize,
    /// Subdivisions tried for degrees whose certificates fail.
    pub subdiv_limit: usize,
    /// Largest subdivided complex (in top simplices) a retry may build.
    pub subdiv_budget: usize,
    pub diagrams: Vec<Diagram>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            field: None,
            perversity: PerversityChoice::Grid,
            seed: 0,
            samples: 1000,
            contract_trials: 500,
            sign_trials: 20,
            subdiv_limit: 2,
            subdiv_budget: DEFAULT_SUBDIV_BUDGET,
            diagrams: Diagram::ALL.to_vec(),
        }
    }
}

enum Job {
    Pair { space: usize, field: Field, p: Perversity },
    Subdivision { space: usize, field: Field, p: Perversity },
    Degeneration { space: usize, field: Field, ps: Vec<Perversity> },
    Cube { space: usize, field: Field },
}

fn job_rng(seed: u64, job: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (job as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Runs the selected diagrams over `spaces`.
pub fn run_suite(spaces: &[CorpusSpace], cfg: &SuiteConfig) -> Result<Vec<DiagramReport>, String> {
    let wants = |d: Diagram| cfg.diagrams.contains(&d);
    let mut jobs = Vec::new();
    for (k, s) in spaces.iter().enumerate() {
        let fields = match cfg.field {
            Some(f) => vec![f],
            None => s.fields.clone(),
        };
        let ps = cfg.perversity.resolve(&s.complex, cfg.seed)?;
        for &field in &fields {
            let pair = [Diagram::DualityRanks, Diagram::TriangleI, Diagram::VerdierSquare, Diagram::EvaluationMaps];
            if pair.iter().any(|&d| wants(d)) {
                for p in &ps {
                    jobs.push(Job::Pair { space: k, field, p: p.clone() });
                }
            }
            if wants(Diagram::SubdivisionStability) {
                for p in &ps {
                    jobs.push(Job::Subdivision { space: k, field, p: p.clone() });
                }
            }
            if s.kind == Kind::Manifold {
                if wants(Diagram::ManifoldDegeneration) {
                    jobs.push(Job::Degeneration { space: k, field, ps: ps.clone() });
                }
                if wants(Diagram::CubeBackface) {
                    jobs.push(Job::Cube { space: k, field });
                }
            }
        }
    }

    let mut predictions: BTreeMap<(Field, usize), BTreeMap<(i64, i64), Cell>> = BTreeMap::new();
    for j in &jobs {
        if let Job::Cube { space, field } = j {
            let n = spaces[*space].complex.dim();
            predictions
                .entry((*field, n))
                .or_insert_with(|| cube_prediction(*field, n, cfg.sign_trials, cfg.seed));
        }
    }

    let mut reports: Vec<DiagramReport> = jobs
        .par_iter()
        .enumerate()
        .flat_map_iter(|(idx, job)| {
            let mut rng = job_rng(cfg.seed, idx);
            let mut out = Vec::new();
            match job {
                Job::Pair { space, field, p } => {
                    let s = &spaces[*space];
                    if wants(Diagram::DualityRanks) {
                        out.push(check_duality_ranks(&s.id, &s.complex, p, *field));
                    }
                    let rest = [Diagram::TriangleI, Diagram::VerdierSquare, Diagram::EvaluationMaps];
                    if rest.iter().any(|&d| wants(d)) {
                        match DualitySetup::new(&s.complex, p, *field) {
                            Ok(setup) => {
                                if wants(Diagram::TriangleI) {
                                    let mut r = with_subdivision_retry(
                                        &s.id,
                                        &setup,
                                        cfg.subdiv_limit,
                                        cfg.subdiv_budget,
                                        check_triangle_i,
                                    );
                                    r.informational = s.kind == Kind::NonNormal;
                                    out.push(r);
                                }
                                if wants(Diagram::VerdierSquare) {
                                    let mut r = with_subdivision_retry(
                                        &s.id,
                                        &setup,
                                        cfg.subdiv_limit,
                                        cfg.subdiv_budget,
                                        check_verdier_square,
                                    );
                                    r.informational = s.kind == Kind::NonNormal;
                                    out.push(r);
                                }
                                if wants(Diagram::EvaluationMaps) {
                                    out.push(check_evaluation_maps(&s.id, &setup, cfg.samples, &mut rng));
                                }
                            }
                            Err(e) => {
                                for (d, name) in [
                                    (Diagram::TriangleI, "triangle-I"),
                                    (Diagram::VerdierSquare, "verdier-square"),
                                    (Diagram::EvaluationMaps, "evaluation-maps"),
                                ] {
                                    if wants(d) {
                                        let mut r = DiagramReport::new(name, &s.id, *field, vec![p.to_string()]);
                                        r.push("*", Status::skipped(e.to_string()));
                                        out.push(r);
                                    }
                                }
                            }
                        }
                    }
                }
                Job::Subdivision { space, field, p } => {
                    let s = &spaces[*space];
                    out.push(check_subdivision_stability(&s.id, &s.complex, p, *field));
                }
                Job::Degeneration { space, field, ps } => {
                    let s = &spaces[*space];
                    out.push(check_degeneration(&s.id, &s.complex, ps, *field, cfg.contract_trials, &mut rng));
                }
                Job::Cube { space, field } => {
                    let s = &spaces[*space];
                    let pred = &predictions[&(*field, s.complex.dim())];
                    match ManifoldRing::new(&s.complex, *field) {
                        Ok(ring) => out.push(check_cube_backface(&s.id, &ring, pred)),
                        Err(e) => {
                            let mut r = DiagramReport::new("cube-backface", &s.id, *field, Vec::new());
                            r.push("*", Status::skipped(e.to_string()));
                            out.push(r);
                        }
                    }
                }
            }
            out
        })
        .collect();
    sort_reports(&mut reports);
    Ok(reports)
}

/// Cone-formula reports for the corpus links: every GM perversity on the
/// link (just the zero perversity for unstratified links), all apex values.
pub fn run_cone_suite(links: &[(&str, StratifiedComplex)], field: Field) -> Vec<DiagramReport> {
    let mut jobs = Vec::new();
    for (id, l) in links {
        let mut ps: Vec<Perversity> = Vec::new();
        for g in GmName::ALL {
            let p = Perversity::gm(l, g);
            if !ps.iter().any(|q| q.table() == p.table()) {
                ps.push(p);
            }
        }
        for p in ps {
            jobs.push((*id, l, p));
        }
    }
    let mut reports: Vec<DiagramReport> =
        jobs.par_iter().map(|(id, l, p)| check_cone_formula(id, l, p, field)).collect();
    sort_reports(&mut reports);
    reports
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_triangle_and_ranks() {
        let x = Arc::new(corpus::tetrahedron_sphere());
        let p = Perversity::zero(&x);
        let s = DualitySetup::new(&x, &p, Field::Rational).unwrap();
        let t = check_triangle_i("S2", &s);
        assert!(t.entries.iter().all(|e| e.status == Status::ExactCommute), "{t:?}");
        let v = check_verdier_square("S2", &s);
        assert!(v.entries.iter().all(|e| e.status == Status::ExactCommute), "{v:?}");
        let r = check_duality_ranks("S2", &x, &p, Field::Rational);
        assert!(!r.has_witness());
    }

    #[test]
    fn cone_over_circle() {
        let r = check_cone_formula("S1", &corpus::circle(), &Perversity::zero(&corpus::circle()), Field::Rational);
        assert_eq!(r.entries.len(), 4);
        assert!(!r.has_witness(), "{r:?}");
    }

    #[test]
    fn three_sphere_cube_sign() {
        let x = Arc::new(corpus::three_sphere());
        let ring = ManifoldRing::new(&x, Field::Rational).unwrap();
        let pred = cube_prediction(Field::Rational, 3, 10, 0);
        let r = check_cube_backface("S3", &ring, &pred);
        assert!(!r.has_witness(), "{r:?}");
        let e = r.entries.iter().find(|e| e.degree == "3,0").unwrap();
        assert_eq!(e.status, Status::UpToSign { sign: "-1".into() });
    }

    #[test]
    fn tsv_has_one_line_per_entry() {
        let mut r = DiagramReport::new("d", "x", Field::Rational, vec!["p".into()]);
        r.push(0, Status::ExactCommute);
        r.push(1, Status::skipped("why"));
        assert_eq!(render_tsv(&[r]).lines().count(), 3);
    }
}
