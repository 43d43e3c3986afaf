//! Acceptance suite: one PASS/FAIL line per criterion, exact comparisons only.
//!
//! Runs without the libtest harness so the lines always reach stdout.
//! `cargo test --test acceptance` runs it alone.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use ihdual::corpus::{self, CorpusSpace, Kind};
use ihdual::diagrams::{
    cube_prediction, render_json, run_cone_suite, run_suite, DiagramReport, Status, SuiteConfig,
};
use ihdual::field::Field;
use ihdual::ichains::{cone_perversity, IChainComplex};
use ihdual::perversity::{GmName, Perversity};
use ihdual::signcalc::{self, Cell};

const Q: Field = Field::Rational;
const F2: Field = Field::Prime(2);
const SEED: u64 = 0;

struct Verdict {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Verdict {
    Verdict { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Verdict {
    Verdict { ok: false, detail: detail.into() }
}

fn of_diagram<'a>(reports: &'a [DiagramReport], name: &str) -> Vec<&'a DiagramReport> {
    reports.iter().filter(|r| r.diagram == name).collect()
}

fn first_problem(rs: &[&DiagramReport], ok: impl Fn(&Status) -> bool) -> Option<String> {
    rs.iter().find_map(|r| {
        r.entries.iter().find(|e| !ok(&e.status)).map(|e| {
            format!("{} {} [{}] degree {}: {:?}", r.space, r.field, r.perversities.join(" / "), e.degree, e.status)
        })
    })
}

fn ih(x: &Arc<ihdual::complex::StratifiedComplex>, p: &Perversity, f: Field) -> Vec<usize> {
    IChainComplex::build(x, p, f).homology().dims()
}

fn criterion_1(reports: &[DiagramReport]) -> Verdict {
    let rs = of_diagram(reports, "duality-ranks");
    if let Some(p) = first_problem(&rs, |s| *s == Status::ExactCommute) {
        return fail(p);
    }
    // hand-computed anchors
    let st2 = Arc::new(corpus::suspended_torus());
    let t2 = Arc::new(corpus::torus());
    let anchors = [
        (ih(&t2, &Perversity::zero(&t2), Q), vec![1, 2, 1]),
        (ih(&st2, &Perversity::gm(&st2, GmName::Zero), Q), vec![1, 2, 0, 1]),
        (ih(&st2, &Perversity::gm(&st2, GmName::UpperMiddle), Q), vec![1, 0, 2, 1]),
        (ih(&st2, &Perversity::gm(&st2, GmName::Top), F2), vec![1, 0, 2, 1]),
    ];
    for (got, want) in anchors {
        if got != want {
            return fail(format!("anchor ranks {got:?}, expected {want:?}"));
        }
    }
    let pairs: usize = rs.len();
    pass(format!("{pairs} space/field/perversity reports, every degree equal"))
}

fn criterion_2() -> Verdict {
    let links = corpus::cone_links();
    let mut reports = run_cone_suite(&links, Q);
    reports.extend(run_cone_suite(&links, F2));
    let rs: Vec<&DiagramReport> = reports.iter().collect();
    if let Some(p) = first_problem(&rs, |s| *s == Status::ExactCommute) {
        return fail(p);
    }
    // c(∂Δ²) by hand: the apex cuts I^pH_*(S¹) = (1, 1) off at 1 - p(apex)
    let link = corpus::circle();
    let cone = Arc::new(link.cone());
    let p = Perversity::zero(&link);
    for (apex, want) in [(-1, vec![1, 1, 0]), (0, vec![1, 0, 0]), (1, vec![0, 0, 0]), (2, vec![0, 0, 0])] {
        let q = cone_perversity(&link, &cone, &p, apex);
        let got = ih(&cone, &q, Q);
        if got != want {
            return fail(format!("cone on S1, apex {apex}: {got:?}, expected {want:?}"));
        }
    }
    let cases: usize = reports.iter().map(|r| r.entries.len()).sum();
    pass(format!("{} links, {cases} apex cases over q and p:2", links.len()))
}

fn criterion_3(reports: &[DiagramReport], manifolds: usize) -> Verdict {
    let rs = of_diagram(reports, "manifold-degeneration");
    if rs.len() != manifolds {
        return fail(format!("{} degeneration reports for {manifolds} manifold/field pairs", rs.len()));
    }
    if let Some(p) = first_problem(&rs, |s| *s == Status::ExactCommute) {
        return fail(p);
    }
    let mut min = usize::MAX;
    for r in &rs {
        for e in &r.entries {
            if let Some(n) = e.detail.as_deref().and_then(|d| d.strip_suffix(" instances")) {
                min = min.min(n.parse().unwrap_or(0));
            }
        }
    }
    if min < 500 {
        return fail(format!("a contract saw only {min} instances"));
    }
    pass(format!("{} manifold/field pairs, every contract on at least {min} instances", rs.len()))
}

fn criterion_4(reports: &[DiagramReport]) -> Verdict {
    let rs = of_diagram(reports, "triangle-I");
    let required: Vec<&DiagramReport> = rs.iter().copied().filter(|r| r.space == "S2" || r.space == "T2").collect();
    if required.len() != 4 {
        return fail(format!("expected S2 and T2 over q and p:2, found {} reports", required.len()));
    }
    if let Some(p) = first_problem(&required, |s| *s == Status::ExactCommute) {
        return fail(p);
    }
    let counted: Vec<&DiagramReport> = rs.iter().copied().filter(|r| !r.informational).collect();
    if let Some(p) = first_problem(&counted, |s| !matches!(s, Status::DefectWitness { .. })) {
        return fail(p);
    }
    let st2: Vec<&DiagramReport> = rs.iter().copied().filter(|r| r.space == "ST2").collect();
    let certified = st2
        .iter()
        .flat_map(|r| &r.entries)
        .filter(|e| e.status == Status::ExactCommute)
        .count();
    let skipped = st2.iter().flat_map(|r| &r.entries).count() - certified;
    if certified == 0 {
        return fail("no certified ST2 degree");
    }
    pass(format!(
        "S2 and T2 exact in every degree; ST2 exact in {certified} certified degrees, {skipped} uncertified"
    ))
}

fn criterion_5(reports: &[DiagramReport], cfg: &SuiteConfig) -> Verdict {
    let rs = of_diagram(reports, "evaluation-maps");
    if let Some(p) = first_problem(&rs, |s| *s == Status::ExactCommute) {
        return fail(p);
    }
    let want = format!("{} random chains", cfg.samples);
    for r in &rs {
        for e in r.entries.iter().filter(|e| e.degree.ends_with("double-dual")) {
            if e.detail.as_deref() != Some(want.as_str()) {
                return fail(format!("{} {} {}: {:?}", r.space, r.field, e.degree, e.detail));
            }
        }
    }
    pass(format!("{} reports; kappa, kappa', uct invertible; double dual on {want}", rs.len()))
}

fn criterion_6() -> Verdict {
    let outcomes = signcalc::run_trials(Q, &[0, 1, 2, 3], 1000, SEED);
    if outcomes.len() != 32 {
        return fail(format!("{} outcomes, expected 8 identities x 4 values of n", outcomes.len()));
    }
    if let Some(o) = outcomes.iter().find(|o| !o.passed() || o.trials != 1000) {
        return fail(format!(
            "{} at n={}: {} of {} trials fail, first {:?}",
            o.identity.name(),
            o.n,
            o.failures,
            o.trials,
            o.first_failure
        ));
    }
    pass("8 identities x n in 0..=3, 1000 trials each")
}

/// `(f ⊗ f)(α ⊗ β) = (-1)^{n|α|} fα ⊗ fβ`, so a degree `-n` transfer picks up
/// `(-1)^{n|α|}`; in characteristic 2 every sign is `+1`.
fn expected_sign(field: Field, n: usize, pa: i64) -> Cell {
    if field == F2 || (n as i64 * pa) % 2 == 0 {
        Cell::Plus
    } else {
        Cell::Minus
    }
}

fn criterion_7(reports: &[DiagramReport], cfg: &SuiteConfig, manifolds: usize) -> Verdict {
    for f in [Q, F2] {
        for n in 1..=3 {
            let table = cube_prediction(f, n, cfg.sign_trials, cfg.seed);
            let want: BTreeMap<(i64, i64), Cell> =
                [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().map(|k| (k, expected_sign(f, n, k.0))).collect();
            if table != want {
                return fail(format!("predicted table over {f} for n={n}: {table:?}"));
            }
        }
    }
    let rs = of_diagram(reports, "cube-backface");
    if rs.len() != manifolds {
        return fail(format!("{} cube reports for {manifolds} manifold/field pairs", rs.len()));
    }
    if let Some(p) = first_problem(&rs, |s| matches!(s, Status::ExactCommute | Status::UpToSign { .. })) {
        return fail(p);
    }
    let signed = rs
        .iter()
        .flat_map(|r| &r.entries)
        .filter(|e| matches!(e.status, Status::UpToSign { .. }))
        .count();
    if signed == 0 {
        return fail("no odd-dimensional manifold showed the predicted -1");
    }
    pass(format!("{} manifold/field pairs match the transfer sign table; {signed} cells at -1", rs.len()))
}

fn criterion_8(reports: &[DiagramReport]) -> Verdict {
    let rs: Vec<&DiagramReport> =
        of_diagram(reports, "subdivision-stability").into_iter().filter(|r| !r.informational).collect();
    if rs.is_empty() {
        return fail("no flag-like space was checked");
    }
    if let Some(p) = first_problem(&rs, |s| *s == Status::ExactCommute) {
        return fail(p);
    }
    let spaces: std::collections::BTreeSet<&str> = rs.iter().map(|r| r.space.as_str()).collect();
    pass(format!("{} reports over {} flag-like spaces", rs.len(), spaces.len()))
}

fn criterion_9(first: &str, spaces: &[CorpusSpace], cfg: &SuiteConfig) -> Verdict {
    let second = match run_suite(spaces, cfg) {
        Ok(r) => render_json(&r),
        Err(e) => return fail(e),
    };
    if first != second {
        let at = first.bytes().zip(second.bytes()).position(|(a, b)| a != b).unwrap_or(first.len().min(second.len()));
        return fail(format!("reports differ from byte {at}"));
    }
    let a = serde_json::to_string(&signcalc::run_trials(Q, &[1, 2], 50, SEED)).expect("serialize");
    let b = serde_json::to_string(&signcalc::run_trials(Q, &[1, 2], 50, SEED)).expect("serialize");
    if a != b {
        return fail("sign-law outcomes differ between runs");
    }
    pass(format!("{} report bytes identical across two runs", first.len()))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let spaces = corpus::corpus();
    let cfg = SuiteConfig { seed: SEED, ..SuiteConfig::default() };
    let reports = run_suite(&spaces, &cfg).expect("corpus suite runs");
    let rendered = render_json(&reports);
    let manifolds: usize = spaces.iter().filter(|s| s.kind == Kind::Manifold).map(|s| s.fields.len()).sum();

    let verdicts = [
        ("duality ranks", criterion_1(&reports)),
        ("cone formula", criterion_2()),
        ("manifold degeneration", criterion_3(&reports, manifolds)),
        ("triangle I", criterion_4(&reports)),
        ("evaluation maps", criterion_5(&reports, &cfg)),
        ("sign laws", criterion_6()),
        ("cube back face", criterion_7(&reports, &cfg, manifolds)),
        ("subdivision stability", criterion_8(&reports)),
        ("determinism", criterion_9(&rendered, &spaces, &cfg)),
    ];
    let mut failed = 0;
    for (k, (name, v)) in verdicts.iter().enumerate() {
        println!("criterion {} {:<22} {}  {}", k + 1, name, if v.ok { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.ok);
    }
    println!("{} of 9 criteria pass in {:.1?}", 9 - failed, start.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
