//! The suspended torus: a pseudomanifold with two isolated singular points.
//! Prints the homology for every GM perversity, then runs the duality
//! diagrams and shows which degrees carry a chain-level certificate.

use ihdual::corpus;
use ihdual::diagrams::{render_tsv, run_suite, Diagram, PerversityChoice, SuiteConfig};
use ihdual::field::Field;
use ihdual::ichains::IChainComplex;
use ihdual::perversity::{GmName, Perversity};

fn main() {
    let s = corpus::space("ST2").expect("corpus space");
    for g in GmName::ALL {
        let p = Perversity::gm(&s.complex, g);
        let h = IChainComplex::build(&s.complex, &p, Field::Rational).homology().dims();
        println!("{p}: {h:?}");
    }
    let cfg = SuiteConfig {
        field: Some(Field::Rational),
        perversity: PerversityChoice::Gm(GmName::Zero),
        subdiv_limit: 0,
        diagrams: vec![Diagram::TriangleI, Diagram::VerdierSquare],
        ..SuiteConfig::default()
    };
    let reports = run_suite(&[s], &cfg).expect("suite runs");
    print!("{}", render_tsv(&reports));
}
