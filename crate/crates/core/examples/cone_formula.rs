//! Intersection homology of a cone against the truncation formula, for every
//! apex value.

use std::sync::Arc;

use ihdual::corpus;
use ihdual::field::Field;
use ihdual::ichains::{cone_formula_oracle, cone_perversity, IChainComplex};
use ihdual::perversity::Perversity;

fn main() {
    for (name, link) in corpus::cone_links() {
        let l = Arc::new(link.clone());
        let p = Perversity::zero(&l);
        let lh = IChainComplex::build(&l, &p, Field::Rational).homology().dims();
        let cone = Arc::new(link.cone());
        let n = cone.dim();
        println!("c({name}), link homology {lh:?}");
        for apex in -1..=n as i64 {
            let q = cone_perversity(&link, &cone, &p, apex);
            let got = IChainComplex::build(&cone, &q, Field::Rational).homology().dims();
            let want = cone_formula_oracle(&lh, n, apex);
            println!("  apex {apex:>2}: {got:?} {}", if got == want { "matches" } else { "DIFFERS" });
        }
    }
}
