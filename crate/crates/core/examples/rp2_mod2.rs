//! The projective plane is only orientable mod 2: homology and the duality
//! diagrams over F_2, and the missing fundamental class over Q.

use ihdual::corpus;
use ihdual::diagrams::{render_tsv, run_suite, SuiteConfig};
use ihdual::field::Field;
use ihdual::ichains::betti_numbers;

fn main() {
    let s = corpus::space("RP2").expect("corpus space");
    println!("over q:   {:?}", betti_numbers(&s.complex, Field::Rational));
    println!("over p:2: {:?}", betti_numbers(&s.complex, Field::Prime(2)));
    if let Err(e) = s.complex.find_fundamental_cycle(Field::Rational) {
        println!("no rational fundamental class: {e}");
    }
    let reports = run_suite(&[s], &SuiteConfig::default()).expect("suite runs");
    print!("{}", render_tsv(&reports));
}
