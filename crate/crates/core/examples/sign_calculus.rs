//! Randomized checks of the sign laws for moving a product across a
//! degree-n isomorphism, plus the sign table the cube check predicts.

use ihdual::field::Field;
use ihdual::signcalc::{run_trials, transfer_sign_table};

fn main() {
    for o in run_trials(Field::Rational, &[0, 1, 2, 3], 200, 0) {
        println!("n={} {:<28} {}/{} pass", o.n, o.identity.name(), o.trials - o.failures, o.trials);
    }
    for n in 0..4 {
        println!("degree -{n} transfer signs by (|a|, |b|) parity: {:?}", transfer_sign_table(Field::Rational, -n, 20, 0));
    }
}
