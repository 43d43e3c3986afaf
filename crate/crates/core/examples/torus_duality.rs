//! Poincaré duality on the 7-vertex torus: ranks, the pairing matrix in
//! degree 1, and the duality map written as a matrix on classes.

use std::sync::Arc;

use ihdual::corpus;
use ihdual::field::Field;
use ihdual::products::{DualitySetup, Which};
use ihdual::perversity::Perversity;

fn main() {
    let x = Arc::new(corpus::torus());
    let p = Perversity::zero(&x);
    let setup = DualitySetup::new(&x, &p, Field::Rational).expect("the torus is oriented");
    let n = setup.dim();
    for i in 0..=n {
        let d = setup.duality(Which::P, i);
        let nu = setup.nu(i);
        println!("degree {i}: H^{i} has rank {}, certificate {:?}", d.images.len(), d.certificate);
        if let Some(m) = &d.matrix {
            println!("  D as a matrix: {:?}", (0..m.cols()).map(|c| m.column(c).clone()).collect::<Vec<_>>());
        }
        let rows: Vec<Vec<String>> = nu.matrix.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect();
        println!("  pairing: {rows:?}");
    }
}
