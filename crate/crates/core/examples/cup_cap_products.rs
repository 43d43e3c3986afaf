//! Cup, cap and intersection products on the cohomology of a closed manifold.

use std::sync::Arc;

use ihdual::corpus;
use ihdual::field::Field;
use ihdual::linalg::SparseVec;
use ihdual::products::ManifoldRing;

fn main() {
    let x = Arc::new(corpus::staircase_three_torus());
    let f = Field::Rational;
    let ring = ManifoldRing::new(&x, f).expect("oriented closed manifold");
    let e = |a| SparseVec::unit(a, f.one());
    println!("cohomology ranks: {:?}", (0..=3).map(|i| ring.cohomology_dim(i)).collect::<Vec<_>>());
    for a in 0..3 {
        for b in 0..3 {
            println!("e{a} ∪ e{b} = {:?}", ring.cup(1, &e(a), 1, &e(b)));
        }
    }
    let triple = ring.cup(2, &ring.cup(1, &e(0), 1, &e(1)), 1, &e(2));
    println!("e0 ∪ e1 ∪ e2 = {triple:?}");
    let top = ring.duality(3, &triple);
    println!("D(e0 ∪ e1 ∪ e2) = {top:?} in H_0");
    let d0 = ring.duality(1, &e(0));
    let d1 = ring.duality(1, &e(1));
    println!("D(e0) ⋔ D(e1) = {:?}", ring.intersect(1, &d0, 1, &d1));
    println!("D(e0 ∪ e1)   = {:?}", ring.duality(2, &ring.cup(1, &e(0), 1, &e(1))));
}
