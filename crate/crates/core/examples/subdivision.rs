//! Barycentric subdivision with perversities carried along: sizes grow,
//! intersection homology does not.

use std::sync::Arc;

use ihdual::corpus;
use ihdual::field::Field;
use ihdual::ichains::IChainComplex;
use ihdual::perversity::{GmName, Perversity};

fn main() {
    let mut x = Arc::new(corpus::suspended_torus());
    let mut p = Perversity::gm(&x, GmName::UpperMiddle);
    for level in 0..2 {
        let h = IChainComplex::build(&x, &p, Field::Rational).homology().dims();
        println!("level {level}: f-vector {:?}, flag-like {}, I^pH {h:?}", x.f_vector(), x.validate().is_flag_like());
        let sd = x.subdivide();
        p = p.transport(&sd);
        x = Arc::new(sd.complex);
    }
}
