//! The sign laws on real data: the cohomology ring of a corpus manifold and
//! its duality map, fed through the transfer machinery as a degree `-n`
//! isomorphism onto homology.

use std::sync::Arc;

use ihdual::complex::StratifiedComplex;
use ihdual::corpus;
use ihdual::field::Field;
use ihdual::linalg::{SparseMatrix, SparseVec};
use ihdual::products::ManifoldRing;
use ihdual::signcalc::{dold_bullet, DegreeNIso, GradedComplex, GradedProduct, Identity, Instance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Transported {
    ring: ManifoldRing,
    offsets: Vec<usize>,
    inst: Instance,
}

fn transported(x: StratifiedComplex, field: Field) -> Transported {
    let x = Arc::new(x);
    let ring = ManifoldRing::new(&x, field).expect("oriented closed manifold");
    let n = ring.dim();
    let dims: Vec<usize> = (0..=n).map(|i| ring.cohomology_dim(i)).collect();
    let mut offsets = vec![0];
    for d in &dims {
        offsets.push(offsets.last().unwrap() + d);
    }
    let total = offsets[n + 1];
    let degrees: Vec<i64> = (0..=n).flat_map(|i| std::iter::repeat_n(i as i64, dims[i])).collect();
    let basis = |a: usize| SparseVec::unit(a, field.one());
    let embed = |i: usize, v: &SparseVec| v.remap(|k| Some(offsets[i] + k));

    let a = GradedComplex::new(field, degrees.clone(), SparseMatrix::zeros(field, total, total)).unwrap();
    let mut table = vec![vec![SparseVec::new(); total]; total];
    for i in 0..=n {
        for j in 0..=n - i {
            for x in 0..dims[i] {
                for y in 0..dims[j] {
                    table[offsets[i] + x][offsets[j] + y] = embed(i + j, &ring.cup(i, &basis(x), j, &basis(y)));
                }
            }
        }
    }
    let algebra = GradedProduct { complex: a.clone(), degree: 0, table, unit: Some(embed(0, &ring.unit())) };

    // homology basis in the same slots: H_{n-i} sits at degree i - n
    let target = GradedComplex::new(
        field,
        degrees.iter().map(|d| d - n as i64).collect(),
        SparseMatrix::zeros(field, total, total),
    )
    .unwrap();
    let mut cols = Vec::with_capacity(total);
    for i in 0..=n {
        for x in 0..dims[i] {
            cols.push(embed(i, &ring.duality(i, &basis(x))));
        }
    }
    let f = SparseMatrix::from_columns(field, total, cols);
    let g = f.inverse().expect("duality is an isomorphism");
    let iso = DegreeNIso { n: -(n as i64), source: a, target, f, g };
    Transported { ring, offsets, inst: Instance::new(algebra, iso) }
}

fn check_laws(x: StratifiedComplex, field: Field) {
    let name = x.name().to_string();
    let t = transported(x, field);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for id in Identity::ALL {
        if let Err(e) = id.check(&t.inst, 50, &mut rng) {
            panic!("{name} over {field}: {} fails: {e}", id.name());
        }
    }
}

#[test]
fn sign_laws_hold_on_the_torus_ring() {
    check_laws(corpus::torus(), Field::Rational);
    check_laws(corpus::torus(), Field::Prime(2));
}

#[test]
fn sign_laws_hold_on_odd_dimensional_rings() {
    check_laws(corpus::three_sphere(), Field::Rational);
    check_laws(corpus::staircase_three_torus(), Field::Rational);
}

#[test]
fn sign_laws_hold_mod_two_on_the_projective_plane() {
    check_laws(corpus::projective_plane(), Field::Prime(2));
}

/// The intersection product on homology is Dold's transferred product.
#[test]
fn intersection_product_is_the_bullet_product() {
    for (x, field) in [
        (corpus::torus(), Field::Rational),
        (corpus::staircase_three_torus(), Field::Rational),
        (corpus::three_sphere(), Field::Rational),
        (corpus::projective_plane(), Field::Prime(2)),
    ] {
        let t = transported(x, field);
        let bullet = dold_bullet(&t.inst.iso, &t.inst.algebra);
        let n = t.ring.dim();
        for i in 0..=n {
            for j in 0..=n - i {
                for a in 0..t.ring.cohomology_dim(i) {
                    for b in 0..t.ring.cohomology_dim(j) {
                        let da = t.ring.duality(i, &SparseVec::unit(a, field.one()));
                        let db = t.ring.duality(j, &SparseVec::unit(b, field.one()));
                        let got = t.ring.intersect(i, &da, j, &db);
                        let shift = |off: usize, v: &SparseVec| v.remap(|k| Some(k + off));
                        let want = bullet
                            .apply(&shift(t.offsets[i], &da), &shift(t.offsets[j], &db))
                            .remap(|k| Some(k - t.offsets[i + j]));
                        assert_eq!(got, want, "degrees ({i}, {j}), classes ({a}, {b})");
                    }
                }
            }
        }
    }
}
