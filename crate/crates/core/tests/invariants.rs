use std::sync::Arc;

use ihdual::complex::StratifiedComplex;
use ihdual::corpus;
use ihdual::field::Field;
use ihdual::ichains::{betti_numbers, IChainComplex};
use ihdual::linalg::{SparseMatrix, SparseVec};
use ihdual::perversity::Perversity;
use ihdual::products::{coboundary, cup};
use ihdual::spacefile::SpaceFile;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn field() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::Rational), Just(Field::Prime(2)), Just(Field::Prime(3)), Just(Field::Prime(7))]
}

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..7, 1usize..7).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-3i64..=3, c), r))
}

fn small_space() -> impl Strategy<Value = StratifiedComplex> {
    prop_oneof![
        Just(corpus::circle()),
        Just(corpus::tetrahedron_sphere()),
        Just(corpus::octahedron()),
        Just(corpus::torus()),
        Just(corpus::projective_plane()),
        Just(corpus::suspended_torus()),
    ]
}

fn cochain(x: &StratifiedComplex, f: Field, i: usize, entries: &[(usize, i64)]) -> SparseVec {
    let n = x.count(i);
    SparseVec::from_entries(entries.iter().map(|&(k, v)| (k % n, f.from_i64(v))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_nullity(rows in matrix(), f in field()) {
        let m = SparseMatrix::from_dense_i64(f, &rows);
        let kernel = m.kernel_basis();
        prop_assert_eq!(m.rank() + kernel.len(), m.cols());
        for v in &kernel {
            prop_assert!(m.mul_vec(v).is_zero());
        }
    }

    #[test]
    fn solve_recovers_images(rows in matrix(), f in field(), x in prop::collection::vec(-3i64..=3, 6)) {
        let m = SparseMatrix::from_dense_i64(f, &rows);
        let x = SparseVec::from_entries(x.iter().take(m.cols()).enumerate().map(|(k, &v)| (k, f.from_i64(v))));
        let b = m.mul_vec(&x);
        let y = m.solve(&b).expect("b is in the image");
        prop_assert_eq!(m.mul_vec(&y), b);
    }

    #[test]
    fn leibniz_rule_for_cup(
        f in field(),
        i in 0usize..2,
        a in prop::collection::vec((0usize..64, -2i64..=2), 1..5),
        b in prop::collection::vec((0usize..64, -2i64..=2), 1..5),
    ) {
        let x = corpus::torus();
        let j = 1 - i;
        let alpha = cochain(&x, f, i, &a);
        let beta = cochain(&x, f, j, &b);
        let lhs = coboundary(&x, f, i + j, &cup(&x, f, i, &alpha, j, &beta));
        let rhs = cup(&x, f, i + 1, &coboundary(&x, f, i, &alpha), j, &beta)
            .add(&cup(&x, f, i, &alpha, j + 1, &coboundary(&x, f, j, &beta)).scale(&f.sign(i as i64)));
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn duality_ranks_for_random_perversities(seed in any::<u64>(), f in prop_oneof![Just(Field::Rational), Just(Field::Prime(2))]) {
        let x = Arc::new(corpus::suspended_torus());
        let n = x.dim();
        let p = Perversity::random(&x, "p", &mut ChaCha8Rng::seed_from_u64(seed), -2, 4);
        let hp = IChainComplex::build(&x, &p, f).homology().dims();
        let hd = IChainComplex::build(&x, &p.dual(), f).homology().dims();
        for i in 0..=n {
            prop_assert_eq!(hp[i], hd[n - i], "degree {} for {}", i, p);
        }
    }

    #[test]
    fn subdivision_keeps_homology_and_euler_characteristic(x in small_space(), f in field()) {
        let sd = x.subdivide().complex;
        prop_assert_eq!(sd.euler_characteristic(), x.euler_characteristic());
        prop_assert_eq!(betti_numbers(&sd, f), betti_numbers(&x, f));
    }

    #[test]
    fn space_files_round_trip(x in small_space()) {
        let file = SpaceFile::from_complex(&x);
        let again = SpaceFile::parse(&file.to_json()).expect("parses");
        prop_assert_eq!(again.to_json(), file.to_json());
        let y = again.build().expect("builds");
        prop_assert_eq!(y.f_vector(), x.f_vector());
        prop_assert_eq!(y.strata().len(), x.strata().len());
    }
}
