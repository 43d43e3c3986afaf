//! Built-in spaces and perversity grids used by the checks.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{Simplex, StratifiedComplex};
use crate::field::Field;
use crate::perversity::{GmName, Perversity};

/// What a corpus space is used for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Manifold,
    Pseudomanifold,
    /// Connected, but with a disconnected regular part near some stratum.
    NonNormal,
}

#[derive(Clone, Debug)]
pub struct CorpusSpace {
    pub id: String,
    pub complex: Arc<StratifiedComplex>,
    /// Fields over which the space is oriented and gets duality checks.
    pub fields: Vec<Field>,
    pub kind: Kind,
}

fn tops(list: &[&[u32]]) -> Vec<Simplex> {
    list.iter().map(|s| Simplex::new(s.iter().copied())).collect()
}

pub fn circle() -> StratifiedComplex {
    StratifiedComplex::simplex_boundary(1).with_name("S1")
}

pub fn tetrahedron_sphere() -> StratifiedComplex {
    StratifiedComplex::simplex_boundary(2).with_name("S2")
}

pub fn three_sphere() -> StratifiedComplex {
    StratifiedComplex::simplex_boundary(3).with_name("S3")
}

/// Antipodal pairs `{0,1}`, `{2,3}`, `{4,5}`.
pub fn octahedron() -> StratifiedComplex {
    let mut t = Vec::new();
    for a in [0u32, 1] {
        for b in [2u32, 3] {
            for c in [4u32, 5] {
                t.push(Simplex::new([a, b, c]));
            }
        }
    }
    StratifiedComplex::from_top_simplices("octahedron", 2, &t).expect("octahedron")
}

/// The 7-vertex torus.
pub fn torus() -> StratifiedComplex {
    let mut t = Vec::new();
    for i in 0..7u32 {
        t.push(Simplex::new([i, (i + 1) % 7, (i + 3) % 7]));
        t.push(Simplex::new([i, (i + 2) % 7, (i + 3) % 7]));
    }
    StratifiedComplex::from_top_simplices("T2", 2, &t).expect("torus")
}

/// The 6-vertex projective plane.
pub fn projective_plane() -> StratifiedComplex {
    let t = tops(&[
        &[0, 1, 2],
        &[0, 2, 3],
        &[0, 3, 4],
        &[0, 4, 5],
        &[0, 1, 5],
        &[1, 2, 4],
        &[2, 3, 5],
        &[1, 3, 4],
        &[2, 4, 5],
        &[1, 3, 5],
    ]);
    StratifiedComplex::from_top_simplices("RP2", 2, &t).expect("projective plane")
}

pub fn suspended_torus() -> StratifiedComplex {
    torus().suspension().with_name("ST2")
}

/// `Σ(S¹ ⊔ S¹)`: two spheres glued at their poles.
pub fn suspended_two_circles() -> StratifiedComplex {
    circle().disjoint_union(&circle()).suspension().with_name("S(S1+S1)")
}

pub fn staircase_torus() -> StratifiedComplex {
    circle().product(&circle()).expect("product of circles").with_name("S1xS1")
}

pub fn staircase_three_torus() -> StratifiedComplex {
    staircase_torus()
        .product(&circle())
        .expect("product of manifolds")
        .with_name("T3")
}

/// Two points.
pub fn two_points() -> StratifiedComplex {
    StratifiedComplex::simplex_boundary(0).with_name("S0")
}

/// Every closed space in the corpus, in a fixed order.
pub fn corpus() -> Vec<CorpusSpace> {
    let both = vec![Field::Rational, Field::Prime(2)];
    let entry = |id: &str, x: StratifiedComplex, fields: Vec<Field>, kind| CorpusSpace {
        id: id.to_string(),
        complex: Arc::new(x),
        fields,
        kind,
    };
    vec![
        entry("S1", circle(), both.clone(), Kind::Manifold),
        entry("S2", tetrahedron_sphere(), both.clone(), Kind::Manifold),
        entry("octahedron", octahedron(), both.clone(), Kind::Manifold),
        entry("T2", torus(), both.clone(), Kind::Manifold),
        entry("S1xS1", staircase_torus(), both.clone(), Kind::Manifold),
        entry("S3", three_sphere(), both.clone(), Kind::Manifold),
        entry("T3", staircase_three_torus(), vec![Field::Rational], Kind::Manifold),
        entry("RP2", projective_plane(), vec![Field::Prime(2)], Kind::Manifold),
        entry("ST2", suspended_torus(), both, Kind::Pseudomanifold),
        entry("S(S1+S1)", suspended_two_circles(), vec![Field::Rational], Kind::NonNormal),
    ]
}

pub fn space(id: &str) -> Option<CorpusSpace> {
    corpus().into_iter().find(|s| s.id == id)
}

/// Links whose cones feed the cone-formula check.
pub fn cone_links() -> Vec<(&'static str, StratifiedComplex)> {
    vec![
        ("S0", two_points()),
        ("S1", circle()),
        ("S2", tetrahedron_sphere()),
        ("T2", torus()),
        ("ST2", suspended_torus()),
    ]
}

/// The four GM perversities, then two seeded random perversities with
/// values in `[-1, codim]` and their duals. Entries with identical tables are
/// dropped, keeping the first name.
pub fn perversity_grid(x: &StratifiedComplex, seed: u64) -> Vec<Perversity> {
    let mut out: Vec<Perversity> = GmName::ALL.iter().map(|&g| Perversity::gm(x, g)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..2 {
        let table: BTreeMap<usize, i64> = x
            .singular_strata()
            .map(|s| (s.id, rng.gen_range(-1..=s.codim as i64)))
            .collect();
        let p = Perversity::from_table(x, format!("random{k}"), &table).expect("covers singular strata");
        let dp = p.dual();
        out.push(p);
        out.push(dp);
    }
    let mut seen = Vec::new();
    out.retain(|p| {
        let t = p.table();
        if seen.contains(&t) {
            false
        } else {
            seen.push(t);
            true
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ichains::betti_numbers;

    #[test]
    fn corpus_spaces_validate() {
        for s in corpus() {
            let r = s.complex.validate();
            assert!(r.is_valid(), "{} {:?}", s.id, r.violations);
            assert!(s.complex.is_connected(), "{}", s.id);
            for &f in &s.fields {
                assert!(s.complex.find_fundamental_cycle(f).is_ok(), "{} over {f}", s.id);
            }
        }
    }

    #[test]
    fn manifold_betti_numbers() {
        let q = Field::Rational;
        assert_eq!(betti_numbers(&octahedron(), q), vec![1, 0, 1]);
        assert_eq!(betti_numbers(&torus(), q), vec![1, 2, 1]);
        assert_eq!(betti_numbers(&staircase_torus(), q), vec![1, 2, 1]);
        assert_eq!(betti_numbers(&staircase_three_torus(), q), vec![1, 3, 3, 1]);
        assert_eq!(betti_numbers(&three_sphere(), q), vec![1, 0, 0, 1]);
        assert_eq!(betti_numbers(&projective_plane(), q), vec![1, 0, 0]);
        assert_eq!(betti_numbers(&projective_plane(), Field::Prime(2)), vec![1, 1, 1]);
        assert!(projective_plane().find_fundamental_cycle(q).is_err());
    }

    #[test]
    fn grid_is_deduplicated_and_seeded() {
        let x = suspended_torus();
        let a = perversity_grid(&x, 0);
        let b = perversity_grid(&x, 0);
        assert_eq!(a, b);
        // codim 3: 0 and m agree, n and t agree
        assert!(a.len() >= 2);
        assert_eq!(perversity_grid(&torus(), 0).len(), 1);
    }

    #[test]
    fn non_normal_example_has_two_regular_components() {
        let x = suspended_two_circles();
        assert!(x.is_connected());
        assert_eq!(x.regular_components(), 2);
    }
}
