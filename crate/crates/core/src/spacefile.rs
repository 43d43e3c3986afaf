//! The JSON space format.
//!
//! ```json
//! {
//!   "name": "cone",
//!   "dimension": 2,
//!   "vertices": [0, 1, 2, 3],
//!   "top_simplices": [[0, 1, 2], [0, 1, 3], [0, 2, 3]],
//!   "skeleta": { "0": [[0]] },
//!   "boundary": [[1, 2], [1, 3], [2, 3]]
//! }
//! ```
//!
//! `skeleta[i]` lists generators of `X^i`; missing indices contribute nothing.
//! `boundary` is optional and declares a boundary subcomplex (cones use it).
//! `orientation_hint` is optional: one sign per entry of `top_simplices`,
//! checked against the computed orientation up to a global sign.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{ComplexError, Simplex, StratifiedComplex, ValidationReport, Vertex};
use crate::field::Field;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub name: String,
    pub dimension: usize,
    pub vertices: Vec<Vertex>,
    pub top_simplices: Vec<Vec<Vertex>>,
    #[serde(default)]
    pub skeleta: BTreeMap<usize, Vec<Vec<Vertex>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub boundary: Vec<Vec<Vertex>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation_hint: Option<Vec<i64>>,
}

#[derive(Debug, Error)]
pub enum SpaceFileError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("{location}: empty simplex")]
    EmptySimplex { location: String },
    #[error("{location}: vertex {vertex} repeated in {simplex:?}")]
    RepeatedVertex { location: String, vertex: Vertex, simplex: Vec<Vertex> },
    #[error("{location}: vertex {vertex} of {simplex:?} is not listed in \"vertices\"")]
    UnknownVertex { location: String, vertex: Vertex, simplex: Vec<Vertex> },
    #[error("vertices: {0} listed twice")]
    DuplicateVertex(Vertex),
    #[error("{0}")]
    Structure(ComplexError),
    #[error("invalid space: {}", .0.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(ValidationReport),
    #[error("orientation_hint: {0}")]
    BadOrientationHint(String),
}

impl SpaceFileError {
    /// The offending simplex, when the error is attached to one.
    pub fn offending_simplex(&self) -> Option<String> {
        match self {
            SpaceFileError::RepeatedVertex { simplex, .. } | SpaceFileError::UnknownVertex { simplex, .. } => {
                Some(Simplex::new(simplex.iter().copied()).to_string())
            }
            SpaceFileError::Structure(
                ComplexError::TooLarge(s, _)
                | ComplexError::UnknownSkeletonSimplex(s)
                | ComplexError::UnknownBoundarySimplex(s),
            ) => Some(s.to_string()),
            SpaceFileError::Invalid(r) => r.violations.first().map(|v| v.simplex.to_string()),
            SpaceFileError::DuplicateVertex(v) => Some(format!("[{v}]")),
            _ => None,
        }
    }
}

fn check_simplex(location: String, s: &[Vertex], known: &BTreeSet<Vertex>) -> Result<Simplex, SpaceFileError> {
    if s.is_empty() {
        return Err(SpaceFileError::EmptySimplex { location });
    }
    let mut seen = BTreeSet::new();
    for &v in s {
        if !seen.insert(v) {
            return Err(SpaceFileError::RepeatedVertex { location, vertex: v, simplex: s.to_vec() });
        }
        if !known.contains(&v) {
            return Err(SpaceFileError::UnknownVertex { location, vertex: v, simplex: s.to_vec() });
        }
    }
    Ok(Simplex::new(s.iter().copied()))
}

/// Maximal elements among `simplices` (by face inclusion).
fn maximal(simplices: &[Simplex]) -> Vec<Simplex> {
    let all: BTreeSet<&Simplex> = simplices.iter().collect();
    let mut faces = BTreeSet::new();
    for s in simplices {
        for (_, f) in s.facets() {
            if f.dim() >= 0 {
                faces.insert(f);
            }
        }
    }
    all.into_iter().filter(|s| !faces.contains(*s)).cloned().collect()
}

fn compact<T: Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

fn raw(s: &Simplex) -> Vec<Vertex> {
    s.vertices().to_vec()
}

impl SpaceFile {
    pub fn parse(text: &str) -> Result<SpaceFile, SpaceFileError> {
        serde_json::from_str(text).map_err(|e| SpaceFileError::Json(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<SpaceFile, SpaceFileError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| SpaceFileError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    /// Canonical text: one simplex per line.
    pub fn to_json(&self) -> String {
        let list = |items: &[Vec<Vertex>], indent: &str| -> String {
            if items.is_empty() {
                return "[]".to_string();
            }
            let lines: Vec<String> = items.iter().map(|s| format!("{indent}  {}", compact(s))).collect();
            format!("[\n{}\n{indent}]", lines.join(",\n"))
        };
        let mut fields = vec![
            format!("  \"name\": {}", compact(&self.name)),
            format!("  \"dimension\": {}", self.dimension),
            format!("  \"vertices\": {}", compact(&self.vertices)),
            format!("  \"top_simplices\": {}", list(&self.top_simplices, "  ")),
        ];
        let skeleta: Vec<String> = self
            .skeleta
            .iter()
            .map(|(i, gens)| format!("    \"{i}\": {}", list(gens, "    ")))
            .collect();
        fields.push(if skeleta.is_empty() {
            "  \"skeleta\": {}".to_string()
        } else {
            format!("  \"skeleta\": {{\n{}\n  }}", skeleta.join(",\n"))
        });
        if !self.boundary.is_empty() {
            fields.push(format!("  \"boundary\": {}", list(&self.boundary, "  ")));
        }
        if let Some(h) = &self.orientation_hint {
            fields.push(format!("  \"orientation_hint\": {}", compact(h)));
        }
        format!("{{\n{}\n}}\n", fields.join(",\n"))
    }

    /// Builds the complex without running [`StratifiedComplex::validate`].
    pub fn build(&self) -> Result<StratifiedComplex, SpaceFileError> {
        let mut known = BTreeSet::new();
        for &v in &self.vertices {
            if !known.insert(v) {
                return Err(SpaceFileError::DuplicateVertex(v));
            }
        }
        let tops = self
            .top_simplices
            .iter()
            .enumerate()
            .map(|(k, s)| check_simplex(format!("top_simplices[{k}]"), s, &known))
            .collect::<Result<Vec<_>, _>>()?;
        let mut skeleta = BTreeMap::new();
        for (&i, list) in &self.skeleta {
            let gens = list
                .iter()
                .enumerate()
                .map(|(k, s)| check_simplex(format!("skeleta[{i}][{k}]"), s, &known))
                .collect::<Result<Vec<_>, _>>()?;
            skeleta.insert(i, gens);
        }
        let boundary = self
            .boundary
            .iter()
            .enumerate()
            .map(|(k, s)| check_simplex(format!("boundary[{k}]"), s, &known))
            .collect::<Result<Vec<_>, _>>()?;
        // listed vertices not in any top simplex become isolated points
        let used: BTreeSet<Vertex> = tops.iter().flat_map(|s| s.vertices().iter().copied()).collect();
        let extra: Vec<Vertex> = known.difference(&used).copied().collect();
        StratifiedComplex::build(self.name.clone(), self.dimension, &extra, &tops, skeleta, boundary)
            .map_err(SpaceFileError::Structure)
    }

    /// Builds and validates.
    pub fn to_complex(&self) -> Result<StratifiedComplex, SpaceFileError> {
        let x = self.build()?;
        let report = x.validate();
        if !report.is_valid() {
            return Err(SpaceFileError::Invalid(report));
        }
        Ok(x)
    }

    /// Checks `orientation_hint`, if any, against the orientation found over `field`.
    pub fn check_orientation_hint(&self, x: &StratifiedComplex, field: Field) -> Result<(), SpaceFileError> {
        let Some(hint) = &self.orientation_hint else {
            return Ok(());
        };
        let bad = |m: String| Err(SpaceFileError::BadOrientationHint(m));
        if hint.len() != self.top_simplices.len() {
            return bad(format!("{} signs for {} top simplices", hint.len(), self.top_simplices.len()));
        }
        if let Some(k) = hint.iter().position(|&s| s != 1 && s != -1) {
            return bad(format!("entry {k} is {}, expected 1 or -1", hint[k]));
        }
        let o = match x.find_fundamental_cycle(field) {
            Ok(o) => o,
            Err(e) => return bad(e.to_string()),
        };
        let n = x.dim();
        let mut global = None;
        for (k, s) in self.top_simplices.iter().enumerate() {
            let simplex = Simplex::new(s.iter().copied());
            let Some(idx) = x.index_of(&simplex).filter(|_| simplex.dim() == n as isize) else {
                return bad(format!("entry {k} belongs to {simplex}, which is not an {n}-simplex"));
            };
            let expected = field.from_i64(hint[k]);
            let ratio = &o.signs[idx] * &expected.inv();
            match &global {
                None => global = Some(ratio),
                Some(g) if *g == ratio => {}
                Some(_) => return bad(format!("sign of {simplex} disagrees with a coherent orientation")),
            }
        }
        Ok(())
    }

    /// Canonical file for a complex: sorted vertices, maximal simplices, and
    /// for each `i` the maximal simplices of `X^i` that first appear at level `i`.
    pub fn from_complex(x: &StratifiedComplex) -> SpaceFile {
        let n = x.dim();
        let mut all = Vec::new();
        for d in 0..=n {
            all.extend(x.simplices(d).iter().cloned());
        }
        let top_simplices = maximal(&all).iter().map(raw).collect();
        let mut skeleta = BTreeMap::new();
        for i in 0..n {
            let mut in_skeleton = Vec::new();
            for d in 0..=i {
                for (k, s) in x.simplices(d).iter().enumerate() {
                    if x.level(d, k) <= i {
                        in_skeleton.push(s.clone());
                    }
                }
            }
            let gens: Vec<Vec<Vertex>> = maximal(&in_skeleton)
                .iter()
                .filter(|s| {
                    let d = s.dim() as usize;
                    x.level(d, x.index_of(s).expect("simplex of x")) == i
                })
                .map(raw)
                .collect();
            if !gens.is_empty() {
                skeleta.insert(i, gens);
            }
        }
        let mut in_boundary = Vec::new();
        for d in 0..=n {
            for (k, s) in x.simplices(d).iter().enumerate() {
                if x.in_boundary(d, k) {
                    in_boundary.push(s.clone());
                }
            }
        }
        SpaceFile {
            name: x.name().to_string(),
            dimension: n,
            vertices: x.vertices(),
            top_simplices,
            skeleta,
            boundary: maximal(&in_boundary).iter().map(raw).collect(),
            orientation_hint: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn round_trip_is_idempotent() {
        let mut spaces: Vec<StratifiedComplex> = corpus::corpus().iter().map(|s| (*s.complex).clone()).collect();
        spaces.push(corpus::torus().cone());
        spaces.push(corpus::suspended_torus().barycentric_subdivide());
        for x in spaces {
            let once = SpaceFile::from_complex(&x);
            let y = once.to_complex().unwrap();
            assert_eq!(x.f_vector(), y.f_vector());
            assert_eq!(x.strata().len(), y.strata().len());
            let twice = SpaceFile::from_complex(&y);
            assert_eq!(once, twice, "{}", x.name());
            assert_eq!(once.to_json(), SpaceFile::parse(&once.to_json()).unwrap().to_json());
        }
    }

    #[test]
    fn errors_point_at_simplices() {
        let text = r#"{"name":"x","dimension":2,"vertices":[0,1,2],"top_simplices":[[0,1,2],[0,1,3]]}"#;
        let e = SpaceFile::parse(text).unwrap().to_complex().unwrap_err();
        assert_eq!(e.offending_simplex().as_deref(), Some("[0,1,3]"));

        let text = r#"{"name":"x","dimension":2,"vertices":[0,1,2],"top_simplices":[[0,1,2]]}"#;
        let e = SpaceFile::parse(text).unwrap().to_complex().unwrap_err();
        assert!(matches!(e, SpaceFileError::Invalid(_)));
        assert!(e.offending_simplex().is_some());

        let text = r#"{"name":"x","dimension":1,"vertices":[0,1],"top_simplices":[[0,1]],"colour":3}"#;
        assert!(matches!(SpaceFile::parse(text), Err(SpaceFileError::Json(_))));
    }

    #[test]
    fn orientation_hint_is_checked() {
        let x = corpus::circle();
        let mut f = SpaceFile::from_complex(&x);
        // edges [0,1], [0,2], [1,2]: a coherent orientation is +, -, +
        f.orientation_hint = Some(vec![1, -1, 1]);
        f.check_orientation_hint(&x, Field::Rational).unwrap();
        f.orientation_hint = Some(vec![-1, 1, -1]);
        f.check_orientation_hint(&x, Field::Rational).unwrap();
        f.orientation_hint = Some(vec![1, 1, 1]);
        assert!(f.check_orientation_hint(&x, Field::Rational).is_err());
    }

    #[test]
    fn shipped_files_match_the_builders() {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
        let pairs = [
            ("S1", corpus::circle()),
            ("S2", corpus::tetrahedron_sphere()),
            ("S3", corpus::three_sphere()),
            ("octahedron", corpus::octahedron()),
            ("T2", corpus::torus()),
            ("S1xS1", corpus::staircase_torus()),
            ("T3", corpus::staircase_three_torus()),
            ("RP2", corpus::projective_plane()),
            ("ST2", corpus::suspended_torus()),
            ("suspended_two_circles", corpus::suspended_two_circles()),
        ];
        for (file, x) in pairs {
            let text = std::fs::read_to_string(format!("{dir}/{file}.json")).unwrap();
            assert_eq!(text, SpaceFile::from_complex(&x).to_json(), "{file}");
        }
        let cone = SpaceFile::load(format!("{dir}/cone_S1.json")).unwrap();
        let built = corpus::circle().cone();
        assert_eq!(cone.to_complex().unwrap().f_vector(), built.f_vector());
        assert_eq!(
            SpaceFile::from_complex(&cone.to_complex().unwrap()).top_simplices,
            SpaceFile::from_complex(&built).top_simplices
        );
    }
}
