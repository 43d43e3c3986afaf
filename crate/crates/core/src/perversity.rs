//! Perversities: integer functions on the singular strata of a complex.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::complex::{StratifiedComplex, Subdivision};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PerversityError {
    #[error("unknown perversity name {0:?} (expected zero, lower-middle, upper-middle or top)")]
    UnknownName(String),
    #[error("stratum {0} is not a singular stratum")]
    NotSingular(usize),
    #[error("no value given for singular stratum {0}")]
    Missing(usize),
    #[error("perversities live on different spaces")]
    Mismatch,
}

/// The four Goresky–MacPherson perversities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GmName {
    Zero,
    LowerMiddle,
    UpperMiddle,
    Top,
}

impl GmName {
    pub const ALL: [GmName; 4] = [GmName::Zero, GmName::LowerMiddle, GmName::UpperMiddle, GmName::Top];

    /// Value on a stratum of codimension `k`.
    pub fn value(self, k: usize) -> i64 {
        let k = k as i64;
        match self {
            GmName::Zero => 0,
            GmName::LowerMiddle => (k - 2).div_euclid(2),
            GmName::UpperMiddle => -(-(k - 2)).div_euclid(2),
            GmName::Top => k - 2,
        }
    }

    pub fn dual(self) -> GmName {
        match self {
            GmName::Zero => GmName::Top,
            GmName::LowerMiddle => GmName::UpperMiddle,
            GmName::UpperMiddle => GmName::LowerMiddle,
            GmName::Top => GmName::Zero,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GmName::Zero => "zero",
            GmName::LowerMiddle => "lower-middle",
            GmName::UpperMiddle => "upper-middle",
            GmName::Top => "top",
        }
    }
}

impl fmt::Display for GmName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GmName {
    type Err = PerversityError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero" | "0" => Ok(GmName::Zero),
            "lower-middle" | "m" => Ok(GmName::LowerMiddle),
            "upper-middle" | "n" => Ok(GmName::UpperMiddle),
            "top" | "t" => Ok(GmName::Top),
            other => Err(PerversityError::UnknownName(other.to_string())),
        }
    }
}

/// A perversity on a fixed complex, stored per singular stratum.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Perversity {
    name: String,
    /// stratum id -> (codim, value)
    values: BTreeMap<usize, (usize, i64)>,
}

impl Perversity {
    /// Builds a perversity from a `stratum id -> value` table, which must
    /// cover exactly the singular strata.
    pub fn from_table(
        x: &StratifiedComplex,
        name: impl Into<String>,
        table: &BTreeMap<usize, i64>,
    ) -> Result<Self, PerversityError> {
        for &s in table.keys() {
            if x.strata().get(s).is_none_or(|st| !st.is_singular()) {
                return Err(PerversityError::NotSingular(s));
            }
        }
        let mut values = BTreeMap::new();
        for st in x.singular_strata() {
            let v = *table.get(&st.id).ok_or(PerversityError::Missing(st.id))?;
            values.insert(st.id, (st.codim, v));
        }
        Ok(Perversity {
            name: name.into(),
            values,
        })
    }

    /// A perversity depending only on codimension.
    pub fn from_codim(x: &StratifiedComplex, name: impl Into<String>, f: impl Fn(usize) -> i64) -> Self {
        Perversity {
            name: name.into(),
            values: x.singular_strata().map(|s| (s.id, (s.codim, f(s.codim)))).collect(),
        }
    }

    pub fn gm(x: &StratifiedComplex, name: GmName) -> Self {
        Self::from_codim(x, name.as_str(), |k| name.value(k))
    }

    pub fn zero(x: &StratifiedComplex) -> Self {
        Self::gm(x, GmName::Zero)
    }

    pub fn top(x: &StratifiedComplex) -> Self {
        Self::gm(x, GmName::Top)
    }

    pub fn constant(x: &StratifiedComplex, c: i64) -> Self {
        Self::from_codim(x, format!("const{c}"), |_| c)
    }

    /// Uniform random values in `lo..=hi` on every singular stratum.
    pub fn random(x: &StratifiedComplex, name: impl Into<String>, rng: &mut impl Rng, lo: i64, hi: i64) -> Self {
        Perversity {
            name: name.into(),
            values: x
                .singular_strata()
                .map(|s| (s.id, (s.codim, rng.gen_range(lo..=hi))))
                .collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Value on a singular stratum; `None` for regular strata.
    pub fn value(&self, stratum: usize) -> Option<i64> {
        self.values.get(&stratum).map(|&(_, v)| v)
    }

    pub fn codim(&self, stratum: usize) -> Option<usize> {
        self.values.get(&stratum).map(|&(c, _)| c)
    }

    /// `(stratum, codim, value)` triples in stratum order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.values.iter().map(|(&s, &(c, v))| (s, c, v))
    }

    pub fn table(&self) -> BTreeMap<usize, i64> {
        self.values.iter().map(|(&s, &(_, v))| (s, v)).collect()
    }

    fn same_domain(&self, other: &Perversity) -> bool {
        self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|((s, (c, _)), (t, (d, _)))| s == t && c == d)
    }

    /// `Dp(Z) = codim(Z) - 2 - p(Z)`.
    pub fn dual(&self) -> Perversity {
        let name = match self.name.strip_prefix("D(").and_then(|s| s.strip_suffix(')')) {
            Some(inner) => inner.to_string(),
            None => match self.name.parse::<GmName>() {
                Ok(g) => g.dual().as_str().to_string(),
                Err(_) => format!("D({})", self.name),
            },
        };
        Perversity {
            name,
            values: self
                .values
                .iter()
                .map(|(&s, &(c, v))| (s, (c, c as i64 - 2 - v)))
                .collect(),
        }
    }

    /// `p + q = t` on every singular stratum.
    pub fn is_complementary(&self, other: &Perversity) -> Result<bool, PerversityError> {
        if !self.same_domain(other) {
            return Err(PerversityError::Mismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(other.values.values())
            .all(|((_, &(c, p)), &(_, q))| p + q == c as i64 - 2))
    }

    /// Pointwise `p <= q`.
    pub fn le(&self, other: &Perversity) -> Result<bool, PerversityError> {
        if !self.same_domain(other) {
            return Err(PerversityError::Mismatch);
        }
        Ok(self
            .values
            .values()
            .zip(other.values.values())
            .all(|(&(_, p), &(_, q))| p <= q))
    }

    /// Pointwise sum; the result carries the given name.
    pub fn add(&self, other: &Perversity) -> Result<Perversity, PerversityError> {
        if !self.same_domain(other) {
            return Err(PerversityError::Mismatch);
        }
        Ok(Perversity {
            name: format!("{}+{}", self.name, other.name),
            values: self
                .values
                .iter()
                .zip(other.values.values())
                .map(|((&s, &(c, p)), &(_, q))| (s, (c, p + q)))
                .collect(),
        })
    }

    /// Transports the perversity to a barycentric subdivision.
    pub fn transport(&self, sd: &Subdivision) -> Perversity {
        Perversity {
            name: self.name.clone(),
            values: sd
                .complex
                .singular_strata()
                .map(|s| {
                    let v = self.value(sd.stratum_origin[s.id]).expect("singular origin");
                    (s.id, (s.codim, v))
                })
                .collect(),
        }
    }
}

impl fmt::Display for Perversity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        let parts: Vec<String> = self.values.iter().map(|(s, (_, v))| format!("{s}:{v}")).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// The condition `Dr >= Dp + Dq` under which `∪` maps
/// `I_p H^i ⊗ I_q H^j -> I_r H^{i+j}`.
pub fn cup_condition(p: &Perversity, q: &Perversity, r: &Perversity) -> Result<bool, PerversityError> {
    let sum = p.dual().add(&q.dual())?;
    sum.le(&r.dual())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{Simplex, StratifiedComplex};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn suspended_torus() -> StratifiedComplex {
        let mut tops = Vec::new();
        for i in 0..7u32 {
            tops.push(Simplex::new([i, (i + 1) % 7, (i + 3) % 7]));
            tops.push(Simplex::new([i, (i + 2) % 7, (i + 3) % 7]));
        }
        StratifiedComplex::from_top_simplices("T2", 2, &tops)
            .unwrap()
            .suspension()
    }

    #[test]
    fn gm_values() {
        assert_eq!(GmName::LowerMiddle.value(3), 0);
        assert_eq!(GmName::UpperMiddle.value(3), 1);
        assert_eq!(GmName::Top.value(2), 0);
        assert_eq!(GmName::LowerMiddle.value(1), -1);
        assert_eq!(GmName::UpperMiddle.value(1), 0);
        for k in 1..10 {
            assert_eq!(GmName::LowerMiddle.value(k) + GmName::UpperMiddle.value(k), k as i64 - 2);
        }
    }

    #[test]
    fn duals() {
        let x = suspended_torus();
        let z = Perversity::zero(&x);
        assert_eq!(z.dual(), Perversity::top(&x));
        let m = Perversity::gm(&x, GmName::LowerMiddle);
        assert_eq!(m.dual(), Perversity::gm(&x, GmName::UpperMiddle));
        assert!(m.entries().all(|(_, c, v)| c == 3 && v == 0));
        assert!(m.dual().entries().all(|(_, _, v)| v == 1));
        assert!(z.is_complementary(&z.dual()).unwrap());
        assert!(!m.is_complementary(&m).unwrap());
    }

    #[test]
    fn tables_must_cover_singular_strata() {
        let x = suspended_torus();
        let mut t = BTreeMap::new();
        t.insert(0, 1);
        assert_eq!(Perversity::from_table(&x, "p", &t), Err(PerversityError::Missing(1)));
        t.insert(1, 0);
        assert!(Perversity::from_table(&x, "p", &t).is_ok());
        t.insert(2, 0);
        assert_eq!(Perversity::from_table(&x, "p", &t), Err(PerversityError::NotSingular(2)));
    }

    #[test]
    fn cup_condition_examples() {
        let x = suspended_torus();
        let z = Perversity::zero(&x);
        let t = Perversity::top(&x);
        assert!(!cup_condition(&z, &z, &z).unwrap());
        assert!(cup_condition(&t, &t, &t).unwrap());
        assert!(cup_condition(&z, &t, &z).unwrap());
    }

    proptest! {
        #[test]
        fn dual_is_an_order_reversing_involution(seed in any::<u64>()) {
            let x = suspended_torus();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = Perversity::random(&x, "p", &mut rng, -2, 5);
            let q = Perversity::random(&x, "q", &mut rng, -2, 5);
            prop_assert_eq!(p.dual().dual().table(), p.table());
            prop_assert!(p.is_complementary(&p.dual()).unwrap());
            prop_assert_eq!(p.le(&q).unwrap(), q.dual().le(&p.dual()).unwrap());
        }
    }
}
