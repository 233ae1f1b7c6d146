//! The arrangement file: TOML with `n`, `m` and one `[[sphere]]` table per sphere,
//! declared either by `center` + `radius_sq` or by raw `alpha = [α_1, …, α_n, α_0]`.
//! Rationals are integers or strings `"p/q"`.

use std::fmt;

use anyhow::{anyhow, bail, Context, Result};
use num_traits::ToPrimitive;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use spherule::{Arrangement, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Rational(pub Scalar);

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.is_integer().then(|| self.0.numer().to_i64()).flatten() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

struct RationalVisitor;

impl Visitor<'_> for RationalVisitor {
    type Value = Rational;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a string \"p/q\"")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rational, E> {
        Ok(Rational(Scalar::from_integer(v.into())))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rational, E> {
        parse_rational(v).map(Rational).map_err(|e| E::custom(e.to_string()))
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        d.deserialize_any(RationalVisitor)
    }
}

/// `"p/q"` or `"p"`, with optional surrounding whitespace.
pub fn parse_rational(s: &str) -> Result<Scalar> {
    let t = s.trim();
    let v: Scalar = t.parse().map_err(|_| anyhow!("'{t}' is not a rational number"))?;
    Ok(v)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereDecl {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_sq: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrangementFile {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "sphere", default)]
    pub spheres: Vec<SphereDecl>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

impl ArrangementFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| match e.span() {
            Some(span) => {
                let (line, col) = line_col(text, span.start);
                anyhow!("parse error at line {line}, column {col}: {}", e.message())
            }
            None => anyhow!("parse error: {}", e.message()),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("arrangement files always serialize")
    }

    /// Raw-coefficient form of an arrangement.
    pub fn from_arrangement(arr: &Arrangement) -> Self {
        ArrangementFile {
            n: arr.n(),
            m: arr.m(),
            spheres: arr
                .alpha()
                .iter()
                .map(|a| SphereDecl { alpha: Some(a.iter().cloned().map(Rational).collect()), ..Default::default() })
                .collect(),
        }
    }

    /// Builds the arrangement, converting centers by `α_ν = −c_ν`, `α_0 = Σc² − r²`.
    pub fn to_arrangement(&self) -> Result<Arrangement> {
        let n = self.n;
        if n == 0 {
            bail!("inconsistent dimension: n must be at least 1");
        }
        if self.spheres.len() != self.m {
            bail!("inconsistent dimension: m = {} but {} spheres are declared", self.m, self.spheres.len());
        }
        let mut alpha = Vec::with_capacity(self.m);
        for (i, s) in self.spheres.iter().enumerate() {
            let j = i + 1;
            let row = match (&s.center, &s.radius_sq, &s.alpha) {
                (Some(c), Some(r), None) => {
                    if c.len() != n {
                        bail!("inconsistent dimension: sphere {j} has {} center coordinates, n = {n}", c.len());
                    }
                    let mut row: Vec<Scalar> = c.iter().map(|x| -x.0.clone()).collect();
                    let norm: Scalar = c.iter().map(|x| &x.0 * &x.0).sum();
                    row.push(norm - &r.0);
                    row
                }
                (None, None, Some(a)) => {
                    if a.len() != n + 1 {
                        bail!("inconsistent dimension: sphere {j} has {} coefficients, expected n+1 = {}", a.len(), n + 1);
                    }
                    a.iter().map(|x| x.0.clone()).collect()
                }
                _ => bail!("sphere {j} must give either center and radius_sq, or alpha"),
            };
            alpha.push(row);
        }
        Arrangement::new(n, alpha).context("building the arrangement")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use spherule::linalg::{frac, int};

    const STANDARD: &str = r#"
n = 1
m = 2

[[sphere]]
center = [0]
radius_sq = 4

[[sphere]]
alpha = [-3, 5]
"#;

    #[test]
    fn center_style_converts() {
        let f = ArrangementFile::parse(STANDARD).unwrap();
        let a = f.to_arrangement().unwrap();
        assert_eq!(a.alpha()[0], vec![int(0), int(-4)]);
        assert_eq!(a.alpha()[1], vec![int(-3), int(5)]);
    }

    #[test]
    fn fractions_are_exact() {
        let text = "n = 1\nm = 1\n[[sphere]]\ncenter = [\"1/3\"]\nradius_sq = \"2/7\"\n";
        let a = ArrangementFile::parse(text).unwrap().to_arrangement().unwrap();
        assert_eq!(a.alpha()[0], vec![frac(-1, 3), frac(1, 9) - frac(2, 7)]);
    }

    #[test]
    fn round_trip_is_identical() {
        let f = ArrangementFile::parse(STANDARD).unwrap();
        let text = f.to_toml();
        let g = ArrangementFile::parse(&text).unwrap();
        assert_eq!(f, g);
        assert_eq!(text, g.to_toml());
        let a = f.to_arrangement().unwrap();
        let h = ArrangementFile::from_arrangement(&a);
        assert_eq!(ArrangementFile::parse(&h.to_toml()).unwrap().to_arrangement().unwrap(), a);
    }

    #[test]
    fn errors_carry_positions() {
        let e = ArrangementFile::parse("n = 1\nm = 1\n[[sphere]]\ncenter = [\"1/0x\"]\n").unwrap_err();
        assert!(e.to_string().contains("line 4"), "{e}");
        let e = ArrangementFile::parse("n = 1\nm = 2\n[[sphere]]\nalpha = [1, 2]\n")
            .unwrap()
            .to_arrangement()
            .unwrap_err();
        assert!(e.to_string().contains("inconsistent dimension"), "{e}");
        let e = ArrangementFile::parse("n = 2\nm = 1\n[[sphere]]\ncenter = [1]\nradius_sq = 1\n")
            .unwrap()
            .to_arrangement()
            .unwrap_err();
        assert!(e.to_string().contains("center coordinates"), "{e}");
        let e = ArrangementFile::parse("n = 1\nm = 1\n[[sphere]]\ncenter = [1]\nradius_sq = 1\nalpha = [1, 1]\n")
            .unwrap()
            .to_arrangement()
            .unwrap_err();
        assert!(e.to_string().contains("either"), "{e}");
    }
}
