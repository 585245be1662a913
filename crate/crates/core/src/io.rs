//! JSON forms of the crate's data.
//!
//! Scalars are `"num/den"` strings. Chart points are written as
//! `{"p", "q", "theta", "v", "a", "b"}` where `v[j-1]` is `v_j^0` and `a`,
//! `b` map keys `"j,i"` to `a_j^i`, `b_j^i`; absent keys are zero. Matrices
//! are `{"p", "q", "theta", "matrix"}` with rows of scalars.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flag::ThetaSet;
use crate::linalg::{format_rational, parse_rational, Matrix, Rational};
use crate::quadratic::Signature;
use crate::unipotent::{Chart, UnipotentCoords};

/// Serde adapter for `Vec<Rational>` as a list of `"num/den"` strings.
pub mod rational_vec {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::linalg::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter().map(|x| parse_rational(x).map_err(serde::de::Error::custom)).collect()
    }
}

fn parse_theta(p: usize, q: usize, tokens: &[String]) -> Result<ThetaSet> {
    ThetaSet::parse(Signature::new(p, q)?, &tokens.join(","))
}

fn parse_all(xs: &[String]) -> Result<Vec<Rational>> {
    xs.iter().map(|x| parse_rational(x)).collect()
}

fn key_of(key: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse(format!("bad coordinate key {key:?}, expected \"j,i\""));
    let (j, i) = key.split_once(',').ok_or_else(bad)?;
    Ok((j.trim().parse().map_err(|_| bad())?, i.trim().parse().map_err(|_| bad())?))
}

/// JSON form of [`UnipotentCoords`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordsJson {
    pub p: usize,
    pub q: usize,
    pub theta: Vec<String>,
    pub v: Vec<Vec<String>>,
    #[serde(default)]
    pub a: BTreeMap<String, String>,
    #[serde(default)]
    pub b: BTreeMap<String, String>,
}

impl CoordsJson {
    /// Writes every free coordinate, zeros included.
    pub fn from_coords(c: &UnipotentCoords) -> Self {
        let chart = &c.chart;
        let sig = chart.sig();
        let mut a = BTreeMap::new();
        let mut b = BTreeMap::new();
        for j in 1..=chart.k {
            for i in 1..=chart.k - j {
                if chart.a_free(j, i) {
                    a.insert(format!("{j},{i}"), format_rational(&c.a[j - 1][i - 1]));
                }
                b.insert(format!("{j},{i}"), format_rational(&c.b[j - 1][i - 1]));
            }
        }
        CoordsJson {
            p: sig.p,
            q: sig.q,
            theta: chart.theta.tokens(),
            v: c.v0.iter().map(|v| v.iter().map(format_rational).collect()).collect(),
            a,
            b,
        }
    }

    pub fn to_coords(&self) -> Result<UnipotentCoords> {
        let theta = parse_theta(self.p, self.q, &self.theta)?;
        let chart = Chart::new(&theta);
        let mut c = UnipotentCoords::zero(&chart);
        if self.v.len() != chart.k {
            return Err(Error::Dimension(format!("expected {} vectors v, got {}", chart.k, self.v.len())));
        }
        for (j, v) in self.v.iter().enumerate() {
            if v.len() != chart.v0_len() {
                return Err(Error::Dimension(format!("v[{j}] needs {} entries", chart.v0_len())));
            }
            c.v0[j] = parse_all(v)?;
        }
        for (map, is_a) in [(&self.a, true), (&self.b, false)] {
            for (key, x) in map {
                let (j, i) = key_of(key)?;
                if j == 0 || i == 0 || j > chart.k || i > chart.k - j {
                    return Err(Error::Index(format!("coordinate {key:?} outside the chart")));
                }
                let x = parse_rational(x)?;
                if is_a {
                    if !chart.a_free(j, i) && !x.is_zero() {
                        return Err(Error::NotUnipotent(format!("a_{j}^{i} vanishes for {theta}")));
                    }
                    c.a[j - 1][i - 1] = x;
                } else {
                    c.b[j - 1][i - 1] = x;
                }
            }
        }
        Ok(c)
    }
}

/// JSON form of a matrix of the chart of a root set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub p: usize,
    pub q: usize,
    pub theta: Vec<String>,
    pub matrix: Vec<Vec<String>>,
}

impl MatrixJson {
    pub fn from_matrix(theta: &ThetaSet, m: &Matrix) -> Self {
        let sig = theta.sig();
        MatrixJson {
            p: sig.p,
            q: sig.q,
            theta: theta.tokens(),
            matrix: m.to_rows().iter().map(|r| r.iter().map(format_rational).collect()).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<(ThetaSet, Matrix)> {
        let theta = parse_theta(self.p, self.q, &self.theta)?;
        let rows = self.matrix.iter().map(|r| parse_all(r)).collect::<Result<Vec<_>>>()?;
        Ok((theta, Matrix::from_rows(rows)?))
    }
}

/// An input file: chart coordinates or a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Input {
    Coords(CoordsJson),
    Matrix(MatrixJson),
}

impl Input {
    /// Parses either JSON form; a `matrix` field selects the matrix form.
    pub fn parse(text: &str) -> Result<Input> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("input is not JSON: {e}")))?;
        let parsed = if value.get("matrix").is_some() {
            serde_json::from_value(value).map(Input::Matrix)
        } else {
            serde_json::from_value(value).map(Input::Coords)
        };
        parsed.map_err(|e| Error::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::unipotent::psi;

    fn theta(p: usize, q: usize, t: &str) -> ThetaSet {
        ThetaSet::parse(Signature::new(p, q).unwrap(), t).unwrap()
    }

    #[test]
    fn coords_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for th in [theta(5, 3, "1,2,3"), theta(5, 3, "1,3"), theta(4, 4, "4,qp")] {
            let c = UnipotentCoords::random(&Chart::new(&th), &mut rng, 7);
            let json = serde_json::to_string(&CoordsJson::from_coords(&c)).unwrap();
            match Input::parse(&json).unwrap() {
                Input::Coords(back) => assert_eq!(back.to_coords().unwrap(), c),
                other => panic!("parsed as {other:?}"),
            }
        }
    }

    #[test]
    fn matrix_round_trip() {
        let th = theta(4, 3, "1,2");
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let u = psi(&UnipotentCoords::random(&Chart::new(&th), &mut rng, 5));
        let json = serde_json::to_string(&MatrixJson::from_matrix(&th, &u)).unwrap();
        match Input::parse(&json).unwrap() {
            Input::Matrix(m) => assert_eq!(m.to_matrix().unwrap(), (th, u)),
            other => panic!("parsed as {other:?}"),
        }
    }

    #[test]
    fn vanishing_coordinate_is_rejected() {
        let json = r#"{"p":5,"q":3,"theta":["1","3"],"v":[["0"],["0"]],"a":{"1,1":"1"}}"#;
        let Input::Coords(c) = Input::parse(json).unwrap() else { panic!() };
        assert!(c.to_coords().is_err());
    }
}
