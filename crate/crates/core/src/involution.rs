//! The chart involution `Ψ(u) ↦ Ψ(u)⁻¹` on coordinates and on components.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::components::{classify_point, count_components, representatives, ComponentLabel, Provenance};
use crate::error::{Error, Result};
use crate::flag::{require_self_opposite, ThetaSet};
use crate::linalg::{rat, Rational};
use crate::transversality::s_matrix_of;
use crate::unipotent::{psi_chart, UnipotentCoords};

/// Coordinates of `Ψ(u)⁻¹`.
///
/// The `a` and `v⁰` coordinates follow triangular recursions in the
/// original coordinates; `b_j^m` is read off `S(u)` since the involution
/// transposes `S`, whose lower triangle holds the `b`.
pub fn involution_coords(c: &UnipotentCoords) -> UnipotentCoords {
    let chart = &c.chart;
    let k = chart.k;
    let mut out = UnipotentCoords::zero(chart);
    for j in (1..=k).rev() {
        for i in (1..=k - j).rev() {
            let mut x = -c.a[j - 1][i - 1].clone();
            for l in 1..=k - i - j {
                x -= &out.a[j - 1][k - j - l] * &c.a[j + l - 1][i - 1];
            }
            out.a[j - 1][i - 1] = x;
        }
        let mut v: Vec<Rational> = c.v0[j - 1].iter().map(|x| -x).collect();
        for l in 1..=k - j {
            let f = &c.a[j - 1][k - j - l];
            if !f.is_zero() {
                for (x, y) in v.iter_mut().zip(&out.v0[j + l - 1]) {
                    *x -= f * y;
                }
            }
        }
        out.v0[j - 1] = v;
    }
    let s = s_matrix_of(&psi_chart(c), k);
    for j in 1..=k {
        for m in 1..=k - j {
            // S has b_j^m at (k+1-m, j); transposition moves (j, k+1-m) there.
            out.b[j - 1][m - 1] = s[(j - 1, k - m)].clone();
        }
    }
    out
}

/// Whether a component is mapped to itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Stable,
    Swapped,
}

/// One row of [`component_involution`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvolutionRow {
    pub label: ComponentLabel,
    pub image: ComponentLabel,
    pub fixed: bool,
}

/// The involution on component labels.
#[derive(Clone, Debug, Serialize)]
pub struct InvolutionMap {
    pub rows: Vec<InvolutionRow>,
}

impl InvolutionMap {
    pub fn fixed(&self) -> usize {
        self.rows.iter().filter(|r| r.fixed).count()
    }

    pub fn moved(&self) -> usize {
        self.rows.len() - self.fixed()
    }

    pub fn image(&self, l: &ComponentLabel) -> Option<&ComponentLabel> {
        self.rows.iter().find(|r| &r.label == l).map(|r| &r.image)
    }

    /// Whether applying the map twice gives the identity on every label.
    pub fn is_involution(&self) -> bool {
        self.rows.iter().all(|r| self.image(&r.image) == Some(&r.label))
    }
}

/// Seed and sampling budget used for representatives.
pub const REPRESENTATIVE_SEED: u64 = 7;
pub const REPRESENTATIVE_BUDGET: usize = 20_000;

/// The action of the involution on components: one representative per
/// label is classified before and after the involution.
pub fn component_involution(theta: &ThetaSet) -> Result<InvolutionMap> {
    require_self_opposite(theta)?;
    let reps = representatives(theta, REPRESENTATIVE_SEED, REPRESENTATIVE_BUDGET)?;
    let mut rows = Vec::with_capacity(reps.len());
    let mut rng = ChaCha8Rng::seed_from_u64(REPRESENTATIVE_SEED);
    for (label, c) in reps {
        let image = image_label(&label, &c, &mut rng)?;
        rows.push(InvolutionRow { fixed: image == label, label, image });
    }
    Ok(InvolutionMap { rows })
}

/// Label of `i(u)`. When the image sits on a vanishing locus of some
/// needed sign, nearby points with the same label are used instead.
fn image_label(label: &ComponentLabel, c: &UnipotentCoords, rng: &mut ChaCha8Rng) -> Result<ComponentLabel> {
    let mut last = Error::Unstable(0);
    for attempt in 0..24u32 {
        let cand = if attempt == 0 {
            c.clone()
        } else {
            let scale = rat(1, 1 << (attempt % 12 + 2));
            let xs: Vec<Rational> =
                c.flatten().into_iter().map(|x| x + &scale * rat(rng.gen_range(-16..=16), 16)).collect();
            let cand = UnipotentCoords::unflatten(&c.chart, &xs)?;
            if classify_point(&cand).ok().as_ref() != Some(label) {
                continue;
            }
            cand
        };
        match classify_point(&involution_coords(&cand)) {
            Ok(l) => return Ok(l),
            Err(e @ (Error::Unstable(_) | Error::Degenerate(_))) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// Action on the two components of `SO(q,q)/P_q`, told apart by the sign
/// of `Pf(S)`: the involution negates `S`.
pub fn pfaffian_parity(q: usize) -> Result<Action> {
    if q % 2 == 1 {
        return Err(Error::NotSelfOpposite { p: q, q, theta: q.to_string() });
    }
    Ok(if q.is_multiple_of(4) { Action::Stable } else { Action::Swapped })
}

/// Which theorem table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Theorem {
    A,
    B,
    C,
}

impl std::str::FromStr for Theorem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Theorem::A),
            "B" | "b" => Ok(Theorem::B),
            "C" | "c" => Ok(Theorem::C),
            _ => Err(Error::Parse(format!("unknown theorem {s:?}"))),
        }
    }
}

/// Stated counts for one instance of a theorem table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Expected {
    pub count: usize,
    /// Number of stable components, `None` where the action is not stated.
    pub stable: Option<usize>,
}

/// One instance of a theorem table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableCase {
    pub p: usize,
    pub q: usize,
    pub theta: &'static str,
    pub expected: Expected,
}

const fn case(p: usize, q: usize, theta: &'static str, count: usize, stable: Option<usize>) -> TableCase {
    TableCase { p, q, theta, expected: Expected { count, stable } }
}

/// Desk-scale instances of each theorem, with the stated counts.
pub fn table_cases(t: Theorem) -> Vec<TableCase> {
    match t {
        Theorem::A => vec![
            case(5, 3, "1", 2, Some(2)),
            case(5, 3, "2", 2, Some(2)),
            case(5, 3, "3", 1, Some(1)),
            case(5, 3, "1,3", 2, Some(2)),
            case(6, 4, "1,2", 4, Some(4)),
            case(6, 4, "2,4", 2, Some(2)),
            case(4, 2, "1", 3, Some(1)),
            case(4, 2, "1,2", 3, Some(1)),
            case(5, 3, "1,2", 11, Some(6)),
            case(5, 3, "1,2,3", 11, Some(6)),
            case(6, 4, "1,2,3", 24, Some(8)),
            case(6, 4, "1,2,3,4", 24, Some(8)),
            case(7, 5, "1,2,3,4", 48, Some(16)),
        ],
        Theorem::B => vec![
            case(4, 3, "1", 2, Some(2)),
            case(4, 3, "3", 2, Some(2)),
            case(4, 3, "2,3", 4, Some(4)),
            case(3, 2, "2", 2, Some(0)),
            case(5, 4, "4", 2, Some(2)),
            case(5, 4, "2,4", 4, Some(4)),
            case(6, 5, "5", 2, Some(0)),
            case(7, 6, "6", 2, Some(0)),
            case(3, 2, "1", 3, Some(1)),
            case(3, 2, "1,2", 8, Some(0)),
            case(4, 3, "1,2", 11, Some(6)),
            case(4, 3, "1,2,3", 30, Some(6)),
            case(5, 4, "1,2,3", 24, Some(12)),
            case(5, 4, "1,2,3,4", 72, Some(16)),
        ],
        Theorem::C => vec![
            case(3, 3, "1", 2, Some(2)),
            case(4, 4, "1,2", 4, Some(4)),
            case(2, 2, "2", 2, Some(0)),
            case(4, 4, "4", 2, Some(2)),
            case(4, 4, "1,4", 4, Some(4)),
            case(6, 6, "6", 2, Some(0)),
            case(2, 2, "2,qp", 4, Some(0)),
            case(4, 4, "4,qp", 4, None),
            case(4, 4, "1,4,qp", 8, None),
            case(3, 3, "1,3,qp", 20, None),
            case(4, 4, "1,2,4,qp", 48, None),
        ],
    }
}

/// A computed row of a theorem table.
#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub p: usize,
    pub q: usize,
    pub theta: String,
    pub count: usize,
    pub positive: Option<usize>,
    pub stable: Option<usize>,
    pub swapped: Option<usize>,
    /// Components whose image is not computed.
    pub unknown: usize,
    pub provenance: Provenance,
    pub expected: Expected,
}

impl TableRow {
    /// Whether the computed values agree with the stated ones.
    pub fn matches(&self) -> bool {
        self.count == self.expected.count && (self.expected.stable.is_none() || self.stable == self.expected.stable)
    }
}

/// Computes one table row. The involution is evaluated only where the
/// theorem states its action; elsewhere every component counts as unknown.
pub fn table_row(c: &TableCase) -> Result<TableRow> {
    let sig = crate::quadratic::Signature::new(c.p, c.q)?;
    let theta = ThetaSet::parse(sig, c.theta)?;
    let count = count_components(&theta)?;
    let (stable, swapped, unknown) = match c.expected.stable {
        Some(_) => {
            let map = component_involution(&theta)?;
            if map.rows.len() != count.count || !map.is_involution() {
                return Err(Error::Inconsistent(format!(
                    "{} images for {} components of {}",
                    map.rows.len(),
                    count.count,
                    theta
                )));
            }
            (Some(map.fixed()), Some(map.moved()), 0)
        }
        None => (None, None, count.count),
    };
    Ok(TableRow {
        p: c.p,
        q: c.q,
        theta: c.theta.to_string(),
        count: count.count,
        positive: count.positive,
        stable,
        swapped,
        unknown,
        provenance: count.provenance,
        expected: c.expected.clone(),
    })
}

/// All rows of a theorem table.
pub fn theorem_table(t: Theorem) -> Result<Vec<TableRow>> {
    table_cases(t).iter().map(table_row).collect()
}

/// Histogram of images, for reporting.
pub fn image_counts(map: &InvolutionMap) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for r in &map.rows {
        *out.entry(r.image.to_string()).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::quadratic::Signature;
    use crate::unipotent::Chart;

    fn theta(p: usize, q: usize, t: &str) -> ThetaSet {
        ThetaSet::parse(Signature::new(p, q).unwrap(), t).unwrap()
    }

    #[test]
    fn inverse_and_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (p, q, t) in [(4, 3, "1,2"), (5, 3, "1,2,3"), (6, 5, "1,2,3,4"), (5, 4, "1,3,4"), (4, 4, "1,4,qp")] {
            let ch = Chart::new(&theta(p, q, t));
            for _ in 0..5 {
                let c = UnipotentCoords::random(&ch, &mut rng, 7);
                let i = involution_coords(&c);
                let u = psi_chart(&c);
                let ui = psi_chart(&i);
                assert_eq!(&ui * &u, Matrix::identity(ch.n()), "{p} {q} {t}");
                assert_eq!(s_matrix_of(&ui, ch.k), s_matrix_of(&u, ch.k).transpose());
                assert_eq!(involution_coords(&i), c);
            }
        }
    }

    #[test]
    fn single_factor_negates() {
        let ch = Chart::new(&theta(5, 3, "1"));
        let c = UnipotentCoords::random(&ch, &mut ChaCha8Rng::seed_from_u64(1), 5);
        let i = involution_coords(&c);
        assert_eq!(i.v0[0], c.v0[0].iter().map(|x| -x).collect::<Vec<_>>());
    }

    #[test]
    fn pfaffian_parity_by_residue() {
        assert_eq!(pfaffian_parity(4).unwrap(), Action::Stable);
        assert_eq!(pfaffian_parity(6).unwrap(), Action::Swapped);
        assert!(pfaffian_parity(3).is_err());
    }

    #[test]
    fn small_maps() {
        let m = component_involution(&theta(5, 3, "1,2")).unwrap();
        assert!(m.is_involution());
        assert_eq!(m.rows.len(), 11);
        let m = component_involution(&theta(3, 2, "2")).unwrap();
        assert_eq!(m.fixed(), 0);
        let m = component_involution(&theta(6, 4, "1,2")).unwrap();
        assert_eq!(m.fixed(), 4);
    }
}
