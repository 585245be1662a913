//! Component counts and point classification for every `(p, q, Θ)` regime.
//!
//! A point is a chart element `U` with `U·F₀` transverse to `F₀`. Each
//! regime reads a label off sign data of minors of `U` (or of its
//! projection to fewer levels); the label set is in bijection with the
//! connected components.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flag::{require_self_opposite, Root, ThetaSet};
use crate::linalg::{int, rat, sign, Matrix, Rational};
use crate::quadratic::{eval_q, Signature};
use crate::sign_matrix::{
    alteration_class, class_labels, theta_positive_reference, SignMatrix, SubmaxLabel, Symbol,
};
use crate::transversality::{
    det_i, previous_stage, s_matrix_of, sign_from_minors, stage_factor_vectors,
};
use crate::unipotent::{peel, project, psi_chart, psi_factors, Chart, UnipotentCoords};

/// How the components of a root set are labelled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Signs of `detᵢ` for every level.
    MinorSigns,
    /// `p > q+1` with `q ∈ Θ ≠ {1..q}`: signs of `detᵢ` below `q`.
    DropTop,
    /// `Θ = {1..q-1}` with `p > q`: the alteration class of the sign matrix.
    Submax,
    /// `p > q+1`, `Θ = {1..q}`: the alteration class of the projection to `{1..q-1}`.
    SubmaxProjected,
    /// `p = q+1`, `q ∈ Θ ≠ {1..q}`: lower `detᵢ` signs and the sign of `f`.
    SplitPartial,
    /// `p = q+1`, `Θ = {1..q}`.
    SplitFull,
    /// `p = q`, exactly one of `q, q'`: lower signs and the Pfaffian sign.
    Pfaffian,
    /// `p = q`, both `q` and `q'` but not the full flag: lower signs and a quadrant.
    Quadrant,
    /// `p = q` full flags with `q >= 3`: count from the published table only.
    PublishedTable,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("plain enum");
        write!(f, "{}", s.as_str().expect("string tag"))
    }
}

/// Where a count comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Enumerated by the alteration engine.
    Engine,
    /// Enumerated from a classification rule.
    Rule,
    /// Looked up in a published table.
    PublishedTable,
}

/// Label of a connected component.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum ComponentLabel {
    MinorSigns { levels: Vec<usize>, signs: Vec<i8> },
    Submax { class: SubmaxLabel },
    /// Split full flags: a non-positive class with the sign of `f`, or a
    /// positive class with the least sign vector of its graph component.
    SplitMax { class: SubmaxLabel, f_sign: Option<i8>, component: Option<Vec<i8>> },
    SplitPartial { levels: Vec<usize>, signs: Vec<i8>, f_sign: i8 },
    PfaffSign { levels: Vec<usize>, signs: Vec<i8>, pfaffian: i8 },
    Quadrant { levels: Vec<usize>, signs: Vec<i8>, quadrant: [u8; 2] },
    TableIndex { index: usize },
}

fn sign_word(s: &[i8]) -> String {
    s.iter().map(|&x| if x > 0 { '+' } else { '-' }).collect()
}

impl fmt::Display for ComponentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentLabel::MinorSigns { signs, .. } => write!(f, "det[{}]", sign_word(signs)),
            ComponentLabel::Submax { class } => write!(f, "{class}"),
            ComponentLabel::SplitMax { class, f_sign: Some(s), .. } => {
                write!(f, "{class} f{}", sign_word(&[*s]))
            }
            ComponentLabel::SplitMax { class, component, .. } => {
                write!(f, "{class} x[{}]", sign_word(component.as_deref().unwrap_or(&[])))
            }
            ComponentLabel::SplitPartial { signs, f_sign, .. } => {
                write!(f, "det[{}] f{}", sign_word(signs), sign_word(&[*f_sign]))
            }
            ComponentLabel::PfaffSign { signs, pfaffian, .. } => {
                write!(f, "det[{}] pf{}", sign_word(signs), sign_word(&[*pfaffian]))
            }
            ComponentLabel::Quadrant { signs, quadrant, .. } => {
                write!(f, "det[{}] quadrant{}{}", sign_word(signs), quadrant[0], quadrant[1])
            }
            ComponentLabel::TableIndex { index } => write!(f, "table#{index}"),
        }
    }
}

/// Result of [`count_components`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentCount {
    pub count: usize,
    pub regime: Regime,
    pub provenance: Provenance,
    /// Θ-positive components (totally positive ones for split full flags).
    pub positive: Option<usize>,
    /// Every label; empty for published-table counts.
    pub labels: Vec<ComponentLabel>,
}

fn full_lower(theta: &ThetaSet, upto: usize) -> bool {
    theta.lower() == (1..=upto).collect::<Vec<_>>()
}

/// The regime of a self-opposite root set.
pub fn regime(theta: &ThetaSet) -> Result<Regime> {
    require_self_opposite(theta)?;
    let sig = theta.sig();
    let q = sig.q;
    if q < 2 {
        return Err(Error::Unsupported("q must be at least 2".into()));
    }
    if sig.p > sig.q {
        let top = theta.contains(Root::Index(q));
        let initial = full_lower(theta, q - 1);
        return Ok(match (top, initial, sig.p == q + 1) {
            (false, true, _) => Regime::Submax,
            (false, false, _) => Regime::MinorSigns,
            (true, true, false) => Regime::SubmaxProjected,
            (true, false, false) => Regime::DropTop,
            (true, true, true) => Regime::SplitFull,
            (true, false, true) => Regime::SplitPartial,
        });
    }
    let both = theta.contains(Root::Prime) && theta.contains(Root::Index(q));
    Ok(if both {
        if full_lower(theta, q - 2) && q >= 3 {
            Regime::PublishedTable
        } else {
            Regime::Quadrant
        }
    } else if theta.has_top() {
        Regime::Pfaffian
    } else {
        Regime::MinorSigns
    })
}

fn sign_tuples(n: usize) -> Vec<Vec<i8>> {
    (0..1u32 << n).map(|b| (0..n).map(|j| if b >> j & 1 == 0 { 1 } else { -1 }).collect()).collect()
}

/// Levels whose `detᵢ` signs enter the label.
fn label_levels(theta: &ThetaSet, regime: Regime) -> Vec<usize> {
    match regime {
        Regime::MinorSigns => theta.levels(),
        _ => theta.lower(),
    }
}

/// Positive sign matrices for `q`, in sign-tuple order.
fn positive_matrices(q: usize) -> Vec<SignMatrix> {
    sign_tuples(q - 1).iter().map(|s| theta_positive_reference(s)).collect()
}

/// Flip graph on `{±}^q` of a positive class: `(s_j, s_{j+1})` may flip
/// together when `s_j s_{j+1} = β_j` (see `flip_signs`). Returns the
/// greatest member of the orbit of `s`.
pub fn split_component(m: &SignMatrix, s: &[i8]) -> Vec<i8> {
    let q = m.q();
    let beta = flip_signs(m);
    let mut seen = BTreeSet::from([s.to_vec()]);
    let mut queue = VecDeque::from([s.to_vec()]);
    while let Some(x) = queue.pop_front() {
        for j in 0..q - 1 {
            if x[j] * x[j + 1] == beta[j] {
                let mut y = x.clone();
                y[j] = -y[j];
                y[j + 1] = -y[j + 1];
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
    }
    // Least in the order where + precedes -.
    seen.into_iter().max().expect("nonempty")
}

/// Published counts for full flags of `SO(q,q)`.
pub fn published_full_flag_count(q: usize) -> usize {
    match q {
        3 => 20,
        _ => 3 << q,
    }
}

/// Number of connected components and their labels.
pub fn count_components(theta: &ThetaSet) -> Result<ComponentCount> {
    let reg = regime(theta)?;
    let sig = theta.sig();
    let q = sig.q;
    let lower_levels = label_levels(theta, reg);
    let minor_labels = |levels: &[usize]| -> Vec<(Vec<usize>, Vec<i8>)> {
        sign_tuples(levels.len()).into_iter().map(|s| (levels.to_vec(), s)).collect()
    };
    let (labels, provenance, positive): (Vec<ComponentLabel>, Provenance, Option<usize>) = match reg {
        Regime::MinorSigns | Regime::DropTop => (
            minor_labels(&lower_levels)
                .into_iter()
                .map(|(levels, signs)| ComponentLabel::MinorSigns { levels, signs })
                .collect(),
            Provenance::Rule,
            None,
        ),
        Regime::Submax | Regime::SubmaxProjected => {
            let classes = class_labels(q);
            let pos = classes.iter().filter(|c| c.is_positive()).count();
            (
                classes.into_iter().map(|class| ComponentLabel::Submax { class }).collect(),
                Provenance::Engine,
                Some(pos),
            )
        }
        Regime::SplitPartial => (
            minor_labels(&lower_levels)
                .into_iter()
                .flat_map(|(levels, signs)| {
                    [1, -1].map(|f_sign| ComponentLabel::SplitPartial {
                        levels: levels.clone(),
                        signs: signs.clone(),
                        f_sign,
                    })
                })
                .collect(),
            Provenance::Rule,
            None,
        ),
        Regime::SplitFull => {
            let mut out = Vec::new();
            let mut totally = 0;
            for class in class_labels(q) {
                if let SubmaxLabel::Positive { signs } = &class {
                    let m = theta_positive_reference(signs);
                    let comps: BTreeSet<Vec<i8>> =
                        sign_tuples(q).iter().map(|s| split_component(&m, s)).collect();
                    totally += sign_tuples(q).iter().filter(|s| is_isolated(&m, s)).count();
                    for c in comps {
                        out.push(ComponentLabel::SplitMax { class: class.clone(), f_sign: None, component: Some(c) });
                    }
                } else {
                    for f in [1, -1] {
                        out.push(ComponentLabel::SplitMax { class: class.clone(), f_sign: Some(f), component: None });
                    }
                }
            }
            (out, Provenance::Engine, Some(totally))
        }
        Regime::Pfaffian => (
            minor_labels(&lower_levels)
                .into_iter()
                .flat_map(|(levels, signs)| {
                    [1, -1].map(|pfaffian| ComponentLabel::PfaffSign {
                        levels: levels.clone(),
                        signs: signs.clone(),
                        pfaffian,
                    })
                })
                .collect(),
            Provenance::Rule,
            None,
        ),
        Regime::Quadrant => (
            minor_labels(&lower_levels)
                .into_iter()
                .flat_map(|(levels, signs)| {
                    [[0, 0], [0, 1], [1, 0], [1, 1]].map(|quadrant| ComponentLabel::Quadrant {
                        levels: levels.clone(),
                        signs: signs.clone(),
                        quadrant,
                    })
                })
                .collect(),
            Provenance::Rule,
            None,
        ),
        Regime::PublishedTable => {
            let count = published_full_flag_count(q);
            return Ok(ComponentCount {
                count,
                regime: reg,
                provenance: Provenance::PublishedTable,
                positive: None,
                labels: Vec::new(),
            });
        }
    };
    let mut labels = labels;
    labels.sort();
    Ok(ComponentCount { count: labels.len(), regime: reg, provenance, positive, labels })
}

/// Whether a component is Θ-positive, where the regime has a positivity
/// notion: submaximal classes, and for split full flags the isolated
/// (totally positive) components of positive classes.
pub fn is_positive_label(label: &ComponentLabel) -> Option<bool> {
    match label {
        ComponentLabel::Submax { class } => Some(class.is_positive()),
        ComponentLabel::SplitMax { class: SubmaxLabel::Positive { signs }, component: Some(c), .. } => {
            Some(is_isolated(&theta_positive_reference(signs), c))
        }
        ComponentLabel::SplitMax { .. } => Some(false),
        _ => None,
    }
}

fn is_isolated(m: &SignMatrix, s: &[i8]) -> bool {
    let beta = flip_signs(m);
    (0..m.q() - 1).all(|j| s[j] * s[j + 1] != beta[j])
}

/// `β_j = -b_j b_{j+1}`, where `b_j` is the sign of the first entry of row
/// `j` of a positive sign matrix and `b_q = -1`. Crossing `v_j = 0` with
/// `v_{j+1}` changing sign too is possible exactly where `x_j x_{j+1} = β_j`.
fn flip_signs(m: &SignMatrix) -> Vec<i8> {
    let q = m.q();
    let b: Vec<i8> = (1..q)
        .map(|j| if m.get(j, 0) == Symbol::Plus { 1 } else { -1 })
        .chain([-1])
        .collect();
    (0..q - 1).map(|j| -b[j] * b[j + 1]).collect()
}

fn degenerate(what: &str) -> Error {
    Error::Degenerate(what.into())
}

fn nonzero(s: i8, what: &str) -> Result<i8> {
    if s == 0 {
        Err(degenerate(what))
    } else {
        Ok(s)
    }
}

fn det_signs(u: &Matrix, levels: &[usize]) -> Result<Vec<i8>> {
    levels.iter().map(|&l| nonzero(sign(&det_i(u, l)?), "det")).collect()
}

/// Sign matrix of a chart-frame element with levels `1..q-1`, `p > q`.
pub fn sign_matrix_of(sig: Signature, u: &Matrix) -> Result<SignMatrix> {
    SignMatrix::from_sign_vector(&sign_from_minors(sig, u, sig.q - 1))
}

/// Signs of the first coordinates of `v_j^{0,(j-1)}` for `p = q+1`, `k = q`.
fn x_signs(sig: Signature, u: &Matrix) -> Result<Vec<i8>> {
    let sv = sign_from_minors(sig, u, sig.q);
    sv.firstcoord
        .expect("split signature")
        .into_iter()
        .map(|s| nonzero(s, "x sign"))
        .collect()
}

/// Quadrant bits from the staged vectors of the projection to level `q-1`.
fn quadrant(sig: Signature, u: &Matrix) -> Result<[u8; 2]> {
    let m = sig.q - 1;
    let proj = project(sig, u, &[m])?;
    let st = stage_factor_vectors(sig, &peel(sig, m, &proj).0);
    if !st.complete() {
        return Err(degenerate("quadrant stage"));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for j in 1..=m {
        let v = st.v(j, 0, j - 1).ok_or_else(|| degenerate("quadrant stage"))?;
        xs.push(u8::from(nonzero(sign(&v[0]), "quadrant x")? < 0));
        ys.push(u8::from(nonzero(sign(&v[1]), "quadrant y")? < 0));
    }
    let (mut a, mut b) = (0u8, 0u8);
    for (t, j) in (1..=m).rev().enumerate() {
        if t % 2 == 0 {
            a ^= xs[j - 1];
            b ^= ys[j - 1];
        } else {
            a ^= ys[j - 1];
            b ^= xs[j - 1];
        }
    }
    Ok([a, b])
}

/// Label of a chart-frame element, or `Degenerate` when some sign that
/// the regime needs vanishes. Transversality is checked by the caller.
pub fn label_of_chart_matrix(theta: &ThetaSet, u: &Matrix) -> Result<ComponentLabel> {
    let reg = regime(theta)?;
    let sig = theta.sig();
    let q = sig.q;
    let levels = label_levels(theta, reg);
    let signs = || det_signs(u, &levels);
    Ok(match reg {
        Regime::MinorSigns | Regime::DropTop => ComponentLabel::MinorSigns { levels: levels.clone(), signs: signs()? },
        Regime::Submax => ComponentLabel::Submax { class: alteration_class(&sign_matrix_of(sig, u)?)? },
        Regime::SubmaxProjected => {
            let proj = project(sig, u, &(1..q).collect::<Vec<_>>())?;
            ComponentLabel::Submax { class: alteration_class(&sign_matrix_of(sig, &proj)?)? }
        }
        Regime::SplitPartial => {
            let f_sign = x_signs(sig, u)?.iter().product();
            ComponentLabel::SplitPartial { levels: levels.clone(), signs: signs()?, f_sign }
        }
        Regime::SplitFull => {
            let proj = project(sig, u, &(1..q).collect::<Vec<_>>())?;
            let class = alteration_class(&sign_matrix_of(sig, &proj)?)?;
            let xs = x_signs(sig, u)?;
            match &class {
                SubmaxLabel::Positive { signs } => {
                    let component = Some(split_component(&theta_positive_reference(signs), &xs));
                    ComponentLabel::SplitMax { class, f_sign: None, component }
                }
                SubmaxLabel::NonPositive { .. } => {
                    ComponentLabel::SplitMax { class, f_sign: Some(xs.iter().product()), component: None }
                }
            }
        }
        Regime::Pfaffian => {
            let proj = project(sig, u, &[q])?;
            let pf = s_matrix_of(&proj, q).pfaffian()?;
            ComponentLabel::PfaffSign { levels: levels.clone(), signs: signs()?, pfaffian: nonzero(sign(&pf), "pfaffian")? }
        }
        Regime::Quadrant => ComponentLabel::Quadrant { levels: levels.clone(), signs: signs()?, quadrant: quadrant(sig, u)? },
        Regime::PublishedTable => {
            return Err(Error::Unsupported(format!(
                "full flags of SO({q},{q}) are counted from a published table only"
            )))
        }
    })
}

/// Levels at which `det_i` of a chart point vanishes.
pub fn vanishing_levels(chart: &Chart, u: &Matrix) -> Vec<String> {
    chart
        .levels
        .iter()
        .filter(|&&l| det_i(u, l).map(|d| d.is_zero()).unwrap_or(true))
        .map(|l| l.to_string())
        .collect()
}

/// Maximum perturbation scale exponent tried by [`classify_point`].
pub const MAX_PERTURBATION_EXPONENT: u32 = 40;

fn perturbed(c: &UnipotentCoords, rng: &mut ChaCha8Rng, t: u32) -> Result<UnipotentCoords> {
    let eps = Rational::new(1.into(), num_bigint::BigInt::from(1u8) << t);
    let xs: Vec<Rational> = c
        .flatten()
        .into_iter()
        .map(|x| x + &eps * rat(rng.gen_range(-64..=64), 64))
        .collect();
    UnipotentCoords::unflatten(&c.chart, &xs)
}

/// Classifies a chart point. Where some needed sign vanishes, exact random
/// perturbations of size `2^-t` that keep every `detᵢ` sign are tried with
/// growing `t` until two independent draws agree.
pub fn classify_point(c: &UnipotentCoords) -> Result<ComponentLabel> {
    let theta = &c.chart.theta;
    let u = psi_chart(c);
    let bad = vanishing_levels(&c.chart, &u);
    if !bad.is_empty() {
        return Err(Error::NotTransverse(bad));
    }
    match label_of_chart_matrix(theta, &u) {
        Err(Error::Degenerate(_)) => {}
        other => return other,
    }
    let base = det_signs(&u, &c.chart.levels)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut attempts = 0;
    for t in 6..=MAX_PERTURBATION_EXPONENT {
        let mut found = Vec::new();
        for _ in 0..8 {
            attempts += 1;
            let pc = perturbed(c, &mut rng, t)?;
            let pu = psi_chart(&pc);
            if det_signs(&pu, &c.chart.levels).ok().as_ref() != Some(&base) {
                continue;
            }
            match label_of_chart_matrix(theta, &pu) {
                Ok(l) => found.push(l),
                Err(Error::Degenerate(_)) => continue,
                Err(e) => return Err(e),
            }
            if found.len() == 2 {
                break;
            }
        }
        if found.len() == 2 && found[0] == found[1] {
            return Ok(found.swap_remove(0));
        }
    }
    Err(Error::Unstable(attempts))
}

/// Classifies a matrix of the chart of `theta` (in the actual frame).
pub fn classify_matrix(theta: &ThetaSet, u: &Matrix) -> Result<ComponentLabel> {
    let chart = Chart::new(theta);
    if u.rows() != chart.n() || u.cols() != chart.n() {
        return Err(Error::Dimension(format!("expected a {0}x{0} matrix", chart.n())));
    }
    let bad = vanishing_levels(&chart, &chart.frame(u));
    if !bad.is_empty() {
        return Err(Error::NotTransverse(bad));
    }
    classify_point(&crate::unipotent::psi_inverse(&chart, u)?)
}

/// A chart point (levels `1..q-1`, `p > q`) whose sign matrix is `m`.
///
/// Row `i` becomes the staged vector `v_i^{q-1-i,(i-1)}` built outward from
/// `v_i^0`: a `∗` keeps the color with `a = 0`, any other entry sets `b` to
/// its sign and solves for `a`; the stages are then undone.
pub fn realize_sign_matrix(sig: Signature, m: &SignMatrix) -> Result<UnipotentCoords> {
    realize_sign_matrix_with(sig, m, None)
}

/// As [`realize_sign_matrix`], with random magnitudes when `rng` is given.
pub fn realize_sign_matrix_with(
    sig: Signature,
    m: &SignMatrix,
    mut rng: Option<&mut ChaCha8Rng>,
) -> Result<UnipotentCoords> {
    let q = sig.q;
    if sig.p <= q || m.q() != q {
        return Err(Error::Unsupported("sign matrices need p > q and matching q".into()));
    }
    let mut draw = move |signed: bool| match rng.as_mut() {
        Some(r) => {
            let x = rat(r.gen_range(1..=40), r.gen_range(1..=8));
            if signed && r.gen_bool(0.5) {
                -x
            } else {
                x
            }
        }
        None => rat(1, 1),
    };
    let k = q - 1;
    let core = sig.reduced(k);
    let len0 = core.dim();
    let mut rows = Vec::new();
    for i in 1..=k {
        let mut v = vec![Rational::zero(); len0];
        match m.get(i, 0) {
            Symbol::Star => v[1] = draw(true),
            s => {
                let f = rat(if s == Symbol::Plus { 1 } else { -1 }, 1);
                let (e, et) = (draw(false), draw(false));
                // Keep the Euclidean part below the timelike part.
                let x = &e * &et;
                let flip = draw(true);
                v[1] = &x / ((draw(false) + rat(1, 1)) * (&x + rat(1, 1)));
                if sign(&flip) < 0 {
                    v[1] = -v[1].clone();
                }
                v[0] = &f * e;
                v[len0 - 1] = -f * et;
            }
        }
        for l in 1..=k - i {
            let inner_q = eval_q(Signature { p: core.p + l - 1, q: core.q + l - 1 }, &v);
            let (b, a) = match m.get(i, l) {
                Symbol::Star => (draw(false), Rational::zero()),
                sym => {
                    let b = rat(if sym == Symbol::Plus { 1 } else { -1 }, 1) * draw(false);
                    let target = if sign(&inner_q) < 0 { draw(false) } else { -draw(false) };
                    let a = (target - &inner_q) / (rat(2, 1) * &b);
                    (b, a)
                }
            };
            let mut w = vec![b];
            w.extend(v);
            w.push(a);
            v = w;
        }
        rows.push(v);
    }
    let chart = Chart::with_levels(sig, &(1..=k).collect::<Vec<_>>())?;
    UnipotentCoords::from_factor_vectors(&chart, &undo_stages(sig, &rows)?)
}

/// Factor vectors whose staged rows are `rows[j-1] = v_j^{k-j,(j-1)}`.
pub fn undo_stages(sig: Signature, rows: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    let k = rows.len();
    // Stage k-1 holds only the last row; undo stages down to 0.
    let mut ws = vec![rows[k - 1].clone()];
    for st in (0..k - 1).rev() {
        ws = previous_stage(sig.reduced(st), &rows[st], &ws)?;
    }
    Ok(ws)
}

/// A full-flag chart point of `SO(q+1,q)` in the cell given by sign bits:
/// one per `v_j^{0,(j-1)}`, then per staged pair `(b, Q)` row by row.
/// Magnitudes are random.
pub fn realize_split_cell(sig: Signature, bits: u64, rng: &mut ChaCha8Rng) -> Result<UnipotentCoords> {
    let q = sig.q;
    if sig.p != q + 1 {
        return Err(Error::Unsupported("split cells need p = q+1".into()));
    }
    let mut bit = 0;
    let mut next_sign = || {
        let s = if bits >> bit & 1 == 0 { 1 } else { -1 };
        bit += 1;
        rat(s, 1)
    };
    let mut mag = || int(rng.gen_range(1..=9));
    let mut rows = Vec::with_capacity(q);
    for j in 1..=q {
        let mut v = vec![next_sign() * mag()];
        for i in 1..=q - j {
            let inner_q = eval_q(sig.reduced(q - i + 1), &v);
            let b = next_sign() * mag();
            let target = next_sign() * mag();
            let a = (target - &inner_q) / (rat(2, 1) * &b);
            let mut w = vec![b];
            w.extend(v);
            w.push(a);
            v = w;
        }
        rows.push(v);
    }
    let chart = Chart::with_levels(sig, &(1..=q).collect::<Vec<_>>())?;
    UnipotentCoords::from_factor_vectors(&chart, &undo_stages(sig, &rows)?)
}

/// Number of sign bits taken by [`realize_split_cell`].
pub fn split_cell_bits(q: usize) -> u32 {
    (q + q * (q - 1)) as u32
}

/// Check used by callers that need a chart element from factor vectors.
pub fn chart_matrix(sig: Signature, ws: &[Vec<Rational>]) -> Matrix {
    psi_factors(sig, ws)
}

/// Samples chart points of `theta` until every label is hit, recording one
/// representative per label. Deterministic for a given seed.
pub fn representatives(theta: &ThetaSet, seed: u64, budget: usize) -> Result<Vec<(ComponentLabel, UnipotentCoords)>> {
    let count = count_components(theta)?;
    if count.provenance == Provenance::PublishedTable {
        return Err(Error::Unsupported("no labels for published-table counts".into()));
    }
    let want: HashSet<ComponentLabel> = count.labels.iter().cloned().collect();
    let chart = Chart::new(theta);
    let sig = theta.sig();
    let mut found: Vec<(ComponentLabel, UnipotentCoords)> = Vec::new();
    let mut have: HashSet<ComponentLabel> = HashSet::new();
    let mut add = |l: ComponentLabel, c: UnipotentCoords, found: &mut Vec<_>| {
        if want.contains(&l) && have.insert(l.clone()) {
            found.push((l, c));
        }
    };
    // Initial root sets above the submaximal level are built from sign
    // matrices; an extra last factor leaves the levels below q unchanged.
    let initial = chart.levels == (1..chart.k + 1).collect::<Vec<_>>();
    let constructive = sig.p > sig.q && initial && chart.k + 1 >= sig.q;
    let members = if constructive { class_members(sig.q) } else { Vec::new() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let build = |member: &SignMatrix, rng: Option<&mut ChaCha8Rng>, tail: Option<Rational>| -> Option<UnipotentCoords> {
        let mut ws = realize_sign_matrix_with(sig, member, rng).ok()?.factor_vectors();
        if chart.k == sig.q {
            let mut w = vec![Rational::zero(); sig.p - sig.q];
            w[0] = tail?;
            ws.push(w);
        }
        UnipotentCoords::from_factor_vectors(&chart, &ws).ok()
    };
    for member in &members {
        if let Some(c) = build(member, None, Some(rat(1, 1))) {
            if let Ok(l) = classify_point(&c) {
                add(l, c, &mut found);
            }
        }
    }
    // Full flags of the split group: one draw per staged sign cell.
    if count.regime == Regime::SplitFull {
        for bits in 0..1u64 << split_cell_bits(sig.q) {
            if found.len() == want.len() {
                break;
            }
            if let Ok(c) = realize_split_cell(sig, bits, &mut rng) {
                if let Ok(l) = classify_point(&c) {
                    add(l, c, &mut found);
                }
            }
        }
    }
    let mut tries = 0;
    while found.len() < want.len() {
        if tries >= budget {
            return Err(Error::Budget);
        }
        tries += 1;
        let c = if !members.is_empty() && tries % 2 == 0 {
            let member = &members[rng.gen_range(0..members.len())];
            let tail = rat(rng.gen_range(-30..=30), rng.gen_range(1..=9));
            if tail.is_zero() {
                continue;
            }
            match build(member, Some(&mut rng), Some(tail)) {
                Some(c) => c,
                None => continue,
            }
        } else {
            let range = [1, 3, 9, 30][tries % 4];
            UnipotentCoords::random(&chart, &mut rng, range)
        };
        match classify_point(&c) {
            Ok(l) => add(l, c, &mut found),
            Err(Error::NotTransverse(_)) | Err(Error::Unstable(_)) => {}
            Err(e) => return Err(e),
        }
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(found)
}

/// One sign matrix per alteration class for `q`, preferring few `∗`.
pub fn class_members(q: usize) -> Vec<SignMatrix> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for m in positive_matrices(q) {
        if let Ok(l) = alteration_class(&m) {
            if seen.insert(l) {
                out.push(m);
            }
        }
    }
    if let Some(table) = crate::sign_matrix::class_table(q) {
        for (key, l) in table.labels.iter().enumerate() {
            if seen.insert(l.clone()) {
                out.push(SignMatrix::from_key(q, key as u64));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta(p: usize, q: usize, t: &str) -> ThetaSet {
        ThetaSet::parse(Signature::new(p, q).unwrap(), t).unwrap()
    }

    #[test]
    fn regimes() {
        assert_eq!(regime(&theta(5, 3, "1,2")).unwrap(), Regime::Submax);
        assert_eq!(regime(&theta(5, 3, "1,2,3")).unwrap(), Regime::SubmaxProjected);
        assert_eq!(regime(&theta(5, 3, "1,3")).unwrap(), Regime::DropTop);
        assert_eq!(regime(&theta(5, 3, "1")).unwrap(), Regime::MinorSigns);
        assert_eq!(regime(&theta(4, 3, "1,2,3")).unwrap(), Regime::SplitFull);
        assert_eq!(regime(&theta(4, 3, "2,3")).unwrap(), Regime::SplitPartial);
        assert_eq!(regime(&theta(4, 4, "4")).unwrap(), Regime::Pfaffian);
        assert_eq!(regime(&theta(4, 4, "4,qp")).unwrap(), Regime::Quadrant);
        assert_eq!(regime(&theta(3, 3, "1,3,qp")).unwrap(), Regime::PublishedTable);
        assert_eq!(regime(&theta(2, 2, "2,qp")).unwrap(), Regime::Quadrant);
        assert!(regime(&theta(3, 3, "3")).is_err());
    }

    #[test]
    fn counts() {
        let c = |p, q, t| count_components(&theta(p, q, t)).unwrap();
        assert_eq!(c(5, 3, "1,2").count, 11);
        assert_eq!(c(5, 3, "1,2").positive, Some(4));
        assert_eq!(c(5, 3, "1,2,3").count, 11);
        assert_eq!(c(5, 3, "1").count, 2);
        assert_eq!(c(5, 3, "1,3").count, 2);
        assert_eq!(c(4, 2, "1").count, 3);
        assert_eq!(c(3, 2, "1,2").count, 8);
        let full = c(4, 3, "1,2,3");
        assert_eq!((full.count, full.positive), (30, Some(8)));
        let flagged = full.labels.iter().filter(|l| is_positive_label(l) == Some(true)).count();
        assert_eq!(flagged, 8);
        assert_eq!(c(5, 4, "1,2,3,4").count, 72);
        assert_eq!(c(4, 4, "4,qp").count, 4);
        assert_eq!(c(4, 4, "4").count, 2);
        assert_eq!(c(2, 2, "2").count, 2);
        assert_eq!(c(4, 4, "1,4").count, 4);
        assert_eq!(c(3, 3, "1,3,qp").count, 20);
    }

    #[test]
    fn realized_sign_matrices_have_that_sign_matrix() {
        let sig = Signature::new(5, 3).unwrap();
        for m in class_members(3) {
            let c = realize_sign_matrix(sig, &m).unwrap();
            assert_eq!(sign_matrix_of(sig, &psi_chart(&c)).unwrap(), m, "{m}");
        }
    }

    #[test]
    fn identity_is_not_transverse() {
        let t = theta(5, 3, "1,2");
        let e = classify_matrix(&t, &Matrix::identity(8)).unwrap_err();
        assert_eq!(e, Error::NotTransverse(vec!["1".into(), "2".into()]));
    }
}
