//! Root subsets, isotropic flags, standard flags and transversality.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{rational_sqrt, Matrix, Rational};
use crate::quadratic::{eval_b, eval_q, gram_matrix, Signature};

/// A simple root: `Index(i)` for the `i`-th root, `Prime` for the second
/// maximal root `q'` that only exists when `p = q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Root {
    Index(usize),
    Prime,
}

impl Root {
    /// Dimension of the isotropic subspace at this root.
    pub fn dim(self, sig: Signature) -> usize {
        match self {
            Root::Index(i) => i,
            Root::Prime => sig.q,
        }
    }

    fn order_key(self, q: usize) -> usize {
        match self {
            Root::Index(i) => 2 * i,
            Root::Prime => 2 * q - 1,
        }
    }

    /// Token used on the command line and in files: `3` or `qp`.
    pub fn token(self) -> String {
        match self {
            Root::Index(i) => i.to_string(),
            Root::Prime => "qp".to_string(),
        }
    }
}

/// A nonempty strictly increasing set of simple roots for a given signature.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ThetaSet {
    sig: Signature,
    roots: Vec<Root>,
}

/// Outcome of [`validate_theta`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaVerdict {
    pub valid: bool,
    pub self_opposite: bool,
}

impl ThetaSet {
    /// Builds a root set, sorting the roots and rejecting invalid ones.
    pub fn new(sig: Signature, mut roots: Vec<Root>) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::MalformedTheta("empty root set".into()));
        }
        let (p, q) = (sig.p, sig.q);
        for &r in &roots {
            let ok = match r {
                Root::Index(i) if p > q => (1..=q).contains(&i),
                Root::Index(i) => i == q || (1..=q.saturating_sub(2)).contains(&i),
                Root::Prime => p == q,
            };
            if !ok {
                return Err(Error::MalformedTheta(format!(
                    "root {} does not exist for ({p},{q})",
                    r.token()
                )));
            }
        }
        roots.sort_by_key(|r| r.order_key(q));
        if roots.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::MalformedTheta("repeated root".into()));
        }
        Ok(ThetaSet { sig, roots })
    }

    /// Parses a comma-separated list such as `1,2,qp,4`. The primed root
    /// may also be written `q'`, or as the number `q` followed by `p` or `'`.
    pub fn parse(sig: Signature, s: &str) -> Result<Self> {
        let token = |t: &str| -> Result<Root> {
            let bad = || Error::MalformedTheta(format!("bad token '{t}'"));
            if t == "qp" || t == "q'" {
                return Ok(Root::Prime);
            }
            if let Some(base) = t.strip_suffix('p').or_else(|| t.strip_suffix('\'')) {
                return match base.parse::<usize>() {
                    Ok(v) if v == sig.q => Ok(Root::Prime),
                    _ => Err(bad()),
                };
            }
            t.parse::<usize>().map(Root::Index).map_err(|_| bad())
        };
        let roots = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(token)
            .collect::<Result<Vec<_>>>()?;
        Self::new(sig, roots)
    }

    /// The full flag roots `1..q` (or `1..q-2, q', q` when `p = q`).
    pub fn full(sig: Signature) -> Result<Self> {
        let roots = if sig.p > sig.q {
            (1..=sig.q).map(Root::Index).collect()
        } else {
            let mut r: Vec<Root> = (1..=sig.q.saturating_sub(2)).map(Root::Index).collect();
            r.push(Root::Prime);
            r.push(Root::Index(sig.q));
            r
        };
        Self::new(sig, roots)
    }

    /// Roots `1..k` for `p > q`.
    pub fn first(sig: Signature, k: usize) -> Result<Self> {
        Self::new(sig, (1..=k).map(Root::Index).collect())
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn contains(&self, r: Root) -> bool {
        self.roots.contains(&r)
    }

    /// Whether the last root `q` is present (either `q` or `q'` when `p = q`).
    pub fn has_top(&self) -> bool {
        self.contains(Root::Index(self.sig.q)) || self.contains(Root::Prime)
    }

    /// Roots other than `q` and `q'`, as plain indices.
    pub fn lower(&self) -> Vec<usize> {
        self.roots
            .iter()
            .filter_map(|r| match *r {
                Root::Index(i) if i < self.sig.q => Some(i),
                _ => None,
            })
            .collect()
    }

    /// Whether `{1..k}` for the given `k`, with nothing else.
    pub fn is_initial(&self, k: usize) -> bool {
        self.roots.len() == k && (1..=k).all(|i| self.contains(Root::Index(i)))
    }

    /// When exactly `q'` (and not `q`) is present at `p = q`: the chart is
    /// worked in the frame where `e_q` and `ẽ_q` are exchanged.
    pub fn swapped(&self) -> bool {
        self.contains(Root::Prime) && !self.contains(Root::Index(self.sig.q))
    }

    /// Levels of the unipotent chart: dimensions `i` for which `detᵢ` is a
    /// transversality equation. When both `q` and `q'` are present their
    /// common `(q-1)`-dimensional intersection replaces them.
    pub fn levels(&self) -> Vec<usize> {
        let q = self.sig.q;
        let mut out = self.lower();
        let both = self.contains(Root::Prime) && self.contains(Root::Index(q));
        if both {
            out.push(q - 1);
        } else if self.has_top() {
            out.push(q);
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Largest level.
    pub fn top_level(&self) -> usize {
        *self.levels().last().expect("nonempty")
    }

    /// Comma-separated tokens.
    pub fn tokens(&self) -> Vec<String> {
        self.roots.iter().map(|r| r.token()).collect()
    }
}

impl fmt::Display for ThetaSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.tokens().join(","))
    }
}

/// Validity and self-opposition of a root set.
///
/// Every root set is self-opposite when `p != q`. When `p = q` and `q` is
/// odd, the opposition exchanges `q` and `q'`, so the set must contain
/// both or neither.
pub fn validate_theta(sig: Signature, roots: &[Root]) -> ThetaVerdict {
    match ThetaSet::new(sig, roots.to_vec()) {
        Err(_) => ThetaVerdict { valid: false, self_opposite: false },
        Ok(t) => ThetaVerdict { valid: true, self_opposite: is_self_opposite(&t) },
    }
}

pub fn is_self_opposite(t: &ThetaSet) -> bool {
    let sig = t.sig;
    if sig.p != sig.q || sig.q.is_multiple_of(2) {
        return true;
    }
    t.contains(Root::Prime) == t.contains(Root::Index(sig.q))
}

/// Errors unless the set is self-opposite.
pub fn require_self_opposite(t: &ThetaSet) -> Result<()> {
    if is_self_opposite(t) {
        Ok(())
    } else {
        Err(Error::NotSelfOpposite { p: t.sig.p, q: t.sig.q, theta: t.to_string() })
    }
}

/// A flag: one column-basis matrix per root of `theta`, in root order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flag {
    pub theta: ThetaSet,
    pub subspaces: Vec<Matrix>,
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::from_integer(1.into());
    v
}

/// Index of `ẽ_i` (1-based `i`) in the basis.
fn tilde(sig: Signature, i: usize) -> usize {
    sig.dim() - i
}

impl Flag {
    pub fn sig(&self) -> Signature {
        self.theta.sig()
    }

    /// Image under a linear map.
    pub fn transform(&self, g: &Matrix) -> Flag {
        Flag { theta: self.theta.clone(), subspaces: self.subspaces.iter().map(|s| g * s).collect() }
    }

    /// Whether each subspace is totally isotropic and of full rank.
    pub fn is_valid(&self) -> bool {
        let sig = self.sig();
        self.subspaces.iter().zip(self.theta.roots()).all(|(s, r)| {
            s.cols() == r.dim(sig) && s.rank() == s.cols() && {
                let cols: Vec<Vec<Rational>> = (0..s.cols()).map(|c| s.col(c)).collect();
                cols.iter().all(|a| cols.iter().all(|b| eval_b(sig, a, b).is_zero()))
            }
        })
    }
}

/// The two standard flags `(F₀, F∞)`: `F₀` spanned by `ẽ` vectors and
/// `F∞` by `e` vectors, with `e_q` and `ẽ_q` exchanged at the root `q'`.
pub fn standard_flags(theta: &ThetaSet) -> (Flag, Flag) {
    let sig = theta.sig();
    let n = sig.dim();
    let mut zero = Vec::new();
    let mut inf = Vec::new();
    for &r in theta.roots() {
        let d = r.dim(sig);
        let mut z: Vec<Vec<Rational>> = (1..=d).map(|i| unit(n, tilde(sig, i))).collect();
        let mut f: Vec<Vec<Rational>> = (1..=d).map(|i| unit(n, i - 1)).collect();
        if r == Root::Prime {
            z[d - 1] = unit(n, sig.q - 1);
            f[d - 1] = unit(n, tilde(sig, sig.q));
        }
        zero.push(Matrix::from_columns(&z).expect("columns"));
        inf.push(Matrix::from_columns(&f).expect("columns"));
    }
    (
        Flag { theta: theta.clone(), subspaces: zero },
        Flag { theta: theta.clone(), subspaces: inf },
    )
}

/// Basis of the orthogonal complement of the column span of `s`.
pub fn orthogonal(sig: Signature, s: &Matrix) -> Matrix {
    // v ⊥ s  ⇔  (M s)ᵀ v = 0
    let ms = &gram_matrix(sig) * s;
    let k = ms.transpose().kernel();
    Matrix::from_columns(&k).unwrap_or_else(|_| Matrix::zeros(sig.dim(), 0))
}

fn hstack(a: &Matrix, b: &Matrix) -> Matrix {
    let mut cols: Vec<Vec<Rational>> = (0..a.cols()).map(|c| a.col(c)).collect();
    cols.extend((0..b.cols()).map(|c| b.col(c)));
    Matrix::from_columns(&cols).expect("same height")
}

/// Levels (as root tokens) at which `F₁^i ⊕ (F₂^i)^⊥` fails to be everything.
pub fn non_transverse_levels(f1: &Flag, f2: &Flag) -> Result<Vec<String>> {
    if f1.theta != f2.theta {
        return Err(Error::MalformedTheta("flags with different root sets".into()));
    }
    require_self_opposite(&f1.theta)?;
    let sig = f1.sig();
    let mut bad = Vec::new();
    for ((a, b), r) in f1.subspaces.iter().zip(&f2.subspaces).zip(f1.theta.roots()) {
        let perp = orthogonal(sig, b);
        if hstack(a, &perp).rank() != sig.dim() {
            bad.push(r.token());
        }
    }
    Ok(bad)
}

/// Transversality of two flags with the same self-opposite root set.
pub fn is_transverse(f1: &Flag, f2: &Flag) -> Result<bool> {
    Ok(non_transverse_levels(f1, f2)?.is_empty())
}

/// Dimension of the intersection of two column spans.
pub fn intersection_dim(a: &Matrix, b: &Matrix) -> usize {
    a.rank() + b.rank() - hstack(a, b).rank()
}

/// Which family a maximal isotropic subspace of `ℝ^{q,q}` belongs to:
/// `Root::Index(q)` for the family of `Span(ẽ₁..ẽ_q)`, `Root::Prime` for
/// the other. Two maximal isotropic subspaces lie in the same family iff
/// their intersection has dimension congruent to `q` mod 2.
pub fn maximal_family(sig: Signature, f: &Matrix) -> Result<Root> {
    if sig.p != sig.q || f.cols() != sig.q || f.rank() != sig.q {
        return Err(Error::Dimension("expected a q-dimensional subspace of R^{q,q}".into()));
    }
    let theta = ThetaSet::new(sig, vec![Root::Index(sig.q)])?;
    let f0 = &standard_flags(&theta).0.subspaces[0];
    if intersection_dim(f, f0) % 2 == sig.q % 2 {
        Ok(Root::Index(sig.q))
    } else {
        Ok(Root::Prime)
    }
}

/// The two maximal isotropic subspaces containing a `(q-1)`-dimensional
/// isotropic subspace `e` of `ℝ^{q,q}`, ordered as (`q` family, `q'` family).
pub fn photon_pair(sig: Signature, e: &Matrix) -> Result<(Matrix, Matrix)> {
    let n = sig.dim();
    if sig.p != sig.q || e.rows() != n || e.cols() + 1 != sig.q || e.rank() != e.cols() {
        return Err(Error::Dimension("expected a (q-1)-dimensional subspace of R^{q,q}".into()));
    }
    let cols: Vec<Vec<Rational>> = (0..e.cols()).map(|c| e.col(c)).collect();
    if cols.iter().any(|a| cols.iter().any(|b| !eval_b(sig, a, b).is_zero())) {
        return Err(Error::NotIsotropic);
    }
    // Two vectors completing e to a basis of e^⊥.
    let perp = orthogonal(sig, e);
    let mut basis = e.clone();
    let mut extra = Vec::new();
    for c in 0..perp.cols() {
        let v = perp.col(c);
        let t = hstack(&basis, &Matrix::from_columns(std::slice::from_ref(&v))?);
        if t.rank() > basis.cols() {
            basis = t;
            extra.push(v);
        }
    }
    let (c1, c2) = (&extra[0], &extra[1]);
    let (a, b, g) = (eval_q(sig, c1), eval_b(sig, c1, c2), eval_q(sig, c2));
    // Isotropic directions x c1 + y c2 of a x² + 2b x y + g y² on e^⊥ / e.
    let dirs: Vec<(Rational, Rational)> = if a.is_zero() {
        vec![(Rational::from_integer(1.into()), Rational::zero()), (-&g, &b + &b)]
    } else {
        let disc = &b * &b - &a * &g;
        let s = rational_sqrt(&disc).ok_or(Error::NotIsotropic)?;
        vec![(-&b + &s, a.clone()), (-&b - &s, a.clone())]
    };
    let mut out = Vec::new();
    for (x, y) in dirs {
        let v: Vec<Rational> = c1.iter().zip(c2).map(|(u, w)| &x * u + &y * w).collect();
        let mut cs = cols.clone();
        cs.push(v);
        out.push(Matrix::from_columns(&cs)?);
    }
    let (f, g) = (out.remove(0), out.remove(0));
    if maximal_family(sig, &f)? == Root::Index(sig.q) {
        Ok((f, g))
    } else {
        Ok((g, f))
    }
}
