//! The split-basis quadratic form of signature (p, q) and causal types of vectors.
//!
//! Basis order is `e_1..e_q, x_1..x_{p-q}, ẽ_q..ẽ_1`; `e_i` pairs with `ẽ_i`
//! and the middle block is Euclidean.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, sign, Matrix, Rational};

/// Signature `(p, q)` with `p >= q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p < q {
            return Err(Error::Signature { p, q });
        }
        Ok(Signature { p, q })
    }

    /// Ambient dimension `p + q`.
    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    /// The signature `(p - k, q - k)` of the space orthogonal to `e_1..e_k, ẽ_1..ẽ_k`.
    pub fn reduced(&self, k: usize) -> Signature {
        Signature { p: self.p - k, q: self.q - k }
    }
}

/// A vector of a quadratic space, in basis coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vector {
    pub sig: Signature,
    #[serde(with = "crate::io::rational_vec")]
    pub coords: Vec<Rational>,
}

impl Vector {
    pub fn new(sig: Signature, coords: Vec<Rational>) -> Result<Self> {
        if coords.len() != sig.dim() {
            return Err(Error::Dimension(format!(
                "vector of length {} in signature ({},{})",
                coords.len(),
                sig.p,
                sig.q
            )));
        }
        Ok(Vector { sig, coords })
    }

    /// The `i`-th basis vector (0-based).
    pub fn basis(sig: Signature, i: usize) -> Self {
        let mut coords = vec![Rational::zero(); sig.dim()];
        coords[i] = Rational::from_integer(1.into());
        Vector { sig, coords }
    }

    pub fn q(&self) -> Rational {
        eval_q(self.sig, &self.coords)
    }
}

/// Causal type of a vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalClass {
    Zero,
    Lightlike,
    Spacelike,
    TimelikeFuture,
    TimelikePast,
    Timelike,
    PositiveLine,
    NegativeLine,
}

/// Gram matrix of the form in the split basis.
pub fn gram_matrix(sig: Signature) -> Matrix {
    let n = sig.dim();
    let mut m = Matrix::zeros(n, n);
    let one = Rational::from_integer(1.into());
    for i in 0..sig.q {
        m[(i, n - 1 - i)] = one.clone();
        m[(n - 1 - i, i)] = one.clone();
    }
    for i in sig.q..sig.p {
        m[(i, i)] = one.clone();
    }
    m
}

/// `M v` without building the Gram matrix.
pub fn gram_apply(sig: Signature, v: &[Rational]) -> Vec<Rational> {
    let n = sig.dim();
    (0..n)
        .map(|i| if i < sig.q || i >= sig.p { v[n - 1 - i].clone() } else { v[i].clone() })
        .collect()
}

/// `B(v, w) = vᵀ M w`.
pub fn eval_b(sig: Signature, v: &[Rational], w: &[Rational]) -> Rational {
    debug_assert_eq!(v.len(), sig.dim());
    debug_assert_eq!(w.len(), sig.dim());
    dot(v, &gram_apply(sig, w))
}

/// `Q(v) = B(v, v)`.
pub fn eval_q(sig: Signature, v: &[Rational]) -> Rational {
    eval_b(sig, v, v)
}

/// Checked versions on [`Vector`].
pub fn bilinear(v: &Vector, w: &Vector) -> Result<Rational> {
    if v.sig != w.sig {
        return Err(Error::Dimension("vectors in different signatures".into()));
    }
    Ok(eval_b(v.sig, &v.coords, &w.coords))
}

/// Causal class by the sign of `Q`.
///
/// Timelike vectors are split into future and past only when the timelike
/// cone is disconnected (`q = 1`); `e_1 - ẽ_1` is future, so the sign of
/// `v_{e_1} - v_{ẽ_1}` decides. In a one-dimensional Euclidean space the
/// coordinate sign decides.
pub fn classify_vector(v: &Vector) -> CausalClass {
    if v.coords.iter().all(Zero::is_zero) {
        return CausalClass::Zero;
    }
    let sig = v.sig;
    if sig.q == 0 && sig.p == 1 {
        return if v.coords[0].is_positive() {
            CausalClass::PositiveLine
        } else {
            CausalClass::NegativeLine
        };
    }
    let qv = v.q();
    match sign(&qv) {
        0 => CausalClass::Lightlike,
        1 => CausalClass::Spacelike,
        _ if sig.q == 1 => {
            let n = sig.dim();
            if (&v.coords[0] - &v.coords[n - 1]).is_positive() {
                CausalClass::TimelikeFuture
            } else {
                CausalClass::TimelikePast
            }
        }
        _ => CausalClass::Timelike,
    }
}

/// Whether the span of `basis` is totally isotropic.
pub fn is_isotropic_subspace(basis: &[Vector]) -> Result<bool> {
    let Some(first) = basis.first() else {
        return Ok(true);
    };
    let sig = first.sig;
    if basis.iter().any(|b| b.sig != sig) {
        return Err(Error::Dimension("vectors in different signatures".into()));
    }
    let cols: Vec<Vec<Rational>> = basis.iter().map(|b| b.coords.clone()).collect();
    if Matrix::from_columns(&cols)?.rank() != basis.len() {
        return Err(Error::Dependent);
    }
    Ok(basis
        .iter()
        .enumerate()
        .all(|(i, a)| basis[i..].iter().all(|b| eval_b(sig, &a.coords, &b.coords).is_zero())))
}
