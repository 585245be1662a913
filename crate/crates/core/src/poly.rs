//! Univariate rational polynomials: interpolation and Sturm root counting.

use num_traits::{Signed, Zero};

use crate::linalg::{int, Rational};

/// Coefficients in increasing degree, without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(pub Vec<Rational>);

impl Poly {
    pub fn new(mut c: Vec<Rational>) -> Poly {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        Poly(c)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(self.0.iter().enumerate().skip(1).map(|(i, c)| c * int(i as i64)).collect())
    }

    /// Remainder of division by a nonzero `d`.
    pub fn rem(&self, d: &Poly) -> Poly {
        let dd = d.degree().expect("nonzero divisor");
        let lead = d.0[dd].clone();
        let mut r = self.0.clone();
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1;
            let f = &r[k] / &lead;
            for (i, c) in d.0.iter().enumerate() {
                r[k - dd + i] -= &f * c;
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        Poly::new(r)
    }

    /// Newton interpolation through `(xs[i], ys[i])` with distinct `xs`.
    pub fn interpolate(xs: &[Rational], ys: &[Rational]) -> Poly {
        let n = xs.len();
        let mut coef = ys.to_vec();
        for j in 1..n {
            for i in (j..n).rev() {
                coef[i] = (&coef[i] - &coef[i - 1]) / (&xs[i] - &xs[i - j]);
            }
        }
        // Horner on the Newton form: acc = acc * (x - xs[i]) + coef[i].
        let mut acc: Vec<Rational> = vec![];
        for i in (0..n).rev() {
            let mut next = vec![Rational::zero(); acc.len() + 1];
            for (d, c) in acc.iter().enumerate() {
                next[d + 1] += c;
                next[d] -= c * &xs[i];
            }
            next[0] += &coef[i];
            acc = next;
        }
        Poly::new(acc)
    }

    /// Sturm sequence `p, p', -rem(p, p'), ...`.
    pub fn sturm(&self) -> Vec<Poly> {
        let mut seq = vec![self.clone(), self.derivative()];
        while !seq[seq.len() - 1].is_zero() {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(Poly::new(r.0.into_iter().map(|c| -c).collect()));
        }
        if seq.last().is_some_and(Poly::is_zero) {
            seq.pop();
        }
        seq
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count_roots(&self, a: &Rational, b: &Rational) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let seq = self.sturm();
        let changes = |x: &Rational| {
            let signs: Vec<bool> =
                seq.iter().map(|p| p.eval(x)).filter(|v| !v.is_zero()).map(|v| v.is_positive()).collect();
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        changes(a).saturating_sub(changes(b))
    }

    /// Whether the polynomial has no root on the closed interval `[a, b]`.
    pub fn no_root_on(&self, a: &Rational, b: &Rational) -> bool {
        !self.is_zero() && !self.eval(a).is_zero() && self.count_roots(a, b) == 0
    }
}

/// The points `0, 1/d, ..., 1` used to sample a segment.
pub fn unit_grid(d: usize) -> Vec<Rational> {
    (0..=d).map(|i| Rational::new(i.into(), d.max(1).into())).collect()
}
