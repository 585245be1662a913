//! Coordinates on the unipotent radical and the product-of-exponentials map.
//!
//! For a chart with top level `k`, factor `j` (1-based) carries the vector
//! `w_j = (b_j^{k-j}, .., b_j^1, v_j^0, a_j^1, .., a_j^{k-j})` of the space of
//! signature `(p-j, q-j)`. Its nilpotent block has `w_j` in column
//! `n+1-j` (rows `j+1..n-j`) and `-(M w_j)ᵀ` in row `j`.

use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::flag::ThetaSet;
use crate::linalg::{rat, Matrix, Rational};
use crate::quadratic::{gram_apply, Signature};

/// The unipotent chart attached to a root set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chart {
    pub theta: ThetaSet,
    /// Transversality levels, increasing.
    pub levels: Vec<usize>,
    /// Top level.
    pub k: usize,
    /// Whether the frame exchanging `e_q` and `ẽ_q` is in use.
    pub swapped: bool,
}

impl Chart {
    pub fn new(theta: &ThetaSet) -> Self {
        let levels = theta.levels();
        let k = *levels.last().expect("nonempty root set");
        Chart { theta: theta.clone(), levels, k, swapped: theta.swapped() }
    }

    /// Chart with explicit levels in the given signature (no frame swap).
    pub fn with_levels(sig: Signature, levels: &[usize]) -> Result<Self> {
        let mut levels = levels.to_vec();
        levels.sort_unstable();
        levels.dedup();
        let k = *levels.last().ok_or_else(|| Error::MalformedTheta("no levels".into()))?;
        if k > sig.q {
            return Err(Error::MalformedTheta(format!("level {k} above q={}", sig.q)));
        }
        // A root set only for bookkeeping; levels drive all computations.
        let roots = levels
            .iter()
            .map(|&l| crate::flag::Root::Index(l))
            .collect::<Vec<_>>();
        let theta = ThetaSet::new(sig, roots).or_else(|_| {
            // p = q and level q-1: record it through the pair {q, q'}.
            let mut r: Vec<crate::flag::Root> = levels
                .iter()
                .filter(|&&l| l + 1 < sig.q)
                .map(|&l| crate::flag::Root::Index(l))
                .collect();
            if levels.contains(&(sig.q - 1)) {
                r.push(crate::flag::Root::Index(sig.q));
                r.push(crate::flag::Root::Prime);
            } else if levels.contains(&sig.q) {
                r.push(crate::flag::Root::Index(sig.q));
            }
            ThetaSet::new(sig, r)
        })?;
        Ok(Chart { theta, levels, k, swapped: false })
    }

    pub fn sig(&self) -> Signature {
        self.theta.sig()
    }

    pub fn n(&self) -> usize {
        self.sig().dim()
    }

    /// Length of the `v_j^0` vectors.
    pub fn v0_len(&self) -> usize {
        self.n() - 2 * self.k
    }

    /// Whether `a_j^i` (1-based) is a free coordinate: some level `l` has
    /// `j <= l <= k - i`. Otherwise it vanishes on this chart.
    pub fn a_free(&self, j: usize, i: usize) -> bool {
        self.levels.iter().any(|&l| j <= l && l + i <= self.k)
    }

    /// Number of free real coordinates.
    pub fn dimension(&self) -> usize {
        let k = self.k;
        let mut d = k * self.v0_len();
        for j in 1..=k {
            for i in 1..=k - j {
                d += 1 + usize::from(self.a_free(j, i));
            }
        }
        d
    }

    /// Conjugation by the frame swap (identity when not swapped).
    pub fn frame(&self, m: &Matrix) -> Matrix {
        if !self.swapped {
            return m.clone();
        }
        let q = self.sig().q;
        let mut perm: Vec<usize> = (0..self.n()).collect();
        perm.swap(q - 1, q);
        m.submatrix(&perm, &perm).expect("square")
    }
}

/// A point of the unipotent chart in coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnipotentCoords {
    pub chart: Chart,
    /// `v0[j-1] = v_j^0`.
    pub v0: Vec<Vec<Rational>>,
    /// `a[j-1][i-1] = a_j^i`, for `1 <= i <= k-j`.
    pub a: Vec<Vec<Rational>>,
    /// `b[j-1][i-1] = b_j^i`.
    pub b: Vec<Vec<Rational>>,
}

impl UnipotentCoords {
    pub fn zero(chart: &Chart) -> Self {
        let k = chart.k;
        UnipotentCoords {
            chart: chart.clone(),
            v0: vec![vec![Rational::zero(); chart.v0_len()]; k],
            a: (1..=k).map(|j| vec![Rational::zero(); k - j]).collect(),
            b: (1..=k).map(|j| vec![Rational::zero(); k - j]).collect(),
        }
    }

    /// `w_j = v_j^{k-j}` for 1-based `j`.
    pub fn factor_vector(&self, j: usize) -> Vec<Rational> {
        let b = &self.b[j - 1];
        let a = &self.a[j - 1];
        b.iter().rev().chain(&self.v0[j - 1]).chain(a).cloned().collect()
    }

    pub fn factor_vectors(&self) -> Vec<Vec<Rational>> {
        (1..=self.chart.k).map(|j| self.factor_vector(j)).collect()
    }

    /// `v_j^i = (b_j^i, .., b_j^1, v_j^0, a_j^1, .., a_j^i)`.
    pub fn v(&self, j: usize, i: usize) -> Vec<Rational> {
        strip(&self.factor_vector(j), self.chart.k - j - i)
    }

    /// Rebuilds coordinates from factor vectors, checking the vanishing pattern.
    pub fn from_factor_vectors(chart: &Chart, ws: &[Vec<Rational>]) -> Result<Self> {
        let k = chart.k;
        if ws.len() != k {
            return Err(Error::Dimension(format!("{} factor vectors for k={k}", ws.len())));
        }
        let mut c = Self::zero(chart);
        for (j, w) in (1..=k).zip(ws) {
            if w.len() != chart.n() - 2 * j {
                return Err(Error::Dimension(format!("factor {j} has length {}", w.len())));
            }
            let m = k - j;
            c.b[j - 1] = w[..m].iter().rev().cloned().collect();
            c.v0[j - 1] = w[m..w.len() - m].to_vec();
            c.a[j - 1] = w[w.len() - m..].to_vec();
            for i in 1..=m {
                if !chart.a_free(j, i) && !c.a[j - 1][i - 1].is_zero() {
                    return Err(Error::NotUnipotent(format!("a_{j}^{i} must vanish")));
                }
            }
        }
        Ok(c)
    }

    /// Uniformly random integer-over-small-denominator coordinates.
    pub fn random<R: Rng>(chart: &Chart, rng: &mut R, range: i64) -> Self {
        let mut draw = || loop {
            let x = rat(rng.gen_range(-range..=range), rng.gen_range(1..=9));
            if !x.is_zero() {
                return x;
            }
        };
        let mut c = Self::zero(chart);
        for j in 1..=chart.k {
            for x in c.v0[j - 1].iter_mut() {
                *x = draw();
            }
            for i in 1..=chart.k - j {
                c.b[j - 1][i - 1] = draw();
                if chart.a_free(j, i) {
                    c.a[j - 1][i - 1] = draw();
                }
            }
        }
        c
    }

    /// All free coordinates as a flat list, in a fixed order.
    pub fn flatten(&self) -> Vec<Rational> {
        let mut out = Vec::new();
        for j in 1..=self.chart.k {
            out.extend(self.v0[j - 1].iter().cloned());
            for i in 1..=self.chart.k - j {
                out.push(self.b[j - 1][i - 1].clone());
                if self.chart.a_free(j, i) {
                    out.push(self.a[j - 1][i - 1].clone());
                }
            }
        }
        out
    }

    /// Inverse of [`UnipotentCoords::flatten`].
    pub fn unflatten(chart: &Chart, xs: &[Rational]) -> Result<Self> {
        if xs.len() != chart.dimension() {
            return Err(Error::Dimension(format!(
                "{} values for a chart of dimension {}",
                xs.len(),
                chart.dimension()
            )));
        }
        let mut it = xs.iter().cloned();
        let mut c = Self::zero(chart);
        for j in 1..=chart.k {
            for x in c.v0[j - 1].iter_mut() {
                *x = it.next().expect("length checked");
            }
            for i in 1..=chart.k - j {
                c.b[j - 1][i - 1] = it.next().expect("length checked");
                if chart.a_free(j, i) {
                    c.a[j - 1][i - 1] = it.next().expect("length checked");
                }
            }
        }
        Ok(c)
    }
}

/// Drops `s` entries from each end.
pub fn strip(v: &[Rational], s: usize) -> Vec<Rational> {
    v[s..v.len() - s].to_vec()
}

/// The nilpotent block `u_j(w)` in `𝔰𝔬(p,q)` (1-based `j`).
pub fn nilpotent_block(sig: Signature, j: usize, w: &[Rational]) -> Result<Matrix> {
    let n = sig.dim();
    if j == 0 || 2 * j > n || w.len() != n - 2 * j {
        return Err(Error::Dimension(format!("factor {j} with vector of length {}", w.len())));
    }
    let mw = gram_apply(sig.reduced(j), w);
    let mut u = Matrix::zeros(n, n);
    for (r, (x, y)) in w.iter().zip(&mw).enumerate() {
        u[(j + r, n - j)] = x.clone();
        u[(j - 1, j + r)] = -y.clone();
    }
    Ok(u)
}

/// `exp(X) = I + X + X²/2` for `X³ = 0`.
pub fn exp_nilpotent(x: &Matrix) -> Matrix {
    let x2 = x * x;
    let half = rat(1, 2);
    &(&Matrix::identity(x.rows()) + x) + &x2.scale(&half)
}

fn factor_exp(sig: Signature, j: usize, w: &[Rational]) -> Matrix {
    exp_nilpotent(&nilpotent_block(sig, j, w).expect("factor dimensions"))
}

/// Product of the factor exponentials, in the chart frame.
pub fn psi_factors(sig: Signature, ws: &[Vec<Rational>]) -> Matrix {
    let mut u = Matrix::identity(sig.dim());
    for (j, w) in ws.iter().enumerate() {
        u = &u * &factor_exp(sig, j + 1, w);
    }
    u
}

/// `Ψ(u)` in the chart frame.
pub fn psi_chart(c: &UnipotentCoords) -> Matrix {
    psi_factors(c.chart.sig(), &c.factor_vectors())
}

/// `Ψ(u)`, the unipotent matrix itself.
pub fn psi(c: &UnipotentCoords) -> Matrix {
    c.chart.frame(&psi_chart(c))
}

fn neg(w: &[Rational]) -> Vec<Rational> {
    w.iter().map(|x| -x).collect()
}

/// Peels `k` factors off a chart-frame matrix: returns the factor vectors
/// and what is left (the identity when the matrix lies in the image).
pub fn peel(sig: Signature, k: usize, u: &Matrix) -> (Vec<Vec<Rational>>, Matrix) {
    let n = sig.dim();
    let mut cur = u.clone();
    let mut ws = Vec::with_capacity(k);
    for j in 1..=k {
        let w: Vec<Rational> = (j..n - j).map(|r| cur[(r, n - j)].clone()).collect();
        cur = &factor_exp(sig, j, &neg(&w)) * &cur;
        ws.push(w);
    }
    (ws, cur)
}

/// Factor vectors from the columns `n+1-i`, `i = 1..k`, of a chart element.
pub fn factor_vectors_from_columns(sig: Signature, cols: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = sig.dim();
    let mut cols = cols.to_vec();
    let mut ws = Vec::with_capacity(cols.len());
    for j in 1..=cols.len() {
        let w: Vec<Rational> = (j..n - j).map(|r| cols[j - 1][r].clone()).collect();
        let e = factor_exp(sig, j, &neg(&w));
        for c in cols.iter_mut() {
            *c = e.apply(c).expect("dimensions");
        }
        ws.push(w);
    }
    ws
}

/// Coordinates of a matrix of the chart (in the actual frame).
pub fn psi_inverse(chart: &Chart, u: &Matrix) -> Result<UnipotentCoords> {
    let n = chart.n();
    if u.rows() != n || u.cols() != n {
        return Err(Error::Dimension(format!("expected {n}x{n} matrix")));
    }
    let (ws, rest) = peel(chart.sig(), chart.k, &chart.frame(u));
    if rest != Matrix::identity(n) {
        return Err(Error::NotUnipotent("matrix is not a product of the chart factors".into()));
    }
    UnipotentCoords::from_factor_vectors(chart, &ws)
}

/// The chart element `T` with `T·F₀ = G` for a flag `G` transverse to `F∞`,
/// given as `(level, basis)` pairs in the chart frame. Column `n+1-i` of `T`
/// is the vector of `G^l` (smallest level `l >= i`) whose last `l`
/// coordinates form the unit vector at row `n+1-i`.
pub fn unipotent_from_flag(
    sig: Signature,
    spaces: &[(usize, Matrix)],
) -> Result<Vec<Vec<Rational>>> {
    let n = sig.dim();
    let mut spaces = spaces.to_vec();
    spaces.sort_by_key(|(l, _)| *l);
    let k = spaces.last().map_or(0, |(l, _)| *l);
    let mut cols = Vec::with_capacity(k);
    for i in 1..=k {
        let (l, basis) = spaces.iter().find(|(l, _)| *l >= i).expect("top level covers i");
        if basis.cols() != *l {
            return Err(Error::Dimension(format!("level {l} with {} vectors", basis.cols())));
        }
        let bottom: Vec<usize> = (n - l..n).collect();
        let all: Vec<usize> = (0..*l).collect();
        let a = basis.submatrix(&bottom, &all)?;
        let mut rhs = vec![Rational::zero(); *l];
        rhs[l - i] = Rational::one();
        let c = a.solve(&rhs).map_err(|_| Error::NotTransverse(vec![l.to_string()]))?;
        cols.push(basis.apply(&c)?);
    }
    Ok(factor_vectors_from_columns(sig, &cols))
}

/// Span of the last `l` columns of a chart-frame matrix: `U·F₀^l`.
pub fn level_space(u: &Matrix, l: usize) -> Matrix {
    let n = u.rows();
    let rows: Vec<usize> = (0..n).collect();
    let cols: Vec<usize> = (n - l..n).collect();
    u.submatrix(&rows, &cols).expect("in range")
}

/// Re-expresses the flag `U·F₀` at the given levels as an element of the
/// chart with exactly those levels (both in the chart frame).
pub fn project(sig: Signature, u: &Matrix, levels: &[usize]) -> Result<Matrix> {
    let spaces: Vec<(usize, Matrix)> = levels.iter().map(|&l| (l, level_space(u, l))).collect();
    Ok(psi_factors(sig, &unipotent_from_flag(sig, &spaces)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flag::{is_transverse, standard_flags};
    use crate::linalg::int;
    use crate::quadratic::gram_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn chart(p: usize, q: usize, theta: &str) -> Chart {
        Chart::new(&ThetaSet::parse(Signature::new(p, q).unwrap(), theta).unwrap())
    }

    #[test]
    fn nilpotent_blocks_are_in_the_lie_algebra() {
        let sig = Signature::new(5, 3).unwrap();
        let m = gram_matrix(sig);
        for j in 1..=3 {
            let w: Vec<Rational> = (0..8 - 2 * j).map(|i| int(i as i64 * 3 - 4)).collect();
            let u = nilpotent_block(sig, j, &w).unwrap();
            let lhs = &(&u.transpose() * &m) + &(&m * &u);
            assert!(lhs.is_zero());
            assert!((&(&u * &u) * &u).is_zero());
        }
        assert!(nilpotent_block(sig, 1, &[int(1)]).is_err());
        assert!(nilpotent_block(sig, 2, &vec![int(0); 4]).unwrap().is_zero());
    }

    #[test]
    fn zero_coords_give_identity() {
        let c = UnipotentCoords::zero(&chart(4, 3, "1,2,3"));
        assert_eq!(psi(&c), Matrix::identity(7));
    }

    #[test]
    fn psi_is_orthogonal_and_roundtrips() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (p, q, t) in [(4, 3, "1,2,3"), (5, 3, "1,3"), (4, 4, "1,4,qp"), (4, 4, "qp"), (3, 2, "2")]
        {
            let ch = chart(p, q, t);
            let c = UnipotentCoords::random(&ch, &mut rng, 20);
            let u = psi(&c);
            let m = gram_matrix(ch.sig());
            assert_eq!(&(&u.transpose() * &m) * &u, m);
            assert_eq!(psi_inverse(&ch, &u).unwrap(), c);
            assert_eq!(UnipotentCoords::unflatten(&ch, &c.flatten()).unwrap(), c);
        }
    }

    #[test]
    fn psi_inverse_rejects_foreign_matrices() {
        let ch = chart(4, 3, "1");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let big = psi(&UnipotentCoords::random(&chart(4, 3, "1,2"), &mut rng, 9));
        assert!(psi_inverse(&ch, &big).is_err());
        assert!(psi_inverse(&ch, &Matrix::identity(3)).is_err());
    }

    #[test]
    fn top_right_entries_for_two_levels() {
        let ch = chart(4, 2, "1,2");
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = UnipotentCoords::random(&ch, &mut rng, 9);
        let u = psi(&c);
        let sig = ch.sig();
        let q1 = crate::quadratic::eval_q(sig.reduced(1), &c.v(1, 1));
        let q2 = crate::quadratic::eval_q(sig.reduced(2), &c.v(2, 0));
        assert_eq!(u[(0, 5)], -q1 / int(2));
        assert_eq!(u[(1, 4)], -q2 / int(2));
    }

    #[test]
    fn image_moves_f0_to_a_flag_transverse_to_f_infinity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ch = chart(5, 3, "1,3");
        let u = psi(&UnipotentCoords::random(&ch, &mut rng, 9));
        let (f0, finf) = standard_flags(&ch.theta);
        let f = f0.transform(&u);
        assert!(f.is_valid());
        assert!(is_transverse(&f, &finf).unwrap());
    }

    #[test]
    fn flag_reconstruction_recovers_the_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (p, q, t) in [(5, 3, "1,2,3"), (5, 3, "2"), (4, 4, "1,4,qp")] {
            let ch = chart(p, q, t);
            let u = psi_chart(&UnipotentCoords::random(&ch, &mut rng, 9));
            assert_eq!(project(ch.sig(), &u, &ch.levels).unwrap(), u);
        }
    }
}
