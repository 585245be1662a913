//! Transversality minors, the matrix `S`, the staged change of variables and
//! the extraction of all sign data from explicit minors.
//!
//! Matrices here are in the chart frame. Stage `m` rewrites the chart
//! element as a product in signature `(p-m, q-m)` with `k-m` factors; the
//! staged vector `v_j^{i,(m)}` is factor `j-m` of stage `m`, stripped down
//! to level `i`.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{int, rat, sign, Matrix, Rational};
use crate::quadratic::{eval_q, Signature};
use crate::unipotent::{
    exp_nilpotent, nilpotent_block, peel, psi_chart, psi_factors, strip, unipotent_from_flag,
    UnipotentCoords,
};

/// The `i x i` upper-right minor of `u`.
pub fn det_i(u: &Matrix, i: usize) -> Result<Rational> {
    let n = u.rows();
    if i == 0 || i > n / 2 {
        return Err(Error::Index(format!("det_{i} of a {n}x{n} matrix")));
    }
    let rows: Vec<usize> = (0..i).collect();
    let cols: Vec<usize> = (n - i..n).collect();
    u.minor(&rows, &cols)
}

/// `S`: the upper-right `k x k` block of `u` with its columns reversed, so
/// that `s_{i,j} = u_{i, n+1-j}` (1-based).
pub fn s_matrix_of(u: &Matrix, k: usize) -> Matrix {
    let n = u.rows();
    let mut s = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            s[(i, j)] = u[(i, n - 1 - j)].clone();
        }
    }
    s
}

/// `S` of a chart point.
pub fn s_matrix(c: &UnipotentCoords) -> Matrix {
    s_matrix_of(&psi_chart(c), c.chart.k)
}

/// Entries of `S` on and below the diagonal from the coordinates:
/// `s_{i,i} = -Q(v_i^{k-i})/2` and `s_{i,j} = b_j^{k-i+1}` for `i > j`.
pub fn s_lower_closed_form(c: &UnipotentCoords) -> Matrix {
    let k = c.chart.k;
    let sig = c.chart.sig();
    let mut s = Matrix::zeros(k, k);
    for i in 1..=k {
        s[(i - 1, i - 1)] = -eval_q(sig.reduced(i), &c.factor_vector(i)) / int(2);
        for j in 1..i {
            s[(i - 1, j - 1)] = c.b[j - 1][k - i].clone();
        }
    }
    s
}

/// Sign relating `det S` and `det_k`: `det S = (-1)^{k(k-1)/2} det_k`.
pub fn s_det_sign(k: usize) -> i64 {
    if (k * (k.saturating_sub(1)) / 2).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn pm(e: usize) -> i64 {
    if e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn pow2(e: usize) -> Rational {
    Rational::from_integer(num_bigint::BigInt::one() << e)
}

/// Constant in `c_Q(j,m) · Π_{l<=j} Q(v_l^{k-m,(l-1)}) = Δ_Q(j, m)`.
pub fn c_q(j: usize, m: usize) -> Rational {
    int(pm(j * (j + 1) / 2 + j * (m - j))) / pow2(j)
}

/// Constant in `c_b(j,m) · Π_{l<j} Q(v_l^{k-m-1,(l-1)}) · b_j^{k-m,(j-1)} = Δ_b(j, m)`.
pub fn c_b(j: usize, m: usize) -> Rational {
    int(pm(j * (j - 1) / 2 + (j - 1) * (m - j))) / pow2(j - 1)
}

/// `Δ_Q(j, m)`: rows `1..m`, columns `j+1..m` and the last `j` (1-based).
pub fn minor_q(u: &Matrix, j: usize, m: usize) -> Rational {
    let n = u.rows();
    let rows: Vec<usize> = (0..m).collect();
    let cols: Vec<usize> = (j..m).chain(n - j..n).collect();
    u.minor(&rows, &cols).expect("square minor")
}

/// `Δ_b(j, m)`: rows `1..m+1`, columns `j..m` and the last `j` (1-based).
pub fn minor_b(u: &Matrix, j: usize, m: usize) -> Rational {
    let n = u.rows();
    let rows: Vec<usize> = (0..=m).collect();
    let cols: Vec<usize> = (j - 1..m).chain(n - j..n).collect();
    u.minor(&rows, &cols).expect("square minor")
}

/// The staged coordinates of a chart point.
#[derive(Clone, Debug)]
pub struct StagedCoords {
    pub sig: Signature,
    pub k: usize,
    /// `stages[m][j'-1]`: factor vector `j'` at stage `m`.
    pub stages: Vec<Vec<Vec<Rational>>>,
    /// Set when the recursion stopped before stage `k-1`.
    pub vanished: Option<Error>,
}

impl StagedCoords {
    /// `v_j^{i,(m)}` (1-based `j`, `m < j`), when stage `m` was reached.
    pub fn v(&self, j: usize, i: usize, m: usize) -> Option<Vec<Rational>> {
        let w = self.stages.get(m)?.get(j - m - 1)?;
        Some(strip(w, self.k - j - i))
    }

    /// `Q(v_j^{i,(m)})`.
    pub fn q(&self, j: usize, i: usize, m: usize) -> Option<Rational> {
        Some(eval_q(self.sig.reduced(self.k - i), &self.v(j, i, m)?))
    }

    /// `a_j^{i,(m)}`, the last coordinate of `v_j^{i,(m)}` (`i >= 1`).
    pub fn a(&self, j: usize, i: usize, m: usize) -> Option<Rational> {
        self.v(j, i, m).map(|v| v[v.len() - 1].clone())
    }

    /// `b_j^{i,(m)}`, the first coordinate of `v_j^{i,(m)}` (`i >= 1`).
    pub fn b(&self, j: usize, i: usize, m: usize) -> Option<Rational> {
        self.v(j, i, m).map(|v| v[0].clone())
    }

    pub fn complete(&self) -> bool {
        self.vanished.is_none()
    }
}

/// One stage of the change of variables: factor vectors of a chart element
/// of signature `sig` with `ws.len()` factors, to those of the next stage.
pub fn next_stage(sig: Signature, ws: &[Vec<Rational>], stage: usize) -> Result<Vec<Vec<Rational>>> {
    let k = ws.len();
    let n = sig.dim();
    let w = &ws[0];
    let inner = sig.reduced(1);
    let qw = eval_q(inner, w);
    if qw.is_zero() {
        return Err(Error::PivotVanished { stage, level: k - 1 });
    }
    let u = psi_factors(sig, ws);
    let first = exp_nilpotent(&nilpotent_block(sig, 1, &w.iter().map(|x| -x).collect::<Vec<_>>())?);
    let core: Vec<usize> = (1..n - 1).collect();
    let rest = (&first * &u).submatrix(&core, &core)?;
    // The flag of the remaining factors is spanned by ẽ_l - (2 w_l / Q(w)) w.
    let nn = n - 2;
    let gs: Vec<Vec<Rational>> = (2..=k)
        .map(|l| {
            let f = int(2) * &w[l - 2] / &qw;
            let mut g: Vec<Rational> = w.iter().map(|x| -(&f * x)).collect();
            g[nn + 1 - l] += Rational::one();
            g
        })
        .collect();
    let spaces: Vec<(usize, Matrix)> = (1..k)
        .map(|lv| (lv, Matrix::from_columns(&gs[..lv]).expect("columns")))
        .collect();
    let t_ws = unipotent_from_flag(inner, &spaces)
        .map_err(|_| Error::PivotVanished { stage, level: k - 1 })?;
    let t = psi_factors(inner, &t_ws);
    let next = &t.inverse()? * &rest;
    let (ws1, left) = peel(inner, k - 1, &next);
    debug_assert_eq!(left, Matrix::identity(nn));
    Ok(ws1)
}

/// Inverse of [`next_stage`]: rebuilds stage `m` from the first factor
/// vector `w` of stage `m` and the factor vectors of stage `m+1`.
pub fn previous_stage(
    sig: Signature,
    w: &[Rational],
    next: &[Vec<Rational>],
) -> Result<Vec<Vec<Rational>>> {
    let k = next.len() + 1;
    let n = sig.dim();
    let inner = sig.reduced(1);
    let qw = eval_q(inner, w);
    if qw.is_zero() {
        return Err(Error::PivotVanished { stage: 0, level: k - 1 });
    }
    let nn = n - 2;
    let gs: Vec<Vec<Rational>> = (2..=k)
        .map(|l| {
            let f = int(2) * &w[l - 2] / &qw;
            let mut g: Vec<Rational> = w.iter().map(|x| -(&f * x)).collect();
            g[nn + 1 - l] += Rational::one();
            g
        })
        .collect();
    let spaces: Vec<(usize, Matrix)> = (1..k)
        .map(|lv| (lv, Matrix::from_columns(&gs[..lv]).expect("columns")))
        .collect();
    let t = psi_factors(inner, &unipotent_from_flag(inner, &spaces)?);
    let rest = &t * &psi_factors(inner, next);
    let mut emb = Matrix::identity(n);
    for r in 0..nn {
        for c in 0..nn {
            emb[(r + 1, c + 1)] = rest[(r, c)].clone();
        }
    }
    let first = exp_nilpotent(&nilpotent_block(sig, 1, w)?);
    Ok(peel(sig, k, &(&first * &emb)).0)
}

/// Runs the staged change of variables as far as the pivots allow.
pub fn staged_change_of_vars(c: &UnipotentCoords) -> StagedCoords {
    stage_factor_vectors(c.chart.sig(), &c.factor_vectors())
}

/// Same as [`staged_change_of_vars`] from raw factor vectors.
pub fn stage_factor_vectors(sig: Signature, ws: &[Vec<Rational>]) -> StagedCoords {
    let k = ws.len();
    let mut stages = vec![ws.to_vec()];
    let mut vanished = None;
    for m in 0..k.saturating_sub(1) {
        match next_stage(sig.reduced(m), &stages[m], m) {
            Ok(next) => stages.push(next),
            Err(e) => {
                vanished = Some(e);
                break;
            }
        }
    }
    StagedCoords { sig, k, stages, vanished }
}

/// Signs of the data that locate a point among the cells.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SignVector {
    pub k: usize,
    /// `qsigns[j-1][i]`: sign of `Q(v_j^{i,(j-1)})`, `0 <= i <= k-j`.
    pub qsigns: Vec<Vec<i8>>,
    /// `bsigns[j-1][i-1]`: sign of `b_j^{i,(j-1)}`, `1 <= i <= k-j`.
    pub bsigns: Vec<Vec<i8>>,
    /// `firstcoord[j-1]`: sign of the first coordinate of `v_j^{0,(j-1)}`,
    /// when that space is Lorentzian or one-dimensional.
    pub firstcoord: Option<Vec<i8>>,
}

impl SignVector {
    /// Whether every `Q` sign is nonzero.
    pub fn in_cell(&self) -> bool {
        self.qsigns.iter().flatten().all(|&s| s != 0)
    }

    /// Whether every consulted sign is nonzero.
    pub fn is_generic(&self) -> bool {
        self.in_cell()
            && self.bsigns.iter().flatten().all(|&s| s != 0)
            && self.firstcoord.iter().flatten().all(|&s| s != 0)
    }
}

/// Which first-coordinate family applies to a chart of top level `k`.
pub fn first_coordinate_applies(sig: Signature, k: usize) -> bool {
    (k + 1 == sig.q && sig.p > sig.q) || (k == sig.q && sig.p == sig.q + 1)
}

fn prod_sign(a: i8, b: i8) -> i8 {
    a * b
}

/// All sign data from minors of a chart-frame matrix with top level `k`.
///
/// `Q(v_j^{i,(j-1)})` is the ratio `Δ_Q(j, k-i) c_Q(j-1, k-i) / (Δ_Q(j-1, k-i) c_Q(j, k-i))`,
/// `b_j^{i,(j-1)}` is `Δ_b(j, k-i)` over `c_b(j, k-i)` and the `Q` product at
/// level `i-1`, and the first coordinates are `Δ_b(j, k)` up to a constant
/// sign. A sign is reported 0 when its minor or its denominator vanishes.
pub fn sign_from_minors(sig: Signature, u: &Matrix, k: usize) -> SignVector {
    // pq[j][i] = sign of Π_{l<=j} Q(v_l^{i,(l-1)}), pq[0][i] = 1.
    let mut pq = vec![vec![1i8; k + 1]; k + 1];
    for j in 1..=k {
        for i in 0..=k - j {
            let m = k - i;
            pq[j][i] = sign(&minor_q(u, j, m)) * sign(&c_q(j, m));
        }
    }
    let qsigns = (1..=k).map(|j| (0..=k - j).map(|i| prod_sign(pq[j][i], pq[j - 1][i])).collect()).collect();
    let bsigns = (1..=k)
        .map(|j| {
            (1..=k - j)
                .map(|i| {
                    let m = k - i;
                    sign(&minor_b(u, j, m)) * sign(&c_b(j, m)) * pq[j - 1][i - 1]
                })
                .collect()
        })
        .collect();
    let firstcoord = first_coordinate_applies(sig, k).then(|| {
        let shift = usize::from(k == sig.q);
        (1..=k).map(|j| sign(&minor_b(u, j, k)) * sign(&c_b(j, k + shift))).collect()
    });
    SignVector { k, qsigns, bsigns, firstcoord }
}

/// Number of distinct minors consulted by [`sign_from_minors`].
pub fn consulted_minor_count(sig: Signature, k: usize) -> usize {
    let q_family = k * (k + 1) / 2;
    let b_family = k * (k.saturating_sub(1)) / 2;
    let first = if first_coordinate_applies(sig, k) { k } else { 0 };
    q_family + b_family + first
}

/// The same signs read off the staged coordinates, where defined.
pub fn sign_from_stages(st: &StagedCoords) -> Option<SignVector> {
    let k = st.k;
    let mut qsigns = Vec::new();
    let mut bsigns = Vec::new();
    for j in 1..=k {
        qsigns.push((0..=k - j).map(|i| st.q(j, i, j - 1).map(|x| sign(&x))).collect::<Option<Vec<_>>>()?);
        bsigns.push((1..=k - j).map(|i| st.b(j, i, j - 1).map(|x| sign(&x))).collect::<Option<Vec<_>>>()?);
    }
    let firstcoord = if first_coordinate_applies(st.sig, k) {
        Some((1..=k).map(|j| st.v(j, 0, j - 1).map(|v| sign(&v[0]))).collect::<Option<Vec<_>>>()?)
    } else {
        None
    };
    Some(SignVector { k, qsigns, bsigns, firstcoord })
}

/// Tally of exact identity checks on one point.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub checked: usize,
    pub failed: Vec<String>,
    /// Identities skipped because a pivot vanished.
    pub skipped: usize,
}

impl IdentityReport {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed.push(what());
        }
    }

    pub fn ok(&self) -> bool {
        self.failed.is_empty()
    }

    pub fn merge(&mut self, other: IdentityReport) {
        self.checked += other.checked;
        self.skipped += other.skipped;
        self.failed.extend(other.failed);
    }
}

/// Checks on one chart point: the minor identities for both families, the
/// first-coordinate sign rule, the `Q` recursion at every stage, the
/// determinant relation of `S` and the closed form of `S` below the diagonal.
pub fn check_identities(c: &UnipotentCoords) -> IdentityReport {
    let mut r = IdentityReport::default();
    let sig = c.chart.sig();
    let k = c.chart.k;
    let u = psi_chart(c);
    let st = staged_change_of_vars(c);

    let s = s_matrix_of(&u, k);
    let dk = det_i(&u, k).expect("k <= n/2");
    r.check(s.det().expect("square") == int(s_det_sign(k)) * &dk, || "det S".into());
    let closed = s_lower_closed_form(c);
    for i in 0..k {
        for j in 0..=i {
            r.check(closed[(i, j)] == s[(i, j)], || format!("s_{},{}", i + 1, j + 1));
        }
    }

    let qprod = |j: usize, i: usize| -> Option<Rational> {
        (1..=j).map(|l| st.q(l, i, l - 1)).try_fold(Rational::one(), |acc, x| Some(acc * x?))
    };
    for j in 1..=k {
        for i in 0..=k - j {
            let m = k - i;
            match qprod(j, i) {
                Some(p) => r.check(p * c_q(j, m) == minor_q(&u, j, m), || format!("Q-minor j={j} i={i}")),
                None => r.skipped += 1,
            }
        }
        for i in 1..=k - j {
            let m = k - i;
            match (qprod(j - 1, i - 1), st.b(j, i, j - 1)) {
                (Some(p), Some(b)) => {
                    r.check(p * b * c_b(j, m) == minor_b(&u, j, m), || format!("b-minor j={j} i={i}"))
                }
                _ => r.skipped += 1,
            }
        }
    }
    if first_coordinate_applies(sig, k) {
        let shift = usize::from(k == sig.q);
        for j in 1..=k {
            let Some(v) = st.v(j, 0, j - 1) else {
                r.skipped += 1;
                continue;
            };
            let q0 = eval_q(sig.reduced(k), &v);
            // Only timelike vectors (or lines) carry a first-coordinate sign.
            if shift == 0 && sign(&q0) >= 0 {
                continue;
            }
            let predicted = sign(&minor_b(&u, j, k)) * sign(&c_b(j, k + shift));
            r.check(predicted == sign(&v[0]), || format!("first coordinate j={j}"));
        }
    }
    for (m, ws) in st.stages.iter().enumerate() {
        for (jj, w) in ws.iter().enumerate() {
            let j = jj + m + 1;
            for i in 1..=k - j {
                let vi = strip(w, k - j - i);
                let vp = strip(w, k - j - i + 1);
                let lhs = eval_q(sig.reduced(k - i), &vi);
                let rhs = eval_q(sig.reduced(k - i + 1), &vp) + int(2) * &vi[0] * &vi[vi.len() - 1];
                r.check(lhs == rhs, || format!("Q recursion j={j} i={i} m={m}"));
            }
        }
    }
    r
}

/// `det_i` through the staged product `c_Q(i,i) Π_{l<=i} Q(v_l^{k-i,(l-1)})`.
pub fn det_from_stages(st: &StagedCoords, i: usize) -> Option<Rational> {
    let k = st.k;
    (1..=i)
        .map(|l| st.q(l, k - i, l - 1))
        .try_fold(c_q(i, i), |acc, x| Some(acc * x?))
}

/// `c_Q(i,i)` written as `±1/2^i`, the constant of `det_i`.
pub fn det_constant(i: usize) -> Rational {
    c_q(i, i)
}

/// `½` as a rational, for callers building closed forms.
pub fn half() -> Rational {
    rat(1, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flag::ThetaSet;
    use crate::unipotent::Chart;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn chart(p: usize, q: usize, theta: &str) -> Chart {
        Chart::new(&ThetaSet::parse(Signature::new(p, q).unwrap(), theta).unwrap())
    }

    #[test]
    fn zero_coords_have_zero_s() {
        let c = UnipotentCoords::zero(&chart(5, 3, "1,2,3"));
        assert!(s_matrix(&c).is_zero());
        assert_eq!(det_i(&psi_chart(&c), 2).unwrap(), int(0));
    }

    #[test]
    fn det_one_is_minus_half_q() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = UnipotentCoords::random(&chart(5, 3, "1,2,3"), &mut rng, 9);
        let q = eval_q(Signature::new(4, 2).unwrap(), &c.factor_vector(1));
        assert_eq!(det_i(&psi_chart(&c), 1).unwrap(), -q / int(2));
    }

    #[test]
    fn two_level_stage_matches_closed_form() {
        // v_2^{0,(1)} = v_2 + (2b/Q(v_1)) v_1 with v_1 = v_1^0 for (1,2)-flags.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ch = chart(4, 3, "1,2");
        let c = UnipotentCoords::random(&ch, &mut rng, 9);
        let st = staged_change_of_vars(&c);
        let s = Signature::new(2, 1).unwrap();
        let v1 = c.v(1, 0);
        let b = &c.b[0][0];
        let f = int(2) * b / eval_q(s, &v1);
        let expect: Vec<Rational> = c.v0[1].iter().zip(&v1).map(|(x, y)| x + &f * y).collect();
        assert_eq!(st.v(2, 0, 1).unwrap(), expect);
        let d2 = det_i(&psi_chart(&c), 2).unwrap();
        assert_eq!(d2, rat(-1, 4) * eval_q(s, &v1) * eval_q(s, &expect));
    }

    #[test]
    fn identities_hold_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (p, q, t) in [(4, 2, "1"), (4, 3, "1,2"), (5, 3, "1,2"), (5, 4, "1,2,3"), (4, 3, "1,2,3"), (6, 3, "1,2,3")] {
            for _ in 0..5 {
                let c = UnipotentCoords::random(&chart(p, q, t), &mut rng, 30);
                let r = check_identities(&c);
                assert!(r.ok(), "({p},{q},{t}): {:?}", r.failed);
                assert!(r.checked > 0);
            }
        }
    }

    #[test]
    fn stages_roundtrip_through_previous_stage() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let c = UnipotentCoords::random(&chart(5, 3, "1,2,3"), &mut rng, 20);
        let st = staged_change_of_vars(&c);
        assert!(st.complete());
        let back = previous_stage(c.chart.sig(), &st.stages[0][0], &st.stages[1]).unwrap();
        assert_eq!(back, st.stages[0]);
    }

    #[test]
    fn minor_signs_agree_with_stages() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (p, q, t) in [(5, 3, "1,2"), (4, 3, "1,2,3"), (6, 4, "1,2,3")] {
            let ch = chart(p, q, t);
            for _ in 0..5 {
                let c = UnipotentCoords::random(&ch, &mut rng, 30);
                let st = staged_change_of_vars(&c);
                let Some(staged) = sign_from_stages(&st) else { continue };
                let mut minors = sign_from_minors(ch.sig(), &psi_chart(&c), ch.k);
                // First coordinates only matter for timelike vectors.
                if let (Some(a), Some(b)) = (minors.firstcoord.as_mut(), staged.firstcoord.as_ref()) {
                    if ch.k < ch.sig().q {
                        for j in 0..ch.k {
                            if staged.qsigns[j][0] > 0 {
                                a[j] = b[j];
                            }
                        }
                    }
                }
                assert_eq!(minors, staged, "({p},{q},{t})");
            }
        }
    }

    #[test]
    fn minor_count_for_submaximal_flags() {
        for q in 2..6 {
            let sig = Signature::new(q + 2, q).unwrap();
            assert_eq!(consulted_minor_count(sig, q - 1), q * (q - 1));
        }
    }
}
