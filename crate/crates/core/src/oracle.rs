//! Monte Carlo connectivity oracle.
//!
//! Points of the chart are sampled, and pairs are joined by piecewise-linear
//! paths in chart coordinates along which no `detᵢ` vanishes. Candidate
//! paths are screened in floating point with an independent implementation
//! of the chart map; each segment of an accepted path is then certified
//! exactly: `detᵢ` restricted to the segment is a polynomial of degree at
//! most `2ki`, recovered by interpolation, and Sturm sequences show it has
//! no root. Components are the union-find classes of certified connections.
//!
//! Joining never uses a component label, so comparing the classes with the
//! exact labels is an independent check.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flag::{require_self_opposite, ThetaSet};
use crate::linalg::{format_rational, rat, Rational};
use crate::quadratic::eval_q;
use crate::poly::{unit_grid, Poly};
use crate::transversality::{det_i, staged_change_of_vars};
use crate::components::{classify_point, undo_stages, ComponentLabel};
use crate::unipotent::{psi_chart, Chart, UnipotentCoords};

/// Chart data needed by the floating-point evaluator.
#[derive(Clone, Debug)]
struct FloatChart {
    p: usize,
    q: usize,
    k: usize,
    levels: Vec<usize>,
    /// `free[j-1][i-1]`: whether `a_j^i` is a coordinate.
    free: Vec<Vec<bool>>,
}

impl FloatChart {
    fn new(chart: &Chart) -> Self {
        let sig = chart.sig();
        let k = chart.k;
        FloatChart {
            p: sig.p,
            q: sig.q,
            k,
            levels: chart.levels.clone(),
            free: (1..=k).map(|j| (1..=k - j).map(|i| chart.a_free(j, i)).collect()).collect(),
        }
    }

    fn n(&self) -> usize {
        self.p + self.q
    }

    /// Factor vectors from flat coordinates, in the layout of
    /// `UnipotentCoords::flatten`.
    fn factor_vectors(&self, xs: &[f64]) -> Vec<Vec<f64>> {
        let k = self.k;
        let len0 = self.n() - 2 * k;
        let mut it = xs.iter().copied();
        (1..=k)
            .map(|j| {
                let v0: Vec<f64> = (0..len0).map(|_| it.next().unwrap()).collect();
                let mut a = Vec::new();
                let mut b = Vec::new();
                for i in 1..=k - j {
                    b.push(it.next().unwrap());
                    a.push(if self.free[j - 1][i - 1] { it.next().unwrap() } else { 0.0 });
                }
                b.iter().rev().chain(&v0).chain(&a).copied().collect()
            })
            .collect()
    }

    /// The chart matrix: product over `j` of `I + X_j + X_j²/2`.
    fn psi(&self, xs: &[f64]) -> Vec<Vec<f64>> {
        let n = self.n();
        let mut u = identity(n);
        for (j, w) in (1..).zip(self.factor_vectors(xs)) {
            let mut x = vec![vec![0.0; n]; n];
            // Gram matrix of the block of signature (p-j, q-j): antidiagonal
            // pairs outside, identity in the middle.
            let m = w.len();
            let qq = self.q - j;
            for (r, &wr) in w.iter().enumerate() {
                x[j + r][n - j] = wr;
                let mw = if r < qq || r >= m - qq { w[m - 1 - r] } else { wr };
                x[j - 1][j + r] = -mw;
            }
            let x2 = matmul(&x, &x);
            let mut e = identity(n);
            for r in 0..n {
                for c in 0..n {
                    e[r][c] += x[r][c] + 0.5 * x2[r][c];
                }
            }
            u = matmul(&u, &e);
        }
        u
    }

    fn dets(&self, xs: &[f64]) -> Vec<f64> {
        let u = self.psi(xs);
        let n = self.n();
        self.levels
            .iter()
            .map(|&l| {
                let sub: Vec<Vec<f64>> = (0..l).map(|r| u[r][n - l..].to_vec()).collect();
                det_f64(sub)
            })
            .collect()
    }
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|r| (0..n).map(|c| f64::from(u8::from(r == c))).collect()).collect()
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let m = b[0].len();
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            let aik = a[i][k];
            if aik != 0.0 {
                for j in 0..m {
                    out[i][j] += aik * bk[j];
                }
            }
        }
    }
    out
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det_f64(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    det
}

fn to_f64s(xs: &[Rational]) -> Vec<f64> {
    xs.iter().map(crate::linalg::to_f64).collect()
}

/// Oracle parameters.
#[derive(Clone, Debug, Serialize)]
pub struct OracleConfig {
    pub samples: usize,
    pub seed: u64,
    /// Random waypoint attempts per pair (four times that in the second pass).
    pub budget: usize,
    /// Float evaluations per segment.
    pub grid: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { samples: 200, seed: 1, budget: 60, grid: 48 }
    }
}

/// Denominator of the rational grid on which points and waypoints live.
const DENOM: i64 = 32;

fn round(x: f64) -> Rational {
    rat((x * DENOM as f64).round() as i64, DENOM)
}

/// Spread of log-magnitudes of raw and of staged draws.
const RAW_SPREAD: f64 = 2.5;
const STAGED_SPREAD: f64 = 1.0;

fn log_uniform<R: Rng>(rng: &mut R, spread: f64) -> Rational {
    let m = rng.gen_range(-spread..spread).exp();
    round(if rng.gen_bool(0.5) { m } else { -m })
}

fn transverse(chart: &Chart, c: &UnipotentCoords) -> bool {
    let u = psi_chart(c);
    chart.levels.iter().all(|&l| det_i(&u, l).map(|d| !d.is_zero()).unwrap_or(false))
}

/// Parameters of a staged draw. Row `j` holds the coordinates of `v_j^0`,
/// a target value of its `Q`, then a `(b, target Q)` pair per stage. The
/// last coordinate of `v_j^0` (when it pairs with the first) and each `a`
/// are solved from the targets.
fn row_len(chart: &Chart, j: usize) -> usize {
    chart.v0_len() + 1 + 2 * (chart.k - j)
}

/// Whether the last coordinate of `v_j^0` is solved from its target `Q`.
fn solves_v0(chart: &Chart) -> bool {
    let sig = chart.sig();
    let v0 = chart.v0_len();
    v0 > 1 && sig.reduced((sig.dim() - v0) / 2).q > 0
}

/// Indices of the parameters whose signs pick the cell.
fn signed_slots(chart: &Chart) -> Vec<usize> {
    let v0 = chart.v0_len();
    let mut out = Vec::new();
    let mut off = 0;
    for j in 1..=chart.k {
        out.push(off);
        out.extend(off + v0..off + row_len(chart, j));
        off += row_len(chart, j);
    }
    out
}

/// Random staged parameters: the signs of the signed slots are the bits of
/// `cell` (random beyond 64), magnitudes are log-uniform.
fn staged_params<R: Rng>(chart: &Chart, cell: u64, rng: &mut R) -> Vec<Rational> {
    let total: usize = (1..=chart.k).map(|j| row_len(chart, j)).sum();
    let mut xs: Vec<Rational> = (0..total).map(|_| log_uniform(rng, STAGED_SPREAD)).collect();
    for (bit, &slot) in signed_slots(chart).iter().enumerate() {
        let negative = if bit < 64 { cell >> bit & 1 == 1 } else { rng.gen_bool(0.5) };
        let m = xs[slot].abs();
        xs[slot] = if negative { -m } else { m };
    }
    xs
}

fn cell_key(chart: &Chart, params: &[Rational]) -> Vec<bool> {
    signed_slots(chart).iter().map(|&s| params[s] > Rational::zero()).collect()
}

/// The chart point of staged parameters, if every pivot is usable and the
/// point is transverse.
fn staged_point(chart: &Chart, params: &[Rational]) -> Result<Option<UnipotentCoords>> {
    let sig = chart.sig();
    let n = sig.dim();
    let v0 = chart.v0_len();
    let solve = solves_v0(chart);
    let mut rows = Vec::with_capacity(chart.k);
    let mut off = 0;
    for j in 1..=chart.k {
        let row = &params[off..off + row_len(chart, j)];
        off += row.len();
        let mut v: Vec<Rational> = row[..v0].to_vec();
        if solve {
            let inner = sig.reduced((n - v0) / 2);
            v[v0 - 1] = Rational::zero();
            let q0 = eval_q(inner, &v);
            v[v0 - 1] = rat(1, 1);
            let slope = eval_q(inner, &v) - &q0;
            if slope.is_zero() {
                return Ok(None);
            }
            v[v0 - 1] = (&row[v0] - q0) / slope;
        }
        for pair in row[v0 + 1..].chunks(2) {
            let inner = eval_q(sig.reduced((n - v.len()) / 2), &v);
            let (b, target) = (&pair[0], &pair[1]);
            if b.is_zero() {
                return Ok(None);
            }
            let a = (target - inner) / (rat(2, 1) * b);
            v.insert(0, b.clone());
            v.push(a);
        }
        rows.push(v);
    }
    let c = match undo_stages(sig, &rows) {
        Ok(ws) => UnipotentCoords::from_factor_vectors(chart, &ws)?,
        Err(_) => return Ok(None),
    };
    Ok(transverse(chart, &c).then_some(c))
}

/// Staged parameters of a chart point, when every pivot is nonzero.
fn params_of(c: &UnipotentCoords) -> Option<Vec<Rational>> {
    let st = staged_change_of_vars(c);
    let k = c.chart.k;
    let mut out = Vec::new();
    for j in 1..=k {
        out.extend(st.v(j, 0, j - 1)?);
        out.push(st.q(j, 0, j - 1)?);
        for i in 1..=k - j {
            out.push(st.b(j, i, j - 1)?);
            out.push(st.q(j, i, j - 1)?);
        }
    }
    Some(out)
}

/// A certified path between two staged draws of the same cell: the image
/// of the straight segment between their parameters, approximated by a
/// polyline whose failing pieces are bisected.
fn staged_path(chart: &Chart, pa: &[Rational], pb: &[Rational]) -> Result<Option<Vec<Vec<Rational>>>> {
    const DEPTH: u32 = 8;
    let at = |t: &Rational| -> Result<Option<Vec<Rational>>> {
        let xs: Vec<Rational> = pa.iter().zip(pb).map(|(x, y)| x + t * (y - x)).collect();
        Ok(staged_point(chart, &xs)?.map(|c| c.flatten()))
    };
    let Some(start) = at(&Rational::zero())? else { return Ok(None) };
    let mut path = vec![start];
    // Pending pieces `(t0, t1, depth, image of t1)`, processed left to right.
    let Some(last) = at(&rat(1, 1))? else { return Ok(None) };
    let mut pending = vec![(rat(0, 1), rat(1, 1), 0, last)];
    while let Some((t0, t1, depth, end)) = pending.pop() {
        let start = path.last().expect("nonempty").clone();
        if certify_segment(chart, &start, &end)? {
            path.push(end);
            continue;
        }
        if depth == DEPTH {
            return Ok(None);
        }
        let mid = (&t0 + &t1) / rat(2, 1);
        let Some(middle) = at(&mid)? else { return Ok(None) };
        pending.push((mid.clone(), t1, depth + 1, end));
        pending.push((t0, mid, depth + 1, middle));
    }
    Ok(Some(path))
}

/// One draw: log-uniform coordinates with random signs on a fixed grid,
/// or, with a cell index, staged parameters whose signs sweep the cells.
pub fn draw<R: Rng>(chart: &Chart, cell: Option<u64>, rng: &mut R) -> Result<Option<UnipotentCoords>> {
    match cell {
        Some(cell) => staged_point(chart, &staged_params(chart, cell, rng)),
        None => {
            let xs: Vec<Rational> = (0..chart.dimension()).map(|_| log_uniform(rng, RAW_SPREAD)).collect();
            let c = UnipotentCoords::unflatten(chart, &xs)?;
            Ok(transverse(chart, &c).then_some(c))
        }
    }
}

fn stageable(chart: &Chart) -> bool {
    chart.levels == (1..=chart.k).collect::<Vec<_>>()
}

/// A random chart point with every `detᵢ` nonzero.
pub fn sample_point<R: Rng>(chart: &Chart, rng: &mut R) -> Result<UnipotentCoords> {
    for _ in 0..1000 {
        if let Some(c) = draw(chart, None, rng)? {
            return Ok(c);
        }
    }
    Err(Error::Budget)
}

/// Float screening of the segment `a → b`.
fn segment_ok_f64(fc: &FloatChart, a: &[f64], b: &[f64], grid: usize) -> bool {
    let d0 = fc.dets(a);
    let signs: Vec<bool> = d0.iter().map(|d| *d > 0.0).collect();
    (0..=grid).all(|s| {
        let t = s as f64 / grid as f64;
        let x: Vec<f64> = a.iter().zip(b).map(|(p, q)| p + t * (q - p)).collect();
        fc.dets(&x).iter().zip(&signs).all(|(d, &pos)| d.abs() > 1e-12 && (*d > 0.0) == pos)
    })
}

/// Exact check that no `detᵢ` vanishes on the closed segment `a → b`.
pub fn certify_segment(chart: &Chart, a: &[Rational], b: &[Rational]) -> Result<bool> {
    for &l in &chart.levels {
        let degree = 2 * chart.k * l;
        let ts = unit_grid(degree);
        let mut ys = Vec::with_capacity(ts.len());
        for t in &ts {
            let x: Vec<Rational> = a.iter().zip(b).map(|(p, q)| p + t * (q - p)).collect();
            ys.push(det_i(&psi_chart(&UnipotentCoords::unflatten(chart, &x)?), l)?);
        }
        let poly = Poly::interpolate(&ts, &ys);
        if !poly.no_root_on(&ts[0], &ts[degree]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of [`path_connected`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathResult {
    /// A certified polyline in flat chart coordinates.
    Connected(Vec<Vec<Rational>>),
    NotFound,
}

fn certify_polyline(chart: &Chart, pts: &[Vec<Rational>]) -> Result<bool> {
    for w in pts.windows(2) {
        if !certify_segment(chart, &w[0], &w[1])? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Searches for a certified path between two transverse points: the
/// straight segment, then polylines through one or two random waypoints.
pub fn path_connected<R: Rng>(
    a: &UnipotentCoords,
    b: &UnipotentCoords,
    budget: usize,
    grid: usize,
    rng: &mut R,
) -> Result<PathResult> {
    let chart = &a.chart;
    let fc = FloatChart::new(chart);
    let xa = a.flatten();
    let xb = b.flatten();
    if xa == xb {
        return Ok(PathResult::Connected(vec![xa]));
    }
    let fa = to_f64s(&xa);
    let fb = to_f64s(&xb);
    if fc.dets(&fa).iter().zip(fc.dets(&fb)).any(|(x, y)| (*x > 0.0) != (y > 0.0)) {
        return Ok(PathResult::NotFound);
    }
    let dist = fa.iter().zip(&fb).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let mut candidates: Vec<Vec<Vec<f64>>> = vec![vec![]];
    for attempt in 0..budget {
        let scale = dist * [0.25, 0.5, 1.0, 2.0][attempt % 4];
        let mut way = |c: &[f64]| -> Vec<f64> { c.iter().map(|x| x + scale * rng.gen_range(-1.0..1.0)).collect() };
        let mid: Vec<f64> = fa.iter().zip(&fb).map(|(x, y)| 0.5 * (x + y)).collect();
        if attempt % 2 == 0 {
            candidates.push(vec![way(&mid)]);
        } else {
            let w1 = way(&fa);
            let w2 = way(&fb);
            candidates.push(vec![w1, w2]);
        }
    }
    for ways in candidates {
        let ways: Vec<Vec<f64>> = ways.into_iter().map(|w| to_f64s(&w.into_iter().map(round).collect::<Vec<_>>())).collect();
        let mut pts = vec![fa.clone()];
        pts.extend(ways);
        pts.push(fb.clone());
        if !pts.windows(2).all(|w| segment_ok_f64(&fc, &w[0], &w[1], grid)) {
            continue;
        }
        let exact: Vec<Vec<Rational>> = pts
            .iter()
            .enumerate()
            .map(|(i, p)| {
                if i == 0 {
                    xa.clone()
                } else if i + 1 == pts.len() {
                    xb.clone()
                } else {
                    p.iter().map(|&x| round(x)).collect()
                }
            })
            .collect();
        if certify_polyline(chart, &exact)? {
            return Ok(PathResult::Connected(exact));
        }
    }
    Ok(PathResult::NotFound)
}

/// A certified connection between two samples.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub from: usize,
    pub to: usize,
    /// Polyline vertices as `"num/den"` strings.
    pub path: Vec<Vec<String>>,
}

/// Result of [`estimate_components`].
#[derive(Clone, Debug, Serialize)]
pub struct Estimate {
    pub count: usize,
    #[serde(skip)]
    pub samples: Vec<UnipotentCoords>,
    /// Class index of every sample.
    pub classes: Vec<usize>,
    pub witnesses: Vec<Witness>,
    /// Fraction of raw draws that were transverse.
    pub hit_rate: f64,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Samples points and merges them along certified paths.
///
/// When the levels are `1..k`, half the draws are staged draws sweeping
/// the sign cells, and points sharing a cell are joined first through the
/// staged parameters. Each sample is then tried against the nearest member
/// of every earlier class, and finally each pair of remaining classes
/// through its closest members with a larger budget.
pub fn estimate_components(theta: &ThetaSet, cfg: &OracleConfig) -> Result<Estimate> {
    require_self_opposite(theta)?;
    let chart = Chart::new(theta);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut samples = Vec::with_capacity(cfg.samples);
    let mut draws = 0usize;
    let staged = stageable(&chart);
    let mut params: Vec<Option<Vec<Rational>>> = Vec::with_capacity(cfg.samples);
    while samples.len() < cfg.samples {
        draws += 1;
        if staged && draws.is_multiple_of(2) {
            let ps = staged_params(&chart, draws as u64 / 2, &mut rng);
            if let Some(c) = staged_point(&chart, &ps)? {
                samples.push(c);
                params.push(Some(ps));
            }
        } else if let Some(c) = draw(&chart, None, &mut rng)? {
            params.push(if staged { params_of(&c) } else { None });
            samples.push(c);
        }
        if draws > 1000 * cfg.samples.max(1) {
            return Err(Error::Budget);
        }
    }
    let n = samples.len();
    let flat: Vec<Vec<f64>> = samples.iter().map(|c| to_f64s(&c.flatten())).collect();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut witnesses = Vec::new();
    let mut join = |parent: &mut Vec<usize>, i: usize, j: usize, path: &[Vec<Rational>]| {
        let (a, b) = (find(parent, i), find(parent, j));
        parent[a] = b;
        witnesses.push(Witness {
            from: i,
            to: j,
            path: path.iter().map(|p| p.iter().map(format_rational).collect()).collect(),
        });
    };
    // Points of one staged cell are joined through the staged parameters.
    let mut first_of_cell: HashMap<Vec<bool>, usize> = HashMap::new();
    for i in 0..n {
        let Some(pi) = &params[i] else { continue };
        match first_of_cell.entry(cell_key(&chart, pi)) {
            Entry::Vacant(e) => {
                e.insert(i);
            }
            Entry::Occupied(e) => {
                let j = *e.get();
                if let Some(path) = staged_path(&chart, params[j].as_ref().expect("staged"), pi)? {
                    join(&mut parent, j, i, &path);
                }
            }
        }
    }
    for i in 0..n {
        let mut pair_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut roots: Vec<usize> = (0..i).map(|j| find(&mut parent, j)).collect();
        roots.sort_unstable();
        roots.dedup();
        for r in roots {
            if find(&mut parent, i) == find(&mut parent, r) {
                continue;
            }
            let mut members: Vec<usize> = (0..i).filter(|&j| find(&mut parent, j) == r).collect();
            members.sort_by(|&x, &y| {
                let dx: f64 = flat[x].iter().zip(&flat[i]).map(|(a, b)| (a - b).powi(2)).sum();
                let dy: f64 = flat[y].iter().zip(&flat[i]).map(|(a, b)| (a - b).powi(2)).sum();
                dx.total_cmp(&dy)
            });
            for &j in members.iter().take(1) {
                if let PathResult::Connected(path) =
                    path_connected(&samples[i], &samples[j], cfg.budget, cfg.grid, &mut pair_rng)?
                {
                    join(&mut parent, i, j, &path);
                    break;
                }
            }
        }
    }
    // Second pass: retry each pair of classes through its closest pairs of
    // members with a larger budget.
    let mut pass_rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    loop {
        let mut merged = false;
        let mut reps: Vec<usize> = (0..n).map(|j| find(&mut parent, j)).collect();
        reps.sort_unstable();
        reps.dedup();
        for (x, &ra) in reps.iter().enumerate() {
            for &rb in &reps[x + 1..] {
                if find(&mut parent, ra) == find(&mut parent, rb) {
                    continue;
                }
                let root: Vec<usize> = (0..n).map(|j| find(&mut parent, j)).collect();
                let (ca, cb) = (root[ra], root[rb]);
                let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
                for i in (0..n).filter(|&i| root[i] == ca) {
                    for j in (0..n).filter(|&j| root[j] == cb) {
                        let d: f64 = flat[i].iter().zip(&flat[j]).map(|(a, b)| (a - b).powi(2)).sum();
                        pairs.push((d, i, j));
                    }
                }
                pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                for &(_, i, j) in pairs.iter().take(4) {
                    if let PathResult::Connected(path) =
                        path_connected(&samples[i], &samples[j], 4 * cfg.budget, cfg.grid, &mut pass_rng)?
                    {
                        join(&mut parent, i, j, &path);
                        merged = true;
                        break;
                    }
                }
            }
        }
        if !merged {
            break;
        }
    }
    let mut roots: Vec<usize> = (0..n).map(|j| find(&mut parent, j)).collect();
    let mut distinct = roots.clone();
    distinct.sort_unstable();
    distinct.dedup();
    for r in roots.iter_mut() {
        *r = distinct.binary_search(r).expect("present");
    }
    Ok(Estimate {
        count: distinct.len(),
        samples,
        classes: roots,
        witnesses,
        hit_rate: cfg.samples as f64 / draws as f64,
    })
}

/// Oracle classes holding points of more than one exact label, with the
/// labels found in each.
pub fn label_conflicts(est: &Estimate) -> Result<Vec<(usize, Vec<ComponentLabel>)>> {
    let mut by_class: BTreeMap<usize, BTreeSet<ComponentLabel>> = BTreeMap::new();
    for (c, &class) in est.samples.iter().zip(&est.classes) {
        by_class.entry(class).or_default().insert(classify_point(c)?);
    }
    Ok(by_class
        .into_iter()
        .filter(|(_, ls)| ls.len() > 1)
        .map(|(class, ls)| (class, ls.into_iter().collect()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::to_f64;
    use crate::quadratic::Signature;

    fn chart(p: usize, q: usize, t: &str) -> Chart {
        Chart::new(&ThetaSet::parse(Signature::new(p, q).unwrap(), t).unwrap())
    }

    #[test]
    fn small_estimate_is_concordant() {
        let th = ThetaSet::parse(Signature::new(3, 2).unwrap(), "1").unwrap();
        let est = estimate_components(&th, &OracleConfig { samples: 40, ..OracleConfig::default() }).unwrap();
        assert!(label_conflicts(&est).unwrap().is_empty());
    }

    #[test]
    fn float_chart_matches_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for ch in [chart(5, 3, "1,2,3"), chart(4, 3, "1,3"), chart(4, 4, "4,qp")] {
            let c = UnipotentCoords::random(&ch, &mut rng, 5);
            let fc = FloatChart::new(&ch);
            let fu = fc.psi(&to_f64s(&c.flatten()));
            let u = psi_chart(&c);
            for r in 0..ch.n() {
                for s in 0..ch.n() {
                    assert!((fu[r][s] - to_f64(&u[(r, s)])).abs() < 1e-6 * (1.0 + fu[r][s].abs()));
                }
            }
        }
    }

    #[test]
    fn point_is_connected_to_itself() {
        let ch = chart(3, 2, "1");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = sample_point(&ch, &mut rng).unwrap();
        assert!(matches!(path_connected(&a, &a, 1, 8, &mut rng).unwrap(), PathResult::Connected(_)));
    }

    #[test]
    fn opposite_det_signs_never_connect() {
        let ch = chart(3, 2, "1");
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut a = UnipotentCoords::zero(&ch);
        a.v0[0] = vec![rat(1, 1), rat(0, 1), rat(-1, 1)];
        let mut b = a.clone();
        b.v0[0] = vec![rat(1, 1), rat(0, 1), rat(1, 1)];
        assert_eq!(path_connected(&a, &b, 20, 16, &mut rng).unwrap(), PathResult::NotFound);
    }

    #[test]
    fn certification_detects_crossing() {
        let ch = chart(3, 2, "1");
        let mut a = UnipotentCoords::zero(&ch);
        a.v0[0] = vec![rat(1, 1), rat(0, 1), rat(-1, 1)];
        let mut b = a.clone();
        b.v0[0][1] = rat(2, 1);
        // Q goes from -2 to 2 along the segment.
        assert!(!certify_segment(&ch, &a.flatten(), &b.flatten()).unwrap());
        let mut c = a.clone();
        c.v0[0][1] = rat(1, 1);
        assert!(certify_segment(&ch, &a.flatten(), &c.flatten()).unwrap());
    }

    #[test]
    fn small_estimate() {
        let t = ThetaSet::parse(Signature::new(3, 2).unwrap(), "1").unwrap();
        let e = estimate_components(&t, &OracleConfig { samples: 40, ..Default::default() }).unwrap();
        assert_eq!(e.count, 3);
    }
}
