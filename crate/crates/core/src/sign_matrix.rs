//! Sign matrices for `(1,…,q-1)`-flags and their alteration rewriting system.
//!
//! Entry `(i, j)`, `1 <= i <= q-1`, `0 <= j <= q-1-i`, records the cell data
//! of `v_i^{j,(i-1)}`: its color is the sign of `Q` (blue for negative) and
//! its symbol is `∗` when the color agrees with the entry to its left
//! (column `-1` counts as red), otherwise the sign of `b_i^{j,(i-1)}`, or of
//! the first coordinate of `v_i^{0,(i-1)}` in column 0.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transversality::SignVector;

/// Symbol of an entry, identified with `ℤ/3` via `∗ = 0`, `+ = 1`, `- = 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Symbol {
    Star,
    Plus,
    Minus,
}

impl Symbol {
    pub fn value(self) -> u8 {
        match self {
            Symbol::Star => 0,
            Symbol::Plus => 1,
            Symbol::Minus => 2,
        }
    }

    pub fn from_value(v: u8) -> Symbol {
        match v % 3 {
            0 => Symbol::Star,
            1 => Symbol::Plus,
            _ => Symbol::Minus,
        }
    }

    /// `+` or `-` from a nonzero sign.
    pub fn from_sign(s: i8) -> Symbol {
        if s > 0 {
            Symbol::Plus
        } else {
            Symbol::Minus
        }
    }

    fn mul(self, other: Symbol) -> Symbol {
        Symbol::from_value(self.value() * other.value())
    }

    fn neg(self) -> Symbol {
        Symbol::from_value(3 - self.value())
    }

    fn char(self) -> char {
        match self {
            Symbol::Star => '*',
            Symbol::Plus => '+',
            Symbol::Minus => '-',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn from_q_sign(s: i8) -> Color {
        if s < 0 {
            Color::Blue
        } else {
            Color::Red
        }
    }

    #[cfg(test)]
    fn flip(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }

    fn char(self) -> char {
        match self {
            Color::Red => 'r',
            Color::Blue => 'b',
        }
    }
}

/// A sign matrix. Colors are determined by the symbols row by row.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignMatrix {
    q: usize,
    /// `rows[i-1][j]` for entry `(i, j)`.
    rows: Vec<Vec<Symbol>>,
}

/// Entry positions `(i, j)` in row-major order.
pub fn shape(q: usize) -> Vec<(usize, usize)> {
    (1..q).flat_map(|i| (0..q - i).map(move |j| (i, j))).collect()
}

/// Windows `(i, j)` on which `μ` is defined: `i < q-1`, `j < q-1-i`.
pub fn windows(q: usize) -> Vec<(usize, usize)> {
    (1..q.saturating_sub(1)).flat_map(|i| (0..q - 1 - i).map(move |j| (i, j))).collect()
}

impl SignMatrix {
    pub fn new(q: usize, rows: Vec<Vec<Symbol>>) -> Result<Self> {
        if q < 2 || rows.len() != q - 1 || rows.iter().enumerate().any(|(i, r)| r.len() != q - 1 - i) {
            return Err(Error::Dimension(format!("sign matrix rows do not fit q = {q}")));
        }
        Ok(SignMatrix { q, rows })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn get(&self, i: usize, j: usize) -> Symbol {
        self.rows[i - 1][j]
    }

    fn set(&mut self, i: usize, j: usize, s: Symbol) {
        self.rows[i - 1][j] = s;
    }

    /// Color of entry `(i, j)`.
    pub fn color(&self, i: usize, j: usize) -> Color {
        let flips = self.rows[i - 1][..=j].iter().filter(|&&s| s != Symbol::Star).count();
        if flips % 2 == 0 {
            Color::Red
        } else {
            Color::Blue
        }
    }

    pub fn has_star(&self) -> bool {
        self.rows.iter().flatten().any(|&s| s == Symbol::Star)
    }

    pub fn minus_count(&self) -> usize {
        self.rows.iter().flatten().filter(|&&s| s == Symbol::Minus).count()
    }

    pub fn first_line_colors(&self) -> Vec<Color> {
        (0..self.q - 1).map(|j| self.color(1, j)).collect()
    }

    /// Striped: rows `i >= 2` are blue at even columns and red at odd ones.
    pub fn is_striped(&self) -> bool {
        (2..self.q).all(|i| {
            (0..self.q - i).all(|j| self.color(i, j) == if j % 2 == 0 { Color::Blue } else { Color::Red })
        })
    }

    /// Base-3 code of the symbols in [`shape`] order.
    pub fn key(&self) -> u64 {
        self.rows.iter().flatten().rev().fold(0u64, |acc, s| acc * 3 + u64::from(s.value()))
    }

    pub fn from_key(q: usize, mut key: u64) -> SignMatrix {
        let rows = (1..q)
            .map(|i| {
                (0..q - i)
                    .map(|_| {
                        let s = Symbol::from_value((key % 3) as u8);
                        key /= 3;
                        s
                    })
                    .collect()
            })
            .collect();
        SignMatrix { q, rows }
    }

    /// All `3^{q(q-1)/2}` sign matrices.
    pub fn all(q: usize) -> impl Iterator<Item = SignMatrix> {
        let total = 3u64.pow((q * (q - 1) / 2) as u32);
        (0..total).map(move |k| SignMatrix::from_key(q, k))
    }

    /// Parses rows separated by `/` or newlines, tokens such as `r*`, `b+`,
    /// or a bare symbol. Given colors must agree with the symbols.
    pub fn parse(text: &str) -> Result<SignMatrix> {
        let lines: Vec<&str> =
            text.split(['/', '\n', ';']).map(str::trim).filter(|l| !l.is_empty()).collect();
        let q = lines.len() + 1;
        let mut rows = Vec::new();
        let mut colors = Vec::new();
        for line in &lines {
            let mut row = Vec::new();
            let mut crow = Vec::new();
            for tok in line.split_whitespace() {
                let mut chars = tok.chars();
                let (c, s) = match (chars.next(), chars.next(), chars.next()) {
                    (Some(s), None, None) => (None, s),
                    (Some(c), Some(s), None) => (Some(c), s),
                    _ => return Err(Error::Parse(format!("bad sign matrix token {tok:?}"))),
                };
                let color = match c {
                    None => None,
                    Some('r') | Some('R') => Some(Color::Red),
                    Some('b') | Some('B') => Some(Color::Blue),
                    Some(_) => return Err(Error::Parse(format!("bad color in {tok:?}"))),
                };
                let sym = match s {
                    '*' | '∗' => Symbol::Star,
                    '+' => Symbol::Plus,
                    '-' | '−' => Symbol::Minus,
                    _ => return Err(Error::Parse(format!("bad symbol in {tok:?}"))),
                };
                row.push(sym);
                crow.push(color);
            }
            rows.push(row);
            colors.push(crow);
        }
        let m = SignMatrix::new(q, rows).map_err(|e| Error::Parse(e.to_string()))?;
        for (i, crow) in colors.iter().enumerate() {
            for (j, c) in crow.iter().enumerate() {
                if let Some(c) = c {
                    if *c != m.color(i + 1, j) {
                        return Err(Error::Parse(format!("color of entry ({}, {j}) contradicts the symbols", i + 1)));
                    }
                }
            }
        }
        Ok(m)
    }

    /// The window entries `(i,j), (i+1,j), (i,j+1)` and the fourth one,
    /// virtual on the boundary column.
    fn window(&self, i: usize, j: usize) -> ([Symbol; 4], [Color; 4]) {
        let mut vals = [self.get(i, j), self.get(i + 1, j), self.get(i, j + 1), Symbol::Star];
        let mut cols = [self.color(i, j), self.color(i + 1, j), self.color(i, j + 1), Color::Red];
        if j + 2 + i == self.q {
            let c = self.color(i + 1, j);
            (vals[3], cols[3]) = match c {
                Color::Blue => (Symbol::Plus, Color::Red),
                Color::Red => (Symbol::Minus, Color::Blue),
            };
        } else {
            vals[3] = self.get(i + 1, j + 1);
            cols[3] = self.color(i + 1, j + 1);
        }
        (vals, cols)
    }

    fn check_window(&self, i: usize, j: usize) -> Result<()> {
        if i == 0 || i + 1 >= self.q || j + 1 + i >= self.q {
            return Err(Error::Index(format!("no window ({i}, {j}) for q = {}", self.q)));
        }
        Ok(())
    }

    /// `μ_{i,j}` in `ℤ/3`.
    pub fn mu(&self, i: usize, j: usize) -> Result<Symbol> {
        self.check_window(i, j)?;
        let (vals, cols) = self.window(i, j);
        Ok(mu_of(&vals, &cols, self.get(i, j) == Symbol::Star))
    }

    pub fn is_alterable(&self, i: usize, j: usize) -> Result<bool> {
        Ok(self.mu(i, j)? != Symbol::Plus)
    }

    /// All matrices reachable by one alteration at `(i, j)`.
    pub fn alterations_at(&self, i: usize, j: usize) -> Result<Vec<SignMatrix>> {
        if !self.is_alterable(i, j)? {
            return Err(Error::NotAlterable { i, j });
        }
        let (vals, cols) = self.window(i, j);
        let star = self.get(i, j) == Symbol::Star;
        let real = if j + 2 + i < self.q { 4 } else { 3 };
        let stars: Vec<usize> = (0..real).filter(|&k| vals[k] == Symbol::Star).collect();
        let pos = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)];
        let mut out = Vec::new();
        for choice in 0..1u32 << stars.len() {
            let mut nv = vals;
            for (b, &k) in stars.iter().enumerate() {
                nv[k] = if choice >> b & 1 == 0 { Symbol::Plus } else { Symbol::Minus };
            }
            if mu_of(&nv, &cols, star) != Symbol::Minus {
                continue;
            }
            let mut m = self.clone();
            for (k, &(a, c)) in pos.iter().enumerate().take(real) {
                m.set(a, c, if vals[k] == Symbol::Star { nv[k] } else { Symbol::Star });
            }
            out.push(m);
        }
        Ok(out)
    }

    /// All one-step alterations over every alterable window.
    pub fn alterations(&self) -> Vec<SignMatrix> {
        windows(self.q)
            .into_iter()
            .filter(|&(i, j)| self.is_alterable(i, j).unwrap_or(false))
            .flat_map(|(i, j)| self.alterations_at(i, j).unwrap_or_default())
            .collect()
    }

    /// No window is alterable and no entry is `∗`.
    pub fn is_theta_positive(&self) -> bool {
        !self.has_star() && windows(self.q).into_iter().all(|(i, j)| self.mu(i, j) == Ok(Symbol::Plus))
    }

    /// Sign matrix of a point from its sign data with top level `q-1`.
    /// Fails when a needed sign is 0.
    pub fn from_sign_vector(sv: &SignVector) -> Result<SignMatrix> {
        let q = sv.k + 1;
        let first = sv
            .firstcoord
            .as_ref()
            .ok_or_else(|| Error::Unsupported("sign matrix needs first-coordinate signs".into()))?;
        let mut rows = Vec::new();
        for i in 1..q {
            let mut row = Vec::new();
            let mut left = Color::Red;
            for j in 0..q - i {
                let qs = sv.qsigns[i - 1][j];
                if qs == 0 {
                    return Err(Error::Degenerate(format!("Q sign at ({i}, {j})")));
                }
                let c = Color::from_q_sign(qs);
                if c == left {
                    row.push(Symbol::Star);
                } else {
                    let s = if j == 0 { first[i - 1] } else { sv.bsigns[i - 1][j - 1] };
                    if s == 0 {
                        return Err(Error::Degenerate(format!("symbol sign at ({i}, {j})")));
                    }
                    row.push(Symbol::from_sign(s));
                }
                left = c;
            }
            rows.push(row);
        }
        SignMatrix::new(q, rows)
    }
}

fn mu_of(vals: &[Symbol; 4], cols: &[Color; 4], star_orig: bool) -> Symbol {
    let e1 = cols[1] == cols[3];
    let r = vals.iter().fold(Symbol::Plus, |acc, &v| acc.mul(v));
    if e1 ^ star_orig {
        r.neg()
    } else {
        r
    }
}

impl fmt::Display for SignMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> = (1..self.q)
            .map(|i| {
                (0..self.q - i)
                    .map(|j| format!("{}{}", self.color(i, j).char(), self.get(i, j).char()))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        write!(f, "{}", lines.join(" / "))
    }
}

/// The Θ-positive matrix with first line signs `s` and striped colors.
/// Rows `2..q-1` are filled right to left so that every `μ` is `+`.
pub fn theta_positive_reference(first_line: &[i8]) -> SignMatrix {
    let q = first_line.len() + 1;
    let mut m = SignMatrix {
        q,
        rows: (1..q).map(|i| vec![Symbol::Plus; q - i]).collect(),
    };
    for (j, &s) in first_line.iter().enumerate() {
        m.set(1, j, Symbol::from_sign(s));
    }
    for i in 1..q.saturating_sub(1) {
        for j in (0..q - 1 - i).rev() {
            // No ∗, so colors alternate and `ε₁ = ε₂ = 0`: `μ` is the plain product.
            let fourth = if j + 2 + i == q {
                match m.color(i + 1, j) {
                    Color::Blue => Symbol::Plus,
                    Color::Red => Symbol::Minus,
                }
            } else {
                m.get(i + 1, j + 1)
            };
            let v = m.get(i, j).mul(m.get(i, j + 1)).mul(fourth);
            m.set(i + 1, j, v);
        }
    }
    m
}

/// Label of an alteration class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubmaxLabel {
    /// A Θ-positive singleton class, named by its first line of signs.
    Positive { signs: Vec<i8> },
    /// First-line colors and minus-count parity of its striped members.
    NonPositive { colors: Vec<Color>, minus_parity: u8 },
}

impl SubmaxLabel {
    pub fn is_positive(&self) -> bool {
        matches!(self, SubmaxLabel::Positive { .. })
    }
}

impl fmt::Display for SubmaxLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubmaxLabel::Positive { signs } => {
                let s: String = signs.iter().map(|&x| if x > 0 { '+' } else { '-' }).collect();
                write!(f, "positive[{s}]")
            }
            SubmaxLabel::NonPositive { colors, minus_parity } => {
                let c: String = colors.iter().map(|c| c.char()).collect();
                write!(f, "class[{c}|{minus_parity}]")
            }
        }
    }
}

fn first_line_signs(m: &SignMatrix) -> Vec<i8> {
    (0..m.q - 1).map(|j| if m.get(1, j) == Symbol::Plus { 1 } else { -1 }).collect()
}

fn striped_label(m: &SignMatrix) -> SubmaxLabel {
    SubmaxLabel::NonPositive { colors: m.first_line_colors(), minus_parity: (m.minus_count() % 2) as u8 }
}

/// Exhaustive class table for one `q`.
pub struct ClassTable {
    pub q: usize,
    /// Label of the class of every matrix, indexed by key.
    pub labels: Vec<SubmaxLabel>,
    pub distinct: Vec<SubmaxLabel>,
}

/// Largest `q` for which the class table is built exhaustively.
pub const TABLE_MAX_Q: usize = 5;

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let up = parent[parent[x as usize] as usize];
        parent[x as usize] = up;
        x = up;
    }
    x
}

fn build_table(q: usize) -> ClassTable {
    let total = 3usize.pow((q * (q - 1) / 2) as u32);
    let mut parent: Vec<u32> = (0..total as u32).collect();
    let mut positive = vec![false; total];
    for key in 0..total {
        let m = SignMatrix::from_key(q, key as u64);
        let alts = m.alterations();
        positive[key] = alts.is_empty() && !m.has_star();
        for a in alts {
            let (x, y) = (find(&mut parent, key as u32), find(&mut parent, a.key() as u32));
            if x != y {
                parent[x as usize] = y;
            }
        }
    }
    let mut root_label: HashMap<u32, SubmaxLabel> = HashMap::new();
    for key in 0..total {
        let m = SignMatrix::from_key(q, key as u64);
        let r = find(&mut parent, key as u32);
        if positive[key] {
            root_label.insert(r, SubmaxLabel::Positive { signs: first_line_signs(&m) });
        } else if m.is_striped() {
            root_label.entry(r).or_insert_with(|| striped_label(&m));
        }
    }
    let labels: Vec<SubmaxLabel> =
        (0..total).map(|k| root_label[&find(&mut parent, k as u32)].clone()).collect();
    let mut distinct: Vec<SubmaxLabel> = root_label.into_values().collect();
    distinct.sort();
    ClassTable { q, labels, distinct }
}

/// The cached class table for `2 <= q <= 5`.
pub fn class_table(q: usize) -> Option<&'static ClassTable> {
    static TABLES: [OnceLock<ClassTable>; TABLE_MAX_Q + 1] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    (2..=TABLE_MAX_Q).contains(&q).then(|| TABLES[q].get_or_init(|| build_table(q)))
}

/// Bound on the states visited by [`alteration_class`] beyond the table.
pub const BFS_LIMIT: usize = 2_000_000;

/// Class label of `m`: a table lookup for `q <= 5`, otherwise a search
/// over the alteration graph for a striped member.
pub fn alteration_class(m: &SignMatrix) -> Result<SubmaxLabel> {
    if let Some(t) = class_table(m.q) {
        return Ok(t.labels[m.key() as usize].clone());
    }
    if m.is_theta_positive() {
        return Ok(SubmaxLabel::Positive { signs: first_line_signs(m) });
    }
    let mut seen = HashSet::from([m.key()]);
    let mut queue = VecDeque::from([m.clone()]);
    while let Some(x) = queue.pop_front() {
        if x.is_striped() {
            return Ok(striped_label(&x));
        }
        for y in x.alterations() {
            if seen.insert(y.key()) {
                if seen.len() > BFS_LIMIT {
                    return Err(Error::Budget);
                }
                queue.push_back(y);
            }
        }
    }
    Err(Error::Unsupported(format!("no striped matrix reachable from {m}")))
}

/// Number of Θ-positive sign matrices, by scanning the matrices without `∗`.
pub fn positive_count(q: usize) -> usize {
    let cells = q * (q - 1) / 2;
    (0..1u64 << cells)
        .filter(|bits| {
            let rows = (1..q)
                .scan(0usize, |off, i| {
                    let r: Vec<Symbol> = (0..q - i)
                        .map(|j| if bits >> (*off + j) & 1 == 0 { Symbol::Plus } else { Symbol::Minus })
                        .collect();
                    *off += q - i;
                    Some(r)
                })
                .collect();
            SignMatrix { q, rows }.is_theta_positive()
        })
        .count()
}

/// Every class label for `q`: enumerated for `q <= 5`; beyond that the
/// `2^{q-1}` positive labels plus one non-positive label per first-line
/// color word and parity.
pub fn class_labels(q: usize) -> Vec<SubmaxLabel> {
    match class_table(q) {
        Some(t) => t.distinct.clone(),
        None => generic_class_labels(q),
    }
}

fn generic_class_labels(q: usize) -> Vec<SubmaxLabel> {
    let mut out: Vec<SubmaxLabel> = (0..1u32 << (q - 1))
        .map(|bits| SubmaxLabel::Positive {
            signs: (0..q - 1).map(|j| if bits >> j & 1 == 0 { 1 } else { -1 }).collect(),
        })
        .collect();
    for bits in 0..1u32 << (q - 1) {
        let colors = (0..q - 1).map(|j| if bits >> j & 1 == 0 { Color::Red } else { Color::Blue }).collect::<Vec<_>>();
        for minus_parity in 0..2 {
            out.push(SubmaxLabel::NonPositive { colors: colors.clone(), minus_parity });
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> SignMatrix {
        SignMatrix::parse(s).unwrap()
    }

    #[test]
    fn parse_and_display_roundtrip() {
        let a = m("r* r* r* / b+ r+ / b+");
        assert_eq!(a.to_string(), "r* r* r* / b+ r+ / b+");
        assert_eq!(SignMatrix::from_key(4, a.key()), a);
        assert!(SignMatrix::parse("b* r+ / b+").is_err());
        assert!(SignMatrix::parse("r* r* / b+ r+").is_err());
    }

    #[test]
    fn colors_follow_symbols() {
        let a = m("b+ r- r* / b+ b* / r*");
        assert_eq!(a.first_line_colors(), vec![Color::Blue, Color::Red, Color::Red]);
        assert_eq!(a.color(2, 1), Color::Blue);
        assert_eq!(a.color(3, 0), Color::Red);
    }

    #[test]
    fn all_plus_window_is_alterable() {
        // Striped all-plus lower pair with equal colors: ε₁ = 1.
        let a = m("b+ r+ / b+");
        let (vals, cols) = a.window(1, 0);
        assert_eq!(cols[1], cols[3].flip());
        assert_eq!(vals, [Symbol::Plus; 4]);
        let all_red = m("r* r* / r*");
        assert_eq!(all_red.mu(1, 0).unwrap(), Symbol::Star);
        assert!(all_red.is_alterable(1, 0).unwrap());
    }

    #[test]
    fn generic_labels_match_tables_from_q4() {
        for q in 4..=TABLE_MAX_Q {
            assert_eq!(generic_class_labels(q), class_table(q).unwrap().distinct, "q={q}");
        }
        assert_eq!(class_table(3).unwrap().distinct.len(), 11);
        assert_eq!(generic_class_labels(3).len(), 12);
    }

    #[test]
    fn worked_alteration() {
        let a = m("r* r* r* / b+ r+ / b+");
        let target = m("b+ r+ r* / r* r* / b+");
        assert!(a.alterations_at(1, 0).unwrap().contains(&target));
    }

    #[test]
    fn not_alterable_is_an_error() {
        let r = theta_positive_reference(&[1, 1, 1]);
        assert_eq!(r.alterations_at(1, 0), Err(Error::NotAlterable { i: 1, j: 0 }));
        assert!(r.mu(3, 0).is_err());
    }

    #[test]
    fn small_class_counts() {
        assert_eq!(class_table(2).unwrap().distinct.len(), 3);
        assert_eq!(class_table(3).unwrap().distinct.len(), 11);
        assert_eq!(class_table(4).unwrap().distinct.len(), 24);
    }

    #[test]
    fn references_are_positive_and_distinct() {
        for q in 2..=6 {
            let mut seen = HashSet::new();
            for bits in 0..1u32 << (q - 1) {
                let s: Vec<i8> = (0..q - 1).map(|j| if bits >> j & 1 == 0 { 1 } else { -1 }).collect();
                let r = theta_positive_reference(&s);
                assert!(r.is_theta_positive(), "{r}");
                assert!(r.alterations().is_empty());
                assert!(seen.insert(r.key()));
            }
        }
    }

    #[test]
    fn all_plus_red_striped_is_not_positive() {
        // Rows start red, every later entry flips color with a `+`.
        for q in 3..=6 {
            let rows = (1..q)
                .map(|i| (0..q - i).map(|j| if j == 0 { Symbol::Star } else { Symbol::Plus }).collect())
                .collect();
            let a = SignMatrix::new(q, rows).unwrap();
            assert!(!a.is_theta_positive());
            assert!(!a.alterations().is_empty());
        }
    }

    #[test]
    fn positive_counts() {
        for q in 2..=6 {
            assert_eq!(positive_count(q), 1 << (q - 1));
        }
    }

    #[test]
    fn bfs_agrees_with_table() {
        let t = class_table(4).unwrap();
        for key in (0..t.labels.len()).step_by(37) {
            let a = SignMatrix::from_key(4, key as u64);
            let mut seen = HashSet::from([a.key()]);
            let mut queue = VecDeque::from([a.clone()]);
            let mut found = None;
            while let Some(x) = queue.pop_front() {
                if x.is_theta_positive() {
                    found = Some(SubmaxLabel::Positive { signs: first_line_signs(&x) });
                    break;
                }
                if x.is_striped() && !x.is_theta_positive() {
                    found = Some(striped_label(&x));
                    break;
                }
                for y in x.alterations() {
                    if seen.insert(y.key()) {
                        queue.push_back(y);
                    }
                }
            }
            assert_eq!(found.as_ref(), Some(&t.labels[key]), "{a}");
        }
    }
}
