//! Matrix subshifts in one and two dimensions.
//!
//! Conventions: a pattern of shape `(m, n)` has `m` columns and `n` rows and
//! is stored column-major, `cells[x * n + y]`, with `y = 0` the bottom row.
//! `A(t, t')` allows `t'` immediately to the right of `t`; `B(t, t')` allows
//! `t'` immediately above `t`. A cylinder's anchor is the lattice point of
//! its lower-left cell.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::graphs::{nb_matrix, GraphError, LevelSide, UGraph};
use crate::matrix::IntMatrix;
use crate::mealy::Mealy;
use crate::spectral::{deviation_series, rational_to_f64, second_modulus_directed, SpectralError};
use crate::vhdatum::{validate_datum, DatumError, VHDatum};

/// Largest `m·n` accepted by exhaustive pattern enumeration.
pub const ENUMERATION_CAP: usize = 12;

#[derive(Debug, Error)]
pub enum SubshiftError {
    #[error(transparent)]
    Datum(#[from] DatumError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("transition matrices must be square 0/1 matrices of equal size")]
    BadMatrix,
    #[error("transition matrix `{0}` has a zero row or column")]
    ZeroLine(&'static str),
    #[error("the subshift is one-dimensional")]
    NoVertical,
    #[error("the subshift is not regular")]
    Irregular,
    #[error("the subshift is not uniquely extendable")]
    NotUniquelyExtendable,
    #[error("pattern size {cells} exceeds the enumeration cap {cap}")]
    SizeCap { cells: usize, cap: usize },
    #[error("pattern shape and cell count disagree")]
    BadShape,
    #[error("symbol {0} is outside the alphabet")]
    BadSymbol(usize),
    #[error("cylinders must share their rows (same anchor row and height)")]
    HeightMismatch,
    #[error("cylinders overlap: gap {0} is negative")]
    Overlap(i64),
    #[error("pattern is not admissible")]
    Inadmissible,
    #[error("traces do not share their origin symbol")]
    TraceOrigin,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

/// Axis along which transition graphs extend and cylinders are shifted.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Horizontal,
    Vertical,
}

/// Rectangular pattern, column-major with the bottom row first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Pattern {
    pub width: usize,
    pub height: usize,
    pub cells: Vec<usize>,
}

impl Pattern {
    pub fn new(width: usize, height: usize, cells: Vec<usize>) -> Result<Self, SubshiftError> {
        if width == 0 || height == 0 || cells.len() != width * height {
            return Err(SubshiftError::BadShape);
        }
        Ok(Pattern {
            width,
            height,
            cells,
        })
    }

    pub fn get(&self, x: usize, y: usize) -> usize {
        self.cells[x * self.height + y]
    }

    pub fn column(&self, x: usize) -> &[usize] {
        &self.cells[x * self.height..(x + 1) * self.height]
    }

    pub fn row(&self, y: usize) -> Vec<usize> {
        (0..self.width).map(|x| self.get(x, y)).collect()
    }

    pub fn transpose(&self) -> Pattern {
        let cells = (0..self.height)
            .flat_map(|y| (0..self.width).map(move |x| (x, y)))
            .map(|(x, y)| self.get(x, y))
            .collect();
        Pattern {
            width: self.height,
            height: self.width,
            cells,
        }
    }

    /// `(bottom row, left column)`.
    pub fn traces(&self) -> (Vec<usize>, Vec<usize>) {
        (self.row(0), self.column(0).to_vec())
    }
}

/// A pattern placed with its lower-left cell at `anchor`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CylinderSpec {
    pub anchor: (i64, i64),
    pub pattern: Pattern,
}

impl CylinderSpec {
    pub fn at_origin(pattern: Pattern) -> Self {
        CylinderSpec {
            anchor: (0, 0),
            pattern,
        }
    }

    fn transpose(&self) -> Self {
        CylinderSpec {
            anchor: (self.anchor.1, self.anchor.0),
            pattern: self.pattern.transpose(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixSubshift {
    s: usize,
    a: IntMatrix,
    b: Option<IntMatrix>,
    a_succ: Vec<Vec<usize>>,
    b_succ: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CornerCounts {
    /// Admissible L-shapes per corner that have exactly one completion,
    /// out of the total; order: lower-left, lower-right, upper-left, upper-right
    /// (the corner named is the missing cell).
    pub unique: [usize; 4],
    pub total: [usize; 4],
}

impl CornerCounts {
    pub fn all_unique(&self) -> bool {
        self.unique == self.total
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularityReport {
    pub d_regular: Option<i64>,
    /// Equal supports of `AB`, `BA` and of `ABᵀ`, `BᵀA`.
    pub consistent: bool,
    /// `AB` and `ABᵀ` have entries in `{0, 1}`.
    pub products_binary: bool,
    /// Every admissible corner has exactly one completion.
    pub corners_unique: bool,
    pub uniquely_extendable: bool,
    /// `AB = BA` and `ABᵀ = BᵀA`; only evaluated when the other checks hold.
    pub commute_exactly: Option<bool>,
    pub corners: Option<CornerCounts>,
}

impl RegularityReport {
    /// The three characterisations of unique extendability agree.
    pub fn three_way_agreement(&self) -> bool {
        let ue = self.consistent && self.products_binary;
        ue == (self.consistent && self.corners_unique) && ue == self.uniquely_extendable
    }
}

fn successors(m: &IntMatrix) -> Vec<Vec<usize>> {
    (0..m.rows())
        .map(|r| (0..m.cols()).filter(|&c| m[(r, c)] != 0).collect())
        .collect()
}

fn check_transition(m: &IntMatrix, name: &'static str) -> Result<(), SubshiftError> {
    if !m.is_square() || m.entries().iter().any(|&x| x != 0 && x != 1) {
        return Err(SubshiftError::BadMatrix);
    }
    if m.row_sums().contains(&0) || m.col_sums().contains(&0) {
        return Err(SubshiftError::ZeroLine(name));
    }
    Ok(())
}

impl MatrixSubshift {
    pub fn new(a: IntMatrix, b: Option<IntMatrix>) -> Result<Self, SubshiftError> {
        check_transition(&a, "A")?;
        if let Some(b) = &b {
            check_transition(b, "B")?;
            if b.rows() != a.rows() {
                return Err(SubshiftError::BadMatrix);
            }
        }
        let a_succ = successors(&a);
        let b_succ = b.as_ref().map(successors).unwrap_or_default();
        Ok(MatrixSubshift {
            s: a.rows(),
            a,
            b,
            a_succ,
            b_succ,
        })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn a(&self) -> &IntMatrix {
        &self.a
    }

    pub fn b(&self) -> Option<&IntMatrix> {
        self.b.as_ref()
    }

    fn b_req(&self) -> Result<&IntMatrix, SubshiftError> {
        self.b.as_ref().ok_or(SubshiftError::NoVertical)
    }

    /// Swaps the roles of the axes: `(A, B) ↦ (B, A)`.
    pub fn transposed(&self) -> Result<MatrixSubshift, SubshiftError> {
        MatrixSubshift::new(self.b_req()?.clone(), Some(self.a.clone()))
    }

    /// Common row/column sum of `A` (and `B`), if any.
    pub fn degree(&self) -> Option<i64> {
        let d = self.a.regular_degree()?;
        match &self.b {
            Some(b) if b.regular_degree() != Some(d) => None,
            _ => Some(d),
        }
    }

    /// `{s, d, A, B}` with matrices as `[row, col]` pairs of their ones.
    pub fn to_json(&self) -> Value {
        let coo = |m: &IntMatrix| -> Value {
            m.coo().into_iter().map(|(r, c, _)| json!([r, c])).collect()
        };
        json!({
            "s": self.s,
            "d": self.degree(),
            "A": coo(&self.a),
            "B": self.b.as_ref().map(coo),
        })
    }

    fn corner_counts(&self, b: &IntMatrix) -> CornerCounts {
        let a = &self.a;
        let s = self.s;
        let mut unique = [0; 4];
        let mut total = [0; 4];
        let mut tally = |slot: usize, n: usize| {
            total[slot] += 1;
            unique[slot] += (n == 1) as usize;
        };
        // Cells: i lower-left, j lower-right, k upper-left, l upper-right.
        for i in 0..s {
            for &j in &self.a_succ[i] {
                for &k in &self.b_succ[i] {
                    // missing l: A(k,l) B(j,l)
                    tally(
                        3,
                        (0..s).filter(|&l| a[(k, l)] == 1 && b[(j, l)] == 1).count(),
                    );
                }
                for &l in &self.b_succ[j] {
                    // missing k: B(i,k) A(k,l)
                    tally(
                        2,
                        (0..s).filter(|&k| b[(i, k)] == 1 && a[(k, l)] == 1).count(),
                    );
                }
            }
        }
        for k in 0..s {
            for &l in &self.a_succ[k] {
                for i in 0..s {
                    if b[(i, k)] == 1 {
                        // missing j: A(i,j) B(j,l)
                        tally(
                            1,
                            (0..s).filter(|&j| a[(i, j)] == 1 && b[(j, l)] == 1).count(),
                        );
                    }
                }
                for j in 0..s {
                    if b[(j, l)] == 1 {
                        // missing i: B(i,k) A(i,j)
                        tally(
                            0,
                            (0..s).filter(|&i| b[(i, k)] == 1 && a[(i, j)] == 1).count(),
                        );
                    }
                }
            }
        }
        CornerCounts { unique, total }
    }

    pub fn regularity_report(&self) -> RegularityReport {
        let Some(b) = &self.b else {
            return RegularityReport {
                d_regular: self.a.regular_degree(),
                consistent: true,
                products_binary: true,
                corners_unique: true,
                uniquely_extendable: true,
                commute_exactly: None,
                corners: None,
            };
        };
        let a = &self.a;
        let bt = b.transpose();
        let (ab, ba, abt, bta) = (a.mul(b), b.mul(a), a.mul(&bt), bt.mul(a));
        let consistent = ab.same_support(&ba) && abt.same_support(&bta);
        let binary = |m: &IntMatrix| m.entries().iter().all(|&x| x == 0 || x == 1);
        let products_binary = binary(&ab) && binary(&abt);
        let corners = self.corner_counts(b);
        let corners_unique = corners.all_unique();
        let uniquely_extendable = consistent && corners_unique;
        let commute_exactly = (consistent && products_binary).then(|| ab == ba && abt == bta);
        RegularityReport {
            d_regular: self.degree(),
            consistent,
            products_binary,
            corners_unique,
            uniquely_extendable,
            commute_exactly,
            corners: Some(corners),
        }
    }

    pub fn is_uniquely_extendable(&self) -> bool {
        self.regularity_report().uniquely_extendable
    }

    fn check_symbols(&self, w: &[usize]) -> Result<(), SubshiftError> {
        match w.iter().find(|&&x| x >= self.s) {
            Some(&x) => Err(SubshiftError::BadSymbol(x)),
            None => Ok(()),
        }
    }

    fn word_ok(m: &IntMatrix, w: &[usize]) -> bool {
        w.windows(2).all(|p| m[(p[0], p[1])] == 1)
    }

    pub fn is_admissible(&self, p: &Pattern) -> Result<bool, SubshiftError> {
        self.check_symbols(&p.cells)?;
        if p.height > 1
            && !(0..p.width).all(|x| {
                self.b
                    .as_ref()
                    .is_some_and(|b| Self::word_ok(b, p.column(x)))
            })
        {
            return Ok(false);
        }
        Ok((0..p.height).all(|y| Self::word_ok(&self.a, &p.row(y))))
    }

    /// Calls `f` on the cells of every admissible `(m, n)` pattern, in
    /// lexicographic order of the column-major cell vector.
    pub fn for_each_pattern(
        &self,
        m: usize,
        n: usize,
        mut f: impl FnMut(&[usize]),
    ) -> Result<(), SubshiftError> {
        if m == 0 || n == 0 {
            return Err(SubshiftError::BadShape);
        }
        if m * n > ENUMERATION_CAP {
            return Err(SubshiftError::SizeCap {
                cells: m * n,
                cap: ENUMERATION_CAP,
            });
        }
        if n > 1 {
            self.b_req()?;
        }
        let mut cells = vec![0usize; m * n];
        self.fill_from(0, m, n, &mut cells, &mut f);
        Ok(())
    }

    fn fill_from(
        &self,
        pos: usize,
        m: usize,
        n: usize,
        cells: &mut [usize],
        f: &mut impl FnMut(&[usize]),
    ) {
        if pos == m * n {
            f(cells);
            return;
        }
        let (x, y) = (pos / n, pos % n);
        let left = (x > 0).then(|| cells[pos - n]);
        let below = (y > 0).then(|| cells[pos - 1]);
        let candidates: &[usize] = match (left, below) {
            (Some(l), _) => &self.a_succ[l],
            (None, Some(b)) => &self.b_succ[b],
            (None, None) => &[],
        };
        let ok_below =
            |t: usize| below.is_none_or(|b| self.b.as_ref().is_some_and(|bm| bm[(b, t)] == 1));
        if left.is_none() && below.is_none() {
            for t in 0..self.s {
                cells[pos] = t;
                self.fill_from(pos + 1, m, n, cells, f);
            }
        } else {
            for &t in candidates {
                if ok_below(t) {
                    cells[pos] = t;
                    self.fill_from(pos + 1, m, n, cells, f);
                }
            }
        }
    }

    /// Number of admissible `(m, n)` patterns, by exhaustive enumeration.
    pub fn pattern_count(&self, m: usize, n: usize) -> Result<u64, SubshiftError> {
        let mut count = 0u64;
        self.for_each_pattern(m, n, |_| count += 1)?;
        Ok(count)
    }

    pub fn patterns(&self, m: usize, n: usize) -> Result<Vec<Pattern>, SubshiftError> {
        let mut out = Vec::new();
        self.for_each_pattern(m, n, |c| {
            out.push(Pattern {
                width: m,
                height: n,
                cells: c.to_vec(),
            })
        })?;
        Ok(out)
    }

    /// The unique admissible rectangle with bottom row `h_trace` and left
    /// column `v_trace`, completed cell by cell from the lower-left corner.
    pub fn fill_rectangle(
        &self,
        h_trace: &[usize],
        v_trace: &[usize],
    ) -> Result<Pattern, SubshiftError> {
        let b = self.b_req()?;
        self.check_symbols(h_trace)?;
        self.check_symbols(v_trace)?;
        if h_trace.is_empty() || v_trace.is_empty() {
            return Err(SubshiftError::BadShape);
        }
        if h_trace[0] != v_trace[0] {
            return Err(SubshiftError::TraceOrigin);
        }
        if !Self::word_ok(&self.a, h_trace) || !Self::word_ok(b, v_trace) {
            return Err(SubshiftError::Inadmissible);
        }
        let (m, n) = (h_trace.len(), v_trace.len());
        let mut cells = vec![0; m * n];
        cells[..n].copy_from_slice(v_trace);
        for x in 1..m {
            cells[x * n] = h_trace[x];
            for y in 1..n {
                let (k, j) = (cells[(x - 1) * n + y], cells[x * n + y - 1]);
                let mut fits = self.a_succ[k].iter().copied().filter(|&l| b[(j, l)] == 1);
                match (fits.next(), fits.next()) {
                    (Some(l), None) => cells[x * n + y] = l,
                    (None, _) => {
                        return Err(SubshiftError::Inconsistent(format!(
                            "no completion at ({x},{y})"
                        )))
                    }
                    (Some(_), Some(_)) => {
                        return Err(SubshiftError::Inconsistent(format!(
                            "several completions at ({x},{y})"
                        )))
                    }
                }
            }
        }
        Ok(Pattern {
            width: m,
            height: n,
            cells,
        })
    }

    /// `1/(s·d^{m−1}·d^{n−1})` for an admissible pattern; zero with a warning
    /// otherwise.
    pub fn cylinder_measure(&self, c: &CylinderSpec) -> Result<CylinderMeasure, SubshiftError> {
        let d = self.degree().ok_or(SubshiftError::Irregular)?;
        let p = &c.pattern;
        if !self.is_admissible(p)? {
            return Ok(CylinderMeasure {
                value: BigRational::zero(),
                warning: Some("pattern is not admissible; its cylinder is empty".into()),
            });
        }
        let d = BigInt::from(d);
        let den = BigInt::from(self.s) * d.pow((p.width - 1) as u32) * d.pow((p.height - 1) as u32);
        Ok(CylinderMeasure {
            value: BigRational::new(BigInt::one(), den),
            warning: None,
        })
    }

    /// Directed graph whose vertices are the admissible columns of height `k`
    /// (horizontal) or rows of length `k` (vertical), with an edge for every
    /// admissible one-step extension.
    pub fn transition_graph(
        &self,
        dir: Direction,
        k: usize,
    ) -> Result<TransitionGraph, SubshiftError> {
        if dir == Direction::Vertical {
            let mut g = self
                .transposed()?
                .transition_graph(Direction::Horizontal, k)?;
            g.direction = Direction::Vertical;
            return Ok(g);
        }
        if k == 0 {
            return Err(SubshiftError::BadShape);
        }
        if k >= 2 && !self.is_uniquely_extendable() {
            return Err(SubshiftError::NotUniquelyExtendable);
        }
        let mut vertices: Vec<Vec<usize>> = (0..self.s).map(|t| vec![t]).collect();
        for _ in 1..k {
            vertices = vertices
                .into_iter()
                .flat_map(|w| {
                    let last = *w.last().expect("nonempty");
                    self.b_succ[last].iter().map(move |&t| {
                        let mut w2 = w.clone();
                        w2.push(t);
                        w2
                    })
                })
                .collect();
        }
        vertices.sort();
        let index: HashMap<&[usize], usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, w)| (w.as_slice(), i))
            .collect();
        let mut succ = Vec::with_capacity(vertices.len());
        for w in &vertices {
            // Extensions are determined by their bottom symbol in a uniquely
            // extendable subshift, but we enumerate the full product and
            // keep the admissible ones.
            let mut next: Vec<usize> = Vec::new();
            let mut partial: Vec<Vec<usize>> = vec![vec![]];
            for (i, &t) in w.iter().enumerate() {
                partial = partial
                    .into_iter()
                    .flat_map(|p| {
                        let prev = p.last().copied();
                        self.a_succ[t]
                            .iter()
                            .copied()
                            .filter(move |&u| {
                                prev.is_none_or(|pv| i == 0 || self.b_succ[pv].contains(&u))
                            })
                            .map(move |u| {
                                let mut p2 = p.clone();
                                p2.push(u);
                                p2
                            })
                            .collect::<Vec<_>>()
                    })
                    .collect();
            }
            for p in partial {
                next.push(index[p.as_slice()]);
            }
            next.sort_unstable();
            succ.push(next);
        }
        Ok(TransitionGraph {
            direction: dir,
            k,
            vertices,
            succ,
        })
    }

    /// Exact `|μ(C ∩ σ^{-n}D) − μ(C)μ(D)|` for a shift by `n` along `dir`.
    ///
    /// Both cylinders must span the same `k` lines across the shift axis.
    /// With the gap `g` between the last line of `C` and the first line of
    /// the shifted `D`, `μ(C ∩ σ^{-n}D) = μ(C)μ(D)·s·d^{k−1}·T_k^{g+1}(v,u)/d^{g+1}`,
    /// where `T_k` is the transition matrix of height-`k` columns and
    /// `v`, `u` are the facing boundary columns.
    pub fn correlation(
        &self,
        c: &CylinderSpec,
        dc: &CylinderSpec,
        n: i64,
        dir: Direction,
    ) -> Result<Correlation, SubshiftError> {
        if dir == Direction::Vertical {
            return self.transposed()?.correlation(
                &c.transpose(),
                &dc.transpose(),
                n,
                Direction::Horizontal,
            );
        }
        let (pc, pd) = (&c.pattern, &dc.pattern);
        if c.anchor.1 != dc.anchor.1 || pc.height != pd.height {
            return Err(SubshiftError::HeightMismatch);
        }
        let gap = dc.anchor.0 + n - (c.anchor.0 + pc.width as i64);
        if gap < 0 {
            return Err(SubshiftError::Overlap(gap));
        }
        let mu_c = self.cylinder_measure(c)?;
        let mu_d = self.cylinder_measure(dc)?;
        if mu_c.warning.is_some() || mu_d.warning.is_some() {
            return Err(SubshiftError::Inadmissible);
        }
        let k = pc.height;
        let d = self.degree().ok_or(SubshiftError::Irregular)?;
        let tg = self.transition_graph(Direction::Horizontal, k)?;
        let v = tg
            .index_of(pc.column(pc.width - 1))
            .ok_or(SubshiftError::Inadmissible)?;
        let u = tg
            .index_of(pd.column(0))
            .ok_or(SubshiftError::Inadmissible)?;
        let steps = (gap + 1) as usize;
        let walks = tg.walk_count(v, u, steps);
        let product = &mu_c.value * &mu_d.value;
        let d_big = BigInt::from(d);
        let m = BigInt::from(tg.len());
        let factor = BigRational::new(m * walks, d_big.pow(steps as u32));
        let joint = &product * factor;
        let deviation = if joint >= product {
            &joint - &product
        } else {
            &product - &joint
        };
        Ok(Correlation {
            joint,
            product,
            deviation,
            gap: gap as usize,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CylinderMeasure {
    pub value: BigRational,
    pub warning: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Correlation {
    pub joint: BigRational,
    pub product: BigRational,
    pub deviation: BigRational,
    pub gap: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionGraph {
    pub direction: Direction,
    pub k: usize,
    /// Columns bottom-to-top (horizontal) or rows left-to-right (vertical),
    /// sorted lexicographically.
    pub vertices: Vec<Vec<usize>>,
    pub succ: Vec<Vec<usize>>,
}

impl TransitionGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, w: &[usize]) -> Option<usize> {
        self.vertices.binary_search_by(|v| v.as_slice().cmp(w)).ok()
    }

    pub fn matrix(&self) -> IntMatrix {
        let n = self.len();
        let mut m = IntMatrix::zeros(n, n);
        for (i, s) in self.succ.iter().enumerate() {
            for &j in s {
                m[(i, j)] += 1;
            }
        }
        m
    }

    /// Number of walks of length `steps` from `v` to `u`.
    pub fn walk_count(&self, v: usize, u: usize, steps: usize) -> BigInt {
        let mut row = vec![BigInt::zero(); self.len()];
        row[v] = BigInt::one();
        for _ in 0..steps {
            let mut next = vec![BigInt::zero(); self.len()];
            for (i, x) in row.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for &j in &self.succ[i] {
                    next[j] += x;
                }
            }
            row = next;
        }
        std::mem::take(&mut row[u])
    }
}

/// The matrix subshift of a Wang tileset given by a datum: `A(t,t') = 1` iff
/// the right colour of `t` is the left colour of `t'`, and `B(t,t') = 1` iff
/// the top colour of `t` is the bottom colour of `t'`.
pub fn build_wang(d: &VHDatum) -> Result<MatrixSubshift, SubshiftError> {
    build_tiles(d, false)
}

/// `X_D`: the Wang shift with consecutive mutually inverse colours forbidden.
pub fn build_xd(d: &VHDatum) -> Result<MatrixSubshift, SubshiftError> {
    build_tiles(d, true)
}

fn build_tiles(d: &VHDatum, no_backtrack: bool) -> Result<MatrixSubshift, SubshiftError> {
    let report = validate_datum(d);
    if !report.is_valid() {
        return Err(DatumError::Invalid(report).into());
    }
    let r = &d.relations;
    let s = r.len();
    let mut a = IntMatrix::zeros(s, s);
    let mut b = IntMatrix::zeros(s, s);
    for (i, t) in r.iter().enumerate() {
        for (j, u) in r.iter().enumerate() {
            if t[3] == u[0] && !(no_backtrack && u[2] == d.inv_h[t[2]]) {
                a[(i, j)] = 1;
            }
            if t[1] == u[2] && !(no_backtrack && u[0] == d.inv_v[t[0]]) {
                b[(i, j)] = 1;
            }
        }
    }
    MatrixSubshift::new(a, Some(b))
}

/// A 2-regular pair whose products are not positively commuting.
pub fn non_extendable_example() -> MatrixSubshift {
    let a = IntMatrix::from_rows(&[
        vec![1, 1, 0, 0],
        vec![0, 0, 1, 1],
        vec![0, 0, 1, 1],
        vec![1, 1, 0, 0],
    ]);
    let b = IntMatrix::from_rows(&[
        vec![0, 1, 0, 1],
        vec![0, 1, 0, 1],
        vec![1, 0, 1, 0],
        vec![1, 0, 1, 0],
    ]);
    MatrixSubshift::new(a, Some(b)).expect("static example is well-formed")
}

/// Transition graph of `X_D` matched against the non-backtracking dart
/// graph of a level graph.
///
/// Horizontal: a column `t_1 … t_k` (bottom to top) is the dart of `B_k` at
/// the word `a(t_k) … a(t_1)` labelled `b(t_k)`. Vertical: a row `t_1 … t_k`
/// is the dart of `A_k` at the word `c(t_1) … c(t_k)` labelled `a(t_1)^{-1}`.
#[derive(Clone, Debug)]
pub struct NbCorrespondence {
    pub transition: TransitionGraph,
    pub level: UGraph,
    /// `dart[i]` is the dart index assigned to transition vertex `i`.
    pub dart: Vec<usize>,
    pub bijective: bool,
    pub edges_match: bool,
}

impl NbCorrespondence {
    pub fn holds(&self) -> bool {
        self.bijective && self.edges_match
    }
}

pub fn xd_nb_correspondence(
    d: &VHDatum,
    dir: Direction,
    k: usize,
) -> Result<NbCorrespondence, SubshiftError> {
    let xd = build_xd(d)?;
    let transition = xd.transition_graph(dir, k)?;
    let base = Mealy::from_datum(d).map_err(GraphError::from)?;
    let (m, side) = match dir {
        Direction::Horizontal => (base.dual(), LevelSide::B),
        Direction::Vertical => (base, LevelSide::A),
    };
    let lg = m.action_graph(k, true).map_err(GraphError::from)?;
    let level = crate::graphs::level_graph(d, side, k)?;
    let by_key: HashMap<(usize, usize), usize> = level
        .darts
        .iter()
        .enumerate()
        .map(|(i, e)| ((e.origin, e.label), i))
        .collect();
    let r = &d.relations;
    let mut dart = Vec::with_capacity(transition.len());
    for w in &transition.vertices {
        let (word, label): (Vec<usize>, usize) = match dir {
            Direction::Horizontal => (w.iter().rev().map(|&t| r[t][0]).collect(), r[w[k - 1]][1]),
            Direction::Vertical => (w.iter().map(|&t| r[t][2]).collect(), d.inv_v[r[w[0]][0]]),
        };
        let v = lg
            .index_of(&word)
            .ok_or_else(|| SubshiftError::Inconsistent(format!("word {word:?} is not a vertex")))?;
        dart.push(by_key[&(v, label)]);
    }
    let mut seen = vec![false; level.darts.len()];
    let bijective = dart.len() == level.darts.len()
        && dart.iter().all(|&e| !std::mem::replace(&mut seen[e], true));
    let nb = nb_matrix(&level)?;
    let edges_match = bijective
        && transition.succ.iter().enumerate().all(|(i, s)| {
            let mut mapped: Vec<usize> = s.iter().map(|&j| dart[j]).collect();
            mapped.sort_unstable();
            mapped == nb.succ[dart[i]]
        });
    Ok(NbCorrespondence {
        transition,
        level,
        dart,
        bijective,
        edges_match,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixingRow {
    pub n: usize,
    pub deviation: BigRational,
    pub deviation_float: f64,
    pub envelope: f64,
    pub ok: bool,
}

/// Exact deviation norms `‖T_k^n/d^n − J/m‖∞` of the height-`k` transition
/// matrix against the envelope `C·n·θ^n`, `θ = 1/√d`, with `C` fitted at
/// `n = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationTable {
    pub d: i64,
    pub k: usize,
    pub direction: Direction,
    pub n_vertices: usize,
    pub theta: f64,
    pub c: f64,
    /// Spectral radius of `T_k` on the complement of the constants.
    pub second_modulus: Option<f64>,
    /// Whether the envelope also holds without the factor `n`.
    pub holds_without_n: bool,
    pub rows: Vec<MixingRow>,
}

/// Relative slack allowed when comparing against the envelope.
const ENVELOPE_SLACK: f64 = 1e-9;

impl CorrelationTable {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.ok)
    }

    pub fn best_r(&self) -> u32 {
        if self.holds_without_n {
            0
        } else {
            1
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s =
            String::from("n,deviation_num,deviation_den,deviation_float,envelope_float,ok\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{:.17e},{:.17e},{}",
                r.n,
                r.deviation.numer(),
                r.deviation.denom(),
                r.deviation_float,
                r.envelope,
                r.ok
            );
        }
        s
    }

    pub fn metadata_json(&self) -> Value {
        json!({
            "d": self.d,
            "k": self.k,
            "graph": match self.direction { Direction::Horizontal => "H_k", Direction::Vertical => "V_k" },
            "n_vertices": self.n_vertices,
            "theta": self.theta,
            "sqrt_d": (self.d as f64).sqrt(),
            "C": self.c,
            "second_modulus": self.second_modulus,
            "best_r": self.best_r(),
            "all_ok": self.all_ok(),
        })
    }
}

pub fn mixing_table_for(
    s: &MatrixSubshift,
    dir: Direction,
    k: usize,
    n_max: usize,
    limit: usize,
) -> Result<CorrelationTable, SubshiftError> {
    if n_max == 0 {
        return Err(SubshiftError::BadShape);
    }
    let d = s.degree().ok_or(SubshiftError::Irregular)?;
    let tg = s.transition_graph(dir, k)?;
    let t = tg.matrix();
    let series = deviation_series(&t, n_max, limit)?;
    let theta = 1.0 / (d as f64).sqrt();
    let first = rational_to_f64(&series[1]);
    let c = first / theta;
    let c0 = first / theta;
    let mut holds_without_n = true;
    let rows = series
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(n, dev)| {
            let f = rational_to_f64(&dev);
            let tn = theta.powi(n as i32);
            let envelope = c * n as f64 * tn;
            holds_without_n &= f <= c0 * tn * (1.0 + ENVELOPE_SLACK);
            MixingRow {
                n,
                ok: f <= envelope * (1.0 + ENVELOPE_SLACK),
                deviation: dev,
                deviation_float: f,
                envelope,
            }
        })
        .collect();
    let second_modulus = second_modulus_directed(&t, crate::spectral::DEFAULT_DENSE_LIMIT).ok();
    Ok(CorrelationTable {
        d,
        k,
        direction: dir,
        n_vertices: tg.len(),
        theta,
        c,
        second_modulus,
        holds_without_n,
        rows,
    })
}

pub fn mixing_table(
    d: &VHDatum,
    k: usize,
    n_max: usize,
    limit: usize,
) -> Result<CorrelationTable, SubshiftError> {
    mixing_table_for(&build_xd(d)?, Direction::Horizontal, k, n_max, limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::FieldSpec;
    use crate::vhdatum::build_quaternionic_datum;

    fn xd3() -> (VHDatum, MatrixSubshift) {
        let f = FieldSpec::new(3, 1).unwrap();
        let d = build_quaternionic_datum(&f, f.from_int(1), f.from_int(2)).unwrap();
        let x = build_xd(&d).unwrap();
        (d, x)
    }

    #[test]
    fn xd_is_three_regular_and_uniquely_extendable() {
        let (_, x) = xd3();
        assert_eq!(x.s(), 16);
        let r = x.regularity_report();
        assert_eq!(r.d_regular, Some(3));
        assert!(r.consistent && r.products_binary && r.uniquely_extendable);
        assert_eq!(r.commute_exactly, Some(true));
        assert!(r.three_way_agreement());
    }

    #[test]
    fn four_by_four_example() {
        let x = non_extendable_example();
        let (a, b) = (x.a(), x.b().unwrap());
        let ab = a.mul(b);
        assert!(ab.entries().iter().all(|&e| e == 0 || e == 2));
        assert_eq!(b.mul(a), IntMatrix::ones(4));
        assert_eq!(a.mul(&b.transpose()), IntMatrix::ones(4));
        let r = x.regularity_report();
        assert_eq!(r.d_regular, Some(2));
        assert!(!r.consistent && !r.uniquely_extendable && !r.products_binary);
        assert!(r.three_way_agreement());
        // Regular as a subshift even though it is not extendable.
        for (m, n) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            assert_eq!(
                x.pattern_count(m, n).unwrap(),
                4 * 2u64.pow(m as u32 - 1) * 2u64.pow(n as u32 - 1)
            );
        }
    }

    #[test]
    fn free_product_tilings() {
        let d = VHDatum::free_product_example();
        let w = build_wang(&d).unwrap().regularity_report();
        assert_eq!(w.d_regular, Some(4));
        assert!(w.uniquely_extendable);
        let x0 = build_xd(&d).unwrap().regularity_report();
        assert_eq!(x0.d_regular, Some(3));
        assert!(x0.uniquely_extendable);
    }

    #[test]
    fn permutation_pair_is_consistent() {
        let p = IntMatrix::from_rows(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]);
        let x = MatrixSubshift::new(p.clone(), Some(p)).unwrap();
        let r = x.regularity_report();
        assert_eq!(r.d_regular, Some(1));
        assert!(r.consistent && r.uniquely_extendable);
    }

    #[test]
    fn rejects_zero_lines() {
        let a = IntMatrix::from_rows(&[vec![1, 1], vec![0, 0]]);
        assert!(matches!(
            MatrixSubshift::new(a, None),
            Err(SubshiftError::ZeroLine("A"))
        ));
    }

    #[test]
    fn counts_and_measures() {
        let (_, x) = xd3();
        assert_eq!(x.pattern_count(1, 1).unwrap(), 16);
        assert_eq!(x.pattern_count(2, 2).unwrap(), 144);
        assert!(matches!(
            x.pattern_count(4, 4),
            Err(SubshiftError::SizeCap { .. })
        ));
        let total: BigRational = x
            .patterns(2, 3)
            .unwrap()
            .iter()
            .map(|p| {
                x.cylinder_measure(&CylinderSpec::at_origin(p.clone()))
                    .unwrap()
                    .value
            })
            .sum();
        assert!(total.is_one());
        let p = x.patterns(2, 3).unwrap().remove(0);
        let mu = x
            .cylinder_measure(&CylinderSpec::at_origin(p))
            .unwrap()
            .value;
        assert_eq!(mu, BigRational::new(1.into(), (16 * 3 * 9).into()));
        let bad = Pattern::new(2, 1, vec![0, 0]).unwrap();
        if !x.is_admissible(&bad).unwrap() {
            let m = x.cylinder_measure(&CylinderSpec::at_origin(bad)).unwrap();
            assert!(m.value.is_zero() && m.warning.is_some());
        }
    }

    #[test]
    fn fill_rectangle_recovers_patterns() {
        let (_, x) = xd3();
        for p in x.patterns(3, 3).unwrap() {
            let (h, v) = p.traces();
            assert_eq!(x.fill_rectangle(&h, &v).unwrap(), p);
        }
        assert_eq!(x.fill_rectangle(&[5], &[5]).unwrap().cells, vec![5]);
    }

    #[test]
    fn transition_graphs_match_nb_darts() {
        let (d, x) = xd3();
        let h1 = x.transition_graph(Direction::Horizontal, 1).unwrap();
        assert_eq!(h1.len(), 16);
        assert_eq!(h1.matrix().regular_degree(), Some(3));
        for dir in [Direction::Horizontal, Direction::Vertical] {
            for k in 1..=3 {
                let c = xd_nb_correspondence(&d, dir, k).unwrap();
                assert!(c.holds(), "{dir:?} k={k}");
                assert_eq!(c.transition.len(), 16 * 3usize.pow(k as u32 - 1));
            }
        }
        assert!(matches!(
            non_extendable_example().transition_graph(Direction::Horizontal, 2),
            Err(SubshiftError::NotUniquelyExtendable)
        ));
    }

    /// Brute-force `μ(C ∩ σ^{-n}D)` by summing over all patterns of the
    /// enclosing rectangle.
    fn joint_by_enumeration(x: &MatrixSubshift, c: &Pattern, d: &Pattern, n: usize) -> BigRational {
        let w = n + d.width;
        let mut total = BigRational::zero();
        for p in x.patterns(w, c.height).unwrap() {
            let hit_c = (0..c.width).all(|i| p.column(i) == c.column(i));
            let hit_d = (0..d.width).all(|i| p.column(n + i) == d.column(i));
            if hit_c && hit_d {
                total += x
                    .cylinder_measure(&CylinderSpec::at_origin(p))
                    .unwrap()
                    .value;
            }
        }
        total
    }

    #[test]
    fn correlation_matches_enumeration() {
        let (_, x) = xd3();
        let singles = x.patterns(1, 1).unwrap();
        let pairs = x.patterns(2, 1).unwrap();
        for (ci, di, n) in [(0, 5, 1), (3, 3, 2), (7, 12, 3), (1, 0, 4)] {
            let (c, d) = (&singles[ci], &singles[di]);
            let corr = x
                .correlation(
                    &CylinderSpec::at_origin(c.clone()),
                    &CylinderSpec::at_origin(d.clone()),
                    n as i64,
                    Direction::Horizontal,
                )
                .unwrap();
            assert_eq!(
                corr.joint,
                joint_by_enumeration(&x, c, d, n),
                "{ci} {di} {n}"
            );
        }
        let (c, d) = (&pairs[4], &pairs[20]);
        for n in 2..=5 {
            let corr = x
                .correlation(
                    &CylinderSpec::at_origin(c.clone()),
                    &CylinderSpec::at_origin(d.clone()),
                    n as i64,
                    Direction::Horizontal,
                )
                .unwrap();
            assert_eq!(corr.joint, joint_by_enumeration(&x, c, d, n));
        }
        let cols = x.patterns(1, 2).unwrap();
        let corr = x
            .correlation(
                &CylinderSpec::at_origin(cols[0].clone()),
                &CylinderSpec::at_origin(cols[9].clone()),
                3,
                Direction::Horizontal,
            )
            .unwrap();
        assert_eq!(corr.joint, joint_by_enumeration(&x, &cols[0], &cols[9], 3));
        assert!(matches!(
            x.correlation(
                &CylinderSpec::at_origin(pairs[0].clone()),
                &CylinderSpec::at_origin(pairs[1].clone()),
                1,
                Direction::Horizontal
            ),
            Err(SubshiftError::Overlap(-1))
        ));
    }

    #[test]
    fn vertical_correlation_is_transposed_horizontal() {
        let (_, x) = xd3();
        let cols = x.patterns(1, 1).unwrap();
        let (c, d) = (
            CylinderSpec::at_origin(cols[2].clone()),
            CylinderSpec::at_origin(cols[11].clone()),
        );
        let v = x.correlation(&c, &d, 3, Direction::Vertical).unwrap();
        let h = x
            .transposed()
            .unwrap()
            .correlation(&c, &d, 3, Direction::Horizontal)
            .unwrap();
        assert_eq!(v, h);
    }

    #[test]
    fn complete_graph_has_no_correlation() {
        let x = MatrixSubshift::new(IntMatrix::ones(3), Some(IntMatrix::ones(3))).unwrap();
        let one = |t| CylinderSpec::at_origin(Pattern::new(1, 1, vec![t]).unwrap());
        for n in 1..6 {
            assert!(x
                .correlation(&one(0), &one(2), n, Direction::Horizontal)
                .unwrap()
                .deviation
                .is_zero());
        }
    }

    #[test]
    fn mixing_table_q3_k1() {
        let (d, _) = xd3();
        let t = mixing_table(&d, 1, 12, 500).unwrap();
        assert_eq!(t.d, 3);
        assert_eq!(t.rows.len(), 12);
        assert!((t.second_modulus.unwrap() - 3f64.sqrt()).abs() < 1e-6);
        assert!(t
            .to_csv()
            .starts_with("n,deviation_num,deviation_den,deviation_float,envelope_float,ok\n"));
    }
}
