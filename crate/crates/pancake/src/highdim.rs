//! Brute-force enumeration solvers for the d-dimensional generalizations:
//! `solve_a` finds d mutually orthogonal hyperplanes such that every pair
//! quarters one set; `solve_b` finds two orthogonal hyperplanes quartering m
//! sets in dimension `delta(m)`.
//!
//! Candidate hyperplanes are anchored on point tuples: the first hyperplane
//! comes from d points, the next from d-1 points plus one orthogonality
//! constraint, and so on. For each tuple two offsets are tried: the median
//! translate of the anchored normal (which bisects the anchor set by
//! construction and can reach positions that pass through no sample point,
//! e.g. the coordinate planes of a symmetric cube) and the anchored
//! hyperplane itself. Enumeration order is lexicographic over tuples, median
//! translate first, so results are deterministic. Exhausting the tuple space
//! yields an explicit NOT_FOUND; it is reported, never masked.
//!
//! The search is polynomial but steep (`O(n^{d(d+1)/2})` for `solve_a`), so
//! desk-scale caps guard both entry points; a `force` flag overrides them.

use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed};

use crate::geometry::{tally_sides, QuadrantCounts, Side};
use crate::selection::median;
use crate::{Error, Result};

/// Rank tolerance for the elimination in [`hyperplane_through`], relative to
/// the largest entry of the constraint matrix.
const RANK_EPS: f64 = 1e-10;

/// A finite point set in `R^d`.
#[derive(Debug, Clone)]
pub struct PointSetND {
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl PointSetND {
    pub fn new(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
        }
        Ok(Self { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }
}

/// The hyperplane `{x : normal · x = offset}` with a unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Hyperplane {
    pub fn value(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }

    pub fn unit_norm_residual(&self) -> f64 {
        (dot(&self.normal, &self.normal).sqrt() - 1.0).abs()
    }
}

/// Mutually orthogonal hyperplanes (d of them for `solve_a`, two for
/// `solve_b`).
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoFrame {
    pub hyperplanes: Vec<Hyperplane>,
}

impl OrthoFrame {
    /// Largest pairwise |normal_i · normal_j| over distinct hyperplanes.
    pub fn orthogonality_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.hyperplanes.len() {
            for j in (i + 1)..self.hyperplanes.len() {
                worst = worst
                    .max(dot(&self.hyperplanes[i].normal, &self.hyperplanes[j].normal).abs());
            }
        }
        worst
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The dimension in which two orthogonal hyperplanes quartering `m` sets are
/// guaranteed: `m + 2^⌊log2 m⌋`.
pub fn delta(m: u64) -> Result<u64> {
    if m < 1 {
        return Err(Error::InvalidConfig("delta requires m >= 1".into()));
    }
    Ok(m + (1u64 << m.ilog2()))
}

/// The unique (up to sign) hyperplane containing all `points` whose normal is
/// orthogonal to every vector in `orthogonal_to`. Requires
/// `points.len() + orthogonal_to.len() == d` and a full-rank constraint
/// system; rank deficiency reports a degenerate candidate so enumerators can
/// skip the tuple.
pub fn hyperplane_through(points: &[&[f64]], orthogonal_to: &[&[f64]]) -> Result<Hyperplane> {
    let k = points.len();
    if k == 0 {
        return Err(Error::Degenerate("need at least one anchor point".into()));
    }
    let d = points[0].len();
    if k + orthogonal_to.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: k + orthogonal_to.len(),
        });
    }
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    for p in &points[1..] {
        rows.push(p.iter().zip(points[0]).map(|(a, b)| a - b).collect());
    }
    for v in orthogonal_to {
        rows.push(v.to_vec());
    }
    let normal = null_vector(rows, d)?;
    let offset = dot(&normal, points[0]);
    Ok(Hyperplane { normal, offset })
}

/// One-dimensional null space of a `(d-1) x d` system by elimination with
/// partial pivoting.
fn null_vector(mut rows: Vec<Vec<f64>>, d: usize) -> Result<Vec<f64>> {
    let scale = rows
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1.0);
    let eps = RANK_EPS * scale;
    let m = rows.len();
    let mut pivot_col_of_row = Vec::with_capacity(m);
    let mut r = 0usize;
    for c in 0..d {
        let mut best = r;
        for i in (r + 1)..m {
            if rows[i][c].abs() > rows[best][c].abs() {
                best = i;
            }
        }
        if r >= m || rows[best][c].abs() <= eps {
            continue;
        }
        rows.swap(r, best);
        let pivot = rows[r][c];
        for i in (r + 1)..m {
            let factor = rows[i][c] / pivot;
            if factor != 0.0 {
                for cc in c..d {
                    let above = rows[r][cc];
                    rows[i][cc] -= factor * above;
                }
            }
        }
        pivot_col_of_row.push(c);
        r += 1;
        if r == m {
            break;
        }
    }
    if pivot_col_of_row.len() != d - 1 {
        return Err(Error::Degenerate(format!(
            "constraint system has rank {} (need {})",
            pivot_col_of_row.len(),
            d - 1
        )));
    }
    let free_col = (0..d)
        .find(|c| !pivot_col_of_row.contains(c))
        .expect("exactly one free column");
    let mut x = vec![0.0; d];
    x[free_col] = 1.0;
    for (row_idx, &pc) in pivot_col_of_row.iter().enumerate().rev() {
        let mut sum = 0.0;
        for c in (pc + 1)..d {
            sum += rows[row_idx][c] * x[c];
        }
        x[pc] = -sum / rows[row_idx][pc];
    }
    // Unit normal with a canonical sign: first significantly nonzero
    // component positive.
    let norm = dot(&x, &x).sqrt();
    for v in &mut x {
        *v /= norm;
    }
    if let Some(first) = x.iter().find(|v| v.abs() > 1e-12) {
        if *first < 0.0 {
            for v in &mut x {
                *v = -*v;
            }
        }
    }
    for v in &mut x {
        if *v == 0.0 {
            *v = 0.0; // drop negative zeros
        }
    }
    Ok(x)
}

fn sign_side(value: f64, scale: f64, tol: f64) -> Side {
    if value.abs() <= tol * scale {
        Side::On
    } else if value > 0.0 {
        Side::Plus
    } else {
        Side::Minus
    }
}

fn side_against(h: &Hyperplane, x: &[f64], tol: f64) -> Side {
    let raw = dot(&h.normal, x);
    let scale = 1.0f64.max(raw.abs()).max(h.offset.abs());
    sign_side(raw - h.offset, scale, tol)
}

/// Classifies every point of `x` by its sign pair against two orthogonal
/// hyperplanes; points within `tol` of a hyperplane are counted separately.
/// Region labels: `q1 = (+,+)`, `q2 = (-,+)`, `q3 = (-,-)`, `q4 = (+,-)`.
pub fn quadrant_counts_pair(
    x: &PointSetND,
    h1: &Hyperplane,
    h2: &Hyperplane,
    tol: f64,
) -> QuadrantCounts {
    tally_sides(x.points().iter().map(|p| {
        let s1 = side_against(h1, p, tol);
        let s2 = side_against(h2, p, tol);
        // Map the sign pair onto the 2-D counterclockwise labels.
        let (a, b) = match (s1, s2) {
            (Side::Plus, Side::Plus) => (Side::Plus, Side::Plus),
            (Side::Minus, Side::Plus) => (Side::Plus, Side::Minus),
            (Side::Minus, Side::Minus) => (Side::Minus, Side::Minus),
            (Side::Plus, Side::Minus) => (Side::Minus, Side::Plus),
            other => other,
        };
        (a, b)
    }))
}

fn bisects(h: &Hyperplane, x: &PointSetND, tol: f64) -> bool {
    let mut plus = 0usize;
    let mut minus = 0usize;
    for p in x.points() {
        match side_against(h, p, tol) {
            Side::Plus => plus += 1,
            Side::Minus => minus += 1,
            Side::On => {}
        }
    }
    plus <= x.len() / 2 && minus <= x.len() / 2
}

fn pair_quarters(h1: &Hyperplane, h2: &Hyperplane, x: &PointSetND, tol: f64) -> bool {
    quadrant_counts_pair(x, h1, h2, tol).max_quadrant() <= x.len() / 4
}

/// Caps and tolerances for the enumeration solvers.
#[derive(Debug, Clone, Copy)]
pub struct HighDimConfig {
    /// On-hyperplane tolerance for classification.
    pub tol: f64,
    /// Override the desk-scale caps.
    pub force: bool,
    /// `solve_a`: maximum dimension.
    pub max_dim_a: usize,
    /// `solve_a`: maximum number of points.
    pub max_points_a: usize,
    /// `solve_b`: maximum number of sets.
    pub max_sets_b: usize,
    /// `solve_b`: maximum size of the smallest set.
    pub max_first_set_b: usize,
}

impl Default for HighDimConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            force: false,
            max_dim_a: 3,
            max_points_a: 24,
            max_sets_b: 2,
            max_first_set_b: 8,
        }
    }
}

/// Lexicographic k-subsets of `0..n`.
pub fn combinations(n: usize, k: usize) -> Combinations {
    Combinations {
        n,
        k,
        state: None,
        done: k > n,
    }
}

pub struct Combinations {
    n: usize,
    k: usize,
    state: Option<Vec<usize>>,
    done: bool,
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        match &mut self.state {
            None => {
                let first: Vec<usize> = (0..self.k).collect();
                self.state = Some(first.clone());
                Some(first)
            }
            Some(idx) => {
                // Advance the rightmost index that can move.
                let k = self.k;
                let mut i = k;
                loop {
                    if i == 0 {
                        self.done = true;
                        return None;
                    }
                    i -= 1;
                    if idx[i] < self.n - (k - i) {
                        idx[i] += 1;
                        for j in (i + 1)..k {
                            idx[j] = idx[j - 1] + 1;
                        }
                        return Some(idx.clone());
                    }
                }
            }
        }
    }
}

/// Size of the full tuple space the `solve_a` enumeration ranges over:
/// `C(n,d) * C(n,d-1) * ... * C(n,1)`.
pub fn tuple_space_size(n: usize, d: usize) -> u128 {
    let binom = |n: usize, k: usize| -> u128 {
        let mut acc: u128 = 1;
        for i in 0..k {
            acc = acc * (n - i) as u128 / (i + 1) as u128;
        }
        acc
    };
    (1..=d).map(|k| binom(n, k)).product()
}

/// Candidate offsets for a normal anchored on a point tuple: the median
/// translate first (bisects the anchor set by construction), then the
/// hyperplane through the points themselves.
fn offset_candidates(h: &Hyperplane, anchor: &PointSetND) -> Vec<f64> {
    let projections: Vec<f64> = anchor.points().iter().map(|p| dot(&h.normal, p)).collect();
    let translated = median(&projections).expect("non-empty set");
    if translated == h.offset {
        vec![h.offset]
    } else {
        vec![translated, h.offset]
    }
}

/// Finds `d` mutually orthogonal hyperplanes such that every pair divides `x`
/// into four open regions of at most `⌊n/4⌋` points each (and each hyperplane
/// bisects `x`). First acceptance in lexicographic tuple order; exhaustion is
/// an explicit [`Error::NotFound`].
pub fn solve_a(x: &PointSetND, cfg: &HighDimConfig) -> Result<OrthoFrame> {
    let d = x.dim();
    let n = x.len();
    if d < 2 {
        return Err(Error::InvalidConfig("solve_a needs dimension >= 2".into()));
    }
    if n < 4 {
        return Err(Error::TooFewPoints { needed: 4, got: n });
    }
    if !cfg.force && (d > cfg.max_dim_a || n > cfg.max_points_a) {
        return Err(Error::CapExceeded(format!(
            "solve_a caps: d <= {}, n <= {}",
            cfg.max_dim_a, cfg.max_points_a
        )));
    }
    let mut chosen: Vec<Hyperplane> = Vec::with_capacity(d);
    if dfs_a(x, cfg, d, &mut chosen) {
        Ok(OrthoFrame {
            hyperplanes: chosen,
        })
    } else {
        Err(Error::NotFound)
    }
}

fn dfs_a(x: &PointSetND, cfg: &HighDimConfig, d: usize, chosen: &mut Vec<Hyperplane>) -> bool {
    if chosen.len() == d {
        return true;
    }
    let points_needed = d - chosen.len();
    let normals: Vec<Vec<f64>> = chosen.iter().map(|h| h.normal.clone()).collect();
    let normal_refs: Vec<&[f64]> = normals.iter().map(|v| v.as_slice()).collect();
    for tuple in combinations(x.len(), points_needed) {
        let anchor_points: Vec<&[f64]> = tuple.iter().map(|&i| x.point(i)).collect();
        let Ok(anchored) = hyperplane_through(&anchor_points, &normal_refs) else {
            continue;
        };
        for offset in offset_candidates(&anchored, x) {
            let candidate = Hyperplane {
                normal: anchored.normal.clone(),
                offset,
            };
            if !bisects(&candidate, x, cfg.tol) {
                continue;
            }
            if !chosen
                .iter()
                .all(|prev| pair_quarters(prev, &candidate, x, cfg.tol))
            {
                continue;
            }
            chosen.push(candidate);
            if dfs_a(x, cfg, d, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Finds two orthogonal hyperplanes that simultaneously quarter every set.
/// All sets must live in dimension `delta(m)`; the solver orders them by size
/// and anchors its enumeration on the smallest. First acceptance wins;
/// exhaustion is an explicit [`Error::NotFound`].
pub fn solve_b(sets: &[PointSetND], cfg: &HighDimConfig) -> Result<OrthoFrame> {
    if sets.is_empty() {
        return Err(Error::EmptyInput);
    }
    let m = sets.len() as u64;
    let d = delta(m)? as usize;
    for s in sets {
        if s.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: s.dim(),
            });
        }
    }
    let mut order: Vec<usize> = (0..sets.len()).collect();
    order.sort_by_key(|&i| sets[i].len());
    let first = &sets[order[0]];
    if first.len() < d {
        return Err(Error::TooFewPoints {
            needed: d,
            got: first.len(),
        });
    }
    if !cfg.force && (sets.len() > cfg.max_sets_b || first.len() > cfg.max_first_set_b) {
        return Err(Error::CapExceeded(format!(
            "solve_b caps: m <= {}, smallest set <= {}",
            cfg.max_sets_b, cfg.max_first_set_b
        )));
    }

    let valid = |h1: &Hyperplane, h2: &Hyperplane| -> bool {
        sets.iter().all(|s| {
            bisects(h1, s, cfg.tol) && bisects(h2, s, cfg.tol) && pair_quarters(h1, h2, s, cfg.tol)
        })
    };

    for t1 in combinations(first.len(), d) {
        let anchor1: Vec<&[f64]> = t1.iter().map(|&i| first.point(i)).collect();
        let Ok(anchored1) = hyperplane_through(&anchor1, &[]) else {
            continue;
        };
        for offset1 in offset_candidates(&anchored1, first) {
            let h1 = Hyperplane {
                normal: anchored1.normal.clone(),
                offset: offset1,
            };
            if !sets.iter().all(|s| bisects(&h1, s, cfg.tol)) {
                continue;
            }
            for t2 in combinations(first.len(), d - 1) {
                let anchor2: Vec<&[f64]> = t2.iter().map(|&i| first.point(i)).collect();
                let Ok(anchored2) = hyperplane_through(&anchor2, &[h1.normal.as_slice()]) else {
                    continue;
                };
                for offset2 in offset_candidates(&anchored2, first) {
                    let h2 = Hyperplane {
                        normal: anchored2.normal.clone(),
                        offset: offset2,
                    };
                    if valid(&h1, &h2) {
                        return Ok(OrthoFrame {
                            hyperplanes: vec![h1, h2],
                        });
                    }
                }
            }
        }
    }
    Err(Error::NotFound)
}

fn rational(x: f64) -> BigRational {
    BigRational::from_f64(x).expect("finite float")
}

fn exact_side_against(h: &Hyperplane, x: &[f64], tol: &BigRational) -> Side {
    let mut raw = BigRational::from_f64(0.0).unwrap();
    for (a, b) in h.normal.iter().zip(x) {
        raw += rational(*a) * rational(*b);
    }
    let offset = rational(h.offset);
    let resid = &raw - &offset;
    let mut scale = BigRational::from_f64(1.0).unwrap();
    for cand in [raw.abs(), offset.abs()] {
        if cand > scale {
            scale = cand;
        }
    }
    if resid.abs() <= tol * &scale {
        Side::On
    } else if resid.is_positive() {
        Side::Plus
    } else {
        Side::Minus
    }
}

/// Re-checks a frame's acceptance predicate for one set in exact rational
/// arithmetic: every pair quarters the set and every hyperplane bisects it.
pub fn frame_valid_exact(frame: &OrthoFrame, x: &PointSetND, tol: f64) -> bool {
    let tol = rational(tol);
    let quarter = x.len() / 4;
    let half = x.len() / 2;
    for h in &frame.hyperplanes {
        let mut plus = 0usize;
        let mut minus = 0usize;
        for p in x.points() {
            match exact_side_against(h, p, &tol) {
                Side::Plus => plus += 1,
                Side::Minus => minus += 1,
                Side::On => {}
            }
        }
        if plus > half || minus > half {
            return false;
        }
    }
    for i in 0..frame.hyperplanes.len() {
        for j in (i + 1)..frame.hyperplanes.len() {
            let mut regions = [0usize; 4];
            for p in x.points() {
                let s1 = exact_side_against(&frame.hyperplanes[i], p, &tol);
                let s2 = exact_side_against(&frame.hyperplanes[j], p, &tol);
                match (s1, s2) {
                    (Side::Plus, Side::Plus) => regions[0] += 1,
                    (Side::Minus, Side::Plus) => regions[1] += 1,
                    (Side::Minus, Side::Minus) => regions[2] += 1,
                    (Side::Plus, Side::Minus) => regions[3] += 1,
                    _ => {}
                }
            }
            if regions.iter().any(|&r| r > quarter) {
                return false;
            }
        }
    }
    true
}
