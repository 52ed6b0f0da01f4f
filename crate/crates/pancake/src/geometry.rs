//! Primal/dual geometric primitives.
//!
//! The dual transform sends a point `(a, b)` to the line `y = ax - b` and
//! preserves above/below order: a point `p` lies above a line `l` exactly when
//! the dual point of `l` lies above the dual line of `p`. A line with slope
//! `a` whose dual point sits on the median level of the dual arrangement
//! bisects the primal set; pairing slope `a` with the orthogonal slope `-1/a`
//! yields the candidate orthogonal cuts this crate searches over.

use crate::selection::{median_in_place, select_kth_by};
use crate::{Error, Result};

/// Default relative tolerance for classifying a point as lying on a cut line.
pub const DEFAULT_ON_LINE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// A finite planar point set. Duplicates are permitted in the container and
/// flagged by [`PointSet2D::has_duplicates`]; solver policy decides what to do
/// with them. Sets smaller than four points are rejected at the solver
/// boundary, not here.
#[derive(Debug, Clone)]
pub struct PointSet2D {
    points: Vec<Point>,
}

impl PointSet2D {
    pub fn new(points: Vec<Point>) -> Self {
        Self { points }
    }

    pub fn from_coords(coords: &[(f64, f64)]) -> Self {
        Self {
            points: coords.iter().map(|&(x, y)| Point::new(x, y)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// True if two points share both coordinates exactly.
    pub fn has_duplicates(&self) -> bool {
        let mut sorted: Vec<(u64, u64)> = self
            .points
            .iter()
            .map(|p| (p.x.to_bits(), p.y.to_bits()))
            .collect();
        sorted.sort_unstable();
        sorted.windows(2).any(|w| w[0] == w[1])
    }

    /// Rotates every point around the origin by `angle` radians.
    pub fn rotated(&self, angle: f64) -> PointSet2D {
        let (sin, cos) = angle.sin_cos();
        PointSet2D {
            points: self
                .points
                .iter()
                .map(|p| Point::new(cos * p.x - sin * p.y, sin * p.x + cos * p.y))
                .collect(),
        }
    }
}

/// The graph of `y = slope * x - offset`, dual to the point
/// `(slope, offset)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualLine {
    pub slope: f64,
    pub offset: f64,
}

impl DualLine {
    pub fn new(slope: f64, offset: f64) -> Self {
        Self { slope, offset }
    }

    #[inline]
    pub fn evaluate(&self, x: f64) -> f64 {
        self.slope * x - self.offset
    }
}

/// Maps the point `(a, b)` to the line `y = ax - b`.
pub fn dual_transform(p: Point) -> DualLine {
    DualLine::new(p.x, p.y)
}

/// Inverse of [`dual_transform`]; the two maps form an involution.
pub fn dual_untransform(l: DualLine) -> Point {
    Point::new(l.slope, l.offset)
}

/// A finite collection of dual lines (the full arrangement `H` or a surviving
/// subset of it).
#[derive(Debug, Clone)]
pub struct Arrangement {
    lines: Vec<DualLine>,
}

impl Arrangement {
    pub fn new(lines: Vec<DualLine>) -> Result<Self> {
        if lines.is_empty() {
            return Err(Error::EmptyArrangement);
        }
        Ok(Self { lines })
    }

    pub fn from_points(ps: &PointSet2D) -> Result<Self> {
        Self::new(ps.points().iter().map(|&p| dual_transform(p)).collect())
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn lines(&self) -> &[DualLine] {
        &self.lines
    }

    pub fn line(&self, i: usize) -> DualLine {
        self.lines[i]
    }

    /// Values of every line at abscissa `x`, in line order.
    pub fn values_at(&self, x: f64) -> Vec<f64> {
        self.lines.iter().map(|l| l.evaluate(x)).collect()
    }
}

/// Returns `-1/a`, the slope orthogonal to `a`. Applying it twice returns `a`.
pub fn orthogonal_slope(a: f64) -> Result<f64> {
    if a == 0.0 {
        return Err(Error::ZeroSlope);
    }
    Ok(-1.0 / a)
}

/// The `p`-th smallest value among `{h(x) : h in G}` (`p` is 1-based),
/// computed by linear-time selection. Ties between line values are allowed.
pub fn level_value(g: &Arrangement, p: usize, x: f64) -> Result<f64> {
    if p == 0 || p > g.len() {
        return Err(Error::IndexOutOfRange {
            index: p,
            len: g.len(),
        });
    }
    let mut values = g.values_at(x);
    Ok(select_kth_by(&mut values, p - 1, &mut |a, b| a.total_cmp(b)))
}

/// One leg of an orthogonal cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutLine {
    /// `y = slope * x + intercept`.
    Slanted { slope: f64, intercept: f64 },
    /// The vertical line `x = x0`.
    Vertical { x: f64 },
}

/// Which region counts as the first quadrant; labels continue
/// counterclockwise from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadrantConvention {
    /// Both lines slanted: the first quadrant is the wedge above both.
    AboveBothLines,
    /// Axis-aligned cut (`line1` horizontal, `line2` vertical): the first
    /// quadrant is the upper-right region, the limit of "above both" as the
    /// cut direction approaches the axes from positive slopes.
    UpperRightAxis,
}

/// Two mutually orthogonal cut lines.
///
/// `line1` always carries the nonnegative slope (`tan(phi)` with
/// `phi in [0, pi/2]`); `line2` carries the orthogonal slope. Axis-aligned
/// cuts are normalized so `line1` is horizontal and `line2` vertical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthoCut {
    pub phi: f64,
    pub line1: CutLine,
    pub line2: CutLine,
    pub first_quadrant: QuadrantConvention,
}

impl OrthoCut {
    pub fn slanted(a: f64, intercept1: f64, intercept2: f64) -> Result<Self> {
        if a == 0.0 {
            return Err(Error::ZeroSlope);
        }
        let a = if a > 0.0 { a } else { -1.0 / a };
        Ok(Self {
            phi: a.atan(),
            line1: CutLine::Slanted {
                slope: a,
                intercept: intercept1,
            },
            line2: CutLine::Slanted {
                slope: -1.0 / a,
                intercept: intercept2,
            },
            first_quadrant: QuadrantConvention::AboveBothLines,
        })
    }

    pub fn axis_aligned(y_level: f64, x_level: f64) -> Self {
        Self {
            phi: 0.0,
            line1: CutLine::Slanted {
                slope: 0.0,
                intercept: y_level,
            },
            line2: CutLine::Vertical { x: x_level },
            first_quadrant: QuadrantConvention::UpperRightAxis,
        }
    }

    /// Checks the orthogonality invariant: the finite slopes multiply to -1
    /// within a relative tolerance, or one line is vertical and the other
    /// horizontal.
    pub fn is_orthogonal(&self, tol: f64) -> bool {
        match (self.line1, self.line2) {
            (CutLine::Slanted { slope: s1, .. }, CutLine::Slanted { slope: s2, .. }) => {
                if s1 == 0.0 || s2 == 0.0 {
                    return false;
                }
                (s1 * s2 + 1.0).abs() <= tol * (1.0 + (s1 * s2).abs())
            }
            (CutLine::Slanted { slope, .. }, CutLine::Vertical { .. })
            | (CutLine::Vertical { .. }, CutLine::Slanted { slope, .. }) => slope == 0.0,
            (CutLine::Vertical { .. }, CutLine::Vertical { .. }) => false,
        }
    }
}

/// Signed side of a point against a cut line. For slanted lines `Plus` means
/// strictly above; for vertical lines it means strictly to the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    On,
    Minus,
}

pub(crate) fn side_of(line: &CutLine, p: Point, tol: f64) -> Side {
    match *line {
        CutLine::Slanted { slope, intercept } => {
            let predicted = slope * p.x + intercept;
            let resid = p.y - predicted;
            let scale = 1.0f64
                .max(p.y.abs())
                .max((slope * p.x).abs())
                .max(intercept.abs());
            if resid.abs() <= tol * scale {
                Side::On
            } else if resid > 0.0 {
                Side::Plus
            } else {
                Side::Minus
            }
        }
        CutLine::Vertical { x } => {
            let resid = p.x - x;
            let scale = 1.0f64.max(p.x.abs()).max(x.abs());
            if resid.abs() <= tol * scale {
                Side::On
            } else if resid > 0.0 {
                Side::Plus
            } else {
                Side::Minus
            }
        }
    }
}

/// Open-quadrant and on-line counts for a point set against an orthogonal
/// cut. Quadrants are labeled counterclockwise from the first quadrant; the
/// counts always sum to `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct QuadrantCounts {
    pub q1: usize,
    pub q2: usize,
    pub q3: usize,
    pub q4: usize,
    pub on1: usize,
    pub on2: usize,
    pub on_both: usize,
    pub n: usize,
}

impl QuadrantCounts {
    pub fn quadrants(&self) -> [usize; 4] {
        [self.q1, self.q2, self.q3, self.q4]
    }

    pub fn max_quadrant(&self) -> usize {
        self.quadrants().into_iter().max().unwrap_or(0)
    }
}

pub(crate) fn tally_sides(sides: impl Iterator<Item = (Side, Side)>) -> QuadrantCounts {
    let mut c = QuadrantCounts::default();
    for (s1, s2) in sides {
        c.n += 1;
        match (s1, s2) {
            (Side::On, Side::On) => c.on_both += 1,
            (Side::On, _) => c.on1 += 1,
            (_, Side::On) => c.on2 += 1,
            (Side::Plus, Side::Plus) => c.q1 += 1,
            (Side::Plus, Side::Minus) => c.q2 += 1,
            (Side::Minus, Side::Minus) => c.q3 += 1,
            (Side::Minus, Side::Plus) => c.q4 += 1,
        }
    }
    c
}

/// Classifies every point of `ps` against both cut lines.
///
/// For slanted pairs the first quadrant is the wedge above both lines; for
/// the axis-aligned cut it is the upper-right region, matching the behaviour
/// of the quadrant labels as the cut direction tends to the axes.
pub fn count_quadrants(ps: &PointSet2D, cut: &OrthoCut, tol: f64) -> QuadrantCounts {
    tally_sides(
        ps.points()
            .iter()
            .map(|&p| (side_of(&cut.line1, p, tol), side_of(&cut.line2, p, tol))),
    )
}

fn bisecting_level(values: &mut [f64]) -> f64 {
    median_in_place(values, &mut |a, b| a.total_cmp(b))
}

/// The axis-aligned candidate cut: the horizontal line through the median of
/// the y-coordinates paired with the vertical line through the median of the
/// x-coordinates.
pub fn axis_cut(ps: &PointSet2D) -> Result<OrthoCut> {
    if ps.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut xs: Vec<f64> = ps.points().iter().map(|p| p.x).collect();
    let mut ys: Vec<f64> = ps.points().iter().map(|p| p.y).collect();
    let x_level = bisecting_level(&mut xs);
    let y_level = bisecting_level(&mut ys);
    Ok(OrthoCut::axis_aligned(y_level, x_level))
}

/// Builds the orthogonal cut whose first line has slope `a` (normalized to
/// the positive member of the pair `{a, -1/a}`) and whose intercepts place
/// both lines on the median level of the dual arrangement at `a` and `-1/a`.
/// Both lines bisect `ps` by construction.
pub fn cut_at_slope(ps: &PointSet2D, a: f64) -> Result<OrthoCut> {
    if a == 0.0 {
        return Err(Error::ZeroSlope);
    }
    if ps.is_empty() {
        return Err(Error::EmptyInput);
    }
    let a = if a > 0.0 { a } else { -1.0 / a };
    let b = -1.0 / a;
    let mut at_a: Vec<f64> = ps.points().iter().map(|p| p.x * a - p.y).collect();
    let mut at_b: Vec<f64> = ps.points().iter().map(|p| p.x * b - p.y).collect();
    let mu_a = bisecting_level(&mut at_a);
    let mu_b = bisecting_level(&mut at_b);
    OrthoCut::slanted(a, -mu_a, -mu_b)
}

/// Argument to [`n_of`]: a finite positive slope or the quarter-turn limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NAngle {
    Slope(f64),
    /// The limit of the cut direction at a quarter turn, evaluated against
    /// the axis-aligned cut.
    HalfPi,
}

/// The number of points in the first quadrant of the cut at slope `a`.
///
/// For the quarter-turn marker this is the count left of the vertical median
/// line and above the horizontal one (the limit of the first quadrant as the
/// direction approaches a quarter turn from below).
pub fn n_of(ps: &PointSet2D, angle: NAngle) -> Result<usize> {
    match angle {
        NAngle::Slope(a) => {
            if a <= 0.0 {
                return Err(Error::NonPositiveSlope(a));
            }
            let cut = cut_at_slope(ps, a)?;
            Ok(count_quadrants(ps, &cut, DEFAULT_ON_LINE_TOL).q1)
        }
        NAngle::HalfPi => {
            let cut = axis_cut(ps)?;
            // Upper-left region: above line1 (horizontal), left of line2
            // (vertical), which is q2 in the counterclockwise labeling.
            Ok(count_quadrants(ps, &cut, DEFAULT_ON_LINE_TOL).q2)
        }
    }
}

/// True iff all four open quadrants hold at most `⌊n/4⌋` points and each line
/// individually bisects `ps` (at most `⌊n/2⌋` points strictly on each open
/// side). Points on a cut line are not counted in any quadrant.
pub fn verify_cut(ps: &PointSet2D, cut: &OrthoCut, tol: f64) -> bool {
    let n = ps.len();
    if n == 0 {
        return false;
    }
    let quarter = n / 4;
    let half = n / 2;
    let mut counts = QuadrantCounts::default();
    let mut above1 = 0usize;
    let mut below1 = 0usize;
    let mut above2 = 0usize;
    let mut below2 = 0usize;
    for &p in ps.points() {
        let s1 = side_of(&cut.line1, p, tol);
        let s2 = side_of(&cut.line2, p, tol);
        match s1 {
            Side::Plus => above1 += 1,
            Side::Minus => below1 += 1,
            Side::On => {}
        }
        match s2 {
            Side::Plus => above2 += 1,
            Side::Minus => below2 += 1,
            Side::On => {}
        }
        counts = add_side(counts, s1, s2);
    }
    counts.max_quadrant() <= quarter
        && above1 <= half
        && below1 <= half
        && above2 <= half
        && below2 <= half
}

fn add_side(mut c: QuadrantCounts, s1: Side, s2: Side) -> QuadrantCounts {
    c.n += 1;
    match (s1, s2) {
        (Side::On, Side::On) => c.on_both += 1,
        (Side::On, _) => c.on1 += 1,
        (_, Side::On) => c.on2 += 1,
        (Side::Plus, Side::Plus) => c.q1 += 1,
        (Side::Plus, Side::Minus) => c.q2 += 1,
        (Side::Minus, Side::Minus) => c.q3 += 1,
        (Side::Minus, Side::Plus) => c.q4 += 1,
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn symmetric4() -> PointSet2D {
        PointSet2D::from_coords(&[(1.0, 2.0), (-1.0, -2.0), (2.0, -1.0), (-2.0, 1.0)])
    }

    #[test]
    fn dual_transform_examples() {
        let l = dual_transform(Point::new(2.0, 3.0));
        assert_eq!((l.slope, l.offset), (2.0, 3.0));
        assert_eq!(l.evaluate(1.0), -1.0); // y = 2x - 3 at x = 1

        let z = dual_transform(Point::new(0.0, 0.0));
        assert_eq!(z.evaluate(5.0), 0.0);

        let p = Point::new(1.0, 5.0);
        let rt = dual_untransform(dual_transform(p));
        assert_eq!(p, rt);
    }

    #[test]
    fn duality_preserves_order() {
        // p above l  <=>  dual point of l above dual line of p.
        let p = Point::new(1.0, 5.0);
        let l = DualLine::new(2.0, 3.0); // y = 2x - 3 with dual point (2, 3)
        assert!(p.y > l.evaluate(p.x));
        let dual_p = dual_transform(p);
        let dual_l = dual_untransform(l);
        assert!(dual_l.y > dual_p.evaluate(dual_l.x));

        let mut rng = ChaCha8Rng::seed_from_u64(0xd0a1);
        for _ in 0..10_000 {
            let p = Point::new(rng.random::<f64>() * 4.0 - 2.0, rng.random::<f64>() * 4.0 - 2.0);
            let l = DualLine::new(rng.random::<f64>() * 4.0 - 2.0, rng.random::<f64>() * 4.0 - 2.0);
            let above_primal = p.y > l.evaluate(p.x);
            let dual_p = dual_transform(p);
            let dual_l = dual_untransform(l);
            let above_dual = dual_l.y > dual_p.evaluate(dual_l.x);
            assert_eq!(above_primal, above_dual);
        }
    }

    #[test]
    fn orthogonal_slope_examples() {
        assert_eq!(orthogonal_slope(2.0).unwrap(), -0.5);
        assert_eq!(orthogonal_slope(1.0).unwrap(), -1.0);
        assert_eq!(orthogonal_slope(0.0), Err(Error::ZeroSlope));
        for a in [0.3, -7.0, 12.5] {
            let twice = orthogonal_slope(orthogonal_slope(a).unwrap()).unwrap();
            assert!((twice - a).abs() <= 1e-12 * a.abs());
        }
    }

    #[test]
    fn level_value_examples() {
        let g = Arrangement::new(vec![
            DualLine::new(1.0, 0.0),
            DualLine::new(-1.0, 0.0),
            DualLine::new(0.0, 0.0),
        ])
        .unwrap();
        assert_eq!(level_value(&g, 2, 1.0).unwrap(), 0.0);
        assert_eq!(level_value(&g, 3, 1.0).unwrap(), 1.0);
        assert!(level_value(&g, 0, 1.0).is_err());
        assert!(level_value(&g, 4, 1.0).is_err());
    }

    #[test]
    fn level_value_matches_sort_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x11ef);
        for _ in 0..50 {
            let lines: Vec<DualLine> = (0..15)
                .map(|_| {
                    DualLine::new(rng.random::<f64>() * 6.0 - 3.0, rng.random::<f64>() * 6.0 - 3.0)
                })
                .collect();
            let g = Arrangement::new(lines).unwrap();
            for _ in 0..10 {
                let x = rng.random::<f64>() * 10.0 - 5.0;
                let mut sorted = g.values_at(x);
                sorted.sort_by(|a, b| a.total_cmp(b));
                for p in 1..=g.len() {
                    assert_eq!(level_value(&g, p, x).unwrap(), sorted[p - 1]);
                }
            }
        }
    }

    #[test]
    fn level_value_monotone_in_p() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x11f0);
        let lines: Vec<DualLine> = (0..21)
            .map(|_| DualLine::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let g = Arrangement::new(lines).unwrap();
        for _ in 0..20 {
            let x = rng.random::<f64>() * 4.0 - 2.0;
            let mut prev = f64::NEG_INFINITY;
            for p in 1..=g.len() {
                let v = level_value(&g, p, x).unwrap();
                assert!(v >= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn cut_at_slope_symmetric() {
        let cut = cut_at_slope(&symmetric4(), 1.0).unwrap();
        match cut.line1 {
            CutLine::Slanted { slope, intercept } => {
                assert_eq!(slope, 1.0);
                assert_eq!(intercept, 0.0);
            }
            _ => panic!("expected slanted line"),
        }
        match cut.line2 {
            CutLine::Slanted { slope, intercept } => {
                assert_eq!(slope, -1.0);
                assert_eq!(intercept, 0.0);
            }
            _ => panic!("expected slanted line"),
        }
        assert!(cut.is_orthogonal(1e-12));
    }

    #[test]
    fn cut_at_slope_translation_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xabc1);
        for _ in 0..20 {
            let pts: Vec<(f64, f64)> = (0..17)
                .map(|_| (rng.random::<f64>() * 4.0, rng.random::<f64>() * 4.0))
                .collect();
            let t = rng.random::<f64>() * 10.0 - 5.0;
            let shifted: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (x + t, y + t)).collect();
            let ps = PointSet2D::from_coords(&pts);
            let qs = PointSet2D::from_coords(&shifted);
            let a = 0.5 + rng.random::<f64>() * 2.0;
            let c1 = count_quadrants(&ps, &cut_at_slope(&ps, a).unwrap(), DEFAULT_ON_LINE_TOL);
            let c2 = count_quadrants(&qs, &cut_at_slope(&qs, a).unwrap(), DEFAULT_ON_LINE_TOL);
            assert_eq!(c1, c2);
        }
    }

    #[test]
    fn cut_at_slope_bisects() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xabc2);
        for _ in 0..50 {
            let pts: Vec<(f64, f64)> = (0..25)
                .map(|_| (rng.random::<f64>() * 8.0 - 4.0, rng.random::<f64>() * 8.0 - 4.0))
                .collect();
            let ps = PointSet2D::from_coords(&pts);
            let a = 0.1 + rng.random::<f64>() * 5.0;
            let cut = cut_at_slope(&ps, a).unwrap();
            for line in [&cut.line1, &cut.line2] {
                let mut above = 0;
                let mut below = 0;
                for &p in ps.points() {
                    match side_of(line, p, DEFAULT_ON_LINE_TOL) {
                        Side::Plus => above += 1,
                        Side::Minus => below += 1,
                        Side::On => {}
                    }
                }
                assert!(above <= 12 && below <= 12, "above={above} below={below}");
            }
        }
    }

    #[test]
    fn count_quadrants_axis_examples() {
        let ps = PointSet2D::from_coords(&[(1.0, 2.0), (-1.0, 2.0), (-1.0, -2.0), (1.0, -2.0)]);
        let cut = OrthoCut::axis_aligned(0.0, 0.0);
        let c = count_quadrants(&ps, &cut, DEFAULT_ON_LINE_TOL);
        assert_eq!(
            (c.q1, c.q2, c.q3, c.q4, c.on1, c.on2, c.on_both),
            (1, 1, 1, 1, 0, 0, 0)
        );

        let with_origin = PointSet2D::from_coords(&[
            (1.0, 2.0),
            (-1.0, 2.0),
            (-1.0, -2.0),
            (1.0, -2.0),
            (0.0, 0.0),
        ]);
        let c = count_quadrants(&with_origin, &cut, DEFAULT_ON_LINE_TOL);
        assert_eq!((c.q1, c.q2, c.q3, c.q4, c.on_both), (1, 1, 1, 1, 1));
        assert_eq!(c.q1 + c.q2 + c.q3 + c.q4 + c.on1 + c.on2 + c.on_both, c.n);
    }

    #[test]
    fn quadrant_counts_sum_to_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xabc3);
        for _ in 0..200 {
            let n = rng.random_range(1..60);
            let pts: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0))
                .collect();
            let ps = PointSet2D::from_coords(&pts);
            let a = 0.05 + rng.random::<f64>() * 10.0;
            let cut = cut_at_slope(&ps, a).unwrap();
            let c = count_quadrants(&ps, &cut, DEFAULT_ON_LINE_TOL);
            assert_eq!(c.q1 + c.q2 + c.q3 + c.q4 + c.on1 + c.on2 + c.on_both, n);
        }
    }

    #[test]
    fn opposite_quadrants_balance_at_median_positions() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xabc4);
        for _ in 0..20 {
            let n = 2 * rng.random_range(5..20) + 1; // odd
            let pts: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.random::<f64>() * 6.0 - 3.0, rng.random::<f64>() * 6.0 - 3.0))
                .collect();
            let ps = PointSet2D::from_coords(&pts);
            for _ in 0..20 {
                let a = 0.1 + rng.random::<f64>() * 4.0;
                let cut = cut_at_slope(&ps, a).unwrap();
                let c = count_quadrants(&ps, &cut, DEFAULT_ON_LINE_TOL);
                assert!(c.q1.abs_diff(c.q3) <= 1, "{c:?}");
                assert!(c.q2.abs_diff(c.q4) <= 1, "{c:?}");
            }
        }
    }

    #[test]
    fn n_of_examples() {
        let ps = symmetric4();
        assert_eq!(n_of(&ps, NAngle::Slope(1.0)).unwrap(), 1);
        assert_eq!(n_of(&ps, NAngle::HalfPi).unwrap(), 1);
        assert!(n_of(&ps, NAngle::Slope(0.0)).is_err());
        assert!(n_of(&ps, NAngle::Slope(-2.0)).is_err());
    }

    #[test]
    fn n_of_matches_count_quadrants() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xabc5);
        for _ in 0..20 {
            let pts: Vec<(f64, f64)> = (0..21)
                .map(|_| (rng.random::<f64>() * 6.0 - 3.0, rng.random::<f64>() * 6.0 - 3.0))
                .collect();
            let ps = PointSet2D::from_coords(&pts);
            for _ in 0..20 {
                let a = 0.05 + rng.random::<f64>() * 8.0;
                let cut = cut_at_slope(&ps, a).unwrap();
                let q1 = count_quadrants(&ps, &cut, DEFAULT_ON_LINE_TOL).q1;
                assert_eq!(n_of(&ps, NAngle::Slope(a)).unwrap(), q1);
            }
        }
    }

    #[test]
    fn verify_cut_examples() {
        let ps = symmetric4();
        let good = cut_at_slope(&ps, 1.0).unwrap();
        assert!(verify_cut(&ps, &good, DEFAULT_ON_LINE_TOL));

        // Same directions but translated far away: bisection fails.
        let bad = OrthoCut {
            phi: good.phi,
            line1: CutLine::Slanted {
                slope: 1.0,
                intercept: 10.0,
            },
            line2: CutLine::Slanted {
                slope: -1.0,
                intercept: 20.0,
            },
            first_quadrant: QuadrantConvention::AboveBothLines,
        };
        assert!(!verify_cut(&ps, &bad, DEFAULT_ON_LINE_TOL));
    }

    #[test]
    fn has_duplicates_flag() {
        let set = PointSet2D::from_coords(&[(0.0, 0.0), (1.0, 1.0), (0.0, 0.0)]);
        assert!(set.has_duplicates());
        assert!(!symmetric4().has_duplicates());
    }

    #[test]
    fn rotation_round_trips() {
        let ps = symmetric4();
        let back = ps.rotated(0.7).rotated(-0.7);
        for (a, b) in ps.points().iter().zip(back.points()) {
            assert!((a.x - b.x).abs() < 1e-12 && (a.y - b.y).abs() < 1e-12);
        }
    }
}
