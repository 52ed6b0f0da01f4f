//! Independent brute-force solvers and exact-arithmetic counters used as
//! ground truth in tests, plus a median-finding reduction built on the 2-D
//! solver.
//!
//! The brute-force solver enumerates every candidate slope at which the
//! first-quadrant count can change (pairwise crossings of the dual lines and
//! their orthogonal preimages), so it is cubic and deliberately simple. Keep
//! it to desk scale (n up to a few hundred).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed};

use crate::geometry::{
    axis_cut, cut_at_slope, tally_sides, verify_cut, Arrangement, CutLine, OrthoCut, PointSet2D,
    QuadrantCounts, Side, DEFAULT_ON_LINE_TOL,
};
use crate::{Error, Result};

/// Sorted candidate abscissae in `(0, inf)` at which the first-quadrant count
/// can change: pairwise dual-line crossings with positive abscissa plus the
/// orthogonal preimages of crossings with negative abscissa. Between
/// consecutive candidates the count is constant on general-position inputs.
#[derive(Debug, Clone)]
pub struct CriticalSlopeSet {
    slopes: Vec<f64>,
}

impl CriticalSlopeSet {
    pub fn from_points(ps: &PointSet2D) -> Self {
        let lines: Vec<_> = ps
            .points()
            .iter()
            .map(|p| crate::geometry::dual_transform(*p))
            .collect();
        let mut slopes = Vec::new();
        for i in 0..lines.len() {
            for j in (i + 1)..lines.len() {
                let ds = lines[i].slope - lines[j].slope;
                if ds == 0.0 {
                    continue;
                }
                let x = (lines[i].offset - lines[j].offset) / ds;
                if !x.is_finite() || x == 0.0 {
                    continue;
                }
                if x > 0.0 {
                    slopes.push(x);
                } else {
                    slopes.push(-1.0 / x);
                }
            }
        }
        slopes.sort_by(|a, b| a.total_cmp(b));
        slopes.dedup();
        Self { slopes }
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Candidate slopes to test: every critical slope plus a midpoint inside
    /// each maximal open interval between consecutive ones (and sentinels on
    /// both unbounded sides).
    pub fn candidates(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.slopes.len() + 2);
        if self.slopes.is_empty() {
            out.push(1.0);
            return out;
        }
        out.push(self.slopes[0] * 0.5);
        for i in 0..self.slopes.len() {
            out.push(self.slopes[i]);
            if i + 1 < self.slopes.len() {
                out.push(0.5 * (self.slopes[i] + self.slopes[i + 1]));
            }
        }
        out.push(self.slopes[self.slopes.len() - 1] * 2.0 + 1.0);
        out.retain(|x| x.is_finite() && *x > 0.0);
        out
    }
}

/// Exhaustive reference solver: checks the axis-aligned cut, then every
/// candidate slope in order, returning the first cut that verifies. Runs in
/// cubic time; returns [`Error::NotFound`] explicitly when the sweep finds
/// nothing (it never fabricates a cut).
pub fn brute_force_solve(ps: &PointSet2D) -> Result<OrthoCut> {
    if ps.len() < 4 {
        return Err(Error::TooFewPoints {
            needed: 4,
            got: ps.len(),
        });
    }
    let axis = axis_cut(ps)?;
    if verify_cut(ps, &axis, DEFAULT_ON_LINE_TOL) {
        return Ok(axis);
    }
    for a in CriticalSlopeSet::from_points(ps).candidates() {
        let cut = cut_at_slope(ps, a)?;
        if verify_cut(ps, &cut, DEFAULT_ON_LINE_TOL) {
            return Ok(cut);
        }
    }
    Err(Error::NotFound)
}

/// Exact number of line pairs whose crossing abscissa lies strictly inside
/// `(l, r)`, computed as the inversion count between the value orderings at
/// `l` and at `r`. Runs in `O(n log n)`.
pub fn count_crossings_in_strip(g: &Arrangement, l: f64, r: f64) -> Result<u64> {
    if !(l < r) {
        return Err(Error::InvalidConfig(format!(
            "strip endpoints must satisfy l < r, got ({l}, {r})"
        )));
    }
    let vl = g.values_at(l);
    let vr = g.values_at(r);
    // Order lines by value at l (ties broken by value at r, so pairs that
    // cross exactly at l are not inversions), then count strict inversions
    // of their values at r.
    let mut order: Vec<usize> = (0..g.len()).collect();
    order.sort_by(|&i, &j| vl[i].total_cmp(&vl[j]).then(vr[i].total_cmp(&vr[j])));
    let seq: Vec<f64> = order.iter().map(|&i| vr[i]).collect();
    Ok(count_inversions(&seq))
}

/// Strict inversions (`i < j` with `a[i] > a[j]`) by merge counting.
fn count_inversions(a: &[f64]) -> u64 {
    fn merge_count(a: &mut [f64], scratch: &mut [f64]) -> u64 {
        let n = a.len();
        if n <= 1 {
            return 0;
        }
        let mid = n / 2;
        let mut inv = {
            let (left, right) = a.split_at_mut(mid);
            merge_count(left, scratch) + merge_count(right, scratch)
        };
        scratch[..n].copy_from_slice(a);
        let (left, right) = scratch[..n].split_at(mid);
        let (mut i, mut j) = (0, 0);
        for slot in a.iter_mut() {
            if i < left.len() && (j >= right.len() || left[i] <= right[j]) {
                *slot = left[i];
                i += 1;
            } else {
                // right[j] < left[i]: it jumps ahead of all remaining lefts.
                inv += (left.len() - i) as u64;
                *slot = right[j];
                j += 1;
            }
        }
        inv
    }
    let mut buf = a.to_vec();
    let mut scratch = vec![0.0; a.len()];
    merge_count(&mut buf, &mut scratch)
}

fn rational(x: f64) -> BigRational {
    BigRational::from_f64(x).expect("finite float")
}

fn exact_side(num: &BigRational, scale: &BigRational, tol: &BigRational) -> Side {
    let band = tol * scale;
    if num.abs() <= band {
        Side::On
    } else if num.is_positive() {
        Side::Plus
    } else {
        Side::Minus
    }
}

fn exact_side_of(line: &CutLine, x: f64, y: f64, tol: &BigRational) -> Side {
    let one = BigRational::from_integer(BigInt::from(1));
    match *line {
        CutLine::Slanted { slope, intercept } => {
            let (s, c) = (rational(slope), rational(intercept));
            let (px, py) = (rational(x), rational(y));
            let resid = &py - (&s * &px + &c);
            let mut scale = one;
            for cand in [py.abs(), (&s * &px).abs(), c.abs()] {
                if cand > scale {
                    scale = cand;
                }
            }
            exact_side(&resid, &scale, tol)
        }
        CutLine::Vertical { x: x0 } => {
            let (px, rx0) = (rational(x), rational(x0));
            let resid = &px - &rx0;
            let mut scale = one;
            for cand in [px.abs(), rx0.abs()] {
                if cand > scale {
                    scale = cand;
                }
            }
            exact_side(&resid, &scale, tol)
        }
    }
}

/// [`count_quadrants`] recomputed in exact rational arithmetic. Inputs are
/// dyadic rationals (every finite double is), so the classification involves
/// no rounding; the same relative tolerance band defines "on the line".
pub fn count_quadrants_exact(ps: &PointSet2D, cut: &OrthoCut, tol: f64) -> QuadrantCounts {
    let tol = rational(tol);
    tally_sides(ps.points().iter().map(|p| {
        (
            exact_side_of(&cut.line1, p.x, p.y, &tol),
            exact_side_of(&cut.line2, p.x, p.y, &tol),
        )
    }))
}

/// [`verify_cut`] recomputed in exact rational arithmetic.
pub fn verify_cut_exact(ps: &PointSet2D, cut: &OrthoCut, tol: f64) -> bool {
    let n = ps.len();
    if n == 0 {
        return false;
    }
    let tol = rational(tol);
    let mut sides = Vec::with_capacity(n);
    for p in ps.points() {
        sides.push((
            exact_side_of(&cut.line1, p.x, p.y, &tol),
            exact_side_of(&cut.line2, p.x, p.y, &tol),
        ));
    }
    let counts = tally_sides(sides.iter().copied());
    let quarter = n / 4;
    let half = n / 2;
    let above1 = sides.iter().filter(|(s, _)| *s == Side::Plus).count();
    let below1 = sides.iter().filter(|(s, _)| *s == Side::Minus).count();
    let above2 = sides.iter().filter(|(_, s)| *s == Side::Plus).count();
    let below2 = sides.iter().filter(|(_, s)| *s == Side::Minus).count();
    counts.max_quadrant() <= quarter
        && above1 <= half
        && below1 <= half
        && above2 <= half
        && below2 <= half
}

/// Finds the median of an odd-length list of distinct reals by reduction to
/// orthogonal partitioning: rescale the values into `[0, 1]`, lift them onto
/// the strictly convex increasing curve `t -> (t, e^t)`, solve the 2-D
/// problem, and read off the unique lifted point on the negative-slope cut
/// line. A line of negative (or infinite) slope crosses an increasing curve
/// exactly once, and for a bisecting line that crossing is the median.
pub fn median_via_pancake(values: &[f64]) -> Result<f64> {
    if values.len() < 5 || values.len() % 2 == 0 {
        return Err(Error::BadMedianInput(values.len()));
    }
    let mut sorted_check = values.to_vec();
    sorted_check.sort_by(|a, b| a.total_cmp(b));
    if sorted_check.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DuplicateValues);
    }

    let min = sorted_check[0];
    let max = sorted_check[sorted_check.len() - 1];
    let span = max - min;
    let lifted: Vec<(f64, f64)> = values
        .iter()
        .map(|&v| {
            let t = (v - min) / span;
            (t, t.exp())
        })
        .collect();
    let ps = PointSet2D::from_coords(&lifted);

    let cfg = crate::solver::PhaseConfig::default();
    let cut = match crate::solver::solve(&ps, &cfg) {
        Ok((cut, _)) => cut,
        Err(_) => brute_force_solve(&ps)?,
    };
    if let Some(idx) = on_line_index(&ps, &cut.line2) {
        return Ok(values[idx]);
    }
    // Tolerance miss: re-solve with the exhaustive oracle and try again.
    let cut = brute_force_solve(&ps)?;
    match on_line_index(&ps, &cut.line2) {
        Some(idx) => Ok(values[idx]),
        None => Err(Error::NotFound),
    }
}

/// Index of the unique point of `ps` lying on `line` within the on-line
/// tolerance; `None` if no point qualifies.
fn on_line_index(ps: &PointSet2D, line: &CutLine) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in ps.points().iter().enumerate() {
        let resid = match *line {
            CutLine::Slanted { slope, intercept } => {
                let scale = 1.0f64
                    .max(p.y.abs())
                    .max((slope * p.x).abs())
                    .max(intercept.abs());
                (p.y - (slope * p.x + intercept)).abs() / scale
            }
            CutLine::Vertical { x } => {
                let scale = 1.0f64.max(p.x.abs()).max(x.abs());
                (p.x - x).abs() / scale
            }
        };
        if resid <= DEFAULT_ON_LINE_TOL && best.is_none_or(|(_, r)| resid < r) {
            best = Some((i, resid));
        }
    }
    best.map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{count_quadrants, DualLine};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn brute_force_symmetric() {
        let ps = PointSet2D::from_coords(&[(1.0, 2.0), (-1.0, -2.0), (2.0, -1.0), (-2.0, 1.0)]);
        let cut = brute_force_solve(&ps).unwrap();
        assert!(verify_cut(&ps, &cut, DEFAULT_ON_LINE_TOL));
    }

    #[test]
    fn brute_force_rejects_small_sets() {
        let ps = PointSet2D::from_coords(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.5)]);
        assert!(matches!(
            brute_force_solve(&ps),
            Err(Error::TooFewPoints { needed: 4, got: 3 })
        ));
    }

    #[test]
    fn brute_force_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x0bac1e);
        for _ in 0..40 {
            let n = rng.random_range(4..=40);
            let pts: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.random::<f64>() * 4.0 - 2.0, rng.random::<f64>() * 4.0 - 2.0))
                .collect();
            let ps = PointSet2D::from_coords(&pts);
            let cut = brute_force_solve(&ps).expect("oracle should find a cut");
            assert!(verify_cut(&ps, &cut, DEFAULT_ON_LINE_TOL));
            assert!(verify_cut_exact(&ps, &cut, DEFAULT_ON_LINE_TOL));
        }
    }

    #[test]
    fn crossings_parallel_lines() {
        let g = Arrangement::new(vec![
            DualLine::new(1.0, 0.0),
            DualLine::new(1.0, 1.0),
            DualLine::new(1.0, 2.0),
        ])
        .unwrap();
        assert_eq!(count_crossings_in_strip(&g, -10.0, 10.0).unwrap(), 0);
    }

    #[test]
    fn crossings_single_pair() {
        let g = Arrangement::new(vec![DualLine::new(1.0, 0.0), DualLine::new(-1.0, 0.0)]).unwrap();
        assert_eq!(count_crossings_in_strip(&g, -1.0, 1.0).unwrap(), 1);
        assert_eq!(count_crossings_in_strip(&g, 0.5, 1.0).unwrap(), 0);
        assert!(count_crossings_in_strip(&g, 1.0, 1.0).is_err());
    }

    fn quadratic_crossings(g: &Arrangement, l: f64, r: f64) -> u64 {
        let mut count = 0;
        for i in 0..g.len() {
            for j in (i + 1)..g.len() {
                let (a, b) = (g.line(i), g.line(j));
                let ds = a.slope - b.slope;
                if ds == 0.0 {
                    continue;
                }
                let x = (a.offset - b.offset) / ds;
                if x > l && x < r {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn crossings_match_quadratic_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xc0ffee);
        for _ in 0..30 {
            let lines: Vec<DualLine> = (0..64)
                .map(|_| {
                    DualLine::new(rng.random::<f64>() * 4.0 - 2.0, rng.random::<f64>() * 4.0 - 2.0)
                })
                .collect();
            let g = Arrangement::new(lines).unwrap();
            let l = rng.random::<f64>() * 4.0 - 3.0;
            let r = l + rng.random::<f64>() * 3.0 + 1e-3;
            assert_eq!(
                count_crossings_in_strip(&g, l, r).unwrap(),
                quadratic_crossings(&g, l, r)
            );
        }
    }

    #[test]
    fn crossings_additive_over_adjacent_strips() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xadd);
        let lines: Vec<DualLine> = (0..40)
            .map(|_| DualLine::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>()))
            .collect();
        let g = Arrangement::new(lines).unwrap();
        let (l, m, r) = (-2.0, 0.31, 1.7);
        let whole = count_crossings_in_strip(&g, l, r).unwrap();
        let parts = count_crossings_in_strip(&g, l, m).unwrap()
            + count_crossings_in_strip(&g, m, r).unwrap();
        assert_eq!(whole, parts);
    }

    #[test]
    fn exact_classifier_matches_float_on_random_cuts() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xe8ac1);
        for _ in 0..100 {
            let n = rng.random_range(4..40);
            let pts: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.random::<f64>() * 4.0 - 2.0, rng.random::<f64>() * 4.0 - 2.0))
                .collect();
            let ps = PointSet2D::from_coords(&pts);
            let a = 0.2 + rng.random::<f64>() * 3.0;
            let cut = cut_at_slope(&ps, a).unwrap();
            assert_eq!(
                count_quadrants(&ps, &cut, DEFAULT_ON_LINE_TOL),
                count_quadrants_exact(&ps, &cut, DEFAULT_ON_LINE_TOL)
            );
        }
    }

    #[test]
    fn median_demo_examples() {
        assert_eq!(median_via_pancake(&[5.0, 1.0, 3.0, 9.0, 7.0]).unwrap(), 5.0);
        assert_eq!(median_via_pancake(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(), 3.0);
    }

    #[test]
    fn median_demo_rejects_bad_input() {
        assert!(matches!(
            median_via_pancake(&[1.0, 2.0, 3.0, 4.0]),
            Err(Error::BadMedianInput(4))
        ));
        assert!(matches!(
            median_via_pancake(&[1.0, 2.0, 2.0, 4.0, 5.0]),
            Err(Error::DuplicateValues)
        ));
        assert!(matches!(
            median_via_pancake(&[1.0, 2.0, 3.0]),
            Err(Error::BadMedianInput(3))
        ));
    }

    #[test]
    fn median_demo_matches_sort() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x3ed1a);
        for _ in 0..60 {
            let n = 2 * rng.random_range(2..40) + 1;
            let mut values: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 100.0 - 50.0).collect();
            values.dedup_by(|a, b| a == b);
            if values.len() % 2 == 0 {
                values.pop();
            }
            if values.len() < 5 {
                continue;
            }
            let mut sorted = values.clone();
            sorted.sort_by(|a, b| a.total_cmp(b));
            let expect = sorted[sorted.len() / 2];
            assert_eq!(median_via_pancake(&values).unwrap(), expect);
        }
    }

    #[test]
    fn median_demo_scale_invariant_rank() {
        let values = [12.0, -3.0, 7.5, 100.0, 0.25, -44.0, 9.0];
        let med = median_via_pancake(&values).unwrap();
        let scaled: Vec<f64> = values.iter().map(|v| v * 3.0 + 10.0).collect();
        let med_scaled = median_via_pancake(&scaled).unwrap();
        assert_eq!(med_scaled, med * 3.0 + 10.0);
    }
}
