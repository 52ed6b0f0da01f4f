//! Instance file parsing and result-record serialization.
//!
//! Instance files are CSV (one point per line, comma-separated coordinates)
//! or JSON (`{"dimension": d, "points": [[...], ...]}`, or
//! `{"sets": [[[...]], ...]}` for multi-set inputs). Format is sniffed from
//! the content: a leading `{` means JSON.
//!
//! Result records are written by hand so every float is emitted with 17
//! significant digits, which round-trips double precision exactly; `verify`
//! must be able to reproduce the solver's classification from the file.

use anyhow::{anyhow, bail, Context, Result};
use pancake::geometry::{CutLine, OrthoCut, PointSet2D, QuadrantCounts, QuadrantConvention};
use pancake::highdim::{OrthoFrame, PointSetND};
use pancake::solver::SolveStats;
use serde::Deserialize;

/// A parsed instance: either one planar set, one d-dimensional set, or a
/// list of d-dimensional sets.
#[derive(Debug)]
pub enum Instance {
    Planar(PointSet2D),
    Single(PointSetND),
    Sets(Vec<PointSetND>),
}

pub fn parse_instance(text: &str, origin: &str) -> Result<Instance> {
    if text.trim_start().starts_with('{') {
        parse_json_instance(text, origin)
    } else {
        parse_csv_instance(text, origin)
    }
}

fn parse_csv_instance(text: &str, origin: &str) -> Result<Instance> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut arity: Option<usize> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for field in line.split(',') {
            let value: f64 = field
                .trim()
                .parse()
                .map_err(|_| anyhow!("{origin}:{}: invalid number {:?}", lineno + 1, field.trim()))?;
            if !value.is_finite() {
                bail!("{origin}:{}: non-finite coordinate", lineno + 1);
            }
            row.push(value);
        }
        match arity {
            None => arity = Some(row.len()),
            Some(a) if a != row.len() => {
                bail!(
                    "{origin}:{}: row has {} coordinates, expected {}",
                    lineno + 1,
                    row.len(),
                    a
                );
            }
            _ => {}
        }
        rows.push(row);
    }
    let arity = arity.ok_or_else(|| anyhow!("{origin}: no data rows"))?;
    if arity < 2 {
        bail!("{origin}: rows must have at least two coordinates");
    }
    if arity == 2 {
        Ok(Instance::Planar(PointSet2D::from_coords(
            &rows.iter().map(|r| (r[0], r[1])).collect::<Vec<_>>(),
        )))
    } else {
        Ok(Instance::Single(
            PointSetND::new(arity, rows).map_err(|e| anyhow!("{origin}: {e}"))?,
        ))
    }
}

#[derive(Deserialize)]
struct JsonInstance {
    dimension: Option<usize>,
    points: Option<Vec<Vec<f64>>>,
    sets: Option<Vec<Vec<Vec<f64>>>>,
}

fn parse_json_instance(text: &str, origin: &str) -> Result<Instance> {
    let parsed: JsonInstance =
        serde_json::from_str(text).with_context(|| format!("{origin}: invalid JSON"))?;
    let check_finite = |rows: &[Vec<f64>]| -> Result<()> {
        for row in rows {
            if row.iter().any(|v| !v.is_finite()) {
                bail!("{origin}: non-finite coordinate");
            }
        }
        Ok(())
    };
    if let Some(sets) = parsed.sets {
        let mut out = Vec::new();
        for rows in sets {
            check_finite(&rows)?;
            let dim = parsed
                .dimension
                .or_else(|| rows.first().map(|r| r.len()))
                .ok_or_else(|| anyhow!("{origin}: empty set"))?;
            out.push(PointSetND::new(dim, rows).map_err(|e| anyhow!("{origin}: {e}"))?);
        }
        if out.is_empty() {
            bail!("{origin}: \"sets\" is empty");
        }
        return Ok(Instance::Sets(out));
    }
    let points = parsed
        .points
        .ok_or_else(|| anyhow!("{origin}: JSON needs \"points\" or \"sets\""))?;
    check_finite(&points)?;
    let dim = parsed
        .dimension
        .or_else(|| points.first().map(|r| r.len()))
        .ok_or_else(|| anyhow!("{origin}: empty point list"))?;
    if dim == 2 {
        let coords: Vec<(f64, f64)> = points
            .iter()
            .map(|r| {
                if r.len() == 2 {
                    Ok((r[0], r[1]))
                } else {
                    Err(anyhow!("{origin}: point arity {} != 2", r.len()))
                }
            })
            .collect::<Result<_>>()?;
        Ok(Instance::Planar(PointSet2D::from_coords(&coords)))
    } else {
        Ok(Instance::Single(
            PointSetND::new(dim, points).map_err(|e| anyhow!("{origin}: {e}"))?,
        ))
    }
}

/// 17 significant digits: round-trip exact for doubles.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn line_json(line: &CutLine) -> String {
    match line {
        CutLine::Slanted { slope, intercept } => format!(
            "{{\"slope\":{},\"intercept\":{}}}",
            fmt_f64(*slope),
            fmt_f64(*intercept)
        ),
        CutLine::Vertical { x } => format!("{{\"slope\":null,\"x\":{}}}", fmt_f64(*x)),
    }
}

pub fn cut_json(cut: &OrthoCut) -> String {
    format!(
        "{{\"phi\":{},\"line1\":{},\"line2\":{}}}",
        fmt_f64(cut.phi),
        line_json(&cut.line1),
        line_json(&cut.line2)
    )
}

pub fn counts_json(c: &QuadrantCounts) -> String {
    format!(
        "{{\"q1\":{},\"q2\":{},\"q3\":{},\"q4\":{},\"on1\":{},\"on2\":{},\"on_both\":{}}}",
        c.q1, c.q2, c.q3, c.q4, c.on1, c.on2, c.on_both
    )
}

pub fn stats_json(s: &SolveStats) -> String {
    format!(
        "{{\"phases\":{},\"retries\":{},\"comparisons\":{},\"elapsed_ns\":{}}}",
        s.phases, s.retries, s.comparisons, s.elapsed_ns
    )
}

pub fn frame_json(frame: &OrthoFrame) -> String {
    let normals: Vec<String> = frame
        .hyperplanes
        .iter()
        .map(|h| {
            let comps: Vec<String> = h.normal.iter().map(|v| fmt_f64(*v)).collect();
            format!("[{}]", comps.join(","))
        })
        .collect();
    let offsets: Vec<String> = frame
        .hyperplanes
        .iter()
        .map(|h| fmt_f64(h.offset))
        .collect();
    format!(
        "{{\"normals\":[{}],\"offsets\":[{}]}}",
        normals.join(","),
        offsets.join(",")
    )
}

/// Full result record for the planar commands.
pub fn result_record_2d(
    status: &str,
    cut: Option<&OrthoCut>,
    counts: Option<&QuadrantCounts>,
    n: usize,
    seed: u64,
    stats: &SolveStats,
) -> String {
    let cut_field = cut.map_or_else(|| "null".to_string(), cut_json);
    let counts_field = counts.map_or_else(|| "null".to_string(), counts_json);
    format!(
        "{{\"status\":\"{status}\",\"cut\":{cut_field},\"counts\":{counts_field},\"n\":{n},\"seed\":{seed},\"stats\":{}}}",
        stats_json(stats)
    )
}

/// Result record for the high-dimensional commands: the cut is replaced by
/// hyperplane normals and offsets.
pub fn result_record_nd(
    status: &str,
    frame: Option<&OrthoFrame>,
    counts: Option<&QuadrantCounts>,
    n: usize,
    seed: u64,
    stats: &SolveStats,
) -> String {
    let cut_field = frame.map_or_else(|| "null".to_string(), frame_json);
    let counts_field = counts.map_or_else(|| "null".to_string(), counts_json);
    format!(
        "{{\"status\":\"{status}\",\"cut\":{cut_field},\"counts\":{counts_field},\"n\":{n},\"seed\":{seed},\"stats\":{}}}",
        stats_json(stats)
    )
}

pub fn error_record(status: &str, message: &str, n: usize, seed: u64) -> String {
    format!(
        "{{\"status\":\"{status}\",\"message\":{},\"cut\":null,\"counts\":null,\"n\":{n},\"seed\":{seed},\"stats\":null}}",
        serde_json::to_string(message).unwrap_or_else(|_| "\"\"".into())
    )
}

#[derive(Deserialize)]
struct LineJson {
    slope: Option<f64>,
    intercept: Option<f64>,
    x: Option<f64>,
}

#[derive(Deserialize)]
struct CutJson {
    phi: Option<f64>,
    line1: LineJson,
    line2: LineJson,
}

#[derive(Deserialize)]
struct RecordJson {
    cut: Option<CutJson>,
}

fn line_from_json(l: &LineJson, which: &str) -> Result<CutLine> {
    match (l.slope, l.intercept, l.x) {
        (Some(s), Some(c), _) => Ok(CutLine::Slanted {
            slope: s,
            intercept: c,
        }),
        (None, _, Some(x)) => Ok(CutLine::Vertical { x }),
        _ => bail!("{which}: need either slope+intercept or slope:null with x"),
    }
}

/// Parses a cut from JSON: either a bare cut object or a whole result record
/// containing one.
pub fn parse_cut_json(text: &str) -> Result<OrthoCut> {
    let cut: CutJson = match serde_json::from_str::<CutJson>(text) {
        Ok(c) => c,
        Err(_) => {
            let record: RecordJson =
                serde_json::from_str(text).context("cut JSON matches neither a cut object nor a result record")?;
            record.cut.ok_or_else(|| anyhow!("record has no cut"))?
        }
    };
    let line1 = line_from_json(&cut.line1, "line1")?;
    let line2 = line_from_json(&cut.line2, "line2")?;
    let first_quadrant = match (&line1, &line2) {
        (CutLine::Slanted { .. }, CutLine::Slanted { .. }) => QuadrantConvention::AboveBothLines,
        _ => QuadrantConvention::UpperRightAxis,
    };
    let phi = cut.phi.unwrap_or(match &line1 {
        CutLine::Slanted { slope, .. } => slope.atan(),
        CutLine::Vertical { .. } => std::f64::consts::FRAC_PI_2,
    });
    Ok(OrthoCut {
        phi,
        line1,
        line2,
        first_quadrant,
    })
}

/// CSV serialization of a planar point set, matching `fmt_f64` precision.
pub fn points_to_csv(ps: &PointSet2D) -> String {
    let mut out = String::new();
    for p in ps.points() {
        out.push_str(&fmt_f64(p.x));
        out.push(',');
        out.push_str(&fmt_f64(p.y));
        out.push('\n');
    }
    out
}
