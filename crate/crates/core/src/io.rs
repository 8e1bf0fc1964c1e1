//! CSV readers and writers for curves, estimates, warps and scores.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a value
//! read back parses to the same bits and repeated runs produce identical
//! bytes.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::curves::{CurveBundle, Grid, SampledCurve};
use crate::equity::{PairTest, RescaledScore, ScoreTable};
use crate::error::{Error, Result};
use crate::estimators::ConfidenceBand;
use crate::simulate::WarpSample;

/// A curve bundle together with the ids it was read under.
#[derive(Clone, Debug)]
pub struct LabeledBundle {
    pub ids: Vec<String>,
    pub bundle: CurveBundle,
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => Error::Parse {
            line,
            msg: format!("{kind:?}"),
        },
    }
}

fn reader<R: Read>(input: R, expected: &[&str]) -> Result<csv::Reader<R>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = rdr.headers().map_err(csv_error)?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            msg: format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    Ok(rdr)
}

fn field(rec: &csv::StringRecord, k: usize, line: u64) -> Result<&str> {
    rec.get(k).ok_or_else(|| Error::Parse {
        line,
        msg: format!("missing column {}", k + 1),
    })
}

fn parse_f64(s: &str, line: u64, what: &str) -> Result<f64> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Parse {
            line,
            msg: format!("{what} `{s}` is not a finite number"),
        }),
    }
}

/// Reads a long-format `curve_id,t,y` bundle. Rows of one curve must be
/// contiguous and in increasing `t`; curves keep their order of appearance.
pub fn read_bundle<R: Read>(input: R) -> Result<LabeledBundle> {
    let mut rdr = reader(input, &["curve_id", "t", "y"])?;
    let mut ids: Vec<String> = Vec::new();
    let mut rows: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    let mut first_line: Vec<u64> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line());
        let id = field(&rec, 0, line)?;
        let t = parse_f64(field(&rec, 1, line)?, line, "t")?;
        let y = parse_f64(field(&rec, 2, line)?, line, "y")?;
        if ids.last().map(String::as_str) != Some(id) {
            if ids.iter().any(|s| s == id) {
                return Err(Error::Parse {
                    line,
                    msg: format!("rows of curve `{id}` are not contiguous"),
                });
            }
            ids.push(id.to_string());
            rows.push((Vec::new(), Vec::new()));
            first_line.push(line);
        }
        let (ts, ys) = rows.last_mut().expect("pushed above");
        if ts.last().is_some_and(|&prev| t <= prev) {
            return Err(Error::Parse {
                line,
                msg: format!("t must be strictly increasing within curve `{id}`"),
            });
        }
        ts.push(t);
        ys.push(y);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "no data rows".into(),
        });
    }
    let curves = rows
        .into_iter()
        .zip(&first_line)
        .map(|((ts, ys), &line)| {
            let grid = Grid::new(ts).map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
            SampledCurve::new(grid, ys)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LabeledBundle {
        ids,
        bundle: CurveBundle::new(curves)?,
    })
}

fn writer<W: Write>(out: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(header).map_err(csv_error)?;
    Ok(w)
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush()?;
    Ok(())
}

/// Writes a bundle in long format; `ids` defaults to `0..m`.
pub fn write_bundle<W: Write>(out: W, ids: Option<&[String]>, bundle: &CurveBundle) -> Result<()> {
    let mut w = writer(out, &["curve_id", "t", "y"])?;
    for (i, c) in bundle.curves().iter().enumerate() {
        let id = ids.map_or_else(|| i.to_string(), |ids| ids[i].clone());
        for (t, y) in c.times().iter().zip(c.values()) {
            w.write_record([id.clone(), t.to_string(), y.to_string()])
                .map_err(csv_error)?;
        }
    }
    finish(w)
}

/// Writes `x,value` pairs.
pub fn write_xy<W: Write>(out: W, xs: &[f64], values: &[f64]) -> Result<()> {
    let mut w = writer(out, &["x", "value"])?;
    for (x, v) in xs.iter().zip(values) {
        w.write_record([x.to_string(), v.to_string()])
            .map_err(csv_error)?;
    }
    finish(w)
}

/// Writes `x,center,lower,upper,variance`.
pub fn write_band<W: Write>(out: W, band: &ConfidenceBand) -> Result<()> {
    let mut w = writer(out, &["x", "center", "lower", "upper", "variance"])?;
    for k in 0..band.abscissae.len() {
        w.write_record([
            band.abscissae[k].to_string(),
            band.center[k].to_string(),
            band.lower[k].to_string(),
            band.upper[k].to_string(),
            band.variance[k].to_string(),
        ])
        .map_err(csv_error)?;
    }
    finish(w)
}

/// Writes `t,warp,lower,upper` from a warp band.
pub fn write_warp<W: Write>(out: W, band: &ConfidenceBand) -> Result<()> {
    let mut w = writer(out, &["t", "warp", "lower", "upper"])?;
    for k in 0..band.abscissae.len() {
        w.write_record([
            band.abscissae[k].to_string(),
            band.center[k].to_string(),
            band.lower[k].to_string(),
            band.upper[k].to_string(),
        ])
        .map_err(csv_error)?;
    }
    finish(w)
}

/// Writes simulated warps sampled on `grid` as `curve_id,t,h`.
pub fn write_warps<W: Write>(out: W, warps: &[WarpSample], grid: &Grid) -> Result<()> {
    let mut w = writer(out, &["curve_id", "t", "h"])?;
    for (i, h) in warps.iter().enumerate() {
        for &t in grid.points() {
            w.write_record([i.to_string(), t.to_string(), h.eval(t).to_string()])
                .map_err(csv_error)?;
        }
    }
    finish(w)
}

/// Reads `curve_id,t,h` back into per-curve `(t, h)` samples.
pub fn read_warps<R: Read>(input: R) -> Result<Vec<(String, Vec<(f64, f64)>)>> {
    let mut rdr = reader(input, &["curve_id", "t", "h"])?;
    let mut out: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line());
        let id = field(&rec, 0, line)?;
        let t = parse_f64(field(&rec, 1, line)?, line, "t")?;
        let h = parse_f64(field(&rec, 2, line)?, line, "h")?;
        match out.last_mut() {
            Some((last, pts)) if last == id => pts.push((t, h)),
            _ => out.push((id.to_string(), vec![(t, h)])),
        }
    }
    Ok(out)
}

/// Reads `group_id,score`.
pub fn read_scores<R: Read>(input: R) -> Result<ScoreTable> {
    let mut rdr = reader(input, &["group_id", "score"])?;
    let mut groups: BTreeMap<String, Vec<u32>> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line());
        let id = field(&rec, 0, line)?;
        let raw = field(&rec, 1, line)?;
        let score = raw
            .parse::<u32>()
            .ok()
            .filter(|&s| s <= crate::equity::MAX_SCORE)
            .ok_or_else(|| Error::Parse {
                line,
                msg: format!("score `{raw}` is not an integer in [0, 20]"),
            })?;
        groups.entry(id.to_string()).or_default().push(score);
    }
    if groups.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "no data rows".into(),
        });
    }
    ScoreTable::new(groups)
}

/// Writes `group_i,group_j,D_n,df,p_value,reject_at_0.05`.
pub fn write_pair_tests<W: Write>(out: W, tests: &[PairTest]) -> Result<()> {
    let mut w = writer(
        out,
        &[
            "group_i",
            "group_j",
            "D_n",
            "df",
            "p_value",
            "reject_at_0.05",
        ],
    )?;
    for t in tests {
        w.write_record([
            t.group_i.clone(),
            t.group_j.clone(),
            t.result.statistic.to_string(),
            t.result.df.to_string(),
            t.result.p_value.to_string(),
            t.result.rejects(0.05).to_string(),
        ])
        .map_err(csv_error)?;
    }
    finish(w)
}

/// Writes `group_id,raw_score,structural_score,structural_score_int`.
pub fn write_rescaled<W: Write>(
    out: W,
    rescaled: &BTreeMap<String, Vec<RescaledScore>>,
) -> Result<()> {
    let mut w = writer(
        out,
        &[
            "group_id",
            "raw_score",
            "structural_score",
            "structural_score_int",
        ],
    )?;
    for (id, scores) in rescaled {
        for s in scores {
            w.write_record([
                id.clone(),
                s.raw.to_string(),
                s.structural.to_string(),
                s.structural_int.to_string(),
            ])
            .map_err(csv_error)?;
        }
    }
    finish(w)
}

/// Writes `bandwidth,criterion,error` for a bandwidth search; exactly one
/// of the last two columns is filled.
pub fn write_criteria<W: Write>(
    out: W,
    criteria: &[(f64, std::result::Result<f64, String>)],
) -> Result<()> {
    let mut w = writer(out, &["bandwidth", "criterion", "error"])?;
    for (nu, c) in criteria {
        let (value, err) = match c {
            Ok(v) => (v.to_string(), String::new()),
            Err(e) => (String::new(), e.clone()),
        };
        w.write_record([nu.to_string(), value, err])
            .map_err(csv_error)?;
    }
    finish(w)
}

/// One row of a Monte Carlo summary.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub experiment: String,
    pub metric: String,
    pub value: f64,
    /// Human-readable threshold, e.g. `< 0.05` or `[0.88, 0.99]`.
    pub threshold: String,
    pub pass: bool,
}

/// Writes `experiment,metric,value,threshold,pass`.
pub fn write_summary<W: Write>(out: W, rows: &[SummaryRow]) -> Result<()> {
    let mut w = writer(out, &["experiment", "metric", "value", "threshold", "pass"])?;
    for r in rows {
        w.write_record([
            r.experiment.clone(),
            r.metric.clone(),
            r.value.to_string(),
            r.threshold.clone(),
            r.pass.to_string(),
        ])
        .map_err(csv_error)?;
    }
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundle_round_trip_is_exact() {
        let g = Grid::equispaced(0.0, 1.0, 7).unwrap();
        let vals: Vec<Vec<f64>> = (1..4)
            .map(|k| {
                g.points()
                    .iter()
                    .map(|t| (k as f64 * t).sin() / 3.0)
                    .collect()
            })
            .collect();
        let b = CurveBundle::from_values(&g, vals).unwrap();
        let mut buf = Vec::new();
        write_bundle(&mut buf, None, &b).unwrap();
        let back = read_bundle(buf.as_slice()).unwrap();
        assert_eq!(back.ids, vec!["0", "1", "2"]);
        assert_eq!(back.bundle.curves(), b.curves());
        assert!(back.bundle.common_grid().is_some());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "curve_id,t,y\na,0,0\na,1,oops\n";
        match read_bundle(bad.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let split = "curve_id,t,y\na,0,0\na,1,1\nb,0,0\nb,1,1\na,2,2\n";
        match read_bundle(split.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("{other:?}"),
        }
        let unsorted = "curve_id,t,y\na,0,0\na,0,1\n";
        assert!(matches!(
            read_bundle(unsorted.as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            read_bundle("id,t,y\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            read_bundle("curve_id,t,y\n".as_bytes()),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn scores_round_trip() {
        let csv = "group_id,score\nb,3\na,20\nb,0\na,7\n";
        let t = read_scores(csv.as_bytes()).unwrap();
        assert_eq!(t.groups()["a"], vec![20, 7]);
        assert_eq!(t.groups()["b"], vec![3, 0]);
        assert!(matches!(
            read_scores("group_id,score\na,21\n".as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(read_scores("group_id,score\na,-1\n".as_bytes()).is_err());
    }

    #[test]
    fn warps_round_trip() {
        let g = Grid::equispaced(0.0, 1.0, 4).unwrap();
        let w = vec![
            WarpSample::identity(),
            WarpSample::identity().compose_two_piece(0.5, 0.4),
        ];
        let mut buf = Vec::new();
        write_warps(&mut buf, &w, &g).unwrap();
        let back = read_warps(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[1].1[2], (0.5, 0.4));
    }
}
