//! File formats: point-cloud CSV ingestion, Crocker CSV/JSON serialization,
//! and deterministic SVG heatmaps.
//!
//! Point-cloud CSV schema: header `t,id,x0,...,x{d-1}`, one row per point
//! per frame, LF line endings, plain decimal-point reals. Rows may arrive
//! in any order; frames are the distinct `t` values ascending. Serialization
//! normalizes to frames ascending and ids ascending within each frame, so
//! parse-then-serialize is a fixed point.

use crate::diagram::{CrockerDiagram, DiffMap};
use crate::error::{Error, Result};
use crate::geometry::{PointCloudFrame, PointCloudSeries, PointId};

/// Parses the point-cloud CSV schema into a series.
pub fn parse_point_cloud_csv(text: &str) -> Result<PointCloudSeries> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header".into(),
    })?;
    let cols: Vec<&str> = header.trim_end().split(',').collect();
    if cols.len() < 3 || cols[0] != "t" || cols[1] != "id" {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header t,id,x0,... got {header:?}"),
        });
    }
    for (k, c) in cols[2..].iter().enumerate() {
        if *c != format!("x{k}") {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected coordinate column x{k}, got {c:?}"),
            });
        }
    }
    let dim = cols.len() - 2;

    let mut rows: Vec<(f64, PointId, Vec<f64>, usize)> = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dim + 2 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {} fields, got {}", dim + 2, fields.len()),
            });
        }
        let t: f64 = fields[0].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad time value {:?}", fields[0]),
        })?;
        if !t.is_finite() {
            return Err(Error::Parse { line: line_no, message: "non-finite time".into() });
        }
        let id = PointId::new(fields[1]);
        let coords = fields[2..]
            .iter()
            .map(|f| {
                let v: f64 = f.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("bad coordinate {f:?}"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "non-finite coordinate".into(),
                    });
                }
                Ok(v)
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push((t, id, coords, line_no));
    }
    if rows.is_empty() {
        return Err(Error::Parse { line: 1, message: "no data rows".into() });
    }

    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then_with(|| a.1.cmp(&b.1)));
    for w in rows.windows(2) {
        if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
            return Err(Error::Parse {
                line: w[1].3,
                message: format!("duplicate (t, id) = ({}, {})", w[1].0, w[1].1),
            });
        }
    }

    let mut frames = Vec::new();
    let mut start = 0;
    for i in 1..=rows.len() {
        if i == rows.len() || rows[i].0 != rows[start].0 {
            let t = rows[start].0;
            let points = rows[start..i]
                .iter()
                .map(|(_, id, coords, _)| (id.clone(), coords.clone()))
                .collect();
            frames.push(PointCloudFrame::new(frames.len(), t, points, dim)?);
            start = i;
        }
    }
    PointCloudSeries::new(frames)
}

/// Serializes a series to the normalized CSV form.
pub fn serialize_point_cloud_csv(series: &PointCloudSeries) -> String {
    let dim = series.dim();
    let mut out = String::from("t,id");
    for k in 0..dim {
        out.push_str(&format!(",x{k}"));
    }
    out.push('\n');
    for frame in series.frames() {
        let mut order: Vec<usize> = (0..frame.len()).collect();
        order.sort_by(|&a, &b| frame.ids()[a].cmp(&frame.ids()[b]));
        for i in order {
            out.push_str(&format!("{}", frame.time_value()));
            out.push(',');
            out.push_str(frame.ids()[i].as_str());
            for c in &frame.coords()[i] {
                out.push_str(&format!(",{c}"));
            }
            out.push('\n');
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrockerFormat {
    Csv,
    Json,
}

/// Serializes a diagram. CSV: header `scale,<t values>` then one row per
/// threshold ascending. JSON: the full structure including provenance.
pub fn serialize_crocker(diagram: &CrockerDiagram, format: CrockerFormat) -> Result<String> {
    match format {
        CrockerFormat::Json => serde_json::to_string_pretty(diagram)
            .map_err(|e| Error::InvalidParameter(format!("json serialization failed: {e}"))),
        CrockerFormat::Csv => {
            let mut out = String::from("scale");
            for t in &diagram.time_values {
                out.push_str(&format!(",{t}"));
            }
            out.push('\n');
            for (j, eps) in diagram.grid.thresholds().iter().enumerate() {
                out.push_str(&format!("{eps}"));
                for v in &diagram.matrix[j] {
                    out.push_str(&format!(",{v}"));
                }
                out.push('\n');
            }
            Ok(out)
        }
    }
}

pub fn parse_crocker_json(text: &str) -> Result<CrockerDiagram> {
    serde_json::from_str(text)
        .map_err(|e| Error::Parse { line: e.line(), message: format!("bad crocker json: {e}") })
}

/// Heatmap payload: either raw counts or a signed difference map.
pub enum HeatmapData<'a> {
    Counts(&'a CrockerDiagram),
    Diff(&'a DiffMap),
}

const CELL_W: f64 = 14.0;
const CELL_H: f64 = 14.0;
const MARGIN_LEFT: f64 = 56.0;
const MARGIN_BOTTOM: f64 = 36.0;
const MARGIN_TOP: f64 = 10.0;
const MARGIN_RIGHT: f64 = 10.0;

/// Emits a deterministic SVG heatmap: one rectangle per cell, scales on the
/// vertical axis (largest on top), times on the horizontal axis. Counts use
/// a monotone white-to-blue ramp; diffs use red for gains and green for
/// losses.
pub fn emit_heatmap_svg(data: &HeatmapData) -> String {
    let (n_scales, n_times, thresholds, times) = match data {
        HeatmapData::Counts(d) => {
            (d.n_scales(), d.n_times(), d.grid.thresholds(), d.time_values.as_slice())
        }
        HeatmapData::Diff(d) => {
            (d.grid.len(), d.time_values.len(), d.grid.thresholds(), d.time_values.as_slice())
        }
    };
    let width = MARGIN_LEFT + CELL_W * n_times as f64 + MARGIN_RIGHT;
    let height = MARGIN_TOP + CELL_H * n_scales as f64 + MARGIN_BOTTOM;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    let max_abs: f64 = match data {
        HeatmapData::Counts(d) => {
            d.matrix.iter().flatten().copied().max().unwrap_or(0).max(1) as f64
        }
        HeatmapData::Diff(d) => {
            d.values.iter().flatten().map(|v| v.unsigned_abs()).max().unwrap_or(0).max(1) as f64
        }
    };

    for (j, &threshold) in thresholds.iter().enumerate() {
        // row 0 (smallest scale) at the bottom
        let y = MARGIN_TOP + CELL_H * (n_scales - 1 - j) as f64;
        for i in 0..n_times {
            let x = MARGIN_LEFT + CELL_W * i as f64;
            let fill = match data {
                HeatmapData::Counts(d) => {
                    let v = d.matrix[j][i] as f64 / max_abs;
                    let r = (255.0 - 190.0 * v).round() as u8;
                    let g = (255.0 - 150.0 * v).round() as u8;
                    let b = (255.0 - 75.0 * v).round() as u8;
                    format!("rgb({r},{g},{b})")
                }
                HeatmapData::Diff(d) => {
                    let v = d.values[j][i];
                    let s = v.unsigned_abs() as f64 / max_abs;
                    if v > 0 {
                        let gb = (255.0 - 205.0 * s).round() as u8;
                        format!("rgb(255,{gb},{gb})")
                    } else if v < 0 {
                        let rb = (255.0 - 205.0 * s).round() as u8;
                        format!("rgb({rb},255,{rb})")
                    } else {
                        "rgb(255,255,255)".into()
                    }
                }
            };
            svg.push_str(&format!(
                "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{CELL_W:.1}\" height=\"{CELL_H:.1}\" \
                 fill=\"{fill}\" stroke=\"#ccc\" stroke-width=\"0.5\"/>\n"
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"9\" text-anchor=\"end\">{threshold:.3}</text>\n",
            MARGIN_LEFT - 4.0,
            y + CELL_H * 0.7,
        ));
    }
    // sparse time ticks
    let tick_step = (n_times / 8).max(1);
    for (i, t) in times.iter().enumerate().step_by(tick_step) {
        let x = MARGIN_LEFT + CELL_W * (i as f64 + 0.5);
        svg.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{:.1}\" font-size=\"9\" text-anchor=\"middle\">{t:.2}</text>\n",
            MARGIN_TOP + CELL_H * n_scales as f64 + 12.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">t</text>\n",
        MARGIN_LEFT + CELL_W * n_times as f64 / 2.0,
        height - 6.0
    ));
    svg.push_str(&format!(
        "<text x=\"12\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">\u{03b5}</text>\n",
        MARGIN_TOP + CELL_H * n_scales as f64 / 2.0
    ));
    svg.push_str("</svg>\n");
    svg
}
