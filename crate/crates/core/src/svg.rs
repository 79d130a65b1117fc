//! SVG figures of a result file. Output depends only on the file contents,
//! with fixed-precision coordinates, so it is byte-stable.

use std::fmt::Write;

use crate::compact::Compact;
use crate::error::Result;
use crate::geometry::{BBox, Point2};
use crate::io::{CompactRecord, ResultFile};

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 20.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b",
];

struct Frame {
    bbox: BBox,
    scale: f64,
}

impl Frame {
    fn new(bbox: BBox) -> Self {
        let side = bbox.width().max(bbox.height()).max(1e-9);
        Frame {
            bbox,
            scale: (WIDTH - 2.0 * MARGIN) / side,
        }
    }

    fn x(&self, x: f64) -> f64 {
        MARGIN + (x - self.bbox.min.x) * self.scale
    }

    fn y(&self, y: f64) -> f64 {
        MARGIN + (self.bbox.max.y - y) * self.scale
    }

    fn height(&self) -> f64 {
        2.0 * MARGIN + self.bbox.height() * self.scale
    }
}

fn record_bbox(rec: &CompactRecord) -> Option<BBox> {
    match rec {
        CompactRecord::Points { data } | CompactRecord::Polygon { data } => {
            let pts: Vec<Point2> = data.iter().map(|&[x, y]| Point2::new(x, y)).collect();
            BBox::of_points(&pts)
        }
        CompactRecord::Raster { bbox, .. } => Some(BBox::new(
            Point2::new(bbox[0][0], bbox[0][1]),
            Point2::new(bbox[1][0], bbox[1][1]),
        )),
    }
}

fn draw_record(out: &mut String, fr: &Frame, rec: &CompactRecord, attrs: &str) {
    match rec {
        CompactRecord::Raster { grid, runs, .. } => {
            for &[j, i, n] in runs {
                let x0 = grid.min_corner.x + i as f64 * grid.cell;
                let y1 = grid.min_corner.y + (j + 1) as f64 * grid.cell;
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" {attrs}/>"#,
                    fr.x(x0),
                    fr.y(y1),
                    n as f64 * grid.cell * fr.scale,
                    grid.cell * fr.scale
                );
            }
        }
        CompactRecord::Points { data } => draw_points(out, fr, data, 3.0, attrs),
        CompactRecord::Polygon { data } => draw_path(out, fr, data, attrs),
    }
}

fn draw_points(out: &mut String, fr: &Frame, data: &[[f64; 2]], r: f64, attrs: &str) {
    for &[x, y] in data {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.3}" cy="{:.3}" r="{r:.1}" {attrs}/>"#,
            fr.x(x),
            fr.y(y)
        );
    }
}

fn draw_path(out: &mut String, fr: &Frame, data: &[[f64; 2]], attrs: &str) {
    let mut d = String::new();
    for (k, &[x, y]) in data.iter().enumerate() {
        let _ = write!(
            d,
            "{}{:.3},{:.3} ",
            if k == 0 { "M" } else { "L" },
            fr.x(x),
            fr.y(y)
        );
    }
    if data.len() > 2 {
        d.push('Z');
    }
    let _ = writeln!(out, r#"<path d="{}" {attrs}/>"#, d.trim_end());
}

/// Layers, bottom to top: best maximal compact, class maximal compacts,
/// boundary members, class minimal compacts, best minimal compact.
pub fn render(result: &ResultFile) -> Result<String> {
    let boundary = result.boundary.to_boundary()?;
    let mut bbox = boundary.bbox();
    let records = std::iter::once(&result.best.maximal.compact)
        .chain(result.classes.iter().map(|c| &c.maximal.compact))
        .chain(std::iter::once(&result.best.minimal.compact));
    for rec in records {
        if let Some(b) = record_bbox(rec) {
            bbox = bbox.union(b);
        }
    }
    let pad = 0.05 * bbox.width().max(bbox.height()).max(1e-9);
    let fr = Frame::new(bbox.expand(pad));
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{:.0}" viewBox="0 0 {WIDTH:.0} {:.3}">"#,
        fr.height().ceil(),
        fr.height()
    );
    let _ = writeln!(
        out,
        r##"<rect width="100%" height="100%" fill="#ffffff"/>"##
    );

    out.push_str("<g id=\"maximal\">\n");
    draw_record(
        &mut out,
        &fr,
        &result.best.maximal.compact,
        r##"fill="#c8c8c8""##,
    );
    out.push_str("</g>\n<g id=\"classes\">\n");
    for (k, c) in result.classes.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<g id="class-{k}" fill="{color}" fill-opacity="0.35">"#
        );
        draw_record(&mut out, &fr, &c.maximal.compact, "");
        out.push_str("</g>\n");
    }
    out.push_str("</g>\n<g id=\"boundary\">\n");
    for c in boundary.compacts() {
        match c {
            Compact::Finite(f) => {
                let data: Vec<[f64; 2]> = f.points().iter().map(|p| [p.x, p.y]).collect();
                draw_points(&mut out, &fr, &data, 4.0, r##"fill="#000000""##);
            }
            Compact::Polygon(p) => {
                let data: Vec<[f64; 2]> = p.vertices().iter().map(|p| [p.x, p.y]).collect();
                let attrs = if p.is_segment() {
                    r##"fill="none" stroke="#000000" stroke-width="2""##
                } else {
                    r##"fill="#000000" fill-opacity="0.15" stroke="#000000" stroke-width="1.5""##
                };
                draw_path(&mut out, &fr, &data, attrs);
            }
            Compact::Raster(r) => {
                let rec = CompactRecord::from_compact(&Compact::Raster(r.clone()));
                draw_record(
                    &mut out,
                    &fr,
                    &rec,
                    r##"fill="#000000" fill-opacity="0.5""##,
                );
            }
        }
    }
    out.push_str("</g>\n<g id=\"class-minimal\">\n");
    for (k, c) in result.classes.iter().enumerate() {
        if let CompactRecord::Points { data } = &c.minimal.compact {
            let attrs = format!(
                r##"fill="none" stroke="{}" stroke-width="2""##,
                PALETTE[k % PALETTE.len()]
            );
            draw_points(&mut out, &fr, data, 6.0, &attrs);
        }
    }
    out.push_str("</g>\n<g id=\"minimal\">\n");
    if let CompactRecord::Points { data } = &result.best.minimal.compact {
        draw_points(&mut out, &fr, data, 3.5, r##"fill="#d62728""##);
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}
