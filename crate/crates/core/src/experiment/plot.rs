//! Static log–log and geometry figures, SVG or PNG by file extension.
//!
//! SVG output carries text labels. PNG output draws marks only and stores
//! the labels in a `tEXt` chunk.

use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use crate::error::{invalid, Error, Result};

use super::fit::{exponent_label, ScalingFit};
use super::sweep::SweepRow;

const W: f64 = 800.0;
const H: f64 = 600.0;
const MARGIN: f64 = 70.0;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Format {
    Svg,
    Png,
}

fn format_of(path: &Path) -> Result<Format> {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .as_deref()
    {
        Some("svg") => Ok(Format::Svg),
        Some("png") => Ok(Format::Png),
        _ => invalid(format!(
            "plot path {} needs a .svg or .png extension",
            path.display()
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Color {
    Black,
    Blue,
    Red,
    Gray,
}

impl Color {
    fn css(self) -> &'static str {
        match self {
            Color::Black => "#000000",
            Color::Blue => "#1f5fbf",
            Color::Red => "#c0392b",
            Color::Gray => "#9a9a9a",
        }
    }

    fn rgb(self) -> [u8; 3] {
        match self {
            Color::Black => [0, 0, 0],
            Color::Blue => [31, 95, 191],
            Color::Red => [192, 57, 43],
            Color::Gray => [154, 154, 154],
        }
    }
}

/// Device-space drawing list.
#[derive(Debug, Default)]
struct Scene {
    lines: Vec<(Vec<(f64, f64)>, Color, bool)>,
    dots: Vec<(f64, f64, Color)>,
    labels: Vec<(f64, f64, String, Color)>,
}

impl Scene {
    fn svg(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        for (pts, c, dashed) in &self.lines {
            let d: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let dash = if *dashed {
                r#" stroke-dasharray="6 4""#
            } else {
                ""
            };
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#,
                d.join(" "),
                c.css()
            );
        }
        for (x, y, c) in &self.dots {
            let _ = writeln!(
                s,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="3.5" fill="{}"/>"#,
                c.css()
            );
        }
        for (x, y, t, c) in &self.labels {
            let _ = writeln!(
                s,
                r#"<text x="{x:.1}" y="{y:.1}" font-family="sans-serif" font-size="14" fill="{}">{}</text>"#,
                c.css(),
                t.replace('&', "&amp;").replace('<', "&lt;")
            );
        }
        s.push_str("</svg>\n");
        s
    }

    fn raster(&self) -> Vec<u8> {
        let (w, h) = (W as usize, H as usize);
        let mut buf = vec![255u8; w * h * 3];
        let mut put = |x: f64, y: f64, c: Color| {
            let (i, j) = (x.round(), y.round());
            if i >= 0.0 && j >= 0.0 && (i as usize) < w && (j as usize) < h {
                let p = (j as usize * w + i as usize) * 3;
                buf[p..p + 3].copy_from_slice(&c.rgb());
            }
        };
        for (pts, c, dashed) in &self.lines {
            let mut run = 0.0;
            for seg in pts.windows(2) {
                let (dx, dy) = (seg[1].0 - seg[0].0, seg[1].1 - seg[0].1);
                let steps = dx.abs().max(dy.abs()).ceil().max(1.0) as usize;
                for s in 0..=steps {
                    let t = s as f64 / steps as f64;
                    run += 1.0;
                    if !dashed || (run % 10.0) < 6.0 {
                        put(seg[0].0 + t * dx, seg[0].1 + t * dy, *c);
                    }
                }
            }
        }
        for &(x, y, c) in &self.dots {
            for i in -3..=3 {
                for j in -3..=3 {
                    if i * i + j * j <= 10 {
                        put(x + i as f64, y + j as f64, c);
                    }
                }
            }
        }
        buf
    }

    fn write(&self, path: &Path) -> Result<()> {
        match format_of(path)? {
            Format::Svg => std::fs::write(path, self.svg())?,
            Format::Png => {
                let file = BufWriter::new(File::create(path)?);
                let mut enc = png::Encoder::new(file, W as u32, H as u32);
                enc.set_color(png::ColorType::Rgb);
                enc.set_depth(png::BitDepth::Eight);
                let text: Vec<String> = self.labels.iter().map(|l| l.2.clone()).collect();
                let png_err = |e: png::EncodingError| Error::Format(format!("png: {e}"));
                enc.add_text_chunk("Comment".into(), text.join("; "))
                    .map_err(png_err)?;
                let mut wr = enc.write_header().map_err(png_err)?;
                wr.write_image_data(&self.raster()).map_err(png_err)?;
            }
        }
        Ok(())
    }
}

/// Maps data coordinates into the plot frame.
struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn fit(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let span = |v: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
                (a.min(x), b.max(x))
            });
            let pad = ((hi - lo) * 0.05).max(1e-9);
            (lo - pad, hi + pad)
        };
        Self {
            x: span(&mut xs.clone()),
            y: span(&mut ys.clone()),
        }
    }

    fn to_device(&self, x: f64, y: f64) -> (f64, f64) {
        let u = (x - self.x.0) / (self.x.1 - self.x.0);
        let v = (y - self.y.0) / (self.y.1 - self.y.0);
        (
            MARGIN + u * (W - 2.0 * MARGIN),
            H - MARGIN - v * (H - 2.0 * MARGIN),
        )
    }

    fn axes(&self, scene: &mut Scene, xlabel: &str, ylabel: &str) {
        let c = [
            self.to_device(self.x.0, self.y.0),
            self.to_device(self.x.1, self.y.0),
            self.to_device(self.x.1, self.y.1),
            self.to_device(self.x.0, self.y.1),
        ];
        scene
            .lines
            .push((vec![c[0], c[1], c[2], c[3], c[0]], Color::Black, false));
        scene
            .labels
            .push((W / 2.0 - 60.0, H - 20.0, xlabel.into(), Color::Black));
        scene.labels.push((10.0, 30.0, ylabel.into(), Color::Black));
        let ticks =
            |lo: f64, hi: f64| ((lo.ceil() as i64)..=(hi.floor() as i64)).collect::<Vec<_>>();
        for t in ticks(self.x.0, self.x.1) {
            let (px, py) = self.to_device(t as f64, self.y.0);
            scene
                .lines
                .push((vec![(px, py), (px, py - 6.0)], Color::Black, false));
            scene
                .labels
                .push((px - 14.0, py + 20.0, format!("1e{t}"), Color::Black));
        }
        for t in ticks(self.y.0, self.y.1) {
            let (px, py) = self.to_device(self.x.0, t as f64);
            scene
                .lines
                .push((vec![(px, py), (px + 6.0, py)], Color::Black, false));
            scene
                .labels
                .push((px - 52.0, py + 5.0, format!("1e{t}"), Color::Black));
        }
    }
}

/// Log–log scatter of E_total against ε with the fitted line and, when the
/// order is known, the reference slope 2L/(2L+1).
pub fn emit_plot(rows: &[SweepRow], fit: &ScalingFit, path: &Path) -> Result<()> {
    if rows.is_empty() {
        return invalid("no rows to plot");
    }
    let pts: Vec<(f64, f64, bool)> = rows
        .iter()
        .filter(|r| r.epsilon > 0.0 && r.e_total > 0.0)
        .map(|r| (r.epsilon.log10(), r.e_total.log10(), r.flag))
        .collect();
    if pts.is_empty() {
        return invalid("no positive rows to plot");
    }
    let frame = Frame::fit(pts.iter().map(|p| p.0), pts.iter().map(|p| p.1));
    let mut scene = Scene::default();
    frame.axes(&mut scene, "epsilon", "E_eps");
    for &(x, y, flag) in &pts {
        let (px, py) = frame.to_device(x, y);
        scene
            .dots
            .push((px, py, if flag { Color::Gray } else { Color::Black }));
    }
    let (x0, x1) = (
        pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
        pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max),
    );
    let fitted = |x: f64| fit.slope * x + fit.intercept;
    scene.lines.push((
        vec![
            frame.to_device(x0, fitted(x0)),
            frame.to_device(x1, fitted(x1)),
        ],
        Color::Blue,
        false,
    ));
    scene.labels.push((
        MARGIN + 15.0,
        MARGIN + 20.0,
        format!("fitted slope {:.4} (R² {:.4})", fit.slope, fit.r2),
        Color::Blue,
    ));
    if let (Some(l), Some(s)) = (fit.order, fit.theoretical()) {
        let xm = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
        let ym = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
        let r = |x: f64| ym + s * (x - xm);
        scene.lines.push((
            vec![frame.to_device(x0, r(x0)), frame.to_device(x1, r(x1))],
            Color::Red,
            true,
        ));
        scene.labels.push((
            MARGIN + 15.0,
            MARGIN + 40.0,
            format!("reference slope {}", exponent_label(l)),
            Color::Red,
        ));
    }
    scene.write(path)
}

/// Interface curves of a construction on its domain.
pub fn emit_geometry_plot(curves: &[Vec<(f64, f64)>], path: &Path) -> Result<()> {
    if curves.iter().all(|c| c.is_empty()) {
        return invalid("no curves to plot");
    }
    let all = curves.iter().flatten();
    let frame = Frame::fit(all.clone().map(|p| p.0), all.map(|p| p.1));
    let mut scene = Scene::default();
    let c = [
        frame.to_device(frame.x.0, frame.y.0),
        frame.to_device(frame.x.1, frame.y.0),
        frame.to_device(frame.x.1, frame.y.1),
        frame.to_device(frame.x.0, frame.y.1),
    ];
    scene
        .lines
        .push((vec![c[0], c[1], c[2], c[3], c[0]], Color::Gray, false));
    for curve in curves {
        scene.lines.push((
            curve.iter().map(|&(x, y)| frame.to_device(x, y)).collect(),
            Color::Black,
            false,
        ));
    }
    scene.labels.push((
        MARGIN,
        30.0,
        format!("{} interface curves", curves.len()),
        Color::Black,
    ));
    scene.write(path)
}
