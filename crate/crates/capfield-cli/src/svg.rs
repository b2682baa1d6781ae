//! Hand-rolled SVG plot of a spectrum run: dim against beta with the d - beta
//! reference line.

use capfield::pipeline::SpectrumRun;
use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 440.0;
const ML: f64 = 62.0;
const MR: f64 = 22.0;
const MT: f64 = 24.0;
const MB: f64 = 52.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn x(&self, beta: f64) -> f64 {
        ML + (beta - self.x0) / (self.x1 - self.x0) * (W - ML - MR)
    }

    fn y(&self, dim: f64) -> f64 {
        H - MB - (dim - self.y0) / (self.y1 - self.y0) * (H - MT - MB)
    }
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() {
        "0".into()
    } else {
        s.into()
    }
}

pub fn spectrum_plot(run: &SpectrumRun) -> String {
    let d = run.d as f64;
    let betas: Vec<f64> = run.rows.iter().map(|r| r.beta).collect();
    let lo = betas.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = betas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (x0, x1) = if lo < hi { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
    let top = run
        .rows
        .iter()
        .map(|r| r.dim)
        .fold(d, f64::max);
    let frame = Frame {
        x0,
        x1,
        y0: 0.0,
        y1: top * 1.05 + 1e-9,
    };

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\" \
         font-family=\"sans-serif\" font-size=\"12\">\n\
         <desc>capfield spectrum config={}</desc>\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n",
        run.config_hash,
    );

    // axes with ticks
    let _ = write!(
        svg,
        "<line x1=\"{ML}\" y1=\"{y}\" x2=\"{x}\" y2=\"{y}\" stroke=\"black\"/>\n\
         <line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{y}\" stroke=\"black\"/>\n",
        x = W - MR,
        y = H - MB,
    );
    let xticks = if betas.len() <= 13 && betas.len() >= 2 {
        betas.clone()
    } else {
        (0..=5).map(|k| x0 + k as f64 * (x1 - x0) / 5.0).collect()
    };
    for t in &xticks {
        let x = frame.x(*t);
        let _ = write!(
            svg,
            "<line x1=\"{x:.1}\" y1=\"{y0}\" x2=\"{x:.1}\" y2=\"{y1}\" stroke=\"black\"/>\n\
             <text x=\"{x:.1}\" y=\"{ty}\" text-anchor=\"middle\">{}</text>\n",
            tick_label(*t),
            y0 = H - MB,
            y1 = H - MB + 5.0,
            ty = H - MB + 18.0,
        );
    }
    for k in 0..=5 {
        let v = frame.y0 + k as f64 * (frame.y1 - frame.y0) / 5.0;
        let y = frame.y(v);
        let _ = write!(
            svg,
            "<line x1=\"{x0}\" y1=\"{y:.1}\" x2=\"{ML}\" y2=\"{y:.1}\" stroke=\"black\"/>\n\
             <line x1=\"{ML}\" y1=\"{y:.1}\" x2=\"{x1}\" y2=\"{y:.1}\" stroke=\"#ddd\"/>\n\
             <text x=\"{tx}\" y=\"{ty:.1}\" text-anchor=\"end\">{}</text>\n",
            tick_label(v),
            x0 = ML - 5.0,
            x1 = W - MR,
            tx = ML - 8.0,
            ty = y + 4.0,
        );
    }
    let _ = write!(
        svg,
        "<text x=\"{cx:.1}\" y=\"{by}\" text-anchor=\"middle\">beta</text>\n\
         <text x=\"16\" y=\"{cy:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {cy:.1})\">dim</text>\n",
        cx = (ML + W - MR) / 2.0,
        by = H - 14.0,
        cy = (MT + H - MB) / 2.0,
    );

    // d - beta reference, clipped to dim >= 0
    let ref_hi = x1.min(d);
    if ref_hi > x0 {
        let _ = write!(
            svg,
            "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" \
             stroke=\"#c33\" stroke-dasharray=\"6 4\"/>\n",
            frame.x(x0),
            frame.y(d - x0),
            frame.x(ref_hi),
            frame.y(d - ref_hi),
        );
    }

    // measured spectrum; degenerate level sets drawn hollow
    let path: Vec<String> = run
        .rows
        .iter()
        .map(|r| format!("{:.1},{:.1}", frame.x(r.beta), frame.y(r.dim)))
        .collect();
    let _ = write!(
        svg,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#226\" stroke-width=\"1.5\"/>\n",
        path.join(" "),
    );
    for r in &run.rows {
        let _ = write!(
            svg,
            "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3.5\" stroke=\"#226\" fill=\"{}\"/>\n",
            frame.x(r.beta),
            frame.y(r.dim),
            if r.degenerate { "white" } else { "#226" },
        );
    }

    // legend
    let lx = W - MR - 170.0;
    let _ = write!(
        svg,
        "<line x1=\"{lx}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y1}\" stroke=\"#226\" stroke-width=\"1.5\"/>\n\
         <text x=\"{tx}\" y=\"{ty1}\">measured dim</text>\n\
         <line x1=\"{lx}\" y1=\"{y2}\" x2=\"{x2}\" y2=\"{y2}\" stroke=\"#c33\" stroke-dasharray=\"6 4\"/>\n\
         <text x=\"{tx}\" y=\"{ty2}\">d - beta reference</text>\n",
        x2 = lx + 26.0,
        tx = lx + 32.0,
        y1 = MT + 10.0,
        ty1 = MT + 14.0,
        y2 = MT + 28.0,
        ty2 = MT + 32.0,
    );

    svg.push_str("</svg>\n");
    svg
}
