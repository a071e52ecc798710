//! SVG drawing of a lattice code. X checks are red and Z checks blue; full
//! (bulk) checks are drawn deep and truncated (boundary) checks light. An
//! optional operator is overlaid as thick edges.

use std::fmt::Write as _;

use anyhow::{bail, Result};

use planar_qldpc::lattice::{EdgeId, EdgeKind};
use planar_qldpc::{BitMatrix, BitVec, CssCode, Pauli, QubitLabel};

const S: f64 = 40.0;
const PAD: f64 = 30.0;

pub struct Overlay<'a> {
    pub pauli: Pauli,
    pub support: &'a BitVec,
}

fn color(p: Pauli, bulk: bool) -> &'static str {
    match (p, bulk) {
        (Pauli::X, true) => "#c0392b",
        (Pauli::X, false) => "#f5b7b1",
        (Pauli::Z, true) => "#1f4e9c",
        (Pauli::Z, false) => "#aed6f1",
    }
}

fn endpoints(e: EdgeId) -> ((f64, f64), (f64, f64)) {
    let (i, j) = (e.i as f64, e.j as f64);
    match e.kind {
        EdgeKind::H => ((i, j), (i + 1.0, j)),
        EdgeKind::V => ((i, j), (i, j + 1.0)),
    }
}

pub fn render(code: &CssCode, overlay: Option<Overlay<'_>>) -> Result<String> {
    let mut edges = Vec::with_capacity(code.n());
    for l in code.labels() {
        match l {
            QubitLabel::Edge(e) => edges.push(*e),
            QubitLabel::Index(_) => bail!("only lattice codes (edge labels) can be rendered"),
        }
    }
    let (mut xmax, mut ymax) = (1.0f64, 1.0f64);
    let (mut xmin, mut ymin) = (0.0f64, 0.0f64);
    for e in &edges {
        let (a, b) = endpoints(*e);
        xmax = xmax.max(b.0);
        ymax = ymax.max(b.1);
        xmin = xmin.min(a.0);
        ymin = ymin.min(a.1);
    }
    // j grows upwards on the lattice, downwards in SVG.
    let px = |x: f64| PAD + (x - xmin) * S;
    let py = |y: f64| PAD + (ymax - y) * S;
    let (w, h) = (2.0 * PAD + (xmax - xmin) * S, 2.0 * PAD + (ymax - ymin) * S);
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#)?;
    writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##)?;
    for e in &edges {
        let (a, b) = endpoints(*e);
        writeln!(s, r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#888" stroke-width="1.5"/>"##, px(a.0), py(a.1), px(b.0), py(b.1))?;
    }
    let mid = |q: usize| {
        let (a, b) = endpoints(edges[q]);
        ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0)
    };
    let bulk_weight = code.max_check_weight();
    for (p, m) in [(Pauli::X, code.hx()), (Pauli::Z, code.hz())] {
        draw_checks(&mut s, p, m, bulk_weight, &mid, &px, &py)?;
    }
    if let Some(o) = overlay {
        let c = color(o.pauli, true);
        for q in o.support.ones() {
            let (a, b) = endpoints(edges[q]);
            writeln!(s, r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{c}" stroke-width="6" stroke-linecap="round"/>"#, px(a.0), py(a.1), px(b.0), py(b.1))?;
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn draw_checks(
    s: &mut String,
    p: Pauli,
    m: &BitMatrix,
    bulk_weight: usize,
    mid: &dyn Fn(usize) -> (f64, f64),
    px: &dyn Fn(f64) -> f64,
    py: &dyn Fn(f64) -> f64,
) -> Result<()> {
    for r in 0..m.rows() {
        let pts: Vec<(f64, f64)> = m.row_ones(r).map(mid).collect();
        if pts.is_empty() {
            continue;
        }
        let c = color(p, pts.len() == bulk_weight);
        let cx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
        let cy = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
        for q in &pts {
            writeln!(s, r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{c}" stroke-opacity="0.35" stroke-width="1"/>"#, px(cx), py(cy), px(q.0), py(q.1))?;
        }
        writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="4" fill="{c}"><title>{p} check {r}</title></circle>"#, px(cx), py(cy))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use planar_qldpc::lattice::find_family;

    #[test]
    fn renders_both_check_types_and_overlay() {
        let fam = find_family("k8-288").unwrap();
        let lc = planar_qldpc::build_open_code(&fam, 6, 6, &Default::default()).unwrap();
        let (x, _) = lc.code.logical_basis().remove(0);
        let svg = render(&lc.code, Some(Overlay { pauli: Pauli::X, support: &x })).unwrap();
        assert!(svg.starts_with("<svg"));
        for c in ["#c0392b", "#f5b7b1", "#1f4e9c", "#aed6f1"] {
            assert!(svg.contains(c), "missing {c}");
        }
        assert!(svg.contains(r#"stroke-width="6""#));
    }
}
