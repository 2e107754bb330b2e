//! Information-diagram rendering of an [`AtomTable`].

use std::fmt::Write;

use crate::imeasure::{atom_table, AtomTable};
use crate::source::SourceModel;
use crate::subset::SubsetIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagramFormat {
    /// Three-circle Venn diagram (L = 3 only).
    Svg,
    /// `subset<TAB>I_K` lines.
    Table,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagramDocument {
    pub format: DiagramFormat,
    pub content: String,
    /// True when SVG was requested but the table was produced instead.
    pub fell_back: bool,
}

pub fn diagram(model: &SourceModel, requested: DiagramFormat) -> DiagramDocument {
    render(&atom_table(model), requested)
}

pub fn render(atoms: &AtomTable, requested: DiagramFormat) -> DiagramDocument {
    match requested {
        DiagramFormat::Svg if atoms.num_users() == 3 => DiagramDocument {
            format: DiagramFormat::Svg,
            content: venn_svg(atoms),
            fell_back: false,
        },
        _ => DiagramDocument {
            format: DiagramFormat::Table,
            content: atom_listing(atoms),
            fell_back: requested == DiagramFormat::Svg,
        },
    }
}

pub fn atom_listing(atoms: &AtomTable) -> String {
    let mut out = String::from("subset\tI_K\n");
    for (k, v) in atoms.entries() {
        writeln!(out, "{k}\t{v:.6}").unwrap();
    }
    out
}

const CIRCLES: [(f64, f64); 3] = [(230.0, 200.0), (370.0, 200.0), (300.0, 330.0)];
const RADIUS: f64 = 150.0;
const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

// Label anchor for each atom, indexed by mask 1..=7.
const ANCHORS: [(f64, f64); 7] = [
    (165.0, 170.0), // {1}
    (435.0, 170.0), // {2}
    (300.0, 150.0), // {1,2}
    (300.0, 420.0), // {3}
    (225.0, 285.0), // {1,3}
    (375.0, 285.0), // {2,3}
    (300.0, 240.0), // {1,2,3}
];

fn venn_svg(atoms: &AtomTable) -> String {
    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    svg.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"600\" height=\"520\" viewBox=\"0 0 600 520\">\n",
    );
    svg.push_str("  <rect x=\"0\" y=\"0\" width=\"600\" height=\"520\" fill=\"white\"/>\n");
    for (i, ((cx, cy), color)) in CIRCLES.iter().zip(COLORS).enumerate() {
        writeln!(
            svg,
            "  <circle id=\"W{}\" cx=\"{cx}\" cy=\"{cy}\" r=\"{RADIUS}\" fill=\"{color}\" fill-opacity=\"0.12\" stroke=\"{color}\" stroke-width=\"2\"/>",
            i + 1
        )
        .unwrap();
    }
    let names = [(110.0, 60.0), (490.0, 60.0), (300.0, 508.0)];
    for (i, (x, y)) in names.iter().enumerate() {
        writeln!(
            svg,
            "  <text x=\"{x}\" y=\"{y}\" font-family=\"sans-serif\" font-size=\"18\" text-anchor=\"middle\">W{}</text>",
            i + 1
        )
        .unwrap();
    }
    for mask in 1u32..=7 {
        let k = SubsetIndex::from_mask(mask);
        let (x, y) = ANCHORS[mask as usize - 1];
        writeln!(
            svg,
            "  <text class=\"atom\" data-subset=\"{k}\" x=\"{x}\" y=\"{y}\" font-family=\"monospace\" font-size=\"14\" text-anchor=\"middle\">{:.4}</text>",
            atoms.get(k)
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}
