//! DOT export with a bipartite layout, edge-color classes, and optional
//! fold annotations.

use cutperc_core::{ColoredBigraph, Fold};

/// The color cycle for edge classes.
const PALETTE: [&str; 8] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
];

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Render a colored bigraph; when a fold is given, its cut is
/// double-bordered and the two sides are shaded.
pub fn export_dot(h: &ColoredBigraph, fold: Option<&Fold>) -> String {
    let graph = h.graph();
    let mut out = String::from("graph bigraph {\n  rankdir=LR;\n  node [style=filled, fillcolor=white];\n");
    out.push_str("  { rank=min;");
    for v in graph.left_vertices() {
        out.push(' ');
        out.push_str(&quote(graph.label(v)));
        out.push(';');
    }
    out.push_str(" }\n  { rank=max;");
    for v in graph.right_vertices() {
        out.push(' ');
        out.push_str(&quote(graph.label(v)));
        out.push(';');
    }
    out.push_str(" }\n");
    for v in graph.vertices() {
        let mut attrs: Vec<String> = Vec::new();
        if let Some(f) = fold {
            if f.fix().contains(&v) {
                attrs.push("peripheries=2".into());
                attrs.push("fillcolor=gold".into());
            } else if f.side().contains(&v) {
                attrs.push("fillcolor=lightgrey".into());
            } else if f.side_image().contains(&v) {
                attrs.push("fillcolor=lightblue".into());
            }
        }
        if !attrs.is_empty() {
            out.push_str(&format!("  {} [{}];\n", quote(graph.label(v)), attrs.join(", ")));
        }
    }
    for (e, &(u, w)) in graph.edges().iter().enumerate() {
        let color_id = h.edge_color(e) as usize;
        let name = h.coloring().color_name(h.edge_color(e));
        out.push_str(&format!(
            "  {} -- {} [color={}, label={}];\n",
            quote(graph.label(u)),
            quote(graph.label(w)),
            quote(PALETTE[color_id % PALETTE.len()]),
            quote(name),
        ));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use cutperc_core::catalog;
    use cutperc_core::fold::enumerate_folds;

    #[test]
    fn single_edge_dot() {
        let h = ColoredBigraph::monochromatic(catalog::star(1).unwrap());
        let dot = export_dot(&h, None);
        assert!(dot.contains("\"u1\" -- \"v1\""));
        assert!(dot.starts_with("graph bigraph {"));
    }

    #[test]
    fn fold_annotation_marks_fix() {
        let g = catalog::star(2).unwrap();
        let folds = enumerate_folds(&g);
        let h = ColoredBigraph::monochromatic(g);
        let dot = export_dot(&h, Some(folds.get(0)));
        assert!(dot.contains("peripheries=2"));
        assert!(dot.contains("fillcolor=lightgrey"));
        assert!(dot.contains("fillcolor=lightblue"));
    }

    #[test]
    fn colors_cycle_deterministically() {
        let g = catalog::even_cycle(3).unwrap();
        let h = ColoredBigraph::rainbow(g);
        let a = export_dot(&h, None);
        let b = export_dot(&h, None);
        assert_eq!(a, b);
        assert!(a.contains(PALETTE[0]));
        assert!(a.contains(PALETTE[5]));
    }
}
