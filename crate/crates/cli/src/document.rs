//! The on-disk bigraph document: a small JSON schema plus a plain
//! edge-list text format, both parsed into validated core objects.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use cutperc_core::coloring::Coloring;
use cutperc_core::{Bigraph, ColoredBigraph, Flag, LeftColoring};

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

/// A bigraph with optional coloring, left coloring and labeling. Coloring
/// keys are `"left|right"` pairs, which is why vertex labels may not
/// contain `|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BigraphDocument {
    pub format_version: u32,
    pub v1: Vec<String>,
    pub v2: Vec<String>,
    pub edges: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coloring: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left_coloring: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<String>>,
}

impl BigraphDocument {
    pub fn from_graph(graph: &Bigraph) -> Self {
        BigraphDocument {
            format_version: FORMAT_VERSION,
            v1: graph.left_vertices().map(|v| graph.label(v).into()).collect(),
            v2: graph
                .right_vertices()
                .map(|v| graph.label(v).into())
                .collect(),
            edges: graph
                .edges()
                .iter()
                .map(|&(u, w)| (graph.label(u).into(), graph.label(w).into()))
                .collect(),
            coloring: None,
            left_coloring: None,
            theta: None,
        }
    }

    pub fn from_colored(h: &ColoredBigraph) -> Self {
        let graph = h.graph();
        let mut doc = BigraphDocument::from_graph(graph);
        let coloring: BTreeMap<String, String> = graph
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &(u, w))| {
                (
                    format!("{}|{}", graph.label(u), graph.label(w)),
                    h.coloring().color_name(h.edge_color(e)).to_string(),
                )
            })
            .collect();
        doc.coloring = Some(coloring);
        doc
    }

    /// Parse either JSON (first non-space byte `{`) or edge-list text.
    pub fn parse(input: &str) -> Result<Self, CliError> {
        if input.trim_start().starts_with('{') {
            let doc: BigraphDocument = serde_json::from_str(input)
                .map_err(|e| CliError::input(format!("malformed JSON document: {e}")))?;
            if doc.format_version != FORMAT_VERSION {
                return Err(CliError::input(format!(
                    "unsupported format_version {}",
                    doc.format_version
                )));
            }
            Ok(doc)
        } else {
            Self::parse_edge_list(input)
        }
    }

    /// Edge-list format: one edge per line, `left right [color]`, with `#`
    /// comments. Vertices are collected in order of first appearance.
    pub fn parse_edge_list(input: &str) -> Result<Self, CliError> {
        let mut v1: Vec<String> = Vec::new();
        let mut v2: Vec<String> = Vec::new();
        let mut edges = Vec::new();
        let mut colors: BTreeMap<String, String> = BTreeMap::new();
        let mut any_color = false;
        let mut any_plain = false;
        for (lineno, raw) in input.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens.as_slice() {
                [u, v] => {
                    any_plain = true;
                    push_unique(&mut v1, u);
                    push_unique(&mut v2, v);
                    edges.push((u.to_string(), v.to_string()));
                }
                [u, v, c] => {
                    any_color = true;
                    push_unique(&mut v1, u);
                    push_unique(&mut v2, v);
                    edges.push((u.to_string(), v.to_string()));
                    colors.insert(format!("{u}|{v}"), c.to_string());
                }
                _ => {
                    return Err(CliError::input(format!(
                        "line {}: expected `left right [color]`",
                        lineno + 1
                    )))
                }
            }
        }
        if any_color && any_plain {
            return Err(CliError::input(
                "edge list mixes colored and uncolored lines".into(),
            ));
        }
        Ok(BigraphDocument {
            format_version: FORMAT_VERSION,
            v1,
            v2,
            edges,
            coloring: if any_color { Some(colors) } else { None },
            left_coloring: None,
            theta: None,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    /// Validate and build the plain bigraph.
    pub fn to_bigraph(&self) -> Result<Bigraph, CliError> {
        if self.coloring.is_some() || self.left_coloring.is_some() {
            for label in self.v1.iter().chain(&self.v2) {
                if label.contains('|') {
                    return Err(CliError::input(format!(
                        "vertex label `{label}` contains `|`, which coloring keys reserve"
                    )));
                }
            }
        }
        Bigraph::new(self.v1.clone(), self.v2.clone(), &self.edges)
            .map_err(|e| CliError::input(format!("invalid bigraph: {e}")))
    }

    /// The colored bigraph: the declared coloring, or monochromatic when
    /// the document has none.
    pub fn to_colored(&self) -> Result<ColoredBigraph, CliError> {
        let graph = self.to_bigraph()?;
        let coloring = match &self.coloring {
            None => Coloring::monochromatic(graph.edge_count(), "1"),
            Some(map) => {
                let mut keyed: BTreeMap<(String, String), String> = BTreeMap::new();
                for (key, color) in map {
                    let Some((u, v)) = key.split_once('|') else {
                        return Err(CliError::input(format!(
                            "coloring key `{key}` is not `left|right`"
                        )));
                    };
                    keyed.insert((u.to_string(), v.to_string()), color.clone());
                }
                Coloring::from_map(&graph, &keyed)
                    .map_err(|e| CliError::input(format!("invalid coloring: {e}")))?
            }
        };
        ColoredBigraph::new(graph, coloring)
            .map_err(|e| CliError::input(format!("invalid colored bigraph: {e}")))
    }

    /// The left coloring, when declared.
    pub fn to_left_coloring(&self, graph: &Bigraph) -> Result<Option<LeftColoring>, CliError> {
        let Some(map) = &self.left_coloring else {
            return Ok(None);
        };
        let mut names: Vec<String> = map.values().cloned().collect();
        names.sort();
        names.dedup();
        let mut colors = Vec::with_capacity(graph.v1_count());
        for u in graph.left_vertices() {
            let label = graph.label(u);
            let Some(color) = map.get(label) else {
                return Err(CliError::input(format!(
                    "left coloring misses vertex `{label}`"
                )));
            };
            colors.push(names.iter().position(|n| n == color).unwrap() as u32);
        }
        LeftColoring::new(names, colors)
            .map_err(|e| CliError::input(format!("invalid left coloring: {e}")))
            .map(Some)
    }

    /// The flag, when a labeling is declared.
    pub fn to_flag(&self) -> Result<Option<Flag>, CliError> {
        let Some(order) = &self.theta else {
            return Ok(None);
        };
        let h = self.to_colored()?;
        let theta: Vec<usize> = order
            .iter()
            .map(|label| {
                h.graph()
                    .vertex_by_label(label)
                    .ok_or_else(|| CliError::input(format!("unknown labeled vertex `{label}`")))
            })
            .collect::<Result<_, _>>()?;
        Flag::new(h, theta)
            .map_err(|e| CliError::input(format!("invalid labeling: {e}")))
            .map(Some)
    }
}

fn push_unique(list: &mut Vec<String>, item: &str) {
    if !list.iter().any(|x| x == item) {
        list.push(item.to_string());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_star_example() {
        let doc = BigraphDocument::parse(
            r#"{"format_version":1,"v1":["u1"],"v2":["v1","v2"],
                "edges":[["u1","v1"],["u1","v2"]]}"#,
        )
        .unwrap();
        let g = doc.to_bigraph().unwrap();
        assert_eq!(g.v1_count(), 1);
        assert_eq!(g.v2_count(), 2);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn edge_list_star_example() {
        let doc = BigraphDocument::parse("u1 v1\nu1 v2\n").unwrap();
        let g = doc.to_bigraph().unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.vertex_by_label("u1"), Some(0));
    }

    #[test]
    fn duplicate_edge_is_rejected() {
        let doc = BigraphDocument::parse("u1 v1\nu1 v1\n").unwrap();
        assert!(doc.to_bigraph().is_err());
    }

    #[test]
    fn dangling_reference_is_rejected() {
        let doc = BigraphDocument::parse(
            r#"{"format_version":1,"v1":["u1"],"v2":["v1"],
                "edges":[["u1","nope"]]}"#,
        )
        .unwrap();
        assert!(doc.to_bigraph().is_err());
    }

    #[test]
    fn colored_edge_list_round_trips() {
        let doc = BigraphDocument::parse("u1 v1 red\nu1 v2 blue\n").unwrap();
        let h = doc.to_colored().unwrap();
        assert_eq!(h.coloring().palette(), ["blue", "red"]);
        let back = BigraphDocument::from_colored(&h);
        assert_eq!(back.to_colored().unwrap(), h);
    }

    #[test]
    fn pipe_in_vertex_name_conflicts_with_coloring() {
        let mut doc = BigraphDocument::parse("a|b v1 red\n").unwrap();
        assert!(doc.to_bigraph().is_err());
        doc.coloring = None;
        assert!(doc.to_bigraph().is_ok());
    }

    proptest::proptest! {
        /// Parsing a serialized document gives the document back.
        #[test]
        fn serialize_parse_round_trip(
            n1 in 1usize..=3,
            n2 in 1usize..=3,
            mask in 0u32..512,
            colored in proptest::bool::ANY,
        ) {
            let slots: Vec<(usize, usize)> = (0..n1)
                .flat_map(|i| (0..n2).map(move |j| (i, j)))
                .collect();
            let edges: Vec<(usize, usize)> = slots
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &p)| p)
                .collect();
            let graph = Bigraph::from_parts(n1, n2, &edges).unwrap();
            let doc = if colored && graph.edge_count() > 0 {
                BigraphDocument::from_colored(&ColoredBigraph::rainbow(graph))
            } else {
                BigraphDocument::from_graph(&graph)
            };
            let parsed = BigraphDocument::parse(&doc.to_json()).unwrap();
            proptest::prop_assert_eq!(&parsed, &doc);
            // The parsed document rebuilds the same core objects.
            proptest::prop_assert_eq!(
                parsed.to_colored().unwrap(),
                doc.to_colored().unwrap()
            );
        }
    }

    #[test]
    fn theta_parses_into_flag() {
        let doc = BigraphDocument::parse(
            r#"{"format_version":1,"v1":["u1"],"v2":["v1","v2"],
                "edges":[["u1","v1"],["u1","v2"]],"theta":["u1","v2"]}"#,
        )
        .unwrap();
        let flag = doc.to_flag().unwrap().unwrap();
        assert_eq!(flag.k(), 2);
        assert_eq!(flag.theta(), &[0, 2]);
    }
}
