//! The JSON report envelope and serializers for folds and witnesses.

use serde::Serialize;
use serde_json::{json, Value};

use cutperc_core::percolation::{ReachWitness, SubsetWitness};
use cutperc_core::stability::TheoremReport;
use cutperc_core::{Bigraph, Fold, FoldSet};

pub const REPORT_VERSION: u32 = 1;

/// The stable envelope every analysis command emits in JSON mode.
#[derive(Debug, Serialize)]
pub struct Report {
    pub format_version: u32,
    pub command: String,
    pub verdict: Option<bool>,
    pub exit_code: i32,
    pub elapsed_ms: u128,
    pub data: Value,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Folds with their tool-assigned ids, so witnesses are replayable.
pub fn folds_json(graph: &Bigraph, folds: &FoldSet) -> Value {
    let list: Vec<Value> = folds
        .iter()
        .enumerate()
        .map(|(id, f)| fold_json(graph, id, f))
        .collect();
    json!({
        "count": folds.len(),
        "dual_closed": folds.is_dual_closed(),
        "aut_invariant": folds.is_aut_invariant(),
        "folds": list,
    })
}

pub fn fold_json(graph: &Bigraph, id: usize, fold: &Fold) -> Value {
    let labels = |vs: &[usize]| -> Vec<String> {
        vs.iter().map(|&v| graph.label(v).to_string()).collect()
    };
    let involution: Vec<[String; 2]> = fold
        .involution()
        .iter()
        .enumerate()
        .filter(|&(v, &w)| v != w)
        .map(|(v, &w)| [graph.label(v).to_string(), graph.label(w).to_string()])
        .collect();
    json!({
        "id": id,
        "involution": involution,
        "fix": labels(fold.fix()),
        "side": labels(fold.side()),
        "side_image": labels(fold.side_image()),
        "independent": fold.is_independent(graph),
    })
}

/// A subset-percolation witness over edges or left vertices.
pub fn subset_witness_json(
    graph: &Bigraph,
    witness: &SubsetWitness,
    left_vertices: bool,
) -> Value {
    let name = |idx: usize| -> String {
        if left_vertices {
            graph.label(idx).to_string()
        } else {
            let (u, w) = graph.edges()[idx];
            format!("{}|{}", graph.label(u), graph.label(w))
        }
    };
    json!({
        "kind": if left_vertices { "left_vertex_subsets" } else { "edge_subsets" },
        "steps": witness.steps,
        "sets_idx": witness.sets,
        "sets": witness.sets.iter()
            .map(|set| set.iter().map(|&i| name(i)).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

pub fn reach_witness_json(witness: &ReachWitness) -> Value {
    json!({
        "steps": witness.steps.iter()
            .map(|(fold, side)| json!({"fold_id": fold, "side": format!("{side:?}")}))
            .collect::<Vec<_>>(),
        "states": witness.path,
    })
}

pub fn theorem_report_json(report: &TheoremReport) -> Value {
    json!({
        "consistent": report.consistent,
        "verdict": report.verdict,
        "transitivity": report.transitivity,
        "anomalies": report.anomalies,
        "items": report.items.iter().map(|item| json!({
            "id": item.id,
            "verdict": item.verdict,
            "mode": format!("{:?}", item.mode),
            "detail": item.detail,
        })).collect::<Vec<_>>(),
    })
}

pub fn theorem_report_text(report: &TheoremReport) -> Vec<String> {
    let mut lines = Vec::new();
    for item in &report.items {
        let verdict = match item.verdict {
            Some(true) => "true",
            Some(false) => "false",
            None => "skipped",
        };
        lines.push(format!("  {:<50} {:<8} {}", item.id, verdict, item.detail));
    }
    for anomaly in &report.anomalies {
        lines.push(format!("  ANOMALY: {anomaly}"));
    }
    lines.push(format!(
        "  consistent: {} verdict: {:?}",
        report.consistent, report.verdict
    ));
    lines
}
