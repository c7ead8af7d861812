use std::io::BufRead;

use super::{DiffusionModel, ProbabilisticGraph, WeightMode};
use crate::error::{Result, SkisError};
use crate::rng::RngStream;
use crate::NodeId;

/// Read a whitespace-separated edge list.
///
/// Each non-empty line is `u v` or `u v w` with 0-based ids; lines starting
/// with `#` are skipped. The node count is one past the largest id seen.
/// Weights are required for [`WeightMode::Given`]; the other modes overwrite
/// whatever the file carries, drawing from stream 0 of `rng_seed`.
pub fn load_edge_list<R: BufRead>(
    reader: R,
    model: DiffusionModel,
    weight_mode: WeightMode,
    rng_seed: u64,
) -> Result<ProbabilisticGraph> {
    let mut edges = Vec::new();
    let mut max_id: Option<NodeId> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(parse_err(
                lineno,
                format!("expected 2 or 3 fields, found {}", fields.len()),
            ));
        }
        let u = parse_id(fields[0], lineno)?;
        let v = parse_id(fields[1], lineno)?;
        let w = match fields.get(2) {
            Some(text) => text
                .parse::<f64>()
                .map_err(|_| parse_err(lineno, format!("bad weight {text:?}")))?,
            None if weight_mode == WeightMode::Given => {
                return Err(parse_err(
                    lineno,
                    "weight column required for given weights".into(),
                ))
            }
            None => 0.0,
        };
        if weight_mode == WeightMode::Given && !(0.0..=1.0).contains(&w) {
            return Err(SkisError::validation(format!(
                "line {lineno}: weight {w} outside [0,1]"
            )));
        }
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        edges.push((
            u,
            v,
            if weight_mode == WeightMode::Given {
                w
            } else {
                0.0
            },
        ));
    }
    let n = max_id.map_or(0, |m| m as usize + 1);

    // Weight assignment happens on a structurally valid IC view so the LT
    // sum check only applies to the final weights.
    let structure = ProbabilisticGraph::from_edges(n, edges, DiffusionModel::IC)?;
    let mut rng = RngStream::new(rng_seed, 0);
    let weighted = match weight_mode {
        WeightMode::Given => structure,
        WeightMode::Wc => structure.assign_weighted_cascade(),
        WeightMode::Tri => structure.assign_trivalency(&mut rng),
        WeightMode::LtRandom => structure.assign_lt_random(&mut rng),
    };
    let mut graph = weighted;
    graph.model = model;
    graph.validate()?;
    Ok(graph)
}

fn parse_id(text: &str, lineno: usize) -> Result<NodeId> {
    text.parse::<NodeId>()
        .map_err(|_| parse_err(lineno, format!("bad node id {text:?}")))
}

fn parse_err(line: usize, message: String) -> SkisError {
    SkisError::Parse { line, message }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str, model: DiffusionModel, mode: WeightMode) -> Result<ProbabilisticGraph> {
        load_edge_list(text.as_bytes(), model, mode, 7)
    }

    #[test]
    fn single_edge_weighted_cascade() {
        let g = load("0 1\n", DiffusionModel::IC, WeightMode::Wc).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.in_weights(1), &[1.0]);
    }

    #[test]
    fn empty_stream() {
        let g = load("", DiffusionModel::IC, WeightMode::Wc).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (0, 0));
        let g = load(
            "# only a comment\n\n",
            DiffusionModel::LT,
            WeightMode::Given,
        )
        .unwrap();
        assert_eq!(g.node_count(), 0);
    }

    #[test]
    fn two_parents_weighted_cascade() {
        let g = load("0 2\n1 2\n", DiffusionModel::IC, WeightMode::Wc).unwrap();
        assert_eq!(g.in_weights(2), &[0.5, 0.5]);
    }

    #[test]
    fn given_weights_and_comments() {
        let g = load(
            "# header\n0 1 0.25\n  1 2 0.5  \n",
            DiffusionModel::IC,
            WeightMode::Given,
        )
        .unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.in_weights(2), &[0.5]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match load("0 1 0.5\n0 x 0.5\n", DiffusionModel::IC, WeightMode::Given) {
            Err(SkisError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match load("0 1\n", DiffusionModel::IC, WeightMode::Given) {
            Err(SkisError::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        match load("0 1 2 3\n", DiffusionModel::IC, WeightMode::Wc) {
            Err(SkisError::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn weight_validation() {
        assert!(matches!(
            load("0 1 1.5\n", DiffusionModel::IC, WeightMode::Given),
            Err(SkisError::Validation(_))
        ));
        assert!(matches!(
            load("0 2 0.6\n1 2 0.6\n", DiffusionModel::LT, WeightMode::Given),
            Err(SkisError::Validation(_))
        ));
        // WC overwrites the offending weights
        let g = load("0 2 0.6\n1 2 0.6\n", DiffusionModel::LT, WeightMode::Wc).unwrap();
        assert_eq!(g.in_weights(2), &[0.5, 0.5]);
    }

    #[test]
    fn lt_random_weights_are_valid() {
        let g = load("0 2\n1 2\n3 2\n", DiffusionModel::LT, WeightMode::LtRandom).unwrap();
        let w = g.in_weights(2);
        assert!(w.iter().sum::<f64>() <= 1.0 + 1e-9);
        assert!((w[0] - w[1]).abs() < 1e-15 && (w[1] - w[2]).abs() < 1e-15);
    }

    #[test]
    fn seeded_modes_are_reproducible() {
        let text = "0 1\n1 2\n2 0\n0 2\n";
        let a = load(text, DiffusionModel::IC, WeightMode::Tri).unwrap();
        let b = load(text, DiffusionModel::IC, WeightMode::Tri).unwrap();
        assert_eq!(a, b);
    }
}
