use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use super::Game;
use crate::arena::{Player, VertexId};

/// Lift statistics carried alongside a solution.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LiftSummary {
    pub total_lifts: u64,
    pub max_vertex_lifts: u64,
    pub wall_time_secs: f64,
}

/// Winner and optional strategy successor for every dense vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionDocument {
    pub winners: Vec<Player>,
    pub strategy: Vec<Option<VertexId>>,
    pub stats: Option<LiftSummary>,
}

/// `paritysol <max-id>;` then `<id> <winner> [<succ>];` per vertex by
/// ascending original id.
pub fn emit_solution(doc: &SolutionDocument, game: &Game) -> String {
    let mut order: Vec<usize> = (0..doc.winners.len()).collect();
    order.sort_by_key(|&v| game.ids[v]);
    let mut out = String::new();
    let _ = writeln!(out, "paritysol {};", game.max_original_id());
    for v in order {
        let _ = write!(out, "{} {}", game.ids[v], doc.winners[v].index());
        if let Some(s) = doc.strategy[v] {
            let _ = write!(out, " {}", game.ids[s]);
        }
        out.push_str(";\n");
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolutionParseError {
    #[error("line {line}: {what}")]
    Malformed { line: usize, what: String },
    #[error("solution mentions unknown vertex {0}")]
    UnknownVertex(u64),
    #[error("vertex {0} is missing from the solution")]
    Missing(u64),
}

/// Reads a solution file back against the game it was written for.
pub fn parse_solution(text: &str, game: &Game) -> Result<SolutionDocument, SolutionParseError> {
    let n = game.arena.num_vertices();
    let mut winners: Vec<Option<Player>> = vec![None; n];
    let mut strategy = vec![None; n];
    let dense: std::collections::HashMap<u64, VertexId> = game
        .ids
        .iter()
        .enumerate()
        .map(|(v, &id)| (id, v))
        .collect();
    let lookup = |id: u64| {
        dense
            .get(&id)
            .copied()
            .ok_or(SolutionParseError::UnknownVertex(id))
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let bad = |what: &str| SolutionParseError::Malformed {
            line,
            what: what.to_string(),
        };
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let body = trimmed
            .strip_suffix(';')
            .ok_or_else(|| bad("missing ';'"))?;
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.first() == Some(&"paritysol") {
            continue;
        }
        let num = |s: &str| s.parse::<u64>().map_err(|_| bad("expected a number"));
        let (id, who, succ) = match fields.as_slice() {
            [id, w] => (num(id)?, num(w)?, None),
            [id, w, s] => (num(id)?, num(w)?, Some(num(s)?)),
            _ => return Err(bad("expected '<id> <winner> [<succ>];'")),
        };
        let v = lookup(id)?;
        winners[v] = Some(match who {
            0 => Player::Even,
            1 => Player::Odd,
            _ => return Err(bad("winner must be 0 or 1")),
        });
        strategy[v] = succ.map(lookup).transpose()?;
    }
    let winners = winners
        .into_iter()
        .enumerate()
        .map(|(v, w)| w.ok_or(SolutionParseError::Missing(game.ids[v])))
        .collect::<Result<_, _>>()?;
    Ok(SolutionDocument {
        winners,
        strategy,
        stats: None,
    })
}

#[cfg(test)]
mod tests {
    use super::super::parse_pgsolver;
    use super::*;

    #[test]
    fn self_loop_line() {
        let g = parse_pgsolver("0 2 0 0;").unwrap();
        let doc = SolutionDocument {
            winners: vec![Player::Even],
            strategy: vec![Some(0)],
            stats: None,
        };
        assert_eq!(emit_solution(&doc, &g), "paritysol 0;\n0 0 0;\n");
    }

    #[test]
    fn round_trip_with_sparse_ids() {
        let g = parse_pgsolver("7 2 0 3; 3 1 1 7,3;").unwrap();
        let doc = SolutionDocument {
            winners: vec![Player::Even, Player::Odd],
            strategy: vec![Some(1), None],
            stats: None,
        };
        let text = emit_solution(&doc, &g);
        assert_eq!(text, "paritysol 7;\n3 1;\n7 0 3;\n");
        assert_eq!(parse_solution(&text, &g).unwrap(), doc);
    }

    #[test]
    fn rejects_incomplete_or_foreign() {
        let g = parse_pgsolver("0 2 0 1; 1 1 1 0;").unwrap();
        assert_eq!(
            parse_solution("0 0;", &g),
            Err(SolutionParseError::Missing(1))
        );
        assert_eq!(
            parse_solution("0 0; 1 1; 5 0;", &g).unwrap_err(),
            SolutionParseError::Malformed {
                line: 1,
                what: "expected '<id> <winner> [<succ>];'".into()
            }
        );
        assert_eq!(
            parse_solution("0 0;\n1 1;\n5 0;", &g),
            Err(SolutionParseError::UnknownVertex(5))
        );
        assert!(parse_solution("0 2;\n1 1;", &g).is_err());
    }
}
