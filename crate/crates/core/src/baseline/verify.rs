use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::arena::{Arena, Colour, Player, Strategy, VertexId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(Failure),
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Failure {
    Malformed(String),
    /// A move allowed from `from` leaves the region of `region`.
    Escape {
        region: Player,
        from: VertexId,
        to: VertexId,
    },
    /// A cycle inside `region`'s region, consistent with its strategy, whose
    /// top colour has the wrong parity.
    Cycle {
        region: Player,
        cycle: Vec<VertexId>,
        top: Colour,
    },
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Malformed(s) => write!(f, "malformed input: {s}"),
            Failure::Escape { region, from, to } => {
                write!(f, "edge {from} -> {to} escapes the region of {region}")
            }
            Failure::Cycle { region, cycle, top } => {
                write!(
                    f,
                    "cycle {cycle:?} in the region of {region} has top colour {top}"
                )
            }
        }
    }
}

/// Checks that each player's region is closed under its own strategy and all
/// opponent moves, and that every cycle there has a top colour of the
/// region owner's parity.
pub fn verify_solution(
    arena: &Arena,
    winner: &[Player],
    even: &Strategy,
    odd: &Strategy,
) -> Verdict {
    let n = arena.num_vertices();
    if winner.len() != n || even.choice.len() != n || odd.choice.len() != n {
        return Verdict::Fail(Failure::Malformed("length does not match the arena".into()));
    }
    for (p, strat) in [(Player::Even, even), (Player::Odd, odd)] {
        for (v, &w) in winner.iter().enumerate() {
            let own = arena.owner(v) == p && w == p;
            match strat.choice[v] {
                Some(s) if !own => {
                    return Verdict::Fail(Failure::Malformed(format!(
                        "{p} strategy chooses at vertex {v} outside its domain ({s})"
                    )))
                }
                Some(s) if !arena.has_edge(v, s) => {
                    return Verdict::Fail(Failure::Malformed(format!("{v} -> {s} is not an edge")))
                }
                None if own => {
                    return Verdict::Fail(Failure::Malformed(format!(
                        "{p} strategy has no move at {v}"
                    )))
                }
                _ => {}
            }
        }
    }

    for (p, strat) in [(Player::Even, even), (Player::Odd, odd)] {
        let region: Vec<bool> = winner.iter().map(|&w| w == p).collect();
        let moves = |v: VertexId| -> Vec<VertexId> {
            if arena.owner(v) == p {
                vec![strat.choice[v].unwrap()]
            } else {
                arena.successors(v).to_vec()
            }
        };
        for v in (0..n).filter(|&v| region[v]) {
            if let Some(&to) = moves(v).iter().find(|&&s| !region[s]) {
                return Verdict::Fail(Failure::Escape {
                    region: p,
                    from: v,
                    to,
                });
            }
        }
        if let Some((cycle, top)) = bad_cycle(arena, &region, &moves, p) {
            return Verdict::Fail(Failure::Cycle {
                region: p,
                cycle,
                top,
            });
        }
    }
    Verdict::Pass
}

/// Finds a cycle among `alive` vertices whose top colour is not of `p`'s
/// parity, by repeatedly splitting into strongly connected components and
/// removing top-colour vertices of good parity.
fn bad_cycle(
    arena: &Arena,
    alive: &[bool],
    moves: &dyn Fn(VertexId) -> Vec<VertexId>,
    p: Player,
) -> Option<(Vec<VertexId>, Colour)> {
    let mut pending: Vec<Vec<VertexId>> =
        vec![(0..arena.num_vertices()).filter(|&v| alive[v]).collect()];
    while let Some(set) = pending.pop() {
        let mut index: HashMap<VertexId, NodeIndex> = HashMap::new();
        let mut g: DiGraph<VertexId, ()> = DiGraph::new();
        for &v in &set {
            index.insert(v, g.add_node(v));
        }
        for &v in &set {
            for s in moves(v) {
                if let Some(&t) = index.get(&s) {
                    g.add_edge(index[&v], t, ());
                }
            }
        }
        for comp in tarjan_scc(&g) {
            let nontrivial = comp.len() > 1 || g.contains_edge(comp[0], comp[0]);
            if !nontrivial {
                continue;
            }
            let verts: Vec<VertexId> = comp.iter().map(|&i| g[i]).collect();
            let top = verts.iter().map(|&v| arena.colour(v)).max().unwrap();
            if Player::of_colour(top) != p {
                let start = *verts.iter().find(|&&v| arena.colour(v) == top).unwrap();
                return Some((cycle_through(start, &verts, moves), top));
            }
            let rest: Vec<VertexId> = verts
                .into_iter()
                .filter(|&v| arena.colour(v) != top)
                .collect();
            if !rest.is_empty() {
                pending.push(rest);
            }
        }
    }
    None
}

/// A shortest cycle from `start` back to itself within `verts`.
fn cycle_through(
    start: VertexId,
    verts: &[VertexId],
    moves: &dyn Fn(VertexId) -> Vec<VertexId>,
) -> Vec<VertexId> {
    let inside: std::collections::HashSet<VertexId> = verts.iter().copied().collect();
    let mut parent: HashMap<VertexId, VertexId> = HashMap::new();
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for s in moves(u) {
            if !inside.contains(&s) {
                continue;
            }
            if s == start {
                let mut path = vec![u];
                while let Some(&pu) = parent.get(path.last().unwrap()) {
                    path.push(pu);
                }
                path.reverse();
                return path;
            }
            if let Entry::Vacant(e) = parent.entry(s) {
                e.insert(u);
                queue.push_back(s);
            }
        }
    }
    unreachable!("start lies on a cycle of its component")
}

#[cfg(test)]
mod tests {
    use super::super::zielonka;
    use super::*;
    use crate::pgio::gen_ring;

    #[test]
    fn ring_solution_passes() {
        let a = gen_ring(3).arena;
        let r = zielonka(&a);
        assert_eq!(
            verify_solution(&a, &r.winner, &r.even_strategy, &r.odd_strategy),
            Verdict::Pass
        );
    }

    #[test]
    fn flipped_winner_fails() {
        let a = gen_ring(2).arena;
        let r = zielonka(&a);
        let mut winner = r.winner.clone();
        winner[0] = Player::Odd;
        let mut odd = r.odd_strategy.clone();
        odd.set(0, 1);
        assert!(!verify_solution(&a, &winner, &r.even_strategy, &odd).passed());
    }

    #[test]
    fn odd_cycle_in_even_region_is_reported() {
        // Odd owns both vertices; the 2-cycle has top colour 3
        let a =
            Arena::from_parts(&[(Player::Odd, 3), (Player::Odd, 2)], &[(0, 1), (1, 0)]).unwrap();
        let even = Strategy::empty(Player::Even, 2);
        let odd = Strategy::empty(Player::Odd, 2);
        match verify_solution(&a, &[Player::Even, Player::Even], &even, &odd) {
            Verdict::Fail(Failure::Cycle {
                region,
                mut cycle,
                top,
            }) => {
                assert_eq!((region, top), (Player::Even, 3));
                cycle.sort();
                assert_eq!(cycle, vec![0, 1]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nested_components() {
        // 0 (colour 4) - 1 (colour 3) - 2 (colour 2); cycles 0-1 and 1-2.
        // The inner cycle 1-2 has top 3, found after removing colour 4.
        let a = Arena::from_parts(
            &[(Player::Odd, 4), (Player::Odd, 3), (Player::Odd, 2)],
            &[(0, 1), (1, 0), (1, 2), (2, 1)],
        )
        .unwrap();
        let s = Strategy::empty(Player::Even, 3);
        let o = Strategy::empty(Player::Odd, 3);
        let v = verify_solution(&a, &[Player::Even; 3], &s, &o);
        assert!(matches!(v, Verdict::Fail(Failure::Cycle { top: 3, .. })));
    }

    #[test]
    fn missing_move_is_malformed() {
        let a = Arena::from_parts(&[(Player::Even, 2)], &[(0, 0)]).unwrap();
        let s = Strategy::empty(Player::Even, 1);
        let o = Strategy::empty(Player::Odd, 1);
        assert!(matches!(
            verify_solution(&a, &[Player::Even], &s, &o),
            Verdict::Fail(Failure::Malformed(_))
        ));
    }
}
