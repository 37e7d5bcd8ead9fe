use std::collections::VecDeque;

use crate::arena::{Arena, Player, Strategy, VertexId};

/// Winning regions with positional strategies for both players.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionPair {
    pub winner: Vec<Player>,
    pub even_strategy: Strategy,
    pub odd_strategy: Strategy,
}

impl RegionPair {
    pub fn region(&self, p: Player) -> Vec<bool> {
        self.winner.iter().map(|&w| w == p).collect()
    }

    pub fn strategy(&self, p: Player) -> &Strategy {
        match p {
            Player::Even => &self.even_strategy,
            Player::Odd => &self.odd_strategy,
        }
    }
}

/// Attractor for `player` to `target` inside the subgame `mask`. Returns the
/// attractor and records attracting moves for `player` in `strategy`.
pub fn attractor(
    arena: &Arena,
    mask: &[bool],
    target: &[bool],
    player: Player,
    strategy: &mut [Option<VertexId>],
) -> Vec<bool> {
    let n = arena.num_vertices();
    let mut attr = target.to_vec();
    let mut remaining: Vec<usize> = (0..n)
        .map(|v| arena.successors(v).iter().filter(|&&s| mask[s]).count())
        .collect();
    let mut queue: VecDeque<VertexId> = (0..n).filter(|&v| attr[v]).collect();
    while let Some(t) = queue.pop_front() {
        for &u in arena.predecessors(t) {
            if !mask[u] || attr[u] {
                continue;
            }
            if arena.owner(u) == player {
                attr[u] = true;
                strategy[u] = Some(t);
                queue.push_back(u);
            } else {
                remaining[u] -= 1;
                if remaining[u] == 0 {
                    attr[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    attr
}

/// Zielonka's recursive algorithm.
pub fn zielonka(arena: &Arena) -> RegionPair {
    let n = arena.num_vertices();
    let mut strategies = [vec![None; n], vec![None; n]];
    let won_by_odd = solve(arena, &vec![true; n], &mut strategies);
    let winner: Vec<Player> = won_by_odd
        .iter()
        .map(|&o| if o { Player::Odd } else { Player::Even })
        .collect();
    let [even, odd] = strategies;
    let restrict = |p: Player, choice: Vec<Option<VertexId>>| Strategy {
        player: p,
        choice: choice
            .into_iter()
            .enumerate()
            .map(|(v, c)| {
                if arena.owner(v) == p && winner[v] == p {
                    c
                } else {
                    None
                }
            })
            .collect(),
    };
    RegionPair {
        even_strategy: restrict(Player::Even, even),
        odd_strategy: restrict(Player::Odd, odd),
        winner,
    }
}

/// Solves the subgame on `mask`; returns Odd's region and fills each
/// player's strategy on its own region.
fn solve(arena: &Arena, mask: &[bool], strategies: &mut [Vec<Option<VertexId>>; 2]) -> Vec<bool> {
    let n = arena.num_vertices();
    let Some(top) = (0..n).filter(|&v| mask[v]).map(|v| arena.colour(v)).max() else {
        return vec![false; n];
    };
    let p = Player::of_colour(top);
    let q = p.opponent();
    let heads: Vec<bool> = (0..n).map(|v| mask[v] && arena.colour(v) == top).collect();
    let mut attract = vec![None; n];
    let a = attractor(arena, mask, &heads, p, &mut attract);
    let rest: Vec<bool> = (0..n).map(|v| mask[v] && !a[v]).collect();
    let mut inner = strategies.clone();
    let odd_rest = solve(arena, &rest, &mut inner);
    let q_rest: Vec<bool> = (0..n)
        .map(|v| rest[v] && (odd_rest[v] == (q == Player::Odd)))
        .collect();

    if !q_rest.iter().any(|&b| b) {
        // p wins the whole subgame
        for v in (0..n).filter(|&v| mask[v] && arena.owner(v) == p) {
            strategies[p.index()][v] = if rest[v] {
                inner[p.index()][v]
            } else if heads[v] {
                arena.successors(v).iter().copied().find(|&s| mask[s])
            } else {
                attract[v]
            };
        }
        return mask.iter().map(|&m| m && p == Player::Odd).collect();
    }

    let mut attract_q = vec![None; n];
    let b = attractor(arena, mask, &q_rest, q, &mut attract_q);
    for v in (0..n).filter(|&v| b[v] && arena.owner(v) == q) {
        strategies[q.index()][v] = if q_rest[v] {
            inner[q.index()][v]
        } else {
            attract_q[v]
        };
    }
    let remainder: Vec<bool> = (0..n).map(|v| mask[v] && !b[v]).collect();
    let odd_remainder = solve(arena, &remainder, strategies);
    (0..n)
        .map(|v| {
            mask[v]
                && if b[v] {
                    q == Player::Odd
                } else {
                    odd_remainder[v]
                }
        })
        .collect()
}
