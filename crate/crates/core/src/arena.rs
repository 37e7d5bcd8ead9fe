//! The parity game graph: vertices with an owner and a colour, plus forward
//! and reverse adjacency.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// A vertex colour ("priority" in PGSolver files).
pub type Colour = u32;

/// Dense vertex index into an [`Arena`].
pub type VertexId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    Even,
    Odd,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Even => Player::Odd,
            Player::Odd => Player::Even,
        }
    }

    /// The player who benefits when `colour` is the highest colour seen
    /// infinitely often.
    pub fn of_colour(colour: Colour) -> Player {
        if colour.is_multiple_of(2) {
            Player::Even
        } else {
            Player::Odd
        }
    }

    pub fn index(self) -> usize {
        match self {
            Player::Even => 0,
            Player::Odd => 1,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::Even => write!(f, "even"),
            Player::Odd => write!(f, "odd"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexRecord {
    pub id: VertexId,
    pub owner: Player,
    pub colour: Colour,
    pub name: Option<String>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArenaError {
    #[error("vertex {0} has no successor")]
    DeadEnd(VertexId),
    #[error("edge {from} -> {to} targets an unknown vertex")]
    DanglingEdge { from: VertexId, to: VertexId },
    #[error("vertex id {0} is declared more than once")]
    DuplicateId(VertexId),
    #[error("vertex ids are not dense: expected {expected}, found {found}")]
    SparseId { expected: VertexId, found: VertexId },
}

/// Raw game description before validation.
#[derive(Clone, Debug, Default)]
pub struct RawGame {
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<(VertexId, VertexId)>,
}

impl RawGame {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, owner: Player, colour: Colour) -> VertexId {
        let id = self.vertices.len();
        self.vertices.push(VertexRecord {
            id,
            owner,
            colour,
            name: None,
        });
        id
    }

    pub fn edge(&mut self, from: VertexId, to: VertexId) -> &mut Self {
        self.edges.push((from, to));
        self
    }
}

/// A validated parity game. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arena {
    vertices: Vec<VertexRecord>,
    succ_offsets: Vec<usize>,
    succ: Vec<VertexId>,
    preds: Vec<Vec<VertexId>>,
    colours: Vec<Colour>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArenaStats {
    /// Number of vertices with an even colour.
    pub even_vertices: usize,
    /// Number of relevant colours.
    pub relevant_colours: usize,
    /// Witness length.
    pub witness_len: usize,
    pub top_odd_dropped: bool,
    pub bottom_odd_dropped: bool,
}

/// Witness length for `e` even-coloured vertices: `floor(log2 e) + 1`, and 1
/// when there are none.
pub fn witness_len(even_vertices: usize) -> usize {
    if even_vertices == 0 {
        1
    } else {
        (usize::BITS - even_vertices.leading_zeros()) as usize
    }
}

impl Arena {
    /// Validates a raw game. Vertex ids must be `0..n` in order; duplicate
    /// edges are merged and successor lists are sorted.
    pub fn validate(raw: RawGame) -> Result<Arena, ArenaError> {
        let RawGame { vertices, edges } = raw;
        let n = vertices.len();
        let mut seen = vec![false; n];
        for (pos, v) in vertices.iter().enumerate() {
            if v.id < n && seen[v.id] {
                return Err(ArenaError::DuplicateId(v.id));
            }
            if v.id != pos {
                return Err(ArenaError::SparseId {
                    expected: pos,
                    found: v.id,
                });
            }
            seen[v.id] = true;
        }

        let mut adjacency: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); n];
        for &(from, to) in &edges {
            if from >= n || to >= n {
                return Err(ArenaError::DanglingEdge { from, to });
            }
            adjacency[from].insert(to);
        }
        if let Some(v) = adjacency.iter().position(BTreeSet::is_empty) {
            return Err(ArenaError::DeadEnd(v));
        }

        let mut succ_offsets = Vec::with_capacity(n + 1);
        let mut succ = Vec::new();
        let mut preds = vec![Vec::new(); n];
        succ_offsets.push(0);
        for (v, targets) in adjacency.iter().enumerate() {
            for &t in targets {
                succ.push(t);
                preds[t].push(v);
            }
            succ_offsets.push(succ.len());
        }

        let colours: BTreeSet<Colour> = vertices.iter().map(|v| v.colour).collect();
        Ok(Arena {
            vertices,
            succ_offsets,
            succ,
            preds,
            colours: colours.into_iter().collect(),
        })
    }

    /// Convenience constructor from `(owner, colour)` pairs and an edge list.
    pub fn from_parts(
        vertices: &[(Player, Colour)],
        edges: &[(VertexId, VertexId)],
    ) -> Result<Arena, ArenaError> {
        let mut raw = RawGame::new();
        for &(owner, colour) in vertices {
            raw.vertex(owner, colour);
        }
        raw.edges.extend_from_slice(edges);
        Arena::validate(raw)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.succ.len()
    }

    pub fn vertices(&self) -> &[VertexRecord] {
        &self.vertices
    }

    pub fn vertex(&self, v: VertexId) -> &VertexRecord {
        &self.vertices[v]
    }

    pub fn owner(&self, v: VertexId) -> Player {
        self.vertices[v].owner
    }

    pub fn colour(&self, v: VertexId) -> Colour {
        self.vertices[v].colour
    }

    pub fn successors(&self, v: VertexId) -> &[VertexId] {
        &self.succ[self.succ_offsets[v]..self.succ_offsets[v + 1]]
    }

    /// Index of the first outgoing edge of `v` in the flat edge numbering.
    pub fn edge_offset(&self, v: VertexId) -> usize {
        self.succ_offsets[v]
    }

    pub fn predecessors(&self, v: VertexId) -> &[VertexId] {
        &self.preds[v]
    }

    pub fn has_edge(&self, from: VertexId, to: VertexId) -> bool {
        self.successors(from).binary_search(&to).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.num_vertices()).flat_map(move |v| self.successors(v).iter().map(move |&s| (v, s)))
    }

    /// Distinct colours in ascending order.
    pub fn colours(&self) -> &[Colour] {
        &self.colours
    }

    pub fn max_colour(&self) -> Option<Colour> {
        self.colours.last().copied()
    }

    /// Colours with an odd top colour and an odd bottom colour removed.
    pub fn relevant_colours(&self) -> Vec<Colour> {
        let (top, bottom) = self.odd_extremes();
        self.colours
            .iter()
            .copied()
            .filter(|&c| Some(c) != top && Some(c) != bottom)
            .collect()
    }

    /// The top colour if it is odd, and the bottom colour if it is odd.
    pub fn odd_extremes(&self) -> (Option<Colour>, Option<Colour>) {
        let top = self.colours.last().copied().filter(|c| c % 2 == 1);
        let bottom = self.colours.first().copied().filter(|c| c % 2 == 1);
        (top, bottom)
    }

    pub fn even_vertex_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.colour % 2 == 0).count()
    }

    pub fn stats(&self) -> ArenaStats {
        let even_vertices = self.even_vertex_count();
        let (top, bottom) = self.odd_extremes();
        ArenaStats {
            even_vertices,
            relevant_colours: self.relevant_colours().len(),
            witness_len: witness_len(even_vertices),
            top_odd_dropped: top.is_some(),
            bottom_odd_dropped: bottom.is_some(),
        }
    }

    /// Name to vertex lookup, for vertices that carry a name.
    pub fn names(&self) -> HashMap<&str, VertexId> {
        self.vertices
            .iter()
            .filter_map(|v| v.name.as_deref().map(|n| (n, v.id)))
            .collect()
    }

    /// Builds the subgame induced by `keep`. Returns the subgame and the map
    /// from subgame ids to ids in `self`. Every kept vertex must have a kept
    /// successor.
    pub fn induced(&self, keep: &[bool]) -> Result<(Arena, Vec<VertexId>), ArenaError> {
        let back: Vec<VertexId> = (0..self.num_vertices()).filter(|&v| keep[v]).collect();
        let mut forward = vec![usize::MAX; self.num_vertices()];
        for (i, &v) in back.iter().enumerate() {
            forward[v] = i;
        }
        let mut raw = RawGame::new();
        for &v in &back {
            let rec = &self.vertices[v];
            let id = raw.vertex(rec.owner, rec.colour);
            raw.vertices[id].name = rec.name.clone();
        }
        for (i, &v) in back.iter().enumerate() {
            for &s in self.successors(v) {
                if keep[s] {
                    raw.edges.push((i, forward[s]));
                }
            }
        }
        Ok((Arena::validate(raw)?, back))
    }
}

pub fn reverse_play(play: &[VertexId]) -> Vec<VertexId> {
    play.iter().rev().copied().collect()
}

/// A positional strategy for one player: a chosen successor for some of the
/// player's vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    pub player: Player,
    pub choice: Vec<Option<VertexId>>,
}

impl Strategy {
    pub fn empty(player: Player, n: usize) -> Self {
        Strategy {
            player,
            choice: vec![None; n],
        }
    }

    pub fn get(&self, v: VertexId) -> Option<VertexId> {
        self.choice.get(v).copied().flatten()
    }

    pub fn set(&mut self, v: VertexId, to: VertexId) {
        self.choice[v] = Some(to);
    }

    /// Checks that every choice is an edge from a vertex of `self.player`
    /// and that the domain is exactly the player's vertices inside `region`.
    pub fn is_well_formed(&self, arena: &Arena, region: &[bool]) -> bool {
        self.choice.len() == arena.num_vertices()
            && (0..arena.num_vertices()).all(|v| {
                let expected = region[v] && arena.owner(v) == self.player;
                match self.choice[v] {
                    Some(s) => expected && arena.has_edge(v, s),
                    None => !expected,
                }
            })
    }
}
