//! PGSolver game files, solution files and seeded game generators.

mod gen;
mod parse;
mod solution;

pub use gen::{gen_random, gen_ring, generate, GenError, GeneratorSpec};
pub use parse::{emit_pgsolver, parse_pgsolver, ParseError};
pub use solution::{
    emit_solution, parse_solution, LiftSummary, SolutionDocument, SolutionParseError,
};

use crate::arena::{Arena, VertexId};

/// An arena together with the original id of every dense vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Game {
    pub arena: Arena,
    pub ids: Vec<u64>,
}

impl Game {
    /// Wraps an arena whose dense ids are also its file ids.
    pub fn from_arena(arena: Arena) -> Game {
        let ids = (0..arena.num_vertices() as u64).collect();
        Game { arena, ids }
    }

    pub fn original_id(&self, v: VertexId) -> u64 {
        self.ids[v]
    }

    /// Dense vertex for an original id, if present.
    pub fn dense_id(&self, original: u64) -> Option<VertexId> {
        self.ids.iter().position(|&i| i == original)
    }

    pub fn max_original_id(&self) -> u64 {
        self.ids.iter().copied().max().unwrap_or(0)
    }
}
