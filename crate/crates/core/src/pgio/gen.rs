use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::Game;
use crate::arena::{Arena, Colour, Player, RawGame};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorSpec {
    Ring {
        n: usize,
    },
    Random {
        n: usize,
        min_outdeg: usize,
        max_outdeg: usize,
        max_colour: Colour,
        seed: u64,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    InvalidSpec(String),
}

pub fn generate(spec: &GeneratorSpec) -> Result<Game, GenError> {
    match *spec {
        GeneratorSpec::Ring { n } => {
            if n == 0 {
                return Err(GenError::InvalidSpec("ring size must be at least 1".into()));
            }
            Ok(gen_ring(n))
        }
        GeneratorSpec::Random {
            n,
            min_outdeg,
            max_outdeg,
            max_colour,
            seed,
        } => gen_random(n, min_outdeg, max_outdeg, max_colour, seed),
    }
}

/// The lower-bound ring on vertices named `1..=2n`: vertex `i` has colour
/// `i` and belongs to Odd, steps to `i + 1` (and `2n` to `1`), and every
/// even vertex may also return to `1`. Vertex named `i` has id `i - 1`.
pub fn gen_ring(n: usize) -> Game {
    assert!(n >= 1, "ring size must be at least 1");
    let size = 2 * n;
    let mut raw = RawGame::new();
    for i in 1..=size {
        let v = raw.vertex(Player::Odd, i as Colour);
        raw.vertices[v].name = Some(i.to_string());
    }
    for i in 1..=size {
        raw.edge(i - 1, i % size);
        if i % 2 == 0 {
            raw.edge(i - 1, 0);
        }
    }
    Game::from_arena(Arena::validate(raw).expect("ring is well formed"))
}

/// Seeded random game. Uses ChaCha8 seeded with `seed`; for each vertex in
/// id order it draws the owner, then the colour in `1..=max_colour`, then
/// the out-degree, then that many distinct successors (sorted).
pub fn gen_random(
    n: usize,
    min_outdeg: usize,
    max_outdeg: usize,
    max_colour: Colour,
    seed: u64,
) -> Result<Game, GenError> {
    if n == 0 {
        return Err(GenError::InvalidSpec("n must be at least 1".into()));
    }
    if min_outdeg == 0 || min_outdeg > max_outdeg || max_outdeg > n {
        return Err(GenError::InvalidSpec(format!(
            "need 1 <= min_outdeg <= max_outdeg <= n, got {min_outdeg}, {max_outdeg}, {n}"
        )));
    }
    if max_colour == 0 {
        return Err(GenError::InvalidSpec(
            "max_colour must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw = RawGame::new();
    let mut succ = Vec::with_capacity(n);
    for _ in 0..n {
        let owner = if rng.gen_range(0u32..2) == 0 {
            Player::Even
        } else {
            Player::Odd
        };
        let colour = rng.gen_range(1..=max_colour);
        let deg = rng.gen_range(min_outdeg as u64..=max_outdeg as u64) as usize;
        let mut targets = sample(&mut rng, n, deg).into_vec();
        targets.sort_unstable();
        raw.vertex(owner, colour);
        succ.push(targets);
    }
    for (v, targets) in succ.into_iter().enumerate() {
        for t in targets {
            raw.edge(v, t);
        }
    }
    Ok(Game::from_arena(
        Arena::validate(raw).expect("every vertex has a successor"),
    ))
}
