//! Progress-measure value iteration over succinct witnesses.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arena::{Arena, Player, Strategy, VertexId};
use crate::baseline::{verify_solution, zielonka, Verdict};
use crate::witness::{count_w, Letter, UpdateMode, Witness, WitnessSpace};

/// How many lifts pass between two timeout checks.
const TIMEOUT_STRIDE: u64 = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WorklistOrder {
    /// Queue seeded with every vertex by id; predecessors are appended.
    Fifo,
    /// Pending vertices are picked uniformly at random.
    Shuffled(u64),
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub mode: UpdateMode,
    /// Cache `au` per edge and recompute only when the successor changed.
    pub edge_cache: bool,
    pub verify: bool,
    pub timeout: Option<Duration>,
    pub order: WorklistOrder,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            mode: UpdateMode::default(),
            edge_cache: true,
            verify: true,
            timeout: None,
            order: WorklistOrder::Fifo,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct LiftStats {
    pub total_lifts: u64,
    pub per_vertex: Vec<u64>,
    pub pushes: u64,
    pub au_evaluations: u64,
    pub wall_time: Duration,
}

impl LiftStats {
    pub fn max_vertex_lifts(&self) -> u64 {
        self.per_vertex.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub winner: Vec<Player>,
    /// The least consistent progress measure.
    pub measure: Vec<Witness>,
    pub even_strategy: Strategy,
    pub odd_strategy: Strategy,
    pub stats: LiftStats,
    /// `None` when verification was switched off.
    pub verdict: Option<Verdict>,
    /// Even's strategy had to be recomputed with the baseline solver.
    pub fallback_used: bool,
    pub space: WitnessSpace,
}

impl Solution {
    pub fn region(&self, p: Player) -> Vec<bool> {
        self.winner.iter().map(|&w| w == p).collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("timed out after {lifts} lifts")]
    Timeout { lifts: u64 },
    #[error("{lifts} lifts exceed the bound {bound}")]
    BoundViolated { lifts: u64, bound: BigUint },
}

/// Called with `(vertex, old, new)` for every lift.
pub type TraceFn<'a> = dyn FnMut(VertexId, &Witness, &Witness) + 'a;

/// Lift target at `v`: the largest antagonistic update over the successors
/// for Even, the smallest for Odd.
pub fn lift_target(
    arena: &Arena,
    space: &WitnessSpace,
    measure: &[Witness],
    v: VertexId,
) -> Witness {
    let d = space
        .letter(arena.colour(v))
        .expect("arena colours are known");
    let values = arena
        .successors(v)
        .iter()
        .map(|&s| space.au_letter(&measure[s], &d));
    match arena.owner(v) {
        Player::Even => values.max(),
        Player::Odd => values.min(),
    }
    .expect("every vertex has a successor")
}

/// A vertex whose lift target is strictly above its current value.
pub fn find_liftable(arena: &Arena, space: &WitnessSpace, measure: &[Witness]) -> Option<VertexId> {
    (0..arena.num_vertices()).find(|&v| lift_target(arena, space, measure, v) > measure[v])
}

#[allow(clippy::large_enum_variant)]
enum Worklist {
    Fifo(VecDeque<VertexId>),
    Shuffled(Vec<VertexId>, ChaCha8Rng),
}

impl Worklist {
    fn pop(&mut self) -> Option<VertexId> {
        match self {
            Worklist::Fifo(q) => q.pop_front(),
            Worklist::Shuffled(pending, rng) => {
                if pending.is_empty() {
                    None
                } else {
                    let i = rng.gen_range(0..pending.len());
                    Some(pending.swap_remove(i))
                }
            }
        }
    }

    fn push(&mut self, v: VertexId) {
        match self {
            Worklist::Fifo(q) => q.push_back(v),
            Worklist::Shuffled(pending, _) => pending.push(v),
        }
    }
}

struct Engine<'a> {
    arena: &'a Arena,
    space: &'a WitnessSpace,
    letters: Vec<Letter>,
    measure: Vec<Witness>,
    generation: Vec<u64>,
    /// Per edge: successor generation and the `au` value computed for it.
    cache: Option<Vec<Option<(u64, Witness)>>>,
    au_evaluations: u64,
}

impl Engine<'_> {
    fn target(&mut self, v: VertexId) -> Witness {
        let d = self.letters[v];
        let base = self.arena.edge_offset(v);
        let even = self.arena.owner(v) == Player::Even;
        let mut best: Option<Witness> = None;
        for (k, &s) in self.arena.successors(v).iter().enumerate() {
            let value = match &mut self.cache {
                Some(cache) => match &cache[base + k] {
                    Some((g, w)) if *g == self.generation[s] => w.clone(),
                    _ => {
                        self.au_evaluations += 1;
                        let w = self.space.au_letter(&self.measure[s], &d);
                        cache[base + k] = Some((self.generation[s], w.clone()));
                        w
                    }
                },
                None => {
                    self.au_evaluations += 1;
                    self.space.au_letter(&self.measure[s], &d)
                }
            };
            let better = match &best {
                None => true,
                Some(b) => (even && value > *b) || (!even && value < *b),
            };
            if better {
                best = Some(value);
            }
            // nothing beats Won for Even
            if even && best.as_ref().is_some_and(Witness::is_won) {
                break;
            }
        }
        best.expect("every vertex has a successor")
    }
}

/// Solves the game by lifting the all-bottom measure to its least fixpoint.
pub fn solve(arena: &Arena, opts: &SolveOptions) -> Result<Solution, SolveError> {
    solve_traced(arena, opts, None)
}

pub fn solve_traced(
    arena: &Arena,
    opts: &SolveOptions,
    mut trace: Option<&mut TraceFn<'_>>,
) -> Result<Solution, SolveError> {
    let start = Instant::now();
    let n = arena.num_vertices();
    let space = WitnessSpace::for_arena(arena, opts.mode);
    let mut stats = LiftStats {
        per_vertex: vec![0; n],
        ..LiftStats::default()
    };

    let measure = if arena.even_vertex_count() == 0 {
        // no witness can ever have a positive value
        vec![space.bottom(); n]
    } else {
        let mut engine = Engine {
            arena,
            space: &space,
            letters: (0..n)
                .map(|v| {
                    space
                        .letter(arena.colour(v))
                        .expect("arena colours are known")
                })
                .collect(),
            measure: vec![space.bottom(); n],
            generation: vec![0; n],
            cache: opts.edge_cache.then(|| vec![None; arena.num_edges()]),
            au_evaluations: 0,
        };
        let mut queued = vec![true; n];
        let mut work = match opts.order {
            WorklistOrder::Fifo => Worklist::Fifo((0..n).collect()),
            WorklistOrder::Shuffled(seed) => {
                Worklist::Shuffled((0..n).collect(), ChaCha8Rng::seed_from_u64(seed))
            }
        };
        let mut pops: u64 = 0;
        while let Some(v) = work.pop() {
            queued[v] = false;
            pops += 1;
            if pops.is_multiple_of(TIMEOUT_STRIDE) {
                if let Some(limit) = opts.timeout {
                    if start.elapsed() > limit {
                        return Err(SolveError::Timeout {
                            lifts: stats.total_lifts,
                        });
                    }
                }
            }
            if engine.measure[v].is_won() {
                continue;
            }
            let target = engine.target(v);
            if target <= engine.measure[v] {
                continue;
            }
            if let Some(t) = trace.as_mut() {
                t(v, &engine.measure[v], &target);
            }
            engine.measure[v] = target;
            engine.generation[v] += 1;
            stats.total_lifts += 1;
            stats.per_vertex[v] += 1;
            for &p in arena.predecessors(v) {
                if !queued[p] && !engine.measure[p].is_won() {
                    queued[p] = true;
                    stats.pushes += 1;
                    work.push(p);
                }
            }
        }
        stats.au_evaluations = engine.au_evaluations;
        let bound = lift_bound(arena, &space);
        if BigUint::from(stats.total_lifts) > bound {
            return Err(SolveError::BoundViolated {
                lifts: stats.total_lifts,
                bound,
            });
        }
        engine.measure
    };

    let winner: Vec<Player> = measure
        .iter()
        .map(|w| {
            if w.is_won() {
                Player::Even
            } else {
                Player::Odd
            }
        })
        .collect();
    let (even_strategy, odd_strategy) = extract_strategies(arena, &space, &measure);
    let mut solution = Solution {
        winner,
        measure,
        even_strategy,
        odd_strategy,
        stats,
        verdict: None,
        fallback_used: false,
        space,
    };
    if opts.verify {
        certify(arena, &mut solution);
    }
    solution.stats.wall_time = start.elapsed();
    Ok(solution)
}

/// Upper bound on the number of lifts: `|V|` times the size of the witness
/// set for this game's colour table and length.
pub fn lift_bound(arena: &Arena, space: &WitnessSpace) -> BigUint {
    let r = space.table().len().max(1) as u64;
    BigUint::from(arena.num_vertices()) * count_w(r, space.len() as u64)
}

/// Positional strategies read off a fixpoint. Odd moves to a successor whose
/// update is least; Even moves to a successor whose update is `Won`,
/// preferring successors already won by Even. Ties go to the smallest id.
pub fn extract_strategies(
    arena: &Arena,
    space: &WitnessSpace,
    measure: &[Witness],
) -> (Strategy, Strategy) {
    let n = arena.num_vertices();
    let mut even = Strategy::empty(Player::Even, n);
    let mut odd = Strategy::empty(Player::Odd, n);
    for v in 0..n {
        let d = space
            .letter(arena.colour(v))
            .expect("arena colours are known");
        let succ = arena.successors(v);
        let values: Vec<Witness> = succ
            .iter()
            .map(|&s| space.au_letter(&measure[s], &d))
            .collect();
        match (arena.owner(v), measure[v].is_won()) {
            (Player::Odd, false) => {
                let least = values.iter().min().unwrap();
                let k = values.iter().position(|x| x == least).unwrap();
                odd.set(v, succ[k]);
            }
            (Player::Even, true) => {
                let pick = (0..succ.len())
                    .find(|&k| measure[succ[k]].is_won())
                    .or_else(|| (0..succ.len()).find(|&k| values[k].is_won()))
                    .unwrap_or(0);
                even.set(v, succ[pick]);
            }
            _ => {}
        }
    }
    (even, odd)
}

/// Verifies the solution; if Even's extracted strategy is rejected, replaces
/// it by the baseline solver's strategy on Even's region and verifies again.
fn certify(arena: &Arena, solution: &mut Solution) {
    let verdict = verify_solution(
        arena,
        &solution.winner,
        &solution.even_strategy,
        &solution.odd_strategy,
    );
    if verdict.passed() {
        solution.verdict = Some(verdict);
        return;
    }
    let region = solution.region(Player::Even);
    if let Ok((sub, back)) = arena.induced(&region) {
        let pair = zielonka(&sub);
        if pair.winner.iter().all(|&w| w == Player::Even) {
            let mut even = Strategy::empty(Player::Even, arena.num_vertices());
            for (i, &v) in back.iter().enumerate() {
                if let Some(s) = pair.even_strategy.get(i) {
                    even.set(v, back[s]);
                }
            }
            let retry = verify_solution(arena, &solution.winner, &even, &solution.odd_strategy);
            if retry.passed() {
                log::info!(
                    "extracted even strategy rejected ({verdict:?}); using the baseline strategy"
                );
                solution.even_strategy = even;
                solution.fallback_used = true;
                solution.verdict = Some(retry);
                return;
            }
        }
    }
    solution.verdict = Some(verdict);
}

/// Solves with several shuffled worklist orders and reports whether all of
/// them reach the same fixpoint as the default order.
pub fn lift_order_independence_check(arena: &Arena, mode: UpdateMode, seeds: &[u64]) -> bool {
    let run = |order: WorklistOrder| {
        let opts = SolveOptions {
            mode,
            verify: false,
            order,
            ..SolveOptions::default()
        };
        solve(arena, &opts).expect("no timeout is set").measure
    };
    let reference = run(WorklistOrder::Fifo);
    seeds
        .iter()
        .all(|&s| run(WorklistOrder::Shuffled(s)) == reference)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pgio::{gen_random, gen_ring};
    use crate::witness::{Compression, RuleVariant};

    fn plain() -> SolveOptions {
        SolveOptions {
            mode: UpdateMode {
                rule: RuleVariant::ThisPaper,
                compression: Compression::Off,
            },
            ..SolveOptions::default()
        }
    }

    #[test]
    fn even_self_loop() {
        let a = Arena::from_parts(&[(Player::Even, 2)], &[(0, 0)]).unwrap();
        let s = solve(&a, &SolveOptions::default()).unwrap();
        assert_eq!(s.measure, vec![Witness::Won]);
        assert_eq!(s.winner, vec![Player::Even]);
        assert_eq!(s.even_strategy.get(0), Some(0));
        assert_eq!(s.verdict, Some(Verdict::Pass));
    }

    #[test]
    fn odd_self_loop() {
        let a = Arena::from_parts(&[(Player::Odd, 1)], &[(0, 0)]).unwrap();
        let s = solve(&a, &SolveOptions::default()).unwrap();
        assert_eq!(s.space.display(&s.measure[0]), "_");
        assert_eq!(s.winner, vec![Player::Odd]);
        assert_eq!(s.odd_strategy.get(0), Some(0));
    }

    #[test]
    fn ring_two_is_won_by_even() {
        for mode in UpdateMode::all() {
            let opts = SolveOptions {
                mode,
                ..SolveOptions::default()
            };
            let s = solve(&gen_ring(2).arena, &opts).unwrap();
            assert!(s.winner.iter().all(|&w| w == Player::Even), "{mode:?}");
            assert_eq!(s.verdict, Some(Verdict::Pass));
        }
    }

    #[test]
    fn ring_first_lifts_by_hand() {
        // ring n = 2 has e = 2, so L = 2. Without compression the first
        // FIFO round lifts vertex 1 (colour 1) to _,1 via its successor 2,
        // and so on; check the first three lifts against direct updates.
        let a = gen_ring(2).arena;
        let mut lifts = Vec::new();
        let mut record = |v: VertexId, _: &Witness, new: &Witness| lifts.push((v, new.clone()));
        let s = solve_traced(&a, &plain(), Some(&mut record)).unwrap();
        let space = &s.space;
        let mut measure = vec![space.bottom(); 4];
        for (v, new) in lifts.iter().take(3) {
            assert_eq!(&lift_target(&a, space, &measure, *v), new);
            measure[*v] = new.clone();
        }
        let shown: Vec<String> = lifts
            .iter()
            .take(3)
            .map(|(v, w)| format!("{}:{}", v + 1, space.display(w)))
            .collect();
        assert_eq!(shown, vec!["1:_,1", "2:_,2", "3:_,3"]);
    }

    #[test]
    fn lift_target_examples() {
        let a =
            Arena::from_parts(&[(Player::Even, 2), (Player::Odd, 1)], &[(0, 1), (1, 0)]).unwrap();
        let space = WitnessSpace::for_arena(&a, UpdateMode::default());
        let measure = vec![space.bottom(), Witness::Won];
        assert_eq!(lift_target(&a, &space, &measure, 0), Witness::Won);
        // colour 1 is the bottom odd colour and is ignored under compression
        let measure = vec![space.bottom(), space.bottom()];
        assert_eq!(lift_target(&a, &space, &measure, 1), space.bottom());
    }

    #[test]
    fn no_even_colours() {
        let a = Arena::from_parts(
            &[(Player::Even, 1), (Player::Odd, 3)],
            &[(0, 1), (1, 0), (1, 1)],
        )
        .unwrap();
        let s = solve(&a, &SolveOptions::default()).unwrap();
        assert_eq!(s.winner, vec![Player::Odd, Player::Odd]);
        assert_eq!(s.stats.total_lifts, 0);
        assert_eq!(s.verdict, Some(Verdict::Pass));
    }

    #[test]
    fn fixpoint_and_bound_on_random_games() {
        for seed in 0..20 {
            let a = gen_random(30, 1, 4, 6, seed).unwrap().arena;
            for mode in UpdateMode::all() {
                let opts = SolveOptions {
                    mode,
                    ..SolveOptions::default()
                };
                let s = solve(&a, &opts).unwrap();
                assert_eq!(find_liftable(&a, &s.space, &s.measure), None);
                assert!(BigUint::from(s.stats.total_lifts) <= lift_bound(&a, &s.space));
                assert_eq!(s.winner, zielonka(&a).winner, "seed {seed} {mode:?}");
                assert_eq!(s.verdict, Some(Verdict::Pass));
            }
        }
    }

    #[test]
    fn cache_does_not_change_the_fixpoint() {
        for seed in 0..10 {
            let a = gen_random(40, 1, 5, 8, seed).unwrap().arena;
            let with = solve(&a, &SolveOptions::default()).unwrap();
            let without = solve(
                &a,
                &SolveOptions {
                    edge_cache: false,
                    ..SolveOptions::default()
                },
            )
            .unwrap();
            assert_eq!(with.measure, without.measure);
            assert_eq!(with.stats.total_lifts, without.stats.total_lifts);
            assert!(with.stats.au_evaluations <= without.stats.au_evaluations);
        }
    }

    #[test]
    fn order_independence() {
        assert!(lift_order_independence_check(
            &gen_ring(2).arena,
            UpdateMode::default(),
            &[1, 2, 3, 4, 5]
        ));
        let single = Arena::from_parts(&[(Player::Odd, 4)], &[(0, 0)]).unwrap();
        assert!(lift_order_independence_check(
            &single,
            UpdateMode::default(),
            &[1, 2]
        ));
        for seed in 0..5 {
            let a = gen_random(20, 1, 3, 6, seed).unwrap().arena;
            assert!(lift_order_independence_check(
                &a,
                UpdateMode::default(),
                &[10, 11, 12, 13, 14]
            ));
        }
    }

    #[test]
    fn odd_strategy_stays_in_region() {
        // Odd at 0 can go to an even self-loop (1) or an odd self-loop (2)
        let a = Arena::from_parts(
            &[(Player::Odd, 0), (Player::Even, 2), (Player::Even, 1)],
            &[(0, 1), (0, 2), (1, 1), (2, 2)],
        )
        .unwrap();
        let s = solve(&a, &SolveOptions::default()).unwrap();
        assert_eq!(s.winner, vec![Player::Odd, Player::Even, Player::Odd]);
        assert_eq!(s.odd_strategy.get(0), Some(2));
    }

    #[test]
    fn timeout_is_reported() {
        let a = gen_ring(40).arena;
        let opts = SolveOptions {
            timeout: Some(Duration::from_nanos(1)),
            ..SolveOptions::default()
        };
        assert!(matches!(solve(&a, &opts), Err(SolveError::Timeout { .. })));
    }
}
