//! Python bindings. Witnesses cross the boundary in their text form
//! (`"6,_,2"` or `"WON"`), vertices as dense indices.

use std::time::Duration;

use num_bigint::BigUint;
use pyo3::exceptions::{PyTimeoutError, PyValueError};
use pyo3::prelude::*;

use parigrade_core::arena::{Colour, Player, Strategy};
use parigrade_core::baseline::{
    simulate_lower_bound, verify_solution, zielonka as zielonka_impl, Verdict,
};
use parigrade_core::pgio::{
    emit_pgsolver, emit_solution, gen_random, gen_ring, parse_pgsolver, SolutionDocument,
};
use parigrade_core::solver::{self, SolveError, SolveOptions, WorklistOrder};
use parigrade_core::witness::{self, Compression, RuleVariant, UpdateMode, Witness};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn mode_of(rule: &str, compress: bool) -> PyResult<UpdateMode> {
    let rule = match rule {
        "paper" => RuleVariant::ThisPaper,
        "calude" => RuleVariant::CaludeOriginal,
        other => {
            return Err(value_err(format!(
                "unknown rule {other:?}, expected 'paper' or 'calude'"
            )))
        }
    };
    Ok(UpdateMode {
        rule,
        compression: if compress {
            Compression::On
        } else {
            Compression::Off
        },
    })
}

fn player_index(p: Player) -> u32 {
    p.index() as u32
}

/// A parity game in PGSolver form.
#[pyclass(module = "parigrade", frozen)]
struct Game {
    inner: parigrade_core::pgio::Game,
}

#[pymethods]
impl Game {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_pgsolver(text)
            .map(|inner| Game { inner })
            .map_err(value_err)
    }

    #[staticmethod]
    fn ring(n: usize) -> PyResult<Self> {
        if n == 0 {
            return Err(value_err("ring size must be at least 1"));
        }
        Ok(Game { inner: gen_ring(n) })
    }

    #[staticmethod]
    #[pyo3(signature = (n, min_outdeg, max_outdeg, max_colour, seed=0))]
    fn random(
        n: usize,
        min_outdeg: usize,
        max_outdeg: usize,
        max_colour: Colour,
        seed: u64,
    ) -> PyResult<Self> {
        gen_random(n, min_outdeg, max_outdeg, max_colour, seed)
            .map(|inner| Game { inner })
            .map_err(value_err)
    }

    fn to_pgsolver(&self) -> String {
        emit_pgsolver(&self.inner)
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.inner.arena.num_vertices()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.arena.num_edges()
    }

    /// Original PGSolver id of every dense vertex.
    #[getter]
    fn ids(&self) -> Vec<u64> {
        self.inner.ids.clone()
    }

    fn owner(&self, v: usize) -> PyResult<u32> {
        self.check(v)?;
        Ok(player_index(self.inner.arena.owner(v)))
    }

    fn colour(&self, v: usize) -> PyResult<Colour> {
        self.check(v)?;
        Ok(self.inner.arena.colour(v))
    }

    fn successors(&self, v: usize) -> PyResult<Vec<usize>> {
        self.check(v)?;
        Ok(self.inner.arena.successors(v).to_vec())
    }

    fn __len__(&self) -> usize {
        self.num_vertices()
    }

    fn __repr__(&self) -> String {
        format!(
            "Game(vertices={}, edges={})",
            self.num_vertices(),
            self.num_edges()
        )
    }
}

impl Game {
    fn check(&self, v: usize) -> PyResult<()> {
        if v < self.inner.arena.num_vertices() {
            Ok(())
        } else {
            Err(value_err(format!("vertex {v} out of range")))
        }
    }
}

/// Winning regions, strategies and lift statistics.
#[pyclass(module = "parigrade", frozen, get_all)]
struct Solution {
    /// 0 for Even, 1 for Odd, per dense vertex.
    winners: Vec<u32>,
    even_strategy: Vec<Option<usize>>,
    odd_strategy: Vec<Option<usize>>,
    /// Fixpoint witnesses in text form; empty for the baseline solver.
    measure: Vec<String>,
    total_lifts: u64,
    max_vertex_lifts: u64,
    wall_time: f64,
    /// `None` when verification was skipped.
    verified: Option<bool>,
    fallback_used: bool,
}

#[pymethods]
impl Solution {
    /// The solution file for `game`.
    fn to_text(&self, game: &Game) -> PyResult<String> {
        let n = game.inner.arena.num_vertices();
        if self.winners.len() != n {
            return Err(value_err("solution does not belong to this game"));
        }
        let doc = SolutionDocument {
            winners: self
                .winners
                .iter()
                .map(|&w| if w == 0 { Player::Even } else { Player::Odd })
                .collect(),
            strategy: (0..n)
                .map(|v| {
                    if self.winners[v] == 0 {
                        self.even_strategy[v]
                    } else {
                        self.odd_strategy[v]
                    }
                })
                .collect(),
            stats: None,
        };
        Ok(emit_solution(&doc, &game.inner))
    }

    fn __repr__(&self) -> String {
        let even = self.winners.iter().filter(|&&w| w == 0).count();
        format!(
            "Solution(even={even}, odd={}, lifts={}, verified={})",
            self.winners.len() - even,
            self.total_lifts,
            match self.verified {
                Some(true) => "True",
                Some(false) => "False",
                None => "None",
            }
        )
    }
}

/// Solves `game` by progress-measure lifting.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (game, rule="paper", compress=true, edge_cache=true, verify=true, timeout=None, seed=None))]
fn solve(
    py: Python<'_>,
    game: &Game,
    rule: &str,
    compress: bool,
    edge_cache: bool,
    verify: bool,
    timeout: Option<f64>,
    seed: Option<u64>,
) -> PyResult<Solution> {
    if timeout.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
        return Err(value_err("timeout must be a positive number of seconds"));
    }
    let opts = SolveOptions {
        mode: mode_of(rule, compress)?,
        edge_cache,
        verify,
        timeout: timeout.map(Duration::from_secs_f64),
        order: seed.map_or(WorklistOrder::Fifo, WorklistOrder::Shuffled),
    };
    let arena = &game.inner.arena;
    let s = py
        .detach(|| solver::solve(arena, &opts))
        .map_err(|e| match e {
            SolveError::Timeout { .. } => PyTimeoutError::new_err(e.to_string()),
            other => value_err(other),
        })?;
    Ok(Solution {
        winners: s.winner.iter().copied().map(player_index).collect(),
        measure: s.measure.iter().map(|w| s.space.display(w)).collect(),
        total_lifts: s.stats.total_lifts,
        max_vertex_lifts: s.stats.max_vertex_lifts(),
        wall_time: s.stats.wall_time.as_secs_f64(),
        verified: s.verdict.as_ref().map(Verdict::passed),
        fallback_used: s.fallback_used,
        even_strategy: s.even_strategy.choice,
        odd_strategy: s.odd_strategy.choice,
    })
}

/// Solves `game` with the recursive baseline algorithm.
#[pyfunction]
fn zielonka(py: Python<'_>, game: &Game) -> Solution {
    let arena = &game.inner.arena;
    let (r, ok) = py.detach(|| {
        let r = zielonka_impl(arena);
        let ok = verify_solution(arena, &r.winner, &r.even_strategy, &r.odd_strategy).passed();
        (r, ok)
    });
    Solution {
        winners: r.winner.iter().copied().map(player_index).collect(),
        even_strategy: r.even_strategy.choice,
        odd_strategy: r.odd_strategy.choice,
        measure: Vec::new(),
        total_lifts: 0,
        max_vertex_lifts: 0,
        wall_time: 0.0,
        verified: Some(ok),
        fallback_used: false,
    }
}

/// Checks claimed regions and strategies; returns `None` on success or the
/// reason for rejection.
#[pyfunction]
fn verify(
    game: &Game,
    winners: Vec<u32>,
    even_strategy: Vec<Option<usize>>,
    odd_strategy: Vec<Option<usize>>,
) -> PyResult<Option<String>> {
    let n = game.inner.arena.num_vertices();
    if winners.len() != n || even_strategy.len() != n || odd_strategy.len() != n {
        return Err(value_err(format!("expected {n} entries per list")));
    }
    let winner: Vec<Player> = winners
        .iter()
        .map(|&w| match w {
            0 => Ok(Player::Even),
            1 => Ok(Player::Odd),
            _ => Err(value_err("winners must be 0 or 1")),
        })
        .collect::<PyResult<_>>()?;
    let even = Strategy {
        player: Player::Even,
        choice: even_strategy,
    };
    let odd = Strategy {
        player: Player::Odd,
        choice: odd_strategy,
    };
    Ok(
        match verify_solution(&game.inner.arena, &winner, &even, &odd) {
            Verdict::Pass => None,
            Verdict::Fail(f) => Some(f.to_string()),
        },
    )
}

/// Witnesses of a fixed length over a colour set.
#[pyclass(module = "parigrade", frozen)]
struct WitnessSpace {
    inner: witness::WitnessSpace,
}

#[pymethods]
impl WitnessSpace {
    #[new]
    #[pyo3(signature = (colours, length, threshold, rule="paper", compress=false))]
    fn new(
        colours: Vec<Colour>,
        length: usize,
        threshold: u64,
        rule: &str,
        compress: bool,
    ) -> PyResult<Self> {
        witness::WitnessSpace::new(&colours, mode_of(rule, compress)?, length, threshold)
            .map(|inner| WitnessSpace { inner })
            .map_err(value_err)
    }

    #[getter]
    fn length(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn threshold(&self) -> u64 {
        self.inner.threshold()
    }

    fn bottom(&self) -> String {
        self.inner.display(&self.inner.bottom())
    }

    fn ru(&self, w: &str, colour: Colour) -> PyResult<String> {
        self.apply(w, |s, w| s.ru(w, colour))
    }

    fn up(&self, w: &str, colour: Colour) -> PyResult<String> {
        self.apply(w, |s, w| s.up(w, colour))
    }

    fn au(&self, w: &str, colour: Colour) -> PyResult<String> {
        self.apply(w, |s, w| s.au(w, colour))
    }

    /// `min(up(w), up(min_blank_tail(w)))`, which is not always `au`.
    fn au_two_candidate(&self, w: &str, colour: Colour) -> PyResult<String> {
        self.apply(w, |s, w| s.au_two_candidate(w, colour))
    }

    fn downarrow(&self, w: &str, x: Colour) -> PyResult<String> {
        self.apply(w, |s, w| s.downarrow(w, x))
    }

    fn val(&self, w: &str) -> PyResult<u64> {
        let w = self.inner.parse(w).map_err(value_err)?;
        self.inner.val(&w).map_err(value_err)
    }

    /// -1, 0 or 1 as `a` is below, equal to or above `b`.
    fn compare(&self, a: &str, b: &str) -> PyResult<i8> {
        let a = self.inner.parse(a).map_err(value_err)?;
        let b = self.inner.parse(b).map_err(value_err)?;
        Ok(self.inner.cmp(&a, &b).map_err(value_err)? as i8)
    }

    /// Every witness in ascending order, `"WON"` last.
    fn enumerate(&self) -> Vec<String> {
        self.inner
            .enumerate()
            .iter()
            .map(|w| self.inner.display(w))
            .collect()
    }
}

impl WitnessSpace {
    fn apply(
        &self,
        w: &str,
        f: impl FnOnce(&witness::WitnessSpace, &Witness) -> Result<Witness, witness::WitnessError>,
    ) -> PyResult<String> {
        let w = self.inner.parse(w).map_err(value_err)?;
        f(&self.inner, &w)
            .map(|out| self.inner.display(&out))
            .map_err(value_err)
    }
}

/// Number of witnesses with `r` relevant colours and length `l`, `Won`
/// included.
#[pyfunction]
fn count_w(r: u64, l: u64) -> PyResult<BigUint> {
    if r == 0 {
        return Err(value_err("r must be at least 1"));
    }
    Ok(witness::count_w(r, l))
}

/// Forward play of Odd's delaying strategy on the ring of size `2n`.
#[pyfunction]
#[pyo3(signature = (n, rule="calude", max_steps=1_000_000))]
fn simulate(py: Python<'_>, n: usize, rule: &str, max_steps: usize) -> PyResult<Py<PyAny>> {
    if n == 0 {
        return Err(value_err("n must be at least 1"));
    }
    let mode = mode_of(rule, false)?;
    let t = py.detach(|| simulate_lower_bound(n, mode.rule, max_steps));
    let out = pyo3::types::PyDict::new(py);
    out.set_item("steps", t.steps.len())?;
    out.set_item("distinct", t.distinct)?;
    out.set_item("odd_free_distinct", t.odd_free_distinct)?;
    out.set_item("odd_free_total", t.odd_free_total)?;
    out.set_item("reached_top", t.reached_top)?;
    out.set_item("follows_odd_free_order", t.follows_odd_free_order)?;
    out.set_item("csv", t.to_csv())?;
    Ok(out.into_any().unbind())
}

#[pymodule]
fn parigrade(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Game>()?;
    m.add_class::<Solution>()?;
    m.add_class::<WitnessSpace>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(zielonka, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(count_w, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
