//! Forward play of Odd's delaying strategy on the lower-bound ring.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::arena::{witness_len, Colour};
use crate::witness::{Compression, RuleVariant, UpdateMode, Witness, WitnessSpace, BLANK};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimStep {
    /// Ring vertex by name, `1..=2n` (also its colour).
    pub vertex: usize,
    /// Witness after processing the vertex.
    pub witness: Witness,
}

#[derive(Clone, Debug)]
pub struct SimTrace {
    pub n: usize,
    pub rule: RuleVariant,
    pub steps: Vec<SimStep>,
    /// Distinct witnesses over the whole trace, including the start.
    pub distinct: usize,
    /// Distinct witnesses without odd entries.
    pub odd_free_distinct: usize,
    /// Number of shape-valid witnesses over blank and even colours.
    pub odd_free_total: usize,
    /// Whether the all-`2n` witness was reached within the step cap.
    pub reached_top: bool,
    /// True when every decision point produced exactly the next larger
    /// odd-free witness.
    pub follows_odd_free_order: bool,
    /// Steps where the strategy's reading was ambiguous or the order check
    /// failed.
    pub flags: Vec<String>,
    pub space: WitnessSpace,
}

impl SimTrace {
    /// CSV with one row per step: `step,vertex,witness`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,vertex,witness\n");
        for (i, s) in self.steps.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},\"{}\"",
                i + 1,
                s.vertex,
                self.space.display(&s.witness)
            );
        }
        out
    }
}

/// The ring's witness space: colours `1..=2n`, no compression, length for
/// `e = n` even vertices.
pub fn ring_space(n: usize, rule: RuleVariant) -> WitnessSpace {
    let colours: Vec<Colour> = (1..=2 * n as Colour).collect();
    let mode = UpdateMode {
        rule,
        compression: Compression::Off,
    };
    WitnessSpace::new(&colours, mode, witness_len(n), n as u64).expect("threshold fits")
}

/// All shape-valid witnesses whose entries are blank or even, ascending.
pub fn odd_free_witnesses(space: &WitnessSpace) -> Vec<Witness> {
    let evens: Vec<Colour> = space
        .table()
        .colours()
        .iter()
        .copied()
        .filter(|c| c % 2 == 0)
        .collect();
    let mut out = Vec::new();
    let mut cur = vec![None; space.len()];
    fn go(
        pos: usize,
        bound: Option<Colour>,
        evens: &[Colour],
        cur: &mut Vec<Option<Colour>>,
        out: &mut Vec<Vec<Option<Colour>>>,
    ) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        cur[pos] = None;
        go(pos + 1, bound, evens, cur, out);
        for &c in evens.iter().filter(|&&c| bound.is_none_or(|b| c <= b)) {
            cur[pos] = Some(c);
            go(pos + 1, Some(c), evens, cur, out);
        }
    }
    let mut tuples = Vec::new();
    go(0, None, &evens, &mut cur, &mut tuples);
    for t in tuples {
        out.push(space.witness(&t).expect("odd-free tuples are shape valid"));
    }
    out.sort();
    out
}

fn is_odd_free(space: &WitnessSpace, w: &Witness) -> bool {
    w.entries().is_some_and(|e| {
        e.iter()
            .all(|&r| r == BLANK || space.colour(r).is_some_and(|c| c % 2 == 0))
    })
}

/// Plays the forward update game on the ring of size `2n` from vertex 1
/// with Odd's delaying strategy, applying the raw update after every vertex,
/// until the all-`2n` witness appears or `max_steps` vertices were visited.
///
/// At an even vertex Odd moves on to the next vertex when position 0 holds
/// some `2i < 2n` and all entries equal to `2i` sit consecutively at the
/// bottom; otherwise (position 0 blank, a blank among the `2i` entries, or
/// `2i = 2n`) Odd returns to vertex 1.
pub fn simulate_lower_bound(n: usize, rule: RuleVariant, max_steps: usize) -> SimTrace {
    assert!(n >= 1);
    let space = ring_space(n, rule);
    let top_colour = 2 * n;
    let top = space
        .witness(&vec![Some(top_colour as Colour); space.len()])
        .expect("top witness is shape valid");
    let odd_free = odd_free_witnesses(&space);

    let mut w = space.bottom();
    let mut seen: HashSet<Witness> = HashSet::from([w.clone()]);
    let mut steps = Vec::new();
    let mut flags = Vec::new();
    let mut follows = true;
    let mut expected_idx = 0usize; // index in `odd_free` of the last decision witness

    let mut visit = |vertex: usize, w: &mut Witness, steps: &mut Vec<SimStep>| {
        *w = space
            .ru(w, vertex as Colour)
            .expect("ring colours are in the table");
        seen.insert(w.clone());
        steps.push(SimStep {
            vertex,
            witness: w.clone(),
        });
    };

    let mut token = 1usize;
    visit(1, &mut w, &mut steps);
    token += 1;
    visit(token, &mut w, &mut steps);
    while steps.len() < max_steps {
        // decision point at an even vertex
        match odd_free.get(expected_idx + 1) {
            Some(next) if *next == w => expected_idx += 1,
            _ => {
                follows = false;
                if flags.len() < 100 {
                    flags.push(format!(
                        "step {}: expected {}, reached {}",
                        steps.len(),
                        odd_free
                            .get(expected_idx + 1)
                            .map_or("-".into(), |x| space.display(x)),
                        space.display(&w)
                    ));
                }
                if let Some(i) = odd_free.iter().position(|x| *x == w) {
                    expected_idx = i;
                }
            }
        }
        if w == top {
            break;
        }
        let b = w.entries().expect("raw updates never produce Won");
        let next = if b[0] == BLANK {
            1
        } else {
            let low = b[0];
            let run = b.iter().take_while(|&&r| r == low).count();
            let consecutive = !b[run..].contains(&low);
            let c = space.colour(low).unwrap() as usize;
            if consecutive && c < top_colour {
                if c != token {
                    flags.push(format!(
                        "step {}: token at {token} but position 0 holds {c}",
                        steps.len()
                    ));
                }
                token + 1
            } else {
                if consecutive {
                    flags.push(format!(
                        "step {}: all entries {c} at the bottom, wrapping to 1",
                        steps.len()
                    ));
                }
                1
            }
        };
        token = next;
        visit(token, &mut w, &mut steps);
        if token % 2 == 1 {
            token += 1;
            visit(token, &mut w, &mut steps);
        }
    }

    let odd_free_distinct = seen.iter().filter(|x| is_odd_free(&space, x)).count();
    SimTrace {
        n,
        rule,
        distinct: seen.len(),
        odd_free_distinct,
        odd_free_total: odd_free.len(),
        reached_top: w == top,
        follows_odd_free_order: follows,
        flags,
        steps,
        space,
    }
}
