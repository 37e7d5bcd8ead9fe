//! Raw, capped and antagonistic updates, the blank-tail successor and the
//! truncation operator.

use super::{Compression, Rank, RuleVariant, Witness, WitnessError, WitnessSpace, BLANK};
use crate::arena::Colour;

/// A colour about to be processed, with everything the rules need
/// precomputed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Letter {
    pub colour: Colour,
    /// Rank written into a witness (after the top-odd rewrite).
    written: Rank,
    even: bool,
    /// Bottom odd colour under compression: processing it changes nothing.
    ignored: bool,
}

/// The lemma instance that produced a raw-update candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    /// Concatenate the even entries below `j` and close at the new position.
    Overflow(usize),
    /// Move the last position of the `j` entry to the new position.
    Local(usize),
    Stale,
    /// The colour is skipped entirely (compression of the bottom odd colour).
    Ignored,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub rule: Rule,
    pub entries: Box<[Rank]>,
}

impl WitnessSpace {
    pub fn letter(&self, colour: Colour) -> Result<Letter, WitnessError> {
        let table = &self.table;
        let compressed = table.compression() == Compression::On;
        let ignored = compressed && table.bottom_odd() == Some(colour);
        let written = if compressed && table.top_odd() == Some(colour) || ignored {
            BLANK
        } else {
            table
                .rank(colour)
                .ok_or(WitnessError::UnknownColour(colour))?
        };
        Ok(Letter {
            colour,
            written,
            even: colour.is_multiple_of(2),
            ignored,
        })
    }

    fn written_at(&self, d: &Letter, j: usize) -> Rank {
        if j == 0 && !d.even && self.table.compression() == Compression::On {
            BLANK
        } else {
            d.written
        }
    }

    fn overflow_allowed(&self, d: &Letter) -> bool {
        d.even || self.rule == RuleVariant::ThisPaper
    }

    fn entry_colour(&self, r: Rank) -> Option<Colour> {
        self.table.colour(r)
    }

    /// All lemma instances that apply, each with the tuple it produces.
    /// Conditions are checked literally position by position.
    #[allow(clippy::needless_range_loop)]
    pub fn ru_candidates(&self, b: &[Rank], d: &Letter) -> Vec<Candidate> {
        if d.ignored {
            return vec![Candidate {
                rule: Rule::Ignored,
                entries: b.into(),
            }];
        }
        let len = b.len();
        let dominated = |i: usize| self.entry_colour(b[i]).is_none_or(|c| c >= d.colour);
        let is_even = |i: usize| self.entry_colour(b[i]).is_some_and(|c| c % 2 == 0);
        let write = |j: usize| -> Box<[Rank]> {
            let mut c = b.to_vec();
            c[..j].fill(BLANK);
            c[j] = self.written_at(d, j);
            c.into_boxed_slice()
        };

        let mut out = Vec::new();
        if (0..len).all(dominated) {
            out.push(Candidate {
                rule: Rule::Stale,
                entries: b.into(),
            });
        }
        for j in 0..len {
            let above = (j + 1..len).all(dominated);
            if self.overflow_allowed(d) && above && (0..j).all(is_even) {
                out.push(Candidate {
                    rule: Rule::Overflow(j),
                    entries: write(j),
                });
            }
            if above && self.entry_colour(b[j]).is_some_and(|c| d.colour > c) {
                out.push(Candidate {
                    rule: Rule::Local(j),
                    entries: write(j),
                });
            }
        }
        out
    }

    /// Raw update by enumerating every lemma instance and keeping the
    /// largest result. Reference implementation for [`Self::ru`].
    pub fn ru_enumerate(&self, b: &[Rank], d: &Letter) -> Candidate {
        self.ru_candidates(b, d)
            .into_iter()
            .max_by(|x, y| x.entries.iter().rev().cmp(y.entries.iter().rev()))
            .expect("the local rule or the stale rule always applies")
    }

    /// Raw update: the highest position where an applicable rule writes a
    /// strictly better entry; otherwise the unchanged witness if nothing is
    /// below `d`; otherwise the lowest applicable write.
    pub(crate) fn ru_entries(&self, b: &[Rank], d: &Letter) -> Box<[Rank]> {
        if d.ignored {
            return b.into();
        }
        let len = b.len();
        // highest non-blank entry below d; rules may only write at or above it
        let low = (0..len)
            .rev()
            .find(|&i| self.entry_colour(b[i]).is_some_and(|c| c < d.colour));
        // overflow may write up to the first position that is not even
        let first_not_even = (0..len).find(|&i| !self.is_even_rank(b[i])).unwrap_or(len);
        let overflow_top = if self.overflow_allowed(d) {
            first_not_even.min(len - 1) as isize
        } else {
            -1
        };
        let start = low.unwrap_or(0);

        let applicable = |j: usize| Some(j) == low || (j as isize) <= overflow_top;
        let write = |j: usize| -> Box<[Rank]> {
            let mut c = b.to_vec();
            c[..j].fill(BLANK);
            c[j] = self.written_at(d, j);
            c.into_boxed_slice()
        };

        let hi = overflow_top.max(low.map_or(-1, |l| l as isize));
        let mut j = hi;
        while j >= start as isize {
            let ju = j as usize;
            if applicable(ju) && self.written_at(d, ju) > b[ju] {
                return write(ju);
            }
            j -= 1;
        }
        if low.is_none() {
            return b.into();
        }
        let lowest = (start..len)
            .find(|&j| applicable(j))
            .expect("the local rule applies at the highest entry below d");
        write(lowest)
    }

    pub fn ru(&self, w: &Witness, colour: Colour) -> Result<Witness, WitnessError> {
        let d = self.letter(colour)?;
        match w {
            Witness::Won => Ok(Witness::Won),
            Witness::Entries(b) => Ok(Witness::Entries(self.ru_entries(b, &d))),
        }
    }

    /// Capped update: `Won` stays `Won`; an even colour arriving when every
    /// entry is already even overflows past the top position and wins;
    /// otherwise the raw update, or `Won` when its value exceeds the
    /// threshold.
    pub fn up_letter(&self, w: &Witness, d: &Letter) -> Witness {
        let Witness::Entries(b) = w else {
            return Witness::Won;
        };
        if !d.ignored && d.even && b.iter().all(|&r| self.is_even_rank(r)) {
            return Witness::Won;
        }
        let c = self.ru_entries(b, d);
        if self.val_entries(&c) > self.threshold {
            Witness::Won
        } else {
            Witness::Entries(c)
        }
    }

    pub fn up(&self, w: &Witness, colour: Colour) -> Result<Witness, WitnessError> {
        Ok(self.up_letter(w, &self.letter(colour)?))
    }

    /// The least witness above `w` whose position 0 is blank, if any.
    pub fn min_blank_tail(&self, w: &Witness) -> Option<Witness> {
        let b = w.entries()?;
        if b[0] == BLANK {
            return Some(w.clone());
        }
        let mut bound: Vec<Option<Colour>> = vec![None; b.len()];
        let mut running = None;
        for i in (0..b.len()).rev() {
            bound[i] = running;
            if let Some(c) = self.entry_colour(b[i]) {
                running = Some(c);
            }
        }
        (1..b.len()).find_map(|i| {
            self.table.next_rank_at_most(b[i], bound[i]).map(|r| {
                let mut c = b.to_vec();
                c[..i].fill(BLANK);
                c[i] = r;
                Witness::Entries(c.into_boxed_slice())
            })
        })
    }

    /// Antagonistic update: the least capped update over all witnesses at or
    /// above `w`. A witness above `w` agrees with it above some position `i`
    /// and is strictly larger at `i`; among those, blanking everything below
    /// `i` is never worse, so only those completions are tried. The update of
    /// such a completion depends on its entry `x` at `i` only through whether
    /// the colour of `x` is below `d`, its parity and whether `d` would
    /// overwrite it. Within one class the result either keeps `x` or ignores
    /// it, so the least `x` of each class suffices.
    pub fn au_letter(&self, w: &Witness, d: &Letter) -> Witness {
        let Witness::Entries(b) = w else {
            return Witness::Won;
        };
        let mut best = self.up_letter(w, d);
        let compressed = self.table.compression() == Compression::On;
        let mut c = b.to_vec();
        let mut bound: Option<Colour> = None;
        let mut bounds = vec![None; b.len()];
        for i in (0..b.len()).rev() {
            bounds[i] = bound;
            if let Some(col) = self.entry_colour(b[i]) {
                bound = Some(col);
            }
        }
        for i in 0..b.len() {
            c[..i].fill(BLANK);
            c[i + 1..].copy_from_slice(&b[i + 1..]);
            let written = self.written_at(d, i);
            let mut seen = [false; 8];
            for x in b[i] + 1..=self.table.max_rank() {
                let col = self.entry_colour(x).expect("rank in table");
                if bounds[i].is_some_and(|m| col > m) || (i == 0 && compressed && col % 2 == 1) {
                    continue;
                }
                let class = usize::from(col < d.colour) * 4
                    + (col % 2) as usize * 2
                    + usize::from(x < written);
                if std::mem::replace(&mut seen[class], true) {
                    continue;
                }
                c[i] = x;
                let cand = self.up_letter(&Witness::Entries(c.clone().into_boxed_slice()), d);
                if cand < best {
                    best = cand;
                }
            }
        }
        best
    }

    /// The two-candidate shortcut `min(up(w), up(min_blank_tail(w)))`. It
    /// agrees with [`Self::au_letter`] on many inputs but not all: a larger
    /// witness whose top entry is numerically below an odd `d` can update
    /// to something smaller than both candidates.
    pub fn au_two_candidate(&self, w: &Witness, colour: Colour) -> Result<Witness, WitnessError> {
        let d = self.letter(colour)?;
        let direct = self.up_letter(w, &d);
        Ok(match self.min_blank_tail(w) {
            Some(lifted) if lifted != *w => direct.min(self.up_letter(&lifted, &d)),
            _ => direct,
        })
    }

    pub fn au(&self, w: &Witness, colour: Colour) -> Result<Witness, WitnessError> {
        Ok(self.au_letter(w, &self.letter(colour)?))
    }

    /// Truncation at even `x`: the highest entry below `x` becomes `x - 1`
    /// and everything under it is blanked. `Won` is returned unchanged.
    pub fn downarrow(&self, w: &Witness, x: Colour) -> Result<Witness, WitnessError> {
        if x % 2 == 1 {
            return Err(WitnessError::XOdd(x));
        }
        let Witness::Entries(b) = w else {
            return Ok(Witness::Won);
        };
        let Some(i) = (0..b.len())
            .rev()
            .find(|&s| self.entry_colour(b[s]).is_some_and(|c| c < x))
        else {
            return Ok(w.clone());
        };
        let below = self
            .table
            .rank(x - 1)
            .ok_or(WitnessError::UnknownColour(x - 1))?;
        let mut c = b.to_vec();
        c[..i].fill(BLANK);
        c[i] = below;
        Ok(Witness::Entries(c.into_boxed_slice()))
    }
}
