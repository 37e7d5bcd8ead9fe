//! Succinct witnesses and the rules that update them.
//!
//! A witness of length `L` is a tuple `b_{L-1}, ..., b_0` over the game's
//! colours plus a blank `_`, or the distinguished top element [`Witness::Won`].
//! Colours are stored as ordinal ranks from a [`ColourTable`] so that the
//! per-position order is a plain integer comparison: blank has rank 0, then
//! odd colours from largest to smallest, then even colours from smallest to
//! largest.
//!
//! Index `i` of the entry slice is position `b_i`; the most significant
//! position is the last element.

mod certify;
mod count;
mod update;

#[cfg(test)]
mod exhaustive;

pub use certify::{CertificationError, CertifiedWitness};
pub use count::{count_shape_valid, count_w};
pub use update::{Candidate, Letter, Rule};

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::arena::{Arena, Colour};

/// Ordinal of a colour in a [`ColourTable`]; 0 is the blank.
pub type Rank = u32;

pub const BLANK: Rank = 0;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WitnessError {
    #[error("colour {0} is not representable in this colour table")]
    UnknownColour(Colour),
    #[error("witness lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("val is undefined on Won")]
    ValOfWon,
    #[error("truncation colour {0} must be even")]
    XOdd(Colour),
    #[error("entries are not non-increasing from the most significant position")]
    ShapeViolation,
    #[error("cannot parse witness: {0}")]
    Parse(String),
    #[error("threshold {threshold} needs witnesses longer than {len}")]
    ThresholdTooLarge { threshold: u64, len: usize },
}

/// Which update lemmas are available to the raw update.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleVariant {
    /// Overflow may write odd colours too.
    ThisPaper,
    /// Overflow only writes even colours.
    CaludeOriginal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Compression {
    On,
    Off,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct UpdateMode {
    pub rule: RuleVariant,
    pub compression: Compression,
}

impl Default for UpdateMode {
    fn default() -> Self {
        UpdateMode {
            rule: RuleVariant::ThisPaper,
            compression: Compression::On,
        }
    }
}

impl UpdateMode {
    pub fn all() -> [UpdateMode; 4] {
        let mut out = [UpdateMode::default(); 4];
        let mut i = 0;
        for rule in [RuleVariant::ThisPaper, RuleVariant::CaludeOriginal] {
            for compression in [Compression::On, Compression::Off] {
                out[i] = UpdateMode { rule, compression };
                i += 1;
            }
        }
        out
    }
}

/// The colour order `_ < largest odd < ... < 3 < 1 < 0 < 2 < ... < largest
/// even`, evaluated straight from its definition. Used to cross-check the
/// rank encoding.
pub fn succ_cmp(a: Option<Colour>, b: Option<Colour>) -> Ordering {
    let geq = |b: Option<Colour>, c: Option<Colour>| match (b, c) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(b), Some(c)) if c % 2 == 1 => b % 2 == 0 || b <= c,
        (Some(b), Some(c)) => b % 2 == 0 && b >= c,
    };
    match (geq(a, b), geq(b, a)) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        (false, false) => unreachable!("colour order is total"),
    }
}

/// Rank encoding of the representable colours of one game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColourTable {
    /// `by_rank[r]` is the colour of rank `r`; index 0 is a placeholder.
    by_rank: Vec<Colour>,
    /// Representable colours ascending, with their ranks.
    sorted: Vec<(Colour, Rank)>,
    odd_count: usize,
    compression: Compression,
    top_odd: Option<Colour>,
    bottom_odd: Option<Colour>,
}

impl ColourTable {
    /// Builds the table for a game's colour set. With compression on, an odd
    /// top colour and an odd bottom colour are not representable.
    pub fn new(colours: &[Colour], compression: Compression) -> ColourTable {
        let mut all: Vec<Colour> = colours.to_vec();
        all.sort_unstable();
        all.dedup();
        let top_odd = all.last().copied().filter(|c| c % 2 == 1);
        let bottom_odd = all.first().copied().filter(|c| c % 2 == 1);
        let kept: Vec<Colour> = match compression {
            Compression::Off => all,
            Compression::On => all
                .into_iter()
                .filter(|&c| Some(c) != top_odd && Some(c) != bottom_odd)
                .collect(),
        };
        let mut by_rank = vec![0];
        by_rank.extend(kept.iter().rev().filter(|c| *c % 2 == 1));
        let odd_count = by_rank.len() - 1;
        by_rank.extend(kept.iter().filter(|c| *c % 2 == 0));
        let mut sorted: Vec<(Colour, Rank)> = by_rank
            .iter()
            .enumerate()
            .skip(1)
            .map(|(r, &c)| (c, r as Rank))
            .collect();
        sorted.sort_unstable();
        ColourTable {
            by_rank,
            sorted,
            odd_count,
            compression,
            top_odd,
            bottom_odd,
        }
    }

    /// Number of representable colours.
    pub fn len(&self) -> usize {
        self.by_rank.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn compression(&self) -> Compression {
        self.compression
    }

    pub fn top_odd(&self) -> Option<Colour> {
        self.top_odd
    }

    pub fn bottom_odd(&self) -> Option<Colour> {
        self.bottom_odd
    }

    pub fn max_rank(&self) -> Rank {
        self.len() as Rank
    }

    pub fn rank(&self, colour: Colour) -> Option<Rank> {
        self.sorted
            .binary_search_by_key(&colour, |&(c, _)| c)
            .ok()
            .map(|i| self.sorted[i].1)
    }

    /// `None` for the blank.
    pub fn colour(&self, rank: Rank) -> Option<Colour> {
        if rank == BLANK {
            None
        } else {
            Some(self.by_rank[rank as usize])
        }
    }

    /// Representable colours in rank order.
    pub fn colours(&self) -> &[Colour] {
        &self.by_rank[1..]
    }

    pub fn cmp_colour(
        &self,
        a: Option<Colour>,
        b: Option<Colour>,
    ) -> Result<Ordering, WitnessError> {
        let rank = |c: Option<Colour>| match c {
            None => Ok(BLANK),
            Some(c) => self.rank(c).ok_or(WitnessError::UnknownColour(c)),
        };
        Ok(rank(a)?.cmp(&rank(b)?))
    }

    /// Smallest rank above `rank` whose colour is at most `bound` in the
    /// natural order (no bound when `None`).
    pub(crate) fn next_rank_at_most(&self, rank: Rank, bound: Option<Colour>) -> Option<Rank> {
        let mut cand = rank as usize + 1;
        if cand > self.len() {
            return None;
        }
        let Some(bound) = bound else {
            return Some(cand as Rank);
        };
        if cand <= self.odd_count {
            // odd block: colours decrease with rank
            let block = &self.by_rank[cand..=self.odd_count];
            let skip = block.partition_point(|&c| c > bound);
            if skip < block.len() {
                return Some((cand + skip) as Rank);
            }
            cand = self.odd_count + 1;
        }
        if cand <= self.len() && self.by_rank[cand] <= bound {
            Some(cand as Rank)
        } else {
            None
        }
    }
}

/// A witness tuple or the top element `Won`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Witness {
    Won,
    /// `entries[i]` is the rank at position `b_i`.
    Entries(Box<[Rank]>),
}

impl Witness {
    pub fn bottom(len: usize) -> Witness {
        Witness::Entries(vec![BLANK; len].into_boxed_slice())
    }

    pub fn is_won(&self) -> bool {
        matches!(self, Witness::Won)
    }

    pub fn entries(&self) -> Option<&[Rank]> {
        match self {
            Witness::Won => None,
            Witness::Entries(e) => Some(e),
        }
    }
}

fn cmp_entries(a: &[Rank], b: &[Rank]) -> Ordering {
    a.len()
        .cmp(&b.len())
        .then_with(|| a.iter().rev().cmp(b.iter().rev()))
}

impl Ord for Witness {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Witness::Won, Witness::Won) => Ordering::Equal,
            (Witness::Won, _) => Ordering::Greater,
            (_, Witness::Won) => Ordering::Less,
            (Witness::Entries(a), Witness::Entries(b)) => cmp_entries(a, b),
        }
    }
}

impl PartialOrd for Witness {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Everything needed to evaluate the witness rules for one game: the colour
/// table, the rule variant, the witness length and the win threshold `e`.
#[derive(Clone, Debug)]
pub struct WitnessSpace {
    table: ColourTable,
    rule: RuleVariant,
    len: usize,
    threshold: u64,
}

impl WitnessSpace {
    /// `threshold` is the number of even-coloured vertices; a witness whose
    /// value exceeds it becomes `Won`. It must be below `2^len`.
    pub fn new(
        colours: &[Colour],
        mode: UpdateMode,
        len: usize,
        threshold: u64,
    ) -> Result<WitnessSpace, WitnessError> {
        if len == 0 || len >= 64 || threshold >= 1u64 << len {
            return Err(WitnessError::ThresholdTooLarge { threshold, len });
        }
        Ok(WitnessSpace {
            table: ColourTable::new(colours, mode.compression),
            rule: mode.rule,
            len,
            threshold,
        })
    }

    pub fn for_arena(arena: &Arena, mode: UpdateMode) -> WitnessSpace {
        let stats = arena.stats();
        WitnessSpace::new(
            arena.colours(),
            mode,
            stats.witness_len,
            stats.even_vertices as u64,
        )
        .expect("witness length always covers the even vertex count")
    }

    pub fn table(&self) -> &ColourTable {
        &self.table
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn rule(&self) -> RuleVariant {
        self.rule
    }

    pub fn mode(&self) -> UpdateMode {
        UpdateMode {
            rule: self.rule,
            compression: self.table.compression(),
        }
    }

    pub fn bottom(&self) -> Witness {
        Witness::bottom(self.len)
    }

    pub fn colour(&self, rank: Rank) -> Option<Colour> {
        self.table.colour(rank)
    }

    /// Builds a witness from colours listed most significant first
    /// (`b_{L-1}` ... `b_0`), the way they are written down.
    pub fn witness(&self, entries: &[Option<Colour>]) -> Result<Witness, WitnessError> {
        if entries.len() != self.len {
            return Err(WitnessError::LengthMismatch(entries.len(), self.len));
        }
        let ranks = entries
            .iter()
            .rev()
            .map(|e| match *e {
                None => Ok(BLANK),
                Some(c) => self.table.rank(c).ok_or(WitnessError::UnknownColour(c)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let w = Witness::Entries(ranks.into_boxed_slice());
        if !self.is_shape_valid(&w) {
            return Err(WitnessError::ShapeViolation);
        }
        Ok(w)
    }

    /// Colours most significant first; `None` for `Won`.
    pub fn colours_of(&self, w: &Witness) -> Option<Vec<Option<Colour>>> {
        w.entries()
            .map(|e| e.iter().rev().map(|&r| self.table.colour(r)).collect())
    }

    /// Debug form: `6,_,2` or `WON`.
    pub fn display(&self, w: &Witness) -> String {
        match self.colours_of(w) {
            None => "WON".to_string(),
            Some(cs) => cs
                .iter()
                .map(|c| c.map_or_else(|| "_".to_string(), |c| c.to_string()))
                .collect::<Vec<_>>()
                .join(","),
        }
    }

    pub fn parse(&self, text: &str) -> Result<Witness, WitnessError> {
        let text = text.trim();
        if text == "WON" {
            return Ok(Witness::Won);
        }
        let entries = text
            .split(',')
            .map(|tok| match tok.trim() {
                "_" => Ok(None),
                t => t
                    .parse::<Colour>()
                    .map(Some)
                    .map_err(|_| WitnessError::Parse(format!("bad entry {t:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.witness(&entries)
    }

    /// Non-blank entries are non-increasing (natural order) from the most
    /// significant position down, and all ranks are in the table.
    pub fn is_shape_valid(&self, w: &Witness) -> bool {
        let Some(e) = w.entries() else {
            return true;
        };
        if e.len() != self.len || e.iter().any(|&r| r > self.table.max_rank()) {
            return false;
        }
        let mut bound: Option<Colour> = None;
        for &r in e.iter().rev() {
            if let Some(c) = self.table.colour(r) {
                if bound.is_some_and(|b| c > b) {
                    return false;
                }
                bound = Some(c);
            }
        }
        true
    }

    /// Membership in the witness set: shape-valid, and with compression on,
    /// no odd colour at position 0.
    pub fn contains(&self, w: &Witness) -> bool {
        self.is_shape_valid(w)
            && match (self.table.compression(), w.entries()) {
                (Compression::On, Some(e)) => self.table.colour(e[0]).is_none_or(|c| c % 2 == 0),
                _ => true,
            }
    }

    pub fn cmp(&self, a: &Witness, b: &Witness) -> Result<Ordering, WitnessError> {
        if let (Some(x), Some(y)) = (a.entries(), b.entries()) {
            if x.len() != y.len() {
                return Err(WitnessError::LengthMismatch(x.len(), y.len()));
            }
        }
        Ok(a.cmp(b))
    }

    /// Sum of `2^i` over positions holding an even colour.
    pub fn val(&self, w: &Witness) -> Result<u64, WitnessError> {
        let e = w.entries().ok_or(WitnessError::ValOfWon)?;
        Ok(self.val_entries(e))
    }

    pub(crate) fn val_entries(&self, e: &[Rank]) -> u64 {
        e.iter()
            .enumerate()
            .filter(|&(_, &r)| self.is_even_rank(r))
            .map(|(i, _)| 1u64 << i)
            .sum()
    }

    pub(crate) fn is_even_rank(&self, r: Rank) -> bool {
        r as usize > self.table.odd_count
    }

    /// Every member of the witness set, in ascending order, ending with `Won`.
    pub fn enumerate(&self) -> Vec<Witness> {
        fn go(
            space: &WitnessSpace,
            pos: usize,
            bound: Option<Colour>,
            cur: &mut Vec<Rank>,
            out: &mut Vec<Witness>,
        ) {
            if pos == 0 {
                let mut e = cur.clone();
                e.reverse();
                out.push(Witness::Entries(e.into_boxed_slice()));
                return;
            }
            let i = pos - 1;
            for r in 0..=space.table.max_rank() {
                let c = space.table.colour(r);
                if let (Some(c), Some(b)) = (c, bound) {
                    if c > b {
                        continue;
                    }
                }
                if i == 0
                    && space.table.compression() == Compression::On
                    && c.is_some_and(|c| c % 2 == 1)
                {
                    continue;
                }
                cur.push(r);
                go(space, i, c.or(bound), cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(
            self,
            self.len,
            None,
            &mut Vec::with_capacity(self.len),
            &mut out,
        );
        out.sort();
        out.push(Witness::Won);
        out
    }
}

impl fmt::Display for RuleVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleVariant::ThisPaper => write!(f, "paper"),
            RuleVariant::CaludeOriginal => write!(f, "calude"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space_2_8() -> WitnessSpace {
        let colours: Vec<Colour> = (2..=8).collect();
        WitnessSpace::new(
            &colours,
            UpdateMode {
                rule: RuleVariant::ThisPaper,
                compression: Compression::Off,
            },
            3,
            4,
        )
        .unwrap()
    }

    #[test]
    fn rank_encoding_matches_worked_example() {
        let t = ColourTable::new(&(2..=8).collect::<Vec<_>>(), Compression::Off);
        let expected = [(7, 1), (5, 2), (3, 3), (2, 4), (4, 5), (6, 6), (8, 7)];
        for (c, r) in expected {
            assert_eq!(t.rank(c), Some(r), "colour {c}");
            assert_eq!(t.colour(r), Some(c));
        }
        assert_eq!(t.colour(0), None);
    }

    #[test]
    fn colour_comparisons() {
        let t = ColourTable::new(&(1..=9).collect::<Vec<_>>(), Compression::Off);
        assert_eq!(t.cmp_colour(Some(2), Some(9)).unwrap(), Ordering::Greater);
        assert_eq!(t.cmp_colour(Some(3), Some(5)).unwrap(), Ordering::Greater);
        assert_eq!(t.cmp_colour(None, Some(9)).unwrap(), Ordering::Less);
        assert_eq!(
            t.cmp_colour(Some(10), Some(2)).unwrap_err(),
            WitnessError::UnknownColour(10)
        );
    }

    #[test]
    fn rank_order_agrees_with_definition() {
        let colours: Vec<Colour> = vec![0, 1, 2, 3, 4, 5, 6, 9, 12, 13];
        let t = ColourTable::new(&colours, Compression::Off);
        let all: Vec<Option<Colour>> = std::iter::once(None)
            .chain(colours.iter().map(|&c| Some(c)))
            .collect();
        for &a in &all {
            for &b in &all {
                assert_eq!(
                    t.cmp_colour(a, b).unwrap(),
                    succ_cmp(a, b),
                    "{a:?} vs {b:?}"
                );
            }
        }
    }

    #[test]
    fn compression_drops_odd_extremes() {
        let t = ColourTable::new(&[1, 2, 3], Compression::On);
        assert_eq!(t.colours(), &[2]);
        assert_eq!((t.top_odd(), t.bottom_odd()), (Some(3), Some(1)));
        let t = ColourTable::new(&[1, 2, 3], Compression::Off);
        assert_eq!(t.colours(), &[3, 1, 2]);
    }

    fn space_2_9() -> WitnessSpace {
        let colours: Vec<Colour> = (2..=9).collect();
        WitnessSpace::new(
            &colours,
            UpdateMode {
                rule: RuleVariant::ThisPaper,
                compression: Compression::Off,
            },
            3,
            7,
        )
        .unwrap()
    }

    #[test]
    fn witness_order_examples() {
        let s = space_2_9();
        let a = s.parse("9,8,_").unwrap();
        let b = s.parse("_,4,2").unwrap();
        assert_eq!(s.cmp(&a, &b).unwrap(), Ordering::Greater);
        assert!(Witness::Won > s.parse("8,8,8").unwrap());
        assert!(s.parse("6,_,_").unwrap() > s.parse("_,6,_").unwrap());
        let short = Witness::bottom(2);
        assert_eq!(
            s.cmp(&a, &short).unwrap_err(),
            WitnessError::LengthMismatch(3, 2)
        );
    }

    #[test]
    fn val_examples() {
        let s = space_2_9();
        assert_eq!(s.val(&s.parse("_,4,2").unwrap()).unwrap(), 3);
        assert_eq!(s.val(&s.parse("9,8,_").unwrap()).unwrap(), 2);
        assert_eq!(s.val(&s.bottom()).unwrap(), 0);
        assert_eq!(s.val(&Witness::Won).unwrap_err(), WitnessError::ValOfWon);
    }

    #[test]
    fn display_round_trip() {
        let s = space_2_8();
        for text in ["6,_,2", "_,_,_", "8,8,8", "WON"] {
            assert_eq!(s.display(&s.parse(text).unwrap()), text);
        }
        assert_eq!(s.parse("2,4,_").unwrap_err(), WitnessError::ShapeViolation);
        assert_eq!(
            s.parse("9,_,_").unwrap_err(),
            WitnessError::UnknownColour(9)
        );
        assert!(matches!(s.parse("x,_,_"), Err(WitnessError::Parse(_))));
    }

    #[test]
    fn threshold_must_fit() {
        let mode = UpdateMode::default();
        assert!(WitnessSpace::new(&[2], mode, 2, 3).is_ok());
        assert!(WitnessSpace::new(&[2], mode, 2, 4).is_err());
    }

    #[test]
    fn next_rank_respects_bound() {
        let t = ColourTable::new(&(2..=8).collect::<Vec<_>>(), Compression::Off);
        // from blank under bound 6: 7 is too large, 5 is next
        assert_eq!(t.next_rank_at_most(0, Some(6)), t.rank(5));
        assert_eq!(t.next_rank_at_most(0, None), t.rank(7));
        assert_eq!(t.next_rank_at_most(t.rank(3).unwrap(), Some(6)), t.rank(2));
        assert_eq!(t.next_rank_at_most(t.rank(6).unwrap(), Some(6)), None);
        assert_eq!(t.next_rank_at_most(t.rank(8).unwrap(), None), None);
        // brute force over all ranks and bounds
        for r in 0..=t.max_rank() {
            for bound in [None, Some(2), Some(3), Some(5), Some(8)] {
                let brute = (r + 1..=t.max_rank())
                    .find(|&k| bound.is_none_or(|b| t.colour(k).unwrap() <= b));
                assert_eq!(
                    t.next_rank_at_most(r, bound),
                    brute,
                    "rank {r} bound {bound:?}"
                );
            }
        }
    }

    #[test]
    fn enumeration_is_sorted_and_valid() {
        let s = space_2_8();
        let all = s.enumerate();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert!(all.iter().all(|w| s.contains(w)));
        assert_eq!(all.last(), Some(&Witness::Won));
        assert_eq!(all[0], s.bottom());
    }
}
