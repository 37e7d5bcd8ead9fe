//! Forward witnesses that carry their i-witness position lists, so every
//! update can be checked against the witness properties directly.

use thiserror::Error;

use super::update::Rule;
use super::{Rank, Witness, WitnessError, WitnessSpace, BLANK};
use crate::arena::Colour;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertificationError {
    #[error(transparent)]
    Witness(#[from] WitnessError),
    #[error("entry {entry}: {what}")]
    Broken { entry: usize, what: String },
    #[error("even chain of length {got} does not match value {val}")]
    ChainLength { got: usize, val: u64 },
}

fn broken(entry: usize, what: impl Into<String>) -> CertificationError {
    CertificationError::Broken {
        entry,
        what: what.into(),
    }
}

/// A witness for a stored play prefix together with explicit position lists.
/// Positions are 1-based into the prefix. Only meaningful for spaces with
/// compression off, since compressed updates drop entries the lists need.
#[derive(Clone, Debug)]
pub struct CertifiedWitness {
    entries: Vec<Rank>,
    lists: Vec<Option<Vec<usize>>>,
    play: Vec<Colour>,
}

impl CertifiedWitness {
    pub fn new(space: &WitnessSpace) -> Self {
        CertifiedWitness {
            entries: vec![BLANK; space.len()],
            lists: vec![None; space.len()],
            play: Vec::new(),
        }
    }

    pub fn witness(&self) -> Witness {
        Witness::Entries(self.entries.clone().into_boxed_slice())
    }

    pub fn play(&self) -> &[Colour] {
        &self.play
    }

    pub fn positions(&self, i: usize) -> Option<&[usize]> {
        self.lists[i].as_deref()
    }

    /// Appends a vertex of colour `colour` to the play, applies the raw
    /// update and rebuilds the position lists from the rule that produced it,
    /// then checks every witness property.
    pub fn push(
        &mut self,
        space: &WitnessSpace,
        colour: Colour,
    ) -> Result<Rule, CertificationError> {
        let d = space.letter(colour)?;
        let cand = space.ru_enumerate(&self.entries, &d);
        self.play.push(colour);
        let m = self.play.len();
        match cand.rule {
            Rule::Stale | Rule::Ignored => {}
            Rule::Overflow(j) => {
                let mut list: Vec<usize> = (0..j)
                    .rev()
                    .flat_map(|i| self.lists[i].take().unwrap_or_default())
                    .collect();
                list.push(m);
                self.lists[j] = Some(list);
            }
            Rule::Local(j) => {
                for i in 0..j {
                    self.lists[i] = None;
                }
                let list = self.lists[j]
                    .as_mut()
                    .ok_or_else(|| broken(j, "local rule on a blank entry"))?;
                *list.last_mut().expect("lists are non-empty") = m;
            }
        }
        self.entries = cand.entries.into_vec();
        for i in 0..self.entries.len() {
            if self.entries[i] == BLANK {
                self.lists[i] = None;
            }
        }
        self.check(space)?;
        Ok(cand.rule)
    }

    /// Checks the i-witness properties of every list, that each entry is the
    /// colour closing its list, and that lists of higher entries end before
    /// lists of lower entries begin.
    pub fn check(&self, space: &WitnessSpace) -> Result<(), CertificationError> {
        let m = self.play.len();
        let colour_at = |p: usize| self.play[p - 1];
        let mut previous_start: Option<usize> = None;
        for i in (0..self.entries.len()).rev() {
            let entry = space.colour(self.entries[i]);
            let list = self.lists[i].as_deref();
            let (entry, list) = match (entry, list) {
                (None, None) => continue,
                (Some(c), Some(l)) => (c, l),
                _ => return Err(broken(i, "list presence does not match the entry")),
            };
            if list.len() != 1 << i {
                return Err(broken(i, format!("list has {} positions", list.len())));
            }
            if list.iter().any(|&p| p == 0 || p > m) {
                return Err(broken(i, "position outside the play"));
            }
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(broken(i, "positions not increasing"));
            }
            if list[..list.len() - 1]
                .iter()
                .any(|&p| colour_at(p) % 2 == 1)
            {
                return Err(broken(i, "odd colour before the final position"));
            }
            for w in list.windows(2) {
                let cap = colour_at(w[0]).max(colour_at(w[1]));
                if (w[0]..=w[1]).any(|p| colour_at(p) > cap) {
                    return Err(broken(i, format!("gap {}..{} not dominated", w[0], w[1])));
                }
            }
            let last = *list.last().unwrap();
            if (last + 1..=m).any(|p| colour_at(p) > colour_at(last)) {
                return Err(broken(i, "final position does not dominate the rest"));
            }
            if colour_at(last) != entry {
                return Err(broken(i, "entry is not the colour of the final position"));
            }
            if let Some(start) = previous_start {
                if start >= list[0] {
                    return Err(broken(i, "list overlaps a higher entry"));
                }
            }
            previous_start = Some(last);
        }
        Ok(())
    }

    /// Concatenation of the lists of all even entries, most significant
    /// first. Checked to be an even chain whose length is the witness value.
    pub fn even_chain(&self, space: &WitnessSpace) -> Result<Vec<usize>, CertificationError> {
        let chain: Vec<usize> = (0..self.entries.len())
            .rev()
            .filter(|&i| space.is_even_rank(self.entries[i]))
            .flat_map(|i| self.lists[i].clone().unwrap_or_default())
            .collect();
        let colour_at = |p: usize| self.play[p - 1];
        if chain.iter().any(|&p| colour_at(p) % 2 == 1) {
            return Err(broken(0, "odd position in even chain"));
        }
        for w in chain.windows(2) {
            if w[0] >= w[1] {
                return Err(broken(0, "even chain not increasing"));
            }
            let cap = colour_at(w[0]).max(colour_at(w[1]));
            if (w[0]..=w[1]).any(|p| colour_at(p) > cap) {
                return Err(broken(0, "even chain gap not dominated"));
            }
        }
        let val = space.val_entries(&self.entries);
        if chain.len() as u64 != val {
            return Err(CertificationError::ChainLength {
                got: chain.len(),
                val,
            });
        }
        Ok(chain)
    }
}
