//! Exhaustive checks of the update rules against literal or brute-force
//! oracles on every small witness space.

use std::cmp::Ordering;

use proptest::prelude::*;

use super::*;
use crate::arena::Colour;

/// Small colour sets whose tables have at most four entries in the given
/// compression mode.
fn colour_sets(compression: Compression) -> Vec<Vec<Colour>> {
    let base: Vec<Vec<Colour>> = vec![
        vec![1, 2],
        vec![2, 3],
        vec![0, 1, 2],
        vec![1, 2, 3, 4],
        vec![2, 3, 4, 5],
        vec![0, 2, 4, 6],
        vec![1, 3, 5, 6],
        vec![2, 4, 5, 7],
    ];
    let mut sets = base;
    if compression == Compression::On {
        sets.push(vec![1, 2, 3, 4, 5, 6]);
        sets.push(vec![1, 2, 3, 4, 5, 7]);
        sets.push(vec![3, 4, 6, 8, 9]);
    }
    sets.retain(|c| {
        let t = ColourTable::new(c, compression);
        !t.is_empty() && t.len() <= 4
    });
    sets
}

/// Every space with r <= 4 and L <= 3 over the sets above, with the largest
/// and smallest thresholds valid for each length.
fn spaces() -> Vec<(WitnessSpace, Vec<Colour>)> {
    let mut out = Vec::new();
    for mode in UpdateMode::all() {
        for colours in colour_sets(mode.compression) {
            for len in 1..=3usize {
                let top = (1u64 << len) - 1;
                let mut thresholds = vec![top, top / 2 + 1];
                thresholds.dedup();
                for e in thresholds {
                    out.push((
                        WitnessSpace::new(&colours, mode, len, e).unwrap(),
                        colours.clone(),
                    ));
                }
            }
        }
    }
    out
}

#[test]
fn fast_raw_update_matches_enumeration() {
    for (s, colours) in spaces() {
        for w in s.enumerate() {
            let Some(b) = w.entries() else { continue };
            for &c in &colours {
                let d = s.letter(c).unwrap();
                assert!(!s.ru_candidates(b, &d).is_empty());
                let reference = s.ru_enumerate(b, &d);
                assert_eq!(
                    s.ru_entries(b, &d),
                    reference.entries,
                    "{:?}: ru({}, {c})",
                    s.mode(),
                    s.display(&w)
                );
                for cand in s.ru_candidates(b, &d) {
                    let cw = Witness::Entries(cand.entries);
                    assert!(Witness::Entries(reference.entries.clone()) >= cw);
                }
            }
        }
    }
}

#[test]
fn updates_preserve_shape() {
    for (s, colours) in spaces() {
        for w in s.enumerate() {
            for &c in &colours {
                for out in [
                    s.ru(&w, c).unwrap(),
                    s.up(&w, c).unwrap(),
                    s.au(&w, c).unwrap(),
                ] {
                    assert!(
                        s.contains(&out),
                        "{:?}: {} with {c}",
                        s.mode(),
                        s.display(&w)
                    );
                }
                if c > 0 && c % 2 == 0 && s.table().rank(c - 1).is_some() {
                    let dw = s.downarrow(&w, c).unwrap();
                    assert!(s.is_shape_valid(&dw));
                }
            }
        }
    }
}

#[test]
fn antagonistic_update_is_min_over_larger_witnesses() {
    for (s, colours) in spaces() {
        let all = s.enumerate();
        for (k, w) in all.iter().enumerate() {
            for &c in &colours {
                let brute = all[k..].iter().map(|x| s.up(x, c).unwrap()).min().unwrap();
                assert_eq!(
                    s.au(w, c).unwrap(),
                    brute,
                    "{:?} len {} e {}: au({}, {c})",
                    s.mode(),
                    s.len(),
                    s.threshold(),
                    s.display(w)
                );
            }
        }
    }
}

#[test]
fn two_candidate_shortcut_is_not_exact() {
    // colours 1..3, length 3: the witness 2,_,_ lies above 3,_,2 but
    // updates with 3 to 3,_,_, below both shortcut candidates
    let s = WitnessSpace::new(
        &[1, 2, 3],
        UpdateMode {
            rule: RuleVariant::ThisPaper,
            compression: Compression::Off,
        },
        3,
        7,
    )
    .unwrap();
    let b = s.parse("3,_,2").unwrap();
    assert_eq!(s.display(&s.au(&b, 3).unwrap()), "3,_,_");
    assert_eq!(s.display(&s.au_two_candidate(&b, 3).unwrap()), "3,3,_");
    // with even colours the shortcut holds on the worked example
    let s = WitnessSpace::new(
        &(2..=8).collect::<Vec<_>>(),
        UpdateMode {
            rule: RuleVariant::ThisPaper,
            compression: Compression::Off,
        },
        3,
        7,
    )
    .unwrap();
    let b = s.parse("6,_,2").unwrap();
    assert_eq!(s.au_two_candidate(&b, 2).unwrap(), s.au(&b, 2).unwrap());
}

#[test]
fn antagonistic_update_is_monotone() {
    for (s, colours) in spaces() {
        let all = s.enumerate();
        for &c in &colours {
            let images: Vec<Witness> = all.iter().map(|w| s.au(w, c).unwrap()).collect();
            assert!(images.windows(2).all(|p| p[0] <= p[1]), "{:?}", s.mode());
        }
    }
}

#[test]
fn truncation_guarantees() {
    for rule in [RuleVariant::ThisPaper, RuleVariant::CaludeOriginal] {
        let mode = UpdateMode {
            rule,
            compression: Compression::Off,
        };
        let colours: Vec<Colour> = (1..=4).collect();
        for len in 1..=3usize {
            for e in (1u64 << (len - 1))..(1u64 << len) {
                let s = WitnessSpace::new(&colours, mode, len, e).unwrap();
                let all: Vec<Witness> = s.enumerate().into_iter().filter(|w| !w.is_won()).collect();
                for x in [2, 4] {
                    let down = |w: &Witness| s.downarrow(w, x).unwrap();
                    for (i, a) in all.iter().enumerate() {
                        for b in &all[i + 1..] {
                            assert_ne!(down(b).cmp(&down(a)), Ordering::Less, "(1)");
                        }
                    }
                    for b in &all {
                        for &v in &colours {
                            let up = down(&s.up(b, v).unwrap());
                            let au = down(&s.au(b, v).unwrap());
                            let base = down(b);
                            let ctx = format!("{rule} e={e} b={} v={v} x={x}", s.display(b));
                            match v.cmp(&x) {
                                Ordering::Less => {
                                    assert!(up >= base, "(2) {ctx}");
                                    assert!(au >= base, "(3) {ctx}");
                                }
                                Ordering::Equal => {
                                    assert!(up > base, "(4) {ctx}");
                                    assert!(au > base, "(5) {ctx}");
                                }
                                Ordering::Greater => {}
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn counting_bound_covers_enumeration() {
    for (s, _) in spaces() {
        if s.mode().compression == Compression::Off {
            let r = s.table().len() as u64;
            let bound = count_w(r, s.len() as u64);
            assert!(num_bigint::BigUint::from(s.enumerate().len()) <= bound);
        }
    }
}

fn arb_space() -> impl Strategy<Value = (WitnessSpace, Vec<Colour>)> {
    (
        proptest::collection::btree_set(0u32..14, 1..9),
        1usize..7,
        0usize..4,
    )
        .prop_filter_map("empty table", |(set, len, m)| {
            let colours: Vec<Colour> = set.into_iter().collect();
            let mode = UpdateMode::all()[m];
            let t = ColourTable::new(&colours, mode.compression);
            if t.is_empty() {
                return None;
            }
            let s = WitnessSpace::new(&colours, mode, len, (1 << len) - 1).ok()?;
            Some((s, colours))
        })
}

proptest! {
    #[test]
    fn random_raw_updates_match_enumeration(
        (s, colours) in arb_space(),
        picks in proptest::collection::vec(0usize..64, 1..40),
    ) {
        // walk a random play; at every step the fast and literal rules agree
        let mut b = s.bottom().entries().unwrap().to_vec();
        for p in picks {
            let c = colours[p % colours.len()];
            let d = s.letter(c).unwrap();
            let fast = s.ru_entries(&b, &d);
            prop_assert_eq!(&fast, &s.ru_enumerate(&b, &d).entries);
            prop_assert!(s.contains(&Witness::Entries(fast.clone())));
            b = fast.into_vec();
        }
    }
}
