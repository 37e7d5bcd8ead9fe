use num_bigint::BigUint;
use num_traits::{One, Zero};

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Size bound of the witness set for `r` relevant colours and witness
/// length `l`: `1 + sum_{i=0}^{l} C(l, i) * C(i + r - 1, r - 1)`. The leading
/// 1 accounts for `Won`.
pub fn count_w(r: u64, l: u64) -> BigUint {
    assert!(r >= 1, "at least one relevant colour is required");
    let mut total = BigUint::one();
    for i in 0..=l {
        total += binomial(l, i) * binomial(i + r - 1, r - 1);
    }
    total
}

/// Number of tuples of length `l` over `r` colours plus blank whose colours
/// are non-increasing from the most significant position, by enumeration.
pub fn count_shape_valid(r: u32, l: u32) -> u64 {
    fn go(pos: u32, bound: u32) -> u64 {
        if pos == 0 {
            return 1;
        }
        // blank keeps the bound; colour c (1..=bound) tightens it
        go(pos - 1, bound) + (1..=bound).map(|c| go(pos - 1, c)).sum::<u64>()
    }
    go(l, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_case_by_hand() {
        // 1 + C(1,0)C(0,0) + C(1,1)C(1,0)
        assert_eq!(count_w(1, 1), BigUint::from(3u32));
    }

    #[test]
    fn formula_matches_enumeration() {
        for r in 1..=4u32 {
            for l in 1..=4u32 {
                assert_eq!(
                    count_w(r as u64, l as u64),
                    BigUint::from(1 + count_shape_valid(r, l)),
                    "r={r} l={l}"
                );
            }
        }
    }

    #[test]
    fn monotone_in_both_arguments() {
        for r in 1..8 {
            for l in 1..8 {
                assert!(count_w(r + 1, l) >= count_w(r, l));
                assert!(count_w(r, l + 1) >= count_w(r, l));
            }
        }
    }

    #[test]
    fn large_values_do_not_overflow() {
        let big = count_w(15000, 15);
        assert!(big > BigUint::from(u64::MAX));
    }
}
