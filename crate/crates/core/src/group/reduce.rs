use serde::{Deserialize, Serialize};

use super::{apply_generator, Generator, Word};
use crate::descartes::Quadruple;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Outcome of running the reduction algorithm.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionResult<T> {
    /// The root quadruple, sorted ascending.
    pub root: Quadruple<T>,
    /// The final quadruple before sorting, in the input's slot order.
    pub reduced: Quadruple<T>,
    /// Generators in the order they were applied. Because each generator is
    /// an involution, `word` applied to `reduced` reproduces the (possibly
    /// negated) input.
    pub word: Word,
    pub steps: usize,
    /// The input had negative entry sum and was negated first.
    pub negated: bool,
    /// Steps taken after the first negative entry appeared.
    pub steps_after_negative: usize,
    /// `⌊(d/a)²⌋` at the moment the first negative entry `a` appeared, with
    /// `d` the largest entry then.
    pub negative_bound: Option<u64>,
}

/// `a ≤ 0 ≤ b ≤ c ≤ d` and `a + b + c ≥ d` on the sorted entries.
pub fn is_root<T: Scalar>(q: &Quadruple<T>) -> Result<bool> {
    let l = q.sum()?;
    if !l.is_positive() {
        return Err(Error::NonPositiveSum(q.to_string()));
    }
    let [a, b, c, d] = q.sorted().entries;
    Ok(!a.is_positive() && !b.is_negative() && a.add_c(&b)?.add_c(&c)? >= d)
}

fn bound_from<T: Scalar>(q: &Quadruple<T>) -> Option<u64> {
    let a = q.min_entry();
    if !a.is_negative() {
        return None;
    }
    let d = q.max_entry().to_big();
    let a = a.to_big();
    let b = (&d * &d) / (&a * &a);
    b.try_into().ok().or(Some(u64::MAX))
}

/// Reduce an integer Descartes quadruple to the root of its packing.
///
/// At each step the first generator (in order `S₁..S₄`) that strictly
/// decreases the entry sum is applied; that is the one acting on an entry
/// larger than half the sum.
pub fn reduce<T: Scalar>(q: &Quadruple<T>) -> Result<ReductionResult<T>> {
    if q.is_zero() {
        return Err(Error::ZeroQuadruple);
    }
    q.require_descartes()?;
    let negated = q.sum()?.is_negative();
    let mut cur = if negated { q.negated() } else { q.clone() };

    let mut applied = Vec::new();
    let mut negative_bound = bound_from(&cur);
    let mut steps_after_negative = 0usize;
    loop {
        let l = cur.sum()?;
        let mut step = None;
        for i in 0..4 {
            if cur.entries[i].double_c()? > l {
                step = Some(i);
                break;
            }
        }
        let Some(i) = step else { break };
        let g = Generator::from_slot(i);
        cur = apply_generator(&cur, g)?;
        applied.push(g);
        if negative_bound.is_some() {
            steps_after_negative += 1;
        } else {
            negative_bound = bound_from(&cur);
        }
    }
    debug_assert!(!cur.sum()?.is_zero());
    let steps = applied.len();
    // applied = (g_1, …, g_k) with g_1 first; input = S_{g_1}···S_{g_k}·reduced
    let word = Word::new(applied).expect("reduction never repeats a letter");
    Ok(ReductionResult {
        root: cur.sorted(),
        reduced: cur,
        word,
        steps,
        negated,
        steps_after_negative,
        negative_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{apply_word, random_word};
    use num_bigint::BigInt;
    use rand::SeedableRng;

    fn q(a: i64, b: i64, c: i64, d: i64) -> Quadruple<i64> {
        Quadruple::new(a, b, c, d)
    }

    #[test]
    fn root_examples() {
        assert!(is_root(&q(-1, 2, 2, 3)).unwrap());
        assert!(is_root(&q(0, 0, 1, 1)).unwrap());
        assert!(is_root(&q(3, 2, -1, 2)).unwrap());
        assert!(!is_root(&q(-1, 2, 3, 6)).unwrap());
        assert!(matches!(is_root(&q(1, -2, -2, -3)), Err(Error::NonPositiveSum(_))));
    }

    #[test]
    fn reduce_examples() {
        let r = reduce(&q(-1, 2, 2, 3)).unwrap();
        assert_eq!(r.root, q(-1, 2, 2, 3));
        assert!(r.word.is_empty());

        let r = reduce(&q(-1, 2, 3, 6)).unwrap();
        assert_eq!(r.root, q(-1, 2, 2, 3));
        assert_eq!(r.steps, 1);
        assert_eq!(r.word.to_string(), "S4");

        let r = reduce(&q(4, 0, 1, 1)).unwrap();
        assert_eq!(r.root, q(0, 0, 1, 1));
        assert_eq!(r.reduced, q(0, 0, 1, 1));
    }

    #[test]
    fn reduce_negated_and_errors() {
        let r = reduce(&q(1, -2, -3, -6)).unwrap();
        assert!(r.negated);
        assert_eq!(r.root, q(-1, 2, 2, 3));
        assert_eq!(reduce(&q(0, 0, 0, 0)), Err(Error::ZeroQuadruple));
        assert!(matches!(reduce(&q(1, 1, 1, 1)), Err(Error::NotDescartes { .. })));
    }

    #[test]
    fn reduce_round_trips_through_word() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for root in [q(-1, 2, 2, 3), q(0, 0, 1, 1), q(-3, 5, 8, 8), q(-6, 11, 14, 15)] {
            for len in 0..=14 {
                let w = random_word(&mut rng, len);
                let scrambled = apply_word(&root, &w).unwrap();
                let r = reduce(&scrambled).unwrap();
                assert_eq!(r.root, root.sorted());
                assert_eq!(apply_word(&r.reduced, &r.word).unwrap(), scrambled);
                if let Some(b) = r.negative_bound {
                    assert!(r.steps_after_negative as u64 <= b);
                }
            }
        }
    }

    #[test]
    fn reduce_bigint() {
        let w = crate::group::max_word(120);
        let v = q(-1, 2, 2, 3).map(|e| BigInt::from(*e));
        let big = apply_word(&v, &w).unwrap();
        assert!(big.max_entry() > &BigInt::from(i64::MAX));
        let r = reduce(&big).unwrap();
        assert_eq!(r.root, v);
        assert_eq!(r.steps, 120);
    }
}
