use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{apply_generator, apply_word, is_root, random_word, Generator, Word};
use crate::descartes::Quadruple;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Published estimate of the residual-set dimension of an Apollonian packing.
pub const THOMAS_DHAR_ALPHA: f64 = 1.30568673;

/// The word `T_n = T_i (S₄S₃S₂S₁)^m` with `n = 4m + i`, where
/// `T_0 = I, T_1 = S₁, T_2 = S₂S₁, T_3 = S₃S₂S₁`.
pub fn max_word(n: usize) -> Word {
    let (m, i) = (n / 4, n % 4);
    let mut idx: Vec<u8> = (1..=i as u8).rev().collect();
    for _ in 0..m {
        idx.extend_from_slice(&[4, 3, 2, 1]);
    }
    Word::from_indices(&idx).expect("T_n is reduced")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremeMode {
    Max,
    Min,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthResult<T> {
    /// `‖W v‖_∞` for the returned word.
    pub value: T,
    pub word: Word,
    /// The value was certified over every reduced word of this length.
    pub exhaustive: bool,
}

/// Largest exhaustive search used to certify the `max` mode.
pub const MAX_CERTIFY_LEN: usize = 12;

fn check_root<T: Scalar>(v: &Quadruple<T>) -> Result<()> {
    v.require_descartes()?;
    if !is_root(v)? {
        return Err(Error::NotRoot(v.to_string()));
    }
    Ok(())
}

fn applied_from<T: Scalar>(
    v: &Quadruple<T>,
    prefix: &mut Vec<Generator>,
    len: usize,
    cur: &Quadruple<T>,
    best: &mut Option<(T, Vec<Generator>)>,
) -> Result<()> {
    if prefix.len() == len {
        let s = cur.supnorm();
        if best.as_ref().map_or(true, |(b, _)| s > *b) {
            *best = Some((s, prefix.clone()));
        }
        return Ok(());
    }
    for g in Generator::ALL {
        if prefix.last() == Some(&g) {
            continue;
        }
        let next = apply_generator(cur, g)?;
        prefix.push(g);
        applied_from(v, prefix, len, &next, best)?;
        prefix.pop();
    }
    Ok(())
}

fn exhaustive_max<T: Scalar>(v: &Quadruple<T>, len: usize) -> Result<(T, Word)> {
    // one subtree per first-applied letter, merged in letter order so ties
    // resolve the same way regardless of scheduling
    let parts: Vec<Result<Option<(T, Vec<Generator>)>>> = Generator::ALL
        .par_iter()
        .map(|&g| {
            let mut best = None;
            let mut prefix = vec![g];
            let start = apply_generator(v, g)?;
            applied_from(v, &mut prefix, len, &start, &mut best)?;
            Ok(best)
        })
        .collect();
    let mut best: Option<(T, Vec<Generator>)> = None;
    for p in parts {
        if let Some((s, w)) = p? {
            if best.as_ref().map_or(true, |(b, _)| s > *b) {
                best = Some((s, w));
            }
        }
    }
    let (s, applied) = best.expect("length ≥ 1 has words");
    Ok((s, Word::from_applied(applied)?))
}

fn branch_and_bound_min<T: Scalar>(v: &Quadruple<T>, len: usize) -> Result<(T, Word)> {
    // Greedy start: always take the smallest new entry.
    let mut cur = v.clone();
    let mut greedy = Vec::with_capacity(len);
    for _ in 0..len {
        let mut pick: Option<(T, Generator, Quadruple<T>)> = None;
        for g in Generator::ALL {
            if greedy.last() == Some(&g) {
                continue;
            }
            let next = apply_generator(&cur, g)?;
            let s = next.supnorm();
            if pick.as_ref().map_or(true, |(b, _, _)| s < *b) {
                pick = Some((s, g, next));
            }
        }
        let (_, g, next) = pick.expect("three legal letters");
        greedy.push(g);
        cur = next;
    }
    let mut best = (cur.supnorm(), greedy);

    // From a root the largest entry never decreases along a reduced word and
    // dominates |a|, so the running sup-norm is a valid lower bound.
    fn dfs<T: Scalar>(
        cur: &Quadruple<T>,
        prefix: &mut Vec<Generator>,
        len: usize,
        best: &mut (T, Vec<Generator>),
    ) -> Result<()> {
        let s = cur.supnorm();
        if s >= best.0 {
            return Ok(());
        }
        if prefix.len() == len {
            *best = (s, prefix.clone());
            return Ok(());
        }
        for g in Generator::ALL {
            if prefix.last() == Some(&g) {
                continue;
            }
            let next = apply_generator(cur, g)?;
            prefix.push(g);
            dfs(&next, prefix, len, best)?;
            prefix.pop();
        }
        Ok(())
    }
    dfs(v, &mut Vec::with_capacity(len), len, &mut best)?;
    Ok((best.0, Word::from_applied(best.1)?))
}

/// Extremal `‖W v‖_∞` over reduced words `W` of the given length.
///
/// `Max` returns `T_n` and its value; for `length ≤ 12` every word is also
/// checked, and if some word beat `T_n` that word is returned instead.
/// `Min` is an exact branch-and-bound search.
pub fn extremal_growth<T: Scalar>(
    v: &Quadruple<T>,
    length: usize,
    mode: ExtremeMode,
) -> Result<GrowthResult<T>> {
    check_root(v)?;
    if length == 0 {
        return Ok(GrowthResult {
            value: v.supnorm(),
            word: Word::identity(),
            exhaustive: true,
        });
    }
    match mode {
        ExtremeMode::Max => {
            if !v.min_entry().is_negative() {
                return Err(Error::InvalidArgument(format!(
                    "max growth needs a root with a negative entry, got {v}"
                )));
            }
            let tn = max_word(length);
            let value = apply_word(v, &tn)?.supnorm();
            if length > MAX_CERTIFY_LEN {
                return Ok(GrowthResult {
                    value,
                    word: tn,
                    exhaustive: false,
                });
            }
            let (emax, ew) = exhaustive_max(v, length)?;
            if emax > value {
                log::warn!("word {ew} beats T_{length} on {v}: {emax} > {value}");
                Ok(GrowthResult {
                    value: emax,
                    word: ew,
                    exhaustive: true,
                })
            } else {
                Ok(GrowthResult {
                    value,
                    word: tn,
                    exhaustive: true,
                })
            }
        }
        ExtremeMode::Min => {
            let (value, word) = branch_and_bound_min(v, length)?;
            Ok(GrowthResult {
                value,
                word,
                exhaustive: true,
            })
        }
    }
}

/// Both sides of the printed closed form for `‖(S₄S₃)ⁿ v‖_∞`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairPowerGrowth<T> {
    pub n: usize,
    /// Direct application of `(S₄S₃)ⁿ` to `v` in its given slot order.
    pub direct: T,
    /// `n(n+1)(a+b) − nc + (n−1)d` on the sorted entries.
    pub printed_formula: T,
}

pub fn s4s3_power_growth<T: Scalar>(v: &Quadruple<T>, n: usize) -> Result<PairPowerGrowth<T>> {
    let mut idx = Vec::with_capacity(2 * n);
    for _ in 0..n {
        idx.extend_from_slice(&[4u8, 3]);
    }
    let w = Word::from_indices(&idx)?;
    let direct = apply_word(v, &w)?.supnorm();
    let [a, b, c, d] = v.sorted().entries;
    let nn = T::from_usize(n).ok_or(Error::Overflow)?;
    let printed_formula = nn
        .mul_c(&nn.add_c(&T::one())?)?
        .mul_c(&a.add_c(&b)?)?
        .sub_c(&nn.mul_c(&c)?)?
        .add_c(&nn.sub_c(&T::one())?.mul_c(&d)?)?;
    Ok(PairPowerGrowth {
        n,
        direct,
        printed_formula,
    })
}

pub(crate) mod big_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Sampled median of `‖W v‖_∞` over uniformly random reduced words.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MedianReport {
    pub label: String,
    pub length: usize,
    pub samples: usize,
    pub seed: u64,
    /// Lower median of the samples.
    #[serde(with = "big_string")]
    pub median: BigInt,
    /// `ln(median) / length`; absent for length 0.
    pub log_rate: Option<f64>,
    /// `ln 3 / α` with the published α.
    pub reference_rate: f64,
}

/// Random-word median experiment. Deterministic for a fixed seed.
pub fn median_growth_experiment<T: Scalar>(
    v: &Quadruple<T>,
    length: usize,
    samples: usize,
    seed: u64,
) -> Result<MedianReport> {
    check_root(v)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let big = v.map(|e| e.to_big());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        let w = random_word(&mut rng, length);
        values.push(apply_word(&big, &w)?.supnorm());
    }
    values.sort();
    let median = values[(samples - 1) / 2].clone();
    let log_rate = if length == 0 {
        None
    } else {
        Some(big_ln(&median) / length as f64)
    };
    Ok(MedianReport {
        label: "experimental".into(),
        length,
        samples,
        seed,
        median,
        log_rate,
        reference_rate: 3f64.ln() / THOMAS_DHAR_ALPHA,
    })
}

fn big_ln(v: &BigInt) -> f64 {
    if let Some(f) = v.to_f64().filter(|f| f.is_finite()) {
        return f.ln();
    }
    let bits = v.bits();
    let shift = bits.saturating_sub(60);
    let top = (v >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::reduced_words;

    fn q(a: i64, b: i64, c: i64, d: i64) -> Quadruple<i64> {
        Quadruple::new(a, b, c, d)
    }

    #[test]
    fn max_word_shapes() {
        assert_eq!(max_word(1).to_string(), "S1");
        assert_eq!(max_word(4).to_string(), "S4S3S2S1");
        assert_eq!(max_word(6).to_string(), "S2S1S4S3S2S1");
        assert_eq!(max_word(0), Word::identity());
        for n in 0..40 {
            assert_eq!(max_word(n).len(), n);
        }
    }

    #[test]
    fn max_growth_examples() {
        let v = q(-1, 2, 2, 3);
        let r = extremal_growth(&v, 4, ExtremeMode::Max).unwrap();
        assert_eq!(r.value, 323);
        assert_eq!(r.word, max_word(4));
        assert!(r.exhaustive);
        assert_eq!(extremal_growth(&v, 1, ExtremeMode::Max).unwrap().value, 15);
        // stepwise path of T_4
        let mut cur = v;
        let mut seen = vec![];
        for g in max_word(4).applied() {
            cur = apply_generator(&cur, g).unwrap();
            seen.push(cur.supnorm());
        }
        assert_eq!(seen, vec![15, 38, 110, 323]);
    }

    #[test]
    fn min_growth_examples() {
        let v = q(-1, 2, 2, 3);
        let r = extremal_growth(&v, 2, ExtremeMode::Min).unwrap();
        assert_eq!(r.value, 6);
        assert_eq!(apply_word(&v, &r.word).unwrap().supnorm(), 6);
        // against plain enumeration
        for n in 1..=9 {
            let brute = reduced_words(n)
                .iter()
                .map(|w| apply_word(&v, w).unwrap().supnorm())
                .min()
                .unwrap();
            assert_eq!(extremal_growth(&v, n, ExtremeMode::Min).unwrap().value, brute, "n={n}");
        }
    }

    #[test]
    fn min_growth_is_quadratic() {
        let v = q(-1, 2, 2, 3);
        let vals: Vec<f64> = [10usize, 20, 40]
            .iter()
            .map(|&n| extremal_growth(&v, n, ExtremeMode::Min).unwrap().value as f64)
            .collect();
        // doubling the length roughly quadruples the minimum
        assert!(vals[1] / vals[0] > 2.5 && vals[1] / vals[0] < 6.0, "{vals:?}");
        assert!(vals[2] / vals[1] > 2.5 && vals[2] / vals[1] < 6.0, "{vals:?}");
    }

    #[test]
    fn growth_preconditions() {
        assert!(matches!(
            extremal_growth(&q(-1, 2, 3, 6), 3, ExtremeMode::Max),
            Err(Error::NotRoot(_))
        ));
        assert!(matches!(
            extremal_growth(&q(0, 0, 1, 1), 3, ExtremeMode::Max),
            Err(Error::InvalidArgument(_))
        ));
        assert!(extremal_growth(&q(0, 0, 1, 1), 3, ExtremeMode::Min).is_ok());
    }

    #[test]
    fn printed_pair_formula_disagrees_with_direct() {
        let r = s4s3_power_growth(&q(-1, 2, 2, 3), 1).unwrap();
        assert_eq!(r.direct, 11);
        assert_eq!(r.printed_formula, 0);
    }

    #[test]
    fn median_is_deterministic() {
        let v = q(-1, 2, 2, 3);
        let a = median_growth_experiment(&v, 12, 500, 1).unwrap();
        let b = median_growth_experiment(&v, 12, 500, 1).unwrap();
        assert_eq!(a, b);
        let z = median_growth_experiment(&v, 0, 5, 1).unwrap();
        assert_eq!(z.median, BigInt::from(3));
        assert_eq!(z.log_rate, None);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<MedianReport>(&s).unwrap(), a);
    }

    #[test]
    fn big_ln_matches_f64() {
        let v = BigInt::from(10u32).pow(400);
        assert!((big_ln(&v) - 400.0 * 10f64.ln()).abs() < 1e-9);
        assert!((big_ln(&BigInt::from(1000)) - 1000f64.ln()).abs() < 1e-12);
    }
}
