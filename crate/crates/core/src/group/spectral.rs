//! Spectral growth of the generators.
//!
//! The characteristic polynomial `X⁴ − 2X³ − 2X² − 2X + 1` belongs to the
//! shift-reflect operator `R = C·S₁` (cyclic slot shift after `S₁`), whose
//! fourth power is `S₄S₃S₂S₁`. The product itself has characteristic
//! polynomial `X⁴ − 68X³ − 122X² − 68X + 1` and spectral radius `θ⁴`, so the
//! normalized per-letter growth `σ(S₄S₃S₂S₁)^{1/4}` equals `θ ≈ 2.890`.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{word_matrix, Generator, Word};
use crate::error::Result;
use crate::scalar::Scalar;

/// Characteristic polynomial `det(X·I − M)`, leading coefficient first.
pub fn charpoly<T: Scalar>(m: &[[T; 4]; 4]) -> Result<[T; 5]> {
    // Faddeev–LeVerrier; every division is exact over the integers.
    let zero = || -> [[T; 4]; 4] { std::array::from_fn(|_| std::array::from_fn(|_| T::zero())) };
    let mut coeffs: [T; 5] = std::array::from_fn(|_| T::zero());
    coeffs[0] = T::one();
    let mut mk = zero();
    for k in 1..=4usize {
        // M_k = A·M_{k−1} + c_{k−1}·I
        let mut next = zero();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = T::zero();
                for l in 0..4 {
                    acc = acc.add_c(&m[i][l].mul_c(&mk[l][j])?)?;
                }
                next[i][j] = acc;
            }
            next[i][i] = next[i][i].add_c(&coeffs[k - 1])?;
        }
        mk = next;
        // c_k = −tr(A·M_k) / k
        let mut tr = T::zero();
        for i in 0..4 {
            for l in 0..4 {
                tr = tr.add_c(&m[i][l].mul_c(&mk[l][i])?)?;
            }
        }
        let kk = T::from_usize(k).expect("small");
        coeffs[k] = -(tr / kk);
    }
    Ok(coeffs)
}

/// `R = C·S₁`: apply `S₁`, then rotate slots so the new entry moves last.
pub fn shift_reflect_operator() -> [[i64; 4]; 4] {
    [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [-1, 2, 2, 2]]
}

/// Spectral radius of an exact integer matrix.
///
/// Roots of the exact characteristic polynomial are found by
/// Durand–Kerner iteration, which unlike a Schur sweep cannot stall on the
/// defective (parabolic) elements of the group.
pub fn spectral_radius<T: Scalar>(m: &[[T; 4]; 4]) -> f64 {
    let wide = m.clone().map(|r| r.map(|e| e.to_i128()));
    let coeffs: [f64; 5] = match wide
        .iter()
        .all(|r| r.iter().all(Option::is_some))
        .then(|| charpoly(&wide.map(|r| r.map(Option::unwrap))).ok())
        .flatten()
    {
        Some(c) => c.map(|x| x as f64),
        None => {
            let big = m.clone().map(|r| r.map(|e| e.to_big()));
            charpoly(&big)
                .expect("arbitrary precision")
                .map(|x| x.to_f64().unwrap_or(f64::NAN))
        }
    };
    poly_roots(&coeffs)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// All complex roots of a monic quartic (leading coefficient first).
fn poly_roots(p: &[f64; 5]) -> [Complex64; 4] {
    let scale = 1.0 + p[1..].iter().map(|c| c.abs()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: [Complex64; 4] = std::array::from_fn(|i| seed.powu(i as u32) * scale);
    let eval = |x: Complex64| p.iter().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c);
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..4 {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..4 {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(f64::EPSILON, 0.0);
            }
            let step = eval(z[i]) / denom;
            z[i] -= step;
            moved = moved.max(step.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-16 {
            break;
        }
    }
    z
}

/// `½(1 + √5 + √(2 + 2√5))`.
pub fn theta_closed_form() -> f64 {
    let s5 = 5f64.sqrt();
    0.5 * (1.0 + s5 + (2.0 + 2.0 * s5).sqrt())
}

fn eval(p: &[f64; 5], x: f64) -> f64 {
    p.iter().fold(0.0, |acc, c| acc * x + c)
}

/// Largest real root of a monic quartic, by bisection.
fn largest_real_root(p: &[i64; 5]) -> Option<f64> {
    let pf = p.map(|c| c as f64);
    let bound = 1.0 + p[1..].iter().map(|c| c.abs() as f64).fold(0.0, f64::max);
    // scan down from the Cauchy bound for a sign change
    let steps = 4096;
    let h = 2.0 * bound / steps as f64;
    let mut hi = bound;
    for _ in 0..steps {
        let lo = hi - h;
        if eval(&pf, lo).signum() != eval(&pf, hi).signum() || eval(&pf, lo) == 0.0 {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if eval(&pf, mid).signum() == eval(&pf, b).signum() {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            return Some(0.5 * (a + b));
        }
        hi = lo;
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    /// Characteristic polynomial of `S₄S₃S₂S₁`.
    pub product_charpoly: [i64; 5],
    /// Characteristic polynomial of the shift-reflect operator `R`.
    pub shift_reflect_charpoly: [i64; 5],
    /// `σ(S₄S₃S₂S₁)`.
    pub product_spectral_radius: f64,
    /// Largest root of the shift-reflect polynomial.
    pub theta: f64,
    pub theta_closed_form: f64,
    /// Joint spectral radius of `{S₁..S₄}`: `σ(S₄S₃S₂S₁)^{1/4} = θ`.
    pub jsr: f64,
    pub theta_fourth_root: f64,
}

pub fn joint_spectral_radius() -> SpectralReport {
    let w: Word = "S4S3S2S1".parse().expect("literal word");
    let m = word_matrix::<i64>(&w).expect("small entries");
    let product_charpoly = charpoly(&m.matrix).expect("small entries");
    let shift_reflect_charpoly = charpoly(&shift_reflect_operator()).expect("small entries");
    let theta = largest_real_root(&shift_reflect_charpoly).expect("quartic has a real root");
    let product_spectral_radius = spectral_radius(&m.matrix);
    SpectralReport {
        product_charpoly,
        shift_reflect_charpoly,
        product_spectral_radius,
        theta,
        theta_closed_form: theta_closed_form(),
        jsr: product_spectral_radius.powf(0.25),
        theta_fourth_root: theta.powf(0.25),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSearch {
    pub max_len: usize,
    pub words_checked: u64,
    /// A word attaining the largest `σ(W)^{1/|W|}`.
    pub best_word: Word,
    pub best_rate: f64,
}

/// Maximum of `σ(W)^{1/|W|}` over all reduced words with `1 ≤ |W| ≤ max_len`.
pub fn word_spectral_search(max_len: usize) -> SpectralSearch {
    fn walk(
        m: &super::GroupElement<i64>,
        applied: &mut Vec<Generator>,
        max_len: usize,
        best: &mut (f64, Vec<Generator>),
        count: &mut u64,
    ) {
        let k = applied.len();
        let rate = spectral_radius(&m.matrix).powf(1.0 / k as f64);
        *count += 1;
        if rate > best.0 + 1e-12 {
            *best = (rate, applied.clone());
        }
        if k == max_len {
            return;
        }
        for g in Generator::ALL {
            if applied.last() == Some(&g) {
                continue;
            }
            // new letter acts first, so it multiplies on the right
            let next = m.mul_generator(g).expect("entries stay small for short words");
            applied.push(g);
            walk(&next, applied, max_len, best, count);
            applied.pop();
        }
    }
    let parts: Vec<((f64, Vec<Generator>), u64)> = Generator::ALL
        .par_iter()
        .map(|&g| {
            let mut best = (0.0, vec![]);
            let mut count = 0;
            if max_len >= 1 {
                let m = super::GroupElement::<i64>::generator(g);
                walk(&m, &mut vec![g], max_len, &mut best, &mut count);
            }
            (best, count)
        })
        .collect();
    let mut best = (0.0, vec![]);
    let mut words_checked = 0;
    for (b, c) in parts {
        words_checked += c;
        if b.0 > best.0 + 1e-12 {
            best = b;
        }
    }
    // letters were pushed in right-multiplication order, which is printed order
    SpectralSearch {
        max_len,
        words_checked,
        best_word: Word::new(best.1).expect("reduced by construction"),
        best_rate: best.0,
    }
}
