//! Descartes quadruples of bounded Euclidean height.
//!
//! The Lorentz map preserves height, and a Lorentz zero `(W,X,Y,Z)` has
//! `H² = 2W²` with `X² + Y² + Z² = W²`, so counting reduces to `r₃(W²)`.

use crate::arith::{divisors, factor, mobius};

/// Catalan's constant `L(2, χ₋₄)`.
pub const CATALAN: f64 = 0.915_965_594_177_219;

/// Ordered representations of `m²` as `x² + y² + z²`, `m ≥ 1`.
pub fn r3_square(m: u64) -> u64 {
    assert!(m >= 1, "r3_square needs m ≥ 1");
    let mut r = 6u64;
    for (p, e) in factor(m) {
        let pe = p.pow(e);
        r *= match p % 4 {
            1 => pe,
            3 => pe + 2 * (pe - 1) / (p - 1),
            _ => 1,
        };
    }
    r
}

/// Representations of `m²` with `gcd(x, y, z) = 1`.
pub fn r3_square_primitive(m: u64) -> u64 {
    let total: i64 = divisors(&factor(m))
        .into_iter()
        .map(|d| mobius(d) * r3_square(m / d) as i64)
        .sum();
    total as u64
}

/// Integer Descartes quadruples with `H² ≤ t_sq`.
pub fn count_quadruples_sq(t_sq: u64, primitive: bool) -> u64 {
    // largest W with 2W² ≤ t_sq
    let mut w = ((t_sq / 2) as f64).sqrt() as u64;
    while 2 * (w + 1) * (w + 1) <= t_sq {
        w += 1;
    }
    while w > 0 && 2 * w * w > t_sq {
        w -= 1;
    }
    let sum: u64 = (1..=w)
        .map(|k| if primitive { r3_square_primitive(k) } else { r3_square(k) })
        .sum();
    if primitive {
        2 * sum
    } else {
        1 + 2 * sum
    }
}

/// Integer Descartes quadruples with Euclidean height at most `t`.
pub fn count_quadruples(t: f64, primitive: bool) -> u64 {
    if t.is_nan() || t < 0.0 {
        return 0;
    }
    // 2W² ≤ t² checked in floating point, which is exact for moderate W
    let mut w = (t / std::f64::consts::SQRT_2).floor() as u64;
    while 2.0 * ((w + 1) as f64).powi(2) <= t * t {
        w += 1;
    }
    while w > 0 && 2.0 * (w as f64).powi(2) > t * t {
        w -= 1;
    }
    count_quadruples_sq(2 * w * w, primitive)
}
