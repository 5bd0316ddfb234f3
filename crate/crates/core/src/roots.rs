//! Primitive root quadruples with a given smallest entry `−n`.
//!
//! Roots `(−n, x, y, z)` correspond to solutions of `n² + m² = d₁d₂` with
//! `0 ≤ 2m ≤ d₁ ≤ d₂`, and to reduced binary quadratic forms
//! `[A, B, C] = AT² + 2BTU + CU²` of discriminant `−4n²`, which makes their
//! number a `GL₂` class number: `½(h(−4n²) + a(−4n²))`.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{chi_m4, divisors, factor, gcd3, PrimeTable};
use crate::descartes::Quadruple;
use crate::error::{Error, Result};
use crate::group::is_root;

/// A solution of `x² + m² = d₁d₂` with `x = −n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamSolution {
    pub x: i64,
    pub d1: i64,
    pub d2: i64,
    pub m: i64,
}

/// The form `AT² + 2BTU + CU²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinaryForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl BinaryForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        BinaryForm { a, b, c }
    }

    /// `4B² − 4AC`.
    pub fn discriminant(&self) -> i64 {
        4 * self.b * self.b - 4 * self.a * self.c
    }

    /// `0 ≤ 2B ≤ A ≤ C`.
    pub fn is_reduced(&self) -> bool {
        0 <= self.b && 2 * self.b <= self.a && self.a <= self.c
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    /// Reduced forms of shape `[A,0,C]`, `[2B,B,C]` or `[A,B,A]`.
    pub fn is_ambiguous(&self) -> bool {
        self.b == 0 || self.a == 2 * self.b || self.a == self.c
    }
}

impl std::fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{},{}]", self.a, self.b, self.c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootRecord {
    pub root: Quadruple<i64>,
    pub param: ParamSolution,
    pub form: BinaryForm,
}

/// Every primitive root quadruple with smallest entry `−n`, sorted.
pub fn enumerate_roots(n: u64) -> Vec<RootRecord> {
    if n == 0 {
        return vec![RootRecord {
            root: Quadruple::new(0, 0, 1, 1),
            param: ParamSolution {
                x: 0,
                d1: 0,
                d2: 1,
                m: 0,
            },
            form: BinaryForm::new(0, 0, 1),
        }];
    }
    let n2 = n * n;
    let mmax = ((n2 / 3) as f64).sqrt() as u64 + 1;
    let table = PrimeTable::for_values_up_to(n2 + mmax * mmax);
    let ni = n as i64;
    let mut out = Vec::new();
    for m in 0u64.. {
        if 3 * m * m > n2 {
            break;
        }
        let big = n2 + m * m;
        for d1 in divisors(&table.factor(big)) {
            if d1 * d1 > big {
                break;
            }
            if d1 < 2 * m {
                continue;
            }
            let d2 = big / d1;
            if gcd3(n, d1, d2) != 1 {
                continue;
            }
            let (d1, d2, mi) = (d1 as i64, d2 as i64, m as i64);
            out.push(RootRecord {
                root: Quadruple::new(-ni, d1 + ni, d2 + ni, d1 + d2 + ni - 2 * mi),
                param: ParamSolution {
                    x: -ni,
                    d1,
                    d2,
                    m: mi,
                },
                form: BinaryForm::new(d1, mi, d2),
            });
        }
    }
    out.sort_by(|a, b| a.root.cmp(&b.root));
    out
}

/// `h(−4n²)`: `1` for `n = 1`, otherwise `(n/2)∏_{p|n}(1 − χ₋₄(p)/p)`.
pub fn class_number(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidArgument("class number needs n ≥ 1".into()));
    }
    if n == 1 {
        return Ok(1);
    }
    let mut num = n as u128;
    let mut den = 2u128;
    for (p, _) in factor(n) {
        num *= (p as i128 - chi_m4(p) as i128) as u128;
        den *= p as u128;
    }
    debug_assert_eq!(num % den, 0);
    Ok((num / den) as u64)
}

/// `a(−4n²)`: `2^{ω(n)−1}` if `n ≡ 2 (mod 4)`, else `2^{ω(n)}`.
pub fn ambiguous_count(n: u64) -> Result<u64> {
    if n <= 1 {
        return Err(Error::InvalidArgument(format!(
            "ambiguous count is defined here for n > 1, got {n}"
        )));
    }
    let omega = factor(n).len() as u32;
    Ok(if n % 4 == 2 {
        1 << (omega - 1)
    } else {
        1 << omega
    })
}

/// Number of primitive root quadruples with smallest entry `−n`.
pub fn count_roots(n: u64) -> u64 {
    if n <= 1 {
        return 1;
    }
    let h = class_number(n).expect("n ≥ 2");
    let a = ambiguous_count(n).expect("n ≥ 2");
    (h + a) / 2
}

/// The reduced form `[−n+x, ½(−n+x+y−z), −n+y]` of a root `(−n,x,y,z)`.
pub fn to_binary_form(root: &Quadruple<i64>) -> Result<BinaryForm> {
    root.require_descartes()?;
    if !is_root(root)? {
        return Err(Error::NotRoot(root.to_string()));
    }
    let [a, x, y, z] = root.sorted().entries;
    let form = BinaryForm::new(a + x, (a + x + y - z) / 2, a + y);
    debug_assert_eq!(form.discriminant(), -4 * a * a);
    if !form.is_reduced() || form.discriminant() != -4 * a * a {
        return Err(Error::NotRoot(root.to_string()));
    }
    Ok(form)
}

/// Primitive reduced forms of discriminant `−4n²` with `B ≥ 0`.
pub fn enumerate_reduced_forms(n: u64) -> Result<Vec<BinaryForm>> {
    if n == 0 {
        return Err(Error::InvalidArgument("reduced forms need n ≥ 1".into()));
    }
    let n2 = (n * n) as i64;
    let mut out = Vec::new();
    // A² ≤ AC = n² + B² ≤ n² + A²/4 bounds A by 2n/√3
    let mut a = 1i64;
    while 3 * a * a <= 4 * n2 {
        for b in 0..=a / 2 {
            let t = n2 + b * b;
            if t % a != 0 {
                continue;
            }
            let f = BinaryForm::new(a, b, t / a);
            if f.c >= a && f.is_primitive() {
                out.push(f);
            }
        }
        a += 1;
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roots_of(n: u64) -> Vec<Quadruple<i64>> {
        enumerate_roots(n).into_iter().map(|r| r.root).collect()
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(roots_of(0), vec![Quadruple::new(0, 0, 1, 1)]);
        assert_eq!(roots_of(1), vec![Quadruple::new(-1, 2, 2, 3)]);
        assert_eq!(roots_of(2), vec![Quadruple::new(-2, 3, 6, 7)]);
        assert_eq!(
            roots_of(3),
            vec![Quadruple::new(-3, 4, 12, 13), Quadruple::new(-3, 5, 8, 8)]
        );
    }

    #[test]
    fn records_are_consistent() {
        for n in 1..=120u64 {
            let recs = enumerate_roots(n);
            let ni = n as i64;
            assert!(recs
                .iter()
                .any(|r| r.root == Quadruple::new(-ni, ni + 1, ni * (ni + 1), ni * (ni + 1) + 1)));
            for r in recs {
                let p = r.param;
                assert_eq!(p.x * p.x + p.m * p.m, p.d1 * p.d2);
                assert!(p.x < 0 && 0 <= 2 * p.m && 2 * p.m <= p.d1 && p.d1 <= p.d2);
                assert!(r.root.is_descartes().unwrap());
                assert!(is_root(&r.root).unwrap());
                assert!(crate::is_primitive(&r.root).unwrap());
                assert_eq!(to_binary_form(&r.root).unwrap(), r.form);
            }
        }
    }

    #[test]
    fn counts() {
        assert_eq!(count_roots(0), 1);
        assert_eq!(count_roots(1), 1);
        assert_eq!(count_roots(9), 4);
        assert_eq!(count_roots(48), 18);
        assert_eq!(count_roots(50), 11);
        assert_eq!(count_roots(2003), 502);
    }

    #[test]
    fn class_numbers() {
        assert_eq!(class_number(1).unwrap(), 1);
        assert_eq!(class_number(3).unwrap(), 2);
        assert_eq!(class_number(5).unwrap(), 2);
        assert!(class_number(0).is_err());
    }

    #[test]
    fn ambiguous_counts() {
        assert_eq!(ambiguous_count(2).unwrap(), 1);
        assert_eq!(ambiguous_count(6).unwrap(), 2);
        assert_eq!(ambiguous_count(12).unwrap(), 4);
        assert!(ambiguous_count(1).is_err());
    }

    #[test]
    fn binary_forms() {
        let f = |a, b, c, d| to_binary_form(&Quadruple::new(a, b, c, d)).unwrap();
        assert_eq!(f(-1, 2, 2, 3), BinaryForm::new(1, 0, 1));
        assert_eq!(f(-2, 3, 6, 7), BinaryForm::new(1, 0, 4));
        assert_eq!(f(-3, 5, 8, 8), BinaryForm::new(2, 1, 5));
        assert_eq!(f(3, 2, -1, 2), BinaryForm::new(1, 0, 1));
        assert!(matches!(
            to_binary_form(&Quadruple::new(-1, 2, 3, 6)),
            Err(Error::NotRoot(_))
        ));
    }

    #[test]
    fn reduced_form_examples() {
        let forms = |n| enumerate_reduced_forms(n).unwrap();
        assert_eq!(forms(1), vec![BinaryForm::new(1, 0, 1)]);
        assert_eq!(forms(2), vec![BinaryForm::new(1, 0, 4)]);
        assert_eq!(forms(3), vec![BinaryForm::new(1, 0, 9), BinaryForm::new(2, 1, 5)]);
    }

    #[test]
    fn formulas_match_form_oracle() {
        // SL₂ classes: each non-ambiguous reduced form with B > 0 pairs with
        // its mirror [A,−B,C], so h = 2·#(B ≥ 0) − #ambiguous.
        for n in 2..=400u64 {
            let forms = enumerate_reduced_forms(n).unwrap();
            let amb = forms.iter().filter(|f| f.is_ambiguous()).count() as u64;
            let h = 2 * forms.len() as u64 - amb;
            assert_eq!(class_number(n).unwrap(), h, "h at n={n}");
            assert_eq!(ambiguous_count(n).unwrap(), amb, "a at n={n}");
        }
    }

    #[test]
    fn growth_envelope() {
        // n = 3 sits below the lower envelope: 3/(8·ln ln 3) ≈ 3.99 > 2
        assert_eq!(count_roots(3), 2);
        for n in 4..=10_000u64 {
            let c = count_roots(n) as f64;
            let ll = (n as f64).ln().ln();
            assert!(c > n as f64 / (8.0 * ll) && c < 8.0 * n as f64 * ll, "n={n}");
        }
    }
}
