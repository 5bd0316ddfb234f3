//! Descartes and Lorentz quadruples.
//!
//! A Descartes quadruple `(a, b, c, d)` is an integer zero of the Descartes
//! form `Q_D(w, x, y, z) = 2(w² + x² + y² + z²) - (w + x + y + z)²`. The
//! entries are curvatures of four mutually tangent circles. Quadruples are
//! stored in the order they were given; [`Quadruple::sorted`] returns a
//! sorted copy and never mutates the original, since the slot positions are
//! what generator words act on.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{checked_sum, exact_sqrt, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Quadruple<T> {
    pub entries: [T; 4],
}

/// A zero of the Lorentz form `-W² + X² + Y² + Z²` (when verified).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LorentzQuadruple<T> {
    pub entries: [T; 4],
}

/// Size measures of a quadruple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics<T> {
    /// Exact sum of squares, `H²`.
    pub height_sq: T,
    /// Euclidean height `H`, rounded to f64.
    pub height: f64,
    /// Entry sum `L = a + b + c + d`.
    pub lsum: T,
    /// Maximum absolute entry.
    pub supnorm: T,
}

impl<T: Scalar> Quadruple<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Self {
            entries: [a, b, c, d],
        }
    }

    pub fn from_array(entries: [T; 4]) -> Self {
        Self { entries }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Entry sum `L`, checked.
    pub fn sum(&self) -> Result<T> {
        checked_sum(&self.entries)
    }

    /// A sorted (ascending) copy.
    pub fn sorted(&self) -> Self {
        let mut e = self.entries.clone();
        e.sort();
        Self { entries: e }
    }

    pub fn min_entry(&self) -> &T {
        self.entries.iter().min().expect("four entries")
    }

    pub fn max_entry(&self) -> &T {
        self.entries.iter().max().expect("four entries")
    }

    pub fn supnorm(&self) -> T {
        self.entries
            .iter()
            .map(|e| e.abs())
            .max()
            .expect("four entries")
    }

    pub fn negated(&self) -> Self {
        Self {
            entries: self.entries.clone().map(|e| -e),
        }
    }

    pub fn is_descartes(&self) -> Result<bool> {
        Ok(descartes_defect(self)?.is_zero())
    }

    /// Fails with [`Error::NotDescartes`] unless the defect is zero.
    pub fn require_descartes(&self) -> Result<()> {
        let defect = descartes_defect(self)?;
        if defect.is_zero() {
            Ok(())
        } else {
            Err(Error::NotDescartes {
                quad: self.to_string(),
                defect: defect.to_string(),
            })
        }
    }

    /// Unordered pattern of residues mod `m`, sorted ascending.
    pub fn residues(&self, m: &T) -> [T; 4] {
        let mut r = self.entries.clone().map(|e| e.mod_floor(m));
        r.sort();
        r
    }

    pub fn map<U, F: FnMut(&T) -> U>(&self, mut f: F) -> Quadruple<U> {
        Quadruple {
            entries: [
                f(&self.entries[0]),
                f(&self.entries[1]),
                f(&self.entries[2]),
                f(&self.entries[3]),
            ],
        }
    }
}

impl<T: fmt::Display> fmt::Display for Quadruple<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.entries;
        write!(f, "({a},{b},{c},{d})")
    }
}

impl<T: fmt::Display> fmt::Display for LorentzQuadruple<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.entries;
        write!(f, "({a},{b},{c},{d})")
    }
}

impl From<[i64; 4]> for Quadruple<i64> {
    fn from(entries: [i64; 4]) -> Self {
        Self { entries }
    }
}

impl<T: Scalar> LorentzQuadruple<T> {
    pub fn new(w: T, x: T, y: T, z: T) -> Self {
        Self {
            entries: [w, x, y, z],
        }
    }

    /// `-W² + X² + Y² + Z²`.
    pub fn lorentz_defect(&self) -> Result<T> {
        let [w, x, y, z] = &self.entries;
        let s = x.mul_c(x)?.add_c(&y.mul_c(y)?)?.add_c(&z.mul_c(z)?)?;
        s.sub_c(&w.mul_c(w)?)
    }

    /// The inverse of [`to_lorentz`]; `J₀` is its own inverse.
    pub fn to_descartes(&self) -> Result<Quadruple<T>> {
        let q = j0(&self.entries)?;
        Ok(Quadruple { entries: q })
    }
}

/// `Q_D(q) = 2Σq² - (Σq)²`; zero exactly on Descartes quadruples.
pub fn descartes_defect<T: Scalar>(q: &Quadruple<T>) -> Result<T> {
    let mut squares = T::zero();
    for e in &q.entries {
        squares = squares.add_c(&e.mul_c(e)?)?;
    }
    let s = q.sum()?;
    squares.double_c()?.sub_c(&s.mul_c(&s)?)
}

/// Outcome of solving for the circles tangent to three given ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FourthCircle<T> {
    /// Both roots are integers: `(a+b+c) + 2q`, `(a+b+c) - 2q`.
    Integral(T, T),
    /// Roots are `center ± 2√radicand` with a positive non-square radicand.
    Irrational { center: T, radicand: T },
    /// `ab + bc + ca < 0`: no real tangent circle.
    Complex { radicand: T },
}

/// Classify the two curvatures tangent to circles of curvature `a, b, c`.
pub fn fourth_circle<T: Scalar>(a: &T, b: &T, c: &T) -> Result<FourthCircle<T>> {
    let radicand = a.mul_c(b)?.add_c(&b.mul_c(c)?)?.add_c(&a.mul_c(c)?)?;
    let center = a.add_c(b)?.add_c(c)?;
    if radicand.is_negative() {
        return Ok(FourthCircle::Complex { radicand });
    }
    match exact_sqrt(&radicand) {
        Some(q) => {
            let two_q = q.double_c()?;
            Ok(FourthCircle::Integral(
                center.add_c(&two_q)?,
                center.sub_c(&two_q)?,
            ))
        }
        None => Ok(FourthCircle::Irrational { center, radicand }),
    }
}

/// The two integer curvatures `(d, d')` completing `(a, b, c)`, larger first.
///
/// The pair always satisfies `d + d' = 2(a + b + c)`. A negative radicand
/// gives [`Error::NoRealSolution`]; a non-square one gives
/// [`Error::Irrational`] carrying the radicand.
pub fn solve_fourth<T: Scalar>(a: &T, b: &T, c: &T) -> Result<(T, T)> {
    match fourth_circle(a, b, c)? {
        FourthCircle::Integral(d, d2) => Ok((d, d2)),
        FourthCircle::Irrational { radicand, .. } => Err(Error::Irrational(radicand.to_string())),
        FourthCircle::Complex { radicand } => Err(Error::NoRealSolution(radicand.to_string())),
    }
}

fn j0<T: Scalar>(v: &[T; 4]) -> Result<[T; 4]> {
    let [w, x, y, z] = v;
    let s = w.add_c(x)?.add_c(y)?.add_c(z)?;
    if s.is_odd() {
        return Err(Error::OddSum(s.to_string()));
    }
    let two = T::lit(2);
    let r1 = w.add_c(x)?.sub_c(y)?.sub_c(z)?;
    let r2 = w.sub_c(x)?.add_c(y)?.sub_c(z)?;
    let r3 = w.sub_c(x)?.sub_c(y)?.add_c(z)?;
    Ok([s / two.clone(), r1 / two.clone(), r2 / two.clone(), r3 / two])
}

/// Height-preserving map `J₀` from Descartes to Lorentz quadruples.
///
/// Requires an even entry sum, which every integer Descartes quadruple has.
pub fn to_lorentz<T: Scalar>(q: &Quadruple<T>) -> Result<LorentzQuadruple<T>> {
    Ok(LorentzQuadruple {
        entries: j0(&q.entries)?,
    })
}

/// `gcd(a, b, c, d) == 1`.
pub fn is_primitive<T: Scalar>(q: &Quadruple<T>) -> Result<bool> {
    if q.is_zero() {
        return Err(Error::ZeroQuadruple);
    }
    let g = q.entries.iter().fold(T::zero(), |g, e| g.gcd(e));
    Ok(g.is_one())
}

pub fn metrics<T: Scalar>(q: &Quadruple<T>) -> Result<Metrics<T>> {
    let mut height_sq = T::zero();
    for e in &q.entries {
        height_sq = height_sq.add_c(&e.mul_c(e)?)?;
    }
    let height = height_sq.to_f64().unwrap_or(f64::INFINITY).sqrt();
    Ok(Metrics {
        height,
        height_sq,
        lsum: q.sum()?,
        supnorm: q.supnorm(),
    })
}
