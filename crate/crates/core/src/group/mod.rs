//! The Apollonian group.
//!
//! Generators `S₁..S₄` act on quadruples by replacing one entry with twice
//! the sum of the other three minus itself. A [`Word`] stores its letters in
//! printed order, so `(g_n, …, g_1)` denotes the product `S_{g_n}···S_{g_1}`
//! and the rightmost letter `g_1` acts first.

mod growth;
mod reduce;
mod spectral;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::descartes::Quadruple;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use growth::{
    extremal_growth, max_word, median_growth_experiment, s4s3_power_growth, ExtremeMode,
    GrowthResult, MedianReport, PairPowerGrowth, THOMAS_DHAR_ALPHA,
};
pub use reduce::{is_root, reduce, ReductionResult};
pub use spectral::{
    charpoly, joint_spectral_radius, shift_reflect_operator, spectral_radius, theta_closed_form,
    word_spectral_search, SpectralReport, SpectralSearch,
};

/// One of the four generators, `S₁..S₄`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Generator(u8);

impl Generator {
    pub const ALL: [Generator; 4] = [Generator(1), Generator(2), Generator(3), Generator(4)];

    pub fn new(index: u8) -> Result<Self> {
        if (1..=4).contains(&index) {
            Ok(Generator(index))
        } else {
            Err(Error::BadGenerator(index))
        }
    }

    /// 1-based index.
    pub fn index(self) -> u8 {
        self.0
    }

    /// 0-based slot in a quadruple.
    pub fn slot(self) -> usize {
        self.0 as usize - 1
    }

    /// The generator replacing slot `slot` (0-based).
    pub fn from_slot(slot: usize) -> Self {
        assert!(slot < 4, "slot {slot} out of range");
        Generator(slot as u8 + 1)
    }

    /// The 4×4 integer matrix of this generator.
    pub fn matrix(self) -> [[i64; 4]; 4] {
        let mut m = [[0i64; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        let s = self.slot();
        m[s] = [2, 2, 2, 2];
        m[s][s] = -1;
        m
    }
}

impl TryFrom<u8> for Generator {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        Generator::new(v)
    }
}

impl From<Generator> for u8 {
    fn from(g: Generator) -> u8 {
        g.0
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}", self.0)
    }
}

/// A reduced word, letters in printed order (leftmost acts last).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Generator>", into = "Vec<Generator>")]
pub struct Word {
    letters: Vec<Generator>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    /// Rejects words with two equal adjacent letters.
    pub fn new(letters: Vec<Generator>) -> Result<Self> {
        if let Some(p) = letters.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::NotReduced {
                letter: letters[p].index(),
                position: p + 1,
            });
        }
        Ok(Word { letters })
    }

    pub fn from_indices(indices: &[u8]) -> Result<Self> {
        let letters = indices
            .iter()
            .map(|&i| Generator::new(i))
            .collect::<Result<Vec<_>>>()?;
        Word::new(letters)
    }

    /// Builds a word from letters listed in the order they act.
    pub fn from_applied(mut applied: Vec<Generator>) -> Result<Self> {
        applied.reverse();
        Word::new(applied)
    }

    pub fn letters(&self) -> &[Generator] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Letters in the order they act on a quadruple (rightmost first).
    pub fn applied(&self) -> impl Iterator<Item = Generator> + '_ {
        self.letters.iter().rev().copied()
    }

    /// The first generator to act, `g_1`.
    pub fn first_applied(&self) -> Option<Generator> {
        self.letters.last().copied()
    }

    /// `self · other` as a product of matrices, when the result is reduced.
    pub fn concat(&self, other: &Word) -> Result<Word> {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word::new(letters)
    }

    pub fn inverse(&self) -> Word {
        let mut letters = self.letters.clone();
        letters.reverse();
        Word { letters }
    }
}

impl TryFrom<Vec<Generator>> for Word {
    type Error = Error;
    fn try_from(v: Vec<Generator>) -> Result<Self> {
        Word::new(v)
    }
}

impl From<Word> for Vec<Generator> {
    fn from(w: Word) -> Self {
        w.letters
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "I");
        }
        for g in &self.letters {
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

/// Accepts `S4S3S2S1`, `4321`, `4,3,2,1`, `4 3 2 1`, and `I` or `""` for the identity.
impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() || t == "I" {
            return Ok(Word::identity());
        }
        let mut idx = Vec::new();
        for ch in t.chars() {
            match ch {
                'S' | 's' | ',' | ' ' | '·' | '*' => {}
                '1'..='4' => idx.push(ch as u8 - b'0'),
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "cannot parse word {s:?}: unexpected {ch:?}"
                    )))
                }
            }
        }
        Word::from_indices(&idx)
    }
}

/// Apply one generator: `q_i ← 2·(sum of the others) − q_i`.
pub fn apply_generator<T: Scalar>(q: &Quadruple<T>, g: Generator) -> Result<Quadruple<T>> {
    let s = g.slot();
    let mut others = T::zero();
    for (j, e) in q.entries.iter().enumerate() {
        if j != s {
            others = others.add_c(e)?;
        }
    }
    let mut out = q.clone();
    out.entries[s] = others.double_c()?.sub_c(&q.entries[s])?;
    Ok(out)
}

/// `W·q`, applying letters right to left.
pub fn apply_word<T: Scalar>(q: &Quadruple<T>, w: &Word) -> Result<Quadruple<T>> {
    let mut cur = q.clone();
    for g in w.applied() {
        cur = apply_generator(&cur, g)?;
    }
    Ok(cur)
}

/// An element of the group as an exact 4×4 matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement<T> {
    pub matrix: [[T; 4]; 4],
    /// Sum of squared entries, `‖M‖_F²`.
    pub frobenius_sq: T,
}

fn frob_sq<T: Scalar>(m: &[[T; 4]; 4]) -> Result<T> {
    let mut s = T::zero();
    for row in m {
        for e in row {
            s = s.add_c(&e.mul_c(e)?)?;
        }
    }
    Ok(s)
}

fn lift<T: Scalar>(m: &[[i64; 4]; 4]) -> [[T; 4]; 4] {
    m.map(|row| row.map(T::lit))
}

impl<T: Scalar> GroupElement<T> {
    pub fn from_matrix(matrix: [[T; 4]; 4]) -> Result<Self> {
        let frobenius_sq = frob_sq(&matrix)?;
        Ok(Self {
            matrix,
            frobenius_sq,
        })
    }

    pub fn identity() -> Self {
        let mut m = [[0i64; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        Self {
            matrix: lift(&m),
            frobenius_sq: T::lit(4),
        }
    }

    pub fn generator(g: Generator) -> Self {
        Self::from_matrix(lift(&g.matrix())).expect("small entries")
    }

    /// `self · S_g`, as a column operation.
    pub fn mul_generator(&self, g: Generator) -> Result<Self> {
        let s = g.slot();
        let mut m = self.matrix.clone();
        for row in m.iter_mut() {
            let pivot = row[s].clone();
            let twice = pivot.double_c()?;
            for (j, e) in row.iter_mut().enumerate() {
                *e = if j == s {
                    -pivot.clone()
                } else {
                    e.add_c(&twice)?
                };
            }
        }
        Self::from_matrix(m)
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        let mut m: [[T; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| T::zero()));
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = T::zero();
                for k in 0..4 {
                    acc = acc.add_c(&self.matrix[i][k].mul_c(&rhs.matrix[k][j])?)?;
                }
                m[i][j] = acc;
            }
        }
        Self::from_matrix(m)
    }

    pub fn apply(&self, q: &Quadruple<T>) -> Result<Quadruple<T>> {
        let mut out = Quadruple::zero();
        for i in 0..4 {
            let mut acc = T::zero();
            for k in 0..4 {
                acc = acc.add_c(&self.matrix[i][k].mul_c(&q.entries[k])?)?;
            }
            out.entries[i] = acc;
        }
        Ok(out)
    }

    /// Checks `Mᵀ Q_D M = Q_D` where `Q_D = 2I − J`.
    pub fn is_automorph(&self) -> Result<bool> {
        let m = &self.matrix;
        for i in 0..4 {
            for j in 0..4 {
                // (Mᵀ Q M)_{ij} = 2 Σ_k M_ki M_kj − (Σ_k M_ki)(Σ_k M_kj)
                let mut dot = T::zero();
                let mut ci = T::zero();
                let mut cj = T::zero();
                for row in m.iter() {
                    dot = dot.add_c(&row[i].mul_c(&row[j])?)?;
                    ci = ci.add_c(&row[i])?;
                    cj = cj.add_c(&row[j])?;
                }
                let v = dot.double_c()?.sub_c(&ci.mul_c(&cj)?)?;
                let want = if i == j { T::one() } else { -T::one() };
                if v != want {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn to_big(&self) -> GroupElement<BigInt> {
        GroupElement {
            matrix: self.matrix.clone().map(|r| r.map(|e| e.to_big())),
            frobenius_sq: self.frobenius_sq.to_big(),
        }
    }

    /// `‖M‖_F` in floating point.
    pub fn frobenius(&self) -> f64 {
        self.frobenius_sq.to_f64().unwrap_or(f64::INFINITY).sqrt()
    }

    pub fn to_f64(&self) -> [[f64; 4]; 4] {
        self.matrix
            .clone()
            .map(|r| r.map(|e| e.to_f64().unwrap_or(f64::NAN)))
    }
}

/// The matrix `S_{g_n}···S_{g_1}` in a fixed scalar type.
pub fn word_matrix<T: Scalar>(w: &Word) -> Result<GroupElement<T>> {
    let mut m = GroupElement::<T>::identity();
    for &g in w.letters() {
        m = m.mul_generator(g)?;
    }
    Ok(m)
}

/// A word matrix in the narrowest exact representation that holds it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactElement {
    Small(GroupElement<i64>),
    Big(GroupElement<BigInt>),
}

impl ExactElement {
    pub fn to_big(&self) -> GroupElement<BigInt> {
        match self {
            ExactElement::Small(m) => m.to_big(),
            ExactElement::Big(m) => m.clone(),
        }
    }

    pub fn frobenius_sq(&self) -> BigInt {
        match self {
            ExactElement::Small(m) => BigInt::from(m.frobenius_sq),
            ExactElement::Big(m) => m.frobenius_sq.clone(),
        }
    }

    pub fn is_small(&self) -> bool {
        matches!(self, ExactElement::Small(_))
    }
}

/// Exact matrix of a word; retries in `BigInt` when 64 bits overflow.
pub fn word_to_matrix(w: &Word) -> ExactElement {
    match word_matrix::<i64>(w) {
        Ok(m) => ExactElement::Small(m),
        Err(_) => ExactElement::Big(
            word_matrix::<BigInt>(w).expect("arbitrary precision cannot overflow"),
        ),
    }
}

/// Every reduced word of exactly `len` letters, in lexicographic order of
/// the applied sequence.
pub fn reduced_words(len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut applied: Vec<Generator> = Vec::with_capacity(len);
    fn rec(len: usize, applied: &mut Vec<Generator>, out: &mut Vec<Word>) {
        if applied.len() == len {
            out.push(Word::from_applied(applied.clone()).expect("built reduced"));
            return;
        }
        for g in Generator::ALL {
            if applied.last() == Some(&g) {
                continue;
            }
            applied.push(g);
            rec(len, applied, out);
            applied.pop();
        }
    }
    rec(len, &mut applied, &mut out);
    out
}

/// A uniformly random reduced word of length `len`.
pub fn random_word<R: rand::Rng + ?Sized>(rng: &mut R, len: usize) -> Word {
    let mut applied: Vec<Generator> = Vec::with_capacity(len);
    for _ in 0..len {
        let g = match applied.last() {
            None => Generator::ALL[rng.gen_range(0..4)],
            Some(prev) => {
                let k = rng.gen_range(0..3);
                let mut c = Generator::ALL.into_iter().filter(|g| g != prev);
                c.nth(k).expect("three choices")
            }
        };
        applied.push(g);
    }
    Word::from_applied(applied).expect("built reduced")
}
