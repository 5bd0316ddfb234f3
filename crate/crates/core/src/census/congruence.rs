//! Residue classes of curvatures and quadruples modulo `m`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{census, Census, Mode};
use crate::arith::factor;
use crate::descartes::Quadruple;
use crate::error::{Error, Result};

/// A sorted residue multiset.
pub type Pattern = [u64; 4];

/// Largest modulus accepted by [`orbit_partition`].
pub const MAX_ORBIT_MODULUS: u64 = 128;

fn check_modulus(m: u64) -> Result<()> {
    if m == 0 {
        Err(Error::InvalidArgument("modulus must be positive".into()))
    } else {
        Ok(())
    }
}

fn sorted(mut p: Pattern) -> Pattern {
    p.sort_unstable();
    p
}

/// The four patterns reached from `p` by `S₁…S₄` mod `m`, in slot order.
pub fn pattern_transitions(p: Pattern, m: u64) -> [Pattern; 4] {
    let s = p.iter().map(|&x| x % m).sum::<u64>() % m;
    std::array::from_fn(|i| {
        let mut c = p;
        // 2s − 3x mod m
        c[i] = (2 * s + 3 * (m - p[i] % m)) % m;
        sorted(c)
    })
}

fn root_pattern(root: &Quadruple<i64>, m: u64) -> Pattern {
    root.residues(&(m as i64)).map(|r| r as u64)
}

fn closure(start: Pattern, m: u64) -> BTreeSet<Pattern> {
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(p) = queue.pop_front() {
        for c in pattern_transitions(p, m) {
            if seen.insert(c) {
                queue.push_back(c);
            }
        }
    }
    seen
}

/// Residues mod `m` taken by the curvatures of the packing: every entry of
/// every pattern in the generator closure of the root's residues.
pub fn allowed_classes(root: &Quadruple<i64>, m: u64) -> Result<BTreeSet<u64>> {
    check_modulus(m)?;
    root.require_descartes()?;
    Ok(closure(root_pattern(root, m), m)
        .into_iter()
        .flat_map(|p| p.into_iter())
        .collect())
}

/// Positive integers `≤ T` missing from a census, grouped by allowed class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissingReport {
    pub modulus: u64,
    pub bound: u64,
    pub allowed_classes: BTreeSet<u64>,
    pub missing: BTreeMap<u64, Vec<u64>>,
}

/// One class row of a [`MissingReport`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissingClass {
    pub modulus: u64,
    pub class: u64,
    pub missing: Vec<u64>,
}

impl MissingReport {
    pub fn class(&self, r: u64) -> Option<&[u64]> {
        self.missing.get(&r).map(|v| v.as_slice())
    }

    pub fn rows(&self) -> Vec<MissingClass> {
        self.missing
            .iter()
            .map(|(&class, v)| MissingClass {
                modulus: self.modulus,
                class,
                missing: v.clone(),
            })
            .collect()
    }

    pub fn total(&self) -> usize {
        self.missing.values().map(Vec::len).sum()
    }
}

pub fn missing_values(c: &Census, m: u64) -> Result<MissingReport> {
    check_modulus(m)?;
    let allowed = allowed_classes(&c.root, m)?;
    let mut missing: BTreeMap<u64, Vec<u64>> = allowed.iter().map(|&r| (r, Vec::new())).collect();
    for k in c.present.iter_zeros().skip(1) {
        let k = k as u64;
        if let Some(v) = missing.get_mut(&(k % m)) {
            v.push(k);
        }
    }
    Ok(MissingReport {
        modulus: m,
        bound: c.bound,
        allowed_classes: allowed,
        missing,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitFilter {
    /// Residues of primitive integer Descartes quadruples.
    Primitive,
    /// Residues of all integer Descartes quadruples.
    All,
    /// Every solution of the Descartes equation mod `m`.
    Congruence,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    pub patterns: Vec<Pattern>,
    pub residues: BTreeSet<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitTable {
    pub modulus: u64,
    pub filter: OrbitFilter,
    pub orbits: Vec<Orbit>,
}

impl OrbitTable {
    pub fn orbit_of(&self, p: Pattern) -> Option<&Orbit> {
        let p = sorted(p.map(|x| x % self.modulus));
        self.orbits.iter().find(|o| o.patterns.binary_search(&p).is_ok())
    }
}

/// `2Σx² − (Σx)²` reduced mod `n`.
fn defect_mod(p: &[u64; 4], n: u64) -> u64 {
    let n = n as u128;
    let s: u128 = p.iter().map(|&x| x as u128).sum::<u128>() % n;
    let sq: u128 = p.iter().map(|&x| (x as u128 * x as u128) % n).sum::<u128>() % n;
    ((2 * sq + n * n - s * s % n) % n) as u64
}

/// Whether `v mod 2^k` is the reduction of a primitive 2-adic zero.
///
/// At a primitive zero the gradient `2(2u − Σu)` has valuation at most 2, so
/// Hensel lifting from `Q(u) ≡ 0 (mod 2^{s+1})` with `s ≥ max(k+1, 4)`
/// reaches a true zero congruent to `u` mod `2^k`; conversely `Q(u) mod
/// 2^{s+1}` depends only on `u mod 2^s`.
fn two_adic_primitive(v: [u64; 4], k: u32) -> bool {
    let s = (k + 1).max(4);
    let step = 1u64 << k;
    let lifts = 1u64 << (s - k);
    let modulus = 1u64 << (s + 1);
    for t in 0..lifts.pow(4) {
        let u: [u64; 4] = std::array::from_fn(|i| v[i] + step * ((t / lifts.pow(i as u32)) % lifts));
        if u.iter().any(|x| x % 2 == 1) && defect_mod(&u, modulus) == 0 {
            return true;
        }
    }
    false
}

struct PrimitiveTest {
    odd: Vec<(u64, u64)>,
    two: Option<(u64, u32)>,
    cache: HashMap<[u64; 4], bool>,
}

impl PrimitiveTest {
    fn new(m: u64) -> Self {
        let mut odd = Vec::new();
        let mut two = None;
        for (p, e) in factor(m) {
            if p == 2 {
                two = Some((1 << e, e));
            } else {
                odd.push((p, p.pow(e)));
            }
        }
        PrimitiveTest {
            odd,
            two,
            cache: HashMap::new(),
        }
    }

    fn accepts(&mut self, v: &Pattern) -> bool {
        // odd p: the form has unit determinant, so every nonzero zero lifts
        for &(p, pe) in &self.odd {
            if defect_mod(&v.map(|x| x % pe), pe) != 0 || v.iter().all(|x| x % p == 0) {
                return false;
            }
        }
        match self.two {
            None => true,
            Some((pk, k)) => {
                let key = sorted(v.map(|x| x % pk));
                *self.cache.entry(key).or_insert_with(|| two_adic_primitive(key, k))
            }
        }
    }
}

fn patterns(m: u64) -> impl Iterator<Item = Pattern> {
    (0..m).flat_map(move |a| {
        (a..m).flat_map(move |b| (b..m).flat_map(move |c| (c..m).map(move |d| [a, b, c, d])))
    })
}

/// Partition residue patterns mod `m` into generator orbits.
pub fn orbit_partition(m: u64, filter: OrbitFilter) -> Result<OrbitTable> {
    if !(2..=MAX_ORBIT_MODULUS).contains(&m) {
        return Err(Error::InvalidArgument(format!(
            "orbit modulus must lie in 2..={MAX_ORBIT_MODULUS}, got {m}"
        )));
    }
    let mut test = PrimitiveTest::new(m);
    let members: BTreeSet<Pattern> = match filter {
        OrbitFilter::Congruence => patterns(m).filter(|p| defect_mod(p, m) == 0).collect(),
        OrbitFilter::Primitive => patterns(m).filter(|p| test.accepts(p)).collect(),
        OrbitFilter::All => {
            let prim: Vec<Pattern> = patterns(m).filter(|p| test.accepts(p)).collect();
            let mut all = BTreeSet::from([[0; 4]]);
            for l in 1..m {
                all.extend(prim.iter().map(|p| sorted(p.map(|x| x * l % m))));
            }
            all
        }
    };

    let index: HashMap<Pattern, usize> = members.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut parent: Vec<usize> = (0..members.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (i, &p) in members.iter().enumerate() {
        for c in pattern_transitions(p, m) {
            let j = *index
                .get(&c)
                .expect("pattern sets are closed under the generators");
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<Pattern>> = BTreeMap::new();
    for (i, &p) in members.iter().enumerate() {
        groups.entry(find(&mut parent, i)).or_default().push(p);
    }
    let orbits = groups
        .into_values()
        .map(|patterns| Orbit {
            residues: patterns.iter().flatten().copied().collect(),
            patterns,
        })
        .collect();
    Ok(OrbitTable {
        modulus: m,
        filter,
        orbits,
    })
}

/// Smallest curvature found in each residue class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueWitness {
    pub modulus: u64,
    /// Largest curvature searched.
    pub searched_to: u64,
    pub witnesses: BTreeMap<u64, i64>,
    /// Every class mod `m` has a witness.
    pub complete: bool,
}

/// Search the packing for a curvature in each class mod `m`, doubling the
/// census bound from 1024 until every class is hit, no further class can
/// appear, or `cap` is reached.
pub fn residue_cover_witness(root: &Quadruple<i64>, m: u64, cap: u64) -> Result<ResidueWitness> {
    check_modulus(m)?;
    if !crate::is_primitive(root)? {
        return Err(Error::InvalidArgument(format!("{root} is not primitive")));
    }
    let reachable = allowed_classes(root, m)?;
    let floor = (*root.max_entry()).max(1) as u64;
    let mut bound = 1024u64.max(floor).min(cap.max(floor));
    loop {
        let c = census(root, bound, Mode::Values)?;
        let mut witnesses = BTreeMap::new();
        for &e in &c.nonpositive {
            witnesses.entry(e.rem_euclid(m as i64) as u64).or_insert(e);
        }
        for v in c.values() {
            if witnesses.len() as u64 == m {
                break;
            }
            witnesses.entry(v % m).or_insert(v as i64);
        }
        let complete = witnesses.len() as u64 == m;
        let exhausted = witnesses.keys().copied().collect::<BTreeSet<_>>() == reachable;
        if complete || exhausted || bound >= cap {
            if !complete && !exhausted && m.gcd(&30) == 1 {
                return Err(Error::CapTooSmall { modulus: m, cap });
            }
            return Ok(ResidueWitness {
                modulus: m,
                searched_to: bound,
                witnesses,
                complete,
            });
        }
        bound = (bound * 2).min(cap);
    }
}
