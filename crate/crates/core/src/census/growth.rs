//! Power-law fit of the circle-counting function.

use serde::{Deserialize, Serialize};

use super::{log_edges, Census};
use crate::error::{Error, Result};

/// Smallest census bound accepted for a fit.
pub const MIN_FIT_BOUND: u64 = 10_000;

/// Checkpoints below `T / FIT_SPAN` are dropped: the small-`t` counts carry
/// the largest relative lattice effects.
const FIT_SPAN: f64 = 1000.0;

/// Least-squares slope of `log N_P(t)` against `log t`, an estimate of the
/// exponent `α` in `N_P(T) = T^{α+o(1)}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub exponent: f64,
    pub intercept: f64,
    /// `(t, N_P(t))` used in the fit.
    pub points: Vec<(u64, u64)>,
}

pub fn growth_exponent(c: &Census) -> Result<GrowthFit> {
    let counts = c.circle_counts()?;
    if c.bound < MIN_FIT_BOUND {
        return Err(Error::InvalidArgument(format!(
            "growth fit needs T ≥ {MIN_FIT_BOUND}, got {}",
            c.bound
        )));
    }
    let lo = (c.bound as f64 / FIT_SPAN).max(1.0) as u64;
    let wanted: Vec<u64> = log_edges(c.bound, 40).into_iter().filter(|&t| t >= lo).collect();
    // counts are cumulative at ascending t; take the last entry ≤ each wanted t
    let mut points = Vec::new();
    for t in wanted {
        let i = counts.partition_point(|&(s, _)| s <= t);
        if i > 0 && counts[i - 1].0 == t {
            points.push(counts[i - 1]);
        }
    }
    points.dedup();
    if points.len() < 3 {
        return Err(Error::InvalidArgument("too few checkpoints for a fit".into()));
    }
    let xs: Vec<f64> = points.iter().map(|&(t, _)| (t as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, n)| (n as f64).ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let exponent = sxy / sxx;
    Ok(GrowthFit {
        exponent,
        intercept: my - exponent * mx,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{census, census_with, CensusOptions, Mode};
    use super::*;
    use crate::descartes::Quadruple;

    #[test]
    fn requires_multiplicity() {
        let c = census(&Quadruple::new(-1, 2, 2, 3), 20_000, Mode::Values).unwrap();
        assert!(matches!(growth_exponent(&c), Err(Error::WrongMode { .. })));
        let c = census(&Quadruple::new(-1, 2, 2, 3), 500, Mode::Multiplicity).unwrap();
        assert!(growth_exponent(&c).is_err());
    }

    #[test]
    fn packings_agree() {
        let a = growth_exponent(&census(&Quadruple::new(-1, 2, 2, 3), 100_000, Mode::Multiplicity).unwrap()).unwrap();
        let b = growth_exponent(&census(&Quadruple::new(-2, 3, 6, 7), 100_000, Mode::Multiplicity).unwrap()).unwrap();
        assert!((a.exponent - b.exponent).abs() < 0.05, "{} vs {}", a.exponent, b.exponent);
        assert!(a.points.windows(2).all(|w| w[0].1 <= w[1].1));
    }

    #[test]
    fn bucketed_and_full_fits_agree() {
        let root = Quadruple::new(-1, 2, 2, 3);
        let full = growth_exponent(&census(&root, 50_000, Mode::Multiplicity).unwrap()).unwrap();
        let mut o = CensusOptions::new(Mode::Multiplicity);
        o.full_multiplicity = Some(false);
        let b = growth_exponent(&census_with(&root, 50_000, &o).unwrap()).unwrap();
        assert_eq!(full.points, b.points);
    }
}
