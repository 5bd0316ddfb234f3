//! Exact placement and SVG rendering of bounded packings.
//!
//! A circle is carried as `(k, kx, ky)`. The reflection `S_i` acts linearly on
//! all three columns, so a configuration placed exactly stays exact. The `x`
//! coordinates of the initial configuration are rational; the `y` coordinates
//! share one surd, so `ky` is stored as a rational coefficient of `√s` with
//! `s` squarefree and fixed per packing (`s = 1` for strongly integral roots).

use std::fmt::Write as _;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::factor;
use crate::descartes::Quadruple;
use crate::error::{Error, Result};
use crate::group::{is_root, Generator};

pub type Rational = Ratio<i64>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Placement {
    pub curvature: i64,
    /// `(k·x, k·y/√radicand)`.
    pub weighted_center: [Rational; 2],
    pub radicand: u64,
}

impl Placement {
    pub fn radius(&self) -> f64 {
        1.0 / (self.curvature as f64).abs()
    }

    pub fn center(&self) -> (f64, f64) {
        let k = self.curvature as f64;
        let [x, y] = &self.weighted_center;
        (
            ratio_f64(x) / k,
            ratio_f64(y) * (self.radicand as f64).sqrt() / k,
        )
    }

    /// Both weighted coordinates are integers.
    pub fn is_integral(&self) -> bool {
        let [x, y] = &self.weighted_center;
        x.is_integer() && (y.is_zero() || (self.radicand == 1 && y.is_integer()))
    }
}

fn ratio_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Four mutually tangent circles.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration {
    pub circles: [Placement; 4],
}

impl Configuration {
    pub fn curvatures(&self) -> Quadruple<i64> {
        Quadruple::from_array(self.circles.each_ref().map(|c| c.curvature))
    }

    /// Largest `|dist − (r₁ ± r₂)| / max(r₁, r₂)` over the six pairs.
    pub fn tangency_residual(&self) -> f64 {
        let mut worst = 0f64;
        for i in 0..4 {
            for j in i + 1..4 {
                let (p, q) = (&self.circles[i], &self.circles[j]);
                let ((x1, y1), (x2, y2)) = (p.center(), q.center());
                let d = (x1 - x2).hypot(y1 - y2);
                let (r1, r2) = (p.radius(), q.radius());
                let target = if p.curvature < 0 || q.curvature < 0 {
                    (r1 - r2).abs()
                } else {
                    r1 + r2
                };
                worst = worst.max((d - target).abs() / r1.max(r2));
            }
        }
        worst
    }

    /// Exact check of the curvature-center relations: with
    /// `Q = I − ½·11ᵀ`, `kᵀQk = kᵀQX = kᵀQY = XᵀQY = 0` and `XᵀQX = YᵀQY = 2`.
    pub fn is_exact(&self) -> bool {
        let s = Ratio::from_integer(self.circles[0].radicand as i128);
        let col = |f: &dyn Fn(&Placement) -> Ratio<i128>| -> [Ratio<i128>; 4] {
            std::array::from_fn(|i| f(&self.circles[i]))
        };
        let k = col(&|c| Ratio::from_integer(c.curvature as i128));
        let x = col(&|c| widen(&c.weighted_center[0]));
        let y = col(&|c| widen(&c.weighted_center[1]));
        let form = |u: &[Ratio<i128>; 4], v: &[Ratio<i128>; 4]| {
            let dot: Ratio<i128> = u.iter().zip(v).map(|(a, b)| a * b).sum();
            let su: Ratio<i128> = u.iter().sum();
            let sv: Ratio<i128> = v.iter().sum();
            dot - su * sv / 2
        };
        let two = Ratio::from_integer(2);
        self.circles.iter().all(|c| c.radicand == self.circles[0].radicand)
            && form(&k, &k).is_zero()
            && form(&k, &x).is_zero()
            && form(&k, &y).is_zero()
            && form(&x, &y).is_zero()
            && form(&x, &x) == two
            && form(&y, &y) * s == two
    }
}

fn widen(r: &Rational) -> Ratio<i128> {
    Ratio::new(*r.numer() as i128, *r.denom() as i128)
}

fn narrow(r: Ratio<i128>) -> Result<Rational> {
    match (i64::try_from(*r.numer()), i64::try_from(*r.denom())) {
        (Ok(n), Ok(d)) => Ok(Ratio::new(n, d)),
        _ => Err(Error::Overflow),
    }
}

/// `n = f²·s` with `s` squarefree.
fn square_part(n: u64) -> (u64, u64) {
    let (mut f, mut s) = (1, 1);
    for (p, e) in factor(n) {
        f *= p.pow(e / 2);
        if e % 2 == 1 {
            s *= p;
        }
    }
    (f, s)
}

/// `k·y` for a circle at `x` with `x² + y² = dist²`, as `(f/q, s)` meaning
/// `(f/q)·√s`.
fn weighted_height(k: i64, x: Ratio<i128>, dist: Ratio<i128>) -> Result<(Ratio<i128>, u64)> {
    let sq = Ratio::from_integer((k as i128) * (k as i128)) * (dist.clone() * dist - x.clone() * x);
    if sq.is_negative() {
        return Err(Error::Degenerate("circles do not meet".into()));
    }
    if sq.is_zero() {
        return Ok((Ratio::zero(), 1));
    }
    let (p, q) = (*sq.numer(), *sq.denom());
    let pq = u64::try_from(p * q).map_err(|_| Error::Overflow)?;
    let (f, s) = square_part(pq);
    Ok((Ratio::new(f as i128, q), s))
}

/// Bounding circle centered at the origin, `b` on the positive `x`-axis,
/// `c` in the closed upper half-plane and `d` wherever tangency to `c` puts
/// it (upper when `c` is on the axis). Entries are placed in sorted order.
pub fn initial_placement(root: &Quadruple<i64>) -> Result<Configuration> {
    root.require_descartes()?;
    if !is_root(root)? {
        return Err(Error::NotRoot(root.to_string()));
    }
    let [a, b, c, d] = root.sorted().entries;
    if a >= 0 {
        return Err(Error::UnsupportedGeometry(root.to_string()));
    }
    let inv = |k: i64| Ratio::new(1i128, k as i128);
    let big_r = -inv(a);
    let xb = big_r - inv(b);
    if xb.is_zero() {
        return Err(Error::Degenerate(format!("{root}: inner circle fills the bounding circle")));
    }
    // x of a circle internally tangent to the bound and externally to b
    let x_of = |k: i64| {
        let da = big_r - inv(k);
        let db = inv(b) + inv(k);
        let x = (da * da - db * db + xb * xb) / (xb * 2);
        (x, da)
    };
    let (xc, dc) = x_of(c);
    let (xd, dd) = x_of(d);
    let (hc, sc) = weighted_height(c, xc, dc)?;
    let (hd, sd) = weighted_height(d, xd, dd)?;

    let (s, yc, yd) = if !hc.is_zero() {
        // tangency of c and d fixes y_c·y_d
        let rc_rd = inv(c) + inv(d);
        let yy_s = {
            let yc2 = hc * hc * Ratio::from_integer(sc as i128) / Ratio::from_integer((c as i128).pow(2));
            let yd2 = hd * hd * Ratio::from_integer(sd as i128) / Ratio::from_integer((d as i128).pow(2));
            ((xd - xc) * (xd - xc) + yc2 + yd2 - rc_rd * rc_rd) / 2
        };
        // y_c·y_d = Yc·Yd·s/(c·d)
        let yd_coef = yy_s * Ratio::from_integer((c as i128) * (d as i128))
            / (hc * Ratio::from_integer(sc as i128));
        let sq = |h: Ratio<i128>, s: u64| h * h * Ratio::from_integer(s as i128);
        if sq(yd_coef, sc) != sq(hd, sd) {
            return Err(Error::Degenerate(format!("{root}: fourth circle misses the third")));
        }
        (sc, hc, yd_coef)
    } else if !hd.is_zero() {
        (sd, Ratio::zero(), hd)
    } else {
        return Err(Error::Degenerate(format!("{root}: collinear centers")));
    };

    let place = |k: i64, x: Ratio<i128>, y: Ratio<i128>| -> Result<Placement> {
        let kk = Ratio::from_integer(k as i128);
        Ok(Placement {
            curvature: k,
            weighted_center: [narrow(kk * x)?, narrow(y)?],
            radicand: s,
        })
    };
    let cfg = Configuration {
        circles: [
            place(a, Ratio::zero(), Ratio::zero())?,
            place(b, xb, Ratio::zero())?,
            place(c, xc, yc)?,
            place(d, xd, yd)?,
        ],
    };
    debug_assert!(cfg.is_exact());
    Ok(cfg)
}

/// Replace circle `g` by `2·(sum of the others) − itself` in every column.
pub fn child_placement(cfg: &Configuration, g: Generator) -> Result<Configuration> {
    let i = g.slot();
    let mut k = 0i64;
    let mut x = Rational::zero();
    let mut y = Rational::zero();
    for (j, c) in cfg.circles.iter().enumerate() {
        if j != i {
            k = k.checked_add(c.curvature).ok_or(Error::Overflow)?;
            x += c.weighted_center[0];
            y += c.weighted_center[1];
        }
    }
    let old = &cfg.circles[i];
    let new = Placement {
        curvature: k
            .checked_mul(2)
            .and_then(|v| v.checked_sub(old.curvature))
            .ok_or(Error::Overflow)?,
        weighted_center: [x * 2 - old.weighted_center[0], y * 2 - old.weighted_center[1]],
        radicand: old.radicand,
    };
    if new == *old {
        return Err(Error::Degenerate("reflection fixes the circle".into()));
    }
    let mut out = cfg.clone();
    out.circles[i] = new;
    Ok(out)
}

/// Every circle with curvature at most `bound`, one per reduced word plus
/// the root circles, sorted by curvature then weighted center.
pub fn packing_circles(root: &Quadruple<i64>, bound: i64) -> Result<Vec<Placement>> {
    let cfg = initial_placement(root)?;
    if bound < *root.max_entry() {
        log::warn!("bound {bound} is below the largest root curvature of {root}; image is trivial");
    }
    let mut out: Vec<Placement> = cfg
        .circles
        .iter()
        .filter(|c| c.curvature <= bound)
        .cloned()
        .collect();

    let mut frontier = vec![(cfg, 4usize)];
    while !frontier.is_empty() && frontier.len() < 1024 {
        let mut next = Vec::new();
        for (c, last) in &frontier {
            expand(c, *last, bound, &mut out, &mut next)?;
        }
        frontier = next;
    }
    let rest: Result<Vec<Vec<Placement>>> = frontier
        .into_par_iter()
        .map(|start| {
            let mut found = Vec::new();
            let mut stack = vec![start];
            while let Some((c, last)) = stack.pop() {
                expand(&c, last, bound, &mut found, &mut stack)?;
            }
            Ok(found)
        })
        .collect();
    out.extend(rest?.into_iter().flatten());
    out.sort_by(|p, q| {
        (p.curvature, &p.weighted_center).cmp(&(q.curvature, &q.weighted_center))
    });
    Ok(out)
}

fn expand(
    cfg: &Configuration,
    last: usize,
    bound: i64,
    found: &mut Vec<Placement>,
    next: &mut Vec<(Configuration, usize)>,
) -> Result<()> {
    for g in Generator::ALL {
        if g.slot() == last {
            continue;
        }
        let s: i64 = cfg.circles.iter().map(|c| c.curvature).sum();
        let k = 2 * s - 3 * cfg.circles[g.slot()].curvature;
        if k > bound {
            continue;
        }
        let child = child_placement(cfg, g)?;
        found.push(child.circles[g.slot()].clone());
        next.push((child, g.slot()));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderOptions {
    /// Width and height of the image in pixels.
    pub size_px: f64,
    pub stroke_px: f64,
    /// Circles smaller than this radius in pixels are not drawn.
    pub min_radius_px: f64,
    pub labels: bool,
    /// Label circles with at least this radius in pixels.
    pub label_min_radius_px: f64,
    pub font_px: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            size_px: 800.0,
            stroke_px: 0.5,
            min_radius_px: 0.25,
            labels: false,
            label_min_radius_px: 12.0,
            font_px: 12.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rendering {
    pub svg: String,
    pub drawn: usize,
    /// Circles below the minimum radius.
    pub skipped: usize,
}

fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

pub fn render_svg(root: &Quadruple<i64>, bound: i64, opts: &RenderOptions) -> Result<Rendering> {
    if opts.size_px <= 0.0 || opts.min_radius_px < 0.0 {
        return Err(Error::InvalidArgument("image size must be positive".into()));
    }
    let circles = packing_circles(root, bound)?;
    let big_r = 1.0 / (*root.min_entry() as f64).abs();
    let half = big_r * 1.02;
    let scale = opts.size_px / (2.0 * half);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        num(opts.size_px),
        num(opts.size_px),
        num(-half),
        num(-half),
        num(2.0 * half),
        num(2.0 * half)
    );
    let _ = writeln!(
        svg,
        r#"<g fill="none" stroke="black" stroke-width="{}">"#,
        num(opts.stroke_px / scale)
    );
    let mut labels = String::new();
    let (mut drawn, mut skipped) = (0, 0);
    for c in &circles {
        let r = c.radius();
        if r * scale < opts.min_radius_px {
            skipped += 1;
            continue;
        }
        drawn += 1;
        // SVG y grows downward
        let (x, y) = c.center();
        let _ = writeln!(svg, r#"<circle cx="{}" cy="{}" r="{}"/>"#, num(x), num(-y), num(r));
        if opts.labels && c.curvature > 0 && r * scale >= opts.label_min_radius_px {
            let font = opts.font_px.min(r * scale) / scale;
            let _ = writeln!(
                labels,
                r#"<text x="{}" y="{}" font-size="{}">{}</text>"#,
                num(x),
                num(-y),
                num(font),
                c.curvature
            );
        }
    }
    svg.push_str("</g>\n");
    if !labels.is_empty() {
        svg.push_str(r#"<g font-family="sans-serif" text-anchor="middle" dominant-baseline="central">"#);
        svg.push('\n');
        svg.push_str(&labels);
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    Ok(Rendering { svg, drawn, skipped })
}

/// The placement as floating-point `(k, x, y, r)`.
pub fn to_f64(p: &Placement) -> (f64, f64, f64, f64) {
    let (x, y) = p.center();
    (p.curvature as f64, x, y, p.radius())
}
