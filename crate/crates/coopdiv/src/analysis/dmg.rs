//! Diversity-multiplexing curves as exact piecewise-linear functions.

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Q = Rational64;

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

fn frac(a: i64, b: i64) -> Q {
    Q::new(a, b)
}

/// Continuous, non-increasing, piecewise-linear `d(r)` on `[0, r_max]`,
/// zero beyond `r_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DmgCurve {
    pub label: String,
    breakpoints: Vec<(Q, Q)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CurveFamily {
    Optimal { n: i64 },
    TwoProduct { n: i64 },
    PepRandom { n: i64, k: Q },
    PepUniversal { n: i64 },
    FullPerfect { n: i64 },
    Alamouti,
    OrthoApprox { n: i64 },
    AlphaScaled { n: i64, alpha: Q },
    MultiAntenna { n: i64, m: i64 },
    RayleighPointToPoint { n: i64, n_r: i64 },
    RateDrop { base: Box<CurveFamily>, m: Q },
}

impl DmgCurve {
    pub fn from_points(label: impl Into<String>, points: Vec<(Q, Q)>) -> Result<Self> {
        let first = points.first().ok_or_else(|| Error::InvalidParameter("curve needs points".into()))?;
        if !first.0.is_zero() {
            return Err(Error::InvalidParameter("curve must start at r = 0".into()));
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 || w[1].1 > w[0].1 {
                return Err(Error::InvalidParameter(format!(
                    "breakpoints must have increasing r and non-increasing d: {:?}",
                    w
                )));
            }
        }
        if points.iter().any(|p| p.1.is_negative()) {
            return Err(Error::InvalidParameter("negative diversity".into()));
        }
        let mut c = Self {
            label: label.into(),
            breakpoints: points,
        };
        c.simplify();
        Ok(c)
    }

    pub fn breakpoints(&self) -> &[(Q, Q)] {
        &self.breakpoints
    }

    pub fn r_max(&self) -> Q {
        self.breakpoints.last().map(|p| p.0).unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, r: Q) -> Q {
        let bp = &self.breakpoints;
        if r <= bp[0].0 {
            return bp[0].1;
        }
        for w in bp.windows(2) {
            let ((r0, d0), (r1, d1)) = (w[0], w[1]);
            if r <= r1 {
                return d0 + (d1 - d0) * (r - r0) / (r1 - r0);
            }
        }
        Q::zero()
    }

    /// Drops zero-length tails and collinear interior points.
    fn simplify(&mut self) {
        let mut out: Vec<(Q, Q)> = Vec::with_capacity(self.breakpoints.len());
        for &p in &self.breakpoints {
            if let Some(&last) = out.last() {
                if last.1.is_zero() && p.1.is_zero() {
                    continue;
                }
            }
            while out.len() >= 2 {
                let (a, b) = (out[out.len() - 2], out[out.len() - 1]);
                if (b.1 - a.1) * (p.0 - b.0) == (p.1 - b.1) * (b.0 - a.0) {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(p);
        }
        self.breakpoints = out;
    }

    fn union_r(&self, other: &Self) -> Vec<Q> {
        let mut rs: Vec<Q> = self.breakpoints.iter().chain(&other.breakpoints).map(|p| p.0).collect();
        rs.sort();
        rs.dedup();
        rs
    }

    pub fn sum(&self, other: &Self, label: impl Into<String>) -> Self {
        let points = self
            .union_r(other)
            .into_iter()
            .map(|r| (r, self.eval(r) + other.eval(r)))
            .collect();
        Self::from_points(label, points).expect("sum of curves is a curve")
    }

    pub fn max(&self, other: &Self, label: impl Into<String>) -> Self {
        let rs = self.union_r(other);
        let mut points = Vec::with_capacity(2 * rs.len());
        for (i, &r) in rs.iter().enumerate() {
            if i > 0 {
                if let Some(x) = segment_crossing(self, other, rs[i - 1], r) {
                    points.push((x, self.eval(x)));
                }
            }
            points.push((r, self.eval(r).max(other.eval(r))));
        }
        Self::from_points(label, points).expect("maximum of curves is a curve")
    }

    /// `α d(r)`.
    pub fn scale_d(&self, alpha: Q, label: impl Into<String>) -> Self {
        let points = self.breakpoints.iter().map(|&(r, d)| (r, d * alpha)).collect();
        Self::from_points(label, points).expect("scaled curve is a curve")
    }

    /// `d(r · factor)`.
    pub fn compress_r(&self, factor: Q, label: impl Into<String>) -> Self {
        let points = self.breakpoints.iter().map(|&(r, d)| (r / factor, d)).collect();
        Self::from_points(label, points).expect("compressed curve is a curve")
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,d,r_float,d_float\n");
        for (r, d) in &self.breakpoints {
            s.push_str(&format!("{r},{d},{},{}\n", to_f64(*r), to_f64(*d)));
        }
        s
    }
}

pub fn to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Interior point of `(r0, r1)` where `a − b` changes sign.
fn segment_crossing(a: &DmgCurve, b: &DmgCurve, r0: Q, r1: Q) -> Option<Q> {
    let f0 = a.eval(r0) - b.eval(r0);
    let f1 = a.eval(r1) - b.eval(r1);
    if (f0.is_positive() && f1.is_negative()) || (f0.is_negative() && f1.is_positive()) {
        Some(r0 + (r1 - r0) * f0 / (f0 - f1))
    } else {
        None
    }
}

/// `c (1 − k r)^+ + (1 − r)`.
fn cooperative_bound(c: Q, k: Q, label: String) -> Result<DmgCurve> {
    if !k.is_positive() || c.is_negative() {
        return Err(Error::InvalidParameter(format!("bound needs k > 0, c ≥ 0 (k = {k}, c = {c})")));
    }
    let relay = DmgCurve::from_points("relay", vec![(Q::zero(), c), (k.recip(), Q::zero())])?;
    Ok(relay.sum(&siso(), label))
}

fn siso() -> DmgCurve {
    DmgCurve::from_points("siso", vec![(Q::zero(), Q::one()), (Q::one(), Q::zero())]).expect("valid curve")
}

fn check_n(n: i64, min: i64) -> Result<()> {
    if n < min {
        return Err(Error::InvalidParameter(format!("n = {n} below {min}")));
    }
    Ok(())
}

pub fn dmg_curve(family: &CurveFamily) -> Result<DmgCurve> {
    let label = family.label();
    match family {
        CurveFamily::Optimal { n } => {
            check_n(*n, 1)?;
            cooperative_bound(q(n - 1), q(2), label)
        }
        CurveFamily::TwoProduct { n } => {
            check_n(*n, 1)?;
            DmgCurve::from_points(label, vec![(Q::zero(), q(*n)), (Q::one(), Q::zero())])
        }
        CurveFamily::PepRandom { n, k } => {
            check_n(*n, 2)?;
            cooperative_bound(q(n - 1), *k, label)
        }
        CurveFamily::PepUniversal { n } => {
            check_n(*n, 2)?;
            cooperative_bound(q(n - 1), frac(4 * n - 1, n - 1), label)
        }
        CurveFamily::FullPerfect { n } => {
            check_n(*n, 2)?;
            cooperative_bound(q(n - 1), frac(n * n + n - 1, n - 1), label)
        }
        CurveFamily::Alamouti => cooperative_bound(Q::one(), q(5), label),
        CurveFamily::OrthoApprox { n } => {
            check_n(*n, 2)?;
            cooperative_bound(q(n - 1), q(7), label)
        }
        CurveFamily::AlphaScaled { n, alpha } => {
            if !alpha.is_positive() {
                return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
            }
            Ok(dmg_curve(&CurveFamily::Optimal { n: *n })?.scale_d(*alpha, label))
        }
        CurveFamily::MultiAntenna { n, m } => {
            check_n(*n, 1)?;
            if *m < 1 || m > n {
                return Err(Error::InvalidParameter(format!("m = {m} outside 1..={n}")));
            }
            let stacked: Vec<(Q, Q)> = (0..=*m).map(|k| (frac(k, 2), q(n * (m - k) * (m - k)))).collect();
            let direct: Vec<(Q, Q)> = (0..=*m).map(|k| (q(k), q((m - k) * (m - k)))).collect();
            let a = DmgCurve::from_points("stacked", stacked)?;
            let b = DmgCurve::from_points("direct", direct)?;
            Ok(a.max(&b, label))
        }
        CurveFamily::RayleighPointToPoint { n, n_r } => {
            check_n(*n, 1)?;
            check_n(*n_r, 1)?;
            let top = (*n).min(*n_r);
            DmgCurve::from_points(label, (0..=top).map(|k| (q(k), q((n - k) * (n_r - k)))).collect())
        }
        CurveFamily::RateDrop { base, m } => {
            if !m.is_positive() {
                return Err(Error::InvalidParameter(format!("m must be positive, got {m}")));
            }
            Ok(dmg_curve(base)?.compress_r(*m + Q::one(), label))
        }
    }
}

impl CurveFamily {
    pub fn label(&self) -> String {
        match self {
            Self::Optimal { n } => format!("optimal(n={n})"),
            Self::TwoProduct { n } => format!("two-product(n={n})"),
            Self::PepRandom { n, k } => format!("pep-random(n={n},k={k})"),
            Self::PepUniversal { n } => format!("pep-universal(n={n})"),
            Self::FullPerfect { n } => format!("full-perfect(n={n})"),
            Self::Alamouti => "alamouti".into(),
            Self::OrthoApprox { n } => format!("ortho-approx(n={n})"),
            Self::AlphaScaled { n, alpha } => format!("alpha-scaled(n={n},alpha={alpha})"),
            Self::MultiAntenna { n, m } => format!("multi-antenna(n={n},m={m})"),
            Self::RayleighPointToPoint { n, n_r } => format!("rayleigh({n}x{n_r})"),
            Self::RateDrop { base, m } => format!("rate-drop({},m={m})", base.label()),
        }
    }
}

/// Smallest `r > 0` where `a` and `b` meet after differing; `None` when
/// they never cross.
pub fn r_coop(a: &DmgCurve, b: &DmgCurve) -> Option<Q> {
    let rs = a.union_r(b);
    let diff = |r: Q| a.eval(r) - b.eval(r);
    let mut seen = !diff(rs[0]).is_zero();
    for w in rs.windows(2) {
        if !seen {
            let f1 = diff(w[1]);
            if f1.is_zero() {
                continue;
            }
            seen = true;
            continue;
        }
        if let Some(x) = segment_crossing(a, b, w[0], w[1]) {
            return Some(x);
        }
        if diff(w[1]).is_zero() {
            return Some(w[1]);
        }
    }
    None
}

/// `2^{R / r_coop}`.
pub fn snr_coop(rate: f64, r_coop: Q) -> Result<f64> {
    if !r_coop.is_positive() {
        return Err(Error::InvalidParameter("r_coop must be positive".into()));
    }
    Ok(2f64.powf(rate / to_f64(r_coop)))
}

/// Each relay adds a decoded copy over the second stage:
/// `(1 − r) + (n − 1) (1 − 2r)^+`, built as a sum.
pub fn optimal_via_ndsdaf(n: i64) -> Result<DmgCurve> {
    check_n(n, 1)?;
    let direct = dmg_curve(&CurveFamily::RayleighPointToPoint { n: 1, n_r: 1 })?;
    let relay = dmg_curve(&CurveFamily::RateDrop {
        base: Box::new(CurveFamily::RayleighPointToPoint { n: 1, n_r: 1 }),
        m: Q::one(),
    })?;
    Ok(direct.sum(&relay.scale_d(q(n - 1), "relays"), format!("ndsdaf-route(n={n})")))
}

/// Two-product channel carrying `n` symbols over `2n − 1` slots, or the
/// direct link alone.
pub fn optimal_via_ndraf(n: i64) -> Result<DmgCurve> {
    check_n(n, 1)?;
    let coop = dmg_curve(&CurveFamily::RateDrop {
        base: Box::new(CurveFamily::TwoProduct { n }),
        m: frac(n - 1, n),
    })?;
    let direct = dmg_curve(&CurveFamily::RayleighPointToPoint { n: 1, n_r: 1 })?;
    Ok(coop.max(&direct, format!("ndraf-route(n={n})")))
}

/// Outage exponent of the D-RAF frame. Blocks `i = 2..n` have mutual
/// information `≐ max{2(1 − φ_1), 1 − ψ_i}` with `ψ_i = φ_i + ξ_i`;
/// outage needs the sum below `2(n − 1) r`. The cost `φ_1 + Σ ψ_i` is
/// linear and the constraint convex and symmetric, so the minimizer has
/// equal `ψ_i` and each variable sits at its own lower bound.
pub fn optimal_via_draf(n: i64) -> Result<DmgCurve> {
    check_n(n, 1)?;
    // (weight, coefficient k) for the constraint k (1 − x) ≤ 2r.
    let vars = [(Q::one(), q(2)), (q(n - 1), Q::one())];
    let mut out = DmgCurve::from_points("empty", vec![(Q::zero(), Q::zero())])?;
    for (weight, k) in vars {
        if weight.is_zero() {
            continue;
        }
        // x ≥ 1 − 2r / k, clipped at zero at r = k / 2.
        let lower = DmgCurve::from_points("x", vec![(Q::zero(), Q::one()), (k / q(2), Q::zero())])?;
        out = out.sum(&lower.scale_d(weight, "x"), "sum");
    }
    out.label = format!("draf-route(n={n})");
    Ok(out)
}
