//! Separability scaling: how the cheapest cut grows with cluster size.

use std::fmt;

use serde::{Serialize, Serializer};

/// Growth class of `n(m)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SsbClass {
    Constant,
    Logarithmic,
    Power(f64),
    Exponential(f64),
    Unknown,
}

impl SsbClass {
    pub fn name(&self) -> &'static str {
        match self {
            SsbClass::Constant => "constant",
            SsbClass::Logarithmic => "logarithmic",
            SsbClass::Power(_) => "power",
            SsbClass::Exponential(_) => "exponential",
            SsbClass::Unknown => "unknown",
        }
    }
}

impl fmt::Display for SsbClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SsbClass::Power(a) => write!(f, "power({a:.3})"),
            SsbClass::Exponential(b) => write!(f, "exponential({b:.3})"),
            other => f.write_str(other.name()),
        }
    }
}

impl Serialize for SsbClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// The accepted fit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SsbFit {
    pub family: &'static str,
    /// Family parameters: `[c]`, `[a, c]` for `a + c·log₂m`, `[c, α]` for
    /// `c·m^α`, `[c, β]` for `c·2^{βm}`.
    pub params: Vec<f64>,
    /// RMS residual over the mean of the fitted values.
    pub relative_rms: f64,
}

/// Largest relative RMS residual a family may leave.
pub const FIT_THRESHOLD: f64 = 0.10;

/// Classifies `(m, n(m))` samples. Only `m ≥ 2` enters the fit, after
/// taking the lower envelope (`n(m)` replaced by `min_{m' ≥ m} n(m')`).
/// Families are tried from the most parsimonious up: constant,
/// logarithmic `a + c·log₂m`, power `c·m^α`, exponential `c·2^{βm}`; the
/// first one within [`FIT_THRESHOLD`] wins.
pub fn classify(samples: &[(usize, usize)]) -> (SsbClass, Option<SsbFit>) {
    let mut pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(m, _)| *m >= 2)
        .map(|&(m, n)| (m as f64, n as f64))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|b, a| a.0 == b.0);
    if pts.len() < 3 {
        return (SsbClass::Unknown, None);
    }
    for i in (0..pts.len() - 1).rev() {
        pts[i].1 = pts[i].1.min(pts[i + 1].1);
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let rel = |pred: &dyn Fn(f64) -> f64| -> f64 {
        let ss: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(&x, &y)| (y - pred(x)).powi(2))
            .sum();
        let rms = (ss / xs.len() as f64).sqrt();
        if mean > 0.0 {
            rms / mean
        } else {
            rms
        }
    };

    let c = mean;
    let r = rel(&|_| c);
    if r <= FIT_THRESHOLD {
        return (SsbClass::Constant, Some(fit("constant", vec![c], r)));
    }

    let log_x: Vec<f64> = xs.iter().map(|x| x.log2()).collect();
    let (a, slope) = linear_fit(&log_x, &ys);
    if slope > 0.0 {
        let r = rel(&|x| a + slope * x.log2());
        if r <= FIT_THRESHOLD {
            return (
                SsbClass::Logarithmic,
                Some(fit("logarithmic", vec![a, slope], r)),
            );
        }
    }

    if ys.iter().all(|&y| y > 0.0) {
        let ln_y: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
        let ln_x: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let (ln_c, alpha) = linear_fit(&ln_x, &ln_y);
        let c = ln_c.exp();
        let r = rel(&|x| c * x.powf(alpha));
        if alpha > 0.0 && r <= FIT_THRESHOLD {
            return (
                SsbClass::Power(alpha),
                Some(fit("power", vec![c, alpha], r)),
            );
        }

        let log2_y: Vec<f64> = ys.iter().map(|y| y.log2()).collect();
        let (log2_c, beta) = linear_fit(&xs, &log2_y);
        let c = log2_c.exp2();
        let r = rel(&|x| c * (beta * x).exp2());
        if beta > 0.0 && r <= FIT_THRESHOLD {
            return (
                SsbClass::Exponential(beta),
                Some(fit("exponential", vec![c, beta], r)),
            );
        }
    }
    (SsbClass::Unknown, None)
}

fn fit(family: &'static str, params: Vec<f64>, relative_rms: f64) -> SsbFit {
    SsbFit {
        family,
        params,
        relative_rms,
    }
}

/// Least squares `y ≈ a + b·x`; returns `(a, b)`.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - b * mx, b)
}
