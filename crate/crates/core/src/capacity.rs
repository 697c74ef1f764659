//! Universal bond dimensions a model needs, exactly or under an assumed
//! growth `N(m)` of the number of Schmidt components with cluster size.

use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formats::ModelKind;

/// Assumed maximum number of Schmidt components `N(m)` for clusters of
/// `m` modes.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum AssumptionN {
    /// `base^m`.
    Exponential {
        base: f64,
    },
    /// `c · m^α`.
    Power {
        c: f64,
        alpha: f64,
    },
    /// `1 + c · log₂m`.
    Logarithmic {
        c: f64,
    },
    Constant {
        c: f64,
    },
    /// Explicit `(m, N(m))` pairs.
    Table {
        entries: Vec<(usize, f64)>,
    },
}

impl fmt::Display for AssumptionN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssumptionN::Exponential { base } => write!(f, "exp:{base}"),
            AssumptionN::Power { c, alpha } => write!(f, "pow:{c}:{alpha}"),
            AssumptionN::Logarithmic { c } => write!(f, "log:{c}"),
            AssumptionN::Constant { c } => write!(f, "const:{c}"),
            AssumptionN::Table { entries } => write!(f, "table({} entries)", entries.len()),
        }
    }
}

impl AssumptionN {
    pub fn eval(&self, m: usize) -> Result<f64> {
        let x = m as f64;
        let v = match self {
            AssumptionN::Exponential { base } => base.powf(x),
            AssumptionN::Power { c, alpha } => c * x.powf(*alpha),
            AssumptionN::Logarithmic { c } => 1.0 + c * x.log2(),
            AssumptionN::Constant { c } => *c,
            AssumptionN::Table { entries } => entries
                .iter()
                .find(|(k, _)| *k == m)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::Assumption(format!("table has no entry for m = {m}")))?,
        };
        if !v.is_finite() {
            return Err(Error::Assumption(format!("N({m}) is not finite")));
        }
        Ok(v)
    }

    /// Checks `N(m) ≥ 1` and monotone growth on `m = 1..=L/2`.
    pub fn validate(&self, order: usize) -> Result<Vec<f64>> {
        let half = order / 2;
        if half == 0 {
            return Err(Error::out_of_range("order", order, "[2, inf)"));
        }
        let values = (1..=half)
            .map(|m| self.eval(m))
            .collect::<Result<Vec<_>>>()?;
        for (i, &v) in values.iter().enumerate() {
            if v < 1.0 {
                return Err(Error::Assumption(format!("N({}) = {v} is below 1", i + 1)));
            }
            if i > 0 && v < values[i - 1] * (1.0 - 1e-12) {
                return Err(Error::Assumption(format!(
                    "N is not monotone: N({}) = {} > N({}) = {v}",
                    i,
                    values[i - 1],
                    i + 1
                )));
            }
        }
        Ok(values)
    }
}

/// Parses `exp:D`, `pow:c:alpha`, `log:c`, `const:c` or `table:path`.
pub fn parse_assumption(spec: &str) -> Result<AssumptionN> {
    let parts: Vec<&str> = spec.trim().splitn(3, ':').collect();
    let num = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::Assumption(format!("'{s}' is not a finite number in '{spec}'")))
    };
    match parts.as_slice() {
        ["exp", d] => Ok(AssumptionN::Exponential { base: num(d)? }),
        ["pow", c, a] => Ok(AssumptionN::Power {
            c: num(c)?,
            alpha: num(a)?,
        }),
        ["log", c] => Ok(AssumptionN::Logarithmic { c: num(c)? }),
        ["const", c] => Ok(AssumptionN::Constant { c: num(c)? }),
        ["table", path] => read_table(Path::new(path)),
        ["table", a, b] => read_table(Path::new(&format!("{a}:{b}"))),
        _ => Err(Error::Assumption(format!(
            "cannot parse '{spec}' (expected exp:D, pow:c:alpha, log:c, const:c or table:path)"
        ))),
    }
}

/// Table file: one `m N` pair per line (whitespace or comma separated);
/// `#` starts a comment.
pub fn read_table(path: &Path) -> Result<AssumptionN> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let bad = || Error::Format {
            path: path.to_path_buf(),
            reason: format!("line {}: expected 'm N', found '{line}'", lineno + 1),
        };
        if fields.len() != 2 {
            return Err(bad());
        }
        let m = fields[0].parse::<usize>().map_err(|_| bad())?;
        let n = fields[1].parse::<f64>().map_err(|_| bad())?;
        entries.push((m, n));
    }
    entries.sort_by_key(|e| e.0);
    if entries.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::Format {
            path: path.to_path_buf(),
            reason: "duplicate m in table".into(),
        });
    }
    Ok(AssumptionN::Table { entries })
}

/// `base^(num/den)` with the exponent in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExactPower {
    pub base: u64,
    pub num: u64,
    pub den: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl ExactPower {
    pub fn new(base: u64, num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::out_of_range("exponent denominator", 0, "[1, inf)"));
        }
        let g = gcd(num, den).max(1);
        Ok(Self {
            base,
            num: num / g,
            den: den / g,
        })
    }

    /// `self^k`, still exact.
    pub fn pow(self, k: u64) -> Self {
        Self::new(self.base, self.num * k, self.den).expect("non-zero denominator")
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn value(&self) -> f64 {
        (self.base as f64).powf(self.num as f64 / self.den as f64)
    }

    pub fn log2(&self) -> f64 {
        (self.base as f64).log2() * self.num as f64 / self.den as f64
    }

    /// Smallest integer `k` with `k ≥ base^(num/den)`, when it fits.
    pub fn ceil(&self) -> Option<u128> {
        let target = (self.base as u128).checked_pow(u32::try_from(self.num).ok()?)?;
        if self.den == 1 {
            return Some(target);
        }
        // start below the float estimate and step up exactly
        let mut k = (self.value().floor() as u128).saturating_sub(1);
        loop {
            match k.checked_pow(u32::try_from(self.den).ok()?) {
                Some(p) if p >= target => return Some(k),
                Some(_) => k += 1,
                None => return Some(k),
            }
        }
    }
}

impl fmt::Display for ExactPower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.is_integer(), self.ceil()) {
            (true, Some(v)) => write!(f, "{v}"),
            (true, None) => write!(f, "{}^{}", self.base, self.num),
            _ => write!(f, "{}^({}/{})", self.base, self.num, self.den),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RequiredDim {
    pub model: ModelKind,
    pub order: usize,
    pub dim: usize,
    pub exact: ExactPower,
    pub value: f64,
    /// `⌈value⌉`, or `None` when it overflows.
    pub ceil: Option<u128>,
}

fn log2_exact(order: usize) -> Option<u64> {
    order
        .is_power_of_two()
        .then(|| order.trailing_zeros() as u64)
}

/// Bond dimension that lets a model represent every order-`L` tensor with
/// physical dim `D`: `D^{L/2}` for TT and HT, `D^{L/(2(log₂L − 1))}` for
/// MERA.
pub fn required_dim_exact(model: ModelKind, order: usize, dim: usize) -> Result<RequiredDim> {
    if dim < 2 {
        return Err(Error::out_of_range("physical dim", dim, "[2, inf)"));
    }
    let exact = match model {
        ModelKind::Tt => {
            if order < 2 {
                return Err(Error::out_of_range("order", order, "[2, inf)"));
            }
            ExactPower::new(dim as u64, (order / 2) as u64, 1)?
        }
        ModelKind::Ht => {
            if order < 2 || log2_exact(order).is_none() {
                return Err(Error::Structure(format!(
                    "HT needs a power-of-two order >= 2, got {order}"
                )));
            }
            ExactPower::new(dim as u64, order as u64, 2)?
        }
        ModelKind::Mera => {
            let h = log2_exact(order).filter(|_| order >= 4).ok_or_else(|| {
                Error::Structure(format!("MERA needs a power-of-two order >= 4, got {order}"))
            })?;
            ExactPower::new(dim as u64, order as u64, 2 * (h - 1))?
        }
        ModelKind::Tucker => {
            return Err(Error::Structure(
                "no required-dimension formula for Tucker".into(),
            ));
        }
    };
    Ok(RequiredDim {
        model,
        order,
        dim,
        value: exact.value(),
        ceil: exact.ceil(),
        exact,
    })
}

/// Checks `R_TT = R_MERA^{log₂L − 1}` by exponent arithmetic.
pub fn tt_mera_relation_holds(order: usize, dim: usize) -> Result<bool> {
    let tt = required_dim_exact(ModelKind::Tt, order, dim)?.exact;
    let mera = required_dim_exact(ModelKind::Mera, order, dim)?.exact;
    let h = log2_exact(order).expect("validated by required_dim_exact");
    Ok(mera.pow(h - 1) == tt)
}

/// `χ_TT = χ_HT = N(L/2)`.
pub fn chi_tt_ht(n: &AssumptionN, order: usize) -> Result<f64> {
    n.validate(order)?;
    n.eval(order / 2)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiMera {
    /// `max_{1 < m ≤ L/2} N(m)^{1/log₂m}`.
    pub value: f64,
    /// Every `m` attaining the maximum.
    pub argmax: Vec<usize>,
    /// The maximand at `m = L/2`.
    pub at_half: f64,
    /// The maximum is reached only below `m = L/2`.
    pub interior_exceeds_half: bool,
    /// Maximum over powers of two only.
    pub value_powers_of_two: f64,
    pub argmax_powers_of_two: Vec<usize>,
}

pub fn chi_mera(n: &AssumptionN, order: usize) -> Result<ChiMera> {
    n.validate(order)?;
    let half = order / 2;
    if half < 2 {
        return Err(Error::out_of_range("order", order, "[4, inf)"));
    }
    let terms: Vec<(usize, f64)> = (2..=half)
        .map(|m| Ok((m, n.eval(m)?.powf(1.0 / (m as f64).log2()))))
        .collect::<Result<_>>()?;
    let (value, argmax) = max_with_ties(&terms);
    let pow2: Vec<(usize, f64)> = terms
        .iter()
        .copied()
        .filter(|(m, _)| m.is_power_of_two())
        .collect();
    let (value_powers_of_two, argmax_powers_of_two) = max_with_ties(&pow2);
    let at_half = terms.last().expect("half >= 2").1;
    Ok(ChiMera {
        value,
        interior_exceeds_half: !argmax.contains(&half),
        argmax,
        at_half,
        value_powers_of_two,
        argmax_powers_of_two,
    })
}

fn max_with_ties(terms: &[(usize, f64)]) -> (f64, Vec<usize>) {
    let max = terms.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    let ties = terms
        .iter()
        .filter(|t| t.1 >= max * (1.0 - 1e-12))
        .map(|t| t.0)
        .collect();
    (max, ties)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityReport {
    pub order: usize,
    pub assumption: AssumptionN,
    /// `N(m)` for `m = 1..=L/2`.
    pub n_values: Vec<f64>,
    pub chi_tt_ht: f64,
    pub chi_mera: ChiMera,
    /// `log₂χ_TT,HT − log₂χ_MERA`.
    pub margin_log2: f64,
}

/// Both required dimensions and the gap between them.
pub fn compare_models(n: &AssumptionN, order: usize) -> Result<CapacityReport> {
    if order < 4 {
        return Err(Error::out_of_range("order", order, "[4, inf)"));
    }
    let n_values = n.validate(order)?;
    let chi_tt_ht = chi_tt_ht(n, order)?;
    let chi_mera = chi_mera(n, order)?;
    Ok(CapacityReport {
        order,
        assumption: n.clone(),
        n_values,
        margin_log2: chi_tt_ht.log2() - chi_mera.value.log2(),
        chi_tt_ht,
        chi_mera,
    })
}
