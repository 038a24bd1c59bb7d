//! Figures of merit built from projection t-values:
//! `D = ( sum_u (gamma_u * t~(S_u))^q )^(1/q)`, or the maximum for `q = inf`,
//! and for embedded nets the maximum of `D(S_m)` over `m`.

use std::fmt;
use std::str::FromStr;

use crate::composition::binomial;
use crate::embedded::embedded_t_all;
use crate::error::{contract, Error, Result};
use crate::gf2::VecAdds;
use crate::net::NetDef;
use crate::projections::{rho_all_projections, ProjectionKey};

#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    /// 1 for every projection up to the order cap.
    Uniform,
    /// `w[d - 1]` for projections of order `d`.
    OrderDependent(Vec<f64>),
    /// Product of `g[j]` over the coordinates.
    Product(Vec<f64>),
    /// `0.9999^(min(j1, j2) - 1)` for pairs (1-based), 0 otherwise.
    JoeKuo2d,
}

impl WeightSpec {
    fn validate(&self, s: usize, d_max: usize) -> Result<()> {
        let check = |w: &[f64]| {
            if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(contract("weights must be finite and non-negative"));
            }
            Ok(())
        };
        match self {
            WeightSpec::OrderDependent(w) => {
                if w.len() < d_max {
                    return Err(contract(format!("{} order weights given, d_max = {d_max}", w.len())));
                }
                check(w)
            }
            WeightSpec::Product(g) => {
                if g.len() != s {
                    return Err(contract(format!("{} product weights given, s = {s}", g.len())));
                }
                check(g)
            }
            WeightSpec::Uniform | WeightSpec::JoeKuo2d => Ok(()),
        }
    }

    /// Weight of `u`, without the order cap.
    pub fn gamma(&self, u: ProjectionKey) -> f64 {
        match self {
            WeightSpec::Uniform => 1.0,
            WeightSpec::OrderDependent(w) => w.get(u.order() - 1).copied().unwrap_or(0.0),
            WeightSpec::Product(g) => u.coords().into_iter().map(|j| g[j]).product(),
            WeightSpec::JoeKuo2d => match u.coords()[..] {
                [j1, _] => 0.9999f64.powi(j1 as i32),
                _ => 0.0,
            },
        }
    }
}

impl FromStr for WeightSpec {
    type Err = Error;

    /// `uniform`, `order:w1,...`, `product:g1,...` or `joe-kuo-2d`.
    fn from_str(s: &str) -> Result<Self> {
        let list = |body: &str| -> Result<Vec<f64>> {
            body.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| contract(format!("bad weight `{x}`")))
                })
                .collect()
        };
        match s.split_once(':') {
            None if s == "uniform" => Ok(WeightSpec::Uniform),
            None if s == "joe-kuo-2d" => Ok(WeightSpec::JoeKuo2d),
            Some(("order", body)) => Ok(WeightSpec::OrderDependent(list(body)?)),
            Some(("product", body)) => Ok(WeightSpec::Product(list(body)?)),
            _ => Err(contract(format!(
                "unknown weights `{s}` (expected uniform, order:..., product:... or joe-kuo-2d)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TildeT {
    Raw,
    /// `2^(t-k) * sum_{l < |u|} C(k - t, l)`, the star discrepancy bound.
    StarDisc,
    /// `t^p / (k - t + 1)` with `p > 0`.
    JoeKuo(f64),
}

impl TildeT {
    fn validate(self) -> Result<()> {
        match self {
            TildeT::JoeKuo(p) if !(p > 0.0 && p.is_finite()) => {
                Err(contract(format!("joe-kuo exponent must be positive, got {p}")))
            }
            _ => Ok(()),
        }
    }

    /// `k` is the digit count of the net being scored.
    pub fn apply(self, t: usize, k: usize, order: usize) -> f64 {
        match self {
            TildeT::Raw => t as f64,
            TildeT::StarDisc => {
                let n = (k - t) as u64;
                let sum: u128 = (0..order as u64).map(|l| binomial(n, l)).sum();
                sum as f64 * 2f64.powi(t as i32 - k as i32)
            }
            TildeT::JoeKuo(p) => (t as f64).powf(p) / (k - t + 1) as f64,
        }
    }
}

impl FromStr for TildeT {
    type Err = Error;

    /// `t`, `star-disc` or `joe-kuo:P`.
    fn from_str(s: &str) -> Result<Self> {
        let tilde = match s.split_once(':') {
            None if s == "t" || s == "raw" => TildeT::Raw,
            None if s == "star-disc" => TildeT::StarDisc,
            Some(("joe-kuo", p)) => {
                TildeT::JoeKuo(p.parse().map_err(|_| contract(format!("bad joe-kuo exponent `{p}`")))?)
            }
            _ => {
                return Err(contract(format!(
                    "unknown t-transform `{s}` (expected t, star-disc or joe-kuo:P)"
                )))
            }
        };
        tilde.validate()?;
        Ok(tilde)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Norm {
    Finite(f64),
    Infinity,
}

impl Norm {
    fn validate(self) -> Result<()> {
        match self {
            Norm::Finite(q) if !(q >= 1.0 && q.is_finite()) => {
                Err(contract(format!("norm exponent must be >= 1, got {q}")))
            }
            _ => Ok(()),
        }
    }

    /// Norm of non-negative terms. Finite exponents are evaluated relative to
    /// the largest term so that large `q` does not overflow.
    pub fn aggregate(self, terms: &[f64]) -> f64 {
        let max = terms.iter().copied().fold(0.0, f64::max);
        match self {
            Norm::Infinity => max,
            Norm::Finite(_) if max == 0.0 => 0.0,
            Norm::Finite(q) => max * terms.iter().map(|x| (x / max).powf(q)).sum::<f64>().powf(1.0 / q),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::Finite(q) => write!(f, "{q}"),
            Norm::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = match s {
            "inf" | "infinity" => Norm::Infinity,
            _ => Norm::Finite(
                s.parse()
                    .map_err(|_| contract(format!("bad norm `{s}` (expected inf or a number >= 1)")))?,
            ),
        };
        norm.validate()?;
        Ok(norm)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeritConfig {
    pub weights: WeightSpec,
    pub tilde: TildeT,
    pub norm: Norm,
    pub d_max: usize,
    /// Score the embedded nets `S_m` for `m` from this value to `k`.
    pub embedded_from: Option<usize>,
}

impl MeritConfig {
    pub fn validate(&self, net: &NetDef) -> Result<()> {
        if self.d_max > net.s() {
            return Err(contract(format!("d_max = {} exceeds s = {}", self.d_max, net.s())));
        }
        self.weights.validate(net.s(), self.d_max)?;
        self.tilde.validate()?;
        self.norm.validate()
    }

    fn gamma(&self, u: ProjectionKey) -> f64 {
        if u.order() > self.d_max {
            0.0
        } else {
            self.weights.gamma(u)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeritRow {
    pub projection: ProjectionKey,
    pub t: usize,
    /// `None` when the weight is zero: the transform is not evaluated.
    pub tilde: Option<f64>,
    pub gamma: f64,
    pub term: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeritReport {
    pub value: f64,
    /// In lexicographic order of projections.
    pub rows: Vec<MeritRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedMeritReport {
    pub value: f64,
    /// `(m, report for S_m)` for increasing `m`.
    pub levels: Vec<(usize, MeritReport)>,
}

/// Scores a list of `(u, t)` for a net with `k` digits.
pub fn score(t_values: impl IntoIterator<Item = (ProjectionKey, usize)>, k: usize, cfg: &MeritConfig) -> MeritReport {
    let rows: Vec<MeritRow> = t_values
        .into_iter()
        .map(|(u, t)| {
            let gamma = cfg.gamma(u);
            let tilde = (gamma != 0.0).then(|| cfg.tilde.apply(t, k, u.order()));
            MeritRow {
                projection: u,
                t,
                tilde,
                gamma,
                term: tilde.map_or(0.0, |x| gamma * x),
            }
        })
        .collect();
    let terms: Vec<f64> = rows.iter().map(|r| r.term).collect();
    MeritReport {
        value: cfg.norm.aggregate(&terms),
        rows,
    }
}

pub fn merit(net: &NetDef, cfg: &MeritConfig) -> Result<MeritReport> {
    cfg.validate(net)?;
    let table = rho_all_projections(net, cfg.d_max, &mut VecAdds::new())?;
    Ok(score(table.t_values(), net.k(), cfg))
}

pub fn merit_embedded(net: &NetDef, cfg: &MeritConfig) -> Result<EmbeddedMeritReport> {
    cfg.validate(net)?;
    let m0 = cfg
        .embedded_from
        .ok_or_else(|| contract("embedded merit needs a starting level m_0"))?;
    let table = embedded_t_all(net, m0, cfg.d_max, &mut VecAdds::new())?;
    let levels: Vec<(usize, MeritReport)> = table
        .levels()
        .map(|m| (m, score(table.t_values_at(m), m, cfg)))
        .collect();
    let value = levels.iter().map(|(_, r)| r.value).fold(0.0, f64::max);
    Ok(EmbeddedMeritReport { value, levels })
}
