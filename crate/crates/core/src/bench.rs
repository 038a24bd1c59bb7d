//! Instrumented benchmark harness: closed-form operation bounds, timed runs
//! on random regular nets, CSV records.

use std::io::Write;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::composition::binomial;
use crate::error::{contract, Result};
use crate::gf2::VecAdds;
use crate::net::NetDef;
use crate::netio::sample_regular_net_with;
use crate::projections::{rho_all_projections_with, ProjectionMethod};
use crate::tvalue::{t_value_counted, Method};

fn c(n: usize, r: usize) -> u128 {
    binomial(n as u64, r as u64)
}

/// Worst-case vector additions to compute one t-value, evaluated at the
/// instance's true `t`. `None` for the oracle, which does no row arithmetic.
pub fn bound_single(method: Method, s: usize, k: usize, t: usize) -> Option<u128> {
    let top = k.checked_sub(t)?;
    let mgl_level = |q: usize| 4 * (q * q) as u128 + (c(q + s - 1, s - 1) - 1).saturating_mul(6 * q as u128);
    let b = match method {
        Method::Schmid => (1..=s)
            .flat_map(|d| (d..=top).map(move |q| (d, q)))
            .map(|(d, q)| {
                c(s, d)
                    .saturating_mul(c(q - 1, d - 1))
                    .saturating_mul(1u128.checked_shl((q - d) as u32).unwrap_or(u128::MAX))
            })
            .fold(0u128, u128::saturating_add),
        Method::PirsicSchmid => (1..=top)
            .map(|q| c(q + s - 1, s - 1).saturating_mul(c(q, 2)))
            .fold(0, u128::saturating_add),
        Method::MglDecreasing => (top..=k).map(mgl_level).fold(0, u128::saturating_add),
        Method::MglIncreasing => (1..=top).map(mgl_level).fold(0, u128::saturating_add),
        Method::Oracle => return None,
    };
    Some(b)
}

/// Worst-case vector additions to compute the t-values of all projections
/// of order at most `d_max`.
pub fn bound_projections(method: ProjectionMethod, s: usize, k: usize, d_max: usize) -> u128 {
    let sum = |f: &dyn Fn(usize) -> u128| (1..=d_max).map(f).fold(0u128, u128::saturating_add);
    match method {
        ProjectionMethod::Schmid => sum(&|d| {
            (d..=k)
                .map(|q| {
                    c(s, d)
                        .saturating_mul(c(q - 1, d - 1))
                        .saturating_mul(1u128.checked_shl((q - d) as u32).unwrap_or(u128::MAX))
                })
                .fold(0, u128::saturating_add)
        }),
        ProjectionMethod::PirsicSchmid => {
            ((k * k) as u128).saturating_mul(sum(&|d| c(s, d).saturating_mul(c(k + d, d))))
        }
        ProjectionMethod::Mgl => (k as u128).saturating_mul(sum(&|d| {
            let inner = (4 * k * (k + 1 - d.min(k + 1))) as u128 + 6 * c(k, d);
            c(s, d).saturating_mul(inner)
        })),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// t-value of the whole net.
    Single,
    /// t-values of all projections of order at most `d_max`.
    Projections { d_max: usize },
}

#[derive(Debug, Clone)]
pub struct SuiteSpec {
    pub suite: Suite,
    pub s_values: Vec<usize>,
    pub k_values: Vec<usize>,
    /// Method names as accepted by [`Method`] or [`ProjectionMethod`].
    pub methods: Vec<String>,
    pub samples: usize,
    pub seed: u64,
    /// Cells whose closed-form bound exceeds this many vector additions are skipped.
    pub budget: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub method: String,
    pub s: usize,
    pub k: usize,
    #[serde(rename = "dmax")]
    pub d_max: usize,
    pub samples: usize,
    pub mean_ms: f64,
    pub mean_vecadds: f64,
    /// Mean of the per-instance bounds (they depend on `t` for single t-values).
    pub bound: f64,
    /// Every instance stayed within its own bound.
    pub ok: bool,
    /// Per-instance t-values (single suite) or maximal projection t-values.
    #[serde(skip)]
    pub t_values: Vec<usize>,
    #[serde(skip)]
    pub vecadds: Vec<u64>,
}

enum Runner {
    Single(Method),
    Projections(ProjectionMethod, usize),
}

impl Runner {
    fn name(&self) -> &'static str {
        match self {
            Runner::Single(m) => m.name(),
            Runner::Projections(m, _) => m.name(),
        }
    }

    /// Returns (t, vector additions, bound).
    fn run(&self, net: &NetDef) -> Result<(usize, u64, u128)> {
        let mut counter = VecAdds::new();
        match *self {
            Runner::Single(m) => {
                let t = t_value_counted(net, m, &mut counter)?;
                let bound = bound_single(m, net.s(), net.k(), t).unwrap_or(u128::MAX);
                Ok((t, counter.get(), bound))
            }
            Runner::Projections(m, d_max) => {
                let table = rho_all_projections_with(net, d_max, m, &mut counter)?;
                let t = table.max_t().unwrap_or(0);
                Ok((t, counter.get(), bound_projections(m, net.s(), net.k(), d_max)))
            }
        }
    }

    fn planned_bound(&self, s: usize, k: usize, pilot_t: usize) -> u128 {
        match *self {
            Runner::Single(m) => bound_single(m, s, k, pilot_t).unwrap_or(0),
            Runner::Projections(m, d_max) => bound_projections(m, s, k, d_max),
        }
    }
}

fn runners(spec: &SuiteSpec) -> Result<Vec<Runner>> {
    spec.methods
        .iter()
        .map(|name| match spec.suite {
            Suite::Single => {
                let m: Method = name.parse()?;
                if m == Method::Oracle {
                    return Err(contract("the oracle does no row arithmetic and cannot be benchmarked"));
                }
                Ok(Runner::Single(m))
            }
            Suite::Projections { d_max } => Ok(Runner::Projections(name.parse()?, d_max)),
        })
        .collect()
}

/// Seed of the net sampler for one `(s, k)` cell; independent of which other
/// cells are run.
pub fn cell_seed(seed: u64, s: usize, k: usize) -> u64 {
    seed ^ ((s as u64) << 40) ^ ((k as u64) << 20)
}

/// Runs every `(s, k)` cell, calling `emit` for each record as soon as it is ready.
pub fn run_suite_with(spec: &SuiteSpec, mut emit: impl FnMut(&BenchRecord) -> Result<()>) -> Result<Vec<BenchRecord>> {
    if spec.samples == 0 {
        return Err(contract("samples must be positive"));
    }
    let runners = runners(spec)?;
    let mut out = Vec::new();
    for &s in &spec.s_values {
        for &k in &spec.k_values {
            if let Suite::Projections { d_max } = spec.suite {
                if d_max > s {
                    log::warn!("skipping s={s} k={k}: d_max={d_max} exceeds s");
                    continue;
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(spec.seed, s, k));
            let nets: Vec<NetDef> = (0..spec.samples)
                .map(|_| sample_regular_net_with(s, k, &mut rng))
                .collect::<Result<_>>()?;
            let pilot_t = match spec.suite {
                Suite::Single => t_value_counted(&nets[0], Method::MglIncreasing, &mut VecAdds::new())?,
                Suite::Projections { .. } => 0,
            };
            for runner in &runners {
                let planned = runner.planned_bound(s, k, pilot_t);
                if planned > spec.budget {
                    log::warn!(
                        "skipping {} at s={s} k={k}: bound {planned} exceeds budget {}",
                        runner.name(),
                        spec.budget
                    );
                    continue;
                }
                let mut total_ms = 0.0;
                let mut total_adds = 0u128;
                let mut total_bound = 0f64;
                let mut ok = true;
                let mut t_values = Vec::with_capacity(nets.len());
                let mut vecadds = Vec::with_capacity(nets.len());
                for net in &nets {
                    let start = Instant::now();
                    let (t, adds, bound) = runner.run(net)?;
                    total_ms += start.elapsed().as_secs_f64() * 1e3;
                    total_adds += adds as u128;
                    total_bound += bound as f64;
                    if adds as u128 > bound {
                        log::warn!(
                            "{} at s={s} k={k} t={t}: {adds} vector additions exceed bound {bound}",
                            runner.name()
                        );
                        ok = false;
                    }
                    t_values.push(t);
                    vecadds.push(adds);
                }
                let n = nets.len() as f64;
                let record = BenchRecord {
                    method: runner.name().to_string(),
                    s,
                    k,
                    d_max: match spec.suite {
                        Suite::Single => s,
                        Suite::Projections { d_max } => d_max,
                    },
                    samples: nets.len(),
                    mean_ms: total_ms / n,
                    mean_vecadds: total_adds as f64 / n,
                    bound: total_bound / n,
                    ok,
                    t_values,
                    vecadds,
                };
                emit(&record)?;
                out.push(record);
            }
        }
    }
    Ok(out)
}

pub fn run_suite(spec: &SuiteSpec) -> Result<Vec<BenchRecord>> {
    run_suite_with(spec, |_| Ok(()))
}

pub const CSV_HEADER: &str = "method,s,k,dmax,samples,mean_ms,mean_vecadds,bound,ok";

/// CSV writer that emits the header on creation.
pub struct CsvSink<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> CsvSink<W> {
    pub fn new(w: W) -> Result<Self> {
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        inner
            .write_record(CSV_HEADER.split(','))
            .map_err(|e| contract(format!("csv: {e}")))?;
        Ok(Self { inner })
    }

    pub fn write(&mut self, record: &BenchRecord) -> Result<()> {
        self.inner
            .serialize(record)
            .map_err(|e| contract(format!("csv: {e}")))?;
        self.inner.flush().map_err(|e| contract(format!("csv: {e}")))
    }
}

pub fn write_csv<W: Write>(records: &[BenchRecord], w: W) -> Result<()> {
    let mut sink = CsvSink::new(w)?;
    records.iter().try_for_each(|r| sink.write(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bound_examples() {
        assert_eq!(bound_single(Method::MglIncreasing, 1, 3, 0), Some(56));
        for s in 1..6 {
            assert_eq!(bound_single(Method::PirsicSchmid, s, 7, 7), Some(0));
        }
        assert_eq!(bound_single(Method::Oracle, 2, 4, 0), None);
        // S at b = 2, s = 2, k - t = 2: d=1: 2*(1 + 2) ; d=2: 1*1*1
        assert_eq!(bound_single(Method::Schmid, 2, 4, 2), Some(7));
    }

    #[test]
    fn decreasing_bound_is_below_its_closed_majorant() {
        // needs q <= C(q+s-1, s-1), which fails for s = 1
        for s in 2..=8 {
            for k in 1..=24 {
                for t in 0..k {
                    let b = bound_single(Method::MglDecreasing, s, k, t).unwrap();
                    let q = k - t;
                    let majorant = 10 * k as u128 * c(k + s, s) - 10 * (q as u128 - 1) * c(q - 1 + s, s);
                    assert!(b <= majorant, "s={s} k={k} t={t}");
                }
            }
        }
    }

    #[test]
    fn projection_bound_examples() {
        for s in 1..8 {
            for k in 1..16 {
                assert_eq!(
                    bound_projections(ProjectionMethod::PirsicSchmid, s, k, 1),
                    (k * k * s * (k + 1)) as u128
                );
                for m in ProjectionMethod::ALL {
                    assert_eq!(bound_projections(m, s, k, 0), 0);
                }
                let full = bound_projections(ProjectionMethod::Mgl, s, k, s);
                let closed = k as u128 * (4 * (k * k) as u128 * (1u128 << s) + 6 * c(s + k, s));
                // the row sums 4k(k-d+1) over d <= s; Vandermonde turns it into the closed form for d_max = s
                assert!(full <= closed, "s={s} k={k}");
            }
        }
    }

    #[test]
    fn csv_header_and_determinism() {
        let spec = SuiteSpec {
            suite: Suite::Single,
            s_values: vec![3],
            k_values: vec![6],
            methods: vec!["mgl-inc".into(), "ps".into(), "schmid".into(), "mgl-dec".into()],
            samples: 4,
            seed: 9,
            budget: u128::MAX,
        };
        let a = run_suite(&spec).unwrap();
        let b = run_suite(&spec).unwrap();
        assert_eq!(a.len(), 4);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.vecadds, y.vecadds);
            assert_eq!(x.t_values, a[0].t_values);
        }
        let mut buf = Vec::new();
        write_csv(&a, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        assert_eq!(text.lines().count(), 5);
    }
}
