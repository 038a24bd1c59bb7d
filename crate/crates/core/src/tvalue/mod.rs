//! Exact t-value of a base-2 digital net.
//!
//! With `rho` the largest `q` such that every composition matrix of total `q`
//! has full rank, the t-value is `k - rho`. Four independent routes compute
//! `rho`: the incremental RAREF sweep (increasing or decreasing in `q`), the
//! linear-combination search, fresh elimination of every composition matrix,
//! and, for tiny nets, direct counting of points in elementary intervals.

mod mgl;
mod oracle;
mod ps;
mod schmid;

use std::fmt;
use std::str::FromStr;

use crate::error::{contract, Result};
use crate::gf2::{BitMatrix, VecAdds};
use crate::net::{check_generators, NetDef};

pub use mgl::{level_check, rho_mgl, rho_tilde, LevelOutcome};
pub use oracle::{rho_oracle, ORACLE_MAX_K};
pub use ps::rho_ps;
pub(crate) use schmid::profile_free_of_dependencies as schmid_profile_free;
pub use schmid::rho_schmid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    MglIncreasing,
    MglDecreasing,
    Schmid,
    PirsicSchmid,
    Oracle,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::MglIncreasing,
        Method::MglDecreasing,
        Method::Schmid,
        Method::PirsicSchmid,
        Method::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::MglIncreasing => "mgl-inc",
            Method::MglDecreasing => "mgl-dec",
            Method::Schmid => "schmid",
            Method::PirsicSchmid => "ps",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mgl" | "mgl-inc" => Ok(Method::MglIncreasing),
            "mgl-dec" => Ok(Method::MglDecreasing),
            "schmid" | "s" => Ok(Method::Schmid),
            "ps" | "pirsic-schmid" => Ok(Method::PirsicSchmid),
            "oracle" => Ok(Method::Oracle),
            _ => Err(contract(format!(
                "unknown method `{s}` (expected mgl-inc, mgl-dec, schmid, ps or oracle)"
            ))),
        }
    }
}

/// Search direction of the incremental method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `q = 1, 2, ...` until the first deficient composition matrix.
    Increasing,
    /// `q = start, start - 1, ...` until a level where every matrix has full
    /// rank. Returns `min(rho, start)`.
    Decreasing { start: usize },
}

/// `rho` of the net generated by `matrices`.
pub fn rho(matrices: &[BitMatrix], method: Method) -> Result<usize> {
    rho_counted(matrices, method, &mut VecAdds::new())
}

/// Like [`rho`], adding the vector additions performed to `counter`. The
/// point-counting oracle adds nothing.
pub fn rho_counted(matrices: &[BitMatrix], method: Method, counter: &mut VecAdds) -> Result<usize> {
    let k = check_generators(matrices)?;
    match method {
        Method::MglIncreasing => rho_mgl(matrices, Direction::Increasing, counter),
        Method::MglDecreasing => rho_mgl(matrices, Direction::Decreasing { start: k }, counter),
        Method::Schmid => rho_schmid(matrices, counter),
        Method::PirsicSchmid => rho_ps(matrices, counter),
        Method::Oracle => rho_oracle(matrices),
    }
}

pub fn t_value(net: &NetDef, method: Method) -> Result<usize> {
    Ok(net.k() - rho(net.matrices(), method)?)
}

pub fn t_value_counted(net: &NetDef, method: Method, counter: &mut VecAdds) -> Result<usize> {
    Ok(net.k() - rho_counted(net.matrices(), method, counter)?)
}

pub(crate) fn row_table(matrices: &[BitMatrix]) -> Vec<&[u64]> {
    matrices.iter().map(BitMatrix::rows).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netio::{identity_net, sample_regular_net, sobol_2d};
    use crate::Error;

    #[test]
    fn names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("gauss".parse::<Method>().is_err());
    }

    #[test]
    fn sobol_2d_is_a_0_net() {
        for k in 1..=12 {
            let net = sobol_2d(k).unwrap();
            for m in Method::ALL {
                assert_eq!(t_value(&net, m).unwrap(), 0, "k={k} method={m}");
            }
        }
    }

    #[test]
    fn identity_copies() {
        // two equal coordinates: the 2x... matrix with rows e_0 from both blocks is singular
        for k in 2..=8 {
            let net = identity_net(3, k).unwrap();
            for m in Method::ALL {
                assert_eq!(t_value(&net, m).unwrap(), k - 1, "k={k} method={m}");
            }
        }
        let one = identity_net(1, 6).unwrap();
        for m in Method::ALL {
            assert_eq!(t_value(&one, m).unwrap(), 0);
        }
    }

    #[test]
    fn methods_agree_with_the_oracle() {
        for seed in 0..300 {
            let s = 1 + (seed as usize % 5);
            let k = 1 + (seed as usize * 7 % 10);
            let net = sample_regular_net(s, k, seed).unwrap();
            let want = rho(net.matrices(), Method::Oracle).unwrap();
            for m in Method::ALL {
                assert_eq!(rho(net.matrices(), m).unwrap(), want, "seed={seed} s={s} k={k} {m}");
            }
        }
    }

    #[test]
    fn large_k_needs_wide_rows() {
        let sobol = sobol_2d(40).unwrap();
        for m in [Method::MglIncreasing, Method::MglDecreasing, Method::PirsicSchmid] {
            assert_eq!(t_value(&sobol, m).unwrap(), 0);
        }
        for seed in 0..3 {
            let net = sample_regular_net(3, 36, seed).unwrap();
            let want = t_value(&net, Method::PirsicSchmid).unwrap();
            assert_eq!(t_value(&net, Method::MglIncreasing).unwrap(), want);
            assert_eq!(t_value(&net, Method::MglDecreasing).unwrap(), want);
        }
    }

    #[test]
    fn decreasing_from_below_rho_stops_at_start() {
        let net = sobol_2d(8).unwrap();
        let got = rho_mgl(net.matrices(), Direction::Decreasing { start: 5 }, &mut VecAdds::new());
        assert_eq!(got.unwrap(), 5);
    }

    #[test]
    fn singular_generators_are_rejected() {
        let bad = BitMatrix::from_rows(2, vec![0b11, 0b11]).unwrap();
        let good = BitMatrix::identity(2).unwrap();
        for m in Method::ALL {
            assert_eq!(
                rho(&[good.clone(), bad.clone()], m),
                Err(Error::SingularMatrix { coordinate: 2 })
            );
        }
        assert!(rho(&[], Method::MglIncreasing).is_err());
    }
}
