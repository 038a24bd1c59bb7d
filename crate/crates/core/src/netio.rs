//! Net definition files, classic constructions and random regular nets.
//!
//! The text format is
//!
//! ```text
//! b=2 k=<k> s=<s>
//! matrix 1
//! <k lines of k characters from {0,1}>
//! ...
//! matrix <s>
//! <k lines>
//! ```
//!
//! Line `r` of a block is row `r` of the matrix and character `c` is entry
//! `(r, c)`. Blank lines and lines starting with `#` are ignored anywhere.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf2::{low_mask, BitMatrix, MAX_COLS};
use crate::net::NetDef;

pub fn parse_net(text: &str) -> Result<NetDef> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));

    let (line_no, header) = lines.next().ok_or(Error::Parse {
        line: 0,
        message: "empty net file".into(),
    })?;
    let (b, k, s) = parse_header(header).map_err(|message| Error::Parse { line: line_no, message })?;
    if b != 2 {
        return Err(Error::UnsupportedBase(b));
    }
    if k > MAX_COLS as u64 {
        return Err(Error::Size(format!("k = {k} exceeds {MAX_COLS}")));
    }
    let k = k as usize;
    let s = s as usize;

    let mut matrices = Vec::with_capacity(s);
    for j in 1..=s {
        let expected = format!("matrix {j}");
        match lines.next() {
            Some((_, l)) if l == expected => {}
            Some((n, l)) => {
                return Err(Error::Parse {
                    line: n,
                    message: format!("expected `{expected}`, found `{l}`"),
                })
            }
            None => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("file ends before `{expected}`"),
                })
            }
        }
        let mut rows = Vec::with_capacity(k);
        for r in 0..k {
            let (n, l) = lines.next().ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("matrix {j} ends after {r} of {k} rows"),
            })?;
            if l.len() != k {
                return Err(Error::Parse {
                    line: n,
                    message: format!("row has {} characters, expected {k}", l.len()),
                });
            }
            let mut w = 0u64;
            for (c, ch) in l.bytes().enumerate() {
                match ch {
                    b'0' => {}
                    b'1' => w |= 1 << c,
                    _ => {
                        return Err(Error::Parse {
                            line: n,
                            message: format!("unexpected character `{}`", ch as char),
                        })
                    }
                }
            }
            rows.push(w);
        }
        let m = BitMatrix::from_rows(k, rows)?;
        if !m.is_nonsingular()? {
            return Err(Error::SingularMatrix { coordinate: j });
        }
        matrices.push(m);
    }
    if let Some((n, l)) = lines.next() {
        return Err(Error::Parse {
            line: n,
            message: format!("trailing content `{l}`"),
        });
    }
    NetDef::new(matrices)
}

fn parse_header(line: &str) -> std::result::Result<(u64, u64, u64), String> {
    let tokens: Vec<&str> = line.split(' ').collect();
    let [b, k, s] = tokens.as_slice() else {
        return Err(format!("expected `b=2 k=<k> s=<s>`, found `{line}`"));
    };
    let field = |tok: &str, key: &str| -> std::result::Result<u64, String> {
        tok.strip_prefix(key)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| format!("expected `{key}<integer>`, found `{tok}`"))
    };
    let (b, k, s) = (field(b, "b=")?, field(k, "k=")?, field(s, "s=")?);
    if k == 0 || s == 0 {
        return Err("k and s must be positive".into());
    }
    Ok((b, k, s))
}

pub fn emit_net(net: &NetDef) -> String {
    let k = net.k();
    let mut out = String::with_capacity(net.s() * (k + 1) * (k + 12) + 32);
    let _ = writeln!(out, "b=2 k={k} s={}", net.s());
    for (j, m) in net.matrices().iter().enumerate() {
        let _ = writeln!(out, "matrix {}", j + 1);
        for &row in m.rows() {
            for c in 0..k {
                out.push(if (row >> c) & 1 == 1 { '1' } else { '0' });
            }
            out.push('\n');
        }
    }
    out
}

/// Upper-triangular Pascal matrix mod 2: entry `(r, c)` is `C(c, r) mod 2`.
pub fn pascal_matrix(k: usize) -> Result<BitMatrix> {
    // Lucas: C(c, r) is odd iff the bits of r are a subset of those of c.
    let rows = (0..k)
        .map(|r| (0..k).filter(|&c| c & r == r).fold(0u64, |w, c| w | (1 << c)))
        .collect();
    BitMatrix::from_rows(k, rows)
}

/// The two-dimensional Sobol' net `(I_k, P_k)`.
pub fn sobol_2d(k: usize) -> Result<NetDef> {
    NetDef::new(vec![BitMatrix::identity(k)?, pascal_matrix(k)?])
}

/// `s` copies of the identity.
pub fn identity_net(s: usize, k: usize) -> Result<NetDef> {
    NetDef::new(vec![BitMatrix::identity(k)?; s])
}

/// Uniformly random non-singular `k x k` matrix by rejection.
pub fn random_nonsingular<R: Rng>(k: usize, rng: &mut R) -> BitMatrix {
    loop {
        let m = random_matrix(k, rng);
        if m.rank() == k {
            return m;
        }
    }
}

/// Uniformly random `k x k` matrix: one `u64` draw per row, masked to `k` bits.
pub fn random_matrix<R: Rng>(k: usize, rng: &mut R) -> BitMatrix {
    let mask = low_mask(k);
    let rows = (0..k).map(|_| rng.gen::<u64>() & mask).collect();
    BitMatrix::from_rows(k, rows).expect("k <= 64")
}

/// `s` independent uniform non-singular matrices.
///
/// The generator is ChaCha8 seeded through `SeedableRng::seed_from_u64(seed)`,
/// so the output depends only on `(s, k, seed)`.
pub fn sample_regular_net(s: usize, k: usize, seed: u64) -> Result<NetDef> {
    if k > MAX_COLS {
        return Err(Error::Size(format!("k = {k} exceeds {MAX_COLS}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_regular_net_with(s, k, &mut rng)
}

pub fn sample_regular_net_with<R: Rng>(s: usize, k: usize, rng: &mut R) -> Result<NetDef> {
    NetDef::new((0..s).map(|_| random_nonsingular(k, rng)).collect())
}

/// Uniform among `k x k` matrices whose leading `m x m` minors are all
/// non-singular: such a matrix factors uniquely as unit lower times unit
/// upper triangular.
pub fn random_embedded_regular<R: Rng>(k: usize, rng: &mut R) -> BitMatrix {
    let lower: Vec<u64> = (0..k).map(|r| (rng.gen::<u64>() & low_mask(r)) | 1 << r).collect();
    let upper: Vec<u64> = (0..k)
        .map(|r| (rng.gen::<u64>() & low_mask(k) & !low_mask(r + 1)) | 1 << r)
        .collect();
    let rows = lower
        .iter()
        .map(|&l| {
            let mut acc = 0;
            let mut bits = l;
            while bits != 0 {
                acc ^= upper[bits.trailing_zeros() as usize];
                bits &= bits - 1;
            }
            acc
        })
        .collect();
    BitMatrix::from_rows(k, rows).expect("k <= 64")
}

/// `count` nets drawn in sequence from one generator seeded with `seed`,
/// embedded-regular if `embedded` is set.
pub fn sample_nets(s: usize, k: usize, seed: u64, count: usize, embedded: bool) -> Result<Vec<NetDef>> {
    if k > MAX_COLS {
        return Err(Error::Size(format!("k = {k} exceeds {MAX_COLS}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            if embedded {
                NetDef::new((0..s).map(|_| random_embedded_regular(k, &mut rng)).collect())
            } else {
                sample_regular_net_with(s, k, &mut rng)
            }
        })
        .collect()
}

pub fn sample_embedded_net(s: usize, k: usize, seed: u64) -> Result<NetDef> {
    if k > MAX_COLS {
        return Err(Error::Size(format!("k = {k} exceeds {MAX_COLS}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    NetDef::new((0..s).map(|_| random_embedded_regular(k, &mut rng)).collect())
}
