use crate::error::{contract, Error, Result};
use crate::gf2::BitMatrix;

/// Generator matrices of a base-2 digital net with `2^k` points in `s` dimensions.
///
/// Every matrix is `k x k` and non-singular, i.e. the net is fully
/// projection-regular. Column `c` of `C_j` multiplies digit `a_c` of the point
/// index (least significant first) and row `r` produces the coordinate digit
/// of weight `2^-(r+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetDef {
    k: usize,
    matrices: Vec<BitMatrix>,
}

impl NetDef {
    pub fn new(matrices: Vec<BitMatrix>) -> Result<Self> {
        let k = check_generators(&matrices)?;
        Ok(Self { k, matrices })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn s(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[BitMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, j: usize) -> &BitMatrix {
        &self.matrices[j]
    }

    /// Generator matrices of the coordinates in `coords` (0-based), in order.
    pub fn project(&self, coords: &[usize]) -> Result<Vec<BitMatrix>> {
        coords
            .iter()
            .map(|&j| {
                self.matrices
                    .get(j)
                    .cloned()
                    .ok_or_else(|| contract(format!("coordinate {} out of range 1..={}", j + 1, self.s())))
            })
            .collect()
    }
}

/// Validates a vector of generator matrices and returns their common size `k`.
pub fn check_generators(matrices: &[BitMatrix]) -> Result<usize> {
    let first = matrices
        .first()
        .ok_or_else(|| contract("at least one generator matrix is required"))?;
    let k = first.n_rows();
    for (j, m) in matrices.iter().enumerate() {
        if m.n_rows() != k || m.n_cols() != k {
            return Err(contract(format!(
                "generator matrix {} is {}x{}, expected {k}x{k}",
                j + 1,
                m.n_rows(),
                m.n_cols()
            )));
        }
        if !m.is_nonsingular()? {
            return Err(Error::SingularMatrix { coordinate: j + 1 });
        }
    }
    Ok(k)
}
