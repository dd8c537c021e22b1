//! Homogeneous linear systems over GF(2) with at most 128 unknowns, stored
//! as one `u128` bitmask per equation.

use crate::error::{Error, Result};

/// Largest nullspace dimension [`span`] will enumerate.
pub const MAX_ENUMERATION_DIM: usize = 24;

#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    num_vars: usize,
    rows: Vec<u128>,
}

impl LinearSystem {
    pub fn new(num_vars: usize) -> Result<Self> {
        if num_vars > 128 {
            return Err(Error::usage(format!(
                "GF(2) system with {num_vars} unknowns exceeds the 128-unknown limit"
            )));
        }
        Ok(LinearSystem {
            num_vars,
            rows: Vec::new(),
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Add the equation `Σ_{j in row} x_j = 0`.
    pub fn push(&mut self, row: u128) {
        if row != 0 {
            self.rows.push(row);
        }
    }

    /// Row echelon form with `(pivot column, row)` pairs.
    fn echelon(&self) -> Vec<(usize, u128)> {
        let mut rows = self.rows.clone();
        let mut pivots: Vec<(usize, u128)> = Vec::new();
        for col in 0..self.num_vars {
            let bit = 1u128 << col;
            let Some(pos) = rows.iter().position(|r| r & bit != 0) else {
                continue;
            };
            let pivot = rows.swap_remove(pos);
            for r in rows.iter_mut() {
                if *r & bit != 0 {
                    *r ^= pivot;
                }
            }
            for (_, r) in pivots.iter_mut() {
                if *r & bit != 0 {
                    *r ^= pivot;
                }
            }
            pivots.push((col, pivot));
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.echelon().len()
    }

    /// A basis of `{x : A x = 0}`, one vector per free column.
    pub fn nullspace_basis(&self) -> Vec<u128> {
        let pivots = self.echelon();
        let mut is_pivot = vec![false; self.num_vars];
        for (c, _) in &pivots {
            is_pivot[*c] = true;
        }
        (0..self.num_vars)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut x = 1u128 << f;
                // Reduced rows: pivot variable = sum of its row's free entries.
                for (c, row) in &pivots {
                    if row & (1u128 << f) != 0 {
                        x |= 1u128 << c;
                    }
                }
                x
            })
            .collect()
    }

    pub fn is_solution(&self, x: u128) -> bool {
        self.rows
            .iter()
            .all(|r| (r & x).count_ones().is_multiple_of(2))
    }
}

/// Every GF(2) combination of `basis`, in Gray-code order starting at zero.
pub fn span(basis: &[u128]) -> Result<Vec<u128>> {
    if basis.len() > MAX_ENUMERATION_DIM {
        return Err(Error::usage(format!(
            "nullspace of dimension {} exceeds the enumeration limit {MAX_ENUMERATION_DIM}",
            basis.len()
        )));
    }
    let count = 1usize << basis.len();
    let mut out = Vec::with_capacity(count);
    let mut x = 0u128;
    out.push(x);
    for k in 1..count {
        x ^= basis[k.trailing_zeros() as usize];
        out.push(x);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_of_repetition_checks() {
        // x0 = x1 = x2
        let mut sys = LinearSystem::new(3).unwrap();
        sys.push(0b011);
        sys.push(0b110);
        assert_eq!(sys.rank(), 2);
        let basis = sys.nullspace_basis();
        assert_eq!(basis, vec![0b111]);
        assert_eq!(span(&basis).unwrap(), vec![0, 0b111]);
    }

    #[test]
    fn enumerated_span_is_exactly_the_solution_set() {
        let mut sys = LinearSystem::new(8).unwrap();
        for row in [
            0b1010_0110u128,
            0b0111_0001,
            0b1100_1100,
            0b1010_0110 ^ 0b0111_0001,
        ] {
            sys.push(row);
        }
        let mut members = span(&sys.nullspace_basis()).unwrap();
        members.sort();
        let brute: Vec<u128> = (0..256u128).filter(|&x| sys.is_solution(x)).collect();
        assert_eq!(members, brute);
        assert_eq!(members.len(), 1 << (8 - sys.rank()));
    }

    #[test]
    fn limits() {
        assert!(LinearSystem::new(129).is_err());
        assert!(span(&vec![1; MAX_ENUMERATION_DIM + 1]).is_err());
    }
}
