//! Recursive systematic convolutional encoders: generator parsing, the
//! trellis state machine and the single-section transfer matrix.
//!
//! Generators are written in the usual octal notation. A rate-1/2 encoder is
//! `"1,5/7"` and a rate-2/3 encoder is `"1,0,1/7;0,1,5/7"` (rows separated by
//! `;`). Each row is the systematic part followed by `numerator/denominator`;
//! all rows share one feedback polynomial.
//!
//! # Realization and state numbering
//!
//! The encoder is realized in observer canonical form with a single shared
//! feedback register `s_1 .. s_m`, `m = deg q`:
//!
//! ```text
//! v    = s_1 + sum_k n_k[0] u_k
//! s_j' = s_{j+1} + sum_k n_k[j] u_k + q_j v      (s_{m+1} = 0)
//! ```
//!
//! The state index is `sum_j s_j 2^(j-1)`, i.e. `s_1` is the least
//! significant bit. With this numbering the transfer matrix of
//! `G = (1 0 1/7; 0 1 5/7)` is
//!
//! ```text
//! 1       I2 P    I1 I2   I1 P
//! I1      I1I2P   I2      P
//! I2 P    1       I1 P    I1 I2
//! I1I2P   I1      P       I2
//! ```
//!
//! which is frozen by a golden test.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::polywef::{Arity, PolyMatrix, WeightPolynomial, UNBOUNDED};

/// Polynomial over GF(2); bit `j` is the coefficient of `D^j`.
///
/// Trailing (high-degree) zero coefficients are never stored, so the zero
/// polynomial is the empty sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryPoly(Vec<u8>);

impl BinaryPoly {
    pub fn from_bits(bits: impl Into<Vec<u8>>) -> Self {
        let mut bits: Vec<u8> = bits.into();
        for b in bits.iter_mut() {
            *b &= 1;
        }
        while bits.last() == Some(&0) {
            bits.pop();
        }
        BinaryPoly(bits)
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    /// Coefficient of `D^j` (zero past the degree).
    pub fn coeff(&self, j: usize) -> u8 {
        self.0.get(j).copied().unwrap_or(0)
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

/// Parse an octal generator into a binary polynomial.
///
/// The octal digits are expanded to binary and leading zero bits dropped;
/// the first remaining (most significant) bit is the coefficient of `D^0`.
/// This is the convention behind the familiar `(1, 15/13)` turbo code
/// (`13 -> 1 + D^2 + D^3`); for the symmetric generators `5` and `7` either
/// bit order gives the same polynomial.
pub fn parse_octal(text: &str) -> Result<BinaryPoly> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::parse("empty octal generator"));
    }
    let mut msb_first = Vec::with_capacity(3 * text.len());
    for ch in text.chars() {
        let digit = ch
            .to_digit(8)
            .ok_or_else(|| Error::parse(format!("'{ch}' is not an octal digit in \"{text}\"")))?;
        msb_first.extend([(digit >> 2) & 1, (digit >> 1) & 1, digit & 1].map(|b| b as u8));
    }
    let first_one = match msb_first.iter().position(|&b| b == 1) {
        Some(pos) => pos,
        None => return Ok(BinaryPoly(Vec::new())),
    };
    Ok(BinaryPoly::from_bits(&msb_first[first_one..]))
}

/// Code rates supported by the encoder model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RateKind {
    /// One systematic input, one parity output.
    Half,
    /// Two systematic inputs, one parity output.
    TwoThirds,
}

impl RateKind {
    pub fn num_inputs(self) -> usize {
        match self {
            RateKind::Half => 1,
            RateKind::TwoThirds => 2,
        }
    }

    pub fn arity(self) -> Arity {
        match self {
            RateKind::Half => Arity::Two,
            RateKind::TwoThirds => Arity::Three,
        }
    }
}

/// Generator matrix of a recursive systematic encoder with a common
/// feedback polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    rate: RateKind,
    numerators: Vec<BinaryPoly>,
    denominator: BinaryPoly,
    text: String,
}

impl GeneratorSpec {
    pub fn new(numerators: Vec<BinaryPoly>, denominator: BinaryPoly) -> Result<Self> {
        let rate = match numerators.len() {
            1 => RateKind::Half,
            2 => RateKind::TwoThirds,
            k => {
                return Err(Error::parse(format!(
                    "expected 1 or 2 inputs (rate 1/2 or 2/3), got {k}"
                )))
            }
        };
        let memory = match denominator.degree() {
            Some(0) | None => {
                return Err(Error::parse(
                    "feedback polynomial must have degree >= 1 (recursive encoder)",
                ))
            }
            Some(m) => m,
        };
        if denominator.coeff(0) != 1 {
            return Err(Error::parse(
                "feedback polynomial must have a nonzero constant term",
            ));
        }
        for num in &numerators {
            if num.degree().is_some_and(|d| d > memory) {
                return Err(Error::parse(format!(
                    "numerator degree {} exceeds encoder memory {memory}",
                    num.degree().unwrap()
                )));
            }
        }
        let text = render_generator(&numerators, &denominator);
        Ok(GeneratorSpec {
            rate,
            numerators,
            denominator,
            text,
        })
    }

    pub fn rate(&self) -> RateKind {
        self.rate
    }

    pub fn num_inputs(&self) -> usize {
        self.rate.num_inputs()
    }

    pub fn numerators(&self) -> &[BinaryPoly] {
        &self.numerators
    }

    pub fn denominator(&self) -> &BinaryPoly {
        &self.denominator
    }

    pub fn memory(&self) -> usize {
        self.denominator
            .degree()
            .expect("validated at construction")
    }

    /// Canonical text form, e.g. `"1,0,1/7;0,1,5/7"`.
    pub fn as_text(&self) -> &str {
        &self.text
    }
}

fn poly_to_octal(poly: &BinaryPoly) -> String {
    if poly.is_zero() {
        return "0".to_string();
    }
    // Inverse of parse_octal: coefficient of D^0 is the most significant bit.
    let mut value: u128 = 0;
    for &b in poly.bits() {
        value = (value << 1) | b as u128;
    }
    format!("{value:o}")
}

fn render_generator(numerators: &[BinaryPoly], denominator: &BinaryPoly) -> String {
    let k = numerators.len();
    let den = poly_to_octal(denominator);
    numerators
        .iter()
        .enumerate()
        .map(|(row, num)| {
            let mut parts: Vec<String> = (0..k)
                .map(|col| if col == row { "1" } else { "0" }.to_string())
                .collect();
            parts.push(format!("{}/{den}", poly_to_octal(num)));
            parts.join(",")
        })
        .collect::<Vec<_>>()
        .join(";")
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let cleaned: String = text
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '(' && *c != ')')
            .collect();
        if cleaned.is_empty() {
            return Err(Error::parse("empty generator specification"));
        }
        let rows: Vec<&str> = cleaned.split(';').collect();
        let k = rows.len();
        let mut numerators = Vec::with_capacity(k);
        let mut denominator: Option<BinaryPoly> = None;
        for (row_idx, row) in rows.iter().enumerate() {
            let entries: Vec<&str> = row.split(',').collect();
            if entries.len() != k + 1 {
                return Err(Error::parse(format!(
                    "row {} of \"{text}\" has {} entries, expected {}",
                    row_idx + 1,
                    entries.len(),
                    k + 1
                )));
            }
            for (col, entry) in entries[..k].iter().enumerate() {
                let expected = if col == row_idx { "1" } else { "0" };
                if *entry != expected {
                    return Err(Error::parse(format!(
                        "systematic part of row {} must be an identity row, found \"{entry}\"",
                        row_idx + 1
                    )));
                }
            }
            let (num_text, den_text) = entries[k].split_once('/').ok_or_else(|| {
                Error::parse(format!(
                    "parity entry \"{}\" must be numerator/denominator (recursive encoder)",
                    entries[k]
                ))
            })?;
            let num = parse_octal(num_text)?;
            let den = parse_octal(den_text)?;
            match &denominator {
                Some(existing) if *existing != den => {
                    return Err(Error::parse(
                        "all rows must share the same feedback polynomial",
                    ))
                }
                _ => denominator = Some(den),
            }
            numerators.push(num);
        }
        GeneratorSpec::new(numerators, denominator.expect("at least one row"))
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// One trellis branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Branch {
    pub from: usize,
    /// Bit `k` holds input `k + 1`.
    pub inputs: u8,
    pub parity: u8,
    pub to: usize,
}

impl Branch {
    pub fn input(&self, k: usize) -> u8 {
        (self.inputs >> k) & 1
    }

    /// Exponent triple `(i1, i2, p)` of the branch label; `i2 = 0` for
    /// single-input encoders.
    pub fn exponents(&self) -> [u32; 3] {
        [
            self.input(0) as u32,
            self.input(1) as u32,
            self.parity as u32,
        ]
    }
}

/// Finite-state branch structure of a recursive systematic encoder.
#[derive(Clone, Debug)]
pub struct TrellisMachine {
    rate: RateKind,
    memory: usize,
    /// Ordered by `(from, inputs)`, so `branches[from * 2^k + inputs]`.
    branches: Vec<Branch>,
}

/// Build the observer-canonical trellis for `spec`.
pub fn build_trellis(spec: &GeneratorSpec) -> TrellisMachine {
    let m = spec.memory();
    let k = spec.num_inputs();
    let q = spec.denominator();
    let nums = spec.numerators();
    let num_states = 1usize << m;
    let mut branches = Vec::with_capacity(num_states << k);
    for from in 0..num_states {
        let reg = |j: usize| -> u8 {
            // s_j for j in 1..=m, zero beyond the register
            if (1..=m).contains(&j) {
                ((from >> (j - 1)) & 1) as u8
            } else {
                0
            }
        };
        for inputs in 0..(1u8 << k) {
            let feed = |j: usize| -> u8 {
                (0..k)
                    .map(|i| nums[i].coeff(j) & ((inputs >> i) & 1))
                    .fold(0, |a, b| a ^ b)
            };
            let parity = reg(1) ^ feed(0);
            let mut to = 0usize;
            for j in 1..=m {
                let bit = reg(j + 1) ^ feed(j) ^ (q.coeff(j) & parity);
                to |= (bit as usize) << (j - 1);
            }
            branches.push(Branch {
                from,
                inputs,
                parity,
                to,
            });
        }
    }
    TrellisMachine {
        rate: spec.rate(),
        memory: m,
        branches,
    }
}

impl TrellisMachine {
    pub fn rate(&self) -> RateKind {
        self.rate
    }

    pub fn num_inputs(&self) -> usize {
        self.rate.num_inputs()
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn num_states(&self) -> usize {
        1 << self.memory
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// The unique branch leaving `from` with the given input bits.
    pub fn branch(&self, from: usize, inputs: u8) -> &Branch {
        &self.branches[(from << self.num_inputs()) + inputs as usize]
    }

    /// Run the encoder from state 0; returns the parity sequence and the
    /// final state. `inputs[t]` packs the input bits of section `t`.
    pub fn encode(&self, inputs: &[u8]) -> (Vec<u8>, usize) {
        let mut state = 0;
        let parity = inputs
            .iter()
            .map(|&x| {
                let b = self.branch(state, x);
                state = b.to;
                b.parity
            })
            .collect();
        (parity, state)
    }
}

/// Single-section transfer matrix `M`: entry `(r, c)` is the sum of the
/// weight monomials of all branches from state `r` to state `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferMatrix {
    arity: Arity,
    dim: usize,
    entries: Vec<WeightPolynomial>,
}

pub fn build_transfer_matrix(trellis: &TrellisMachine) -> TransferMatrix {
    let dim = trellis.num_states();
    let arity = trellis.rate().arity();
    let mut entries = vec![WeightPolynomial::zero(arity, UNBOUNDED); dim * dim];
    for b in trellis.branches() {
        let mono = WeightPolynomial::monomial(arity, UNBOUNDED, b.exponents(), BigUint::one());
        entries[b.from * dim + b.to].add_assign(&mono);
    }
    TransferMatrix {
        arity,
        dim,
        entries,
    }
}

impl TransferMatrix {
    pub fn arity(&self) -> Arity {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry in row `r`, column `c` (zero-based).
    pub fn entry(&self, r: usize, c: usize) -> &WeightPolynomial {
        &self.entries[r * self.dim + c]
    }

    /// Branches as `(from, to, exponents)`, one per monomial occurrence.
    pub fn monomial_branches(&self) -> Vec<(usize, usize, [u32; 3])> {
        let mut out = Vec::new();
        for r in 0..self.dim {
            for c in 0..self.dim {
                for (exps, coeff) in self.entry(r, c).terms() {
                    let count: u64 = coeff.try_into().expect("branch multiplicity fits u64");
                    out.extend(std::iter::repeat_n((r, c, *exps), count as usize));
                }
            }
        }
        out
    }

    /// The matrix over polynomials truncated at total weight `w_max`.
    pub fn lift(&self, w_max: u32) -> PolyMatrix {
        PolyMatrix::from_entries(
            self.dim,
            self.entries.iter().map(|e| e.truncated(w_max)).collect(),
        )
    }
}

impl fmt::Display for TransferMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| self.entry(r, c).to_string())
                .collect();
            writeln!(f, "{}", row.join("\t"))?;
        }
        Ok(())
    }
}
