//! Uniform-interleaver ensemble averages for PCC and uncoupled BCC
//! ensembles.
//!
//! Averages are exact rationals. PCC ensembles draw one uniform permutation
//! (on the lower encoder input); BCC ensembles draw three independent
//! uniform permutations `(Π, Π^U, Π^L)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polywef::{terminated_wef, Arity, WefTable, UNBOUNDED};
use crate::trellis::{build_transfer_matrix, build_trellis, GeneratorSpec, RateKind};

/// `C(n, k)`, zero outside `0 <= k <= n`.
pub fn binomial(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc *= n - j;
        acc /= j + 1;
    }
    acc
}

/// Row `C(n, 0..=n)` of Pascal's triangle.
pub fn binomial_row(n: u64) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigUint::one();
    row.push(c.clone());
    for j in 0..n {
        c = c * (n - j) / (j + 1);
        row.push(c.clone());
    }
    row
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleKind {
    Pcc,
    Bcc,
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnsembleKind::Pcc => "pcc",
            EnsembleKind::Bcc => "bcc",
        })
    }
}

impl std::str::FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pcc" => Ok(EnsembleKind::Pcc),
            "bcc" => Ok(EnsembleKind::Bcc),
            other => Err(Error::usage(format!("unknown ensemble kind \"{other}\""))),
        }
    }
}

/// Ensemble-average input-parity weight enumerator `Ā_{i,p}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnsembleWef {
    kind: EnsembleKind,
    n: u32,
    w_max: u32,
    coefficients: BTreeMap<(u32, u32), BigRational>,
}

/// `Ā_w` for `w = 0..=w_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSpectrum {
    pub w_max: u32,
    pub coefficients: BTreeMap<u32, BigRational>,
}

impl WeightSpectrum {
    pub fn get(&self, w: u32) -> BigRational {
        self.coefficients
            .get(&w)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }
}

impl EnsembleWef {
    pub fn new(
        kind: EnsembleKind,
        n: u32,
        w_max: u32,
        coefficients: BTreeMap<(u32, u32), BigRational>,
    ) -> Self {
        let coefficients = coefficients
            .into_iter()
            .filter(|((i, p), c)| {
                !c.is_zero() && (w_max == UNBOUNDED || (*i as u64 + *p as u64) <= w_max as u64)
            })
            .collect();
        EnsembleWef {
            kind,
            n,
            w_max,
            coefficients,
        }
    }

    pub fn kind(&self) -> EnsembleKind {
        self.kind
    }

    /// Permutation size `N`.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Information symbols per section.
    pub fn k_per_section(&self) -> u32 {
        1
    }

    /// Code symbols per section.
    pub fn n_per_section(&self) -> u32 {
        3
    }

    pub fn rate(&self) -> f64 {
        self.k_per_section() as f64 / self.n_per_section() as f64
    }

    /// Information and code block lengths `(kN, nN)`.
    pub fn block_lengths(&self) -> (u64, u64) {
        (
            (self.k_per_section() * self.n) as u64,
            (self.n_per_section() * self.n) as u64,
        )
    }

    pub fn w_max(&self) -> u32 {
        self.w_max
    }

    pub fn coefficients(&self) -> &BTreeMap<(u32, u32), BigRational> {
        &self.coefficients
    }

    pub fn get(&self, i: u32, p: u32) -> BigRational {
        self.coefficients
            .get(&(i, p))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Number of equiprobable codes `N_c` in the ensemble: `N!` for PCC,
    /// `(N!)^3` for BCC.
    pub fn ensemble_size(&self) -> BigUint {
        let fact: BigUint = (1..=self.n as u64).map(BigUint::from).product();
        match self.kind {
            EnsembleKind::Pcc => fact,
            EnsembleKind::Bcc => fact.pow(3),
        }
    }

    /// `Ā_w = Σ_{i+p=w} Ā_{i,p}`.
    pub fn total_weight(&self) -> WeightSpectrum {
        let mut coefficients: BTreeMap<u32, BigRational> = BTreeMap::new();
        for ((i, p), c) in &self.coefficients {
            *coefficients.entry(i + p).or_insert_with(BigRational::zero) += c;
        }
        let w_max = if self.w_max == UNBOUNDED {
            self.n_per_section() * self.n
        } else {
            self.w_max
        };
        WeightSpectrum {
            w_max,
            coefficients,
        }
    }

    /// Same ensemble restricted to `i + p <= w_max`.
    pub fn truncated(&self, w_max: u32) -> Self {
        Self::new(
            self.kind,
            self.n,
            w_max.min(self.w_max),
            self.coefficients.clone(),
        )
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = EnsembleJson {
            kind: self.kind,
            n: self.n,
            k: self.k_per_section(),
            code_symbols: self.n_per_section(),
            rate: self.rate(),
            w_max: self.w_max,
            ensemble_size: match self.kind {
                EnsembleKind::Pcc => "N!".into(),
                EnsembleKind::Bcc => "(N!)^3".into(),
            },
            terms: self
                .coefficients
                .iter()
                .map(|((i, p), c)| RationalTermJson {
                    i: *i,
                    p: *p,
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: EnsembleJson = serde_json::from_str(text)?;
        let mut coefficients = BTreeMap::new();
        for t in doc.terms {
            let num: BigInt = t
                .num
                .parse()
                .map_err(|_| Error::parse(format!("bad numerator \"{}\"", t.num)))?;
            let den: BigInt = t
                .den
                .parse()
                .map_err(|_| Error::parse(format!("bad denominator \"{}\"", t.den)))?;
            if den.is_zero() {
                return Err(Error::parse("zero denominator"));
            }
            coefficients.insert((t.i, t.p), BigRational::new(num, den));
        }
        Ok(Self::new(doc.kind, doc.n, doc.w_max, coefficients))
    }
}

#[derive(Serialize, Deserialize)]
struct EnsembleJson {
    kind: EnsembleKind,
    #[serde(rename = "N")]
    n: u32,
    k: u32,
    #[serde(rename = "n")]
    code_symbols: u32,
    rate: f64,
    w_max: u32,
    ensemble_size: String,
    terms: Vec<RationalTermJson>,
}

#[derive(Serialize, Deserialize)]
struct RationalTermJson {
    i: u32,
    p: u32,
    num: String,
    den: String,
}

fn check_component(table: &WefTable, arity: Arity, n: u32, role: &str) -> Result<()> {
    if table.arity() != arity {
        return Err(Error::usage(format!(
            "{role} component table has arity {:?}, expected {arity:?}",
            table.arity()
        )));
    }
    if table.sections() != n {
        return Err(Error::usage(format!(
            "{role} component table has N = {}, expected N = {n}",
            table.sections()
        )));
    }
    Ok(())
}

fn ratio(num: BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den.clone()))
}

/// `Ā_{i,p} = Σ_{p1} A^U_{i,p1} A^L_{i,p-p1} / C(N,i)`, truncated at the
/// smaller of the two component truncations.
pub fn pcc_average(upper: &WefTable, lower: &WefTable, n: u32) -> Result<EnsembleWef> {
    check_component(upper, Arity::Two, n, "upper")?;
    check_component(lower, Arity::Two, n, "lower")?;
    let w_max = upper.w_max().min(lower.w_max());
    let binom = binomial_row(n as u64);

    let mut lower_by_input: BTreeMap<u32, Vec<(u32, &BigUint)>> = BTreeMap::new();
    for (e, c) in lower.coefficients() {
        lower_by_input.entry(e[0]).or_default().push((e[2], c));
    }

    let mut sums: BTreeMap<(u32, u32), BigUint> = BTreeMap::new();
    for (e, a) in upper.coefficients() {
        let (i, p1) = (e[0], e[2]);
        let Some(lows) = lower_by_input.get(&i) else {
            continue;
        };
        for (p2, b) in lows {
            let p = p1 + p2;
            if w_max != UNBOUNDED && (i + p) as u64 > w_max as u64 {
                continue;
            }
            *sums.entry((i, p)).or_default() += a * *b;
        }
    }
    let coefficients = sums
        .into_iter()
        .map(|((i, p), s)| ((i, p), ratio(s, &binom[i as usize])))
        .collect();
    Ok(EnsembleWef::new(EnsembleKind::Pcc, n, w_max, coefficients))
}

/// `Ā_{i,p} = Σ_{p1} A^U_{i,p1,p-p1} A^L_{i,p-p1,p1} / (C(N,i) C(N,p1) C(N,p-p1))`.
///
/// In `A^U_{i,x,y}` the second input carries the (permuted) lower parity of
/// weight `x` and the upper parity has weight `y`; the lower table is read
/// with the roles exchanged.
pub fn bcc_average(upper: &WefTable, lower: &WefTable, n: u32) -> Result<EnsembleWef> {
    check_component(upper, Arity::Three, n, "upper")?;
    check_component(lower, Arity::Three, n, "lower")?;
    let w_max = upper.w_max().min(lower.w_max());
    let binom = binomial_row(n as u64);

    // Summands of each (i, p) cell; C(N,i) is shared and divided out once.
    let mut cells: BTreeMap<(u32, u32), Vec<(BigUint, BigUint)>> = BTreeMap::new();
    for (e, a) in upper.coefficients() {
        let (i, x, y) = (e[0], e[1], e[2]);
        let p = x + y;
        if w_max != UNBOUNDED && (i + p) as u64 > w_max as u64 {
            continue;
        }
        let Some(b) = lower.coefficients().get(&[i, y, x]) else {
            continue;
        };
        let den = &binom[x as usize] * &binom[y as usize];
        cells.entry((i, p)).or_default().push((a * b, den));
    }

    let mut coefficients = BTreeMap::new();
    for ((i, p), terms) in cells {
        let mut acc = BigRational::zero();
        for (num, den) in terms {
            acc += ratio(num, &den);
        }
        acc /= BigRational::from_integer(BigInt::from(binom[i as usize].clone()));
        coefficients.insert((i, p), acc);
    }
    Ok(EnsembleWef::new(EnsembleKind::Bcc, n, w_max, coefficients))
}

/// Full pipeline: component trellises, terminated enumerators truncated at
/// `w_max`, then the ensemble average for `kind`.
pub fn ensemble_wef(
    kind: EnsembleKind,
    upper: &GeneratorSpec,
    lower: &GeneratorSpec,
    n: u32,
    w_max: u32,
) -> Result<EnsembleWef> {
    let rate = match kind {
        EnsembleKind::Pcc => RateKind::Half,
        EnsembleKind::Bcc => RateKind::TwoThirds,
    };
    for (role, g) in [("upper", upper), ("lower", lower)] {
        if g.rate() != rate {
            return Err(Error::usage(format!(
                "{kind} ensembles need {} component encoders; {role} generator {g} has {} inputs",
                match rate {
                    RateKind::Half => "rate-1/2",
                    RateKind::TwoThirds => "rate-2/3",
                },
                g.num_inputs()
            )));
        }
    }
    let table =
        |g: &GeneratorSpec| terminated_wef(&build_transfer_matrix(&build_trellis(g)), n, w_max);
    let a_upper = table(upper)?;
    let a_lower = if upper == lower {
        a_upper.clone()
    } else {
        table(lower)?
    };
    match kind {
        EnsembleKind::Pcc => pcc_average(&a_upper, &a_lower, n),
        EnsembleKind::Bcc => bcc_average(&a_upper, &a_lower, n),
    }
}
