//! Union bounds on ML decoding error probability over the AWGN channel,
//! minimum-distance bounds with expurgation, and the Gilbert-Varshamov
//! truncation weight.
//!
//! Coefficients stay exact until the final step: per-weight sums of
//! `Ā_{i,p}` are formed as rationals, converted to natural logarithms and
//! combined with `ln Q(.)` by log-sum-exp, so floor-region terms far below
//! `1e-300` are still accumulated correctly.

use std::collections::BTreeMap;
use std::io::Write;

use libm::erfc;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::ensemble::{EnsembleKind, EnsembleWef, WeightSpectrum};
use crate::error::{Error, Result};

/// Below this argument `erfc` is used directly; above it `Q(x)` is
/// close to underflow and the continued fraction is used instead.
const TAIL_SWITCH: f64 = 26.0;

/// Standard normal tail `Q(x) = P(Z > x) = erfc(x / sqrt 2) / 2`.
pub fn gaussian_tail(x: f64) -> f64 {
    if x <= TAIL_SWITCH {
        0.5 * erfc(x / std::f64::consts::SQRT_2)
    } else {
        ln_gaussian_tail(x).exp()
    }
}

/// `ln Q(x)`, accurate far past the point where `Q(x)` underflows.
pub fn ln_gaussian_tail(x: f64) -> f64 {
    if x <= TAIL_SWITCH {
        return gaussian_tail(x).ln();
    }
    // Q(x) = φ(x) / (x + 1/(x + 2/(x + 3/(x + ...)))), evaluated bottom-up.
    let mut tail = x;
    for k in (1..=60).rev() {
        tail = x + k as f64 / tail;
    }
    -0.5 * x * x - 0.5 * (2.0 * std::f64::consts::PI).ln() - tail.ln()
}

/// `Eb/N0` in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Natural logarithm of a nonnegative big integer (`-inf` for zero).
fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        return x.to_f64().expect("fits f64").ln();
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    top.to_f64().expect("64-bit mantissa").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural logarithm of a nonnegative rational (`-inf` for zero).
pub fn ln_rational(x: &BigRational) -> f64 {
    assert!(
        !x.is_negative(),
        "logarithm of a negative weight coefficient"
    );
    ln_biguint(x.numer().magnitude()) - ln_biguint(x.denom().magnitude())
}

fn log_sum_exp(values: impl Iterator<Item = f64>) -> f64 {
    let values: Vec<f64> = values.filter(|v| *v > f64::NEG_INFINITY).collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Largest `d` with `Σ_{j=0}^{d-2} C(n-1, j) < 2^(n-k)`: the distance
/// guaranteed by the Gilbert-Varshamov argument for some linear `(n, k)`
/// code.
pub fn gv_distance(n_bits: u64, k_bits: u64) -> Result<u64> {
    if !(0 < k_bits && k_bits < n_bits) {
        return Err(Error::usage(format!(
            "GV distance needs 0 < k < n, got n = {n_bits}, k = {k_bits}"
        )));
    }
    let budget = BigUint::one() << (n_bits - k_bits);
    let mut sum = BigUint::zero();
    let mut term = BigUint::one(); // C(n-1, d-1)
    let mut d = 1u64;
    loop {
        if &sum + &term >= budget {
            return Ok(d);
        }
        sum += &term;
        term = term * (n_bits - d) / d;
        d += 1;
    }
}

/// Default truncation weight for an `(nN, kN)` ensemble: twice the GV
/// distance, at least 60. For three-variable (BCC) enumerators the value is
/// capped at [`BCC_DEFAULT_WMAX_CAP`] to keep the exact computation
/// tractable; the resulting truncation may then fall below the GV distance,
/// which bound curves record.
pub fn default_truncation(kind: EnsembleKind, n: u32) -> Result<u32> {
    let gv = gv_distance(3 * n as u64, n as u64)?;
    let w = (2 * gv).max(60) as u32;
    Ok(match kind {
        EnsembleKind::Pcc => w,
        EnsembleKind::Bcc => w.min(BCC_DEFAULT_WMAX_CAP),
    })
}

pub const BCC_DEFAULT_WMAX_CAP: u32 = 128;

/// Largest `d̂` satisfying `Σ_{w=1}^{d̂-1} Ā_w < 1 - α`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpurgationResult {
    pub alpha: f64,
    pub d_hat: u32,
    /// `Σ_{w=1}^{d̂-1} Ā_w`.
    pub partial_sum: BigRational,
    /// The sum never reached `1 - α` inside the truncation band, so
    /// `d̂ = w_max + 1` is only a lower bound on the true value.
    pub lower_bound_only: bool,
}

pub fn min_distance_bound(spectrum: &WeightSpectrum, alpha: f64) -> Result<ExpurgationResult> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::usage(format!(
            "alpha must satisfy 0 <= alpha < 1, got {alpha}"
        )));
    }
    let threshold = BigRational::one() - BigRational::from_float(alpha).expect("finite alpha");
    let mut partial = BigRational::zero();
    for w in 1..=spectrum.w_max {
        let a_w = spectrum.get(w);
        let extended = &partial + &a_w;
        if extended >= threshold {
            return Ok(ExpurgationResult {
                alpha,
                d_hat: w,
                partial_sum: partial,
                lower_bound_only: false,
            });
        }
        partial = extended;
    }
    Ok(ExpurgationResult {
        alpha,
        d_hat: spectrum.w_max + 1,
        partial_sum: partial,
        lower_bound_only: true,
    })
}

/// Per-weight log coefficients of an ensemble, ready for evaluation at any
/// signal-to-noise ratio.
#[derive(Clone, Debug)]
pub struct UnionBound {
    rate: f64,
    /// `(w, ln Σ_{i+p=w, i>=1} (i/N) Ā_{i,p})`
    ber_terms: Vec<(u32, f64)>,
    /// `(w, ln Σ_{i+p=w} Ā_{i,p})`, `w >= 1`
    fer_terms: Vec<(u32, f64)>,
}

impl UnionBound {
    /// Terms of `e` with `i + p <= truncation`.
    pub fn new(e: &EnsembleWef, truncation: u32) -> Self {
        let n = BigRational::from_integer(BigInt::from(e.n()));
        let mut ber: BTreeMap<u32, BigRational> = BTreeMap::new();
        let mut fer: BTreeMap<u32, BigRational> = BTreeMap::new();
        for (&(i, p), a) in e.coefficients() {
            let w = i + p;
            if w == 0 || w > truncation {
                continue;
            }
            *fer.entry(w).or_insert_with(BigRational::zero) += a;
            if i > 0 {
                let scaled = a * BigRational::from_integer(BigInt::from(i)) / &n;
                *ber.entry(w).or_insert_with(BigRational::zero) += scaled;
            }
        }
        let to_ln = |m: BTreeMap<u32, BigRational>| -> Vec<(u32, f64)> {
            m.iter().map(|(w, x)| (*w, ln_rational(x))).collect()
        };
        UnionBound {
            rate: e.rate(),
            ber_terms: to_ln(ber),
            fer_terms: to_ln(fer),
        }
    }

    fn ln_q(&self, w: u32, ebno: f64) -> f64 {
        ln_gaussian_tail((2.0 * w as f64 * self.rate * ebno).sqrt())
    }

    /// `ln` of the BER bound restricted to weights `>= min_weight`.
    pub fn ln_ber(&self, snr_db: f64, min_weight: u32) -> f64 {
        let ebno = db_to_linear(snr_db);
        log_sum_exp(
            self.ber_terms
                .iter()
                .filter(|(w, _)| *w >= min_weight)
                .map(|(w, c)| c + self.ln_q(*w, ebno)),
        )
    }

    /// `ln` of the FER bound restricted to weights `>= min_weight`.
    pub fn ln_fer(&self, snr_db: f64, min_weight: u32) -> f64 {
        let ebno = db_to_linear(snr_db);
        log_sum_exp(
            self.fer_terms
                .iter()
                .filter(|(w, _)| *w >= min_weight)
                .map(|(w, c)| c + self.ln_q(*w, ebno)),
        )
    }

    pub fn ber(&self, snr_db: f64) -> f64 {
        self.ln_ber(snr_db, 1).exp()
    }

    pub fn fer(&self, snr_db: f64) -> f64 {
        self.ln_fer(snr_db, 1).exp()
    }

    /// Expurgated BER bound: `(1/α) Σ_{i+p >= d̂} (i/N) Ā_{i,p} Q(.)`.
    pub fn expurgated_ber(&self, snr_db: f64, alpha: f64, d_hat: u32) -> Result<f64> {
        check_expurgation_alpha(alpha)?;
        Ok((self.ln_ber(snr_db, d_hat.max(1)) - alpha.ln()).exp())
    }
}

fn check_expurgation_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::usage(format!(
            "expurgated bound needs 0 < alpha <= 1, got {alpha}"
        )));
    }
    Ok(())
}

/// BER union bound over all coefficients of `e`.
pub fn ber_union_bound(e: &EnsembleWef, snr_db: f64) -> f64 {
    UnionBound::new(e, e.w_max()).ber(snr_db)
}

/// FER union bound over all coefficients of `e`.
pub fn fer_union_bound(e: &EnsembleWef, snr_db: f64) -> f64 {
    UnionBound::new(e, e.w_max()).fer(snr_db)
}

pub fn expurgated_ber_bound(e: &EnsembleWef, alpha: f64, d_hat: u32, snr_db: f64) -> Result<f64> {
    UnionBound::new(e, e.w_max()).expurgated_ber(snr_db, alpha, d_hat)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpurgationSummary {
    pub alpha: f64,
    pub d_hat: u32,
    pub lower_bound_only: bool,
}

/// BER/FER bound values over an `Eb/N0` grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    pub kind: EnsembleKind,
    #[serde(rename = "N")]
    pub n: u32,
    pub generators: Vec<String>,
    pub w_max: u32,
    pub truncation_weight: u32,
    pub gv_distance: u64,
    /// Set when the truncation weight does not exceed the GV distance.
    pub gv_warning: bool,
    pub expurgation: Option<ExpurgationSummary>,
    pub ebno_db: Vec<f64>,
    pub ber: Vec<f64>,
    pub fer: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ber_expurgated: Option<Vec<f64>>,
}

/// Evaluate the bounds of `e` at every grid point. With `alpha`, the
/// minimum-distance bound `d̂` is computed first and the expurgated BER
/// bound added.
pub fn sweep(e: &EnsembleWef, snr_grid: &[f64], alpha: Option<f64>) -> Result<BoundCurve> {
    if snr_grid.is_empty() {
        return Err(Error::usage("empty Eb/N0 grid"));
    }
    if let Some(x) = snr_grid.iter().find(|x| !x.is_finite()) {
        return Err(Error::usage(format!("non-finite Eb/N0 value {x}")));
    }
    let (k_bits, n_bits) = e.block_lengths();
    let gv = gv_distance(n_bits, k_bits)?;
    let truncation = e.total_weight().w_max;
    let ub = UnionBound::new(e, truncation);

    let expurgation = match alpha {
        Some(a) => {
            check_expurgation_alpha(a)?;
            let r = min_distance_bound(&e.total_weight(), a)?;
            Some(ExpurgationSummary {
                alpha: a,
                d_hat: r.d_hat,
                lower_bound_only: r.lower_bound_only,
            })
        }
        None => None,
    };
    let ber_expurgated = match &expurgation {
        Some(x) => Some(
            snr_grid
                .iter()
                .map(|&s| ub.expurgated_ber(s, x.alpha, x.d_hat))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };

    Ok(BoundCurve {
        kind: e.kind(),
        n: e.n(),
        generators: Vec::new(),
        w_max: e.w_max(),
        truncation_weight: truncation,
        gv_distance: gv,
        gv_warning: (truncation as u64) <= gv,
        expurgation,
        ebno_db: snr_grid.to_vec(),
        ber: snr_grid.iter().map(|&s| ub.ber(s)).collect(),
        fer: snr_grid.iter().map(|&s| ub.fer(s)).collect(),
        ber_expurgated,
    })
}

impl BoundCurve {
    /// CSV with header `ebno_db,ber_bound,fer_bound` (plus
    /// `ber_expurgated_bound` when expurgation was requested).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        let mut header = vec!["ebno_db", "ber_bound", "fer_bound"];
        if self.ber_expurgated.is_some() {
            header.push("ber_expurgated_bound");
        }
        wtr.write_record(&header)?;
        for (k, snr) in self.ebno_db.iter().enumerate() {
            let mut row = vec![
                format!("{snr}"),
                format!("{:.6e}", self.ber[k]),
                format!("{:.6e}", self.fer[k]),
            ];
            if let Some(x) = &self.ber_expurgated {
                row.push(format!("{:.6e}", x[k]));
            }
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
