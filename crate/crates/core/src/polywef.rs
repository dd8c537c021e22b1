//! Truncated multivariate weight polynomials with exact integer
//! coefficients, matrices over them, and terminated-trellis IP-WEF tables.
//!
//! Exponents are always stored as `(i1, i2, p)`. Single-input encoders use
//! the variables `(I, P)` and keep `i2 = 0`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trellis::TransferMatrix;

/// Truncation bound meaning "keep everything".
pub const UNBOUNDED: u32 = u32::MAX;

/// Exponent triple `(i1, i2, p)`.
pub type Exponents = [u32; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Arity {
    /// Variables `(I, P)`.
    Two,
    /// Variables `(I1, I2, P)`.
    Three,
}

impl Arity {
    pub fn num_vars(self) -> usize {
        match self {
            Arity::Two => 2,
            Arity::Three => 3,
        }
    }

    fn admits(self, e: &Exponents) -> bool {
        self == Arity::Three || e[1] == 0
    }
}

pub fn total_weight(e: &Exponents) -> u64 {
    e.iter().map(|&x| x as u64).sum()
}

fn within(e: &Exponents, w_max: u32) -> bool {
    w_max == UNBOUNDED || total_weight(e) <= w_max as u64
}

/// Polynomial in `(I, P)` or `(I1, I2, P)` truncated at total weight `w_max`.
///
/// Only nonzero coefficients are stored. Since exponents only ever add
/// under multiplication, dropping terms above `w_max` never changes a
/// retained coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightPolynomial {
    arity: Arity,
    w_max: u32,
    terms: BTreeMap<Exponents, BigUint>,
}

impl WeightPolynomial {
    pub fn zero(arity: Arity, w_max: u32) -> Self {
        WeightPolynomial {
            arity,
            w_max,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(arity: Arity, w_max: u32) -> Self {
        Self::monomial(arity, w_max, [0, 0, 0], BigUint::one())
    }

    /// `coeff * I1^e0 I2^e1 P^e2`; empty if the weight exceeds `w_max`.
    pub fn monomial(arity: Arity, w_max: u32, exps: Exponents, coeff: BigUint) -> Self {
        assert!(
            arity.admits(&exps),
            "I2 exponent on a two-variable polynomial"
        );
        let mut p = Self::zero(arity, w_max);
        if !coeff.is_zero() && within(&exps, w_max) {
            p.terms.insert(exps, coeff);
        }
        p
    }

    /// Build from `(exponents, coefficient)` pairs, merging duplicates.
    pub fn from_terms(
        arity: Arity,
        w_max: u32,
        terms: impl IntoIterator<Item = (Exponents, BigUint)>,
    ) -> Self {
        let mut p = Self::zero(arity, w_max);
        for (e, c) in terms {
            p.add_term(e, &c);
        }
        p
    }

    pub fn arity(&self) -> Arity {
        self.arity
    }

    pub fn w_max(&self) -> u32 {
        self.w_max
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigUint)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, e: Exponents) -> Option<&BigUint> {
        self.terms.get(&e)
    }

    fn add_term(&mut self, e: Exponents, c: &BigUint) {
        assert!(
            self.arity.admits(&e),
            "I2 exponent on a two-variable polynomial"
        );
        if c.is_zero() || !within(&e, self.w_max) {
            return;
        }
        *self.terms.entry(e).or_default() += c;
    }

    /// In-place sum; the truncation bound of `self` is kept.
    pub fn add_assign(&mut self, other: &WeightPolynomial) {
        assert_eq!(self.arity, other.arity, "arity mismatch");
        for (e, c) in &other.terms {
            self.add_term(*e, c);
        }
    }

    /// Copy with a (possibly) tighter truncation bound.
    pub fn truncated(&self, w_max: u32) -> Self {
        let w_max = w_max.min(self.w_max);
        WeightPolynomial {
            arity: self.arity,
            w_max,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| within(e, w_max))
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    /// Value with every variable set to one.
    pub fn eval_ones(&self) -> BigUint {
        self.terms.values().sum()
    }

    /// Truncated product. Both factors must share arity and `w_max`.
    pub fn mul(&self, other: &WeightPolynomial) -> Result<WeightPolynomial> {
        if self.arity != other.arity {
            return Err(Error::usage("polynomial arity mismatch"));
        }
        if self.w_max != other.w_max {
            return Err(Error::usage(format!(
                "polynomial truncation mismatch ({} vs {})",
                self.w_max, other.w_max
            )));
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &WeightPolynomial) -> WeightPolynomial {
        let mut out = Self::zero(self.arity, self.w_max);
        // Iterating the right factor in weight order lets us stop early.
        let mut rhs: Vec<(u64, &Exponents, &BigUint)> = other
            .terms
            .iter()
            .map(|(e, c)| (total_weight(e), e, c))
            .collect();
        rhs.sort_by_key(|(w, _, _)| *w);
        for (ea, ca) in &self.terms {
            let wa = total_weight(ea);
            for (wb, eb, cb) in &rhs {
                if self.w_max != UNBOUNDED && wa + wb > self.w_max as u64 {
                    break;
                }
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                *out.terms.entry(e).or_default() += ca * *cb;
            }
        }
        out
    }
}

impl fmt::Display for WeightPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let names: &[&str] = match self.arity {
            Arity::Two => &["I", "", "P"],
            Arity::Three => &["I1", "I2", "P"],
        };
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let mut factors: Vec<String> = Vec::new();
            if !c.is_one() {
                factors.push(c.to_string());
            }
            for (v, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => factors.push(names[v].to_string()),
                    _ => factors.push(format!("{}^{x}", names[v])),
                }
            }
            if factors.is_empty() {
                f.write_str("1")?;
            } else {
                f.write_str(&factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Square matrix of weight polynomials sharing one arity and truncation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    dim: usize,
    entries: Vec<WeightPolynomial>,
}

impl PolyMatrix {
    pub fn from_entries(dim: usize, entries: Vec<WeightPolynomial>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        PolyMatrix { dim, entries }
    }

    pub fn identity(dim: usize, arity: Arity, w_max: u32) -> Self {
        let entries = (0..dim * dim)
            .map(|k| {
                if k / dim == k % dim {
                    WeightPolynomial::one(arity, w_max)
                } else {
                    WeightPolynomial::zero(arity, w_max)
                }
            })
            .collect();
        PolyMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, r: usize, c: usize) -> &WeightPolynomial {
        &self.entries[r * self.dim + c]
    }

    /// Matrix product. Each entry sums over `k` in increasing order.
    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let proto = &self.entries[0];
        let mut entries = Vec::with_capacity(d * d);
        for r in 0..d {
            for c in 0..d {
                let mut acc = WeightPolynomial::zero(proto.arity, proto.w_max);
                for k in 0..d {
                    let (a, b) = (self.entry(r, k), other.entry(k, c));
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc.add_assign(&a.mul(b).expect("matrix entries share arity and truncation"));
                }
                entries.push(acc);
            }
        }
        PolyMatrix { dim: d, entries }
    }

    /// Replace every variable by one, entry-wise.
    pub fn eval_ones(&self) -> Vec<BigUint> {
        self.entries
            .iter()
            .map(WeightPolynomial::eval_ones)
            .collect()
    }
}

/// `m^n` by binary exponentiation (square and multiply). `n >= 1`.
pub fn mat_pow(m: &PolyMatrix, n: u32) -> Result<PolyMatrix> {
    if n == 0 {
        return Err(Error::usage("matrix power exponent must be >= 1"));
    }
    let mut result: Option<PolyMatrix> = None;
    let mut base = m.clone();
    let mut e = n;
    loop {
        if e & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(acc) => acc.mul(&base),
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = base.mul(&base);
    }
    Ok(result.expect("n >= 1"))
}

/// Input-parity weight enumerator of a terminated trellis: the `(1,1)`
/// entry of `M^N`, i.e. weight profiles of all zero-to-zero paths of `N`
/// sections (no tail sections).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WefTable {
    arity: Arity,
    sections: u32,
    w_max: u32,
    coefficients: BTreeMap<Exponents, BigUint>,
}

impl WefTable {
    pub fn from_polynomial(sections: u32, poly: WeightPolynomial) -> Self {
        WefTable {
            arity: poly.arity,
            sections,
            w_max: poly.w_max,
            coefficients: poly.terms,
        }
    }

    pub fn from_coefficients(
        arity: Arity,
        sections: u32,
        w_max: u32,
        coefficients: BTreeMap<Exponents, BigUint>,
    ) -> Self {
        let coefficients = coefficients
            .into_iter()
            .filter(|(e, c)| !c.is_zero() && within(e, w_max))
            .collect();
        WefTable {
            arity,
            sections,
            w_max,
            coefficients,
        }
    }

    pub fn arity(&self) -> Arity {
        self.arity
    }

    /// Number of trellis sections `N`.
    pub fn sections(&self) -> u32 {
        self.sections
    }

    pub fn w_max(&self) -> u32 {
        self.w_max
    }

    pub fn coefficients(&self) -> &BTreeMap<Exponents, BigUint> {
        &self.coefficients
    }

    /// `A_{i1,i2,p}` (or `A_{i,p}` as `(i, 0, p)`); zero when absent.
    pub fn get(&self, e: Exponents) -> BigUint {
        self.coefficients.get(&e).cloned().unwrap_or_default()
    }

    /// Sum of all coefficients (every variable set to one).
    pub fn total_count(&self) -> BigUint {
        self.coefficients.values().sum()
    }

    /// Restrict to total weight `<= w_max`.
    pub fn truncated(&self, w_max: u32) -> Self {
        Self::from_coefficients(
            self.arity,
            self.sections,
            w_max.min(self.w_max),
            self.coefficients.clone(),
        )
    }

    /// `A_w`: coefficients grouped by `i1 + i2 + p`.
    pub fn project_total_weight(&self) -> BTreeMap<u64, BigUint> {
        let mut out: BTreeMap<u64, BigUint> = BTreeMap::new();
        for (e, c) in &self.coefficients {
            *out.entry(total_weight(e)).or_default() += c;
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let terms = self
            .coefficients
            .iter()
            .map(|(e, c)| match self.arity {
                Arity::Three => WefTermJson {
                    i1: Some(e[0]),
                    i2: Some(e[1]),
                    i: None,
                    p: e[2],
                    count: c.to_string(),
                },
                Arity::Two => WefTermJson {
                    i1: None,
                    i2: None,
                    i: Some(e[0]),
                    p: e[2],
                    count: c.to_string(),
                },
            })
            .collect();
        let doc = WefTableJson {
            n: self.sections,
            w_max: self.w_max,
            terms,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    /// CSV with header `i1,i2,p,count` (three variables) or `i,p,count`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        match self.arity {
            Arity::Three => wtr.write_record(["i1", "i2", "p", "count"])?,
            Arity::Two => wtr.write_record(["i", "p", "count"])?,
        }
        for (e, c) in &self.coefficients {
            let count = c.to_string();
            match self.arity {
                Arity::Three => wtr.write_record([
                    &e[0].to_string(),
                    &e[1].to_string(),
                    &e[2].to_string(),
                    &count,
                ])?,
                Arity::Two => wtr.write_record([&e[0].to_string(), &e[2].to_string(), &count])?,
            }
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: WefTableJson = serde_json::from_str(text)?;
        let mut arity = None;
        let mut coefficients = BTreeMap::new();
        for t in doc.terms {
            let (a, e) = match (t.i1, t.i2, t.i) {
                (Some(i1), Some(i2), None) => (Arity::Three, [i1, i2, t.p]),
                (None, None, Some(i)) => (Arity::Two, [i, 0, t.p]),
                _ => return Err(Error::parse("term must have either i1,i2 or i")),
            };
            if arity.is_some_and(|x| x != a) {
                return Err(Error::parse("mixed term shapes in WEF table"));
            }
            arity = Some(a);
            let c: BigUint = t
                .count
                .parse()
                .map_err(|_| Error::parse(format!("bad coefficient \"{}\"", t.count)))?;
            coefficients.insert(e, c);
        }
        Ok(Self::from_coefficients(
            arity.unwrap_or(Arity::Two),
            doc.n,
            doc.w_max,
            coefficients,
        ))
    }
}

#[derive(Serialize, Deserialize)]
struct WefTableJson {
    #[serde(rename = "N")]
    n: u32,
    w_max: u32,
    terms: Vec<WefTermJson>,
}

#[derive(Serialize, Deserialize)]
struct WefTermJson {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    i1: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    i2: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    i: Option<u32>,
    p: u32,
    count: String,
}

/// Dense storage for the cells `e` with `total_weight(e) <= w`. Cells are
/// laid out in lexicographic `(e0, e1, e2)` order so each value of `e0`
/// owns one contiguous run.
struct Simplex {
    w: usize,
    three: bool,
    /// Start offset of each `(e0, e1)` run (three variables) or `e0` run (two).
    starts: Vec<usize>,
    len: usize,
}

impl Simplex {
    fn new(arity: Arity, w: usize) -> Self {
        let three = arity == Arity::Three;
        let mut starts = Vec::new();
        let mut len = 0;
        if three {
            starts.resize((w + 1) * (w + 1), usize::MAX);
            for a in 0..=w {
                for b in 0..=(w - a) {
                    starts[a * (w + 1) + b] = len;
                    len += w - a - b + 1;
                }
            }
        } else {
            for a in 0..=w {
                starts.push(len);
                len += w - a + 1;
            }
        }
        Simplex {
            w,
            three,
            starts,
            len,
        }
    }

    #[inline]
    fn index(&self, e: [usize; 3]) -> usize {
        if self.three {
            self.starts[e[0] * (self.w + 1) + e[1]] + e[2]
        } else {
            self.starts[e[0]] + e[2]
        }
    }

    /// Visit every cell with each coordinate `<= cap`, in layout order.
    fn for_each(&self, cap: usize, mut f: impl FnMut([usize; 3], usize)) {
        let w = self.w;
        for a in 0..=cap.min(w) {
            if self.three {
                for b in 0..=cap.min(w - a) {
                    let base = self.starts[a * (w + 1) + b];
                    for c in 0..=cap.min(w - a - b) {
                        f([a, b, c], base + c);
                    }
                }
            } else {
                let base = self.starts[a];
                for c in 0..=cap.min(w - a) {
                    f([a, 0, c], base + c);
                }
            }
        }
    }
}

/// Terminated-trellis IP-WEF `[M^N]_{1,1}` truncated at total weight `w_max`.
///
/// Because every entry of `M` is a sum of 0/1-exponent monomials, the first
/// row of `M^N` is accumulated one section at a time (`r_{t+1} = r_t M`)
/// over dense coefficient arrays. This gives the same polynomial as
/// [`terminated_wef_via_power`] at a cost linear in `N` and in the number of
/// retained cells.
pub fn terminated_wef(m: &TransferMatrix, n: u32, w_max: u32) -> Result<WefTable> {
    if n == 0 {
        return Err(Error::usage("number of trellis sections must be >= 1"));
    }
    let arity = m.arity();
    let states = m.dim();
    // No path of N sections has a variable exponent above N.
    let per_var_max = n as u64;
    let reachable = per_var_max * arity.num_vars() as u64;
    let w = if w_max == UNBOUNDED {
        reachable
    } else {
        (w_max as u64).min(reachable)
    } as usize;
    let simplex = Simplex::new(arity, w);

    // incoming[s'] = [(from, shift)]
    let mut incoming: Vec<Vec<(usize, [usize; 3])>> = vec![Vec::new(); states];
    for (from, to, e) in m.monomial_branches() {
        incoming[to].push((from, e.map(|x| x as usize)));
    }

    let mut prev: Vec<Vec<BigUint>> = vec![vec![BigUint::zero(); simplex.len]; states];
    let mut next = prev.clone();
    prev[0][simplex.index([0, 0, 0])] = BigUint::one();

    for t in 1..=n as usize {
        for (to, buf) in next.iter_mut().enumerate() {
            simplex.for_each(t, |e, idx| {
                let acc = &mut buf[idx];
                acc.set_zero();
                for (from, sh) in &incoming[to] {
                    if e[0] < sh[0] || e[1] < sh[1] || e[2] < sh[2] {
                        continue;
                    }
                    let src =
                        &prev[*from][simplex.index([e[0] - sh[0], e[1] - sh[1], e[2] - sh[2]])];
                    if !src.is_zero() {
                        *acc += src;
                    }
                }
            });
        }
        std::mem::swap(&mut prev, &mut next);
    }

    let mut coefficients = BTreeMap::new();
    let zero_state = &prev[0];
    simplex.for_each(n as usize, |e, idx| {
        let c = &zero_state[idx];
        if !c.is_zero() {
            coefficients.insert([e[0] as u32, e[1] as u32, e[2] as u32], c.clone());
        }
    });
    Ok(WefTable::from_coefficients(arity, n, w_max, coefficients))
}

/// The same table obtained literally as the `(1,1)` entry of `M^N`
/// computed by [`mat_pow`].
pub fn terminated_wef_via_power(m: &TransferMatrix, n: u32, w_max: u32) -> Result<WefTable> {
    let power = mat_pow(&m.lift(w_max), n)?;
    Ok(WefTable::from_polynomial(n, power.entry(0, 0).clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trellis::{build_transfer_matrix, build_trellis};

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn bcc_matrix() -> TransferMatrix {
        build_transfer_matrix(&build_trellis(&"1,0,1/7;0,1,5/7".parse().unwrap()))
    }

    #[test]
    fn binomial_square() {
        let ip =
            WeightPolynomial::from_terms(Arity::Two, 4, [([0, 0, 0], big(1)), ([1, 0, 1], big(1))]);
        let sq = ip.mul(&ip).unwrap();
        let expected = WeightPolynomial::from_terms(
            Arity::Two,
            4,
            [
                ([0, 0, 0], big(1)),
                ([1, 0, 1], big(2)),
                ([2, 0, 2], big(1)),
            ],
        );
        assert_eq!(sq, expected);
    }

    #[test]
    fn product_beyond_truncation_is_empty() {
        let ip = WeightPolynomial::monomial(Arity::Two, 2, [1, 0, 1], big(1));
        assert!(ip.mul(&ip).unwrap().is_zero());
    }

    #[test]
    fn mismatched_factors_are_rejected() {
        let a = WeightPolynomial::one(Arity::Two, 4);
        let b = WeightPolynomial::one(Arity::Three, 4);
        let c = WeightPolynomial::one(Arity::Two, 5);
        assert!(matches!(a.mul(&b), Err(Error::Usage(_))));
        assert!(matches!(a.mul(&c), Err(Error::Usage(_))));
    }

    #[test]
    fn display_uses_variable_names() {
        let p = WeightPolynomial::from_terms(
            Arity::Three,
            UNBOUNDED,
            [
                ([0, 0, 0], big(1)),
                ([1, 1, 1], big(1)),
                ([0, 2, 1], big(3)),
            ],
        );
        assert_eq!(p.to_string(), "1 + 3*I2^2*P + I1*I2*P");
    }

    #[test]
    fn first_power_is_the_matrix() {
        let m = bcc_matrix().lift(UNBOUNDED);
        assert_eq!(mat_pow(&m, 1).unwrap(), m);
        assert!(mat_pow(&m, 0).is_err());
    }

    #[test]
    fn second_power_matches_path_enumeration() {
        let m = bcc_matrix();
        let branches = m.monomial_branches();
        let mut expected: BTreeMap<Exponents, BigUint> = BTreeMap::new();
        for &(f1, t1, e1) in &branches {
            for &(f2, t2, e2) in &branches {
                if f1 == 0 && t1 == f2 && t2 == 0 {
                    let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]];
                    *expected.entry(e).or_default() += 1u32;
                }
            }
        }
        let p2 = mat_pow(&m.lift(UNBOUNDED), 2).unwrap();
        let got: BTreeMap<Exponents, BigUint> = p2
            .entry(0, 0)
            .terms()
            .map(|(e, c)| (*e, c.clone()))
            .collect();
        assert_eq!(got, expected);
        // 1 + I1*I2*P^2 + ... every zero-to-zero two-section path
        assert_eq!(p2.entry(0, 0).eval_ones(), big(4));
    }

    #[test]
    fn branch_count_conservation() {
        let m = bcc_matrix().lift(UNBOUNDED);
        for n in 1..=4u32 {
            let ones = mat_pow(&m, n).unwrap().eval_ones();
            // every state starts 4^n input sequences
            for r in 0..4 {
                let row: BigUint = ones[r * 4..(r + 1) * 4].iter().sum();
                assert_eq!(row, big(4).pow(n), "n = {n}, row {r}");
            }
            let total: BigUint = ones.iter().sum();
            assert_eq!(total, big(4).pow(n) * big(4u64), "n = {n}");
        }
    }

    #[test]
    fn forward_kernel_matches_matrix_power() {
        for text in ["1,0,1/7;0,1,5/7", "1,5/7", "1,15/13"] {
            let m = build_transfer_matrix(&build_trellis(&text.parse().unwrap()));
            for n in [1, 2, 3, 5, 8] {
                for w in [4, 9, UNBOUNDED] {
                    assert_eq!(
                        terminated_wef(&m, n, w).unwrap(),
                        terminated_wef_via_power(&m, n, w).unwrap(),
                        "{text} N={n} w_max={w}"
                    );
                }
            }
        }
    }

    #[test]
    fn single_section_is_constant() {
        let t = terminated_wef(&bcc_matrix(), 1, 12).unwrap();
        assert_eq!(t.coefficients().len(), 1);
        assert_eq!(t.get([0, 0, 0]), big(1));
    }

    #[test]
    fn projection_groups_by_total_weight() {
        let table = WefTable::from_coefficients(
            Arity::Three,
            4,
            UNBOUNDED,
            [([1, 0, 2], big(3)), ([0, 1, 2], big(5))]
                .into_iter()
                .collect(),
        );
        assert_eq!(
            table.project_total_weight(),
            [(3u64, big(8))].into_iter().collect()
        );
        let unit = WefTable::from_coefficients(
            Arity::Three,
            4,
            UNBOUNDED,
            [([0, 0, 0], big(1))].into_iter().collect(),
        );
        assert_eq!(
            unit.project_total_weight(),
            [(0u64, big(1))].into_iter().collect()
        );
    }

    #[test]
    fn projection_conserves_mass() {
        let t = terminated_wef(&bcc_matrix(), 5, UNBOUNDED).unwrap();
        let projected: BigUint = t.project_total_weight().values().sum();
        assert_eq!(projected, t.total_count());
    }

    #[test]
    fn json_round_trip() {
        let t = terminated_wef(&bcc_matrix(), 6, 10).unwrap();
        let text = t.to_json().unwrap();
        assert!(text.contains("\"i1\"") && text.contains("\"count\""));
        assert_eq!(WefTable::from_json(&text).unwrap(), t);

        let m = build_transfer_matrix(&build_trellis(&"1,5/7".parse().unwrap()));
        let t = terminated_wef(&m, 6, 10).unwrap();
        let text = t.to_json().unwrap();
        assert!(text.contains("\"i\"") && !text.contains("\"i1\""));
        assert_eq!(WefTable::from_json(&text).unwrap(), t);
    }
}
