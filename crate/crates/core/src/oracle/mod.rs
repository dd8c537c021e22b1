//! Exhaustive small-scale ground truth.
//!
//! Nothing here uses the transfer-matrix machinery. Component codes are
//! described by their terminated parity checks: a zero-to-zero path of `N`
//! sections with inputs `u_k(D)` and parity `v(D)` exists exactly when
//!
//! ```text
//! q(D) v(D) = Σ_k n_k(D) u_k(D)      (deg u_k, deg v <= N - 1)
//! ```
//!
//! as polynomials over GF(2), which gives `N + m` linear equations per
//! encoder. Codes built from several encoders and permutations are solved
//! as one homogeneous GF(2) system whose nullspace is enumerated.
//!
//! Permutations act on the right, `x Π`: position `i` of `x` moves to
//! position `π(i)`.

pub mod gf2;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ensemble::{EnsembleKind, EnsembleWef};
use crate::error::{Error, Result};
use crate::polywef::{Arity, WefTable, UNBOUNDED};
use crate::trellis::{GeneratorSpec, RateKind, TrellisMachine};

use gf2::{span, LinearSystem};

/// Largest permutation size for exhaustive PCC averaging (`N!` codes).
pub const MAX_EXHAUSTIVE_PCC_N: u32 = 5;
/// Largest permutation size for exhaustive BCC averaging (`(N!)^3` codes).
pub const MAX_EXHAUSTIVE_BCC_N: u32 = 4;
/// Largest number of input bits `kN` for exhaustive single-encoder counts.
pub const MAX_EXHAUSTIVE_INPUT_BITS: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; map.len()];
        for &j in &map {
            if j >= map.len() || std::mem::replace(&mut seen[j], true) {
                return Err(Error::usage(format!("{map:?} is not a permutation")));
            }
        }
        Ok(Permutation(map))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.shuffle(rng);
        Permutation(map)
    }

    /// All `n!` permutations in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation(current.clone()));
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
                return out;
            };
            let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
            current.swap(i - 1, j);
            current[i..].reverse();
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// `x Π`: `out[π(i)] = x[i]`.
    pub fn apply<T: Clone>(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.0.len(), "permutation length mismatch");
        let mut out = x.to_vec();
        for (i, &j) in self.0.iter().enumerate() {
            out[j] = x[i].clone();
        }
        out
    }
}

/// Time-invariant permutations `(Π, Π^U, Π^L)` of a braided code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BccPermutations {
    /// `Π`, applied to the information sequence entering the lower encoder.
    pub info: Permutation,
    /// `Π^U`, applied to the lower parity entering the upper encoder.
    pub upper: Permutation,
    /// `Π^L`, applied to the upper parity entering the lower encoder.
    pub lower: Permutation,
}

impl BccPermutations {
    pub fn identity(n: usize) -> Self {
        BccPermutations {
            info: Permutation::identity(n),
            upper: Permutation::identity(n),
            lower: Permutation::identity(n),
        }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        BccPermutations {
            info: Permutation::random(n, rng),
            upper: Permutation::random(n, rng),
            lower: Permutation::random(n, rng),
        }
    }

    fn len(&self) -> usize {
        self.info.len()
    }

    fn check(&self, n: usize) -> Result<()> {
        if [&self.info, &self.upper, &self.lower]
            .iter()
            .any(|p| p.len() != n)
        {
            return Err(Error::usage(format!(
                "permutations must all have length {n}"
            )));
        }
        Ok(())
    }
}

pub trait HammingWeight {
    fn weight(&self) -> usize;
}

fn ones(bits: &[u8]) -> usize {
    bits.iter().filter(|&&b| b != 0).count()
}

fn xor_into(acc: &mut [u8], x: &[u8]) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a ^= b;
    }
}

/// One block `(u, v^U, v^L)` of a braided (or parallel concatenated) code.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CodewordTriple {
    pub u: Vec<u8>,
    pub v_upper: Vec<u8>,
    pub v_lower: Vec<u8>,
}

impl CodewordTriple {
    pub fn zero(n: usize) -> Self {
        CodewordTriple {
            u: vec![0; n],
            v_upper: vec![0; n],
            v_lower: vec![0; n],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.weight() == 0
    }

    pub fn input_weight(&self) -> usize {
        ones(&self.u)
    }

    pub fn parity_weight(&self) -> usize {
        ones(&self.v_upper) + ones(&self.v_lower)
    }

    /// Unpack from the variable layout `[u | v^U | v^L]` starting at `base`.
    fn from_mask(mask: u128, base: usize, n: usize) -> Self {
        let bits = |off: usize| -> Vec<u8> {
            (0..n)
                .map(|j| ((mask >> (base + off + j)) & 1) as u8)
                .collect()
        };
        CodewordTriple {
            u: bits(0),
            v_upper: bits(n),
            v_lower: bits(2 * n),
        }
    }
}

impl HammingWeight for CodewordTriple {
    fn weight(&self) -> usize {
        self.input_weight() + self.parity_weight()
    }
}

/// A code sequence `v_1 .. v_L` of the coupled braided code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoupledChain {
    pub perms: BccPermutations,
    pub blocks: Vec<CodewordTriple>,
}

impl CoupledChain {
    pub fn coupling_length(&self) -> usize {
        self.blocks.len()
    }
}

impl HammingWeight for CoupledChain {
    fn weight(&self) -> usize {
        self.blocks.iter().map(HammingWeight::weight).sum()
    }
}

/// How the coupled chain ends after block `L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainBoundary {
    /// `v_t = 0` for `t > L` and the constraints of block `L + 1` are
    /// imposed, so the parities of block `L` must also be absorbed. Every
    /// such sequence folds onto an uncoupled codeword.
    Terminated,
    /// Only the constraints of blocks `1..=L` are imposed.
    Open,
}

/// Does the zero-to-zero path of `trellis` with these labels exist?
pub fn trellis_membership(
    trellis: &TrellisMachine,
    input1: &[u8],
    input2: Option<&[u8]>,
    parity: &[u8],
) -> Result<bool> {
    let n = parity.len();
    if input1.len() != n || input2.is_some_and(|x| x.len() != n) {
        return Err(Error::usage(
            "input and parity sequences must have equal length",
        ));
    }
    if input2.is_some() != (trellis.num_inputs() == 2) {
        return Err(Error::usage(format!(
            "trellis has {} inputs but {} sequences were given",
            trellis.num_inputs(),
            1 + input2.is_some() as usize
        )));
    }
    let mut state = 0;
    for t in 0..n {
        let mut inputs = input1[t] & 1;
        if let Some(x) = input2 {
            inputs |= (x[t] & 1) << 1;
        }
        let b = trellis.branch(state, inputs);
        if b.parity != parity[t] & 1 {
            return Ok(false);
        }
        state = b.to;
    }
    Ok(state == 0)
}

type VarSeq = Vec<Option<usize>>;

fn block(base: usize, n: usize) -> VarSeq {
    (base..base + n).map(Some).collect()
}

/// Append the `N + m` terminated parity checks of one encoder.
fn add_encoder_checks(
    sys: &mut LinearSystem,
    spec: &GeneratorSpec,
    inputs: &[&VarSeq],
    parity: &VarSeq,
) {
    debug_assert_eq!(inputs.len(), spec.num_inputs());
    let n = parity.len();
    let m = spec.memory();
    let q = spec.denominator();
    let toggle = |row: &mut u128, poly_coeff: u8, var: Option<usize>| {
        if poly_coeff == 1 {
            if let Some(v) = var {
                *row ^= 1u128 << v;
            }
        }
    };
    for d in 0..n + m {
        let mut row = 0u128;
        for j in d.saturating_sub(m)..n.min(d + 1) {
            toggle(&mut row, q.coeff(d - j), parity[j]);
            for (k, seq) in inputs.iter().enumerate() {
                toggle(&mut row, spec.numerators()[k].coeff(d - j), seq[j]);
            }
        }
        sys.push(row);
    }
}

fn require_rate(spec: &GeneratorSpec, rate: RateKind, role: &str) -> Result<()> {
    if spec.rate() != rate {
        return Err(Error::usage(format!(
            "{role} encoder {spec} has the wrong rate for this construction"
        )));
    }
    Ok(())
}

fn solve(sys: &LinearSystem) -> Result<Vec<u128>> {
    span(&sys.nullspace_basis())
}

fn uncoupled_bcc_masks(
    gu: &GeneratorSpec,
    gl: &GeneratorSpec,
    perms: &BccPermutations,
    n: usize,
) -> Result<Vec<u128>> {
    require_rate(gu, RateKind::TwoThirds, "upper")?;
    require_rate(gl, RateKind::TwoThirds, "lower")?;
    perms.check(n)?;
    let mut sys = LinearSystem::new(3 * n)?;
    let (u, vu, vl) = (block(0, n), block(n, n), block(2 * n, n));
    add_encoder_checks(&mut sys, gu, &[&u, &perms.upper.apply(&vl)], &vu);
    add_encoder_checks(
        &mut sys,
        gl,
        &[&perms.info.apply(&u), &perms.lower.apply(&vu)],
        &vl,
    );
    solve(&sys)
}

/// All codewords `(u, v^U, v^L)` of the uncoupled braided code:
/// `(u, v^L Π^U, v^U)` is an upper path and `(u Π, v^U Π^L, v^L)` a lower
/// path.
pub fn enumerate_uncoupled_bcc(
    gu: &GeneratorSpec,
    gl: &GeneratorSpec,
    perms: &BccPermutations,
    n: usize,
) -> Result<Vec<CodewordTriple>> {
    Ok(uncoupled_bcc_masks(gu, gl, perms, n)?
        .into_iter()
        .map(|m| CodewordTriple::from_mask(m, 0, n))
        .collect())
}

fn pcc_masks(
    gu: &GeneratorSpec,
    gl: &GeneratorSpec,
    perm: &Permutation,
    n: usize,
) -> Result<Vec<u128>> {
    require_rate(gu, RateKind::Half, "upper")?;
    require_rate(gl, RateKind::Half, "lower")?;
    if perm.len() != n {
        return Err(Error::usage(format!("permutation must have length {n}")));
    }
    let mut sys = LinearSystem::new(3 * n)?;
    let (u, vu, vl) = (block(0, n), block(n, n), block(2 * n, n));
    add_encoder_checks(&mut sys, gu, &[&u], &vu);
    add_encoder_checks(&mut sys, gl, &[&perm.apply(&u)], &vl);
    solve(&sys)
}

/// All codewords of the parallel concatenated code with lower-input
/// permutation `perm`.
pub fn enumerate_pcc(
    gu: &GeneratorSpec,
    gl: &GeneratorSpec,
    perm: &Permutation,
    n: usize,
) -> Result<Vec<CodewordTriple>> {
    Ok(pcc_masks(gu, gl, perm, n)?
        .into_iter()
        .map(|m| CodewordTriple::from_mask(m, 0, n))
        .collect())
}

/// All code sequences of the coupled (coupling memory one) braided code of
/// length `L`: for each `t`, `(u_t, v^L_{t-1} Π^U, v^U_t)` is an upper path
/// and `(u_t Π, v^U_{t-1} Π^L, v^L_t)` a lower path, with `v_0 = 0`.
pub fn enumerate_coupled_bcc(
    gu: &GeneratorSpec,
    gl: &GeneratorSpec,
    perms: &BccPermutations,
    n: usize,
    l: usize,
    boundary: ChainBoundary,
) -> Result<Vec<CoupledChain>> {
    require_rate(gu, RateKind::TwoThirds, "upper")?;
    require_rate(gl, RateKind::TwoThirds, "lower")?;
    perms.check(n)?;
    if l == 0 {
        return Err(Error::usage("coupling length must be >= 1"));
    }
    let mut sys = LinearSystem::new(3 * n * l)?;
    let zeros: VarSeq = vec![None; n];
    let var = |t: usize, off: usize| -> VarSeq {
        // blocks t = 1..=L; anything else is the zero boundary
        if (1..=l).contains(&t) {
            block(3 * n * (t - 1) + off * n, n)
        } else {
            zeros.clone()
        }
    };
    let last = match boundary {
        ChainBoundary::Terminated => l + 1,
        ChainBoundary::Open => l,
    };
    for t in 1..=last {
        let (u, vu, vl) = (var(t, 0), var(t, 1), var(t, 2));
        let (vu_prev, vl_prev) = (var(t - 1, 1), var(t - 1, 2));
        add_encoder_checks(&mut sys, gu, &[&u, &perms.upper.apply(&vl_prev)], &vu);
        add_encoder_checks(
            &mut sys,
            gl,
            &[&perms.info.apply(&u), &perms.lower.apply(&vu_prev)],
            &vl,
        );
    }
    Ok(solve(&sys)?
        .into_iter()
        .map(|mask| CoupledChain {
            perms: perms.clone(),
            blocks: (0..l)
                .map(|t| CodewordTriple::from_mask(mask, 3 * n * t, n))
                .collect(),
        })
        .collect())
}

/// Component-wise GF(2) superposition `(Σ u_t, Σ v^U_t, Σ v^L_t)`.
pub fn fold_chain(chain: &CoupledChain) -> CodewordTriple {
    let n = chain.perms.len();
    let mut out = CodewordTriple::zero(n);
    for b in &chain.blocks {
        xor_into(&mut out.u, &b.u);
        xor_into(&mut out.v_upper, &b.v_upper);
        xor_into(&mut out.v_lower, &b.v_lower);
    }
    out
}

/// Smallest weight of a nonzero member; `None` when only the zero word is
/// present (infinite minimum distance).
pub fn min_distance<T: HammingWeight>(codewords: &[T]) -> Option<usize> {
    codewords
        .iter()
        .map(HammingWeight::weight)
        .filter(|&w| w > 0)
        .min()
}

fn poly_mul_gf2(a: u64, b: u64) -> u64 {
    let mut out = 0;
    for j in 0..64 {
        if (b >> j) & 1 == 1 {
            out ^= a << j;
        }
    }
    out
}

fn poly_to_mask(bits: &[u8]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (j, &b)| acc | ((b as u64) << j))
}

/// Terminated-trellis weight enumerator by exhaustive enumeration of all
/// `2^(kN)` input sequences, keeping those for which `q(D)` divides
/// `Σ_k n_k(D) u_k(D)` (the quotient is the parity sequence).
pub fn exhaustive_terminated_wef(spec: &GeneratorSpec, n: u32) -> Result<WefTable> {
    let k = spec.num_inputs();
    let n_us = n as usize;
    if n == 0 || k * n_us > MAX_EXHAUSTIVE_INPUT_BITS {
        return Err(Error::usage(format!(
            "exhaustive single-encoder enumeration supports 1 <= kN <= {MAX_EXHAUSTIVE_INPUT_BITS}"
        )));
    }
    let q = poly_to_mask(spec.denominator().bits());
    let m = spec.memory();
    let nums: Vec<u64> = spec
        .numerators()
        .iter()
        .map(|p| poly_to_mask(p.bits()))
        .collect();
    let block_mask = (1u64 << n_us) - 1;
    let mut counts: BTreeMap<[u32; 3], BigUint> = BTreeMap::new();
    for word in 0..(1u64 << (k * n_us)) {
        let inputs: Vec<u64> = (0..k).map(|i| (word >> (i * n_us)) & block_mask).collect();
        let mut rem = inputs
            .iter()
            .zip(&nums)
            .fold(0, |acc, (&u, &g)| acc ^ poly_mul_gf2(u, g));
        let mut quotient = 0u64;
        for d in (m..n_us + m).rev() {
            if (rem >> d) & 1 == 1 {
                rem ^= q << (d - m);
                quotient |= 1 << (d - m);
            }
        }
        if rem != 0 {
            continue;
        }
        let e = [
            inputs[0].count_ones(),
            inputs.get(1).map_or(0, |x| x.count_ones()),
            quotient.count_ones(),
        ];
        *counts.entry(e).or_default() += 1u32;
    }
    Ok(WefTable::from_coefficients(
        spec.rate().arity(),
        n,
        UNBOUNDED,
        counts,
    ))
}

fn tally(masks: &[u128], n: usize, counts: &mut BTreeMap<(u32, u32), u64>) {
    let block_mask = (1u128 << n) - 1;
    for &x in masks {
        let i = (x & block_mask).count_ones();
        let p = (x >> n).count_ones();
        *counts.entry((i, p)).or_default() += 1;
    }
}

/// Exact average of the per-code `(i, p)` weight tables over every
/// permutation (PCC) or permutation triple (BCC).
pub fn exhaustive_ensemble_average(
    kind: EnsembleKind,
    gu: &GeneratorSpec,
    gl: &GeneratorSpec,
    n: u32,
) -> Result<EnsembleWef> {
    let limit = match kind {
        EnsembleKind::Pcc => MAX_EXHAUSTIVE_PCC_N,
        EnsembleKind::Bcc => MAX_EXHAUSTIVE_BCC_N,
    };
    if n == 0 || n > limit {
        return Err(Error::usage(format!(
            "exhaustive {kind} averaging supports 1 <= N <= {limit} (PCC: N <= {MAX_EXHAUSTIVE_PCC_N}, BCC: N <= {MAX_EXHAUSTIVE_BCC_N}), got N = {n}"
        )));
    }
    let nu = n as usize;
    let perms = Permutation::all(nu);
    let mut counts: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    let mut codes: u64 = 0;
    match kind {
        EnsembleKind::Pcc => {
            for p in &perms {
                tally(&pcc_masks(gu, gl, p, nu)?, nu, &mut counts);
                codes += 1;
            }
        }
        EnsembleKind::Bcc => {
            for info in &perms {
                for upper in &perms {
                    for lower in &perms {
                        let triple = BccPermutations {
                            info: info.clone(),
                            upper: upper.clone(),
                            lower: lower.clone(),
                        };
                        tally(&uncoupled_bcc_masks(gu, gl, &triple, nu)?, nu, &mut counts);
                        codes += 1;
                    }
                }
            }
        }
    }
    let coefficients = counts
        .into_iter()
        .map(|(ip, c)| (ip, BigRational::new(BigInt::from(c), BigInt::from(codes))))
        .collect();
    Ok(EnsembleWef::new(kind, n, UNBOUNDED, coefficients))
}

/// Outcome of folding every coupled chain for one permutation triple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldingCheck {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub permutations: BccPermutations,
    pub coupled_sequences: usize,
    pub uncoupled_codewords: usize,
    /// Chains whose fold is not an uncoupled codeword.
    pub non_codeword_folds: usize,
    /// Chains whose fold is heavier than the chain.
    pub weight_increases: usize,
    /// `None` means only the zero sequence (infinite distance).
    pub dmin_coupled: Option<usize>,
    pub dmin_uncoupled: Option<usize>,
}

impl FoldingCheck {
    /// `d_min(coupled) >= d_min(uncoupled)`.
    pub fn corollary_holds(&self) -> bool {
        match (self.dmin_coupled, self.dmin_uncoupled) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(c), Some(u)) => c >= u,
        }
    }

    pub fn passed(&self) -> bool {
        self.non_codeword_folds == 0 && self.weight_increases == 0 && self.corollary_holds()
    }
}

/// Fold every terminated coupled chain of length `l` and compare with the
/// uncoupled code built from the same permutations.
pub fn check_folding(
    gu: &GeneratorSpec,
    gl: &GeneratorSpec,
    perms: &BccPermutations,
    n: usize,
    l: usize,
) -> Result<FoldingCheck> {
    let uncoupled = enumerate_uncoupled_bcc(gu, gl, perms, n)?;
    let chains = enumerate_coupled_bcc(gu, gl, perms, n, l, ChainBoundary::Terminated)?;
    let members: BTreeSet<&CodewordTriple> = uncoupled.iter().collect();
    let mut non_codeword_folds = 0;
    let mut weight_increases = 0;
    for c in &chains {
        let folded = fold_chain(c);
        if !members.contains(&folded) {
            non_codeword_folds += 1;
        }
        if folded.weight() > c.weight() {
            weight_increases += 1;
        }
    }
    Ok(FoldingCheck {
        n,
        l,
        permutations: perms.clone(),
        coupled_sequences: chains.len(),
        uncoupled_codewords: uncoupled.len(),
        non_codeword_folds,
        weight_increases,
        dmin_coupled: min_distance(&chains),
        dmin_uncoupled: min_distance(&uncoupled),
    })
}

/// [`check_folding`] for `trials` permutation triples drawn from a
/// ChaCha8 generator seeded with `seed`.
pub fn random_folding_trials(
    gu: &GeneratorSpec,
    gl: &GeneratorSpec,
    n: usize,
    l: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<FoldingCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| {
            let perms = BccPermutations::random(n, &mut rng);
            check_folding(gu, gl, &perms, n, l)
        })
        .collect()
}

/// Arity of the per-code tables produced by the enumerators above.
pub fn component_arity(spec: &GeneratorSpec) -> Arity {
    spec.rate().arity()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trellis::build_trellis;

    fn bcc_gen() -> GeneratorSpec {
        "1,0,1/7;0,1,5/7".parse().unwrap()
    }

    fn pcc_gen() -> GeneratorSpec {
        "1,5/7".parse().unwrap()
    }

    fn is_linear(words: &[CodewordTriple]) -> bool {
        let set: BTreeSet<&CodewordTriple> = words.iter().collect();
        words.iter().all(|a| {
            words.iter().all(|b| {
                let mut s = a.clone();
                xor_into(&mut s.u, &b.u);
                xor_into(&mut s.v_upper, &b.v_upper);
                xor_into(&mut s.v_lower, &b.v_lower);
                set.contains(&s)
            })
        })
    }

    #[test]
    fn permutations() {
        assert_eq!(Permutation::all(4).len(), 24);
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        assert_eq!(p.apply(&['a', 'b', 'c']), vec!['b', 'c', 'a']);
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn membership_basics() {
        let t = build_trellis(&bcc_gen());
        let z = vec![0u8; 6];
        assert!(trellis_membership(&t, &z, Some(&z), &z).unwrap());
        for j in 0..6 {
            let mut p = z.clone();
            p[j] = 1;
            assert!(!trellis_membership(&t, &z, Some(&z), &p).unwrap());
        }
        assert!(trellis_membership(&t, &z, None, &z).is_err());
        assert!(trellis_membership(&t, &z[..5], Some(&z), &z).is_err());
    }

    #[test]
    fn membership_accepts_terminated_encoder_runs() {
        let spec = bcc_gen();
        let t = build_trellis(&spec);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut accepted = 0;
        for _ in 0..200 {
            let n = 8;
            let mut u1: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
            let mut u2: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
            // Drive the register to zero with two tail sections.
            let packed: Vec<u8> = u1.iter().zip(&u2).map(|(a, b)| a | (b << 1)).collect();
            let (_, mut state) = t.encode(&packed);
            for _ in 0..2 {
                let b = (0..4u8)
                    .map(|x| t.branch(state, x))
                    .min_by_key(|b| b.to)
                    .unwrap();
                u1.push(b.input(0));
                u2.push(b.input(1));
                state = b.to;
            }
            let packed: Vec<u8> = u1.iter().zip(&u2).map(|(a, b)| a | (b << 1)).collect();
            let (parity, end) = t.encode(&packed);
            assert_eq!(
                trellis_membership(&t, &u1, Some(&u2), &parity).unwrap(),
                end == 0
            );
            accepted += (end == 0) as usize;
        }
        assert!(accepted > 100);
    }

    #[test]
    fn membership_agrees_with_parity_checks() {
        for spec in [bcc_gen(), pcc_gen()] {
            let t = build_trellis(&spec);
            let n = 5;
            let k = spec.num_inputs();
            let mut sys = LinearSystem::new((k + 1) * n).unwrap();
            let inputs: Vec<VarSeq> = (0..k).map(|i| block(i * n, n)).collect();
            let refs: Vec<&VarSeq> = inputs.iter().collect();
            add_encoder_checks(&mut sys, &spec, &refs, &block(k * n, n));
            for word in 0u128..(1 << ((k + 1) * n)) {
                let bits = |i: usize| -> Vec<u8> {
                    (0..n).map(|j| ((word >> (i * n + j)) & 1) as u8).collect()
                };
                let in2 = (k == 2).then(|| bits(1));
                let member = trellis_membership(&t, &bits(0), in2.as_deref(), &bits(k)).unwrap();
                assert_eq!(member, sys.is_solution(word), "{spec} word {word:b}");
            }
        }
    }

    #[test]
    fn uncoupled_code_is_linear_and_contains_zero() {
        for n in 3..=6 {
            let words =
                enumerate_uncoupled_bcc(&bcc_gen(), &bcc_gen(), &BccPermutations::identity(n), n)
                    .unwrap();
            assert!(words.contains(&CodewordTriple::zero(n)));
            assert!(is_linear(&words));
        }
    }

    #[test]
    fn uncoupled_members_satisfy_both_trellises() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = build_trellis(&bcc_gen());
        for _ in 0..5 {
            let n = 7;
            let perms = BccPermutations::random(n, &mut rng);
            for w in enumerate_uncoupled_bcc(&bcc_gen(), &bcc_gen(), &perms, n).unwrap() {
                let upper_in2 = perms.upper.apply(&w.v_lower);
                assert!(trellis_membership(&t, &w.u, Some(&upper_in2), &w.v_upper).unwrap());
                let lower_in1 = perms.info.apply(&w.u);
                let lower_in2 = perms.lower.apply(&w.v_upper);
                assert!(trellis_membership(&t, &lower_in1, Some(&lower_in2), &w.v_lower).unwrap());
            }
        }
    }

    #[test]
    fn coupled_chains_linear_zero_and_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let perms = BccPermutations::random(3, &mut rng);
            for boundary in [ChainBoundary::Terminated, ChainBoundary::Open] {
                let chains =
                    enumerate_coupled_bcc(&bcc_gen(), &bcc_gen(), &perms, 3, 2, boundary).unwrap();
                assert!(chains[0].blocks.iter().all(CodewordTriple::is_zero));
                assert!(chains.len().is_power_of_two());
                let flat: Vec<CodewordTriple> = chains
                    .iter()
                    .map(|c| CodewordTriple {
                        u: c.blocks.iter().flat_map(|b| b.u.clone()).collect(),
                        v_upper: c.blocks.iter().flat_map(|b| b.v_upper.clone()).collect(),
                        v_lower: c.blocks.iter().flat_map(|b| b.v_lower.clone()).collect(),
                    })
                    .collect();
                assert!(is_linear(&flat));
            }
        }
    }

    #[test]
    fn open_single_block_has_zero_second_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 5;
        let perms = BccPermutations::random(n, &mut rng);
        let chains =
            enumerate_coupled_bcc(&bcc_gen(), &bcc_gen(), &perms, n, 1, ChainBoundary::Open)
                .unwrap();
        // Brute force: (u, 0, v^U) upper path and (u Π, 0, v^L) lower path.
        let t = build_trellis(&bcc_gen());
        let z = vec![0u8; n];
        let mut expected = BTreeSet::new();
        for word in 0u32..(1 << (3 * n)) {
            let w = CodewordTriple::from_mask(word as u128, 0, n);
            if trellis_membership(&t, &w.u, Some(&z), &w.v_upper).unwrap()
                && trellis_membership(&t, &perms.info.apply(&w.u), Some(&z), &w.v_lower).unwrap()
            {
                expected.insert(w);
            }
        }
        let got: BTreeSet<CodewordTriple> =
            chains.into_iter().map(|c| c.blocks[0].clone()).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn fold_basics() {
        let perms = BccPermutations::identity(3);
        let zero = CoupledChain {
            perms: perms.clone(),
            blocks: vec![CodewordTriple::zero(3); 2],
        };
        assert_eq!(fold_chain(&zero), CodewordTriple::zero(3));
        let single = CodewordTriple {
            u: vec![1, 0, 1],
            v_upper: vec![0, 1, 1],
            v_lower: vec![1, 1, 0],
        };
        let chain = CoupledChain {
            perms,
            blocks: vec![
                CodewordTriple::zero(3),
                single.clone(),
                CodewordTriple::zero(3),
            ],
        };
        assert_eq!(fold_chain(&chain), single);
    }

    #[test]
    fn min_distance_flags() {
        assert_eq!(min_distance(&[CodewordTriple::zero(3)]), None);
        let w5 = CodewordTriple {
            u: vec![1, 1, 0],
            v_upper: vec![1, 0, 0],
            v_lower: vec![1, 0, 1],
        };
        assert_eq!(min_distance(&[CodewordTriple::zero(3), w5]), Some(5));
    }

    #[test]
    fn exhaustive_limits() {
        let err =
            exhaustive_ensemble_average(EnsembleKind::Bcc, &bcc_gen(), &bcc_gen(), 5).unwrap_err();
        assert!(err.to_string().contains("N <= 4"));
        assert!(exhaustive_ensemble_average(EnsembleKind::Pcc, &pcc_gen(), &pcc_gen(), 6).is_err());
        assert!(exhaustive_ensemble_average(EnsembleKind::Pcc, &bcc_gen(), &bcc_gen(), 3).is_err());
        assert!(exhaustive_terminated_wef(&bcc_gen(), 13).is_err());
    }

    #[test]
    fn exhaustive_averages_start_at_one() {
        let e = exhaustive_ensemble_average(EnsembleKind::Pcc, &pcc_gen(), &pcc_gen(), 2).unwrap();
        assert_eq!(e.get(0, 0), BigRational::from_integer(1.into()));
        let e = exhaustive_ensemble_average(EnsembleKind::Bcc, &bcc_gen(), &bcc_gen(), 2).unwrap();
        assert_eq!(e.get(0, 0), BigRational::from_integer(1.into()));
    }

    #[test]
    fn two_permutation_pcc_average() {
        // With N = 2 the only nontrivial codewords have input weight 0 or 2,
        // which both permutations map to themselves.
        let g = pcc_gen();
        let id = enumerate_pcc(&g, &g, &Permutation::identity(2), 2).unwrap();
        let sw = enumerate_pcc(&g, &g, &Permutation::new(vec![1, 0]).unwrap(), 2).unwrap();
        let table = |ws: &[CodewordTriple]| -> BTreeMap<(usize, usize), usize> {
            let mut m = BTreeMap::new();
            for w in ws {
                *m.entry((w.input_weight(), w.parity_weight())).or_default() += 1;
            }
            m
        };
        let avg = exhaustive_ensemble_average(EnsembleKind::Pcc, &g, &g, 2).unwrap();
        let expected: BTreeMap<(u32, u32), BigRational> = table(&id)
            .into_iter()
            .map(|((i, p), c)| {
                let other = table(&sw).get(&(i, p)).copied().unwrap_or(0);
                (
                    (i as u32, p as u32),
                    BigRational::new(BigInt::from(c + other), BigInt::from(2)),
                )
            })
            .collect();
        assert_eq!(avg.coefficients(), &expected);
    }
}
