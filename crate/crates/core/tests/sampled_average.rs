//! The BCC ensemble average at a size too large for exhaustive averaging,
//! checked against the mean over sampled permutation triples.

use std::collections::BTreeMap;

use bcc_wef::ensemble::{ensemble_wef, EnsembleKind};
use bcc_wef::oracle::{enumerate_uncoupled_bcc, BccPermutations, HammingWeight};
use bcc_wef::polywef::UNBOUNDED;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn bcc_average_matches_sampled_mean() {
    let g = "1,0,1/7;0,1,5/7".parse().unwrap();
    let n = 7;
    let trials = 3000;
    let spectrum = ensemble_wef(EnsembleKind::Bcc, &g, &g, n as u32, UNBOUNDED)
        .unwrap()
        .total_weight();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    // per weight: (sum, sum of squares) of per-code counts
    let mut moments: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
    for _ in 0..trials {
        let perms = BccPermutations::random(n, &mut rng);
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for w in enumerate_uncoupled_bcc(&g, &g, &perms, n).unwrap() {
            *counts.entry(w.weight()).or_default() += 1.0;
        }
        for (w, c) in counts {
            let m = moments.entry(w).or_default();
            m.0 += c;
            m.1 += c * c;
        }
    }
    for w in 1..=3 * n as u32 {
        let exact = spectrum.get(w).to_f64().unwrap();
        let (s, s2) = moments.get(&(w as usize)).copied().unwrap_or_default();
        let mean = s / trials as f64;
        let var = (s2 / trials as f64 - mean * mean).max(0.0);
        // 3/trials covers weights too rare to show up in the sample
        let tol = 5.0 * (var / trials as f64).sqrt() + 3.0 / trials as f64;
        assert!(
            (mean - exact).abs() <= tol,
            "w={w}: formula {exact} vs sampled {mean} ± {tol}"
        );
    }
}
