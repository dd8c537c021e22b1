use bcc_wef::bounds::UnionBound;
use bcc_wef::ensemble::{ensemble_wef, EnsembleKind, EnsembleWef};
use bcc_wef::polywef::{terminated_wef, terminated_wef_via_power, UNBOUNDED};
use bcc_wef::trellis::{build_transfer_matrix, build_trellis, TransferMatrix};
use proptest::prelude::*;

const GENERATORS: [&str; 5] = [
    "1,5/7",
    "1,17/13",
    "1,0,1/7;0,1,5/7",
    "1,0,3/7;0,1,5/7",
    "1,0,15/13;0,1,17/13",
];

fn matrix(text: &str) -> TransferMatrix {
    build_transfer_matrix(&build_trellis(&text.parse().unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn truncation_keeps_low_weights_exact(g in 0..GENERATORS.len(), n in 1u32..10, lo in 0u32..12, extra in 1u32..10) {
        let m = matrix(GENERATORS[g]);
        let small = terminated_wef(&m, n, lo).unwrap();
        let large = terminated_wef(&m, n, lo + extra).unwrap();
        let cut = large.truncated(lo);
        prop_assert_eq!(small.coefficients(), cut.coefficients());
    }

    #[test]
    fn kernel_matches_matrix_power(g in 0..GENERATORS.len(), n in 1u32..9, w in 4u32..14) {
        let m = matrix(GENERATORS[g]);
        let forward = terminated_wef(&m, n, w).unwrap();
        let power = terminated_wef_via_power(&m, n, w).unwrap();
        prop_assert_eq!(forward.coefficients(), power.coefficients());
    }

    #[test]
    fn ensemble_truncation_is_exact(bcc in any::<bool>(), n in 2u32..24, lo in 3u32..12) {
        let (kind, text) = if bcc { (EnsembleKind::Bcc, GENERATORS[2]) } else { (EnsembleKind::Pcc, GENERATORS[0]) };
        let g = text.parse().unwrap();
        let small = ensemble_wef(kind, &g, &g, n, lo).unwrap();
        let large = ensemble_wef(kind, &g, &g, n, lo + 8).unwrap();
        let cut = large.truncated(lo);
        prop_assert_eq!(small.coefficients(), cut.coefficients());
    }

    #[test]
    fn dropping_a_term_never_raises_the_bounds(n in 4u32..20, pick in any::<prop::sample::Index>(), snr in 0.0f64..8.0) {
        let g = GENERATORS[2].parse().unwrap();
        let e = ensemble_wef(EnsembleKind::Bcc, &g, &g, n, UNBOUNDED).unwrap();
        let mut coefficients = e.coefficients().clone();
        let key = *pick.get(&coefficients.keys().copied().collect::<Vec<_>>());
        coefficients.remove(&key);
        let reduced = EnsembleWef::new(e.kind(), n, e.w_max(), coefficients);
        let (full, less) = (UnionBound::new(&e, UNBOUNDED), UnionBound::new(&reduced, UNBOUNDED));
        prop_assert!(less.ber(snr) <= full.ber(snr));
        prop_assert!(less.fer(snr) <= full.fer(snr));
    }
}
