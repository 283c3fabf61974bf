use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use flaglab::dynamics::{equivariance_defect, hausdorff_distance, sample_limit_set_cartan, sample_limit_set_fixed_points};
use flaglab::flag::{flag_distance_alpha, FlagPoint, FlagType};
use flaglab::holder::self_joining_obstruction;
use flaglab::matlin::exterior_power;
use flaglab::presets::{random_rotation, random_sl, schottky_sl2, schottky_sl2_power, schottky_sl3};
use flaglab::weyl::{cartan_projection, jordan_projection_word};
use flaglab::words::{enumerate_words, random_word, reduced_word_count, Word, WORD_CAP};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn nonempty_word(rank: usize, len: usize, seed: u64) -> Word {
    random_word(rank, len.max(1), &mut rng(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cartan_projection_is_bi_invariant(d in 2usize..6, seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_sl(d, &mut r);
        let (k1, k2) = (random_rotation(d, &mut r), random_rotation(d, &mut r));
        let mu = cartan_projection(&g).unwrap();
        let mu2 = cartan_projection(&(&k1 * &g * &k2)).unwrap();
        prop_assert!(mu.max_abs_diff(&mu2) < 1e-10);
    }

    #[test]
    fn cartan_projection_moves_by_at_most_the_factor(d in 2usize..6, seed in any::<u64>()) {
        let mut r = rng(seed);
        let (g, h) = (random_sl(d, &mut r), random_sl(d, &mut r));
        let mu_g = cartan_projection(&g).unwrap();
        let mu_h = cartan_projection(&h).unwrap();
        let mu_gh = cartan_projection(&(&g * &h)).unwrap();
        let bound = mu_h.coords()[0].max(-mu_h.coords()[d - 1]);
        prop_assert!(mu_gh.max_abs_diff(&mu_g) <= bound + 1e-10);
        prop_assert!(mu_gh.coords()[0] <= mu_g.coords()[0] + mu_h.coords()[0] + 1e-10);
    }

    #[test]
    fn flag_distance_triangle_inequality(d in 3usize..6, k in 1usize..3, seed in any::<u64>()) {
        let mut r = rng(seed);
        let ty = FlagType::single(d, k).unwrap();
        let pts: Vec<FlagPoint<f64>> =
            (0..3).map(|_| FlagPoint::from_frame(ty.clone(), &random_sl(d, &mut r).columns(0, k).into_owned()).unwrap()).collect();
        let dist = |i: usize, j: usize| flag_distance_alpha(&pts[i], &pts[j], k).unwrap();
        prop_assert!(dist(0, 2) <= dist(0, 1) + dist(1, 2) + 1e-12);
        prop_assert!((dist(0, 1) - dist(1, 0)).abs() < 1e-12);
        prop_assert!(dist(0, 0) < 1e-7);
    }

    #[test]
    fn exterior_power_is_multiplicative(d in 2usize..6, seed in any::<u64>()) {
        let mut r = rng(seed);
        let (g, h) = (random_sl(d, &mut r), random_sl(d, &mut r));
        for k in 1..d {
            let lhs = exterior_power(&(&g * &h), k).unwrap();
            let rhs = exterior_power(&g, k).unwrap() * exterior_power(&h, k).unwrap();
            prop_assert!((lhs - &rhs).amax() <= 1e-9 * rhs.amax().max(1.0));
        }
    }

    #[test]
    fn jordan_projection_scales_under_powers(len in 1usize..6, n in 2i64..5, seed in any::<u64>()) {
        let g = schottky_sl3(7).unwrap();
        let w = nonempty_word(2, len, seed);
        let l1 = jordan_projection_word(g.generators(), &w).unwrap();
        let ln = jordan_projection_word(g.generators(), &w.pow(n)).unwrap();
        prop_assert!(ln.max_abs_diff(&l1.scaled(n as f64)) < 1e-8 * (1.0 + ln.norm()));
    }

    #[test]
    fn jordan_projection_is_conjugation_invariant(len in 1usize..6, vlen in 1usize..4, seed in any::<u64>()) {
        let g = schottky_sl3(7).unwrap();
        let w = nonempty_word(2, len, seed);
        let v = nonempty_word(2, vlen, seed ^ 0x9e37_79b9);
        let a = jordan_projection_word(g.generators(), &w).unwrap();
        let b = jordan_projection_word(g.generators(), &w.conjugate_by(&v)).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-8 * (1.0 + a.norm()));
    }

    #[test]
    fn attracting_flags_are_equivariant(len in 2usize..6, vlen in 1usize..3, seed in any::<u64>()) {
        let g = schottky_sl3(7).unwrap();
        let w = nonempty_word(2, len, seed);
        let v = nonempty_word(2, vlen, seed.wrapping_add(1));
        let defect = equivariance_defect(&g, &w, &v, &FlagType::full(3)).unwrap();
        prop_assert!(defect < 1e-8, "defect {defect:e} for {} by {}", g.format(&w), g.format(&v));
    }

    #[test]
    fn obstruction_is_conjugation_invariant(seed in any::<u64>()) {
        let g1 = schottky_sl2(3.0).unwrap();
        let g2 = schottky_sl2_power(3.0, 3).unwrap();
        let p = random_sl(2, &mut rng(seed));
        let p_inv = p.clone().try_inverse().unwrap();
        let g2c = g2.map("conjugate", |m| &p * m * &p_inv).unwrap();
        let a = self_joining_obstruction(&g1, &g2, 1.0, &[], 4).unwrap();
        let b = self_joining_obstruction(&g1, &g2c, 1.0, &[], 4).unwrap();
        prop_assert!((a.discrepancy - b.discrepancy).abs() < 1e-8 * a.discrepancy.max(1.0));
        prop_assert!((a.ratio_spread - b.ratio_spread).abs() < 1e-8);
    }
}

#[test]
fn reduced_word_counts_match_enumeration() {
    for rank in 1..=3 {
        for len in 1..=5 {
            let closed: u64 = (1..=len as u32).map(|l| 2 * rank as u64 * (2 * rank as u64 - 1).pow(l - 1)).sum();
            assert_eq!(reduced_word_count(rank, len), closed);
            let words = enumerate_words(rank, len, WORD_CAP).unwrap();
            assert_eq!(words.len() as u64, closed);
            assert!(words.iter().all(|w| w.is_reduced() && !w.is_empty()));
        }
    }
}

#[test]
fn enumeration_respects_the_cap() {
    assert!(enumerate_words(2, 12, 1000).is_err());
}

#[test]
fn fixed_point_and_cartan_samplings_agree() {
    let g = schottky_sl2(3.0).unwrap();
    let ty = FlagType::single(2, 1).unwrap();
    let a = sample_limit_set_fixed_points(&g, &ty, 7).unwrap();
    let b = sample_limit_set_cartan(&g, &ty, 7, 0.0).unwrap();
    assert!(hausdorff_distance(&a, &b).unwrap() < 1e-2);
}

#[test]
fn diagonal_contraction_matches_closed_form() {
    // v_n ∝ (4ⁿ, 1, 4⁻ⁿ), so d(v_n, e₁)² = (1 + 16⁻ⁿ)/(16ⁿ + 1 + 16⁻ⁿ)
    let g = DMatrix::from_diagonal(&DVector::from_row_slice(&[4.0, 1.0, 0.25]));
    let xi = FlagPoint::line(DVector::from_row_slice(&[1.0, 1.0, 1.0])).unwrap();
    let k = flaglab::weyl::RootLabel::new(1, 3).unwrap();
    let r = flaglab::dynamics::contraction_experiment(&g, &xi, k, 40).unwrap();
    for &(n, dist) in &r.samples {
        let x = 16f64.powi(n as i32);
        let exact = ((1.0 + 1.0 / x) / (x + 1.0 + 1.0 / x)).sqrt();
        assert!((dist - exact).abs() <= 1e-10 * exact + 1e-16, "n = {n}: {dist:e} vs {exact:e}");
    }
}
