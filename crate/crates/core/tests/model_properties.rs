use jasa_core::channel::{truncated_inversion, ChannelRealization};
use jasa_core::model::{
    approx_rlep, capacity, cluster_size, exact_rlep, subchannels_needed, Scenario,
};
use proptest::prelude::*;

fn brute_force_rlep(e: f64, size: usize) -> f64 {
    (0u32..1 << size)
        .filter(|p| p.count_ones() as usize > size / 2)
        .map(|p| {
            let wrong = p.count_ones() as i32;
            e.powi(wrong) * (1.0 - e).powi(size as i32 - wrong)
        })
        .sum()
}

#[test]
fn exact_rlep_matches_vote_enumeration() {
    for size in (1..=11).step_by(2) {
        for i in 0..=100 {
            let e = i as f64 / 100.0;
            let got = exact_rlep(e, size).unwrap();
            let want = brute_force_rlep(e, size);
            assert!(
                (got - want).abs() < 1e-12,
                "e={e} size={size}: {got} vs {want}"
            );
        }
    }
}

proptest! {
    #[test]
    fn cluster_size_is_minimal(e in 0.001f64..0.499, theta in 0.001f64..0.999) {
        let k = cluster_size(e, theta).unwrap();
        prop_assert!(approx_rlep(e, k).unwrap() <= theta * (1.0 + 1e-9));
        if k > 1 {
            prop_assert!(approx_rlep(e, k - 1).unwrap() > theta * (1.0 - 1e-9));
        }
    }

    #[test]
    fn stirling_bound_dominates(e in 0.0f64..0.5, half in 0usize..8) {
        let size = 2 * half + 1;
        prop_assert!(exact_rlep(e, size).unwrap() <= approx_rlep(e, size).unwrap() + 1e-15);
    }

    #[test]
    fn exact_rlep_monotone(e1 in 0.0f64..0.5, e2 in 0.0f64..0.5, half in 0usize..7) {
        let size = 2 * half + 1;
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(exact_rlep(lo, size).unwrap() <= exact_rlep(hi, size).unwrap() + 1e-15);
        prop_assert!(exact_rlep(hi, size + 2).unwrap() <= exact_rlep(hi, size).unwrap() + 1e-15);
    }

    #[test]
    fn subchannel_count_is_minimal(rate in 0.01f64..1.0, gamma in 0.001f64..50.0, bits in 1u32..40) {
        let mut s = Scenario::<f64>::reference(1, 1, 10);
        s.object_bits = bits;
        let l = subchannels_needed(rate, &s, gamma).unwrap();
        let payload = rate * bits as f64;
        prop_assert!(capacity(l, &s, gamma) >= payload * (1.0 - 1e-9));
        if l > 1 {
            prop_assert!(capacity(l - 1, &s, gamma) < payload);
        }
    }

    #[test]
    fn subchannel_count_monotone(
        r1 in 0.01f64..1.0, r2 in 0.01f64..1.0,
        g1 in 0.001f64..50.0, g2 in 0.001f64..50.0,
    ) {
        let s = Scenario::<f64>::reference(1, 1, 10);
        let (rlo, rhi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let (glo, ghi) = if g1 <= g2 { (g1, g2) } else { (g2, g1) };
        prop_assert!(subchannels_needed(rlo, &s, glo).unwrap() <= subchannels_needed(rhi, &s, glo).unwrap());
        prop_assert!(subchannels_needed(rlo, &s, ghi).unwrap() <= subchannels_needed(rlo, &s, glo).unwrap());
    }

    #[test]
    fn inversion_equalizes_and_is_monotone(
        seed in any::<u64>(), k in 1usize..30,
        g0 in 0.05f64..5.0, g1 in 0.05f64..5.0,
        p0 in 0.5f64..40.0, p1 in 0.5f64..40.0,
        noise in 0.2f64..3.0,
    ) {
        let ch = ChannelRealization::<f64>::draw_rayleigh(k, seed).with_power(noise, 1.0).unwrap();
        let tci = truncated_inversion(&ch, g0, p0).unwrap();
        for i in 0..tci.available {
            let snr = ch.gains()[i] * tci.powers[i] / noise;
            prop_assert!((snr - g0).abs() <= 1e-12 * g0);
        }
        prop_assert!(tci.powers[tci.available..].iter().all(|&p| p == 0.0));
        prop_assert!(tci.used_power() <= p0);
        if tci.available < k {
            let next = g0 * noise / ch.gains()[tci.available];
            prop_assert!(tci.used_power() + next > p0);
        }

        let (glo, ghi) = if g0 <= g1 { (g0, g1) } else { (g1, g0) };
        let (plo, phi) = if p0 <= p1 { (p0, p1) } else { (p1, p0) };
        let at = |g, p| truncated_inversion(&ch, g, p).unwrap().available;
        prop_assert!(at(ghi, plo) <= at(glo, plo));
        prop_assert!(at(glo, plo) <= at(glo, phi));
    }

    #[test]
    fn sorting_is_a_permutation(gains in prop::collection::vec(0.001f64..10.0, 0..20)) {
        let ch = ChannelRealization::from_gains(gains.clone(), 1.0, 1.0).unwrap();
        let mut seen = ch.order().to_vec();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..gains.len()).collect::<Vec<_>>());
        for (i, &orig) in ch.order().iter().enumerate() {
            prop_assert_eq!(ch.gains()[i], gains[orig]);
        }
        prop_assert!(ch.gains().windows(2).all(|w| w[0] >= w[1]));
    }
}
