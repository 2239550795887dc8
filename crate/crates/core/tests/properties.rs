mod common;

use common::rel_diff;
use ctmc_boltz::analysis::is_constant;
use ctmc_boltz::io::{parse_chain_file, write_chain_file, Chain};
use ctmc_boltz::rng::Stream;
use ctmc_boltz::stationary::pi_from_psi;
use ctmc_boltz::{
    check_irreducible, correlation_stats, cycle_force, lifted_cyclic_chain, predicted_rho,
    random_heavy_tail_chain, random_iid_chain, rho_lower_bound, stationary_ctmc, stationary_dtmc,
    stationary_via_jump, Cycle, ExitRates, RateMatrix, SquareMatrix,
};
use proptest::prelude::*;

/// Ring `i -> i+1` guarantees irreducibility; other edges appear with
/// probability one half. Rates span four decades.
fn sparse_chain(n: usize, seed: u64) -> RateMatrix {
    let mut s = Stream::new(seed, u64::MAX);
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let on_ring = j == (i + 1) % n;
            if on_ring || s.uniform() < 0.5 {
                m.set(i, j, 10f64.powf(-2.0 + 4.0 * s.uniform()));
            }
        }
    }
    RateMatrix::new(m).unwrap()
}

fn chain_of(kind: u8, n: usize, seed: u64) -> RateMatrix {
    match kind {
        0 => random_iid_chain(n, 1.0, 2.0, seed).unwrap(),
        1 => random_heavy_tail_chain(n, 3.0, seed).unwrap(),
        _ => sparse_chain(n, seed),
    }
}

fn any_chain() -> impl Strategy<Value = RateMatrix> {
    (0u8..3, 2usize..=50, any::<u64>()).prop_map(|(k, n, s)| chain_of(k, n, s))
}

/// Chains whose exit rates are not all equal, so the statistics exist.
fn analyzable_chain() -> impl Strategy<Value = RateMatrix> {
    (0u8..3, 3usize..=50, any::<u64>())
        .prop_map(|(k, n, s)| chain_of(k, n, s))
        .prop_filter("constant exit rates", |m| !is_constant(m.exit_rates()))
}

fn power_of_two() -> impl Strategy<Value = f64> {
    (-20i32..=20).prop_map(|e| 2f64.powi(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn direct_and_jump_routes_agree(m in any_chain()) {
        let a = stationary_ctmc(&m).unwrap();
        let b = stationary_via_jump(&m).unwrap();
        prop_assert!(a.max_abs_diff(&b) <= 1e-8, "diff {}", a.max_abs_diff(&b));
        prop_assert!((a.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(a.probs().iter().all(|&p| p > 0.0));
    }

    #[test]
    fn correlation_identity_holds(m in analyzable_chain()) {
        let r = correlation_stats(&m).unwrap();
        let want = predicted_rho(r.rho_tilde, r.r()).unwrap();
        prop_assert!((r.rho - want).abs() <= 1e-8, "rho {} vs {}", r.rho, want);
    }

    #[test]
    fn slope_and_error_closed_forms(m in analyzable_chain()) {
        let r = correlation_stats(&m).unwrap();
        prop_assert!(rel_diff(r.fit.slope, r.m_star) <= 1e-8 || (r.fit.slope - r.m_star).abs() <= 1e-12);
        let e1 = r.error_from_rho();
        let e2 = r.error_from_rho_tilde();
        let tol = 1e-8 * r.error_e.abs().max(1e-12 * r.var_log_pi);
        prop_assert!((r.error_e - e1).abs() <= tol.max(1e-14), "{} vs {}", r.error_e, e1);
        prop_assert!((r.error_e - e2).abs() <= tol.max(1e-14), "{} vs {}", r.error_e, e2);
        prop_assert!((r.fit.error - r.error_e).abs() <= tol.max(1e-14));
    }

    #[test]
    fn certificate_bounds_hold(m in analyzable_chain()) {
        let c = correlation_stats(&m).unwrap().certificate;
        prop_assert!(c.k_observed <= c.k_bound * (1.0 + 1e-12));
        prop_assert!(c.pairwise_ratio <= c.pairwise_bound * (1.0 + 1e-12));
        prop_assert!(c.k_observed >= 1.0);
    }

    #[test]
    fn rho_respects_lower_bound(m in analyzable_chain()) {
        let r = correlation_stats(&m).unwrap();
        if r.r() < 1.0 {
            prop_assert!(r.rho >= rho_lower_bound(r.r()).unwrap() - 1e-12);
        }
    }

    #[test]
    fn statistics_invariant_under_time_rescaling(m in analyzable_chain(), e in -8.0f64..8.0) {
        let c = 2f64.powf(e);
        let a = correlation_stats(&m).unwrap();
        let b = correlation_stats(&m.scaled(c).unwrap()).unwrap();
        prop_assert!((a.rho - b.rho).abs() <= 1e-10);
        prop_assert!((a.rho_tilde - b.rho_tilde).abs() <= 1e-10);
        prop_assert!((a.m_star - b.m_star).abs() <= 1e-10);
        prop_assert!(rel_diff(a.k_observed(), b.k_observed()) <= 1e-10);
        prop_assert!(rel_diff(a.r2, b.r2) <= 1e-10 || (a.r2 - b.r2).abs() <= 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn pi_scale_invariant(m in any_chain(), c in 1e-3f64..1e3) {
        let a = stationary_ctmc(&m).unwrap();
        let b = stationary_ctmc(&m.scaled(c).unwrap()).unwrap();
        prop_assert!(a.max_abs_diff(&b) <= 1e-12, "diff {}", a.max_abs_diff(&b));
    }

    #[test]
    fn jump_chain_exact_under_power_of_two_scaling(m in any_chain(), c in power_of_two()) {
        let a = m.jump_chain();
        let b = m.scaled(c).unwrap().jump_chain();
        prop_assert_eq!(a.probs().to_rows(), b.probs().to_rows());
        let pa = stationary_dtmc(&a).unwrap();
        let pb = stationary_dtmc(&b).unwrap();
        prop_assert_eq!(pa.probs(), pb.probs());
    }

    #[test]
    fn psi_nearly_invariant_under_general_scaling(m in any_chain(), c in 1e-3f64..1e3) {
        let a = stationary_dtmc(&m.jump_chain()).unwrap();
        let b = stationary_dtmc(&m.scaled(c).unwrap().jump_chain()).unwrap();
        prop_assert!(a.max_abs_diff(&b) <= 1e-12);
    }

    #[test]
    fn lift_round_trip(m in any_chain()) {
        let back = m.jump_chain().lift(m.exit_rates()).unwrap();
        for i in 0..m.n() {
            for j in 0..m.n() {
                let (a, b) = (m.rate(i, j), back.rate(i, j));
                prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(b.abs()), "{} vs {}", a, b);
            }
        }
    }

    #[test]
    fn jump_rows_are_stochastic(m in any_chain()) {
        let p = m.jump_chain();
        for i in 0..p.n() {
            let s: f64 = (0..p.n()).map(|j| p.prob(i, j)).sum();
            prop_assert!((s - 1.0).abs() <= 1e-12);
            prop_assert_eq!(p.prob(i, i), 0.0);
        }
    }

    #[test]
    fn pi_from_psi_matches_direct(m in any_chain()) {
        let psi = stationary_dtmc(&m.jump_chain()).unwrap();
        let pi = pi_from_psi(&psi, m.exit_rates()).unwrap();
        prop_assert!(pi.max_abs_diff(&stationary_ctmc(&m).unwrap()) <= 1e-8);
    }

    #[test]
    fn components_unchanged_by_row_rescaling(
        n in 2usize..=20,
        seed in any::<u64>(),
        density in 0.05f64..0.6,
        factors in prop::collection::vec(1e-3f64..1e3, 20),
    ) {
        let mut s = Stream::new(seed, 0);
        let mut a = SquareMatrix::zeros(n);
        let mut b = SquareMatrix::zeros(n);
        for (i, f) in factors.iter().take(n).enumerate() {
            for j in 0..n {
                if i != j && s.uniform() < density {
                    let v = 1.0 + s.uniform();
                    a.set(i, j, v);
                    b.set(i, j, v * f);
                }
            }
        }
        prop_assert_eq!(check_irreducible(&a), check_irreducible(&b));
    }

    #[test]
    fn random_generators_are_irreducible(n in 2usize..=60, seed in any::<u64>(), w in 0.1f64..5.0) {
        let a = random_iid_chain(n, 0.5, 3.0, seed).unwrap();
        let b = random_heavy_tail_chain(n, w, seed).unwrap();
        prop_assert!(a.irreducibility().strongly_connected);
        prop_assert!(b.irreducibility().strongly_connected);
    }

    #[test]
    fn generators_are_deterministic(n in 2usize..=30, seed in any::<u64>()) {
        let a = random_iid_chain(n, 1.0, 2.0, seed).unwrap();
        let b = random_iid_chain(n, 1.0, 2.0, seed).unwrap();
        prop_assert_eq!(a.rates(), b.rates());
        let a = random_heavy_tail_chain(n, 3.0, seed).unwrap();
        let b = random_heavy_tail_chain(n, 3.0, seed).unwrap();
        prop_assert_eq!(a.rates(), b.rates());
    }

    #[test]
    fn two_state_closed_form(a in 1e-6f64..1e6, b in 1e-6f64..1e6) {
        let m = RateMatrix::from_rows(&[[0.0, a], [b, 0.0]]).unwrap();
        let pi = stationary_ctmc(&m).unwrap();
        prop_assert!((pi[0] - b / (a + b)).abs() <= 1e-12);
        prop_assert!((pi[1] - a / (a + b)).abs() <= 1e-12);
    }

    #[test]
    fn cycle_force_symmetries(m in any_chain(), seed in any::<u64>(), k in 0usize..50) {
        prop_assume!(m.n() >= 3);
        let mut s = Stream::new(seed, 1);
        let states = common::random_cycle(m.n(), &mut s);
        let c = Cycle::new(states.clone(), m.n()).unwrap();
        let f = match cycle_force(&m, &c) {
            Ok(f) => f,
            Err(_) => return Ok(()), // cycle uses a missing edge of a sparse chain
        };
        let scale = 1.0f64.max(f.abs());
        prop_assert!((cycle_force(&m, &c.reversed()).unwrap() + f).abs() <= 1e-12 * scale);
        prop_assert!((cycle_force(&m, &c.rotated(k)).unwrap() - f).abs() <= 1e-12 * scale);
        prop_assert!((cycle_force(&m.jump_chain(), &c).unwrap() - f).abs() <= 1e-12 * scale);
        let oracle = common::oracle_cycle_force(|i, j| m.rate(i, j), &states);
        prop_assert!((oracle - f).abs() <= 1e-10 * scale);
    }

    #[test]
    fn reversible_chains_have_zero_force(n in 3usize..=20, seed in any::<u64>()) {
        // q_ij = s_ij / pi_i with s symmetric satisfies detailed balance for pi
        let mut st = Stream::new(seed, 2);
        let pi: Vec<f64> = (0..n).map(|_| 0.1 + st.uniform()).collect();
        let mut m = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in (i + 1)..n {
                let s = 0.1 + st.uniform();
                m.set(i, j, s / pi[i]);
                m.set(j, i, s / pi[j]);
            }
        }
        let m = RateMatrix::new(m).unwrap();
        prop_assert!(ctmc_boltz::is_detailed_balanced(&m, 1e-10).unwrap());
        let states = common::random_cycle(n, &mut st);
        let c = Cycle::new(states, n).unwrap();
        prop_assert!(cycle_force(&m, &c).unwrap().abs() <= 1e-12);
        let total: f64 = pi.iter().sum();
        let got = stationary_ctmc(&m).unwrap();
        for i in 0..n {
            prop_assert!((got[i] - pi[i] / total).abs() <= 1e-10);
        }
    }

    #[test]
    fn lifted_cyclic_is_exactly_boltzmann(n in 3usize..=24, rates in prop::collection::vec(1e-2f64..1e2, 24)) {
        let q = rates[..n].to_vec();
        prop_assume!(!is_constant(&q));
        let m = lifted_cyclic_chain(n, &ExitRates::List(q.clone()), true).unwrap();
        let r = correlation_stats(&m).unwrap();
        prop_assert!((r.rho - 1.0).abs() <= 1e-9);
        prop_assert!((r.k_observed() - 1.0).abs() <= 1e-9);
        let z: f64 = q.iter().map(|v| 1.0 / v).sum();
        let pi = stationary_ctmc(&m).unwrap();
        for i in 0..n {
            prop_assert!((pi[i] - 1.0 / (q[i] * z)).abs() <= 1e-10);
        }
    }

    #[test]
    fn chain_file_round_trip(m in any_chain()) {
        let text = write_chain_file(&Chain::Ctmc(m.clone()));
        let back = match parse_chain_file(&text).unwrap() {
            Chain::Ctmc(b) => b,
            Chain::Dtmc(_) => panic!("wrong kind"),
        };
        for i in 0..m.n() {
            for j in 0..m.n() {
                prop_assert!(rel_diff(m.rate(i, j), back.rate(i, j)) <= 5e-12);
            }
        }
        prop_assert_eq!(write_chain_file(&Chain::Ctmc(back)), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn predicted_rho_stays_in_range(rt in -1.0f64..=1.0, r in 0.0f64..1e4) {
        prop_assume!(!((r - 1.0).abs() < 1e-6 && (rt + 1.0).abs() < 1e-6));
        let rho = predicted_rho(rt, r).unwrap();
        prop_assert!((-1.0..=1.0).contains(&rho));
        if r < 1.0 {
            prop_assert!(rho >= rho_lower_bound(r).unwrap() - 1e-12);
        }
    }
}
