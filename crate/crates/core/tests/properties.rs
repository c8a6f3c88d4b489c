//! Property tests for the structural invariants.

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qsamp_core::chain::{discriminant, interpolate, random_walk_chain, MarkovChain};
use qsamp_core::families::{gen_family, Family, FamilySpec};
use qsamp_core::graph::{from_edge_list, Graph};
use qsamp_core::qff::{chebyshev_weights, make_plan, qff_residual};
use qsamp_core::reflect::Reflection;
use qsamp_core::report::{emit_trial, parse_trial, round12, Format};
use qsamp_core::sampler::amplify::{amplified, rounds_for};
use qsamp_core::sampler::{
    apply_u_main, binary_search_pig, interpolation_parameter, success_projection, Event, IdealComparator,
    SuccessProjector, TrialKind, TrialReport, Verdict,
};
use qsamp_core::spectral::{hitting_time_oracle, hitting_time_spectral, hitting_times_all, sym_eig, sym_eig_matrix};
use qsamp_core::walkspace::{apply_swap, RegisterLayout, StateVector, Walk};

/// Connected weighted graph: a path backbone plus optional extra edges.
fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (
            Just(n),
            prop::collection::vec(0.1f64..2.0, n - 1),
            prop::collection::vec(prop::option::weighted(0.4, 0.1f64..2.0), pairs),
        )
            .prop_map(|(n, path, extra)| {
                let mut edges: Vec<(usize, usize, f64)> = (0..n - 1).map(|i| (i, i + 1, path[i])).collect();
                let mut k = 0;
                for u in 0..n {
                    for v in u + 1..n {
                        if v > u + 1 {
                            if let Some(w) = extra[k] {
                                edges.push((u, v, w));
                            }
                        }
                        k += 1;
                    }
                }
                Graph::with_weights(n, &edges).unwrap()
            })
    })
}

fn chain_strategy(max_n: usize) -> impl Strategy<Value = MarkovChain> {
    (graph_strategy(max_n), any::<bool>()).prop_map(|(g, lazy)| random_walk_chain(&g, lazy).unwrap())
}

fn unit(v: &[f64]) -> Option<Vec<f64>> {
    let nrm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    (nrm > 1e-3).then(|| v.iter().map(|a| a / nrm).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chains_are_stochastic_reversible_and_stationary(c in chain_strategy(10)) {
        let n = c.n();
        let p = c.p();
        let pi = c.pi();
        for x in 0..n {
            prop_assert!((p.row(x).sum() - 1.0).abs() < 1e-12);
            let flow: f64 = (0..n).map(|y| pi[y] * p[(y, x)]).sum();
            prop_assert!((flow - pi[x]).abs() < 1e-12);
            for y in 0..n {
                prop_assert!((pi[x] * p[(x, y)] - pi[y] * p[(y, x)]).abs() < 1e-12);
            }
        }
        prop_assert!(c.is_reversible());
    }

    #[test]
    fn discriminant_fixes_sqrt_pi_and_lazy_spectrum_is_nonnegative(c in chain_strategy(10)) {
        let d = discriminant(&c).into_matrix();
        let sp = c.sqrt_pi();
        prop_assert!((&d * &sp - &sp).amax() < 1e-12);
        let lazy = c.lazy();
        let spec = sym_eig(&discriminant(&lazy)).unwrap();
        prop_assert!(spec.eigenvalues().iter().all(|&l| l > -1e-12 && l < 1.0 + 1e-12));
    }

    #[test]
    fn eigensolver_reconstructs(entries in prop::collection::vec(-1.0f64..1.0, 1..=64)) {
        let n = (entries.len() as f64).sqrt() as usize;
        let a = DMatrix::from_fn(n, n, |i, j| entries[i.min(j) * n + i.max(j)]);
        let spec = sym_eig_matrix(&a).unwrap();
        prop_assert!((spec.reconstruct() - &a).amax() <= 1e-9);
        let v = spec.eigenvectors();
        prop_assert!((v.transpose() * v - DMatrix::identity(n, n)).amax() < 1e-9);
        prop_assert!(spec.eigenvalues().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn hitting_time_routes_agree(c in chain_strategy(12), pick in any::<prop::sample::Index>()) {
        let g = pick.index(c.n());
        let a = hitting_time_spectral(&c, &[g]).unwrap();
        let b = hitting_time_oracle(&c, &[g]).unwrap();
        let all = hitting_times_all(&c).unwrap();
        prop_assert!((a - b).abs() <= 1e-8 * b);
        prop_assert!((all[g] - b).abs() <= 1e-8 * b);
        // Every start off g needs at least one step.
        prop_assert!(b >= 1.0 - 1e-9);
    }

    #[test]
    fn interpolated_chain_keeps_reversibility(c in chain_strategy(8), pick in any::<prop::sample::Index>(), s in 0.0f64..1.0) {
        let g = pick.index(c.n());
        let ic = interpolate(&c, &[g], s).unwrap();
        let ps = ic.ps();
        let pi = ic.pi();
        for x in 0..c.n() {
            prop_assert!((ps.row(x).sum() - 1.0).abs() < 1e-12);
            for y in 0..c.n() {
                prop_assert!((pi[x] * ps[(x, y)] - pi[y] * ps[(y, x)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn walk_is_unitary_and_swap_is_an_involution(
        c in chain_strategy(6),
        amps in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 36),
        steps in 1usize..4,
    ) {
        let n = c.n();
        let layout = RegisterLayout::new(n, 0, 0).unwrap();
        let raw: Vec<Complex64> = amps.iter().take(layout.dim()).map(|&(r, i)| Complex64::new(r, i)).collect();
        let mut psi = StateVector::from_amplitudes(layout, raw).unwrap();
        prop_assume!(psi.norm() > 1e-3);
        psi.normalize().unwrap();
        let start = psi.clone();
        let walk = Walk::new(&c);
        walk.apply(&mut psi, steps, false).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
        walk.apply(&mut psi, steps, true).unwrap();
        prop_assert!(psi.distance(&start).unwrap() < 1e-10);
        let mut swapped = start.clone();
        apply_swap(&mut swapped);
        apply_swap(&mut swapped);
        prop_assert!(swapped.distance(&start).unwrap() < 1e-15);
    }

    #[test]
    fn chebyshev_weights_form_a_distribution(t in 0usize..400) {
        let p = chebyshev_weights(t);
        prop_assert_eq!(p.len(), t + 1);
        prop_assert!(p.iter().all(|&w| w >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // Only indices with the parity of t carry weight.
        prop_assert!(p.iter().enumerate().all(|(l, &w)| (t - l) % 2 == 0 || w == 0.0));
    }

    #[test]
    fn fast_forwarding_meets_its_tolerance(
        c in chain_strategy(8),
        raw in prop::collection::vec(-1.0f64..1.0, 8),
        t in 1usize..64,
        eps1 in prop::sample::select(vec![0.3, 0.1, 0.03]),
    ) {
        let psi = unit(&raw[..c.n()]);
        prop_assume!(psi.is_some());
        let plan = make_plan(t, eps1).unwrap();
        prop_assert_eq!(plan.walk_calls(), (1u64 << plan.tau()) - 1);
        prop_assert!(qff_residual(&c, &plan, &psi.unwrap()).unwrap() <= eps1);
    }

    #[test]
    fn reflection_preserves_norm(c in chain_strategy(5), eps2 in 0.05f64..0.5, seed in any::<u64>()) {
        let c = c.lazy();
        let refl = Reflection::new(&c, eps2).unwrap();
        let layout = refl.layout().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps: Vec<Complex64> =
            (0..layout.dim()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let mut psi = StateVector::from_amplitudes(layout, amps).unwrap();
        psi.normalize().unwrap();
        refl.apply(&mut psi).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn amplification_schedule_reaches_half(a in 1e-3f64..1.0) {
        let k = rounds_for(a).unwrap();
        let amp = amplified(a, k);
        prop_assert!(amp * amp >= 0.5 - 1e-12, "a = {}, k = {}, sin² = {}", a, k, amp * amp);
    }

    #[test]
    fn ideal_search_lands_within_a_third(pi_g in 0.002f64..0.45, u_extra in 0.0f64..0.5) {
        let u = (pi_g + u_extra).min(0.499).max(pi_g + 1e-9);
        let mut cmp = IdealComparator::new(pi_g);
        let out = binary_search_pig(&mut cmp, 0.0, u, 64).unwrap();
        let x = out.pi_star().unwrap();
        prop_assert!((x - pi_g).abs() <= pi_g / 3.0 + 1e-15);
        let bound = (u / (2.0 * pi_g / 3.0)).log2().ceil().max(0.0) as usize + 1;
        prop_assert!(out.iterations() <= bound);
    }

    #[test]
    fn flag_and_g_projection_tracks_closed_form(pi_g in 0.03f64..0.3, ratio in 0.4f64..1.6) {
        let x = (pi_g * ratio).min(0.45);
        let b = 1.0 / pi_g - 2.0;
        let c = random_walk_chain(&Graph::with_weights(3, &[(0, 1, 1.0), (0, 2, 1.0), (1, 2, b)]).unwrap(), true).unwrap();
        let eps = 0.05;
        let (psi, _, _) = apply_u_main(0, x, eps, &c).unwrap();
        let p = success_projection(&psi, &c, SuccessProjector::GAndFlag(0)).unwrap();
        let closed = (pi_g * (1.0 - x) / (pi_g + x - 2.0 * pi_g * x)).powi(2);
        prop_assert!((p - closed).abs() <= eps, "simulated {} vs {}", p, closed);
        prop_assert!(interpolation_parameter(x).unwrap() > 0.0);
    }

    #[test]
    fn generators_are_pure_and_connected(n in 9usize..40, seed in any::<u64>(), r in 2usize..4) {
        for family in Family::ALL {
            let n = if family == Family::Necklace { 4 * (n / 4) } else { n };
            let spec = FamilySpec { r, seed, ..FamilySpec::new(family, n) };
            let a = gen_family(&spec).unwrap();
            prop_assert_eq!(&a, &gen_family(&spec).unwrap());
            prop_assert!(spec.chain(true).unwrap().is_ergodic());
            // Edge-list text reads back to the same graph.
            let back = from_edge_list(&a.to_edge_list()).unwrap();
            prop_assert_eq!(back.edges(), a.edges());
        }
    }

    #[test]
    fn few_vertices_exceed_c_over_n(n in 16usize..128, seed in any::<u64>(), big_c in 2.0f64..100.0) {
        let spec = FamilySpec { seed, ..FamilySpec::new(Family::Gnp, n) };
        let c = spec.chain(true).unwrap();
        let m = c.n() as f64;
        let heavy = c.pi().iter().filter(|&&p| p > big_c / m).count() as f64;
        prop_assert!(heavy / m <= 1.0 / big_c);
    }

    #[test]
    fn reports_survive_emission(
        pi_g in 0.0f64..1.0,
        fid in 0.0f64..1.0,
        xs in prop::collection::vec(0.0f64..1.0, 0..6),
        seed in any::<u64>(),
        calls in any::<u32>(),
    ) {
        let r = TrialReport {
            kind: TrialKind::Unknown,
            n: 7,
            g: 3,
            pi_g,
            eps: 0.05,
            fidelity: fid,
            pi_star: xs.first().copied(),
            walk_calls: calls as u64,
            ancilla_qubits: 8,
            transcript: xs.iter().map(|&x| Event::CheckBlock { x, prob: 1.0 - x, runs: 3, close: x > 0.5 }).collect(),
            verdict: Verdict::Fail,
            seed,
        };
        let text = emit_trial(&r, Format::Json).unwrap();
        let back = parse_trial(&text).unwrap();
        prop_assert_eq!(emit_trial(&back, Format::Json).unwrap(), text);
        prop_assert_eq!(back.fidelity, round12(fid));
        prop_assert_eq!(back.seed, seed);
        prop_assert_eq!(round12(round12(pi_g)), round12(pi_g));
    }
}
