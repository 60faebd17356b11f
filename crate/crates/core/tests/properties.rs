use exponent_lab::estimators::{fit_exponent, estimate_zeta};
use exponent_lab::generators::{gen_gasket, gen_lattice};
use exponent_lab::io::{network_from_json, network_to_json};
use exponent_lab::resistance::{effective_resistance, modulus, solve_potential};
use exponent_lab::structures::exp_clock_partition;
use exponent_lab::walks::{dyadic_grid, heat_kernel_exact, simulate_walks, RestrictedWalk, WalkConfig};
use exponent_lab::{Edge, Network, ScaleSeries, SeriesKind, SolveOptions, Statistic};
use proptest::prelude::*;

fn network() -> impl Strategy<Value = Network> {
    (2usize..14)
        .prop_flat_map(|n| {
            let tree = proptest::collection::vec((0.0f64..1.0, -1.0f64..1.0), n - 1);
            let extra = proptest::collection::vec((0..n, 0..n, -1.0f64..1.0), 0..2 * n);
            (Just(n), tree, extra)
        })
        .prop_map(|(n, tree, extra)| {
            let mut edges: Vec<Edge> = tree
                .iter()
                .enumerate()
                .map(|(i, &(p, c))| Edge::new(((i + 1) as f64 * p) as usize, i + 1, 10f64.powf(c)))
                .collect();
            edges.extend(extra.iter().map(|&(u, v, c)| Edge::new(u, v, 10f64.powf(c))));
            Network::new(n, edges, 0, &[]).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn duality_holds(net in network()) {
        let n = net.vertex_count();
        let m = modulus(&net, &[0], &[n - 1], &SolveOptions::default()).unwrap();
        prop_assert!((m.value * m.reff - 1.0).abs() < 1e-7);
        prop_assert!(net.weighted_distance(&m.extremal, &[0], &[n - 1]).unwrap() >= 1.0 - 1e-6);
    }

    #[test]
    fn rayleigh_monotonicity(net in network(), edge in any::<prop::sample::Index>(), factor in 1.0f64..10.0) {
        let n = net.vertex_count();
        let opts = SolveOptions::default();
        let before = effective_resistance(&net, &[0], &[n - 1], &opts).unwrap();
        let id = edge.index(net.edge_count());
        let edges: Vec<Edge> = net
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| if i == id { Edge::new(e.u, e.v, e.conductance * factor) } else { *e })
            .collect();
        let stronger = Network::new(n, edges, 0, &[]).unwrap();
        let after = effective_resistance(&stronger, &[0], &[n - 1], &opts).unwrap();
        prop_assert!(after <= before * (1.0 + 1e-8));
    }

    #[test]
    fn potentials_stay_in_unit_interval(net in network()) {
        let n = net.vertex_count();
        let p = solve_potential(&net, &[0], &[n - 1], &SolveOptions::default()).unwrap();
        prop_assert!(p.values.iter().all(|&v| (-1e-9..=1.0 + 1e-9).contains(&v)));
    }

    #[test]
    fn json_round_trip(net in network()) {
        let text = network_to_json(&net, None);
        let (back, _) = network_from_json(&text).unwrap();
        prop_assert_eq!(network_to_json(&back, None), text);
    }

    #[test]
    fn fit_ignores_constant_factor(exp in -3.0f64..3.0, factor in 1e-3f64..1e3) {
        let scales: Vec<u64> = (1..8).map(|k| 1 << k).collect();
        let values = scales.iter().map(|&s| (s as f64).powf(exp) * (1.0 + 0.1 * (s as f64).ln().sin())).collect();
        let s = ScaleSeries::new(SeriesKind::Volume, Statistic::Exact, scales, values).unwrap();
        let a = fit_exponent(&s, None).unwrap();
        let b = fit_exponent(&s.scaled(factor), None).unwrap();
        prop_assert!((a.slope - b.slope).abs() < 1e-9);
    }

    #[test]
    fn partitions_have_small_clusters(seed in any::<u64>(), delta in 1.0f64..12.0) {
        let net = gen_lattice(2, 6).unwrap();
        let mu = vec![1.0; net.vertex_count()];
        let p = exp_clock_partition(&net, delta, &mu, seed).unwrap();
        prop_assert!(p.max_cluster_diameter(&net) as f64 <= 2.0 * p.radius.floor());
        prop_assert!(p.radius >= delta / 4.0 && p.radius < delta / 2.0);
        for (e, &k) in net.edges().iter().zip(&p.kept) {
            prop_assert_eq!(k, p.labels[e.u] == p.labels[e.v]);
        }
    }

    #[test]
    fn displacement_dominates_resolved_exits(seed in any::<u64>()) {
        let net = gen_gasket(5).unwrap();
        let cfg = WalkConfig::new(5000, 16, seed);
        let stats = simulate_walks(&net, &cfg, &dyadic_grid(1, 16), &dyadic_grid(1, 1024)).unwrap();
        prop_assert_eq!(stats.elementary_violations(), 0);
    }

    #[test]
    fn restricted_stationary_law_is_invariant(net in network(), k in 1usize..8) {
        let set: Vec<usize> = (0..k.min(net.vertex_count())).collect();
        let rw = RestrictedWalk::new(&net, &set).unwrap();
        let pi = rw.stationary();
        let total: f64 = pi.iter().map(|p| p.1).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        for &(y, py) in &pi {
            let inflow: f64 = pi
                .iter()
                .map(|&(x, px)| px * rw.kernel_row(x).iter().filter(|r| r.0 == y).map(|r| r.1).sum::<f64>())
                .sum();
            prop_assert!((inflow - py).abs() < 1e-12);
        }
    }
}

#[test]
fn even_return_probabilities_decrease() {
    for net in [gen_gasket(6).unwrap(), gen_lattice(2, 30).unwrap()] {
        let hk = heat_kernel_exact(&net, 25, 1 << 20).unwrap();
        for n in 1..=25 {
            assert!(hk.p_2n(n) <= hk.p_2n(n - 1) * (1.0 + 1e-12));
        }
    }
}

#[test]
fn zeta_is_stable_under_smaller_delta() {
    let net = gen_gasket(9).unwrap();
    let scales = dyadic_grid(8, 256);
    let opts = SolveOptions::default();
    let a = estimate_zeta(&net, 0.25, &scales, &opts).unwrap();
    let b = estimate_zeta(&net, 0.125, &scales, &opts).unwrap();
    let diff = (a.zeta_tilde.exponent - b.zeta_tilde.exponent).abs();
    let se = a.zeta_tilde.exponent_stderr.max(b.zeta_tilde.exponent_stderr);
    assert!(diff < se, "δ 0.25 → 0.125 moved the estimate by {diff}, stderr {se}");
}
