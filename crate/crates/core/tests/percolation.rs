use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zxperc::circuit::{sample_circuit, ModelParams};
use zxperc::percolation::*;
use zxperc::zx::diagram_from_circuit;

/// Depth-first enumeration of simple paths from any input to any output.
fn path_exists(n: usize, edges: &[(u32, u32)], ins: &[u32], outs: &[u32]) -> bool {
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in edges {
        adj[a as usize][b as usize] = true;
        adj[b as usize][a as usize] = true;
    }
    fn extend(u: usize, on_path: &mut Vec<bool>, adj: &[Vec<bool>], outs: &[u32]) -> bool {
        if outs.contains(&(u as u32)) {
            return true;
        }
        for w in 0..adj.len() {
            if adj[u][w] && !on_path[w] {
                on_path[w] = true;
                if extend(w, on_path, adj, outs) {
                    return true;
                }
                on_path[w] = false;
            }
        }
        false
    }
    ins.iter().any(|&i| {
        let mut on_path = vec![false; n];
        on_path[i as usize] = true;
        extend(i as usize, &mut on_path, &adj, outs)
    })
}

#[test]
fn every_small_graph_matches_path_enumeration() {
    for n in 2..=5usize {
        let pairs: Vec<(u32, u32)> = (0..n as u32).flat_map(|a| (a + 1..n as u32).map(move |b| (a, b))).collect();
        // each node is an input, an output or neither
        let roles = 3usize.pow(n as u32);
        for mask in 0..1u32 << pairs.len() {
            let edges: Vec<(u32, u32)> = pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &e)| e).collect();
            let role_step = if n == 5 { 7 } else { 1 };
            for code in (0..roles).step_by(role_step) {
                let (mut ins, mut outs, mut c) = (Vec::new(), Vec::new(), code);
                for v in 0..n as u32 {
                    match c % 3 {
                        1 => ins.push(v),
                        2 => outs.push(v),
                        _ => {}
                    }
                    c /= 3;
                }
                let net = ClassicalNetwork::new(n, edges.clone(), ins.clone(), outs.clone()).unwrap();
                let expected = path_exists(n, &edges, &ins, &outs);
                assert_eq!(is_percolating(&net), expected, "n={n} mask={mask} roles={code}");
                assert_eq!(is_percolating_union_find(&net), expected);
            }
        }
    }
}

fn random_network(rng: &mut ChaCha8Rng, n: usize, mean_degree: f64) -> ClassicalNetwork {
    let m = (mean_degree * n as f64 / 2.0) as usize;
    let edges = (0..m).map(|_| (rng.gen_range(0..n as u32), rng.gen_range(0..n as u32))).collect();
    let k = rng.gen_range(1..=n / 4);
    let ins = (0..k as u32).collect();
    let outs = (n as u32 - k as u32..n as u32).collect();
    ClassicalNetwork::new(n, edges, ins, outs).unwrap()
}

#[test]
fn breadth_first_search_matches_union_find() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut hits = 0;
    for case in 0..10_000 {
        let mean_degree = 0.6 + 0.8 * (case % 5) as f64 / 4.0;
        let net = random_network(&mut rng, 1000, mean_degree);
        let bfs = is_percolating(&net);
        assert_eq!(bfs, is_percolating_union_find(&net), "case {case}");
        hits += bfs as usize;
    }
    assert!(hits > 100 && hits < 9_900, "both outcomes exercised: {hits}");
}

#[test]
fn random_graphs_up_to_eight_nodes_match_path_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..5_000 {
        let n = rng.gen_range(2..=8usize);
        let edges: Vec<(u32, u32)> = (0..rng.gen_range(0..=n * 2)).map(|_| (rng.gen_range(0..n as u32), rng.gen_range(0..n as u32))).collect();
        let ins: Vec<u32> = (0..n as u32).filter(|v| v % 3 == 0).collect();
        let outs: Vec<u32> = (0..n as u32).filter(|v| v % 3 == 1).collect();
        let net = ClassicalNetwork::new(n, edges.clone(), ins.clone(), outs.clone()).unwrap();
        assert_eq!(is_percolating(&net), path_exists(n, &edges, &ins, &outs));
    }
}

proptest! {
    #[test]
    fn cluster_sizes_partition_the_nodes(seed in any::<u64>(), n in 1usize..400, degree in 0.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_network(&mut rng, n.max(4), degree);
        let sizes = cluster_sizes(&net);
        prop_assert_eq!(sizes.iter().sum::<usize>(), net.n_nodes);
        prop_assert!(sizes.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn unitary_diagrams_percolate_before_simplification(seed in any::<u64>(), n in prop::sample::select(vec![2usize, 4, 8, 16]), depth in 1usize..20, r in 0.0f64..=1.0) {
        let c = sample_circuit(&ModelParams::new(0.0, r, n, seed).with_depth(depth)).unwrap();
        let d = diagram_from_circuit(&c, None).unwrap();
        prop_assert!(is_percolating(&ClassicalNetwork::from_diagram(&d)));
    }
}

#[test]
fn unitary_pipeline_percolates_for_every_r() {
    for r in [0.0, 0.1, 0.5, 0.8, 1.0] {
        let pts = estimate_p_path(&ModelParams::new(0.0, r, 12, 3), &[0.0], 30).unwrap();
        assert_eq!(pts[0].p_path, 1.0, "r = {r}");
    }
}

#[test]
fn fixed_seeds_give_identical_estimates() {
    let base = ModelParams::new(0.0, 0.1, 12, 99).with_depth(12);
    let a = estimate_p_path(&base, &[0.1, 0.3], 40).unwrap();
    let b = estimate_p_path(&base, &[0.1, 0.3], 40).unwrap();
    assert_eq!(path_points_to_csv(&a), path_points_to_csv(&b));
    assert!(a.iter().all(|q| (0.0..=1.0).contains(&q.p_path)));
}

#[test]
fn always_connected_networks_have_no_second_cluster() {
    let curve = slc_curve(&ModelParams::new(0.0, 1.0, 2, 1).with_depth(1), &[0.0, 0.0, 0.0], 4);
    let curve = curve.unwrap();
    assert!(curve.points.iter().all(|q| q.mean_slc == 0.0));
    assert!(curve.peak.is_none());
}
