use parsearch_core::adversary::{
    ambainis_bound, build_adversary_graph, closed_form_bound, compute_stats, InstanceFamily,
};

fn feasible() -> impl Iterator<Item = (u32, u32, usize, usize)> {
    (0..=3u32).flat_map(|n| {
        (1..=3u32).flat_map(move |m| {
            (1..=3usize).flat_map(move |d| {
                (1..=3usize)
                    .filter_map(move |k| (k <= 1 << (m - 1) && k <= 1 << n).then_some((n, m, d, k)))
            })
        })
    })
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn falling(n: usize, r: usize) -> usize {
    (0..r).map(|i| n - i).product()
}

#[test]
fn vertex_counts_match_direct_counting() {
    for (n, m, d, k) in feasible() {
        let g = build_adversary_graph(&InstanceFamily::new(n, m, d, k).unwrap()).unwrap();
        let size = 1usize << n;
        assert_eq!(g.v1_len(), falling(size, k), "(n={n},m={m},d={d},k={k})");
        assert_eq!(g.v0_len(), falling(size, k - 1) * k);
        // C(N, k-1) k! from the other factorization.
        let choose = falling(size, k - 1) / factorial(k - 1);
        assert_eq!(g.v0_len(), choose * factorial(k));
    }
}

#[test]
fn degree_and_label_claims_hold() {
    for (n, m, d, k) in feasible() {
        let g = build_adversary_graph(&InstanceFamily::new(n, m, d, k).unwrap()).unwrap();
        let s = compute_stats(&g).unwrap();
        let size = 1u64 << n;
        assert_eq!(s.delta0, size - k as u64 + 1);
        assert_eq!(s.delta1, k as u64);
        assert!(s.ell0 <= d as u64 && s.ell0 <= s.delta0);
        assert!(s.ell1 <= d.min(k) as u64 && s.ell1 <= s.delta1);
        // Exact values: a d-fold address reaches min(d, free) or min(d, k) base addresses.
        assert_eq!(s.ell0, (d as u64).min(size - k as u64 + 1));
        assert_eq!(s.ell1, d.min(k) as u64);

        let lower = closed_form_bound(size as usize, d, k)
            * (((size - k as u64 + 1) as f64) / size as f64).sqrt();
        assert!(ambainis_bound(&s).unwrap() >= lower - 1e-12);
    }
}

#[test]
fn every_edge_differs_at_its_label_only() {
    for (n, m, d, k) in feasible() {
        let g = build_adversary_graph(&InstanceFamily::new(n, m, d, k).unwrap()).unwrap();
        let size = 1usize << n;
        for e in g.edges() {
            for x in 0..size {
                let differs = g.v0_item(e.from, x) != g.v1_item(e.to, x);
                assert_eq!(differs, x == e.location);
            }
        }
    }
}

#[test]
fn custom_targets_are_validated() {
    assert!(InstanceFamily::with_targets(2, 2, 1, vec![0, 1]).is_err());
    assert!(InstanceFamily::with_targets(2, 2, 1, vec![4]).is_err());
    assert!(InstanceFamily::with_targets(2, 2, 1, vec![1, 1]).is_err());
    let fam = InstanceFamily::with_targets(2, 3, 2, vec![5, 3]).unwrap();
    let g = build_adversary_graph(&fam).unwrap();
    let s = compute_stats(&g).unwrap();
    assert_eq!((s.delta0, s.delta1), (3, 2));
}
