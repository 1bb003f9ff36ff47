use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spanroute::cayley::{build_cayley, cayley_words_for, GroupSpec, Perm};
use spanroute::cpcount::{check_monotone, falling_identity_holds, ff, mu, theta_cp};
use spanroute::cpgraph::{grow_tree, CpGraph};
use spanroute::digraph::GraphFile;
use spanroute::factorization::{
    decompose_into_factors, is_hierarchical, usage_metrics, verify_spanning, FactorizationFile, WordsFile,
};
use spanroute::mms::{Field, Mms};
use spanroute::schedule::{
    diam2_schedule, greedy_schedule_shuffled, simulate_exchange, verify_schedule, ScheduleEntry,
};
use spanroute::{Digraph, Factorization, Schedule, WordList};

fn derangement(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        p.shuffle(rng);
        if p.iter().enumerate().all(|(i, &x)| i != x) {
            return p;
        }
    }
}

/// A `d`-regular digraph on `n` vertices as a union of derangements, with
/// the edge list shuffled so no factor structure is visible.
fn random_regular(n: usize, d: usize, seed: u64) -> Digraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = (0..d)
        .flat_map(|_| derangement(n, &mut rng).into_iter().enumerate().collect::<Vec<_>>())
        .collect();
    edges.shuffle(&mut rng);
    Digraph::new(n, edges).unwrap()
}

fn random_perm(n: usize, seed: u64) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    p
}

fn cp_params() -> impl Strategy<Value = (usize, usize)> {
    (2usize..=5).prop_flat_map(|d| (Just(d), 2usize..=d.min(3)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn regular_digraphs_split_into_factors(n in 2usize..60, d in 1usize..=8, seed: u64) {
        let g = random_regular(n, d, seed);
        let f = decompose_into_factors(&g).unwrap();
        prop_assert_eq!(f.d(), d);
        f.check_covers(&g).unwrap();
    }

    #[test]
    fn distance_profile_ignores_labels(n in 3usize..40, d in 1usize..=4, seed: u64, relabel: u64) {
        let g = random_regular(n, d, seed);
        let h = g.relabel(&random_perm(n, relabel)).unwrap();
        match (g.distance_profile(), h.distance_profile()) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(&a.counts, &b.counts);
                prop_assert_eq!(a.counts.iter().sum::<u64>(), (n * (n - 1)) as u64);
                let theta = a.theta(d);
                let nd = (n * d) as u64;
                prop_assert!(theta * nd >= a.distance_sum());
                prop_assert!(a.distance_sum() > (theta - 1) * nd);
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "relabeling changed strong connectivity"),
        }
    }

    #[test]
    fn spanning_survives_relabeling((d, diameter) in cp_params(), seed: u64) {
        let cp = CpGraph::new(d, diameter).unwrap();
        let (_, wl) = grow_tree(d, diameter).unwrap();
        let perm = random_perm(cp.n(), seed);
        let f = cp.factorization().unwrap().conjugate(&perm);
        let g = cp.digraph().relabel(&perm).unwrap();
        f.check_covers(&g).unwrap();
        prop_assert!(verify_spanning(&f, &wl).is_ok());
    }

    #[test]
    fn shuffled_greedy_schedules_never_conflict((d, diameter) in cp_params(), seed: u64) {
        let cp = CpGraph::new(d, diameter).unwrap();
        let f = cp.factorization().unwrap();
        let (_, wl) = grow_tree(d, diameter).unwrap();
        let s = greedy_schedule_shuffled(&wl, seed);
        let check = verify_schedule(&wl, &s).unwrap();
        let report = simulate_exchange(&f, &wl, &s).unwrap();
        prop_assert!(report.complete());

        let m = usage_metrics(&wl, &cp.digraph().distance_profile().unwrap(), d);
        prop_assert!(u64::from(check.makespan) >= m.max);
        prop_assert!(m.max >= m.avg_ceiling && m.avg_ceiling >= m.theta);
    }

    #[test]
    fn shuffled_word_order_keeps_schedules_valid(n in 4usize..30, d in 2usize..=4, seed: u64) {
        let g = random_regular(n, d, seed);
        let f = decompose_into_factors(&g).unwrap();
        let wl = breadth_first_words(&f);
        let s = greedy_schedule_shuffled(&wl, seed ^ 0x5eed);
        verify_schedule(&wl, &s).unwrap();
        if verify_spanning(&f, &wl).is_ok() {
            prop_assert!(simulate_exchange(&f, &wl, &s).unwrap().complete());
        }
    }

    #[test]
    fn cayley_words_are_short_spanning_and_hierarchical(k in 2usize..=5, gens in 1usize..=3, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut generators = Vec::new();
        while generators.len() < gens {
            let mut p: Vec<usize> = (0..k).collect();
            p.shuffle(&mut rng);
            let perm = Perm::new(p).unwrap();
            if !perm.is_identity() {
                generators.push((format!("g{}", generators.len()), perm));
            }
        }
        let cay = build_cayley(&GroupSpec::new(k, generators).unwrap()).unwrap();
        let wl = cayley_words_for(&cay);
        prop_assert!(verify_spanning(&cay.factorization, &wl).is_ok());
        prop_assert!(is_hierarchical(&wl));
        let dist = cay.graph.bfs_distances(0);
        let lengths: usize = wl.words().iter().map(|w| w.len()).sum();
        prop_assert_eq!(lengths, dist.iter().map(|x| x.unwrap()).sum::<usize>());
        prop_assert_eq!(wl.max_len(), dist.iter().map(|x| x.unwrap()).max().unwrap());
    }

    #[test]
    fn wire_formats_round_trip(n in 2usize..30, d in 1usize..=4, seed: u64) {
        let g = random_regular(n, d, seed);
        let gf = GraphFile::from(&g);
        let back: GraphFile = serde_json::from_str(&serde_json::to_string(&gf).unwrap()).unwrap();
        prop_assert_eq!(&back, &gf);
        let parsed = Digraph::try_from(back).unwrap();
        prop_assert_eq!(parsed.edges(), g.edges());

        let f = decompose_into_factors(&g).unwrap();
        let file = FactorizationFile::from(&f);
        let back: FactorizationFile = serde_json::from_str(&serde_json::to_string(&file).unwrap()).unwrap();
        prop_assert_eq!(Factorization::try_from(back).unwrap(), f.clone());

        let wl = breadth_first_words(&f);
        let wf = WordsFile::from(&wl);
        let back: WordsFile = serde_json::from_str(&serde_json::to_string(&wf).unwrap()).unwrap();
        prop_assert_eq!(WordList::try_from(back).unwrap(), wl.clone());

        let s = greedy_schedule_shuffled(&wl, seed);
        let entries = s.entries();
        let back: Vec<ScheduleEntry> = serde_json::from_str(&serde_json::to_string(&entries).unwrap()).unwrap();
        prop_assert_eq!(Schedule::from_entries(&wl, &back).unwrap(), s);
    }
}

/// Words of a breadth-first tree from vertex 0 taking factors in index order;
/// unreachable vertices are skipped.
fn breadth_first_words(f: &Factorization) -> WordList {
    let n = f.n();
    let mut words: Vec<Option<Vec<usize>>> = vec![None; n];
    words[0] = Some(Vec::new());
    let mut order = vec![0];
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for fac in 0..f.d() {
            let v = f.step(fac, u);
            if words[v].is_none() {
                let mut w = words[u].clone().unwrap();
                w.push(fac);
                words[v] = Some(w);
                order.push(v);
            }
        }
    }
    let words = order
        .iter()
        .map(|&v| spanroute::Word::new(words[v].clone().unwrap()))
        .collect();
    WordList::new(f.d(), words).unwrap()
}

#[test]
fn tree_labels_fill_their_range() {
    for d in 2..=6 {
        for diameter in 2..=d.min(4) {
            let (tree, wl) = grow_tree(d, diameter).unwrap();
            for t in 1..=diameter {
                let mut seen: Vec<usize> = tree.nodes.iter().filter(|n| n.t == t).map(|n| n.c).collect();
                seen.sort_unstable();
                seen.dedup();
                let expected: Vec<usize> = (1..=d - t + 1).collect();
                assert_eq!(seen, expected, "labels at depth {t} of G({d}, {diameter})");
            }
            let cp = CpGraph::new(d, diameter).unwrap();
            verify_spanning(&cp.factorization().unwrap(), &wl).unwrap();
            assert!(is_hierarchical(&wl));
            let m = usage_metrics(&wl, &cp.digraph().distance_profile().unwrap(), d);
            assert!(m.short, "G({d}, {diameter}) words are not short");
            assert!(m.ordered);
        }
    }
}

#[test]
fn falling_factorial_identity_small_range() {
    for a in 0..=12 {
        for p in 0..=a {
            assert!(falling_identity_holds(p, a), "p = {p}, a = {a}");
        }
    }
    assert_eq!(ff(6, 3), 120);
    assert_eq!(ff(3, 5), 0);
}

#[test]
fn mu_bounds_theta_and_counts_are_monotone() {
    for d in 2..=7 {
        for diameter in 2..=d.min(5) {
            let (m, t) = (mu(d, diameter).unwrap(), theta_cp(d, diameter).unwrap());
            assert!(m >= t, "mu {m} < theta {t} at ({d}, {diameter})");
            assert_eq!(check_monotone(d, diameter).unwrap(), Ok(()));
        }
    }
}

#[test]
fn diam2_schedules_verify() {
    for q in [5, 9, 13, 17] {
        let poly: Option<&[usize]> = if q == 9 { Some(&[1, 0, 1]) } else { None };
        let mms = Mms::new(Field::new(q, poly).unwrap());
        let wl = mms.words();
        let check = verify_schedule(&wl, &diam2_schedule(&wl).unwrap()).unwrap();
        assert_eq!(u64::from(check.makespan), 3 * q as u64 - 2);
    }
    for d in 2..=6 {
        let (_, wl) = grow_tree(d, 2).unwrap();
        let check = verify_schedule(&wl, &diam2_schedule(&wl).unwrap()).unwrap();
        assert_eq!(check.makespan as usize, 2 * d + 1);
    }
}

#[test]
fn mms_words_span_for_supported_orders() {
    for (q, poly) in [(5, None), (9, Some(&[1usize, 0, 1][..])), (13, None), (17, None), (25, Some(&[2, 1, 1][..]))] {
        let mms = Mms::new(Field::new(q, poly).unwrap());
        let wl = mms.words();
        assert!(wl.words().iter().all(|w| w.len() <= 2));
        assert!(is_hierarchical(&wl));
        verify_spanning(&mms.factorization().unwrap(), &wl).unwrap();
    }
}
