use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use talknet_core::network::{build_network, filter_projects, EdgeScope, ProjectRecord};
use talknet_core::quality::q_score;
use talknet_core::wikitext::PostRecord;

#[test]
fn q_score_decreases_in_p_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let n = rng.random_range(2..=5000u64);
        let nq = rng.random_range(1..=n);
        let mut ps: Vec<f64> = (0..2).map(|_| rng.random_range(0.0..=1.0)).collect();
        ps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if ps[0] == ps[1] {
            continue;
        }
        let lo = q_score(nq, n, ps[0]).unwrap().score;
        let hi = q_score(nq, n, ps[1]).unwrap().score;
        assert!(hi < lo, "n={n} nq={nq} p={ps:?}");
        let q0 = q_score(nq, n, 0.0).unwrap().score;
        let qh = q_score(nq, n, 0.5).unwrap().score;
        let q1 = q_score(nq, n, 1.0).unwrap().score;
        assert!(q0 > qh && qh > q1);
        assert!((q0 - nq as f64).abs() < 1e-12);
        assert!((qh - nq as f64 / (n as f64).sqrt()).abs() < 1e-12);
        assert!((q1 - nq as f64 / n as f64).abs() < 1e-12);
    }
}

#[test]
fn doubling_scales_half_score_by_root_two() {
    for n in 1..=300u64 {
        for nq in [0, 1, n / 3, n] {
            let a = q_score(nq, n, 0.5).unwrap().score;
            let b = q_score(2 * nq, 2 * n, 0.5).unwrap().score;
            assert!((b - a * std::f64::consts::SQRT_2).abs() < 1e-12 * b.max(1.0));
            let a1 = q_score(nq, n, 1.0).unwrap().score;
            let b1 = q_score(2 * nq, 2 * n, 1.0).unwrap().score;
            assert!((a1 - b1).abs() < 1e-12);
        }
    }
}

const EDITORS: [&str; 8] = ["Alice", "Bob", "Carol", "Dave", "Erin", "Frank", "Grace", "Heidi"];

fn arb_post() -> impl Strategy<Value = PostRecord> {
    (0..EDITORS.len(), 0..EDITORS.len(), any::<bool>()).prop_map(|(a, o, mass)| PostRecord {
        page_owner: EDITORS[o].to_string(),
        thread: "t".into(),
        author: EDITORS[a].to_string(),
        timestamp: "2020-01-01T00:00:00Z".into(),
        depth: 0,
        mass_message: mass,
    })
}

fn members() -> BTreeSet<String> {
    EDITORS[..5].iter().map(|s| s.to_string()).collect()
}

fn counted(posts: &[PostRecord], members: &BTreeSet<String>) -> u64 {
    posts
        .iter()
        .filter(|p| {
            !p.mass_message
                && p.author != p.page_owner
                && members.contains(&p.author)
                && members.contains(&p.page_owner)
        })
        .count() as u64
}

proptest! {
    #[test]
    fn post_order_does_not_matter(posts in prop::collection::vec(arb_post(), 0..60), seed in any::<u64>()) {
        let m = members();
        let mut shuffled = posts.clone();
        rand::seq::SliceRandom::shuffle(shuffled.as_mut_slice(), &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(
            build_network(&posts, &m, EdgeScope::MembersOnly),
            build_network(&shuffled, &m, EdgeScope::MembersOnly)
        );
    }

    #[test]
    fn total_weight_counts_qualifying_posts(posts in prop::collection::vec(arb_post(), 0..60)) {
        let m = members();
        let g = build_network(&posts, &m, EdgeScope::MembersOnly);
        prop_assert_eq!(g.total_weight(), counted(&posts, &m));
    }

    #[test]
    fn adding_posts_never_removes_weight(
        posts in prop::collection::vec(arb_post(), 0..40),
        more in prop::collection::vec(arb_post(), 0..20),
    ) {
        let m = members();
        for scope in [EdgeScope::MembersOnly, EdgeScope::AnyMemberEndpoint] {
            let before = build_network(&posts, &m, scope);
            let mut all = posts.clone();
            all.extend(more.iter().cloned());
            let after = build_network(&all, &m, scope);
            for (u, v, w) in before.edges() {
                prop_assert!(after.weight(u, v) >= w);
            }
        }
    }

    #[test]
    fn filtering_is_idempotent(
        nets in prop::collection::vec(prop::collection::vec(arb_post(), 0..40), 1..8),
        nq in prop::collection::vec(0u64..3, 8),
        threshold in 2usize..6,
    ) {
        let m = members();
        let mut quality = BTreeMap::new();
        let records: Vec<ProjectRecord> = nets
            .iter()
            .enumerate()
            .map(|(i, posts)| {
                let name = format!("P{i}");
                quality.insert(name.clone(), nq[i]);
                ProjectRecord::new(name, m.clone(), build_network(posts, &m, EdgeScope::MembersOnly)).unwrap()
            })
            .collect();
        let once = filter_projects(&records, &quality, threshold).unwrap();
        let twice = filter_projects(&once, &quality, threshold).unwrap();
        prop_assert_eq!(&once, &twice);
        for r in &once {
            prop_assert!(r.active_nodes() >= threshold && quality[&r.project] >= 1);
        }
    }
}
