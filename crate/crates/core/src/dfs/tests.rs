use alloc::vec;
use alloc::vec::Vec;

use proptest::prelude::*;

use super::*;
use crate::config::ExperimentConfig;
use crate::generators;
use crate::graph::ForestIndex;
use crate::percolation::{split_probability, SprinklingSplit};
use VertexStatus::*;

fn rule(k: usize, d: f64, epsilon: f64) -> BlockRule {
    BlockRule { k, d, epsilon }
}

fn bits(s: &str) -> Vec<bool> {
    s.bytes().map(|b| b == b'1').collect()
}

fn record(index: usize, verdict: Verdict, first: Vertex) -> BlockRecord {
    BlockRecord {
        index,
        outcomes: Vec::new(),
        verdict,
        boundary_step: 0,
        first_vertex: first,
        last_vertex: first,
        active_at_boundary: 0,
        safe_after_boundary: 0,
        safe_within_active: true,
    }
}

#[test]
fn classify_examples() {
    // window [4, 8], threshold 1.5 s / 4
    let r = rule(2, 4.0, 0.5);
    assert_eq!(r.window(), (4, 8));
    assert_eq!(r.classify(&bits("10010001")), Verdict::Bad);
    assert_eq!(r.classify(&bits("11111111")), Verdict::Good);
    assert_eq!(r.classify(&bits("00000000")), Verdict::Bad);
    // the window is never reached
    assert_eq!(r.classify(&bits("000")), Verdict::Good);
    // Y_4 = 2 >= 1.5, Y_5 = 2 >= 1.875, Y_6 = 2 < 2.25
    assert_eq!(r.classify(&bits("1100")), Verdict::Good);
    assert_eq!(r.classify(&bits("11000")), Verdict::Good);
    assert_eq!(r.classify(&bits("110000")), Verdict::Bad);
    // queries past dk are ignored
    assert_eq!(r.classify(&bits("1111111100000000")), Verdict::Good);
    let mut rec = record(1, Verdict::Good, 0);
    rec.outcomes = bits("10010001");
    assert_eq!(classify_block(&rec, 2, 4.0, 0.5), Verdict::Bad);
    assert_eq!(rec.running_positives(), vec![1, 1, 1, 2, 2, 2, 2, 3]);
}

#[test]
fn window_never_starts_at_zero() {
    assert_eq!(rule(1, 1.2, 0.1).window(), (1, 1));
    assert_eq!(rule(3, 2.5, 0.1).window(), (4, 7));
}

fn classify_oracle(k: usize, d: f64, eps: f64, x: &[bool]) -> Verdict {
    let dk = d * k as f64;
    let mut y = 0usize;
    for (i, &b) in x.iter().enumerate() {
        y += usize::from(b);
        let s = (i + 1) as f64;
        if s >= dk / 2.0 && s <= dk && (y as f64) < (1.0 + eps) * s / d {
            return Verdict::Bad;
        }
    }
    Verdict::Good
}

proptest! {
    #[test]
    fn classify_matches_direct_definition(
        k in 1usize..6,
        d in 1.1f64..6.0,
        eps in 0.01f64..1.0,
        x in proptest::collection::vec(any::<bool>(), 0..40),
    ) {
        prop_assert_eq!(rule(k, d, eps).classify(&x), classify_oracle(k, d, eps, &x));
    }

    #[test]
    fn appending_a_one_never_turns_good_to_bad_below_the_window(
        x in proptest::collection::vec(any::<bool>(), 0..3),
    ) {
        // below ceil(dk/2) = 4 nothing is checked
        prop_assert_eq!(rule(2, 4.0, 0.5).classify(&x), Verdict::Good);
    }
}

#[test]
fn no_safe_vertex_after_a_bad_block() {
    let mut st = DfsState::from_parts(vec![Active; 3], vec![0, 1, 2], vec![], vec![None, Some(0), Some(1)]).unwrap();
    let mut blocks: Vec<_> = (1..=4).map(|i| record(i, Verdict::Good, 0)).collect();
    blocks[1].verdict = Verdict::Bad;
    assert_eq!(maybe_create_safe(&mut st, &blocks, 2), None);
    assert!(st.safe().is_empty());
    // not a multiple of 2k
    assert_eq!(maybe_create_safe(&mut st, &blocks[..3], 2), None);
}

#[test]
fn safe_vertex_is_the_anchor_when_active() {
    let mut st = DfsState::from_parts(vec![Active; 3], vec![0, 1, 2], vec![], vec![None, Some(0), Some(1)]).unwrap();
    // k = 2: at block 4 the anchor is the first vertex of block 2
    let blocks: Vec<_> = (1..=4).map(|i| record(i, Verdict::Good, if i == 2 { 1 } else { 0 })).collect();
    let ev = maybe_create_safe(&mut st, &blocks, 2);
    assert_eq!(
        ev,
        Some(SafeEvent::Created {
            block: 4,
            anchor: 1,
            safe: 1
        })
    );
    assert_eq!(st.safe(), &[1]);
}

#[test]
fn safe_vertex_is_nearest_active_by_forest_distance() {
    // active path 0-1-2-3-4; processed branches hang off 1 and 3
    let status = vec![Active, Active, Active, Active, Active, Processed, Processed, Processed, Processed];
    let parent = vec![
        None,
        Some(0),
        Some(1),
        Some(2),
        Some(3),
        Some(1),
        Some(5),
        Some(3),
        Some(7),
    ];
    let forest = Forest::from_parents(parent.clone()).unwrap();
    let index = ForestIndex::new(&forest);
    let active = [0, 1, 2, 3, 4];
    for anchor in 0..9 {
        let mut st = DfsState::from_parts(status.clone(), active.to_vec(), vec![], parent.clone()).unwrap();
        let blocks: Vec<_> = (1..=2).map(|i| record(i, Verdict::Good, anchor)).collect();
        let Some(SafeEvent::Created { safe, .. }) = maybe_create_safe(&mut st, &blocks, 1) else {
            panic!("no safe vertex for anchor {anchor}");
        };
        let best = active
            .iter()
            .map(|&a| index.distance(anchor, a).unwrap())
            .min()
            .unwrap();
        assert_eq!(index.distance(anchor, safe), Some(best), "anchor {anchor}");
    }
}

#[test]
fn anchor_in_another_tree_is_skipped() {
    let status = vec![Processed, Active];
    let mut st = DfsState::from_parts(status, vec![1], vec![], vec![None, None]).unwrap();
    let blocks = vec![record(1, Verdict::Good, 0), record(2, Verdict::Good, 0)];
    assert_eq!(
        maybe_create_safe(&mut st, &blocks, 1),
        Some(SafeEvent::Skipped { block: 2, anchor: 0 })
    );
}

fn cfg_with(k: usize, d: f64, eps: f64, p: f64) -> ExperimentConfig {
    ExperimentConfig::builder(k, d, eps).p(p).build().unwrap()
}

#[test]
fn zero_probability_fails_at_first_real_block() {
    let g = generators::random_regular(100, 6, 0).unwrap();
    let cfg = cfg_with(2, 3.0, 0.5, 0.0);
    let mut o = EdgeOracle::new(&g, cfg.split, 0).unwrap();
    let run = run_dfs(&cfg, &mut o).unwrap();
    assert!(run.failed);
    assert_eq!(
        run.failure,
        Some(Failure {
            block: 1,
            reason: FailureReason::NoSafeVertex
        })
    );
    assert_eq!(run.blocks.len(), 1);
    assert!(run.blocks[0].queries() >= 3);
    assert_eq!(run.blocks[0].positives(), 0);
    assert_eq!(run.forest().unwrap().edge_count(), 0);
}

#[test]
fn certain_edges_give_a_hamilton_path() {
    let n = 30;
    let g = generators::complete(n).unwrap();
    let cfg = cfg_with(3, 4.0, 0.5, 1.0);
    let mut o = EdgeOracle::new(&g, cfg.split, 5).unwrap();
    let run = run_dfs(&cfg, &mut o).unwrap();
    assert!(!run.failed && !run.truncated);
    assert_eq!(run.blocks.len(), n / 3);
    assert!(run.blocks.iter().all(|b| b.verdict == Verdict::Good));
    let f = run.forest().unwrap();
    assert_eq!(f.edge_count(), n - 1);
    assert_eq!(f.path(0, n - 1).unwrap(), (0..n).collect::<Vec<_>>());
    assert!(run.status.iter().all(|&s| s == Processed));
}

#[test]
fn runs_replay_exactly() {
    let g = generators::random_regular(400, 8, 3).unwrap();
    let cfg = cfg_with(4, 4.0, 0.5, 0.3);
    let a = run_dfs(&cfg, &mut EdgeOracle::new(&g, cfg.split, 11).unwrap()).unwrap();
    let b = run_dfs(&cfg, &mut EdgeOracle::new(&g, cfg.split, 11).unwrap()).unwrap();
    assert_eq!(a, b);
    let c = run_dfs(&cfg, &mut EdgeOracle::new(&g, cfg.split, 12).unwrap()).unwrap();
    assert_ne!(a.queries, c.queries);
}

#[test]
fn step_budget_truncates() {
    let g = generators::complete(20).unwrap();
    let cfg = ExperimentConfig::builder(2, 2.0, 0.5).p(1.0).step_budget(7).build().unwrap();
    let run = run_dfs(&cfg, &mut EdgeOracle::new(&g, cfg.split, 0).unwrap()).unwrap();
    assert!(run.truncated);
    assert_eq!(run.steps, 7);
}

#[test]
fn engine_rejects_oversized_blocks() {
    let g = generators::complete(4).unwrap();
    let mut o = EdgeOracle::new(&g, split_probability(0.5, 0.0).unwrap(), 0).unwrap();
    assert!(DfsEngine::new(&mut o, rule(5, 2.0, 0.5), None).is_err());
}

fn path_run(n: usize) -> (Graph, DfsRun) {
    let g = generators::path(n).unwrap();
    let cfg = cfg_with(1, 2.0, 0.5, 1.0);
    let run = run_dfs(&cfg, &mut EdgeOracle::new(&g, cfg.split, 0).unwrap()).unwrap();
    (g, run)
}

#[test]
fn rho_on_a_path() {
    let (_, run) = path_run(10);
    assert_eq!(rho(&run, 2, 7).unwrap(), Some(5));
    assert_eq!(rho(&run, 4, 4).unwrap(), Some(0));
}

#[test]
fn long_chord_on_a_path() {
    // path 0..9 plus the chord (0, 9); alpha k d = 4 with eps = 2, d = 10, k = 10
    let edges = (0..9).map(|i| (i, i + 1)).chain([(0, 9)]);
    let g = Graph::from_edges(10, edges).unwrap();
    let cfg = ExperimentConfig::builder(10, 10.0, 2.0).p(1.0).build().unwrap();
    assert!((cfg.long_threshold() - 4.0).abs() < 1e-12);
    let mut o = EdgeOracle::new(&g, cfg.split, 0).unwrap();
    let run = run_dfs(&cfg, &mut o).unwrap();
    let long = collect_long_edges(&run, &g, &cfg).unwrap();
    assert_eq!(long.len(), 1);
    let e = long[0];
    assert_eq!(e.rho, 9);
    assert_eq!(cfg.split.p1, 1.0);
    let cycle = extract_cycle(&run, &long, &mut o).unwrap().unwrap();
    assert_eq!(cycle.len(), 10);
}

#[test]
fn triangle_closes() {
    let g = generators::complete(3).unwrap();
    let cfg = ExperimentConfig::builder(1, 2.0, 0.5).p(1.0).build().unwrap();
    let mut o = EdgeOracle::new(&g, cfg.split, 0).unwrap();
    let run = run_dfs(&cfg, &mut o).unwrap();
    let long = collect_long_edges(&run, &g, &cfg).unwrap();
    assert_eq!(long, vec![LongEdge { x: 0, y: 2, rho: 2 }]);
    let cycle = extract_cycle(&run, &long, &mut o).unwrap().unwrap();
    assert_eq!(cycle, vec![0, 1, 2]);
    validate_cycle(&cycle, &o).unwrap();
}

#[test]
fn certain_sprinkle_closes_the_longest_edge() {
    let g = generators::random_regular(200, 6, 8).unwrap();
    let split = SprinklingSplit {
        p: 1.0,
        p1: 0.3,
        p2: 1.0,
    };
    let mut cfg = cfg_with(2, 3.0, 0.5, 0.3);
    cfg.split = split;
    let mut o = EdgeOracle::new(&g, split, 4).unwrap();
    let run = run_dfs(&cfg, &mut o).unwrap();
    let long = collect_long_edges(&run, &g, &cfg).unwrap();
    assert!(!long.is_empty());
    let cycle = extract_cycle(&run, &long, &mut o).unwrap().unwrap();
    assert_eq!(cycle.len(), long[0].rho + 1);
    assert!(long.windows(2).all(|w| w[0].rho >= w[1].rho));
}

#[test]
fn no_long_edges_no_cycle() {
    let (g, run) = path_run(6);
    let cfg = cfg_with(1, 2.0, 0.5, 1.0);
    let long = collect_long_edges(&run, &g, &cfg).unwrap();
    assert!(long.is_empty());
    let mut o = EdgeOracle::new(&g, cfg.split, 0).unwrap();
    assert_eq!(extract_cycle(&run, &long, &mut o).unwrap(), None);
}

#[test]
fn invalid_cycles_rejected() {
    let g = generators::complete(4).unwrap();
    let mut o = EdgeOracle::new(&g, split_probability(1.0, 0.0).unwrap(), 0).unwrap();
    assert!(validate_cycle(&[0, 1], &o).is_err());
    // nothing revealed yet
    assert_eq!(validate_cycle(&[0, 1, 2], &o), Err(Error::InvalidCycle(0, 1)));
    for (u, v) in [(0, 1), (1, 2), (0, 2)] {
        o.present(u, v).unwrap();
    }
    assert!(validate_cycle(&[0, 1, 2], &o).is_ok());
    assert!(validate_cycle(&[0, 1, 0], &o).is_err());
}

#[test]
fn block_boundaries_hold_k_vertices() {
    let g = generators::random_regular(300, 6, 5).unwrap();
    for p in [0.1, 0.25, 0.6] {
        let cfg = cfg_with(5, 3.0, 0.5, p);
        let mut o = EdgeOracle::new(&g, cfg.split, 2).unwrap();
        let mut engine = DfsEngine::new(&mut o, cfg.block_rule(), None).unwrap();
        let mut processed = 0;
        while let Some(ev) = engine.advance().unwrap() {
            let now = engine.state().processed_count();
            assert!(now - processed <= 1);
            if matches!(ev, StepEvent::Processed(_)) {
                assert_eq!(now, processed + 1);
            }
            processed = now;
            assert_eq!(now / 5, engine.blocks().len());
        }
        let run = engine.finish();
        for b in &run.blocks {
            assert_eq!(b.verdict, run.rule.classify(&b.outcomes));
        }
        assert_eq!(run.recompute_bad_trace(), run.bad_trace);
    }
}

#[test]
fn safe_vertices_are_planted_on_good_streaks() {
    let g = generators::complete(60).unwrap();
    let cfg = cfg_with(2, 2.0, 0.5, 1.0);
    let mut o = EdgeOracle::new(&g, cfg.split, 0).unwrap();
    let run = run_dfs(&cfg, &mut o).unwrap();
    // 30 blocks, a creation attempt at every 4th
    let attempts = run.safe_events.len();
    assert_eq!(attempts, 7);
    for ev in &run.safe_events {
        match ev {
            SafeEvent::Created { block, anchor, .. } | SafeEvent::Skipped { block, anchor } => {
                assert_eq!(block % 4, 0);
                assert_eq!(*anchor, run.blocks[block - 3].first_vertex);
            }
            SafeEvent::Consumed { .. } => panic!("no bad blocks expected"),
        }
    }
    assert!(!run.ever_safe().is_empty());
}

#[test]
fn boundary_snapshots_are_recorded_before_the_rule() {
    let g = generators::complete(9).unwrap();
    let cfg = cfg_with(3, 2.0, 0.5, 1.0);
    let run = run_dfs(&cfg, &mut EdgeOracle::new(&g, cfg.split, 0).unwrap()).unwrap();
    let a: Vec<_> = run.blocks.iter().map(|b| b.active_at_boundary).collect();
    assert_eq!(a, vec![6, 3, 0]);
    assert_eq!(run.blocks[0].first_vertex, 8);
    assert_eq!(run.blocks[0].last_vertex, 6);
}

#[cfg(feature = "serde")]
#[test]
fn outcome_bits_round_trip() {
    let g = generators::random_regular(50, 4, 1).unwrap();
    let cfg = cfg_with(2, 2.0, 0.5, 0.5);
    let run = run_dfs(&cfg, &mut EdgeOracle::new(&g, cfg.split, 0).unwrap()).unwrap();
    let text = serde_json::to_string(&run).unwrap();
    let back: DfsRun = serde_json::from_str(&text).unwrap();
    assert_eq!(run, back);
}

#[test]
fn statuses_partition_the_vertices() {
    let g = generators::random_regular(120, 4, 9).unwrap();
    let cfg = cfg_with(3, 2.0, 0.5, 0.5);
    let run = run_dfs(&cfg, &mut EdgeOracle::new(&g, cfg.split, 1).unwrap()).unwrap();
    let active = run.status.iter().filter(|&&s| s == Active).count();
    assert_eq!(active, run.active.len());
    let mut seen = vec![0u8; 120];
    for &v in &run.active {
        seen[v] += 1;
    }
    assert!(seen.iter().all(|&c| c <= 1));
    let _ = Unprocessed;
}
