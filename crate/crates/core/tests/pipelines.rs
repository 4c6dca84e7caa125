use pcn_core::bounds::{
    pipeline_theorem0, pipeline_theorem1, LmqTriple, PipelineResult, Theorem0Config, Theorem1Config,
};

fn triples(v: &[(u32, u64, u64)]) -> Vec<LmqTriple> {
    v.iter().map(|&(l, m, q)| LmqTriple { l, m, q }).collect()
}

#[test]
fn theorem1_stages_shrink() {
    let config = Theorem1Config {
        n_max: 120,
        robin_scan_limit: 300,
        ..Theorem1Config::default()
    };
    let r = pipeline_theorem1(config).unwrap();
    assert!(r.rows_above_984.is_empty());
    for w in [&r.after_c16, &r.after_exact_w, &r.after_basic_filter] {
        assert!(w.iter().all(|x| r.region.contains(x)));
    }
    assert!(r.after_exact_w.iter().all(|x| r.after_c16.contains(x)));
    assert!(r
        .after_basic_filter
        .iter()
        .all(|x| r.after_exact_w.contains(x)));
    let first = r.table1.first().unwrap();
    assert_eq!((first.n, first.q0, first.q1), (6, 8, 1259));
    let region: usize = r
        .table1
        .iter()
        .map(|row| {
            pcn_core::arith::prime_powers_up_to(row.q1 - 1)
                .into_iter()
                .filter(|&q| q >= row.q0)
                .count()
        })
        .sum();
    assert_eq!(region, r.region.len());

    let report = PipelineResult::from(&r);
    let json = serde_json::to_string(&report).unwrap();
    let back: PipelineResult = serde_json::from_str(&json).unwrap();
    assert_eq!(back, report);
}

#[test]
fn theorem0_lists() {
    let r = pipeline_theorem0(Theorem0Config::default()).unwrap();
    assert_eq!(r.podd_triples, triples(&[(1, 2, 7), (1, 2, 9), (1, 7, 9)]));
    assert!(r
        .podd_triples
        .iter()
        .all(|t| r.podd_triples_all.contains(t)));
    assert_eq!(r.podd_nonbasic, triples(&[(1, 7, 9)]));
    assert_eq!(r.podd_all_nonbasic, r.podd_nonbasic);
    assert_eq!(
        r.p2_triples,
        triples(&[
            (2, 3, 8),
            (2, 3, 16),
            (2, 5, 8),
            (2, 7, 8),
            (2, 15, 16),
            (3, 3, 8)
        ])
    );
    assert_eq!(r.p2_nonbasic, triples(&[(2, 3, 8), (2, 5, 8), (3, 3, 8)]));
    assert_eq!(r.a12_exceptions.len(), 116);
    assert_eq!(r.a12_after_filter.len(), 85);
    assert_eq!(r.a12_main_failures, triples(&[(1, 3, 8)]));
    assert!(r.a12_robin_last_violation.unwrap() <= 873);
}
