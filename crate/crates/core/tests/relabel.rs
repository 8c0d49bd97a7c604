use dynlis::oracle::{oracle_length_fast, oracle_levels};
use dynlis::replay::Replayer;
use dynlis::workload::WorkloadOp;

// Inserting repeatedly into the same gap exhausts the integer labels and
// forces the forest to be rebuilt under fresh keys.
#[test]
fn rebuilds_preserve_levels() {
    let mut r = Replayer::new();
    r.apply(WorkloadOp::Append { value: 50 }).unwrap();
    r.apply(WorkloadOp::Append { value: 10 }).unwrap();
    let mut relabeled = 0;
    for i in 0..200i64 {
        let step = r.apply(WorkloadOp::InsertAfterPos { pos: 0, value: (i * 37) % 61 }).unwrap();
        relabeled += u64::from(step.relabeled);
        let seq = r.sequence();
        r.forest().check_invariants().unwrap();
        assert_eq!(r.forest().lis_length(), oracle_length_fast(&seq));
        assert_eq!(r.forest().level_map(), &oracle_levels(&seq));
        assert_eq!(r.forest().elements(), seq);
    }
    assert!(relabeled > 0);
    assert_eq!(r.relabels(), relabeled);
}
