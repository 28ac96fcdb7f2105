mod common;

use common::*;
use rankmax::dynamic::StageCase;
use rankmax::oracle::{assert_rank_maximal, brute_force_signature, Certificate};
use rankmax::solver::{solve, stage_matching};
use rankmax::{Engine, Label, Side, Signature};

const ORACLE_LIMIT: usize = 16;

fn sig(v: &[u32]) -> Signature {
    Signature::new(v.to_vec())
}

#[test]
fn chain_instances_have_twenty_and_twenty_one_edges() {
    assert_eq!(instance("chain.txt").num_edges(), 20);
    assert_eq!(instance("chain_updated.txt").num_edges(), 21);
}

#[test]
fn chain_original_matching() {
    let inst = instance("chain.txt");
    let res = solve(&inst);
    let m = [("a1", "p1"), ("a2", "p2"), ("a3", "p3"), ("a4", "p4"), ("a5", "p5"), ("a6", "p6"), ("a7", "p7")];
    assert_eq!(named(&inst, &res.matching), expect_pairs(&m));
    assert_eq!(res.signature, sig(&[4, 0, 1, 0, 1, 0, 1]));
    let oracle = brute_force_signature(&inst, ORACLE_LIMIT).unwrap();
    assert_eq!(oracle.witnesses.len(), 1);
    assert_eq!(oracle.witnesses[0], res.matching);
}

#[test]
fn chain_edge_addition_changes_four_pairs() {
    let mut engine = Engine::new(instance("chain.txt"));
    let before = engine.matching().clone();
    let report = engine.add_edge("a1", "p8", 1).unwrap();
    let inst = engine.instance();
    let m2 = [("a1", "p8"), ("a2", "p1"), ("a3", "p2"), ("a4", "p3"), ("a5", "p5"), ("a6", "p6"), ("a7", "p7")];
    assert_eq!(named(inst, engine.matching()), expect_pairs(&m2));
    assert_eq!(report.old_signature, sig(&[4, 0, 1, 0, 1, 0, 1]));
    assert_eq!(report.new_signature, sig(&[4, 1, 0, 1, 0, 1, 0]));
    let changed = inst
        .applicants()
        .filter(|&a| before.applicant_mate(a.index) != engine.matching().applicant_mate(a.index))
        .count();
    assert_eq!(changed, 4);
    let oracle = brute_force_signature(inst, ORACLE_LIMIT).unwrap();
    assert_eq!(oracle.witnesses, vec![engine.matching().clone()]);
    assert_eq!(inst, &instance("chain_updated.txt"));
}

#[test]
fn chain_edge_deletion_restores_original() {
    let mut engine = Engine::new(instance("chain_updated.txt"));
    let report = engine.delete_edge("a1", "p8").unwrap();
    assert_eq!(report.old_signature, sig(&[4, 1, 0, 1, 0, 1, 0]));
    assert_eq!(report.new_signature, sig(&[4, 0, 1, 0, 1, 0, 1]));
    rankmax::verify::verify_engine(&engine).unwrap();
}

#[test]
fn chain_stage_matchings() {
    let inst = instance("chain.txt");
    let res = solve(&inst);
    let rank_one = expect_pairs(&[("a1", "p1"), ("a5", "p5"), ("a6", "p6"), ("a7", "p7")]);
    assert_eq!(named(&inst, &stage_matching(&res, &inst, 1).unwrap()), rank_one);
    assert_eq!(named(&inst, &stage_matching(&res, &inst, 2).unwrap()), rank_one);
    assert_eq!(stage_matching(&res, &inst, 7).unwrap(), res.matching);
}

#[test]
fn chain_rank_one_maximum_has_four_pairs() {
    let inst = instance("chain.txt");
    let mut rank_one = rankmax::Instance::new();
    for v in inst.vertices() {
        rank_one.add_vertex(v.side, inst.name(v)).unwrap();
    }
    for (_, e) in inst.edges().filter(|(_, e)| e.rank == 1) {
        rank_one.add_edge(e.applicant, e.post, 1).unwrap();
    }
    let best = brute_force_signature(&rank_one, ORACLE_LIMIT).unwrap().best_signature;
    assert_eq!(best, sig(&[4]));
}

#[test]
fn chain_empty_matching_is_improvable() {
    let inst = instance("chain.txt");
    assert_eq!(
        assert_rank_maximal(&inst, &rankmax::Matching::new(), ORACLE_LIMIT),
        Ok(Certificate::Improvable(sig(&[4, 0, 1, 0, 1, 0, 1])))
    );
}

#[test]
fn add_i_competitor_makes_post_odd() {
    let mut e = engine_with(ADD_I, ADD_I_M);
    let before = final_labels(&e);
    assert_eq!(before["a1"], Label::Unreachable);
    assert_eq!(before["p1"], Label::Unreachable);
    let m0 = e.matching().clone();
    e.add_vertex("a4", Side::Applicant, &[("p1", 1)]).unwrap();
    let after = final_labels(&e);
    assert_eq!(after["p1"], Label::Odd);
    assert_eq!(after["a1"], Label::Even);
    assert_eq!(e.matching(), &m0);
    assert!(!has_reduced_edge(&e, 2, "a2", "p1"));
    assert!(!has_reduced_edge(&e, 2, "a3", "p1"));
    rankmax::verify::verify_engine(&e).unwrap();
}

#[test]
fn add_ii_no_status_change() {
    let mut e = engine_with(ADD_II, ADD_II_M);
    let before: Vec<_> = (1..=2).map(|i| labels(&e, i)).collect();
    let report = e.add_vertex("a4", Side::Applicant, &[("p1", 1)]).unwrap();
    assert_eq!(report.cases, vec![(1, StageCase::AllOdd)]);
    for (i, old) in before.iter().enumerate() {
        let mut new = labels(&e, i as u32 + 1);
        assert_eq!(new.remove("a4"), Some(Label::Even));
        assert_eq!(&new, old);
    }
    assert_eq!(named(e.instance(), e.matching()), expect_pairs(ADD_II_M));
}

#[test]
fn add_iii_augmenting_path() {
    let mut e = engine_with(ADD_III, ADD_III_M);
    let report = e.add_vertex("a4", Side::Applicant, &[("p1", 1), ("p3", 2)]).unwrap();
    assert_eq!(report.cases, vec![(1, StageCase::AllOdd), (2, StageCase::SomeEven)]);
    assert_eq!(report.paths, vec![(2, vec!["a4".into(), "p3".into(), "a3".into(), "p4".into()])]);
    assert_eq!(
        named(e.instance(), e.matching()),
        expect_pairs(&[("a1", "p1"), ("a2", "p2"), ("a4", "p3"), ("a3", "p4")])
    );
    let after = final_labels(&e);
    for v in ["a4", "p3", "a3", "p4"] {
        assert_eq!(after[v], Label::Unreachable, "{v}");
    }
    rankmax::verify::verify_engine(&e).unwrap();
}

#[test]
fn del_i_unmatched_deletion_relabels() {
    let mut e = engine_with(DEL_I, DEL_I_M);
    let before = final_labels(&e);
    assert_eq!((before["a3"], before["p4"]), (Label::Even, Label::Odd));
    let m0 = named(e.instance(), e.matching());
    e.delete_vertex("a4").unwrap();
    let after = final_labels(&e);
    assert_eq!((after["a3"], after["p4"]), (Label::Unreachable, Label::Unreachable));
    assert_eq!(named(e.instance(), e.matching()), m0);
    rankmax::verify::verify_engine(&e).unwrap();
}

#[test]
fn del_ii_partner_odd_augments() {
    let mut e = engine_with(DEL_II, DEL_II_M);
    let report = e.delete_vertex("a4").unwrap();
    assert!(report.cases.contains(&(2, StageCase::PartnerOdd)));
    assert_eq!(report.paths, vec![(2, vec!["p3".into(), "a3".into()])]);
    assert_eq!(
        named(e.instance(), e.matching()),
        expect_pairs(&[("a1", "p1"), ("a2", "p2"), ("a3", "p3")])
    );
    rankmax::verify::verify_engine(&e).unwrap();
}

#[test]
fn del_ii_plain_solve_picks_the_other_matching() {
    let inst = rankmax::format::parse_instance(DEL_II).unwrap();
    let res = solve(&inst);
    assert!(res.matching.contains(
        inst.lookup("a3").unwrap().index,
        inst.lookup("p3").unwrap().index
    ));
}

#[test]
fn del_iii_odd_deletion_changes_nothing() {
    let mut e = engine_with(DEL_III, DEL_III_M);
    let before: Vec<_> = (1..=2).map(|i| labels(&e, i)).collect();
    assert_eq!(before[1]["a4"], Label::Odd);
    e.delete_vertex("a4").unwrap();
    for (i, old) in before.iter().enumerate() {
        let mut old = old.clone();
        old.remove("a4");
        assert_eq!(labels(&e, i as u32 + 1), old, "stage {}", i + 1);
    }
    rankmax::verify::verify_engine(&e).unwrap();
}

#[test]
fn del_iv_unreachable_deletion() {
    let mut e = engine_with(DEL_IV, DEL_IV_M);
    let before = final_labels(&e);
    assert!(before.values().all(|&l| l == Label::Unreachable));
    e.delete_vertex("a4").unwrap();
    let after = final_labels(&e);
    assert_eq!((after["p3"], after["p4"], after["a3"]), (Label::Even, Label::Even, Label::Odd));
    rankmax::verify::verify_engine(&e).unwrap();
}
