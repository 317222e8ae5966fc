mod common;

use common::{exhaustive_max, exhaustive_sat, mask_to_bits, random_formula, random_unsat_formula, rng, SubsetTable};
use satreason::oracles::{brute_force_maxsat, find_one_mcs_counted, find_one_mus_counted};
use satreason::{
    check_mcs, check_mus, find_one_mcs, find_one_mus, is_satisfiable, maxsat_optimum, ClauseSubset, CnfFormula,
    OracleError,
};

#[test]
fn subset_checks_match_the_definitions_on_every_subset() {
    let mut r = rng(7);
    for _ in 0..150 {
        let f = random_unsat_formula(&mut r, 6, 10);
        let table = SubsetTable::new(&f);
        let m = f.num_clauses();
        for mask in 0..1usize << m {
            let s = ClauseSubset::from_mask(mask as u64, m);
            assert_eq!(
                check_mcs(&f, &s).unwrap(),
                table.is_mcs(mask),
                "MCS {} of {f:?}",
                mask_to_bits(mask, m)
            );
            assert_eq!(
                check_mus(&f, &s).unwrap(),
                table.is_mus(mask),
                "MUS {} of {f:?}",
                mask_to_bits(mask, m)
            );
        }
    }
}

#[test]
fn maxsat_optimum_matches_exhaustive_maximum() {
    let mut r = rng(8);
    for _ in 0..500 {
        let f = random_formula(&mut r, 10, 30);
        let result = maxsat_optimum(&f);
        let truth = exhaustive_max(&f);
        assert_eq!(result.optimum, truth);
        assert_eq!(brute_force_maxsat(&f).unwrap(), truth);
        assert_eq!(f.evaluate(&result.witness).unwrap().satisfied_count, truth);
        assert_eq!(truth == f.num_clauses(), is_satisfiable(&f));
    }
}

#[test]
fn finders_return_valid_witnesses() {
    let mut r = rng(9);
    for _ in 0..300 {
        let f = random_unsat_formula(&mut r, 8, 14);
        let mcs = find_one_mcs_counted(&f).unwrap();
        let mus = find_one_mus_counted(&f).unwrap();
        assert!(check_mcs(&f, &mcs.subset).unwrap());
        assert!(check_mus(&f, &mus.subset).unwrap());
        assert!(mcs.solver_calls >= 1 && mus.solver_calls >= 1);
        // no clause of the core can be dropped while staying unsatisfiable
        for i in mus.subset.indices() {
            let mut smaller = mus.subset.clone();
            smaller.remove(i);
            let rest = f.restrict(&smaller, satreason::RestrictMode::Keep);
            if let Ok(rest) = rest {
                assert!(is_satisfiable(&rest));
            }
        }
    }
}

#[test]
fn minimum_correction_set_matches_maxsat() {
    let mut r = rng(10);
    for _ in 0..200 {
        let f = random_unsat_formula(&mut r, 6, 10);
        let table = SubsetTable::new(&f);
        let m = f.num_clauses();
        let optimum = maxsat_optimum(&f).optimum;
        let mut smallest = usize::MAX;
        for mask in 1..1usize << m {
            if table.is_mcs(mask) {
                let size = mask.count_ones() as usize;
                assert!(m - optimum <= size);
                smallest = smallest.min(size);
            }
        }
        assert_eq!(smallest, m - optimum);
    }
}

#[test]
fn satisfiable_formulas_are_rejected_by_subset_oracles() {
    let f = CnfFormula::from_dimacs_clauses(2, &[&[1, 2], &[-1]]).unwrap();
    let s = ClauseSubset::full(2);
    assert_eq!(check_mcs(&f, &s), Err(OracleError::Satisfiable));
    assert_eq!(check_mus(&f, &s), Err(OracleError::Satisfiable));
    assert_eq!(find_one_mcs(&f), Err(OracleError::Satisfiable));
    assert_eq!(find_one_mus(&f), Err(OracleError::Satisfiable));
}

#[test]
fn wrong_length_subsets_are_errors() {
    let f = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
    assert!(check_mcs(&f, &ClauseSubset::full(3)).is_err());
    assert!(check_mus(&f, &ClauseSubset::full(1)).is_err());
}

#[test]
fn empty_subset_is_never_a_witness() {
    let mut r = rng(12);
    for _ in 0..50 {
        let f = random_unsat_formula(&mut r, 5, 8);
        assert!(!exhaustive_sat(&f));
        let empty = ClauseSubset::empty(f.num_clauses());
        assert!(!check_mcs(&f, &empty).unwrap());
        assert!(!check_mus(&f, &empty).unwrap());
    }
}
