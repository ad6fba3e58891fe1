//! Property tests for the algebraic invariants: ring axioms, operator
//! linearity, composition coherence, jet correspondence round trips, and
//! exact linear algebra bookkeeping.

use proptest::prelude::*;

use jetkernel_core::field::FieldSpec;
use jetkernel_core::jet::{jet_map_to_op, op_to_jet_map, taylor_jet};
use jetkernel_core::matrix::ExactMatrix;
use jetkernel_core::multiindex::{monomials_up_to, multi_binomial, MultiIndex};
use jetkernel_core::operator::{MatrixOperator, ScalarOperator};
use jetkernel_core::poly::{Poly, PolyVec};

fn q() -> FieldSpec {
    FieldSpec::Rationals
}

fn index_strategy(nvars: usize, max_exp: u32) -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(0..=max_exp, nvars).prop_map(MultiIndex::new)
}

fn poly_strategy(nvars: usize, max_exp: u32) -> impl Strategy<Value = Poly> {
    prop::collection::vec((index_strategy(nvars, max_exp), -6i64..=6), 0..5).prop_map(
        move |terms| {
            Poly::from_terms(
                nvars,
                q(),
                terms.into_iter().map(|(i, c)| (i, q().integer(c))),
            )
            .unwrap()
        },
    )
}

fn operator_strategy(nvars: usize) -> impl Strategy<Value = ScalarOperator> {
    prop::collection::vec((index_strategy(nvars, 2), poly_strategy(nvars, 2)), 0..4).prop_map(
        move |terms| ScalarOperator::from_terms(nvars, q(), terms).unwrap(),
    )
}

fn matrix_operator_strategy(r: usize, nvars: usize) -> impl Strategy<Value = MatrixOperator> {
    prop::collection::vec(operator_strategy(nvars), r * r).prop_map(move |entries| {
        let rows: Vec<Vec<ScalarOperator>> =
            entries.chunks(r).map(|c| c.to_vec()).collect();
        MatrixOperator::new(rows).unwrap()
    })
}

proptest! {
    #[test]
    fn poly_ring_axioms(
        a in poly_strategy(2, 3),
        b in poly_strategy(2, 3),
        c in poly_strategy(2, 3),
    ) {
        prop_assert_eq!(a.try_mul(&b).unwrap(), b.try_mul(&a).unwrap());
        prop_assert_eq!(
            a.try_mul(&b).unwrap().try_mul(&c).unwrap(),
            a.try_mul(&b.try_mul(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(
            a.try_add(&b).unwrap().try_mul(&c).unwrap(),
            a.try_mul(&c).unwrap().try_add(&b.try_mul(&c).unwrap()).unwrap()
        );
    }

    #[test]
    fn degree_is_additive_over_q(a in poly_strategy(2, 3), b in poly_strategy(2, 3)) {
        // The rationals are an integral domain, so top terms cannot cancel.
        if let (Some(da), Some(db)) = (a.total_degree(), b.total_degree()) {
            prop_assert_eq!(a.try_mul(&b).unwrap().total_degree(), Some(da + db));
        } else {
            prop_assert!(a.try_mul(&b).unwrap().is_zero());
        }
    }

    #[test]
    fn multi_binomial_vanishing_characterization(
        upper in index_strategy(3, 5),
        lower in index_strategy(3, 5),
    ) {
        let b = multi_binomial(&upper, &lower, &q()).unwrap();
        prop_assert_eq!(b.is_zero(), !lower.divides(&upper));
    }

    #[test]
    fn operator_application_is_linear(
        d in matrix_operator_strategy(2, 2),
        u in poly_strategy(2, 3),
        v in poly_strategy(2, 3),
        alpha in -5i64..=5,
        beta in -5i64..=5,
    ) {
        let u = PolyVec::new(vec![u.clone(), u]).unwrap();
        let v = PolyVec::new(vec![v.clone(), v]).unwrap();
        let (alpha, beta) = (q().integer(alpha), q().integer(beta));
        let combo = u.scale(&alpha).try_add(&v.scale(&beta)).unwrap();
        let lhs = d.apply(&combo).unwrap();
        let rhs = d.apply(&u).unwrap().scale(&alpha)
            .try_add(&d.apply(&v).unwrap().scale(&beta)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn composition_agrees_with_successive_application(
        d1 in operator_strategy(1),
        d2 in operator_strategy(1),
        v in poly_strategy(1, 6),
    ) {
        let composed = d1.compose(&d2).unwrap();
        prop_assert_eq!(
            composed.apply(&v).unwrap(),
            d1.apply(&d2.apply(&v).unwrap()).unwrap()
        );
    }

    #[test]
    fn degree_shift_bounds_output_degree(
        d in matrix_operator_strategy(2, 1),
        v in poly_strategy(1, 4),
    ) {
        let vec = PolyVec::new(vec![v.clone(), v]).unwrap();
        let out = d.apply(&vec).unwrap();
        if let (Some(dv), Some(dout)) = (vec.total_degree(), out.total_degree()) {
            let shift = d.degree_shift().map_or(0, |s| s.max(0)) as usize;
            prop_assert!(dout <= dv + shift);
        }
    }

    #[test]
    fn jet_map_round_trip(d in matrix_operator_strategy(2, 1)) {
        prop_assert_eq!(jet_map_to_op(&op_to_jet_map(&d)).unwrap(), d);
    }

    #[test]
    fn taylor_coefficients_are_hasse_derivatives(f in poly_strategy(2, 4)) {
        let n = 3;
        let jet = taylor_jet(&f, n).unwrap();
        for index in monomials_up_to(2, n) {
            prop_assert_eq!(jet.coefficient(&index), f.hasse_derivative(&index).unwrap());
        }
    }

    #[test]
    fn taylor_jet_multiplicativity(f in poly_strategy(1, 4), g in poly_strategy(1, 4)) {
        let n = 3;
        let lhs = taylor_jet(&f.try_mul(&g).unwrap(), n).unwrap();
        let rhs = taylor_jet(&f, n).unwrap().try_mul(&taylor_jet(&g, n).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn nullspace_is_sound_and_complete(
        entries in prop::collection::vec(-9i64..=9, 20),
    ) {
        let m = ExactMatrix::from_fn(4, 5, q(), |i, j| q().integer(entries[i * 5 + j])).unwrap();
        let ns = m.nullspace();
        prop_assert_eq!(m.rank() + ns.len(), 5);
        for v in &ns {
            prop_assert!(m.apply(v).iter().all(|x| x.is_zero()));
        }
        // Basis vectors are linearly independent: stacking them keeps rank.
        if !ns.is_empty() {
            let stacked = ExactMatrix::from_fn(ns.len(), 5, q(), |i, j| ns[i][j].clone()).unwrap();
            prop_assert_eq!(stacked.rank(), ns.len());
        }
    }

    #[test]
    fn pivot_minor_matches_bareiss(entries in prop::collection::vec(-9i64..=9, 12)) {
        let m = ExactMatrix::from_fn(4, 3, q(), |i, j| q().integer(entries[i * 3 + j])).unwrap();
        let red = m.reduction();
        let mut rows: Vec<usize> = red.pivots.iter().map(|&(r, _)| r).collect();
        rows.sort_unstable();
        let cols: Vec<usize> = red.pivots.iter().map(|&(_, c)| c).collect();
        let sub = m.submatrix(&rows, &cols);
        prop_assert_eq!(sub.determinant_bareiss().unwrap(), red.pivot_minor_det);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hasse_composition_identity(
        i in index_strategy(2, 3),
        j in index_strategy(2, 3),
    ) {
        let di = ScalarOperator::hasse(2, q(), i.clone()).unwrap();
        let dj = ScalarOperator::hasse(2, q(), j.clone()).unwrap();
        let sum = i.checked_add(&j).unwrap();
        let expected = ScalarOperator::hasse(2, q(), sum.clone())
            .unwrap()
            .scale(&multi_binomial(&sum, &i, &q()).unwrap());
        prop_assert_eq!(di.compose(&dj).unwrap(), expected);
    }

    #[test]
    fn matrix_composition_coherence(
        d1 in matrix_operator_strategy(2, 1),
        d2 in matrix_operator_strategy(2, 1),
        v in poly_strategy(1, 5),
    ) {
        let vec = PolyVec::new(vec![v.clone(), v]).unwrap();
        let lhs = d1.compose(&d2).unwrap().apply(&vec).unwrap();
        let rhs = d1.apply(&d2.apply(&vec).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
