//! Property tests for the algebraic substrate: ring axioms on the exact
//! scalars, word-split structure, and series arithmetic round trips.

use num_rational::BigRational;
use proptest::prelude::*;

use taylorjet::combinatorics::Word;
use taylorjet::expr::EvalRing;
use taylorjet::jet::series::SeriesElem;
use taylorjet::jet::Jet;
use taylorjet::Scalar;

type Q = BigRational;

fn rational() -> impl Strategy<Value = Q> {
    (-50i64..=50, 1i64..=20).prop_map(|(p, q)| taylorjet::rat(p, q))
}

fn small_word() -> impl Strategy<Value = Word> {
    (0usize..=8).prop_flat_map(|len| {
        (0u64..(1u64 << len)).prop_map(move |mask| Word::new(len, mask))
    })
}

proptest! {
    #[test]
    fn ring_axioms_hold_exactly(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&Q::zero()), Q::zero());
        prop_assert_eq!(a.add(&Q::zero()), a.clone());
        prop_assert_eq!(a.mul(&Q::one()), a.clone());
        prop_assert_eq!(a.add(&a.neg()), Q::zero());
    }

    #[test]
    fn reciprocals_invert(n in 1u64..=1000) {
        let inv = Q::inv_int(n).unwrap();
        prop_assert_eq!(inv.mul(&Q::from_int(n as i64)), Q::one());
    }

    #[test]
    fn splits_partition_the_word(w in small_word()) {
        let pairs = w.splits2();
        prop_assert_eq!(pairs.len(), 1usize << w.weight());
        for (a, b) in &pairs {
            prop_assert_eq!(a.mask() & b.mask(), 0);
            prop_assert_eq!(a.mask() | b.mask(), w.mask());
            prop_assert_eq!(a.weight() + b.weight(), w.weight());
        }
        // pairwise distinct
        for (i, p) in pairs.iter().enumerate() {
            for q in &pairs[i + 1..] {
                prop_assert_ne!(p, q);
            }
        }
    }

    #[test]
    fn series_product_is_commutative_and_distributes(
        a in prop::collection::vec(rational(), 4),
        b in prop::collection::vec(rational(), 4),
        c in prop::collection::vec(rational(), 4),
    ) {
        let (a, b, c) = (SeriesElem::new(a), SeriesElem::new(b), SeriesElem::new(c));
        prop_assert_eq!(a.ring_mul(&b), b.ring_mul(&a));
        prop_assert_eq!(
            a.ring_mul(&b.ring_add(&c)),
            a.ring_mul(&b).ring_add(&a.ring_mul(&c))
        );
    }

    #[test]
    fn series_division_inverts_multiplication(
        a in prop::collection::vec(rational(), 5),
        mut b in prop::collection::vec(rational(), 5),
    ) {
        if b[0].is_zero() {
            b[0] = Q::one();
        }
        let (a, b) = (SeriesElem::new(a), SeriesElem::new(b));
        let q = a.ring_div(&b).unwrap();
        prop_assert_eq!(q.ring_mul(&b), a);
    }

    #[test]
    fn tower_embedding_round_trips(coeffs in prop::collection::vec(rational(), 1..=6)) {
        let j = Jet::scalar_jet(&coeffs);
        let t = j.to_tower().unwrap();
        prop_assert_eq!(Jet::from_tower(&t), Some(j));
    }
}
