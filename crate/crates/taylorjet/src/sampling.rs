//! Seeded random instances for the law suite: polynomial maps, jets,
//! towers, and weighted matrices, all over exact rationals with small
//! magnitudes so bignum arithmetic stays cheap.

use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::expr::{Expr, SmoothMap};
use crate::jet::{Jet, JetOfJets};
use crate::scalar::Scalar;
use crate::tangent::TowerValue;
use crate::wrel::{Multiset, WMatrix};

type Q = BigRational;

/// Per-law generator: mixes the law name into the master seed so that
/// filtering the suite never shifts another law's stream.
pub fn rng_for(seed: u64, name: &str) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

pub fn rand_q(rng: &mut ChaCha8Rng) -> Q {
    let p = rng.gen_range(-4i64..=4);
    let q = rng.gen_range(1u64..=3);
    Q::from_ratio(p, q)
}

pub fn rand_point(rng: &mut ChaCha8Rng, d: usize) -> Vec<Q> {
    (0..d).map(|_| rand_q(rng)).collect()
}

/// Sparse random polynomial: `terms` monomials of total degree at most
/// `max_degree`, small integer coefficients.
pub fn rand_poly_expr(rng: &mut ChaCha8Rng, arity: usize, max_degree: usize, terms: usize) -> Expr<Q> {
    let mut acc = Expr::zero();
    for _ in 0..terms {
        let c = loop {
            let c = rng.gen_range(-3i64..=3);
            if c != 0 {
                break c;
            }
        };
        let mut term = Expr::constant(Q::from_int(c));
        let degree = rng.gen_range(0..=max_degree);
        for _ in 0..degree {
            let v = rng.gen_range(0..arity);
            term = Expr::mul(term, Expr::var(v));
        }
        acc = Expr::add(acc, term);
    }
    acc
}

pub fn rand_poly_map(
    rng: &mut ChaCha8Rng,
    arity: usize,
    coarity: usize,
    max_degree: usize,
    terms: usize,
) -> SmoothMap<Q> {
    let body = (0..coarity)
        .map(|_| rand_poly_expr(rng, arity, max_degree, terms))
        .collect();
    SmoothMap::new(arity, body)
}

pub fn rand_linear_map(rng: &mut ChaCha8Rng, arity: usize, coarity: usize) -> SmoothMap<Q> {
    let body = (0..coarity)
        .map(|_| {
            let mut acc = Expr::zero();
            for v in 0..arity {
                acc = Expr::add(
                    acc,
                    Expr::scale(Q::from_int(rng.gen_range(-3i64..=3)), Expr::var(v)),
                );
            }
            acc
        })
        .collect();
    SmoothMap::new(arity, body)
}

pub fn rand_jet(rng: &mut ChaCha8Rng, order: usize, dim: usize) -> Jet<Q> {
    Jet::new(
        order,
        dim,
        (0..=order).map(|_| rand_point(rng, dim)).collect(),
    )
}

pub fn rand_jet_of_jets(
    rng: &mut ChaCha8Rng,
    outer: usize,
    inner: usize,
    dim: usize,
) -> JetOfJets<Q> {
    let grid = (0..=outer)
        .map(|_| (0..=inner).map(|_| rand_point(rng, dim)).collect())
        .collect();
    JetOfJets::new(outer, inner, dim, grid)
}

pub fn rand_tower(rng: &mut ChaCha8Rng, level: usize, dim: usize) -> TowerValue<Q> {
    TowerValue::new(
        level,
        dim,
        (0..(1usize << level)).map(|_| rand_point(rng, dim)).collect(),
    )
    .expect("level within bounds")
}

/// Random nonnegative finitely-supported matrix with multiset sizes at
/// most `max_size`.
pub fn rand_wmatrix(
    rng: &mut ChaCha8Rng,
    domain: &[String],
    codomain: &[String],
    max_size: usize,
    entries: usize,
) -> WMatrix {
    let mut m = WMatrix::new(domain.to_vec(), codomain.to_vec());
    for _ in 0..entries {
        let size = rng.gen_range(0..=max_size);
        let mut counts = vec![0usize; domain.len()];
        for _ in 0..size {
            counts[rng.gen_range(0..domain.len())] += 1;
        }
        let b = rng.gen_range(0..codomain.len());
        let weight = Q::from_ratio(rng.gen_range(1i64..=4), rng.gen_range(1u64..=2));
        m.set(Multiset::from_counts(counts), b, weight);
    }
    m
}
