//! Acceptance suite: one test per criterion, each printing a PASS line
//! (run with `cargo test --test acceptance -- --nocapture` to see them).
//! Everything is exact over arbitrary-precision rationals unless a
//! tolerance is stated.

use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::Rng;

use taylorjet::combinatorics::Word;
use taylorjet::expr::SmoothMap;
use taylorjet::jet::{push, Jet, PushMethod};
use taylorjet::laws::{registry, LawConfig, LawReport};
use taylorjet::sampling::{rand_jet, rand_poly_map, rng_for};
use taylorjet::scalar::rat;
use taylorjet::Scalar;

type Q = BigRational;

fn run_named(names: &[&str], cfg: &LawConfig) -> Vec<LawReport> {
    let laws = registry();
    names
        .iter()
        .map(|name| {
            laws.iter()
                .find(|l| l.name == *name)
                .unwrap_or_else(|| panic!("law {name} not registered"))
                .run(cfg)
        })
        .collect()
}

fn assert_all_pass(criterion: &str, reports: &[LawReport]) {
    for r in reports {
        assert!(
            r.passed(),
            "criterion {criterion}: law {} failed: {}",
            r.name,
            r.failure.clone().unwrap()
        );
    }
}

fn assert_runtime(criterion: &str, elapsed: Duration, limit: Duration) {
    assert!(
        elapsed < limit,
        "criterion {criterion}: took {elapsed:?}, limit {limit:?}"
    );
}

#[test]
fn criterion_01_tower_embedding_coefficients() {
    let start = Instant::now();
    let mut rng = rng_for(1, "acceptance.tower-embedding");
    for n in 0..=6usize {
        for _ in 0..20 {
            let j = rand_jet(&mut rng, n, 2);
            let tower = j.to_tower().unwrap();
            for mask in 0..(1u64 << n) {
                let w = Word::new(n, mask);
                let weight = w.weight();
                let num: u64 = (1..=weight as u64).product();
                let scale = Q::from_int(num as i64)
                    .mul(&Q::inv_int(w.position_factorial()).unwrap());
                let want: Vec<Q> = j.coeff(weight).iter().map(|c| c.mul(&scale)).collect();
                assert_eq!(tower.proj_word(&w).unwrap(), &want[..], "n={n} w={w}");
            }
            assert_eq!(tower, j.to_tower_inductive().unwrap(), "inductive route, n={n}");
        }
    }

    // order-3 coefficient pattern, leaves in tree order: the leaf with
    // root-to-leaf address (w3, w2, w1) carries (|w|!/w!)·c_|w|
    let j = Jet::scalar_jet(&[rat(1, 1), rat(1, 1), rat(1, 1), rat(1, 1)]);
    let tower = j.to_tower().unwrap();
    let expected = [
        rat(1, 1), // 000
        rat(1, 1), // c1
        rat(1, 2), // c1/2
        rat(1, 1), // c2
        rat(1, 3), // c1/3
        rat(2, 3), // 2c2/3
        rat(1, 3), // c2/3
        rat(1, 1), // c3
    ];
    for leaf in 0..8usize {
        // the root branches on the outermost layer, so reading the tree
        // left to right enumerates coordinates in plain index order
        assert_eq!(
            tower.coords()[leaf][0], expected[leaf],
            "leaf {leaf} of the order-3 tree"
        );
    }
    let elapsed = start.elapsed();
    assert_runtime("1", elapsed, Duration::from_secs(1));
    println!("PASS criterion 1: tower embedding coefficients, n <= 6, both routes ({elapsed:?})");
}

#[test]
fn criterion_02_four_method_equivalence() {
    let start = Instant::now();
    let mut rng = rng_for(2, "acceptance.four-methods");
    for n in 1..=5usize {
        for case in 0..200usize {
            let d = rng.gen_range(1..=3);
            let e = rng.gen_range(1..=2);
            let f = rand_poly_map(&mut rng, d, e, 4, 3);
            let j = rand_jet(&mut rng, n, d);
            let reference = push(&f, &j, PushMethod::Direct).unwrap();
            for method in [PushMethod::Inductive, PushMethod::Tower, PushMethod::Operational] {
                let got = push(&f, &j, method).unwrap();
                assert_eq!(
                    got,
                    reference,
                    "n={n} case={case} method={} f={f}",
                    method.name()
                );
            }
        }
    }
    let elapsed = start.elapsed();
    assert_runtime("2", elapsed, Duration::from_secs(60));
    println!("PASS criterion 2: four methods agree on 200 instances per order 1..=5 ({elapsed:?})");
}

#[test]
fn criterion_03_cubic_instance() {
    let f: SmoothMap<Q> = taylorjet::expr::parse("x0^3").unwrap();
    let j = Jet::scalar_jet(&[rat(1, 1), rat(1, 1), rat(2, 1)]);
    let expected = Jet::scalar_jet(&[rat(1, 1), rat(3, 1), rat(9, 1)]);
    for method in PushMethod::EQUIVALENT {
        assert_eq!(push(&f, &j, method).unwrap(), expected, "{}", method.name());
    }
    println!("PASS criterion 3: x^3 at (1,1,2) gives (1,3,9) on every method");
}

#[test]
fn criterion_04_functoriality_and_kleisli() {
    let start = Instant::now();
    let mut rng = rng_for(4, "acceptance.functor");
    for case in 0..100usize {
        let d = rng.gen_range(1..=2);
        let e = rng.gen_range(1..=2);
        let f = rand_poly_map(&mut rng, d, e, 3, 3);
        let g = rand_poly_map(&mut rng, e, 1, 3, 3);
        let n = rng.gen_range(0..=4);
        let j = rand_jet(&mut rng, n, d);
        let lhs = push(&SmoothMap::compose(&g, &f), &j, PushMethod::Operational).unwrap();
        let mid = push(&f, &j, PushMethod::Operational).unwrap();
        let rhs = push(&g, &mid, PushMethod::Operational).unwrap();
        assert_eq!(lhs, rhs, "case {case}, n={n}");
    }
    let reports = run_named(
        &["jet.kleisli-functor"],
        &LawConfig {
            cases: 100,
            max_order: 4,
            ..LawConfig::default()
        },
    );
    assert_all_pass("4", &reports);
    println!(
        "PASS criterion 4: pushforward functoriality and Kleisli composition, 100 pairs, n <= 4 ({:?})",
        start.elapsed()
    );
}

#[test]
fn criterion_05_monad_and_naturality_suite() {
    let start = Instant::now();
    let cfg = LawConfig {
        cases: 100,
        max_order: 3,
        ..LawConfig::default()
    };
    let reports = run_named(
        &[
            "jet.monad-left-unit",
            "jet.monad-right-unit",
            "jet.monad-assoc",
            "jet.proj0-natural",
            "jet.unit-natural",
            "jet.mult-natural",
            "jet.scale-natural",
            "jet.swap-natural",
            "jet.lift-natural",
            "jet.truncation-natural",
            "jet.lift-block-identity",
            "jet.coeff-unit-zero",
            "jet.coeff-mult-convolution",
            "jet.coeff-swap-symmetry",
            "jet.coeff-scale-power",
        ],
        &cfg,
    );
    assert_all_pass("5", &reports);
    let elapsed = start.elapsed();
    assert_runtime("5", elapsed, Duration::from_secs(120));
    println!(
        "PASS criterion 5: monad laws and naturality of proj0/unit/mult/scale/swap/lift/truncation plus the lift block identity, 100 cases each, n <= 3 ({elapsed:?})"
    );
}

#[test]
fn criterion_06_tower_monad_structure() {
    let start = Instant::now();
    let cfg = LawConfig {
        cases: 100,
        max_order: 2,
        ..LawConfig::default()
    };
    let reports = run_named(
        &[
            "tangent.yang-baxter",
            "tangent.distributive-law",
            "tangent.monad-unit",
            "tangent.monad-assoc",
            "jet.tower-embed-monad-morphism",
        ],
        &cfg,
    );
    assert_all_pass("6", &reports);
    println!(
        "PASS criterion 6: Yang-Baxter, distributive-law squares, tower monad laws, embedding monad morphism ({:?})",
        start.elapsed()
    );
}

#[test]
fn criterion_07_higher_order_chain_rule() {
    let start = Instant::now();
    let cfg = LawConfig {
        cases: 50,
        max_order: 4,
        ..LawConfig::default()
    };
    let reports = run_named(
        &[
            "tangent.faa-di-bruno",
            "tangent.total-derivative-unordered",
            "tangent.total-derivative-ordered",
        ],
        &cfg,
    );
    assert_all_pass("7", &reports);
    println!(
        "PASS criterion 7: partition-sum chain rule and total-derivative expansions, n <= 4, 50 pairs ({:?})",
        start.elapsed()
    );
}

#[test]
fn criterion_08_strength_commutativity() {
    let start = Instant::now();
    let cfg = LawConfig {
        cases: 50,
        max_order: 3,
        ..LawConfig::default()
    };
    let reports = run_named(&["jet.strength-commutativity"], &cfg);
    assert_all_pass("8", &reports);
    println!(
        "PASS criterion 8: per-argument expansions commute and collapse to the joint expansion, 50 instances, n <= 3 ({:?})",
        start.elapsed()
    );
}

#[test]
fn criterion_09_weighted_relational_oracle() {
    let start = Instant::now();
    let cfg = LawConfig {
        cases: 50,
        max_order: 2,
        ..LawConfig::default()
    };
    let reports = run_named(
        &[
            "wrel.taylor-closed-form",
            "wrel.analytic",
            "wrel.series-reduction",
            "wrel.chain-rule",
            "wrel.functoriality",
        ],
        &cfg,
    );
    assert_all_pass("9", &reports);
    let elapsed = start.elapsed();
    assert_runtime("9", elapsed, Duration::from_secs(60));
    println!(
        "PASS criterion 9: relational Taylor closed form vs derivative route, analytic identity, series reduction ({elapsed:?})"
    );
}

#[test]
fn criterion_10_float_path() {
    let start = Instant::now();
    let reports = run_named(
        &["jet.float-coefficients", "jet.float-finite-difference"],
        &LawConfig::default(),
    );
    assert_all_pass("10", &reports);
    println!(
        "PASS criterion 10: order-8 exp/sin coefficients within 1e-12, finite differences within 1e-6/1e-4 ({:?})",
        start.elapsed()
    );
}

#[test]
fn criterion_11_negative_controls() {
    let start = Instant::now();
    let reports = run_named(
        &["jet.bis-mult-unnatural", "jet.tower-embed-lift-mismatch"],
        &LawConfig::default(),
    );
    assert_all_pass("11", &reports);
    for r in &reports {
        let witness = r.note.as_deref().expect("negative control records its witness");
        println!("  witness [{}]: {witness}", r.name);
    }
    println!(
        "PASS criterion 11: unweighted-variant multiplication unnaturality and lift-square failure, witnesses recorded ({:?})",
        start.elapsed()
    );
}
