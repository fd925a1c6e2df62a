//! Seeded, named property suite: every algebraic law the library claims
//! is a runnable check over exact rationals. The CLI `laws` subcommand
//! and the acceptance tests both drive this registry.

use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::{ordered_partitions, unordered_partitions, Word};
use crate::expr::SmoothMap;
use crate::jet::{
    self, merge_jets, push, push_map, strength_map, taylor_coeff_map, Jet, JetOfJets, PushMethod,
};
use crate::sampling::*;
use crate::scalar::Scalar;
use crate::tangent::{apply_map, TowerValue};
use crate::wrel::{matrix_to_series, series_to_matrix, WMatrix, WrelConfig};

type Q = BigRational;

#[derive(Clone, Debug)]
pub struct LawConfig {
    pub seed: u64,
    pub cases: usize,
    pub max_order: usize,
    /// Name fragment of a law whose computation should be deliberately
    /// corrupted, to verify that the harness catches real failures.
    pub fault: Option<String>,
}

impl Default for LawConfig {
    fn default() -> Self {
        LawConfig {
            seed: 0x7a79_1e7,
            cases: 100,
            max_order: 3,
            fault: None,
        }
    }
}

impl LawConfig {
    fn injects_fault(&self, name: &str) -> bool {
        self.fault.as_deref().is_some_and(|f| name.contains(f))
    }
}

#[derive(Clone, Debug)]
pub struct LawReport {
    pub name: &'static str,
    pub cases: usize,
    /// Recorded witness or other informational output.
    pub note: Option<String>,
    pub failure: Option<String>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

pub struct Law {
    pub name: &'static str,
    runner: Box<dyn Fn(&LawConfig) -> LawReport + Send + Sync>,
}

impl Law {
    pub fn run(&self, cfg: &LawConfig) -> LawReport {
        (self.runner)(cfg)
    }
}

type CaseResult = Result<Option<String>, String>;

fn law<F>(name: &'static str, body: F) -> Law
where
    F: Fn(&LawConfig, &mut ChaCha8Rng) -> CaseResult + Send + Sync + 'static,
{
    Law {
        name,
        runner: Box::new(move |cfg| {
            let mut rng = rng_for(cfg.seed, name);
            match body(cfg, &mut rng) {
                Ok(note) => LawReport {
                    name,
                    cases: cfg.cases,
                    note,
                    failure: None,
                },
                Err(msg) => LawReport {
                    name,
                    cases: cfg.cases,
                    note: None,
                    failure: Some(msg),
                },
            }
        }),
    }
}

/// Runs `body` once per case, decorating failures with the case index.
fn per_case(
    cfg: &LawConfig,
    rng: &mut ChaCha8Rng,
    mut body: impl FnMut(&mut ChaCha8Rng, usize) -> Result<(), String>,
) -> CaseResult {
    for case in 0..cfg.cases {
        body(rng, case).map_err(|msg| format!("case {case} (seed {}): {msg}", cfg.seed))?;
    }
    Ok(None)
}

fn expect_eq<T: PartialEq + std::fmt::Debug>(lhs: T, rhs: T, what: &str) -> Result<(), String> {
    if lhs == rhs {
        Ok(())
    } else {
        Err(format!("{what}: {lhs:?} != {rhs:?}"))
    }
}

/// Value-level pushforward used inside law bodies. The operational method
/// is exact on the polynomial fragment; its agreement with the other
/// three routes is itself a law (`jet.method-agreement`).
fn push_val(f: &SmoothMap<Q>, j: &Jet<Q>) -> Result<Jet<Q>, String> {
    push(f, j, PushMethod::Operational).map_err(|e| e.to_string())
}

fn push_jj(f: &SmoothMap<Q>, g: &JetOfJets<Q>) -> Result<JetOfJets<Q>, String> {
    jet::push_jet_of_jets(f, g, PushMethod::Operational).map_err(|e| e.to_string())
}

/// Tower embedding of a jet-of-jets: embed the outer jet over flattened
/// inner jets, then embed every coordinate.
fn jj_to_tower(g: &JetOfJets<Q>) -> Result<TowerValue<Q>, String> {
    let outer = g.outer_order();
    let inner = g.inner_order();
    let d = g.dim();
    let outer_t = g.to_flat().to_tower().map_err(|e| e.to_string())?;
    let mut coords = vec![vec![Q::zero(); d]; 1 << (outer + inner)];
    for v in 0..(1usize << outer) {
        let inner_jet = Jet::from_flat(inner, d, &outer_t.coords()[v]);
        let inner_t = inner_jet.to_tower().map_err(|e| e.to_string())?;
        for u in 0..(1usize << inner) {
            coords[(v << inner) | u] = inner_t.coords()[u].clone();
        }
    }
    TowerValue::new(outer + inner, d, coords).map_err(|e| e.to_string())
}

fn eta_map(d: usize, n: usize) -> SmoothMap<Q> {
    use crate::expr::Expr;
    let mut body: Vec<Expr<Q>> = (0..d).map(Expr::var).collect();
    for _ in 0..(n * d) {
        body.push(Expr::zero());
    }
    SmoothMap::new(d, body)
}

fn small_dims(rng: &mut ChaCha8Rng) -> (usize, usize) {
    (rng.gen_range(1..=2), rng.gen_range(1..=2))
}

fn poly_pair(rng: &mut ChaCha8Rng) -> (SmoothMap<Q>, SmoothMap<Q>, usize) {
    let (d, e) = small_dims(rng);
    let f = rand_poly_map(rng, d, e, 3, 3);
    let g = rand_poly_map(rng, e, 1, 3, 3);
    (f, g, d)
}

// ───────────────────────── expr laws ─────────────────────────

fn expr_laws() -> Vec<Law> {
    vec![
        law("expr.chain-rule", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let (f, g, d) = poly_pair(rng);
                let lhs = SmoothMap::compose(&g, &f).total_derivative();
                let f_pi0 = SmoothMap::compose(&f, &SmoothMap::proj_block(d, 2, 0));
                let rhs = SmoothMap::compose(
                    &g.total_derivative(),
                    &SmoothMap::pairing(&[&f_pi0, &f.total_derivative()]),
                );
                let p = rand_point(rng, 2 * d);
                expect_eq(
                    lhs.eval(&p).map_err(|e| e.to_string())?,
                    rhs.eval(&p).map_err(|e| e.to_string())?,
                    &format!("chain rule on f={f}, g={g}"),
                )
            })
        }),
        law("expr.derivative-additive", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let d = rng.gen_range(1..=2);
                let f = rand_poly_map(rng, d, 1, 4, 3).total_derivative();
                let x = rand_point(rng, d);
                let u = rand_point(rng, d);
                let v = rand_point(rng, d);
                let r = rand_q(rng);
                let at = |dir: &[Q]| -> Result<Vec<Q>, String> {
                    let mut p = x.clone();
                    p.extend(dir.iter().cloned());
                    f.eval(&p).map_err(|e| e.to_string())
                };
                let sum: Vec<Q> = u.iter().zip(&v).map(|(a, b)| a.add(b)).collect();
                let scaled: Vec<Q> = u.iter().map(|a| a.mul(&r)).collect();
                let fu = at(&u)?;
                let fv = at(&v)?;
                let fsum = at(&sum)?;
                let want: Vec<Q> = fu.iter().zip(&fv).map(|(a, b)| a.add(b)).collect();
                expect_eq(fsum, want, "additivity in the direction")?;
                let fscaled = at(&scaled)?;
                let want: Vec<Q> = fu.iter().map(|a| a.mul(&r)).collect();
                expect_eq(fscaled, want, "homogeneity in the direction")
            })
        }),
        law("expr.derivative-lift", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let d = rng.gen_range(1..=2);
                let f = rand_poly_map(rng, d, 1, 4, 3);
                let dd = f.total_derivative().total_derivative();
                let x = rand_point(rng, d);
                let u = rand_point(rng, d);
                let mut p = x.clone();
                p.extend(vec![Q::zero(); 2 * d]);
                p.extend(u.iter().cloned());
                let lhs = dd.eval(&p).map_err(|e| e.to_string())?;
                let mut q = x.clone();
                q.extend(u.iter().cloned());
                let rhs = f.total_derivative().eval(&q).map_err(|e| e.to_string())?;
                expect_eq(lhs, rhs, &format!("second derivative at (x,0,0,u) for f={f}"))
            })
        }),
        law("expr.derivative-symmetry", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let d = rng.gen_range(1..=2);
                let f = rand_poly_map(rng, d, 1, 4, 3);
                let dd = f.total_derivative().total_derivative();
                let x = rand_point(rng, d);
                let u = rand_point(rng, d);
                let v = rand_point(rng, d);
                let w = rand_point(rng, d);
                let mut p = x.clone();
                p.extend(u.iter().cloned());
                p.extend(v.iter().cloned());
                p.extend(w.iter().cloned());
                let mut q = x.clone();
                q.extend(v.iter().cloned());
                q.extend(u.iter().cloned());
                q.extend(w.iter().cloned());
                expect_eq(
                    dd.eval(&p).map_err(|e| e.to_string())?,
                    dd.eval(&q).map_err(|e| e.to_string())?,
                    &format!("mixed-direction symmetry for f={f}"),
                )
            })
        }),
        law("expr.derivative-pairing", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let d = rng.gen_range(1..=2);
                let f = rand_poly_map(rng, d, 1, 4, 3);
                let g = rand_poly_map(rng, d, 1, 4, 3);
                let lhs = SmoothMap::pairing(&[&f, &g]).total_derivative();
                let rhs = SmoothMap::pairing(&[&f.total_derivative(), &g.total_derivative()]);
                let p = rand_point(rng, 2 * d);
                expect_eq(
                    lhs.eval(&p).map_err(|e| e.to_string())?,
                    rhs.eval(&p).map_err(|e| e.to_string())?,
                    "derivative of a pairing",
                )
            })
        }),
        law("expr.higher-derivative-symmetric", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let d = rng.gen_range(1..=2);
                let n = rng.gen_range(2..=3);
                let f = rand_poly_map(rng, d, 1, 4, 3).higher_derivative(n);
                let x = rand_point(rng, d);
                let dirs: Vec<Vec<Q>> = (0..n).map(|_| rand_point(rng, d)).collect();
                let eval_at = |order: &[usize]| -> Result<Vec<Q>, String> {
                    let mut p = x.clone();
                    for i in order {
                        p.extend(dirs[*i].iter().cloned());
                    }
                    f.eval(&p).map_err(|e| e.to_string())
                };
                let base_order: Vec<usize> = (0..n).collect();
                let base = eval_at(&base_order)?;
                // random transposition
                let mut perm = base_order.clone();
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                perm.swap(a, b);
                expect_eq(eval_at(&perm)?, base.clone(), "direction symmetry")?;
                // linearity in the last slot
                let r = rand_q(rng);
                let mut p = x.clone();
                for dir in dirs.iter().take(n - 1) {
                    p.extend(dir.iter().cloned());
                }
                p.extend(dirs[n - 1].iter().map(|c| c.mul(&r)));
                let scaled = f.eval(&p).map_err(|e| e.to_string())?;
                let want: Vec<Q> = base.iter().map(|c| c.mul(&r)).collect();
                expect_eq(scaled, want, "linearity in the last direction")
            })
        }),
        law("expr.second-derivative-split", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let d = rng.gen_range(1..=2);
                let f = rand_poly_map(rng, d, 1, 4, 3);
                let dd = f.total_derivative().total_derivative();
                let x = rand_point(rng, d);
                let u = rand_point(rng, d);
                let v = rand_point(rng, d);
                let w = rand_point(rng, d);
                let mut p = x.clone();
                p.extend(u.iter().cloned());
                p.extend(v.iter().cloned());
                p.extend(w.iter().cloned());
                let lhs = dd.eval(&p).map_err(|e| e.to_string())?;
                let h2 = f.higher_derivative(2);
                let mut q = x.clone();
                q.extend(u.iter().cloned());
                q.extend(v.iter().cloned());
                let a = h2.eval(&q).map_err(|e| e.to_string())?;
                let mut s = x.clone();
                s.extend(w.iter().cloned());
                let b = f.total_derivative().eval(&s).map_err(|e| e.to_string())?;
                let rhs: Vec<Q> = a.iter().zip(&b).map(|(p, q)| p.add(q)).collect();
                expect_eq(lhs, rhs, "second total derivative decomposition")
            })
        }),
    ]
}

// ───────────────────────── tangent laws ─────────────────────────

fn tangent_laws() -> Vec<Law> {
    vec![
        law("tangent.functor", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let (f, g, d) = poly_pair(rng);
                let n = rng.gen_range(0..=3);
                let t = rand_tower(rng, n, d);
                let lhs = apply_map(&SmoothMap::compose(&g, &f), &t).map_err(|e| e.to_string())?;
                let mid = apply_map(&f, &t).map_err(|e| e.to_string())?;
                let rhs = apply_map(&g, &mid).map_err(|e| e.to_string())?;
                expect_eq(lhs, rhs, &format!("iterated tangent functoriality, n={n}"))
            })
        }),
        law("tangent.unit-natural", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let (d, e) = small_dims(rng);
                let f = rand_poly_map(rng, d, e, 3, 3);
                let n = rng.gen_range(0..=3);
                let x = rand_point(rng, d);
                let lhs = apply_map(&f, &TowerValue::eta(&x, n).map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
                let rhs = TowerValue::eta(&f.eval(&x).map_err(|e| e.to_string())?, n)
                    .map_err(|e| e.to_string())?;
                expect_eq(lhs, rhs, "unit naturality")
            })
        }),
        law("tangent.mult-natural", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let (d, e) = small_dims(rng);
                let f = rand_poly_map(rng, d, e, 3, 3);
                let n = rng.gen_range(1..=2);
                let t = rand_tower(rng, 2 * n, d);
                let lhs = apply_map(&f, &t.mu().map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
                let rhs = apply_map(&f, &t)
                    .map_err(|e| e.to_string())?
                    .mu()
                    .map_err(|e| e.to_string())?;
                expect_eq(lhs, rhs, &format!("multiplication naturality, n={n}"))
            })
        }),
        law("tangent.swap-natural", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let (d, e) = small_dims(rng);
                let f = rand_poly_map(rng, d, e, 3, 3);
                let n = rng.gen_range(1..=2);
                let m = rng.gen_range(1..=2);
                let t = rand_tower(rng, n + m, d);
                let lhs = apply_map(&f, &t.swap(n, m).map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
                let rhs = apply_map(&f, &t)
                    .map_err(|e| e.to_string())?
                    .swap(n, m)
                    .map_err(|e| e.to_string())?;
                expect_eq(lhs, rhs, &format!("swap naturality, n={n}, m={m}"))
            })
        }),
        law("tangent.scale-natural", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let (d, e) = small_dims(rng);
                let f = rand_poly_map(rng, d, e, 3, 3);
                let n = rng.gen_range(0..=3);
                let r = rand_q(rng);
                let t = rand_tower(rng, n, d);
                let lhs = apply_map(&f, &t.scale(&r)).map_err(|e| e.to_string())?;
                let rhs = apply_map(&f, &t).map_err(|e| e.to_string())?.scale(&r);
                expect_eq(lhs, rhs, "scaling naturality")
            })
        }),
        law("tangent.lift-natural", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let (d, e) = small_dims(rng);
                let f = rand_poly_map(rng, d, e, 3, 3);
                let t = rand_tower(rng, 1, d);
                let lhs = apply_map(&f, &t.lift().map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
                let rhs = apply_map(&f, &t)
                    .map_err(|e| e.to_string())?
                    .lift()
                    .map_err(|e| e.to_string())?;
                expect_eq(lhs, rhs, "lift naturality at the first level")
            })
        }),
        law("tangent.sum-homothety-linear", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let d = rng.gen_range(1..=2);
                let sigma = SmoothMap::sigma(d);
                let t = rand_tower(rng, 1, 2 * d);
                let lhs = apply_map(&sigma, &t).map_err(|e| e.to_string())?;
                // S σ: apply σ to every coordinate
                let coords: Vec<Vec<Q>> = t
                    .coords()
                    .iter()
                    .map(|c| sigma.eval(c).map_err(|e| e.to_string()))
                    .collect::<Result<_, _>>()?;
                let rhs = TowerValue::new(1, d, coords).map_err(|e| e.to_string())?;
                expect_eq(lhs, rhs, "sum map pushes coordinatewise")?;

                let r = rand_q(rng);
                let h = SmoothMap::homothety(d, &r);
                let t = rand_tower(rng, 1, d);
                let lhs = apply_map(&h, &t).map_err(|e| e.to_string())?;
                let coords: Vec<Vec<Q>> = t
                    .coords()
                    .iter()
                    .map(|c| h.eval(c).map_err(|e| e.to_string()))
                    .collect::<Result<_, _>>()?;
                let rhs = TowerValue::new(1, d, coords).map_err(|e| e.to_string())?;
                expect_eq(lhs, rhs, "homothety pushes coordinatewise")
            })
        }),
        law("tangent.monad-unit", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let n = rng.gen_range(1..=2);
                let t = rand_tower(rng, n, 1);
                let via_top = t
                    .eta_top(n)
                    .map_err(|e| e.to_string())?
                    .mu()
                    .map_err(|e| e.to_string())?;
                expect_eq(via_top, t.clone(), "unit applied outside")?;
                let via_inner = t
                    .eta_inner(n)
                    .map_err(|e| e.to_string())?
                    .mu()
                    .map_err(|e| e.to_string())?;
                expect_eq(via_inner, t, "unit applied inside")
            })
        }),
        law("tangent.monad-assoc", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let n = rng.gen_range(1..=2);
                let t = rand_tower(rng, 3 * n, 1);
                let left = t
                    .mu_top(n)
                    .map_err(|e| e.to_string())?
                    .mu()
                    .map_err(|e| e.to_string())?;
                let right = t
                    .map_under_top(n, |sub| sub.mu())
                    .map_err(|e| e.to_string())?
                    .mu()
                    .map_err(|e| e.to_string())?;
                expect_eq(left, right, &format!("associativity at n={n}"))
            })
        }),
        law("tangent.yang-baxter", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let d = rng.gen_range(1..=2);
                let t = rand_tower(rng, 3, d);
                let lhs = t.swap_adjacent(1).swap_adjacent(2).swap_adjacent(1);
                let rhs = t.swap_adjacent(2).swap_adjacent(1).swap_adjacent(2);
                expect_eq(lhs, rhs, "Yang-Baxter braid")
            })
        }),
        law("tangent.distributive-law", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let d = rng.gen_range(1..=2);
                let t = rand_tower(rng, 1, d);
                // unit squares
                let lhs = t
                    .eta_top(1)
                    .map_err(|e| e.to_string())?
                    .swap(1, 1)
                    .map_err(|e| e.to_string())?;
                expect_eq(lhs, t.eta_inner(1).map_err(|e| e.to_string())?, "swap ∘ (η S) = S η")?;
                let lhs = t
                    .eta_inner(1)
                    .map_err(|e| e.to_string())?
                    .swap(1, 1)
                    .map_err(|e| e.to_string())?;
                expect_eq(lhs, t.eta_top(1).map_err(|e| e.to_string())?, "swap ∘ (S η) = η S")?;

                // multiplication squares on a level-3 value
                let u = rand_tower(rng, 3, d);
                let lhs = u
                    .mu_top(1)
                    .map_err(|e| e.to_string())?
                    .swap(1, 1)
                    .map_err(|e| e.to_string())?;
                let rhs = u
                    .swap_adjacent(1)
                    .swap_adjacent(2)
                    .map_under_top(1, |sub| sub.mu())
                    .map_err(|e| e.to_string())?;
                expect_eq(lhs, rhs, "swap ∘ (μ S) = (S μ)(swap S)(S swap)")?;
                let lhs = u
                    .map_under_top(1, |sub| sub.mu())
                    .map_err(|e| e.to_string())?
                    .swap(1, 1)
                    .map_err(|e| e.to_string())?;
                let rhs = u
                    .swap_adjacent(2)
                    .swap_adjacent(1)
                    .mu_top(1)
                    .map_err(|e| e.to_string())?;
                expect_eq(lhs, rhs, "swap ∘ (S μ) = (μ S)(S swap)(swap S)")
            })
        }),
        law("tangent.faa-di-bruno", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let (f, g, d) = poly_pair(rng);
                let n = rng.gen_range(1..=4);
                let lhs = SmoothMap::compose(&g, &f).higher_derivative(n);
                // Σ over partitions {I₁…I_k} of ∂̂^k g ∘ ⟨f∘π₀, f_{I₁}, …⟩
                let items: Vec<usize> = (1..=n).collect();
                let f_base = SmoothMap::compose(&f, &SmoothMap::proj_block(d, n + 1, 0));
                let mut rhs: Option<SmoothMap<Q>> = None;
                for family in unordered_partitions(&items) {
                    let k = family.len();
                    let mut parts: Vec<SmoothMap<Q>> = vec![f_base.clone()];
                    for block in &family {
                        let mut blocks = vec![0usize];
                        blocks.extend(block.iter().cloned());
                        let sel_body: Vec<crate::expr::Expr<Q>> = blocks
                            .iter()
                            .flat_map(|b| (0..d).map(move |c| crate::expr::Expr::var(b * d + c)))
                            .collect();
                        let sel = SmoothMap::new(d * (n + 1), sel_body);
                        parts.push(SmoothMap::compose(&f.higher_derivative(block.len()), &sel));
                    }
                    let refs: Vec<&SmoothMap<Q>> = parts.iter().collect();
                    let term = SmoothMap::compose(&g.higher_derivative(k), &SmoothMap::pairing(&refs));
                    rhs = Some(match rhs {
                        None => term,
                        Some(acc) => SmoothMap::add_maps(&acc, &term),
                    });
                }
                let rhs = rhs.unwrap();
                let p = rand_point(rng, d * (n + 1));
                expect_eq(
                    lhs.eval(&p).map_err(|e| e.to_string())?,
                    rhs.eval(&p).map_err(|e| e.to_string())?,
                    &format!("higher-order chain rule at n={n}"),
                )
            })
        }),
        law("tangent.total-derivative-unordered", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let (d, e) = small_dims(rng);
                let f = rand_poly_map(rng, d, e, 3, 3);
                let n = rng.gen_range(1..=4);
                let t = rand_tower(rng, n, d);
                let lhs = apply_map(&f, &t).map_err(|e| e.to_string())?.top_corner().to_vec();
                let items: Vec<usize> = (1..=n).collect();
                let mut rhs = vec![Q::zero(); e];
                for family in unordered_partitions(&items) {
                    let k = family.len();
                    let mut point = t.proj_word(&Word::zero(n)).map_err(|e| e.to_string())?.to_vec();
                    for block in &family {
                        let mask: u64 = block.iter().map(|i| 1u64 << (i - 1)).sum();
                        point.extend(
                            t.proj_word(&Word::new(n, mask))
                                .map_err(|e| e.to_string())?
                                .iter()
                                .cloned(),
                        );
                    }
                    let val = f.higher_derivative(k).eval(&point).map_err(|e| e.to_string())?;
                    for (acc, v) in rhs.iter_mut().zip(val) {
                        *acc = acc.add(&v);
                    }
                }
                expect_eq(lhs, rhs, &format!("unordered partition expansion, n={n}"))
            })
        }),
        law("tangent.total-derivative-ordered", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let (d, e) = small_dims(rng);
                let f = rand_poly_map(rng, d, e, 3, 3);
                let n = rng.gen_range(1..=4);
                let t = rand_tower(rng, n, d);
                let lhs = apply_map(&f, &t).map_err(|e| e.to_string())?.top_corner().to_vec();
                let items: Vec<usize> = (1..=n).collect();
                let mut rhs = vec![Q::zero(); e];
                for tuple in ordered_partitions(&items) {
                    let k = tuple.len();
                    let kfact: u64 = (1..=k as u64).product();
                    let weight = Q::inv_int(kfact).expect("positive");
                    let mut point = t.proj_word(&Word::zero(n)).map_err(|e| e.to_string())?.to_vec();
                    for block in &tuple {
                        let mask: u64 = block.iter().map(|i| 1u64 << (i - 1)).sum();
                        point.extend(
                            t.proj_word(&Word::new(n, mask))
                                .map_err(|e| e.to_string())?
                                .iter()
                                .cloned(),
                        );
                    }
                    let val = f.higher_derivative(k).eval(&point).map_err(|e| e.to_string())?;
                    for (acc, v) in rhs.iter_mut().zip(val) {
                        *acc = acc.add(&v.mul(&weight));
                    }
                }
                expect_eq(lhs, rhs, &format!("ordered partition expansion, n={n}"))
            })
        }),
    ]
}

// ───────────────────────── jet laws ─────────────────────────

fn jet_laws() -> Vec<Law> {
    vec![
        law("jet.method-agreement", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let d = rng.gen_range(1..=3);
                let e = rng.gen_range(1..=2);
                let f = rand_poly_map(rng, d, e, 4, 3);
                let n = rng.gen_range(1..=cfg.max_order.min(5).max(1));
                let j = rand_jet(rng, n, d);
                let reference = push(&f, &j, PushMethod::Direct).map_err(|e| e.to_string())?;
                for method in [PushMethod::Inductive, PushMethod::Tower, PushMethod::Operational] {
                    let got = push(&f, &j, method).map_err(|e| e.to_string())?;
                    if got != reference {
                        return Err(format!(
                            "{} disagrees with direct on f={f}, jet={j:?}: {got:?} vs {reference:?}",
                            method.name()
                        ));
                    }
                }
                Ok(())
            })
        }),
        law("jet.functor", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let (f, g, d) = poly_pair(rng);
                let n = rng.gen_range(0..=cfg.max_order.max(1));
                let j = rand_jet(rng, n, d);
                let lhs = push_val(&SmoothMap::compose(&g, &f), &j)?;
                let rhs = push_val(&g, &push_val(&f, &j)?)?;
                expect_eq(lhs, rhs, &format!("pushforward functoriality, n={n}"))
            })
        }),
        law("jet.functor-bis", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let (f, g, d) = poly_pair(rng);
                let n = rng.gen_range(0..=cfg.max_order.max(1));
                let j = rand_jet(rng, n, d);
                let lhs = push(&SmoothMap::compose(&g, &f), &j, PushMethod::Bis)
                    .map_err(|e| e.to_string())?;
                let rhs = push(&g, &push(&f, &j, PushMethod::Bis).map_err(|e| e.to_string())?, PushMethod::Bis)
                    .map_err(|e| e.to_string())?;
                expect_eq(lhs, rhs, &format!("unweighted pushforward functoriality, n={n}"))
            })
        }),
        law("jet.kleisli-functor", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                use crate::expr::Expr;
                let (f, g, d) = poly_pair(rng);
                let e = f.coarity();
                let n = rng.gen_range(1..=cfg.max_order.max(1));
                // F : x ↦ T_n f (x, fixed directions)
                let dirs: Vec<Vec<Q>> = (0..n).map(|_| rand_point(rng, d)).collect();
                let mut with_dirs: Vec<Expr<Q>> = (0..d).map(Expr::var).collect();
                for dir in &dirs {
                    with_dirs.extend(dir.iter().cloned().map(Expr::constant));
                }
                let f_map = SmoothMap::compose(
                    &push_map(&f, n).map_err(|e| e.to_string())?,
                    &SmoothMap::new(d, with_dirs),
                );
                let big_f = jet::JetMap::new(n, e, f_map);
                let composite = jet::kleisli_compose(&jet::JetMap::pure(&g, n), &big_f)
                    .map_err(|e| e.to_string())?;
                let x = rand_point(rng, d);
                let mut source = vec![x.clone()];
                source.extend(dirs.iter().cloned());
                let source = Jet::new(n, d, source);
                let want = push_val(&SmoothMap::compose(&g, &f), &source)?;
                expect_eq(
                    composite.apply(&x).map_err(|e| e.to_string())?,
                    want,
                    "Kleisli composition matches the functor",
                )
            })
        }),
        law("jet.monad-left-unit", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let n = rng.gen_range(0..=cfg.max_order.max(1));
                let d = rng.gen_range(1..=2);
                let j = rand_jet(rng, n, d);
                let back = JetOfJets::eta_outer(&j, n).mu().map_err(|e| e.to_string())?;
                expect_eq(back, j, "μ ∘ η = id")
            })
        }),
        law("jet.monad-right-unit", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let d = rng.gen_range(1..=2);
                let n = rng.gen_range(0..=cfg.max_order.max(1));
                let j = rand_jet(rng, n, d);
                // T_n η computed as an actual pushforward
                let pushed = push_val(&eta_map(d, n), &j)?;
                let as_grid = JetOfJets::from_flat(&pushed, n, d);
                expect_eq(
                    as_grid.clone(),
                    JetOfJets::eta_inner(&j, n),
                    "T_n η is the coefficientwise unit",
                )?;
                expect_eq(as_grid.mu().map_err(|e| e.to_string())?, j, "μ ∘ T_n η = id")
            })
        }),
        law("jet.monad-assoc", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let d = rng.gen_range(1..=2);
                let n = rng.gen_range(1..=cfg.max_order.max(1));
                let width = d * (n + 1);
                let v = rand_jet(rng, n, width * (n + 1));
                // collapse the outer two layers first
                let left = JetOfJets::from_flat(&v, n, width)
                    .mu()
                    .map_err(|e| e.to_string())?;
                let left = JetOfJets::from_flat(&left, n, d).mu().map_err(|e| e.to_string())?;
                // collapse the inner two layers first
                let collapsed: Vec<Vec<Q>> = v
                    .coeffs()
                    .iter()
                    .map(|c| {
                        let inner = Jet::from_flat(n, width / (n + 1) * (n + 1), c);
                        // c is a flattened jet-of-jets over dimension d
                        let jj = JetOfJets::from_flat(&Jet::from_flat(n, d * (n + 1), c), n, d);
                        let _ = inner;
                        jj.mu().map(|m| m.flatten()).map_err(|e| e.to_string())
                    })
                    .collect::<Result<_, _>>()?;
                let right = Jet::new(n, d * (n + 1), collapsed);
                let right = JetOfJets::from_flat(&right, n, d).mu().map_err(|e| e.to_string())?;
                expect_eq(left, right, &format!("μ associativity at n={n}"))
            })
        }),
        law("jet.proj0-natural", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let (d, e) = small_dims(rng);
                let f = rand_poly_map(rng, d, e, 4, 3);
                let n = rng.gen_range(0..=cfg.max_order.max(1));
                let j = rand_jet(rng, n, d);
                let pushed = push_val(&f, &j)?;
                expect_eq(
                    pushed.base().to_vec(),
                    f.eval(j.base()).map_err(|e| e.to_string())?,
                    "base point naturality",
                )
            })
        }),
        law("jet.unit-natural", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let (d, e) = small_dims(rng);
                let f = rand_poly_map(rng, d, e, 4, 3);
                let n = rng.gen_range(0..=cfg.max_order.max(1));
                let x = rand_point(rng, d);
                let lhs = push_val(&f, &Jet::eta(&x, n))?;
                let rhs = Jet::eta(&f.eval(&x).map_err(|e| e.to_string())?, n);
                expect_eq(lhs, rhs, "unit naturality")
            })
        }),
        law("jet.mult-natural", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let (d, e) = small_dims(rng);
                let f = rand_poly_map(rng, d, e, 3, 3);
                let n = rng.gen_range(1..=cfg.max_order.max(1));
                let g = rand_jet_of_jets(rng, n, n, d);
                let lhs = push_val(&f, &g.mu().map_err(|e| e.to_string())?)?;
                let rhs = push_jj(&f, &g)?.mu().map_err(|e| e.to_string())?;
                expect_eq(lhs, rhs, &format!("multiplication naturality, n={n}"))
            })
        }),
        law("jet.scale-natural", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let (d, e) = small_dims(rng);
                let f = rand_poly_map(rng, d, e, 4, 3);
                let n = rng.gen_range(0..=cfg.max_order.max(1));
                let j = rand_jet(rng, n, d);
                let r = rand_q(rng);
                let lhs = push_val(&f, &j.scale(&r))?;
                let rhs = push_val(&f, &j)?.scale(&r);
                expect_eq(lhs, rhs, "scaling naturality")
            })
        }),
        law("jet.swap-natural", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let (d, e) = small_dims(rng);
                let f = rand_poly_map(rng, d, e, 3, 3);
                let n = rng.gen_range(1..=2);
                let m = rng.gen_range(1..=2);
                let g = rand_jet_of_jets(rng, n, m, d);
                // T_n T_m f, then swap
                let inner_map = push_map(&f, m).map_err(|e| e.to_string())?;
                let lhs = JetOfJets::from_flat(
                    &push_val(&inner_map, &g.to_flat())?,
                    m,
                    e,
                )
                .swap();
                // swap, then T_m T_n f
                let swapped = g.swap();
                let inner_map_n = push_map(&f, n).map_err(|e| e.to_string())?;
                let rhs = JetOfJets::from_flat(
                    &push_val(&inner_map_n, &swapped.to_flat())?,
                    n,
                    e,
                );
                expect_eq(lhs, rhs, &format!("distributive swap naturality, n={n}, m={m}"))
            })
        }),
        law("jet.lift-natural", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let (d, e) = small_dims(rng);
                let f = rand_poly_map(rng, d, e, 3, 3);
                let n = rng.gen_range(1..=cfg.max_order.max(1));
                let j = rand_jet(rng, n, d);
                let lhs = push_jj(&f, &JetOfJets::lift(&j))?;
                let rhs = JetOfJets::lift(&push_val(&f, &j)?);
                expect_eq(lhs, rhs, &format!("lift naturality, n={n}"))
            })
        }),
        law("jet.truncation-natural", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let (d, e) = small_dims(rng);
                let f = rand_poly_map(rng, d, e, 4, 3);
                let n = rng.gen_range(0..=5);
                let j = rand_jet(rng, n, d);
                let pushed = push_val(&f, &j)?;
                for m in 0..=n {
                    let lhs = pushed.truncate(m);
                    let rhs = push_val(&f, &j.truncate(m))?;
                    expect_eq(lhs, rhs, &format!("truncation cone at m={m}, n={n}"))?;
                }
                Ok(())
            })
        }),
        law("jet.lift-block-identity", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let d = rng.gen_range(1..=2);
                let f = rand_poly_map(rng, d, 1, 3, 3);
                let n = rng.gen_range(1..=cfg.max_order.min(3).max(1));
                let j = rand_jet(rng, n, d);
                let lifted = JetOfJets::lift(&j);
                for i in 0..=n {
                    let t_i = taylor_coeff_map(&f, i);
                    for k in 0..=n {
                        // t_k t_i f on the (k, i)-truncated lift
                        let t_ki = taylor_coeff_map(&t_i, k);
                        let block = lifted.truncate(k, i);
                        let got = t_ki.eval(&block.to_flat().flatten()).map_err(|e| e.to_string())?;
                        let want = if i == k {
                            t_i.eval(&j.truncate(i).flatten()).map_err(|e| e.to_string())?
                        } else {
                            vec![Q::zero(); 1]
                        };
                        expect_eq(got, want, &format!("lift block (i={i}, k={k}), n={n}"))?;
                    }
                }
                Ok(())
            })
        }),
        law("jet.coeff-unit-zero", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let d = rng.gen_range(1..=2);
                let f = rand_poly_map(rng, d, 1, 4, 3);
                let n = rng.gen_range(1..=cfg.max_order.max(1));
                let x = rand_point(rng, d);
                let t_n = taylor_coeff_map(&f, n);
                let got = t_n.eval(&Jet::eta(&x, n).flatten()).map_err(|e| e.to_string())?;
                expect_eq(got, vec![Q::zero()], &format!("coefficient {n} of a constant jet"))
            })
        }),
        law("jet.coeff-mult-convolution", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let d = rng.gen_range(1..=2);
                let f = rand_poly_map(rng, d, 1, 3, 3);
                let n = rng.gen_range(1..=cfg.max_order.min(3).max(1));
                let g = rand_jet_of_jets(rng, n, n, d);
                let t_n = taylor_coeff_map(&f, n);
                let lhs = t_n
                    .eval(&g.mu().map_err(|e| e.to_string())?.flatten())
                    .map_err(|e| e.to_string())?;
                let mut rhs = vec![Q::zero(); 1];
                for i in 0..=n {
                    let t_i = taylor_coeff_map(&f, i);
                    let t_ni = taylor_coeff_map(&t_i, n - i);
                    let block = g.truncate(n - i, i);
                    let v = t_ni.eval(&block.to_flat().flatten()).map_err(|e| e.to_string())?;
                    rhs[0] = rhs[0].add(&v[0]);
                }
                expect_eq(lhs, rhs, &format!("coefficient convolution at n={n}"))
            })
        }),
        law("jet.coeff-swap-symmetry", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let d = rng.gen_range(1..=2);
                let f = rand_poly_map(rng, d, 1, 3, 3);
                let n = rng.gen_range(1..=2);
                let m = rng.gen_range(1..=2);
                let g = rand_jet_of_jets(rng, n, m, d);
                let t_m = taylor_coeff_map(&f, m);
                let lhs = taylor_coeff_map(&t_m, n)
                    .eval(&g.to_flat().flatten())
                    .map_err(|e| e.to_string())?;
                let t_n = taylor_coeff_map(&f, n);
                let rhs = taylor_coeff_map(&t_n, m)
                    .eval(&g.swap().to_flat().flatten())
                    .map_err(|e| e.to_string())?;
                expect_eq(lhs, rhs, &format!("coefficient swap symmetry, n={n}, m={m}"))
            })
        }),
        law("jet.coeff-scale-power", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let d = rng.gen_range(1..=2);
                let f = rand_poly_map(rng, d, 1, 4, 3);
                let n = rng.gen_range(1..=cfg.max_order.max(1));
                let j = rand_jet(rng, n, d);
                let r = rand_q(rng);
                let t_n = taylor_coeff_map(&f, n);
                let lhs = t_n.eval(&j.scale(&r).flatten()).map_err(|e| e.to_string())?;
                let factor = r.powi(n as u32);
                let rhs: Vec<Q> = t_n
                    .eval(&j.flatten())
                    .map_err(|e| e.to_string())?
                    .into_iter()
                    .map(|v| v.mul(&factor))
                    .collect();
                expect_eq(lhs, rhs, &format!("coefficient scaling at n={n}"))
            })
        }),
        law("jet.tower-embed-explicit", |cfg, rng| {
            let inject = cfg.injects_fault("tower-embed");
            per_case(cfg, rng, move |rng, _| {
                let d = rng.gen_range(1..=2);
                let n = rng.gen_range(1..=6);
                let j = rand_jet(rng, n, d);
                let mut tower = j.to_tower().map_err(|e| e.to_string())?;
                if inject {
                    // deliberately corrupt one scaled coordinate
                    let w = Word::new(n, 1);
                    let c = &mut tower.coord_mut(&w)[0];
                    *c = c.add(&Q::one());
                }
                for mask in 0..(1u64 << n) {
                    let w = Word::new(n, mask);
                    let weight = w.weight();
                    let num: u64 = (1..=weight as u64).product();
                    let scale = Q::from_int(num as i64)
                        .mul(&Q::inv_int(w.position_factorial()).expect("positive"));
                    let want: Vec<Q> = j.coeff(weight).iter().map(|c| c.mul(&scale)).collect();
                    let got = tower.proj_word(&w).map_err(|e| e.to_string())?;
                    if got != &want[..] {
                        return Err(format!(
                            "embedding coordinate {w} should be (|w|!/w!)·c_{weight} = {want:?}, got {got:?}"
                        ));
                    }
                }
                let inductive = j.to_tower_inductive().map_err(|e| e.to_string())?;
                expect_eq(tower, inductive, "closed form vs layer recursion")
            })
        }),
        law("jet.tower-embed-monic", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let d = rng.gen_range(1..=2);
                let n = rng.gen_range(1..=5);
                let j = rand_jet(rng, n, d);
                let back = Jet::from_tower(&j.to_tower().map_err(|e| e.to_string())?)
                    .ok_or("embedded tower failed consistency recovery")?;
                expect_eq(back, j, "coefficient recovery")
            })
        }),
        law("jet.tower-embed-monad-morphism", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let d = rng.gen_range(1..=2);
                let n = rng.gen_range(1..=2);
                // unit square
                let x = rand_point(rng, d);
                expect_eq(
                    Jet::eta(&x, n).to_tower().map_err(|e| e.to_string())?,
                    TowerValue::eta(&x, n).map_err(|e| e.to_string())?,
                    "unit square",
                )?;
                // multiplication square
                let g = rand_jet_of_jets(rng, n, n, d);
                let lhs = g.mu().map_err(|e| e.to_string())?.to_tower().map_err(|e| e.to_string())?;
                let rhs = jj_to_tower(&g)?.mu().map_err(|e| e.to_string())?;
                expect_eq(lhs, rhs, "multiplication square")?;
                // scaling square
                let j = rand_jet(rng, n, d);
                let r = rand_q(rng);
                expect_eq(
                    j.scale(&r).to_tower().map_err(|e| e.to_string())?,
                    j.to_tower().map_err(|e| e.to_string())?.scale(&r),
                    "scaling square",
                )?;
                // swap square
                let m = rng.gen_range(1..=2);
                let mixed = rand_jet_of_jets(rng, n, m, d);
                let lhs = jj_to_tower(&mixed.swap())?;
                let rhs = jj_to_tower(&mixed)?.swap(n, m).map_err(|e| e.to_string())?;
                expect_eq(lhs, rhs, "swap square")
            })
        }),
        law("jet.tower-embed-lift-mismatch", |cfg, rng| {
            let mut rng2 = rng_for(cfg.seed, "jet.tower-embed-lift-mismatch");
            let _ = rng;
            let n = 2;
            let mut j = rand_jet(&mut rng2, n, 1);
            // make sure the order-1 coefficient is nonzero
            if j.coeff(1)[0].is_zero() {
                j = Jet::scalar_jet(&[j.coeff(0)[0].clone(), Q::one(), j.coeff(2)[0].clone()]);
            }
            let via_lift_first = jj_to_tower(&JetOfJets::lift(&j))?;
            let via_embed_first = j
                .to_tower()
                .map_err(|e| e.to_string())?
                .lift()
                .map_err(|e| e.to_string())?;
            if via_lift_first == via_embed_first {
                return Err(format!(
                    "the lift square unexpectedly commutes on {j:?}"
                ));
            }
            // pin the structural reason: coordinates with equal-weight
            // distinct halves differ
            let u = Word::parse("10").concat(&Word::parse("01"));
            let a = via_lift_first.proj_word(&u).map_err(|e| e.to_string())?;
            let b = via_embed_first.proj_word(&u).map_err(|e| e.to_string())?;
            if a == b {
                return Err("expected the (10,01) coordinate to witness the mismatch".into());
            }
            Ok(Some(format!(
                "witness jet {j:?}: coordinate (10,01) is {a:?} after lifting first but {b:?} after embedding first"
            )))
        }),
        law("jet.bis-mult-unnatural", |cfg, rng| {
            let n = 2;
            let trials = 10_000usize;
            for trial in 0..trials {
                let d = 1;
                let f = rand_poly_map(rng, d, 1, 3, 2);
                let g = rand_jet_of_jets(rng, n, n, d);
                let lhs = push(&f, &g.mu().map_err(|e| e.to_string())?, PushMethod::Bis)
                    .map_err(|e| e.to_string())?;
                let rhs = jet::push_jet_of_jets(&f, &g, PushMethod::Bis)
                    .map_err(|e| e.to_string())?
                    .mu()
                    .map_err(|e| e.to_string())?;
                if lhs != rhs {
                    return Ok(Some(format!(
                        "witness after {trial} trials: f = {f}, grid {g:?}; μ∘T̄²f gives {rhs:?} but T̄f∘μ gives {lhs:?}"
                    )));
                }
            }
            let _ = cfg;
            Err(format!(
                "no μ-naturality failure found for the unweighted pushforward in {trials} trials; review"
            ))
        }),
        law("jet.linear-coefficientwise", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let (d, e) = small_dims(rng);
                let f = rand_linear_map(rng, d, e);
                let n = rng.gen_range(0..=cfg.max_order.max(1));
                let j = rand_jet(rng, n, d);
                let pushed = push_val(&f, &j)?;
                let coeffs: Vec<Vec<Q>> = j
                    .coeffs()
                    .iter()
                    .map(|c| f.eval(c).map_err(|e| e.to_string()))
                    .collect::<Result<_, _>>()?;
                expect_eq(pushed, Jet::new(n, e, coeffs), "linear maps act coefficientwise")?;

                // projections, the sum map, and homotheties in particular
                let j2 = rand_jet(rng, n, 2 * d);
                let sigma = SmoothMap::sigma(d);
                let pushed = push_val(&sigma, &j2)?;
                let coeffs: Vec<Vec<Q>> = j2
                    .coeffs()
                    .iter()
                    .map(|c| sigma.eval(c).map_err(|e| e.to_string()))
                    .collect::<Result<_, _>>()?;
                expect_eq(pushed, Jet::new(n, d, coeffs), "sum map acts coefficientwise")
            })
        }),
        law("jet.strength-commutativity", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let d0 = 1;
                let d1 = rng.gen_range(1..=2);
                let f = rand_poly_map(rng, d0 + d1, 1, 3, 3);
                let n = rng.gen_range(1..=cfg.max_order.min(3).max(1));
                let j0 = rand_jet(rng, n, d0);
                let j1 = rand_jet(rng, n, d1);
                let tn = push_map(&f, n).map_err(|e| e.to_string())?;

                // expand the second argument, then the first
                let t_d1 = SmoothMap::compose(&tn, &strength_map(d0, d1, n, 1));
                let t_d0_d1 = SmoothMap::compose(
                    &push_map(&t_d1, n).map_err(|e| e.to_string())?,
                    &strength_map(d0, d1 * (n + 1), n, 0),
                );
                let mut input = j0.flatten();
                input.extend(j1.flatten());
                let a = JetOfJets::from_flat(
                    &Jet::from_flat(n, n + 1, &t_d0_d1.eval(&input).map_err(|e| e.to_string())?),
                    n,
                    1,
                )
                .mu()
                .map_err(|e| e.to_string())?;

                // expand the first argument, then the second
                let t_d0 = SmoothMap::compose(&tn, &strength_map(d0, d1, n, 0));
                let t_d1_d0 = SmoothMap::compose(
                    &push_map(&t_d0, n).map_err(|e| e.to_string())?,
                    &strength_map(d0 * (n + 1), d1, n, 1),
                );
                let b = JetOfJets::from_flat(
                    &Jet::from_flat(n, n + 1, &t_d1_d0.eval(&input).map_err(|e| e.to_string())?),
                    n,
                    1,
                )
                .mu()
                .map_err(|e| e.to_string())?;

                // direct expansion of the merged jet
                let c = push_val(&f, &merge_jets(&j0, &j1))?;

                expect_eq(a.clone(), c.clone(), &format!("second-then-first strength, n={n}"))?;
                expect_eq(b, c, &format!("first-then-second strength, n={n}"))
            })
        }),
        law("jet.float-coefficients", |cfg, _rng| {
            let n = 8;
            let x0 = 0.3f64;
            let f = crate::expr::parse::<f64>("exp(x0)").map_err(|e| e.to_string())?;
            let j = Jet::new(
                n,
                1,
                (0..=n)
                    .map(|k| vec![if k == 0 { x0 } else if k == 1 { 1.0 } else { 0.0 }])
                    .collect(),
            );
            let got = push(&f, &j, PushMethod::Operational).map_err(|e| e.to_string())?;
            let mut kfact = 1.0f64;
            for k in 0..=n {
                if k > 0 {
                    kfact *= k as f64;
                }
                let want = x0.exp() / kfact;
                let rel = (got.coeff(k)[0] - want).abs() / want.abs();
                if rel > 1e-12 {
                    return Err(format!("exp coefficient {k} off by relative {rel:e}"));
                }
            }
            let f = crate::expr::parse::<f64>("sin(x0)").map_err(|e| e.to_string())?;
            let x0 = 0.7f64;
            let j = Jet::new(
                n,
                1,
                (0..=n)
                    .map(|k| vec![if k == 0 { x0 } else if k == 1 { 1.0 } else { 0.0 }])
                    .collect(),
            );
            let got = push(&f, &j, PushMethod::Operational).map_err(|e| e.to_string())?;
            let mut kfact = 1.0f64;
            for k in 0..=n {
                if k > 0 {
                    kfact *= k as f64;
                }
                let want = (x0 + k as f64 * std::f64::consts::FRAC_PI_2).sin() / kfact;
                let err = (got.coeff(k)[0] - want).abs() / want.abs().max(1e-3);
                if err > 1e-12 {
                    return Err(format!("sin coefficient {k} off by relative {err:e}"));
                }
            }
            let _ = cfg;
            Ok(None)
        }),
        law("jet.float-finite-difference", |cfg, _rng| {
            for text in ["exp(x0)*sin(x0)", "x0^3 - 2*x0", "cos(x0*x0)"] {
                let f = crate::expr::parse::<f64>(text).map_err(|e| e.to_string())?;
                for x0 in [0.4f64, -0.9, 1.3] {
                    let j = Jet::new(2, 1, vec![vec![x0], vec![1.0], vec![0.0]]);
                    let got = push(&f, &j, PushMethod::Operational).map_err(|e| e.to_string())?;
                    let at = |x: f64| f.eval(&[x]).unwrap()[0];
                    let h1 = 1e-6;
                    let d1 = (at(x0 + h1) - at(x0 - h1)) / (2.0 * h1);
                    let rel1 = (got.coeff(1)[0] - d1).abs() / d1.abs().max(1.0);
                    if rel1 > 1e-6 {
                        return Err(format!("{text}: first coefficient off by {rel1:e} at {x0}"));
                    }
                    let h2 = 1e-4;
                    let d2 = (at(x0 + h2) - 2.0 * at(x0) + at(x0 - h2)) / (h2 * h2) / 2.0;
                    let rel2 = (got.coeff(2)[0] - d2).abs() / d2.abs().max(1.0);
                    if rel2 > 1e-4 {
                        return Err(format!("{text}: second coefficient off by {rel2:e} at {x0}"));
                    }
                }
            }
            let _ = cfg;
            Ok(None)
        }),
    ]
}

// ───────────────────────── wrel laws ─────────────────────────

fn star() -> Vec<String> {
    vec!["*".to_string()]
}

fn two_labels() -> Vec<String> {
    vec!["p".to_string(), "q".to_string()]
}

fn wrel_laws() -> Vec<Law> {
    vec![
        law("wrel.taylor-closed-form", |cfg, rng| {
            per_case(cfg, rng, |rng, case| {
                let cfg_w = WrelConfig::default();
                let labels = if case % 3 == 0 { two_labels() } else { star() };
                let f = rand_wmatrix(rng, &labels, &labels, 3, 3);
                let n = rng.gen_range(0..=2);
                let lhs = f.taylor(n, &cfg_w).map_err(|e| e.to_string())?;
                let rhs = f.taylor_via_derivative(n, &cfg_w).map_err(|e| e.to_string())?;
                expect_eq(lhs, rhs, &format!("closed form vs derivative route, n={n}"))
            })
        }),
        law("wrel.chain-rule", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let cfg_w = WrelConfig::default();
                let labels = two_labels();
                let f = rand_wmatrix(rng, &labels, &labels, 2, 2);
                let g = rand_wmatrix(rng, &labels, &labels, 2, 2);
                let lhs = WMatrix::compose(&g, &f, &cfg_w)
                    .map_err(|e| e.to_string())?
                    .derivative(1, &cfg_w)
                    .map_err(|e| e.to_string())?;
                let pi0 = WMatrix::proj(&labels, 2, 0);
                let f_pi0 = WMatrix::compose(&f, &pi0, &cfg_w).map_err(|e| e.to_string())?;
                let df = f.derivative(1, &cfg_w).map_err(|e| e.to_string())?;
                let tuple = WMatrix::pairing(&[&f_pi0, &df]);
                let rhs = WMatrix::compose(&g.derivative(1, &cfg_w).map_err(|e| e.to_string())?, &tuple, &cfg_w)
                    .map_err(|e| e.to_string())?;
                expect_eq(lhs, rhs, "relational chain rule")
            })
        }),
        law("wrel.analytic", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let cfg_w = WrelConfig::default();
                let labels = star();
                let f = rand_wmatrix(rng, &labels, &labels, 3, 3);
                let x = rand_wmatrix(rng, &labels, &labels, 1, 1);
                let u = rand_wmatrix(rng, &labels, &labels, 1, 1);
                if WMatrix::check_analytic(&f, &x, &u, &cfg_w).map_err(|e| e.to_string())? {
                    Ok(())
                } else {
                    Err(format!("analytic expansion identity failed on {f:?}"))
                }
            })
        }),
        law("wrel.series-reduction", |cfg, rng| {
            per_case(cfg, rng, |rng, _| {
                let cfg_w = WrelConfig::default();
                let fc: Vec<i64> = (0..3).map(|_| rng.gen_range(0..=3)).collect();
                let gc: Vec<i64> = (0..3).map(|_| rng.gen_range(0..=3)).collect();
                let f = series_to_matrix(&fc.iter().map(|v| Q::from_int(*v)).collect::<Vec<_>>());
                let g = series_to_matrix(&gc.iter().map(|v| Q::from_int(*v)).collect::<Vec<_>>());
                let gf = WMatrix::compose(&g, &f, &cfg_w).map_err(|e| e.to_string())?;
                let got = matrix_to_series(&gf);
                // dense polynomial composition
                let mut want = vec![Q::zero(); 1];
                let mut fpow = vec![Q::one()];
                for (j, gj) in gc.iter().enumerate() {
                    if j > 0 {
                        let mut next = vec![Q::zero(); fpow.len() + fc.len() - 1];
                        for (a, va) in fpow.iter().enumerate() {
                            for (b, vb) in fc.iter().enumerate() {
                                next[a + b] = next[a + b].add(&va.mul(&Q::from_int(*vb)));
                            }
                        }
                        fpow = next;
                    }
                    if want.len() < fpow.len() {
                        want.resize(fpow.len(), Q::zero());
                    }
                    for (k, v) in fpow.iter().enumerate() {
                        want[k] = want[k].add(&Q::from_int(*gj).mul(v));
                    }
                }
                while want.len() > 1 && want.last().unwrap().is_zero() {
                    want.pop();
                }
                let mut got = got;
                while got.len() > 1 && got.last().unwrap().is_zero() {
                    got.pop();
                }
                expect_eq(got, want, "power-series reduction of composition")
            })
        }),
        law("wrel.functoriality", |cfg, rng| {
            per_case(cfg, rng, |rng, case| {
                let cfg_w = WrelConfig::default();
                let labels = if case % 4 == 0 { two_labels() } else { star() };
                let f = rand_wmatrix(rng, &labels, &labels, 2, 2);
                let g = rand_wmatrix(rng, &labels, &labels, 2, 2);
                let n = rng.gen_range(0..=2);
                if WMatrix::functoriality_check(&g, &f, n, &cfg_w).map_err(|e| e.to_string())? {
                    Ok(())
                } else {
                    Err(format!("Taylor functoriality failed at n={n} on {f:?}, {g:?}"))
                }
            })
        }),
    ]
}

/// Every law in the suite, in deterministic order.
pub fn registry() -> Vec<Law> {
    let mut laws = Vec::new();
    laws.extend(expr_laws());
    laws.extend(tangent_laws());
    laws.extend(jet_laws());
    laws.extend(wrel_laws());
    laws
}

/// Runs the laws whose names contain `filter` (all of them when empty),
/// in registry order.
pub fn run_suite(cfg: &LawConfig, filter: &str) -> Vec<LawReport> {
    registry()
        .iter()
        .filter(|l| l.name.contains(filter))
        .map(|l| l.run(cfg))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_cfg() -> LawConfig {
        LawConfig {
            cases: 6,
            max_order: 2,
            ..LawConfig::default()
        }
    }

    #[test]
    fn whole_suite_passes_quickly() {
        for report in run_suite(&quick_cfg(), "") {
            assert!(
                report.passed(),
                "{} failed: {}",
                report.name,
                report.failure.unwrap()
            );
        }
    }

    #[test]
    fn fault_injection_is_caught() {
        let cfg = LawConfig {
            fault: Some("tower-embed".to_string()),
            cases: 4,
            ..LawConfig::default()
        };
        let reports = run_suite(&cfg, "jet.tower-embed-explicit");
        assert_eq!(reports.len(), 1);
        assert!(!reports[0].passed(), "fault injection must be detected");
    }

    #[test]
    fn same_seed_same_reports() {
        let cfg = quick_cfg();
        let a: Vec<String> = run_suite(&cfg, "jet.method")
            .into_iter()
            .map(|r| format!("{r:?}"))
            .collect();
        let b: Vec<String> = run_suite(&cfg, "jet.method")
            .into_iter()
            .map(|r| format!("{r:?}"))
            .collect();
        assert_eq!(a, b);
    }
}
