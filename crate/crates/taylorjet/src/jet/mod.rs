//! Truncated Taylor jets and the order-`n` pushforward.
//!
//! A jet of order `n` over dimension `d` is a base point plus `n`
//! variation coefficients: coefficient `i` is the `ε^i` term. Pushing a
//! jet through a map `f` yields the jet of `f(x + ε u₁ + ⋯ + εⁿ uₙ)`.
//! Four algorithms compute the same pushforward:
//!
//! * `direct` — the explicit sum over integer compositions weighted by
//!   `1/k!` higher derivatives;
//! * `inductive` — coefficient maps built by the recursion
//!   `t_{k+1} f = ∂(t_k f) ∘ split`, where `split` feeds a jet into one
//!   tangent layer with positional weights `i/k`;
//! * `tower` — embed the jet into the iterated tangent bundle (scaling
//!   coordinate `w` by `|w|!/w!`), push through `n` nested dual-number
//!   layers, and read off the all-ones corner;
//! * `operational` — evaluate `f` in the truncated power-series ring.
//!
//! The `bis` variant drops the erasing coefficients (the classical
//! higher-order directional derivative); it is a functor but its
//! multiplication is not natural, and the law suite exhibits the failure.

pub mod series;

use std::fmt;

use thiserror::Error;

use crate::combinatorics::{compositions, unordered_partitions, Word};
use crate::expr::{EvalError, Expr, SmoothMap};
use crate::scalar::Scalar;
use crate::tangent::{apply_map, TangentError, TowerValue, MAX_TOWER_LEVEL};
use series::SeriesElem;

/// Order cap for the symbolic methods; derivative size is exponential.
pub const MAX_SYMBOLIC_ORDER: usize = 8;
/// Order cap for the operational (power-series) method.
pub const MAX_SERIES_ORDER: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("jet dimension {got} does not match map arity {expected}")]
    DimMismatch { expected: usize, got: usize },
    #[error("order {order} exceeds the {method} cap of {max}")]
    OrderTooLarge {
        order: usize,
        method: &'static str,
        max: usize,
    },
    #[error("jet orders {0} and {1} do not match")]
    OrderMismatch(usize, usize),
    #[error("cannot split a jet of order 0")]
    SplitOrderZero,
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Tangent(#[from] TangentError),
}

/// Degree-`n` truncated Taylor element: `n + 1` coefficient vectors in
/// `Scalar^dim`; index 0 is the base point.
#[derive(Clone, PartialEq)]
pub struct Jet<S> {
    order: usize,
    dim: usize,
    coeffs: Vec<Vec<S>>,
}

impl<S: Scalar> Jet<S> {
    pub fn new(order: usize, dim: usize, coeffs: Vec<Vec<S>>) -> Self {
        assert_eq!(coeffs.len(), order + 1, "expected order+1 coefficient vectors");
        assert!(coeffs.iter().all(|c| c.len() == dim), "coefficient dimension mismatch");
        Jet { order, dim, coeffs }
    }

    /// One-dimensional jet from plain coefficients.
    pub fn scalar_jet(coeffs: &[S]) -> Self {
        Jet::new(
            coeffs.len() - 1,
            1,
            coeffs.iter().map(|c| vec![c.clone()]).collect(),
        )
    }

    /// Monad unit: constant jet at `x`.
    pub fn eta(x: &[S], order: usize) -> Self {
        let mut coeffs = vec![vec![S::zero(); x.len()]; order + 1];
        coeffs[0] = x.to_vec();
        Jet::new(order, x.len(), coeffs)
    }

    pub fn zero(order: usize, dim: usize) -> Self {
        Jet::new(order, dim, vec![vec![S::zero(); dim]; order + 1])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[Vec<S>] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &[S] {
        &self.coeffs[k]
    }

    pub fn base(&self) -> &[S] {
        &self.coeffs[0]
    }

    /// Truncation `Λ_{n,m}`: keeps coefficients `0..=m`.
    pub fn truncate(&self, m: usize) -> Self {
        assert!(m <= self.order);
        Jet::new(m, self.dim, self.coeffs[..=m].to_vec())
    }

    /// Scaling `θ_r`: coefficient `k` is multiplied by `r^k`.
    pub fn scale(&self, r: &S) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let factor = r.powi(k as u32);
                c.iter().map(|x| x.mul(&factor)).collect()
            })
            .collect();
        Jet::new(self.order, self.dim, coeffs)
    }

    pub fn add(&self, rhs: &Jet<S>) -> Self {
        assert_eq!(self.order, rhs.order);
        assert_eq!(self.dim, rhs.dim);
        Jet::new(
            self.order,
            self.dim,
            self.coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.add(y)).collect())
                .collect(),
        )
    }

    /// Flattens the coefficient blocks into one vector, block `k` first.
    pub fn flatten(&self) -> Vec<S> {
        self.coeffs.iter().flat_map(|c| c.iter().cloned()).collect()
    }

    pub fn from_flat(order: usize, dim: usize, flat: &[S]) -> Self {
        assert_eq!(flat.len(), dim * (order + 1));
        Jet::new(
            order,
            dim,
            flat.chunks(dim).map(|c| c.to_vec()).collect(),
        )
    }

    /// One tangent layer of the tower embedding: the jet splits into its
    /// first `n` coefficients and the positionally weighted tail
    /// `((1/n)c₁, …, (n/n)c_n)`.
    pub fn layer_split(&self) -> Result<(Jet<S>, Jet<S>), JetError> {
        let n = self.order;
        if n == 0 {
            return Err(JetError::SplitOrderZero);
        }
        let first = Jet::new(n - 1, self.dim, self.coeffs[..n].to_vec());
        let inv_n = S::inv_int(n as u64).expect("n >= 1");
        let tail = (1..=n)
            .map(|i| {
                let w = S::from_int(i as i64).mul(&inv_n);
                self.coeffs[i].iter().map(|c| c.mul(&w)).collect()
            })
            .collect();
        Ok((first, Jet::new(n - 1, self.dim, tail)))
    }

    /// The unweighted variant: `(c₀…c_{n−1})` and `(c₁…c_n)`.
    pub fn layer_split_plain(&self) -> Result<(Jet<S>, Jet<S>), JetError> {
        let n = self.order;
        if n == 0 {
            return Err(JetError::SplitOrderZero);
        }
        let first = Jet::new(n - 1, self.dim, self.coeffs[..n].to_vec());
        let second = Jet::new(n - 1, self.dim, self.coeffs[1..].to_vec());
        Ok((first, second))
    }

    /// Embedding into the iterated tangent tower, closed form: the
    /// coordinate of word `w` is `(|w|! / w!) · c_{|w|}`.
    pub fn to_tower(&self) -> Result<TowerValue<S>, JetError> {
        let n = self.order;
        if n > MAX_TOWER_LEVEL {
            return Err(JetError::OrderTooLarge {
                order: n,
                method: "tower",
                max: MAX_TOWER_LEVEL,
            });
        }
        let mut coords = Vec::with_capacity(1 << n);
        for mask in 0..(1u64 << n) {
            let w = Word::new(n, mask);
            let weight = w.weight();
            let num: u64 = (1..=weight as u64).product();
            let coeff = S::from_int(num as i64)
                .mul(&S::inv_int(w.position_factorial()).expect("positive"));
            coords.push(
                self.coeffs[weight]
                    .iter()
                    .map(|c| c.mul(&coeff))
                    .collect(),
            );
        }
        Ok(TowerValue::new(n, self.dim, coords)?)
    }

    /// Same embedding built by the layer recursion; must agree with
    /// [`Jet::to_tower`] exactly.
    pub fn to_tower_inductive(&self) -> Result<TowerValue<S>, JetError> {
        if self.order == 0 {
            return Ok(TowerValue::new(0, self.dim, vec![self.coeffs[0].clone()])?);
        }
        let (first, second) = self.layer_split()?;
        let lo = first.to_tower_inductive()?;
        let hi = second.to_tower_inductive()?;
        let mut coords = lo.coords().to_vec();
        coords.extend(hi.coords().iter().cloned());
        Ok(TowerValue::new(self.order, self.dim, coords)?)
    }

    /// Unweighted embedding: coordinate `w` is `c_{|w|}`.
    pub fn to_tower_plain(&self) -> Result<TowerValue<S>, JetError> {
        let n = self.order;
        if n > MAX_TOWER_LEVEL {
            return Err(JetError::OrderTooLarge {
                order: n,
                method: "tower",
                max: MAX_TOWER_LEVEL,
            });
        }
        let mut coords = Vec::with_capacity(1 << n);
        for mask in 0..(1u64 << n) {
            let w = Word::new(n, mask);
            coords.push(self.coeffs[w.weight()].clone());
        }
        Ok(TowerValue::new(n, self.dim, coords)?)
    }

    /// Recovers a jet from its tower embedding, checking every coordinate
    /// for consistency; `None` when the tower is not in the image.
    pub fn from_tower(t: &TowerValue<S>) -> Option<Jet<S>> {
        let n = t.level();
        let mut coeffs: Vec<Option<Vec<S>>> = vec![None; n + 1];
        for mask in 0..(1u64 << n) {
            let w = Word::new(n, mask);
            let weight = w.weight();
            let num: u64 = (1..=weight as u64).product();
            // invert the |w|!/w! scaling
            let inv = S::from_int(w.position_factorial() as i64)
                .mul(&S::inv_int(num).expect("positive"));
            let candidate: Vec<S> = t.coords()[mask as usize]
                .iter()
                .map(|c| c.mul(&inv))
                .collect();
            match &coeffs[weight] {
                None => coeffs[weight] = Some(candidate),
                Some(existing) if *existing == candidate => {}
                Some(_) => return None,
            }
        }
        Some(Jet::new(
            n,
            t.dim(),
            coeffs.into_iter().map(|c| c.unwrap()).collect(),
        ))
    }
}

impl<S: Scalar> fmt::Debug for Jet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet(order {}, dim {})[", self.order, self.dim)?;
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            for (i, x) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
        }
        write!(f, "]")
    }
}

/// Element of `T_n T_m X`: an outer jet whose coefficients are inner jets.
#[derive(Clone, PartialEq, Debug)]
pub struct JetOfJets<S> {
    outer_order: usize,
    inner_order: usize,
    dim: usize,
    grid: Vec<Vec<Vec<S>>>,
}

impl<S: Scalar> JetOfJets<S> {
    pub fn new(outer_order: usize, inner_order: usize, dim: usize, grid: Vec<Vec<Vec<S>>>) -> Self {
        assert_eq!(grid.len(), outer_order + 1);
        assert!(grid
            .iter()
            .all(|row| row.len() == inner_order + 1 && row.iter().all(|c| c.len() == dim)));
        JetOfJets {
            outer_order,
            inner_order,
            dim,
            grid,
        }
    }

    pub fn outer_order(&self) -> usize {
        self.outer_order
    }

    pub fn inner_order(&self) -> usize {
        self.inner_order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, outer: usize, inner: usize) -> &[S] {
        &self.grid[outer][inner]
    }

    /// Outer jet over the flattened inner-jet space.
    pub fn to_flat(&self) -> Jet<S> {
        let coeffs = self
            .grid
            .iter()
            .map(|row| row.iter().flat_map(|c| c.iter().cloned()).collect())
            .collect();
        Jet::new(self.outer_order, self.dim * (self.inner_order + 1), coeffs)
    }

    pub fn from_flat(j: &Jet<S>, inner_order: usize, dim: usize) -> Self {
        assert_eq!(j.dim(), dim * (inner_order + 1));
        let grid = j
            .coeffs()
            .iter()
            .map(|c| c.chunks(dim).map(|x| x.to_vec()).collect())
            .collect();
        JetOfJets::new(j.order(), inner_order, dim, grid)
    }

    /// Monad multiplication: coefficient `k` of the result sums the grid
    /// entries along the anti-diagonal `i + j = k`.
    pub fn mu(&self) -> Result<Jet<S>, JetError> {
        if self.outer_order != self.inner_order {
            return Err(JetError::OrderMismatch(self.outer_order, self.inner_order));
        }
        let n = self.outer_order;
        let mut coeffs = vec![vec![S::zero(); self.dim]; n + 1];
        for i in 0..=n {
            for j in 0..=(n - i) {
                for c in 0..self.dim {
                    coeffs[i + j][c] = coeffs[i + j][c].add(&self.grid[i][j][c]);
                }
            }
        }
        Ok(Jet::new(n, self.dim, coeffs))
    }

    /// Transposes the two jet layers.
    pub fn swap(&self) -> Self {
        let grid = (0..=self.inner_order)
            .map(|j| (0..=self.outer_order).map(|i| self.grid[i][j].clone()).collect())
            .collect();
        JetOfJets::new(self.inner_order, self.outer_order, self.dim, grid)
    }

    /// `η` applied outside: the whole jet becomes coefficient 0.
    pub fn eta_outer(j: &Jet<S>, outer_order: usize) -> Self {
        let zero = vec![vec![S::zero(); j.dim()]; j.order() + 1];
        let grid = (0..=outer_order)
            .map(|i| if i == 0 { j.coeffs().to_vec() } else { zero.clone() })
            .collect();
        JetOfJets::new(outer_order, j.order(), j.dim(), grid)
    }

    /// `η` applied inside every coefficient (the image of `T_n η`, which
    /// is coefficientwise because `η` is linear).
    pub fn eta_inner(j: &Jet<S>, inner_order: usize) -> Self {
        let grid = j
            .coeffs()
            .iter()
            .map(|c| {
                (0..=inner_order)
                    .map(|k| if k == 0 { c.clone() } else { vec![S::zero(); j.dim()] })
                    .collect()
            })
            .collect();
        JetOfJets::new(j.order(), inner_order, j.dim(), grid)
    }

    /// Diagonal lift: entry `(i, j)` is `δ_{ij} · c_i`.
    pub fn lift(j: &Jet<S>) -> Self {
        let n = j.order();
        let grid = (0..=n)
            .map(|i| {
                (0..=n)
                    .map(|k| {
                        if i == k {
                            j.coeff(i).to_vec()
                        } else {
                            vec![S::zero(); j.dim()]
                        }
                    })
                    .collect()
            })
            .collect();
        JetOfJets::new(n, n, j.dim(), grid)
    }

    /// Truncates the outer order to `m` and the inner order to `k`.
    pub fn truncate(&self, m: usize, k: usize) -> Self {
        assert!(m <= self.outer_order && k <= self.inner_order);
        let grid = self.grid[..=m]
            .iter()
            .map(|row| row[..=k].to_vec())
            .collect();
        JetOfJets::new(m, k, self.dim, grid)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PushMethod {
    Direct,
    Inductive,
    Tower,
    Operational,
    Bis,
}

impl PushMethod {
    pub const ALL: [PushMethod; 5] = [
        PushMethod::Direct,
        PushMethod::Inductive,
        PushMethod::Tower,
        PushMethod::Operational,
        PushMethod::Bis,
    ];

    /// The four provably-equal methods, excluding `bis`.
    pub const EQUIVALENT: [PushMethod; 4] = [
        PushMethod::Direct,
        PushMethod::Inductive,
        PushMethod::Tower,
        PushMethod::Operational,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PushMethod::Direct => "direct",
            PushMethod::Inductive => "inductive",
            PushMethod::Tower => "tower",
            PushMethod::Operational => "operational",
            PushMethod::Bis => "bis",
        }
    }

    pub fn parse(name: &str) -> Option<PushMethod> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }
}

fn check_dims<S: Scalar>(f: &SmoothMap<S>, j: &Jet<S>) -> Result<(), JetError> {
    if f.arity() != j.dim() {
        return Err(JetError::DimMismatch {
            expected: f.arity(),
            got: j.dim(),
        });
    }
    Ok(())
}

fn check_order(order: usize, method: &'static str, max: usize) -> Result<(), JetError> {
    if order > max {
        return Err(JetError::OrderTooLarge { order, method, max });
    }
    Ok(())
}

fn inv_factorial<S: Scalar>(k: usize) -> S {
    let f: u64 = (1..=k as u64).product();
    S::inv_int(f).expect("positive factorial")
}

/// Direct pushforward: coefficient `j` is
/// `Σ_k Σ_{i₁+⋯+i_k=j, i>0} (1/k!) ∂̂^k f(x; u_{i₁}, …, u_{i_k})`.
pub fn push_direct<S: Scalar>(f: &SmoothMap<S>, j: &Jet<S>) -> Result<Jet<S>, JetError> {
    check_dims(f, j)?;
    check_order(j.order(), "direct", MAX_SYMBOLIC_ORDER)?;
    let mut cache = DerivCache::new(f.clone());
    let mut coeffs = vec![f.eval(j.base())?];
    for degree in 1..=j.order() {
        let mut acc = vec![S::zero(); f.coarity()];
        for comp in compositions(degree as u64) {
            let k = comp.len();
            let hd = cache.get(k);
            let mut point = j.base().to_vec();
            for part in &comp {
                point.extend(j.coeff(*part as usize).iter().cloned());
            }
            let value = hd.eval(&point)?;
            let weight = inv_factorial::<S>(k);
            for (a, v) in acc.iter_mut().zip(value) {
                *a = a.add(&v.mul(&weight));
            }
        }
        coeffs.push(acc);
    }
    Ok(Jet::new(j.order(), f.coarity(), coeffs))
}

/// Weighted feed of a jet into one tangent layer, as a linear map
/// `R^{d(k+1)} → R^{2dk}`: the first block keeps coefficients `0..k`, the
/// second takes `(i/k) c_i` for `i = 1..=k`.
fn layer_split_map<S: Scalar>(d: usize, k: usize) -> SmoothMap<S> {
    let mut body = Vec::with_capacity(2 * d * k);
    for i in 0..(d * k) {
        body.push(Expr::var(i));
    }
    for i in 1..=k {
        let w = S::from_ratio(i as i64, k as u64);
        for c in 0..d {
            body.push(Expr::scale(w.clone(), Expr::var(i * d + c)));
        }
    }
    SmoothMap::new(d * (k + 1), body)
}

/// Symbolic coefficient map `t_k f` by the derivative recursion
/// `t_0 f = f`, `t_{k+1} f = ∂(t_k f) ∘ split`.
pub fn taylor_coeff_map_inductive<S: Scalar>(f: &SmoothMap<S>, k: usize) -> SmoothMap<S> {
    let mut t = f.clone();
    for step in 1..=k {
        t = SmoothMap::compose(&t.total_derivative(), &layer_split_map(f.arity(), step));
    }
    t
}

/// Symbolic coefficient map `t_k f` as the direct composition sum.
pub fn taylor_coeff_map<S: Scalar>(f: &SmoothMap<S>, k: usize) -> SmoothMap<S> {
    taylor_coeff_map_with(f, k, &mut DerivCache::new(f.clone()))
}

struct DerivCache<S> {
    derivs: Vec<SmoothMap<S>>,
}

impl<S: Scalar> DerivCache<S> {
    fn new(f: SmoothMap<S>) -> Self {
        DerivCache { derivs: vec![f] }
    }

    fn get(&mut self, k: usize) -> &SmoothMap<S> {
        while self.derivs.len() <= k {
            let d = self.derivs[0].arity();
            let prev = self.derivs.last().unwrap();
            let old_arity = prev.arity();
            let body = prev
                .body()
                .iter()
                .map(|e| {
                    let mut acc = Expr::zero();
                    for i in 0..d {
                        acc = Expr::add(acc, Expr::mul(e.partial(i), Expr::var(old_arity + i)));
                    }
                    acc
                })
                .collect();
            self.derivs.push(SmoothMap::new(old_arity + d, body));
        }
        &self.derivs[k]
    }
}

fn block_selector<S: Scalar>(d: usize, total_blocks: usize, blocks: &[usize]) -> SmoothMap<S> {
    let body = blocks
        .iter()
        .flat_map(|b| (0..d).map(move |c| Expr::var(b * d + c)))
        .collect();
    SmoothMap::new(d * total_blocks, body)
}

fn taylor_coeff_map_with<S: Scalar>(
    f: &SmoothMap<S>,
    k: usize,
    cache: &mut DerivCache<S>,
) -> SmoothMap<S> {
    let d = f.arity();
    if k == 0 {
        return SmoothMap::compose(f, &block_selector(d, 1, &[0]));
    }
    let mut acc = SmoothMap::zero_map(d * (k + 1), f.coarity());
    for comp in compositions(k as u64) {
        let parts = comp.len();
        let hd = cache.get(parts).clone();
        let mut blocks = vec![0usize];
        blocks.extend(comp.iter().map(|i| *i as usize));
        let term = SmoothMap::compose(&hd, &block_selector(d, k + 1, &blocks));
        acc = SmoothMap::add_maps(&acc, &SmoothMap::scale_map(&inv_factorial::<S>(parts), &term));
    }
    acc
}

/// Unweighted coefficient map `t̄_k f`: sum over unordered partitions,
/// with no `1/k!` erasure.
pub fn taylor_coeff_map_bis<S: Scalar>(f: &SmoothMap<S>, k: usize) -> SmoothMap<S> {
    let d = f.arity();
    if k == 0 {
        return SmoothMap::compose(f, &block_selector(d, 1, &[0]));
    }
    let mut cache = DerivCache::new(f.clone());
    let items: Vec<usize> = (1..=k).collect();
    let mut acc = SmoothMap::zero_map(d * (k + 1), f.coarity());
    for family in unordered_partitions(&items) {
        let parts = family.len();
        let hd = cache.get(parts).clone();
        let mut blocks = vec![0usize];
        blocks.extend(family.iter().map(|set| set.len()));
        let term = SmoothMap::compose(&hd, &block_selector(d, k + 1, &blocks));
        acc = SmoothMap::add_maps(&acc, &term);
    }
    acc
}

/// Inductive pushforward: evaluates the recursion-built coefficient maps
/// on the truncated jet prefixes.
pub fn push_inductive<S: Scalar>(f: &SmoothMap<S>, j: &Jet<S>) -> Result<Jet<S>, JetError> {
    check_dims(f, j)?;
    check_order(j.order(), "inductive", MAX_SYMBOLIC_ORDER)?;
    let mut coeffs = Vec::with_capacity(j.order() + 1);
    for i in 0..=j.order() {
        let t_i = taylor_coeff_map_inductive(f, i);
        coeffs.push(t_i.eval(&j.truncate(i).flatten())?);
    }
    Ok(Jet::new(j.order(), f.coarity(), coeffs))
}

/// Tower pushforward: coefficient `i` is the all-ones corner of the
/// `i`-layer tangent pushforward of the embedded prefix.
pub fn push_tower<S: Scalar>(f: &SmoothMap<S>, j: &Jet<S>) -> Result<Jet<S>, JetError> {
    check_dims(f, j)?;
    check_order(j.order(), "tower", MAX_TOWER_LEVEL)?;
    let mut coeffs = vec![f.eval(j.base())?];
    for i in 1..=j.order() {
        let tower = j.truncate(i).to_tower()?;
        let pushed = apply_map(f, &tower)?;
        coeffs.push(pushed.top_corner().to_vec());
    }
    Ok(Jet::new(j.order(), f.coarity(), coeffs))
}

/// Unweighted (`bis`) pushforward through the plain embedding.
pub fn push_bis<S: Scalar>(f: &SmoothMap<S>, j: &Jet<S>) -> Result<Jet<S>, JetError> {
    check_dims(f, j)?;
    check_order(j.order(), "tower", MAX_TOWER_LEVEL)?;
    let mut coeffs = vec![f.eval(j.base())?];
    for i in 1..=j.order() {
        let tower = j.truncate(i).to_tower_plain()?;
        let pushed = apply_map(f, &tower)?;
        coeffs.push(pushed.top_corner().to_vec());
    }
    Ok(Jet::new(j.order(), f.coarity(), coeffs))
}

/// Operational pushforward: truncated power-series evaluation.
pub fn push_operational<S: Scalar>(f: &SmoothMap<S>, j: &Jet<S>) -> Result<Jet<S>, JetError> {
    check_dims(f, j)?;
    check_order(j.order(), "operational", MAX_SERIES_ORDER)?;
    let inputs: Vec<SeriesElem<S>> = (0..j.dim())
        .map(|v| SeriesElem::new(j.coeffs().iter().map(|c| c[v].clone()).collect()))
        .collect();
    let outputs: Vec<SeriesElem<S>> = f
        .eval_in(&inputs)?
        .into_iter()
        .map(|o| o.widen(j.order()))
        .collect();
    let coeffs = (0..=j.order())
        .map(|k| outputs.iter().map(|o| o.coeffs()[k].clone()).collect())
        .collect();
    Ok(Jet::new(j.order(), outputs.len(), coeffs))
}

pub fn push<S: Scalar>(f: &SmoothMap<S>, j: &Jet<S>, method: PushMethod) -> Result<Jet<S>, JetError> {
    match method {
        PushMethod::Direct => push_direct(f, j),
        PushMethod::Inductive => push_inductive(f, j),
        PushMethod::Tower => push_tower(f, j),
        PushMethod::Operational => push_operational(f, j),
        PushMethod::Bis => push_bis(f, j),
    }
}

/// Symbolic pushforward `T_n f` as a map on flattened jet coordinates:
/// arity `d(n+1)`, coarity `e(n+1)`, block `i` of the output being the
/// `i`-th Taylor coefficient.
pub fn push_map<S: Scalar>(f: &SmoothMap<S>, n: usize) -> Result<SmoothMap<S>, JetError> {
    check_order(n, "direct", MAX_SYMBOLIC_ORDER)?;
    let d = f.arity();
    let mut cache = DerivCache::new(f.clone());
    let mut blocks = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t_i = taylor_coeff_map_with(f, i, &mut cache);
        // widen from the i-prefix onto the full flattened arity
        blocks.push(t_i.with_arity(d * (n + 1)).expect("prefix fits"));
    }
    let refs: Vec<&SmoothMap<S>> = blocks.iter().collect();
    Ok(SmoothMap::pairing(&refs))
}

/// Symbolic unweighted pushforward `T̄_n f`.
pub fn push_map_bis<S: Scalar>(f: &SmoothMap<S>, n: usize) -> Result<SmoothMap<S>, JetError> {
    check_order(n, "direct", MAX_SYMBOLIC_ORDER)?;
    let d = f.arity();
    let mut blocks = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t_i = taylor_coeff_map_bis(f, i);
        blocks.push(t_i.with_arity(d * (n + 1)).expect("prefix fits"));
    }
    let refs: Vec<&SmoothMap<S>> = blocks.iter().collect();
    Ok(SmoothMap::pairing(&refs))
}

/// `T_n f` lifted once more: applies the chosen pushforward to a
/// jet-of-jets by flattening the inner layer.
pub fn push_jet_of_jets<S: Scalar>(
    f: &SmoothMap<S>,
    g: &JetOfJets<S>,
    method: PushMethod,
) -> Result<JetOfJets<S>, JetError> {
    let inner = g.inner_order();
    let map = match method {
        PushMethod::Bis => push_map_bis(f, inner)?,
        _ => push_map(f, inner)?,
    };
    let pushed = push(&map, &g.to_flat(), method)?;
    Ok(JetOfJets::from_flat(&pushed, inner, f.coarity()))
}

/// Monad multiplication as a linear symbolic map on flattened
/// jet-of-jets coordinates.
pub fn mu_map<S: Scalar>(e: usize, n: usize) -> SmoothMap<S> {
    let inner_width = e * (n + 1);
    let mut body = Vec::with_capacity(inner_width);
    for k in 0..=n {
        for c in 0..e {
            let mut acc = Expr::zero();
            for i in 0..=k {
                let j = k - i;
                acc = Expr::add(acc, Expr::var(i * inner_width + j * e + c));
            }
            body.push(acc);
        }
    }
    SmoothMap::new(inner_width * (n + 1), body)
}

/// Jet-valued symbolic map `X → T_n Y`: a plain map whose coarity is
/// organized in `n + 1` blocks of size `dst_dim`.
#[derive(Clone, Debug)]
pub struct JetMap<S: Scalar> {
    order: usize,
    dst_dim: usize,
    map: SmoothMap<S>,
}

impl<S: Scalar> JetMap<S> {
    pub fn new(order: usize, dst_dim: usize, map: SmoothMap<S>) -> Self {
        assert_eq!(map.coarity(), dst_dim * (order + 1));
        JetMap {
            order,
            dst_dim,
            map,
        }
    }

    /// Kleisli embedding of a plain map: `η ∘ f`.
    pub fn pure(f: &SmoothMap<S>, order: usize) -> Self {
        let e = f.coarity();
        let mut body = f.body().to_vec();
        for _ in 0..(order * e) {
            body.push(Expr::zero());
        }
        JetMap::new(order, e, SmoothMap::new(f.arity(), body))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn src_dim(&self) -> usize {
        self.map.arity()
    }

    pub fn dst_dim(&self) -> usize {
        self.dst_dim
    }

    pub fn map(&self) -> &SmoothMap<S> {
        &self.map
    }

    pub fn apply(&self, x: &[S]) -> Result<Jet<S>, JetError> {
        let flat = self.map.eval(x)?;
        Ok(Jet::from_flat(self.order, self.dst_dim, &flat))
    }
}

/// Kleisli composition `μ ∘ T_n g ∘ f`: composition of truncated Taylor
/// series.
pub fn kleisli_compose<S: Scalar>(g: &JetMap<S>, f: &JetMap<S>) -> Result<JetMap<S>, JetError> {
    assert_eq!(g.order(), f.order(), "Kleisli orders must match");
    assert_eq!(g.src_dim(), f.dst_dim(), "Kleisli dimensions must chain");
    let n = g.order();
    let tg = push_map(g.map(), n)?;
    let composed = SmoothMap::compose(&tg, f.map());
    let collapsed = SmoothMap::compose(&mu_map(g.dst_dim(), n), &composed);
    Ok(JetMap::new(n, g.dst_dim(), collapsed))
}

/// Interleaves two jets over a product space, `dist⁻¹`: coefficient `k`
/// of the result is the pair of coefficients `k`.
pub fn merge_jets<S: Scalar>(a: &Jet<S>, b: &Jet<S>) -> Jet<S> {
    assert_eq!(a.order(), b.order());
    let coeffs = a
        .coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| {
            let mut c = x.clone();
            c.extend(y.iter().cloned());
            c
        })
        .collect();
    Jet::new(a.order(), a.dim() + b.dim(), coeffs)
}

/// Splits a jet over a product space, `dist`.
pub fn split_jet<S: Scalar>(j: &Jet<S>, d0: usize) -> (Jet<S>, Jet<S>) {
    assert!(d0 <= j.dim());
    let a = j
        .coeffs()
        .iter()
        .map(|c| c[..d0].to_vec())
        .collect();
    let b = j
        .coeffs()
        .iter()
        .map(|c| c[d0..].to_vec())
        .collect();
    (
        Jet::new(j.order(), d0, a),
        Jet::new(j.order(), j.dim() - d0, b),
    )
}

/// Strength embedding `Φ^which` as a linear symbolic map. For
/// `which = 0` the first factor carries the jet (arity
/// `d0(n+1) + d1`), for `which = 1` the second does.
pub fn strength_map<S: Scalar>(d0: usize, d1: usize, n: usize, which: usize) -> SmoothMap<S> {
    let d = d0 + d1;
    let mut body = Vec::with_capacity(d * (n + 1));
    for k in 0..=n {
        for c in 0..d {
            let expr = match which {
                0 => {
                    if c < d0 {
                        Expr::var(k * d0 + c)
                    } else if k == 0 {
                        Expr::var(d0 * (n + 1) + (c - d0))
                    } else {
                        Expr::zero()
                    }
                }
                1 => {
                    if c < d0 {
                        if k == 0 {
                            Expr::var(c)
                        } else {
                            Expr::zero()
                        }
                    } else {
                        Expr::var(d0 + k * d1 + (c - d0))
                    }
                }
                _ => panic!("which must be 0 or 1"),
            };
            body.push(expr);
        }
    }
    let arity = match which {
        0 => d0 * (n + 1) + d1,
        _ => d0 + d1 * (n + 1),
    };
    SmoothMap::new(arity, body)
}

/// Taylor expansion of `f` in one argument block only, the other held at
/// a point: the value-level reading of `T_n f ∘ Φ^which`.
pub fn partial_push<S: Scalar>(
    f: &SmoothMap<S>,
    which: usize,
    jet: &Jet<S>,
    point: &[S],
) -> Result<Jet<S>, JetError> {
    let n = jet.order();
    let fixed = Jet::eta(point, n);
    let merged = match which {
        0 => merge_jets(jet, &fixed),
        1 => merge_jets(&fixed, jet),
        _ => panic!("which must be 0 or 1"),
    };
    push_operational(f, &merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::scalar::rat;
    use num_rational::BigRational;

    type Q = BigRational;

    fn jet1(coeffs: &[i64]) -> Jet<Q> {
        Jet::scalar_jet(&coeffs.iter().map(|c| rat(*c, 1)).collect::<Vec<_>>())
    }

    #[test]
    fn layer_split_examples() {
        let j = jet1(&[9, 5]);
        let (a, b) = j.layer_split().unwrap();
        assert_eq!(a, jet1(&[9]));
        assert_eq!(b, jet1(&[5]));

        let j = Jet::scalar_jet(&[rat(1, 1), rat(3, 1), rat(5, 1)]);
        let (a, b) = j.layer_split().unwrap();
        assert_eq!(a, Jet::scalar_jet(&[rat(1, 1), rat(3, 1)]));
        assert_eq!(b, Jet::scalar_jet(&[rat(3, 2), rat(5, 1)]));

        let j = Jet::scalar_jet(&[rat(0, 1), rat(3, 1), rat(6, 1), rat(9, 1)]);
        let (_, b) = j.layer_split().unwrap();
        assert_eq!(b, Jet::scalar_jet(&[rat(1, 1), rat(4, 1), rat(9, 1)]));

        assert_eq!(jet1(&[1]).layer_split(), Err(JetError::SplitOrderZero));
    }

    #[test]
    fn tower_embedding_coefficients() {
        // order 2: coords 00: x, 10: u1, 01: u1/2, 11: u2
        let j = jet1(&[7, 3, 5]);
        let t = j.to_tower().unwrap();
        assert_eq!(t.proj_word(&Word::parse("00")).unwrap(), &[rat(7, 1)][..]);
        assert_eq!(t.proj_word(&Word::parse("10")).unwrap(), &[rat(3, 1)][..]);
        assert_eq!(t.proj_word(&Word::parse("01")).unwrap(), &[rat(3, 2)][..]);
        assert_eq!(t.proj_word(&Word::parse("11")).unwrap(), &[rat(5, 1)][..]);

        // order 3 leaf: coordinate 011 = (2!/6)·u2 = u2/3
        let j = jet1(&[1, 1, 1, 1]);
        let t = j.to_tower().unwrap();
        assert_eq!(t.proj_word(&Word::parse("011")).unwrap(), &[rat(1, 3)][..]);

        // order 0 embeds the point
        let t = jet1(&[4]).to_tower().unwrap();
        assert_eq!(t.coords(), &[vec![rat(4, 1)]]);
    }

    #[test]
    fn tower_embedding_inductive_agrees() {
        for order in 0..=6usize {
            let coeffs: Vec<Q> = (0..=order as i64).map(|k| rat(3 * k - 2, k + 1)).collect();
            let j = Jet::scalar_jet(&coeffs);
            assert_eq!(j.to_tower().unwrap(), j.to_tower_inductive().unwrap(), "order {order}");
        }
    }

    #[test]
    fn plain_embedding_by_weight() {
        let j = jet1(&[7, 3, 5]);
        let t = j.to_tower_plain().unwrap();
        assert_eq!(t.proj_word(&Word::parse("01")).unwrap(), &[rat(3, 1)][..]);
        assert_eq!(t.proj_word(&Word::parse("10")).unwrap(), &[rat(3, 1)][..]);
        assert_eq!(t.proj_word(&Word::parse("11")).unwrap(), &[rat(5, 1)][..]);
    }

    #[test]
    fn embedding_is_monic() {
        let j = Jet::scalar_jet(&[rat(2, 3), rat(-1, 2), rat(5, 1), rat(0, 1)]);
        let t = j.to_tower().unwrap();
        let back = Jet::from_tower(&t).unwrap();
        assert_eq!(back, j);
    }

    #[test]
    fn cubic_jet_all_methods() {
        // f = x³ at (1, 1, 2) gives (1, 3, 9)
        let f = parse::<Q>("x0^3").unwrap();
        let j = jet1(&[1, 1, 2]);
        let expected = jet1(&[1, 3, 9]);
        for method in PushMethod::EQUIVALENT {
            assert_eq!(push(&f, &j, method).unwrap(), expected, "{}", method.name());
        }
    }

    #[test]
    fn bis_diverges_at_degree_two() {
        // coefficient 2 = ∂̂²f(x)(u₁,u₁) + ∂f(x, u₂) = 6 + 6 = 12, no ½
        let f = parse::<Q>("x0^3").unwrap();
        let j = jet1(&[1, 1, 2]);
        let got = push_bis(&f, &j).unwrap();
        assert_eq!(got, jet1(&[1, 3, 12]));
        // order 1 agrees with everything
        let j1 = jet1(&[1, 5]);
        assert_eq!(push_bis(&f, &j1).unwrap(), push_direct(&f, &j1).unwrap());
        // and matches the unordered-partition formula
        let t2 = taylor_coeff_map_bis(&f, 2);
        assert_eq!(
            t2.eval(&j.flatten()).unwrap(),
            vec![rat(12, 1)]
        );
    }

    #[test]
    fn operational_examples() {
        // exp jet
        let f = parse::<f64>("exp(x0)").unwrap();
        let j = Jet::scalar_jet(&[0.0, 1.0, 0.0, 0.0]);
        let got = push_operational(&f, &j).unwrap();
        let expected = [1.0, 1.0, 0.5, 1.0 / 6.0];
        for (g, w) in got.coeffs().iter().zip(expected) {
            assert!((g[0] - w).abs() < 1e-15);
        }

        // Cauchy product instance
        let f = parse::<Q>("x0*x0").unwrap();
        let j = jet1(&[1, 1, 2]);
        assert_eq!(push_operational(&f, &j).unwrap(), jet1(&[1, 2, 5]));

        // constants
        let f = SmoothMap::constant(1, &[rat(9, 1)]);
        let j = jet1(&[1, 2, 3]);
        assert_eq!(push_operational(&f, &j).unwrap(), jet1(&[9, 0, 0]));
    }

    #[test]
    fn identity_and_linear_pushes() {
        let id = SmoothMap::<Q>::identity(1);
        let j = jet1(&[4, -2, 7]);
        assert_eq!(push_direct(&id, &j).unwrap(), j);
        // linear maps act coefficientwise
        let f = parse::<Q>("3*x0").unwrap();
        assert_eq!(push_tower(&f, &j).unwrap(), jet1(&[12, -6, 21]));
    }

    #[test]
    fn order_zero_and_one() {
        let f = parse::<Q>("x0^2 + x0").unwrap();
        let j0 = jet1(&[3]);
        for m in PushMethod::ALL {
            assert_eq!(push(&f, &j0, m).unwrap(), jet1(&[12]), "{}", m.name());
        }
        // order 1 is the tangent pushforward
        let j1 = jet1(&[3, 2]);
        for m in PushMethod::ALL {
            assert_eq!(push(&f, &j1, m).unwrap(), jet1(&[12, 14]), "{}", m.name());
        }
    }

    #[test]
    fn order_caps_are_enforced() {
        let f = parse::<f64>("exp(x0)").unwrap();
        let tall = Jet::new(
            64,
            1,
            (0..=64).map(|k| vec![if k == 0 { 0.25 } else { 1.0 }]).collect(),
        );
        assert!(push_operational(&f, &tall).is_ok());
        let too_tall = Jet::new(65, 1, (0..=65).map(|_| vec![0.5]).collect());
        assert!(matches!(
            push_operational(&f, &too_tall),
            Err(JetError::OrderTooLarge { .. })
        ));

        let g = parse::<Q>("x0^2").unwrap();
        let j9 = Jet::zero(9, 1);
        assert!(matches!(
            push_direct(&g, &j9),
            Err(JetError::OrderTooLarge { .. })
        ));
        let j13 = Jet::zero(13, 1);
        assert!(matches!(
            push_tower(&g, &j13),
            Err(JetError::OrderTooLarge { .. })
        ));
    }

    #[test]
    fn jet_of_jets_mu_examples() {
        // n = 2 grid: out_k = Σ_{i+j=k} a[i][j]
        let grid: Vec<Vec<Vec<Q>>> = (0..3)
            .map(|i| (0..3).map(|j| vec![rat((10 * i + j) as i64, 1)]).collect())
            .collect();
        let g = JetOfJets::new(2, 2, 1, grid);
        let m = g.mu().unwrap();
        assert_eq!(m, jet1(&[0, 1 + 10, 2 + 11 + 20]));
    }

    #[test]
    fn monad_unit_laws() {
        let j = Jet::scalar_jet(&[rat(1, 2), rat(-3, 1), rat(5, 7)]);
        assert_eq!(JetOfJets::eta_outer(&j, j.order()).mu().unwrap(), j);
        assert_eq!(JetOfJets::eta_inner(&j, j.order()).mu().unwrap(), j);
    }

    #[test]
    fn lift_is_not_a_unit() {
        // μ ∘ lift zeroes every odd coefficient: (j₀, 0, j₁, 0, …)
        let j = jet1(&[4, 7]);
        let m = JetOfJets::lift(&j).mu().unwrap();
        assert_eq!(m, jet1(&[4, 0]));
    }

    #[test]
    fn scale_powers() {
        let j = jet1(&[1, 1, 1]);
        assert_eq!(j.scale(&rat(2, 1)), jet1(&[1, 2, 4]));
    }

    #[test]
    fn push_map_matches_value_push() {
        let f = parse::<Q>("x0^2*x1 + x1^3").unwrap();
        let n = 3;
        let tn = push_map(&f, n).unwrap();
        let j = Jet::new(
            n,
            2,
            vec![
                vec![rat(1, 1), rat(2, 1)],
                vec![rat(1, 2), rat(-1, 1)],
                vec![rat(3, 1), rat(0, 1)],
                vec![rat(-2, 1), rat(1, 3)],
            ],
        );
        let via_map = Jet::from_flat(n, 1, &tn.eval(&j.flatten()).unwrap());
        let via_push = push_direct(&f, &j).unwrap();
        assert_eq!(via_map, via_push);
    }

    #[test]
    fn kleisli_pure_embedding() {
        let f = parse::<Q>("x0^2").unwrap();
        let g = parse::<Q>("x0 + 1").unwrap();
        let n = 2;
        let kf = JetMap::pure(&f, n);
        let kg = JetMap::pure(&g, n);
        let kgf = kleisli_compose(&kg, &kf).unwrap();
        let x = vec![rat(3, 1)];
        let expected = Jet::eta(&SmoothMap::compose(&g, &f).eval(&x).unwrap(), n);
        assert_eq!(kgf.apply(&x).unwrap(), expected);
    }

    #[test]
    fn kleisli_functor_instance() {
        // post-composing with a pure map is the functorial action:
        // with F(x) = T_n(x³) on a fixed direction jet,
        // pure(x²) ∘_Kleisli F = T_n(x⁶) on the same jet.
        let n = 3;
        let cube = parse::<Q>("x0^3").unwrap();
        let square = parse::<Q>("x0^2").unwrap();
        let sixth = parse::<Q>("x0^6").unwrap();

        // F : x ↦ T_n(cube)(x, 1, 2, -1)
        let with_dirs = SmoothMap::new(
            1,
            vec![
                Expr::var(0),
                Expr::constant(rat(1, 1)),
                Expr::constant(rat(2, 1)),
                Expr::constant(rat(-1, 1)),
            ],
        );
        let f_map = SmoothMap::compose(&push_map(&cube, n).unwrap(), &with_dirs);
        let f = JetMap::new(n, 1, f_map);
        let composed = kleisli_compose(&JetMap::pure(&square, n), &f).unwrap();

        let x = vec![rat(2, 1)];
        let source = Jet::new(
            n,
            1,
            vec![vec![rat(2, 1)], vec![rat(1, 1)], vec![rat(2, 1)], vec![rat(-1, 1)]],
        );
        assert_eq!(
            composed.apply(&x).unwrap(),
            push_direct(&sixth, &source).unwrap()
        );
    }

    #[test]
    fn kleisli_order_one_dual_composition() {
        // (g₀ + g₁ε) ∘ (f₀ + f₁ε) = g₀∘f₀ + (g₁∘f₀ + ∂g₀·(f₀,f₁)) ε
        let f0 = parse::<Q>("x0^2 + 1").unwrap();
        let f1 = parse::<Q>("x0 - 3").unwrap();
        let g0 = parse::<Q>("x0^3").unwrap();
        let g1 = parse::<Q>("2*x0").unwrap();
        let f = JetMap::new(1, 1, SmoothMap::pairing(&[&f0, &f1]));
        let g = JetMap::new(1, 1, SmoothMap::pairing(&[&g0, &g1]));
        let gf = kleisli_compose(&g, &f).unwrap();
        for xv in [-2i64, 0, 1, 4] {
            let x = vec![rat(xv, 1)];
            let f0x = f0.eval(&x).unwrap()[0].clone();
            let f1x = f1.eval(&x).unwrap()[0].clone();
            let expect0 = g0.eval(&[f0x.clone()]).unwrap()[0].clone();
            let dg0 = g0.total_derivative();
            let expect1 = g1.eval(&[f0x.clone()]).unwrap()[0]
                .add(&dg0.eval(&[f0x, f1x]).unwrap()[0]);
            let got = gf.apply(&x).unwrap();
            assert_eq!(got.coeff(0)[0], expect0);
            assert_eq!(got.coeff(1)[0], expect1);
        }
    }

    #[test]
    fn partial_push_examples() {
        // f(x, y) = x·y expanded in x with jet (x₀, 1), y = c
        let f = parse::<Q>("x0*x1").unwrap();
        let j = jet1(&[4, 1]);
        let c = vec![rat(6, 1)];
        let got = partial_push(&f, 0, &j, &c).unwrap();
        assert_eq!(got, jet1(&[24, 6]));

        // expanding in an absent argument gives a constant jet
        let g = parse::<Q>("x0^2").unwrap().with_arity(2).unwrap();
        let got = partial_push(&g, 1, &jet1(&[5, 1]), &[rat(3, 1)]).unwrap();
        assert_eq!(got, jet1(&[9, 0]));
    }

    #[test]
    fn strength_map_shapes() {
        let phi0 = strength_map::<Q>(1, 1, 2, 0);
        assert_eq!(phi0.arity(), 3 + 1);
        assert_eq!(phi0.coarity(), 6);
        let phi1 = strength_map::<Q>(1, 1, 2, 1);
        assert_eq!(phi1.arity(), 1 + 3);
        // Φ¹ against merge + eta at the value level
        let j = jet1(&[2, 3, 4]);
        let x0 = vec![rat(7, 1)];
        let via_map = phi1.eval(&{
            let mut v = x0.clone();
            v.extend(j.flatten());
            v
        }).unwrap();
        let merged = merge_jets(&Jet::eta(&x0, 2), &j);
        assert_eq!(via_map, merged.flatten());
    }
}
