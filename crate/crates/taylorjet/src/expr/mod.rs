//! Symbolic expression language and exact derivative operators.
//!
//! This is the independent oracle the rest of the crate is tested against:
//! expressions evaluate exactly over rationals on the polynomial fragment,
//! and symbolic differentiation realizes the derivative axioms of smooth
//! maps at desk scale.

mod parser;

pub use parser::{parse, parse_expr, ParseError};

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::scalar::{Scalar, ScalarError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("expression uses x{var} but only {supplied} values were supplied")]
    ArityMismatch { var: usize, supplied: usize },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Ring in which expressions can be evaluated. Implemented by the scalars
/// themselves, by truncated power series, and by iterated dual numbers.
pub trait EvalRing<S: Scalar>: Clone {
    fn from_scalar(c: &S) -> Self;
    fn ring_add(&self, rhs: &Self) -> Self;
    fn ring_sub(&self, rhs: &Self) -> Self;
    fn ring_mul(&self, rhs: &Self) -> Self;
    fn ring_neg(&self) -> Self;
    fn ring_div(&self, rhs: &Self) -> Result<Self, EvalError>;
    fn ring_sin(&self) -> Result<Self, EvalError>;
    fn ring_cos(&self) -> Result<Self, EvalError>;
    fn ring_exp(&self) -> Result<Self, EvalError>;
    fn ring_ln(&self) -> Result<Self, EvalError>;

    fn ring_powi(&self, k: u32) -> Self {
        let mut acc = Self::from_scalar(&S::one());
        for _ in 0..k {
            acc = acc.ring_mul(self);
        }
        acc
    }
}

impl<S: Scalar> EvalRing<S> for S {
    fn from_scalar(c: &S) -> Self {
        c.clone()
    }

    fn ring_add(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }

    fn ring_sub(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }

    fn ring_mul(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }

    fn ring_neg(&self) -> Self {
        self.neg()
    }

    fn ring_div(&self, rhs: &Self) -> Result<Self, EvalError> {
        Ok(self.div(rhs)?)
    }

    fn ring_sin(&self) -> Result<Self, EvalError> {
        Ok(self.sin()?)
    }

    fn ring_cos(&self) -> Result<Self, EvalError> {
        Ok(self.cos()?)
    }

    fn ring_exp(&self) -> Result<Self, EvalError> {
        Ok(self.exp()?)
    }

    fn ring_ln(&self) -> Result<Self, EvalError> {
        Ok(self.ln()?)
    }
}

/// Expression tree over variables `x0..x(d-1)`.
#[derive(Clone, PartialEq)]
pub enum Expr<S> {
    Var(usize),
    Const(S),
    Add(Box<Expr<S>>, Box<Expr<S>>),
    Mul(Box<Expr<S>>, Box<Expr<S>>),
    Neg(Box<Expr<S>>),
    PowInt(Box<Expr<S>>, u32),
    Div(Box<Expr<S>>, Box<Expr<S>>),
    Sin(Box<Expr<S>>),
    Cos(Box<Expr<S>>),
    Exp(Box<Expr<S>>),
    Ln(Box<Expr<S>>),
}

impl<S: Scalar> Expr<S> {
    pub fn var(i: usize) -> Self {
        Expr::Var(i)
    }

    pub fn constant(c: S) -> Self {
        Expr::Const(c)
    }

    pub fn int(k: i64) -> Self {
        Expr::Const(S::from_int(k))
    }

    pub fn zero() -> Self {
        Expr::Const(S::zero())
    }

    pub fn one() -> Self {
        Expr::Const(S::one())
    }

    pub fn is_zero_const(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_zero())
    }

    fn is_one_const(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == S::one())
    }

    /// Constant-folding sum.
    pub fn add(a: Expr<S>, b: Expr<S>) -> Expr<S> {
        if a.is_zero_const() {
            return b;
        }
        if b.is_zero_const() {
            return a;
        }
        if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
            return Expr::Const(x.add(y));
        }
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr<S>, b: Expr<S>) -> Expr<S> {
        Expr::add(a, Expr::neg(b))
    }

    pub fn neg(a: Expr<S>) -> Expr<S> {
        match a {
            Expr::Const(c) => Expr::Const(c.neg()),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(Box::new(other)),
        }
    }

    /// Constant-folding product.
    pub fn mul(a: Expr<S>, b: Expr<S>) -> Expr<S> {
        if a.is_zero_const() || b.is_zero_const() {
            return Expr::zero();
        }
        if a.is_one_const() {
            return b;
        }
        if b.is_one_const() {
            return a;
        }
        if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
            return Expr::Const(x.mul(y));
        }
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn scale(c: S, a: Expr<S>) -> Expr<S> {
        Expr::mul(Expr::Const(c), a)
    }

    pub fn powi(a: Expr<S>, k: u32) -> Expr<S> {
        match k {
            0 => Expr::one(),
            1 => a,
            _ => match a {
                Expr::Const(c) => Expr::Const(c.powi(k)),
                other => Expr::PowInt(Box::new(other), k),
            },
        }
    }

    pub fn div(a: Expr<S>, b: Expr<S>) -> Expr<S> {
        if b.is_one_const() {
            return a;
        }
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn sin(a: Expr<S>) -> Expr<S> {
        Expr::Sin(Box::new(a))
    }

    pub fn cos(a: Expr<S>) -> Expr<S> {
        Expr::Cos(Box::new(a))
    }

    pub fn exp(a: Expr<S>) -> Expr<S> {
        Expr::Exp(Box::new(a))
    }

    pub fn ln(a: Expr<S>) -> Expr<S> {
        Expr::Ln(Box::new(a))
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Var(i) => Some(*i),
            Expr::Const(_) => None,
            Expr::Add(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                match (a.max_var(), b.max_var()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
            Expr::Neg(a) | Expr::PowInt(a, _) | Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a)
            | Expr::Ln(a) => a.max_var(),
        }
    }

    /// No `Sin`/`Cos`/`Exp`/`Ln`/`Div` nodes anywhere.
    pub fn is_polynomial(&self) -> bool {
        match self {
            Expr::Var(_) | Expr::Const(_) => true,
            Expr::Add(a, b) | Expr::Mul(a, b) => a.is_polynomial() && b.is_polynomial(),
            Expr::Neg(a) | Expr::PowInt(a, _) => a.is_polynomial(),
            Expr::Div(..) | Expr::Sin(_) | Expr::Cos(_) | Expr::Exp(_) | Expr::Ln(_) => false,
        }
    }

    pub fn eval_in<R: EvalRing<S>>(&self, vars: &[R]) -> Result<R, EvalError> {
        match self {
            Expr::Var(i) => vars.get(*i).cloned().ok_or(EvalError::ArityMismatch {
                var: *i,
                supplied: vars.len(),
            }),
            Expr::Const(c) => Ok(R::from_scalar(c)),
            Expr::Add(a, b) => Ok(a.eval_in(vars)?.ring_add(&b.eval_in(vars)?)),
            Expr::Mul(a, b) => Ok(a.eval_in(vars)?.ring_mul(&b.eval_in(vars)?)),
            Expr::Neg(a) => Ok(a.eval_in(vars)?.ring_neg()),
            Expr::PowInt(a, k) => Ok(a.eval_in(vars)?.ring_powi(*k)),
            Expr::Div(a, b) => a.eval_in(vars)?.ring_div(&b.eval_in(vars)?),
            Expr::Sin(a) => a.eval_in(vars)?.ring_sin(),
            Expr::Cos(a) => a.eval_in(vars)?.ring_cos(),
            Expr::Exp(a) => a.eval_in(vars)?.ring_exp(),
            Expr::Ln(a) => a.eval_in(vars)?.ring_ln(),
        }
    }

    pub fn eval(&self, point: &[S]) -> Result<S, EvalError> {
        self.eval_in(point)
    }

    /// Symbolic partial derivative with respect to `x_i`. Only constant
    /// folding is applied on the way out.
    pub fn partial(&self, i: usize) -> Expr<S> {
        match self {
            Expr::Var(j) => {
                if *j == i {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Const(_) => Expr::zero(),
            Expr::Add(a, b) => Expr::add(a.partial(i), b.partial(i)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.partial(i), (**b).clone()),
                Expr::mul((**a).clone(), b.partial(i)),
            ),
            Expr::Neg(a) => Expr::neg(a.partial(i)),
            Expr::PowInt(a, k) => {
                // k >= 2 after folding in `powi`, but handle all k anyway.
                match *k {
                    0 => Expr::zero(),
                    _ => Expr::mul(
                        Expr::scale(S::from_int(*k as i64), Expr::powi((**a).clone(), k - 1)),
                        a.partial(i),
                    ),
                }
            }
            Expr::Div(a, b) => {
                let da = a.partial(i);
                let db = b.partial(i);
                // (a/b)' = (a'·b − a·b') / b²
                Expr::div(
                    Expr::sub(
                        Expr::mul(da, (**b).clone()),
                        Expr::mul((**a).clone(), db),
                    ),
                    Expr::powi((**b).clone(), 2),
                )
            }
            Expr::Sin(a) => Expr::mul(Expr::cos((**a).clone()), a.partial(i)),
            Expr::Cos(a) => Expr::neg(Expr::mul(Expr::sin((**a).clone()), a.partial(i))),
            Expr::Exp(a) => Expr::mul(Expr::exp((**a).clone()), a.partial(i)),
            Expr::Ln(a) => Expr::div(a.partial(i), (**a).clone()),
        }
    }

    /// Replaces every `x_i` by `subs[i]`.
    pub fn substitute(&self, subs: &[Expr<S>]) -> Expr<S> {
        match self {
            Expr::Var(i) => subs
                .get(*i)
                .cloned()
                .unwrap_or_else(|| panic!("substitution missing x{i}")),
            Expr::Const(c) => Expr::Const(c.clone()),
            Expr::Add(a, b) => Expr::add(a.substitute(subs), b.substitute(subs)),
            Expr::Mul(a, b) => Expr::mul(a.substitute(subs), b.substitute(subs)),
            Expr::Neg(a) => Expr::neg(a.substitute(subs)),
            Expr::PowInt(a, k) => Expr::powi(a.substitute(subs), *k),
            Expr::Div(a, b) => Expr::div(a.substitute(subs), b.substitute(subs)),
            Expr::Sin(a) => Expr::sin(a.substitute(subs)),
            Expr::Cos(a) => Expr::cos(a.substitute(subs)),
            Expr::Exp(a) => Expr::exp(a.substitute(subs)),
            Expr::Ln(a) => Expr::ln(a.substitute(subs)),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        let my_prec = match self {
            Expr::Add(..) => 1,
            Expr::Neg(_) => 2,
            Expr::Mul(..) | Expr::Div(..) => 3,
            Expr::PowInt(..) => 4,
            _ => 5,
        };
        let parens = my_prec < prec;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Expr::Var(i) => write!(f, "x{i}")?,
            Expr::Const(c) => {
                let text = format!("{c}");
                if text.contains('/') || text.starts_with('-') {
                    write!(f, "({text})")?;
                } else {
                    write!(f, "{text}")?;
                }
            }
            Expr::Add(a, b) => {
                a.fmt_prec(f, 1)?;
                if let Expr::Neg(inner) = &**b {
                    write!(f, " - ")?;
                    inner.fmt_prec(f, 2)?;
                } else {
                    write!(f, " + ")?;
                    b.fmt_prec(f, 1)?;
                }
            }
            Expr::Mul(a, b) => {
                a.fmt_prec(f, 3)?;
                write!(f, "*")?;
                b.fmt_prec(f, 4)?;
            }
            Expr::Div(a, b) => {
                a.fmt_prec(f, 3)?;
                write!(f, "/")?;
                b.fmt_prec(f, 4)?;
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.fmt_prec(f, 3)?;
            }
            Expr::PowInt(a, k) => {
                a.fmt_prec(f, 5)?;
                write!(f, "^{k}")?;
            }
            Expr::Sin(a) => {
                write!(f, "sin(")?;
                a.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
            Expr::Cos(a) => {
                write!(f, "cos(")?;
                a.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
            Expr::Exp(a) => {
                write!(f, "exp(")?;
                a.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
            Expr::Ln(a) => {
                write!(f, "ln(")?;
                a.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Display for Expr<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl<S: Scalar> fmt::Debug for Expr<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Symbolic morphism `R^arity -> R^coarity`: one expression per output
/// component, variables `x0..x(arity-1)`.
#[derive(Clone, PartialEq)]
pub struct SmoothMap<S> {
    arity: usize,
    body: Vec<Expr<S>>,
}

impl<S: Scalar> SmoothMap<S> {
    pub fn new(arity: usize, body: Vec<Expr<S>>) -> Self {
        for (k, e) in body.iter().enumerate() {
            if let Some(m) = e.max_var() {
                assert!(
                    m < arity,
                    "component {k} uses x{m}, beyond declared arity {arity}"
                );
            }
        }
        SmoothMap { arity, body }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn coarity(&self) -> usize {
        self.body.len()
    }

    pub fn body(&self) -> &[Expr<S>] {
        &self.body
    }

    pub fn component(&self, k: usize) -> &Expr<S> {
        &self.body[k]
    }

    /// Re-declares the arity, e.g. to widen `x0` to a map on more inputs.
    pub fn with_arity(&self, arity: usize) -> Result<Self, EvalError> {
        for e in &self.body {
            if let Some(m) = e.max_var() {
                if m >= arity {
                    return Err(EvalError::ArityMismatch {
                        var: m,
                        supplied: arity,
                    });
                }
            }
        }
        Ok(SmoothMap {
            arity,
            body: self.body.clone(),
        })
    }

    pub fn is_polynomial(&self) -> bool {
        self.body.iter().all(|e| e.is_polynomial())
    }

    pub fn eval(&self, point: &[S]) -> Result<Vec<S>, EvalError> {
        self.eval_in(point)
    }

    pub fn eval_in<R: EvalRing<S>>(&self, vars: &[R]) -> Result<Vec<R>, EvalError> {
        if vars.len() != self.arity {
            return Err(EvalError::ArityMismatch {
                var: self.arity.saturating_sub(1),
                supplied: vars.len(),
            });
        }
        self.body.iter().map(|e| e.eval_in(vars)).collect()
    }

    pub fn identity(d: usize) -> Self {
        SmoothMap::new(d, (0..d).map(Expr::var).collect())
    }

    /// The projection onto block `i` of `blocks` consecutive blocks of
    /// width `d` each.
    pub fn proj_block(d: usize, blocks: usize, i: usize) -> Self {
        assert!(i < blocks);
        SmoothMap::new(d * blocks, (0..d).map(|c| Expr::var(i * d + c)).collect())
    }

    pub fn constant(arity: usize, values: &[S]) -> Self {
        SmoothMap::new(arity, values.iter().cloned().map(Expr::constant).collect())
    }

    pub fn zero_map(arity: usize, coarity: usize) -> Self {
        SmoothMap::new(arity, (0..coarity).map(|_| Expr::zero()).collect())
    }

    /// `g ∘ f`: substitutes `f`'s components for `g`'s variables.
    pub fn compose(g: &Self, f: &Self) -> Self {
        assert_eq!(
            g.arity,
            f.coarity(),
            "composition arity mismatch: g expects {}, f yields {}",
            g.arity,
            f.coarity()
        );
        SmoothMap::new(
            f.arity,
            g.body.iter().map(|e| e.substitute(&f.body)).collect(),
        )
    }

    /// Pairing `⟨f, g, …⟩` of maps sharing one source.
    pub fn pairing(maps: &[&Self]) -> Self {
        assert!(!maps.is_empty());
        let arity = maps[0].arity;
        assert!(maps.iter().all(|m| m.arity == arity));
        SmoothMap::new(
            arity,
            maps.iter().flat_map(|m| m.body.iter().cloned()).collect(),
        )
    }

    /// Product `f × g` on the product of the sources.
    pub fn product(f: &Self, g: &Self) -> Self {
        let shift: Vec<Expr<S>> = (0..g.arity).map(|i| Expr::var(f.arity + i)).collect();
        let mut body = f.body.clone();
        body.extend(g.body.iter().map(|e| e.substitute(&shift)));
        SmoothMap::new(f.arity + g.arity, body)
    }

    pub fn add_maps(f: &Self, g: &Self) -> Self {
        assert_eq!(f.arity, g.arity);
        assert_eq!(f.coarity(), g.coarity());
        SmoothMap::new(
            f.arity,
            f.body
                .iter()
                .zip(&g.body)
                .map(|(a, b)| Expr::add(a.clone(), b.clone()))
                .collect(),
        )
    }

    pub fn scale_map(r: &S, f: &Self) -> Self {
        SmoothMap::new(
            f.arity,
            f.body
                .iter()
                .map(|e| Expr::scale(r.clone(), e.clone()))
                .collect(),
        )
    }

    /// Homothety `h_r = r · id`.
    pub fn homothety(d: usize, r: &S) -> Self {
        Self::scale_map(r, &Self::identity(d))
    }

    /// Sum `σ = π₀ + π₁ : X × X → X`.
    pub fn sigma(d: usize) -> Self {
        SmoothMap::new(
            2 * d,
            (0..d)
                .map(|c| Expr::add(Expr::var(c), Expr::var(d + c)))
                .collect(),
        )
    }

    /// Total derivative `∂f(x, u) = Σ_i ∂_i f(x) · u_i`, arity `2d`.
    pub fn total_derivative(&self) -> Self {
        let d = self.arity;
        let body = self
            .body
            .iter()
            .map(|e| {
                let mut acc = Expr::zero();
                for i in 0..d {
                    acc = Expr::add(acc, Expr::mul(e.partial(i), Expr::var(d + i)));
                }
                acc
            })
            .collect();
        SmoothMap::new(2 * d, body)
    }

    /// `n`-th derivative: iterated first-slot partial derivative, arity
    /// `d(n+1)`. Direction block `k` occupies variables `kd..(k+1)d`.
    pub fn higher_derivative(&self, n: usize) -> Self {
        let d = self.arity;
        let mut current = self.clone();
        for k in 0..n {
            let old_arity = d * (k + 1);
            let new_arity = d * (k + 2);
            let body = current
                .body
                .iter()
                .map(|e| {
                    let mut acc = Expr::zero();
                    for i in 0..d {
                        acc = Expr::add(acc, Expr::mul(e.partial(i), Expr::var(old_arity + i)));
                    }
                    acc
                })
                .collect();
            current = SmoothMap::new(new_arity, body);
        }
        current
    }

    /// Randomized equality test. Points are rationals `p/q` with
    /// `p ∈ [-9, 9]`, `q ∈ [1, 4]`, drawn from a seeded generator; exact
    /// scalars compare with `==`, floats within `1e-9`. One-sided: `false`
    /// is definitive on the polynomial fragment.
    pub fn equal_probabilistic(
        f: &Self,
        g: &Self,
        trials: usize,
        seed: u64,
    ) -> Result<bool, EvalError> {
        assert_eq!(f.arity, g.arity, "arity mismatch");
        assert_eq!(f.coarity(), g.coarity(), "coarity mismatch");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rel = S::from_ratio(1, 1_000_000_000);
        for _ in 0..trials {
            let point: Vec<S> = (0..f.arity).map(|_| random_rational_scalar(&mut rng)).collect();
            let fv = f.eval(&point)?;
            let gv = g.eval(&point)?;
            for (a, b) in fv.iter().zip(&gv) {
                if S::EXACT {
                    if a != b {
                        return Ok(false);
                    }
                } else if !a.approx_eq(b, &rel, &rel) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

impl<S: Scalar> fmt::Display for SmoothMap<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.body.len() == 1 {
            write!(f, "{}", self.body[0])
        } else {
            write!(f, "(")?;
            for (k, e) in self.body.iter().enumerate() {
                if k > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, ")")
        }
    }
}

impl<S: Scalar> fmt::Debug for SmoothMap<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[arity {}] {}", self.arity, self)
    }
}

/// Random rational `p/q`, `p ∈ [-9, 9]`, `q ∈ [1, 4]`.
pub fn random_rational_scalar<S: Scalar, R: Rng>(rng: &mut R) -> S {
    let p = rng.gen_range(-9..=9i64);
    let q = rng.gen_range(1..=4u64);
    S::from_ratio(p, q)
}
