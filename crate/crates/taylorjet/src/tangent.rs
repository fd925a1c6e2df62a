//! First-order tangent bundle and its iterated tower.
//!
//! A level-`n` tower value has `2^n` word-indexed coordinates; pushing a
//! map through `n` tangent layers is evaluation in the nilpotent ring
//! `R[ξ₁…ξₙ]/(ξᵢ²)`, whose monomials are exactly those words. Position
//! `n` of a word (its last bit) indexes the outermost tangent layer.

use thiserror::Error;

use crate::combinatorics::Word;
use crate::expr::{EvalError, EvalRing, SmoothMap};
use crate::scalar::Scalar;

/// Levels above this make the `2^n` coordinate array impractical.
pub const MAX_TOWER_LEVEL: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TangentError {
    #[error("tower level {0} exceeds the maximum of {MAX_TOWER_LEVEL}")]
    LevelTooLarge(usize),
    #[error("expected a word of length {expected}, got {got}")]
    WordLength { expected: usize, got: usize },
    #[error("tower level {0} is odd, cannot halve")]
    OddLevel(usize),
    #[error("tower level {got} does not match {expected}")]
    LevelMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Element of the iterated tangent bundle: `2^level` coordinate vectors
/// in `Scalar^dim`, indexed by binary words.
#[derive(Clone, PartialEq, Debug)]
pub struct TowerValue<S> {
    level: usize,
    dim: usize,
    coords: Vec<Vec<S>>,
}

impl<S: Scalar> TowerValue<S> {
    pub fn new(level: usize, dim: usize, coords: Vec<Vec<S>>) -> Result<Self, TangentError> {
        if level > MAX_TOWER_LEVEL {
            return Err(TangentError::LevelTooLarge(level));
        }
        assert_eq!(coords.len(), 1 << level, "expected 2^level coordinate vectors");
        assert!(coords.iter().all(|v| v.len() == dim), "coordinate dimension mismatch");
        Ok(TowerValue { level, dim, coords })
    }

    pub fn zero(level: usize, dim: usize) -> Result<Self, TangentError> {
        Self::new(level, dim, vec![vec![S::zero(); dim]; 1 << level])
    }

    /// Monad unit: coordinate `0…0` is `x`, every other coordinate is zero.
    pub fn eta(x: &[S], level: usize) -> Result<Self, TangentError> {
        let mut t = Self::zero(level, x.len())?;
        t.coords[0] = x.to_vec();
        Ok(t)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[Vec<S>] {
        &self.coords
    }

    pub fn coord_mut(&mut self, w: &Word) -> &mut Vec<S> {
        &mut self.coords[w.mask() as usize]
    }

    /// The `w`-indexed coordinate, `π_w`.
    pub fn proj_word(&self, w: &Word) -> Result<&[S], TangentError> {
        if w.len() != self.level {
            return Err(TangentError::WordLength {
                expected: self.level,
                got: w.len(),
            });
        }
        Ok(&self.coords[w.mask() as usize])
    }

    /// The all-ones corner `π_{1…1}`, which carries the total derivative.
    pub fn top_corner(&self) -> &[S] {
        &self.coords[(1usize << self.level) - 1]
    }

    fn word(&self, mask: usize) -> Word {
        Word::new(self.level, mask as u64)
    }

    /// Monad multiplication: a level-`2n` value is a level-`n` tower of
    /// level-`n` towers (inner word first, outer word last); coordinate
    /// `w` of the result sums the `(w¹ inner, w² outer)` coordinates over
    /// every disjoint split `w¹ ∪ w² = w`. Both unit laws pin this
    /// inner/outer role assignment; see the module tests.
    pub fn mu(&self) -> Result<Self, TangentError> {
        if self.level % 2 != 0 {
            return Err(TangentError::OddLevel(self.level));
        }
        self.mu_top(self.level / 2)
    }

    /// Multiplication of the top `2n` layers only, keeping the lower
    /// layers as payload.
    pub fn mu_top(&self, n: usize) -> Result<Self, TangentError> {
        assert!(self.level >= 2 * n);
        let payload = self.level - 2 * n;
        let mut out = Self::zero(self.level - n, self.dim)?;
        for mask in 0..(1usize << (self.level - n)) {
            let w = out.word(mask);
            let (wp, wtop) = w.split_at(payload);
            let mut acc = vec![S::zero(); self.dim];
            for (w1, w2) in wtop.splits2() {
                let source = wp.concat(&w1).concat(&w2);
                for (a, b) in acc.iter_mut().zip(&self.coords[source.mask() as usize]) {
                    *a = a.add(b);
                }
            }
            out.coords[mask] = acc;
        }
        Ok(out)
    }

    /// Distributive-law swap: output coordinate `(u, v)` is input
    /// coordinate `(v, u)` with `|u| = n`, `|v| = m`.
    pub fn swap(&self, n: usize, m: usize) -> Result<Self, TangentError> {
        if self.level != n + m {
            return Err(TangentError::LevelMismatch {
                expected: n + m,
                got: self.level,
            });
        }
        let mut out = Self::zero(self.level, self.dim)?;
        for mask in 0..(1usize << self.level) {
            let w = self.word(mask);
            let (v, u) = w.split_at(m);
            let target = u.concat(&v);
            out.coords[target.mask() as usize] = self.coords[mask].clone();
        }
        Ok(out)
    }

    /// Transposes adjacent layers `pos` and `pos + 1` (1-based).
    pub fn swap_adjacent(&self, pos: usize) -> Self {
        assert!(pos >= 1 && pos < self.level);
        let mut out = self.clone();
        let (lo, hi) = (1usize << (pos - 1), 1usize << pos);
        for mask in 0..(1usize << self.level) {
            let a = (mask & lo) != 0;
            let b = (mask & hi) != 0;
            if a != b {
                let target = mask ^ lo ^ hi;
                out.coords[target] = self.coords[mask].clone();
            }
        }
        out
    }

    /// Scaling: coordinate `w` is multiplied by `r^|w|`.
    pub fn scale(&self, r: &S) -> Self {
        let mut out = self.clone();
        for mask in 0..(1usize << self.level) {
            let weight = (mask as u64).count_ones();
            let factor = r.powi(weight);
            for c in out.coords[mask].iter_mut() {
                *c = c.mul(&factor);
            }
        }
        out
    }

    /// Lift into a doubled tower: coordinate `(u inner, v outer)` is the
    /// original coordinate `u` when `u = v` and zero otherwise.
    pub fn lift(&self) -> Result<Self, TangentError> {
        let n = self.level;
        let mut out = Self::zero(2 * n, self.dim)?;
        for mask in 0..(1usize << n) {
            let u = self.word(mask);
            let target = u.concat(&u);
            out.coords[target.mask() as usize] = self.coords[mask].clone();
        }
        Ok(out)
    }

    /// Unit applied on top: `n` new outermost zero layers.
    pub fn eta_top(&self, n: usize) -> Result<Self, TangentError> {
        let mut out = Self::zero(self.level + n, self.dim)?;
        for mask in 0..(1usize << self.level) {
            out.coords[mask] = self.coords[mask].clone();
        }
        Ok(out)
    }

    /// Unit applied under every existing layer: `n` new innermost zero
    /// layers.
    pub fn eta_inner(&self, n: usize) -> Result<Self, TangentError> {
        let mut out = Self::zero(self.level + n, self.dim)?;
        for mask in 0..(1usize << self.level) {
            out.coords[mask << n] = self.coords[mask].clone();
        }
        Ok(out)
    }

    /// Applies `op` inside the top `k` layers: the value is split into
    /// `2^k` sub-towers, each is transformed, and the results are
    /// reassembled under the same top-layer addressing.
    pub fn map_under_top<F>(&self, k: usize, op: F) -> Result<Self, TangentError>
    where
        F: Fn(&TowerValue<S>) -> Result<TowerValue<S>, TangentError>,
    {
        assert!(k <= self.level);
        let inner = self.level - k;
        let mut pieces = Vec::with_capacity(1 << k);
        for top in 0..(1usize << k) {
            let coords: Vec<Vec<S>> = (0..(1usize << inner))
                .map(|lo| self.coords[(top << inner) | lo].clone())
                .collect();
            pieces.push(op(&TowerValue::new(inner, self.dim, coords)?)?);
        }
        let new_inner = pieces[0].level;
        assert!(pieces.iter().all(|p| p.level == new_inner && p.dim == self.dim));
        let mut coords = Vec::with_capacity(1 << (k + new_inner));
        for piece in &pieces {
            coords.extend(piece.coords.iter().cloned());
        }
        TowerValue::new(k + new_inner, self.dim, coords)
    }
}

/// Element of `R[ξ₁…ξₙ]/(ξᵢ²)`: one scalar per word. Evaluating an
/// expression over this ring computes the iterated tangent pushforward.
#[derive(Clone, PartialEq, Debug)]
pub struct TowerElem<S> {
    level: usize,
    coords: Vec<S>,
}

impl<S: Scalar> TowerElem<S> {
    pub fn constant(level: usize, c: &S) -> Self {
        let mut coords = vec![S::zero(); 1 << level];
        coords[0] = c.clone();
        TowerElem { level, coords }
    }

    pub fn from_coords(coords: Vec<S>) -> Self {
        let level = coords.len().trailing_zeros() as usize;
        assert_eq!(coords.len(), 1 << level, "coordinate count must be a power of two");
        TowerElem { level, coords }
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    /// Pads a level-0 element (a constant that never met a variable) up
    /// to `level`.
    pub fn widen(&self, level: usize) -> TowerElem<S> {
        assert!(self.level == 0 || self.level == level);
        let mut coords = self.coords.clone();
        coords.resize(1 << level, S::zero());
        TowerElem { level, coords }
    }

    fn halves(&self) -> (TowerElem<S>, TowerElem<S>) {
        let half = self.coords.len() / 2;
        (
            TowerElem {
                level: self.level - 1,
                coords: self.coords[..half].to_vec(),
            },
            TowerElem {
                level: self.level - 1,
                coords: self.coords[half..].to_vec(),
            },
        )
    }

    fn join(lo: TowerElem<S>, hi: TowerElem<S>) -> TowerElem<S> {
        debug_assert_eq!(lo.level, hi.level);
        let mut coords = lo.coords;
        coords.extend(hi.coords);
        TowerElem {
            level: lo.level + 1,
            coords,
        }
    }

    fn scalar(&self) -> &S {
        debug_assert_eq!(self.level, 0);
        &self.coords[0]
    }

    /// Simultaneous sine and cosine, sharing the recursive structure.
    fn sin_cos(&self) -> Result<(TowerElem<S>, TowerElem<S>), EvalError> {
        if self.level == 0 {
            let s = self.scalar().sin()?;
            let c = self.scalar().cos()?;
            return Ok((
                TowerElem::constant(0, &s),
                TowerElem::constant(0, &c),
            ));
        }
        let (lo, hi) = self.halves();
        let (s, c) = lo.sin_cos()?;
        let sin = TowerElem::join(s.clone(), hi.ring_mul(&c));
        let cos = TowerElem::join(c, hi.ring_mul(&s).ring_neg());
        Ok((sin, cos))
    }
}

impl<S: Scalar> EvalRing<S> for TowerElem<S> {
    fn from_scalar(c: &S) -> Self {
        // Level is fixed by the surrounding evaluation; scalar constants
        // are injected at level 0 and widened on demand.
        TowerElem::constant(0, c)
    }

    fn ring_add(&self, rhs: &Self) -> Self {
        let (a, b) = align(self, rhs);
        TowerElem {
            level: a.level,
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x.add(y)).collect(),
        }
    }

    fn ring_sub(&self, rhs: &Self) -> Self {
        self.ring_add(&rhs.ring_neg())
    }

    fn ring_mul(&self, rhs: &Self) -> Self {
        let (a, b) = align(self, rhs);
        let n = a.level;
        let full = (1usize << n) - 1;
        let mut coords = vec![S::zero(); 1 << n];
        for i in 0..=full {
            if a.coords[i].is_zero() {
                continue;
            }
            // enumerate subsets j of the complement of i
            let comp = full & !i;
            let mut j = 0usize;
            loop {
                let term = a.coords[i].mul(&b.coords[j]);
                coords[i | j] = coords[i | j].add(&term);
                if j == comp {
                    break;
                }
                j = (j.wrapping_sub(comp)) & comp;
            }
        }
        TowerElem { level: n, coords }
    }

    fn ring_neg(&self) -> Self {
        TowerElem {
            level: self.level,
            coords: self.coords.iter().map(|c| c.neg()).collect(),
        }
    }

    fn ring_div(&self, rhs: &Self) -> Result<Self, EvalError> {
        let (a, b) = align(self, rhs);
        if a.level == 0 {
            return Ok(TowerElem::constant(0, &a.scalar().div(b.scalar())?));
        }
        let (alo, ahi) = a.halves();
        let (blo, bhi) = b.halves();
        // (alo + ahi ξ) / (blo + bhi ξ) = alo/blo + (ahi·blo − alo·bhi)/blo² ξ
        let qlo = alo.ring_div(&blo)?;
        let num = ahi.ring_mul(&blo).ring_sub(&alo.ring_mul(&bhi));
        let qhi = num.ring_div(&blo.ring_mul(&blo))?;
        Ok(TowerElem::join(qlo, qhi))
    }

    fn ring_sin(&self) -> Result<Self, EvalError> {
        Ok(self.sin_cos()?.0)
    }

    fn ring_cos(&self) -> Result<Self, EvalError> {
        Ok(self.sin_cos()?.1)
    }

    fn ring_exp(&self) -> Result<Self, EvalError> {
        if self.level == 0 {
            return Ok(TowerElem::constant(0, &self.scalar().exp()?));
        }
        let (lo, hi) = self.halves();
        let e = lo.ring_exp()?;
        Ok(TowerElem::join(e.clone(), hi.ring_mul(&e)))
    }

    fn ring_ln(&self) -> Result<Self, EvalError> {
        if self.level == 0 {
            return Ok(TowerElem::constant(0, &self.scalar().ln()?));
        }
        let (lo, hi) = self.halves();
        let l = lo.ring_ln()?;
        Ok(TowerElem::join(l, hi.ring_div(&lo)?))
    }
}

/// Widens constants (level 0) to a common level; genuine level conflicts
/// are programming errors.
fn align<S: Scalar>(a: &TowerElem<S>, b: &TowerElem<S>) -> (TowerElem<S>, TowerElem<S>) {
    if a.level == b.level {
        return (a.clone(), b.clone());
    }
    let widen = |t: &TowerElem<S>, level: usize| {
        let mut coords = vec![S::zero(); 1 << level];
        coords[0] = t.coords[0].clone();
        TowerElem { level, coords }
    };
    if a.level == 0 {
        (widen(a, b.level), b.clone())
    } else if b.level == 0 {
        (a.clone(), widen(b, a.level))
    } else {
        panic!("tower level mismatch: {} vs {}", a.level, b.level);
    }
}

/// Tangent bundle on maps: `T f = ⟨f ∘ π₀, ∂f⟩`, arity `2d` to `2e`.
pub fn tangent_push<S: Scalar>(f: &SmoothMap<S>) -> SmoothMap<S> {
    let base = f
        .with_arity(2 * f.arity())
        .expect("widening a map onto the tangent space cannot fail");
    SmoothMap::pairing(&[&base, &f.total_derivative()])
}

/// `n`-fold tangent bundle on maps, symbolically.
pub fn iterated_push<S: Scalar>(f: &SmoothMap<S>, n: usize) -> SmoothMap<S> {
    let mut out = f.clone();
    for _ in 0..n {
        out = tangent_push(&out);
    }
    out
}

/// Value-level `Tⁿ f`: evaluates `f` coordinate-wise in the nilpotent
/// ring, which is exactly the `n`-fold tangent pushforward.
pub fn apply_map<S: Scalar>(
    f: &SmoothMap<S>,
    t: &TowerValue<S>,
) -> Result<TowerValue<S>, TangentError> {
    assert_eq!(f.arity(), t.dim(), "map arity must match tower dimension");
    let inputs: Vec<TowerElem<S>> = (0..t.dim())
        .map(|v| TowerElem::from_coords(t.coords().iter().map(|c| c[v].clone()).collect()))
        .collect();
    let outputs: Vec<TowerElem<S>> = f
        .eval_in(&inputs)?
        .into_iter()
        .map(|o| o.widen(t.level()))
        .collect();
    let coords: Vec<Vec<S>> = (0..(1usize << t.level()))
        .map(|mask| outputs.iter().map(|o| o.coords()[mask].clone()).collect())
        .collect();
    TowerValue::new(t.level(), outputs.len(), coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::scalar::rat;
    use num_rational::BigRational;

    type Q = BigRational;

    fn qv(vals: &[i64]) -> Vec<Q> {
        vals.iter().map(|v| rat(*v, 1)).collect()
    }

    fn tower2(x: i64, u: i64, v: i64, w: i64) -> TowerValue<Q> {
        TowerValue::new(2, 1, vec![qv(&[x]), qv(&[u]), qv(&[v]), qv(&[w])]).unwrap()
    }

    #[test]
    fn proj_word_level_one() {
        let t = TowerValue::new(1, 1, vec![qv(&[10]), qv(&[20])]).unwrap();
        assert_eq!(t.proj_word(&Word::parse("0")).unwrap(), &qv(&[10])[..]);
        assert_eq!(t.proj_word(&Word::parse("1")).unwrap(), &qv(&[20])[..]);
        assert!(t.proj_word(&Word::parse("01")).is_err());
    }

    #[test]
    fn tangent_push_square() {
        let f = parse::<Q>("x0^2").unwrap();
        let tf = tangent_push(&f);
        assert_eq!(tf.eval(&qv(&[3, 5])).unwrap(), qv(&[9, 30]));
        // π₀ ∘ Tf = f ∘ π₀
        assert_eq!(tf.eval(&qv(&[3, 7])).unwrap()[0], rat(9, 1));
    }

    #[test]
    fn tangent_push_identity_and_linear() {
        let id = SmoothMap::<Q>::identity(2);
        let tid = tangent_push(&id);
        let point = qv(&[1, 2, 3, 4]);
        assert_eq!(tid.eval(&point).unwrap(), point);

        // ∂-linear map: T f = f × f
        let f = parse::<Q>("3*x0").unwrap();
        let tf = tangent_push(&f);
        assert_eq!(tf.eval(&qv(&[2, 5])).unwrap(), qv(&[6, 15]));
    }

    #[test]
    fn iterated_push_square_order_two() {
        let f = parse::<Q>("x0^2").unwrap();
        let t2f = iterated_push(&f, 2);
        // (x, u, v, w) ↦ (x², 2xu, 2xv, 2uv + 2xw)
        let got = t2f.eval(&qv(&[2, 3, 5, 7])).unwrap();
        assert_eq!(got, qv(&[4, 12, 20, 2 * (3 * 5) + 2 * (2 * 7)]));

        // n = 0 is the map itself
        assert_eq!(iterated_push(&f, 0).eval(&qv(&[4])).unwrap(), qv(&[16]));
    }

    #[test]
    fn apply_map_matches_symbolic_push() {
        let f = parse::<Q>("x0^3*x1 + x1^2").unwrap();
        for n in 0..=3usize {
            let symbolic = iterated_push(&f, n);
            let coords: Vec<Vec<Q>> = (0..(1usize << n))
                .map(|i| qv(&[i as i64 + 1, 2 * i as i64 - 3]))
                .collect();
            let t = TowerValue::new(n, 2, coords.clone()).unwrap();
            let flat: Vec<Q> = {
                // variable blocks in coordinate order
                let mut point = Vec::new();
                for c in &coords {
                    point.extend(c.iter().cloned());
                }
                point
            };
            let via_symbolic = symbolic.eval(&flat).unwrap();
            let via_ring = apply_map(&f, &t).unwrap();
            for mask in 0..(1usize << n) {
                assert_eq!(via_ring.coords()[mask][0], via_symbolic[mask], "n={n} mask={mask}");
            }
        }
    }

    #[test]
    fn projections_push_coordinatewise() {
        // Tⁿ of a projection projects every coordinate
        let pi1 = SmoothMap::<Q>::proj_block(1, 2, 1);
        for n in 0..=3usize {
            let coords: Vec<Vec<Q>> = (0..(1usize << n))
                .map(|i| qv(&[i as i64, 10 + i as i64]))
                .collect();
            let t = TowerValue::new(n, 2, coords.clone()).unwrap();
            let pushed = apply_map(&pi1, &t).unwrap();
            for (got, src) in pushed.coords().iter().zip(&coords) {
                assert_eq!(got, &vec![src[1].clone()]);
            }
        }
    }

    #[test]
    fn top_corner_is_total_derivative() {
        // ∂²f(x, u, v, w) coordinate of T²(x0²) is 2uv + 2xw
        let f = parse::<Q>("x0^2").unwrap();
        let t = tower2(2, 3, 5, 7);
        let pushed = apply_map(&f, &t).unwrap();
        assert_eq!(pushed.top_corner(), &qv(&[2 * 3 * 5 + 2 * 2 * 7])[..]);
        assert_eq!(
            pushed.proj_word(&Word::parse("11")).unwrap(),
            &qv(&[2 * 15 + 4 * 7])[..]
        );
    }

    #[test]
    fn eta_examples() {
        let t = TowerValue::eta(&qv(&[5]), 1).unwrap();
        assert_eq!(t.coords(), &[qv(&[5]), qv(&[0])]);
        let t = TowerValue::eta(&qv(&[5]), 0).unwrap();
        assert_eq!(t.coords(), &[qv(&[5])]);
        let t = TowerValue::eta(&qv(&[5]), 2).unwrap();
        assert_eq!(t.coords(), &[qv(&[5]), qv(&[0]), qv(&[0]), qv(&[0])]);
    }

    #[test]
    fn mu_level_one() {
        // (x, u, v, w) ↦ (x, u + v)
        let t = tower2(1, 2, 3, 4);
        let m = t.mu().unwrap();
        assert_eq!(m.coords(), &[qv(&[1]), qv(&[5])]);
        assert!(tower2(0, 0, 0, 0).eta_top(1).unwrap().mu().is_err());
    }

    #[test]
    fn mu_unit_laws() {
        let t = tower2(1, 2, 3, 4);
        // η on top, then μ
        assert_eq!(t.eta_top(2).unwrap().mu().unwrap(), t);
        // η inside, then μ
        assert_eq!(t.eta_inner(2).unwrap().mu().unwrap(), t);
    }

    #[test]
    fn swap_level_one_pair() {
        let t = tower2(1, 2, 3, 4);
        let s = t.swap(1, 1).unwrap();
        assert_eq!(s.coords(), &[qv(&[1]), qv(&[3]), qv(&[2]), qv(&[4])]);
        assert_eq!(s.swap(1, 1).unwrap(), t);
    }

    #[test]
    fn scale_weights() {
        let t = tower2(1, 1, 1, 1);
        let s = t.scale(&rat(2, 1));
        assert_eq!(s.coords(), &[qv(&[1]), qv(&[2]), qv(&[2]), qv(&[4])]);
        assert_eq!(t.scale(&rat(1, 1)), t);
    }

    #[test]
    fn yang_baxter() {
        let coords: Vec<Vec<Q>> = (0..8).map(|i| qv(&[i * i - 3 * i + 1])).collect();
        let t = TowerValue::new(3, 1, coords).unwrap();
        let lhs = t.swap_adjacent(1).swap_adjacent(2).swap_adjacent(1);
        let rhs = t.swap_adjacent(2).swap_adjacent(1).swap_adjacent(2);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn transcendental_tower_matches_symbolic() {
        let f = parse::<f64>("sin(x0)*exp(x1)").unwrap();
        let coords: Vec<Vec<f64>> = vec![
            vec![0.3, -0.2],
            vec![1.0, 0.5],
            vec![-0.7, 2.0],
            vec![0.1, 0.4],
        ];
        let t = TowerValue::new(2, 2, coords.clone()).unwrap();
        let via_ring = apply_map(&f, &t).unwrap();
        let symbolic = iterated_push(&f, 2);
        let flat: Vec<f64> = coords.iter().flatten().copied().collect();
        let via_symbolic = symbolic.eval(&flat).unwrap();
        for mask in 0..4 {
            assert!(
                (via_ring.coords()[mask][0] - via_symbolic[mask]).abs() < 1e-12,
                "mask {mask}"
            );
        }
    }
}
