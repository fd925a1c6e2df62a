//! Truncated power series `R[ε]/ε^(n+1)` with the standard derivative
//! recurrences for the elementary functions. Evaluating an expression in
//! this ring is the operational jet pushforward.

use crate::expr::{EvalError, EvalRing};
use crate::scalar::{Scalar, ScalarError};

#[derive(Clone, PartialEq, Debug)]
pub struct SeriesElem<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> SeriesElem<S> {
    pub fn new(coeffs: Vec<S>) -> Self {
        assert!(!coeffs.is_empty());
        SeriesElem { coeffs }
    }

    pub fn constant(order: usize, c: &S) -> Self {
        let mut coeffs = vec![S::zero(); order + 1];
        coeffs[0] = c.clone();
        SeriesElem { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Pads a lower-order element (a constant that never met a variable)
    /// up to `order`.
    pub fn widen(&self, order: usize) -> SeriesElem<S> {
        assert!(self.order() == 0 || self.order() == order);
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, S::zero());
        SeriesElem { coeffs }
    }
}

fn align<S: Scalar>(a: &SeriesElem<S>, b: &SeriesElem<S>) -> (SeriesElem<S>, SeriesElem<S>) {
    if a.order() == b.order() {
        return (a.clone(), b.clone());
    }
    // constants enter at order 0 and are widened on demand
    if a.order() == 0 {
        (a.widen(b.order()), b.clone())
    } else if b.order() == 0 {
        (a.clone(), b.widen(a.order()))
    } else {
        panic!("series order mismatch: {} vs {}", a.order(), b.order());
    }
}

impl<S: Scalar> EvalRing<S> for SeriesElem<S> {
    fn from_scalar(c: &S) -> Self {
        SeriesElem::constant(0, c)
    }

    fn ring_add(&self, rhs: &Self) -> Self {
        let (a, b) = align(self, rhs);
        SeriesElem::new(
            a.coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| x.add(y))
                .collect(),
        )
    }

    fn ring_sub(&self, rhs: &Self) -> Self {
        self.ring_add(&rhs.ring_neg())
    }

    fn ring_neg(&self) -> Self {
        SeriesElem::new(self.coeffs.iter().map(|c| c.neg()).collect())
    }

    /// Truncated Cauchy product.
    fn ring_mul(&self, rhs: &Self) -> Self {
        let (a, b) = align(self, rhs);
        let n = a.order();
        let mut coeffs = vec![S::zero(); n + 1];
        for i in 0..=n {
            if a.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(n - i) {
                coeffs[i + j] = coeffs[i + j].add(&a.coeffs[i].mul(&b.coeffs[j]));
            }
        }
        SeriesElem::new(coeffs)
    }

    fn ring_div(&self, rhs: &Self) -> Result<Self, EvalError> {
        let (a, b) = align(self, rhs);
        let n = a.order();
        if S::EXACT && b.coeffs[0].is_zero() {
            return Err(EvalError::Scalar(ScalarError::DivisionByZero));
        }
        let mut coeffs = vec![S::zero(); n + 1];
        for k in 0..=n {
            let mut acc = a.coeffs[k].clone();
            for j in 0..k {
                acc = acc.sub(&coeffs[j].mul(&b.coeffs[k - j]));
            }
            coeffs[k] = acc.div(&b.coeffs[0])?;
        }
        Ok(SeriesElem::new(coeffs))
    }

    fn ring_exp(&self) -> Result<Self, EvalError> {
        let n = self.order();
        let mut coeffs = vec![S::zero(); n + 1];
        coeffs[0] = self.coeffs[0].exp()?;
        for k in 1..=n {
            // b_k = (1/k) Σ_{j=1..k} j · a_j · b_{k-j}
            let mut acc = S::zero();
            for j in 1..=k {
                let term = S::from_int(j as i64)
                    .mul(&self.coeffs[j])
                    .mul(&coeffs[k - j]);
                acc = acc.add(&term);
            }
            coeffs[k] = acc.mul(&S::inv_int(k as u64)?);
        }
        Ok(SeriesElem::new(coeffs))
    }

    fn ring_sin(&self) -> Result<Self, EvalError> {
        Ok(self.sin_cos()?.0)
    }

    fn ring_cos(&self) -> Result<Self, EvalError> {
        Ok(self.sin_cos()?.1)
    }

    fn ring_ln(&self) -> Result<Self, EvalError> {
        let n = self.order();
        let a0 = &self.coeffs[0];
        if S::EXACT && a0.is_zero() {
            return Err(EvalError::Scalar(ScalarError::DivisionByZero));
        }
        let mut coeffs = vec![S::zero(); n + 1];
        coeffs[0] = a0.ln()?;
        for k in 1..=n {
            // k·a₀·b_k = k·a_k − Σ_{m=1..k-1} m · b_m · a_{k-m}
            let mut acc = S::from_int(k as i64).mul(&self.coeffs[k]);
            for m in 1..k {
                acc = acc.sub(&S::from_int(m as i64).mul(&coeffs[m]).mul(&self.coeffs[k - m]));
            }
            coeffs[k] = acc.mul(&S::inv_int(k as u64)?).div(a0)?;
        }
        Ok(SeriesElem::new(coeffs))
    }
}

impl<S: Scalar> SeriesElem<S> {
    fn sin_cos(&self) -> Result<(SeriesElem<S>, SeriesElem<S>), EvalError> {
        let n = self.order();
        let mut s = vec![S::zero(); n + 1];
        let mut c = vec![S::zero(); n + 1];
        s[0] = self.coeffs[0].sin()?;
        c[0] = self.coeffs[0].cos()?;
        for k in 1..=n {
            let mut sa = S::zero();
            let mut ca = S::zero();
            for j in 1..=k {
                let factor = S::from_int(j as i64).mul(&self.coeffs[j]);
                sa = sa.add(&factor.mul(&c[k - j]));
                ca = ca.sub(&factor.mul(&s[k - j]));
            }
            let inv = S::inv_int(k as u64)?;
            s[k] = sa.mul(&inv);
            c[k] = ca.mul(&inv);
        }
        Ok((SeriesElem::new(s), SeriesElem::new(c)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num_rational::BigRational;

    type Q = BigRational;

    fn series(vals: &[(i64, i64)]) -> SeriesElem<Q> {
        SeriesElem::new(vals.iter().map(|(p, q)| rat(*p, *q)).collect())
    }

    #[test]
    fn cauchy_product() {
        // (1 + ε + 2ε²)² = 1 + 2ε + 5ε² (mod ε³)
        let a = series(&[(1, 1), (1, 1), (2, 1)]);
        let sq = a.ring_mul(&a);
        assert_eq!(sq, series(&[(1, 1), (2, 1), (5, 1)]));
    }

    #[test]
    fn division_roundtrip() {
        let a = series(&[(3, 1), (-2, 1), (1, 2), (7, 1)]);
        let b = series(&[(2, 1), (5, 1), (-1, 3), (0, 1)]);
        let q = a.ring_div(&b).unwrap();
        assert_eq!(q.ring_mul(&b), a);
        let zero_lead = series(&[(0, 1), (1, 1), (0, 1), (0, 1)]);
        assert!(a.ring_div(&zero_lead).is_err());
    }

    #[test]
    fn exp_coefficients() {
        // exp(ε) = Σ ε^k / k!
        let x = SeriesElem::new(vec![0.0, 1.0, 0.0, 0.0, 0.0]);
        let e = x.ring_exp().unwrap();
        let expected = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];
        for (got, want) in e.coeffs().iter().zip(expected) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn sin_ln_consistency() {
        // d/dε ln(1+ε) = 1/(1+ε): check ln coefficients directly
        let x = SeriesElem::new(vec![1.0, 1.0, 0.0, 0.0]);
        let l = x.ring_ln().unwrap();
        let expected = [0.0, 1.0, -0.5, 1.0 / 3.0];
        for (got, want) in l.coeffs().iter().zip(expected) {
            assert!((got - want).abs() < 1e-15);
        }
        let s = SeriesElem::new(vec![0.0, 1.0, 0.0, 0.0]).ring_sin().unwrap();
        let expected = [0.0, 1.0, 0.0, -1.0 / 6.0];
        for (got, want) in s.coeffs().iter().zip(expected) {
            assert!((got - want).abs() < 1e-15);
        }
    }
}
