//! Desk-scale weighted relational model: maps are finitely-supported
//! matrices indexed by finite multisets, and differentiation becomes
//! multiset combinatorics. Serves as an oracle that is combinatorially
//! independent of the symbolic and series pushforwards.
//!
//! Sums that would need unboundedly many terms are ruled out up front by
//! hard support bounds; exceeding one is an explicit error, never a
//! silent truncation.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::combinatorics::compositions;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WrelError {
    #[error("finitary bound exceeded: multiset of size {got} over the limit {limit}")]
    BoundExceeded { got: usize, limit: usize },
    #[error("domain/codomain mismatch: {0}")]
    SetMismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WrelConfig {
    /// Largest multiset size allowed to appear in any support.
    pub max_multiset_size: usize,
}

impl Default for WrelConfig {
    fn default() -> Self {
        WrelConfig {
            max_multiset_size: 12,
        }
    }
}

/// Finite multiset over an indexed label set, stored as a count vector.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multiset {
    counts: Vec<usize>,
}

impl Multiset {
    pub fn empty(width: usize) -> Self {
        Multiset {
            counts: vec![0; width],
        }
    }

    pub fn from_counts(counts: Vec<usize>) -> Self {
        Multiset { counts }
    }

    pub fn singleton(width: usize, index: usize) -> Self {
        let mut m = Multiset::empty(width);
        m.counts[index] = 1;
        m
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn width(&self) -> usize {
        self.counts.len()
    }

    pub fn size(&self) -> usize {
        self.counts.iter().sum()
    }

    /// `m! = ∏ m(a)!`.
    pub fn factorial(&self) -> BigUint {
        let mut acc = BigUint::one();
        for c in &self.counts {
            for i in 2..=*c {
                acc *= i;
            }
        }
        acc
    }

    pub fn add(&self, rhs: &Multiset) -> Multiset {
        Multiset {
            counts: self
                .counts
                .iter()
                .zip(&rhs.counts)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn checked_sub(&self, rhs: &Multiset) -> Option<Multiset> {
        let counts: Option<Vec<usize>> = self
            .counts
            .iter()
            .zip(&rhs.counts)
            .map(|(a, b)| a.checked_sub(*b))
            .collect();
        counts.map(|counts| Multiset { counts })
    }

    pub fn add_one(&self, index: usize) -> Multiset {
        let mut m = self.clone();
        m.counts[index] += 1;
        m
    }

    /// Every ordered way to write the multiset as a sum of `k` multisets,
    /// empty parts allowed.
    pub fn decompositions(&self, k: usize) -> Vec<Vec<Multiset>> {
        let mut out = vec![vec![Multiset::empty(self.width()); k]];
        for (index, count) in self.counts.iter().enumerate() {
            let mut next = Vec::new();
            for partial in &out {
                for split in distribute(*count, k) {
                    let mut parts = partial.clone();
                    for (p, add) in parts.iter_mut().zip(&split) {
                        p.counts[index] += add;
                    }
                    next.push(parts);
                }
            }
            out = next;
        }
        out
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > 0)
            .map(|(i, _)| i)
    }
}

impl std::fmt::Debug for Multiset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        let mut first = true;
        for (i, c) in self.counts.iter().enumerate() {
            for _ in 0..*c {
                if !first {
                    write!(f, ",")?;
                }
                write!(f, "{i}")?;
                first = false;
            }
        }
        write!(f, "]")
    }
}

/// All ways to write `count` as an ordered sum of `k` naturals.
fn distribute(count: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if count == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    let mut current = vec![0usize; k];
    fn rec(count: usize, slot: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slot + 1 == current.len() {
            current[slot] = count;
            out.push(current.clone());
            return;
        }
        for c in 0..=count {
            current[slot] = c;
            rec(count - c, slot + 1, current, out);
        }
    }
    rec(count, 0, &mut current, &mut out);
    out
}

fn big(u: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(u))
}

/// Finitely-supported matrix over multisets: a morphism of the coKleisli
/// category of weighted relations.
#[derive(Clone, PartialEq, Debug)]
pub struct WMatrix {
    domain: Vec<String>,
    codomain: Vec<String>,
    entries: BTreeMap<(Multiset, usize), BigRational>,
}

/// Labels for an `n`-fold indexed disjoint union; a 1-fold union is the
/// set itself.
pub fn union_labels(parts: &[&[String]]) -> Vec<String> {
    if parts.len() == 1 {
        return parts[0].to_vec();
    }
    parts
        .iter()
        .enumerate()
        .flat_map(|(i, p)| p.iter().map(move |l| format!("{i}.{l}")))
        .collect()
}

pub fn repeat_labels(labels: &[String], copies: usize) -> Vec<String> {
    let parts: Vec<&[String]> = (0..copies).map(|_| labels).collect();
    union_labels(&parts)
}

impl WMatrix {
    pub fn new(domain: Vec<String>, codomain: Vec<String>) -> Self {
        WMatrix {
            domain,
            codomain,
            entries: BTreeMap::new(),
        }
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn codomain(&self) -> &[String] {
        &self.codomain
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(Multiset, usize), &BigRational)> {
        self.entries.iter()
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    /// Largest multiset size in the support.
    pub fn max_support_degree(&self) -> usize {
        self.entries.keys().map(|(m, _)| m.size()).max().unwrap_or(0)
    }

    pub fn set(&mut self, m: Multiset, b: usize, value: BigRational) {
        assert_eq!(m.width(), self.domain.len(), "multiset width mismatch");
        assert!(b < self.codomain.len(), "codomain index out of range");
        assert!(!value.is_negative(), "weighted relations carry nonnegative weights");
        if value.is_zero() {
            self.entries.remove(&(m, b));
        } else {
            self.entries.insert((m, b), value);
        }
    }

    pub fn get(&self, m: &Multiset, b: usize) -> BigRational {
        self.entries
            .get(&(m.clone(), b))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    fn accumulate(&mut self, m: Multiset, b: usize, value: BigRational) {
        if value.is_zero() {
            return;
        }
        let key = (m, b);
        let entry = self
            .entries
            .entry(key.clone())
            .or_insert_with(BigRational::zero);
        *entry += value;
        if entry.is_zero() {
            self.entries.remove(&key);
        }
    }

    /// Identity: `id_{[a], a} = 1`.
    pub fn identity(labels: &[String]) -> Self {
        let mut m = WMatrix::new(labels.to_vec(), labels.to_vec());
        for i in 0..labels.len() {
            m.set(Multiset::singleton(labels.len(), i), i, BigRational::one());
        }
        m
    }

    pub fn add(&self, rhs: &WMatrix) -> WMatrix {
        assert_eq!(self.domain, rhs.domain);
        assert_eq!(self.codomain, rhs.codomain);
        let mut out = self.clone();
        for ((m, b), v) in &rhs.entries {
            out.accumulate(m.clone(), *b, v.clone());
        }
        out
    }

    pub fn scale(&self, r: &BigRational) -> WMatrix {
        assert!(!r.is_negative());
        let mut out = WMatrix::new(self.domain.clone(), self.codomain.clone());
        if r.is_zero() {
            return out;
        }
        for ((m, b), v) in &self.entries {
            out.entries.insert((m.clone(), *b), v * r);
        }
        out
    }

    /// Pairing into an indexed union codomain.
    pub fn pairing(parts: &[&WMatrix]) -> WMatrix {
        assert!(!parts.is_empty());
        let domain = parts[0].domain.clone();
        assert!(parts.iter().all(|p| p.domain == domain));
        let cods: Vec<&[String]> = parts.iter().map(|p| &p.codomain[..]).collect();
        let codomain = union_labels(&cods);
        let mut out = WMatrix::new(domain, codomain);
        let mut offset = 0;
        for part in parts {
            for ((m, b), v) in &part.entries {
                out.entries.insert((m.clone(), offset + b), v.clone());
            }
            offset += part.codomain.len();
        }
        out
    }

    /// Linear projection `π_slot` out of an indexed union domain built
    /// from `copies` copies of `labels`.
    pub fn proj(labels: &[String], copies: usize, slot: usize) -> WMatrix {
        assert!(slot < copies);
        let domain = repeat_labels(labels, copies);
        let width = domain.len();
        let mut out = WMatrix::new(domain, labels.to_vec());
        for a in 0..labels.len() {
            out.set(
                Multiset::singleton(width, slot * labels.len() + a),
                a,
                BigRational::one(),
            );
        }
        out
    }

    /// coKleisli composition:
    /// `(g∘f)_{m,c} = Σ_p g_{p,c} Σ_{m = Σ m_i} ∏ f_{m_i, b_i}` where the
    /// inner sum ranges over ordered decompositions aligned with an
    /// enumeration of `p`.
    pub fn compose(g: &WMatrix, f: &WMatrix, cfg: &WrelConfig) -> Result<WMatrix, WrelError> {
        if g.domain != f.codomain {
            return Err(WrelError::SetMismatch(format!(
                "compose: g expects {:?}, f yields {:?}",
                g.domain, f.codomain
            )));
        }
        check_bound(f, cfg)?;
        check_bound(g, cfg)?;
        let mut out = WMatrix::new(f.domain.clone(), g.codomain.clone());
        for ((p, c), gv) in &g.entries {
            // enumerate p with multiplicity
            let slots: Vec<usize> = p
                .counts()
                .iter()
                .enumerate()
                .flat_map(|(b, cnt)| std::iter::repeat(b).take(*cnt))
                .collect();
            let mut partial: Vec<(Multiset, BigRational)> =
                vec![(Multiset::empty(f.domain.len()), gv.clone())];
            for b in &slots {
                let mut next = Vec::new();
                for (m_acc, v_acc) in &partial {
                    for ((m_f, b_f), fv) in &f.entries {
                        if b_f != b {
                            continue;
                        }
                        let m_new = m_acc.add(m_f);
                        if m_new.size() > cfg.max_multiset_size {
                            return Err(WrelError::BoundExceeded {
                                got: m_new.size(),
                                limit: cfg.max_multiset_size,
                            });
                        }
                        next.push((m_new, v_acc * fv));
                    }
                }
                partial = next;
            }
            for (m, v) in partial {
                out.accumulate(m, *c, v);
            }
        }
        Ok(out)
    }

    /// Higher-order derivative matrix over the `(n+1)`-fold union:
    /// the entry at `(m, [a₁], …, [aₙ], b)` is
    /// `((m + [a₁…aₙ])! / m!) · f_{m + [a₁…aₙ], b}`; entries with a
    /// non-singleton derivative slot are zero.
    pub fn derivative(&self, n: usize, cfg: &WrelConfig) -> Result<WMatrix, WrelError> {
        check_bound(self, cfg)?;
        let a_len = self.domain.len();
        let domain = repeat_labels(&self.domain, n + 1);
        let mut out = WMatrix::new(domain.clone(), self.codomain.clone());
        let width = domain.len();
        for ((big_m, b), v) in &self.entries {
            // ordered tuples (a₁, …, aₙ) drawn from big_m
            let mut tuples: Vec<(Multiset, Vec<usize>)> =
                vec![(big_m.clone(), Vec::new())];
            for _ in 0..n {
                let mut next = Vec::new();
                for (remaining, picked) in &tuples {
                    for a in remaining.support().collect::<Vec<_>>() {
                        let rest = remaining
                            .checked_sub(&Multiset::singleton(a_len, a))
                            .unwrap();
                        let mut picked = picked.clone();
                        picked.push(a);
                        next.push((rest, picked));
                    }
                }
                tuples = next;
            }
            for (m_rem, picked) in tuples {
                let ratio = big(big_m.factorial()) / big(m_rem.factorial());
                // embed (m_rem, [a₁], …, [aₙ]) into the union
                let mut counts = vec![0usize; width];
                counts[..a_len].copy_from_slice(m_rem.counts());
                for (slot, a) in picked.iter().enumerate() {
                    counts[(slot + 1) * a_len + a] += 1;
                }
                out.accumulate(Multiset::from_counts(counts), *b, v * ratio);
            }
        }
        Ok(out)
    }

    /// Closed-form Taylor matrix: at `((m₀, …, mₙ), (i, b))` the entry is
    /// the multinomial `(Σm)! / ∏ m_k!` times `f_{Σm, b}` when
    /// `Σ_k k·|m_k| = i`, and zero otherwise.
    pub fn taylor(&self, n: usize, cfg: &WrelConfig) -> Result<WMatrix, WrelError> {
        check_bound(self, cfg)?;
        let a_len = self.domain.len();
        let domain = repeat_labels(&self.domain, n + 1);
        let codomain = repeat_labels(&self.codomain, n + 1);
        let width = domain.len();
        let mut out = WMatrix::new(domain, codomain);
        for ((big_m, b), v) in &self.entries {
            for parts in big_m.decompositions(n + 1) {
                let degree: usize = parts.iter().enumerate().map(|(k, m)| k * m.size()).sum();
                if degree > n {
                    continue;
                }
                let mut denom = BigUint::one();
                for m in &parts {
                    denom *= m.factorial();
                }
                let coeff = big(big_m.factorial()) / big(denom);
                let mut counts = vec![0usize; width];
                for (k, m) in parts.iter().enumerate() {
                    counts[k * a_len..(k + 1) * a_len].copy_from_slice(m.counts());
                }
                out.accumulate(
                    Multiset::from_counts(counts),
                    degree * self.codomain.len() + b,
                    v * coeff,
                );
            }
        }
        Ok(out)
    }

    /// Generic-route Taylor matrix: degree `i` block is
    /// `Σ_k Σ_{i₁+⋯+i_k=i} (1/k!) ∂̂^k f ∘ ⟨π₀, π_{i₁}, …, π_{i_k}⟩`,
    /// assembled from [`WMatrix::derivative`] and union projections.
    pub fn taylor_via_derivative(&self, n: usize, cfg: &WrelConfig) -> Result<WMatrix, WrelError> {
        let blocks: Vec<WMatrix> = (0..=n)
            .map(|i| self.taylor_block_via_derivative(i, n, cfg))
            .collect::<Result<_, _>>()?;
        let refs: Vec<&WMatrix> = blocks.iter().collect();
        Ok(WMatrix::pairing(&refs))
    }

    fn taylor_block_via_derivative(
        &self,
        degree: usize,
        n: usize,
        cfg: &WrelConfig,
    ) -> Result<WMatrix, WrelError> {
        let pi0 = WMatrix::proj(&self.domain, n + 1, 0);
        if degree == 0 {
            return WMatrix::compose(self, &pi0, cfg);
        }
        let mut acc = WMatrix::new(
            repeat_labels(&self.domain, n + 1),
            self.codomain.clone(),
        );
        for comp in compositions(degree as u64) {
            let k = comp.len();
            let deriv = self.derivative(k, cfg)?;
            let mut parts: Vec<WMatrix> = vec![pi0.clone()];
            for part in &comp {
                parts.push(WMatrix::proj(&self.domain, n + 1, *part as usize));
            }
            let refs: Vec<&WMatrix> = parts.iter().collect();
            let tuple = WMatrix::pairing(&refs);
            let term = WMatrix::compose(&deriv, &tuple, cfg)?;
            let mut kfact = BigUint::one();
            for i in 2..=k {
                kfact *= i;
            }
            acc = acc.add(&term.scale(&(BigRational::one() / big(kfact))));
        }
        Ok(acc)
    }

    /// The analytic identity
    /// `f ∘ (x + u) = f∘x + Σ_{k≥1} (1/k!) ∂̂^k f ∘ ⟨x, u, …, u⟩`,
    /// with the sum terminating because the derivative vanishes past the
    /// largest support size.
    pub fn check_analytic(
        f: &WMatrix,
        x: &WMatrix,
        u: &WMatrix,
        cfg: &WrelConfig,
    ) -> Result<bool, WrelError> {
        let lhs = WMatrix::compose(f, &x.add(u), cfg)?;
        let mut rhs = WMatrix::compose(f, x, cfg)?;
        let kmax = f.max_support_degree();
        let mut kfact = BigUint::one();
        for k in 1..=kmax {
            kfact *= k;
            let deriv = f.derivative(k, cfg)?;
            let mut parts: Vec<&WMatrix> = vec![x];
            for _ in 0..k {
                parts.push(u);
            }
            let tuple = WMatrix::pairing(&parts);
            let term = WMatrix::compose(&deriv, &tuple, cfg)?;
            rhs = rhs.add(&term.scale(&(BigRational::one() / big(kfact.clone()))));
        }
        Ok(lhs == rhs)
    }

    /// `T_n(g ∘ f) = T_n g ∘ T_n f` checked entrywise.
    pub fn functoriality_check(
        g: &WMatrix,
        f: &WMatrix,
        n: usize,
        cfg: &WrelConfig,
    ) -> Result<bool, WrelError> {
        let lhs = WMatrix::compose(g, f, cfg)?.taylor(n, cfg)?;
        let rhs = WMatrix::compose(&g.taylor(n, cfg)?, &f.taylor(n, cfg)?, cfg)?;
        Ok(lhs == rhs)
    }
}

fn check_bound(m: &WMatrix, cfg: &WrelConfig) -> Result<(), WrelError> {
    let got = m.max_support_degree();
    if got > cfg.max_multiset_size {
        return Err(WrelError::BoundExceeded {
            got,
            limit: cfg.max_multiset_size,
        });
    }
    Ok(())
}

/// One-element-set matrices are formal power series; these helpers
/// translate back and forth for the oracle tests.
pub fn series_to_matrix(coeffs: &[BigRational]) -> WMatrix {
    let star = vec!["*".to_string()];
    let mut m = WMatrix::new(star.clone(), star);
    for (k, c) in coeffs.iter().enumerate() {
        m.set(Multiset::from_counts(vec![k]), 0, c.clone());
    }
    m
}

pub fn matrix_to_series(m: &WMatrix) -> Vec<BigRational> {
    assert_eq!(m.domain().len(), 1);
    assert_eq!(m.codomain().len(), 1);
    let degree = m.max_support_degree();
    (0..=degree)
        .map(|k| m.get(&Multiset::from_counts(vec![k]), 0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn cfg() -> WrelConfig {
        WrelConfig::default()
    }

    fn series(vals: &[i64]) -> WMatrix {
        series_to_matrix(&vals.iter().map(|v| rat(*v, 1)).collect::<Vec<_>>())
    }

    /// Plain polynomial composition, the independent oracle.
    fn compose_poly(g: &[i64], f: &[i64]) -> Vec<BigRational> {
        let mut acc = vec![BigRational::zero(); 1 + (g.len() - 1) * (f.len().max(1) - 1) + 1];
        let mut fpow = vec![BigRational::one()];
        for (j, gj) in g.iter().enumerate() {
            if j > 0 {
                let mut next = vec![BigRational::zero(); fpow.len() + f.len() - 1];
                for (a, va) in fpow.iter().enumerate() {
                    for (b, vb) in f.iter().enumerate() {
                        next[a + b] += va * rat(*vb, 1);
                    }
                }
                fpow = next;
            }
            for (k, v) in fpow.iter().enumerate() {
                acc[k] += rat(*gj, 1) * v;
            }
        }
        while acc.len() > 1 && acc.last().unwrap().is_zero() {
            acc.pop();
        }
        acc
    }

    #[test]
    fn identity_composition() {
        let f = series(&[1, 2, 3]);
        let id = WMatrix::identity(f.domain());
        assert_eq!(WMatrix::compose(&id, &f, &cfg()).unwrap(), f);
        assert_eq!(WMatrix::compose(&f, &id, &cfg()).unwrap(), f);
    }

    #[test]
    fn power_series_composition() {
        // x² ∘ x³ = x⁶
        let f = series(&[0, 0, 0, 1]);
        let g = series(&[0, 0, 1]);
        let gf = WMatrix::compose(&g, &f, &cfg()).unwrap();
        let got = matrix_to_series(&gf);
        let mut expected = vec![BigRational::zero(); 7];
        expected[6] = BigRational::one();
        assert_eq!(got, expected);

        // general case against the polynomial oracle
        let f = [2, 1, 3];
        let g = [1, 0, 2, 1];
        let gf = WMatrix::compose(&series(&g), &series(&f), &cfg()).unwrap();
        assert_eq!(matrix_to_series(&gf), compose_poly(&g, &f));
    }

    #[test]
    fn empty_support_composes_to_zero() {
        let f = WMatrix::new(vec!["*".into()], vec!["*".into()]);
        let g = series(&[0, 1, 1]);
        let gf = WMatrix::compose(&g, &f, &cfg()).unwrap();
        // g₀ survives (the empty multiset needs no calls), higher terms die
        assert_eq!(matrix_to_series(&gf), vec![BigRational::zero()]);
    }

    #[test]
    fn derivative_power_series() {
        // coefficients c_k pick up the factor (k+1)
        let f = series(&[5, 7, 11, 13]);
        let d = f.derivative(1, &cfg()).unwrap();
        // ∂f at (k·[*], [*]) = (k+1)·c_{k+1}
        for k in 0..3usize {
            let m = Multiset::from_counts(vec![k, 1]);
            let expected = rat((k as i64 + 1) * [7, 11, 13][k], 1);
            assert_eq!(d.get(&m, 0), expected);
        }
        // n = 0 is the matrix itself
        assert_eq!(f.derivative(0, &cfg()).unwrap(), f);
    }

    #[test]
    fn derivative_slots_are_singletons() {
        let f = series(&[1, 1, 1]);
        let d = f.derivative(1, &cfg()).unwrap();
        for ((m, _), _) in d.entries() {
            let slot1: usize = m.counts()[1..].iter().sum();
            assert_eq!(slot1, 1);
        }
    }

    #[test]
    fn taylor_closed_form_examples() {
        let f = series(&[3, 5, 7]);
        let t = f.taylor(2, &cfg()).unwrap();
        // m₀ = [], m₁ = [*], m₂ = []: degree 1, coefficient 1!/1! · f₁ = 5
        let m = Multiset::from_counts(vec![0, 1, 0]);
        assert_eq!(t.get(&m, 1), rat(5, 1));
        // degree condition violated: same multiset at degree 2 is zero
        assert_eq!(t.get(&m, 2), BigRational::zero());
        // pure base point at degree 0
        let m0 = Multiset::from_counts(vec![2, 0, 0]);
        assert_eq!(t.get(&m0, 0), rat(7, 1));
    }

    #[test]
    fn taylor_generic_route_agrees() {
        let f = series(&[1, 2, 0, 3]);
        for n in 0..=3usize {
            assert_eq!(
                f.taylor(n, &cfg()).unwrap(),
                f.taylor_via_derivative(n, &cfg()).unwrap(),
                "n = {n}"
            );
        }
    }

    #[test]
    fn analytic_identity_binomial() {
        // f = z², x and u scalar weights: (x+u)² = x² + 2xu + u²
        let f = series(&[0, 0, 1]);
        let x = series(&[3]);
        let u = series(&[2]);
        assert!(WMatrix::check_analytic(&f, &x, &u, &cfg()).unwrap());
        // u = 0 reduces both sides to f∘x
        let zero = WMatrix::new(vec!["*".into()], vec!["*".into()]);
        assert!(WMatrix::check_analytic(&f, &x, &zero, &cfg()).unwrap());
    }

    #[test]
    fn functoriality_power_series() {
        let f = series(&[1, 2]);
        let g = series(&[0, 1, 1]);
        for n in 0..=2usize {
            assert!(WMatrix::functoriality_check(&g, &f, n, &cfg()).unwrap());
        }
        let id = WMatrix::identity(f.domain());
        assert!(WMatrix::functoriality_check(&id, &f, 2, &cfg()).unwrap());
        let zero = WMatrix::new(vec!["*".into()], vec!["*".into()]);
        assert!(WMatrix::functoriality_check(&zero, &f, 2, &cfg()).unwrap());
    }

    #[test]
    fn bound_is_enforced() {
        let f = series(&[1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]);
        let err = f.taylor(1, &cfg()).unwrap_err();
        assert!(matches!(err, WrelError::BoundExceeded { .. }));
    }

    #[test]
    fn two_element_set_chain_rule() {
        // ∂(g∘f) = ∂g ∘ ⟨f∘π₀, ∂f⟩ on a 2-element domain instance
        let a: Vec<String> = vec!["p".into(), "q".into()];
        let mut f = WMatrix::new(a.clone(), a.clone());
        f.set(Multiset::from_counts(vec![1, 1]), 0, rat(2, 1));
        f.set(Multiset::from_counts(vec![0, 1]), 1, rat(1, 1));
        f.set(Multiset::from_counts(vec![2, 0]), 1, rat(3, 1));
        let mut g = WMatrix::new(a.clone(), a.clone());
        g.set(Multiset::from_counts(vec![1, 0]), 0, rat(1, 1));
        g.set(Multiset::from_counts(vec![1, 1]), 1, rat(5, 1));

        let c = cfg();
        let lhs = WMatrix::compose(&g, &f, &c).unwrap().derivative(1, &c).unwrap();

        let pi0 = WMatrix::proj(&a, 2, 0);
        let f_pi0 = WMatrix::compose(&f, &pi0, &c).unwrap();
        let df = f.derivative(1, &c).unwrap();
        let tuple = WMatrix::pairing(&[&f_pi0, &df]);
        let rhs = WMatrix::compose(&g.derivative(1, &c).unwrap(), &tuple, &c).unwrap();
        assert_eq!(lhs, rhs);
    }
}
