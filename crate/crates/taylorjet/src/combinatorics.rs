//! Binary words, set partitions, compositions and multinomial coefficients.
//!
//! Words index the coordinates of iterated tangent towers; partitions and
//! compositions drive the higher-order chain rule and the jet pushforward
//! sums.

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CombinatoricsError {
    #[error("parts sum to {sum}, expected {expected}")]
    PartsSumMismatch { sum: u64, expected: u64 },
    #[error("word length {0} exceeds the supported maximum of {MAX_WORD_LEN}")]
    WordTooLong(usize),
}

/// Longest supported word. Towers are capped well below this; the limit
/// only guards the `u64` factorial arithmetic.
pub const MAX_WORD_LEN: usize = 20;

/// Binary word `w ∈ {0,1}^n`. Bit `i` of the mask stores position `i + 1`
/// (positions are 1-based). Position `n` belongs to the outermost tangent
/// layer.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Word {
    len: usize,
    mask: u64,
}

impl Word {
    pub fn new(len: usize, mask: u64) -> Self {
        assert!(len <= MAX_WORD_LEN, "word length {len} exceeds {MAX_WORD_LEN}");
        assert!(len == 64 || mask < (1u64 << len), "mask has bits beyond the word length");
        Word { len, mask }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut mask = 0u64;
        for (i, b) in bits.iter().enumerate() {
            if *b != 0 {
                mask |= 1 << i;
            }
        }
        Word::new(bits.len(), mask)
    }

    /// Parses `"0110"` with position 1 written first.
    pub fn parse(text: &str) -> Self {
        let bits: Vec<u8> = text
            .chars()
            .map(|c| match c {
                '0' => 0,
                '1' => 1,
                _ => panic!("invalid word character {c:?}"),
            })
            .collect();
        Word::from_bits(&bits)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn bit(&self, position: usize) -> bool {
        debug_assert!((1..=self.len).contains(&position));
        self.mask >> (position - 1) & 1 == 1
    }

    /// Number of 1 bits.
    pub fn weight(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// Product of the 1-based positions of the set bits; 1 for the empty set.
    pub fn position_factorial(&self) -> u64 {
        let mut product = 1u64;
        for position in 1..=self.len {
            if self.bit(position) {
                product *= position as u64;
            }
        }
        product
    }

    /// All ordered pairs of disjoint words whose union is `self`, empty
    /// parts included: `2^weight` pairs in lexicographic order of the
    /// first component's bit sequence.
    pub fn splits2(&self) -> Vec<(Word, Word)> {
        let mut pairs = Vec::with_capacity(1 << self.weight());
        let mut sub = 0u64;
        loop {
            pairs.push((Word::new(self.len, sub), Word::new(self.len, self.mask & !sub)));
            if sub == self.mask {
                break;
            }
            sub = (sub.wrapping_sub(self.mask)) & self.mask;
        }
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        pairs
    }

    pub fn concat(&self, rhs: &Word) -> Word {
        Word::new(self.len + rhs.len, self.mask | (rhs.mask << self.len))
    }

    /// Splits into (first `n` positions, remaining positions).
    pub fn split_at(&self, n: usize) -> (Word, Word) {
        assert!(n <= self.len);
        let low = self.mask & ((1u64 << n) - 1);
        (Word::new(n, low), Word::new(self.len - n, self.mask >> n))
    }

    pub fn zero(len: usize) -> Word {
        Word::new(len, 0)
    }

    pub fn ones(len: usize) -> Word {
        Word::new(len, if len == 0 { 0 } else { (1u64 << len) - 1 })
    }
}

impl std::fmt::Debug for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for position in 1..=self.len {
            write!(f, "{}", if self.bit(position) { 1 } else { 0 })?;
        }
        if self.len == 0 {
            write!(f, "ε")?;
        }
        Ok(())
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

impl Ord for Word {
    /// Lexicographic on the bit sequence, position 1 first.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let n = self.len.max(other.len);
        for position in 1..=n {
            let a = position <= self.len && self.bit(position);
            let b = position <= other.len && other.bit(position);
            match a.cmp(&b) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// All ordered tuples of nonempty pairwise-disjoint sets covering `items`,
/// any length; the empty set yields one empty tuple. Tuples are emitted by
/// increasing block count.
pub fn ordered_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let n = items.len();
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for k in 1..=n {
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); k];
        assign_ordered(items, 0, k, &mut blocks, &mut out);
    }
    out
}

fn assign_ordered(
    items: &[usize],
    index: usize,
    k: usize,
    blocks: &mut Vec<Vec<usize>>,
    out: &mut Vec<Vec<Vec<usize>>>,
) {
    let remaining = items.len() - index;
    let empty = blocks.iter().filter(|b| b.is_empty()).count();
    if empty > remaining {
        return;
    }
    if index == items.len() {
        out.push(blocks.clone());
        return;
    }
    for b in 0..k {
        blocks[b].push(items[index]);
        assign_ordered(items, index + 1, k, blocks, out);
        blocks[b].pop();
    }
}

/// All partitions of `items` into nonempty blocks; `Bell(n)` families.
/// Blocks are canonical: each block is sorted and blocks are ordered by
/// their least element.
pub fn unordered_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    assign_unordered(items, 0, &mut blocks, &mut out);
    out
}

fn assign_unordered(
    items: &[usize],
    index: usize,
    blocks: &mut Vec<Vec<usize>>,
    out: &mut Vec<Vec<Vec<usize>>>,
) {
    if index == items.len() {
        out.push(blocks.clone());
        return;
    }
    for b in 0..blocks.len() {
        blocks[b].push(items[index]);
        assign_unordered(items, index + 1, blocks, out);
        blocks[b].pop();
    }
    blocks.push(vec![items[index]]);
    assign_unordered(items, index + 1, blocks, out);
    blocks.pop();
}

/// All `2^(n-1)` ordered tuples of positive integers summing to `n`,
/// emitted by increasing length and lexicographically within a length.
/// `n = 0` yields the empty sequence.
pub fn compositions(n: u64) -> Vec<Vec<u64>> {
    if n == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for k in 1..=n {
        let mut parts = Vec::with_capacity(k as usize);
        compositions_rec(n, k, &mut parts, &mut out);
    }
    out
}

fn compositions_rec(remaining: u64, slots: u64, parts: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if slots == 1 {
        if remaining >= 1 {
            parts.push(remaining);
            out.push(parts.clone());
            parts.pop();
        }
        return;
    }
    for first in 1..=remaining.saturating_sub(slots - 1) {
        parts.push(first);
        compositions_rec(remaining - first, slots - 1, parts, out);
        parts.pop();
    }
}

pub fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

/// `n! / (parts_1! ⋯ parts_k!)`, requiring the parts to sum to `n`.
pub fn multinomial(n: u64, parts: &[u64]) -> Result<BigUint, CombinatoricsError> {
    let sum: u64 = parts.iter().sum();
    if sum != n {
        return Err(CombinatoricsError::PartsSumMismatch { sum, expected: n });
    }
    let mut num = factorial(n);
    for p in parts {
        num /= factorial(*p);
    }
    Ok(num)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_examples() {
        assert_eq!(Word::parse("0110").weight(), 2);
        assert_eq!(Word::parse("0000").weight(), 0);
        assert_eq!(Word::parse("111").weight(), 3);
    }

    #[test]
    fn position_factorial_examples() {
        assert_eq!(Word::parse("110").position_factorial(), 2);
        assert_eq!(Word::parse("011").position_factorial(), 6);
        assert_eq!(Word::parse("000").position_factorial(), 1);
        assert_eq!(Word::new(0, 0).position_factorial(), 1);
    }

    #[test]
    fn splits2_examples() {
        let pairs = Word::parse("00").splits2();
        assert_eq!(pairs, vec![(Word::parse("00"), Word::parse("00"))]);

        let pairs = Word::parse("10").splits2();
        assert_eq!(
            pairs,
            vec![
                (Word::parse("00"), Word::parse("10")),
                (Word::parse("10"), Word::parse("00")),
            ]
        );

        let pairs = Word::parse("11").splits2();
        assert_eq!(
            pairs,
            vec![
                (Word::parse("00"), Word::parse("11")),
                (Word::parse("01"), Word::parse("10")),
                (Word::parse("10"), Word::parse("01")),
                (Word::parse("11"), Word::parse("00")),
            ]
        );
    }

    #[test]
    fn splits2_invariants() {
        for mask in 0..(1u64 << 5) {
            let w = Word::new(5, mask);
            let pairs = w.splits2();
            assert_eq!(pairs.len(), 1 << w.weight());
            for (a, b) in &pairs {
                assert_eq!(a.mask() & b.mask(), 0);
                assert_eq!(a.mask() | b.mask(), mask);
            }
        }
    }

    #[test]
    fn ordered_partition_examples() {
        let parts = ordered_partitions(&[1, 2]);
        assert_eq!(
            parts,
            vec![
                vec![vec![1, 2]],
                vec![vec![1], vec![2]],
                vec![vec![2], vec![1]],
            ]
        );
        assert_eq!(ordered_partitions(&[1]).len(), 1);
        assert_eq!(ordered_partitions(&[1, 2, 3]).len(), 13);
        assert_eq!(ordered_partitions(&[]).len(), 1);
    }

    #[test]
    fn unordered_partition_examples() {
        assert_eq!(unordered_partitions(&[1, 2]).len(), 2);
        assert_eq!(unordered_partitions(&[1, 2, 3]).len(), 5);
        assert_eq!(unordered_partitions(&[]).len(), 1);
    }

    #[test]
    fn bell_numbers() {
        let bell = [1usize, 1, 2, 5, 15, 52, 203, 877, 4140];
        for (n, expected) in bell.iter().enumerate() {
            let items: Vec<usize> = (1..=n).collect();
            assert_eq!(unordered_partitions(&items).len(), *expected, "Bell({n})");
        }
    }

    #[test]
    fn ordered_vs_unordered_multiplicity() {
        // Each unordered partition with k blocks appears k! times ordered.
        for n in 0..=6 {
            let items: Vec<usize> = (1..=n).collect();
            let ordered = ordered_partitions(&items);
            let unordered = unordered_partitions(&items);
            let expected: usize = unordered
                .iter()
                .map(|fam| (1..=fam.len()).product::<usize>())
                .sum::<usize>()
                .max(1);
            assert_eq!(ordered.len(), expected);
        }
    }

    #[test]
    fn composition_examples() {
        assert_eq!(compositions(1), vec![vec![1]]);
        assert_eq!(compositions(2), vec![vec![2], vec![1, 1]]);
        assert_eq!(
            compositions(3),
            vec![vec![3], vec![1, 2], vec![2, 1], vec![1, 1, 1]]
        );
        assert!(compositions(0).is_empty());
        for n in 1..=8u64 {
            assert_eq!(compositions(n).len(), 1 << (n - 1));
        }
    }

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial(3, &[1, 2]).unwrap(), BigUint::from(3u32));
        assert_eq!(multinomial(7, &[7]).unwrap(), BigUint::from(1u32));
        assert_eq!(multinomial(4, &[2, 2]).unwrap(), BigUint::from(6u32));
        assert!(multinomial(4, &[1, 2]).is_err());
    }

    #[test]
    fn multinomial_counts_ordered_partitions_by_shape() {
        // Block-size census of ordered partitions matches the multinomial.
        for n in 1..=7usize {
            let items: Vec<usize> = (1..=n).collect();
            let all = ordered_partitions(&items);
            for comp in compositions(n as u64) {
                let count = all
                    .iter()
                    .filter(|blocks| {
                        blocks.len() == comp.len()
                            && blocks.iter().zip(&comp).all(|(b, c)| b.len() as u64 == *c)
                    })
                    .count();
                assert_eq!(
                    BigUint::from(count),
                    multinomial(n as u64, &comp).unwrap(),
                    "n={n} comp={comp:?}"
                );
            }
        }
    }

    #[test]
    fn word_order_is_lexicographic() {
        let mut words: Vec<Word> = (0..4u64).map(|m| Word::new(2, m)).collect();
        words.sort();
        let shown: Vec<String> = words.iter().map(|w| w.to_string()).collect();
        assert_eq!(shown, vec!["00", "01", "10", "11"]);
    }

    #[test]
    fn concat_and_split_roundtrip() {
        let u = Word::parse("101");
        let v = Word::parse("01");
        let w = u.concat(&v);
        assert_eq!(w.to_string(), "10101");
        let (a, b) = w.split_at(3);
        assert_eq!(a, u);
        assert_eq!(b, v);
    }
}
