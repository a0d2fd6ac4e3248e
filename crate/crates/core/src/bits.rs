//! Finite binary strings, the length-lexicographic bijection with the
//! naturals, Cantor pairing over that bijection, and δ-simple sets.
//!
//! Strings are ordered shortlex: shorter strings first, equal lengths
//! compared bit by bit. That order coincides with the order of their
//! indices, so `a < b` iff `index_of(a) < index_of(b)`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::{One, ToPrimitive, Zero};
use smallvec::SmallVec;

/// Token used for the empty string in text files and on the command line.
pub const EMPTY_TOKEN: &str = "^";

/// A finite binary string. Bits are packed MSB-first into 64-bit words and
/// the unused tail of the last word is always zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    len: u32,
    words: SmallVec<[u64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseBitStringError {
    #[error("empty literal; use `^` for the empty string")]
    Empty,
    #[error("invalid character {0:?} in bit string literal")]
    InvalidChar(char),
}

#[inline]
fn tail_mask(n: u32) -> u64 {
    // top `n` bits set, 1 <= n <= 64
    if n >= 64 {
        !0
    } else {
        !(!0u64 >> n)
    }
}

impl BitString {
    /// The empty string Λ.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        if i >= self.len() {
            return None;
        }
        Some(self.words[i / 64] >> (63 - i % 64) & 1 == 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |i| self.words[i / 64] >> (63 - i % 64) & 1 == 1)
    }

    pub fn push(&mut self, bit: bool) {
        self.push_chunk(if bit { 1 << 63 } else { 0 }, 1);
    }

    /// Appends the top `n` bits of `chunk`.
    fn push_chunk(&mut self, chunk: u64, n: u32) {
        if n == 0 {
            return;
        }
        let chunk = chunk & tail_mask(n);
        let offset = self.len % 64;
        if offset == 0 {
            self.words.push(chunk);
        } else {
            *self.words.last_mut().unwrap() |= chunk >> offset;
            if offset + n > 64 {
                self.words.push(chunk << (64 - offset));
            }
        }
        self.len += n;
    }

    pub fn pop(&mut self) -> Option<bool> {
        if self.len == 0 {
            return None;
        }
        let i = self.len() - 1;
        let bit = self.get(i).unwrap();
        let word = &mut self.words[i / 64];
        *word &= !(1u64 << (63 - i % 64));
        self.len -= 1;
        if self.len % 64 == 0 {
            self.words.pop();
        }
        Some(bit)
    }

    pub fn extend_from(&mut self, other: &BitString) {
        let mut remaining = other.len;
        for &w in other.words.iter() {
            let n = remaining.min(64);
            self.push_chunk(w, n);
            remaining -= n;
        }
    }

    /// Appends a copy of the string to itself.
    pub fn double(&mut self) {
        let copy = self.clone();
        self.extend_from(&copy);
    }

    /// Complements every bit.
    pub fn flip(&mut self) {
        for w in self.words.iter_mut() {
            *w = !*w;
        }
        let rem = self.len % 64;
        if rem != 0 {
            *self.words.last_mut().unwrap() &= tail_mask(rem);
        }
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    pub fn starts_with(&self, prefix: &BitString) -> bool {
        if prefix.len > self.len {
            return false;
        }
        let full = prefix.len() / 64;
        if self.words[..full] != prefix.words[..full] {
            return false;
        }
        let rem = prefix.len % 64;
        rem == 0 || (self.words[full] & tail_mask(rem)) == prefix.words[full]
    }

    /// The string of length `len` whose bits are the low `len` bits of
    /// `value`, most significant first.
    pub fn from_uint(value: u128, len: usize) -> BitString {
        assert!(len <= 128, "from_uint supports at most 128 bits");
        let mut out = BitString::empty();
        let mut left = len as u32;
        while left > 0 {
            let n = left.min(64);
            let chunk = (value >> (left - n)) as u64;
            out.push_chunk(chunk << (64 - n), n);
            left -= n;
        }
        out
    }

    /// The bits read as an unsigned binary number, if it fits in 128 bits.
    pub fn to_uint(&self) -> Option<u128> {
        if self.len > 128 {
            return None;
        }
        Some(self.iter().fold(0u128, |acc, b| acc << 1 | b as u128))
    }

    fn to_biguint(&self) -> BigUint {
        let mut value = BigUint::zero();
        for &w in self.words.iter() {
            value = (value << 64u32) | BigUint::from(w);
        }
        let pad = self.words.len() as u64 * 64 - self.len as u64;
        value >> pad
    }

    fn from_biguint(value: &BigUint, len: usize) -> BitString {
        let mut out = BitString::empty();
        for i in (0..len as u64).rev() {
            out.push(value.bit(i));
        }
        out
    }

    /// Position in the enumeration Λ, 0, 1, 00, ... when it fits in 128 bits.
    pub fn index_u128(&self) -> Option<u128> {
        if self.len >= 127 {
            return None;
        }
        Some((1u128 << self.len) - 1 + self.to_uint()?)
    }

    pub fn from_index_u128(n: u128) -> BitString {
        let m = n + 1;
        let len = 127 - m.leading_zeros() as usize;
        BitString::from_uint(m - (1u128 << len), len)
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.words.as_slice().cmp(other.words.as_slice()))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str(EMPTY_TOKEN);
        }
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = ParseBitStringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == EMPTY_TOKEN {
            return Ok(BitString::empty());
        }
        if s.is_empty() {
            return Err(ParseBitStringError::Empty);
        }
        let mut out = BitString::empty();
        for c in s.chars() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                other => return Err(ParseBitStringError::InvalidChar(other)),
            }
        }
        Ok(out)
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut out = BitString::empty();
        for b in iter {
            out.push(b);
        }
        out
    }
}

/// Parses a literal, panicking on malformed input. Test and example helper.
pub fn bs(s: &str) -> BitString {
    s.parse().expect("valid bit string literal")
}

/// A natural number in bijection with [`BitString`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StringIndex(pub BigUint);

impl StringIndex {
    pub fn to_u128(&self) -> Option<u128> {
        self.0.to_u128()
    }
}

impl From<u64> for StringIndex {
    fn from(n: u64) -> Self {
        StringIndex(BigUint::from(n))
    }
}

impl From<u128> for StringIndex {
    fn from(n: u128) -> Self {
        StringIndex(BigUint::from(n))
    }
}

pub fn index_of(x: &BitString) -> StringIndex {
    match x.index_u128() {
        Some(n) => StringIndex::from(n),
        None => StringIndex((BigUint::one() << x.len()) - 1u32 + x.to_biguint()),
    }
}

pub fn string_of(n: &StringIndex) -> BitString {
    if let Some(small) = n.to_u128() {
        if small < u128::MAX {
            return BitString::from_index_u128(small);
        }
    }
    let m = &n.0 + 1u32;
    let len = m.bits() - 1;
    let value = m - (BigUint::one() << len);
    BitString::from_biguint(&value, len as usize)
}

pub fn cantor(a: u128, b: u128) -> u128 {
    let w = a + b;
    w * (w + 1) / 2 + b
}

pub fn cantor_inverse(z: u128) -> (u128, u128) {
    assert!(z < 1u128 << 124, "cantor_inverse: argument too large for u128 path");
    let w = ((8 * z + 1).sqrt() - 1) / 2;
    let t = w * (w + 1) / 2;
    let b = z - t;
    (w - b, b)
}

fn cantor_big(a: &BigUint, b: &BigUint) -> BigUint {
    let w = a + b;
    (&w * (&w + 1u32)) / 2u32 + b
}

fn cantor_inverse_big(z: &BigUint) -> (BigUint, BigUint) {
    let w = ((z * 8u32 + 1u32).sqrt() - 1u32) / 2u32;
    let t = (&w * (&w + 1u32)) / 2u32;
    let b = z - t;
    (w - &b, b)
}

/// The fixed pairing bijection X × X → X: Cantor pairing on string indices.
pub fn pair(x: &BitString, y: &BitString) -> BitString {
    if x.len() <= 60 && y.len() <= 60 {
        let a = x.index_u128().unwrap();
        let b = y.index_u128().unwrap();
        return BitString::from_index_u128(cantor(a, b));
    }
    let z = cantor_big(&index_of(x).0, &index_of(y).0);
    string_of(&StringIndex(z))
}

/// Inverse of [`pair`].
pub fn unpair(z: &BitString) -> (BitString, BitString) {
    if z.len() <= 120 {
        let (a, b) = cantor_inverse(z.index_u128().unwrap());
        return (BitString::from_index_u128(a), BitString::from_index_u128(b));
    }
    let (a, b) = cantor_inverse_big(&index_of(z).0);
    (string_of(&StringIndex(a)), string_of(&StringIndex(b)))
}

/// Left-fold tuple encoding: ⟨a⟩ = a, ⟨a₁,…,a_k⟩ = pair(⟨a₁,…,a_{k-1}⟩, a_k).
///
/// Panics on an empty slice.
pub fn tuple_encode(parts: &[BitString]) -> BitString {
    let (first, rest) = parts
        .split_first()
        .expect("tuple_encode requires at least one string");
    rest.iter().fold(first.clone(), |acc, x| pair(&acc, x))
}

/// All strings of length exactly `len`, in lexicographic order.
pub fn strings_of_len(len: usize) -> impl Iterator<Item = BitString> {
    assert!(len < 64);
    (0..1u128 << len).map(move |v| BitString::from_uint(v, len))
}

/// All strings of length at most `max_len`, in shortlex order.
pub fn strings_up_to(max_len: usize) -> impl Iterator<Item = BitString> {
    (0..=max_len).flat_map(strings_of_len)
}

/// A δ-simple set realized as every string of length ≤ `uniform_max_len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleSet {
    delta: u32,
    members: Vec<BitString>,
    uniform_max_len: Option<usize>,
}

impl SimpleSet {
    pub fn delta(&self) -> u32 {
        self.delta
    }

    /// `None` when the set is empty (only for δ = 0).
    pub fn uniform_max_len(&self) -> Option<usize> {
        self.uniform_max_len
    }

    /// Members in shortlex order.
    pub fn members(&self) -> &[BitString] {
        &self.members
    }

    /// Members other than Λ.
    pub fn non_empty_members(&self) -> impl Iterator<Item = &BitString> {
        self.members.iter().filter(|x| !x.is_empty())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: &BitString) -> bool {
        self.uniform_max_len.is_some_and(|m| x.len() <= m)
    }

    /// Longest pair encoding of two members.
    pub fn max_pair_len(&self) -> usize {
        match self.members.last() {
            // pair is monotone in both arguments under shortlex order
            Some(top) => pair(top, top).len(),
            None => 0,
        }
    }
}

fn uniform_ok(m: usize, delta: u32) -> bool {
    let top = BitString::from_uint((1u128 << m) - 1, m);
    m < delta as usize && pair(&top, &top).len() < delta as usize
}

/// The maximal set {x : |x| ≤ m} satisfying the δ-simple conditions.
pub fn build_simple_set(delta: u32) -> SimpleSet {
    if !uniform_ok(0, delta) {
        return SimpleSet {
            delta,
            members: Vec::new(),
            uniform_max_len: None,
        };
    }
    let mut m = 0;
    while uniform_ok(m + 1, delta) {
        m += 1;
    }
    SimpleSet {
        delta,
        members: strings_up_to(m).collect(),
        uniform_max_len: Some(m),
    }
}
