//! Exact Kraft sums and canonical prefix-code assignment.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::bits::BitString;

/// Σ 2^(−l) over a multiset of lengths, held exactly as `numerator / 2^scale`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KraftSum {
    pub numerator: BigUint,
    pub scale: usize,
}

impl KraftSum {
    pub fn of<I: IntoIterator<Item = usize>>(lengths: I) -> KraftSum {
        let mut hist: BTreeMap<usize, u64> = BTreeMap::new();
        for l in lengths {
            *hist.entry(l).or_default() += 1;
        }
        let scale = hist.keys().next_back().copied().unwrap_or(0);
        let numerator = hist
            .iter()
            .fold(BigUint::zero(), |acc, (&l, &c)| acc + (BigUint::from(c) << (scale - l)));
        KraftSum { numerator, scale }
    }

    /// Whether the sum is at most one.
    pub fn is_feasible(&self) -> bool {
        self.numerator <= BigUint::one() << self.scale
    }

    pub fn is_exactly_one(&self) -> bool {
        self.numerator == BigUint::one() << self.scale
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.numerator.to_f64().unwrap_or(f64::INFINITY) / 2f64.powi(self.scale as i32)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodeError {
    #[error("requested lengths violate the Kraft inequality")]
    KraftViolation,
    #[error("codeword length 0 requested at position {0}")]
    ZeroLength(usize),
    #[error("codeword length {0} exceeds the supported maximum of 127")]
    TooLong(usize),
}

/// Assigns a canonical prefix code with exactly the requested lengths.
///
/// Positions are visited by (length, position); the first codeword is all
/// zeros and each next one is the previous plus one, shifted left when the
/// length grows. Output order matches input order.
pub fn assign_codewords(lengths: &[usize]) -> Result<Vec<BitString>, CodeError> {
    if let Some(pos) = lengths.iter().position(|&l| l == 0) {
        return Err(CodeError::ZeroLength(pos));
    }
    if let Some(&l) = lengths.iter().find(|&&l| l > 127) {
        return Err(CodeError::TooLong(l));
    }
    if !KraftSum::of(lengths.iter().copied()).is_feasible() {
        return Err(CodeError::KraftViolation);
    }
    let mut order: Vec<usize> = (0..lengths.len()).collect();
    order.sort_by_key(|&i| (lengths[i], i));

    let mut out = vec![BitString::empty(); lengths.len()];
    let mut code: u128 = 0;
    let mut prev: Option<usize> = None;
    for i in order {
        let len = lengths[i];
        if let Some(p) = prev {
            code = (code + 1) << (len - p);
        }
        out[i] = BitString::from_uint(code, len);
        prev = Some(len);
    }
    Ok(out)
}

/// Whether no string in the set is a proper prefix of (or equal to) another.
///
/// Sorting lexicographically puts any prefix immediately before some string
/// it prefixes, so adjacent comparisons suffice.
pub fn is_prefix_free(codes: &[BitString]) -> bool {
    let mut sorted: Vec<&BitString> = codes.iter().collect();
    sorted.sort_by(|a, b| a.iter().cmp(b.iter()));
    sorted.windows(2).all(|w| !w[1].starts_with(w[0]))
}
