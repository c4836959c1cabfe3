//! Bit strings, seeded random streams and the k-distinct-bit mutation.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A fixed-length binary string.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn zeros(n: usize) -> Self {
        Self {
            bits: vec![false; n],
        }
    }

    pub fn ones(n: usize) -> Self {
        Self {
            bits: vec![true; n],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Uniformly random string, filled 64 bits per draw.
    pub fn random<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut bits = Vec::with_capacity(n);
        while bits.len() < n {
            let word = rng.next_u64();
            let take = (n - bits.len()).min(64);
            bits.extend((0..take).map(|j| (word >> j) & 1 == 1));
        }
        Self { bits }
    }

    /// Parses a hex string, most significant bit first. The string must have
    /// exactly `ceil(n / 4)` digits and any padding bits must be zero.
    pub fn from_hex(hex: &str, n: usize) -> Result<Self> {
        let hex = hex.strip_prefix("0x").unwrap_or(hex);
        let digits = n.div_ceil(4);
        if hex.len() != digits {
            return Err(Error::invalid(format!(
                "hex string of length {} cannot encode {n} bits (expected {digits} digits)",
                hex.len()
            )));
        }
        let mut bits = Vec::with_capacity(digits * 4);
        for c in hex.chars() {
            let v = c
                .to_digit(16)
                .ok_or_else(|| Error::invalid(format!("invalid hex digit `{c}`")))?;
            bits.extend((0..4).rev().map(|j| (v >> j) & 1 == 1));
        }
        if bits[n..].iter().any(|&b| b) {
            return Err(Error::invalid("hex padding bits must be zero"));
        }
        bits.truncate(n);
        Ok(Self { bits })
    }

    pub fn to_hex(&self) -> String {
        self.bits
            .chunks(4)
            .map(|chunk| {
                let v = (0..4).fold(0u32, |acc, j| {
                    (acc << 1) | u32::from(chunk.get(j).copied().unwrap_or(false))
                });
                char::from_digit(v, 16).unwrap()
            })
            .collect()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Copy of `self` with the given positions flipped. Repeated positions
    /// flip repeatedly.
    pub fn with_flipped(&self, positions: &[usize]) -> Self {
        let mut out = self.clone();
        for &i in positions {
            out.flip(i);
        }
        out
    }

    #[inline]
    pub(crate) fn flip(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        check_same_len(self, other)?;
        Ok(Self {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| a ^ b)
                .collect(),
        })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    /// Parses a string of `0` and `1` characters.
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::invalid(format!("invalid bit character `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::from_bits)
    }
}

fn check_same_len(x: &BitString, y: &BitString) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

/// Number of positions in which `x` and `y` differ.
pub fn hamming_distance(x: &BitString, y: &BitString) -> Result<usize> {
    check_same_len(x, y)?;
    Ok(x.bits.iter().zip(&y.bits).filter(|(a, b)| a != b).count())
}

/// Returns a copy of `x` with exactly `k` distinct, uniformly chosen positions
/// flipped.
pub fn flip_k_distinct(x: &BitString, k: usize, rng: &mut RngStream) -> Result<BitString> {
    if k < 1 || k > x.len() {
        return Err(Error::invalid(format!(
            "k = {k} must lie in [1, {}]",
            x.len()
        )));
    }
    let mut sampler = SubsetSampler::new(x.len());
    let mut out = x.clone();
    for &i in sampler.sample(k, rng) {
        out.flip(i as usize);
    }
    Ok(out)
}

/// Draws uniform k-subsets of `{0, .., n-1}` by partial Fisher–Yates.
///
/// The index permutation is kept between draws. Partial Fisher–Yates started
/// from any permutation yields a uniform ordered k-sample, so no reset is
/// needed and each draw costs O(k).
#[derive(Debug, Clone)]
pub struct SubsetSampler {
    perm: Vec<u32>,
}

impl SubsetSampler {
    pub fn new(n: usize) -> Self {
        assert!(n <= u32::MAX as usize, "bit string too long");
        Self {
            perm: (0..n as u32).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    /// Uniform random k-subset; panics if `k > n`.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&mut self, k: usize, rng: &mut R) -> &[u32] {
        let n = self.perm.len();
        assert!(k <= n);
        for j in 0..k {
            let pick = rng.gen_range(j..n);
            self.perm.swap(j, pick);
        }
        &self.perm[..k]
    }
}

/// A reproducible random stream identified by `(master_seed, stream_id)`.
///
/// Backed by ChaCha8 keyed from the master seed, using the cipher's native
/// 64-bit stream selector for the stream id. Identical identifiers give
/// identical streams; distinct stream ids are independent keystreams.
#[derive(Clone, Debug)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_id);
        Self {
            master_seed,
            stream_id,
            rng,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Child stream labelled `child`. Depends only on this stream's identity
    /// and the label, never on how much of this stream has been consumed.
    pub fn derive(&self, child: u64) -> RngStream {
        let key = splitmix64(self.master_seed ^ splitmix64(self.stream_id));
        RngStream::new(key, child)
    }
}

impl RngCore for RngStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

/// SplitMix64 finaliser.
pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::RngCore;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn flip_all_bits_is_complement() {
        let mut rng = RngStream::new(1, 0);
        assert_eq!(flip_k_distinct(&bs("000"), 3, &mut rng).unwrap(), bs("111"));
        assert_eq!(flip_k_distinct(&bs("10"), 2, &mut rng).unwrap(), bs("01"));
    }

    #[test]
    fn flip_rejects_bad_k() {
        let mut rng = RngStream::new(1, 0);
        assert!(flip_k_distinct(&bs("000"), 0, &mut rng).is_err());
        assert!(flip_k_distinct(&bs("000"), 4, &mut rng).is_err());
    }

    #[test]
    fn single_flip_is_uniform() {
        // 10^6 draws; each of the four outcomes must be within 1/4 ± 0.01
        // and the chi-square statistic (3 df) must not reject at 1%.
        let x = bs("0000");
        let mut rng = RngStream::new(7, 3);
        let mut counts = [0u64; 4];
        let draws = 1_000_000;
        for _ in 0..draws {
            let y = flip_k_distinct(&x, 1, &mut rng).unwrap();
            let pos = y.as_slice().iter().position(|&b| b).unwrap();
            counts[pos] += 1;
        }
        let expected = draws as f64 / 4.0;
        let mut chi2 = 0.0;
        for &c in &counts {
            assert!((c as f64 / draws as f64 - 0.25).abs() < 0.01);
            chi2 += (c as f64 - expected).powi(2) / expected;
        }
        assert!(chi2 < 11.345, "chi2 = {chi2}");
    }

    #[test]
    fn subset_sampler_pairs_uniform() {
        // All C(5,2) = 10 subsets equally likely even with a persistent
        // permutation.
        let mut sampler = SubsetSampler::new(5);
        let mut rng = RngStream::new(11, 0);
        let mut counts = std::collections::HashMap::new();
        let draws = 200_000;
        for _ in 0..draws {
            let mut s = sampler.sample(2, &mut rng).to_vec();
            s.sort();
            *counts.entry(s).or_insert(0u64) += 1;
        }
        assert_eq!(counts.len(), 10);
        let expected = draws as f64 / 10.0;
        let chi2: f64 = counts
            .values()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 99th percentile of chi-square with 9 df.
        assert!(chi2 < 21.666, "chi2 = {chi2}");
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming_distance(&bs("000"), &bs("000")).unwrap(), 0);
        assert_eq!(hamming_distance(&bs("101"), &bs("010")).unwrap(), 3);
        assert_eq!(hamming_distance(&bs("1100"), &bs("1010")).unwrap(), 2);
        assert!(hamming_distance(&bs("11"), &bs("110")).is_err());
    }

    #[test]
    fn hex_round_trip_and_errors() {
        let x = bs("110");
        assert_eq!(x.to_hex(), "c");
        assert_eq!(BitString::from_hex("c", 3).unwrap(), x);
        assert_eq!(BitString::from_hex("0xa5", 8).unwrap(), bs("10100101"));
        assert!(BitString::from_hex("d", 3).is_err()); // padding bit set
        assert!(BitString::from_hex("cc", 3).is_err());
        assert!(BitString::from_hex("g", 4).is_err());
    }

    #[test]
    fn streams_replay_and_differ() {
        let mut a = RngStream::new(42, 5);
        let mut b = RngStream::new(42, 5);
        let mut c = RngStream::new(42, 6);
        let xa: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        let xc: Vec<u64> = (0..8).map(|_| c.next_u64()).collect();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
    }

    #[test]
    fn derive_ignores_consumption() {
        let a = RngStream::new(3, 9);
        let mut b = RngStream::new(3, 9);
        b.next_u64();
        assert_eq!(a.derive(4).next_u64(), b.derive(4).next_u64());
        assert_ne!(a.derive(4).next_u64(), a.derive(5).next_u64());
    }

    proptest! {
        #[test]
        fn flip_moves_exactly_k(bits in proptest::collection::vec(any::<bool>(), 1..64),
                                kfrac in 0.0f64..1.0, seed in any::<u64>()) {
            let x = BitString::from_bits(bits);
            let k = 1 + ((x.len() - 1) as f64 * kfrac) as usize;
            let mut rng = RngStream::new(seed, 0);
            let y = flip_k_distinct(&x, k, &mut rng).unwrap();
            prop_assert_eq!(hamming_distance(&x, &y).unwrap(), k);
        }

        #[test]
        fn flipping_same_positions_twice_is_identity(
            bits in proptest::collection::vec(any::<bool>(), 1..64),
            seed in any::<u64>(), k in 1usize..8)
        {
            let x = BitString::from_bits(bits);
            let k = k.min(x.len());
            let mut sampler = SubsetSampler::new(x.len());
            let mut rng = RngStream::new(seed, 1);
            let pos: Vec<usize> = sampler.sample(k, &mut rng).iter().map(|&i| i as usize).collect();
            prop_assert_eq!(x.with_flipped(&pos).with_flipped(&pos), x);
        }

        #[test]
        fn mutation_sequences_replay(seed in any::<u64>(), stream in any::<u64>()) {
            let x = BitString::zeros(32);
            let run = |mut rng: RngStream| -> Vec<BitString> {
                (0..5).map(|_| flip_k_distinct(&x, 3, &mut rng).unwrap()).collect()
            };
            prop_assert_eq!(run(RngStream::new(seed, stream)), run(RngStream::new(seed, stream)));
        }
    }
}
