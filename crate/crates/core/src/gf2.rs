//! Packed bit vectors over GF(2) and rank computation.

/// Number of 64-bit words needed to hold `n` bits.
#[inline]
pub fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
pub fn get_bit(words: &[u64], i: usize) -> bool {
    (words[i >> 6] >> (i & 63)) & 1 == 1
}

#[inline]
pub fn set_bit(words: &mut [u64], i: usize, value: bool) {
    let mask = 1u64 << (i & 63);
    if value {
        words[i >> 6] |= mask;
    } else {
        words[i >> 6] &= !mask;
    }
}

#[inline]
pub fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

#[inline]
pub fn is_zero(words: &[u64]) -> bool {
    words.iter().all(|&w| w == 0)
}

/// Index of the lowest set bit, if any.
#[inline]
pub fn lowest_set(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(k, &w)| k * 64 + w.trailing_zeros() as usize)
}

/// Rank over GF(2) of a set of equal-length packed vectors.
///
/// The vectors are consumed as scratch space. Elimination keys on the lowest
/// set bit of each reduced vector.
pub fn rank(mut vectors: Vec<Vec<u64>>) -> usize {
    let mut rank = 0;
    let n = vectors.len();
    for i in 0..n {
        let Some(pivot) = lowest_set(&vectors[i]) else {
            continue;
        };
        rank += 1;
        let (head, tail) = vectors.split_at_mut(i + 1);
        let pv = &head[i];
        for v in tail.iter_mut() {
            if get_bit(v, pivot) {
                xor_into(v, pv);
            }
        }
    }
    rank
}

/// Rank of the vectors referenced by `vectors`, copying them first.
pub fn rank_of(vectors: &[&[u64]]) -> usize {
    rank(vectors.iter().map(|v| v.to_vec()).collect())
}
