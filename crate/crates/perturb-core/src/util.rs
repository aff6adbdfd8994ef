//! Small shared numeric helpers.

/// Derives an independent stream seed from a base seed and a lane tag.
///
/// One experiment trial usually needs several unrelated random objects (two
/// operators, a perturbation, a symbol).  Seeding them with `seed + k` would
/// make neighbouring trials share draws, so we run `seed ⊕ lane·φ` through a
/// splitmix64 finalizer instead.
pub fn mix_seed(seed: u64, lane: u64) -> u64 {
    let mut z = seed ^ lane.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Binomial coefficient as f64 (exact for the small orders used here).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * ((n - i) as f64) / ((i + 1) as f64);
    }
    acc.round()
}

#[cfg(test)]
mod tests {
    use super::binomial;

    #[test]
    fn pascal_row() {
        assert_eq!(binomial(4, 0), 1.0);
        assert_eq!(binomial(4, 1), 4.0);
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(5, 5), 1.0);
        assert_eq!(binomial(3, 7), 0.0);
    }
}
