//! Arbitrary-precision naturals: wire encoding and prime generation.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::RngCore;

/// Miller–Rabin rounds used for every primality decision.
pub const MR_ROUNDS: usize = 40;

const SMALL_PRIMES: [u32; 24] =
    [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89];

/// Serializes as a 32-bit big-endian length followed by the minimal
/// big-endian magnitude. Zero has length 0.
pub fn write_natural(out: &mut Vec<u8>, n: &BigUint) {
    let bytes = if n.is_zero() { Vec::new() } else { n.to_bytes_be() };
    out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
    out.extend_from_slice(&bytes);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NaturalDecodeError {
    Truncated,
    NonCanonical,
}

/// Inverse of [`write_natural`]; returns the value and the number of bytes consumed.
pub fn read_natural(buf: &[u8]) -> Result<(BigUint, usize), NaturalDecodeError> {
    if buf.len() < 4 {
        return Err(NaturalDecodeError::Truncated);
    }
    let len = u32::from_be_bytes([buf[0], buf[1], buf[2], buf[3]]) as usize;
    let body = buf.get(4..).and_then(|rest| rest.get(..len)).ok_or(NaturalDecodeError::Truncated)?;
    if body.first() == Some(&0) {
        return Err(NaturalDecodeError::NonCanonical);
    }
    Ok((BigUint::from_bytes_be(body), 4 + len))
}

/// Probabilistic primality test (trial division, then Miller–Rabin).
pub fn is_probable_prime<R: RngCore + ?Sized>(n: &BigUint, rounds: usize, rng: &mut R) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for &sp in &SMALL_PRIMES {
        let sp = BigUint::from(sp);
        if *n == sp {
            return true;
        }
        if (n % &sp).is_zero() {
            return false;
        }
    }
    let n_minus_one = n - 1u32;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    'witness: for _ in 0..rounds {
        let a = rng.gen_biguint_range(&two, &n_minus_one);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Deterministic-seeded primality check for values supplied by the caller.
pub fn is_prime(n: &BigUint) -> bool {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x005E_ED0F_5A1E);
    is_probable_prime(n, MR_ROUNDS, &mut rng)
}

/// Uniform odd candidate with the top bit set, retried until prime.
pub fn random_prime<R: RngCore + ?Sized>(bits: u64, rng: &mut R) -> BigUint {
    assert!(bits >= 3, "prime bit length must be at least 3");
    loop {
        let mut candidate = rng.gen_biguint(bits);
        candidate.set_bit(bits - 1, true);
        candidate.set_bit(0, true);
        if is_probable_prime(&candidate, MR_ROUNDS, rng) {
            return candidate;
        }
    }
}

pub fn lcm(a: &BigUint, b: &BigUint) -> BigUint {
    a.lcm(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn natural_codec_is_canonical() {
        let mut out = Vec::new();
        write_natural(&mut out, &BigUint::zero());
        assert_eq!(out, [0, 0, 0, 0]);
        out.clear();
        write_natural(&mut out, &BigUint::from(0x0102u32));
        assert_eq!(out, [0, 0, 0, 2, 1, 2]);
        assert_eq!(read_natural(&out), Ok((BigUint::from(0x0102u32), 6)));
        assert_eq!(read_natural(&[0, 0, 0, 2, 0, 2]), Err(NaturalDecodeError::NonCanonical));
        assert_eq!(read_natural(&[0, 0, 0, 3, 1]), Err(NaturalDecodeError::Truncated));
        assert_eq!(read_natural(&[0, 0]), Err(NaturalDecodeError::Truncated));
    }

    #[test]
    fn primality_matches_sieve_below_2000() {
        let mut sieve = vec![true; 2000];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..2000 {
            if sieve[i] {
                for j in (i * i..2000).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for (i, &p) in sieve.iter().enumerate() {
            assert_eq!(is_prime(&BigUint::from(i)), p, "{i}");
        }
    }

    #[test]
    fn carmichael_numbers_rejected() {
        for c in [561u32, 1105, 1729, 2465, 2821, 6601, 8911] {
            assert!(!is_prime(&BigUint::from(c)));
        }
    }

    #[test]
    fn random_prime_has_requested_width() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for bits in [8u64, 16, 64, 128] {
            let p = random_prime(bits, &mut rng);
            assert_eq!(p.bits(), bits);
            assert!(is_prime(&p));
        }
    }
}
