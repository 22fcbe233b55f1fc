use num_bigint::BigUint;
use num_traits::One;
use rand::RngCore;

use super::natural::{is_prime, lcm, random_prime};
use super::CryptoError;

/// Edge-server key material: `n = p^2 q`, `d = n^-1 mod lcm(p-1, q-1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SsKeyPair {
    p: BigUint,
    q: BigUint,
    n_public: BigUint,
    d_private: BigUint,
    pq: BigUint,
}

/// What the edge broadcasts to vehicles.
///
/// `plaintext_bits` is one less than the bit length of `p*q`, so any value
/// below `2^plaintext_bits` is guaranteed to decrypt correctly without
/// revealing `p*q` itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SsPublicKey {
    pub n: BigUint,
    pub plaintext_bits: u64,
}

impl SsKeyPair {
    pub fn from_primes(p: BigUint, q: BigUint) -> Result<Self, CryptoError> {
        if !is_prime(&p) {
            return Err(CryptoError::NotPrime(p.to_string()));
        }
        if !is_prime(&q) {
            return Err(CryptoError::NotPrime(q.to_string()));
        }
        if p == q {
            return Err(CryptoError::EqualPrimes);
        }
        let n_public = &p * &p * &q;
        let carmichael = lcm(&(&p - 1u32), &(&q - 1u32));
        let d_private = (&n_public % &carmichael).modinv(&carmichael).ok_or(CryptoError::NoInverse)?;
        let pq = &p * &q;
        Ok(Self { p, q, n_public, d_private, pq })
    }

    /// Samples two distinct `bit_length`-bit primes until the private
    /// exponent exists.
    pub fn generate<R: RngCore + ?Sized>(bit_length: u64, rng: &mut R) -> Self {
        assert!(bit_length >= 8, "toy keys need at least 8-bit primes");
        loop {
            let p = random_prime(bit_length, rng);
            let q = random_prime(bit_length, rng);
            if let Ok(kp) = Self::from_primes(p, q) {
                return kp;
            }
        }
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn q(&self) -> &BigUint {
        &self.q
    }

    pub fn n_public(&self) -> &BigUint {
        &self.n_public
    }

    pub fn d_private(&self) -> &BigUint {
        &self.d_private
    }

    /// Exclusive upper bound of the plaintext domain.
    pub fn pq(&self) -> &BigUint {
        &self.pq
    }

    pub fn public_key(&self) -> SsPublicKey {
        SsPublicKey { n: self.n_public.clone(), plaintext_bits: self.pq.bits() - 1 }
    }

    /// Encrypts with the exact `m < p*q` guard; only the key owner can apply it.
    pub fn encrypt(&self, m: &BigUint) -> Result<BigUint, CryptoError> {
        if *m >= self.pq {
            return Err(CryptoError::PlaintextTooLarge);
        }
        Ok(raw_encrypt(m, &self.n_public))
    }

    pub fn decrypt(&self, c: &BigUint) -> BigUint {
        c.modpow(&self.d_private, &self.pq)
    }

    /// Checks `(d * n) mod lcm(p-1, q-1) == 1`.
    pub fn is_consistent(&self) -> bool {
        let carmichael = lcm(&(&self.p - 1u32), &(&self.q - 1u32));
        (&self.d_private * &self.n_public % carmichael).is_one() && self.n_public == &self.p * &self.p * &self.q
    }
}

impl SsPublicKey {
    pub fn encrypt(&self, m: &BigUint) -> Result<BigUint, CryptoError> {
        if m.bits() > self.plaintext_bits {
            return Err(CryptoError::PlaintextTooLarge);
        }
        Ok(raw_encrypt(m, &self.n))
    }
}

fn raw_encrypt(m: &BigUint, n: &BigUint) -> BigUint {
    m.modpow(n, n)
}
