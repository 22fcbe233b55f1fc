//! ElGamal signatures over a SHA3-256 digest of the signed bytes.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::RngCore;
use sha3::{Digest, Sha3_256};

use super::natural::{is_probable_prime, random_prime, read_natural, write_natural, MR_ROUNDS};
use super::CryptoError;

/// 512-bit safe prime `p = 2q + 1`; 2 generates the full multiplicative group.
const STANDARD_P_HEX: &str = "faf7dcde44641217ccd49878ea25d820ebee563f47c84145f6cb0427705d6f9f\
                              9f31f35e1f33902037fd0a5a9f7964a75e98e23f62ae520a3a8d39eb7169d21b";

/// Domain parameters shared by the central server and all vehicles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EgGroup {
    pub p: BigUint,
    pub g: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EgPublicKey {
    pub group: EgGroup,
    pub y: BigUint,
}

#[derive(Debug, Clone)]
pub struct EgKeyPair {
    public: EgPublicKey,
    x: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub r: BigUint,
    pub s: BigUint,
}

impl EgGroup {
    pub fn standard() -> Self {
        Self { p: BigUint::parse_bytes(STANDARD_P_HEX.as_bytes(), 16).expect("valid hex"), g: BigUint::from(2u32) }
    }

    /// Searches for a safe prime of `bits` bits and a primitive root. Slow
    /// above ~256 bits; meant for tests that want small groups.
    pub fn generate<R: RngCore + ?Sized>(bits: u64, rng: &mut R) -> Self {
        assert!(bits >= 8);
        let (p, q) = loop {
            let q = random_prime(bits - 1, rng);
            let p = (&q << 1u32) + 1u32;
            if is_probable_prime(&p, MR_ROUNDS, rng) {
                break (p, q);
            }
        };
        let mut g = BigUint::from(2u32);
        loop {
            if !g.modpow(&BigUint::from(2u32), &p).is_one() && !g.modpow(&q, &p).is_one() {
                return Self { p, g };
            }
            g += 1u32;
        }
    }

    fn order(&self) -> BigUint {
        &self.p - 1u32
    }

    fn digest(&self, msg: &[u8]) -> BigUint {
        BigUint::from_bytes_be(&Sha3_256::digest(msg)) % self.order()
    }
}

impl EgKeyPair {
    pub fn generate<R: RngCore + ?Sized>(group: &EgGroup, rng: &mut R) -> Self {
        let two = BigUint::from(2u32);
        let x = rng.gen_biguint_range(&two, &(&group.p - 1u32));
        let y = group.g.modpow(&x, &group.p);
        Self { public: EgPublicKey { group: group.clone(), y }, x }
    }

    pub fn public(&self) -> &EgPublicKey {
        &self.public
    }

    pub fn sign<R: RngCore + ?Sized>(&self, msg: &[u8], rng: &mut R) -> Signature {
        let group = &self.public.group;
        let order = group.order();
        let h = group.digest(msg);
        let two = BigUint::from(2u32);
        loop {
            let k = rng.gen_biguint_range(&two, &order);
            if !k.gcd(&order).is_one() {
                continue;
            }
            let r = group.g.modpow(&k, &group.p);
            let k_inv = k.modinv(&order).expect("k is coprime to p-1");
            // s = (h - x r) k^-1 mod (p-1), kept non-negative.
            let xr = &self.x * &r % &order;
            let diff = (&h + &order - xr) % &order;
            let s = diff * k_inv % &order;
            if !s.is_zero() {
                return Signature { r, s };
            }
        }
    }
}

impl EgPublicKey {
    /// Checks `g^h == y^r r^s (mod p)`; out-of-range components verify false.
    pub fn verify(&self, msg: &[u8], sig: &Signature) -> bool {
        let group = &self.group;
        let order = group.order();
        if sig.r.is_zero() || sig.r >= group.p || sig.s.is_zero() || sig.s >= order {
            return false;
        }
        let h = group.digest(msg);
        let lhs = group.g.modpow(&h, &group.p);
        let rhs = self.y.modpow(&sig.r, &group.p) * sig.r.modpow(&sig.s, &group.p) % &group.p;
        lhs == rhs
    }

    /// Same as [`verify`](Self::verify) on the wire form; malformed bytes verify false.
    pub fn verify_bytes(&self, msg: &[u8], sig: &[u8]) -> bool {
        Signature::from_bytes(sig).is_ok_and(|s| self.verify(msg, &s))
    }
}

impl Signature {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        write_natural(&mut out, &self.r);
        write_natural(&mut out, &self.s);
        out
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self, CryptoError> {
        let (r, used) = read_natural(b).map_err(|_| CryptoError::MalformedSignature)?;
        let (s, used2) = read_natural(&b[used..]).map_err(|_| CryptoError::MalformedSignature)?;
        if used + used2 != b.len() {
            return Err(CryptoError::MalformedSignature);
        }
        Ok(Self { r, s })
    }
}
