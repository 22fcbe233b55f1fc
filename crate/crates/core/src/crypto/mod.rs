//! Cryptographic primitives used by the protocol.
//!
//! * Schmidt-Samoa public-key encryption, held by each edge server, protects
//!   vehicle identities (`enc_id`) and per-round symmetric keys (`tau`).
//! * Base-100 positional encodings turn identities and symmetric keys into
//!   naturals that fit the Schmidt-Samoa plaintext domain.
//! * ElGamal signatures over a SHA3-256 digest authenticate vehicle ids.
//! * AES-128-GCM wraps the data packet body.
//! * The XOR/rotation challenge–response proves a vehicle's presence at an RSU.
//!
//! None of this is hardened against side channels; all randomness is supplied
//! by the caller so simulations replay exactly.

mod challenge;
mod elgamal;
mod encoding;
pub mod natural;
mod schmidt_samoa;
mod symmetric;

pub use challenge::{make_crypto_challenge, make_crypto_response, match_response, rotate_left_bits};
pub use elgamal::{EgGroup, EgKeyPair, EgPublicKey, Signature};
pub use encoding::{decode_id, decode_key, encode_id, encode_key, KEY_CODE_GAP};
pub use schmidt_samoa::{SsKeyPair, SsPublicKey};
pub use symmetric::{sym_decrypt, sym_encrypt, SymmetricKey, SYMMETRIC_KEY_LEN};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CryptoError {
    #[error("{0} is not a probable prime")]
    NotPrime(String),
    #[error("primes must be distinct")]
    EqualPrimes,
    #[error("public exponent has no inverse modulo lcm(p-1, q-1)")]
    NoInverse,
    #[error("plaintext is outside the encryption domain")]
    PlaintextTooLarge,
    #[error("identifier contains a character outside [0-9A-Z]")]
    InvalidIdChar,
    #[error("base-100 digit {0} does not decode to an identifier character")]
    BadIdDigit(u32),
    #[error("encoded identifier is empty")]
    EmptyId,
    #[error("symmetric key must be {SYMMETRIC_KEY_LEN} characters over [0-9A-Za-z]")]
    InvalidKey,
    #[error("key code {0} is outside the key map")]
    BadKeyCode(u32),
    #[error("encoded key has more than {SYMMETRIC_KEY_LEN} digits")]
    KeyTooLong,
    #[error("length mismatch: {left} vs {right} bytes")]
    LengthMismatch { left: usize, right: usize },
    #[error("symmetric envelope failed authentication")]
    Integrity,
    #[error("malformed symmetric envelope")]
    MalformedEnvelope,
    #[error("malformed signature encoding")]
    MalformedSignature,
}
