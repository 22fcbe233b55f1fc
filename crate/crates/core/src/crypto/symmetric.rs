//! AES-128-GCM envelope around the serialized data packet.

use aes_gcm::aead::{Aead, KeyInit};
use aes_gcm::{Aes128Gcm, Nonce};
use rand::{Rng, RngCore};

use super::CryptoError;

pub const SYMMETRIC_KEY_LEN: usize = 16;
const NONCE_LEN: usize = 12;
const KEY_ALPHABET: &[u8] = b"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";

/// Sixteen characters over `[0-9A-Za-z]`; the ASCII bytes are the AES key.
#[derive(Clone, PartialEq, Eq)]
pub struct SymmetricKey([u8; SYMMETRIC_KEY_LEN]);

impl std::fmt::Debug for SymmetricKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("SymmetricKey(..)")
    }
}

impl SymmetricKey {
    pub fn new(s: &str) -> Result<Self, CryptoError> {
        Self::from_bytes(s.as_bytes())
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self, CryptoError> {
        let arr: [u8; SYMMETRIC_KEY_LEN] = b.try_into().map_err(|_| CryptoError::InvalidKey)?;
        if !arr.iter().all(u8::is_ascii_alphanumeric) {
            return Err(CryptoError::InvalidKey);
        }
        Ok(Self(arr))
    }

    pub fn generate<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut arr = [0u8; SYMMETRIC_KEY_LEN];
        for b in &mut arr {
            *b = KEY_ALPHABET[rng.gen_range(0..KEY_ALPHABET.len())];
        }
        Self(arr)
    }

    pub fn as_bytes(&self) -> &[u8; SYMMETRIC_KEY_LEN] {
        &self.0
    }
}

/// Output layout: 12-byte nonce followed by ciphertext and 16-byte tag.
pub fn sym_encrypt<R: RngCore + ?Sized>(plaintext: &[u8], key: &SymmetricKey, rng: &mut R) -> Vec<u8> {
    let cipher = Aes128Gcm::new_from_slice(key.as_bytes()).expect("16-byte key");
    let mut nonce = [0u8; NONCE_LEN];
    rng.fill_bytes(&mut nonce);
    let ct = cipher.encrypt(Nonce::from_slice(&nonce), plaintext).expect("in-memory AES-GCM encryption cannot fail");
    let mut out = Vec::with_capacity(NONCE_LEN + ct.len());
    out.extend_from_slice(&nonce);
    out.extend_from_slice(&ct);
    out
}

pub fn sym_decrypt(envelope: &[u8], key: &SymmetricKey) -> Result<Vec<u8>, CryptoError> {
    if envelope.len() < NONCE_LEN + 16 {
        return Err(CryptoError::MalformedEnvelope);
    }
    let (nonce, ct) = envelope.split_at(NONCE_LEN);
    let cipher = Aes128Gcm::new_from_slice(key.as_bytes()).expect("16-byte key");
    cipher.decrypt(Nonce::from_slice(nonce), ct).map_err(|_| CryptoError::Integrity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn key_validation() {
        assert!(SymmetricKey::new("0123456789abcdef").is_ok());
        assert_eq!(SymmetricKey::new("short"), Err(CryptoError::InvalidKey));
        assert_eq!(SymmetricKey::new("0123456789abcde!"), Err(CryptoError::InvalidKey));
    }

    #[test]
    fn round_trip_random_packets() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let key = SymmetricKey::generate(&mut rng);
            let len = rng.gen_range(0..200);
            let msg: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            let env = sym_encrypt(&msg, &key, &mut rng);
            assert_eq!(sym_decrypt(&env, &key).unwrap(), msg);
        }
    }

    #[test]
    fn empty_plaintext_round_trips() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let key = SymmetricKey::generate(&mut rng);
        let env = sym_encrypt(&[], &key, &mut rng);
        assert_eq!(env.len(), 28);
        assert_eq!(sym_decrypt(&env, &key).unwrap(), Vec::<u8>::new());
    }

    #[test]
    fn wrong_key_fails_integrity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let k1 = SymmetricKey::generate(&mut rng);
            let k2 = SymmetricKey::generate(&mut rng);
            let env = sym_encrypt(b"data packet", &k1, &mut rng);
            assert_eq!(sym_decrypt(&env, &k2), Err(CryptoError::Integrity));
        }
        assert_eq!(sym_decrypt(&[0u8; 5], &SymmetricKey::generate(&mut rng)), Err(CryptoError::MalformedEnvelope));
    }
}
