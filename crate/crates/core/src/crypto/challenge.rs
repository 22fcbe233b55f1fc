//! XOR challenge–response presence test.
//!
//! `challenge = cv XOR rotl(testing_word, left_num)` and
//! `response = v XOR challenge`. The response equals `rotl(testing_word,
//! left_num)` exactly when `v == cv`. The shift is a circular rotation of
//! the whole byte string viewed as one big-endian bit string, so no bits of
//! the testing word are lost.

use super::CryptoError;

/// Rotates the bit string left by `n` bits (taken modulo its width).
pub fn rotate_left_bits(bytes: &[u8], n: u32) -> Vec<u8> {
    let len = bytes.len();
    if len == 0 {
        return Vec::new();
    }
    let width = len * 8;
    let shift = n as usize % width;
    let (byte_shift, bit_shift) = (shift / 8, shift % 8);
    (0..len)
        .map(|i| {
            let hi = bytes[(i + byte_shift) % len];
            if bit_shift == 0 {
                hi
            } else {
                let lo = bytes[(i + byte_shift + 1) % len];
                (hi << bit_shift) | (lo >> (8 - bit_shift))
            }
        })
        .collect()
}

fn xor(a: &[u8], b: &[u8]) -> Result<Vec<u8>, CryptoError> {
    if a.len() != b.len() {
        return Err(CryptoError::LengthMismatch { left: a.len(), right: b.len() });
    }
    Ok(a.iter().zip(b).map(|(x, y)| x ^ y).collect())
}

pub fn make_crypto_challenge(cv: &[u8], testing_word: &[u8], left_num: u32) -> Result<Vec<u8>, CryptoError> {
    if cv.len() != testing_word.len() {
        return Err(CryptoError::LengthMismatch { left: cv.len(), right: testing_word.len() });
    }
    xor(cv, &rotate_left_bits(testing_word, left_num))
}

pub fn make_crypto_response(v: &[u8], challenge: &[u8]) -> Result<Vec<u8>, CryptoError> {
    xor(v, challenge)
}

pub fn match_response(response: &[u8], testing_word: &[u8], left_num: u32) -> bool {
    response.len() == testing_word.len() && response == rotate_left_bits(testing_word, left_num)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Bit-by-bit reference rotation.
    fn rotl_reference(bytes: &[u8], n: u32) -> Vec<u8> {
        let bits: Vec<u8> = bytes.iter().flat_map(|b| (0..8).rev().map(move |i| (b >> i) & 1)).collect();
        let w = bits.len();
        let k = n as usize % w;
        let rotated: Vec<u8> = (0..w).map(|i| bits[(i + k) % w]).collect();
        rotated.chunks(8).map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | b)).collect()
    }

    #[test]
    fn rotation_matches_reference() {
        let samples: [&[u8]; 4] = [b"A", b"AB", b"CAR00042", &[0x80, 0x01, 0xff]];
        for s in samples {
            for n in 0..(s.len() as u32 * 8 * 2) {
                assert_eq!(rotate_left_bits(s, n), rotl_reference(s, n), "{s:?} by {n}");
            }
        }
    }

    #[test]
    fn example_aa_ab() {
        // "AB" = 0x41 0x42 -> rotl 1 = 0x82 0x84; XOR "AA" = 0xC3 0xC5
        let ch = make_crypto_challenge(b"AA", b"AB", 1).unwrap();
        assert_eq!(ch, vec![0x41 ^ 0x82, 0x41 ^ 0x84]);
        assert_eq!(ch, vec![0xC3, 0xC5]);
    }

    #[test]
    fn full_width_rotation_zero_challenge() {
        let ch = make_crypto_challenge(b"CAR00042", b"CAR00042", 64).unwrap();
        assert!(ch.iter().all(|&b| b == 0));
        assert_eq!(make_crypto_response(b"CAR00042", &ch).unwrap(), b"CAR00042".to_vec());
    }

    #[test]
    fn targeted_vs_other() {
        let ch = make_crypto_challenge(b"CAR00001", b"ZQ7KX2M9", 13).unwrap();
        let ok = make_crypto_response(b"CAR00001", &ch).unwrap();
        assert_eq!(ok, rotate_left_bits(b"ZQ7KX2M9", 13));
        assert!(match_response(&ok, b"ZQ7KX2M9", 13));
        let bad = make_crypto_response(b"CAR00002", &ch).unwrap();
        assert!(!match_response(&bad, b"ZQ7KX2M9", 13));
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(matches!(
            make_crypto_challenge(b"ABC", b"AB", 1),
            Err(CryptoError::LengthMismatch { left: 3, right: 2 })
        ));
        assert!(make_crypto_response(b"A", b"AB").is_err());
        assert!(!match_response(b"A", b"AB", 1));
    }
}
