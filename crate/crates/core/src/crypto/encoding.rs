//! Base-100 positional packing of identities and symmetric keys.
//!
//! Identities use each character's ASCII code as one base-100 digit, which
//! is only injective while every code stays below 100; hence the `[0-9A-Z]`
//! identity alphabet. Symmetric keys use the key map
//! `'0'..='9' -> 0..=9`, `'A'..='Z' -> 10..=35`, `'a'..='z' -> 46..=71`.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::symmetric::{SymmetricKey, SYMMETRIC_KEY_LEN};
use super::CryptoError;
use crate::ids::{is_vehicle_id_byte, VehicleId};

/// Codes between the upper-case and lower-case ranges of the key map.
pub const KEY_CODE_GAP: std::ops::RangeInclusive<u32> = 36..=45;

pub fn encode_id(id: &VehicleId) -> BigUint {
    encode_id_bytes(id.as_bytes()).expect("VehicleId alphabet is validated on construction")
}

pub(crate) fn encode_id_bytes(id: &[u8]) -> Result<BigUint, CryptoError> {
    if id.is_empty() {
        return Err(CryptoError::EmptyId);
    }
    let hundred = BigUint::from(100u32);
    let mut acc = BigUint::zero();
    for &b in id {
        if !is_vehicle_id_byte(b) {
            return Err(CryptoError::InvalidIdChar);
        }
        acc = acc * &hundred + BigUint::from(b);
    }
    Ok(acc)
}

pub fn decode_id(n: &BigUint) -> Result<VehicleId, CryptoError> {
    if n.is_zero() {
        return Err(CryptoError::EmptyId);
    }
    let mut chars = Vec::new();
    for digit in base100_digits(n) {
        let b = digit as u8;
        if digit >= 100 || !is_vehicle_id_byte(b) {
            return Err(CryptoError::BadIdDigit(digit));
        }
        chars.push(b);
    }
    let s = String::from_utf8(chars).expect("ASCII digits");
    VehicleId::new(s).map_err(|_| CryptoError::InvalidIdChar)
}

fn key_code(c: u8) -> Option<u32> {
    match c {
        b'0'..=b'9' => Some(u32::from(c - b'0')),
        b'A'..=b'Z' => Some(u32::from(c - b'A') + 10),
        b'a'..=b'z' => Some(u32::from(c - b'a') + 46),
        _ => None,
    }
}

fn key_char(code: u32) -> Option<u8> {
    match code {
        0..=9 => Some(b'0' + code as u8),
        10..=35 => Some(b'A' + (code - 10) as u8),
        46..=71 => Some(b'a' + (code - 46) as u8),
        _ => None,
    }
}

pub fn encode_key(key: &SymmetricKey) -> BigUint {
    let hundred = BigUint::from(100u32);
    key.as_bytes().iter().fold(BigUint::zero(), |acc, &c| {
        acc * &hundred + key_code(c).expect("SymmetricKey alphabet is validated on construction")
    })
}

/// Keys have a fixed width, so leading `'0'` characters (code 00) are
/// restored from the known length.
pub fn decode_key(n: &BigUint) -> Result<SymmetricKey, CryptoError> {
    let digits = base100_digits(n);
    if digits.len() > SYMMETRIC_KEY_LEN {
        return Err(CryptoError::KeyTooLong);
    }
    let mut out = vec![b'0'; SYMMETRIC_KEY_LEN - digits.len()];
    for code in digits {
        out.push(key_char(code).ok_or(CryptoError::BadKeyCode(code))?);
    }
    SymmetricKey::from_bytes(&out)
}

/// Most-significant digit first; zero yields no digits.
fn base100_digits(n: &BigUint) -> Vec<u32> {
    let mut digits: Vec<u32> = n.to_radix_le(100).into_iter().map(|d| d.to_u32().unwrap_or(u32::MAX)).collect();
    if n.is_zero() {
        digits.clear();
    }
    digits.reverse();
    digits
}
