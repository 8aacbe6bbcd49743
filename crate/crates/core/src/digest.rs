//! SHA-256 content digests rendered as lowercase hex.

use alloc::string::String;
use sha2::{Digest, Sha256};

const HEX: &[u8; 16] = b"0123456789abcdef";

pub fn to_hex(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        out.push(HEX[(b >> 4) as usize] as char);
        out.push(HEX[(b & 0xf) as usize] as char);
    }
    out
}

/// 64-character hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    to_hex(&Sha256::digest(bytes))
}

/// True for a 64-character lowercase hex string.
pub fn is_digest(s: &str) -> bool {
    s.len() == 64 && is_lower_hex(s)
}

pub fn is_lower_hex(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
}

/// Digest over a set of `(path, content digest)` pairs, independent of input order.
pub fn tree_digest<'a, I>(files: I) -> String
where
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    let mut pairs: alloc::vec::Vec<(&str, &str)> = files.into_iter().collect();
    pairs.sort();
    let mut hasher = Sha256::new();
    for (path, hash) in pairs {
        hasher.update(path.as_bytes());
        hasher.update([0u8]);
        hasher.update(hash.as_bytes());
        hasher.update([b'\n']);
    }
    to_hex(&hasher.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert!(is_digest(&sha256_hex(b"")));
        assert!(!is_digest("ABC"));
    }

    #[test]
    fn tree_digest_ignores_order() {
        let a = tree_digest([("a.py", "1"), ("b.py", "2")]);
        let b = tree_digest([("b.py", "2"), ("a.py", "1")]);
        assert_eq!(a, b);
        assert_ne!(a, tree_digest([("a.py", "2"), ("b.py", "1")]));
    }
}
