//! A first-order PRF from SHA-256 in counter mode.

use pargames_core::prf::FirstOrderPrf;
use pargames_core::{Bits, Poly};
use sha2::{Digest, Sha256};

/// `F(k, x)`: the first `w(|k|)` bits of
/// `SHA-256(|k| ‖ k ‖ |x| ‖ x ‖ i)` for `i = 0, 1, ...`, lengths as 64-bit
/// big-endian integers, bit strings packed most significant bit first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sha256Prf {
    width: Poly,
}

impl Sha256Prf {
    pub fn new(width: Poly) -> Self {
        Sha256Prf { width }
    }
}

pub fn pack(bits: &Bits) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, b) in bits.iter().enumerate() {
        if b {
            out[i / 8] |= 0x80 >> (i % 8);
        }
    }
    out
}

impl FirstOrderPrf for Sha256Prf {
    fn width(&self) -> Poly {
        self.width.clone()
    }

    fn eval(&self, key: &Bits, input: &Bits) -> Bits {
        let mut prefix = Sha256::new();
        prefix.update((key.len() as u64).to_be_bytes());
        prefix.update(pack(key));
        prefix.update((input.len() as u64).to_be_bytes());
        prefix.update(pack(input));
        let len = self.width.eval_usize(key.len() as u64);
        let mut out = Bits::zeros(len);
        for (block, chunk) in (0..len).collect::<Vec<_>>().chunks(256).enumerate() {
            let digest = prefix
                .clone()
                .chain_update((block as u32).to_be_bytes())
                .finalize();
            for (k, &i) in chunk.iter().enumerate() {
                out.set(i, digest[k / 8] & (0x80 >> (k % 8)) != 0);
            }
        }
        out
    }
}
