//! Counter-based random streams.
//!
//! Every random draw in a search is addressed by
//! `(master_seed, purpose, index, sub_index)`. The address is expanded into a
//! ChaCha8 key and stream id, so any draw can be replayed independently of
//! worker scheduling or of where a resumed run picked up.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::IntMatrix;

/// Separates the independent streams drawn from one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Matrix = 0x6d61_7472_6978,
    Sample = 0x7361_6d70_6c65,
}

/// Fresh generator for one address.
pub fn stream(master_seed: u64, purpose: Purpose, index: u64, sub_index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
    key[16..24].copy_from_slice(&sub_index.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// `p` as a threshold on a uniform `u32`: an entry is 1 iff the draw is below it.
fn threshold(p: f64) -> u64 {
    ((p.clamp(0.0, 1.0) * 4_294_967_296.0).round() as u64).min(1 << 32)
}

/// The `index`-th random binary `n x n` matrix with iid Bernoulli(`p`) entries.
pub fn gen_matrix(master_seed: u64, index: u64, n: usize, p: f64) -> IntMatrix {
    let mut rng = stream(master_seed, Purpose::Matrix, index, 0);
    let t = threshold(p);
    let entries = (0..n * n)
        .map(|_| u64::from(u64::from(rng.random::<u32>()) < t))
        .collect();
    IntMatrix::from_flat(n, entries).expect("n >= 2")
}

/// Generator for sample `sample` of matrix `matrix_index`.
pub fn sample_stream(master_seed: u64, matrix_index: u64, sample: u64) -> ChaCha8Rng {
    stream(master_seed, Purpose::Sample, matrix_index, sample)
}
