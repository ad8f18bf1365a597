//! Deterministic seed derivation for replica ensembles.
//!
//! Replica `r` of a labelled task draws its RNG from
//! `SHA-256(master_seed_le || label_len_le || label || r_le)`. The scheme is
//! frozen: changing it invalidates archived run manifests. Because every
//! replica owns an independent generator, merged ensemble statistics are
//! identical for any worker count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// 32-byte RNG seed for replica `replica` of the task `label`.
pub fn derive_seed(master: u64, label: &str, replica: u64) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update((label.len() as u64).to_le_bytes());
    h.update(label.as_bytes());
    h.update(replica.to_le_bytes());
    h.finalize().into()
}

/// ChaCha8 generator for replica `replica` of the task `label`.
pub fn rng_for(master: u64, label: &str, replica: u64) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(derive_seed(master, label, replica))
}

/// Derives a per-replica 64-bit seed (first 8 bytes of the stream seed,
/// little endian), for handing to simulators that take a plain integer.
pub fn derive_u64(master: u64, label: &str, replica: u64) -> u64 {
    let bytes = derive_seed(master, label, replica);
    u64::from_le_bytes(bytes[..8].try_into().expect("8 bytes"))
}

/// Runs `f` inside a rayon pool with exactly `workers` threads
/// (`workers == 0` means the global default pool).
pub fn with_worker_pool<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    if workers == 0 {
        f()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("failed to build worker pool")
            .install(f)
    }
}
