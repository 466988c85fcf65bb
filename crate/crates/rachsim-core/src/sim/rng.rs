//! Deterministic stream derivation: one root seed expands into independent
//! per-replication, per-purpose generators, so replication merge order and
//! thread scheduling can never affect results.

use rand_chacha::ChaCha12Rng;
use rand_chacha::rand_core::SeedableRng;

/// What a derived stream is consumed for. Each purpose gets its own stream
/// so adding draws to one stage cannot shift another stage's sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamKind {
    Deploy,
    Arrivals,
    Preamble,
    Pdp,
    Fading,
    Harq,
}

impl StreamKind {
    fn salt(self) -> u64 {
        match self {
            StreamKind::Deploy => 0xD3_01,
            StreamKind::Arrivals => 0xD3_02,
            StreamKind::Preamble => 0xD3_03,
            StreamKind::Pdp => 0xD3_04,
            StreamKind::Fading => 0xD3_05,
            StreamKind::Harq => 0xD3_06,
        }
    }
}

/// Expands a root seed into per-(replication, purpose) ChaCha streams.
#[derive(Debug, Clone, Copy)]
pub struct RngFactory {
    root: u64,
}

impl RngFactory {
    pub fn new(root: u64) -> Self {
        RngFactory { root }
    }

    pub fn stream(&self, replication: u64, kind: StreamKind) -> ChaCha12Rng {
        let mut z = self.root;
        z = splitmix64(z ^ (replication.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
        z = splitmix64(z ^ kind.salt());
        ChaCha12Rng::seed_from_u64(z)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
