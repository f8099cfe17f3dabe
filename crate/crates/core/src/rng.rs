//! Seeding contract: a master seed plus a stream key derive independent,
//! reproducible generators, so results never depend on worker scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

/// Operation identifiers that partition the stream space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum StreamOp {
    Lyapunov = 1,
    KEstimate = 2,
    DirectionInit = 3,
    Resample = 4,
    Backward = 5,
    Forward = 6,
    Stationarity = 7,
    Mellin = 8,
    AtomDraws = 9,
    Residual = 10,
    Oracle = 11,
    Chi = 12,
}

pub type StreamRng = ChaCha8Rng;

impl Seed {
    /// Generator for `(op, major, minor)`; `major` < 2^28, `minor` < 2^28.
    pub fn stream(self, op: StreamOp, major: u64, minor: u64) -> StreamRng {
        debug_assert!(major < (1 << 28) && minor < (1 << 28));
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(((op as u64) << 56) | ((major & 0x0fff_ffff) << 28) | (minor & 0x0fff_ffff));
        rng
    }

    /// Child seed, used when an operation hands a seed to a sub-operation.
    pub fn derive(self, tag: u64) -> Seed {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0 ^ 0x9e37_79b9_7f4a_7c15);
        rng.set_stream(tag);
        Seed(rng.random())
    }
}

pub fn uniform<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::of(rng.random::<f64>())
}

/// Uniformly distributed unit vector of dimension `d`.
pub fn unit_vector<T: Real, R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<T> {
    use rand_distr::{Distribution, StandardNormal};
    loop {
        let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|x| T::of(x / n)).collect();
        }
    }
}
