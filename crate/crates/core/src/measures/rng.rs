use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Named child streams derived from one root seed. Keeping data, init,
/// latent, and shuffle draws on separate streams means e.g. changing the
/// iteration count never perturbs the dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Data,
    Init,
    Latent,
    Shuffle,
    Probe,
}

impl Stream {
    fn index(self) -> u64 {
        match self {
            Stream::Data => 0,
            Stream::Init => 1,
            Stream::Latent => 2,
            Stream::Shuffle => 3,
            Stream::Probe => 4,
        }
    }
}

/// Splittable deterministic RNG (ChaCha8, 256-bit state).
#[derive(Debug, Clone)]
pub struct RngState {
    root_seed: u64,
    inner: ChaCha8Rng,
}

impl RngState {
    pub fn from_seed(root_seed: u64) -> Self {
        RngState {
            root_seed,
            inner: ChaCha8Rng::seed_from_u64(root_seed),
        }
    }

    /// Child stream: same key, distinct ChaCha stream index.
    pub fn stream(root_seed: u64, stream: Stream) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(root_seed);
        inner.set_stream(stream.index() + 1);
        RngState { root_seed, inner }
    }

    pub fn root_seed(&self) -> u64 {
        self.root_seed
    }

    pub fn algorithm(&self) -> &'static str {
        "chacha8"
    }

    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.inner.gen_range(lo..hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.inner.gen_range(0..n)
    }

    /// Fisher-Yates permutation of `0..n`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.inner.gen_range(0..=i);
            perm.swap(i, j);
        }
        perm
    }
}

impl RngCore for RngState {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}
