#![allow(dead_code)]

use cglmp_core::{ComplexMatrix, DensityMatrix};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random full-rank state `G G† / Tr(G G†)` with Gaussian-ish entries.
pub fn random_density(d: usize, rng: &mut impl Rng) -> DensityMatrix {
    let n = d * d;
    let entries = (0..n * n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let g = ComplexMatrix::from_row_major(n, n, entries).unwrap();
    let gg = g.matmul(&cglmp_core::qmath::dagger(&g)).unwrap();
    let tr = cglmp_core::qmath::trace(&gg).unwrap().re;
    DensityMatrix::new(d, gg.scale_real(1.0 / tr)).unwrap()
}

/// Random `(q, ξ)` with `ξ ≤ √q`, keeping away from the `q → 0` corner.
pub fn random_coupled(rng: &mut impl Rng) -> (f64, f64) {
    let q: f64 = rng.gen_range(0.05..=1.0);
    let xi = rng.gen_range(0.0..=q.sqrt());
    (q, xi)
}
