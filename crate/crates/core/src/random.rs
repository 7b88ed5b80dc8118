//! Seeded randomness for cross-checks.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::catalog::WClassParams;
use crate::register::{c, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Haar-distributed unitary of dimension `dim` (QR of a complex Ginibre
/// matrix with the R-diagonal phases divided out).
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for col in 0..dim {
        let d = r[(col, col)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c(1.0, 0.0)
        };
        for row in 0..dim {
            q[(row, col)] *= phase;
        }
    }
    q
}

/// Uniform point of the open simplex `a, b, c > 0, a + b + c ≤ 1`.
pub fn random_wclass_params<R: Rng + ?Sized>(rng: &mut R) -> WClassParams {
    loop {
        // Four exponential draws normalized give a uniform point on the
        // 3-simplex (a, b, c, d).
        let e: [f64; 4] = std::array::from_fn(|_| -rng.gen_range(f64::EPSILON..1.0f64).ln());
        let total: f64 = e.iter().sum();
        if let Ok(p) = WClassParams::new(e[0] / total, e[1] / total, e[2] / total) {
            return p;
        }
    }
}
