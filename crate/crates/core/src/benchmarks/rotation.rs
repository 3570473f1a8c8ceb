use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::rng::RngStream;

/// Dense square matrix applied as `y = M z`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    dims: usize,
    rows: Vec<Vec<f64>>,
}

impl Rotation {
    pub fn identity(dims: usize) -> Self {
        let rows = (0..dims)
            .map(|i| (0..dims).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self { dims, rows }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> crate::Result<Self> {
        let dims = rows.len();
        if dims == 0 || rows.iter().any(|r| r.len() != dims) {
            return Err(crate::Error::InvalidConfig("rotation must be a non-empty square matrix".into()));
        }
        Ok(Self { dims, rows })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().zip(z).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `max |M^T M - I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dims {
            for j in 0..self.dims {
                let dot: f64 = (0..self.dims).map(|k| self.rows[k][i] * self.rows[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    pub fn determinant(&self) -> f64 {
        DMatrix::from_fn(self.dims, self.dims, |i, j| self.rows[i][j]).determinant()
    }
}

/// Random orthogonal matrix: QR factorization of a standard Gaussian matrix
/// with the signs of `R`'s diagonal folded into `Q`, which makes the result
/// Haar-distributed.
pub fn random_rotation(dims: usize, rng: &mut RngStream) -> Rotation {
    assert!(dims >= 1, "rotation needs at least one dimension");
    let mut draws = Vec::with_capacity(dims * dims);
    for _ in 0..dims * dims {
        draws.push(rng.standard_normal());
    }
    let gaussian = DMatrix::from_row_slice(dims, dims, &draws);
    let qr = gaussian.qr();
    let (q, r) = (qr.q(), qr.r());
    let rows = (0..dims)
        .map(|i| {
            (0..dims)
                .map(|j| if r[(j, j)] < 0.0 { -q[(i, j)] } else { q[(i, j)] })
                .collect()
        })
        .collect();
    Rotation { dims, rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_dimensional_rotation_is_a_sign() {
        for seed in 0..20 {
            let m = random_rotation(1, &mut RngStream::new(seed));
            assert_eq!(m.rows()[0][0].abs(), 1.0);
        }
    }

    #[test]
    fn fixed_seed_repeats() {
        let a = random_rotation(6, &mut RngStream::new(12));
        let b = random_rotation(6, &mut RngStream::new(12));
        assert_eq!(a, b);
        assert_ne!(a, random_rotation(6, &mut RngStream::new(13)));
    }

    #[test]
    fn identity_apply() {
        assert_eq!(Rotation::identity(3).apply(&[1.0, -2.0, 3.0]), vec![1.0, -2.0, 3.0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn output_is_orthogonal(dims in 1usize..=50, seed in any::<u64>()) {
            let m = random_rotation(dims, &mut RngStream::new(seed));
            prop_assert!(m.orthogonality_error() < 1e-9);
            prop_assert!((m.determinant().abs() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn preserves_norm(seed in any::<u64>()) {
            let mut rng = RngStream::new(seed);
            let m = random_rotation(8, &mut rng);
            let z: Vec<f64> = (0..8).map(|_| rng.uniform(-100.0, 100.0)).collect();
            let y = m.apply(&z);
            let nz: f64 = z.iter().map(|v| v * v).sum();
            let ny: f64 = y.iter().map(|v| v * v).sum();
            prop_assert!((nz - ny).abs() <= 1e-9 * nz);
        }
    }
}
