//! Evaluation points: g-tuples of square matrices, and random sampling
//! from free neighborhoods of zero.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{block_diag, max_symmetric_eigenvalue};
use crate::ncalg::word::Word;
use crate::ncalg::NcalgError;
use crate::scalar::{real, Scalar};

/// A g-tuple `X = (X_1, ..., X_g)` of real n×n matrices.
///
/// With the `symmetric` flag set, every entry is symmetrized on
/// construction so that `X_j == X_j^T` holds bit-exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTuple<T: Scalar> {
    entries: Vec<DMatrix<T>>,
    symmetric: bool,
}

impl<T: Scalar> MatrixTuple<T> {
    /// General (not necessarily symmetric) tuple.
    pub fn new(entries: Vec<DMatrix<T>>) -> Result<Self, NcalgError> {
        Self::build(entries, false)
    }

    /// Symmetric tuple; entries are replaced by `(X + X^T)/2`.
    pub fn symmetric(entries: Vec<DMatrix<T>>) -> Result<Self, NcalgError> {
        Self::build(entries, true)
    }

    fn build(mut entries: Vec<DMatrix<T>>, symmetric: bool) -> Result<Self, NcalgError> {
        let n = entries.first().map(|m| m.nrows()).unwrap_or(0);
        for m in &entries {
            if m.nrows() != n || m.ncols() != n {
                return Err(NcalgError::ShapeMismatch {
                    context: "matrix tuple entries must be square of one size".into(),
                });
            }
        }
        if symmetric {
            let half = real::<T>(0.5);
            for m in entries.iter_mut() {
                let s = (&*m + m.transpose()) * half;
                *m = s;
            }
        }
        Ok(MatrixTuple { entries, symmetric })
    }

    /// The zero tuple `Z_n` of `g` zero matrices of size n.
    pub fn zero(g: usize, n: usize) -> Self {
        MatrixTuple {
            entries: (0..g).map(|_| DMatrix::zeros(n, n)).collect(),
            symmetric: true,
        }
    }

    /// Scalar tuple from plain numbers (size n = 1).
    pub fn scalars(values: &[f64]) -> Self {
        MatrixTuple {
            entries: values
                .iter()
                .map(|v| DMatrix::from_element(1, 1, real::<T>(*v)))
                .collect(),
            symmetric: true,
        }
    }

    pub fn entries(&self) -> &[DMatrix<T>] {
        &self.entries
    }

    pub fn entry(&self, j: usize) -> &DMatrix<T> {
        &self.entries[j]
    }

    /// Number of variables g.
    pub fn num_vars(&self) -> usize {
        self.entries.len()
    }

    /// Matrix size n.
    pub fn size(&self) -> usize {
        self.entries.first().map(|m| m.nrows()).unwrap_or(0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Evaluates the word `w` at this tuple: `X^w = X_{i1} ... X_{ik}`.
    pub fn eval_word(&self, w: &Word) -> DMatrix<T> {
        let n = self.size();
        let mut out = DMatrix::identity(n, n);
        for &j in w.letters() {
            out = out * &self.entries[j - 1];
        }
        out
    }

    /// Entrywise linear combination `self + t * dir`.
    pub fn add_scaled(&self, t: T, dir: &MatrixTuple<T>) -> Self {
        assert_eq!(self.num_vars(), dir.num_vars());
        assert_eq!(self.size(), dir.size());
        MatrixTuple {
            entries: self
                .entries
                .iter()
                .zip(dir.entries.iter())
                .map(|(a, b)| a + b * t)
                .collect(),
            symmetric: self.symmetric && dir.symmetric,
        }
    }

    /// Entrywise scaling `t * self`.
    pub fn scale(&self, t: T) -> Self {
        MatrixTuple {
            entries: self.entries.iter().map(|m| m * t).collect(),
            symmetric: self.symmetric,
        }
    }

    /// Direct sum `X ⊕ Y`, entrywise block diagonal.
    pub fn direct_sum(&self, other: &MatrixTuple<T>) -> Self {
        assert_eq!(self.num_vars(), other.num_vars());
        MatrixTuple {
            entries: self
                .entries
                .iter()
                .zip(other.entries.iter())
                .map(|(a, b)| block_diag(a, b))
                .collect(),
            symmetric: self.symmetric && other.symmetric,
        }
    }

    /// Largest eigenvalue of `Σ_j X_j^2` (symmetric tuples).
    pub fn sum_of_squares_max_eig(&self) -> T {
        let n = self.size();
        let mut sum = DMatrix::zeros(n, n);
        for m in &self.entries {
            sum += m * m;
        }
        max_symmetric_eigenvalue(&sum)
    }
}

/// Sampling plan for random symmetric tuples inside a free
/// ε-neighborhood of zero: every sample `X` satisfies `Σ X_j^2 ≺ ε I`.
#[derive(Clone, Debug)]
pub struct SamplingBox {
    /// Strict bound on the largest eigenvalue of `Σ X_j^2`.
    pub epsilon: f64,
    /// Matrix sizes to draw from (cycled through).
    pub sizes: Vec<usize>,
    /// Total number of samples.
    pub count: usize,
    /// RNG seed; samples are deterministic given the seed.
    pub seed: u64,
    /// Truncation degree used when the plan drives a series comparison.
    pub series_degree: usize,
}

impl SamplingBox {
    pub fn new(epsilon: f64, sizes: Vec<usize>, count: usize, seed: u64) -> Self {
        assert!(epsilon > 0.0, "epsilon must be positive");
        assert!(!sizes.is_empty(), "at least one size");
        SamplingBox {
            epsilon,
            sizes,
            count,
            seed,
            series_degree: 6,
        }
    }

    /// Default plan: sizes 1..=4, 0.1-neighborhood.
    pub fn default_plan(seed: u64) -> Self {
        SamplingBox::new(0.1, vec![1, 2, 3, 4], 60, seed)
    }

    /// Draws all samples. Size cycles through `sizes`; each sample is a
    /// symmetric tuple scaled strictly inside the ε-ball.
    pub fn samples<T: Scalar>(&self, g: usize) -> Vec<MatrixTuple<T>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::with_capacity(self.count);
        for i in 0..self.count {
            let n = self.sizes[i % self.sizes.len()];
            out.push(random_symmetric_tuple_in_ball(
                &mut rng,
                g,
                n,
                self.epsilon,
            ));
        }
        out
    }
}

/// One random symmetric tuple with `Σ X_j^2 ≺ eps I_n`, scaled to a random
/// radius strictly inside the ball.
pub fn random_symmetric_tuple_in_ball<T: Scalar, R: Rng>(
    rng: &mut R,
    g: usize,
    n: usize,
    eps: f64,
) -> MatrixTuple<T> {
    let raw = random_symmetric_tuple::<T, R>(rng, g, n);
    let lam = raw.sum_of_squares_max_eig();
    let rho: f64 = rng.random_range(0.05..0.95);
    let lam = if lam > T::zero() { lam } else { T::one() };
    let factor = (real::<T>(eps * rho) / lam).sqrt();
    raw.scale(factor)
}

/// Random symmetric tuple with entries uniform in [-1, 1] before
/// symmetrization.
pub fn random_symmetric_tuple<T: Scalar, R: Rng>(rng: &mut R, g: usize, n: usize) -> MatrixTuple<T> {
    let entries: Vec<DMatrix<T>> = (0..g)
        .map(|_| DMatrix::from_fn(n, n, |_, _| real::<T>(rng.random_range(-1.0..1.0))))
        .collect();
    MatrixTuple::symmetric(entries).expect("square entries")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrization_is_exact() {
        let m = DMatrix::<f64>::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let x = MatrixTuple::symmetric(vec![m]).unwrap();
        let e = x.entry(0);
        assert_eq!(e[(0, 1)].to_bits(), e[(1, 0)].to_bits());
    }

    #[test]
    fn samples_stay_inside_ball() {
        let plan = SamplingBox::new(0.1, vec![1, 2, 3], 30, 42);
        for x in plan.samples::<f64>(2) {
            assert!(x.sum_of_squares_max_eig() < 0.1);
        }
    }

    #[test]
    fn samples_are_seed_deterministic() {
        let plan = SamplingBox::new(0.1, vec![2], 5, 7);
        let a = plan.samples::<f64>(2);
        let b = plan.samples::<f64>(2);
        assert_eq!(a, b);
    }

    #[test]
    fn word_evaluation_multiplies_in_order() {
        let x1 = DMatrix::<f64>::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let x2 = DMatrix::<f64>::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let x = MatrixTuple::symmetric(vec![x1.clone(), x2.clone()]).unwrap();
        let w = Word::from_letters(&[1, 2], 2).unwrap();
        assert_eq!(x.eval_word(&w), x1 * x2);
    }
}
