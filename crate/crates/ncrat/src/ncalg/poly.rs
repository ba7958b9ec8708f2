//! Free matrix-valued polynomials `p = Σ P_w w`.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;

use crate::ncalg::tuple::MatrixTuple;
use crate::ncalg::word::Word;
use crate::ncalg::NcalgError;
use crate::scalar::Scalar;

/// A free polynomial with real k1×k2 matrix coefficients in g variables.
///
/// Coefficient maps are canonical: words are ordered by (length, lex) and
/// coefficient matrices that are exactly zero are dropped (no epsilon
/// pruning).
#[derive(Clone, PartialEq)]
pub struct FreePolynomial<T: Scalar> {
    coeffs: BTreeMap<Word, DMatrix<T>>,
    shape: (usize, usize),
    num_vars: usize,
}

impl<T: Scalar> FreePolynomial<T> {
    /// Builds a polynomial from a coefficient map, validating shapes and
    /// letter ranges against `g` and dropping exact-zero coefficients.
    pub fn new(
        coeffs: BTreeMap<Word, DMatrix<T>>,
        shape: (usize, usize),
        num_vars: usize,
    ) -> Result<Self, NcalgError> {
        for (w, m) in &coeffs {
            if m.shape() != shape {
                return Err(NcalgError::ShapeMismatch {
                    context: format!(
                        "coefficient of {} has shape {}x{}, expected {}x{}",
                        w,
                        m.nrows(),
                        m.ncols(),
                        shape.0,
                        shape.1
                    ),
                });
            }
            if w.max_letter() > num_vars {
                return Err(NcalgError::ArityMismatch {
                    expected: num_vars,
                    got: w.max_letter(),
                });
            }
        }
        let coeffs = coeffs
            .into_iter()
            .filter(|(_, m)| m.iter().any(|v| *v != T::zero()))
            .collect();
        Ok(FreePolynomial {
            coeffs,
            shape,
            num_vars,
        })
    }

    /// The zero polynomial.
    pub fn zero(shape: (usize, usize), num_vars: usize) -> Self {
        FreePolynomial {
            coeffs: BTreeMap::new(),
            shape,
            num_vars,
        }
    }

    /// Constant polynomial with value `c`.
    pub fn constant(c: DMatrix<T>, num_vars: usize) -> Self {
        let shape = c.shape();
        let mut coeffs = BTreeMap::new();
        if c.iter().any(|v| *v != T::zero()) {
            coeffs.insert(Word::empty(), c);
        }
        FreePolynomial {
            coeffs,
            shape,
            num_vars,
        }
    }

    /// Scalar constant (1×1).
    pub fn scalar(c: T, num_vars: usize) -> Self {
        FreePolynomial::constant(DMatrix::from_element(1, 1, c), num_vars)
    }

    /// The variable `x_j` as a scalar (1×1) polynomial, 1-based index.
    pub fn variable(j: usize, num_vars: usize) -> Result<Self, NcalgError> {
        if j < 1 || j > num_vars {
            return Err(NcalgError::ArityMismatch {
                expected: num_vars,
                got: j,
            });
        }
        let mut coeffs = BTreeMap::new();
        coeffs.insert(Word::letter(j), DMatrix::from_element(1, 1, T::one()));
        Ok(FreePolynomial {
            coeffs,
            shape: (1, 1),
            num_vars,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn coeffs(&self) -> &BTreeMap<Word, DMatrix<T>> {
        &self.coeffs
    }

    /// Coefficient of `w` (zero matrix when absent).
    pub fn coefficient(&self, w: &Word) -> DMatrix<T> {
        self.coeffs
            .get(w)
            .cloned()
            .unwrap_or_else(|| DMatrix::zeros(self.shape.0, self.shape.1))
    }

    /// The value at zero: the empty-word coefficient.
    pub fn constant_term(&self) -> DMatrix<T> {
        self.coefficient(&Word::empty())
    }

    /// Largest word length with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    pub fn is_square(&self) -> bool {
        self.shape.0 == self.shape.1
    }

    /// Kronecker-lifted evaluation `p(X) = Σ P_w ⊗ X^w`.
    pub fn eval(&self, x: &MatrixTuple<T>) -> Result<DMatrix<T>, NcalgError> {
        if x.num_vars() != self.num_vars {
            return Err(NcalgError::ArityMismatch {
                expected: self.num_vars,
                got: x.num_vars(),
            });
        }
        let n = x.size();
        let mut out = DMatrix::zeros(self.shape.0 * n, self.shape.1 * n);
        for (w, c) in &self.coeffs {
            out += c.kronecker(&x.eval_word(w));
        }
        Ok(out)
    }

    /// Transpose `p^T = Σ P_w^T w^T`.
    pub fn transpose(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(w, c)| (w.transpose(), c.transpose()))
            .collect();
        FreePolynomial {
            coeffs,
            shape: (self.shape.1, self.shape.0),
            num_vars: self.num_vars,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, NcalgError> {
        if self.shape != other.shape {
            return Err(NcalgError::ShapeMismatch {
                context: "polynomial sum".into(),
            });
        }
        let mut coeffs = self.coeffs.clone();
        for (w, c) in &other.coeffs {
            coeffs
                .entry(w.clone())
                .and_modify(|m| *m += c)
                .or_insert_with(|| c.clone());
        }
        FreePolynomial::new(coeffs, self.shape, self.num_vars.max(other.num_vars))
    }

    /// Cauchy product; shapes must be conformable.
    pub fn mul(&self, other: &Self) -> Result<Self, NcalgError> {
        if self.shape.1 != other.shape.0 {
            return Err(NcalgError::ShapeMismatch {
                context: "polynomial product".into(),
            });
        }
        let shape = (self.shape.0, other.shape.1);
        let mut coeffs: BTreeMap<Word, DMatrix<T>> = BTreeMap::new();
        for (w1, c1) in &self.coeffs {
            for (w2, c2) in &other.coeffs {
                let w = w1.concat(w2);
                let prod = c1 * c2;
                coeffs
                    .entry(w)
                    .and_modify(|m| *m += &prod)
                    .or_insert(prod);
            }
        }
        FreePolynomial::new(coeffs, shape, self.num_vars.max(other.num_vars))
    }

    pub fn scale(&self, c: T) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(w, m)| (w.clone(), m * c))
            .collect();
        FreePolynomial::new(coeffs, self.shape, self.num_vars).expect("shapes preserved")
    }

    pub fn neg(&self) -> Self {
        self.scale(-T::one())
    }

    /// Reinterprets a 1×1 polynomial as `c ⊗ I_k`, used when a scalar
    /// literal meets a k×k operand.
    pub fn broadcast_scalar_to(&self, k: usize) -> Option<Self> {
        if self.shape != (1, 1) {
            return None;
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(w, m)| (w.clone(), DMatrix::identity(k, k) * m[(0, 0)]))
            .collect();
        Some(FreePolynomial {
            coeffs,
            shape: (k, k),
            num_vars: self.num_vars,
        })
    }
}

impl<T: Scalar> fmt::Debug for FreePolynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FreePolynomial({} terms, shape {:?})",
            self.coeffs.len(),
            self.shape
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use proptest::prelude::*;

    fn x(j: usize) -> FreePolynomial<f64> {
        FreePolynomial::variable(j, 2).unwrap()
    }

    #[test]
    fn like_terms_collect() {
        let p = x(1).add(&x(1)).unwrap();
        assert_eq!(p.coeffs().len(), 1);
        assert_eq!(p.coefficient(&Word::letter(1))[(0, 0)], 2.0);
    }

    #[test]
    fn zero_coefficients_drop_exactly() {
        let p = x(1).add(&x(1).neg()).unwrap();
        assert!(p.coeffs().is_empty());
    }

    #[test]
    fn eval_at_zero_tuple_is_kron_of_constant() {
        let p = x(1).mul(&x(2)).unwrap().add(&FreePolynomial::scalar(3.0, 2)).unwrap();
        let z = MatrixTuple::zero(2, 3);
        let v = p.eval(&z).unwrap();
        let expected = p.constant_term().kronecker(&nalgebra::DMatrix::identity(3, 3));
        assert!(max_abs(&(v - expected)) == 0.0);
    }

    #[test]
    fn transpose_reverses_words() {
        let p = x(1).mul(&x(2)).unwrap();
        let pt = p.transpose();
        let w21 = Word::from_letters(&[2, 1], 2).unwrap();
        assert_eq!(pt.coefficient(&w21)[(0, 0)], 1.0);
    }

    proptest! {
        #[test]
        fn eval_is_multiplicative(a in -1.0..1.0f64, b in -1.0..1.0f64, c in -1.0..1.0f64) {
            let p = x(1).scale(a).add(&FreePolynomial::scalar(b, 2)).unwrap();
            let q = x(2).scale(c).add(&x(1)).unwrap();
            let x_t = MatrixTuple::scalars(&[0.3, -0.7]);
            let lhs = p.mul(&q).unwrap().eval(&x_t).unwrap();
            let rhs = p.eval(&x_t).unwrap() * q.eval(&x_t).unwrap();
            prop_assert!(max_abs(&(lhs - rhs)) < 1e-12);
        }
    }
}
