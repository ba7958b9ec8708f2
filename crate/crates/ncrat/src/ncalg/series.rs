//! Truncated power series about zero.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::linalg::{invert, max_abs, INVERTIBILITY_REL_TOL};
use crate::ncalg::expr::{ExprNode, RationalExpr};
use crate::ncalg::poly::FreePolynomial;
use crate::ncalg::word::Word;
use crate::ncalg::NcalgError;
use crate::scalar::Scalar;

/// Word-indexed series coefficients up to a truncation degree. Absent
/// words have zero coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries<T: Scalar> {
    coeffs: BTreeMap<Word, DMatrix<T>>,
    shape: (usize, usize),
    num_vars: usize,
    max_degree: usize,
}

impl<T: Scalar> PowerSeries<T> {
    /// Series of an expression, computed by recursive series arithmetic
    /// with truncation at `max_degree`.
    pub fn of_expr(e: &RationalExpr<T>, max_degree: usize) -> Result<Self, NcalgError> {
        match e.node() {
            ExprNode::Poly(p) => Ok(PowerSeries::of_poly(p, max_degree)),
            ExprNode::Sum(terms) => {
                let mut out = PowerSeries::of_expr(&terms[0], max_degree)?;
                for t in &terms[1..] {
                    out = out.add(&PowerSeries::of_expr(t, max_degree)?)?;
                }
                Ok(out)
            }
            ExprNode::Product(factors) => {
                let mut out = PowerSeries::of_expr(&factors[0], max_degree)?;
                for f in &factors[1..] {
                    out = out.mul(&PowerSeries::of_expr(f, max_degree)?)?;
                }
                Ok(out)
            }
            ExprNode::Inverse(child) => PowerSeries::of_expr(child, max_degree)?.inverse(),
            ExprNode::Transpose(child) => Ok(PowerSeries::of_expr(child, max_degree)?.transpose()),
            ExprNode::ScalarMul(c, child) => Ok(PowerSeries::of_expr(child, max_degree)?.scale(*c)),
        }
    }

    /// Series of a polynomial: its own coefficients, truncated.
    pub fn of_poly(p: &FreePolynomial<T>, max_degree: usize) -> Self {
        let coeffs = p
            .coeffs()
            .iter()
            .filter(|(w, _)| w.len() <= max_degree)
            .map(|(w, c)| (w.clone(), c.clone()))
            .collect();
        PowerSeries {
            coeffs,
            shape: p.shape(),
            num_vars: p.num_vars(),
            max_degree,
        }
    }

    /// Builds a series from raw data (used by the realization module).
    pub fn from_coeffs(
        coeffs: BTreeMap<Word, DMatrix<T>>,
        shape: (usize, usize),
        num_vars: usize,
        max_degree: usize,
    ) -> Self {
        let coeffs = coeffs
            .into_iter()
            .filter(|(w, c)| w.len() <= max_degree && c.iter().any(|v| *v != T::zero()))
            .collect();
        PowerSeries {
            coeffs,
            shape,
            num_vars,
            max_degree,
        }
    }

    pub fn coefficient(&self, w: &Word) -> DMatrix<T> {
        self.coeffs
            .get(w)
            .cloned()
            .unwrap_or_else(|| DMatrix::zeros(self.shape.0, self.shape.1))
    }

    pub fn coeffs(&self) -> &BTreeMap<Word, DMatrix<T>> {
        &self.coeffs
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn add(&self, other: &Self) -> Result<Self, NcalgError> {
        if self.shape != other.shape {
            return Err(NcalgError::ShapeMismatch {
                context: "series sum".into(),
            });
        }
        let deg = self.max_degree.min(other.max_degree);
        let mut coeffs = BTreeMap::new();
        for (w, c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            if w.len() > deg {
                continue;
            }
            coeffs
                .entry(w.clone())
                .and_modify(|m: &mut DMatrix<T>| *m += c)
                .or_insert_with(|| c.clone());
        }
        Ok(PowerSeries::from_coeffs(
            coeffs,
            self.shape,
            self.num_vars.max(other.num_vars),
            deg,
        ))
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Result<Self, NcalgError> {
        if self.shape.1 != other.shape.0 {
            return Err(NcalgError::ShapeMismatch {
                context: "series product".into(),
            });
        }
        let deg = self.max_degree.min(other.max_degree);
        let mut coeffs: BTreeMap<Word, DMatrix<T>> = BTreeMap::new();
        for (w1, c1) in &self.coeffs {
            for (w2, c2) in &other.coeffs {
                if w1.len() + w2.len() > deg {
                    continue;
                }
                let w = w1.concat(w2);
                let prod = c1 * c2;
                coeffs
                    .entry(w)
                    .and_modify(|m| *m += &prod)
                    .or_insert(prod);
            }
        }
        Ok(PowerSeries::from_coeffs(
            coeffs,
            (self.shape.0, other.shape.1),
            self.num_vars.max(other.num_vars),
            deg,
        ))
    }

    pub fn scale(&self, c: T) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(w, m)| (w.clone(), m * c))
            .collect();
        PowerSeries::from_coeffs(coeffs, self.shape, self.num_vars, self.max_degree)
    }

    pub fn transpose(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(w, m)| (w.transpose(), m.transpose()))
            .collect();
        PowerSeries::from_coeffs(
            coeffs,
            (self.shape.1, self.shape.0),
            self.num_vars,
            self.max_degree,
        )
    }

    /// Series inversion: with `S = S_0 + higher`, the inverse satisfies
    /// `B_0 = S_0^{-1}` and
    /// `B_w = -S_0^{-1} Σ_{w = u v, |u| >= 1} S_u B_v`.
    pub fn inverse(&self) -> Result<Self, NcalgError> {
        if self.shape.0 != self.shape.1 {
            return Err(NcalgError::ShapeMismatch {
                context: "series inverse of non-square".into(),
            });
        }
        let s0 = self.coefficient(&Word::empty());
        let s0_inv = invert(&s0, INVERTIBILITY_REL_TOL).map_err(|s| {
            NcalgError::NotAnalyticAtZero {
                sigma_min: crate::scalar::to_f64(s),
            }
        })?;
        let mut out: BTreeMap<Word, DMatrix<T>> = BTreeMap::new();
        out.insert(Word::empty(), s0_inv.clone());
        let g = self.num_vars;
        for len in 1..=self.max_degree {
            for w in Word::all_of_length(g, len) {
                let letters = w.letters();
                let mut acc = DMatrix::zeros(self.shape.0, self.shape.1);
                // splits w = u v with |u| >= 1
                for cut in 1..=len {
                    let u = Word::from_letters(&letters[..cut], g).expect("validated letters");
                    let v = Word::from_letters(&letters[cut..], g).expect("validated letters");
                    if let Some(su) = self.coeffs.get(&u) {
                        if let Some(bv) = out.get(&v) {
                            acc += su * bv;
                        }
                    }
                }
                if acc.iter().any(|x| *x != T::zero()) {
                    out.insert(w, -(&s0_inv * acc));
                }
            }
        }
        Ok(PowerSeries::from_coeffs(
            out,
            self.shape,
            self.num_vars,
            self.max_degree,
        ))
    }

    /// Largest coefficient difference against another series, compared up
    /// to the smaller truncation degree.
    pub fn max_difference(&self, other: &Self) -> T {
        let deg = self.max_degree.min(other.max_degree);
        let mut max = T::zero();
        let words: std::collections::BTreeSet<&Word> =
            self.coeffs.keys().chain(other.coeffs.keys()).collect();
        for w in words {
            if w.len() > deg {
                continue;
            }
            let d = max_abs(&(self.coefficient(w) - other.coefficient(w)));
            if d > max {
                max = d;
            }
        }
        max
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::parser::parse_expression;

    #[test]
    fn geometric_series_of_inverse() {
        let e = parse_expression::<f64>("inv(1 - x1)", 1).unwrap();
        let s = PowerSeries::of_expr(&e, 5).unwrap();
        for len in 0..=5 {
            let w = Word::from_letters(&vec![1; len], 1).unwrap();
            assert!((s.coefficient(&w)[(0, 0)] - 1.0).abs() < 1e-12, "degree {}", len);
        }
    }

    #[test]
    fn product_series_is_cauchy_product() {
        let a = parse_expression::<f64>("1 + x1", 2).unwrap();
        let b = parse_expression::<f64>("1 + x2", 2).unwrap();
        let ab = parse_expression::<f64>("1 + x1 + x2 + x1*x2", 2).unwrap();
        let lhs = PowerSeries::of_expr(&a, 4)
            .unwrap()
            .mul(&PowerSeries::of_expr(&b, 4).unwrap())
            .unwrap();
        let rhs = PowerSeries::of_expr(&ab, 4).unwrap();
        assert_eq!(lhs.max_difference(&rhs), 0.0);
    }

    #[test]
    fn exr1r2_pair_is_series_equivalent() {
        let r1 = parse_expression::<f64>("x1*inv(1 - x2*x1)", 2).unwrap();
        let r2 = parse_expression::<f64>("inv(1 - x1*x2)*x1", 2).unwrap();
        let s1 = PowerSeries::of_expr(&r1, 6).unwrap();
        let s2 = PowerSeries::of_expr(&r2, 6).unwrap();
        assert!(s1.max_difference(&s2) < 1e-12);
    }
}
