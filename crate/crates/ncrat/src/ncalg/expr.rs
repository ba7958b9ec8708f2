//! Rational expression trees with formal-domain semantics.

use std::fmt;

use nalgebra::DMatrix;

use crate::linalg::{invert, smallest_singular_value, INVERTIBILITY_REL_TOL};
use crate::ncalg::poly::FreePolynomial;
use crate::ncalg::tuple::MatrixTuple;
use crate::ncalg::NcalgError;
use crate::scalar::{to_f64, Scalar};

/// Node of a rational expression.
#[derive(Clone, PartialEq, Debug)]
pub enum ExprNode<T: Scalar> {
    Poly(FreePolynomial<T>),
    Sum(Vec<RationalExpr<T>>),
    Product(Vec<RationalExpr<T>>),
    Inverse(Box<RationalExpr<T>>),
    Transpose(Box<RationalExpr<T>>),
    ScalarMul(T, Box<RationalExpr<T>>),
}

/// A free rational expression analytic at zero.
///
/// Every `Inverse` node is validated at construction: its child must be
/// square and invertible at the zero tuple. The value at zero is computed
/// recursively and cached, so a stored expression always has a
/// well-defined `value_at_zero`.
#[derive(Clone, PartialEq)]
pub struct RationalExpr<T: Scalar> {
    node: ExprNode<T>,
    shape: (usize, usize),
    num_vars: usize,
    value_at_zero: DMatrix<T>,
}

impl<T: Scalar> RationalExpr<T> {
    pub fn poly(p: FreePolynomial<T>) -> Self {
        let shape = p.shape();
        let num_vars = p.num_vars();
        let value_at_zero = p.constant_term();
        RationalExpr {
            node: ExprNode::Poly(p),
            shape,
            num_vars,
            value_at_zero,
        }
    }

    pub fn constant(c: DMatrix<T>, num_vars: usize) -> Self {
        RationalExpr::poly(FreePolynomial::constant(c, num_vars))
    }

    pub fn scalar(c: T, num_vars: usize) -> Self {
        RationalExpr::poly(FreePolynomial::scalar(c, num_vars))
    }

    pub fn variable(j: usize, num_vars: usize) -> Result<Self, NcalgError> {
        Ok(RationalExpr::poly(FreePolynomial::variable(j, num_vars)?))
    }

    /// Sum of terms. Adjacent polynomial children merge, so purely
    /// polynomial sums collapse to a single canonical `Poly` node.
    /// Scalar (1×1) polynomial terms broadcast to `c·I` against square
    /// operands.
    pub fn sum(terms: Vec<RationalExpr<T>>) -> Result<Self, NcalgError> {
        assert!(!terms.is_empty(), "sum needs at least one term");
        let target = terms
            .iter()
            .map(|t| t.shape)
            .find(|s| *s != (1, 1))
            .unwrap_or((1, 1));
        let mut acc: Vec<RationalExpr<T>> = Vec::new();
        for term in terms {
            let term = term.broadcast_to(target)?;
            if term.shape != target {
                return Err(NcalgError::ShapeMismatch {
                    context: "sum of mismatched shapes".into(),
                });
            }
            match (acc.last_mut().map(|t| &mut t.node), &term.node) {
                (Some(ExprNode::Poly(p)), ExprNode::Poly(q)) => {
                    let merged = p.add(q)?;
                    *acc.last_mut().unwrap() = RationalExpr::poly(merged);
                }
                _ => acc.push(term),
            }
        }
        if acc.len() == 1 {
            return Ok(acc.pop().unwrap());
        }
        let num_vars = acc.iter().map(|t| t.num_vars).max().unwrap();
        let mut value_at_zero = DMatrix::zeros(target.0, target.1);
        for t in &acc {
            value_at_zero += &t.value_at_zero;
        }
        Ok(RationalExpr {
            node: ExprNode::Sum(acc),
            shape: target,
            num_vars,
            value_at_zero,
        })
    }

    /// Product of factors, left to right. Adjacent polynomial factors
    /// merge; a scalar (1×1) constant factor against a non-scalar operand
    /// becomes a `ScalarMul` node.
    pub fn product(factors: Vec<RationalExpr<T>>) -> Result<Self, NcalgError> {
        assert!(!factors.is_empty(), "product needs at least one factor");
        let all_vars = factors.iter().map(|t| t.num_vars).max().unwrap();
        let mut acc: Vec<RationalExpr<T>> = Vec::new();
        let mut pending_scalar: Option<T> = None;
        for factor in factors {
            if let Some(c) = factor.as_scalar_constant() {
                pending_scalar = Some(pending_scalar.map_or(c, |p| p * c));
                continue;
            }
            match (acc.last_mut().map(|t| &mut t.node), &factor.node) {
                (Some(ExprNode::Poly(p)), ExprNode::Poly(q)) => {
                    let merged = p.mul(q)?;
                    *acc.last_mut().unwrap() = RationalExpr::poly(merged);
                }
                _ => {
                    if let Some(last) = acc.last() {
                        if last.shape.1 != factor.shape.0 {
                            return Err(NcalgError::ShapeMismatch {
                                context: "product of non-conformable shapes".into(),
                            });
                        }
                    }
                    acc.push(factor);
                }
            }
        }
        let base = match acc.len() {
            0 => RationalExpr::scalar(T::one(), all_vars),
            1 => acc.pop().unwrap(),
            _ => {
                let shape = (acc.first().unwrap().shape.0, acc.last().unwrap().shape.1);
                let num_vars = acc.iter().map(|t| t.num_vars).max().unwrap();
                let mut value_at_zero = acc[0].value_at_zero.clone();
                for t in &acc[1..] {
                    value_at_zero = value_at_zero * &t.value_at_zero;
                }
                RationalExpr {
                    node: ExprNode::Product(acc),
                    shape,
                    num_vars,
                    value_at_zero,
                }
            }
        };
        match pending_scalar {
            None => Ok(base),
            Some(c) => Ok(base.scalar_mul(c)),
        }
    }

    /// Inverse of a square expression invertible at zero; this is the
    /// analytic-at-zero check, performed eagerly.
    pub fn inverse(child: RationalExpr<T>) -> Result<Self, NcalgError> {
        if child.shape.0 != child.shape.1 {
            return Err(NcalgError::ShapeMismatch {
                context: "inverse of a non-square expression".into(),
            });
        }
        let value_at_zero = match invert(&child.value_at_zero, INVERTIBILITY_REL_TOL) {
            Ok(inv) => inv,
            Err(sigma_min) => {
                return Err(NcalgError::NotAnalyticAtZero {
                    sigma_min: to_f64(sigma_min),
                })
            }
        };
        let shape = child.shape;
        let num_vars = child.num_vars;
        Ok(RationalExpr {
            node: ExprNode::Inverse(Box::new(child)),
            shape,
            num_vars,
            value_at_zero,
        })
    }

    pub fn transpose_node(child: RationalExpr<T>) -> Self {
        let shape = (child.shape.1, child.shape.0);
        let num_vars = child.num_vars;
        let value_at_zero = child.value_at_zero.transpose();
        RationalExpr {
            node: ExprNode::Transpose(Box::new(child)),
            shape,
            num_vars,
            value_at_zero,
        }
    }

    pub fn scalar_mul(self, c: T) -> Self {
        if let ExprNode::Poly(p) = &self.node {
            return RationalExpr::poly(p.scale(c));
        }
        let shape = self.shape;
        let num_vars = self.num_vars;
        let value_at_zero = &self.value_at_zero * c;
        RationalExpr {
            node: ExprNode::ScalarMul(c, Box::new(self)),
            shape,
            num_vars,
            value_at_zero,
        }
    }

    /// Difference `self - other`.
    pub fn sub(self, other: RationalExpr<T>) -> Result<Self, NcalgError> {
        let negated = other.scalar_mul(-T::one());
        RationalExpr::sum(vec![self, negated])
    }

    /// Block matrix of expressions: entry (i, j) of shape (s1, s2) sits in
    /// block position (i, j) of the (rows·s1)×(cols·s2) result. Entries
    /// are embedded as `U_i · e_ij · V_j^T` with constant selector
    /// polynomials, so the result stays inside the node algebra.
    pub fn block_matrix(rows: Vec<Vec<RationalExpr<T>>>) -> Result<Self, NcalgError> {
        let r = rows.len();
        assert!(r > 0, "block matrix needs rows");
        let c = rows[0].len();
        if rows.iter().any(|row| row.len() != c) {
            return Err(NcalgError::ShapeMismatch {
                context: "matrix rows of unequal length".into(),
            });
        }
        let shape0 = rows[0][0].shape;
        let num_vars = rows
            .iter()
            .flat_map(|row| row.iter().map(|e| e.num_vars))
            .max()
            .unwrap();
        for row in &rows {
            for e in row {
                if e.shape != shape0 {
                    return Err(NcalgError::ShapeMismatch {
                        context: "matrix entries of mixed shapes".into(),
                    });
                }
            }
        }
        let (s1, s2) = shape0;
        if r == 1 && c == 1 {
            return Ok(rows.into_iter().next().unwrap().into_iter().next().unwrap());
        }
        let mut terms = Vec::with_capacity(r * c);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, e) in row.into_iter().enumerate() {
                // U_i: (r*s1)×s1 selector, V_j^T: s2×(c*s2) selector
                let mut u = DMatrix::<T>::zeros(r * s1, s1);
                u.view_mut((i * s1, 0), (s1, s1))
                    .copy_from(&DMatrix::identity(s1, s1));
                let mut vt = DMatrix::<T>::zeros(s2, c * s2);
                vt.view_mut((0, j * s2), (s2, s2))
                    .copy_from(&DMatrix::identity(s2, s2));
                let term = RationalExpr::product(vec![
                    RationalExpr::constant(u, num_vars),
                    e,
                    RationalExpr::constant(vt, num_vars),
                ])?;
                terms.push(term);
            }
        }
        RationalExpr::sum(terms)
    }

    fn broadcast_to(self, target: (usize, usize)) -> Result<Self, NcalgError> {
        if self.shape == target || target == (1, 1) || self.shape != (1, 1) {
            return Ok(self);
        }
        if target.0 != target.1 {
            return Err(NcalgError::ShapeMismatch {
                context: "scalar broadcast against non-square shape".into(),
            });
        }
        match &self.node {
            ExprNode::Poly(p) => match p.broadcast_scalar_to(target.0) {
                Some(q) => Ok(RationalExpr::poly(q)),
                None => Ok(self),
            },
            // non-polynomial scalar: multiply identity by it
            _ => RationalExpr::product(vec![
                self,
                RationalExpr::constant(DMatrix::identity(target.0, target.0), 1),
            ]),
        }
    }

    fn as_scalar_constant(&self) -> Option<T> {
        match &self.node {
            ExprNode::Poly(p) if p.shape() == (1, 1) && p.degree() == 0 => {
                Some(p.constant_term()[(0, 0)])
            }
            _ => None,
        }
    }

    pub fn node(&self) -> &ExprNode<T> {
        &self.node
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// The cached value at the zero tuple (size 1).
    pub fn value_at_zero(&self) -> &DMatrix<T> {
        &self.value_at_zero
    }

    /// Kronecker-lifted evaluation at a matrix tuple; errors when any
    /// inverse node meets a singular matrix, i.e. `X` lies outside the
    /// formal domain.
    pub fn eval(&self, x: &MatrixTuple<T>) -> Result<DMatrix<T>, NcalgError> {
        if x.num_vars() != self.num_vars {
            return Err(NcalgError::ArityMismatch {
                expected: self.num_vars,
                got: x.num_vars(),
            });
        }
        let mut inverse_counter = 0usize;
        self.eval_inner(x, &mut inverse_counter)
    }

    fn eval_inner(&self, x: &MatrixTuple<T>, inv_id: &mut usize) -> Result<DMatrix<T>, NcalgError> {
        match &self.node {
            ExprNode::Poly(p) => p.eval(x),
            ExprNode::Sum(terms) => {
                let mut out = terms[0].eval_inner(x, inv_id)?;
                for t in &terms[1..] {
                    out += t.eval_inner(x, inv_id)?;
                }
                Ok(out)
            }
            ExprNode::Product(factors) => {
                let mut out = factors[0].eval_inner(x, inv_id)?;
                for f in &factors[1..] {
                    out = out * f.eval_inner(x, inv_id)?;
                }
                Ok(out)
            }
            ExprNode::Inverse(child) => {
                let node_id = *inv_id;
                *inv_id += 1;
                let v = child.eval_inner(x, inv_id)?;
                invert(&v, INVERTIBILITY_REL_TOL).map_err(|sigma_min| {
                    NcalgError::OutsideFormalDomain {
                        node_id,
                        sigma_min: to_f64(sigma_min),
                    }
                })
            }
            ExprNode::Transpose(child) => Ok(child.eval_inner(x, inv_id)?.transpose()),
            ExprNode::ScalarMul(c, child) => Ok(child.eval_inner(x, inv_id)? * *c),
        }
    }

    /// Whether `x` lies in the formal domain (every inverse invertible).
    pub fn in_formal_domain(&self, x: &MatrixTuple<T>) -> bool {
        match self.eval(x) {
            Ok(_) => true,
            Err(NcalgError::OutsideFormalDomain { .. }) => false,
            Err(_) => false,
        }
    }
}

/// Transpose of an expression: for symmetric tuples,
/// `transpose_expr(e)(X) = e(X)^T`. Products reverse, inverses and
/// transposes commute with the involution, and a `Transpose` node
/// unwraps, so applying this twice returns a structurally equal tree.
pub fn transpose_expr<T: Scalar>(e: &RationalExpr<T>) -> RationalExpr<T> {
    match e.node() {
        ExprNode::Poly(p) => RationalExpr::poly(p.transpose()),
        ExprNode::Sum(terms) => {
            RationalExpr::sum(terms.iter().map(transpose_expr).collect()).expect("shapes transpose")
        }
        ExprNode::Product(factors) => {
            let rev: Vec<_> = factors.iter().rev().map(transpose_expr).collect();
            RationalExpr::product(rev).expect("shapes transpose")
        }
        ExprNode::Inverse(child) => {
            RationalExpr::inverse(transpose_expr(child)).expect("transpose preserves analyticity")
        }
        ExprNode::Transpose(child) => (**child).clone(),
        ExprNode::ScalarMul(c, child) => transpose_expr(child).scalar_mul(*c),
    }
}

impl<T: Scalar> fmt::Display for RationalExpr<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.node {
            ExprNode::Poly(p) => {
                if p.shape() == (1, 1) {
                    let mut first = true;
                    if p.coeffs().is_empty() {
                        return write!(f, "0");
                    }
                    for (w, c) in p.coeffs() {
                        if !first {
                            write!(f, " + ")?;
                        }
                        if w.is_empty() {
                            write!(f, "{:?}", to_f64(c[(0, 0)]))?;
                        } else if c[(0, 0)] == T::one() {
                            write!(f, "{}", w)?;
                        } else {
                            write!(f, "{:?}*{}", to_f64(c[(0, 0)]), w)?;
                        }
                        first = false;
                    }
                    Ok(())
                } else {
                    write!(f, "poly[{}x{}]", p.shape().0, p.shape().1)
                }
            }
            ExprNode::Sum(terms) => {
                write!(f, "(")?;
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{}", t)?;
                }
                write!(f, ")")
            }
            ExprNode::Product(factors) => {
                for (i, t) in factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{}", t)?;
                }
                Ok(())
            }
            ExprNode::Inverse(c) => write!(f, "inv({})", c),
            ExprNode::Transpose(c) => write!(f, "T({})", c),
            ExprNode::ScalarMul(s, c) => write!(f, "{:?}*{}", to_f64(*s), c),
        }
    }
}

impl<T: Scalar> fmt::Debug for RationalExpr<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}
