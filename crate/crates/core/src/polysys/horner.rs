use rug::Rational;

use super::{PolySystem, Polynomial};
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalMatrix, IntervalVector, Precision};

#[derive(Clone, Debug)]
enum Node {
    Const(Interval),
    /// Sparse Horner scheme in one variable; exponents strictly decreasing.
    Var { var: usize, parts: Vec<(u32, Node)> },
}

impl Node {
    fn build(terms: &[(&[u32], &Rational)], var: usize, prec: Precision) -> Node {
        if terms.is_empty() {
            return Node::Const(Interval::zero(prec));
        }
        let nvars = terms[0].0.len();
        if var == nvars {
            let sum = terms
                .iter()
                .fold(Rational::new(), |acc, (_, c)| acc + *c);
            return Node::Const(Interval::from_rational(&sum, prec));
        }
        let mut exps: Vec<u32> = terms.iter().map(|(e, _)| e[var]).collect();
        exps.sort_unstable_by(|a, b| b.cmp(a));
        exps.dedup();
        if exps == [0] {
            return Node::build(terms, var + 1, prec);
        }
        let parts = exps
            .into_iter()
            .map(|k| {
                let sub: Vec<_> = terms.iter().filter(|(e, _)| e[var] == k).cloned().collect();
                (k, Node::build(&sub, var + 1, prec))
            })
            .collect();
        Node::Var { var, parts }
    }

    fn eval(&self, x: &[Interval]) -> Interval {
        match self {
            Node::Const(c) => c.clone(),
            Node::Var { var, parts } => {
                let xv = &x[*var];
                let mut acc = parts[0].1.eval(x);
                let mut prev = parts[0].0;
                for (k, node) in &parts[1..] {
                    acc = acc * xv.powi(prev - k) + node.eval(x);
                    prev = *k;
                }
                if prev > 0 {
                    acc = acc * xv.powi(prev);
                }
                acc
            }
        }
    }
}

/// A polynomial prepared for repeated interval evaluation at one precision.
#[derive(Clone, Debug)]
pub struct CompiledPolynomial {
    nvars: usize,
    root: Node,
}

impl CompiledPolynomial {
    pub fn new(p: &Polynomial, prec: Precision) -> Self {
        let terms: Vec<_> = p.terms().collect();
        CompiledPolynomial {
            nvars: p.nvars(),
            root: Node::build(&terms, 0, prec),
        }
    }

    pub fn eval(&self, x: &IntervalVector) -> Result<Interval> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: x.len(),
            });
        }
        Ok(self.root.eval(x.as_slice()))
    }
}

/// Interval evaluator of a polynomial system and its Jacobian.
#[derive(Clone, Debug)]
pub struct CompiledSystem {
    system: PolySystem,
    prec: Precision,
    polys: Vec<CompiledPolynomial>,
    jac: Vec<Vec<CompiledPolynomial>>,
}

impl CompiledSystem {
    pub fn new(system: &PolySystem, prec: Precision) -> Self {
        let polys = system
            .polys()
            .iter()
            .map(|p| CompiledPolynomial::new(p, prec))
            .collect();
        let jac = system
            .jacobian_polys()
            .iter()
            .map(|row| row.iter().map(|p| CompiledPolynomial::new(p, prec)).collect())
            .collect();
        CompiledSystem {
            system: system.clone(),
            prec,
            polys,
            jac,
        }
    }

    pub fn system(&self) -> &PolySystem {
        &self.system
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn nvars(&self) -> usize {
        self.system.nvars()
    }

    pub fn neqs(&self) -> usize {
        self.polys.len()
    }

    pub fn eval(&self, x: &IntervalVector) -> Result<IntervalVector> {
        self.polys.iter().map(|p| p.eval(x)).collect()
    }

    pub fn jacobian(&self, x: &IntervalVector) -> Result<IntervalMatrix> {
        let rows = self
            .jac
            .iter()
            .map(|row| row.iter().map(|p| p.eval(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        IntervalMatrix::from_rows(rows)
    }
}
