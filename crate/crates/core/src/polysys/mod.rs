//! Sparse multivariate polynomials over the rationals and the square and
//! rotated systems built from them.

mod horner;
mod maps;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

use rug::ops::Pow;
use rug::Rational;

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalMatrix, IntervalVector, Precision};

pub use horner::{CompiledPolynomial, CompiledSystem};
pub use maps::{CurveMap, RotatedSystem, SlicedSystem};
pub use parse::{parse_polynomial, parse_rational};

/// Polynomial in `nvars` variables with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: impl Into<Rational>) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c.into());
        p
    }

    /// The coordinate function `X_i` (zero-based).
    pub fn var(i: usize, nvars: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range");
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Rational::from(1));
        p
    }

    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, Rational)>,
    ) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_default();
        *entry += c;
        if *entry == 0 {
            self.terms.remove(&e);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Degree in variable `i`.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    /// Constant value if the polynomial has no variable terms.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::new()),
            1 => {
                let (e, c) = self.terms.iter().next()?;
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn check_vars(&self, other: &Polynomial) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(&Rational::from(-1))
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if *c == 0 {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.clone(), Rational::from(v * c)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_vars(other)?;
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, Rational::from(c1 * c2));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut out = Self::constant(self.nvars, 1);
        for _ in 0..k {
            out = out.mul(self).expect("same variable count");
        }
        out
    }

    /// Partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Polynomial {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[i] -= 1;
            out.add_term(d, Rational::from(c * e[i]));
        }
        out
    }

    /// Exact evaluation at a rational point.
    pub fn eval_rational(&self, x: &[Rational]) -> Result<Rational> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: x.len(),
            });
        }
        let mut sum = Rational::new();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= Rational::from(xi.pow(k));
                }
            }
            sum += t;
        }
        Ok(sum)
    }

    /// Natural interval extension in Horner form.
    pub fn eval_interval(&self, x: &IntervalVector) -> Result<Interval> {
        CompiledPolynomial::new(self, x.precision()).eval(x)
    }

    /// Embeds into a ring with `extra` more variables appended.
    pub fn extend_vars(&self, extra: usize) -> Polynomial {
        Polynomial {
            nvars: self.nvars + extra,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e = e.clone();
                    e.resize(self.nvars + extra, 0);
                    (e, c.clone())
                })
                .collect(),
        }
    }

    /// Substitutes polynomials (all in a common ring) for every variable.
    pub fn compose(&self, args: &[Polynomial]) -> Result<Polynomial> {
        if args.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: args.len(),
            });
        }
        let target = args.first().map_or(0, Polynomial::nvars);
        let mut out = Polynomial::zero(target);
        for (e, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (a, &k) in args.iter().zip(e) {
                if k > 0 {
                    t = t.mul(&a.pow(k))?;
                }
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }

    /// Renders with the given variable names.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        PolyDisplay { poly: self, names }
    }
}

struct PolyDisplay<'a> {
    poly: &'a Polynomial,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        // highest total degree first
        let mut terms: Vec<_> = self.poly.terms.iter().collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then(b.0.cmp(a.0))
        });
        for (k, (e, c)) in terms.into_iter().enumerate() {
            let negative = *c < 0;
            let mag = Rational::from(c.abs_ref());
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { '-' } else { '+' })?;
            }
            let is_const = e.iter().all(|&x| x == 0);
            let mut factors = Vec::new();
            if mag != 1 || is_const {
                factors.push(mag.to_string());
            }
            for (i, &x) in e.iter().enumerate() {
                let name = self
                    .names
                    .get(i)
                    .cloned()
                    .unwrap_or_else(|| format!("x{}", i + 1));
                match x {
                    0 => {}
                    1 => factors.push(name),
                    _ => factors.push(format!("{name}^{x}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&[]))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&[]))
    }
}

/// The curve `C = {c_1, ..., c_{n-1}}` in `n` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySystem {
    nvars: usize,
    polys: Vec<Polynomial>,
}

impl PolySystem {
    /// Requires a common variable count. Square systems and systems of
    /// codimension one are both accepted; curves use `nvars - 1` equations.
    pub fn new(polys: Vec<Polynomial>) -> Result<Self> {
        let nvars = polys
            .first()
            .map(Polynomial::nvars)
            .ok_or_else(|| Error::InvalidParameter("empty polynomial system".into()))?;
        for p in &polys {
            if p.nvars() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: p.nvars(),
                });
            }
        }
        Ok(PolySystem { nvars, polys })
    }

    /// Like [`PolySystem::new`] but insists on a curve: `nvars - 1` equations.
    pub fn curve(polys: Vec<Polynomial>) -> Result<Self> {
        let s = Self::new(polys)?;
        if s.polys.len() + 1 != s.nvars {
            return Err(Error::DimensionMismatch {
                expected: s.nvars - 1,
                found: s.polys.len(),
            });
        }
        Ok(s)
    }

    /// Parses each equation with the given variable names.
    pub fn parse(equations: &[&str], names: &[&str]) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let polys = equations
            .iter()
            .map(|e| parse_polynomial(e, &names))
            .collect::<Result<Vec<_>>>()?;
        Self::new(polys)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn eval_rational(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        self.polys.iter().map(|p| p.eval_rational(x)).collect()
    }

    /// Symbolic Jacobian, row per equation.
    pub fn jacobian_polys(&self) -> Vec<Vec<Polynomial>> {
        self.polys
            .iter()
            .map(|p| (0..self.nvars).map(|i| p.derivative(i)).collect())
            .collect()
    }

    pub fn compile(&self, prec: Precision) -> CompiledSystem {
        CompiledSystem::new(self, prec)
    }

    pub fn eval_interval(&self, x: &IntervalVector) -> Result<IntervalVector> {
        self.compile(x.precision()).eval(x)
    }

    pub fn jacobian_interval(&self, x: &IntervalVector) -> Result<IntervalMatrix> {
        self.compile(x.precision()).jacobian(x)
    }
}

/// Lifts a parametric curve `gamma(T)` to the implicit system
/// `X_i - gamma_i(T)` in the variables `(X_1, ..., X_n, T)`.
pub fn parametric_to_implicit(gamma: &[Polynomial]) -> Result<PolySystem> {
    let n = gamma.len();
    let mut polys = Vec::with_capacity(n);
    for (i, g) in gamma.iter().enumerate() {
        if g.nvars() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: g.nvars(),
            });
        }
        let mut lifted = Polynomial::zero(n + 1);
        for (e, c) in g.terms() {
            let mut key = vec![0; n + 1];
            key[n] = e[0];
            lifted.add_term(key, -c.clone());
        }
        polys.push(Polynomial::var(i, n + 1).add(&lifted)?);
    }
    PolySystem::new(polys)
}

/// Signed maximal minors `v_i = (-1)^i det(J without column i)` of an
/// `(n-1) x n` interval matrix. Every member of `J` annihilates the
/// corresponding member direction.
pub fn kernel_vector(j: &IntervalMatrix) -> Result<IntervalVector> {
    let n = j.ncols();
    if j.nrows() + 1 != n {
        return Err(Error::ShapeMismatch {
            expected: format!("{}x{}", n.saturating_sub(1), n),
            found: format!("{}x{}", j.nrows(), n),
        });
    }
    let mut out = Vec::with_capacity(n);
    let mut degenerate = true;
    for i in 0..n {
        let det = j.without_column(i).determinant()?;
        if !det.contains_zero() {
            degenerate = false;
        }
        out.push(if i % 2 == 0 { det } else { -det });
    }
    if degenerate {
        return Err(Error::AllMinorsDegenerate);
    }
    Ok(IntervalVector::new(out))
}
