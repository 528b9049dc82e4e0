//! Truncated multivariate Laurent series with exact rational coefficients.
//!
//! A series lives over an ordered list of variables and is truncated by
//! *total* degree: coefficients are stored for exponent tuples whose total
//! degree lies in `[lower, order]`. The `order` bound is a precision (terms
//! above it are unknown), the `lower` bound is a support guarantee (terms
//! below it are known to vanish). Arithmetic propagates both bounds, so a
//! product of series with negative valuation loses top precision the way
//! Laurent arithmetic must: `order(a*b) = min(order(a)+lower(b),
//! order(b)+lower(a))`.
//!
//! Coefficients are `BigRational`; no floating point ever enters, so every
//! identity checked through these series is checked exactly.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("series are defined over different variable sets")]
    VariableMismatch,
    #[error("lowest-degree part is not a single monomial with nonzero coefficient")]
    NonUnitLeadingTerm,
    #[error("unsupported Eisenstein weight {0} (expected 2, 4 or 6)")]
    UnsupportedWeight(u32),
    #[error("substitution matrix shape does not match the variable counts")]
    DimensionMismatch,
    #[error("substituted exponent has total degree {0}, below the target lower bound {1}")]
    TruncationUnderflow(i64, i64),
}

/// Exponent tuple of a monomial, one signed entry per variable.
pub type ExponentTuple = Vec<i64>;

fn total_degree(e: &[i64]) -> i64 {
    e.iter().sum()
}

/// A Laurent series truncated by total degree, in canonical sparse form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedLaurentSeries {
    variables: Vec<String>,
    order: i64,
    lower: i64,
    terms: BTreeMap<ExponentTuple, BigRational>,
}

impl TruncatedLaurentSeries {
    /// The zero series in the given context. `order >= 0` and `lower <= 0`
    /// are the shapes used throughout; neither is enforced beyond
    /// `lower <= order`.
    pub fn zero(variables: &[&str], order: i64, lower: i64) -> Self {
        assert!(lower <= order, "lower bound exceeds truncation order");
        TruncatedLaurentSeries {
            variables: variables.iter().map(|s| s.to_string()).collect(),
            order,
            lower,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(variables: &[&str], order: i64, lower: i64, value: BigRational) -> Self {
        let mut s = Self::zero(variables, order, lower);
        if !value.is_zero() {
            let e = vec![0; s.variables.len()];
            debug_assert!(lower <= 0 && 0 <= order);
            s.terms.insert(e, value);
        }
        s
    }

    pub fn constant_i64(variables: &[&str], order: i64, lower: i64, value: i64) -> Self {
        Self::constant(variables, order, lower, BigRational::from(BigInt::from(value)))
    }

    /// The monomial `c * q^e`.
    pub fn monomial(
        variables: &[&str],
        order: i64,
        lower: i64,
        exponents: &[i64],
        coeff: BigRational,
    ) -> Self {
        assert_eq!(exponents.len(), variables.len());
        let mut s = Self::zero(variables, order, lower);
        let d = total_degree(exponents);
        assert!(lower <= d && d <= order, "monomial degree outside [lower, order]");
        if !coeff.is_zero() {
            s.terms.insert(exponents.to_vec(), coeff);
        }
        s
    }

    /// Single variable `q`, plain power series context `[0, order]`.
    pub fn var_q(order: i64) -> Self {
        Self::monomial(&["q"], order, 0, &[1], BigRational::one())
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn lower_bound(&self) -> i64 {
        self.lower
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentTuple, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exponents: &[i64]) -> BigRational {
        self.terms.get(exponents).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Coefficient in a one-variable context.
    pub fn coeff1(&self, n: i64) -> BigRational {
        debug_assert_eq!(self.variables.len(), 1);
        self.coeff(&[n])
    }

    fn same_variables(&self, other: &Self) -> Result<(), SeriesError> {
        if self.variables == other.variables {
            Ok(())
        } else {
            Err(SeriesError::VariableMismatch)
        }
    }

    fn var_index(&self, var: &str) -> Result<usize, SeriesError> {
        self.variables
            .iter()
            .position(|v| v == var)
            .ok_or(SeriesError::VariableMismatch)
    }

    fn insert(&mut self, e: ExponentTuple, c: BigRational) {
        let d = total_degree(&e);
        if d > self.order || d < self.lower || c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_variables(other)?;
        let mut out = Self::zero(
            &self.variables.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
            self.order.min(other.order),
            self.lower.min(other.lower),
        );
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            out.insert(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        let mut out = self.clone();
        if factor.is_zero() {
            out.terms.clear();
            return out;
        }
        for c in out.terms.values_mut() {
            *c *= factor.clone();
        }
        out
    }

    pub fn scale_i64(&self, num: i64, den: i64) -> Self {
        self.scale(&BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_variables(other)?;
        let order = (self.order + other.lower).min(other.order + self.lower);
        let lower = self.lower + other.lower;
        let vars: Vec<&str> = self.variables.iter().map(|s| s.as_str()).collect();
        let mut out = Self::zero(&vars, order, lower.min(order));
        for (ea, ca) in &self.terms {
            let da = total_degree(ea);
            for (eb, cb) in &other.terms {
                if da + total_degree(eb) > order {
                    continue;
                }
                let e: ExponentTuple = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                out.insert(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self, SeriesError> {
        let vars: Vec<&str> = self.variables.iter().map(|s| s.as_str()).collect();
        let mut acc = Self::constant(&vars, self.order, self.lower.min(0), BigRational::one());
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Multiplicative inverse in the truncated Laurent ring.
    ///
    /// Requires the lowest-total-degree homogeneous part to be a single
    /// monomial `c*q^e`; the result has support from `-deg(e)` and is exact
    /// to `order - 2*deg(e)`.
    pub fn invert(&self) -> Result<Self, SeriesError> {
        let d0 = match self.terms.keys().map(|e| total_degree(e)).min() {
            Some(d) => d,
            None => return Err(SeriesError::NonUnitLeadingTerm),
        };
        let leading: Vec<(&ExponentTuple, &BigRational)> = self
            .terms
            .iter()
            .filter(|(e, _)| total_degree(e) == d0)
            .collect();
        if leading.len() != 1 {
            return Err(SeriesError::NonUnitLeadingTerm);
        }
        let (e0, c0) = (leading[0].0.clone(), leading[0].1.clone());

        // u = self / (c0 q^e0) = 1 + h with h supported in degrees >= 1.
        let m = self.order - d0;
        if m < 0 {
            return Err(SeriesError::NonUnitLeadingTerm);
        }
        let vars: Vec<&str> = self.variables.iter().map(|s| s.as_str()).collect();
        let mut u = Self::zero(&vars, m, 0);
        let inv_c0 = BigRational::one() / c0.clone();
        for (e, c) in &self.terms {
            let shifted: ExponentTuple = e.iter().zip(e0.iter()).map(|(x, y)| x - y).collect();
            u.insert(shifted, c * &inv_c0);
        }

        // Newton iteration r <- r(2 - u r), doubling the correct order.
        let two = Self::constant_i64(&vars, m, 0, 2);
        let mut r = Self::constant(&vars, m, 0, BigRational::one());
        let mut correct: i64 = 0;
        while correct < m {
            let ur = u.mul(&r)?;
            r = r.mul(&two.sub(&ur)?)?;
            correct = 2 * correct + 1;
        }

        // Shift back by -e0 and divide by c0.
        let mut out = Self::zero(&vars, self.order - 2 * d0, -d0);
        for (e, c) in &r.terms {
            let shifted: ExponentTuple = e.iter().zip(e0.iter()).map(|(x, y)| x - y).collect();
            out.insert(shifted, c * &inv_c0);
        }
        Ok(out)
    }

    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        self.mul(&other.invert()?)
    }

    /// The derivation `q_var d/dq_var`: each coefficient is multiplied by the
    /// exponent of `var`. Truncation bounds are unchanged.
    pub fn theta(&self, var: &str) -> Result<Self, SeriesError> {
        let idx = self.var_index(var)?;
        let mut out = self.clone();
        out.terms.clear();
        for (e, c) in &self.terms {
            let k = e[idx];
            if k != 0 {
                out.terms
                    .insert(e.clone(), c * BigRational::from(BigInt::from(k)));
            }
        }
        Ok(out)
    }

    /// Ring homomorphism sending each source monomial `q^e` to the target
    /// monomial `q^(M e)`. `matrix` has one row per target variable and one
    /// column per source variable.
    pub fn substitute_monomials(
        &self,
        matrix: &[Vec<i64>],
        target_variables: &[&str],
        target_order: i64,
        target_lower: i64,
    ) -> Result<Self, SeriesError> {
        if matrix.len() != target_variables.len()
            || matrix.iter().any(|row| row.len() != self.variables.len())
        {
            return Err(SeriesError::DimensionMismatch);
        }
        let mut out = Self::zero(target_variables, target_order, target_lower);
        for (e, c) in &self.terms {
            let image: ExponentTuple = matrix
                .iter()
                .map(|row| row.iter().zip(e.iter()).map(|(m, x)| m * x).sum())
                .collect();
            let d = total_degree(&image);
            if d < target_lower {
                return Err(SeriesError::TruncationUnderflow(d, target_lower));
            }
            out.insert(image, c.clone());
        }
        Ok(out)
    }

    /// First exponent (lexicographic) at which the two series disagree, for
    /// total degrees up to `through`, or `None` when they agree.
    pub fn first_disagreement(
        &self,
        other: &Self,
        through: i64,
    ) -> Option<(ExponentTuple, BigRational, BigRational)> {
        let mut exponents: Vec<&ExponentTuple> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .filter(|e| total_degree(e) <= through)
            .collect();
        exponents.sort();
        exponents.dedup();
        for e in exponents {
            let a = self.coeff(e);
            let b = other.coeff(e);
            if a != b {
                return Some((e.clone(), a, b));
            }
        }
        None
    }

    /// True when all coefficients through total degree `through` agree.
    pub fn agrees_with(&self, other: &Self, through: i64) -> bool {
        debug_assert!(through <= self.order && through <= other.order);
        self.first_disagreement(other, through).is_none()
    }

    /// Every coefficient an integer?
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.denom().is_one())
    }

    /// JSON form `{variables, order, lower_bound, terms}` with terms sorted
    /// lexicographically by exponent tuple and coefficients as exact
    /// `"numerator/denominator"` strings.
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::{json, Value};
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(e, c)| json!([e, c.to_string()]))
            .collect();
        json!({
            "variables": self.variables,
            "order": self.order,
            "lower_bound": self.lower,
            "terms": terms,
        })
    }
}

impl fmt::Display for TruncatedLaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c)?;
            for (v, k) in self.variables.iter().zip(e.iter()) {
                if *k != 0 {
                    write!(f, "*{}^{}", v, k)?;
                }
            }
        }
        write!(f, " + O(deg {})", self.order + 1)
    }
}

/// Divisor power sum `sigma_m(n) = sum_{d | n} d^m` for all `n <= bound`.
pub fn divisor_power_sums(m: u32, bound: usize) -> Vec<BigInt> {
    let mut sums = vec![BigInt::zero(); bound + 1];
    for d in 1..=bound {
        let dm = BigInt::from(d).pow(m);
        let mut n = d;
        while n <= bound {
            sums[n] += &dm;
            n += d;
        }
    }
    sums
}

/// The normalized Eisenstein series `E_k` of weight `k` in {2, 4, 6}, as a
/// one-variable power series in `q` to the given order: constant term 1 and
/// coefficient `c_k * sigma_{k-1}(n)` at `q^n`, with
/// `(c_2, c_4, c_6) = (-24, 240, -504)`.
pub fn eisenstein_series(k: u32, order: i64) -> Result<TruncatedLaurentSeries, SeriesError> {
    let c = match k {
        2 => -24i64,
        4 => 240,
        6 => -504,
        _ => return Err(SeriesError::UnsupportedWeight(k)),
    };
    assert!(order >= 0);
    let mut s = TruncatedLaurentSeries::zero(&["q"], order, 0);
    s.terms.insert(vec![0], BigRational::one());
    let sums = divisor_power_sums(k - 1, order as usize);
    for n in 1..=(order as usize) {
        let coeff = BigRational::from(BigInt::from(c) * &sums[n]);
        s.terms.insert(vec![n as i64], coeff);
    }
    Ok(s)
}
