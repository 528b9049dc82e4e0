//! Multivariate polynomials and rational functions over exact rationals.
//!
//! These back the genus-one chart computations: discriminants, vector
//! fields, connection matrices and their curvature. Polynomials are sparse
//! maps from nonnegative exponent tuples to `BigRational`; rational
//! functions are kept reduced by a primitive-PRS multivariate GCD, with the
//! denominator integer-primitive and lexicographically-leading coefficient
//! positive, so equal fractions have identical representations.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Sparse polynomial over a fixed ordered variable alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyExpr {
    variables: Vec<String>,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl PolyExpr {
    pub fn zero(variables: &[&str]) -> Self {
        PolyExpr {
            variables: variables.iter().map(|s| s.to_string()).collect(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(variables: &[&str], value: BigRational) -> Self {
        let mut p = Self::zero(variables);
        if !value.is_zero() {
            p.terms.insert(vec![0; p.variables.len()], value);
        }
        p
    }

    pub fn constant_i64(variables: &[&str], value: i64) -> Self {
        Self::constant(variables, BigRational::from(BigInt::from(value)))
    }

    pub fn rational(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    /// The variable with the given index, as a polynomial.
    pub fn var(variables: &[&str], index: usize) -> Self {
        let mut p = Self::zero(variables);
        let mut e = vec![0; p.variables.len()];
        e[index] = 1;
        p.terms.insert(e, BigRational::one());
        p
    }

    pub fn monomial(variables: &[&str], exponents: &[u32], coeff: BigRational) -> Self {
        let mut p = Self::zero(variables);
        assert_eq!(exponents.len(), p.variables.len());
        if !coeff.is_zero() {
            p.terms.insert(exponents.to_vec(), coeff);
        }
        p
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exponents: &[u32]) -> BigRational {
        self.terms.get(exponents).cloned().unwrap_or_else(BigRational::zero)
    }

    fn insert(&mut self, e: Vec<u32>, c: BigRational) {
        if c.is_zero() {
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

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.variables, other.variables);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
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

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.variables, other.variables);
        let mut out = Self::zero(&self.variables.iter().map(|s| s.as_str()).collect::<Vec<_>>());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                out.insert(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let vars: Vec<&str> = self.variables.iter().map(|s| s.as_str()).collect();
        let mut acc = Self::constant(&vars, BigRational::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Partial derivative with respect to the variable at `index`.
    pub fn derivative(&self, index: usize) -> Self {
        let vars: Vec<&str> = self.variables.iter().map(|s| s.as_str()).collect();
        let mut out = Self::zero(&vars);
        for (e, c) in &self.terms {
            let k = e[index];
            if k == 0 {
                continue;
            }
            let mut f = e.clone();
            f[index] = k - 1;
            out.insert(f, c * BigRational::from(BigInt::from(k)));
        }
        out
    }

    /// Substitute `args[i]` for variable `i`. The arguments share one
    /// (possibly different) alphabet.
    pub fn substitute(&self, args: &[PolyExpr]) -> PolyExpr {
        assert_eq!(args.len(), self.variables.len());
        let target: Vec<&str> = args[0].variables.iter().map(|s| s.as_str()).collect();
        let mut out = PolyExpr::zero(&target);
        for (e, c) in &self.terms {
            let mut term = PolyExpr::constant(&target, c.clone());
            for (i, k) in e.iter().enumerate() {
                if *k > 0 {
                    term = term.mul(&args[i].pow(*k));
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Substitute truncated Laurent series for the variables.
    pub fn eval_series(
        &self,
        args: &[crate::series::TruncatedLaurentSeries],
    ) -> Result<crate::series::TruncatedLaurentSeries, crate::series::SeriesError> {
        assert_eq!(args.len(), self.variables.len());
        assert!(!args.is_empty());
        let vars: Vec<&str> = args[0].variables().iter().map(|s| s.as_str()).collect();
        let order = args.iter().map(|s| s.order()).min().unwrap();
        let lower = args.iter().map(|s| s.lower_bound()).min().unwrap().min(0);
        let mut out = crate::series::TruncatedLaurentSeries::zero(&vars, order, lower);
        for (e, c) in &self.terms {
            let mut term =
                crate::series::TruncatedLaurentSeries::constant(&vars, order, lower, c.clone());
            for (i, k) in e.iter().enumerate() {
                for _ in 0..*k {
                    term = term.mul(&args[i])?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    pub fn eval_rational(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.variables.len());
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, k) in e.iter().enumerate() {
                for _ in 0..*k {
                    term *= point[i].clone();
                }
            }
            acc += term;
        }
        acc
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut term = Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
            for (i, k) in e.iter().enumerate() {
                for _ in 0..*k {
                    term *= point[i];
                }
            }
            acc += term;
        }
        acc
    }

    /// Total degree, or None for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    fn degree_in(&self, index: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[index]).max()
    }

    /// Lexicographically largest exponent tuple and its coefficient.
    fn leading(&self) -> Option<(&Vec<u32>, &BigRational)> {
        self.terms.iter().next_back()
    }

    /// Positive rational c such that self/c has integer coefficients with
    /// gcd 1; zero polynomial has content 0.
    fn content(&self) -> BigRational {
        if self.terms.is_empty() {
            return BigRational::zero();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        BigRational::new(num_gcd, den_lcm)
    }

    /// Exact polynomial quotient, or None when `other` does not divide self.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        let vars: Vec<&str> = self.variables.iter().map(|s| s.as_str()).collect();
        let mut q = Self::zero(&vars);
        let mut r = self.clone();
        let (ed, cd) = {
            let (e, c) = other.leading().unwrap();
            (e.clone(), c.clone())
        };
        while let Some((er, cr)) = r.leading() {
            if !er.iter().zip(ed.iter()).all(|(a, b)| a >= b) {
                return None;
            }
            let e: Vec<u32> = er.iter().zip(ed.iter()).map(|(a, b)| a - b).collect();
            let t = Self::monomial(&vars, &e, cr / &cd);
            q = q.add(&t);
            r = r.sub(&t.mul(other));
        }
        Some(q)
    }

    /// Greatest common divisor, integer-primitive with positive leading
    /// coefficient (lexicographic); gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Self) -> Self {
        debug_assert_eq!(self.variables, other.variables);
        let n = self.variables.len();
        gcd_full(self, other, n).make_primitive()
    }

    /// Sound but incomplete coprimality test: for each variable, evaluate
    /// all the others at fixed points and take a univariate gcd. Evaluation
    /// only ever enlarges the gcd image, so a constant image in every
    /// variable proves the gcd is constant; otherwise inconclusive.
    fn coprimality_certificate(&self, other: &Self) -> bool {
        let n = self.variables.len();
        for keep in 0..n {
            let fu = self.evaluate_except(keep);
            let gu = other.evaluate_except(keep);
            match (fu, gu) {
                (Some(f), Some(g)) => {
                    if univariate_gcd_degree(&f, &g) != Some(0) {
                        return false;
                    }
                }
                _ => return false,
            }
        }
        true
    }

    // Dense univariate image in the kept variable, all other variables at
    // small fixed points; None when the image degenerates to zero.
    fn evaluate_except(&self, keep: usize) -> Option<Vec<BigRational>> {
        let deg = self.degree_in(keep)? as usize;
        let mut out = vec![BigRational::zero(); deg + 1];
        for (e, c) in &self.terms {
            let mut v = c.clone();
            for (i, k) in e.iter().enumerate() {
                if i != keep {
                    let point = BigRational::from(BigInt::from(2 + 3 * i as i64));
                    for _ in 0..*k {
                        v *= point.clone();
                    }
                }
            }
            out[e[keep] as usize] += v;
        }
        while out.len() > 1 && out.last().unwrap().is_zero() {
            out.pop();
        }
        if out.len() == 1 && out[0].is_zero() {
            None
        } else {
            Some(out)
        }
    }

    fn make_primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.leading().unwrap().1.is_negative() {
            c = -c;
        }
        self.scale(&(BigRational::one() / c))
    }
}

// Decompose as a dense polynomial in the variable `index`, with PolyExpr
// coefficients not involving that variable.
fn coeffs_in(p: &PolyExpr, index: usize) -> Vec<PolyExpr> {
    let vars: Vec<&str> = p.variables.iter().map(|s| s.as_str()).collect();
    let deg = p.degree_in(index).unwrap_or(0) as usize;
    let mut out = vec![PolyExpr::zero(&vars); deg + 1];
    for (e, c) in &p.terms {
        let k = e[index] as usize;
        let mut f = e.clone();
        f[index] = 0;
        out[k].insert(f, c.clone());
    }
    out
}

// Degree of gcd of two dense univariate rational polynomials (Euclid).
fn univariate_gcd_degree(f: &[BigRational], g: &[BigRational]) -> Option<u32> {
    let mut a = f.to_vec();
    let mut b = g.to_vec();
    let trim = |v: &mut Vec<BigRational>| {
        while v.len() > 0 && v.last().map(|c| c.is_zero()).unwrap_or(false) {
            v.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    if a.is_empty() || b.is_empty() {
        return None;
    }
    while !b.is_empty() {
        if b.len() == 1 {
            return Some(0);
        }
        // a mod b
        while a.len() >= b.len() {
            let factor = a.last().unwrap() / b.last().unwrap();
            let shift = a.len() - b.len();
            for (i, bc) in b.iter().enumerate() {
                let sub = bc * &factor;
                a[shift + i] -= sub;
            }
            trim(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    Some(a.len() as u32 - 1)
}

// GCD with fast paths, valid at any recursion level: zero, monomial,
// mutual divisibility, and the evaluation certificate all short-circuit the
// remainder sequence. The result is unique only up to a rational unit.
fn gcd_full(a: &PolyExpr, b: &PolyExpr, level: usize) -> PolyExpr {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    let vars: Vec<&str> = a.variables.iter().map(|s| s.as_str()).collect();
    if a.terms.len() == 1 || b.terms.len() == 1 {
        // gcd with a monomial is the componentwise-minimal common monomial.
        let (mono, other) = if a.terms.len() == 1 { (a, b) } else { (b, a) };
        let e0 = mono.terms.keys().next().unwrap();
        let mut e = e0.clone();
        for f in other.terms.keys() {
            for (x, y) in e.iter_mut().zip(f.iter()) {
                *x = (*x).min(*y);
            }
        }
        return PolyExpr::monomial(&vars, &e, BigRational::one());
    }
    if b.div_exact(a).is_some() {
        return a.clone();
    }
    if a.div_exact(b).is_some() {
        return b.clone();
    }
    if a.coprimality_certificate(b) {
        return PolyExpr::constant(&vars, BigRational::one());
    }
    gcd_rec(a, b, level)
}

// Content of p viewed in the variable `index`: gcd of its coefficients,
// with early exit once the content collapses to a constant.
fn content_in(p: &PolyExpr, index: usize, level: usize) -> PolyExpr {
    let cs = coeffs_in(p, index);
    let vars: Vec<&str> = p.variables.iter().map(|s| s.as_str()).collect();
    let mut g = PolyExpr::zero(&vars);
    for c in cs {
        if c.is_zero() {
            continue;
        }
        g = gcd_full(&g, &c, level);
        if g.total_degree() == Some(0) {
            return PolyExpr::constant(&vars, BigRational::one());
        }
    }
    g
}

// GCD by primitive pseudo-remainder sequence in the top active variable;
// both inputs involve only the first `level` variables and are nonzero.
fn gcd_rec(a: &PolyExpr, b: &PolyExpr, level: usize) -> PolyExpr {
    // Find the top active variable.
    let mut idx = None;
    for i in (0..level).rev() {
        if a.degree_in(i).unwrap_or(0) > 0 || b.degree_in(i).unwrap_or(0) > 0 {
            idx = Some(i);
            break;
        }
    }
    let vars: Vec<&str> = a.variables.iter().map(|s| s.as_str()).collect();
    let i = match idx {
        // Both are constants.
        None => return PolyExpr::constant(&vars, BigRational::one()),
        Some(i) => i,
    };
    if a.degree_in(i).unwrap_or(0) == 0 || b.degree_in(i).unwrap_or(0) == 0 {
        // One side is free of the main variable: gcd divides its content.
        let (free, mixed) = if a.degree_in(i).unwrap_or(0) == 0 { (a, b) } else { (b, a) };
        let cont = content_in(mixed, i, i);
        return gcd_full(free, &cont, i);
    }

    let ca = content_in(a, i, i);
    let cb = content_in(b, i, i);
    let cg = gcd_full(&ca, &cb, i);
    let mut u = a.div_exact(&ca).expect("content divides");
    let mut v = b.div_exact(&cb).expect("content divides");
    if u.degree_in(i).unwrap_or(0) < v.degree_in(i).unwrap_or(0) {
        std::mem::swap(&mut u, &mut v);
    }
    // Primitive pseudo-remainder sequence.
    loop {
        let r = pseudo_remainder(&u, &v, i);
        if r.is_zero() {
            break;
        }
        let rc = content_in(&r, i, i);
        u = v;
        v = r.div_exact(&rc).expect("content divides");
        if v.degree_in(i).unwrap_or(0) == 0 {
            // Coprime up to content.
            return cg;
        }
        if u.degree_in(i).unwrap_or(0) < v.degree_in(i).unwrap_or(0) {
            std::mem::swap(&mut u, &mut v);
        }
    }
    let vp = {
        let c = content_in(&v, i, i);
        v.div_exact(&c).expect("content divides")
    };
    cg.mul(&vp)
}

// Standard pseudo-remainder: lc(b)^(da-db+1) * a mod b in variable `index`.
fn pseudo_remainder(a: &PolyExpr, b: &PolyExpr, index: usize) -> PolyExpr {
    let db = b.degree_in(index).unwrap_or(0);
    let lb = coeffs_in(b, index)[db as usize].clone();
    let mut r = a.clone();
    loop {
        let dr = match r.degree_in(index) {
            None => break,
            Some(d) => d,
        };
        if r.is_zero() || dr < db {
            break;
        }
        let lr = coeffs_in(&r, index)[dr as usize].clone();
        // r <- lb*r - lr*x^(dr-db)*b
        let vars: Vec<&str> = a.variables.iter().map(|s| s.as_str()).collect();
        let mut shift_e = vec![0u32; vars.len()];
        shift_e[index] = dr - db;
        let shift = PolyExpr::monomial(&vars, &shift_e, BigRational::one());
        r = r.mul(&lb).sub(&lr.mul(&shift).mul(b));
    }
    r
}

impl fmt::Display for PolyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c)?;
            for (v, k) in self.variables.iter().zip(e.iter()) {
                match k {
                    0 => {}
                    1 => write!(f, "*{}", v)?,
                    _ => write!(f, "*{}^{}", v, k)?,
                }
            }
        }
        Ok(())
    }
}

/// Reduced fraction of two polynomials.
#[derive(Debug, Clone)]
pub struct RationalFunctionExpr {
    num: PolyExpr,
    den: PolyExpr,
}

impl PartialEq for RationalFunctionExpr {
    fn eq(&self, other: &Self) -> bool {
        // Cross-multiplied, so equality does not rest on the reduction
        // having found every common factor.
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for RationalFunctionExpr {}

impl RationalFunctionExpr {
    pub fn new(num: PolyExpr, den: PolyExpr) -> Self {
        assert!(!den.is_zero(), "denominator must not be identically zero");
        let mut r = RationalFunctionExpr { num, den };
        r.reduce();
        r
    }

    pub fn from_poly(num: PolyExpr) -> Self {
        let vars: Vec<&str> = num.variables().iter().map(|s| s.as_str()).collect();
        let den = PolyExpr::constant(&vars, BigRational::one());
        Self::new(num, den)
    }

    pub fn zero(variables: &[&str]) -> Self {
        Self::from_poly(PolyExpr::zero(variables))
    }

    pub fn numerator(&self) -> &PolyExpr {
        &self.num
    }

    pub fn denominator(&self) -> &PolyExpr {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            let vars: Vec<&str> = self.num.variables().iter().map(|s| s.as_str()).collect();
            self.den = PolyExpr::constant(&vars, BigRational::one());
            return;
        }
        let g = self.num.gcd(&self.den);
        if let (Some(n), Some(d)) = (self.num.div_exact(&g), self.den.div_exact(&g)) {
            self.num = n;
            self.den = d;
        }
        self.normalize_denominator();
    }

    // Denominator integer-primitive with positive lex-leading coefficient.
    fn normalize_denominator(&mut self) {
        if self.num.is_zero() {
            let vars: Vec<&str> = self.num.variables().iter().map(|s| s.as_str()).collect();
            self.den = PolyExpr::constant(&vars, BigRational::one());
            return;
        }
        let mut c = self.den.content();
        if self.den.leading().unwrap().1.is_negative() {
            c = -c;
        }
        let inv = BigRational::one() / c;
        self.den = self.den.scale(&inv);
        self.num = self.num.scale(&inv);
    }

    /// Addition over the least common denominator.
    pub fn add(&self, other: &Self) -> Self {
        if self.den == other.den {
            return Self::new(self.num.add(&other.num), self.den.clone());
        }
        let g = self.den.gcd(&other.den);
        let da = self.den.div_exact(&g).expect("gcd divides");
        let db = other.den.div_exact(&g).expect("gcd divides");
        Self::new(
            self.num.mul(&db).add(&other.num.mul(&da)),
            self.den.mul(&db),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        RationalFunctionExpr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    /// Multiplication with cross-cancellation; with both operands reduced
    /// the result needs no further polynomial gcd.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            let vars: Vec<&str> = self.num.variables().iter().map(|s| s.as_str()).collect();
            return Self::zero(&vars);
        }
        let g1 = self.num.gcd(&other.den);
        let g2 = other.num.gcd(&self.den);
        let n = self
            .num
            .div_exact(&g1)
            .expect("gcd divides")
            .mul(&other.num.div_exact(&g2).expect("gcd divides"));
        let d = self
            .den
            .div_exact(&g2)
            .expect("gcd divides")
            .mul(&other.den.div_exact(&g1).expect("gcd divides"));
        let mut r = RationalFunctionExpr { num: n, den: d };
        r.normalize_denominator();
        r
    }

    pub fn div(&self, other: &Self) -> Self {
        assert!(!other.is_zero());
        self.mul(&RationalFunctionExpr {
            num: other.den.clone(),
            den: other.num.clone(),
        })
    }

    /// Quotient-rule partial derivative, with the common factor of the
    /// denominator and its derivative cancelled up front.
    pub fn derivative(&self, index: usize) -> Self {
        let dd = self.den.derivative(index);
        if dd.is_zero() {
            let mut r = RationalFunctionExpr {
                num: self.num.derivative(index),
                den: self.den.clone(),
            };
            r.reduce();
            return r;
        }
        let g = self.den.gcd(&dd);
        let e = self.den.div_exact(&g).expect("gcd divides");
        let dg = dd.div_exact(&g).expect("gcd divides");
        Self::new(
            self.num.derivative(index).mul(&e).sub(&self.num.mul(&dg)),
            self.den.mul(&e),
        )
    }

    /// The constant 1 test after reduction.
    pub fn is_one(&self) -> bool {
        self.num == self.den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars() -> Vec<&'static str> {
        vec!["x", "y", "z"]
    }

    fn x() -> PolyExpr {
        PolyExpr::var(&vars(), 0)
    }
    fn y() -> PolyExpr {
        PolyExpr::var(&vars(), 1)
    }
    fn z() -> PolyExpr {
        PolyExpr::var(&vars(), 2)
    }

    #[test]
    fn gcd_of_common_factor() {
        // gcd((x+y)^2 (x-z), (x+y)(y+z)) = x+y up to normalization.
        let f = x().add(&y()).pow(2).mul(&x().sub(&z()));
        let g = x().add(&y()).mul(&y().add(&z()));
        let d = f.gcd(&g);
        assert_eq!(d, x().add(&y()));
    }

    #[test]
    fn gcd_coprime_is_constant() {
        let f = x().mul(&x()).add(&PolyExpr::constant_i64(&vars(), 1));
        let g = y().add(&z());
        let d = f.gcd(&g);
        assert_eq!(d.total_degree(), Some(0));
    }

    #[test]
    fn exact_division() {
        let f = x().add(&y()).mul(&x().sub(&y()));
        let q = f.div_exact(&x().add(&y())).unwrap();
        assert_eq!(q, x().sub(&y()));
        assert!(f.div_exact(&z()).is_none());
    }

    #[test]
    fn rational_function_reduction() {
        // (x^2 - y^2) / (2x + 2y) reduces to (x - y)/2.
        let num = x().pow(2).sub(&y().pow(2));
        let den = x().add(&y()).scale(&PolyExpr::rational(2, 1));
        let r = RationalFunctionExpr::new(num, den);
        assert_eq!(r.numerator(), &x().sub(&y()).scale(&PolyExpr::rational(1, 2)));
        assert_eq!(r.denominator(), &PolyExpr::constant_i64(&vars(), 1));
    }

    #[test]
    fn derivative_quotient_rule() {
        // d/dx (x/y) = 1/y; d/dy (x/y) = -x/y^2.
        let r = RationalFunctionExpr::new(x(), y());
        let dx = r.derivative(0);
        assert_eq!(dx, RationalFunctionExpr::new(PolyExpr::constant_i64(&vars(), 1), y()));
        let dy = r.derivative(1);
        assert_eq!(dy, RationalFunctionExpr::new(x().neg(), y().pow(2)));
    }

    #[test]
    fn substitution_composes() {
        // p(x,y,z) = x y + z, substitute x -> y, y -> z, z -> x.
        let p = x().mul(&y()).add(&z());
        let q = p.substitute(&[y(), z(), x()]);
        assert_eq!(q, y().mul(&z()).add(&x()));
    }
}
