//! Exact polynomials over moment symbols.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::moments::{MomentIndex, MomentVector};

/// Product of moment symbols, stored as a sorted multiset.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<MomentIndex>);

impl Monomial {
    pub fn new(mut factors: Vec<MomentIndex>) -> Self {
        factors.sort_unstable();
        Self(factors)
    }

    pub fn factors(&self) -> &[MomentIndex] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    fn times(&self, other: &Monomial) -> Monomial {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Monomial::new(v)
    }

    fn exponent_of(&self, sym: MomentIndex) -> usize {
        self.0.iter().filter(|&&s| s == sym).count()
    }

    /// Monomial with one occurrence of `sym` removed.
    fn without_one(&self, sym: MomentIndex) -> Monomial {
        let mut v = self.0.clone();
        if let Some(pos) = v.iter().position(|&s| s == sym) {
            v.remove(pos);
        }
        Monomial(v)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut i = 0;
        while i < self.0.len() {
            let sym = self.0[i];
            let mut run = 1;
            while i + run < self.0.len() && self.0[i + run] == sym {
                run += 1;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if run > 1 {
                write!(f, "{sym}^{run}")?;
            } else {
                write!(f, "{sym}")?;
            }
            i += run;
        }
        Ok(())
    }
}

/// Polynomial in moment symbols with exact rational coefficients.
///
/// Terms with zero coefficient are never stored; iteration follows the
/// monomial order, so the first term is the canonical leading term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MomentPolynomial {
    dim: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl MomentPolynomial {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: BigRational) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(Monomial::default(), c);
        p
    }

    pub fn symbol(sym: MomentIndex) -> Self {
        let mut p = Self::zero(sym.dim());
        p.add_term(Monomial(vec![sym]), BigRational::one());
        p
    }

    /// Builds a polynomial from `(coefficient, monomial)` pairs, merging like terms.
    pub fn from_terms(
        dim: usize,
        terms: impl IntoIterator<Item = (BigRational, Monomial)>,
    ) -> Self {
        let mut p = Self::zero(dim);
        for (c, m) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        debug_assert!(m.0.iter().all(|s| s.dim() == self.dim));
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Largest number of moment factors in any term.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Highest moment order appearing in any term.
    pub fn order(&self) -> usize {
        self.symbols()
            .iter()
            .map(MomentIndex::order)
            .max()
            .unwrap_or(0)
    }

    pub fn symbols(&self) -> BTreeSet<MomentIndex> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().copied())
            .collect()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        Self {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.dim, BigRational::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Scalar-normalized form: the leading term gets coefficient `+1`.
    /// Returns the normalized polynomial and the removed scalar, so that
    /// `self == canonical * scalar`. The zero polynomial maps to itself with scalar 1.
    pub fn canonicalize(&self) -> (Self, BigRational) {
        match self.terms.values().next() {
            None => (self.clone(), BigRational::one()),
            Some(lead) => {
                let lead = lead.clone();
                (self.scale(&lead.recip()), lead)
            }
        }
    }

    pub fn canonical(&self) -> Self {
        self.canonicalize().0
    }

    /// Returns `s` with `self == s * other`, if such a nonzero rational exists.
    pub fn ratio_to(&self, other: &Self) -> Option<BigRational> {
        if self.dim != other.dim || self.term_count() != other.term_count() || self.is_zero() {
            return None;
        }
        let (m, c) = self.terms.iter().next()?;
        let s = c / other.terms.get(m)?;
        if *self == other.scale(&s) {
            Some(s)
        } else {
            None
        }
    }

    /// Formal partial derivative with respect to one moment symbol.
    pub fn differentiate(&self, sym: MomentIndex) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.exponent_of(sym);
            if e > 0 {
                out.add_term(m.without_one(sym), c * BigRational::from_integer(e.into()));
            }
        }
        out
    }

    /// Numeric value with the given symbol lookup.
    pub fn evaluate_with(&self, mut lookup: impl FnMut(MomentIndex) -> f64) -> f64 {
        let mut total = 0.0;
        for (m, c) in &self.terms {
            let mut t = rational_to_f64(c);
            for &s in &m.0 {
                t *= lookup(s);
            }
            total += t;
        }
        total
    }

    /// Sum over terms of coefficient times the looked-up moment values.
    pub fn evaluate(&self, mv: &MomentVector) -> Result<f64> {
        if !self.is_zero() && mv.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: mv.dim(),
            });
        }
        let needed = self.order();
        if needed > mv.max_order() {
            return Err(Error::InsufficientOrder {
                needed,
                available: mv.max_order(),
            });
        }
        Ok(self.evaluate_with(|s| mv.get(s).expect("order checked")))
    }

    /// Value in double-double arithmetic.
    pub(crate) fn evaluate_extended(
        &self,
        mut lookup: impl FnMut(MomentIndex) -> TwoFloat,
    ) -> TwoFloat {
        let mut total = TwoFloat::from(0.0);
        for (m, c) in &self.terms {
            let mut t = rational_to_twofloat(c);
            for &s in &m.0 {
                t *= lookup(s);
            }
            total += t;
        }
        total
    }

    /// Exact value at a rational assignment.
    pub fn evaluate_exact(
        &self,
        mut lookup: impl FnMut(MomentIndex) -> BigRational,
    ) -> BigRational {
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &s in &m.0 {
                t *= lookup(s);
            }
            total += t;
        }
        total
    }

    /// JSON form: `[{"coeff": "num/den", "monomial": [[p, q], ...]}, ...]`.
    pub fn to_json(&self) -> Vec<JsonTerm> {
        self.terms
            .iter()
            .map(|(m, c)| JsonTerm {
                coeff: format!("{}/{}", c.numer(), c.denom()),
                monomial: m.0.iter().map(|s| s.exps().to_vec()).collect(),
            })
            .collect()
    }

    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        parse::Parser::new(text, dim).parse()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonTerm {
    pub coeff: String,
    pub monomial: Vec<Vec<u8>>,
}

pub(crate) fn rational_to_f64(c: &BigRational) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        c.numer().to_f64().unwrap_or(f64::NAN) / c.denom().to_f64().unwrap_or(f64::NAN)
    })
}

fn rational_to_twofloat(c: &BigRational) -> TwoFloat {
    match (c.numer().to_i64(), c.denom().to_i64()) {
        (Some(n), Some(d)) => TwoFloat::from(n) / TwoFloat::from(d),
        _ => TwoFloat::from(rational_to_f64(c)),
    }
}

pub(crate) fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl fmt::Display for MomentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let unit = mag.is_one();
            if m.0.is_empty() {
                write!(f, "{mag}")?;
            } else if unit {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

impl Add for &MomentPolynomial {
    type Output = MomentPolynomial;
    fn add(self, rhs: &MomentPolynomial) -> MomentPolynomial {
        assert_eq!(
            self.dim, rhs.dim,
            "adding polynomials of different dimension"
        );
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MomentPolynomial {
    type Output = MomentPolynomial;
    fn sub(self, rhs: &MomentPolynomial) -> MomentPolynomial {
        assert_eq!(
            self.dim, rhs.dim,
            "subtracting polynomials of different dimension"
        );
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &MomentPolynomial {
    type Output = MomentPolynomial;
    fn mul(self, rhs: &MomentPolynomial) -> MomentPolynomial {
        assert_eq!(
            self.dim, rhs.dim,
            "multiplying polynomials of different dimension"
        );
        let mut out = MomentPolynomial::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &MomentPolynomial {
    type Output = MomentPolynomial;
    fn neg(self) -> MomentPolynomial {
        self.scale(&-BigRational::one())
    }
}

mod parse {
    //! Recursive-descent reader for expressions such as
    //! `(mu30 - 3*mu12)^2 + 1/2*mu20*mu02`.

    use super::*;

    pub(super) struct Parser<'a> {
        src: &'a str,
        pos: usize,
        dim: usize,
    }

    impl<'a> Parser<'a> {
        pub(super) fn new(src: &'a str, dim: usize) -> Self {
            Self { src, pos: 0, dim }
        }

        pub(super) fn parse(mut self) -> Result<MomentPolynomial> {
            let p = self.expr()?;
            self.skip_ws();
            if self.pos != self.src.len() {
                return Err(Error::parse(self.pos, "unexpected trailing input"));
            }
            Ok(p)
        }

        fn skip_ws(&mut self) {
            while let Some(c) = self.peek() {
                if c.is_whitespace() {
                    self.pos += c.len_utf8();
                } else {
                    break;
                }
            }
        }

        fn peek(&self) -> Option<char> {
            self.src[self.pos..].chars().next()
        }

        fn eat(&mut self, c: char) -> bool {
            self.skip_ws();
            if self.peek() == Some(c) {
                self.pos += c.len_utf8();
                true
            } else {
                false
            }
        }

        fn expr(&mut self) -> Result<MomentPolynomial> {
            let mut acc = if self.eat('-') {
                -&self.term()?
            } else {
                self.eat('+');
                self.term()?
            };
            loop {
                if self.eat('+') {
                    acc = &acc + &self.term()?;
                } else if self.eat('-') {
                    acc = &acc - &self.term()?;
                } else {
                    return Ok(acc);
                }
            }
        }

        fn term(&mut self) -> Result<MomentPolynomial> {
            let mut acc = self.power()?;
            loop {
                if self.eat('*') {
                    acc = &acc * &self.power()?;
                } else if self.eat('/') {
                    let at = self.pos;
                    let d = self.integer()?;
                    if d.is_zero() {
                        return Err(Error::parse(at, "division by zero"));
                    }
                    acc = acc.scale(&BigRational::from_integer(d).recip());
                } else {
                    return Ok(acc);
                }
            }
        }

        fn power(&mut self) -> Result<MomentPolynomial> {
            let base = self.atom()?;
            if self.eat('^') {
                let at = self.pos;
                let e = self.integer()?;
                let e = e
                    .to_u32()
                    .filter(|&e| e <= 64)
                    .ok_or_else(|| Error::parse(at, "exponent out of range"))?;
                Ok(base.pow(e))
            } else {
                Ok(base)
            }
        }

        fn atom(&mut self) -> Result<MomentPolynomial> {
            self.skip_ws();
            let at = self.pos;
            match self.peek() {
                Some('(') => {
                    self.pos += 1;
                    let inner = self.expr()?;
                    if !self.eat(')') {
                        return Err(Error::parse(self.pos, "expected `)`"));
                    }
                    Ok(inner)
                }
                Some(c) if c.is_ascii_digit() => {
                    let n = self.integer()?;
                    Ok(MomentPolynomial::constant(
                        self.dim,
                        BigRational::from_integer(n),
                    ))
                }
                Some('-') => {
                    self.pos += 1;
                    Ok(-&self.power()?)
                }
                Some(_) => self.symbol(),
                None => Err(Error::parse(at, "unexpected end of expression")),
            }
        }

        fn integer(&mut self) -> Result<BigInt> {
            self.skip_ws();
            let start = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
            self.src[start..self.pos]
                .parse::<BigInt>()
                .map_err(|_| Error::parse(start, "expected an integer"))
        }

        fn symbol(&mut self) -> Result<MomentPolynomial> {
            let start = self.pos;
            let rest = &self.src[start..];
            let prefix = ["mu", "μ", "m"]
                .into_iter()
                .find(|p| rest.starts_with(p))
                .ok_or_else(|| Error::parse(start, "expected a moment symbol such as `mu20`"))?;
            self.pos += prefix.len();
            if self.src[self.pos..].starts_with('_') {
                self.pos += 1;
            }
            let digits_start = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
            let digits: Vec<u8> = self.src[digits_start..self.pos]
                .bytes()
                .map(|b| b - b'0')
                .collect();
            if digits.len() != self.dim {
                return Err(Error::parse(
                    start,
                    format!("moment symbol needs {} index digits", self.dim),
                ));
            }
            Ok(MomentPolynomial::symbol(MomentIndex::from_exps(
                self.dim, &digits,
            )))
        }
    }
}
