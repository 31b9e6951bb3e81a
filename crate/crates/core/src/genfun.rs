//! Generating-function cores and their translation into moment polynomials.
//!
//! `f(i,j)` is the dot product of the position vectors of points `i` and
//! `j`; `g(i,j)` (2D) and `g(i,j,k)` (3D) is the determinant whose rows are
//! those vectors. A core is a product of such factors over point labels
//! `1..=n`. Integrating the core once per label against the shape replaces
//! each label's coordinate monomial `x^a y^b (z^c)` by the central moment
//! `mu_ab(c)`, which is what [`InvariantCore::translate`] does symbolically.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{check_dim, MomentIndex};
use crate::poly::{MomentPolynomial, Monomial};

/// Transformation group an invariant is built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Similarity,
    Affine,
    Rotation3D,
}

impl Group {
    pub fn name(&self) -> &'static str {
        match self {
            Group::Similarity => "similarity",
            Group::Affine => "affine",
            Group::Rotation3D => "rotation3d",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "similarity" => Ok(Group::Similarity),
            "affine" => Ok(Group::Affine),
            "rotation3d" => Ok(Group::Rotation3D),
            other => Err(Error::InvalidSpec(format!("unknown group `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FactorKind {
    F,
    G,
}

/// One generating-function factor with canonically sorted arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GfFactor {
    kind: FactorKind,
    args: [u8; 3],
    arity: u8,
}

impl GfFactor {
    /// Builds a factor and returns it with the sign picked up while sorting
    /// the arguments (`g` is antisymmetric, `f` symmetric).
    pub fn new(kind: FactorKind, args: &[u8], dim: usize) -> Result<(Self, i8)> {
        check_dim(dim)?;
        let arity = match kind {
            FactorKind::F => 2,
            FactorKind::G => dim,
        };
        let name = match kind {
            FactorKind::F => 'f',
            FactorKind::G => 'g',
        };
        if args.len() != arity {
            return Err(Error::InvalidFactor(format!(
                "{name} takes {arity} labels in {dim}D, got {}",
                args.len()
            )));
        }
        if args.contains(&0) {
            return Err(Error::InvalidFactor("labels start at 1".into()));
        }
        let mut sorted = [0u8; 3];
        sorted[..arity].copy_from_slice(args);
        let mut sign = 1i8;
        // Insertion sort, counting transpositions.
        for i in 1..arity {
            let mut j = i;
            while j > 0 && sorted[j - 1] > sorted[j] {
                sorted.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if kind == FactorKind::G && sorted[..arity].windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidFactor(format!(
                "g needs distinct labels, got {:?} (it vanishes identically)",
                args
            )));
        }
        if kind == FactorKind::F {
            sign = 1;
        }
        Ok((
            Self {
                kind,
                args: sorted,
                arity: arity as u8,
            },
            sign,
        ))
    }

    pub fn f(i: u8, j: u8) -> Self {
        Self::new(FactorKind::F, &[i, j], 2).expect("valid f").0
    }

    pub fn kind(&self) -> FactorKind {
        self.kind
    }

    pub fn args(&self) -> &[u8] {
        &self.args[..self.arity as usize]
    }

    /// Relabeled factor with its arguments re-sorted and the sign discarded.
    fn relabeled_unsigned(&self, perm: &[u8]) -> Self {
        let mut out = *self;
        for a in &mut out.args[..self.arity as usize] {
            *a = perm[*a as usize - 1];
        }
        out.args[..self.arity as usize].sort_unstable();
        out
    }

    fn relabeled(&self, perm: &[u8]) -> (Self, i8) {
        let mapped: Vec<u8> = self.args().iter().map(|&a| perm[a as usize - 1]).collect();
        let dim = if self.kind == FactorKind::G {
            self.arity as usize
        } else {
            2
        };
        Self::new(self.kind, &mapped, dim).expect("relabeling keeps factors valid")
    }

    /// Coordinate expansion: signed products of `(label index, axis)` pairs.
    fn expansion(&self, dim: usize) -> Vec<(i8, Vec<(usize, usize)>)> {
        let a = self.args();
        let l = |k: usize| a[k] as usize - 1;
        match self.kind {
            FactorKind::F => (0..dim)
                .map(|axis| (1, vec![(l(0), axis), (l(1), axis)]))
                .collect(),
            FactorKind::G if dim == 2 => vec![
                (1, vec![(l(0), 0), (l(1), 1)]),
                (-1, vec![(l(1), 0), (l(0), 1)]),
            ],
            FactorKind::G => PERMS3
                .iter()
                .map(|(s, p)| (*s, vec![(l(0), p[0]), (l(1), p[1]), (l(2), p[2])]))
                .collect(),
        }
    }
}

/// Sorted factor list after relabeling `label -> perm[label - 1]`, ignoring signs.
pub(crate) fn relabeled_key(factors: &[GfFactor], perm: &[u8]) -> Vec<GfFactor> {
    let mut v: Vec<GfFactor> = factors.iter().map(|f| f.relabeled_unsigned(perm)).collect();
    v.sort_unstable();
    v
}

const PERMS3: [(i8, [usize; 3]); 6] = [
    (1, [0, 1, 2]),
    (1, [1, 2, 0]),
    (1, [2, 0, 1]),
    (-1, [0, 2, 1]),
    (-1, [1, 0, 2]),
    (-1, [2, 1, 0]),
];

impl fmt::Display for GfFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            FactorKind::F => "f",
            FactorKind::G => "g",
        };
        let args: Vec<String> = self.args().iter().map(u8::to_string).collect();
        write!(f, "{name}({})", args.join(","))
    }
}

/// Product of generating functions over point labels `1..=n`, with a sign.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InvariantCore {
    dim: u8,
    factors: Vec<GfFactor>,
    sign: i8,
}

impl InvariantCore {
    /// Builds a core from raw `(kind, labels)` factors. Labels must cover `1..=n` without gaps.
    pub fn new(dim: usize, factors: &[(FactorKind, Vec<u8>)]) -> Result<Self> {
        let mut built = Vec::with_capacity(factors.len());
        let mut sign = 1i8;
        for (kind, args) in factors {
            let (fac, s) = GfFactor::new(*kind, args, dim)?;
            sign *= s;
            built.push(fac);
        }
        Self::from_factors(dim, built, sign)
    }

    pub(crate) fn from_factors(dim: usize, mut factors: Vec<GfFactor>, sign: i8) -> Result<Self> {
        check_dim(dim)?;
        if factors.is_empty() {
            return Err(Error::InvalidCore(
                "a core needs at least one factor".into(),
            ));
        }
        for fac in &factors {
            if fac.kind == FactorKind::G && fac.arity as usize != dim {
                return Err(Error::InvalidCore(format!(
                    "{fac} does not fit a {dim}D core"
                )));
            }
        }
        factors.sort_unstable();
        let core = Self {
            dim: dim as u8,
            factors,
            sign,
        };
        let occ = core.occurrences();
        if let Some(missing) = occ.iter().position(|&c| c == 0) {
            return Err(Error::InvalidCore(format!(
                "labels must form 1..={}, label {} is unused",
                occ.len(),
                missing + 1
            )));
        }
        Ok(core)
    }

    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        let sum = CoreSum::parse(text, dim)?;
        match sum.terms() {
            [(c, core)] if c.abs().is_one() => {
                let mut core = core.clone();
                if c.is_negative() {
                    core.sign = -core.sign;
                }
                Ok(core)
            }
            _ => Err(Error::parse(0, "expected a single product of f/g factors")),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn factors(&self) -> &[GfFactor] {
        &self.factors
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Occurrence count per label; entry `i` is for label `i + 1`.
    pub fn occurrences(&self) -> Vec<usize> {
        let n = self
            .factors
            .iter()
            .flat_map(|f| f.args().iter().copied())
            .max()
            .unwrap_or(0) as usize;
        let mut occ = vec![0usize; n];
        for fac in &self.factors {
            for &a in fac.args() {
                occ[a as usize - 1] += 1;
            }
        }
        occ
    }

    /// Number of distinct point labels.
    pub fn num_points(&self) -> usize {
        self.occurrences().len()
    }

    pub fn count(&self, kind: FactorKind) -> usize {
        self.factors.iter().filter(|f| f.kind == kind).count()
    }

    /// `(degree, order)`: number of labels and the largest occurrence count of one label.
    pub fn degree_order(&self) -> (usize, usize) {
        let occ = self.occurrences();
        (occ.len(), occ.iter().copied().max().unwrap_or(0))
    }

    /// Odd number of `g` factors: the core changes sign under reflections.
    pub fn is_skew(&self) -> bool {
        self.count(FactorKind::G) % 2 == 1
    }

    /// Power of `mu00` that turns the translated core into an absolute invariant.
    ///
    /// Affine: points plus `g` factors. Similarity (2D): points plus all factors.
    /// Rotation3D: 0, since rotations leave every weight and moment scale untouched.
    pub fn normalization_exponent(&self, group: Group) -> Result<u32> {
        let n = self.num_points() as u32;
        let nf = self.count(FactorKind::F) as u32;
        let ng = self.count(FactorKind::G) as u32;
        match group {
            Group::Affine if nf > 0 => Err(Error::NotAffineCovariant),
            Group::Affine => Ok(n + ng),
            Group::Similarity if self.dim != 2 => Err(Error::Normalization(
                "similarity normalization is defined for 2D cores".into(),
            )),
            Group::Similarity => Ok(n + nf + ng),
            Group::Rotation3D => Ok(0),
        }
    }

    pub fn relabeled(&self, perm: &[u8]) -> Self {
        let mut sign = self.sign;
        let mut v = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            let (g, s) = f.relabeled(perm);
            sign *= s;
            v.push(g);
        }
        v.sort_unstable();
        Self {
            dim: self.dim,
            factors: v,
            sign,
        }
    }

    /// Expands the core into coordinate monomials and replaces each label's
    /// monomial by the matching central moment. Terms that contain an
    /// order-one moment vanish, since central first-order moments are zero.
    pub fn translate(&self) -> MomentPolynomial {
        if self.occurrences().contains(&1) {
            return MomentPolynomial::zero(self.dim());
        }
        let parts = self.components();
        if parts.len() > 1 {
            let product = parts.iter().map(InvariantCore::translate).fold(
                MomentPolynomial::constant(self.dim(), BigRational::one()),
                |acc, p| &acc * &p,
            );
            return if self.sign < 0 { -&product } else { product };
        }
        self.expand()
    }

    /// Splits the core into label-disjoint subproducts, each relabeled to `1..=m`.
    fn components(&self) -> Vec<InvariantCore> {
        let n = self.num_points();
        let mut parent: Vec<usize> = (0..n).collect();
        fn root(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for fac in &self.factors {
            let a = fac.args();
            for w in a.windows(2) {
                let (x, y) = (
                    root(&mut parent, w[0] as usize - 1),
                    root(&mut parent, w[1] as usize - 1),
                );
                parent[x] = y;
            }
        }
        let mut groups: Vec<(usize, Vec<GfFactor>)> = Vec::new();
        for fac in &self.factors {
            let r = root(&mut parent, fac.args()[0] as usize - 1);
            match groups.iter_mut().find(|(g, _)| *g == r) {
                Some((_, v)) => v.push(*fac),
                None => groups.push((r, vec![*fac])),
            }
        }
        if groups.len() == 1 {
            return vec![self.clone()];
        }
        groups
            .into_iter()
            .map(|(_, facs)| {
                let mut labels: Vec<u8> = facs.iter().flat_map(|f| f.args().to_vec()).collect();
                labels.sort_unstable();
                labels.dedup();
                let mut perm = vec![0u8; n];
                for (new, &old) in labels.iter().enumerate() {
                    perm[old as usize - 1] = new as u8 + 1;
                }
                let mut factors = Vec::with_capacity(facs.len());
                let mut sign = 1i8;
                for f in &facs {
                    let (g, s) = f.relabeled(&perm);
                    sign *= s;
                    factors.push(g);
                }
                factors.sort_unstable();
                Self {
                    dim: self.dim,
                    factors,
                    sign,
                }
            })
            .collect()
    }

    fn expand(&self) -> MomentPolynomial {
        let dim = self.dim();
        let n = self.num_points();
        let mut state: HashMap<Vec<u8>, i128> = HashMap::new();
        state.insert(vec![0u8; n * dim], self.sign as i128);
        for fac in &self.factors {
            let exp = fac.expansion(dim);
            let mut next: HashMap<Vec<u8>, i128> = HashMap::with_capacity(state.len() * exp.len());
            for (key, c) in &state {
                for (s, slots) in &exp {
                    let mut k = key.clone();
                    for &(label, axis) in slots {
                        k[label * dim + axis] += 1;
                    }
                    *next.entry(k).or_insert(0) += c * (*s as i128);
                }
            }
            next.retain(|_, c| *c != 0);
            state = next;
        }

        let mut merged: HashMap<Monomial, i128> = HashMap::new();
        'terms: for (key, c) in state {
            let mut syms = Vec::with_capacity(n);
            for label in 0..n {
                let exps = &key[label * dim..(label + 1) * dim];
                if exps.iter().map(|&e| e as usize).sum::<usize>() == 1 {
                    continue 'terms;
                }
                syms.push(MomentIndex::from_exps(dim, exps));
            }
            *merged.entry(Monomial::new(syms)).or_insert(0) += c;
        }
        MomentPolynomial::from_terms(
            dim,
            merged
                .into_iter()
                .map(|(m, c)| (BigRational::from_integer(c.into()), m)),
        )
    }
}

impl fmt::Display for InvariantCore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign < 0 {
            write!(f, "-")?;
        }
        write_factors(f, &self.factors)
    }
}

fn write_factors(f: &mut fmt::Formatter<'_>, factors: &[GfFactor]) -> fmt::Result {
    let mut i = 0;
    let mut first = true;
    while i < factors.len() {
        let mut run = 1;
        while i + run < factors.len() && factors[i + run] == factors[i] {
            run += 1;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        if run > 1 {
            write!(f, "{}^{run}", factors[i])?;
        } else {
            write!(f, "{}", factors[i])?;
        }
        i += run;
    }
    Ok(())
}

/// Rational linear combination of cores, e.g. `f(1,2)^2 - g(1,2)^2`.
/// Core signs are folded into the coefficients, so every stored core has sign `+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreSum {
    dim: usize,
    terms: Vec<(BigRational, InvariantCore)>,
}

impl CoreSum {
    pub fn single(core: InvariantCore) -> Self {
        let dim = core.dim();
        let mut s = Self { dim, terms: vec![] };
        s.push(BigRational::one(), core);
        s
    }

    pub fn from_terms(dim: usize, terms: Vec<(BigRational, InvariantCore)>) -> Result<Self> {
        let mut s = Self { dim, terms: vec![] };
        for (c, core) in terms {
            if core.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: core.dim(),
                });
            }
            s.push(c, core);
        }
        if s.terms.is_empty() {
            return Err(Error::InvalidCore("core sum cancels to zero".into()));
        }
        Ok(s)
    }

    fn push(&mut self, c: BigRational, mut core: InvariantCore) {
        let c = if core.sign < 0 { -c } else { c };
        core.sign = 1;
        if let Some(slot) = self
            .terms
            .iter_mut()
            .find(|(_, k)| k.factors == core.factors)
        {
            slot.0 += c;
        } else {
            self.terms.push((c, core));
        }
        self.terms.retain(|(c, _)| !c.is_zero());
    }

    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let products = core_parse::Parser::new(text, dim).parse()?;
        let mut terms = Vec::with_capacity(products.len());
        for (c, factors, sign) in products {
            let core = InvariantCore::from_factors(dim, factors, sign)?;
            terms.push((c, core));
        }
        Self::from_terms(dim, terms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(BigRational, InvariantCore)] {
        &self.terms
    }

    pub fn translate(&self) -> MomentPolynomial {
        let mut acc = MomentPolynomial::zero(self.dim);
        for (c, core) in &self.terms {
            acc = &acc + &core.translate().scale(c);
        }
        acc
    }

    /// Largest degree and order over the summands.
    pub fn degree_order(&self) -> (usize, usize) {
        self.terms
            .iter()
            .map(|(_, k)| k.degree_order())
            .fold((0, 0), |a, b| (a.0.max(b.0), a.1.max(b.1)))
    }

    /// Every summand is skew.
    pub fn is_skew(&self) -> bool {
        self.terms.iter().all(|(_, k)| k.is_skew())
    }

    pub fn count(&self, kind: FactorKind) -> usize {
        self.terms.iter().map(|(_, k)| k.count(kind)).sum()
    }

    /// Shared normalization exponent of all summands; mixed exponents are an error.
    pub fn normalization_exponent(&self, group: Group) -> Result<u32> {
        let mut ks = self
            .terms
            .iter()
            .map(|(_, k)| k.normalization_exponent(group));
        let first = ks.next().expect("core sums are nonempty")?;
        for k in ks {
            if k? != first {
                return Err(Error::Normalization(
                    "summands need different powers of mu00".into(),
                ));
            }
        }
        Ok(first)
    }
}

impl fmt::Display for CoreSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (c, core)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = c.abs();
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            write_factors(f, &core.factors)?;
        }
        Ok(())
    }
}

mod core_parse {
    //! Reader for `f(1,2)*g(1,2)^2 - 1/2*f(2,2)*(f(1,2) - g(1,2))` style text.
    //! Parenthesized sums are distributed over products.

    use super::*;
    use num_bigint::BigInt;

    /// Expanded form: signed products of factors with rational coefficients.
    type Expanded = Vec<(BigRational, Vec<GfFactor>, i8)>;

    pub(super) struct Parser<'a> {
        src: &'a [u8],
        pos: usize,
        dim: usize,
    }

    impl<'a> Parser<'a> {
        pub(super) fn new(src: &'a str, dim: usize) -> Self {
            Self {
                src: src.as_bytes(),
                pos: 0,
                dim,
            }
        }

        pub(super) fn parse(mut self) -> Result<Expanded> {
            let e = self.expr()?;
            self.ws();
            if self.pos != self.src.len() {
                return Err(Error::parse(self.pos, "unexpected trailing input"));
            }
            Ok(e)
        }

        fn ws(&mut self) {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
        }

        fn eat(&mut self, c: u8) -> bool {
            self.ws();
            if self.src.get(self.pos) == Some(&c) {
                self.pos += 1;
                true
            } else {
                false
            }
        }

        fn expr(&mut self) -> Result<Expanded> {
            let mut acc = if self.eat(b'-') {
                negate(self.term()?)
            } else {
                self.eat(b'+');
                self.term()?
            };
            loop {
                if self.eat(b'+') {
                    acc.extend(self.term()?);
                } else if self.eat(b'-') {
                    acc.extend(negate(self.term()?));
                } else {
                    return Ok(acc);
                }
            }
        }

        fn term(&mut self) -> Result<Expanded> {
            let mut acc = self.power()?;
            loop {
                if self.eat(b'*') {
                    acc = multiply(&acc, &self.power()?);
                } else if self.eat(b'/') {
                    let at = self.pos;
                    let d = self.integer()?;
                    if d.is_zero() {
                        return Err(Error::parse(at, "division by zero"));
                    }
                    let inv = BigRational::from_integer(d).recip();
                    for t in &mut acc {
                        t.0 *= &inv;
                    }
                } else {
                    return Ok(acc);
                }
            }
        }

        fn power(&mut self) -> Result<Expanded> {
            let base = self.atom()?;
            if self.eat(b'^') {
                let at = self.pos;
                let e = self.integer()?;
                let e: u32 = e
                    .try_into()
                    .ok()
                    .filter(|&e: &u32| e <= 32)
                    .ok_or_else(|| Error::parse(at, "exponent out of range"))?;
                let mut acc = vec![(BigRational::one(), vec![], 1i8)];
                for _ in 0..e {
                    acc = multiply(&acc, &base);
                }
                Ok(acc)
            } else {
                Ok(base)
            }
        }

        fn atom(&mut self) -> Result<Expanded> {
            self.ws();
            let at = self.pos;
            match self.src.get(self.pos) {
                Some(b'(') => {
                    self.pos += 1;
                    let inner = self.expr()?;
                    if !self.eat(b')') {
                        return Err(Error::parse(self.pos, "expected `)`"));
                    }
                    Ok(inner)
                }
                Some(c) if c.is_ascii_digit() => {
                    let n = self.integer()?;
                    Ok(vec![(BigRational::from_integer(n), vec![], 1)])
                }
                Some(b'f') | Some(b'g') => {
                    let kind = if self.src[self.pos] == b'f' {
                        FactorKind::F
                    } else {
                        FactorKind::G
                    };
                    self.pos += 1;
                    if !self.eat(b'(') {
                        return Err(Error::parse(self.pos, "expected `(`"));
                    }
                    let mut args = Vec::new();
                    loop {
                        let la = self.pos;
                        let v = self.integer()?;
                        let v: u8 = v
                            .try_into()
                            .map_err(|_| Error::parse(la, "label out of range"))?;
                        args.push(v);
                        if self.eat(b',') {
                            continue;
                        }
                        if self.eat(b')') {
                            break;
                        }
                        return Err(Error::parse(self.pos, "expected `,` or `)`"));
                    }
                    let (fac, sign) = GfFactor::new(kind, &args, self.dim)
                        .map_err(|e| Error::parse(at, e.to_string()))?;
                    Ok(vec![(BigRational::one(), vec![fac], sign)])
                }
                Some(_) => Err(Error::parse(
                    at,
                    "expected `f(..)`, `g(..)`, a number or `(`",
                )),
                None => Err(Error::parse(at, "unexpected end of input")),
            }
        }

        fn integer(&mut self) -> Result<BigInt> {
            self.ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            std::str::from_utf8(&self.src[start..self.pos])
                .ok()
                .and_then(|s| s.parse::<BigInt>().ok())
                .ok_or_else(|| Error::parse(start, "expected an integer"))
        }
    }

    fn negate(mut e: Expanded) -> Expanded {
        for t in &mut e {
            t.0 = -t.0.clone();
        }
        e
    }

    fn multiply(a: &Expanded, b: &Expanded) -> Expanded {
        let mut out = Vec::with_capacity(a.len() * b.len());
        for (ca, fa, sa) in a {
            for (cb, fb, sb) in b {
                let mut f = fa.clone();
                f.extend_from_slice(fb);
                out.push((ca * cb, f, sa * sb));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn core(s: &str) -> InvariantCore {
        InvariantCore::parse(s, 2).unwrap()
    }

    fn poly(s: &str) -> MomentPolynomial {
        MomentPolynomial::parse(s, 2).unwrap()
    }

    #[test]
    fn disconnected_cores_translate_as_products() {
        for text in [
            "g(1,3)^2*g(2,4)^2",
            "f(1,1)*f(2,3)^2",
            "g(1,4)*g(1,4)*f(2,3)*g(2,3)",
            "f(1,1)*f(2,2)*f(3,3)",
        ] {
            let c = core(text);
            assert!(c.components().len() > 1, "{text}");
            assert_eq!(c.translate(), c.expand(), "{text}");
        }
        let c = InvariantCore::parse("-g(1,2)^2*f(3,3)", 2).unwrap();
        assert_eq!(c.translate(), c.expand());
        let c = InvariantCore::parse("g(1,3,5)^2*g(2,4,6)^2", 3).unwrap();
        assert_eq!(c.translate(), c.expand());
    }

    #[test]
    fn singly_used_labels_vanish() {
        assert!(core("g(1,2)*f(2,2)").translate().is_zero());
        assert!(core("g(1,2)*f(2,2)").expand().is_zero());
    }

    #[test]
    fn g_requires_distinct_labels() {
        assert!(matches!(
            GfFactor::new(FactorKind::G, &[1, 1], 2),
            Err(Error::InvalidFactor(_))
        ));
        assert!(matches!(
            GfFactor::new(FactorKind::G, &[1, 2, 2], 3),
            Err(Error::InvalidFactor(_))
        ));
        assert!(GfFactor::new(FactorKind::F, &[1, 1], 2).is_ok());
    }

    #[test]
    fn argument_canonicalization_sign() {
        let (g, s) = GfFactor::new(FactorKind::G, &[2, 1], 2).unwrap();
        assert_eq!((g.args(), s), (&[1u8, 2][..], -1));
        let (f, s) = GfFactor::new(FactorKind::F, &[2, 1], 2).unwrap();
        assert_eq!((f.args(), s), (&[1u8, 2][..], 1));
        let (g, s) = GfFactor::new(FactorKind::G, &[3, 1, 2], 3).unwrap();
        assert_eq!((g.args(), s), (&[1u8, 2, 3][..], 1));
        let (_, s) = GfFactor::new(FactorKind::G, &[2, 1, 3], 3).unwrap();
        assert_eq!(s, -1);
    }

    #[test]
    fn labels_must_be_contiguous() {
        assert!(matches!(
            InvariantCore::parse("g(1,3)", 2),
            Err(Error::InvalidCore(_))
        ));
        assert!(matches!(
            InvariantCore::parse("g(1,1)", 2),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn translate_f11() {
        assert_eq!(core("f(1,1)").translate(), poly("mu20 + mu02"));
    }

    #[test]
    fn translate_g12_vanishes() {
        assert!(core("g(1,2)").translate().is_zero());
        assert!(core("f(1,2)").translate().is_zero());
    }

    #[test]
    fn translate_g12_squared() {
        // (x1 y2 - x2 y1)^2 = x1^2 y2^2 - 2 x1 y1 x2 y2 + x2^2 y1^2
        assert_eq!(core("g(1,2)^2").translate(), poly("2*mu20*mu02 - 2*mu11^2"));
        assert_eq!(
            core("g(2,1)^2").translate().canonical(),
            core("g(1,2)^2").translate().canonical()
        );
        assert_eq!(core("g(2,1)").sign(), -1);
    }

    #[test]
    fn translate_i4() {
        assert_eq!(
            core("f(1,2)*f(1,1)*f(2,2)").translate(),
            poly("(mu30 + mu12)^2 + (mu21 + mu03)^2")
        );
    }

    #[test]
    fn degree_and_order() {
        assert_eq!(core("f(1,2)*f(1,1)*f(2,2)").degree_order(), (2, 3));
        assert_eq!(core("f(1,1)").degree_order(), (1, 2));
        assert_eq!(
            core("g(1,2)^2*g(3,4)^2*g(1,3)*g(2,4)").degree_order(),
            (4, 3)
        );
    }

    #[test]
    fn normalization_exponents() {
        assert_eq!(
            core("g(1,2)^2")
                .normalization_exponent(Group::Affine)
                .unwrap(),
            4
        );
        assert_eq!(
            core("f(1,1)")
                .normalization_exponent(Group::Similarity)
                .unwrap(),
            2
        );
        assert_eq!(
            core("g(1,2)^2*g(3,4)^2*g(1,3)*g(2,4)")
                .normalization_exponent(Group::Affine)
                .unwrap(),
            10
        );
        assert!(matches!(
            core("f(1,1)").normalization_exponent(Group::Affine),
            Err(Error::NotAffineCovariant)
        ));
    }

    #[test]
    fn core_sum_parsing_distributes() {
        let s = CoreSum::parse("f(2,2)*f(3,3)*(f(1,2)*f(1,3) - g(1,2)*g(1,3))", 2).unwrap();
        assert_eq!(s.terms().len(), 2);
        assert_eq!(
            s.to_string(),
            "f(1,2)*f(1,3)*f(2,2)*f(3,3) - f(2,2)*f(3,3)*g(1,2)*g(1,3)"
        );
        let half = CoreSum::parse("1/2*g(1,2)^2*f(1,2)", 2).unwrap();
        assert_eq!(half.to_string(), "1/2*f(1,2)*g(1,2)^2");
        // g(2,1) = -g(1,2), so the two products cancel.
        let merged = CoreSum::parse("g(1,2)^2 + g(2,1)*g(1,2)", 2).unwrap_err();
        assert!(matches!(merged, Error::InvalidCore(_)));
    }

    #[test]
    fn three_d_translation() {
        let j1 = InvariantCore::parse("f(1,1)", 3).unwrap().translate();
        assert_eq!(
            j1,
            MomentPolynomial::parse("mu200 + mu020 + mu002", 3).unwrap()
        );
        let j2 = InvariantCore::parse("g(1,2,3)^2", 3).unwrap().translate();
        let ref_j2 = MomentPolynomial::parse(
            "mu200*mu020*mu002 + 2*mu110*mu101*mu011 - mu011^2*mu200 - mu110^2*mu002 - mu101^2*mu020",
            3,
        )
        .unwrap();
        assert_eq!(
            j2.ratio_to(&ref_j2),
            Some(BigRational::from_integer(6.into()))
        );
    }

    #[test]
    fn display_round_trip() {
        let c = core("g(1,2)^2*g(2,3)*f(1,3)");
        assert_eq!(c.to_string(), "f(1,3)*g(1,2)^2*g(2,3)");
        assert_eq!(core(&c.to_string()), c);
    }
}
