//! Noncommutative polynomial engine.
//!
//! Elements live in one of three algebra modes: the pair-generator mode with
//! antisymmetric coordinates `x[μ,ν]` and derivatives `d[μ,ν]`, the extended
//! mode which adds a commuting vector pair `p[μ]`/`dv[μ]`, and the plain
//! vector mode with `xa[μ]`/`da[μ]`. In every mode each derivative generator
//! pairs with exactly one coordinate generator, and their commutator is a
//! metric sign; everything else commutes. Polynomials are stored in normal
//! order (coordinates to the left of derivatives) with exact
//! Gaussian-rational coefficients.

mod parse;
#[cfg(test)]
mod tests;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::exactnum::{binomial, GaussianRational, Rational};
use crate::Error;

/// Diagonal metric signature.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Euclidean,
    Minkowski,
}

/// Diagonal metric on indices `1..=dim`: the identity, or with the first
/// diagonal entry flipped to `-1` (index 1 is the time direction).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Metric {
    dim: u8,
    kind: MetricKind,
}

impl Metric {
    pub fn new(dim: u8, kind: MetricKind) -> Result<Self, Error> {
        if dim < 1 {
            return Err(Error::DimensionTooSmall(dim));
        }
        Ok(Metric { dim, kind })
    }

    pub fn euclidean(dim: u8) -> Result<Self, Error> {
        Metric::new(dim, MetricKind::Euclidean)
    }

    pub fn minkowski(dim: u8) -> Result<Self, Error> {
        Metric::new(dim, MetricKind::Minkowski)
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    /// Diagonal entry at `mu` (1-based): `±1`.
    pub fn sign(&self, mu: u8) -> i8 {
        assert!(
            (1..=self.dim).contains(&mu),
            "metric index {mu} out of range 1..={}",
            self.dim
        );
        match self.kind {
            MetricKind::Euclidean => 1,
            MetricKind::Minkowski => {
                if mu == 1 {
                    -1
                } else {
                    1
                }
            }
        }
    }

    /// Full metric entry `g(μ,ν)`: zero off the diagonal.
    pub fn g(&self, mu: u8, nu: u8) -> i8 {
        if mu == nu {
            self.sign(mu)
        } else {
            assert!((1..=self.dim).contains(&mu) && (1..=self.dim).contains(&nu));
            0
        }
    }

    /// `g(lo,lo)·g(hi,hi)` — the weight a canonical pair index carries in
    /// metric contractions.
    pub fn pair_weight(&self, p: PairIndex) -> i8 {
        self.sign(p.lo()) * self.sign(p.hi())
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            MetricKind::Euclidean => "euclidean",
            MetricKind::Minkowski => "minkowski",
        };
        write!(f, "{kind}({})", self.dim)
    }
}

/// Canonical antisymmetric index pair `(lo, hi)` with `lo < hi` (1-based).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PairIndex {
    lo: u8,
    hi: u8,
}

impl PairIndex {
    /// Requires `1 <= lo < hi`.
    pub fn new(lo: u8, hi: u8) -> Result<Self, Error> {
        if lo == hi {
            return Err(Error::DiagonalPair(lo));
        }
        if lo == 0 || hi == 0 {
            return Err(Error::Parse(format!("pair indices are 1-based, got ({lo},{hi})")));
        }
        if lo < hi {
            Ok(PairIndex { lo, hi })
        } else {
            Err(Error::Parse(format!("pair ({lo},{hi}) is not in canonical order")))
        }
    }

    /// Canonicalizes an arbitrary off-diagonal pair; the flag reports whether
    /// the components were swapped (an antisymmetric quantity picks up `-1`).
    pub fn normalize(a: u8, b: u8) -> Result<(Self, bool), Error> {
        match a.cmp(&b) {
            Ordering::Less => Ok((PairIndex::new(a, b)?, false)),
            Ordering::Greater => Ok((PairIndex::new(b, a)?, true)),
            Ordering::Equal => Err(Error::DiagonalPair(a)),
        }
    }

    pub fn lo(&self) -> u8 {
        self.lo
    }

    pub fn hi(&self) -> u8 {
        self.hi
    }

    /// All canonical pairs on `1..=n` in lexicographic order.
    pub fn canonical_list(n: u8) -> Vec<PairIndex> {
        let mut out = Vec::new();
        for lo in 1..n {
            for hi in (lo + 1)..=n {
                out.push(PairIndex { lo, hi });
            }
        }
        out
    }

    /// Position of this pair in [`PairIndex::canonical_list`]`(n)`.
    pub fn rank(&self, n: u8) -> usize {
        let (lo, hi, n) = (self.lo as usize, self.hi as usize, n as usize);
        debug_assert!(self.hi as usize <= n);
        (lo - 1) * n - lo * (lo - 1) / 2 + (hi - lo) - 1
    }
}

impl fmt::Display for PairIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// A single algebra generator.
///
/// Coordinate variants come first so that the derived order puts every
/// coordinate generator before every derivative generator; sorted factor
/// lists are therefore automatically in normal order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Generator {
    /// Antisymmetric coordinate `x[μ,ν]` (pair modes).
    XPair(PairIndex),
    /// Momentum-like coordinate `p[μ]` (extended mode).
    PVec(u8),
    /// Vector coordinate `xa[μ]` (vector mode).
    XVec(u8),
    /// Antisymmetric derivative `d[μ,ν]` (pair modes).
    DPair(PairIndex),
    /// Vector derivative `dv[μ]` (extended mode), paired with `p[μ]`.
    DVec(u8),
    /// Vector derivative `da[μ]` (vector mode), paired with `xa[μ]`.
    DAVec(u8),
}

impl Generator {
    pub fn is_coordinate(&self) -> bool {
        matches!(self, Generator::XPair(_) | Generator::PVec(_) | Generator::XVec(_))
    }

    pub fn is_derivative(&self) -> bool {
        !self.is_coordinate()
    }

    /// The unique generator this one has a nonzero commutator with.
    pub fn partner(&self) -> Generator {
        match *self {
            Generator::XPair(p) => Generator::DPair(p),
            Generator::PVec(k) => Generator::DVec(k),
            Generator::XVec(k) => Generator::DAVec(k),
            Generator::DPair(p) => Generator::XPair(p),
            Generator::DVec(k) => Generator::PVec(k),
            Generator::DAVec(k) => Generator::XVec(k),
        }
    }

    fn max_index(&self) -> u8 {
        match *self {
            Generator::XPair(p) | Generator::DPair(p) => p.hi(),
            Generator::PVec(k) | Generator::XVec(k) | Generator::DVec(k) | Generator::DAVec(k) => k,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Generator::XPair(p) => write!(f, "x{p}"),
            Generator::DPair(p) => write!(f, "d{p}"),
            Generator::PVec(k) => write!(f, "p[{k}]"),
            Generator::DVec(k) => write!(f, "dv[{k}]"),
            Generator::XVec(k) => write!(f, "xa[{k}]"),
            Generator::DAVec(k) => write!(f, "da[{k}]"),
        }
    }
}

/// Which family of generators an [`Algebra`] carries.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum AlgebraKind {
    /// `x[μ,ν]`, `d[μ,ν]` only.
    Heisenberg,
    /// Pair generators plus the commuting vector pair `p[μ]`, `dv[μ]`.
    ExtendedHeisenberg,
    /// Vector generators `xa[μ]`, `da[μ]` with Kronecker pairing.
    Weyl,
}

impl AlgebraKind {
    /// Stable name used by serialized dumps.
    pub fn name(self) -> &'static str {
        match self {
            AlgebraKind::Heisenberg => "pair",
            AlgebraKind::ExtendedHeisenberg => "extended-pair",
            AlgebraKind::Weyl => "vector",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "pair" => Some(AlgebraKind::Heisenberg),
            "extended-pair" => Some(AlgebraKind::ExtendedHeisenberg),
            "vector" => Some(AlgebraKind::Weyl),
            _ => None,
        }
    }
}

/// An algebra mode together with its metric.
///
/// The metric fixes both the index range `1..=dim` and the sign every
/// derivative/coordinate pairing carries.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Algebra {
    kind: AlgebraKind,
    metric: Metric,
}

impl Algebra {
    pub fn new(kind: AlgebraKind, metric: Metric) -> Result<Self, Error> {
        match kind {
            AlgebraKind::Heisenberg => Algebra::heisenberg(metric),
            AlgebraKind::ExtendedHeisenberg => Algebra::extended(metric),
            AlgebraKind::Weyl => {
                if metric.kind() != MetricKind::Euclidean {
                    return Err(Error::Precondition(
                        "vector mode always uses the Kronecker pairing".into(),
                    ));
                }
                Algebra::weyl(metric.dim())
            }
        }
    }

    /// Pair-generator mode; needs `dim >= 2` so at least one pair exists.
    pub fn heisenberg(metric: Metric) -> Result<Self, Error> {
        if metric.dim() < 2 {
            return Err(Error::DimensionTooSmall(metric.dim()));
        }
        Ok(Algebra { kind: AlgebraKind::Heisenberg, metric })
    }

    /// Pair-generator mode extended by `p[μ]`/`dv[μ]`.
    pub fn extended(metric: Metric) -> Result<Self, Error> {
        if metric.dim() < 2 {
            return Err(Error::DimensionTooSmall(metric.dim()));
        }
        Ok(Algebra { kind: AlgebraKind::ExtendedHeisenberg, metric })
    }

    /// Vector mode on `m` coordinates; the pairing is the Kronecker delta.
    pub fn weyl(m: u8) -> Result<Self, Error> {
        Ok(Algebra { kind: AlgebraKind::Weyl, metric: Metric::euclidean(m)? })
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn dim(&self) -> u8 {
        self.metric.dim()
    }

    pub fn is_valid(&self, g: Generator) -> bool {
        let family_ok = match self.kind {
            AlgebraKind::Heisenberg => {
                matches!(g, Generator::XPair(_) | Generator::DPair(_))
            }
            AlgebraKind::ExtendedHeisenberg => matches!(
                g,
                Generator::XPair(_) | Generator::DPair(_) | Generator::PVec(_) | Generator::DVec(_)
            ),
            AlgebraKind::Weyl => matches!(g, Generator::XVec(_) | Generator::DAVec(_)),
        };
        family_ok && g.max_index() <= self.dim() && g.max_index() >= 1
    }

    pub fn check_generator(&self, g: Generator) -> Result<(), Error> {
        if self.is_valid(g) {
            Ok(())
        } else {
            Err(Error::InvalidGenerator { gen: g.to_string(), algebra: self.to_string() })
        }
    }

    /// Commutator sign `[d, c]` for a derivative/coordinate pair, or `None`
    /// when the two commute.
    pub fn pairing(&self, d: Generator, c: Generator) -> Option<i8> {
        if !d.is_derivative() || !c.is_coordinate() || d.partner() != c {
            return None;
        }
        let sign = match d {
            Generator::DPair(p) => self.metric.pair_weight(p),
            Generator::DVec(k) => self.metric.sign(k),
            Generator::DAVec(_) => 1,
            _ => unreachable!(),
        };
        Some(sign)
    }

    /// Every coordinate generator of this algebra, in canonical order.
    pub fn coordinate_generators(&self) -> Vec<Generator> {
        let n = self.dim();
        match self.kind {
            AlgebraKind::Heisenberg => {
                PairIndex::canonical_list(n).into_iter().map(Generator::XPair).collect()
            }
            AlgebraKind::ExtendedHeisenberg => PairIndex::canonical_list(n)
                .into_iter()
                .map(Generator::XPair)
                .chain((1..=n).map(Generator::PVec))
                .collect(),
            AlgebraKind::Weyl => (1..=n).map(Generator::XVec).collect(),
        }
    }

    /// Every derivative generator of this algebra, in canonical order.
    pub fn derivative_generators(&self) -> Vec<Generator> {
        self.coordinate_generators().into_iter().map(|g| g.partner()).collect()
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            AlgebraKind::Heisenberg => "pair",
            AlgebraKind::ExtendedHeisenberg => "extended-pair",
            AlgebraKind::Weyl => "vector",
        };
        write!(f, "{kind} algebra over {}", self.metric)
    }
}

/// A normal-ordered word: sorted `(generator, exponent)` factors.
///
/// Because the generator order puts coordinates first, the factor list is the
/// normal form `x-part · d-part`; same-class generators commute, so the sort
/// within each class is harmless.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    factors: Vec<(Generator, u32)>,
}

impl Monomial {
    pub fn unit() -> Self {
        Monomial::default()
    }

    pub fn generator(g: Generator) -> Self {
        Monomial { factors: vec![(g, 1)] }
    }

    /// Builds from arbitrary factors: sorts, merges duplicates, drops zero
    /// exponents. Factors of the same class commute exactly, and the sort
    /// never moves a derivative past a coordinate, so no signs arise.
    pub fn from_factors(factors: impl IntoIterator<Item = (Generator, u32)>) -> Self {
        let mut list: Vec<(Generator, u32)> = factors.into_iter().filter(|&(_, e)| e > 0).collect();
        list.sort_by_key(|&(g, _)| g);
        let mut merged: Vec<(Generator, u32)> = Vec::with_capacity(list.len());
        for (g, e) in list {
            match merged.last_mut() {
                Some((last, exp)) if *last == g => *exp += e,
                _ => merged.push((g, e)),
            }
        }
        Monomial { factors: merged }
    }

    pub fn factors(&self) -> &[(Generator, u32)] {
        &self.factors
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn exponent(&self, g: Generator) -> u32 {
        self.factors
            .binary_search_by_key(&g, |&(h, _)| h)
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    /// Total exponent of derivative generators.
    pub fn d_degree(&self) -> u32 {
        self.factors.iter().filter(|(g, _)| g.is_derivative()).map(|&(_, e)| e).sum()
    }

    /// Total exponent of coordinate generators.
    pub fn x_degree(&self) -> u32 {
        self.degree() - self.d_degree()
    }

    /// Index of the first derivative factor (the normal-order split point).
    fn split_point(&self) -> usize {
        self.factors.partition_point(|(g, _)| g.is_coordinate())
    }

    /// Coordinate factors, then derivative factors.
    #[allow(clippy::type_complexity)]
    pub fn split(&self) -> (&[(Generator, u32)], &[(Generator, u32)]) {
        self.factors.split_at(self.split_point())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    /// Graded order: total degree first, then lexicographic comparison of
    /// exponent vectors with earlier generators more significant (a higher
    /// exponent on an earlier generator sorts later).
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let (mut a, mut b) = (self.factors.iter(), other.factors.iter());
            let (mut fa, mut fb) = (a.next(), b.next());
            loop {
                match (fa, fb) {
                    (None, None) => return Ordering::Equal,
                    (Some(_), None) => return Ordering::Greater,
                    (None, Some(_)) => return Ordering::Less,
                    (Some(&(ga, ea)), Some(&(gb, eb))) => match ga.cmp(&gb) {
                        // `self` has a nonzero exponent on an earlier
                        // generator than `other` does: it sorts later.
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                        Ordering::Equal => match ea.cmp(&eb) {
                            Ordering::Equal => {
                                fa = a.next();
                                fb = b.next();
                            }
                            unequal => return unequal,
                        },
                    },
                }
            }
        })
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return write!(f, "1");
        }
        for (i, (g, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{g}")?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Merges two sorted factor lists by adding exponents.
fn merge_factors(a: &[(Generator, u32)], b: &[(Generator, u32)]) -> Vec<(Generator, u32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Noncommutative polynomial in normal order over one algebra mode.
///
/// The term map never stores a zero coefficient, every generator is valid for
/// the algebra, and map order is the graded order on monomials — so equal
/// polynomials have identical representations and serialization is canonical.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NCPoly {
    algebra: Algebra,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl NCPoly {
    pub fn zero(algebra: Algebra) -> Self {
        NCPoly { algebra, terms: BTreeMap::new() }
    }

    pub fn one(algebra: Algebra) -> Self {
        NCPoly::scalar(algebra, GaussianRational::one())
    }

    pub fn scalar(algebra: Algebra, c: GaussianRational) -> Self {
        let mut poly = NCPoly::zero(algebra);
        if !c.is_zero() {
            poly.terms.insert(Monomial::unit(), c);
        }
        poly
    }

    pub fn generator(algebra: Algebra, g: Generator) -> Result<Self, Error> {
        algebra.check_generator(g)?;
        let mut poly = NCPoly::zero(algebra);
        poly.terms.insert(Monomial::generator(g), GaussianRational::one());
        Ok(poly)
    }

    /// `x[i,j]` with antisymmetry applied: reversed order negates, a diagonal
    /// index yields the zero polynomial.
    pub fn x_pair(algebra: Algebra, i: u8, j: u8) -> Result<Self, Error> {
        Self::antisymmetric_generator(algebra, i, j, Generator::XPair)
    }

    /// `d[i,j]` with the same normalization as [`NCPoly::x_pair`].
    pub fn d_pair(algebra: Algebra, i: u8, j: u8) -> Result<Self, Error> {
        Self::antisymmetric_generator(algebra, i, j, Generator::DPair)
    }

    fn antisymmetric_generator(
        algebra: Algebra,
        i: u8,
        j: u8,
        make: impl Fn(PairIndex) -> Generator,
    ) -> Result<Self, Error> {
        if i == j {
            if i == 0 || i > algebra.dim() {
                return Err(Error::IndexOutOfRange { index: i, dim: algebra.dim() });
            }
            return Ok(NCPoly::zero(algebra));
        }
        let (pair, negated) = PairIndex::normalize(i, j)?;
        let poly = NCPoly::generator(algebra, make(pair))?;
        Ok(if negated { -&poly } else { poly })
    }

    pub fn p_vec(algebra: Algebra, k: u8) -> Result<Self, Error> {
        NCPoly::generator(algebra, Generator::PVec(k))
    }

    pub fn d_vec(algebra: Algebra, k: u8) -> Result<Self, Error> {
        NCPoly::generator(algebra, Generator::DVec(k))
    }

    pub fn x_vec(algebra: Algebra, k: u8) -> Result<Self, Error> {
        NCPoly::generator(algebra, Generator::XVec(k))
    }

    pub fn da_vec(algebra: Algebra, k: u8) -> Result<Self, Error> {
        NCPoly::generator(algebra, Generator::DAVec(k))
    }

    pub fn from_terms(
        algebra: Algebra,
        terms: impl IntoIterator<Item = (Monomial, GaussianRational)>,
    ) -> Result<Self, Error> {
        let mut poly = NCPoly::zero(algebra);
        for (m, c) in terms {
            for &(g, _) in m.factors() {
                algebra.check_generator(g)?;
            }
            poly.add_term(m, c);
        }
        Ok(poly)
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> GaussianRational {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Largest derivative degree over all terms (zero for the zero poly).
    pub fn max_d_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::d_degree).max().unwrap_or(0)
    }

    /// Largest coordinate degree over all terms (zero for the zero poly).
    pub fn max_x_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::x_degree).max().unwrap_or(0)
    }

    pub fn contains_generator(&self, g: Generator) -> bool {
        self.terms.keys().any(|m| m.exponent(g) > 0)
    }

    fn add_term(&mut self, m: Monomial, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += &c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    fn check_compatible(&self, rhs: &NCPoly) -> Result<(), Error> {
        if self.algebra == rhs.algebra {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch {
                left: self.algebra.to_string(),
                right: rhs.algebra.to_string(),
            })
        }
    }

    pub fn checked_add(&self, rhs: &NCPoly) -> Result<NCPoly, Error> {
        self.check_compatible(rhs)?;
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, rhs: &NCPoly) -> Result<NCPoly, Error> {
        self.check_compatible(rhs)?;
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &GaussianRational) -> NCPoly {
        if c.is_zero() {
            return NCPoly::zero(self.algebra);
        }
        let terms = self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect();
        NCPoly { algebra: self.algebra, terms }
    }

    pub fn scale_rational(&self, c: &Rational) -> NCPoly {
        self.scale(&GaussianRational::from(c.clone()))
    }

    /// Normal-ordered product. See [`NCPoly::mul_bounded`].
    pub fn checked_mul(&self, rhs: &NCPoly) -> Result<NCPoly, Error> {
        self.mul_bounded(rhs, None)
    }

    /// Normal-ordered product, optionally discarding every term whose
    /// derivative degree would exceed `dmax`.
    ///
    /// For one term pair `x₁d₁ · x₂d₂` the only reordering needed is moving
    /// `d₁` past `x₂`. Each derivative generator interacts with exactly one
    /// coordinate generator (its partner, with commutator sign `s`), so the
    /// reduction factorizes over partner pairs:
    ///
    /// `d^a x^b = Σ_k k!·C(a,k)·C(b,k)·s^k · x^{b-k} d^{a-k}`.
    ///
    /// The bound is applied per term pair: a pair whose minimum possible
    /// result degree already exceeds `dmax` is skipped entirely, which is what
    /// makes truncated series products cheap.
    pub fn mul_bounded(&self, rhs: &NCPoly, dmax: Option<u32>) -> Result<NCPoly, Error> {
        self.check_compatible(rhs)?;
        let mut out = NCPoly::zero(self.algebra);
        for (m1, c1) in &self.terms {
            let (x1, d1) = m1.split();
            for (m2, c2) in &rhs.terms {
                let (x2, d2) = m2.split();
                // Partner pairs (exponent in d1, exponent in x2, sign).
                let mut links: Vec<(Generator, u32, Generator, u32, i8)> = Vec::new();
                let mut max_contraction = 0;
                for &(d, a) in d1 {
                    let c = d.partner();
                    let b = m2.exponent(c);
                    if b > 0 {
                        let sign = self.algebra.pairing(d, c).expect("partner pairing");
                        links.push((d, a, c, b, sign));
                        max_contraction += a.min(b);
                    }
                }
                if let Some(bound) = dmax {
                    let floor = (m1.d_degree() + m2.d_degree()).saturating_sub(max_contraction);
                    if floor > bound {
                        continue;
                    }
                }
                let c12 = c1 * c2;
                expand_contractions(&links, &c12, &mut |weight, used| {
                    let reduce = |fs: &[(Generator, u32)], pick: fn(&(Generator, u32, Generator, u32, i8)) -> Generator| {
                        fs.iter()
                            .map(|&(g, e)| {
                                let k = links
                                    .iter()
                                    .zip(used)
                                    .find(|(l, _)| pick(l) == g)
                                    .map(|(_, &k)| k)
                                    .unwrap_or(0);
                                (g, e - k)
                            })
                            .filter(|&(_, e)| e > 0)
                            .collect::<Vec<_>>()
                    };
                    let x2r = reduce(x2, |l| l.2);
                    let d1r = reduce(d1, |l| l.0);
                    let xs = merge_factors(x1, &x2r);
                    let ds = merge_factors(&d1r, d2);
                    let mono = Monomial { factors: merge_factors(&xs, &ds) };
                    if dmax.is_none_or(|bound| mono.d_degree() <= bound) {
                        out.add_term(mono, weight);
                    }
                });
            }
        }
        Ok(out)
    }

    /// `self·rhs − rhs·self`.
    pub fn checked_commutator(&self, rhs: &NCPoly) -> Result<NCPoly, Error> {
        self.commutator_bounded(rhs, None)
    }

    /// Commutator with the same derivative-degree bound as
    /// [`NCPoly::mul_bounded`].
    pub fn commutator_bounded(&self, rhs: &NCPoly, dmax: Option<u32>) -> Result<NCPoly, Error> {
        self.mul_bounded(rhs, dmax)?.checked_sub(&rhs.mul_bounded(self, dmax)?)
    }

    /// Drops every term of derivative degree above `dmax`.
    pub fn truncate(&self, dmax: u32) -> NCPoly {
        let terms =
            self.terms.iter().filter(|(m, _)| m.d_degree() <= dmax).map(|(m, c)| (m.clone(), c.clone()));
        NCPoly { algebra: self.algebra, terms: terms.collect() }
    }

    /// The sub-sum of terms with derivative degree exactly `d`.
    pub fn d_degree_part(&self, d: u32) -> NCPoly {
        let terms =
            self.terms.iter().filter(|(m, _)| m.d_degree() == d).map(|(m, c)| (m.clone(), c.clone()));
        NCPoly { algebra: self.algebra, terms: terms.collect() }
    }

    /// Re-tags the polynomial into `target`, validating every generator there.
    /// Embeds pair-mode values into the extended mode (and anything into any
    /// mode that accepts all its generators).
    pub fn promote(&self, target: Algebra) -> Result<NCPoly, Error> {
        NCPoly::from_terms(target, self.terms.iter().map(|(m, c)| (m.clone(), c.clone())))
    }

    /// Applies the operator to a coordinate polynomial.
    ///
    /// Derivative generators act as (signed) partial derivatives with respect
    /// to their partner coordinates; coordinate factors multiply.
    pub fn act(&self, state: &PolyState) -> Result<PolyState, Error> {
        self.check_compatible(&state.poly)?;
        let mut out = NCPoly::zero(self.algebra);
        for (m, c) in &self.terms {
            let (xs, ds) = m.split();
            let mut cur: BTreeMap<Monomial, GaussianRational> = state.poly.terms.clone();
            for &(d, k) in ds {
                let partner = d.partner();
                let sign = self.algebra.pairing(d, partner).expect("partner pairing");
                cur = differentiate(&cur, partner, k, sign);
                if cur.is_empty() {
                    break;
                }
            }
            for (mono, coeff) in cur {
                let grown = Monomial { factors: merge_factors(mono.factors(), xs) };
                out.add_term(grown, &coeff * c);
            }
        }
        PolyState::new(out)
    }
}

/// Enumerates contraction multiplicity vectors over the partner links,
/// calling `emit(total weight, multiplicities)` for each choice.
fn expand_contractions(
    links: &[(Generator, u32, Generator, u32, i8)],
    base: &GaussianRational,
    emit: &mut impl FnMut(GaussianRational, &[u32]),
) {
    fn walk(
        links: &[(Generator, u32, Generator, u32, i8)],
        idx: usize,
        used: &mut Vec<u32>,
        weight: GaussianRational,
        emit: &mut impl FnMut(GaussianRational, &[u32]),
    ) {
        if idx == links.len() {
            emit(weight, used);
            return;
        }
        let (_, a, _, b, sign) = links[idx];
        for k in 0..=a.min(b) {
            let mut factor = contraction_weight(a, b, k);
            if sign < 0 && k % 2 == 1 {
                factor = -factor;
            }
            used.push(k);
            walk(links, idx + 1, used, weight.clone() * GaussianRational::from(factor), emit);
            used.pop();
        }
    }
    let mut used = Vec::with_capacity(links.len());
    walk(links, 0, &mut used, base.clone(), emit);
}

/// `k!·C(a,k)·C(b,k)` — the number of ways to match `k` of `a` derivatives
/// with `k` of `b` coordinates.
fn contraction_weight(a: u32, b: u32, k: u32) -> Rational {
    let mut acc = binomial(a as usize, k as usize) * binomial(b as usize, k as usize);
    for j in 2..=k as usize {
        acc *= BigInt::from(j);
    }
    Rational::from_big(acc, BigInt::from(1))
}

/// `k`-fold signed partial derivative of a commuting-term map.
fn differentiate(
    terms: &BTreeMap<Monomial, GaussianRational>,
    coordinate: Generator,
    k: u32,
    sign: i8,
) -> BTreeMap<Monomial, GaussianRational> {
    let mut out = BTreeMap::new();
    for (m, c) in terms {
        let e = m.exponent(coordinate);
        if e < k {
            continue;
        }
        // Falling factorial e·(e-1)···(e-k+1), with the pairing sign per order.
        let mut factor = BigInt::from(1);
        for j in 0..k {
            factor *= BigInt::from(e - j);
        }
        if sign < 0 && k % 2 == 1 {
            factor = -factor;
        }
        let reduced = Monomial::from_factors(
            m.factors()
                .iter()
                .map(|&(g, exp)| if g == coordinate { (g, exp - k) } else { (g, exp) }),
        );
        let coeff = c * &GaussianRational::from(Rational::from_big(factor, BigInt::from(1)));
        match out.entry(reduced) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                if !coeff.is_zero() {
                    slot.insert(coeff);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += &coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }
    out
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let piece = if m.is_unit() {
                if c.is_real() { c.to_string() } else { format!("({c})") }
            } else if c.is_one() {
                m.to_string()
            } else if (-c).is_one() {
                format!("-{m}")
            } else if c.is_real() || c.re().is_zero() {
                format!("{c}*{m}")
            } else {
                format!("({c})*{m}")
            };
            if i == 0 {
                write!(f, "{piece}")?;
            } else if let Some(rest) = piece.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {piece}")?;
            }
        }
        Ok(())
    }
}

impl Add for &NCPoly {
    type Output = NCPoly;
    fn add(self, rhs: &NCPoly) -> NCPoly {
        self.checked_add(rhs).expect("polynomial addition")
    }
}

impl Sub for &NCPoly {
    type Output = NCPoly;
    fn sub(self, rhs: &NCPoly) -> NCPoly {
        self.checked_sub(rhs).expect("polynomial subtraction")
    }
}

impl Mul for &NCPoly {
    type Output = NCPoly;
    fn mul(self, rhs: &NCPoly) -> NCPoly {
        self.checked_mul(rhs).expect("polynomial multiplication")
    }
}

impl Neg for &NCPoly {
    type Output = NCPoly;
    fn neg(self) -> NCPoly {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect();
        NCPoly { algebra: self.algebra, terms }
    }
}

impl Add<&NCPoly> for NCPoly {
    type Output = NCPoly;
    fn add(self, rhs: &NCPoly) -> NCPoly {
        &self + rhs
    }
}

impl Sub<&NCPoly> for NCPoly {
    type Output = NCPoly;
    fn sub(self, rhs: &NCPoly) -> NCPoly {
        &self - rhs
    }
}

impl Mul<&NCPoly> for NCPoly {
    type Output = NCPoly;
    fn mul(self, rhs: &NCPoly) -> NCPoly {
        &self * rhs
    }
}

impl Neg for NCPoly {
    type Output = NCPoly;
    fn neg(self) -> NCPoly {
        -&self
    }
}

impl AddAssign<&NCPoly> for NCPoly {
    fn add_assign(&mut self, rhs: &NCPoly) {
        self.check_compatible(rhs).expect("polynomial addition");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

/// One serialized polynomial term: an exact coefficient string (`"a/b"` or
/// `"a/b+c/d*i"`) and the canonical monomial text (`"1"` for the unit).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDump {
    pub coeff: String,
    pub monomial: String,
}

impl NCPoly {
    /// Serializable term list, in canonical map order.
    pub fn to_term_dump(&self) -> Vec<TermDump> {
        self.terms
            .iter()
            .map(|(m, c)| TermDump { coeff: c.to_string(), monomial: m.to_string() })
            .collect()
    }

    /// Rebuilds a polynomial from a serialized term list.
    pub fn from_term_dump(algebra: Algebra, dump: &[TermDump]) -> Result<Self, Error> {
        let mut out = NCPoly::zero(algebra);
        for term in dump {
            let coeff: GaussianRational = term.coeff.parse()?;
            let mono = NCPoly::parse(algebra, &term.monomial)?;
            out = out.checked_add(&mono.scale(&coeff))?;
        }
        Ok(out)
    }
}

/// A polynomial in coordinate generators only — the things operators act on.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyState {
    poly: NCPoly,
}

impl PolyState {
    pub fn new(poly: NCPoly) -> Result<Self, Error> {
        if let Some(m) = poly.terms.keys().find(|m| m.d_degree() > 0) {
            return Err(Error::NotCoordinateOnly(m.to_string()));
        }
        Ok(PolyState { poly })
    }

    /// The constant polynomial `1`.
    pub fn unit(algebra: Algebra) -> Self {
        PolyState { poly: NCPoly::one(algebra) }
    }

    pub fn poly(&self) -> &NCPoly {
        &self.poly
    }

    pub fn into_poly(self) -> NCPoly {
        self.poly
    }
}
