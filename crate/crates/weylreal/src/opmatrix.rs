//! Matrices over commuting derivative polynomials.
//!
//! Rows and columns are indexed either by vector indices `1..=n` or by
//! canonical antisymmetric pairs `(lo,hi)` with `lo < hi`. Contraction over a
//! shared index is always metric-weighted: a vector index contributes
//! `Σ_k A_{ik}·g(k,k)·B_{kj}`, a pair index contributes
//! `2·Σ_{lo<hi} A_{i(lo,hi)}·g(lo,lo)·g(hi,hi)·B_{(lo,hi)j}` — the factor 2
//! and the weights make the canonical-pair sum equal to the full
//! antisymmetric double sum. The identity for this contraction is the metric
//! itself on vector spaces and `½·g(lo,lo)·g(hi,hi)` on the pair diagonal.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exactnum::{factorial, psi_coeff, psi_inv_coeff, GaussianRational, Rational};
use crate::ncalgebra::{Algebra, AlgebraKind, Metric, NCPoly, PairIndex, TermDump};
use crate::Error;

/// A polynomial containing derivative generators only. Everything inside
/// commutes, so these form an ordinary commutative ring.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DPoly(NCPoly);

impl DPoly {
    pub fn new(poly: NCPoly) -> Result<Self, Error> {
        if let Some((m, _)) = poly.terms().find(|(m, _)| m.x_degree() > 0) {
            return Err(Error::NotDerivativeOnly(m.to_string()));
        }
        Ok(DPoly(poly))
    }

    pub fn zero(algebra: Algebra) -> Self {
        DPoly(NCPoly::zero(algebra))
    }

    pub fn scalar(algebra: Algebra, c: GaussianRational) -> Self {
        DPoly(NCPoly::scalar(algebra, c))
    }

    pub fn one(algebra: Algebra) -> Self {
        DPoly(NCPoly::one(algebra))
    }

    /// `d[i,j]` with antisymmetric normalization.
    pub fn d_pair(algebra: Algebra, i: u8, j: u8) -> Result<Self, Error> {
        Ok(DPoly(NCPoly::d_pair(algebra, i, j)?))
    }

    /// `dv[k]` (extended mode).
    pub fn d_vec(algebra: Algebra, k: u8) -> Result<Self, Error> {
        Ok(DPoly(NCPoly::d_vec(algebra, k)?))
    }

    /// `da[k]` (vector mode).
    pub fn da_vec(algebra: Algebra, k: u8) -> Result<Self, Error> {
        Ok(DPoly(NCPoly::da_vec(algebra, k)?))
    }

    pub fn parse(algebra: Algebra, input: &str) -> Result<Self, Error> {
        DPoly::new(NCPoly::parse(algebra, input)?)
    }

    pub fn poly(&self) -> &NCPoly {
        &self.0
    }

    pub fn into_poly(self) -> NCPoly {
        self.0
    }

    pub fn algebra(&self) -> Algebra {
        self.0.algebra()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn max_d_degree(&self) -> u32 {
        self.0.max_d_degree()
    }

    /// True when every term has derivative degree exactly `d` (vacuously true
    /// for the zero polynomial).
    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.0.terms().all(|(m, _)| m.d_degree() == d)
    }

    pub fn add(&self, rhs: &DPoly) -> DPoly {
        DPoly(&self.0 + &rhs.0)
    }

    pub fn sub(&self, rhs: &DPoly) -> DPoly {
        DPoly(&self.0 - &rhs.0)
    }

    pub fn mul(&self, rhs: &DPoly) -> DPoly {
        DPoly(&self.0 * &rhs.0)
    }

    pub fn neg(&self) -> DPoly {
        DPoly(-&self.0)
    }

    pub fn scale(&self, c: &GaussianRational) -> DPoly {
        DPoly(self.0.scale(c))
    }

    pub fn scale_rational(&self, c: &Rational) -> DPoly {
        DPoly(self.0.scale_rational(c))
    }

    pub fn truncate(&self, dmax: u32) -> DPoly {
        DPoly(self.0.truncate(dmax))
    }
}

impl fmt::Display for DPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An index space: vectors `1..=n` or canonical pairs over `1..=n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Space {
    Vector(u8),
    Pair(u8),
}

impl Space {
    pub fn dim(&self) -> u8 {
        match *self {
            Space::Vector(n) | Space::Pair(n) => n,
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            Space::Vector(n) => n as usize,
            Space::Pair(n) => (n as usize) * (n as usize - 1) / 2,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn indices(&self) -> Vec<Idx> {
        match *self {
            Space::Vector(n) => (1..=n).map(Idx::Vector).collect(),
            Space::Pair(n) => PairIndex::canonical_list(n).into_iter().map(Idx::Pair).collect(),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Space::Vector(_) => "vector",
            Space::Pair(_) => "pair",
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name(), self.dim())
    }
}

/// One row/column label.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Idx {
    Vector(u8),
    Pair(PairIndex),
}

impl fmt::Display for Idx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Idx::Vector(k) => write!(f, "{k}"),
            Idx::Pair(p) => write!(f, "{p}"),
        }
    }
}

/// Serialized index: a bare number or a two-element array.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IdxRepr {
    Vector(u8),
    Pair([u8; 2]),
}

impl From<Idx> for IdxRepr {
    fn from(idx: Idx) -> Self {
        match idx {
            Idx::Vector(k) => IdxRepr::Vector(k),
            Idx::Pair(p) => IdxRepr::Pair([p.lo(), p.hi()]),
        }
    }
}

impl TryFrom<IdxRepr> for Idx {
    type Error = Error;
    fn try_from(repr: IdxRepr) -> Result<Idx, Error> {
        Ok(match repr {
            IdxRepr::Vector(k) => Idx::Vector(k),
            IdxRepr::Pair([a, b]) => Idx::Pair(PairIndex::new(a, b)?),
        })
    }
}

/// Dense matrix of derivative polynomials with metric-weighted contraction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OpMatrix {
    algebra: Algebra,
    rows: Space,
    cols: Space,
    entries: Vec<DPoly>,
}

impl OpMatrix {
    pub fn zero(algebra: Algebra, rows: Space, cols: Space) -> Result<Self, Error> {
        for space in [rows, cols] {
            if space.dim() != algebra.dim() {
                return Err(Error::ShapeMismatch(format!(
                    "space {space} does not match {algebra}"
                )));
            }
        }
        let entries = vec![DPoly::zero(algebra); rows.len() * cols.len()];
        Ok(OpMatrix { algebra, rows, cols, entries })
    }

    /// Builds entry-by-entry from a closure over index labels.
    pub fn from_fn(
        algebra: Algebra,
        rows: Space,
        cols: Space,
        mut f: impl FnMut(Idx, Idx) -> Result<DPoly, Error>,
    ) -> Result<Self, Error> {
        let mut out = OpMatrix::zero(algebra, rows, cols)?;
        for (i, row) in rows.indices().into_iter().enumerate() {
            for (j, col) in cols.indices().into_iter().enumerate() {
                let entry = f(row, col)?;
                if entry.algebra() != algebra {
                    return Err(Error::AlgebraMismatch {
                        left: algebra.to_string(),
                        right: entry.algebra().to_string(),
                    });
                }
                out.entries[i * cols.len() + j] = entry;
            }
        }
        Ok(out)
    }

    /// The unit of the metric contraction: `g(μ,ν)` on a vector space,
    /// `½·g(lo,lo)·g(hi,hi)` on the pair diagonal.
    pub fn identity(algebra: Algebra, space: Space) -> Result<Self, Error> {
        let metric = algebra.metric();
        OpMatrix::from_fn(algebra, space, space, |row, col| {
            let value = match (row, col) {
                (Idx::Vector(a), Idx::Vector(b)) if a == b => {
                    Rational::from_integer(metric.sign(a) as i64)
                }
                (Idx::Pair(p), Idx::Pair(q)) if p == q => {
                    Rational::new(metric.pair_weight(p) as i64, 2)
                }
                _ => Rational::zero(),
            };
            Ok(DPoly::scalar(algebra, GaussianRational::from(value)))
        })
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn rows(&self) -> Space {
        self.rows
    }

    pub fn cols(&self) -> Space {
        self.cols
    }

    fn offset(&self, row: Idx, col: Idx) -> usize {
        let pos = |space: Space, idx: Idx| -> usize {
            match (space, idx) {
                (Space::Vector(n), Idx::Vector(k)) if (1..=n).contains(&k) => (k - 1) as usize,
                (Space::Pair(n), Idx::Pair(p)) if p.hi() <= n => p.rank(n),
                _ => panic!("index {idx} does not belong to {space}"),
            }
        };
        pos(self.rows, row) * self.cols.len() + pos(self.cols, col)
    }

    pub fn entry(&self, row: Idx, col: Idx) -> &DPoly {
        &self.entries[self.offset(row, col)]
    }

    pub fn set_entry(&mut self, row: Idx, col: Idx, value: DPoly) -> Result<(), Error> {
        if value.algebra() != self.algebra {
            return Err(Error::AlgebraMismatch {
                left: self.algebra.to_string(),
                right: value.algebra().to_string(),
            });
        }
        let at = self.offset(row, col);
        self.entries[at] = value;
        Ok(())
    }

    pub fn add(&self, rhs: &OpMatrix) -> Result<OpMatrix, Error> {
        if self.rows != rhs.rows || self.cols != rhs.cols || self.algebra != rhs.algebra {
            return Err(Error::ShapeMismatch(format!(
                "cannot add {}×{} and {}×{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let entries =
            self.entries.iter().zip(&rhs.entries).map(|(a, b)| a.add(b)).collect();
        Ok(OpMatrix { algebra: self.algebra, rows: self.rows, cols: self.cols, entries })
    }

    pub fn scale(&self, c: &GaussianRational) -> OpMatrix {
        let entries = self.entries.iter().map(|e| e.scale(c)).collect();
        OpMatrix { algebra: self.algebra, rows: self.rows, cols: self.cols, entries }
    }

    pub fn scale_rational(&self, c: &Rational) -> OpMatrix {
        self.scale(&GaussianRational::from(c.clone()))
    }

    pub fn truncate(&self, dmax: u32) -> OpMatrix {
        let entries = self.entries.iter().map(|e| e.truncate(dmax)).collect();
        OpMatrix { algebra: self.algebra, rows: self.rows, cols: self.cols, entries }
    }

    /// Metric-contracted matrix product over the shared middle space.
    pub fn mat_mul(&self, rhs: &OpMatrix) -> Result<OpMatrix, Error> {
        if self.algebra != rhs.algebra {
            return Err(Error::AlgebraMismatch {
                left: self.algebra.to_string(),
                right: rhs.algebra.to_string(),
            });
        }
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot contract {}×{} with {}×{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let metric = self.algebra.metric();
        let mid = self.cols;
        OpMatrix::from_fn(self.algebra, self.rows, rhs.cols, |row, col| {
            let mut acc = DPoly::zero(self.algebra);
            for k in mid.indices() {
                let weight = match k {
                    Idx::Vector(v) => Rational::from_integer(metric.sign(v) as i64),
                    Idx::Pair(p) => Rational::from_integer(2 * metric.pair_weight(p) as i64),
                };
                let product = self.entry(row, k).mul(rhs.entry(k, col));
                acc = acc.add(&product.scale_rational(&weight));
            }
            Ok(acc)
        })
    }

    pub fn transpose(&self) -> OpMatrix {
        OpMatrix::from_fn(self.algebra, self.cols, self.rows, |row, col| {
            Ok(self.entry(col, row).clone())
        })
        .expect("transpose of a valid matrix")
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// `m`-th contraction power; the zeroth power is [`OpMatrix::identity`].
    pub fn pow(&self, m: u32) -> Result<OpMatrix, Error> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "powers need a square matrix, got {}×{}",
                self.rows, self.cols
            )));
        }
        let mut acc = OpMatrix::identity(self.algebra, self.rows)?;
        for _ in 0..m {
            acc = acc.mat_mul(self)?;
        }
        Ok(acc)
    }

    /// All powers `self⁰..=self^m` in one pass.
    pub fn powers(&self, m: u32) -> Result<Vec<OpMatrix>, Error> {
        let mut out = Vec::with_capacity(m as usize + 1);
        out.push(self.pow(0)?);
        for _ in 0..m {
            out.push(out.last().unwrap().mat_mul(self)?);
        }
        Ok(out)
    }

    fn check_series_base(&self) -> Result<(), Error> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "series need a square matrix, got {}×{}",
                self.rows, self.cols
            )));
        }
        if let Some((row, col)) = self.find_inhomogeneous() {
            return Err(Error::Precondition(format!(
                "series base entry ({row},{col}) is not homogeneous of derivative degree 1"
            )));
        }
        Ok(())
    }

    fn find_inhomogeneous(&self) -> Option<(Idx, Idx)> {
        for row in self.rows.indices() {
            for col in self.cols.indices() {
                if !self.entry(row, col).is_homogeneous(1) {
                    return Some((row, col));
                }
            }
        }
        None
    }

    /// Power series `Σ_k c(k)·self^k` for a degree-1 homogeneous base; the
    /// `k`-th power is exactly the degree-`k` slice, so summing to `dmax`
    /// truncates the series at derivative degree `dmax`.
    pub fn series(&self, coeff: impl Fn(usize) -> Rational, dmax: u32) -> Result<OpMatrix, Error> {
        self.check_series_base()?;
        let mut acc = OpMatrix::zero(self.algebra, self.rows, self.cols)?;
        let mut power = OpMatrix::identity(self.algebra, self.rows)?;
        for k in 0..=dmax {
            if k > 0 {
                power = power.mat_mul(self)?;
            }
            acc = acc.add(&power.scale_rational(&coeff(k as usize)))?;
        }
        Ok(acc)
    }

    /// `ψ(self)` truncated at derivative degree `dmax`.
    pub fn psi_of(&self, dmax: u32) -> Result<OpMatrix, Error> {
        self.series(psi_coeff, dmax)
    }

    /// `ψ(self)^{-1}` truncated at derivative degree `dmax`.
    pub fn psi_inv_of(&self, dmax: u32) -> Result<OpMatrix, Error> {
        self.series(psi_inv_coeff, dmax)
    }
}

impl fmt::Display for OpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} × {} over {}", self.rows, self.cols, self.algebra)?;
        for row in self.rows.indices() {
            for col in self.cols.indices() {
                let entry = self.entry(row, col);
                if !entry.is_zero() {
                    writeln!(f, "  ({row}, {col}): {entry}")?;
                }
            }
        }
        Ok(())
    }
}

/// Serialized matrix form.
#[derive(Serialize, Deserialize)]
struct MatrixDump {
    #[serde(rename = "rowSpace")]
    row_space: SpaceDump,
    #[serde(rename = "colSpace")]
    col_space: SpaceDump,
    metric: Metric,
    mode: String,
    entries: Vec<EntryDump>,
}

#[derive(Serialize, Deserialize)]
struct SpaceDump {
    kind: String,
    dim: u8,
}

#[derive(Serialize, Deserialize)]
struct EntryDump {
    row: IdxRepr,
    col: IdxRepr,
    poly: Vec<TermDump>,
}

impl From<Space> for SpaceDump {
    fn from(space: Space) -> Self {
        SpaceDump { kind: space.name().into(), dim: space.dim() }
    }
}

impl TryFrom<SpaceDump> for Space {
    type Error = Error;
    fn try_from(dump: SpaceDump) -> Result<Space, Error> {
        match dump.kind.as_str() {
            "vector" => Ok(Space::Vector(dump.dim)),
            "pair" => Ok(Space::Pair(dump.dim)),
            other => Err(Error::Parse(format!("unknown index space kind {other:?}"))),
        }
    }
}

impl Serialize for OpMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut entries = Vec::new();
        for row in self.rows.indices() {
            for col in self.cols.indices() {
                let entry = self.entry(row, col);
                if !entry.is_zero() {
                    entries.push(EntryDump {
                        row: row.into(),
                        col: col.into(),
                        poly: entry.poly().to_term_dump(),
                    });
                }
            }
        }
        MatrixDump {
            row_space: self.rows.into(),
            col_space: self.cols.into(),
            metric: self.algebra.metric(),
            mode: self.algebra.kind().name().into(),
            entries,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OpMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let dump = MatrixDump::deserialize(deserializer)?;
        let build = |dump: MatrixDump| -> Result<OpMatrix, Error> {
            let kind = AlgebraKind::from_name(&dump.mode)
                .ok_or_else(|| Error::Parse(format!("unknown algebra mode {:?}", dump.mode)))?;
            let algebra = Algebra::new(kind, dump.metric)?;
            let rows: Space = dump.row_space.try_into()?;
            let cols: Space = dump.col_space.try_into()?;
            let mut out = OpMatrix::zero(algebra, rows, cols)?;
            for entry in dump.entries {
                let row: Idx = entry.row.try_into()?;
                let col: Idx = entry.col.try_into()?;
                let poly = NCPoly::from_term_dump(algebra, &entry.poly)?;
                out.set_entry(row, col, DPoly::new(poly)?)?;
            }
            Ok(out)
        };
        build(dump).map_err(D::Error::custom)
    }
}

/// Requires a pair-generator mode (plain or extended).
fn check_pair_mode(algebra: Algebra) -> Result<(), Error> {
    match algebra.kind() {
        AlgebraKind::Heisenberg | AlgebraKind::ExtendedHeisenberg => Ok(()),
        AlgebraKind::Weyl => Err(Error::Precondition(
            "pair-generator matrices are not defined in vector mode".into(),
        )),
    }
}

/// The antisymmetric matrix `[d[μ,ν]]` on the vector space.
pub fn partial_matrix(algebra: Algebra) -> Result<OpMatrix, Error> {
    check_pair_mode(algebra)?;
    let n = algebra.dim();
    OpMatrix::from_fn(algebra, Space::Vector(n), Space::Vector(n), |row, col| {
        let (Idx::Vector(mu), Idx::Vector(nu)) = (row, col) else { unreachable!() };
        DPoly::d_pair(algebra, mu, nu)
    })
}

/// Metric power `(∂^m)` of [`partial_matrix`]; the zeroth power is the metric.
pub fn partial_power(algebra: Algebra, m: u32) -> Result<OpMatrix, Error> {
    partial_matrix(algebra)?.pow(m)
}

/// Truncated exponential `Σ_{k≤dmax} (1/k!)·(∂^k)`.
pub fn exp_partial(algebra: Algebra, dmax: u32) -> Result<OpMatrix, Error> {
    partial_matrix(algebra)?
        .series(|k| Rational::from_big(1.into(), factorial(k)), dmax)
}

/// The pair-space operator matrix
/// `K_{(μν)(αβ)} = ½(g_{μα}·d[ν,β] − g_{μβ}·d[ν,α] + g_{νβ}·d[μ,α] − g_{να}·d[μ,β])`.
///
/// Its zeroth power is the pair-space identity and `ψ(K)` drives the
/// pair-coordinate realizations.
pub fn k_matrix(algebra: Algebra) -> Result<OpMatrix, Error> {
    check_pair_mode(algebra)?;
    let n = algebra.dim();
    let metric = algebra.metric();
    let half = Rational::new(1, 2);
    OpMatrix::from_fn(algebra, Space::Pair(n), Space::Pair(n), |row, col| {
        let (Idx::Pair(p), Idx::Pair(q)) = (row, col) else { unreachable!() };
        let (mu, nu) = (p.lo(), p.hi());
        let (alpha, beta) = (q.lo(), q.hi());
        let mut acc = NCPoly::zero(algebra);
        for (g_left, g_right, d_i, d_j, negate) in [
            (mu, alpha, nu, beta, false),
            (mu, beta, nu, alpha, true),
            (nu, beta, mu, alpha, false),
            (nu, alpha, mu, beta, true),
        ] {
            let weight = metric.g(g_left, g_right);
            if weight != 0 {
                let mut term = NCPoly::d_pair(algebra, d_i, d_j)?
                    .scale_rational(&Rational::from_integer(weight as i64));
                if negate {
                    term = -term;
                }
                acc += &term;
            }
        }
        DPoly::new(acc.scale_rational(&half))
    })
}

/// Pair-space power `K^m` assembled from vector-space powers of `∂`:
///
/// `(K^m)_{(μν)(αβ)} = ½ Σ_k C(m,k)·[(∂^k)_{μα}(∂^{m-k})_{νβ} − (∂^{m-k})_{μβ}(∂^k)_{να}]`.
///
/// This is the closed form the recursive contraction power must agree with.
pub fn closed_form_k_power(algebra: Algebra, m: u32) -> Result<OpMatrix, Error> {
    check_pair_mode(algebra)?;
    let n = algebra.dim();
    let powers = partial_matrix(algebra)?.powers(m)?;
    let half = Rational::new(1, 2);
    OpMatrix::from_fn(algebra, Space::Pair(n), Space::Pair(n), |row, col| {
        let (Idx::Pair(p), Idx::Pair(q)) = (row, col) else { unreachable!() };
        let (mu, nu) = (p.lo(), p.hi());
        let (alpha, beta) = (q.lo(), q.hi());
        let mut acc = DPoly::zero(algebra);
        for k in 0..=m {
            let binom = Rational::from_big(
                crate::exactnum::binomial(m as usize, k as usize),
                1.into(),
            );
            let low = &powers[k as usize];
            let high = &powers[(m - k) as usize];
            let first = low
                .entry(Idx::Vector(mu), Idx::Vector(alpha))
                .mul(high.entry(Idx::Vector(nu), Idx::Vector(beta)));
            let second = high
                .entry(Idx::Vector(mu), Idx::Vector(beta))
                .mul(low.entry(Idx::Vector(nu), Idx::Vector(alpha)));
            acc = acc.add(&first.sub(&second).scale_rational(&binom));
        }
        Ok(acc.scale_rational(&half))
    })
}

/// Lower-triangular block matrix `[[A, 0], [C, D]]` with a vector-space
/// diagonal block `A`, a pair×vector block `C` and a pair-space block `D`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BlockMatrix {
    vv: OpMatrix,
    pv: OpMatrix,
    pp: OpMatrix,
}

impl BlockMatrix {
    pub fn new(vv: OpMatrix, pv: OpMatrix, pp: OpMatrix) -> Result<Self, Error> {
        let algebra = vv.algebra();
        let n = algebra.dim();
        let shapes_ok = vv.rows() == Space::Vector(n)
            && vv.cols() == Space::Vector(n)
            && pv.rows() == Space::Pair(n)
            && pv.cols() == Space::Vector(n)
            && pp.rows() == Space::Pair(n)
            && pp.cols() == Space::Pair(n);
        if !shapes_ok || pv.algebra() != algebra || pp.algebra() != algebra {
            return Err(Error::ShapeMismatch(
                "block matrix needs vector×vector, pair×vector and pair×pair blocks \
                 over one algebra"
                    .into(),
            ));
        }
        Ok(BlockMatrix { vv, pv, pp })
    }

    pub fn identity(algebra: Algebra) -> Result<Self, Error> {
        let n = algebra.dim();
        BlockMatrix::new(
            OpMatrix::identity(algebra, Space::Vector(n))?,
            OpMatrix::zero(algebra, Space::Pair(n), Space::Vector(n))?,
            OpMatrix::identity(algebra, Space::Pair(n))?,
        )
    }

    pub fn algebra(&self) -> Algebra {
        self.vv.algebra()
    }

    /// The vector×vector diagonal block.
    pub fn vv(&self) -> &OpMatrix {
        &self.vv
    }

    /// The pair×vector lower-left block.
    pub fn pv(&self) -> &OpMatrix {
        &self.pv
    }

    /// The pair×pair diagonal block.
    pub fn pp(&self) -> &OpMatrix {
        &self.pp
    }

    pub fn add(&self, rhs: &BlockMatrix) -> Result<BlockMatrix, Error> {
        BlockMatrix::new(
            self.vv.add(&rhs.vv)?,
            self.pv.add(&rhs.pv)?,
            self.pp.add(&rhs.pp)?,
        )
    }

    pub fn scale_rational(&self, c: &Rational) -> BlockMatrix {
        BlockMatrix {
            vv: self.vv.scale_rational(c),
            pv: self.pv.scale_rational(c),
            pp: self.pp.scale_rational(c),
        }
    }

    /// Blockwise product of lower-triangular block matrices:
    /// `[[A₁A₂, 0], [C₁A₂ + D₁C₂, D₁D₂]]`.
    pub fn block_mul(&self, rhs: &BlockMatrix) -> Result<BlockMatrix, Error> {
        BlockMatrix::new(
            self.vv.mat_mul(&rhs.vv)?,
            self.pv.mat_mul(&rhs.vv)?.add(&self.pp.mat_mul(&rhs.pv)?)?,
            self.pp.mat_mul(&rhs.pp)?,
        )
    }

    pub fn pow(&self, m: u32) -> Result<BlockMatrix, Error> {
        let mut acc = BlockMatrix::identity(self.algebra())?;
        for _ in 0..m {
            acc = acc.block_mul(self)?;
        }
        Ok(acc)
    }

    /// `ψ(self)` truncated at derivative degree `dmax`, via the closed-form
    /// block powers.
    pub fn psi_of(&self, dmax: u32) -> Result<BlockMatrix, Error> {
        let mut acc = ktilde_power(self, 0)?.scale_rational(&psi_coeff(0));
        for k in 1..=dmax {
            acc = acc.add(&ktilde_power(self, k)?.scale_rational(&psi_coeff(k as usize)))?;
        }
        Ok(acc)
    }
}

/// The extended-mode block matrix with `A = [d[μ,ν]]`,
/// `C_{(μν)α} = g_{αμ}·dv[ν] − g_{αν}·dv[μ]` and `D` the pair-space `K`.
pub fn ktilde(algebra: Algebra) -> Result<BlockMatrix, Error> {
    if algebra.kind() != AlgebraKind::ExtendedHeisenberg {
        return Err(Error::Precondition(
            "the block matrix needs the extended pair mode".into(),
        ));
    }
    let n = algebra.dim();
    let metric = algebra.metric();
    let pv = OpMatrix::from_fn(algebra, Space::Pair(n), Space::Vector(n), |row, col| {
        let (Idx::Pair(p), Idx::Vector(alpha)) = (row, col) else { unreachable!() };
        let (mu, nu) = (p.lo(), p.hi());
        let mut acc = NCPoly::zero(algebra);
        if alpha == mu {
            acc += &NCPoly::d_vec(algebra, nu)?
                .scale_rational(&Rational::from_integer(metric.sign(alpha) as i64));
        }
        if alpha == nu {
            acc = acc
                - &NCPoly::d_vec(algebra, mu)?
                    .scale_rational(&Rational::from_integer(metric.sign(alpha) as i64));
        }
        DPoly::new(acc)
    })?;
    BlockMatrix::new(partial_matrix(algebra)?, pv, k_matrix(algebra)?)
}

/// Closed-form `m`-th power of a lower-triangular block matrix:
/// diagonal blocks are plain powers, the lower-left block is
/// `Σ_{k=0}^{m-1} D^k·C·A^{m-1-k}`.
pub fn ktilde_power(kt: &BlockMatrix, m: u32) -> Result<BlockMatrix, Error> {
    let algebra = kt.algebra();
    let vv_powers = kt.vv().powers(m)?;
    let pp_powers = kt.pp().powers(m)?;
    let n = algebra.dim();
    let mut pv = OpMatrix::zero(algebra, Space::Pair(n), Space::Vector(n))?;
    for k in 0..m {
        let piece = pp_powers[k as usize]
            .mat_mul(kt.pv())?
            .mat_mul(&vv_powers[(m - 1 - k) as usize])?;
        pv = pv.add(&piece)?;
    }
    BlockMatrix::new(
        vv_powers[m as usize].clone(),
        pv,
        pp_powers[m as usize].clone(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalgebra::MetricKind;
    use proptest::prelude::*;

    fn h(n: u8) -> Algebra {
        Algebra::heisenberg(Metric::euclidean(n).unwrap()).unwrap()
    }

    fn hm(n: u8) -> Algebra {
        Algebra::heisenberg(Metric::minkowski(n).unwrap()).unwrap()
    }

    fn extm(n: u8) -> Algebra {
        Algebra::extended(Metric::minkowski(n).unwrap()).unwrap()
    }

    fn dp(alg: Algebra, s: &str) -> DPoly {
        DPoly::parse(alg, s).unwrap()
    }

    fn pair(a: u8, b: u8) -> Idx {
        Idx::Pair(PairIndex::new(a, b).unwrap())
    }

    fn vec_idx(k: u8) -> Idx {
        Idx::Vector(k)
    }

    #[test]
    fn dpoly_rejects_coordinates() {
        let alg = h(3);
        assert!(DPoly::parse(alg, "x[1,2]*d[1,2]").is_err());
        assert!(DPoly::parse(alg, "d[1,2]^2 - 1/2").is_ok());
    }

    #[test]
    fn k_matrix_entries_euclidean() {
        let k = k_matrix(h(3)).unwrap();
        assert_eq!(k.entry(pair(1, 2), pair(1, 3)), &dp(h(3), "1/2*d[2,3]"));
        assert_eq!(k.entry(pair(1, 2), pair(2, 3)), &dp(h(3), "-1/2*d[1,3]"));
        assert!(k.entry(pair(1, 2), pair(1, 2)).is_zero());
    }

    #[test]
    fn k_matrix_zeroth_power_is_the_pair_identity() {
        for alg in [h(3), hm(3), h(4), hm(4)] {
            let k = k_matrix(alg).unwrap();
            assert_eq!(k.pow(0).unwrap(), OpMatrix::identity(alg, Space::Pair(alg.dim())).unwrap());
        }
    }

    #[test]
    fn identity_is_a_unit_for_the_contraction() {
        for alg in [h(3), hm(4)] {
            let k = k_matrix(alg).unwrap();
            let id = OpMatrix::identity(alg, Space::Pair(alg.dim())).unwrap();
            assert_eq!(id.mat_mul(&k).unwrap(), k);
            assert_eq!(k.mat_mul(&id).unwrap(), k);

            let d = partial_matrix(alg).unwrap();
            let idv = OpMatrix::identity(alg, Space::Vector(alg.dim())).unwrap();
            assert_eq!(idv.mat_mul(&d).unwrap(), d);
            assert_eq!(d.mat_mul(&idv).unwrap(), d);
        }
    }

    #[test]
    fn squared_k_matrix_diagonal_entry() {
        let alg = h(3);
        let k2 = k_matrix(alg).unwrap().pow(2).unwrap();
        assert_eq!(
            k2.entry(pair(1, 2), pair(1, 2)),
            &dp(alg, "-1/2*d[1,3]^2 - 1/2*d[2,3]^2")
        );
    }

    #[test]
    fn minkowski_partial_square_has_the_negative_sign() {
        // (∂²)_{11} = Σ_α d[1,α]·g(α,α)·d[α,1] = -d[1,2]² for n = 2; the same
        // sign appears in the Euclidean case.
        for alg in [hm(2), h(2)] {
            let sq = partial_power(alg, 2).unwrap();
            assert_eq!(sq.entry(vec_idx(1), vec_idx(1)), &dp(alg, "-d[1,2]^2"));
        }
    }

    #[test]
    fn partial_power_zero_is_the_metric() {
        let alg = hm(3);
        let id = partial_power(alg, 0).unwrap();
        assert_eq!(id.entry(vec_idx(1), vec_idx(1)), &dp(alg, "-1"));
        assert_eq!(id.entry(vec_idx(2), vec_idx(2)), &dp(alg, "1"));
        assert!(id.entry(vec_idx(1), vec_idx(2)).is_zero());
    }

    #[test]
    fn exponential_matrix_small_entries() {
        let alg = h(2);
        let e3 = exp_partial(alg, 3).unwrap();
        assert_eq!(e3.entry(vec_idx(1), vec_idx(2)), &dp(alg, "d[1,2] - 1/6*d[1,2]^3"));
        let e2 = exp_partial(alg, 2).unwrap();
        assert_eq!(e2.entry(vec_idx(1), vec_idx(1)), &dp(alg, "1 - 1/2*d[1,2]^2"));
    }

    #[test]
    fn closed_form_power_matches_recursive_power_small() {
        for alg in [h(3), hm(3)] {
            let k = k_matrix(alg).unwrap();
            for m in 0..=3 {
                assert_eq!(closed_form_k_power(alg, m).unwrap(), k.pow(m).unwrap(), "m={m}");
            }
        }
    }

    #[test]
    fn series_requires_homogeneous_degree_one_entries() {
        let alg = h(3);
        let k2 = k_matrix(alg).unwrap().pow(2).unwrap();
        assert!(k2.psi_of(3).is_err(), "degree-2 entries must be rejected");
        let e = exp_partial(alg, 2).unwrap();
        assert!(e.psi_of(3).is_err(), "inhomogeneous entries must be rejected");
        assert!(k_matrix(alg).unwrap().psi_of(3).is_ok());
    }

    #[test]
    fn psi_times_psi_inverse_is_the_identity() {
        for alg in [h(3), hm(3)] {
            let k = k_matrix(alg).unwrap();
            let dmax = 4;
            let product = k.psi_of(dmax).unwrap().mat_mul(&k.psi_inv_of(dmax).unwrap()).unwrap();
            let id = OpMatrix::identity(alg, Space::Pair(3)).unwrap();
            assert_eq!(product.truncate(dmax), id);
        }
    }

    #[test]
    fn transpose_reverses_products() {
        let alg = hm(3);
        let k = k_matrix(alg).unwrap();
        let k2 = k.pow(2).unwrap();
        assert_eq!(k.mat_mul(&k2).unwrap().transpose(), k2.transpose().mat_mul(&k.transpose()).unwrap());
    }

    #[test]
    fn block_matrix_closed_power_matches_blockwise_products() {
        let kt = ktilde(extm(3)).unwrap();
        for m in 0..=4 {
            assert_eq!(ktilde_power(&kt, m).unwrap(), kt.pow(m).unwrap(), "m={m}");
        }
    }

    #[test]
    fn block_psi_diagonal_blocks_are_plain_psi() {
        let alg = extm(3);
        let kt = ktilde(alg).unwrap();
        let psi = kt.psi_of(3).unwrap();
        assert_eq!(psi.vv(), &partial_matrix(alg).unwrap().psi_of(3).unwrap());
        assert_eq!(psi.pp(), &k_matrix(alg).unwrap().psi_of(3).unwrap());
    }

    #[test]
    fn ktilde_lower_left_entries() {
        let alg = extm(2);
        let kt = ktilde(alg).unwrap();
        // C_{(12)1} = g(1,1)·dv[2] = -dv[2]; C_{(12)2} = -g(2,2)·dv[1] = -dv[1].
        assert_eq!(kt.pv().entry(pair(1, 2), vec_idx(1)), &dp(alg, "-dv[2]"));
        assert_eq!(kt.pv().entry(pair(1, 2), vec_idx(2)), &dp(alg, "-dv[1]"));
    }

    #[test]
    fn ktilde_rejects_plain_modes() {
        assert!(ktilde(h(3)).is_err());
    }

    #[test]
    fn shape_and_mode_mismatches_error() {
        let alg = h(3);
        let k = k_matrix(alg).unwrap();
        let d = partial_matrix(alg).unwrap();
        assert!(k.mat_mul(&d).is_err(), "pair×pair cannot contract with vector×vector");
        assert!(k.add(&d).is_err());
        assert!(partial_matrix(Algebra::weyl(3).unwrap()).is_err());
        assert!(OpMatrix::zero(alg, Space::Pair(4), Space::Pair(4)).is_err());
        assert!(d.pow(2).is_ok());
        let rect = OpMatrix::zero(alg, Space::Pair(3), Space::Vector(3)).unwrap();
        assert!(rect.pow(2).is_err());
    }

    #[test]
    fn serde_round_trip_is_byte_stable() {
        let k = k_matrix(hm(3)).unwrap();
        let json = serde_json::to_string_pretty(&k).unwrap();
        let back: OpMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, k);
        assert_eq!(serde_json::to_string_pretty(&back).unwrap(), json);
        assert!(json.contains("\"rowSpace\""));
        assert!(json.contains("\"minkowski\""));
    }

    #[test]
    fn metric_serialization_shape() {
        let m = Metric::minkowski(4).unwrap();
        assert_eq!(serde_json::to_string(&m).unwrap(), r#"{"dim":4,"kind":"minkowski"}"#);
        assert_eq!(m.kind(), MetricKind::Minkowski);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn contraction_is_associative(
            (alg, a, b, c) in prop_oneof![Just(h(3)), Just(hm(3))].prop_flat_map(|alg| {
                let pow = 0u32..=2;
                (Just(alg), pow.clone(), pow.clone(), pow)
            })
        ) {
            let k = k_matrix(alg).unwrap();
            let (ka, kb, kc) = (k.pow(a).unwrap(), k.pow(b).unwrap(), k.pow(c).unwrap());
            let left = ka.mat_mul(&kb).unwrap().mat_mul(&kc).unwrap();
            let right = ka.mat_mul(&kb.mat_mul(&kc).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn closed_form_power_matches_recursive_power(
            (alg, m) in prop_oneof![Just(h(2)), Just(h(3)), Just(hm(3)), Just(hm(4))]
                .prop_flat_map(|alg| (Just(alg), 0u32..=4))
        ) {
            prop_assert_eq!(
                closed_form_k_power(alg, m).unwrap(),
                k_matrix(alg).unwrap().pow(m).unwrap()
            );
        }
    }
}
