//! Construction of the truncated generator realizations.
//!
//! Every constructor returns a [`Realization`]: a map from generator labels to
//! polynomials in one of the [`crate::ncalgebra`] modes, exact up to a stated
//! derivative-degree truncation. Rotation generators are realized through
//! `ψ(K)` on the pair space, translations through the block matrix `ψ(K̃)`,
//! quantum angles through the matrix exponential `e^∂`, and vector-mode
//! realizations (including the κ-deformed coordinates) through `ψ(C)` built
//! from validated structure constants.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exactnum::{factorial, series_div, GaussianRational, Rational};
use crate::ncalgebra::{Algebra, AlgebraKind, Metric, NCPoly, PairIndex, TermDump};
use crate::opmatrix::{exp_partial, k_matrix, ktilde, DPoly, Idx, OpMatrix, Space};
use crate::Error;

/// Label of a realized generator.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum GeneratorLabel {
    /// Rotation or boost generator `M[μ,ν]`, canonical antisymmetric pair.
    M(PairIndex),
    /// Quantum-angle matrix entry `Lam[μ,ν]`; all index combinations occur.
    Lambda(u8, u8),
    /// Translation generator `P[μ]`.
    P(u8),
    /// Vector-mode coordinate generator `X[μ]`.
    X(u8),
}

impl fmt::Display for GeneratorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GeneratorLabel::M(p) => write!(f, "M{p}"),
            GeneratorLabel::Lambda(mu, nu) => write!(f, "Lam[{mu},{nu}]"),
            GeneratorLabel::P(mu) => write!(f, "P[{mu}]"),
            GeneratorLabel::X(mu) => write!(f, "X[{mu}]"),
        }
    }
}

impl FromStr for GeneratorLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("invalid generator label {s:?}"));
        let (head, rest) = s.split_once('[').ok_or_else(bad)?;
        let body = rest.strip_suffix(']').ok_or_else(bad)?;
        let indices: Vec<u8> = body
            .split(',')
            .map(|part| part.trim().parse::<u8>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        match (head, indices.as_slice()) {
            ("M", &[a, b]) => Ok(GeneratorLabel::M(PairIndex::new(a, b)?)),
            ("Lam", &[a, b]) => Ok(GeneratorLabel::Lambda(a, b)),
            ("P", &[a]) => Ok(GeneratorLabel::P(a)),
            ("X", &[a]) => Ok(GeneratorLabel::X(a)),
            _ => Err(bad()),
        }
    }
}

/// A family of generator polynomials over one algebra, exact up to the stated
/// derivative degree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Realization {
    algebra: Algebra,
    degree: u32,
    values: BTreeMap<GeneratorLabel, NCPoly>,
}

impl Realization {
    pub fn new(algebra: Algebra, degree: u32) -> Self {
        Realization { algebra, degree, values: BTreeMap::new() }
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Inserts or replaces a labelled polynomial, truncated to the stated
    /// degree.
    pub fn set(&mut self, label: GeneratorLabel, value: NCPoly) -> Result<(), Error> {
        if value.algebra() != self.algebra {
            return Err(Error::AlgebraMismatch {
                left: self.algebra.to_string(),
                right: value.algebra().to_string(),
            });
        }
        self.values.insert(label, value.truncate(self.degree));
        Ok(())
    }

    pub fn get(&self, label: GeneratorLabel) -> Result<&NCPoly, Error> {
        self.values.get(&label).ok_or_else(|| Error::MissingLabel { label: label.to_string() })
    }

    pub fn contains(&self, label: GeneratorLabel) -> bool {
        self.values.contains_key(&label)
    }

    pub fn labels(&self) -> impl Iterator<Item = GeneratorLabel> + '_ {
        self.values.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (GeneratorLabel, &NCPoly)> {
        self.values.iter().map(|(l, v)| (*l, v))
    }

    /// Combines two realizations over the same algebra and degree; the label
    /// sets must be disjoint.
    pub fn merge(mut self, other: Realization) -> Result<Realization, Error> {
        if self.algebra != other.algebra {
            return Err(Error::AlgebraMismatch {
                left: self.algebra.to_string(),
                right: other.algebra.to_string(),
            });
        }
        if self.degree != other.degree {
            return Err(Error::Precondition(format!(
                "cannot merge truncations of degree {} and {}",
                self.degree, other.degree
            )));
        }
        for (label, value) in other.values {
            if self.values.insert(label, value).is_some() {
                return Err(Error::Precondition(format!("label {label} defined twice in merge")));
            }
        }
        Ok(self)
    }

    /// Re-expresses every polynomial in a larger compatible mode.
    pub fn promoted(&self, target: Algebra) -> Result<Realization, Error> {
        let mut out = Realization::new(target, self.degree);
        for (label, value) in self.iter() {
            out.set(label, value.promote(target)?)?;
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct RealizationDump {
    mode: String,
    metric: Metric,
    degree: u32,
    generators: Vec<GenDump>,
}

#[derive(Serialize, Deserialize)]
struct GenDump {
    label: String,
    poly: Vec<TermDump>,
}

impl Serialize for Realization {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RealizationDump {
            mode: self.algebra.kind().name().into(),
            metric: self.algebra.metric(),
            degree: self.degree,
            generators: self
                .iter()
                .map(|(label, value)| GenDump {
                    label: label.to_string(),
                    poly: value.to_term_dump(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Realization {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let dump = RealizationDump::deserialize(deserializer)?;
        let build = |dump: RealizationDump| -> Result<Realization, Error> {
            let kind = AlgebraKind::from_name(&dump.mode)
                .ok_or_else(|| Error::Parse(format!("unknown algebra mode {:?}", dump.mode)))?;
            let algebra = Algebra::new(kind, dump.metric)?;
            let mut out = Realization::new(algebra, dump.degree);
            for gen in dump.generators {
                let label: GeneratorLabel = gen.label.parse()?;
                out.set(label, NCPoly::from_term_dump(algebra, &gen.poly)?)?;
            }
            Ok(out)
        };
        build(dump).map_err(D::Error::custom)
    }
}

/// Contracts a matrix block against coordinate generators along its column
/// space: `out_r = Σ_c weight(c) · coord(c) · block[r, c]` with the same
/// weights the metric contraction uses (`g(c,c)` on vector columns,
/// `2·g(lo,lo)·g(hi,hi)` on pair columns).
fn contract_coordinates(
    block: &OpMatrix,
    row: Idx,
    coord: impl Fn(Idx) -> Result<NCPoly, Error>,
) -> Result<NCPoly, Error> {
    let algebra = block.algebra();
    let metric = algebra.metric();
    let mut acc = NCPoly::zero(algebra);
    for col in block.cols().indices() {
        let entry = block.entry(row, col);
        if entry.is_zero() {
            continue;
        }
        let weight = match col {
            Idx::Vector(k) => Rational::from_integer(metric.sign(k) as i64),
            Idx::Pair(q) => Rational::from_integer(2 * metric.pair_weight(q) as i64),
        };
        acc += &(coord(col)? * entry.poly()).scale_rational(&weight);
    }
    Ok(acc)
}

/// Rotation (or boost) generators `M[μ,ν]` realized on pair coordinates:
/// the coordinate contraction of `ψ(K)`, truncated at `degree`.
pub fn realize_rotations(metric: Metric, degree: u32) -> Result<Realization, Error> {
    let algebra = Algebra::heisenberg(metric)?;
    let psi = k_matrix(algebra)?.psi_of(degree)?;
    let mut out = Realization::new(algebra, degree);
    for p in PairIndex::canonical_list(metric.dim()) {
        let value = contract_coordinates(&psi, Idx::Pair(p), |col| {
            let Idx::Pair(q) = col else { unreachable!() };
            NCPoly::x_pair(algebra, q.lo(), q.hi())
        })?;
        out.set(GeneratorLabel::M(p), value)?;
    }
    Ok(out)
}

/// Quantum-angle entries `Lam[μ,ν] = (e^∂)_{μν}`, truncated at `degree`.
pub fn realize_angles(metric: Metric, degree: u32) -> Result<Realization, Error> {
    let algebra = Algebra::heisenberg(metric)?;
    let exp = exp_partial(algebra, degree)?;
    let mut out = Realization::new(algebra, degree);
    for mu in 1..=metric.dim() {
        for nu in 1..=metric.dim() {
            let entry = exp.entry(Idx::Vector(mu), Idx::Vector(nu)).poly().clone();
            out.set(GeneratorLabel::Lambda(mu, nu), entry)?;
        }
    }
    Ok(out)
}

/// Rotations and quantum angles over one algebra.
pub fn realize_rotations_with_angles(metric: Metric, degree: u32) -> Result<Realization, Error> {
    realize_rotations(metric, degree)?.merge(realize_angles(metric, degree)?)
}

/// Translations `P[μ]` and rotations `M[μ,ν]` in the extended mode, built
/// from the block matrix `ψ(K̃)`: `P̂` contracts the vector block against the
/// momentum coordinates, `M̂` adds the momentum contraction of the lower-left
/// block to the pair-coordinate contraction of the pair block.
pub fn realize_poincare(metric: Metric, degree: u32) -> Result<Realization, Error> {
    let algebra = Algebra::extended(metric)?;
    let psi = ktilde(algebra)?.psi_of(degree)?;
    let momentum = |col: Idx| {
        let Idx::Vector(alpha) = col else { unreachable!() };
        NCPoly::p_vec(algebra, alpha)
    };
    let mut out = Realization::new(algebra, degree);
    for mu in 1..=metric.dim() {
        let value = contract_coordinates(psi.vv(), Idx::Vector(mu), momentum)?;
        out.set(GeneratorLabel::P(mu), value)?;
    }
    for p in PairIndex::canonical_list(metric.dim()) {
        let x_part = contract_coordinates(psi.pp(), Idx::Pair(p), |col| {
            let Idx::Pair(q) = col else { unreachable!() };
            NCPoly::x_pair(algebra, q.lo(), q.hi())
        })?;
        let p_part = contract_coordinates(psi.pv(), Idx::Pair(p), momentum)?;
        out.set(GeneratorLabel::M(p), &x_part + &p_part)?;
    }
    Ok(out)
}

/// Translations, rotations and quantum angles in the extended mode.
pub fn realize_poincare_with_angles(metric: Metric, degree: u32) -> Result<Realization, Error> {
    let algebra = Algebra::extended(metric)?;
    let angles = realize_angles(metric, degree)?.promoted(algebra)?;
    realize_poincare(metric, degree)?.merge(angles)
}

/// Coefficients `Γ_a^{μν}` of an orthonormal relabelling between the
/// canonical pair basis and an abstract basis `1..=N` of the rotation
/// generators.
///
/// Stored row-major over canonical pairs: `rows[a][rank(lo,hi)]` holds
/// `Γ_{a+1}^{(lo,hi)}`; the full antisymmetric coefficient follows by sign
/// extension. Validity requires the `N×N` coefficient matrix to be
/// orthogonal, which encodes both defining contraction identities
/// (`½ Σ_{μν} Γ_a^{μν} Γ_b^{μν} = δ_{ab}` and
/// `Σ_a Γ_a^{μν} Γ_a^{αβ} = δ_{μα}δ_{νβ} − δ_{μβ}δ_{να}`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GammaCoeffs {
    n: u8,
    rows: Vec<Vec<Rational>>,
}

impl GammaCoeffs {
    pub fn new(n: u8, rows: Vec<Vec<Rational>>) -> Result<Self, Error> {
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        let count = PairIndex::canonical_list(n).len();
        if rows.len() != count || rows.iter().any(|row| row.len() != count) {
            return Err(Error::ShapeMismatch(format!(
                "relabelling for dimension {n} needs a {count}×{count} coefficient matrix"
            )));
        }
        let delta = |a: usize, b: usize| {
            if a == b {
                Rational::from_integer(1)
            } else {
                Rational::zero()
            }
        };
        for a in 0..count {
            for b in 0..count {
                let row_dot: Rational =
                    (0..count).fold(Rational::zero(), |acc, p| acc + rows[a][p].clone() * rows[b][p].clone());
                let col_dot: Rational =
                    (0..count).fold(Rational::zero(), |acc, p| acc + rows[p][a].clone() * rows[p][b].clone());
                if row_dot != delta(a, b) || col_dot != delta(a, b) {
                    return Err(Error::Precondition(format!(
                        "relabelling coefficients are not orthogonal at ({},{})",
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
        Ok(GammaCoeffs { n, rows })
    }

    /// The identity relabelling: basis element `a` is the `a`-th canonical
    /// pair in lexicographic order.
    pub fn canonical(n: u8) -> Result<Self, Error> {
        let count = PairIndex::canonical_list(n).len();
        let rows = (0..count)
            .map(|a| {
                (0..count)
                    .map(|p| {
                        if a == p {
                            Rational::from_integer(1)
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        GammaCoeffs::new(n, rows)
    }

    /// The alternating-symbol relabelling for dimension 3:
    /// `Γ_a^{μν} = ε_{aμν}`.
    pub fn epsilon_so3() -> Self {
        let zero = Rational::zero;
        let one = || Rational::from_integer(1);
        // Pair ranks for n = 3: (1,2) ↦ 0, (1,3) ↦ 1, (2,3) ↦ 2.
        let rows = vec![
            vec![zero(), zero(), one()],
            vec![zero(), -one(), zero()],
            vec![one(), zero(), zero()],
        ];
        GammaCoeffs::new(3, rows).expect("alternating-symbol coefficients are orthogonal")
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    /// Number of abstract basis elements (= number of canonical pairs).
    pub fn count(&self) -> usize {
        self.rows.len()
    }

    /// `Γ_{a}^{μν}` with antisymmetric sign extension; `a` is 1-based.
    pub fn value(&self, a: usize, mu: u8, nu: u8) -> Rational {
        if mu == nu {
            return Rational::zero();
        }
        let (p, swapped) = PairIndex::normalize(mu, nu).expect("off-diagonal pair");
        let v = self.rows[a - 1][p.rank(self.n)].clone();
        if swapped {
            -v
        } else {
            v
        }
    }

    /// Maps a vector-mode polynomial over the abstract basis into the
    /// pair-generator mode by substituting
    /// `xa[a] ↦ Σ_{lo<hi} Γ_a^{(lo,hi)} x[lo,hi]` and
    /// `da[a] ↦ Σ_{lo<hi} Γ_a^{(lo,hi)} d[lo,hi]`.
    pub fn transport(&self, poly: &NCPoly) -> Result<NCPoly, Error> {
        let source = poly.algebra();
        if source.kind() != AlgebraKind::Weyl || source.dim() as usize != self.count() {
            return Err(Error::Precondition(format!(
                "transport expects vector-mode input over {} generators, got {source}",
                self.count()
            )));
        }
        let target = Algebra::heisenberg(Metric::euclidean(self.n)?)?;
        let pairs = PairIndex::canonical_list(self.n);
        let image = |a: usize, make: &dyn Fn(PairIndex) -> Result<NCPoly, Error>| {
            let mut acc = NCPoly::zero(target);
            for (rank, p) in pairs.iter().enumerate() {
                let c = &self.rows[a - 1][rank];
                if !c.is_zero() {
                    acc += &make(*p)?.scale_rational(c);
                }
            }
            Ok::<_, Error>(acc)
        };
        let x_images: Vec<NCPoly> = (1..=self.count())
            .map(|a| image(a, &|p| NCPoly::x_pair(target, p.lo(), p.hi())))
            .collect::<Result<_, _>>()?;
        let d_images: Vec<NCPoly> = (1..=self.count())
            .map(|a| image(a, &|p| NCPoly::d_pair(target, p.lo(), p.hi())))
            .collect::<Result<_, _>>()?;
        let mut out = NCPoly::zero(target);
        for (monomial, coeff) in poly.terms() {
            let mut acc = NCPoly::scalar(target, coeff.clone());
            for &(gen, exp) in monomial.factors() {
                let img = match gen {
                    crate::ncalgebra::Generator::XVec(a) => &x_images[a as usize - 1],
                    crate::ncalgebra::Generator::DAVec(a) => &d_images[a as usize - 1],
                    other => {
                        return Err(Error::InvalidGenerator {
                            gen: other.to_string(),
                            algebra: source.to_string(),
                        })
                    }
                };
                for _ in 0..exp {
                    acc = acc.checked_mul(img)?;
                }
            }
            out += &acc;
        }
        Ok(out)
    }
}

/// Exact structure constants `C_{μνα}` of a Lie algebra on generators
/// `1..=dim`, validated for antisymmetry and the Jacobi identity at
/// construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StructureConstants {
    dim: u8,
    c: Vec<GaussianRational>,
}

impl StructureConstants {
    pub fn new(dim: u8, values: Vec<GaussianRational>) -> Result<Self, Error> {
        if dim < 1 {
            return Err(Error::DimensionTooSmall(dim));
        }
        let m = dim as usize;
        if values.len() != m * m * m {
            return Err(Error::ShapeMismatch(format!(
                "structure constants for {m} generators need {} entries, got {}",
                m * m * m,
                values.len()
            )));
        }
        let sc = StructureConstants { dim, c: values };
        for mu in 1..=dim {
            for nu in 1..=dim {
                for alpha in 1..=dim {
                    let direct = sc.get(mu, nu, alpha).clone();
                    let flipped = sc.get(nu, mu, alpha).clone();
                    if direct + flipped != GaussianRational::zero() {
                        return Err(Error::NotAntisymmetric { mu, nu, alpha });
                    }
                }
            }
        }
        for mu in 1..=dim {
            for alpha in 1..=dim {
                for beta in 1..=dim {
                    for nu in 1..=dim {
                        let mut acc = GaussianRational::zero();
                        for rho in 1..=dim {
                            acc += &(sc.get(mu, alpha, rho).clone() * sc.get(rho, beta, nu).clone());
                            acc += &(sc.get(alpha, beta, rho).clone() * sc.get(rho, mu, nu).clone());
                            acc += &(sc.get(beta, mu, rho).clone() * sc.get(rho, alpha, nu).clone());
                        }
                        if !acc.is_zero() {
                            return Err(Error::JacobiFailure { mu, alpha, beta });
                        }
                    }
                }
            }
        }
        Ok(sc)
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    /// `C_{μνα}` (1-based).
    pub fn get(&self, mu: u8, nu: u8, alpha: u8) -> &GaussianRational {
        let m = self.dim as usize;
        &self.c[(mu as usize - 1) * m * m + (nu as usize - 1) * m + (alpha as usize - 1)]
    }

    /// The κ-deformed-space constants `C_{μνλ} = i(a_μ δ_{νλ} − a_ν δ_{μλ})`
    /// for a rational deformation vector `a`.
    pub fn kappa(a: &[GaussianRational]) -> Result<Self, Error> {
        let dim = u8::try_from(a.len())
            .map_err(|_| Error::ShapeMismatch("deformation vector too long".into()))?;
        if dim < 1 {
            return Err(Error::DimensionTooSmall(0));
        }
        let i_unit = GaussianRational::i();
        let m = dim as usize;
        let mut values = vec![GaussianRational::zero(); m * m * m];
        for mu in 0..m {
            for nu in 0..m {
                for lam in 0..m {
                    let mut v = GaussianRational::zero();
                    if nu == lam {
                        v += &(i_unit.clone() * a[mu].clone());
                    }
                    if mu == lam {
                        v -= &(i_unit.clone() * a[nu].clone());
                    }
                    values[mu * m * m + nu * m + lam] = v;
                }
            }
        }
        StructureConstants::new(dim, values)
    }

    /// Structure constants of the relabelled rotation algebra obtained from
    /// the commutator product of the relabelling coefficients:
    /// `C_{abc} = ½ Σ_{αβλ} (Γ_a^{αλ}Γ_b^{λβ} − Γ_b^{αλ}Γ_a^{λβ}) Γ_c^{αβ}`.
    pub fn from_gamma(gamma: &GammaCoeffs) -> Result<Self, Error> {
        let count = gamma.count();
        let n = gamma.n();
        let half = GaussianRational::from(Rational::new(1, 2));
        let mut values = vec![GaussianRational::zero(); count * count * count];
        for a in 1..=count {
            for b in 1..=count {
                for c in 1..=count {
                    let mut acc = Rational::zero();
                    for alpha in 1..=n {
                        for beta in 1..=n {
                            for lam in 1..=n {
                                let commut = gamma.value(a, alpha, lam) * gamma.value(b, lam, beta)
                                    - gamma.value(b, alpha, lam) * gamma.value(a, lam, beta);
                                if !commut.is_zero() {
                                    acc += &(commut * gamma.value(c, alpha, beta));
                                }
                            }
                        }
                    }
                    values[(a - 1) * count * count + (b - 1) * count + (c - 1)] =
                        half.clone() * GaussianRational::from(acc);
                }
            }
        }
        StructureConstants::new(gamma.count() as u8, values)
    }

    /// The same constants computed through the full pair-index contraction
    /// `C_{abc} = ¼ Σ Γ_a^{μν} Γ_b^{λρ} Γ_c^{αβ} C_{(μν)(λρ)(αβ)}` against the
    /// rotation-algebra structure constants on pair labels. Slower than
    /// [`StructureConstants::from_gamma`]; retained as an independent route.
    pub fn from_gamma_adjoint(gamma: &GammaCoeffs) -> Result<Self, Error> {
        let count = gamma.count();
        let n = gamma.n();
        let quarter = GaussianRational::from(Rational::new(1, 4));
        let mut values = vec![GaussianRational::zero(); count * count * count];
        for a in 1..=count {
            for b in 1..=count {
                for c in 1..=count {
                    let mut acc = Rational::zero();
                    for mu in 1..=n {
                        for nu in 1..=n {
                            let ga = gamma.value(a, mu, nu);
                            if ga.is_zero() {
                                continue;
                            }
                            for lam in 1..=n {
                                for rho in 1..=n {
                                    let gb = gamma.value(b, lam, rho);
                                    if gb.is_zero() {
                                        continue;
                                    }
                                    for alpha in 1..=n {
                                        for beta in 1..=n {
                                            let gc = gamma.value(c, alpha, beta);
                                            if gc.is_zero() {
                                                continue;
                                            }
                                            let s = rotation_pair_constant(
                                                mu, nu, lam, rho, alpha, beta,
                                            );
                                            if !s.is_zero() {
                                                acc += &(ga.clone() * gb.clone() * gc * s);
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                    values[(a - 1) * count * count + (b - 1) * count + (c - 1)] =
                        quarter.clone() * GaussianRational::from(acc);
                }
            }
        }
        StructureConstants::new(count as u8, values)
    }

    /// The first-order-operator matrix `C_{μν} = Σ_α C_{μαν}·da[α]` in the
    /// vector mode; its `ψ` series drives the symmetric realization.
    pub fn c_matrix(&self) -> Result<OpMatrix, Error> {
        let algebra = Algebra::weyl(self.dim)?;
        OpMatrix::from_fn(
            algebra,
            Space::Vector(self.dim),
            Space::Vector(self.dim),
            |row, col| {
                let (Idx::Vector(mu), Idx::Vector(nu)) = (row, col) else { unreachable!() };
                let mut acc = NCPoly::zero(algebra);
                for alpha in 1..=self.dim {
                    let coeff = self.get(mu, alpha, nu);
                    if !coeff.is_zero() {
                        acc += &NCPoly::da_vec(algebra, alpha)?.scale(coeff);
                    }
                }
                DPoly::new(acc)
            },
        )
    }
}

/// Rotation-algebra structure constant on full (unordered) pair labels,
/// written with Kronecker deltas:
/// `½(δ_{μα}δ_{ρβ}−δ_{μβ}δ_{ρα})δ_{νλ} − ½(δ_{να}δ_{ρβ}−δ_{νβ}δ_{ρα})δ_{μλ}
///  + ½(δ_{λα}δ_{μβ}−δ_{λβ}δ_{μα})δ_{νρ} − ½(δ_{λα}δ_{νβ}−δ_{λβ}δ_{να})δ_{μρ}`.
fn rotation_pair_constant(mu: u8, nu: u8, lam: u8, rho: u8, alpha: u8, beta: u8) -> Rational {
    let d = |a: u8, b: u8| if a == b { 1i64 } else { 0 };
    let raw = (d(mu, alpha) * d(rho, beta) - d(mu, beta) * d(rho, alpha)) * d(nu, lam)
        - (d(nu, alpha) * d(rho, beta) - d(nu, beta) * d(rho, alpha)) * d(mu, lam)
        + (d(lam, alpha) * d(mu, beta) - d(lam, beta) * d(mu, alpha)) * d(nu, rho)
        - (d(lam, alpha) * d(nu, beta) - d(lam, beta) * d(nu, alpha)) * d(mu, rho);
    Rational::new(raw, 2)
}

/// The symmetric vector-mode realization `X̂_μ = Σ_α x_α ψ(C)_{μα}` for
/// validated structure constants, truncated at `degree`.
pub fn realize_weyl_from_structure(
    constants: &StructureConstants,
    degree: u32,
) -> Result<Realization, Error> {
    let algebra = Algebra::weyl(constants.dim())?;
    let psi = constants.c_matrix()?.psi_of(degree)?;
    let mut out = Realization::new(algebra, degree);
    for mu in 1..=constants.dim() {
        let value = contract_coordinates(&psi, Idx::Vector(mu), |col| {
            let Idx::Vector(alpha) = col else { unreachable!() };
            NCPoly::x_vec(algebra, alpha)
        })?;
        out.set(GeneratorLabel::X(mu), value)?;
    }
    Ok(out)
}

/// Closed-form symmetric realization of the κ-deformed coordinates:
/// `X̂_μ = x_μ·f(A) + i·a_μ·(x·∂)·g(A)` with `A = i Σ_k a_k ∂_k`,
/// `f(t) = t/(e^t − 1)` and `g(t) = (e^t − t − 1)/(t(e^t − 1))`,
/// truncated at `degree`.
pub fn realize_kappa_closed(
    a: &[GaussianRational],
    degree: u32,
) -> Result<Realization, Error> {
    let dim = u8::try_from(a.len())
        .map_err(|_| Error::ShapeMismatch("deformation vector too long".into()))?;
    if dim < 1 {
        return Err(Error::DimensionTooSmall(0));
    }
    let algebra = Algebra::weyl(dim)?;
    let len = degree as usize + 1;

    // f = 1 / Σ_k t^k/(k+1)!  and  g = (Σ_k t^k/(k+2)!) / (Σ_k t^k/(k+1)!),
    // both denominators coming from (e^t − 1)/t and the numerator of g from
    // (e^t − t − 1)/t².
    let inv_fact_shift = |shift: usize| -> Vec<Rational> {
        (0..len).map(|k| Rational::from_big(1.into(), factorial(k + shift))).collect()
    };
    let mut one = vec![Rational::zero(); len];
    one[0] = Rational::from_integer(1);
    let f_coeffs = series_div(&one, &inv_fact_shift(1), len);
    let g_coeffs = series_div(&inv_fact_shift(2), &inv_fact_shift(1), len);

    let i_unit = GaussianRational::i();
    let mut a_poly = NCPoly::zero(algebra);
    for (k, ak) in a.iter().enumerate() {
        a_poly += &NCPoly::da_vec(algebra, k as u8 + 1)?.scale(&(i_unit.clone() * ak.clone()));
    }
    let series_in_a = |coeffs: &[Rational]| -> Result<NCPoly, Error> {
        let mut acc = NCPoly::zero(algebra);
        let mut power = NCPoly::one(algebra);
        for (k, c) in coeffs.iter().enumerate() {
            if k > 0 {
                power = power.checked_mul(&a_poly)?;
            }
            acc += &power.scale_rational(c);
        }
        Ok(acc)
    };
    let f_of_a = series_in_a(&f_coeffs)?;
    let g_of_a = series_in_a(&g_coeffs)?;

    let mut euler = NCPoly::zero(algebra);
    for k in 1..=dim {
        euler += &NCPoly::x_vec(algebra, k)?.checked_mul(&NCPoly::da_vec(algebra, k)?)?;
    }
    let euler_g = euler.checked_mul(&g_of_a)?;

    let mut out = Realization::new(algebra, degree);
    for mu in 1..=dim {
        let first = NCPoly::x_vec(algebra, mu)?.checked_mul(&f_of_a)?;
        let second = euler_g.scale(&(i_unit.clone() * a[mu as usize - 1].clone()));
        out.set(GeneratorLabel::X(mu), &first + &second)?;
    }
    Ok(out)
}

/// Realizes the rotation generators through the abstract basis: relabel with
/// `Γ`, build the vector-mode symmetric realization from the induced
/// structure constants, then transport back to pair generators and recombine
/// `M[μ,ν] = Σ_a Γ_a^{μν} M̂_a`. The result must agree with
/// [`realize_rotations`] for every valid `Γ`.
pub fn gamma_transport(gamma: &GammaCoeffs, degree: u32) -> Result<Realization, Error> {
    let constants = StructureConstants::from_gamma(gamma)?;
    let abstract_basis = realize_weyl_from_structure(&constants, degree)?;
    let transported: Vec<NCPoly> = (1..=gamma.count())
        .map(|a| gamma.transport(abstract_basis.get(GeneratorLabel::X(a as u8))?))
        .collect::<Result<_, _>>()?;
    let algebra = Algebra::heisenberg(Metric::euclidean(gamma.n())?)?;
    let mut out = Realization::new(algebra, degree);
    for p in PairIndex::canonical_list(gamma.n()) {
        let mut acc = NCPoly::zero(algebra);
        for (a, value) in transported.iter().enumerate() {
            let coeff = gamma.value(a + 1, p.lo(), p.hi());
            if !coeff.is_zero() {
                acc += &value.scale_rational(&coeff);
            }
        }
        out.set(GeneratorLabel::M(p), acc)?;
    }
    Ok(out)
}
