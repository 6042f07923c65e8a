//! Order-by-order verification of the realized Lie algebras.
//!
//! A [`Presentation`] fixes a generator set and the right-hand side of every
//! defining bracket; [`check_bracket`] computes each commutator of realized
//! generators with the exact engine, subtracts the required combination and
//! reports the residual term counts. Independent closed-form oracles
//! (alternating matrix powers, split bilinear expansions, the binomial
//! collapse they rest on, and the closed matrix power of the pair-space
//! operator) cross-check the engine, and the mutation tooling confirms that
//! the checks actually reject perturbed coefficient data.

use std::time::Instant;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exactnum::{binomial, GaussianRational, Rational};
use crate::ncalgebra::{Algebra, Metric, NCPoly, PairIndex, PolyState};
use crate::opmatrix::{
    closed_form_k_power, exp_partial, k_matrix, partial_power, Idx, OpMatrix, Space,
};
use crate::realize::{
    gamma_transport, realize_kappa_closed, realize_poincare, realize_poincare_with_angles,
    realize_rotations, realize_rotations_with_angles, realize_weyl_from_structure, GammaCoeffs,
    GeneratorLabel, Realization, StructureConstants,
};
use crate::Error;

/// A generator set together with the right-hand sides of its defining
/// brackets.
#[derive(Clone, Debug)]
pub enum Presentation {
    /// Rotation (Euclidean) or rotation-boost (Minkowski) generators only.
    Rotations(Metric),
    /// Rotations extended by the quantum-angle matrix entries.
    RotationsAngles(Metric),
    /// Rotations and translations in the momentum-extended mode.
    Poincare(Metric),
    /// Rotations, translations and quantum angles in the extended mode.
    PoincareAngles(Metric),
    /// An arbitrary Lie algebra on vector-mode coordinates, given by
    /// validated structure constants.
    Custom(StructureConstants),
}

impl Presentation {
    pub fn name(&self) -> &'static str {
        match self {
            Presentation::Rotations(_) => "rotations",
            Presentation::RotationsAngles(_) => "rotations-angles",
            Presentation::Poincare(_) => "poincare",
            Presentation::PoincareAngles(_) => "poincare-angles",
            Presentation::Custom(_) => "custom",
        }
    }

    pub fn metric(&self) -> Option<Metric> {
        match self {
            Presentation::Rotations(m)
            | Presentation::RotationsAngles(m)
            | Presentation::Poincare(m)
            | Presentation::PoincareAngles(m) => Some(*m),
            Presentation::Custom(_) => None,
        }
    }

    /// Number of underlying vector indices (generator count for the custom
    /// variant).
    pub fn n(&self) -> u8 {
        match self {
            Presentation::Custom(sc) => sc.dim(),
            other => other.metric().expect("standard suites carry a metric").dim(),
        }
    }

    /// The generator labels of the presentation, in the order the bracket
    /// checks iterate them.
    pub fn generators(&self) -> Vec<GeneratorLabel> {
        let mut out = Vec::new();
        match self {
            Presentation::Custom(sc) => {
                out.extend((1..=sc.dim()).map(GeneratorLabel::X));
            }
            other => {
                let n = other.n();
                out.extend(PairIndex::canonical_list(n).into_iter().map(GeneratorLabel::M));
                if matches!(self, Presentation::Poincare(_) | Presentation::PoincareAngles(_)) {
                    out.extend((1..=n).map(GeneratorLabel::P));
                }
                if matches!(
                    self,
                    Presentation::RotationsAngles(_) | Presentation::PoincareAngles(_)
                ) {
                    for mu in 1..=n {
                        for nu in 1..=n {
                            out.push(GeneratorLabel::Lambda(mu, nu));
                        }
                    }
                }
            }
        }
        out
    }

    fn check_member(&self, label: GeneratorLabel) -> Result<(), Error> {
        if self.generators().contains(&label) {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "generator {label} does not belong to the {} presentation",
                self.name()
            )))
        }
    }

    /// The right-hand side of `[a, b]` as a linear combination of generator
    /// labels. Every commuting pair yields the empty combination.
    pub fn bracket(
        &self,
        a: GeneratorLabel,
        b: GeneratorLabel,
    ) -> Result<Vec<(GaussianRational, GeneratorLabel)>, Error> {
        use GeneratorLabel::{Lambda, M, P, X};
        self.check_member(a)?;
        self.check_member(b)?;
        let mut acc: Vec<(Rational, GeneratorLabel)> = Vec::new();
        let metric = self.metric();
        let g = |mu: u8, nu: u8| metric.expect("metric bracket").g(mu, nu) as i64;
        let push_m = |acc: &mut Vec<_>, w: i64, mu: u8, nu: u8| {
            if w == 0 || mu == nu {
                return;
            }
            let (p, swapped) = PairIndex::normalize(mu, nu).expect("off-diagonal");
            let w = if swapped { -w } else { w };
            acc.push((Rational::from_integer(w), M(p)));
        };
        match (a, b) {
            (M(p), M(q)) => {
                let (mu, nu) = (p.lo(), p.hi());
                let (lam, rho) = (q.lo(), q.hi());
                push_m(&mut acc, g(nu, lam), mu, rho);
                push_m(&mut acc, -g(mu, lam), nu, rho);
                push_m(&mut acc, -g(nu, rho), mu, lam);
                push_m(&mut acc, g(mu, rho), nu, lam);
            }
            (M(p), P(lam)) | (P(lam), M(p)) => {
                let (mu, nu) = (p.lo(), p.hi());
                let sign = if matches!(a, P(_)) { -1 } else { 1 };
                for (w, idx) in [(g(nu, lam), mu), (-g(mu, lam), nu)] {
                    if w != 0 {
                        acc.push((Rational::from_integer(sign * w), P(idx)));
                    }
                }
            }
            (M(p), Lambda(rho, sigma)) | (Lambda(rho, sigma), M(p)) => {
                let (mu, nu) = (p.lo(), p.hi());
                let sign = if matches!(a, Lambda(..)) { -1 } else { 1 };
                for (w, row) in [(g(nu, rho), mu), (-g(mu, rho), nu)] {
                    if w != 0 {
                        acc.push((Rational::from_integer(sign * w), Lambda(row, sigma)));
                    }
                }
            }
            (P(_), P(_)) | (P(_), Lambda(..)) | (Lambda(..), P(_)) | (Lambda(..), Lambda(..)) => {}
            (X(mu), X(nu)) => {
                let Presentation::Custom(sc) = self else { unreachable!("membership checked") };
                let mut out = Vec::new();
                for alpha in 1..=sc.dim() {
                    let c = sc.get(mu, nu, alpha);
                    if !c.is_zero() {
                        out.push((c.clone(), X(alpha)));
                    }
                }
                return Ok(out);
            }
            _ => unreachable!("membership checked"),
        }
        // Merge repeated labels so callers see one coefficient per label.
        let mut merged: Vec<(GaussianRational, GeneratorLabel)> = Vec::new();
        for (c, label) in acc {
            match merged.iter_mut().find(|(_, l)| *l == label) {
                Some((existing, _)) => *existing += &GaussianRational::from(c),
                None => merged.push((GaussianRational::from(c), label)),
            }
        }
        merged.retain(|(c, _)| !c.is_zero());
        Ok(merged)
    }

    /// Derivative degree up to which `[a, b]` of a degree-`degree` truncation
    /// is compared. `None` means the commutator must vanish identically with
    /// no truncation at all: it only involves generators whose realizations
    /// commute term by term.
    pub fn comparison_degree(
        &self,
        degree: u32,
        a: GeneratorLabel,
        b: GeneratorLabel,
    ) -> Option<u32> {
        use GeneratorLabel::{Lambda, P};
        match (a, b) {
            (P(_), P(_)) | (P(_), Lambda(..)) | (Lambda(..), P(_)) | (Lambda(..), Lambda(..)) => {
                None
            }
            _ => Some(degree.saturating_sub(1)),
        }
    }

    /// Builds the realization the presentation is checked against.
    pub fn realize(&self, degree: u32) -> Result<Realization, Error> {
        match self {
            Presentation::Rotations(m) => realize_rotations(*m, degree),
            Presentation::RotationsAngles(m) => realize_rotations_with_angles(*m, degree),
            Presentation::Poincare(m) => realize_poincare(*m, degree),
            Presentation::PoincareAngles(m) => realize_poincare_with_angles(*m, degree),
            Presentation::Custom(sc) => realize_weyl_from_structure(sc, degree),
        }
    }
}

/// Outcome of one commutator comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PairCheck {
    pub g1: String,
    pub g2: String,
    /// Degree the residual was truncated to; `null` for an untruncated
    /// comparison (a pair whose realizations must commute identically).
    pub cmp_degree: Option<u32>,
    /// Number of surviving residual terms; zero means the bracket holds.
    pub residual_terms: usize,
}

/// Result of checking every strict generator pair of a presentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BracketReport {
    pub suite: String,
    pub n: u8,
    pub metric: Option<Metric>,
    pub degree: u32,
    /// Comparison degree of the truncated sectors (`degree − 1`); pairs
    /// compared without truncation carry a `null` per-pair override.
    pub cmp_degree: u32,
    pub pairs: Vec<PairCheck>,
    pub pass: bool,
    pub elapsed_ms: u64,
}

impl BracketReport {
    /// The same report with the timing field cleared, for byte-stable
    /// comparisons.
    pub fn with_elapsed_zeroed(mut self) -> Self {
        self.elapsed_ms = 0;
        self
    }
}

fn residual_for_pair(
    realization: &Realization,
    presentation: &Presentation,
    a: GeneratorLabel,
    b: GeneratorLabel,
) -> Result<(Option<u32>, NCPoly), Error> {
    let cmp = presentation.comparison_degree(realization.degree(), a, b);
    let lhs = realization.get(a)?.commutator_bounded(realization.get(b)?, cmp)?;
    let mut rhs = NCPoly::zero(realization.algebra());
    for (c, label) in presentation.bracket(a, b)? {
        rhs += &realization.get(label)?.scale(&c);
    }
    if let Some(d) = cmp {
        rhs = rhs.truncate(d);
    }
    Ok((cmp, &lhs - &rhs))
}

/// Verifies every strict generator pair of `presentation` against
/// `realization` and reports the residuals.
pub fn check_bracket(
    realization: &Realization,
    presentation: &Presentation,
) -> Result<BracketReport, Error> {
    let start = Instant::now();
    let gens = presentation.generators();
    for &label in &gens {
        realization.get(label)?;
    }
    let mut tasks = Vec::new();
    for i in 0..gens.len() {
        for j in (i + 1)..gens.len() {
            tasks.push((gens[i], gens[j]));
        }
    }
    // A one-generator presentation has no strict pair; report its (trivially
    // commuting) self-pair so the check still states something.
    if gens.len() == 1 {
        tasks.push((gens[0], gens[0]));
    }
    let pairs: Vec<PairCheck> = tasks
        .par_iter()
        .map(|&(a, b)| -> Result<PairCheck, Error> {
            let (cmp, residual) = residual_for_pair(realization, presentation, a, b)?;
            Ok(PairCheck {
                g1: a.to_string(),
                g2: b.to_string(),
                cmp_degree: cmp,
                residual_terms: residual.term_count(),
            })
        })
        .collect::<Result<_, _>>()?;
    let pass = pairs.iter().all(|p| p.residual_terms == 0);
    Ok(BracketReport {
        suite: presentation.name().into(),
        n: presentation.n(),
        metric: presentation.metric(),
        degree: realization.degree(),
        cmp_degree: realization.degree().saturating_sub(1),
        pairs,
        pass,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// Entry of a pair-indexed matrix under the antisymmetric extension of both
/// labels: swapped labels flip the sign, repeated labels give zero.
pub fn signed_pair_entry(
    mat: &OpMatrix,
    row: (u8, u8),
    col: (u8, u8),
) -> Result<NCPoly, Error> {
    if row.0 == row.1 || col.0 == col.1 {
        return Ok(NCPoly::zero(mat.algebra()));
    }
    let (rp, r_swapped) = PairIndex::normalize(row.0, row.1)?;
    let (cp, c_swapped) = PairIndex::normalize(col.0, col.1)?;
    let entry = mat.entry(Idx::Pair(rp), Idx::Pair(cp)).poly().clone();
    Ok(if r_swapped != c_swapped { -&entry } else { entry })
}

/// The pair coordinate with antisymmetric sign extension.
fn signed_x_pair(algebra: Algebra, a: u8, b: u8) -> Result<NCPoly, Error> {
    if a == b {
        return Ok(NCPoly::zero(algebra));
    }
    let (p, swapped) = PairIndex::normalize(a, b)?;
    let x = NCPoly::x_pair(algebra, p.lo(), p.hi())?;
    Ok(if swapped { -&x } else { x })
}

/// Closed form of `[x_{αβ}, (∂^m)_{ρσ}]` through alternating powers of the
/// pair-space operator:
/// `2 Σ_{k=1}^{m} C(m,k) Σ_μ g^{μμ} (−K)^{k−1}_{(αβ)(μρ)} (∂^{m−k})_{μσ}`.
pub fn alternating_power_commutator(
    algebra: Algebra,
    row: (u8, u8),
    col: (u8, u8),
    m: u32,
) -> Result<NCPoly, Error> {
    let metric = algebra.metric();
    let k_powers = k_matrix(algebra)?.powers(m.saturating_sub(1))?;
    let mut acc = NCPoly::zero(algebra);
    for k in 1..=m {
        let coeff = Rational::from_big(
            BigInt::from(if k % 2 == 1 { 2 } else { -2 }) * binomial(m as usize, k as usize),
            1.into(),
        );
        let d_power = partial_power(algebra, m - k)?;
        for mu in 1..=metric.dim() {
            let left = signed_pair_entry(&k_powers[k as usize - 1], row, (mu, col.0))?;
            if left.is_zero() {
                continue;
            }
            let right = d_power.entry(Idx::Vector(mu), Idx::Vector(col.1)).poly();
            if right.is_zero() {
                continue;
            }
            let weight = Rational::from_integer(metric.sign(mu) as i64) * coeff.clone();
            acc += &left.checked_mul(right)?.scale_rational(&weight);
        }
    }
    Ok(acc)
}

/// Closed form of `[x_{αβ}, (∂^m)_{ρσ}]` as a split bilinear combination of
/// lower matrix powers:
/// `Σ_{p=1}^{m} (−1)^{p−1} [ (∂^{m−p})_{ασ} (∂^{p−1})_{βρ}
///                          − (∂^{p−1})_{αρ} (∂^{m−p})_{βσ} ]`.
pub fn split_power_commutator(
    algebra: Algebra,
    row: (u8, u8),
    col: (u8, u8),
    m: u32,
) -> Result<NCPoly, Error> {
    let (alpha, beta) = row;
    let (rho, sigma) = col;
    let powers: Vec<OpMatrix> = (0..m)
        .map(|j| partial_power(algebra, j))
        .collect::<Result<_, _>>()?;
    let entry = |j: u32, r: u8, c: u8| powers[j as usize].entry(Idx::Vector(r), Idx::Vector(c));
    let mut acc = NCPoly::zero(algebra);
    for p in 1..=m {
        let first = entry(m - p, alpha, sigma).mul(entry(p - 1, beta, rho));
        let second = entry(p - 1, alpha, rho).mul(entry(m - p, beta, sigma));
        let diff = first.sub(&second).into_poly();
        acc += &(if p % 2 == 1 { diff } else { -&diff });
    }
    Ok(acc)
}

/// The alternating binomial sum
/// `Σ_{k−l=p} (−1)^{k−1} C(m,k) C(k−1,l)` over `p ≤ k ≤ m`, which the split
/// bilinear expansion reduces to; it collapses to `(−1)^{p−1}`.
pub fn alternating_binomial_sum(m: u32, p: u32) -> BigInt {
    let mut acc = BigInt::from(0);
    for k in p..=m {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        acc += sign * binomial(m as usize, k as usize) * binomial(k as usize - 1, (k - p) as usize);
    }
    acc
}

/// Outcome of one closed-form oracle run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleReport {
    pub oracle: String,
    pub metric: Option<Metric>,
    pub max_power: u32,
    pub cases: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub elapsed_ms: u64,
}

impl OracleReport {
    pub fn with_elapsed_zeroed(mut self) -> Self {
        self.elapsed_ms = 0;
        self
    }
}

/// Compares the closed-form matrix power of the pair-space operator with the
/// recursively contracted power for every `m ≤ m_max`.
pub fn k_power_oracle(metric: Metric, m_max: u32) -> Result<OracleReport, Error> {
    let start = Instant::now();
    let algebra = Algebra::heisenberg(metric)?;
    let recursive = k_matrix(algebra)?.powers(m_max)?;
    let mut pass = true;
    for (m, expected) in recursive.iter().enumerate() {
        if closed_form_k_power(algebra, m as u32)? != *expected {
            pass = false;
        }
    }
    let note = match metric.kind() {
        crate::ncalgebra::MetricKind::Euclidean => None,
        crate::ncalgebra::MetricKind::Minkowski => Some(
            "indefinite-signature run: closed form extended beyond its \
             positive-definite derivation"
                .into(),
        ),
    };
    Ok(OracleReport {
        oracle: "pair-operator-closed-power".into(),
        metric: Some(metric),
        max_power: m_max,
        cases: m_max as usize + 1,
        pass,
        note,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// Checks both closed forms of `[x_{αβ}, (∂^m)_{ρσ}]` against the engine
/// commutator for every index tuple and every `1 ≤ m ≤ m_max`.
pub fn commutator_expansion_oracle(metric: Metric, m_max: u32) -> Result<OracleReport, Error> {
    let start = Instant::now();
    let algebra = Algebra::heisenberg(metric)?;
    let n = metric.dim();
    let mut tuples = Vec::new();
    for alpha in 1..=n {
        for beta in 1..=n {
            for rho in 1..=n {
                for sigma in 1..=n {
                    tuples.push(((alpha, beta), (rho, sigma)));
                }
            }
        }
    }
    let results: Vec<bool> = tuples
        .par_iter()
        .map(|&(row, col)| -> Result<bool, Error> {
            for m in 1..=m_max {
                let coord = signed_x_pair(algebra, row.0, row.1)?;
                let entry = partial_power(algebra, m)?
                    .entry(Idx::Vector(col.0), Idx::Vector(col.1))
                    .poly()
                    .clone();
                let engine = coord.checked_commutator(&entry)?;
                if engine != alternating_power_commutator(algebra, row, col, m)? {
                    return Ok(false);
                }
                if engine != split_power_commutator(algebra, row, col, m)? {
                    return Ok(false);
                }
            }
            Ok(true)
        })
        .collect::<Result<_, _>>()?;
    let pass = results.iter().all(|&ok| ok);
    let note = match metric.kind() {
        crate::ncalgebra::MetricKind::Euclidean => None,
        crate::ncalgebra::MetricKind::Minkowski => Some(
            "indefinite-signature run: expansions extended beyond their \
             positive-definite derivation"
                .into(),
        ),
    };
    Ok(OracleReport {
        oracle: "coordinate-power-commutator-expansions".into(),
        metric: Some(metric),
        max_power: m_max,
        cases: tuples.len() * m_max as usize * 2,
        pass,
        note,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// Checks the binomial collapse for every `1 ≤ p ≤ m ≤ m_max`.
pub fn binomial_collapse_oracle(m_max: u32) -> Result<OracleReport, Error> {
    let start = Instant::now();
    let mut cases = 0;
    let mut pass = true;
    for m in 1..=m_max {
        for p in 1..=m {
            cases += 1;
            let expected = BigInt::from(if p % 2 == 1 { 1 } else { -1 });
            if alternating_binomial_sum(m, p) != expected {
                pass = false;
            }
        }
    }
    Ok(OracleReport {
        oracle: "alternating-binomial-collapse".into(),
        metric: None,
        max_power: m_max,
        cases,
        pass,
        note: None,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// Checks that the summed realized generators, applied `power` times to the
/// constant polynomial, reproduce the commutative power of the summed
/// coordinates. Requires `degree ≥ power − 1` so no contributing term is
/// truncated away.
pub fn symmetric_action_check(
    realization: &Realization,
    weights: &[(GeneratorLabel, GaussianRational)],
    power: u32,
) -> Result<bool, Error> {
    if realization.degree() + 1 < power {
        return Err(Error::Precondition(format!(
            "power {power} needs truncation degree at least {}",
            power - 1
        )));
    }
    let algebra = realization.algebra();
    let mut summed = NCPoly::zero(algebra);
    let mut coords = NCPoly::zero(algebra);
    for (label, w) in weights {
        summed += &realization.get(*label)?.scale(w);
        let coord = match *label {
            GeneratorLabel::X(mu) => NCPoly::x_vec(algebra, mu)?,
            GeneratorLabel::M(p) => NCPoly::x_pair(algebra, p.lo(), p.hi())?,
            other => {
                return Err(Error::Precondition(format!(
                    "generator {other} has no single coordinate image"
                )))
            }
        };
        coords += &coord.scale(w);
    }
    let mut state = PolyState::unit(algebra);
    let mut expected = NCPoly::one(algebra);
    for _ in 0..power {
        state = summed.act(&state)?;
        expected = expected.checked_mul(&coords)?;
    }
    Ok(state.into_poly() == expected)
}

/// Checks that the metric-weighted product of the transposed quantum-angle
/// matrix with itself equals the metric unit in every retained degree.
pub fn angle_orthogonality_check(metric: Metric, degree: u32) -> Result<bool, Error> {
    let algebra = Algebra::heisenberg(metric)?;
    let lam = exp_partial(algebra, degree)?;
    let product = lam.transpose().mat_mul(&lam)?.truncate(degree);
    Ok(product == OpMatrix::identity(algebra, Space::Vector(metric.dim()))?)
}

/// Checks that the relabelled-basis route reproduces the direct pair-space
/// realization of the rotation generators.
pub fn transport_agreement_check(gamma: &GammaCoeffs, degree: u32) -> Result<bool, Error> {
    let direct = realize_rotations(Metric::euclidean(gamma.n())?, degree)?;
    Ok(gamma_transport(gamma, degree)? == direct)
}

/// Checks that the closed-form deformed-coordinate realization equals the
/// generic series realization built from the same structure constants.
pub fn kappa_agreement_check(a: &[GaussianRational], degree: u32) -> Result<bool, Error> {
    let closed = realize_kappa_closed(a, degree)?;
    let series = realize_weyl_from_structure(&StructureConstants::kappa(a)?, degree)?;
    Ok(closed == series)
}

/// Outcome of one coefficient-perturbation trial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MutationOutcome {
    pub suite: String,
    pub label: String,
    pub monomial: String,
    pub delta: String,
    pub detected: bool,
    pub detecting_pair: Option<(String, String)>,
}

/// Perturbs one randomly chosen retained coefficient of `realization` and
/// reruns the bracket comparisons that could see the change, stopping at the
/// first nonzero residual.
pub fn mutation_trial(
    presentation: &Presentation,
    realization: &Realization,
    seed: u64,
) -> Result<MutationOutcome, Error> {
    if realization.degree() == 0 {
        return Err(Error::Precondition(
            "perturbation trials need at least one retained derivative order".into(),
        ));
    }
    let gens = presentation.generators();
    for &label in &gens {
        realization.get(label)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let label = loop {
        let candidate = gens[rng.gen_range(0..gens.len())];
        if realization.get(candidate)?.term_count() > 0 {
            break candidate;
        }
    };
    let poly = realization.get(label)?;
    let monomials: Vec<_> = poly.terms().map(|(m, _)| m.clone()).collect();
    let target = monomials[rng.gen_range(0..monomials.len())].clone();
    let choices: [Rational; 6] = [
        Rational::from_integer(1),
        Rational::from_integer(-1),
        Rational::new(1, 2),
        Rational::new(-1, 2),
        Rational::new(1, 3),
        Rational::new(-1, 3),
    ];
    let delta = GaussianRational::from(choices[rng.gen_range(0..choices.len())].clone());
    let bump = NCPoly::from_terms(realization.algebra(), [(target.clone(), delta.clone())])?;
    let mut mutated = realization.clone();
    mutated.set(label, poly + &bump)?;

    let mut detected = None;
    'outer: for i in 0..gens.len() {
        for j in (i + 1)..gens.len() {
            let (a, b) = (gens[i], gens[j]);
            let involved = a == label
                || b == label
                || presentation.bracket(a, b)?.iter().any(|(_, l)| *l == label);
            if !involved {
                continue;
            }
            let (_, residual) = residual_for_pair(&mutated, presentation, a, b)?;
            if !residual.is_zero() {
                detected = Some((a.to_string(), b.to_string()));
                break 'outer;
            }
        }
    }
    Ok(MutationOutcome {
        suite: presentation.name().into(),
        label: label.to_string(),
        monomial: target.to_string(),
        delta: delta.to_string(),
        detected: detected.is_some(),
        detecting_pair: detected,
    })
}

/// Runs `trials` perturbation trials, drawing the suite uniformly from
/// `suites` (realized once each) and deriving one sub-seed per trial from
/// `seed`.
pub fn mutation_campaign(
    suites: &[(Presentation, u32)],
    trials: u32,
    seed: u64,
) -> Result<Vec<MutationOutcome>, Error> {
    if suites.is_empty() {
        return Err(Error::Precondition("no suites given for the trials".into()));
    }
    let realized: Vec<(&Presentation, Realization)> = suites
        .iter()
        .map(|(p, d)| Ok((p, p.realize(*d)?)))
        .collect::<Result<_, Error>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials as usize);
    for _ in 0..trials {
        let pick = rng.gen_range(0..realized.len());
        let trial_seed = rng.gen::<u64>();
        let (presentation, realization) = &realized[pick];
        out.push(mutation_trial(presentation, realization, trial_seed)?);
    }
    Ok(out)
}
