//! Probabilistic-metric structures on finite sample spaces.
//!
//! Distance distribution functions `F_{x,y}(t) = P(d(x(ω), y(ω)) < t)` are
//! evaluated exactly here: the sample space is finite, so every probability
//! is a finite weighted sum and every axiom check is arithmetic, not Monte
//! Carlo. The t-norm throughout is `T_m(a, b) = max(a + b - 1, 0)`, under
//! which canonical E-spaces are Menger spaces; `min` is provided only as a
//! comparison baseline.
//!
//! Distribution functions are left-continuous (`F(t)` counts strict
//! inequality `d < t`) and piecewise constant, so suprema over `s < t`
//! reduce to evaluations at jump points and are exact.

use alloc::vec::Vec;

use crate::math::{self, KahanSum};
use crate::measure::Point;
use crate::scaling::AffineContraction;
use crate::{Error, Result};

const PROB_SUM_TOL: f64 = 1e-12;

/// Left-continuous distribution function on the nonnegative reals.
///
/// Either the Heaviside step at 0 or a weighted empirical CDF stored as
/// sorted jump points with cumulative probabilities.
#[derive(Debug, Clone, PartialEq)]
pub enum DistributionFunction {
    Heaviside,
    Empirical {
        /// Sorted distinct jump locations.
        points: Vec<f64>,
        /// `cum[k] = P(X <= points[k])`.
        cum: Vec<f64>,
    },
}

impl DistributionFunction {
    /// Empirical CDF of equally weighted samples.
    pub fn ecdf(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let w = 1.0 / samples.len() as f64;
        DistributionFunction::from_weighted(samples.iter().map(|&s| (s, w)))
    }

    /// Weighted CDF from `(value, probability)` pairs.
    pub fn from_weighted<I: IntoIterator<Item = (f64, f64)>>(pairs: I) -> Result<Self> {
        let mut vals: Vec<(f64, f64)> = Vec::new();
        for (v, w) in pairs {
            if v.is_nan() || v < 0.0 {
                return Err(Error::NegativeSample(v));
            }
            if !(w > 0.0) {
                return Err(Error::NonpositiveWeight(w));
            }
            vals.push((v, w));
        }
        if vals.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        vals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut points = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        for (v, w) in vals {
            match points.last() {
                Some(&last) if last == v => {
                    let k = weights.len() - 1;
                    weights[k] += w;
                }
                _ => {
                    points.push(v);
                    weights.push(w);
                }
            }
        }
        // All mass at zero is exactly the Heaviside function.
        if points.len() == 1 && points[0] == 0.0 {
            return Ok(DistributionFunction::Heaviside);
        }
        let mut cum = Vec::with_capacity(weights.len());
        let mut acc = KahanSum::new();
        for w in weights {
            acc.add(w);
            cum.push(acc.total().min(1.0));
        }
        Ok(DistributionFunction::Empirical { points, cum })
    }

    /// Left-continuous evaluation `F(t) = P(X < t)`.
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            DistributionFunction::Heaviside => {
                if t > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            DistributionFunction::Empirical { points, cum } => {
                // Index of the last jump strictly below t.
                match points.partition_point(|&p| p < t) {
                    0 => 0.0,
                    k => cum[k - 1],
                }
            }
        }
    }

    /// Tail probability `P(X >= t) = 1 - F(t)`.
    pub fn tail(&self, t: f64) -> f64 {
        1.0 - self.eval(t)
    }

    /// Jump locations (empty for Heaviside, which jumps at 0).
    pub fn jump_points(&self) -> &[f64] {
        match self {
            DistributionFunction::Heaviside => &[],
            DistributionFunction::Empirical { points, .. } => points,
        }
    }

    /// Largest gap `sup_t |F(t) - G(t)|` against a reference CDF, taken
    /// over both sides of every jump.
    pub fn sup_gap<G: Fn(f64) -> f64>(&self, reference: G) -> f64 {
        match self {
            DistributionFunction::Heaviside => (1.0 - reference(0.0)).abs(),
            DistributionFunction::Empirical { points, cum } => {
                let mut gap = 0.0f64;
                for (k, &p) in points.iter().enumerate() {
                    let below = if k == 0 { 0.0 } else { cum[k - 1] };
                    let r = reference(p);
                    gap = gap.max((below - r).abs()).max((cum[k] - r).abs());
                }
                gap
            }
        }
    }
}

/// The t-norm `T_m(a, b) = max(a + b - 1, 0)`.
///
/// The unit and annihilator cases short-circuit so the boundary axioms
/// `T(a, 1) = a` and `T(a, 0) = 0` hold exactly in floats.
pub fn tmin(a: f64, b: f64) -> Result<f64> {
    check_unit(a)?;
    check_unit(b)?;
    Ok(tm(a, b))
}

#[inline]
fn tm(a: f64, b: f64) -> f64 {
    if a == 1.0 {
        b
    } else if b == 1.0 {
        a
    } else if a == 0.0 || b == 0.0 {
        0.0
    } else {
        (a + b - 1.0).max(0.0)
    }
}

/// Baseline comparison t-norm `min(a, b)`.
pub fn tnorm_min(a: f64, b: f64) -> Result<f64> {
    check_unit(a)?;
    check_unit(b)?;
    Ok(a.min(b))
}

fn check_unit(a: f64) -> Result<()> {
    if (0.0..=1.0).contains(&a) {
        Ok(())
    } else {
        Err(Error::OutOfUnitInterval(a))
    }
}

/// Finite probability space: positive atom probabilities summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSpace {
    probs: Vec<f64>,
}

impl SampleSpace {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let mut sum = KahanSum::new();
        for &p in &probs {
            if !(p > 0.0) || !p.is_finite() {
                return Err(Error::NonpositiveWeight(p));
            }
            sum.add(p);
        }
        let total = sum.total();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::WeightSumNotOne(total));
        }
        Ok(SampleSpace { probs })
    }

    /// Uniform space with `n` atoms of probability `1/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMeasure);
        }
        SampleSpace::new(alloc::vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Random variable on a finite sample space with values in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteRandomVariable {
    space: SampleSpace,
    values: Vec<Point>,
}

impl FiniteRandomVariable {
    pub fn new(space: SampleSpace, values: Vec<Point>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::LengthMismatch(values.len(), space.len()));
        }
        let dim = values[0].dim();
        if values.iter().any(|v| v.dim() != dim) {
            return Err(Error::DimensionMismatch(dim, 0));
        }
        Ok(FiniteRandomVariable { space, values })
    }

    /// Constant random variable `x(ω) ≡ p`.
    pub fn constant(space: SampleSpace, p: Point) -> Self {
        let n = space.len();
        FiniteRandomVariable {
            space,
            values: alloc::vec![p; n],
        }
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn values(&self) -> &[Point] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(Error::SampleSpaceMismatch)
        }
    }

    /// Pointwise sup distance `max_ω d(x(ω), y(ω))`; dominates the E-space
    /// distance and is the net radius used by set pruning.
    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        self.same_space(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.dist(b))
            .fold(0.0, f64::max))
    }

    /// Canonical comparison by value vectors; used to order sets
    /// deterministically before pruning.
    fn canonical_cmp(&self, other: &Self) -> core::cmp::Ordering {
        for (a, b) in self.values.iter().zip(&other.values) {
            let o = a.canonical_cmp(b);
            if o != core::cmp::Ordering::Equal {
                return o;
            }
        }
        core::cmp::Ordering::Equal
    }
}

/// E-space distance distribution
/// `F_{x,y}(t) = P({ω : d(x(ω), y(ω)) < t})`, exact on the finite space.
pub fn espace_distance(
    x: &FiniteRandomVariable,
    y: &FiniteRandomVariable,
) -> Result<DistributionFunction> {
    x.same_space(y)?;
    DistributionFunction::from_weighted(
        x.values
            .iter()
            .zip(&y.values)
            .zip(x.space.probs())
            .map(|((a, b), &p)| (a.dist(b), p)),
    )
}

/// One violated grid inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub s: f64,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
}

/// Outcome of an exact inequality sweep; empty means the axiom holds on
/// the grid.
#[derive(Debug, Clone, Default)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Menger axiom `F_{x,y}(s + t) >= T_m(F_{x,z}(s), F_{z,y}(t))` on a grid,
/// from arbitrary CDF evaluators (negative controls corrupt these).
pub fn menger_check_fn(
    fxy: impl Fn(f64) -> f64,
    fxz: impl Fn(f64) -> f64,
    fzy: impl Fn(f64) -> f64,
    grid: &[(f64, f64)],
) -> ViolationReport {
    let mut report = ViolationReport::default();
    for &(s, t) in grid {
        let lhs = fxy(s + t);
        let rhs = tm(fxz(s), fzy(t));
        if lhs < rhs {
            report.violations.push(Violation { s, t, lhs, rhs });
        }
    }
    report
}

/// Menger axiom for a triple of random variables under `T_m`.
pub fn menger_check(
    x: &FiniteRandomVariable,
    y: &FiniteRandomVariable,
    z: &FiniteRandomVariable,
    grid: &[(f64, f64)],
) -> Result<ViolationReport> {
    let fxy = espace_distance(x, y)?;
    let fxz = espace_distance(x, z)?;
    let fzy = espace_distance(z, y)?;
    Ok(menger_check_fn(
        |t| fxy.eval(t),
        |s| fxz.eval(s),
        |t| fzy.eval(t),
        grid,
    ))
}

/// A map `f : E -> E` acting by one affine contraction per sample-space
/// atom: `f(x)(ω_j) = g_j(x(ω_j))`.
#[derive(Debug, Clone, PartialEq)]
pub struct EContraction {
    maps: Vec<AffineContraction>,
    ratio: f64,
}

impl EContraction {
    pub fn new(maps: Vec<AffineContraction>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let dim = maps[0].dim();
        if maps.iter().any(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch(dim, 0));
        }
        let ratio = maps.iter().map(|m| m.lipschitz_ratio()).fold(0.0, f64::max);
        Ok(EContraction { maps, ratio })
    }

    /// The same affine map on every atom.
    pub fn uniform(map: AffineContraction, atoms: usize) -> Result<Self> {
        EContraction::new(alloc::vec![map; atoms])
    }

    /// `max_j Lip g_j`.
    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn maps(&self) -> &[AffineContraction] {
        &self.maps
    }

    pub fn apply(&self, x: &FiniteRandomVariable) -> Result<FiniteRandomVariable> {
        if self.maps.len() != x.space().len() {
            return Err(Error::LengthMismatch(self.maps.len(), x.space().len()));
        }
        let values = self
            .maps
            .iter()
            .zip(x.values())
            .map(|(g, v)| g.apply(v))
            .collect::<Result<Vec<_>>>()?;
        FiniteRandomVariable::new(x.space().clone(), values)
    }
}

/// Sehgal contraction check `F_{f(x),f(y)}(r t) >= F_{x,y}(t)` on a grid.
pub fn sehgal_check(
    f: &EContraction,
    x: &FiniteRandomVariable,
    y: &FiniteRandomVariable,
    r: f64,
    grid: &[f64],
) -> Result<ViolationReport> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::RatioNotContractive(r));
    }
    let fx = f.apply(x)?;
    let fy = f.apply(y)?;
    let mapped = espace_distance(&fx, &fy)?;
    let base = espace_distance(x, y)?;
    let mut report = ViolationReport::default();
    for &t in grid {
        let lhs = mapped.eval(r * t);
        let rhs = base.eval(t);
        if lhs < rhs {
            report.violations.push(Violation { s: r * t, t, lhs, rhs });
        }
    }
    Ok(report)
}

/// Probabilistic Hausdorff–Pompeiu distance between finite sets, evaluated
/// on a grid of `t` values:
///
/// ```text
/// F_{A,B}(t) = sup_{s<t} T_m( inf_{x∈A} sup_{y∈B} F_{x,y}(s),
///                             inf_{y∈B} sup_{x∈A} F_{x,y}(s) )
/// ```
///
/// All pairwise CDFs are piecewise constant and left-continuous, and the
/// lattice of finitely many such functions under `T_m` stays that way, so
/// the supremum over `s < t` is attained at the jump points below `t` and
/// equals the left-continuous evaluation at `s = t`.
pub fn prob_hausdorff(
    a: &[FiniteRandomVariable],
    b: &[FiniteRandomVariable],
    grid: &[f64],
) -> Result<Vec<f64>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    let mut pairwise = Vec::with_capacity(a.len());
    for x in a {
        let row = b
            .iter()
            .map(|y| espace_distance(x, y))
            .collect::<Result<Vec<_>>>()?;
        pairwise.push(row);
    }
    let mut out = Vec::with_capacity(grid.len());
    for &t in grid {
        let fwd = (0..a.len())
            .map(|i| {
                (0..b.len())
                    .map(|j| pairwise[i][j].eval(t))
                    .fold(0.0, f64::max)
            })
            .fold(1.0, f64::min);
        let bwd = (0..b.len())
            .map(|j| {
                (0..a.len())
                    .map(|i| pairwise[i][j].eval(t))
                    .fold(0.0, f64::max)
            })
            .fold(1.0, f64::min);
        out.push(tm(fwd, bwd));
    }
    Ok(out)
}

/// Per-step convergence record of a fixed-point orbit.
#[derive(Debug, Clone)]
pub struct OrbitReport {
    /// `sup_ω d(x_j(ω), x_{j+1}(ω))` for each step `j`.
    pub step_sups: Vec<f64>,
}

impl OrbitReport {
    /// Consecutive ratios of the nonzero step sups.
    pub fn ratios(&self) -> Vec<f64> {
        self.step_sups
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .collect()
    }
}

/// Iterate `x_{j+1}(ω) = g_ω(x_j(ω))` for `steps` steps.
///
/// Requires `ratio(f) < 1`; the recorded step sups then decay
/// geometrically at least that fast.
pub fn fixed_point_iterate(
    f: &EContraction,
    z: &FiniteRandomVariable,
    steps: usize,
) -> Result<(FiniteRandomVariable, OrbitReport)> {
    if !(f.ratio() < 1.0) {
        return Err(Error::RatioNotContractive(f.ratio()));
    }
    let mut current = z.clone();
    let mut step_sups = Vec::with_capacity(steps);
    for _ in 0..steps {
        let next = f.apply(&current)?;
        step_sups.push(current.sup_distance(&next)?);
        current = next;
    }
    Ok((current, OrbitReport { step_sups }))
}

/// One step record of the invariant-set iteration.
#[derive(Debug, Clone)]
pub struct InvariantSetStep {
    /// Set size after pruning.
    pub size: usize,
    /// `F_{K_j, K_{j+1}}` evaluated on the configured grid.
    pub hausdorff: Vec<f64>,
}

/// Iterate `K_{j+1} = f_1(K_j) ∪ ... ∪ f_N(K_j)`, pruned to an
/// `epsilon`-net in the sup-over-ω distance, recording the probabilistic
/// Hausdorff distance between consecutive sets on `grid`.
pub fn invariant_set_iterate(
    maps: &[EContraction],
    z: &FiniteRandomVariable,
    steps: usize,
    epsilon: f64,
    grid: &[f64],
    cap: usize,
) -> Result<(Vec<FiniteRandomVariable>, Vec<InvariantSetStep>)> {
    if maps.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    for f in maps {
        if !(f.ratio() < 1.0) {
            return Err(Error::RatioNotContractive(f.ratio()));
        }
    }
    if epsilon < 0.0 {
        return Err(Error::ParameterOutOfRange {
            name: "epsilon",
            value: epsilon,
            range: "[0, inf)",
        });
    }
    let mut current = alloc::vec![z.clone()];
    let mut records = Vec::with_capacity(steps);
    for _ in 0..steps {
        let mut next = Vec::with_capacity(current.len() * maps.len());
        for f in maps {
            for x in &current {
                next.push(f.apply(x)?);
            }
        }
        let next = prune_to_net(next, epsilon);
        if next.len() > cap {
            return Err(Error::CapacityExceeded {
                size: next.len(),
                cap,
            });
        }
        let hausdorff = prob_hausdorff(&current, &next, grid)?;
        records.push(InvariantSetStep {
            size: next.len(),
            hausdorff,
        });
        current = next;
    }
    Ok((current, records))
}

/// Greedy `epsilon`-net in canonical order: keep a point iff it is farther
/// than `epsilon` (sup over ω) from every kept point.
fn prune_to_net(mut set: Vec<FiniteRandomVariable>, epsilon: f64) -> Vec<FiniteRandomVariable> {
    set.sort_by(|a, b| a.canonical_cmp(b));
    if epsilon == 0.0 {
        set.dedup_by(|a, b| a.canonical_cmp(b) == core::cmp::Ordering::Equal);
        return set;
    }
    let mut kept: Vec<FiniteRandomVariable> = Vec::new();
    for x in set {
        let close = kept
            .iter()
            .any(|k| k.sup_distance(&x).unwrap_or(f64::INFINITY) <= epsilon);
        if !close {
            kept.push(x);
        }
    }
    kept
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space2() -> SampleSpace {
        SampleSpace::new(alloc::vec![0.5, 0.5]).unwrap()
    }

    fn frv(space: &SampleSpace, vals: &[f64]) -> FiniteRandomVariable {
        FiniteRandomVariable::new(
            space.clone(),
            vals.iter().map(|&v| Point::x(v)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn ecdf_strict_inequality() {
        let f = DistributionFunction::ecdf(&[1.0, 2.0, 3.0]).unwrap();
        assert!((f.eval(2.0) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(f.eval(0.5), 0.0);
        assert_eq!(f.eval(3.5), 1.0);
    }

    #[test]
    fn ecdf_all_zeros_is_heaviside() {
        let f = DistributionFunction::ecdf(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(f, DistributionFunction::Heaviside);
        assert_eq!(f.eval(0.0), 0.0);
        assert_eq!(f.eval(1e-300), 1.0);
    }

    #[test]
    fn ecdf_rejects_negatives() {
        assert!(matches!(
            DistributionFunction::ecdf(&[-1.0]).unwrap_err(),
            Error::NegativeSample(_)
        ));
    }

    #[test]
    fn tmin_cases() {
        assert_eq!(tmin(1.0, 0.3).unwrap(), 0.3);
        assert!((tmin(0.7, 0.6).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(tmin(0.3, 0.3).unwrap(), 0.0);
        assert!(tmin(1.2, 0.5).is_err());
    }

    #[test]
    fn espace_distance_cases() {
        let sp = space2();
        let x = frv(&sp, &[0.0, 0.0]);
        assert_eq!(
            espace_distance(&x, &x).unwrap(),
            DistributionFunction::Heaviside
        );

        let y = frv(&sp, &[1.0, 3.0]);
        let f = espace_distance(&x, &y).unwrap();
        assert_eq!(f.eval(2.0), 0.5);

        // Constants: Heaviside shifted to d(a, b).
        let a = FiniteRandomVariable::constant(sp.clone(), Point::x(0.0));
        let b = FiniteRandomVariable::constant(sp, Point::x(2.0));
        let g = espace_distance(&a, &b).unwrap();
        assert_eq!(g.eval(2.0), 0.0);
        assert_eq!(g.eval(2.0 + 1e-12), 1.0);
    }

    #[test]
    fn menger_trivial_and_corrupted() {
        let sp = space2();
        let x = frv(&sp, &[0.3, 0.7]);
        let grid: Vec<(f64, f64)> = (0..10)
            .flat_map(|i| (0..10).map(move |j| (i as f64 / 8.0, j as f64 / 8.0)))
            .collect();
        let rep = menger_check(&x, &x, &x, &grid).unwrap();
        assert!(rep.passed());

        // Non-monotone "CDF" must be flagged: lhs dips to 0.2 where the
        // t-norm of the honest sides is 0.8.
        let broken = |t: f64| {
            if (1.5..2.0).contains(&t) {
                0.2
            } else {
                t.clamp(0.0, 1.0)
            }
        };
        let ok = |t: f64| t.clamp(0.0, 1.0);
        let rep = menger_check_fn(broken, ok, ok, &[(0.9, 0.9)]);
        assert!(!rep.passed());
    }

    #[test]
    fn sehgal_positive_and_negative_controls() {
        let sp = space2();
        let x = frv(&sp, &[0.0, 1.0]);
        let y = frv(&sp, &[2.0, 5.0]);
        let half = EContraction::uniform(AffineContraction::new_1d(0.5, 0.0).unwrap(), 2).unwrap();
        let grid: Vec<f64> = (1..40).map(|k| k as f64 * 0.25).collect();
        assert!(sehgal_check(&half, &x, &y, 0.5, &grid).unwrap().passed());
        // r below the true ratio fails.
        assert!(!sehgal_check(&half, &x, &y, 0.2, &grid).unwrap().passed());
        assert!(sehgal_check(&half, &x, &y, 1.0, &grid).is_err());
    }

    #[test]
    fn hausdorff_singletons() {
        let sp = space2();
        let x = frv(&sp, &[0.0, 0.0]);
        let same = prob_hausdorff(&[x.clone()], &[x.clone()], &[0.1, 1.0]).unwrap();
        assert_eq!(same, alloc::vec![1.0, 1.0]);

        // Constant singletons: every pairwise CDF is 0/1-valued, so the
        // formula collapses to the left limit of F_{x,y}.
        let a = FiniteRandomVariable::constant(sp.clone(), Point::x(0.0));
        let b = FiniteRandomVariable::constant(sp.clone(), Point::x(2.0));
        let fab = espace_distance(&a, &b).unwrap();
        let vals = prob_hausdorff(&[a], &[b], &[1.0, 2.0, 3.0]).unwrap();
        for (v, &t) in vals.iter().zip(&[1.0, 2.0, 3.0]) {
            assert_eq!(*v, fab.eval(t));
        }

        // Mixed CDF singletons follow T_m(F(t), F(t)) of the displayed
        // formula: jumps of 1/2 at 1 and 3 give 0 below 3 and 1 above.
        let y = frv(&sp, &[1.0, 3.0]);
        let vals = prob_hausdorff(&[x], &[y], &[2.0, 4.0]).unwrap();
        assert_eq!(vals, alloc::vec![0.0, 1.0]);
    }

    #[test]
    fn fixed_point_affine() {
        // g(ω) = x/2 + c(ω) has fixed point 2 c(ω).
        let sp = space2();
        let f = EContraction::new(alloc::vec![
            AffineContraction::new_1d(0.5, 1.0).unwrap(),
            AffineContraction::new_1d(0.5, 3.0).unwrap(),
        ])
        .unwrap();
        let z = frv(&sp, &[0.0, 0.0]);
        let (limit, report) = fixed_point_iterate(&f, &z, 40).unwrap();
        assert!((limit.values()[0].coords()[0] - 2.0).abs() < 1e-10);
        assert!((limit.values()[1].coords()[0] - 6.0).abs() < 1e-10);
        // Exactly geometric until the steps reach the ulp floor.
        for w in report.step_sups.windows(2) {
            if w[0] > 1e-12 {
                assert!(w[1] / w[0] <= 0.5 + 1e-12);
            }
        }

        // Already fixed start: zero step distances.
        let fixed = frv(&sp, &[2.0, 6.0]);
        let (_, rep) = fixed_point_iterate(&f, &fixed, 5).unwrap();
        assert!(rep.step_sups.iter().all(|&s| s == 0.0));

        let expanding =
            EContraction::uniform(AffineContraction::new_1d(1.0, 1.0).unwrap(), 2).unwrap();
        assert!(fixed_point_iterate(&expanding, &z, 3).is_err());
    }

    #[test]
    fn invariant_set_dyadic_counts() {
        // Maps x/2 and x/2 + 1/2 on a single-atom space: K_j is the
        // depth-j dyadic grid, 2^j points before pruning.
        let sp = SampleSpace::uniform(1).unwrap();
        let maps = alloc::vec![
            EContraction::uniform(AffineContraction::new_1d(0.5, 0.0).unwrap(), 1).unwrap(),
            EContraction::uniform(AffineContraction::new_1d(0.5, 0.5).unwrap(), 1).unwrap(),
        ];
        let z = FiniteRandomVariable::constant(sp, Point::x(0.0));
        let (_, records) =
            invariant_set_iterate(&maps, &z, 4, 0.0, &[0.5], 1 << 12).unwrap();
        let sizes: Vec<usize> = records.iter().map(|r| r.size).collect();
        assert_eq!(sizes, alloc::vec![2, 4, 8, 16]);
    }

    #[test]
    fn invariant_set_capacity_guard() {
        let sp = SampleSpace::uniform(1).unwrap();
        let maps = alloc::vec![
            EContraction::uniform(AffineContraction::new_1d(0.5, 0.0).unwrap(), 1).unwrap(),
            EContraction::uniform(AffineContraction::new_1d(0.5, 0.5).unwrap(), 1).unwrap(),
        ];
        let z = FiniteRandomVariable::constant(sp, Point::x(0.0));
        assert!(matches!(
            invariant_set_iterate(&maps, &z, 6, 0.0, &[0.5], 8).unwrap_err(),
            Error::CapacityExceeded { .. }
        ));
    }
}
