//! Scaling laws with weights and random-scaling-law samplers.
//!
//! A scaling law is a tuple `(p_1, S_1, ..., p_N, S_N)` with `Σ p_i = 1` and
//! affine branch maps `S_i`. Affine maps keep the Lipschitz ratio exact
//! (the operator norm of the linear part), which in turn keeps the
//! contraction factor
//!
//! ```text
//! λ_q = Σ p_i r_i^q      (aggregated by expectation or essential supremum)
//! ```
//!
//! exact for every law family shipped here.

use alloc::vec::Vec;

use crate::math::{self, KahanSum};
use crate::measure::{mix, DiscreteMeasure, Point, MAX_DIM};
use crate::rng::RngStream;
use crate::{Error, Estimate, Result};

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Affine map `x -> A x + b` on `R^d` with its operator norm cached.
///
/// Non-contractive branches are allowed; contraction is a law-level
/// property via `λ_q`, not a per-branch one.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineContraction {
    linear: [[f64; MAX_DIM]; MAX_DIM],
    offset: Point,
    dim: usize,
    ratio: f64,
}

impl AffineContraction {
    pub fn new(linear: &[Vec<f64>], offset: &[f64]) -> Result<Self> {
        let dim = offset.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::DimensionOutOfRange(dim));
        }
        if linear.len() != dim {
            return Err(Error::DimensionMismatch(linear.len(), dim));
        }
        let mut a = [[0.0; MAX_DIM]; MAX_DIM];
        for (i, row) in linear.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(row.len(), dim));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite);
                }
                a[i][j] = v;
            }
        }
        let offset = Point::new(offset)?;
        let ratio = operator_norm(&a, dim);
        Ok(AffineContraction {
            linear: a,
            offset,
            dim,
            ratio,
        })
    }

    /// 1-D map `x -> scale * x + offset`.
    pub fn new_1d(scale: f64, offset: f64) -> Result<Self> {
        AffineContraction::new(&[alloc::vec![scale]], &[offset])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Exact Lipschitz constant: the operator norm of the linear part.
    pub fn lipschitz_ratio(&self) -> f64 {
        self.ratio
    }

    pub fn apply(&self, p: &Point) -> Result<Point> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch(p.dim(), self.dim));
        }
        let mut out = [0.0; MAX_DIM];
        for i in 0..self.dim {
            let mut s = self.offset.coords()[i];
            for j in 0..self.dim {
                s += self.linear[i][j] * p.coords()[j];
            }
            out[i] = s;
        }
        Point::new(&out[..self.dim])
    }

    /// Composition `self ∘ other`.
    pub fn compose(&self, other: &AffineContraction) -> Result<AffineContraction> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let d = self.dim;
        let mut linear = Vec::with_capacity(d);
        for i in 0..d {
            let mut row = Vec::with_capacity(d);
            for j in 0..d {
                let mut s = 0.0;
                for k in 0..d {
                    s += self.linear[i][k] * other.linear[k][j];
                }
                row.push(s);
            }
            linear.push(row);
        }
        let shifted = self.apply(&other.offset)?;
        AffineContraction::new(&linear, shifted.coords())
    }

    /// Fixed point `x = A x + b`, if `I - A` is invertible.
    pub fn fixed_point(&self) -> Option<Point> {
        let d = self.dim;
        // Solve (I - A) x = b by Gaussian elimination with partial pivoting.
        let mut m = [[0.0; MAX_DIM + 1]; MAX_DIM];
        for i in 0..d {
            for j in 0..d {
                m[i][j] = if i == j { 1.0 } else { 0.0 } - self.linear[i][j];
            }
            m[i][d] = self.offset.coords()[i];
        }
        for col in 0..d {
            let mut piv = col;
            for r in col + 1..d {
                if m[r][col].abs() > m[piv][col].abs() {
                    piv = r;
                }
            }
            if m[piv][col].abs() < 1e-14 {
                return None;
            }
            m.swap(col, piv);
            for r in 0..d {
                if r == col {
                    continue;
                }
                let f = m[r][col] / m[col][col];
                for c in col..=d {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
        let mut x = [0.0; MAX_DIM];
        for i in 0..d {
            x[i] = m[i][d] / m[i][i];
        }
        Point::new(&x[..d]).ok()
    }
}

/// Spectral norm of the top-left `dim x dim` block: exact closed forms for
/// `dim <= 2`, power iteration on `AᵀA` to 1e-12 for `dim = 3`.
fn operator_norm(a: &[[f64; MAX_DIM]; MAX_DIM], dim: usize) -> f64 {
    match dim {
        1 => a[0][0].abs(),
        2 => {
            // Largest eigenvalue of the 2x2 Gram matrix.
            let g11 = a[0][0] * a[0][0] + a[1][0] * a[1][0];
            let g22 = a[0][1] * a[0][1] + a[1][1] * a[1][1];
            let g12 = a[0][0] * a[0][1] + a[1][0] * a[1][1];
            let tr = g11 + g22;
            let disc = math::sqrt((g11 - g22) * (g11 - g22) + 4.0 * g12 * g12);
            math::sqrt(((tr + disc) / 2.0).max(0.0))
        }
        _ => {
            let mut g = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    let mut s = 0.0;
                    for k in 0..3 {
                        s += a[k][i] * a[k][j];
                    }
                    g[i][j] = s;
                }
            }
            // Rayleigh quotient from each basis start; degenerate spectra
            // converge immediately, gaps converge geometrically.
            let mut best = 0.0f64;
            for start in 0..3 {
                let mut v = [0.0; 3];
                v[start] = 1.0;
                let mut lambda = 0.0;
                for _ in 0..500 {
                    let mut w = [0.0; 3];
                    for i in 0..3 {
                        for j in 0..3 {
                            w[i] += g[i][j] * v[j];
                        }
                    }
                    let norm = math::sqrt(w.iter().map(|x| x * x).sum());
                    if norm < 1e-300 {
                        lambda = 0.0;
                        break;
                    }
                    for x in w.iter_mut() {
                        *x /= norm;
                    }
                    let mut rq = 0.0;
                    for i in 0..3 {
                        for j in 0..3 {
                            rq += w[i] * g[i][j] * w[j];
                        }
                    }
                    if (rq - lambda).abs() <= 1e-13 * rq.max(1.0) {
                        lambda = rq;
                        break;
                    }
                    lambda = rq;
                    v = w;
                }
                best = best.max(lambda);
            }
            math::sqrt(best.max(0.0))
        }
    }
}

/// A scaling law with weights: branches `(p_i, S_i)`, `Σ p_i = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingLaw {
    branches: Vec<(f64, AffineContraction)>,
    dim: usize,
}

impl ScalingLaw {
    pub fn new(branches: Vec<(f64, AffineContraction)>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let dim = branches[0].1.dim();
        let mut sum = KahanSum::new();
        for (p, s) in &branches {
            if !p.is_finite() {
                return Err(Error::NonFinite);
            }
            if *p <= 0.0 {
                return Err(Error::NonpositiveWeight(*p));
            }
            if s.dim() != dim {
                return Err(Error::DimensionMismatch(s.dim(), dim));
            }
            sum.add(*p);
        }
        let total = sum.total();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::WeightSumNotOne(total));
        }
        Ok(ScalingLaw { branches, dim })
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn branches(&self) -> &[(f64, AffineContraction)] {
        &self.branches
    }

    /// `Σ p_i r_i^q` for this (deterministic) law.
    pub fn contraction_sum(&self, q: f64) -> f64 {
        math::sum(
            self.branches
                .iter()
                .map(|(p, s)| p * math::pow(s.lipschitz_ratio(), q)),
        )
    }

    /// `S µ = Σ p_i S_i µ^(i)` with one input measure per branch.
    pub fn apply(&self, inputs: &[DiscreteMeasure]) -> Result<DiscreteMeasure> {
        if inputs.len() != self.branches.len() {
            return Err(Error::LengthMismatch(inputs.len(), self.branches.len()));
        }
        let mut weights = Vec::with_capacity(self.branches.len());
        let mut pushed = Vec::with_capacity(self.branches.len());
        for ((p, s), mu) in self.branches.iter().zip(inputs) {
            mu.require_unit_mass()?;
            weights.push(*p);
            pushed.push(mu.pushforward(s)?);
        }
        mix(&weights, &pushed)
    }

    /// `S µ` with the same input measure on every branch (the deterministic
    /// operator of the fixed-point equation `S µ = µ`).
    pub fn apply_same(&self, mu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
        mu.require_unit_mass()?;
        let mut weights = Vec::with_capacity(self.branches.len());
        let mut pushed = Vec::with_capacity(self.branches.len());
        for (p, s) in &self.branches {
            weights.push(*p);
            pushed.push(mu.pushforward(s)?);
        }
        mix(&weights, &pushed)
    }
}

/// Scalar sampler for a law-family parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampler {
    Fixed(f64),
    Uniform { lo: f64, hi: f64 },
}

impl Sampler {
    fn validate(&self) -> Result<()> {
        match *self {
            Sampler::Fixed(v) => {
                if v.is_finite() {
                    Ok(())
                } else {
                    Err(Error::NonFinite)
                }
            }
            Sampler::Uniform { lo, hi } => {
                if !lo.is_finite() || !hi.is_finite() {
                    Err(Error::NonFinite)
                } else if lo > hi {
                    Err(Error::ParameterOutOfRange {
                        name: "uniform sampler",
                        value: lo,
                        range: "lo <= hi",
                    })
                } else {
                    Ok(())
                }
            }
        }
    }

    fn draw(&self, stream: &mut RngStream) -> f64 {
        match *self {
            Sampler::Fixed(v) => v,
            Sampler::Uniform { lo, hi } => stream.next_in(lo, hi),
        }
    }

    /// Midpoint of the declared range; the deterministic representative.
    fn representative(&self) -> f64 {
        match *self {
            Sampler::Fixed(v) => v,
            Sampler::Uniform { lo, hi } => 0.5 * (lo + hi),
        }
    }

    /// Supremum of `|value|` over the declared range.
    fn sup_abs(&self) -> f64 {
        match *self {
            Sampler::Fixed(v) => v.abs(),
            Sampler::Uniform { lo, hi } => lo.abs().max(hi.abs()),
        }
    }
}

/// Ratio and offset samplers for one branch of a parametric 1-D family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSampler {
    pub ratio: Sampler,
    pub offset: Sampler,
}

/// The two 1-D heavy-tail example laws on the base space `Ω = (0, 1]`
/// with uniform sampling: `N = 1`, branch map `x/2 + c(ω)`.
///
/// `Reciprocal` uses `c(ω) = 1/ω` (tail of `l_q(δ_0, S δ_0)` at `q = 1`
/// is exactly `min(1, 1/t)`); `ExpInv` uses `c(ω) = e^{1/ω}` (tail
/// `min(1, 1/ln t)`, and `E c = ∞`). Both are contractions with ratio 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeavyTailVariant {
    ExpInv,
    Reciprocal,
}

impl HeavyTailVariant {
    pub fn offset(&self, omega: f64) -> f64 {
        match self {
            HeavyTailVariant::ExpInv => math::exp(1.0 / omega),
            HeavyTailVariant::Reciprocal => 1.0 / omega,
        }
    }
}

/// Distribution over scaling laws.
#[derive(Debug, Clone, PartialEq)]
pub enum RandomScalingLawSpec {
    /// Finite mixture of deterministic laws with selection probabilities.
    FiniteMixture {
        components: Vec<(f64, ScalingLaw)>,
    },
    /// 1-D family with fixed weights and per-branch parameter samplers.
    ParametricAffine {
        weights: Vec<f64>,
        branches: Vec<BranchSampler>,
    },
    /// The heavy-tail example family.
    HeavyTail(HeavyTailVariant),
}

impl RandomScalingLawSpec {
    /// Single deterministic law.
    pub fn deterministic(law: ScalingLaw) -> Self {
        RandomScalingLawSpec::FiniteMixture {
            components: alloc::vec![(1.0, law)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RandomScalingLawSpec::FiniteMixture { components } => {
                if components.is_empty() {
                    return Err(Error::EmptyMeasure);
                }
                let mut sum = KahanSum::new();
                for (p, _) in components {
                    if *p <= 0.0 {
                        return Err(Error::NonpositiveWeight(*p));
                    }
                    sum.add(*p);
                }
                let total = sum.total();
                if (total - 1.0).abs() > WEIGHT_SUM_TOL {
                    return Err(Error::WeightSumNotOne(total));
                }
                Ok(())
            }
            RandomScalingLawSpec::ParametricAffine { weights, branches } => {
                if weights.len() != branches.len() {
                    return Err(Error::LengthMismatch(weights.len(), branches.len()));
                }
                if weights.is_empty() {
                    return Err(Error::EmptyMeasure);
                }
                let mut sum = KahanSum::new();
                for &p in weights {
                    if p <= 0.0 {
                        return Err(Error::NonpositiveWeight(p));
                    }
                    sum.add(p);
                }
                let total = sum.total();
                if (total - 1.0).abs() > WEIGHT_SUM_TOL {
                    return Err(Error::WeightSumNotOne(total));
                }
                for b in branches {
                    b.ratio.validate()?;
                    b.offset.validate()?;
                }
                Ok(())
            }
            RandomScalingLawSpec::HeavyTail(_) => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            RandomScalingLawSpec::FiniteMixture { components } => components[0].1.dim(),
            _ => 1,
        }
    }

    /// True when every draw returns the same law.
    pub fn is_deterministic(&self) -> bool {
        match self {
            RandomScalingLawSpec::FiniteMixture { components } => components.len() == 1,
            RandomScalingLawSpec::ParametricAffine { branches, .. } => branches
                .iter()
                .all(|b| matches!(b.ratio, Sampler::Fixed(_)) && matches!(b.offset, Sampler::Fixed(_))),
            RandomScalingLawSpec::HeavyTail(_) => false,
        }
    }

    /// Draw one scaling law; deterministic given the stream state.
    pub fn sample(&self, stream: &mut RngStream) -> ScalingLaw {
        match self {
            RandomScalingLawSpec::FiniteMixture { components } => {
                if components.len() == 1 {
                    return components[0].1.clone();
                }
                let u = stream.next_unit();
                let mut acc = 0.0;
                for (p, law) in components {
                    acc += p;
                    if u < acc {
                        return law.clone();
                    }
                }
                components[components.len() - 1].1.clone()
            }
            RandomScalingLawSpec::ParametricAffine { weights, branches } => {
                let branches = weights
                    .iter()
                    .zip(branches)
                    .map(|(&p, b)| {
                        let ratio = b.ratio.draw(stream);
                        let offset = b.offset.draw(stream);
                        (
                            p,
                            AffineContraction::new_1d(ratio, offset)
                                .expect("validated samplers produce finite parameters"),
                        )
                    })
                    .collect();
                ScalingLaw::new(branches).expect("validated weights")
            }
            RandomScalingLawSpec::HeavyTail(v) => {
                let omega = stream.next_unit_open();
                self.heavy_tail_law(v.offset(omega))
            }
        }
    }

    fn heavy_tail_law(&self, offset: f64) -> ScalingLaw {
        // e^{1/ω} can overflow f64; clamp to MAX so the law stays usable as
        // a distance sample (the tail statistics treat it as "huge").
        let offset = if offset.is_finite() { offset } else { f64::MAX };
        ScalingLaw::new(alloc::vec![(
            1.0,
            AffineContraction::new_1d(0.5, offset).expect("finite offset"),
        )])
        .expect("single unit-weight branch")
    }

    /// A deterministic representative law: mixture head, sampler midpoints,
    /// or `ω = 1`. Used for canonical default start measures.
    pub fn representative_law(&self) -> ScalingLaw {
        match self {
            RandomScalingLawSpec::FiniteMixture { components } => components[0].1.clone(),
            RandomScalingLawSpec::ParametricAffine { weights, branches } => {
                let branches = weights
                    .iter()
                    .zip(branches)
                    .map(|(&p, b)| {
                        (
                            p,
                            AffineContraction::new_1d(
                                b.ratio.representative(),
                                b.offset.representative(),
                            )
                            .expect("finite representative"),
                        )
                    })
                    .collect();
                ScalingLaw::new(branches).expect("validated weights")
            }
            RandomScalingLawSpec::HeavyTail(v) => self.heavy_tail_law(v.offset(1.0)),
        }
    }

    /// Expected contraction factor `λ_q = E Σ p_i r_i^q`.
    ///
    /// Exact for finite mixtures and the heavy-tail family (their ratio is
    /// deterministic); Monte Carlo over `m` draws otherwise.
    pub fn lambda_q_expected(&self, q: f64, m: usize, stream: &mut RngStream) -> Result<Estimate> {
        require_positive_q(q)?;
        match self {
            RandomScalingLawSpec::FiniteMixture { components } => Ok(Estimate::exact(math::sum(
                components
                    .iter()
                    .map(|(p, law)| p * law.contraction_sum(q)),
            ))),
            RandomScalingLawSpec::HeavyTail(_) => Ok(Estimate::exact(math::pow(0.5, q))),
            RandomScalingLawSpec::ParametricAffine { .. } => {
                if m == 0 {
                    return Err(Error::ParameterOutOfRange {
                        name: "m",
                        value: 0.0,
                        range: "[1, inf)",
                    });
                }
                let samples: Vec<f64> = (0..m)
                    .map(|_| self.sample(stream).contraction_sum(q))
                    .collect();
                let (value, std_err) = math::mean_and_se(&samples);
                Ok(Estimate { value, std_err })
            }
        }
    }

    /// Essential supremum `λ_q = ess sup Σ p_i r_i^q`, from the declared
    /// structure: the max over mixture components, the analytic supremum of
    /// each sampler range, or the deterministic heavy-tail ratio.
    pub fn lambda_q_esssup(&self, q: f64) -> Result<f64> {
        require_positive_q(q)?;
        match self {
            RandomScalingLawSpec::FiniteMixture { components } => Ok(components
                .iter()
                .map(|(_, law)| law.contraction_sum(q))
                .fold(0.0, f64::max)),
            RandomScalingLawSpec::ParametricAffine { weights, branches } => Ok(math::sum(
                weights
                    .iter()
                    .zip(branches)
                    .map(|(&p, b)| p * math::pow(b.ratio.sup_abs(), q)),
            )),
            RandomScalingLawSpec::HeavyTail(_) => Ok(math::pow(0.5, q)),
        }
    }
}

fn require_positive_q(q: f64) -> Result<()> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name: "q",
            value: q,
            range: "(0, inf)",
        })
    }
}
