//! Exact minimal-metric computation on discrete measures.
//!
//! The metric is
//!
//! ```text
//! l_q(µ, ν) = inf { (∫ d^q dγ)^(1/q ∧ 1) : π_1 γ = µ, π_2 γ = ν }
//! ```
//!
//! solved as a transportation LP (simplex with Bland's rule). Three layers
//! sit on top of it:
//!
//! * [`lq_1d`] — the monotone (quantile) coupling, optimal in 1-D for
//!   convex cost `q >= 1` and much faster than the LP;
//! * [`lq_star`] — the expectation lift `E^(1/q) l_q^q` (or `E l_q` for
//!   `q < 1`) over same-sample paired ensembles;
//! * [`lq_star_star`] — the minimal metric between equal-size empirical
//!   distributions of measures: with equal weights the coupling polytope's
//!   vertices are permutations, so an exact assignment solve is the exact
//!   infimum.
//!
//! For `0 < q < 1` the cost `d^q` is concave and the monotone coupling is
//! not guaranteed optimal, so every `q < 1` call routes through the LP.

mod assignment;
mod simplex;

use alloc::vec::Vec;

use crate::math::{self, KahanSum};
use crate::measure::{DiscreteMeasure, Point};
use crate::{Error, Estimate, Result};

pub use assignment::assignment_solve;

/// Default cap on support sizes fed to the LP.
pub const DEFAULT_SUPPORT_CAP: usize = 512;

/// Tolerance for treating two total masses as transport-compatible.
pub const MASS_EQ_TOL: f64 = 1e-9;

/// An optimal coupling between two discrete measures.
///
/// `entries` holds the strictly positive flows `(i, j, γ_ij)`; `cost` is the
/// raw objective `∫ d^q dγ` (no outer root).
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, f64)>,
    pub cost: f64,
}

impl TransportPlan {
    /// Row sums of the coupling (should reproduce the source weights).
    pub fn row_marginals(&self) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.rows];
        for &(i, _, f) in &self.entries {
            out[i] += f;
        }
        out
    }

    /// Column sums of the coupling (should reproduce the target weights).
    pub fn col_marginals(&self) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.cols];
        for &(_, j, f) in &self.entries {
            out[j] += f;
        }
        out
    }
}

fn check_compatible(mu: &DiscreteMeasure, nu: &DiscreteMeasure, q: f64) -> Result<()> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch(mu.dim(), nu.dim()));
    }
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::ParameterOutOfRange {
            name: "q",
            value: q,
            range: "(0, inf)",
        });
    }
    let scale = mu.mass().abs().max(1.0);
    if (mu.mass() - nu.mass()).abs() > MASS_EQ_TOL * scale {
        return Err(Error::MassMismatch(mu.mass(), nu.mass()));
    }
    Ok(())
}

/// Solve the transportation LP and return the full plan. Requires equal
/// total masses; `cap` bounds both support sizes.
///
/// The solve orientation is canonicalised, so swapping the arguments
/// returns the bit-identical cost (metric symmetry is exact).
pub fn transport_plan(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    q: f64,
    cap: usize,
) -> Result<TransportPlan> {
    check_compatible(mu, nu, q)?;
    if mu.canonical_cmp(nu) == core::cmp::Ordering::Greater {
        let mut plan = transport_plan(nu, mu, q, cap)?;
        for e in plan.entries.iter_mut() {
            *e = (e.1, e.0, e.2);
        }
        core::mem::swap(&mut plan.rows, &mut plan.cols);
        return Ok(plan);
    }
    let (m, n) = (mu.len(), nu.len());
    if m > cap || n > cap {
        return Err(Error::SupportCapExceeded {
            size: m.max(n),
            cap,
        });
    }
    let mut cost = Vec::with_capacity(m * n);
    for a in mu.atoms() {
        for b in nu.atoms() {
            cost.push(math::pow(a.point.dist(&b.point), q));
        }
    }
    let supply: Vec<f64> = mu.atoms().iter().map(|a| a.weight).collect();
    let demand: Vec<f64> = nu.atoms().iter().map(|a| a.weight).collect();
    let sol = simplex::solve(&supply, &demand, &cost)?;
    Ok(TransportPlan {
        rows: m,
        cols: n,
        entries: sol.entries,
        cost: sol.cost,
    })
}

/// Raw optimal transport cost `∫ d^q dγ* = l_q^(q ∨ 1)(µ, ν)` via the LP.
///
/// This is the quantity the scaling and subadditivity identities are linear
/// in; it accepts any pair of equal-mass measures, not just unit mass.
pub fn optimal_cost(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    q: f64,
    cap: usize,
) -> Result<f64> {
    Ok(transport_plan(mu, nu, q, cap)?.cost)
}

fn outer_exponent(q: f64) -> f64 {
    (1.0 / q).min(1.0)
}

/// Exact `l_q` on small supports via the transportation LP.
///
/// Both measures must have unit mass and supports of at most
/// [`DEFAULT_SUPPORT_CAP`] atoms.
pub fn lq_exact_small(mu: &DiscreteMeasure, nu: &DiscreteMeasure, q: f64) -> Result<f64> {
    lq_exact_with_cap(mu, nu, q, DEFAULT_SUPPORT_CAP)
}

/// [`lq_exact_small`] with an explicit support cap.
pub fn lq_exact_with_cap(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    q: f64,
    cap: usize,
) -> Result<f64> {
    mu.require_unit_mass()?;
    nu.require_unit_mass()?;
    Ok(math::pow(optimal_cost(mu, nu, q, cap)?, outer_exponent(q)))
}

/// 1-D `l_q` for `q >= 1` by the monotone (quantile) coupling.
///
/// Atoms are kept in ascending order internally, so this is a single merge
/// pass. Calling it with `q < 1` is a hard error: the monotone coupling is
/// not guaranteed optimal for concave cost.
pub fn lq_1d(mu: &DiscreteMeasure, nu: &DiscreteMeasure, q: f64) -> Result<f64> {
    if q < 1.0 {
        return Err(Error::ConcaveCost(q));
    }
    check_compatible(mu, nu, q)?;
    if mu.dim() != 1 {
        return Err(Error::DimensionOutOfRange(mu.dim()));
    }
    Ok(math::pow(quantile_cost(mu, nu, q), outer_exponent(q)))
}

/// Raw monotone-coupling cost; canonical atom order in 1-D is ascending.
fn quantile_cost(mu: &DiscreteMeasure, nu: &DiscreteMeasure, q: f64) -> f64 {
    let xs = mu.atoms();
    let ys = nu.atoms();
    let mut cost = KahanSum::new();
    let (mut i, mut j) = (0usize, 0usize);
    let mut ai = xs[0].weight;
    let mut bj = ys[0].weight;
    loop {
        let t = ai.min(bj);
        let d = (xs[i].point.coords()[0] - ys[j].point.coords()[0]).abs();
        cost.add(t * math::pow(d, q));
        ai -= t;
        bj -= t;
        if ai <= 0.0 {
            i += 1;
            if i == xs.len() {
                break;
            }
            ai = xs[i].weight;
        }
        if bj <= 0.0 {
            j += 1;
            if j == ys.len() {
                break;
            }
            bj = ys[j].weight;
        }
    }
    cost.total()
}

/// Closed-form distance to a point mass:
/// `l_q(µ, δ_a) = (∫ d^q(x, a) dµ)^(1/q ∧ 1)`.
pub fn lq_dirac(mu: &DiscreteMeasure, a: &Point, q: f64) -> Result<f64> {
    mu.require_unit_mass()?;
    Ok(math::pow(mu.q_moment(a, q)?, outer_exponent(q)))
}

/// Routed exact `l_q`: quantile coupling when it is provably optimal
/// (1-D, `q >= 1`), transportation LP otherwise. The two routes agree
/// within 1e-9 wherever both apply.
pub fn lq_auto(mu: &DiscreteMeasure, nu: &DiscreteMeasure, q: f64, cap: usize) -> Result<f64> {
    Ok(math::pow(raw_auto(mu, nu, q, cap)?, outer_exponent(q)))
}

fn raw_auto(mu: &DiscreteMeasure, nu: &DiscreteMeasure, q: f64, cap: usize) -> Result<f64> {
    check_compatible(mu, nu, q)?;
    if mu.dim() == 1 && q >= 1.0 {
        Ok(quantile_cost(mu, nu, q))
    } else {
        optimal_cost(mu, nu, q, cap)
    }
}

/// Two ensembles of sample measures, with or without same-sample pairing.
#[derive(Debug, Clone)]
pub struct EnsemblePair {
    left: Vec<DiscreteMeasure>,
    right: Vec<DiscreteMeasure>,
    paired: bool,
}

impl EnsemblePair {
    /// Same-sample pairing: index `i` on both sides comes from the same
    /// sample point.
    pub fn paired(left: Vec<DiscreteMeasure>, right: Vec<DiscreteMeasure>) -> Result<Self> {
        if left.len() != right.len() {
            return Err(Error::LengthMismatch(left.len(), right.len()));
        }
        if left.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        Ok(EnsemblePair {
            left,
            right,
            paired: true,
        })
    }

    pub fn unpaired(left: Vec<DiscreteMeasure>, right: Vec<DiscreteMeasure>) -> Self {
        EnsemblePair {
            left,
            right,
            paired: false,
        }
    }

    pub fn is_paired(&self) -> bool {
        self.paired
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    pub fn sides(&self) -> (&[DiscreteMeasure], &[DiscreteMeasure]) {
        (&self.left, &self.right)
    }
}

/// Monte Carlo estimate of the expectation-lifted metric over a paired
/// ensemble: `(m^-1 Σ l_q^q)^(1/q)` for `q >= 1`, `m^-1 Σ l_q` for `q < 1`.
///
/// The standard error for `q >= 1` is the delta-method propagation of the
/// standard error of the mean of `l_q^q`.
pub fn lq_star(pair: &EnsemblePair, q: f64) -> Result<Estimate> {
    if !pair.paired {
        return Err(Error::UnpairedEnsemble);
    }
    let (left, right) = pair.sides();
    let dists: Vec<f64> = left
        .iter()
        .zip(right)
        .map(|(a, b)| lq_auto(a, b, q, DEFAULT_SUPPORT_CAP))
        .collect::<Result<_>>()?;
    Ok(lift_distances(&dists, q))
}

/// Combine per-sample `l_q` values into the lifted estimate.
pub fn lift_distances(dists: &[f64], q: f64) -> Estimate {
    if q >= 1.0 {
        let powered: Vec<f64> = dists.iter().map(|&d| math::pow(d, q)).collect();
        let (mean, se) = math::mean_and_se(&powered);
        let value = math::pow(mean, 1.0 / q);
        let std_err = if mean > 0.0 && se > 0.0 {
            se * (1.0 / q) * math::pow(mean, 1.0 / q - 1.0)
        } else {
            0.0
        };
        Estimate { value, std_err }
    } else {
        let (value, std_err) = math::mean_and_se(dists);
        Estimate { value, std_err }
    }
}

/// Minimal metric between two equal-size empirical distributions of
/// measures: assignment over the pairwise cost matrix
/// `c_ij = l_q^(q ∨ 1)(µ_i, ν_j)`, then `(optimal / m)^(1/q ∧ 1)`.
pub fn lq_star_star(a: &[DiscreteMeasure], b: &[DiscreteMeasure], q: f64) -> Result<f64> {
    lq_star_star_with_cap(a, b, q, DEFAULT_SUPPORT_CAP)
}

/// [`lq_star_star`] with an explicit support cap for the pairwise solves.
pub fn lq_star_star_with_cap(
    a: &[DiscreteMeasure],
    b: &[DiscreteMeasure],
    q: f64,
    cap: usize,
) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    let mut costs = Vec::with_capacity(a.len());
    for mu in a {
        let row = b
            .iter()
            .map(|nu| raw_auto(mu, nu, q, cap))
            .collect::<Result<Vec<f64>>>()?;
        costs.push(row);
    }
    empirical_min_metric_from_costs(&costs, q)
}

/// Finish an `l_q**` evaluation from a precomputed raw cost matrix
/// (entries `l_q^(q ∨ 1)`); used by callers that build the matrix in
/// parallel.
pub fn empirical_min_metric_from_costs(costs: &[Vec<f64>], q: f64) -> Result<f64> {
    let m = costs.len();
    let (_, total) = assignment_solve(costs)?;
    Ok(math::pow(total / m as f64, outer_exponent(q)))
}
