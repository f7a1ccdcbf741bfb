//! Construction-tree iteration `µ_{n+1} = Σ p_i S_i µ_n^(i)`.
//!
//! Each tree node (address `σ` over `{1, ..., N}*`) owns an i.i.d. law draw
//! through its address-derived stream, so the depth-`k` and depth-`(k+1)`
//! iterates of one tree share every law at addresses shorter than `k`. That
//! shared-tree property is what makes per-trajectory step distances
//! contract pathwise; ensembles use disjoint tree indices instead and are
//! fully independent.

use alloc::vec::Vec;

use crate::math;
use crate::measure::DiscreteMeasure;
use crate::rng::{derive_stream, TreeAddress};
use crate::scaling::RandomScalingLawSpec;
use crate::transport::{lq_auto, DEFAULT_SUPPORT_CAP};
use crate::{Error, Result};

/// Per-level support control for deep iterations.
///
/// `epsilon` is the coalescing grid (0 = exact); `cap` bounds the atom
/// count after coalescing; `max_atoms` is the hard resource limit checked
/// before each mixing step. When a level would exceed `cap` with
/// `epsilon = 0`, an automatic grid `diameter * 2^-depth` kicks in first so
/// the cap merge stays local. All pruning cost is accumulated into the
/// reported slack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrunePolicy {
    pub epsilon: f64,
    pub cap: usize,
    pub max_atoms: usize,
}

impl Default for PrunePolicy {
    fn default() -> Self {
        PrunePolicy {
            epsilon: 0.0,
            cap: 1 << 20,
            max_atoms: 1 << 23,
        }
    }
}

impl PrunePolicy {
    pub fn exact() -> Self {
        PrunePolicy::default()
    }

    pub fn with_epsilon(epsilon: f64) -> Self {
        PrunePolicy {
            epsilon,
            ..PrunePolicy::default()
        }
    }
}

/// One sequence `µ_0, ..., µ_n` built from a single construction tree,
/// with per-step distances and accumulated pruning slack per depth.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub measures: Vec<DiscreteMeasure>,
    /// `step_distances[k] = l_q(µ_k, µ_{k+1})`.
    pub step_distances: Vec<f64>,
    /// Upper bound on the pruning perturbation carried by `measures[k]`.
    pub slacks: Vec<f64>,
    pub q: f64,
}

impl Trajectory {
    pub fn depth(&self) -> usize {
        self.measures.len() - 1
    }

    /// Ratios of consecutive step distances (0/0 treated as 0).
    pub fn step_ratios(&self) -> Vec<f64> {
        self.step_distances
            .windows(2)
            .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
            .collect()
    }
}

/// A seeded collection of i.i.d. sample measures (one tree per member).
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub members: Vec<DiscreteMeasure>,
    pub slacks: Vec<f64>,
    pub seed: u64,
    pub depth: usize,
    pub q: f64,
    pub prune: PrunePolicy,
}

impl Ensemble {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Depth-`n` iterate of one construction tree, pruning slack included.
///
/// The recursion realises `µ_n(σ) = Σ_i p_i^σ S_i^σ µ_{n-1}(σ·i)` with the
/// law at every node drawn from `derive_stream(seed, tree_index, σ)`;
/// the same `(seed, tree_index)` at a smaller depth reuses exactly the
/// laws of the shallower addresses.
pub fn iterate_with_slack(
    seed: u64,
    tree_index: u64,
    spec: &RandomScalingLawSpec,
    mu0: &DiscreteMeasure,
    depth: usize,
    q: f64,
    prune: &PrunePolicy,
) -> Result<(DiscreteMeasure, f64)> {
    mu0.require_unit_mass()?;
    spec.validate()?;
    if !(q > 0.0) {
        return Err(Error::ParameterOutOfRange {
            name: "q",
            value: q,
            range: "(0, inf)",
        });
    }
    build_node(
        seed,
        tree_index,
        spec,
        mu0,
        depth,
        depth,
        &TreeAddress::root(),
        q,
        prune,
    )
}

/// Depth-`n` iterate of one construction tree.
pub fn iterate_measure(
    seed: u64,
    tree_index: u64,
    spec: &RandomScalingLawSpec,
    mu0: &DiscreteMeasure,
    depth: usize,
    prune: &PrunePolicy,
) -> Result<DiscreteMeasure> {
    iterate_with_slack(seed, tree_index, spec, mu0, depth, 1.0, prune).map(|(m, _)| m)
}

#[allow(clippy::too_many_arguments)]
fn build_node(
    seed: u64,
    tree_index: u64,
    spec: &RandomScalingLawSpec,
    mu0: &DiscreteMeasure,
    remaining: usize,
    total_depth: usize,
    address: &TreeAddress,
    q: f64,
    prune: &PrunePolicy,
) -> Result<(DiscreteMeasure, f64)> {
    if remaining == 0 {
        return Ok((mu0.clone(), 0.0));
    }
    let law = spec.sample(&mut derive_stream(seed, tree_index, address));
    let mut weights = Vec::with_capacity(law.branch_count());
    let mut pushed = Vec::with_capacity(law.branch_count());
    let mut child_cost = 0.0f64; // Σ p_i r_i^q slack_i^q (q >= 1 route)
    let mut atom_budget = 0usize;
    for (letter, (p, map)) in law.branches().iter().enumerate() {
        let child_addr = address.child(letter + 1)?;
        let (child, slack) = build_node(
            seed,
            tree_index,
            spec,
            mu0,
            remaining - 1,
            total_depth,
            &child_addr,
            q,
            prune,
        )?;
        atom_budget += child.len();
        if atom_budget > prune.max_atoms {
            return Err(Error::AtomBudgetExceeded {
                atoms: atom_budget,
                limit: prune.max_atoms,
            });
        }
        let r = map.lipschitz_ratio();
        child_cost += if q >= 1.0 {
            p * math::pow(r, q) * math::pow(slack, q)
        } else {
            p * math::pow(r, q) * slack
        };
        weights.push(*p);
        pushed.push(child.pushforward(map)?);
    }
    let mixed = crate::measure::mix(&weights, &pushed)?;
    let inherited = if q >= 1.0 {
        math::pow(child_cost, 1.0 / q)
    } else {
        child_cost
    };

    // Effective grid: explicit epsilon, or the automatic one once a level
    // overflows the cap.
    let mut epsilon = prune.epsilon;
    if mixed.len() > prune.cap && epsilon == 0.0 {
        epsilon = mixed.bounding_diameter() * math::pow(2.0, -(total_depth as f64));
    }
    let (pruned, prune_cost) = mixed.coalesce_with_cost(epsilon, prune.cap, q)?;
    Ok((pruned, inherited + prune_cost))
}

/// The full sequence `µ_0 ... µ_{n_max}` of one tree plus the `l_q` step
/// distances; `trajectory(..)[k]` is bit-identical to
/// `iterate_measure(.., depth = k, ..)` with the same seed and index.
pub fn trajectory(
    seed: u64,
    tree_index: u64,
    spec: &RandomScalingLawSpec,
    mu0: &DiscreteMeasure,
    n_max: usize,
    q: f64,
    prune: &PrunePolicy,
) -> Result<Trajectory> {
    let mut measures = Vec::with_capacity(n_max + 1);
    let mut slacks = Vec::with_capacity(n_max + 1);
    for k in 0..=n_max {
        let (mu, slack) = iterate_with_slack(seed, tree_index, spec, mu0, k, q, prune)?;
        measures.push(mu);
        slacks.push(slack);
    }
    let mut step_distances = Vec::with_capacity(n_max);
    for k in 0..n_max {
        step_distances.push(lq_auto(
            &measures[k],
            &measures[k + 1],
            q,
            DEFAULT_SUPPORT_CAP.max(measures[k].len().max(measures[k + 1].len())),
        )?);
    }
    Ok(Trajectory {
        measures,
        step_distances,
        slacks,
        q,
    })
}

/// `m` independent depth-`n` iterates on tree indices `0..m`.
pub fn generate_ensemble(
    seed: u64,
    spec: &RandomScalingLawSpec,
    mu0: &DiscreteMeasure,
    depth: usize,
    m: usize,
    q: f64,
    prune: &PrunePolicy,
) -> Result<Ensemble> {
    if m == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "m",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    let mut members = Vec::with_capacity(m);
    let mut slacks = Vec::with_capacity(m);
    for index in 0..m as u64 {
        let (mu, slack) = iterate_with_slack(seed, index, spec, mu0, depth, q, prune)?;
        members.push(mu);
        slacks.push(slack);
    }
    Ok(Ensemble {
        members,
        slacks,
        seed,
        depth,
        q,
        prune: *prune,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Point;
    use crate::scaling::{AffineContraction, ScalingLaw};

    fn uniform_spec() -> RandomScalingLawSpec {
        RandomScalingLawSpec::deterministic(
            ScalingLaw::new(alloc::vec![
                (0.5, AffineContraction::new_1d(0.5, 0.0).unwrap()),
                (0.5, AffineContraction::new_1d(0.5, 0.5).unwrap()),
            ])
            .unwrap(),
        )
    }

    fn delta0() -> DiscreteMeasure {
        DiscreteMeasure::dirac(Point::x(0.0))
    }

    #[test]
    fn depth_zero_is_start_measure() {
        let mu =
            iterate_measure(1, 0, &uniform_spec(), &delta0(), 0, &PrunePolicy::exact()).unwrap();
        assert_eq!(mu, delta0());
    }

    #[test]
    fn uniform_law_depth_two_expansion() {
        let mu =
            iterate_measure(1, 0, &uniform_spec(), &delta0(), 2, &PrunePolicy::exact()).unwrap();
        let expect = DiscreteMeasure::from_pairs_1d(&[
            (0.0, 0.25),
            (0.25, 0.25),
            (0.5, 0.25),
            (0.75, 0.25),
        ])
        .unwrap();
        assert_eq!(mu, expect);
    }

    #[test]
    fn trajectory_is_depth_consistent() {
        let spec = uniform_spec();
        let traj = trajectory(7, 3, &spec, &delta0(), 4, 1.0, &PrunePolicy::exact()).unwrap();
        for k in 0..=4 {
            let direct =
                iterate_measure(7, 3, &spec, &delta0(), k, &PrunePolicy::exact()).unwrap();
            assert_eq!(traj.measures[k], direct);
        }
        assert_eq!(traj.measures.len(), 5);
        assert_eq!(traj.step_distances.len(), 4);
    }

    #[test]
    fn deterministic_spec_gives_identical_members() {
        let ens =
            generate_ensemble(3, &uniform_spec(), &delta0(), 3, 4, 1.0, &PrunePolicy::exact())
                .unwrap();
        for m in &ens.members[1..] {
            assert_eq!(*m, ens.members[0]);
        }
        assert!(ens.slacks.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn unit_mass_preserved_deep() {
        let mu =
            iterate_measure(5, 0, &uniform_spec(), &delta0(), 12, &PrunePolicy::exact()).unwrap();
        assert!(mu.is_unit_mass());
        assert_eq!(mu.len(), 1 << 12);
    }

    #[test]
    fn atom_budget_guard_trips() {
        let tight = PrunePolicy {
            epsilon: 0.0,
            cap: 1 << 20,
            max_atoms: 8,
        };
        let err = iterate_measure(5, 0, &uniform_spec(), &delta0(), 12, &tight).unwrap_err();
        assert!(matches!(err, Error::AtomBudgetExceeded { .. }));
    }

    #[test]
    fn cap_prune_reports_slack() {
        let policy = PrunePolicy {
            epsilon: 0.0,
            cap: 8,
            max_atoms: 1 << 20,
        };
        let (mu, slack) =
            iterate_with_slack(5, 0, &uniform_spec(), &delta0(), 6, 1.0, &policy).unwrap();
        assert!(mu.len() <= 8);
        assert!(mu.is_unit_mass());
        assert!(slack > 0.0 && slack < 1.0);
    }
}
