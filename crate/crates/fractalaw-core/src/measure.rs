//! Finite discrete measures on `R^d`, `1 <= d <= 3`.
//!
//! A measure is a canonical sorted list of weighted atoms. Atoms are merged
//! on exact bit equality of their coordinates (after `-0.0` normalisation),
//! never by epsilon comparison; approximate merging is the job of
//! [`DiscreteMeasure::coalesce`], which snaps to an explicit grid first.

use alloc::vec::Vec;

use crate::math::{self, KahanSum};
use crate::scaling::AffineContraction;
use crate::{Error, Result};

/// Maximum supported dimension. Norms stay closed-form and exact.
pub const MAX_DIM: usize = 3;

/// Relative tolerance tying the cached mass to the sum of weights.
pub const MASS_REL_TOL: f64 = 1e-12;

/// A point of the target space `R^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    coords: [f64; MAX_DIM],
    dim: usize,
}

impl Point {
    /// Build a point from a coordinate slice. All coordinates must be finite;
    /// `-0.0` is normalised to `0.0` so bit-equality merging is stable.
    pub fn new(coords: &[f64]) -> Result<Self> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(Error::DimensionOutOfRange(coords.len()));
        }
        let mut c = [0.0; MAX_DIM];
        for (i, &x) in coords.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFinite);
            }
            c[i] = if x == 0.0 { 0.0 } else { x };
        }
        Ok(Point {
            coords: c,
            dim: coords.len(),
        })
    }

    /// 1-D point.
    pub fn x(v: f64) -> Self {
        Point::new(&[v]).expect("finite scalar")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    /// Euclidean distance.
    pub fn dist(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        if self.dim == 1 {
            return (self.coords[0] - other.coords[0]).abs();
        }
        let mut s = 0.0;
        for i in 0..self.dim {
            let d = self.coords[i] - other.coords[i];
            s += d * d;
        }
        math::sqrt(s)
    }

    /// Total order used for canonical atom layout: lexicographic
    /// `total_cmp` over coordinates.
    pub(crate) fn canonical_cmp(&self, other: &Point) -> core::cmp::Ordering {
        for i in 0..self.dim {
            let o = self.coords[i].total_cmp(&other.coords[i]);
            if o != core::cmp::Ordering::Equal {
                return o;
            }
        }
        core::cmp::Ordering::Equal
    }

    pub(crate) fn bits_eq(&self, other: &Point) -> bool {
        self.dim == other.dim
            && (0..self.dim).all(|i| self.coords[i].to_bits() == other.coords[i].to_bits())
    }
}

impl DiscreteMeasure {
    /// Deterministic total order on measures (dimension, then atoms
    /// lexicographically); used to canonicalise symmetric computations.
    pub(crate) fn canonical_cmp(&self, other: &Self) -> core::cmp::Ordering {
        use core::cmp::Ordering;
        match self.dim.cmp(&other.dim) {
            Ordering::Equal => {}
            o => return o,
        }
        for (a, b) in self.atoms.iter().zip(&other.atoms) {
            match a.point.canonical_cmp(&b.point) {
                Ordering::Equal => {}
                o => return o,
            }
            match a.weight.total_cmp(&b.weight) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        self.atoms.len().cmp(&other.atoms.len())
    }
}

/// Ground-metric selector for `R^d`. Every public metric operation uses the
/// Euclidean default; the alternatives exist for axiom tests and debugging.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MetricChoice {
    #[default]
    Euclidean,
    Manhattan,
    Chebyshev,
}

impl MetricChoice {
    pub fn distance(&self, a: &Point, b: &Point) -> f64 {
        debug_assert_eq!(a.dim(), b.dim());
        match self {
            MetricChoice::Euclidean => a.dist(b),
            MetricChoice::Manhattan => a
                .coords()
                .iter()
                .zip(b.coords())
                .map(|(x, y)| (x - y).abs())
                .sum(),
            MetricChoice::Chebyshev => a
                .coords()
                .iter()
                .zip(b.coords())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
        }
    }
}

/// A weighted atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub point: Point,
    pub weight: f64,
}

/// Finitely supported Borel measure: canonical sorted atoms with positive
/// weights and a cached total mass.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    atoms: Vec<Atom>,
    mass: f64,
    dim: usize,
}

impl DiscreteMeasure {
    /// Build a measure from raw atoms; duplicates (exact bit equality) are
    /// merged with weights summed.
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let dim = atoms[0].point.dim();
        for a in &atoms {
            if a.point.dim() != dim {
                return Err(Error::DimensionMismatch(dim, a.point.dim()));
            }
            if !a.weight.is_finite() {
                return Err(Error::NonFinite);
            }
            if a.weight <= 0.0 {
                return Err(Error::NonpositiveWeight(a.weight));
            }
        }
        let atoms = canonicalize(atoms);
        let mass = math::sum(atoms.iter().map(|a| a.weight));
        Ok(DiscreteMeasure { atoms, mass, dim })
    }

    /// Convenience constructor from `(coords, weight)` pairs.
    pub fn from_pairs(pairs: &[(&[f64], f64)]) -> Result<Self> {
        let atoms = pairs
            .iter()
            .map(|(c, w)| {
                Ok(Atom {
                    point: Point::new(c)?,
                    weight: *w,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        DiscreteMeasure::new(atoms)
    }

    /// 1-D convenience constructor.
    pub fn from_pairs_1d(pairs: &[(f64, f64)]) -> Result<Self> {
        let atoms = pairs
            .iter()
            .map(|&(x, w)| {
                Ok(Atom {
                    point: Point::new(&[x])?,
                    weight: w,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        DiscreteMeasure::new(atoms)
    }

    /// Unit point mass at `p`.
    pub fn dirac(p: Point) -> Self {
        let dim = p.dim();
        DiscreteMeasure {
            atoms: alloc::vec![Atom {
                point: p,
                weight: 1.0
            }],
            mass: 1.0,
            dim,
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn is_unit_mass(&self) -> bool {
        (self.mass - 1.0).abs() <= MASS_REL_TOL
    }

    pub(crate) fn require_unit_mass(&self) -> Result<()> {
        if self.is_unit_mass() {
            Ok(())
        } else {
            Err(Error::NotUnitMass(self.mass))
        }
    }

    /// Image measure under an affine map: every atom `(x, w)` becomes
    /// `(S(x), w)`. Mass is carried over unchanged.
    pub fn pushforward(&self, map: &AffineContraction) -> Result<Self> {
        if map.dim() != self.dim {
            return Err(Error::DimensionMismatch(map.dim(), self.dim));
        }
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            atoms.push(Atom {
                point: map.apply(&a.point)?,
                weight: a.weight,
            });
        }
        Ok(DiscreteMeasure {
            atoms: canonicalize(atoms),
            mass: self.mass,
            dim: self.dim,
        })
    }

    /// `q`-th moment about `a`: `Σ_i w_i d(x_i, a)^q`, `q > 0`.
    pub fn q_moment(&self, a: &Point, q: f64) -> Result<f64> {
        if !(q > 0.0) {
            return Err(Error::ParameterOutOfRange {
                name: "q",
                value: q,
                range: "(0, inf)",
            });
        }
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch(a.dim(), self.dim));
        }
        Ok(math::sum(
            self.atoms
                .iter()
                .map(|at| at.weight * math::pow(at.point.dist(a), q)),
        ))
    }

    /// Per-coordinate mean.
    pub fn mean(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let s = math::sum(self.atoms.iter().map(|a| a.weight * a.point.coords()[i]));
            out.push(s / self.mass);
        }
        out
    }

    /// Per-coordinate variance about the mean.
    pub fn variance(&self) -> Vec<f64> {
        let mean = self.mean();
        let mut out = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let s = math::sum(self.atoms.iter().map(|a| {
                let d = a.point.coords()[i] - mean[i];
                a.weight * d * d
            }));
            out.push(s / self.mass);
        }
        out
    }

    /// Diagonal of the support bounding box; an upper bound on the support
    /// diameter, exact in 1-D.
    pub fn bounding_diameter(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for a in &self.atoms {
                let x = a.point.coords()[i];
                lo = lo.min(x);
                hi = hi.max(x);
            }
            let d = hi - lo;
            s += d * d;
        }
        math::sqrt(s)
    }

    /// Snap atoms to an `epsilon`-grid and merge; if the result still has
    /// more than `cap` atoms, merge lowest-weight atoms into their nearest
    /// neighbour until it fits. Total mass is preserved exactly.
    ///
    /// With `epsilon = 0` and at most `cap` atoms the input is returned
    /// unchanged. When the cap does not bind, the transport perturbation is
    /// at most `epsilon` in `l_q` for every `q >= 1` (each atom moves by at
    /// most `epsilon * sqrt(d)/2 < epsilon`).
    pub fn coalesce(&self, epsilon: f64, cap: usize) -> Result<Self> {
        self.coalesce_with_cost(epsilon, cap, 1.0).map(|(m, _)| m)
    }

    /// [`DiscreteMeasure::coalesce`] plus an upper bound on the induced
    /// `l_q` perturbation, in the same units as `l_q` (outer exponent
    /// `(1/q) ∧ 1`).
    pub fn coalesce_with_cost(&self, epsilon: f64, cap: usize, q: f64) -> Result<(Self, f64)> {
        if epsilon < 0.0 || !epsilon.is_finite() {
            return Err(Error::ParameterOutOfRange {
                name: "epsilon",
                value: epsilon,
                range: "[0, inf)",
            });
        }
        if cap == 0 {
            return Err(Error::ParameterOutOfRange {
                name: "cap",
                value: 0.0,
                range: "[1, inf)",
            });
        }
        if epsilon == 0.0 && self.atoms.len() <= cap {
            return Ok((self.clone(), 0.0));
        }

        // Snap phase.
        let mut snap_cost = KahanSum::new();
        let mut atoms = Vec::with_capacity(self.atoms.len());
        if epsilon > 0.0 {
            for a in &self.atoms {
                let mut c = [0.0; MAX_DIM];
                for i in 0..self.dim {
                    c[i] = libm::round(a.point.coords()[i] / epsilon) * epsilon;
                }
                let snapped = Point::new(&c[..self.dim])?;
                snap_cost.add(a.weight * math::pow(a.point.dist(&snapped), q));
                atoms.push(Atom {
                    point: snapped,
                    weight: a.weight,
                });
            }
            atoms = canonicalize(atoms);
        } else {
            atoms.extend_from_slice(&self.atoms);
        }

        // Cap phase: repeatedly fold the lightest atom into its nearest
        // surviving neighbour (weight moves, location stays).
        let mut cap_cost = KahanSum::new();
        if atoms.len() > cap {
            merge_to_cap(&mut atoms, cap, q, self.dim, &mut cap_cost);
        }

        let outer = (1.0 / q).min(1.0);
        let slack = math::pow(snap_cost.total(), outer) + math::pow(cap_cost.total(), outer);
        Ok((
            DiscreteMeasure {
                atoms,
                mass: self.mass,
                dim: self.dim,
            },
            slack,
        ))
    }
}

/// Mixture `Σ p_i µ_i`. Weights may be zero (those terms are dropped);
/// resulting mass is `Σ p_i · mass(µ_i)`.
pub fn mix(weights: &[f64], measures: &[DiscreteMeasure]) -> Result<DiscreteMeasure> {
    if weights.len() != measures.len() {
        return Err(Error::LengthMismatch(weights.len(), measures.len()));
    }
    if measures.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    let dim = measures[0].dim();
    let mut atoms = Vec::new();
    let mut mass = KahanSum::new();
    for (&p, mu) in weights.iter().zip(measures) {
        if !p.is_finite() {
            return Err(Error::NonFinite);
        }
        if p < 0.0 {
            return Err(Error::NegativeWeight(p));
        }
        if mu.dim() != dim {
            return Err(Error::DimensionMismatch(dim, mu.dim()));
        }
        if p == 0.0 {
            continue;
        }
        mass.add(p * mu.mass());
        for a in mu.atoms() {
            atoms.push(Atom {
                point: a.point,
                weight: p * a.weight,
            });
        }
    }
    if atoms.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    Ok(DiscreteMeasure {
        atoms: canonicalize(atoms),
        mass: mass.total(),
        dim,
    })
}

/// Sort into canonical order and merge exact-duplicate points.
fn canonicalize(mut atoms: Vec<Atom>) -> Vec<Atom> {
    atoms.sort_by(|a, b| a.point.canonical_cmp(&b.point));
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match out.last_mut() {
            Some(last) if last.point.bits_eq(&a.point) => last.weight += a.weight,
            _ => out.push(a),
        }
    }
    out
}

fn merge_to_cap(atoms: &mut Vec<Atom>, cap: usize, q: f64, dim: usize, cost: &mut KahanSum) {
    use alloc::collections::BinaryHeap;
    use core::cmp::Reverse;

    let n = atoms.len();
    // Alive doubly-linked list over the sorted order; in 1-D the nearest
    // surviving neighbour is always prev or next.
    let mut prev: Vec<isize> = (0..n as isize).map(|i| i - 1).collect();
    let mut next: Vec<isize> = (1..=n as isize).collect();
    next[n - 1] = -1;
    let mut alive = alloc::vec![true; n];
    let mut weights: Vec<f64> = atoms.iter().map(|a| a.weight).collect();

    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = (0..n)
        .map(|i| Reverse((weights[i].to_bits(), i)))
        .collect();
    let mut remaining = n;

    while remaining > cap {
        let Reverse((wbits, i)) = heap.pop().expect("heap tracks alive atoms");
        if !alive[i] || weights[i].to_bits() != wbits {
            continue; // stale entry
        }
        let target = if dim == 1 {
            nearest_linked(atoms, &prev, &next, i)
        } else {
            nearest_scan(atoms, &alive, i)
        };
        let Some(j) = target else { break };

        let d = atoms[i].point.dist(&atoms[j].point);
        cost.add(weights[i] * math::pow(d, q));
        weights[j] += weights[i];
        heap.push(Reverse((weights[j].to_bits(), j)));
        alive[i] = false;
        let (p, nx) = (prev[i], next[i]);
        if p >= 0 {
            next[p as usize] = nx;
        }
        if nx >= 0 {
            prev[nx as usize] = p;
        }
        remaining -= 1;
    }

    let mut out = Vec::with_capacity(remaining);
    for (i, a) in atoms.iter().enumerate() {
        if alive[i] {
            out.push(Atom {
                point: a.point,
                weight: weights[i],
            });
        }
    }
    *atoms = out;
}

fn nearest_linked(atoms: &[Atom], prev: &[isize], next: &[isize], i: usize) -> Option<usize> {
    let p = prev[i];
    let nx = next[i];
    match (p >= 0, nx >= 0) {
        (false, false) => None,
        (true, false) => Some(p as usize),
        (false, true) => Some(nx as usize),
        (true, true) => {
            let dp = atoms[i].point.dist(&atoms[p as usize].point);
            let dn = atoms[i].point.dist(&atoms[nx as usize].point);
            if dp <= dn {
                Some(p as usize)
            } else {
                Some(nx as usize)
            }
        }
    }
}

fn nearest_scan(atoms: &[Atom], alive: &[bool], i: usize) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    for (j, a) in atoms.iter().enumerate() {
        if j == i || !alive[j] {
            continue;
        }
        let d = atoms[i].point.dist(&a.point);
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, j));
        }
    }
    best.map(|(_, j)| j)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta(x: f64) -> DiscreteMeasure {
        DiscreteMeasure::dirac(Point::x(x))
    }

    #[test]
    fn single_atom_measure() {
        let mu = DiscreteMeasure::from_pairs_1d(&[(0.0, 1.0)]).unwrap();
        assert_eq!(mu.len(), 1);
        assert_eq!(mu.mass(), 1.0);
        assert!(mu.is_unit_mass());
    }

    #[test]
    fn duplicate_atoms_merge() {
        let mu = DiscreteMeasure::from_pairs_1d(&[(0.0, 0.5), (0.0, 0.5)]).unwrap();
        assert_eq!(mu.len(), 1);
        assert_eq!(mu.mass(), 1.0);
        // -0.0 and 0.0 are the same atom.
        let nu = DiscreteMeasure::from_pairs_1d(&[(-0.0, 0.5), (0.0, 0.5)]).unwrap();
        assert_eq!(nu.len(), 1);
    }

    #[test]
    fn two_atom_measure() {
        let mu = DiscreteMeasure::from_pairs_1d(&[(0.0, 0.3), (1.0, 0.7)]).unwrap();
        assert_eq!(mu.len(), 2);
        assert!((mu.mass() - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn rejects_bad_atoms() {
        assert_eq!(
            DiscreteMeasure::from_pairs_1d(&[]).unwrap_err(),
            Error::EmptyMeasure
        );
        assert!(matches!(
            DiscreteMeasure::from_pairs_1d(&[(0.0, -1.0)]).unwrap_err(),
            Error::NonpositiveWeight(_)
        ));
        assert!(matches!(
            DiscreteMeasure::from_pairs(&[(&[0.0], 1.0), (&[0.0, 1.0], 1.0)]).unwrap_err(),
            Error::DimensionMismatch(..)
        ));
        assert_eq!(
            DiscreteMeasure::from_pairs_1d(&[(f64::NAN, 1.0)]).unwrap_err(),
            Error::NonFinite
        );
    }

    #[test]
    fn pushforward_fixed_point_and_image() {
        let s = AffineContraction::new_1d(1.0 / 3.0, 2.0 / 3.0).unwrap();
        let img = delta(1.0).pushforward(&s).unwrap();
        assert_eq!(img, delta(1.0));

        let half = AffineContraction::new_1d(0.5, 0.0).unwrap();
        assert_eq!(delta(4.0).pushforward(&half).unwrap(), delta(2.0));

        let mu = DiscreteMeasure::from_pairs_1d(&[(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let expect = DiscreteMeasure::from_pairs_1d(&[(0.0, 0.5), (0.5, 0.5)]).unwrap();
        assert_eq!(mu.pushforward(&half).unwrap(), expect);
    }

    #[test]
    fn pushforward_merges_collapsed_atoms() {
        let constant = AffineContraction::new_1d(0.0, 3.0).unwrap();
        let mu = DiscreteMeasure::from_pairs_1d(&[(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let img = mu.pushforward(&constant).unwrap();
        assert_eq!(img.len(), 1);
        assert_eq!(img.mass(), 1.0);
    }

    #[test]
    fn mix_cases() {
        let mu = DiscreteMeasure::from_pairs_1d(&[(0.0, 0.4), (2.0, 0.6)]).unwrap();
        assert_eq!(mix(&[1.0], &[mu.clone()]).unwrap(), mu);

        let m = mix(&[0.5, 0.5], &[delta(0.0), delta(1.0)]).unwrap();
        let expect = DiscreteMeasure::from_pairs_1d(&[(0.0, 0.5), (1.0, 0.5)]).unwrap();
        assert_eq!(m, expect);

        let merged = mix(&[0.3, 0.7], &[delta(0.0), delta(0.0)]).unwrap();
        assert_eq!(merged.len(), 1);
        assert!((merged.mass() - 1.0).abs() <= 1e-15);

        assert!(matches!(
            mix(&[1.0], &[delta(0.0), delta(1.0)]).unwrap_err(),
            Error::LengthMismatch(..)
        ));
    }

    #[test]
    fn q_moment_cases() {
        assert_eq!(delta(3.0).q_moment(&Point::x(0.0), 2.0).unwrap(), 9.0);
        let mu = DiscreteMeasure::from_pairs_1d(&[(0.0, 0.5), (2.0, 0.5)]).unwrap();
        assert_eq!(mu.q_moment(&Point::x(0.0), 2.0).unwrap(), 2.0);
        assert!(mu.q_moment(&Point::x(0.0), 0.0).is_err());
    }

    #[test]
    fn coalesce_noop_and_grid_merge() {
        let mu = DiscreteMeasure::from_pairs_1d(&[(0.01, 0.5), (0.04, 0.5)]).unwrap();
        assert_eq!(mu.coalesce(0.0, 10).unwrap(), mu);

        let merged = mu.coalesce(0.1, 10).unwrap();
        assert_eq!(merged.len(), 1);
        assert_eq!(merged.mass(), 1.0);
        assert_eq!(merged.atoms()[0].point.coords()[0], 0.0);
    }

    #[test]
    fn coalesce_cap_merges_lightest_into_neighbour() {
        let mu =
            DiscreteMeasure::from_pairs_1d(&[(0.0, 0.5), (1.0, 0.3), (1.1, 0.2)]).unwrap();
        let (capped, slack) = mu.coalesce_with_cost(0.0, 2, 1.0).unwrap();
        assert_eq!(capped.len(), 2);
        assert_eq!(capped.mass(), mu.mass());
        // The 0.2 atom folds into the 0.3 atom 0.1 away.
        assert!((slack - 0.2 * 0.1).abs() < 1e-15);
        let w: f64 = capped.atoms().iter().map(|a| a.weight).sum();
        assert!((w - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mean_variance_diameter() {
        let mu = DiscreteMeasure::from_pairs_1d(&[(0.0, 0.5), (1.0, 0.5)]).unwrap();
        assert_eq!(mu.mean()[0], 0.5);
        assert_eq!(mu.variance()[0], 0.25);
        assert_eq!(mu.bounding_diameter(), 1.0);
    }

    #[test]
    fn metric_choices_agree_in_1d() {
        let a = Point::x(0.25);
        let b = Point::x(-1.5);
        for m in [
            MetricChoice::Euclidean,
            MetricChoice::Manhattan,
            MetricChoice::Chebyshev,
        ] {
            assert_eq!(m.distance(&a, &b), 1.75);
        }
    }
}
