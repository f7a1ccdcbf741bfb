//! JSON experiment configuration.
//!
//! Configs are tagged by `"experiment"` and deserialized strictly
//! (unknown fields are errors, exit code 2). The law, measure, and prune
//! descriptors convert into `fractalaw-core` types through their
//! validating constructors, so every invariant failure surfaces as a
//! config error before any sampling starts.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use fractalaw_core::iteration::PrunePolicy;
use fractalaw_core::measure::{Atom, DiscreteMeasure, Point};
use fractalaw_core::prob::{EContraction, FiniteRandomVariable, SampleSpace};
use fractalaw_core::scaling::{
    AffineContraction, BranchSampler, HeavyTailVariant, RandomScalingLawSpec, Sampler, ScalingLaw,
};

use crate::Overrides;

fn default_prune() -> PruneConfig {
    PruneConfig::default()
}

fn default_schedule() -> Vec<usize> {
    vec![1_000, 10_000, 100_000, 1_000_000]
}

fn default_mu() -> MeasureConfig {
    MeasureConfig::LawFixedPoint
}

fn default_converged_tol() -> f64 {
    1e-10
}

/// One experiment run: common sampling knobs plus per-experiment fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ExperimentConfig {
    TailCheck {
        seed: u64,
        q: f64,
        law: LawConfig,
        /// Sampler for α; the default is the point mass at the
        /// representative law's first-branch fixed point.
        #[serde(default = "default_mu")]
        alpha: MeasureConfig,
        samples: usize,
        grid: Vec<f64>,
        #[serde(default = "default_prune")]
        prune: PruneConfig,
        #[serde(default)]
        out_dir: Option<PathBuf>,
    },
    MomentProbe {
        seed: u64,
        q: f64,
        law: LawConfig,
        #[serde(default = "default_schedule")]
        schedule: Vec<usize>,
        /// Expected outcome: "divergent" or "finite".
        expect: MomentExpectation,
        #[serde(default)]
        out_dir: Option<PathBuf>,
    },
    ContractCheck {
        seed: u64,
        q: f64,
        law: LawConfig,
        mu: MeasureConfig,
        nu: MeasureConfig,
        /// Depth of the coupled iterates on the right-hand side; the
        /// left-hand side uses depth + 1 on the same trees.
        #[serde(default)]
        depth: usize,
        samples: usize,
        grid: Vec<f64>,
        #[serde(default = "default_prune")]
        prune: PruneConfig,
        #[serde(default)]
        out_dir: Option<PathBuf>,
    },
    Converge {
        seed: u64,
        q: f64,
        law: LawConfig,
        #[serde(default = "default_mu")]
        mu0: MeasureConfig,
        depth: usize,
        trees: usize,
        #[serde(default = "default_prune")]
        prune: PruneConfig,
        /// Optional discretized limit measure; enables the
        /// distance-to-limit overlay against the error bound.
        #[serde(default)]
        reference: Option<MeasureConfig>,
        #[serde(default)]
        out_dir: Option<PathBuf>,
    },
    Selfsim {
        seed: u64,
        q: f64,
        law: LawConfig,
        #[serde(default = "default_mu")]
        mu0: MeasureConfig,
        /// Alternative start for the cross-start uniqueness estimate.
        mu0_alt: MeasureConfig,
        depth: usize,
        ensemble: usize,
        #[serde(default = "default_prune")]
        prune: PruneConfig,
        #[serde(default)]
        out_dir: Option<PathBuf>,
    },
    FixedPoint {
        space: SpaceConfig,
        map: EContractionConfig,
        start: ValuesConfig,
        /// Declared contraction ratio the run is checked against.
        ratio: f64,
        steps: usize,
        #[serde(default = "default_converged_tol")]
        converged_tol: f64,
        #[serde(default)]
        out_dir: Option<PathBuf>,
    },
    InvariantSet {
        space: SpaceConfig,
        maps: Vec<EContractionConfig>,
        start: ValuesConfig,
        steps: usize,
        epsilon: f64,
        grid: Vec<f64>,
        /// Net capacity guard.
        cap: usize,
        /// The Hausdorff values must saturate to 1 by this step.
        target_step: usize,
        #[serde(default)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentExpectation {
    Divergent,
    Finite,
}

impl ExperimentConfig {
    pub fn kind_slug(&self) -> &'static str {
        match self {
            ExperimentConfig::TailCheck { .. } => "tail-check",
            ExperimentConfig::MomentProbe { .. } => "moment-probe",
            ExperimentConfig::ContractCheck { .. } => "contract-check",
            ExperimentConfig::Converge { .. } => "converge",
            ExperimentConfig::Selfsim { .. } => "selfsim",
            ExperimentConfig::FixedPoint { .. } => "fixed-point",
            ExperimentConfig::InvariantSet { .. } => "invariant-set",
        }
    }

    pub fn out_dir(&self) -> &Option<PathBuf> {
        match self {
            ExperimentConfig::TailCheck { out_dir, .. }
            | ExperimentConfig::MomentProbe { out_dir, .. }
            | ExperimentConfig::ContractCheck { out_dir, .. }
            | ExperimentConfig::Converge { out_dir, .. }
            | ExperimentConfig::Selfsim { out_dir, .. }
            | ExperimentConfig::FixedPoint { out_dir, .. }
            | ExperimentConfig::InvariantSet { out_dir, .. } => out_dir,
        }
    }

    pub fn apply_overrides(&mut self, ov: &Overrides) {
        if let Some(s) = ov.seed {
            match self {
                ExperimentConfig::TailCheck { seed, .. }
                | ExperimentConfig::MomentProbe { seed, .. }
                | ExperimentConfig::ContractCheck { seed, .. }
                | ExperimentConfig::Converge { seed, .. }
                | ExperimentConfig::Selfsim { seed, .. } => *seed = s,
                ExperimentConfig::FixedPoint { .. } | ExperimentConfig::InvariantSet { .. } => {}
            }
        }
        if let Some(dir) = &ov.out_dir {
            let slot = match self {
                ExperimentConfig::TailCheck { out_dir, .. }
                | ExperimentConfig::MomentProbe { out_dir, .. }
                | ExperimentConfig::ContractCheck { out_dir, .. }
                | ExperimentConfig::Converge { out_dir, .. }
                | ExperimentConfig::Selfsim { out_dir, .. }
                | ExperimentConfig::FixedPoint { out_dir, .. }
                | ExperimentConfig::InvariantSet { out_dir, .. } => out_dir,
            };
            *slot = Some(dir.clone());
        }
    }

    /// Structural validation beyond what serde enforces.
    pub fn validate(&self) -> Result<(), String> {
        let check_grid = |grid: &[f64]| -> Result<(), String> {
            if grid.is_empty() {
                return Err("grid must be nonempty".into());
            }
            for w in grid.windows(2) {
                if !(w[0] < w[1]) {
                    return Err("grid must be strictly increasing".into());
                }
            }
            if grid[0] <= 0.0 {
                return Err("grid values must be positive".into());
            }
            Ok(())
        };
        let check_q = |q: f64| -> Result<(), String> {
            if q > 0.0 && q.is_finite() {
                Ok(())
            } else {
                Err(format!("q = {q} must be positive and finite"))
            }
        };
        match self {
            ExperimentConfig::TailCheck {
                q, law, samples, grid, ..
            } => {
                check_q(*q)?;
                law.to_spec().map(|_| ())?;
                if *samples == 0 {
                    return Err("samples must be >= 1".into());
                }
                check_grid(grid)
            }
            ExperimentConfig::MomentProbe {
                q, law, schedule, ..
            } => {
                check_q(*q)?;
                law.to_spec().map(|_| ())?;
                if schedule.is_empty() || schedule.windows(2).any(|w| w[0] >= w[1]) {
                    return Err("schedule must be strictly increasing".into());
                }
                Ok(())
            }
            ExperimentConfig::ContractCheck {
                q, law, samples, grid, ..
            } => {
                check_q(*q)?;
                law.to_spec().map(|_| ())?;
                if *samples == 0 {
                    return Err("samples must be >= 1".into());
                }
                check_grid(grid)
            }
            ExperimentConfig::Converge {
                q, law, trees, ..
            } => {
                check_q(*q)?;
                law.to_spec().map(|_| ())?;
                if *trees == 0 {
                    return Err("trees must be >= 1".into());
                }
                Ok(())
            }
            ExperimentConfig::Selfsim {
                q, law, ensemble, ..
            } => {
                check_q(*q)?;
                law.to_spec().map(|_| ())?;
                if *ensemble < 32 {
                    return Err("ensemble must be >= 32".into());
                }
                Ok(())
            }
            ExperimentConfig::FixedPoint { ratio, steps, .. } => {
                if !(*ratio > 0.0 && *ratio < 1.0) {
                    return Err(format!("ratio = {ratio} must be in (0, 1)"));
                }
                if *steps == 0 {
                    return Err("steps must be >= 1".into());
                }
                Ok(())
            }
            ExperimentConfig::InvariantSet {
                steps,
                epsilon,
                grid,
                cap,
                target_step,
                maps,
                ..
            } => {
                if maps.is_empty() {
                    return Err("maps must be nonempty".into());
                }
                if *steps == 0 || *cap == 0 {
                    return Err("steps and cap must be >= 1".into());
                }
                if *epsilon < 0.0 {
                    return Err("epsilon must be >= 0".into());
                }
                if target_step > steps {
                    return Err("target_step must be <= steps".into());
                }
                check_grid(grid)
            }
        }
    }

    /// Echo of the effective config for the report.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

/// Distribution over scaling laws.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LawConfig {
    FiniteMixture { components: Vec<MixtureComponent> },
    ParametricAffine {
        weights: Vec<f64>,
        branches: Vec<BranchConfig>,
    },
    HeavyTail { variant: HeavyTailConfig },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub prob: f64,
    pub branches: Vec<AffineBranch>,
}

/// One weighted affine branch; either the 1-D `scale`/`offset` shorthand
/// or a full `matrix`/`offset_vec` pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineBranch {
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset_vec: Option<Vec<f64>>,
}

impl AffineBranch {
    fn to_map(&self) -> Result<AffineContraction, String> {
        match (&self.scale, &self.matrix) {
            (Some(s), None) => AffineContraction::new_1d(*s, self.offset.unwrap_or(0.0))
                .map_err(|e| e.to_string()),
            (None, Some(m)) => {
                let off = self
                    .offset_vec
                    .as_ref()
                    .ok_or("matrix branch requires offset_vec")?;
                AffineContraction::new(m, off).map_err(|e| e.to_string())
            }
            _ => Err("branch needs either scale (1-D) or matrix (+ offset_vec)".into()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchConfig {
    pub ratio: SamplerConfig,
    pub offset: SamplerConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum SamplerConfig {
    Fixed(f64),
    Uniform { lo: f64, hi: f64 },
}

impl SamplerConfig {
    fn to_sampler(&self) -> Sampler {
        match *self {
            SamplerConfig::Fixed(v) => Sampler::Fixed(v),
            SamplerConfig::Uniform { lo, hi } => Sampler::Uniform { lo, hi },
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HeavyTailConfig {
    ExpInv,
    Reciprocal,
}

impl LawConfig {
    pub fn to_spec(&self) -> Result<RandomScalingLawSpec, String> {
        let spec = match self {
            LawConfig::FiniteMixture { components } => {
                let mut comps = Vec::with_capacity(components.len());
                for c in components {
                    let branches = c
                        .branches
                        .iter()
                        .map(|b| Ok((b.p, b.to_map()?)))
                        .collect::<Result<Vec<_>, String>>()?;
                    let law = ScalingLaw::new(branches).map_err(|e| e.to_string())?;
                    comps.push((c.prob, law));
                }
                RandomScalingLawSpec::FiniteMixture { components: comps }
            }
            LawConfig::ParametricAffine { weights, branches } => {
                RandomScalingLawSpec::ParametricAffine {
                    weights: weights.clone(),
                    branches: branches
                        .iter()
                        .map(|b| BranchSampler {
                            ratio: b.ratio.to_sampler(),
                            offset: b.offset.to_sampler(),
                        })
                        .collect(),
                }
            }
            LawConfig::HeavyTail { variant } => RandomScalingLawSpec::HeavyTail(match variant {
                HeavyTailConfig::ExpInv => HeavyTailVariant::ExpInv,
                HeavyTailConfig::Reciprocal => HeavyTailVariant::Reciprocal,
            }),
        };
        spec.validate().map_err(|e| e.to_string())?;
        Ok(spec)
    }
}

/// Start / reference measure descriptor.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeasureConfig {
    /// Point mass at explicit coordinates.
    Dirac { at: Vec<f64> },
    /// Point mass at the fixed point of the representative law's first
    /// branch map (the canonical reproducible default).
    LawFixedPoint,
    /// `points` equal atoms at midpoints of a uniform partition of
    /// `[lo, hi]` — a discretization of Unif[lo, hi].
    Grid { points: usize, lo: f64, hi: f64 },
    /// Explicit atoms.
    Atoms { atoms: Vec<AtomConfig> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    pub coords: Vec<f64>,
    pub weight: f64,
}

impl MeasureConfig {
    pub fn realize(&self, spec: &RandomScalingLawSpec) -> Result<DiscreteMeasure, String> {
        match self {
            MeasureConfig::Dirac { at } => {
                let p = Point::new(at).map_err(|e| e.to_string())?;
                Ok(DiscreteMeasure::dirac(p))
            }
            MeasureConfig::LawFixedPoint => {
                let rep = spec.representative_law();
                let map = &rep.branches()[0].1;
                let p = map
                    .fixed_point()
                    .ok_or("representative first branch has no fixed point")?;
                Ok(DiscreteMeasure::dirac(p))
            }
            MeasureConfig::Grid { points, lo, hi } => {
                if *points == 0 || !(lo < hi) {
                    return Err("grid measure needs points >= 1 and lo < hi".into());
                }
                let n = *points;
                let w = 1.0 / n as f64;
                let h = (hi - lo) / n as f64;
                let atoms = (0..n)
                    .map(|k| {
                        Ok(Atom {
                            point: Point::new(&[lo + (k as f64 + 0.5) * h])
                                .map_err(|e| e.to_string())?,
                            weight: w,
                        })
                    })
                    .collect::<Result<Vec<_>, String>>()?;
                DiscreteMeasure::new(atoms).map_err(|e| e.to_string())
            }
            MeasureConfig::Atoms { atoms } => {
                let atoms = atoms
                    .iter()
                    .map(|a| {
                        Ok(Atom {
                            point: Point::new(&a.coords).map_err(|e| e.to_string())?,
                            weight: a.weight,
                        })
                    })
                    .collect::<Result<Vec<_>, String>>()?;
                DiscreteMeasure::new(atoms).map_err(|e| e.to_string())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PruneConfig {
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default = "default_cap")]
    pub cap: usize,
    #[serde(default = "default_max_atoms")]
    pub max_atoms: usize,
}

fn default_cap() -> usize {
    1 << 20
}

fn default_max_atoms() -> usize {
    1 << 23
}

impl Default for PruneConfig {
    fn default() -> Self {
        PruneConfig {
            epsilon: 0.0,
            cap: default_cap(),
            max_atoms: default_max_atoms(),
        }
    }
}

impl PruneConfig {
    pub fn to_policy(&self) -> PrunePolicy {
        PrunePolicy {
            epsilon: self.epsilon,
            cap: self.cap,
            max_atoms: self.max_atoms,
        }
    }
}

/// Finite sample space for the E-space experiments.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub probs: Vec<f64>,
}

impl SpaceConfig {
    pub fn to_space(&self) -> Result<SampleSpace, String> {
        SampleSpace::new(self.probs.clone()).map_err(|e| e.to_string())
    }
}

/// Per-atom affine maps of one E-space contraction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EContractionConfig {
    pub atoms: Vec<AffineMapConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineMapConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset_vec: Option<Vec<f64>>,
}

impl AffineMapConfig {
    fn to_map(&self) -> Result<AffineContraction, String> {
        match (&self.scale, &self.matrix) {
            (Some(s), None) => AffineContraction::new_1d(*s, self.offset.unwrap_or(0.0))
                .map_err(|e| e.to_string()),
            (None, Some(m)) => {
                let off = self
                    .offset_vec
                    .as_ref()
                    .ok_or("matrix map requires offset_vec")?;
                AffineContraction::new(m, off).map_err(|e| e.to_string())
            }
            _ => Err("map needs either scale (1-D) or matrix (+ offset_vec)".into()),
        }
    }
}

impl EContractionConfig {
    pub fn to_contraction(&self) -> Result<EContraction, String> {
        let maps = self
            .atoms
            .iter()
            .map(|m| m.to_map())
            .collect::<Result<Vec<_>, String>>()?;
        EContraction::new(maps).map_err(|e| e.to_string())
    }
}

/// Values of a finite random variable, one coordinate vector per atom.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValuesConfig {
    pub values: Vec<Vec<f64>>,
}

impl ValuesConfig {
    pub fn to_variable(&self, space: &SampleSpace) -> Result<FiniteRandomVariable, String> {
        let values = self
            .values
            .iter()
            .map(|v| Point::new(v).map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, String>>()?;
        FiniteRandomVariable::new(space.clone(), values).map_err(|e| e.to_string())
    }
}
