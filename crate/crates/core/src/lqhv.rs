//! Signed scenario distributions for N-site projective measurement
//! scenarios.
//!
//! For a scenario with `S` observables per site, the outcome space is the
//! product of the distinct-eigenvalue lists of every `(site, setting)` pair.
//! [`build_scenario_distribution`] constructs a normalized real-valued (in
//! general signed) table over that space whose marginals reproduce every
//! quantum joint probability of the scenario: conditioning outcomes on the
//! non-pivot sites enter through a product weight operator split into
//! positive and negative parts, and pivot-site outcomes through
//! Radon-Nikodym conditional weights.
//!
//! The total-variation norm of the table upper-bounds Bell-violation
//! ratios for the same settings; [`chain_overlap_bound`] computes the
//! analytic eigenvector-overlap bound on that norm for bipartite scenarios
//! with non-degenerate spectra.

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qlinalg::{
    self, hermitian_eig, insert_identity_site, partial_trace_matrix, pos_neg_parts,
    sym_product_raw, trace_product, CMat, DensityMatrix, EigenSystem, HermitianMatrix, Observable,
    PosNegParts, QlinalgError,
};
use crate::util::pairwise_sum;

/// Default cap on the outcome-space size of a constructed distribution.
pub const DEFAULT_OMEGA_CAP: usize = 1_000_000;
/// Below this trace weight a conditioning branch is degenerate and its
/// conditional weights are set to the uniform distribution; the branch
/// enters the table with at most this weight, so any choice is valid.
pub const DEGENERATE_WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum LqhvError {
    #[error(transparent)]
    Linalg(#[from] QlinalgError),
    #[error("observable at site {site}, setting {setting}: {source}")]
    InvalidObservable {
        site: usize,
        setting: usize,
        source: QlinalgError,
    },
    #[error("scenario needs at least one site and one setting per site")]
    EmptyScenario,
    #[error("site {site} has {got} settings, expected {expected}")]
    RaggedSettings {
        site: usize,
        got: usize,
        expected: usize,
    },
    #[error("observable at site {site}, setting {setting} is {actual}x{actual}, expected {expected}x{expected}")]
    ObservableDimMismatch {
        site: usize,
        setting: usize,
        expected: usize,
        actual: usize,
    },
    #[error("pivot site {pivot} out of range for {num_sites} sites")]
    PivotOutOfRange { pivot: usize, num_sites: usize },
    #[error("outcome space has {size} points, exceeding the cap of {cap}")]
    OutcomeSpaceTooLarge { size: u128, cap: usize },
    #[error("state dimension {actual} does not match the scenario dimension {expected}")]
    StateDimMismatch { expected: usize, actual: usize },
    #[error("setting index {setting} out of range at site {site} (S = {num_settings})")]
    SettingOutOfRange {
        site: usize,
        setting: usize,
        num_settings: usize,
    },
    #[error(
        "outcome index {outcome} out of range at site {site}, setting {setting} \
         ({num_outcomes} outcomes)"
    )]
    OutcomeOutOfRange {
        site: usize,
        setting: usize,
        outcome: usize,
        num_outcomes: usize,
    },
    #[error("tuple has length {got}, expected {expected}")]
    TupleLength { expected: usize, got: usize },
    #[error("distribution failed to normalize: sum = {0}")]
    NormalizationFailure(f64),
    #[error("expected a single-site reduced state, got {num_sites} sites")]
    NotSingleSite { num_sites: usize },
    #[error(
        "observable at setting {setting} has a degenerate spectrum \
         ({distinct} distinct eigenvalues of {dim}); the chain-overlap bound \
         needs eigenvector bases"
    )]
    DegenerateSpectrum {
        setting: usize,
        distinct: usize,
        dim: usize,
    },
    #[error("malformed scenario description: {0}")]
    ShapeMismatch(String),
}

pub type Result<T> = std::result::Result<T, LqhvError>;

// ── Mixed-radix indexing ─────────────────────────────────────────────────

/// Dense mixed-radix indexer; the first digit is the most significant.
#[derive(Debug, Clone)]
pub struct MixedRadix {
    radices: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl MixedRadix {
    /// Panics if the product of radices overflows `usize`; callers that can
    /// see untrusted sizes check with [`MixedRadix::total_of`] first.
    pub fn new(radices: Vec<usize>) -> Self {
        let total_u128 = Self::total_of(&radices);
        assert!(total_u128 <= usize::MAX as u128, "radix product overflow");
        let mut strides = vec![1usize; radices.len()];
        for i in (0..radices.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * radices[i + 1];
        }
        Self {
            radices,
            strides,
            total: total_u128 as usize,
        }
    }

    pub fn total_of(radices: &[usize]) -> u128 {
        radices.iter().fold(1u128, |acc, &r| acc * r as u128)
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.radices.len());
        digits
            .iter()
            .zip(&self.strides)
            .map(|(d, s)| d * s)
            .sum()
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0usize; self.radices.len()];
        for i in (0..self.radices.len()).rev() {
            digits[i] = index % self.radices[i];
            index /= self.radices[i];
        }
        digits
    }
}

// ── Scenario ─────────────────────────────────────────────────────────────

/// A measurement scenario: `N` sites of local dimension `d`, `S` observables
/// per site, and a pivot site (default 0) whose outcomes receive the
/// conditional weights in the distribution construction.
///
/// Outcome coordinates are ordered site-major, setting-minor: coordinate
/// `site * S + setting`.
#[derive(Debug, Clone)]
pub struct Scenario {
    local_dim: usize,
    observables: Vec<Vec<Observable>>,
    pivot_site: usize,
}

impl Scenario {
    pub fn new(
        local_dim: usize,
        observables: Vec<Vec<Observable>>,
        pivot_site: usize,
    ) -> Result<Self> {
        let num_sites = observables.len();
        if num_sites == 0 {
            return Err(LqhvError::EmptyScenario);
        }
        let num_settings = observables[0].len();
        if num_settings == 0 {
            return Err(LqhvError::EmptyScenario);
        }
        for (site, obs) in observables.iter().enumerate() {
            if obs.len() != num_settings {
                return Err(LqhvError::RaggedSettings {
                    site,
                    got: obs.len(),
                    expected: num_settings,
                });
            }
            for (setting, o) in obs.iter().enumerate() {
                if o.dim() != local_dim {
                    return Err(LqhvError::ObservableDimMismatch {
                        site,
                        setting,
                        expected: local_dim,
                        actual: o.dim(),
                    });
                }
            }
        }
        if pivot_site >= num_sites {
            return Err(LqhvError::PivotOutOfRange {
                pivot: pivot_site,
                num_sites,
            });
        }
        Ok(Self {
            local_dim,
            observables,
            pivot_site,
        })
    }

    pub fn num_sites(&self) -> usize {
        self.observables.len()
    }

    pub fn num_settings(&self) -> usize {
        self.observables[0].len()
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn pivot_site(&self) -> usize {
        self.pivot_site
    }

    pub fn observable(&self, site: usize, setting: usize) -> &Observable {
        &self.observables[site][setting]
    }

    pub fn observables(&self) -> &[Vec<Observable>] {
        &self.observables
    }

    /// Same scenario with a different pivot site.
    pub fn with_pivot(mut self, pivot_site: usize) -> Result<Self> {
        if pivot_site >= self.num_sites() {
            return Err(LqhvError::PivotOutOfRange {
                pivot: pivot_site,
                num_sites: self.num_sites(),
            });
        }
        self.pivot_site = pivot_site;
        Ok(self)
    }

    /// Number of distinct outcomes of the observable at `(site, setting)`.
    pub fn num_outcomes(&self, site: usize, setting: usize) -> usize {
        self.observables[site][setting].num_outcomes()
    }

    /// Radices of all outcome coordinates, site-major.
    pub fn outcome_radices(&self) -> Vec<usize> {
        let mut radices = Vec::with_capacity(self.num_sites() * self.num_settings());
        for site in 0..self.num_sites() {
            for setting in 0..self.num_settings() {
                radices.push(self.num_outcomes(site, setting));
            }
        }
        radices
    }

    pub fn omega_size(&self) -> u128 {
        MixedRadix::total_of(&self.outcome_radices())
    }

    fn site_dims(&self) -> Vec<usize> {
        vec![self.local_dim; self.num_sites()]
    }

    /// Radices of the non-pivot outcome coordinates, site-major.
    fn cond_radices(&self) -> Vec<usize> {
        let mut radices = Vec::new();
        for site in 0..self.num_sites() {
            if site == self.pivot_site {
                continue;
            }
            for setting in 0..self.num_settings() {
                radices.push(self.num_outcomes(site, setting));
            }
        }
        radices
    }

    fn check_state(&self, rho: &DensityMatrix) -> Result<()> {
        let expected = self.local_dim.pow(self.num_sites() as u32);
        if rho.dim() != expected
            || rho.num_sites() != self.num_sites()
            || rho.local_dim() != self.local_dim
        {
            return Err(LqhvError::StateDimMismatch {
                expected,
                actual: rho.dim(),
            });
        }
        Ok(())
    }
}

// ── Weight operators ─────────────────────────────────────────────────────

/// Conditioning-tuple weight operator on the non-pivot sites: the tensor
/// product over non-pivot sites of `(1/2)(P^{(0)}(x) ··· P^{(S-1)}(x) + h.c.)`
/// chains, together with its positive/negative parts.
#[derive(Debug, Clone)]
pub struct WeightOperator {
    pub operator: CMat,
    pub parts: PosNegParts,
}

/// One [`WeightOperator`] per conditioning tuple over the non-pivot
/// coordinates, in mixed-radix order.
#[derive(Debug, Clone)]
pub struct WeightOperators {
    cond_radix: MixedRadix,
    ops: Vec<WeightOperator>,
}

impl WeightOperators {
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn operator(&self, cond_index: usize) -> &WeightOperator {
        &self.ops[cond_index]
    }

    pub fn cond_radix(&self) -> &MixedRadix {
        &self.cond_radix
    }
}

pub fn build_weight_operators(scenario: &Scenario) -> Result<WeightOperators> {
    let size = scenario.omega_size();
    if size > DEFAULT_OMEGA_CAP as u128 {
        return Err(LqhvError::OutcomeSpaceTooLarge {
            size,
            cap: DEFAULT_OMEGA_CAP,
        });
    }
    Ok(build_weight_operators_unchecked(scenario))
}

fn build_weight_operators_unchecked(scenario: &Scenario) -> WeightOperators {
    let cond_radix = MixedRadix::new(scenario.cond_radices());
    let num_settings = scenario.num_settings();
    let non_pivot: Vec<usize> = (0..scenario.num_sites())
        .filter(|&s| s != scenario.pivot_site())
        .collect();
    let ops: Vec<WeightOperator> = (0..cond_radix.total())
        .into_par_iter()
        .map(|cond_index| {
            let digits = cond_radix.decode(cond_index);
            let mut t = CMat::identity(1, 1);
            for (block, &site) in non_pivot.iter().enumerate() {
                let mut chain = scenario
                    .observable(site, 0)
                    .projector(digits[block * num_settings])
                    .clone();
                for setting in 1..num_settings {
                    chain *= scenario
                        .observable(site, setting)
                        .projector(digits[block * num_settings + setting]);
                }
                let site_factor = (&chain + chain.adjoint()) * C64::new(0.5, 0.0);
                t = t.kronecker(&site_factor);
            }
            let herm = HermitianMatrix::from_arithmetic(t);
            let parts = pos_neg_parts(&herm);
            WeightOperator {
                operator: herm.into_entries(),
                parts,
            }
        })
        .collect();
    WeightOperators { cond_radix, ops }
}

// ── Conditional weights ──────────────────────────────────────────────────

/// Pivot-site conditional weights for one conditioning tuple:
/// `weight_pos/neg` are the state weights `tr[rho (I ⊗ T^{(±)})]`, and
/// `alpha_pos/neg[s][x]` the conditional probability of pivot outcome `x`
/// under setting `s`. Each alpha vector is a probability vector.
#[derive(Debug, Clone)]
pub struct CondWeight {
    pub weight_pos: f64,
    pub weight_neg: f64,
    pub alpha_pos: Vec<Vec<f64>>,
    pub alpha_neg: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct ConditionalWeights {
    per_cond: Vec<CondWeight>,
}

impl ConditionalWeights {
    pub fn len(&self) -> usize {
        self.per_cond.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_cond.is_empty()
    }

    pub fn cond(&self, cond_index: usize) -> &CondWeight {
        &self.per_cond[cond_index]
    }
}

pub fn conditional_weights(
    rho: &DensityMatrix,
    scenario: &Scenario,
    weight_ops: &WeightOperators,
) -> Result<ConditionalWeights> {
    scenario.check_state(rho)?;
    let pivot = scenario.pivot_site();
    let num_settings = scenario.num_settings();
    let d = scenario.local_dim();
    let non_pivot_dims = vec![d; scenario.num_sites() - 1];
    let site_dims = scenario.site_dims();

    let per_cond: Vec<CondWeight> = (0..weight_ops.len())
        .into_par_iter()
        .map(|cond_index| {
            let parts = &weight_ops.operator(cond_index).parts;
            let mut weights = [0.0f64; 2];
            let mut alphas: [Vec<Vec<f64>>; 2] = [Vec::new(), Vec::new()];
            for (which, part) in [&parts.positive_part, &parts.negative_part]
                .into_iter()
                .enumerate()
            {
                let cond_op = if scenario.num_sites() == 1 {
                    // No non-pivot sites: the weight operator is the 1x1
                    // identity split into (1, 0).
                    rho.entries() * part[(0, 0)]
                } else {
                    let full = insert_identity_site(part, &non_pivot_dims, pivot, d);
                    let prod = rho.entries() * full;
                    partial_trace_matrix(&prod, &site_dims, &[pivot])
                };
                let weight = cond_op.trace().re;
                weights[which] = weight;
                let mut per_setting = Vec::with_capacity(num_settings);
                for setting in 0..num_settings {
                    let obs = scenario.observable(pivot, setting);
                    let m = obs.num_outcomes();
                    let vec: Vec<f64> = if weight > DEGENERATE_WEIGHT_TOL {
                        (0..m)
                            .map(|x| {
                                (trace_product(&cond_op, obs.projector(x)).re / weight).max(0.0)
                            })
                            .collect()
                    } else {
                        vec![1.0 / m as f64; m]
                    };
                    per_setting.push(vec);
                }
                alphas[which] = per_setting;
            }
            let [alpha_pos, alpha_neg] = alphas;
            CondWeight {
                weight_pos: weights[0],
                weight_neg: weights[1],
                alpha_pos,
                alpha_neg,
            }
        })
        .collect();
    Ok(ConditionalWeights { per_cond })
}

// ── The signed distribution ──────────────────────────────────────────────

/// Signed distribution over the scenario outcome space, stored densely in
/// mixed-radix order (site-major, setting-minor), with its total-variation
/// norm cached.
#[derive(Debug, Clone)]
pub struct SignedScenarioDistribution {
    scenario: Scenario,
    values: Vec<f64>,
    tv_norm: f64,
}

/// Total variation of a signed table: `Σ |v|` with pairwise summation.
pub fn total_variation(values: &[f64]) -> f64 {
    let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    pairwise_sum(&abs)
}

pub fn build_scenario_distribution(
    rho: &DensityMatrix,
    scenario: &Scenario,
) -> Result<SignedScenarioDistribution> {
    build_scenario_distribution_capped(rho, scenario, DEFAULT_OMEGA_CAP)
}

pub fn build_scenario_distribution_capped(
    rho: &DensityMatrix,
    scenario: &Scenario,
    omega_cap: usize,
) -> Result<SignedScenarioDistribution> {
    scenario.check_state(rho)?;
    let size = scenario.omega_size();
    if size > omega_cap as u128 {
        return Err(LqhvError::OutcomeSpaceTooLarge {
            size,
            cap: omega_cap,
        });
    }
    let weight_ops = build_weight_operators_unchecked(scenario);
    let cw = conditional_weights(rho, scenario, &weight_ops)?;

    let num_settings = scenario.num_settings();
    let pivot = scenario.pivot_site();
    let radices = scenario.outcome_radices();
    // The pivot coordinate block is contiguous, so a global index splits
    // into (before-pivot, pivot, after-pivot) blocks without a full decode.
    let pivot_radices: Vec<usize> =
        radices[pivot * num_settings..(pivot + 1) * num_settings].to_vec();
    let pivot_block = MixedRadix::new(pivot_radices);
    let after_total: usize = radices[(pivot + 1) * num_settings..].iter().product();
    let total = size as usize;

    let values: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|omega| {
            let after = omega % after_total;
            let rest = omega / after_total;
            let pivot_idx = rest % pivot_block.total();
            let before = rest / pivot_block.total();
            let cond_index = before * after_total + after;
            let weights = cw.cond(cond_index);
            let digits = pivot_block.decode(pivot_idx);
            let mut pos = weights.weight_pos;
            let mut neg = weights.weight_neg;
            for (setting, &x) in digits.iter().enumerate() {
                pos *= weights.alpha_pos[setting][x];
                neg *= weights.alpha_neg[setting][x];
            }
            pos - neg
        })
        .collect();

    let sum = pairwise_sum(&values);
    if (sum - 1.0).abs() > 1e-9 {
        return Err(LqhvError::NormalizationFailure(sum));
    }
    let tv_norm = total_variation(&values);
    Ok(SignedScenarioDistribution {
        scenario: scenario.clone(),
        values,
        tv_norm,
    })
}

impl SignedScenarioDistribution {
    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tv_norm(&self) -> f64 {
        self.tv_norm
    }

    pub fn sum(&self) -> f64 {
        pairwise_sum(&self.values)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    /// Formula cap on the total-variation norm for this scenario shape.
    pub fn norm_bound(&self) -> f64 {
        crate::bounds::lqhv_norm_bound(
            self.scenario.num_sites(),
            self.scenario.local_dim(),
            self.scenario.num_settings(),
        )
    }

    /// Sum of the table over every outcome tuple consistent with measuring
    /// `settings[n]` and observing outcome index `outcomes[n]` at each site.
    pub fn marginal_joint_prob(&self, settings: &[usize], outcomes: &[usize]) -> Result<f64> {
        let scenario = &self.scenario;
        let n = scenario.num_sites();
        let s_count = scenario.num_settings();
        if settings.len() != n {
            return Err(LqhvError::TupleLength {
                expected: n,
                got: settings.len(),
            });
        }
        if outcomes.len() != n {
            return Err(LqhvError::TupleLength {
                expected: n,
                got: outcomes.len(),
            });
        }
        let radices = scenario.outcome_radices();
        let radix = MixedRadix::new(radices.clone());
        let strides = radix.strides();
        let mut base = 0usize;
        let mut fixed = vec![false; radices.len()];
        for site in 0..n {
            let setting = settings[site];
            if setting >= s_count {
                return Err(LqhvError::SettingOutOfRange {
                    site,
                    setting,
                    num_settings: s_count,
                });
            }
            let coord = site * s_count + setting;
            let outcome = outcomes[site];
            if outcome >= radices[coord] {
                return Err(LqhvError::OutcomeOutOfRange {
                    site,
                    setting,
                    outcome,
                    num_outcomes: radices[coord],
                });
            }
            base += outcome * strides[coord];
            fixed[coord] = true;
        }
        let free: Vec<usize> = (0..radices.len()).filter(|&c| !fixed[c]).collect();
        let count: usize = free.iter().map(|&c| radices[c]).product();
        let mut terms = Vec::with_capacity(count);
        let mut digits = vec![0usize; free.len()];
        let mut index = base;
        loop {
            terms.push(self.values[index]);
            // Odometer increment over the free coordinates.
            let mut pos = free.len();
            loop {
                if pos == 0 {
                    return Ok(pairwise_sum(&terms));
                }
                pos -= 1;
                let coord = free[pos];
                digits[pos] += 1;
                index += strides[coord];
                if digits[pos] < radices[coord] {
                    break;
                }
                digits[pos] = 0;
                index -= strides[coord] * radices[coord];
            }
        }
    }

    /// Maximum deviation of the table marginals from the quantum joint
    /// probabilities, over every settings and outcomes combination.
    pub fn max_marginal_deviation(&self, rho: &DensityMatrix) -> Result<MarginalCheck> {
        let scenario = &self.scenario;
        scenario.check_state(rho)?;
        let n = scenario.num_sites();
        let settings_radix = MixedRadix::new(vec![scenario.num_settings(); n]);
        let mut worst = MarginalCheck {
            max_deviation: 0.0,
            worst_settings: vec![0; n],
            worst_outcomes: vec![0; n],
        };
        for s_idx in 0..settings_radix.total() {
            let settings = settings_radix.decode(s_idx);
            let outcome_radix = MixedRadix::new(
                (0..n)
                    .map(|site| scenario.num_outcomes(site, settings[site]))
                    .collect(),
            );
            for o_idx in 0..outcome_radix.total() {
                let outcomes = outcome_radix.decode(o_idx);
                let marginal = self.marginal_joint_prob(&settings, &outcomes)?;
                let quantum = quantum_joint_prob(rho, scenario, &settings, &outcomes)?;
                let dev = (marginal - quantum).abs();
                if dev > worst.max_deviation {
                    worst.max_deviation = dev;
                    worst.worst_settings = settings.clone();
                    worst.worst_outcomes = outcomes;
                }
            }
        }
        Ok(worst)
    }

    /// CSV table: one column per outcome coordinate (labelled
    /// `x<site>.<setting>`, holding the outcome eigenvalue) and a final
    /// `value` column, in mixed-radix row order.
    pub fn to_csv(&self) -> String {
        let scenario = &self.scenario;
        let radix = MixedRadix::new(scenario.outcome_radices());
        let mut out = String::new();
        let mut header: Vec<String> = Vec::new();
        for site in 0..scenario.num_sites() {
            for setting in 0..scenario.num_settings() {
                header.push(format!("x{site}.{setting}"));
            }
        }
        header.push("value".into());
        out.push_str(&header.join(","));
        out.push('\n');
        for (index, value) in self.values.iter().enumerate() {
            let digits = radix.decode(index);
            let mut row: Vec<String> = Vec::with_capacity(digits.len() + 1);
            for (coord, &digit) in digits.iter().enumerate() {
                let site = coord / scenario.num_settings();
                let setting = coord % scenario.num_settings();
                row.push(format!(
                    "{}",
                    scenario.observable(site, setting).outcome_value(digit)
                ));
            }
            row.push(format!("{value}"));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn export(&self) -> DistributionExport {
        DistributionExport {
            scenario: ScenarioSpec::from_scenario(&self.scenario),
            values: self.values.clone(),
            tv_norm: self.tv_norm,
        }
    }
}

/// Worst marginal deviation and where it occurred.
#[derive(Debug, Clone)]
pub struct MarginalCheck {
    pub max_deviation: f64,
    pub worst_settings: Vec<usize>,
    pub worst_outcomes: Vec<usize>,
}

/// `tr[rho ⊗_n P_{X_n^{(s_n)}}(x_n)]` for the given settings and outcome
/// indices.
pub fn quantum_joint_prob(
    rho: &DensityMatrix,
    scenario: &Scenario,
    settings: &[usize],
    outcomes: &[usize],
) -> Result<f64> {
    scenario.check_state(rho)?;
    let n = scenario.num_sites();
    if settings.len() != n || outcomes.len() != n {
        return Err(LqhvError::TupleLength {
            expected: n,
            got: settings.len().min(outcomes.len()),
        });
    }
    let mut op = CMat::identity(1, 1);
    for site in 0..n {
        let setting = settings[site];
        if setting >= scenario.num_settings() {
            return Err(LqhvError::SettingOutOfRange {
                site,
                setting,
                num_settings: scenario.num_settings(),
            });
        }
        let obs = scenario.observable(site, setting);
        if outcomes[site] >= obs.num_outcomes() {
            return Err(LqhvError::OutcomeOutOfRange {
                site,
                setting,
                outcome: outcomes[site],
                num_outcomes: obs.num_outcomes(),
            });
        }
        op = op.kronecker(obs.projector(outcomes[site]));
    }
    Ok(rho.expectation(&op))
}

// ── Moment measure ───────────────────────────────────────────────────────

/// Value of the symmetrized moment measure on the outcome set `F` for a
/// finite collection of observables on the full state space:
/// `Σ_{x ∈ F} tr[rho · sym(P_{X_1}(x_1) ··· P_{X_m}(x_m))]`.
///
/// Each tuple entry is matched against the corresponding observable's
/// distinct eigenvalues; an unmatched value is an error.
pub fn moment_measure_value(
    rho: &DensityMatrix,
    observables: &[Observable],
    outcome_set: &[Vec<f64>],
) -> Result<f64> {
    let m = observables.len();
    for obs in observables {
        if obs.dim() != rho.dim() {
            return Err(LqhvError::StateDimMismatch {
                expected: rho.dim(),
                actual: obs.dim(),
            });
        }
    }
    let mut terms = Vec::with_capacity(outcome_set.len());
    for tuple in outcome_set {
        if tuple.len() != m {
            return Err(LqhvError::TupleLength {
                expected: m,
                got: tuple.len(),
            });
        }
        let mut projectors: Vec<&CMat> = Vec::with_capacity(m);
        for (obs, &x) in observables.iter().zip(tuple) {
            let k = obs.spectral().outcome_index_of(x)?;
            projectors.push(obs.projector(k));
        }
        let sym = sym_product_raw(&projectors)?;
        terms.push(rho.expectation(&sym));
    }
    Ok(pairwise_sum(&terms))
}

/// Absolute gap between the two routes of the moment identity for one
/// observable collection: the symmetrized operator moment
/// `tr[rho · sym(X_1 ··· X_m)]` versus the eigenvalue-weighted sum of the
/// moment measure over the full product of spectra.
pub fn moment_identity_deviation(
    rho: &DensityMatrix,
    observables: &[Observable],
) -> Result<f64> {
    let m = observables.len();
    for obs in observables {
        if obs.dim() != rho.dim() {
            return Err(LqhvError::StateDimMismatch {
                expected: rho.dim(),
                actual: obs.dim(),
            });
        }
    }
    let mats: Vec<&CMat> = observables.iter().map(|o| o.matrix().entries()).collect();
    let lhs = rho.expectation(&sym_product_raw(&mats)?);

    let radix = MixedRadix::new(observables.iter().map(|o| o.num_outcomes()).collect());
    let mut terms = Vec::with_capacity(radix.total());
    for idx in 0..radix.total() {
        let digits = radix.decode(idx);
        let mut projectors: Vec<&CMat> = Vec::with_capacity(m);
        let mut eigenvalue_product = 1.0;
        for (obs, &k) in observables.iter().zip(&digits) {
            projectors.push(obs.projector(k));
            eigenvalue_product *= obs.outcome_value(k);
        }
        let sym = sym_product_raw(&projectors)?;
        terms.push(eigenvalue_product * rho.expectation(&sym));
    }
    let rhs = pairwise_sum(&terms);
    Ok((lhs - rhs).abs())
}

/// Randomized harness for the moment identity: draws `trials` seeded
/// (state, observable-collection) pairs on `num_sites` qudits and returns
/// the maximum deviation observed.
pub fn check_moment_identity(
    num_sites: usize,
    local_dim: usize,
    num_observables: usize,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = local_dim.pow(num_sites as u32);
    let mut max_dev = 0.0f64;
    for _ in 0..trials {
        let rho = qlinalg::random_density(num_sites, local_dim, &mut rng);
        let observables: Vec<Observable> = (0..num_observables)
            .map(|_| {
                Observable::new(
                    qlinalg::random_hermitian(dim, &mut rng),
                    qlinalg::DEFAULT_CLUSTER_TOL,
                )
            })
            .collect::<qlinalg::Result<_>>()?;
        max_dev = max_dev.max(moment_identity_deviation(&rho, &observables)?);
    }
    Ok(max_dev)
}

// ── Chain-overlap bound ──────────────────────────────────────────────────

/// Analytic upper bound on the total-variation norm of a bipartite signed
/// distribution, evaluated from the non-pivot site's reduced state and the
/// eigenvector bases of its observables. Requires non-degenerate spectra.
pub fn chain_overlap_bound(rho_tilde: &DensityMatrix, observables: &[Observable]) -> Result<f64> {
    if rho_tilde.num_sites() != 1 {
        return Err(LqhvError::NotSingleSite {
            num_sites: rho_tilde.num_sites(),
        });
    }
    let d = rho_tilde.dim();
    if observables.is_empty() {
        return Err(LqhvError::EmptyScenario);
    }
    let mut bases = Vec::with_capacity(observables.len());
    for (setting, obs) in observables.iter().enumerate() {
        if obs.dim() != d {
            return Err(LqhvError::StateDimMismatch {
                expected: d,
                actual: obs.dim(),
            });
        }
        if obs.num_outcomes() != d {
            return Err(LqhvError::DegenerateSpectrum {
                setting,
                distinct: obs.num_outcomes(),
                dim: d,
            });
        }
        bases.push(hermitian_eig(obs.matrix()));
    }
    chain_overlap_bound_from_bases(rho_tilde, &bases)
}

/// Basis-level variant of [`chain_overlap_bound`]; exposed so invariance
/// under per-eigenvector phase changes can be exercised directly.
pub fn chain_overlap_bound_from_bases(
    rho_tilde: &DensityMatrix,
    bases: &[EigenSystem],
) -> Result<f64> {
    if rho_tilde.num_sites() != 1 {
        return Err(LqhvError::NotSingleSite {
            num_sites: rho_tilde.num_sites(),
        });
    }
    let d = rho_tilde.dim();
    let s = bases.len();
    if s == 0 {
        return Err(LqhvError::EmptyScenario);
    }
    for basis in bases {
        if basis.eigenvectors.nrows() != d {
            return Err(LqhvError::StateDimMismatch {
                expected: d,
                actual: basis.eigenvectors.nrows(),
            });
        }
    }
    let radix = MixedRadix::new(vec![d; s]);
    let mut terms = Vec::with_capacity(radix.total());
    for idx in 0..radix.total() {
        let ks = radix.decode(idx);
        // Overlap chain along consecutive settings.
        let mut beta = C64::new(1.0, 0.0);
        for step in 0..s - 1 {
            let a = bases[step].eigenvectors.column(ks[step]);
            let b = bases[step + 1].eigenvectors.column(ks[step + 1]);
            beta *= a.dotc(&b);
        }
        let beta_abs = beta.norm();
        if beta_abs < 1e-14 {
            continue;
        }
        let first = bases[0].eigenvectors.column(ks[0]).clone_owned();
        let last = bases[s - 1].eigenvectors.column(ks[s - 1]).clone_owned();
        let alpha = last.dotc(&first);
        let coeff = alpha * beta * beta / C64::new(beta_abs * beta_abs, 0.0);
        // The bracket operator |u><u| + |w><w| + (coeff |u><w| + h.c.) has
        // rank at most two, so its square root is taken on the span of
        // u = first, w = last; the orthogonal complement never contributes
        // and cannot inject square-rooted rounding noise.
        let g = first.dotc(&last);
        let residual = &last - &first * g;
        let span = residual.norm();
        let m00 = 1.0 + g.norm_sqr() + 2.0 * (coeff * g.conj()).re;
        let trace_weight = if span < 1e-14 {
            let rho_u = rho_tilde.entries() * &first;
            (m00.max(0.0).sqrt() * first.dotc(&rho_u)).re
        } else {
            let v2 = &residual * C64::new(1.0 / span, 0.0);
            let m01 = (g + coeff) * C64::new(span, 0.0);
            let m11 = span * span;
            // Closed-form PSD square root of the 2x2 block
            // [[m00, m01], [conj(m01), m11]].
            let det = (m00 * m11 - m01.norm_sqr()).max(0.0);
            let tr = (m00 + m11).max(0.0);
            let sdet = det.sqrt();
            let denom = (tr + 2.0 * sdet).sqrt();
            if denom < 1e-300 {
                0.0
            } else {
                let r00 = (m00 + sdet) / denom;
                let r11 = (m11 + sdet) / denom;
                let r01 = m01 / C64::new(denom, 0.0);
                let rho_u = rho_tilde.entries() * &first;
                let rho_v = rho_tilde.entries() * &v2;
                (C64::new(r00, 0.0) * first.dotc(&rho_u)
                    + C64::new(r11, 0.0) * v2.dotc(&rho_v)
                    + r01 * v2.dotc(&rho_u)
                    + r01.conj() * first.dotc(&rho_v))
                .re
            }
        };
        terms.push(beta_abs * trace_weight);
    }
    Ok(0.5 * pairwise_sum(&terms))
}

// ── Serializable descriptions ────────────────────────────────────────────

/// Complex matrix as row-major `[re, im]` pairs.
pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

/// On-disk description of a scenario: strict schema shared by file
/// configuration and JSON exports.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub num_sites: usize,
    pub local_dim: usize,
    pub num_settings: usize,
    #[serde(default)]
    pub pivot_site: usize,
    /// `observables[site][setting]` is a `local_dim` x `local_dim` matrix.
    pub observables: Vec<Vec<MatrixSpec>>,
}

pub fn matrix_from_spec(spec: &MatrixSpec, expected_dim: usize) -> Result<CMat> {
    if spec.len() != expected_dim {
        return Err(LqhvError::ShapeMismatch(format!(
            "matrix has {} rows, expected {expected_dim}",
            spec.len()
        )));
    }
    for (i, row) in spec.iter().enumerate() {
        if row.len() != expected_dim {
            return Err(LqhvError::ShapeMismatch(format!(
                "matrix row {i} has {} entries, expected {expected_dim}",
                row.len()
            )));
        }
    }
    Ok(CMat::from_fn(expected_dim, expected_dim, |i, j| {
        C64::new(spec[i][j][0], spec[i][j][1])
    }))
}

pub fn matrix_to_spec(m: &CMat) -> MatrixSpec {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

impl ScenarioSpec {
    pub fn to_scenario(&self, cluster_tol: f64) -> Result<Scenario> {
        if self.observables.len() != self.num_sites {
            return Err(LqhvError::ShapeMismatch(format!(
                "{} observable rows for num_sites = {}",
                self.observables.len(),
                self.num_sites
            )));
        }
        let mut observables = Vec::with_capacity(self.num_sites);
        for (site, row) in self.observables.iter().enumerate() {
            if row.len() != self.num_settings {
                return Err(LqhvError::RaggedSettings {
                    site,
                    got: row.len(),
                    expected: self.num_settings,
                });
            }
            let mut obs_row = Vec::with_capacity(self.num_settings);
            for (setting, mat) in row.iter().enumerate() {
                let entries = matrix_from_spec(mat, self.local_dim)?;
                let obs = HermitianMatrix::new(entries)
                    .and_then(|h| Observable::new(h, cluster_tol))
                    .map_err(|source| LqhvError::InvalidObservable {
                        site,
                        setting,
                        source,
                    })?;
                obs_row.push(obs);
            }
            observables.push(obs_row);
        }
        Scenario::new(self.local_dim, observables, self.pivot_site)
    }

    pub fn from_scenario(scenario: &Scenario) -> Self {
        Self {
            num_sites: scenario.num_sites(),
            local_dim: scenario.local_dim(),
            num_settings: scenario.num_settings(),
            pivot_site: scenario.pivot_site(),
            observables: scenario
                .observables()
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|o| matrix_to_spec(o.matrix().entries()))
                        .collect()
                })
                .collect(),
        }
    }
}

/// JSON export document for a constructed distribution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistributionExport {
    pub scenario: ScenarioSpec,
    /// Table values in mixed-radix order (site-major, setting-minor).
    pub values: Vec<f64>,
    pub tv_norm: f64,
}
