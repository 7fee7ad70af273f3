//! Bell functionals and violation ratios.
//!
//! A functional is a finite coefficient table over settings tuples
//! (correlation form, dichotomic ±1 observables) or over settings and
//! outcome tuples (probability form). The classical bound is the exact
//! maximum absolute value over all deterministic local assignment
//! strategies, found by full enumeration; the violation ratio
//! `|quantum value| / classical bound` lower-bounds the maximal violation
//! parameter that the `bounds` module caps from above.

use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::bounds;
use crate::lqhv::MixedRadix;
use crate::qlinalg::{
    hermitian_eig, partial_trace_matrix, random_hermitian, CMat, DensityMatrix, HermitianMatrix,
    Observable, QlinalgError, DEFAULT_CLUSTER_TOL,
};
use crate::util::pairwise_sum;

/// Cap on the deterministic-strategy count enumerated by
/// [`classical_bound`].
pub const MAX_STRATEGIES: u128 = 100_000_000;
/// Site cap for the Mermin-Klyshko construction (the strategy space grows
/// as `4^N`).
pub const MAX_MK_SITES: usize = 10;
/// Slack allowed when checking a ratio against the closed-form cap.
pub const RATIO_BOUND_SLACK: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum BellError {
    #[error(transparent)]
    Linalg(#[from] QlinalgError),
    #[error("functional needs at least one site and one setting")]
    EmptyFunctional,
    #[error("bad coefficient entry: {0}")]
    EntryShape(String),
    #[error("correlation form requires spectrum within {{-1, +1}}: site {site}, setting {setting}")]
    SpectrumNotDichotomic { site: usize, setting: usize },
    #[error(
        "observable at site {site}, setting {setting} has {actual} outcomes, \
         functional expects {expected}"
    )]
    OutcomeCountMismatch {
        site: usize,
        setting: usize,
        expected: usize,
        actual: usize,
    },
    #[error("strategy space has {size} points, exceeding the cap of {cap}")]
    StrategySpaceTooLarge { size: u128, cap: u128 },
    #[error("classical bound is zero; the violation ratio is undefined")]
    DegenerateFunctional,
    #[error("Mermin-Klyshko construction needs 2..={MAX_MK_SITES} sites, got {0}")]
    MkSitesOutOfRange(usize),
    #[error("settings list does not match the functional: {0}")]
    SettingsMismatch(String),
    #[error("see-saw requires a correlation-form functional")]
    UnsupportedForm,
    #[error("ratio {ratio} exceeds the closed-form cap {bound}")]
    BoundExceeded { ratio: f64, bound: f64 },
}

pub type Result<T> = std::result::Result<T, BellError>;

/// Per-site observable lists used to evaluate a functional: one observable
/// per setting at each site.
pub type SettingList = Vec<Vec<Observable>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionalForm {
    Correlation,
    Probability,
}

/// A Bell functional as a dense coefficient table.
#[derive(Debug, Clone)]
pub struct BellFunctional {
    name: String,
    num_sites: usize,
    num_settings: usize,
    num_outcomes: usize,
    form: FunctionalForm,
    settings_radix: MixedRadix,
    outcomes_radix: MixedRadix,
    coeffs: Vec<f64>,
}

impl BellFunctional {
    /// Correlation-form functional from sparse `(settings tuple, value)`
    /// entries; repeated tuples accumulate.
    pub fn correlation(
        name: impl Into<String>,
        num_sites: usize,
        num_settings: usize,
        entries: &[(Vec<usize>, f64)],
    ) -> Result<Self> {
        if num_sites == 0 || num_settings == 0 {
            return Err(BellError::EmptyFunctional);
        }
        let settings_radix = MixedRadix::new(vec![num_settings; num_sites]);
        let outcomes_radix = MixedRadix::new(vec![2; num_sites]);
        let mut coeffs = vec![0.0; settings_radix.total()];
        for (tuple, value) in entries {
            check_digits(tuple, num_sites, num_settings, "settings")?;
            coeffs[settings_radix.index(tuple)] += value;
        }
        Ok(Self {
            name: name.into(),
            num_sites,
            num_settings,
            num_outcomes: 2,
            form: FunctionalForm::Correlation,
            settings_radix,
            outcomes_radix,
            coeffs,
        })
    }

    /// Probability-form functional from sparse
    /// `(settings tuple, outcomes tuple, value)` entries. Outcome indices
    /// refer to each observable's distinct eigenvalues in descending order.
    pub fn probability(
        name: impl Into<String>,
        num_sites: usize,
        num_settings: usize,
        num_outcomes: usize,
        entries: &[(Vec<usize>, Vec<usize>, f64)],
    ) -> Result<Self> {
        if num_sites == 0 || num_settings == 0 || num_outcomes == 0 {
            return Err(BellError::EmptyFunctional);
        }
        let settings_radix = MixedRadix::new(vec![num_settings; num_sites]);
        let outcomes_radix = MixedRadix::new(vec![num_outcomes; num_sites]);
        let block = outcomes_radix.total();
        let mut coeffs = vec![0.0; settings_radix.total() * block];
        for (settings, outcomes, value) in entries {
            check_digits(settings, num_sites, num_settings, "settings")?;
            check_digits(outcomes, num_sites, num_outcomes, "outcomes")?;
            coeffs[settings_radix.index(settings) * block + outcomes_radix.index(outcomes)] +=
                value;
        }
        Ok(Self {
            name: name.into(),
            num_sites,
            num_settings,
            num_outcomes,
            form: FunctionalForm::Probability,
            settings_radix,
            outcomes_radix,
            coeffs,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn num_settings(&self) -> usize {
        self.num_settings
    }

    pub fn num_outcomes(&self) -> usize {
        self.num_outcomes
    }

    pub fn form(&self) -> FunctionalForm {
        self.form
    }

    pub fn coefficient(&self, settings: &[usize], outcomes: Option<&[usize]>) -> f64 {
        let s = self.settings_radix.index(settings);
        match (self.form, outcomes) {
            (FunctionalForm::Correlation, _) => self.coeffs[s],
            (FunctionalForm::Probability, Some(x)) => {
                self.coeffs[s * self.outcomes_radix.total() + self.outcomes_radix.index(x)]
            }
            (FunctionalForm::Probability, None) => 0.0,
        }
    }

    /// Nonzero coefficients as sparse entries (settings, outcomes, value);
    /// the outcomes component is `None` for correlation form.
    pub fn coefficient_entries(&self) -> Vec<(Vec<usize>, Option<Vec<usize>>, f64)> {
        let mut out = Vec::new();
        match self.form {
            FunctionalForm::Correlation => {
                for (idx, &c) in self.coeffs.iter().enumerate() {
                    if c != 0.0 {
                        out.push((self.settings_radix.decode(idx), None, c));
                    }
                }
            }
            FunctionalForm::Probability => {
                let block = self.outcomes_radix.total();
                for (idx, &c) in self.coeffs.iter().enumerate() {
                    if c != 0.0 {
                        out.push((
                            self.settings_radix.decode(idx / block),
                            Some(self.outcomes_radix.decode(idx % block)),
                            c,
                        ));
                    }
                }
            }
        }
        out
    }

    /// Same functional with every coefficient multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut scaled = self.clone();
        for c in &mut scaled.coeffs {
            *c *= factor;
        }
        scaled.name = format!("{}*{}", self.name, factor);
        scaled
    }

    fn validate_settings(&self, rho: &DensityMatrix, settings: &[Vec<Observable>]) -> Result<()> {
        if settings.len() != self.num_sites {
            return Err(BellError::SettingsMismatch(format!(
                "{} sites supplied, functional has {}",
                settings.len(),
                self.num_sites
            )));
        }
        if rho.num_sites() != self.num_sites {
            return Err(BellError::SettingsMismatch(format!(
                "state has {} sites, functional has {}",
                rho.num_sites(),
                self.num_sites
            )));
        }
        for (site, row) in settings.iter().enumerate() {
            if row.len() != self.num_settings {
                return Err(BellError::SettingsMismatch(format!(
                    "site {site} has {} observables, functional has {} settings",
                    row.len(),
                    self.num_settings
                )));
            }
            for (setting, obs) in row.iter().enumerate() {
                if obs.dim() != rho.local_dim() {
                    return Err(BellError::SettingsMismatch(format!(
                        "observable at site {site}, setting {setting} is {}x{}, state is {}-level",
                        obs.dim(),
                        obs.dim(),
                        rho.local_dim()
                    )));
                }
                match self.form {
                    FunctionalForm::Correlation => {
                        if !obs.is_dichotomic_pm1(1e-10) {
                            return Err(BellError::SpectrumNotDichotomic { site, setting });
                        }
                    }
                    FunctionalForm::Probability => {
                        if obs.num_outcomes() != self.num_outcomes {
                            return Err(BellError::OutcomeCountMismatch {
                                site,
                                setting,
                                expected: self.num_outcomes,
                                actual: obs.num_outcomes(),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn check_digits(tuple: &[usize], len: usize, radix: usize, what: &str) -> Result<()> {
    if tuple.len() != len {
        return Err(BellError::EntryShape(format!(
            "{what} tuple has length {}, expected {len}",
            tuple.len()
        )));
    }
    for &d in tuple {
        if d >= radix {
            return Err(BellError::EntryShape(format!(
                "{what} index {d} out of range (< {radix})"
            )));
        }
    }
    Ok(())
}

// ── Classical bound ──────────────────────────────────────────────────────

/// Exact maximum of `|f|` over all deterministic local assignment
/// strategies (one outcome per setting per site), by full enumeration with
/// a max-reduction. No pruning, no floating-point shortcuts.
pub fn classical_bound(f: &BellFunctional) -> Result<f64> {
    classical_bound_with(f, false)
}

fn classical_bound_with(f: &BellFunctional, reversed: bool) -> Result<f64> {
    let per_site = (f.num_outcomes as u128).pow(f.num_settings as u32);
    let total = per_site.pow(f.num_sites as u32);
    if total > MAX_STRATEGIES {
        return Err(BellError::StrategySpaceTooLarge {
            size: total,
            cap: MAX_STRATEGIES,
        });
    }
    let per_site = per_site as usize;
    let total = total as usize;
    // One shared table: per-site strategy index -> outcome digit per setting.
    let site_strategy_radix = MixedRadix::new(vec![f.num_outcomes; f.num_settings]);
    let site_table: Vec<Vec<usize>> = (0..per_site)
        .map(|k| site_strategy_radix.decode(k))
        .collect();
    let settings_tuples: Vec<Vec<usize>> = (0..f.settings_radix.total())
        .map(|t| f.settings_radix.decode(t))
        .collect();
    let strategy_radix = MixedRadix::new(vec![per_site; f.num_sites]);
    let outcome_strides: Vec<usize> = f.outcomes_radix.strides().to_vec();
    let block = f.outcomes_radix.total();

    let eval = |idx: usize| -> f64 {
        let site_ks = strategy_radix.decode(idx);
        let mut value = 0.0;
        for (t, tuple) in settings_tuples.iter().enumerate() {
            match f.form {
                FunctionalForm::Correlation => {
                    let c = f.coeffs[t];
                    if c == 0.0 {
                        continue;
                    }
                    let mut prod = 1.0;
                    for site in 0..f.num_sites {
                        // Outcome digit 0 is +1, digit 1 is -1.
                        if site_table[site_ks[site]][tuple[site]] == 1 {
                            prod = -prod;
                        }
                    }
                    value += c * prod;
                }
                FunctionalForm::Probability => {
                    let mut x_idx = 0usize;
                    for site in 0..f.num_sites {
                        x_idx += site_table[site_ks[site]][tuple[site]] * outcome_strides[site];
                    }
                    value += f.coeffs[t * block + x_idx];
                }
            }
        }
        value.abs()
    };

    let best = (0..total)
        .into_par_iter()
        .map(|i| if reversed { eval(total - 1 - i) } else { eval(i) })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

// ── Quantum value ────────────────────────────────────────────────────────

/// Signed value of the functional on `rho` at the given settings:
/// correlation form sums `c(s) tr[rho ⊗ X]`, probability form sums
/// `c(s, x) tr[rho ⊗ P(x)]`.
pub fn quantum_value(
    f: &BellFunctional,
    rho: &DensityMatrix,
    settings: &[Vec<Observable>],
) -> Result<f64> {
    f.validate_settings(rho, settings)?;
    let mut terms = Vec::new();
    for t in 0..f.settings_radix.total() {
        let tuple = f.settings_radix.decode(t);
        match f.form {
            FunctionalForm::Correlation => {
                let c = f.coeffs[t];
                if c == 0.0 {
                    continue;
                }
                let mut op = CMat::identity(1, 1);
                for site in 0..f.num_sites {
                    op = op.kronecker(settings[site][tuple[site]].matrix().entries());
                }
                terms.push(c * rho.expectation(&op));
            }
            FunctionalForm::Probability => {
                let block = f.outcomes_radix.total();
                for x in 0..block {
                    let c = f.coeffs[t * block + x];
                    if c == 0.0 {
                        continue;
                    }
                    let outcomes = f.outcomes_radix.decode(x);
                    let mut op = CMat::identity(1, 1);
                    for site in 0..f.num_sites {
                        op = op.kronecker(settings[site][tuple[site]].projector(outcomes[site]));
                    }
                    terms.push(c * rho.expectation(&op));
                }
            }
        }
    }
    Ok(pairwise_sum(&terms))
}

// ── Violation ratios ─────────────────────────────────────────────────────

/// Outcome of evaluating (and possibly optimizing) a functional on a state.
/// `quantum_value` is the magnitude of the functional value at the returned
/// settings; `trace` records the signed objective per optimizer iteration
/// (a single entry when no optimization ran).
#[derive(Debug, Clone)]
pub struct ViolationResult {
    pub classical_bound: f64,
    pub quantum_value: f64,
    pub ratio: f64,
    pub settings: SettingList,
    pub trace: Vec<f64>,
}

fn finish_result(
    f: &BellFunctional,
    rho: &DensityMatrix,
    settings: SettingList,
    classical: f64,
    trace: Vec<f64>,
) -> Result<ViolationResult> {
    let signed = *trace.last().expect("trace is never empty");
    let ratio = signed.abs() / classical;
    let (bound, _) = bounds::combined_bound(f.num_sites, rho.local_dim(), f.num_settings);
    if ratio > bound + RATIO_BOUND_SLACK {
        return Err(BellError::BoundExceeded { ratio, bound });
    }
    Ok(ViolationResult {
        classical_bound: classical,
        quantum_value: signed.abs(),
        ratio,
        settings,
        trace,
    })
}

/// `|quantum value| / classical bound` at fixed settings, checked against
/// the closed-form cap for the same shape.
pub fn violation_ratio(
    f: &BellFunctional,
    rho: &DensityMatrix,
    settings: &[Vec<Observable>],
) -> Result<ViolationResult> {
    let classical = classical_bound(f)?;
    if classical <= 1e-12 {
        return Err(BellError::DegenerateFunctional);
    }
    let signed = quantum_value(f, rho, settings)?;
    finish_result(f, rho, settings.to_vec(), classical, vec![signed])
}

// ── See-saw optimization ─────────────────────────────────────────────────

/// Coordinate ascent on the settings of a dichotomic correlation-form
/// functional. Each site update replaces every observable of that site by
/// the sign of its effective operator (the partial trace of the functional
/// operator against all other sites' current observables), which is the
/// closed-form one-site optimum; the objective is therefore nondecreasing.
/// Stops after `max_iters` sweeps or when a sweep improves the objective by
/// less than `tol`.
pub fn seesaw_optimize(
    f: &BellFunctional,
    rho: &DensityMatrix,
    initial: &[Vec<Observable>],
    max_iters: usize,
    tol: f64,
) -> Result<ViolationResult> {
    if f.form != FunctionalForm::Correlation {
        return Err(BellError::UnsupportedForm);
    }
    let classical = classical_bound(f)?;
    if classical <= 1e-12 {
        return Err(BellError::DegenerateFunctional);
    }
    let mut settings = initial.to_vec();
    let mut objective = quantum_value(f, rho, &settings)?;
    let mut trace = vec![objective];
    for _ in 0..max_iters {
        for site in 0..f.num_sites {
            for setting in 0..f.num_settings {
                let effective = effective_operator(f, rho, &settings, site, setting);
                settings[site][setting] = sign_observable(&effective);
            }
        }
        let next = quantum_value(f, rho, &settings)?;
        trace.push(next);
        let improvement = next - objective;
        objective = next;
        if improvement < tol {
            break;
        }
    }
    finish_result(f, rho, settings, classical, trace)
}

/// `Σ_{s⃗: s_site = setting} c(s⃗) · Tr_{≠site}[rho (⊗_{m≠site} X_m^{(s_m)})]`.
fn effective_operator(
    f: &BellFunctional,
    rho: &DensityMatrix,
    settings: &[Vec<Observable>],
    site: usize,
    setting: usize,
) -> CMat {
    let d = rho.local_dim();
    let dims = rho.site_dims();
    let identity = CMat::identity(d, d);
    let mut acc = CMat::zeros(d, d);
    for t in 0..f.settings_radix.total() {
        let c = f.coeffs[t];
        if c == 0.0 {
            continue;
        }
        let tuple = f.settings_radix.decode(t);
        if tuple[site] != setting {
            continue;
        }
        let mut op = CMat::identity(1, 1);
        for m in 0..f.num_sites {
            if m == site {
                op = op.kronecker(&identity);
            } else {
                op = op.kronecker(settings[m][tuple[m]].matrix().entries());
            }
        }
        let prod = rho.entries() * op;
        acc += partial_trace_matrix(&prod, &dims, &[site]) * C64::new(c, 0.0);
    }
    acc
}

/// Spectral sign of a Hermitian operator, with `sgn(0) := +1` so the
/// update is deterministic.
fn sign_observable(effective: &CMat) -> Observable {
    let h = HermitianMatrix::from_arithmetic(effective.clone());
    let eig = hermitian_eig(&h);
    let dim = effective.nrows();
    let mut acc = CMat::zeros(dim, dim);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let sign = if lambda >= 0.0 { 1.0 } else { -1.0 };
        acc += (&v * v.adjoint()) * C64::new(sign, 0.0);
    }
    Observable::new(HermitianMatrix::from_arithmetic(acc), DEFAULT_CLUSTER_TOL)
        .expect("sign operator is Hermitian")
}

// ── Named functionals and settings ───────────────────────────────────────

/// CHSH in correlation form: coefficients (+1, +1, +1, -1) on the setting
/// pairs (0,0), (0,1), (1,0), (1,1).
pub fn chsh() -> BellFunctional {
    BellFunctional::correlation(
        "chsh",
        2,
        2,
        &[
            (vec![0, 0], 1.0),
            (vec![0, 1], 1.0),
            (vec![1, 0], 1.0),
            (vec![1, 1], -1.0),
        ],
    )
    .expect("static table")
}

/// Clauser-Horne functional in probability form, symmetrized: joint-outcome
/// coefficients on the standard pattern plus the marginal subtractions and
/// a constant 1/2 folded onto the (0,0) settings block, so the
/// deterministic range is [-1/2, +1/2] and the violation ratio coincides
/// with the CHSH ratio.
pub fn ch() -> BellFunctional {
    BellFunctional::probability(
        "ch",
        2,
        2,
        2,
        &[
            // P(++|00) + P(++|01) + P(++|10) - P(++|11)
            (vec![0, 0], vec![0, 0], 1.0),
            (vec![0, 1], vec![0, 0], 1.0),
            (vec![1, 0], vec![0, 0], 1.0),
            (vec![1, 1], vec![0, 0], -1.0),
            // -P_A(+|0) = -(P(++|00) + P(+-|00))
            (vec![0, 0], vec![0, 0], -1.0),
            (vec![0, 0], vec![0, 1], -1.0),
            // -P_B(+|0) = -(P(++|00) + P(-+|00))
            (vec![0, 0], vec![0, 0], -1.0),
            (vec![0, 0], vec![1, 0], -1.0),
            // +1/2, spread over the normalized (0,0) block
            (vec![0, 0], vec![0, 0], 0.5),
            (vec![0, 0], vec![0, 1], 0.5),
            (vec![0, 0], vec![1, 0], 0.5),
            (vec![0, 0], vec![1, 1], 0.5),
        ],
    )
    .expect("static table")
}

/// Mermin-Klyshko correlation functional from the recursion
/// `B_n = (1/2) B_{n-1}(A_n + A'_n) + (1/2) B'_{n-1}(A_n - A'_n)` with
/// `B_1 = A_1` and primes denoting the settings swap. With this
/// normalization the classical bound is 1 for every `N` and `B_2` is
/// CHSH/2.
pub fn mermin_klyshko(num_sites: usize) -> Result<BellFunctional> {
    if !(2..=MAX_MK_SITES).contains(&num_sites) {
        return Err(BellError::MkSitesOutOfRange(num_sites));
    }
    let mut b = vec![1.0, 0.0];
    let mut bp = vec![0.0, 1.0];
    for _ in 2..=num_sites {
        let len = b.len();
        let mut nb = vec![0.0; len * 2];
        let mut nbp = vec![0.0; len * 2];
        for idx in 0..len {
            nb[idx * 2] = 0.5 * (b[idx] + bp[idx]);
            nb[idx * 2 + 1] = 0.5 * (b[idx] - bp[idx]);
            nbp[idx * 2] = 0.5 * (bp[idx] - b[idx]);
            nbp[idx * 2 + 1] = 0.5 * (bp[idx] + b[idx]);
        }
        b = nb;
        bp = nbp;
    }
    let radix = MixedRadix::new(vec![2; num_sites]);
    let entries: Vec<(Vec<usize>, f64)> = b
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0.0)
        .map(|(idx, &c)| (radix.decode(idx), c))
        .collect();
    BellFunctional::correlation(format!("mk{num_sites}"), num_sites, 2, &entries)
}

/// Named functional presets: `chsh`, `ch`, `mk2` … `mk6`.
pub fn functional_preset(name: &str) -> Option<BellFunctional> {
    match name {
        "chsh" => Some(chsh()),
        "ch" => Some(ch()),
        "mk2" | "mk3" | "mk4" | "mk5" | "mk6" => {
            let n: usize = name[2..].parse().ok()?;
            mermin_klyshko(n).ok()
        }
        _ => None,
    }
}

fn observable(h: HermitianMatrix) -> Observable {
    Observable::new(h, DEFAULT_CLUSTER_TOL).expect("valid observable")
}

/// `cos(theta) X + sin(theta) Y`.
fn xy_observable(theta: f64) -> Observable {
    let z = C64::new(0.0, 0.0);
    let m = CMat::from_row_slice(
        2,
        2,
        &[
            z,
            C64::new(theta.cos(), -theta.sin()),
            C64::new(theta.cos(), theta.sin()),
            z,
        ],
    );
    observable(HermitianMatrix::new(m).expect("hermitian by construction"))
}

/// Settings maximizing the CHSH value (+2√2) on the singlet:
/// A = {Z, X}, B = {-(Z+X)/√2, (X-Z)/√2}.
pub fn optimal_chsh_settings() -> SettingList {
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    let z = crate::qlinalg::pauli_z();
    let x = crate::qlinalg::pauli_x();
    let b1 = HermitianMatrix::from_arithmetic((z.entries() + x.entries()) * C64::new(-inv, 0.0));
    let b2 = HermitianMatrix::from_arithmetic((x.entries() - z.entries()) * C64::new(inv, 0.0));
    vec![
        vec![observable(z), observable(x)],
        vec![observable(b1), observable(b2)],
    ]
}

/// Settings attaining the Mermin-Klyshko value `2^{(N-1)/2}` on the
/// N-qubit GHZ state: equatorial observables X and Y at every site, with
/// the first site's pair rotated by `-(N-1)π/4`.
pub fn optimal_mk_settings(num_sites: usize) -> Result<SettingList> {
    if !(2..=MAX_MK_SITES).contains(&num_sites) {
        return Err(BellError::MkSitesOutOfRange(num_sites));
    }
    let theta = -(num_sites as f64 - 1.0) * std::f64::consts::FRAC_PI_4;
    let mut settings = vec![vec![
        xy_observable(theta),
        xy_observable(theta + std::f64::consts::FRAC_PI_2),
    ]];
    for _ in 1..num_sites {
        settings.push(vec![
            xy_observable(0.0),
            xy_observable(std::f64::consts::FRAC_PI_2),
        ]);
    }
    Ok(settings)
}

/// Random ±1-spectrum observables (the spectral sign of a traceless random
/// Hermitian draw), suitable as see-saw starting points. The traceless
/// shift keeps both signs in the spectrum, so no draw degenerates to ±I.
pub fn random_dichotomic_settings<R: Rng + ?Sized>(
    num_sites: usize,
    num_settings: usize,
    local_dim: usize,
    rng: &mut R,
) -> SettingList {
    (0..num_sites)
        .map(|_| {
            (0..num_settings)
                .map(|_| {
                    let h = random_hermitian(local_dim, rng);
                    let shift = h.entries().trace() / C64::new(local_dim as f64, 0.0);
                    let traceless =
                        h.entries() - CMat::identity(local_dim, local_dim) * shift;
                    sign_observable(&traceless)
                })
                .collect()
        })
        .collect()
}
