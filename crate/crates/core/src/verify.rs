//! Seeded randomized property suites.
//!
//! Each suite draws independent instances from a documented sampler, checks
//! one or more claims per instance and folds the outcomes into a
//! [`SuiteReport`]. Trial `t` of a run with seed `s` depends only on
//! `derive_seed(s, suite, t)`, so reports are reproducible bit for bit and
//! every recorded instance can be replayed on its own.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{
    damping_incoherent_channel, generalized_cnot, incoherent_channel, partial_incoherent_channel, KrausChannel,
};
use crate::error::{Error, Result};
use crate::linalg::{haar_unitary, kron, random_hermitian, ComplexMatrix};
use crate::measurements::{LuedersMeasurement, VonNeumannMeasurement};
use crate::measures::{
    coherence_qfi, coherence_skew, partial_coherence_skew, quantum_fisher_information, skew_information,
};
use crate::optim::{discord_value, partial_coherence_supremum, CoherenceTag, OptimizerConfig, SearchBudget};
use crate::rng::{self, StreamRng};
use crate::states::{
    classical_quantum_state, dephase, mixed_induced, BipartiteState, DensityMatrix,
};

/// Counterexamples kept per report.
pub const MAX_COUNTEREXAMPLES: usize = 10;
/// Stream tag for optimizer seeds inside a trial.
const OPT_STREAM: u64 = 0x0E7;
/// Starts used by the nested supremum searches of `theorem3_consistency`.
const THEOREM3_STARTS: usize = 8;
/// Coherence floor for the product-state sampler of `theorem2_creation`.
const CREATION_MIN_COHERENCE: f64 = 1e-3;
const THEOREM3_BUDGET: SearchBudget = SearchBudget {
    random_channels: 8,
    ascent_iterations: 8,
    inner_starts: 3,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Theorem1,
    Theorem2Noncreation,
    Theorem2Creation,
    Eq4Additivity,
    LocalUnitaryInvariance,
    ZeroDiscordLocalization,
    MonotonicityPartial,
    Convexity,
    SkewQfiSandwich,
    Eq5Flag,
    CfMonotonicitySearch,
    Theorem3Consistency,
}

/// How a suite's outcome is to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteKind {
    /// Checks a proved fact; any violation is a failure.
    Proved,
    /// Bookkeeping only; recorded instances carry no pass/fail meaning.
    Reporting,
    /// Violations are flagged for inspection but do not fail.
    Flagging,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::Theorem1,
        Suite::Theorem2Noncreation,
        Suite::Theorem2Creation,
        Suite::Eq4Additivity,
        Suite::LocalUnitaryInvariance,
        Suite::ZeroDiscordLocalization,
        Suite::MonotonicityPartial,
        Suite::Convexity,
        Suite::SkewQfiSandwich,
        Suite::Eq5Flag,
        Suite::CfMonotonicitySearch,
        Suite::Theorem3Consistency,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Theorem1 => "theorem1",
            Suite::Theorem2Noncreation => "theorem2_noncreation",
            Suite::Theorem2Creation => "theorem2_creation",
            Suite::Eq4Additivity => "eq4_additivity",
            Suite::LocalUnitaryInvariance => "local_unitary_invariance",
            Suite::ZeroDiscordLocalization => "zero_discord_localization",
            Suite::MonotonicityPartial => "monotonicity_partial",
            Suite::Convexity => "convexity",
            Suite::SkewQfiSandwich => "skew_qfi_sandwich",
            Suite::Eq5Flag => "eq5_flag",
            Suite::CfMonotonicitySearch => "cf_monotonicity_search",
            Suite::Theorem3Consistency => "theorem3_consistency",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }

    pub fn kind(self) -> SuiteKind {
        match self {
            Suite::Theorem2Creation | Suite::CfMonotonicitySearch => SuiteKind::Reporting,
            Suite::Theorem3Consistency => SuiteKind::Flagging,
            _ => SuiteKind::Proved,
        }
    }

    /// Checked claims with their default tolerances; the first is the
    /// suite's headline tolerance.
    fn checks(self) -> Vec<CheckSpec> {
        let claim = |name, tol| CheckSpec {
            name,
            tol,
            mode: CheckMode::Claim,
        };
        match self {
            Suite::Theorem1 => vec![claim("discord_below_partial_coherence", 1e-7)],
            Suite::Theorem2Noncreation => vec![claim("no_discord_created", 1e-6)],
            Suite::Theorem2Creation => vec![CheckSpec {
                name: "discord_created",
                tol: 1e-6,
                mode: CheckMode::Search,
            }],
            Suite::Eq4Additivity => vec![claim("additivity", 1e-9)],
            Suite::LocalUnitaryInvariance => vec![claim("discord_invariant", 1e-6)],
            Suite::ZeroDiscordLocalization => vec![claim("localized_partial_coherence_zero", 1e-9)],
            Suite::MonotonicityPartial => vec![claim("partial_skew_nonincreasing", 1e-7)],
            Suite::Convexity => vec![claim("partial_skew_convex", 1e-9), claim("qfi_convex", 1e-9)],
            Suite::SkewQfiSandwich => vec![claim("skew_below_qfi", 1e-9), claim("qfi_below_twice_skew", 1e-9)],
            Suite::Eq5Flag => vec![
                claim("equality", 1e-5),
                claim("inequality", 1e-6),
                claim("flagged_mixture_above_average", 1e-6),
            ],
            Suite::CfMonotonicitySearch => vec![claim("qfi_nonincreasing", 1e-9)],
            Suite::Theorem3Consistency => vec![claim("weak_bound_nonincreasing", 1e-3)],
        }
    }

    pub fn default_tolerance(self) -> f64 {
        self.checks()[0].tol
    }

    pub fn default_dims(self) -> Dims {
        match self {
            Suite::Eq5Flag => Dims::new(2, 2, Some(2)),
            _ => Dims::new(2, 2, None),
        }
    }

    fn stream(self) -> u64 {
        Self::ALL.iter().position(|&s| s == self).expect("registered") as u64 + 1
    }

    /// Sampler and coverage description stored in the report.
    pub fn sampler_notes(self) -> &'static str {
        match self {
            Suite::Theorem1 => "states: induced mixed states of random rank on d_a*d_b; channels: block-permutation partial incoherent channels (1-3 Kraus operators, Haar isometry blocks) in the computational or a Haar-random a-basis (alternating); discord with 24 starts",
            Suite::Theorem2Noncreation => "states: Lueders-dephased induced mixed states; channels: block-permutation partial incoherent channels in the same a-basis (computational or Haar-random, alternating)",
            Suite::Theorem2Creation => "states: induced mixed states, rho_a (x) sigma_b products with coherent rho_a, and classical-quantum states in a Haar-random a-basis (rotating); search family: identity, generalized CNOT, 8 random partial incoherent channels; a trial where no member creates discord above tol is INCONCLUSIVE, not a violation",
            Suite::Eq4Additivity => "states: independent induced mixed states on a and b; a-basis computational or Haar-random (alternating)",
            Suite::LocalUnitaryInvariance => "states: induced mixed states of random rank; unitaries: independent Haar U_a, U_b",
            Suite::ZeroDiscordLocalization => "states: classical-quantum states with Haar-random a-basis, simplex weights and induced mixed b-states; check at the rotated computational basis",
            Suite::MonotonicityPartial => "states: induced mixed states of random rank; channels: block-permutation partial incoherent channels in the reference a-basis (computational or Haar-random, alternating)",
            Suite::Convexity => "pairs of induced mixed states with a uniform weight; partial skew on d_a*d_b with computational Lueders basis, C_F on d_a with a Haar-random basis",
            Suite::SkewQfiSandwich => "induced mixed states on d_a*d_b of random rank with Gaussian Hermitian observables and rank-one projectors (alternating)",
            Suite::Eq5Flag => "d_c components with simplex weights, induced mixed states on ab, orthogonal flags |i><i| on c appended to the b side; geometric discord with 24 starts on every term",
            Suite::CfMonotonicitySearch => "states: induced mixed states on d_a of random rank; channels: damping compositions (two of three trials) and permutation-phase mixtures; sampled incoherent channels do not cover the full incoherent set",
            Suite::Theorem3Consistency => "states: induced mixed states; Xi: block-permutation partial incoherent channel; both sides are heuristic lower bounds (8-start discord, 8-step controlled-unitary ascents with 3 inner starts, 8 random channels), so excess below the slack is shortfall, not a counterexample",
        }
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub d_a: usize,
    pub d_b: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d_c: Option<usize>,
}

impl Dims {
    pub fn new(d_a: usize, d_b: usize, d_c: Option<usize>) -> Self {
        Self { d_a, d_b, d_c }
    }

    fn validate(&self) -> Result<()> {
        if self.d_a < 2 || self.d_b < 1 || self.d_c.is_some_and(|c| c < 1) {
            return Err(Error::InvalidArgument(format!(
                "dims need d_a >= 2 and d_b, d_c >= 1, got {self:?}"
            )));
        }
        Ok(())
    }

    fn total(&self) -> usize {
        self.d_a * self.d_b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum CheckMode {
    /// Margin above tolerance is a violation.
    Claim,
    /// Margin is `tol - best`; a non-negative margin means the search
    /// failed and the trial is inconclusive.
    Search,
}

#[derive(Debug, Clone, Copy)]
struct CheckSpec {
    name: &'static str,
    tol: f64,
    mode: CheckMode,
}

/// Per-check aggregate. `margin` is the amount by which a claim is broken
/// (positive = broken), `slack = -margin`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    pub tolerance: f64,
    pub violations: usize,
    pub max_violation_margin: f64,
    pub min_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub trial: usize,
    /// Seed of the trial's own stream; replays the instance standalone.
    pub seed: u64,
    pub check: String,
    pub margin: f64,
    pub state: ComplexMatrix,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub channel: Option<Vec<ComplexMatrix>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub kind: SuiteKind,
    pub trials: usize,
    /// Trials where some claim's margin exceeds its tolerance.
    pub violations: usize,
    /// Trials where a search found nothing (never counted as violations).
    pub inconclusive: usize,
    pub max_violation_margin: f64,
    pub min_slack: f64,
    pub seed: u64,
    pub dims: Dims,
    pub tolerance: f64,
    pub notes: String,
    pub checks: Vec<CheckSummary>,
    pub counterexamples: Vec<Counterexample>,
}

impl SuiteReport {
    /// False only for a proved-fact suite with violations.
    pub fn passed(&self) -> bool {
        self.kind != SuiteKind::Proved || self.violations == 0
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Result of one trial: one margin per check plus the instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub margins: Vec<f64>,
    pub state: ComplexMatrix,
    pub channel: Option<Vec<ComplexMatrix>>,
}

fn random_state(rng: &mut StreamRng, d: usize) -> DensityMatrix {
    let rank = rng.random_range(1..=d);
    mixed_induced(rng, d, rank)
}

fn random_bipartite(rng: &mut StreamRng, dims: &Dims) -> BipartiteState {
    BipartiteState::new(random_state(rng, dims.total()), dims.d_a, dims.d_b).expect("dims match")
}

/// Computational basis on even trials, Haar-random on odd ones.
fn reference_basis(rng: &mut StreamRng, d: usize, alternate: bool) -> VonNeumannMeasurement {
    if alternate {
        VonNeumannMeasurement::from_unitary(&haar_unitary(rng, d)).expect("Haar unitary")
    } else {
        VonNeumannMeasurement::computational(d)
    }
}

fn kraus_of(ch: &KrausChannel) -> Option<Vec<ComplexMatrix>> {
    Some(ch.kraus().to_vec())
}

struct Trial<'a> {
    suite: Suite,
    dims: &'a Dims,
    index: usize,
    seed: u64,
}

impl Trial<'_> {
    fn cfg(&self, starts: usize) -> OptimizerConfig {
        OptimizerConfig {
            starts,
            ..OptimizerConfig::with_seed(rng::derive_seed(self.seed, OPT_STREAM, 0))
        }
    }

    fn run(&self, tol: &[f64]) -> Result<TrialOutcome> {
        let mut r = rng::seeded(self.seed);
        let dims = self.dims;
        let odd = self.index % 2 == 1;
        let full = OptimizerConfig::default().starts;
        let outcome = |margins: Vec<f64>, state: &ComplexMatrix, channel: Option<Vec<ComplexMatrix>>| TrialOutcome {
            margins,
            state: state.clone(),
            channel,
        };
        match self.suite {
            Suite::Theorem1 | Suite::MonotonicityPartial => {
                let rho = random_bipartite(&mut r, dims);
                let basis = reference_basis(&mut r, dims.d_a, odd);
                let lueders = basis.lueders_extend(dims.d_b);
                let ch = partial_incoherent_channel(&mut r, &basis, dims.d_b);
                let out = ch.apply_bipartite(&rho)?;
                let before = partial_coherence_skew(&rho, &lueders)?.value;
                let after = if self.suite == Suite::Theorem1 {
                    discord_value(&out, &self.cfg(full))?
                } else {
                    partial_coherence_skew(&out, &lueders)?.value
                };
                Ok(outcome(vec![after - before], rho.matrix(), kraus_of(&ch)))
            }
            Suite::Theorem2Noncreation => {
                let basis = reference_basis(&mut r, dims.d_a, odd);
                let lueders = basis.lueders_extend(dims.d_b);
                let raw = random_bipartite(&mut r, dims);
                let rho = raw.with_state(dephase(raw.state(), &lueders)?)?;
                let ch = partial_incoherent_channel(&mut r, &basis, dims.d_b);
                let q = discord_value(&ch.apply_bipartite(&rho)?, &self.cfg(full))?;
                Ok(outcome(vec![q], rho.matrix(), kraus_of(&ch)))
            }
            Suite::Theorem2Creation => self.creation(&mut r, tol[0]),
            Suite::Eq4Additivity => {
                let ra = random_state(&mut r, dims.d_a);
                let rb = random_state(&mut r, dims.d_b);
                let basis = reference_basis(&mut r, dims.d_a, odd);
                let rho = BipartiteState::product(&ra, &rb);
                let lhs = partial_coherence_skew(&rho, &basis.lueders_extend(dims.d_b))?.value;
                let rhs = coherence_skew(&ra, &basis)?.value;
                Ok(outcome(vec![(lhs - rhs).abs()], rho.matrix(), None))
            }
            Suite::LocalUnitaryInvariance => {
                let rho = random_bipartite(&mut r, dims);
                let ua = haar_unitary(&mut r, dims.d_a);
                let ub = haar_unitary(&mut r, dims.d_b);
                let rotated = rho.local_unitary(&ua, &ub)?;
                let cfg = self.cfg(full);
                let diff = discord_value(&rho, &cfg)? - discord_value(&rotated, &cfg)?;
                let u = kron(&ua, &ub);
                Ok(outcome(vec![diff.abs()], rho.matrix(), Some(vec![u])))
            }
            Suite::ZeroDiscordLocalization => {
                let u = haar_unitary(&mut r, dims.d_a);
                let basis = VonNeumannMeasurement::from_unitary(&u)?;
                let n = r.random_range(1..=dims.d_a);
                let p = rng::simplex(&mut r, n);
                let bs: Vec<DensityMatrix> = (0..n).map(|_| random_state(&mut r, dims.d_b)).collect();
                let rho = classical_quantum_state(&p, &basis, &bs)?;
                let localized = rho.local_unitary(&u.dagger(), &ComplexMatrix::identity(dims.d_b))?;
                let c = partial_coherence_skew(&localized, &LuedersMeasurement::computational(dims.d_a, dims.d_b))?;
                Ok(outcome(vec![c.value], rho.matrix(), Some(vec![kron(&u.dagger(), &ComplexMatrix::identity(dims.d_b))])))
            }
            Suite::Convexity => {
                let a = random_bipartite(&mut r, dims);
                let b = random_bipartite(&mut r, dims);
                let w: f64 = r.random();
                let lueders = LuedersMeasurement::computational(dims.d_a, dims.d_b);
                let mix = a.with_state(a.state().mix(b.state(), w)?)?;
                let cs = |x: &BipartiteState| partial_coherence_skew(x, &lueders).map(|v| v.value);
                let skew_margin = cs(&mix)? - (w * cs(&a)? + (1.0 - w) * cs(&b)?);

                let sa = random_state(&mut r, dims.d_a);
                let sb = random_state(&mut r, dims.d_a);
                let basis = reference_basis(&mut r, dims.d_a, true);
                let cf = |x: &DensityMatrix| coherence_qfi(x, &basis).map(|v| v.value);
                let qfi_margin = cf(&sa.mix(&sb, w)?)? - (w * cf(&sa)? + (1.0 - w) * cf(&sb)?);
                Ok(outcome(vec![skew_margin, qfi_margin], mix.matrix(), None))
            }
            Suite::SkewQfiSandwich => {
                let d = dims.total();
                let sigma = random_state(&mut r, d);
                let k = if odd {
                    ComplexMatrix::outer(&haar_unitary(&mut r, d).column(0))
                } else {
                    random_hermitian(&mut r, d)
                };
                let i = skew_information(&sigma, &k)?;
                let f = quantum_fisher_information(&sigma, &k)?;
                Ok(outcome(vec![i - f, f - 2.0 * i], sigma.matrix(), Some(vec![k])))
            }
            Suite::Eq5Flag => self.eq5(&mut r),
            Suite::CfMonotonicitySearch => {
                let d = dims.d_a;
                let rho = random_state(&mut r, d);
                let ch = if self.index % 3 == 2 {
                    let n = r.random_range(1..=3);
                    incoherent_channel(&mut r, d, n)
                } else {
                    let steps = r.random_range(1..=3);
                    damping_incoherent_channel(&mut r, d, steps)
                };
                let basis = VonNeumannMeasurement::computational(d);
                let margin = coherence_qfi(&ch.apply(&rho)?, &basis)?.value - coherence_qfi(&rho, &basis)?.value;
                Ok(outcome(vec![margin], rho.matrix(), kraus_of(&ch)))
            }
            Suite::Theorem3Consistency => {
                let rho = random_bipartite(&mut r, dims);
                let lueders = LuedersMeasurement::computational(dims.d_a, dims.d_b);
                let xi = partial_incoherent_channel(&mut r, lueders.local(), dims.d_b);
                let cfg = self.cfg(THEOREM3_STARTS);
                let bound = |x: &BipartiteState| {
                    partial_coherence_supremum(x, &lueders, &cfg, CoherenceTag::Skew, THEOREM3_BUDGET).map(|b| b.value)
                };
                let before = bound(&rho)?;
                let after = bound(&xi.apply_bipartite(&rho)?)?;
                Ok(outcome(vec![after - before], rho.matrix(), kraus_of(&xi)))
            }
        }
    }

    fn creation(&self, r: &mut StreamRng, tol: f64) -> Result<TrialOutcome> {
        let dims = self.dims;
        let rho = match self.index % 3 {
            0 => random_bipartite(r, dims),
            1 => {
                let mut ra = random_state(r, dims.d_a);
                let comp = VonNeumannMeasurement::computational(dims.d_a);
                // Redraw nearly incoherent marginals; a few draws always suffice.
                for _ in 0..64 {
                    if coherence_skew(&ra, &comp)?.value > CREATION_MIN_COHERENCE {
                        break;
                    }
                    ra = random_state(r, dims.d_a);
                }
                BipartiteState::product(&ra, &random_state(r, dims.d_b))
            }
            _ => {
                let basis = VonNeumannMeasurement::from_unitary(&haar_unitary(r, dims.d_a))?;
                let p = rng::simplex(r, dims.d_a);
                let bs: Vec<DensityMatrix> = (0..dims.d_a).map(|_| random_state(r, dims.d_b)).collect();
                classical_quantum_state(&p, &basis, &bs)?
            }
        };
        let cfg = self.cfg(OptimizerConfig::default().starts);
        let mut family = vec![KrausChannel::identity(dims.total()), generalized_cnot(dims.d_a, dims.d_b)];
        let comp = VonNeumannMeasurement::computational(dims.d_a);
        for _ in 0..crate::optim::SUP_RANDOM_CHANNELS {
            family.push(partial_incoherent_channel(r, &comp, dims.d_b));
        }
        let mut best = f64::NEG_INFINITY;
        let mut best_channel = None;
        for ch in &family {
            let q = discord_value(&ch.apply_bipartite(&rho)?, &cfg)?;
            if q > best {
                best = q;
                best_channel = kraus_of(ch);
            }
            if q > tol {
                break;
            }
        }
        Ok(TrialOutcome {
            margins: vec![tol - best],
            state: rho.matrix().clone(),
            channel: best_channel,
        })
    }

    fn eq5(&self, r: &mut StreamRng) -> Result<TrialOutcome> {
        let dims = self.dims;
        let n = dims.d_c.unwrap_or(2);
        let p = rng::simplex(r, n);
        let parts: Vec<BipartiteState> = (0..n).map(|_| random_bipartite(r, dims)).collect();
        let cfg = self.cfg(OptimizerConfig::default().starts);
        let flagged = |rho: &BipartiteState, i: usize| -> Result<BipartiteState> {
            BipartiteState::new(
                rho.state().tensor(&flag_state(n, i)),
                dims.d_a,
                dims.d_b * n,
            )
        };
        let mut mixture = ComplexMatrix::zeros(dims.total() * n, dims.total() * n);
        let (mut mid, mut avg) = (0.0, 0.0);
        for (i, (pi, rho)) in p.iter().zip(&parts).enumerate() {
            let f = flagged(rho, i)?;
            mixture = &mixture + &f.matrix().scale_real(*pi);
            mid += pi * discord_value(&f, &cfg)?;
            avg += pi * discord_value(rho, &cfg)?;
        }
        let mixed = BipartiteState::new(
            DensityMatrix::from_trusted(mixture.clone()),
            dims.d_a,
            dims.d_b * n,
        )?;
        let lhs = discord_value(&mixed, &cfg)?;
        Ok(TrialOutcome {
            margins: vec![(lhs - mid).abs(), avg - mid, avg - lhs],
            state: mixture,
            channel: None,
        })
    }
}

fn flag_state(n: usize, i: usize) -> DensityMatrix {
    let mut v = vec![crate::linalg::C64::new(0.0, 0.0); n];
    v[i] = crate::linalg::C64::new(1.0, 0.0);
    DensityMatrix::pure(&v).expect("unit vector")
}

/// Seed of trial `index` in a run with base `seed`.
pub fn trial_seed(suite: Suite, seed: u64, index: usize) -> u64 {
    rng::derive_seed(seed, suite.stream(), index as u64)
}

fn resolve_dims(suite: Suite, dims: Dims) -> Dims {
    match suite {
        Suite::Eq5Flag if dims.d_c.is_none() => Dims { d_c: Some(2), ..dims },
        _ => dims,
    }
}

/// Runs one trial standalone from its seed.
pub fn run_trial(suite: Suite, dims: Dims, index: usize, seed: u64, tol: Option<f64>) -> Result<TrialOutcome> {
    let dims = resolve_dims(suite, dims);
    dims.validate()?;
    let tols: Vec<f64> = suite.checks().iter().map(|c| tol.unwrap_or(c.tol)).collect();
    Trial {
        suite,
        dims: &dims,
        index,
        seed,
    }
    .run(&tols)
}

/// Executes `trials` independent instances of `suite`.
///
/// `tol` overrides the default tolerance of every check in the suite.
pub fn run_suite(suite: Suite, trials: usize, dims: Dims, seed: u64, tol: Option<f64>) -> Result<SuiteReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    if let Some(t) = tol.filter(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidArgument(format!("tolerance must be finite and >= 0, got {t}")));
    }
    let dims = resolve_dims(suite, dims);
    dims.validate()?;
    let specs: Vec<CheckSpec> = suite
        .checks()
        .into_iter()
        .map(|c| CheckSpec {
            tol: tol.unwrap_or(c.tol),
            ..c
        })
        .collect();
    let tols: Vec<f64> = specs.iter().map(|c| c.tol).collect();
    let outcomes: Vec<Result<TrialOutcome>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            Trial {
                suite,
                dims: &dims,
                index: t,
                seed: trial_seed(suite, seed, t),
            }
            .run(&tols)
        })
        .collect();

    let mut checks: Vec<CheckSummary> = specs
        .iter()
        .map(|c| CheckSummary {
            name: c.name.to_string(),
            tolerance: c.tol,
            violations: 0,
            max_violation_margin: f64::NEG_INFINITY,
            min_slack: f64::INFINITY,
        })
        .collect();
    let (mut violations, mut inconclusive) = (0, 0);
    let mut counterexamples = Vec::new();
    for (t, outcome) in outcomes.into_iter().enumerate() {
        let outcome = outcome?;
        let (mut violated, mut failed_search) = (false, false);
        // Check with the largest excess over its tolerance.
        let mut worst: Option<(usize, f64)> = None;
        for (k, (spec, &m)) in specs.iter().zip(&outcome.margins).enumerate() {
            let s = &mut checks[k];
            s.max_violation_margin = s.max_violation_margin.max(m);
            s.min_slack = s.min_slack.min(-m);
            // Search margins already have the threshold folded in.
            let threshold = match spec.mode {
                CheckMode::Claim => spec.tol,
                CheckMode::Search => 0.0,
            };
            if m > threshold || (spec.mode == CheckMode::Search && m == 0.0) {
                s.violations += 1;
                match spec.mode {
                    CheckMode::Claim => violated = true,
                    CheckMode::Search => failed_search = true,
                }
                if worst.is_none_or(|(_, excess)| m - threshold > excess) {
                    worst = Some((k, m - threshold));
                }
            }
        }
        violations += usize::from(violated);
        inconclusive += usize::from(failed_search);
        if let Some((k, _)) = worst {
            if counterexamples.len() < MAX_COUNTEREXAMPLES {
                counterexamples.push(Counterexample {
                    trial: t,
                    seed: trial_seed(suite, seed, t),
                    check: specs[k].name.to_string(),
                    margin: outcome.margins[k],
                    state: outcome.state,
                    channel: outcome.channel,
                });
            }
        }
    }
    let max_violation_margin = checks.iter().map(|c| c.max_violation_margin).fold(f64::NEG_INFINITY, f64::max);
    let min_slack = checks.iter().map(|c| c.min_slack).fold(f64::INFINITY, f64::min);
    Ok(SuiteReport {
        suite,
        kind: suite.kind(),
        trials,
        violations,
        inconclusive,
        max_violation_margin,
        min_slack,
        seed,
        dims,
        tolerance: specs[0].tol,
        notes: format!(
            "{}. Samplers reach subfamilies of the operation sets only.",
            suite.sampler_notes()
        ),
        checks,
        counterexamples,
    })
}

/// Re-executes a recorded instance and returns its margin for the recorded
/// check.
pub fn replay(report: &SuiteReport, cx: &Counterexample) -> Result<f64> {
    let outcome = run_trial(report.suite, report.dims, cx.trial, cx.seed, Some(report.tolerance))?;
    let k = report
        .checks
        .iter()
        .position(|c| c.name == cx.check)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown check {}", cx.check)))?;
    Ok(outcome.margins[k])
}
