//! Geometric discord as a minimum over local measurements, plus heuristic
//! lower bounds for the channel-supremum coherence families.
//!
//! The discord objective at a basis `{|u_i>}` of party a is
//!
//! `f = tr(rho) - sum_i ||M_i||_F^2`,  `M_i = (<u_i| (x) I) sqrt(rho) (|u_i> (x) I)`,
//!
//! which equals `sum_i I(rho, |u_i><u_i| (x) I)` and needs one square root per
//! state instead of one eigendecomposition per evaluation.

use nalgebra::{Matrix3, SymmetricEigen};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{controlled_unitary, damping_incoherent_channel, incoherent_channel, partial_incoherent_channel, KrausChannel};
use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{expm_anti_hermitian, haar_unitary, kron, pauli, shift, ComplexMatrix, C64};
use crate::measurements::{anti_hermitian_from_params, LuedersMeasurement, VonNeumannMeasurement};
use crate::measures::{coherence_qfi, partial_coherence_qfi, Spectrum, NEGATIVE_CLIP};
use crate::rng;
use crate::states::{attach_ancilla, dephase_matrix, BipartiteState, DensityMatrix};

const DISCORD_STREAM: u64 = 0x00D1_5C0D;
const SUPREMUM_STREAM: u64 = 0x5A9_0001;
const QFI_SUP_STREAM: u64 = 0x5A9_0002;

/// Central-difference step for numerical gradients.
const GRADIENT_STEP: f64 = 1e-6;
const ARMIJO: f64 = 1e-4;
/// Longest parameter move per iteration (radians of chart coordinates).
const MAX_MOVE: f64 = std::f64::consts::PI;
/// Values closer than this are ties, broken by the parameter vector.
pub const TIE_TOL: f64 = 1e-12;

/// Random partial incoherent channels tried by the supremum searches.
pub const SUP_RANDOM_CHANNELS: usize = 8;
/// Slack for the non-decrease check across ancilla dimensions.
pub const MONOTONE_SLACK: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub starts: usize,
    pub max_iterations: usize,
    pub value_tolerance: f64,
    pub parameter_tolerance: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            starts: 24,
            max_iterations: 500,
            value_tolerance: 1e-9,
            parameter_tolerance: 1e-8,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 || self.max_iterations == 0 {
            return Err(Error::InvalidArgument("starts and max_iterations must be >= 1".into()));
        }
        if !(self.value_tolerance > 0.0 && self.parameter_tolerance > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Outcome of one local descent.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMinimum {
    pub params: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn gradient(f: &impl Fn(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|k| {
            probe[k] = x[k] + GRADIENT_STEP;
            let up = f(&probe);
            probe[k] = x[k] - GRADIENT_STEP;
            let down = f(&probe);
            probe[k] = x[k];
            (up - down) / (2.0 * GRADIENT_STEP)
        })
        .collect()
}

/// Steepest descent with central-difference gradients and a backtracking
/// line search (halving, Armijo condition). The trial step starts at twice
/// the last accepted one. Stops when an accepted step improves the value by
/// at most `value_tolerance` or moves the parameters by at most
/// `parameter_tolerance`, or when no descent step can be found.
pub fn steepest_descent(f: impl Fn(&[f64]) -> f64, x0: Vec<f64>, cfg: &OptimizerConfig) -> LocalMinimum {
    let n = x0.len();
    let (params, value, iterations, converged) = descend(
        |x: &Vec<f64>, dx: &[f64]| f(&shifted(x, dx)),
        |x: &Vec<f64>, dx: &[f64]| shifted(x, dx),
        n,
        x0,
        cfg,
    );
    LocalMinimum {
        params,
        value,
        iterations,
        converged,
    }
}

fn shifted(x: &[f64], dx: &[f64]) -> Vec<f64> {
    x.iter().zip(dx).map(|(a, b)| a + b).collect()
}

/// The descent loop on a point type `P` with local coordinates `dx` around
/// each iterate: `f(p, dx)` evaluates the objective and `step(p, dx)` moves.
fn descend<P>(
    f: impl Fn(&P, &[f64]) -> f64,
    step_to: impl Fn(&P, &[f64]) -> P,
    n: usize,
    p0: P,
    cfg: &OptimizerConfig,
) -> (P, f64, usize, bool) {
    let origin = vec![0.0; n];
    let mut p = p0;
    let mut fx = f(&p, &origin);
    let mut step: f64 = 1.0;
    for it in 0..cfg.max_iterations {
        let g = gradient(&|dx: &[f64]| f(&p, dx), &origin);
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gnorm == 0.0 || !gnorm.is_finite() {
            return (p, fx, it, true);
        }
        let mut t = (2.0 * step).min(MAX_MOVE / gnorm);
        let (dx, ft) = loop {
            let dx: Vec<f64> = g.iter().map(|gi| -t * gi).collect();
            let ft = f(&p, &dx);
            if ft <= fx - ARMIJO * t * gnorm * gnorm {
                break (dx, ft);
            }
            t *= 0.5;
            if t * gnorm <= 1e-3 * cfg.parameter_tolerance {
                return (p, fx, it, true);
            }
        };
        let (moved, gained) = (t * gnorm, fx - ft);
        p = step_to(&p, &dx);
        fx = ft;
        step = t;
        if gained <= cfg.value_tolerance || moved <= cfg.parameter_tolerance {
            return (p, fx, it, true);
        }
    }
    (p, fx, cfg.max_iterations, false)
}

/// Steepest descent over bases of `C^d`. Each iteration works in the chart
/// `x -> U exp(A(x))` centred at the current basis `U`, so no point of the
/// group is a coordinate singularity.
pub fn unitary_descent(
    f: impl Fn(&ComplexMatrix) -> f64,
    u0: ComplexMatrix,
    cfg: &OptimizerConfig,
) -> (ComplexMatrix, LocalMinimum) {
    let d = u0.rows();
    let moved = |u: &ComplexMatrix, dx: &[f64]| {
        if dx.iter().all(|&v| v == 0.0) {
            u.clone()
        } else {
            u * &expm_anti_hermitian(&anti_hermitian_from_params(d, dx))
        }
    };
    let (u, value, iterations, converged) = descend(|u, dx| f(&moved(u, dx)), moved, d * d, u0, cfg);
    let params = flatten(&u);
    (
        u,
        LocalMinimum {
            params,
            value,
            iterations,
            converged,
        },
    )
}

/// `[re, im]` entries row by row; used to order equal-value minima.
fn flatten(u: &ComplexMatrix) -> Vec<f64> {
    u.as_slice().iter().flat_map(|z| [z.re, z.im]).collect()
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Lowest value; ties within [`TIE_TOL`] go to the lexicographically
/// smallest parameter vector.
fn select_best(runs: &[&LocalMinimum]) -> usize {
    let best = runs.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
    (0..runs.len())
        .filter(|&k| runs[k].value <= best + TIE_TOL)
        .min_by(|&a, &b| lex_cmp(&runs[a].params, &runs[b].params))
        .expect("at least one run")
}

fn clip(value: f64) -> f64 {
    if (-NEGATIVE_CLIP..0.0).contains(&value) {
        0.0
    } else {
        value
    }
}

/// Precomputed `sqrt(rho)` for repeated evaluation of the discord objective.
struct DiscordObjective {
    root: ComplexMatrix,
    trace: f64,
    d_a: usize,
    d_b: usize,
}

impl DiscordObjective {
    fn new(rho: &BipartiteState) -> Self {
        Self {
            root: Spectrum::of(rho.matrix()).sqrt(),
            trace: rho.matrix().trace().re,
            d_a: rho.d_a(),
            d_b: rho.d_b(),
        }
    }

    /// Objective at the basis given by the columns of `u`.
    fn at(&self, u: &ComplexMatrix) -> f64 {
        let (d_a, d_b) = (self.d_a, self.d_b);
        let s = &self.root;
        let mut kept = 0.0;
        for i in 0..d_a {
            let v = u.column(i);
            for j in 0..d_b {
                for k in 0..d_b {
                    let mut m = C64::new(0.0, 0.0);
                    for a in 0..d_a {
                        let mut row = C64::new(0.0, 0.0);
                        for a2 in 0..d_a {
                            row += s[(a * d_b + j, a2 * d_b + k)] * v[a2];
                        }
                        m += v[a].conj() * row;
                    }
                    kept += m.norm_sqr();
                }
            }
        }
        self.trace - kept
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscordResult {
    pub value: f64,
    pub argmin_basis: VonNeumannMeasurement,
    /// `[re, im]` entries of the minimizing basis, row by row.
    pub params: Vec<f64>,
    pub starts_converged: usize,
    /// Closed-form qubit value, set when `d_a = 2`.
    pub oracle_value: Option<f64>,
}

/// Geometric discord `Q_G^a`: the minimum of `C_I^a(rho | Pi^a (x) I)` over
/// rank-one local measurements on party a.
///
/// Multi-start local search; start 0 is the computational basis, the others
/// come from `(cfg.seed, start index)`.
pub fn geometric_discord(rho: &BipartiteState, cfg: &OptimizerConfig) -> Result<DiscordResult> {
    cfg.validate()?;
    let obj = DiscordObjective::new(rho);
    let d_a = rho.d_a();
    let runs: Vec<(ComplexMatrix, LocalMinimum)> = (0..cfg.starts)
        .into_par_iter()
        .map(|s| {
            let u0 = if s == 0 {
                ComplexMatrix::identity(d_a)
            } else {
                haar_unitary(&mut rng::seeded(rng::derive_seed(cfg.seed, DISCORD_STREAM, s as u64)), d_a)
            };
            unitary_descent(|u| obj.at(u), u0, cfg)
        })
        .collect();
    let converged: Vec<&(ComplexMatrix, LocalMinimum)> = runs.iter().filter(|r| r.1.converged).collect();
    if converged.is_empty() {
        let best = runs.iter().map(|r| r.1.value).fold(f64::INFINITY, f64::min);
        return Err(Error::NotConverged { best: clip(best) });
    }
    let minima: Vec<&LocalMinimum> = converged.iter().map(|r| &r.1).collect();
    let (best_u, best) = converged[select_best(&minima)];
    let oracle_value = if rho.d_a() == 2 { Some(lqu_qubit_oracle(rho)?) } else { None };
    Ok(DiscordResult {
        value: clip(best.value),
        argmin_basis: VonNeumannMeasurement::from_unitary(best_u)?.with_label("argmin"),
        params: best.params.clone(),
        starts_converged: converged.len(),
        oracle_value,
    })
}

/// Discord value, falling back to the best partial value when no start
/// converged.
pub fn discord_value(rho: &BipartiteState, cfg: &OptimizerConfig) -> Result<f64> {
    match geometric_discord(rho, cfg) {
        Ok(r) => Ok(r.value),
        Err(Error::NotConverged { best }) => Ok(best),
        Err(e) => Err(e),
    }
}

/// Discord objective at one fixed local measurement, evaluated in the norm
/// form `||sqrt(rho) - Pi_L(sqrt(rho))||_F^2`.
pub fn discord_norm_form(rho: &BipartiteState, lueders: &LuedersMeasurement) -> Result<f64> {
    lueders.check_dim(rho.matrix().dim())?;
    let root = Spectrum::of(rho.matrix()).sqrt();
    let residual = &root - &dephase_matrix(&root, lueders);
    Ok(residual.frobenius_norm().powi(2))
}

/// Closed form for `d_a = 2`: `1/2 (tr rho - lambda_max(W))` with
/// `W_uv = tr(sqrt(rho) (s_u (x) I) sqrt(rho) (s_v (x) I))`.
pub fn lqu_qubit_oracle(rho: &BipartiteState) -> Result<f64> {
    if rho.d_a() != 2 {
        return Err(dim_mismatch("d_a = 2", rho.d_a()));
    }
    let root = Spectrum::of(rho.matrix()).sqrt();
    let id = ComplexMatrix::identity(rho.d_b());
    let sk: Vec<ComplexMatrix> = pauli().iter().map(|p| &root * &kron(p, &id)).collect();
    let w = Matrix3::from_fn(|u, v| (&sk[u] * &sk[v]).trace().re);
    let w = (w + w.transpose()) * 0.5;
    let lmax = SymmetricEigen::new(w).eigenvalues.max();
    Ok(clip(0.5 * (rho.matrix().trace().re - lmax)))
}

/// Lower bound on a supremum over a finite search family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupremumBound {
    pub value: f64,
    /// Search family the bound was taken over.
    pub family: String,
    /// Member attaining `value`.
    pub best_member: String,
}

/// Size of the channel-supremum search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub random_channels: usize,
    /// Iterations of each controlled-unitary ascent.
    pub ascent_iterations: usize,
    /// Discord starts inside the ascent; members are rescored with the full config.
    pub inner_starts: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            random_channels: SUP_RANDOM_CHANNELS,
            ascent_iterations: 40,
            inner_starts: 4,
        }
    }
}

/// Quantity maximized over partial incoherent channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoherenceTag {
    /// Geometric discord of the output.
    Skew,
    /// `C_F^a` of the output.
    Qfi,
}

impl CoherenceTag {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "skew" => Some(Self::Skew),
            "qfi" => Some(Self::Qfi),
            _ => None,
        }
    }
}

struct SupremumSearch<'a> {
    rho: &'a BipartiteState,
    lueders: &'a LuedersMeasurement,
    cfg: OptimizerConfig,
    tag: CoherenceTag,
    budget: SearchBudget,
}

impl SupremumSearch<'_> {
    fn score(&self, ch: &KrausChannel, cfg: &OptimizerConfig) -> Result<f64> {
        let out = ch.apply_bipartite(self.rho)?;
        match self.tag {
            CoherenceTag::Skew => discord_value(&out, cfg),
            CoherenceTag::Qfi => Ok(partial_coherence_qfi(&out, self.lueders)?.value),
        }
    }

    /// `sum_i Pi_i (x) W_i exp(A(x_i))`.
    fn controlled(&self, base: &[ComplexMatrix], x: &[f64]) -> Result<KrausChannel> {
        let d_b = self.lueders.d_b();
        let n = d_b * d_b;
        let blocks: Vec<ComplexMatrix> = base
            .iter()
            .enumerate()
            .map(|(i, w)| w * &expm_anti_hermitian(&anti_hermitian_from_params(d_b, &x[i * n..(i + 1) * n])))
            .collect();
        controlled_unitary(self.lueders.local(), &blocks)
    }

    /// Local ascent over the controlled-unitary blocks starting at `base`.
    fn ascend(&self, base: &[ComplexMatrix]) -> Result<(f64, KrausChannel)> {
        let inner = OptimizerConfig {
            starts: self.cfg.starts.min(self.budget.inner_starts.max(1)),
            ..self.cfg
        };
        let outer = OptimizerConfig {
            max_iterations: self.budget.ascent_iterations.max(1),
            ..self.cfg
        };
        let n = base.len() * self.lueders.d_b().pow(2);
        let run = steepest_descent(
            |x| match self.controlled(base, x).and_then(|ch| self.score(&ch, &inner)) {
                Ok(v) => -v,
                Err(_) => f64::INFINITY,
            },
            vec![0.0; n],
            &outer,
        );
        let at_start = self.controlled(base, &vec![0.0; n])?;
        let at_end = self.controlled(base, &run.params)?;
        let (v0, v1) = (self.score(&at_start, &self.cfg)?, self.score(&at_end, &self.cfg)?);
        Ok(if v1 > v0 { (v1, at_end) } else { (v0, at_start) })
    }

    fn run(&self) -> Result<SupremumBound> {
        let (d_a, d_b) = (self.lueders.d_a(), self.lueders.d_b());
        let mut candidates: Vec<(f64, String)> = Vec::new();
        candidates.push((self.score(&KrausChannel::identity(d_a * d_b), &self.cfg)?, "identity".into()));

        let cnot: Vec<ComplexMatrix> = (0..d_a).map(|i| shift(d_b, i % d_b.max(1))).collect();
        let mut r = rng::seeded(rng::derive_seed(self.cfg.seed, SUPREMUM_STREAM, 0));
        let haar: Vec<ComplexMatrix> = (0..d_a).map(|_| haar_unitary(&mut r, d_b)).collect();
        let starts = [("controlled-unitary(cnot start)", cnot), ("controlled-unitary(haar start)", haar)];
        let ascents: Vec<Result<(f64, String)>> = starts
            .par_iter()
            .map(|(name, base)| self.ascend(base).map(|(v, _)| (v, (*name).to_string())))
            .collect();
        for a in ascents {
            candidates.push(a?);
        }

        let randoms: Vec<Result<(f64, String)>> = (0..self.budget.random_channels)
            .into_par_iter()
            .map(|k| {
                let mut r = rng::seeded(rng::derive_seed(self.cfg.seed, SUPREMUM_STREAM, 1 + k as u64));
                let ch = partial_incoherent_channel(&mut r, self.lueders.local(), d_b);
                Ok((self.score(&ch, &self.cfg)?, format!("random-partial-incoherent#{k}")))
            })
            .collect();
        for c in randoms {
            candidates.push(c?);
        }

        let (value, best_member) = candidates
            .into_iter()
            .fold((f64::NEG_INFINITY, String::new()), |acc, c| if c.0 > acc.0 { c } else { acc });
        Ok(SupremumBound {
            value,
            family: format!(
                "identity + controlled unitaries (cnot and haar starts, {}-step exp-chart ascent) + {} random partial incoherent channels",
                self.budget.ascent_iterations, self.budget.random_channels
            ),
            best_member,
        })
    }
}

/// Lower bound on the supremum of `tag` over partial incoherent channels
/// with an explicit search budget.
pub fn partial_coherence_supremum(
    rho: &BipartiteState,
    lueders: &LuedersMeasurement,
    cfg: &OptimizerConfig,
    tag: CoherenceTag,
    budget: SearchBudget,
) -> Result<SupremumBound> {
    cfg.validate()?;
    lueders.check_dim(rho.matrix().dim())?;
    SupremumSearch {
        rho,
        lueders,
        cfg: *cfg,
        tag,
        budget,
    }
    .run()
}

/// Lower bound on `sup_Lambda Q_G^a(Lambda(rho))` over partial incoherent
/// channels. Never claimed exact.
pub fn weak_partial_coherence_lb(
    rho: &BipartiteState,
    lueders: &LuedersMeasurement,
    cfg: &OptimizerConfig,
) -> Result<SupremumBound> {
    partial_coherence_supremum(rho, lueders, cfg, CoherenceTag::Skew, SearchBudget::default())
}

/// [`weak_partial_coherence_lb`] on `rho_a (x) |0><0|_b`.
pub fn weak_coherence_lb(
    rho_a: &DensityMatrix,
    basis: &VonNeumannMeasurement,
    d_b: usize,
    cfg: &OptimizerConfig,
) -> Result<SupremumBound> {
    if basis.dim() != rho_a.dim() {
        return Err(dim_mismatch(basis.dim(), rho_a.dim()));
    }
    weak_partial_coherence_lb(&attach_ancilla(rho_a, d_b)?, &basis.lueders_extend(d_b), cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrongEntry {
    pub d_b: usize,
    pub value: f64,
    pub best_member: String,
}

/// Per-ancilla-dimension lower bounds, reported without extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrongEstimate {
    pub tag: CoherenceTag,
    pub entries: Vec<StrongEntry>,
    /// False when a larger ancilla gave a smaller bound (optimizer shortfall).
    pub monotone: bool,
    pub family: String,
}

pub fn strong_coherence_estimate(
    rho_a: &DensityMatrix,
    basis: &VonNeumannMeasurement,
    d_b_list: &[usize],
    cfg: &OptimizerConfig,
    tag: CoherenceTag,
) -> Result<StrongEstimate> {
    if d_b_list.is_empty() || d_b_list.windows(2).any(|w| w[0] >= w[1]) || d_b_list[0] == 0 {
        return Err(Error::InvalidArgument("d_b list must be non-empty, positive and ascending".into()));
    }
    if basis.dim() != rho_a.dim() {
        return Err(dim_mismatch(basis.dim(), rho_a.dim()));
    }
    let mut entries = Vec::with_capacity(d_b_list.len());
    let mut family = String::new();
    for &d_b in d_b_list {
        let bound = partial_coherence_supremum(
            &attach_ancilla(rho_a, d_b)?,
            &basis.lueders_extend(d_b),
            cfg,
            tag,
            SearchBudget::default(),
        )?;
        family = bound.family;
        entries.push(StrongEntry {
            d_b,
            value: bound.value,
            best_member: bound.best_member,
        });
    }
    let monotone = entries.windows(2).all(|w| w[1].value >= w[0].value - MONOTONE_SLACK);
    Ok(StrongEstimate {
        tag,
        entries,
        monotone,
        family,
    })
}

/// Kraus operators rotated from the computational basis into `basis`.
fn rotate_channel(ch: &KrausChannel, basis: &VonNeumannMeasurement) -> Result<KrausChannel> {
    let ops = ch
        .kraus()
        .iter()
        .map(|k| k.conjugate_by(basis.basis()))
        .collect::<Result<Vec<_>>>()?;
    KrausChannel::new(ops)
}

/// Lower bound on `sup_Phi C_F(Phi(rho))` over incoherent channels: the
/// identity plus `cfg.starts` sampled channels, alternating permutation-phase
/// mixtures and damping compositions.
pub fn weak_coherence_qfi_lb(
    rho: &DensityMatrix,
    basis: &VonNeumannMeasurement,
    cfg: &OptimizerConfig,
) -> Result<SupremumBound> {
    cfg.validate()?;
    if basis.dim() != rho.dim() {
        return Err(dim_mismatch(basis.dim(), rho.dim()));
    }
    let d = rho.dim();
    let mut best = (coherence_qfi(rho, basis)?.value, "identity".to_string());
    let sampled: Vec<Result<(f64, String)>> = (0..cfg.starts)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::seeded(rng::derive_seed(cfg.seed, QFI_SUP_STREAM, k as u64));
            let (ch, name) = if k % 2 == 0 {
                let n = r.random_range(1..=3);
                (incoherent_channel(&mut r, d, n), format!("permutation-phase#{k}"))
            } else {
                let steps = r.random_range(1..=3);
                (damping_incoherent_channel(&mut r, d, steps), format!("damping#{k}"))
            };
            let ch = rotate_channel(&ch, basis)?;
            Ok((coherence_qfi(&ch.apply(rho)?, basis)?.value, name))
        })
        .collect();
    for s in sampled {
        let s = s?;
        if s.0 > best.0 {
            best = s;
        }
    }
    Ok(SupremumBound {
        value: best.0,
        family: format!(
            "identity + {} incoherent channels (permutation-phase mixtures and damping compositions)",
            cfg.starts
        ),
        best_member: best.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, random_haar_unitary};
    use crate::measures::{coherence_skew, partial_coherence_skew, skew_information};
    use crate::states::{classical_quantum_state, mixed_induced, tests::bell};
    use approx::assert_abs_diff_eq;

    fn plus() -> DensityMatrix {
        DensityMatrix::pure(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap()
    }

    fn cfg() -> OptimizerConfig {
        OptimizerConfig::with_seed(11)
    }

    #[test]
    fn descent_finds_quadratic_minimum() {
        let run = steepest_descent(
            |x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 0.5).powi(2),
            vec![0.0, 0.0],
            &OptimizerConfig::default(),
        );
        assert!(run.converged);
        assert!(run.value < 1e-8, "{}", run.value);
    }

    #[test]
    fn config_validation() {
        let mut bad = OptimizerConfig::default();
        bad.starts = 0;
        assert!(bad.validate().is_err());
        let mut bad = OptimizerConfig::default();
        bad.value_tolerance = 0.0;
        assert!(bad.validate().is_err());
        assert!(geometric_discord(&bell(), &bad).is_err());
    }

    #[test]
    fn objective_matches_skew_sum() {
        let mut r = rng::seeded(3);
        for _ in 0..30 {
            let rho = BipartiteState::new(mixed_induced(&mut r, 6, 3), 3, 2).unwrap();
            let u = haar_unitary(&mut r, 3);
            let m = VonNeumannMeasurement::from_unitary(&u).unwrap().lueders_extend(2);
            let direct = partial_coherence_skew(&rho, &m).unwrap().value;
            assert_abs_diff_eq!(DiscordObjective::new(&rho).at(&u), direct, epsilon = 1e-10);
            assert_abs_diff_eq!(discord_norm_form(&rho, &m).unwrap(), direct, epsilon = 1e-10);
        }
    }

    #[test]
    fn discord_examples() {
        let prod = BipartiteState::product(
            &crate::states::random_mixed_induced(2, 2, 1),
            &crate::states::random_mixed_induced(3, 3, 2),
        );
        let r = geometric_discord(&prod, &cfg()).unwrap();
        assert!(r.value <= 1e-7, "{}", r.value);

        let b = geometric_discord(&bell(), &cfg()).unwrap();
        assert_abs_diff_eq!(b.value, 0.5, epsilon = 1e-7);
        assert_abs_diff_eq!(b.oracle_value.unwrap(), 0.5, epsilon = 1e-9);

        let z = DensityMatrix::ground(2);
        let plus_b = plus();
        let cq = classical_quantum_state(&[0.5, 0.5], &VonNeumannMeasurement::computational(2), &[z, plus_b]).unwrap();
        assert!(geometric_discord(&cq, &cfg()).unwrap().value <= 1e-6);

        let u = random_haar_unitary(3, 8);
        let basis = VonNeumannMeasurement::from_unitary(&u).unwrap();
        let bs: Vec<DensityMatrix> = (0..3).map(|k| crate::states::random_mixed_induced(2, 2, k)).collect();
        let cq3 = classical_quantum_state(&[0.2, 0.3, 0.5], &basis, &bs).unwrap();
        assert!(geometric_discord(&cq3, &cfg()).unwrap().value <= 1e-6);
    }

    #[test]
    fn oracle_rejects_non_qubit() {
        let rho = BipartiteState::product(&DensityMatrix::maximally_mixed(3), &DensityMatrix::ground(2));
        assert!(lqu_qubit_oracle(&rho).is_err());
        assert!(geometric_discord(&rho, &cfg()).unwrap().oracle_value.is_none());
    }

    #[test]
    fn oracle_identity_and_agreement() {
        let mut r = rng::seeded(5);
        let sigma = pauli();
        for trial in 0..40 {
            let d_b = 2 + trial % 2;
            let rho = BipartiteState::new(mixed_induced(&mut r, 2 * d_b, 2 + trial % 3), 2, d_b).unwrap();
            let theta = (2.0 * r.random::<f64>() - 1.0).acos();
            let phi = std::f64::consts::TAU * r.random::<f64>();
            let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            let ns = &(&sigma[0].scale_real(n[0]) + &sigma[1].scale_real(n[1])) + &sigma[2].scale_real(n[2]);
            let id = ComplexMatrix::identity(d_b);
            let half = 0.5 * skew_information(rho.state(), &kron(&ns, &id)).unwrap();
            let m = VonNeumannMeasurement::qubit(theta, phi).lueders_extend(d_b);
            assert_abs_diff_eq!(partial_coherence_skew(&rho, &m).unwrap().value, half, epsilon = 1e-10);

            let q = geometric_discord(&rho, &cfg()).unwrap();
            assert!((q.value - q.oracle_value.unwrap()).abs() <= 1e-6);
        }
    }

    #[test]
    fn minimum_property() {
        let mut r = rng::seeded(9);
        for _ in 0..10 {
            let rho = BipartiteState::new(mixed_induced(&mut r, 6, 2), 3, 2).unwrap();
            let q = geometric_discord(&rho, &cfg()).unwrap().value;
            for _ in 0..20 {
                let m = VonNeumannMeasurement::from_unitary(&haar_unitary(&mut r, 3)).unwrap();
                assert!(q <= partial_coherence_skew(&rho, &m.lueders_extend(2)).unwrap().value + 1e-8);
            }
        }
    }

    #[test]
    fn discord_is_deterministic() {
        let rho = BipartiteState::new(crate::states::random_mixed_induced(6, 2, 4), 3, 2).unwrap();
        assert_eq!(geometric_discord(&rho, &cfg()).unwrap(), geometric_discord(&rho, &cfg()).unwrap());
    }

    #[test]
    fn supremum_examples() {
        let c2 = VonNeumannMeasurement::computational(2);
        let light = OptimizerConfig {
            starts: 6,
            ..cfg()
        };
        let lb = weak_coherence_lb(&plus(), &c2, 2, &light).unwrap();
        assert!(lb.value >= 0.5 - 1e-6 && lb.value <= 0.5 + 1e-7, "{lb:?}");

        let diag = DensityMatrix::new(ComplexMatrix::diag_real(&[0.3, 0.7])).unwrap();
        assert!(weak_coherence_lb(&diag, &c2, 2, &light).unwrap().value <= 1e-7);

        let rho_a = crate::states::random_mixed_induced(2, 2, 3);
        let lb = weak_coherence_lb(&rho_a, &c2, 2, &light).unwrap();
        assert!(lb.value <= coherence_skew(&rho_a, &c2).unwrap().value + 1e-7);
    }

    #[test]
    fn qfi_supremum() {
        let c2 = VonNeumannMeasurement::computational(2);
        let lb = weak_coherence_qfi_lb(&plus(), &c2, &cfg()).unwrap();
        assert!(lb.value >= 0.5 - 1e-9);
        let diag = DensityMatrix::new(ComplexMatrix::diag_real(&[0.3, 0.7])).unwrap();
        assert!(weak_coherence_qfi_lb(&diag, &c2, &cfg()).unwrap().value <= 1e-12);
        let rho = crate::states::random_mixed_induced(3, 2, 1);
        let c3 = VonNeumannMeasurement::computational(3);
        assert_eq!(
            weak_coherence_qfi_lb(&rho, &c3, &cfg()).unwrap(),
            weak_coherence_qfi_lb(&rho, &c3, &cfg()).unwrap()
        );
    }

    #[test]
    fn strong_estimate_validation() {
        let c2 = VonNeumannMeasurement::computational(2);
        assert!(strong_coherence_estimate(&plus(), &c2, &[3, 2], &cfg(), CoherenceTag::Skew).is_err());
        assert!(strong_coherence_estimate(&plus(), &c2, &[], &cfg(), CoherenceTag::Skew).is_err());
        let diag = DensityMatrix::new(ComplexMatrix::diag_real(&[0.5, 0.5])).unwrap();
        let light = OptimizerConfig { starts: 4, ..cfg() };
        let est = strong_coherence_estimate(&diag, &c2, &[2, 3], &light, CoherenceTag::Qfi).unwrap();
        assert!(est.entries.iter().all(|e| e.value <= 1e-9));
        assert!(est.monotone);
    }
}
