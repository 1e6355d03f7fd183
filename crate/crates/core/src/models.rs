//! Simulated functional time series on Fourier coefficients.
//!
//! Processes are generated as vector recursions on the first `L` basis
//! coefficients. Operator matrices have independent `N(0, ν_{l,l'})` entries
//! and are rescaled to a prescribed spectral norm; time variation enters only
//! through scalar schedules evaluated at `t/T`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng::{child_rng, derive_seed, Rng};
use crate::series::{BasisSpec, FunctionalTimeSeries};

pub const DEFAULT_BURN_IN: usize = 200;

/// Entry-variance pattern `ν_{l,l'}` of a random operator (1-based indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarianceRule {
    /// `exp(−l − l')`
    Exponential,
    /// `1 / (l + l'^{3/2})`
    Harmonic,
}

impl VarianceRule {
    pub fn variance(&self, l: usize, lp: usize) -> f64 {
        let (l, lp) = (l as f64, lp as f64);
        match self {
            VarianceRule::Exponential => libm::exp(-l - lp),
            VarianceRule::Harmonic => 1.0 / (l + lp * libm::sqrt(lp)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSpec {
    pub variance_rule: VarianceRule,
    /// Target spectral norm `|κ|`; the sign orients the matrix.
    pub kappa: f64,
    pub dim: usize,
}

fn draw_raw(rule: VarianceRule, dim: usize, rng: &mut Rng) -> Matrix {
    Matrix::from_fn(dim, dim, |r, c| {
        let z: f64 = StandardNormal.sample(rng);
        z * libm::sqrt(rule.variance(r + 1, c + 1))
    })
}

/// Random `L × L` operator matrix with spectral norm `|κ|`, multiplied by `sign(κ)`.
///
/// `κ = 0` yields the zero matrix (the draw is still consumed).
pub fn gen_operator(spec: &OperatorSpec, rng: &mut Rng) -> Result<Matrix> {
    if spec.dim == 0 {
        return Err(Error::Parameter("operator dimension must be at least 1".into()));
    }
    if !spec.kappa.is_finite() {
        return Err(Error::Parameter(format!("operator norm must be finite, got {}", spec.kappa)));
    }
    loop {
        let raw = draw_raw(spec.variance_rule, spec.dim, rng);
        let norm = raw.spectral_norm()?;
        if norm > 0.0 {
            return Ok(raw.scaled(spec.kappa / norm));
        }
    }
}

/// Coefficient variance profile of the innovations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum InnovationProfile {
    /// `exp(−(l−1)/10)`
    Decaying,
    /// `2·exp((l−1)/10)`
    Growing,
}

impl InnovationProfile {
    fn sd(&self, l: usize) -> f64 {
        let x = (l - 1) as f64 / 10.0;
        match self {
            InnovationProfile::Decaying => libm::exp(-0.5 * x),
            InnovationProfile::Growing => libm::sqrt(2.0 * libm::exp(x)),
        }
    }
}

fn draw_innovation(profile: InnovationProfile, out: &mut [f64], rng: &mut Rng) {
    for (l, slot) in out.iter_mut().enumerate() {
        let z: f64 = StandardNormal.sample(rng);
        *slot = z * profile.sd(l + 1);
    }
}

/// `T × L` independent Gaussians, column `l` with variance `exp(−(l−1)/10)`.
pub fn gen_innovations(t: usize, l: usize, rng: &mut Rng) -> Matrix {
    let mut m = Matrix::zeros(t, l);
    for r in 0..t {
        draw_innovation(InnovationProfile::Decaying, m.row_mut(r), rng);
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    /// Functional white noise.
    I,
    /// Stationary FAR(2).
    II,
    /// Stationary FMA(1).
    III,
    /// tvFAR(1) with time-varying innovation variance.
    IV,
    /// tvFAR(2) with a time-varying first-lag norm.
    V,
    /// FAR(2) with a structural break at `3T/8`.
    VI,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::I,
        ModelKind::II,
        ModelKind::III,
        ModelKind::IV,
        ModelKind::V,
        ModelKind::VI,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::I => "I",
            ModelKind::II => "II",
            ModelKind::III => "III",
            ModelKind::IV => "IV",
            ModelKind::V => "V",
            ModelKind::VI => "VI",
        }
    }

    fn index(&self) -> u64 {
        *self as u64
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase();
        let by_number = key.parse::<usize>().ok().and_then(|i| i.checked_sub(1));
        ModelKind::ALL
            .iter()
            .enumerate()
            .find(|(i, m)| m.name() == key || by_number == Some(*i))
            .map(|(_, m)| *m)
            .ok_or_else(|| Error::Parameter(format!("unknown model '{s}' (expected I..VI)")))
    }
}

/// Multiplicative innovation variance of model IV.
pub fn model_iv_variance(t: f64, total: f64) -> f64 {
    let a = 2.0 * PI * t / total;
    libm::cos(0.5 + libm::cos(a) + 0.3 * libm::sin(a))
}

/// Time-varying first-lag norm of model V.
pub fn model_v_kappa1(t: f64, total: f64) -> f64 {
    1.8 * libm::cos(1.5 - libm::cos(4.0 * PI * t / total))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelSpec {
    pub model: ModelKind,
    pub t: usize,
    pub l: usize,
    pub seed: u64,
    pub burn_in: usize,
}

impl ModelSpec {
    pub fn new(model: ModelKind, t: usize, seed: u64) -> Self {
        Self {
            model,
            t,
            l: BasisSpec::SIMULATION_DIMENSION,
            seed,
            burn_in: DEFAULT_BURN_IN,
        }
    }
}

/// A model with its operator matrices drawn; realizations share the operators
/// and differ only in their innovations.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelProcess {
    model: ModelKind,
    /// Unit-norm (or raw, for the MA model) operator matrices.
    ops: [Matrix; 2],
}

impl ModelProcess {
    /// Draws the operators of `model` in dimension `l` from `seed`.
    pub fn new(model: ModelKind, l: usize, seed: u64) -> Result<Self> {
        if l == 0 {
            return Err(Error::Parameter("basis dimension must be at least 1".into()));
        }
        Self::draw(model, l, &mut child_rng(seed, &[model.index()]))
    }

    pub fn model(&self) -> ModelKind {
        self.model
    }

    pub fn dim(&self) -> usize {
        self.ops[0].nrows()
    }

    fn draw(model: ModelKind, l: usize, rng: &mut Rng) -> Result<Self> {
        for _ in 0..MAX_OPERATOR_DRAWS {
            let process = Self {
                model,
                ops: Self::draw_ops(model, l, rng)?,
            };
            if process.is_locally_stable()? {
                return Ok(process);
            }
        }
        Err(Error::Numeric("no locally stable operator draw found"))
    }

    fn draw_ops(model: ModelKind, l: usize, rng: &mut Rng) -> Result<[Matrix; 2]> {
        let unit = |rule, rng: &mut Rng| {
            gen_operator(
                &OperatorSpec {
                    variance_rule: rule,
                    kappa: 1.0,
                    dim: l,
                },
                rng,
            )
        };
        Ok(match model {
            ModelKind::I => [Matrix::zeros(l, l), Matrix::zeros(l, l)],
            ModelKind::II | ModelKind::VI => [
                unit(VarianceRule::Exponential, rng)?,
                unit(VarianceRule::Harmonic, rng)?,
            ],
            ModelKind::III => [
                draw_raw(VarianceRule::Exponential, l, rng),
                draw_raw(VarianceRule::Exponential, l, rng),
            ],
            ModelKind::IV => [unit(VarianceRule::Exponential, rng)?, Matrix::zeros(l, l)],
            ModelKind::V => [
                unit(VarianceRule::Exponential, rng)?,
                unit(VarianceRule::Exponential, rng)?,
            ],
        })
    }

    /// Whether the recursion frozen at every rescaled time `u` on a grid is stable.
    ///
    /// Operator norms alone do not make a VAR(2) causal (model V reaches
    /// `‖A_1‖ + ‖A_2‖ ≈ 2.4`), so draws whose frozen companion matrix has
    /// spectral radius at or above one are rejected and redrawn.
    fn is_locally_stable(&self) -> Result<bool> {
        if matches!(self.model, ModelKind::I | ModelKind::III) {
            return Ok(true);
        }
        for i in 0..STABILITY_GRID {
            // u ↦ t = uT with T = 1 evaluates the schedules at rescaled time u.
            let u = (i as f64 + 0.5) / STABILITY_GRID as f64;
            let (k1, k2, _, _) = self.schedule(u, 1.0);
            if !companion_contracts(&self.ops[0].scaled(k1), &self.ops[1].scaled(k2))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `(κ_1, κ_2, innovation scale, innovation profile)` at time `t` (1-based, may be ≤ 0 during burn-in).
    fn schedule(&self, t: f64, total: f64) -> (f64, f64, f64, InnovationProfile) {
        use InnovationProfile::*;
        match self.model {
            ModelKind::I | ModelKind::III => (0.0, 0.0, 1.0, Decaying),
            ModelKind::II => (0.75, -0.4, 1.0, Decaying),
            ModelKind::IV => (0.8, 0.0, libm::sqrt(model_iv_variance(t, total)), Decaying),
            ModelKind::V => (model_v_kappa1(t, total), -0.81, 1.0, Decaying),
            ModelKind::VI => {
                if t <= 3.0 * total / 8.0 {
                    (0.7, 0.2, 1.0, Decaying)
                } else {
                    (0.0, -0.2, 1.0, Growing)
                }
            }
        }
    }
}

const MAX_OPERATOR_DRAWS: usize = 1000;
const STABILITY_GRID: usize = 64;
/// `log2` of the companion power tested for contraction.
const STABILITY_SQUARINGS: usize = 10;

/// `‖C^{1024}‖_F < 1` for the VAR(2) companion matrix `C = [[A_1, A_2], [I, 0]]`.
///
/// By Gelfand's formula this tracks `ρ(C) < 1`; repeated squaring with
/// renormalization keeps the powers finite.
fn companion_contracts(a1: &Matrix, a2: &Matrix) -> Result<bool> {
    let l = a1.nrows();
    let mut c = Matrix::from_fn(2 * l, 2 * l, |r, col| match (r < l, col < l) {
        (true, true) => a1[(r, col)],
        (true, false) => a2[(r, col - l)],
        (false, true) => f64::from(u8::from(r - l == col)),
        (false, false) => 0.0,
    });
    let mut log_norm = 0.0;
    for _ in 0..STABILITY_SQUARINGS {
        c = c.matmul(&c)?;
        let norm = libm::sqrt(c.as_slice().iter().map(|v| v * v).sum::<f64>());
        if norm == 0.0 {
            return Ok(true);
        }
        c = c.scaled(1.0 / norm);
        log_norm = 2.0 * log_norm + libm::log(norm);
    }
    Ok(log_norm < 0.0)
}

fn axpy(alpha: f64, m: &Matrix, x: &[f64], out: &mut [f64], scratch: &mut [f64]) {
    if alpha == 0.0 {
        return;
    }
    m.mul_vec(x, scratch);
    for (o, s) in out.iter_mut().zip(scratch.iter()) {
        *o += alpha * s;
    }
}

/// Independent operator draw and realization: `spec.seed` fixes both.
pub fn simulate_model(spec: &ModelSpec) -> Result<FunctionalTimeSeries> {
    let process = ModelProcess::new(spec.model, spec.l, spec.seed)?;
    let x = process.realize(spec.t, spec.burn_in, crate::rng::derive_seed(spec.seed, &[spec.model.index(), 1]))?;
    Ok(x.with_id(format!("{}-{}", spec.model, spec.seed)))
}

impl ModelProcess {
    /// One path of length `t` after discarding `burn_in` steps from a zero start.
    ///
    /// Schedules are evaluated at `t/T` with `t = 1..T` over the kept samples
    /// (and `t ≤ 0` during burn-in). The id is `"<model>"`.
    pub fn realize(&self, t_len: usize, burn_in: usize, seed: u64) -> Result<FunctionalTimeSeries> {
        if t_len < 2 {
            return Err(Error::Parameter(format!("series length must be at least 2, got {t_len}")));
        }
        let l = self.dim();
        let basis = BasisSpec::fourier(l)?;
        let mut rng = crate::rng::rng_from_seed(seed);
        let total = t_len as f64;
        let steps = burn_in + t_len;
        let mut out = Matrix::zeros(t_len, l);
        // Rolling state: previous two values (AR) or previous innovation (MA).
        let mut lag1 = vec![0.0; l];
        let mut lag2 = vec![0.0; l];
        let mut eps = vec![0.0; l];
        let mut cur = vec![0.0; l];
        let mut scratch = vec![0.0; l];
        for step in 0..steps {
            let t = step as f64 - burn_in as f64 + 1.0;
            let (k1, k2, scale, profile) = self.schedule(t, total);
            draw_innovation(profile, &mut eps, &mut rng);
            if self.model == ModelKind::III {
                self.ops[0].mul_vec(&eps, &mut cur);
                axpy(-0.5, &self.ops[1], &lag1, &mut cur, &mut scratch);
                lag1.copy_from_slice(&eps);
            } else {
                for (c, e) in cur.iter_mut().zip(&eps) {
                    *c = scale * e;
                }
                axpy(k1, &self.ops[0], &lag1, &mut cur, &mut scratch);
                axpy(k2, &self.ops[1], &lag2, &mut cur, &mut scratch);
                core::mem::swap(&mut lag1, &mut lag2);
                lag1.copy_from_slice(&cur);
            }
            if step >= burn_in {
                out.row_mut(step - burn_in).copy_from_slice(&cur);
            }
        }
        if !out.all_finite() {
            return Err(Error::Numeric("simulated process diverged"));
        }
        FunctionalTimeSeries::new(self.model.name(), out, basis)
    }
}

/// Models making up simulation setting 1, 2 or 3.
pub fn setting_models(setting: u8) -> Result<&'static [ModelKind]> {
    match setting {
        1 => Ok(&ModelKind::ALL[..3]),
        2 => Ok(&ModelKind::ALL[3..]),
        3 => Ok(&ModelKind::ALL),
        other => Err(Error::Parameter(format!("unknown setting {other} (expected 1, 2 or 3)"))),
    }
}

/// Series with their ground-truth cluster labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCollection {
    pub series: Vec<FunctionalTimeSeries>,
    pub labels: Vec<usize>,
    pub models: Vec<ModelKind>,
}

/// `n` realizations of one draw of `model`, with ids `"<model>_<rep>"` (`rep` from 1).
///
/// `tag` separates seed streams of different collections built from the same seed.
fn group(tag: u64, model: ModelKind, n: usize, t: usize, seed: u64) -> Result<Vec<FunctionalTimeSeries>> {
    let process = ModelProcess::new(model, BasisSpec::SIMULATION_DIMENSION, derive_seed(seed, &[tag, model.index()]))?;
    (0..n)
        .map(|rep| {
            let x = process.realize(t, DEFAULT_BURN_IN, derive_seed(seed, &[tag, model.index(), rep as u64 + 1]))?;
            Ok(x.with_id(format!("{}_{}", model, rep + 1)))
        })
        .collect()
}

/// `n` realizations of a single draw of `model`.
pub fn make_group(model: ModelKind, n: usize, t: usize, seed: u64) -> Result<Vec<FunctionalTimeSeries>> {
    if n == 0 {
        return Err(Error::Parameter("need at least one realization".into()));
    }
    group(0, model, n, t, seed)
}

/// `n` realizations of each model of the setting, grouped by model.
///
/// Each model's operators are drawn once per collection and shared by its
/// members; innovations are independent across members.
pub fn make_setting(setting: u8, n: usize, t: usize, seed: u64) -> Result<LabeledCollection> {
    let models = setting_models(setting)?;
    if n == 0 {
        return Err(Error::Parameter("need at least one realization per model".into()));
    }
    let mut out = LabeledCollection {
        series: Vec::with_capacity(n * models.len()),
        labels: Vec::with_capacity(n * models.len()),
        models: models.to_vec(),
    };
    for (label, &model) in models.iter().enumerate() {
        out.series.extend(group(setting as u64, model, n, t, seed)?);
        out.labels.extend(core::iter::repeat_n(label, n));
    }
    Ok(out)
}
