//! Boundedness and compactness criteria for `T_g^{n,k}` and `S_g^{n,k}`, and classification of
//! symbols from sampled profiles.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::funcmodel::{test_fn_boundedness, test_fn_compactness, AnalyticFn, FnSpec};
use crate::geometry::{DiskPoint, Lattice};
use crate::operators::{derivative_orders, empirical_ratio, image_lp_norm, NormedFn, RatioTable};
use crate::quadrature::WeightedIntegrand;
use crate::tentnorm::{lp_norm, DecayProfile, KernelTester, NormSettings, OpKind, SpaceParams, SupGrid};

/// Lattice parameters `(r, kappa, cap)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeParams {
    pub r: f64,
    pub kappa: f64,
    pub cap: f64,
}

impl LatticeParams {
    pub fn generate(&self) -> Result<Lattice> {
        Lattice::generate(self.r, self.kappa, self.cap)
    }
}

/// Everything a criterion evaluation depends on besides the symbol and exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub settings: NormSettings,
    /// Kernel-test exponent; `None` means `alpha + 3` on the source side and `beta + 3` on the
    /// target side.
    pub t: Option<f64>,
    /// Truncation degree for series products and iterated integrals.
    pub degree: usize,
    /// Lattice whose nodes join the pointwise supremum grid.
    pub lattice: LatticeParams,
    /// Levels `m` of `|u| = 1 - 2^-m` for the boundedness test functions.
    pub necessity_levels: Vec<u32>,
    /// Levels `m` of `|z_j| = 1 - 2^-m` for the compactness test functions.
    pub compactness_levels: Vec<u32>,
    /// Relative slack allowed when testing a profile for being non-increasing.
    pub flat_tolerance: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            settings: NormSettings::default(),
            t: None,
            degree: crate::funcmodel::DEFAULT_DEGREE,
            lattice: LatticeParams { r: 0.5, kappa: 0.2, cap: 0.99 },
            necessity_levels: (2..=8).collect(),
            compactness_levels: (1..=8).collect(),
            flat_tolerance: 0.01,
        }
    }
}

impl EvalConfig {
    pub fn t_source(&self, params: &SpaceParams) -> f64 {
        self.t.unwrap_or(params.alpha + 3.0)
    }

    pub fn t_target(&self, params: &SpaceParams) -> f64 {
        self.t.unwrap_or(params.beta + 3.0)
    }
}

/// An [`EvalConfig`] with its lattice built.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: EvalConfig,
    pub lattice: Lattice,
}

impl Context {
    pub fn new(config: EvalConfig) -> Result<Context> {
        config.settings.quad.validate()?;
        let lattice = config.lattice.generate()?;
        Ok(Context { config, lattice })
    }

    /// Pointwise supremum grid: annuli through the symbol's foci plus the lattice nodes.
    pub fn z_grid(&self, g: &AnalyticFn) -> SupGrid {
        SupGrid::for_foci(&self.config.settings, &g.foci(0.5)).with_lattice(&self.lattice)
    }
}

/// `e = j + (beta+2)/q - (alpha+2)/p`, with `j = n - k` for `T` and `j = k` for `S`.
pub fn exponent_e(params: &SpaceParams) -> f64 {
    governing_order(params) as f64 + (params.beta + 2.0) / params.q - (params.alpha + 2.0) / params.p
}

/// Order of the derivative of `g` that the criteria see.
pub fn governing_order(params: &SpaceParams) -> usize {
    derivative_orders(params).1
}

/// `lambda = (p beta - q alpha) / (p - q)` for `q < p`.
pub fn lambda_param(params: &SpaceParams) -> Result<f64> {
    match params.lambda() {
        None => Err(invalid(format!("lambda needs q < p, got p = {}, q = {}", params.p, params.q))),
        Some(l) if l <= -2.0 => Err(invalid(format!("lambda = {l} must exceed -2"))),
        Some(l) => Ok(l),
    }
}

fn pointwise_values(g: &AnalyticFn, params: &SpaceParams, grid: &SupGrid) -> Vec<f64> {
    let gj = g.derivative(governing_order(params));
    let e = exponent_e(params);
    grid.points()
        .iter()
        .map(|&z| {
            let d = 1.0 - z.norm_sqr();
            gj.evaluate(z).norm() * d.powf(e)
        })
        .collect()
}

/// `max_z |g^(j)(z)| (1 - |z|^2)^e` over the grid.
pub fn u_g(g: &AnalyticFn, params: &SpaceParams, grid: &SupGrid) -> f64 {
    pointwise_values(g, params, grid).into_iter().fold(0.0, f64::max)
}

/// Annulus maxima of `|g^(j)(z)| (1 - |z|^2)^e`.
pub fn u_g_profile(g: &AnalyticFn, params: &SpaceParams, grid: &SupGrid) -> DecayProfile {
    let annuli = SupGrid { extra: Vec::new(), ..grid.clone() };
    let values = pointwise_values(g, params, &annuli);
    let na = annuli.angles.len();
    let maxima = (0..annuli.radii.len())
        .map(|i| values[1 + i * na..1 + (i + 1) * na].iter().copied().fold(0.0, f64::max))
        .collect();
    DecayProfile { radii: annuli.radii, values: maxima }
}

/// Kernel-test membership of `g^(j)` in `AT^inf_{pq/(p-q)}(lambda)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    /// Kernel-test supremum to the power `(p - q) / (pq)`.
    pub value: f64,
    /// Annulus maxima, on the same scale as `value`.
    pub profile: DecayProfile,
    pub converged: bool,
}

/// `(sup_a int (1-|a|^2)^t/|1-conj(a)z|^(t+1) |g^(j)|^r (1-|z|^2)^(j r + lambda + 1) dA)^(1/r)`,
/// `r = pq / (p - q)`.
pub fn membership(g: &AnalyticFn, params: &SpaceParams, t: f64, settings: &NormSettings) -> Result<Membership> {
    let lambda = lambda_param(params)?;
    let (p, q) = (params.p, params.q);
    let r = p * q / (p - q);
    let j = governing_order(params);
    let gj = g.derivative(j);
    let grid = SupGrid::for_foci(settings, &gj.foci(0.5));
    if gj.is_zero() {
        let n = grid.radii.len();
        return Ok(Membership { value: 0.0, profile: DecayProfile { radii: grid.radii, values: vec![0.0; n] }, converged: true });
    }
    let foci = gj.foci(0.5);
    let density = WeightedIntegrand::new(move |z| gj.evaluate(z).norm().powf(r), j as f64 * r + lambda + 1.0).with_foci(foci);
    let kernel = KernelTester::new(density, grid, &settings.quad)?.run(t, 0.0)?;
    let mut profile = kernel.profile;
    profile.values.iter_mut().for_each(|v| *v = v.powf(1.0 / r));
    Ok(Membership { value: kernel.sup.powf(1.0 / r), profile, converged: kernel.converged })
}

pub fn membership_value(g: &AnalyticFn, params: &SpaceParams, t: f64, settings: &NormSettings) -> Result<f64> {
    Ok(membership(g, params, t, settings)?.value)
}

pub fn membership_profile(g: &AnalyticFn, params: &SpaceParams, t: f64, settings: &NormSettings) -> Result<DecayProfile> {
    Ok(membership(g, params, t, settings)?.profile)
}

/// The criterion governing a parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionKind {
    Ug,
    UgVanishing,
    TentMembership,
    TentLittleMembership,
    SgSup,
    SgVanishing,
    SgMembership,
    SgLittle,
}

/// `(boundedness criterion, compactness criterion)` for a parameter set.
pub fn criterion_kinds(params: &SpaceParams) -> (CriterionKind, CriterionKind) {
    use CriterionKind::*;
    match (params.op_kind, params.p <= params.q) {
        (OpKind::T, true) => (Ug, UgVanishing),
        (OpKind::T, false) => (TentMembership, TentLittleMembership),
        (OpKind::S, true) => (SgSup, SgVanishing),
        (OpKind::S, false) => (SgMembership, SgLittle),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Bounded,
    NotBounded,
    Compact,
    NotCompact,
    Inconclusive,
}

/// Boundedness from annulus maxima: unbounded when the last four increase and the profile at
/// least doubles overall, bounded when the last four do not increase (up to `tol`).
pub fn classify_boundedness(profile: &DecayProfile, tol: f64) -> Classification {
    let v = &profile.values;
    if v.len() < 4 {
        return Classification::Inconclusive;
    }
    let tail = &v[v.len() - 4..];
    if tail.iter().all(|&x| x == 0.0) {
        return Classification::Bounded;
    }
    let increasing = tail.windows(2).all(|w| w[1] > w[0]);
    if increasing && v[v.len() - 1] >= 2.0 * v[0] {
        return Classification::NotBounded;
    }
    if tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + tol)) {
        return Classification::Bounded;
    }
    Classification::Inconclusive
}

/// Compactness from annulus maxima: final value at most 5% of the maximum, or at least half.
pub fn classify_compactness(profile: &DecayProfile) -> Classification {
    let max = profile.max();
    let last = profile.last();
    if max == 0.0 || last <= 0.05 * max {
        Classification::Compact
    } else if last >= 0.5 * max {
        Classification::NotCompact
    } else {
        Classification::Inconclusive
    }
}

/// Image-to-source ratio of a test function at one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRatio {
    pub m: u32,
    pub radius: f64,
    pub source_norm: f64,
    pub image_norm: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pointwise_sup: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus: Option<RatioTable>,
    pub direction: f64,
    pub necessity: Vec<LevelRatio>,
    pub compactness: Vec<LevelRatio>,
    pub notes: Vec<String>,
}

/// Classification of one symbol against one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub g: FnSpec,
    pub params: SpaceParams,
    pub criterion: CriterionKind,
    pub compactness_criterion: CriterionKind,
    pub value: f64,
    /// `[radius, value]` pairs.
    pub profile: Vec<[f64; 2]>,
    pub boundedness: Classification,
    pub compactness: Classification,
    pub classification: Classification,
    pub evidence: Evidence,
}

impl Verdict {
    pub fn decay_profile(&self) -> DecayProfile {
        DecayProfile { radii: self.profile.iter().map(|x| x[0]).collect(), values: self.profile.iter().map(|x| x[1]).collect() }
    }
}

/// The criterion value and the profile its classification is read from.
pub fn criterion(g: &AnalyticFn, params: &SpaceParams, ctx: &Context) -> Result<(f64, DecayProfile, Vec<String>)> {
    let mut notes = Vec::new();
    if params.p <= params.q {
        let grid = ctx.z_grid(&g.derivative(governing_order(params)));
        Ok((u_g(g, params, &grid), u_g_profile(g, params, &grid), notes))
    } else {
        let m = membership(g, params, ctx.config.t_target(params), &ctx.config.settings)?;
        if !m.converged {
            notes.push("membership kernel test did not meet the quadrature target".into());
        }
        Ok((m.value, m.profile, notes))
    }
}

fn ratio_levels(
    g: &AnalyticFn,
    params: &SpaceParams,
    ctx: &Context,
    levels: &[u32],
    direction: f64,
    family: impl Fn(DiskPoint) -> Result<AnalyticFn> + Sync,
) -> Result<Vec<LevelRatio>> {
    let ts = ctx.config.t_source(params);
    let tt = ctx.config.t_target(params);
    levels
        .par_iter()
        .map(|&m| {
            let radius = 1.0 - 0.5f64.powi(m as i32);
            let u = DiskPoint::polar(radius, direction)?;
            let f = family(u)?;
            let source_norm = lp_norm(&f, params.p, params.alpha, 1, ts, &ctx.config.settings)?.value;
            let image_norm = image_lp_norm(&f, g, params, tt, &ctx.config.settings)?.value;
            Ok(LevelRatio { m, radius, source_norm, image_norm, ratio: image_norm / source_norm })
        })
        .collect()
}

/// Ratios `||T f_u|| / ||f_u||` along `|u| = 1 - 2^-m` in the given direction.
pub fn necessity_ratios(g: &AnalyticFn, params: &SpaceParams, ctx: &Context, direction: f64) -> Result<Vec<LevelRatio>> {
    let (p, a) = (params.p, params.alpha);
    ratio_levels(g, params, ctx, &ctx.config.necessity_levels, direction, |u| test_fn_boundedness(u, p, a))
}

/// Ratios `||T f_j|| / ||f_j||` along `|z_j| = 1 - 2^-m` in the given direction.
pub fn compactness_ratios(g: &AnalyticFn, params: &SpaceParams, ctx: &Context, direction: f64) -> Result<Vec<LevelRatio>> {
    let (p, a) = (params.p, params.alpha);
    ratio_levels(g, params, ctx, &ctx.config.compactness_levels, direction, |z| test_fn_compactness(z, p, a))
}

/// Direction in which the governing function is largest near the boundary.
pub fn worst_direction(g: &AnalyticFn, params: &SpaceParams, ctx: &Context) -> f64 {
    let gj = g.derivative(governing_order(params));
    let grid = SupGrid { extra: Vec::new(), ..ctx.z_grid(&gj) };
    let r = grid.radii.last().copied().unwrap_or(0.5);
    let mut best = (f64::NEG_INFINITY, 0.0);
    for &t in &grid.angles {
        let v = gj.evaluate(Complex64::from_polar(r, t)).norm();
        if v > best.0 {
            best = (v, t);
        }
    }
    best.1
}

/// What [`classify`] attaches besides the criterion itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvidenceOptions {
    pub necessity: bool,
    pub compactness: bool,
}

/// Evaluates the governing criterion, classifies it and gathers supporting ratios.
pub fn classify(g: &AnalyticFn, params: &SpaceParams, corpus: &[NormedFn], ctx: &Context, options: EvidenceOptions) -> Result<Verdict> {
    params.validate()?;
    let (kind, little_kind) = criterion_kinds(params);
    let e = exponent_e(params);
    let gj = g.derivative(governing_order(params));
    let (value, profile, mut notes) = criterion(g, params, ctx)?;

    let (mut boundedness, mut compactness) = if gj.is_zero() {
        (Classification::Bounded, Classification::Compact)
    } else {
        (classify_boundedness(&profile, ctx.config.flat_tolerance), classify_compactness(&profile))
    };
    if e < 0.0 && !gj.is_zero() {
        notes.push(format!(
            "exponent e = {e} is negative: a finite criterion would force g^({}) = 0, so the operator is unbounded",
            governing_order(params)
        ));
        boundedness = Classification::NotBounded;
        compactness = Classification::NotCompact;
    }
    if boundedness == Classification::NotBounded && compactness == Classification::Compact {
        compactness = Classification::NotCompact;
    }
    let classification = match (boundedness, compactness) {
        (Classification::NotBounded, _) => Classification::NotBounded,
        (_, Classification::Compact) => Classification::Compact,
        (Classification::Bounded, _) => Classification::Bounded,
        _ => Classification::Inconclusive,
    };

    let direction = worst_direction(g, params, ctx);
    let mut evidence = Evidence { direction, ..Default::default() };
    if params.p <= params.q {
        evidence.pointwise_sup = Some(value);
    }
    if !corpus.is_empty() {
        evidence.corpus = Some(empirical_ratio(g, "g", params, corpus, ctx.config.t_target(params), &ctx.config.settings)?);
    }
    if options.necessity {
        evidence.necessity = necessity_ratios(g, params, ctx, direction)?;
    }
    if options.compactness {
        evidence.compactness = compactness_ratios(g, params, ctx, direction)?;
    }
    evidence.notes = notes;

    Ok(Verdict {
        g: g.to_spec(),
        params: *params,
        criterion: kind,
        compactness_criterion: little_kind,
        value,
        profile: profile.radii.iter().zip(&profile.values).map(|(r, v)| [*r, *v]).collect(),
        boundedness,
        compactness,
        classification,
        evidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn t_params(p: f64, q: f64, alpha: f64, beta: f64, n: usize, k: usize) -> SpaceParams {
        SpaceParams::new(p, q, alpha, beta, n, k, OpKind::T).unwrap()
    }

    #[test]
    fn exponent_examples() {
        assert_relative_eq!(exponent_e(&t_params(2.0, 2.0, 0.0, 0.0, 1, 0)), 1.0);
        assert_relative_eq!(exponent_e(&t_params(2.0, 2.0, 0.0, 2.0, 1, 0)), 2.0);
        let s = SpaceParams::new(2.0, 2.0, 0.0, 0.0, 1, 0, OpKind::S).unwrap();
        assert_relative_eq!(exponent_e(&s), 0.0);
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_param(&t_params(2.0, 1.0, 0.0, 0.0, 1, 0)).unwrap(), 0.0);
        assert_eq!(lambda_param(&t_params(4.0, 2.0, 1.0, 0.0, 1, 0)).unwrap(), -1.0);
        let bad = SpaceParams { p: 2.0, q: 1.0, alpha: 4.0, beta: 0.0, n: 1, k: 0, op_kind: OpKind::T };
        assert!(lambda_param(&bad).is_err());
        assert!(lambda_param(&t_params(2.0, 2.0, 0.0, 0.0, 1, 0)).is_err());
    }

    #[test]
    fn u_g_examples() {
        let params = t_params(2.0, 2.0, 0.0, 0.0, 1, 0);
        let grid = SupGrid::annular(10, 8, &[]);
        assert_relative_eq!(u_g(&AnalyticFn::monomial(1), &params, &grid), 1.0);
        assert_eq!(u_g(&AnalyticFn::constant(c(3.0)), &params, &grid), 0.0);
        let log = AnalyticFn::log(c(1.0), c(1.0)).unwrap();
        let coarse = u_g(&log, &params, &SupGrid::annular(6, 8, &[]));
        let fine = u_g(&log, &params, &SupGrid::annular(14, 8, &[]));
        assert!(coarse < fine && fine < 2.0 && fine > 1.999, "{coarse} {fine}");
        let prof = u_g_profile(&log, &params, &grid);
        assert!(prof.last() > 1.99);
        let zprof = u_g_profile(&AnalyticFn::monomial(1), &params, &grid);
        for (r, v) in zprof.radii.iter().zip(&zprof.values) {
            assert_relative_eq!(*v, 1.0 - r * r, max_relative = 1e-12);
        }
    }

    #[test]
    fn membership_examples() {
        let settings = NormSettings::default();
        let params = t_params(2.0, 1.0, 0.0, 0.0, 1, 0);
        assert_eq!(membership_value(&AnalyticFn::constant(c(1.0)), &params, 1.0, &settings).unwrap(), 0.0);
        let m = membership(&AnalyticFn::monomial(1), &params, 1.0, &settings).unwrap();
        // r = 2, a = 0 term is int (1-|z|^2)^3 dA = 1/4, and it is the supremum
        assert_relative_eq!(m.value, 0.5, max_relative = 1e-6);
        let m = membership(&AnalyticFn::monomial(1), &params, 3.0, &settings).unwrap();
        assert_eq!(classify_compactness(&m.profile), Classification::Compact);
        // g' = (1 - z)^(-2): the annulus maxima level off
        let g = crate::funcmodel::kernel_primitive(c(1.0), 2.0, c(1.0), 1).unwrap();
        let m = membership(&g, &params, 3.0, &settings).unwrap();
        assert_eq!(classify_boundedness(&m.profile, 0.01), Classification::Bounded);
        assert_eq!(classify_compactness(&m.profile), Classification::NotCompact);
    }

    #[test]
    fn threshold_rules() {
        let radii: Vec<f64> = (1..=6).map(|m| 1.0 - 0.5f64.powi(m)).collect();
        let p = |v: Vec<f64>| DecayProfile { radii: radii.clone(), values: v };
        assert_eq!(classify_boundedness(&p(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]), 0.01), Classification::NotBounded);
        assert_eq!(classify_boundedness(&p(vec![1.0, 1.1, 1.2, 1.3, 1.4, 1.5]), 0.01), Classification::Inconclusive);
        assert_eq!(classify_boundedness(&p(vec![1.0, 2.0, 2.0, 1.9, 1.8, 1.8]), 0.01), Classification::Bounded);
        assert_eq!(classify_boundedness(&p(vec![1.0, 1.5, 1.75, 1.875, 1.9375, 1.96875]), 0.01), Classification::Inconclusive);
        assert_eq!(classify_boundedness(&p(vec![1.0, 1.9, 1.99, 1.995, 1.998, 1.999]), 0.01), Classification::Bounded);
        assert_eq!(classify_compactness(&p(vec![1.0, 0.5, 0.2, 0.1, 0.05, 0.01])), Classification::Compact);
        assert_eq!(classify_compactness(&p(vec![1.0, 0.9, 0.8, 0.7, 0.6, 0.6])), Classification::NotCompact);
        assert_eq!(classify_compactness(&p(vec![1.0, 0.5, 0.4, 0.3, 0.2, 0.2])), Classification::Inconclusive);
    }

    #[test]
    fn classify_examples() {
        let ctx = Context::new(EvalConfig::default()).unwrap();
        let params = t_params(2.0, 2.0, 0.0, 0.0, 1, 0);
        let v = classify(&AnalyticFn::monomial(1), &params, &[], &ctx, EvidenceOptions::default()).unwrap();
        assert_eq!(v.boundedness, Classification::Bounded);
        assert_eq!(v.compactness, Classification::Compact);
        assert_relative_eq!(v.value, 1.0);
        // g' = (1 - z)^(-1.5)
        let g = crate::funcmodel::kernel_primitive(c(1.0), 1.5, c(1.0), 1).unwrap();
        let v = classify(&g, &params, &[], &ctx, EvidenceOptions::default()).unwrap();
        assert_eq!(v.classification, Classification::NotBounded);
        // e < 0
        let neg = t_params(1.0, 2.0, 2.0, 0.0, 1, 0);
        assert!(exponent_e(&neg) < 0.0);
        let v = classify(&AnalyticFn::monomial(1), &neg, &[], &ctx, EvidenceOptions::default()).unwrap();
        assert_eq!(v.classification, Classification::NotBounded);
        assert!(!v.evidence.notes.is_empty());
    }
}
