//! Tent-space quasinorms, the Carleson kernel test, the Littlewood-Paley norm and decay profiles.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::funcmodel::AnalyticFn;
use crate::geometry::{Aperture, BoundaryPoint, DiskPoint, Lattice, Region, Slice};
use crate::quadrature::{region_integral, Focus, MeasureSample, QuadratureSpec, WeightedIntegrand, MAX_GRADED_FOCI};

/// Which of the two operator families a parameter set refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OpKind {
    T,
    S,
}

/// Source space `AT_p^inf(alpha)`-type exponent `p, alpha`, target `q, beta`, and the operator
/// `T_g^{n,k}` or `S_g^{n,k}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub k: usize,
    pub op_kind: OpKind,
}

impl SpaceParams {
    pub fn new(p: f64, q: f64, alpha: f64, beta: f64, n: usize, k: usize, op_kind: OpKind) -> Result<Self> {
        let params = SpaceParams { p, q, alpha, beta, n, k, op_kind };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p.is_finite() && self.q > 0.0 && self.q.is_finite()) {
            return Err(invalid(format!("p and q must be finite and positive, got p = {}, q = {}", self.p, self.q)));
        }
        if !(self.alpha > -2.0 && self.beta > -2.0) {
            return Err(invalid(format!("alpha and beta must exceed -2, got {} and {}", self.alpha, self.beta)));
        }
        if self.n < 1 || self.k >= self.n {
            return Err(invalid(format!("need n >= 1 and 0 <= k < n, got n = {}, k = {}", self.n, self.k)));
        }
        if let Some(l) = self.lambda() {
            if l <= -2.0 {
                return Err(invalid(format!("(p beta - q alpha) / (p - q) = {l} must exceed -2")));
            }
        }
        Ok(())
    }

    /// `(p beta - q alpha) / (p - q)` when `q < p`.
    pub fn lambda(&self) -> Option<f64> {
        (self.q < self.p).then(|| (self.p * self.beta - self.q * self.alpha) / (self.p - self.q))
    }

    pub fn label(&self) -> String {
        format!(
            "{:?} p={} q={} alpha={} beta={} n={} k={}",
            self.op_kind, self.p, self.q, self.alpha, self.beta, self.n, self.k
        )
    }
}

/// Grid and mesh settings shared by every norm computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NormSettings {
    pub quad: QuadratureSpec,
    pub aperture: Aperture,
    /// Equispaced boundary points for outer integrals.
    pub eta_samples: usize,
    /// Annuli `|u| = 1 - 2^-m`, `m = 1..=annulus_levels`, of the supremum grids.
    pub annulus_levels: usize,
    /// Equispaced directions of the supremum grids, on top of the integrand's foci.
    pub grid_angles: usize,
    /// Radial cap for pointwise suprema over approach regions.
    pub cap: f64,
}

impl Default for NormSettings {
    fn default() -> Self {
        NormSettings {
            quad: QuadratureSpec::default(),
            aperture: Aperture::default(),
            eta_samples: 256,
            annulus_levels: 10,
            grid_angles: 8,
            cap: 0.999,
        }
    }
}

impl NormSettings {
    pub fn profile_radii(&self) -> Vec<f64> {
        annulus_radii(self.annulus_levels)
    }
}

/// `1 - 2^-m` for `m = 1..=levels`.
pub fn annulus_radii(levels: usize) -> Vec<f64> {
    (1..=levels).map(|m| 1.0 - 0.5f64.powi(m as i32)).collect()
}

/// Per-annulus maxima of a quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

impl DecayProfile {
    pub fn new(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.len() != values.len() {
            return Err(Error::LengthMismatch { expected: radii.len(), got: values.len() });
        }
        if radii.windows(2).any(|w| w[0] >= w[1]) || radii.iter().any(|&r| !(0.0..1.0).contains(&r)) {
            return Err(invalid("profile radii must increase within [0, 1)"));
        }
        Ok(DecayProfile { radii, values })
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn last(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn scaled(&self, c: f64) -> DecayProfile {
        DecayProfile { radii: self.radii.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }
}

/// Supremum grid: the origin, annuli at the given radii sampled at common angles, and extra
/// points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupGrid {
    pub radii: Vec<f64>,
    pub angles: Vec<f64>,
    pub extra: Vec<DiskPoint>,
}

impl SupGrid {
    /// `levels` annuli, `n_angles` equispaced directions plus `focus_angles`.
    pub fn annular(levels: usize, n_angles: usize, focus_angles: &[f64]) -> SupGrid {
        let mut angles: Vec<f64> = (0..n_angles).map(|i| TAU * i as f64 / n_angles as f64).collect();
        angles.extend(focus_angles.iter().map(|a| a.rem_euclid(TAU)));
        angles.sort_by(f64::total_cmp);
        angles.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        SupGrid { radii: annulus_radii(levels), angles, extra: Vec::new() }
    }

    /// Annular grid through the directions of the sharpest foci.
    pub fn for_foci(settings: &NormSettings, foci: &[Focus]) -> SupGrid {
        let mut sharp = foci.to_vec();
        sharp.sort_by(|a, b| a.scale.total_cmp(&b.scale));
        let angles: Vec<f64> = sharp.iter().take(MAX_GRADED_FOCI).map(|f| f.angle).collect();
        SupGrid::annular(settings.annulus_levels, settings.grid_angles, &angles)
    }

    pub fn with_lattice(mut self, lattice: &Lattice) -> SupGrid {
        self.extra.extend(lattice.nodes.iter().copied());
        self
    }

    /// All grid points: the origin, then annulus by annulus, then the extras.
    pub fn points(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0)];
        for &r in &self.radii {
            out.extend(self.angles.iter().map(|&t| Complex64::from_polar(r, t)));
        }
        out.extend(self.extra.iter().map(|p| p.z()));
        out
    }

    /// Directions whose boundary neighbourhoods the grid probes, at its finest scale.
    pub fn directions(&self) -> Vec<Focus> {
        let scale = 1.0 - self.radii.last().copied().unwrap_or(0.0);
        self.angles.iter().map(|&angle| Focus { angle, scale }).collect()
    }

    pub fn len(&self) -> usize {
        1 + self.radii.len() * self.angles.len() + self.extra.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Per-annulus maxima of values laid out as in [`SupGrid::points`].
    fn profile(&self, values: &[f64]) -> DecayProfile {
        let na = self.angles.len();
        let maxima = (0..self.radii.len())
            .map(|i| values[1 + i * na..1 + (i + 1) * na].iter().copied().fold(0.0, f64::max))
            .collect();
        DecayProfile { radii: self.radii.clone(), values: maxima }
    }
}

/// A computed norm with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub value: f64,
    pub error_estimate: f64,
    pub converged: bool,
}

/// Result of the kernel test `sup_a int (1-|a|^2)^t / |1 - conj(a) z|^(t+1) dmu(z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelTest {
    pub sup: f64,
    pub argsup: [f64; 2],
    pub profile: DecayProfile,
    pub origin_value: f64,
    pub error_estimate: f64,
    pub converged: bool,
}

/// A measure frozen on one mesh, reused for every `a` (and every `t`) of a kernel test.
#[derive(Debug, Clone)]
pub struct KernelTester {
    integrand: WeightedIntegrand,
    sample: MeasureSample,
    grid: SupGrid,
    quad: QuadratureSpec,
}

impl KernelTester {
    pub fn new(integrand: WeightedIntegrand, grid: SupGrid, quad: &QuadratureSpec) -> Result<Self> {
        let sample = MeasureSample::build(&integrand, &grid.directions(), quad)?;
        Ok(KernelTester { integrand, sample, grid, quad: *quad })
    }

    pub fn sample(&self) -> &MeasureSample {
        &self.sample
    }

    /// Kernel test of the part of the measure in `|z| >= r_min`.
    pub fn run(&self, t: f64, r_min: f64) -> Result<KernelTest> {
        if !(t > 0.0) {
            return Err(invalid(format!("kernel test needs t > 0, got {t}")));
        }
        let start = self.sample.tail_start(r_min);
        let points = self.grid.points();
        let values: Vec<f64> = points.par_iter().map(|&a| self.sample.kernel_sum(a, t, start)).collect();
        let (mut best, mut sup) = (0usize, values[0]);
        for (i, &v) in values.iter().enumerate() {
            if v > sup {
                sup = v;
                best = i;
            }
        }
        let a = points[best];
        let (error_estimate, converged) = if sup > 0.0 {
            self.check_at(a, t, r_min, sup)?
        } else {
            (0.0, true)
        };
        Ok(KernelTest {
            sup,
            argsup: [a.re, a.im],
            profile: self.grid.profile(&values),
            origin_value: values[0],
            error_estimate,
            converged,
        })
    }

    /// Independent adaptive integral at the maximizing `a`.
    fn check_at(&self, a: Complex64, t: f64, r_min: f64, sampled: f64) -> Result<(f64, bool)> {
        let base = self.integrand.clone();
        let ab = a.conj();
        let pre = (1.0 - a.norm_sqr()).powf(t);
        let e = -(t + 1.0) / 2.0;
        let density = move |z: Complex64| pre * (Complex64::new(1.0, 0.0) - ab * z).norm_sqr().powf(e) * base.density(z);
        let mut foci = self.integrand.foci.clone();
        if a.norm() > 0.0 {
            foci.insert(0, Focus { angle: a.arg(), scale: 1.0 - a.norm() });
        }
        let check = WeightedIntegrand::new(density, self.integrand.weight_exponent).with_foci(foci);
        let region = if r_min > 0.0 { Region::Tail(r_min) } else { Region::Disk };
        let direct = region_integral(&check, &region, &self.quad)?;
        let err = (direct.value - sampled).abs() + direct.error_estimate;
        Ok((err, err <= self.quad.target_rel_err * sampled))
    }
}

/// Kernel test of `F` over the grid on a single mesh.
pub fn kernel_test(f: &WeightedIntegrand, t: f64, grid: &SupGrid, quad: &QuadratureSpec) -> Result<KernelTest> {
    KernelTester::new(f.clone(), grid.clone(), quad)?.run(t, 0.0)
}

fn check_p_alpha(p: f64, alpha: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(invalid(format!("p must be finite and positive, got {p}")));
    }
    if !(alpha > -2.0) {
        return Err(invalid(format!("alpha must exceed -2, got {alpha}")));
    }
    Ok(())
}

/// `|f|^p` as an integrand with weight exponent `gamma`, graded towards the foci of `f`.
pub fn power_density(f: &AnalyticFn, p: f64, gamma: f64) -> WeightedIntegrand {
    let g = f.clone();
    let foci = f.foci(0.5);
    WeightedIntegrand::new(move |z| g.evaluate(z).norm().powf(p), gamma).with_foci(foci)
}

/// Littlewood-Paley norm with its parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpNorm {
    pub value: f64,
    pub jet: f64,
    pub kernel: KernelTest,
    pub error_estimate: f64,
}

/// `(sum_{j<n} |f^(j)(0)|^p + sup_a int (1-|a|^2)^t / |1-conj(a)z|^(t+1) |f^(n)|^p (1-|z|^2)^(np+alpha+1) dA)^(1/p)`.
pub fn lp_norm(f: &AnalyticFn, p: f64, alpha: f64, n: usize, t: f64, settings: &NormSettings) -> Result<LpNorm> {
    lp_norms(f, p, alpha, n, &[t], settings).map(|mut v| v.remove(0))
}

/// [`lp_norm`] for several `t` on one mesh.
pub fn lp_norms(f: &AnalyticFn, p: f64, alpha: f64, n: usize, ts: &[f64], settings: &NormSettings) -> Result<Vec<LpNorm>> {
    check_p_alpha(p, alpha)?;
    if n < 1 {
        return Err(invalid("the Littlewood-Paley norm needs n >= 1"));
    }
    let jet: f64 = (0..n).map(|j| f.derivative(j).evaluate(Complex64::new(0.0, 0.0)).norm().powf(p)).sum();
    let dn = f.derivative(n);
    let density = power_density(&dn, p, n as f64 * p + alpha + 1.0);
    let grid = SupGrid::for_foci(settings, &density.foci);
    let tester = KernelTester::new(density, grid, &settings.quad)?;
    ts.iter()
        .map(|&t| {
            let kernel = tester.run(t, 0.0)?;
            let total = jet + kernel.sup;
            let value = total.powf(1.0 / p);
            let error_estimate = if total > 0.0 { value * kernel.error_estimate / (p * total) } else { 0.0 };
            Ok(LpNorm { value, jet, kernel, error_estimate })
        })
        .collect()
}

/// Per-annulus maxima of the Littlewood-Paley kernel test.
pub fn little_profile(f: &AnalyticFn, p: f64, alpha: f64, n: usize, t: f64, settings: &NormSettings) -> Result<DecayProfile> {
    Ok(lp_norm(f, p, alpha, n, t, settings)?.kernel.profile)
}

/// `(sup_u (1 / (1 - |u|^2)) int_{S(u)} |f|^p (1-|z|^2)^(alpha+1) dA)^(1/p)` over the grid.
pub fn tpinf_norm(f: &AnalyticFn, p: f64, alpha: f64, grid: &SupGrid, settings: &NormSettings) -> Result<NormValue> {
    check_p_alpha(p, alpha)?;
    let density = power_density(f, p, alpha + 1.0);
    let points = grid.points();
    let boxes: Vec<Result<(f64, f64, bool)>> = points
        .par_iter()
        .map(|&u| {
            let u = DiskPoint::from_complex(u)?;
            let r = region_integral(&density, &Region::CarlesonBox(u), &settings.quad)?;
            let d = u.defect();
            Ok((r.value / d, r.error_estimate / d, r.converged))
        })
        .collect();
    let mut best = (0.0, 0.0);
    let mut converged = true;
    for b in boxes {
        let (v, e, c) = b?;
        converged &= c;
        if v > best.0 {
            best = (v, e);
        }
    }
    let value = best.0.powf(1.0 / p);
    let error_estimate = if best.0 > 0.0 { value * best.1 / (p * best.0) } else { 0.0 };
    Ok(NormValue { value, error_estimate, converged })
}

/// Box averages `(1 / (1 - |u|^2)) int_{S(u)} |f|^p (1-|z|^2)^(alpha+1) dA` at every grid point.
pub fn box_averages(f: &AnalyticFn, p: f64, alpha: f64, grid: &SupGrid, settings: &NormSettings) -> Result<Vec<f64>> {
    check_p_alpha(p, alpha)?;
    let density = power_density(f, p, alpha + 1.0);
    grid.points()
        .par_iter()
        .map(|&u| {
            let u = DiskPoint::from_complex(u)?;
            Ok(region_integral(&density, &Region::CarlesonBox(u), &settings.quad)?.value / u.defect())
        })
        .collect()
}

/// `(int_T (int_{Gamma(eta)} |f|^p (1-|z|^2)^alpha dA)^(q/p) |d eta|)^(1/q)`.
pub fn tpq_norm(f: &AnalyticFn, p: f64, q: f64, alpha: f64, settings: &NormSettings) -> Result<NormValue> {
    check_p_alpha(p, alpha)?;
    if !(q > 0.0 && q.is_finite()) {
        return Err(invalid(format!("q must be finite and positive, got {q}")));
    }
    let density = power_density(f, p, alpha);
    let n = settings.eta_samples;
    let inner: Vec<Result<(f64, f64, bool)>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let eta = BoundaryPoint::from_angle(TAU * k as f64 / n as f64);
            let r = region_integral(&density, &Region::Nontangential { eta, zeta: settings.aperture }, &settings.quad)?;
            Ok((r.value, r.error_estimate, r.converged))
        })
        .collect();
    let inner = inner.into_iter().collect::<Result<Vec<_>>>()?;
    let converged = inner.iter().all(|x| x.2);
    let vals: Vec<f64> = inner.iter().map(|x| x.0.max(0.0).powf(q / p)).collect();
    let total = crate::quadrature::boundary_integral(|theta| vals[eta_index(theta, n)], n)?;
    let value = total.powf(1.0 / q);
    let rel = inner.iter().map(|x| if x.0 > 0.0 { x.1 / x.0 } else { 0.0 }).fold(0.0, f64::max);
    Ok(NormValue { value, error_estimate: value * rel / p, converged })
}

fn eta_index(theta: f64, n: usize) -> usize {
    ((theta / TAU * n as f64).round() as usize) % n
}

/// `(int_T (sup_{Gamma(eta), |z| <= cap} |f|)^q |d eta|)^(1/q)`.
pub fn tinfq_norm(f: &AnalyticFn, q: f64, settings: &NormSettings) -> Result<NormValue> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(invalid(format!("q must be finite and positive, got {q}")));
    }
    let n = settings.eta_samples;
    let sups: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| nontangential_max(f, BoundaryPoint::from_angle(TAU * k as f64 / n as f64), settings.aperture, settings.cap))
        .collect();
    let total = crate::quadrature::boundary_integral(|theta| sups[eta_index(theta, n)].powf(q), n)?;
    Ok(NormValue { value: total.powf(1.0 / q), error_estimate: 0.0, converged: true })
}

const NT_RADIAL: usize = 96;
const NT_ANGULAR: usize = 17;

/// Maximum of `|f|` over a grid in `Gamma(eta) ∩ { |z| <= cap }`.
pub fn nontangential_max(f: &AnalyticFn, eta: BoundaryPoint, zeta: Aperture, cap: f64) -> f64 {
    let region = Region::Nontangential { eta, zeta };
    let (lo, _) = region.radial_range();
    let (s_hi, s_lo) = (1.0 - lo * lo, 1.0 - cap * cap);
    if s_lo >= s_hi {
        return 0.0;
    }
    let mut best = 0.0f64;
    for i in 0..NT_RADIAL {
        // geometric in 1 - |z|^2 from the inner edge out to the cap
        let s = s_hi * (s_lo / s_hi).powf(i as f64 / (NT_RADIAL - 1) as f64);
        let r = (1.0 - s).sqrt();
        let (c, w) = match region.slice(r) {
            Slice::Empty => continue,
            Slice::Full => (0.0, std::f64::consts::PI),
            Slice::Arc { center, half_width } => (center, half_width * (1.0 - 1e-12)),
        };
        for j in 0..NT_ANGULAR {
            let th = c - w + 2.0 * w * j as f64 / (NT_ANGULAR - 1) as f64;
            best = best.max(f.evaluate(Complex64::from_polar(r, th)).norm());
        }
    }
    best
}

/// `max_z |f^(n)(z)| (1-|z|^2)^((alpha+2)/p + n) / ||f||` with the Littlewood-Paley norm of order
/// `max(n, 1)`.
pub fn growth_ratio(f: &AnalyticFn, p: f64, alpha: f64, n: usize, t: f64, z_samples: &[DiskPoint], settings: &NormSettings) -> Result<f64> {
    check_p_alpha(p, alpha)?;
    if f.is_zero() {
        return Ok(0.0);
    }
    let norm = lp_norm(f, p, alpha, n.max(1), t, settings)?.value;
    Ok(growth_ratio_with_norm(f, p, alpha, n, z_samples, norm))
}

/// [`growth_ratio`] against a precomputed norm.
pub fn growth_ratio_with_norm(f: &AnalyticFn, p: f64, alpha: f64, n: usize, z_samples: &[DiskPoint], norm: f64) -> f64 {
    let dn = f.derivative(n);
    let e = (alpha + 2.0) / p + n as f64;
    let m = z_samples.iter().map(|z| dn.evaluate_at(*z).norm() * z.defect().powf(e)).fold(0.0, f64::max);
    if norm > 0.0 { m / norm } else { 0.0 }
}

fn check_seq(x: &[Complex64], lattice: &Lattice) -> Result<()> {
    if x.len() != lattice.len() {
        return Err(Error::LengthMismatch { expected: lattice.len(), got: x.len() });
    }
    Ok(())
}

/// `(1 / (1 - |u|^2)) sum_{a_j in S(u)} |x_j|^p (1 - |a_j|^2)` at every grid point.
pub fn seq_box_sums(x: &[Complex64], lattice: &Lattice, p: f64, grid: &SupGrid) -> Result<Vec<f64>> {
    check_seq(x, lattice)?;
    if !(p > 0.0) {
        return Err(invalid(format!("p must be positive, got {p}")));
    }
    let terms: Vec<(DiskPoint, f64)> = lattice
        .nodes
        .iter()
        .zip(x)
        .filter(|(_, v)| v.norm() > 0.0)
        .map(|(a, v)| (*a, v.norm().powf(p) * a.defect()))
        .collect();
    let points = grid.points();
    Ok(points
        .par_iter()
        .map(|&u| {
            let u = DiskPoint::from_complex(u).expect("grid points lie in the disk");
            let s: f64 = terms.iter().filter(|(a, _)| crate::geometry::in_carleson_box(u, *a)).map(|(_, w)| w).sum();
            s / u.defect()
        })
        .collect())
}

/// `(sup_u (1 / (1 - |u|^2)) sum_{a_j in S(u)} |x_j|^p (1 - |a_j|^2))^(1/p)` over the grid.
pub fn seq_tent_norm(x: &[Complex64], lattice: &Lattice, p: f64, grid: &SupGrid) -> Result<f64> {
    let sums = seq_box_sums(x, lattice, p, grid)?;
    Ok(sums.into_iter().fold(0.0, f64::max).powf(1.0 / p))
}

/// Per-annulus maxima of the sequence box sums.
pub fn seq_little_profile(x: &[Complex64], lattice: &Lattice, p: f64, grid: &SupGrid) -> Result<DecayProfile> {
    let sums = seq_box_sums(x, lattice, p, grid)?;
    Ok(grid.profile(&sums))
}

/// The grid used for sequence norms on a lattice: annuli, their directions and the nodes.
pub fn lattice_grid(lattice: &Lattice, settings: &NormSettings) -> SupGrid {
    SupGrid::annular(settings.annulus_levels, settings.grid_angles, &[]).with_lattice(lattice)
}

/// One CSV row describing a computed norm or profile value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRecord {
    pub kind: String,
    pub params: String,
    pub value: f64,
    pub grid: String,
    pub error_estimate: f64,
}

impl NormRecord {
    pub fn new(kind: &str, params: String, value: f64, grid: &SupGrid, error_estimate: f64) -> Self {
        NormRecord {
            kind: kind.to_string(),
            params,
            value,
            grid: format!("annuli={} angles={} extra={}", grid.radii.len(), grid.angles.len(), grid.extra.len()),
            error_estimate,
        }
    }
}
