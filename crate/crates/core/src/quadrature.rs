//! Weighted area integrals over the disk and its subregions.
//!
//! Integrals `int F(z) (1 - |z|^2)^gamma dA(z)` with `dA = dx dy / pi` are computed in the
//! coordinates `s = 1 - |z|^2`, `theta = arg z`, where `dA = ds dtheta / (2 pi)`.
//!
//! * radially, `x = -ln s` is split into panels of width `ln 2`, i.e. the levels
//!   `1 - |z|^2 = 2^-m` are panel boundaries. The weight `s^gamma` is folded into the nodes and
//!   the last piece `(0, 2^-L)` is integrated exactly in `s^(gamma + 1)`;
//! * angularly, each circle is cut into a few uniform base panels plus panels graded
//!   geometrically towards every focus direction, down to the local length scale
//!   `scale + (1 - r)`;
//! * Gauss-Legendre of the same order is used on every panel in both directions.
//!
//! Regions are integrated by slicing: the circle `|z| = r` meets each supported region in an
//! arc that is known in closed form, so no cell ever straddles a region boundary.

use std::f64::consts::{LN_2, PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{DiskPoint, Region, Slice};

/// A boundary direction near which an integrand varies on the length scale `scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Focus {
    pub angle: f64,
    pub scale: f64,
}

/// Mesh controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    /// Radial panels reach down to `1 - |z|^2 = 2^-radial_levels`.
    pub radial_levels: usize,
    /// Uniform angular panels on a full circle.
    pub angular_base: usize,
    /// Finest angular panel beside a focus is `10 * boundary_margin * (scale + 1 - r)`.
    pub boundary_margin: f64,
    /// Relative error above which a result is flagged as not converged.
    pub target_rel_err: f64,
    /// Gauss-Legendre points per panel and direction.
    pub order: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { radial_levels: 24, angular_base: 16, boundary_margin: 0.05, target_rel_err: 1e-3, order: 5 }
    }
}

/// Most integrand foci that get their own graded angular panels; the rest are absorbed by a
/// finer uniform base.
pub const MAX_GRADED_FOCI: usize = 12;
const MAX_BASE_PANELS: usize = 1024;

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.radial_levels < 8 {
            return Err(invalid(format!("radial_levels must be at least 8, got {}", self.radial_levels)));
        }
        if !(self.boundary_margin > 0.0 && self.boundary_margin < 0.1) {
            return Err(invalid(format!("boundary_margin must lie in (0, 0.1), got {}", self.boundary_margin)));
        }
        if self.angular_base < 2 || self.order < 3 || self.order > 32 {
            return Err(invalid("angular_base must be >= 2 and order in 3..=32"));
        }
        if !(self.target_rel_err > 0.0) {
            return Err(invalid("target_rel_err must be positive"));
        }
        Ok(())
    }

    /// The next finer mesh: more radial levels, twice the base panels, one more point per panel.
    pub fn refined(&self) -> QuadratureSpec {
        QuadratureSpec {
            radial_levels: self.radial_levels + 8,
            angular_base: self.angular_base * 2,
            boundary_margin: self.boundary_margin / 2.0,
            order: self.order + 1,
            ..*self
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Gauss-Legendre rule on `[a, b]` appended to `out` as `(node, weight)`.
fn push_panel(a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>), out: &mut Vec<(f64, f64)>) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    for (x, w) in rule.0.iter().zip(&rule.1) {
        out.push((mid + half * x, half * w));
    }
}

/// Nonnegative density paired with the weight `(1 - |z|^2)^gamma`.
#[derive(Clone)]
pub struct WeightedIntegrand {
    density: Arc<dyn Fn(Complex64) -> f64 + Send + Sync>,
    pub weight_exponent: f64,
    pub foci: Vec<Focus>,
}

impl std::fmt::Debug for WeightedIntegrand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WeightedIntegrand")
            .field("weight_exponent", &self.weight_exponent)
            .field("foci", &self.foci)
            .finish_non_exhaustive()
    }
}

impl WeightedIntegrand {
    pub fn new(density: impl Fn(Complex64) -> f64 + Send + Sync + 'static, weight_exponent: f64) -> Self {
        WeightedIntegrand { density: Arc::new(density), weight_exponent, foci: Vec::new() }
    }

    pub fn with_foci(mut self, foci: Vec<Focus>) -> Self {
        self.foci = foci;
        self
    }

    #[inline]
    pub fn density(&self, z: Complex64) -> f64 {
        (self.density)(z)
    }
}

/// Radial rule for `int h(s) s^gamma ds` over `[s_lo, s_hi]`.
///
/// Returns the nodes and weights, and the index where the boundary end piece starts
/// (`len` when there is none).
fn radial_rule(s_lo: f64, s_hi: f64, breaks: &[f64], gamma: f64, spec: &QuadratureSpec, order: usize) -> (Vec<(f64, f64)>, usize) {
    let rule = gauss_legendre(order);
    let x_top = if s_hi >= 1.0 { 0.0 } else { -s_hi.ln() };
    let deepest = spec.radial_levels as f64 * LN_2;
    let to_boundary = s_lo <= 0.0;
    let x_bot = if to_boundary { deepest.max(x_top + 8.0 * LN_2) } else { -s_lo.ln() };

    let mut cuts = Vec::new();
    if x_bot > x_top {
        let n = ((x_bot - x_top) / LN_2).ceil().max(1.0) as usize;
        for i in 0..=n {
            cuts.push(x_top + (x_bot - x_top) * i as f64 / n as f64);
        }
        if x_top == 0.0 {
            // grade towards the origin where r = sqrt(1 - s) is not smooth in s
            let first = cuts[1];
            for j in 1..=6 {
                cuts.push(first * 0.5f64.powi(j));
            }
        }
        for &b in breaks {
            if b > 0.0 && b < 1.0 {
                let xb = -b.ln();
                if xb > x_top && xb < x_bot {
                    cuts.push(xb);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    }

    let mut xs = Vec::new();
    for w in cuts.windows(2) {
        push_panel(w[0], w[1], &rule, &mut xs);
    }
    let mut out: Vec<(f64, f64)> = xs
        .into_iter()
        .map(|(x, w)| {
            let s = (-x).exp();
            (s, w * (-(gamma + 1.0) * x).exp())
        })
        .collect();
    let tail_start = out.len();
    if to_boundary && gamma > -1.0 {
        // int_0^{s_min} h(s) s^gamma ds with s = s_min v^{1/(gamma+1)}
        let s_min = (-x_bot).exp();
        let scale = s_min.powf(gamma + 1.0) / (gamma + 1.0);
        let mut vs = Vec::new();
        push_panel(0.0, 1.0, &rule, &mut vs);
        // s decreases with v^{-1}; keep radii nondecreasing
        for (v, w) in vs.into_iter().rev() {
            out.push((s_min * v.powf(1.0 / (gamma + 1.0)), scale * w));
        }
    }
    // x increases outwards, so rings already run from the origin to the boundary
    (out, tail_start)
}

/// Angular panel boundaries for one circle of radius `r`.
fn angular_cuts(slice: Slice, r: f64, foci: &[Focus], spec: &QuadratureSpec) -> Vec<f64> {
    let h = 1.0 - r;
    let (graded, rest) = foci.split_at(foci.len().min(MAX_GRADED_FOCI));
    let mut base = spec.angular_base;
    if let Some(min_rest) = rest.iter().map(|f| f.scale).reduce(f64::min) {
        let need = (PI / (min_rest + h)).ceil() as usize;
        base = base.max(need.min(MAX_BASE_PANELS));
    }
    let base_width = TAU / base as f64;
    let fine = 10.0 * spec.boundary_margin;

    let (lo, hi) = match slice {
        Slice::Empty => return Vec::new(),
        Slice::Full => (0.0, TAU),
        Slice::Arc { center, half_width } => (center - half_width, center + half_width),
    };
    let n_base = (((hi - lo) / base_width).ceil() as usize).max(2);
    let mut cuts: Vec<f64> = (0..=n_base).map(|i| lo + (hi - lo) * i as f64 / n_base as f64).collect();

    let width = hi - lo;
    for f in graded {
        // representative of the focus angle closest to the window
        let mid = 0.5 * (lo + hi);
        let phi = mid + (f.angle - mid + PI).rem_euclid(TAU) - PI;
        let delta = (fine * (f.scale + h)).max(1e-15);
        let mut offsets = vec![0.0];
        let mut d = delta;
        while d < base_width {
            offsets.push(d);
            d *= 2.0;
        }
        for off in offsets {
            for cand in [phi - off, phi + off] {
                let c = if width >= TAU - 1e-15 { lo + (cand - lo).rem_euclid(TAU) } else { cand };
                if c > lo && c < hi {
                    cuts.push(c);
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    cuts
}

/// Quadrature nodes on one circle: `(theta, weight)` with weights summing to the arc length.
fn angular_rule(slice: Slice, r: f64, foci: &[Focus], spec: &QuadratureSpec, rule: &(Vec<f64>, Vec<f64>)) -> Vec<(f64, f64)> {
    let cuts = angular_cuts(slice, r, foci, spec);
    let mut out = Vec::with_capacity(cuts.len() * rule.0.len());
    for w in cuts.windows(2) {
        push_panel(w[0], w[1], rule, &mut out);
    }
    out
}

/// Value of an integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub converged: bool,
}

impl QuadResult {
    pub fn rel_err(&self) -> f64 {
        if self.value == 0.0 {
            if self.error_estimate == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            self.error_estimate / self.value.abs()
        }
    }

    /// Turns a flagged result into an error.
    pub fn require(self, target: f64) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::NonConvergence { value: self.value, rel_err: self.rel_err(), target })
        }
    }
}

/// One pass of sliced quadrature; returns the integral and the contribution of the boundary
/// end piece.
fn region_pass(f: &WeightedIntegrand, region: &Region, spec: &QuadratureSpec, order: usize) -> (f64, f64) {
    let (r_lo, r_hi) = region.radial_range();
    let s_hi = 1.0 - r_lo * r_lo;
    let s_lo = if r_hi >= 1.0 { 0.0 } else { 1.0 - r_hi * r_hi };
    let breaks: Vec<f64> = region.radial_breaks().into_iter().map(|r| 1.0 - r * r).collect();
    let (radial, tail_start) = radial_rule(s_lo, s_hi, &breaks, f.weight_exponent, spec, order);
    let rule = gauss_legendre(order);
    let rings: Vec<f64> = radial
        .par_iter()
        .map(|&(s, ws)| {
            let r = (1.0 - s).max(0.0).sqrt();
            let ang = angular_rule(region.slice(r), r, &f.foci, spec, &rule);
            let inner: f64 = ang.iter().map(|&(t, wt)| wt * f.density(Complex64::from_polar(r, t))).sum();
            ws * inner / TAU
        })
        .collect();
    let total: f64 = rings.iter().sum();
    let tail: f64 = rings[tail_start..].iter().sum();
    (total, tail)
}

/// `int_region F(z) (1 - |z|^2)^gamma dA(z)` with an error estimate.
pub fn region_integral(f: &WeightedIntegrand, region: &Region, spec: &QuadratureSpec) -> Result<QuadResult> {
    spec.validate()?;
    let (fine, tail) = region_pass(f, region, spec, spec.order);
    let (coarse, _) = region_pass(f, region, spec, spec.order - 2);
    let error_estimate = (fine - coarse).abs() + tail.abs();
    let converged = error_estimate <= spec.target_rel_err * fine.abs() || fine == 0.0 && error_estimate == 0.0;
    Ok(QuadResult { value: fine, error_estimate, converged })
}

/// `int_D F(z) (1 - |z|^2)^gamma dA(z)`, `gamma > -1`.
pub fn disk_integral(f: &WeightedIntegrand, spec: &QuadratureSpec) -> Result<QuadResult> {
    if !(f.weight_exponent > -1.0) {
        return Err(invalid(format!("disk integrals need weight exponent > -1, got {}", f.weight_exponent)));
    }
    region_integral(f, &Region::Disk, spec)
}

/// Trapezoidal rule on `samples` equispaced points of the circle (total mass `2 pi`).
pub fn boundary_integral(h: impl Fn(f64) -> f64 + Sync, samples: usize) -> Result<f64> {
    if samples < 64 {
        return Err(invalid(format!("boundary integrals need at least 64 samples, got {samples}")));
    }
    let vals: Vec<f64> = (0..samples).into_par_iter().map(|k| h(TAU * k as f64 / samples as f64)).collect();
    Ok(vals.iter().sum::<f64>() * TAU / samples as f64)
}

/// A measure `density (1 - |z|^2)^gamma dA` frozen onto one quadrature mesh, as point masses.
///
/// Nodes are stored circle by circle from the origin outwards.
#[derive(Debug, Clone)]
pub struct MeasureSample {
    pub points: Vec<Complex64>,
    pub masses: Vec<f64>,
    /// `|z|` per node, nondecreasing.
    pub radii: Vec<f64>,
}

impl MeasureSample {
    /// Samples `f` on a mesh graded towards its foci and the extra `directions`.
    pub fn build(f: &WeightedIntegrand, directions: &[Focus], spec: &QuadratureSpec) -> Result<MeasureSample> {
        spec.validate()?;
        let mut foci = f.foci.clone();
        foci.sort_by(|a, b| a.scale.total_cmp(&b.scale));
        // the extra directions always get graded panels
        let mut all: Vec<Focus> = directions.to_vec();
        let room = MAX_GRADED_FOCI;
        all.extend(foci.iter().take(room).copied());
        all.extend(foci.iter().skip(room).copied());
        let graded_len = directions.len() + foci.len().min(room);

        let (radial, _) = radial_rule(0.0, 1.0, &[], f.weight_exponent, spec, spec.order);
        let rule = gauss_legendre(spec.order);
        let rings: Vec<Vec<(Complex64, f64)>> = radial
            .par_iter()
            .map(|&(s, ws)| {
                let r = (1.0 - s).max(0.0).sqrt();
                let ang = angular_rule_graded(r, &all, graded_len, spec, &rule);
                ang.into_iter()
                    .filter_map(|(t, wt)| {
                        let z = Complex64::from_polar(r, t);
                        let m = ws * wt * f.density(z) / TAU;
                        (m > 0.0).then_some((z, m))
                    })
                    .collect()
            })
            .collect();
        let mut points = Vec::new();
        let mut masses = Vec::new();
        let mut radii = Vec::new();
        for (ring, &(s, _)) in rings.into_iter().zip(&radial) {
            let r = (1.0 - s).max(0.0).sqrt();
            for (z, m) in ring {
                points.push(z);
                masses.push(m);
                radii.push(r);
            }
        }
        Ok(MeasureSample { points, masses, radii })
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Index of the first node with `|z| >= r`.
    pub fn tail_start(&self, r: f64) -> usize {
        self.radii.partition_point(|&x| x < r)
    }

    /// `sum_i mass_i (1 - |a|^2)^t / |1 - conj(a) z_i|^(t+1)` over the nodes from `start` on.
    pub fn kernel_sum(&self, a: Complex64, t: f64, start: usize) -> f64 {
        let ab = a.conj();
        let log_pre = t * (1.0 - a.norm_sqr()).ln();
        let e = -(t + 1.0) / 2.0;
        let mut acc = 0.0;
        for (z, m) in self.points[start..].iter().zip(&self.masses[start..]) {
            let w = Complex64::new(1.0, 0.0) - ab * z;
            acc += m * (log_pre + e * w.norm_sqr().ln()).exp();
        }
        acc
    }
}

fn angular_rule_graded(r: f64, foci: &[Focus], graded: usize, spec: &QuadratureSpec, rule: &(Vec<f64>, Vec<f64>)) -> Vec<(f64, f64)> {
    // the first `graded` foci are graded, the remainder refine the base
    let h = 1.0 - r;
    let mut local = *spec;
    if let Some(min_rest) = foci[graded.min(foci.len())..].iter().map(|f| f.scale).reduce(f64::min) {
        let need = (PI / (min_rest + h)).ceil() as usize;
        local.angular_base = local.angular_base.max(need.min(MAX_BASE_PANELS));
    }
    let cuts = angular_cuts_unbounded(r, &foci[..graded.min(foci.len())], &local);
    let mut out = Vec::with_capacity(cuts.len() * rule.0.len());
    for w in cuts.windows(2) {
        push_panel(w[0], w[1], rule, &mut out);
    }
    out
}

fn angular_cuts_unbounded(r: f64, foci: &[Focus], spec: &QuadratureSpec) -> Vec<f64> {
    let h = 1.0 - r;
    let base_width = TAU / spec.angular_base as f64;
    let fine = 10.0 * spec.boundary_margin;
    let mut cuts: Vec<f64> = (0..=spec.angular_base).map(|i| TAU * i as f64 / spec.angular_base as f64).collect();
    for f in foci {
        let delta = (fine * (f.scale + h)).max(1e-15);
        let mut d = delta;
        let phi = f.angle.rem_euclid(TAU);
        cuts.push(phi);
        while d < base_width {
            cuts.push((phi - d).rem_euclid(TAU));
            cuts.push((phi + d).rem_euclid(TAU));
            d *= 2.0;
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    cuts
}

/// `LHS / RHS` of the Forelli-Rudin type estimate
/// `int (1-|z|^2)^s / (|1 - conj(a) z|^r |1 - conj(b) z|^t) dA <= C / (|1 - conj(a) b|^r (1-|b|^2)^(t-s-2))`.
pub fn forelli_rudin_check(a: DiskPoint, b: DiskPoint, s: f64, r: f64, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(s > -1.0 && r > 0.0 && t > 0.0 && r + t - s - 2.0 > 0.0 && r < s + 2.0 && s + 2.0 < t) {
        return Err(invalid(format!(
            "estimate needs s > -1, r, t > 0, r + t - s - 2 > 0 and r < s + 2 < t; got s = {s}, r = {r}, t = {t}"
        )));
    }
    let (az, bz) = (a.z(), b.z());
    let one = Complex64::new(1.0, 0.0);
    let density = move |z: Complex64| {
        (one - az.conj() * z).norm_sqr().powf(-r / 2.0) * (one - bz.conj() * z).norm_sqr().powf(-t / 2.0)
    };
    let foci = vec![
        Focus { angle: a.arg(), scale: 1.0 - a.modulus() },
        Focus { angle: b.arg(), scale: 1.0 - b.modulus() },
    ];
    let integrand = WeightedIntegrand::new(density, s).with_foci(foci);
    let lhs = disk_integral(&integrand, spec)?.value;
    let rhs = 1.0 / ((one - az.conj() * bz).norm().powf(r) * b.defect().powf(t - s - 2.0));
    Ok(lhs / rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in 3..12 {
            let (x, w) = gauss_legendre(n);
            for k in 0..2 * n {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
                let want = if k % 2 == 1 { 0.0 } else { 2.0 / (k + 1) as f64 };
                assert!((got - want).abs() < 1e-13, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn weight_moments_are_exact() {
        let spec = QuadratureSpec::default();
        for gamma in [-0.5, 0.0, 1.0, 2.5] {
            let f = WeightedIntegrand::new(|_| 1.0, gamma);
            let got = disk_integral(&f, &spec).unwrap();
            assert_relative_eq!(got.value, 1.0 / (gamma + 1.0), max_relative = 1e-6);
            assert!(got.converged);
        }
    }

    #[test]
    fn disk_integral_rejects_non_integrable_weight() {
        let f = WeightedIntegrand::new(|_| 1.0, -1.0);
        assert!(disk_integral(&f, &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn region_examples() {
        let spec = QuadratureSpec::default();
        let one = WeightedIntegrand::new(|_| 1.0, 0.0);
        let full = region_integral(&one, &Region::CarlesonBox(DiskPoint::ORIGIN), &spec).unwrap();
        assert_relative_eq!(full.value, 1.0, max_relative = 1e-10);
        let rh = 0.8;
        let d = region_integral(&one, &Region::HyperbolicDisk { center: DiskPoint::ORIGIN, radius: rh }, &spec).unwrap();
        assert_relative_eq!(d.value, rh.tanh().powi(2), max_relative = 1e-9);
    }

    #[test]
    fn boundary_examples() {
        assert_relative_eq!(boundary_integral(|_| 1.0, 64).unwrap(), TAU, max_relative = 1e-14);
        assert_relative_eq!(boundary_integral(|t: f64| t.cos().abs(), 4096).unwrap(), 4.0, max_relative = 1e-5);
        assert!(boundary_integral(|_| 1.0, 63).is_err());
    }

    #[test]
    fn forelli_rudin_examples() {
        let spec = QuadratureSpec::default();
        let o = DiskPoint::ORIGIN;
        // integrand is 1 and the right-hand side is 1
        assert_relative_eq!(forelli_rudin_check(o, o, 0.0, 1.0, 3.0, &spec).unwrap(), 1.0, max_relative = 1e-9);
        assert!(forelli_rudin_check(o, o, 0.0, 3.0, 3.0, &spec).is_err());
        assert!(forelli_rudin_check(o, o, -1.0, 0.5, 3.0, &spec).is_err());
        let b = DiskPoint::new(0.9, 0.0).unwrap();
        let ratio = forelli_rudin_check(o, b, 0.0, 1.0, 3.0, &spec).unwrap();
        assert!(ratio.is_finite() && ratio > 0.0);
    }

    #[test]
    fn measure_sample_matches_disk_integral() {
        let spec = QuadratureSpec::default();
        let f = WeightedIntegrand::new(|z: Complex64| 1.0 / (Complex64::new(1.0, 0.0) - z).norm_sqr(), 1.0)
            .with_foci(vec![Focus { angle: 0.0, scale: 0.0 }]);
        let direct = disk_integral(&f, &spec).unwrap().value;
        let sample = MeasureSample::build(&f, &[], &spec).unwrap();
        assert_relative_eq!(sample.total_mass(), direct, max_relative = 1e-9);
        // t-kernel at a = 0 is identically one
        assert_relative_eq!(sample.kernel_sum(Complex64::new(0.0, 0.0), 2.0, 0), direct, max_relative = 1e-12);
    }
}
