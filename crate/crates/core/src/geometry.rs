//! Points, metrics, approach regions, Carleson boxes and lattices on the unit disk.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A point of the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct DiskPoint(Complex64);

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint(Complex64::new(0.0, 0.0));

    pub fn new(re: f64, im: f64) -> Result<Self> {
        Self::from_complex(Complex64::new(re, im))
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        if !(z.norm_sqr() < 1.0) {
            return Err(invalid(format!("point {z} is not in the open unit disk")));
        }
        Ok(DiskPoint(z))
    }

    /// Point with modulus `radius` and argument `angle`.
    pub fn polar(radius: f64, angle: f64) -> Result<Self> {
        Self::from_complex(Complex64::from_polar(radius, angle))
    }

    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }

    pub fn z(&self) -> Complex64 {
        self.0
    }

    pub fn modulus(&self) -> f64 {
        self.0.norm()
    }

    pub fn arg(&self) -> f64 {
        self.0.arg()
    }

    /// `1 - |z|^2`.
    pub fn defect(&self) -> f64 {
        1.0 - self.0.norm_sqr()
    }
}

impl TryFrom<[f64; 2]> for DiskPoint {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        DiskPoint::new(v[0], v[1])
    }
}

impl From<DiskPoint> for [f64; 2] {
    fn from(p: DiskPoint) -> Self {
        [p.0.re, p.0.im]
    }
}

/// A point of the unit circle, stored by its argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub angle: f64,
}

impl BoundaryPoint {
    pub fn from_angle(angle: f64) -> Self {
        BoundaryPoint { angle }
    }

    pub fn from_complex(eta: Complex64) -> Result<Self> {
        if (eta.norm() - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("{eta} is not on the unit circle")));
        }
        Ok(BoundaryPoint { angle: eta.arg() })
    }

    pub fn z(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }
}

/// Aperture of the non-tangential approach region; must exceed 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Aperture(f64);

impl Aperture {
    pub fn new(zeta: f64) -> Result<Self> {
        if !(zeta > 0.5) || !zeta.is_finite() {
            return Err(invalid(format!("aperture must exceed 1/2, got {zeta}")));
        }
        Ok(Aperture(zeta))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

impl Default for Aperture {
    fn default() -> Self {
        Aperture(1.0)
    }
}

impl TryFrom<f64> for Aperture {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Aperture::new(v)
    }
}

impl From<Aperture> for f64 {
    fn from(a: Aperture) -> f64 {
        a.0
    }
}

/// Pseudo-hyperbolic distance `|z - w| / |1 - conj(w) z|`.
pub fn pseudo_hyperbolic(z: DiskPoint, w: DiskPoint) -> f64 {
    pseudo_hyperbolic_c(z.0, w.0)
}

pub(crate) fn pseudo_hyperbolic_c(z: Complex64, w: Complex64) -> f64 {
    let num = (z - w).norm();
    if num == 0.0 {
        return 0.0;
    }
    (num / (Complex64::new(1.0, 0.0) - w.conj() * z).norm()).min(1.0 - f64::EPSILON)
}

/// Hyperbolic distance `artanh(rho(z, w))`.
pub fn hyperbolic(z: DiskPoint, w: DiskPoint) -> f64 {
    pseudo_hyperbolic(z, w).atanh()
}

pub(crate) fn hyperbolic_c(z: Complex64, w: Complex64) -> f64 {
    pseudo_hyperbolic_c(z, w).atanh()
}

/// Smallest absolute difference between two angles, in `[0, pi]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Membership in the non-tangential region `|z - eta| < zeta (1 - |z|^2)`.
pub fn in_nontangential(z: DiskPoint, eta: BoundaryPoint, zeta: Aperture) -> bool {
    (z.0 - eta.z()).norm() < zeta.0 * z.defect()
}

/// Membership in the Carleson box `S(u)`; `S(0)` is the whole disk.
pub fn in_carleson_box(u: DiskPoint, z: DiskPoint) -> bool {
    let r = u.modulus();
    if r == 0.0 {
        return true;
    }
    z.modulus() >= r && angular_distance(z.arg(), u.arg()) <= (1.0 - r) / 2.0
}

/// Membership in the hyperbolic disk `D(center, r)`.
pub fn in_hyperbolic_disk(center: DiskPoint, r: f64, z: DiskPoint) -> bool {
    hyperbolic(center, z) < r
}

/// Exhaustive pairwise separation check.
pub fn is_separated(nodes: &[DiskPoint], tau: f64) -> bool {
    nodes.iter().enumerate().all(|(i, a)| {
        nodes[i + 1..]
            .iter()
            .all(|b| hyperbolic_c(a.0, b.0) >= tau)
    })
}

/// The part of a region lying on the circle `|z| = r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slice {
    Empty,
    Full,
    /// Closed arc `[center - half_width, center + half_width]`, with `half_width < pi`.
    Arc { center: f64, half_width: f64 },
}

/// Regions over which area integrals are taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Disk,
    CarlesonBox(DiskPoint),
    Nontangential { eta: BoundaryPoint, zeta: Aperture },
    HyperbolicDisk { center: DiskPoint, radius: f64 },
    /// `{ |z| >= r }`.
    Tail(f64),
}

impl Region {
    pub fn contains(&self, z: DiskPoint) -> bool {
        match *self {
            Region::Disk => true,
            Region::CarlesonBox(u) => in_carleson_box(u, z),
            Region::Nontangential { eta, zeta } => in_nontangential(z, eta, zeta),
            Region::HyperbolicDisk { center, radius } => in_hyperbolic_disk(center, radius, z),
            Region::Tail(r) => z.modulus() >= r,
        }
    }

    /// Radii `[lo, hi]` outside of which the region is empty.
    pub fn radial_range(&self) -> (f64, f64) {
        match *self {
            Region::Disk => (0.0, 1.0),
            Region::CarlesonBox(u) => (u.modulus(), 1.0),
            Region::Nontangential { zeta, .. } => ((1.0 / zeta.0 - 1.0).max(0.0), 1.0),
            Region::HyperbolicDisk { center, radius } => {
                let (c, rad) = euclidean_disk(center, radius);
                let d = c.norm();
                ((d - rad).max(0.0), (d + rad).min(1.0))
            }
            Region::Tail(r) => (r.clamp(0.0, 1.0), 1.0),
        }
    }

    /// Radii at which the slice changes shape (kinks of the angular window).
    pub fn radial_breaks(&self) -> Vec<f64> {
        match *self {
            Region::Nontangential { zeta, .. } if zeta.0 > 1.0 => {
                // window covers the full circle while (1 + r^2 - zeta^2 (1 - r^2)^2) / (2r) <= -1,
                // i.e. (1 + r)^2 <= zeta^2 (1 - r^2)^2, i.e. 1 <= zeta (1 - r)
                vec![1.0 - 1.0 / zeta.0]
            }
            Region::HyperbolicDisk { center, radius } => {
                let (c, rad) = euclidean_disk(center, radius);
                let d = c.norm();
                if rad > d {
                    vec![rad - d]
                } else {
                    vec![]
                }
            }
            _ => vec![],
        }
    }

    /// Intersection with the circle `|z| = r`.
    pub fn slice(&self, r: f64) -> Slice {
        let (lo, hi) = self.radial_range();
        if r < lo || r > hi {
            return Slice::Empty;
        }
        match *self {
            Region::Disk => Slice::Full,
            Region::Tail(_) => Slice::Full,
            Region::CarlesonBox(u) => {
                let m = u.modulus();
                if m == 0.0 {
                    Slice::Full
                } else {
                    Slice::Arc { center: u.arg(), half_width: (1.0 - m) / 2.0 }
                }
            }
            Region::Nontangential { eta, zeta } => {
                if r == 0.0 {
                    return if 1.0 < zeta.0 { Slice::Full } else { Slice::Empty };
                }
                let d = 1.0 - r * r;
                let c = (1.0 + r * r - zeta.0 * zeta.0 * d * d) / (2.0 * r);
                if c <= -1.0 {
                    Slice::Full
                } else if c >= 1.0 {
                    Slice::Empty
                } else {
                    Slice::Arc { center: eta.angle, half_width: c.acos() }
                }
            }
            Region::HyperbolicDisk { center, radius } => {
                let (c, rad) = euclidean_disk(center, radius);
                let d = c.norm();
                if d == 0.0 {
                    return if r < rad { Slice::Full } else { Slice::Empty };
                }
                let cosw = (r * r + d * d - rad * rad) / (2.0 * r * d);
                if cosw <= -1.0 {
                    Slice::Full
                } else if cosw >= 1.0 {
                    Slice::Empty
                } else {
                    Slice::Arc { center: c.arg(), half_width: cosw.acos() }
                }
            }
        }
    }
}

/// Euclidean center and radius of the hyperbolic disk `D(center, r)`.
pub fn euclidean_disk(center: DiskPoint, r: f64) -> (Complex64, f64) {
    let rho = r.tanh();
    let a = center.0;
    let a2 = a.norm_sqr();
    let den = 1.0 - rho * rho * a2;
    (a * ((1.0 - rho * rho) / den), rho * (1.0 - a2) / den)
}

/// A finite `(r, kappa)`-lattice truncated at `|a_j| <= cap`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub nodes: Vec<DiskPoint>,
    pub r: f64,
    pub kappa: f64,
    pub cap: f64,
    /// Largest sampled distance from a point of `{|z| <= cap}` to the nearest node.
    pub covering_radius: f64,
    rings: Vec<Ring>,
}

#[derive(Debug, Clone, PartialEq)]
struct Ring {
    hyp_radius: f64,
    /// Index of the first node of the ring in `Lattice::nodes`.
    start: usize,
    count: usize,
    offset: f64,
}

/// Serialized lattice, optionally carrying a sequence indexed by its nodes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeFile {
    pub r: f64,
    pub kappa: f64,
    pub nodes: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<[f64; 2]>>,
}

impl Lattice {
    /// Annular lattice: the origin plus rings at hyperbolic radii `m * delta`, the last ring
    /// sitting exactly at the cap, each ring carrying as many equispaced nodes as the
    /// separation `2 kappa` allows.
    pub fn generate(r: f64, kappa: f64, cap: f64) -> Result<Lattice> {
        if !(kappa > 0.0) || !(r > kappa) {
            return Err(invalid(format!("lattice needs r > kappa > 0, got r = {r}, kappa = {kappa}")));
        }
        if !(cap > 0.0 && cap < 1.0) {
            return Err(invalid(format!("radial cap must lie in (0, 1), got {cap}")));
        }
        let r_cap = cap.atanh();
        let steps = (r_cap / (2.0 * kappa)).floor() as usize;
        let delta = if steps > 0 { r_cap / steps as f64 } else { 0.0 };
        let sep = (2.0 * kappa).tanh();

        let mut nodes = vec![DiskPoint::ORIGIN];
        let mut rings = vec![Ring { hyp_radius: 0.0, start: 0, count: 1, offset: 0.0 }];
        for m in 1..=steps {
            let hyp = if m == steps { r_cap } else { m as f64 * delta };
            let rho = hyp.tanh().min(cap);
            let count = max_ring_count(rho, sep);
            let offset = if m % 2 == 1 { PI / count as f64 } else { 0.0 };
            let start = nodes.len();
            for j in 0..count {
                let ang = offset + TAU * j as f64 / count as f64;
                nodes.push(DiskPoint(Complex64::from_polar(rho, ang)));
            }
            rings.push(Ring { hyp_radius: hyp, start, count, offset });
        }

        let mut lattice = Lattice { nodes, r, kappa, cap, covering_radius: 0.0, rings };
        lattice.covering_radius = lattice.sampled_covering_radius();
        if lattice.covering_radius >= r {
            return Err(Error::Lattice(format!(
                "annular construction with kappa = {kappa} only covers to hyperbolic radius {:.4}, not r = {r}",
                lattice.covering_radius
            )));
        }
        Ok(lattice)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Minimum pairwise hyperbolic distance (exhaustive).
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.nodes.iter().enumerate() {
            for b in &self.nodes[i + 1..] {
                best = best.min(hyperbolic_c(a.0, b.0));
            }
        }
        best
    }

    /// Hyperbolic distance from `z` to the nearest node.
    pub fn nearest_distance(&self, z: DiskPoint) -> f64 {
        if self.rings.is_empty() {
            return self
                .nodes
                .iter()
                .map(|a| hyperbolic_c(a.0, z.0))
                .fold(f64::INFINITY, f64::min);
        }
        let hz = z.modulus().atanh();
        let ang = z.arg();
        let mut best = f64::INFINITY;
        // rings are sorted by hyperbolic radius; by the triangle inequality only rings with
        // |R_m - |z|_h| < best can improve
        for ring in &self.rings {
            if (ring.hyp_radius - hz).abs() >= best {
                continue;
            }
            if ring.count == 1 {
                best = best.min(hyperbolic_c(self.nodes[ring.start].0, z.0));
                continue;
            }
            let step = TAU / ring.count as f64;
            let pos = ((ang - ring.offset).rem_euclid(TAU) / step).floor() as usize;
            for k in [pos, pos + 1] {
                let idx = ring.start + k % ring.count;
                best = best.min(hyperbolic_c(self.nodes[idx].0, z.0));
            }
        }
        best
    }

    /// Deterministic covering estimate: a polar sample grid over `{|z| <= cap}`,
    /// finer than the node spacing on every ring.
    fn sampled_covering_radius(&self) -> f64 {
        let r_cap = self.cap.atanh();
        let max_count = self.rings.iter().map(|r| r.count).max().unwrap_or(1);
        let n_ang = (8 * max_count).max(64);
        let n_rad = 32 * self.rings.len().max(1);
        let mut worst: f64 = 0.0;
        for i in 0..=n_rad {
            let rho = (r_cap * i as f64 / n_rad as f64).tanh().min(self.cap);
            for j in 0..n_ang {
                let z = DiskPoint(Complex64::from_polar(rho, TAU * j as f64 / n_ang as f64));
                worst = worst.max(self.nearest_distance(z));
            }
        }
        worst
    }

    /// Largest distance from any sample to its nearest node (brute force).
    pub fn covering_check(&self, samples: &[DiskPoint]) -> f64 {
        samples
            .iter()
            .map(|z| {
                self.nodes
                    .iter()
                    .map(|a| hyperbolic_c(a.0, z.0))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }

    pub fn to_file(&self, x: Option<&[Complex64]>) -> LatticeFile {
        LatticeFile {
            r: self.r,
            kappa: self.kappa,
            nodes: self.nodes.iter().map(|&p| p.into()).collect(),
            cap: Some(self.cap),
            x: x.map(|xs| xs.iter().map(|c| [c.re, c.im]).collect()),
        }
    }

    /// Rebuilds a lattice from its serialized form. Ring structure is not recovered, so
    /// nearest-node queries fall back to brute force.
    pub fn from_file(file: &LatticeFile) -> Result<(Lattice, Option<Vec<Complex64>>)> {
        let nodes = file
            .nodes
            .iter()
            .map(|&v| DiskPoint::try_from(v))
            .collect::<Result<Vec<_>>>()?;
        let cap = file
            .cap
            .unwrap_or_else(|| nodes.iter().map(|p| p.modulus()).fold(0.0, f64::max));
        let x = file.x.as_ref().map(|v| v.iter().map(|c| Complex64::new(c[0], c[1])).collect::<Vec<_>>());
        if let Some(x) = &x {
            if x.len() != nodes.len() {
                return Err(Error::LengthMismatch { expected: nodes.len(), got: x.len() });
            }
        }
        let lattice = Lattice {
            nodes,
            r: file.r,
            kappa: file.kappa,
            cap,
            covering_radius: f64::NAN,
            rings: Vec::new(),
        };
        Ok((lattice, x))
    }
}

/// Largest number of equispaced points on `|z| = rho` whose neighbours are at
/// pseudo-hyperbolic distance at least `sep`.
fn max_ring_count(rho: f64, sep: f64) -> usize {
    let gap = |n: usize| {
        let w = Complex64::from_polar(rho, TAU / n as f64);
        pseudo_hyperbolic_c(Complex64::new(rho, 0.0), w)
    };
    // pseudo-hyperbolic distance of neighbours decreases with n
    let mut n = 1usize;
    while gap(n + 1) >= sep {
        n += 1;
        if n > 1 << 20 {
            break;
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(re: f64, im: f64) -> DiskPoint {
        DiskPoint::new(re, im).unwrap()
    }

    #[test]
    fn pseudo_hyperbolic_examples() {
        assert_abs_diff_eq!(pseudo_hyperbolic(DiskPoint::ORIGIN, p(0.3, -0.4)), 0.5, epsilon = 1e-15);
        assert_eq!(pseudo_hyperbolic(p(0.5, 0.0), p(0.5, 0.0)), 0.0);
        assert_abs_diff_eq!(pseudo_hyperbolic(DiskPoint::ORIGIN, p(0.6, 0.0)), 0.6, epsilon = 1e-15);
    }

    #[test]
    fn hyperbolic_examples() {
        assert_abs_diff_eq!(hyperbolic(DiskPoint::ORIGIN, p(0.6, 0.0)), 2f64.ln(), epsilon = 1e-12);
        assert_eq!(hyperbolic(p(0.2, 0.1), p(0.2, 0.1)), 0.0);
        assert_abs_diff_eq!(hyperbolic(DiskPoint::ORIGIN, p(0.5, 0.0)), 0.5 * 3f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn nontangential_examples() {
        let one = BoundaryPoint::from_angle(0.0);
        let z1 = Aperture::new(1.0).unwrap();
        assert!(in_nontangential(p(0.5, 0.0), one, z1));
        assert!(!in_nontangential(p(0.0, 0.9), one, z1));
        assert!(in_nontangential(DiskPoint::ORIGIN, one, Aperture::new(1.5).unwrap()));
    }

    #[test]
    fn carleson_box_examples() {
        let u = p(0.5, 0.0);
        assert!(in_carleson_box(u, p(0.7, 0.0)));
        let z = DiskPoint::polar(0.7, 0.3).unwrap();
        assert!(!in_carleson_box(u, z));
        assert!(in_carleson_box(DiskPoint::ORIGIN, p(-0.99, 0.0)));
        assert!(!in_carleson_box(u, DiskPoint::ORIGIN));
    }

    #[test]
    fn hyperbolic_disk_examples() {
        assert!(in_hyperbolic_disk(DiskPoint::ORIGIN, 1.0, p(0.5, 0.0)));
        assert!(!in_hyperbolic_disk(DiskPoint::ORIGIN, 0.5, p(0.6, 0.0)));
        let c = p(0.3, 0.7);
        assert!(in_hyperbolic_disk(c, 0.1, c));
    }

    #[test]
    fn separation_examples() {
        let nodes = [DiskPoint::ORIGIN, p(0.6, 0.0)];
        assert!(is_separated(&nodes, 0.5));
        assert!(!is_separated(&nodes, 0.7));
        assert!(is_separated(&nodes[..1], 100.0));
    }

    #[test]
    fn aperture_rejects_small_values() {
        assert!(Aperture::new(0.5).is_err());
        assert!(Aperture::new(0.51).is_ok());
        assert!(DiskPoint::new(0.8, 0.6).is_err());
    }

    #[test]
    fn lattice_basic_properties() {
        let lat = Lattice::generate(0.5, 0.2, 0.99).unwrap();
        assert_eq!(lat.nodes[0], DiskPoint::ORIGIN);
        assert!(lat.min_separation() >= 0.4 - 1e-12);
        assert!(lat.nodes.iter().all(|a| a.modulus() <= 0.99 + 1e-15));
        assert!(lat.covering_radius < 0.5);
    }

    #[test]
    fn lattice_rejects_bad_radii() {
        assert!(Lattice::generate(0.5, 0.6, 0.9).is_err());
        assert!(Lattice::generate(0.5, 0.5, 0.9).is_err());
        assert!(Lattice::generate(1.0, 0.4, 1.0).is_err());
    }

    #[test]
    fn euclidean_disk_matches_membership() {
        let c = p(0.4, -0.3);
        let (ec, er) = euclidean_disk(c, 0.7);
        for k in 0..64 {
            let t = TAU * k as f64 / 64.0;
            let inside = DiskPoint::from_complex(ec + Complex64::from_polar(er * 0.999, t)).unwrap();
            let outside = DiskPoint::from_complex(ec + Complex64::from_polar(er * 1.001, t)).unwrap();
            assert!(in_hyperbolic_disk(c, 0.7, inside));
            assert!(!in_hyperbolic_disk(c, 0.7, outside));
        }
    }

    #[test]
    fn slices_agree_with_membership() {
        let regions = [
            Region::CarlesonBox(p(0.6, 0.3)),
            Region::Nontangential { eta: BoundaryPoint::from_angle(1.0), zeta: Aperture::new(1.0).unwrap() },
            Region::Nontangential { eta: BoundaryPoint::from_angle(-2.0), zeta: Aperture::new(2.0).unwrap() },
            Region::HyperbolicDisk { center: p(-0.5, 0.2), radius: 0.8 },
            Region::HyperbolicDisk { center: p(0.05, 0.0), radius: 0.8 },
        ];
        for region in regions {
            for i in 1..40 {
                let r = i as f64 / 40.0;
                for j in 0..360 {
                    let t = TAU * j as f64 / 360.0;
                    let z = DiskPoint::polar(r, t).unwrap();
                    let by_slice = match region.slice(r) {
                        Slice::Empty => false,
                        Slice::Full => true,
                        Slice::Arc { center, half_width } => angular_distance(t, center) <= half_width,
                    };
                    let direct = region.contains(z);
                    if by_slice != direct {
                        // only allowed right at the boundary of the region
                        let eps = 1e-9;
                        let zp = DiskPoint::polar(r, t + eps).unwrap();
                        let zm = DiskPoint::polar(r, t - eps).unwrap();
                        assert!(region.contains(zp) != region.contains(zm), "{region:?} r={r} t={t}");
                    }
                }
            }
        }
    }
}
