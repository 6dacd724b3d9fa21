//! Closed-form analytic functions on the disk.
//!
//! An [`AnalyticFn`] is a finite sum of kernel atoms `c (1 - conj(a) z)^(-s)`, logarithmic atoms
//! `c log(1 / (1 - conj(a) z))` and a polynomial. Differentiation maps the family into itself, so
//! derivatives of any order are evaluated in closed form all the way up to the boundary. Repeated
//! integration and products of unrelated atoms fall back to truncated Taylor series.

use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::DiskPoint;
use crate::quadrature::Focus;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Default truncation degree for series fallbacks.
pub const DEFAULT_DEGREE: usize = 256;

/// `coeff * (1 - conj(base) z)^(-exponent)`, principal branch.
///
/// The base may lie on the unit circle; `1 - conj(a) z` keeps a positive real part for
/// `|a| <= 1 < 1/|z|`, so the branch is unambiguous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelAtom {
    pub base: Complex64,
    pub exponent: f64,
    pub coeff: Complex64,
}

impl KernelAtom {
    pub fn new(base: Complex64, exponent: f64, coeff: Complex64) -> Result<Self> {
        check_base(base)?;
        if !exponent.is_finite() || !coeff.re.is_finite() || !coeff.im.is_finite() {
            return Err(invalid("kernel atom exponent and coefficient must be finite"));
        }
        Ok(KernelAtom { base, exponent, coeff })
    }

    #[inline]
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        let w = ONE - self.base.conj() * z;
        self.coeff * (w.ln() * -self.exponent).exp()
    }

    /// m-th derivative: `(s)_m conj(a)^m (1 - conj(a) z)^(-s-m)`.
    pub fn derivative(&self, m: usize) -> KernelAtom {
        let mut c = self.coeff;
        let ab = self.base.conj();
        for i in 0..m {
            c *= ab * (self.exponent + i as f64);
        }
        KernelAtom { base: self.base, exponent: self.exponent + m as f64, coeff: c }
    }

    /// Taylor coefficients up to `degree` (binomial series).
    pub fn series(&self, degree: usize) -> Vec<Complex64> {
        let ab = self.base.conj();
        let mut out = Vec::with_capacity(degree + 1);
        let mut t = self.coeff;
        out.push(t);
        for m in 1..=degree {
            t *= ab * ((self.exponent + (m - 1) as f64) / m as f64);
            out.push(t);
        }
        out
    }
}

/// `coeff * log(1 / (1 - conj(base) z))`, principal branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogAtom {
    pub base: Complex64,
    pub coeff: Complex64,
}

impl LogAtom {
    pub fn new(base: Complex64, coeff: Complex64) -> Result<Self> {
        check_base(base)?;
        Ok(LogAtom { base, coeff })
    }

    #[inline]
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        -self.coeff * (ONE - self.base.conj() * z).ln()
    }

    pub fn series(&self, degree: usize) -> Vec<Complex64> {
        let ab = self.base.conj();
        let mut out = vec![ZERO; degree + 1];
        let mut pw = ONE;
        for (m, c) in out.iter_mut().enumerate().skip(1) {
            pw *= ab;
            *c = self.coeff * pw / m as f64;
        }
        out
    }
}

fn check_base(base: Complex64) -> Result<()> {
    if !(base.norm() <= 1.0 + 1e-15) {
        return Err(invalid(format!("atom base {base} lies outside the closed unit disk")));
    }
    Ok(())
}

/// A polynomial `c_0 + c_1 z + ... + c_N z^N`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PowerSeriesFn {
    pub coeffs: Vec<Complex64>,
}

impl PowerSeriesFn {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        PowerSeriesFn { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    #[inline]
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    pub fn derivative(&self, m: usize) -> PowerSeriesFn {
        if m == 0 {
            return self.clone();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(m)
            .map(|(j, &c)| c * falling(j, m))
            .collect();
        PowerSeriesFn { coeffs }
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last().is_some_and(|c| *c == ZERO) {
            self.coeffs.pop();
        }
        self
    }
}

/// `j (j - 1) ... (j - m + 1)` as a float.
fn falling(j: usize, m: usize) -> f64 {
    (0..m).map(|i| (j - i) as f64).product()
}

/// A closed-form analytic function on the disk.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnalyticFn {
    pub atoms: Vec<KernelAtom>,
    pub logs: Vec<LogAtom>,
    pub series: PowerSeriesFn,
}

impl AnalyticFn {
    pub fn zero() -> Self {
        AnalyticFn::default()
    }

    pub fn constant(c: Complex64) -> Self {
        AnalyticFn::polynomial(vec![c])
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> Self {
        AnalyticFn { series: PowerSeriesFn::new(coeffs).trimmed(), ..Default::default() }
    }

    /// `z^m`.
    pub fn monomial(m: usize) -> Self {
        let mut c = vec![ZERO; m + 1];
        c[m] = ONE;
        AnalyticFn::polynomial(c)
    }

    pub fn kernel(base: Complex64, exponent: f64, coeff: Complex64) -> Result<Self> {
        Ok(AnalyticFn { atoms: vec![KernelAtom::new(base, exponent, coeff)?], ..Default::default() })
    }

    pub fn log(base: Complex64, coeff: Complex64) -> Result<Self> {
        Ok(AnalyticFn { logs: vec![LogAtom::new(base, coeff)?], ..Default::default() })
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.iter().all(|a| a.coeff == ZERO)
            && self.logs.iter().all(|l| l.coeff == ZERO || l.base == ZERO)
            && self.series.coeffs.iter().all(|c| *c == ZERO)
    }

    #[inline]
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        let mut acc = self.series.evaluate(z);
        for a in &self.atoms {
            acc += a.evaluate(z);
        }
        for l in &self.logs {
            acc += l.evaluate(z);
        }
        acc
    }

    pub fn evaluate_at(&self, z: DiskPoint) -> Complex64 {
        self.evaluate(z.z())
    }

    /// Exact m-th derivative.
    pub fn derivative(&self, m: usize) -> AnalyticFn {
        if m == 0 {
            return self.clone();
        }
        let mut atoms: Vec<KernelAtom> = self.atoms.iter().map(|a| a.derivative(m)).collect();
        for l in &self.logs {
            let first = KernelAtom { base: l.base, exponent: 1.0, coeff: l.coeff * l.base.conj() };
            atoms.push(first.derivative(m - 1));
        }
        AnalyticFn { atoms, logs: Vec::new(), series: self.series.derivative(m).trimmed() }.normalized()
    }

    /// Taylor coefficients `c_0 .. c_degree`.
    pub fn taylor(&self, degree: usize) -> Vec<Complex64> {
        let mut out = vec![ZERO; degree + 1];
        for (o, c) in out.iter_mut().zip(&self.series.coeffs) {
            *o += c;
        }
        for a in &self.atoms {
            for (o, c) in out.iter_mut().zip(a.series(degree)) {
                *o += c;
            }
        }
        for l in &self.logs {
            for (o, c) in out.iter_mut().zip(l.series(degree)) {
                *o += c;
            }
        }
        out
    }

    /// Degree-`degree` Taylor truncation as a pure polynomial.
    pub fn truncate(&self, degree: usize) -> AnalyticFn {
        AnalyticFn::polynomial(self.taylor(degree))
    }

    /// `I^n f` of the degree truncation, where `I f(z) = int_0^z f`.
    pub fn integrate_n(&self, n: usize, degree: usize) -> AnalyticFn {
        let c = self.taylor(degree);
        let mut out = vec![ZERO; degree + n + 1];
        for (m, cm) in c.into_iter().enumerate() {
            // m! / (m + n)!
            let scale: f64 = (1..=n).map(|i| 1.0 / (m + i) as f64).product();
            out[m + n] = cm * scale;
        }
        AnalyticFn::polynomial(out)
    }

    /// Product; same-base kernel atoms and constant factors multiply in closed form, every
    /// other pair of terms goes through the Cauchy product of degree truncations.
    pub fn product(&self, other: &AnalyticFn, degree: usize) -> AnalyticFn {
        let mut atoms = Vec::new();
        let mut series = vec![ZERO; degree + 1];

        let self_const = self.constant_only();
        let other_const = other.constant_only();
        if let Some(c) = self_const {
            return other.scaled(c);
        }
        if let Some(c) = other_const {
            return self.scaled(c);
        }

        // split off the constant terms of the polynomial parts, they act exactly
        let c0 = self.series.coeffs.first().copied().unwrap_or(ZERO);
        let d0 = other.series.coeffs.first().copied().unwrap_or(ZERO);
        let f_rest = self.without_constant();
        let g_rest = other.without_constant();

        let mut pairs: Vec<(AnalyticFn, AnalyticFn)> = Vec::new();

        for a in &f_rest.atoms {
            for b in &g_rest.atoms {
                if a.base == b.base {
                    atoms.push(KernelAtom {
                        base: a.base,
                        exponent: a.exponent + b.exponent,
                        coeff: a.coeff * b.coeff,
                    });
                } else {
                    pairs.push((single_atom(*a), single_atom(*b)));
                }
            }
            // atom times the rest of g (logs, nonconstant polynomial)
            let g_nonatom = AnalyticFn { atoms: vec![], logs: g_rest.logs.clone(), series: g_rest.series.clone() };
            if !g_nonatom.is_zero() {
                pairs.push((single_atom(*a), g_nonatom));
            }
        }
        // logs and polynomial of f times everything in g
        let f_nonatom = AnalyticFn { atoms: vec![], logs: f_rest.logs.clone(), series: f_rest.series.clone() };
        if !f_nonatom.is_zero() && !g_rest.is_zero() {
            pairs.push((f_nonatom, g_rest.clone()));
        }
        for (p, q) in pairs {
            let a = p.taylor(degree);
            let b = q.taylor(degree);
            for (i, ai) in a.iter().enumerate() {
                if *ai == ZERO {
                    continue;
                }
                for (j, bj) in b.iter().enumerate().take(degree + 1 - i) {
                    series[i + j] += ai * bj;
                }
            }
        }

        // constant parts
        let mut out = AnalyticFn { atoms, logs: Vec::new(), series: PowerSeriesFn::new(series) };
        if d0 != ZERO {
            out = out + f_rest.scaled(d0);
        }
        if c0 != ZERO {
            out = out + g_rest.scaled(c0);
        }
        if c0 != ZERO && d0 != ZERO {
            out = out + AnalyticFn::constant(c0 * d0);
        }
        out.normalized()
    }

    pub fn scaled(&self, c: Complex64) -> AnalyticFn {
        AnalyticFn {
            atoms: self.atoms.iter().map(|a| KernelAtom { coeff: a.coeff * c, ..*a }).collect(),
            logs: self.logs.iter().map(|l| LogAtom { coeff: l.coeff * c, ..*l }).collect(),
            series: PowerSeriesFn::new(self.series.coeffs.iter().map(|x| x * c).collect()),
        }
        .normalized()
    }

    fn constant_only(&self) -> Option<Complex64> {
        if self.atoms.is_empty() && self.logs.is_empty() && self.series.coeffs.len() <= 1 {
            Some(self.series.coeffs.first().copied().unwrap_or(ZERO))
        } else {
            None
        }
    }

    fn without_constant(&self) -> AnalyticFn {
        let mut f = self.clone();
        if let Some(c) = f.series.coeffs.first_mut() {
            *c = ZERO;
        }
        f
    }

    /// Merges atoms sharing base and exponent, folds exponent-0 atoms into the constant term
    /// and drops vanishing terms.
    pub fn normalized(mut self) -> AnalyticFn {
        let mut atoms: Vec<KernelAtom> = Vec::new();
        for a in self.atoms.drain(..) {
            if a.coeff == ZERO {
                continue;
            }
            if a.exponent == 0.0 {
                if self.series.coeffs.is_empty() {
                    self.series.coeffs.push(ZERO);
                }
                self.series.coeffs[0] += a.coeff;
                continue;
            }
            match atoms.iter_mut().find(|b| b.base == a.base && b.exponent == a.exponent) {
                Some(b) => b.coeff += a.coeff,
                None => atoms.push(a),
            }
        }
        atoms.retain(|a| a.coeff != ZERO);
        let mut logs: Vec<LogAtom> = Vec::new();
        for l in self.logs.drain(..) {
            if l.coeff == ZERO || l.base == ZERO {
                continue;
            }
            match logs.iter_mut().find(|b| b.base == l.base) {
                Some(b) => b.coeff += l.coeff,
                None => logs.push(l),
            }
        }
        logs.retain(|l| l.coeff != ZERO);
        AnalyticFn { atoms, logs, series: self.series.trimmed() }
    }

    /// Boundary directions near which the function varies quickly, with their length scales.
    pub fn foci(&self, max_scale: f64) -> Vec<Focus> {
        let mut out: Vec<Focus> = self
            .atoms
            .iter()
            .map(|a| a.base)
            .chain(self.logs.iter().map(|l| l.base))
            .filter(|b| 1.0 - b.norm() < max_scale)
            .map(|b| Focus { angle: b.arg(), scale: (1.0 - b.norm()).max(0.0) })
            .collect();
        out.sort_by(|a, b| a.scale.total_cmp(&b.scale).then(a.angle.total_cmp(&b.angle)));
        out.dedup_by(|a, b| (a.angle - b.angle).abs() < 1e-14 && (a.scale - b.scale).abs() < 1e-14);
        out
    }

    /// Number of terms that cost a transcendental evaluation.
    pub fn atom_count(&self) -> usize {
        self.atoms.len() + self.logs.len()
    }

    pub fn to_spec(&self) -> FnSpec {
        let mut terms = Vec::new();
        for a in &self.atoms {
            terms.push(FnTerm::Kernel { a: c2(a.base), s: a.exponent, coeff: c2(a.coeff) });
        }
        for l in &self.logs {
            terms.push(FnTerm::Log { a: c2(l.base), coeff: c2(l.coeff) });
        }
        if !self.series.coeffs.is_empty() {
            terms.push(FnTerm::Poly { coeffs: self.series.coeffs.iter().map(|&c| CoeffRepr::Complex(c2(c))).collect() });
        }
        FnSpec::Sum(terms)
    }
}

fn single_atom(a: KernelAtom) -> AnalyticFn {
    AnalyticFn { atoms: vec![a], ..Default::default() }
}

fn c2(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

impl Add for AnalyticFn {
    type Output = AnalyticFn;

    fn add(mut self, rhs: AnalyticFn) -> AnalyticFn {
        self.atoms.extend(rhs.atoms);
        self.logs.extend(rhs.logs);
        let n = self.series.coeffs.len().max(rhs.series.coeffs.len());
        self.series.coeffs.resize(n, ZERO);
        for (a, b) in self.series.coeffs.iter_mut().zip(rhs.series.coeffs) {
            *a += b;
        }
        self.normalized()
    }
}

impl Mul<Complex64> for &AnalyticFn {
    type Output = AnalyticFn;

    fn mul(self, c: Complex64) -> AnalyticFn {
        self.scaled(c)
    }
}

/// `(1 - conj(u) z)^(-(alpha + 2) / p)`: the unit-size kernel of `AT_p^inf(alpha)` peaked at `u`.
pub fn test_fn_boundedness(u: DiskPoint, p: f64, alpha: f64) -> Result<AnalyticFn> {
    check_p_alpha(p, alpha)?;
    AnalyticFn::kernel(u.z(), (alpha + 2.0) / p, ONE)
}

/// `(1 - |z_j|^2)^(1/(2p)) (1 - conj(z_j) z)^(-(alpha + 2)/p - 1/(2p))`: unit-size kernels that
/// tend to zero locally uniformly as `|z_j| -> 1`.
pub fn test_fn_compactness(zj: DiskPoint, p: f64, alpha: f64) -> Result<AnalyticFn> {
    check_p_alpha(p, alpha)?;
    let c = zj.defect().powf(1.0 / (2.0 * p));
    AnalyticFn::kernel(zj.z(), (alpha + 2.0) / p + 1.0 / (2.0 * p), Complex64::new(c, 0.0))
}

fn check_p_alpha(p: f64, alpha: f64) -> Result<()> {
    if !(p > 0.0) || !(alpha > -2.0) {
        return Err(invalid(format!("need p > 0 and alpha > -2, got p = {p}, alpha = {alpha}")));
    }
    Ok(())
}

/// A function whose `m`-th derivative is `coeff (1 - conj(a) z)^(-s)`.
///
/// Integrating `m` times divides by `(s - 1)(s - 2)...(s - m)`; a vanishing factor is only
/// allowed in the last step, where the primitive is logarithmic.
pub fn kernel_primitive(base: Complex64, s: f64, coeff: Complex64, m: usize) -> Result<AnalyticFn> {
    if m == 0 {
        return AnalyticFn::kernel(base, s, coeff);
    }
    if base == ZERO {
        // m-th derivative is the constant `coeff`
        let mut c = vec![ZERO; m + 1];
        c[m] = coeff / (1..=m).map(|i| i as f64).product::<f64>();
        return Ok(AnalyticFn::polynomial(c));
    }
    let ab = base.conj();
    let mut c = coeff;
    for i in 1..=m {
        let d = s - i as f64;
        if d.abs() < 1e-12 {
            if i != m {
                return Err(invalid(format!("primitive of order {m} of exponent {s} leaves the atom family")));
            }
            // int (1 - ab z)^{-1} dz = (1/ab) log(1/(1 - ab z))
            return AnalyticFn::log(base, c / ab);
        }
        c /= ab * d;
    }
    AnalyticFn::kernel(base, s - m as f64, c)
}

/// One term of the JSON function format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", try_from = "RawTerm")]
pub enum FnTerm {
    Kernel {
        a: [f64; 2],
        s: f64,
        coeff: [f64; 2],
    },
    Log {
        a: [f64; 2],
        coeff: [f64; 2],
    },
    Poly {
        coeffs: Vec<CoeffRepr>,
    },
}

/// Flat form of a term; keeps parse errors positioned.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    #[serde(rename = "type")]
    kind: String,
    a: Option<[f64; 2]>,
    s: Option<f64>,
    coeff: Option<[f64; 2]>,
    coeffs: Option<Vec<CoeffRepr>>,
}

impl TryFrom<RawTerm> for FnTerm {
    type Error = String;

    fn try_from(raw: RawTerm) -> std::result::Result<Self, String> {
        let need = |name: &str| format!("`{}` term needs field `{name}`", raw.kind);
        let coeff = raw.coeff.unwrap_or_else(unit);
        match raw.kind.as_str() {
            "kernel" if raw.coeffs.is_none() => Ok(FnTerm::Kernel {
                a: raw.a.ok_or_else(|| need("a"))?,
                s: raw.s.ok_or_else(|| need("s"))?,
                coeff,
            }),
            "log" if raw.coeffs.is_none() && raw.s.is_none() => {
                Ok(FnTerm::Log { a: raw.a.ok_or_else(|| need("a"))?, coeff })
            }
            "poly" if raw.a.is_none() && raw.s.is_none() && raw.coeff.is_none() => {
                Ok(FnTerm::Poly { coeffs: raw.coeffs.ok_or_else(|| need("coeffs"))? })
            }
            "kernel" | "log" | "poly" => Err(format!("unexpected field for a `{}` term", raw.kind)),
            other => Err(format!("unknown term type `{other}`, expected kernel, log or poly")),
        }
    }
}

fn unit() -> [f64; 2] {
    [1.0, 0.0]
}

/// A coefficient given either as a real number or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffRepr {
    Real(f64),
    Complex([f64; 2]),
}

impl CoeffRepr {
    fn value(self) -> Complex64 {
        match self {
            CoeffRepr::Real(x) => Complex64::new(x, 0.0),
            CoeffRepr::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

/// A function in the JSON format: a single term or a list of terms to be summed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FnSpec {
    Term(FnTerm),
    Sum(Vec<FnTerm>),
}

impl FnSpec {
    pub fn parse(text: &str) -> Result<FnSpec> {
        let wrap = |e: serde_json::Error| Error::Parse(format!("function spec at line {}, column {}: {e}", e.line(), e.column()));
        if text.trim_start().starts_with('[') {
            serde_json::from_str(text).map(FnSpec::Sum).map_err(wrap)
        } else {
            serde_json::from_str(text).map(FnSpec::Term).map_err(wrap)
        }
    }

    pub fn build(&self) -> Result<AnalyticFn> {
        let terms: &[FnTerm] = match self {
            FnSpec::Term(t) => std::slice::from_ref(t),
            FnSpec::Sum(ts) => ts,
        };
        let mut f = AnalyticFn::zero();
        for t in terms {
            let g = match t {
                FnTerm::Kernel { a, s, coeff } => AnalyticFn::kernel(cx(*a), *s, cx(*coeff))?,
                FnTerm::Log { a, coeff } => AnalyticFn::log(cx(*a), cx(*coeff))?,
                FnTerm::Poly { coeffs } => AnalyticFn::polynomial(coeffs.iter().map(|c| c.value()).collect()),
            };
            f = f + g;
        }
        Ok(f)
    }
}

fn cx(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}
