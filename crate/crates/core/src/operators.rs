//! The operators `T_g^{n,k} f = I^n(f^(k) g^(n-k))` and `S_g^{n,k} f = I^n(f^(n-k) g^(k))`
//! and Littlewood-Paley norms of their images.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::funcmodel::AnalyticFn;
use crate::quadrature::WeightedIntegrand;
use crate::tentnorm::{KernelTest, KernelTester, NormSettings, OpKind, SpaceParams, SupGrid};

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n < 1 || k >= n {
        return Err(invalid(format!("need n >= 1 and 0 <= k < n, got n = {n}, k = {k}")));
    }
    Ok(())
}

/// `I^n(f^(k) g^(n-k))`.
pub fn apply_t(f: &AnalyticFn, g: &AnalyticFn, n: usize, k: usize, degree: usize) -> Result<AnalyticFn> {
    check_nk(n, k)?;
    Ok(f.derivative(k).product(&g.derivative(n - k), degree).integrate_n(n, degree))
}

/// `I^n(f^(n-k) g^(k))`.
pub fn apply_s(f: &AnalyticFn, g: &AnalyticFn, n: usize, k: usize, degree: usize) -> Result<AnalyticFn> {
    check_nk(n, k)?;
    Ok(f.derivative(n - k).product(&g.derivative(k), degree).integrate_n(n, degree))
}

/// Applies the operator selected by `params`.
pub fn apply(f: &AnalyticFn, g: &AnalyticFn, params: &SpaceParams, degree: usize) -> Result<AnalyticFn> {
    match params.op_kind {
        OpKind::T => apply_t(f, g, params.n, params.k, degree),
        OpKind::S => apply_s(f, g, params.n, params.k, degree),
    }
}

/// The derivative orders `(i, j)` such that the image's n-th derivative is `f^(i) g^(j)`.
pub fn derivative_orders(params: &SpaceParams) -> (usize, usize) {
    match params.op_kind {
        OpKind::T => (params.k, params.n - params.k),
        OpKind::S => (params.n - params.k, params.k),
    }
}

/// Norm of an operator image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageNorm {
    pub value: f64,
    pub kernel: Option<KernelTest>,
}

/// `(sup_a int (1-|a|^2)^t / |1-conj(a)z|^(t+1) |f^(i)|^q |g^(j)|^q (1-|z|^2)^(nq+beta+1) dA)^(1/q)`.
///
/// The image vanishes to order `n` at the origin, so this kernel test is its whole
/// Littlewood-Paley norm.
pub fn image_lp_norm(f: &AnalyticFn, g: &AnalyticFn, params: &SpaceParams, t: f64, settings: &NormSettings) -> Result<ImageNorm> {
    params.validate()?;
    let (i, j) = derivative_orders(params);
    let fi = f.derivative(i);
    let gj = g.derivative(j);
    if fi.is_zero() || gj.is_zero() {
        return Ok(ImageNorm { value: 0.0, kernel: None });
    }
    let q = params.q;
    let mut foci = fi.foci(0.5);
    foci.extend(gj.foci(0.5));
    let grid = SupGrid::for_foci(settings, &foci);
    let density = WeightedIntegrand::new(
        move |z| (fi.evaluate(z) * gj.evaluate(z)).norm().powf(q),
        params.n as f64 * q + params.beta + 1.0,
    )
    .with_foci(foci);
    let kernel = KernelTester::new(density, grid, &settings.quad)?.run(t, 0.0)?;
    Ok(ImageNorm { value: kernel.sup.powf(1.0 / q), kernel: Some(kernel) })
}

/// One row of a per-pair ratio table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub f_id: String,
    pub g_id: String,
    pub params: String,
    pub source_norm: f64,
    pub image_norm: f64,
    pub ratio: f64,
}

/// `max_f ||T f|| / ||f||` over a corpus, with the table behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioTable {
    pub max_ratio: f64,
    pub rows: Vec<RatioRow>,
}

/// A named function with its precomputed source norm.
#[derive(Debug, Clone)]
pub struct NormedFn {
    pub id: String,
    pub f: AnalyticFn,
    pub norm: f64,
}

/// Empirical operator norm over functions whose source norms are already known.
pub fn empirical_ratio(
    g: &AnalyticFn,
    g_id: &str,
    params: &SpaceParams,
    corpus: &[NormedFn],
    t: f64,
    settings: &NormSettings,
) -> Result<RatioTable> {
    if corpus.is_empty() {
        return Err(invalid("empirical ratio needs a nonempty corpus"));
    }
    if let Some(bad) = corpus.iter().find(|c| !(c.norm > 0.0)) {
        return Err(invalid(format!("corpus function `{}` has zero source norm", bad.id)));
    }
    let images: Vec<Result<f64>> = corpus
        .par_iter()
        .map(|c| image_lp_norm(&c.f, g, params, t, settings).map(|v| v.value))
        .collect();
    let mut rows = Vec::with_capacity(corpus.len());
    let mut max_ratio = 0.0f64;
    for (c, img) in corpus.iter().zip(images) {
        let image_norm = img?;
        let ratio = image_norm / c.norm;
        max_ratio = max_ratio.max(ratio);
        rows.push(RatioRow {
            f_id: c.id.clone(),
            g_id: g_id.to_string(),
            params: params.label(),
            source_norm: c.norm,
            image_norm,
            ratio,
        });
    }
    Ok(RatioTable { max_ratio, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    const DEG: usize = 64;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn coeffs(f: &AnalyticFn, n: usize) -> Vec<Complex64> {
        f.taylor(n)
    }

    #[test]
    fn operator_examples() {
        let one = AnalyticFn::constant(c(1.0));
        let z = AnalyticFn::monomial(1);
        let z2 = AnalyticFn::monomial(2);
        assert_eq!(coeffs(&apply_t(&one, &z, 1, 0, DEG).unwrap(), 3), coeffs(&z, 3));
        assert_eq!(coeffs(&apply_t(&one, &z2, 2, 0, DEG).unwrap(), 3), coeffs(&z2, 3));
        let t = apply_t(&z2, &z, 2, 1, DEG).unwrap();
        assert_relative_eq!(t.taylor(3)[3].re, 1.0 / 3.0, max_relative = 1e-15);
        assert_eq!(coeffs(&apply_s(&z, &one, 1, 0, DEG).unwrap(), 3), coeffs(&z, 3));
        assert!(apply_s(&one, &z, 1, 0, DEG).unwrap().is_zero());
        assert!(apply_t(&one, &z, 1, 1, DEG).is_err());
    }

    #[test]
    fn s_and_t_swap_indices() {
        let f = AnalyticFn::kernel(c(0.5), 1.5, c(1.0)).unwrap();
        let g = AnalyticFn::log(Complex64::new(0.0, 0.7), c(2.0)).unwrap();
        let s = apply_s(&f, &g, 2, 1, DEG).unwrap();
        let t = apply_t(&f, &g, 2, 1, DEG).unwrap();
        assert_eq!(s.taylor(DEG), t.taylor(DEG));
    }

    #[test]
    fn image_norm_examples() {
        let settings = NormSettings::default();
        let params = SpaceParams::new(2.0, 2.0, 0.0, 0.0, 1, 0, OpKind::T).unwrap();
        let one = AnalyticFn::constant(c(1.0));
        let z = AnalyticFn::monomial(1);
        assert_eq!(image_lp_norm(&z, &one, &params, 1.0, &settings).unwrap().value, 0.0);
        let img = image_lp_norm(&one, &z, &params, 1.0, &settings).unwrap();
        assert_relative_eq!(img.kernel.unwrap().origin_value, 0.25, max_relative = 1e-9);
    }

    #[test]
    fn empirical_ratio_examples() {
        let settings = NormSettings::default();
        let params = SpaceParams::new(2.0, 2.0, 0.0, 0.0, 1, 0, OpKind::T).unwrap();
        let f = NormedFn { id: "z".into(), f: AnalyticFn::monomial(1), norm: 2.0 };
        let zero = empirical_ratio(&AnalyticFn::constant(c(1.0)), "one", &params, std::slice::from_ref(&f), 3.0, &settings).unwrap();
        assert_eq!(zero.max_ratio, 0.0);
        let one = empirical_ratio(&AnalyticFn::monomial(1), "z", &params, std::slice::from_ref(&f), 3.0, &settings).unwrap();
        assert_eq!(one.rows.len(), 1);
        assert_eq!(one.max_ratio, one.rows[0].image_norm / 2.0);
        assert!(empirical_ratio(&AnalyticFn::monomial(1), "z", &params, &[], 3.0, &settings).is_err());
    }
}
