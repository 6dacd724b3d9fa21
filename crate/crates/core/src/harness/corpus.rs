//! The standard function corpus and the symbol suites.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::atomic::{default_l, synthesize};
use crate::criteria::{exponent_e, governing_order};
use crate::error::Result;
use crate::funcmodel::{kernel_primitive, AnalyticFn, FnSpec};
use crate::geometry::Lattice;
use crate::tentnorm::SpaceParams;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A function with a stable identifier.
#[derive(Debug, Clone)]
pub struct Named {
    pub id: String,
    pub f: AnalyticFn,
}

impl Named {
    fn new(id: &str, f: AnalyticFn) -> Named {
        Named { id: id.to_string(), f }
    }
}

/// Uniform random points of the closed unit disk, one per lattice node.
pub fn random_sequence(len: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..len)
        .map(|_| {
            let r: f64 = rng.gen::<f64>().sqrt();
            let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            Complex64::from_polar(r, t)
        })
        .collect()
}

/// Twelve functions spanning the source space `AT_p^inf(alpha)`: a constant, two monomials,
/// unit-size kernels at three depths with two exponents, a logarithm with a boundary
/// singularity and two atomic syntheses with random coefficients.
pub fn standard_corpus(p: f64, alpha: f64, lattice: &Lattice, seed: u64) -> Result<Vec<Named>> {
    let s0 = (alpha + 2.0) / p;
    let kernel = |r: f64, angle: f64, s: f64, scaled: bool| -> Result<AnalyticFn> {
        let a = Complex64::from_polar(r, angle);
        let c = if scaled { 1.0 - r * r } else { 1.0 };
        AnalyticFn::kernel(a, s, Complex64::new(c, 0.0))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = default_l(p);
    let syn1 = synthesize(&random_sequence(lattice.len(), &mut rng), lattice, l, p, alpha)?;
    let syn2 = synthesize(&random_sequence(lattice.len(), &mut rng), lattice, l, p, alpha)?;
    Ok(vec![
        Named::new("const", AnalyticFn::constant(ONE)),
        Named::new("z", AnalyticFn::monomial(1)),
        Named::new("z4", AnalyticFn::monomial(4)),
        Named::new("kern_0.5", kernel(0.5, 0.0, s0, false)?),
        Named::new("kern_0.9", kernel(0.9, 1.0, s0, false)?),
        Named::new("kern_0.99", kernel(0.99, 2.5, s0, false)?),
        Named::new("kern_0.5_deep", kernel(0.5, 4.0, s0 + 1.0, true)?),
        Named::new("kern_0.9_deep", kernel(0.9, 5.0, s0 + 1.0, true)?),
        Named::new("kern_0.99_deep", kernel(0.99, -0.5, s0 + 1.0, true)?),
        Named::new("log_boundary", AnalyticFn::log(Complex64::from_polar(1.0, 3.0), ONE)?),
        Named::new("synth_1", syn1),
        Named::new("synth_2", syn2),
    ])
}

/// Expected behaviour of a suite symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolClass {
    /// Criterion finite and vanishing.
    Vanishing,
    /// Criterion finite, not vanishing.
    Critical,
    /// Criterion infinite.
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct Symbol {
    pub id: String,
    pub g: AnalyticFn,
    pub class: SymbolClass,
    pub polynomial: bool,
}

impl Symbol {
    pub fn spec(&self) -> FnSpec {
        self.g.to_spec()
    }
}

/// `g` whose governing derivative is `(1 - z)^(-s)`.
pub fn symbol_with_power(s: f64, params: &SpaceParams) -> Result<AnalyticFn> {
    kernel_primitive(ONE, s, ONE, governing_order(params))
}

/// `g` whose governing derivative is the polynomial `coeffs`.
pub fn symbol_with_polynomial(coeffs: &[f64], params: &SpaceParams) -> AnalyticFn {
    let poly = AnalyticFn::polynomial(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect());
    let j = governing_order(params);
    if j == 0 {
        poly
    } else {
        poly.integrate_n(j, coeffs.len())
    }
}

/// Symbols whose governing derivative is a polynomial, `(1-z)^(-e+3/4)`, `(1-z)^(-e)` and
/// `(1-z)^(-e-1/2)`, with `e` the critical exponent of the parameter set.
pub fn symbol_suite(params: &SpaceParams) -> Result<Vec<Symbol>> {
    let e = exponent_e(params);
    let sym = |id: &str, g: AnalyticFn, class: SymbolClass, polynomial: bool| Symbol { id: id.to_string(), g, class, polynomial };
    Ok(vec![
        sym("poly_linear", symbol_with_polynomial(&[1.0, 1.0], params), SymbolClass::Vanishing, true),
        sym("poly_quadratic", symbol_with_polynomial(&[0.0, -0.5, 2.0], params), SymbolClass::Vanishing, true),
        sym("subcritical", symbol_with_power(e - 0.75, params)?, SymbolClass::Vanishing, false),
        sym("critical", symbol_with_power(e, params)?, SymbolClass::Critical, false),
        sym("supercritical", symbol_with_power(e + 0.5, params)?, SymbolClass::Unbounded, false),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tentnorm::OpKind;

    #[test]
    fn corpus_is_deterministic_and_twelve_long() {
        let lat = Lattice::generate(1.0, 0.4, 0.9).unwrap();
        let a = standard_corpus(2.0, 0.0, &lat, 7).unwrap();
        let b = standard_corpus(2.0, 0.0, &lat, 7).unwrap();
        assert_eq!(a.len(), 12);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.id, y.id);
            assert_eq!(x.f, y.f);
        }
    }

    #[test]
    fn suite_governing_functions() {
        let params = SpaceParams::new(2.0, 2.0, 0.0, 0.0, 1, 0, OpKind::T).unwrap();
        let suite = symbol_suite(&params).unwrap();
        // critical symbol at e = 1 is log(1 / (1 - z))
        let crit = &suite[3].g;
        assert_eq!(crit.logs.len(), 1);
        let z = Complex64::new(0.3, -0.2);
        let d = crit.derivative(1).evaluate(z);
        assert!((d - 1.0 / (ONE - z)).norm() < 1e-12);
        let poly = suite[0].g.derivative(1).evaluate(z);
        assert!((poly - (ONE + z)).norm() < 1e-12);
    }
}
