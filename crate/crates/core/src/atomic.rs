//! Atomic synthesis and discretization over lattices, sequence multipliers, and truncated
//! kernel tests.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::funcmodel::{AnalyticFn, KernelAtom};
use crate::geometry::Lattice;
use crate::quadrature::WeightedIntegrand;
use crate::tentnorm::{seq_tent_norm, DecayProfile, KernelTester, NormSettings, SupGrid};

/// `max(1, 1/p) + 1`.
pub fn default_l(p: f64) -> f64 {
    1.0f64.max(1.0 / p) + 1.0
}

fn check_len(x: &[Complex64], n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: x.len() });
    }
    Ok(())
}

/// `sum_j x_j (1 - |a_j|^2)^L / (1 - conj(a_j) z)^(L + (alpha+2)/p)`.
pub fn synthesize(x: &[Complex64], lattice: &Lattice, l: f64, p: f64, alpha: f64) -> Result<AnalyticFn> {
    check_len(x, lattice.len())?;
    if !(p > 0.0 && alpha > -2.0) {
        return Err(invalid(format!("need p > 0 and alpha > -2, got p = {p}, alpha = {alpha}")));
    }
    if !(l > 1.0f64.max(1.0 / p)) {
        return Err(invalid(format!("L must exceed max(1, 1/p) = {}, got {l}", 1.0f64.max(1.0 / p))));
    }
    let s = l + (alpha + 2.0) / p;
    let atoms = lattice
        .nodes
        .iter()
        .zip(x)
        .filter(|(_, xj)| xj.norm() > 0.0)
        .map(|(a, xj)| KernelAtom::new(a.z(), s, xj * a.defect().powf(l)))
        .collect::<Result<Vec<_>>>()?;
    Ok(AnalyticFn { atoms, ..Default::default() }.normalized())
}

/// `f(a_j) (1 - |a_j|^2)^((alpha+2)/p)`.
pub fn discretize(f: &AnalyticFn, lattice: &Lattice, p: f64, alpha: f64) -> Vec<Complex64> {
    let e = (alpha + 2.0) / p;
    lattice.nodes.iter().map(|a| f.evaluate_at(*a) * a.defect().powf(e)).collect()
}

/// `{y_j x_j}`.
pub fn multiplier_apply(y: &[Complex64], x: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(x, y.len())?;
    Ok(y.iter().zip(x).map(|(a, b)| a * b).collect())
}

/// Result of a multiplier experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierCheck {
    /// `max_x ||M_y x||_{T_q} / ||x||_{T_p}` over the suite.
    pub max_ratio: f64,
    /// `||y||_{T_{pq/(p-q)}}`.
    pub y_norm: f64,
    pub ratios: Vec<f64>,
}

/// Compares the multiplier ratios `||M_y x||_q / ||x||_p` with `||y||_{pq/(p-q)}`.
pub fn multiplier_bound_check(y: &[Complex64], lattice: &Lattice, p: f64, q: f64, x_suite: &[Vec<Complex64>], grid: &SupGrid) -> Result<MultiplierCheck> {
    if !(q > 0.0 && q < p) {
        return Err(invalid(format!("multiplier check needs 0 < q < p, got p = {p}, q = {q}")));
    }
    check_len(y, lattice.len())?;
    let r = p * q / (p - q);
    let y_norm = seq_tent_norm(y, lattice, r, grid)?;
    let mut ratios = Vec::with_capacity(x_suite.len());
    for x in x_suite {
        let xn = seq_tent_norm(x, lattice, p, grid)?;
        if xn == 0.0 {
            return Err(invalid("multiplier suite contains a zero sequence"));
        }
        let yx = multiplier_apply(y, x)?;
        ratios.push(seq_tent_norm(&yx, lattice, q, grid)? / xn);
    }
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    Ok(MultiplierCheck { max_ratio, y_norm, ratios })
}

/// Kernel-test suprema of the tail measures `chi_{|z| >= r} dmu` on one mesh.
pub fn truncation_check(f: &WeightedIntegrand, t: f64, radii: &[f64], settings: &NormSettings) -> Result<DecayProfile> {
    if radii.windows(2).any(|w| w[0] >= w[1]) || radii.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(invalid("truncation radii must increase within (0, 1)"));
    }
    let grid = SupGrid::for_foci(settings, &f.foci);
    let tester = KernelTester::new(f.clone(), grid, &settings.quad)?;
    let values = radii.iter().map(|&r| tester.run(t, r).map(|k| k.sup)).collect::<Result<Vec<_>>>()?;
    DecayProfile::new(radii.to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::LatticeFile;
    use crate::quadrature::Focus;
    use crate::tentnorm::{annulus_radii, lattice_grid};
    use approx::assert_relative_eq;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn origin_lattice() -> Lattice {
        Lattice::from_file(&LatticeFile { r: 0.5, kappa: 0.2, nodes: vec![[0.0, 0.0]], cap: None, x: None }).unwrap().0
    }

    #[test]
    fn synthesis_examples() {
        let z = origin_lattice();
        let f = synthesize(&[c(1.0)], &z, 2.0, 2.0, 0.0).unwrap();
        assert_relative_eq!(f.evaluate(Complex64::new(0.3, 0.4)).re, 1.0, max_relative = 1e-15);
        assert!(synthesize(&[c(0.0)], &z, 2.0, 2.0, 0.0).unwrap().is_zero());
        assert!(synthesize(&[c(1.0)], &z, 1.0, 2.0, 0.0).is_err());
        assert!(synthesize(&[c(1.0)], &z, 2.0, 0.5, 0.0).is_err());
        assert!(synthesize(&[], &z, 2.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn synthesis_is_linear() {
        let lat = Lattice::generate(1.0, 0.4, 0.9).unwrap();
        let x: Vec<Complex64> = (0..lat.len()).map(|j| Complex64::new((j as f64).sin(), 0.5)).collect();
        let y: Vec<Complex64> = (0..lat.len()).map(|j| Complex64::new(0.2, (j as f64).cos())).collect();
        let xy: Vec<Complex64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let sum = synthesize(&x, &lat, 2.0, 2.0, 0.0).unwrap() + synthesize(&y, &lat, 2.0, 2.0, 0.0).unwrap();
        let direct = synthesize(&xy, &lat, 2.0, 2.0, 0.0).unwrap();
        for z in [Complex64::new(0.1, 0.2), Complex64::new(-0.7, 0.3)] {
            assert!((sum.evaluate(z) - direct.evaluate(z)).norm() < 1e-12);
        }
    }

    #[test]
    fn discretize_examples() {
        let lat = Lattice::generate(1.0, 0.4, 0.9).unwrap();
        let d = discretize(&AnalyticFn::constant(c(1.0)), &lat, 2.0, 0.0);
        for (a, x) in lat.nodes.iter().zip(&d) {
            assert_relative_eq!(x.re, a.defect(), max_relative = 1e-15);
        }
        assert!(discretize(&AnalyticFn::zero(), &lat, 2.0, 0.0).iter().all(|x| *x == c(0.0)));
    }

    #[test]
    fn multiplier_examples() {
        let x = vec![c(1.0), Complex64::new(0.0, 2.0)];
        assert_eq!(multiplier_apply(&[c(1.0), c(1.0)], &x).unwrap(), x);
        assert!(multiplier_apply(&[c(0.0), c(0.0)], &x).unwrap().iter().all(|v| *v == c(0.0)));
        assert!(multiplier_apply(&[c(1.0)], &x).is_err());

        let lat = Lattice::generate(1.0, 0.4, 0.9).unwrap();
        let grid = lattice_grid(&lat, &NormSettings::default());
        let xs: Vec<Vec<Complex64>> = (1..4).map(|s| (0..lat.len()).map(|j| c(((j * s) as f64).cos())).collect()).collect();
        let zero = multiplier_bound_check(&vec![c(0.0); lat.len()], &lat, 2.0, 1.0, &xs, &grid).unwrap();
        assert_eq!((zero.max_ratio, zero.y_norm), (0.0, 0.0));
        let x = &xs[0];
        let a = seq_tent_norm(x, &lat, 2.0, &grid).unwrap();
        let b = seq_tent_norm(&multiplier_apply(&vec![c(-3.0); lat.len()], x).unwrap(), &lat, 2.0, &grid).unwrap();
        assert_relative_eq!(b, 3.0 * a, max_relative = 1e-12);
        assert!(multiplier_bound_check(&vec![c(1.0); lat.len()], &lat, 1.0, 2.0, &xs, &grid).is_err());
    }

    #[test]
    fn truncation_examples() {
        let settings = NormSettings::default();
        let radii = annulus_radii(8);
        let inner = WeightedIntegrand::new(|z: Complex64| if z.norm() < 0.5 { 1.0 } else { 0.0 }, 0.0);
        let p = truncation_check(&inner, 2.0, &radii, &settings).unwrap();
        assert!(p.values.iter().all(|&v| v == 0.0));

        let area = WeightedIntegrand::new(|_| 1.0, 1.0);
        let p = truncation_check(&area, 2.0, &radii, &settings).unwrap();
        assert!(p.last() < 0.05 * p.values[0], "{:?}", p.values);
        assert!(p.values.windows(2).all(|w| w[1] <= w[0]));

        let carleson = WeightedIntegrand::new(|z: Complex64| 1.0 / (c(1.0) - z).norm_sqr(), 1.0)
            .with_foci(vec![Focus { angle: 0.0, scale: 0.0 }]);
        let p = truncation_check(&carleson, 2.0, &radii, &settings).unwrap();
        assert!(p.last() > 0.5 * p.values[0], "{:?}", p.values);
        assert!(truncation_check(&area, 2.0, &[0.5, 0.5], &settings).is_err());
    }
}
