//! Symbols of Toeplitz-type operators.
//!
//! A bounded function on the distinguished boundary is stored through its
//! pull-back to the torus, a symmetric trigonometric polynomial
//! `Σ α_{m,n} z₁^m z₂^n` with `α_{m,n} = α_{n,m}`. Polynomials in the intrinsic
//! coordinates `s, p, s̄, p̄` are accepted as input and converted with
//! `s = z₁ + z₂`, `p = z₁z₂`, `s̄ = z̄₁ + z̄₂`, `p̄ = z̄₁z̄₂`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;

/// Sparse Laurent polynomial in `(z₁, z₂)`; no symmetry assumed.
pub(crate) type Laurent = BTreeMap<(i64, i64), Complex64>;

pub(crate) fn laurent_mul(f: &Laurent, g: &Laurent) -> Laurent {
    let mut out = Laurent::new();
    for (&(m, n), x) in f {
        for (&(k, l), y) in g {
            *out.entry((m + k, n + l)).or_default() += x * y;
        }
    }
    out.retain(|_, v| *v != Complex64::new(0.0, 0.0));
    out
}

fn laurent_pow(base: &Laurent, e: u32) -> Laurent {
    let mut acc = Laurent::from([((0, 0), Complex64::new(1.0, 0.0))]);
    for _ in 0..e {
        acc = laurent_mul(&acc, base);
    }
    acc
}

/// Symmetric finitely supported Fourier series on the torus.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FourierSymbol {
    coeffs: Laurent,
}

impl FourierSymbol {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        let mut coeffs = Laurent::new();
        if c != Complex64::new(0.0, 0.0) {
            coeffs.insert((0, 0), c);
        }
        Self { coeffs }
    }

    /// Build from a coefficient map, failing if it is not symmetric.
    pub fn new(coeffs: impl IntoIterator<Item = ((i64, i64), Complex64)>) -> Result<Self> {
        let mut map = Laurent::new();
        for (k, v) in coeffs {
            *map.entry(k).or_default() += v;
        }
        map.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        let scale = map.values().map(|v| v.norm()).fold(1.0, f64::max);
        for (&(m, n), v) in &map {
            let mirror = map.get(&(n, m)).copied().unwrap_or_default();
            if (v - mirror).norm() > SYMMETRY_TOL * scale {
                return Err(Error::AsymmetricSymbol { m, n });
            }
        }
        // store exactly symmetric values
        let sym: Laurent = map
            .iter()
            .map(|(&(m, n), v)| {
                let mirror = map.get(&(n, m)).copied().unwrap_or_default();
                ((m, n), if m == n { *v } else { (v + mirror) * 0.5 })
            })
            .collect();
        Ok(Self { coeffs: sym })
    }

    /// Build from an arbitrary map by averaging `α ← (α_{m,n} + α_{n,m})/2`.
    pub fn symmetrized(coeffs: impl IntoIterator<Item = ((i64, i64), Complex64)>) -> Self {
        let mut map = Laurent::new();
        for (k, v) in coeffs {
            *map.entry(k).or_default() += v;
        }
        let mut out = Laurent::new();
        for (&(m, n), v) in &map {
            let mirror = map.get(&(n, m)).copied().unwrap_or_default();
            let avg = (v + mirror) * 0.5;
            out.insert((m, n), avg);
            out.insert((n, m), avg);
        }
        out.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        Self { coeffs: out }
    }

    /// The symbol of the coordinate `s = z₁ + z₂`.
    pub fn s() -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self {
            coeffs: Laurent::from([((1, 0), one), ((0, 1), one)]),
        }
    }

    /// The symbol of the coordinate `p = z₁z₂`.
    pub fn p() -> Self {
        Self {
            coeffs: Laurent::from([((1, 1), Complex64::new(1.0, 0.0))]),
        }
    }

    /// `z₁²z̄₂² + z̄₁²z₂²`, a real symbol whose Toeplitz operator and its adjoint share a kernel vector.
    pub fn coburn() -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self {
            coeffs: Laurent::from([((2, -2), one), ((-2, 2), one)]),
        }
    }

    pub fn coeff(&self, m: i64, n: i64) -> Complex64 {
        self.coeffs.get(&(m, n)).copied().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &BTreeMap<(i64, i64), Complex64> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `max(|m|, |n|)` over the support; zero for the zero symbol.
    pub fn bandwidth(&self) -> i64 {
        self.coeffs
            .keys()
            .map(|&(m, n)| m.abs().max(n.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn product(&self, other: &Self) -> Self {
        Self {
            coeffs: laurent_mul(&self.coeffs, &other.coeffs),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (k, v) in &other.coeffs {
            *coeffs.entry(*k).or_default() += v;
        }
        coeffs.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        Self { coeffs }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut coeffs: Laurent = self.coeffs.iter().map(|(k, v)| (*k, v * c)).collect();
        coeffs.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        Self { coeffs }
    }

    /// Pointwise complex conjugate: `α'_{m,n} = conj(α_{−m,−n})`.
    pub fn conjugate(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|(&(m, n), v)| ((-m, -n), v.conj()))
                .collect(),
        }
    }

    /// No Fourier coefficient with a negative exponent.
    pub fn is_analytic(&self) -> bool {
        self.coeffs.keys().all(|&(m, n)| m >= 0 && n >= 0)
    }

    pub fn eval_torus(&self, theta1: f64, theta2: f64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(&(m, n), v)| v * Complex64::from_polar(1.0, m as f64 * theta1 + n as f64 * theta2))
            .sum()
    }

    /// Largest modulus over a uniform `grid × grid` sample of the torus.
    pub fn sup_norm_estimate(&self, grid: usize) -> Result<f64> {
        let required = 2 * self.bandwidth() as usize + 1;
        if grid < required {
            return Err(Error::AliasingRisk { grid, required });
        }
        // precompute e^{i k θ_j} for the needed exponents
        let beta = self.bandwidth();
        let step = 2.0 * PI / grid as f64;
        let phases: Vec<Vec<Complex64>> = (0..grid)
            .map(|j| {
                (-beta..=beta)
                    .map(|k| Complex64::from_polar(1.0, ((k * j as i64).rem_euclid(grid as i64)) as f64 * step))
                    .collect()
            })
            .collect();
        let mut best: f64 = 0.0;
        for j1 in 0..grid {
            for j2 in 0..grid {
                let v: Complex64 = self
                    .coeffs
                    .iter()
                    .map(|(&(m, n), c)| c * phases[j1][(m + beta) as usize] * phases[j2][(n + beta) as usize])
                    .sum();
                best = best.max(v.norm());
            }
        }
        Ok(best)
    }

    /// Largest coefficient difference, for approximate comparisons.
    pub fn max_diff(&self, other: &Self) -> f64 {
        let mut keys: Vec<_> = self.coeffs.keys().chain(other.coeffs.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|&(m, n)| (self.coeff(m, n) - other.coeff(m, n)).norm())
            .fold(0.0, f64::max)
    }
}

/// Exponents `(i, j, k, l)` of `s^i p^j s̄^k p̄^l`.
pub type SpExponent = (u32, u32, u32, u32);

/// Polynomial in the intrinsic coordinates `s, p, s̄, p̄`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpPoly {
    terms: BTreeMap<SpExponent, Complex64>,
}

impl SpPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial((0, 0, 0, 0), Complex64::new(1.0, 0.0))
    }

    pub fn s() -> Self {
        Self::monomial((1, 0, 0, 0), Complex64::new(1.0, 0.0))
    }

    pub fn p() -> Self {
        Self::monomial((0, 1, 0, 0), Complex64::new(1.0, 0.0))
    }

    pub fn s_bar() -> Self {
        Self::monomial((0, 0, 1, 0), Complex64::new(1.0, 0.0))
    }

    pub fn p_bar() -> Self {
        Self::monomial((0, 0, 0, 1), Complex64::new(1.0, 0.0))
    }

    pub fn monomial(exp: SpExponent, c: Complex64) -> Self {
        let mut terms = BTreeMap::new();
        if c != Complex64::new(0.0, 0.0) {
            terms.insert(exp, c);
        }
        Self { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (SpExponent, Complex64)>) -> Self {
        let mut out = Self::zero();
        for (e, c) in terms {
            *out.terms.entry(e).or_default() += c;
        }
        out.prune();
        out
    }

    fn prune(&mut self) {
        self.terms.retain(|_, v| *v != Complex64::new(0.0, 0.0));
    }

    pub fn terms(&self) -> &BTreeMap<SpExponent, Complex64> {
        &self.terms
    }

    pub fn coeff(&self, exp: SpExponent) -> Complex64 {
        self.terms.get(&exp).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Uses only `s` and `p`.
    pub fn is_holomorphic(&self) -> bool {
        self.terms.keys().all(|&(_, _, k, l)| k == 0 && l == 0)
    }

    /// Total degree `i + j + k + l`.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|&(i, j, k, l)| i + j + k + l)
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            *out.terms.entry(*e).or_default() += c;
        }
        out.prune();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        };
        out.prune();
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(i, j, k, l), x) in &self.terms {
            for (&(i2, j2, k2, l2), y) in &other.terms {
                *out.terms.entry((i + i2, j + j2, k + k2, l + l2)).or_default() += x * y;
            }
        }
        out.prune();
        out
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        let diff = self.sub(other);
        diff.terms.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Evaluate at a point `(s, p)`, with `s̄, p̄` taken as the conjugates.
    pub fn eval(&self, s: Complex64, p: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(i, j, k, l), c)| {
                c * s.powu(i) * p.powu(j) * s.conj().powu(k) * p.conj().powu(l)
            })
            .sum()
    }

    /// Pull back along the symmetrization map as a Laurent polynomial on the torus.
    pub(crate) fn to_laurent(&self) -> Laurent {
        let one = Complex64::new(1.0, 0.0);
        let s = Laurent::from([((1, 0), one), ((0, 1), one)]);
        let s_bar = Laurent::from([((-1, 0), one), ((0, -1), one)]);
        let mut out = Laurent::new();
        for (&(i, j, k, l), c) in &self.terms {
            let shift = (j as i64 - l as i64, j as i64 - l as i64);
            let part = laurent_mul(&laurent_pow(&s, i), &laurent_pow(&s_bar, k));
            for ((m, n), v) in part {
                *out.entry((m + shift.0, n + shift.1)).or_default() += v * c;
            }
        }
        out.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        out
    }
}

/// Symbol on the torus of a polynomial in `s, p, s̄, p̄`.
pub fn sp_to_fourier(poly: &SpPoly) -> FourierSymbol {
    FourierSymbol {
        coeffs: poly.to_laurent(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn sym(entries: &[((i64, i64), f64)]) -> FourierSymbol {
        FourierSymbol::new(entries.iter().map(|&(k, v)| (k, c(v)))).unwrap()
    }

    #[test]
    fn substitution_examples() {
        assert_eq!(sp_to_fourier(&SpPoly::s()), FourierSymbol::s());
        assert_eq!(
            sp_to_fourier(&SpPoly::p().mul(&SpPoly::p_bar())),
            FourierSymbol::constant(c(1.0))
        );
        // (z1+z2)(1/z1+1/z2) = 2 + z1/z2 + z2/z1, expanded by hand
        assert_eq!(
            sp_to_fourier(&SpPoly::s().mul(&SpPoly::s_bar())),
            sym(&[((0, 0), 2.0), ((1, -1), 1.0), ((-1, 1), 1.0)])
        );
    }

    #[test]
    fn product_examples() {
        assert!(FourierSymbol::s().product(&FourierSymbol::zero()).is_zero());
        let p_bar = sym(&[((-1, -1), 1.0)]);
        assert_eq!(FourierSymbol::p().product(&p_bar), FourierSymbol::constant(c(1.0)));
        assert_eq!(
            FourierSymbol::s().product(&FourierSymbol::s()),
            sym(&[((2, 0), 1.0), ((0, 2), 1.0), ((1, 1), 2.0)])
        );
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(
            FourierSymbol::s().conjugate(),
            sym(&[((-1, 0), 1.0), ((0, -1), 1.0)])
        );
        assert_eq!(FourierSymbol::coburn().conjugate(), FourierSymbol::coburn());
    }

    #[test]
    fn analyticity() {
        assert!(FourierSymbol::s().is_analytic());
        assert!(!FourierSymbol::s().conjugate().is_analytic());
        assert!(!FourierSymbol::coburn().is_analytic());
    }

    #[test]
    fn asymmetric_input_fails_unless_symmetrized() {
        let raw = [((1, 0), c(1.0))];
        assert!(matches!(
            FourierSymbol::new(raw),
            Err(Error::AsymmetricSymbol { .. })
        ));
        let f = FourierSymbol::symmetrized(raw);
        assert_eq!(f, sym(&[((1, 0), 0.5), ((0, 1), 0.5)]));
    }

    #[test]
    fn sup_norm_examples() {
        let v = FourierSymbol::s().sup_norm_estimate(512).unwrap();
        assert!((v - 2.0).abs() < 1e-4);
        let k = Complex64::new(0.3, -0.4);
        assert_eq!(FourierSymbol::constant(k).sup_norm_estimate(4).unwrap(), k.norm());
        for g in [3, 8, 17] {
            let v = FourierSymbol::p().sup_norm_estimate(g).unwrap();
            assert!((v - 1.0).abs() < 1e-15);
        }
        assert!(matches!(
            FourierSymbol::coburn().sup_norm_estimate(4),
            Err(Error::AliasingRisk { .. })
        ));
    }

    #[test]
    fn sup_norm_monotone_under_dyadic_refinement() {
        let f = FourierSymbol::coburn()
            .add(&FourierSymbol::s().scale(Complex64::new(0.3, 0.7)))
            .add(&FourierSymbol::p().conjugate());
        let mut last = 0.0;
        for g in [8, 16, 32, 64, 128] {
            let v = f.sup_norm_estimate(g).unwrap();
            assert!(v >= last);
            last = v;
        }
    }

    fn gaussian_symbol() -> impl Strategy<Value = FourierSymbol> {
        proptest::collection::vec(((-2i64..=2, -2i64..=2), (-3i32..=3, -3i32..=3)), 0..6).prop_map(
            |entries| {
                let mut map = Laurent::new();
                for ((m, n), (re, im)) in entries {
                    let v = Complex64::new(re as f64, im as f64);
                    map.insert((m, n), v);
                    map.insert((n, m), v);
                }
                FourierSymbol::new(map).unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn product_commutative_associative(f in gaussian_symbol(), g in gaussian_symbol(), h in gaussian_symbol()) {
            // Gaussian-integer inputs keep every coefficient exact
            prop_assert_eq!(f.product(&g), g.product(&f));
            prop_assert_eq!(f.product(&g).product(&h), f.product(&g.product(&h)));
            prop_assert!(f.product(&g).bandwidth() <= f.bandwidth() + g.bandwidth());
            // symmetry survives
            prop_assert!(FourierSymbol::new(f.product(&g).coeffs().clone()).is_ok());
        }

        #[test]
        fn conjugate_involutive(f in gaussian_symbol()) {
            prop_assert_eq!(f.conjugate().conjugate(), f.clone());
            prop_assert!(FourierSymbol::new(f.conjugate().coeffs().clone()).is_ok());
        }

        #[test]
        fn conjugate_matches_pointwise(f in gaussian_symbol(), t1 in 0.0f64..6.3, t2 in 0.0f64..6.3) {
            let a = f.conjugate().eval_torus(t1, t2);
            let b = f.eval_torus(t1, t2).conj();
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn sp_polynomial_evaluation_matches_torus_pullback() {
        let poly = SpPoly::from_terms([
            ((2, 0, 0, 1), Complex64::new(1.0, -2.0)),
            ((0, 1, 1, 0), Complex64::new(0.5, 0.0)),
            ((0, 0, 0, 0), Complex64::new(0.0, 1.0)),
        ]);
        let f = sp_to_fourier(&poly);
        for (t1, t2) in [(0.1, 2.0), (1.3, -0.7), (3.0, 3.0)] {
            let z1 = Complex64::from_polar(1.0, t1);
            let z2 = Complex64::from_polar(1.0, t2);
            let direct = poly.eval(z1 + z2, z1 * z2);
            assert!((direct - f.eval_torus(t1, t2)).norm() < 1e-12);
        }
    }
}
