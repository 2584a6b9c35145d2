//! Models of the Hardy space of the symmetrized bidisc.
//!
//! The computational home is the anti-symmetric Hardy space with orthonormal
//! basis `ê_{a,b}`, `a > b ≥ 0`. A holomorphic `f(s, p)` corresponds to
//! `J · (f∘π) / ‖J‖` where `J = z₁ − z₂` is the complex Jacobian of the
//! symmetrization map and `‖J‖² = 2`. The inverse sends `ê_{a,b}` to
//! `p^b h_{a−b−1}(s, p)`, where `h_m = (z₁^{m+1} − z₂^{m+1})/(z₁ − z₂)`
//! satisfies `h₀ = 1`, `h₁ = s`, `h_m = s h_{m−1} − p h_{m−2}`.
//!
//! Relabelling `ê_{a,b} ↦ z^b e_{a−b}` gives the vector-valued Hardy model in
//! which `T_p` becomes the unilateral shift.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{AntiIndex, IndexWindow};
use crate::linalg::CVector;
use crate::operators;
use crate::symbols::SpPoly;

/// `‖J‖²` for `J = z₁ − z₂` under normalized torus measure.
pub const JACOBIAN_NORM_SQ: f64 = 2.0;

/// Default absolute tolerance on root moduli when classifying points.
pub const DEFAULT_POINT_TOL: f64 = 1e-9;

const KERNEL_SINGULAR: f64 = 1e-14;

/// Element of the anti-symmetric Hardy space in `ê` coordinates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HardyElement {
    coeffs: BTreeMap<AntiIndex, Complex64>,
}

impl HardyElement {
    pub fn new(coeffs: impl IntoIterator<Item = (AntiIndex, Complex64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, v) in coeffs {
            if !i.hardy() {
                return Err(Error::IndexOutsideWindow { a: i.a(), b: i.b() });
            }
            *map.entry(i).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        map.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        Ok(Self { coeffs: map })
    }

    pub fn coeffs(&self) -> &BTreeMap<AntiIndex, Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, i: AntiIndex) -> Complex64 {
        self.coeffs.get(&i).copied().unwrap_or_default()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.values().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(i, v)| v * other.coeff(*i).conj())
            .sum()
    }

    /// Coordinates on a window; fails if the support does not fit.
    pub fn to_vector(&self, window: &IndexWindow) -> Result<CVector> {
        let mut v = CVector::zeros(window.len());
        for (i, c) in &self.coeffs {
            let pos = window
                .position(i)
                .ok_or(Error::IndexOutsideWindow { a: i.a(), b: i.b() })?;
            v[pos] = *c;
        }
        Ok(v)
    }

    pub fn from_vector(window: &IndexWindow, v: &CVector) -> Result<Self> {
        Self::new(window.iter().zip(v.iter()).map(|(i, c)| (i, *c)))
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        let mut keys: Vec<_> = self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }
}

/// Element of `H²_ℰ(𝔻)`: coefficient of `z^i e_j`, `i ≥ 0`, `j ≥ 1`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VectorHardyElement {
    coeffs: BTreeMap<(u64, u64), Complex64>,
}

impl VectorHardyElement {
    pub fn coeffs(&self) -> &BTreeMap<(u64, u64), Complex64> {
        &self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.values().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Multiplication by `z`.
    pub fn shift(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&(i, j), v)| ((i + 1, j), *v)).collect(),
        }
    }
}

/// `ê_{a,b} ↦ z^b e_{a−b}`.
pub fn to_vector_model(h: &HardyElement) -> VectorHardyElement {
    VectorHardyElement {
        coeffs: h
            .coeffs
            .iter()
            .map(|(i, v)| ((i.b() as u64, (i.a() - i.b()) as u64), *v))
            .collect(),
    }
}

pub fn from_vector_model(v: &VectorHardyElement) -> HardyElement {
    HardyElement {
        coeffs: v
            .coeffs
            .iter()
            .map(|(&(i, j), c)| {
                (
                    AntiIndex::new((i + j) as i64, i as i64).expect("j >= 1"),
                    *c,
                )
            })
            .collect(),
    }
}

/// `h_m(s, p)` as a polynomial, from the three-term recurrence.
pub fn h_poly(m: usize) -> SpPoly {
    let mut prev = SpPoly::one();
    if m == 0 {
        return prev;
    }
    let mut cur = SpPoly::s();
    for _ in 1..m {
        let next = SpPoly::s().mul(&cur).sub(&SpPoly::p().mul(&prev));
        prev = cur;
        cur = next;
    }
    cur
}

/// `J · (f∘π) / ‖J‖` in `ê` coordinates.
pub fn sp_poly_to_hardy(f: &SpPoly) -> Result<HardyElement> {
    if !f.is_holomorphic() {
        return Err(Error::NotAnalytic);
    }
    let one = Complex64::new(1.0, 0.0);
    let jac = BTreeMap::from([((1, 0), one), ((0, 1), -one)]);
    let g = crate::symbols::laurent_mul(&jac, &f.to_laurent());
    // g = Σ c_{a,b} (z₁^a z₂^b − z₁^b z₂^a) over a > b, and ê carries 1/√2,
    // so dividing by ‖J‖ = √2 leaves the coordinate c_{a,b}
    let coeffs = g
        .iter()
        .filter(|((m, n), _)| m > n)
        .map(|(&(m, n), v)| (AntiIndex::new(m, n).unwrap(), *v));
    HardyElement::new(coeffs)
}

/// Inverse of [`sp_poly_to_hardy`]: `ê_{a,b} ↦ p^b h_{a−b−1}`.
pub fn hardy_to_sp_poly(h: &HardyElement) -> SpPoly {
    let mut cache: BTreeMap<usize, SpPoly> = BTreeMap::new();
    let mut out = SpPoly::zero();
    for (i, c) in h.coeffs() {
        let m = (i.a() - i.b() - 1) as usize;
        let hm = cache.entry(m).or_insert_with(|| h_poly(m)).clone();
        let pb = SpPoly::monomial((0, i.b() as u32, 0, 0), *c);
        out = out.add(&pb.mul(&hm));
    }
    out
}

/// `∫_{𝕋²} |f(π(rζ))|² |J(rζ)|² dm / ‖J‖²` by the trapezoid rule.
///
/// Exact for `grid ≥ 2·deg + 3`, where `deg` is the total degree of `f`.
pub fn hardy_norm_quadrature(f: &SpPoly, r: f64, grid: usize) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::RadiusOutOfRange(r));
    }
    if !f.is_holomorphic() {
        return Err(Error::NotAnalytic);
    }
    let degree = f.degree() as usize;
    let required = 2 * degree + 3;
    if grid < required {
        return Err(Error::GridTooSmall {
            grid,
            degree,
            required,
        });
    }
    if f.is_zero() {
        return Ok(0.0);
    }
    let pts: Vec<Complex64> = (0..grid)
        .map(|k| Complex64::from_polar(r, 2.0 * PI * k as f64 / grid as f64))
        .collect();
    let mut acc = 0.0;
    for z1 in &pts {
        for z2 in &pts {
            let v = f.eval(z1 + z2, z1 * z2);
            acc += v.norm_sqr() * (z1 - z2).norm_sqr();
        }
    }
    Ok(acc / (grid * grid) as f64 / JACOBIAN_NORM_SQ)
}

/// A point `(s, p)` of `ℂ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaPoint {
    pub s: Complex64,
    pub p: Complex64,
}

impl GammaPoint {
    pub fn new(s: Complex64, p: Complex64) -> Self {
        Self { s, p }
    }

    pub fn real(s: f64, p: f64) -> Self {
        Self::new(Complex64::new(s, 0.0), Complex64::new(p, 0.0))
    }

    /// Roots of `z² − s z + p`, i.e. a preimage under the symmetrization map.
    pub fn roots(&self) -> (Complex64, Complex64) {
        let disc = (self.s * self.s - self.p * 4.0).sqrt();
        let plus = (self.s + disc) * 0.5;
        let minus = (self.s - disc) * 0.5;
        let big = if plus.norm() >= minus.norm() { plus } else { minus };
        if big.norm() == 0.0 {
            return (big, big);
        }
        (big, self.p / big)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointClass {
    /// Open symmetrized bidisc.
    InG,
    /// In the closed set but neither interior nor distinguished boundary.
    InGammaBoundaryish,
    /// Distinguished boundary: both roots unimodular.
    InBGamma,
    Outside,
}

impl PointClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            PointClass::InG => "IN_G",
            PointClass::InGammaBoundaryish => "IN_GAMMA_BOUNDARYISH",
            PointClass::InBGamma => "IN_B_GAMMA",
            PointClass::Outside => "OUTSIDE",
        }
    }
}

/// Classify by the moduli of the roots of `z² − s z + p`.
pub fn classify_point(pt: GammaPoint, tol: f64) -> PointClass {
    let (z1, z2) = pt.roots();
    let (m1, m2) = (z1.norm(), z2.norm());
    if m1.max(m2) > 1.0 + tol {
        PointClass::Outside
    } else if (m1 - 1.0).abs() <= tol && (m2 - 1.0).abs() <= tol {
        PointClass::InBGamma
    } else if m1.max(m2) < 1.0 - tol {
        PointClass::InG
    } else {
        PointClass::InGammaBoundaryish
    }
}

fn require_interior(pt: GammaPoint) -> Result<()> {
    if classify_point(pt, DEFAULT_POINT_TOL) != PointClass::InG {
        return Err(Error::PointOutsideDomain {
            s: pt.s.to_string(),
            p: pt.p.to_string(),
        });
    }
    Ok(())
}

/// Closed form of the reproducing kernel of `H²(𝔾)`.
pub fn szego_eval(w1: GammaPoint, w2: GammaPoint) -> Result<Complex64> {
    require_interior(w1)?;
    require_interior(w2)?;
    let (s1, p1) = (w1.s, w1.p);
    let (s2c, p2c) = (w2.s.conj(), w2.p.conj());
    let one = Complex64::new(1.0, 0.0);
    let denom = (one - p1 * p2c).powu(2) - (s1 - s2c * p1) * (s2c - s1 * p2c);
    if denom.norm() < KERNEL_SINGULAR {
        return Err(Error::KernelSingularity(denom.norm()));
    }
    Ok(one / denom)
}

/// Values of the orthonormal basis `f_{a,b} = p^b h_{a−b−1}` at a point, over a window.
pub fn basis_values(pt: GammaPoint, window: &IndexWindow) -> Vec<Complex64> {
    let hmax = (window.a_max - window.b_min.max(0)).max(1) as usize;
    let mut h = Vec::with_capacity(hmax + 1);
    h.push(Complex64::new(1.0, 0.0));
    h.push(pt.s);
    for m in 2..=hmax {
        let next = pt.s * h[m - 1] - pt.p * h[m - 2];
        h.push(next);
    }
    window
        .iter()
        .map(|i| pt.p.powi(i.b() as i32) * h[(i.a() - i.b() - 1) as usize])
        .collect()
}

/// `Σ_{hardy_window(D)} f_{a,b}(w1) · conj(f_{a,b}(w2))`.
pub fn szego_partial_sum(w1: GammaPoint, w2: GammaPoint, d: i64) -> Result<Complex64> {
    require_interior(w1)?;
    require_interior(w2)?;
    let w = IndexWindow::hardy(d)?;
    let f1 = basis_values(w1, &w);
    let f2 = basis_values(w2, &w);
    Ok(f1.iter().zip(&f2).map(|(x, y)| x * y.conj()).sum())
}

/// Truncated kernel vector `k_w` in `ê` coordinates on `hardy_window(D)`.
pub fn kernel_vector(w: GammaPoint, d: i64) -> Result<CVector> {
    require_interior(w)?;
    let win = IndexWindow::hardy(d)?;
    Ok(CVector::from_iterator(
        win.len(),
        basis_values(w, &win).into_iter().map(|v| v.conj()),
    ))
}

/// Relative residuals `‖T_s* k_w − s̄ k_w‖/‖k_w‖` and `‖T_p* k_w − p̄ k_w‖/‖k_w‖`.
pub fn joint_eigen_residual(w: GammaPoint, d: i64) -> Result<(f64, f64)> {
    let k = kernel_vector(w, d)?;
    let ts = operators::build_ts(d)?.adjoint();
    let tp = operators::build_tp(d)?.adjoint();
    let rs = ts.apply(&k)? - &k * w.s.conj();
    let rp = tp.apply(&k)? - &k * w.p.conj();
    let nk = k.norm();
    Ok((rs.norm() / nk, rp.norm() / nk))
}
