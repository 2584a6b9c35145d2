//! Certifiers for the structure theorems, evaluated on finite sections.
//!
//! Every check compares matrix identities on a safe sub-window, where the
//! truncated products agree with the infinite band operators, and reports the
//! largest entry (or norm) residual per sub-check.

use std::collections::BTreeMap;

use nalgebra::linalg::QR;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{AntiIndex, IndexWindow, Lattice};
use crate::linalg::{self, CMatrix};
use crate::operators::{self, OperatorMatrix};
use crate::spaces::{classify_point, GammaPoint, PointClass};
use crate::symbols::FourierSymbol;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Tolerance for joint-eigenvalue clustering and the subspace fallback.
pub const CLUSTER_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubCheck {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub window: Option<IndexWindow>,
    pub margin: Option<i64>,
    pub details: Vec<SubCheck>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub data: BTreeMap<String, serde_json::Value>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            passed: true,
            residual: 0.0,
            tolerance,
            window: None,
            margin: None,
            details: Vec::new(),
            data: BTreeMap::new(),
        }
    }

    pub fn with_window(mut self, window: IndexWindow, margin: Option<i64>) -> Self {
        self.window = Some(window);
        self.margin = margin;
        self
    }

    /// Record a sub-check with the report tolerance.
    pub fn check(&mut self, name: impl Into<String>, residual: f64) {
        let tol = self.tolerance;
        self.check_with(name, residual, tol);
    }

    pub fn check_with(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) {
        self.details.push(SubCheck {
            name: name.into(),
            residual,
            tolerance,
        });
        self.passed = self.details.iter().all(|d| d.residual <= d.tolerance);
        self.residual = self.details.iter().map(|d| d.residual).fold(0.0, f64::max);
    }

    pub fn insert(&mut self, key: impl Into<String>, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.data.insert(key.into(), v);
    }

    pub fn sub(&self, name: &str) -> Option<&SubCheck> {
        self.details.iter().find(|d| d.name == name)
    }
}

/// A pair of square matrices of equal size, e.g. `(R, U)` or `(T, V)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePair {
    pub t: CMatrix,
    pub v: CMatrix,
}

impl FinitePair {
    pub fn new(t: CMatrix, v: CMatrix) -> Result<Self> {
        if !t.is_square() || !v.is_square() || t.nrows() != v.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "pair of {}x{} and {}x{} matrices",
                t.nrows(),
                t.ncols(),
                v.nrows(),
                v.ncols()
            )));
        }
        Ok(Self { t, v })
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }
}

fn hardy_of(t: &OperatorMatrix) -> Result<i64> {
    let w = *t.rows();
    if !t.is_square() || w != IndexWindow::hardy(w.a_max)? {
        return Err(Error::WindowMismatch(format!(
            "expected a square section on a Hardy window, got [{}]x[{}]",
            t.rows(),
            t.cols()
        )));
    }
    Ok(w.a_max)
}

fn co_hardy_of(t: &OperatorMatrix) -> Result<i64> {
    let w = *t.rows();
    if !t.is_square() || w != IndexWindow::co_hardy(w.a_max)? {
        return Err(Error::WindowMismatch(format!(
            "expected a square section on a co-Hardy window, got [{}]x[{}]",
            t.rows(),
            t.cols()
        )));
    }
    Ok(w.a_max)
}

fn windowed_max(m: &OperatorMatrix, w: &IndexWindow) -> Result<f64> {
    Ok(m.restrict_to(w)?.max_abs())
}

/// `max |·|` of `A*·T·B − T·A` and `B*·T·B − T` on `safe`.
fn bh_residuals(
    t: &OperatorMatrix,
    a: &OperatorMatrix,
    b: &OperatorMatrix,
    safe: &IndexWindow,
) -> Result<(f64, f64)> {
    let tb = t.compose(b)?;
    let first = a.adjoint().compose(&tb)?.sub(&t.compose(a)?)?;
    let second = b.adjoint().compose(&tb)?.sub(t)?;
    Ok((windowed_max(&first, safe)?, windowed_max(&second, safe)?))
}

/// Brown-Halmos relations `T_s*TT_p = TT_s` and `T_p*TT_p = T` on the safe
/// window. Only the truncation edge `a = a_max` is trimmed; `b = 0` is exact.
pub fn check_brown_halmos(t: &OperatorMatrix, margin: i64, tol: f64) -> Result<CheckReport> {
    let d = hardy_of(t)?;
    let safe = t.rows().safe_subwindow_in(margin, Lattice::Hardy)?;
    let (first, second) = bh_residuals(t, &operators::build_ts(d)?, &operators::build_tp(d)?, &safe)?;
    let mut r = CheckReport::new("brown-halmos", tol).with_window(safe, Some(margin));
    r.check("Ts* T Tp - T Ts", first);
    r.check("Tp* T Tp - T", second);
    Ok(r)
}

/// Read the symbol of a Toeplitz section off translated entries.
///
/// For `u ≥ v` the entry at row `(a+u, b+v)`, column `(a, b)` with
/// `b = max(0, −v)`, `a = b + 2β + 1` is `α_{u,v}`; the reflected term falls
/// outside the band.
pub fn recover_symbol(t: &OperatorMatrix, beta: i64) -> Result<FourierSymbol> {
    let d = hardy_of(t)?;
    if beta < 0 {
        return Err(Error::OutOfRange(format!("negative bandwidth {beta}")));
    }
    if d < 4 * beta + 2 {
        return Err(Error::WindowTooSmall { beta, size: d });
    }
    let mut coeffs = Vec::new();
    for v in -beta..=beta {
        for u in v..=beta {
            let b = 0.max(-v);
            let a = b + 2 * beta + 1;
            let col = AntiIndex::new(a, b)?;
            let row = AntiIndex::new(a + u, b + v)?;
            if !t.rows().contains(&row) || !t.cols().contains(&col) {
                return Err(Error::WindowTooSmall { beta, size: d });
            }
            let val = t.entry(row, col);
            if val != ZERO {
                coeffs.push(((u, v), val));
                if u != v {
                    coeffs.push(((v, u), val));
                }
            }
        }
    }
    FourierSymbol::new(coeffs)
}

/// Eigenvalue pairs `(s, p)` of a commuting pair of normal matrices.
///
/// A random combination `R + cU` is Schur-decomposed first; when its Schur
/// basis fails to diagonalize both matrices (clustered eigenvalues), the
/// eigenspaces of `U` are split and `R` is diagonalized on each.
pub fn joint_eigenvalues(pair: &FinitePair) -> Vec<(Complex64, Complex64)> {
    let n = pair.dim();
    if n == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x6a17);
    let angle = rng.random::<f64>() * std::f64::consts::TAU;
    let c = Complex64::from_polar(0.5 + rng.random::<f64>(), angle);
    let m = &pair.t + &pair.v * c;
    let (q, _) = linalg::schur(&m);
    let qs = q.adjoint();
    let rq = &qs * &pair.t * &q;
    let uq = &qs * &pair.v * &q;
    let scale = 1.0 + linalg::max_abs(&pair.t).max(linalg::max_abs(&pair.v));
    let off = |m: &CMatrix| {
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                if i != j {
                    worst = worst.max(m[(i, j)].norm());
                }
            }
        }
        worst
    };
    if off(&rq).max(off(&uq)) <= CLUSTER_TOL * scale {
        return (0..n).map(|i| (rq[(i, i)], uq[(i, i)])).collect();
    }

    let (qu, tu) = linalg::schur(&pair.v);
    let lams: Vec<Complex64> = (0..n).map(|i| tu[(i, i)]).collect();
    let mut cluster = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if cluster[i] != usize::MAX {
            continue;
        }
        let g = groups.len();
        let mut stack = vec![i];
        cluster[i] = g;
        let mut members = Vec::new();
        while let Some(k) = stack.pop() {
            members.push(k);
            for j in 0..n {
                if cluster[j] == usize::MAX && (lams[j] - lams[k]).norm() <= CLUSTER_TOL * scale {
                    cluster[j] = g;
                    stack.push(j);
                }
            }
        }
        members.sort_unstable();
        groups.push(members);
    }
    let mut out = Vec::with_capacity(n);
    for members in groups {
        let basis = CMatrix::from_fn(n, members.len(), |i, j| qu[(i, members[j])]);
        let block = basis.adjoint() * &pair.t * &basis;
        let p = members.iter().map(|&k| lams[k]).sum::<Complex64>() / members.len() as f64;
        for s in linalg::eigenvalues(&block) {
            out.push((s, p));
        }
    }
    out
}

/// Distance of a point from the distinguished boundary, measured on the
/// moduli of the roots of `z² − sz + p`.
fn boundary_distance(s: Complex64, p: Complex64) -> f64 {
    let (z1, z2) = GammaPoint::new(s, p).roots();
    (z1.norm() - 1.0).abs().max((z2.norm() - 1.0).abs())
}

/// `(R, U)` is a Γ-unitary iff `U` is unitary, `R = R*U` and `r(R) ≤ 2`,
/// given `RU = UR`. The joint eigenvalues are also checked to lie on `bΓ`.
pub fn certify_gamma_unitary(pair: &FinitePair, tol: f64) -> Result<CheckReport> {
    let FinitePair { t: r, v: u } = pair;
    let id = linalg::identity(pair.dim());
    let mut rep = CheckReport::new("gamma-unitary", tol);
    rep.check("RU - UR", linalg::max_abs(&(r * u - u * r)));
    let unit = linalg::max_abs(&(u.adjoint() * u - &id)).max(linalg::max_abs(&(u * u.adjoint() - &id)));
    rep.check("U*U - I, UU* - I", unit);
    rep.check("R - R*U", linalg::max_abs(&(r - r.adjoint() * u)));
    let rho = linalg::spectral_radius(r);
    rep.check("r(R) <= 2", (rho - 2.0).max(0.0));

    // roots move like the square root of a perturbation at double points
    let class_tol = tol.sqrt().max(CLUSTER_TOL);
    let pairs = joint_eigenvalues(pair);
    let mut worst: f64 = 0.0;
    let mut classes = Vec::with_capacity(pairs.len());
    for &(s, p) in &pairs {
        worst = worst.max(boundary_distance(s, p));
        classes.push(classify_point(GammaPoint::new(s, p), class_tol).as_str());
    }
    rep.check_with("joint spectrum in bGamma", worst, class_tol);
    rep.insert("spectral_radius", rho);
    rep.insert(
        "joint_eigenvalues",
        pairs
            .iter()
            .map(|(s, p)| [[s.re, s.im], [p.re, p.im]])
            .collect::<Vec<_>>(),
    );
    rep.insert("classes", classes);
    Ok(rep)
}

/// `(T, V)` is a Γ-isometry iff `V` is an isometry, `T = T*V` and `r(T) ≤ 2`,
/// given `TV = VT`.
pub fn certify_gamma_isometry(pair: &FinitePair, tol: f64) -> Result<CheckReport> {
    let FinitePair { t, v } = pair;
    let id = linalg::identity(pair.dim());
    let mut rep = CheckReport::new("gamma-isometry", tol);
    rep.check("TV - VT", linalg::max_abs(&(t * v - v * t)));
    rep.check("V*V - I", linalg::max_abs(&(v.adjoint() * v - &id)));
    rep.check("T - T*V", linalg::max_abs(&(t - t.adjoint() * v)));
    let rho = linalg::spectral_radius(t);
    rep.check("r(T) <= 2", (rho - 2.0).max(0.0));
    rep.insert("spectral_radius", rho);
    Ok(rep)
}

/// Γ-isometry axioms for finite sections, evaluated on the safe window.
pub fn certify_gamma_isometry_windowed(
    t: &OperatorMatrix,
    v: &OperatorMatrix,
    margin: i64,
    lattice: Lattice,
    tol: f64,
) -> Result<CheckReport> {
    if !t.is_square() || t.rows() != v.rows() || t.cols() != v.cols() {
        return Err(Error::WindowMismatch("pair of sections on different windows".into()));
    }
    let safe = t.rows().safe_subwindow_in(margin, lattice)?;
    let id = OperatorMatrix::identity(*t.rows());
    let mut rep = CheckReport::new("gamma-isometry (windowed)", tol).with_window(safe, Some(margin));
    rep.check("TV - VT", windowed_max(&t.compose(v)?.sub(&v.compose(t)?)?, &safe)?);
    rep.check("V*V - I", windowed_max(&v.adjoint().compose(v)?.sub(&id)?, &safe)?);
    rep.check("T - T*V", windowed_max(&t.sub(&t.adjoint().compose(v)?)?, &safe)?);
    let rho = linalg::spectral_radius(t.restrict_to(&safe)?.entries());
    rep.check("r(T) <= 2", (rho - 2.0).max(0.0));
    rep.insert("spectral_radius", rho);
    Ok(rep)
}

/// Analyticity of `f` against three operator-theoretic characterizations:
/// `[T_f, T_p] = 0`, `[T_f, T_s] = 0` and `T_f(Ran T_p) ⊆ Ran T_p`. The report
/// passes when all four outcomes agree.
pub fn check_analyticity_equivalences(f: &FourierSymbol, d: i64) -> Result<CheckReport> {
    let beta = f.bandwidth();
    if d < 4 * beta + 2 {
        return Err(Error::WindowTooSmall { beta, size: d });
    }
    let margin = beta + 1;
    let t = operators::build_toeplitz(f, d)?;
    let ts = operators::build_ts(d)?;
    let tp = operators::build_tp(d)?;
    let safe = t.rows().safe_subwindow_in(margin, Lattice::Hardy)?;
    let scale = f.coeffs().values().map(|c| c.norm()).fold(1.0, f64::max);
    let tol = 1e-12 * scale;

    let comm_p = windowed_max(&t.compose(&tp)?.sub(&tp.compose(&t)?)?, &safe)?;
    let comm_s = windowed_max(&t.compose(&ts)?.sub(&ts.compose(&t)?)?, &safe)?;
    let q = OperatorMatrix::identity(*t.rows()).sub(&tp.compose(&tp.adjoint())?)?;
    let range = windowed_max(&q.compose(&t)?.compose(&tp)?, &safe)?;

    let outcomes = [
        ("analytic symbol", f.is_analytic()),
        ("commutes with T_p", comm_p <= tol),
        ("preserves Ran T_p", range <= tol),
        ("commutes with T_s", comm_s <= tol),
    ];
    let mut rep = CheckReport::new("analyticity-equivalences", 0.0).with_window(safe, Some(margin));
    for (name, v) in &outcomes[1..] {
        rep.check(format!("{name} agrees"), if *v == outcomes[0].1 { 0.0 } else { 1.0 });
    }
    rep.insert(
        "outcomes",
        outcomes.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>(),
    );
    rep.insert(
        "residuals",
        BTreeMap::from([
            ("[T_f,T_p]".to_string(), comm_p),
            ("[T_f,T_s]".to_string(), comm_s),
            ("(I-T_pT_p*)T_fT_p".to_string(), range),
        ]),
    );
    rep.insert("zero_tolerance", tol);
    Ok(rep)
}

/// `η_n(T)` for `n = 1..D/2`.
pub fn compactness_profile(t: &OperatorMatrix) -> Result<Vec<(i64, f64)>> {
    let d = hardy_of(t)?;
    if d < 8 {
        return Err(Error::OutOfRange(format!("compactness profile needs D >= 8, got {d}")));
    }
    (1..=d / 2).map(|n| Ok((n, operators::eta(t, n)?))).collect()
}

/// The block `T_p*ⁿ Y T_pⁿ` on `w`, read off by translating indices.
fn shifted_block(y: &OperatorMatrix, n: i64, w: &IndexWindow) -> OperatorMatrix {
    OperatorMatrix::from_column_map(*w, *w, y.label(), |c| {
        let cc = AntiIndex::new(c.a() + n, c.b() + n).unwrap();
        w.iter()
            .filter_map(|r| {
                let rr = AntiIndex::new(r.a() + n, r.b() + n).unwrap();
                let v = y.entry(rr, cc);
                (v != ZERO).then_some((r, v))
            })
            .collect()
    })
}

/// Finite-horizon asymptotic-Toeplitz test. Three profiles are computed for
/// `n = 1..D/2`:
/// (a) `‖T_p*ⁿ[T,T_s]T_pⁿ‖`, (b) `‖T_p*ⁿTT_pⁿ − T_f‖`, (c) `η_n(T − T_f)`.
/// The check passes when all three are below `tol` at `n = D/2`.
pub fn check_asymptotic_toeplitz(
    t: &OperatorMatrix,
    f: &FourierSymbol,
    tol: f64,
) -> Result<CheckReport> {
    let d = hardy_of(t)?;
    if d < 8 {
        return Err(Error::WindowTooSmall {
            beta: f.bandwidth(),
            size: d,
        });
    }
    let ts = operators::build_ts(d)?;
    let tf = operators::build_toeplitz(f, d)?;
    let comm = t.compose(&ts)?.sub(&ts.compose(t)?)?;
    let k = t.sub(&tf)?;
    let mut pa = Vec::new();
    let mut pb = Vec::new();
    let mut pc = Vec::new();
    for n in 1..=d / 2 {
        let w = t.rows().safe_subwindow_in(n + 1, Lattice::Hardy)?;
        pa.push((n, shifted_block(&comm, n, &w).norm()));
        let diff = shifted_block(t, n, &w).sub(&tf.restrict_to(&w)?)?;
        pb.push((n, diff.norm()));
        pc.push((n, operators::eta(&k, n)?));
    }
    let tail = |p: &[(i64, f64)]| p.last().map(|x| x.1).unwrap_or(0.0);
    let mut rep = CheckReport::new("asymptotic-toeplitz", tol).with_window(*t.rows(), None);
    rep.check("(a) Tp*^n [T,Ts] Tp^n", tail(&pa));
    rep.check("(b) Tp*^n T Tp^n - T_f", tail(&pb));
    rep.check("(c) eta_n(T - T_f)", tail(&pc));
    rep.insert("profile_a", pa);
    rep.insert("profile_b", pb);
    rep.insert("profile_c", pc);
    Ok(rep)
}

/// Brown-Halmos relations with respect to `(DT_s̄, DT_p̄)` on the co-Hardy
/// window. The edge `b = −1` is exact; `b = b_min` and `a = a_max` are trimmed.
pub fn check_dual_toeplitz_bh(t: &OperatorMatrix, margin: i64, tol: f64) -> Result<CheckReport> {
    let d = co_hardy_of(t)?;
    let safe = t.rows().safe_subwindow_in(margin, Lattice::CoHardy)?;
    let (ds, dp) = dual_shift_pair(d)?;
    let (first, second) = bh_residuals(t, &ds, &dp, &safe)?;
    let mut r = CheckReport::new("dual-brown-halmos", tol).with_window(safe, Some(margin));
    r.check("DTs* T DTp - T DTs", first);
    r.check("DTp* T DTp - T", second);
    Ok(r)
}

/// `(DT_s̄, DT_p̄)` on the co-Hardy window of size `d`.
pub fn dual_shift_pair(d: i64) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let ds = operators::build_dual_toeplitz(&FourierSymbol::s().conjugate(), d)?.with_label("DT_sbar");
    let dp = operators::build_dual_toeplitz(&FourierSymbol::p().conjugate(), d)?.with_label("DT_pbar");
    Ok((ds, dp))
}

/// `T_s* − T_sT_p* = Q·X*·Q` with `Q = I − T_pT_p*`.
pub fn check_fundamental_operator(d: i64, tol: f64) -> Result<CheckReport> {
    if d < 4 {
        return Err(Error::OutOfRange(format!("fundamental check needs D >= 4, got {d}")));
    }
    let x = operators::build_x(d)?;
    check_fundamental_candidate(d, &x.adjoint(), tol)
}

/// The fundamental-operator identity with an arbitrary candidate `F` in place
/// of `X*`.
pub fn check_fundamental_candidate(d: i64, candidate: &OperatorMatrix, tol: f64) -> Result<CheckReport> {
    if d < 4 {
        return Err(Error::OutOfRange(format!("fundamental check needs D >= 4, got {d}")));
    }
    let ts = operators::build_ts(d)?;
    let tp = operators::build_tp(d)?;
    let id = OperatorMatrix::identity(*ts.rows());
    if candidate.rows() != ts.rows() || candidate.cols() != ts.cols() {
        return Err(Error::WindowMismatch("candidate must live on the Hardy window".into()));
    }
    let q = id.sub(&tp.compose(&tp.adjoint())?)?;
    let safe = ts.rows().safe_subwindow_in(1, Lattice::Hardy)?;
    let lhs = ts.adjoint().sub(&ts.compose(&tp.adjoint())?)?;
    let rhs = q.compose(candidate)?.compose(&q)?;
    let mut rep = CheckReport::new("fundamental-operator", tol).with_window(safe, Some(1));
    rep.check("Ts* - Ts Tp* - Q F Q", windowed_max(&lhs.sub(&rhs)?, &safe)?);
    rep.check("Q^2 - Q", windowed_max(&q.compose(&q)?.sub(&q)?, &safe)?);
    rep.check("Q - Q*", windowed_max(&q.sub(&q.adjoint())?, &safe)?);
    rep.check("Q Tp", windowed_max(&q.compose(&tp)?, &safe)?);
    Ok(rep)
}

/// A random unitary from the QR factorization of a random complex matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
    let m = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    QR::new(m).q()
}

/// A Γ-unitary `(U₁ + U₂, U₁U₂)` built from commuting unitaries that share a
/// random eigenbasis, together with its joint eigenvalues.
pub fn random_gamma_unitary(
    n: usize,
    rng: &mut impl Rng,
) -> (FinitePair, Vec<(Complex64, Complex64)>) {
    let w = random_unitary(n, rng);
    let tau = std::f64::consts::TAU;
    let mut d1 = CMatrix::zeros(n, n);
    let mut d2 = CMatrix::zeros(n, n);
    let mut joint = Vec::with_capacity(n);
    for i in 0..n {
        let z1 = Complex64::from_polar(1.0, tau * rng.random::<f64>());
        let z2 = Complex64::from_polar(1.0, tau * rng.random::<f64>());
        d1[(i, i)] = z1;
        d2[(i, i)] = z2;
        joint.push((z1 + z2, z1 * z2));
    }
    let wa = w.adjoint();
    let u1 = &w * d1 * &wa;
    let u2 = &w * d2 * &wa;
    let pair = FinitePair {
        t: &u1 + &u2,
        v: &u1 * &u2,
    };
    (pair, joint)
}

/// True when every joint eigenvalue classifies into the distinguished boundary.
pub fn all_in_b_gamma(pairs: &[(Complex64, Complex64)], tol: f64) -> bool {
    pairs
        .iter()
        .all(|&(s, p)| classify_point(GammaPoint::new(s, p), tol) == PointClass::InBGamma)
}
