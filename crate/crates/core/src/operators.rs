//! Finite sections of Laurent, Toeplitz, Hankel and dual Toeplitz operators,
//! the coordinate pair `(T_s, T_p)`, the shifts `X`, `X₀`, the finite-rank
//! projections `F_n`, and the block functional `η_n`.
//!
//! Every entry is the exact matrix element of the infinite operator,
//!
//! ```text
//! ⟨M_φ ê_{a,b}, ê_{c,d}⟩ = α_{c−a, d−b} − α_{c−b, d−a},
//! ```
//!
//! so the only approximation is the choice of window. Images that fall
//! outside the row window are dropped; identities between products therefore
//! hold exactly on safe sub-windows whose margin covers the total band of the
//! factors.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{AntiIndex, IndexWindow, Lattice};
use crate::linalg::{self, CMatrix};
use crate::symbols::FourierSymbol;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Exact matrix element of multiplication by `f` from column `col` to row `row`.
pub fn core_entry(f: &FourierSymbol, row: AntiIndex, col: AntiIndex) -> Complex64 {
    let (a, b) = (col.a(), col.b());
    let (c, d) = (row.a(), row.b());
    f.coeff(c - a, d - b) - f.coeff(c - b, d - a)
}

/// Dense finite section tagged with its row and column windows.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    rows: IndexWindow,
    cols: IndexWindow,
    entries: CMatrix,
    label: String,
}

impl OperatorMatrix {
    pub fn new(
        rows: IndexWindow,
        cols: IndexWindow,
        entries: CMatrix,
        label: impl Into<String>,
    ) -> Result<Self> {
        if entries.nrows() != rows.len() || entries.ncols() != cols.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} entries for windows of size {}x{}",
                entries.nrows(),
                entries.ncols(),
                rows.len(),
                cols.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
            label: label.into(),
        })
    }

    pub fn zeros(rows: IndexWindow, cols: IndexWindow, label: impl Into<String>) -> Self {
        Self {
            entries: CMatrix::zeros(rows.len(), cols.len()),
            rows,
            cols,
            label: label.into(),
        }
    }

    pub fn identity(window: IndexWindow) -> Self {
        Self {
            entries: linalg::identity(window.len()),
            rows: window,
            cols: window,
            label: "I".into(),
        }
    }

    /// Finite section of multiplication by `f` between two windows.
    pub fn from_symbol(
        f: &FourierSymbol,
        rows: IndexWindow,
        cols: IndexWindow,
        label: impl Into<String>,
    ) -> Self {
        let mut out = Self::zeros(rows, cols, label);
        for (j, col) in cols.iter().enumerate() {
            for &(m, n) in f.coeffs().keys() {
                if let Some((target, _)) = col.shift(m, n) {
                    if let Some(i) = rows.position(&target) {
                        out.entries[(i, j)] = core_entry(f, target, col);
                    }
                }
            }
        }
        out
    }

    /// Matrix whose column `col` is `image(col)`, dropping rows outside the window.
    pub fn from_column_map<F>(
        rows: IndexWindow,
        cols: IndexWindow,
        label: impl Into<String>,
        image: F,
    ) -> Self
    where
        F: Fn(AntiIndex) -> Vec<(AntiIndex, Complex64)>,
    {
        let mut out = Self::zeros(rows, cols, label);
        for (j, col) in cols.iter().enumerate() {
            for (target, v) in image(col) {
                if let Some(i) = rows.position(&target) {
                    out.entries[(i, j)] += v;
                }
            }
        }
        out
    }

    pub fn rows(&self) -> &IndexWindow {
        &self.rows
    }

    pub fn cols(&self) -> &IndexWindow {
        &self.cols
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// `⟨Op ê_col, ê_row⟩`, zero outside the windows.
    pub fn entry(&self, row: AntiIndex, col: AntiIndex) -> Complex64 {
        match (self.rows.position(&row), self.cols.position(&col)) {
            (Some(i), Some(j)) => self.entries[(i, j)],
            _ => ZERO,
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            rows: self.cols,
            cols: self.rows,
            entries: self.entries.adjoint(),
            label: format!("({})*", self.label),
        }
    }

    /// Product `self · rhs`; the inner windows must coincide.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::WindowMismatch(format!(
                "cannot compose [{}] with [{}]",
                self.cols, rhs.rows
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: rhs.cols,
            entries: linalg::matmul(&self.entries, &rhs.entries),
            label: format!("{}·{}", self.label, rhs.label),
        })
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::WindowMismatch("power of a non-square section".into()));
        }
        let mut acc = Self::identity(self.rows);
        for _ in 0..n {
            acc = acc.compose(self)?;
        }
        Ok(acc.with_label(format!("({})^{n}", self.label)))
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::WindowMismatch(format!(
                "[{}]x[{}] vs [{}]x[{}]",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: &self.entries + &other.entries,
            label: format!("{} + {}", self.label, other.label),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: &self.entries - &other.entries,
            label: format!("{} - {}", self.label, other.label),
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: &self.entries * c,
            label: format!("({c})·{}", self.label),
        }
    }

    /// Sub-block on `rows × cols`; both must be sub-windows.
    pub fn restrict(&self, rows: &IndexWindow, cols: &IndexWindow) -> Result<Self> {
        if !rows.is_subwindow_of(&self.rows) || !cols.is_subwindow_of(&self.cols) {
            return Err(Error::WindowMismatch(format!(
                "[{rows}]x[{cols}] is not inside [{}]x[{}]",
                self.rows, self.cols
            )));
        }
        let ri: Vec<usize> = rows.iter().map(|r| self.rows.position(&r).unwrap()).collect();
        let ci: Vec<usize> = cols.iter().map(|c| self.cols.position(&c).unwrap()).collect();
        let entries = CMatrix::from_fn(ri.len(), ci.len(), |i, j| self.entries[(ri[i], ci[j])]);
        Ok(Self {
            rows: *rows,
            cols: *cols,
            entries,
            label: self.label.clone(),
        })
    }

    /// Square restriction to a sub-window.
    pub fn restrict_to(&self, window: &IndexWindow) -> Result<Self> {
        self.restrict(window, window)
    }

    /// Re-embed into larger windows, padding with zeros.
    pub fn embed(&self, rows: &IndexWindow, cols: &IndexWindow) -> Result<Self> {
        if !self.rows.is_subwindow_of(rows) || !self.cols.is_subwindow_of(cols) {
            return Err(Error::WindowMismatch("embedding into smaller windows".into()));
        }
        let mut out = Self::zeros(*rows, *cols, self.label.clone());
        for (j, c) in self.cols.iter().enumerate() {
            let jj = cols.position(&c).unwrap();
            for (i, r) in self.rows.iter().enumerate() {
                out.entries[(rows.position(&r).unwrap(), jj)] = self.entries[(i, j)];
            }
        }
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.entries)
    }

    /// Operator norm of the section.
    pub fn norm(&self) -> f64 {
        linalg::spectral_norm(&self.entries)
    }

    /// Image of a single basis vector, as `(row index, value)` pairs.
    pub fn column(&self, col: AntiIndex) -> Vec<(AntiIndex, Complex64)> {
        match self.cols.position(&col) {
            None => Vec::new(),
            Some(j) => self
                .rows
                .iter()
                .enumerate()
                .filter_map(|(i, r)| {
                    let v = self.entries[(i, j)];
                    (v != ZERO).then_some((r, v))
                })
                .collect(),
        }
    }

    /// Apply to a coordinate vector indexed by the column window.
    pub fn apply(&self, v: &linalg::CVector) -> Result<linalg::CVector> {
        if v.len() != self.cols.len() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for a window of size {}",
                v.len(),
                self.cols.len()
            )));
        }
        Ok(&self.entries * v)
    }
}

/// Laurent operator `M_f` on a window of the full lattice.
pub fn build_laurent(f: &FourierSymbol, window: IndexWindow) -> OperatorMatrix {
    OperatorMatrix::from_symbol(f, window, window, "M_f")
}

fn check_size(d: i64, min: i64) -> Result<()> {
    if d < min {
        return Err(Error::OutOfRange(format!("window size {d} < {min}")));
    }
    Ok(())
}

/// Toeplitz operator `T_f` on the Hardy window of size `d`.
pub fn build_toeplitz(f: &FourierSymbol, d: i64) -> Result<OperatorMatrix> {
    check_size(d, 1)?;
    let w = IndexWindow::hardy(d)?;
    Ok(OperatorMatrix::from_symbol(f, w, w, "T_f"))
}

/// Hankel operator `H_f`: Hardy window `d` into the co-Hardy window `d + β`.
pub fn build_hankel(f: &FourierSymbol, d: i64) -> Result<OperatorMatrix> {
    check_size(d, 1)?;
    let cols = IndexWindow::hardy(d)?;
    let rows = IndexWindow::co_hardy(d + f.bandwidth())?;
    Ok(OperatorMatrix::from_symbol(f, rows, cols, "H_f"))
}

/// Dual Toeplitz operator `DT_f` on the co-Hardy window of size `d`.
pub fn build_dual_toeplitz(f: &FourierSymbol, d: i64) -> Result<OperatorMatrix> {
    check_size(d, 1)?;
    let w = IndexWindow::co_hardy(d)?;
    Ok(OperatorMatrix::from_symbol(f, w, w, "DT_f"))
}

pub fn build_ts(d: i64) -> Result<OperatorMatrix> {
    Ok(build_toeplitz(&FourierSymbol::s(), d)?.with_label("T_s"))
}

pub fn build_tp(d: i64) -> Result<OperatorMatrix> {
    Ok(build_toeplitz(&FourierSymbol::p(), d)?.with_label("T_p"))
}

/// The four blocks of `M_f` relative to Hardy space and its complement.
#[derive(Debug, Clone)]
pub struct MBlocks {
    /// `T_f` (Hardy → Hardy).
    pub toeplitz: OperatorMatrix,
    /// `H_{f̄}*` (co-Hardy → Hardy).
    pub hankel_conj_adjoint: OperatorMatrix,
    /// `H_f` (Hardy → co-Hardy).
    pub hankel: OperatorMatrix,
    /// `DT_f` (co-Hardy → co-Hardy).
    pub dual: OperatorMatrix,
}

impl MBlocks {
    /// Reassemble into a single section on the full window.
    pub fn assemble(&self) -> Result<OperatorMatrix> {
        let d = self.toeplitz.rows().a_max;
        let full = IndexWindow::full(d)?;
        let mut out = OperatorMatrix::zeros(full, full, "M_f (assembled)");
        for block in [&self.toeplitz, &self.hankel_conj_adjoint, &self.hankel, &self.dual] {
            for (j, c) in block.cols().iter().enumerate() {
                let Some(jj) = full.position(&c) else { continue };
                for (i, r) in block.rows().iter().enumerate() {
                    if let Some(ii) = full.position(&r) {
                        out.entries[(ii, jj)] = block.entries[(i, j)];
                    }
                }
            }
        }
        Ok(out)
    }
}

pub fn assemble_m_blocks(f: &FourierSymbol, d: i64) -> Result<MBlocks> {
    check_size(d, 1)?;
    let hardy = IndexWindow::hardy(d)?;
    let co = IndexWindow::co_hardy(d)?;
    let toeplitz = build_toeplitz(f, d)?;
    let hankel = OperatorMatrix::from_symbol(f, co, hardy, "H_f");
    let hankel_conj_adjoint = OperatorMatrix::from_symbol(&f.conjugate(), co, hardy, "H_conj(f)")
        .adjoint()
        .with_label("H_conj(f)*");
    let dual = build_dual_toeplitz(f, d)?;
    Ok(MBlocks {
        toeplitz,
        hankel_conj_adjoint,
        hankel,
        dual,
    })
}

/// `X ê_{a,b} = ê_{a+1,b}` on the Hardy window, overflow dropped.
pub fn build_x(d: i64) -> Result<OperatorMatrix> {
    check_size(d, 2)?;
    let w = IndexWindow::hardy(d)?;
    Ok(OperatorMatrix::from_column_map(w, w, "X", |i| {
        vec![(AntiIndex::new(i.a() + 1, i.b()).unwrap(), ONE)]
    }))
}

/// `X₀ = P_ℰ X`: `ê_{a,0} ↦ ê_{a+1,0}`, zero off the coefficient space.
pub fn build_x0(d: i64) -> Result<OperatorMatrix> {
    check_size(d, 2)?;
    let w = IndexWindow::hardy(d)?;
    Ok(OperatorMatrix::from_column_map(w, w, "X0", |i| {
        if i.b() == 0 {
            vec![(AntiIndex::new(i.a() + 1, 0).unwrap(), ONE)]
        } else {
            Vec::new()
        }
    }))
}

/// Projection onto `{b ≤ n−1}`, the span of `T_p^j ℰ` for `j < n`.
pub fn build_pn(n: i64, d: i64) -> Result<OperatorMatrix> {
    check_size(d, 1)?;
    let w = IndexWindow::hardy(d)?;
    Ok(OperatorMatrix::from_column_map(w, w, "P_n", |i| {
        if i.b() < n {
            vec![(i, ONE)]
        } else {
            Vec::new()
        }
    }))
}

/// The finite-rank projection
/// `F_n = I − T_pⁿT_p*ⁿ − Σ_{j<n} T_p^j X₀ⁿ X₀*ⁿ T_p*^j`.
pub fn build_fn(n: i64, d: i64) -> Result<OperatorMatrix> {
    if n < 1 || 2 * n > d {
        return Err(Error::OutOfRange(format!("F_n needs 1 <= n <= D/2, got n={n}, D={d}")));
    }
    let nn = n as u32;
    let tp = build_tp(d)?;
    let tps = tp.adjoint();
    let x0 = build_x0(d)?;
    let x0n = x0.pow(nn)?;
    let core = x0n.compose(&x0n.adjoint())?;
    let mut acc = OperatorMatrix::identity(*tp.rows()).sub(&tp.pow(nn)?.compose(&tps.pow(nn)?)?)?;
    for j in 0..nn {
        let term = tp.pow(j)?.compose(&core)?.compose(&tps.pow(j)?)?;
        acc = acc.sub(&term)?;
    }
    Ok(acc.with_label(format!("F_{n}")))
}

/// Number of basis vectors in the range of `F_n`: indices with `b < n`, `a − b ≤ n`.
pub fn fn_rank(n: i64) -> usize {
    (n * n) as usize
}

/// `‖η_n(T)‖`, the norm of
/// `[[X*ⁿTXⁿ, X*ⁿTT_pⁿ], [T_p*ⁿTXⁿ, T_p*ⁿTT_pⁿ]]`.
///
/// `T` is a section on a Hardy window. Columns are restricted to indices with
/// `a ≤ a_max − n`, so that `Xⁿ` and `T_pⁿ` map them inside the window.
pub fn eta(t: &OperatorMatrix, n: i64) -> Result<f64> {
    let w = *t.rows();
    if !t.is_square() || w.b_min != 0 {
        return Err(Error::WindowMismatch("eta needs a square Hardy-window section".into()));
    }
    let d = w.a_max;
    if n < 1 || 2 * n > d {
        return Err(Error::OutOfRange(format!("eta needs 1 <= n <= D/2, got n={n}, D={d}")));
    }
    let cols = w.safe_subwindow_in(n, Lattice::Hardy)?;
    let nn = n as u32;
    let xn = build_x(d)?.pow(nn)?.restrict(&w, &cols)?;
    let tpn = build_tp(d)?.pow(nn)?.restrict(&w, &cols)?;
    let txn = t.compose(&xn)?;
    let ttpn = t.compose(&tpn)?;
    let xs = xn.adjoint();
    let ps = tpn.adjoint();
    let blocks = [
        [xs.compose(&txn)?, xs.compose(&ttpn)?],
        [ps.compose(&txn)?, ps.compose(&ttpn)?],
    ];
    let m = cols.len();
    let mut big = CMatrix::zeros(2 * m, 2 * m);
    for (bi, row) in blocks.iter().enumerate() {
        for (bj, blk) in row.iter().enumerate() {
            big.view_mut((bi * m, bj * m), (m, m)).copy_from(blk.entries());
        }
    }
    Ok(linalg::spectral_norm(&big))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn idx(a: i64, b: i64) -> AntiIndex {
        AntiIndex::new(a, b).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn sym(entries: &[((i64, i64), Complex64)]) -> FourierSymbol {
        FourierSymbol::new(entries.iter().cloned()).unwrap()
    }

    /// Brute-force pairing: expand `f · ê_{a,b}` as a Laurent polynomial and
    /// take the inner product with `ê_{c,d}` monomial by monomial.
    fn brute_pairing(f: &FourierSymbol, row: AntiIndex, col: AntiIndex) -> Complex64 {
        let r2 = std::f64::consts::SQRT_2;
        let mut g: BTreeMap<(i64, i64), Complex64> = BTreeMap::new();
        for (&(m, n), v) in f.coeffs() {
            *g.entry((col.a() + m, col.b() + n)).or_default() += v / r2;
            *g.entry((col.b() + m, col.a() + n)).or_default() -= v / r2;
        }
        let get = |k: (i64, i64)| g.get(&k).copied().unwrap_or_default();
        (get((row.a(), row.b())) - get((row.b(), row.a()))) / r2
    }

    #[test]
    fn core_formula_matches_brute_force_pairing() {
        let f = sym(&[
            ((1, -2), Complex64::new(1.0, 2.0)),
            ((-2, 1), Complex64::new(1.0, 2.0)),
            ((0, 0), c(-0.5)),
            ((3, 3), Complex64::new(0.0, 1.0)),
            ((2, -1), c(3.0)),
            ((-1, 2), c(3.0)),
        ]);
        let mut pairs = Vec::new();
        for a in -3..=3 {
            for b in -3..a {
                pairs.push(idx(a, b));
            }
        }
        for &col in &pairs {
            for &row in &pairs {
                let want = brute_pairing(&f, row, col);
                let got = core_entry(&f, row, col);
                assert!((want - got).norm() < 1e-14, "row {row} col {col}");
            }
        }
    }

    #[test]
    fn core_formula_matches_unnormalized_basis_computation() {
        // with e_{k,l} = (z1z2)^k (z1^l - z2^l) of norm √2, the pairing
        // <T e_{m,n}, e_{k,l}> equals 2(α_{k+l-m-n,k-m} - α_{k-m-n,k+l-m})
        let f = sym(&[((2, -1), c(1.5)), ((-1, 2), c(1.5)), ((1, 0), c(-1.0)), ((0, 1), c(-1.0))]);
        for m in 0..3 {
            for n in 1..4 {
                for k in 0..3 {
                    for l in 1..4 {
                        let col = idx(m + n, m);
                        let row = idx(k + l, k);
                        let lhs = core_entry(&f, row, col) * 2.0;
                        let rhs = (f.coeff(k + l - m - n, k - m) - f.coeff(k - m - n, k + l - m)) * 2.0;
                        assert!((lhs - rhs).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn laurent_examples() {
        let w = IndexWindow::full(4).unwrap();
        let mp = build_laurent(&FourierSymbol::p(), w);
        for col in w.iter() {
            let img = mp.column(col);
            let t = idx(col.a() + 1, col.b() + 1);
            if w.contains(&t) {
                assert_eq!(img, vec![(t, c(1.0))]);
            } else {
                assert!(img.is_empty());
            }
        }
        let ms = build_laurent(&FourierSymbol::s(), w);
        assert_eq!(ms.column(idx(1, 0)), vec![(idx(2, 0), c(1.0))]);
        assert_eq!(ms.column(idx(2, 0)), vec![(idx(3, 0), c(1.0)), (idx(2, 1), c(1.0))]);
        let k = Complex64::new(0.5, -2.0);
        let mc = build_laurent(&FourierSymbol::constant(k), w);
        assert_eq!(mc.entries(), &(linalg::identity(w.len()) * k));
    }

    #[test]
    fn toeplitz_examples() {
        let ts = build_ts(6).unwrap();
        assert_eq!(ts.column(idx(1, 0)), vec![(idx(2, 0), c(1.0))]);
        let tc = build_toeplitz(&FourierSymbol::coburn(), 12).unwrap();
        assert!(tc.column(idx(1, 0)).is_empty());
        assert!(tc.adjoint().column(idx(1, 0)).is_empty());
        assert_eq!(build_toeplitz(&FourierSymbol::zero(), 5).unwrap().max_abs(), 0.0);
        assert!(build_toeplitz(&FourierSymbol::s(), 0).is_err());
    }

    #[test]
    fn hankel_examples() {
        let h = build_hankel(&FourierSymbol::s().product(&FourierSymbol::p()), 6).unwrap();
        assert_eq!(h.max_abs(), 0.0);
        let h = build_hankel(&FourierSymbol::p().conjugate(), 6).unwrap();
        assert_eq!(h.column(idx(1, 0)), vec![(idx(0, -1), c(1.0))]);
        assert_eq!(h.rows(), &IndexWindow::co_hardy(7).unwrap());
        assert_eq!(build_hankel(&FourierSymbol::constant(c(1.0)), 6).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn dual_toeplitz_examples() {
        let d = build_dual_toeplitz(&FourierSymbol::p().conjugate(), 6).unwrap();
        for col in d.cols().iter() {
            let t = idx(col.a() - 1, col.b() - 1);
            if d.rows().contains(&t) {
                assert_eq!(d.column(col), vec![(t, c(1.0))]);
            }
        }
        let dp = build_dual_toeplitz(&FourierSymbol::p(), 6).unwrap();
        assert!(dp.column(idx(0, -1)).is_empty());
        assert_eq!(build_dual_toeplitz(&FourierSymbol::zero(), 4).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn block_assembly_matches_laurent() {
        let f = FourierSymbol::s().add(&FourierSymbol::s().conjugate());
        let d = 8;
        let blocks = assemble_m_blocks(&f, d).unwrap();
        let assembled = blocks.assemble().unwrap();
        let laurent = build_laurent(&f, IndexWindow::full(d).unwrap());
        assert_eq!(assembled.entries(), laurent.entries());
        let safe = IndexWindow::full(d).unwrap().safe_subwindow(2).unwrap();
        let a = assembled.restrict_to(&safe).unwrap();
        assert!(linalg::max_abs(&(a.entries() - a.entries().adjoint())) == 0.0);

        let g = FourierSymbol::s().product(&FourierSymbol::p());
        assert_eq!(assemble_m_blocks(&g, d).unwrap().hankel.max_abs(), 0.0);

        let h = FourierSymbol::new([((2, -1), Complex64::new(0.0, 1.0)), ((-1, 2), Complex64::new(0.0, 1.0)), ((1, 1), c(2.0))]).unwrap();
        let b = assemble_m_blocks(&h, d).unwrap();
        assert_eq!(b.assemble().unwrap().entries(), build_laurent(&h, IndexWindow::full(d).unwrap()).entries());
    }

    #[test]
    fn shift_x_examples() {
        let d = 8;
        let x = build_x(d).unwrap();
        assert_eq!(x.column(idx(1, 0)), vec![(idx(2, 0), c(1.0))]);
        let safe = x.rows().safe_subwindow(1).unwrap();
        let xsx = x.adjoint().compose(&x).unwrap().restrict_to(&safe).unwrap();
        assert_eq!(xsx.entries(), &linalg::identity(safe.len()));
        let x0 = build_x0(d).unwrap();
        assert!(x0.column(idx(2, 1)).is_empty());
        assert_eq!(x0.column(idx(3, 0)), vec![(idx(4, 0), c(1.0))]);
        let tp = build_tp(d).unwrap();
        let safe = x.rows().safe_subwindow_in(1, Lattice::Hardy).unwrap();
        assert_eq!(x0.compose(&tp).unwrap().restrict_to(&safe).unwrap().max_abs(), 0.0);
        assert_eq!(tp.adjoint().compose(&x0).unwrap().restrict_to(&safe).unwrap().max_abs(), 0.0);
        assert!(build_x(1).is_err());
    }

    #[test]
    fn x_decomposes_through_x0() {
        // X = Σ T_p^n X0 T_p*^n
        let d = 9;
        let x = build_x(d).unwrap();
        let x0 = build_x0(d).unwrap();
        let tp = build_tp(d).unwrap();
        let mut acc = OperatorMatrix::zeros(*x.rows(), *x.cols(), "sum");
        for n in 0..d as u32 {
            acc = acc.add(&tp.pow(n).unwrap().compose(&x0).unwrap().compose(&tp.adjoint().pow(n).unwrap()).unwrap()).unwrap();
        }
        let safe = x.rows().safe_subwindow_in(1, Lattice::Hardy).unwrap();
        assert_eq!(acc.restrict_to(&safe).unwrap().entries(), x.restrict_to(&safe).unwrap().entries());
    }

    #[test]
    fn f1_is_projection_onto_first_basis_vector() {
        let f1 = build_fn(1, 4).unwrap();
        let w = f1.rows();
        let mut expected = CMatrix::zeros(w.len(), w.len());
        let p = w.position(&idx(1, 0)).unwrap();
        expected[(p, p)] = c(1.0);
        assert_eq!(f1.entries(), &expected);
    }

    #[test]
    fn fn_is_orthogonal_projection_with_expected_rank() {
        for (n, d) in [(1, 6), (2, 8), (3, 10), (4, 9)] {
            let f = build_fn(n, d).unwrap();
            let sq = f.compose(&f).unwrap();
            assert!(linalg::max_abs(&(sq.entries() - f.entries())) < 1e-12);
            assert!(linalg::max_abs(&(f.adjoint().entries() - f.entries())) < 1e-12);
            let trace: f64 = (0..f.rows().len()).map(|i| f.entries()[(i, i)].re).sum();
            assert_eq!(trace.round() as usize, fn_rank(n));
            for col in f.cols().iter() {
                let expect = col.b() < n && col.a() - col.b() <= n;
                assert_eq!(f.column(col) == vec![(col, c(1.0))], expect);
                assert!(expect || f.column(col).is_empty());
            }
        }
        assert!(build_fn(0, 8).is_err());
        assert!(build_fn(5, 8).is_err());
    }

    #[test]
    fn complement_of_fn_decomposes() {
        // I − F_n = P_n Xⁿ X*ⁿ P_n + T_pⁿ T_p*ⁿ
        let (n, d) = (3, 14);
        let nn = n as u32;
        let f = build_fn(n, d).unwrap();
        let pn = build_pn(n, d).unwrap();
        let x = build_x(d).unwrap();
        let tp = build_tp(d).unwrap();
        let lhs = OperatorMatrix::identity(*f.rows()).sub(&f).unwrap();
        let rhs = pn
            .compose(&x.pow(nn).unwrap())
            .unwrap()
            .compose(&x.adjoint().pow(nn).unwrap())
            .unwrap()
            .compose(&pn)
            .unwrap()
            .add(&tp.pow(nn).unwrap().compose(&tp.adjoint().pow(nn).unwrap()).unwrap())
            .unwrap();
        let safe = f.rows().safe_subwindow_in(n, Lattice::Hardy).unwrap();
        let diff = lhs.sub(&rhs).unwrap().restrict_to(&safe).unwrap();
        assert_eq!(diff.max_abs(), 0.0);
    }

    #[test]
    fn eta_examples() {
        let d = 10;
        let w = IndexWindow::hardy(d).unwrap();
        let mut rank_one = OperatorMatrix::zeros(w, w, "rank one");
        let p = w.position(&idx(1, 0)).unwrap();
        rank_one.entries[(p, p)] = c(1.0);
        assert_eq!(eta(&rank_one, 1).unwrap(), 0.0);
        // identity: η_n(I) = ‖XⁿX*ⁿ + T_pⁿT_p*ⁿ‖ = 2 since the two ranges
        // meet at indices with b ≥ n, a − b > n; at n = D/2 they fall outside
        for n in 1..=4 {
            let v = eta(&OperatorMatrix::identity(w), n).unwrap();
            assert!((v - 2.0).abs() < 1e-12, "n={n}: {v}");
        }
        assert!((eta(&OperatorMatrix::identity(w), 5).unwrap() - 1.0).abs() < 1e-12);
        let ts = build_ts(40).unwrap();
        for n in [1, 5, 10, 20] {
            assert!(eta(&ts, n).unwrap() >= 1.9);
        }
        assert!(eta(&rank_one, 6).is_err());
        assert!(eta(&rank_one, 0).is_err());
    }
}
