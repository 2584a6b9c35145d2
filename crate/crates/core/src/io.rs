//! JSON formats for symbols, matrices and reports.
//!
//! Output is compact JSON with struct fields in declaration order, map keys
//! sorted, and every float written with 17 significant digits, so equal
//! inputs give byte-identical files.

use std::collections::BTreeMap;
use std::io;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::error::{Error, Result};
use crate::lattice::IndexWindow;
use crate::linalg::CMatrix;
use crate::operators::OperatorMatrix;
use crate::symbols::{FourierSymbol, SpPoly};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FourierEntry {
    pub m: i64,
    pub n: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SpTerm {
    #[serde(default)]
    pub s: u32,
    #[serde(default)]
    pub p: u32,
    #[serde(default)]
    pub sbar: u32,
    #[serde(default)]
    pub pbar: u32,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "format")]
pub enum SymbolFile {
    #[serde(rename = "fourier")]
    Fourier {
        #[serde(default)]
        symmetrize: bool,
        coefficients: Vec<FourierEntry>,
    },
    #[serde(rename = "sp-poly")]
    SpPoly { terms: Vec<SpTerm> },
}

impl SymbolFile {
    /// Resolve into a Fourier symbol.
    ///
    /// With `symmetrize`, a coefficient listed at only one of `(m,n)`, `(n,m)`
    /// is mirrored and a pair listed both ways is averaged. Without it the
    /// listing must already be symmetric. Repeated entries add up.
    pub fn to_symbol(&self) -> Result<FourierSymbol> {
        match self {
            SymbolFile::Fourier {
                symmetrize,
                coefficients,
            } => {
                let mut acc: BTreeMap<(i64, i64), Complex64> = BTreeMap::new();
                for e in coefficients {
                    if !e.re.is_finite() || !e.im.is_finite() {
                        return Err(Error::Parse(format!("non-finite coefficient at ({},{})", e.m, e.n)));
                    }
                    *acc.entry((e.m, e.n)).or_default() += Complex64::new(e.re, e.im);
                }
                if !symmetrize {
                    return FourierSymbol::new(acc);
                }
                let mut out = Vec::new();
                for (&(m, n), &v) in &acc {
                    let w = match acc.get(&(n, m)) {
                        Some(&u) => (u + v) / 2.0,
                        None => v,
                    };
                    out.push(((m, n), w));
                    if !acc.contains_key(&(n, m)) {
                        out.push(((n, m), w));
                    }
                }
                FourierSymbol::new(out)
            }
            SymbolFile::SpPoly { .. } => Ok(crate::symbols::sp_to_fourier(&self.to_sp_poly()?.unwrap())),
        }
    }

    pub fn to_sp_poly(&self) -> Result<Option<SpPoly>> {
        match self {
            SymbolFile::SpPoly { terms } => {
                let mut acc: BTreeMap<(u32, u32, u32, u32), Complex64> = BTreeMap::new();
                for t in terms {
                    if !t.re.is_finite() || !t.im.is_finite() {
                        return Err(Error::Parse("non-finite polynomial coefficient".into()));
                    }
                    *acc.entry((t.s, t.p, t.sbar, t.pbar)).or_default() += Complex64::new(t.re, t.im);
                }
                Ok(Some(SpPoly::from_terms(acc)))
            }
            _ => Ok(None),
        }
    }

    pub fn from_symbol(f: &FourierSymbol) -> Self {
        SymbolFile::Fourier {
            symmetrize: false,
            coefficients: f
                .coeffs()
                .iter()
                .map(|(&(m, n), z)| FourierEntry { m, n, re: z.re, im: z.im })
                .collect(),
        }
    }
}

pub fn parse_symbol(text: &str) -> Result<FourierSymbol> {
    parse_symbol_file(text)?.to_symbol()
}

pub fn parse_symbol_file(text: &str) -> Result<SymbolFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("symbol file: {e}")))
}

/// Matrix file: windows are optional for plain matrices, required to rebuild
/// an operator section.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatrixFile {
    #[serde(default)]
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<IndexWindow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<IndexWindow>,
    /// Row-major `[re, im]` pairs.
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn from_operator(op: &OperatorMatrix) -> Self {
        let m = op.entries();
        Self {
            label: op.label().to_string(),
            rows: Some(*op.rows()),
            cols: Some(*op.cols()),
            entries: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        }
    }

    pub fn from_matrix(label: &str, m: &CMatrix) -> Self {
        Self {
            label: label.to_string(),
            rows: None,
            cols: None,
            entries: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let nrows = self.entries.len();
        let ncols = self.entries.first().map_or(0, |r| r.len());
        if self.entries.iter().any(|r| r.len() != ncols) {
            return Err(Error::Parse("ragged matrix rows".into()));
        }
        if self.entries.iter().flatten().any(|z| !z[0].is_finite() || !z[1].is_finite()) {
            return Err(Error::Parse("non-finite matrix entry".into()));
        }
        Ok(CMatrix::from_fn(nrows, ncols, |i, j| {
            let [re, im] = self.entries[i][j];
            Complex64::new(re, im)
        }))
    }

    pub fn to_operator(&self) -> Result<OperatorMatrix> {
        let (Some(rows), Some(cols)) = (self.rows, self.cols) else {
            return Err(Error::Parse("matrix file lacks row/column windows".into()));
        };
        OperatorMatrix::new(rows, cols, self.to_matrix()?, self.label.clone())
    }
}

pub fn parse_matrix_file(text: &str) -> Result<MatrixFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix file: {e}")))
}

/// Compact formatter writing floats as `d.dddddddddddddddde±x`.
struct FixedFloats;

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Deterministic JSON text.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Parse(format!("serialization: {e}")))?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::build_toeplitz;

    #[test]
    fn parses_both_formats() {
        let f = parse_symbol(
            r#"{"format":"fourier","symmetrize":false,"coefficients":[{"m":2,"n":-2,"re":1.0,"im":0.0},{"m":-2,"n":2,"re":1.0,"im":0.0}]}"#,
        )
        .unwrap();
        assert_eq!(f, FourierSymbol::coburn());

        let g = parse_symbol(r#"{"format":"sp-poly","terms":[{"s":1,"p":0,"sbar":0,"pbar":0,"re":1.0,"im":0.0}]}"#).unwrap();
        assert_eq!(g, FourierSymbol::s());
        let file = parse_symbol_file(r#"{"format":"sp-poly","terms":[{"sbar":1,"re":2.0}]}"#).unwrap();
        assert_eq!(file.to_sp_poly().unwrap().unwrap(), SpPoly::s_bar().scale(Complex64::new(2.0, 0.0)));
    }

    #[test]
    fn symmetrize_mirrors_and_averages() {
        let f = parse_symbol(
            r#"{"format":"fourier","symmetrize":true,"coefficients":[{"m":1,"n":0,"re":1.0},{"m":3,"n":1,"re":1.0},{"m":1,"n":3,"re":3.0}]}"#,
        )
        .unwrap();
        assert_eq!(f, FourierSymbol::s().add(&FourierSymbol::new([((3, 1), Complex64::new(2.0, 0.0)), ((1, 3), Complex64::new(2.0, 0.0))]).unwrap()));
        let err = parse_symbol(r#"{"format":"fourier","coefficients":[{"m":1,"n":0,"re":1.0}]}"#);
        assert!(matches!(err, Err(Error::AsymmetricSymbol { .. })));
        assert!(matches!(parse_symbol(r#"{"format":"laurent"}"#), Err(Error::Parse(_))));
    }

    #[test]
    fn matrix_round_trip() {
        let t = build_toeplitz(&FourierSymbol::s().add(&FourierSymbol::p().conjugate()), 5).unwrap();
        let text = to_json(&MatrixFile::from_operator(&t)).unwrap();
        let back = parse_matrix_file(&text).unwrap().to_operator().unwrap();
        assert_eq!(back.entries(), t.entries());
        assert_eq!(back.rows(), t.rows());
        let plain = parse_matrix_file(r#"{"entries":[[[1,0],[0,1]],[[0,0],[2,0]]]}"#).unwrap();
        assert_eq!(plain.to_matrix().unwrap()[(0, 1)], Complex64::new(0.0, 1.0));
        assert!(plain.to_operator().is_err());
        assert!(parse_matrix_file(r#"{"entries":[[[1,0]],[]]}"#).unwrap().to_matrix().is_err());
    }

    #[test]
    fn float_formatting_is_fixed() {
        let text = to_json(&[0.1, -2.0, 1e-300, f64::NAN]).unwrap();
        assert_eq!(
            text,
            "[1.0000000000000001e-1,-2.0000000000000000e0,1.0000000000000000e-300,null]"
        );
        let v: Vec<f64> = serde_json::from_str(&to_json(&[0.1f64, 1.0 / 3.0]).unwrap()).unwrap();
        assert_eq!(v, [0.1, 1.0 / 3.0]);
    }
}
