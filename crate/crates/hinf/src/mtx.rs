//! Matrix Market exchange format: `array` for dense and `coordinate` for
//! sparse matrices, `real`, `integer`, `complex` and `pattern` fields.

use std::fmt::Write as _;
use std::path::Path;

use hinf_core::{CMat, CscMatrix, C64};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum MtxMatrix {
    Dense(CMat),
    Sparse(CscMatrix),
}

impl MtxMatrix {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            MtxMatrix::Dense(m) => m.shape(),
            MtxMatrix::Sparse(m) => m.shape(),
        }
    }

    pub fn into_dense(self) -> CMat {
        match self {
            MtxMatrix::Dense(m) => m,
            MtxMatrix::Sparse(m) => m.to_dense(),
        }
    }

    pub fn into_sparse(self) -> CscMatrix {
        match self {
            MtxMatrix::Dense(m) => CscMatrix::from_dense(&m),
            MtxMatrix::Sparse(m) => m,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Complex,
    Pattern,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

pub fn read_mtx(path: &Path) -> Result<MtxMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_mtx(&text, &path.display().to_string())
}

/// Parses Matrix Market text; `origin` only labels error messages.
pub fn parse_mtx(text: &str, origin: &str) -> Result<MtxMatrix> {
    let err = |line: usize, msg: String| Error::Parse { origin: origin.to_string(), line, msg };
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));

    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let words: Vec<String> = header.split_whitespace().map(|w| w.to_ascii_lowercase()).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(err(1, format!("bad header `{header}`")));
    }
    let coordinate = match words[2].as_str() {
        "coordinate" => true,
        "array" => false,
        f => return Err(err(1, format!("unsupported format `{f}`"))),
    };
    let field = match words[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        "pattern" if coordinate => Field::Pattern,
        f => return Err(err(1, format!("unsupported field `{f}`"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" if field == Field::Complex => Symmetry::Hermitian,
        s => return Err(err(1, format!("unsupported symmetry `{s}`"))),
    };

    let mut data = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size) = data.next().ok_or_else(|| err(1, "missing size line".into()))?;
    let dims: Vec<usize> = size.split_whitespace().map(|w| w.parse::<usize>()).collect::<std::result::Result<_, _>>().map_err(|e| err(size_line, format!("bad size line: {e}")))?;
    let want = if coordinate { 3 } else { 2 };
    if dims.len() != want {
        return Err(err(size_line, format!("size line needs {want} integers")));
    }
    let (rows, cols) = (dims[0], dims[1]);
    if symmetry != Symmetry::General && rows != cols {
        return Err(err(size_line, "symmetric storage needs a square matrix".into()));
    }

    let parse_value = |line: usize, toks: &[&str]| -> Result<C64> {
        let num = |t: &str| t.parse::<f64>().map_err(|e| err(line, format!("bad number `{t}`: {e}")));
        match field {
            Field::Pattern => Ok(C64::new(1.0, 0.0)),
            Field::Real | Field::Integer => Ok(C64::new(num(toks[0])?, 0.0)),
            Field::Complex => Ok(C64::new(num(toks[0])?, num(toks[1])?)),
        }
    };
    let value_len = match field {
        Field::Pattern => 0,
        Field::Real | Field::Integer => 1,
        Field::Complex => 2,
    };
    let mirror = |v: C64| match symmetry {
        Symmetry::General | Symmetry::Symmetric => v,
        Symmetry::SkewSymmetric => -v,
        Symmetry::Hermitian => v.conj(),
    };

    if coordinate {
        let nnz = dims[2];
        let mut triplets = Vec::with_capacity(nnz);
        for _ in 0..nnz {
            let (ln, l) = data.next().ok_or_else(|| err(0, format!("expected {nnz} entries")))?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != 2 + value_len {
                return Err(err(ln, format!("expected {} fields", 2 + value_len)));
            }
            let idx = |t: &str, bound: usize| -> Result<usize> {
                let k = t.parse::<usize>().map_err(|e| err(ln, format!("bad index `{t}`: {e}")))?;
                if k == 0 || k > bound {
                    return Err(err(ln, format!("index {k} out of range 1..={bound}")));
                }
                Ok(k - 1)
            };
            let (i, j) = (idx(toks[0], rows)?, idx(toks[1], cols)?);
            let v = parse_value(ln, &toks[2..])?;
            triplets.push((i, j, v));
            if symmetry != Symmetry::General && i != j {
                triplets.push((j, i, mirror(v)));
            }
        }
        if let Some((ln, _)) = data.next() {
            return Err(err(ln, "trailing data after the last entry".into()));
        }
        return Ok(MtxMatrix::Sparse(CscMatrix::from_triplets(rows, cols, &triplets)));
    }

    // array: column major, only the lower triangle for symmetric storage
    let mut m = CMat::zeros(rows, cols);
    let positions: Vec<(usize, usize)> = match symmetry {
        Symmetry::General => (0..cols).flat_map(|j| (0..rows).map(move |i| (i, j))).collect(),
        Symmetry::Symmetric | Symmetry::Hermitian => (0..cols).flat_map(|j| (j..rows).map(move |i| (i, j))).collect(),
        Symmetry::SkewSymmetric => (0..cols).flat_map(|j| (j + 1..rows).map(move |i| (i, j))).collect(),
    };
    for (i, j) in positions {
        let (ln, l) = data.next().ok_or_else(|| err(0, format!("expected {} values", rows * cols)))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != value_len {
            return Err(err(ln, format!("expected {value_len} fields")));
        }
        let v = parse_value(ln, &toks)?;
        m[(i, j)] = v;
        if symmetry != Symmetry::General && i != j {
            m[(j, i)] = mirror(v);
        }
    }
    if let Some((ln, _)) = data.next() {
        return Err(err(ln, "trailing data after the last value".into()));
    }
    Ok(MtxMatrix::Dense(m))
}

/// `real` unless some imaginary part has a nonzero bit pattern.
fn is_real_field(values: impl Iterator<Item = C64>) -> bool {
    values.into_iter().all(|z| z.im.to_bits() == 0)
}

fn push_value(out: &mut String, z: C64, real: bool) {
    // `{}` prints the shortest decimal that parses back to the same bits
    if real {
        let _ = writeln!(out, "{}", z.re);
    } else {
        let _ = writeln!(out, "{} {}", z.re, z.im);
    }
}

pub fn format_dense(m: &CMat) -> String {
    let real = is_real_field(m.as_slice().iter().copied());
    let mut out = format!("%%MatrixMarket matrix array {} general\n{} {}\n", if real { "real" } else { "complex" }, m.rows(), m.cols());
    for &z in m.as_slice() {
        push_value(&mut out, z, real);
    }
    out
}

pub fn format_sparse(m: &CscMatrix) -> String {
    let t = m.triplets();
    let real = is_real_field(t.iter().map(|x| x.2));
    let mut out = format!("%%MatrixMarket matrix coordinate {} general\n{} {} {}\n", if real { "real" } else { "complex" }, m.rows(), m.cols(), t.len());
    for (i, j, z) in t {
        let _ = write!(out, "{} {} ", i + 1, j + 1);
        push_value(&mut out, z, real);
    }
    out
}

pub fn write_mtx(path: &Path, m: &MtxMatrix) -> Result<()> {
    let text = match m {
        MtxMatrix::Dense(m) => format_dense(m),
        MtxMatrix::Sparse(m) => format_sparse(m),
    };
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn dense_real_round_trip() {
        let m = CMat::from_real_rows(&[&[1.0, -2.5e-300], &[0.1 + 0.2, f64::MAX]]);
        let back = parse_mtx(&format_dense(&m), "t").unwrap();
        assert_eq!(back, MtxMatrix::Dense(m));
    }

    #[test]
    fn dense_complex_round_trip_keeps_signed_zero() {
        let m = CMat::from_rows(&[vec![c(1.0, -0.0), c(0.0, 1.0 / 3.0)]]);
        let text = format_dense(&m);
        assert!(text.contains("complex"));
        let MtxMatrix::Dense(back) = parse_mtx(&text, "t").unwrap() else { panic!() };
        assert_eq!(back[(0, 0)].im.to_bits(), (-0.0f64).to_bits());
        assert_eq!(back, m);
    }

    #[test]
    fn sparse_round_trip() {
        let s = CscMatrix::from_triplets(3, 4, &[(0, 0, c(1.0, 0.0)), (2, 3, c(-4.0, 0.5)), (1, 1, c(1e-17, 0.0))]);
        assert_eq!(parse_mtx(&format_sparse(&s), "t").unwrap(), MtxMatrix::Sparse(s));
    }

    #[test]
    fn symmetric_and_pattern_inputs() {
        let sym = "%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 2\n1 1 4\n2 1 3\n";
        let d = parse_mtx(sym, "t").unwrap().into_dense();
        assert_eq!(d, CMat::from_real_rows(&[&[4.0, 3.0], &[3.0, 0.0]]));
        let skew = "%%MatrixMarket matrix array real skew-symmetric\n2 2\n5\n";
        assert_eq!(parse_mtx(skew, "t").unwrap().into_dense(), CMat::from_real_rows(&[&[0.0, -5.0], &[5.0, 0.0]]));
        let herm = "%%MatrixMarket matrix coordinate complex hermitian\n2 2 1\n2 1 1 2\n";
        let h = parse_mtx(herm, "t").unwrap().into_dense();
        assert_eq!(h[(0, 1)], c(1.0, -2.0));
        let pat = "%%MatrixMarket matrix coordinate pattern general\n2 2 1\n1 2\n";
        assert_eq!(parse_mtx(pat, "t").unwrap().into_dense()[(0, 1)], c(1.0, 0.0));
        let int = "%%MatrixMarket matrix array integer general\n1 2\n3\n-4\n";
        assert_eq!(parse_mtx(int, "t").unwrap().into_dense(), CMat::from_real_rows(&[&[3.0, -4.0]]));
    }

    #[test]
    fn malformed_inputs() {
        for bad in [
            "",
            "%%MatrixMarket matrix array real\n1 1\n1\n",
            "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n",
            "%%MatrixMarket matrix array real general\n1 1\n1\n2\n",
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n",
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 x\n",
            "%%MatrixMarket matrix array pattern general\n1 1\n",
        ] {
            assert!(matches!(parse_mtx(bad, "t"), Err(Error::Parse { .. })), "{bad:?}");
        }
    }
}
