//! JSON artifacts: frame files and operator files.
//!
//! Complex entries are `[re, im]` pairs. Matrices are lists of rows.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frames::Frame;
use crate::krein::KreinSpace;
use crate::linalg::{CMat, CVec, C64};

pub type Pair = [f64; 2];

/// Malformed input; the message names the offending field.
#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

fn field_error(field: impl Into<String>, message: impl Into<String>) -> InputError {
    InputError::Field {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub p: usize,
    pub q: usize,
}

impl SpaceSpec {
    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    pub fn space(&self) -> Result<KreinSpace, InputError> {
        KreinSpace::new(self.p, self.q).map_err(|e| field_error("space", e.to_string()))
    }
}

/// Extra information stored next to a synthesized frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisDiagnostics {
    pub prescribed_n_plus: usize,
    pub prescribed_n_minus: usize,
    pub seed: Option<u64>,
    /// `‖TT⁺ − S‖ / ‖S‖`
    pub operator_residual: f64,
    pub mismatched: Vec<usize>,
    pub is_jframe: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameFile {
    pub space: SpaceSpec,
    pub vectors: Vec<Vec<Pair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<SynthesisDiagnostics>,
}

fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

fn check_finite(field: &str, entries: &[Pair]) -> Result<(), InputError> {
    match entries.iter().position(|e| !(e[0].is_finite() && e[1].is_finite())) {
        Some(k) => Err(field_error(format!("{field}[{k}]"), "entry is not finite")),
        None => Ok(()),
    }
}

impl FrameFile {
    /// Vectors in the frame's own (caller) order.
    pub fn from_frame(frame: &Frame) -> Self {
        let space = frame.space();
        Self {
            space: SpaceSpec {
                p: space.p(),
                q: space.q(),
            },
            vectors: frame.vectors().iter().map(|v| v.iter().copied().map(pair).collect()).collect(),
            diagnostics: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, InputError> {
        let file: Self = serde_json::from_str(text)?;
        file.validate()?;
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self, InputError> {
        Self::parse(&read_text(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("frame files serialize")
    }

    pub fn validate(&self) -> Result<(), InputError> {
        if self.vectors.is_empty() {
            return Err(field_error("vectors", "at least one vector is required"));
        }
        let n = self.space.dim();
        if n == 0 {
            return Err(field_error("space", "p + q must be positive"));
        }
        for (i, v) in self.vectors.iter().enumerate() {
            if v.len() != n {
                return Err(field_error(
                    format!("vectors[{i}]"),
                    format!("length {} does not match p + q = {n}", v.len()),
                ));
            }
            check_finite(&format!("vectors[{i}]"), v)?;
        }
        Ok(())
    }

    pub fn to_frame(&self) -> Result<Frame, InputError> {
        self.validate()?;
        let space = self.space.space()?;
        let vectors = self
            .vectors
            .iter()
            .map(|v| CVec::from_iterator(v.len(), v.iter().map(|e| C64::new(e[0], e[1]))))
            .collect();
        Frame::new(&space, vectors).map_err(|e| field_error("vectors", e.to_string()))
    }
}

/// `{"space": …, "matrix": [[[re, im], …], …]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorFile {
    pub space: SpaceSpec,
    pub matrix: Vec<Vec<Pair>>,
}

impl OperatorFile {
    pub fn new(space: &KreinSpace, m: &CMat) -> Self {
        Self {
            space: SpaceSpec {
                p: space.p(),
                q: space.q(),
            },
            matrix: matrix_rows(m),
        }
    }

    pub fn parse(text: &str) -> Result<Self, InputError> {
        let file: Self = serde_json::from_str(text)?;
        file.to_matrix()?;
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self, InputError> {
        Self::parse(&read_text(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("operator files serialize")
    }

    pub fn to_matrix(&self) -> Result<CMat, InputError> {
        let n = self.space.dim();
        if n == 0 {
            return Err(field_error("space", "p + q must be positive"));
        }
        if self.matrix.len() != n {
            return Err(field_error(
                "matrix",
                format!("{} rows, expected p + q = {n}", self.matrix.len()),
            ));
        }
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != n {
                return Err(field_error(format!("matrix[{i}]"), format!("{} entries, expected {n}", row.len())));
            }
            check_finite(&format!("matrix[{i}]"), row)?;
        }
        Ok(matrix_from_rows(&self.matrix))
    }
}

pub fn matrix_rows(m: &CMat) -> Vec<Vec<Pair>> {
    m.row_iter().map(|r| r.iter().copied().map(pair).collect()).collect()
}

pub fn matrix_from_rows(rows: &[Vec<Pair>]) -> CMat {
    let cols = rows.first().map_or(0, Vec::len);
    CMat::from_fn(rows.len(), cols, |i, j| C64::new(rows[i][j][0], rows[i][j][1]))
}

fn read_text(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|source| InputError::Read {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_vector;

    const RE1: &str = r#"{"space": {"p": 1, "q": 1}, "vectors": [[[1, 0], [0, 0]], [[1, 0], [2, 0]]]}"#;

    #[test]
    fn parses_re1() {
        let file = FrameFile::parse(RE1).unwrap();
        let frame = file.to_frame().unwrap();
        assert_eq!(frame.vectors()[1], real_vector(&[1.0, 2.0]));
        assert_eq!(frame.n_plus(), 1);
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let h = KreinSpace::new(2, 1).unwrap();
        let v = |a: f64, b: f64, c: f64| CVec::from_vec(vec![C64::new(a, 0.1 * a), C64::new(b, -1.0 / 3.0), C64::new(c, 1e-300)]);
        let frame = Frame::new(&h, vec![v(0.1, 0.2, 0.3), v(1.0 / 7.0, 2.0f64.sqrt(), 1e-17), v(0.0, 0.0, 5.0)]).unwrap();
        let file = FrameFile::from_frame(&frame);
        let back = FrameFile::parse(&file.to_json()).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_frame().unwrap().vectors(), frame.vectors());
    }

    #[test]
    fn malformed_inputs_name_the_field() {
        assert!(matches!(FrameFile::parse(&RE1[..30]), Err(InputError::Json(_))));
        let err = FrameFile::parse(r#"{"space": {"p": 1, "q": 1}, "vectors": [[[1, 0]]]}"#).unwrap_err();
        assert!(err.to_string().contains("vectors[0]"), "{err}");
        let err = FrameFile::parse(r#"{"space": {"p": 1, "q": 1}, "vectors": []}"#).unwrap_err();
        assert!(err.to_string().contains("`vectors`"), "{err}");
        let err = FrameFile::parse(r#"{"space": {"p": 1}, "vectors": [[[1, 0], [0, 0]]]}"#).unwrap_err();
        assert!(err.to_string().contains("q"), "{err}");
        let err = FrameFile::parse(r#"{"space": {"p": 1, "q": 1}, "vectors": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]}"#)
            .unwrap()
            .to_frame()
            .unwrap_err();
        assert!(err.to_string().contains("vector 1 is zero"), "{err}");
    }

    #[test]
    fn operator_file_round_trip() {
        let h = KreinSpace::new(1, 1).unwrap();
        let s = crate::linalg::real_matrix(&[&[0.0, 2.0], &[-2.0, 4.0]]);
        let file = OperatorFile::new(&h, &s);
        let back = OperatorFile::parse(&file.to_json()).unwrap();
        assert_eq!(back.to_matrix().unwrap(), s);
        let err = OperatorFile::parse(r#"{"space": {"p": 1, "q": 1}, "matrix": [[[1, 0], [0, 0]]]}"#).unwrap_err();
        assert!(err.to_string().contains("`matrix`"), "{err}");
    }
}
