//! Versioned JSON interchange format for complexes, cochains and covers.

use serde::{Deserialize, Serialize};

use super::{CellComplex, ComplexError, Label};
use crate::linalg::SparseMatrix;
use std::collections::BTreeMap;

pub const FORMAT: &str = "coarse-kit-complex";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexFile {
    pub format: String,
    pub version: u32,
    pub dim: usize,
    pub counts: Vec<usize>,
    /// `boundaries[k−1]` holds the row-major triples of `∂_k`.
    pub boundaries: Vec<Vec<(usize, usize, i64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simplices: Option<Vec<Vec<Vec<usize>>>>,
    #[serde(default)]
    pub labels: BTreeMap<String, Label>,
}

impl ComplexFile {
    pub fn from_complex(cx: &CellComplex) -> ComplexFile {
        ComplexFile {
            format: FORMAT.into(),
            version: VERSION,
            dim: cx.dim(),
            counts: cx.counts().to_vec(),
            boundaries: (1..=cx.dim()).map(|k| cx.boundary(k).triples()).collect(),
            simplices: cx.is_simplicial().then(|| (0..=cx.dim()).map(|k| cx.simplices(k).to_vec()).collect()),
            labels: cx.labels().clone(),
        }
    }

    pub fn into_complex(self) -> Result<CellComplex, ComplexError> {
        if self.format != FORMAT || self.version != VERSION {
            return Err(ComplexError::Format(format!("unsupported format {} v{}", self.format, self.version)));
        }
        if self.counts.len() != self.dim + 1 {
            return Err(ComplexError::Format("counts do not match dim".into()));
        }
        let mut cx = match self.simplices {
            Some(s) => {
                if s.len() != self.counts.len() || s.iter().zip(&self.counts).any(|(l, &c)| l.len() != c) {
                    return Err(ComplexError::Format("simplex lists do not match counts".into()));
                }
                let cx = CellComplex::from_sorted_simplices(s);
                cx.validate()?;
                let stated: Vec<Vec<(usize, usize, i64)>> = (1..=cx.dim()).map(|k| cx.boundary(k).triples()).collect();
                if stated != self.boundaries {
                    return Err(ComplexError::Format("boundary triples disagree with simplices".into()));
                }
                cx
            }
            None => {
                let mut bds = Vec::new();
                for (i, t) in self.boundaries.into_iter().enumerate() {
                    let (r, c) = (self.counts[i], self.counts[i + 1]);
                    if t.iter().any(|&(a, b, _)| a >= r || b >= c) {
                        return Err(ComplexError::Format(format!("triple outside boundary[{}]", i + 1)));
                    }
                    bds.push(SparseMatrix::from_triples(r, c, t));
                }
                CellComplex::new(self.counts, bds)?
            }
        };
        for (name, l) in self.labels {
            cx.set_label(&name, l)?;
        }
        Ok(cx)
    }
}

pub fn to_json(cx: &CellComplex) -> String {
    serde_json::to_string_pretty(&ComplexFile::from_complex(cx)).expect("serializable")
}

pub fn from_json(s: &str) -> Result<CellComplex, ComplexError> {
    let f: ComplexFile = serde_json::from_str(s).map_err(|e| ComplexError::Format(e.to_string()))?;
    f.into_complex()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{circle, product_interval};

    #[test]
    fn round_trip_simplicial() {
        let c = circle(5).unwrap();
        let s = to_json(&c);
        let back = from_json(&s).unwrap();
        assert_eq!(back, c);
        assert_eq!(to_json(&back), s);
    }

    #[test]
    fn round_trip_cell_mode() {
        let p = product_interval(&circle(3).unwrap(), 2).unwrap().complex;
        assert_eq!(from_json(&to_json(&p)).unwrap().counts(), p.counts());
    }

    #[test]
    fn rejects_bad_version() {
        let s = to_json(&circle(3).unwrap()).replace("\"version\": 1", "\"version\": 9");
        assert!(matches!(from_json(&s), Err(ComplexError::Format(_))));
    }
}
