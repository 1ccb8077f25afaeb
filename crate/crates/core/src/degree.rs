//! Degrees of circle maps and the two-term Bezout arithmetic behind them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{circuit_chain, CellMap, ComplexError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DegreeError {
    #[error("{0} and {1} are not coprime")]
    NotCoprime(i64, i64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("arithmetic overflow computing {0}")]
    Overflow(String),
    #[error("source chain is not a cycle")]
    NotACycle,
    #[error("image is not a multiple of the target cycle")]
    ImageNotOnCircle,
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

pub(crate) fn checked_pow(base: i64, k: u32) -> Result<i64, DegreeError> {
    base.checked_pow(k).ok_or_else(|| DegreeError::Overflow(format!("{base}^{k}")))
}

/// `(n, m)` with `n·p^k + m·q^k = 1` and `|m|` minimal, positive `m` on ties.
pub fn bezout(p: i64, q: i64, k: u32) -> Result<(i64, i64), DegreeError> {
    if p < 1 || q < 1 || k == 0 {
        return Err(DegreeError::InvalidInput(format!("bezout needs p, q ≥ 1 and k ≥ 1, got ({p}, {q}, {k})")));
    }
    if p.gcd(&q) != 1 {
        return Err(DegreeError::NotCoprime(p, q));
    }
    let (pk, qk) = (checked_pow(p, k)? as i128, checked_pow(q, k)? as i128);
    if pk == 1 {
        return Ok((1, 0));
    }
    // m ≡ q^{−k} (mod p^k); the two representatives nearest zero.
    let inv = Integer::extended_gcd(&qk, &pk).x.rem_euclid(pk);
    let m = if inv <= pk - inv { inv } else { inv - pk };
    let n = (1 - m * qk) / pk;
    debug_assert_eq!(n * pk + m * qk, 1);
    Ok((n as i64, m as i64))
}

/// All `m` with `|m| ≤ limit` solving `n·p^k + m·q^k = 1` for some integer `n`,
/// by direct enumeration.
pub fn enumerate_m(p: i64, q: i64, k: u32, limit: i64) -> Result<Vec<(i64, i64)>, DegreeError> {
    let (pk, qk) = (checked_pow(p, k)? as i128, checked_pow(q, k)? as i128);
    Ok((-limit..=limit)
        .filter_map(|m| {
            let r = 1 - m as i128 * qk;
            (r % pk == 0).then(|| ((r / pk) as i64, m))
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinMBound {
    pub bound: BigRational,
    /// Whether `p > q²` holds; the bound is computed either way.
    pub hypothesis_holds: bool,
}

/// `(p^k − 1)/q^k`, a lower bound on `|m|` for every solution of `n·p^k + m·q^k = 1`.
pub fn min_m_bound(p: i64, q: i64, k: u32) -> Result<MinMBound, DegreeError> {
    if k == 0 || q < 2 || p < 2 {
        return Err(DegreeError::InvalidInput(format!("need p, q ≥ 2 and k ≥ 1, got ({p}, {q}, {k})")));
    }
    let (pk, qk) = (checked_pow(p, k)?, checked_pow(q, k)?);
    Ok(MinMBound {
        bound: BigRational::new(BigInt::from(pk - 1), BigInt::from(qk)),
        hypothesis_holds: p > q * q,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub p: i64,
    pub q: i64,
    pub k: u32,
    pub n: Option<i64>,
    pub m: Option<i64>,
    pub d: Option<i64>,
    pub d_p: Option<i64>,
    pub d_q: Option<i64>,
    pub bound_m: BigRational,
}

impl DegreeReport {
    /// Report for `(p, q, k)` with the Bezout pair filled in when it exists.
    pub fn new(p: i64, q: i64, k: u32) -> Result<DegreeReport, DegreeError> {
        let bound_m = min_m_bound(p, q, k)?.bound;
        let nm = bezout(p, q, k).ok();
        Ok(DegreeReport { p, q, k, n: nm.map(|x| x.0), m: nm.map(|x| x.1), d: None, d_p: None, d_q: None, bound_m })
    }

    pub fn with_degrees(mut self, d: i64, d_p: i64, d_q: i64) -> DegreeReport {
        self.d = Some(d);
        self.d_p = Some(d_p);
        self.d_q = Some(d_q);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeCheck {
    /// `d_p·p^k + d_q·q^k = d`.
    pub relation_holds: bool,
    /// `|d_q/d| ≥ (p^k − 1)/q^k`, checked when `d ≠ 0`, `d_q ≠ 0` and `d`
    /// divides both hole degrees; `None` when not applicable.
    pub bound_holds: Option<bool>,
    pub explanation: String,
}

impl DegreeCheck {
    pub fn passed(&self) -> bool {
        self.relation_holds && self.bound_holds != Some(false)
    }
}

pub fn check_degree_relation(r: &DegreeReport) -> DegreeCheck {
    let (Some(d), Some(dp), Some(dq)) = (r.d, r.d_p, r.d_q) else {
        return DegreeCheck { relation_holds: false, bound_holds: None, explanation: "degrees not filled".into() };
    };
    let (Ok(pk), Ok(qk)) = (checked_pow(r.p, r.k), checked_pow(r.q, r.k)) else {
        return DegreeCheck { relation_holds: false, bound_holds: None, explanation: "overflow".into() };
    };
    let lhs = dp as i128 * pk as i128 + dq as i128 * qk as i128;
    let relation_holds = lhs == d as i128;
    let mut explanation = format!("{dp}·{pk} + {dq}·{qk} = {lhs}, d = {d}");
    let bound_holds = if d != 0 && dq != 0 && dp % d == 0 && dq % d == 0 {
        let ratio = BigRational::new(BigInt::from(dq.abs()), BigInt::from(d.abs()));
        let ok = ratio >= r.bound_m;
        explanation.push_str(&format!("; |d_q/d| = {ratio} vs bound {}", r.bound_m));
        Some(ok)
    } else {
        None
    };
    DegreeCheck { relation_holds, bound_holds, explanation }
}

/// `λ` with `f_#(src) = λ·dst`, for integer 1-cycles on source and target.
pub fn circle_map_degree(f: &CellMap, src: &[i64], dst: &[i64]) -> Result<i64, DegreeError> {
    let (s, t) = (f.source(), f.target());
    if src.len() != s.count(1) || dst.len() != t.count(1) {
        return Err(DegreeError::InvalidInput("chain lengths do not match the complexes".into()));
    }
    if s.boundary(1).mul_vec_i64(src).iter().any(|&v| v != 0) {
        return Err(DegreeError::NotACycle);
    }
    if t.boundary(1).mul_vec_i64(dst).iter().any(|&v| v != 0) || dst.iter().all(|&v| v == 0) {
        return Err(DegreeError::NotACycle);
    }
    let img = f.chain(1).mul_vec_i64(src);
    let e = dst.iter().position(|&v| v != 0).expect("nonzero");
    if img[e] % dst[e] != 0 {
        return Err(DegreeError::ImageNotOnCircle);
    }
    let lambda = img[e] / dst[e];
    if img.iter().zip(dst).any(|(&a, &b)| a != lambda * b) {
        return Err(DegreeError::ImageNotOnCircle);
    }
    Ok(lambda)
}

/// Degree between two labeled circles, using their stored circuits.
pub fn label_degree(f: &CellMap, src_label: &str, dst_label: &str) -> Result<i64, DegreeError> {
    let circuit = |cx: &crate::complex::CellComplex, name: &str| -> Result<Vec<i64>, DegreeError> {
        let l = cx.label(name)?;
        let c = l.circuit.as_ref().ok_or_else(|| DegreeError::InvalidInput(format!("label {name} has no circuit")))?;
        Ok(circuit_chain(cx, c)?)
    };
    circle_map_degree(f, &circuit(f.source(), src_label)?, &circuit(f.target(), dst_label)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{annulus_triangulation, circle};
    use std::sync::Arc;

    #[test]
    fn bezout_examples() {
        assert_eq!(bezout(5, 2, 1).unwrap(), (1, -2));
        assert_eq!(bezout(5, 2, 2).unwrap(), (1, -6));
        assert_eq!(bezout(11, 3, 1).unwrap(), (-1, 4));
        assert_eq!(bezout(4, 2, 1), Err(DegreeError::NotCoprime(4, 2)));
    }

    #[test]
    fn bound_examples() {
        assert_eq!(min_m_bound(5, 2, 2).unwrap().bound, BigRational::from_integer(6.into()));
        assert_eq!(min_m_bound(11, 3, 1).unwrap().bound, BigRational::new(10.into(), 3.into()));
        assert!(!min_m_bound(3, 2, 1).unwrap().hypothesis_holds);
    }

    #[test]
    fn relation_checks() {
        let r = DegreeReport::new(5, 2, 1).unwrap();
        let ok = check_degree_relation(&r.clone().with_degrees(1, 1, -2));
        assert!(ok.relation_holds && ok.bound_holds == Some(true));
        assert!(!check_degree_relation(&r.with_degrees(1, 0, 0)).relation_holds);
    }

    #[test]
    fn degrees_of_circle_maps() {
        let c = Arc::new(circle(3).unwrap());
        let id = CellMap::identity(c.clone());
        assert_eq!(label_degree(&id, "circle", "circle").unwrap(), 1);
        let konst = CellMap::simplicial(c.clone(), c.clone(), vec![0, 0, 0]).unwrap();
        assert_eq!(label_degree(&konst, "circle", "circle").unwrap(), 0);
        let (_, collapse) = annulus_triangulation(6, 3).unwrap();
        assert_eq!(label_degree(&collapse, "domain-rim", "circle").unwrap(), 2);
    }
}
