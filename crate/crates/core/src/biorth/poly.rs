use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::Side;
use crate::numerics::{Mode, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolyKind {
    P,
    Q,
    HatP,
    HatQ,
    JacobiXi,
    JacobiPsi,
    /// A difference of polynomials that should vanish identically.
    Residual,
}

/// `Σ_l c_l (x^{1/k})^l`, a polynomial in `x^θ` with `θ = 1/k`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiorthPoly {
    pub kind: PolyKind,
    pub side: Side,
    pub n: usize,
    pub k: u32,
    pub coeffs: Vec<Scalar>,
}

impl BiorthPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> &Scalar {
        self.coeffs.last().expect("polynomials carry at least one coefficient")
    }

    /// Value at `x ≥ 0`: one `k`-th root, then Horner in `x^θ`.
    pub fn evaluate(&self, x: &Scalar) -> Result<Scalar> {
        if x.signum() < 0 {
            return Err(Error::Domain(format!("polynomials in x^θ are evaluated on x ≥ 0, got {x}")));
        }
        if x.is_zero() {
            return Ok(self.coeffs[0].clone());
        }
        let y = x.root(self.k)?;
        let mut acc = y.int_like(0);
        for c in self.coeffs.iter().rev() {
            acc = acc * &y + c;
        }
        Ok(acc)
    }

    /// Largest coefficient magnitude, as `log10`.
    pub fn max_abs_log10(&self) -> f64 {
        self.coeffs.iter().map(Scalar::log10_abs).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_identically_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn to_document(&self) -> PolyDocument {
        PolyDocument {
            kind: self.kind,
            side: self.side,
            n: self.n,
            theta: format!("1/{}", self.k),
            coefficients: self.coeffs.iter().map(Scalar::to_repr).collect(),
        }
    }

    pub fn from_document(doc: &PolyDocument, mode: Mode) -> Result<Self> {
        let k = doc
            .theta
            .strip_prefix("1/")
            .and_then(|s| s.parse::<u32>().ok())
            .filter(|&k| k > 0)
            .ok_or_else(|| Error::Format(format!("theta must look like 1/k, got {:?}", doc.theta)))?;
        let coeffs = doc.coefficients.iter().map(|s| mode.parse(s)).collect::<Result<Vec<_>>>()?;
        if coeffs.is_empty() {
            return Err(Error::Format("no coefficients".into()));
        }
        Ok(BiorthPoly { kind: doc.kind, side: doc.side, n: doc.n, k, coeffs })
    }
}

/// JSON form of a polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyDocument {
    pub kind: PolyKind,
    pub side: Side,
    pub n: usize,
    pub theta: String,
    pub coefficients: Vec<String>,
}
