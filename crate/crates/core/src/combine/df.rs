use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::Df2;

/// Denominator degrees-of-freedom formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DfKind {
    /// d̃f: the two-branch rule on K = dim·(m − 1).
    Classic,
    /// d̃f′ = (m − 1)(1 + 1/r)² dim^{−3/m}.
    Prime,
    /// d̂f = ((1 + r)/r)² dim (m − 1).
    New,
}

/// Denominator df for odds `r`. A nonpositive `r` gives the χ² limit.
pub fn df_denominator(kind: DfKind, r: f64, dim: usize, m: usize) -> Result<Df2> {
    if m < 2 || dim == 0 {
        return Err(Error::InvalidArgument(format!("df needs m > 1 and dim >= 1, got m = {m}, dim = {dim}")));
    }
    if r.is_nan() {
        return Err(Error::InvalidArgument("odds of missing information is NaN".into()));
    }
    if r <= 0.0 {
        return Ok(Df2::Infinite);
    }
    let (d, m1) = (dim as f64, (m - 1) as f64);
    let v = match kind {
        DfKind::Classic => {
            let big_k = d * m1;
            if big_k > 4.0 {
                4.0 + (big_k - 4.0) * (1.0 + (1.0 - 2.0 / big_k) / r).powi(2)
            } else {
                m1 * (1.0 + 1.0 / r).powi(2) * (d + 1.0) / 2.0
            }
        }
        DfKind::Prime => m1 * (1.0 + 1.0 / r).powi(2) * d.powf(-3.0 / m as f64),
        DfKind::New => ((1.0 + r) / r).powi(2) * d * m1,
    };
    Ok(if v.is_finite() { Df2::Finite(v) } else { Df2::Infinite })
}
