//! Second-order cones and their signed-permutation images.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::norm;

/// Projection onto `{(x, r) : r ≥ ‖x‖}` with the cone coordinate `r` stored last.
pub(crate) fn project_soc(u: &[f64]) -> Vec<f64> {
    let (head, r) = u.split_at(u.len() - 1);
    let r = r[0];
    let nx = norm(head);
    if nx <= r {
        return u.to_vec();
    }
    if nx <= -r {
        return vec![0.0; u.len()];
    }
    let c = 0.5 * (nx + r) / nx;
    let mut out: Vec<f64> = head.iter().map(|v| c * v).collect();
    out.push(0.5 * (nx + r));
    out
}

/// Signed coordinate permutation `Q`, `(Q z)_i = sign_i · z_{source_i}`.
///
/// Serialized as a list of signed 1-based source indices, so `[1, 2, -3]`
/// maps `(z₁, z₂, z₃)` to `(z₁, z₂, -z₃)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct Orientation {
    source: Vec<usize>,
    negate: Vec<bool>,
}

impl Orientation {
    pub fn identity(dim: usize) -> Self {
        Self {
            source: (0..dim).collect(),
            negate: vec![false; dim],
        }
    }

    pub fn from_signed_indices(entries: &[i64]) -> Result<Self> {
        let dim = entries.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("orientation must be non-empty".into()));
        }
        let mut seen = vec![false; dim];
        let mut source = Vec::with_capacity(dim);
        let mut negate = Vec::with_capacity(dim);
        for &e in entries {
            let k = e.unsigned_abs() as usize;
            if k == 0 || k > dim || seen[k - 1] {
                return Err(Error::InvalidArgument(format!(
                    "orientation {entries:?} is not a signed permutation of 1..={dim}"
                )));
            }
            seen[k - 1] = true;
            source.push(k - 1);
            negate.push(e < 0);
        }
        Ok(Self { source, negate })
    }

    pub fn dim(&self) -> usize {
        self.source.len()
    }

    pub fn signed_indices(&self) -> Vec<i64> {
        self.source
            .iter()
            .zip(&self.negate)
            .map(|(&s, &n)| if n { -(s as i64 + 1) } else { s as i64 + 1 })
            .collect()
    }

    /// `Q z`
    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        self.source
            .iter()
            .zip(&self.negate)
            .map(|(&s, &n)| if n { -z[s] } else { z[s] })
            .collect()
    }

    /// `Qᵀ x`
    pub fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; x.len()];
        for (i, (&s, &n)) in self.source.iter().zip(&self.negate).enumerate() {
            z[s] = if n { -x[i] } else { x[i] };
        }
        z
    }
}

impl TryFrom<Vec<i64>> for Orientation {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        Self::from_signed_indices(&v)
    }
}

impl From<Orientation> for Vec<i64> {
    fn from(o: Orientation) -> Self {
        o.signed_indices()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soc_projection_cases() {
        assert_eq!(project_soc(&[1.0, 0.0]), vec![0.5, 0.5]);
        assert_eq!(project_soc(&[0.3, -0.4, 1.0]), vec![0.3, -0.4, 1.0]);
        assert_eq!(project_soc(&[0.3, -0.4, -1.0]), vec![0.0; 3]);
    }

    #[test]
    fn orientation_transpose_inverts() {
        let q = Orientation::from_signed_indices(&[3, -1, 2]).unwrap();
        let z = [1.0, 2.0, 3.0];
        assert_eq!(q.apply(&z), vec![3.0, -1.0, 2.0]);
        assert_eq!(q.apply_transpose(&q.apply(&z)), z.to_vec());
        assert_eq!(q.signed_indices(), vec![3, -1, 2]);
    }

    #[test]
    fn orientation_rejects_non_permutations() {
        assert!(Orientation::from_signed_indices(&[1, 1]).is_err());
        assert!(Orientation::from_signed_indices(&[0, 2]).is_err());
        assert!(Orientation::from_signed_indices(&[1, 3]).is_err());
        assert!(Orientation::from_signed_indices(&[]).is_err());
    }
}
