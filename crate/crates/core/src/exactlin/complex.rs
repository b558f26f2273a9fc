use super::{echelonize, left_kernel, subspace_intersection_dim, EchelonBasis, SparseMatrix};
use crate::error::{Error, Result};

/// A finite-dimensional space with a square-zero endomorphism. Row `i` of the
/// differential is `d(e_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainComplex {
    differential: SparseMatrix,
}

impl ChainComplex {
    pub fn new(differential: SparseMatrix) -> Result<Self> {
        if differential.n_rows() != differential.n_cols() {
            return Err(Error::DimensionMismatch(format!(
                "differential is {}x{}",
                differential.n_rows(),
                differential.n_cols()
            )));
        }
        let square = differential.mul(&differential)?;
        if let Some((r, c, _)) = square.entries().next() {
            return Err(Error::InvariantViolation(format!("d² ≠ 0 (first nonzero entry at ({r},{c}))")));
        }
        Ok(ChainComplex { differential })
    }

    pub fn zero(dim: usize) -> Self {
        ChainComplex {
            differential: SparseMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.differential.n_rows()
    }

    pub fn differential(&self) -> &SparseMatrix {
        &self.differential
    }

    pub fn boundary_rank(&self) -> usize {
        echelonize(&self.differential).0
    }

    /// `dim Z − dim B`.
    pub fn cohomology_dim(&self) -> usize {
        let b = self.boundary_rank();
        self.dim() - 2 * b
    }
}

/// `dim im(H(sub) → H(complex))`, computed as `dim Z(sub) − dim(Z(sub) ∩ B(complex))`.
/// `sub` lists a spanning set of a differential-closed subspace as rows.
pub fn image_in_cohomology_dim(sub: &SparseMatrix, complex: &ChainComplex) -> Result<usize> {
    if sub.n_cols() != complex.dim() {
        return Err(Error::DimensionMismatch(format!(
            "subspace of dimension-{} space inside a complex of dimension {}",
            sub.n_cols(),
            complex.dim()
        )));
    }
    let d = complex.differential();
    let (_, sub_basis) = echelonize(sub);
    let images = sub_basis.mul(d)?;

    let mut closure = EchelonBasis::new();
    for row in sub_basis.rows() {
        closure.insert(row);
    }
    if let Some(i) = images.rows().iter().position(|img| !closure.contains(img)) {
        return Err(Error::InvariantViolation(format!(
            "subspace is not closed under the differential (basis row {i})"
        )));
    }

    let kernel = left_kernel(&images);
    let cycles = kernel.mul(&sub_basis)?;
    let (z, cycles) = echelonize(&cycles);
    let dead = subspace_intersection_dim(&cycles, d)?;
    Ok(z - dead)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::int;

    fn complex(n: usize, edges: &[(usize, usize)]) -> ChainComplex {
        ChainComplex::new(SparseMatrix::from_triplets(n, n, edges.iter().map(|&(r, c)| (r, c, int(1)))).unwrap()).unwrap()
    }

    #[test]
    fn zero_differential_everything_survives() {
        let c = ChainComplex::zero(3);
        assert_eq!(image_in_cohomology_dim(&SparseMatrix::identity(3), &c).unwrap(), 3);
    }

    #[test]
    fn boundary_dies() {
        // basis z = 0, w = 1 with d(w) = z
        let c = complex(2, &[(1, 0)]);
        let sub = SparseMatrix::from_triplets(1, 2, [(0, 0, int(1))]).unwrap();
        assert_eq!(image_in_cohomology_dim(&sub, &c).unwrap(), 0);
    }

    #[test]
    fn only_the_free_cycle_survives() {
        // basis z = 0, u = 1, w = 2 with d(w) = z, d(u) = 0
        let c = complex(3, &[(2, 0)]);
        let sub = SparseMatrix::from_triplets(2, 3, [(0, 0, int(1)), (1, 1, int(1))]).unwrap();
        assert_eq!(image_in_cohomology_dim(&sub, &c).unwrap(), 1);
        assert_eq!(image_in_cohomology_dim(&SparseMatrix::identity(3), &c).unwrap(), c.cohomology_dim());
    }

    #[test]
    fn rejects_bad_input() {
        let bad = SparseMatrix::from_triplets(2, 2, [(0, 1, int(1)), (1, 0, int(1))]).unwrap();
        assert!(matches!(ChainComplex::new(bad), Err(Error::InvariantViolation(_))));
        let c = complex(2, &[(1, 0)]);
        let not_closed = SparseMatrix::from_triplets(1, 2, [(0, 1, int(1))]).unwrap();
        assert!(matches!(
            image_in_cohomology_dim(&not_closed, &c),
            Err(Error::InvariantViolation(_))
        ));
    }
}
