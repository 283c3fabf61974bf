//! Exterior powers as the Tits representations of SL(d, R), with the
//! highest and second-highest weight lines of a loxodromic element.
//!
//! For `α_k`, the representation is `∧ᵏ R^d`. In eigencoordinates of a
//! loxodromic `g`, the highest weight line is `e₁∧…∧e_k` and the weight
//! `χ − α_k` line is `e₁∧…∧e_{k−1}∧e_{k+1}`; both are one-dimensional.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::flag::FlagPoint;
use crate::matlin::{binomial, condition_number, exterior_power, real_eigenbasis, subset_index};
use crate::scalar::{lit, to_f64, Real};
use crate::weyl::{is_loxodromic, RootLabel, DEFAULT_GAP_TOLERANCE};

/// Eigenbases worse than this are rejected by [`pi_projections`].
pub const MAX_EIGENBASIS_CONDITION: f64 = 1e10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TitsRep {
    pub d: usize,
    pub k: RootLabel,
    pub rep_dim: usize,
}

impl TitsRep {
    pub fn new(d: usize, k: RootLabel) -> Self {
        Self { d, k, rep_dim: binomial(d, k.index()) }
    }

    /// Index of `e₁∧…∧e_k` in lexicographic wedge order.
    pub fn highest_index(&self) -> usize {
        0
    }

    /// Index of `e₁∧…∧e_{k−1}∧e_{k+1}`.
    pub fn second_index(&self) -> usize {
        let k = self.k.index();
        let mut s: Vec<usize> = (0..k - 1).collect();
        s.push(k);
        subset_index(self.d, &s)
    }
}

#[derive(Clone, Debug)]
pub struct WeightSplit<T: Real> {
    pub rep: TitsRep,
    /// Eigenvectors of `g` by descending modulus.
    pub basis: DMatrix<T>,
    /// `∧ᵏ(B⁻¹)`: wedge coordinates relative to the eigenbasis.
    pub to_eigen: DMatrix<T>,
    pub eigenvalues: Vec<T>,
    pub condition: T,
}

impl<T: Real> WeightSplit<T> {
    pub fn v1_index(&self) -> usize {
        self.rep.highest_index()
    }

    pub fn v2_index(&self) -> usize {
        self.rep.second_index()
    }
}

pub fn weight_split_for<T: Real>(g: &DMatrix<T>, k: RootLabel) -> Result<WeightSplit<T>> {
    let d = g.nrows();
    if k.index() >= d {
        return Err(Error::InvalidArgument(format!("root {} out of range", k.index())));
    }
    let lox = is_loxodromic(g, lit(DEFAULT_GAP_TOLERANCE))?;
    if !lox.loxodromic {
        return Err(Error::WeightSplitUndefined { k: k.index() });
    }
    let eb = real_eigenbasis(g).map_err(|_| Error::WeightSplitUndefined { k: k.index() })?;
    let inv = eb.vectors.clone().try_inverse().ok_or(Error::DegenerateMatrix)?;
    let to_eigen = if k.index() == 1 { inv } else { exterior_power(&inv, k.index())? };
    let condition = condition_number(&eb.vectors);
    Ok(WeightSplit {
        rep: TitsRep::new(d, k),
        basis: eb.vectors,
        to_eigen,
        eigenvalues: eb.values,
        condition,
    })
}

/// Magnitudes of the `V₁` and `V₂` components of `ξ` in eigencoordinates.
pub fn pi_projections<T: Real>(split: &WeightSplit<T>, xi: &FlagPoint<T>) -> Result<(T, T)> {
    if split.condition > lit(MAX_EIGENBASIS_CONDITION) {
        return Err(Error::ProjectionUnreliable { condition: to_f64(split.condition) });
    }
    let k = split.rep.k.index();
    let p = xi
        .component(k)
        .ok_or_else(|| Error::FlagTypeMismatch(format!("flag has no {k}-subspace")))?;
    let c = &split.to_eigen * p;
    Ok((c[split.v1_index()].abs(), c[split.v2_index()].abs()))
}

/// Eigenvalues of `∧ᵏ g` on `V₁` and `V₂`, read off the conjugated matrix.
pub fn weight_eigenvalues<T: Real>(split: &WeightSplit<T>, g: &DMatrix<T>) -> Result<(T, T)> {
    let k = split.rep.k.index();
    let (wg, wb) = if k == 1 {
        (g.clone(), split.basis.clone())
    } else {
        (exterior_power(g, k)?, exterior_power(&split.basis, k)?)
    };
    let conj = &split.to_eigen * wg * wb;
    Ok((conj[(split.v1_index(), split.v1_index())], conj[(split.v2_index(), split.v2_index())]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flag::{attracting_fixed_point, FlagType};
    use approx::assert_relative_eq;
    use nalgebra::DVector;

    fn diag(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_row_slice(v))
    }

    #[test]
    fn split_of_diagonal_elements() {
        let g = diag(&[4.0, 2.0, 0.125]);
        let s = weight_split_for(&g, RootLabel::new(1, 3).unwrap()).unwrap();
        assert_eq!((s.v1_index(), s.v2_index()), (0, 1));
        let s = weight_split_for(&g, RootLabel::new(2, 3).unwrap()).unwrap();
        // subsets {0,1}, {0,2}, {1,2}
        assert_eq!((s.v1_index(), s.v2_index()), (0, 1));
        let (top, second) = weight_eigenvalues(&s, &g).unwrap();
        assert_relative_eq!(top, 8.0, epsilon = 1e-12);
        assert_relative_eq!(second, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn split_rejects_non_loxodromic() {
        let u = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(
            weight_split_for(&u, RootLabel::new(1, 2).unwrap()),
            Err(Error::WeightSplitUndefined { k: 1 })
        ));
    }

    #[test]
    fn projection_examples() {
        let g = diag(&[4.0, 1.0, 0.25]);
        let k1 = RootLabel::new(1, 3).unwrap();
        let s = weight_split_for(&g, k1).unwrap();
        let y = attracting_fixed_point(&g, &FlagType::single(3, 1).unwrap()).unwrap();
        let (p1, p2) = pi_projections(&s, &y).unwrap();
        assert!(p1 > 0.5 && p2 == 0.0);
        let e2 = FlagPoint::line(DVector::from_vec(vec![0.0, 1.0, 0.0])).unwrap();
        assert_eq!(pi_projections(&s, &e2).unwrap().0, 0.0);
        let x = FlagPoint::line(DVector::from_vec(vec![1.0, 1.0, 1.0])).unwrap();
        let (p1, p2) = pi_projections(&s, &x).unwrap();
        assert_relative_eq!(p1, 1.0 / 3f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(p2, 1.0 / 3f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn ill_conditioned_basis_is_rejected() {
        // eigenvectors (1,0) and (1, 1e-12)
        let t = 1e-12;
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, t]);
        let g = &b * diag(&[2.0, 0.5]) * b.clone().try_inverse().unwrap();
        let s = weight_split_for(&g, RootLabel::new(1, 2).unwrap()).unwrap();
        let x = FlagPoint::line(DVector::from_vec(vec![1.0, 0.3])).unwrap();
        assert!(matches!(pi_projections(&s, &x), Err(Error::ProjectionUnreliable { .. })));
    }
}
