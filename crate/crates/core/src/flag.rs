//! Points of partial flag varieties of `R^d`, stored as chains of unit
//! Plücker vectors, with the metrics `d_α`, `d_θ` and the projective action.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matlin::{
    binomial, exterior_power, frame_of_plucker, normalized, orthonormalize, plucker_of_frame,
    real_eigenbasis, LogScaledMatrix,
};
use crate::scalar::{lit, Real};
use crate::weyl::{is_loxodromic, DEFAULT_GAP_TOLERANCE};

/// Witness threshold for transversality checks.
pub const GENERAL_POSITION_THRESHOLD: f64 = 1e-8;

/// Dimensions `θ ⊂ {1, …, d−1}` of the subspaces in a partial flag.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FlagType {
    d: usize,
    theta: Vec<usize>,
}

impl FlagType {
    pub fn new(d: usize, theta: impl IntoIterator<Item = usize>) -> Result<Self> {
        let theta: Vec<usize> = theta.into_iter().collect();
        if theta.is_empty() {
            return Err(Error::FlagTypeMismatch("empty flag type".into()));
        }
        if theta.windows(2).any(|p| p[0] >= p[1]) || theta[0] == 0 || *theta.last().unwrap() >= d {
            return Err(Error::FlagTypeMismatch(format!("invalid type {theta:?} for d = {d}")));
        }
        Ok(Self { d, theta })
    }

    pub fn single(d: usize, k: usize) -> Result<Self> {
        Self::new(d, [k])
    }

    pub fn full(d: usize) -> Self {
        Self { d, theta: (1..d).collect() }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn theta(&self) -> &[usize] {
        &self.theta
    }

    pub fn contains(&self, k: usize) -> bool {
        self.theta.contains(&k)
    }

    pub fn max_k(&self) -> usize {
        *self.theta.last().unwrap()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlagPoint<T: Real> {
    ty: FlagType,
    components: Vec<DVector<T>>,
}

impl<T: Real> FlagPoint<T> {
    /// Flag spanned by leading columns of `frame`: the `k`-subspace is the
    /// span of the first `k` columns.
    pub fn from_frame(ty: FlagType, frame: &DMatrix<T>) -> Result<Self> {
        if frame.nrows() != ty.d || frame.ncols() < ty.max_k() {
            return Err(Error::DimensionMismatch { expected: ty.d, got: frame.nrows() });
        }
        let components = ty
            .theta
            .iter()
            .map(|&k| normalized(&plucker_of_frame(&frame.columns(0, k).into_owned())))
            .collect();
        Ok(Self { ty, components })
    }

    /// From raw Plücker vectors, one per `k ∈ θ`; each is normalized.
    pub fn from_components(ty: FlagType, components: Vec<DVector<T>>) -> Result<Self> {
        if components.len() != ty.theta.len() {
            return Err(Error::DimensionMismatch { expected: ty.theta.len(), got: components.len() });
        }
        for (&k, c) in ty.theta.iter().zip(&components) {
            if c.len() != binomial(ty.d, k) {
                return Err(Error::DimensionMismatch { expected: binomial(ty.d, k), got: c.len() });
            }
            if c.norm() == T::zero() {
                return Err(Error::InvalidArgument("zero Plücker vector".into()));
            }
        }
        let components = components.iter().map(normalized).collect();
        Ok(Self { ty, components })
    }

    /// The line through `v`.
    pub fn line(v: DVector<T>) -> Result<Self> {
        let ty = FlagType::single(v.len(), 1)?;
        Self::from_components(ty, vec![v])
    }

    pub fn flag_type(&self) -> &FlagType {
        &self.ty
    }

    pub fn component(&self, k: usize) -> Option<&DVector<T>> {
        self.ty.theta.iter().position(|&j| j == k).map(|i| &self.components[i])
    }

    pub fn components(&self) -> &[DVector<T>] {
        &self.components
    }

    /// Orthonormal basis of the `k`-subspace.
    pub fn subspace_frame(&self, k: usize) -> Result<DMatrix<T>> {
        let p = self
            .component(k)
            .ok_or_else(|| Error::FlagTypeMismatch(format!("no {k}-subspace in {:?}", self.ty.theta)))?;
        Ok(frame_of_plucker(p, self.ty.d, k))
    }

    /// Checks decomposability of every component and nesting of the chain.
    pub fn validate(&self, tol: T) -> Result<()> {
        let mut frames = Vec::new();
        for (&k, p) in self.ty.theta.iter().zip(&self.components) {
            let f = frame_of_plucker(p, self.ty.d, k);
            let back = normalized(&plucker_of_frame(&f));
            if plucker_distance(p, &back) > tol {
                return Err(Error::InvalidArgument(format!("{k}-component is not decomposable")));
            }
            frames.push(f);
        }
        for w in frames.windows(2) {
            let (small, big) = (&w[0], &w[1]);
            let resid = small - big * (big.transpose() * small);
            if resid.norm() > tol {
                return Err(Error::InvalidArgument("flag components are not nested".into()));
            }
        }
        Ok(())
    }
}

/// `‖v ∧ w‖ / (‖v‖‖w‖)`: the sine of the angle between the lines.
///
/// Evaluated as the norm of the residual after projecting one vector on the
/// other (averaged over both orders), which keeps precision for nearly
/// parallel vectors.
pub fn plucker_distance<T: Real>(v: &DVector<T>, w: &DVector<T>) -> T {
    let v = normalized(v);
    let w = normalized(w);
    let c = v.dot(&w);
    let r1 = (&w - &v * c).norm();
    let r2 = (&v - &w * c).norm();
    ((r1 + r2) * lit::<T>(0.5)).min(T::one())
}

pub fn flag_distance_alpha<T: Real>(x: &FlagPoint<T>, y: &FlagPoint<T>, k: usize) -> Result<T> {
    match (x.component(k), y.component(k)) {
        (Some(p), Some(q)) if x.ty.d == y.ty.d => Ok(plucker_distance(p, q)),
        _ => Err(Error::FlagTypeMismatch(format!("root {k} missing from a flag type"))),
    }
}

/// `d_θ = Σ_{k ∈ θ} d_{α_k}`.
pub fn flag_distance_theta<T: Real>(x: &FlagPoint<T>, y: &FlagPoint<T>) -> Result<T> {
    if x.ty != y.ty {
        return Err(Error::FlagTypeMismatch(format!("{:?} vs {:?}", x.ty.theta, y.ty.theta)));
    }
    Ok(x.components
        .iter()
        .zip(&y.components)
        .fold(T::zero(), |a, (p, q)| a + plucker_distance(p, q)))
}

/// `g · x`, each component transformed by `∧ᵏ g`.
pub fn act<T: Real>(g: &DMatrix<T>, x: &FlagPoint<T>) -> Result<FlagPoint<T>> {
    if g.nrows() != x.ty.d {
        return Err(Error::DimensionMismatch { expected: x.ty.d, got: g.nrows() });
    }
    let components = x
        .ty
        .theta
        .iter()
        .zip(&x.components)
        .map(|(&k, p)| {
            let w = if k == 1 { g.clone() } else { exterior_power(g, k)? };
            Ok(normalized(&(w * p)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FlagPoint { ty: x.ty.clone(), components })
}

/// Action of a log-scaled matrix; the scale is projectively irrelevant.
pub fn act_log_scaled<T: Real>(g: &LogScaledMatrix<T>, x: &FlagPoint<T>) -> Result<FlagPoint<T>> {
    act(&g.base, x)
}

/// Canonical projection `F_θ → F_{θ₀}` for `θ₀ ⊂ θ`.
pub fn factor_map<T: Real>(x: &FlagPoint<T>, theta0: &[usize]) -> Result<FlagPoint<T>> {
    let ty = FlagType::new(x.ty.d, theta0.iter().copied())?;
    let components = theta0
        .iter()
        .map(|&k| {
            x.component(k)
                .cloned()
                .ok_or_else(|| Error::FlagTypeMismatch(format!("{theta0:?} is not a subset of {:?}", x.ty.theta)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FlagPoint { ty, components })
}

/// Flag of leading eigenspaces of a loxodromic matrix.
pub fn attracting_fixed_point<T: Real>(g: &DMatrix<T>, ty: &FlagType) -> Result<FlagPoint<T>> {
    if !is_loxodromic(g, lit(DEFAULT_GAP_TOLERANCE))?.loxodromic {
        return Err(Error::NotLoxodromic);
    }
    let eb = real_eigenbasis(g)?;
    FlagPoint::from_frame(ty.clone(), &eb.vectors)
}

/// `|det[F₁ | F₂ | …]|` for orthonormal frames whose column counts add up to
/// the ambient dimension; 1 for orthogonal complements, 0 when not
/// transversal.
pub fn transversality_witness<T: Real>(frames: &[DMatrix<T>]) -> Result<T> {
    let d = frames[0].nrows();
    let total: usize = frames.iter().map(|f| f.ncols()).sum();
    if total != d || frames.iter().any(|f| f.nrows() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: total });
    }
    let mut m = DMatrix::zeros(d, d);
    let mut c = 0;
    for f in frames {
        let f = orthonormalize(f);
        m.columns_mut(c, f.ncols()).copy_from(&f);
        c += f.ncols();
    }
    Ok(m.determinant().abs())
}

/// Transversality of vectors `v_i` to a subspace `W` of codimension equal to
/// their number, given an orthonormal basis `ann` of `W^⊥`:
/// `|det(annᵀ V)|` with unit columns `V`. Equals the volume-normalized
/// determinant `|det[V | basis(W)]|`.
pub fn complement_witness<T: Real>(vectors: &[DVector<T>], ann: &DMatrix<T>) -> Result<T> {
    if vectors.len() != ann.ncols() {
        return Err(Error::DimensionMismatch { expected: ann.ncols(), got: vectors.len() });
    }
    let n = vectors.len();
    let m = DMatrix::from_fn(n, n, |i, j| ann.column(i).dot(&normalized(&vectors[j])));
    Ok(m.determinant().abs())
}

/// General position of a `k`-subspace and a `(d−k)`-subspace.
pub fn general_position<T: Real>(x: &FlagPoint<T>, y: &FlagPoint<T>) -> Result<(bool, T)> {
    let d = x.ty.d;
    if y.ty.d != d || x.ty.theta.len() != 1 || y.ty.theta.len() != 1 || x.ty.theta[0] + y.ty.theta[0] != d
    {
        return Err(Error::FlagTypeMismatch("general position needs complementary dimensions".into()));
    }
    let w = transversality_witness(&[x.subspace_frame(x.ty.theta[0])?, y.subspace_frame(y.ty.theta[0])?])?;
    Ok((w > lit(GENERAL_POSITION_THRESHOLD), w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn e(d: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(d);
        v[i] = 1.0;
        v
    }

    fn diag(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_row_slice(v))
    }

    #[test]
    fn alpha_distance_examples() {
        let x = FlagPoint::line(e(2, 0)).unwrap();
        assert_eq!(flag_distance_alpha(&x, &x, 1).unwrap(), 0.0);
        let y = FlagPoint::line(e(2, 1)).unwrap();
        assert_relative_eq!(flag_distance_alpha(&x, &y, 1).unwrap(), 1.0, epsilon = 1e-15);
        let z = FlagPoint::line(DVector::from_vec(vec![1.0, 1.0])).unwrap();
        assert_relative_eq!(flag_distance_alpha(&x, &z, 1).unwrap(), 0.5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn theta_distance_of_standard_flags() {
        let ty = FlagType::full(3);
        let x = FlagPoint::from_frame(ty.clone(), &DMatrix::<f64>::identity(3, 3)).unwrap();
        let f = DMatrix::from_columns(&[e(3, 1), e(3, 2), e(3, 0)]);
        let y = FlagPoint::from_frame(ty, &f).unwrap();
        assert_relative_eq!(flag_distance_theta(&x, &y).unwrap(), 2.0, epsilon = 1e-15);
        assert_eq!(flag_distance_theta(&x, &x).unwrap(), 0.0);
        let line = factor_map(&x, &[1]).unwrap();
        assert!(flag_distance_theta(&x, &line).is_err());
    }

    #[test]
    fn factor_map_examples() {
        let x = FlagPoint::from_frame(FlagType::full(3), &DMatrix::<f64>::identity(3, 3)).unwrap();
        assert_eq!(factor_map(&x, &[1, 2]).unwrap(), x);
        let l = factor_map(&x, &[1]).unwrap();
        assert_eq!(l.components()[0], e(3, 0));
        assert!(factor_map(&FlagPoint::line(e(3, 0)).unwrap(), &[2]).is_err());
    }

    #[test]
    fn action_examples() {
        let x = FlagPoint::line(DVector::from_vec(vec![1.0, 1.0, 1.0])).unwrap();
        assert_eq!(act(&DMatrix::identity(3, 3), &x).unwrap(), x);
        let g = diag(&[4.0, 1.0, 0.25]);
        let mut y = x.clone();
        for _ in 0..40 {
            y = act(&g, &y).unwrap();
        }
        let target = FlagPoint::line(e(3, 0)).unwrap();
        assert!(flag_distance_alpha(&y, &target, 1).unwrap() < 1e-20);
    }

    #[test]
    fn attracting_points_of_diagonal() {
        let g = diag(&[3.0, 2.0, 1.0 / 6.0]);
        let p = attracting_fixed_point(&g, &FlagType::single(3, 1).unwrap()).unwrap();
        assert_relative_eq!(p.components()[0][0].abs(), 1.0, epsilon = 1e-12);
        let p = attracting_fixed_point(&g, &FlagType::full(3)).unwrap();
        let q = FlagPoint::from_frame(FlagType::full(3), &DMatrix::identity(3, 3)).unwrap();
        assert!(flag_distance_theta(&p, &q).unwrap() < 1e-12);
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert_eq!(attracting_fixed_point(&rot, &FlagType::full(2)), Err(Error::NotLoxodromic));
    }

    #[test]
    fn general_position_examples() {
        let x = FlagPoint::line(e(3, 0)).unwrap();
        let y = FlagPoint::from_frame(
            FlagType::single(3, 2).unwrap(),
            &DMatrix::from_columns(&[e(3, 1), e(3, 2)]),
        )
        .unwrap();
        let (ok, w) = general_position(&x, &y).unwrap();
        assert!(ok);
        assert_relative_eq!(w, 1.0, epsilon = 1e-14);
        let z = FlagPoint::from_frame(
            FlagType::single(3, 2).unwrap(),
            &DMatrix::from_columns(&[e(3, 0), e(3, 1)]),
        )
        .unwrap();
        let (ok, w) = general_position(&x, &z).unwrap();
        assert!(!ok);
        assert!(w < 1e-14);
    }

    #[test]
    fn validation_detects_bad_points() {
        let x = FlagPoint::from_frame(FlagType::full(4), &DMatrix::<f64>::identity(4, 4)).unwrap();
        assert!(x.validate(1e-8).is_ok());
        // e1∧e2 + e3∧e4 is not decomposable
        let mut p = DVector::zeros(6);
        p[0] = 1.0;
        p[5] = 1.0;
        let bad = FlagPoint::from_components(FlagType::single(4, 2).unwrap(), vec![p]).unwrap();
        assert!(bad.validate(1e-8).is_err());
        let unnested = FlagPoint::from_components(
            FlagType::new(4, [1, 2]).unwrap(),
            vec![e(4, 3), e(6, 0)],
        )
        .unwrap();
        assert!(unnested.validate(1e-8).is_err());
    }

    #[test]
    fn complement_witness_matches_determinant() {
        let v = [DVector::from_vec(vec![1.0, 0.2, 0.1, 0.0]), DVector::from_vec(vec![0.3, 1.0, -0.4, 0.5])];
        let w = DMatrix::from_columns(&[e(4, 0) + e(4, 3) * 0.5, e(4, 2)]);
        let w = orthonormalize(&w);
        let full = transversality_witness(&[
            DMatrix::from_columns(&[normalized(&v[0])]),
            DMatrix::from_columns(&[normalized(&v[1])]),
            w.clone(),
        ])
        .unwrap();
        // orthonormal complement of W
        let mut m = DMatrix::identity(4, 4) - &w * w.transpose();
        m = m.clone().svd(true, false).u.unwrap().columns(0, 2).into_owned();
        assert_relative_eq!(complement_witness(&v, &m).unwrap(), full, epsilon = 1e-12);
    }
}
