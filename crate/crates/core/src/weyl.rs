//! Root data of SL(d, R) and the Cartan and Jordan projections.
//!
//! Vectors of the Cartan subalgebra are stored in diagonal coordinates
//! `(u₁, …, u_d)` with `Σ u_k = 0`. The simple roots are
//! `α_k(u) = u_k − u_{k+1}` and the opposition involution reverses and
//! negates coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matlin::{
    eigenvalue_moduli, singular_values, word_product, word_spectrum, Generators,
};
use crate::scalar::{lit, Real};
use crate::words::Word;

/// Default gap below which an element counts as non-loxodromic (log scale).
pub const DEFAULT_GAP_TOLERANCE: f64 = 1e-6;

/// Period cap for orthogonal iteration on words.
pub const MAX_PERIODS: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylVector<T: Real> {
    coords: Vec<T>,
}

impl<T: Real> WeylVector<T> {
    /// Takes raw coordinates and subtracts their mean, so the sum is zero.
    pub fn from_coords(mut coords: Vec<T>) -> Self {
        let n: T = lit(coords.len() as f64);
        let mean = coords.iter().fold(T::zero(), |a, &b| a + b) / n;
        coords.iter_mut().for_each(|c| *c -= mean);
        Self { coords }
    }

    /// Coordinates exactly as given; no projection onto the sum-zero plane.
    pub fn from_coords_unchecked(coords: Vec<T>) -> Self {
        Self { coords }
    }

    pub fn zero(d: usize) -> Self {
        Self { coords: vec![T::zero(); d] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn sum(&self) -> T {
        self.coords.iter().fold(T::zero(), |a, &b| a + b)
    }

    pub fn is_chamber_sorted(&self, slack: T) -> bool {
        self.coords.windows(2).all(|p| p[0] + slack >= p[1])
    }

    pub fn norm(&self) -> T {
        self.coords.iter().fold(T::zero(), |a, &b| a + b * b).sqrt()
    }

    pub fn scaled(&self, s: T) -> Self {
        Self { coords: self.coords.iter().map(|&c| c * s).collect() }
    }

    /// Unit Euclidean norm; the zero vector is returned unchanged.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n > T::zero() {
            self.scaled(T::one() / n)
        } else {
            self.clone()
        }
    }

    /// Values of all simple roots `α_1, …, α_{d−1}`.
    pub fn root_values(&self) -> Vec<T> {
        self.coords.windows(2).map(|p| p[0] - p[1]).collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), |a, b| a.max(b))
    }
}

/// Simple root index `k ∈ 1..d` (one-based, as `α_k`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootLabel(usize);

impl RootLabel {
    pub fn new(k: usize, d: usize) -> Result<Self> {
        if k == 0 || k >= d {
            return Err(Error::InvalidArgument(format!("root index {k} outside 1..{d}")));
        }
        Ok(Self(k))
    }

    pub fn index(self) -> usize {
        self.0
    }
}

/// `α_k(v) = u_k − u_{k+1}`.
pub fn simple_root_value<T: Real>(v: &WeylVector<T>, k: RootLabel) -> T {
    v.coords[k.0 - 1] - v.coords[k.0]
}

/// `(u₁, …, u_d) ↦ (−u_d, …, −u₁)`.
pub fn opposition_involution<T: Real>(v: &WeylVector<T>) -> WeylVector<T> {
    WeylVector { coords: v.coords.iter().rev().map(|&c| -c).collect() }
}

fn from_logs_descending<T: Real>(mut logs: Vec<T>) -> WeylVector<T> {
    logs.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    WeylVector::from_coords(logs)
}

/// Logs of the singular values, descending, projected to sum zero.
pub fn cartan_projection<T: Real>(m: &nalgebra::DMatrix<T>) -> Result<WeylVector<T>> {
    let s = singular_values(m)?;
    Ok(from_logs_descending(s.into_iter().map(|x| x.ln()).collect()))
}

/// Logs of the eigenvalue moduli, descending, projected to sum zero.
pub fn jordan_projection<T: Real>(m: &nalgebra::DMatrix<T>) -> Result<WeylVector<T>> {
    let e = eigenvalue_moduli(m)?;
    Ok(from_logs_descending(e.into_iter().map(|x| x.ln()).collect()))
}

/// Jordan projection of the element named by a word, computed by orthogonal
/// iteration over its letters. Accurate for long words whose product matrix
/// would lose the small eigenvalues to rounding.
pub fn jordan_projection_word<T: Real>(gens: &Generators<T>, w: &Word) -> Result<WeylVector<T>> {
    if w.is_empty() {
        return Ok(WeylVector::zero(gens.dim()));
    }
    let it = word_spectrum(gens, &gens.dual(), w, MAX_PERIODS)?;
    Ok(from_logs_descending(it.log_moduli))
}

/// Cartan projection of a word from the top singular values of its exterior
/// powers: `log σ₁(∧ᵏ g) = σ-partial sum k`.
pub fn cartan_projection_word<T: Real>(gens: &Generators<T>, w: &Word) -> Result<WeylVector<T>> {
    let d = gens.dim();
    let mut partial = Vec::with_capacity(d + 1);
    partial.push(T::zero());
    for k in 1..d {
        let g = if k == 1 { gens.clone() } else { gens.exterior(k)? };
        partial.push(word_product(&g, w)?.log_norm());
    }
    partial.push(gens.log_abs_det(w)?);
    Ok(WeylVector::from_coords(partial.windows(2).map(|p| p[1] - p[0]).collect()))
}

/// `λ(g) = lim μ(g^{2^s}) / 2^s`, evaluated on every exterior power of the
/// word with repeated squaring of log-scaled products.
///
/// Converges like `O(2^{-s})`; the constant is the log of the spectral
/// projector norm, so 40 or more squarings are needed for 1e-8 agreement on
/// generic elements.
pub fn jordan_projection_stable<T: Real>(
    gens: &Generators<T>,
    w: &Word,
    squarings: u32,
) -> Result<WeylVector<T>> {
    if squarings == 0 {
        return Err(Error::InvalidArgument("squarings must be ≥ 1".into()));
    }
    // λ is conjugation invariant; squaring the cyclic core avoids the
    // conditioning of the conjugator
    let (_, w) = w.cyclic_reduction();
    let w = &w;
    let d = gens.dim();
    let denom: T = lit(2f64.powi(squarings as i32));
    let mut partial = Vec::with_capacity(d + 1);
    partial.push(T::zero());
    for k in 1..d {
        let g = if k == 1 { gens.clone() } else { gens.exterior(k)? };
        let mut p = word_product(&g, w)?;
        for _ in 0..squarings {
            p = p.square()?;
        }
        let v = p.log_norm() / denom;
        if !v.is_finite() {
            return Err(Error::PowerIterationUnstable);
        }
        partial.push(v);
    }
    partial.push(gens.log_abs_det(w)?);
    Ok(from_logs_descending(partial.windows(2).map(|p| p[1] - p[0]).collect()))
}

/// Loxodromy test with the vector of simple-root gaps of `λ(m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Loxodromy<T: Real> {
    pub loxodromic: bool,
    pub gaps: Vec<T>,
}

pub fn loxodromy_of<T: Real>(lambda: &WeylVector<T>, gap_tolerance: T) -> Loxodromy<T> {
    let gaps = lambda.root_values();
    let loxodromic = gaps.iter().all(|&g| g > gap_tolerance);
    Loxodromy { loxodromic, gaps }
}

pub fn is_loxodromic<T: Real>(m: &nalgebra::DMatrix<T>, gap_tolerance: T) -> Result<Loxodromy<T>> {
    Ok(loxodromy_of(&jordan_projection(m)?, gap_tolerance))
}
