//! Named generator sets used by the experiments.

use std::f64::consts::FRAC_PI_4;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dynamics::RepresentedGroup;
use crate::error::{Error, Result};

pub fn diag(v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_row_slice(v))
}

pub fn rotation2(t: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()])
}

/// `a = diag(s, 1/s)` and `b = R a R⁻¹` with `R` the rotation by `π/4`.
pub fn schottky_sl2(s: f64) -> Result<RepresentedGroup> {
    if !(s > 1.0) {
        return Err(Error::InvalidArgument(format!("Schottky parameter must exceed 1, got {s}")));
    }
    let a = diag(&[s, 1.0 / s]);
    let r = rotation2(FRAC_PI_4);
    let b = &r * &a * r.transpose();
    RepresentedGroup::with_standard_names(format!("schottky-sl2(s={s})"), vec![a, b])
}

/// The Schottky pair with every generator raised to the power `n`.
///
/// Built as the pair with parameter `sⁿ`, which is the same group and
/// avoids rounding in matrix powers.
pub fn schottky_sl2_power(s: f64, n: u32) -> Result<RepresentedGroup> {
    let mut g = schottky_sl2(s.powi(n as i32))?;
    g.name = format!("schottky-sl2(s={s})^{n}");
    Ok(g)
}

/// Random orthogonal matrix with determinant 1 from a seeded Gaussian QR.
pub fn random_rotation(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(d, d, |_, _| StandardNormal.sample(rng));
    let qr = m.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for i in 0..d {
        if r[(i, i)] < 0.0 {
            q.column_mut(i).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// Two loxodromic elements of SL(3, R) with non-proportional Jordan
/// projections, the second conjugated by a seeded random rotation. Large
/// gaps make the pair play ping-pong for typical seeds.
pub fn schottky_sl3(seed: u64) -> Result<RepresentedGroup> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = diag(&[6.0, 1.5, 1.0 / 9.0]);
    let k = random_rotation(3, &mut rng);
    let b = &k * diag(&[5.0, 1.0 / 2.0, 2.0 / 5.0]) * k.transpose();
    RepresentedGroup::with_standard_names(format!("schottky-sl3(seed={seed})"), vec![a, b])
}

/// Two loxodromic elements of SL(d, R): `a` with equal root gaps, `b` with
/// alternating gaps and conjugated by a seeded random rotation.
pub fn schottky_sld(d: usize, seed: u64) -> Result<RepresentedGroup> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("dimension must be at least 2, got {d}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centered = |gaps: &[f64]| -> Vec<f64> {
        let mut logs = vec![0.0];
        for g in gaps {
            logs.push(logs.last().unwrap() - g);
        }
        let mean = logs.iter().sum::<f64>() / d as f64;
        logs.iter().map(|l| (l - mean).exp()).collect()
    };
    let a = diag(&centered(&vec![1.6; d - 1]));
    let gb: Vec<f64> = (0..d - 1).map(|i| if i % 2 == 0 { 2.0 } else { 1.1 }).collect();
    let k = random_rotation(d, &mut rng);
    let b = &k * diag(&centered(&gb)) * k.transpose();
    RepresentedGroup::with_standard_names(format!("schottky-sld(d={d},seed={seed})"), vec![a, b])
}

/// Gaussian matrix rescaled into SL(d, R).
pub fn random_sl(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    loop {
        let mut m = DMatrix::from_fn(d, d, |_, _| StandardNormal.sample(rng));
        let det: f64 = m.determinant();
        if det.abs() < 1e-3 {
            continue;
        }
        if det < 0.0 {
            m.row_mut(0).neg_mut();
        }
        return m / det.abs().powf(1.0 / d as f64);
    }
}

/// `diag(4, 1, 1/4)` as a one-generator group.
pub fn diag_sl3() -> Result<RepresentedGroup> {
    RepresentedGroup::with_standard_names("diag(4,1,1/4)", vec![diag(&[4.0, 1.0, 0.25])])
}

pub const PRESET_NAMES: &[&str] = &["schottky-sl2", "schottky-sl3", "schottky-sld", "diag-sl3"];
