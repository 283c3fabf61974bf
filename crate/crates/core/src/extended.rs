//! Contraction experiments in arbitrary precision, for decay windows that
//! reach below the double-precision noise floor.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dynamics::ContractionResult;
use crate::error::{Error, Result};
use crate::flag::{attracting_fixed_point, FlagPoint, FlagType};
use crate::matlin::k_subsets;
use crate::tits::{pi_projections, weight_split_for};
use crate::weyl::{jordan_projection, simple_root_value, RootLabel};

const RM: RoundingMode = RoundingMode::ToEven;

/// Iterations allowed for refining the attracting point.
pub const MAX_REFINE_ITERATIONS: usize = 2_000_000;

/// Smallest accepted mantissa, in bits.
pub const MIN_PRECISION_BITS: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtendedContraction {
    pub result: ContractionResult,
    pub precision_bits: usize,
    /// `log d_α(gⁿξ, y)` for every sample, in decimal at full precision.
    pub log_distances: Vec<String>,
}

struct Arith {
    p: usize,
    cc: Consts,
}

impl Arith {
    fn new(p: usize) -> Result<Self> {
        let cc = Consts::new().map_err(|_| Error::InvalidArgument("cannot allocate constants cache".into()))?;
        Ok(Self { p, cc })
    }

    fn num(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.p)
    }

    fn dot(&self, a: &[BigFloat], b: &[BigFloat]) -> BigFloat {
        a.iter().zip(b).fold(self.num(0.0), |s, (x, y)| s.add(&x.mul(y, self.p, RM), self.p, RM))
    }

    fn normalize(&self, v: &mut [BigFloat]) {
        let n = self.dot(v, v).sqrt(self.p, RM);
        for x in v.iter_mut() {
            *x = x.div(&n, self.p, RM);
        }
    }

    fn apply(&self, m: &[Vec<BigFloat>], v: &[BigFloat]) -> Vec<BigFloat> {
        m.iter().map(|row| self.dot(row, v)).collect()
    }

    /// Determinant by elimination with partial pivoting.
    fn det(&self, mut a: Vec<Vec<BigFloat>>) -> BigFloat {
        let n = a.len();
        let mut det = self.num(1.0);
        for c in 0..n {
            let piv = (c..n)
                .max_by(|&i, &j| {
                    let (x, y) = (a[i][c].abs(), a[j][c].abs());
                    x.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(c);
            if a[piv][c].is_zero() {
                return self.num(0.0);
            }
            if piv != c {
                a.swap(piv, c);
                det = det.neg();
            }
            det = det.mul(&a[c][c], self.p, RM);
            let (top, rest) = a.split_at_mut(c + 1);
            let pivot = &top[c];
            for row in rest {
                let f = row[c].div(&pivot[c], self.p, RM);
                for (x, p) in row[c..].iter_mut().zip(&pivot[c..]) {
                    *x = x.sub(&f.mul(p, self.p, RM), self.p, RM);
                }
            }
        }
        det
    }

    /// `∧ᵏ g` with minors evaluated at full precision.
    fn exterior(&self, g: &DMatrix<f64>, k: usize) -> Vec<Vec<BigFloat>> {
        let subsets = k_subsets(g.nrows(), k);
        subsets
            .iter()
            .map(|rows| {
                subsets
                    .iter()
                    .map(|cols| {
                        let minor = rows.iter().map(|&i| cols.iter().map(|&j| self.num(g[(i, j)])).collect()).collect();
                        self.det(minor)
                    })
                    .collect()
            })
            .collect()
    }

    fn to_f64(&self, x: &BigFloat) -> f64 {
        match x.as_raw_parts() {
            Some((words, _, sign, e, _)) if !x.is_zero() => {
                let top = *words.last().unwrap_or(&0) as f64 / 2f64.powi(64);
                let v = top * 2f64.powi(e);
                if sign.is_negative() {
                    -v
                } else {
                    v
                }
            }
            _ => 0.0,
        }
    }
}

/// [`contraction_experiment`](crate::dynamics::contraction_experiment)
/// carried out with a `bits`-bit mantissa. The attracting point is refined
/// by power iteration at the same precision, and the regression runs on
/// the extended log-distances.
pub fn contraction_experiment_extended(
    g: &DMatrix<f64>,
    xi: &FlagPoint<f64>,
    k: RootLabel,
    n_max: usize,
    window: (f64, f64),
    bits: usize,
) -> Result<ExtendedContraction> {
    if bits < MIN_PRECISION_BITS {
        return Err(Error::InvalidArgument(format!("precision must be at least {MIN_PRECISION_BITS} bits")));
    }
    if !(window.0 > 0.0 && window.0 < window.1) {
        return Err(Error::InvalidArgument("window must satisfy 0 < lo < hi".into()));
    }
    let d = g.nrows();
    let ty = FlagType::single(d, k.index())?;
    let start = xi
        .component(k.index())
        .cloned()
        .ok_or_else(|| Error::FlagTypeMismatch(format!("ξ has no {}-subspace", k.index())))?;
    let split = weight_split_for(g, k)?;
    let lambda = jordan_projection(g)?;
    let gap = simple_root_value(&lambda, k);
    let predicted = -gap;
    let pi = pi_projections(&split, &FlagPoint::from_components(ty.clone(), vec![start.clone()])?).ok();

    let mut ar = Arith::new(bits)?;
    let w = ar.exterior(g, k.index());
    let mut y: Vec<BigFloat> = attracting_fixed_point(g, &ty)?.components()[0].iter().map(|&x| ar.num(x)).collect();
    // y is accurate to about 1e-16; each step gains a factor e^{-gap}
    let refine = ((bits as f64 * std::f64::consts::LN_2 - 30.0).max(0.0) / gap).ceil() as usize + 10;
    if refine > MAX_REFINE_ITERATIONS {
        return Err(Error::InvalidArgument(format!("root gap {gap:.3e} too small for {bits}-bit refinement")));
    }
    for _ in 0..refine {
        y = ar.apply(&w, &y);
        ar.normalize(&mut y);
    }

    let (lo, hi) = (window.0.ln(), window.1.ln());
    let mut v: Vec<BigFloat> = start.iter().map(|&x| ar.num(x)).collect();
    ar.normalize(&mut v);
    let mut samples = Vec::new();
    let mut logs: Vec<(usize, BigFloat)> = Vec::new();
    for n in 0..=n_max {
        if n > 0 {
            v = ar.apply(&w, &v);
            ar.normalize(&mut v);
        }
        let c = ar.dot(&v, &y);
        let resid: Vec<BigFloat> = v.iter().zip(&y).map(|(a, b)| a.sub(&c.mul(b, bits, RM), bits, RM)).collect();
        let dist = ar.dot(&resid, &resid).sqrt(bits, RM);
        if dist.is_zero() {
            break;
        }
        let l = dist.ln(bits, RM, &mut ar.cc);
        let lf = ar.to_f64(&l);
        if lf >= lo && lf <= hi {
            samples.push((n, lf.exp()));
            logs.push((n, l));
        } else if lf < lo {
            break;
        }
    }
    if logs.len() < 4 {
        return Err(Error::InsufficientDecayWindow { usable: logs.len() });
    }

    let p = bits;
    let zero = ar.num(0.0);
    let (mut sx, mut sy, mut sxx, mut sxy) = (zero.clone(), zero.clone(), zero.clone(), zero);
    for (n, l) in &logs {
        let x = ar.num(*n as f64);
        sx = sx.add(&x, p, RM);
        sy = sy.add(l, p, RM);
        sxx = sxx.add(&x.mul(&x, p, RM), p, RM);
        sxy = sxy.add(&x.mul(l, p, RM), p, RM);
    }
    let m = ar.num(logs.len() as f64);
    let num = m.mul(&sxy, p, RM).sub(&sx.mul(&sy, p, RM), p, RM);
    let den = m.mul(&sxx, p, RM).sub(&sx.mul(&sx, p, RM), p, RM);
    let slope = num.div(&den, p, RM);
    let intercept = sy.sub(&slope.mul(&sx, p, RM), p, RM).div(&m, p, RM);
    let log_distances = logs
        .iter()
        .map(|(_, l)| l.format(Radix::Dec, RM, &mut ar.cc).map_err(|_| Error::InvalidArgument("format".into())))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExtendedContraction {
        result: ContractionResult {
            slope: ar.to_f64(&slope),
            intercept: ar.to_f64(&intercept),
            points_used: logs.len(),
            predicted,
            pi,
            samples,
        },
        precision_bits: bits,
        log_distances,
    })
}

/// Parses a decimal rendering back into a `bits`-bit number.
pub fn parse_decimal(s: &str, bits: usize) -> Result<BigFloat> {
    let mut cc = Consts::new().map_err(|_| Error::InvalidArgument("cannot allocate constants cache".into()))?;
    let x = BigFloat::parse(s, Radix::Dec, bits, RM, &mut cc);
    if x.is_nan() {
        return Err(Error::InvalidArgument(format!("not a number: `{s}`")));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn diag(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_row_slice(v))
    }

    #[test]
    fn conversion_to_f64() {
        let ar = Arith::new(128).unwrap();
        for x in [1.0, -2.5, 3.0e-40, 7.25e12, -1.0 / 3.0] {
            assert_eq!(ar.to_f64(&ar.num(x)), x);
        }
    }

    #[test]
    fn determinant_of_minors() {
        let g = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0]);
        let ar = Arith::new(128).unwrap();
        let w = ar.exterior(&g, 3);
        assert!((ar.to_f64(&w[0][0]) - g.determinant()).abs() < 1e-13);
        let w2 = ar.exterior(&g, 2);
        let f = crate::matlin::exterior_power(&g, 2).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((ar.to_f64(&w2[i][j]) - f[(i, j)]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn diagonal_slope_far_below_double_floor() {
        let g = diag(&[4.0, 1.0, 0.25]);
        let xi = FlagPoint::line(DVector::from_row_slice(&[1.0, 1.0, 1.0])).unwrap();
        let k = RootLabel::new(1, 3).unwrap();
        let r = contraction_experiment_extended(&g, &xi, k, 200, (1e-60, 1e-2), 256).unwrap();
        assert!(r.result.points_used > 90);
        assert!((r.result.slope + 4f64.ln()).abs() < 1e-12, "{}", r.result.slope);
    }

    #[test]
    fn log_distance_matches_closed_form() {
        // log of sqrt(1+16^-40)/sqrt(16^40+1+16^-40), to 40 digits
        let exact = parse_decimal("-55.45177444479562475337856971665412544604", 256).unwrap();
        let g = diag(&[4.0, 1.0, 0.25]);
        let xi = FlagPoint::line(DVector::from_row_slice(&[1.0, 1.0, 1.0])).unwrap();
        let k = RootLabel::new(1, 3).unwrap();
        let r = contraction_experiment_extended(&g, &xi, k, 40, (1e-30, 1e-2), 256).unwrap();
        let (n, _) = *r.result.samples.last().unwrap();
        assert_eq!(n, 40);
        let got = parse_decimal(r.log_distances.last().unwrap(), 256).unwrap();
        let ar = Arith::new(256).unwrap();
        let err = ar.to_f64(&got.sub(&exact, 256, RM)).abs();
        assert!(err < 1e-30, "{err:e}");
    }

    #[test]
    fn rejects_low_precision() {
        let g = diag(&[4.0, 1.0, 0.25]);
        let xi = FlagPoint::line(DVector::from_row_slice(&[1.0, 1.0, 1.0])).unwrap();
        let k = RootLabel::new(1, 3).unwrap();
        assert!(contraction_experiment_extended(&g, &xi, k, 40, (1e-30, 1e-2), 32).is_err());
    }
}
