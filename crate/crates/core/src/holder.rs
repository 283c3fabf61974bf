//! Hölder exponents of equivariant boundary correspondences, the
//! self-joining obstruction search, Anosov gap fits and the SL(8, R)
//! construction built from `Sym³` of a Schottky pair.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{linear_fit, sample_fixed_points_of, LimitSample, RepresentedGroup};
use crate::error::{Error, Result};
use crate::flag::{
    complement_witness, factor_map, flag_distance_alpha, flag_distance_theta, FlagPoint, FlagType,
};
use crate::matlin::{block_diagonal, plucker_of_frame, symmetric_power, Generators};
use crate::presets;
use crate::weyl::{loxodromy_of, simple_root_value, RootLabel, WeylVector};
use crate::words::Word;

/// Distance used on one side of a correspondence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// `d_θ`, summed over the whole flag type.
    Theta,
    /// `d_{α_k}`.
    Root(usize),
}

impl Metric {
    pub fn distance(self, x: &FlagPoint<f64>, y: &FlagPoint<f64>) -> Result<f64> {
        match self {
            Metric::Theta => flag_distance_theta(x, y),
            Metric::Root(k) => flag_distance_alpha(x, y, k),
        }
    }
}

/// Two samples aligned on their common words.
#[derive(Clone, Debug)]
pub struct PairedSample {
    pub source: LimitSample,
    pub target: LimitSample,
    pub aligned: Vec<(usize, usize)>,
}

impl PairedSample {
    pub fn new(source: LimitSample, target: LimitSample) -> Result<Self> {
        let mut aligned = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < source.points.len() && j < target.points.len() {
            match source.points[i].0.cmp(&target.points[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    aligned.push((i, j));
                    i += 1;
                    j += 1;
                }
            }
        }
        if aligned.is_empty() {
            return Err(Error::InvalidArgument("samples share no words".into()));
        }
        Ok(Self { source, target, aligned })
    }

    pub fn len(&self) -> usize {
        self.aligned.len()
    }

    pub fn is_empty(&self) -> bool {
        self.aligned.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderOptions {
    /// Source distances used in the fit.
    pub window: (f64, f64),
    pub buckets: usize,
    /// Target distances below this are rounding noise and are dropped.
    pub target_floor: f64,
    /// Points beyond this are subsampled by word order.
    pub max_points: usize,
    pub min_pairs: usize,
    pub min_decades: f64,
}

impl Default for HolderOptions {
    fn default() -> Self {
        Self {
            window: (1e-12, f64::INFINITY),
            buckets: 10,
            target_floor: 1e-14,
            max_points: 3000,
            min_pairs: 30,
            min_decades: 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub count: usize,
    pub mean_log_source: f64,
    pub max_log_ratio: f64,
    pub min_log_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderEstimate {
    pub kappa: f64,
    pub log_c: f64,
    pub r2: f64,
    pub n_pairs: usize,
    pub scale_range: (f64, f64),
    /// Exponent of the envelope `d_t ≤ C d_s^κ` (worst-case stretch).
    pub lower_envelope: f64,
    /// Exponent of the envelope `d_t ≥ C⁻¹ d_s^κ` (worst-case squeeze).
    pub upper_envelope: f64,
    pub buckets: Vec<Bucket>,
}

/// Fits `log d_t = κ log d_s + log C` over all aligned pairs, plus the
/// envelope exponents from the per-bucket extremes of `log(d_t / d_s)`.
pub fn estimate_holder(p: &PairedSample, src: Metric, tgt: Metric, opts: &HolderOptions) -> Result<HolderEstimate> {
    let n = p.aligned.len();
    let idx: Vec<(usize, usize)> = if n > opts.max_points {
        (0..opts.max_points).map(|i| p.aligned[i * n / opts.max_points]).collect()
    } else {
        p.aligned.clone()
    };
    let rows: Vec<Result<Vec<(f64, f64)>>> = (0..idx.len())
        .into_par_iter()
        .map(|i| {
            let (si, ti) = idx[i];
            let mut out = Vec::new();
            for &(sj, tj) in &idx[i + 1..] {
                let ds = src.distance(&p.source.points[si].1, &p.source.points[sj].1)?;
                let dt = tgt.distance(&p.target.points[ti].1, &p.target.points[tj].1)?;
                if ds > 0.0 && ds >= opts.window.0 && ds <= opts.window.1 && dt > opts.target_floor {
                    out.push((ds.ln(), dt.ln()));
                }
            }
            Ok(out)
        })
        .collect();
    let mut pairs = Vec::new();
    for r in rows {
        pairs.extend(r?);
    }
    if pairs.len() < opts.min_pairs {
        return Err(Error::DegenerateGeometry(format!("{} usable pairs, need {}", pairs.len(), opts.min_pairs)));
    }
    let lo = pairs.iter().map(|q| q.0).fold(f64::INFINITY, f64::min);
    let hi = pairs.iter().map(|q| q.0).fold(f64::NEG_INFINITY, f64::max);
    let decades = (hi - lo) / std::f64::consts::LN_10;
    if decades < opts.min_decades {
        return Err(Error::DegenerateGeometry(format!("source distances span {decades:.2} decades")));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
    let fit = linear_fit(&xs, &ys);
    let nb = opts.buckets.max(2);
    let width = (hi - lo) / nb as f64;
    let mut acc = vec![(0usize, 0.0, f64::NEG_INFINITY, f64::INFINITY); nb];
    for &(x, y) in &pairs {
        let b = (((x - lo) / width) as usize).min(nb - 1);
        let a = &mut acc[b];
        a.0 += 1;
        a.1 += x;
        a.2 = a.2.max(y - x);
        a.3 = a.3.min(y - x);
    }
    let buckets: Vec<Bucket> = acc
        .into_iter()
        .filter(|a| a.0 > 0)
        .map(|(c, s, mx, mn)| Bucket { count: c, mean_log_source: s / c as f64, max_log_ratio: mx, min_log_ratio: mn })
        .collect();
    if buckets.len() < 2 {
        return Err(Error::DegenerateGeometry("fewer than two populated scale buckets".into()));
    }
    let bx: Vec<f64> = buckets.iter().map(|b| b.mean_log_source).collect();
    let hi_fit = linear_fit(&bx, &buckets.iter().map(|b| b.max_log_ratio).collect::<Vec<_>>());
    let lo_fit = linear_fit(&bx, &buckets.iter().map(|b| b.min_log_ratio).collect::<Vec<_>>());
    Ok(HolderEstimate {
        kappa: fit.slope,
        log_c: fit.intercept,
        r2: fit.r2,
        n_pairs: pairs.len(),
        scale_range: (lo.exp(), hi.exp()),
        lower_envelope: 1.0 + hi_fit.slope,
        upper_envelope: 1.0 + lo_fit.slope,
        buckets,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaEvaluation {
    pub kappa: f64,
    pub witness: String,
    pub alpha1: f64,
    pub alpha2: f64,
    pub discrepancy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub kappa: f64,
    pub witness_word: String,
    /// Root values of `λ(γ)` in the first factor.
    pub roots1: Vec<f64>,
    /// Root values of `λ(ρ(γ))` in the second factor.
    pub roots2: Vec<f64>,
    /// `min_α α(λ₁(γ))` and `min_α α(λ₂(γ))` at the witness.
    pub alpha1: f64,
    pub alpha2: f64,
    pub discrepancy: f64,
    pub obstructed: bool,
    pub grid: Vec<KappaEvaluation>,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub ratio_spread: f64,
    pub words_tested: usize,
    pub skipped: usize,
}

/// Discrepancies at or below this count as agreement.
pub const OBSTRUCTION_TOLERANCE: f64 = 1e-6;

/// `κ ∈ {p/q : 1 ≤ p, q ≤ 12}`, sorted and deduplicated.
pub fn kappa_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (1..=12).flat_map(|p| (1..=12).map(move |q| p as f64 / q as f64)).collect();
    g.sort_by(f64::total_cmp);
    g.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    g
}

/// Searches the diagonal words `γ ↦ (g₁(γ), g₂(γ))` of length `≤ max_len`
/// for the largest `|κ·min α(λ₁(γ)) − min α(λ₂(γ))|`.
pub fn self_joining_obstruction(
    g1: &RepresentedGroup,
    g2: &RepresentedGroup,
    kappa: f64,
    extra_kappas: &[f64],
    max_len: usize,
) -> Result<ObstructionReport> {
    if g1.rank() != g2.rank() {
        return Err(Error::InvalidArgument("factors have different alphabets".into()));
    }
    let words = g1.words(max_len)?;
    let data: Vec<Option<(Word, Vec<f64>, Vec<f64>)>> = words
        .into_par_iter()
        .map(|w| {
            let l1 = g1.jordan(&w).ok()?;
            let l2 = g2.jordan(&w).ok()?;
            let ok = loxodromy_of(&l1, g1.gap_tolerance()).loxodromic
                && loxodromy_of(&l2, g2.gap_tolerance()).loxodromic;
            ok.then(|| (w, l1.root_values(), l2.root_values()))
        })
        .collect();
    let skipped = data.iter().filter(|d| d.is_none()).count();
    let data: Vec<(Word, Vec<f64>, Vec<f64>)> = data.into_iter().flatten().collect();
    if data.is_empty() {
        return Err(Error::NoCommonLoxodromic);
    }
    let mins: Vec<(f64, f64)> = data.iter().map(|(_, r1, r2)| (min_of(r1), min_of(r2))).collect();
    let evaluate = |k: f64| -> (usize, KappaEvaluation) {
        let mut best = 0;
        for (i, &(a1, a2)) in mins.iter().enumerate() {
            if (k * a1 - a2).abs() > (k * mins[best].0 - mins[best].1).abs() {
                best = i;
            }
        }
        let (a1, a2) = mins[best];
        (best, KappaEvaluation { kappa: k, witness: g1.format(&data[best].0), alpha1: a1, alpha2: a2, discrepancy: (k * a1 - a2).abs() })
    };
    let (best, main) = evaluate(kappa);
    let mut grid_kappas = kappa_grid();
    grid_kappas.extend_from_slice(extra_kappas);
    let grid = grid_kappas.into_iter().map(|k| evaluate(k).1).collect();
    let ratios: Vec<f64> = mins.iter().map(|&(a1, a2)| a2 / a1).collect();
    let ratio_min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio_max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(ObstructionReport {
        kappa,
        witness_word: main.witness,
        roots1: data[best].1.clone(),
        roots2: data[best].2.clone(),
        alpha1: main.alpha1,
        alpha2: main.alpha2,
        discrepancy: main.discrepancy,
        obstructed: main.discrepancy > OBSTRUCTION_TOLERANCE,
        grid,
        ratio_min,
        ratio_max,
        ratio_spread: ratio_max - ratio_min,
        words_tested: data.len(),
        skipped,
    })
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnosovFit {
    pub c: f64,
    pub big_c: f64,
    /// `(ℓ, min_{|γ|=ℓ} α_k(λ(γ)))`.
    pub minima: Vec<(usize, f64)>,
    pub margin_min: f64,
    pub margin_median: f64,
    pub words: usize,
    pub non_loxodromic: usize,
}

/// Minimum number of words for a gap fit.
pub const MIN_ANOSOV_WORDS: usize = 20;

/// Fits `α_k(λ(γ)) ≥ c|γ| − C`: `c` is the slope of the last edge of the
/// lower convex hull of the per-length minima, and `C` the smallest constant
/// making the bound hold for every word.
pub fn anosov_gap_fit(g: &RepresentedGroup, k: RootLabel, max_len: usize) -> Result<AnosovFit> {
    let words = g.words(max_len)?;
    if words.len() < MIN_ANOSOV_WORDS {
        return Err(Error::InvalidArgument(format!("{} words, need {MIN_ANOSOV_WORDS}", words.len())));
    }
    let gaps: Vec<(usize, f64, bool)> = words
        .par_iter()
        .map(|w| match g.spectrum(w) {
            Ok(it) if it.converged => {
                let l = WeylVector::from_coords(it.log_moduli);
                let gap = simple_root_value(&l, k).max(0.0);
                let lox = gap > g.gap_tolerance();
                (w.len(), if lox { gap } else { 0.0 }, lox)
            }
            _ => (w.len(), 0.0, false),
        })
        .collect();
    let non_loxodromic = gaps.iter().filter(|x| !x.2).count();
    let mut minima: Vec<(usize, f64)> = Vec::new();
    for &(l, gap, _) in &gaps {
        match minima.last_mut() {
            Some(m) if m.0 == l => m.1 = m.1.min(gap),
            _ => minima.push((l, gap)),
        }
    }
    let hull = lower_hull(&minima);
    let c = if hull.len() >= 2 {
        let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
        ((b.1 - a.1) / (b.0 - a.0) as f64).max(0.0)
    } else {
        0.0
    };
    let big_c = gaps.iter().map(|&(l, gap, _)| c * l as f64 - gap).fold(0.0, f64::max);
    let mut margins: Vec<f64> = gaps.iter().map(|&(l, gap, _)| gap - (c * l as f64 - big_c)).collect();
    margins.sort_by(f64::total_cmp);
    Ok(AnosovFit {
        c,
        big_c,
        minima,
        margin_min: margins[0],
        margin_median: margins[margins.len() / 2],
        words: gaps.len(),
        non_loxodromic,
    })
}

fn lower_hull(pts: &[(usize, f64)]) -> Vec<(usize, f64)> {
    let mut h: Vec<(usize, f64)> = Vec::new();
    for &p in pts {
        while h.len() >= 2 {
            let (a, b) = (h[h.len() - 2], h[h.len() - 1]);
            let cross = (b.0 - a.0) as f64 * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) as f64;
            if cross <= 0.0 {
                h.pop();
            } else {
                break;
            }
        }
        h.push(p);
    }
    h
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sl8Config {
    pub s: f64,
    pub n: u32,
    pub epsilon: f64,
    pub seed: u64,
    /// Word depth used to validate `N` and the deformation at build time.
    pub validation_depth: usize,
    pub max_halvings: u32,
    pub max_n: u32,
}

impl Default for Sl8Config {
    fn default() -> Self {
        Self { s: 3.0, n: 5, epsilon: 1e-3, seed: 0, validation_depth: 6, max_halvings: 8, max_n: 16 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sl8Provenance {
    pub s: f64,
    pub n_requested: u32,
    pub n: u32,
    pub epsilon_requested: f64,
    pub epsilon: f64,
    pub halvings: u32,
    pub seed: u64,
    pub validation_depth: usize,
    pub min_factor_ratio: f64,
    pub zariski_density: String,
}

#[derive(Clone, Debug)]
pub struct Sl8Example {
    /// The deformed group `Φ`.
    pub phi: RepresentedGroup,
    /// `Φ₀ = ρ₁ ⊕ ρ₂`, with `ρ₁` on the first four coordinates.
    pub phi0: RepresentedGroup,
    pub tau1: RepresentedGroup,
    pub tau2: RepresentedGroup,
    pub rho1: RepresentedGroup,
    pub rho2: RepresentedGroup,
    pub provenance: Sl8Provenance,
}

/// `Sym³` on 2×2 matrices.
pub fn iota(g: &DMatrix<f64>) -> DMatrix<f64> {
    symmetric_power(g, 3).expect("2x2 input")
}

/// `min_γ α₁(λ(τ₂(γ))) / α₁(λ(τ₁(γ)))` over words of length `≤ depth`, with
/// the minimizing word.
pub fn factor_ratio(tau1: &RepresentedGroup, tau2: &RepresentedGroup, depth: usize) -> Result<(f64, Word)> {
    let words = tau1.words(depth)?;
    let r: Vec<Result<(f64, Word)>> = words
        .into_par_iter()
        .map(|w| {
            let a1 = tau1.jordan(&w)?.root_values()[0];
            let a2 = tau2.jordan(&w)?.root_values()[0];
            Ok((a2 / a1, w))
        })
        .collect();
    r.into_iter().try_fold((f64::INFINITY, Word::identity()), |best, x| {
        let x = x?;
        Ok(if x.0 < best.0 { x } else { best })
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformedRatios {
    pub min1: f64,
    pub max1: f64,
    pub min3: f64,
    pub max3: f64,
    pub witness1: String,
    pub witness3: String,
}

impl DeformedRatios {
    pub fn within(&self, lo: f64, hi: f64) -> bool {
        self.min1 >= lo && self.max1 <= hi && self.min3 >= lo && self.max3 <= hi
    }
}

/// `α_k(λ(Φ(γ))) / α_k(λ(Φ₀(γ)))` for `k = 1, 3`; the `k = 3` family equals
/// the `α₁` ratio of `∧³Φ`.
pub fn deformed_ratios(phi: &RepresentedGroup, phi0: &RepresentedGroup, depth: usize) -> Result<DeformedRatios> {
    let words = phi.words(depth)?;
    let r: Vec<Result<(f64, f64)>> = words
        .par_iter()
        .map(|w| {
            let a = phi.jordan(w)?.root_values();
            let b = phi0.jordan(w)?.root_values();
            Ok((a[0] / b[0], a[2] / b[2]))
        })
        .collect();
    let r = r.into_iter().collect::<Result<Vec<_>>>()?;
    let arg = |f: &dyn Fn(&(f64, f64)) -> f64, max: bool| {
        let mut best = 0;
        for i in 0..r.len() {
            if (max && f(&r[i]) > f(&r[best])) || (!max && f(&r[i]) < f(&r[best])) {
                best = i;
            }
        }
        best
    };
    let (i1lo, i1hi) = (arg(&|x| x.0, false), arg(&|x| x.0, true));
    let (i3lo, i3hi) = (arg(&|x| x.1, false), arg(&|x| x.1, true));
    let far1 = if (r[i1hi].0 - 1.0).abs() > (r[i1lo].0 - 1.0).abs() { i1hi } else { i1lo };
    let far3 = if (r[i3hi].1 - 1.0).abs() > (r[i3lo].1 - 1.0).abs() { i3hi } else { i3lo };
    Ok(DeformedRatios {
        min1: r[i1lo].0,
        max1: r[i1hi].0,
        min3: r[i3lo].1,
        max3: r[i3hi].1,
        witness1: phi.format(&words[far1]),
        witness3: phi.format(&words[far3]),
    })
}

/// Bounds for the deformed ratio families.
pub const DEFORMED_RATIO_BOUNDS: (f64, f64) = (2.0 / 3.0, 1.5);

/// Required lower bound on the factor ratio.
pub const FACTOR_RATIO_BOUND: f64 = 4.0;

/// `U = (I + εX) / det(I + εX)^{1/d}` with a unit Frobenius Gaussian `X`,
/// and its inverse.
fn perturbation(d: usize, eps: f64, rng: &mut ChaCha8Rng) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let x = DMatrix::<f64>::from_fn(d, d, |_, _| StandardNormal.sample(rng));
    let x = &x / x.norm();
    let u: DMatrix<f64> = DMatrix::<f64>::identity(d, d) + x * eps;
    let det = u.determinant();
    if !(det > 0.0) {
        return Err(Error::DegenerateMatrix);
    }
    let u = u / det.powf(1.0 / d as f64);
    let ui = u.clone().try_inverse().ok_or(Error::DegenerateMatrix)?;
    Ok((u, ui))
}

/// Builds `Φ = ρ₁ ⊕ ρ₂` with `ρ_i = Sym³ ∘ τ_i`, `τ₂(a) = τ₁(a)ᴺ`, then
/// perturbs each generator to `Φ₀(a)(I + εX)` (unit Frobenius Gaussian `X`,
/// determinant renormalized). `N` is raised until the factor ratio is at
/// least 4 at the validation depth, and `ε` is halved while the deformed
/// ratios leave `[2/3, 3/2]`.
pub fn build_sl8_example(cfg: &Sl8Config) -> Result<Sl8Example> {
    if !(cfg.s > 1.0) || cfg.n < 2 || !(cfg.epsilon >= 0.0) {
        return Err(Error::InvalidArgument("need s > 1, N ≥ 2, ε ≥ 0".into()));
    }
    let tau1 = presets::schottky_sl2(cfg.s)?;
    let mut n = cfg.n;
    let (tau2, ratio) = loop {
        let tau2 = presets::schottky_sl2_power(cfg.s, n)?;
        let (ratio, _) = factor_ratio(&tau1, &tau2, cfg.validation_depth)?;
        if ratio >= FACTOR_RATIO_BOUND || n >= cfg.max_n {
            break (tau2, ratio);
        }
        n += 1;
    };
    let rho1 = tau1.map("rho1", iota)?;
    let rho2 = tau2.map("rho2", iota)?;
    let (g1, g2) = (rho1.generators(), rho2.generators());
    let blockwise = |a: &[DMatrix<f64>], b: &[DMatrix<f64>]| -> Vec<DMatrix<f64>> {
        a.iter().zip(b).map(|(x, y)| block_diagonal(&[x, y])).collect()
    };
    let mats0 = blockwise(g1.matrices(), g2.matrices());
    let invs0 = blockwise(g1.inverses(), g2.inverses());
    let alphabet = tau1.alphabet().clone();
    let phi0 = RepresentedGroup::from_generators(
        "phi0",
        Generators::with_inverses(alphabet.clone(), mats0.clone(), invs0.clone())?,
    )?;
    let mut eps = cfg.epsilon;
    let mut halvings = 0;
    let phi = loop {
        let phi = if eps == 0.0 {
            phi0.clone()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut mats = Vec::new();
            let mut invs = Vec::new();
            for (m, mi) in mats0.iter().zip(&invs0) {
                let (u, ui) = perturbation(m.nrows(), eps, &mut rng)?;
                mats.push(m * u);
                invs.push(ui * mi);
            }
            RepresentedGroup::from_generators("phi", Generators::with_inverses(alphabet.clone(), mats, invs)?)?
        };
        let ok = eps == 0.0
            || deformed_ratios(&phi, &phi0, cfg.validation_depth)
                .map(|r| r.within(DEFORMED_RATIO_BOUNDS.0, DEFORMED_RATIO_BOUNDS.1))
                .unwrap_or(false);
        if ok || halvings >= cfg.max_halvings {
            break phi;
        }
        eps /= 2.0;
        halvings += 1;
    };
    Ok(Sl8Example {
        phi,
        phi0,
        tau1,
        tau2,
        rho1,
        rho2,
        provenance: Sl8Provenance {
            s: cfg.s,
            n_requested: cfg.n,
            n,
            epsilon_requested: cfg.epsilon,
            epsilon: eps,
            halvings,
            seed: cfg.seed,
            validation_depth: cfg.validation_depth,
            min_factor_ratio: ratio,
            zariski_density: "heuristic: perturbed block structure".into(),
        },
    })
}

/// One verified condition, in the report schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConditionReport {
    pub condition: String,
    pub depth: usize,
    pub pass: bool,
    pub witness_word: String,
    pub values: BTreeMap<String, f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub triples: usize,
    pub seed: u64,
    pub hyperconvex_threshold: f64,
    pub block_tolerance: f64,
    pub holder: HolderOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { triples: 500, seed: 0, hyperconvex_threshold: 1e-8, block_tolerance: 1e-8, holder: HolderOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sl8Verification {
    pub reports: Vec<ConditionReport>,
    /// `ζ¹ ∘ (ζ³)⁻¹` from `(Λ_{α₃}, d_{α₃})` to `(Λ_{α₁}, d_{α₁})`.
    pub zeta_holder: HolderEstimate,
    /// `Λ_{α₁,α₃} → Λ_{α₃}` with the summed metrics.
    pub projection_holder: HolderEstimate,
}

/// Exponent window accepted for a bi-Lipschitz map.
pub const BILIPSCHITZ_BAND: (f64, f64) = (0.95, 1.05);
/// Lower envelope accepted for the Lipschitz direction.
pub const LIPSCHITZ_FLOOR: f64 = 0.95;
/// Reference exponent for the composite Hölder bound, with its slack.
pub const COMPOSITE_EXPONENT: f64 = 16.0 / 9.0;
pub const COMPOSITE_SLACK: f64 = 0.3;

fn report(condition: &str, depth: usize, pass: bool, witness: String, values: &[(&str, f64)]) -> ConditionReport {
    ConditionReport {
        condition: condition.into(),
        depth,
        pass,
        witness_word: witness,
        values: values.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
    }
}

/// Checks the six conditions of the construction at word depth `depth`.
pub fn verify_sl8(ex: &Sl8Example, depth: usize, opts: &VerifyOptions) -> Result<Sl8Verification> {
    let words = ex.phi.words(depth)?;
    let mut reports = Vec::new();

    let (ratio, w) = factor_ratio(&ex.tau1, &ex.tau2, depth)?;
    reports.push(report(
        "factor-ratio",
        depth,
        ratio >= FACTOR_RATIO_BOUND,
        ex.tau1.format(&w),
        &[("minRatio", ratio), ("bound", FACTOR_RATIO_BOUND), ("N", ex.provenance.n as f64)],
    ));

    let chain: Vec<Result<(f64, usize)>> = words
        .par_iter()
        .map(|w| {
            let l1 = ex.rho1.jordan(w)?;
            let l2 = ex.rho2.jordan(w)?;
            let (a, b) = (l1.coords(), l2.coords());
            let seq = [b[0], b[1], a[0], a[1], a[2], a[3], b[2], b[3]];
            let margin = seq.windows(2).map(|p| p[0] - p[1]).fold(f64::INFINITY, f64::min);
            Ok((margin, 0))
        })
        .collect();
    let (margin, at) = argmin(chain)?;
    reports.push(report(
        "eigenvalue-chain",
        depth,
        margin > ex.phi.gap_tolerance(),
        ex.phi.format(&words[at]),
        &[("minMargin", margin)],
    ));

    let blocks: Vec<Result<(f64, usize)>> = words.par_iter().map(|w| Ok((block_defect(ex, w)?, 0))).collect();
    let (defect, at) = argmax(blocks)?;
    reports.push(report(
        "limit-map-blocks",
        depth,
        defect < opts.block_tolerance,
        ex.phi0.format(&words[at]),
        &[("maxDefect", defect), ("tolerance", opts.block_tolerance)],
    ));

    let dr = deformed_ratios(&ex.phi, &ex.phi0, depth)?;
    let witness = if (dr.max1 - 1.0).abs().max((dr.min1 - 1.0).abs()) >= (dr.max3 - 1.0).abs().max((dr.min3 - 1.0).abs()) {
        dr.witness1.clone()
    } else {
        dr.witness3.clone()
    };
    reports.push(report(
        "deformed-ratio",
        depth,
        dr.within(DEFORMED_RATIO_BOUNDS.0, DEFORMED_RATIO_BOUNDS.1),
        witness,
        &[
            ("minAlpha1", dr.min1),
            ("maxAlpha1", dr.max1),
            ("minAlpha3", dr.min3),
            ("maxAlpha3", dr.max3),
            ("epsilon", ex.provenance.epsilon),
        ],
    ));

    let hc = hyperconvexity(&ex.phi, &words, opts.triples, opts.seed)?;
    reports.push(report(
        "hyperconvexity",
        depth,
        hc.min_phi > opts.hyperconvex_threshold && hc.min_wedge3 > opts.hyperconvex_threshold,
        hc.witness,
        &[
            ("minDetPhi", hc.min_phi),
            ("minDetWedge3", hc.min_wedge3),
            ("triples", hc.triples as f64),
            ("threshold", opts.hyperconvex_threshold),
        ],
    ));

    let (zeta_holder, projection_holder) = boundary_exponents(&ex.phi, words.clone(), &opts.holder)?;
    reports.push(report(
        "holder",
        depth,
        zeta_holder.lower_envelope >= LIPSCHITZ_FLOOR,
        String::new(),
        &[
            ("kappa", zeta_holder.kappa),
            ("lowerEnvelope", zeta_holder.lower_envelope),
            ("upperEnvelope", zeta_holder.upper_envelope),
            ("compositeExponent", COMPOSITE_EXPONENT),
            (
                "upperWithinComposite",
                f64::from(u8::from(zeta_holder.upper_envelope <= COMPOSITE_EXPONENT + COMPOSITE_SLACK)),
            ),
            ("projectionLowerEnvelope", projection_holder.lower_envelope),
            ("projectionUpperEnvelope", projection_holder.upper_envelope),
            (
                "projectionBiLipschitz",
                f64::from(u8::from(in_band(projection_holder.lower_envelope) && in_band(projection_holder.upper_envelope))),
            ),
        ],
    ));
    Ok(Sl8Verification { reports, zeta_holder, projection_holder })
}

pub fn in_band(x: f64) -> bool {
    x >= BILIPSCHITZ_BAND.0 && x <= BILIPSCHITZ_BAND.1
}

fn argmin(v: Vec<Result<(f64, usize)>>) -> Result<(f64, usize)> {
    let mut best = (f64::INFINITY, 0);
    for (i, x) in v.into_iter().enumerate() {
        let x = x?.0;
        if x < best.0 {
            best = (x, i);
        }
    }
    Ok(best)
}

fn argmax(v: Vec<Result<(f64, usize)>>) -> Result<(f64, usize)> {
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, x) in v.into_iter().enumerate() {
        let x = x?.0;
        if x > best.0 {
            best = (x, i);
        }
    }
    Ok(best)
}

/// Distance between the attracting full flag of `Φ₀(w)` and the flag
/// assembled blockwise from those of `ρ₁(w)` and `ρ₂(w)`.
fn block_defect(ex: &Sl8Example, w: &Word) -> Result<f64> {
    let f = ex.phi0.attracting_flag(w, &FlagType::full(8))?;
    let s1 = ex.rho1.spectrum(w)?;
    let s2 = ex.rho2.spectrum(w)?;
    let comps = (1..8)
        .map(|k| {
            let basis = match k {
                1 | 2 => lift(None, Some(s2.attracting(k))),
                3..=5 => lift(Some(s1.attracting(k - 2)), Some(s2.attracting(2))),
                6 => lift(Some(DMatrix::identity(4, 4)), Some(s2.attracting(2))),
                _ => lift(Some(DMatrix::identity(4, 4)), Some(s2.attracting(3))),
            };
            plucker_of_frame(&basis)
        })
        .collect();
    let expected = FlagPoint::from_components(FlagType::full(8), comps)?;
    flag_distance_theta(&f, &expected)
}

/// `V ⊕ W ⊂ R⁴ ⊕ R⁴` from bases of the two blocks.
fn lift(top: Option<DMatrix<f64>>, bottom: Option<DMatrix<f64>>) -> DMatrix<f64> {
    let a = top.as_ref().map_or(0, |m| m.ncols());
    let b = bottom.as_ref().map_or(0, |m| m.ncols());
    let mut e = DMatrix::zeros(8, a + b);
    if let Some(m) = &top {
        e.view_mut((0, 0), (4, a)).copy_from(m);
    }
    if let Some(m) = &bottom {
        e.view_mut((4, a), (4, b)).copy_from(m);
    }
    e
}

struct Hyperconvexity {
    min_phi: f64,
    min_wedge3: f64,
    triples: usize,
    witness: String,
}

/// Triple transversality `ξ¹(x) ⊕ ξ¹(y) ⊕ ξ^{d−2}(z)` for `Φ` and `∧³Φ` on
/// seeded triples of attracting points of words with pairwise different
/// first letters.
fn hyperconvexity(phi: &RepresentedGroup, words: &[Word], triples: usize, seed: u64) -> Result<Hyperconvexity> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks = Vec::with_capacity(triples);
    while picks.len() < triples {
        let t = [0, 1, 2].map(|_| rng.random_range(0..words.len()));
        let f = t.map(|i| words[i].first().map(|l| l.code()));
        if f[0] != f[1] && f[1] != f[2] && f[0] != f[2] {
            picks.push(t);
        }
    }
    let res: Vec<Result<(f64, f64)>> = picks
        .par_iter()
        .map(|t| {
            let (sx, sy) = (phi.spectrum(&words[t[0]])?, phi.spectrum(&words[t[1]])?);
            let qz = phi.spectrum(&words[t[2]])?.dual_frame;
            let ann = qz.columns(0, 2).into_owned();
            let d1 = complement_witness(&[sx.frame.column(0).into_owned(), sy.frame.column(0).into_owned()], &ann)?;
            let top3 = |s: &crate::matlin::WordSpectrum<f64>| plucker_of_frame(&s.attracting(3));
            let pick = |cols: [usize; 3]| {
                plucker_of_frame(&DMatrix::from_columns(&cols.map(|c| qz.column(c).into_owned())))
            };
            let ann3 = DMatrix::from_columns(&[pick([0, 1, 2]), pick([0, 1, 3])]);
            let d3 = complement_witness(&[top3(&sx), top3(&sy)], &ann3)?;
            Ok((d1, d3))
        })
        .collect();
    let mut out = Hyperconvexity { min_phi: f64::INFINITY, min_wedge3: f64::INFINITY, triples, witness: String::new() };
    let mut worst = f64::INFINITY;
    for (t, r) in picks.iter().zip(res) {
        let (d1, d3) = r?;
        out.min_phi = out.min_phi.min(d1);
        out.min_wedge3 = out.min_wedge3.min(d3);
        if d1.min(d3) < worst {
            worst = d1.min(d3);
            out.witness = t.iter().map(|&i| phi.format(&words[i])).collect::<Vec<_>>().join(" | ");
        }
    }
    Ok(out)
}

/// Envelope exponents of `ζ¹∘(ζ³)⁻¹` and of the projection
/// `Λ_{α₁,α₃} → Λ_{α₃}` on word-aligned fixed-point samples.
fn boundary_exponents(phi: &RepresentedGroup, words: Vec<Word>, opts: &HolderOptions) -> Result<(HolderEstimate, HolderEstimate)> {
    let d = phi.dim();
    let both = sample_fixed_points_of(phi, &FlagType::new(d, [1, 3])?, words)?;
    let project = |k: &[usize]| -> Result<LimitSample> {
        let points = both
            .points
            .iter()
            .map(|(w, p)| Ok((w.clone(), factor_map(p, k)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(LimitSample { flag_type: FlagType::new(d, k.iter().copied())?, points, ..both.clone() })
    };
    let s3 = project(&[3])?;
    let s1 = project(&[1])?;
    let zeta = estimate_holder(&PairedSample::new(s3.clone(), s1)?, Metric::Root(3), Metric::Root(1), opts)?;
    let proj = estimate_holder(&PairedSample::new(both, s3)?, Metric::Theta, Metric::Theta, opts)?;
    Ok((zeta, proj))
}

/// `α_k(λ)` per word for a group and a list of words.
pub fn root_values_of(g: &RepresentedGroup, words: &[Word], k: RootLabel) -> Result<Vec<f64>> {
    let r: Vec<Result<f64>> = words.par_iter().map(|w| Ok(simple_root_value(&g.jordan(w)?, k))).collect();
    r.into_iter().collect()
}

/// Normalized Jordan projection helper used by reports.
pub fn jordan_ray(g: &RepresentedGroup, w: &Word) -> Result<WeylVector<f64>> {
    Ok(g.jordan(w)?.normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::sample_limit_set_fixed_points;
    use crate::presets::{diag, schottky_sl2, schottky_sl2_power};
    use approx::assert_relative_eq;
    use nalgebra::DVector;

    fn line_sample(angles: &[f64]) -> LimitSample {
        let ty = FlagType::single(2, 1).unwrap();
        let points = angles
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                (Word::letter(0, false).pow(i as i64 + 1), FlagPoint::line(DVector::from_vec(vec![t.cos(), t.sin()])).unwrap())
            })
            .collect();
        LimitSample { flag_type: ty, method: crate::dynamics::SampleMethod::FixedPoint, points, skipped: 0, threshold: None }
    }

    #[test]
    fn identity_pairing_is_isometric() {
        let g = schottky_sl2(3.0).unwrap();
        let s = sample_limit_set_fixed_points(&g, &FlagType::single(2, 1).unwrap(), 5).unwrap();
        let p = PairedSample::new(s.clone(), s).unwrap();
        let e = estimate_holder(&p, Metric::Theta, Metric::Theta, &HolderOptions::default()).unwrap();
        assert_relative_eq!(e.kappa, 1.0, epsilon = 1e-12);
        assert!(e.log_c.abs() < 1e-10);
        assert_relative_eq!(e.r2, 1.0, epsilon = 1e-12);
        assert_relative_eq!(e.lower_envelope, 1.0, epsilon = 1e-12);
        assert_relative_eq!(e.upper_envelope, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn synthetic_square_map() {
        let xs: Vec<f64> = (0..160).map(|i| 0.5f64.powf(i as f64 * 0.125)).collect();
        let src = line_sample(&xs);
        let tgt = line_sample(&xs.iter().map(|x| x * x).collect::<Vec<_>>());
        let p = PairedSample::new(src, tgt).unwrap();
        let opts = HolderOptions { window: (1e-4, 5e-2), ..HolderOptions::default() };
        let e = estimate_holder(&p, Metric::Theta, Metric::Theta, &opts).unwrap();
        assert!((e.kappa - 2.0).abs() < 0.1, "{}", e.kappa);
        assert!((e.lower_envelope - 2.0).abs() < 0.1, "{}", e.lower_envelope);
        assert!((e.upper_envelope - 2.0).abs() < 0.1, "{}", e.upper_envelope);
    }

    #[test]
    fn holder_needs_scale_span() {
        let src = line_sample(&(0..40).map(|i| 1.0 + i as f64 * 1e-3).collect::<Vec<_>>());
        let p = PairedSample::new(src.clone(), src).unwrap();
        assert!(matches!(
            estimate_holder(&p, Metric::Theta, Metric::Theta, &HolderOptions::default()),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn obstruction_examples() {
        let g = schottky_sl2(3.0).unwrap();
        let r = self_joining_obstruction(&g, &g, 1.0, &[], 4).unwrap();
        assert!(r.discrepancy < 1e-9);
        assert!(!r.obstructed);
        let h = schottky_sl2_power(3.0, 3).unwrap();
        let r = self_joining_obstruction(&g, &h, 1.0, &[], 1).unwrap();
        assert!(r.obstructed);
        assert_relative_eq!(r.alpha2 / r.alpha1, 3.0, epsilon = 1e-9);
        assert_eq!(r.grid.len(), kappa_grid().len());
    }

    #[test]
    fn kappa_grid_is_reduced() {
        let g = kappa_grid();
        assert_eq!(g.first(), Some(&(1.0 / 12.0)));
        assert_eq!(g.last(), Some(&12.0));
        assert!(g.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn anosov_examples() {
        let one = RepresentedGroup::with_standard_names("d", vec![diag(&[3.0, 1.0 / 3.0])]).unwrap();
        let k = RootLabel::new(1, 2).unwrap();
        let f = anosov_gap_fit(&one, k, 10).unwrap();
        assert_relative_eq!(f.c, 2.0 * 3f64.ln(), epsilon = 1e-9);
        assert!(f.big_c < 1e-9);
        let g = schottky_sl2(3.0).unwrap();
        assert!(anosov_gap_fit(&g, k, 6).unwrap().c > 0.0);
        let u = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        let uni = RepresentedGroup::with_standard_names("u", vec![u]).unwrap();
        let f = anosov_gap_fit(&uni, k, 10).unwrap();
        assert_eq!(f.c, 0.0);
        assert_eq!(f.non_loxodromic, 20);
    }

    #[test]
    fn iota_of_diagonal() {
        let m = iota(&diag(&[3.0, 1.0 / 3.0]));
        for (i, want) in [27.0, 3.0, 1.0 / 3.0, 1.0 / 27.0].iter().enumerate() {
            assert_relative_eq!(m[(i, i)], *want, epsilon = 1e-12);
        }
    }

    #[test]
    fn undeformed_build_is_block_diagonal() {
        let cfg = Sl8Config { epsilon: 0.0, validation_depth: 3, ..Sl8Config::default() };
        let ex = build_sl8_example(&cfg).unwrap();
        let a = &ex.phi.generators().matrices()[0];
        assert_eq!(a.view((0, 4), (4, 4)).norm(), 0.0);
        assert_eq!(a.view((4, 0), (4, 4)).norm(), 0.0);
        assert_eq!(ex.phi.generators().matrices(), ex.phi0.generators().matrices());
        assert_eq!(ex.provenance.halvings, 0);
    }
}
