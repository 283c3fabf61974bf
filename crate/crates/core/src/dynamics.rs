//! Represented free groups acting on flag varieties: limit-set samples,
//! limit-cone samples, projective contraction rates and antipodality.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flag::{
    act, attracting_fixed_point, flag_distance_theta, plucker_distance, transversality_witness,
    FlagPoint, FlagType,
};
use crate::matlin::{condition_number, plucker_of_frame, word_product, word_spectrum, Generators, WordSpectrum};
use crate::tits::{pi_projections, weight_split_for};
use crate::weyl::{
    loxodromy_of, RootLabel, WeylVector, DEFAULT_GAP_TOLERANCE, MAX_PERIODS,
};
use crate::words::{enumerate_words, Alphabet, Word, WORD_CAP};

/// Tolerance on `log |det|` for generators of SL(d, R).
pub const SL_TOLERANCE: f64 = 1e-9;

/// Regression window for contraction experiments, in `d_α`.
pub const CONTRACTION_WINDOW: (f64, f64) = (1e-10, 1e-2);

/// A free group given by matrices in SL(d, R) for its generators.
#[derive(Clone, Debug)]
pub struct RepresentedGroup {
    pub name: String,
    gens: Generators<f64>,
    dual: Generators<f64>,
    gap_tolerance: f64,
}

impl RepresentedGroup {
    pub fn new(name: impl Into<String>, alphabet: Alphabet, mats: Vec<DMatrix<f64>>) -> Result<Self> {
        Self::from_generators(name, Generators::new(alphabet, mats)?)
    }

    /// Standard alphabet `a, b, …`.
    pub fn with_standard_names(name: impl Into<String>, mats: Vec<DMatrix<f64>>) -> Result<Self> {
        let n = mats.len();
        Self::new(name, Alphabet::standard(n), mats)
    }

    pub fn from_generators(name: impl Into<String>, gens: Generators<f64>) -> Result<Self> {
        for (i, m) in gens.matrices().iter().enumerate() {
            // the computed determinant is only accurate to ~ eps · cond(m)
            let det = m.determinant();
            let tol = SL_TOLERANCE + 64.0 * f64::EPSILON * condition_number(m);
            if !((det - 1.0).abs() < tol) {
                return Err(Error::InvalidArgument(format!(
                    "generator `{}` is not in SL({}) (det = {det})",
                    gens.alphabet().names()[i],
                    gens.dim(),
                )));
            }
        }
        let dual = gens.dual();
        Ok(Self { name: name.into(), gens, dual, gap_tolerance: DEFAULT_GAP_TOLERANCE })
    }

    /// Minimum root gap for a word to count as loxodromic.
    pub fn with_gap_tolerance(mut self, tol: f64) -> Self {
        self.gap_tolerance = tol;
        self
    }

    pub fn gap_tolerance(&self) -> f64 {
        self.gap_tolerance
    }

    pub fn dim(&self) -> usize {
        self.gens.dim()
    }

    pub fn rank(&self) -> usize {
        self.gens.rank()
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.gens.alphabet()
    }

    pub fn generators(&self) -> &Generators<f64> {
        &self.gens
    }

    /// Image under the homomorphism `a_i ↦ f(a_i)`, with the same alphabet.
    pub fn map(&self, name: impl Into<String>, f: impl Fn(&DMatrix<f64>) -> DMatrix<f64>) -> Result<Self> {
        Ok(Self::from_generators(name, self.gens.map(f)?)?.with_gap_tolerance(self.gap_tolerance))
    }

    /// `∧ᵏ` of the group, as a group in SL(C(d,k)).
    pub fn exterior(&self, k: usize) -> Result<Self> {
        Ok(Self::from_generators(format!("{}^{k}", self.name), self.gens.exterior(k)?)?.with_gap_tolerance(self.gap_tolerance))
    }

    pub fn evaluate(&self, w: &Word) -> Result<DMatrix<f64>> {
        self.gens.evaluate(w)
    }

    pub fn words(&self, max_len: usize) -> Result<Vec<Word>> {
        enumerate_words(self.rank(), max_len, WORD_CAP)
    }

    pub fn format(&self, w: &Word) -> String {
        self.alphabet().format(w)
    }

    pub fn jordan(&self, w: &Word) -> Result<WeylVector<f64>> {
        Ok(WeylVector::from_coords(self.spectrum(w)?.log_moduli))
    }

    /// Spectrum and invariant frames of `w`, without forming its matrix.
    pub fn spectrum(&self, w: &Word) -> Result<WordSpectrum<f64>> {
        if w.is_empty() {
            return Err(Error::InvalidArgument("identity word".into()));
        }
        word_spectrum(&self.gens, &self.dual, w, MAX_PERIODS)
    }

    /// Attracting flag of the element `w`.
    pub fn attracting_flag(&self, w: &Word, ty: &FlagType) -> Result<FlagPoint<f64>> {
        if w.is_empty() {
            return Err(Error::NotLoxodromic);
        }
        let sp = self.spectrum(w)?;
        if !sp.converged || !self.is_loxodromic_spectrum(&sp) {
            return Err(Error::NotLoxodromic);
        }
        flag_of_spectrum(&sp, ty)
    }

    pub fn is_loxodromic_spectrum(&self, sp: &WordSpectrum<f64>) -> bool {
        let lambda = WeylVector::from_coords(sp.log_moduli.clone());
        loxodromy_of(&lambda, self.gap_tolerance).loxodromic
    }
}

/// Attracting flag of type `ty` from the frames of a word spectrum.
pub fn flag_of_spectrum(sp: &WordSpectrum<f64>, ty: &FlagType) -> Result<FlagPoint<f64>> {
    let comps = ty.theta().iter().map(|&k| plucker_of_frame(&sp.attracting(k))).collect();
    FlagPoint::from_components(ty.clone(), comps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMethod {
    FixedPoint,
    Cartan,
}

#[derive(Clone, Debug)]
pub struct LimitSample {
    pub flag_type: FlagType,
    pub method: SampleMethod,
    pub points: Vec<(Word, FlagPoint<f64>)>,
    pub skipped: usize,
    /// Minimum root gap required of Cartan-sampled words.
    pub threshold: Option<f64>,
}

impl LimitSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, w: &Word) -> Option<&FlagPoint<f64>> {
        self.points.binary_search_by(|(u, _)| u.cmp(w)).ok().map(|i| &self.points[i].1)
    }
}

/// Attracting fixed points of the loxodromic words of length `≤ max_len`.
pub fn sample_limit_set_fixed_points(g: &RepresentedGroup, ty: &FlagType, max_len: usize) -> Result<LimitSample> {
    check_type(g, ty)?;
    let words = g.words(max_len)?;
    sample_fixed_points_of(g, ty, words)
}

/// Fixed-point sample over an explicit word list (sorted on output).
pub fn sample_fixed_points_of(g: &RepresentedGroup, ty: &FlagType, mut words: Vec<Word>) -> Result<LimitSample> {
    words.sort();
    let found: Vec<Option<(Word, FlagPoint<f64>)>> = words
        .into_par_iter()
        .map(|w| g.attracting_flag(&w, ty).ok().map(|p| (w, p)))
        .collect();
    let skipped = found.iter().filter(|p| p.is_none()).count();
    Ok(LimitSample {
        flag_type: ty.clone(),
        method: SampleMethod::FixedPoint,
        points: found.into_iter().flatten().collect(),
        skipped,
        threshold: None,
    })
}

/// Cartan point of `w`: for each `k ∈ θ`, the top left singular vector of
/// `∧ᵏ w`, together with `min_k α_k(μ(w))`.
fn cartan_point(ext: &[(usize, Generators<f64>)], ty: &FlagType, w: &Word) -> Result<(FlagPoint<f64>, f64)> {
    let mut comps = Vec::with_capacity(ext.len());
    let mut gap = f64::INFINITY;
    for (_, gk) in ext {
        let p = word_product(gk, w)?;
        let svd = p.base.svd(true, false);
        let u = svd.u.ok_or(Error::SpectrumNotResolved)?;
        let s = &svd.singular_values;
        let (i0, i1) = top_two(s.as_slice());
        gap = gap.min((s[i0] / s[i1]).ln());
        comps.push(u.column(i0).into_owned());
    }
    Ok((FlagPoint::from_components(ty.clone(), comps)?, gap))
}

fn top_two(s: &[f64]) -> (usize, usize) {
    let mut idx: Vec<usize> = (0..s.len()).collect();
    idx.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    (idx[0], idx[1])
}

/// Leading singular flags of words of length `≤ max_len` whose smallest root
/// gap `min_{k∈θ} α_k(μ)` is at least `min_gap`.
pub fn sample_limit_set_cartan(
    g: &RepresentedGroup,
    ty: &FlagType,
    max_len: usize,
    min_gap: f64,
) -> Result<LimitSample> {
    check_type(g, ty)?;
    let threshold = min_gap.max(g.gap_tolerance);
    let ext = ty
        .theta()
        .iter()
        .map(|&k| Ok((k, if k == 1 { g.gens.clone() } else { g.gens.exterior(k)? })))
        .collect::<Result<Vec<_>>>()?;
    let words = g.words(max_len)?;
    let found: Vec<Option<(Word, FlagPoint<f64>)>> = words
        .into_par_iter()
        .map(|w| match cartan_point(&ext, ty, &w) {
            Ok((p, gap)) if gap >= threshold => Some((w, p)),
            _ => None,
        })
        .collect();
    let skipped = found.iter().filter(|p| p.is_none()).count();
    Ok(LimitSample {
        flag_type: ty.clone(),
        method: SampleMethod::Cartan,
        points: found.into_iter().flatten().collect(),
        skipped,
        threshold: Some(threshold),
    })
}

fn check_type(g: &RepresentedGroup, ty: &FlagType) -> Result<()> {
    if ty.dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: ty.dim() });
    }
    Ok(())
}

/// Hausdorff distance between two samples of the same flag type in `d_θ`.
pub fn hausdorff_distance(a: &LimitSample, b: &LimitSample) -> Result<f64> {
    if a.flag_type != b.flag_type {
        return Err(Error::FlagTypeMismatch("samples of different flag types".into()));
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("empty sample".into()));
    }
    let pa: Vec<&FlagPoint<f64>> = a.points.iter().map(|(_, p)| p).collect();
    let pb: Vec<&FlagPoint<f64>> = b.points.iter().map(|(_, p)| p).collect();
    Ok(directed_hausdorff(&pa, &pb)?.max(directed_hausdorff(&pb, &pa)?))
}

fn directed_hausdorff(a: &[&FlagPoint<f64>], b: &[&FlagPoint<f64>]) -> Result<f64> {
    if a[0].components().len() == 1 {
        let index = LineIndex::new(b.iter().map(|p| &p.components()[0]));
        let d: Vec<f64> = a.par_iter().map(|p| index.nearest(&p.components()[0])).collect();
        return Ok(d.into_iter().fold(0.0_f64, f64::max));
    }
    let d: Vec<Result<f64>> = a
        .par_iter()
        .map(|p| {
            b.iter()
                .map(|q| flag_distance_theta(p, q))
                .try_fold(f64::INFINITY, |m, x| x.map(|x| m.min(x)))
        })
        .collect();
    d.into_iter().try_fold(0.0_f64, |m, x| x.map(|x| m.max(x)))
}

/// Nearest-line search: unit vectors and their negatives sorted by their
/// projection on a fixed direction, scanned outward from the query.
struct LineIndex {
    dir: DVector<f64>,
    keys: Vec<f64>,
    vecs: Vec<DVector<f64>>,
}

impl LineIndex {
    fn new<'a>(vs: impl Iterator<Item = &'a DVector<f64>>) -> Self {
        let mut entries: Vec<(f64, DVector<f64>)> = Vec::new();
        let mut dir: Option<DVector<f64>> = None;
        for v in vs {
            let dir = dir.get_or_insert_with(|| {
                let n = v.len();
                let d = DVector::from_fn(n, |i, _| 1.0 + (i as f64 * 0.754_877_666).fract());
                d.normalize()
            });
            let v = v.normalize();
            entries.push((dir.dot(&v), v.clone()));
            entries.push((-dir.dot(&v), -v));
        }
        entries.sort_by(|x, y| x.0.total_cmp(&y.0));
        let (keys, vecs) = entries.into_iter().unzip();
        Self { dir: dir.unwrap_or_else(|| DVector::zeros(0)), keys, vecs }
    }

    /// `d_α` from `q` to the nearest stored line.
    fn nearest(&self, q: &DVector<f64>) -> f64 {
        let q = q.normalize();
        let key = self.dir.dot(&q);
        let start = self.keys.partition_point(|&k| k < key);
        let mut best = f64::INFINITY;
        let mut i = start;
        while i < self.keys.len() && self.keys[i] - key < best {
            best = best.min((&self.vecs[i] - &q).norm());
            i += 1;
        }
        let mut i = start;
        while i > 0 && key - self.keys[i - 1] < best {
            best = best.min((&self.vecs[i - 1] - &q).norm());
            i -= 1;
        }
        // chordal distance 2 sin(φ/2) to sin φ, φ ≤ π/2
        (best * (1.0 - best * best / 4.0).max(0.0).sqrt()).min(1.0)
    }
}

#[derive(Clone, Debug)]
pub struct ConeSample {
    pub rays: Vec<(Word, WeylVector<f64>)>,
    pub skipped: usize,
}

/// Normalized Jordan projections of loxodromic words of length `≤ max_len`.
pub fn limit_cone_sample(g: &RepresentedGroup, max_len: usize) -> Result<ConeSample> {
    let words = g.words(max_len)?;
    let found: Vec<Option<(Word, WeylVector<f64>)>> = words
        .into_par_iter()
        .map(|w| {
            let it = g.spectrum(&w).ok()?;
            let lambda = WeylVector::from_coords(it.log_moduli);
            let lox = loxodromy_of(&lambda, g.gap_tolerance).loxodromic;
            (it.converged && lox).then(|| (w, lambda.normalized()))
        })
        .collect();
    let skipped = found.iter().filter(|r| r.is_none()).count();
    Ok(ConeSample { rays: found.into_iter().flatten().collect(), skipped })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeInterior {
    pub hull_dim: usize,
    pub angular_width: f64,
}

/// Singular values below this (relative to `√n`) count as zero.
pub const HULL_RANK_TOLERANCE: f64 = 1e-7;

/// Affine dimension of the unit ray endpoints, and a thickness proxy: the
/// smallest singular value of the ray matrix restricted to the sum-zero
/// plane, divided by `√n`. The proxy is positive exactly when the rays span
/// the whole Cartan subspace.
pub fn cone_interior_check(c: &ConeSample) -> Result<ConeInterior> {
    let n = c.rays.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty cone sample".into()));
    }
    let d = c.rays[0].1.dim();
    let basis = sum_zero_basis(d);
    let rows = DMatrix::<f64>::from_fn(n, d - 1, |i, j| {
        let r = c.rays[i].1.coords();
        (0..d).map(|t| r[t] * basis[(t, j)]).sum::<f64>()
    });
    let scale = (n as f64).sqrt();
    let mut centered = rows.clone();
    let mean = rows.row_mean();
    for mut r in centered.row_iter_mut() {
        r -= &mean;
    }
    let hull_dim = if n == 1 {
        0
    } else {
        centered
            .singular_values()
            .iter()
            .filter(|&&s| s > HULL_RANK_TOLERANCE * scale)
            .count()
    };
    let sv = rows.singular_values();
    let angular_width = if n < d - 1 { 0.0 } else { sv.iter().copied().fold(f64::INFINITY, f64::min) / scale };
    Ok(ConeInterior { hull_dim, angular_width })
}

/// Orthonormal basis of `{u : Σ u_i = 0}` as columns.
fn sum_zero_basis(d: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(d, d - 1, |i, j| {
        if i == j {
            1.0
        } else if i == j + 1 {
            -1.0
        } else {
            0.0
        }
    });
    m.qr().q()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionResult {
    pub slope: f64,
    pub intercept: f64,
    pub points_used: usize,
    pub predicted: f64,
    /// `(π₁, π₂)` magnitudes; `None` when the eigenbasis is too ill
    /// conditioned to trust.
    pub pi: Option<(f64, f64)>,
    pub samples: Vec<(usize, f64)>,
}

/// Least-squares slope of `log d_α(gⁿξ, y_α^g)` against `n` for `n ≤ n_max`,
/// restricted to `d_α` inside [`CONTRACTION_WINDOW`].
pub fn contraction_experiment(g: &DMatrix<f64>, xi: &FlagPoint<f64>, k: RootLabel, n_max: usize) -> Result<ContractionResult> {
    contraction_experiment_in(g, xi, k, n_max, CONTRACTION_WINDOW)
}

pub fn contraction_experiment_in(
    g: &DMatrix<f64>,
    xi: &FlagPoint<f64>,
    k: RootLabel,
    n_max: usize,
    window: (f64, f64),
) -> Result<ContractionResult> {
    let d = g.nrows();
    let ty = FlagType::single(d, k.index())?;
    let start = FlagPoint::from_components(
        ty.clone(),
        vec![xi
            .component(k.index())
            .cloned()
            .ok_or_else(|| Error::FlagTypeMismatch(format!("ξ has no {}-subspace", k.index())))?],
    )?;
    let split = weight_split_for(g, k)?;
    let y = attracting_fixed_point(g, &ty)?;
    let lambda = crate::weyl::jordan_projection(g)?;
    let predicted = -crate::weyl::simple_root_value(&lambda, k);
    let pi = pi_projections(&split, &start).ok();
    let wg = if k.index() == 1 { g.clone() } else { crate::matlin::exterior_power(g, k.index())? };
    let target = &y.components()[0];
    let mut v = start.components()[0].clone();
    let mut samples = Vec::new();
    for n in 0..=n_max {
        if n > 0 {
            v = (&wg * &v).normalize();
        }
        let dist = plucker_distance(&v, target);
        if dist >= window.0 && dist <= window.1 {
            samples.push((n, dist));
        } else if dist < window.0 {
            break;
        }
    }
    if samples.len() < 4 {
        return Err(Error::InsufficientDecayWindow { usable: samples.len() });
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.0 as f64).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let fit = linear_fit(&xs, &ys);
    Ok(ContractionResult { slope: fit.slope, intercept: fit.intercept, points_used: samples.len(), predicted, pi, samples })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let r2 = if sxx > 0.0 && syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    LinearFit { slope, intercept: my - slope * mx, r2 }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AntipodalityReport {
    pub min_witness: f64,
    pub min_pair: Option<(String, String)>,
    pub pairs_checked: usize,
    pub violating: Vec<(String, String, f64)>,
}

/// Cap on the violating pairs listed in a report.
pub const MAX_LISTED_VIOLATIONS: usize = 100;

/// Minimum general-position witness between `s` (type `{k}`) and `s2` (type
/// `{d−k}`) over all pairs of words with different primitive roots. Pairs
/// at or below `threshold` are listed as violations.
/// Pairs sharing a primitive root have equal attracting points and are
/// skipped.
pub fn antipodality_audit(
    g: &RepresentedGroup,
    s: &LimitSample,
    s2: &LimitSample,
    threshold: f64,
) -> Result<AntipodalityReport> {
    let (ta, tb) = (s.flag_type.theta(), s2.flag_type.theta());
    let d = s.flag_type.dim();
    if ta.len() != 1 || tb.len() != 1 || ta[0] + tb[0] != d || s2.flag_type.dim() != d {
        return Err(Error::FlagTypeMismatch("antipodality needs types {k} and {d-k}".into()));
    }
    let prep = |smp: &LimitSample, k: usize| -> Result<Vec<(Word, DMatrix<f64>)>> {
        smp.points
            .iter()
            .map(|(w, p)| Ok((w.primitive_root().0, p.subspace_frame(k)?)))
            .collect()
    };
    let fa = prep(s, ta[0])?;
    let fb = prep(s2, tb[0])?;
    let rows: Vec<Result<(f64, Option<(usize, usize)>, usize, Vec<(usize, usize, f64)>)>> = (0..fa.len())
        .into_par_iter()
        .map(|i| {
            let mut best = (f64::INFINITY, None);
            let mut count = 0;
            let mut bad = Vec::new();
            for (j, (rb, fbj)) in fb.iter().enumerate() {
                if *rb == fa[i].0 {
                    continue;
                }
                let w = transversality_witness(&[fa[i].1.clone(), fbj.clone()])?;
                count += 1;
                if w < best.0 {
                    best = (w, Some((i, j)));
                }
                if w <= threshold && bad.len() < MAX_LISTED_VIOLATIONS {
                    bad.push((i, j, w));
                }
            }
            Ok((best.0, best.1, count, bad))
        })
        .collect();
    let mut report = AntipodalityReport { min_witness: f64::INFINITY, min_pair: None, pairs_checked: 0, violating: Vec::new() };
    for r in rows {
        let (w, pair, count, bad) = r?;
        report.pairs_checked += count;
        if w < report.min_witness {
            report.min_witness = w;
            report.min_pair = pair.map(|(i, j)| (g.format(&s.points[i].0), g.format(&s2.points[j].0)));
        }
        for (i, j, w) in bad {
            if report.violating.len() < MAX_LISTED_VIOLATIONS {
                report.violating.push((g.format(&s.points[i].0), g.format(&s2.points[j].0), w));
            }
        }
    }
    Ok(report)
}

/// The `α_k`-gap conjugation check: `point(v w v⁻¹)` against `v · point(w)`.
pub fn equivariance_defect(g: &RepresentedGroup, w: &Word, v: &Word, ty: &FlagType) -> Result<f64> {
    let p = g.attracting_flag(&w.conjugate_by(v), ty)?;
    let q = act(&g.evaluate(v)?, &g.attracting_flag(w, ty)?)?;
    flag_distance_theta(&p, &q)
}

/// CSV: `word`, then the Plücker coordinates of each component in wedge
/// order, as columns `p{k}_{i}`.
pub fn write_limit_sample_csv(g: &RepresentedGroup, s: &LimitSample, out: &mut impl Write) -> std::io::Result<()> {
    let mut header = vec!["word".to_string()];
    for (&k, c) in s.flag_type.theta().iter().zip(s.points.first().map(|p| p.1.components()).unwrap_or(&[])) {
        header.extend((0..c.len()).map(|i| format!("p{k}_{i}")));
    }
    writeln!(out, "{}", header.join(","))?;
    for (w, p) in &s.points {
        let mut row = vec![g.format(w)];
        for c in p.components() {
            row.extend(c.iter().map(|x| fmt_float(*x)));
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// CSV: `word`, then `l1 … ld`.
pub fn write_cone_sample_csv(g: &RepresentedGroup, c: &ConeSample, out: &mut impl Write) -> std::io::Result<()> {
    let d = c.rays.first().map_or(g.dim(), |r| r.1.dim());
    let header: Vec<String> = std::iter::once("word".to_string()).chain((1..=d).map(|i| format!("l{i}"))).collect();
    writeln!(out, "{}", header.join(","))?;
    for (w, r) in &c.rays {
        let row: Vec<String> = std::iter::once(g.format(w)).chain(r.coords().iter().map(|x| fmt_float(*x))).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Seventeen significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}
