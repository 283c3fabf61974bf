//! Dense real linear algebra: singular values, eigenvalue moduli, exterior
//! powers, Plücker coordinates and overflow-free products of long words.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};
use crate::words::{Alphabet, Letter, Word};

/// `C(n, k)`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Sorted `k`-subsets of `0..d` in lexicographic order. This order indexes
/// every exterior-power and Plücker coordinate in the crate.
pub fn k_subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(d, k));
    let mut cur: Vec<usize> = (0..k).collect();
    if k > d {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < d - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Position of a sorted subset in [`k_subsets`] order.
pub fn subset_index(d: usize, subset: &[usize]) -> usize {
    // Combinatorial number system for lexicographic order.
    let k = subset.len();
    let mut idx = 0;
    let mut prev: isize = -1;
    for (i, &s) in subset.iter().enumerate() {
        for skipped in (prev + 1) as usize..s {
            idx += binomial(d - skipped - 1, k - i - 1);
        }
        prev = s as isize;
    }
    idx
}

fn sort_descending<T: Real>(v: &mut [T]) {
    v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
}

fn check_finite<T: Real>(m: &DMatrix<T>) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument("matrix has non-finite entries".into()))
    }
}

fn check_square<T: Real>(m: &DMatrix<T>) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
    }
    Ok(m.nrows())
}

/// Singular values in descending order.
pub fn singular_values<T: Real>(m: &DMatrix<T>) -> Result<Vec<T>> {
    check_square(m)?;
    check_finite(m)?;
    let mut s: Vec<T> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sort_descending(&mut s);
    let smallest = *s.last().unwrap();
    if smallest <= T::zero() || smallest <= s[0] * T::unit_roundoff() {
        return Err(Error::DegenerateMatrix);
    }
    Ok(s)
}

pub fn operator_norm<T: Real>(m: &DMatrix<T>) -> T {
    m.clone().svd(false, false).singular_values.iter().copied().fold(T::zero(), |a, b| a.max(b))
}

/// Complex spectrum as `(re, im)` pairs sorted by descending modulus.
pub fn eigenvalues<T: Real>(m: &DMatrix<T>) -> Result<Vec<(T, T)>> {
    check_square(m)?;
    check_finite(m)?;
    let schur = nalgebra::Schur::try_new(m.clone(), T::unit_roundoff(), 10_000)
        .ok_or(Error::SpectrumNotResolved)?;
    let mut ev: Vec<(T, T)> = schur.complex_eigenvalues().iter().map(|c| (c.re, c.im)).collect();
    ev.sort_by(|a, b| {
        let ma = a.0.hypot(a.1);
        let mb = b.0.hypot(b.1);
        mb.partial_cmp(&ma).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(ev)
}

/// Absolute values of the complex eigenvalues, descending.
pub fn eigenvalue_moduli<T: Real>(m: &DMatrix<T>) -> Result<Vec<T>> {
    let ev = eigenvalues(m)?;
    let mods: Vec<T> = ev.iter().map(|(re, im)| re.hypot(*im)).collect();
    if mods.last().is_some_and(|x| *x <= T::zero()) {
        return Err(Error::DegenerateMatrix);
    }
    Ok(mods)
}

fn minor<T: Real>(m: &DMatrix<T>, rows: &[usize], cols: &[usize]) -> T {
    match rows.len() {
        1 => m[(rows[0], cols[0])],
        2 => {
            m[(rows[0], cols[0])] * m[(rows[1], cols[1])]
                - m[(rows[0], cols[1])] * m[(rows[1], cols[0])]
        }
        k => DMatrix::from_fn(k, k, |i, j| m[(rows[i], cols[j])]).determinant(),
    }
}

/// `k`-th exterior power: entry `(I, J)` is the minor on rows `I`, columns `J`,
/// with subsets in lexicographic order.
pub fn exterior_power<T: Real>(m: &DMatrix<T>, k: usize) -> Result<DMatrix<T>> {
    let d = check_square(m)?;
    if k == 0 || k >= d.max(2) {
        return Err(Error::ExteriorDegree { k, d });
    }
    let subsets = k_subsets(d, k);
    let n = subsets.len();
    Ok(DMatrix::from_fn(n, n, |i, j| minor(m, &subsets[i], &subsets[j])))
}

/// Plücker vector of the column span of a `d × k` frame (not normalized).
pub fn plucker_of_frame<T: Real>(frame: &DMatrix<T>) -> DVector<T> {
    let (d, k) = frame.shape();
    let cols: Vec<usize> = (0..k).collect();
    let subsets = k_subsets(d, k);
    DVector::from_iterator(subsets.len(), subsets.iter().map(|s| minor(frame, s, &cols)))
}

/// Orthonormal basis of the column span (thin QR), columns in order.
pub fn orthonormalize<T: Real>(frame: &DMatrix<T>) -> DMatrix<T> {
    let k = frame.ncols();
    let q = frame.clone().qr().q();
    q.columns(0, k).into_owned()
}

/// Recovers an orthonormal frame for the subspace whose Plücker vector is `p`.
///
/// Uses the contraction of `p` against the dominant coordinate: for the
/// largest `|p_I|`, the vectors `j ↦ p_{I∖{i} ∪ {j}}` (signed) span the
/// subspace when `p` is decomposable.
pub fn frame_of_plucker<T: Real>(p: &DVector<T>, d: usize, k: usize) -> DMatrix<T> {
    let subsets = k_subsets(d, k);
    let (imax, _) = p.iamax_full();
    let top = &subsets[imax];
    let mut frame = DMatrix::zeros(d, k);
    for (c, &i) in top.iter().enumerate() {
        let rest: Vec<usize> = top.iter().copied().filter(|&x| x != i).collect();
        for j in 0..d {
            if rest.contains(&j) {
                continue;
            }
            let mut s = rest.clone();
            let pos = s.iter().position(|&x| x > j).unwrap_or(s.len());
            s.insert(pos, j);
            // sign of moving j from the front into sorted position
            let sign = if pos % 2 == 0 { T::one() } else { -T::one() };
            frame[(j, c)] = sign * p[subset_index(d, &s)];
        }
    }
    orthonormalize(&frame)
}

pub fn normalized<T: Real>(v: &DVector<T>) -> DVector<T> {
    let n = v.norm();
    if n > T::zero() {
        v / n
    } else {
        v.clone()
    }
}

/// Matrix stored as `exp(log_scale) · base` with `‖base‖₂ = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogScaledMatrix<T: Real> {
    pub base: DMatrix<T>,
    pub log_scale: T,
}

impl<T: Real> LogScaledMatrix<T> {
    pub fn identity(d: usize) -> Self {
        Self { base: DMatrix::identity(d, d), log_scale: T::zero() }
    }

    pub fn from_matrix(m: &DMatrix<T>) -> Result<Self> {
        let mut out = Self { base: m.clone(), log_scale: T::zero() };
        out.normalize()?;
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.base.nrows()
    }

    /// Rescales `base` to unit operator norm.
    pub fn normalize(&mut self) -> Result<()> {
        let n = operator_norm(&self.base);
        if !(n.is_finite() && n > T::zero()) {
            return Err(Error::PowerIterationUnstable);
        }
        self.base /= n;
        self.log_scale += n.ln();
        Ok(())
    }

    // Frobenius rescaling: cheap, keeps entries O(1) between letters.
    fn rescale_cheap(&mut self) -> Result<()> {
        let n = self.base.norm();
        if !(n.is_finite() && n > T::zero()) {
            return Err(Error::PowerIterationUnstable);
        }
        self.base /= n;
        self.log_scale += n.ln();
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self {
            base: &self.base * &other.base,
            log_scale: self.log_scale + other.log_scale,
        };
        out.normalize()?;
        Ok(out)
    }

    pub fn square(&self) -> Result<Self> {
        self.mul(self)
    }

    /// The represented matrix; may overflow for large scales.
    pub fn to_matrix(&self) -> DMatrix<T> {
        &self.base * self.log_scale.exp()
    }

    /// `log σ₁` of the represented matrix.
    pub fn log_norm(&self) -> T {
        self.log_scale + operator_norm(&self.base).ln()
    }
}

/// Generator matrices and their inverses, indexed by an [`Alphabet`].
#[derive(Clone, Debug)]
pub struct Generators<T: Real> {
    alphabet: Alphabet,
    mats: Vec<DMatrix<T>>,
    invs: Vec<DMatrix<T>>,
}

impl<T: Real> Generators<T> {
    pub fn new(alphabet: Alphabet, mats: Vec<DMatrix<T>>) -> Result<Self> {
        if mats.len() != alphabet.rank() {
            return Err(Error::DimensionMismatch { expected: alphabet.rank(), got: mats.len() });
        }
        let d = check_square(&mats[0])?;
        let mut invs = Vec::with_capacity(mats.len());
        for m in &mats {
            if check_square(m)? != d {
                return Err(Error::DimensionMismatch { expected: d, got: m.nrows() });
            }
            check_finite(m)?;
            invs.push(inverse(m)?);
        }
        Ok(Self { alphabet, mats, invs })
    }

    /// With inverses supplied by the caller, for letters whose inverse is
    /// known in closed form more accurately than a numerical inversion.
    pub fn with_inverses(alphabet: Alphabet, mats: Vec<DMatrix<T>>, invs: Vec<DMatrix<T>>) -> Result<Self> {
        if mats.len() != alphabet.rank() || invs.len() != mats.len() {
            return Err(Error::DimensionMismatch { expected: alphabet.rank(), got: mats.len().min(invs.len()) });
        }
        let d = check_square(&mats[0])?;
        for m in mats.iter().chain(&invs) {
            if check_square(m)? != d {
                return Err(Error::DimensionMismatch { expected: d, got: m.nrows() });
            }
            check_finite(m)?;
        }
        Ok(Self { alphabet, mats, invs })
    }

    pub fn inverses(&self) -> &[DMatrix<T>] {
        &self.invs
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn dim(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn rank(&self) -> usize {
        self.mats.len()
    }

    pub fn matrices(&self) -> &[DMatrix<T>] {
        &self.mats
    }

    pub fn letter(&self, l: Letter) -> Result<&DMatrix<T>> {
        let table = if l.inverse { &self.invs } else { &self.mats };
        table
            .get(l.generator)
            .ok_or_else(|| Error::UnknownLetter(format!("generator #{}", l.generator)))
    }

    pub fn letters<'a>(&'a self, w: &Word) -> Result<Vec<&'a DMatrix<T>>> {
        w.letters().iter().map(|&l| self.letter(l)).collect()
    }

    /// Generators of the `k`-th exterior power representation.
    pub fn exterior(&self, k: usize) -> Result<Self> {
        let mats = self.mats.iter().map(|m| exterior_power(m, k)).collect::<Result<Vec<_>>>()?;
        let invs = self.invs.iter().map(|m| exterior_power(m, k)).collect::<Result<Vec<_>>>()?;
        Ok(Self { alphabet: self.alphabet.clone(), mats, invs })
    }

    /// Contragredient representation `g ↦ g⁻ᵀ` (same words).
    pub fn dual(&self) -> Self {
        Self {
            alphabet: self.alphabet.clone(),
            mats: self.invs.iter().map(|m| m.transpose()).collect(),
            invs: self.mats.iter().map(|m| m.transpose()).collect(),
        }
    }

    /// Image under a homomorphism on the generators: `a_i ↦ f(a_i)`.
    /// `f` must be multiplicative, since inverses are mapped by `f` too.
    pub fn map(&self, f: impl Fn(&DMatrix<T>) -> DMatrix<T>) -> Result<Self> {
        Self::with_inverses(
            self.alphabet.clone(),
            self.mats.iter().map(&f).collect(),
            self.invs.iter().map(&f).collect(),
        )
    }

    /// `log |det|` of the element named by `w`.
    pub fn log_abs_det(&self, w: &Word) -> Result<T> {
        let mut s = T::zero();
        for &l in w.letters() {
            let det = self.mats[l.generator].determinant().abs().ln();
            s += if l.inverse { -det } else { det };
        }
        Ok(s)
    }

    /// Plain product of the letters; overflows for long words with large
    /// spectra. Prefer [`word_product`].
    pub fn evaluate(&self, w: &Word) -> Result<DMatrix<T>> {
        let mut acc = DMatrix::identity(self.dim(), self.dim());
        for l in self.letters(w)? {
            acc = &acc * l;
        }
        Ok(acc)
    }
}

/// Inverse; closed form in dimension 2.
pub fn inverse<T: Real>(m: &DMatrix<T>) -> Result<DMatrix<T>> {
    if m.nrows() == 2 {
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        if det == T::zero() || !det.is_finite() {
            return Err(Error::DegenerateMatrix);
        }
        return Ok(DMatrix::from_row_slice(2, 2, &[m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]]) / det);
    }
    m.clone().try_inverse().ok_or(Error::DegenerateMatrix)
}

/// Spectral data of a word from two orthogonal iterations: on the letters,
/// for the upper half of the spectrum, and on the dual letters `L⁻ᵀ`, for
/// the lower half. Each run only has to resolve directions that its letters
/// expand, which keeps full precision for badly conditioned generators.
#[derive(Clone, Debug)]
pub struct WordSpectrum<T: Real> {
    /// Logs of the eigenvalue moduli, descending.
    pub log_moduli: Vec<T>,
    pub frame: DMatrix<T>,
    /// Frame of the dual word: its first `k` columns span the annihilator of
    /// the repelling `(d−k)`-subspace.
    pub dual_frame: DMatrix<T>,
    pub converged: bool,
}

impl<T: Real> WordSpectrum<T> {
    fn half(&self) -> usize {
        self.frame.nrows().div_ceil(2)
    }

    /// Orthonormal basis of the attracting `k`-subspace.
    pub fn attracting(&self, k: usize) -> DMatrix<T> {
        let d = self.frame.nrows();
        if k <= self.half() {
            self.frame.columns(0, k).into_owned()
        } else {
            self.dual_frame.columns(d - k, k).into_owned()
        }
    }

    /// Orthonormal basis of the annihilator of the repelling
    /// `(d−k)`-subspace.
    pub fn repelling_annihilator(&self, k: usize) -> DMatrix<T> {
        let d = self.frame.nrows();
        if k <= self.half() {
            self.dual_frame.columns(0, k).into_owned()
        } else {
            self.frame.columns(d - k, k).into_owned()
        }
    }
}

pub fn word_spectrum<T: Real>(
    gens: &Generators<T>,
    dual: &Generators<T>,
    w: &Word,
    max_periods: usize,
) -> Result<WordSpectrum<T>> {
    let d = gens.dim();
    let half = d.div_ceil(2);
    // w = u c u⁻¹: iterate on the cyclic core c, then carry frames by u
    let (u, core) = w.cyclic_reduction();
    let mut fwd = orthogonal_iteration_leading(&gens.letters(&core)?, half, max_periods)?;
    let mut bwd = orthogonal_iteration_leading(&dual.letters(&core)?, half, max_periods)?;
    fwd.frame = transport(&gens.letters(&u)?, fwd.frame)?;
    bwd.frame = transport(&dual.letters(&u)?, bwd.frame)?;
    let mut log_moduli: Vec<T> = fwd.log_moduli[..half].to_vec();
    log_moduli.extend(bwd.log_moduli[..d - half].iter().rev().map(|&x| -x));
    sort_descending(&mut log_moduli);
    Ok(WordSpectrum {
        log_moduli,
        frame: fwd.frame,
        dual_frame: bwd.frame,
        converged: fwd.converged && bwd.converged,
    })
}

/// Image of a flag frame under a product of letters, one QR step per letter.
fn transport<T: Real>(letters: &[&DMatrix<T>], mut q: DMatrix<T>) -> Result<DMatrix<T>> {
    for l in letters.iter().rev() {
        let qr = (*l * &q).qr();
        let r = qr.r();
        let mut qn = qr.q();
        for i in 0..q.ncols() {
            if !r[(i, i)].is_finite() || r[(i, i)] == T::zero() {
                return Err(Error::DegenerateMatrix);
            }
            if r[(i, i)] < T::zero() {
                qn.column_mut(i).neg_mut();
            }
        }
        q = qn;
    }
    Ok(q)
}

/// Product of the letters of `w`, renormalized after every letter.
pub fn word_product<T: Real>(gens: &Generators<T>, w: &Word) -> Result<LogScaledMatrix<T>> {
    let mut acc = LogScaledMatrix::identity(gens.dim());
    for l in gens.letters(w)? {
        acc.base = &acc.base * l;
        acc.rescale_cheap()?;
    }
    acc.normalize()?;
    Ok(acc)
}

/// Result of orthogonal iteration on a cyclic product of letters.
#[derive(Clone, Debug)]
pub struct OrthoIteration<T: Real> {
    /// `log |R_ii|` accumulated over one period: the logs of the eigenvalue
    /// moduli of the product, descending.
    pub log_moduli: Vec<T>,
    /// Orthonormal Schur frame: the first `k` columns span the top-`k`
    /// invariant subspace.
    pub frame: DMatrix<T>,
    pub periods: usize,
    pub converged: bool,
}

/// Orthogonal (QR) iteration on `g = L₀ L₁ ⋯ L_{m−1}` without forming `g`.
///
/// Each letter is applied to an orthonormal frame followed by a QR step, so
/// the small eigenvalues keep full relative precision even when the product
/// has an enormous condition number.
pub fn orthogonal_iteration<T: Real>(
    letters: &[&DMatrix<T>],
    max_periods: usize,
) -> Result<OrthoIteration<T>> {
    let d = letters.first().map_or(0, |m| m.nrows());
    orthogonal_iteration_leading(letters, d, max_periods)
}

/// As [`orthogonal_iteration`], but convergence is only required of the
/// first `leading` moduli and frame columns. The trailing ones may be
/// limited by rounding when the letters are badly conditioned.
pub fn orthogonal_iteration_leading<T: Real>(
    letters: &[&DMatrix<T>],
    leading: usize,
    max_periods: usize,
) -> Result<OrthoIteration<T>> {
    let d = match letters.first() {
        Some(m) => m.nrows(),
        None => {
            return Err(Error::InvalidArgument("orthogonal iteration needs a nonempty word".into()))
        }
    };
    let leading = leading.clamp(1, d);
    let eps = T::unit_roundoff();
    let log_tol = lit::<T>(1e4) * eps;
    let frame_tol = lit::<T>(1e3) * eps;
    let noise = lit::<T>(50.0) * eps;
    let mut prev_dframe = T::zero();
    // rounding floor: changes below √eps that stop shrinking
    let loose = eps.sqrt();
    let mut best_dframe = T::max_value().unwrap();
    let mut stalled = 0usize;
    // periods in a row with shrinking frame change; a rounding floor
    // fluctuates, polynomial drift (Jordan blocks) keeps shrinking
    let mut shrinking = 0usize;
    let mut q = generic_frame::<T>(d);
    let mut history: Vec<Vec<T>> = Vec::new();
    let mut converged = false;
    let max_periods = max_periods.max(4);
    for period in 0..max_periods {
        let mut logs = vec![T::zero(); d];
        let prev_q = q.clone();
        for l in letters.iter().rev() {
            let qr = (*l * &q).qr();
            let r = qr.r();
            let mut qn = qr.q();
            for i in 0..d {
                let rii = r[(i, i)];
                if rii == T::zero() || !rii.is_finite() {
                    return Err(Error::DegenerateMatrix);
                }
                if rii < T::zero() {
                    qn.column_mut(i).neg_mut();
                }
                logs[i] += rii.abs().ln();
            }
            q = qn;
        }
        if let Some(prev) = history.last() {
            let dlog = logs[..leading]
                .iter()
                .zip(prev)
                .map(|(a, b)| (*a - *b).abs() / (T::one() + a.abs()))
                .fold(T::zero(), |a, b| a.max(b));
            let dframe = (0..leading)
                .map(|j| {
                    let dot = q.column(j).dot(&prev_q.column(j));
                    let s = if dot < T::zero() { -T::one() } else { T::one() };
                    (q.column(j) - prev_q.column(j) * s).norm()
                })
                .fold(T::zero(), |a, b| a.max(b));
            // geometric tail estimate of the remaining frame error
            let rho = if prev_dframe > T::zero() { (dframe / prev_dframe).min(lit(0.999)) } else { T::zero() };
            let tail = dframe * rho / (T::one() - rho);
            let settled = (dframe < frame_tol && tail < frame_tol) || dframe < noise;
            shrinking = if dframe < prev_dframe { shrinking + 1 } else { 0 };
            prev_dframe = dframe;
            if dframe < best_dframe * lit(0.5) {
                stalled = 0;
            } else {
                stalled += 1;
            }
            best_dframe = best_dframe.min(dframe);
            let floor = stalled >= 3 && shrinking < 8 && dframe < loose && dlog < loose;
            if period >= 3 && ((dlog < log_tol && settled) || floor) {
                converged = true;
                history.push(logs);
                break;
            }
        }
        history.push(logs);
    }
    let periods = history.len();
    let mut log_moduli = if converged {
        history.last().unwrap().clone()
    } else {
        // Ergodic average over the second half; equal moduli (complex
        // pairs) average out to the common value.
        let tail = &history[periods / 2..];
        let n: T = lit(tail.len() as f64);
        (0..d).map(|i| tail.iter().fold(T::zero(), |a, h| a + h[i]) / n).collect()
    };
    sort_descending(&mut log_moduli);
    Ok(OrthoIteration { log_moduli, frame: q, periods, converged })
}

/// Fixed orthonormal frame in general position with respect to every
/// coordinate subspace, so that iteration never stalls on an invariant one.
pub fn generic_frame<T: Real>(d: usize) -> DMatrix<T> {
    let m = DMatrix::from_fn(d, d, |i, j| {
        let x = ((i * d + j + 1) as f64 * 0.618_033_988_749_894_9).fract() - 0.5;
        lit::<T>(x + if i == j { 1.0 } else { 0.0 })
    });
    orthonormalize(&m)
}

/// Real spectral data of a matrix whose eigenvalues are all real.
#[derive(Clone, Debug)]
pub struct RealEigenbasis<T: Real> {
    /// Signed eigenvalues ordered by descending modulus.
    pub values: Vec<T>,
    /// Unit eigenvectors as columns, same order.
    pub vectors: DMatrix<T>,
}

/// Eigenvectors by null vectors of `m − λI` for each real eigenvalue.
/// Fails with [`Error::NotLoxodromic`] when a complex pair is present.
pub fn real_eigenbasis<T: Real>(m: &DMatrix<T>) -> Result<RealEigenbasis<T>> {
    let d = check_square(m)?;
    let ev = eigenvalues(m)?;
    let scale = ev[0].0.hypot(ev[0].1);
    let mut values = Vec::with_capacity(d);
    let mut vectors = DMatrix::zeros(d, d);
    for (c, &(re, im)) in ev.iter().enumerate() {
        if im.abs() > lit::<T>(1e3) * T::unit_roundoff() * scale {
            return Err(Error::NotLoxodromic);
        }
        let shifted = m - DMatrix::identity(d, d) * re;
        let svd = shifted.svd(false, true);
        let vt = svd.v_t.ok_or(Error::SpectrumNotResolved)?;
        let (imin, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .fold((0, T::max_value().unwrap()), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
        let mut v: DVector<T> = vt.row(imin).transpose();
        let (imax, _) = v.iamax_full();
        if v[imax] < T::zero() {
            v.neg_mut();
        }
        vectors.set_column(c, &normalized(&v));
        values.push(re);
    }
    Ok(RealEigenbasis { values, vectors })
}

/// 2-norm condition number.
pub fn condition_number<T: Real>(m: &DMatrix<T>) -> T {
    let s = m.clone().svd(false, false).singular_values;
    let max = s.iter().copied().fold(T::zero(), |a, b| a.max(b));
    let min = s.iter().copied().fold(T::max_value().unwrap(), |a, b| a.min(b));
    max / min
}

/// `Symⁿ` of a 2×2 matrix in the basis `√C(n,j) xⁿ⁻ʲ yʲ`, orthonormal for
/// the induced inner product, so rotations map to orthogonal matrices and
/// `diag(s, 1/s) ↦ diag(sⁿ, sⁿ⁻², …, s⁻ⁿ)`.
pub fn symmetric_power<T: Real>(g: &DMatrix<T>, n: usize) -> Result<DMatrix<T>> {
    if g.nrows() != 2 || g.ncols() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: g.nrows() });
    }
    let (a, b, c, d) = (g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]);
    let mut out = DMatrix::zeros(n + 1, n + 1);
    for j in 0..=n {
        // (a x + b y)^(n−j) (c x + d y)^j as coefficients of x^(n−i) y^i
        let mut poly = vec![T::one()];
        for t in 0..n {
            let (p, q) = if t < n - j { (a, b) } else { (c, d) };
            let mut next = vec![T::zero(); poly.len() + 1];
            for (i, &v) in poly.iter().enumerate() {
                next[i] += v * p;
                next[i + 1] += v * q;
            }
            poly = next;
        }
        for (i, &v) in poly.iter().enumerate() {
            let w: T = lit((binomial(n, j) as f64 / binomial(n, i) as f64).sqrt());
            out[(j, i)] = v * w;
        }
    }
    Ok(out)
}

/// Block-diagonal matrix.
pub fn block_diagonal<T: Real>(blocks: &[&DMatrix<T>]) -> DMatrix<T> {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(n, n);
    let mut o = 0;
    for b in blocks {
        out.view_mut((o, o), (b.nrows(), b.ncols())).copy_from(b);
        o += b.nrows();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn m(rows: usize, data: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows, data.len() / rows, data)
    }

    #[test]
    fn subsets_are_lexicographic() {
        let s = k_subsets(4, 2);
        assert_eq!(s, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        for (i, sub) in k_subsets(8, 3).iter().enumerate() {
            assert_eq!(subset_index(8, sub), i);
        }
        assert_eq!(k_subsets(8, 3).len(), 56);
    }

    #[test]
    fn singular_values_examples() {
        assert_eq!(singular_values(&DMatrix::<f64>::identity(3, 3)).unwrap(), vec![1.0; 3]);
        let s = singular_values(&m(2, &[2.0, 0.0, 0.0, 0.5])).unwrap();
        assert_relative_eq!(s[0], 2.0, epsilon = 1e-14);
        assert_relative_eq!(s[1], 0.5, epsilon = 1e-14);
        // eigenvalues of g gᵀ = [[2,1],[1,1]] are (3 ± √5)/2
        let s = singular_values(&m(2, &[1.0, 1.0, 0.0, 1.0])).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert_relative_eq!(s[0], ((3.0 + 5f64.sqrt()) / 2.0).sqrt(), epsilon = 1e-14);
        assert_relative_eq!(s[0], phi, epsilon = 1e-14);
        assert_relative_eq!(s[1], 1.0 / phi, epsilon = 1e-14);
    }

    #[test]
    fn singular_input_is_rejected() {
        assert_eq!(singular_values(&m(2, &[1.0, 2.0, 2.0, 4.0])), Err(Error::DegenerateMatrix));
    }

    #[test]
    fn eigenvalue_moduli_examples() {
        let e = eigenvalue_moduli(&DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 3.0, 1.0 / 3.0])))
            .unwrap();
        assert_relative_eq!(e[0], 3.0, epsilon = 1e-14);
        assert_relative_eq!(e[1], 1.0, epsilon = 1e-14);
        assert_relative_eq!(e[2], 1.0 / 3.0, epsilon = 1e-14);
        let e = eigenvalue_moduli(&m(2, &[1.0, 1.0, 0.0, 1.0])).unwrap();
        assert_relative_eq!(e[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(e[1], 1.0, epsilon = 1e-12);
        // x² − 3x + 1
        let e = eigenvalue_moduli(&m(2, &[2.0, 1.0, 1.0, 1.0])).unwrap();
        assert_relative_eq!(e[0], (3.0 + 5f64.sqrt()) / 2.0, epsilon = 1e-13);
        assert_relative_eq!(e[1], (3.0 - 5f64.sqrt()) / 2.0, epsilon = 1e-13);
    }

    #[test]
    fn rotation_moduli_are_equal() {
        let e = eigenvalue_moduli(&m(2, &[0.0, -1.0, 1.0, 0.0])).unwrap();
        assert_relative_eq!(e[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(e[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn exterior_power_examples() {
        let (a, b, c) = (2.0, 3.0, 5.0);
        let g = DMatrix::from_diagonal(&DVector::from_vec(vec![a, b, c]));
        let w = exterior_power(&g, 2).unwrap();
        assert_eq!(w, DMatrix::from_diagonal(&DVector::from_vec(vec![a * b, a * c, b * c])));
        let id8 = DMatrix::<f64>::identity(8, 8);
        let w = exterior_power(&id8, 3).unwrap();
        assert_eq!(w.shape(), (56, 56));
        assert_eq!(w, DMatrix::identity(56, 56));
        assert!(matches!(exterior_power(&id8, 8), Err(Error::ExteriorDegree { .. })));
        assert!(matches!(exterior_power(&id8, 0), Err(Error::ExteriorDegree { .. })));
    }

    #[test]
    fn plucker_frame_roundtrip() {
        let f = m(4, &[1.0, 0.3, 2.0, -1.0, 0.5, 0.5, -0.2, 1.5]);
        let p = normalized(&plucker_of_frame(&f));
        let g = frame_of_plucker(&p, 4, 2);
        let q = normalized(&plucker_of_frame(&g));
        let same = (&p - &q).norm().min((&p + &q).norm());
        assert!(same < 1e-12, "{same}");
    }

    #[test]
    fn word_product_examples() {
        let al = Alphabet::standard(1);
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0 / 3.0]));
        let gens = Generators::new(al.clone(), vec![a]).unwrap();
        let e = word_product(&gens, &Word::identity()).unwrap();
        assert_eq!(e.base, DMatrix::identity(2, 2));
        assert_eq!(e.log_scale, 0.0);
        let w = al.parse("a").unwrap().pow(60);
        let p = word_product(&gens, &w).unwrap();
        assert_relative_eq!(p.log_norm(), 60.0 * 3f64.ln(), max_relative = 1e-8);
        assert_relative_eq!(operator_norm(&p.base), 1.0, epsilon = 1e-9);
        assert!(matches!(gens.letter(Letter::new(3, false)), Err(Error::UnknownLetter(_))));
    }

    #[test]
    fn orthogonal_iteration_recovers_spectrum() {
        let g = m(3, &[2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0]);
        let it = orthogonal_iteration(&[&g], 10_000).unwrap();
        let e = eigenvalue_moduli(&g).unwrap();
        for (a, b) in it.log_moduli.iter().zip(&e) {
            assert_relative_eq!(*a, b.ln(), epsilon = 1e-10);
        }
        assert!(it.converged);
    }

    #[test]
    fn real_eigenbasis_diagonalizes() {
        let g = m(3, &[2.0, 1.0, 0.5, 0.0, -3.0, 1.0, 0.0, 0.0, 0.25]);
        let eb = real_eigenbasis(&g).unwrap();
        for (c, &l) in eb.values.iter().enumerate() {
            let v = eb.vectors.column(c);
            assert!((&g * v - v * l).norm() < 1e-12);
        }
        assert_relative_eq!(eb.values[0], -3.0, epsilon = 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        let g = DMatrix::<f32>::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]);
        let e = eigenvalue_moduli(&g).unwrap();
        assert!((e[0] - 2.618034).abs() < 1e-5);
        let s = singular_values(&g).unwrap();
        assert!((s[0] * s[1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn symmetric_power_examples() {
        let s = 3.0;
        let g = DMatrix::from_row_slice(2, 2, &[s, 0.0, 0.0, 1.0 / s]);
        let m = symmetric_power(&g, 3).unwrap();
        let want = [27.0, 3.0, 1.0 / 3.0, 1.0 / 27.0];
        for i in 0..4 {
            for j in 0..4 {
                let w = if i == j { want[i] } else { 0.0 };
                assert_relative_eq!(m[(i, j)], w, epsilon = 1e-12);
            }
        }
        let t = 0.3f64;
        let r = DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        let q = symmetric_power(&r, 3).unwrap();
        assert!((&q.transpose() * &q - DMatrix::identity(4, 4)).norm() < 1e-14);
        let h = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.5, 3.0]);
        let lhs = symmetric_power(&(&h * &r), 3).unwrap();
        let rhs = symmetric_power(&h, 3).unwrap() * symmetric_power(&r, 3).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
        assert_relative_eq!(symmetric_power(&h, 3).unwrap().determinant(), h.determinant().powi(6), epsilon = 1e-9);
    }
}
