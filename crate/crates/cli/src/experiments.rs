//! One function per subcommand. Each returns its JSON results and data
//! files; [`run`] validates the shared settings, writes the files and the
//! report.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use serde_json::{json, Value};

use flaglab::dynamics::{
    antipodality_audit, cone_interior_check, contraction_experiment_in, fmt_float, hausdorff_distance, limit_cone_sample,
    sample_limit_set_cartan, sample_limit_set_fixed_points, write_cone_sample_csv, write_limit_sample_csv,
    RepresentedGroup,
};
use flaglab::extended::contraction_experiment_extended;
use flaglab::flag::{FlagPoint, FlagType};
use flaglab::holder::{
    build_sl8_example, estimate_holder, self_joining_obstruction, verify_sl8, HolderOptions, PairedSample, Sl8Config,
    VerifyOptions,
};
use flaglab::presets::random_sl;
use flaglab::tits::{pi_projections, weight_split_for};
use flaglab::weyl::{cartan_projection_word, jordan_projection, jordan_projection_stable, loxodromy_of, RootLabel};
use flaglab::words::{random_word, Word};

use crate::config::{ExperimentConfig, GroupSpec, Loaded};
use crate::report::{finish, Outputs, RunReport};
use crate::{CliError, Op};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subcommand {
    Cartan,
    Jordan,
    LimitSet,
    LimitCone,
    Contract,
    Holder,
    Obstruct,
    Sl8,
    Antipodal,
}

impl Subcommand {
    pub const ALL: [Subcommand; 9] = [
        Subcommand::Cartan,
        Subcommand::Jordan,
        Subcommand::LimitSet,
        Subcommand::LimitCone,
        Subcommand::Contract,
        Subcommand::Holder,
        Subcommand::Obstruct,
        Subcommand::Sl8,
        Subcommand::Antipodal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Cartan => "cartan",
            Subcommand::Jordan => "jordan",
            Subcommand::LimitSet => "limit-set",
            Subcommand::LimitCone => "limit-cone",
            Subcommand::Contract => "contract",
            Subcommand::Holder => "holder",
            Subcommand::Obstruct => "obstruct",
            Subcommand::Sl8 => "sl8",
            Subcommand::Antipodal => "antipodal",
        }
    }

    fn default_depth(self) -> usize {
        if self == Subcommand::Sl8 {
            6
        } else {
            8
        }
    }
}

/// Shared state handed to each experiment. `echo` starts as the parsed
/// configuration and collects every default the experiment relies on.
struct Ctx<'a> {
    loaded: &'a Loaded,
    echo: ExperimentConfig,
    seed: u64,
    depth: usize,
    out: Outputs,
}

/// Runs `cmd` and writes its files and `report.json` into `out_dir`, or
/// into the configured output directory when `out_dir` is `None`.
pub fn run(cmd: Subcommand, loaded: &Loaded, out_dir: Option<&Path>) -> Result<RunReport, CliError> {
    let started = Instant::now();
    loaded.check_tolerances()?;
    let seed = loaded.seed()?;
    let depth = loaded.depth(cmd.default_depth())?;
    let dir: PathBuf = out_dir
        .map(Path::to_path_buf)
        .or_else(|| loaded.config.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let mut echo = loaded.config.clone();
    echo.seed = Some(seed);
    echo.depth = Some(depth);
    echo.out = Some(dir.clone());
    let mut ctx = Ctx { loaded, echo, seed, depth, out: Outputs::default() };
    let results = match cmd {
        Subcommand::Cartan => cartan(&mut ctx),
        Subcommand::Jordan => jordan(&mut ctx),
        Subcommand::LimitSet => limit_set(&mut ctx),
        Subcommand::LimitCone => limit_cone(&mut ctx),
        Subcommand::Contract => contract(&mut ctx),
        Subcommand::Holder => holder(&mut ctx),
        Subcommand::Obstruct => obstruct(&mut ctx),
        Subcommand::Sl8 => sl8(&mut ctx),
        Subcommand::Antipodal => antipodal(&mut ctx),
    }?;
    let config = to_json(&ctx.echo)?;
    finish(&dir, cmd.name(), config, results, ctx.out, started)
}

fn to_json(v: &impl Serialize) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Io(e.to_string()))
}

impl Ctx<'_> {
    fn group(&mut self) -> Result<RepresentedGroup, CliError> {
        let g = self.loaded.group()?;
        self.loaded.check_budget(g.rank(), self.depth)?;
        self.echo.flag_type.get_or_insert_with(|| vec![1]);
        if let Some(spec) = self.echo.group.as_mut() {
            spec.seed.get_or_insert(self.seed);
        }
        Ok(g)
    }

    /// A second group on the same alphabet: `spec`, or the `[group]` spec
    /// with every generator cubed.
    fn second_group(&self, spec: Option<&GroupSpec>, section: &str, first: &RepresentedGroup) -> Result<(RepresentedGroup, GroupSpec), CliError> {
        let spec = match spec {
            Some(s) => s.clone(),
            None => {
                let mut s = self.loaded.config.group.clone().unwrap_or_default();
                s.power = Some(s.power.unwrap_or(1) * 3);
                s
            }
        };
        let mut resolved = spec.clone();
        resolved.seed.get_or_insert(self.seed);
        let g = self.loaded.build_group(&spec, section)?;
        if g.rank() != first.rank() {
            return Err(self.loaded.error(Some(section), "generators", "target must have as many generators as [group]"));
        }
        Ok((g, resolved))
    }

    fn words(&mut self, g: &RepresentedGroup) -> Result<Vec<Word>, CliError> {
        let spec = self.loaded.config.words.clone();
        if let Some(list) = &spec.list {
            return list
                .iter()
                .map(|s| g.alphabet().parse(s).map_err(|e| self.loaded.error(Some("words"), "list", e)))
                .collect();
        }
        let Some(count) = spec.random else {
            return g.words(self.depth).op("enumerate_words");
        };
        let max_len = spec.max_length.unwrap_or(self.depth);
        if max_len == 0 {
            return Err(self.loaded.error(Some("words"), "max_length", "`max_length` must be at least 1"));
        }
        self.echo.words.max_length = Some(max_len);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while out.len() < count {
            attempts += 1;
            if attempts > 1000 * count.max(1) {
                return Err(CliError::Numerical { op: "random words", source: flaglab::Error::NotLoxodromic });
            }
            let len = rng.random_range(1..=max_len);
            let w = random_word(g.rank(), len, &mut rng);
            if spec.loxodromic_only {
                match g.spectrum(&w) {
                    Ok(sp) if sp.converged && g.is_loxodromic_spectrum(&sp) => {}
                    _ => continue,
                }
            }
            out.push(w);
        }
        Ok(out)
    }
}

fn cartan(ctx: &mut Ctx) -> Result<Value, CliError> {
    let g = ctx.group()?;
    let words = ctx.words(&g)?;
    let d = g.dim();
    let mut rows = Vec::with_capacity(words.len());
    for w in &words {
        rows.push((g.format(w), cartan_projection_word(g.generators(), w).op("cartan_projection")?));
    }
    ctx.out.csv("cartan.csv", |f| {
        let mut header = vec!["word".to_string()];
        header.extend((1..=d).map(|i| format!("mu{i}")));
        header.extend((1..d).map(|i| format!("alpha{i}")));
        writeln!(f, "{}", header.join(","))?;
        for (w, mu) in &rows {
            let roots = mu.root_values();
            let vals = mu.coords().iter().chain(roots.iter()).map(|x| fmt_float(*x));
            writeln!(f, "{}", std::iter::once(w.clone()).chain(vals).collect::<Vec<_>>().join(","))?;
        }
        Ok(())
    })?;
    Ok(json!({ "group": g.name, "dim": d, "words": rows.len() }))
}

fn jordan(ctx: &mut Ctx) -> Result<Value, CliError> {
    let g = ctx.group()?;
    let words = ctx.words(&g)?;
    let d = g.dim();
    let squarings = ctx.loaded.config.words.squarings;
    let agreement = ctx.loaded.config.tolerances.jordan_agreement;
    let mut rows = Vec::with_capacity(words.len());
    let (mut worst, mut worst_word) = (0.0f64, String::new());
    let mut loxodromic = 0;
    for w in &words {
        let sp = g.spectrum(w).op("jordan_projection")?;
        let lox = sp.converged && g.is_loxodromic_spectrum(&sp);
        loxodromic += usize::from(lox);
        let lambda = flaglab::weyl::WeylVector::from_coords(sp.log_moduli.clone());
        let stable = jordan_projection_stable(g.generators(), w, squarings).op("jordan_projection_stable")?;
        let diff = lambda.max_abs_diff(&stable);
        if diff > worst || worst_word.is_empty() {
            worst = diff;
            worst_word = g.format(w);
        }
        rows.push((g.format(w), lambda, stable, diff, sp.converged, lox));
    }
    ctx.out.csv("jordan.csv", |f| {
        let mut header = vec!["word".to_string()];
        header.extend((1..=d).map(|i| format!("lambda{i}")));
        header.extend((1..=d).map(|i| format!("stable{i}")));
        header.extend(["diff", "converged", "loxodromic"].map(String::from));
        writeln!(f, "{}", header.join(","))?;
        for (w, l, s, diff, conv, lox) in &rows {
            let mut row = vec![w.clone()];
            row.extend(l.coords().iter().chain(s.coords()).map(|x| fmt_float(*x)));
            row.extend([fmt_float(*diff), conv.to_string(), lox.to_string()]);
            writeln!(f, "{}", row.join(","))?;
        }
        Ok(())
    })?;
    Ok(json!({
        "group": g.name,
        "dim": d,
        "words": rows.len(),
        "loxodromic": loxodromic,
        "squarings": squarings,
        "maxDifference": worst,
        "worstWord": worst_word,
        "agreementTolerance": agreement,
        "agree": worst <= agreement,
    }))
}

fn limit_set(ctx: &mut Ctx) -> Result<Value, CliError> {
    let g = ctx.group()?;
    let ty = ctx.loaded.flag_type(g.dim(), None, "flag_type", None)?;
    let fixed = sample_limit_set_fixed_points(&g, &ty, ctx.depth).op("sample_limit_set_fixed_points")?;
    let cartan = sample_limit_set_cartan(&g, &ty, ctx.depth, ctx.loaded.config.tolerances.cartan_gap)
        .op("sample_limit_set_cartan")?;
    let hd = hausdorff_distance(&fixed, &cartan).op("hausdorff_distance")?;
    ctx.out.csv("limit_set_fixed_point.csv", |f| write_limit_sample_csv(&g, &fixed, f))?;
    ctx.out.csv("limit_set_cartan.csv", |f| write_limit_sample_csv(&g, &cartan, f))?;
    Ok(json!({
        "group": g.name,
        "flagType": ty.theta(),
        "fixedPoint": { "points": fixed.len(), "skipped": fixed.skipped, "empty": fixed.is_empty() },
        "cartan": { "points": cartan.len(), "skipped": cartan.skipped, "threshold": cartan.threshold },
        "hausdorff": hd,
    }))
}

fn limit_cone(ctx: &mut Ctx) -> Result<Value, CliError> {
    let g = ctx.group()?;
    let cone = limit_cone_sample(&g, ctx.depth).op("limit_cone_sample")?;
    let interior = cone_interior_check(&cone).op("cone_interior_check")?;
    ctx.out.csv("limit_cone.csv", |f| write_cone_sample_csv(&g, &cone, f))?;
    Ok(json!({
        "group": g.name,
        "rays": cone.rays.len(),
        "skipped": cone.skipped,
        "hullDim": interior.hull_dim,
        "angularWidth": interior.angular_width,
        "rank": g.dim() - 1,
        "interior": interior.hull_dim + 1 == g.dim() - 1,
    }))
}

fn gaussian(d: usize, k: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(d, k, |_, _| StandardNormal.sample(rng))
}

const MAX_DRAWS: usize = 10_000;
const MAX_ITERATIONS: usize = 100_000;
const MIN_EXTENDED_WINDOW: f64 = 1e-300;

fn contract(ctx: &mut Ctx) -> Result<Value, CliError> {
    let g = ctx.group()?;
    let spec = ctx.loaded.config.contract.clone();
    let d = g.dim();
    let err = |key: &str, msg: &str| ctx.loaded.error(Some("contract"), key, msg);
    let k = RootLabel::new(spec.k, d).map_err(|_| err("k", "`k` must lie in 1..d"))?;
    if spec.trials == 0 {
        return Err(err("trials", "`trials` must be at least 1"));
    }
    if !(spec.min_gap > 0.0 && spec.pi_floor > 0.0) {
        return Err(err("min_gap", "`min_gap` and `pi_floor` must be positive"));
    }
    let fixed_xi = match &spec.xi {
        Some(vs) => {
            if vs.len() != spec.k || vs.iter().any(|v| v.len() != d) {
                return Err(err("xi", "`xi` must list k vectors of length d"));
            }
            let frame = DMatrix::from_fn(d, spec.k, |i, j| vs[j][i]);
            Some(FlagPoint::from_frame(FlagType::single(d, spec.k).op("contract")?, &frame).map_err(|e| err("xi", &e.to_string()))?)
        }
        None => None,
    };
    let window = match (spec.window, spec.precision_bits) {
        (Some(w), _) => w,
        (None, None) => flaglab::dynamics::CONTRACTION_WINDOW,
        (None, Some(bits)) => (2f64.powi(-(bits.min(1990) as i32) / 2).max(MIN_EXTENDED_WINDOW), 1e-2),
    };
    if !(window.0 > 0.0 && window.0 < window.1) {
        return Err(err("window", "`window` must satisfy 0 < lo < hi"));
    }
    if spec.precision_bits.is_none() && window.0 < f64::EPSILON {
        return Err(err("window", "a window below machine epsilon needs `precision_bits`"));
    }
    if let Some(bits) = spec.precision_bits {
        if bits < flaglab::extended::MIN_PRECISION_BITS {
            return Err(err("precision_bits", "`precision_bits` must be at least 64"));
        }
        if window.0 < MIN_EXTENDED_WINDOW {
            return Err(err("window", "`window` lower bound must be at least 1e-300"));
        }
    }
    let base = if spec.random_group {
        None
    } else {
        let w = g.alphabet().parse(&spec.word).map_err(|e| err("word", &e.to_string()))?;
        Some(g.evaluate(&w).op("evaluate")?)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let ty = FlagType::single(d, spec.k).op("contract")?;
    let mut rows = Vec::with_capacity(spec.trials);
    let mut samples = Vec::new();
    for t in 0..spec.trials {
        let m = match &base {
            Some(m) => m.clone(),
            None => draw_loxodromic(d, spec.min_gap, &mut rng)?,
        };
        let gap = flaglab::weyl::simple_root_value(&jordan_projection(&m).op("jordan_projection")?, k);
        let xi = match &fixed_xi {
            Some(x) => x.clone(),
            None => {
                let split = weight_split_for(&m, k).op("weight_split")?;
                let mut found = None;
                for _ in 0..MAX_DRAWS {
                    let x = FlagPoint::from_frame(ty.clone(), &gaussian(d, spec.k, &mut rng)).op("contract")?;
                    if let Ok((p1, p2)) = pi_projections(&split, &x) {
                        if p1 > spec.pi_floor && p2 > spec.pi_floor {
                            found = Some(x);
                            break;
                        }
                    }
                }
                found.ok_or(CliError::Numerical { op: "random start", source: flaglab::Error::DegenerateMatrix })?
            }
        };
        let decades = -window.0.ln();
        let n_max = spec.n_max.unwrap_or_else(|| ((decades / gap).ceil() + 10.0).min(MAX_ITERATIONS as f64) as usize);
        let r = match spec.precision_bits {
            None => contraction_experiment_in(&m, &xi, k, n_max, window).op("contraction_experiment")?,
            Some(bits) => {
                contraction_experiment_extended(&m, &xi, k, n_max, window, bits).op("contraction_experiment")?.result
            }
        };
        for (n, dist) in &r.samples {
            samples.push((t, *n, *dist));
        }
        rows.push(r);
    }
    ctx.out.csv("contract.csv", |f| {
        writeln!(f, "trial,slope,predicted,relative_error,pi1,pi2,points_used")?;
        for (t, r) in rows.iter().enumerate() {
            let (p1, p2) = r.pi.map_or((String::new(), String::new()), |(a, b)| (fmt_float(a), fmt_float(b)));
            let rel = ((r.slope - r.predicted) / r.predicted).abs();
            writeln!(f, "{t},{},{},{},{p1},{p2},{}", fmt_float(r.slope), fmt_float(r.predicted), fmt_float(rel), r.points_used)?;
        }
        Ok(())
    })?;
    ctx.out.csv("contract_samples.csv", |f| {
        writeln!(f, "trial,n,distance")?;
        for (t, n, dist) in &samples {
            writeln!(f, "{t},{n},{}", fmt_float(*dist))?;
        }
        Ok(())
    })?;
    let rel: Vec<f64> = rows.iter().map(|r| ((r.slope - r.predicted) / r.predicted).abs()).collect();
    let worst = (0..rel.len()).max_by(|&a, &b| rel[a].total_cmp(&rel[b])).unwrap_or(0);
    let max_excess = rows.iter().map(|r| r.slope - r.predicted).fold(f64::NEG_INFINITY, f64::max);
    Ok(json!({
        "group": g.name,
        "k": spec.k,
        "trials": rows.len(),
        "window": window,
        "precisionBits": spec.precision_bits.unwrap_or(f64::MANTISSA_DIGITS as usize),
        "maxRelativeError": rel[worst],
        "worstTrial": worst,
        "maxExcessOverPredicted": max_excess,
        "first": rows[0],
    }))
}

fn draw_loxodromic(d: usize, min_gap: f64, rng: &mut ChaCha8Rng) -> Result<DMatrix<f64>, CliError> {
    for _ in 0..MAX_DRAWS {
        let m = random_sl(d, rng);
        if let Ok(lambda) = jordan_projection(&m) {
            let lox = loxodromy_of(&lambda, min_gap);
            if lox.loxodromic {
                return Ok(m);
            }
        }
    }
    Err(CliError::Numerical { op: "random loxodromic element", source: flaglab::Error::NotLoxodromic })
}

fn holder_options(ctx: &Ctx) -> HolderOptions {
    let (h, t) = (&ctx.loaded.config.holder, &ctx.loaded.config.tolerances);
    HolderOptions {
        window: t.window,
        buckets: h.buckets,
        target_floor: t.target_floor,
        max_points: h.max_points,
        min_pairs: h.min_pairs,
        min_decades: h.min_decades,
    }
}

fn holder(ctx: &mut Ctx) -> Result<Value, CliError> {
    let g = ctx.group()?;
    let spec = ctx.loaded.config.holder.clone();
    let (g2, resolved) = ctx.second_group(spec.target.as_ref(), "holder.target", &g)?;
    ctx.echo.holder.target = Some(resolved);
    let st = ctx.loaded.flag_type(g.dim(), Some("holder"), "source_type", spec.source_type.as_deref())?;
    let tt = ctx.loaded.flag_type(g2.dim(), Some("holder"), "target_type", spec.target_type.as_deref())?;
    ctx.echo.holder.source_type = Some(st.theta().to_vec());
    ctx.echo.holder.target_type = Some(tt.theta().to_vec());
    let sm = ctx.loaded.metric("holder", "source_metric", &spec.source_metric, g.dim())?;
    let tm = ctx.loaded.metric("holder", "target_metric", &spec.target_metric, g2.dim())?;
    let source = sample_limit_set_fixed_points(&g, &st, ctx.depth).op("sample_limit_set_fixed_points")?;
    let target = sample_limit_set_fixed_points(&g2, &tt, ctx.depth).op("sample_limit_set_fixed_points")?;
    ctx.out.csv("holder_source.csv", |f| write_limit_sample_csv(&g, &source, f))?;
    ctx.out.csv("holder_target.csv", |f| write_limit_sample_csv(&g2, &target, f))?;
    let paired = PairedSample::new(source, target).op("paired_sample")?;
    let opts = holder_options(ctx);
    let est = estimate_holder(&paired, sm, tm, &opts).op("estimate_holder")?;
    ctx.out.csv("holder_buckets.csv", |f| {
        writeln!(f, "count,mean_log_source,max_log_ratio,min_log_ratio")?;
        for b in &est.buckets {
            writeln!(f, "{},{},{},{}", b.count, fmt_float(b.mean_log_source), fmt_float(b.max_log_ratio), fmt_float(b.min_log_ratio))?;
        }
        Ok(())
    })?;
    Ok(json!({
        "source": g.name,
        "target": g2.name,
        "alignedPairs": paired.len(),
        "options": opts,
        "estimate": est,
    }))
}

fn obstruct(ctx: &mut Ctx) -> Result<Value, CliError> {
    let g = ctx.group()?;
    let spec = ctx.loaded.config.obstruct.clone();
    let (g2, resolved) = ctx.second_group(spec.target.as_ref(), "obstruct.target", &g)?;
    ctx.echo.obstruct.target = Some(resolved);
    if !(spec.kappa > 0.0) || spec.extra_kappas.iter().any(|k| !(*k > 0.0)) {
        return Err(ctx.loaded.error(Some("obstruct"), "kappa", "κ values must be positive"));
    }
    let r = self_joining_obstruction(&g, &g2, spec.kappa, &spec.extra_kappas, ctx.depth).op("self_joining_obstruction")?;
    ctx.out.csv("obstruct_grid.csv", |f| {
        writeln!(f, "kappa,witness,alpha1,alpha2,discrepancy")?;
        for e in &r.grid {
            writeln!(f, "{},{},{},{},{}", fmt_float(e.kappa), e.witness, fmt_float(e.alpha1), fmt_float(e.alpha2), fmt_float(e.discrepancy))?;
        }
        Ok(())
    })?;
    Ok(json!({ "factor1": g.name, "factor2": g2.name, "report": r }))
}

fn sl8(ctx: &mut Ctx) -> Result<Value, CliError> {
    let spec = ctx.loaded.config.sl8.clone();
    let err = |key: &str, msg: &str| ctx.loaded.error(Some("sl8"), key, msg);
    if !(spec.s > 1.0) {
        return Err(err("s", "`s` must exceed 1"));
    }
    if spec.n < 2 || spec.max_n < spec.n {
        return Err(err("n", "`n` must be at least 2 and at most `max_n`"));
    }
    if !(spec.epsilon >= 0.0) {
        return Err(err("epsilon", "`epsilon` must be non-negative"));
    }
    if spec.triples == 0 || !(spec.block_tolerance > 0.0) {
        return Err(err("triples", "`triples` and `block_tolerance` must be positive"));
    }
    ctx.loaded.check_budget(2, ctx.depth)?;
    let cfg = Sl8Config {
        s: spec.s,
        n: spec.n,
        epsilon: spec.epsilon,
        seed: spec.seed.unwrap_or(ctx.seed),
        validation_depth: spec.validation_depth.unwrap_or(ctx.depth),
        max_halvings: spec.max_halvings,
        max_n: spec.max_n,
    };
    ctx.echo.sl8.seed = Some(cfg.seed);
    ctx.echo.sl8.validation_depth = Some(cfg.validation_depth);
    let mut ex = build_sl8_example(&cfg).op("build_sl8_example")?;
    let gap = ctx.loaded.config.tolerances.gap;
    for g in [&mut ex.phi, &mut ex.phi0, &mut ex.tau1, &mut ex.tau2, &mut ex.rho1, &mut ex.rho2] {
        *g = g.clone().with_gap_tolerance(gap);
    }
    let opts = VerifyOptions {
        triples: spec.triples,
        seed: cfg.seed,
        hyperconvex_threshold: ctx.loaded.config.tolerances.general_position,
        block_tolerance: spec.block_tolerance,
        holder: holder_options(ctx),
    };
    let v = verify_sl8(&ex, ctx.depth, &opts).op("verify_sl8")?;
    ctx.out.json("sl8_report.json", &v.reports)?;
    let names = ex.phi.alphabet().names().to_vec();
    ctx.out.csv("sl8_generators.csv", |f| {
        writeln!(f, "generator,row,{}", (0..8).map(|j| format!("c{j}")).collect::<Vec<_>>().join(","))?;
        for (name, m) in names.iter().zip(ex.phi.generators().matrices()) {
            for i in 0..m.nrows() {
                let row: Vec<String> = m.row(i).iter().map(|x| fmt_float(*x)).collect();
                writeln!(f, "{name},{i},{}", row.join(","))?;
            }
        }
        Ok(())
    })?;
    Ok(json!({
        "provenance": ex.provenance,
        "options": opts,
        "allPass": v.reports.iter().all(|r| r.pass),
        "reports": v.reports,
        "zetaHolder": v.zeta_holder,
        "projectionHolder": v.projection_holder,
    }))
}

fn antipodal(ctx: &mut Ctx) -> Result<Value, CliError> {
    let g = ctx.group()?;
    let d = g.dim();
    let k = ctx.loaded.config.antipodal.k;
    if !(1..d).contains(&k) {
        return Err(ctx.loaded.error(Some("antipodal"), "k", "`k` must lie in 1..d"));
    }
    let s = sample_limit_set_fixed_points(&g, &FlagType::single(d, k).op("antipodal")?, ctx.depth)
        .op("sample_limit_set_fixed_points")?;
    let s2 = if k * 2 == d {
        s.clone()
    } else {
        sample_limit_set_fixed_points(&g, &FlagType::single(d, d - k).op("antipodal")?, ctx.depth)
            .op("sample_limit_set_fixed_points")?
    };
    let threshold = ctx.loaded.config.tolerances.general_position;
    let r = antipodality_audit(&g, &s, &s2, threshold).op("antipodality_audit")?;
    ctx.out.csv("antipodal_violations.csv", |f| {
        writeln!(f, "word1,word2,witness")?;
        for (a, b, w) in &r.violating {
            writeln!(f, "{a},{b},{}", fmt_float(*w))?;
        }
        Ok(())
    })?;
    Ok(json!({
        "group": g.name,
        "k": k,
        "points": [s.len(), s2.len()],
        "threshold": threshold,
        "allAboveThreshold": r.violating.is_empty(),
        "report": r,
    }))
}
