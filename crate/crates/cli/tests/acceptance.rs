//! Acceptance suite. Runs every shipped configuration through the library
//! entry point and prints one PASS/FAIL line per criterion.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use serde_json::Value;

use flaglab_cli::config;
use flaglab_cli::{run, RunReport, Subcommand};

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(format!("{name}.toml"))
}

struct Runner {
    dir: tempfile::TempDir,
    /// (config, subcommand, hash) of every run, replayed for determinism.
    runs: Vec<(&'static str, Subcommand, String)>,
}

impl Runner {
    fn run(&mut self, cmd: Subcommand, name: &'static str) -> Result<(RunReport, Duration), String> {
        let started = Instant::now();
        let loaded = config::load(&config_path(name)).map_err(|e| e.to_string())?;
        let out = self.dir.path().join(format!("{name}-{}", self.runs.len()));
        let report = run(cmd, &loaded, Some(&out)).map_err(|e| format!("{name}: {e}"))?;
        self.runs.push((name, cmd, report.determinism_hash.clone()));
        Ok((report, started.elapsed()))
    }
}

fn num(v: &Value, path: &str) -> f64 {
    path.split('.').fold(v, |v, k| &v[k]).as_f64().unwrap_or(f64::NAN)
}

fn report<'a>(results: &'a Value, condition: &str) -> &'a Value {
    results["reports"]
        .as_array()
        .and_then(|rs| rs.iter().find(|r| r["condition"] == condition))
        .unwrap_or(&Value::Null)
}

type Outcome = Result<(bool, String), String>;
type Check = fn(&mut Runner) -> Outcome;

fn jordan(r: &mut Runner) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    let mut total = Duration::ZERO;
    for name in ["jordan_sl3", "jordan_sl4"] {
        let (rep, t) = r.run(Subcommand::Jordan, name)?;
        total += t;
        let diff = num(&rep.results, "maxDifference");
        let count = num(&rep.results, "loxodromic");
        ok &= diff <= 1e-6 && count == 100.0;
        detail.push(format!("{name}: {count} words, max diff {diff:.2e}"));
    }
    ok &= total < Duration::from_secs(10);
    Ok((ok, format!("{}; {:.2}s", detail.join(", "), total.as_secs_f64())))
}

fn contraction_equality(r: &mut Runner) -> Outcome {
    let (xi, t1) = r.run(Subcommand::Contract, "contract_random_xi")?;
    let (g, t2) = r.run(Subcommand::Contract, "contract_random_g")?;
    let e1 = num(&xi.results, "maxRelativeError");
    let e2 = num(&g.results, "maxRelativeError");
    let total = t1 + t2;
    let ok = e1 <= 1e-2 && e2 <= 2e-2 && num(&xi.results, "trials") == 50.0 && total < Duration::from_secs(30);
    Ok((ok, format!("random xi max rel {e1:.2e} (≤ 1e-2), random g max rel {e2:.2e} (≤ 2e-2); {:.2}s", total.as_secs_f64())))
}

fn contraction_strict(r: &mut Runner) -> Outcome {
    let (rep, t) = r.run(Subcommand::Contract, "contract_strict")?;
    let slope = num(&rep.results, "first.slope");
    let bound = -(4f64.ln()) - 1.0;
    let ok = slope <= bound && t < Duration::from_secs(1);
    Ok((ok, format!("slope {slope:.6} ≤ {bound:.6}; {:.2}s", t.as_secs_f64())))
}

fn cone_interior(r: &mut Runner) -> Outcome {
    let (rep, t) = r.run(Subcommand::LimitCone, "limit_cone_sl3")?;
    let dim = num(&rep.results, "hullDim");
    let width = num(&rep.results, "angularWidth");
    let ok = dim == 2.0 && width > 1e-3 && t < Duration::from_secs(60);
    Ok((ok, format!("hullDim {dim}, angularWidth {width:.3e}; {:.2}s", t.as_secs_f64())))
}

fn limit_set(r: &mut Runner) -> Outcome {
    let (rep, t) = r.run(Subcommand::LimitSet, "limit_set_sl2")?;
    let h = num(&rep.results, "hausdorff");
    let ok = h <= 1e-3 && t < Duration::from_secs(30);
    Ok((ok, format!("Hausdorff distance {h:.3e}; {:.2}s", t.as_secs_f64())))
}

fn holder_asymmetry(r: &mut Runner) -> Outcome {
    let (rep, t) = r.run(Subcommand::Holder, "holder_sl2_cube")?;
    let lo = num(&rep.results, "estimate.lower_envelope");
    let hi = num(&rep.results, "estimate.upper_envelope");
    let ok = lo >= 0.98 && hi >= 1.5 && t < Duration::from_secs(60);
    Ok((ok, format!("lower envelope {lo:.3}, upper envelope {hi:.3}; {:.2}s", t.as_secs_f64())))
}

fn obstruction(r: &mut Runner) -> Outcome {
    let (rep, t) = r.run(Subcommand::Obstruct, "obstruct_sl2_cube")?;
    let disc = num(&rep.results, "report.discrepancy");
    let spread = num(&rep.results, "report.ratio_spread");
    let ok = disc > 0.5 && spread > 1e-2 && t < Duration::from_secs(60);
    Ok((ok, format!("discrepancy {disc:.3}, ratio spread {spread:.3}; {:.2}s", t.as_secs_f64())))
}

fn sl8_undeformed(r: &mut Runner) -> Outcome {
    let (rep, t) = r.run(Subcommand::Sl8, "sl8_undeformed")?;
    let res = &rep.results;
    let chain = report(res, "eigenvalue-chain")["pass"] == true;
    let ratio = num(report(res, "factor-ratio"), "values.minRatio");
    let hyper = report(res, "hyperconvexity");
    let (phi, wedge) = (num(hyper, "values.minDetPhi"), num(hyper, "values.minDetWedge3"));
    let triples = num(hyper, "values.triples");
    let zeta = num(res, "zetaHolder.lower_envelope");
    let (plo, phi_) = (num(res, "projectionHolder.lower_envelope"), num(res, "projectionHolder.upper_envelope"));
    let band = |x: f64| (0.95..=1.05).contains(&x);
    let ok = chain
        && ratio >= 4.0
        && phi > 1e-8
        && wedge > 1e-8
        && triples == 500.0
        && zeta >= 0.95
        && band(plo)
        && band(phi_)
        && t < Duration::from_secs(300);
    Ok((
        ok,
        format!(
            "chain {chain}, min ratio {ratio:.3}, hyperconvexity dets {phi:.3e}/{wedge:.3e} on {triples} triples, \
             zeta lower {zeta:.3}, projection envelopes {plo:.4}/{phi_:.4}; {:.2}s",
            t.as_secs_f64()
        ),
    ))
}

fn sl8_deformed(r: &mut Runner) -> Outcome {
    let (rep, t) = r.run(Subcommand::Sl8, "sl8_deformed")?;
    let dr = report(&rep.results, "deformed-ratio");
    let vals = ["minAlpha1", "maxAlpha1", "minAlpha3", "maxAlpha3"].map(|k| num(dr, &format!("values.{k}")));
    let halvings = num(&rep.results, "provenance.halvings");
    let ok = vals.iter().all(|v| (2.0 / 3.0..=1.5).contains(v)) && halvings <= 8.0 && t < Duration::from_secs(300);
    Ok((
        ok,
        format!(
            "alpha1 ratios [{:.5}, {:.5}], alpha3 ratios [{:.5}, {:.5}], {halvings} halvings; {:.2}s",
            vals[0],
            vals[1],
            vals[2],
            vals[3],
            t.as_secs_f64()
        ),
    ))
}

fn determinism(r: &mut Runner) -> Outcome {
    let first = std::mem::take(&mut r.runs);
    if first.is_empty() {
        return Err("no runs to replay".into());
    }
    let mut mismatched = Vec::new();
    for (name, cmd, hash) in &first {
        let (rep, _) = r.run(*cmd, name)?;
        if &rep.determinism_hash != hash {
            mismatched.push(*name);
        }
    }
    Ok((mismatched.is_empty(), format!("{} runs replayed, mismatched: {mismatched:?}", first.len())))
}

fn main() -> ExitCode {
    let mut runner = Runner { dir: tempfile::tempdir().expect("temporary directory"), runs: Vec::new() };
    let criteria: [(&str, Check); 10] = [
        ("jordan cross-check", jordan),
        ("contraction rate equality", contraction_equality),
        ("contraction strictness", contraction_strict),
        ("limit cone interior", cone_interior),
        ("limit set sampling", limit_set),
        ("Hölder asymmetry", holder_asymmetry),
        ("self-joining obstruction", obstruction),
        ("SL8 pipeline, undeformed", sl8_undeformed),
        ("SL8 deformation", sl8_deformed),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (label, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check(&mut runner).unwrap_or_else(|e| (false, format!("error: {e}")));
        failed += usize::from(!ok);
        println!("criterion {:>2} {} {label}: {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
