//! Experiment configuration. One TOML file; every subcommand reads the
//! top-level keys plus its own optional section.
//!
//! ```toml
//! seed = 0
//! depth = 8
//! flag_type = [1]
//!
//! [group]
//! preset = "schottky-sl2"
//! s = 3.0
//! ```

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use flaglab::dynamics::RepresentedGroup;
use flaglab::flag::FlagType;
use flaglab::holder::{Metric, Sl8Config};
use flaglab::presets;
use flaglab::words::{reduced_word_count, Alphabet, WORD_CAP};

use crate::CliError;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: Option<u64>,
    pub depth: Option<usize>,
    pub out: Option<PathBuf>,
    pub flag_type: Option<Vec<usize>>,
    pub group: Option<GroupSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub words: WordsSpec,
    #[serde(default)]
    pub contract: ContractSpec,
    #[serde(default)]
    pub holder: HolderSpec,
    #[serde(default)]
    pub obstruct: ObstructSpec,
    #[serde(default)]
    pub sl8: Sl8Spec,
    #[serde(default)]
    pub antipodal: AntipodalSpec,
}

/// A preset name with its parameters, or inline generators.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub preset: Option<String>,
    /// Schottky parameter of `schottky-sl2`.
    pub s: Option<f64>,
    /// Dimension of `schottky-sld`.
    pub dim: Option<usize>,
    /// Seed of the randomized presets; defaults to the run seed.
    pub seed: Option<u64>,
    /// Replace every generator by this power.
    pub power: Option<u32>,
    pub name: Option<String>,
    pub generators: Option<Vec<GeneratorSpec>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub name: String,
    /// Row-major entries.
    pub matrix: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Minimum simple-root gap of a loxodromic element.
    pub gap: f64,
    /// Minimum singular-value gap of a Cartan-sampled word.
    pub cartan_gap: f64,
    /// Source-distance window of Hölder fits.
    pub window: (f64, f64),
    /// Target distances below this are treated as rounding noise.
    pub target_floor: f64,
    pub general_position: f64,
    /// Allowed per-coordinate disagreement of the two Jordan routes.
    pub jordan_agreement: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            gap: 1e-6,
            cartan_gap: 1e-6,
            window: (1e-12, 1e3),
            target_floor: 1e-14,
            general_position: 1e-8,
            jordan_agreement: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WordsSpec {
    /// Explicit words, e.g. `"a.B.b"`.
    pub list: Option<Vec<String>>,
    /// Number of seeded random words; all words up to `depth` otherwise.
    pub random: Option<usize>,
    pub max_length: Option<usize>,
    /// Redraw random words until they are loxodromic.
    pub loxodromic_only: bool,
    /// Squarings of the stable Jordan route.
    pub squarings: u32,
}

impl Default for WordsSpec {
    fn default() -> Self {
        Self { list: None, random: None, max_length: None, loxodromic_only: false, squarings: 40 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContractSpec {
    /// Group element iterated, unless `random_group` is set.
    pub word: String,
    pub k: usize,
    /// Spanning vectors of the starting subspace; random trials otherwise.
    pub xi: Option<Vec<Vec<f64>>>,
    pub trials: usize,
    /// Draw a fresh random loxodromic element per trial.
    pub random_group: bool,
    /// Smallest root gap accepted for a random element.
    pub min_gap: f64,
    /// Smallest `|π₁|`, `|π₂|` accepted for a random start.
    pub pi_floor: f64,
    /// Iterations; chosen from the root gap and window when absent.
    pub n_max: Option<usize>,
    /// Run the iteration with this many mantissa bits instead of `f64`.
    pub precision_bits: Option<usize>,
    /// Distance window `[lo, hi]` of the regression.
    pub window: Option<(f64, f64)>,
}

impl Default for ContractSpec {
    fn default() -> Self {
        Self {
            word: "a".into(),
            k: 1,
            xi: None,
            trials: 1,
            random_group: false,
            min_gap: 0.1,
            pi_floor: 1e-3,
            n_max: None,
            precision_bits: None,
            window: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HolderSpec {
    /// Target of the correspondence; the source group with `power = 3`
    /// when absent.
    pub target: Option<GroupSpec>,
    pub source_type: Option<Vec<usize>>,
    pub target_type: Option<Vec<usize>>,
    /// `"theta"` or `"alphaK"`.
    pub source_metric: String,
    pub target_metric: String,
    pub buckets: usize,
    pub max_points: usize,
    pub min_pairs: usize,
    pub min_decades: f64,
}

impl Default for HolderSpec {
    fn default() -> Self {
        Self {
            target: None,
            source_type: None,
            target_type: None,
            source_metric: "theta".into(),
            target_metric: "theta".into(),
            buckets: 10,
            max_points: 3000,
            min_pairs: 30,
            min_decades: 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObstructSpec {
    /// Second factor; the first group with `power = 3` when absent.
    pub target: Option<GroupSpec>,
    pub kappa: f64,
    pub extra_kappas: Vec<f64>,
}

impl Default for ObstructSpec {
    fn default() -> Self {
        Self { target: None, kappa: 1.0, extra_kappas: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sl8Spec {
    pub s: f64,
    pub n: u32,
    pub epsilon: f64,
    /// Perturbation seed; the run seed when absent.
    pub seed: Option<u64>,
    /// Depth of the build-time checks; the run depth when absent.
    pub validation_depth: Option<usize>,
    pub max_halvings: u32,
    pub max_n: u32,
    pub triples: usize,
    pub block_tolerance: f64,
}

impl Default for Sl8Spec {
    fn default() -> Self {
        let c = Sl8Config::default();
        Self {
            s: c.s,
            n: c.n,
            epsilon: c.epsilon,
            seed: None,
            validation_depth: None,
            max_halvings: c.max_halvings,
            max_n: c.max_n,
            triples: 500,
            block_tolerance: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AntipodalSpec {
    pub k: usize,
}

impl Default for AntipodalSpec {
    fn default() -> Self {
        Self { k: 1 }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub depth: Option<usize>,
    pub seed: Option<u64>,
}

/// A parsed configuration together with its source text, kept for
/// line-anchored validation messages.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub path: String,
    pub source: String,
    pub config: ExperimentConfig,
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let source = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: cannot read: {e}", path.display())))?;
    parse(&path.display().to_string(), &source)
}

pub fn parse(path: &str, source: &str) -> Result<Loaded, CliError> {
    let config: ExperimentConfig = toml::from_str(source).map_err(|e| {
        let mut line = e.span().map_or(1, |s| source[..s.start].lines().count().max(1));
        // unknown keys are reported against their whole table
        if let Some(key) = e.message().strip_prefix("unknown field `").and_then(|m| m.split('`').next()) {
            let hit = source.lines().position(|l| l.trim().strip_prefix(key).is_some_and(|r| r.trim_start().starts_with('=')));
            line = hit.map_or(line, |i| i + 1);
        }
        CliError::Config(format!("{path}:{line}: {}", e.message()))
    })?;
    Ok(Loaded { path: path.into(), source: source.into(), config })
}

impl Loaded {
    pub fn apply(&mut self, o: &Overrides) {
        if o.out.is_some() {
            self.config.out = o.out.clone();
        }
        if o.depth.is_some() {
            self.config.depth = o.depth;
        }
        if o.seed.is_some() {
            self.config.seed = o.seed;
        }
    }

    /// Error anchored at `key` inside `section` (top level for `None`).
    pub fn error(&self, section: Option<&str>, key: &str, msg: impl std::fmt::Display) -> CliError {
        CliError::Config(format!("{}:{}: {msg}", self.path, locate(&self.source, section, key)))
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.config.seed.ok_or_else(|| self.error(None, "seed", "`seed` is required"))
    }

    pub fn depth(&self, default: usize) -> Result<usize, CliError> {
        let d = self.config.depth.unwrap_or(default);
        if d == 0 {
            return Err(self.error(None, "depth", "`depth` must be at least 1"));
        }
        Ok(d)
    }

    /// Checks that `depth` words on `rank` generators fit the word cap.
    pub fn check_budget(&self, rank: usize, depth: usize) -> Result<(), CliError> {
        let count = reduced_word_count(rank, depth);
        if count > WORD_CAP {
            return Err(self.error(None, "depth", format!("depth {depth} gives {count} words, cap is {WORD_CAP}")));
        }
        Ok(())
    }

    pub fn check_tolerances(&self) -> Result<(), CliError> {
        let t = &self.config.tolerances;
        let named = [
            ("gap", t.gap),
            ("cartan_gap", t.cartan_gap),
            ("target_floor", t.target_floor),
            ("general_position", t.general_position),
            ("jordan_agreement", t.jordan_agreement),
        ];
        for (key, v) in named {
            if !(v > 0.0 && v.is_finite()) {
                return Err(self.error(Some("tolerances"), key, format!("`{key}` must be positive, got {v}")));
            }
        }
        if !(t.window.0 > 0.0 && t.window.0 < t.window.1) {
            return Err(self.error(Some("tolerances"), "window", "`window` must satisfy 0 < lo < hi"));
        }
        Ok(())
    }

    pub fn flag_type(&self, d: usize, section: Option<&str>, key: &str, theta: Option<&[usize]>) -> Result<FlagType, CliError> {
        let theta = theta.or(self.config.flag_type.as_deref()).unwrap_or(&[1]);
        FlagType::new(d, theta.iter().copied()).map_err(|e| self.error(section, key, e))
    }

    pub fn metric(&self, section: &str, key: &str, s: &str, d: usize) -> Result<Metric, CliError> {
        if s == "theta" {
            return Ok(Metric::Theta);
        }
        match s.strip_prefix("alpha").and_then(|k| k.parse::<usize>().ok()) {
            Some(k) if (1..d).contains(&k) => Ok(Metric::Root(k)),
            _ => Err(self.error(Some(section), key, format!("unknown metric `{s}` (use theta or alpha1..alpha{})", d - 1))),
        }
    }

    /// The group of `[group]`.
    pub fn group(&self) -> Result<RepresentedGroup, CliError> {
        let spec = self
            .config
            .group
            .as_ref()
            .ok_or_else(|| self.error(None, "[group]", "a [group] section is required"))?;
        self.build_group(spec, "group")
    }

    pub fn build_group(&self, spec: &GroupSpec, section: &str) -> Result<RepresentedGroup, CliError> {
        let err = |key: &str, msg: String| self.error(Some(section), key, msg);
        let seed = match spec.seed {
            Some(s) => s,
            None => self.seed()?,
        };
        let g = match (&spec.preset, &spec.generators) {
            (Some(_), Some(_)) => return Err(err("generators", "give either `preset` or `generators`, not both".into())),
            (None, None) => return Err(err("preset", "`preset` or `generators` is required".into())),
            (Some(p), None) => {
                let s = spec.s.unwrap_or(3.0);
                match p.as_str() {
                    "schottky-sl2" => match spec.power {
                        Some(n) => presets::schottky_sl2_power(s, n),
                        None => presets::schottky_sl2(s),
                    },
                    "schottky-sl3" => presets::schottky_sl3(seed),
                    "schottky-sld" => presets::schottky_sld(spec.dim.unwrap_or(3), seed),
                    "diag-sl3" => presets::diag_sl3(),
                    other => {
                        return Err(err(
                            "preset",
                            format!("unknown preset `{other}` (known: {})", presets::PRESET_NAMES.join(", ")),
                        ))
                    }
                }
                .map_err(|e| err("preset", e.to_string()))?
            }
            (None, Some(gens)) => {
                let mut mats = Vec::with_capacity(gens.len());
                let mut names = Vec::with_capacity(gens.len());
                for gs in gens {
                    let n = gs.matrix.len();
                    let d = (n as f64).sqrt().round() as usize;
                    if d < 2 || d * d != n {
                        return Err(err("matrix", format!("generator `{}` has {n} entries, not a square d ≥ 2", gs.name)));
                    }
                    if mats.first().is_some_and(|m: &DMatrix<f64>| m.nrows() != d) {
                        return Err(err("matrix", format!("generator `{}` has a different size", gs.name)));
                    }
                    mats.push(DMatrix::from_row_slice(d, d, &gs.matrix));
                    names.push(gs.name.clone());
                }
                let alphabet = Alphabet::new(names).map_err(|e| err("name", e.to_string()))?;
                let name = spec.name.clone().unwrap_or_else(|| "inline".into());
                RepresentedGroup::new(name, alphabet, mats).map_err(|e| err("matrix", e.to_string()))?
            }
        };
        let g = match spec.power {
            Some(0) => return Err(err("power", "`power` must be at least 1".into())),
            Some(n) if spec.preset.as_deref() != Some("schottky-sl2") => {
                let name = format!("{}^{n}", g.name);
                g.map(name, |m| pow(m, n)).map_err(|e| err("power", e.to_string()))?
            }
            _ => g,
        };
        Ok(g.with_gap_tolerance(self.config.tolerances.gap))
    }
}

fn pow(m: &DMatrix<f64>, n: u32) -> DMatrix<f64> {
    let mut out = m.clone();
    for _ in 1..n {
        out = &out * m;
    }
    out
}

/// Line of `key` inside `[section]`, else of the section header, else 1.
/// A key written as `[name]` is looked up as a table header.
pub fn locate(source: &str, section: Option<&str>, key: &str) -> usize {
    let mut current: Option<String> = None;
    let mut header_line = None;
    for (i, raw) in source.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') {
            let name = line.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            if key.starts_with('[') && key.trim_matches(|c| c == '[' || c == ']') == name {
                return i + 1;
            }
            if Some(name.as_str()) == section {
                header_line.get_or_insert(i + 1);
            }
            current = Some(name);
            continue;
        }
        let in_section = match (section, &current) {
            (None, None) => true,
            (Some(s), Some(c)) => c == s || c.starts_with(&format!("{s}.")),
            _ => false,
        };
        if in_section {
            if let Some(rest) = line.strip_prefix(key) {
                if rest.trim_start().starts_with('=') {
                    return i + 1;
                }
            }
        }
    }
    header_line.unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locate_finds_keys_in_sections() {
        let src = "seed = 1\n\n[group]\npreset = \"x\"\n\n[tolerances]\ngap = -1\n";
        assert_eq!(locate(src, None, "seed"), 1);
        assert_eq!(locate(src, Some("group"), "preset"), 4);
        assert_eq!(locate(src, Some("tolerances"), "gap"), 7);
        assert_eq!(locate(src, Some("tolerances"), "window"), 6);
        assert_eq!(locate(src, None, "[group]"), 3);
        assert_eq!(locate(src, None, "depth"), 1);
    }

    #[test]
    fn parse_errors_carry_a_line() {
        let e = parse("c.toml", "seed = 1\ndepth = \"x\"\n").unwrap_err();
        assert!(e.to_string().starts_with("c.toml:2:"), "{e}");
        let e = parse("c.toml", "seed = 1\n\n[group]\nbogus = 3\n").unwrap_err();
        assert!(e.to_string().starts_with("c.toml:4:"), "{e}");
    }

    #[test]
    fn validation_errors_carry_a_line() {
        let l = parse("c.toml", "seed = 1\n[tolerances]\ngap = -1.0\n").unwrap();
        assert!(l.check_tolerances().unwrap_err().to_string().starts_with("c.toml:3:"));
        let l = parse("c.toml", "depth = 3\n[group]\npreset = \"nope\"\n").unwrap();
        let e = l.group().unwrap_err().to_string();
        assert!(e.starts_with("c.toml:1:") && e.contains("seed"), "{e}");
        let l = parse("c.toml", "seed = 0\n[group]\npreset = \"nope\"\n").unwrap();
        assert!(l.group().unwrap_err().to_string().starts_with("c.toml:3:"));
    }

    #[test]
    fn inline_generators() {
        let src = "seed = 0\n[group]\n[[group.generators]]\nname = \"x\"\nmatrix = [2.0, 0.0, 0.0, 0.5]\n";
        let g = parse("c.toml", src).unwrap().group().unwrap();
        assert_eq!((g.dim(), g.rank()), (2, 1));
        let bad = "seed = 0\n[group]\n[[group.generators]]\nname = \"x\"\nmatrix = [2.0, 0.0, 0.0, 2.0]\n";
        let e = parse("c.toml", bad).unwrap().group().unwrap_err().to_string();
        assert!(e.starts_with("c.toml:5:"), "{e}");
    }
}
