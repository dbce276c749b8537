//! Config parsing and validation.
//!
//! The config is a flat-sectioned TOML document. Validation walks the parsed
//! tree field by field, rejects unknown keys, and reports every problem at
//! once rather than stopping at the first.

use std::collections::BTreeSet;

use serde::Serialize;
use toml::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    Solve,
    Compare,
    Sweep,
    Resonance,
    Boardgame,
    Hierarchy,
    Convrate,
    Check,
}

impl Subcommand {
    pub fn name(&self) -> &'static str {
        match self {
            Subcommand::Solve => "solve",
            Subcommand::Compare => "compare",
            Subcommand::Sweep => "sweep",
            Subcommand::Resonance => "resonance",
            Subcommand::Boardgame => "boardgame",
            Subcommand::Hierarchy => "hierarchy",
            Subcommand::Convrate => "convrate",
            Subcommand::Check => "check",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "solve" => Subcommand::Solve,
            "compare" => Subcommand::Compare,
            "sweep" => Subcommand::Sweep,
            "resonance" => Subcommand::Resonance,
            "boardgame" => Subcommand::Boardgame,
            "hierarchy" => Subcommand::Hierarchy,
            "convrate" => Subcommand::Convrate,
            "check" => Subcommand::Check,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GridBlock {
    pub dim: usize,
    pub modes: Vec<usize>,
    pub lengths: Vec<f64>,
    pub dealias: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhysicsBlock {
    pub equation: String,
    pub beta: f64,
    pub n: u64,
    pub n_list: Vec<u64>,
    pub profile: String,
    pub b0: f64,
    pub sigma: f64,
    pub shift: f64,
    pub radius: f64,
    pub q: f64,
    pub s: f64,
    pub z: f64,
    pub ablation: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TimeBlock {
    pub t_final: f64,
    pub dt: f64,
    pub stride: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DataBlock {
    pub recipe: String,
    pub seed: u64,
    pub amplitude: f64,
    pub cutoff: f64,
    pub mode: Vec<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoardgameBlock {
    pub k_max: u32,
    pub j_max: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct OutputBlock {
    pub directory: String,
    pub write_fields: bool,
}

/// Fully validated run configuration with documented defaults filled in.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub grid: GridBlock,
    pub physics: PhysicsBlock,
    pub time: TimeBlock,
    pub data: DataBlock,
    pub boardgame: BoardgameBlock,
    pub output: OutputBlock,
}

const SIXTEEN_PI: f64 = 16.0 * std::f64::consts::PI;

impl RunConfig {
    pub fn defaults(subcommand: Subcommand) -> Self {
        RunConfig {
            subcommand,
            grid: GridBlock {
                dim: 1,
                modes: vec![512],
                lengths: vec![SIXTEEN_PI],
                dealias: true,
            },
            physics: PhysicsBlock {
                equation: "hartree".into(),
                beta: 0.2,
                n: 64,
                n_list: vec![32, 64, 128, 256, 512, 1024],
                profile: "gaussian".into(),
                b0: 1.0,
                sigma: 1.0,
                shift: 0.5,
                radius: 1.0,
                q: 1.0,
                s: 1.0,
                z: 20.0,
                ablation: false,
            },
            time: TimeBlock {
                t_final: 1.0,
                dt: 1e-3,
                stride: 10,
            },
            data: DataBlock {
                recipe: "smooth-random".into(),
                seed: 7,
                amplitude: 1.0,
                cutoff: 8.0,
                mode: vec![0],
            },
            boardgame: BoardgameBlock { k_max: 6, j_max: 6 },
            output: OutputBlock {
                directory: "out".into(),
                write_fields: false,
            },
        }
    }
}

/// Collects every validation problem found in one pass.
pub struct Validator {
    pub errors: Vec<String>,
}

impl Validator {
    fn new() -> Self {
        Validator { errors: Vec::new() }
    }

    fn err(&mut self, msg: String) {
        self.errors.push(msg);
    }
}

macro_rules! take_scalar {
    ($v:ident, $table:expr, $key:expr, $as:ident, $ty:literal, $dest:expr) => {
        if let Some(val) = $table.get($key) {
            match val.$as() {
                Some(x) => $dest(x),
                None => $v.err(format!(
                    "[{}] key '{}' must be {}",
                    $table.name, $key, $ty
                )),
            }
        }
    };
}

struct Section<'a> {
    name: &'a str,
    table: &'a toml::value::Table,
}

impl<'a> Section<'a> {
    fn get(&self, key: &str) -> Option<&'a Value> {
        self.table.get(key)
    }

    fn check_keys(&self, v: &mut Validator, allowed: &[&str]) {
        let allowed: BTreeSet<&str> = allowed.iter().copied().collect();
        for key in self.table.keys() {
            if !allowed.contains(key.as_str()) {
                v.err(format!(
                    "[{}] unknown key '{}'; allowed: {}",
                    self.name,
                    key,
                    allowed.iter().copied().collect::<Vec<_>>().join(", ")
                ));
            }
        }
    }
}

/// Parse and validate a config document against a subcommand. On failure the
/// list of all validation errors is returned.
pub fn parse_config(text: &str, subcommand: Subcommand) -> Result<RunConfig, Vec<String>> {
    let value: Value = toml::from_str(text).map_err(|e| vec![format!("TOML syntax: {e}")])?;
    let root = match value.as_table() {
        Some(t) => t,
        None => return Err(vec!["config root must be a table".into()]),
    };
    let mut v = Validator::new();
    let mut cfg = RunConfig::defaults(subcommand);

    for key in root.keys() {
        if !matches!(
            key.as_str(),
            "subcommand" | "grid" | "physics" | "time" | "data" | "boardgame" | "output"
        ) {
            v.err(format!("unknown top-level key '{key}'"));
        }
    }

    if let Some(sc) = root.get("subcommand") {
        match sc.as_str().and_then(Subcommand::parse) {
            Some(s) if s == subcommand => {}
            Some(s) => v.err(format!(
                "config names subcommand '{}' but '{}' was invoked",
                s.name(),
                subcommand.name()
            )),
            None => v.err(format!(
                "subcommand must be one of solve, compare, sweep, resonance, boardgame, hierarchy, convrate, check; got {sc}"
            )),
        }
    }

    let section = |name: &'static str| -> Option<Section<'_>> {
        root.get(name).map(|val| Section {
            name,
            table: val.as_table().unwrap_or(&EMPTY_TABLE),
        })
    };

    if let Some(val) = root.get("grid") {
        if !val.is_table() {
            v.err("[grid] must be a table".into());
        }
    }

    if let Some(sec) = section("grid") {
        sec.check_keys(&mut v, &["dim", "modes", "lengths", "dealias"]);
        take_scalar!(v, sec, "dim", as_integer, "an integer", |x: i64| {
            if (1..=3).contains(&x) {
                cfg.grid.dim = x as usize;
            } else {
                v.errors.push(format!("[grid] dim must lie in 1..=3, got {x}"));
            }
        });
        if let Some(val) = sec.get("modes") {
            match int_list(val) {
                Some(list) if !list.is_empty() => {
                    cfg.grid.modes = list.iter().map(|&x| x as usize).collect()
                }
                _ => v.err("[grid] modes must be a nonempty list of integers".into()),
            }
        }
        if let Some(val) = sec.get("lengths") {
            match float_list(val) {
                Some(list) if !list.is_empty() => cfg.grid.lengths = list,
                _ => v.err("[grid] lengths must be a nonempty list of numbers".into()),
            }
        }
        take_scalar!(v, sec, "dealias", as_bool, "a boolean", |x| cfg.grid.dealias = x);
    }

    if let Some(sec) = section("physics") {
        sec.check_keys(
            &mut v,
            &[
                "equation", "beta", "n", "n_list", "profile", "b0", "sigma", "shift", "radius",
                "q", "s", "z", "ablation",
            ],
        );
        take_scalar!(v, sec, "equation", as_str, "a string", |x: &str| {
            if x == "cubic" || x == "hartree" {
                cfg.physics.equation = x.to_string();
            } else {
                v.errors
                    .push(format!("[physics] equation must be 'cubic' or 'hartree', got '{x}'"));
            }
        });
        take_scalar!(v, sec, "beta", as_float, "a number", |x: f64| {
            if x > 0.0 && x < 1.0 {
                cfg.physics.beta = x;
            } else {
                v.errors
                    .push(format!("[physics] beta must lie in the open interval (0, 1), got {x}"));
            }
        });
        take_scalar!(v, sec, "n", as_integer, "an integer", |x: i64| {
            if x >= 1 {
                cfg.physics.n = x as u64;
            } else {
                v.errors.push(format!("[physics] n must be at least 1, got {x}"));
            }
        });
        if let Some(val) = sec.get("n_list") {
            match int_list(val) {
                Some(list) if list.iter().all(|&x| x >= 1) => {
                    cfg.physics.n_list = list.iter().map(|&x| x as u64).collect();
                }
                _ => v.err("[physics] n_list must be a list of positive integers".into()),
            }
        }
        take_scalar!(v, sec, "profile", as_str, "a string", |x: &str| {
            cfg.physics.profile = x.to_string()
        });
        take_scalar!(v, sec, "b0", as_float, "a number", |x: f64| {
            if x > 0.0 {
                cfg.physics.b0 = x;
            } else {
                v.errors.push(format!("[physics] b0 must be positive, got {x}"));
            }
        });
        take_scalar!(v, sec, "sigma", as_float, "a number", |x: f64| {
            if x > 0.0 {
                cfg.physics.sigma = x;
            } else {
                v.errors.push(format!("[physics] sigma must be positive, got {x}"));
            }
        });
        take_scalar!(v, sec, "shift", as_float, "a number", |x: f64| cfg.physics.shift = x);
        take_scalar!(v, sec, "radius", as_float, "a number", |x: f64| {
            if x > 0.0 {
                cfg.physics.radius = x;
            } else {
                v.errors.push(format!("[physics] radius must be positive, got {x}"));
            }
        });
        take_scalar!(v, sec, "q", as_float, "a number", |x: f64| {
            if x >= 1.0 {
                cfg.physics.q = x;
            } else {
                v.errors.push(format!("[physics] q must be at least 1, got {x}"));
            }
        });
        take_scalar!(v, sec, "s", as_float, "a number", |x: f64| {
            if (0.0..=1.0).contains(&x) {
                cfg.physics.s = x;
            } else {
                v.errors.push(format!("[physics] s must lie in [0, 1], got {x}"));
            }
        });
        take_scalar!(v, sec, "z", as_float, "a number", |x: f64| {
            if x > 0.0 {
                cfg.physics.z = x;
            } else {
                v.errors.push(format!("[physics] z must be positive, got {x}"));
            }
        });
        take_scalar!(v, sec, "ablation", as_bool, "a boolean", |x| cfg.physics.ablation = x);
    }

    if let Some(sec) = section("time") {
        sec.check_keys(&mut v, &["t_final", "dt", "stride"]);
        take_scalar!(v, sec, "t_final", as_float, "a number", |x: f64| {
            if x >= 0.0 {
                cfg.time.t_final = x;
            } else {
                v.errors.push(format!("[time] t_final must be nonnegative, got {x}"));
            }
        });
        take_scalar!(v, sec, "dt", as_float, "a number", |x: f64| {
            if x > 0.0 {
                cfg.time.dt = x;
            } else {
                v.errors.push(format!("[time] dt must be positive, got {x}"));
            }
        });
        take_scalar!(v, sec, "stride", as_integer, "an integer", |x: i64| {
            if x >= 1 {
                cfg.time.stride = x as usize;
            } else {
                v.errors.push(format!("[time] stride must be at least 1, got {x}"));
            }
        });
    }

    if let Some(sec) = section("data") {
        sec.check_keys(&mut v, &["recipe", "seed", "amplitude", "cutoff", "mode"]);
        take_scalar!(v, sec, "recipe", as_str, "a string", |x: &str| {
            if mfnls_core::data::RecipeKind::parse(x).is_ok() {
                cfg.data.recipe = x.to_string();
            } else {
                v.errors.push(format!(
                    "[data] recipe must be one of smooth-random, hq-limited, single-mode, resonant; got '{x}'"
                ));
            }
        });
        take_scalar!(v, sec, "seed", as_integer, "an integer", |x: i64| {
            cfg.data.seed = x as u64
        });
        take_scalar!(v, sec, "amplitude", as_float, "a number", |x: f64| {
            if x > 0.0 {
                cfg.data.amplitude = x;
            } else {
                v.errors.push(format!("[data] amplitude must be positive, got {x}"));
            }
        });
        take_scalar!(v, sec, "cutoff", as_float, "a number", |x: f64| {
            if x > 0.0 {
                cfg.data.cutoff = x;
            } else {
                v.errors.push(format!("[data] cutoff must be positive, got {x}"));
            }
        });
        if let Some(val) = sec.get("mode") {
            match int_list(val) {
                Some(list) if !list.is_empty() && list.len() <= 3 => cfg.data.mode = list,
                _ => v.err("[data] mode must be a list of 1 to 3 integers".into()),
            }
        }
    }

    if let Some(sec) = section("boardgame") {
        sec.check_keys(&mut v, &["k_max", "j_max"]);
        take_scalar!(v, sec, "k_max", as_integer, "an integer", |x: i64| {
            if (1..=8).contains(&x) {
                cfg.boardgame.k_max = x as u32;
            } else {
                v.errors.push(format!("[boardgame] k_max must lie in 1..=8, got {x}"));
            }
        });
        take_scalar!(v, sec, "j_max", as_integer, "an integer", |x: i64| {
            if (1..=8).contains(&x) {
                cfg.boardgame.j_max = x as u32;
            } else {
                v.errors.push(format!("[boardgame] j_max must lie in 1..=8, got {x}"));
            }
        });
    }

    if let Some(sec) = section("output") {
        sec.check_keys(&mut v, &["directory", "write_fields"]);
        take_scalar!(v, sec, "directory", as_str, "a string", |x: &str| {
            cfg.output.directory = x.to_string()
        });
        take_scalar!(v, sec, "write_fields", as_bool, "a boolean", |x| {
            cfg.output.write_fields = x
        });
    }

    // cross-field consistency
    if cfg.grid.modes.len() != cfg.grid.dim {
        v.err(format!(
            "[grid] modes lists {} axes but dim = {}",
            cfg.grid.modes.len(),
            cfg.grid.dim
        ));
    } else {
        for (a, &m) in cfg.grid.modes.iter().enumerate() {
            if m == 0 || m % 2 != 0 {
                v.err(format!("[grid] modes[{a}] must be positive and even, got {m}"));
            }
        }
    }
    if cfg.grid.lengths.len() != cfg.grid.dim {
        v.err(format!(
            "[grid] lengths lists {} axes but dim = {}",
            cfg.grid.lengths.len(),
            cfg.grid.dim
        ));
    } else {
        for (a, &l) in cfg.grid.lengths.iter().enumerate() {
            if !(l > 0.0) || !l.is_finite() {
                v.err(format!("[grid] lengths[{a}] must be positive and finite, got {l}"));
            }
        }
    }
    if cfg.time.t_final > 0.0 && cfg.time.dt > cfg.time.t_final {
        v.err(format!(
            "[time] dt = {} exceeds t_final = {}",
            cfg.time.dt, cfg.time.t_final
        ));
    }
    if matches!(
        subcommand,
        Subcommand::Sweep | Subcommand::Resonance | Subcommand::Convrate
    ) {
        if cfg.physics.n_list.len() < 4 {
            v.err(format!(
                "{} requires an N list with at least 4 entries",
                subcommand.name()
            ));
        }
        if !mfnls_core::fit::is_dyadic(&cfg.physics.n_list) {
            v.err(format!("{} requires dyadic N_list", subcommand.name()));
        }
    }

    if v.errors.is_empty() {
        Ok(cfg)
    } else {
        Err(v.errors)
    }
}

static EMPTY_TABLE: once_table::Lazy = once_table::Lazy::new();

mod once_table {
    use std::sync::OnceLock;

    pub struct Lazy {
        inner: OnceLock<toml::value::Table>,
    }

    impl Lazy {
        pub const fn new() -> Self {
            Lazy {
                inner: OnceLock::new(),
            }
        }
    }

    impl std::ops::Deref for Lazy {
        type Target = toml::value::Table;
        fn deref(&self) -> &Self::Target {
            self.inner.get_or_init(toml::value::Table::new)
        }
    }
}

fn int_list(val: &Value) -> Option<Vec<i64>> {
    val.as_array()?
        .iter()
        .map(|x| x.as_integer())
        .collect::<Option<Vec<_>>>()
}

fn float_list(val: &Value) -> Option<Vec<f64>> {
    val.as_array()?
        .iter()
        .map(|x| {
            x.as_float()
                .or_else(|| x.as_integer().map(|i| i as f64))
        })
        .collect::<Option<Vec<_>>>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config("", Subcommand::Sweep).unwrap();
        assert_eq!(cfg.grid.modes, vec![512]);
        assert_eq!(cfg.time.stride, 10);
        assert_eq!(cfg.physics.profile, "gaussian");
    }

    #[test]
    fn beta_out_of_range_names_field_and_interval() {
        let errs = parse_config("[physics]\nbeta = 1.5\n", Subcommand::Sweep).unwrap_err();
        assert!(errs.iter().any(|e| e.contains("beta") && e.contains("(0, 1)")), "{errs:?}");
    }

    #[test]
    fn non_dyadic_n_list_rejected_for_sweep() {
        let errs =
            parse_config("[physics]\nn_list = [32, 48, 64, 128]\n", Subcommand::Sweep).unwrap_err();
        assert!(errs.iter().any(|e| e.contains("dyadic")), "{errs:?}");
    }

    #[test]
    fn unknown_keys_are_hard_errors_and_all_reported() {
        let text = "plotting = true\n[grid]\nmodse = [64]\n[physics]\nbeta = 2.0\n";
        let errs = parse_config(text, Subcommand::Solve).unwrap_err();
        assert!(errs.len() >= 3, "{errs:?}");
        assert!(errs.iter().any(|e| e.contains("plotting")));
        assert!(errs.iter().any(|e| e.contains("modse")));
        assert!(errs.iter().any(|e| e.contains("beta")));
    }

    #[test]
    fn subcommand_mismatch_rejected() {
        let errs = parse_config("subcommand = \"solve\"\n", Subcommand::Sweep).unwrap_err();
        assert!(errs[0].contains("solve") && errs[0].contains("sweep"));
    }
}
