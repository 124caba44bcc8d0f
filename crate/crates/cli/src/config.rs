use std::collections::BTreeMap;

use crate::error::{CliError, Result};
use mdpc::ProblemSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Analyze,
    Icf,
    Stability,
    Run,
    Bench,
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            CommandKind::Analyze => "analyze",
            CommandKind::Icf => "icf",
            CommandKind::Stability => "stability",
            CommandKind::Run => "run",
            CommandKind::Bench => "bench",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        match name {
            "analyze" => Some(CommandKind::Analyze),
            "icf" => Some(CommandKind::Icf),
            "stability" => Some(CommandKind::Stability),
            "run" => Some(CommandKind::Run),
            "bench" => Some(CommandKind::Bench),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaChoice {
    Fixed(f64),
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtChoice {
    Fixed(f64),
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemChoice {
    Circular,
    Burgers,
    Advection3d,
}

impl ProblemChoice {
    pub fn build(&self) -> ProblemSpec {
        match self {
            ProblemChoice::Circular => ProblemSpec::circular(),
            ProblemChoice::Burgers => ProblemSpec::burgers_diagonal(),
            ProblemChoice::Advection3d => ProblemSpec::advection_3d(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProblemChoice::Circular => "circular",
            ProblemChoice::Burgers => "burgers",
            ProblemChoice::Advection3d => "advection3d",
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnalyzeConfig {
    pub order: u32,
    pub beta: BetaChoice,
    pub ppw: Vec<f64>,
    pub n_theta: usize,
    pub ppw_ref: f64,
}

#[derive(Debug, Clone)]
pub struct IcfConfig {
    pub order: u32,
    pub dims: usize,
    pub ppw_min: f64,
    pub ppw_max: f64,
    pub ppw_step: f64,
}

#[derive(Debug, Clone)]
pub struct StabilityConfig {
    pub order: u32,
    pub beta: BetaChoice,
    pub speeds: Vec<f64>,
    pub sigma: Option<Vec<f64>>,
    pub ppw_ref: f64,
}

#[derive(Debug, Clone)]
pub struct RunCommandConfig {
    pub problem: ProblemChoice,
    pub n: usize,
    pub order: u32,
    pub beta: BetaChoice,
    pub dt: DtChoice,
    pub final_time: Option<f64>,
    pub ppw_ref: f64,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub problem: ProblemChoice,
    pub n: usize,
    pub order: u32,
    pub beta: BetaChoice,
    pub final_time: Option<f64>,
    pub isotropy_match: bool,
    pub ppw_ref: f64,
}

#[derive(Debug, Clone)]
pub enum CommandConfig {
    Analyze(AnalyzeConfig),
    Icf(IcfConfig),
    Stability(StabilityConfig),
    Run(RunCommandConfig),
    Bench(BenchConfig),
}

#[derive(Debug, Clone)]
pub struct ParsedConfig {
    pub command: CommandConfig,
    pub out_dir: Option<String>,
}

struct Entry {
    value: String,
    line: usize,
    used: bool,
}

struct ConfigMap {
    entries: BTreeMap<String, Entry>,
}

impl ConfigMap {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let content = content.trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| {
                CliError::config_at(line, format!("expected `key = value`, got `{content}`"))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(CliError::config_at(line, "empty key"));
            }
            if value.is_empty() {
                return Err(CliError::config_at(line, format!("key `{key}` has no value")));
            }
            if let Some(prev) = entries.get(&key) {
                let Entry { line: first, .. } = prev;
                return Err(CliError::config_at(
                    line,
                    format!("duplicate key `{key}` (first set on line {first})"),
                ));
            }
            entries.insert(key, Entry { value, line, used: false });
        }
        Ok(Self { entries })
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.get_mut(key).map(|entry| {
            entry.used = true;
            (entry.value.clone(), entry.line)
        })
    }

    fn string(&mut self, key: &str) -> Option<(String, usize)> {
        self.take(key)
    }

    fn f64(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<f64>().map(Some).map_err(|_| {
                CliError::config_at(line, format!("key `{key}` expects a number, got `{v}`"))
            }),
        }
    }

    fn usize(&mut self, key: &str) -> Result<Option<usize>> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<usize>().map(Some).map_err(|_| {
                CliError::config_at(line, format!("key `{key}` expects a positive integer, got `{v}`"))
            }),
        }
    }

    fn u64(&mut self, key: &str) -> Result<Option<u64>> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<u64>().map(Some).map_err(|_| {
                CliError::config_at(line, format!("key `{key}` expects an integer, got `{v}`"))
            }),
        }
    }

    fn bool(&mut self, key: &str) -> Result<Option<bool>> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => match v.as_str() {
                "true" | "yes" | "on" => Ok(Some(true)),
                "false" | "no" | "off" => Ok(Some(false)),
                _ => Err(CliError::config_at(
                    line,
                    format!("key `{key}` expects true/false, got `{v}`"),
                )),
            },
        }
    }

    fn f64_list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => v
                .split(',')
                .map(|part| part.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map(Some)
                .map_err(|_| {
                    CliError::config_at(
                        line,
                        format!("key `{key}` expects comma-separated numbers, got `{v}`"),
                    )
                }),
        }
    }

    fn beta(&mut self, key: &str) -> Result<Option<BetaChoice>> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => {
                if v == "auto" {
                    return Ok(Some(BetaChoice::Auto));
                }
                let b: f64 = v.parse().map_err(|_| {
                    CliError::config_at(line, format!("key `{key}` expects a number or `auto`, got `{v}`"))
                })?;
                if !b.is_finite() || b < 0.0 {
                    return Err(CliError::config_at(
                        line,
                        format!("key `{key}` must be non-negative, got `{v}`"),
                    ));
                }
                Ok(Some(BetaChoice::Fixed(b)))
            }
        }
    }

    fn order(&mut self) -> Result<Option<u32>> {
        match self.take("order") {
            None => Ok(None),
            Some((v, line)) => {
                let order: u32 = v.parse().map_err(|_| {
                    CliError::config_at(line, format!("key `order` expects an integer, got `{v}`"))
                })?;
                if order != 4 && order != 6 {
                    return Err(CliError::config_at(
                        line,
                        format!("unsupported order {order}; supported orders are 4 and 6"),
                    ));
                }
                Ok(Some(order))
            }
        }
    }

    fn problem(&mut self) -> Result<Option<ProblemChoice>> {
        match self.take("problem") {
            None => Ok(None),
            Some((v, line)) => match v.as_str() {
                "circular" => Ok(Some(ProblemChoice::Circular)),
                "burgers" | "burgers_diagonal" => Ok(Some(ProblemChoice::Burgers)),
                "advection3d" | "advection_3d" => Ok(Some(ProblemChoice::Advection3d)),
                _ => Err(CliError::config_at(
                    line,
                    format!("unknown problem `{v}`; expected circular, burgers, or advection3d"),
                )),
            },
        }
    }

    fn finish(self) -> Result<()> {
        for (key, entry) in &self.entries {
            if !entry.used {
                return Err(CliError::config_at(
                    entry.line,
                    format!("unknown key `{key}` for this command"),
                ));
            }
        }
        Ok(())
    }
}

/// Parse a `key = value` config (with `#` comments) for the given subcommand.
/// A `command` key, when present, must agree with the subcommand.
pub fn parse_config(text: &str, kind: CommandKind) -> Result<ParsedConfig> {
    let mut map = ConfigMap::parse(text)?;

    if let Some((value, line)) = map.string("command") {
        match CommandKind::from_name(&value) {
            Some(k) if k == kind => {}
            Some(k) => {
                return Err(CliError::config_at(
                    line,
                    format!(
                        "config says command = {}, but the {} subcommand was invoked",
                        k.name(),
                        kind.name()
                    ),
                ))
            }
            None => {
                return Err(CliError::config_at(
                    line,
                    format!("unknown command `{value}`; expected analyze, icf, stability, run, or bench"),
                ))
            }
        }
    }

    let order = map
        .order()?
        .ok_or_else(|| CliError::config(missing_keys_message(kind)))?;
    let out_dir = map.string("out_dir").map(|(v, _)| v);
    // reserved key: accepted and type-checked, not consumed by any numerics
    map.u64("seed")?;
    let ppw_ref = map.f64("ppw_ref")?.unwrap_or(8.0);
    if !ppw_ref.is_finite() || ppw_ref <= 2.0 {
        return Err(CliError::config("ppw_ref must exceed 2 points per wavelength"));
    }

    let command = match kind {
        CommandKind::Analyze => {
            let beta = map.beta("beta")?.unwrap_or(BetaChoice::Fixed(0.0));
            let ppw = map.f64_list("ppw")?.unwrap_or_else(|| vec![4.0, 8.0, 16.0]);
            let n_theta = map.usize("n_theta")?.unwrap_or(73);
            if n_theta < 4 {
                return Err(CliError::config("n_theta must be at least 4"));
            }
            CommandConfig::Analyze(AnalyzeConfig { order, beta, ppw, n_theta, ppw_ref })
        }
        CommandKind::Icf => {
            let dims = map.usize("dims")?.unwrap_or(2);
            if !(2..=3).contains(&dims) {
                return Err(CliError::config("dims must be 2 or 3"));
            }
            let ppw_min = map.f64("ppw_min")?.unwrap_or(4.0);
            let ppw_max = map.f64("ppw_max")?.unwrap_or(16.0);
            let ppw_step = map.f64("ppw_step")?.unwrap_or(1.0);
            if !ppw_step.is_finite() || ppw_step <= 0.0 || ppw_max < ppw_min || ppw_min <= 2.0 {
                return Err(CliError::config(
                    "ppw range must satisfy 2 < ppw_min <= ppw_max with a positive step",
                ));
            }
            CommandConfig::Icf(IcfConfig { order, dims, ppw_min, ppw_max, ppw_step })
        }
        CommandKind::Stability => {
            let beta = map.beta("beta")?.unwrap_or(BetaChoice::Fixed(0.0));
            let speeds = map.f64_list("speeds")?.unwrap_or_else(|| vec![1.0, 1.0]);
            if speeds.is_empty() || speeds.len() > 3 {
                return Err(CliError::config("speeds expects 1 to 3 components"));
            }
            let sigma = map.f64_list("sigma")?;
            if let Some(s) = &sigma {
                if s.len() != speeds.len() {
                    return Err(CliError::config(
                        "sigma must have as many components as speeds",
                    ));
                }
            }
            CommandConfig::Stability(StabilityConfig { order, beta, speeds, sigma, ppw_ref })
        }
        CommandKind::Run => {
            let problem = map.problem()?.unwrap_or(ProblemChoice::Circular);
            let n = map.usize("n")?.unwrap_or(100);
            let beta = map.beta("beta")?.unwrap_or(BetaChoice::Fixed(0.0));
            let dt = match map.take("dt") {
                None => DtChoice::Auto,
                Some((v, line)) => {
                    if v == "auto" {
                        DtChoice::Auto
                    } else {
                        let dt: f64 = v.parse().map_err(|_| {
                            CliError::config_at(
                                line,
                                format!("key `dt` expects a number or `auto`, got `{v}`"),
                            )
                        })?;
                        DtChoice::Fixed(dt)
                    }
                }
            };
            let final_time = map.f64("final_time")?;
            CommandConfig::Run(RunCommandConfig { problem, n, order, beta, dt, final_time, ppw_ref })
        }
        CommandKind::Bench => {
            let problem = map.problem()?.unwrap_or(ProblemChoice::Circular);
            let n = map.usize("n")?.unwrap_or(100);
            let beta = map.beta("beta")?.unwrap_or(BetaChoice::Auto);
            let final_time = map.f64("final_time")?;
            let isotropy_match = map.bool("isotropy_match")?.unwrap_or(false);
            CommandConfig::Bench(BenchConfig { problem, n, order, beta, final_time, isotropy_match, ppw_ref })
        }
    };

    map.finish()?;
    Ok(ParsedConfig { command, out_dir })
}

fn missing_keys_message(kind: CommandKind) -> String {
    format!(
        "missing required key(s): order (command {}; optional keys have defaults)",
        kind.name()
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_run_config_is_valid() {
        let cfg = parse_config(
            "order = 4\nbeta = 0.24\ncommand = run\nproblem = circular",
            CommandKind::Run,
        )
        .unwrap();
        match cfg.command {
            CommandConfig::Run(run) => {
                assert_eq!(run.order, 4);
                assert_eq!(run.beta, BetaChoice::Fixed(0.24));
                assert_eq!(run.problem, ProblemChoice::Circular);
                assert_eq!(run.n, 100);
                assert_eq!(run.dt, DtChoice::Auto);
            }
            other => panic!("wrong command parsed: {other:?}"),
        }
    }

    #[test]
    fn unsupported_order_is_rejected_with_line() {
        let err = parse_config("order = 8", CommandKind::Run).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("unsupported order 8"), "{text}");
        assert!(text.contains("line 1"), "{text}");
    }

    #[test]
    fn empty_input_lists_required_keys() {
        let err = parse_config("", CommandKind::Stability).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("missing required key(s): order"), "{text}");
        assert!(text.contains("stability"), "{text}");
    }

    #[test]
    fn unknown_keys_are_rejected_with_line() {
        let err = parse_config("order = 4\n\n# comment\nbogus = 1", CommandKind::Icf).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("unknown key `bogus`"), "{text}");
        assert!(text.contains("line 4"), "{text}");
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let err = parse_config("order = 4\norder = 6", CommandKind::Icf).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("duplicate key `order`"), "{text}");
        assert!(text.contains("line 2"), "{text}");
        assert!(text.contains("line 1"), "{text}");
    }

    #[test]
    fn command_mismatch_is_rejected() {
        let err = parse_config("command = run\norder = 4", CommandKind::Icf).unwrap_err();
        assert!(err.to_string().contains("command = run"), "{err}");
    }

    #[test]
    fn type_mismatch_reports_line() {
        let err = parse_config("order = 4\nn = lots", CommandKind::Run).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("positive integer"), "{text}");
        assert!(text.contains("line 2"), "{text}");
    }

    #[test]
    fn comments_and_inline_comments_are_stripped() {
        let cfg = parse_config(
            "# full line\norder = 6  # trailing\nppw_min = 5",
            CommandKind::Icf,
        )
        .unwrap();
        match cfg.command {
            CommandConfig::Icf(icf) => {
                assert_eq!(icf.order, 6);
                assert_eq!(icf.ppw_min, 5.0);
            }
            other => panic!("wrong command parsed: {other:?}"),
        }
    }

    #[test]
    fn auto_beta_and_dt_parse() {
        let cfg = parse_config("order = 4\nbeta = auto\ndt = auto", CommandKind::Run).unwrap();
        match cfg.command {
            CommandConfig::Run(run) => {
                assert_eq!(run.beta, BetaChoice::Auto);
                assert_eq!(run.dt, DtChoice::Auto);
            }
            other => panic!("wrong command parsed: {other:?}"),
        }
    }

    #[test]
    fn malformed_lines_are_rejected() {
        let err = parse_config("order 4", CommandKind::Run).unwrap_err();
        assert!(err.to_string().contains("expected `key = value`"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }
}
