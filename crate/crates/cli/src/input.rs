//! Protocol sources: either a JSON document on disk or a built-in inline
//! spec of the form `kind:key=value,...`.

use std::path::PathBuf;

use linkwait::{
    build_repeater, build_switch, parse_protocol, GenModel, ProtocolNode, RepeaterSpec, SwitchSpec,
};

use crate::CliError;

/// Built-in configurations addressable from the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum InlineSpec {
    Repeater { n: u32, p_gen: f64, p_swap: f64 },
    Switch { k: u32, p_fuse: f64, arm_p: f64 },
    Chain { segments: u64, p_gen: f64 },
    Generate { p: f64 },
}

impl InlineSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let (kind, rest) = text
            .split_once(':')
            .ok_or_else(|| bad_spec(text, "expected kind:key=value,..."))?;
        let mut fields = std::collections::BTreeMap::new();
        for part in rest.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| bad_spec(text, "expected key=value pairs"))?;
            fields.insert(key.trim().to_string(), value.trim().to_string());
        }
        let get = |key: &str| -> Result<f64, CliError> {
            fields
                .get(key)
                .ok_or_else(|| bad_spec(text, &format!("missing field `{key}`")))?
                .parse::<f64>()
                .map_err(|_| bad_spec(text, &format!("field `{key}` is not a number")))
        };
        let spec = match kind {
            "repeater" => InlineSpec::Repeater {
                n: get("n")? as u32,
                p_gen: get("p_gen")?,
                p_swap: get("p_swap")?,
            },
            "switch" => InlineSpec::Switch {
                k: get("k")? as u32,
                p_fuse: get("p_fuse")?,
                arm_p: get("arm_p")?,
            },
            "chain" => InlineSpec::Chain {
                segments: get("segments")? as u64,
                p_gen: get("p_gen")?,
            },
            "generate" => InlineSpec::Generate { p: get("p")? },
            other => {
                return Err(bad_spec(
                    text,
                    &format!("unknown kind `{other}` (expected repeater, switch, chain, generate)"),
                ))
            }
        };
        let expected: &[&str] = match spec {
            InlineSpec::Repeater { .. } => &["n", "p_gen", "p_swap"],
            InlineSpec::Switch { .. } => &["k", "p_fuse", "arm_p"],
            InlineSpec::Chain { .. } => &["segments", "p_gen"],
            InlineSpec::Generate { .. } => &["p"],
        };
        for key in fields.keys() {
            if !expected.contains(&key.as_str()) {
                return Err(bad_spec(text, &format!("unknown field `{key}`")));
            }
        }
        Ok(spec)
    }

    pub fn repeater_spec(&self, model: GenModel) -> Result<RepeaterSpec, CliError> {
        match *self {
            InlineSpec::Repeater { n, p_gen, p_swap } => {
                Ok(RepeaterSpec::new(n, p_gen, p_swap, model)?)
            }
            _ => Err(CliError::Input(
                "this command requires a repeater spec".into(),
            )),
        }
    }
}

fn bad_spec(text: &str, reason: &str) -> CliError {
    CliError::Input(format!("invalid spec `{text}`: {reason}"))
}

/// Where the protocol tree comes from.
pub enum Source {
    Inline(InlineSpec),
    File(PathBuf),
}

impl Source {
    pub fn from_args(input: Option<PathBuf>, spec: Option<&str>) -> Result<Self, CliError> {
        match (input, spec) {
            (Some(path), None) => Ok(Source::File(path)),
            (None, Some(text)) => Ok(Source::Inline(InlineSpec::parse(text)?)),
            _ => Err(CliError::Input(
                "provide exactly one of --input and --spec".into(),
            )),
        }
    }

    pub fn inline(&self) -> Option<&InlineSpec> {
        match self {
            Source::Inline(spec) => Some(spec),
            Source::File(_) => None,
        }
    }

    /// Canonical description used in metadata lines and the config hash.
    pub fn describe(&self) -> String {
        match self {
            Source::Inline(InlineSpec::Repeater { n, p_gen, p_swap }) => {
                format!("repeater:n={n},p_gen={p_gen},p_swap={p_swap}")
            }
            Source::Inline(InlineSpec::Switch { k, p_fuse, arm_p }) => {
                format!("switch:k={k},p_fuse={p_fuse},arm_p={arm_p}")
            }
            Source::Inline(InlineSpec::Chain { segments, p_gen }) => {
                format!("chain:segments={segments},p_gen={p_gen}")
            }
            Source::Inline(InlineSpec::Generate { p }) => format!("generate:p={p}"),
            Source::File(path) => format!("file:{}", path.display()),
        }
    }

    /// Builds or parses the protocol tree.
    pub fn tree(&self) -> Result<ProtocolNode, CliError> {
        match self {
            Source::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Input(format!("cannot read {}: {e}", path.display()))
                })?;
                Ok(parse_protocol(&text)?)
            }
            Source::Inline(spec) => match *spec {
                InlineSpec::Repeater { n, p_gen, p_swap } => Ok(build_repeater(
                    &RepeaterSpec::new(n, p_gen, p_swap, GenModel::Discrete)?,
                )),
                InlineSpec::Switch { k, p_fuse, arm_p } => {
                    let arm = ProtocolNode::generate(arm_p)?;
                    Ok(build_switch(&SwitchSpec::new(k, p_fuse, arm)?))
                }
                InlineSpec::Chain { segments, p_gen } => {
                    if segments < 1 {
                        return Err(CliError::Input("chain needs at least one segment".into()));
                    }
                    let links = vec![ProtocolNode::generate(p_gen)?; segments as usize];
                    Ok(ProtocolNode::restart(1.0, links)?)
                }
                InlineSpec::Generate { p } => Ok(ProtocolNode::generate(p)?),
            },
        }
    }
}

/// Sweep grid `param=start:stop:step`.
#[derive(Debug, Clone)]
pub struct Grid {
    pub param: String,
    pub values: Vec<f64>,
}

impl Grid {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let err = |reason: &str| CliError::Input(format!("invalid grid `{text}`: {reason}"));
        let (param, range) = text
            .split_once('=')
            .ok_or_else(|| err("expected param=start:stop:step"))?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(err("expected start:stop:step"));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| err("range entries must be numbers"))?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if step <= 0.0 || stop < start {
            return Err(err("need step > 0 and stop >= start"));
        }
        let mut values = Vec::new();
        let mut k = 0u64;
        loop {
            let v = start + step * k as f64;
            if v > stop + step * 1e-9 {
                break;
            }
            values.push(v);
            k += 1;
        }
        Ok(Grid {
            param: param.trim().to_string(),
            values,
        })
    }
}
