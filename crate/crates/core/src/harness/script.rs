use std::collections::BTreeMap;

use crate::apps::AppSpec;
use crate::broker::{JobId, Tick};

use super::HarnessError;

/// What a worker does when told to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComputeMode {
    /// Proves the true result.
    Honest,
    /// Changes the first output and proves the altered witness anyway.
    Tamper,
    /// Never submits.
    Stall,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    Mint {
        amount: u64,
    },
    PostJob {
        spec: AppSpec,
        fee: u64,
        collateral: u64,
        duration: Tick,
    },
    Register {
        job: JobId,
    },
    /// Fetch the job, compute, and submit `delay` ticks later.
    Compute {
        job: JobId,
        mode: ComputeMode,
        delay: Tick,
    },
    ClaimTimeout {
        job: JobId,
    },
    Cancel {
        job: JobId,
    },
    /// Damages the file at `url` so later fetches fail their hash check.
    Corrupt {
        url: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Directive {
    pub tick: Tick,
    pub actor: String,
    pub action: Action,
    /// 1-based line in the script text.
    pub line: usize,
}

/// A scenario: one directive per line, `tick | actor | action | key=value ...`.
///
/// Blank lines and `#` comments are skipped. Ticks must not decrease.
///
/// | action          | arguments                                             |
/// |-----------------|-------------------------------------------------------|
/// | `mint`          | `amount`                                              |
/// | `post_job`      | `app`, app parameters, `fee`, `collateral`, `duration` |
/// | `register`      | `job`                                                 |
/// | `compute`       | `job`, `mode` (honest, tamper, stall), `delay`?        |
/// | `claim_timeout` | `job`                                                 |
/// | `cancel`        | `job`                                                 |
/// | `corrupt`       | `url`                                                 |
///
/// App parameters are those of [`AppSpec::from_params`]. `delay` defaults to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioScript {
    pub directives: Vec<Directive>,
}

fn malformed(line: usize, reason: impl Into<String>) -> HarnessError {
    HarnessError::MalformedScript {
        line,
        reason: reason.into(),
    }
}

impl ScenarioScript {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut directives: Vec<Directive> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split('|').map(str::trim).collect();
            if !(3..=4).contains(&fields.len()) {
                return Err(malformed(line, "expected `tick | actor | action | args`"));
            }
            let tick: Tick = fields[0]
                .parse()
                .map_err(|_| malformed(line, format!("bad tick `{}`", fields[0])))?;
            if let Some(prev) = directives.last() {
                if tick < prev.tick {
                    return Err(malformed(line, "ticks must not decrease"));
                }
            }
            let actor = fields[1];
            if actor.is_empty() || actor.contains(['/', ' ', ':']) {
                return Err(malformed(line, format!("bad actor `{actor}`")));
            }
            let args = Args::parse(fields.get(3).copied().unwrap_or(""), line)?;
            let action = parse_action(fields[2], &args, line)?;
            args.check_all_used(line)?;
            directives.push(Directive {
                tick,
                actor: actor.to_string(),
                action,
                line,
            });
        }
        Ok(ScenarioScript { directives })
    }
}

struct Args {
    values: BTreeMap<String, String>,
    used: std::cell::RefCell<Vec<String>>,
}

impl Args {
    fn parse(text: &str, line: usize) -> Result<Self, HarnessError> {
        let mut values = BTreeMap::new();
        for pair in text.split_whitespace() {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| malformed(line, format!("expected key=value, got `{pair}`")))?;
            if values.insert(k.to_string(), v.to_string()).is_some() {
                return Err(malformed(line, format!("duplicate argument `{k}`")));
            }
        }
        Ok(Args {
            values,
            used: Default::default(),
        })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        let v = self.values.get(key)?;
        self.used.borrow_mut().push(key.to_string());
        Some(v)
    }

    fn text(&self, key: &str, line: usize) -> Result<&str, HarnessError> {
        self.raw(key)
            .ok_or_else(|| malformed(line, format!("missing argument `{key}`")))
    }

    fn number(&self, key: &str, line: usize) -> Result<u64, HarnessError> {
        let v = self.text(key, line)?;
        v.parse()
            .map_err(|_| malformed(line, format!("`{key}` must be a number, got `{v}`")))
    }

    fn check_all_used(&self, line: usize) -> Result<(), HarnessError> {
        let used = self.used.borrow();
        match self.values.keys().find(|k| !used.contains(k)) {
            Some(k) => Err(malformed(line, format!("unknown argument `{k}`"))),
            None => Ok(()),
        }
    }
}

fn parse_action(name: &str, args: &Args, line: usize) -> Result<Action, HarnessError> {
    Ok(match name {
        "mint" => Action::Mint {
            amount: args.number("amount", line)?,
        },
        "post_job" => {
            let app = args.text("app", line)?;
            let bad = std::cell::RefCell::new(None);
            let spec = AppSpec::from_params(app, |k| {
                let v = args.raw(k)?;
                match v.parse() {
                    Ok(n) => Some(n),
                    Err(_) => {
                        *bad.borrow_mut() = Some(k.to_string());
                        None
                    }
                }
            });
            if let Some(k) = bad.into_inner() {
                return Err(malformed(line, format!("`{k}` must be a number")));
            }
            Action::PostJob {
                spec: spec.map_err(|e| malformed(line, e.to_string()))?,
                fee: args.number("fee", line)?,
                collateral: args.number("collateral", line)?,
                duration: args.number("duration", line)?,
            }
        }
        "register" => Action::Register {
            job: args.number("job", line)?,
        },
        "compute" => Action::Compute {
            job: args.number("job", line)?,
            mode: match args.text("mode", line)? {
                "honest" => ComputeMode::Honest,
                "tamper" => ComputeMode::Tamper,
                "stall" => ComputeMode::Stall,
                other => return Err(malformed(line, format!("unknown mode `{other}`"))),
            },
            delay: match args.raw("delay") {
                Some(_) => args.number("delay", line)?,
                None => 1,
            },
        },
        "claim_timeout" => Action::ClaimTimeout {
            job: args.number("job", line)?,
        },
        "cancel" => Action::Cancel {
            job: args.number("job", line)?,
        },
        "corrupt" => Action::Corrupt {
            url: args.text("url", line)?.to_string(),
        },
        other => return Err(malformed(line, format!("unknown action `{other}`"))),
    })
}
