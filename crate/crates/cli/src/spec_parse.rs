//! Parsers for grid lists and profile specifications.

use std::collections::BTreeMap;
use std::path::Path;

use hypineq_core::catalog::Params;
use hypineq_core::profiles::{make_family, FamilyKind, FamilyOptions, RadialProfile, DEFAULT_WINDOW};

use crate::error::CliError;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn number(text: &str) -> Result<f64, CliError> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| usage(format!("'{text}' is not a number")))
}

/// A comma list `0.2,0.1` or a range `start:stop:count:log` (or `:lin`).
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [start, stop, count, spacing] = parts.as_slice() else {
            return Err(usage(format!(
                "range '{text}' must be start:stop:count:log or start:stop:count:lin"
            )));
        };
        let (start, stop) = (number(start)?, number(stop)?);
        let count: usize = count.parse().map_err(|_| usage(format!("'{count}' is not a count")))?;
        if count == 0 {
            return Err(usage("range needs at least one point"));
        }
        let at = |t: f64| match *spacing {
            "log" => Ok((start.ln() + t * (stop.ln() - start.ln())).exp()),
            "lin" => Ok(start + t * (stop - start)),
            other => Err(usage(format!("unknown spacing '{other}'"))),
        };
        if *spacing == "log" && !(start > 0.0 && stop > 0.0) {
            return Err(usage("log ranges need positive ends"));
        }
        if count == 1 {
            return Ok(vec![start]);
        }
        let mut out = (0..count)
            .map(|i| at(i as f64 / (count - 1) as f64))
            .collect::<Result<Vec<_>, _>>()?;
        out[0] = start;
        out[count - 1] = stop;
        return Ok(out);
    }
    text.split(',').map(number).collect()
}

/// A profile specification `kind:key=value,...`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSpec {
    pub kind: String,
    pub args: BTreeMap<String, String>,
}

impl ProfileSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
        let mut args = BTreeMap::new();
        for item in rest.split(',').filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| usage(format!("profile argument '{item}' is not key=value")))?;
            args.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self {
            kind: kind.trim().to_string(),
            args,
        })
    }

    fn take(&self, key: &str) -> Result<f64, CliError> {
        let v = self
            .args
            .get(key)
            .ok_or_else(|| usage(format!("profile '{}' needs {key}=", self.kind)))?;
        number(v)
    }

    fn optional(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.args.get(key).map(|v| number(v)).transpose()
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        match self.args.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(usage(format!("profile '{}' does not take {k}=", self.kind))),
            None => Ok(()),
        }
    }

    /// Builds the profile. Seeded bumps draw their centre from a window kept
    /// inside `d < R` when the instance has a radius.
    pub fn build(&self, params: &Params, base: &Path) -> Result<RadialProfile, CliError> {
        let amplitude = self.optional("A")?.unwrap_or(1.0);
        let family = |kind: FamilyKind, shape: f64, truncate: Option<f64>| -> Result<RadialProfile, CliError> {
            let options = FamilyOptions {
                truncate_at: truncate.unwrap_or(10.0),
                amplitude,
                ..FamilyOptions::default()
            };
            Ok(make_family(kind, shape, params, &options)?)
        };
        let profile = match self.kind.as_str() {
            "bump" => {
                if self.args.contains_key("seed") {
                    self.check_keys(&["seed", "A"])?;
                    let seed: u64 = self.args["seed"]
                        .parse()
                        .map_err(|_| usage(format!("'{}' is not a seed", self.args["seed"])))?;
                    RadialProfile::seeded_bump(seed, bump_window(params))?.scaled(amplitude)
                } else {
                    self.check_keys(&["c", "w", "A"])?;
                    RadialProfile::bump(self.take("c")?, self.take("w")?)?.scaled(amplitude)
                }
            }
            "gaussian" => {
                self.check_keys(&["a", "A"])?;
                RadialProfile::gaussian(self.take("a")?)?.scaled(amplitude)
            }
            "hardy-conc" | "rellich-conc" => {
                self.check_keys(&["eps", "A"])?;
                let kind = FamilyKind::from_name(&self.kind).expect("known family");
                family(kind, self.take("eps")?, None)?
            }
            "hardy-paper" | "rellich-paper" => {
                self.check_keys(&["eps", "D", "A"])?;
                let kind = FamilyKind::from_name(&self.kind).expect("known family");
                family(kind, self.take("eps")?, self.optional("D")?)?
            }
            "grid" => {
                self.check_keys(&["file", "A"])?;
                let file = self
                    .args
                    .get("file")
                    .ok_or_else(|| usage("profile 'grid' needs file="))?;
                let path = base.join(file);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
                RadialProfile::grid_from_text(&text)?.scaled(amplitude)
            }
            other => return Err(usage(format!("unknown profile kind '{other}'"))),
        };
        Ok(profile)
    }
}

/// Centre window for seeded bumps.
pub fn bump_window(params: &Params) -> (f64, f64) {
    match params.radius {
        Some(r) => (DEFAULT_WINDOW.0.min(0.05 * r), DEFAULT_WINDOW.1.min(0.9 * r)),
        None => DEFAULT_WINDOW,
    }
}
