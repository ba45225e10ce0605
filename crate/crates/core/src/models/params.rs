use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{LifParams, StdpParams};

/// The shipped defaults file.
pub const DEFAULTS: &str = include_str!("../../defaults/models.conf");

/// Flat `section.key = value` parameter set.
///
/// Overrides may only replace keys that already exist, so a typo on the
/// command line is an error rather than a silently ignored setting.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchParams {
    values: BTreeMap<String, f64>,
}

impl Default for BenchParams {
    fn default() -> Self {
        DEFAULTS.parse().expect("shipped defaults parse")
    }
}

impl FromStr for BenchParams {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = parse_assignment(line).map_err(|msg| Error::Parse { line: i + 1, msg })?;
            if values.insert(key.to_string(), value).is_some() {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("duplicate key {key}"),
                });
            }
        }
        Ok(BenchParams { values })
    }
}

fn parse_assignment(s: &str) -> std::result::Result<(&str, f64), String> {
    let (key, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key = value, got {s:?}"))?;
    let key = key.trim();
    if key.is_empty() || key.contains(char::is_whitespace) {
        return Err(format!("bad key {key:?}"));
    }
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("bad number {:?} for {key}", value.trim()))?;
    if !value.is_finite() {
        return Err(format!("{key} must be finite"));
    }
    Ok((key, value))
}

impl fmt::Display for BenchParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.values {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

impl BenchParams {
    /// Replaces an existing key.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        match self.values.get_mut(key) {
            Some(slot) if value.is_finite() => {
                *slot = value;
                Ok(())
            }
            Some(_) => Err(Error::Param(format!("{key} must be finite"))),
            None => Err(Error::Param(format!("unknown parameter {key}"))),
        }
    }

    /// Applies a `KEY=VALUE` override.
    pub fn apply(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = parse_assignment(assignment).map_err(Error::Param)?;
        self.set(key, value)
    }

    pub fn get(&self, key: &str) -> Result<f64> {
        self.values
            .get(key)
            .copied()
            .ok_or_else(|| Error::Param(format!("missing parameter {key}")))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, &v)| (k.as_str(), v))
    }

    fn lif<T: Real>(&self, section: &str) -> Result<LifParams<T>> {
        let g = |k: &str| self.get(&format!("{section}.{k}")).map(T::of);
        Ok(LifParams {
            tau_m: g("tau_m")?,
            v_rest: g("v_rest")?,
            v_reset: g("v_reset")?,
            v_threshold: g("v_threshold")?,
            refractory: g("refractory")?,
            background: g("background")?,
        })
    }

    fn delay(&self, section: &str) -> Result<usize> {
        let d = self.get(&format!("{section}.delay"))?;
        if d < 1.0 || d.fract() != 0.0 {
            return Err(Error::Param(format!(
                "{section}.delay must be a positive integer, got {d}"
            )));
        }
        Ok(d as usize)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VogelsParams<T> {
    pub excitatory_fraction: f64,
    pub connectivity: f64,
    pub dt: f64,
    pub delay: usize,
    pub lif: LifParams<T>,
    pub w_exc: T,
    pub w_inh: T,
}

impl<T: Real> VogelsParams<T> {
    pub fn from_params(p: &BenchParams) -> Result<Self> {
        Ok(VogelsParams {
            excitatory_fraction: p.get("vogels.excitatory_fraction")?,
            connectivity: p.get("vogels.connectivity")?,
            dt: p.get("vogels.dt")?,
            delay: p.delay("vogels")?,
            lif: p.lif("vogels")?.validate()?,
            w_exc: T::of(p.get("vogels.w_exc")?),
            w_inh: T::of(p.get("vogels.w_inh")?),
        })
    }
}

impl<T: Real> Default for VogelsParams<T> {
    fn default() -> Self {
        Self::from_params(&BenchParams::default()).expect("shipped defaults are valid")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BrunelParams<T> {
    pub poisson_fraction: f64,
    pub excitatory_fraction: f64,
    pub connectivity: f64,
    pub dt: f64,
    pub delay: usize,
    pub lif: LifParams<T>,
    pub w_exc: T,
    pub w_inh: T,
    /// Spikes per ms of each Poisson neuron.
    pub poisson_rate: f64,
    pub stdp: StdpParams<T>,
}

impl<T: Real> BrunelParams<T> {
    pub fn from_params(p: &BenchParams) -> Result<Self> {
        let g = |k: &str| p.get(k).map(T::of);
        Ok(BrunelParams {
            poisson_fraction: p.get("brunel.poisson_fraction")?,
            excitatory_fraction: p.get("brunel.excitatory_fraction")?,
            connectivity: p.get("brunel.connectivity")?,
            dt: p.get("brunel.dt")?,
            delay: p.delay("brunel")?,
            lif: p.lif("brunel")?.validate()?,
            w_exc: g("brunel.w_exc")?,
            w_inh: g("brunel.w_inh")?,
            poisson_rate: p.get("brunel.poisson_rate")?,
            stdp: StdpParams {
                a_plus: g("stdp.a_plus")?,
                a_minus: g("stdp.a_minus")?,
                tau_plus: g("stdp.tau_plus")?,
                tau_minus: g("stdp.tau_minus")?,
                w_min: g("stdp.w_min")?,
                w_max: g("stdp.w_max")?,
            }
            .validate()?,
        })
    }
}

impl<T: Real> Default for BrunelParams<T> {
    fn default() -> Self {
        Self::from_params(&BenchParams::default()).expect("shipped defaults are valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse_and_round_trip() {
        let p = BenchParams::default();
        assert_eq!(p.get("brunel.delay").unwrap(), 15.0);
        let again: BenchParams = p.to_string().parse().unwrap();
        assert_eq!(again, p);
        VogelsParams::<f32>::default();
        BrunelParams::<f64>::default();
    }

    #[test]
    fn overrides() {
        let mut p = BenchParams::default();
        p.apply("vogels.w_exc=0.25").unwrap();
        assert_eq!(VogelsParams::<f64>::from_params(&p).unwrap().w_exc, 0.25);
        assert!(p.apply("vogels.w_ecx=1").is_err());
        assert!(p.apply("vogels.w_exc").is_err());
        assert!(p.apply("vogels.w_exc=abc").is_err());
        p.apply("vogels.delay=2.5").unwrap();
        assert!(VogelsParams::<f64>::from_params(&p).is_err());
    }

    #[test]
    fn parse_errors_carry_line() {
        match "a = 1\nb 2".parse::<BenchParams>() {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!("a = 1\na = 2".parse::<BenchParams>().is_err());
    }

    #[test]
    fn invalid_lif_rejected() {
        let mut p = BenchParams::default();
        p.set("brunel.v_threshold", 5.0).unwrap();
        assert!(BrunelParams::<f32>::from_params(&p).is_err());
    }
}
