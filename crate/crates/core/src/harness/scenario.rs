use std::fmt::Write as _;
use std::str::FromStr;

use crate::cuckoo::{BucketSizing, DEFAULT_MAX_KICKS};
use crate::protocols::{FilterConfig, ProtocolKind};
use crate::spectrum::Axis;

use super::HarnessError;

/// One experiment configuration. Serializes to `key=value` lines; `#`
/// starts a comment and blank lines are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub side: u32,
    pub n_ch: u16,
    pub rho: f64,
    pub day: u64,
    pub epsilon: f64,
    pub beta: u32,
    pub alpha: f64,
    pub max_kicks: u32,
    pub sizing: BucketSizing,
    pub protocol: ProtocolKind,
    /// Coordinate revealed by the leakage variant.
    pub leak_axis: Axis,
    pub sensing_accuracy: f64,
    pub trials: u32,
    pub seed: u64,
    pub p_bits: Option<f64>,
    pub q_bits: Option<f64>,
    pub b: Option<f64>,
    pub n_g: Option<f64>,
    pub v: Option<f64>,
    pub d: Option<f64>,
    pub troja15_n: Option<f64>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            side: 64,
            n_ch: 31,
            rho: 0.068,
            day: 20_000,
            epsilon: 1e-2,
            beta: 4,
            alpha: 0.95,
            max_kicks: DEFAULT_MAX_KICKS,
            sizing: BucketSizing::Exact,
            protocol: ProtocolKind::Lpdb,
            leak_axis: Axis::X,
            sensing_accuracy: 1.0,
            trials: 10,
            seed: 1,
            p_bits: None,
            q_bits: None,
            b: None,
            n_g: None,
            v: None,
            d: None,
            troja15_n: None,
        }
    }
}

fn sizing_name(s: BucketSizing) -> &'static str {
    match s {
        BucketSizing::PowerOfTwo => "pow2",
        BucketSizing::Exact => "exact",
    }
}

pub fn parse_sizing(s: &str) -> Option<BucketSizing> {
    match s {
        "pow2" => Some(BucketSizing::PowerOfTwo),
        "exact" => Some(BucketSizing::Exact),
        _ => None,
    }
}

pub fn parse_axis(s: &str) -> Option<Axis> {
    match s {
        "x" | "X" => Some(Axis::X),
        "y" | "Y" => Some(Axis::Y),
        _ => None,
    }
}

fn axis_name(a: Axis) -> &'static str {
    match a {
        Axis::X => "x",
        Axis::Y => "y",
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T, HarnessError> {
    value
        .parse()
        .map_err(|_| HarnessError::Config(format!("{key}: cannot parse `{value}`")))
}

impl Scenario {
    pub fn filter_config(&self) -> FilterConfig {
        FilterConfig {
            epsilon: self.epsilon,
            beta: self.beta,
            alpha: self.alpha,
            max_kicks: self.max_kicks,
            sizing: self.sizing,
        }
    }

    /// Sets one field from its config key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        let value = value.trim();
        match key.trim() {
            "side" => self.side = num(key, value)?,
            "n_ch" => self.n_ch = num(key, value)?,
            "rho" => self.rho = num(key, value)?,
            "day" => self.day = num(key, value)?,
            "epsilon" => self.epsilon = num(key, value)?,
            "beta" => self.beta = num(key, value)?,
            "alpha" => self.alpha = num(key, value)?,
            "max_kicks" => self.max_kicks = num(key, value)?,
            "sizing" => {
                self.sizing = parse_sizing(value).ok_or_else(|| {
                    HarnessError::Config(format!("sizing: `{value}` is not pow2|exact"))
                })?
            }
            "protocol" => {
                self.protocol = ProtocolKind::parse(value).ok_or_else(|| {
                    HarnessError::Config(format!(
                        "protocol: `{value}` is not lpdb|lpdb-leak|lpdbqs"
                    ))
                })?
            }
            "leak_axis" => {
                self.leak_axis = parse_axis(value).ok_or_else(|| {
                    HarnessError::Config(format!("leak_axis: `{value}` is not x|y"))
                })?
            }
            "sensing_accuracy" => self.sensing_accuracy = num(key, value)?,
            "trials" => self.trials = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "p_bits" => self.p_bits = Some(num(key, value)?),
            "q_bits" => self.q_bits = Some(num(key, value)?),
            "b" => self.b = Some(num(key, value)?),
            "n_g" => self.n_g = Some(num(key, value)?),
            "v" => self.v = Some(num(key, value)?),
            "d" => self.d = Some(num(key, value)?),
            "troja15_n" => self.troja15_n = Some(num(key, value)?),
            other => return Err(HarnessError::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Parses a config, starting from the defaults.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut s = Scenario::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                HarnessError::Config(format!("line {}: expected key=value", n + 1))
            })?;
            s.set(k, v)?;
        }
        Ok(s)
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        kv("side", self.side.to_string());
        kv("n_ch", self.n_ch.to_string());
        kv("rho", self.rho.to_string());
        kv("day", self.day.to_string());
        kv("epsilon", self.epsilon.to_string());
        kv("beta", self.beta.to_string());
        kv("alpha", self.alpha.to_string());
        kv("max_kicks", self.max_kicks.to_string());
        kv("sizing", sizing_name(self.sizing).to_string());
        kv("protocol", self.protocol.name().to_string());
        kv("leak_axis", axis_name(self.leak_axis).to_string());
        kv("sensing_accuracy", self.sensing_accuracy.to_string());
        kv("trials", self.trials.to_string());
        kv("seed", self.seed.to_string());
        let optional = [
            ("p_bits", self.p_bits),
            ("q_bits", self.q_bits),
            ("b", self.b),
            ("n_g", self.n_g),
            ("v", self.v),
            ("d", self.d),
            ("troja15_n", self.troja15_n),
        ];
        for (k, v) in optional {
            if let Some(v) = v {
                kv(k, v.to_string());
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |what: String| Err(HarnessError::Config(what));
        if self.side == 0 || self.n_ch == 0 {
            return bad(format!(
                "grid {}x{} with {} channels",
                self.side, self.side, self.n_ch
            ));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return bad(format!("rho {}", self.rho));
        }
        if !(0.0..=1.0).contains(&self.sensing_accuracy) {
            return bad(format!("sensing_accuracy {}", self.sensing_accuracy));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        self.filter_config()
            .params_for(1)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defaults_round_trip() {
        let s = Scenario::default();
        assert_eq!(Scenario::parse(&s.serialize()).unwrap(), s);
    }

    #[test]
    fn comments_and_unknown_keys() {
        let s = Scenario::parse("# a comment\nside = 8\n\nprotocol=lpdbqs # trailing\n").unwrap();
        assert_eq!(s.side, 8);
        assert_eq!(s.protocol, ProtocolKind::Lpdbqs);
        assert!(Scenario::parse("sides=8").is_err());
        assert!(Scenario::parse("side").is_err());
        assert!(Scenario::parse("side=-1").is_err());
        assert!(Scenario::parse("protocol=pir").is_err());
    }

    #[test]
    fn validation() {
        assert!(Scenario::default().validate().is_ok());
        assert!(Scenario {
            rho: 1.5,
            ..Scenario::default()
        }
        .validate()
        .is_err());
        assert!(Scenario {
            trials: 0,
            ..Scenario::default()
        }
        .validate()
        .is_err());
        assert!(Scenario {
            epsilon: 0.0,
            ..Scenario::default()
        }
        .validate()
        .is_err());
    }

    fn opt() -> impl Strategy<Value = Option<f64>> {
        proptest::option::of(0.0f64..1e9)
    }

    proptest! {
        #[test]
        fn any_scenario_round_trips(
            side in 1u32..10_000,
            n_ch in 1u16..200,
            rho in 0.0f64..=1.0,
            day in any::<u64>(),
            epsilon in 1e-12f64..0.99,
            beta in 1u32..16,
            alpha in 0.01f64..=1.0,
            max_kicks in any::<u32>(),
            exact in any::<bool>(),
            protocol in 0usize..3,
            axis_y in any::<bool>(),
            acc in 0.0f64..=1.0,
            trials in 1u32..1000,
            seed in any::<u64>(),
            extras in (opt(), opt(), opt(), opt(), opt(), opt(), opt()),
        ) {
            let s = Scenario {
                side, n_ch, rho, day, epsilon, beta, alpha, max_kicks,
                sizing: if exact { BucketSizing::Exact } else { BucketSizing::PowerOfTwo },
                protocol: [ProtocolKind::Lpdb, ProtocolKind::LpdbLeakage, ProtocolKind::Lpdbqs][protocol],
                leak_axis: if axis_y { Axis::Y } else { Axis::X },
                sensing_accuracy: acc, trials, seed,
                p_bits: extras.0, q_bits: extras.1, b: extras.2, n_g: extras.3,
                v: extras.4, d: extras.5, troja15_n: extras.6,
            };
            prop_assert_eq!(Scenario::parse(&s.serialize()).unwrap(), s);
        }
    }
}
