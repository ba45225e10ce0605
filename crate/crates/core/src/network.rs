//! Declarative description of a network: population sizes, connectivity
//! between populations, timestep and synaptic delay.
//!
//! Neurons receive global ids contiguously, population by population, in
//! declaration order. Outside of construction the engine has no notion of
//! populations.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Random connectivity from every neuron of `from` to the neurons of `to`,
/// each edge present with `probability`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Connection {
    pub from: usize,
    pub to: usize,
    pub probability: f64,
}

impl Connection {
    pub fn new(from: usize, to: usize, probability: f64) -> Self {
        Connection { from, to, probability }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetworkDesc {
    /// Neuron count of each population.
    pub populations: Vec<usize>,
    pub connections: Vec<Connection>,
    /// Simulated milliseconds per step.
    pub dt: f64,
    /// Synaptic delay in whole steps.
    pub delay: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NoPopulations,
    EmptyPopulation { population: usize },
    TooManyNeurons { total: u64 },
    ProbabilityOutOfRange { connection: usize, probability: f64 },
    DanglingPopulation { connection: usize, population: usize },
    DuplicateConnection { from: usize, to: usize },
    DelayTooSmall,
    NonPositiveDt { dt: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoPopulations => write!(f, "at least one population is required"),
            Violation::EmptyPopulation { population } => {
                write!(f, "population {population} is empty")
            }
            Violation::TooManyNeurons { total } => {
                write!(f, "{total} neurons exceed the id space")
            }
            Violation::ProbabilityOutOfRange {
                connection,
                probability,
            } => write!(
                f,
                "connection {connection}: probability out of range ({probability} not in [0, 1])"
            ),
            Violation::DanglingPopulation { connection, population } => {
                write!(f, "connection {connection}: population {population} does not exist")
            }
            Violation::DuplicateConnection { from, to } => {
                write!(f, "duplicate connection {from} -> {to}")
            }
            Violation::DelayTooSmall => write!(f, "delay must be ≥ 1"),
            Violation::NonPositiveDt { dt } => write!(f, "dt must be > 0 (got {dt})"),
        }
    }
}

/// Every invariant a descriptor violates.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

impl NetworkDesc {
    pub fn new(populations: Vec<usize>, connections: Vec<Connection>, dt: f64, delay: usize) -> Self {
        NetworkDesc {
            populations,
            connections,
            dt,
            delay,
        }
    }

    /// Returns the descriptor unchanged if it is well formed, otherwise every
    /// violation found.
    pub fn validate(self) -> Result<Self, ValidationReport> {
        let mut violations = Vec::new();
        if self.populations.is_empty() {
            violations.push(Violation::NoPopulations);
        }
        for (population, &size) in self.populations.iter().enumerate() {
            if size == 0 {
                violations.push(Violation::EmptyPopulation { population });
            }
        }
        let total: u64 = self.populations.iter().map(|&s| s as u64).sum();
        // u32::MAX is reserved for the adjacency sentinel.
        if total >= u32::MAX as u64 {
            violations.push(Violation::TooManyNeurons { total });
        }
        for (connection, c) in self.connections.iter().enumerate() {
            if !(0.0..=1.0).contains(&c.probability) {
                violations.push(Violation::ProbabilityOutOfRange {
                    connection,
                    probability: c.probability,
                });
            }
            for population in [c.from, c.to] {
                if population >= self.populations.len() {
                    violations.push(Violation::DanglingPopulation { connection, population });
                }
            }
            if self.connections[..connection]
                .iter()
                .any(|o| (o.from, o.to) == (c.from, c.to))
            {
                violations.push(Violation::DuplicateConnection { from: c.from, to: c.to });
            }
        }
        if self.delay < 1 {
            violations.push(Violation::DelayTooSmall);
        }
        if !(self.dt > 0.0) {
            violations.push(Violation::NonPositiveDt { dt: self.dt });
        }

        if violations.is_empty() {
            Ok(self)
        } else {
            Err(ValidationReport { violations })
        }
    }

    /// Total neuron count |N|.
    pub fn neurons(&self) -> usize {
        self.populations.iter().sum()
    }

    /// Half-open global id interval of population `pop`.
    pub fn global_id_range(&self, pop: usize) -> Result<Range<u32>> {
        if pop >= self.populations.len() {
            return Err(Error::PopulationIndex {
                index: pop,
                count: self.populations.len(),
            });
        }
        let start: usize = self.populations[..pop].iter().sum();
        Ok(start as u32..(start + self.populations[pop]) as u32)
    }

    /// Population containing neuron `id`.
    pub fn population_of(&self, id: u32) -> Option<usize> {
        let mut end = 0usize;
        for (pop, &size) in self.populations.iter().enumerate() {
            end += size;
            if (id as usize) < end {
                return Some(pop);
            }
        }
        None
    }

    /// Expected number of synapses under independent edge sampling.
    pub fn expected_synapses(&self) -> f64 {
        self.connections
            .iter()
            .map(|c| c.probability * self.populations[c.from] as f64 * self.populations[c.to] as f64)
            .sum()
    }
}

/// Line-oriented `key = value` form:
///
/// ```text
/// # comments and blank lines are ignored
/// populations = 100 100
/// connect = 0 1 0.01
/// connect = 1 0 0.01
/// dt = 1
/// delay = 1
/// ```
///
/// Lists may be separated by whitespace or commas. The result is validated.
impl FromStr for NetworkDesc {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut populations = None;
        let mut connections = Vec::new();
        let mut dt = None;
        let mut delay = None;

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |msg: String| Error::Parse { line, msg };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
            let fields: Vec<&str> = v
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            let num = |s: &str| -> Result<f64> { s.parse::<f64>().map_err(|_| err(format!("invalid number `{s}`"))) };
            let int =
                |s: &str| -> Result<usize> { s.parse::<usize>().map_err(|_| err(format!("invalid integer `{s}`"))) };
            match k.trim() {
                "populations" => populations = Some(fields.iter().map(|s| int(s)).collect::<Result<Vec<_>>>()?),
                "connect" => {
                    if fields.len() != 3 {
                        return Err(err("connect expects `from to probability`".into()));
                    }
                    connections.push(Connection::new(int(fields[0])?, int(fields[1])?, num(fields[2])?));
                }
                "dt" => dt = Some(num(single(&fields).map_err(err)?)?),
                "delay" => delay = Some(int(single(&fields).map_err(err)?)?),
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }

        let missing = |what: &str| Error::Parse {
            line: 0,
            msg: format!("missing `{what}`"),
        };
        let desc = NetworkDesc {
            populations: populations.ok_or_else(|| missing("populations"))?,
            connections,
            dt: dt.ok_or_else(|| missing("dt"))?,
            delay: delay.ok_or_else(|| missing("delay"))?,
        };
        Ok(desc.validate()?)
    }
}

fn single<'a>(fields: &[&'a str]) -> std::result::Result<&'a str, String> {
    match fields {
        [one] => Ok(one),
        _ => Err(format!("expected one value, got {}", fields.len())),
    }
}

impl fmt::Display for NetworkDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pops: Vec<String> = self.populations.iter().map(|p| p.to_string()).collect();
        writeln!(f, "populations = {}", pops.join(" "))?;
        for c in &self.connections {
            writeln!(f, "connect = {} {} {}", c.from, c.to, c.probability)?;
        }
        writeln!(f, "dt = {}", self.dt)?;
        writeln!(f, "delay = {}", self.delay)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pingpong() -> NetworkDesc {
        NetworkDesc::new(
            vec![100, 100],
            vec![Connection::new(0, 1, 0.01), Connection::new(1, 0, 0.01)],
            1.0,
            1,
        )
    }

    #[test]
    fn pingpong_is_valid() {
        let d = pingpong();
        assert_eq!(d.clone().validate().unwrap(), d);
        assert_eq!(d.neurons(), 200);
    }

    #[test]
    fn zero_delay_rejected() {
        let mut d = pingpong();
        d.delay = 0;
        let report = d.validate().unwrap_err();
        assert_eq!(report.violations, vec![Violation::DelayTooSmall]);
        assert!(report.to_string().contains("delay must be ≥ 1"));
    }

    #[test]
    fn probability_out_of_range_rejected() {
        let mut d = pingpong();
        d.connections[0].probability = 1.5;
        let report = d.validate().unwrap_err();
        assert!(report.to_string().contains("probability out of range"));
    }

    #[test]
    fn every_violation_reported() {
        let d = NetworkDesc::new(
            vec![0, 10],
            vec![
                Connection::new(0, 5, -0.1),
                Connection::new(1, 1, 0.5),
                Connection::new(1, 1, 0.2),
            ],
            0.0,
            0,
        );
        let v = d.validate().unwrap_err().violations;
        assert!(v.contains(&Violation::EmptyPopulation { population: 0 }));
        assert!(v.contains(&Violation::DanglingPopulation {
            connection: 0,
            population: 5
        }));
        assert!(v.contains(&Violation::ProbabilityOutOfRange {
            connection: 0,
            probability: -0.1
        }));
        assert!(v.contains(&Violation::DuplicateConnection { from: 1, to: 1 }));
        assert!(v.contains(&Violation::DelayTooSmall));
        assert!(v.contains(&Violation::NonPositiveDt { dt: 0.0 }));
        assert_eq!(v.len(), 6);
    }

    #[test]
    fn id_ranges() {
        let d = pingpong();
        assert_eq!(d.global_id_range(0).unwrap(), 0..100);
        assert_eq!(d.global_id_range(1).unwrap(), 100..200);
        assert!(matches!(
            d.global_id_range(2),
            Err(Error::PopulationIndex { index: 2, count: 2 })
        ));
        let single = NetworkDesc::new(vec![4000], vec![], 1.0, 1);
        assert_eq!(single.global_id_range(0).unwrap(), 0..4000);
        assert_eq!(d.population_of(99), Some(0));
        assert_eq!(d.population_of(100), Some(1));
        assert_eq!(d.population_of(200), None);
    }

    #[test]
    fn parse_round_trip() {
        let d = pingpong();
        let parsed: NetworkDesc = d.to_string().parse().unwrap();
        assert_eq!(parsed, d);
        let text = "# ping pong\npopulations = 100, 100\nconnect = 0 1 0.01\nconnect=1 0 0.01\ndt = 1\ndelay = 1\n";
        assert_eq!(text.parse::<NetworkDesc>().unwrap(), d);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            "populations = 10\nbogus = 1\n".parse::<NetworkDesc>(),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            "populations = 10\ndt = 1\n".parse::<NetworkDesc>(),
            Err(Error::Parse { line: 0, .. })
        ));
        assert!(matches!(
            "populations = 10\ndt = 1\ndelay = 0\n".parse::<NetworkDesc>(),
            Err(Error::Invalid(_))
        ));
    }

    proptest! {
        #[test]
        fn id_ranges_tile(sizes in proptest::collection::vec(1usize..500, 1..8)) {
            let d = NetworkDesc::new(sizes.clone(), vec![], 0.5, 2);
            let mut next = 0u32;
            for (pop, &size) in sizes.iter().enumerate() {
                let r = d.global_id_range(pop).unwrap();
                prop_assert_eq!(r.start, next);
                prop_assert_eq!((r.end - r.start) as usize, size);
                next = r.end;
            }
            prop_assert_eq!(next as usize, d.neurons());
        }

        #[test]
        fn validate_idempotent(
            sizes in proptest::collection::vec(0usize..50, 0..4),
            p in -0.5f64..1.5,
            delay in 0usize..4,
            dt in -1.0f64..2.0,
        ) {
            let d = NetworkDesc::new(sizes, vec![Connection::new(0, 0, p)], dt, delay);
            match d.clone().validate() {
                Ok(v) => {
                    prop_assert_eq!(&v, &d);
                    prop_assert_eq!(v.clone().validate().unwrap(), v);
                }
                Err(r) => prop_assert!(!r.violations.is_empty()),
            }
        }
    }
}
