use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::analysis::scaling_constant;
use crate::error::{Error, Result};
use crate::network::{Connection, NetworkDesc};
use crate::scalar::Real;

use super::{
    poisson_update, BenchParams, BrunelParams, Lif, LifState, Model, Neuron, PingPong, Stdp, StdpState, Step, Synapse,
    VogelsParams,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    PingPong,
    Vogels,
    Brunel,
    BrunelPlus,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::PingPong,
        ModelKind::Vogels,
        ModelKind::Brunel,
        ModelKind::BrunelPlus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::PingPong => "pingpong",
            ModelKind::Vogels => "vogels",
            ModelKind::Brunel => "brunel",
            ModelKind::BrunelPlus => "brunel+",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pingpong" | "ping-pong" => Ok(ModelKind::PingPong),
            "vogels" => Ok(ModelKind::Vogels),
            "brunel" => Ok(ModelKind::Brunel),
            "brunel+" | "brunelplus" | "brunel-plus" => Ok(ModelKind::BrunelPlus),
            _ => Err(Error::UnknownModel(s.to_string())),
        }
    }
}

/// A shipped benchmark model that can be built at any size.
pub trait Bench: Model + Sized {
    const KIND: ModelKind;

    fn build(neurons: usize, params: &BenchParams) -> Result<(NetworkDesc, Self)>;

    /// Ids of stimulus neurons, excluded from firing rates by default.
    fn stimulus(&self) -> Range<u32> {
        0..0
    }
}

impl Bench for PingPong {
    const KIND: ModelKind = ModelKind::PingPong;

    fn build(neurons: usize, _: &BenchParams) -> Result<(NetworkDesc, Self)> {
        if neurons != 200 {
            return Err(Error::Config(format!(
                "pingpong has exactly 200 neurons, asked for {neurons}"
            )));
        }
        Ok(PingPong::build())
    }
}

fn split(neurons: usize, fractions: &[f64]) -> Result<Vec<usize>> {
    let mut sizes: Vec<usize> = fractions
        .iter()
        .map(|f| (f * neurons as f64).round() as usize)
        .collect();
    let used: usize = sizes.iter().sum();
    if used >= neurons || sizes.contains(&0) {
        return Err(Error::Config(format!(
            "{neurons} neurons are too few to split into populations"
        )));
    }
    sizes.push(neurons - used);
    Ok(sizes)
}

fn all_pairs(sources: Range<usize>, targets: Range<usize>, p: f64) -> Vec<Connection> {
    sources
        .flat_map(|from| targets.clone().map(move |to| Connection::new(from, to, p)))
        .collect()
}

/// Excitatory and inhibitory LIF populations driven by a constant
/// background input. Population 0 is excitatory, population 1 inhibitory.
#[derive(Clone, Debug)]
pub struct Vogels<T> {
    pub lif: Lif<T>,
    /// Neurons with id below this are excitatory.
    pub excitatory: u32,
    pub w_exc: T,
    pub w_inh: T,
    /// Size-dependent weight scale.
    pub c: T,
}

impl<T: Real> Vogels<T> {
    pub fn new(neurons: usize, p: &VogelsParams<T>) -> Result<(NetworkDesc, Self)> {
        let sizes = split(neurons, &[p.excitatory_fraction])?;
        let desc = NetworkDesc::new(sizes.clone(), all_pairs(0..2, 0..2, p.connectivity), p.dt, p.delay).validate()?;
        let model = Vogels {
            lif: Lif::new(p.lif, T::zero())?,
            excitatory: sizes[0] as u32,
            w_exc: p.w_exc,
            w_inh: p.w_inh,
            c: T::of(scaling_constant(ModelKind::Vogels, neurons)?),
        };
        Ok((desc, model))
    }
}

impl<T: Real> Model for Vogels<T> {
    type Neuron = LifState<T>;
    type Synapse = ();

    fn init(&self, n: Neuron<'_, Self::Neuron>, step: &Step) {
        self.lif.init_random(n, step);
    }

    fn update(&self, n: Neuron<'_, Self::Neuron>, step: &Step) -> bool {
        self.lif.update(n, step.dt)
    }

    fn receive(&self, from: Neuron<'_, Self::Neuron>, to: Neuron<'_, Self::Neuron>, _: Synapse<'_, ()>) {
        let w = if from.id() < self.excitatory {
            self.w_exc
        } else {
            self.w_inh
        };
        Lif::receive(to, self.c, w);
    }
}

impl<T: Real> Bench for Vogels<T> {
    const KIND: ModelKind = ModelKind::Vogels;

    fn build(neurons: usize, params: &BenchParams) -> Result<(NetworkDesc, Self)> {
        Vogels::new(neurons, &VogelsParams::from_params(params)?)
    }
}

/// LIF network excited by a Poisson population. Populations: Poisson,
/// excitatory, inhibitory; the Poisson population projects onto both
/// others and counts as excitatory.
///
/// Poisson neurons reuse the LIF neuron and only replace its update.
#[derive(Clone, Debug)]
pub struct Brunel<T> {
    pub lif: Lif<T>,
    /// Neurons with id below this are Poisson neurons.
    pub poisson: u32,
    /// Neurons with id below this (and at least `poisson`) are excitatory.
    pub excitatory_end: u32,
    /// Spike probability of a Poisson neuron per step.
    pub p_spike: f64,
    pub w_exc: T,
    pub w_inh: T,
    pub c: T,
}

impl<T: Real> Brunel<T> {
    pub fn new(neurons: usize, p: &BrunelParams<T>) -> Result<(NetworkDesc, Self)> {
        let sizes = split(neurons, &[p.poisson_fraction, p.excitatory_fraction])?;
        let p_spike = p.poisson_rate * p.dt;
        if !(0.0..=1.0).contains(&p_spike) {
            return Err(Error::Param(format!(
                "poisson_rate · dt must lie in [0, 1], got {p_spike}"
            )));
        }
        let desc = NetworkDesc::new(sizes.clone(), all_pairs(0..3, 1..3, p.connectivity), p.dt, p.delay).validate()?;
        let model = Brunel {
            lif: Lif::new(p.lif, T::zero())?,
            poisson: sizes[0] as u32,
            excitatory_end: (sizes[0] + sizes[1]) as u32,
            p_spike,
            w_exc: p.w_exc,
            w_inh: p.w_inh,
            c: T::of(scaling_constant(ModelKind::Brunel, neurons)?),
        };
        Ok((desc, model))
    }

    #[inline]
    fn weight(&self, from: u32) -> T {
        if from < self.excitatory_end {
            self.w_exc
        } else {
            self.w_inh
        }
    }
}

impl<T: Real> Model for Brunel<T> {
    type Neuron = LifState<T>;
    type Synapse = ();

    fn init(&self, n: Neuron<'_, Self::Neuron>, step: &Step) {
        self.lif.init_random(n, step);
    }

    fn update(&self, n: Neuron<'_, Self::Neuron>, step: &Step) -> bool {
        if n.id() < self.poisson {
            poisson_update(step, n.id(), self.p_spike)
        } else {
            self.lif.update(n, step.dt)
        }
    }

    fn receive(&self, from: Neuron<'_, Self::Neuron>, to: Neuron<'_, Self::Neuron>, _: Synapse<'_, ()>) {
        Lif::receive(to, self.c, self.weight(from.id()));
    }
}

impl<T: Real> Bench for Brunel<T> {
    const KIND: ModelKind = ModelKind::Brunel;

    fn build(neurons: usize, params: &BenchParams) -> Result<(NetworkDesc, Self)> {
        Brunel::new(neurons, &BrunelParams::from_params(params)?)
    }

    fn stimulus(&self) -> Range<u32> {
        0..self.poisson
    }
}

/// Brunel with STDP on the synapses of the excitatory population. Every
/// synapse stores (weight, pre trace, post trace); the others keep their
/// initial weight.
#[derive(Clone, Debug)]
pub struct BrunelPlus<T> {
    pub base: Brunel<T>,
    pub stdp: Stdp<T>,
}

impl<T: Real> BrunelPlus<T> {
    pub fn new(neurons: usize, p: &BrunelParams<T>) -> Result<(NetworkDesc, Self)> {
        let (desc, base) = Brunel::new(neurons, p)?;
        let stdp = p.stdp.validate()?.at(p.dt);
        Ok((desc, BrunelPlus { base, stdp }))
    }

    #[inline]
    fn is_plastic(&self, from: u32) -> bool {
        (self.base.poisson..self.base.excitatory_end).contains(&from)
    }
}

impl<T: Real> Model for BrunelPlus<T> {
    type Neuron = LifState<T>;
    type Synapse = StdpState<T>;

    fn init(&self, n: Neuron<'_, Self::Neuron>, step: &Step) {
        self.base.init(n, step);
    }

    fn update(&self, n: Neuron<'_, Self::Neuron>, step: &Step) -> bool {
        self.base.update(n, step)
    }

    fn receive(&self, _: Neuron<'_, Self::Neuron>, to: Neuron<'_, Self::Neuron>, s: Synapse<'_, Self::Synapse>) {
        Lif::receive(to, self.base.c, s.get::<0>());
    }

    fn plastic(&self) -> bool {
        true
    }

    fn init_synapse(&self, from: u32, _: u32, s: &mut Self::Synapse) {
        *s = (self.base.weight(from), T::zero(), T::zero());
    }

    fn update_synapse(&self, from: u32, s: &mut Self::Synapse, pre: bool, post: bool, _: f64) {
        if self.is_plastic(from) {
            self.stdp.update(s, pre, post);
        }
    }
}

impl<T: Real> Bench for BrunelPlus<T> {
    const KIND: ModelKind = ModelKind::BrunelPlus;

    fn build(neurons: usize, params: &BenchParams) -> Result<(NetworkDesc, Self)> {
        BrunelPlus::new(neurons, &BrunelParams::from_params(params)?)
    }

    fn stimulus(&self) -> Range<u32> {
        0..self.base.poisson
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::soa::Layout;

    #[test]
    fn kinds_parse() {
        for k in ModelKind::ALL {
            assert_eq!(k.name().parse::<ModelKind>().unwrap(), k);
        }
        assert!("izhikevich".parse::<ModelKind>().is_err());
    }

    #[test]
    fn scaling_constant_wired_in() {
        let p = BenchParams::default();
        assert_eq!(Vogels::<f32>::build(4000, &p).unwrap().1.c, 1.0);
        assert_eq!(Vogels::<f64>::build(8000, &p).unwrap().1.c, 0.25);
        assert_eq!(Brunel::<f32>::build(20000, &p).unwrap().1.c, 1.0);
        assert_eq!(BrunelPlus::<f64>::build(40000, &p).unwrap().1.base.c, 0.5);
    }

    #[test]
    fn populations() {
        let p = BenchParams::default();
        let (desc, m) = Vogels::<f32>::build(4000, &p).unwrap();
        assert_eq!(desc.populations, vec![3200, 800]);
        assert_eq!(desc.connections.len(), 4);
        assert_eq!(m.excitatory, 3200);
        let (desc, m) = Brunel::<f32>::build(20000, &p).unwrap();
        assert_eq!(desc.populations, vec![10000, 8000, 2000]);
        assert_eq!(desc.connections.len(), 6);
        assert!(desc.connections.iter().all(|c| c.to != 0));
        assert_eq!(m.stimulus(), 0..10000);
        assert_eq!(m.excitatory_end, 18000);
    }

    #[test]
    fn too_small_to_split() {
        let p = BenchParams::default();
        assert!(Vogels::<f32>::build(1, &p).is_err());
        assert!(Brunel::<f32>::build(2, &p).is_err());
        assert!(PingPong::build_bench(199).is_err());
    }

    #[test]
    fn brunel_plus_synapse_is_twelve_bytes() {
        assert_eq!(<StdpState<f32> as Layout>::BYTES, 12);
    }

    #[test]
    fn brunel_plus_initial_weights_by_source() {
        let p = BenchParams::default();
        let (_, m) = BrunelPlus::<f64>::build(100, &p).unwrap();
        let mut s = Default::default();
        m.init_synapse(0, 60, &mut s);
        assert_eq!(s, (0.1, 0.0, 0.0));
        m.init_synapse(99, 60, &mut s);
        assert_eq!(s, (-0.5, 0.0, 0.0));
        // Inhibitory synapses do not learn.
        m.update_synapse(99, &mut s, true, true, 0.1);
        assert_eq!(s, (-0.5, 0.0, 0.0));
        m.init_synapse(60, 0, &mut s);
        m.update_synapse(60, &mut s, true, false, 0.1);
        assert_eq!(s.1, 1.0);
    }

    impl PingPong {
        fn build_bench(n: usize) -> Result<(NetworkDesc, Self)> {
            <PingPong as Bench>::build(n, &BenchParams::default())
        }
    }
}
