use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{Model, Neuron, Step, Synapse};

/// Membrane potential, accumulated input, refractory steps remaining.
pub type LifState<T> = (T, T, i32);

/// Leaky integrate-and-fire parameters. Times in ms, potentials in mV,
/// `background` in mV/ms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LifParams<T> {
    pub tau_m: T,
    pub v_rest: T,
    pub v_reset: T,
    pub v_threshold: T,
    pub refractory: T,
    pub background: T,
}

impl<T: Real> LifParams<T> {
    pub fn validate(self) -> Result<Self> {
        if !(self.tau_m > T::zero()) {
            return Err(Error::Param(format!("tau_m must be > 0, got {}", self.tau_m)));
        }
        if !(self.v_threshold > self.v_reset) {
            return Err(Error::Param(format!(
                "v_threshold ({}) must exceed v_reset ({})",
                self.v_threshold, self.v_reset
            )));
        }
        if !(self.refractory >= T::zero()) || !self.background.is_finite() || !self.v_rest.is_finite() {
            return Err(Error::Param("refractory must be ≥ 0 and potentials finite".into()));
        }
        Ok(self)
    }

    /// Refractory period in whole steps.
    pub fn refractory_steps(&self, dt: f64) -> i32 {
        (self.refractory.to_f64_lossy() / dt).round() as i32
    }
}

/// LIF building block. Used directly as a model (every synapse carries
/// `weight`) or embedded in larger models.
#[derive(Clone, Debug)]
pub struct Lif<T> {
    pub params: LifParams<T>,
    /// Added to the target's input per received spike.
    pub weight: T,
}

impl<T: Real> Lif<T> {
    pub fn new(params: LifParams<T>, weight: T) -> Result<Self> {
        Ok(Lif {
            params: params.validate()?,
            weight,
        })
    }

    /// Membrane potential drawn uniformly from `[v_reset, v_threshold)`.
    pub fn init_random(&self, n: Neuron<'_, LifState<T>>, step: &Step) {
        let p = &self.params;
        let u = T::of(step.uniform(n.id()));
        n.store((p.v_reset + u * (p.v_threshold - p.v_reset), T::zero(), 0));
    }

    /// One Euler step. While refractory the membrane is held at `v_reset`
    /// and input is discarded.
    #[inline]
    pub fn update(&self, n: Neuron<'_, LifState<T>>, dt: f64) -> bool {
        let p = &self.params;
        let (v, input, refractory) = n.load();
        if refractory > 0 {
            n.store((p.v_reset, T::zero(), refractory - 1));
            return false;
        }
        let dt_t = T::of(dt);
        let v = v + dt_t * (-(v - p.v_rest) / p.tau_m) + input + dt_t * p.background;
        if v >= p.v_threshold {
            n.store((p.v_reset, T::zero(), p.refractory_steps(dt)));
            true
        } else {
            n.store((v, T::zero(), 0));
            false
        }
    }

    /// Adds `c · w` to the target's input.
    #[inline]
    pub fn receive(to: Neuron<'_, LifState<T>>, c: T, w: T) {
        to.add::<1>(c * w);
    }
}

impl<T: Real> Model for Lif<T> {
    type Neuron = LifState<T>;
    type Synapse = ();

    fn init(&self, n: Neuron<'_, Self::Neuron>, _: &Step) {
        n.store((self.params.v_rest, T::zero(), 0));
    }

    fn update(&self, n: Neuron<'_, Self::Neuron>, step: &Step) -> bool {
        Lif::update(self, n, step.dt)
    }

    fn receive(&self, _: Neuron<'_, Self::Neuron>, to: Neuron<'_, Self::Neuron>, _: Synapse<'_, ()>) {
        Lif::receive(to, T::one(), self.weight);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::soa::Soa;
    use proptest::prelude::*;
    use rayon::prelude::*;

    fn params(v_rest: f64, background: f64) -> LifParams<f64> {
        LifParams {
            tau_m: 20.0,
            v_rest,
            v_reset: 10.0,
            v_threshold: 20.0,
            refractory: 2.0,
            background,
        }
    }

    fn lif(p: LifParams<f64>) -> Lif<f64> {
        Lif::new(p, 0.0).unwrap()
    }

    #[test]
    fn rest_is_a_fixed_point() {
        let soa: Soa<LifState<f64>> = Soa::new(1);
        let n = soa.record(0, false);
        n.store((0.0, 0.0, 0));
        assert!(!lif(params(0.0, 0.0)).update(n, 1.0));
        assert_eq!(n.load(), (0.0, 0.0, 0));
    }

    #[test]
    fn leak_step() {
        let soa: Soa<LifState<f64>> = Soa::new(1);
        let n = soa.record(0, false);
        n.store((10.0, 0.0, 0));
        assert!(!lif(params(0.0, 0.0)).update(n, 1.0));
        // 10 + 1 * (-(10 - 0) / 20)
        assert_eq!(n.get::<0>(), 9.5);
    }

    #[test]
    fn reaching_threshold_spikes_and_resets() {
        let soa: Soa<LifState<f64>> = Soa::new(1);
        let n = soa.record(0, false);
        // Resting at threshold: the update leaves V exactly at threshold.
        let l = lif(params(20.0, 0.0));
        n.store((20.0, 0.0, 0));
        assert!(l.update(n, 1.0));
        assert_eq!(n.load(), (10.0, 0.0, 2));
        // Held at reset while refractory, input discarded.
        n.set::<1>(5.0);
        assert!(!l.update(n, 1.0));
        assert_eq!(n.load(), (10.0, 0.0, 1));
        assert!(!l.update(n, 1.0));
        assert_eq!(n.get::<2>(), 0);
    }

    #[test]
    fn input_is_consumed() {
        let soa: Soa<LifState<f64>> = Soa::new(1);
        let n = soa.record(0, false);
        n.store((0.0, 3.0, 0));
        lif(params(0.0, 0.0)).update(n, 1.0);
        assert_eq!(n.load(), (3.0, 0.0, 0));
    }

    #[test]
    fn receive_accumulates_scaled_weight() {
        let soa: Soa<LifState<f32>> = Soa::new(1);
        let n = soa.record(0, false);
        Lif::receive(n, 1.0, 0.1);
        assert_eq!(n.get::<1>(), 0.1);
        Lif::receive(n, 0.0, 0.7);
        assert_eq!(n.get::<1>(), 0.1);
    }

    #[test]
    fn concurrent_receive_sums() {
        let soa: Soa<LifState<f64>> = Soa::new(1);
        let weights: Vec<f64> = (0..1000).map(|i| 0.1 + (i % 7) as f64 * 0.01).collect();
        weights
            .par_iter()
            .for_each(|&w| Lif::receive(soa.record(0, true), 1.0, w));
        let sequential: f64 = weights.iter().sum();
        assert!((soa.load(0).1 - sequential).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_params() {
        let mut p = params(0.0, 0.0);
        p.tau_m = 0.0;
        assert!(p.validate().is_err());
        let mut p = params(0.0, 0.0);
        p.v_threshold = p.v_reset;
        assert!(p.validate().is_err());
    }

    proptest! {
        #[test]
        fn leak_decays_toward_rest(v in -100.0f64..100.0, dt in 0.01f64..5.0) {
            let soa: Soa<LifState<f64>> = Soa::new(1);
            let n = soa.record(0, false);
            let mut p = params(0.0, 0.0);
            p.v_threshold = 1000.0;
            n.store((v, 0.0, 0));
            lif(p).update(n, dt);
            prop_assert!(n.get::<0>().abs() <= v.abs());
        }
    }
}
