use crate::error::{Error, Result};
use crate::scalar::Real;

/// Weight, presynaptic trace, postsynaptic trace.
pub type StdpState<T> = (T, T, T);

/// Pair-based STDP with exponential traces and hard bounds. Times in ms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StdpParams<T> {
    pub a_plus: T,
    pub a_minus: T,
    pub tau_plus: T,
    pub tau_minus: T,
    pub w_min: T,
    pub w_max: T,
}

impl<T: Real> StdpParams<T> {
    pub fn validate(self) -> Result<Self> {
        let finite = [self.a_plus, self.a_minus, self.w_min, self.w_max]
            .iter()
            .all(|x| x.is_finite());
        if !finite || !(self.tau_plus > T::zero()) || !(self.tau_minus > T::zero()) {
            return Err(Error::Param(
                "STDP amplitudes must be finite and time constants > 0".into(),
            ));
        }
        if !(T::zero() <= self.w_min && self.w_min < self.w_max) {
            return Err(Error::Param(format!(
                "STDP bounds must satisfy 0 ≤ w_min < w_max, got [{}, {}]",
                self.w_min, self.w_max
            )));
        }
        Ok(self)
    }

    /// The rule specialized to a step of `dt` ms.
    pub fn at(self, dt: f64) -> Stdp<T> {
        Stdp {
            decay_plus: T::of((-dt / self.tau_plus.to_f64_lossy()).exp()),
            decay_minus: T::of((-dt / self.tau_minus.to_f64_lossy()).exp()),
            params: self,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Stdp<T> {
    pub params: StdpParams<T>,
    decay_plus: T,
    decay_minus: T,
}

impl<T: Real> Stdp<T> {
    /// One step: decay both traces, then apply depression for a
    /// presynaptic spike and potentiation for a postsynaptic one.
    #[inline]
    pub fn update(&self, s: &mut StdpState<T>, pre: bool, post: bool) {
        let p = &self.params;
        let (mut w, mut x_pre, mut x_post) = *s;
        x_pre = x_pre * self.decay_plus;
        x_post = x_post * self.decay_minus;
        if pre {
            w = clamp(w - p.a_minus * x_post, p.w_min, p.w_max);
            x_pre = x_pre + T::one();
        }
        if post {
            w = clamp(w + p.a_plus * x_pre, p.w_min, p.w_max);
            x_post = x_post + T::one();
        }
        *s = (w, x_pre, x_post);
    }
}

fn clamp<T: Real>(x: T, lo: T, hi: T) -> T {
    x.max(lo).min(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rule(dt: f64) -> Stdp<f64> {
        StdpParams {
            a_plus: 0.01,
            a_minus: 0.012,
            tau_plus: 20.0,
            tau_minus: 20.0,
            w_min: 0.0,
            w_max: 1.0,
        }
        .validate()
        .unwrap()
        .at(dt)
    }

    #[test]
    fn quiescent_is_fixed() {
        let mut s = (0.3, 0.0, 0.0);
        rule(1.0).update(&mut s, false, false);
        assert_eq!(s, (0.3, 0.0, 0.0));
    }

    #[test]
    fn pre_then_post_potentiates() {
        let r = rule(1.0);
        let mut s = (0.5, 0.0, 0.0);
        r.update(&mut s, true, false);
        for _ in 1..5 {
            r.update(&mut s, false, false);
        }
        r.update(&mut s, false, true);
        let expected = 0.5 + 0.01 * (-5.0f64 / 20.0).exp();
        assert!((s.0 - expected).abs() < 1e-12, "{} vs {expected}", s.0);
    }

    #[test]
    fn post_then_pre_depresses() {
        let r = rule(1.0);
        let mut s = (0.5, 0.0, 0.0);
        r.update(&mut s, false, true);
        r.update(&mut s, false, false);
        r.update(&mut s, true, false);
        let expected = 0.5 - 0.012 * (-2.0f64 / 20.0).exp();
        assert!((s.0 - expected).abs() < 1e-12);
    }

    #[test]
    fn clamps_at_bounds() {
        let r = rule(1.0);
        let mut s = (1.0, 0.8, 0.0);
        r.update(&mut s, false, true);
        assert_eq!(s.0, 1.0);
        let mut s = (0.0, 0.0, 0.9);
        r.update(&mut s, true, false);
        assert_eq!(s.0, 0.0);
    }

    #[test]
    fn rejects_bad_bounds() {
        let mut p = rule(1.0).params;
        p.w_min = 2.0;
        assert!(p.validate().is_err());
        p.w_min = -0.1;
        assert!(p.validate().is_err());
    }

    proptest! {
        #[test]
        fn weight_stays_in_bounds(events in proptest::collection::vec((any::<bool>(), any::<bool>()), 1..200), w in 0.0f64..1.0) {
            let r = rule(0.5);
            let mut s = (w, 0.0, 0.0);
            for (pre, post) in events {
                r.update(&mut s, pre, post);
                prop_assert!((0.0..=1.0).contains(&s.0));
            }
        }
    }
}
