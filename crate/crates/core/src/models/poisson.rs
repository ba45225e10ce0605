use super::Step;

/// Spikes with probability `p = rate · dt` from the neuron's private
/// stream for this step. Callers validate `p ≤ 1` up front.
#[inline]
pub fn poisson_update(step: &Step, id: u32, p: f64) -> bool {
    step.uniform(id) < p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extremes() {
        for t in 0..100 {
            let s = Step::new(t, 1.0, 3);
            assert!(!poisson_update(&s, 7, 0.0));
            assert!(poisson_update(&s, 7, 1.0));
        }
    }

    #[test]
    fn empirical_rate_within_binomial_interval() {
        let p = 0.02;
        let (ids, steps) = (1000u32, 1000u64);
        let mut spikes = 0u64;
        for t in 0..steps {
            let s = Step::new(t, 1.0, 11);
            spikes += (0..ids).filter(|&i| poisson_update(&s, i, p)).count() as u64;
        }
        let trials = (ids as u64 * steps) as f64;
        let sigma = (trials * p * (1.0 - p)).sqrt();
        assert!((spikes as f64 - trials * p).abs() < 4.0 * sigma, "{spikes}");
    }
}
