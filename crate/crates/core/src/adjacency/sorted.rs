//! Sorted, duplicate-free uniform random integers from exponential spacings.
//!
//! Partial sums of i.i.d. exponential variates, divided by their total, are
//! distributed like the order statistics of uniform variates. A job asking
//! for `n` values from `[a, b)` draws `n + 2` uniforms from (0, 1]. After the
//! `-ln` transform an exclusive running sum yields `n + 2` non-decreasing
//! positions, the first pinned at 0 and the last at the total. These two
//! outer positions bracket the `n` interior ones so that the interior values
//! are not forced onto the interval ends. The interior positions are
//! normalized, quantized into `b - a - n + 1` bins and shifted by
//! `0, 1, .., n-1`, which turns a non-decreasing sequence into a strictly
//! increasing one.
//!
//! Everything runs in a single forward pass over a scratch buffer and
//! needs no sorting.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::open_closed;
use crate::scalar::Real;

/// Mapping from normalized positions in [0, 1] to integer bins.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Quantize {
    /// Scale by `b - a - n` and round half up. The two extreme bins are half
    /// as wide as the others, so the values `a` and `b - 1` are drawn about
    /// half as often as interior values.
    Nearest,
    /// Scale by `b - a - n + 1` and round down (clamped to the last bin).
    /// All bins have equal width.
    #[default]
    Floor,
}

impl Quantize {
    #[inline]
    fn bin<T: Real>(self, x: T, span: u32) -> u32 {
        match self {
            Quantize::Nearest => (x * T::of(span as f64) + T::of(0.5))
                .floor()
                .to_u32()
                .unwrap_or(0)
                .min(span),
            Quantize::Floor => (x * T::of(span as f64 + 1.0)).floor().to_u32().unwrap_or(0).min(span),
        }
    }
}

fn check(n: u64, a: u32, b: u32) -> Result<()> {
    if b <= a || n > (b - a) as u64 {
        return Err(Error::SampleRange { n, a, b });
    }
    Ok(())
}

/// Reusable generator. Holds the scratch buffer so that expanding many
/// jobs does not allocate per job.
#[derive(Debug, Default)]
pub struct SortedRandom<T> {
    quantize: Quantize,
    scratch: Vec<T>,
}

impl<T: Real> SortedRandom<T> {
    pub fn new(quantize: Quantize) -> Self {
        SortedRandom {
            quantize,
            scratch: Vec::new(),
        }
    }

    /// Fills `out` with `out.len()` sorted distinct values from `[a, b)`.
    pub fn fill<R: Rng + ?Sized>(&mut self, a: u32, b: u32, rng: &mut R, out: &mut [u32]) -> Result<()> {
        check(out.len() as u64, a, b)?;
        if out.is_empty() {
            return Ok(());
        }
        self.scratch.clear();
        self.scratch.extend((0..out.len() + 2).map(|_| {
            // An f32 conversion can underflow; -ln(0) would poison the sum.
            T::of(open_closed(rng)).max(T::min_positive_value())
        }));
        self.finish(a, b, out);
        Ok(())
    }

    /// Like [`fill`](Self::fill) with caller-supplied uniforms in (0, 1].
    /// `draws.len()` must be `out.len() + 2`.
    pub fn fill_from_draws(&mut self, draws: &[T], a: u32, b: u32, out: &mut [u32]) -> Result<()> {
        check(out.len() as u64, a, b)?;
        if draws.len() != out.len() + 2 {
            return Err(Error::Param(format!(
                "{} draws supplied for {} values, expected {}",
                draws.len(),
                out.len(),
                out.len() + 2
            )));
        }
        self.scratch.clear();
        self.scratch.extend_from_slice(draws);
        self.finish(a, b, out);
        Ok(())
    }

    fn finish(&mut self, a: u32, b: u32, out: &mut [u32]) {
        let n = out.len();
        let total = exclusive_log_sum(&mut self.scratch);
        let span = b - a - n as u32;
        for (k, slot) in out.iter_mut().enumerate() {
            let x = normalize(self.scratch[k + 1], total);
            *slot = a + self.quantize.bin(x, span) + k as u32;
        }
    }
}

/// Replaces each uniform by `-ln(u)` and then by the exclusive running sum
/// of those values. Returns the final running sum, i.e. the sum of all but
/// the last exponential.
fn exclusive_log_sum<T: Real>(buf: &mut [T]) -> T {
    let mut running = T::zero();
    for v in buf.iter_mut() {
        let e = -v.ln();
        *v = running;
        running = running + e;
    }
    *buf.last().unwrap_or(&T::zero())
}

#[inline]
fn normalize<T: Real>(x: T, total: T) -> T {
    if total > T::zero() {
        (x / total).min(T::one())
    } else {
        T::zero()
    }
}

/// `n` sorted distinct integers from `[a, b)` using the default
/// quantization.
pub fn sorted_random<T: Real, R: Rng + ?Sized>(n: u32, a: u32, b: u32, rng: &mut R) -> Result<Vec<u32>> {
    let mut out = vec![0; n as usize];
    SortedRandom::<T>::new(Quantize::default()).fill(a, b, rng, &mut out)?;
    Ok(out)
}

/// Every intermediate row of one expansion, for inspection and tests.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace<T> {
    /// Uniform draws, `n + 2` of them.
    pub uniform: Vec<T>,
    /// `-ln` of each draw.
    pub neg_log: Vec<T>,
    /// Exclusive running sum; starts at 0, ends at the total.
    pub prefix: Vec<T>,
    /// `prefix / total`.
    pub normalized: Vec<T>,
    /// Bin of every position, outer ones included.
    pub scaled: Vec<u32>,
    /// `0..n`, added to the interior bins.
    pub offsets: Vec<u32>,
    /// Final values (shifted by `a`).
    pub output: Vec<u32>,
}

/// Runs one expansion on given uniforms and records every stage.
pub fn trace<T: Real>(draws: &[T], a: u32, b: u32, quantize: Quantize) -> Result<Trace<T>> {
    if draws.len() < 2 {
        return Err(Error::Param("at least the two outer draws are required".into()));
    }
    let n = draws.len() - 2;
    check(n as u64, a, b)?;
    let neg_log: Vec<T> = draws.iter().map(|u| -u.ln()).collect();
    let mut prefix = draws.to_vec();
    let total = exclusive_log_sum(&mut prefix);
    let normalized: Vec<T> = prefix.iter().map(|&x| normalize(x, total)).collect();
    let span = b - a - n as u32;
    let scaled: Vec<u32> = normalized.iter().map(|&x| quantize.bin(x, span)).collect();
    let offsets: Vec<u32> = (0..n as u32).collect();
    let output = scaled[1..=n].iter().zip(&offsets).map(|(s, o)| a + s + o).collect();
    Ok(Trace {
        uniform: draws.to_vec(),
        neg_log,
        prefix,
        normalized,
        scaled,
        offsets,
        output,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Domain};
    use proptest::prelude::*;

    const DRAWS: [f64; 8] = [0.46, 0.97, 0.22, 0.81, 0.98, 0.38, 0.70, 0.18];

    #[test]
    fn trace_matches_fill() {
        for q in [Quantize::Nearest, Quantize::Floor] {
            let t = trace(&DRAWS, 0, 100, q).unwrap();
            let mut out = [0u32; 6];
            SortedRandom::new(q).fill_from_draws(&DRAWS, 0, 100, &mut out).unwrap();
            assert_eq!(t.output, out);
        }
    }

    #[test]
    fn trace_outer_positions() {
        let t = trace(&DRAWS, 0, 100, Quantize::Nearest).unwrap();
        assert_eq!(t.prefix[0], 0.0);
        assert_eq!(t.normalized[0], 0.0);
        assert_eq!(*t.normalized.last().unwrap(), 1.0);
        assert_eq!(t.scaled[0], 0);
        assert_eq!(*t.scaled.last().unwrap(), 94);
        // The last draw only closes the interval and never enters the sum.
        let sum: f64 = t.neg_log[..7].iter().sum();
        assert!((t.prefix[7] - sum).abs() < 1e-12);
    }

    #[test]
    fn single_value_interval() {
        let mut rng = stream(3, Domain::Job, 0, 0);
        for a in [0, 17, 4_000_000] {
            assert_eq!(sorted_random::<f32, _>(1, a, a + 1, &mut rng).unwrap(), vec![a]);
        }
    }

    #[test]
    fn empty_request() {
        let mut rng = stream(3, Domain::Job, 0, 0);
        assert!(sorted_random::<f64, _>(0, 5, 9, &mut rng).unwrap().is_empty());
    }

    #[test]
    fn full_interval() {
        let mut rng = stream(3, Domain::Job, 0, 0);
        let v = sorted_random::<f32, _>(50, 10, 60, &mut rng).unwrap();
        assert_eq!(v, (10..60).collect::<Vec<_>>());
    }

    #[test]
    fn invalid_requests() {
        let mut rng = stream(3, Domain::Job, 0, 0);
        assert!(matches!(
            sorted_random::<f32, _>(11, 0, 10, &mut rng),
            Err(Error::SampleRange { n: 11, a: 0, b: 10 })
        ));
        assert!(sorted_random::<f32, _>(0, 10, 10, &mut rng).is_err());
        assert!(sorted_random::<f32, _>(1, 10, 3, &mut rng).is_err());
        let mut out = [0u32; 3];
        assert!(SortedRandom::<f64>::new(Quantize::Floor)
            .fill_from_draws(&[0.5; 4], 0, 10, &mut out)
            .is_err());
    }

    #[test]
    fn degenerate_draws() {
        // All draws equal to one: every exponential is zero.
        let t = trace(&[1.0f64; 5], 0, 10, Quantize::Floor).unwrap();
        assert_eq!(t.output, vec![0, 1, 2]);
    }

    proptest! {
        #[test]
        fn strictly_increasing_in_range(
            seed in any::<u64>(),
            a in 0u32..1000,
            len in 1u32..300,
            frac in 0.0f64..=1.0,
            nearest in any::<bool>(),
        ) {
            let b = a + len;
            let n = ((len as f64) * frac) as u32;
            let q = if nearest { Quantize::Nearest } else { Quantize::Floor };
            let mut rng = stream(seed, Domain::Job, 0, 0);
            let mut out = vec![0; n as usize];
            SortedRandom::<f32>::new(q).fill(a, b, &mut rng, &mut out).unwrap();
            prop_assert!(out.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(out.iter().all(|&v| v >= a && v < b));
        }
    }
}
