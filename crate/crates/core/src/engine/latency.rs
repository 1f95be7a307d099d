use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Delay added to every core message between send and delivery.
///
/// Values are in the engine's time unit: virtual ticks for the event engine,
/// milliseconds for the threaded one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LatencyModel {
    Zero,
    Fixed {
        delay: u64,
    },
    /// Inclusive range, drawn uniformly from the seeded generator.
    Uniform {
        lo: u64,
        hi: u64,
    },
}

impl LatencyModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LatencyModel::Uniform { lo, hi } if lo > hi => {
                Err(CoreError::invalid(format!("uniform latency has lo {lo} > hi {hi}")))
            }
            _ => Ok(()),
        }
    }

    /// Largest delay the model can produce.
    pub fn max(&self) -> u64 {
        match *self {
            LatencyModel::Zero => 0,
            LatencyModel::Fixed { delay } => delay,
            LatencyModel::Uniform { hi, .. } => hi,
        }
    }

    /// Draws one delay. Only `Uniform` consumes randomness. The model must be
    /// valid.
    #[inline]
    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match *self {
            LatencyModel::Zero => 0,
            LatencyModel::Fixed { delay } => delay,
            LatencyModel::Uniform { lo, hi } => rng.gen_range(lo..=hi),
        }
    }
}

/// Draws one delay from `model`.
pub fn latency_sample<R: Rng + ?Sized>(model: &LatencyModel, rng: &mut R) -> Result<u64> {
    model.validate()?;
    Ok(model.draw(rng))
}

impl fmt::Display for LatencyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            LatencyModel::Zero => f.write_str("zero"),
            LatencyModel::Fixed { delay } => write!(f, "fixed:{delay}"),
            LatencyModel::Uniform { lo, hi } => write!(f, "uniform:{lo}:{hi}"),
        }
    }
}

/// Parses `zero`, `fixed:D` or `uniform:LO:HI`.
impl FromStr for LatencyModel {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |p: &str| -> Result<u64> {
            p.parse().map_err(|_| CoreError::invalid(format!("bad latency value {p:?} in {s:?}")))
        };
        let model = match parts.as_slice() {
            ["zero"] => LatencyModel::Zero,
            ["fixed", d] => LatencyModel::Fixed { delay: num(d)? },
            ["uniform", lo, hi] => LatencyModel::Uniform { lo: num(lo)?, hi: num(hi)? },
            _ => return Err(CoreError::invalid(format!("unknown latency model {s:?}"))),
        };
        model.validate()?;
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(latency_sample(&LatencyModel::Zero, &mut rng).unwrap(), 0);
        assert_eq!(latency_sample(&LatencyModel::Fixed { delay: 5 }, &mut rng).unwrap(), 5);
    }

    #[test]
    fn uniform_is_reproducible_and_in_range() {
        let model = LatencyModel::Uniform { lo: 1, hi: 10 };
        let draw3 = || {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            (0..3).map(|_| latency_sample(&model, &mut rng).unwrap()).collect::<Vec<_>>()
        };
        let first = draw3();
        assert_eq!(first, draw3());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let d = latency_sample(&model, &mut rng).unwrap();
            assert!((1..=10).contains(&d));
        }
    }

    #[test]
    fn inverted_uniform_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(latency_sample(&LatencyModel::Uniform { lo: 3, hi: 2 }, &mut rng).is_err());
        assert!("uniform:3:2".parse::<LatencyModel>().is_err());
    }

    #[test]
    fn parse_and_display() {
        for s in ["zero", "fixed:5", "uniform:1:10"] {
            assert_eq!(s.parse::<LatencyModel>().unwrap().to_string(), s);
        }
        assert!("fixed".parse::<LatencyModel>().is_err());
        assert!("gauss:1".parse::<LatencyModel>().is_err());
        assert!("fixed:x".parse::<LatencyModel>().is_err());
    }
}
