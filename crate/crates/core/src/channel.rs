//! Channel realizations and truncated channel inversion.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::model::{subchannels_needed, Scenario};
use crate::scalar::Scalar;

/// Seed of the `trial`-th independent draw in a Monte-Carlo run.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    seed.wrapping_add(trial)
}

/// Power gains of all annotators, sorted by decreasing gain, with the SNRs
/// they reach at a common transmit power.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization<T> {
    gains: Vec<T>,
    /// `order[i]` is the caller-side index of the i-th strongest annotator.
    order: Vec<usize>,
    noise: T,
    power: T,
    snrs: Vec<T>,
}

impl<T: Scalar> ChannelRealization<T> {
    /// Sort `gains` decreasingly and compute SNRs `g·power/noise`.
    pub fn from_gains(gains: Vec<T>, noise: T, power: T) -> Result<Self> {
        if let Some(bad) = gains.iter().find(|g| !(**g > T::zero()) || !g.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "channel gain {bad} must be positive"
            )));
        }
        check_positive("noise power", noise)?;
        check_positive("transmit power", power)?;
        let mut order: Vec<usize> = (0..gains.len()).collect();
        // stable: equal gains keep their caller order
        order.sort_by(|&a, &b| gains[b].partial_cmp(&gains[a]).unwrap());
        let sorted: Vec<T> = order.iter().map(|&i| gains[i]).collect();
        let snrs = sorted.iter().map(|&g| g * power / noise).collect();
        Ok(ChannelRealization {
            gains: sorted,
            order,
            noise,
            power,
            snrs,
        })
    }

    /// `k` i.i.d. Rayleigh-faded links: power gains are Exp(1). Unit noise and
    /// unit transmit power. Deterministic in `seed`.
    pub fn draw_rayleigh(k: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gains = (0..k)
            .map(|_| {
                let g: f64 = Exp1.sample(&mut rng);
                T::from_f64(g.max(f64::MIN_POSITIVE)).unwrap()
            })
            .collect();
        Self::from_gains(gains, T::one(), T::one()).expect("exponential draws are positive")
    }

    /// Same gains under a new noise level and per-annotator transmit power.
    pub fn with_power(&self, noise: T, power: T) -> Result<Self> {
        check_positive("noise power", noise)?;
        check_positive("transmit power", power)?;
        Ok(ChannelRealization {
            snrs: self.gains.iter().map(|&g| g * power / noise).collect(),
            noise,
            power,
            ..self.clone()
        })
    }

    /// Fixed-power mode: the total budget is split evenly, `p̄ = P_t / K`.
    pub fn with_total_power(&self, noise: T, total_power: T) -> Result<Self> {
        if self.gains.is_empty() {
            return self.with_power(noise, T::one());
        }
        let per = total_power / T::from_usize(self.gains.len()).unwrap();
        self.with_power(noise, per)
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }

    pub fn gains(&self) -> &[T] {
        &self.gains
    }

    pub fn snrs(&self) -> &[T] {
        &self.snrs
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn noise(&self) -> T {
        self.noise
    }

    pub fn power(&self) -> T {
        self.power
    }
}

fn check_positive<T: Scalar>(what: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{what} {v} must be positive and finite"
        )))
    }
}

/// Result of truncated channel inversion.
#[derive(Debug, Clone, PartialEq)]
pub struct TciAllocation<T> {
    pub gamma0: T,
    /// Per-annotator powers in decreasing-gain order; zero beyond `available`.
    pub powers: Vec<T>,
    /// Number of annotators that can be inverted to `gamma0` (K′).
    pub available: usize,
    pub total_power: T,
}

impl<T: Scalar> TciAllocation<T> {
    pub fn used_power(&self) -> T {
        self.powers.iter().fold(T::zero(), |acc, &p| acc + p)
    }
}

/// Invert the strongest links to SNR `gamma0` until the next one no longer
/// fits in `total_power`.
///
/// Inverting annotator k costs `gamma0·N0/g_k`; since gains are sorted, the
/// powered set is the longest affordable prefix. `available == 0` is a valid
/// outcome.
pub fn truncated_inversion<T: Scalar>(
    ch: &ChannelRealization<T>,
    gamma0: T,
    total_power: T,
) -> Result<TciAllocation<T>> {
    if !(gamma0 > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "target SNR {gamma0} must be positive"
        )));
    }
    if !(total_power > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "power budget {total_power} must be positive"
        )));
    }
    let mut powers = vec![T::zero(); ch.len()];
    let mut spent = T::zero();
    let mut available = 0;
    for (k, &g) in ch.gains().iter().enumerate() {
        let p = gamma0 * ch.noise() / g;
        if !p.is_finite() || spent + p > total_power {
            break;
        }
        spent = spent + p;
        powers[k] = p;
        available = k + 1;
    }
    Ok(TciAllocation {
        gamma0,
        powers,
        available,
        total_power,
    })
}

/// Sub-channels for a type at rate `rate` once every served annotator sits at
/// SNR `gamma0`; identical for all clusters of that type.
pub fn tci_subchannels<T: Scalar>(rate: T, scen: &Scenario<T>, gamma0: T) -> Result<usize> {
    subchannels_needed(rate, scen, gamma0)
}
