//! Channel realizations: independent Rayleigh fading with distance-based
//! path loss, assembled into [`SystemInstance`]s.
//!
//! Path loss is normalized to unit gain at a 10 m reference distance and all
//! powers are carried in linear milliwatts.
//!
//! Random draws come from ChaCha12 ([`ChannelRng`]) seeded through
//! `rand_core`'s `seed_from_u64`. Trial `t` of a run seeded with `s` uses the
//! substream `s ^ t`. Within one instance the draw order is `G` (row-major),
//! `h_l`, `h_e`, then the direct links if configured; every complex entry
//! consumes two standard-normal draws (real, then imaginary).

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::numerics::{ComplexMatrix, ComplexVector};
use crate::{Error, Result};

/// Generator used for every channel draw.
pub type ChannelRng = ChaCha12Rng;

/// Reference distance for the path-loss model, in meters.
pub const REFERENCE_DISTANCE_M: f64 = 10.0;

/// Per-trial substream: `seed ^ trial`.
pub fn trial_rng(seed: u64, trial: u64) -> ChannelRng {
    ChannelRng::seed_from_u64(seed ^ trial)
}

/// `10^(dBm/10)` in milliwatts.
pub fn dbm_to_linear(x_dbm: f64) -> f64 {
    10f64.powf(x_dbm / 10.0)
}

/// Power gain `(d / 10 m)^(−α)`.
pub fn path_loss_gain(d_meters: f64, alpha: f64) -> Result<f64> {
    if !(d_meters > 0.0) || !d_meters.is_finite() {
        return Err(Error::invalid(format!(
            "distance must be positive, got {d_meters}"
        )));
    }
    Ok((d_meters / REFERENCE_DISTANCE_M).powf(-alpha))
}

fn sample_entry<R: Rng + ?Sized>(rng: &mut R, std_dev: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * std_dev, im * std_dev)
}

/// Matrix of i.i.d. circularly-symmetric complex Gaussians with
/// `E|x|² = gain`.
pub fn sample_rayleigh<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    gain: f64,
) -> Result<ComplexMatrix> {
    if !(gain >= 0.0) || !gain.is_finite() {
        return Err(Error::invalid(format!(
            "gain must be nonnegative, got {gain}"
        )));
    }
    let sd = (gain / 2.0).sqrt();
    Ok(ComplexMatrix::from_fn(rows, cols, |_, _| {
        sample_entry(rng, sd)
    }))
}

fn sample_vector<R: Rng + ?Sized>(rng: &mut R, len: usize, gain: f64) -> Result<ComplexVector> {
    Ok(sample_rayleigh(rng, len, 1, gain)?
        .as_slice()
        .iter()
        .copied()
        .collect())
}

/// Geometry, powers and Monte Carlo settings for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Transmit antennas.
    pub n_t: usize,
    /// IRS elements.
    pub m: usize,
    /// Transmit power budget, dBm.
    pub p_dbm: f64,
    pub noise_l_dbm: f64,
    pub noise_e_dbm: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Transmitter → IRS distance, meters.
    pub r_tr: f64,
    /// IRS → legitimate receiver distance, meters.
    pub r_rl: f64,
    /// IRS → eavesdropper distance, meters.
    pub r_re: f64,
    /// Transmitter → legitimate receiver (no-IRS baseline only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_tl: Option<f64>,
    /// Transmitter → eavesdropper (no-IRS baseline only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_te: Option<f64>,
    pub seed: u64,
    pub trials: usize,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_t == 0 || self.m == 0 {
            return Err(Error::invalid("n_t and m must be positive"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        for (name, v) in [
            ("p_dbm", self.p_dbm),
            ("noise_l_dbm", self.noise_l_dbm),
            ("noise_e_dbm", self.noise_e_dbm),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite")));
            }
        }
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::invalid("alpha must be positive"));
        }
        let distances = [
            ("r_tr", Some(self.r_tr)),
            ("r_rl", Some(self.r_rl)),
            ("r_re", Some(self.r_re)),
            ("r_tl", self.r_tl),
            ("r_te", self.r_te),
        ];
        for (name, d) in distances {
            if let Some(d) = d {
                if !(d > 0.0) || !d.is_finite() {
                    return Err(Error::invalid(format!(
                        "{name} must be a positive distance"
                    )));
                }
            }
        }
        if self.r_tl.is_some() != self.r_te.is_some() {
            return Err(Error::invalid("r_tl and r_te must be given together"));
        }
        Ok(())
    }

    pub fn has_direct_links(&self) -> bool {
        self.r_tl.is_some() && self.r_te.is_some()
    }
}

/// One channel realization together with noise and power parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemInstance {
    g: ComplexMatrix,
    h_l: ComplexVector,
    h_e: ComplexVector,
    sigma2_l: f64,
    sigma2_e: f64,
    p: f64,
    direct: Option<(ComplexVector, ComplexVector)>,
}

impl SystemInstance {
    /// `g` is the `M×N_t` transmitter→IRS channel; `h_l`, `h_e` have length `M`.
    pub fn new(
        g: ComplexMatrix,
        h_l: ComplexVector,
        h_e: ComplexVector,
        sigma2_l: f64,
        sigma2_e: f64,
        p: f64,
    ) -> Result<Self> {
        let m = g.rows();
        if m == 0 || g.cols() == 0 {
            return Err(Error::invalid("G must be non-empty"));
        }
        if h_l.len() != m || h_e.len() != m {
            return Err(Error::invalid(format!(
                "IRS channels must have length {m}, got {} and {}",
                h_l.len(),
                h_e.len()
            )));
        }
        for (name, v) in [("sigma2_l", sigma2_l), ("sigma2_e", sigma2_e), ("p", p)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!(
                    "{name} must be positive and finite"
                )));
            }
        }
        Ok(Self {
            g,
            h_l,
            h_e,
            sigma2_l,
            sigma2_e,
            p,
            direct: None,
        })
    }

    /// Attaches direct transmitter→receiver channels (length `N_t`) used by
    /// the no-IRS baseline.
    pub fn with_direct_links(
        mut self,
        direct_h_l: ComplexVector,
        direct_h_e: ComplexVector,
    ) -> Result<Self> {
        let n_t = self.n_t();
        if direct_h_l.len() != n_t || direct_h_e.len() != n_t {
            return Err(Error::invalid(format!(
                "direct channels must have length {n_t}"
            )));
        }
        self.direct = Some((direct_h_l, direct_h_e));
        Ok(self)
    }

    /// Same channels, different transmit power budget (linear mW).
    pub fn with_power(mut self, p: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::invalid("p must be positive and finite"));
        }
        self.p = p;
        Ok(self)
    }

    pub fn g(&self) -> &ComplexMatrix {
        &self.g
    }

    pub fn h_l(&self) -> &ComplexVector {
        &self.h_l
    }

    pub fn h_e(&self) -> &ComplexVector {
        &self.h_e
    }

    pub fn sigma2_l(&self) -> f64 {
        self.sigma2_l
    }

    pub fn sigma2_e(&self) -> f64 {
        self.sigma2_e
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn direct_h_l(&self) -> Option<&ComplexVector> {
        self.direct.as_ref().map(|d| &d.0)
    }

    pub fn direct_h_e(&self) -> Option<&ComplexVector> {
        self.direct.as_ref().map(|d| &d.1)
    }

    /// IRS elements.
    pub fn m(&self) -> usize {
        self.g.rows()
    }

    /// Transmit antennas.
    pub fn n_t(&self) -> usize {
        self.g.cols()
    }
}

/// Draws one realization for `cfg`.
pub fn build_instance<R: Rng + ?Sized>(
    cfg: &ScenarioConfig,
    rng: &mut R,
) -> Result<SystemInstance> {
    cfg.validate()?;
    let g = sample_rayleigh(rng, cfg.m, cfg.n_t, path_loss_gain(cfg.r_tr, cfg.alpha)?)?;
    let h_l = sample_vector(rng, cfg.m, path_loss_gain(cfg.r_rl, cfg.alpha)?)?;
    let h_e = sample_vector(rng, cfg.m, path_loss_gain(cfg.r_re, cfg.alpha)?)?;
    let inst = SystemInstance::new(
        g,
        h_l,
        h_e,
        dbm_to_linear(cfg.noise_l_dbm),
        dbm_to_linear(cfg.noise_e_dbm),
        dbm_to_linear(cfg.p_dbm),
    )?;
    match (cfg.r_tl, cfg.r_te) {
        (Some(r_tl), Some(r_te)) => {
            let d_l = sample_vector(rng, cfg.n_t, path_loss_gain(r_tl, cfg.alpha)?)?;
            let d_e = sample_vector(rng, cfg.n_t, path_loss_gain(r_te, cfg.alpha)?)?;
            inst.with_direct_links(d_l, d_e)
        }
        _ => Ok(inst),
    }
}

/// Uniform phases on `(−π, π]`.
pub fn sample_uniform_phases<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<f64> {
    use core::f64::consts::PI;
    (0..m)
        .map(|_| {
            // rng.random::<f64>() is in [0, 1); map to (−π, π].
            let u: f64 = rng.random();
            PI - 2.0 * PI * u
        })
        .collect()
}
