use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::LogBase;

/// Divergence between the context- and target-conditioned latent Gaussians.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceKind {
    /// `KL(q_target ‖ q_context)`.
    Kl,
    /// Skew-geometric JS with `α = α_u`.
    #[default]
    Js,
    /// Dual skew-geometric JS with `α = α_u`.
    JsDual,
}

impl DivergenceKind {
    pub const ALL: [DivergenceKind; 3] = [DivergenceKind::Kl, DivergenceKind::Js, DivergenceKind::JsDual];

    pub fn name(self) -> &'static str {
        match self {
            DivergenceKind::Kl => "kl",
            DivergenceKind::Js => "js",
            DivergenceKind::JsDual => "js_dual",
        }
    }
}

/// Argument order of the JS divergences.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JsOrder {
    /// `JS(q_context, q_target)`: `α_u` weights the target side.
    #[default]
    ContextTarget,
    TargetContext,
}

/// Noise analogues of weak and strong image augmentation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AugmentConfig {
    pub weak_sigma: f64,
    pub strong_sigma: f64,
    /// Fraction of features zeroed by strong augmentation.
    pub strong_drop: f64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            weak_sigma: 0.05,
            strong_sigma: 0.2,
            strong_drop: 0.2,
        }
    }
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.weak_sigma >= 0.0
            && self.strong_sigma >= 0.0
            && self.weak_sigma.is_finite()
            && self.strong_sigma.is_finite()
            && (0.0..=1.0).contains(&self.strong_drop);
        if ok {
            Ok(())
        } else {
            Err(Error::invalid("augment: sigmas must be finite and >= 0, strong_drop in [0,1]"))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SslConfig {
    pub tau_c: f64,
    pub tau_u: f64,
    pub lambda_u: f64,
    pub beta: f64,
    /// Latent samples T per target.
    pub samples: usize,
    /// Unlabeled-to-labeled batch ratio μ.
    pub mu: usize,
    /// Labeled batch size B.
    pub batch_size: usize,
    pub ema_momentum: f64,
    pub divergence: DivergenceKind,
    pub js_order: JsOrder,
    pub iterations: usize,
    pub seed: u64,
    pub entropy_base: LogBase,
    pub lr: f64,
    pub sgd_momentum: f64,
    pub weight_decay: f64,
    pub cosine_schedule: bool,
    pub augment: AugmentConfig,
    /// Evaluate and log every this many iterations (and at the last one).
    pub log_every: usize,
    /// Record wall-clock time in the metrics; makes the CSV nondeterministic.
    pub log_wall_time: bool,
}

impl Default for SslConfig {
    fn default() -> Self {
        Self {
            tau_c: 0.95,
            tau_u: 0.4,
            lambda_u: 1.0,
            beta: 0.01,
            samples: 10,
            mu: 7,
            batch_size: 64,
            ema_momentum: 0.999,
            divergence: DivergenceKind::Js,
            js_order: JsOrder::ContextTarget,
            iterations: 1 << 20,
            seed: 0,
            entropy_base: LogBase::Two,
            lr: 0.03,
            sgd_momentum: 0.9,
            weight_decay: 5e-4,
            cosine_schedule: true,
            augment: AugmentConfig::default(),
            log_every: 100,
            log_wall_time: false,
        }
    }
}

impl SslConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::invalid(format!("ssl.{m}")));
        if !(self.tau_c > 0.0 && self.tau_c <= 1.0) {
            return fail("tau_c must lie in (0, 1]");
        }
        if !(self.tau_u >= 0.0) {
            return fail("tau_u must be >= 0");
        }
        if !(self.lambda_u >= 0.0 && self.lambda_u.is_finite()) {
            return fail("lambda_u must be finite and >= 0");
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return fail("beta must be finite and >= 0");
        }
        if self.samples == 0 {
            return fail("samples (T) must be >= 1");
        }
        if self.mu == 0 {
            return fail("mu must be >= 1");
        }
        if self.batch_size == 0 {
            return fail("batch_size must be >= 1");
        }
        if !(0.0..=1.0).contains(&self.ema_momentum) {
            return fail("ema_momentum must lie in [0, 1]");
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return fail("lr must be positive");
        }
        if !(0.0..1.0).contains(&self.sgd_momentum) {
            return fail("sgd_momentum must lie in [0, 1)");
        }
        if !(self.weight_decay >= 0.0) {
            return fail("weight_decay must be >= 0");
        }
        if self.log_every == 0 {
            return fail("log_every must be >= 1");
        }
        self.augment.validate()
    }

    /// Whether the unlabeled branch contributes to the loss at all.
    pub fn uses_unlabeled(&self) -> bool {
        self.lambda_u > 0.0 || self.beta > 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        SslConfig::default().validate().unwrap();
    }

    #[test]
    fn bad_fields_rejected() {
        for bad in [
            SslConfig { tau_c: 0.0, ..Default::default() },
            SslConfig { tau_c: 1.1, ..Default::default() },
            SslConfig { tau_u: -0.1, ..Default::default() },
            SslConfig { beta: -1.0, ..Default::default() },
            SslConfig { samples: 0, ..Default::default() },
            SslConfig { mu: 0, ..Default::default() },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn serde_names() {
        let s = serde_json::to_string(&DivergenceKind::JsDual).unwrap();
        assert_eq!(s, "\"js_dual\"");
        let cfg: SslConfig = serde_json::from_str(r#"{"divergence":"kl","tau_u":0.3}"#).unwrap();
        assert_eq!(cfg.divergence, DivergenceKind::Kl);
        assert_eq!(cfg.tau_u, 0.3);
        assert!(serde_json::from_str::<SslConfig>(r#"{"bogus":1}"#).is_err());
    }
}
