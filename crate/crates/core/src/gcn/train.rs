use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::NormalizedAdjacency;
use crate::rng::{derive_seed, seeded, Stream};
use crate::sparse::SparseMatrix;
use crate::{NUM_CLASSES, PROFILE_DIM};

use super::adam::{adam_step, AdamConfig, AdamState};
use super::backward::backward;
use super::forward::{forward, masked_cross_entropy, DropoutMasks, LabelMask, MaskKind};
use super::model::GcnModel;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub dropout_rate: f64,
    pub max_epochs: usize,
    pub patience: usize,
    pub seed: u64,
    pub weight_decay: f64,
    pub hidden: usize,
    pub adam: AdamConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            dropout_rate: 0.5,
            max_epochs: 200,
            patience: 10,
            seed: 0,
            weight_decay: 0.0,
            hidden: PROFILE_DIM,
            adam: AdamConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(alloc::format!("gcn.{msg}")));
        if !(self.learning_rate > 0.0 && self.learning_rate < 1.0) {
            return bad("learning_rate must lie in (0, 1)");
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return bad("dropout_rate must lie in [0, 1)");
        }
        if self.max_epochs == 0 || self.patience == 0 {
            return bad("max_epochs and patience must be positive");
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return bad("weight_decay must be a nonnegative number");
        }
        if self.hidden == 0 {
            return bad("hidden must be positive");
        }
        Ok(())
    }
}

/// Running-minimum early stopping on validation loss.
#[derive(Debug, Clone, PartialEq)]
pub struct EarlyStopping {
    patience: usize,
    best: f64,
    best_epoch: usize,
    since_best: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopCheck {
    Improved,
    Waiting,
    Stop,
}

impl EarlyStopping {
    pub fn new(patience: usize) -> Self {
        Self {
            patience,
            best: f64::INFINITY,
            best_epoch: 0,
            since_best: 0,
        }
    }

    /// Records the validation loss of `epoch`. Stops once `patience`
    /// consecutive epochs fail to beat the running minimum.
    pub fn observe(&mut self, epoch: usize, loss: f64) -> StopCheck {
        if loss < self.best {
            self.best = loss;
            self.best_epoch = epoch;
            self.since_best = 0;
            StopCheck::Improved
        } else {
            self.since_best += 1;
            if self.since_best >= self.patience {
                StopCheck::Stop
            } else {
                StopCheck::Waiting
            }
        }
    }

    pub fn best(&self) -> f64 {
        self.best
    }

    pub fn best_epoch(&self) -> usize {
        self.best_epoch
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpochRecord {
    pub epoch: usize,
    /// Training-mode loss (with dropout) before the epoch's update.
    pub train_loss: f64,
    /// Evaluation-mode validation loss after the update.
    pub val_loss: f64,
}

#[derive(Debug, Clone)]
pub struct TrainResult {
    /// Parameters from the epoch with the lowest validation loss.
    pub model: GcnModel,
    pub history: Vec<EpochRecord>,
    pub stopped_epoch: usize,
    pub best_epoch: usize,
    pub best_val_loss: f64,
}

/// Full-batch Adam training with dropout, evaluation-mode validation after
/// every epoch, and early stopping. Glorot and dropout streams are derived
/// from `config.seed`.
pub fn train(
    adj: &NormalizedAdjacency,
    features: &SparseMatrix,
    mask: &LabelMask,
    config: &TrainConfig,
) -> Result<TrainResult> {
    config.validate()?;
    if mask.targets(MaskKind::Train).is_empty() {
        return Err(Error::EmptyMask("train"));
    }
    if mask.targets(MaskKind::Val).is_empty() {
        return Err(Error::EmptyMask("validation"));
    }
    let mut init_rng = seeded(derive_seed(&[config.seed, Stream::Glorot as u64]));
    let mut dropout_rng = seeded(derive_seed(&[config.seed, Stream::Dropout as u64]));

    let mut model = GcnModel::glorot(features.n_cols(), config.hidden, NUM_CLASSES, &mut init_rng)?;
    let mut adam = AdamState::new(&model, config.adam);
    let mut stopper = EarlyStopping::new(config.patience);
    let mut best_model = model.clone();
    let mut history = Vec::with_capacity(config.max_epochs);
    let mut stopped_epoch = config.max_epochs;
    let hidden_len = features.n_rows() * config.hidden;
    let decay_term = |m: &GcnModel| {
        0.5 * config.weight_decay * (m.w1.frobenius_sq() + m.w2.frobenius_sq())
    };

    for epoch in 1..=config.max_epochs {
        let masks = (config.dropout_rate > 0.0)
            .then(|| DropoutMasks::sample(features, hidden_len, config.dropout_rate, &mut dropout_rng));
        let pass = forward(adj, features, &model, masks.as_ref())?;
        let mut train_loss = masked_cross_entropy(&pass.log_probs, mask, MaskKind::Train)?;
        if config.weight_decay > 0.0 {
            train_loss += decay_term(&model);
        }
        let grads = backward(adj, &pass, &model, mask, config.weight_decay)?;
        adam_step(&mut model, &grads, &mut adam, config.learning_rate);

        let eval = forward(adj, features, &model, None)?;
        let val_loss = masked_cross_entropy(&eval.log_probs, mask, MaskKind::Val)?;
        history.push(EpochRecord {
            epoch,
            train_loss,
            val_loss,
        });
        match stopper.observe(epoch, val_loss) {
            StopCheck::Improved => best_model.clone_from(&model),
            StopCheck::Waiting => {}
            StopCheck::Stop => {
                stopped_epoch = epoch;
                break;
            }
        }
    }
    Ok(TrainResult {
        model: best_model,
        history,
        stopped_epoch,
        best_epoch: stopper.best_epoch(),
        best_val_loss: stopper.best(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(losses: &[f64], patience: usize) -> (usize, usize) {
        let mut s = EarlyStopping::new(patience);
        for (i, &l) in losses.iter().enumerate() {
            if s.observe(i + 1, l) == StopCheck::Stop {
                return (i + 1, s.best_epoch());
            }
        }
        (losses.len(), s.best_epoch())
    }

    #[test]
    fn strictly_decreasing_never_stops() {
        let losses: Vec<f64> = (0..200).map(|i| 2.0 - i as f64 * 1e-3).collect();
        assert_eq!(run(&losses, 10), (200, 200));
    }

    #[test]
    fn minimum_at_five_stops_at_fifteen() {
        let mut losses = alloc::vec![1.0, 0.9, 0.8, 0.7, 0.6];
        losses.extend(core::iter::repeat_n(0.65, 195));
        assert_eq!(run(&losses, 10), (15, 5));
    }

    #[test]
    fn ties_do_not_count_as_improvement() {
        let mut losses = alloc::vec![1.0, 0.5];
        losses.extend(core::iter::repeat_n(0.5, 10));
        assert_eq!(run(&losses, 10), (12, 2));
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        let mut c = TrainConfig::default();
        c.dropout_rate = 1.0;
        assert!(c.validate().is_err());
        c = TrainConfig::default();
        c.patience = 0;
        assert!(c.validate().is_err());
    }
}
