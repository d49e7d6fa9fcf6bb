//! Small fully connected networks: tanh hidden layers, linear output.
//!
//! Training minimises `0.5 * mean((pred - target)^2)` with Adam on shuffled
//! minibatches, holding out the chronologically last fraction of samples for
//! early stopping. All randomness comes from explicit seeds.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
}

/// Dense layer; `weights` is row-major `out x in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Layer {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            biases: vec![0.0; outputs],
        }
    }

    #[inline]
    fn affine(&self, x: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let row = &self.weights[r * self.inputs..(r + 1) * self.inputs];
            *o = self.biases[r] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub best_validation_loss: f64,
    pub train_samples: usize,
    pub validation_samples: usize,
    pub config: TrainConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    sizes: Vec<usize>,
    layers: Vec<Layer>,
    activation: Activation,
    seed: u64,
    pub training_meta: Option<TrainingMeta>,
}

/// Xavier-uniform weights from a seeded generator, zero biases.
pub fn mlp_new(sizes: &[usize], seed: u64) -> Result<MlpModel> {
    if sizes.len() < 2 || sizes.contains(&0) {
        return Err(Error::InvalidParameter(format!(
            "network needs at least two layer sizes, all >= 1; got {sizes:?}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layers = sizes
        .windows(2)
        .map(|w| {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let mut layer = Layer::zeros(fan_in, fan_out);
            for v in &mut layer.weights {
                *v = rng.random_range(-bound..bound);
            }
            layer
        })
        .collect();
    Ok(MlpModel {
        sizes: sizes.to_vec(),
        layers,
        activation: Activation::Tanh,
        seed,
        training_meta: None,
    })
}

/// Per-sample activations, reused across forward/backward passes.
#[derive(Debug, Clone)]
pub struct Workspace {
    acts: Vec<Vec<f64>>,
    deltas: Vec<Vec<f64>>,
}

impl MlpModel {
    pub fn from_layers(layers: Vec<Layer>, seed: u64) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidParameter("network needs at least one layer".into()));
        }
        let mut sizes = vec![layers[0].inputs];
        for (i, l) in layers.iter().enumerate() {
            if l.inputs != *sizes.last().expect("non-empty") {
                return Err(Error::DimensionMismatch {
                    expected: *sizes.last().expect("non-empty"),
                    actual: l.inputs,
                    context: "layer input size",
                });
            }
            if l.weights.len() != l.inputs * l.outputs || l.biases.len() != l.outputs {
                return Err(Error::MalformedDocument(format!("layer {i} has inconsistent shapes")));
            }
            if l.weights.iter().chain(&l.biases).any(|v| !v.is_finite()) {
                return Err(Error::MalformedDocument(format!("layer {i} has non-finite parameters")));
            }
            sizes.push(l.outputs);
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidParameter("layer sizes must be >= 1".into()));
        }
        Ok(Self {
            sizes,
            layers,
            activation: Activation::Tanh,
            seed,
            training_meta: None,
        })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn input_size(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_size(&self) -> usize {
        *self.sizes.last().expect("at least two sizes")
    }

    pub fn workspace(&self) -> Workspace {
        Workspace {
            acts: self.sizes.iter().map(|&n| vec![0.0; n]).collect(),
            deltas: self.sizes[1..].iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut ws = self.workspace();
        self.forward_with(x, &mut ws)?;
        Ok(ws.acts.pop().expect("output layer"))
    }

    /// Forward pass into `ws`; the output is left in the last activation slot.
    pub fn forward_with<'w>(&self, x: &[f64], ws: &'w mut Workspace) -> Result<&'w [f64]> {
        if x.len() != self.input_size() {
            return Err(Error::DimensionMismatch {
                expected: self.input_size(),
                actual: x.len(),
                context: "network input",
            });
        }
        ws.acts[0].copy_from_slice(x);
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let (head, tail) = ws.acts.split_at_mut(l + 1);
            let out = &mut tail[0];
            layer.affine(&head[l], out);
            if l < last {
                out.iter_mut().for_each(|v| *v = v.tanh());
            }
        }
        Ok(ws.acts.last().expect("output layer"))
    }

    /// Loss and parameter gradients for one sample.
    pub fn backward(&self, x: &[f64], target: &[f64]) -> Result<(f64, Gradients)> {
        let mut ws = self.workspace();
        let mut grads = Gradients::zeros_like(self);
        let loss = self.accumulate(x, target, &mut ws, &mut grads, 1.0)?;
        Ok((loss, grads))
    }

    /// Adds `scale * dLoss/dparam` for one sample into `grads`; returns the loss.
    fn accumulate(
        &self,
        x: &[f64],
        target: &[f64],
        ws: &mut Workspace,
        grads: &mut Gradients,
        scale: f64,
    ) -> Result<f64> {
        if target.len() != self.output_size() {
            return Err(Error::DimensionMismatch {
                expected: self.output_size(),
                actual: target.len(),
                context: "network target",
            });
        }
        self.forward_with(x, ws)?;
        let n_layers = self.layers.len();
        let out = &ws.acts[n_layers];
        let m = target.len() as f64;
        let mut loss = 0.0;
        let delta = &mut ws.deltas[n_layers - 1];
        for ((d, p), t) in delta.iter_mut().zip(out).zip(target) {
            let e = p - t;
            loss += e * e;
            *d = e / m;
        }
        loss *= 0.5 / m;
        for l in (0..n_layers).rev() {
            let layer = &self.layers[l];
            let (gw, gb) = &mut grads.layers[l];
            let input = &ws.acts[l];
            let delta = &ws.deltas[l];
            for (r, &dr) in delta.iter().enumerate() {
                let g = dr * scale;
                gb[r] += g;
                let row = &mut gw[r * layer.inputs..(r + 1) * layer.inputs];
                for (w, &a) in row.iter_mut().zip(input) {
                    *w += g * a;
                }
            }
            if l > 0 {
                let (lower, upper) = ws.deltas.split_at_mut(l);
                let prev = &mut lower[l - 1];
                let delta = &upper[0];
                for (c, p) in prev.iter_mut().enumerate() {
                    let mut s = 0.0;
                    for (r, &dr) in delta.iter().enumerate() {
                        s += layer.weights[r * layer.inputs + c] * dr;
                    }
                    let a = ws.acts[l][c];
                    *p = s * (1.0 - a * a);
                }
            }
        }
        Ok(loss)
    }

    /// Total number of scalar parameters.
    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    fn param_slot(&mut self, mut i: usize) -> &mut f64 {
        for l in &mut self.layers {
            if i < l.weights.len() {
                return &mut l.weights[i];
            }
            i -= l.weights.len();
            if i < l.biases.len() {
                return &mut l.biases[i];
            }
            i -= l.biases.len();
        }
        panic!("parameter index out of range")
    }

    /// Parameter `i` in flat order: layer by layer, weights then biases.
    pub fn param(&self, mut i: usize) -> f64 {
        for l in &self.layers {
            if i < l.weights.len() {
                return l.weights[i];
            }
            i -= l.weights.len();
            if i < l.biases.len() {
                return l.biases[i];
            }
            i -= l.biases.len();
        }
        panic!("parameter index out of range")
    }

    pub fn set_param(&mut self, i: usize, v: f64) {
        *self.param_slot(i) = v;
    }

    pub fn mean_loss(&self, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<f64> {
        if inputs.is_empty() {
            return Err(Error::InsufficientData("loss over an empty set".into()));
        }
        let mut ws = self.workspace();
        let mut total = 0.0;
        for (x, t) in inputs.iter().zip(targets) {
            let p = self.forward_with(x, &mut ws)?;
            total += loss_mse(p, t)?;
        }
        Ok(total / inputs.len() as f64)
    }
}

/// Gradients shaped like the model: `(d weights, d biases)` per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<(Vec<f64>, Vec<f64>)>,
}

impl Gradients {
    pub fn zeros_like(m: &MlpModel) -> Self {
        Self {
            layers: m
                .layers
                .iter()
                .map(|l| (vec![0.0; l.weights.len()], vec![0.0; l.biases.len()]))
                .collect(),
        }
    }

    /// Gradient `i` in the same flat order as [`MlpModel::param`].
    pub fn get(&self, mut i: usize) -> f64 {
        for (w, b) in &self.layers {
            if i < w.len() {
                return w[i];
            }
            i -= w.len();
            if i < b.len() {
                return b[i];
            }
            i -= b.len();
        }
        panic!("gradient index out of range")
    }

    fn clear(&mut self) {
        for (w, b) in &mut self.layers {
            w.iter_mut().for_each(|v| *v = 0.0);
            b.iter_mut().for_each(|v| *v = 0.0);
        }
    }
}

/// `0.5 * mean((pred - target)^2)`.
pub fn loss_mse(pred: &[f64], target: &[f64]) -> Result<f64> {
    if pred.len() != target.len() || pred.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: target.len(),
            actual: pred.len(),
            context: "loss operands",
        });
    }
    let s: f64 = pred.iter().zip(target).map(|(p, t)| (p - t).powi(2)).sum();
    Ok(0.5 * s / pred.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            batch_size: 32,
            max_epochs: 200,
            patience: 10,
            validation_fraction: 0.2,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidParameter("learning rate must be > 0".into()));
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return Err(Error::InvalidParameter("validation fraction must be in (0, 1)".into()));
        }
        if self.patience == 0 || self.batch_size == 0 {
            return Err(Error::InvalidParameter("patience and batch size must be >= 1".into()));
        }
        Ok(())
    }
}

/// Per-epoch losses; index 0 is the untrained model.
#[derive(Debug, Clone, PartialEq)]
pub struct LossHistory {
    pub train: Vec<f64>,
    pub validation: Vec<f64>,
    pub best_epoch: usize,
}

impl LossHistory {
    pub fn best_validation(&self) -> f64 {
        self.validation[self.best_epoch]
    }
}

struct Adam {
    m: Gradients,
    v: Gradients,
    t: i32,
}

impl Adam {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn step(&mut self, model: &mut MlpModel, g: &Gradients, lr: f64) {
        self.t += 1;
        let c1 = 1.0 - Self::BETA1.powi(self.t);
        let c2 = 1.0 - Self::BETA2.powi(self.t);
        for (l, layer) in model.layers.iter_mut().enumerate() {
            let params = layer.weights.iter_mut().chain(layer.biases.iter_mut());
            let grads = g.layers[l].0.iter().chain(&g.layers[l].1);
            let (mw, mb) = &mut self.m.layers[l];
            let (vw, vb) = &mut self.v.layers[l];
            let ms = mw.iter_mut().chain(mb.iter_mut());
            let vs = vw.iter_mut().chain(vb.iter_mut());
            for (((p, &gi), m), v) in params.zip(grads).zip(ms).zip(vs) {
                *m = Self::BETA1 * *m + (1.0 - Self::BETA1) * gi;
                *v = Self::BETA2 * *v + (1.0 - Self::BETA2) * gi * gi;
                *p -= lr * (*m / c1) / ((*v / c2).sqrt() + Self::EPS);
            }
        }
    }
}

/// Trains a copy of `model` and returns the parameters of the best validation
/// epoch together with the loss history.
pub fn fit(
    model: &MlpModel,
    inputs: &[Vec<f64>],
    targets: &[Vec<f64>],
    cfg: &TrainConfig,
) -> Result<(MlpModel, LossHistory)> {
    cfg.validate()?;
    if inputs.is_empty() {
        return Err(Error::InsufficientData("training set is empty".into()));
    }
    if inputs.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: inputs.len(),
            actual: targets.len(),
            context: "training targets",
        });
    }
    if inputs.len() < 2 {
        return Err(Error::InsufficientData(
            "need at least two samples for a validation split".into(),
        ));
    }
    let n = inputs.len();
    let n_val = ((n as f64 * cfg.validation_fraction).round() as usize).clamp(1, n - 1);
    let n_train = n - n_val;
    let (train_x, val_x) = inputs.split_at(n_train);
    let (train_y, val_y) = targets.split_at(n_train);

    let mut current = model.clone();
    let mut best = model.clone();
    let mut history = LossHistory {
        train: vec![current.mean_loss(train_x, train_y)?],
        validation: vec![current.mean_loss(val_x, val_y)?],
        best_epoch: 0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..n_train).collect();
    let mut ws = current.workspace();
    let mut grads = Gradients::zeros_like(&current);
    let mut adam = Adam {
        m: Gradients::zeros_like(&current),
        v: Gradients::zeros_like(&current),
        t: 0,
    };
    let mut stale = 0;
    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut train_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            grads.clear();
            let scale = 1.0 / batch.len() as f64;
            for &i in batch {
                train_loss += current.accumulate(&train_x[i], &train_y[i], &mut ws, &mut grads, scale)?;
            }
            adam.step(&mut current, &grads, cfg.learning_rate);
        }
        history.train.push(train_loss / n_train as f64);
        let val = current.mean_loss(val_x, val_y)?;
        if !val.is_finite() {
            return Err(Error::InvalidParameter(format!("training diverged at epoch {epoch}")));
        }
        history.validation.push(val);
        if val < history.best_validation() {
            history.best_epoch = epoch;
            best = current.clone();
            stale = 0;
        } else {
            stale += 1;
            if stale >= cfg.patience {
                break;
            }
        }
    }
    best.training_meta = Some(TrainingMeta {
        epochs_run: history.validation.len() - 1,
        best_epoch: history.best_epoch,
        best_validation_loss: history.best_validation(),
        train_samples: n_train,
        validation_samples: n_val,
        config: cfg.clone(),
    });
    Ok((best, history))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub format_version: u32,
    pub sizes: Vec<usize>,
    pub activation: Activation,
    /// Per layer, `out` rows of `in` weights.
    pub weights: Vec<Vec<Vec<f64>>>,
    pub biases: Vec<Vec<f64>>,
    pub seed: u64,
    pub training_meta: Option<TrainingMeta>,
}

pub fn save_model(m: &MlpModel) -> ModelDocument {
    ModelDocument {
        format_version: MODEL_FORMAT_VERSION,
        sizes: m.sizes.clone(),
        activation: m.activation,
        weights: m
            .layers
            .iter()
            .map(|l| l.weights.chunks(l.inputs).map(<[f64]>::to_vec).collect())
            .collect(),
        biases: m.layers.iter().map(|l| l.biases.clone()).collect(),
        seed: m.seed,
        training_meta: m.training_meta.clone(),
    }
}

pub fn load_model(doc: &ModelDocument) -> Result<MlpModel> {
    if doc.format_version != MODEL_FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            found: doc.format_version,
            expected: MODEL_FORMAT_VERSION,
        });
    }
    if doc.sizes.len() < 2
        || doc.weights.len() != doc.sizes.len() - 1
        || doc.biases.len() != doc.sizes.len() - 1
    {
        return Err(Error::MalformedDocument("layer count does not match sizes".into()));
    }
    let mut layers = Vec::with_capacity(doc.weights.len());
    for (l, (w, b)) in doc.weights.iter().zip(&doc.biases).enumerate() {
        let (inputs, outputs) = (doc.sizes[l], doc.sizes[l + 1]);
        if w.len() != outputs || w.iter().any(|row| row.len() != inputs) || b.len() != outputs {
            return Err(Error::MalformedDocument(format!("layer {l} shape disagrees with sizes")));
        }
        layers.push(Layer {
            inputs,
            outputs,
            weights: w.iter().flatten().copied().collect(),
            biases: b.clone(),
        });
    }
    let mut m = MlpModel::from_layers(layers, doc.seed)?;
    m.training_meta = doc.training_meta.clone();
    Ok(m)
}

/// Checks `format_version` before the rest of the document so that unknown
/// versions are reported as such rather than as shape errors.
pub fn check_version(value: &serde_json::Value, expected: u32) -> Result<()> {
    let field = value
        .get("format_version")
        .ok_or_else(|| Error::MalformedDocument("missing format_version".into()))?;
    let found = match field {
        serde_json::Value::Number(n) => n.as_u64(),
        serde_json::Value::String(s) => s.trim().parse::<u64>().ok(),
        _ => None,
    }
    .ok_or_else(|| Error::MalformedDocument(format!("unreadable format_version {field}")))?;
    if found != u64::from(expected) {
        return Err(Error::VersionMismatch {
            found: u32::try_from(found).unwrap_or(u32::MAX),
            expected,
        });
    }
    Ok(())
}

pub fn model_to_json(m: &MlpModel) -> Result<String> {
    Ok(serde_json::to_string_pretty(&save_model(m))?)
}

pub fn model_from_json(text: &str) -> Result<MlpModel> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::MalformedDocument(e.to_string()))?;
    check_version(&value, MODEL_FORMAT_VERSION)?;
    let doc: ModelDocument =
        serde_json::from_value(value).map_err(|e| Error::MalformedDocument(e.to_string()))?;
    load_model(&doc)
}
