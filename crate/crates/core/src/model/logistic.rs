use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::textfeat::SparseVector;
use crate::{Error, Result};

/// Allowed rise of the full training loss across one epoch.
const LOSS_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub l2: f64,
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            l2: 1e-4,
            lr: 0.1,
            epochs: 50,
            batch_size: 64,
            seed: 0,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return bad("l2 must be finite and >= 0");
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad("learning rate must be finite and > 0");
        }
        if self.batch_size == 0 {
            return bad("batch size must be > 0");
        }
        Ok(())
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// log(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Per-dimension z-score statistics for the dense prefix `[0, len)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
    /// False for zero-variance dimensions, whose weights stay 0.
    pub active: Vec<bool>,
}

impl Standardization {
    pub fn identity(len: usize) -> Self {
        Standardization {
            mean: vec![0.0; len],
            sd: vec![1.0; len],
            active: vec![true; len],
        }
    }

    /// Population mean and standard deviation over `rows`.
    pub fn fit(rows: &[SparseVector], len: usize) -> Self {
        let n = rows.len().max(1) as f64;
        let dense: Vec<Vec<f64>> = rows.iter().map(|r| dense_prefix(r, len)).collect();
        let mut mean = vec![0.0; len];
        for row in &dense {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; len];
        for row in &dense {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let mut sd = Vec::with_capacity(len);
        let mut active = Vec::with_capacity(len);
        for (s, m) in var.iter().zip(&mean) {
            let d = (s / n).sqrt();
            let ok = d > 1e-12 * m.abs().max(1.0);
            sd.push(if ok { d } else { 1.0 });
            active.push(ok);
        }
        Standardization { mean, sd, active }
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    /// Standardized dense prefix; inactive dimensions map to 0.
    pub fn apply(&self, x: &SparseVector) -> Vec<f64> {
        let mut row = dense_prefix(x, self.len());
        for (j, v) in row.iter_mut().enumerate() {
            *v = if self.active[j] {
                (*v - self.mean[j]) / self.sd[j]
            } else {
                0.0
            };
        }
        row
    }
}

fn dense_prefix(x: &SparseVector, len: usize) -> Vec<f64> {
    let mut row = vec![0.0; len];
    for &(i, v) in x.entries() {
        if i >= len {
            break;
        }
        row[i] = v;
    }
    row
}

/// Rows split into a dense standardized prefix and a sparse remainder.
struct Design {
    dense: Vec<Vec<f64>>,
    tail: Vec<Vec<(usize, f64)>>,
}

impl Design {
    fn build(xs: &[SparseVector], std: &Standardization) -> Self {
        let d = std.len();
        Design {
            dense: xs.iter().map(|x| std.apply(x)).collect(),
            tail: xs
                .iter()
                .map(|x| x.entries().iter().copied().filter(|e| e.0 >= d).collect())
                .collect(),
        }
    }

    fn margin(&self, i: usize, w: &[f64], b: f64) -> f64 {
        let dense: f64 = self.dense[i].iter().zip(w).map(|(x, w)| x * w).sum();
        let tail: f64 = self.tail[i].iter().map(|&(j, v)| v * w[j]).sum();
        dense + tail + b
    }

    /// Mean log loss plus `(l2/2)|w|^2` over `rows`, with its gradient.
    fn loss_grad(&self, rows: &[usize], ys: &[u8], w: &[f64], b: f64, l2: f64) -> (f64, Vec<f64>, f64) {
        let m = rows.len() as f64;
        let mut gw = vec![0.0; w.len()];
        let mut gb = 0.0;
        let mut loss = 0.0;
        for &i in rows {
            let z = self.margin(i, w, b);
            let y = f64::from(ys[i]);
            loss += softplus(z) - y * z;
            let r = (sigmoid(z) - y) / m;
            for (g, x) in gw.iter_mut().zip(&self.dense[i]) {
                *g += r * x;
            }
            for &(j, v) in &self.tail[i] {
                gw[j] += r * v;
            }
            gb += r;
        }
        let norm: f64 = w.iter().map(|v| v * v).sum();
        for (g, v) in gw.iter_mut().zip(w) {
            *g += l2 * v;
        }
        (loss / m + 0.5 * l2 * norm, gw, gb)
    }

    fn loss(&self, ys: &[u8], w: &[f64], b: f64, l2: f64) -> f64 {
        let n = ys.len() as f64;
        let data: f64 = (0..ys.len())
            .map(|i| {
                let z = self.margin(i, w, b);
                softplus(z) - f64::from(ys[i]) * z
            })
            .sum();
        data / n + 0.5 * l2 * w.iter().map(|v| v * v).sum::<f64>()
    }
}

/// Objective and gradient on raw (unstandardized) features. The bias is not
/// regularized.
pub fn loss_and_gradient(
    xs: &[SparseVector],
    ys: &[u8],
    weights: &[f64],
    bias: f64,
    l2: f64,
) -> Result<(f64, Vec<f64>, f64)> {
    check_inputs(xs, ys, weights.len())?;
    let design = Design::build(xs, &Standardization::identity(0));
    let rows: Vec<usize> = (0..xs.len()).collect();
    Ok(design.loss_grad(&rows, ys, weights, bias, l2))
}

fn check_inputs(xs: &[SparseVector], ys: &[u8], dim: usize) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if xs.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(x) = xs.iter().find(|x| x.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: x.dim(),
        });
    }
    if let Some(&y) = ys.iter().find(|&&y| y > 1) {
        return Err(Error::InvalidParameter(format!("label {y} is not binary")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub dim: usize,
    pub bias: f64,
    /// Nonzero weights as `(index, value)`, ascending.
    pub weights: Vec<(usize, f64)>,
    pub standardization: Standardization,
    pub config: TrainConfig,
    /// Full-data objective after each accepted epoch, starting with the initial value.
    pub loss_history: Vec<f64>,
}

impl LogisticModel {
    /// Untrained model over raw features.
    pub fn from_parts(weights: &[f64], bias: f64) -> Self {
        LogisticModel {
            dim: weights.len(),
            bias,
            weights: sparse_weights(weights),
            standardization: Standardization::identity(0),
            config: TrainConfig::default(),
            loss_history: Vec::new(),
        }
    }

    /// Minimizes the regularized mean log loss by seeded mini-batch gradient
    /// descent. The first `dense_block` dimensions are z-scored with training
    /// statistics; the rest are used as given.
    pub fn train(xs: &[SparseVector], ys: &[u8], dense_block: usize, config: &TrainConfig) -> Result<Self> {
        config.validate()?;
        let dim = xs.first().map(SparseVector::dim).ok_or(Error::EmptyInput)?;
        check_inputs(xs, ys, dim)?;
        if dense_block > dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: dense_block,
            });
        }
        let positives = ys.iter().filter(|&&y| y == 1).count();
        if xs.len() < 2 || positives == 0 || positives == ys.len() {
            return Err(Error::DegenerateLabels);
        }

        let standardization = Standardization::fit(xs, dense_block);
        let design = Design::build(xs, &standardization);
        let frozen: Vec<usize> = (0..dense_block).filter(|&j| !standardization.active[j]).collect();

        let mut w = vec![0.0; dim];
        let mut b = 0.0;
        let mut lr = config.lr;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut order: Vec<usize> = (0..xs.len()).collect();
        let mut current = design.loss(ys, &w, b, config.l2);
        let mut history = vec![current];

        for epoch in 0..config.epochs {
            let (saved_w, saved_b) = (w.clone(), b);
            order.shuffle(&mut rng);
            for batch in order.chunks(config.batch_size) {
                let (_, gw, gb) = design.loss_grad(batch, ys, &w, b, config.l2);
                for (v, g) in w.iter_mut().zip(&gw) {
                    *v -= lr * g;
                }
                for &j in &frozen {
                    w[j] = 0.0;
                }
                b -= lr * gb;
            }
            let next = design.loss(ys, &w, b, config.l2);
            if next > current + LOSS_SLACK || !next.is_finite() {
                log::debug!("epoch {epoch}: loss rose to {next}, halving step to {}", lr / 2.0);
                w = saved_w;
                b = saved_b;
                lr /= 2.0;
            } else {
                current = next;
            }
            history.push(current);
        }

        Ok(LogisticModel {
            dim,
            bias: b,
            weights: sparse_weights(&w),
            standardization,
            config: *config,
            loss_history: history,
        })
    }

    pub fn dense_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.dim];
        for &(i, v) in &self.weights {
            w[i] = v;
        }
        w
    }

    pub fn margin(&self, x: &SparseVector) -> Result<f64> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.dim(),
            });
        }
        let d = self.standardization.len();
        let row = self.standardization.apply(x);
        let mut z = self.bias;
        let mut xi = x.entries().iter().skip_while(|e| e.0 < d).peekable();
        for &(j, w) in &self.weights {
            if j < d {
                z += w * row[j];
                continue;
            }
            while xi.peek().is_some_and(|e| e.0 < j) {
                xi.next();
            }
            if let Some(&&(k, v)) = xi.peek() {
                if k == j {
                    z += w * v;
                }
            }
        }
        Ok(z)
    }

    pub fn predict_proba(&self, x: &SparseVector) -> Result<f64> {
        self.margin(x).map(sigmoid)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn sparse_weights(w: &[f64]) -> Vec<(usize, f64)> {
    w.iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(i, v)| (i, *v))
        .collect()
}
