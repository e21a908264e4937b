//! Linear classifiers over z-scored features.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::Dataset;
use crate::error::{Error, Result};

/// Per-column z-scoring fitted on training rows. Constant columns map to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    /// Population deviation, or 0 for a constant column.
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let f = rows.first().map_or(0, Vec::len);
        let n = rows.len().max(1) as f64;
        let mut mean = vec![0.0; f];
        for r in rows {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; f];
        for r in rows {
            for j in 0..f {
                var[j] += (r[j] - mean[j]).powi(2);
            }
        }
        let scale = var
            .iter()
            .zip(&mean)
            .map(|(v, m)| {
                let sd = (v / n).sqrt();
                if sd <= 1e-12 * m.abs().max(1.0) {
                    0.0
                } else {
                    sd
                }
            })
            .collect();
        Standardizer { mean, scale }
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(v, (m, s))| if *s == 0.0 { 0.0 } else { (v - m) / s })
            .collect()
    }

    pub fn transform(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.transform_row(r)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Logistic,
    LinearSvm,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Logistic => "logistic",
            ModelKind::LinearSvm => "linear_svm",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logistic" => Ok(ModelKind::Logistic),
            "linear_svm" | "svm" => Ok(ModelKind::LinearSvm),
            other => Err(Error::Config(format!("unknown classifier `{other}` (logistic, linear_svm)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticConfig {
    pub l2: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub tolerance: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            l2: 1e-4,
            learning_rate: 0.1,
            epochs: 200,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmConfig {
    pub c: f64,
    pub epochs: usize,
    pub fit_intercept: bool,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            c: 1.0,
            epochs: 200,
            fit_intercept: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelConfig {
    Logistic(LogisticConfig),
    LinearSvm(SvmConfig),
}

impl ModelConfig {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelConfig::Logistic(_) => ModelKind::Logistic,
            ModelConfig::LinearSvm(_) => ModelKind::LinearSvm,
        }
    }

    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Logistic => ModelConfig::Logistic(LogisticConfig::default()),
            ModelKind::LinearSvm => ModelConfig::LinearSvm(SvmConfig::default()),
        }
    }

    pub fn train(&self, data: &Dataset, seed: u64) -> Result<TrainedModel> {
        match self {
            ModelConfig::Logistic(c) => train_logistic(data, c, seed),
            ModelConfig::LinearSvm(c) => train_svm(data, c, seed),
        }
    }
}

/// Platt link `1 / (1 + exp(a·m + b))` from margin to probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub a: f64,
    pub b: f64,
}

impl Calibration {
    pub fn apply(&self, margin: f64) -> f64 {
        1.0 / (1.0 + (self.a * margin + self.b).exp())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub kind: ModelKind,
    pub class_names: Vec<String>,
    pub schema_digest: String,
    pub standardizer: Standardizer,
    /// `C × (F + 1)`, bias last.
    pub weights: Vec<Vec<f64>>,
    /// One link per class for SVMs; empty for logistic models.
    pub calibration: Vec<Calibration>,
}

fn dot_bias(w: &[f64], x: &[f64]) -> f64 {
    let f = x.len();
    w[..f].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + w[f]
}

pub fn softmax(z: &[f64]) -> Vec<f64> {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s).collect()
}

/// Index of the largest score; the lowest index wins ties.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

impl TrainedModel {
    /// Raw linear scores: logits or margins.
    pub fn decision(&self, row: &[f64]) -> Vec<f64> {
        let x = self.standardizer.transform_row(row);
        self.weights.iter().map(|w| dot_bias(w, &x)).collect()
    }

    pub fn predict(&self, row: &[f64]) -> usize {
        argmax(&self.decision(row))
    }

    /// Per-class scores in `[0, 1]` used for ranking metrics: softmax
    /// probabilities, or calibrated one-vs-rest margins.
    pub fn class_scores(&self, row: &[f64]) -> Vec<f64> {
        let d = self.decision(row);
        match self.kind {
            ModelKind::Logistic => softmax(&d),
            ModelKind::LinearSvm => d.iter().zip(&self.calibration).map(|(m, c)| c.apply(*m)).collect(),
        }
    }

    pub fn to_text(&self) -> String {
        fn join(xs: &[f64]) -> String {
            xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        }
        let mut s = String::new();
        let _ = writeln!(s, "oovcat-model 1");
        let _ = writeln!(s, "kind {}", self.kind.as_str());
        let _ = writeln!(s, "schema {}", self.schema_digest);
        let _ = writeln!(s, "classes {}", self.class_names.join(" "));
        let _ = writeln!(s, "features {}", self.standardizer.mean.len());
        let _ = writeln!(s, "mean {}", join(&self.standardizer.mean));
        let _ = writeln!(s, "scale {}", join(&self.standardizer.scale));
        for w in &self.weights {
            let _ = writeln!(s, "weights {}", join(w));
        }
        for c in &self.calibration {
            let _ = writeln!(s, "calibration {} {}", c.a, c.b);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let bad = |n: usize, m: &str| Error::parse(format!("model line {}", n + 1), m.to_string());
        match lines.next() {
            Some((_, "oovcat-model 1")) => {}
            _ => return Err(bad(0, "bad magic")),
        }
        let mut kind = None;
        let mut digest = None;
        let mut classes = None;
        let mut features = None;
        let mut mean = None;
        let mut scale = None;
        let mut weights = Vec::new();
        let mut calibration = Vec::new();
        for (n, line) in lines {
            let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
            let floats = || -> Result<Vec<f64>> {
                rest.split_whitespace()
                    .map(|t| t.parse().map_err(|_| bad(n, "bad number")))
                    .collect()
            };
            match key {
                "kind" => kind = Some(rest.parse::<ModelKind>().map_err(|_| bad(n, "unknown kind"))?),
                "schema" => digest = Some(rest.to_string()),
                "classes" => classes = Some(rest.split(' ').map(str::to_string).collect::<Vec<_>>()),
                "features" => features = Some(rest.parse::<usize>().map_err(|_| bad(n, "bad feature count"))?),
                "mean" => mean = Some(floats()?),
                "scale" => scale = Some(floats()?),
                "weights" => weights.push(floats()?),
                "calibration" => match floats()?.as_slice() {
                    [a, b] => calibration.push(Calibration { a: *a, b: *b }),
                    _ => return Err(bad(n, "calibration needs two values")),
                },
                "" => {}
                _ => return Err(bad(n, "unknown key")),
            }
        }
        let missing = |k: &str| Error::parse("model", format!("missing `{k}`"));
        let kind = kind.ok_or_else(|| missing("kind"))?;
        let class_names = classes.ok_or_else(|| missing("classes"))?;
        let f = features.ok_or_else(|| missing("features"))?;
        let standardizer = Standardizer {
            mean: mean.ok_or_else(|| missing("mean"))?,
            scale: scale.ok_or_else(|| missing("scale"))?,
        };
        if standardizer.mean.len() != f || standardizer.scale.len() != f {
            return Err(Error::parse("model", "standardization length mismatch"));
        }
        if weights.len() != class_names.len() || weights.iter().any(|w| w.len() != f + 1) {
            return Err(Error::parse("model", "weight matrix shape mismatch"));
        }
        let want_cal = if kind == ModelKind::LinearSvm { class_names.len() } else { 0 };
        if calibration.len() != want_cal {
            return Err(Error::parse("model", "calibration count mismatch"));
        }
        Ok(TrainedModel {
            kind,
            class_names,
            schema_digest: digest.ok_or_else(|| missing("schema"))?,
            standardizer,
            weights,
            calibration,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }

    /// Errors unless `data` carries the schema this model was trained on.
    pub fn check_schema(&self, data: &Dataset) -> Result<()> {
        if data.schema.digest() != self.schema_digest {
            return Err(Error::Invalid("dataset schema differs from the model's training schema".into()));
        }
        Ok(())
    }
}

fn check_trainable(data: &Dataset) -> Result<()> {
    if data.is_empty() {
        return Err(Error::Invalid("empty training set".into()));
    }
    if data.class_counts().iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::SingleClass);
    }
    Ok(())
}

/// Mean cross-entropy plus `l2/2 · ‖W‖²` (biases unpenalized) and its
/// gradient. `w` is `C × (F + 1)` row-major.
pub fn logistic_loss_grad(w: &[f64], x: &[Vec<f64>], y: &[usize], classes: usize, l2: f64) -> (f64, Vec<f64>) {
    let f = x.first().map_or(0, Vec::len);
    let stride = f + 1;
    let n = x.len().max(1) as f64;
    let mut grad = vec![0.0; w.len()];
    let mut loss = 0.0;
    for (xi, &yi) in x.iter().zip(y) {
        let z: Vec<f64> = (0..classes).map(|c| dot_bias(&w[c * stride..(c + 1) * stride], xi)).collect();
        let p = softmax(&z);
        loss -= p[yi].max(f64::MIN_POSITIVE).ln();
        for c in 0..classes {
            let r = (p[c] - f64::from(u8::from(c == yi))) / n;
            let g = &mut grad[c * stride..(c + 1) * stride];
            for j in 0..f {
                g[j] += r * xi[j];
            }
            g[f] += r;
        }
    }
    loss /= n;
    for c in 0..classes {
        for j in 0..f {
            let wj = w[c * stride + j];
            loss += 0.5 * l2 * wj * wj;
            grad[c * stride + j] += l2 * wj;
        }
    }
    (loss, grad)
}

/// Softmax regression by seeded SGD with step `lr / √epoch`. Returns the
/// lowest-loss epoch's weights.
pub fn train_logistic(data: &Dataset, cfg: &LogisticConfig, seed: u64) -> Result<TrainedModel> {
    if !(cfg.l2.is_finite() && cfg.l2 >= 0.0) {
        return Err(Error::Config(format!("l2 must be non-negative, got {}", cfg.l2)));
    }
    check_trainable(data)?;
    let standardizer = Standardizer::fit(&data.rows);
    let x = standardizer.transform(&data.rows);
    let (c, f) = (data.num_classes(), data.num_features());
    let stride = f + 1;
    let mut w = vec![0.0; c * stride];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..x.len()).collect();
    let mut best = (logistic_loss_grad(&w, &x, &data.labels, c, cfg.l2).0, w.clone());
    let mut prev = best.0;
    for epoch in 1..=cfg.epochs {
        let lr = cfg.learning_rate / (epoch as f64).sqrt();
        order.shuffle(&mut rng);
        for &i in &order {
            let xi = &x[i];
            let z: Vec<f64> = (0..c).map(|k| dot_bias(&w[k * stride..(k + 1) * stride], xi)).collect();
            let p = softmax(&z);
            for k in 0..c {
                let r = p[k] - f64::from(u8::from(k == data.labels[i]));
                let wk = &mut w[k * stride..(k + 1) * stride];
                for j in 0..f {
                    wk[j] -= lr * (r * xi[j] + cfg.l2 * wk[j]);
                }
                wk[f] -= lr * r;
            }
        }
        let loss = logistic_loss_grad(&w, &x, &data.labels, c, cfg.l2).0;
        if loss < best.0 {
            best = (loss, w.clone());
        }
        if (prev - loss).abs() < cfg.tolerance {
            break;
        }
        prev = loss;
    }
    Ok(TrainedModel {
        kind: ModelKind::Logistic,
        class_names: data.class_names.clone(),
        schema_digest: data.schema.digest(),
        standardizer,
        weights: best.1.chunks(stride).map(<[f64]>::to_vec).collect(),
        calibration: Vec::new(),
    })
}

/// `λ/2 ‖w‖² + mean hinge` for labels in {−1, +1}. With an intercept the
/// bias is the last weight, penalized like the rest.
pub fn svm_objective(w: &[f64], x: &[Vec<f64>], y: &[f64], lambda: f64, fit_intercept: bool) -> f64 {
    let n = x.len().max(1) as f64;
    let hinge: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (1.0 - yi * svm_margin(w, xi, fit_intercept)).max(0.0))
        .sum();
    0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>() + hinge / n
}

fn svm_margin(w: &[f64], x: &[f64], fit_intercept: bool) -> f64 {
    let s: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum();
    if fit_intercept {
        s + w[x.len()]
    } else {
        s
    }
}

/// Full-batch subgradient descent with step `1/(λt)` and projection onto
/// the ball of radius `1/√λ`, keeping the best iterate.
pub fn train_binary_svm(x: &[Vec<f64>], y: &[f64], lambda: f64, epochs: usize, fit_intercept: bool) -> (Vec<f64>, f64) {
    let f = x.first().map_or(0, Vec::len);
    let dim = f + usize::from(fit_intercept);
    let n = x.len().max(1) as f64;
    let mut w = vec![0.0; dim];
    let mut best = (svm_objective(&w, x, y, lambda, fit_intercept), w.clone());
    let radius = 1.0 / lambda.sqrt();
    let mut g = vec![0.0; dim];
    for t in 1..=epochs {
        for (gj, wj) in g.iter_mut().zip(&w) {
            *gj = lambda * wj;
        }
        for (xi, &yi) in x.iter().zip(y) {
            if yi * svm_margin(&w, xi, fit_intercept) < 1.0 {
                for j in 0..f {
                    g[j] -= yi * xi[j] / n;
                }
                if fit_intercept {
                    g[f] -= yi / n;
                }
            }
        }
        let eta = 1.0 / (lambda * t as f64);
        for (wj, gj) in w.iter_mut().zip(&g) {
            *wj -= eta * gj;
        }
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > radius {
            w.iter_mut().for_each(|v| *v *= radius / norm);
        }
        let obj = svm_objective(&w, x, y, lambda, fit_intercept);
        if obj < best.0 {
            best = (obj, w.clone());
        }
    }
    (best.1, best.0)
}

/// Fits a Platt link by Newton's method on smoothed targets.
pub fn fit_platt(margins: &[f64], positive: &[bool]) -> Calibration {
    let n_pos = positive.iter().filter(|&&p| p).count() as f64;
    let n_neg = positive.len() as f64 - n_pos;
    let hi = (n_pos + 1.0) / (n_pos + 2.0);
    let lo = 1.0 / (n_neg + 2.0);
    let t: Vec<f64> = positive.iter().map(|&p| if p { hi } else { lo }).collect();
    let (mut a, mut b) = (0.0, ((n_neg + 1.0) / (n_pos + 1.0)).ln());
    let nll = |a: f64, b: f64| -> f64 {
        margins
            .iter()
            .zip(&t)
            .map(|(m, ti)| {
                let f = a * m + b;
                // log(1 + e^f) - (1 - t) f, computed stably
                let softplus = if f > 0.0 { f + (-f).exp().ln_1p() } else { f.exp().ln_1p() };
                softplus - (1.0 - ti) * f
            })
            .sum()
    };
    let mut cur = nll(a, b);
    for _ in 0..100 {
        let (mut g1, mut g2, mut h11, mut h22, mut h21) = (0.0, 0.0, 1e-12, 1e-12, 0.0);
        for (m, ti) in margins.iter().zip(&t) {
            let p = 1.0 / (1.0 + (-(a * m + b)).exp());
            let d = p - (1.0 - ti);
            let h = p * (1.0 - p);
            g1 += d * m;
            g2 += d;
            h11 += h * m * m;
            h22 += h;
            h21 += h * m;
        }
        let det = h11 * h22 - h21 * h21;
        if det.abs() < 1e-300 || (g1.abs() < 1e-10 && g2.abs() < 1e-10) {
            break;
        }
        let da = -(h22 * g1 - h21 * g2) / det;
        let db = -(-h21 * g1 + h11 * g2) / det;
        let mut step = 1.0;
        while step > 1e-10 {
            let next = nll(a + step * da, b + step * db);
            if next < cur + 1e-4 * step * (g1 * da + g2 * db) {
                a += step * da;
                b += step * db;
                cur = next;
                break;
            }
            step /= 2.0;
        }
        if step <= 1e-10 {
            break;
        }
    }
    Calibration { a, b }
}

/// One-vs-rest linear SVMs with `λ = 1/(c·N)` and Platt calibration fitted
/// on the training margins.
pub fn train_svm(data: &Dataset, cfg: &SvmConfig, _seed: u64) -> Result<TrainedModel> {
    if !(cfg.c.is_finite() && cfg.c > 0.0) {
        return Err(Error::Config(format!("SVM c must be positive, got {}", cfg.c)));
    }
    check_trainable(data)?;
    let standardizer = Standardizer::fit(&data.rows);
    let x = standardizer.transform(&data.rows);
    let f = data.num_features();
    let lambda = 1.0 / (cfg.c * x.len() as f64);
    let mut weights = Vec::new();
    let mut calibration = Vec::new();
    for k in 0..data.num_classes() {
        let y: Vec<f64> = data.labels.iter().map(|&l| if l == k { 1.0 } else { -1.0 }).collect();
        let (mut w, _) = train_binary_svm(&x, &y, lambda, cfg.epochs, cfg.fit_intercept);
        if !cfg.fit_intercept {
            w.push(0.0);
        }
        let margins: Vec<f64> = x.iter().map(|xi| dot_bias(&w, xi)).collect();
        let positive: Vec<bool> = y.iter().map(|&v| v > 0.0).collect();
        calibration.push(fit_platt(&margins, &positive));
        debug_assert_eq!(w.len(), f + 1);
        weights.push(w);
    }
    Ok(TrainedModel {
        kind: ModelKind::LinearSvm,
        class_names: data.class_names.clone(),
        schema_digest: data.schema.digest(),
        standardizer,
        weights,
        calibration,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureSchema;

    fn blobs(classes: usize, per: usize) -> Dataset {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for c in 0..classes {
            for i in 0..per {
                let jitter = (i as f64 * 0.37).sin() * 0.3;
                let angle = c as f64 * std::f64::consts::TAU / classes as f64;
                rows.push(vec![3.0 * angle.cos() + jitter, 3.0 * angle.sin() - jitter, 10.0]);
                labels.push(c);
            }
        }
        let schema = FeatureSchema::from_names(vec!["lex.a".into(), "con.b".into(), "ctx.c".into()]).unwrap();
        Dataset::new(
            (0..rows.len()).map(|i| format!("w{i}")).collect(),
            schema,
            rows,
            labels,
            (0..classes).map(|c| format!("c{c}")).collect(),
        )
        .unwrap()
    }

    fn train_acc(m: &TrainedModel, d: &Dataset) -> f64 {
        d.rows.iter().zip(&d.labels).filter(|(r, &l)| m.predict(r) == l).count() as f64 / d.len() as f64
    }

    #[test]
    fn standardizer_moments() {
        let rows = vec![vec![1.0, 5.0], vec![2.0, 5.0], vec![6.0, 5.0]];
        let s = Standardizer::fit(&rows);
        let z = s.transform(&rows);
        let mean: f64 = z.iter().map(|r| r[0]).sum::<f64>() / 3.0;
        let var: f64 = z.iter().map(|r| r[0] * r[0]).sum::<f64>() / 3.0;
        assert!(mean.abs() < 1e-12 && (var - 1.0).abs() < 1e-12);
        assert!(z.iter().all(|r| r[1] == 0.0));
    }

    #[test]
    fn zero_weights_give_uniform_loss() {
        let x = vec![vec![1.0, 2.0]; 8];
        let y = vec![0, 1, 2, 3, 0, 1, 2, 3];
        let (loss, _) = logistic_loss_grad(&[0.0; 12], &x, &y, 4, 0.0);
        assert!((loss - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn both_fit_separable_blobs() {
        let d = blobs(4, 15);
        let lr = train_logistic(&d, &LogisticConfig::default(), 1).unwrap();
        assert_eq!(train_acc(&lr, &d), 1.0);
        let svm = train_svm(&d, &SvmConfig::default(), 1).unwrap();
        assert_eq!(train_acc(&svm, &d), 1.0);
        for r in &d.rows {
            let p = lr.class_scores(r);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(svm.class_scores(r).iter().all(|s| (0.0..=1.0).contains(s)));
        }
    }

    #[test]
    fn single_class_rejected() {
        let mut d = blobs(2, 5);
        d.labels = vec![0; 10];
        assert!(matches!(train_logistic(&d, &LogisticConfig::default(), 0), Err(Error::SingleClass)));
        assert!(matches!(train_svm(&d, &SvmConfig::default(), 0), Err(Error::SingleClass)));
    }

    #[test]
    fn model_text_round_trip() {
        let d = blobs(3, 6);
        for m in [
            train_logistic(&d, &LogisticConfig::default(), 2).unwrap(),
            train_svm(&d, &SvmConfig::default(), 2).unwrap(),
        ] {
            let back = TrainedModel::from_text(&m.to_text()).unwrap();
            assert_eq!(back, m);
            for r in &d.rows {
                let (a, b) = (m.class_scores(r), back.class_scores(r));
                assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
            }
        }
    }

    #[test]
    fn platt_is_monotone_increasing_for_separable_margins() {
        let m = [-2.0, -1.5, -1.0, 1.0, 1.2, 2.0];
        let pos = [false, false, false, true, true, true];
        let c = fit_platt(&m, &pos);
        assert!(c.a < 0.0);
        assert!(c.apply(2.0) > 0.5 && c.apply(-2.0) < 0.5);
    }
}
