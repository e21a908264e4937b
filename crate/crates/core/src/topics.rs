//! Latent Dirichlet allocation trained by collapsed Gibbs sampling over one
//! document per OOV word.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::OovProfile;

/// Bags of word ids, one per profiled OOV word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentCollection {
    pub names: Vec<String>,
    pub vocabulary: Vec<String>,
    pub documents: Vec<Vec<u32>>,
}

impl DocumentCollection {
    pub fn total_tokens(&self) -> usize {
        self.documents.iter().map(Vec::len).sum()
    }

    /// Builds a collection from already tokenized documents, keeping words
    /// seen at least `vocab_min_count` times overall.
    pub fn from_words(names: Vec<String>, docs: Vec<Vec<String>>, vocab_min_count: u64) -> Result<Self> {
        let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
        for d in &docs {
            for w in d {
                *counts.entry(w.as_str()).or_default() += 1;
            }
        }
        let vocabulary: Vec<String> = counts
            .into_iter()
            .filter(|&(_, c)| c >= vocab_min_count)
            .map(|(w, _)| w.to_string())
            .collect();
        if vocabulary.is_empty() {
            return Err(Error::Invalid("topic vocabulary is empty".into()));
        }
        let index: HashMap<&str, u32> = vocabulary.iter().enumerate().map(|(i, w)| (w.as_str(), i as u32)).collect();
        let documents = docs
            .iter()
            .map(|d| d.iter().filter_map(|w| index.get(w.as_str()).copied()).collect())
            .collect();
        Ok(DocumentCollection {
            names,
            vocabulary,
            documents,
        })
    }
}

/// One document per profile: its lowercased co-occurring word tokens, the
/// OOV word itself excluded.
pub fn build_documents(profiles: &[OovProfile], vocab_min_count: u64) -> Result<DocumentCollection> {
    if profiles.is_empty() {
        return Err(Error::Invalid("no profiles to build documents from".into()));
    }
    let names = profiles.iter().map(|p| p.word.clone()).collect();
    let docs = profiles
        .iter()
        .map(|p| {
            p.cooccurring()
                .filter(|t| t.is_word())
                .map(|t| t.lower())
                .filter(|w| *w != p.word)
                .collect()
        })
        .collect();
    DocumentCollection::from_words(names, docs, vocab_min_count)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdaConfig {
    pub k: usize,
    /// Defaults to `50 / K`.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub lag: usize,
    pub seed: u64,
}

impl LdaConfig {
    pub fn new(k: usize) -> Self {
        LdaConfig {
            k,
            alpha: None,
            beta: 0.01,
            iterations: 1000,
            burn_in: 200,
            lag: 10,
            seed: 0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(50.0 / self.k as f64)
    }
}

/// Collapsed Gibbs chain state. Counts are kept word-major (`V × K`) while
/// sampling.
pub struct GibbsSampler<'a> {
    docs: &'a DocumentCollection,
    k: usize,
    alpha: f64,
    beta: f64,
    z: Vec<Vec<u32>>,
    n_dk: Vec<u32>,
    n_wk: Vec<u32>,
    n_k: Vec<u32>,
    rng: ChaCha8Rng,
    weights: Vec<f64>,
}

impl<'a> GibbsSampler<'a> {
    pub fn new(docs: &'a DocumentCollection, k: usize, alpha: f64, beta: f64, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Invalid("K must be at least 1".into()));
        }
        if !(alpha > 0.0 && beta > 0.0) {
            return Err(Error::Invalid(format!("priors must be positive (alpha={alpha}, beta={beta})")));
        }
        if k > docs.total_tokens() {
            log::warn!("K={k} exceeds the {} tokens in the collection", docs.total_tokens());
        }
        let v = docs.vocabulary.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut n_dk = vec![0u32; docs.documents.len() * k];
        let mut n_wk = vec![0u32; v * k];
        let mut n_k = vec![0u32; k];
        let z = docs
            .documents
            .iter()
            .enumerate()
            .map(|(d, doc)| {
                doc.iter()
                    .map(|&w| {
                        let t = rng.random_range(0..k);
                        n_dk[d * k + t] += 1;
                        n_wk[w as usize * k + t] += 1;
                        n_k[t] += 1;
                        t as u32
                    })
                    .collect()
            })
            .collect();
        Ok(GibbsSampler {
            docs,
            k,
            alpha,
            beta,
            z,
            n_dk,
            n_wk,
            n_k,
            rng,
            weights: vec![0.0; k],
        })
    }

    /// One full pass reassigning every token's topic.
    pub fn sweep(&mut self) {
        let k = self.k;
        let v_beta = self.docs.vocabulary.len() as f64 * self.beta;
        for (d, doc) in self.docs.documents.iter().enumerate() {
            for (i, &w) in doc.iter().enumerate() {
                let w = w as usize;
                let old = self.z[d][i] as usize;
                self.n_dk[d * k + old] -= 1;
                self.n_wk[w * k + old] -= 1;
                self.n_k[old] -= 1;

                let mut total = 0.0;
                for t in 0..k {
                    let p = (f64::from(self.n_dk[d * k + t]) + self.alpha) * (f64::from(self.n_wk[w * k + t]) + self.beta)
                        / (f64::from(self.n_k[t]) + v_beta);
                    total += p;
                    self.weights[t] = total;
                }
                let u = self.rng.random::<f64>() * total;
                let new = self.weights.iter().position(|&c| u < c).unwrap_or(k - 1);

                self.z[d][i] = new as u32;
                self.n_dk[d * k + new] += 1;
                self.n_wk[w * k + new] += 1;
                self.n_k[new] += 1;
            }
        }
    }

    /// Recounts from the assignments and compares with the running tables.
    pub fn counts_consistent(&self) -> bool {
        let k = self.k;
        let mut n_dk = vec![0u32; self.n_dk.len()];
        let mut n_wk = vec![0u32; self.n_wk.len()];
        let mut n_k = vec![0u32; k];
        for (d, doc) in self.docs.documents.iter().enumerate() {
            if self.z[d].len() != doc.len() {
                return false;
            }
            for (&w, &t) in doc.iter().zip(&self.z[d]) {
                n_dk[d * k + t as usize] += 1;
                n_wk[w as usize * k + t as usize] += 1;
                n_k[t as usize] += 1;
            }
        }
        let doc_sums_ok = self
            .docs
            .documents
            .iter()
            .enumerate()
            .all(|(d, doc)| self.n_dk[d * k..(d + 1) * k].iter().map(|&c| c as usize).sum::<usize>() == doc.len());
        let total_ok = self.n_k.iter().map(|&c| c as usize).sum::<usize>() == self.docs.total_tokens();
        doc_sums_ok && total_ok && n_dk == self.n_dk && n_wk == self.n_wk && n_k == self.n_k
    }

    fn theta_row(&self, d: usize, out: &mut [f64]) {
        let k = self.k;
        let len = self.docs.documents[d].len() as f64;
        for (o, &c) in out.iter_mut().zip(&self.n_dk[d * k..(d + 1) * k]) {
            *o = (f64::from(c) + self.alpha) / (len + k as f64 * self.alpha);
        }
    }

    /// `(n_kw + β) / (n_k + Vβ)` as a `K × V` row-major table.
    pub fn phi(&self) -> Vec<f64> {
        let v = self.docs.vocabulary.len();
        let v_beta = v as f64 * self.beta;
        let mut phi = vec![0.0; self.k * v];
        for t in 0..self.k {
            let denom = f64::from(self.n_k[t]) + v_beta;
            for w in 0..v {
                phi[t * v + w] = (f64::from(self.n_wk[w * self.k + t]) + self.beta) / denom;
            }
        }
        phi
    }

    /// Mean per-token log-likelihood under the current point estimates.
    pub fn log_likelihood(&self) -> f64 {
        let phi = self.phi();
        let v = self.docs.vocabulary.len();
        let mut theta = vec![0.0; self.k];
        let mut ll = 0.0;
        let mut n = 0usize;
        for (d, doc) in self.docs.documents.iter().enumerate() {
            self.theta_row(d, &mut theta);
            for &w in doc {
                let p: f64 = (0..self.k).map(|t| theta[t] * phi[t * v + w as usize]).sum();
                ll += p.ln();
                n += 1;
            }
        }
        if n == 0 {
            0.0
        } else {
            ll / n as f64
        }
    }

    pub fn assignments(&self) -> &[Vec<u32>] {
        &self.z
    }
}

/// Trained topic model. Distributions are averaged over the retained
/// post-burn-in samples.
#[derive(Debug, Clone, PartialEq)]
pub struct LdaModel {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub vocabulary: Vec<String>,
    pub doc_names: Vec<String>,
    /// `D × K`
    pub doc_topic_counts: Vec<u32>,
    /// `K × V`
    pub topic_word_counts: Vec<u32>,
    pub assignments: Vec<Vec<u32>>,
    pub samples: usize,
    /// `D × K`, averaged.
    pub theta: Vec<f64>,
    /// `K × V`, averaged.
    pub phi: Vec<f64>,
    /// Mean per-token log-likelihood recorded at every lag boundary.
    pub log_likelihood: Vec<f64>,
    vocab_index: HashMap<String, usize>,
    doc_index: HashMap<String, usize>,
}

pub fn gibbs_train(docs: &DocumentCollection, cfg: &LdaConfig) -> Result<LdaModel> {
    if cfg.iterations <= cfg.burn_in {
        return Err(Error::Invalid(format!(
            "iterations ({}) must exceed burn-in ({})",
            cfg.iterations, cfg.burn_in
        )));
    }
    let lag = cfg.lag.max(1);
    let mut chain = GibbsSampler::new(docs, cfg.k, cfg.alpha(), cfg.beta, cfg.seed)?;
    let (k, v, d) = (cfg.k, docs.vocabulary.len(), docs.documents.len());
    let mut theta = vec![0.0; d * k];
    let mut phi = vec![0.0; k * v];
    let mut samples = 0usize;
    let mut trace = Vec::new();
    let mut row = vec![0.0; k];

    let mut accumulate = |chain: &GibbsSampler, theta: &mut [f64], phi: &mut [f64]| {
        for di in 0..d {
            chain.theta_row(di, &mut row);
            for t in 0..k {
                theta[di * k + t] += row[t];
            }
        }
        for (acc, p) in phi.iter_mut().zip(chain.phi()) {
            *acc += p;
        }
    };

    for it in 1..=cfg.iterations {
        chain.sweep();
        if it % lag == 0 {
            trace.push(chain.log_likelihood());
        }
        if it > cfg.burn_in && (it - cfg.burn_in).is_multiple_of(lag) {
            accumulate(&chain, &mut theta, &mut phi);
            samples += 1;
        }
    }
    if samples == 0 {
        accumulate(&chain, &mut theta, &mut phi);
        samples = 1;
    }
    let s = samples as f64;
    theta.iter_mut().for_each(|x| *x /= s);
    phi.iter_mut().for_each(|x| *x /= s);

    let mut topic_word_counts = vec![0u32; k * v];
    for w in 0..v {
        for t in 0..k {
            topic_word_counts[t * v + w] = chain.n_wk[w * k + t];
        }
    }
    Ok(LdaModel::assemble(LdaParts {
        k,
        alpha: cfg.alpha(),
        beta: cfg.beta,
        vocabulary: docs.vocabulary.clone(),
        doc_names: docs.names.clone(),
        doc_topic_counts: chain.n_dk.clone(),
        topic_word_counts,
        assignments: chain.z.clone(),
        samples,
        theta,
        phi,
        log_likelihood: trace,
    }))
}

struct LdaParts {
    k: usize,
    alpha: f64,
    beta: f64,
    vocabulary: Vec<String>,
    doc_names: Vec<String>,
    doc_topic_counts: Vec<u32>,
    topic_word_counts: Vec<u32>,
    assignments: Vec<Vec<u32>>,
    samples: usize,
    theta: Vec<f64>,
    phi: Vec<f64>,
    log_likelihood: Vec<f64>,
}

const MODEL_MAGIC: &str = "oovcat-lda 1";

impl LdaModel {
    fn assemble(p: LdaParts) -> Self {
        let vocab_index = p.vocabulary.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let doc_index = p.doc_names.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        LdaModel {
            k: p.k,
            alpha: p.alpha,
            beta: p.beta,
            vocabulary: p.vocabulary,
            doc_names: p.doc_names,
            doc_topic_counts: p.doc_topic_counts,
            topic_word_counts: p.topic_word_counts,
            assignments: p.assignments,
            samples: p.samples,
            theta: p.theta,
            phi: p.phi,
            log_likelihood: p.log_likelihood,
            vocab_index,
            doc_index,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_docs(&self) -> usize {
        self.doc_names.len()
    }

    pub fn doc_index(&self, name: &str) -> Option<usize> {
        self.doc_index.get(name).copied()
    }

    /// `p(topic | doc)`, averaged over retained samples.
    pub fn doc_topic_distribution(&self, doc: usize) -> Result<Vec<f64>> {
        if doc >= self.num_docs() {
            return Err(Error::OutOfRange {
                index: doc,
                len: self.num_docs(),
            });
        }
        Ok(self.theta[doc * self.k..(doc + 1) * self.k].to_vec())
    }

    /// `p(word | topic)` row, averaged over retained samples.
    pub fn topic_word_distribution(&self, topic: usize) -> &[f64] {
        let v = self.vocabulary.len();
        &self.phi[topic * v..(topic + 1) * v]
    }

    /// Infers a topic mixture for an unseen document by Gibbs sampling with
    /// the topic-word distributions held fixed. Unknown words are ignored.
    pub fn fold_in(&self, words: &[String], iterations: usize, seed: u64) -> Vec<f64> {
        let k = self.k;
        let ids: Vec<usize> = words.iter().filter_map(|w| self.vocab_index.get(w).copied()).collect();
        let uniform = vec![1.0 / k as f64; k];
        if ids.is_empty() || iterations == 0 {
            return uniform;
        }
        let v = self.vocabulary.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut n_k = vec![0u32; k];
        let mut z: Vec<usize> = ids
            .iter()
            .map(|_| {
                let t = rng.random_range(0..k);
                n_k[t] += 1;
                t
            })
            .collect();
        let mut cumulative = vec![0.0; k];
        let mut acc = vec![0.0; k];
        let mut kept = 0usize;
        let len = ids.len() as f64;
        for it in 0..iterations {
            for (i, &w) in ids.iter().enumerate() {
                n_k[z[i]] -= 1;
                let mut total = 0.0;
                for t in 0..k {
                    total += (f64::from(n_k[t]) + self.alpha) * self.phi[t * v + w];
                    cumulative[t] = total;
                }
                let u = rng.random::<f64>() * total;
                z[i] = cumulative.iter().position(|&c| u < c).unwrap_or(k - 1);
                n_k[z[i]] += 1;
            }
            if it >= iterations / 2 {
                for t in 0..k {
                    acc[t] += (f64::from(n_k[t]) + self.alpha) / (len + k as f64 * self.alpha);
                }
                kept += 1;
            }
        }
        acc.iter().map(|a| a / kept as f64).collect()
    }

    pub fn to_text(&self) -> String {
        fn join<T: std::fmt::Display>(xs: &[T]) -> String {
            let mut s = String::new();
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    s.push(' ');
                }
                let _ = write!(s, "{x}");
            }
            s
        }
        let (k, v) = (self.k, self.vocabulary.len());
        let mut s = String::new();
        let _ = writeln!(s, "{MODEL_MAGIC}");
        let _ = writeln!(
            s,
            "K {k}\nalpha {}\nbeta {}\nV {v}\nD {}\nsamples {}",
            self.alpha,
            self.beta,
            self.num_docs(),
            self.samples
        );
        s.push_str("vocabulary\n");
        for w in &self.vocabulary {
            let _ = writeln!(s, "{w}");
        }
        s.push_str("documents\n");
        for name in &self.doc_names {
            let _ = writeln!(s, "{name}");
        }
        s.push_str("doc_topic_counts\n");
        for row in self.doc_topic_counts.chunks(k) {
            let _ = writeln!(s, "{}", join(row));
        }
        s.push_str("topic_word_counts\n");
        for row in self.topic_word_counts.chunks(v.max(1)) {
            let _ = writeln!(s, "{}", join(row));
        }
        s.push_str("theta\n");
        for row in self.theta.chunks(k) {
            let _ = writeln!(s, "{}", join(row));
        }
        s.push_str("phi\n");
        for row in self.phi.chunks(v.max(1)) {
            let _ = writeln!(s, "{}", join(row));
        }
        s.push_str("assignments\n");
        for row in &self.assignments {
            let _ = writeln!(s, "{}", join(row));
        }
        let _ = writeln!(s, "log_likelihood\n{}", join(&self.log_likelihood));
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().peekable();
        let mut next = |what: &str| -> Result<(usize, &str)> {
            lines
                .next()
                .ok_or_else(|| Error::parse("lda model", format!("unexpected end of file, expected {what}")))
        };
        let (_, magic) = next("header")?;
        if magic != MODEL_MAGIC {
            return Err(Error::parse("lda model line 1", "bad magic"));
        }
        fn field<T: std::str::FromStr>(line: (usize, &str), key: &str) -> Result<T> {
            let (n, l) = line;
            l.strip_prefix(key)
                .and_then(|r| r.strip_prefix(' '))
                .and_then(|r| r.parse().ok())
                .ok_or_else(|| Error::parse(format!("lda model line {}", n + 1), format!("expected `{key} <value>`")))
        }
        fn nums<T: std::str::FromStr>(line: (usize, &str), want: usize) -> Result<Vec<T>> {
            let (n, l) = line;
            let v: Vec<T> = l
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::parse(format!("lda model line {}", n + 1), "bad number"))?;
            if want != usize::MAX && v.len() != want {
                return Err(Error::parse(format!("lda model line {}", n + 1), format!("expected {want} values")));
            }
            Ok(v)
        }
        let k: usize = field(next("K")?, "K")?;
        let alpha: f64 = field(next("alpha")?, "alpha")?;
        let beta: f64 = field(next("beta")?, "beta")?;
        let v: usize = field(next("V")?, "V")?;
        let d: usize = field(next("D")?, "D")?;
        let samples: usize = field(next("samples")?, "samples")?;
        let mut section = |name: &str, rows: usize| -> Result<Vec<(usize, String)>> {
            let (n, l) = next(name)?;
            if l != name {
                return Err(Error::parse(
                    format!("lda model line {}", n + 1),
                    format!("expected section `{name}`"),
                ));
            }
            (0..rows).map(|_| next(name).map(|(n, l)| (n, l.to_string()))).collect()
        };
        let vocabulary: Vec<String> = section("vocabulary", v)?.into_iter().map(|(_, l)| l).collect();
        let doc_names: Vec<String> = section("documents", d)?.into_iter().map(|(_, l)| l).collect();
        let mut flat_u32 = |name: &str, rows: usize, cols: usize| -> Result<Vec<u32>> {
            let mut out = Vec::with_capacity(rows * cols);
            for (n, l) in section(name, rows)? {
                out.extend(nums::<u32>((n, &l), cols)?);
            }
            Ok(out)
        };
        let doc_topic_counts = flat_u32("doc_topic_counts", d, k)?;
        let topic_word_counts = flat_u32("topic_word_counts", k, v)?;
        let mut flat_f64 = |name: &str, rows: usize, cols: usize| -> Result<Vec<f64>> {
            let mut out = Vec::with_capacity(rows * cols);
            for (n, l) in section(name, rows)? {
                out.extend(nums::<f64>((n, &l), cols)?);
            }
            Ok(out)
        };
        let theta = flat_f64("theta", d, k)?;
        let phi = flat_f64("phi", k, v)?;
        let assignments = section("assignments", d)?
            .into_iter()
            .map(|(n, l)| nums::<u32>((n, &l), usize::MAX))
            .collect::<Result<Vec<_>>>()?;
        let ll_rows = section("log_likelihood", 1)?;
        let log_likelihood = nums::<f64>((ll_rows[0].0, &ll_rows[0].1), usize::MAX)?;
        Ok(LdaModel::assemble(LdaParts {
            k,
            alpha,
            beta,
            vocabulary,
            doc_names,
            doc_topic_counts,
            topic_word_counts,
            assignments,
            samples,
            theta,
            phi,
            log_likelihood,
        }))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}
