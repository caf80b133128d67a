//! End-to-end evaluation: fit TFN models on a training split, learn source
//! weights, classify the test split with each method, and sweep over
//! datasets, methods, and seeds.

use std::collections::hash_map::DefaultHasher;
use std::fmt::Write as _;
use std::hash::Hasher;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{deng_fuse, dst_fuse, knn_classify, murphy_fuse, BpaDistance, FusionMethod, NearestMean};
use crate::dataset::{split_indices, Dataset, SplitSpec};
use crate::error::{Error, Result};
use crate::fri::{self, LabeledBpaSet, ReliabilityReport};
use crate::frame::SubsetId;
use crate::ifs::{confidence_vector, ifv_from_mass, IntuitionisticFuzzyValue};
use crate::mass::{Decision, MassFunction, Pignistic};
use crate::scalar::Scalar;
use crate::tfn::{FeatureModel, TfnModel, TriangularFuzzyNumber};

/// One TFN per (feature, class) from the training samples.
pub fn fit_models<T: Scalar>(train: &Dataset<T>) -> Result<TfnModel<T>> {
    let features = train
        .feature_names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let classes = (0..train.frame.len())
                .map(|c| {
                    let values = train.feature_values(j, c);
                    if values.is_empty() {
                        return Err(Error::EmptyCell {
                            label: train.frame.label(c).to_owned(),
                            feature: name.clone(),
                        });
                    }
                    TriangularFuzzyNumber::fit(&values)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(FeatureModel {
                name: name.clone(),
                classes,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    TfnModel::new(train.frame.clone(), features)
}

/// How argmax ties are scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TiePolicy {
    /// The flagged prediction (first tied label in frame order) is scored
    /// like any other.
    #[default]
    CountFlagged,
    /// A tie counts as a wrong answer.
    Incorrect,
}

impl std::str::FromStr for TiePolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "count-flagged" | "flagged" => Ok(TiePolicy::CountFlagged),
            "incorrect" => Ok(TiePolicy::Incorrect),
            _ => Err(format!("unknown tie policy `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub tie_policy: TiePolicy,
    pub knn_k: usize,
    pub deng_distance: BpaDistance,
    /// Keep per-object contributions in the FRI reliability report.
    pub keep_contributions: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            tie_policy: TiePolicy::CountFlagged,
            knn_k: 5,
            deng_distance: BpaDistance::Jousselme,
            keep_contributions: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub dataset: String,
    pub method: FusionMethod,
    pub seed: u64,
    pub accuracy: f64,
    pub correct: usize,
    pub total: usize,
    pub classes: Vec<String>,
    /// `confusion[truth][predicted]`; the extra last column counts samples
    /// with no usable decision (total conflict, or a tie under
    /// [`TiePolicy::Incorrect`]).
    pub confusion: Vec<Vec<usize>>,
    pub ties: usize,
    pub total_conflicts: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reliability: Option<ReliabilityReport<f64>>,
    /// Hash of every test-sample BPA fed to the evidential methods.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bpa_digest: Option<u64>,
}

/// Fused mass function produced by one of the evidential methods.
fn fuse_evidence<T: Scalar>(
    method: FusionMethod,
    bpas: &[MassFunction<T>],
    weights: Option<&[T]>,
    opts: &EvalOptions,
) -> Result<MassFunction<T>> {
    match method {
        FusionMethod::Fri => {
            let w = weights.expect("FRI needs trained weights");
            Ok(fri::classify_weighted(w, bpas)?.fused)
        }
        FusionMethod::Dst => dst_fuse(bpas),
        FusionMethod::Murphy => murphy_fuse(bpas),
        FusionMethod::Deng => Ok(deng_fuse(bpas, opts.deng_distance)?.fused),
        FusionMethod::Nmc | FusionMethod::Knn => unreachable!("not an evidential method"),
    }
}

fn digest_bpas<T: Scalar>(hasher: &mut DefaultHasher, bpas: &[MassFunction<T>]) {
    for m in bpas {
        hasher.write_usize(m.focal().len());
        for (s, v) in m.focal() {
            hasher.write_u32(s.bits());
            hasher.write_u64(v.to_f64_lossy().to_bits());
        }
    }
}

/// Per-source labelled BPAs for every training sample.
pub fn training_bpas<T: Scalar>(model: &TfnModel<T>, train: &Dataset<T>) -> Result<Vec<LabeledBpaSet<T>>> {
    train
        .samples
        .iter()
        .enumerate()
        .map(|(n, s)| {
            Ok(LabeledBpaSet {
                object_id: n,
                bpas: model.generate_all(&s.features)?,
                truth: SubsetId::singleton(s.class),
            })
        })
        .collect()
}

/// Trains and scores one method on a given train/test partition.
pub fn evaluate_split<T: Scalar>(
    train: &Dataset<T>,
    test: &Dataset<T>,
    method: FusionMethod,
    seed: u64,
    opts: &EvalOptions,
) -> Result<EvalResult> {
    let k = train.frame.len();
    let mut confusion = vec![vec![0usize; k + 1]; k];
    let mut ties = 0;
    let mut total_conflicts = 0;
    let mut reliability = None;
    let mut digest = None;

    let mut record = |truth: usize, decision: Option<Decision>| match decision {
        None => {
            total_conflicts += 1;
            confusion[truth][k] += 1;
        }
        Some(d) => {
            if d.tie {
                ties += 1;
            }
            if d.tie && opts.tie_policy == TiePolicy::Incorrect {
                confusion[truth][k] += 1;
            } else {
                confusion[truth][d.class] += 1;
            }
        }
    };

    if method.is_evidential() {
        let model = fit_models(train)?;
        let weights = if method == FusionMethod::Fri {
            let names = train.feature_names.clone();
            let report = fri::train(&names, &training_bpas(&model, train)?, opts.keep_contributions)?;
            let w = report.weights();
            reliability = Some(cast_report(&report));
            Some(w)
        } else {
            None
        };
        let mut hasher = DefaultHasher::new();
        for s in &test.samples {
            let bpas = model.generate_all(&s.features)?;
            digest_bpas(&mut hasher, &bpas);
            match fuse_evidence(method, &bpas, weights.as_deref(), opts) {
                Ok(fused) => record(s.class, Some(fused.pignistic().decide())),
                Err(Error::TotalConflict { .. }) => record(s.class, None),
                Err(e) => return Err(e),
            }
        }
        digest = Some(hasher.finish());
    } else {
        let nmc = if method == FusionMethod::Nmc {
            Some(NearestMean::fit(train)?)
        } else {
            None
        };
        for s in &test.samples {
            let decision = match &nmc {
                Some(model) => model.predict(&s.features),
                None => knn_classify(train, &s.features, opts.knn_k)?,
            };
            record(s.class, Some(decision));
        }
    }

    let correct = (0..k).map(|c| confusion[c][c]).sum();
    let total = test.len();
    Ok(EvalResult {
        dataset: train.name.clone(),
        method,
        seed,
        accuracy: if total == 0 { 0.0 } else { correct as f64 / total as f64 },
        correct,
        total,
        classes: train.frame.labels().to_vec(),
        confusion,
        ties,
        total_conflicts,
        reliability,
        bpa_digest: digest,
    })
}

fn cast_report<T: Scalar>(r: &ReliabilityReport<T>) -> ReliabilityReport<f64> {
    let to64 = |v: &T| v.to_f64_lossy();
    ReliabilityReport {
        sources: r
            .sources
            .iter()
            .map(|s| fri::SourceReliability {
                name: s.name.clone(),
                reliability: to64(&s.reliability),
                weight: to64(&s.weight),
            })
            .collect(),
        contributions: r
            .contributions
            .as_ref()
            .map(|c| c.iter().map(|row| row.iter().map(to64).collect()).collect()),
    }
}

/// Splits `d` per `spec` and scores `method` on the held-out part.
pub fn evaluate<T: Scalar>(
    d: &Dataset<T>,
    spec: &SplitSpec,
    method: FusionMethod,
    opts: &EvalOptions,
) -> Result<EvalResult> {
    let (train_idx, test_idx) = split_indices(d, spec)?;
    evaluate_split(&d.select(&train_idx), &d.select(&test_idx), method, spec.seed, opts)
}

/// Trains FRI weights on the training part of a split.
pub fn train_reliability<T: Scalar>(
    train: &Dataset<T>,
    keep_contributions: bool,
) -> Result<(TfnModel<T>, ReliabilityReport<T>)> {
    let model = fit_models(train)?;
    let report = fri::train(&train.feature_names, &training_bpas(&model, train)?, keep_contributions)?;
    Ok((model, report))
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepCell {
    pub dataset: String,
    pub method: FusionMethod,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<EvalResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub dataset: String,
    pub method: FusionMethod,
    pub runs: usize,
    pub failures: usize,
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub cells: Vec<SweepCell>,
    pub summary: Vec<CellSummary>,
}

impl SweepReport {
    pub fn results(&self) -> impl Iterator<Item = &EvalResult> {
        self.cells.iter().filter_map(|c| c.result.as_ref())
    }

    pub fn summary_for(&self, dataset: &str, method: FusionMethod) -> Option<&CellSummary> {
        self.summary
            .iter()
            .find(|s| s.dataset == dataset && s.method == method)
    }
}

/// Accuracy of every (dataset, method, seed) cell.
///
/// Cells run in parallel and are returned sorted by dataset position, method,
/// then seed. A failing cell is recorded with its error and the sweep goes on.
pub fn sweep<T: Scalar>(
    datasets: &[Dataset<T>],
    methods: &[FusionMethod],
    seeds: &[u64],
    template: &SplitSpec,
    opts: &EvalOptions,
) -> Result<SweepReport> {
    if datasets.is_empty() {
        return Err(Error::EmptySweep("datasets"));
    }
    if methods.is_empty() {
        return Err(Error::EmptySweep("methods"));
    }
    if seeds.is_empty() {
        return Err(Error::EmptySweep("seeds"));
    }
    let keys: Vec<(usize, FusionMethod, u64)> = (0..datasets.len())
        .flat_map(|d| methods.iter().flat_map(move |m| seeds.iter().map(move |s| (d, *m, *s))))
        .collect();
    let mut cells: Vec<((usize, FusionMethod, u64), SweepCell)> = keys
        .par_iter()
        .map(|&(d, method, seed)| {
            let spec = SplitSpec { seed, ..*template };
            let outcome = evaluate(&datasets[d], &spec, method, opts);
            let cell = SweepCell {
                dataset: datasets[d].name.clone(),
                method,
                seed,
                error: outcome.as_ref().err().map(ToString::to_string),
                result: outcome.ok(),
            };
            ((d, method, seed), cell)
        })
        .collect();
    cells.sort_by_key(|(key, _)| *key);

    let mut summary = Vec::new();
    for (d, ds) in datasets.iter().enumerate() {
        for &method in methods {
            let group: Vec<&SweepCell> = cells
                .iter()
                .filter(|((di, m, _), _)| *di == d && *m == method)
                .map(|(_, c)| c)
                .collect();
            let accs: Vec<f64> = group
                .iter()
                .filter_map(|c| c.result.as_ref().map(|r| r.accuracy))
                .collect();
            summary.push(CellSummary {
                dataset: ds.name.clone(),
                method,
                runs: accs.len(),
                failures: group.len() - accs.len(),
                mean: mean(&accs),
                median: median(&accs),
                min: accs.iter().copied().fold(f64::NAN, f64::min),
                max: accs.iter().copied().fold(f64::NAN, f64::max),
            });
        }
    }
    Ok(SweepReport {
        cells: cells.into_iter().map(|(_, c)| c).collect(),
        summary,
    })
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len().is_multiple_of(2) {
        (v[mid - 1] + v[mid]) / 2.0
    } else {
        v[mid]
    }
}

/// `dataset,method,seed,accuracy` with accuracy as a percentage, 2 decimals.
pub fn results_csv<'a>(results: impl IntoIterator<Item = &'a EvalResult>) -> String {
    let mut out = String::from("dataset,method,seed,accuracy\n");
    for r in results {
        let _ = writeln!(out, "{},{},{},{:.2}", r.dataset, r.method, r.seed, r.accuracy * 100.0);
    }
    out
}

/// `dataset,method,runs,failures,mean,median,min,max`, percentages.
pub fn summary_csv(summary: &[CellSummary]) -> String {
    let mut out = String::from("dataset,method,runs,failures,mean,median,min,max\n");
    for s in summary {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.2},{:.2},{:.2},{:.2}",
            s.dataset,
            s.method,
            s.runs,
            s.failures,
            s.mean * 100.0,
            s.median * 100.0,
            s.min * 100.0,
            s.max * 100.0
        );
    }
    out
}

/// Fused mass and pignistic probabilities, or the error text.
pub type FusionOutcome<T> = std::result::Result<(MassFunction<T>, Pignistic<T>), String>;

/// Per-sample breakdown: source BPAs, confidence, weights, discounting, fusion.
#[derive(Debug, Clone)]
pub struct Explanation<T> {
    pub row: usize,
    pub features: Vec<T>,
    pub truth: String,
    pub source_names: Vec<String>,
    pub bpas: Vec<MassFunction<T>>,
    /// `confidence[j][k]`: dc of source j for class k.
    pub confidence: Vec<Vec<T>>,
    pub ifvs: Vec<Vec<IntuitionisticFuzzyValue<T>>>,
    pub report: ReliabilityReport<T>,
    pub discounted: Vec<MassFunction<T>>,
    pub outcomes: Vec<(FusionMethod, FusionOutcome<T>)>,
}

/// Trains on the split's training part and explains dataset row `row`.
pub fn explain<T: Scalar>(
    d: &Dataset<T>,
    spec: &SplitSpec,
    row: usize,
    opts: &EvalOptions,
) -> Result<Explanation<T>> {
    let sample = d.samples.get(row).ok_or_else(|| {
        Error::Schema(format!("row {row} out of range ({} samples)", d.len()))
    })?;
    let (train_idx, _) = split_indices(d, spec)?;
    let train = d.select(&train_idx);
    let (model, report) = train_reliability(&train, false)?;
    explain_with(&model, &report, row, sample.features.clone(), d.frame.label(sample.class), opts)
}

/// Explains a feature vector against an existing model and weights.
pub fn explain_with<T: Scalar>(
    model: &TfnModel<T>,
    report: &ReliabilityReport<T>,
    row: usize,
    features: Vec<T>,
    truth: &str,
    opts: &EvalOptions,
) -> Result<Explanation<T>> {
    let bpas = model.generate_all(&features)?;
    explain_bpas(report, row, features, truth, bpas, opts)
}

pub fn explain_bpas<T: Scalar>(
    report: &ReliabilityReport<T>,
    row: usize,
    features: Vec<T>,
    truth: &str,
    bpas: Vec<MassFunction<T>>,
    opts: &EvalOptions,
) -> Result<Explanation<T>> {
    let weights = report.weights();
    let confidence = bpas.iter().map(confidence_vector).collect();
    let ifvs = bpas
        .iter()
        .map(|m| m.frame().singletons().map(|s| ifv_from_mass(m, s)).collect())
        .collect();
    let discounted = bpas
        .iter()
        .zip(&weights)
        .map(|(m, w)| m.discount(*w))
        .collect::<Result<Vec<_>>>()?;
    let outcomes = [FusionMethod::Dst, FusionMethod::Murphy, FusionMethod::Deng, FusionMethod::Fri]
        .into_iter()
        .map(|method| {
            let fused = fuse_evidence(method, &bpas, Some(&weights), opts)
                .map(|m| {
                    let p = m.pignistic();
                    (m, p)
                })
                .map_err(|e| e.to_string());
            (method, fused)
        })
        .collect();
    Ok(Explanation {
        row,
        features,
        truth: truth.to_owned(),
        source_names: report.sources.iter().map(|s| s.name.clone()).collect(),
        bpas,
        confidence,
        ifvs,
        report: report.clone(),
        discounted,
        outcomes,
    })
}

impl<T: Scalar> Explanation<T> {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let frame = self.bpas[0].frame();
        let feats: Vec<String> = self.features.iter().map(|v| format!("{v}")).collect();
        let _ = writeln!(out, "row {}: [{}], true class {}", self.row, feats.join(", "), self.truth);
        let _ = writeln!(out, "\nsource BPAs");
        for (name, m) in self.source_names.iter().zip(&self.bpas) {
            let _ = writeln!(out, "  {name:<16} {m}");
        }
        let _ = writeln!(out, "\nbelief intervals, IFVs and decision confidence");
        for ((name, m), (ifv, dc)) in self
            .source_names
            .iter()
            .zip(&self.bpas)
            .zip(self.ifvs.iter().zip(&self.confidence))
        {
            let cells: Vec<String> = frame
                .labels()
                .iter()
                .zip(ifv.iter().zip(dc))
                .map(|(l, (v, c))| format!("{l} {} {} dc={:.4}", v.interval(), v, c))
                .collect();
            let _ = writeln!(out, "  {name:<16} {}", cells.join(" | "));
            let _ = m;
        }
        let _ = writeln!(out, "\nweights");
        for s in &self.report.sources {
            let _ = writeln!(out, "  {:<16} R={:.4} W={:.4}", s.name, s.reliability, s.weight);
        }
        let _ = writeln!(out, "\ndiscounted BPAs");
        for (name, m) in self.source_names.iter().zip(&self.discounted) {
            let _ = writeln!(out, "  {name:<16} {m}");
        }
        let _ = writeln!(out, "\nfusion and pignistic probabilities");
        for (method, outcome) in &self.outcomes {
            match outcome {
                Ok((fused, p)) => {
                    let probs: Vec<String> = frame
                        .labels()
                        .iter()
                        .zip(p.probs())
                        .map(|(l, v)| format!("{l}: {v:.4}"))
                        .collect();
                    let d = p.decide();
                    let _ = writeln!(
                        out,
                        "  {:<7} BetP {}  -> {}{}",
                        method.as_str(),
                        probs.join(", "),
                        frame.label(d.class),
                        if d.tie { " (tie)" } else { "" }
                    );
                    let _ = writeln!(out, "          m* {fused}");
                }
                Err(e) => {
                    let _ = writeln!(out, "  {:<7} {e}", method.as_str());
                }
            }
        }
        out
    }
}
