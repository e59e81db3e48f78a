//! Audits of a model family against the pseudo-Riemannian axioms, the
//! universal bounds and ratio lemmas, the Wick-rotation pipeline and, when
//! β is present, the Lorentz-type identities.
//!
//! Every level is audited independently; verdicts come from comparing the
//! per-level measurements across levels.

use serde::{Deserialize, Serialize};

use crate::analysis::{
    analytic_report, boundedness, compactness_from_rows, delta_norms, estimate_from_table,
    finite_rank_report, line_integral, line_zeta_analytic, mellin_cross_check, order_evidence_from_rows,
    ratio_norms_many, resolvent_comparison, singular_row, BoundednessEvidence, CompactnessEvidence,
    CompactnessSpec, GrowthSpec, MellinCheck, MellinSpec, OrderEvidence, OrderRow, OrderVerdict, SingularRow,
    SpectralEngine, StabilizationSpec, ZetaReport, RATIO_NAMES,
};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{self, CMat};
use crate::models::{hermite_sample, Family, ModelDescriptor, ModelTriple};
use crate::operator::{universal_bounds_at, SobolevScale, UniversalBounds};

pub const REPORT_VERSION: &str = "1.0.0";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// algebraic identities
    pub identity: f64,
    /// slack on the universal bounds √2 and 2
    pub bound: f64,
    pub growth: GrowthSpec,
    pub compactness: CompactnessSpec,
    pub stabilization: StabilizationSpec,
    pub mellin: MellinSpec,
    /// `s` values of the ratio lemma
    pub ratio_s: Vec<f64>,
    /// `s` values of the Mellin cross-check
    pub mellin_s: Vec<f64>,
    /// δ depth of the order evidence
    pub k_max: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: 1e-12,
            bound: 1e-10,
            growth: GrowthSpec::default(),
            compactness: CompactnessSpec::default(),
            stabilization: StabilizationSpec::default(),
            mellin: MellinSpec::default(),
            ratio_s: vec![0.5, 1.0, 2.0],
            mellin_s: vec![3.0, 4.0],
            k_max: 2,
        }
    }
}

impl Tolerances {
    /// Override one tolerance by key, as given on the command line.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidArgument(format!("tolerance {key} must be finite and >= 0")));
        }
        match key {
            "identity" => self.identity = value,
            "bound" => self.bound = value,
            "growth" => self.growth.tol_growth = value,
            "zero_floor" => self.growth.zero_floor = value,
            "decay" => self.compactness.decay = value,
            "drift" => self.compactness.drift = value,
            "stabilization" => self.stabilization.epsilon = value,
            "mellin" => self.mellin.tolerance = value,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown tolerance key {key:?}; known: identity, bound, growth, zero_floor, decay, drift, stabilization, mellin"
                )))
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
    /// not decidable at finite truncation
    EvidenceOnly,
    /// measured and reported, no verdict drawn
    Reported,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    fn from_order(v: OrderVerdict) -> Self {
        match v {
            OrderVerdict::Supported => Verdict::Pass,
            OrderVerdict::Refuted => Verdict::Fail,
            OrderVerdict::Inconclusive => Verdict::Inconclusive,
        }
    }

    fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
            Verdict::EvidenceOnly => "evidence-only",
            Verdict::Reported => "reported",
        }
    }

    /// Whether this verdict blocks an all-pass exit.
    pub fn is_failure(self) -> bool {
        matches!(self, Verdict::Fail | Verdict::Inconclusive)
    }
}

/// Everything measured at one level.
#[derive(Debug, Clone)]
pub struct LevelAudit {
    pub family: Family,
    pub level: usize,
    pub dim: usize,
    pub hermiticity_residual: f64,
    pub decomposition_residuals: (f64, f64),
    pub bounds: UniversalBounds,
    pub curvature_order: Vec<f64>,
    pub curvature_commutator_order: Vec<f64>,
    pub samples: Vec<SampleAudit>,
    pub curvature_contraction: f64,
    pub resolvent_comparison: f64,
    /// `[s][ratio]`
    pub ratios: Vec<[f64; 4]>,
    pub inverse_order: Vec<f64>,
    /// zeta traces of the first sample on `s_grid`, both routes
    pub zeta_laplacian: Vec<f64>,
    pub zeta_wick: Vec<f64>,
    pub mellin: Vec<MellinCheck>,
}

#[derive(Debug, Clone)]
pub struct SampleAudit {
    pub label: String,
    pub commutator_d: f64,
    pub commutator_d_star: f64,
    pub commutator_wick: f64,
    pub curvature_candidate: SingularRow,
    pub resolvent_candidate: SingularRow,
    pub wick_candidate: SingularRow,
}

fn bulk(t: &CMat, margin: usize) -> CMat {
    let keep = t.nrows().saturating_sub(margin).max(1);
    linalg::leading_block(t, keep)
}

/// Measure one level. `s_grid` feeds the zeta tables.
pub fn audit_level(model: &ModelTriple, s_grid: &[f64], tol: &Tolerances) -> Result<LevelAudit> {
    let margin = model.family.bulk_margin();
    let der = &model.derived;
    let ms = der.mean_square.matrix();
    let r = der.curvature_defect.matrix();
    let d = model.d.matrix();
    let d_star = d.adjoint().to_owned();
    let de = der.wick_plus.matrix();
    let x = SobolevScale::from_laplacian(ms)?;
    let y = SobolevScale::from_dirac(de)?;
    let x_inv = x.power(-1.0);
    let x_inv_root = x.power(-0.5);
    let y_inv_root = y.power(-0.5);
    let leading = tol.compactness.leading;

    let mut samples = Vec::with_capacity(model.algebra_samples.len());
    for s in &model.algebra_samples {
        let a = s.op.matrix();
        samples.push(SampleAudit {
            label: s.label.clone(),
            commutator_d: linalg::op_norm(&bulk(&linalg::commutator(d, a), margin)),
            commutator_d_star: linalg::op_norm(&bulk(&linalg::commutator(&d_star, a), margin)),
            commutator_wick: linalg::op_norm(&bulk(&linalg::commutator(de, a), margin)),
            curvature_candidate: singular_row(model.level(), &(a * r * &x_inv), leading),
            resolvent_candidate: singular_row(model.level(), &(a * &x_inv_root), leading),
            wick_candidate: singular_row(model.level(), &(a * &y_inv_root), leading),
        });
    }

    let first = model
        .algebra_samples
        .first()
        .ok_or(Error::MissingStructure("algebra samples"))?;
    let a0 = first.op.matrix();
    let t = linalg::identity(model.dim()) + a0.adjoint() * a0;
    let t_inv = linalg::HermitianEigen::new(&t)?.apply_real(|v| 1.0 / v)?;

    let lap = SpectralEngine::from_scale(&x, &[a0]);
    let wick = SpectralEngine::from_scale(&y, &[a0]);
    let root = x.power(0.5);
    let bounds = universal_bounds_at(d, r, &x_inv_root);
    let ratios = ratio_norms_many(&x, &y, &tol.ratio_s);
    let resolvent = match tol.ratio_s.iter().position(|&s| s == 1.0) {
        Some(i) => ratios[i][3],
        None => resolvent_comparison(&x, &y),
    };
    Ok(LevelAudit {
        family: model.family,
        level: model.level(),
        dim: model.dim(),
        hermiticity_residual: der.hermiticity_residual(),
        decomposition_residuals: der.decomposition_residuals(),
        curvature_order: delta_norms(&root, &x_inv * r, tol.k_max, margin),
        curvature_commutator_order: delta_norms(&root, &x_inv * linalg::commutator(ms, r), tol.k_max, margin),
        samples,
        // the same operator as the curvature bound
        curvature_contraction: bounds.curvature_ratio,
        bounds,
        resolvent_comparison: resolvent,
        ratios,
        inverse_order: delta_norms(&root, t_inv, tol.k_max, margin),
        zeta_laplacian: s_grid.iter().map(|&s| lap.zeta(0, s)).collect(),
        zeta_wick: s_grid.iter().map(|&s| wick.zeta(0, s)).collect(),
        mellin: tol
            .mellin_s
            .iter()
            .map(|&s| mellin_cross_check(&lap, 0, s, &tol.mellin))
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelStatus {
    #[serde(rename = "N")]
    pub level: usize,
    pub dim: Option<usize>,
    pub error: Option<String>,
    pub hermiticity_residual: Option<f64>,
    pub decomposition_residuals: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition2a {
    pub verdict: Verdict,
    pub curvature: OrderEvidence,
    pub curvature_commutator: OrderEvidence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleCompactness {
    pub sample: String,
    pub evidence: CompactnessEvidence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactnessCondition {
    pub verdict: Verdict,
    pub candidate: String,
    pub samples: Vec<SampleCompactness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition3 {
    pub verdict: Verdict,
    pub commutators: Vec<BoundednessEvidence>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axioms {
    #[serde(rename = "1")]
    pub one: Verdict,
    #[serde(rename = "1_note")]
    pub one_note: String,
    #[serde(rename = "2a")]
    pub two_a: Condition2a,
    #[serde(rename = "2b")]
    pub two_b: CompactnessCondition,
    #[serde(rename = "3")]
    pub three: Condition3,
    #[serde(rename = "4")]
    pub four: CompactnessCondition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundLevel {
    #[serde(rename = "N")]
    pub level: usize,
    pub dirac_ratio: f64,
    pub curvature_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundLemma {
    pub verdict: Verdict,
    pub dirac_limit: f64,
    pub curvature_limit: f64,
    pub levels: Vec<BoundLevel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioLemma {
    pub verdict: Verdict,
    /// the hypothesis is unproven for this family; measured only
    pub report_only: bool,
    /// `‖(1+⟨D⟩²)^{−1/2} R_D (1+⟨D⟩²)^{−1/2}‖` per level; < 1 suffices
    pub curvature_contraction: Vec<f64>,
    pub contraction_below_one: bool,
    pub resolvent_comparison: BoundednessEvidence,
    /// one entry per `(s, ratio)`
    pub ratios: Vec<RatioEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioEntry {
    pub s: f64,
    pub evidence: BoundednessEvidence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseStability {
    pub verdict: Verdict,
    pub witness: String,
    pub evidence: OrderEvidence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MellinLemma {
    pub verdict: Verdict,
    #[serde(rename = "N")]
    pub level: usize,
    pub checks: Vec<MellinCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualCheck {
    pub verdict: Verdict,
    pub hermiticity: f64,
    pub decomposition: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemmas {
    pub bound2: BoundLemma,
    pub ratio: RatioLemma,
    pub inverse: InverseStability,
    pub mellin: MellinLemma,
    pub residuals: ResidualCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pipeline {
    pub verdict: Verdict,
    pub commutators: Vec<BoundednessEvidence>,
    pub compactness: CompactnessCondition,
    pub sample: String,
    pub laplacian_route: ZetaReport,
    pub wick_route: ZetaReport,
    pub grid_step: f64,
    pub same_dimension: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelDescriptor>,
    pub family: Family,
    pub levels: Vec<LevelStatus>,
    pub axioms: Axioms,
    pub lemmas: Lemmas,
    pub pipeline: Pipeline,
    pub tolerances: Tolerances,
}

fn worst_compactness(c: &CompactnessCondition) -> String {
    c.samples
        .iter()
        .filter(|s| !s.evidence.pass)
        .map(|s| {
            format!(
                "{}: sigma_quarter/sigma_1 = {:.3e}, leading drift = {}",
                s.sample,
                s.evidence.decay_ratio,
                s.evidence.leading_drift.map_or("n/a".into(), |d| format!("{d:.3e}"))
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn unbounded(list: &[BoundednessEvidence]) -> String {
    list.iter()
        .filter(|b| !b.bounded)
        .map(|b| format!("{}: growth {:?}", b.name, b.growth))
        .collect::<Vec<_>>()
        .join("; ")
}

impl AxiomReport {
    /// One line per failing check, naming the measured value.
    pub fn failure_details(&self) -> Vec<String> {
        let mut out = Vec::new();
        for l in &self.levels {
            if let Some(e) = &l.error {
                out.push(format!("level {}: {e}", l.level));
            }
        }
        let a = &self.axioms;
        let l = &self.lemmas;
        for (name, v) in self.verdicts() {
            if !v.is_failure() {
                continue;
            }
            let detail = match name {
                "axiom 2a" => format!(
                    "max growth R_D {:.4}, [<D>^2,R_D] {:.4} (limit {})",
                    a.two_a.curvature.max_growth,
                    a.two_a.curvature_commutator.max_growth,
                    1.0 + self.tolerances.growth.tol_growth
                ),
                "axiom 2b" => worst_compactness(&a.two_b),
                "axiom 3" => unbounded(&a.three.commutators),
                "axiom 4" => worst_compactness(&a.four),
                "universal bounds" => {
                    let d = l.bound2.levels.iter().map(|b| b.dirac_ratio).fold(0.0, f64::max);
                    let c = l.bound2.levels.iter().map(|b| b.curvature_ratio).fold(0.0, f64::max);
                    format!("max dirac ratio {d:.12}, max curvature ratio {c:.12}")
                }
                "ratio lemma" => {
                    let mut parts = vec![unbounded(std::slice::from_ref(&l.ratio.resolvent_comparison))];
                    parts.extend(
                        l.ratio
                            .ratios
                            .iter()
                            .filter(|r| !r.evidence.bounded)
                            .map(|r| format!("s = {}: {}", r.s, unbounded(std::slice::from_ref(&r.evidence)))),
                    );
                    parts.retain(|p| !p.is_empty());
                    parts.join("; ")
                }
                "inverse stability" => format!(
                    "{}: max growth {:.4}",
                    l.inverse.witness, l.inverse.evidence.max_growth
                ),
                "mellin cross-check" => l
                    .mellin
                    .checks
                    .iter()
                    .filter(|c| !c.agrees)
                    .map(|c| format!("s = {}: discrepancy {:.3e}", c.s, c.discrepancy))
                    .collect::<Vec<_>>()
                    .join("; "),
                "derived residuals" => format!(
                    "hermiticity {:.3e}, decomposition {:.3e}",
                    l.residuals.hermiticity, l.residuals.decomposition
                ),
                "wick pipeline" => {
                    let p = &self.pipeline;
                    let mut parts = Vec::new();
                    let c = unbounded(&p.commutators);
                    if !c.is_empty() {
                        parts.push(c);
                    }
                    if p.compactness.verdict != Verdict::Pass {
                        parts.push(worst_compactness(&p.compactness));
                    }
                    if !p.same_dimension {
                        parts.push(format!(
                            "p_hat laplacian {:?} vs wick {:?}",
                            p.laplacian_route.p_hat, p.wick_route.p_hat
                        ));
                    }
                    parts.join("; ")
                }
                _ => String::new(),
            };
            out.push(format!("{name} {}: {detail}", v.as_str()));
        }
        out
    }

    /// Verdicts that count toward the exit status, by name.
    pub fn verdicts(&self) -> Vec<(&'static str, Verdict)> {
        vec![
            ("axiom 2a", self.axioms.two_a.verdict),
            ("axiom 2b", self.axioms.two_b.verdict),
            ("axiom 3", self.axioms.three.verdict),
            ("axiom 4", self.axioms.four.verdict),
            ("universal bounds", self.lemmas.bound2.verdict),
            ("ratio lemma", self.lemmas.ratio.verdict),
            ("inverse stability", self.lemmas.inverse.verdict),
            ("mellin cross-check", self.lemmas.mellin.verdict),
            ("derived residuals", self.lemmas.residuals.verdict),
            ("wick pipeline", self.pipeline.verdict),
        ]
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.verdicts()
            .into_iter()
            .filter(|(_, v)| v.is_failure())
            .map(|(n, _)| n)
            .collect()
    }

    pub fn all_pass(&self) -> bool {
        self.failures().is_empty() && self.levels.iter().all(|l| l.error.is_none())
    }
}

fn compactness_condition(
    audits: &[LevelAudit],
    candidate: &str,
    pick: impl Fn(&SampleAudit) -> &SingularRow,
    finite_rank: bool,
    spec: &CompactnessSpec,
) -> CompactnessCondition {
    let labels: Vec<String> = audits[0].samples.iter().map(|s| s.label.clone()).collect();
    let samples: Vec<SampleCompactness> = labels
        .iter()
        .enumerate()
        .map(|(i, label)| {
            let rows = audits.iter().map(|a| pick(&a.samples[i]).clone()).collect();
            SampleCompactness {
                sample: label.clone(),
                evidence: compactness_from_rows(rows, finite_rank, spec),
            }
        })
        .collect();
    CompactnessCondition {
        verdict: Verdict::from_bool(samples.iter().all(|s| s.evidence.pass)),
        candidate: candidate.to_string(),
        samples,
    }
}

fn commutator_evidence(
    audits: &[LevelAudit],
    levels: &[usize],
    spec: &GrowthSpec,
    pick: &[(&str, fn(&SampleAudit) -> f64)],
) -> Vec<BoundednessEvidence> {
    let mut out = Vec::new();
    for (i, s) in audits[0].samples.iter().enumerate() {
        for (name, f) in pick {
            let norms = audits.iter().map(|a| f(&a.samples[i])).collect();
            out.push(boundedness(&format!("{name} {}", s.label), levels, norms, spec));
        }
    }
    out
}

fn order_from(audits: &[LevelAudit], order: f64, k_max: usize, pick: fn(&LevelAudit) -> &Vec<f64>, spec: &GrowthSpec) -> OrderEvidence {
    let rows = audits
        .iter()
        .map(|a| OrderRow {
            level: a.level,
            norms: pick(a).clone(),
        })
        .collect();
    let mut e = order_evidence_from_rows(order, k_max, rows, spec);
    if audits.len() == 1 {
        // a fixed finite dimension: every operator is of every order
        e.verdict = OrderVerdict::Supported;
    }
    e
}

/// Which route computes the D_E-side zeta table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WickRoute {
    Truncated,
    /// closed-form line kernel with the given `∫g`
    LineKernel,
}

fn zeta_report(levels: &[usize], s_grid: &[f64], table: Vec<Vec<f64>>, spec: &StabilizationSpec, method: &str) -> Result<ZetaReport> {
    if levels.len() == 1 {
        let values = table.into_iter().map(|v| v[0]).collect();
        finite_rank_report(levels[0], s_grid, values, method)
    } else {
        estimate_from_table(levels, s_grid, table, spec, method)
    }
}

/// Reduce per-level audits into the report.
fn assemble(
    family: Family,
    statuses: Vec<LevelStatus>,
    audits: &[LevelAudit],
    s_grid: &[f64],
    tol: &Tolerances,
) -> Result<AxiomReport> {
    if audits.is_empty() {
        return Err(Error::InvalidArgument("no level could be audited".into()));
    }
    let levels: Vec<usize> = audits.iter().map(|a| a.level).collect();
    let finite_rank = levels.len() == 1;
    let g = &tol.growth;

    let curvature = order_from(audits, 2.0, tol.k_max, |a| &a.curvature_order, g);
    let curvature_commutator = order_from(audits, 2.0, tol.k_max, |a| &a.curvature_commutator_order, g);
    let two_a = Condition2a {
        verdict: Verdict::from_order(curvature.verdict).and(Verdict::from_order(curvature_commutator.verdict)),
        curvature,
        curvature_commutator,
    };
    let two_b = compactness_condition(
        audits,
        "a R_D (1+<D>^2)^-1",
        |s| &s.curvature_candidate,
        finite_rank,
        &tol.compactness,
    );
    let commutators = commutator_evidence(
        audits,
        &levels,
        g,
        &[("[D,a]", |s| s.commutator_d), ("[D*,a]", |s| s.commutator_d_star)],
    );
    let three = Condition3 {
        verdict: Verdict::from_bool(commutators.iter().all(|c| c.bounded)),
        commutators,
    };
    let four = compactness_condition(
        audits,
        "a (1+<D>^2)^-1/2",
        |s| &s.resolvent_candidate,
        finite_rank,
        &tol.compactness,
    );
    let axioms = Axioms {
        one: Verdict::EvidenceOnly,
        one_note: "evidence-only: not decidable at finite truncation".into(),
        two_a,
        two_b,
        three,
        four,
    };

    let bound_levels: Vec<BoundLevel> = audits
        .iter()
        .map(|a| BoundLevel {
            level: a.level,
            dirac_ratio: a.bounds.dirac_ratio,
            curvature_ratio: a.bounds.curvature_ratio,
        })
        .collect();
    let bound2 = BoundLemma {
        verdict: Verdict::from_bool(audits.iter().all(|a| a.bounds.holds(tol.bound))),
        dirac_limit: UniversalBounds::DIRAC_LIMIT,
        curvature_limit: UniversalBounds::CURVATURE_LIMIT,
        levels: bound_levels,
    };

    let report_only = matches!(family, Family::Oscillator | Family::Line);
    let contraction: Vec<f64> = audits.iter().map(|a| a.curvature_contraction).collect();
    let resolvent = boundedness(
        "(1+<D>^2)(1+D_E^2)^-1",
        &levels,
        audits.iter().map(|a| a.resolvent_comparison).collect(),
        g,
    );
    let mut ratios = Vec::new();
    for (si, &s) in tol.ratio_s.iter().enumerate() {
        for (ri, name) in RATIO_NAMES.iter().enumerate() {
            let norms = audits.iter().map(|a| a.ratios[si][ri]).collect();
            ratios.push(RatioEntry {
                s,
                evidence: boundedness(name, &levels, norms, g),
            });
        }
    }
    let ratio_ok = resolvent.bounded && ratios.iter().all(|r| r.evidence.bounded);
    let ratio = RatioLemma {
        verdict: if report_only {
            Verdict::Reported
        } else {
            Verdict::from_bool(ratio_ok)
        },
        report_only,
        contraction_below_one: contraction.iter().all(|&c| c < 1.0),
        curvature_contraction: contraction,
        resolvent_comparison: resolvent,
        ratios,
    };
    let inverse_evidence = order_from(audits, 0.0, tol.k_max, |a| &a.inverse_order, g);
    let inverse = InverseStability {
        verdict: Verdict::from_order(inverse_evidence.verdict),
        witness: format!("(1 + a*a)^-1, a = {}", audits[0].samples[0].label),
        evidence: inverse_evidence,
    };
    let top = audits.last().expect("non-empty");
    let mellin = MellinLemma {
        verdict: Verdict::from_bool(top.mellin.iter().all(|c| c.agrees)),
        level: top.level,
        checks: top.mellin.clone(),
    };
    let herm = audits.iter().map(|a| a.hermiticity_residual).fold(0.0, f64::max);
    let dec = audits
        .iter()
        .map(|a| a.decomposition_residuals.0.max(a.decomposition_residuals.1))
        .fold(0.0, f64::max);
    let residuals = ResidualCheck {
        verdict: Verdict::from_bool(herm <= tol.identity && dec <= tol.identity),
        hermiticity: herm,
        decomposition: dec,
    };
    let lemmas = Lemmas {
        bound2,
        ratio,
        inverse,
        mellin,
        residuals,
    };

    let wick_commutators = commutator_evidence(audits, &levels, g, &[("[D_E,a]", |s| s.commutator_wick)]);
    let wick_compact = compactness_condition(
        audits,
        "a (1+D_E^2)^-1/2",
        |s| &s.wick_candidate,
        finite_rank,
        &tol.compactness,
    );
    let table = |pick: fn(&LevelAudit) -> &Vec<f64>| -> Vec<Vec<f64>> {
        (0..s_grid.len())
            .map(|i| audits.iter().map(|a| pick(a)[i]).collect())
            .collect()
    };
    let laplacian_route = zeta_report(&levels, s_grid, table(|a| &a.zeta_laplacian), &tol.stabilization, "laplacian")?;
    let first_label = &audits[0].samples[0].label;
    let wick_route = match (family, hermite_sample(first_label)) {
        (Family::Line, Some(g)) => {
            let ig = line_integral(g, 400);
            analytic_report(s_grid, |s| line_zeta_analytic(s, ig), "line-kernel")?
        }
        _ => zeta_report(&levels, s_grid, table(|a| &a.zeta_wick), &tol.stabilization, "wick")?,
    };
    let grid_step = s_grid
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0, f64::max);
    let same_dimension = match (laplacian_route.p_hat, wick_route.p_hat) {
        (Some(a), Some(b)) => (a - b).abs() <= grid_step + 1e-9,
        _ => false,
    };
    let pipeline = Pipeline {
        verdict: Verdict::from_bool(
            wick_commutators.iter().all(|c| c.bounded) && wick_compact.verdict == Verdict::Pass && same_dimension,
        ),
        commutators: wick_commutators,
        compactness: wick_compact,
        sample: audits[0].samples[0].label.clone(),
        laplacian_route,
        wick_route,
        grid_step,
        same_dimension,
    };

    Ok(AxiomReport {
        version: REPORT_VERSION.to_string(),
        model: None,
        family,
        levels: statuses,
        axioms,
        lemmas,
        pipeline,
        tolerances: tol.clone(),
    })
}

/// Per-level outcome of [`audit_levels`]; errors are kept as text so the
/// outcome can be shared and cloned.
pub type LevelOutcome = std::result::Result<LevelAudit, String>;

fn check_level_list(levels: &[usize]) -> Result<()> {
    if levels.is_empty() || levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("levels must be non-empty and strictly increasing".into()));
    }
    Ok(())
}

/// Build and audit every level; failures are recorded, not raised.
pub fn audit_levels<F>(build: F, levels: &[usize], s_grid: &[f64], tol: &Tolerances, exec: Exec) -> Result<Vec<LevelOutcome>>
where
    F: Fn(usize) -> Result<ModelTriple> + Sync,
{
    check_level_list(levels)?;
    Ok(exec.map(levels, |&n| {
        build(n)
            .and_then(|m| audit_level(&m, s_grid, tol))
            .map_err(|e| e.to_string())
    }))
}

/// Reduce per-level outcomes (in `levels` order) into a report.
pub fn report_from_audits(
    family: Family,
    levels: &[usize],
    outcomes: &[LevelOutcome],
    s_grid: &[f64],
    tol: &Tolerances,
) -> Result<AxiomReport> {
    check_level_list(levels)?;
    if outcomes.len() != levels.len() {
        return Err(Error::DimensionMismatch {
            context: "one audit outcome per level",
            left: outcomes.len(),
            right: levels.len(),
        });
    }
    let mut statuses = Vec::with_capacity(levels.len());
    let mut audits = Vec::new();
    for (&n, r) in levels.iter().zip(outcomes) {
        match r {
            Ok(a) => {
                statuses.push(LevelStatus {
                    level: n,
                    dim: Some(a.dim),
                    error: None,
                    hermiticity_residual: Some(a.hermiticity_residual),
                    decomposition_residuals: Some([a.decomposition_residuals.0, a.decomposition_residuals.1]),
                });
                audits.push(a.clone());
            }
            Err(e) => statuses.push(LevelStatus {
                level: n,
                dim: None,
                error: Some(e.clone()),
                hermiticity_residual: None,
                decomposition_residuals: None,
            }),
        }
    }
    if audits.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no level could be built: {}",
            statuses
                .iter()
                .filter_map(|s| s.error.clone())
                .collect::<Vec<_>>()
                .join("; ")
        )));
    }
    assemble(family, statuses, &audits, s_grid, tol)
}

/// Audit a family built level by level. Construction or measurement
/// failures are recorded per level; the verdicts use the surviving levels.
pub fn verify_prst<F>(
    build: F,
    levels: &[usize],
    s_grid: &[f64],
    tol: &Tolerances,
    exec: Exec,
) -> Result<AxiomReport>
where
    F: Fn(usize) -> Result<ModelTriple> + Sync,
{
    let outcomes = audit_levels(build, levels, s_grid, tol, exec)?;
    // with no surviving level the family is irrelevant: assembly reports the errors
    let family = outcomes
        .iter()
        .find_map(|o| o.as_ref().ok().map(|a| a.family))
        .unwrap_or(Family::Finite);
    report_from_audits(family, levels, &outcomes, s_grid, tol)
}

/// [`verify_prst`] on a descriptor; the report carries the descriptor.
pub fn verify_descriptor(
    desc: &ModelDescriptor,
    levels: &[usize],
    s_grid: &[f64],
    tol: &Tolerances,
    exec: Exec,
) -> Result<AxiomReport> {
    desc.validate()?;
    let levels = if desc.family.is_levelled() {
        levels.to_vec()
    } else {
        vec![desc.default_level()?]
    };
    let outcomes = audit_levels(|n| desc.build_at(n), &levels, s_grid, tol, exec)?;
    let mut r = report_from_audits(desc.family, &levels, &outcomes, s_grid, tol)?;
    r.model = Some(desc.clone());
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorentzReport {
    pub checks: Vec<IdentityCheck>,
    pub pass: bool,
    /// first violated identity, by name
    pub violated: Option<String>,
}

/// β identities of a Lorentz-type triple at one level.
pub fn verify_lorentz_type(model: &ModelTriple, tol: f64) -> Result<LorentzReport> {
    let beta = model
        .beta
        .as_ref()
        .ok_or(Error::MissingStructure("beta"))?
        .as_anti_self_adjoint();
    let b = beta.matrix();
    let n = model.dim();
    let d = model.d.matrix();
    let scale = linalg::max_abs(d).max(1.0);
    let rel = |m: CMat, s: f64| linalg::max_abs(&m) / s;
    let mut checks = Vec::new();
    let mut push = |name: &str, residual: f64| {
        checks.push(IdentityCheck {
            name: name.to_string(),
            residual,
            pass: residual <= tol,
        })
    };
    let id = linalg::identity(n);
    push("beta* = -beta", rel(b.adjoint() + b, 1.0));
    push("beta^2 = -1", rel(b * b + &id, 1.0));
    for s in &model.algebra_samples {
        push(
            &format!("[beta, {}] = 0", s.label),
            rel(linalg::commutator(b, s.op.matrix()), 1.0),
        );
    }
    let bd = b * d;
    push("beta D self-adjoint", rel(bd.adjoint() - &bd, scale));
    push("D* = beta D beta", rel(d.adjoint() - b * d * b, scale));
    if let Some(g) = &model.grading {
        let gm = g.matrix();
        push("Gamma beta + beta Gamma = 0", rel(linalg::anticommutator(gm, b), 1.0));
        push("Gamma D + D Gamma = 0", rel(linalg::anticommutator(gm, d), scale));
    }
    let d2 = d * d;
    let ds = d.adjoint().to_owned();
    let lhs = b * linalg::commutator(&d2, b);
    push("beta[D^2, beta] = D^2 - D*^2", rel(lhs - (&d2 - &ds * &ds), scale * scale));
    let de = model.derived.wick_plus.matrix();
    let dm = model.derived.wick_minus.matrix();
    push("beta D_E beta* = -D~_E", rel(b * de * b.adjoint() + dm, scale));
    let violated = checks.iter().find(|c| !c.pass).map(|c| c.name.clone());
    Ok(LorentzReport {
        pass: violated.is_none(),
        checks,
        violated,
    })
}
