//! Per-model work for each task, collected into the report.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use wickrot::analysis::{
    analytic_report, estimate_with_engines, line_integral, line_zeta_analytic, zeta_rows, EngineCache,
    EngineKey, SpectralEngine, TableRow, ZetaReport,
};
use wickrot::clifford::{run_suite, CliffordSuite, DEFAULT_SEED};
use wickrot::index::{
    mckean_singer_index, residue_pairing_analytic, residue_pairing_truncated, IndexResult, Unitary,
    WindingGrid,
};
use wickrot::models::{
    check_first_order_conditions, hermite_sample, ConditionReport, Family, ModelDescriptor, ModelTriple,
};
use wickrot::verifier::{
    audit_levels, report_from_audits, verify_lorentz_type, AxiomReport, LevelOutcome, LorentzReport,
};
use wickrot::{linalg, Exec};

use crate::config::{NamedModel, Settings, Task};

/// Random covectors for the admissibility check, on top of the frame.
pub const XI_SAMPLES: usize = 64;
/// `‖R_D‖` below which a Lorentz-type model falls under the vanishing theorem.
pub const FLAT_TOL: f64 = 1e-10;
/// Quadrature nodes for `∫g` on the line.
const LINE_NODES: usize = 400;

#[derive(Debug, Clone, Serialize)]
pub struct ZetaEntry {
    pub sample: String,
    pub route: &'static str,
    pub report: ZetaReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct HeatEntry {
    pub sample: String,
    pub route: &'static str,
    pub t: f64,
    #[serde(rename = "N")]
    pub level: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexEntry {
    pub unitary: String,
    #[serde(flatten)]
    pub result: IndexResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelReport {
    pub name: String,
    pub descriptor: ModelDescriptor,
    #[serde(rename = "N_list")]
    pub levels: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<AxiomReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lorentz: Option<LorentzReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub admissibility: Option<ConditionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<Vec<ZetaEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heat: Option<Vec<HeatEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<Vec<IndexEntry>>,
    /// computations that could not be carried out
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
    #[serde(skip)]
    pub failures: Vec<String>,
}

/// Sample labels and `(N, laplacian engine, wick engine)` per level.
type Spectra = (Vec<String>, Vec<(usize, Arc<SpectralEngine>, Arc<SpectralEngine>)>);

/// Shared state across models in one run. The oscillator and the line
/// model have the same truncation, so their audits and engines coincide.
pub struct Runner<'a> {
    pub settings: &'a Settings,
    pub exec: Exec,
    engines: EngineCache,
    audits: BTreeMap<(String, Vec<usize>), Vec<LevelOutcome>>,
    spectra: BTreeMap<(String, Vec<usize>), Spectra>,
    pub zeta_rows: Vec<TableRow>,
}

fn cache_key(m: &NamedModel) -> String {
    match m.descriptor.family {
        Family::Oscillator | Family::Line => "hermite".to_string(),
        _ => format!("model:{}", m.name),
    }
}

impl<'a> Runner<'a> {
    pub fn new(settings: &'a Settings, exec: Exec) -> Self {
        Self {
            settings,
            exec,
            engines: EngineCache::new(),
            audits: BTreeMap::new(),
            spectra: BTreeMap::new(),
            zeta_rows: Vec::new(),
        }
    }

    fn levels_for(&self, d: &ModelDescriptor) -> wickrot::Result<Vec<usize>> {
        match (&self.settings.levels, d.family.is_levelled()) {
            (Some(l), true) => Ok(l.clone()),
            _ => d.default_levels(),
        }
    }

    pub fn run_model(&mut self, m: &NamedModel) -> ModelReport {
        let task = self.settings.task;
        let mut r = ModelReport {
            name: m.name.clone(),
            descriptor: m.descriptor.clone(),
            levels: Vec::new(),
            verify: None,
            lorentz: None,
            admissibility: None,
            zeta: None,
            heat: None,
            index: None,
            errors: Vec::new(),
            failures: Vec::new(),
        };
        let levels = match self.levels_for(&m.descriptor) {
            Ok(l) => l,
            Err(e) => {
                r.errors.push(format!("levels: {e}"));
                r.failures = r.errors.clone();
                return r;
            }
        };
        r.levels = levels.clone();
        let verify = matches!(task, Task::Verify | Task::All);
        if verify {
            self.verify(m, &levels, &mut r);
        }
        if matches!(task, Task::Zeta | Task::All) {
            match self.zeta(m, &levels) {
                Ok(z) => {
                    for e in &z {
                        let q = format!("{}:{}", e.route, e.sample);
                        self.zeta_rows.extend(zeta_rows(&m.name, &q, &e.report));
                    }
                    r.zeta = Some(z);
                }
                Err(e) => r.errors.push(format!("zeta: {e}")),
            }
        }
        if matches!(task, Task::Heat | Task::All) {
            match self.heat(m, &levels) {
                Ok(h) => r.heat = Some(h),
                Err(e) => r.errors.push(format!("heat: {e}")),
            }
        }
        let index_wanted = match task {
            Task::Index => true,
            // the truncated oscillator pairing is experimental
            Task::All => m.descriptor.family != Family::Oscillator,
            _ => false,
        };
        if index_wanted {
            match self.index(m, &levels) {
                Ok(Some(list)) => {
                    for e in &list {
                        let res = &e.result;
                        if !res.pass && !res.experimental {
                            r.failures.push(format!(
                                "index {}: pairing {} (raw {:.3e}, distance {:.3e}), oracle {:?}",
                                e.unitary, res.pairing, res.pairing_raw, res.distance, res.oracle
                            ));
                        }
                    }
                    r.index = Some(list);
                }
                Ok(None) => {}
                Err(e) => r.errors.push(format!("index: {e}")),
            }
        }
        let errs: Vec<String> = r.errors.clone();
        r.failures.extend(errs);
        r
    }

    fn verify(&mut self, m: &NamedModel, levels: &[usize], r: &mut ModelReport) {
        let d = &m.descriptor;
        let tol = &self.settings.tolerances;
        let s_grid = &self.settings.s_grid;
        let key = (cache_key(m), levels.to_vec());
        let outcomes = match self.audits.get(&key) {
            Some(o) => o.clone(),
            None => match audit_levels(|n| d.build_at(n), levels, s_grid, tol, self.exec) {
                Ok(o) => {
                    self.audits.insert(key, o.clone());
                    o
                }
                Err(e) => {
                    r.errors.push(format!("verify: {e}"));
                    return;
                }
            },
        };
        match report_from_audits(d.family, levels, &outcomes, s_grid, tol) {
            Ok(mut rep) => {
                rep.model = None;
                r.failures.extend(rep.failure_details());
                r.verify = Some(rep);
            }
            Err(e) => r.errors.push(format!("verify: {e}")),
        }
        if d.family == Family::Lorentz {
            match d.build().and_then(|t| verify_lorentz_type(&t, tol.identity)) {
                Ok(l) => {
                    if let Some(v) = &l.violated {
                        let res = l.checks.iter().find(|c| &c.name == v).map_or(f64::NAN, |c| c.residual);
                        r.failures.push(format!("lorentz identity {v} violated: residual {res:.3e}"));
                    }
                    r.lorentz = Some(l);
                }
                Err(e) => r.errors.push(format!("lorentz: {e}")),
            }
        }
        if d.family == Family::FirstOrder {
            match d.first_order_spec() {
                Ok(spec) => {
                    let c = check_first_order_conditions(&spec, XI_SAMPLES);
                    if let Some(v) = c.first_violation() {
                        r.failures.push(format!(
                            "first-order condition {} violated: value {:.3e} at {}",
                            v.name,
                            v.witness.value,
                            witness_text(&v.witness)
                        ));
                    }
                    r.admissibility = Some(c);
                }
                Err(e) => r.errors.push(format!("admissibility: {e}")),
            }
        }
    }

    fn engine(&self, m: &NamedModel, triple: &ModelTriple, route: &'static str) -> wickrot::Result<Arc<SpectralEngine>> {
        let key = EngineKey {
            model: cache_key(m),
            level: triple.level(),
            route: route.to_string(),
        };
        self.engines.get_or_try_init(key, || {
            let obs: Vec<&linalg::CMat> = triple.algebra_samples.iter().map(|s| s.op.matrix()).collect();
            match route {
                "laplacian" => SpectralEngine::from_laplacian(triple.derived.mean_square.matrix(), &obs),
                _ => SpectralEngine::from_dirac(triple.derived.wick_plus.matrix(), &obs),
            }
        })
    }

    /// Sample labels and per-level engines on both routes.
    fn engines_for(&mut self, m: &NamedModel, levels: &[usize]) -> wickrot::Result<Spectra> {
        let d = &m.descriptor;
        let levels = if d.family.is_levelled() { levels.to_vec() } else { vec![d.default_level()?] };
        let key = (cache_key(m), levels.clone());
        if let Some(s) = self.spectra.get(&key) {
            return Ok(s.clone());
        }
        let this = &*self;
        let built = this.exec.map(&levels, |&n| -> wickrot::Result<_> {
            let t = d.build_at(n)?;
            let labels: Vec<String> = t.algebra_samples.iter().map(|s| s.label.clone()).collect();
            let lap = this.engine(m, &t, "laplacian")?;
            let wick = this.engine(m, &t, "wick")?;
            Ok((labels, (n, lap, wick)))
        });
        let mut labels = Vec::new();
        let mut out = Vec::new();
        for b in built {
            let (l, e) = b?;
            labels = l;
            out.push(e);
        }
        self.spectra.insert(key, (labels.clone(), out.clone()));
        Ok((labels, out))
    }

    fn zeta(&mut self, m: &NamedModel, levels: &[usize]) -> wickrot::Result<Vec<ZetaEntry>> {
        let (labels, engines) = self.engines_for(m, levels)?;
        let spec = &self.settings.tolerances.stabilization;
        let s_grid = &self.settings.s_grid;
        let lap: Vec<(usize, &SpectralEngine)> = engines.iter().map(|(n, l, _)| (*n, l.as_ref())).collect();
        let wick: Vec<(usize, &SpectralEngine)> = engines.iter().map(|(n, _, w)| (*n, w.as_ref())).collect();
        let mut out = Vec::new();
        for (i, label) in labels.iter().enumerate() {
            out.push(ZetaEntry {
                sample: label.clone(),
                route: "laplacian",
                report: estimate_with_engines(&lap, i, s_grid, spec, "laplacian-eigen", self.exec)?,
            });
            let line_g = (m.descriptor.family == Family::Line).then(|| hermite_sample(label)).flatten();
            let report = match line_g {
                Some(g) => {
                    let ig = line_integral(g, LINE_NODES);
                    analytic_report(s_grid, |s| line_zeta_analytic(s, ig), "line-kernel")?
                }
                None => estimate_with_engines(&wick, i, s_grid, spec, "wick-eigen", self.exec)?,
            };
            out.push(ZetaEntry {
                sample: label.clone(),
                route: "wick",
                report,
            });
        }
        Ok(out)
    }

    fn heat(&mut self, m: &NamedModel, levels: &[usize]) -> wickrot::Result<Vec<HeatEntry>> {
        let (labels, engines) = self.engines_for(m, levels)?;
        let mut out = Vec::new();
        for (i, label) in labels.iter().enumerate() {
            for (route, pick) in [("laplacian", 0usize), ("wick", 1)] {
                for &t in &self.settings.t_list {
                    for (n, lap, wick) in &engines {
                        let e = if pick == 0 { lap } else { wick };
                        out.push(HeatEntry {
                            sample: label.clone(),
                            route,
                            t,
                            level: *n,
                            value: e.heat(i, t),
                        });
                    }
                }
            }
        }
        Ok(out)
    }

    fn index(&self, m: &NamedModel, levels: &[usize]) -> wickrot::Result<Option<Vec<IndexEntry>>> {
        let d = &m.descriptor;
        let s = self.settings;
        let grid = WindingGrid::default();
        let list = match d.family {
            Family::Line => s
                .windings
                .iter()
                .map(|&w| {
                    let u = Unitary::Winding(w);
                    Ok(IndexEntry {
                        unitary: u.label(),
                        result: residue_pairing_analytic(&u, &s.index_s_grid, &grid)?,
                    })
                })
                .collect::<wickrot::Result<Vec<_>>>()?,
            Family::Oscillator => {
                let models = self
                    .exec
                    .map(levels, |&n| d.build_at(n))
                    .into_iter()
                    .collect::<wickrot::Result<Vec<_>>>()?;
                s.windings
                    .iter()
                    .map(|&w| {
                        let u = Unitary::Winding(w);
                        Ok(IndexEntry {
                            unitary: u.label(),
                            result: residue_pairing_truncated(&u, &models, &s.index_s_grid, &grid, self.exec)?,
                        })
                    })
                    .collect::<wickrot::Result<Vec<_>>>()?
            }
            Family::Finite | Family::Lorentz => {
                let t = d.build()?;
                let mut res = mckean_singer_index(&t, &s.t_list)?;
                if d.family == Family::Lorentz
                    && linalg::op_norm(t.derived.curvature_defect.matrix()) <= FLAT_TOL
                {
                    res = res.with_oracle(0);
                }
                vec![IndexEntry {
                    unitary: "grading".into(),
                    result: res,
                }]
            }
            Family::FirstOrder => return Ok(None),
        };
        Ok(Some(list))
    }
}

fn witness_text(w: &wickrot::models::Witness) -> String {
    match (&w.xi, &w.indices) {
        (Some(xi), _) => format!("xi = {xi:?}"),
        (None, Some(ix)) => format!("indices {ix:?}"),
        _ => "n/a".into(),
    }
}

/// Every requested signature; failures are named by signature and residual.
pub fn run_clifford(settings: &Settings, exec: Exec) -> (Vec<CliffordSuite>, Vec<String>) {
    let results = exec.map(&settings.signatures, |&sig| run_suite(sig, settings.clifford_samples, DEFAULT_SEED));
    let mut suites = Vec::new();
    let mut failures = Vec::new();
    for (sig, r) in settings.signatures.iter().zip(results) {
        match r {
            Ok(s) => {
                if !s.pass {
                    failures.push(format!(
                        "clifford ({},{}): square {:.3e}, mixed {:.3e}, rotation {:.3e}, spin {:?}",
                        sig.t,
                        sig.s,
                        s.square.max_residual(),
                        s.mixed.max_residual(),
                        s.rotation_residual,
                        s.spin_symmetry
                    ));
                }
                suites.push(s);
            }
            Err(e) => failures.push(format!("clifford ({},{}): {e}", sig.t, sig.s)),
        }
    }
    (suites, failures)
}
