//! Model triples: an algebra sample, a truncated `D`, optional grading and
//! fundamental symmetry, and the derived Wick-rotation operators.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::operator::{BasisSpec, DerivedOperators, FundamentalSymmetry, TruncatedOperator};

mod descriptor;
mod finite;
mod first_order;
mod lorentz;
mod oscillator;

pub use descriptor::{ComplexRows, ModelDescriptor};
pub use finite::finite_geometry;
pub use first_order::{
    check_first_order_conditions, first_order_model, ConditionCheck, ConditionReport,
    FirstOrderSpec, Witness, MAX_GRID_DIM,
};
pub use lorentz::lorentz_model;
pub use oscillator::{
    de_heat_kernel, harmonic_oscillator, hermite_sample, HERMITE_SAMPLES, hermite_multiplication, hermite_multiplication_complex,
    ladder, line_model, mehler_kernel, mehler_series, Ladder, HERMITE_BULK_MARGIN,
    QUADRATURE_FACTOR,
};

/// Tolerance for the structural identities of grading and β.
pub const STRUCTURE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Finite,
    FirstOrder,
    Oscillator,
    /// The oscillator's `D_E = i d/dx + x`, with trace and index
    /// quantities taken from the exact kernel rather than a truncation.
    Line,
    /// `D = σ₂ ⊗ A`, `Γ = σ₃ ⊗ 1`, `β = iσ₁ ⊗ 1`.
    Lorentz,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Finite => "finite",
            Family::FirstOrder => "first-order",
            Family::Oscillator => "oscillator",
            Family::Line => "line",
            Family::Lorentz => "lorentz",
        }
    }

    /// Whether the truncation level changes the operator.
    pub fn is_levelled(&self) -> bool {
        matches!(self, Family::FirstOrder | Family::Oscillator | Family::Line)
    }

    /// Rows and columns dropped from the end before comparing unbounded
    /// quantities across levels.
    pub fn bulk_margin(&self) -> usize {
        match self {
            Family::Oscillator | Family::Line => HERMITE_BULK_MARGIN,
            _ => 0,
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A named multiplication operator.
#[derive(Debug, Clone)]
pub struct AlgebraSample {
    pub label: String,
    pub op: TruncatedOperator,
}

#[derive(Debug, Clone)]
pub struct ModelTriple {
    pub d: TruncatedOperator,
    pub algebra_samples: Vec<AlgebraSample>,
    pub grading: Option<TruncatedOperator>,
    pub beta: Option<FundamentalSymmetry>,
    pub derived: DerivedOperators,
    pub basis: BasisSpec,
    pub family: Family,
    /// Construction metadata such as quadrature sizes.
    pub provenance: BTreeMap<String, String>,
}

impl ModelTriple {
    /// Assemble and validate.
    pub fn new(
        d: TruncatedOperator,
        algebra_samples: Vec<AlgebraSample>,
        grading: Option<TruncatedOperator>,
        beta: Option<FundamentalSymmetry>,
        family: Family,
    ) -> Result<Self> {
        let derived = DerivedOperators::new(&d);
        let model = Self {
            basis: d.basis().clone(),
            d,
            algebra_samples,
            grading,
            beta,
            derived,
            family,
            provenance: BTreeMap::new(),
        };
        model.validate()?;
        Ok(model)
    }

    pub fn dim(&self) -> usize {
        self.d.dim()
    }

    pub fn level(&self) -> usize {
        self.basis.level
    }

    pub fn with_provenance(mut self, key: &str, value: impl Into<String>) -> Self {
        self.provenance.insert(key.into(), value.into());
        self
    }

    pub fn is_even(&self) -> bool {
        self.grading.is_some()
    }

    /// Grading and β identities at matrix level.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        for s in &self.algebra_samples {
            if s.op.dim() != n {
                return Err(Error::DimensionMismatch {
                    context: "algebra sample and D",
                    left: s.op.dim(),
                    right: n,
                });
            }
        }
        if let Some(g) = &self.grading {
            let gm = g.matrix();
            if g.dim() != n {
                return Err(Error::DimensionMismatch {
                    context: "grading and D",
                    left: g.dim(),
                    right: n,
                });
            }
            let id = linalg::identity(n);
            check(
                "grading self-adjoint",
                linalg::max_abs(&(gm - gm.adjoint())),
            )?;
            check("grading square", linalg::max_abs(&(gm * gm - &id)))?;
            check(
                "grading anticommutes with D",
                relative(&linalg::anticommutator(gm, self.d.matrix()), self.d.matrix()),
            )?;
            for s in &self.algebra_samples {
                check(
                    "grading commutes with algebra",
                    linalg::max_abs(&linalg::commutator(gm, s.op.matrix())),
                )?;
            }
        }
        if let Some(b) = &self.beta {
            let bm = b.as_anti_self_adjoint().matrix().clone();
            for s in &self.algebra_samples {
                check(
                    "beta commutes with algebra",
                    linalg::max_abs(&linalg::commutator(&bm, s.op.matrix())),
                )?;
            }
        }
        Ok(())
    }

    pub fn sample(&self, label: &str) -> Option<&AlgebraSample> {
        self.algebra_samples.iter().find(|s| s.label == label)
    }
}

fn relative(residual: &CMat, reference: &CMat) -> f64 {
    let scale = linalg::max_abs(reference).max(1.0);
    linalg::max_abs(residual) / scale
}

fn check(what: &str, residual: f64) -> Result<()> {
    if residual > STRUCTURE_TOL {
        return Err(Error::InvalidSymmetry(format!(
            "{what}: residual {residual:.3e} exceeds {STRUCTURE_TOL:.0e}"
        )));
    }
    Ok(())
}
