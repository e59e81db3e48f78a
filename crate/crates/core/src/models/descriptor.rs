//! Serializable model descriptors. Matrices are stored as rows of
//! `[re, im]` pairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, CMat};

use super::{
    finite_geometry, first_order_model, harmonic_oscillator, line_model, lorentz_model, Family,
    FirstOrderSpec, ModelTriple,
};

pub type ComplexRows = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDescriptor {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<ComplexRows>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<ComplexRows>>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<ComplexRows>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<ComplexRows>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
}

pub fn rows_to_matrix(rows: &ComplexRows) -> Result<CMat> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, |r| r.len());
    if nr == 0 || nc == 0 {
        return Err(Error::InvalidArgument("matrix must be non-empty".into()));
    }
    if rows.iter().any(|r| r.len() != nc) {
        return Err(Error::InvalidArgument("matrix rows have unequal length".into()));
    }
    if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("matrix entries must be finite".into()));
    }
    Ok(CMat::from_fn(nr, nc, |i, j| c64::new(rows[i][j][0], rows[i][j][1])))
}

pub fn matrix_to_rows(m: &CMat) -> ComplexRows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

impl ModelDescriptor {
    fn empty(family: Family) -> Self {
        Self {
            family,
            name: None,
            b: None,
            m: None,
            k: None,
            a: None,
            n: None,
            l: None,
            grid: None,
        }
    }

    pub fn finite(b: &CMat) -> Self {
        Self {
            b: Some(matrix_to_rows(b)),
            ..Self::empty(Family::Finite)
        }
    }

    pub fn oscillator(n: usize) -> Self {
        Self {
            n: Some(n),
            ..Self::empty(Family::Oscillator)
        }
    }

    pub fn line(n: usize) -> Self {
        Self {
            n: Some(n),
            ..Self::empty(Family::Line)
        }
    }

    pub fn first_order(spec: &FirstOrderSpec) -> Self {
        Self {
            m: Some(spec.m.iter().map(matrix_to_rows).collect()),
            k: Some(matrix_to_rows(&spec.k)),
            l: Some(spec.half_period),
            grid: Some(spec.grid),
            ..Self::empty(Family::FirstOrder)
        }
    }

    pub fn lorentz(a: &CMat) -> Self {
        Self {
            a: Some(matrix_to_rows(a)),
            ..Self::empty(Family::Lorentz)
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Report label: the explicit name, else the family.
    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.family.to_string())
    }

    fn require<'a, T>(field: &'a Option<T>, key: &str, family: Family) -> Result<&'a T> {
        field
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument(format!("family {family} requires \"{key}\"")))
    }

    fn reject(&self, present: bool, key: &str) -> Result<()> {
        if present {
            return Err(Error::InvalidArgument(format!(
                "family {} does not take \"{key}\"",
                self.family
            )));
        }
        Ok(())
    }

    /// Field presence matches the family.
    pub fn validate(&self) -> Result<()> {
        let f = self.family;
        let (b, m, k, a, n, l, g) = (
            self.b.is_some(),
            self.m.is_some(),
            self.k.is_some(),
            self.a.is_some(),
            self.n.is_some(),
            self.l.is_some(),
            self.grid.is_some(),
        );
        match f {
            Family::Finite => {
                Self::require(&self.b, "B", f)?;
                self.reject(m || k || a || n || l || g, "M/K/A/N/L/grid")
            }
            Family::Oscillator | Family::Line => {
                Self::require(&self.n, "N", f)?;
                self.reject(b || m || k || a || l || g, "B/M/K/A/L/grid")
            }
            Family::FirstOrder => {
                Self::require(&self.m, "M", f)?;
                Self::require(&self.k, "K", f)?;
                Self::require(&self.l, "L", f)?;
                Self::require(&self.grid, "grid", f)?;
                self.reject(b || a || n, "B/A/N")
            }
            Family::Lorentz => {
                Self::require(&self.a, "A", f)?;
                self.reject(b || m || k || n || l || g, "B/M/K/N/L/grid")
            }
        }
    }

    pub fn first_order_spec(&self) -> Result<FirstOrderSpec> {
        let f = self.family;
        let m = Self::require(&self.m, "M", f)?
            .iter()
            .map(rows_to_matrix)
            .collect::<Result<Vec<_>>>()?;
        let k = rows_to_matrix(Self::require(&self.k, "K", f)?)?;
        FirstOrderSpec::new(m, k, *Self::require(&self.l, "L", f)?, *Self::require(&self.grid, "grid", f)?)
    }

    /// The level stored in the descriptor (`N`, `grid`, or the fixed dimension).
    pub fn default_level(&self) -> Result<usize> {
        self.validate()?;
        Ok(match self.family {
            Family::Oscillator | Family::Line => self.n.unwrap_or(0),
            Family::FirstOrder => self.grid.unwrap_or(0),
            Family::Finite => {
                let b = rows_to_matrix(self.b.as_ref().expect("validated"))?;
                b.nrows() + b.ncols()
            }
            Family::Lorentz => 2 * rows_to_matrix(self.a.as_ref().expect("validated"))?.nrows(),
        })
    }

    /// Four dyadic levels ending at the stored one for levelled families,
    /// the single fixed dimension otherwise.
    pub fn default_levels(&self) -> Result<Vec<usize>> {
        let top = self.default_level()?;
        if !self.family.is_levelled() {
            return Ok(vec![top]);
        }
        let min = if self.family == Family::FirstOrder { 2 } else { 8 };
        let mut out: Vec<usize> = (0..4).rev().map(|k| top >> k).filter(|&n| n >= min).collect();
        out.dedup();
        Ok(out)
    }

    pub fn build(&self) -> Result<ModelTriple> {
        self.build_at(self.default_level()?)
    }

    /// Build at a truncation level; the level is ignored by fixed-dimension
    /// families.
    pub fn build_at(&self, level: usize) -> Result<ModelTriple> {
        self.validate()?;
        match self.family {
            Family::Finite => finite_geometry(&rows_to_matrix(self.b.as_ref().expect("validated"))?),
            Family::Oscillator => harmonic_oscillator(level),
            Family::Line => line_model(level),
            Family::FirstOrder => first_order_model(&self.first_order_spec()?.with_grid(level)?),
            Family::Lorentz => lorentz_model(&rows_to_matrix(self.a.as_ref().expect("validated"))?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, re, I};

    #[test]
    fn field_checks() {
        let mut d = ModelDescriptor::oscillator(32);
        assert!(d.validate().is_ok());
        d.b = Some(vec![vec![[1.0, 0.0]]]);
        assert!(d.validate().is_err());
        let f = ModelDescriptor::empty(Family::FirstOrder);
        assert!(f.validate().is_err());
    }

    #[test]
    fn builds_each_family() {
        let b = linalg::from_rows(&[vec![re(1.0), re(0.0)]]);
        assert_eq!(ModelDescriptor::finite(&b).build().unwrap().dim(), 3);
        assert_eq!(ModelDescriptor::oscillator(16).build_at(8).unwrap().dim(), 8);
        let spec = FirstOrderSpec::new(
            vec![linalg::diagonal(&[I, -I])],
            linalg::zeros(2, 2),
            std::f64::consts::PI,
            32,
        )
        .unwrap();
        let desc = ModelDescriptor::first_order(&spec);
        assert_eq!(desc.build_at(16).unwrap().dim(), 32);
        assert_eq!(desc.default_levels().unwrap(), vec![4, 8, 16, 32]);
        let a = linalg::real_diagonal(&[1.0, 2.0]);
        assert_eq!(ModelDescriptor::lorentz(&a).build().unwrap().dim(), 4);
    }

    #[test]
    fn ragged_rows_rejected() {
        let rows = vec![vec![[1.0, 0.0]], vec![[1.0, 0.0], [0.0, 0.0]]];
        assert!(rows_to_matrix(&rows).is_err());
    }
}
