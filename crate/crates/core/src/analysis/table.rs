//! Rows of the convergence tables, in a fixed order.

use serde::{Deserialize, Serialize};

use super::dimension::ZetaReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub model: String,
    pub quantity: String,
    pub s: f64,
    #[serde(rename = "N")]
    pub level: usize,
    pub value: f64,
    pub stabilized_flag: bool,
}

/// One row per `(s, N)` cell; the flag is the stabilization of that `s`.
pub fn zeta_rows(model: &str, quantity: &str, report: &ZetaReport) -> Vec<TableRow> {
    let mut rows = Vec::new();
    for c in &report.columns {
        let levels: Vec<usize> = if report.levels.is_empty() {
            vec![0; c.values.len()]
        } else {
            report.levels.clone()
        };
        for (&level, &value) in levels.iter().zip(&c.values) {
            rows.push(TableRow {
                model: model.to_string(),
                quantity: quantity.to_string(),
                s: c.s,
                level,
                value,
                stabilized_flag: c.stabilized,
            });
        }
    }
    rows
}

/// Lexicographic in `(quantity, s, N)`, then model.
pub fn sort_rows(rows: &mut [TableRow]) {
    rows.sort_by(|a, b| {
        a.quantity
            .cmp(&b.quantity)
            .then(a.s.total_cmp(&b.s))
            .then(a.level.cmp(&b.level))
            .then(a.model.cmp(&b.model))
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::dimension::finite_rank_report;

    #[test]
    fn rows_sorted() {
        let r = finite_rank_report(3, &[0.5, 1.0], vec![2.0, 1.0], "t").unwrap();
        let mut rows = zeta_rows("m", "zeta", &r);
        rows.extend(zeta_rows("m", "heat", &r));
        rows.reverse();
        sort_rows(&mut rows);
        assert_eq!(rows[0].quantity, "heat");
        assert_eq!(rows[0].s, 0.5);
        assert_eq!(rows[3].quantity, "zeta");
        assert_eq!(rows[3].s, 1.0);
    }
}
