//! Batch run records.

use serde::Serialize;

use octaseg::EvalReport;

/// One processed input.
#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    pub input: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mask_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<EvalReport>,
}

/// A failed input, kept so one bad file never aborts a batch.
#[derive(Debug, Clone, Serialize)]
pub struct ManifestFailure {
    pub input: String,
    pub error: String,
}

/// Aggregate means over the defined values of each metric, with the number
/// of rows that had the metric absent.
#[derive(Debug, Clone, Serialize, Default)]
pub struct Aggregate {
    pub means: std::collections::BTreeMap<String, f64>,
    pub skipped: std::collections::BTreeMap<String, usize>,
}

impl Aggregate {
    /// Folds per-row optional values into means, counting absences.
    pub fn from_rows(rows: &[(String, Vec<(&'static str, Option<f64>)>)]) -> Self {
        let mut sums: std::collections::BTreeMap<String, (f64, usize)> = Default::default();
        let mut skipped: std::collections::BTreeMap<String, usize> = Default::default();
        for (_, metrics) in rows {
            for (name, value) in metrics {
                match value {
                    Some(v) => {
                        let slot = sums.entry((*name).to_string()).or_insert((0.0, 0));
                        slot.0 += v;
                        slot.1 += 1;
                    }
                    None => *skipped.entry((*name).to_string()).or_insert(0) += 1,
                }
            }
        }
        let means = sums
            .into_iter()
            .map(|(name, (sum, n))| (name, sum / n as f64))
            .collect();
        Self { means, skipped }
    }
}

/// Full record of one batch invocation.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config_digest: String,
    pub entries: Vec<ManifestEntry>,
    pub failures: Vec<ManifestFailure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aggregate: Option<Aggregate>,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serialises")
    }
}

/// Metric column names in CSV order.
pub const METRIC_NAMES: [&str; 15] = [
    "dice", "acc", "rec", "pre", "C", "A", "L", "cal", "lcc", "tops", "vd_seg", "vd_gt",
    "vd_err", "faz_err", "ai_err",
];

/// Report metric columns of one evaluation row, in CSV order, absences as
/// `None`.
pub fn report_metrics(report: &EvalReport) -> Vec<(&'static str, Option<f64>)> {
    vec![
        ("dice", Some(report.dice)),
        ("acc", Some(report.accuracy)),
        ("rec", Some(report.recall)),
        ("pre", report.precision),
        ("C", Some(report.connectivity)),
        ("A", Some(report.area)),
        ("L", Some(report.length)),
        ("cal", Some(report.cal)),
        ("lcc", Some(report.lcc)),
        ("tops", report.tops),
        ("vd_seg", Some(report.vessel_density_seg)),
        ("vd_gt", Some(report.vessel_density_gt)),
        ("vd_err", Some(report.vd_rel_error)),
        ("faz_err", report.faz_area_rel_error),
        ("ai_err", report.acircularity_rel_error),
    ]
}
