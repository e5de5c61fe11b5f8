use std::fmt::Write as _;

/// One line of `summary.csv`: `metric,value,expected,tolerance,pass`.
/// Informational rows leave `expected`, `tolerance` and `pass` empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub metric: String,
    pub value: f64,
    pub expected: Option<f64>,
    pub tolerance: String,
    pub pass: Option<bool>,
}

impl SummaryRow {
    pub fn info(metric: impl Into<String>, value: f64) -> Self {
        Self {
            metric: metric.into(),
            value,
            expected: None,
            tolerance: String::new(),
            pass: None,
        }
    }

    /// Passes when `|value - expected| <= tol`.
    pub fn within(metric: impl Into<String>, value: f64, expected: f64, tol: f64) -> Self {
        Self {
            metric: metric.into(),
            value,
            expected: Some(expected),
            tolerance: format!("{tol}"),
            pass: Some((value - expected).abs() <= tol),
        }
    }

    pub fn in_range(metric: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            metric: metric.into(),
            value,
            expected: None,
            tolerance: format!("[{lo};{hi}]"),
            pass: Some(value >= lo && value <= hi),
        }
    }

    pub fn at_least(metric: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            metric: metric.into(),
            value,
            expected: None,
            tolerance: format!(">={bound}"),
            pass: Some(value >= bound),
        }
    }

    pub fn at_most(metric: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            metric: metric.into(),
            value,
            expected: None,
            tolerance: format!("<={bound}"),
            pass: Some(value <= bound),
        }
    }

    pub fn passed(&self) -> bool {
        self.pass != Some(false)
    }
}

pub const SUMMARY_HEADER: &str = "metric,value,expected,tolerance,pass";

pub fn emit_summary(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        let expected = r.expected.map(|e| e.to_string()).unwrap_or_default();
        let pass = r.pass.map(|p| p.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.metric, r.value, expected, r.tolerance, pass
        );
    }
    out
}
