//! Per-solve statistics as flat `key=value` text or JSON.

use std::fmt::Write as _;

use serde::Serialize;

/// Relative gap `(z - target) / z * 100`. Undefined when `z` is zero and
/// differs from the target.
pub fn relative_gap(z: f64, target: f64) -> Option<f64> {
    if z == target {
        Some(0.0)
    } else if z == 0.0 {
        None
    } else {
        Some((z - target) / z * 100.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub instance: String,
    pub format: String,
    pub m: usize,
    pub n: usize,
    pub nnz: usize,
    pub feasible: bool,
    pub objective: Option<f64>,
    pub target: Option<f64>,
    pub gap_pct: Option<f64>,
    pub time_to_best_secs: Option<f64>,
    pub total_secs: f64,
    pub fnls_calls: u64,
    pub generated_rows: usize,
    pub generated_row_ratio_pct: f64,
    pub flips: u64,
    pub moves_1flip: u64,
    pub moves_2flip: u64,
    pub moves_4flip: u64,
    pub weight_decreases: u64,
    pub weight_increases: u64,
    pub alpha: f64,
    /// `0` for exact comparisons, else the relative tolerance.
    pub epsilon: f64,
    pub time_limit_secs: f64,
    pub weight_rule: String,
    /// Brute-force optimum when `--verify` was given; `None` inside means
    /// the instance is infeasible.
    pub verified_optimum: Option<Option<f64>>,
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "none".to_owned(), ToString::to_string)
}

impl SolveReport {
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        kv("instance", self.instance.clone());
        kv("format", self.format.clone());
        kv("m", self.m.to_string());
        kv("n", self.n.to_string());
        kv("nnz", self.nnz.to_string());
        kv("feasible", self.feasible.to_string());
        kv("objective", opt(&self.objective));
        kv("target", opt(&self.target));
        kv("gap_pct", self.gap_pct.map_or_else(|| "none".to_owned(), |g| format!("{g:.2}")));
        kv("time_to_best_secs", self.time_to_best_secs.map_or_else(|| "none".to_owned(), |t| format!("{t:.3}")));
        kv("total_secs", format!("{:.3}", self.total_secs));
        kv("fnls_calls", self.fnls_calls.to_string());
        kv("generated_rows", self.generated_rows.to_string());
        kv("generated_row_ratio_pct", format!("{:.2}", self.generated_row_ratio_pct));
        kv("flips", self.flips.to_string());
        kv("moves_1flip", self.moves_1flip.to_string());
        kv("moves_2flip", self.moves_2flip.to_string());
        kv("moves_4flip", self.moves_4flip.to_string());
        kv("weight_decreases", self.weight_decreases.to_string());
        kv("weight_increases", self.weight_increases.to_string());
        kv("alpha", self.alpha.to_string());
        kv("epsilon", self.epsilon.to_string());
        kv("time_limit_secs", self.time_limit_secs.to_string());
        kv("weight_rule", self.weight_rule.clone());
        if let Some(v) = &self.verified_optimum {
            kv("verified_optimum", opt(v));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// One row of the batch summary: averages over a group of instances.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupSummary {
    pub group: String,
    pub instances: usize,
    pub feasible: usize,
    /// Mean gap over instances that have a target and a feasible solution.
    pub avg_gap_pct: Option<f64>,
    pub avg_fnls_calls: f64,
    pub avg_generated_row_ratio_pct: f64,
}

/// Groups reports by [`group_name`] in first-seen order.
pub fn summarize(reports: &[SolveReport]) -> Vec<GroupSummary> {
    let mut groups: Vec<(String, Vec<&SolveReport>)> = Vec::new();
    for r in reports {
        let g = group_name(&r.instance);
        match groups.iter_mut().find(|(name, _)| *name == g) {
            Some((_, members)) => members.push(r),
            None => groups.push((g, vec![r])),
        }
    }
    groups
        .into_iter()
        .map(|(group, rs)| {
            let k = rs.len() as f64;
            let gaps: Vec<f64> = rs.iter().filter_map(|r| r.gap_pct).collect();
            GroupSummary {
                group,
                instances: rs.len(),
                feasible: rs.iter().filter(|r| r.feasible).count(),
                avg_gap_pct: (!gaps.is_empty()).then(|| gaps.iter().sum::<f64>() / gaps.len() as f64),
                avg_fnls_calls: rs.iter().map(|r| r.fnls_calls as f64).sum::<f64>() / k,
                avg_generated_row_ratio_pct: rs.iter().map(|r| r.generated_row_ratio_pct).sum::<f64>() / k,
            }
        })
        .collect()
}

/// Instance name with the trailing numbering removed, so `scpnrg1` and
/// `scpnrg5` share the group `scpnrg`.
pub fn group_name(instance: &str) -> String {
    let stem = instance.rsplit(['/', '\\']).next().unwrap_or(instance);
    let stem = stem.split('.').next().unwrap_or(stem);
    let trimmed = stem.trim_end_matches(|c: char| c.is_ascii_digit() || c == '-' || c == '_');
    if trimmed.is_empty() { stem } else { trimmed }.to_owned()
}

pub fn summary_table(groups: &[GroupSummary], errors: &[String]) -> String {
    let mut out = String::from("group\tinstances\tfeasible\tavg_gap_pct\tavg_fnls_calls\tavg_row_ratio_pct\n");
    for g in groups {
        let gap = g.avg_gap_pct.map_or_else(|| "none".to_owned(), |v| format!("{v:.2}"));
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{:.1}\t{:.2}",
            g.group, g.instances, g.feasible, gap, g.avg_fnls_calls, g.avg_generated_row_ratio_pct
        );
    }
    for e in errors {
        let _ = writeln!(out, "error\t{e}");
    }
    out
}
