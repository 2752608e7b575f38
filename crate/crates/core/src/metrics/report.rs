use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{
    bbox_cost_md, bbox_cost_sd, count_sll_fo, count_sll_with, MetricsError, PlacementData,
    SllCountMode,
};
use crate::netlist::Netlist;
use crate::partition::DieAssignment;

const WIRE_DELAYS: &str = include_str!("../../data/wire_delays.csv");

/// A routing wire class with its representative delay.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WireDelay {
    pub wire: String,
    pub technology: String,
    pub scope: String,
    pub delay_ps: f64,
    pub track_percent: f64,
}

/// The bundled wire delay table.
pub fn wire_delays() -> Vec<WireDelay> {
    WIRE_DELAYS
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            WireDelay {
                wire: f[0].to_string(),
                technology: f[1].to_string(),
                scope: f[2].to_string(),
                delay_ps: f[3].parse().expect("bundled delay table is well formed"),
                track_percent: f[4].parse().expect("bundled delay table is well formed"),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub n_sll: usize,
    pub n_sll_fo: usize,
    pub rho: f64,
    pub lut_count: usize,
    pub bbox_sd: Option<Vec<f64>>,
    pub bbox_md: Option<f64>,
}

pub fn measure(
    netlist: &Netlist,
    assignment: &DieAssignment,
    placement: Option<&PlacementData>,
    mode: SllCountMode,
) -> Result<Metrics, MetricsError> {
    let n_sll = count_sll_with(netlist, assignment, mode)?;
    let n_sll_fo = count_sll_fo(netlist, assignment)?;
    let rho = assignment.imbalance(netlist).unwrap_or(0.0);
    let (bbox_sd, bbox_md) = match placement {
        Some(p) => {
            let sd = (0..assignment.num_dies() as u32)
                .map(|d| bbox_cost_sd(netlist, p, d))
                .collect::<Result<Vec<_>, _>>()?;
            (Some(sd), Some(bbox_cost_md(netlist, p, assignment)?))
        }
        None => (None, None),
    };
    Ok(Metrics {
        n_sll,
        n_sll_fo,
        rho,
        lut_count: netlist.lut_count(),
        bbox_sd,
        bbox_md,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub metric: String,
    pub before: f64,
    pub after: f64,
    pub delta: f64,
    /// Relative change in percent; absent when the baseline is zero.
    pub delta_pct: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub sll_count_mode: SllCountMode,
    pub before: Metrics,
    pub after: Metrics,
    pub rows: Vec<MetricRow>,
    /// Delay of one interposer link, for annotation only.
    pub interposer_delay_ps: Option<f64>,
}

impl MetricsReport {
    pub fn new(before: Metrics, after: Metrics, mode: SllCountMode) -> Self {
        let mut rows = Vec::new();
        let mut row = |metric: String, b: f64, a: f64| {
            rows.push(MetricRow {
                metric,
                before: b,
                after: a,
                delta: a - b,
                delta_pct: (b != 0.0).then(|| (a - b) / b * 100.0),
            })
        };
        row("n_sll".into(), before.n_sll as f64, after.n_sll as f64);
        row(
            "n_sll_fo".into(),
            before.n_sll_fo as f64,
            after.n_sll_fo as f64,
        );
        row("rho".into(), before.rho, after.rho);
        row(
            "lut_count".into(),
            before.lut_count as f64,
            after.lut_count as f64,
        );
        if let (Some(b), Some(a)) = (&before.bbox_sd, &after.bbox_sd) {
            for (d, (x, y)) in b.iter().zip(a).enumerate() {
                row(format!("bbox_sd[{d}]"), *x, *y);
            }
        }
        if let (Some(b), Some(a)) = (before.bbox_md, after.bbox_md) {
            row("bbox_md".into(), b, a);
        }
        let interposer_delay_ps = wire_delays()
            .into_iter()
            .find(|w| w.scope == "inter-die")
            .map(|w| w.delay_ps);
        MetricsReport {
            sll_count_mode: mode,
            before,
            after,
            rows,
            interposer_delay_ps,
        }
    }

    /// Measures both netlists and tabulates the change.
    pub fn compare(
        before: (&Netlist, &DieAssignment),
        after: (&Netlist, &DieAssignment),
        placement: Option<&PlacementData>,
        mode: SllCountMode,
    ) -> Result<Self, MetricsError> {
        let b = measure(before.0, before.1, placement, mode)?;
        let a = measure(after.0, after.1, placement, mode)?;
        Ok(Self::new(b, a, mode))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<12} {:>14} {:>14} {:>14} {:>9}",
            "metric", "before", "after", "delta", "delta%"
        );
        for r in &self.rows {
            let pct = r
                .delta_pct
                .map_or_else(|| "-".to_string(), |p| format!("{p:.2}"));
            let _ = writeln!(
                s,
                "{:<12} {:>14} {:>14} {:>14} {:>9}",
                r.metric,
                fmt_num(r.before),
                fmt_num(r.after),
                fmt_num(r.delta),
                pct
            );
        }
        if let Some(d) = self.interposer_delay_ps {
            let _ = writeln!(s, "interposer link delay: {d} ps per SLL");
        }
        s
    }
}

fn fmt_num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:.4}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delay_table_loads() {
        let t = wire_delays();
        assert_eq!(t.len(), 4);
        assert_eq!(t[3].wire, "L36");
        assert_eq!(t[3].delay_ps, 2223.7);
        assert_eq!(t[0].delay_ps, 76.2);
    }

    #[test]
    fn identical_metrics_give_zero_deltas() {
        let m = Metrics {
            n_sll: 3,
            n_sll_fo: 5,
            rho: 1.1,
            lut_count: 10,
            bbox_sd: None,
            bbox_md: None,
        };
        let r = MetricsReport::new(m.clone(), m, SllCountMode::PerDestinationDie);
        assert!(r.rows.iter().all(|row| row.delta == 0.0));
        let back: MetricsReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
