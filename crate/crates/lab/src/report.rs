//! CSV tables. Every file has a header row; floats are written with 17
//! significant digits so they read back bit-exactly.

use std::fs::File;
use std::io;
use std::path::Path;

use csv::Writer;
use mhdlab_core::experiments::{
    DifferenceSeries, EnvelopeReport, Metric, SplitReport, SweepRecord, UniformityReport,
};
use mhdlab_core::lp::{BesovIndex, ConstantReport};
use mhdlab_core::solver::Diagnostics;

use crate::error::LabError;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Column label of a metric without commas, e.g. `H^2.5` or `B^2.1_4_2`.
pub fn metric_label(metric: &Metric) -> String {
    match metric {
        Metric::Sobolev(s) => format!("H^{s}"),
        Metric::Besov(idx) => format!("B^{}_{}_{}", idx.s, idx.p, idx.r),
    }
}

/// Creates `path` and hands a CSV writer on it to `body`.
pub fn to_file(
    path: &Path,
    body: impl FnOnce(&mut Writer<File>) -> Result<(), csv::Error>,
) -> Result<(), LabError> {
    let file = File::create(path).map_err(LabError::file(path))?;
    let mut w = Writer::from_writer(file);
    body(&mut w)?;
    w.flush().map_err(LabError::file(path))?;
    Ok(())
}

pub fn diagnostics<W: io::Write>(w: &mut Writer<W>, rows: &[Diagnostics]) -> csv::Result<()> {
    w.write_record([
        "t",
        "energy",
        "cross_helicity",
        "max_gradient",
        "dissipation",
        "divergence",
    ])?;
    for d in rows {
        w.write_record(
            [
                d.t,
                d.energy,
                d.cross_helicity,
                d.max_gradient,
                d.dissipation,
                d.divergence,
            ]
            .map(num),
        )?;
    }
    Ok(())
}

/// One row per member, then a `slope` row holding each metric's fitted
/// slope (empty when too few points survive the floor).
pub fn sweep<W: io::Write>(w: &mut Writer<W>, record: &SweepRecord) -> csv::Result<()> {
    let mut header = vec!["parameter".to_string(), "secondary".to_string()];
    header.extend(record.metrics.iter().map(metric_label));
    w.write_record(&header)?;
    for (i, (p, q)) in record.parameters.iter().zip(&record.secondary).enumerate() {
        let mut row = vec![num(*p), num(*q)];
        row.extend(record.errors.iter().map(|e| num(e[i])));
        w.write_record(&row)?;
    }
    let mut footer = vec!["slope".to_string(), String::new()];
    footer.extend((0..record.metrics.len()).map(|m| record.slope(m).map(num).unwrap_or_default()));
    w.write_record(&footer)
}

pub fn constants<W: io::Write>(w: &mut Writer<W>, report: &ConstantReport) -> csv::Result<()> {
    w.write_record(["inequality_id", "trial", "n", "ratio"])?;
    for row in &report.rows {
        w.write_record([
            row.inequality_id.name().to_string(),
            row.trial.to_string(),
            row.n.to_string(),
            num(row.ratio),
        ])?;
    }
    Ok(())
}

/// Per-inequality worst ratios at both resolutions.
pub fn constant_summary<W: io::Write>(
    w: &mut Writer<W>,
    reports: &[(String, BesovIndex, ConstantReport)],
) -> csv::Result<()> {
    w.write_record([
        "inequality_id",
        "s",
        "p",
        "r",
        "n",
        "max_ratio",
        "resolution_change",
    ])?;
    for (id, idx, report) in reports {
        for n in report.resolutions() {
            w.write_record([
                id.clone(),
                num(idx.s),
                num(idx.p),
                num(idx.r),
                n.to_string(),
                report.max_ratio(n).map(num).unwrap_or_default(),
                num(report.resolution_change()),
            ])?;
        }
    }
    Ok(())
}

pub fn uniformity<W: io::Write>(
    w: &mut Writer<W>,
    reports: &[UniformityReport],
) -> csv::Result<()> {
    w.write_record(["pair", "s", "p", "r", "eps", "constant", "ratio", "spread"])?;
    for (pair, report) in reports.iter().enumerate() {
        for row in &report.rows {
            w.write_record([
                pair.to_string(),
                num(report.index.s),
                num(report.index.p),
                num(report.index.r),
                num(row.eps),
                num(report.constant),
                num(row.ratio),
                num(report.spread()),
            ])?;
        }
    }
    Ok(())
}

pub fn norms<W: io::Write>(
    w: &mut Writer<W>,
    rows: &[(String, BesovIndex, f64)],
) -> csv::Result<()> {
    w.write_record(["field", "s", "p", "r", "norm"])?;
    for (field, idx, value) in rows {
        w.write_record([
            field.clone(),
            num(idx.s),
            num(idx.p),
            num(idx.r),
            num(*value),
        ])?;
    }
    Ok(())
}

/// Sup-in-time legs of each split, one row per split and metric.
pub fn split_summary<W: io::Write>(w: &mut Writer<W>, reports: &[SplitReport]) -> csv::Result<()> {
    w.write_record([
        "j",
        "metric",
        "viscous_tail",
        "middle",
        "ideal_tail",
        "total",
        "data_tail",
        "triangle_excess",
    ])?;
    for r in reports {
        for (m, metric) in r.total.metrics.iter().enumerate() {
            w.write_record([
                r.j.to_string(),
                metric_label(metric),
                num(r.viscous_tail.sup(m)),
                num(r.middle.sup(m)),
                num(r.ideal_tail.sup(m)),
                num(r.total.sup(m)),
                num(r.data_tail[m]),
                num(r.triangle_excess(m)),
            ])?;
        }
    }
    Ok(())
}

/// The four difference series of one split over time.
pub fn split_series<W: io::Write>(w: &mut Writer<W>, report: &SplitReport) -> csv::Result<()> {
    w.write_record([
        "t",
        "metric",
        "viscous_tail",
        "middle",
        "ideal_tail",
        "total",
    ])?;
    let legs: [&DifferenceSeries; 4] = [
        &report.viscous_tail,
        &report.middle,
        &report.ideal_tail,
        &report.total,
    ];
    for (m, metric) in report.total.metrics.iter().enumerate() {
        let columns = legs.map(|s| s.combined(m));
        for (i, t) in report.total.times.iter().enumerate() {
            let mut row = vec![num(*t), metric_label(metric)];
            row.extend(columns.iter().map(|c| num(c[i])));
            w.write_record(&row)?;
        }
    }
    Ok(())
}

pub fn envelope<W: io::Write>(w: &mut Writer<W>, report: &EnvelopeReport) -> csv::Result<()> {
    w.write_record([
        "t",
        "measured",
        "envelope",
        "exponent_integral",
        "elsasser_exponent_integral",
        "constant",
    ])?;
    let env = report.envelope();
    for i in 0..report.times.len() {
        w.write_record(
            [
                report.times[i],
                report.measured[i],
                env[i],
                report.b_integral[i],
                report.b_bar_integral[i],
                report.constant,
            ]
            .map(num),
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.02e23, -2.5e-300, f64::MIN_POSITIVE] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(0.1), "1.0000000000000001e-1");
    }

    #[test]
    fn labels_have_no_commas() {
        let idx = BesovIndex::new(2.1, 4.0, 2.0).unwrap();
        assert_eq!(metric_label(&Metric::Besov(idx)), "B^2.1_4_2");
        assert_eq!(metric_label(&Metric::Sobolev(2.5)), "H^2.5");
    }
}
