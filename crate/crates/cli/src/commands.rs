//! One function per subcommand. Each returns the process exit code.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use bref::bell::{chained_chsh_parity, chsh_pair, mermin_numeric, mermin_value};
use bref::correlations::{pair_correlation_analytic, pair_correlation_numeric};
use bref::measurements::povm_for;
use bref::search::{default_cap, maximize_chained_chsh, quadratic_fit, scan_rows, ScanRecord};
use bref::{Direction, Frame, HalfInt, VIOLATION_EPS};
use serde::{Deserialize, Serialize};

use crate::cache::{canonical_key, Cache};
use crate::error::{CliError, CliResult};
use crate::format::{fmt12, round12, Format, Report};

fn emit(text: &str) -> CliResult<()> {
    io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e))
}

fn frame_label(f: Frame) -> String {
    f.to_string()
}

pub fn chsh(j1: HalfInt, j2: HalfInt, curve: Option<usize>, format: Format) -> CliResult<i32> {
    let r = chsh_pair(j1, j2)?;
    let mut report = Report::default();
    report
        .push("j1", j1.to_string())
        .push("j2", j2.to_string())
        .push("value", r.value)
        .push("bound", r.bound)
        .push("violated", r.violated);
    if let Some(x) = r.cross_check {
        report.push("cross_check", x);
    }
    let Some(k) = curve else {
        emit(&report.render(format))?;
        return Ok(0);
    };
    // the curve owns stdout; the summary moves to stderr
    eprint!("{}", report.render(Format::Text));
    let mut out = String::from("theta,e_analytic,e_numeric\n");
    for i in 0..k {
        let theta = if k == 1 { 0.0 } else { PI * i as f64 / (k - 1) as f64 };
        let a = pair_correlation_analytic(j1, j2, theta);
        let n = pair_correlation_numeric(Frame::Finite(j1), Frame::Finite(j2), theta)?;
        out.push_str(&format!("{},{},{}\n", fmt12(theta), fmt12(a), fmt12(n)));
    }
    emit(&out)?;
    Ok(0)
}

pub fn mermin(frames: Vec<Frame>, format: Format) -> CliResult<i32> {
    if frames.is_empty() {
        return Err(CliError::Usage("no parties given".into()));
    }
    let finite: Option<Vec<HalfInt>> = frames.iter().map(|f| f.finite()).collect();
    let (r, method) = match finite {
        Some(js) => (mermin_value(&js)?, "closed-form"),
        None => (mermin_numeric(&frames)?, "numeric"),
    };
    let labels: Vec<String> = frames.iter().map(|&f| frame_label(f)).collect();
    let mut report = Report::default();
    report
        .push("parties", frames.len())
        .push("frames", labels.join(" "))
        .push("value", r.value)
        .push("bound", r.bound)
        .push("violated", r.violated)
        .push("method", method);
    if let Some(x) = r.cross_check {
        report.push("cross_check", x);
    }
    emit(&report.render(format))?;
    Ok(0)
}

pub fn peres(j_s: HalfInt, frame: Frame, dtheta: Option<f64>, format: Format) -> CliResult<i32> {
    let (dt, value) = match dtheta {
        Some(dt) => (dt, chained_chsh_parity(j_s, frame, dt)?.value),
        None => maximize_chained_chsh(j_s, frame)?,
    };
    let mut report = Report::default();
    report
        .push("j_s", j_s.to_string())
        .push("j_rf", frame_label(frame))
        .push("dtheta", dt)
        .push("value", value)
        .push("bound", 2.0)
        .push("violated", value > 2.0 + VIOLATION_EPS);
    emit(&report.render(format))?;
    Ok(0)
}

#[derive(Serialize)]
struct PovmJson {
    two_j_rf: Option<i64>,
    two_j_s: i64,
    theta: f64,
    phi: f64,
    outcomes: Vec<OutcomeJson>,
}

#[derive(Serialize)]
struct OutcomeJson {
    two_m: i64,
    /// Rows of `[re, im]` entries.
    matrix: Vec<Vec<[f64; 2]>>,
}

pub fn povm(frame: Frame, j_s: HalfInt, theta: f64, phi: f64, out: Option<&Path>) -> CliResult<i32> {
    let dir = Direction::new(theta, phi)?;
    let povm = povm_for(frame, j_s, dir)?;
    let outcomes = povm
        .outcomes()
        .iter()
        .map(|e| {
            let m = e.op.matrix();
            let matrix = (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| [round12(m[(r, c)].re), round12(m[(r, c)].im)]).collect())
                .collect();
            OutcomeJson { two_m: e.m.twice(), matrix }
        })
        .collect();
    let doc = PovmJson {
        two_j_rf: frame.finite().map(|j| j.twice()),
        two_j_s: j_s.twice(),
        theta: round12(dir.theta()),
        phi: round12(dir.phi()),
        outcomes,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable POVM");
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e))?,
        None => emit(&text)?,
    }
    Ok(0)
}

pub const SCAN_HEADER: [&str; 4] = ["two_js", "two_jrf_min", "delta_theta_opt", "s_max"];

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub enum CachedRow {
    Found(ScanRecord),
    NotFound { two_j_s: i64, best_s: f64 },
}

pub fn scan_row_key(j_s: HalfInt, cap: HalfInt) -> String {
    canonical_key(
        "scan-row",
        &[("two_js", j_s.twice().to_string()), ("two_cap", cap.twice().to_string()), ("eps", VIOLATION_EPS.to_string())],
    )
}

pub fn scan(js_max: HalfInt, out: &Path, resume: bool, cache: &Cache) -> CliResult<i32> {
    if js_max.twice() < 1 {
        return Err(CliError::Usage(format!("--js-max must be at least 1/2, got {js_max}")));
    }
    // open the output before the long computation so a bad path fails fast
    let file = File::create(out).map_err(|e| CliError::io(out, e))?;
    let spins: Vec<HalfInt> = (1..=js_max.twice()).map(HalfInt::from_twice).collect();
    let mut rows: Vec<Option<CachedRow>> = spins
        .iter()
        .map(|&j| if resume { cache.get(&scan_row_key(j, default_cap(j))) } else { None })
        .collect();
    let cached: Vec<bool> = rows.iter().map(Option::is_some).collect();
    let missing: Vec<HalfInt> = spins.iter().zip(&rows).filter(|(_, r)| r.is_none()).map(|(&j, _)| j).collect();
    let mut fresh = scan_rows(&missing).into_iter();
    for (slot, &j) in rows.iter_mut().zip(&spins) {
        if slot.is_some() {
            continue;
        }
        let row = match fresh.next().expect("one result per missing row") {
            Ok(rec) => CachedRow::Found(rec),
            Err(bref::Error::NotFoundBelowCap { best_s, .. }) => CachedRow::NotFound { two_j_s: j.twice(), best_s },
            Err(e) => return Err(e.into()),
        };
        cache.put(&scan_row_key(j, default_cap(j)), &row)?;
        *slot = Some(row);
    }

    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file);
    let csv_err = |e: csv::Error| CliError::Csv { path: out.to_path_buf(), source: e };
    writer.write_record(SCAN_HEADER).map_err(csv_err)?;
    let mut not_found = 0;
    for ((row, &j), was_cached) in rows.iter().flatten().zip(&spins).zip(cached) {
        let origin = if was_cached { "cached" } else { "computed" };
        match row {
            CachedRow::Found(r) => {
                eprintln!("j_S={j} j_RF_min={} S={} ({origin})", r.j_rf_min(), fmt12(r.s_max));
                writer
                    .write_record([
                        r.two_j_s.to_string(),
                        r.two_j_rf_min.to_string(),
                        fmt12(r.delta_theta_opt),
                        fmt12(r.s_max),
                    ])
                    .map_err(csv_err)?;
            }
            CachedRow::NotFound { two_j_s, best_s } => {
                not_found += 1;
                eprintln!("warning: j_S={j}: no violation up to j_RF={} (best S={}) ({origin})", default_cap(j), fmt12(*best_s));
                writer
                    .write_record([two_j_s.to_string(), String::new(), String::new(), fmt12(*best_s)])
                    .map_err(csv_err)?;
            }
        }
    }
    writer.flush().map_err(|e| CliError::io(out, e))?;
    Ok(if not_found > 0 { 1 } else { 0 })
}

/// Scan records from a CSV written by `scan`; rows without a boundary are
/// skipped.
pub fn read_scan_csv(path: &Path) -> CliResult<Vec<ScanRecord>> {
    let csv_err = |e: csv::Error| CliError::Csv { path: path.to_path_buf(), source: e };
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers().map_err(csv_err)?.clone();
    if headers.iter().collect::<Vec<_>>() != SCAN_HEADER {
        return Err(CliError::Usage(format!("{}: expected header {}", path.display(), SCAN_HEADER.join(","))));
    }
    let mut out = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if rec.get(1).unwrap_or("").is_empty() {
            continue;
        }
        let bad = |field: &str| CliError::Usage(format!("{}: row {}: bad {field}", path.display(), line + 2));
        let int = |i: usize, name: &str| rec.get(i).and_then(|s| s.parse::<i64>().ok()).ok_or_else(|| bad(name));
        let real = |i: usize, name: &str| rec.get(i).and_then(|s| s.parse::<f64>().ok()).ok_or_else(|| bad(name));
        out.push(ScanRecord {
            two_j_s: int(0, "two_js")?,
            two_j_rf_min: int(1, "two_jrf_min")?,
            delta_theta_opt: real(2, "delta_theta_opt")?,
            s_max: real(3, "s_max")?,
        });
    }
    Ok(out)
}

pub fn fit(input: &PathBuf, format: Format) -> CliResult<i32> {
    let records = read_scan_csv(input)?;
    let fit = quadratic_fit(&records)?;
    let mut report = Report::default();
    report
        .push("points", records.len())
        .push("a", fit.a)
        .push("b", fit.b)
        .push("rms_residual", fit.rms_residual);
    if let Some(c) = fit.cubic {
        report.push("cubic", c);
    }
    emit(&report.render(format))?;
    Ok(0)
}
