//! Plain-text convergence reports: a `#` header followed by one row per step
//! size.
//!
//! ```text
//! # laser-magnus convergence report
//! # problem: ex1
//! # scheme: S2+OMF76
//! # grid: 150
//! # knots: 3
//! # reference: S2+OMF85 with 3200 steps
//! # commit: 0ea35ed
//! # threads: 4
//! # slope: 6.02
//! # steps h error wall_seconds fft_passes
//! 25 0.04 4.53e-5 0.0012 300
//! ```
//!
//! Floats are written in shortest round-trip form, so parsing a report gives
//! back the same numbers bit for bit.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{HarnessError, Result};
use crate::study::{ConvergenceReport, ConvergenceRow, ReportMeta};

const TITLE: &str = "# laser-magnus convergence report";
const COLUMNS: &str = "# steps h error wall_seconds fft_passes";

pub fn write_report(report: &ConvergenceReport, out: &mut impl Write) -> std::io::Result<()> {
    let m = &report.meta;
    let grid: Vec<String> = m.grid.iter().map(ToString::to_string).collect();
    writeln!(out, "{TITLE}")?;
    writeln!(out, "# problem: {}", m.problem)?;
    writeln!(out, "# scheme: {}", m.scheme)?;
    writeln!(out, "# grid: {}", grid.join("x"))?;
    writeln!(out, "# knots: {}", m.knots)?;
    writeln!(out, "# reference: {}", m.reference)?;
    writeln!(out, "# commit: {}", m.commit)?;
    writeln!(out, "# threads: {}", m.threads)?;
    match report.slope {
        Some(s) => writeln!(out, "# slope: {s}")?,
        None => writeln!(out, "# slope: none")?,
    }
    writeln!(out, "{COLUMNS}")?;
    for r in &report.rows {
        writeln!(out, "{} {} {} {} {}", r.steps, r.h, r.error, r.wall_seconds, r.fft_passes)?;
    }
    Ok(())
}

/// File name of a report, with characters that are awkward in paths replaced.
pub fn file_name(meta: &ReportMeta) -> String {
    let clean = |s: &str| -> String {
        s.chars()
            .map(|c| if c.is_ascii_alphanumeric() || "+-_@.".contains(c) { c } else { '_' })
            .collect()
    };
    format!("{}_{}.dat", clean(&meta.problem), clean(&meta.scheme))
}

/// Writes one file per report into `dir`, creating it if needed.
pub fn emit_reports(reports: &[ConvergenceReport], dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    reports
        .iter()
        .map(|r| {
            let path = dir.join(file_name(&r.meta));
            let io = |e| HarnessError::io(&path, e);
            let mut f = std::io::BufWriter::new(std::fs::File::create(&path).map_err(io)?);
            write_report(r, &mut f).map_err(io)?;
            f.flush().map_err(io)?;
            Ok(path)
        })
        .collect()
}

pub fn parse_report(text: &str, path: &Path) -> Result<ConvergenceReport> {
    let fail = |line: usize, reason: String| HarnessError::Format {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut fields = std::collections::HashMap::new();
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let line = line.trim();
        if line.is_empty() || line == TITLE || line == COLUMNS {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            let (key, value) = header
                .split_once(':')
                .ok_or_else(|| fail(n, format!("header line '{line}' has no 'key: value'")))?;
            fields.insert(key.trim().to_string(), (n, value.trim().to_string()));
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.len() != 5 {
            return Err(fail(n, format!("expected 5 columns, found {}", words.len())));
        }
        let bad = |w: &str| fail(n, format!("'{w}' is not a number"));
        rows.push(ConvergenceRow {
            steps: words[0].parse().map_err(|_| bad(words[0]))?,
            h: words[1].parse().map_err(|_| bad(words[1]))?,
            error: words[2].parse().map_err(|_| bad(words[2]))?,
            wall_seconds: words[3].parse().map_err(|_| bad(words[3]))?,
            fft_passes: words[4].parse().map_err(|_| bad(words[4]))?,
        });
    }
    let mut get = |key: &str| {
        fields
            .remove(key)
            .ok_or_else(|| fail(0, format!("missing header '{key}'")))
    };
    let number = |(n, v): (usize, String)| v.parse::<usize>().map_err(|_| fail(n, format!("'{v}' is not an integer")));
    let problem = get("problem")?.1;
    let scheme = get("scheme")?.1;
    let (gn, gv) = get("grid")?;
    let grid = gv
        .split('x')
        .map(|w| w.parse::<usize>().map_err(|_| fail(gn, format!("bad grid '{gv}'"))))
        .collect::<Result<_>>()?;
    let knots = number(get("knots")?)?;
    let reference = get("reference")?.1;
    let commit = get("commit")?.1;
    let threads = number(get("threads")?)?;
    let (sn, sv) = get("slope")?;
    let slope = match sv.as_str() {
        "none" => None,
        s => Some(s.parse::<f64>().map_err(|_| fail(sn, format!("bad slope '{s}'")))?),
    };
    Ok(ConvergenceReport {
        meta: ReportMeta {
            problem,
            scheme,
            grid,
            knots,
            reference,
            commit,
            threads,
        },
        rows,
        slope,
    })
}

pub fn read_report(path: &Path) -> Result<ConvergenceReport> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_report(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> ReportMeta {
        ReportMeta {
            problem: "ex3".into(),
            scheme: "MaStBM4+my table@5".into(),
            grid: vec![64, 64],
            knots: 5,
            reference: "S2+OMF85 with 800 steps".into(),
            commit: "unknown".into(),
            threads: 3,
        }
    }

    #[test]
    fn header_only_report() {
        let r = ConvergenceReport {
            meta: meta(),
            rows: vec![],
            slope: None,
        };
        let mut buf = Vec::new();
        write_report(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().all(|l| l.starts_with('#')));
        assert_eq!(parse_report(&text, Path::new("r.dat")).unwrap(), r);
        assert_eq!(file_name(&r.meta), "ex3_MaStBM4+my_table@5.dat");
    }

    #[test]
    fn malformed_reports() {
        let p = Path::new("r.dat");
        let err = parse_report("# problem: ex1\n1 2 3\n", p).unwrap_err();
        assert!(matches!(err, HarnessError::Format { line: 2, .. }), "{err}");
        assert!(parse_report("# problem: ex1\n", p).is_err());
    }
}
