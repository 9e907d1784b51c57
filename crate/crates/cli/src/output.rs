use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use clap::ValueEnum;
use ppclab_core::discrepancy::WitnessSide;
use ppclab_core::json::{fmt_sig17, to_json_string};
use ppclab_core::prooflab::ProofReport;
use ppclab_core::{f_estimate, ppc_statistic, BoundCheck, DiscrepancyReport, PairCountTable};
use serde::Serialize;

use crate::Failure;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn json<T: Serialize>(value: &T) -> String {
    to_json_string(value).expect("report types serialize")
}

#[derive(Serialize)]
struct PpcRow {
    s: usize,
    count: u64,
    r_stat: f64,
    poisson_target: u64,
    deviation: f64,
}

#[derive(Serialize)]
struct PpcOutput {
    n: usize,
    s_max: usize,
    k: usize,
    f_value: f64,
    f_arg_s: usize,
    rows: Vec<PpcRow>,
}

pub fn ppc(table: &PairCountTable, k: usize, format: Format) -> Result<String, Failure> {
    let f = f_estimate(table, k)?;
    let mut rows = Vec::with_capacity(table.s_max());
    for s in 1..=table.s_max() {
        rows.push(PpcRow {
            s,
            count: table.count(s).unwrap_or_default(),
            r_stat: ppc_statistic(table, s)?,
            poisson_target: 2 * s as u64,
            deviation: table.deviation(s)?,
        });
    }
    Ok(match format {
        Format::Json => json(&PpcOutput {
            n: table.n(),
            s_max: table.s_max(),
            k,
            f_value: f.value,
            f_arg_s: f.arg_s,
            rows,
        }),
        Format::Csv => {
            let mut out = String::from("s,count,r_stat,poisson_target,deviation\n");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.s,
                    r.count,
                    fmt_sig17(r.r_stat),
                    r.poisson_target,
                    fmt_sig17(r.deviation)
                );
            }
            out
        }
    })
}

fn side(s: WitnessSide) -> &'static str {
    match s {
        WitnessSide::Left => "left",
        WitnessSide::Right => "right",
    }
}

pub fn discrepancy(r: &DiscrepancyReport, format: Format) -> String {
    match format {
        Format::Json => json(r),
        Format::Csv => format!(
            "n,d_star,n_d_star,witness_a,witness_side\n{},{},{},{},{}\n",
            r.n,
            fmt_sig17(r.d_star),
            fmt_sig17(r.n_d_star),
            fmt_sig17(r.witness_a),
            side(r.witness_side)
        ),
    }
}

#[derive(Serialize)]
struct BoundOutput<'a> {
    #[serde(flatten)]
    check: &'a BoundCheck,
    verdict: &'static str,
}

pub fn bound(c: &BoundCheck, format: Format) -> String {
    match format {
        Format::Json => json(&BoundOutput {
            check: c,
            verdict: c.verdict(),
        }),
        Format::Csv => format!(
            "n,k,f_value,h_value,d_star,n_d_star,satisfied,k_feasible,verdict\n{},{},{},{},{},{},{},{},{}\n",
            c.n,
            c.k,
            fmt_sig17(c.f_value),
            fmt_sig17(c.h_value),
            fmt_sig17(c.d_star),
            fmt_sig17(c.n_d_star),
            c.satisfied,
            c.k_feasible,
            c.verdict()
        ),
    }
}

pub fn proof(r: &ProofReport, format: Format) -> String {
    match format {
        Format::Json => json(r),
        Format::Csv => {
            let mut out = String::from("name,lhs,rhs,relation,holds,guaranteed\n");
            for l in &r.identities {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    l.name,
                    fmt_sig17(l.lhs),
                    fmt_sig17(l.rhs),
                    l.relation,
                    l.holds,
                    l.guaranteed
                );
            }
            out
        }
    }
}

/// Writes to `out` through a temporary file in the same directory, or to
/// standard output.
pub fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    let io = |e: std::io::Error, p: &Path| Failure::Io(p.to_path_buf(), e);
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| io(e, Path::new("<stdout>")))
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io(e, path))?;
            tmp.write_all(text.as_bytes()).map_err(|e| io(e, path))?;
            tmp.persist(path).map_err(|e| io(e.error, path))?;
            Ok(())
        }
    }
}
