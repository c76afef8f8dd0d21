//! CSV, Markdown and JSON rendering of the runner tables.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::experiment::OutputFormat;
use crate::runner::{AlphaTable, IterationTable, ModeResult, OutlierTable};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Report {
    Iterations(IterationTable),
    Outliers(OutlierTable),
    Alpha(AlphaTable),
}

impl Report {
    /// Every row converged (or was analyzed) without a flag.
    pub fn ok(&self) -> bool {
        match self {
            Report::Iterations(t) => t.all_converged(),
            Report::Outliers(t) => t.all_ok(),
            Report::Alpha(t) => t.all_converged(),
        }
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => Ok(serde_json::to_string_pretty(self)? + "\n"),
            OutputFormat::Csv => csv_table(self.columns()),
            OutputFormat::Markdown => Ok(self.markdown()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn markdown(&self) -> String {
        let (title, tag) = match self {
            Report::Iterations(t) => (format!("Iterations, coefficient {}", t.coefficient), &t.tag),
            Report::Outliers(t) => (format!("Outliers, coefficient {}", t.coefficient), &t.tag),
            Report::Alpha(t) => (format!("Shift study, coefficient {}", t.coefficient), &t.tag),
        };
        let mut out = format!("### {title}");
        if let Some(tag) = tag {
            let _ = write!(out, " ({tag})");
        }
        out.push_str("\n\n");
        let (header, rows) = self.markdown_cells();
        let _ = writeln!(out, "| {} |", header.join(" | "));
        let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
        for r in rows {
            let _ = writeln!(out, "| {} |", r.join(" | "));
        }
        out
    }

    fn markdown_cells(&self) -> (Vec<String>, Vec<Vec<String>>) {
        match self {
            Report::Iterations(t) => {
                let mut header = vec!["n".to_string()];
                for m in &t.modes {
                    let m = m.name();
                    header.extend([format!("{m} outer"), format!("{m} PCG"), format!("{m} PGMRES")]);
                }
                header.push("flags".into());
                let rows = t
                    .rows
                    .iter()
                    .map(|r| {
                        let mut cells = vec![r.n.to_string()];
                        cells.extend(mode_cells(&r.results, t.modes.len()));
                        cells.push(r.flags.join("; "));
                        cells
                    })
                    .collect();
                (header, rows)
            }
            Report::Outliers(t) => {
                let mut header = vec!["n".to_string()];
                for pencil in ["Re", "Im"] {
                    header.push(format!("{pencil} min"));
                    header.push(format!("{pencil} max"));
                    for d in &t.radii {
                        header.push(format!("{pencil} m-/m+/p (δ={d})"));
                    }
                }
                header.extend(["‖E‖₂".into(), "‖E‖∞".into(), "‖E‖∞/h²".into(), "flags".into()]);
                let rows = t
                    .rows
                    .iter()
                    .map(|r| {
                        let mut cells = vec![r.n.to_string()];
                        match &r.spectra {
                            Some(s) => {
                                for p in [&s.re, &s.im] {
                                    cells.push(sci(p.min));
                                    cells.push(sci(p.max));
                                    for c in &p.outliers {
                                        cells.push(format!("{} / {} / {}%", c.below, c.above, pct(c.percent)));
                                    }
                                }
                            }
                            None => cells.extend(std::iter::repeat_n(String::new(), 2 * (2 + t.radii.len()))),
                        }
                        for v in [r.e_norm_2, r.e_norm_inf, r.e_ratio] {
                            cells.push(v.map(sci).unwrap_or_default());
                        }
                        cells.push(r.flags.join("; "));
                        cells
                    })
                    .collect();
                (header, rows)
            }
            Report::Alpha(t) => {
                let mut header: Vec<String> =
                    ["n", "α*", "λmin", "λmax", "κ", "σ(α*)"].iter().map(|s| s.to_string()).collect();
                for m in &t.modes {
                    header.push(format!("{} outer α=1", m.name()));
                    header.push(format!("{} outer α*", m.name()));
                }
                header.push("flags".into());
                let rows = t
                    .rows
                    .iter()
                    .map(|r| {
                        let mut cells = vec![r.n.to_string()];
                        match &r.estimate {
                            Some(e) => cells.extend([
                                format!("{:.4}", e.alpha_star),
                                sci(e.lambda_min),
                                sci(e.lambda_max),
                                format!("{:.3}", e.kappa),
                                format!("{:.4}", e.sigma_star),
                            ]),
                            None => cells.extend(std::iter::repeat_n(String::new(), 5)),
                        }
                        for k in 0..t.modes.len() {
                            cells.push(r.at_one.get(k).map(|m| m.outer.to_string()).unwrap_or_default());
                            cells.push(r.at_star.get(k).map(|m| m.outer.to_string()).unwrap_or_default());
                        }
                        cells.push(r.flags.join("; "));
                        cells
                    })
                    .collect();
                (header, rows)
            }
        }
    }

    /// Flat, machine-oriented columns for CSV.
    fn columns(&self) -> (Vec<String>, Vec<Vec<String>>) {
        match self {
            Report::Iterations(t) => {
                let mut header: Vec<String> = vec!["label".into(), "n".into(), "h".into()];
                for m in &t.modes {
                    let m = m.name().to_ascii_lowercase();
                    for c in ["alpha", "outer", "pcg_avg", "pcg_total", "pgmres_avg", "pgmres_total", "converged"] {
                        header.push(format!("{m}_{c}"));
                    }
                }
                header.push("flags".into());
                let rows = t
                    .rows
                    .iter()
                    .map(|r| {
                        let mut cells = vec![r.label.clone(), r.n.to_string(), num(r.h)];
                        for k in 0..t.modes.len() {
                            match r.results.get(k) {
                                Some(m) => cells.extend([
                                    num(m.alpha),
                                    m.outer.to_string(),
                                    format!("{:.1}", m.cg_avg),
                                    m.cg_total.to_string(),
                                    format!("{:.1}", m.gmres_avg),
                                    m.gmres_total.to_string(),
                                    m.converged.to_string(),
                                ]),
                                None => cells.extend(std::iter::repeat_n(String::new(), 7)),
                            }
                        }
                        cells.push(r.flags.join("; "));
                        cells
                    })
                    .collect();
                (header, rows)
            }
            Report::Outliers(t) => {
                let mut header: Vec<String> = vec!["label".into(), "n".into(), "h".into()];
                for p in ["re", "im"] {
                    header.push(format!("{p}_min"));
                    header.push(format!("{p}_max"));
                    for d in &t.radii {
                        for c in ["below", "above", "percent"] {
                            header.push(format!("{p}_{c}_{d}"));
                        }
                    }
                }
                header.extend(["e_norm_2", "e_norm_inf", "e_ratio", "flags"].map(String::from));
                let rows = t
                    .rows
                    .iter()
                    .map(|r| {
                        let mut cells = vec![r.label.clone(), r.n.to_string(), num(r.h)];
                        match &r.spectra {
                            Some(s) => {
                                for p in [&s.re, &s.im] {
                                    cells.push(num(p.min));
                                    cells.push(num(p.max));
                                    for c in &p.outliers {
                                        cells.extend([c.below.to_string(), c.above.to_string(), num(c.percent)]);
                                    }
                                }
                            }
                            None => cells.extend(std::iter::repeat_n(String::new(), 2 * (2 + 3 * t.radii.len()))),
                        }
                        for v in [r.e_norm_2, r.e_norm_inf, r.e_ratio] {
                            cells.push(v.map(num).unwrap_or_default());
                        }
                        cells.push(r.flags.join("; "));
                        cells
                    })
                    .collect();
                (header, rows)
            }
            Report::Alpha(t) => {
                let mut header: Vec<String> =
                    ["label", "n", "alpha_star", "lambda_min", "lambda_max", "kappa", "sigma_star", "lanczos_steps"]
                        .map(String::from)
                        .to_vec();
                for m in &t.modes {
                    let m = m.name().to_ascii_lowercase();
                    header.push(format!("{m}_outer_alpha_one"));
                    header.push(format!("{m}_outer_alpha_star"));
                }
                header.push("flags".into());
                let rows = t
                    .rows
                    .iter()
                    .map(|r| {
                        let mut cells = vec![r.label.clone(), r.n.to_string()];
                        match &r.estimate {
                            Some(e) => cells.extend([
                                num(e.alpha_star),
                                num(e.lambda_min),
                                num(e.lambda_max),
                                num(e.kappa),
                                num(e.sigma_star),
                                e.steps.to_string(),
                            ]),
                            None => cells.extend(std::iter::repeat_n(String::new(), 6)),
                        }
                        for k in 0..t.modes.len() {
                            cells.push(r.at_one.get(k).map(|m| m.outer.to_string()).unwrap_or_default());
                            cells.push(r.at_star.get(k).map(|m| m.outer.to_string()).unwrap_or_default());
                        }
                        cells.push(r.flags.join("; "));
                        cells
                    })
                    .collect();
                (header, rows)
            }
        }
    }
}

fn mode_cells(results: &[ModeResult], modes: usize) -> Vec<String> {
    let mut cells = Vec::with_capacity(3 * modes);
    for k in 0..modes {
        match results.get(k) {
            Some(m) => {
                let outer = if m.converged { m.outer.to_string() } else { format!("{}*", m.outer) };
                cells.extend([outer, m.cg_cell(), m.gmres_cell()]);
            }
            None => cells.extend(std::iter::repeat_n(String::new(), 3)),
        }
    }
    cells
}

fn csv_table((header, rows): (Vec<String>, Vec<Vec<String>>)) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::io("<csv buffer>", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Shortest round-trip representation.
fn num(v: f64) -> String {
    format!("{v:?}")
}

/// Three significant digits with a signed two-digit exponent: `9.99e-01`.
pub fn sci(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v:.2e}");
    }
    let s = format!("{v:.2e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let e: i32 = exp.parse().expect("integer exponent");
    format!("{mant}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
}

fn pct(p: f64) -> String {
    let r = (p * 10.0).round() / 10.0;
    if r.fract() == 0.0 {
        format!("{r:.0}")
    } else {
        format!("{r:.1}")
    }
}
