//! Ext charts: the bigraded dimension tables read off a minimal
//! resolution, with rendering to JSON, a text grid, and a static SVG in
//! Adams chart coordinates (stem = t - s on the x-axis, filtration s on
//! the y-axis).
//!
//! Entries omitted from the JSON are zero inside the window and unknown
//! outside it. Generator labels are advisory metadata attached by degree
//! matching; they are never used in computation.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChartError {
    #[error("chart JSON malformed: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartEntry {
    pub dim: usize,
    pub labels: Vec<String>,
}

/// Dimensions (and advisory labels) of `Ext^{s,t}` over a certified
/// window `s <= max_s`, `t <= max_t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtChart {
    pub p: u32,
    pub module: String,
    pub max_s: i32,
    pub max_t: i64,
    pub entries: BTreeMap<(i32, i64), ChartEntry>,
}

#[derive(Serialize, Deserialize)]
struct ChartEntryJson {
    s: i32,
    t: i64,
    dim: usize,
    labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct ChartJson {
    p: u32,
    module: String,
    max_s: i32,
    max_t: i64,
    entries: Vec<ChartEntryJson>,
}

impl ExtChart {
    pub fn dim(&self, s: i32, t: i64) -> usize {
        self.entries.get(&(s, t)).map_or(0, |e| e.dim)
    }

    /// True when `(s, t)` lies inside the certified window.
    pub fn in_window(&self, s: i32, t: i64) -> bool {
        s >= 0 && s <= self.max_s && t >= 0 && t <= self.max_t
    }

    pub fn to_json_string(&self) -> String {
        let entries = self
            .entries
            .iter()
            .filter(|(_, e)| e.dim > 0)
            .map(|(&(s, t), e)| ChartEntryJson {
                s,
                t,
                dim: e.dim,
                labels: e.labels.clone(),
            })
            .collect();
        let j = ChartJson {
            p: self.p,
            module: self.module.clone(),
            max_s: self.max_s,
            max_t: self.max_t,
            entries,
        };
        serde_json::to_string_pretty(&j).expect("chart serialization cannot fail")
    }

    pub fn from_json_str(s: &str) -> Result<ExtChart, ChartError> {
        let j: ChartJson =
            serde_json::from_str(s).map_err(|e| ChartError::Malformed(e.to_string()))?;
        let mut entries = BTreeMap::new();
        for e in j.entries {
            entries.insert(
                (e.s, e.t),
                ChartEntry {
                    dim: e.dim,
                    labels: e.labels,
                },
            );
        }
        Ok(ExtChart {
            p: j.p,
            module: j.module,
            max_s: j.max_s,
            max_t: j.max_t,
            entries,
        })
    }

    /// Text grid: rows are filtrations (top row = max_s), columns stems.
    pub fn to_text_grid(&self) -> String {
        let max_stem = self.max_t - self.max_s as i64;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "Ext chart for {} at p = {} (s <= {}, t <= {})",
            self.module, self.p, self.max_s, self.max_t
        );
        for s in (0..=self.max_s).rev() {
            let _ = write!(out, "s={s:>2} |");
            for stem in 0..=max_stem {
                let d = self.dim(s, stem + s as i64);
                if d == 0 {
                    let _ = write!(out, " .");
                } else if d < 10 {
                    let _ = write!(out, " {d}");
                } else {
                    let _ = write!(out, " *");
                }
            }
            let _ = writeln!(out);
        }
        let _ = write!(out, "      ");
        for stem in 0..=max_stem {
            let _ = write!(out, " {}", if stem % 10 == 0 { "|" } else { " " });
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "      stems 0..{max_stem} (marks every 10)");
        out
    }

    /// Static SVG Adams chart: one dot per basis element, labels beside
    /// the dots where present.
    pub fn to_svg(&self) -> String {
        let max_stem = (self.max_t - self.max_s as i64).max(0);
        let cell = 28i64;
        let margin = 46i64;
        let width = margin * 2 + cell * (max_stem + 1);
        let height = margin * 2 + cell * (self.max_s as i64 + 1);
        let sx = |stem: i64| margin + stem * cell;
        let sy = |s: i32| height - margin - (s as i64) * cell;
        let mut out = String::new();
        let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
        );
        let _ = writeln!(
            out,
            r#"<rect width="{width}" height="{height}" fill="white"/>"#
        );
        // axes ticks
        for stem in (0..=max_stem).step_by(5) {
            let x = sx(stem);
            let _ = writeln!(
                out,
                r##"<text x="{x}" y="{}" font-size="10" text-anchor="middle" fill="#555">{stem}</text>"##,
                height - margin + 16
            );
        }
        for s in 0..=self.max_s {
            let y = sy(s) + 4;
            let _ = writeln!(
                out,
                r##"<text x="{}" y="{y}" font-size="10" text-anchor="end" fill="#555">{s}</text>"##,
                margin - 12
            );
        }
        for (&(s, t), e) in &self.entries {
            if e.dim == 0 {
                continue;
            }
            let stem = t - s as i64;
            if stem < 0 || stem > max_stem {
                continue;
            }
            let x0 = sx(stem);
            let y = sy(s);
            // spread multiple dots horizontally inside the cell
            for k in 0..e.dim {
                let dx = if e.dim == 1 {
                    0
                } else {
                    (k as i64) * 8 - (e.dim as i64 - 1) * 4
                };
                let _ = writeln!(
                    out,
                    r#"<circle cx="{}" cy="{y}" r="3" fill="black"/>"#,
                    x0 + dx
                );
            }
            if !e.labels.is_empty() {
                let _ = writeln!(
                    out,
                    r##"<text x="{}" y="{}" font-size="9" fill="#900">{}</text>"##,
                    x0 + 5,
                    y - 5,
                    e.labels.join("=")
                );
            }
        }
        let _ = writeln!(out, "</svg>");
        out
    }
}

/// Names for sphere chart entries in filtrations 0..2, matched by internal
/// degree. The two degree-`p^{i+1}q` families are aliases of one entry.
pub fn sphere_labels(p: u32, s: i32, t: i64) -> Vec<String> {
    let p = p as i64;
    let q = 2 * (p - 1);
    let mut labels = Vec::new();
    match s {
        0 => {
            if t == 0 {
                labels.push("1".into());
            }
        }
        1 => {
            if t == 1 {
                labels.push("a_0".into());
            }
            let mut i = 0;
            let mut d = q;
            while d <= t {
                if d == t {
                    labels.push(format!("h_{i}"));
                }
                i += 1;
                d *= p;
            }
        }
        2 => {
            if t == 2 {
                labels.push("a_0^2".into());
            }
            if t == 2 * q + 1 {
                labels.push("alpha_2".into());
            }
            let mut pi = p; // p^i for i >= 1
            let mut i = 1;
            while pi * q < t {
                if pi * q + 1 == t {
                    labels.push(format!("a_0h_{i}"));
                }
                i += 1;
                pi *= p;
            }
            let mut pi = 1;
            let mut i = 0;
            while pi * q <= t {
                if pi * (p + 2) * q == t {
                    labels.push(format!("g_{i}"));
                }
                if pi * (2 * p + 1) * q == t {
                    labels.push(format!("k_{i}"));
                }
                if pi * p * q == t {
                    labels.push(format!("b_{i}"));
                    labels.push(format!("e_{i}"));
                }
                i += 1;
                pi *= p;
            }
            // h_i h_j for j >= i + 2
            let mut pi = 1;
            let mut i = 0u32;
            while pi * q < t {
                let mut pj = pi * p * p;
                let mut j = i + 2;
                while (pi + pj) * q <= t {
                    if (pi + pj) * q == t {
                        labels.push(format!("h_{i}h_{j}"));
                    }
                    j += 1;
                    pj *= p;
                }
                i += 1;
                pi *= p;
            }
        }
        _ => {}
    }
    labels
}
