//! CSV emission and parsing of simulation traces. The column set is fixed:
//!
//! `t,z,y,y_m,e,phi_m,u,v,rho,k,sigma,eta_bar,src`
//!
//! Values are written in Rust's shortest round-trip decimal form, so parsing
//! the file back reproduces every f64 bit-exactly. `v` and `src` are empty
//! when the scenario has no integrator state or no source field.

use std::fmt::Write as _;

use anyhow::{anyhow, Context, Result};
use mfes_core::sim::{SimTrace, TraceRow};

pub const HEADER: &str = "t,z,y,y_m,e,phi_m,u,v,rho,k,sigma,eta_bar,src";

pub fn to_csv(trace: &SimTrace) -> String {
    let mut out = String::with_capacity(trace.rows.len() * 96 + HEADER.len() + 1);
    out.push_str(HEADER);
    out.push('\n');
    for r in &trace.rows {
        let _ = write!(out, "{},{},{},{},{},{},{},", r.t, r.z, r.y, r.y_m, r.e, r.phi_m, r.u);
        if let Some(v) = r.v {
            let _ = write!(out, "{v}");
        }
        let _ = write!(out, ",{},{},{},{},", r.rho, r.k, r.sigma, r.eta_bar);
        if let Some(s) = r.src {
            let _ = write!(out, "{s}");
        }
        out.push('\n');
    }
    out
}

fn field_f64(fields: &[&str], idx: usize, line: usize) -> Result<f64> {
    fields[idx]
        .parse::<f64>()
        .with_context(|| format!("line {line}: column {idx} is not a number"))
}

pub fn parse_csv(text: &str) -> Result<SimTrace> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| anyhow!("empty csv"))?;
    if header != HEADER {
        return Err(anyhow!("unexpected csv header `{header}`"));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 13 {
            return Err(anyhow!("line {}: expected 13 columns, got {}", i + 2, fields.len()));
        }
        let opt = |idx: usize| -> Result<Option<f64>> {
            if fields[idx].is_empty() {
                Ok(None)
            } else {
                Ok(Some(field_f64(&fields, idx, i + 2)?))
            }
        };
        rows.push(TraceRow {
            t: field_f64(&fields, 0, i + 2)?,
            z: field_f64(&fields, 1, i + 2)?,
            y: field_f64(&fields, 2, i + 2)?,
            y_m: field_f64(&fields, 3, i + 2)?,
            e: field_f64(&fields, 4, i + 2)?,
            phi_m: field_f64(&fields, 5, i + 2)?,
            u: field_f64(&fields, 6, i + 2)?,
            v: opt(7)?,
            rho: field_f64(&fields, 8, i + 2)?,
            k: fields[9]
                .parse::<u32>()
                .with_context(|| format!("line {}: bad k", i + 2))?,
            sigma: fields[10]
                .parse::<i8>()
                .with_context(|| format!("line {}: bad sigma", i + 2))?,
            eta_bar: field_f64(&fields, 11, i + 2)?,
            src: opt(12)?,
            eta_norm: None,
        });
    }
    Ok(SimTrace { rows })
}
