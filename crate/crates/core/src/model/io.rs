//! Text formats for [`ResponseModel`] and [`GainLossProfile`].
//!
//! Response model:
//!
//! ```text
//! format = fibernoise-response 1
//! time_scale_s = 1e-13          # optional: t0 the dimensionless values refer to
//! electronic_fraction = 0.8
//! terms = 2
//! term = <F> <Omega> <Delta>    # repeated `terms` times, index 0 first
//! ```
//!
//! Gain/loss profile (curves are `flat <value>` or `table <n>` followed by
//! `n` `<curve>.sample = <Omega> <value>` rows in increasing Ω):
//!
//! ```text
//! format = fibernoise-profile 1
//! detuning_offset = 0
//! gain = flat 0.3
//! loss = table 2
//! loss.sample = -10 0.1
//! loss.sample = 10 0.2
//! dispersive = flat 0
//! ```

use std::fmt::Write as _;

use crate::kv::{self, fmt_f64, Entry, ParseError};

use super::{GainLossProfile, LorentzianTerm, ResponseModel, SampledCurve};

const RESPONSE_FORMAT: &str = "fibernoise-response 1";
const PROFILE_FORMAT: &str = "fibernoise-profile 1";

fn check_format(entries: &[Entry], expected: &str) -> Result<(), ParseError> {
    match entries.iter().find(|e| e.key == "format") {
        Some(e) if e.value == expected => Ok(()),
        Some(e) => Err(ParseError::new(
            e.line,
            format!("expected format `{expected}`, found `{}`", e.value),
        )),
        None => Err(ParseError::new(
            0,
            format!("missing `format = {expected}` line"),
        )),
    }
}

pub fn parse_response_model(text: &str) -> Result<ResponseModel, ParseError> {
    let entries = kv::parse(text)?;
    check_format(&entries, RESPONSE_FORMAT)?;
    let mut electronic = None;
    let mut declared = None;
    let mut time_scale = None;
    let mut terms = Vec::new();
    for e in &entries {
        if !e.section.is_empty() {
            return Err(ParseError::new(e.line, "response files have no sections"));
        }
        match e.key.as_str() {
            "format" => {}
            "electronic_fraction" => electronic = Some(e.parse::<f64>()?),
            "time_scale_s" => {
                let t: f64 = e.parse()?;
                if !(t.is_finite() && t > 0.0) {
                    return Err(ParseError::new(e.line, "time_scale_s must be positive"));
                }
                time_scale = Some(t);
            }
            "terms" => declared = Some((e.line, e.parse::<usize>()?)),
            "term" => {
                let v = e.floats()?;
                if v.len() != 3 {
                    return Err(ParseError::new(
                        e.line,
                        "term needs exactly three numbers: F Omega Delta",
                    ));
                }
                let term = LorentzianTerm::new(v[0], v[1], v[2])
                    .map_err(|err| ParseError::new(e.line, err.to_string()))?;
                terms.push(term);
            }
            other => return Err(ParseError::new(e.line, format!("unknown key `{other}`"))),
        }
    }
    let (line, count) = declared.ok_or_else(|| ParseError::new(0, "missing `terms` count"))?;
    if count != terms.len() {
        return Err(ParseError::new(
            line,
            format!("declared {count} terms but found {}", terms.len()),
        ));
    }
    let electronic =
        electronic.ok_or_else(|| ParseError::new(0, "missing `electronic_fraction`"))?;
    let mut model =
        ResponseModel::new(terms, electronic).map_err(|err| ParseError::new(0, err.to_string()))?;
    model.time_scale = time_scale;
    Ok(model)
}

/// Ten-term Lorentzian fit of the bundled fused-silica Raman gain curve,
/// in units of `t₀ = 100 fs`.
pub fn silica_response() -> ResponseModel {
    parse_response_model(include_str!("../../data/silica_response.model"))
        .expect("bundled silica model parses")
}

pub fn write_response_model(model: &ResponseModel, comments: &[&str]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "format = {RESPONSE_FORMAT}");
    if let Some(t) = model.time_scale {
        let _ = writeln!(out, "time_scale_s = {}", fmt_f64(t));
    }
    let _ = writeln!(
        out,
        "electronic_fraction = {}",
        fmt_f64(model.electronic_fraction)
    );
    let _ = writeln!(out, "terms = {}", model.lorentzians.len());
    for t in &model.lorentzians {
        let _ = writeln!(
            out,
            "term = {} {} {}",
            fmt_f64(t.strength),
            fmt_f64(t.center),
            fmt_f64(t.width)
        );
    }
    out
}

#[derive(Default)]
struct CurveBuilder {
    kind: Option<(usize, CurveKind)>,
    samples: Vec<(f64, f64)>,
}

enum CurveKind {
    Flat(f64),
    Table(usize),
}

impl CurveBuilder {
    fn finish(self, name: &str) -> Result<SampledCurve, ParseError> {
        match self.kind {
            None if self.samples.is_empty() => Ok(SampledCurve::Flat(0.0)),
            None => Err(ParseError::new(
                0,
                format!("`{name}.sample` rows without `{name} = table n`"),
            )),
            Some((line, CurveKind::Flat(v))) => {
                if !self.samples.is_empty() {
                    return Err(ParseError::new(
                        line,
                        format!("flat `{name}` cannot have samples"),
                    ));
                }
                if !v.is_finite() {
                    return Err(ParseError::new(line, format!("`{name}` must be finite")));
                }
                Ok(SampledCurve::Flat(v))
            }
            Some((line, CurveKind::Table(n))) => {
                if n != self.samples.len() {
                    return Err(ParseError::new(
                        line,
                        format!(
                            "`{name}` declares {n} samples, found {}",
                            self.samples.len()
                        ),
                    ));
                }
                SampledCurve::table(self.samples).map_err(|e| ParseError::new(line, e.to_string()))
            }
        }
    }
}

fn curve_kind(e: &Entry) -> Result<CurveKind, ParseError> {
    let mut parts = e.value.split_whitespace();
    let kind = parts.next().unwrap_or("");
    let arg = parts.next();
    if parts.next().is_some() {
        return Err(ParseError::new(
            e.line,
            "curve spec is `flat <v>` or `table <n>`",
        ));
    }
    match (kind, arg) {
        ("flat", Some(v)) => v
            .parse()
            .map(CurveKind::Flat)
            .map_err(|_| ParseError::new(e.line, format!("bad flat value `{v}`"))),
        ("table", Some(n)) => n
            .parse()
            .map(CurveKind::Table)
            .map_err(|_| ParseError::new(e.line, format!("bad sample count `{n}`"))),
        _ => Err(ParseError::new(
            e.line,
            "curve spec is `flat <v>` or `table <n>`",
        )),
    }
}

pub fn parse_profile(text: &str) -> Result<GainLossProfile, ParseError> {
    let entries = kv::parse(text)?;
    check_format(&entries, PROFILE_FORMAT)?;
    let mut curves: [CurveBuilder; 3] = Default::default();
    let names = ["gain", "loss", "dispersive"];
    let mut offset = 0.0;
    for e in &entries {
        if !e.section.is_empty() {
            return Err(ParseError::new(e.line, "profile files have no sections"));
        }
        if e.key == "format" {
            continue;
        }
        if e.key == "detuning_offset" {
            offset = e.parse()?;
            if !f64::is_finite(offset) {
                return Err(ParseError::new(e.line, "detuning_offset must be finite"));
            }
            continue;
        }
        let (name, is_sample) = match e.key.strip_suffix(".sample") {
            Some(n) => (n, true),
            None => (e.key.as_str(), false),
        };
        let idx = names
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| ParseError::new(e.line, format!("unknown key `{}`", e.key)))?;
        let b = &mut curves[idx];
        if is_sample {
            let v = e.floats()?;
            if v.len() != 2 {
                return Err(ParseError::new(e.line, "sample rows are `<Omega> <value>`"));
            }
            b.samples.push((v[0], v[1]));
        } else {
            if b.kind.is_some() {
                return Err(ParseError::new(e.line, format!("`{name}` given twice")));
            }
            b.kind = Some((e.line, curve_kind(e)?));
        }
    }
    let [g, l, d] = curves;
    GainLossProfile::new(
        g.finish("gain")?,
        l.finish("loss")?,
        d.finish("dispersive")?,
        offset,
    )
    .map_err(|err| ParseError::new(0, err.to_string()))
}

pub fn write_profile(profile: &GainLossProfile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "format = {PROFILE_FORMAT}");
    let _ = writeln!(
        out,
        "detuning_offset = {}",
        fmt_f64(profile.detuning_offset)
    );
    for (name, curve) in [
        ("gain", &profile.gain),
        ("loss", &profile.loss),
        ("dispersive", &profile.dispersive),
    ] {
        match curve {
            SampledCurve::Flat(v) => {
                let _ = writeln!(out, "{name} = flat {}", fmt_f64(*v));
            }
            SampledCurve::Table(pts) => {
                let _ = writeln!(out, "{name} = table {}", pts.len());
                for (x, y) in pts {
                    let _ = writeln!(out, "{name}.sample = {} {}", fmt_f64(*x), fmt_f64(*y));
                }
            }
        }
    }
    out
}
