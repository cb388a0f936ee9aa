//! Log-concavity and unimodality of a pmf or of a likelihood ratio.

use std::fmt::Write as _;

use lifeorder::shape::{classify_logconcave, classify_steps, is_logconcave, likelihood_ratio, ShapeClass, ShapeTag, TIE_TOL};
use lifeorder::{families, FamilySpec, Result, NUMERIC_FLOOR};
use serde::Serialize;

use crate::report::describe_shape;
use crate::Settings;

#[derive(Debug, Clone, Serialize)]
pub struct SequenceShape {
    pub subject: String,
    /// Native value of the first entry.
    pub origin: i64,
    pub length: usize,
    /// `None` when some entry is zero or infinite.
    pub logconcave: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub logconcavity_violation: Option<i64>,
    pub shape: ShapeClass,
    /// Classification from the first and last successive ratios, for
    /// log-concave sequences outside the guard band.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_test: Option<ShapeClass>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn at(positions: &[i64], class: ShapeClass) -> ShapeClass {
    let map = |i: usize| positions[i] as usize;
    ShapeClass {
        mode: class.mode.map(map),
        plateau: class.plateau.map(|(a, b)| (map(a), map(b))),
        witnesses: class.witnesses.iter().map(|&w| map(w)).collect(),
        ..class
    }
}

/// `positions[i]` is the native value carrying `values[i]`.
fn analyse(subject: String, positions: &[i64], values: &[f64]) -> Result<SequenceShape> {
    let mut notes = Vec::new();
    let shape = if values.len() < 2 {
        ShapeClass { tag: ShapeTag::Constant, mode: None, plateau: None, witnesses: Vec::new(), trimmed_tail: None }
    } else {
        classify_steps(values, TIE_TOL)
    };
    let positive = values.iter().all(|v| *v > 0.0 && v.is_finite());
    let (logconcave, violation, ratio_test) = if positive && !values.is_empty() {
        let lc = is_logconcave(values, TIE_TOL)?;
        let ratio_test = if lc.holds && values.len() >= 2 {
            let r = classify_logconcave(values)?;
            if r.is_none() {
                notes.push("a boundary ratio lies within the guard band".to_string());
            }
            r.map(|c| at(positions, c))
        } else {
            None
        };
        (Some(lc.holds), lc.first_violation.map(|j| positions[j]), ratio_test)
    } else {
        notes.push("sequence has zero or infinite entries".to_string());
        (None, None, None)
    };
    Ok(SequenceShape {
        subject,
        origin: positions.first().copied().unwrap_or(0),
        length: values.len(),
        logconcave,
        logconcavity_violation: violation,
        shape: at(positions, shape),
        ratio_test,
        notes,
    })
}

/// Shape of the pmf over its resolved support.
pub fn pmf_shape(spec: &FamilySpec, settings: &Settings) -> Result<SequenceShape> {
    let p = families::truncate_within(spec, settings.tail_tol, 0, Some(settings.max_n))?;
    let values: Vec<f64> = p.probs().iter().copied().take_while(|v| *v > NUMERIC_FLOOR).collect();
    let origin = p.origin_shift() as i64;
    let positions: Vec<i64> = (0..values.len() as i64).map(|i| i + origin).collect();
    analyse(format!("pmf of {spec}"), &positions, &values)
}

/// Shape of `l(x) = f_X(x)/f_Y(x)` over the common resolved range.
pub fn ratio_shape(x: &FamilySpec, y: &FamilySpec, settings: &Settings) -> Result<SequenceShape> {
    let (px, py) = families::truncate_pair(x, y, settings.tail_tol, Some(settings.max_n))?;
    let ratio = likelihood_ratio(&px, &py)?;
    let (xs, values) = ratio.shape_points();
    let origin = px.origin_shift() as i64;
    let positions: Vec<i64> = xs.iter().map(|&i| i as i64 + origin).collect();
    analyse(format!("l(x) = f_X/f_Y for X = {x}, Y = {y}"), &positions, &values)
}

impl SequenceShape {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.subject);
        let _ = writeln!(out, "  entries      {} from x = {}", self.length, self.origin);
        let lc = match self.logconcave {
            Some(true) => "yes".to_string(),
            Some(false) => format!("no (first violation at x = {})", self.logconcavity_violation.unwrap_or(-1)),
            None => "undefined".to_string(),
        };
        let _ = writeln!(out, "  log-concave  {lc}");
        let _ = writeln!(out, "  shape        {}", describe_shape(&self.shape));
        if let Some(r) = &self.ratio_test {
            let _ = writeln!(out, "  ratio test   {}", describe_shape(r));
        }
        for n in &self.notes {
            let _ = writeln!(out, "  note: {n}");
        }
        out
    }
}
