//! `lr.csv`, `sratio.csv` and `mrldiff.csv` for a pair, on the native support.

use std::fmt::Write as _;
use std::path::Path;

use lifeorder::measures::mrl_curve;
use lifeorder::shape::{likelihood_ratio, survival_ratio};
use lifeorder::{families, FamilySpec, Result};

use crate::{fmt_f64, Settings};

pub const HEADER: &str = "x,value,abs_error\n";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveFiles {
    pub lr: String,
    pub sratio: String,
    pub mrldiff: String,
}

fn push_row(out: &mut String, x: i64, value: f64, err: f64) {
    let _ = writeln!(out, "{x},{},{}", fmt_f64(value), fmt_f64(err));
}

pub fn curves(x: &FamilySpec, y: &FamilySpec, settings: &Settings) -> Result<CurveFiles> {
    let (px, py) = families::truncate_pair(x, y, settings.tail_tol, Some(settings.max_n))?;
    let origin = px.origin_shift() as i64;
    let eps = 4.0 * f64::EPSILON;

    let mut lr = String::from(HEADER);
    let ratio = likelihood_ratio(&px, &py)?;
    for (i, &v) in ratio.values.iter().enumerate() {
        let err = if v.is_finite() { v * eps } else { 0.0 };
        push_row(&mut lr, i as i64 + origin, v, err);
    }

    let mut sratio = String::from(HEADER);
    let (values, errors) = survival_ratio(&px, &py)?;
    for (i, (&v, &e)) in values.iter().zip(&errors).enumerate() {
        push_row(&mut sratio, i as i64 + origin, v, e);
    }

    // m_Y - m_X from x = -1 in internal indexing
    let mut mrldiff = String::from(HEADER);
    let (mx, my) = (mrl_curve(&px), mrl_curve(&py));
    for ((x, vx, ex), (_, vy, ey)) in mx.points().zip(my.points()) {
        push_row(&mut mrldiff, x + origin, vy - vx, ex + ey);
    }

    Ok(CurveFiles { lr, sratio, mrldiff })
}

pub fn write_files(dir: &Path, files: &CurveFiles) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("lr.csv"), &files.lr)?;
    std::fs::write(dir.join("sratio.csv"), &files.sratio)?;
    std::fs::write(dir.join("mrldiff.csv"), &files.mrldiff)
}

/// `(x, value)` pairs from one of the CSV bodies.
pub fn parse_column(csv: &str) -> Vec<(i64, f64)> {
    csv.lines()
        .skip(1)
        .filter_map(|line| {
            let mut it = line.split(',');
            let x = it.next()?.parse().ok()?;
            let v = it.next()?.parse().ok()?;
            Some((x, v))
        })
        .collect()
}
