use rayon::prelude::*;

use super::{check_step, classify_fiber, ClassifyOptions, FiberReport};
use crate::error::{Error, Result};
use crate::novikov::ExponentQ;
use crate::toric::{vertices, MomentPolytope};

/// Restriction of a scan to the hyperplane `u_axis = value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Row {
    pub axis: usize,
    pub value: ExponentQ,
}

impl Row {
    /// Parse `u2=3/10` (1-based axis).
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("row must look like u2=3/10, got `{s}`"));
        let (lhs, rhs) = s.split_once('=').ok_or_else(bad)?;
        let axis: usize = lhs.trim().strip_prefix('u').ok_or_else(bad)?.parse().map_err(|_| bad())?;
        if axis == 0 {
            return Err(bad());
        }
        Ok(Row { axis: axis - 1, value: rhs.trim().parse()? })
    }
}

/// Interior points of `p` whose coordinates are multiples of `step`, in
/// lexicographic order.
pub fn grid_points(p: &MomentPolytope, step: ExponentQ, row: Option<Row>) -> Result<Vec<Vec<ExponentQ>>> {
    check_step(step)?;
    if let Some(r) = row {
        if r.axis >= p.n {
            return Err(Error::DimensionMismatch { expected: p.n, got: r.axis + 1 });
        }
    }
    let vs = vertices(p);
    if vs.is_empty() {
        return Err(Error::InvalidPolytope("no vertices".into()));
    }
    let ranges: Vec<Vec<ExponentQ>> = (0..p.n)
        .map(|j| {
            if let Some(r) = row.filter(|r| r.axis == j) {
                return vec![r.value];
            }
            let lo = vs.iter().map(|v| v.point[j]).min().expect("nonempty");
            let hi = vs.iter().map(|v| v.point[j]).max().expect("nonempty");
            let k0 = (lo.ratio() / step.ratio()).ceil().to_integer();
            let k1 = (hi.ratio() / step.ratio()).floor().to_integer();
            (k0..=k1).map(|k| step.mul_int(k)).collect()
        })
        .collect();
    let mut points = vec![Vec::new()];
    for r in &ranges {
        points = points
            .into_iter()
            .flat_map(|pre| {
                r.iter().map(move |x| {
                    let mut v = pre.clone();
                    v.push(*x);
                    v
                })
            })
            .collect();
    }
    let mut out = Vec::new();
    for u in points {
        if p.is_interior(&u)? {
            out.push(u);
        }
    }
    Ok(out)
}

/// Classify every interior grid point, in parallel, reports in grid order.
pub fn scan(p: &MomentPolytope, step: ExponentQ, row: Option<Row>, opts: &ClassifyOptions) -> Result<Vec<FiberReport>> {
    let pts = grid_points(p, step, row)?;
    pts.par_iter().map(|u| classify_fiber(p, u, opts)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanSummary {
    pub total: usize,
    pub balanced: Vec<Vec<ExponentQ>>,
    /// Maximal runs of consecutive balanced grid points along the last
    /// coordinate, as `(other coordinates, first, last)`.
    pub intervals: Vec<(Vec<ExponentQ>, ExponentQ, ExponentQ)>,
}

impl ScanSummary {
    pub fn new(reports: &[FiberReport], step: ExponentQ) -> Self {
        ScanSummary {
            total: reports.len(),
            balanced: reports.iter().filter(|r| r.status.is_balanced()).map(|r| r.u.clone()).collect(),
            intervals: row_intervals(reports, step, 0),
        }
    }
}

/// Runs of consecutive balanced points along coordinate `axis`, grouped by
/// the remaining coordinates.
pub fn row_intervals(reports: &[FiberReport], step: ExponentQ, axis: usize) -> Vec<(Vec<ExponentQ>, ExponentQ, ExponentQ)> {
    let mut pts: Vec<(Vec<ExponentQ>, ExponentQ)> = reports
        .iter()
        .filter(|r| r.status.is_balanced())
        .map(|r| {
            let mut rest = r.u.clone();
            let x = rest.remove(axis);
            (rest, x)
        })
        .collect();
    pts.sort();
    let mut out: Vec<(Vec<ExponentQ>, ExponentQ, ExponentQ)> = Vec::new();
    for (rest, x) in pts {
        match out.last_mut() {
            Some((r, _, hi)) if *r == rest && *hi + step == x => *hi = x,
            _ => out.push((rest, x, x)),
        }
    }
    out
}
