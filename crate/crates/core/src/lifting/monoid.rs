use crate::error::{Error, Result};
use crate::novikov::{ceil_key, common_denominator, grid_monoid, ExponentQ, TERM_CAP};

/// Elements `≤ bound` of the additive monoid generated by positive rationals,
/// ascending and starting at 0.
pub fn monoid_enumerate(gens: &[ExponentQ], bound: ExponentQ) -> Result<Vec<ExponentQ>> {
    if let Some(g) = gens.iter().find(|g| !g.is_positive()) {
        return Err(Error::BadGenerator(*g));
    }
    if bound.is_negative() {
        return Ok(Vec::new());
    }
    let d = common_denominator(gens.iter().copied().chain([bound]));
    let keys: Vec<i64> = gens.iter().map(|g| g.grid_key(d)).collect();
    // inclusive bound on the grid
    let limit = ceil_key(bound, d) + 1;
    Ok(grid_monoid(&keys, limit, TERM_CAP)?.into_iter().map(|k| ExponentQ::from_grid_key(k, d)).collect())
}

/// Whether `x` is a sum of generators (0 included).
pub fn monoid_contains(gens: &[ExponentQ], x: ExponentQ) -> Result<bool> {
    Ok(monoid_enumerate(gens, x)?.last() == Some(&x))
}
