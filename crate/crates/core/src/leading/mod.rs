//! Level structure, adapted flag basis and leading term equations.

mod equations;
pub mod lattice;
mod levels;

pub use equations::{leading_equations, leading_equations_from_potential, LeadingEquation, LeadingSystem};
pub use levels::{flag_basis, level_structure, FlagBasis, Level, LevelStructure};

use crate::error::Result;
use crate::potential::PotentialFunction;

/// Rewrite every `y^v` of `f` as a monomial in the flag variables.
pub fn change_coords(f: &PotentialFunction, fb: &FlagBasis) -> Result<PotentialFunction> {
    let mut out = PotentialFunction::zero(fb.num_vars(), f.mode);
    for (v, c) in f.terms() {
        out.add_term(fb.coords(v)?, c.clone())?;
    }
    Ok(out)
}
