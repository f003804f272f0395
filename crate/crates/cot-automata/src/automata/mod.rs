pub mod pfsa;
pub mod ppda;
pub mod ptm;
pub mod twopda;

pub use pfsa::{Path, Pfsa, PfsaTransition};
pub use ppda::{Ppda, PpdaTransition};
pub use ptm::{ptm_step, ptm_truncated_distribution, Direction, Ptm, PtmConfiguration, PtmTransition};
pub use twopda::{TwoPda, TwoPdaTransition};

use crate::error::{Error, Result};

pub(crate) fn state_index(states: &[String]) -> Result<std::collections::HashMap<String, usize>> {
    let mut m = std::collections::HashMap::new();
    for (i, s) in states.iter().enumerate() {
        if m.insert(s.clone(), i).is_some() {
            return Err(Error::Invalid(format!("duplicate state `{s}`")));
        }
    }
    Ok(m)
}
