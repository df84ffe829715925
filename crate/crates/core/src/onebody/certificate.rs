use serde::{Deserialize, Serialize};

use crate::operators::GridSpec;

pub const LATTICE_CAVEAT: &str = "lattice e0 is computed on a band-limited periodic space, which is not a \
subspace of compactly supported smooth functions; it approximates the continuum e0 but is not a certified \
upper bound for it";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BindingCertificate {
    pub e0: f64,
    pub tolerance: f64,
    /// `e0 + tolerance < 0`, strictly.
    pub binding_positive: bool,
    /// `-(e0 + tolerance)` when binding is certified, else 0.
    pub lower_bound: f64,
    pub grids: Vec<GridSpec>,
    pub caveat: String,
}

/// Turns a lattice `e0` and its error budget into a binding statement.
pub fn binding_certificate(e0: f64, tol: f64) -> BindingCertificate {
    let shifted = e0 + tol;
    let binding_positive = shifted < 0.0;
    BindingCertificate {
        e0,
        tolerance: tol,
        binding_positive,
        lower_bound: if binding_positive { -shifted } else { 0.0 },
        grids: Vec::new(),
        caveat: LATTICE_CAVEAT.to_string(),
    }
}

impl BindingCertificate {
    pub fn with_grids(mut self, grids: impl IntoIterator<Item = GridSpec>) -> Self {
        self.grids.extend(grids);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hydrogen_like_value() {
        let c = binding_certificate(-0.5, 1e-3);
        assert!(c.binding_positive);
        assert!((c.lower_bound - 0.499).abs() < 1e-15);
    }

    #[test]
    fn positive_and_boundary() {
        assert!(!binding_certificate(0.2, 1e-3).binding_positive);
        let c = binding_certificate(0.0, 0.0);
        assert!(!c.binding_positive);
        assert_eq!(c.lower_bound, 0.0);
    }
}
