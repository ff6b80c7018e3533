use std::fmt;
use std::sync::Arc;

use crate::alpha::Alpha;
use crate::error::{domain, Result};
use crate::model::DispersionModel;

use super::geometry::BoxGeometry;

/// Energy of one 2-cycle `{x, y}`; must be symmetric in its arguments.
pub trait TwoCyclePotential: Send + Sync {
    fn energy(&self, x: &[f64], y: &[f64], geometry: &BoxGeometry) -> f64;
}

/// `2a/|x − y|` at minimum-image distance; `+∞` for coincident points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringLength {
    pub a: f64,
}

impl TwoCyclePotential for ScatteringLength {
    fn energy(&self, x: &[f64], y: &[f64], geometry: &BoxGeometry) -> f64 {
        let r = geometry.min_image_distance(x, y);
        if r == 0.0 {
            f64::INFINITY
        } else {
            2.0 * self.a / r
        }
    }
}

/// `H = Σ_i ξ_Λ(x_{π(i)} − x_i) + α N₂ + Σ_{2-cycles} V`.
#[derive(Clone)]
pub struct HamiltonianSpec {
    pub model: Arc<DispersionModel>,
    pub alpha: Alpha,
    two_body: Option<Arc<dyn TwoCyclePotential>>,
    pair_a: f64,
}

impl fmt::Debug for HamiltonianSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianSpec")
            .field("model", &self.model.kind())
            .field("alpha", &self.alpha)
            .field("pair_a", &self.pair_a)
            .field("two_body", &self.two_body.is_some())
            .finish()
    }
}

impl HamiltonianSpec {
    pub fn one_body(model: Arc<DispersionModel>) -> Self {
        Self {
            model,
            alpha: Alpha::ZERO,
            two_body: None,
            pair_a: 0.0,
        }
    }

    pub fn with_alpha(model: Arc<DispersionModel>, alpha: Alpha) -> Self {
        Self {
            alpha,
            ..Self::one_body(model)
        }
    }

    /// `alpha` and `pair_a` describe the same interaction; setting both is rejected.
    pub fn new(model: Arc<DispersionModel>, alpha: Alpha, pair_a: f64) -> Result<Self> {
        if !(pair_a >= 0.0 && pair_a.is_finite()) {
            return domain(format!(
                "pair_a must be nonnegative and finite, got {pair_a}"
            ));
        }
        if pair_a > 0.0 && !alpha.is_zero() {
            return domain("alpha and pair_a are mutually exclusive");
        }
        let two_body: Option<Arc<dyn TwoCyclePotential>> = if pair_a > 0.0 {
            Some(Arc::new(ScatteringLength { a: pair_a }))
        } else {
            None
        };
        Ok(Self {
            model,
            alpha,
            two_body,
            pair_a,
        })
    }

    /// Replaces the 2-cycle interaction with a user potential.
    pub fn with_custom_two_body(
        model: Arc<DispersionModel>,
        potential: Arc<dyn TwoCyclePotential>,
    ) -> Self {
        Self {
            model,
            alpha: Alpha::ZERO,
            two_body: Some(potential),
            pair_a: 0.0,
        }
    }

    pub fn pair_a(&self) -> f64 {
        self.pair_a
    }

    pub fn two_body(&self) -> Option<&dyn TwoCyclePotential> {
        self.two_body.as_deref()
    }
}
