use std::collections::BTreeMap;
use std::sync::Arc;

use super::blowup::BlowupP2;
use super::elliptic_model::EllipticModel;
use super::model::Model;
use super::noise::NoisyModel;
use super::product::P1xP1;
use super::projective::ProjectiveSpace;
use crate::elliptic::EllipticCurve;
use crate::error::{Error, Result};

/// Inputs a model factory may need.
#[derive(Debug, Clone)]
pub struct ModelParams {
    pub curve: Option<EllipticCurve>,
    /// Certified accuracy of canonical heights on the elliptic model.
    pub height_tol: f64,
    /// Amplitude of the bounded perturbation of every representative; 0 is off.
    pub noise: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            curve: None,
            height_tol: 1e-10,
            noise: 0.0,
        }
    }
}

pub type ModelFactory = Box<dyn Fn(&ModelParams) -> Result<Arc<dyn Model>> + Send + Sync>;

/// Model varieties registered by name and built at runtime.
pub struct ModelRegistry {
    factories: BTreeMap<String, ModelFactory>,
}

impl Default for ModelRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

impl ModelRegistry {
    pub fn empty() -> Self {
        ModelRegistry {
            factories: BTreeMap::new(),
        }
    }

    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        for n in 1..=3 {
            r.register(&format!("p{n}"), move |_| {
                Ok(Arc::new(ProjectiveSpace::new(n)?) as Arc<dyn Model>)
            });
        }
        r.register(P1xP1::NAME, |_| Ok(Arc::new(P1xP1::new()) as Arc<dyn Model>));
        r.register(BlowupP2::NAME, |_| Ok(Arc::new(BlowupP2::new()) as Arc<dyn Model>));
        r.register(EllipticModel::NAME, |params| {
            let curve = params.curve.clone().ok_or_else(|| {
                Error::InvalidCurve("the elliptic model needs a curve config".into())
            })?;
            Ok(Arc::new(EllipticModel::new(curve, params.height_tol)) as Arc<dyn Model>)
        });
        r
    }

    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn(&ModelParams) -> Result<Arc<dyn Model>> + Send + Sync + 'static,
    {
        self.factories.insert(name.to_string(), Box::new(factory));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    /// Builds the named model, wrapped in the noise perturbation when
    /// `params.noise > 0`.
    pub fn build(&self, name: &str, params: &ModelParams) -> Result<Arc<dyn Model>> {
        let factory = self
            .factories
            .get(name)
            .ok_or_else(|| Error::UnknownModel(name.to_string()))?;
        let model = factory(params)?;
        if params.noise > 0.0 {
            Ok(Arc::new(NoisyModel::new(model, params.noise)?))
        } else {
            Ok(model)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_registered() {
        let r = ModelRegistry::with_defaults();
        let names: Vec<&str> = r.names().collect();
        assert_eq!(names, vec!["blowup_p2", "elliptic", "p1", "p1xp1", "p2", "p3"]);
        let m = r.build("p1xp1", &ModelParams::default()).unwrap();
        assert_eq!(m.name(), "p1xp1");
        assert!(matches!(
            r.build("p4", &ModelParams::default()),
            Err(Error::UnknownModel(_))
        ));
        assert!(matches!(
            r.build("elliptic", &ModelParams::default()),
            Err(Error::InvalidCurve(_))
        ));
    }
}
