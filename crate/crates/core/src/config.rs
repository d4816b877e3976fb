//! Structured text configs for orders and scenarios (TOML syntax).
//!
//! Order files either list explicit `generators` (integer matrices, row
//! lists or flat row-major) or name a `builder`:
//!
//! ```toml
//! builder = "mord"        # block order over the unramified quadratic ext
//! p = 2
//! precision = 4
//! ```
//!
//! `residual_preimage` takes `n` and `residual` matrices over `F_p`;
//! `block_triangular` takes `exponents`, `depth`, and `[[component]]`
//! tables (each itself an order config, inheriting `p`/`precision`);
//! `deep_lift` takes `depth` and a `[base]` table; `maximal` takes `n`.
//!
//! Scenario files:
//!
//! ```toml
//! group = [4]
//! [[place]]
//! label = "q"
//! frobenius = [1]
//! classes = [0, 2, 3]
//! modulus = 4
//! ```

use serde::Deserialize;

use crate::classfield::{AbelianGroup, GaloisScenario, Place, PlacePayload};
use crate::error::CoreError;
use crate::mat::Mat;
use crate::order::{
    build_block_triangular, build_maximal, build_mord, build_residual_preimage, deep_lift,
    LocalOrder,
};
use crate::ring::ModulusRing;

pub const DEFAULT_PRECISION: u32 = 4;

/// A matrix, as a list of rows or a flat row-major list.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Rows(Vec<Vec<i64>>),
    Flat(Vec<i64>),
}

impl MatrixSpec {
    fn to_mat(&self, ring: &ModulusRing, n: usize) -> Result<Mat<ModulusRing>, CoreError> {
        let flat: Vec<i64> = match self {
            MatrixSpec::Flat(v) => v.clone(),
            MatrixSpec::Rows(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(CoreError::Config(format!(
                        "key `generators`/`residual`: expected {n}x{n} matrix rows"
                    )));
                }
                rows.iter().flatten().copied().collect()
            }
        };
        if flat.len() != n * n {
            return Err(CoreError::Config(format!(
                "key `generators`/`residual`: expected {} entries, found {}",
                n * n,
                flat.len()
            )));
        }
        Ok(Mat::from_ints(ring.clone(), n, n, &flat))
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OrderConfig {
    pub builder: Option<String>,
    pub n: Option<usize>,
    pub p: Option<u64>,
    pub precision: Option<u32>,
    pub generators: Option<Vec<MatrixSpec>>,
    pub residual: Option<Vec<MatrixSpec>>,
    pub exponents: Option<Vec<u32>>,
    pub depth: Option<u32>,
    #[serde(rename = "component")]
    pub components: Option<Vec<OrderConfig>>,
    pub base: Option<Box<OrderConfig>>,
}

impl OrderConfig {
    pub fn parse(text: &str) -> Result<Self, CoreError> {
        toml::from_str(text).map_err(|e| CoreError::Config(e.to_string()))
    }

    pub fn build(&self) -> Result<LocalOrder, CoreError> {
        self.build_inheriting(None, None)
    }

    fn build_inheriting(
        &self,
        parent_p: Option<u64>,
        parent_precision: Option<u32>,
    ) -> Result<LocalOrder, CoreError> {
        let p = self
            .p
            .or(parent_p)
            .ok_or_else(|| CoreError::Config("key `p` is required".into()))?;
        let precision = self
            .precision
            .or(parent_precision)
            .unwrap_or(DEFAULT_PRECISION);
        let ring = ModulusRing::new(p, precision)?;

        match self.builder.as_deref() {
            None => {
                let n = self
                    .n
                    .ok_or_else(|| CoreError::Config("key `n` is required with explicit generators".into()))?;
                let specs = self
                    .generators
                    .as_ref()
                    .ok_or_else(|| CoreError::Config("key `generators` is required without a builder".into()))?;
                let gens: Vec<Mat<ModulusRing>> =
                    specs.iter().map(|s| s.to_mat(&ring, n)).collect::<Result<_, _>>()?;
                LocalOrder::close(ring, n, &gens)
            }
            Some("mord") => {
                if let Some(n) = self.n {
                    if n != 4 {
                        return Err(CoreError::Config(format!(
                            "key `n`: the mord builder fixes n = 4, found {n}"
                        )));
                    }
                }
                Ok(build_mord(ring))
            }
            Some("maximal") => {
                let n = self.n.ok_or_else(|| CoreError::Config("key `n` is required for builder `maximal`".into()))?;
                Ok(build_maximal(ring, n))
            }
            Some("residual_preimage") => {
                let n = self
                    .n
                    .ok_or_else(|| CoreError::Config("key `n` is required for builder `residual_preimage`".into()))?;
                let specs = self
                    .residual
                    .as_ref()
                    .ok_or_else(|| CoreError::Config("key `residual` is required for builder `residual_preimage`".into()))?;
                let res_ring = ModulusRing::new(p, 1)?;
                let gens: Vec<Mat<ModulusRing>> =
                    specs.iter().map(|s| s.to_mat(&res_ring, n)).collect::<Result<_, _>>()?;
                build_residual_preimage(ring, n, &gens)
            }
            Some("block_triangular") => {
                let comps = self
                    .components
                    .as_ref()
                    .ok_or_else(|| CoreError::Config("key `component` tables are required for builder `block_triangular`".into()))?;
                let built: Vec<LocalOrder> = comps
                    .iter()
                    .map(|c| c.build_inheriting(Some(p), Some(precision)))
                    .collect::<Result<_, _>>()?;
                let exponents = self.exponents.clone().unwrap_or_else(|| vec![0; built.len()]);
                let depth = self
                    .depth
                    .ok_or_else(|| CoreError::Config("key `depth` is required for builder `block_triangular`".into()))?;
                build_block_triangular(&built, &exponents, depth)
            }
            Some("deep_lift") => {
                let base = self
                    .base
                    .as_ref()
                    .ok_or_else(|| CoreError::Config("key `base` is required for builder `deep_lift`".into()))?;
                let depth = self
                    .depth
                    .ok_or_else(|| CoreError::Config("key `depth` is required for builder `deep_lift`".into()))?;
                let h = base.build_inheriting(Some(p), Some(precision))?;
                deep_lift(&h, depth)
            }
            Some(other) => Err(CoreError::Config(format!(
                "key `builder`: unknown builder `{other}` (expected mord, maximal, residual_preimage, block_triangular, or deep_lift)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaceConfig {
    pub label: Option<String>,
    pub frobenius: Vec<i64>,
    pub classes: Option<Vec<u64>>,
    pub modulus: Option<u64>,
    pub t: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub group: Vec<u64>,
    pub degree: Option<u64>,
    #[serde(rename = "place")]
    pub places: Vec<PlaceConfig>,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CoreError> {
        toml::from_str(text).map_err(|e| CoreError::Config(e.to_string()))
    }

    pub fn to_scenario(&self) -> Result<GaloisScenario, CoreError> {
        let group = AbelianGroup::new(self.group.clone())?;
        let mut degree = self.degree;
        let mut places = Vec::with_capacity(self.places.len());
        for (i, pc) in self.places.iter().enumerate() {
            let label = pc.label.clone().unwrap_or_else(|| format!("place{i}"));
            let frobenius = group.reduce(&pc.frobenius)?;
            let payload = match (&pc.classes, pc.t) {
                (Some(classes), None) => {
                    let modulus = pc.modulus.ok_or_else(|| {
                        CoreError::Config(format!(
                            "place {label}: key `modulus` is required with `classes`"
                        ))
                    })?;
                    if let Some(d) = degree {
                        if d != modulus {
                            return Err(CoreError::Config(format!(
                                "place {label}: key `modulus` = {modulus} differs from {d}"
                            )));
                        }
                    }
                    degree = Some(modulus);
                    // Class sets always contain the trivial class.
                    let mut set: std::collections::BTreeSet<u64> =
                        classes.iter().map(|&c| c % modulus).collect();
                    set.insert(0);
                    PlacePayload::Classes {
                        modulus,
                        classes: set,
                    }
                }
                (None, Some(t)) => PlacePayload::TInvariant(t),
                (Some(_), Some(_)) => {
                    return Err(CoreError::Config(format!(
                        "place {label}: keys `classes` and `t` are mutually exclusive"
                    )))
                }
                (None, None) => {
                    return Err(CoreError::Config(format!(
                        "place {label}: one of `classes` or `t` is required"
                    )))
                }
            };
            places.push(Place {
                label,
                frobenius,
                payload,
            });
        }
        GaloisScenario::new(group, degree.unwrap_or(1), places)
    }
}
