//! Suite parameters, read from TOML or assembled from command-line flags.

use std::path::Path;

use ffgcd_core::refinement::DEFAULT_PRODUCT_CAP;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{HResult, HarnessError};
use crate::gen::Q;

/// Everything that determines a generated suite. Two runs with equal specs
/// produce byte-identical reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InstanceSpec {
    pub suite: String,
    pub seed: u64,
    pub count: usize,
    /// Number of variables (or of terms, for unit equations).
    pub n: usize,
    /// Exponent of the d-th power statements; for the gcd suites the
    /// degree of `F` and `G` is drawn from `1..=degree_cap` instead.
    pub d: u32,
    pub degree_cap: u32,
    /// Largest absolute exponent of a place in a generated unit.
    pub height_cap: i64,
    pub ell_min: u64,
    pub ell_max: u64,
    /// Exact rational, written as `1/10` or `0.1`.
    pub eps: String,
    /// Heights of the evaluation point below which the gcd statements are
    /// recorded but not asserted.
    pub min_height: u64,
    /// Powers below which the statements at `g^ℓ` are not asserted.
    pub min_ell: u64,
    pub product_cap: usize,
    /// Truncation degree of the linear-forms construction.
    pub m: Option<usize>,
    pub r: usize,
    /// Upper end of the range searched for d-th power values.
    pub witness_cap: u64,
}

impl Default for InstanceSpec {
    fn default() -> Self {
        InstanceSpec {
            suite: String::new(),
            seed: 0,
            count: 10,
            n: 2,
            d: 2,
            degree_cap: 2,
            height_cap: 3,
            ell_min: 1,
            ell_max: 30,
            eps: "1/2".to_string(),
            min_height: 20,
            min_ell: 20,
            product_cap: DEFAULT_PRODUCT_CAP,
            m: None,
            r: 1,
            witness_cap: 60,
        }
    }
}

impl InstanceSpec {
    pub fn new(suite: &str, seed: u64, count: usize) -> Self {
        InstanceSpec { suite: suite.to_string(), seed, count, ..Self::default() }
    }

    pub fn from_toml(src: &str) -> HResult<Self> {
        let spec: Self = toml::from_str(src)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> HResult<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn eps_value(&self) -> HResult<Q> {
        parse_exact(&self.eps)
    }

    pub fn validate(&self) -> HResult<()> {
        let bad = |msg: &str| Err(HarnessError::Option(msg.to_string()));
        if self.n == 0 {
            return bad("n must be positive");
        }
        if self.degree_cap == 0 {
            return bad("degree_cap must be positive");
        }
        if self.height_cap <= 0 {
            return bad("height_cap must be positive");
        }
        if self.ell_min == 0 || self.ell_min > self.ell_max {
            return bad("need 1 <= ell_min <= ell_max");
        }
        if self.r == 0 {
            return bad("r must be positive");
        }
        if self.eps_value()?.is_negative() {
            return bad("eps must be nonnegative");
        }
        Ok(())
    }
}

/// Parses `3`, `-2/7` or a terminating decimal such as `0.125` exactly.
pub fn parse_exact(src: &str) -> HResult<Q> {
    let s = src.trim();
    let err = || HarnessError::Option(format!("not an exact rational: {src:?}"));
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let digits = format!("{int}{frac}");
        let numer: num_bigint::BigInt = digits.parse().map_err(|_| err())?;
        let denom = num_bigint::BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(Q::new(numer, denom));
    }
    s.parse::<Q>().map_err(|_| err())
}
