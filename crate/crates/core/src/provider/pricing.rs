//! Token pricing, the usage ledger, and the per-dialogue cost estimate.
//!
//! Money is held as integer nanodollars so that ledger totals are exact and
//! independent of summation order (parallel call recording must not perturb
//! the reported cost).

use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Currency amount in nanodollars (1e-9 USD).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Money(pub i64);

impl Money {
    pub fn from_dollars(d: f64) -> Self {
        Money((d * 1e9).round() as i64)
    }

    pub fn as_dollars(&self) -> f64 {
        self.0 as f64 / 1e9
    }
}

impl std::ops::Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl std::fmt::Display for Money {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "${:.6}", self.as_dollars())
    }
}

/// Prefix-cache-aware token rates, in dollars per million tokens.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PricingModel {
    pub input_miss_per_mtok: f64,
    pub input_hit_per_mtok: f64,
    pub output_per_mtok: f64,
}

impl PricingModel {
    pub fn free() -> Self {
        PricingModel { input_miss_per_mtok: 0.0, input_hit_per_mtok: 0.0, output_per_mtok: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [self.input_miss_per_mtok, self.input_hit_per_mtok, self.output_per_mtok];
        if rates.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
            return Err(Error::Config("pricing rates must be finite and >= 0".into()));
        }
        if self.input_hit_per_mtok > self.input_miss_per_mtok {
            return Err(Error::Config(
                "cache-hit input rate must not exceed the miss rate".into(),
            ));
        }
        Ok(())
    }

    /// Nanodollars per token at the given rate (dollars per MTok).
    fn nanos_per_token(rate_per_mtok: f64) -> i64 {
        // $/MTok → n$/token: rate * 1e9 / 1e6.
        (rate_per_mtok * 1e3).round() as i64
    }

    /// Exact integer cost of one call.
    pub fn call_cost(&self, input_tokens: u64, cache_hit: bool, output_tokens: u64) -> Money {
        let in_rate = if cache_hit { self.input_hit_per_mtok } else { self.input_miss_per_mtok };
        let nanos = input_tokens as i64 * Self::nanos_per_token(in_rate)
            + output_tokens as i64 * Self::nanos_per_token(self.output_per_mtok);
        Money(nanos)
    }
}

/// One provider call as accounted by the ledger.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct UsageRecord {
    pub input_tokens: u64,
    pub cache_hit: bool,
    pub output_tokens: u64,
    pub cost: Money,
}

/// Thread-safe running account of provider usage and cost.
pub struct UsageLedger {
    pricing: PricingModel,
    inner: Mutex<LedgerInner>,
}

#[derive(Default)]
struct LedgerInner {
    records: Vec<UsageRecord>,
    total: Money,
}

impl UsageLedger {
    pub fn new(pricing: PricingModel) -> Self {
        UsageLedger { pricing, inner: Mutex::new(LedgerInner::default()) }
    }

    pub fn record(&self, input_tokens: u64, cache_hit: bool, output_tokens: u64) -> Money {
        let cost = self.pricing.call_cost(input_tokens, cache_hit, output_tokens);
        let mut inner = self.inner.lock().unwrap();
        inner.records.push(UsageRecord { input_tokens, cache_hit, output_tokens, cost });
        inner.total = inner.total + cost;
        inner.total
    }

    pub fn total_cost(&self) -> Money {
        self.inner.lock().unwrap().total
    }

    pub fn call_count(&self) -> usize {
        self.inner.lock().unwrap().records.len()
    }

    pub fn records(&self) -> Vec<UsageRecord> {
        self.inner.lock().unwrap().records.clone()
    }

    pub fn pricing(&self) -> PricingModel {
        self.pricing
    }
}

/// Estimated cost of one generated dialogue: the first turn pays the
/// cache-miss input rate, every later turn the hit rate, and all turns pay
/// for output.
pub fn estimate_dialogue_cost(
    turns: u32,
    input_tokens_per_turn: u64,
    output_tokens_per_turn: u64,
    pricing: &PricingModel,
) -> Result<Money> {
    if turns == 0 || input_tokens_per_turn == 0 || output_tokens_per_turn == 0 {
        return Err(Error::Precondition(
            "estimate_dialogue_cost: all counts must be positive".into(),
        ));
    }
    pricing.validate()?;
    let miss = pricing.call_cost(input_tokens_per_turn, false, output_tokens_per_turn);
    let hit = pricing.call_cost(input_tokens_per_turn, true, output_tokens_per_turn);
    Ok(Money(miss.0 + (turns as i64 - 1) * hit.0))
}
