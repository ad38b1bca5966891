//! Counted conditional probability tables.
//!
//! Every Markov chain in the crate is a [`ConditionalTable`]: a map from a
//! context key to outcome counts. Probabilities are derived on demand as
//! `count / total` for the context, so unseen pairs have probability zero
//! and there is no smoothing.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Keys that can be written to and read back from a CPD export.
pub trait CpdKey: Sized {
    fn fields(&self) -> Vec<String>;
    fn from_fields(fields: &[String]) -> Option<Self>;
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
struct OutcomeCounts<O> {
    counts: BTreeMap<O, u64>,
    total: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalTable<C, O> {
    rows: BTreeMap<C, OutcomeCounts<O>>,
}

impl<C, O> Default for ConditionalTable<C, O> {
    fn default() -> Self {
        Self {
            rows: BTreeMap::new(),
        }
    }
}

impl<C: Ord, O: Ord> ConditionalTable<C, O> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(&mut self, context: C, outcome: O) {
        self.observe_n(context, outcome, 1);
    }

    /// Record `n` observations at once. `n == 0` is a no-op.
    pub fn observe_n(&mut self, context: C, outcome: O, n: u64) {
        if n == 0 {
            return;
        }
        let row = self.rows.entry(context).or_insert_with(|| OutcomeCounts {
            counts: BTreeMap::new(),
            total: 0,
        });
        *row.counts.entry(outcome).or_insert(0) += n;
        row.total += n;
    }

    pub fn count(&self, context: &C, outcome: &O) -> u64 {
        self.rows
            .get(context)
            .and_then(|r| r.counts.get(outcome))
            .copied()
            .unwrap_or(0)
    }

    pub fn total(&self, context: &C) -> u64 {
        self.rows.get(context).map_or(0, |r| r.total)
    }

    /// Exact probability as `(count, total)`; `(0, 0)` for an unseen context.
    pub fn ratio(&self, context: &C, outcome: &O) -> (u64, u64) {
        (self.count(context, outcome), self.total(context))
    }

    /// `P(outcome | context)`, zero for unseen contexts or outcomes.
    pub fn probability(&self, context: &C, outcome: &O) -> f64 {
        match self.ratio(context, outcome) {
            (_, 0) => 0.0,
            (n, d) => n as f64 / d as f64,
        }
    }

    pub fn contains_context(&self, context: &C) -> bool {
        self.rows.contains_key(context)
    }

    pub fn contexts(&self) -> impl Iterator<Item = &C> {
        self.rows.keys()
    }

    /// Outcomes with their counts for `context`, in outcome order.
    pub fn outcomes<'a>(&'a self, context: &C) -> impl Iterator<Item = (&'a O, u64)> + 'a {
        self.rows
            .get(context)
            .into_iter()
            .flat_map(|r| r.counts.iter().map(|(o, &n)| (o, n)))
    }

    pub fn num_contexts(&self) -> usize {
        self.rows.len()
    }

    /// Number of (context, outcome) pairs with a non-zero count.
    pub fn num_entries(&self) -> usize {
        self.rows.values().map(|r| r.counts.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Draw an outcome for `context`, or `None` when the context was never observed.
    pub fn sample<R: Rng + ?Sized>(&self, context: &C, rng: &mut R) -> Option<&O> {
        let row = self.rows.get(context)?;
        let mut pick = rng.gen_range(0..row.total);
        for (outcome, &n) in &row.counts {
            if pick < n {
                return Some(outcome);
            }
            pick -= n;
        }
        unreachable!("counts sum to total")
    }

    /// Fold another table's counts into this one.
    pub fn merge(&mut self, other: &ConditionalTable<C, O>)
    where
        C: Clone,
        O: Clone,
    {
        for (c, row) in &other.rows {
            for (o, &n) in &row.counts {
                self.observe_n(c.clone(), o.clone(), n);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpdRow {
    pub context: Vec<String>,
    pub outcome: String,
    pub count: u64,
    pub probability: f64,
}

/// Serializable dump of a table, rows sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpdExport {
    pub chain: String,
    /// Names of the context fields, in key order.
    pub context_fields: Vec<String>,
    pub rows: Vec<CpdRow>,
}

#[derive(Debug, thiserror::Error)]
#[error("CPD export for {chain:?} row {row}: unreadable {what}")]
pub struct CpdImportError {
    pub chain: String,
    pub row: usize,
    pub what: &'static str,
}

impl<C: Ord + CpdKey, O: Ord + CpdKey> ConditionalTable<C, O> {
    pub fn export(&self, chain: &str, context_fields: &[&str]) -> CpdExport {
        let mut rows: Vec<CpdRow> = self
            .rows
            .iter()
            .flat_map(|(c, row)| {
                let context = c.fields();
                row.counts.iter().map(move |(o, &n)| CpdRow {
                    context: context.clone(),
                    outcome: o.fields().concat(),
                    count: n,
                    probability: n as f64 / row.total as f64,
                })
            })
            .collect();
        rows.sort_by(|a, b| (&a.context, &a.outcome).cmp(&(&b.context, &b.outcome)));
        CpdExport {
            chain: chain.to_string(),
            context_fields: context_fields.iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }

    /// Rebuild a table from the counts of an export.
    pub fn from_export(export: &CpdExport) -> Result<Self, CpdImportError> {
        let mut table = Self::new();
        for (i, row) in export.rows.iter().enumerate() {
            let err = |what| CpdImportError {
                chain: export.chain.clone(),
                row: i,
                what,
            };
            let c = C::from_fields(&row.context).ok_or_else(|| err("context"))?;
            let o = O::from_fields(std::slice::from_ref(&row.outcome)).ok_or_else(|| err("outcome"))?;
            table.observe_n(c, o, row.count);
        }
        Ok(table)
    }
}

impl CpdKey for u8 {
    fn fields(&self) -> Vec<String> {
        vec![(*self as char).to_string()]
    }

    fn from_fields(fields: &[String]) -> Option<Self> {
        match fields {
            [s] => match s.as_bytes() {
                [b] => Some(*b),
                _ => None,
            },
            _ => None,
        }
    }
}
