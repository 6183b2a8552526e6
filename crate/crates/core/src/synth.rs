//! Synthetic bank–firm credit networks.
//!
//! Firm degrees follow a rounded Pareto law with the configured cumulative
//! exponent and mean, truncated at the number of banks. Banks enter one by
//! one as firms are processed, and each firm's links go to the banks present
//! at that time with probability proportional to bank degree + 1. Early
//! banks therefore become hubs. Loan amounts are Pareto distributed and split
//! into short and long term per edge.

use rand::distr::weighted::WeightedIndex;
use rand::distr::{Distribution, OpenClosed01};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::attributes::{BankAttributes, FirmAttributes, NodeAttributes};
use crate::classify::{BankType, Region, Sector};
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, EdgeWeight, GraphBuilder};

/// How a loan total is divided into short and long term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitRule {
    /// Short-term share drawn uniformly from [0, 1) per edge.
    Uniform,
    /// Fixed short-term share.
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub bank_count: usize,
    pub firm_count: usize,
    /// Cumulative tail exponent of the firm degree law.
    pub firm_degree_exponent: f64,
    pub mean_firm_degree: f64,
    /// Cumulative tail exponent of the loan amount law.
    pub weight_exponent: f64,
    /// Smallest loan, in million yen.
    pub weight_min: f64,
    pub split: SplitRule,
    pub seed: u64,
    /// Fraction of the configured node counts actually generated.
    pub scale: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            bank_count: 190,
            firm_count: 2701,
            firm_degree_exponent: 2.6,
            mean_firm_degree: 8.0,
            weight_exponent: 0.95,
            weight_min: 100.0,
            split: SplitRule::Uniform,
            seed: 2004,
            scale: 1.0,
        }
    }
}

/// Largest number of draws for one link before it is dropped as a duplicate.
pub const MAX_RESAMPLES: usize = 32;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SynthReport {
    pub bank_count: usize,
    pub firm_count: usize,
    /// Sum of the drawn firm degrees.
    pub requested_links: usize,
    /// Draws that hit a bank already linked to the firm.
    pub resampled: usize,
    /// Links given up after `MAX_RESAMPLES` collisions.
    pub dropped_links: usize,
}

impl GeneratorConfig {
    /// Node counts after scaling.
    pub fn scaled_counts(&self) -> (usize, usize) {
        let scale = |n: usize| ((n as f64 * self.scale).round() as usize).max(1);
        (scale(self.bank_count), scale(self.firm_count))
    }

    // Negated comparisons also reject NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::invalid(msg));
        if self.bank_count < 1 || self.firm_count < 1 {
            return bad("bank_count and firm_count must be at least 1".into());
        }
        if !(self.scale > 0.0 && self.scale <= 1.0) {
            return bad(format!("scale must lie in (0, 1], got {}", self.scale));
        }
        if !(self.firm_degree_exponent > 1.0) {
            return bad(format!(
                "firm_degree_exponent must exceed 1 for the mean degree to exist, got {}",
                self.firm_degree_exponent
            ));
        }
        if !(self.weight_exponent > 0.0) || !(self.weight_min > 0.0) {
            return bad("weight_exponent and weight_min must be positive".into());
        }
        if let SplitRule::Fixed(f) = self.split {
            if !(0.0..=1.0).contains(&f) {
                return bad(format!("fixed short-term share must lie in [0, 1], got {f}"));
            }
        }
        let (banks, _) = self.scaled_counts();
        if !(self.mean_firm_degree >= 1.0) || self.mean_firm_degree > banks as f64 {
            return bad(format!(
                "mean_firm_degree must lie in [1, {banks}] (the number of banks), got {}",
                self.mean_firm_degree
            ));
        }
        Ok(())
    }
}

fn pareto(rng: &mut ChaCha8Rng, x_min: f64, mu: f64) -> f64 {
    let u: f64 = OpenClosed01.sample(rng);
    x_min * u.powf(-1.0 / mu)
}

fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// Bank type by arrival order, following the 2004 mix of 7 city,
/// 2 long-term credit, 9 trust, 64 regional, 50 second-tier regional
/// and 58 other institutions, rescaled to the bank count.
fn bank_type_by_arrival(j: usize, bank_count: usize) -> BankType {
    const MIX: [(BankType, usize); 6] = [
        (BankType::City, 7),
        (BankType::LongTermCredit, 2),
        (BankType::Trust, 9),
        (BankType::Regional, 64),
        (BankType::SecondRegional, 50),
        (BankType::Other, 58),
    ];
    let total: usize = MIX.iter().map(|(_, n)| n).sum();
    let pos = (j as f64 + 0.5) / bank_count as f64 * total as f64;
    let mut acc = 0.0;
    for (t, n) in MIX {
        acc += n as f64;
        if pos < acc {
            return t;
        }
    }
    BankType::Other
}

#[allow(clippy::needless_range_loop)]
pub fn generate(cfg: &GeneratorConfig) -> Result<(BipartiteGraph, NodeAttributes, SynthReport)> {
    cfg.validate()?;
    let (banks, firms) = cfg.scaled_counts();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let bank_width = banks.to_string().len().max(4);
    let firm_width = firms.to_string().len().max(5);
    let bank_id = |j: usize| format!("B{j:0bank_width$}", j = j + 1);
    let firm_id = |i: usize| format!("F{i:0firm_width$}", i = i + 1);

    let mu = cfg.firm_degree_exponent;
    let x_min = cfg.mean_firm_degree * (mu - 1.0) / mu;
    let mut report = SynthReport {
        bank_count: banks,
        firm_count: firms,
        ..Default::default()
    };
    let mut builder = GraphBuilder::new();
    let mut bank_degree = vec![0usize; banks];
    let mut bank_loans = vec![0.0f64; banks];
    let mut firm_degree = vec![0usize; firms];
    let mut chosen: Vec<usize> = Vec::new();

    for j in 0..banks {
        builder.add_bank(bank_id(j));
    }
    for i in 0..firms {
        // A mean of one leaves no room above the minimum degree.
        let k = if cfg.mean_firm_degree <= 1.0 {
            1
        } else {
            (pareto(&mut rng, x_min, mu).round() as usize).clamp(1, banks)
        };
        report.requested_links += k;
        let active = (banks * (i + 1)).div_ceil(firms).max(k).min(banks);

        chosen.clear();
        for _ in 0..k {
            let total: usize = bank_degree[..active].iter().sum::<usize>() + active;
            let mut picked = None;
            for _ in 0..MAX_RESAMPLES {
                let mut r = rng.random_range(0..total);
                let mut j = 0;
                while r > bank_degree[j] {
                    r -= bank_degree[j] + 1;
                    j += 1;
                }
                if chosen.contains(&j) {
                    report.resampled += 1;
                } else {
                    picked = Some(j);
                    break;
                }
            }
            match picked {
                Some(j) => {
                    chosen.push(j);
                    bank_degree[j] += 1;
                }
                None => report.dropped_links += 1,
            }
        }

        let fid = firm_id(i);
        builder.add_firm(fid.clone());
        firm_degree[i] = chosen.len();
        for &j in &chosen {
            let total = round1(pareto(&mut rng, cfg.weight_min, cfg.weight_exponent));
            let share = match cfg.split {
                SplitRule::Uniform => rng.random::<f64>(),
                SplitRule::Fixed(f) => f,
            };
            let short = round1(total * share);
            let long = ((total * 10.0).round() - (short * 10.0).round()) / 10.0;
            bank_loans[j] += total;
            let weight = EdgeWeight::split(short, long)?;
            builder.add_edge(bank_id(j), fid.clone(), weight);
        }
    }
    if report.dropped_links > 0 {
        log::warn!("dropped {} links after repeated duplicate draws", report.dropped_links);
    }
    let (graph, _) = builder.build();

    let mut attrs = NodeAttributes::default();
    for j in 0..banks {
        let bank_type = bank_type_by_arrival(j, banks);
        let region = match bank_type {
            BankType::Regional | BankType::SecondRegional => Region::from_code(rng.random_range(1..=7))?,
            _ => Region::from_code(0)?,
        };
        // Lending is a fraction of the balance sheet.
        let asset = round1((bank_loans[j] + cfg.weight_min) * rng.random_range(5.0..15.0));
        let capital = round1(asset * rng.random_range(0.03..0.08));
        attrs.banks.insert(
            bank_id(j),
            BankAttributes {
                name: format!("Synthetic Bank {}", j + 1),
                bank_type,
                region,
                capital: Some(capital),
                asset: Some(asset),
            },
        );
    }
    let sectors =
        WeightedIndex::new(Sector::ALL.iter().map(|s| s.listed_2004())).map_err(|e| Error::invalid(e.to_string()))?;
    for (i, &k) in firm_degree.iter().enumerate() {
        let sector = Sector::ALL[sectors.sample(&mut rng)];
        let asset = round1(pareto(&mut rng, 1e4, 0.82) * (k.max(1) as f64).sqrt());
        let dar: f64 = rng.random_range(0.2..0.9);
        let debt = round1(asset * dar);
        attrs.firms.insert(
            firm_id(i),
            FirmAttributes {
                name: format!("Synthetic Firm {}", i + 1),
                sector,
                asset: Some(asset),
                debt: Some(debt),
                capital: Some(round1(asset - debt)),
            },
        );
    }
    Ok((graph, attrs, report))
}
