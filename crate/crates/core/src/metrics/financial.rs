//! Balance-sheet measures joined onto the graph: debt-on-asset ratio,
//! capital-normalized loan sizes and bank capital ratios.

use crate::attributes::{FirmAttributes, NodeAttributes};
use crate::classify::BankType;
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Mode};

/// Where a firm's asset figure comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AssetBasis {
    /// The asset column as reported.
    #[default]
    Reported,
    /// Capital minus debt.
    CapitalMinusDebt,
}

impl std::str::FromStr for AssetBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reported" => Ok(AssetBasis::Reported),
            "capital-minus-debt" => Ok(AssetBasis::CapitalMinusDebt),
            other => Err(Error::invalid(format!("unknown asset basis `{other}`"))),
        }
    }
}

pub fn firm_asset(f: &FirmAttributes, basis: AssetBasis) -> Option<f64> {
    let a = match basis {
        AssetBasis::Reported => f.asset?,
        AssetBasis::CapitalMinusDebt => f.capital? - f.debt?,
    };
    (a > 0.0).then_some(a)
}

/// Debt on asset ratio; `None` unless both figures are present and the
/// asset is positive.
pub fn debt_on_asset(f: &FirmAttributes, basis: AssetBasis) -> Option<f64> {
    Some(f.debt? / firm_asset(f, basis)?)
}

/// Whose capital normalizes a loan amount.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CapitalOwner {
    #[default]
    Firm,
    Bank,
}

impl std::str::FromStr for CapitalOwner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "firm" => Ok(CapitalOwner::Firm),
            "bank" => Ok(CapitalOwner::Bank),
            other => Err(Error::invalid(format!("unknown capital owner `{other}`"))),
        }
    }
}

/// Loan totals divided by the borrower's (or lender's) capital. Returns the
/// normalized values and the number of links skipped for missing or
/// nonpositive capital.
pub fn capital_normalized_weights(
    g: &BipartiteGraph,
    attrs: &NodeAttributes,
    owner: CapitalOwner,
) -> (Vec<f64>, usize) {
    let mut out = Vec::with_capacity(g.edge_count());
    let mut skipped = 0;
    for e in g.edges() {
        let capital = match owner {
            CapitalOwner::Firm => attrs.firm(g, e.firm).and_then(|f| f.capital),
            CapitalOwner::Bank => attrs.bank(g, e.bank).and_then(|b| b.capital),
        };
        match capital {
            Some(c) if c > 0.0 => out.push(e.weight.total() / c),
            _ => skipped += 1,
        }
    }
    (out, skipped)
}

/// Per-firm `(degree, debt, asset, DAR)` rows for firms with links and
/// complete financials.
pub fn firm_financial_rows(g: &BipartiteGraph, attrs: &NodeAttributes, basis: AssetBasis) -> Vec<FirmFinancials> {
    let degrees = g.degrees(Mode::Firm);
    (0..g.firm_count())
        .filter_map(|f| {
            let a = attrs.firm(g, f)?;
            let asset = firm_asset(a, basis)?;
            let debt = a.debt?;
            (degrees[f] > 0).then(|| FirmFinancials {
                firm: f,
                degree: degrees[f],
                debt,
                asset,
                dar: debt / asset,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirmFinancials {
    pub firm: usize,
    pub degree: usize,
    pub debt: f64,
    pub asset: f64,
    pub dar: f64,
}

/// `(ln degree, capital-to-asset)` for linked banks of the given types.
pub fn bank_capital_ratio_points(g: &BipartiteGraph, attrs: &NodeAttributes, types: &[BankType]) -> Vec<(f64, f64)> {
    let degrees = g.degrees(Mode::Bank);
    (0..g.bank_count())
        .filter_map(|b| {
            let a = attrs.bank(g, b)?;
            if !types.contains(&a.bank_type) || degrees[b] == 0 {
                return None;
            }
            Some(((degrees[b] as f64).ln(), a.capital_to_asset()?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attributes::BankAttributes;
    use crate::classify::{Region, Sector};
    use crate::graph::fixtures::graph;

    fn firm(asset: Option<f64>, debt: Option<f64>, capital: Option<f64>) -> FirmAttributes {
        FirmAttributes {
            name: "f".into(),
            sector: Sector::Drugs,
            asset,
            debt,
            capital,
        }
    }

    #[test]
    fn dar_needs_debt_and_asset() {
        assert_eq!(
            debt_on_asset(&firm(Some(200.0), Some(50.0), None), AssetBasis::Reported),
            Some(0.25)
        );
        assert_eq!(debt_on_asset(&firm(None, Some(50.0), None), AssetBasis::Reported), None);
        assert_eq!(
            debt_on_asset(&firm(Some(0.0), Some(50.0), None), AssetBasis::Reported),
            None
        );
        let f = firm(None, Some(50.0), Some(250.0));
        assert_eq!(debt_on_asset(&f, AssetBasis::CapitalMinusDebt), Some(0.25));
    }

    #[test]
    fn normalization_by_firm_or_bank_capital() {
        let g = graph(&[(0, 0, 10.0, 0.0), (0, 1, 0.0, 4.0)]);
        let mut attrs = NodeAttributes::default();
        attrs.firms.insert("F0".into(), firm(None, None, Some(5.0)));
        attrs.banks.insert(
            "B0".into(),
            BankAttributes {
                name: "b".into(),
                bank_type: BankType::City,
                region: Region::NotRegional,
                capital: Some(2.0),
                asset: Some(40.0),
            },
        );
        assert_eq!(
            capital_normalized_weights(&g, &attrs, CapitalOwner::Firm),
            (vec![2.0], 1)
        );
        assert_eq!(
            capital_normalized_weights(&g, &attrs, CapitalOwner::Bank),
            (vec![5.0, 2.0], 0)
        );
        let pts = bank_capital_ratio_points(&g, &attrs, &[BankType::City]);
        assert_eq!(pts, vec![(2f64.ln(), 0.05)]);
        assert!(bank_capital_ratio_points(&g, &attrs, &[BankType::Regional]).is_empty());
    }
}
