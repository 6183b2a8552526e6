use std::collections::BTreeMap;

use crate::classify::{BankType, Region, Sector, SectorGroup};
use crate::graph::{BipartiteGraph, Mode, NodeRef};

#[derive(Debug, Clone, PartialEq)]
pub struct BankAttributes {
    pub name: String,
    pub bank_type: BankType,
    pub region: Region,
    pub capital: Option<f64>,
    pub asset: Option<f64>,
}

impl BankAttributes {
    pub fn capital_to_asset(&self) -> Option<f64> {
        match (self.capital, self.asset) {
            (Some(c), Some(a)) if a > 0.0 => Some(c / a),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirmAttributes {
    pub name: String,
    pub sector: Sector,
    pub asset: Option<f64>,
    pub debt: Option<f64>,
    pub capital: Option<f64>,
}

impl FirmAttributes {
    pub fn group(&self) -> SectorGroup {
        self.sector.group()
    }
}

/// Per-node attributes keyed by node id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NodeAttributes {
    pub banks: BTreeMap<String, BankAttributes>,
    pub firms: BTreeMap<String, FirmAttributes>,
}

/// How attribute records line up with the nodes of a graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct JoinReport {
    /// Attribute records whose id is not a node of the graph.
    pub bank_orphans: usize,
    pub firm_orphans: usize,
    /// Graph nodes with no attribute record.
    pub banks_missing: usize,
    pub firms_missing: usize,
}

impl NodeAttributes {
    pub fn is_empty(&self) -> bool {
        self.banks.is_empty() && self.firms.is_empty()
    }

    /// Fold another attribute set into this one; later records win.
    pub fn extend(&mut self, other: NodeAttributes) {
        self.banks.extend(other.banks);
        self.firms.extend(other.firms);
    }

    pub fn bank(&self, g: &BipartiteGraph, index: usize) -> Option<&BankAttributes> {
        g.ids(Mode::Bank).get(index).and_then(|id| self.banks.get(id))
    }

    pub fn firm(&self, g: &BipartiteGraph, index: usize) -> Option<&FirmAttributes> {
        g.ids(Mode::Firm).get(index).and_then(|id| self.firms.get(id))
    }

    /// Node color under `scheme`, when the node has the needed attribute.
    pub fn color(&self, mode: Mode, id: &str, scheme: ColorScheme) -> Option<&'static str> {
        match (mode, scheme) {
            (Mode::Bank, ColorScheme::BankType) => self.banks.get(id).map(|b| b.bank_type.color()),
            (Mode::Bank, ColorScheme::Region) => self.banks.get(id).map(|b| b.region.color()),
            (Mode::Firm, ColorScheme::SectorGroup) => self.firms.get(id).map(|f| f.group().color()),
            _ => None,
        }
    }

    /// Classification code shown next to the color in exports.
    pub fn class_code(&self, mode: Mode, id: &str, scheme: ColorScheme) -> Option<u8> {
        match (mode, scheme) {
            (Mode::Bank, ColorScheme::BankType) => self.banks.get(id).map(|b| b.bank_type.code()),
            (Mode::Bank, ColorScheme::Region) => self.banks.get(id).map(|b| b.region.code()),
            (Mode::Firm, ColorScheme::SectorGroup) => self.firms.get(id).map(|f| f.group().code()),
            _ => None,
        }
    }

    pub fn join(&self, g: &BipartiteGraph) -> JoinReport {
        let orphans =
            |keys: &mut dyn Iterator<Item = &String>, mode| keys.filter(|id| g.find(mode, id).is_none()).count();
        let missing = |mode: Mode, has: &dyn Fn(&str) -> bool| g.ids(mode).iter().filter(|id| !has(id)).count();
        JoinReport {
            bank_orphans: orphans(&mut self.banks.keys(), Mode::Bank),
            firm_orphans: orphans(&mut self.firms.keys(), Mode::Firm),
            banks_missing: missing(Mode::Bank, &|id| self.banks.contains_key(id)),
            firms_missing: missing(Mode::Firm, &|id| self.firms.contains_key(id)),
        }
    }

    /// Firms of `group`, as a node filter for subset projections.
    pub fn firms_in_group<'a>(&'a self, g: &'a BipartiteGraph, group: SectorGroup) -> impl Fn(NodeRef) -> bool + 'a {
        move |n| n.mode == Mode::Firm && self.firm(g, n.index).is_some_and(|f| f.group() == group)
    }
}

/// Which classification colors the nodes of an export.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColorScheme {
    #[default]
    BankType,
    Region,
    SectorGroup,
}

impl std::str::FromStr for ColorScheme {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s {
            "bank-type" | "type" => Ok(ColorScheme::BankType),
            "region" => Ok(ColorScheme::Region),
            "sector-group" | "group" => Ok(ColorScheme::SectorGroup),
            other => Err(crate::error::Error::invalid(format!("unknown color scheme `{other}`"))),
        }
    }
}
