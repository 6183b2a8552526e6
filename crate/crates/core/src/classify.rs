//! Classification tables for banks and firms: institution type, home region,
//! industrial sector and the six-way sector aggregation, with the node colors
//! used in tree exports.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BankType {
    LongTermCredit = 1,
    City = 2,
    Regional = 3,
    Trust = 4,
    SecondRegional = 5,
    /// Insurance companies, government-affiliated lenders and anything
    /// else not covered by the first five codes.
    Other = 6,
}

impl BankType {
    pub const ALL: [BankType; 6] = [
        BankType::LongTermCredit,
        BankType::City,
        BankType::Regional,
        BankType::Trust,
        BankType::SecondRegional,
        BankType::Other,
    ];

    pub fn from_code(code: u8) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.code() == code)
            .ok_or_else(|| Error::invalid(format!("bank_type must be in 1..=6, got {code}")))
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn color(self) -> &'static str {
        match self {
            BankType::LongTermCredit => "black",
            BankType::City => "blue",
            BankType::Regional => "green",
            BankType::Trust => "yellow",
            BankType::SecondRegional => "orange",
            BankType::Other => "white",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            BankType::LongTermCredit => "long-term credit bank",
            BankType::City => "city bank",
            BankType::Regional => "regional bank",
            BankType::Trust => "trust bank",
            BankType::SecondRegional => "secondary regional bank",
            BankType::Other => "other institution",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    NotRegional = 0,
    HokkaidoTohoku = 1,
    Kantou = 2,
    Chubu = 3,
    Kinki = 4,
    Chugoku = 5,
    Shikoku = 6,
    Kyushu = 7,
}

impl Region {
    pub const ALL: [Region; 8] = [
        Region::NotRegional,
        Region::HokkaidoTohoku,
        Region::Kantou,
        Region::Chubu,
        Region::Kinki,
        Region::Chugoku,
        Region::Shikoku,
        Region::Kyushu,
    ];

    pub fn from_code(code: u8) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.code() == code)
            .ok_or_else(|| Error::invalid(format!("region must be in 0..=7, got {code}")))
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn color(self) -> &'static str {
        match self {
            Region::NotRegional => "white",
            Region::HokkaidoTohoku => "black",
            Region::Kantou => "blue",
            Region::Chubu => "green",
            Region::Kinki => "yellow",
            Region::Chugoku => "orange",
            Region::Shikoku => "red",
            Region::Kyushu => "brown",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Region::NotRegional => "not regional",
            Region::HokkaidoTohoku => "Hokkaido and Tohoku",
            Region::Kantou => "Kantou",
            Region::Chubu => "Chubu",
            Region::Kinki => "Kinki",
            Region::Chugoku => "Chugoku",
            Region::Shikoku => "Shikoku",
            Region::Kyushu => "Kyushu",
        }
    }
}

/// Six-way aggregation of industrial sectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SectorGroup {
    FoodsChemicals = 1,
    Metals = 2,
    Transport = 3,
    MachineryElectronics = 4,
    OtherManufacturing = 5,
    NonManufacturing = 6,
}

impl SectorGroup {
    pub const ALL: [SectorGroup; 6] = [
        SectorGroup::FoodsChemicals,
        SectorGroup::Metals,
        SectorGroup::Transport,
        SectorGroup::MachineryElectronics,
        SectorGroup::OtherManufacturing,
        SectorGroup::NonManufacturing,
    ];

    pub fn from_code(code: u8) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|g| g.code() == code)
            .ok_or_else(|| Error::invalid(format!("sector group must be in 1..=6, got {code}")))
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn label(self) -> &'static str {
        match self {
            SectorGroup::FoodsChemicals => "Foods, Chemicals, Drugs",
            SectorGroup::Metals => "Iron, Steel, Non-ferrous Metals, Metal Products",
            SectorGroup::Transport => "Motor Vehicles, Auto Parts, Transportation Equip., Shipbuilding, Repair",
            SectorGroup::MachineryElectronics => {
                "Machinery, Electric and Electronic Equip., Precision Equip., Other Manufacturing"
            }
            SectorGroup::OtherManufacturing => "rest of manufacturing",
            SectorGroup::NonManufacturing => "non-manufacturing",
        }
    }

    pub fn color(self) -> &'static str {
        match self {
            SectorGroup::FoodsChemicals => "red",
            SectorGroup::Metals => "gray",
            SectorGroup::Transport => "blue",
            SectorGroup::MachineryElectronics => "green",
            SectorGroup::OtherManufacturing => "orange",
            SectorGroup::NonManufacturing => "white",
        }
    }
}

macro_rules! sectors {
    ($( $variant:ident => ($name:literal, $group:ident, $count2004:literal) ),+ $(,)?) => {
        /// The 34 conventional industrial sectors (banks and insurers excluded).
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Sector { $( $variant ),+ }

        impl Sector {
            pub const ALL: &'static [Sector] = &[ $( Sector::$variant ),+ ];

            pub fn name(self) -> &'static str {
                match self { $( Sector::$variant => $name ),+ }
            }

            pub fn group(self) -> SectorGroup {
                match self { $( Sector::$variant => SectorGroup::$group ),+ }
            }

            /// Listed firms in the sector in fiscal 2004; used as sampling
            /// weights by the synthetic generator.
            pub fn listed_2004(self) -> u32 {
                match self { $( Sector::$variant => $count2004 ),+ }
            }
        }
    };
}

sectors! {
    Foods => ("Foods", FoodsChemicals, 113),
    TextileProducts => ("Textile Products", OtherManufacturing, 55),
    PulpPaper => ("Pulp & Paper", OtherManufacturing, 23),
    Chemicals => ("Chemicals", FoodsChemicals, 154),
    Drugs => ("Drugs", FoodsChemicals, 23),
    Petroleum => ("Petroleum", OtherManufacturing, 9),
    RubberProducts => ("Rubber Products", OtherManufacturing, 23),
    StoneClayGlass => ("Stone, Clay & Glass Products", OtherManufacturing, 62),
    IronSteel => ("Iron & Steel", Metals, 47),
    NonFerrousMetal => ("Non-ferrous Metal & Metal Products", Metals, 100),
    Machinery => ("Machinery", MachineryElectronics, 196),
    ElectricEquipment => ("Electric & Electronic Equip.", MachineryElectronics, 206),
    Shipbuilding => ("Shipbuilding & Repair", Transport, 6),
    MotorVehicles => ("Motor Vehicles & Auto Parts", Transport, 61),
    TransportationEquipment => ("Transportation Equip.", Transport, 13),
    PrecisionEquipment => ("Precision Equip.", MachineryElectronics, 47),
    OtherManufacturing => ("Other Manufacturing", MachineryElectronics, 95),
    FishMarine => ("Fish & Marine Products", NonManufacturing, 8),
    Mining => ("Mining", NonManufacturing, 7),
    Construction => ("Construction", NonManufacturing, 168),
    WholesaleTrade => ("Wholesale Trade", NonManufacturing, 299),
    RetailTrade => ("Retail Trade", NonManufacturing, 220),
    Securities => ("Securities houses", NonManufacturing, 13),
    CreditLeasing => ("Credit & Leasing", NonManufacturing, 69),
    RealEstate => ("Real Estate", NonManufacturing, 93),
    Railroad => ("Railroad Transportation", NonManufacturing, 31),
    Trucking => ("Trucking", NonManufacturing, 35),
    SeaTransportation => ("Sea Transportation", NonManufacturing, 19),
    AirTransportation => ("Air Transportation", NonManufacturing, 4),
    Warehousing => ("Warehousing & Harbor Transportation", NonManufacturing, 38),
    Communication => ("Communication Services", NonManufacturing, 26),
    UtilitiesElectric => ("Utilities(Electric)", NonManufacturing, 9),
    UtilitiesGas => ("Utilities(Gas)", NonManufacturing, 12),
    Services => ("Services", NonManufacturing, 417),
}

impl Sector {
    pub fn is_manufacturing(self) -> bool {
        self.group() != SectorGroup::NonManufacturing
    }
}

impl std::str::FromStr for Sector {
    type Err = Error;

    /// Case-insensitive match on the sector name, ignoring surrounding and
    /// repeated whitespace.
    fn from_str(s: &str) -> Result<Self> {
        let key = normalize(s);
        Sector::ALL
            .iter()
            .copied()
            .find(|sec| normalize(sec.name()) == key)
            .ok_or_else(|| Error::invalid(format!("unknown sector `{}`", s.trim())))
    }
}

fn normalize(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thirty_four_sectors_split_evenly() {
        assert_eq!(Sector::ALL.len(), 34);
        let manufacturing = Sector::ALL.iter().filter(|s| s.is_manufacturing()).count();
        assert_eq!(manufacturing, 17);
    }

    #[test]
    fn group_sizes() {
        let size = |g| Sector::ALL.iter().filter(|s| s.group() == g).count();
        assert_eq!(size(SectorGroup::FoodsChemicals), 3);
        assert_eq!(size(SectorGroup::Metals), 2);
        assert_eq!(size(SectorGroup::Transport), 3);
        assert_eq!(size(SectorGroup::MachineryElectronics), 4);
        assert_eq!(size(SectorGroup::OtherManufacturing), 5);
        assert_eq!(size(SectorGroup::NonManufacturing), 17);
    }

    #[test]
    fn listed_counts_total_2701() {
        let total: u32 = Sector::ALL.iter().map(|s| s.listed_2004()).sum();
        assert_eq!(total, 2701);
    }

    #[test]
    fn drugs_is_group_one() {
        let s: Sector = "Drugs".parse().unwrap();
        assert_eq!(s.group(), SectorGroup::FoodsChemicals);
        assert_eq!(s.group().code(), 1);
    }

    #[test]
    fn sector_parse_is_lenient_on_case_and_spacing() {
        let s: Sector = "  stone,  clay & glass products ".parse().unwrap();
        assert_eq!(s, Sector::StoneClayGlass);
        assert!("Banking".parse::<Sector>().is_err());
    }

    #[test]
    fn bank_codes() {
        let t = BankType::from_code(2).unwrap();
        assert_eq!((t, t.color()), (BankType::City, "blue"));
        let r = Region::from_code(2).unwrap();
        assert_eq!((r.name(), r.color()), ("Kantou", "blue"));
        assert!(BankType::from_code(0).is_err());
        assert!(BankType::from_code(7).is_err());
        assert!(Region::from_code(8).is_err());
        assert_eq!(Region::from_code(7).unwrap().color(), "brown");
        assert_eq!(BankType::from_code(6).unwrap().color(), "white");
    }
}
