use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// One facet of a household's heating behaviour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    /// Boiler supply minus return water temperature while circulating.
    Boiler,
    /// Boiler modulation level.
    HeatDemand,
    /// Outdoor temperature.
    Temperature,
    /// Indoor minus outdoor temperature while the boiler is idle.
    Building,
    /// Target room temperature.
    User,
}

impl Dimension {
    pub const ALL: [Dimension; 5] = [
        Dimension::Boiler,
        Dimension::HeatDemand,
        Dimension::Temperature,
        Dimension::Building,
        Dimension::User,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Boiler => "boiler",
            Dimension::HeatDemand => "heat_demand",
            Dimension::Temperature => "temperature",
            Dimension::Building => "building",
            Dimension::User => "user",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Dimension {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "boiler" => Ok(Dimension::Boiler),
            "heat_demand" | "heatdemand" => Ok(Dimension::HeatDemand),
            "temperature" => Ok(Dimension::Temperature),
            "building" => Ok(Dimension::Building),
            "user" => Ok(Dimension::User),
            other => Err(format!("unknown dimension `{other}`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for d in Dimension::ALL {
            assert_eq!(d.as_str().parse::<Dimension>().unwrap(), d);
        }
        assert!("weather".parse::<Dimension>().is_err());
    }
}
