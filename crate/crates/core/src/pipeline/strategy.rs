use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_STAGES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StageKind {
    #[serde(rename = "SOM")]
    Som,
    #[serde(rename = "TDIDT")]
    Tdidt,
    #[serde(rename = "RB")]
    Rb,
}

impl StageKind {
    pub fn token(self) -> &'static str {
        match self {
            StageKind::Som => "SOM",
            StageKind::Tdidt => "TDIDT",
            StageKind::Rb => "RB",
        }
    }
}

impl fmt::Display for StageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for StageKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "SOM" => Ok(StageKind::Som),
            "TDIDT" => Ok(StageKind::Tdidt),
            "RB" => Ok(StageKind::Rb),
            other => Err(Error::Strategy(format!(
                "unknown stage {other:?} (expected SOM, TDIDT or RB)"
            ))),
        }
    }
}

/// Role of the hand-off between consecutive stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Priori,
    Posteriori,
    Fortiori,
}

const ROLES: [Role; 3] = [Role::Priori, Role::Posteriori, Role::Fortiori];

use StageKind::{Rb, Som, Tdidt};

/// The six canonical chains.
pub const CANONICAL: [&[StageKind]; 6] = [
    &[Som, Rb],
    &[Tdidt, Rb],
    &[Tdidt, Som, Rb],
    &[Som, Tdidt, Rb],
    &[Tdidt, Rb, Som, Rb],
    &[Som, Rb, Tdidt, Rb],
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strategy {
    pub stages: Vec<StageKind>,
    pub canonical: bool,
}

impl Strategy {
    pub fn new(stages: Vec<StageKind>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::Strategy("empty strategy".into()));
        }
        if stages.len() > MAX_STAGES {
            return Err(Error::Strategy(format!(
                "{} stages given, at most {MAX_STAGES} allowed",
                stages.len()
            )));
        }
        let canonical = CANONICAL.contains(&stages.as_slice());
        Ok(Strategy { stages, canonical })
    }

    /// `roles()[i]` labels the arrow from stage `i` to stage `i + 1`.
    pub fn roles(&self) -> Vec<Role> {
        ROLES[..self.stages.len() - 1].to_vec()
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn canonical_chains() -> Vec<Strategy> {
        CANONICAL
            .iter()
            .map(|c| Strategy::new(c.to_vec()).expect("canonical chain"))
            .collect()
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tokens: Vec<&str> = self.stages.iter().map(|s| s.token()).collect();
        f.write_str(&tokens.join(">"))
    }
}

/// Parses `SOM>TDIDT>RB`-style text; whitespace around tokens is ignored.
pub fn parse_strategy(text: &str) -> Result<Strategy> {
    if text.trim().is_empty() {
        return Err(Error::Strategy("empty strategy".into()));
    }
    let stages = text
        .split('>')
        .map(|t| t.trim().parse())
        .collect::<Result<Vec<StageKind>>>()?;
    Strategy::new(stages)
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_strategy(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_case_study_chain() {
        let s = parse_strategy("SOM>TDIDT>RB").unwrap();
        assert_eq!(s.stages, [Som, Tdidt, Rb]);
        assert!(s.canonical);
        assert_eq!(s.roles(), [Role::Priori, Role::Posteriori]);
        assert_eq!(s.to_string(), "SOM>TDIDT>RB");
    }

    #[test]
    fn flags_and_errors() {
        let one = parse_strategy("SOM").unwrap();
        assert!(!one.canonical);
        assert!(one.roles().is_empty());
        assert!(parse_strategy("SOM>XYZ").is_err());
        assert!(parse_strategy("").is_err());
        assert!(parse_strategy("SOM>RB>SOM>RB>SOM").is_err());
        assert_eq!(Strategy::canonical_chains().len(), 6);
        assert!(Strategy::canonical_chains().iter().all(|s| s.canonical));
    }
}
