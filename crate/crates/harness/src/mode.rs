use std::fmt;
use std::str::FromStr;

/// Which solver a run dispatches to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    FadingBb,
    FadingEs,
    TciDp,
    TciBb,
    TciEs,
    /// Greedy single-type plan on the faded channel. `None` is the last type.
    TypeOnly(Option<usize>),
    AutoSpecialCase,
}

impl Mode {
    pub fn is_tci(self) -> bool {
        matches!(self, Mode::TciDp | Mode::TciBb | Mode::TciEs)
    }

    pub fn is_exhaustive(self) -> bool {
        matches!(self, Mode::FadingEs | Mode::TciEs)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::FadingBb => f.write_str("fading-bb"),
            Mode::FadingEs => f.write_str("fading-es"),
            Mode::TciDp => f.write_str("tci-dp"),
            Mode::TciBb => f.write_str("tci-bb"),
            Mode::TciEs => f.write_str("tci-es"),
            Mode::TypeOnly(None) => f.write_str("type-only-n"),
            Mode::TypeOnly(Some(n)) => write!(f, "type-only-{n}"),
            Mode::AutoSpecialCase => f.write_str("auto-special-case"),
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "fading-bb" => Mode::FadingBb,
            "fading-es" => Mode::FadingEs,
            "tci-dp" => Mode::TciDp,
            "tci-bb" => Mode::TciBb,
            "tci-es" => Mode::TciEs,
            "type-only-n" => Mode::TypeOnly(None),
            "auto-special-case" => Mode::AutoSpecialCase,
            other => match other.strip_prefix("type-only-").map(str::parse::<usize>) {
                Some(Ok(n)) if n >= 1 => Mode::TypeOnly(Some(n)),
                _ => {
                    return Err(format!(
                        "unknown mode `{other}` (expected fading-bb, fading-es, tci-dp, tci-bb, \
                         tci-es, type-only-<n>, type-only-n or auto-special-case)"
                    ))
                }
            },
        })
    }
}

impl serde::Serialize for Mode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Mode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for s in [
            "fading-bb",
            "fading-es",
            "tci-dp",
            "tci-bb",
            "tci-es",
            "type-only-n",
            "type-only-2",
            "auto-special-case",
        ] {
            assert_eq!(s.parse::<Mode>().unwrap().to_string(), s);
        }
        assert!("type-only-0".parse::<Mode>().is_err());
        assert!("dp".parse::<Mode>().is_err());
    }
}
