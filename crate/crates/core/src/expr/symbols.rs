/// Variable naming used by the parser and printer.
///
/// `Coordinates` names variable `i` as `x{i}`. `Named` uses an explicit list;
/// each slot holds a display name followed by accepted aliases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Symbols {
    Coordinates,
    Named(Vec<Vec<String>>),
}

impl Symbols {
    pub fn named(names: &[&str]) -> Symbols {
        Symbols::Named(names.iter().map(|n| vec![n.to_string()]).collect())
    }

    /// Named variables with aliases, e.g. `&[&["φ", "phi"]]`.
    pub fn with_aliases(slots: &[&[&str]]) -> Symbols {
        Symbols::Named(
            slots
                .iter()
                .map(|s| s.iter().map(|n| n.to_string()).collect())
                .collect(),
        )
    }

    /// `(y, z)` coordinates of a reduced equation.
    pub fn yz() -> Symbols {
        Symbols::named(&["y", "z"])
    }

    /// `(v, w)` coordinates of the hyperbolic and parabolic systems.
    pub fn vw() -> Symbols {
        Symbols::named(&["v", "w"])
    }

    /// `(v, v*)` coordinates of the elliptic system.
    pub fn v_vstar() -> Symbols {
        Symbols::with_aliases(&[&["v"], &["vstar", "vs"]])
    }

    /// Single unknown `φ` of a right-hand side `F(φ)`.
    pub fn phi() -> Symbols {
        Symbols::with_aliases(&[&["phi", "φ", "u"]])
    }

    /// Single variable `u`.
    pub fn u() -> Symbols {
        Symbols::named(&["u"])
    }

    /// Single variable `t` for one-argument arbitrary functions.
    pub fn t() -> Symbols {
        Symbols::named(&["t"])
    }

    pub fn name(&self, index: usize) -> String {
        match self {
            Symbols::Coordinates => format!("x{index}"),
            Symbols::Named(slots) => slots
                .get(index)
                .and_then(|s| s.first())
                .cloned()
                .unwrap_or_else(|| format!("#{index}")),
        }
    }

    /// Same slots, but printing with the alias at `alias` position when one
    /// exists (used to switch between ASCII and Greek names).
    pub fn display_alias(&self, alias: usize) -> Symbols {
        match self {
            Symbols::Coordinates => Symbols::Coordinates,
            Symbols::Named(slots) => Symbols::Named(
                slots
                    .iter()
                    .map(|s| {
                        let mut s = s.clone();
                        if alias < s.len() {
                            s.swap(0, alias);
                        }
                        s
                    })
                    .collect(),
            ),
        }
    }

    pub(crate) fn lookup(&self, ident: &str) -> Option<usize> {
        match self {
            Symbols::Coordinates => None,
            Symbols::Named(slots) => slots.iter().position(|s| s.iter().any(|n| n == ident)),
        }
    }

    /// Number of named variables; `None` for coordinates.
    pub fn count(&self) -> Option<usize> {
        match self {
            Symbols::Coordinates => None,
            Symbols::Named(slots) => Some(slots.len()),
        }
    }
}
