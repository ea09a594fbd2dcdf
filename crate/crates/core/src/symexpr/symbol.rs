use std::fmt;
use std::sync::Arc;

/// Role a symbol plays. The derived order is part of the term order of
/// [`Expr`](super::Expr), so variants must not be reordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    Position,
    Momentum,
    Generator,
    Parameter,
    /// Formal inverse `u` of a multi-term denominator, see [`SideRelation`](super::SideRelation).
    Auxiliary,
}

/// The six generators of `sl(2,R) + h3`, in the fixed word order used for
/// normal forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    JPlus,
    JMinus,
    J3,
    APlus,
    AMinus,
    M,
}

impl Generator {
    pub const ALL: [Generator; 6] = [
        Generator::JPlus,
        Generator::JMinus,
        Generator::J3,
        Generator::APlus,
        Generator::AMinus,
        Generator::M,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Generator::JPlus => "Jp",
            Generator::JMinus => "Jm",
            Generator::J3 => "J3",
            Generator::APlus => "Ap",
            Generator::AMinus => "Am",
            Generator::M => "M",
        }
    }

    fn rank(self) -> u32 {
        self as u32
    }

    fn from_rank(rank: u32) -> Option<Generator> {
        Generator::ALL.get(rank as usize).copied()
    }

    pub fn from_name(name: &str) -> Option<Generator> {
        Generator::ALL.into_iter().find(|g| g.name() == name)
    }
}

/// A named variable. Ordering is by `(kind, index, name)`; generators carry
/// their word rank in `index` so words print as `Jp Jm J3 Ap Am M`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    kind: SymbolKind,
    index: Option<u32>,
    name: Arc<str>,
}

impl Symbol {
    fn new(kind: SymbolKind, index: Option<u32>, name: &str) -> Self {
        Symbol {
            kind,
            index,
            name: Arc::from(name),
        }
    }

    /// Position `q_i` (1-based).
    pub fn q(i: u32) -> Self {
        Symbol::new(SymbolKind::Position, Some(i), "q")
    }

    /// Momentum `p_i` (1-based).
    pub fn p(i: u32) -> Self {
        Symbol::new(SymbolKind::Momentum, Some(i), "p")
    }

    pub fn generator(g: Generator) -> Self {
        Symbol::new(SymbolKind::Generator, Some(g.rank()), g.name())
    }

    /// A free parameter such as `delta` or `alpha`.
    pub fn param(name: &str) -> Self {
        Symbol::new(SymbolKind::Parameter, None, name)
    }

    /// An indexed parameter such as `a3` (Ramani coefficient) or `b1`.
    pub fn indexed_param(name: &str, i: u32) -> Self {
        Symbol::new(SymbolKind::Parameter, Some(i), name)
    }

    pub fn aux(i: u32) -> Self {
        Symbol::new(SymbolKind::Auxiliary, Some(i), "u")
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn index(&self) -> Option<u32> {
        self.index
    }

    pub fn base_name(&self) -> &str {
        &self.name
    }

    pub fn as_generator(&self) -> Option<Generator> {
        match self.kind {
            SymbolKind::Generator => self.index.and_then(Generator::from_rank),
            _ => None,
        }
    }

    pub fn is_canonical(&self) -> bool {
        matches!(self.kind, SymbolKind::Position | SymbolKind::Momentum)
    }

    /// The canonical partner of a position or momentum symbol.
    pub fn conjugate(&self) -> Option<Symbol> {
        match (self.kind, self.index) {
            (SymbolKind::Position, Some(i)) => Some(Symbol::p(i)),
            (SymbolKind::Momentum, Some(i)) => Some(Symbol::q(i)),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, self.index) {
            (SymbolKind::Generator, _) | (_, None) => f.write_str(&self.name),
            (_, Some(i)) => write!(f, "{}{}", self.name, i),
        }
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
