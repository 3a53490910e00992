use super::StructureError;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationSymbol {
    pub name: String,
    pub arity: usize,
}

/// A relational language: named relation symbols with arities, plus an
/// optional built-in equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    relations: Vec<RelationSymbol>,
    with_equality: bool,
}

pub(crate) fn valid_relation_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Signature {
    pub fn new<I, S>(relations: I, with_equality: bool) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut out: Vec<RelationSymbol> = Vec::new();
        for (name, arity) in relations {
            let name = name.into();
            if !valid_relation_name(&name) {
                return Err(StructureError::InvalidRelationName(name));
            }
            if arity == 0 {
                return Err(StructureError::ZeroArity(name));
            }
            if out.iter().any(|r| r.name == name) {
                return Err(StructureError::DuplicateRelation(name));
            }
            out.push(RelationSymbol { name, arity });
        }
        Ok(Signature {
            relations: out,
            with_equality,
        })
    }

    pub fn relations(&self) -> &[RelationSymbol] {
        &self.relations
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn with_equality(&self) -> bool {
        self.with_equality
    }

    /// The same relation symbols with equality switched on or off.
    pub fn equality(mut self, on: bool) -> Self {
        self.with_equality = on;
        self
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.index_of(name).map(|i| self.relations[i].arity)
    }

    pub fn max_arity(&self) -> usize {
        self.relations.iter().map(|r| r.arity).max().unwrap_or(0)
    }

    pub fn is_unary(&self) -> bool {
        self.relations.iter().all(|r| r.arity == 1)
    }
}

impl fmt::Display for Signature {
    /// `R:1 S:2 [eq]`, the header syntax of structure documents.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for r in &self.relations {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{}:{}", r.name, r.arity)?;
        }
        if self.with_equality {
            if !first {
                f.write_str(" ")?;
            }
            f.write_str("eq")?;
        }
        Ok(())
    }
}
