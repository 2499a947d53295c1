//! Interchangeable algorithms, registered by name and picked at runtime.
//!
//! Each family has a trait and a [`Registry`]. [`Strategies::builtin`] wires
//! up everything shipped with the crate; the CLI selects entries by name.

use std::fmt;
use std::sync::Arc;

use crate::characters::{
    EulerBackend, Prime, ReciprocityBackend, ResidueTable, SquareTableBackend,
};
use crate::error::{Error, Result};
use crate::field_poly::{Fq, MonicPoly, RabinTest, TrialDivision};
use crate::moments::divisor::{BruteForceSums, DivisorSumTable, EulerProductSeries};

/// Decides membership in `P_n` for a monic polynomial of degree `n >= 1`.
pub trait IrreducibilityTest: Send + Sync {
    fn name(&self) -> &'static str;
    fn is_irreducible(&self, ring: &Fq, f: &MonicPoly) -> bool;
}

/// Produces the full table of quadratic-residue signs modulo a prime.
pub trait SymbolBackend: Send + Sync {
    fn name(&self) -> &'static str;
    fn residue_table(&self, ring: &Fq, modulus: &Prime) -> Result<ResidueTable>;
}

/// Computes the per-degree terms of `Σ_{deg m ≤ z} d_k(m²)/|m|`.
pub trait DivisorSumMethod: Send + Sync {
    fn name(&self) -> &'static str;
    fn table(&self, ring: &Fq, k: u32, max_degree: usize) -> Result<DivisorSumTable>;
}

/// Name-indexed set of strategies of one family, with a default.
pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: Vec<(&'static str, Arc<T>)>,
    default: &'static str,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            entries: Vec::new(),
            default: "",
        }
    }

    /// Adds or replaces an entry. The first entry registered becomes the default.
    pub fn register(&mut self, name: &'static str, strategy: Arc<T>) -> &mut Self {
        if let Some(slot) = self.entries.iter_mut().find(|(n, _)| *n == name) {
            slot.1 = strategy;
        } else {
            self.entries.push((name, strategy));
        }
        if self.default.is_empty() {
            self.default = name;
        }
        self
    }

    pub fn set_default(&mut self, name: &str) -> Result<()> {
        let (n, _) = self.lookup(name)?;
        self.default = n;
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<Arc<T>> {
        self.lookup(name).map(|(_, s)| Arc::clone(s))
    }

    pub fn default_strategy(&self) -> Arc<T> {
        self.get(self.default)
            .expect("registry default is always registered")
    }

    pub fn default_name(&self) -> &'static str {
        self.default
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.iter().map(|(n, _)| *n)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &Arc<T>)> + '_ {
        self.entries.iter().map(|(n, s)| (*n, s))
    }

    fn lookup(&self, name: &str) -> Result<&(&'static str, Arc<T>)> {
        self.entries
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().collect::<Vec<_>>().join(", "),
            })
    }
}

impl<T: ?Sized> fmt::Debug for Registry<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("kind", &self.kind)
            .field("entries", &self.names().collect::<Vec<_>>())
            .field("default", &self.default)
            .finish()
    }
}

#[derive(Debug)]
pub struct Strategies {
    pub irreducibility: Registry<dyn IrreducibilityTest>,
    pub symbols: Registry<dyn SymbolBackend>,
    pub divisor_sums: Registry<dyn DivisorSumMethod>,
}

impl Strategies {
    pub fn builtin() -> Self {
        let mut irreducibility: Registry<dyn IrreducibilityTest> = Registry::new("irreducibility");
        irreducibility
            .register("trial-division", Arc::new(TrialDivision))
            .register("rabin", Arc::new(RabinTest));

        let mut symbols: Registry<dyn SymbolBackend> = Registry::new("symbol");
        symbols
            .register("square-table", Arc::new(SquareTableBackend::default()))
            .register("euler", Arc::new(EulerBackend))
            .register("reciprocity", Arc::new(ReciprocityBackend));

        let mut divisor_sums: Registry<dyn DivisorSumMethod> = Registry::new("divisor-sum");
        divisor_sums
            .register("series", Arc::new(EulerProductSeries))
            .register("brute", Arc::new(BruteForceSums::default()));

        Strategies {
            irreducibility,
            symbols,
            divisor_sums,
        }
    }
}

impl Default for Strategies {
    fn default() -> Self {
        Self::builtin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_names_and_defaults() {
        let s = Strategies::builtin();
        assert_eq!(s.symbols.default_name(), "square-table");
        assert_eq!(s.irreducibility.default_name(), "trial-division");
        assert_eq!(s.divisor_sums.default_name(), "series");
        let names: Vec<_> = s.symbols.names().collect();
        assert_eq!(names, ["square-table", "euler", "reciprocity"]);
        for (name, backend) in s.symbols.iter() {
            assert_eq!(backend.name(), name);
        }
        for (name, t) in s.irreducibility.iter() {
            assert_eq!(t.name(), name);
        }
        for (name, m) in s.divisor_sums.iter() {
            assert_eq!(m.name(), name);
        }
    }

    #[test]
    fn unknown_name_lists_alternatives() {
        let s = Strategies::builtin();
        let Err(err) = s.symbols.get("nope") else {
            panic!("unknown name accepted")
        };
        let err = err.to_string();
        assert!(err.contains("square-table, euler, reciprocity"), "{err}");
        let mut reg = Strategies::builtin().irreducibility;
        reg.set_default("rabin").unwrap();
        assert_eq!(reg.default_strategy().name(), "rabin");
        assert!(reg.set_default("missing").is_err());
    }
}
