use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::syntax::Var;

/// Total map from variables to naturals, default 0.
///
/// Only non-zero bindings are stored, so derived equality is extensional.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Valuation {
    bindings: Vec<(Var, u64)>,
}

impl Valuation {
    pub fn new() -> Self {
        Valuation::default()
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, u64)>) -> Self {
        let mut g = Valuation::new();
        for (k, v) in pairs {
            g.set(&Var::new(k), v);
        }
        g
    }

    /// Parses `x=1,y=2`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let mut g = Valuation::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| format!("expected name=value, got {part:?}"))?;
            let k = k.trim();
            if k.is_empty() || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(format!("bad variable name {k:?}"));
            }
            let v: u64 = v
                .trim()
                .parse()
                .map_err(|_| format!("bad value for {k}: {v:?}"))?;
            g.set(&Var::new(k), v);
        }
        Ok(g)
    }

    pub fn get(&self, name: &str) -> u64 {
        match self.bindings.binary_search_by(|(k, _)| k.as_str().cmp(name)) {
            Ok(i) => self.bindings[i].1,
            Err(_) => 0,
        }
    }

    pub fn set(&mut self, var: &Var, value: u64) {
        match self.bindings.binary_search_by(|(k, _)| k.cmp(var)) {
            Ok(i) if value == 0 => {
                self.bindings.remove(i);
            }
            Ok(i) => self.bindings[i].1 = value,
            Err(_) if value == 0 => {}
            Err(i) => self.bindings.insert(i, (var.clone(), value)),
        }
    }

    pub fn with(&self, name: &str, value: u64) -> Self {
        let mut g = self.clone();
        g.set(&Var::new(name), value);
        g
    }

    /// Variables with a non-zero value.
    pub fn support(&self) -> impl Iterator<Item = (&Var, u64)> {
        self.bindings.iter().map(|(k, v)| (k, *v))
    }

    /// Values of the given variables plus every non-zero binding.
    pub fn to_map(&self, extra: &[Var]) -> BTreeMap<String, u64> {
        let mut m: BTreeMap<String, u64> =
            extra.iter().map(|v| (v.to_string(), self.get(v.as_str()))).collect();
        for (k, v) in self.support() {
            m.insert(k.to_string(), v);
        }
        m
    }

    /// All valuations of `vars` over `0..=max`, other variables 0.
    pub fn enumerate(vars: &[Var], max: u64) -> Vec<Valuation> {
        let mut out = vec![Valuation::new()];
        for v in vars {
            let mut next = Vec::with_capacity(out.len() * (max as usize + 1));
            for g in &out {
                for k in 0..=max {
                    let mut h = g.clone();
                    h.set(v, k);
                    next.push(h);
                }
            }
            out = next;
        }
        out
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_map(&[]).serialize(s)
    }
}
