use serde::ser::{Serialize, SerializeMap, Serializer};

use super::{DerivedExponents, StepExponents};
use crate::rational::{decimal_string, exact_string, Rational};

/// Ordered `name -> value` pairs serialised as one flat JSON object.
///
/// Each rational `x` contributes `"x": "num/den"` and `"x_decimal": "0.75"`;
/// an undefined value contributes `null` to both.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FlatRecord {
    entries: Vec<(String, Option<String>)>,
}

impl FlatRecord {
    pub fn new() -> Self {
        FlatRecord::default()
    }

    pub fn rational(&mut self, name: &str, q: Option<Rational>) -> &mut Self {
        self.entries.push((name.to_owned(), q.map(|q| exact_string(&q))));
        self.entries.push((format!("{name}_decimal"), q.map(|q| decimal_string(&q))));
        self
    }

    pub fn text(&mut self, name: &str, value: impl Into<String>) -> &mut Self {
        self.entries.push((name.to_owned(), Some(value.into())));
        self
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == name).and_then(|(_, v)| v.as_deref())
    }

    pub fn extend(&mut self, other: FlatRecord) -> &mut Self {
        self.entries.extend(other.entries);
        self
    }
}

impl Serialize for FlatRecord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.entries.len()))?;
        for (k, v) in &self.entries {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

pub trait ToFlat {
    fn to_flat(&self) -> FlatRecord;
}

impl ToFlat for DerivedExponents {
    fn to_flat(&self) -> FlatRecord {
        let mut r = FlatRecord::new();
        r.rational("sigma", Some(self.sigma))
            .rational("eta", Some(self.eta))
            .rational("s_c", Some(self.s_c))
            .rational("beta_tilde", Some(self.beta_tilde))
            .rational("beta_0", self.beta_0)
            .rational("a_endpoint", Some(self.a_endpoint))
            .rational("b_endpoint", Some(self.b_endpoint))
            .rational("x0", Some(self.x0))
            .rational("x1", Some(self.x1))
            .rational("x2", Some(self.x2))
            .rational("x3", Some(self.x3))
            .rational("x4", self.x4)
            .rational("x5", self.x5)
            .rational("y0", Some(self.y0))
            .rational("y1", Some(self.y1))
            .rational("A", Some(self.a_cap));
        r
    }
}

impl ToFlat for StepExponents {
    fn to_flat(&self) -> FlatRecord {
        let mut r = FlatRecord::new();
        r.rational("alpha_tilde", Some(self.alpha_tilde))
            .rational("inv_gamma_m", Some(self.inv_gamma_m))
            .rational("D", Some(self.d))
            .rational("E", Some(self.e))
            .rational("F", Some(self.f));
        r
    }
}
