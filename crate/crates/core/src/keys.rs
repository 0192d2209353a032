//! `family:name=value,...` catalog keys shared by symbols and test functions.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CatalogKey<'a> {
    pub source: &'a str,
    pub family: &'a str,
    params: Vec<(&'a str, f64)>,
}

impl<'a> CatalogKey<'a> {
    pub fn parse(what: &'static str, key: &'a str) -> Result<Self> {
        let (family, rest) = key.split_once(':').unwrap_or((key, ""));
        let mut params = Vec::new();
        for item in rest.split(',').filter(|s| !s.trim().is_empty()) {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Error::parse(what, key, format!("expected name=value, got `{item}`")))?;
            let parsed: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::parse(what, key, format!("`{}` is not a number", value.trim())))?;
            let name = name.trim();
            if params.iter().any(|(n, _)| *n == name) {
                return Err(Error::parse(what, key, format!("parameter `{name}` given twice")));
            }
            params.push((name, parsed));
        }
        Ok(Self {
            source: key,
            family: family.trim(),
            params,
        })
    }

    /// Values for `names` in order; `defaults[i] = None` marks a required parameter.
    /// Parameters outside `names` are rejected.
    pub fn take(&self, what: &'static str, names: &[&str], defaults: &[Option<f64>]) -> Result<Vec<f64>> {
        debug_assert_eq!(names.len(), defaults.len());
        if let Some((unknown, _)) = self.params.iter().find(|(n, _)| !names.contains(n)) {
            return Err(Error::parse(
                what,
                self.source,
                format!("unknown parameter `{unknown}` for `{}` (allowed: {})", self.family, names.join(", ")),
            ));
        }
        names
            .iter()
            .zip(defaults)
            .map(|(name, default)| {
                self.params
                    .iter()
                    .find(|(n, _)| n == name)
                    .map(|(_, v)| *v)
                    .or(*default)
                    .ok_or_else(|| Error::parse(what, self.source, format!("missing parameter `{name}`")))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_validates() {
        let k = CatalogKey::parse("f", "gaussian:center=0.5").unwrap();
        assert_eq!(k.family, "gaussian");
        let v = k.take("f", &["center", "width"], &[Some(0.0), Some(1.0)]).unwrap();
        assert_eq!(v, vec![0.5, 1.0]);
        assert!(k.take("f", &["width"], &[Some(1.0)]).is_err());
        assert!(CatalogKey::parse("f", "a:x=1,x=2").is_err());
        assert!(CatalogKey::parse("f", "a:x=abc").is_err());
        let bare = CatalogKey::parse("f", "one").unwrap();
        assert!(bare.take("f", &["c"], &[None]).is_err());
    }
}
