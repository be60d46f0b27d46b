//! Model files: a [`LienardSystem`] serialized as TOML.
//!
//! ```toml
//! name = "cubic"
//! d = "inf"
//!
//! [F]
//! name = "F"
//! c1 = true
//! [[F.segments]]
//! lo = 0.0
//! hi = "inf"
//! form = { kind = "polynomial", coeffs = [0.0, -1.0, 0.0, 0.3333333333333333] }
//!
//! [g]
//! name = "g"
//! c1 = true
//! [[g.segments]]
//! lo = 0.0
//! hi = "inf"
//! form = { kind = "polynomial", coeffs = [0.0, 1.0] }
//! ```

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::system::LienardSystem;

/// Parse a model and re-run the construction checks (segment layout,
/// positivity of g).
pub fn from_toml(text: &str) -> Result<LienardSystem> {
    let raw: LienardSystem = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    LienardSystem::new(raw.name, raw.f, raw.g, raw.d)
}

pub fn to_toml(system: &LienardSystem) -> Result<String> {
    toml::to_string(system).map_err(|e| Error::Parse(e.to_string()))
}

pub fn load(path: &Path) -> Result<LienardSystem> {
    from_toml(&fs::read_to_string(path)?)
}

pub fn save(system: &LienardSystem, path: &Path) -> Result<()> {
    crate::report::write_atomic(path, to_toml(system)?.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    #[test]
    fn builtins_round_trip() {
        for s in [
            builtin::vdp(1.0).unwrap(),
            builtin::vdp_bounded(1.0, 7.0).unwrap(),
            builtin::two_cycle().unwrap(),
            builtin::three_cycle().unwrap(),
        ] {
            let text = to_toml(&s).unwrap();
            let back = from_toml(&text).unwrap();
            assert_eq!(back, s, "{text}");
        }
    }

    #[test]
    fn documented_example_parses() {
        let doc = include_str!("model_file.rs")
            .lines()
            .filter_map(|l| l.strip_prefix("//! "))
            .skip_while(|l| !l.starts_with("name"))
            .take_while(|l| !l.starts_with("```"))
            .collect::<Vec<_>>()
            .join("\n");
        let s = from_toml(&doc).unwrap();
        assert!((s.f.value(2.0) - (8.0 / 3.0 - 2.0)).abs() < 1e-15);
        assert!(s.d.is_infinite());
    }

    #[test]
    fn invalid_models_are_rejected() {
        assert!(matches!(from_toml("name = 1"), Err(Error::Parse(_))));
        let s = builtin::vdp(1.0).unwrap();
        let bad = to_toml(&s).unwrap().replace("[0.0, 1.0]", "[0.0, -1.0]");
        assert!(from_toml(&bad).is_err());
    }
}
