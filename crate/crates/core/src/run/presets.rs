use super::config::{parse_config, ParsedConfig};
use crate::error::{Error, Result};

/// Named configurations shipped with the library, in listing order.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig1c", include_str!("../../presets/fig1c.toml")),
    ("fig2", include_str!("../../presets/fig2.toml")),
    ("fig3a", include_str!("../../presets/fig3a.toml")),
    ("fig3b", include_str!("../../presets/fig3b.toml")),
    ("fig4", include_str!("../../presets/fig4.toml")),
    ("fig4plus", include_str!("../../presets/fig4plus.toml")),
    ("fig5", include_str!("../../presets/fig5.toml")),
    ("fig5pp", include_str!("../../presets/fig5pp.toml")),
    ("fig7", include_str!("../../presets/fig7.toml")),
    ("fig10a", include_str!("../../presets/fig10a.toml")),
    ("fig10b", include_str!("../../presets/fig10b.toml")),
    ("fig10c", include_str!("../../presets/fig10c.toml")),
    ("fig11half", include_str!("../../presets/fig11half.toml")),
    ("fig11", include_str!("../../presets/fig11.toml")),
    ("fig12a", include_str!("../../presets/fig12a.toml")),
    ("fig12b", include_str!("../../presets/fig12b.toml")),
    ("hardware", include_str!("../../presets/hardware.toml")),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

/// Raw TOML of a preset.
pub fn preset_text(name: &str) -> Result<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t).ok_or_else(|| {
        Error::config(format!("unknown preset `{name}`; available: {}", preset_names().collect::<Vec<_>>().join(", ")))
    })
}

/// First line of a preset with its comment marker stripped.
pub fn preset_description(name: &str) -> Result<&'static str> {
    Ok(preset_text(name)?.lines().next().and_then(|l| l.strip_prefix("# ")).unwrap_or(""))
}

pub fn load_preset(name: &str) -> Result<ParsedConfig> {
    parse_config(preset_text(name)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses() {
        for name in preset_names() {
            let p = load_preset(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(!preset_description(name).unwrap().is_empty(), "{name}");
            assert_eq!(parse_config(&p.config.to_toml()).unwrap().config, p.config, "{name}");
        }
    }

    #[test]
    fn unknown_preset_lists_alternatives() {
        let e = preset_text("fig99").unwrap_err().to_string();
        assert!(e.contains("fig10b"), "{e}");
    }
}
