//! Named parameter packs. Each preset fills the fields its scenario fixes;
//! anything else falls back to flags, the config file or the defaults.

use crate::atoms::Scenario;
use crate::beams::PhaseForm;
use crate::error::{Error, Result};

use super::config::{RawConfig, TimeList};

pub const NAMES: [&str; 13] = [
    "fig2", "fig3-H", "fig3-Li", "fig3-Na", "fig3-K", "fig4-H", "fig4-Li", "fig4-Na", "fig4-K",
    "fig5-H", "fig5-Li", "fig5-Na", "fig5-K",
];

fn base(species: &str, times: &[&str]) -> RawConfig {
    let velocity = if species == "H" { "1.4e6cm/s" } else { "0.7e6cm/s" };
    RawConfig {
        species: Some(species.to_string()),
        velocity: Some(velocity.to_string()),
        cone_ratio: Some(0.2),
        ell: Some(2),
        field: Some("4GV/cm".to_string()),
        phi_laser: Some("0.5pi".to_string()),
        scenario: Some(Scenario::Crossed),
        phase_form: Some(PhaseForm::Approx),
        time: Some(TimeList::Items(times.iter().map(|t| t.to_string()).collect())),
        phi: Some("1/3pi".to_string()),
        xi_min: Some(0.0),
        xi_max: Some(15.0),
        ..Default::default()
    }
}

/// Looks up a preset by name (species part case-insensitive).
pub fn preset(name: &str) -> Result<RawConfig> {
    let canonical = NAMES
        .iter()
        .find(|n| n.eq_ignore_ascii_case(name))
        .ok_or_else(|| {
            Error::Config(format!(
                "--preset: unknown preset '{name}' (available: {})",
                NAMES.join(", ")
            ))
        })?;
    let mut raw = match canonical.split_once('-') {
        None => base("H", &["0fs"]),
        Some((fig, species)) => match fig {
            "fig3" => base(species, &["10fs", "15fs", "20fs"]),
            "fig4" => base(species, &["20fs"]),
            _ if species == "H" => base(species, &["10fs", "15fs", "20fs"]),
            _ => base(species, &["10fs"]),
        },
    };
    raw.preset = Some(canonical.to_string());
    Ok(raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves() {
        for name in NAMES {
            let raw = preset(name).unwrap();
            assert_eq!(raw.preset.as_deref(), Some(name));
        }
        assert!(preset("FIG3-k").is_ok());
        assert!(preset("fig6-H").is_err());
    }

    #[test]
    fn preset_contents() {
        let k = preset("fig3-K").unwrap();
        assert_eq!(k.velocity.as_deref(), Some("0.7e6cm/s"));
        assert_eq!(k.field.as_deref(), Some("4GV/cm"));
        let h = preset("fig2").unwrap();
        assert_eq!(h.time, Some(TimeList::Items(vec!["0fs".into()])));
        let na = preset("fig5-Na").unwrap();
        assert_eq!(na.time, Some(TimeList::Items(vec!["10fs".into()])));
        let h5 = preset("fig5-H").unwrap();
        assert_eq!(h5.time.unwrap(), TimeList::Items(vec!["10fs".into(), "15fs".into(), "20fs".into()]));
    }
}
