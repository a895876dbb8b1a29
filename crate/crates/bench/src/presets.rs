//! Config files shipped with the crate.

/// A named config bundled into the binary.
#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub text: &'static str,
}

/// The four inverse-design situations.
pub const SITUATIONS: [Preset; 4] = [
    Preset {
        name: "standard",
        text: include_str!("../presets/standard.conf"),
    },
    Preset {
        name: "coarser-grid",
        text: include_str!("../presets/coarser-grid.conf"),
    },
    Preset {
        name: "longer-time",
        text: include_str!("../presets/longer-time.conf"),
    },
    Preset {
        name: "sharper-front",
        text: include_str!("../presets/sharper-front.conf"),
    },
];

/// Forward studies and the identity check.
pub const EXTRAS: [Preset; 4] = [
    Preset {
        name: "forward-error",
        text: include_str!("../presets/forward-error.conf"),
    },
    Preset {
        name: "convergence",
        text: include_str!("../presets/convergence.conf"),
    },
    Preset {
        name: "wide-front",
        text: include_str!("../presets/wide-front.conf"),
    },
    Preset {
        name: "identity",
        text: include_str!("../presets/identity.conf"),
    },
];

pub fn all() -> impl Iterator<Item = &'static Preset> {
    SITUATIONS.iter().chain(EXTRAS.iter())
}

pub fn find(name: &str) -> Option<&'static Preset> {
    all().find(|p| p.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ExperimentConfig, ExperimentKind};

    #[test]
    fn every_preset_parses_under_its_own_name() {
        for p in all() {
            let cfg = ExperimentConfig::parse(p.text, "unnamed").unwrap_or_else(|e| panic!("{}: {e}", p.name));
            assert_eq!(cfg.name, p.name);
        }
    }

    #[test]
    fn situations_differ_in_one_setting_each() {
        let cfgs: Vec<ExperimentConfig> = SITUATIONS
            .iter()
            .map(|p| ExperimentConfig::parse(p.text, p.name).unwrap())
            .collect();
        let row = |c: &ExperimentConfig| (c.grids[0], c.times[0], c.delta);
        assert_eq!(row(&cfgs[0]), ((160, 160), 4.0, 1.0));
        assert_eq!(row(&cfgs[1]), ((80, 80), 4.0, 1.0));
        assert_eq!(row(&cfgs[2]), ((160, 160), 8.0, 1.0));
        assert_eq!(row(&cfgs[3]), ((160, 160), 4.0, 1e-6));
        assert_eq!(cfgs[3].max_iter, 300);
        assert!(cfgs.iter().all(|c| c.kind == ExperimentKind::InverseDesign));
    }
}
