//! Named scenarios with fixed model parameters.
//!
//! Each preset carries its model parameters, a default axis range that
//! brackets the predicted features, and a representative `feature` point used
//! for single-point checks (`steady --preset`).

use blockade::spectra::{cpb_detunings, tpb_couplings, tpb_detunings, TpbBranch};
use blockade::{Error, ModelParams, Param, Result};

use crate::config::{Axis, OutputSpec, SweepConfig};
use crate::link::Link;

pub const PRESET_NAMES: [&str; 12] = [
    "fig3a", "fig3b", "fig4a", "fig4b", "fig4c", "fig4d", "fig4e", "fig4f", "fig5a", "fig5b", "fig5c", "fig5d",
];

pub const DEFAULT_POINTS: usize = 201;

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub config: SweepConfig,
    /// Axis coordinates of a representative point.
    pub feature: Vec<f64>,
}

impl Preset {
    pub fn feature_params(&self) -> ModelParams {
        self.config.point(&self.feature)
    }
}

/// `Δ_b = (2/3)Δ_a`, `Δ_c = Δ_a − Δ_b`, `Δ_σ = Δ_a`. Writing `Δ_c` as a
/// difference keeps `Δ_b + Δ_c = Δ_a` exact in floating point.
pub fn resonance_links() -> Vec<Link> {
    vec![
        Link::new(Param::DeltaB, vec![(2.0 / 3.0, Param::DeltaA)], 0.0),
        Link::new(Param::DeltaC, vec![(1.0, Param::DeltaA), (-1.0, Param::DeltaB)], 0.0),
        Link::new(Param::DeltaSigma, vec![(1.0, Param::DeltaA)], 0.0),
    ]
}

fn columns(names: &[&str]) -> OutputSpec {
    OutputSpec { columns: names.iter().map(|s| s.to_string()).collect(), ..Default::default() }
}

fn build(name: &'static str, description: &'static str, base: ModelParams, axis1: Axis, axis2: Option<Axis>, links: Vec<Link>, cols: &[&str], feature: Vec<f64>) -> Preset {
    let mut config = SweepConfig::new(base, axis1);
    config.name = Some(name.to_string());
    config.axis2 = axis2;
    config.links = links;
    config.output = columns(cols);
    Preset { name, description, config, feature }
}

pub fn preset_info(name: &str) -> Result<Preset> {
    let n = DEFAULT_POINTS;
    let delta_axis = |lo, hi| Axis::new(Param::DeltaA, lo, hi, n);
    let g_axis = |lo, hi| Axis::new(Param::G, lo, hi, n);
    let p = match name {
        "fig3a" => {
            let base = ModelParams { g: 11.0, j: 2.0, f_a: 0.1, f_b: 0.05, f_c: 0.05, ..Default::default() };
            build(
                "fig3a",
                "g2 of a, b, c and mean photon numbers versus delta_a (g=11, J=2)",
                base,
                delta_axis(-20.0, 20.0),
                None,
                resonance_links(),
                &["g2_a", "g2_b", "g2_c"],
                vec![cpb_detunings(11.0, 2.0).0],
            )
        }
        "fig3b" => {
            let base = ModelParams { g: 3.0, j: 2.0, f_a: 0.02, f_b: 0.01, f_c: 0.01, ..Default::default() };
            build(
                "fig3b",
                "g2_a versus delta_a for J = 2, 4, 6, 8 (g=3)",
                base,
                delta_axis(-12.0, 12.0),
                Some(Axis::new(Param::J, 2.0, 8.0, 4)),
                resonance_links(),
                &["g2_a"],
                vec![cpb_detunings(3.0, 2.0).0, 2.0],
            )
        }
        "fig4a" | "fig4b" | "fig4c" => {
            let j = match name {
                "fig4a" => 2.0,
                "fig4b" => 4.0,
                _ => 6.0,
            };
            let base = ModelParams { g: 8.0, j, f_a: 0.1, ..Default::default() };
            build(
                static_name(name),
                "g2_a and g3_a versus delta_a (g=8)",
                base,
                delta_axis(0.0, 15.0),
                None,
                resonance_links(),
                &["g2_a", "g3_a"],
                vec![tpb_detunings(8.0, j).delta_a1],
            )
        }
        "fig4d" | "fig4e" | "fig4f" => {
            let j = match name {
                "fig4d" => 1.0,
                "fig4e" => 2.0,
                _ => 3.0,
            };
            let base = ModelParams { delta_a: 7.0, j, f_a: 0.1, ..Default::default() };
            let g0 = tpb_couplings(7.0, j, TpbBranch::Outer).into_iter().fold(f64::NAN, f64::max);
            build(
                static_name(name),
                "g2_a and g3_a versus g (delta_a=7)",
                base,
                g_axis(0.0, 10.0),
                None,
                resonance_links(),
                &["g2_a", "g3_a"],
                vec![g0],
            )
        }
        "fig5a" | "fig5b" => {
            let base = ModelParams {
                delta_a: 8.0,
                delta_b: 6.0,
                delta_c: 2.0,
                delta_sigma: 8.0,
                g: 6.2,
                j: 3.0,
                f_a: 0.1,
                ..Default::default()
            };
            if name == "fig5a" {
                build("fig5a", "g2_a and g3_a versus F_a", base, Axis::new(Param::FA, 0.01, 1.0, n), None, vec![], &["g2_a", "g3_a"], vec![0.1])
            } else {
                build("fig5b", "g2_a and g3_a versus J", base, Axis::new(Param::J, -6.0, 6.0, n), None, vec![], &["g2_a", "g3_a"], vec![3.0])
            }
        }
        "fig5c" | "fig5d" => {
            let base = ModelParams {
                delta_a: 7.0,
                delta_b: 3.0,
                delta_c: 4.0,
                delta_sigma: 7.0,
                j: 1.0,
                f_a: 0.05,
                ..Default::default()
            };
            let g0 = tpb_couplings(7.0, 1.0, TpbBranch::Outer).into_iter().fold(f64::NAN, f64::max);
            if name == "fig5c" {
                build("fig5c", "g2_a and g3_a versus g", base, g_axis(-8.0, 8.0), None, vec![], &["g2_a", "g3_a"], vec![g0])
            } else {
                build("fig5d", "N_a versus g", base, g_axis(-8.0, 8.0), None, vec![], &["N_a"], vec![g0])
            }
        }
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    Ok(p)
}

fn static_name(name: &str) -> &'static str {
    PRESET_NAMES.into_iter().find(|n| *n == name).expect("known preset")
}

pub fn preset(name: &str) -> Result<SweepConfig> {
    Ok(preset_info(name)?.config)
}
