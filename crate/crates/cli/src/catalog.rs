//! Static catalog of verification checks.

use serde::Serialize;

/// Checks in suite order: cheap certifications first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckId {
    Gauge,
    Angle,
    Structural,
    Minkowski,
    FirstVariation,
    Hk,
    HkClosed,
    Parallel,
    Sweepout,
    Elliptic,
    Maclaurin,
}

impl CheckId {
    pub const ALL: [CheckId; 11] = [
        CheckId::Gauge,
        CheckId::Angle,
        CheckId::Structural,
        CheckId::Minkowski,
        CheckId::FirstVariation,
        CheckId::Hk,
        CheckId::HkClosed,
        CheckId::Parallel,
        CheckId::Sweepout,
        CheckId::Elliptic,
        CheckId::Maclaurin,
    ];

    pub fn name(self) -> &'static str {
        entry(self).name
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|id| id.name() == name)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    /// The statement being checked.
    pub anchor: &'static str,
    pub default_tolerance: f64,
    /// Whether the check runs at every resolution (with a convergence table)
    /// rather than once.
    pub per_resolution: bool,
}

const CATALOG: [CatalogEntry; 11] = [
    CatalogEntry {
        name: "gauge",
        description: "dual gauge homogeneity, support identity, Wulff membership and Cauchy-Schwarz on random samples",
        anchor: "gauge identities of the dual norm",
        default_tolerance: 1e-8,
        per_resolution: false,
    },
    CatalogEntry {
        name: "angle",
        description: "<Φ(x), z> is nondecreasing along the geodesic from x to z, with equality only at x",
        anchor: "anisotropic angle comparison",
        default_tolerance: 1e-12,
        per_resolution: false,
    },
    CatalogEntry {
        name: "structural",
        description: "n ∫ ν dA equals the boundary term built from the conormal",
        anchor: "structural lemma for capillary boundaries",
        default_tolerance: 1e-7,
        per_resolution: true,
    },
    CatalogEntry {
        name: "minkowski",
        description: "∫ H_{r-1}(F(ν) + ω₀<ν,E^F>) dA = ∫ H_r <x,ν> dA for every order r",
        anchor: "anisotropic capillary Minkowski formulas",
        default_tolerance: 1e-7,
        per_resolution: true,
    },
    CatalogEntry {
        name: "first-variation",
        description: "∫ (n F(ν) - H^F <x,ν>) dA equals its boundary term",
        anchor: "first variation of the anisotropic area along the position field",
        default_tolerance: 1e-7,
        per_resolution: true,
    },
    CatalogEntry {
        name: "hk",
        description: "∫ (F(ν) + ω₀<ν,E^F>)/H^F dA ≥ ((n+1)/n)|Ω|, with equality on Wulff caps",
        anchor: "anisotropic capillary Heintze-Karcher inequality",
        default_tolerance: 1e-6,
        per_resolution: true,
    },
    CatalogEntry {
        name: "hk-closed",
        description: "∫ F(ν)/H^F dA ≥ ((n+1)/n)|Ω| plus the directional excess term",
        anchor: "Heintze-Karcher inequality for closed hypersurfaces",
        default_tolerance: 1e-6,
        per_resolution: true,
    },
    CatalogEntry {
        name: "parallel",
        description: "offset surfaces along the shifted Cahn-Hoffman field transport κ, dA and H^F as predicted",
        anchor: "parallel hypersurface transport laws",
        default_tolerance: 1.0,
        per_resolution: false,
    },
    CatalogEntry {
        name: "sweepout",
        description: "inward parallel sets sweep out the enclosed region before reaching focal points",
        anchor: "sweepout claim in the Heintze-Karcher argument",
        default_tolerance: 1e-6,
        per_resolution: false,
    },
    CatalogEntry {
        name: "elliptic",
        description: "the outermost touching Wulff cap from a wetting-face point gives an elliptic point",
        anchor: "existence of anisotropic elliptic points",
        default_tolerance: 1e-6,
        per_resolution: false,
    },
    CatalogEntry {
        name: "maclaurin",
        description: "Maclaurin inequalities H_1 ≥ H_r^{1/r} and the Ros-type volume chain",
        anchor: "Maclaurin inequalities for normalized mean curvatures",
        default_tolerance: 1e-10,
        per_resolution: false,
    },
];

pub fn entry(id: CheckId) -> &'static CatalogEntry {
    &CATALOG[id as usize]
}

pub fn catalog() -> &'static [CatalogEntry] {
    &CATALOG
}

/// Whether a check makes sense for a surface that is `closed` or not and
/// does or does not come with an analytic chart.
pub fn applies(id: CheckId, closed: bool, has_chart: bool) -> bool {
    match id {
        CheckId::Hk | CheckId::Sweepout | CheckId::Elliptic => !closed,
        CheckId::HkClosed => closed,
        CheckId::Parallel => has_chart && !closed,
        _ => true,
    }
}
