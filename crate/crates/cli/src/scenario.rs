//! Scenario files: a TOML document describing one field, optional
//! functional and control family, and the parameters of each task.
//!
//! Complex numbers are `[re, im]` pairs, points are lists of them, multi-
//! indices are integer lists and components are 1-based.

use std::path::Path;

use loewner_core::control::{Atom, Family, LinearFunctional, DEFAULT_SPHERE_DESIGN, DEFAULT_ZETA_GRID};
use loewner_core::holomap::{CVec, Jet, MapDescriptor};
use loewner_core::loewner::{HerglotzField, LimitOptions, Tolerances};
use loewner_core::{c64, Complex64};
use serde::Deserialize;

use crate::error::CliError;

pub type Pair = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Flow,
    Map,
    Vary,
    Hamiltonian,
    Pontryagin,
    Pommerenke,
    Screen,
    Membership,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Flow => "flow",
            Task::Map => "map",
            Task::Vary => "vary",
            Task::Hamiltonian => "hamiltonian",
            Task::Pontryagin => "pontryagin",
            Task::Pommerenke => "pommerenke",
            Task::Screen => "screen",
            Task::Membership => "membership",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub dimension: usize,
    pub task: Option<Task>,
    pub field: FieldSpec,
    pub functional: Option<FunctionalSpec>,
    pub family: Option<FamilySpec>,
    #[serde(default)]
    pub tolerances: TolSpec,
    pub flow: Option<FlowSpec>,
    pub map: Option<MapTaskSpec>,
    pub vary: Option<VarySpec>,
    pub hamiltonian: Option<ScanSpec>,
    pub pontryagin: Option<PontryaginSpec>,
    pub pommerenke: Option<PommerenkeSpec>,
    pub screen: Option<ScreenSpec>,
    pub membership: Option<MembershipSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    #[serde(default = "zero_breakpoints")]
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<MapSpec>,
}

fn zero_breakpoints() -> Vec<f64> {
    vec![0.0]
}

/// Serialized [`MapDescriptor`].
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    LinearRadial,
    /// `u` defaults to the first coordinate axis.
    SliceMoebius {
        zeta: Pair,
        u: Option<Vec<Pair>>,
    },
    /// Shorthand for the one-variable Möbius map with `ζ = −1`.
    Koebe,
    PolyJet {
        degree: usize,
        terms: Vec<TermSpec>,
    },
    ConvexCombo {
        weights: Vec<f64>,
        parts: Vec<MapSpec>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub component: usize,
    pub index: Vec<u32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalSpec {
    pub atoms: Vec<AtomSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AtomSpec {
    Point {
        z: Vec<Pair>,
        component: usize,
        #[serde(default = "unit_weight")]
        weight: Pair,
    },
    Coefficient {
        index: Vec<u32>,
        component: usize,
        #[serde(default = "unit_weight")]
        weight: Pair,
    },
}

fn unit_weight() -> Pair {
    [1.0, 0.0]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Explicit {
        members: Vec<MapSpec>,
    },
    SliceMoebius {
        #[serde(default = "default_zeta_grid")]
        zeta_grid: usize,
        #[serde(default = "yes")]
        refine: bool,
        #[serde(default = "default_directions")]
        directions: usize,
    },
}

fn default_zeta_grid() -> usize {
    DEFAULT_ZETA_GRID
}

fn default_directions() -> usize {
    DEFAULT_SPHERE_DESIGN
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolSpec {
    pub abs: Option<f64>,
    pub rel: Option<f64>,
    pub max_steps: Option<usize>,
    /// Stabilization tolerance of the infinite-horizon limit.
    pub limit: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    #[serde(default)]
    pub s: f64,
    pub times: Vec<f64>,
    pub points: Vec<Vec<Pair>>,
    pub degree: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapTaskSpec {
    #[serde(default)]
    pub s: f64,
    #[serde(default)]
    pub points: Vec<Vec<Pair>>,
    pub degree: Option<usize>,
}

/// A final time: a number or the string `"inf"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum TimeSpec {
    Finite(f64),
    Named(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarySpec {
    #[serde(default)]
    pub s: f64,
    pub needle_time: f64,
    pub control: MapSpec,
    pub times: Vec<TimeSpec>,
    pub points: Vec<Vec<Pair>>,
    pub ladder: Option<Vec<f64>>,
    #[serde(default = "yes")]
    pub scaled: bool,
    pub threshold: Option<f64>,
    #[serde(default = "default_terminal")]
    pub terminal_tol: f64,
}

fn default_terminal() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub t_grid: Vec<f64>,
    /// If set, the scan fails when `max |m(t) − m(t₀)|` exceeds it.
    pub constancy_tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PontryaginSpec {
    pub t_grid: Vec<f64>,
    #[serde(default = "default_slack")]
    pub slack: f64,
}

fn default_slack() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PommerenkeSpec {
    #[serde(default = "default_t_limit")]
    pub t_limit: f64,
    #[serde(default = "default_pommerenke_tol")]
    pub tol: f64,
    /// Also require `|m(0) + Re L(F)| ≤ initial_tol`; only sensible when the
    /// family contains the maximizer over the whole class.
    pub initial_tol: Option<f64>,
}

fn default_t_limit() -> f64 {
    loewner_core::control::DEFAULT_T_LIMIT
}

fn default_pommerenke_tol() -> f64 {
    1e-4
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScreenSpec {
    pub time: f64,
    #[serde(default = "default_margin")]
    pub margin: f64,
    pub radii: Option<Vec<f64>>,
    pub directions: Option<usize>,
}

fn default_margin() -> f64 {
    loewner_core::control::DEFAULT_SCREEN_MARGIN
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MembershipSpec {
    /// Maps to test; the field's pieces when absent.
    pub maps: Option<Vec<MapSpec>>,
    pub radii: Option<Vec<f64>>,
    pub directions: Option<usize>,
    pub tol: Option<f64>,
    /// Polynomial perturbations `P` for which `δ(P)` is reported.
    #[serde(default)]
    pub perturbations: Vec<MapSpec>,
    pub radius_tol: Option<f64>,
}

pub fn load(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Scenario, CliError> {
    let sc: Scenario = toml::from_str(text).map_err(|e| CliError::Input(format!("schema: {e}")))?;
    if sc.dimension == 0 {
        return Err(CliError::Input("dimension must be positive".into()));
    }
    Ok(sc)
}

pub fn complex(p: Pair) -> Complex64 {
    c64(p[0], p[1])
}

pub fn point(n: usize, z: &[Pair]) -> Result<CVec, CliError> {
    if z.len() != n {
        return Err(CliError::Input(format!("point {z:?} has {} coordinates, expected {n}", z.len())));
    }
    let v = CVec::new(z.iter().map(|p| complex(*p)).collect()).map_err(CliError::input)?;
    v.check_in_ball(n).map_err(CliError::input)?;
    Ok(v)
}

pub fn points(n: usize, zs: &[Vec<Pair>]) -> Result<Vec<CVec>, CliError> {
    zs.iter().map(|z| point(n, z)).collect()
}

fn component(k: usize, n: usize) -> Result<usize, CliError> {
    if k == 0 || k > n {
        return Err(CliError::Input(format!("component {k} outside 1..={n}")));
    }
    Ok(k - 1)
}

impl MapSpec {
    pub fn build(&self, n: usize) -> Result<MapDescriptor, CliError> {
        let m = match self {
            MapSpec::LinearRadial => MapDescriptor::linear_radial(n),
            MapSpec::SliceMoebius { zeta, u } => {
                let u = match u {
                    Some(u) => CVec::new(u.iter().map(|p| complex(*p)).collect()).map_err(CliError::input)?,
                    None => CVec::basis(n, 0),
                };
                MapDescriptor::slice_moebius(complex(*zeta), u).map_err(CliError::input)?
            }
            MapSpec::Koebe => {
                if n != 1 {
                    return Err(CliError::Input("kind = \"koebe\" needs dimension 1".into()));
                }
                MapDescriptor::koebe_field()
            }
            MapSpec::PolyJet { degree, terms } => {
                let mut jet = Jet::zero(n, *degree).map_err(CliError::input)?;
                for t in terms {
                    let k = component(t.component, n)?;
                    jet.set(k, &t.index, c64(t.re, t.im)).map_err(CliError::input)?;
                }
                MapDescriptor::PolyJet(jet)
            }
            MapSpec::ConvexCombo { weights, parts } => {
                let parts = parts.iter().map(|p| p.build(n)).collect::<Result<Vec<_>, _>>()?;
                MapDescriptor::convex_combo(weights.clone(), parts).map_err(CliError::input)?
            }
        };
        if m.dim() != n {
            return Err(CliError::Input(format!("map of dimension {} in a scenario of dimension {n}", m.dim())));
        }
        Ok(m)
    }
}

impl Scenario {
    pub fn field(&self) -> Result<HerglotzField, CliError> {
        let pieces = self
            .field
            .pieces
            .iter()
            .map(|p| p.build(self.dimension))
            .collect::<Result<Vec<_>, _>>()?;
        HerglotzField::new(self.field.breakpoints.clone(), pieces).map_err(CliError::input)
    }

    pub fn functional(&self) -> Result<LinearFunctional, CliError> {
        let spec = self
            .functional
            .as_ref()
            .ok_or_else(|| CliError::Input("this task needs a [functional] section".into()))?;
        let n = self.dimension;
        let atoms = spec
            .atoms
            .iter()
            .map(|a| {
                Ok(match a {
                    AtomSpec::Point { z, component: k, weight } => Atom::Point {
                        z: point(n, z)?,
                        component: component(*k, n)?,
                        weight: complex(*weight),
                    },
                    AtomSpec::Coefficient { index, component: k, weight } => Atom::Coeff {
                        alpha: index.clone(),
                        component: component(*k, n)?,
                        weight: complex(*weight),
                    },
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        LinearFunctional::new(atoms).map_err(CliError::input)
    }

    pub fn family(&self) -> Result<Family, CliError> {
        match &self.family {
            None => Ok(Family::slice_moebius()),
            Some(FamilySpec::Explicit { members }) => Ok(Family::Explicit(
                members.iter().map(|m| m.build(self.dimension)).collect::<Result<_, _>>()?,
            )),
            Some(FamilySpec::SliceMoebius { zeta_grid, refine, directions }) => Ok(Family::SliceMoebius {
                zeta_grid: *zeta_grid,
                refine: *refine,
                directions: *directions,
            }),
        }
    }

    /// Scenario tolerances with command-line overrides applied.
    pub fn limit_options(&self, overrides: &TolSpec) -> Result<LimitOptions, CliError> {
        let mut o = LimitOptions::default();
        let t = &self.tolerances;
        let pick = |cli: Option<f64>, file: Option<f64>, dflt: f64| cli.or(file).unwrap_or(dflt);
        o.integrator = Tolerances {
            abs: pick(overrides.abs, t.abs, o.integrator.abs),
            rel: pick(overrides.rel, t.rel, o.integrator.rel),
            max_steps: overrides.max_steps.or(t.max_steps).unwrap_or(o.integrator.max_steps),
        };
        o.tol = pick(overrides.limit, t.limit, o.tol);
        if !(o.integrator.abs > 0.0 && o.integrator.rel > 0.0 && o.tol > 0.0 && o.integrator.max_steps > 0) {
            return Err(CliError::Input("all tolerances must be positive".into()));
        }
        Ok(o)
    }

    pub fn section<'a, T>(&self, s: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
        s.as_ref()
            .ok_or_else(|| CliError::Input(format!("task needs a [{name}] section")))
    }
}
