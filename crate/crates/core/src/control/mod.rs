//! Linear functionals, transported functionals `L_t` and the checks built
//! on the Hamiltonian `Re L_t(h)`.

mod checks;
mod functional;
mod scan;
mod transport;

pub use checks::{
    hamiltonian_scan, nonconstancy_probe, pommerenke_check, pontryagin_check, support_screen,
    support_screen_default, PommerenkeReport, PontryaginReport, ProbeReport, ProbeValue, ScreenResult,
    DEFAULT_SCREEN_MARGIN, DEFAULT_T_LIMIT, PROBE_THRESHOLD,
};
pub use functional::{eval_functional, Atom, FunctionalTarget, LinearFunctional};
pub use scan::{
    hamiltonian_scan_with, maximize, Family, HamiltonianScan, Maximizer, DEFAULT_SPHERE_DESIGN,
    DEFAULT_ZETA_GRID, REFINE_TOL,
};
pub use transport::{transported_functional, Transport, TransportedFunctional};

#[cfg(test)]
mod tests;
