use crate::holomap::{check_default, MapDescriptor};
use crate::loewner::HerglotzField;
use crate::{Error, Result};

/// A needle of width `eps` ending at `time`, carrying the control `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeedleSpec {
    time: f64,
    h: MapDescriptor,
    eps: f64,
}

impl NeedleSpec {
    /// Checks `0 < eps ≤ time` and that `h` passes the default membership test.
    pub fn new(time: f64, h: MapDescriptor, eps: f64) -> Result<NeedleSpec> {
        NeedleSpec::check_window(time, eps)?;
        let report = check_default(&h)?;
        if !report.pass {
            return Err(Error::InvalidNeedle(format!(
                "control is not in M_n (margin {:e})",
                report.worst_margin
            )));
        }
        Ok(NeedleSpec { time, h, eps })
    }

    fn check_window(time: f64, eps: f64) -> Result<()> {
        if !(eps > 0.0 && time.is_finite() && eps <= time) {
            return Err(Error::InvalidNeedle(format!(
                "window ({}, {time}) is not inside [0, {time}]",
                time - eps
            )));
        }
        Ok(())
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn control(&self) -> &MapDescriptor {
        &self.h
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Same needle with another width.
    pub fn with_eps(&self, eps: f64) -> Result<NeedleSpec> {
        NeedleSpec::check_window(self.time, eps)?;
        Ok(NeedleSpec { eps, ..self.clone() })
    }
}

/// Rejects needle times that are breakpoints of `g`.
pub(crate) fn check_regular(g: &HerglotzField, time: f64) -> Result<()> {
    if !g.is_regular(time) {
        return Err(Error::InvalidNeedle(format!(
            "needle time {time} is not a regular time of the field"
        )));
    }
    Ok(())
}

/// Inserts breakpoints at `a < b`, replacing the piece on `[a, b)` by
/// `window` when given. With `merge`, the new breakpoints `a` and `b` are
/// dropped where the pieces on both sides agree; existing breakpoints are
/// always kept so the field is unchanged off the window.
pub(crate) fn insert_window(
    g: &HerglotzField,
    a: f64,
    b: f64,
    window: Option<&MapDescriptor>,
    merge: bool,
) -> Result<HerglotzField> {
    if g.breakpoints().iter().any(|&t| a < t && t < b) {
        return Err(Error::InvalidNeedle(format!(
            "window ({a}, {b}) contains a breakpoint of the field"
        )));
    }
    let inside = window.unwrap_or_else(|| g.piece_at(a));
    let mut starts = Vec::new();
    let mut pieces: Vec<MapDescriptor> = Vec::new();
    let mut push = |t: f64, p: &MapDescriptor, edge: bool| {
        if edge && merge && pieces.last() == Some(p) {
            return;
        }
        starts.push(t);
        pieces.push(p.clone());
    };
    for (&t, p) in g.breakpoints().iter().zip(g.pieces()) {
        if t < a {
            push(t, p, false);
        }
    }
    push(a, inside, true);
    push(b, g.piece_at(b), true);
    for (&t, p) in g.breakpoints().iter().zip(g.pieces()) {
        if t > b {
            push(t, p, false);
        }
    }
    HerglotzField::unchecked(starts, pieces)
}

/// The needle variation `G_ε`: equal to `G` off `(T−ε, T)` and to `h` on it.
///
/// The window edges are dropped where the pieces agree, so a needle carrying
/// the active piece returns `G` itself.
pub fn needle_field(g: &HerglotzField, spec: &NeedleSpec) -> Result<HerglotzField> {
    if spec.h.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: spec.h.dim(),
        });
    }
    check_regular(g, spec.time)?;
    insert_window(g, spec.time - spec.eps, spec.time, Some(&spec.h), true)
}
