use crate::holomap::{check_default, MapDescriptor};
use crate::{Error, Result};

/// A Herglotz vector field that is piecewise constant in time.
///
/// Piece `i` is active on `[t_i, t_{i+1})`, the last one on `[t_m, ∞)`, with
/// `t_0 = 0`. Every time that is not one of the interior breakpoints
/// `t_1..t_m` is a regular time of the field.
#[derive(Debug, Clone, PartialEq)]
pub struct HerglotzField {
    dim: usize,
    breakpoints: Vec<f64>,
    pieces: Vec<MapDescriptor>,
}

impl HerglotzField {
    /// Validates ordering, dimensions and `M_n` membership of every piece
    /// on the default grid.
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<MapDescriptor>) -> Result<HerglotzField> {
        let field = HerglotzField::unchecked(breakpoints, pieces)?;
        for (i, p) in field.pieces.iter().enumerate() {
            if field.pieces[..i].contains(p) {
                continue;
            }
            let report = check_default(p)?;
            if !report.pass {
                return Err(Error::InvalidField(format!(
                    "piece {i} is not in M_n (margin {:e}, normalization ok: {})",
                    report.worst_margin, report.normalization_ok
                )));
            }
        }
        Ok(field)
    }

    /// Structural checks only; pieces are trusted to lie in `M_n`.
    pub(crate) fn unchecked(
        breakpoints: Vec<f64>,
        pieces: Vec<MapDescriptor>,
    ) -> Result<HerglotzField> {
        if pieces.is_empty() || breakpoints.len() != pieces.len() {
            return Err(Error::InvalidField(format!(
                "{} breakpoints for {} pieces",
                breakpoints.len(),
                pieces.len()
            )));
        }
        if breakpoints[0] != 0.0 {
            return Err(Error::InvalidField("first breakpoint must be 0".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) || breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidField("breakpoints must be finite and strictly increasing".into()));
        }
        let dim = pieces[0].dim();
        if let Some(p) = pieces.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        Ok(HerglotzField {
            dim,
            breakpoints,
            pieces,
        })
    }

    /// The time-independent field `G(z, t) = h(z)`.
    pub fn constant(h: MapDescriptor) -> Result<HerglotzField> {
        HerglotzField::new(vec![0.0], vec![h])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[MapDescriptor] {
        &self.pieces
    }

    pub fn piece_index(&self, t: f64) -> usize {
        self.breakpoints.partition_point(|&b| b <= t).saturating_sub(1)
    }

    /// `G(·, t)`.
    pub fn piece_at(&self, t: f64) -> &MapDescriptor {
        &self.pieces[self.piece_index(t)]
    }

    /// True unless `t` is an interior breakpoint (or negative).
    pub fn is_regular(&self, t: f64) -> bool {
        t >= 0.0 && t.is_finite() && !self.breakpoints[1..].contains(&t)
    }

    /// Maximal sub-intervals of `[s, t]` on which the field is constant.
    pub fn segments(&self, s: f64, t: f64) -> Vec<(f64, f64, &MapDescriptor)> {
        let mut out = Vec::new();
        if t <= s {
            return out;
        }
        let mut i = self.piece_index(s);
        let mut a = s;
        loop {
            let end = self.breakpoints.get(i + 1).copied().unwrap_or(f64::INFINITY);
            let b = end.min(t);
            out.push((a, b, &self.pieces[i]));
            if b >= t {
                break;
            }
            a = b;
            i += 1;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn two_piece() -> HerglotzField {
        HerglotzField::new(
            vec![0.0, 1.0],
            vec![
                MapDescriptor::linear_radial(1),
                MapDescriptor::moebius1(c64(1.0, 0.0)).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn piece_lookup_is_right_continuous() {
        let g = two_piece();
        assert_eq!(g.piece_index(0.0), 0);
        assert_eq!(g.piece_index(0.999), 0);
        assert_eq!(g.piece_index(1.0), 1);
        assert_eq!(g.piece_index(7.0), 1);
        assert!(!g.is_regular(1.0));
        assert!(g.is_regular(0.0) && g.is_regular(0.5));
    }

    #[test]
    fn segments_split_at_breakpoints() {
        let g = two_piece();
        let segs: Vec<(f64, f64)> = g.segments(0.5, 2.0).iter().map(|s| (s.0, s.1)).collect();
        assert_eq!(segs, vec![(0.5, 1.0), (1.0, 2.0)]);
        assert!(g.segments(1.0, 1.0).is_empty());
        assert_eq!(g.segments(1.0, 3.0).len(), 1);
    }

    #[test]
    fn invalid_fields_are_rejected() {
        assert!(HerglotzField::new(vec![0.0, 0.0], vec![MapDescriptor::linear_radial(1); 2]).is_err());
        assert!(HerglotzField::new(vec![0.5], vec![MapDescriptor::linear_radial(1)]).is_err());
        assert!(HerglotzField::new(
            vec![0.0, 1.0],
            vec![MapDescriptor::linear_radial(1), MapDescriptor::linear_radial(2)]
        )
        .is_err());
        let bad = crate::holomap::Jet::from_terms(
            1,
            2,
            [(0, &[1u32][..], c64(-1.0, 0.0)), (0, &[2u32][..], c64(3.0, 0.0))],
        )
        .unwrap();
        assert!(matches!(
            HerglotzField::constant(MapDescriptor::PolyJet(bad)),
            Err(Error::InvalidField(_))
        ));
    }
}
