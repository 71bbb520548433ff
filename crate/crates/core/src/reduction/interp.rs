//! Interpolation points with tangential directions.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ltimodel::{transfer_eval, Side, StateSpace};

const CONJ_TOL: f64 = 1e-10;

/// Interpolation points `σᵢ` with tangential directions.
///
/// Input-side directions are length-`m` columns `t̃ᵢ`; output-side
/// directions are the length-`p` rows `t̂ᵢ` stored as vectors. The set is
/// closed under conjugation, with the conjugate point carrying the conjugate
/// direction.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationSet {
    points: Vec<Complex64>,
    directions: Vec<DVector<Complex64>>,
    side: Side,
}

/// A real point or one representative (`Im σ > 0`) of a conjugate pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Member {
    Real(usize),
    Pair(usize),
}

impl InterpolationSet {
    pub fn new(points: Vec<Complex64>, directions: Vec<DVector<Complex64>>, side: Side) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInterpolation("no interpolation points".into()));
        }
        if points.len() != directions.len() {
            return Err(Error::InvalidInterpolation(format!(
                "{} points but {} directions",
                points.len(),
                directions.len()
            )));
        }
        let width = directions[0].len();
        if width == 0 || directions.iter().any(|d| d.len() != width) {
            return Err(Error::InvalidInterpolation("directions must share a nonzero length".into()));
        }
        if points.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInterpolation("non-finite interpolation point".into()));
        }
        if let Some(k) = directions.iter().position(|d| d.norm() == 0.0) {
            return Err(Error::InvalidInterpolation(format!("direction {k} is zero")));
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                let scale = points[i].norm().max(points[j].norm()).max(1.0);
                if (points[i] - points[j]).norm() <= CONJ_TOL * scale {
                    return Err(Error::InvalidInterpolation(format!(
                        "repeated interpolation point {}",
                        points[i]
                    )));
                }
            }
        }
        let mut set = Self {
            points,
            directions,
            side,
        };
        set.snap_real_points();
        set.check_conjugate_closure()?;
        Ok(set)
    }

    /// Points with unit scalar directions (single-input or single-output use).
    pub fn scalar(points: Vec<Complex64>, side: Side) -> Result<Self> {
        let directions = points
            .iter()
            .map(|_| DVector::from_element(1, Complex64::new(1.0, 0.0)))
            .collect();
        Self::new(points, directions, side)
    }

    /// Points with directions taken from the dominant singular vectors of
    /// `G(σᵢ)`: right singular vectors on the input side, left ones on the
    /// output side. Single-channel sides use the scalar direction 1.
    pub fn with_default_directions(sys: &StateSpace, points: Vec<Complex64>, side: Side) -> Result<Self> {
        let width = match side {
            Side::Input => sys.inputs(),
            Side::Output => sys.outputs(),
        };
        if width == 1 {
            return Self::scalar(points, side);
        }
        let directions = points
            .iter()
            .map(|&sigma| {
                // evaluate at the upper half-plane member so conjugates pair up
                let upper = sigma.im < 0.0;
                let s = if upper { sigma.conj() } else { sigma };
                let g = transfer_eval(sys, s).map_err(|_| Error::ShiftIsPole { re: s.re, im: s.im })?;
                let svd = g.svd(true, true);
                let k = svd.singular_values.imax();
                let mut d: DVector<Complex64> = match side {
                    Side::Input => svd.v_t.expect("requested").row(k).transpose().map(|z| z.conj()),
                    Side::Output => svd.u.expect("requested").column(k).map(|z| z.conj()),
                };
                normalize_phase(&mut d);
                if s.im == 0.0 {
                    d.iter_mut().for_each(|z| z.im = 0.0);
                }
                Ok(if upper { d.map(|z| z.conj()) } else { d })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(points, directions, side)
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn directions(&self) -> &[DVector<Complex64>] {
        &self.directions
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn direction_len(&self) -> usize {
        self.directions[0].len()
    }

    /// The same points and directions reinterpreted on the other side.
    pub(crate) fn flipped(&self) -> Self {
        Self {
            points: self.points.clone(),
            directions: self.directions.clone(),
            side: match self.side {
                Side::Input => Side::Output,
                Side::Output => Side::Input,
            },
        }
    }

    pub fn ensure_right_half_plane(&self) -> Result<()> {
        match self.points.iter().find(|z| z.re <= 0.0) {
            Some(z) => Err(Error::InvalidInterpolation(format!(
                "interpolation point {z} is not in the open right half plane"
            ))),
            None => Ok(()),
        }
    }

    pub(crate) fn ensure_side(&self, side: Side, width: usize) -> Result<()> {
        if self.side != side {
            return Err(Error::InvalidInterpolation(format!(
                "expected {side:?}-side interpolation data"
            )));
        }
        if self.direction_len() != width {
            return Err(Error::DimensionMismatch(format!(
                "directions have length {}, system needs {width}",
                self.direction_len()
            )));
        }
        Ok(())
    }

    /// Real points and upper members of conjugate pairs, in input order.
    pub(crate) fn members(&self) -> Vec<Member> {
        self.points
            .iter()
            .enumerate()
            .filter_map(|(k, z)| {
                if z.im == 0.0 {
                    Some(Member::Real(k))
                } else if z.im > 0.0 {
                    Some(Member::Pair(k))
                } else {
                    None
                }
            })
            .collect()
    }

    fn snap_real_points(&mut self) {
        for (z, d) in self.points.iter_mut().zip(self.directions.iter_mut()) {
            if z.im.abs() <= CONJ_TOL * z.norm().max(1.0) {
                z.im = 0.0;
                if d.iter().all(|v| v.im.abs() <= CONJ_TOL * d.norm()) {
                    d.iter_mut().for_each(|v| v.im = 0.0);
                }
            }
        }
    }

    fn check_conjugate_closure(&self) -> Result<()> {
        for (k, (z, d)) in self.points.iter().zip(&self.directions).enumerate() {
            if z.im == 0.0 {
                if d.iter().any(|v| v.im != 0.0) {
                    return Err(Error::InvalidInterpolation(format!(
                        "real point {} needs a real direction",
                        z.re
                    )));
                }
                continue;
            }
            let scale = z.norm().max(1.0);
            let partner = self
                .points
                .iter()
                .enumerate()
                .find(|(j, w)| *j != k && (**w - z.conj()).norm() <= CONJ_TOL * scale);
            let Some((j, _)) = partner else {
                return Err(Error::InvalidInterpolation(format!(
                    "point {z} has no conjugate partner"
                )));
            };
            let dj = &self.directions[j];
            if (dj - d.map(|v| v.conj())).norm() > CONJ_TOL * d.norm() {
                return Err(Error::InvalidInterpolation(format!(
                    "direction of {} is not the conjugate of the direction of {z}",
                    z.conj()
                )));
            }
        }
        Ok(())
    }
}

pub(crate) fn normalize_phase(d: &mut DVector<Complex64>) {
    let k = d.iter().enumerate().fold(0, |best, (i, z)| if z.norm() > d[best].norm() { i } else { best });
    let z = d[k];
    if z.norm() > 0.0 {
        let phase = z.conj() / z.norm();
        d.iter_mut().for_each(|v| *v *= phase);
    }
}

/// Mirror images `σᵢ = -conj(λᵢ)` of stable modes, so that a reduced model
/// with poles at `-σᵢ` reproduces the modes. `directions`, when given,
/// belong to the modes in order; otherwise scalar unit directions are used.
pub fn mirror_interpolation(
    selected_poles: &[Complex64],
    directions: Option<Vec<DVector<Complex64>>>,
    side: Side,
) -> Result<InterpolationSet> {
    if let Some(z) = selected_poles.iter().find(|z| z.re >= 0.0) {
        return Err(Error::UnstableMode { re: z.re, im: z.im });
    }
    let points: Vec<Complex64> = selected_poles.iter().map(|z| -z.conj()).collect();
    match directions {
        Some(d) => InterpolationSet::new(points, d, side),
        None => InterpolationSet::scalar(points, side),
    }
}

/// [`mirror_interpolation`] with directions taken from the system's
/// dominant singular vectors at each mirror point.
pub fn mirror_interpolation_for(sys: &StateSpace, selected_poles: &[Complex64], side: Side) -> Result<InterpolationSet> {
    if let Some(z) = selected_poles.iter().find(|z| z.re >= 0.0) {
        return Err(Error::UnstableMode { re: z.re, im: z.im });
    }
    let points = selected_poles.iter().map(|z| -z.conj()).collect();
    InterpolationSet::with_default_directions(sys, points, side)
}
