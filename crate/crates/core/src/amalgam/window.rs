use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exponent::GrandExponent;
use crate::grand::{grand_norm, grand_sup};
use crate::grid::EpsilonGrid;
use crate::measure::{same_space, MeasureSpace, SampledFunction};

/// A set of atoms standing in for a compact window with nonempty interior.
///
/// Windows built by the constructors are nonempty. Translates produced by
/// [`translate_window`] may be empty after clipping to an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    space: Arc<MeasureSpace>,
    members: Vec<usize>,
    mass: f64,
}

impl Window {
    /// Window made of the given point identifiers.
    pub fn new(space: Arc<MeasureSpace>, points: &[i64]) -> Result<Self> {
        let indices = points
            .iter()
            .map(|&p| space.index_of(p).ok_or(Error::UnknownPoint(p)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_indices(space, indices)
    }

    pub fn from_indices(space: Arc<MeasureSpace>, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() {
            return Err(Error::EmptyWindow);
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= space.len()) {
            return Err(Error::UnknownPoint(bad as i64));
        }
        Ok(Self::assemble(space, indices))
    }

    /// `len` consecutive atoms starting at position `start`.
    pub fn contiguous(space: Arc<MeasureSpace>, start: usize, len: usize) -> Result<Self> {
        Self::from_indices(space, (start..start + len).collect())
    }

    pub fn whole(space: Arc<MeasureSpace>) -> Self {
        let members = (0..space.len()).collect();
        Self::assemble(space, members)
    }

    fn assemble(space: Arc<MeasureSpace>, members: Vec<usize>) -> Self {
        let mass = space.mass_of(&members);
        Self {
            space,
            members,
            mass,
        }
    }

    pub fn space(&self) -> &Arc<MeasureSpace> {
        &self.space
    }

    /// Atom positions, ascending.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn points(&self) -> Vec<i64> {
        self.members
            .iter()
            .map(|&i| self.space.points()[i])
            .collect()
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.binary_search(&index).is_ok()
    }

    pub fn is_subset_of(&self, other: &Window) -> bool {
        self.members.iter().all(|&i| other.contains(i))
    }

    pub fn intersects(&self, other: &Window) -> bool {
        self.members.iter().any(|&i| other.contains(i))
    }
}

/// `Q + x`, intersected with the space. Group models wrap; interval models
/// drop atoms that leave the space, so the result may be empty.
pub fn translate_window(q: &Window, x: i64) -> Window {
    let mut members: Vec<usize> = q
        .members
        .iter()
        .filter_map(|&i| q.space.translate_index(i, x))
        .collect();
    members.sort_unstable();
    members.dedup();
    Window::assemble(q.space.clone(), members)
}

/// `x -> ||f chi_{Q+x}||_{p),theta}` sampled at every point `x` of the space.
pub fn control_function(
    f: &SampledFunction,
    q: &Window,
    exp: &GrandExponent,
    grid: &EpsilonGrid,
) -> Result<SampledFunction> {
    if !same_space(f.space(), q.space()) {
        return Err(Error::SpaceMismatch);
    }
    grid.check_for(exp)?;
    let space = f.space();
    let values = space
        .points()
        .par_iter()
        .map(|&x| restricted_norm(f, &translate_window(q, x), exp, grid))
        .collect::<Result<Vec<_>>>()?;
    SampledFunction::new(space.clone(), values)
}

/// `||f chi_W||_{p),theta}`, summing only over the atoms of `W`.
///
/// Atoms are summed in a canonical order (by magnitude, then weight), so two
/// windows carrying the same multiset of samples give bit-identical norms
/// regardless of where they sit in the space.
pub(crate) fn restricted_norm(
    f: &SampledFunction,
    w: &Window,
    exp: &GrandExponent,
    grid: &EpsilonGrid,
) -> Result<f64> {
    let atoms = w
        .members
        .iter()
        .map(|&i| (f.values()[i], f.space().weights()[i]))
        .collect();
    canonical_norm(atoms, exp, grid)
}

/// Grand norm of `(value, weight)` atoms summed in canonical order.
pub(crate) fn canonical_norm(
    mut atoms: Vec<(f64, f64)>,
    exp: &GrandExponent,
    grid: &EpsilonGrid,
) -> Result<f64> {
    if atoms.is_empty() {
        grid.check_for(exp)?;
        return Ok(0.0);
    }
    for a in &mut atoms {
        a.0 = a.0.abs();
    }
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let (values, weights): (Vec<f64>, Vec<f64>) = atoms.into_iter().unzip();
    Ok(grand_sup(&weights, &values, exp, grid)?.value)
}

/// `||F_f||_{q),theta}` where `F_f` is the control function with window `Q`.
/// The result depends on `Q`.
pub fn amalgam_norm(
    f: &SampledFunction,
    q: &Window,
    local: &GrandExponent,
    global: &GrandExponent,
    grid_p: &EpsilonGrid,
    grid_q: &EpsilonGrid,
) -> Result<f64> {
    let control = control_function(f, q, local, grid_p)?;
    grand_norm(&control, global, grid_q)
}
