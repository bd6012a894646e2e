//! Bounded uniform partitions of unity and well-spread point families.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{same_space, MeasureSpace, SampledFunction};

use super::window::{translate_window, Window};

/// Largest `|sum_i psi_i(x) - 1|` accepted as a partition of unity.
pub const PARTITION_TOLERANCE: f64 = 1e-12;

/// A family `psi_i >= 0` with `sum psi_i = 1`, `sup_i ||psi_i||_inf <= M`,
/// `supp psi_i` inside `U + y_i`, and finite overlap of the translates.
#[derive(Debug, Clone, PartialEq)]
pub struct Bupu {
    functions: Vec<SampledFunction>,
    centers: Vec<i64>,
    window: Window,
    sup_bound: f64,
    ragged: bool,
}

impl Bupu {
    /// Assembles a family without checking the four conditions; run
    /// [`validate_bupu`] for that.
    pub fn new(
        functions: Vec<SampledFunction>,
        centers: Vec<i64>,
        window: Window,
        sup_bound: f64,
    ) -> Result<Self> {
        if functions.is_empty() {
            return Err(Error::InvalidBupu("empty family".into()));
        }
        if functions.len() != centers.len() {
            return Err(Error::LengthMismatch {
                expected: functions.len(),
                found: centers.len(),
            });
        }
        if functions
            .iter()
            .any(|f| !same_space(f.space(), window.space()))
        {
            return Err(Error::SpaceMismatch);
        }
        if !(sup_bound.is_finite() && sup_bound > 0.0) {
            return Err(Error::InvalidBupu(format!(
                "sup bound {sup_bound} must be positive"
            )));
        }
        Ok(Self {
            functions,
            centers,
            window,
            sup_bound,
            ragged: false,
        })
    }

    pub fn functions(&self) -> &[SampledFunction] {
        &self.functions
    }

    pub fn centers(&self) -> &[i64] {
        &self.centers
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    /// Set when the last block of a uniform partition is shorter than the rest.
    pub fn is_ragged(&self) -> bool {
        self.ragged
    }

    pub fn space(&self) -> &Arc<MeasureSpace> {
        self.window.space()
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// The translates `U + y_i`.
    pub fn supports(&self) -> Vec<Window> {
        self.centers
            .iter()
            .map(|&y| translate_window(&self.window, y))
            .collect()
    }
}

/// Indicator functions of consecutive blocks of `block_size` atoms. The
/// window `U` is the first block and `y_i` is the offset of block `i`. A
/// short final block is allowed but flagged.
pub fn make_uniform_bupu(space: Arc<MeasureSpace>, block_size: usize) -> Result<Bupu> {
    if block_size == 0 {
        return Err(Error::InvalidBlockSize);
    }
    let n = space.len();
    let origin = space.points()[0];
    let mut functions = Vec::new();
    let mut centers = Vec::new();
    for start in (0..n).step_by(block_size) {
        let end = (start + block_size).min(n);
        let mut values = vec![0.0; n];
        values[start..end].fill(1.0);
        functions.push(SampledFunction::new(space.clone(), values)?);
        centers.push(space.points()[start] - origin);
    }
    let window = Window::contiguous(space, 0, block_size.min(n))?;
    let mut bupu = Bupu::new(functions, centers, window, 1.0)?;
    bupu.ragged = n % block_size != 0;
    Ok(bupu)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionCheck {
    pub pass: bool,
    pub max_deviation: f64,
    /// Point where the deviation is largest.
    pub worst_point: i64,
    pub nonnegative: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub pass: bool,
    pub measured_sup: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportCheck {
    pub pass: bool,
    /// Number of `(i, x)` with `psi_i(x) != 0` and `x` outside `U + y_i`.
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapCheck {
    pub pass: bool,
    /// `max_x #{i : x in U + y_i}`.
    pub max_overlap: usize,
}

/// Pass/fail and measured quantities for the four partition conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BupuValidation {
    #[serde(rename = "a")]
    pub partition: PartitionCheck,
    #[serde(rename = "b")]
    pub bounded: BoundCheck,
    #[serde(rename = "c")]
    pub support: SupportCheck,
    #[serde(rename = "d")]
    pub overlap: OverlapCheck,
    pub ragged: bool,
}

impl BupuValidation {
    pub fn all_pass(&self) -> bool {
        self.partition.pass && self.bounded.pass && self.support.pass && self.overlap.pass
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.partition.pass {
            out.push("a: partition of unity");
        }
        if !self.bounded.pass {
            out.push("b: uniform bound");
        }
        if !self.support.pass {
            out.push("c: support containment");
        }
        if !self.overlap.pass {
            out.push("d: finite overlap");
        }
        out
    }
}

/// Checks each condition and reports what was measured. Failures are
/// entries in the report, never errors.
pub fn validate_bupu(psi: &Bupu) -> BupuValidation {
    let space = psi.space();
    let n = space.len();

    let mut sums = vec![0.0; n];
    let mut nonnegative = true;
    let mut measured_sup = 0.0_f64;
    for f in &psi.functions {
        for (s, &v) in sums.iter_mut().zip(f.values()) {
            *s += v;
            nonnegative &= v >= 0.0;
            measured_sup = measured_sup.max(v.abs());
        }
    }
    let (worst, max_deviation) =
        sums.iter()
            .map(|s| (s - 1.0).abs())
            .enumerate()
            .fold(
                (0, 0.0),
                |best, (i, d)| if d > best.1 { (i, d) } else { best },
            );

    let supports = psi.supports();
    let violations = psi
        .functions
        .iter()
        .zip(&supports)
        .map(|(f, w)| {
            f.values()
                .iter()
                .enumerate()
                .filter(|&(x, &v)| v != 0.0 && !w.contains(x))
                .count()
        })
        .sum();

    BupuValidation {
        partition: PartitionCheck {
            pass: nonnegative && max_deviation <= PARTITION_TOLERANCE,
            max_deviation,
            worst_point: space.points()[worst],
            nonnegative,
        },
        bounded: BoundCheck {
            pass: measured_sup <= psi.sup_bound,
            measured_sup,
            bound: psi.sup_bound,
        },
        support: SupportCheck {
            pass: violations == 0,
            violations,
        },
        // finite families always have finite overlap
        overlap: OverlapCheck {
            pass: true,
            max_overlap: max_cover(&supports, n),
        },
        ragged: psi.ragged,
    }
}

/// `max_x #{i : x in windows[i]}`.
pub(crate) fn max_cover(windows: &[Window], n: usize) -> usize {
    let mut counts = vec![0usize; n];
    for w in windows {
        for &i in w.members() {
            counts[i] += 1;
        }
    }
    counts.into_iter().max().unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WellSpreadReport {
    /// The translates `x_i + U` cover every atom.
    pub is_u_dense: bool,
    /// The family splits into finitely many separated subfamilies.
    pub is_relatively_separated: bool,
    /// Number of separated subfamilies found by greedy colouring.
    pub separation_partition_count: usize,
    pub uncovered: Vec<i64>,
}

impl WellSpreadReport {
    pub fn is_separated(&self) -> bool {
        self.separation_partition_count <= 1
    }

    pub fn is_well_spread(&self) -> bool {
        self.is_u_dense && self.is_relatively_separated
    }
}

/// Checks `U`-density by exact cover and relative separation by greedy
/// colouring of the graph joining intersecting translates.
pub fn well_spread_check(x: &[i64], u: &Window) -> WellSpreadReport {
    let space = u.space();
    let translates: Vec<Window> = x.iter().map(|&xi| translate_window(u, xi)).collect();

    let mut covered = vec![false; space.len()];
    for t in &translates {
        for &i in t.members() {
            covered[i] = true;
        }
    }
    let uncovered: Vec<i64> = covered
        .iter()
        .enumerate()
        .filter(|(_, &c)| !c)
        .map(|(i, _)| space.points()[i])
        .collect();

    let mut colours: Vec<usize> = Vec::with_capacity(translates.len());
    for (i, t) in translates.iter().enumerate() {
        let taken: Vec<usize> = (0..i)
            .filter(|&j| translates[j].intersects(t))
            .map(|j| colours[j])
            .collect();
        let colour = (0..).find(|c| !taken.contains(c)).expect("unbounded");
        colours.push(colour);
    }
    let count = colours.iter().max().map_or(0, |&c| c + 1);

    WellSpreadReport {
        is_u_dense: uncovered.is_empty(),
        is_relatively_separated: true,
        separation_partition_count: count,
        uncovered,
    }
}
