//! Certified area of Ω_{A,B,Λ} ∩ Φ_{A,B}⁻¹(box) by quadtree subdivision.
//!
//! Each cell is tested against every constraint with bounds valid over the
//! whole cell: the linear conditions of Ω at the cell corners, and each
//! component u_j = (3/π²)B_j / (y(A_j y − B_j x)) through its exact range
//! (u_j increases in x and decreases in y wherever A_j y − B_j x > 0).
//! Differences u_j − u_{j+1} are bounded by interval subtraction. A cell is
//! IN when all constraints hold throughout it, OUT when one fails throughout
//! it, and is split otherwise. Inside cells are counted per level as
//! integers, so the result does not depend on traversal order.

use rayon::prelude::*;
use serde::Serialize;

use super::terms::{CorrelationTerm, RegionOmega};
use super::THREE_OVER_PI_SQ;
use crate::error::{Error, Result};
use crate::spacing::BoxRegion;

/// Most axes (ν − 1) the cell classifier supports.
pub const MAX_AXES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadLimits {
    /// Deepest subdivision level (cell side = bounding box side / 2^depth).
    pub max_depth: u32,
    /// Boundary cells kept in memory before switching to depth-first passes.
    pub max_stored_cells: usize,
}

impl Default for QuadLimits {
    fn default() -> Self {
        QuadLimits {
            max_depth: 40,
            max_stored_cells: 1 << 20,
        }
    }
}

/// Certified bracket `inside ≤ area ≤ inside + boundary`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AreaEstimate {
    pub inside: f64,
    pub boundary: f64,
    pub depth: u32,
}

impl AreaEstimate {
    pub const ZERO: AreaEstimate = AreaEstimate {
        inside: 0.0,
        boundary: 0.0,
        depth: 0,
    };

    /// Midpoint of the bracket.
    pub fn value(&self) -> f64 {
        self.inside + 0.5 * self.boundary
    }

    pub fn error_bound(&self) -> f64 {
        0.5 * self.boundary
    }

    pub fn lower(&self) -> f64 {
        self.inside
    }

    pub fn upper(&self) -> f64 {
        self.inside + self.boundary
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    In,
    Out,
    Boundary,
}

struct CellClassifier {
    axes: usize,
    a: [f64; MAX_AXES],
    b: [f64; MAX_AXES],
    kb: [f64; MAX_AXES],
    lo: [f64; MAX_AXES],
    hi: [f64; MAX_AXES],
    y_min: f64,
}

impl CellClassifier {
    fn new(term: &CorrelationTerm, region: &BoxRegion) -> Self {
        let axes = region.dim();
        let mut c = CellClassifier {
            axes,
            a: [0.0; MAX_AXES],
            b: [0.0; MAX_AXES],
            kb: [0.0; MAX_AXES],
            lo: [0.0; MAX_AXES],
            hi: [0.0; MAX_AXES],
            y_min: term.y_min(),
        };
        for j in 0..axes {
            c.a[j] = f64::from(term.a()[j]);
            c.b[j] = f64::from(term.b()[j]);
            c.kb[j] = THREE_OVER_PI_SQ * c.b[j];
            (c.lo[j], c.hi[j]) = region.intervals()[j];
        }
        c
    }

    #[inline]
    fn classify(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> Class {
        if x1 < 0.0 || x0 > y1 || y0 > 1.0 || y1 < self.y_min {
            return Class::Out;
        }
        let mut certain = x0 >= 0.0 && x1 <= y0 && y1 <= 1.0 && y0 >= self.y_min;

        let mut u_lo = [0.0; MAX_AXES];
        let mut u_hi = [0.0; MAX_AXES];
        for j in 0..self.axes {
            let l_lo = self.a[j] * y0 - self.b[j] * x1;
            let l_hi = self.a[j] * y1 - self.b[j] * x0;
            if l_hi <= 0.0 || l_lo > 1.0 {
                return Class::Out;
            }
            certain &= l_lo > 0.0 && l_hi <= 1.0;
            u_lo[j] = self.kb[j] / (y1 * l_hi);
            u_hi[j] = if l_lo > 0.0 {
                self.kb[j] / (y0 * l_lo)
            } else {
                f64::INFINITY
            };
        }

        let last = self.axes - 1;
        for j in 0..self.axes {
            let (v_lo, v_hi) = if j < last {
                (u_lo[j] - u_hi[j + 1], u_hi[j] - u_lo[j + 1])
            } else {
                (u_lo[j], u_hi[j])
            };
            if v_hi < self.lo[j] || v_lo >= self.hi[j] {
                return Class::Out;
            }
            certain &= v_lo >= self.lo[j] && v_hi < self.hi[j];
        }

        if certain {
            Class::In
        } else {
            Class::Boundary
        }
    }
}

/// Cell grid over the bounding box at a given level.
#[derive(Clone, Copy)]
struct Grid {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    area: f64,
}

impl Grid {
    #[inline]
    fn cell(&self, level: u32, ix: u64, iy: u64) -> (f64, f64, f64, f64) {
        let scale = 0.5f64.powi(level as i32);
        let (cw, ch) = (self.w * scale, self.h * scale);
        (
            self.x0 + ix as f64 * cw,
            self.x0 + (ix + 1) as f64 * cw,
            self.y0 + iy as f64 * ch,
            self.y0 + (iy + 1) as f64 * ch,
        )
    }

    #[inline]
    fn cell_area(&self, level: u32) -> f64 {
        self.area * 0.25f64.powi(level as i32)
    }
}

#[derive(Clone)]
struct Tally {
    inside: Vec<u64>,
    boundary: u64,
}

impl Tally {
    fn new(levels: usize) -> Self {
        Tally {
            inside: vec![0; levels],
            boundary: 0,
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.inside
            .iter_mut()
            .zip(&other.inside)
            .for_each(|(a, b)| *a += b);
        self.boundary += other.boundary;
        self
    }

    fn inside_area(&self, grid: &Grid) -> f64 {
        self.inside
            .iter()
            .enumerate()
            .map(|(l, &n)| n as f64 * grid.cell_area(l as u32))
            .sum()
    }
}

fn descend(
    clf: &CellClassifier,
    grid: &Grid,
    level: u32,
    ix: u64,
    iy: u64,
    target: u32,
    tally: &mut Tally,
) {
    let child_level = level + 1;
    for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
        let (cx, cy) = (2 * ix + dx, 2 * iy + dy);
        let (x0, x1, y0, y1) = grid.cell(child_level, cx, cy);
        match clf.classify(x0, x1, y0, y1) {
            Class::In => tally.inside[child_level as usize] += 1,
            Class::Out => {}
            Class::Boundary if child_level == target => tally.boundary += 1,
            Class::Boundary => descend(clf, grid, child_level, cx, cy, target, tally),
        }
    }
}

/// Area of Ω_{A,B,Λ} ∩ Φ_{A,B}⁻¹(box) with bracket width at most `tol`.
pub fn term_area(term: &CorrelationTerm, region: &BoxRegion, tol: f64) -> Result<AreaEstimate> {
    term_area_with(term, region, tol, QuadLimits::default())
}

pub fn term_area_with(
    term: &CorrelationTerm,
    region: &BoxRegion,
    tol: f64,
    limits: QuadLimits,
) -> Result<AreaEstimate> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if region.nu() != term.nu() {
        return Err(Error::InvalidInput(format!(
            "term has ν = {} but the box has ν = {}",
            term.nu(),
            region.nu()
        )));
    }
    if !region.in_positive_orthant() {
        return Err(Error::InvalidInput(
            "the area formula needs a box in the positive orthant".into(),
        ));
    }
    if region.dim() > MAX_AXES {
        return Err(Error::Sizing(format!(
            "at most {MAX_AXES} box axes are supported"
        )));
    }

    let Some((bx0, bx1, by0, by1)) = RegionOmega::restricted(term, region).bounding_box() else {
        return Ok(AreaEstimate::ZERO);
    };
    let grid = Grid {
        x0: bx0,
        y0: by0,
        w: bx1 - bx0,
        h: by1 - by0,
        area: (bx1 - bx0) * (by1 - by0),
    };
    if !(grid.area > 0.0) {
        return Ok(AreaEstimate::ZERO);
    }

    let clf = CellClassifier::new(term, region);
    let levels = limits.max_depth as usize + 1;
    let mut tally = Tally::new(levels);

    // Breadth-first while the frontier fits in memory.
    let mut level = 0u32;
    let mut frontier: Vec<(u64, u64)> = Vec::new();
    let (x0, x1, y0, y1) = grid.cell(0, 0, 0);
    match clf.classify(x0, x1, y0, y1) {
        Class::In => tally.inside[0] += 1,
        Class::Out => {}
        Class::Boundary => frontier.push((0, 0)),
    }
    loop {
        let boundary = frontier.len() as f64 * grid.cell_area(level);
        if boundary <= tol {
            return Ok(AreaEstimate {
                inside: tally.inside_area(&grid),
                boundary,
                depth: level,
            });
        }
        if level == limits.max_depth {
            return Err(Error::NonConvergence {
                residual: boundary,
                tol,
            });
        }
        if frontier.len() * 4 > limits.max_stored_cells {
            break;
        }
        let mut next = Vec::with_capacity(frontier.len() * 2);
        let child_level = level + 1;
        for &(ix, iy) in &frontier {
            for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                let (cx, cy) = (2 * ix + dx, 2 * iy + dy);
                let (x0, x1, y0, y1) = grid.cell(child_level, cx, cy);
                match clf.classify(x0, x1, y0, y1) {
                    Class::In => tally.inside[child_level as usize] += 1,
                    Class::Out => {}
                    Class::Boundary => next.push((cx, cy)),
                }
            }
        }
        frontier = next;
        level = child_level;
    }

    // Depth-first passes from the stored frontier; the boundary area roughly
    // halves per level, which gives the first target depth.
    let stored_boundary = frontier.len() as f64 * grid.cell_area(level);
    let mut target = level + ((stored_boundary / tol).log2().ceil() as u32).max(1);
    loop {
        target = target.min(limits.max_depth);
        let pass = frontier
            .par_iter()
            .fold(
                || Tally::new(levels),
                |mut t, &(ix, iy)| {
                    descend(&clf, &grid, level, ix, iy, target, &mut t);
                    t
                },
            )
            .reduce(|| Tally::new(levels), Tally::merge);
        let total = tally.clone().merge(pass);
        let boundary = total.boundary as f64 * grid.cell_area(target);
        if boundary <= tol {
            return Ok(AreaEstimate {
                inside: total.inside_area(&grid),
                boundary,
                depth: target,
            });
        }
        if target == limits.max_depth {
            return Err(Error::NonConvergence {
                residual: boundary,
                tol,
            });
        }
        target += 1;
    }
}
