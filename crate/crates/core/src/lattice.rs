//! Domains and uniform lattices of centers.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Bounded open domain.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain<T> {
    Interval { a: T, b: T },
    Box { lo: Vec<T>, hi: Vec<T> },
    Disk { center: [T; 2], radius: T },
}

impl<T: Real> Domain<T> {
    pub fn interval(a: T, b: T) -> Result<Self> {
        if !(a < b) {
            return Err(Error::InvalidParameter(format!("empty interval ({a}, {b})")));
        }
        Ok(Domain::Interval { a, b })
    }

    pub fn new_box(lo: Vec<T>, hi: Vec<T>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() || lo.iter().zip(&hi).any(|(l, h)| !(l < h)) {
            return Err(Error::InvalidParameter("box needs matching lo < hi per axis".into()));
        }
        Ok(Domain::Box { lo, hi })
    }

    /// The cube (a, b)^dim.
    pub fn cube(a: T, b: T, dim: usize) -> Result<Self> {
        Self::new_box(vec![a; dim], vec![b; dim])
    }

    pub fn disk(center: [T; 2], radius: T) -> Result<Self> {
        if !(radius > T::zero()) {
            return Err(Error::InvalidParameter(format!("disk radius {radius} must be positive")));
        }
        Ok(Domain::Disk { center, radius })
    }

    pub fn unit_disk() -> Self {
        Domain::Disk {
            center: [T::zero(), T::zero()],
            radius: T::one(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Box { lo, .. } => lo.len(),
            Domain::Disk { .. } => 2,
        }
    }

    pub fn bounding_box(&self) -> (Vec<T>, Vec<T>) {
        match self {
            Domain::Interval { a, b } => (vec![*a], vec![*b]),
            Domain::Box { lo, hi } => (lo.clone(), hi.clone()),
            Domain::Disk { center, radius } => (
                vec![center[0] - *radius, center[1] - *radius],
                vec![center[0] + *radius, center[1] + *radius],
            ),
        }
    }

    pub fn diameter(&self) -> T {
        let (lo, hi) = self.bounding_box();
        match self {
            Domain::Disk { radius, .. } => T::lit(2.0) * *radius,
            _ => lo
                .iter()
                .zip(&hi)
                .map(|(&l, &h)| (h - l) * (h - l))
                .sum::<T>()
                .sqrt(),
        }
    }

    /// Distance to the boundary, positive inside and negative outside
    /// (for boxes outside, the negated largest axis excess).
    pub fn boundary_distance(&self, x: &[T]) -> T {
        match self {
            Domain::Interval { a, b } => (x[0] - *a).min(*b - x[0]),
            Domain::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .zip(x)
                .map(|((&l, &h), &xi)| (xi - l).min(h - xi))
                .fold(T::infinity(), T::min),
            Domain::Disk { center, radius } => {
                let dx = x[0] - center[0];
                let dy = x[1] - center[1];
                *radius - (dx * dx + dy * dy).sqrt()
            }
        }
    }

    /// Strict membership.
    pub fn contains(&self, x: &[T]) -> bool {
        self.boundary_distance(x) > T::zero()
    }

    /// Lattice anchor: the lower corner for intervals and boxes, the center for disks.
    pub(crate) fn anchor(&self) -> Vec<T> {
        match self {
            Domain::Disk { center, .. } => center.to_vec(),
            _ => self.bounding_box().0,
        }
    }

    fn tie_tolerance(&self) -> T {
        T::lit(1e-12) * self.diameter()
    }
}

/// Flat list of points of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet<T> {
    dim: usize,
    coords: Vec<T>,
}

impl<T: Real> PointSet<T> {
    pub fn new(dim: usize, coords: Vec<T>) -> Result<Self> {
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coords.len(),
            });
        }
        Ok(Self { dim, coords })
    }

    pub fn from_points(dim: usize, points: &[Vec<T>]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Ok(Self { dim, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, T> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }
}

/// Lattice offset + h k restricted to a domain; centers and collocation points at once.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeGrid<T> {
    h: T,
    offset: Vec<T>,
    indices: Vec<i64>,
    points: PointSet<T>,
}

impl<T: Real> LatticeGrid<T> {
    /// Builds a grid from explicit integer indices.
    pub fn from_indices(h: T, offset: Vec<T>, indices: Vec<i64>) -> Result<Self> {
        let dim = offset.len();
        if dim == 0 || !indices.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: indices.len(),
            });
        }
        if indices.is_empty() {
            return Err(Error::EmptyGrid { h: h.as_f64() });
        }
        let coords = indices
            .chunks_exact(dim)
            .flat_map(|k| {
                k.iter()
                    .zip(&offset)
                    .map(|(&ki, &o)| o + h * T::from_i64(ki).expect("index"))
                    .collect::<Vec<_>>()
            })
            .collect();
        Ok(Self {
            h,
            points: PointSet { dim, coords },
            offset,
            indices,
        })
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn offset(&self) -> &[T] {
        &self.offset
    }

    pub fn index(&self, i: usize) -> &[i64] {
        let d = self.dim();
        &self.indices[i * d..(i + 1) * d]
    }

    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    pub fn point(&self, i: usize) -> &[T] {
        self.points.point(i)
    }

    pub fn points(&self) -> &PointSet<T> {
        &self.points
    }

    /// The same lattice shifted by `shift`.
    pub fn translated(&self, shift: &[T]) -> Result<Self> {
        if shift.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: shift.len(),
            });
        }
        let offset = self.offset.iter().zip(shift).map(|(&o, &s)| o + s).collect();
        Self::from_indices(self.h, offset, self.indices.clone())
    }
}

/// Coupling c* = eps h kept fixed under refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeCoupling<T> {
    c_star: T,
}

impl<T: Real> ShapeCoupling<T> {
    pub fn new(c_star: T) -> Result<Self> {
        if !(c_star > T::zero()) {
            return Err(Error::InvalidParameter(format!("c* must be positive, got {c_star}")));
        }
        Ok(Self { c_star })
    }

    pub fn c_star(&self) -> T {
        self.c_star
    }

    pub fn gamma(&self) -> T {
        self.c_star * self.c_star
    }

    pub fn eps(&self, h: T) -> T {
        self.c_star / h
    }
}

// Index ranges per axis covering the bounding box for spacing `step` from `anchor`.
fn index_ranges<T: Real>(lo: &[T], hi: &[T], anchor: &[T], step: T) -> Vec<(i64, i64)> {
    lo.iter()
        .zip(hi)
        .zip(anchor)
        .map(|((&l, &u), &o)| {
            let kmin = ((l - o) / step).floor().to_i64().unwrap_or(0) - 1;
            let kmax = ((u - o) / step).ceil().to_i64().unwrap_or(0) + 1;
            (kmin, kmax)
        })
        .collect()
}

/// Lattice points anchor + step k covering the box [lo, hi] that satisfy `keep`,
/// row-major with the first axis slowest. Returns (flat indices, flat coordinates).
pub(crate) fn lattice_points_where<T: Real>(
    lo: &[T],
    hi: &[T],
    anchor: &[T],
    step: T,
    keep: impl Fn(&[T]) -> bool,
) -> (Vec<i64>, Vec<T>) {
    let ranges = index_ranges(lo, hi, anchor, step);
    let dim = ranges.len();
    let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    let mut indices = Vec::new();
    let mut coords = Vec::new();
    let mut x = vec![T::zero(); dim];
    loop {
        for i in 0..dim {
            x[i] = anchor[i] + step * T::from_i64(idx[i]).expect("index");
        }
        if keep(&x) {
            indices.extend_from_slice(&idx);
            coords.extend_from_slice(&x);
        }
        let mut axis = dim;
        loop {
            if axis == 0 {
                return (indices, coords);
            }
            axis -= 1;
            if idx[axis] < ranges[axis].1 {
                idx[axis] += 1;
                break;
            }
            idx[axis] = ranges[axis].0;
        }
    }
}

fn enumerate<T: Real>(
    domain: &Domain<T>,
    anchor: &[T],
    step: T,
    keep: impl Fn(T) -> bool,
) -> (Vec<i64>, Vec<T>) {
    let (lo, hi) = domain.bounding_box();
    lattice_points_where(&lo, &hi, anchor, step, |x| keep(domain.boundary_distance(x)))
}

/// Lattice points strictly inside the domain; points within 1e-12 diam of the
/// boundary count as boundary points and are excluded.
pub fn generate_centers<T: Real>(domain: &Domain<T>, h: T) -> Result<LatticeGrid<T>> {
    if !(h > T::zero()) || !(h < domain.diameter()) {
        return Err(Error::InvalidParameter(format!(
            "spacing {h} must be positive and below the domain diameter"
        )));
    }
    let anchor = domain.anchor();
    let tol = domain.tie_tolerance();
    let (indices, _) = enumerate(domain, &anchor, h, |dist| dist > tol);
    if indices.is_empty() {
        return Err(Error::EmptyGrid { h: h.as_f64() });
    }
    LatticeGrid::from_indices(h, anchor, indices)
}

/// Points of spacing h/refine covering the closed domain, sharing the center lattice anchor.
pub fn evaluation_grid<T: Real>(domain: &Domain<T>, h: T, refine: usize) -> Result<PointSet<T>> {
    if refine < 2 {
        return Err(Error::InvalidParameter(format!("refine must be at least 2, got {refine}")));
    }
    closed_lattice(domain, h / T::from_count(refine))
}

/// Lattice of spacing `step` anchored like the centers, on the closed domain.
pub fn closed_lattice<T: Real>(domain: &Domain<T>, step: T) -> Result<PointSet<T>> {
    if !(step > T::zero()) {
        return Err(Error::InvalidParameter(format!("spacing {step} must be positive")));
    }
    let anchor = domain.anchor();
    let tol = domain.tie_tolerance();
    let (_, coords) = enumerate(domain, &anchor, step, |dist| dist >= -tol);
    PointSet::new(domain.dim(), coords)
}
