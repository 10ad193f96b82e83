//! Partition functions by explicit summation over edge colorings.
//!
//! Rows are numbered from the bottom (row 1) and carry the spectral values
//! `row_x`; columns carry the inhomogeneities of the context. The vertex in
//! row i, column j has weight R(X_i/m_j)[(left, top), (right, bottom)],
//! which vanishes unless left + top = right + bottom.

use serde::{Deserialize, Serialize};

use crate::context::ModelContext;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::monodromy::{compute_f, compute_fbar, compute_z};
use crate::weights::{r_matrix, RMatrix};

/// Largest number of internal edges the enumerator accepts.
pub const MAX_INTERNAL_EDGES: usize = 26;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundarySpec {
    pub rows: usize,
    pub cols: usize,
    /// Left edge color of each row, bottom row first.
    pub left: Vec<u8>,
    /// Right edge color of each row, bottom row first.
    pub right: Vec<u8>,
    /// Bottom edge color of each column.
    pub bottom: Vec<u8>,
    /// Top edge color of each column.
    pub top: Vec<u8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    Z,
    F,
    Fbar,
}

impl std::str::FromStr for BoundaryKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "z" => Ok(BoundaryKind::Z),
            "f" => Ok(BoundaryKind::F),
            "fbar" => Ok(BoundaryKind::Fbar),
            other => Err(Error::Parse(format!("unknown boundary {other:?}"))),
        }
    }
}

impl BoundarySpec {
    pub fn preset(kind: BoundaryKind, size: usize) -> Result<Self> {
        match kind {
            BoundaryKind::Z => dwbc_boundary(size),
            BoundaryKind::F => f_boundary(size),
            BoundaryKind::Fbar => fbar_boundary(size),
        }
    }

    pub fn internal_edges(&self) -> usize {
        2 * self.rows * self.cols - self.rows - self.cols
    }

    fn validate(&self) -> Result<()> {
        let ok_len = self.left.len() == self.rows
            && self.right.len() == self.rows
            && self.bottom.len() == self.cols
            && self.top.len() == self.cols;
        let ok_colors = [&self.left, &self.right, &self.bottom, &self.top]
            .iter()
            .all(|v| v.iter().all(|c| (1..=3).contains(c)));
        if ok_len && ok_colors && self.rows > 0 && self.cols > 0 {
            Ok(())
        } else {
            Err(Error::InvalidInput(
                "inconsistent boundary specification".into(),
            ))
        }
    }
}

fn check_size(size: usize) -> Result<()> {
    if size == 0 {
        Err(Error::InvalidInput(
            "lattice size must be at least 1".into(),
        ))
    } else {
        Ok(())
    }
}

/// Domain-wall boundary: 1 entering left and bottom, 3 leaving right and top.
pub fn dwbc_boundary(size: usize) -> Result<BoundarySpec> {
    check_size(size)?;
    Ok(BoundarySpec {
        rows: size,
        cols: size,
        left: vec![1; size],
        right: vec![3; size],
        bottom: vec![1; size],
        top: vec![3; size],
    })
}

fn extended(size: usize, right: Vec<u8>) -> Result<BoundarySpec> {
    check_size(size)?;
    Ok(BoundarySpec {
        rows: size + 1,
        cols: size,
        left: vec![1; size + 1],
        right,
        bottom: vec![1; size],
        top: vec![3; size],
    })
}

/// Boundary of F: right edges (2, 2, 3, …, 3) from the bottom.
pub fn f_boundary(size: usize) -> Result<BoundarySpec> {
    let mut right = vec![3; size + 1];
    right[0] = 2;
    right[1] = 2;
    extended(size, right)
}

/// Boundary of F̄: right edges (3, …, 3, 2, 2) from the bottom.
pub fn fbar_boundary(size: usize) -> Result<BoundarySpec> {
    let mut right = vec![3; size + 1];
    right[size - 1] = 2;
    right[size] = 2;
    extended(size, right)
}

struct Lattice<'a, F> {
    bnd: &'a BoundarySpec,
    /// `weights[i][j]` is the R-matrix of the vertex in row i, column j.
    weights: Vec<Vec<RMatrix<F>>>,
    /// Skip colorings that break conservation or hit a zero weight.
    prune: bool,
}

impl<F: Field> Lattice<'_, F> {
    fn vertex(&self, i: usize, j: usize, left: u8, top: u8, right: u8, bottom: u8) -> &F {
        self.weights[i][j].get(
            (left as usize, top as usize),
            (right as usize, bottom as usize),
        )
    }

    /// Depth-first sum. `vertical[j]` holds the color entering the current
    /// row from below at column j; `horizontal` the color entering from the
    /// left. Vertices are visited row by row from the bottom.
    fn sum(
        &self,
        i: usize,
        j: usize,
        horizontal: u8,
        vertical: &mut Vec<u8>,
        acc: F,
        tally: &mut (F, u64),
    ) {
        let prune = self.prune;
        let bnd = self.bnd;
        if i == bnd.rows {
            if vertical.iter().zip(&bnd.top).all(|(a, b)| a == b) {
                tally.0 = tally.0.clone() + &acc;
                tally.1 += 1;
            }
            return;
        }
        let bottom = vertical[j];
        let last_col = j + 1 == bnd.cols;
        let last_row = i + 1 == bnd.rows;
        for top in 1..=3u8 {
            if last_row && top != bnd.top[j] {
                continue;
            }
            let rights: Vec<u8> = if prune {
                let charge = horizontal as i32 + top as i32 - bottom as i32;
                if !(1..=3).contains(&charge) {
                    continue;
                }
                vec![charge as u8]
            } else {
                vec![1, 2, 3]
            };
            for right in rights {
                if last_col && right != bnd.right[i] {
                    continue;
                }
                let w = self.vertex(i, j, horizontal, top, right, bottom);
                if prune && w.is_zero_elem() {
                    continue;
                }
                let next = acc.clone() * w;
                vertical[j] = top;
                if last_col {
                    self.sum(
                        i + 1,
                        0,
                        bnd.left.get(i + 1).copied().unwrap_or(0),
                        vertical,
                        next,
                        tally,
                    );
                } else {
                    self.sum(i, j + 1, right, vertical, next, tally);
                }
                vertical[j] = bottom;
            }
        }
    }
}

fn enumerate<F: Field>(
    ctx: &ModelContext<F>,
    bnd: &BoundarySpec,
    row_x: &[F],
    prune: bool,
) -> Result<(F, u64)> {
    bnd.validate()?;
    if row_x.len() != bnd.rows || ctx.size() != bnd.cols {
        return Err(Error::InvalidInput(format!(
            "expected {} row values and {} inhomogeneities",
            bnd.rows, bnd.cols
        )));
    }
    if bnd.internal_edges() > MAX_INTERNAL_EDGES {
        return Err(Error::TooLarge {
            edges: bnd.internal_edges(),
            limit: MAX_INTERNAL_EDGES,
        });
    }
    let mut weights = Vec::with_capacity(bnd.rows);
    for x in row_x {
        let mut row = Vec::with_capacity(bnd.cols);
        for m in ctx.inhomogeneities() {
            let ratio = x.checked_div(m).ok_or(Error::ZeroArgument)?;
            row.push(r_matrix(ctx, &ratio)?);
        }
        weights.push(row);
    }
    let lattice = Lattice {
        bnd,
        weights,
        prune,
    };
    let mut tally = (ctx.zero(), 0);
    let mut vertical = bnd.bottom.clone();
    lattice.sum(0, 0, bnd.left[0], &mut vertical, ctx.one(), &mut tally);
    Ok(tally)
}

/// Sum over all colorings of the internal edges of the product of vertex
/// weights, pruning configurations that violate conservation.
pub fn partition_bruteforce<F: Field>(
    ctx: &ModelContext<F>,
    bnd: &BoundarySpec,
    row_x: &[F],
) -> Result<F> {
    enumerate(ctx, bnd, row_x, true).map(|(v, _)| v)
}

/// Same sum without any pruning: every coloring of every internal edge is
/// visited, including those whose weight vanishes.
pub fn partition_exhaustive<F: Field>(
    ctx: &ModelContext<F>,
    bnd: &BoundarySpec,
    row_x: &[F],
) -> Result<F> {
    enumerate(ctx, bnd, row_x, false).map(|(v, _)| v)
}

/// Number of colorings with nonzero weight.
pub fn nonzero_configurations<F: Field>(
    ctx: &ModelContext<F>,
    bnd: &BoundarySpec,
    row_x: &[F],
) -> Result<u64> {
    enumerate(ctx, bnd, row_x, true).map(|(_, n)| n)
}

/// The same quantity through the monodromy matrix. `row_x` is bottom row
/// first: X1…XL for Z, (Y1, Y2, U1, …) for F and (U1, …, Y1, Y2) for F̄.
pub fn partition_monodromy<F: Field>(
    ctx: &ModelContext<F>,
    kind: BoundaryKind,
    row_x: &[F],
) -> Result<F> {
    let size = ctx.size();
    let want = if kind == BoundaryKind::Z {
        size
    } else {
        size + 1
    };
    if row_x.len() != want {
        return Err(Error::InvalidInput(format!(
            "{kind:?} on {size} sites needs {want} row parameters"
        )));
    }
    match kind {
        BoundaryKind::Z => compute_z(ctx, row_x),
        BoundaryKind::F => compute_f(ctx, &row_x[2..], &row_x[0], &row_x[1]),
        BoundaryKind::Fbar => compute_fbar(ctx, &row_x[size - 1], &row_x[size], &row_x[..size - 1]),
    }
}
