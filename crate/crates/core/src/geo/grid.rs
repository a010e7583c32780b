//! Square-cell grid over the network's bounding rectangle and the
//! cell/component incidence maps used by the fire simulator.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::utm::{latlon_to_utm_in_zone, zone_for_longitude};
use crate::case::{ComponentId, PowerCase};
use crate::error::{Error, Result};

pub const DEFAULT_CELL_SIZE: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub col: usize,
    pub row: usize,
}

impl Cell {
    pub fn new(col: usize, row: usize) -> Self {
        Cell { col, row }
    }
}

/// Planar grid in UTM meters. Cell `(col, row)` covers the half-open square
/// `[e0 + col*s, e0 + (col+1)*s) x [n0 + row*s, n0 + (row+1)*s)`; points on
/// the far outer boundary are assigned to the last column/row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridGeometry {
    pub origin_easting: f64,
    pub origin_northing: f64,
    pub cell_size: f64,
    pub n_cols: usize,
    pub n_rows: usize,
    pub zone: u8,
    pub south: bool,
}

impl GridGeometry {
    /// Smallest grid anchored at `(min_e, min_n)` covering the rectangle.
    pub fn covering(min_e: f64, min_n: f64, max_e: f64, max_n: f64, cell_size: f64) -> Result<Self> {
        if !(cell_size > 0.0) || !cell_size.is_finite() {
            return Err(Error::validation(format!("cell size must be positive, got {cell_size}")));
        }
        if !(max_e >= min_e && max_n >= min_n) {
            return Err(Error::validation("degenerate bounding rectangle"));
        }
        let span = |w: f64| ((w / cell_size).ceil() as usize).max(1);
        Ok(GridGeometry {
            origin_easting: min_e,
            origin_northing: min_n,
            cell_size,
            n_cols: span(max_e - min_e),
            n_rows: span(max_n - min_n),
            zone: 0,
            south: false,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cols * self.n_rows
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.col < self.n_cols && cell.row < self.n_rows
    }

    pub fn index(&self, cell: Cell) -> usize {
        cell.row * self.n_cols + cell.col
    }

    pub fn cell(&self, index: usize) -> Cell {
        Cell::new(index % self.n_cols, index / self.n_cols)
    }

    /// Cell containing a point given in grid-local meters.
    pub fn cell_of_local(&self, x: f64, y: f64) -> Cell {
        let clamp = |v: f64, n: usize| -> usize {
            let k = (v / self.cell_size).floor();
            if k < 0.0 {
                0
            } else {
                (k as usize).min(n - 1)
            }
        };
        Cell::new(clamp(x, self.n_cols), clamp(y, self.n_rows))
    }

    pub fn cell_of(&self, easting: f64, northing: f64) -> Cell {
        self.cell_of_local(easting - self.origin_easting, northing - self.origin_northing)
    }

    /// Moore neighborhood of `cell`, clipped at the grid boundary.
    pub fn neighbors8(&self, cell: Cell) -> Result<Vec<Cell>> {
        if !self.contains(cell) {
            return Err(Error::OutOfRange(format!("cell {cell:?} outside grid")));
        }
        let mut out = Vec::with_capacity(8);
        for dr in -1i64..=1 {
            for dc in -1i64..=1 {
                if dr == 0 && dc == 0 {
                    continue;
                }
                let (c, r) = (cell.col as i64 + dc, cell.row as i64 + dr);
                if c >= 0 && r >= 0 && (c as usize) < self.n_cols && (r as usize) < self.n_rows {
                    out.push(Cell::new(c as usize, r as usize));
                }
            }
        }
        Ok(out)
    }

    /// Every cell the segment between two grid-local points touches
    /// (supercover traversal; both side cells are included when the segment
    /// passes exactly through a cell corner).
    pub fn supercover(&self, x0: f64, y0: f64, x1: f64, y1: f64) -> BTreeSet<Cell> {
        let s = self.cell_size;
        let (u0, v0, u1, v1) = (x0 / s, y0 / s, x1 / s, y1 / s);
        let mut out = BTreeSet::new();
        let mut push = |c: i64, r: i64| {
            let c = c.clamp(0, self.n_cols as i64 - 1) as usize;
            let r = r.clamp(0, self.n_rows as i64 - 1) as usize;
            out.insert(Cell::new(c, r));
        };

        let (mut cx, mut cy) = (u0.floor() as i64, v0.floor() as i64);
        let (ex, ey) = (u1.floor() as i64, v1.floor() as i64);
        push(cx, cy);
        let (du, dv) = (u1 - u0, v1 - v0);
        let step_x: i64 = if du > 0.0 { 1 } else { -1 };
        let step_y: i64 = if dv > 0.0 { 1 } else { -1 };
        let next_boundary = |p: f64, step: i64| if step > 0 { p.floor() + 1.0 } else { p.floor() };
        let mut t_max_x = if du != 0.0 { (next_boundary(u0, step_x) - u0) / du } else { f64::INFINITY };
        let mut t_max_y = if dv != 0.0 { (next_boundary(v0, step_y) - v0) / dv } else { f64::INFINITY };
        let t_dx = if du != 0.0 { 1.0 / du.abs() } else { f64::INFINITY };
        let t_dy = if dv != 0.0 { 1.0 / dv.abs() } else { f64::INFINITY };

        const EPS: f64 = 1e-12;
        let limit = (ex - cx).unsigned_abs() + (ey - cy).unsigned_abs() + 2;
        for _ in 0..=limit * 2 {
            if (cx == ex && cy == ey) || (t_max_x > 1.0 + EPS && t_max_y > 1.0 + EPS) {
                break;
            }
            if (t_max_x - t_max_y).abs() <= EPS {
                push(cx + step_x, cy);
                push(cx, cy + step_y);
                cx += step_x;
                cy += step_y;
                t_max_x += t_dx;
                t_max_y += t_dy;
            } else if t_max_x < t_max_y {
                cx += step_x;
                t_max_x += t_dx;
            } else {
                cy += step_y;
                t_max_y += t_dy;
            }
            push(cx, cy);
        }
        push(ex, ey);
        out
    }
}

/// Incidence between cells and network components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellMaps {
    /// Cell index of each bus.
    pub bus_cell: Vec<usize>,
    /// Sorted cell indices touched by each line.
    pub line_cells: Vec<Vec<usize>>,
    /// Lines passing through each cell (indexed by cell index).
    pub cell_lines: Vec<Vec<usize>>,
    /// Buses located in each cell (indexed by cell index).
    pub cell_buses: Vec<Vec<usize>>,
    pub cells_with_bus: BTreeSet<usize>,
    pub cells_with_line: BTreeSet<usize>,
}

impl CellMaps {
    pub fn from_geometry(
        geom: &GridGeometry,
        bus_local: &[(f64, f64)],
        line_ends: &[(usize, usize)],
    ) -> CellMaps {
        let n = geom.n_cells();
        let bus_cell: Vec<usize> = bus_local
            .iter()
            .map(|&(x, y)| geom.index(geom.cell_of_local(x, y)))
            .collect();
        let line_cells: Vec<Vec<usize>> = line_ends
            .iter()
            .map(|&(i, j)| {
                let (a, b) = (bus_local[i], bus_local[j]);
                geom.supercover(a.0, a.1, b.0, b.1)
                    .into_iter()
                    .map(|c| geom.index(c))
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect()
            })
            .collect();
        let mut cell_lines = vec![Vec::new(); n];
        for (l, cells) in line_cells.iter().enumerate() {
            for &k in cells {
                cell_lines[k].push(l);
            }
        }
        let mut cell_buses = vec![Vec::new(); n];
        for (i, &k) in bus_cell.iter().enumerate() {
            cell_buses[k].push(i);
        }
        let cells_with_bus = bus_cell.iter().copied().collect();
        let cells_with_line = line_cells.iter().flatten().copied().collect();
        CellMaps {
            bus_cell,
            line_cells,
            cell_lines,
            cell_buses,
            cells_with_bus,
            cells_with_line,
        }
    }

    /// Cells occupied by a component. Generators share their bus's cell.
    pub fn component_cells(&self, case: &PowerCase, c: ComponentId) -> Vec<usize> {
        use crate::case::ComponentKind::*;
        match c.kind {
            Bus => vec![self.bus_cell[c.index]],
            Generator => vec![self.bus_cell[case.gen_bus(c.index)]],
            Line => self.line_cells[c.index].clone(),
        }
    }
}

/// Projects every bus into the UTM zone of the network centroid and builds
/// the covering grid plus incidence maps.
pub fn build_grid(case: &PowerCase, cell_size: f64) -> Result<(GridGeometry, CellMaps)> {
    let buses = &case.network.buses;
    if buses.is_empty() {
        return Err(Error::validation("case has no buses"));
    }
    for b in buses {
        if !b.latitude.is_finite() || !b.longitude.is_finite() {
            return Err(Error::validation(format!("bus {}: missing coordinates", b.id)));
        }
    }
    let n = buses.len() as f64;
    let lat_c = buses.iter().map(|b| b.latitude).sum::<f64>() / n;
    let lon_c = buses.iter().map(|b| b.longitude).sum::<f64>() / n;
    let zone = zone_for_longitude(lon_c);
    let south = lat_c < 0.0;

    let pts = buses
        .iter()
        .map(|b| latlon_to_utm_in_zone(b.latitude, b.longitude, zone, south).map(|p| (p.easting, p.northing)))
        .collect::<Result<Vec<_>>>()?;
    let (mut min_e, mut min_n) = (f64::INFINITY, f64::INFINITY);
    let (mut max_e, mut max_n) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(e, nn) in &pts {
        min_e = min_e.min(e);
        min_n = min_n.min(nn);
        max_e = max_e.max(e);
        max_n = max_n.max(nn);
    }
    let mut geom = GridGeometry::covering(min_e, min_n, max_e, max_n, cell_size)?;
    geom.zone = zone;
    geom.south = south;

    let local: Vec<(f64, f64)> = pts.iter().map(|&(e, nn)| (e - min_e, nn - min_n)).collect();
    let ends: Vec<(usize, usize)> = (0..case.n_lines()).map(|l| case.line_ends(l)).collect();
    let maps = CellMaps::from_geometry(&geom, &local, &ends);
    Ok((geom, maps))
}
