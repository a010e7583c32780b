//! Geography: UTM projection and the simulation grid.

pub mod grid;
pub mod utm;

pub use grid::{build_grid, Cell, CellMaps, GridGeometry, DEFAULT_CELL_SIZE};
pub use utm::{latlon_to_utm, latlon_to_utm_in_zone, utm_to_latlon, zone_for_longitude, UtmPoint};
