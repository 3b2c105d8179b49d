//! Multi-objective landscape plots: grid discretization, MO gradient field,
//! height accumulation, dominance counts, and raster rendering.

mod field;
mod grid;
mod render;

pub use field::{compute_plot_field, mo_gradient_field, PathEnd, PlotField, DEFAULT_TAU};
pub use grid::{build_grid, GridSpec, NEIGHBOR_OFFSETS};
pub use render::{
    render_decision_space, render_objective_space, render_plot, write_atomic, Glyph, HeightScale, Marker, Overlay,
    RenderStyle, Rendered, Viewport, TRACE_PALETTE,
};
