//! Level-set geometry: polylines, nodal sets, curvature, the enhanced second
//! fundamental form, normal velocity, graphs over a reference curve and
//! parabolic Hölder seminorms.

mod contour;
mod curvature;
mod distance;
mod enhanced;
mod graph;
mod holder;
mod io;
mod polyline;
mod velocity;

pub use contour::extract_nodal_set;
pub use curvature::{polyline_curvature, polyline_curvature_span, CurveGeometry};
pub use distance::{hausdorff_distance, point_segment_distance, SignedDistance};
pub use enhanced::{enhanced_a, enhanced_a_with, sample_enhanced_a, MaskedField, DEFAULT_GRAD_FLOOR};
pub use graph::{graph_over, graph_over_with, GraphOverReference};
pub use holder::{parabolic_holder_seminorm, HolderSample};
pub use io::{read_polyline_csv, write_polyline_csv};
pub use polyline::Polyline;
pub(crate) use polyline::segments_touch;
pub use velocity::{normal_velocity, normal_velocity_with, NodalValues};

pub(crate) fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub(crate) fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

pub(crate) fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    norm(sub(a, b))
}
