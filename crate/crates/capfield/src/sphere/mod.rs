//! Geometry of the unit sphere: points, caps, gauges, nets, 5r-coverings.

pub mod cap;
pub mod net;
pub mod point;
pub mod vitali;

pub use cap::{
    cap_intersection_measure, cap_measure, cap_subset, caps_intersect, dilate_cap,
    doubling_constant, inverse_cap_measure, uniform_in_cap, uniform_on_sphere, Cap, GaugeKind,
    GaugeSpec, Slice,
};
pub use net::{build_net, validate_net_family, verify_net, Net, NetReport};
pub use point::{angle_of_chord, chord_of_angle, chordal_distance, SpherePoint};
pub use vitali::{five_r_certificate, five_r_disjointify, five_r_disjointify_indices};
