//! Every geometric tolerance the scanner uses, in one place.

/// Scanner heuristics. [`Tolerances::DEFAULT`] is what [`super::scan`] uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Allowed deviation of each finder run from its nominal width, as a
    /// fraction of that width.
    pub run_ratio: f64,
    /// Candidates closer than this many modules are merged.
    pub merge_radius_modules: f64,
    /// Maximum |cos| of the angle at a triple's corner.
    pub angle_cos: f64,
    /// Maximum ratio between the largest and smallest finder module size.
    pub size_ratio: f64,
    /// Maximum ratio between the two arm lengths of a triple.
    pub length_ratio: f64,
    /// Maximum distance, in modules, between the estimated dimension and
    /// the nearest valid side length.
    pub dimension_modules: f64,
    /// Half-width, in modules, of the alignment search window.
    pub alignment_window: i32,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        run_ratio: 0.5,
        merge_radius_modules: 2.0,
        angle_cos: 0.2,
        size_ratio: 1.4,
        length_ratio: 1.3,
        dimension_modules: 0.35,
        alignment_window: 4,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances::DEFAULT
    }
}
