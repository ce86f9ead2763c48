//! Index groups, localization maps and sequences, densities, and truncation.

mod group;
mod map;
mod profile;
mod truncation;

pub use group::IndexGroup;
pub use map::{
    covering_constant, density_table, lower_density, report_radius, upper_density,
    windowed_density, DensityRow, DensityTable, LocalizationMap, WindowCount, WindowedDensity,
};
pub use profile::{
    check_reference, localization_sequence, self_localization_brute, self_localization_sequence,
    tail_sum, LocalizationProfile,
};
pub use truncation::{truncate_frame, truncation_error_check, TruncationCheck};
