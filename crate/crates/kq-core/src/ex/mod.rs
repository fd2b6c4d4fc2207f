//! Subdivision, `Ex` and the relative construction `Ex_Y X`.

pub mod adjunction;
pub mod filler;
pub mod kpos;
pub mod moss;
pub mod object;
pub mod psi;
pub mod relative;
pub mod sd;
pub mod tower;
pub mod transport;

pub use kpos::{kpos, kpos_category, JoinMap, Subset, SubsetPoset};
pub use moss::{verify_moss, verify_moss_at, MossReport};
pub use sd::{
    max_map, precompose, sd, sd_semisimplicial_check, sd_semisimplicial_comparison, sd_simplex, Datum, SdSimplex, SemiSimplicialReport, Subdivision,
};
pub use object::{ExObject, nerve_map, unit_datum};
pub use psi::{psi, Psi, PsiOrigin, PSI_CACHE_ENV};
pub use filler::{ex_horn_filler, ex_tower, FillerReport, HornFiller};
pub use relative::{classify_and_pstructure, ex_rel, CellClass, ClassCounts, ExRel, ExUnitStructure, PointCheck, PropertyReport};
pub use tower::{tower, Identification, Tower, TowerStage};
pub use transport::{sd_generator, transport_certificate, SdGenerator, TransportReport, Transported};
pub use adjunction::{Adjunction, AdjunctionReport};
