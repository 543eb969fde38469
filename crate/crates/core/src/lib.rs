pub mod canon;
pub mod catalog;
pub mod census;
pub mod cover;
pub mod error;
pub mod gf;
pub mod graph;
pub mod group;
pub mod homology;
pub mod io;
pub mod meataxe;
pub mod perm;
pub mod poly;
pub mod symmetry;
pub mod universal;
pub mod verify;

pub use error::{CoverError, GraphError, GroupError, ParseError};
pub use graph::{EdgeKind, Graph, StructuralProfile};
pub use group::{Chain, PermGroup};
pub use perm::Perm;
