pub mod bitset;
pub mod dot;
pub mod exact;
pub mod grid;
pub mod io;
pub mod lattice;
pub mod lift;
pub mod order;
pub mod verify;

pub use bitset::BitSet;
pub use lattice::{FiniteDistributiveLattice, LatticeHom, MeetRule};
pub use order::{DownSet, Poset};
