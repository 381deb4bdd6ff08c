pub mod geometry;
pub mod packing;
pub mod hierarchy;
pub mod analysis;
pub mod document;
pub mod verify;
pub mod render;
