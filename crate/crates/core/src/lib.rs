pub mod bounds;
pub mod compare;
pub mod error;
pub mod exact;
pub mod input;
pub mod kernels;
pub mod majorization;
pub mod par;
pub mod rank;
pub mod types;
pub mod verify;
