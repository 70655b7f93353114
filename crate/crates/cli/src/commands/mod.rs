pub mod curve;
pub mod price;
pub mod verify;
