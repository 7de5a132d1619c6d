pub mod collective;
pub mod commands;
pub mod encoding;
pub mod error;
pub mod ftmeas;
pub mod gates;
pub mod hilbert;
pub mod linalg;
pub mod noise;
pub mod report;
