pub mod bernoulli;
pub mod cli;
pub mod criteria;
pub mod eigen;
pub mod error;
pub mod modmath;
pub mod packing;
pub mod pairing;
pub mod report;
