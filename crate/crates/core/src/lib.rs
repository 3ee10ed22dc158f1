pub mod cost_model;
pub mod cuckoo;
pub mod harness;
pub mod protocols;
pub mod spectrum;
