pub mod counting;
pub mod diagram;
pub mod shape;
pub mod tableau;
pub mod sampler;
pub mod oracle;
pub mod selftest;
pub mod cli;
