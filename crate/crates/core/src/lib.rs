pub mod budget;
pub mod contact;
pub mod curtain;
pub mod graph;
pub mod median;
pub mod projection;
pub mod raag;
