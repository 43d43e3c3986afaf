pub mod cli;
pub mod complex;
pub mod corpus;
pub mod diagrams;
pub mod field;
pub mod ichains;
pub mod linalg;
pub mod perversity;
pub mod products;
pub mod signcalc;
pub mod spacefile;
