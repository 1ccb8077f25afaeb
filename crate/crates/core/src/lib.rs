pub mod linalg;
pub mod cochain;
pub mod complex;
pub mod constructions;
pub mod degree;
pub mod metric;
pub mod report;
