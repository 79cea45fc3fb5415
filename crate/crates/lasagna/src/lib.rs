pub mod rational;
pub mod linalg;
pub mod diagram;
pub mod cobcat;
pub mod complex;
pub mod khovanov;
pub mod cobmaps;
pub mod lee;
pub mod projector;
pub mod rw;
pub mod lasagna;
pub mod cli;
