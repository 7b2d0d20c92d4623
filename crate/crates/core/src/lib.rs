pub mod cli;
pub mod coalg;
pub mod formality;
pub mod gen;
pub mod geometry;
pub mod hkr;
pub mod hochschild;
pub mod koszulbar;
pub mod linalg;
pub mod ratpoly;
