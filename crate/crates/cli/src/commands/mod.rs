pub mod fit;
pub mod gof;
pub mod measure;
pub mod simulate;
pub mod sweep;
