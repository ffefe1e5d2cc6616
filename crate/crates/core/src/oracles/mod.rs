pub mod dense;
pub mod diffusion;
