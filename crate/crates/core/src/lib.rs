//! Hessian-Schatten total variation of CPWL and smooth functions, with the
//! matrix, mixed-norm and Dirac-fence machinery behind it.

pub mod cpwl;
pub mod domain;
pub mod fence;
pub mod fixtures;
pub mod geometry;
pub mod ingest;
pub mod matnorm;
pub mod mixed_fields;
pub mod oracle;
mod polytope;
pub mod smooth;
pub mod sum;
pub mod transforms;
