pub mod interp;
pub mod quad;
pub mod special;
pub mod stats;
pub mod talbot;
