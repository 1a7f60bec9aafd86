#![allow(dead_code)]

pub mod checks;
pub mod drive;
pub mod lp_oracle;
pub mod routing_oracle;
