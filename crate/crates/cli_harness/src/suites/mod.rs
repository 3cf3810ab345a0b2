pub mod deform;
pub mod estimates;
pub mod index_scan;
pub mod iterate;
pub mod modes;
pub mod squeeze;
