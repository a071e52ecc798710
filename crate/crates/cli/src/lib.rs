pub mod cli;
pub mod formats;
pub mod manifest;
pub mod par;
pub mod svg;
pub mod table;
