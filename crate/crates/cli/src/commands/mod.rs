pub mod emit_plots;
pub mod oracle;
pub mod train;
pub mod verify;
