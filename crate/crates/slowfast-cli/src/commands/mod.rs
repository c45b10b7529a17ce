pub mod analyze;
pub mod entry_exit;
pub mod simulate;
pub mod sweep;
