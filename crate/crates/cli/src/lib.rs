//! Library side of the `lastmile` command: instance loading, the fleet-size
//! benchmark and SVG charts.

pub mod app;
pub mod bench;
pub mod input;
pub mod svg;
