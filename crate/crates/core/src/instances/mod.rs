//! Benchmark parsing, random generation and native persistence.

mod field;
mod io;
mod random;
mod solomon;

pub use field::{field_test_pentagon, FIELD_RADIUS, FIELD_SPEED};
pub use io::{
    instance_from_str, instance_to_string, load_instance, load_solution, save_instance, save_solution,
    solution_from_str, solution_to_string, IoError, FORMAT_VERSION,
};
pub use random::{fleet_capacity, generate_random, generate_random_with, RandomConfig};
pub use solomon::{
    parse_benchmark, parse_solomon, parse_solomon_with, parse_tsptw_matrix, ParseError, ParseErrorKind, SolomonOptions,
};
