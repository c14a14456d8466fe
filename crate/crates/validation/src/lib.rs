//! Holds the `acceptance` test target, which checks each acceptance criterion
//! end to end through the CLI and the kernels and prints one PASS/FAIL line
//! per criterion.
