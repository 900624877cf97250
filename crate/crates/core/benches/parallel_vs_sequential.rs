// Placeholder; filled in after the library settles.
fn main() {}
