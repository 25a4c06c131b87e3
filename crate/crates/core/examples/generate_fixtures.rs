//! Regenerates the lumped-system fixture files of the benchmark assembly.
//!
//! Usage: `cargo run -p substruct --example generate_fixtures [dir]`
//! (default directory: `fixtures`).

use substruct::io::save_lumped;
use substruct::lumped::testcase;

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "fixtures".to_string());
    std::fs::create_dir_all(&dir).expect("create fixture directory");
    let write = |name: &str, sys: &substruct::LumpedSystem64| {
        let path = format!("{dir}/{name}.json");
        save_lumped(&path, sys).expect("write fixture");
        println!("wrote {path}");
    };
    write("component_a", &testcase::component_a());
    write("component_b", &testcase::component_b());
    write("mount_m1_fixtures", &testcase::mount_m1_with_fixtures());
    write("mount_m2_fixtures", &testcase::mount_m2_with_fixtures());
    write("monolith", &testcase::assembled_monolith());
}
