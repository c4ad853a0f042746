//! Every shipped recipe parses and validates for the command it is meant for.

use std::path::PathBuf;

use scm::experiment::{Command, ExperimentConfig};

fn command_for(name: &str) -> Command {
    if name.starts_with("fig01") {
        Command::ConditionalSer
    } else if name.ends_with("_bounds") {
        Command::Bounds
    } else if name.starts_with("fig06") || name.starts_with("fig07") {
        Command::Capacity
    } else {
        Command::Ber
    }
}

#[test]
fn shipped_configs_validate() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        let name = path.file_stem().unwrap().to_str().unwrap().to_string();
        let cfg = ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{name}: {e}"));
        cfg.validate(command_for(&name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(cfg.output_path().unwrap().ends_with(&format!("{name}.csv")));
        seen += 1;
    }
    assert!(seen >= 60, "only {seen} configs found");
}
