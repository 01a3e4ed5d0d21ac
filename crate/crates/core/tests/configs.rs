use std::path::Path;

use qpde::experiment::ExperimentConfig;

#[test]
fn shipped_configs_parse_and_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            cfg.validate()
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert!(!cfg.cells().unwrap().is_empty());
            if let Some(noise) = &cfg.noise {
                noise.model().unwrap();
            }
            seen += 1;
        }
    }
    assert!(seen >= 5);
}
