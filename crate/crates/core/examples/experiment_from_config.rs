// Runs an experiment described by a config file and lists what it wrote.

use spsa::harness::{render_table, run_experiment, ExperimentConfig};

const CONFIG: &str = "\
# Beale with the T2 gains
preset = T2
noise_sigma = 0.01
max_iterations = 2000
thresholds = 1e-1, 1e-2
replications = 4
master_seed = 17
";

pub fn run_example() -> spsa::Result<()> {
    let dir = tempfile::tempdir().map_err(|e| spsa::SpsaError::io(std::env::temp_dir(), e))?;
    let path = dir.path().join("beale.cfg");
    std::fs::write(&path, CONFIG).map_err(|e| spsa::SpsaError::io(&path, e))?;

    let mut config = ExperimentConfig::from_file(&path)?;
    config.out_dir = Some(dir.path().join("out"));
    let summary = run_experiment(&config)?;
    print!("{}", render_table(&summary));

    let out = dir.path().join("out");
    let mut files: Vec<String> = walk(&out)
        .into_iter()
        .map(|p| p.strip_prefix(&out).unwrap_or(&p).display().to_string())
        .collect();
    files.sort();
    println!(
        "{} files, e.g. {:?}",
        files.len(),
        &files[..3.min(files.len())]
    );
    Ok(())
}

fn walk(dir: &std::path::Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).into_iter().flatten().flatten() {
        let p = entry.path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[allow(dead_code)]
fn main() -> spsa::Result<()> {
    run_example()
}
