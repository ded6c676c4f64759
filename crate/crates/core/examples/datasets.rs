//! Write the bundled demo datasets as JSON into a directory.
//!
//! cargo run --example datasets -- out/

use std::path::PathBuf;

use uncertain_sets::fixtures::{age_family, dotplot_family, courses_family, residency_family, Flavour};
use uncertain_sets::serialize;

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    std::fs::create_dir_all(&dir)?;
    let flavours = [
        ("certain", Flavour::Certain),
        ("partial", Flavour::Partial),
        ("blanket", Flavour::Blanket),
    ];
    std::fs::write(dir.join("courses.json"), serialize(&courses_family()))?;
    for (name, flavour) in flavours {
        std::fs::write(dir.join(format!("residency-{name}.json")), serialize(&residency_family(flavour)))?;
        std::fs::write(dir.join(format!("age-{name}.json")), serialize(&age_family(flavour)))?;
        std::fs::write(dir.join(format!("ages-{name}.json")), serialize(&dotplot_family(flavour)))?;
    }
    Ok(())
}
