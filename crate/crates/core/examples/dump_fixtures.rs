//! Writes every built-in fixture map to `<dir>/<name>.um` (first CLI
//! argument, default `models`), in the JSON model format the CLI loads.

use epdl_core::fixtures::fixtures;

fn main() -> std::io::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "models".into());
    std::fs::create_dir_all(&dir)?;
    for (name, map) in fixtures() {
        let path = format!("{dir}/{name}.um");
        std::fs::write(&path, map.to_json() + "\n")?;
        println!("wrote {path}");
    }
    Ok(())
}
