//! Text tensor files and JSON reports.

use tensorank::rank_analysis::rank_profile;
use tensorank::synth_io::{ghz, read_tensor, write_report_json, write_tensor};

fn main() -> tensorank::Result<()> {
    let dir = std::env::temp_dir().join(format!("tensorank-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| tensorank::Error::Io {
        path: dir.clone(),
        source: e,
    })?;

    let t = ghz(4, 3)?;
    let path = dir.join("ghz.tns");
    write_tensor(&path, &t)?;
    let back = read_tensor(&path)?;
    println!(
        "wrote {} ({} values), read back identical: {}",
        path.display(),
        back.len(),
        back == t
    );

    let profile = rank_profile(&back, 1e-10, None)?;
    let report = dir.join("profile.json");
    write_report_json(&report, "rank_profile", &profile)?;
    let text = std::fs::read_to_string(&report).unwrap_or_default();
    println!("{}", text.lines().take(8).collect::<Vec<_>>().join("\n"));
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}
