//! Golden cases shared by the CLI tests and the acceptance target.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

pub fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub fn doshap(args: &[String]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_doshap"))
        .args(args)
        .env("DOSHAP_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn args(command: &[&str], files: &[(&str, &str)], tail: &[&str]) -> Vec<String> {
    let mut out: Vec<String> = command.iter().map(|s| s.to_string()).collect();
    for (flag, file) in files {
        out.push(flag.to_string());
        out.push(fixture(file));
    }
    out.extend(tail.iter().map(|s| s.to_string()));
    out
}

/// `(golden file, arguments)`; every subcommand and both output formats.
pub fn cases() -> Vec<(&'static str, Vec<String>)> {
    let chain = [("--graph", "chain3.graph.json"), ("--game", "chain3.game.json")];
    let diamond = [("--graph", "diamond.graph.json"), ("--game", "diamond.game.json")];
    vec![
        ("classes_chain3.json", args(&["classes"], &chain[..1], &[])),
        ("classes_diamond.csv", args(&["classes"], &diamond[..1], &["--format", "csv"])),
        ("exact_chain3.json", args(&["exact"], &chain, &[])),
        ("exact_diamond_banzhaf.csv", args(&["exact"], &diamond, &["--scheme", "banzhaf", "--format", "csv"])),
        ("estimate_diamond.json", args(&["estimate"], &diamond, &["--budget", "4", "--seed", "7"])),
        (
            "estimate_diamond_mc_msr.json",
            args(&["estimate"], &diamond, &["--budget", "5", "--seed", "3", "--base", "mc-msr"]),
        ),
        ("identify_bow.json", args(&["identify"], &[("--graph", "bow.graph.json")], &[])),
        ("identify_frontdoor.csv", args(&["identify"], &[("--graph", "frontdoor.graph.json")], &["--format", "csv"])),
        ("interactions_chain3.json", args(&["interactions"], &chain, &["--order", "2"])),
        (
            "report_diamond.csv",
            args(&["report", "--plot-data"], &diamond, &["--seeds", "8", "--ratios", "0.25,0.5,1", "--format", "csv"]),
        ),
    ]
}

/// Runs a golden case; with `DOSHAP_UPDATE_GOLDEN` set the file is rewritten.
pub fn check_golden(name: &str, args: &[String]) -> Result<(), String> {
    let out = doshap(args);
    if !out.status.success() {
        return Err(format!("{name}: exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stdout)));
    }
    let path = golden_path(name);
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    if std::env::var_os("DOSHAP_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &text).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected == text {
        Ok(())
    } else {
        Err(format!("{name}: output differs from golden file\n--- expected\n{expected}\n--- got\n{text}"))
    }
}
