#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

/// One pinned CLI invocation. `@name` in an argument is a file in the run
/// directory; `stdout` names the file that captures standard output.
pub struct Golden {
    pub args: &'static [&'static str],
    pub stdout: Option<&'static str>,
    pub exit: i32,
}

pub const GOLDENS: &[Golden] = &[
    Golden {
        args: &[
            "generate",
            "--text",
            "EAT",
            "--ec",
            "L",
            "--matrix",
            "@eat_l.txt",
            "--out",
            "@eat_l.pgm",
        ],
        stdout: None,
        exit: 0,
    },
    Golden {
        args: &[
            "generate",
            "--text",
            "https://example.org/menu",
            "--ec",
            "Q",
            "--scale",
            "3",
            "--rotate",
            "45",
            "--out",
            "@menu_q_45.pgm",
        ],
        stdout: None,
        exit: 0,
    },
    Golden {
        args: &[
            "peacock",
            "--text",
            "EAT",
            "--ec",
            "H",
            "--out",
            "@eat_pqr.pgm",
            "--report",
            "@eat_pqr.json",
        ],
        stdout: None,
        exit: 0,
    },
    Golden {
        args: &[
            "peacock",
            "--text",
            "EAT",
            "--ec",
            "H",
            "--diamond",
            "--out",
            "@eat_pqr_diamond.pbm",
        ],
        stdout: None,
        exit: 0,
    },
    Golden {
        args: &["scan", "@eat_l.pgm", "--policy", "strict", "--json"],
        stdout: Some("scan_eat_l.json"),
        exit: 0,
    },
    Golden {
        args: &["scan", "@eat_pqr.pgm", "--policy", "arbitrary", "--seed", "7", "--json"],
        stdout: Some("scan_eat_pqr.json"),
        exit: 7,
    },
    Golden {
        args: &[
            "simulate", "--codes", "3", "--mode", "plain", "--trials", "200", "--seed", "42", "--json",
        ],
        stdout: Some("simulate_plain_3.json"),
        exit: 0,
    },
    Golden {
        args: &[
            "simulate", "--codes", "2", "--mode", "pqr", "--trials", "50", "--seed", "1", "--json",
        ],
        stdout: Some("simulate_pqr_2.json"),
        exit: 0,
    },
];

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

/// Every file a golden run produces, in order.
pub fn golden_files() -> Vec<&'static str> {
    let mut out = Vec::new();
    for g in GOLDENS {
        for a in g.args {
            if let Some(name) = a.strip_prefix('@') {
                if !out.contains(&name) {
                    out.push(name);
                }
            }
        }
        if let Some(name) = g.stdout {
            out.push(name);
        }
    }
    out
}

/// Runs every golden command through the built binary, writing into `dir`.
pub fn run_goldens(dir: &Path) -> Result<(), String> {
    for g in GOLDENS {
        let args: Vec<String> = g
            .args
            .iter()
            .map(|a| match a.strip_prefix('@') {
                Some(name) => dir.join(name).to_string_lossy().into_owned(),
                None => a.to_string(),
            })
            .collect();
        let out = Command::new(env!("CARGO_BIN_EXE_pqr"))
            .args(&args)
            .output()
            .map_err(|e| e.to_string())?;
        if out.status.code() != Some(g.exit) {
            return Err(format!(
                "{:?} exited with {:?}, expected {}",
                g.args,
                out.status.code(),
                g.exit
            ));
        }
        if let Some(name) = g.stdout {
            std::fs::write(dir.join(name), &out.stdout).map_err(|e| e.to_string())?;
        }
    }
    Ok(())
}

/// Files in `dir` that differ from the committed goldens.
pub fn golden_mismatches(dir: &Path) -> Vec<String> {
    golden_files()
        .into_iter()
        .filter(|name| {
            let got = std::fs::read(dir.join(name)).ok();
            let want = std::fs::read(golden_dir().join(name)).ok();
            got.is_none() || got != want
        })
        .map(String::from)
        .collect()
}
