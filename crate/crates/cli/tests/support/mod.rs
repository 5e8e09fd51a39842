#![allow(dead_code)]

use std::path::{Path, PathBuf};

use hyplab::json::{self, ScalarFormat};
use serde::Serialize;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("hyplab").chain(args.iter().copied());
    let code = hyplab_cli::run(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

pub fn write_json<T: Serialize + ?Sized>(dir: &Path, name: &str, value: &T) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, json::to_string(value, ScalarFormat::Idempotent).unwrap()).unwrap();
    path
}

pub fn write_raw(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

pub fn envelope(r: &Run) -> serde_json::Value {
    serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("stdout is not one JSON document: {e}\n{}", r.stdout))
}
