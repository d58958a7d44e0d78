//! Compiles tests/smoke.c against the committed header, links the static
//! library, and runs the result. Proves the header matches the ABI.

use std::path::{Path, PathBuf};
use std::process::Command;

fn target_debug_dir() -> PathBuf {
    let exe = std::env::current_exe().expect("test executable path");
    exe.parent()
        .and_then(Path::parent)
        .expect("target directory layout")
        .to_path_buf()
}

#[test]
fn c_program_builds_and_runs_against_the_header() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let static_lib = target_debug_dir().join("libtelescopic_ffi.a");
    assert!(static_lib.exists(), "missing {}", static_lib.display());

    let work_dir = target_debug_dir().join("c-smoke");
    std::fs::create_dir_all(&work_dir).unwrap();
    let binary = work_dir.join("smoke");

    let compile = Command::new("cc")
        .arg("-std=c11")
        .arg("-Wall")
        .arg("-Wextra")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/smoke.c"))
        .arg(&static_lib)
        .arg("-lm")
        .arg("-lpthread")
        .arg("-ldl")
        .arg("-o")
        .arg(&binary)
        .output()
        .expect("cc is available");
    assert!(
        compile.status.success(),
        "compile failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&binary).output().expect("smoke binary runs");
    assert!(
        run.status.success(),
        "smoke binary failed:\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&run.stdout),
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout), "smoke ok\n");
}
