//! Compile and run a C program against the generated header and the static
//! library.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "diagbbw.h"

int main(int argc, char **argv) {
    if (argc < 2) return 10;
    BbwScenario *s = NULL;
    if (bbw_scenario_load(argv[1], &s) != BBW_STATUS_OK) {
        fprintf(stderr, "%s\n", bbw_last_error());
        return 11;
    }
    BbwAnalysis *a = NULL;
    if (bbw_analyze(s, 0, 0, &a) != BBW_STATUS_OK) return 12;
    BbwVerdict v;
    size_t j = 99;
    if (bbw_analysis_verdict(a, &v) != BBW_STATUS_OK || v != BBW_VERDICT_NONVANISHING) return 13;
    if (bbw_analysis_degree(a, &j) != BBW_STATUS_OK) return 14;
    printf("%s degree %zu\n", bbw_version(), j);
    bbw_analysis_free(a);
    bbw_scenario_free(s);
    return 0;
}
"#;

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn compiler() -> Option<String> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .map(String::from)
}

/// `target/<profile>` for the current test binary.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn header_is_generated_and_complete() {
    let header = std::fs::read_to_string(manifest().join("include/diagbbw.h")).unwrap();
    for name in [
        "bbw_version",
        "bbw_last_error",
        "bbw_scenario_load",
        "bbw_scenario_parse",
        "bbw_scenario_free",
        "bbw_analyze",
        "bbw_analysis_free",
        "bbw_analysis_to_json",
        "bbw_string_free",
        "bbw_straighten",
        "typedef struct BbwScenario BbwScenario",
    ] {
        assert!(header.contains(name), "{name} missing from the header");
    }
}

#[test]
fn c_program_links_and_runs() {
    let Some(cc) = compiler() else {
        panic!("no C compiler found");
    };
    let lib = profile_dir().join("libdiagbbw_ffi.a");
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let src = dir.join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();

    let syntax = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(manifest().join("include"))
        .arg(&src)
        .output()
        .unwrap();
    assert!(syntax.status.success(), "{}", String::from_utf8_lossy(&syntax.stderr));

    assert!(lib.exists(), "static library not found at {}", lib.display());
    let exe = dir.join("main");
    let build = Command::new(&cc)
        .args(["-std=c99", "-I"])
        .arg(manifest().join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(build.status.success(), "{}", String::from_utf8_lossy(&build.stderr));

    let scenario = manifest().join("../core/scenarios/sl_infinity_degree_one.toml");
    let run = Command::new(&exe).arg(scenario).output().unwrap();
    assert!(run.status.success(), "exit {:?}: {}", run.status.code(), String::from_utf8_lossy(&run.stderr));
    let out = String::from_utf8(run.stdout).unwrap();
    assert_eq!(out.trim(), format!("{} degree 1", env!("CARGO_PKG_VERSION")));
}
