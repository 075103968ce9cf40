// Compiles a small C program against the generated header and the static
// library, then runs it. Skipped when no C compiler or archive is present.

use std::path::PathBuf;
use std::process::Command;

const SOURCE: &str = r#"
#include <stdio.h>
#include "fourphoton.h"

int main(void) {
    FpState *s = NULL;
    if (fp_state_fourphoton(&s) != FP_STATUS_OK) return 1;
    int64_t num = 0, den = 0;
    if (fp_success_exact(s, 0x3, &num, &den) != FP_STATUS_OK) return 2;
    if (num != 5 || den != 6) return 3;
    if (fp_success_exact(s, 0x7, &num, &den) != FP_STATUS_ODD_PARITY) return 4;
    double phases[4] = {0, 0, 0, 0}, e = 0;
    if (fp_correlation(s, phases, &e) != FP_STATUS_OK || e < 0.999999) return 5;
    fp_state_free(s);
    printf("%s\n", fp_version());
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|p| p.parent()).unwrap().to_path_buf();
    let archive = profile_dir.join("libfourphoton_ffi.a");
    let has_cc = Command::new("cc").arg("--version").output().is_ok();
    if !archive.exists() || !has_cc {
        eprintln!("skipping: archive or C compiler not available");
        return;
    }
    let dir = tempfile_dir();
    let src = dir.join("main.c");
    let bin = dir.join("main");
    std::fs::write(&src, SOURCE).unwrap();
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&archive)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), env!("CARGO_PKG_VERSION"));
}

fn tempfile_dir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("fourphoton-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
