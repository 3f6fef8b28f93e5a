use std::path::Path;
use std::process::{Command, Output};

pub fn dynembed(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynembed"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("spawn dynembed")
}

pub fn run_ok(args: &[&str], cwd: &Path) -> String {
    let out = dynembed(args, cwd);
    assert!(
        out.status.success(),
        "command {args:?} failed:\n{}{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 stdout")
}

/// Byte compare of every file in two directories (same name set required).
#[allow(dead_code)]
pub fn assert_dirs_identical(a: &Path, b: &Path) {
    let list = |dir: &Path| -> Vec<String> {
        let mut names: Vec<String> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        names.sort();
        names
    };
    let names = list(a);
    assert_eq!(names, list(b), "directories hold different file sets");
    for name in names {
        let x = std::fs::read(a.join(&name)).unwrap();
        let y = std::fs::read(b.join(&name)).unwrap();
        assert_eq!(x, y, "file {name} differs between reruns");
    }
}
