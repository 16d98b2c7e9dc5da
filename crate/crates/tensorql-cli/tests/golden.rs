//! Golden-file corpus: every `testdata/*.query` runs through the binary and
//! must reproduce its paired `.expected` stdout byte for byte, twice (the
//! outputs are contractually deterministic), with the directed exit code.
//!
//! Directives at the top of a `.query` file:
//!   #!load ALIAS=FILE   repeatable, relative to testdata/
//!   #!cmd ARGS...       subcommand line (default: `query -`)
//!   #!exit CODE         expected exit code (default 0)
//! The remaining lines are fed to the process on stdin.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

struct Case {
    name: String,
    loads: Vec<String>,
    cmd: Vec<String>,
    exit: i32,
    body: String,
}

fn parse_case(path: &Path) -> Case {
    let text = fs::read_to_string(path).expect("query file readable");
    let mut loads = Vec::new();
    let mut cmd = vec!["query".to_string(), "-".to_string()];
    let mut exit = 0;
    let mut body = String::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("#!load ") {
            loads.push("--load".to_string());
            loads.push(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("#!cmd ") {
            cmd = rest.split_whitespace().map(str::to_string).collect();
        } else if let Some(rest) = line.strip_prefix("#!exit ") {
            exit = rest.trim().parse().expect("exit directive parses");
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    Case {
        name: path.file_stem().unwrap().to_string_lossy().into_owned(),
        loads,
        cmd,
        exit,
        body,
    }
}

fn run_case(dir: &Path, case: &Case) -> (Vec<u8>, i32) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tensorql"))
        .current_dir(dir)
        .args(&case.loads)
        .args(&case.cmd)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(case.body.as_bytes())
        .expect("stdin accepts query");
    let out = child.wait_with_output().expect("binary exits");
    (out.stdout, out.status.code().unwrap_or(-1))
}

#[test]
fn golden_corpus() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("testdata");
    let mut queries: Vec<PathBuf> = fs::read_dir(&dir)
        .expect("testdata exists")
        .filter_map(|e| {
            let p = e.unwrap().path();
            (p.extension().is_some_and(|x| x == "query")).then_some(p)
        })
        .collect();
    queries.sort();
    assert!(queries.len() >= 10, "corpus present");

    for path in queries {
        let case = parse_case(&path);
        let expected = fs::read(path.with_extension("expected"))
            .unwrap_or_else(|_| panic!("missing .expected for {}", case.name));

        let (out1, code1) = run_case(&dir, &case);
        let (out2, code2) = run_case(&dir, &case);
        assert_eq!(code1, case.exit, "exit code for {}", case.name);
        assert_eq!(code2, case.exit, "exit code for {} (second run)", case.name);
        assert_eq!(
            out1, out2,
            "stdout must be byte-identical across runs for {}",
            case.name
        );
        assert_eq!(
            out1,
            expected,
            "stdout mismatch for {}:\n--- got ---\n{}\n--- want ---\n{}",
            case.name,
            String::from_utf8_lossy(&out1),
            String::from_utf8_lossy(&expected)
        );
    }
}
