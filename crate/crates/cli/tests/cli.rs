use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use menger_core::fixtures::ell;
use menger_core::generator::{replay, GeneratorChoice};
use menger_core::graph::{neighbor, trace};
use menger_core::sequences::CoherentSequence;
use menger_core::{base_vertex, parse_word, Dyadic, Vertex};
use serde_json::Value;

const OMEGA6: &str = "xYYxxXyxyXYyXyyyXyXYxYyxXYYYXy";

fn menger(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_menger"))
        .args(args)
        .env_remove("MENGER_DEPTH_CAP")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = menger(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn ok_json(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    serde_json::from_str(&ok(&full)).unwrap()
}

fn code(args: &[&str]) -> i32 {
    menger(args).status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn exact(v: &Value) -> Dyadic {
    Dyadic::parse_fraction(v["exact"].as_str().unwrap()).unwrap()
}

#[test]
fn loop_example() {
    assert_eq!(ok(&["isloop", "--level", "2", "xYYx"]), "true\n");
    assert_eq!(ok_json(&["isloop", "--level", "2", "xYYx"])["is_loop"], true);
    assert_eq!(ok(&["isloop", "--level", "2", "xy"]), "false\n");
}

#[test]
fn worked_projection() {
    assert_eq!(ok(&["project", "--from", "6", "--to", "5", OMEGA6]), "yyYxXY\n");
    let v = ok_json(&["project", "--from", "6", "--to", "5", OMEGA6]);
    assert_eq!(v["word"], "yyYxXY");

    let table = ok_json(&["decompose", "--level", "6", OMEGA6]);
    assert_eq!(table["disks"], serde_json::json!([1, 6, 5, 6, 5, 6, 1]));
    assert_eq!(table["eps"], serde_json::json!([1, 1, -1, 1, -1, -1, 1]));
    let csv = ok(&["decompose", "--level", "6", "--csv", OMEGA6]);
    assert_eq!(csv.lines().count(), 8);
    assert!(csv.starts_with("i,block,d,psi,color,eps,b\n1,xYYxxXy,1,"));
}

#[test]
fn distance_from_the_identity_to_l1() {
    let dir = tempfile::tempdir().unwrap();
    let e = dir.path().join("empty.json");
    let l1 = dir.path().join("L1.json");
    ok(&["fixture", "empty", "--depth", "16", "--out", path(&e)]);
    ok(&["fixture", "L", "--i", "1", "--depth", "16", "--out", path(&l1)]);
    let v = ok_json(&["rho", "--tol", "1e-4", path(&e), path(&l1)]);
    assert_eq!(v["status"], "converged");
    let (lo, hi) = (exact(&v["lo"]), exact(&v["hi"]));
    let twelve = |d: &Dyadic| d.double(3) + &d.double(2);
    assert!(twelve(&lo) <= Dyadic::new(11, 0) && Dyadic::new(11, 0) <= twelve(&hi));
    assert!(hi.to_f64() - lo.to_f64() <= 1e-4);

    let same = ok_json(&["rho", path(&l1), path(&l1)]);
    assert_eq!(same["status"], "exact_zero");
}

#[test]
fn rationals_are_exact_and_decimal() {
    let v = ok_json(&["length", "--level", "1", &ell(1).unwrap().to_string()]);
    assert_eq!(v["length"]["exact"], "31/2^5");
    assert_eq!(v["length"]["decimal"], "0.968750000000");
    assert_eq!(v["weights"][0], "1/2^1");
    let text = ok(&["length", "--level", "1", "xX"]);
    assert!(text.ends_with("length 7/2^3 (0.875000000000)\n"), "{text}");
}

#[test]
fn fixtures_match_the_library() {
    assert_eq!(ok(&["fixture", "ell", "--k", "3", "--n", "5"]).trim(), ell(3).unwrap().to_string());
    assert_eq!(code(&["fixture", "ell", "--k", "6", "--n", "5"]), 1);
    let he1 = ok(&["fixture", "he1", "--depth", "5"]);
    let s = CoherentSequence::from_json(&he1).unwrap();
    assert_eq!(s.depth(), 5);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["hanoi", "stage", "--pegs", "1,1,0"]), 1);
    let o = menger(&["--json", "hanoi", "stage", "--pegs", "1,1,0"]);
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["code"], "NOT_ALLOWABLE");
    assert_eq!(code(&["project", "--from", "2", "--to", "3", "xy"]), 1);
    assert_eq!(code(&["neighbors", "--level", "3", "(.01,A_)"]), 1);
    assert_eq!(code(&["neighbors", "(.01,_A)"]), 2);

    let o = menger(&["isloop", "--level", "2", "xzY"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("\"z\""));
    assert_eq!(code(&["isloop", "--level", "2", "--bogus", "xy"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["norm", "/nonexistent/seq.json"]), 2);
    assert_eq!(code(&["hanoi", "vertex", "{not json"]), 2);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn depth_cap_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_menger"))
        .args(["isloop", "--level", "4", "xy"])
        .env("MENGER_DEPTH_CAP", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("LEVEL_CAP"));
    assert_eq!(code(&["graph", "--level", "13"]), 1);
}

#[test]
fn seeds_reproduce_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let replay_path = dir.path().join("replay.json");
    let a = ok(&["generate", "--seed", "7", "--depth", "8", "--replay-out", path(&replay_path)]);
    let b = ok(&["generate", "--seed", "7", "--depth", "8"]);
    assert_eq!(a, b);
    assert_ne!(a, ok(&["generate", "--seed", "8", "--depth", "8"]));

    let seq = CoherentSequence::from_json(&a).unwrap();
    let choice: GeneratorChoice = serde_json::from_str(&std::fs::read_to_string(&replay_path).unwrap()).unwrap();
    assert_eq!(replay(&choice).unwrap(), seq.words());
}

#[test]
fn emitted_json_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    let h = dir.path().join("h.json");
    let p = dir.path().join("p.json");
    ok(&["generate", "--seed", "3", "--depth", "6", "--out", path(&g)]);
    ok(&["fixture", "L", "--i", "2", "--depth", "6", "--out", path(&h)]);
    ok(&["star", path(&g), path(&h), "--out", path(&p)]);
    for f in [&g, &h, &p] {
        let v = ok_json(&["norm", path(f)]);
        assert!(exact(&v["lo"]) <= exact(&v["hi"]));
    }
    let v = ok_json(&["norm", "--depth", "3", path(&p)]);
    assert_eq!(v["level"], 3);
    ok_json(&["rho", path(&g), path(&p)]);

    let t = ok_json(&["trace", "--level", "3", "xyXy"]);
    let end = t["end"].as_str().unwrap();
    assert_eq!(end.parse::<Vertex>().unwrap(), trace(&base_vertex(3), &parse_word("xyXy").unwrap()).vertex);
    let ns = ok_json(&["neighbors", end]);
    for entry in ns["neighbors"].as_array().unwrap() {
        let a = parse_word(entry["letter"].as_str().unwrap()).unwrap().letters()[0];
        let v: Vertex = entry["vertex"].as_str().unwrap().parse().unwrap();
        assert_eq!(v, neighbor(&end.parse().unwrap(), a));
    }

    let r = ok_json(&["reduce", "xyYXxx"]);
    assert_eq!(r["reduced"], "xx");
    let again = ok_json(&["reduce", r["reduced"].as_str().unwrap()]);
    assert_eq!(again["reduced"], "xx");
    assert_eq!(ok(&["reduce", "xX"]).trim(), "e");
    assert_eq!(ok(&["isloop", "--level", "1", "e"]).trim(), "true");
}

#[test]
fn hanoi_states_round_trip() {
    let state = ok(&["--json", "hanoi", "play", "--disks", "3", "xyxxxYxxyy"]);
    let end = trace(&base_vertex(2), &parse_word("xyxxxYxxyy").unwrap()).vertex;
    let v = ok_json(&["hanoi", "vertex", &state]);
    assert_eq!(v["vertex"].as_str().unwrap().parse::<Vertex>().unwrap(), end);

    let from_vertex = ok(&["--json", "hanoi", "state", &end.to_string()]);
    assert_eq!(serde_json::from_str::<Value>(&from_vertex).unwrap(), serde_json::from_str::<Value>(&state).unwrap());

    let moves = ok_json(&["hanoi", "moves", &state]);
    let moves = moves.as_array().unwrap();
    assert_eq!(moves.len(), 4);
    for m in moves {
        let s = m["state"].to_string();
        ok(&["hanoi", "vertex", &s]);
    }

    let sol = ok_json(&["hanoi", "solution", "--disks", "4"]);
    assert_eq!(sol.as_array().unwrap().len(), 15);
    assert_eq!(ok_json(&["hanoi", "stage", "--pegs", "0,0,0"])["stage"], "000");
    let lead = ok_json(&["hanoi", "leading", "--disks", "3", "x"]);
    // after one forward letter the board sits at stage 1/8; the next transition is the second
    assert_eq!(lead["board"], "001");
    let sol3 = ok_json(&["hanoi", "solution", "--disks", "3"]);
    assert_eq!(lead["leading_disk"], sol3[1]["disk"]);
}

#[test]
fn graph_exports() {
    assert_eq!(ok(&["graph", "--level", "3"]).trim(), "level 3: 128 vertices, 256 edges");
    let g = ok_json(&["graph", "--level", "2"]);
    let vertices = g["vertices"].as_array().unwrap();
    assert_eq!(vertices.len(), 32);
    for v in vertices {
        v.as_str().unwrap().parse::<Vertex>().unwrap();
    }
    let dot = ok(&["export-dot", "--level", "2"]);
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), 64);
    assert_eq!(dot.lines().filter(|l| l.contains("label=y")).count(), 32);
}

#[test]
fn serve_answers_http() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_menger"))
        .args(["serve", "--addr", "127.0.0.1:0"])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut first = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut first).unwrap();
    let addr = first.trim().strip_prefix("listening on http://").unwrap().to_string();

    let body = r#"{"disks":3}"#;
    let mut stream = TcpStream::connect(&addr).unwrap();
    write!(
        stream,
        "POST /sessions HTTP/1.1\r\nHost: {addr}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    )
    .unwrap();
    let mut reply = String::new();
    stream.read_to_string(&mut reply).unwrap();
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(reply.starts_with("HTTP/1.1 201"), "{reply}");
    assert!(reply.contains("\"ALL_OFF\""));
}
