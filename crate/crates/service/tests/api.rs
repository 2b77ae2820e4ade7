use std::collections::BTreeSet;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use menger_core::fixtures::ell;
use menger_core::graph::{base_vertex, neighbor, trace};
use menger_core::hanoi::{play, shortest_solution, state_to_vertex, vertex_to_state, HanoiState};
use menger_core::oracle::{geometric_project, oracle_build};
use menger_core::word::{format_word, parse_word, Letter, Word};
use menger_service::{router, Store};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tower::ServiceExt;

const OMEGA6: &str = "xYYxxXyxyXYyXyyyXyXYxYyxXYYYXy";

fn app() -> Router {
    router(Arc::new(Store::in_memory()))
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()))
    };
    (status, value)
}

async fn create(app: &Router, disks: usize) -> String {
    let (status, v) = call(app, Method::POST, "/sessions", Some(json!({ "disks": disks }))).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    v["id"].as_str().unwrap().to_string()
}

async fn play_word(app: &Router, id: &str, word: &str) -> Value {
    let mut last = Value::Null;
    for c in word.chars() {
        let (status, v) = call(
            app,
            Method::POST,
            &format!("/sessions/{id}/moves"),
            Some(json!({ "letter": c.to_string() })),
        )
        .await;
        assert_eq!(status, StatusCode::OK, "{v}");
        last = v;
    }
    last
}

fn state_of(v: &Value) -> HanoiState {
    serde_json::from_value(v["state"].clone()).unwrap()
}

async fn projection(app: &Router, id: &str, to: usize) -> String {
    let (status, v) = call(app, Method::GET, &format!("/sessions/{id}/projection?to={to}"), None).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    v["word"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn create_starts_at_base() {
    let app = app();
    let (status, v) = call(&app, Method::POST, "/sessions", Some(json!({ "disks": 3 }))).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(state_of(&v), vertex_to_state(&base_vertex(2)));
    assert_eq!(v["history"], "");
    assert_eq!(v["state"]["hand"], "ALL_OFF");
    assert_eq!(v["state"]["pegs"], json!([0, 0, 0]));

    let id = v["id"].as_str().unwrap();
    let (status, again) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(again, v);
}

#[tokio::test]
async fn disk_count_is_bounded() {
    let app = app();
    for disks in [0, 13] {
        let (status, v) = call(&app, Method::POST, "/sessions", Some(json!({ "disks": disks }))).await;
        assert_eq!(status, StatusCode::BAD_REQUEST);
        assert_eq!(v["code"], "OUT_OF_RANGE");
    }
    let (status, v) = call(&app, Method::POST, "/sessions", Some(json!({ "n": 3 }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["code"], "BAD_BODY");
}

#[tokio::test]
async fn sessions_get_distinct_ids() {
    let app = app();
    let a = create(&app, 3).await;
    let b = create(&app, 3).await;
    assert_ne!(a, b);
}

#[tokio::test]
async fn base_offers_the_vertex_star() {
    let app = app();
    let id = create(&app, 3).await;
    let (status, v) = call(&app, Method::GET, &format!("/sessions/{id}/moves"), None).await;
    assert_eq!(status, StatusCode::OK);
    let options = v["options"].as_array().unwrap();
    assert_eq!(options.len(), 4);
    let letters: BTreeSet<&str> = options.iter().map(|o| o["letter"].as_str().unwrap()).collect();
    assert_eq!(letters, BTreeSet::from(["x", "X", "y", "Y"]));
    let base = base_vertex(2);
    for o in options {
        let a = parse_word(o["letter"].as_str().unwrap()).unwrap().letters()[0];
        assert_eq!(state_of(o), vertex_to_state(&neighbor(&base, a)));
        assert_eq!(o["progress"], a.exp());
        assert_eq!(o["label"], a.base.to_string());
    }
}

#[tokio::test]
async fn leading_disk_follows_the_shortest_solution() {
    let app = app();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for disks in 2..=6usize {
        let solution = shortest_solution(disks - 1);
        let last = (1u64 << disks) - 1;
        let id = create(&app, disks).await;
        for _ in 0..60 {
            let (_, v) = call(&app, Method::GET, &format!("/sessions/{id}/moves"), None).await;
            let options = v["options"].as_array().unwrap().clone();
            let stage = u64::from_str_radix(v["state"]["stage"].as_str().unwrap(), 2).unwrap();
            for o in &options {
                let progress = o["progress"].as_i64().unwrap();
                let board = if progress > 0 { stage } else { (stage + last) % (last + 1) };
                let expected = (board < last).then(|| solution[board as usize].disk);
                let got = o["leading_disk"].as_u64().map(|d| d as usize);
                assert_eq!(got, expected, "disks {disks} board {board}");
                if board < last {
                    assert_eq!(o["picks_leading"].as_bool().unwrap(), progress > 0);
                }
            }
            let pick = &options[rng.gen_range(0..4)]["letter"];
            play_word(&app, &id, pick.as_str().unwrap()).await;
        }
    }
}

#[tokio::test]
async fn sample_play_and_undo() {
    let app = app();
    let id = create(&app, 3).await;
    let v = play_word(&app, &id, "xyxxxYxxyy").await;
    let word = parse_word("xyxxxYxxyy").unwrap();
    let end = trace(&base_vertex(2), &word).vertex;
    assert_eq!(state_to_vertex(&state_of(&v)).unwrap(), end);
    assert_eq!(v["history"], "xyxxxYxxyy");

    let (_, w) = call(&app, Method::GET, &format!("/sessions/{id}/word"), None).await;
    assert_eq!(w["word"], "xyxxxYxxyy");
    assert_eq!(w["length"], 10);

    let before = state_of(&v);
    play_word(&app, &id, "Y").await;
    let (status, u) = call(&app, Method::POST, &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(state_of(&u), before);
    assert_eq!(u["history"], "xyxxxYxxyy");
}

#[tokio::test]
async fn undo_on_empty_history_conflicts() {
    let app = app();
    let id = create(&app, 2).await;
    let (status, v) = call(&app, Method::POST, &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(v["code"], "NOTHING_TO_UNDO");
}

#[tokio::test]
async fn errors_name_the_problem() {
    let app = app();
    let id = create(&app, 3).await;
    let missing = uuid::Uuid::nil();
    for uri in [format!("/sessions/{missing}"), "/sessions/not-an-id/word".to_string()] {
        let (status, v) = call(&app, Method::GET, &uri, None).await;
        assert_eq!(status, StatusCode::NOT_FOUND);
        assert_eq!(v["code"], "UNKNOWN_SESSION");
    }
    for bad in ["z", "xy", "", "/x"] {
        let (status, v) = call(
            &app,
            Method::POST,
            &format!("/sessions/{id}/moves"),
            Some(json!({ "letter": bad })),
        )
        .await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{bad:?}");
        assert_eq!(v["code"], "BAD_LETTER");
    }
    for to in ["0", "4", "two"] {
        let (status, _) = call(&app, Method::GET, &format!("/sessions/{id}/projection?to={to}"), None).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "to={to}");
    }
    let (_, v) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(v["history"], "");
}

#[tokio::test]
async fn history_always_replays_to_the_state() {
    let app = app();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let id = create(&app, 5).await;
    let base = vertex_to_state(&base_vertex(4));
    for _ in 0..400 {
        let v = if rng.gen_bool(0.25) {
            call(&app, Method::POST, &format!("/sessions/{id}/undo"), None).await.1
        } else {
            let c = ["x", "X", "y", "Y"][rng.gen_range(0..4)];
            play_word(&app, &id, c).await
        };
        if v.get("code").is_some() {
            assert_eq!(v["code"], "NOTHING_TO_UNDO");
            continue;
        }
        let history = parse_word(v["history"].as_str().unwrap()).unwrap();
        assert_eq!(play(&base, &history).unwrap(), state_of(&v));
        let (_, w) = call(&app, Method::GET, &format!("/sessions/{id}/word"), None).await;
        assert_eq!(w["word"], v["history"]);
    }
}

#[tokio::test]
async fn projection_examples() {
    let app = app();

    let id = create(&app, 7).await;
    play_word(&app, &id, OMEGA6).await;
    assert_eq!(projection(&app, &id, 7).await, OMEGA6);
    assert_eq!(projection(&app, &id, 6).await, "yyYxXY");

    let id = create(&app, 3).await;
    play_word(&app, &id, &ell(2).unwrap().to_string()).await;
    assert_eq!(projection(&app, &id, 2).await, ell(1).unwrap().to_string());
    let (_, w) = call(&app, Method::GET, &format!("/sessions/{id}/word"), None).await;
    assert_eq!(w["is_loop"], true);
}

/// The observer who ignores the smallest disk sees the play pushed down by the bonding
/// map; the oracle reads that off the independently built graphs.
#[tokio::test]
async fn projection_matches_ignoring_the_smallest_disk() {
    let app = app();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let graphs: Vec<_> = (0..=4).map(|n| oracle_build(n).unwrap()).collect();
    let mut partial = 0;
    for round in 0..10_000usize {
        let disks = 3 + round % 3;
        let n = disks - 1;
        let len = rng.gen_range(0..=24);
        let letters: Vec<Letter> = (0..len).map(|_| Letter::ALL[rng.gen_range(0..4)]).collect();
        let word = Word::new(letters);
        let id = create(&app, disks).await;
        if !word.is_empty() {
            play_word(&app, &id, &format_word(&word)).await;
        }
        let got = projection(&app, &id, disks - 1).await;
        let expected = geometric_project(&graphs[n], &graphs[n - 1], &word).unwrap();
        assert_eq!(got, format_word(&expected), "{word} with {disks} disks");
        partial += expected.is_partial() as usize;
    }
    assert!(partial > 1000, "only {partial} plays ended mid-edge");
}

#[tokio::test]
async fn requests_to_one_session_are_serialized() {
    let store = Arc::new(Store::in_memory());
    let app = router(store.clone());
    let id = create(&app, 6).await;
    let mut handles = Vec::new();
    for i in 0..64 {
        let app = app.clone();
        let id = id.clone();
        handles.push(tokio::spawn(async move {
            let c = ["x", "y", "X", "Y"][i % 4];
            call(&app, Method::POST, &format!("/sessions/{id}/moves"), Some(json!({ "letter": c }))).await
        }));
    }
    for h in handles {
        assert_eq!(h.await.unwrap().0, StatusCode::OK);
    }
    let (_, v) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(v["moves_played"], 64);
    let history = parse_word(v["history"].as_str().unwrap()).unwrap();
    assert_eq!(play(&vertex_to_state(&base_vertex(5)), &history).unwrap(), state_of(&v));
    assert_eq!(store.len().await, 1);
}

#[tokio::test]
async fn snapshots_survive_a_restart() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(Arc::new(Store::with_snapshots(dir.path()).unwrap()));
    let id = create(&app, 4).await;
    let v = play_word(&app, &id, "xxyXY").await;
    call(&app, Method::POST, &format!("/sessions/{id}/undo"), None).await;

    let restarted = router(Arc::new(Store::with_snapshots(dir.path()).unwrap()));
    let (status, r) = call(&restarted, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(r["history"], "xxyX");
    assert_ne!(state_of(&r), state_of(&v));

    std::fs::write(dir.path().join("bad.json"), "{}").unwrap();
    assert!(Store::with_snapshots(dir.path()).is_err());
}
