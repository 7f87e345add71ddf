use std::path::Path;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use clonaug_core::fixture::write_tone;
use clonaug_core::rating::{CombinationSpec, RatingStore, SessionDefinition};
use clonaug_server::{router, shared, SharedStore};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn setup(dir: &Path) -> SharedStore {
    let mut combos = Vec::new();
    for name in ["standard", "zero_sys"] {
        let d = dir.join("audio").join(name);
        std::fs::create_dir_all(&d).unwrap();
        for i in 0..6 {
            let len = if i == 5 { 8000 } else { 1600 };
            write_tone(&d.join(format!("00000{i}__from__00001{i}.wav")), 16_000, len, 300.0).unwrap();
        }
        combos.push(CombinationSpec {
            name: name.into(),
            dir: d,
        });
    }
    let mut store = RatingStore::open(&dir.join("sessions")).unwrap();
    store
        .create_session(&SessionDefinition {
            session_id: "exp".into(),
            combinations: combos,
            sample_size: 4,
            seed: 1,
            long_factor: 1.5,
        })
        .unwrap();
    shared(store)
}

async fn call(store: &SharedStore, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>, Option<String>) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = router(store.clone()).oneshot(req).await.unwrap();
    let status = resp.status();
    let ctype = resp
        .headers()
        .get("content-type")
        .map(|v| v.to_str().unwrap().to_string());
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, bytes, ctype)
}

async fn call_json(store: &SharedStore, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (s, b, _) = call(store, method, uri, body).await;
    (s, serde_json::from_slice(&b).unwrap())
}

#[tokio::test]
async fn session_listing_and_tasks() {
    let d = tempfile::tempdir().unwrap();
    let store = setup(d.path());
    let (s, v) = call_json(&store, "GET", "/api/sessions", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v[0]["session_id"], "exp");
    assert_eq!(v[0]["num_tasks"], 8);

    let (s, v) = call_json(&store, "GET", "/api/sessions/exp/tasks?rater=ana", None).await;
    assert_eq!(s, StatusCode::OK);
    let tasks = v.as_array().unwrap();
    assert_eq!(tasks.len(), 8);
    assert!(tasks.iter().all(|t| t["completed"] == false));
    assert_eq!(tasks[0]["audio_kind"], "generated");

    let (s, _) = call_json(&store, "GET", "/api/sessions/nope/tasks", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn audio_is_served_as_wav() {
    let d = tempfile::tempdir().unwrap();
    let store = setup(d.path());
    let (_, v) = call_json(&store, "GET", "/api/sessions/exp/tasks", None).await;
    let url = v[0]["audio_url"].as_str().unwrap().to_string();
    let (s, bytes, ctype) = call(&store, "GET", &url, None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(ctype.as_deref(), Some("audio/wav"));
    assert_eq!(&bytes[..4], b"RIFF");
    let (s, _, _) = call(&store, "GET", "/api/audio/standard.missing", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn rating_submission_statuses() {
    let d = tempfile::tempdir().unwrap();
    let store = setup(d.path());
    let (_, v) = call_json(&store, "GET", "/api/sessions/exp/tasks", None).await;
    let task = v[0]["task_id"].as_str().unwrap().to_string();
    let combo = v[0]["combination_name"].as_str().unwrap().to_string();

    let body = json!({"task_id": task, "rater_id": "ana", "category": "good"});
    let (s, rec) = call_json(&store, "POST", "/api/ratings", Some(body.clone())).await;
    assert_eq!(s, StatusCode::CREATED);
    assert!(rec["timestamp"].is_string());
    let (s, _) = call_json(&store, "POST", "/api/ratings", Some(body)).await;
    assert_eq!(s, StatusCode::CONFLICT);

    let (s, _) = call_json(
        &store,
        "POST",
        "/api/ratings",
        Some(json!({"task_id": "exp-9999", "rater_id": "ana", "category": "good"})),
    )
    .await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, e) = call_json(
        &store,
        "POST",
        "/api/ratings",
        Some(json!({"task_id": task, "rater_id": "bo", "category": "excellent"})),
    )
    .await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert!(e["error"].as_str().unwrap().contains("excellent"));
    let (s, _) = call_json(&store, "POST", "/api/ratings", Some(json!({"task_id": task}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);

    let (_, v) = call_json(&store, "GET", "/api/sessions/exp/tasks?rater=ana", None).await;
    assert_eq!(v[0]["completed"], true);
    assert_eq!(v[0]["category"], "good");

    let (s, scores) = call_json(&store, "GET", "/api/sessions/exp/scores", None).await;
    assert_eq!(s, StatusCode::OK);
    let row = scores
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["combination_name"] == combo.as_str())
        .unwrap();
    assert_eq!(row["score"], 3);
    assert_eq!(row["num_rated"], 1);
    assert_eq!(row["by_category"]["good"], 1);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_duplicates_yield_one_record() {
    let d = tempfile::tempdir().unwrap();
    let store = setup(d.path());
    let mut handles = Vec::new();
    for _ in 0..32 {
        let store = store.clone();
        handles.push(tokio::spawn(async move {
            call(
                &store,
                "POST",
                "/api/ratings",
                Some(json!({"task_id": "exp-0001", "rater_id": "ana", "category": "poor"})),
            )
            .await
            .0
        }));
    }
    let mut created = 0;
    for h in handles {
        match h.await.unwrap() {
            StatusCode::CREATED => created += 1,
            StatusCode::CONFLICT => {}
            other => panic!("{other}"),
        }
    }
    assert_eq!(created, 1);
    let log = std::fs::read_to_string(d.path().join("sessions/exp/ratings.jsonl")).unwrap();
    assert_eq!(log.lines().count(), 1);
}

#[tokio::test]
async fn scores_survive_restart() {
    let d = tempfile::tempdir().unwrap();
    let store = setup(d.path());
    for (i, cat) in ["poor", "reasonable", "good", "good"].iter().enumerate() {
        let (s, _) = call_json(
            &store,
            "POST",
            "/api/ratings",
            Some(json!({"task_id": format!("exp-{:04}", i + 1), "rater_id": "r", "category": cat})),
        )
        .await;
        assert_eq!(s, StatusCode::CREATED);
    }
    let (_, before) = call_json(&store, "GET", "/api/sessions/exp/scores", None).await;
    drop(store);
    let reopened = shared(RatingStore::open(&d.path().join("sessions")).unwrap());
    let (_, after) = call_json(&reopened, "GET", "/api/sessions/exp/scores", None).await;
    assert_eq!(before, after);
    assert_eq!(after[0]["score"], 9);
}
