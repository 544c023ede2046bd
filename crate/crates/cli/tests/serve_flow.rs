use langrec_cli::serve::serve_on;
use langrec_core::protocol::{FixedClock, PoolConfig, StudyStore};
use langrec_core::synth::{generate_world, world_assembler, SynthConfig};
use reqwest::blocking::Client;
use reqwest::StatusCode;
use serde_json::{json, Value};
use std::sync::Arc;

const TEXT: &str = "Big, loud adventure films with practical effects and a sense of humour about themselves; \
                    I want heroes with flaws, villains with a point, and at least one chase I will remember later.";

fn start() -> String {
    let cfg = SynthConfig {
        seed: 8,
        n_items: 5100,
        n_train_users: 200,
        n_train_items: 200,
        n_reviewed_items: 300,
        ..Default::default()
    };
    let world = generate_world(&cfg);
    let asm = Arc::new(world_assembler(&world, PoolConfig::default()).unwrap());
    let store = Arc::new(StudyStore::new(asm, Arc::new(FixedClock::new(0, 1)), 5));
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Runtime::new().unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            serve_on(listener, store, std::future::pending()).await.unwrap();
        });
    });
    format!("http://{}", rx.recv().unwrap())
}

#[test]
fn full_study_flow_over_http() {
    let base = start();
    let c = Client::new();
    let post = |path: &str, body: Value| c.post(format!("{base}{path}")).json(&body).send().unwrap();

    assert_eq!(post("/sessions", json!({"rater_id": "w1"})).status(), StatusCode::CREATED);
    assert_eq!(post("/sessions", json!({"rater_id": "w1"})).status(), StatusCode::CONFLICT);
    assert_eq!(c.get(format!("{base}/sessions/nobody")).send().unwrap().status(), StatusCode::NOT_FOUND);

    let short = post("/sessions/w1/descriptions", json!({"polarity": "positive", "stage": "initial", "text": "too short"}));
    assert_eq!(short.status(), StatusCode::UNPROCESSABLE_ENTITY);
    let early = post("/sessions/w1/items", json!({"polarity": "positive", "items": []}));
    assert_eq!(early.status(), StatusCode::CONFLICT);

    for pol in ["positive", "negative"] {
        let r = post("/sessions/w1/descriptions", json!({"polarity": pol, "stage": "initial", "text": TEXT}));
        assert_eq!(r.status(), StatusCode::OK);
    }

    // pick ten titles through autocomplete
    let mut picks: Vec<String> = Vec::new();
    for letter in ['a', 'b', 'c', 'd', 'e', 'f', 'g', 'h', 'i', 'l', 'm', 'n', 'o', 'p', 's', 't'] {
        let hits: Vec<Value> = c
            .get(format!("{base}/autocomplete?prefix={letter}&limit=5"))
            .send()
            .unwrap()
            .json()
            .unwrap();
        assert!(hits.len() <= 5);
        for h in hits {
            let id = h["item_id"].as_str().unwrap().to_string();
            if !picks.contains(&id) && picks.len() < 10 {
                picks.push(id);
            }
        }
    }
    assert_eq!(picks.len(), 10);
    let dup = post("/sessions/w1/items", json!({"polarity": "positive", "items": vec![&picks[0]; 5]}));
    assert_eq!(dup.status(), StatusCode::UNPROCESSABLE_ENTITY);
    assert!(post("/sessions/w1/items", json!({"polarity": "positive", "items": &picks[..5]})).status().is_success());
    assert!(post("/sessions/w1/items", json!({"polarity": "negative", "items": &picks[5..]})).status().is_success());
    for pol in ["positive", "negative"] {
        let r = post("/sessions/w1/descriptions", json!({"polarity": pol, "stage": "final", "text": TEXT}));
        assert_eq!(r.status(), StatusCode::OK);
    }

    let pool_resp = post("/sessions/w1/pool", json!({}));
    assert_eq!(pool_resp.status(), StatusCode::OK);
    let raw = pool_resp.text().unwrap();
    for label in ["RandPop", "RandMidPop", "EASE", "BM25", "source"] {
        assert!(!raw.contains(label), "client payload leaks {label}");
    }
    let pool: Vec<Value> = serde_json::from_str(&raw).unwrap();
    assert_eq!(pool.len(), 40);
    let positions: Vec<u64> = pool.iter().map(|p| p["display_position"].as_u64().unwrap()).collect();
    assert_eq!(positions, (0..40).collect::<Vec<u64>>());
    let again: Value = c.get(format!("{base}/sessions/w1/pool")).send().unwrap().json().unwrap();
    assert_eq!(again, Value::Array(pool.clone()));

    let bad = post("/sessions/w1/ratings", json!({"item_id": pool[0]["item_id"], "seen": true, "score": 6}));
    assert_eq!(bad.status(), StatusCode::UNPROCESSABLE_ENTITY);
    let mut last = Value::Null;
    for (i, p) in pool.iter().enumerate() {
        let r = post("/sessions/w1/ratings", json!({"item_id": p["item_id"], "seen": i % 3 == 0, "score": (i % 5) + 1}));
        assert_eq!(r.status(), StatusCode::OK);
        last = r.json().unwrap();
    }
    assert_eq!(last, json!({"rated": 40, "total": 40, "complete": true}));

    let export: Value = c.get(format!("{base}/export")).send().unwrap().json().unwrap();
    assert_eq!(export["lines"].as_array().unwrap().len(), 1);
    let jsonl = c.get(format!("{base}/export/records.jsonl")).send().unwrap().text().unwrap();
    let line: langrec_core::protocol::RecordLine = serde_json::from_str(jsonl.trim_end()).unwrap();
    assert!(line.record.is_complete());
    line.profile.validate().unwrap();
    assert_eq!(line.profile.liked_items.iter().map(|i| i.as_str()).collect::<Vec<_>>(), &picks[..5]);
}
