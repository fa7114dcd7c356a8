#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use conceptmap_service::{router, serve_on, AppState, Config};
use serde_json::Value;
use tempfile::TempDir;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;

pub fn demo_corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data/demo/corpus.jsonl")
}

/// A service bound to an ephemeral port over a temporary store.
pub struct TestServer {
    pub base: String,
    pub client: reqwest::Client,
    pub state: Arc<AppState>,
    pub store: PathBuf,
    shutdown: Option<oneshot::Sender<()>>,
    handle: Option<JoinHandle<std::io::Result<()>>>,
    _dir: Option<TempDir>,
}

impl TestServer {
    pub async fn start() -> TestServer {
        let dir = tempfile::tempdir().unwrap();
        let config = Config {
            store: dir.path().join("store"),
            ..Config::default()
        };
        let mut server = TestServer::with_config(config).await;
        server._dir = Some(dir);
        server
    }

    pub async fn with_config(config: Config) -> TestServer {
        let store = config.store.clone();
        let state = AppState::open(config).unwrap();
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
        let base = format!("http://{}", listener.local_addr().unwrap());
        let (tx, rx) = oneshot::channel();
        let app = router(state.clone());
        let handle = tokio::spawn(serve_on(listener, app, async {
            let _ = rx.await;
        }));
        TestServer {
            base,
            client: reqwest::Client::new(),
            state,
            store,
            shutdown: Some(tx),
            handle: Some(handle),
            _dir: None,
        }
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{}", self.base, path)
    }

    pub async fn get(&self, path: &str) -> (u16, Value) {
        let resp = self.client.get(self.url(path)).send().await.unwrap();
        let status = resp.status().as_u16();
        (status, resp.json().await.unwrap())
    }

    pub async fn post_body(&self, path: &str, body: impl Into<reqwest::Body>) -> (u16, Value) {
        let resp = self
            .client
            .post(self.url(path))
            .header("content-type", "application/x-ndjson")
            .body(body)
            .send()
            .await
            .unwrap();
        let status = resp.status().as_u16();
        (status, resp.json().await.unwrap())
    }

    /// Uploads the demo corpus, runs the pipeline and waits for it.
    pub async fn run_demo(&self) -> Value {
        let (status, body) = self
            .post_body("/api/documents", std::fs::read(demo_corpus()).unwrap())
            .await;
        assert_eq!(status, 201, "{body}");
        self.run_staged().await
    }

    pub async fn run_staged(&self) -> Value {
        let (status, run) = self.post_body("/api/pipeline/run", "").await;
        assert_eq!(status, 202, "{run}");
        self.wait(run["run_id"].as_str().unwrap()).await
    }

    pub async fn wait(&self, run_id: &str) -> Value {
        for _ in 0..600 {
            let (status, run) = self.get(&format!("/api/runs/{run_id}")).await;
            assert_eq!(status, 200);
            if run["status"] != "RUNNING" && run["status"] != "PENDING" {
                return run;
            }
            tokio::time::sleep(Duration::from_millis(50)).await;
        }
        panic!("run {run_id} did not finish");
    }

    /// Signals shutdown and waits for the server task to finish.
    pub async fn stop(mut self) -> std::io::Result<()> {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        self.handle.take().unwrap().await.unwrap()
    }
}
