#![allow(dead_code)]

use std::io::{Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use camlens::service::{router, AppState, ServiceConfig};
use camlens::store::CaptureStore;
use camlens::{load_model_files, Result};
use camlens_core::Model;
use http_body_util::BodyExt;
use tower::ServiceExt;

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn tiny_manifest() -> PathBuf {
    fixture_dir().join("tiny/manifest.json")
}

pub fn tiny_weights() -> PathBuf {
    fixture_dir().join("tiny/weights.camw")
}

pub fn tiny_png() -> Vec<u8> {
    std::fs::read(fixture_dir().join("tiny/image.png")).unwrap()
}

pub fn tiny_model() -> Model {
    load_model_files(&tiny_manifest(), &tiny_weights()).unwrap()
}

pub fn app(data_dir: &Path) -> Result<Router> {
    app_with(data_dir, ServiceConfig::default())
}

pub fn app_with(data_dir: &Path, config: ServiceConfig) -> Result<Router> {
    let state = AppState {
        model: Arc::new(tiny_model()),
        store: Arc::new(CaptureStore::open(data_dir)?),
    };
    Ok(router(state, config))
}

pub struct Reply {
    pub status: StatusCode,
    pub content_type: Option<String>,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> serde_json::Value {
        serde_json::from_slice(&self.body)
            .unwrap_or_else(|e| panic!("not JSON ({e}): {}", String::from_utf8_lossy(&self.body)))
    }
}

pub async fn call(app: &Router, method: Method, uri: &str, body: Vec<u8>) -> Reply {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/octet-stream")
        .body(Body::from(body))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let content_type = resp
        .headers()
        .get("content-type")
        .map(|v| v.to_str().unwrap().to_owned());
    let body = resp
        .into_body()
        .collect()
        .await
        .unwrap()
        .to_bytes()
        .to_vec();
    Reply {
        status,
        content_type,
        body,
    }
}

pub async fn get(app: &Router, uri: &str) -> Reply {
    call(app, Method::GET, uri, Vec::new()).await
}

pub async fn post_json(app: &Router, uri: &str, value: serde_json::Value) -> Reply {
    let req = Request::builder()
        .method(Method::POST)
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(serde_json::to_vec(&value).unwrap()))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let body = resp
        .into_body()
        .collect()
        .await
        .unwrap()
        .to_bytes()
        .to_vec();
    Reply {
        status,
        content_type: None,
        body,
    }
}

/// The numeric payload shared by CLI and service output.
pub fn numeric_payload(v: &serde_json::Value) -> String {
    serde_json::to_string(&serde_json::json!({
        "grid": v["grid"],
        "predictions": v["predictions"],
        "cams": v["cams"],
    }))
    .unwrap()
}

/// Minimal blocking HTTP/1.1 client for talking to a spawned server.
pub fn http(addr: &str, method: &str, path: &str, body: &[u8]) -> (u16, String) {
    let mut stream = TcpStream::connect(addr).unwrap();
    write!(
        stream,
        "{method} {path} HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\nContent-Length: {}\r\n\r\n",
        body.len()
    )
    .unwrap();
    stream.write_all(body).unwrap();
    let mut raw = Vec::new();
    stream.read_to_end(&mut raw).unwrap();
    let text = String::from_utf8_lossy(&raw).into_owned();
    let status = text[9..12].parse().unwrap();
    let body = text
        .split_once("\r\n\r\n")
        .map(|(_, b)| b.to_owned())
        .unwrap_or_default();
    (status, body)
}
