//! HTTP backend tests against a minimal in-process server.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::Arc;

use convbench_core::provider::http::{HttpProvider, HttpProviderConfig};
use convbench_core::provider::{ChatRequest, Gateway, Message, PricingModel, RetryPolicy};

/// Serve `responses` (status line + JSON body) one per request, then stop.
fn spawn_server(responses: Vec<(u16, String)>) -> (String, std::thread::JoinHandle<Vec<String>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = format!("http://{}", listener.local_addr().unwrap());
    let handle = std::thread::spawn(move || {
        let mut seen_bodies = Vec::new();
        for (status, body) in responses {
            let (mut stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut content_length = 0usize;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                let trimmed = line.trim();
                if let Some(rest) = trimmed.to_ascii_lowercase().strip_prefix("content-length:") {
                    content_length = rest.trim().parse().unwrap();
                }
                if trimmed.is_empty() {
                    break;
                }
            }
            let mut body_bytes = vec![0u8; content_length];
            reader.read_exact(&mut body_bytes).unwrap();
            seen_bodies.push(String::from_utf8(body_bytes).unwrap());

            let reason = match status {
                200 => "OK",
                401 => "Unauthorized",
                429 => "Too Many Requests",
                _ => "Error",
            };
            let response = format!(
                "HTTP/1.1 {status} {reason}\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                body.len()
            );
            stream.write_all(response.as_bytes()).unwrap();
        }
        seen_bodies
    });
    (addr, handle)
}

fn provider_for(endpoint: &str) -> HttpProvider {
    std::env::set_var("CONVBENCH_TEST_API_KEY", "sk-test");
    HttpProvider::new(HttpProviderConfig {
        endpoint: endpoint.to_string(),
        api_key_env: Some("CONVBENCH_TEST_API_KEY".into()),
        chat_path: "/v1/chat/completions".into(),
        embed_path: "/v1/embeddings".into(),
        embed_model: "embedder".into(),
        reply_path: "choices.0.message.content".into(),
        input_tokens_path: "usage.prompt_tokens".into(),
        output_tokens_path: "usage.completion_tokens".into(),
        embedding_path: "data.*.embedding".into(),
        timeout_secs: 5,
    })
    .unwrap()
}

fn chat_ok_body(text: &str) -> String {
    serde_json::json!({
        "choices": [{"message": {"role": "assistant", "content": text}}],
        "usage": {"prompt_tokens": 21, "completion_tokens": 7}
    })
    .to_string()
}

#[test]
fn rate_limit_then_success_retries_and_accounts_usage() {
    let (addr, handle) = spawn_server(vec![
        (429, r#"{"error":"slow down"}"#.to_string()),
        (200, chat_ok_body("hello from the wire")),
    ]);
    let provider = Arc::new(provider_for(&addr));
    let gateway = Gateway::new(
        provider.clone(),
        provider,
        PricingModel {
            input_miss_per_mtok: 1.0,
            input_hit_per_mtok: 0.5,
            output_per_mtok: 2.0,
        },
        2,
    )
    .with_retry(RetryPolicy::immediate(3));

    let req = ChatRequest::new("m", vec![Message::user("ping")]);
    let text = gateway.chat(&req).unwrap();
    assert_eq!(text, "hello from the wire");

    // Usage came from the provider, not the byte approximation:
    // 21 in-tokens * 1000 n$/tok + 7 out-tokens * 2000 n$/tok.
    assert_eq!(gateway.ledger().total_cost().0, 21 * 1000 + 7 * 2000);

    let bodies = handle.join().unwrap();
    assert_eq!(bodies.len(), 2, "one failed attempt plus one retry");
    let sent: serde_json::Value = serde_json::from_str(&bodies[1]).unwrap();
    assert_eq!(sent["model"], "m");
    assert_eq!(sent["messages"][0]["content"], "ping");
}

#[test]
fn auth_failure_is_fatal() {
    let (addr, handle) = spawn_server(vec![(401, r#"{"error":"bad key"}"#.to_string())]);
    let provider = Arc::new(provider_for(&addr));
    let gateway = Gateway::new(provider.clone(), provider, PricingModel::free(), 2)
        .with_retry(RetryPolicy::immediate(3));
    let err = gateway.chat(&ChatRequest::new("m", vec![Message::user("x")])).unwrap_err();
    assert_eq!(err.exit_code(), 3);
    assert!(err.to_string().contains("authentication"), "{err}");
    // Exactly one request: no retries on auth failures.
    assert_eq!(handle.join().unwrap().len(), 1);
}

#[test]
fn malformed_reply_carries_raw_payload() {
    let (addr, _handle) = spawn_server(vec![(200, r#"{"unexpected":"shape"}"#.to_string())]);
    let provider = Arc::new(provider_for(&addr));
    let gateway = Gateway::new(provider.clone(), provider, PricingModel::free(), 2)
        .with_retry(RetryPolicy::immediate(0));
    let err = gateway.chat(&ChatRequest::new("m", vec![Message::user("x")])).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("unexpected") && msg.contains("raw payload"), "{msg}");
}

#[test]
fn embeddings_parse_and_normalize() {
    let body = serde_json::json!({
        "data": [
            {"embedding": [3.0, 4.0]},
            {"embedding": [1.0, 0.0]}
        ]
    })
    .to_string();
    let (addr, _handle) = spawn_server(vec![(200, body)]);
    let provider = Arc::new(provider_for(&addr));
    let gateway = Gateway::new(provider.clone(), provider, PricingModel::free(), 2);
    let out = gateway.embed(&["a".into(), "b".into()]).unwrap();
    assert_eq!(out.len(), 2);
    assert!((out[0].values[0] - 0.6).abs() < 1e-6);
    assert!((out[0].values[1] - 0.8).abs() < 1e-6);
    assert!((out[0].norm - 5.0).abs() < 1e-6);
}

#[test]
fn missing_credential_env_is_auth_error() {
    std::env::remove_var("CONVBENCH_MISSING_KEY_VAR");
    let result = HttpProvider::new(HttpProviderConfig {
        endpoint: "http://127.0.0.1:1".into(),
        api_key_env: Some("CONVBENCH_MISSING_KEY_VAR".into()),
        chat_path: "/c".into(),
        embed_path: "/e".into(),
        embed_model: "m".into(),
        reply_path: "r".into(),
        input_tokens_path: "i".into(),
        output_tokens_path: "o".into(),
        embedding_path: "d.*.e".into(),
        timeout_secs: 1,
    });
    assert!(result.is_err());
}
