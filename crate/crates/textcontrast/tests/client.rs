mod common;

use std::sync::atomic::Ordering;
use std::time::Duration;

use common::spawn_mock;
use textcontrast::archive::Prompt;
use textcontrast::client::{
    generate_corpus, BatchError, ClientError, CompletionClient, EndpointConfig, GenerationParams, RetryPolicy,
};

fn client(url: &str) -> CompletionClient {
    let mut config = EndpointConfig::new(url, "mock-model");
    config.retry.base_delay = Duration::from_millis(1);
    CompletionClient::new(config).unwrap()
}

fn prompts(texts: &[&str]) -> Vec<Prompt> {
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| Prompt {
            doc_id: format!("d{i}"),
            text: (*t).into(),
            short: false,
        })
        .collect()
}

#[tokio::test]
async fn echo_round_trip() {
    let (url, state) = spawn_mock().await;
    let g = client(&url)
        .generate("d0", "Harbor Reopens\nThe city harbor", &GenerationParams::default())
        .await
        .unwrap();
    assert_eq!(g.doc.completion, "Harbor Reopens\nThe city harbor");
    assert_eq!(g.doc.model_name, "mock-model");
    assert_eq!(g.attempts, 1);
    let body = &state.bodies.lock().unwrap()[0];
    assert_eq!(body["model"], "mock-model");
    assert_eq!(body["max_tokens"], 200);
}

#[tokio::test]
async fn rate_limits_are_retried() {
    let (url, state) = spawn_mock().await;
    let g = client(&url)
        .generate("d0", "rate:2 please", &GenerationParams::default())
        .await
        .unwrap();
    assert_eq!(g.attempts, 3);
    assert_eq!(state.calls.load(Ordering::SeqCst), 3);
}

#[tokio::test]
async fn retries_run_out() {
    let (url, _) = spawn_mock().await;
    let mut config = EndpointConfig::new(&url, "m");
    config.retry = RetryPolicy {
        max_attempts: 2,
        base_delay: Duration::from_millis(1),
        max_delay: Duration::from_millis(5),
    };
    let err = CompletionClient::new(config)
        .unwrap()
        .generate("d0", "rate:9 never", &GenerationParams::default())
        .await
        .unwrap_err();
    assert!(matches!(err, ClientError::Exhausted { attempts: 2, .. }), "{err}");
}

#[tokio::test]
async fn client_errors_are_fatal() {
    let (url, state) = spawn_mock().await;
    let c = client(&url);
    let err = c.generate("d0", "fail now", &GenerationParams::default()).await.unwrap_err();
    assert!(matches!(err, ClientError::Rejected { status: 400, .. }), "{err}");
    assert_eq!(state.calls.load(Ordering::SeqCst), 1);
    let err = c.generate("d1", "notext here", &GenerationParams::default()).await.unwrap_err();
    assert!(matches!(err, ClientError::MissingText(_)), "{err}");
    let err = c.generate("d2", "  ", &GenerationParams::default()).await.unwrap_err();
    assert!(matches!(err, ClientError::EmptyPrompt), "{err}");
}

#[tokio::test]
async fn unreachable_endpoint_is_transport_error() {
    let mut config = EndpointConfig::new("http://127.0.0.1:9/v1/completions", "m");
    config.retry.max_attempts = 1;
    let err = CompletionClient::new(config)
        .unwrap()
        .generate("d0", "hello", &GenerationParams::default())
        .await
        .unwrap_err();
    match err {
        ClientError::Exhausted { attempts: 1, last } => assert!(matches!(*last, ClientError::Transport(_))),
        other => panic!("unexpected {other}"),
    }
}

#[tokio::test]
async fn batch_keeps_order_and_records_failures() {
    let (url, _) = spawn_mock().await;
    let texts = [
        "delay:40 a", "delay:1 b", "delay:20 c", "fail d", "delay:5 e", "f", "rate:1 g", "delay:30 h", "i", "j",
    ];
    let out = generate_corpus(&client(&url), &prompts(&texts), &GenerationParams::default(), 4)
        .await
        .unwrap();
    assert_eq!(out.docs.len(), 9);
    assert_eq!(out.failures.len(), 1);
    assert_eq!((out.failures[0].doc_id.as_str(), out.failures[0].index), ("d3", 3));
    let expected: Vec<&str> = texts.iter().copied().filter(|t| !t.starts_with("fail")).collect();
    let got: Vec<&str> = out.docs.iter().map(|d| d.completion.as_str()).collect();
    assert_eq!(got, expected);
    assert_eq!(out.attempts, [1, 1, 1, 1, 1, 1, 2, 1, 1, 1]);
}

#[tokio::test]
async fn single_slot_is_sequential() {
    let (url, state) = spawn_mock().await;
    let texts: Vec<String> = (0..6).map(|i| format!("delay:10 p{i}")).collect();
    let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
    generate_corpus(&client(&url), &prompts(&refs), &GenerationParams::default(), 1)
        .await
        .unwrap();
    assert_eq!(state.max_in_flight.load(Ordering::SeqCst), 1);
}

#[tokio::test]
async fn batch_errors() {
    let (url, _) = spawn_mock().await;
    let c = client(&url);
    let params = GenerationParams::default();
    let p = prompts(&["fail 1", "fail 2"]);
    assert!(matches!(
        generate_corpus(&c, &p, &params, 2).await,
        Err(BatchError::AllFailed { count: 2, .. })
    ));
    assert!(matches!(generate_corpus(&c, &p, &params, 0).await, Err(BatchError::ZeroInFlight)));
    let bad = GenerationParams {
        top_p: 1.5,
        ..GenerationParams::default()
    };
    assert!(matches!(
        generate_corpus(&c, &p, &bad, 2).await,
        Err(BatchError::InvalidParams(_))
    ));
    assert!(generate_corpus(&c, &[], &params, 2).await.unwrap().docs.is_empty());
}
