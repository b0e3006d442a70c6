use std::path::PathBuf;
use std::process::{Command, Output};

use chainmeter::bounds::{
    max_throughput, propagation_limited_throughput, throughput_upper_bound, tx_latency,
};
use chainmeter::ingest::{load_distribution, load_sim_config};
use chainmeter::metrics::centralization_level;
use chainmeter::presets::Preset;
use chainmeter::simnet::run_simulation;
use tempfile::tempdir;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn chainmeter(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chainmeter"))
        .args(args)
        .env("CHAINMETER_NO_COLOR", "1")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Value printed after `key` on a `key value` line.
fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| {
            let mut parts = l.split_whitespace();
            (parts.next() == Some(key)).then(|| parts.next().unwrap().parse().unwrap())
        })
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
}

/// Columns after `key` on a table row.
fn row(text: &str, key: &str) -> Vec<f64> {
    text.lines()
        .find_map(|l| {
            let mut parts = l.split_whitespace();
            (parts.next() == Some(key)).then(|| parts.map(|p| p.parse().unwrap()).collect())
        })
        .unwrap_or_else(|| panic!("no {key} row in\n{text}"))
}

#[test]
fn bound_matches_library() {
    let out = chainmeter(&["bound", "--preset", "bitcoin"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let chain = Preset::Bitcoin.chain();
    let net = Preset::Bitcoin.net();
    assert_eq!(field(&text, "latency_s"), tx_latency(&chain));
    assert_eq!(field(&text, "ideal_tps"), max_throughput(&chain));
    assert_eq!(
        field(&text, "propagation_tps"),
        propagation_limited_throughput(&chain, &net)
    );
    assert_eq!(
        field(&text, "cap_tps"),
        throughput_upper_bound(&net, chain.tx_size_bytes)
    );
}

#[test]
fn bound_flags_override_preset() {
    let text = stdout(&chainmeter(&[
        "bound",
        "--preset",
        "bitcoin",
        "-b",
        "2",
        "--block-size-unit",
        "MiB",
        "-p",
        "300",
    ]));
    let chain = Preset::Bitcoin
        .chain()
        .with_block_size(2 << 20)
        .with_interval(300.0);
    assert_eq!(field(&text, "ideal_tps"), max_throughput(&chain));
    assert_eq!(field(&text, "latency_s"), 1800.0);
}

#[test]
fn bound_explicit_units() {
    let text = stdout(&chainmeter(&[
        "bound",
        "-b",
        "1048576",
        "-s",
        "513.86",
        "-p",
        "600",
        "-w",
        "5.7",
        "--bandwidth-unit",
        "Mbps",
        "-l",
        "0.1",
    ]));
    assert_eq!(field(&text, "bandwidth_Bps"), 712_500.0);
    assert_eq!(field(&text, "cap_tps"), 712_500.0 / 513.86);
}

#[test]
fn sweep_csv() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = chainmeter(&[
        "bound",
        "--preset",
        "bitcoin",
        "--sweep",
        "65536,1048576,8388608",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let tps: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(tps.len(), 3);
    assert!(tps.windows(2).all(|w| w[0] < w[1]));
    assert!(stdout(&out).contains("block_size_bytes,tps\n65536,"));
}

#[test]
fn bound_rejects_bad_params() {
    let out = chainmeter(&["bound", "-b", "0", "-s", "500", "-p", "600"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let out = chainmeter(&["bound", "-b", "1000", "-s", "500", "--interval=-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn metrics_matches_library() {
    let path = fixture("bitcoin_shaped.csv");
    let out = chainmeter(&["metrics", path.to_str().unwrap(), "--epsilon", "0.1,0.47"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let dist = load_distribution(&path).unwrap();
    for eps in [0.1, 0.47] {
        let level = centralization_level(&dist, eps).unwrap();
        let cols = row(&text, &eps.to_string());
        assert_eq!(cols, vec![level.n as f64, level.covered_share]);
    }
    assert_eq!(row(&text, "0.1")[0], 16.0);
}

#[test]
fn metrics_single_trust_and_curve() {
    let dir = tempdir().unwrap();
    let curve = dir.path().join("curve.csv");
    let path = fixture("ethereum_shaped.csv");
    let out = chainmeter(&[
        "metrics",
        path.to_str().unwrap(),
        "--epsilon",
        "0",
        "--consensus",
        "single",
        "--curve",
        curve.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("central_trust single  n=1 "));
    let text = std::fs::read_to_string(curve).unwrap();
    assert!(text.starts_with("rank,cumulative_fraction\n1,0.26\n"));
    assert_eq!(text.lines().count(), 112);
}

#[test]
fn missing_file_names_path() {
    let out = chainmeter(&["metrics", "/nonexistent/shares.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/shares.csv"));
}

#[test]
fn shard_example() {
    let out = chainmeter(&["shard", "--t", "15", "--n", "100", "--k", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(row(&text, "ctp"), vec![1500.0, 1500.0]);
    assert_eq!(row(&text, "throughput_tps"), vec![15.0, 60.0]);
    assert_eq!(row(&text, "centralization"), vec![100.0, 25.0]);

    let out = chainmeter(&["shard", "--t", "15", "--n", "100", "--k", "101"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lightning_modes() {
    let text = stdout(&chainmeter(&[
        "lightning",
        "--t",
        "7",
        "--complete",
        "5",
        "--direct",
    ]));
    assert_eq!(row(&text, "ctp")[1], 5.0 * 7.0);

    let text = stdout(&chainmeter(&[
        "lightning",
        "--t",
        "7",
        "--complete",
        "4",
        "--relay",
        "R",
    ]));
    assert_eq!(row(&text, "onchain_txs"), vec![12.0, 8.0]);
    assert_eq!(row(&text, "relay_n0"), vec![4.0, 1.0]);

    let graph = fixture("payments.csv");
    let plan = fixture("relay_plan.json");
    let out = chainmeter(&[
        "lightning",
        "--t",
        "7",
        "--graph",
        graph.to_str().unwrap(),
        "--plan",
        plan.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(row(&stdout(&out), "onchain_txs"), vec![6.0, 8.0]);
}

#[test]
fn lightning_invalid_plan() {
    let dir = tempdir().unwrap();
    let plan = dir.path().join("plan.json");
    std::fs::write(
        &plan,
        r#"{"routes": [{"from": "a", "to": "b", "via": ["nobody"]}]}"#,
    )
    .unwrap();
    let graph = fixture("payments.csv");
    let out = chainmeter(&[
        "lightning",
        "--t",
        "7",
        "--graph",
        graph.to_str().unwrap(),
        "--plan",
        plan.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn simulate_matches_library() {
    let path = fixture("sim_small.json");
    let out = chainmeter(&["simulate", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    let r = run_simulation(&load_sim_config(&path).unwrap()).unwrap();
    assert_eq!(field(&text, "observed_tps"), r.observed_tps);
    assert_eq!(field(&text, "stale_rate"), r.stale_rate);
    assert_eq!(
        field(&text, "mean_confirmation_latency_s"),
        r.mean_confirmation_latency_s
    );
    assert_eq!(field(&text, "canonical_blocks"), r.canonical_len() as f64);
    assert_eq!(
        row(&text, "alpha")[0],
        r.per_miner_canonical.weight_of("alpha").unwrap()
    );
}

#[test]
fn simulate_exit_codes() {
    let path = fixture("sim_small.json");
    let p = path.to_str().unwrap();
    assert_eq!(
        chainmeter(&["simulate", p, "--degree", "5"]).status.code(),
        Some(2)
    );
    assert_eq!(
        chainmeter(&["simulate", p, "--blocks", "0"]).status.code(),
        Some(2)
    );
    // a 1-regular graph on 4 nodes is never connected
    let out = chainmeter(&[
        "simulate", "--preset", "bitcoin", "--miners", "4", "--degree", "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
    assert_eq!(
        chainmeter(&["simulate", p, "--seeds", "4..2"])
            .status
            .code(),
        Some(1)
    );
    let out = chainmeter(&["simulate", p, "--seeds", "0..3", "--check-bound"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn bad_config_file() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, r#"{"miners": [], "chain": {}, "surprise": 1}"#).unwrap();
    let out = chainmeter(&["simulate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors() {
    assert_eq!(
        chainmeter(&["bound", "--frobnicate"]).status.code(),
        Some(1)
    );
    assert_eq!(chainmeter(&["nonsense"]).status.code(), Some(1));
    assert_eq!(chainmeter(&[]).status.code(), Some(1));
    assert_eq!(
        chainmeter(&[
            "lightning",
            "--t",
            "1",
            "--complete",
            "3",
            "--direct",
            "--relay",
            "R"
        ])
        .status
        .code(),
        Some(1)
    );
}

#[test]
fn help_lists_every_flag() {
    let expected: &[(&str, &[&str])] = &[
        ("metrics", &["--epsilon", "--consensus", "--curve"]),
        (
            "bound",
            &[
                "--preset",
                "--block-size",
                "--block-size-unit",
                "--tx-size",
                "--interval",
                "--confirmations",
                "--latency",
                "--bandwidth",
                "--bandwidth-unit",
                "--sweep",
                "--out",
            ],
        ),
        ("shard", &["--t", "--n", "--k", "--nodes", "--out"]),
        (
            "lightning",
            &[
                "--t",
                "--graph",
                "--complete",
                "--direct",
                "--relay",
                "--plan",
                "--alpha",
                "--out",
            ],
        ),
        (
            "simulate",
            &[
                "--preset",
                "--miners",
                "--blocks",
                "--seed",
                "--seeds",
                "--degree",
                "--sequential",
                "--out",
                "--check-bound",
            ],
        ),
    ];
    for (sub, flags) in expected {
        let out = chainmeter(&[sub, "--help"]);
        assert!(out.status.success());
        let text = stdout(&out);
        for flag in *flags {
            assert!(text.contains(flag), "{sub} --help is missing {flag}");
        }
    }
}

#[test]
fn seeds_range_is_ordered_and_stable() {
    let dir = tempdir().unwrap();
    let path = fixture("sim_small.json");
    let par = dir.path().join("par.json");
    let seq = dir.path().join("seq.json");
    let p = path.to_str().unwrap();
    assert!(chainmeter(&[
        "simulate",
        p,
        "--seeds",
        "0..=5",
        "--out",
        par.to_str().unwrap()
    ])
    .status
    .success());
    assert!(chainmeter(&[
        "simulate",
        p,
        "--seeds",
        "0..6",
        "--sequential",
        "--out",
        seq.to_str().unwrap(),
    ])
    .status
    .success());
    let a = std::fs::read(&par).unwrap();
    assert_eq!(a, std::fs::read(&seq).unwrap());
    let doc: serde_json::Value = serde_json::from_slice(&a).unwrap();
    let seeds: Vec<u64> = doc
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["seed"].as_u64().unwrap())
        .collect();
    assert_eq!(seeds, vec![0, 1, 2, 3, 4, 5]);
}
