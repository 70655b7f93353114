use channelpx_core::barrier_pricer::channel_call;
use channelpx_core::channel_pricer::{call_price, call_price_asymptotic};
use channelpx_core::{BarrierMarket, ChannelParams};
use serde_json::Value;
use std::process::{Command, Output};

fn channelpx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_channelpx"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr carries a JSON error")
}

fn default_channel() -> ChannelParams {
    ChannelParams::new(100.0, 20.0, 1.0, 0.2).unwrap()
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(!text.contains('\r'), "LF line endings only");
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn temp_file(name: &str, contents: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("channelpx-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn price_defaults_match_library() {
    let out = channelpx(&["price"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let expected = call_price(100.0, 110.0, 1.0, &default_channel()).unwrap().price;
    assert_eq!(v["price"].as_f64().unwrap(), expected);
    assert_eq!(v["method"], "closed_form");
    assert_eq!(v["model"], "channel");
    assert_eq!(v["schema"], "channelpx.result.v1");
    assert_eq!(v["inputs"]["schema"], "channelpx.config.v1");
}

#[test]
fn price_fields_in_fixed_order() {
    let text = String::from_utf8(channelpx(&["price"]).stdout).unwrap();
    let at = |key: &str| text.find(&format!("\"{key}\"")).unwrap();
    let order = ["schema", "price", "method", "model", "inputs", "diagnostics"].map(at);
    assert!(order.windows(2).all(|w| w[0] < w[1]), "{text}");
}

#[test]
fn barrier_call_at_upper_settles() {
    let out = channelpx(&["price", "--model", "barrier", "--spot", "120", "--kind", "call"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["price"].as_f64().unwrap(), 120.0 - 100.0);
    assert_eq!(v["diagnostics"]["settled"], true);
}

#[test]
fn strike_at_upper_boundary_is_flagged() {
    let v = json(&channelpx(&["price", "--strike", "120"]));
    assert_eq!(v["price"].as_f64().unwrap(), 0.0);
    assert_eq!(v["diagnostics"]["strike_at_boundary"], true);
}

#[test]
fn domain_error_exits_2_with_json() {
    let out = channelpx(&["price", "--spot", "130"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let e = stderr_json(&out);
    assert_eq!(e["error"]["kind"], "price_outside_channel");
    assert_eq!(e["error"]["exit_code"], 2);

    let out = channelpx(&["price", "--model", "barrier", "--strike", "125"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["kind"], "invalid_strike");
}

#[test]
fn parse_errors_exit_1() {
    for args in [
        &["price", "--bogus"][..],
        &["price", "--spot", "abc"],
        &["verify", "no_such_suite"],
        &["price", "--nu", "2", "--model", "barrier"],
        &["price", "--engine", "pde"],
        &["verify", "oracle_barrier"],
        &["price", "--config", "/nonexistent/channelpx.json"],
    ] {
        let out = channelpx(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert_eq!(stderr_json(&out)["error"]["kind"], "parse", "{args:?}");
    }
    let bad = temp_file("bad.json", r#"{"spot": "high"}"#);
    let out = channelpx(&["price", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_0() {
    let out = channelpx(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("verify"));
}

#[test]
fn flags_override_config_file() {
    let cfg = temp_file(
        "override.json",
        r#"{"schema": "channelpx.config.v1", "spot": 90, "strike": 95, "channel": {"nu": 2.0}}"#,
    );
    let v = json(&channelpx(&["price", "--config", cfg.to_str().unwrap(), "--spot", "105"]));
    assert_eq!(v["inputs"]["spot"].as_f64().unwrap(), 105.0);
    assert_eq!(v["inputs"]["strike"].as_f64().unwrap(), 95.0);
    assert_eq!(v["inputs"]["channel"]["nu"].as_f64().unwrap(), 2.0);
    let p = default_channel();
    let p = ChannelParams { nu: 2.0, ..p };
    assert_eq!(v["price"].as_f64().unwrap(), call_price(105.0, 95.0, 1.0, &p).unwrap().price);
}

#[test]
fn valuation_and_maturity_reduce_to_tau() {
    let v = json(&channelpx(&["price", "--valuation-time", "0.5", "--maturity", "2.0"]));
    assert_eq!(v["inputs"]["tau"].as_f64().unwrap(), 1.5);
    let direct = json(&channelpx(&["price", "--tau", "1.5"]));
    assert_eq!(v["price"], direct["price"]);
}

#[test]
fn resolved_inputs_rerun_identically() {
    for args in [
        &["price"][..],
        &["price", "--model", "barrier", "--claim", "dko_put", "--engine", "monte_carlo", "--paths", "5000"],
        &["price", "--engine", "quadrature", "--kind", "put", "--strike", "95"],
    ] {
        let first = channelpx(args);
        let inputs = json(&first)["inputs"].to_string();
        let cfg = temp_file("resolved.json", &inputs);
        let second = channelpx(&["price", "--config", cfg.to_str().unwrap()]);
        assert_eq!(first.stdout, second.stdout, "{args:?}");
    }
}

#[test]
fn monte_carlo_output_is_byte_identical() {
    let args = ["price", "--engine", "monte_carlo", "--paths", "20000", "--seed", "7"];
    let a = channelpx(&args);
    let b = channelpx(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["method"], "monte_carlo");
    assert_eq!(v["diagnostics"]["paths"], 20000);
    assert!(v["diagnostics"]["std_error"].as_f64().unwrap() > 0.0);
}

#[test]
fn pde_engine_matches_series() {
    let series = json(&channelpx(&["price", "--model", "barrier"]));
    let pde = json(&channelpx(&["price", "--model", "barrier", "--engine", "pde"]));
    assert_eq!(pde["method"], "finite_difference");
    let gap = (series["price"].as_f64().unwrap() - pde["price"].as_f64().unwrap()).abs();
    assert!(gap < 1e-4, "{gap}");
}

#[test]
fn tau_sweep_saturates() {
    let p = default_channel();
    let horizon = 400.0 / (p.sigma * p.nu).powi(2);
    let to = horizon.to_string();
    let out = channelpx(&["curve", "--sweep", "tau", "--from", "1", "--to", &to, "--points", "9"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    assert_eq!(rows[0], ["sweep_var", "price", "method"]);
    assert_eq!(rows.len(), 10);
    let last = rows.last().unwrap();
    assert_eq!(last[0].parse::<f64>().unwrap(), horizon);
    let limit = call_price_asymptotic(100.0, 110.0, &p).unwrap();
    assert!((last[1].parse::<f64>().unwrap() - limit).abs() < 1e-4);
}

#[test]
fn barrier_spot_sweep_ends_at_settlements() {
    let rows = csv_rows(&channelpx(&["curve", "--model", "barrier", "--sweep", "spot", "--points", "11"]));
    assert_eq!(rows.len(), 12);
    assert_eq!(rows[1][0].parse::<f64>().unwrap(), 80.0);
    assert_eq!(rows[1][1].parse::<f64>().unwrap(), 0.0);
    assert_eq!(rows[11][0].parse::<f64>().unwrap(), 120.0);
    assert_eq!(rows[11][1].parse::<f64>().unwrap(), 20.0);
    let mkt = BarrierMarket::new(100.0, 0.25, 0.02, 0.02, 80.0, 120.0).unwrap();
    let mid = channel_call(&mkt, 100.0, 0.5).unwrap().price;
    assert_eq!(rows[6][1].parse::<f64>().unwrap(), mid);
}

#[test]
fn one_point_sweep_equals_price() {
    let price = json(&channelpx(&["price", "--spot", "104"]));
    let curve = json(&channelpx(&[
        "curve", "--sweep", "spot", "--from", "104", "--to", "104", "--points", "1", "--format", "json",
    ]));
    assert_eq!(curve["points"][0]["price"], price["price"]);
    assert_eq!(curve["points"][0]["method"], price["method"]);
}

#[test]
fn verify_parity_passes() {
    let out = channelpx(&["verify", "parity"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    for c in v["checks"].as_array().unwrap() {
        assert!(c["measured"].as_f64().unwrap() < 1e-10, "{c}");
    }
}

#[test]
fn verify_barrier_parity_is_informational() {
    let out = channelpx(&["verify", "parity", "--model", "barrier"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let gap = &v["checks"][0];
    assert_eq!(gap["tolerance"], Value::Null);
    assert!(gap["value"].as_f64().unwrap().abs() > 1e-3);
}

#[test]
fn verify_arbitrage_demo() {
    let out = channelpx(&["verify", "arbitrage_demo"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "ARBITRAGE");
    let profit = v["checks"][0]["value"].as_f64().unwrap();
    assert!((profit - 0.959_989_998_333_125).abs() < 1e-12);
}

#[test]
fn verify_density_on_defaults() {
    let out = channelpx(&["verify", "density"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["passed"], true);
}

#[test]
fn verify_oracles_on_defaults() {
    for args in [&["verify", "oracle_channel"][..], &["verify", "oracle_barrier", "--model", "barrier"], &["verify", "martingale"]] {
        let out = channelpx(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn failed_check_exits_3() {
    // A single path has no spread, so any gap to the spot fails.
    let out = channelpx(&["verify", "martingale", "--paths", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn outputs_follow_shipped_schema() {
    let schema: Value =
        serde_json::from_str(include_str!("../schemas/result.v1.schema.json")).unwrap();
    let config: Value =
        serde_json::from_str(include_str!("../schemas/config.v1.schema.json")).unwrap();
    let config_keys = config["properties"].as_object().unwrap();
    let documents = [
        ("price", json(&channelpx(&["price", "--model", "barrier", "--engine", "monte_carlo", "--paths", "2000"]))),
        ("curve", json(&channelpx(&["curve", "--points", "3", "--format", "json"]))),
        ("report", json(&channelpx(&["verify", "arbitrage_demo"]))),
    ];
    for (def, doc) in documents {
        let spec = &schema["$defs"][def];
        let props = spec["properties"].as_object().unwrap();
        for key in doc.as_object().unwrap().keys() {
            assert!(props.contains_key(key), "{def}: unexpected {key}");
        }
        for key in spec["required"].as_array().unwrap() {
            assert!(doc.get(key.as_str().unwrap()).is_some(), "{def}: missing {key}");
        }
        for key in doc["inputs"].as_object().unwrap().keys() {
            assert!(config_keys.contains_key(key), "inputs: unexpected {key}");
        }
    }
    let err = stderr_json(&channelpx(&["price", "--spot", "0"]));
    let props = schema["$defs"]["error"]["properties"]["error"]["properties"].as_object().unwrap();
    for key in err["error"].as_object().unwrap().keys() {
        assert!(props.contains_key(key));
    }
}
