//! Execution against a live server through its HTTP query API
//! (`POST {CYPHER_URI}/db/{database}/query/v2`, basic auth).
//!
//! Settings come from `CYPHER_URI`, `CYPHER_USER`, `CYPHER_PASSWORD` and,
//! optionally, `CYPHER_DATABASE` (default `neo4j`). `neo4j+s://` and
//! `bolt+s://` URIs are rewritten to `https://`; the plain forms become
//! `http://`.
//!
//! Every run deletes `:Machine` and `:State` nodes before and after, so it
//! can be repeated against the same database.

use anyhow::anyhow;
use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine as _;
use serde_json::{json, Value as Json};

use cm2cypher::codegen::{gen_qpp_query, gen_qpp_setup, gen_transactions_script, ProgramMode, UNBOUNDED};
use cm2cypher::machine::{run, Program, RunOptions};

use crate::{Failure, LiveApproach};

const CLEANUP: [&str; 2] = ["MATCH (m:Machine) DETACH DELETE m", "MATCH (s:State) DETACH DELETE s"];

pub struct Settings {
    pub endpoint: String,
    pub user: String,
    pub password: String,
}

impl Settings {
    /// The error names the first missing variable.
    pub fn from_env() -> Result<Settings, String> {
        let var = |name: &str| std::env::var(name).map_err(|_| name.to_string());
        let uri = var("CYPHER_URI")?;
        let user = var("CYPHER_USER")?;
        let password = var("CYPHER_PASSWORD")?;
        let database = std::env::var("CYPHER_DATABASE").unwrap_or_else(|_| "neo4j".into());
        Ok(Settings { endpoint: format!("{}/db/{database}/query/v2", http_base(&uri)), user, password })
    }
}

fn http_base(uri: &str) -> String {
    let uri = uri.trim_end_matches('/');
    for (scheme, replacement) in [
        ("neo4j+s://", "https://"),
        ("neo4j+ssc://", "https://"),
        ("bolt+s://", "https://"),
        ("bolt+ssc://", "https://"),
        ("neo4j://", "http://"),
        ("bolt://", "http://"),
    ] {
        if let Some(rest) = uri.strip_prefix(scheme) {
            return format!("{replacement}{rest}");
        }
    }
    uri.to_string()
}

/// Query text as the API wants it: no trailing `;`.
fn statement(text: &str) -> String {
    text.trim_end().trim_end_matches(';').to_string()
}

struct Client {
    settings: Settings,
    agent: ureq::Agent,
}

impl Client {
    /// Runs one statement and returns `data.values`.
    fn query(&self, text: &str, parameters: Option<&Json>) -> Result<Vec<Vec<Json>>, Failure> {
        let body = json!({
            "statement": statement(text),
            "parameters": parameters.cloned().unwrap_or_else(|| json!({})),
        });
        let response = self
            .agent
            .post(&self.settings.endpoint)
            .set("Accept", "application/json")
            .set("Authorization", &basic_auth(&self.settings.user, &self.settings.password))
            .send_json(body);
        let doc: Json = match response {
            Ok(r) => r.into_json().map_err(|e| Failure::new(3, anyhow!("unreadable response: {e}")))?,
            Err(ureq::Error::Status(code @ (401 | 403), _)) => {
                return Err(Failure::new(3, anyhow!("server refused credentials (HTTP {code})")))
            }
            Err(ureq::Error::Status(code, r)) => {
                let detail = r.into_string().unwrap_or_default();
                return Err(Failure::new(4, anyhow!("query rejected (HTTP {code}): {detail}")));
            }
            Err(e) => return Err(Failure::new(3, anyhow!("cannot reach {}: {e}", self.settings.endpoint))),
        };
        if let Some(errors) = doc.get("errors").and_then(Json::as_array).filter(|e| !e.is_empty()) {
            return Err(Failure::new(4, anyhow!("query failed: {}", Json::Array(errors.clone()))));
        }
        let values = doc.pointer("/data/values").and_then(Json::as_array).cloned().unwrap_or_default();
        Ok(values.into_iter().map(|row| row.as_array().cloned().unwrap_or_default()).collect())
    }

    fn cleanup(&self) -> Result<(), Failure> {
        for q in CLEANUP {
            self.query(q, None)?;
        }
        Ok(())
    }
}

fn basic_auth(user: &str, password: &str) -> String {
    format!("Basic {}", BASE64.encode(format!("{user}:{password}")))
}

pub fn cmd_live(program: &Program, approach: LiveApproach, fuel: u64) -> Result<u8, Failure> {
    let settings = Settings::from_env().map_err(|name| {
        Failure::new(1, anyhow!("{name} is not set; live checks need CYPHER_URI, CYPHER_USER and CYPHER_PASSWORD"))
    })?;
    let reference = run(program, fuel, RunOptions::default()).map_err(|e| Failure::new(1, e))?;
    if !reference.halted {
        println!("fuel exhausted after {} steps; nothing to compare", reference.machine_steps);
        return Ok(2);
    }
    let expected = reference.final_config;
    let client = Client { settings, agent: ureq::AgentBuilder::new().build() };

    client.cleanup()?;
    let outcome = match approach {
        LiveApproach::Tx => live_tx(&client, program),
        LiveApproach::Qpp => live_qpp(&client, program),
    };
    client.cleanup()?;
    let (got, want) = match outcome? {
        Observed::Machine { state, a, b } => (
            format!("m.state={state}, m.A={a}, m.B={b}"),
            format!("m.state={}, m.A={}, m.B={}", expected.state, expected.a, expected.b),
        ),
        Observed::Path { steps, a, b } => (
            format!("steps={steps}, ctrA={a}, ctrB={b}"),
            format!("steps={}, ctrA={}, ctrB={}", reference.machine_steps - 1, expected.a, expected.b),
        ),
    };
    if got == want {
        println!("match: {got}");
        Ok(0)
    } else {
        println!("mismatch: server {got}, interpreter {want}");
        Ok(4)
    }
}

enum Observed {
    Machine { state: i64, a: i64, b: i64 },
    Path { steps: i64, a: i64, b: i64 },
}

fn int(v: Option<&Json>, what: &str) -> Result<i64, Failure> {
    v.and_then(Json::as_i64).ok_or_else(|| Failure::new(4, anyhow!("server result has no integer {what}")))
}

fn live_tx(client: &Client, program: &Program) -> Result<Observed, Failure> {
    let bundle = gen_transactions_script(program, ProgramMode::Inline);
    for label in ["setup", "main"] {
        client.query(&bundle.get(label).expect("generated").text, bundle.parameters.as_ref())?;
    }
    let rows = client.query(&bundle.get("read").expect("generated").text, None)?;
    let [row] = rows.as_slice() else {
        return Err(Failure::new(4, anyhow!("expected one :Machine node, found {}", rows.len())));
    };
    let props = row
        .first()
        .and_then(|n| n.get("properties"))
        .ok_or_else(|| Failure::new(4, anyhow!("readback returned no node properties")))?;
    Ok(Observed::Machine {
        state: int(props.get("state"), "state")?,
        a: int(props.get("A"), "A")?,
        b: int(props.get("B"), "B")?,
    })
}

fn live_qpp(client: &Client, program: &Program) -> Result<Observed, Failure> {
    client.query(&gen_qpp_setup(program).text, None)?;
    let rows = client.query(&gen_qpp_query(UNBOUNDED).text, None)?;
    let Some(row) = rows.first() else {
        return Err(Failure::new(4, anyhow!("path query returned no rows")));
    };
    if rows.len() > 1 {
        return Err(Failure::new(4, anyhow!("path query returned {} rows, expected one", rows.len())));
    }
    Ok(Observed::Path { steps: int(row.first(), "steps")?, a: int(row.get(1), "ctrA")?, b: int(row.get(2), "ctrB")? })
}
