//! Rendering of command results as JSON envelopes, CSV blocks or plain text.

use serde::{Deserialize, Serialize};

use crate::{Format, RunConfig};

pub const SCHEMA: &str = "pcn-lab/1";

/// Top-level JSON document written by every subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema: String,
    pub command: String,
    pub config: RunConfig,
    pub result: T,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub explain: Vec<String>,
}

/// Everything a command produced, pre-rendered in each format.
pub struct Outcome {
    pub json: String,
    pub csv: String,
    pub text: String,
    pub explain: Vec<String>,
    /// A checked condition or verification came out false.
    pub failed: bool,
}

impl Outcome {
    pub fn new<T: Serialize>(
        command: &str,
        config: &RunConfig,
        result: &T,
        explain: Vec<String>,
    ) -> Self {
        #[derive(Serialize)]
        struct Borrowed<'a, T> {
            schema: &'static str,
            command: &'a str,
            config: &'a RunConfig,
            result: &'a T,
            #[serde(skip_serializing_if = "<[String]>::is_empty")]
            explain: &'a [String],
        }
        let shown: &[String] = if config.explain { &explain } else { &[] };
        let mut json = serde_json::to_string_pretty(&Borrowed {
            schema: SCHEMA,
            command,
            config,
            result,
            explain: shown,
        })
        .expect("reports serialize");
        json.push('\n');
        Outcome {
            json,
            csv: String::new(),
            text: String::new(),
            explain,
            failed: false,
        }
    }

    /// Standard output and standard error for the chosen format.
    pub fn render(&self, format: Format, explain: bool) -> (String, String) {
        let lines = if explain {
            self.explain.as_slice()
        } else {
            &[]
        };
        match format {
            Format::Json => (self.json.clone(), String::new()),
            Format::Csv => {
                // keep the CSV itself machine-readable
                let err: String = lines.iter().map(|l| format!("{l}\n")).collect();
                (self.csv.clone(), err)
            }
            Format::Text => {
                let mut out = self.text.clone();
                if !lines.is_empty() {
                    out.push('\n');
                    for l in lines {
                        out.push_str("explain: ");
                        out.push_str(l);
                        out.push('\n');
                    }
                }
                (out, String::new())
            }
        }
    }
}

/// One CSV table with a header row.
pub fn csv_block<S: AsRef<str>>(header: &[&str], rows: impl IntoIterator<Item = Vec<S>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row.iter().map(|s| s.as_ref()))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// Several CSV tables, each preceded by a `# label` line, separated by blank lines.
pub fn csv_sections(sections: &[(&str, String)]) -> String {
    sections
        .iter()
        .map(|(label, body)| format!("# {label}\n{body}"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAIL"
    }
}
