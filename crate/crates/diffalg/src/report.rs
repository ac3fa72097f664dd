//! Deterministic report rendering.
//!
//! Every command assembles its report as a key–value tree
//! (`serde_json::Value`, whose object maps iterate in sorted key order, so
//! identical inputs always serialize identically). The tree is printed
//! either as indented text or as pretty JSON. Timing lives only in the
//! text footer: the structured output is the comparison format and must be
//! byte-identical across reruns.

use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

pub fn render(report: &Value, format: Format, elapsed_ms: Option<u128>) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serialization");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            render_text(report, 0, &mut out);
            if let Some(ms) = elapsed_ms {
                out.push_str(&format!("# timing: {} ms\n", ms));
            }
            out
        }
    }
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                if is_scalar(val) {
                    out.push_str(&format!(
                        "{:indent$}{}: {}\n",
                        "",
                        k,
                        scalar(val),
                        indent = indent
                    ));
                } else {
                    out.push_str(&format!("{:indent$}{}:\n", "", k, indent = indent));
                    render_text(val, indent + 2, out);
                }
            }
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str(&format!("{:indent$}(none)\n", "", indent = indent));
            }
            for item in items {
                if is_scalar(item) {
                    out.push_str(&format!(
                        "{:indent$}- {}\n",
                        "",
                        scalar(item),
                        indent = indent
                    ));
                } else {
                    out.push_str(&format!("{:indent$}-\n", "", indent = indent));
                    render_text(item, indent + 2, out);
                }
            }
        }
        scalar_value => {
            out.push_str(&format!(
                "{:indent$}{}\n",
                "",
                scalar(scalar_value),
                indent = indent
            ));
        }
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Object(_) | Value::Array(_))
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn text_layout() {
        let report = json!({
            "command": "demo",
            "inputs": {"poly": "y1 + z"},
            "verdict": "ok",
            "items": [1, {"a": 2}],
        });
        let text = render(&report, Format::Text, None);
        assert_eq!(
            text,
            "command: demo\ninputs:\n  poly: y1 + z\nitems:\n  - 1\n  -\n    a: 2\nverdict: ok\n"
        );
    }

    #[test]
    fn json_excludes_timing() {
        let report = json!({"a": 1});
        let a = render(&report, Format::Json, Some(5));
        let b = render(&report, Format::Json, Some(999));
        assert_eq!(a, b);
        assert!(!a.contains("timing"));
    }

    #[test]
    fn text_includes_timing_footer() {
        let report = json!({"a": 1});
        let text = render(&report, Format::Text, Some(7));
        assert!(text.ends_with("# timing: 7 ms\n"));
    }
}
