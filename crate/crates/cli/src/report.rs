use serde_json::Value;

/// Result of one command, rendered as text lines or a JSON object.
pub struct Report {
    pub json: Value,
    pub lines: Vec<String>,
    /// False when a checked property does not hold.
    pub ok: bool,
}

impl Report {
    pub fn new(json: Value, lines: Vec<String>, ok: bool) -> Self {
        Report { json, lines, ok }
    }
}

pub fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}
