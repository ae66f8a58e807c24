//! Structured-response extraction.
//!
//! Responses carry their structured payload in a fenced block labeled
//! `result` containing a JSON object. Free-text preamble (and trailing
//! chatter) around the block is tolerated; when several blocks appear the
//! last labeled one wins, so a model that "thinks out loud" in earlier
//! fences still parses.

use serde::de::DeserializeOwned;

/// Extracts the payload of the last fenced `result` block. Falls back to
/// the last fenced block of any label, then to the whole text (covers
/// models that answer with bare JSON).
pub fn extract_block(raw: &str) -> Option<String> {
    let mut labeled: Option<String> = None;
    let mut any: Option<String> = None;
    let mut current: Option<(bool, Vec<&str>)> = None;

    for line in raw.lines() {
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix("```") {
            match current.take() {
                Some((is_result, body)) => {
                    let text = body.join("\n");
                    if is_result {
                        labeled = Some(text.clone());
                    }
                    any = Some(text);
                }
                None => {
                    let label = rest.trim();
                    current = Some((label.eq_ignore_ascii_case("result"), Vec::new()));
                }
            }
            continue;
        }
        if let Some((_, body)) = current.as_mut() {
            body.push(line);
        }
    }

    labeled.or(any).or_else(|| {
        let trimmed = raw.trim();
        trimmed.starts_with('{').then(|| trimmed.to_string())
    })
}

/// Parses the structured shape `T` out of a raw response. Returns a
/// human-readable message on failure (the caller attaches the raw text).
pub fn parse_structured<T: DeserializeOwned>(raw: &str) -> Result<T, String> {
    let block = extract_block(raw).ok_or_else(|| "no fenced result block found".to_string())?;
    serde_json::from_str(&block).map_err(|e| format!("malformed result block: {e}"))
}

/// Renders a structured value as the fenced block format the parser
/// expects. Mocks use this so canned responses exercise the same parse path
/// as live responses.
pub fn to_fenced_block(value: &serde_json::Value) -> String {
    format!(
        "```result\n{}\n```",
        serde_json::to_string_pretty(value).expect("json value serializes")
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::provider::response::PathJudgment;

    #[test]
    fn preamble_and_trailer_tolerated() {
        let raw = "Let me think about this.\n```result\n{\"verdict\": \"complete\"}\n```\nHope that helps!";
        let parsed: PathJudgment = parse_structured(raw).unwrap();
        assert_eq!(parsed.verdict.as_str(), "complete");
    }

    #[test]
    fn last_labeled_block_wins() {
        let raw = "```result\n{\"verdict\": \"irrelevant\"}\n```\nwait, actually:\n```result\n{\"verdict\": \"partial\"}\n```";
        let parsed: PathJudgment = parse_structured(raw).unwrap();
        assert_eq!(parsed.verdict.as_str(), "partial");
    }

    #[test]
    fn unlabeled_fence_accepted_as_fallback() {
        let raw = "```\n{\"verdict\": \"partial\"}\n```";
        let parsed: PathJudgment = parse_structured(raw).unwrap();
        assert_eq!(parsed.verdict.as_str(), "partial");
    }

    #[test]
    fn bare_json_accepted() {
        let parsed: PathJudgment = parse_structured("{\"verdict\": \"complete\"}").unwrap();
        assert_eq!(parsed.verdict.as_str(), "complete");
    }

    #[test]
    fn garbage_rejected_with_message() {
        let err = parse_structured::<PathJudgment>("no structure at all").unwrap_err();
        assert!(err.contains("no fenced result block"));
    }

    #[test]
    fn round_trip_through_fence() {
        let value = serde_json::json!({"verdict": "partial"});
        let parsed: PathJudgment = parse_structured(&to_fenced_block(&value)).unwrap();
        assert_eq!(parsed.verdict.as_str(), "partial");
    }
}
