//! Prompt templates.
//!
//! Templates are data, not code: each stage's prompt lives in its own text
//! file with `{name}` placeholders. A default set ships with the crate and
//! can be overridden at runtime by pointing the configuration at a
//! directory of replacement files, so prompt tuning never requires a
//! rebuild.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

macro_rules! builtin_templates {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../../prompts/", $name, ".txt")))),*]
    };
}

/// Template names bundled with the crate, one per prompted operation.
pub const TEMPLATE_NAMES: &[&str] = &[
    "concept_extraction",
    "heuristic_generation",
    "path_judgment",
    "followup_queries",
    "fallback_query",
    "final_answer",
    "judge_pairwise",
    "textualize_chunk",
    "textualize_retry",
    "entity_summary",
    "relation_describe",
    "merge_confirm",
    "type_relabel",
];

fn builtins() -> &'static [(&'static str, &'static str)] {
    builtin_templates!(
        "concept_extraction",
        "heuristic_generation",
        "path_judgment",
        "followup_queries",
        "fallback_query",
        "final_answer",
        "judge_pairwise",
        "textualize_chunk",
        "textualize_retry",
        "entity_summary",
        "relation_describe",
        "merge_confirm",
        "type_relabel",
    )
}

/// The loaded template set.
#[derive(Debug, Clone)]
pub struct PromptSet {
    templates: BTreeMap<String, String>,
}

impl PromptSet {
    /// The bundled defaults.
    pub fn builtin() -> Self {
        PromptSet {
            templates: builtins()
                .iter()
                .map(|(n, t)| (n.to_string(), t.to_string()))
                .collect(),
        }
    }

    /// Bundled defaults with any `<name>.txt` files found in `dir` layered
    /// on top.
    pub fn with_overrides(dir: impl AsRef<Path>) -> Result<Self> {
        let mut set = Self::builtin();
        let dir = dir.as_ref();
        if !dir.is_dir() {
            return Err(Error::Template {
                message: format!("prompt directory '{}' does not exist", dir.display()),
            });
        }
        for name in TEMPLATE_NAMES {
            let path = dir.join(format!("{name}.txt"));
            if path.is_file() {
                let text = std::fs::read_to_string(&path).map_err(|e| Error::Template {
                    message: format!("cannot read '{}': {e}", path.display()),
                })?;
                set.templates.insert(name.to_string(), text);
            }
        }
        Ok(set)
    }

    /// Renders a template, substituting every `{name}` placeholder. A
    /// placeholder with no matching variable is an error; unused variables
    /// are fine.
    pub fn render(&self, name: &str, vars: &[(&str, &str)]) -> Result<String> {
        let template = self.templates.get(name).ok_or_else(|| Error::Template {
            message: format!("unknown template '{name}'"),
        })?;
        render_template(template, vars).map_err(|message| Error::Template {
            message: format!("template '{name}': {message}"),
        })
    }
}

/// Substitutes `{identifier}` placeholders. Braces not followed by a known
/// identifier shape (lowercase/underscore) pass through untouched, so JSON
/// examples inside templates are safe.
fn render_template(template: &str, vars: &[(&str, &str)]) -> std::result::Result<String, String> {
    let mut out = String::with_capacity(template.len());
    let bytes = template.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'{' {
            if let Some(end) = template[i + 1..].find('}').map(|j| i + 1 + j) {
                let candidate = &template[i + 1..end];
                if !candidate.is_empty()
                    && candidate
                        .bytes()
                        .all(|b| b.is_ascii_lowercase() || b == b'_')
                {
                    match vars.iter().find(|(k, _)| *k == candidate) {
                        Some((_, v)) => {
                            out.push_str(v);
                            i = end + 1;
                            continue;
                        }
                        None => return Err(format!("unresolved placeholder '{{{candidate}}}'")),
                    }
                }
            }
        }
        let ch = template[i..].chars().next().expect("in bounds");
        out.push(ch);
        i += ch.len_utf8();
    }
    Ok(out)
}
