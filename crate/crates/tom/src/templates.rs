//! Text templates with `{{placeholder}}` tokens, one directory per locale.
//!
//! A template file holds named sections, each introduced by a `=== name ===`
//! line. `vocab.txt` is a flat `key = value` list (lines starting with `#`
//! are comments).

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Result, TomError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Locale {
    #[default]
    Zh,
    En,
}

impl Locale {
    pub const ALL: [Locale; 2] = [Locale::Zh, Locale::En];

    pub fn code(self) -> &'static str {
        match self {
            Locale::Zh => "zh",
            Locale::En => "en",
        }
    }
}

impl fmt::Display for Locale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Locale {
    type Err = TomError;

    fn from_str(s: &str) -> Result<Locale> {
        match s {
            "zh" => Ok(Locale::Zh),
            "en" => Ok(Locale::En),
            other => Err(TomError::InvalidInput(format!("unknown locale {other:?} (expected zh or en)"))),
        }
    }
}

pub const TEMPLATE_FILES: [&str; 7] = ["rules", "observation", "history", "plan", "belief", "second_order", "vocab"];

fn builtin_source(locale: Locale, file: &str) -> &'static str {
    match (locale, file) {
        (Locale::En, "rules") => include_str!("../templates/en/rules.txt"),
        (Locale::En, "observation") => include_str!("../templates/en/observation.txt"),
        (Locale::En, "history") => include_str!("../templates/en/history.txt"),
        (Locale::En, "plan") => include_str!("../templates/en/plan.txt"),
        (Locale::En, "belief") => include_str!("../templates/en/belief.txt"),
        (Locale::En, "second_order") => include_str!("../templates/en/second_order.txt"),
        (Locale::En, "vocab") => include_str!("../templates/en/vocab.txt"),
        (Locale::Zh, "rules") => include_str!("../templates/zh/rules.txt"),
        (Locale::Zh, "observation") => include_str!("../templates/zh/observation.txt"),
        (Locale::Zh, "history") => include_str!("../templates/zh/history.txt"),
        (Locale::Zh, "plan") => include_str!("../templates/zh/plan.txt"),
        (Locale::Zh, "belief") => include_str!("../templates/zh/belief.txt"),
        (Locale::Zh, "second_order") => include_str!("../templates/zh/second_order.txt"),
        (Locale::Zh, "vocab") => include_str!("../templates/zh/vocab.txt"),
        _ => unreachable!("unknown template file {file}"),
    }
}

fn parse_sections(file: &str, text: &str) -> Result<HashMap<String, String>> {
    let mut sections = HashMap::new();
    let mut current: Option<(String, Vec<&str>)> = None;
    let finish = |cur: Option<(String, Vec<&str>)>, sections: &mut HashMap<String, String>| {
        if let Some((name, lines)) = cur {
            let body = lines.join("\n");
            sections.insert(name, body.trim_end().to_string());
        }
    };
    for line in text.lines() {
        let header = line.trim().strip_prefix("===").and_then(|l| l.strip_suffix("===")).map(str::trim);
        match header {
            Some(name) if !name.is_empty() => {
                finish(current.take(), &mut sections);
                current = Some((name.to_string(), Vec::new()));
            }
            _ => match &mut current {
                Some((_, lines)) => lines.push(line),
                None if line.trim().is_empty() => {}
                None => return Err(TomError::Template(format!("{file}: text before the first section header"))),
            },
        }
    }
    finish(current, &mut sections);
    Ok(sections)
}

fn parse_vocab(text: &str) -> HashMap<String, String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

#[derive(Debug, Clone)]
struct LocaleTemplates {
    files: HashMap<String, HashMap<String, String>>,
    vocab: HashMap<String, String>,
}

impl LocaleTemplates {
    fn from_sources(source: impl Fn(&str) -> Result<String>) -> Result<LocaleTemplates> {
        let mut files = HashMap::new();
        let mut vocab = HashMap::new();
        for file in TEMPLATE_FILES {
            let text = source(file)?;
            if file == "vocab" {
                vocab = parse_vocab(&text);
            } else {
                files.insert(file.to_string(), parse_sections(file, &text)?);
            }
        }
        Ok(LocaleTemplates { files, vocab })
    }
}

/// Read-only after construction; safe to share across threads.
#[derive(Debug, Clone)]
pub struct TemplateStore {
    locales: HashMap<Locale, LocaleTemplates>,
}

impl TemplateStore {
    /// The templates compiled into the binary.
    pub fn builtin() -> TemplateStore {
        let mut locales = HashMap::new();
        for locale in Locale::ALL {
            let t = LocaleTemplates::from_sources(|f| Ok(builtin_source(locale, f).to_string()))
                .expect("builtin templates parse");
            locales.insert(locale, t);
        }
        TemplateStore { locales }
    }

    /// Loads `<dir>/<locale>/<file>.txt` for both locales.
    pub fn load(dir: &Path) -> Result<TemplateStore> {
        let mut locales = HashMap::new();
        for locale in Locale::ALL {
            let t = LocaleTemplates::from_sources(|f| {
                let path = dir.join(locale.code()).join(format!("{f}.txt"));
                std::fs::read_to_string(&path).map_err(|e| TomError::Io(format!("{}: {e}", path.display())))
            })?;
            locales.insert(locale, t);
        }
        Ok(TemplateStore { locales })
    }

    pub fn section(&self, locale: Locale, file: &str, section: &str) -> Result<&str> {
        self.locales[&locale]
            .files
            .get(file)
            .and_then(|s| s.get(section))
            .map(String::as_str)
            .ok_or_else(|| TomError::Template(format!("{locale}/{file}.txt has no section {section:?}")))
    }

    pub fn vocab(&self, locale: Locale, key: &str) -> Result<&str> {
        self.locales[&locale]
            .vocab
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| TomError::Template(format!("{locale}/vocab.txt has no entry {key:?}")))
    }

    /// Fills one section. Every placeholder in the section must be supplied.
    pub fn render(&self, locale: Locale, file: &str, section: &str, values: &[(&str, &str)]) -> Result<String> {
        let template = self.section(locale, file, section)?;
        fill(template, values).map_err(|name| {
            TomError::Template(format!("{locale}/{file}.txt [{section}] needs a value for {{{{{name}}}}}"))
        })
    }
}

impl Default for TemplateStore {
    fn default() -> Self {
        TemplateStore::builtin()
    }
}

/// Substitutes `{{name}}` tokens; returns the first unfilled name on error.
pub fn fill(template: &str, values: &[(&str, &str)]) -> std::result::Result<String, String> {
    let mut out = String::with_capacity(template.len() + 64);
    let mut rest = template;
    while let Some(start) = rest.find("{{") {
        out.push_str(&rest[..start]);
        let after = &rest[start + 2..];
        let Some(end) = after.find("}}") else {
            out.push_str(&rest[start..]);
            return Ok(out);
        };
        let name = after[..end].trim();
        match values.iter().find(|(k, _)| *k == name) {
            Some((_, v)) => out.push_str(v),
            None => return Err(name.to_string()),
        }
        rest = &after[end + 2..];
    }
    out.push_str(rest);
    Ok(out)
}
