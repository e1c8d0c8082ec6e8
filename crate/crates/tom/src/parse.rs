use std::sync::LazyLock;

use regex::Regex;

static MARKED: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)(?:plan|index|方案|索引)\s*[:：#]?\s*(\d+)").expect("marker regex"));
static BARE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\d+").expect("integer regex"));

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParsedChoice {
    pub index: usize,
    /// Nothing usable was found and `index` is the default 0.
    pub fallback: bool,
}

/// Picks the action index a model reply settles on, among `n` presented
/// actions. The last in-range number after a selection marker wins; failing
/// that, the last in-range bare number; failing that, 0 with `fallback` set.
pub fn parse_action_choice(text: &str, n: usize) -> ParsedChoice {
    let in_range = |s: &str| s.parse::<usize>().ok().filter(|&i| i < n);
    let marked = MARKED.captures_iter(text).filter_map(|c| in_range(&c[1])).last();
    let found = marked.or_else(|| BARE.find_iter(text).filter_map(|m| in_range(m.as_str())).last());
    match found {
        Some(index) => ParsedChoice { index, fallback: false },
        None => ParsedChoice { index: 0, fallback: true },
    }
}
