//! Deterministic game-state and history text in either locale.

use guandan::engine::HistoryEvent;
use guandan::{Action, Card, Combo, Face, Level, Observation, Seat};

use crate::error::{Result, TomError};
use crate::templates::{fill, Locale, TemplateStore};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedObservation {
    pub text: String,
    pub locale: Locale,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedHistory {
    pub text: String,
    pub locale: Locale,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleText {
    pub text: String,
    pub locale: Locale,
}

/// Where `seat` sits relative to `observer`, as a vocab key.
pub fn role_key(observer: Seat, seat: Seat) -> &'static str {
    match (seat + 4 - observer) % 4 {
        0 => "role.self",
        1 => "role.next_opponent",
        2 => "role.teammate",
        _ => "role.previous_opponent",
    }
}

pub fn card_name(store: &TemplateStore, locale: Locale, card: Card) -> Result<String> {
    match card.suit() {
        Some(suit) => Ok(format!("{} {}", store.vocab(locale, &format!("suit.{}", suit.letter()))?, card.rank())),
        None => Ok(store.vocab(locale, &format!("rank.{}", card.rank()))?.to_string()),
    }
}

pub fn face_name(store: &TemplateStore, locale: Locale, face: Face) -> Result<String> {
    Ok(format!("{} {}", store.vocab(locale, &format!("suit.{}", face.suit.letter()))?, face.rank))
}

/// `['Diamond 2', 'Club A']`
pub fn card_list(store: &TemplateStore, locale: Locale, cards: &[Card]) -> Result<String> {
    let names =
        cards.iter().map(|&c| card_name(store, locale, c).map(|n| format!("'{n}'"))).collect::<Result<Vec<_>>>()?;
    Ok(format!("[{}]", names.join(", ")))
}

fn combo_card_names(store: &TemplateStore, locale: Locale, combo: &Combo) -> Result<Vec<String>> {
    combo
        .cards()
        .iter()
        .map(|&c| {
            let name = card_name(store, locale, c)?;
            match combo.wild().get(&c) {
                Some(&face) => {
                    let face = face_name(store, locale, face)?;
                    fill(store.vocab(locale, "wild_as")?, &[("card", &name), ("face", &face)])
                        .map_err(|n| TomError::Template(format!("vocab wild_as needs {{{{{n}}}}}")))
                }
                None => Ok(name),
            }
        })
        .collect()
}

/// A played combo as a quoted list, wildcards annotated with their face.
pub fn combo_list(store: &TemplateStore, locale: Locale, combo: &Combo) -> Result<String> {
    let names = combo_card_names(store, locale, combo)?;
    Ok(format!("[{}]", names.iter().map(|n| format!("'{n}'")).collect::<Vec<_>>().join(", ")))
}

/// A combo as a bare comma-separated list: `Club A, Club A`.
pub fn combo_plain(store: &TemplateStore, locale: Locale, combo: &Combo) -> Result<String> {
    Ok(combo_card_names(store, locale, combo)?.join(", "))
}

pub fn kind_name<'a>(store: &'a TemplateStore, locale: Locale, combo: &Combo) -> Result<&'a str> {
    store.vocab(locale, &format!("kind.{}", combo.kind().name()))
}

pub fn level_card(store: &TemplateStore, locale: Locale, level: Level) -> Result<String> {
    face_name(store, locale, level.wildcard_face())
}

pub fn render_observation(store: &TemplateStore, obs: &Observation, locale: Locale) -> Result<RenderedObservation> {
    let lead_status = store.render(locale, "observation", if obs.has_lead() { "lead" } else { "no_lead" }, &[])?;
    let last_play = match &obs.last_play {
        Some((seat, combo)) => {
            let role = store.vocab(locale, role_key(obs.seat, *seat))?;
            store.render(
                locale,
                "observation",
                "last_play",
                &[
                    ("role", role),
                    ("seat", &seat.to_string()),
                    ("kind", kind_name(store, locale, combo)?),
                    ("cards", &combo_list(store, locale, combo)?),
                    ("count", &obs.hand_counts[*seat].to_string()),
                ],
            )?
        }
        None => store.render(locale, "observation", "no_last_play", &[])?,
    };
    let text = store.render(
        locale,
        "observation",
        "main",
        &[
            ("hand", &card_list(store, locale, &obs.hand)?),
            ("hand_count", &obs.hand.len().to_string()),
            ("level_card", &level_card(store, locale, obs.level)?),
            ("teammate", &obs.teammate().to_string()),
            ("teammate_count", &obs.teammate_count().to_string()),
            ("next_opponent", &obs.next_opponent().to_string()),
            ("next_opponent_count", &obs.next_opponent_count().to_string()),
            ("previous_opponent", &obs.previous_opponent().to_string()),
            ("previous_opponent_count", &obs.previous_opponent_count().to_string()),
            ("lead_status", &lead_status),
            ("last_play", &last_play),
        ],
    )?;
    Ok(RenderedObservation { text, locale })
}

/// One numbered line per event, roles relative to `observer`.
pub fn render_history(
    store: &TemplateStore,
    history: &[HistoryEvent],
    observer: Seat,
    locale: Locale,
) -> Result<RenderedHistory> {
    if history.is_empty() {
        return Ok(RenderedHistory { text: store.render(locale, "history", "empty", &[])?, locale });
    }
    let mut lines = Vec::with_capacity(history.len());
    for (i, event) in history.iter().enumerate() {
        let n = (i + 1).to_string();
        let seat = event.seat.to_string();
        let role = store.vocab(locale, role_key(observer, event.seat))?;
        let line = match &event.action {
            Action::Pass => store.render(locale, "history", "pass", &[("n", &n), ("seat", &seat), ("role", role)])?,
            Action::Play(combo) => {
                let value_word = store.vocab(locale, if combo.len() == 1 { "value.one" } else { "value.many" })?;
                store.render(
                    locale,
                    "history",
                    "play",
                    &[
                        ("n", &n),
                        ("seat", &seat),
                        ("role", role),
                        ("kind", kind_name(store, locale, combo)?),
                        ("value_word", value_word),
                        ("cards", &combo_list(store, locale, combo)?),
                    ],
                )?
            }
        };
        lines.push(line);
    }
    Ok(RenderedHistory { text: lines.join("\n"), locale })
}

pub fn render_rules(store: &TemplateStore, level: Level, locale: Locale) -> Result<RuleText> {
    let text = store.render(
        locale,
        "rules",
        "main",
        &[("level", &level.rank().to_string()), ("level_card", &level_card(store, locale, level)?)],
    )?;
    Ok(RuleText { text, locale })
}

/// The last `window` events.
pub fn history_window(history: &[HistoryEvent], window: usize) -> &[HistoryEvent] {
    &history[history.len().saturating_sub(window)..]
}
