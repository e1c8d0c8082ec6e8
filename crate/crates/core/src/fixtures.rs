//! The worked example position used by the renderer and prompt tests:
//! seat 0 to act at level J, facing seat 2's pair of nines.

use crate::agents::Observation;
use crate::cards::{Card, Level};
use crate::combos::{validate_combo, Action, Combo, ComboKind, WildAssignment};
use crate::engine::{DealState, HistoryEvent, Seat};

fn cards(list: &str) -> Vec<Card> {
    list.split(',').map(|s| s.trim().parse().expect("fixture card")).collect()
}

fn combo(list: &str, kind: ComboKind) -> Combo {
    validate_combo(&cards(list), kind, &WildAssignment::new(), level()).expect("fixture combo")
}

pub fn level() -> Level {
    "J".parse().expect("fixture level")
}

pub fn hands() -> [Vec<Card>; 4] {
    [
        cards("D 2#0,D 4#0,C 3#0,C 4#0,C A#0,C A#1,H K#0,H A#0,S 2#0,S 3#0,S 4#0,S 8#0,S J#0"),
        cards("S 6#0,S 7#0"),
        cards("D 5#0,D 6#0,D 7#0,D 10#0,D Q#0,C 6#0,C 7#0,C 10#0"),
        cards("D K#0,C K#0,S K#0,H 3#0,H 5#0,H 6#0,H 7#0,H 10#0,H Q#0,S 5#0,S 9#0,S 10#0,S Q#0"),
    ]
}

pub fn incumbent() -> (Seat, Combo) {
    (2, combo("D 9#0,H 9#0", ComboKind::Pair))
}

/// The eight public events leading up to seat 0's decision.
pub fn history() -> Vec<HistoryEvent> {
    let play = |seat, list: &str, kind, after| HistoryEvent {
        seat,
        action: Action::Play(combo(list, kind)),
        hand_size_after: after,
    };
    let pass = |seat, after| HistoryEvent { seat, action: Action::Pass, hand_size_after: after };
    vec![
        play(2, "BJ#0", ComboKind::Single, 11),
        pass(3, 13),
        pass(1, 4),
        play(2, "D 4#1,H 4#0", ComboKind::Pair, 10),
        pass(3, 13),
        play(1, "C 8#0,H 8#0", ComboKind::Pair, 2),
        play(2, "D 9#0,H 9#0", ComboKind::Pair, 8),
        pass(3, 13),
    ]
}

pub fn state() -> DealState {
    DealState::from_position(hands(), level(), 0, Some(incumbent())).expect("fixture state")
}

pub fn observation() -> Observation {
    let state = state();
    let mut obs = state.observe(0).expect("fixture observation");
    obs.history = history();
    obs.step = obs.history.len();
    obs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_counts() {
        let o = observation();
        assert_eq!(o.hand.len(), 13);
        assert_eq!(o.teammate_count(), 8);
        assert_eq!(o.next_opponent_count(), 2);
        assert_eq!(o.previous_opponent_count(), 13);
        assert!(!o.has_lead());
        assert_eq!(o.legal_actions.len(), 2);
    }
}
