//! Brute-force legal-action oracle: every subset of the hand, every kind
//! whose size fits, every wildcard interpretation, run through the
//! validator, then deduplicated by the option signature.

#![allow(dead_code)]

use std::collections::BTreeMap;

use guandan::{
    beats, build_deck, is_wildcard, validate_combo, Action, Card, Combo, ComboKind, Face, Level, Rank, Suit,
    WildAssignment,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn kinds_for_size(n: usize) -> &'static [ComboKind] {
    use ComboKind::*;
    match n {
        1 => &[Single],
        2 => &[Pair],
        3 => &[Triple],
        4 => &[Bomb, JokerBomb],
        5 => &[TripleWithPair, Straight, Bomb, StraightFlush],
        6 => &[ThreeConsecutivePairs, TwoConsecutiveTriples, Bomb],
        7 | 8 => &[Bomb],
        _ => &[],
    }
}

fn all_faces() -> Vec<Option<Face>> {
    let mut faces = vec![None];
    for rank in Rank::ALL {
        for suit in Suit::ALL {
            faces.push(Some(Face { rank, suit }));
        }
    }
    faces
}

/// Options are the same when kind, key, represented ranks, natural face
/// ranks, wildcard count and (for straight flushes) suit agree.
type Signature = (ComboKind, Rank, Vec<Rank>, Vec<Rank>, usize, Option<Suit>);

fn signature(c: &Combo, level: Level) -> Signature {
    let mut represented: Vec<Rank> = c.represented().iter().map(|&(r, _)| r).collect();
    represented.sort();
    let mut natural: Vec<Rank> = c.cards().iter().filter(|&&x| !is_wildcard(x, level)).map(|x| x.rank()).collect();
    natural.sort();
    let wilds = c.cards().iter().filter(|&&x| is_wildcard(x, level)).count();
    let suit = (c.kind() == ComboKind::StraightFlush).then(|| c.represented()[0].1.unwrap());
    (c.kind(), c.key_rank(), represented, natural, wilds, suit)
}

/// Outside straight flushes the represented suit is immaterial; fix it to
/// Hearts and drop assignments that equal the wildcard's own face.
fn normalize(c: &Combo, level: Level) -> Combo {
    let mut wild = WildAssignment::new();
    for (&card, &face) in c.wild() {
        let face =
            if c.kind() == ComboKind::StraightFlush { face } else { Face { rank: face.rank, suit: Suit::Hearts } };
        if face != level.wildcard_face() {
            wild.insert(card, face);
        }
    }
    validate_combo(c.cards(), c.kind(), &wild, level).expect("normalized combo stays valid")
}

pub fn oracle_actions(hand: &[Card], incumbent: Option<&Combo>, level: Level) -> Vec<Action> {
    assert!(hand.len() <= 10, "oracle is exponential");
    let faces = all_faces();
    let mut best: BTreeMap<Signature, Combo> = BTreeMap::new();
    for mask in 1u32..(1 << hand.len()) {
        let subset: Vec<Card> = (0..hand.len()).filter(|i| mask & (1 << i) != 0).map(|i| hand[i]).collect();
        let wilds: Vec<Card> = subset.iter().copied().filter(|&c| is_wildcard(c, level)).collect();
        for &kind in kinds_for_size(subset.len()) {
            let combos_n = faces.len().pow(wilds.len() as u32);
            for code in 0..combos_n {
                let mut wild = WildAssignment::new();
                let mut rest = code;
                for &w in &wilds {
                    if let Some(face) = faces[rest % faces.len()] {
                        wild.insert(w, face);
                    }
                    rest /= faces.len();
                }
                let Ok(combo) = validate_combo(&subset, kind, &wild, level) else { continue };
                if let Some(inc) = incumbent {
                    if !beats(&combo, inc) {
                        continue;
                    }
                }
                let combo = normalize(&combo, level);
                let sig = signature(&combo, level);
                let replace = match best.get(&sig) {
                    Some(cur) => (combo.cards(), combo.wild()) < (cur.cards(), cur.wild()),
                    None => true,
                };
                if replace {
                    best.insert(sig, combo);
                }
            }
        }
    }
    let mut combos: Vec<Combo> = best.into_values().collect();
    combos.sort_by(|a, b| {
        (a.kind(), a.key_rank(), a.cards(), a.wild()).cmp(&(b.kind(), b.key_rank(), b.cards(), b.wild()))
    });
    let mut actions: Vec<Action> = combos.into_iter().map(Action::Play).collect();
    if incumbent.is_some() {
        actions.push(Action::Pass);
    }
    actions
}

/// A seeded hand of 1..=8 cards. Every third hand is forced to hold one or
/// both wildcards so substitution paths get exercised.
pub fn random_small_hand(rng: &mut ChaCha8Rng, level: Level) -> Vec<Card> {
    let mut deck = build_deck();
    deck.shuffle(rng);
    // Half of the hands draw from a narrow rank window (jokers included) so
    // runs, bombs and full houses actually occur.
    if rng.gen_bool(0.5) {
        let start = rng.gen_range(0..9u8);
        deck.retain(|c| {
            let o = c.rank().ordinal();
            c.is_joker() || c.rank() == Rank::Ace || (start..start + 5).contains(&o)
        });
    }
    let size = rng.gen_range(1..=8);
    let mut hand: Vec<Card> = Vec::with_capacity(size);
    let forced = rng.gen_range(0..6);
    if forced < 2 {
        let wilds: Vec<Card> = deck.iter().copied().filter(|&c| is_wildcard(c, level)).collect();
        hand.extend(wilds.into_iter().take(forced + 1).take(size));
    }
    for c in deck {
        if hand.len() == size {
            break;
        }
        if !hand.contains(&c) {
            hand.push(c);
        }
    }
    hand.sort();
    hand
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
