//! Combo taxonomy, validation, the beats relation and legal-action enumeration.
//!
//! Players declare a combo as (cards, kind, wildcard assignment); the engine
//! validates the declaration rather than guessing intent. Enumeration
//! produces one canonical declaration per distinct option (see
//! [`enumerate_legal_actions`]).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cards::{format_cards, is_wildcard, Card, Face, Level, Rank, Suit};
use crate::error::{GameError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ComboKind {
    Single,
    Pair,
    Triple,
    /// Three pairs of adjacent ranks, e.g. 223344.
    ThreeConsecutivePairs,
    /// Two triples of adjacent ranks, e.g. 333444.
    TwoConsecutiveTriples,
    TripleWithPair,
    Straight,
    /// Four to eight cards of one rank.
    Bomb,
    StraightFlush,
    /// Both black and both red jokers.
    JokerBomb,
}

impl ComboKind {
    pub const ALL: [ComboKind; 10] = [
        ComboKind::Single,
        ComboKind::Pair,
        ComboKind::Triple,
        ComboKind::ThreeConsecutivePairs,
        ComboKind::TwoConsecutiveTriples,
        ComboKind::TripleWithPair,
        ComboKind::Straight,
        ComboKind::Bomb,
        ComboKind::StraightFlush,
        ComboKind::JokerBomb,
    ];

    /// Category Two kinds beat anything in Category One.
    pub fn is_category_two(self) -> bool {
        matches!(self, ComboKind::Bomb | ComboKind::StraightFlush | ComboKind::JokerBomb)
    }

    pub fn name(self) -> &'static str {
        match self {
            ComboKind::Single => "Single",
            ComboKind::Pair => "Pair",
            ComboKind::Triple => "Triple",
            ComboKind::ThreeConsecutivePairs => "ThreeConsecutivePairs",
            ComboKind::TwoConsecutiveTriples => "TwoConsecutiveTriples",
            ComboKind::TripleWithPair => "TripleWithPair",
            ComboKind::Straight => "Straight",
            ComboKind::Bomb => "Bomb",
            ComboKind::StraightFlush => "StraightFlush",
            ComboKind::JokerBomb => "JokerBomb",
        }
    }

    pub fn from_name(name: &str) -> Option<ComboKind> {
        ComboKind::ALL.iter().copied().find(|k| k.name() == name)
    }

    fn shape(self) -> &'static str {
        match self {
            ComboKind::Single => "one card",
            ComboKind::Pair => "two cards of one rank",
            ComboKind::Triple => "three cards of one rank",
            ComboKind::ThreeConsecutivePairs => "three pairs of adjacent ranks",
            ComboKind::TwoConsecutiveTriples => "two triples of adjacent ranks",
            ComboKind::TripleWithPair => "a triple plus a pair of another rank",
            ComboKind::Straight => "five cards of consecutive ranks",
            ComboKind::Bomb => "four to eight cards of one non-joker rank",
            ComboKind::StraightFlush => "five consecutive ranks of one suit",
            ComboKind::JokerBomb => "two black jokers and two red jokers",
        }
    }
}

impl fmt::Display for ComboKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which face each wildcard in a combo stands for. Wildcards absent from the
/// map play at face value.
pub type WildAssignment = BTreeMap<Card, Face>;

/// A validated play.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Combo {
    kind: ComboKind,
    cards: Vec<Card>,
    wild: WildAssignment,
    key_rank: Rank,
}

impl Combo {
    pub fn kind(&self) -> ComboKind {
        self.kind
    }

    /// Cards in display order.
    pub fn cards(&self) -> &[Card] {
        &self.cards
    }

    pub fn wild(&self) -> &WildAssignment {
        &self.wild
    }

    /// Comparison rank: top of the run for sequences (ace-low runs top out
    /// at their highest small card), the triple for a triple-with-pair, the
    /// repeated rank otherwise.
    pub fn key_rank(&self) -> Rank {
        self.key_rank
    }

    pub fn len(&self) -> usize {
        self.cards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cards.is_empty()
    }

    /// The (rank, suit) each card represents after wildcard substitution.
    pub fn represented(&self) -> Vec<(Rank, Option<Suit>)> {
        represent(&self.cards, &self.wild)
    }
}

/// `kind[key]: card,card,...` with wild assignments appended as `H J#0→S9`.
impl fmt::Display for Combo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]: {}", self.kind, self.key_rank, format_cards(&self.cards))?;
        if !self.wild.is_empty() {
            let wild: Vec<String> = self.wild.iter().map(|(c, face)| format!("{c}→{face}")).collect();
            write!(f, " ({})", wild.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Action {
    Pass,
    Play(Combo),
}

impl Action {
    pub fn combo(&self) -> Option<&Combo> {
        match self {
            Action::Pass => None,
            Action::Play(c) => Some(c),
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Action::Pass)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Pass => f.write_str("Pass"),
            Action::Play(c) => c.fmt(f),
        }
    }
}

fn represent(cards: &[Card], wild: &WildAssignment) -> Vec<(Rank, Option<Suit>)> {
    cards
        .iter()
        .map(|c| match wild.get(c) {
            Some(face) => (face.rank, Some(face.suit)),
            None => (c.rank(), c.suit()),
        })
        .collect()
}

/// If `ranks` (distinct, non-joker) form one consecutive run, returns the top
/// of the run. The ace may sit below the two; runs never wrap.
fn run_top(ranks: &[Rank]) -> Option<Rank> {
    if ranks.is_empty() || ranks.iter().any(|r| r.is_joker()) {
        return None;
    }
    let consecutive = |mut pos: Vec<i8>| {
        pos.sort_unstable();
        pos.windows(2).all(|w| w[1] == w[0] + 1).then(|| *pos.last().unwrap())
    };
    let high: Vec<i8> = ranks.iter().map(|r| r.ordinal() as i8).collect();
    if let Some(top) = consecutive(high.clone()) {
        return Rank::from_ordinal(top as u8);
    }
    if ranks.contains(&Rank::Ace) {
        let low: Vec<i8> = high.iter().map(|&p| if p == Rank::Ace.ordinal() as i8 { -1 } else { p }).collect();
        if let Some(top) = consecutive(low) {
            return Rank::from_ordinal(top as u8);
        }
    }
    None
}

/// Counts per represented rank, ascending by rank.
fn rank_counts(rep: &[(Rank, Option<Suit>)]) -> Vec<(Rank, usize)> {
    let mut counts: BTreeMap<Rank, usize> = BTreeMap::new();
    for (r, _) in rep {
        *counts.entry(*r).or_default() += 1;
    }
    counts.into_iter().collect()
}

/// Validates a declared play and computes its comparison rank.
///
/// A combo made only of wildcards plays them at face value, so `wild` must be
/// empty in that case. A single card never takes an assignment.
pub fn validate_combo(cards: &[Card], kind: ComboKind, wild: &WildAssignment, level: Level) -> Result<Combo> {
    let mut sorted = cards.to_vec();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(GameError::InvalidInput("a physical card appears twice".into()));
    }
    for (card, face) in wild {
        if !sorted.contains(card) {
            return Err(GameError::InvalidWild(format!("{card} is assigned but not played")));
        }
        if !is_wildcard(*card, level) {
            return Err(GameError::InvalidWild(format!("{card} is not a wildcard at level {level}")));
        }
        if face.rank.is_joker() {
            return Err(GameError::InvalidWild(format!("{card} cannot stand for a joker")));
        }
    }
    if !wild.is_empty() && sorted.iter().all(|&c| is_wildcard(c, level)) {
        return Err(GameError::InvalidWild("wildcards played alone keep their face value".into()));
    }

    let mismatch = |reason: &str| GameError::InvalidCombo { expected: kind.shape(), reason: reason.to_string() };
    let rep = represent(&sorted, wild);
    let counts = rank_counts(&rep);
    let n = rep.len();
    let count_shape: Vec<usize> = counts.iter().map(|&(_, c)| c).collect();
    let ranks: Vec<Rank> = counts.iter().map(|&(r, _)| r).collect();

    let key_rank = match kind {
        ComboKind::Single => {
            if n != 1 {
                return Err(mismatch("wrong card count"));
            }
            ranks[0]
        }
        ComboKind::Pair | ComboKind::Triple => {
            let want = if kind == ComboKind::Pair { 2 } else { 3 };
            if n != want || counts.len() != 1 {
                return Err(mismatch("cards do not share one rank"));
            }
            ranks[0]
        }
        ComboKind::ThreeConsecutivePairs | ComboKind::TwoConsecutiveTriples => {
            let (groups, size) = if kind == ComboKind::ThreeConsecutivePairs { (3, 2) } else { (2, 3) };
            if n != groups * size || counts.len() != groups || count_shape.iter().any(|&c| c != size) {
                return Err(mismatch("wrong grouping"));
            }
            run_top(&ranks).ok_or_else(|| mismatch("ranks are not adjacent"))?
        }
        ComboKind::TripleWithPair => {
            if n != 5 || counts.len() != 2 {
                return Err(mismatch("wrong grouping"));
            }
            let triple = counts.iter().find(|&&(_, c)| c == 3).map(|&(r, _)| r);
            let pair = counts.iter().any(|&(_, c)| c == 2);
            match triple {
                Some(t) if pair && !t.is_joker() => t,
                _ => return Err(mismatch("wrong grouping")),
            }
        }
        ComboKind::Straight | ComboKind::StraightFlush => {
            if n != 5 || counts.len() != 5 {
                return Err(mismatch("need five distinct ranks"));
            }
            let top = run_top(&ranks).ok_or_else(|| mismatch("ranks are not consecutive"))?;
            if kind == ComboKind::StraightFlush {
                let suit = rep[0].1;
                if suit.is_none() || rep.iter().any(|&(_, s)| s != suit) {
                    return Err(mismatch("suits differ"));
                }
            }
            top
        }
        ComboKind::Bomb => {
            if !(4..=8).contains(&n) || counts.len() != 1 || ranks[0].is_joker() {
                return Err(mismatch("wrong card count or mixed ranks"));
            }
            ranks[0]
        }
        ComboKind::JokerBomb => {
            if counts != [(Rank::BlackJoker, 2), (Rank::RedJoker, 2)] {
                return Err(mismatch("not the four jokers"));
            }
            Rank::RedJoker
        }
    };
    if kind == ComboKind::Single && !wild.is_empty() {
        return Err(GameError::InvalidWild("a single card plays at face value".into()));
    }

    Ok(Combo { kind, cards: sorted, wild: wild.clone(), key_rank })
}

/// Whether `challenger` may be played on top of `incumbent`.
pub fn beats(challenger: &Combo, incumbent: &Combo) -> bool {
    use ComboKind::*;
    match (challenger.kind, incumbent.kind) {
        (JokerBomb, JokerBomb) => false,
        (JokerBomb, _) => true,
        (_, JokerBomb) => false,
        (Bomb, Bomb) => (challenger.len(), challenger.key_rank) > (incumbent.len(), incumbent.key_rank),
        (StraightFlush, StraightFlush) => challenger.key_rank > incumbent.key_rank,
        (StraightFlush, Bomb) => incumbent.len() <= 5,
        (Bomb, StraightFlush) => challenger.len() >= 6,
        (c, i) if c.is_category_two() && !i.is_category_two() => true,
        (c, _) if c.is_category_two() => false,
        (_, i) if i.is_category_two() => false,
        (c, i) => c == i && challenger.len() == incumbent.len() && challenger.key_rank > incumbent.key_rank,
    }
}

/// A hand split into natural cards by face and the wildcards it holds.
struct HandIndex {
    by_rank: [Vec<Card>; 15],
    by_face: BTreeMap<(Rank, Suit), Vec<Card>>,
    wilds: Vec<Card>,
}

impl HandIndex {
    fn new(hand: &[Card], level: Level) -> HandIndex {
        let mut index = HandIndex { by_rank: Default::default(), by_face: BTreeMap::new(), wilds: Vec::new() };
        let mut sorted = hand.to_vec();
        sorted.sort();
        for card in sorted {
            if is_wildcard(card, level) {
                index.wilds.push(card);
                continue;
            }
            index.by_rank[card.rank().ordinal() as usize].push(card);
            if let Some(suit) = card.suit() {
                index.by_face.entry((card.rank(), suit)).or_default().push(card);
            }
        }
        index
    }

    fn naturals(&self, rank: Rank, suit: Option<Suit>) -> &[Card] {
        match suit {
            None => &self.by_rank[rank.ordinal() as usize],
            Some(s) => self.by_face.get(&(rank, s)).map(Vec::as_slice).unwrap_or(&[]),
        }
    }
}

/// Emits every way to fill `slots` (rank, count) from the hand, varying how
/// many wildcards stand in at each slot. Naturals and wildcards are taken in
/// display order, so each option gets one canonical set of physical cards.
fn fill_slots(
    index: &HandIndex,
    level: Level,
    slots: &[(Rank, usize)],
    suit: Option<Suit>,
    out: &mut Vec<(Vec<Card>, WildAssignment)>,
) {
    fn rec(
        index: &HandIndex,
        level: Level,
        slots: &[(Rank, usize)],
        suit: Option<Suit>,
        usage: &mut Vec<usize>,
        wilds_left: usize,
        out: &mut Vec<(Vec<Card>, WildAssignment)>,
    ) {
        let i = usage.len();
        if i == slots.len() {
            let mut cards = Vec::new();
            let mut faces = Vec::new();
            let mut wilds_used = 0;
            let mut naturals = 0;
            for (&(rank, need), &used) in slots.iter().zip(usage.iter()) {
                let nat = need - used;
                naturals += nat;
                wilds_used += used;
                cards.extend_from_slice(&index.naturals(rank, suit)[..nat]);
                let face = Face { rank, suit: suit.unwrap_or(Suit::Hearts) };
                if face != level.wildcard_face() {
                    faces.extend(std::iter::repeat_n(face, used));
                }
            }
            if naturals == 0 && !faces.is_empty() {
                return;
            }
            // Substituting wildcards go first and take the lowest faces;
            // any others play at face value.
            faces.sort();
            let used_wilds = &index.wilds[..wilds_used];
            cards.extend_from_slice(used_wilds);
            let wild: WildAssignment = used_wilds.iter().copied().zip(faces).collect();
            cards.sort();
            out.push((cards, wild));
            return;
        }
        let (rank, need) = slots[i];
        let have = index.naturals(rank, suit).len();
        let max_wild = if rank.is_joker() { 0 } else { need.min(wilds_left) };
        let min_wild = need.saturating_sub(have);
        for used in min_wild..=max_wild {
            usage.push(used);
            rec(index, level, slots, suit, usage, wilds_left - used, out);
            usage.pop();
        }
    }
    rec(index, level, slots, suit, &mut Vec::with_capacity(slots.len()), index.wilds.len(), out);
}

/// Runs of `len` adjacent suited ranks, ace-low run first.
fn runs(len: usize) -> Vec<Vec<Rank>> {
    let mut out = Vec::new();
    let mut low = vec![Rank::Ace];
    low.extend_from_slice(&Rank::SUITED[..len - 1]);
    out.push(low);
    for start in 0..=(Rank::SUITED.len() - len) {
        out.push(Rank::SUITED[start..start + len].to_vec());
    }
    out
}

fn candidates(index: &HandIndex, level: Level) -> Vec<Combo> {
    let mut out = Vec::new();
    let mut push = |kind: ComboKind, slots: &[(Rank, usize)], suit: Option<Suit>, key: Rank| {
        let mut fills = Vec::new();
        fill_slots(index, level, slots, suit, &mut fills);
        for (cards, wild) in fills {
            out.push(Combo { kind, cards, wild, key_rank: key });
        }
    };
    let all_pairable: Vec<Rank> = Rank::ALL.to_vec();

    for rank in Rank::ALL {
        push(ComboKind::Single, &[(rank, 1)], None, rank);
    }
    for &rank in &all_pairable {
        push(ComboKind::Pair, &[(rank, 2)], None, rank);
    }
    for rank in Rank::SUITED {
        push(ComboKind::Triple, &[(rank, 3)], None, rank);
    }
    for run in runs(3) {
        let slots: Vec<_> = run.iter().map(|&r| (r, 2)).collect();
        push(ComboKind::ThreeConsecutivePairs, &slots, None, *run.last().unwrap());
    }
    for run in runs(2) {
        let slots: Vec<_> = run.iter().map(|&r| (r, 3)).collect();
        push(ComboKind::TwoConsecutiveTriples, &slots, None, *run.last().unwrap());
    }
    for triple in Rank::SUITED {
        for &pair in &all_pairable {
            if pair != triple {
                push(ComboKind::TripleWithPair, &[(triple, 3), (pair, 2)], None, triple);
            }
        }
    }
    let straights = runs(5);
    for run in &straights {
        let slots: Vec<_> = run.iter().map(|&r| (r, 1)).collect();
        push(ComboKind::Straight, &slots, None, *run.last().unwrap());
    }
    for rank in Rank::SUITED {
        for size in 4..=8 {
            push(ComboKind::Bomb, &[(rank, size)], None, rank);
        }
    }
    for run in &straights {
        let slots: Vec<_> = run.iter().map(|&r| (r, 1)).collect();
        for suit in Suit::ALL {
            push(ComboKind::StraightFlush, &slots, Some(suit), *run.last().unwrap());
        }
    }
    push(ComboKind::JokerBomb, &[(Rank::BlackJoker, 2), (Rank::RedJoker, 2)], None, Rank::RedJoker);
    out
}

fn enumeration_order(a: &Combo, b: &Combo) -> std::cmp::Ordering {
    (a.kind, a.key_rank, &a.cards, &a.wild).cmp(&(b.kind, b.key_rank, &b.cards, &b.wild))
}

/// Every distinct legal action for `hand`.
///
/// Leading (`incumbent == None`) lists every formable combo and never Pass.
/// Following lists every combo that beats the incumbent, then Pass last.
///
/// Options are distinct when they differ in kind, comparison rank, the ranks
/// they represent, the face ranks of the natural cards they spend, the number
/// of wildcards they spend, or (for straight flushes) the suit. Suit choice
/// and deck copy are otherwise immaterial, so each option is reported once
/// using the lowest cards in display order. Ordering: kind, then comparison
/// rank, then cards.
pub fn enumerate_legal_actions(hand: &[Card], incumbent: Option<&Combo>, level: Level) -> Result<Vec<Action>> {
    if hand.is_empty() {
        return Err(GameError::InvalidState("cannot act with an empty hand".into()));
    }
    let index = HandIndex::new(hand, level);
    let mut combos = candidates(&index, level);
    if let Some(inc) = incumbent {
        combos.retain(|c| beats(c, inc));
    }
    combos.sort_by(enumeration_order);
    combos.dedup();
    let mut actions: Vec<Action> = combos.into_iter().map(Action::Play).collect();
    if incumbent.is_some() {
        actions.push(Action::Pass);
    }
    Ok(actions)
}
