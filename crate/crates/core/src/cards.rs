//! Card identity, rank order, the 108-card deck, dealing and the level wildcard.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{GameError, Result};

pub const DECK_SIZE: usize = 108;
pub const HAND_SIZE: usize = 27;
pub const NUM_SEATS: usize = 4;

/// Card rank, low to high. Jokers sit above the ace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Rank {
    Two = 0,
    Three,
    Four,
    Five,
    Six,
    Seven,
    Eight,
    Nine,
    Ten,
    Jack,
    Queen,
    King,
    Ace,
    BlackJoker,
    RedJoker,
}

impl Rank {
    pub const ALL: [Rank; 15] = [
        Rank::Two,
        Rank::Three,
        Rank::Four,
        Rank::Five,
        Rank::Six,
        Rank::Seven,
        Rank::Eight,
        Rank::Nine,
        Rank::Ten,
        Rank::Jack,
        Rank::Queen,
        Rank::King,
        Rank::Ace,
        Rank::BlackJoker,
        Rank::RedJoker,
    ];

    /// The thirteen suited ranks, 2 through A.
    pub const SUITED: [Rank; 13] = [
        Rank::Two,
        Rank::Three,
        Rank::Four,
        Rank::Five,
        Rank::Six,
        Rank::Seven,
        Rank::Eight,
        Rank::Nine,
        Rank::Ten,
        Rank::Jack,
        Rank::Queen,
        Rank::King,
        Rank::Ace,
    ];

    pub fn ordinal(self) -> u8 {
        self as u8
    }

    pub fn from_ordinal(ordinal: u8) -> Option<Rank> {
        Rank::ALL.get(ordinal as usize).copied()
    }

    pub fn is_joker(self) -> bool {
        matches!(self, Rank::BlackJoker | Rank::RedJoker)
    }

    /// Short symbol used in log text: `2`..`10`, `J`, `Q`, `K`, `A`, `BJ`, `RJ`.
    pub fn symbol(self) -> &'static str {
        match self {
            Rank::Two => "2",
            Rank::Three => "3",
            Rank::Four => "4",
            Rank::Five => "5",
            Rank::Six => "6",
            Rank::Seven => "7",
            Rank::Eight => "8",
            Rank::Nine => "9",
            Rank::Ten => "10",
            Rank::Jack => "J",
            Rank::Queen => "Q",
            Rank::King => "K",
            Rank::Ace => "A",
            Rank::BlackJoker => "BJ",
            Rank::RedJoker => "RJ",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Rank> {
        Rank::ALL.iter().copied().find(|r| r.symbol() == s)
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suit {
    Hearts,
    Spades,
    Clubs,
    Diamonds,
}

impl Suit {
    pub const ALL: [Suit; 4] = [Suit::Hearts, Suit::Spades, Suit::Clubs, Suit::Diamonds];

    pub fn letter(self) -> char {
        match self {
            Suit::Hearts => 'H',
            Suit::Spades => 'S',
            Suit::Clubs => 'C',
            Suit::Diamonds => 'D',
        }
    }

    pub fn from_letter(c: char) -> Option<Suit> {
        Suit::ALL.iter().copied().find(|s| s.letter() == c)
    }

    /// Position in the hand display order: Diamonds, Clubs, Hearts, Spades.
    pub fn display_index(self) -> u8 {
        match self {
            Suit::Diamonds => 0,
            Suit::Clubs => 1,
            Suit::Hearts => 2,
            Suit::Spades => 3,
        }
    }
}

/// One of the 108 physical cards.
///
/// Ordering is the hand display order: suited cards grouped by suit
/// (Diamonds, Clubs, Hearts, Spades) and ascending rank inside a suit,
/// followed by black then red jokers. `copy` breaks the remaining tie.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Card {
    rank: Rank,
    suit: Option<Suit>,
    copy: u8,
}

impl Card {
    pub fn new(rank: Rank, suit: Suit, copy: u8) -> Result<Card> {
        if rank.is_joker() {
            return Err(GameError::InvalidInput(format!("{rank} carries no suit")));
        }
        if copy > 1 {
            return Err(GameError::InvalidInput(format!("deck copy {copy} out of range")));
        }
        Ok(Card { rank, suit: Some(suit), copy })
    }

    pub fn joker(rank: Rank, copy: u8) -> Result<Card> {
        if !rank.is_joker() {
            return Err(GameError::InvalidInput(format!("{rank} is not a joker")));
        }
        if copy > 1 {
            return Err(GameError::InvalidInput(format!("deck copy {copy} out of range")));
        }
        Ok(Card { rank, suit: None, copy })
    }

    pub fn rank(self) -> Rank {
        self.rank
    }

    /// `None` for jokers.
    pub fn suit(self) -> Option<Suit> {
        self.suit
    }

    pub fn deck_copy(self) -> u8 {
        self.copy
    }

    pub fn is_joker(self) -> bool {
        self.suit.is_none()
    }

    fn sort_key(self) -> (u8, u8, u8, u8) {
        match self.suit {
            Some(s) => (0, s.display_index(), self.rank.ordinal(), self.copy),
            None => (1, 0, self.rank.ordinal(), self.copy),
        }
    }
}

impl Ord for Card {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Card {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.suit {
            Some(s) => write!(f, "{} {}#{}", s.letter(), self.rank, self.copy),
            None => write!(f, "{}#{}", self.rank, self.copy),
        }
    }
}

impl FromStr for Card {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Card> {
        let bad = || GameError::Parse(format!("bad card text {s:?}"));
        let (body, copy) = s.rsplit_once('#').ok_or_else(bad)?;
        let copy: u8 = copy.parse().map_err(|_| bad())?;
        match body.split_once(' ') {
            Some((suit, rank)) => {
                let mut chars = suit.chars();
                let suit = match (chars.next(), chars.next()) {
                    (Some(c), None) => Suit::from_letter(c).ok_or_else(bad)?,
                    _ => return Err(bad()),
                };
                let rank = Rank::from_symbol(rank).ok_or_else(bad)?;
                Card::new(rank, suit, copy)
            }
            None => Card::joker(Rank::from_symbol(body).ok_or_else(bad)?, copy),
        }
    }
}

impl Serialize for Card {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Card {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A (rank, suit) face a wildcard stands in for. Never a joker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Face {
    pub rank: Rank,
    pub suit: Suit,
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.suit.letter(), self.rank)
    }
}

impl FromStr for Face {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Face> {
        let bad = || GameError::Parse(format!("bad face text {s:?}"));
        let mut chars = s.chars();
        let suit = chars.next().and_then(Suit::from_letter).ok_or_else(bad)?;
        let rank = Rank::from_symbol(chars.as_str()).ok_or_else(bad)?;
        if rank.is_joker() {
            return Err(bad());
        }
        Ok(Face { rank, suit })
    }
}

/// The deal's level rank. Its Hearts cards are the wildcards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Level(Rank);

impl Level {
    pub fn new(rank: Rank) -> Result<Level> {
        if rank.is_joker() {
            return Err(GameError::InvalidInput("a level is never a joker".into()));
        }
        Ok(Level(rank))
    }

    pub fn rank(self) -> Rank {
        self.0
    }

    pub fn wildcard_face(self) -> Face {
        Face { rank: self.0, suit: Suit::Hearts }
    }
}

impl Default for Level {
    fn default() -> Self {
        Level(Rank::Two)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0.symbol())
    }
}

impl FromStr for Level {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Level> {
        let rank = Rank::from_symbol(s.trim()).ok_or_else(|| GameError::Parse(format!("bad level {s:?}")))?;
        Level::new(rank)
    }
}

impl TryFrom<String> for Level {
    type Error = GameError;

    fn try_from(s: String) -> Result<Level> {
        s.parse()
    }
}

impl From<Level> for String {
    fn from(level: Level) -> String {
        level.to_string()
    }
}

/// Both physical decks in canonical order.
pub fn build_deck() -> Vec<Card> {
    let mut deck = Vec::with_capacity(DECK_SIZE);
    for copy in 0..2 {
        for suit in Suit::ALL {
            for rank in Rank::SUITED {
                deck.push(Card { rank, suit: Some(suit), copy });
            }
        }
        deck.push(Card { rank: Rank::BlackJoker, suit: None, copy });
        deck.push(Card { rank: Rank::RedJoker, suit: None, copy });
    }
    deck
}

/// Shuffles with a seeded Fisher-Yates pass and deals round-robin:
/// seat `i` receives the cards at shuffled positions `i, i+4, i+8, ...`.
/// Each returned hand is sorted in display order.
pub fn deal(deck: &[Card], seed: u64) -> Result<[Vec<Card>; NUM_SEATS]> {
    if deck.len() != DECK_SIZE {
        return Err(GameError::InvalidInput(format!("deck must hold {DECK_SIZE} cards, got {}", deck.len())));
    }
    let mut cards = deck.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    cards.shuffle(&mut rng);
    let mut hands: [Vec<Card>; NUM_SEATS] = Default::default();
    for (i, card) in cards.into_iter().enumerate() {
        hands[i % NUM_SEATS].push(card);
    }
    for hand in &mut hands {
        hand.sort();
    }
    Ok(hands)
}

pub fn is_wildcard(card: Card, level: Level) -> bool {
    card.suit == Some(Suit::Hearts) && card.rank == level.rank()
}

pub fn format_cards(cards: &[Card]) -> String {
    cards.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn card(s: &str) -> Card {
        s.parse().unwrap()
    }

    #[test]
    fn deck_composition() {
        let deck = build_deck();
        assert_eq!(deck.len(), 108);
        assert_eq!(deck.iter().filter(|c| c.rank() == Rank::Ace).count(), 8);
        assert_eq!(deck.iter().filter(|c| c.is_joker()).count(), 4);
        assert_eq!(deck.iter().filter(|c| c.rank() == Rank::BlackJoker).count(), 2);
        assert_eq!(deck.iter().filter(|c| c.rank() == Rank::Jack && c.suit() == Some(Suit::Hearts)).count(), 2);
        let distinct: HashSet<_> = deck.iter().collect();
        assert_eq!(distinct.len(), 108);
        for rank in Rank::SUITED {
            for suit in Suit::ALL {
                let n = deck.iter().filter(|c| c.rank() == rank && c.suit() == Some(suit)).count();
                assert_eq!(n, 2);
            }
        }
    }

    #[test]
    fn rank_order_matches_the_printed_list() {
        let printed = ["2", "3", "4", "5", "6", "7", "8", "9", "10", "J", "Q", "K", "A", "BJ", "RJ"];
        for (i, sym) in printed.iter().enumerate() {
            let r = Rank::from_symbol(sym).unwrap();
            assert_eq!(r.ordinal() as usize, i);
        }
        assert!(Rank::BlackJoker > Rank::Ace && Rank::RedJoker > Rank::BlackJoker);
    }

    #[test]
    fn deal_is_deterministic_and_partitions_the_deck() {
        let deck = build_deck();
        let a = deal(&deck, 7).unwrap();
        let b = deal(&deck, 7).unwrap();
        assert_eq!(a, b);
        let mut all: Vec<Card> = a.iter().flatten().copied().collect();
        assert!(a.iter().all(|h| h.len() == 27));
        all.sort();
        let mut sorted_deck = deck.clone();
        sorted_deck.sort();
        assert_eq!(all, sorted_deck);
    }

    #[test]
    fn different_seeds_give_different_deals() {
        let deck = build_deck();
        let base = deal(&deck, 7).unwrap();
        let differing = (8..108).filter(|&s| deal(&deck, s).unwrap() != base).count();
        assert!(differing >= 99, "only {differing} of 100 seeds differ");
    }

    #[test]
    fn wrong_deck_size_is_rejected() {
        let deck = build_deck();
        assert!(matches!(deal(&deck[..100], 1), Err(GameError::InvalidInput(_))));
    }

    #[test]
    fn wildcard_identity() {
        let jack = Level::new(Rank::Jack).unwrap();
        let two = Level::new(Rank::Two).unwrap();
        assert!(is_wildcard(card("H J#0"), jack));
        assert!(is_wildcard(card("H J#1"), jack));
        assert!(!is_wildcard(card("S J#0"), jack));
        assert!(!is_wildcard(card("H J#0"), two));
        for level in Rank::SUITED {
            let level = Level::new(level).unwrap();
            assert_eq!(build_deck().into_iter().filter(|&c| is_wildcard(c, level)).count(), 2);
        }
    }

    #[test]
    fn card_text_round_trips() {
        for c in build_deck() {
            assert_eq!(c.to_string().parse::<Card>().unwrap(), c);
        }
        assert_eq!(card("H J#1").to_string(), "H J#1");
        assert_eq!(card("RJ#0").rank(), Rank::RedJoker);
        assert!("X 3#0".parse::<Card>().is_err());
        assert!("H BJ#0".parse::<Card>().is_err());
        assert!("S9".parse::<Face>().is_ok());
        assert!("SBJ".parse::<Face>().is_err());
    }

    #[test]
    fn levels_exclude_jokers() {
        assert!(Level::new(Rank::RedJoker).is_err());
        assert_eq!("J".parse::<Level>().unwrap().rank(), Rank::Jack);
    }

    #[test]
    fn display_order_groups_by_suit() {
        let mut hand = vec![card("S 2#0"), card("C A#1"), card("D 4#0"), card("BJ#0"), card("C 3#0"), card("D 2#0")];
        hand.sort();
        assert_eq!(format_cards(&hand), "D 2#0,D 4#0,C 3#0,C A#1,S 2#0,BJ#0");
    }
}
