//! Score ingestion: melody event types and parsers for the supported
//! input formats (.mel text, a MusicXML subset, and generic edge lists).

mod edge_list;
mod mel;
mod musicxml;
mod xml;

pub use edge_list::parse_edge_list;
pub use mel::{parse_mel_text, write_mel};
pub use musicxml::parse_musicxml;

use crate::error::{Error, Result};
use std::fmt;

/// The twelve Western pitch classes, sharp spellings only.
///
/// Flat names are accepted on input and normalized to their sharp
/// equivalent (Db -> C#), so enharmonic spellings map to one value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PitchClass {
    C,
    Cs,
    D,
    Ds,
    E,
    F,
    Fs,
    G,
    Gs,
    A,
    As,
    B,
}

impl PitchClass {
    pub const ALL: [PitchClass; 12] = [
        PitchClass::C,
        PitchClass::Cs,
        PitchClass::D,
        PitchClass::Ds,
        PitchClass::E,
        PitchClass::F,
        PitchClass::Fs,
        PitchClass::G,
        PitchClass::Gs,
        PitchClass::A,
        PitchClass::As,
        PitchClass::B,
    ];

    /// Semitone index, C = 0 .. B = 11.
    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn from_index(index: u8) -> Option<Self> {
        Self::ALL.get(usize::from(index)).copied()
    }

    /// Canonical (sharp) name as used in node labels.
    pub fn name(self) -> &'static str {
        match self {
            PitchClass::C => "C",
            PitchClass::Cs => "C#",
            PitchClass::D => "D",
            PitchClass::Ds => "D#",
            PitchClass::E => "E",
            PitchClass::F => "F",
            PitchClass::Fs => "F#",
            PitchClass::G => "G",
            PitchClass::Gs => "G#",
            PitchClass::A => "A",
            PitchClass::As => "A#",
            PitchClass::B => "B",
        }
    }

    /// Parse a pitch name, case-insensitive, with `#` = sharp and `b` = flat.
    /// Flats normalize to the sharp-equivalent class ("Db" -> C#, "Cb" -> B).
    pub fn parse(name: &str) -> Option<Self> {
        let mut chars = name.chars();
        let letter = chars.next()?.to_ascii_uppercase();
        let base: i8 = match letter {
            'C' => 0,
            'D' => 2,
            'E' => 4,
            'F' => 5,
            'G' => 7,
            'A' => 9,
            'B' => 11,
            _ => return None,
        };
        let offset: i8 = match chars.next() {
            None => 0,
            Some('#') => 1,
            Some('b') | Some('B') => -1,
            Some(_) => return None,
        };
        if chars.next().is_some() {
            return None;
        }
        Self::from_index(((base + offset).rem_euclid(12)) as u8)
    }
}

impl fmt::Display for PitchClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A concrete pitch: class plus octave 0-9.
///
/// Ordering is by (octave, class index), the sort order required for
/// chord pitch lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pitch {
    pub class: PitchClass,
    pub octave: u8,
}

impl Pitch {
    pub fn new(class: PitchClass, octave: u8) -> Result<Self> {
        if octave > 9 {
            return Err(Error::domain(format!("octave {octave} out of range 0-9")));
        }
        Ok(Pitch { class, octave })
    }
}

impl PartialOrd for Pitch {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pitch {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.octave, self.class.index()).cmp(&(other.octave, other.class.index()))
    }
}

impl fmt::Display for Pitch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.class, self.octave)
    }
}

/// Relative duration of an event as an exact fraction of a whole note,
/// stored in lowest terms.
///
/// Plain and dotted binary values reduce to denominators that are powers
/// of two up to 128; tuplet values (triplet eighth = 1/12) are kept exact,
/// so any reduced denominator up to 128 is accepted. The total value must
/// lie in (0, 8].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Duration(num_rational::Ratio<u32>);

impl Duration {
    pub const MAX_DENOMINATOR: u32 = 128;
    pub const MAX_WHOLE_NOTES: u32 = 8;

    pub fn new(numerator: u32, denominator: u32) -> Result<Self> {
        if numerator == 0 {
            return Err(Error::domain("duration must be positive"));
        }
        if denominator == 0 {
            return Err(Error::domain("duration denominator must be positive"));
        }
        let ratio = num_rational::Ratio::new(numerator, denominator);
        if *ratio.denom() > Self::MAX_DENOMINATOR {
            return Err(Error::domain(format!(
                "duration {numerator}/{denominator} finer than 1/{}",
                Self::MAX_DENOMINATOR
            )));
        }
        if ratio > num_rational::Ratio::from_integer(Self::MAX_WHOLE_NOTES) {
            return Err(Error::domain(format!(
                "duration {numerator}/{denominator} exceeds {} whole notes",
                Self::MAX_WHOLE_NOTES
            )));
        }
        Ok(Duration(ratio))
    }

    pub fn numerator(self) -> u32 {
        *self.0.numer()
    }

    pub fn denominator(self) -> u32 {
        *self.0.denom()
    }
}

impl fmt::Display for Duration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Note,
    Rest,
    Chord,
}

/// One element of a melody: a pitched note, a rest, or a chord, with its
/// duration and 0-based position in the score sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MelodyEvent {
    /// Empty for Rest, exactly one for Note, two or more (sorted, distinct)
    /// for Chord.
    pub pitches: Vec<Pitch>,
    pub duration: Duration,
    pub position: usize,
}

impl MelodyEvent {
    pub fn note(pitch: Pitch, duration: Duration, position: usize) -> Self {
        MelodyEvent {
            pitches: vec![pitch],
            duration,
            position,
        }
    }

    pub fn rest(duration: Duration, position: usize) -> Self {
        MelodyEvent {
            pitches: Vec::new(),
            duration,
            position,
        }
    }

    /// Build a chord event. Pitches are sorted ascending by (octave, class);
    /// duplicates are rejected rather than silently merged.
    pub fn chord(mut pitches: Vec<Pitch>, duration: Duration, position: usize) -> Result<Self> {
        if pitches.len() < 2 {
            return Err(Error::domain("chord needs at least 2 pitches"));
        }
        pitches.sort();
        if pitches.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("duplicate pitch in chord"));
        }
        Ok(MelodyEvent {
            pitches,
            duration,
            position,
        })
    }

    pub fn kind(&self) -> EventKind {
        match self.pitches.len() {
            0 => EventKind::Rest,
            1 => EventKind::Note,
            _ => EventKind::Chord,
        }
    }
}

/// Result of parsing one score: the event list plus any non-fatal warnings
/// (skipped grace notes, ignored extra parts).
#[derive(Debug, Clone, Default)]
pub struct ParseOutput {
    pub events: Vec<MelodyEvent>,
    pub warnings: Vec<String>,
}
