//! The .mel line format, one event per line:
//!
//! ```text
//! note <PITCH> <OCTAVE> <NUM>/<DEN>
//! rest <NUM>/<DEN>
//! chord <PITCH>/<OCT>[,<PITCH>/<OCT>...] <NUM>/<DEN>
//! ```
//!
//! `#` starts a comment when it begins a token; a `#` glued to a pitch
//! letter (C#) is a sharp, not a comment.

use super::{Duration, MelodyEvent, Pitch, PitchClass};
use crate::error::{Error, Result};

pub fn parse_mel_text(input: &str) -> Result<Vec<MelodyEvent>> {
    let mut events = Vec::new();
    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw);
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let position = events.len();
        let event = match tokens[0].to_ascii_lowercase().as_str() {
            "note" => parse_note(&tokens, position, line_no)?,
            "rest" => parse_rest(&tokens, position, line_no)?,
            "chord" => parse_chord(&tokens, position, line_no)?,
            other => {
                return Err(Error::parse(
                    line_no,
                    format!("unknown event kind '{other}'"),
                ))
            }
        };
        events.push(event);
    }
    Ok(events)
}

/// Serialize events back to .mel text; parse(write(events)) == events
/// up to recomputed positions.
pub fn write_mel(events: &[MelodyEvent]) -> String {
    let mut out = String::new();
    for ev in events {
        match ev.pitches.as_slice() {
            [] => out.push_str(&format!("rest {}\n", ev.duration)),
            [p] => out.push_str(&format!("note {} {} {}\n", p.class, p.octave, ev.duration)),
            pitches => {
                let list: Vec<String> = pitches
                    .iter()
                    .map(|p| format!("{}/{}", p.class, p.octave))
                    .collect();
                out.push_str(&format!("chord {} {}\n", list.join(","), ev.duration));
            }
        }
    }
    out
}

/// Cut the line at the first `#` that starts a token, i.e. one at column 0
/// or preceded by whitespace.
pub(super) fn strip_comment(line: &str) -> &str {
    let mut prev_is_space = true;
    for (i, ch) in line.char_indices() {
        if ch == '#' && prev_is_space {
            return &line[..i];
        }
        prev_is_space = ch.is_whitespace();
    }
    line
}

fn parse_note(tokens: &[&str], position: usize, line_no: usize) -> Result<MelodyEvent> {
    if tokens.len() != 4 {
        return Err(Error::parse(
            line_no,
            format!("note expects 3 fields, got {}", tokens.len() - 1),
        ));
    }
    let class = parse_pitch_class(tokens[1], line_no)?;
    let octave = parse_octave(tokens[2], line_no)?;
    let duration = parse_duration(tokens[3], line_no)?;
    let pitch = Pitch::new(class, octave).map_err(|e| Error::parse(line_no, e.to_string()))?;
    Ok(MelodyEvent::note(pitch, duration, position))
}

fn parse_rest(tokens: &[&str], position: usize, line_no: usize) -> Result<MelodyEvent> {
    if tokens.len() != 2 {
        return Err(Error::parse(
            line_no,
            format!("rest expects 1 field, got {}", tokens.len() - 1),
        ));
    }
    let duration = parse_duration(tokens[1], line_no)?;
    Ok(MelodyEvent::rest(duration, position))
}

fn parse_chord(tokens: &[&str], position: usize, line_no: usize) -> Result<MelodyEvent> {
    if tokens.len() != 3 {
        return Err(Error::parse(
            line_no,
            format!("chord expects 2 fields, got {}", tokens.len() - 1),
        ));
    }
    let mut pitches = Vec::new();
    for part in tokens[1].split(',') {
        let (name, oct) = part.split_once('/').ok_or_else(|| {
            Error::parse(line_no, format!("chord pitch '{part}' missing '/octave'"))
        })?;
        let class = parse_pitch_class(name, line_no)?;
        let octave = parse_octave(oct, line_no)?;
        pitches
            .push(Pitch::new(class, octave).map_err(|e| Error::parse(line_no, e.to_string()))?);
    }
    let duration = parse_duration(tokens[2], line_no)?;
    MelodyEvent::chord(pitches, duration, position).map_err(|e| Error::parse(line_no, e.to_string()))
}

fn parse_pitch_class(token: &str, line_no: usize) -> Result<PitchClass> {
    PitchClass::parse(token)
        .ok_or_else(|| Error::parse(line_no, format!("unknown pitch name '{token}'")))
}

fn parse_octave(token: &str, line_no: usize) -> Result<u8> {
    token
        .parse::<u8>()
        .ok()
        .filter(|o| *o <= 9)
        .ok_or_else(|| Error::parse(line_no, format!("octave '{token}' not in 0-9")))
}

fn parse_duration(token: &str, line_no: usize) -> Result<Duration> {
    let (num, den) = token
        .split_once('/')
        .ok_or_else(|| Error::parse(line_no, format!("duration '{token}' not NUM/DEN")))?;
    let num: u32 = num
        .parse()
        .map_err(|_| Error::parse(line_no, format!("bad duration numerator '{num}'")))?;
    let den: u32 = den
        .parse()
        .map_err(|_| Error::parse(line_no, format!("bad duration denominator '{den}'")))?;
    Duration::new(num, den).map_err(|e| Error::parse(line_no, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::score::EventKind;

    #[test]
    fn single_note_line() {
        let events = parse_mel_text("note C 4 1/4").unwrap();
        assert_eq!(events.len(), 1);
        let ev = &events[0];
        assert_eq!(ev.kind(), EventKind::Note);
        assert_eq!(ev.pitches[0].class, PitchClass::C);
        assert_eq!(ev.pitches[0].octave, 4);
        assert_eq!(ev.duration.to_string(), "1/4");
        assert_eq!(ev.position, 0);
    }

    #[test]
    fn chord_line_sorts_pitches() {
        let events = parse_mel_text("chord G/4,C/4,E/4 1/2").unwrap();
        assert_eq!(events[0].kind(), EventKind::Chord);
        let names: Vec<String> = events[0].pitches.iter().map(|p| p.to_string()).collect();
        assert_eq!(names, ["C4", "E4", "G4"]);
    }

    #[test]
    fn comments_blanks_and_sharps() {
        let text = "\
# leading comment
note C# 4 1/8   # trailing comment

rest 1/8
";
        let events = parse_mel_text(text).unwrap();
        assert_eq!(events.len(), 2);
        assert_eq!(events[0].pitches[0].class, PitchClass::Cs);
        assert_eq!(events[1].kind(), EventKind::Rest);
        assert_eq!(events[1].position, 1);
    }

    #[test]
    fn flat_names_accepted() {
        let events = parse_mel_text("note Eb 3 1/4").unwrap();
        assert_eq!(events[0].pitches[0].class, PitchClass::Ds);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_mel_text("note C 4 1/4\nnote H 4 1/4").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = parse_mel_text("rest 0/4").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
        assert!(parse_mel_text("bogus 1/4").is_err());
        assert!(parse_mel_text("note C 4").is_err());
        assert!(parse_mel_text("note C 12 1/4").is_err());
        assert!(parse_mel_text("chord C/4 1/2").is_err());
    }

    #[test]
    fn round_trip_preserves_events() {
        let text = "\
note C 4 1/4
note D 4 1/4
chord C/4,E/4,G/4 1/2
rest 1/8
note G 5 3/8
";
        let events = parse_mel_text(text).unwrap();
        let again = parse_mel_text(&write_mel(&events)).unwrap();
        assert_eq!(events, again);
    }
}
