//! MusicXML (score-partwise) ingestion. Honored elements: part, measure,
//! note, pitch, step, alter, octave, rest, chord, type, dot. Everything
//! else is skipped. Only the first part is read; grace notes are dropped
//! with a warning because they carry no duration.

use super::xml::{XmlEvent, XmlReader};
use super::{Duration, MelodyEvent, ParseOutput, Pitch, PitchClass};
use crate::error::{Error, Result};

pub fn parse_musicxml(input: &str) -> Result<ParseOutput> {
    let mut reader = XmlReader::new(input);
    let mut stack: Vec<String> = Vec::new();
    let mut out = ParseOutput::default();
    let mut saw_root = false;
    let mut parts_seen = 0usize;
    // stack depth below which a skipped (non-first) part ends
    let mut skip_below: Option<usize> = None;
    let mut note: Option<NoteBuilder> = None;

    loop {
        let line = reader.line();
        match reader.next()? {
            XmlEvent::Eof => break,
            XmlEvent::Start(name) => {
                if !saw_root {
                    if name != "score-partwise" {
                        return Err(Error::parse(
                            line,
                            format!("expected score-partwise root, found <{name}>"),
                        ));
                    }
                    saw_root = true;
                }
                stack.push(name.clone());
                if skip_below.is_some() {
                    continue;
                }
                match name.as_str() {
                    "part" => {
                        parts_seen += 1;
                        if parts_seen == 2 {
                            out.warnings
                                .push("multiple parts; only the first is read".to_string());
                        }
                        if parts_seen > 1 {
                            skip_below = Some(stack.len());
                        }
                    }
                    "note" if in_first_part(&stack, parts_seen) => {
                        if note.is_some() {
                            return Err(Error::parse(line, "nested <note> elements"));
                        }
                        note = Some(NoteBuilder::new(line));
                    }
                    "rest" => set_flag(&mut note, |n| n.is_rest = true),
                    "chord" => set_flag(&mut note, |n| n.is_chord_member = true),
                    "grace" => set_flag(&mut note, |n| n.is_grace = true),
                    "dot" => set_flag(&mut note, |n| n.dots += 1),
                    _ => {}
                }
            }
            XmlEvent::End(name) => {
                match stack.pop() {
                    Some(top) if top == name => {}
                    _ => return Err(Error::parse(line, format!("mismatched </{name}>"))),
                }
                if let Some(depth) = skip_below {
                    if stack.len() < depth {
                        skip_below = None;
                    }
                    continue;
                }
                if name == "note" {
                    let builder = note
                        .take()
                        .ok_or_else(|| Error::parse(line, "stray </note>"))?;
                    builder.finish(&mut out)?;
                }
            }
            XmlEvent::Text(text) => {
                if skip_below.is_some() {
                    continue;
                }
                let Some(builder) = note.as_mut() else {
                    continue;
                };
                // only text directly inside an honored leaf element counts
                match stack.last().map(String::as_str) {
                    Some("step") if inside(&stack, "pitch") => {
                        builder.step = Some((text.trim().to_string(), line));
                    }
                    Some("alter") if inside(&stack, "pitch") => {
                        builder.alter = Some((text.trim().to_string(), line));
                    }
                    Some("octave") if inside(&stack, "pitch") => {
                        builder.octave = Some((text.trim().to_string(), line));
                    }
                    Some("type") => {
                        builder.note_type = Some((text.trim().to_string(), line));
                    }
                    _ => {}
                }
            }
        }
    }
    if !saw_root {
        return Err(Error::parse(reader.line(), "no score-partwise root element"));
    }
    if !stack.is_empty() {
        return Err(Error::parse(
            reader.line(),
            format!("unclosed <{}>", stack.last().unwrap()),
        ));
    }
    Ok(out)
}

fn in_first_part(stack: &[String], parts_seen: usize) -> bool {
    parts_seen == 1 && stack.iter().any(|s| s == "part")
}

fn inside(stack: &[String], name: &str) -> bool {
    stack.iter().any(|s| s == name)
}

fn set_flag(note: &mut Option<NoteBuilder>, f: impl FnOnce(&mut NoteBuilder)) {
    if let Some(builder) = note.as_mut() {
        f(builder);
    }
}

struct NoteBuilder {
    line: usize,
    is_rest: bool,
    is_chord_member: bool,
    is_grace: bool,
    dots: u32,
    step: Option<(String, usize)>,
    alter: Option<(String, usize)>,
    octave: Option<(String, usize)>,
    note_type: Option<(String, usize)>,
}

impl NoteBuilder {
    fn new(line: usize) -> Self {
        NoteBuilder {
            line,
            is_rest: false,
            is_chord_member: false,
            is_grace: false,
            dots: 0,
            step: None,
            alter: None,
            octave: None,
            note_type: None,
        }
    }

    fn finish(self, out: &mut ParseOutput) -> Result<()> {
        if self.is_grace {
            out.warnings
                .push(format!("grace note at line {} skipped", self.line));
            return Ok(());
        }
        let duration = self.duration()?;
        let position = out.events.len();
        if self.is_rest {
            if self.is_chord_member {
                return Err(Error::parse(self.line, "<chord/> on a rest"));
            }
            out.events.push(MelodyEvent::rest(duration, position));
            return Ok(());
        }
        let pitch = self.pitch()?;
        if self.is_chord_member {
            let prev = out.events.pop().ok_or_else(|| {
                Error::parse(self.line, "<chord/> with no preceding note")
            })?;
            if prev.pitches.is_empty() {
                return Err(Error::parse(self.line, "<chord/> after a rest"));
            }
            let mut pitches = prev.pitches;
            pitches.push(pitch);
            let merged = MelodyEvent::chord(pitches, prev.duration, prev.position)
                .map_err(|e| Error::parse(self.line, e.to_string()))?;
            out.events.push(merged);
        } else {
            out.events.push(MelodyEvent::note(pitch, duration, position));
        }
        Ok(())
    }

    fn duration(&self) -> Result<Duration> {
        let (name, line) = self
            .note_type
            .as_ref()
            .ok_or_else(|| Error::parse(self.line, "note missing <type>"))?;
        let (num, den): (u32, u32) = match name.as_str() {
            "maxima" => (8, 1),
            "long" => (4, 1),
            "breve" => (2, 1),
            "whole" => (1, 1),
            "half" => (1, 2),
            "quarter" => (1, 4),
            "eighth" => (1, 8),
            "16th" => (1, 16),
            "32nd" => (1, 32),
            "64th" => (1, 64),
            "128th" => (1, 128),
            other => {
                return Err(Error::parse(
                    *line,
                    format!("unsupported <type> value '{other}'"),
                ))
            }
        };
        // each dot extends by half the previous extension:
        // base * (2^(d+1) - 1) / 2^d
        let factor = 1u32
            .checked_shl(self.dots + 1)
            .and_then(|x| x.checked_sub(1))
            .ok_or_else(|| Error::parse(*line, "too many <dot> elements"))?;
        let scale = 1u32
            .checked_shl(self.dots)
            .ok_or_else(|| Error::parse(*line, "too many <dot> elements"))?;
        let num = num
            .checked_mul(factor)
            .ok_or_else(|| Error::parse(*line, "too many <dot> elements"))?;
        let den = den
            .checked_mul(scale)
            .ok_or_else(|| Error::parse(*line, "too many <dot> elements"))?;
        Duration::new(num, den).map_err(|e| Error::parse(*line, e.to_string()))
    }

    fn pitch(&self) -> Result<Pitch> {
        let (step, step_line) = self
            .step
            .as_ref()
            .ok_or_else(|| Error::parse(self.line, "missing <pitch> on a non-rest note"))?;
        let (octave, octave_line) = self
            .octave
            .as_ref()
            .ok_or_else(|| Error::parse(self.line, "note missing <octave>"))?;
        let base = PitchClass::parse(step)
            .ok_or_else(|| Error::parse(*step_line, format!("bad <step> value '{step}'")))?;
        let octave: i32 = octave
            .parse()
            .map_err(|_| Error::parse(*octave_line, format!("bad <octave> value '{octave}'")))?;
        let alter: i32 = match self.alter.as_ref() {
            None => 0,
            Some((text, line)) => text
                .parse()
                .map_err(|_| Error::parse(*line, format!("bad <alter> value '{text}'")))?,
        };
        // apply alter on the absolute semitone scale so B#4 lands on C5
        let semitone = octave * 12 + i32::from(base.index()) + alter;
        if !(0..=119).contains(&semitone) {
            return Err(Error::parse(
                self.line,
                format!("pitch {step}{octave} alter {alter} out of octave range 0-9"),
            ));
        }
        let class = PitchClass::from_index((semitone % 12) as u8).unwrap();
        Pitch::new(class, (semitone / 12) as u8).map_err(|e| Error::parse(self.line, e.to_string()))
    }
}
