//! Plays as text, one move per line: `side copy_index tag payload`.
//!
//! * `side` is `O` or `P`.
//! * `copy_index` is the innermost copy on the move's path, or `-`.
//! * `tag` is the path (`L`, `R`, `#k`) joined by `.`, then `:` and the
//!   base, one of `?`, `*` or `!` for an answer.
//! * `payload` is the answer word over `0`, `1`, `_`, or `-` when empty.

use std::fmt::Write as _;

use pargames_core::games::{Base, Game, Side, Step, Word};
use pargames_core::{Move, Play};

use crate::Error;

pub fn format_move(game: &Game, m: &Move) -> String {
    let side = match game.side_of(m) {
        Some(Side::Opponent) => "O",
        Some(Side::Player) => "P",
        None => "?",
    };
    let copy = m
        .copy_index()
        .map_or_else(|| "-".to_string(), |i| i.to_string());
    let path: Vec<String> = m
        .path
        .iter()
        .map(|s| match s {
            Step::Left => "L".to_string(),
            Step::Right => "R".to_string(),
            Step::Copy(i) => format!("#{i}"),
        })
        .collect();
    let (base, payload) = match &m.base {
        Base::Question => ('?', "-".to_string()),
        Base::Star => ('*', "-".to_string()),
        Base::Answer(w) if w.is_empty() => ('!', "-".to_string()),
        Base::Answer(w) => ('!', w.to_string()),
    };
    format!("{side} {copy} {}:{base} {payload}", path.join("."))
}

pub fn format_play(game: &Game, play: &[Move]) -> String {
    let mut out = String::new();
    for m in play {
        let _ = writeln!(out, "{}", format_move(game, m));
    }
    out
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_move(line: usize, text: &str) -> Result<Move, Error> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    let [_, _, tag, payload] = fields.as_slice() else {
        return Err(parse_error(line, "expected `side copy_index tag payload`"));
    };
    let (path, base) = tag
        .rsplit_once(':')
        .ok_or_else(|| parse_error(line, "tag without `:`"))?;
    let mut steps = Vec::new();
    for s in path.split('.').filter(|s| !s.is_empty()) {
        steps.push(match s {
            "L" => Step::Left,
            "R" => Step::Right,
            _ => Step::Copy(
                s.strip_prefix('#')
                    .and_then(|k| k.parse().ok())
                    .ok_or_else(|| parse_error(line, format!("bad path step `{s}`")))?,
            ),
        });
    }
    let base = match (base, *payload) {
        ("?", "-") => Base::Question,
        ("*", "-") => Base::Star,
        ("!", "-") => Base::Answer(Word(Vec::new())),
        ("!", w) => Base::Answer(
            Word::parse(w).ok_or_else(|| parse_error(line, format!("bad word `{w}`")))?,
        ),
        _ => {
            return Err(parse_error(
                line,
                format!("bad base `{base}` with payload `{payload}`"),
            ))
        }
    };
    Ok(Move { path: steps, base })
}

/// Reads a play back; the side and copy columns are checked against
/// `game`.
pub fn parse_play(game: &Game, text: &str) -> Result<Play, Error> {
    let mut play = Vec::new();
    for (k, line) in text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
    {
        let m = parse_move(k + 1, line)?;
        if format_move(game, &m) != line.split_whitespace().collect::<Vec<_>>().join(" ") {
            return Err(parse_error(
                k + 1,
                "side or copy index disagrees with the move",
            ));
        }
        play.push(m);
    }
    Ok(play)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lines_and_round_trip() {
        let g: Game = "bang(2, str(2) -o bool) -o tstr(3)".parse().unwrap();
        let play = vec![
            Move::question().right(),
            Move::question().right().copy(1).left(),
            Move::question().left().copy(1).left(),
            Move::answer(Word::parse("01").unwrap())
                .left()
                .copy(1)
                .left(),
            Move::bit(true).right().copy(1).left(),
            Move::answer(Word::parse("1_0").unwrap()).right(),
        ];
        assert!(g.legal(0, &play));
        let text = format_play(&g, &play);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "O - R:? -");
        assert_eq!(lines[1], "P 1 L.#1.R:? -");
        assert_eq!(lines[3], "P 1 L.#1.L:! 01");
        assert_eq!(lines[4], "O 1 L.#1.R:! 1");
        assert_eq!(lines[5], "P - R:! 1_0");
        assert_eq!(parse_play(&g, &text).unwrap(), play);
    }

    #[test]
    fn rejects_inconsistent_lines() {
        let g: Game = "bool".parse().unwrap();
        assert!(parse_play(&g, "P - :? -").is_err());
        assert!(parse_play(&g, "O - :? -\nP - :! 2").is_err());
        assert_eq!(parse_play(&g, "O - :? -\nP - :! 1").unwrap().len(), 2);
    }
}
