use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::Game;
use crate::arena::{Arena, ArenaError, Player, RawGame, VertexRecord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {col}: expected {expected}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
    },
    #[error("line {line}, column {col}: owner {owner} is neither 0 nor 1")]
    OwnerOutOfRange { line: usize, col: usize, owner: u64 },
    #[error("vertex {0} is declared more than once")]
    DuplicateId(u64),
    #[error("vertex {from} has an edge to undeclared vertex {to}")]
    DanglingEdge { from: u64, to: u64 },
    #[error("vertex {0} has no successor")]
    DeadEnd(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(u64),
    Word(String),
    Name(String),
    Comma,
    Semi,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn syntax(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            col: self.col,
            expected: expected.to_string(),
        }
    }

    /// Next token with its starting position, or `None` at end of input.
    fn next(&mut self) -> Result<Option<(Tok, usize, usize)>, ParseError> {
        while self.chars.peek().is_some_and(|c| c.is_whitespace()) {
            self.bump();
        }
        let (line, col) = (self.line, self.col);
        let Some(&c) = self.chars.peek() else {
            return Ok(None);
        };
        let tok = match c {
            ',' => {
                self.bump();
                Tok::Comma
            }
            ';' => {
                self.bump();
                Tok::Semi
            }
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        Some('"') => break,
                        Some('\n') | None => return Err(self.syntax("closing quote")),
                        Some(ch) => s.push(ch),
                    }
                }
                Tok::Name(s)
            }
            '0'..='9' => {
                let mut value: u64 = 0;
                while let Some(d) = self.chars.peek().and_then(|c| c.to_digit(10)) {
                    value = value
                        .checked_mul(10)
                        .and_then(|v| v.checked_add(d as u64))
                        .ok_or_else(|| self.syntax("a number that fits in 64 bits"))?;
                    self.bump();
                }
                Tok::Num(value)
            }
            c if c.is_ascii_alphabetic() => {
                let mut s = String::new();
                while self.chars.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
                    s.push(self.bump().unwrap());
                }
                Tok::Word(s)
            }
            _ => return Err(self.syntax("a number, ',', ';', a quoted name or 'parity'")),
        };
        Ok(Some((tok, line, col)))
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    peeked: Option<(Tok, usize, usize)>,
}

impl Parser<'_> {
    fn peek(&mut self) -> Result<Option<&Tok>, ParseError> {
        if self.peeked.is_none() {
            self.peeked = self.lex.next()?;
        }
        Ok(self.peeked.as_ref().map(|(t, _, _)| t))
    }

    fn take(&mut self, expected: &str) -> Result<(Tok, usize, usize), ParseError> {
        self.peek()?;
        self.peeked.take().ok_or_else(|| self.lex.syntax(expected))
    }

    fn error_at(line: usize, col: usize, expected: &str) -> ParseError {
        ParseError::Syntax {
            line,
            col,
            expected: expected.to_string(),
        }
    }

    fn number(&mut self, expected: &str) -> Result<(u64, usize, usize), ParseError> {
        match self.take(expected)? {
            (Tok::Num(n), l, c) => Ok((n, l, c)),
            (_, l, c) => Err(Self::error_at(l, c, expected)),
        }
    }

    fn semi(&mut self) -> Result<(), ParseError> {
        match self.take("';'")? {
            (Tok::Semi, _, _) => Ok(()),
            (_, l, c) => Err(Self::error_at(l, c, "';'")),
        }
    }
}

struct Record {
    id: u64,
    colour: u32,
    owner: Player,
    succ: Vec<u64>,
    name: Option<String>,
}

/// Parses a PGSolver game. Vertex ids may be sparse; they are renumbered
/// densely in the order their records appear, and the original ids are kept
/// in the returned [`Game`]. Comments are not accepted.
pub fn parse_pgsolver(text: &str) -> Result<Game, ParseError> {
    let mut p = Parser {
        lex: Lexer::new(text),
        peeked: None,
    };
    if let Some(Tok::Word(w)) = p.peek()? {
        if w != "parity" {
            let (_, l, c) = p.take("")?;
            return Err(Parser::error_at(l, c, "'parity' or a vertex record"));
        }
        p.take("")?;
        p.number("the largest vertex id")?;
        p.semi()?;
    }

    let mut records = Vec::new();
    while p.peek()?.is_some() {
        let (id, _, _) = p.number("a vertex id")?;
        let (colour, l, c) = p.number("a priority")?;
        let colour =
            u32::try_from(colour).map_err(|_| Parser::error_at(l, c, "a priority below 2^32"))?;
        let (owner, l, c) = p.number("an owner (0 or 1)")?;
        let owner = match owner {
            0 => Player::Even,
            1 => Player::Odd,
            other => {
                return Err(ParseError::OwnerOutOfRange {
                    line: l,
                    col: c,
                    owner: other,
                })
            }
        };
        let mut succ = vec![p.number("a successor id")?.0];
        let mut name = None;
        loop {
            match p.take("',', a name or ';'")? {
                (Tok::Comma, _, _) => succ.push(p.number("a successor id")?.0),
                (Tok::Name(s), _, _) => {
                    name = Some(s);
                    p.semi()?;
                    break;
                }
                (Tok::Semi, _, _) => break,
                (_, l, c) => return Err(Parser::error_at(l, c, "',', a name or ';'")),
            }
        }
        records.push(Record {
            id,
            colour,
            owner,
            succ,
            name,
        });
    }

    let mut dense: HashMap<u64, usize> = HashMap::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        if dense.insert(r.id, i).is_some() {
            return Err(ParseError::DuplicateId(r.id));
        }
    }
    let mut raw = RawGame::new();
    for (i, r) in records.iter().enumerate() {
        raw.vertices.push(VertexRecord {
            id: i,
            owner: r.owner,
            colour: r.colour,
            name: r.name.clone(),
        });
        for &t in &r.succ {
            let to = *dense
                .get(&t)
                .ok_or(ParseError::DanglingEdge { from: r.id, to: t })?;
            raw.edges.push((i, to));
        }
    }
    let ids: Vec<u64> = records.iter().map(|r| r.id).collect();
    let arena = Arena::validate(raw).map_err(|e| match e {
        ArenaError::DeadEnd(v) => ParseError::DeadEnd(ids[v]),
        ArenaError::DuplicateId(v) => ParseError::DuplicateId(ids[v]),
        ArenaError::DanglingEdge { from, to } => ParseError::DanglingEdge {
            from: ids[from],
            to: to as u64,
        },
        ArenaError::SparseId { .. } => unreachable!("parser assigns dense ids"),
    })?;
    Ok(Game { arena, ids })
}

/// Canonical PGSolver text: header, records by ascending original id,
/// successors ascending, names quoted when present.
pub fn emit_pgsolver(game: &Game) -> String {
    let arena = &game.arena;
    let mut order: Vec<usize> = (0..arena.num_vertices()).collect();
    order.sort_by_key(|&v| game.ids[v]);
    let mut out = String::new();
    let _ = writeln!(out, "parity {};", game.max_original_id());
    for v in order {
        let rec = arena.vertex(v);
        let mut succ: Vec<u64> = arena.successors(v).iter().map(|&s| game.ids[s]).collect();
        succ.sort_unstable();
        let succ: Vec<String> = succ.iter().map(u64::to_string).collect();
        let _ = write!(
            out,
            "{} {} {} {}",
            game.ids[v],
            rec.colour,
            rec.owner.index(),
            succ.join(",")
        );
        if let Some(name) = &rec.name {
            let _ = write!(out, " \"{name}\"");
        }
        out.push_str(";\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_two_vertex_file() {
        let g = parse_pgsolver("parity 1; 0 2 0 1; 1 3 1 0;").unwrap();
        let a = &g.arena;
        assert_eq!(a.num_vertices(), 2);
        assert_eq!((a.owner(0), a.colour(0)), (Player::Even, 2));
        assert_eq!((a.owner(1), a.colour(1)), (Player::Odd, 3));
        assert_eq!(a.successors(0), &[1]);
        assert_eq!(a.successors(1), &[0]);
    }

    #[test]
    fn trailing_name() {
        let g = parse_pgsolver("0 5 1 0,1 \"start\";\n1 2 0 0;").unwrap();
        assert_eq!(g.arena.vertex(0).name.as_deref(), Some("start"));
        assert_eq!(g.arena.successors(0), &[0, 1]);
    }

    #[test]
    fn whitespace_between_tokens() {
        let g = parse_pgsolver("parity 1 ;\n0  2 0 1 , 0 ;\n 1\t3 1 0;\n").unwrap();
        assert_eq!(g.arena.successors(0), &[0, 1]);
    }

    #[test]
    fn sparse_ids_are_remapped_in_record_order() {
        let g = parse_pgsolver("parity 9; 9 1 1 4; 4 2 0 9,4;").unwrap();
        assert_eq!(g.ids, vec![9, 4]);
        assert_eq!(g.arena.successors(0), &[1]);
        assert_eq!(g.arena.successors(1), &[0, 1]);
        assert_eq!(emit_pgsolver(&g), "parity 9;\n4 2 0 4,9;\n9 1 1 4;\n");
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_pgsolver("0 2 0 1;\n1 3 1"),
            Err(ParseError::Syntax { line: 2, .. })
        ));
        assert_eq!(
            parse_pgsolver("0 2 2 0;"),
            Err(ParseError::OwnerOutOfRange {
                line: 1,
                col: 5,
                owner: 2
            })
        );
        assert_eq!(
            parse_pgsolver("0 2 0 0; 0 3 1 0;"),
            Err(ParseError::DuplicateId(0))
        );
        assert_eq!(
            parse_pgsolver("0 2 0 7;"),
            Err(ParseError::DanglingEdge { from: 0, to: 7 })
        );
        assert!(matches!(
            parse_pgsolver("# comment\n0 2 0 0;"),
            Err(ParseError::Syntax {
                line: 1,
                col: 1,
                ..
            })
        ));
        assert!(matches!(
            parse_pgsolver("start 0;"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_pgsolver("0 2 0 ;"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_pgsolver("0 2 0 0 \"open;"),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn empty_name_omission() {
        let g = parse_pgsolver("0 2 0 0;").unwrap();
        assert_eq!(emit_pgsolver(&g), "parity 0;\n0 2 0 0;\n");
    }

    #[test]
    fn emit_is_canonical() {
        let text = "parity 2; 2 1 1 0 ; 0 4 0 2,1,2 \"a b\"; 1 0 1 1;";
        let g = parse_pgsolver(text).unwrap();
        let canon = emit_pgsolver(&g);
        assert_eq!(canon, "parity 2;\n0 4 0 1,2 \"a b\";\n1 0 1 1;\n2 1 1 0;\n");
        let again = parse_pgsolver(&canon).unwrap();
        assert_eq!(emit_pgsolver(&again), canon);
    }
}
