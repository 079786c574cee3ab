//! Concrete syntax for formulas.
//!
//! ```text
//! formula  := conj ("->" formula)?          right associative, desugars
//! conj     := unary ("&" unary)*
//! unary    := "!" unary | "B_i" unary | "<B_i>" unary | "<>" unary | atom
//! atom     := "true" | "RAT_i" | "play_i(id)"
//!           | "pr_i(" formula ")" (">=" | ">") rational
//!           | "(" formula ")"
//! ```
//!
//! Player indices in the syntax are 1-based. `render` emits canonical text
//! with minimal parentheses; parsing its output reproduces the formula.

use super::{Formula, LogicError};
use crate::game::NormalFormGame;
use crate::ratio::{format_rat, is_probability, Rat};
use num::BigRational;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    LParen,
    RParen,
    Amp,
    Bang,
    Arrow,
    Diamond,
    Lt,
    Gt,
    Ge,
    Slash,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, LogicError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            '&' => {
                toks.push((Tok::Amp, i));
                i += 1;
            }
            '!' => {
                toks.push((Tok::Bang, i));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, i));
                i += 1;
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((Tok::Arrow, i));
                    i += 2;
                } else {
                    return Err(LogicError::Parse {
                        pos: i,
                        msg: "expected `->`".into(),
                    });
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((Tok::Diamond, i));
                    i += 2;
                } else {
                    toks.push((Tok::Lt, i));
                    i += 1;
                }
            }
            '>' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    toks.push((Tok::Ge, i));
                    i += 2;
                } else {
                    toks.push((Tok::Gt, i));
                    i += 1;
                }
            }
            _ if c.is_ascii_digit() => {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                toks.push((Tok::Int(text[start..i].to_string()), start));
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() {
                    let d = bytes[i] as char;
                    if d.is_ascii_alphanumeric() || d == '_' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Ident(text[start..i].to_string()), start));
            }
            _ => {
                return Err(LogicError::Parse {
                    pos: i,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    game: &'a NormalFormGame,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, LogicError> {
        Err(LogicError::Parse {
            pos: self.here(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), LogicError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    /// Splits an identifier of the form `prefix_i` and range-checks the
    /// 1-based player index, returning it 0-based.
    fn player_suffix(&self, ident: &str, prefix: &str) -> Result<Option<usize>, LogicError> {
        let Some(rest) = ident.strip_prefix(prefix) else {
            return Ok(None);
        };
        if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
            return Ok(None);
        }
        let idx: usize = rest
            .parse()
            .map_err(|_| LogicError::Parse {
                pos: self.here(),
                msg: format!("player index `{rest}` too large"),
            })?;
        if idx == 0 || idx > self.game.num_players() {
            return self.fail(format!("player index {idx} out of range"));
        }
        Ok(Some(idx - 1))
    }

    fn formula(&mut self) -> Result<Formula, LogicError> {
        let lhs = self.conj()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Formula, LogicError> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, LogicError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Diamond) => {
                self.pos += 1;
                Ok(Formula::diamond(self.unary()?))
            }
            Some(Tok::Lt) => {
                self.pos += 1;
                let Some(Tok::Ident(name)) = self.bump() else {
                    return self.fail("expected `B_i` inside `<...>`");
                };
                let Some(player) = self.player_suffix(&name, "B_")? else {
                    return self.fail(format!("expected `B_i` inside `<...>`, got `{name}`"));
                };
                self.expect(Tok::Gt, "`>` closing the belief operator")?;
                Ok(Formula::possible(player, self.unary()?))
            }
            Some(Tok::Ident(name)) if name.starts_with("B_") => {
                let name = name.clone();
                if let Some(player) = self.player_suffix(&name, "B_")? {
                    self.pos += 1;
                    return Ok(Formula::believes(player, self.unary()?));
                }
                self.atom()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, LogicError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(name)) => {
                if name == "true" {
                    self.pos += 1;
                    return Ok(Formula::True);
                }
                if let Some(player) = self.player_suffix(&name, "RAT_")? {
                    self.pos += 1;
                    return Ok(Formula::Rat(player));
                }
                if let Some(player) = self.player_suffix(&name, "play_")? {
                    self.pos += 1;
                    self.expect(Tok::LParen, "`(` after play operator")?;
                    let id = match self.bump() {
                        Some(Tok::Ident(s)) | Some(Tok::Int(s)) => s,
                        _ => return self.fail("expected a strategy id"),
                    };
                    if self.game.strategy_index(player, &id).is_err() {
                        return self.fail(format!(
                            "player {} has no strategy `{id}`",
                            player + 1
                        ));
                    }
                    self.expect(Tok::RParen, "`)` after strategy id")?;
                    return Ok(Formula::Play(player, id));
                }
                if let Some(player) = self.player_suffix(&name, "pr_")? {
                    self.pos += 1;
                    self.expect(Tok::LParen, "`(` after probability operator")?;
                    let f = self.formula()?;
                    self.expect(Tok::RParen, "`)` after formula")?;
                    let strict = match self.bump() {
                        Some(Tok::Ge) => false,
                        Some(Tok::Gt) => true,
                        _ => return self.fail("expected `>=` or `>`"),
                    };
                    let bound_pos = self.here();
                    let bound = self.rational()?;
                    if !is_probability(&bound) {
                        return Err(LogicError::Parse {
                            pos: bound_pos,
                            msg: format!(
                                "probability bound {} outside [0,1]",
                                format_rat(&bound)
                            ),
                        });
                    }
                    let boxed = Box::new(f);
                    return Ok(if strict {
                        Formula::ProbGreater(player, boxed, bound)
                    } else {
                        Formula::ProbAtLeast(player, boxed, bound)
                    });
                }
                self.fail(format!("unexpected identifier `{name}`"))
            }
            Some(_) => self.fail("expected a formula"),
            None => self.fail("unexpected end of input"),
        }
    }

    fn rational(&mut self) -> Result<Rat, LogicError> {
        let Some(Tok::Int(numer)) = self.bump() else {
            return self.fail("expected a number");
        };
        let numer = BigRational::from_str(&numer).map_err(|e| LogicError::Parse {
            pos: self.here(),
            msg: e.to_string(),
        })?;
        if self.peek() == Some(&Tok::Slash) {
            self.pos += 1;
            let pos = self.here();
            let Some(Tok::Int(denom)) = self.bump() else {
                return self.fail("expected a denominator");
            };
            let denom = BigRational::from_str(&denom).map_err(|e| LogicError::Parse {
                pos,
                msg: e.to_string(),
            })?;
            if denom == BigRational::from_integer(0.into()) {
                return Err(LogicError::Parse {
                    pos,
                    msg: "zero denominator".into(),
                });
            }
            return Ok(numer / denom);
        }
        Ok(numer)
    }
}

/// Parses a formula, validating player indices and strategy ids against the
/// game as it goes.
pub fn parse(game: &NormalFormGame, text: &str) -> Result<Formula, LogicError> {
    let toks = lex(text)?;
    let mut p = Parser {
        game,
        toks,
        pos: 0,
        end: text.len(),
    };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return p.fail("trailing input after formula");
    }
    Ok(f)
}

// Precedence levels for rendering: 0 = implication surface (never emitted,
// the AST has no implication), 1 = conjunction, 2 = unary, 3 = atom.
fn level(f: &Formula) -> u8 {
    match f {
        Formula::And(..) => 1,
        Formula::Not(_)
        | Formula::Believes(..)
        | Formula::Possible(..)
        | Formula::Diamond(_) => 2,
        _ => 3,
    }
}

fn go(f: &Formula, min: u8, out: &mut String) {
    let wrap = level(f) < min;
    if wrap {
        out.push('(');
    }
    match f {
        Formula::True => out.push_str("true"),
        Formula::Rat(i) => out.push_str(&format!("RAT_{}", i + 1)),
        Formula::Play(i, id) => out.push_str(&format!("play_{}({id})", i + 1)),
        Formula::Not(g) => {
            out.push('!');
            go(g, 2, out);
        }
        Formula::And(a, b) => {
            go(a, 1, out);
            out.push_str(" & ");
            go(b, 2, out);
        }
        Formula::Believes(i, g) => {
            out.push_str(&format!("B_{} ", i + 1));
            go(g, 2, out);
        }
        Formula::Possible(i, g) => {
            out.push_str(&format!("<B_{}> ", i + 1));
            go(g, 2, out);
        }
        Formula::Diamond(g) => {
            out.push_str("<> ");
            go(g, 2, out);
        }
        Formula::ProbAtLeast(i, g, a) => {
            out.push_str(&format!("pr_{}(", i + 1));
            go(g, 0, out);
            out.push_str(&format!(") >= {}", format_rat(a)));
        }
        Formula::ProbGreater(i, g, a) => {
            out.push_str(&format!("pr_{}(", i + 1));
            go(g, 0, out);
            out.push_str(&format!(") > {}", format_rat(a)));
        }
    }
    if wrap {
        out.push(')');
    }
}

/// Canonical text for a formula. Parsing the result reproduces the formula
/// exactly.
pub fn render(f: &Formula) -> String {
    let mut out = String::new();
    go(f, 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;
    use proptest::prelude::*;

    fn g2() -> NormalFormGame {
        NormalFormGame::two_player(
            ["P1", "P2"],
            &["T", "B"],
            &["L", "R"],
            &[&[1, 1], &[1, 0]],
            &[&[1, 0], &[0, 1]],
        )
    }

    #[test]
    fn parses_connectives_with_precedence() {
        let g = g2();
        let f = parse(&g, "B_1 RAT_1 & RAT_2").unwrap();
        assert_eq!(
            f,
            Formula::and(Formula::believes(0, Formula::Rat(0)), Formula::Rat(1))
        );
        let f = parse(&g, "!B_1 true").unwrap();
        assert_eq!(f, Formula::not(Formula::believes(0, Formula::True)));
        let f = parse(&g, "<B_2> play_2(L)").unwrap();
        assert_eq!(f, Formula::possible(1, Formula::Play(1, "L".into())));
        let f = parse(&g, "<> (play_1(T) & true)").unwrap();
        assert_eq!(
            f,
            Formula::diamond(Formula::and(Formula::Play(0, "T".into()), Formula::True))
        );
    }

    #[test]
    fn implication_is_sugar() {
        let g = g2();
        let f = parse(&g, "RAT_1 -> RAT_2").unwrap();
        assert_eq!(
            f,
            Formula::not(Formula::and(Formula::Rat(0), Formula::not(Formula::Rat(1))))
        );
        // Right associative: a -> b -> c = a -> (b -> c).
        let f2 = parse(&g, "RAT_1 -> RAT_2 -> RAT_1").unwrap();
        let expect = Formula::implies(
            Formula::Rat(0),
            Formula::implies(Formula::Rat(1), Formula::Rat(0)),
        );
        assert_eq!(f2, expect);
    }

    #[test]
    fn probability_atoms() {
        let g = g2();
        let f = parse(&g, "pr_1(RAT_2) >= 1/2 & pr_2(true) > 2/3").unwrap();
        assert_eq!(
            f,
            Formula::and(
                Formula::ProbAtLeast(0, Box::new(Formula::Rat(1)), rat(1, 2)),
                Formula::ProbGreater(1, Box::new(Formula::True), rat(2, 3)),
            )
        );
        assert_eq!(render(&f), "pr_1(RAT_2) >= 1/2 & pr_2(true) > 2/3");
    }

    #[test]
    fn rejects_bad_input() {
        let g = g2();
        for (text, needle) in [
            ("RAT_3", "out of range"),
            ("B_0 true", "out of range"),
            ("play_1(X)", "no strategy"),
            ("pr_1(true) >= 3/2", "outside [0,1]"),
            ("pr_1(true) = 1", "unexpected character `=`"),
            ("RAT_1 &", "unexpected end of input"),
            ("(RAT_1", "expected `)`"),
            ("RAT_1 RAT_2", "trailing input"),
            ("pr_1(true) >= 1/0", "zero denominator"),
            ("@", "unexpected character"),
            ("<RAT_1> true", "expected `B_i`"),
        ] {
            let err = parse(&g, text).unwrap_err();
            let msg = err.to_string();
            assert!(
                msg.contains(needle),
                "{text}: expected `{needle}` in `{msg}`"
            );
        }
    }

    #[test]
    fn errors_carry_byte_positions() {
        let g = g2();
        let err = parse(&g, "RAT_1 & @").unwrap_err();
        match err {
            LogicError::Parse { pos, .. } => assert_eq!(pos, 8),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn render_uses_minimal_parens() {
        let g = g2();
        let f = Formula::and(
            Formula::and(Formula::Rat(0), Formula::Rat(1)),
            Formula::not(Formula::and(Formula::Rat(0), Formula::True)),
        );
        assert_eq!(render(&f), "RAT_1 & RAT_2 & !(RAT_1 & true)");
        assert_eq!(parse(&g, &render(&f)).unwrap(), f);
        let nested = Formula::believes(0, Formula::and(Formula::Rat(1), Formula::True));
        assert_eq!(render(&nested), "B_1 (RAT_2 & true)");
    }

    fn arb_formula(game: NormalFormGame) -> impl Strategy<Value = Formula> {
        let ids: Vec<Vec<String>> = (0..game.num_players())
            .map(|i| game.strategy_ids(i).to_vec())
            .collect();
        let n = game.num_players();
        let leaf_ids = ids.clone();
        let leaf = prop_oneof![
            Just(Formula::True),
            (0..n).prop_map(Formula::Rat),
            (0..n).prop_flat_map(move |i| {
                let ids = leaf_ids[i].clone();
                (Just(i), prop::sample::select(ids))
                    .prop_map(|(i, id)| Formula::Play(i, id))
            }),
        ];
        leaf.prop_recursive(4, 24, 3, move |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Formula::and(a, b)),
                (0..n, inner.clone()).prop_map(|(i, f)| Formula::believes(i, f)),
                (0..n, inner.clone()).prop_map(|(i, f)| Formula::possible(i, f)),
                inner.clone().prop_map(Formula::diamond),
                (0..n, inner.clone(), 0..=4u32, 1..=4u32).prop_map(|(i, f, p, q)| {
                    let bound = rat(p.min(q) as i64, q as i64);
                    Formula::ProbAtLeast(i, Box::new(f), bound)
                }),
                (0..n, inner, 0..=4u32, 1..=4u32).prop_map(|(i, f, p, q)| {
                    let bound = rat(p.min(q) as i64, q as i64);
                    Formula::ProbGreater(i, Box::new(f), bound)
                }),
            ]
        })
    }

    proptest! {
        #[test]
        fn parse_render_round_trip(f in arb_formula(g2())) {
            let g = g2();
            let text = render(&f);
            let back = parse(&g, &text).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}
