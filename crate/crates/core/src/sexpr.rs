//! Minimal s-expression reader and printer shared by every text format.
//!
//! Atoms are maximal runs of characters other than whitespace, parentheses
//! and `;`. A `;` starts a comment that runs to the end of the line.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Line/column position (1-based) of a token in the source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug)]
pub enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl PartialEq for Sexp {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Sexp::Atom(a, _), Sexp::Atom(b, _)) => a == b,
            (Sexp::List(a, _), Sexp::List(b, _)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Sexp {}

impl Sexp {
    pub fn atom(s: impl Into<String>) -> Sexp {
        Sexp::Atom(s.into(), Pos::default())
    }

    pub fn list(items: Vec<Sexp>) -> Sexp {
        Sexp::List(items, Pos::default())
    }

    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            Sexp::Atom(..) => None,
        }
    }

    /// The head atom of a non-empty list, e.g. `and` in `(and a b)`.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_atom()
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(s, _) => f.write_str(s),
            Sexp::List(items, _) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ReadError {
    #[error("{0}: unbalanced ')'")]
    UnexpectedClose(Pos),
    #[error("{0}: unterminated list")]
    Unterminated(Pos),
    #[error("{0}: expected exactly one top-level form")]
    TrailingInput(Pos),
    #[error("empty input")]
    Empty,
    #[error("{0}: invalid character {1:?}")]
    BadChar(Pos, char),
}

impl ReadError {
    pub fn pos(&self) -> Pos {
        match self {
            ReadError::UnexpectedClose(p)
            | ReadError::Unterminated(p)
            | ReadError::TrailingInput(p)
            | ReadError::BadChar(p, _) => *p,
            ReadError::Empty => Pos::default(),
        }
    }
}

#[derive(Debug, PartialEq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

fn tokenize(text: &str) -> Result<Vec<(Tok, Pos)>, ReadError> {
    let mut out = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' => {
                chars.next();
                col += 1;
                out.push((Tok::Open, pos));
            }
            ')' => {
                chars.next();
                col += 1;
                out.push((Tok::Close, pos));
            }
            c if c.is_control() => return Err(ReadError::BadChar(pos, c)),
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    if c.is_control() {
                        return Err(ReadError::BadChar(Pos { line, col }, c));
                    }
                    s.push(c);
                    chars.next();
                    col += 1;
                }
                out.push((Tok::Atom(s), pos));
            }
        }
    }
    Ok(out)
}

/// Reads exactly one top-level form.
pub fn read_one(text: &str) -> Result<Sexp, ReadError> {
    let mut forms = read_all(text)?;
    match forms.len() {
        0 => Err(ReadError::Empty),
        1 => Ok(forms.pop().unwrap()),
        _ => Err(ReadError::TrailingInput(forms[1].pos())),
    }
}

/// Reads every top-level form in order.
pub fn read_all(text: &str) -> Result<Vec<Sexp>, ReadError> {
    let toks = tokenize(text)?;
    let mut stack: Vec<(Vec<Sexp>, Pos)> = Vec::new();
    let mut top = Vec::new();
    for (tok, pos) in toks {
        match tok {
            Tok::Open => stack.push((Vec::new(), pos)),
            Tok::Close => {
                let (items, open) = stack.pop().ok_or(ReadError::UnexpectedClose(pos))?;
                let node = Sexp::List(items, open);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(node),
                    None => top.push(node),
                }
            }
            Tok::Atom(s) => {
                let node = Sexp::Atom(s, pos);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(node),
                    None => top.push(node),
                }
            }
        }
    }
    if let Some((_, open)) = stack.pop() {
        return Err(ReadError::Unterminated(open));
    }
    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn reads_nested_lists_and_comments() {
        let s = read_one("; header\n(a (b c) ; trailing\n d)").unwrap();
        assert_eq!(s.to_string(), "(a (b c) d)");
        assert_eq!(s.pos(), Pos { line: 2, col: 1 });
    }

    #[test]
    fn reports_positions() {
        assert_eq!(read_one("(a b"), Err(ReadError::Unterminated(Pos { line: 1, col: 1 })));
        assert_eq!(read_one("a)"), Err(ReadError::UnexpectedClose(Pos { line: 1, col: 2 })));
        assert!(matches!(read_one("a b"), Err(ReadError::TrailingInput(_))));
        assert_eq!(read_one("  ; nothing"), Err(ReadError::Empty));
    }

    #[test]
    fn unicode_atoms() {
        let s = read_one("(∀ x)").unwrap();
        assert_eq!(s.head(), Some("∀"));
    }
}
