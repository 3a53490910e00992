use super::{Formula, FormulaError, Var};
use crate::structures::Signature;

/// Parses the concrete syntax
///
/// ```text
/// formula = atom | var "=" var | "~" formula
///         | "(" formula ("&" formula)+ ")" | "(" formula ("|" formula)+ ")"
///         | ("E" | "A") var "." formula
///         | "E^" nat "(" [varlist] ")" "." formula
/// atom    = relname "(" varlist ")"
/// var     = "v" nat
/// ```
///
/// and validates relation names, arities and equality against `sig`.
pub fn parse(text: &str, sig: &Signature) -> Result<Formula, FormulaError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        sig,
    };
    let f = p.formula()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    sig: &'a Signature,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> FormulaError {
        FormulaError::Syntax {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, byte: u8) -> Result<(), FormulaError> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", byte as char)))
        }
    }

    fn nat(&mut self) -> Result<u64, FormulaError> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| FormulaError::Syntax {
                position: start,
                message: "number too large".into(),
            })
    }

    fn var(&mut self) -> Result<Var, FormulaError> {
        if self.peek() != Some(b'v') {
            return Err(self.error("expected a variable `v<n>`"));
        }
        self.pos += 1;
        if !self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            return Err(self.error("expected digits after `v`"));
        }
        let start = self.pos;
        let n = self.nat()?;
        u32::try_from(n).map(Var).map_err(|_| FormulaError::Syntax {
            position: start,
            message: "variable index too large".into(),
        })
    }

    fn var_list(&mut self, allow_empty: bool) -> Result<Vec<Var>, FormulaError> {
        self.expect(b'(')?;
        let mut vars = Vec::new();
        if allow_empty && self.peek() == Some(b')') {
            self.pos += 1;
            return Ok(vars);
        }
        loop {
            vars.push(self.var()?);
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b')') => {
                    self.pos += 1;
                    return Ok(vars);
                }
                _ => return Err(self.error("expected `,` or `)`")),
            }
        }
    }

    /// At an `E`/`A`: does a quantifier start here (rather than a relation name)?
    fn quantifier_ahead(&self) -> bool {
        let mut i = self.pos + 1;
        let ws = |i: &mut usize| {
            while self.src.get(*i).is_some_and(|b| b.is_ascii_whitespace()) {
                *i += 1;
            }
        };
        ws(&mut i);
        if self.src[self.pos] == b'E' && self.src.get(i) == Some(&b'^') {
            return true;
        }
        if self.src.get(i) != Some(&b'v') {
            return false;
        }
        i += 1;
        let digits = i;
        while self.src.get(i).is_some_and(u8::is_ascii_digit) {
            i += 1;
        }
        if i == digits {
            return false;
        }
        ws(&mut i);
        self.src.get(i) == Some(&b'.')
    }

    fn formula(&mut self) -> Result<Formula, FormulaError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'~') => {
                self.pos += 1;
                Ok(self.formula()?.not())
            }
            Some(b'(') => self.connective(),
            Some(b'v') => self.equality(),
            Some(b'E' | b'A') if self.quantifier_ahead() => self.quantifier(),
            Some(b) if b.is_ascii_uppercase() => self.atom(),
            Some(_) => Err(self.error("expected a formula")),
        }
    }

    fn connective(&mut self) -> Result<Formula, FormulaError> {
        self.expect(b'(')?;
        let mut operands = vec![self.formula()?];
        let op = match self.peek() {
            Some(op @ (b'&' | b'|')) => op,
            _ => return Err(self.error("expected `&` or `|`")),
        };
        while self.peek() == Some(op) {
            self.pos += 1;
            operands.push(self.formula()?);
        }
        match self.peek() {
            Some(b')') => self.pos += 1,
            Some(b'&' | b'|') => return Err(self.error("mixed `&` and `|` need explicit parentheses")),
            _ => return Err(self.error("expected `)`")),
        }
        Ok(if op == b'&' {
            Formula::And(operands)
        } else {
            Formula::Or(operands)
        })
    }

    fn equality(&mut self) -> Result<Formula, FormulaError> {
        let start = self.pos;
        let a = self.var()?;
        self.expect(b'=')?;
        let b = self.var()?;
        if !self.sig.with_equality() {
            return Err(FormulaError::EqualityNotEnabled { position: Some(start) });
        }
        Ok(Formula::Equal(a, b))
    }

    fn quantifier(&mut self) -> Result<Formula, FormulaError> {
        let q = self.src[self.pos];
        self.pos += 1;
        if q == b'E' && self.peek() == Some(b'^') {
            self.pos += 1;
            let count = self.nat()?;
            let vars = self.var_list(true)?;
            self.expect(b'.')?;
            let body = self.formula()?;
            return Ok(Formula::ExistsAtLeast {
                count,
                vars,
                body: Box::new(body),
            });
        }
        let v = self.var()?;
        self.expect(b'.')?;
        let body = Box::new(self.formula()?);
        Ok(if q == b'E' {
            Formula::Exists(v, body)
        } else {
            Formula::Forall(v, body)
        })
    }

    fn atom(&mut self) -> Result<Formula, FormulaError> {
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii identifier")
            .to_string();
        let args = self.var_list(false)?;
        match self.sig.arity(&name) {
            None => Err(FormulaError::UnknownRelation {
                name,
                position: Some(start),
            }),
            Some(a) if a != args.len() => Err(FormulaError::Arity {
                relation: name,
                expected: a,
                found: args.len(),
                position: Some(start),
            }),
            Some(_) => Ok(Formula::Atom { relation: name, args }),
        }
    }
}
