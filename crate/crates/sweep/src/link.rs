//! Linkage rules such as `delta_b = 2/3 * delta_a`: a target parameter bound
//! to an affine combination of other parameters, re-evaluated at every grid
//! point before solving.

use std::fmt;
use std::str::FromStr;

use blockade::{ModelParams, Param};

#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub target: Param,
    pub constant: f64,
    pub terms: Vec<(f64, Param)>,
    source: String,
}

impl Link {
    pub fn new(target: Param, terms: Vec<(f64, Param)>, constant: f64) -> Self {
        let mut source = String::new();
        for (k, (c, p)) in terms.iter().enumerate() {
            if k > 0 {
                source.push_str(" + ");
            }
            if *c == 1.0 {
                source.push_str(p.name());
            } else {
                source.push_str(&format!("{c} * {p}"));
            }
        }
        if constant != 0.0 || terms.is_empty() {
            source.push_str(&format!(" + {constant}"));
        }
        Link { target, constant, terms, source: format!("{target} = {}", source.trim_start_matches(" + ")) }
    }

    pub fn evaluate(&self, params: &ModelParams) -> f64 {
        self.constant + self.terms.iter().map(|(c, p)| c * params.get(*p)).sum::<f64>()
    }

    pub fn apply(&self, params: &mut ModelParams) {
        let v = self.evaluate(params);
        params.set(self.target, v);
    }

    pub fn depends_on(&self, p: Param) -> bool {
        self.terms.iter().any(|(_, q)| *q == p)
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl FromStr for Link {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (lhs, rhs) = s.split_once('=').ok_or_else(|| format!("link {s:?} has no '='"))?;
        let target: Param = lhs.trim().parse().map_err(|_| format!("unknown parameter {:?} in link", lhs.trim()))?;
        let mut parser = Parser { tokens: tokenize(rhs)?, pos: 0 };
        let value = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(format!("trailing input in link {s:?}"));
        }
        if value.depends_on(target) {
            return Err(format!("link for {target} refers to itself"));
        }
        Ok(Link { target, constant: value.constant, terms: value.terms, source: s.trim().to_string() })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if "+-*/()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.' || chars[i] == 'e' || chars[i] == 'E'
                || ((chars[i] == '-' || chars[i] == '+') && matches!(chars[i - 1], 'e' | 'E')))
            {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Token::Num(text.parse().map_err(|_| format!("bad number {text:?}"))?));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else {
            return Err(format!("unexpected character {c:?}"));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Default)]
struct Affine {
    constant: f64,
    terms: Vec<(f64, Param)>,
}

impl Affine {
    fn scale(mut self, k: f64) -> Self {
        self.constant *= k;
        for t in &mut self.terms {
            t.0 *= k;
        }
        self
    }

    fn add(mut self, other: Affine) -> Self {
        self.constant += other.constant;
        for (c, p) in other.terms {
            match self.terms.iter_mut().find(|t| t.1 == p) {
                Some(t) => t.0 += c,
                None => self.terms.push((c, p)),
            }
        }
        self
    }

    fn as_constant(&self) -> Option<f64> {
        self.terms.iter().all(|t| t.0 == 0.0).then_some(self.constant)
    }

    fn depends_on(&self, p: Param) -> bool {
        self.terms.iter().any(|t| t.1 == p && t.0 != 0.0)
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Affine, String> {
        let mut acc = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = acc.add(if op == '+' { rhs } else { rhs.scale(-1.0) });
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Affine, String> {
        let mut acc = self.factor()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = match (op, acc.as_constant(), rhs.as_constant()) {
                ('*', Some(k), _) => rhs.scale(k),
                ('*', None, Some(k)) => acc.scale(k),
                ('/', _, Some(k)) if k != 0.0 => acc.scale(1.0 / k),
                ('/', _, Some(_)) => return Err("division by zero in link".into()),
                _ => return Err("links must be affine in the parameters".into()),
            };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Affine, String> {
        let tok = self.tokens.get(self.pos).cloned().ok_or("link expression ends early")?;
        self.pos += 1;
        match tok {
            Token::Num(v) => Ok(Affine { constant: v, terms: vec![] }),
            Token::Ident(name) => {
                let p: Param = name.parse().map_err(|_| format!("unknown parameter {name:?} in link"))?;
                Ok(Affine { constant: 0.0, terms: vec![(1.0, p)] })
            }
            Token::Op('-') => Ok(self.factor()?.scale(-1.0)),
            Token::Op('+') => self.factor(),
            Token::Op('(') => {
                let inner = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err("missing ')' in link".into());
                }
                self.pos += 1;
                Ok(inner)
            }
            Token::Op(c) => Err(format!("unexpected {c:?} in link")),
        }
    }
}
