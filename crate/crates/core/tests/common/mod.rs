#![allow(dead_code)]

use explora::dataset::{AttributeSchema, Relation, Value};

pub type Attrs = Vec<(String, String)>;

/// Nodes and edges of a parsed DOT digraph.
#[derive(Debug, Default)]
pub struct DotGraph {
    pub name: String,
    pub nodes: Vec<(String, Attrs)>,
    pub edges: Vec<(String, String, Attrs)>,
}

#[derive(Debug, PartialEq, Clone)]
enum Tok {
    Id(String),
    Str(String),
    Arrow,
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('"') => break,
                    Some('\\') => {
                        let next = chars.get(i + 1).ok_or("dangling escape")?;
                        s.push(match next {
                            'n' => '\n',
                            other => *other,
                        });
                        i += 2;
                    }
                    Some('\n') => return Err("raw newline in string".into()),
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            i += 1;
            out.push(Tok::Str(s));
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Tok::Arrow);
            i += 2;
        } else if "{}[];=,".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else if c.is_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Id(chars[start..i].iter().collect()));
        } else {
            return Err(format!("unexpected character {c:?}"));
        }
    }
    Ok(out)
}

struct P {
    toks: Vec<Tok>,
    pos: usize,
}

impl P {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }
    fn next(&mut self) -> Result<Tok, String> {
        let t = self.toks.get(self.pos).cloned().ok_or("unexpected end")?;
        self.pos += 1;
        Ok(t)
    }
    fn expect(&mut self, c: char) -> Result<(), String> {
        match self.next()? {
            Tok::Sym(s) if s == c => Ok(()),
            t => Err(format!("expected {c:?}, got {t:?}")),
        }
    }
    fn id(&mut self) -> Result<String, String> {
        match self.next()? {
            Tok::Id(s) | Tok::Str(s) => Ok(s),
            t => Err(format!("expected identifier, got {t:?}")),
        }
    }
    fn attrs(&mut self) -> Result<Vec<(String, String)>, String> {
        let mut list = Vec::new();
        if self.peek() != Some(&Tok::Sym('[')) {
            return Ok(list);
        }
        self.next()?;
        loop {
            if self.peek() == Some(&Tok::Sym(']')) {
                self.next()?;
                return Ok(list);
            }
            let k = self.id()?;
            self.expect('=')?;
            let v = self.id()?;
            list.push((k, v));
            if self.peek() == Some(&Tok::Sym(',')) {
                self.next()?;
            }
        }
    }
}

/// Parses the digraph subset: node defaults, node statements and edge
/// statements, each terminated by `;`.
pub fn parse_dot(text: &str) -> Result<DotGraph, String> {
    let mut p = P {
        toks: lex(text)?,
        pos: 0,
    };
    match p.next()? {
        Tok::Id(k) if k == "digraph" => {}
        t => return Err(format!("expected digraph, got {t:?}")),
    }
    let mut g = DotGraph {
        name: p.id()?,
        ..Default::default()
    };
    p.expect('{')?;
    loop {
        if p.peek() == Some(&Tok::Sym('}')) {
            p.next()?;
            break;
        }
        let first = p.id()?;
        if p.peek() == Some(&Tok::Arrow) {
            p.next()?;
            let to = p.id()?;
            let attrs = p.attrs()?;
            g.edges.push((first, to, attrs));
        } else {
            let attrs = p.attrs()?;
            if first != "node" && first != "edge" && first != "graph" {
                g.nodes.push((first, attrs));
            }
        }
        p.expect(';')?;
    }
    if p.pos != p.toks.len() {
        return Err("trailing tokens".into());
    }
    for (a, b, _) in &g.edges {
        for end in [a, b] {
            if !g.nodes.iter().any(|(n, _)| n == end) {
                return Err(format!("edge endpoint {end} undeclared"));
            }
        }
    }
    Ok(g)
}

pub fn label_of(attrs: &[(String, String)]) -> Option<&str> {
    attrs.iter().find(|(k, _)| k == "label").map(|(_, v)| v.as_str())
}

/// Relation of binary predictors `x0..` and a binary class `c` (last).
pub fn binary_relation(rows: &[(Vec<usize>, usize)], predictors: usize) -> Relation {
    let mut schema: Vec<AttributeSchema> = (0..predictors)
        .map(|i| AttributeSchema::categorical(format!("x{i}"), ["a", "b"]))
        .collect();
    schema.push(AttributeSchema::categorical("c", ["A", "B"]));
    let records = rows
        .iter()
        .map(|(xs, c)| {
            xs.iter()
                .map(|&x| Value::Category(x))
                .chain(std::iter::once(Value::Category(*c)))
                .collect()
        })
        .collect();
    Relation::new(schema, records).unwrap()
}

/// Plain `-Σ p log2 p` over raw counts.
pub fn oracle_entropy(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &c in counts {
        if c > 0 {
            let p = c as f64 / n as f64;
            h -= p * p.ln() / std::f64::consts::LN_2;
        }
    }
    h
}
