//! OpenQASM 2.0 subset.
//!
//! Supported statements: `OPENQASM`, `include`, one `qreg`, any number of
//! `creg`, the gates `x sx h rz cz cx swap cp cu1 u3 u U`, `barrier` and
//! terminal `measure`. Angles accept `pi`, numbers, `+ - * / ^`, unary minus,
//! parentheses and the functions `sin cos tan exp ln sqrt`.
//!
//! Every `barrier` (full or partial) ends the current layer. The serializer
//! writes one barrier between consecutive layers, so layer structure
//! survives a round trip.

use std::fmt::Write as _;

use crate::circuit::unitary::u3_gate;
use crate::circuit::{Circuit, CircuitBuilder, Clifford1Q, GateKind, GateOp, Layer};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Str(String),
    Sym(char),
    Arrow,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: tl,
                col: tc,
            });
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v: f64 = s.parse().map_err(|_| Error::Parse {
                line: tl,
                col: tc,
                msg: format!("malformed number `{s}`"),
            })?;
            col += i - start;
            out.push(Token {
                tok: Tok::Num(v),
                line: tl,
                col: tc,
            });
            continue;
        }
        if c == '"' {
            let start = i + 1;
            i += 1;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                i += 1;
            }
            if i >= chars.len() || chars[i] != '"' {
                return Err(Error::Parse {
                    line: tl,
                    col: tc,
                    msg: "unterminated string".into(),
                });
            }
            let s: String = chars[start..i].iter().collect();
            i += 1;
            col += s.chars().count() + 2;
            out.push(Token {
                tok: Tok::Str(s),
                line: tl,
                col: tc,
            });
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'>') {
            i += 2;
            col += 2;
            out.push(Token {
                tok: Tok::Arrow,
                line: tl,
                col: tc,
            });
            continue;
        }
        if ";,()[]{}+-*/^".contains(c) {
            i += 1;
            col += 1;
            out.push(Token {
                tok: Tok::Sym(c),
                line: tl,
                col: tc,
            });
            continue;
        }
        return Err(Error::Parse {
            line: tl,
            col: tc,
            msg: format!("unexpected character `{c}`"),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

/// Result of parsing a program, with measurement metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct QasmProgram {
    pub circuit: Circuit,
    /// Qubits measured at the end of the program, in statement order.
    pub measured: Vec<usize>,
}

impl QasmProgram {
    pub fn measures_all(&self) -> bool {
        let mut m = self.measured.clone();
        m.sort_unstable();
        m.dedup();
        m.len() == self.circuit.n()
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    qreg: Option<(String, usize)>,
    cregs: Vec<(String, usize)>,
}

#[derive(Clone, Copy)]
enum QArg {
    One(usize),
    All,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, t: &Token, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            line: t.line,
            col: t.col,
            msg: msg.into(),
        })
    }

    fn expect_sym(&mut self, c: char) -> Result<Token> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(t)
        } else {
            self.err(&t, format!("expected `{c}`, found {}", describe(&t.tok)))
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek().tok == Tok::Sym(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<(String, Token)> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t.clone())),
            other => self.err(&t, format!("expected identifier, found {}", describe(other))),
        }
    }

    fn int(&mut self) -> Result<usize> {
        let t = self.next();
        match t.tok {
            Tok::Num(v) if v.fract() == 0.0 && v >= 0.0 => Ok(v as usize),
            ref other => self.err(&t, format!("expected integer, found {}", describe(other))),
        }
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<f64> {
        let mut v = self.term()?;
        loop {
            if self.eat_sym('+') {
                v += self.term()?;
            } else if self.eat_sym('-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<f64> {
        let mut v = self.unary()?;
        loop {
            if self.eat_sym('*') {
                v *= self.unary()?;
            } else if self.eat_sym('/') {
                v /= self.unary()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<f64> {
        if self.eat_sym('-') {
            return Ok(-self.unary()?);
        }
        if self.eat_sym('+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat_sym('^') {
            return Ok(base.powf(self.unary()?));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<f64> {
        let t = self.next();
        match &t.tok {
            Tok::Num(v) => Ok(*v),
            Tok::Sym('(') => {
                let v = self.expr()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            Tok::Ident(s) if s == "pi" => Ok(std::f64::consts::PI),
            Tok::Ident(s) => {
                let f: fn(f64) -> f64 = match s.as_str() {
                    "sin" => f64::sin,
                    "cos" => f64::cos,
                    "tan" => f64::tan,
                    "exp" => f64::exp,
                    "ln" => f64::ln,
                    "sqrt" => f64::sqrt,
                    _ => return self.err(&t, format!("unknown identifier `{s}` in expression")),
                };
                self.expect_sym('(')?;
                let v = self.expr()?;
                self.expect_sym(')')?;
                Ok(f(v))
            }
            other => self.err(&t, format!("expected expression, found {}", describe(other))),
        }
    }

    fn qarg(&mut self) -> Result<QArg> {
        let (name, t) = self.ident()?;
        let Some((reg, size)) = self.qreg.clone() else {
            return Err(Error::Structure {
                line: t.line,
                col: t.col,
                msg: "gate before qreg declaration".into(),
            });
        };
        if name != reg {
            return self.err(&t, format!("unknown quantum register `{name}`"));
        }
        if self.eat_sym('[') {
            let it = self.peek().clone();
            let i = self.int()?;
            self.expect_sym(']')?;
            if i >= size {
                return self.err(&it, format!("index {i} out of range for {reg}[{size}]"));
            }
            Ok(QArg::One(i))
        } else {
            Ok(QArg::All)
        }
    }

    fn carg(&mut self) -> Result<Option<usize>> {
        let (name, t) = self.ident()?;
        let Some(&(_, size)) = self.cregs.iter().find(|(n, _)| *n == name) else {
            return self.err(&t, format!("unknown classical register `{name}`"));
        };
        if self.eat_sym('[') {
            let it = self.peek().clone();
            let i = self.int()?;
            self.expect_sym(']')?;
            if i >= size {
                return self.err(&it, format!("index {i} out of range for {name}[{size}]"));
            }
            Ok(Some(i))
        } else {
            Ok(None)
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Num(v) => format!("number {v}"),
        Tok::Str(s) => format!("string \"{s}\""),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::Arrow => "`->`".into(),
        Tok::Eof => "end of input".into(),
    }
}

fn gate_spec(name: &str) -> Option<(GateKind, usize)> {
    // (kind, number of written parameters)
    Some(match name {
        "x" => (GateKind::X, 0),
        "sx" => (GateKind::SX, 0),
        "h" => (GateKind::H, 0),
        "rz" => (GateKind::RZ, 1),
        "cz" => (GateKind::CZ, 0),
        "cx" | "CX" => (GateKind::CX, 0),
        "swap" => (GateKind::SWAP, 0),
        "cp" | "cu1" => (GateKind::CP, 1),
        "u3" | "u" | "U" => (GateKind::U3, 3),
        _ => return None,
    })
}

/// Parse a program into a circuit, discarding measurement metadata.
pub fn parse_qasm(text: &str) -> Result<Circuit> {
    parse_qasm_program(text).map(|p| p.circuit)
}

pub fn parse_qasm_program(text: &str) -> Result<QasmProgram> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        qreg: None,
        cregs: Vec::new(),
    };
    let mut segments: Vec<Vec<GateOp>> = vec![Vec::new()];
    let mut barriers = 0usize;
    let mut measured = Vec::new();
    let mut first_measure: Option<Token> = None;

    loop {
        let t = p.peek().clone();
        let name = match &t.tok {
            Tok::Eof => break,
            Tok::Ident(s) => s.clone(),
            other => return p.err(&t, format!("expected statement, found {}", describe(other))),
        };
        p.next();
        match name.as_str() {
            "OPENQASM" => {
                let vt = p.next();
                match vt.tok {
                    Tok::Num(v) if (2.0..3.0).contains(&v) => {}
                    _ => return p.err(&vt, "only OpenQASM 2.x is supported"),
                }
                p.expect_sym(';')?;
            }
            "include" => {
                let st = p.next();
                if !matches!(st.tok, Tok::Str(_)) {
                    return p.err(&st, "expected file name string");
                }
                p.expect_sym(';')?;
            }
            "qreg" | "creg" => {
                let (reg, _) = p.ident()?;
                p.expect_sym('[')?;
                let size = p.int()?;
                p.expect_sym(']')?;
                p.expect_sym(';')?;
                if name == "qreg" {
                    if p.qreg.is_some() {
                        return Err(Error::Structure {
                            line: t.line,
                            col: t.col,
                            msg: "only a single quantum register is supported".into(),
                        });
                    }
                    p.qreg = Some((reg, size));
                } else {
                    p.cregs.push((reg, size));
                }
            }
            "barrier" => {
                let _ = p.qarg()?;
                while p.eat_sym(',') {
                    let _ = p.qarg()?;
                }
                p.expect_sym(';')?;
                if first_measure.is_none() {
                    barriers += 1;
                    segments.push(Vec::new());
                }
            }
            "measure" => {
                let q = p.qarg()?;
                let at = p.next();
                if at.tok != Tok::Arrow {
                    return p.err(&at, format!("expected `->`, found {}", describe(&at.tok)));
                }
                let c = p.carg()?;
                p.expect_sym(';')?;
                match (q, c) {
                    (QArg::One(i), Some(_)) => measured.push(i),
                    (QArg::All, None) => {
                        measured.extend(0..p.qreg.as_ref().map_or(0, |r| r.1));
                    }
                    _ => {
                        return Err(Error::Structure {
                            line: t.line,
                            col: t.col,
                            msg: "measure must map a qubit to a bit or a register to a register".into(),
                        })
                    }
                }
                first_measure.get_or_insert(t.clone());
            }
            "gate" | "opaque" | "if" | "reset" => {
                return Err(Error::Structure {
                    line: t.line,
                    col: t.col,
                    msg: format!("`{name}` statements are not supported"),
                });
            }
            _ => {
                let Some((kind, nparams)) = gate_spec(&name) else {
                    return Err(Error::UnsupportedGate {
                        name,
                        line: t.line,
                        col: t.col,
                    });
                };
                if let Some(m) = &first_measure {
                    return Err(Error::Structure {
                        line: t.line,
                        col: t.col,
                        msg: format!(
                            "gate after measurement (first measure at {}:{}); only terminal measurements are supported",
                            m.line, m.col
                        ),
                    });
                }
                let mut params = Vec::new();
                if p.eat_sym('(') {
                    if !p.eat_sym(')') {
                        params.push(p.expr()?);
                        while p.eat_sym(',') {
                            params.push(p.expr()?);
                        }
                        p.expect_sym(')')?;
                    }
                }
                if params.len() != nparams {
                    return p.err(
                        &t,
                        format!("`{name}` takes {nparams} parameter(s), got {}", params.len()),
                    );
                }
                let mut args = vec![p.qarg()?];
                while p.eat_sym(',') {
                    args.push(p.qarg()?);
                }
                p.expect_sym(';')?;
                if args.len() != kind.arity() {
                    return p.err(
                        &t,
                        format!("`{name}` acts on {} qubit(s), got {}", kind.arity(), args.len()),
                    );
                }
                let size = p.qreg.as_ref().map_or(0, |r| r.1);
                let seg = segments.last_mut().expect("at least one segment");
                let make = |qs: &[usize]| {
                    GateOp::new(kind, &params, qs).map_err(|e| Error::Parse {
                        line: t.line,
                        col: t.col,
                        msg: e.to_string(),
                    })
                };
                match (args.as_slice(), kind.arity()) {
                    ([QArg::All], 1) => {
                        for q in 0..size {
                            seg.push(make(&[q])?);
                        }
                    }
                    ([QArg::One(q)], 1) => seg.push(make(&[*q])?),
                    ([QArg::One(a), QArg::One(b)], 2) => seg.push(make(&[*a, *b])?),
                    _ => {
                        return p.err(&t, "register broadcast is only supported for single-qubit gates")
                    }
                }
            }
        }
    }

    let Some((_, n)) = p.qreg else {
        let t = p.peek().clone();
        return Err(Error::Structure {
            line: t.line,
            col: t.col,
            msg: "no qreg declared".into(),
        });
    };
    let mut layers: Vec<Layer> = Vec::new();
    for seg in segments.into_iter().take(barriers + 1) {
        if seg.is_empty() {
            if barriers > 0 {
                layers.push(Layer::default());
            }
            continue;
        }
        let mut b = CircuitBuilder::new(n);
        for g in seg {
            b.push(g)?;
        }
        layers.extend(b.finish().into_layers());
    }
    // A trailing `barrier` right before the measurements is not a layer.
    if barriers > 0 && first_measure.is_some() && layers.last().is_some_and(Layer::is_empty) {
        layers.pop();
    }
    Ok(QasmProgram {
        circuit: Circuit::new("", n, layers)?,
        measured,
    })
}

fn angle(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serialize with one `barrier` between layers. `C1Q` elements are written
/// as `u3` with the equivalent angles.
pub fn serialize_qasm(c: &Circuit) -> String {
    let mut s = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(s, "qreg q[{}];", c.n());
    for (i, layer) in c.layers().iter().enumerate() {
        if i > 0 {
            s.push_str("barrier q;\n");
        }
        for g in layer.ops() {
            write_gate(&mut s, g);
        }
    }
    s
}

fn write_gate(s: &mut String, g: &GateOp) {
    let q = g.qubits();
    let p = g.params();
    let _ = match g.kind() {
        GateKind::X | GateKind::SX | GateKind::H => writeln!(s, "{} q[{}];", g.kind().name().to_lowercase(), q[0]),
        GateKind::RZ => writeln!(s, "rz({}) q[{}];", angle(p[0]), q[0]),
        GateKind::CZ | GateKind::CX | GateKind::SWAP => writeln!(
            s,
            "{} q[{}],q[{}];",
            g.kind().name().to_lowercase(),
            q[0],
            q[1]
        ),
        GateKind::CP => writeln!(s, "cp({}) q[{}],q[{}];", angle(p[0]), q[0], q[1]),
        GateKind::U3 => writeln!(
            s,
            "u3({},{},{}) q[{}];",
            angle(p[0]),
            angle(p[1]),
            angle(p[2]),
            q[0]
        ),
        GateKind::C1Q => {
            let m = Clifford1Q::new(g.clifford_index().expect("c1q index")).matrix();
            let u = u3_gate(q[0], &m);
            let up = u.params();
            writeln!(
                s,
                "u3({},{},{}) q[{}];",
                angle(up[0]),
                angle(up[1]),
                angle(up[2]),
                q[0]
            )
        }
    };
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_x() {
        let c = parse_qasm("qreg q[1]; x q[0];").unwrap();
        assert_eq!(c.n(), 1);
        assert_eq!(c.depth(), 1);
        assert_eq!(c.layers()[0].ops(), &[GateOp::x(0)]);
    }

    #[test]
    fn dependency_gives_two_layers() {
        let c = parse_qasm("qreg q[2]; h q[0]; cz q[0],q[1];").unwrap();
        assert_eq!(c.depth(), 2);
    }

    #[test]
    fn unsupported_gate_has_position() {
        let e = parse_qasm("qreg q[3];\n  ccx q[0],q[1],q[2];").unwrap_err();
        match e {
            Error::UnsupportedGate { name, line, col } => {
                assert_eq!((name.as_str(), line, col), ("ccx", 2, 3));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mid_circuit_measure_is_rejected() {
        let src = "qreg q[1]; creg c[1]; measure q[0] -> c[0]; x q[0];";
        assert!(matches!(parse_qasm(src), Err(Error::Structure { .. })));
    }

    #[test]
    fn syntax_errors_have_positions() {
        let e = parse_qasm("qreg q[2];\nrz(0.1 q[0];").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e:?}");
        let e = parse_qasm("qreg q[2];\nx q[5];").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, col: 5, .. }), "{e:?}");
    }

    #[test]
    fn expressions_and_aliases() {
        let src = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg r[2];\ncreg c[2];\n\
                   u(pi/2, -pi, 2*pi/4) r[0];\ncu1(-(1+1)*0.5) r[0],r[1];\nbarrier r;\nmeasure r -> c;\n";
        let prog = parse_qasm_program(src).unwrap();
        assert!(prog.measures_all());
        let gates: Vec<_> = prog.circuit.gates().copied().collect();
        assert!(gates[0].approx_eq(
            &GateOp::u3(0, std::f64::consts::FRAC_PI_2, -std::f64::consts::PI, std::f64::consts::FRAC_PI_2),
            1e-15
        ));
        assert!(gates[1].approx_eq(&GateOp::cp(0, 1, -1.0), 1e-15));
        assert_eq!(prog.circuit.depth(), 2);
    }

    #[test]
    fn empty_circuit_serializes_to_header() {
        let s = serialize_qasm(&Circuit::empty(2));
        assert_eq!(s, "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\n");
        assert_eq!(parse_qasm(&s).unwrap(), Circuit::empty(2));
    }

    #[test]
    fn barrier_preserves_layers_and_empty_layers() {
        let c = Circuit::new(
            "",
            2,
            vec![
                Layer::new(vec![GateOp::x(0)]),
                Layer::default(),
                Layer::new(vec![GateOp::sx(1)]),
            ],
        )
        .unwrap();
        let back = parse_qasm(&serialize_qasm(&c)).unwrap();
        assert!(back.structurally_eq(&c, 0.0));
    }

    #[test]
    fn angles_are_bit_faithful() {
        let t = 0.1 + 0.2;
        let c = Circuit::from_gates(1, [GateOp::rz(0, t)]).unwrap();
        let back = parse_qasm(&serialize_qasm(&c)).unwrap();
        assert_eq!(back.gates().next().unwrap().params()[0], t);
    }
}
