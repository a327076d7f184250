//! `SCD1` text format.
//!
//! ```text
//! SCD1 <n> <m> <q>
//! <out> <A> <B> <tt>      (q lines, wires numbered from 1)
//! ```
//!
//! `tt` lists the outputs for inputs (0,0), (0,1), (1,0), (1,1). A `#` starts
//! a comment that runs to the end of the line. Gate lines may appear in any
//! order; serialization always writes them sorted by output wire.

use super::{Circuit, CircuitError, GateSpec, TruthTable};

struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> CircuitError {
    CircuitError::Syntax { line, column, message: message.into() }
}

fn tokenize_line(line_no: usize, line: &str) -> Vec<Token<'_>> {
    let content = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in content.char_indices() {
        if ch.is_ascii_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token { text: &content[s..i], line: line_no, column: s + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &content[s..], line: line_no, column: s + 1 });
    }
    out
}

fn number(tok: &Token<'_>) -> Result<usize, CircuitError> {
    if !tok.text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(syntax(tok.line, tok.column, format!("expected a number, found `{}`", tok.text)));
    }
    tok.text
        .parse()
        .map_err(|_| syntax(tok.line, tok.column, format!("number `{}` out of range", tok.text)))
}

fn truth_table(tok: &Token<'_>) -> Result<TruthTable, CircuitError> {
    let b = tok.text.as_bytes();
    if b.len() != 4 || !b.iter().all(|c| *c == b'0' || *c == b'1') {
        return Err(syntax(
            tok.line,
            tok.column,
            format!("truth table must be four 0/1 digits, found `{}`", tok.text),
        ));
    }
    Ok(TruthTable::from_rows([b[0] == b'1', b[1] == b'1', b[2] == b'1', b[3] == b'1']))
}

/// Parses and validates an SCD text file.
pub fn parse_scd(bytes: &[u8]) -> Result<Circuit, CircuitError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let prefix = &bytes[..e.valid_up_to()];
        let line = prefix.iter().filter(|b| **b == b'\n').count() + 1;
        let column = prefix.iter().rev().take_while(|b| **b != b'\n').count() + 1;
        syntax(line, column, "invalid UTF-8")
    })?;

    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| tokenize_line(i + 1, l))
        .filter(|toks| !toks.is_empty());

    let header = lines.next().ok_or_else(|| syntax(1, 1, "missing SCD1 header"))?;
    if header[0].text != "SCD1" {
        return Err(syntax(header[0].line, header[0].column, "expected `SCD1`"));
    }
    if header.len() != 4 {
        let t = header.get(4).unwrap_or(header.last().unwrap());
        return Err(syntax(t.line, t.column, "header must be `SCD1 <n> <m> <q>`"));
    }
    let n = number(&header[1])?;
    let m = number(&header[2])?;
    let q = number(&header[3])?;
    let r = n.checked_add(q).ok_or_else(|| syntax(header[3].line, header[3].column, "q too large"))?;

    let mut slots: Vec<Option<GateSpec>> = vec![None; q];
    let mut last_line = header[0].line;
    let mut seen = 0;
    for toks in lines {
        let first = &toks[0];
        last_line = first.line;
        if toks.len() != 4 {
            let t = toks.get(4).unwrap_or(toks.last().unwrap());
            return Err(syntax(t.line, t.column, "gate line must be `<out> <A> <B> <tt>`"));
        }
        if seen == q {
            return Err(syntax(first.line, first.column, format!("more than {q} gate lines")));
        }
        let out = number(&toks[0])?;
        let a = number(&toks[1])?;
        let b = number(&toks[2])?;
        let tt = truth_table(&toks[3])?;
        if out <= n || out > r {
            return Err(syntax(
                first.line,
                first.column,
                format!("gate output {out} outside {}..={r}", n + 1),
            ));
        }
        for w in [a, b] {
            if w == 0 || w > r {
                return Err(CircuitError::DanglingWire { gate: out, wire: w });
            }
        }
        let slot = &mut slots[out - n - 1];
        if slot.is_some() {
            return Err(syntax(first.line, first.column, format!("wire {out} driven twice")));
        }
        *slot = Some(GateSpec { out: out - 1, in_a: a - 1, in_b: b - 1, truth_table: tt });
        seen += 1;
    }
    if seen != q {
        return Err(syntax(last_line + 1, 1, format!("expected {q} gate lines, found {seen}")));
    }
    let gates = slots.into_iter().map(|s| s.expect("all slots filled")).collect();
    Circuit::new(n, m, gates)
}

/// Canonical text form; `parse_scd` of the result equals `c`.
pub fn serialize_scd(c: &Circuit) -> Vec<u8> {
    use std::fmt::Write;
    let mut s = String::with_capacity(16 + c.q() * 24);
    writeln!(s, "SCD1 {} {} {}", c.n(), c.m(), c.q()).unwrap();
    for g in c.gates() {
        writeln!(s, "{} {} {} {}", g.out + 1, g.in_a + 1, g.in_b + 1, g.truth_table).unwrap();
    }
    s.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::evaluate_plain;

    #[test]
    fn minimal_and() {
        let c = parse_scd(b"SCD1 2 1 1\n3 1 2 0001\n").unwrap();
        assert_eq!((c.n(), c.m(), c.q()), (2, 1, 1));
        assert_eq!(c.gate(0).truth_table, TruthTable::AND);
        assert_eq!(serialize_scd(&c), b"SCD1 2 1 1\n3 1 2 0001\n");
    }

    #[test]
    fn comments_blank_lines_and_order() {
        let src = b"# two gates\nSCD1 2 1 2 # header\n\n4 1 3 0110\n3 1 2 0001   # and\n";
        let c = parse_scd(src).unwrap();
        assert_eq!(serialize_scd(&c), b"SCD1 2 1 2\n3 1 2 0001\n4 1 3 0110\n");
        assert_eq!(evaluate_plain(&c, &[true, true]).unwrap(), vec![false]);
    }

    #[test]
    fn reversed_inputs_rejected() {
        let err = parse_scd(b"SCD1 2 1 1\n3 2 1 0001\n").unwrap_err();
        assert!(matches!(err, CircuitError::Constraint { gate: 3, .. }), "{err:?}");
    }

    #[test]
    fn syntax_errors_have_positions() {
        let err = parse_scd(b"SCD1 2 1 1\n3 1 2 0021\n").unwrap_err();
        assert_eq!(
            err,
            syntax(2, 7, "truth table must be four 0/1 digits, found `0021`")
        );
        let err = parse_scd(b"SCD2 2 1 1\n").unwrap_err();
        assert!(matches!(err, CircuitError::Syntax { line: 1, column: 1, .. }));
        let err = parse_scd(b"SCD1 2 1 2\n3 1 2 0001\n").unwrap_err();
        assert!(matches!(err, CircuitError::Syntax { line: 3, .. }));
        let err = parse_scd(b"SCD1 2 1 1\n3 1 x 0001\n").unwrap_err();
        assert!(matches!(err, CircuitError::Syntax { line: 2, column: 5, .. }));
        let err = parse_scd(b"SCD1 2 1 1\n3 1 9 0001\n").unwrap_err();
        assert_eq!(err, CircuitError::DanglingWire { gate: 3, wire: 9 });
        let err = parse_scd(b"SCD1 2 1 1\n3 0 2 0001\n").unwrap_err();
        assert_eq!(err, CircuitError::DanglingWire { gate: 3, wire: 0 });
        let err = parse_scd(b"SCD1 2 1 2\n3 1 2 0001\n3 1 2 0001\n").unwrap_err();
        assert!(matches!(err, CircuitError::Syntax { line: 3, .. }));
    }
}
