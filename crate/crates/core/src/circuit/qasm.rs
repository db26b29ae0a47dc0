//! OpenQASM 2.0 export and a parser for the subset this crate emits.
//!
//! Wire roles travel as `// role: q[i] <role>` comment lines ahead of the
//! register declaration.

use std::fmt::Write as _;

use super::{Circuit, Gate, Role};
use crate::error::{Error, Result};

pub fn export_qasm(c: &Circuit) -> String {
    export_qasm_with_notes(c, &[])
}

/// Export with extra `//` comment lines after the include.
pub fn export_qasm_with_notes(c: &Circuit, notes: &[String]) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    for note in notes {
        for line in note.lines() {
            let _ = writeln!(out, "// {line}");
        }
    }
    for (q, role) in c.roles().iter().enumerate() {
        let _ = writeln!(out, "// role: q[{q}] {}", role.as_str());
    }
    let _ = writeln!(out, "qreg q[{}];", c.width());
    for g in c.gates() {
        let _ = writeln!(out, "{g};");
    }
    out
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// qelib1 gates outside the primitive set, with their arity, so that
/// arity mistakes get a specific message.
const OTHER_GATES: [(&str, usize); 12] = [
    ("y", 1),
    ("id", 1),
    ("u1", 1),
    ("u2", 1),
    ("u3", 1),
    ("rx", 1),
    ("ry", 1),
    ("rz", 1),
    ("cz", 2),
    ("cy", 2),
    ("swap", 2),
    ("ccx", 3),
];

fn primitive_arity(name: &str) -> Option<usize> {
    match name {
        "h" | "t" | "tdg" | "s" | "sdg" | "x" | "z" => Some(1),
        "cx" => Some(2),
        _ => None,
    }
}

struct Parser {
    register: Option<(String, usize)>,
    header_seen: bool,
    roles: Vec<(usize, Role, usize)>,
    gates: Vec<Gate>,
}

impl Parser {
    fn statement(&mut self, text: &str, line: usize, col: usize) -> Result<()> {
        let (head, rest) = match text.find(|c: char| c.is_whitespace()) {
            Some(i) => (&text[..i], text[i..].trim_start()),
            None => (text, ""),
        };
        let rest_col = col + (text.len() - rest.len());
        if !self.header_seen {
            if head != "OPENQASM" {
                return Err(err(line, col, "expected 'OPENQASM 2.0;' header"));
            }
            if rest != "2.0" {
                return Err(err(line, rest_col, format!("unsupported version '{rest}'")));
            }
            self.header_seen = true;
            return Ok(());
        }
        match head {
            "OPENQASM" => Err(err(line, col, "duplicate header")),
            "include" => {
                if rest == "\"qelib1.inc\"" {
                    Ok(())
                } else {
                    Err(err(line, rest_col, format!("unsupported include {rest}")))
                }
            }
            "qreg" => {
                if self.register.is_some() {
                    return Err(err(line, col, "only one quantum register is supported"));
                }
                let (name, size) = parse_ref(rest, line, rest_col)?;
                self.register = Some((name, size));
                Ok(())
            }
            "creg" | "measure" | "barrier" | "reset" | "gate" | "if" | "opaque" => {
                Err(err(line, col, format!("'{head}' statements are not supported")))
            }
            name => self.gate(name, rest, line, col, rest_col),
        }
    }

    fn gate(&mut self, name: &str, args: &str, line: usize, col: usize, args_col: usize) -> Result<()> {
        let Some((reg, size)) = self.register.clone() else {
            return Err(err(line, col, "gate before register declaration"));
        };
        if name.contains('(') {
            return Err(err(line, col, format!("parameterised gate '{name}' is not supported")));
        }
        let mut qubits = Vec::new();
        let mut offset = 0;
        for piece in args.split(',') {
            let lead = piece.len() - piece.trim_start().len();
            let at = args_col + offset + lead;
            offset += piece.len() + 1;
            let piece = piece.trim();
            if piece.is_empty() {
                return Err(err(line, at, "missing qubit argument"));
            }
            let (r, idx) = parse_ref(piece, line, at)?;
            if r != reg {
                return Err(err(line, at, format!("unknown register '{r}'")));
            }
            if idx >= size {
                return Err(err(line, at, format!("qubit index {idx} out of range for q[{size}]")));
            }
            qubits.push(idx);
        }
        let expected = primitive_arity(name).or_else(|| {
            OTHER_GATES
                .iter()
                .find(|(n, _)| *n == name)
                .map(|&(_, a)| a)
        });
        let Some(expected) = expected else {
            return Err(err(line, col, format!("unknown gate '{name}'")));
        };
        if args.trim().is_empty() || qubits.len() != expected {
            let found = if args.trim().is_empty() { 0 } else { qubits.len() };
            return Err(err(
                line,
                col,
                format!("'{name}' takes {expected} qubit argument(s), found {found}"),
            ));
        }
        let q = qubits[0];
        let g = match name {
            "h" => Gate::H(q),
            "t" => Gate::T(q),
            "tdg" => Gate::Tdg(q),
            "s" => Gate::S(q),
            "sdg" => Gate::Sdg(q),
            "x" => Gate::X(q),
            "z" => Gate::Z(q),
            "cx" => {
                if qubits[0] == qubits[1] {
                    return Err(err(line, col, "cx control and target coincide"));
                }
                Gate::cnot(qubits[0], qubits[1])
            }
            other => {
                return Err(err(
                    line,
                    col,
                    format!("gate '{other}' is outside the Clifford+T primitive set"),
                ))
            }
        };
        self.gates.push(g);
        Ok(())
    }
}

/// `name[index]`.
fn parse_ref(text: &str, line: usize, col: usize) -> Result<(String, usize)> {
    let open = text
        .find('[')
        .ok_or_else(|| err(line, col, format!("expected 'name[index]', found '{text}'")))?;
    if !text.ends_with(']') {
        return Err(err(line, col, format!("expected 'name[index]', found '{text}'")));
    }
    let name = text[..open].trim();
    let valid = name
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_lowercase())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if !valid {
        return Err(err(line, col, format!("invalid identifier '{name}'")));
    }
    let idx = text[open + 1..text.len() - 1]
        .trim()
        .parse::<usize>()
        .map_err(|_| err(line, col + open + 1, "expected a non-negative integer index"))?;
    Ok((name.to_string(), idx))
}

/// Parse a program in the exported dialect. Errors carry 1-based line and
/// column numbers.
pub fn parse_qasm(text: &str) -> Result<Circuit> {
    let mut p = Parser {
        register: None,
        header_seen: false,
        roles: Vec::new(),
        gates: Vec::new(),
    };
    let mut last_line = 1;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let (code, comment) = match raw.find("//") {
            Some(at) => (&raw[..at], Some((&raw[at + 2..], at))),
            None => (raw, None),
        };
        if let Some((body, at)) = comment {
            if let Some(spec) = body.trim().strip_prefix("role:") {
                let col = at + 1;
                let mut parts = spec.split_whitespace();
                let (Some(r), Some(name), None) = (parts.next(), parts.next(), parts.next()) else {
                    return Err(err(line, col, "expected '// role: q[i] <role>'"));
                };
                let (_, idx) = parse_ref(r, line, col)?;
                let role = Role::parse(name)
                    .ok_or_else(|| err(line, col, format!("unknown role '{name}'")))?;
                p.roles.push((idx, role, line));
            }
        }
        let mut start = 0;
        let pieces: Vec<&str> = code.split(';').collect();
        for (n, piece) in pieces.iter().enumerate() {
            let lead = piece.len() - piece.trim_start().len();
            let col = start + lead + 1;
            start += piece.len() + 1;
            let stmt = piece.trim();
            if stmt.is_empty() {
                continue;
            }
            if n + 1 == pieces.len() {
                return Err(err(line, col, format!("missing ';' after '{stmt}'")));
            }
            p.statement(stmt, line, col)?;
        }
    }
    if !p.header_seen {
        return Err(err(1, 1, "missing 'OPENQASM 2.0;' header"));
    }
    let Some((_, width)) = p.register else {
        return Err(err(last_line, 1, "missing qreg declaration"));
    };
    let mut roles = vec![Role::Data; width];
    for (idx, role, line) in p.roles {
        if idx >= width {
            return Err(err(line, 1, format!("role for q[{idx}] outside the register")));
        }
        roles[idx] = role;
    }
    Circuit::from_gates(roles, p.gates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::random_circuit;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn parse_err(text: &str) -> (usize, usize, String) {
        match parse_qasm(text) {
            Err(Error::Parse {
                line,
                column,
                message,
            }) => (line, column, message),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn export_format() {
        let mut c = Circuit::new(2);
        c.set_role(1, Role::AncillaClean);
        c.extend([Gate::H(0), Gate::cnot(0, 1), Gate::Tdg(1)]).unwrap();
        let text = export_qasm(&c);
        let expected = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n// role: q[0] data\n\
                        // role: q[1] ancilla-clean\nqreg q[2];\nh q[0];\ncx q[0],q[1];\ntdg q[1];\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for w in 1..=4 {
            let mut c = random_circuit(w, 60, &mut rng);
            c.set_role(0, Role::Flag);
            let back = parse_qasm(&export_qasm_with_notes(&c, &["note".into()])).unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn hand_written_program() {
        let text = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n\nqreg q[3]; // comment\nh q[0]; cx q[0], q[2];\n";
        let c = parse_qasm(text).unwrap();
        assert_eq!(c.width(), 3);
        assert_eq!(c.gates(), &[Gate::H(0), Gate::cnot(0, 2)]);
        assert!(c.roles().iter().all(|r| *r == Role::Data));
    }

    #[test]
    fn arity_error_reports_line() {
        let text = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncz q[0];\n";
        let (line, col, msg) = parse_err(text);
        assert_eq!((line, col), (4, 1));
        assert!(msg.contains("cz"), "{msg}");
    }

    #[test]
    fn assorted_errors() {
        let head = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\n";
        assert_eq!(parse_err(&format!("{head}h q[2];\n")).0, 4);
        assert_eq!(parse_err(&format!("{head}  foo q[0];\n")), (4, 3, "unknown gate 'foo'".into()));
        assert_eq!(parse_err(&format!("{head}h q[0]\n")).0, 4);
        assert_eq!(parse_err(&format!("{head}cx q[1],q[1];\n")).0, 4);
        assert_eq!(parse_err(&format!("{head}ccx q[0],q[1],q[1];\n")).0, 4);
        assert_eq!(parse_err("qreg q[1];\n").0, 1);
        assert_eq!(parse_err("OPENQASM 2.0;\nh q[0];\n").0, 2);
        assert_eq!(parse_err(&format!("{head}qreg r[1];\n")).0, 4);
    }
}
