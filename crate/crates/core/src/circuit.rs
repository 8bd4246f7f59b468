//! Dynamic-circuit representation: Clifford gates, mid-circuit measurement,
//! reset and classically conditioned X over XOR / majority expressions.
//!
//! Circuits use compact qubit indices `0..num_qubits`; `physical[i]` records
//! which coupling-graph node qubit `i` lives on. Classical bits are
//! single-assignment: each is written by exactly one `Measure`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Classical feedforward expression over measured bits.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ClassicalExpr {
    Bit(usize),
    /// Parity of all operands. Never nested directly inside another `Xor`.
    Xor(Vec<ClassicalExpr>),
    /// Majority vote over an odd number of operands.
    Maj(Vec<ClassicalExpr>),
}

impl ClassicalExpr {
    /// Parity of `terms`, flattening nested XORs. A single term is returned as is.
    pub fn xor(terms: impl IntoIterator<Item = ClassicalExpr>) -> Self {
        let mut flat = Vec::new();
        for t in terms {
            match t {
                ClassicalExpr::Xor(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().expect("one term")
        } else {
            ClassicalExpr::Xor(flat)
        }
    }

    /// Majority over bits; a single bit is returned as a plain reference.
    pub fn maj_of_bits(bits: &[usize]) -> Self {
        if bits.len() == 1 {
            ClassicalExpr::Bit(bits[0])
        } else {
            ClassicalExpr::Maj(bits.iter().map(|&b| ClassicalExpr::Bit(b)).collect())
        }
    }

    /// Every classical bit referenced, in first-appearance order.
    pub fn bits(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_bits(&mut out);
        out
    }

    fn collect_bits(&self, out: &mut Vec<usize>) {
        match self {
            ClassicalExpr::Bit(b) => out.push(*b),
            ClassicalExpr::Xor(v) | ClassicalExpr::Maj(v) => v.iter().for_each(|e| e.collect_bits(out)),
        }
    }

    /// Evaluate with every referenced bit known to be assigned.
    pub fn eval_bits(&self, bits: &[bool]) -> bool {
        match self {
            ClassicalExpr::Bit(b) => bits[*b],
            ClassicalExpr::Xor(v) => v.iter().fold(false, |acc, e| acc ^ e.eval_bits(bits)),
            ClassicalExpr::Maj(v) => {
                let ones = v.iter().filter(|e| e.eval_bits(bits)).count();
                ones >= majority_threshold(v.len())
            }
        }
    }

    fn structural_problems(&self, out: &mut Vec<String>) {
        match self {
            ClassicalExpr::Bit(_) => {}
            ClassicalExpr::Xor(v) => {
                if v.is_empty() {
                    out.push("empty XOR".into());
                }
                v.iter().for_each(|e| e.structural_problems(out));
            }
            ClassicalExpr::Maj(v) => {
                if v.len() % 2 == 0 {
                    out.push(format!("MAJ arity {} is not odd", v.len()));
                }
                v.iter().for_each(|e| e.structural_problems(out));
            }
        }
    }
}

/// Ones needed for a majority over `arity` inputs: `floor((arity + 1) / 2)`.
pub fn majority_threshold(arity: usize) -> usize {
    arity.div_ceil(2)
}

/// Evaluate `expr` against possibly-unassigned bits.
pub fn eval_expr(expr: &ClassicalExpr, bits: &[Option<bool>]) -> Result<bool> {
    Ok(match expr {
        ClassicalExpr::Bit(b) => bits.get(*b).copied().flatten().ok_or(Error::UnassignedBit(*b))?,
        ClassicalExpr::Xor(v) => {
            let mut acc = false;
            for e in v {
                acc ^= eval_expr(e, bits)?;
            }
            acc
        }
        ClassicalExpr::Maj(v) => {
            let mut ones = 0;
            for e in v {
                ones += usize::from(eval_expr(e, bits)?);
            }
            ones >= majority_threshold(v.len())
        }
    })
}

impl fmt::Display for ClassicalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassicalExpr::Bit(b) => write!(f, "c{b}"),
            ClassicalExpr::Xor(v) => {
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" XOR ")?;
                    }
                    write!(f, "{e}")?;
                }
                Ok(())
            }
            ClassicalExpr::Maj(v) => {
                f.write_str("MAJ(")?;
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl FromStr for ClassicalExpr {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let mut p = ExprParser { s: s.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(format!("trailing input at column {}", p.pos + 1));
        }
        Ok(e)
    }
}

struct ExprParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl ExprParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.s[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> std::result::Result<ClassicalExpr, String> {
        let mut terms = vec![self.term()?];
        while self.eat("XOR") {
            terms.push(self.term()?);
        }
        Ok(ClassicalExpr::xor(terms))
    }

    fn term(&mut self) -> std::result::Result<ClassicalExpr, String> {
        if self.eat("MAJ(") {
            let mut args = vec![self.expr()?];
            while self.eat(",") {
                args.push(self.expr()?);
            }
            if !self.eat(")") {
                return Err(format!("expected `)` at column {}", self.pos + 1));
            }
            return Ok(ClassicalExpr::Maj(args));
        }
        if self.eat("c") {
            let start = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let digits = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
            return digits
                .parse()
                .map(ClassicalExpr::Bit)
                .map_err(|_| format!("expected bit index at column {}", start + 1));
        }
        Err(format!("expected `cN` or `MAJ(` at column {}", self.pos + 1))
    }
}

/// One circuit instruction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Op {
    H(usize),
    X(usize),
    Z(usize),
    S(usize),
    Cx(usize, usize),
    Measure { qubit: usize, clbit: usize },
    Reset(usize),
    CondX { qubit: usize, cond: ClassicalExpr },
}

impl Op {
    /// Qubits this op acts on.
    pub fn qubits(&self) -> OpQubits {
        match *self {
            Op::H(q) | Op::X(q) | Op::Z(q) | Op::S(q) | Op::Reset(q) => OpQubits::one(q),
            Op::Measure { qubit, .. } | Op::CondX { qubit, .. } => OpQubits::one(qubit),
            Op::Cx(c, t) => OpQubits::two(c, t),
        }
    }
}

/// Qubits touched by one op (one or two).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OpQubits {
    items: [usize; 2],
    len: usize,
}

impl OpQubits {
    fn one(a: usize) -> Self {
        OpQubits { items: [a, 0], len: 1 }
    }

    fn two(a: usize, b: usize) -> Self {
        OpQubits { items: [a, b], len: 2 }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.items[..self.len]
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::H(q) => write!(f, "H {q}"),
            Op::X(q) => write!(f, "X {q}"),
            Op::Z(q) => write!(f, "Z {q}"),
            Op::S(q) => write!(f, "S {q}"),
            Op::Cx(c, t) => write!(f, "CX {c} {t}"),
            Op::Measure { qubit, clbit } => write!(f, "MEASURE {qubit} -> c{clbit}"),
            Op::Reset(q) => write!(f, "RESET {q}"),
            Op::CondX { qubit, cond } => write!(f, "CONDX {qubit} IF {cond}"),
        }
    }
}

/// Layer statistics from ASAP scheduling.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct DepthStats {
    pub two_qubit_depth: usize,
    pub total_depth: usize,
    pub cx_count: usize,
    pub measure_count: usize,
}

impl DepthStats {
    /// Ordering key of the minimum-depth search.
    pub fn key(&self) -> (usize, usize, usize) {
        (self.two_qubit_depth, self.total_depth, self.cx_count)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DynamicCircuit {
    pub num_qubits: usize,
    pub num_clbits: usize,
    pub ops: Vec<Op>,
    /// Coupling-graph node of each circuit qubit.
    pub physical: Vec<usize>,
    pub metadata: BTreeMap<String, String>,
}

impl DynamicCircuit {
    /// Empty circuit over the given physical qubits.
    pub fn new(physical: Vec<usize>) -> Self {
        DynamicCircuit {
            num_qubits: physical.len(),
            physical,
            ..Default::default()
        }
    }

    pub fn push(&mut self, op: Op) {
        self.ops.push(op);
    }

    /// Append a measurement into a fresh classical bit and return its index.
    pub fn measure(&mut self, qubit: usize) -> usize {
        let clbit = self.num_clbits;
        self.num_clbits += 1;
        self.ops.push(Op::Measure { qubit, clbit });
        clbit
    }

    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.insert(key.to_string(), value.to_string());
    }

    /// Circuit index of a physical node.
    pub fn index_of(&self, node: usize) -> Option<usize> {
        self.physical.iter().position(|&p| p == node)
    }

    /// Every invariant violation, empty when the circuit is well formed.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.physical.len() != self.num_qubits {
            out.push(format!("physical map has {} entries for {} qubits", self.physical.len(), self.num_qubits));
        }
        let mut written = vec![false; self.num_clbits];
        for (i, op) in self.ops.iter().enumerate() {
            let line = i + 1;
            for &q in op.qubits().as_slice() {
                if q >= self.num_qubits {
                    out.push(format!("op {line}: qubit {q} out of range"));
                }
            }
            match op {
                Op::Cx(c, t) if c == t => out.push(format!("op {line}: control equals target ({c})")),
                Op::Measure { clbit, .. } => {
                    if *clbit >= self.num_clbits {
                        out.push(format!("op {line}: clbit c{clbit} out of range"));
                    } else if written[*clbit] {
                        out.push(format!("op {line}: clbit c{clbit} written twice"));
                    } else {
                        written[*clbit] = true;
                    }
                }
                Op::CondX { cond, .. } => {
                    let mut problems = Vec::new();
                    cond.structural_problems(&mut problems);
                    out.extend(problems.into_iter().map(|p| format!("op {line}: {p}")));
                    for b in cond.bits() {
                        if b >= self.num_clbits {
                            out.push(format!("op {line}: clbit c{b} out of range"));
                        } else if !written[b] {
                            out.push(format!("op {line}: read-before-write of c{b}"));
                        }
                    }
                }
                _ => {}
            }
        }
        out
    }

    /// `Ok` when [`Self::validate`] finds nothing.
    pub fn check(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidCircuit(v))
        }
    }

    /// ASAP layering. Every op takes one layer and starts after the last
    /// layer touching any of its qubits or any classical bit it reads.
    pub fn depth(&self) -> DepthStats {
        let mut qubit_done = vec![0usize; self.num_qubits];
        let mut clbit_done = vec![0usize; self.num_clbits];
        let mut cx_layers = std::collections::BTreeSet::new();
        let mut stats = DepthStats::default();
        for op in &self.ops {
            let mut start = op.qubits().as_slice().iter().map(|&q| qubit_done[q]).max().unwrap_or(0);
            if let Op::CondX { cond, .. } = op {
                start = cond.bits().into_iter().map(|b| clbit_done[b]).fold(start, usize::max);
            }
            let layer = start + 1;
            for &q in op.qubits().as_slice() {
                qubit_done[q] = layer;
            }
            match op {
                Op::Measure { clbit, .. } => {
                    clbit_done[*clbit] = layer;
                    stats.measure_count += 1;
                }
                Op::Cx(..) => {
                    cx_layers.insert(layer);
                    stats.cx_count += 1;
                }
                _ => {}
            }
            stats.total_depth = stats.total_depth.max(layer);
        }
        stats.two_qubit_depth = cx_layers.len();
        stats
    }

    /// Human-readable dump, parsed back by [`Self::from_text`].
    pub fn to_text(&self) -> String {
        use fmt::Write as _;
        let mut s = String::new();
        let _ = writeln!(s, "qubits {}", self.num_qubits);
        let _ = writeln!(s, "clbits {}", self.num_clbits);
        let phys: Vec<String> = self.physical.iter().map(usize::to_string).collect();
        let _ = writeln!(s, "physical {}", phys.join(" "));
        for (k, v) in &self.metadata {
            let _ = writeln!(s, "# {k} = {v}");
        }
        for op in &self.ops {
            let _ = writeln!(s, "{op}");
        }
        s
    }

    /// Parse the text dump. Comment lines (`#`) are ignored on input, except
    /// `# key = value` lines which restore metadata.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = DynamicCircuit::default();
        let err = |line: usize, msg: String| Error::Parse { line, msg };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.trim();
            if l.is_empty() {
                continue;
            }
            if let Some(rest) = l.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once('=') {
                    c.metadata.insert(k.trim().to_string(), v.trim().to_string());
                }
                continue;
            }
            let (head, rest) = l.split_once(' ').unwrap_or((l, ""));
            let num = |t: &str| t.trim().parse::<usize>().map_err(|_| err(line, format!("bad index `{t}`")));
            let args: Vec<&str> = rest.split_whitespace().collect();
            let one = || -> Result<usize> {
                match args.as_slice() {
                    [a] => num(a),
                    _ => Err(err(line, format!("`{head}` takes one qubit"))),
                }
            };
            match head {
                "qubits" => c.num_qubits = one()?,
                "clbits" => c.num_clbits = one()?,
                "physical" => c.physical = args.iter().map(|a| num(a)).collect::<Result<_>>()?,
                "H" => c.ops.push(Op::H(one()?)),
                "X" => c.ops.push(Op::X(one()?)),
                "Z" => c.ops.push(Op::Z(one()?)),
                "S" => c.ops.push(Op::S(one()?)),
                "RESET" => c.ops.push(Op::Reset(one()?)),
                "CX" => match args.as_slice() {
                    [a, b] => c.ops.push(Op::Cx(num(a)?, num(b)?)),
                    _ => return Err(err(line, "`CX` takes two qubits".into())),
                },
                "MEASURE" => match args.as_slice() {
                    [q, "->", b] => {
                        let b = b.strip_prefix('c').ok_or_else(|| err(line, format!("bad clbit `{b}`")))?;
                        c.ops.push(Op::Measure { qubit: num(q)?, clbit: num(b)? });
                    }
                    _ => return Err(err(line, "expected `MEASURE q -> cN`".into())),
                },
                "CONDX" => {
                    let (q, cond) = rest
                        .split_once(" IF ")
                        .ok_or_else(|| err(line, "expected `CONDX q IF expr`".into()))?;
                    let cond = cond.parse().map_err(|m| err(line, m))?;
                    c.ops.push(Op::CondX { qubit: num(q)?, cond });
                }
                other => return Err(err(line, format!("unknown instruction `{other}`"))),
            }
        }
        if c.physical.is_empty() {
            c.physical = (0..c.num_qubits).collect();
        }
        Ok(c)
    }
}
