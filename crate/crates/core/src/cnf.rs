//! CNF formulas over `n` Boolean variables.
//!
//! Literals, clauses with set semantics, DIMACS parsing and serialization,
//! truth-function evaluation and the brute-force model counter that every
//! quantum result in this crate is checked against.
//!
//! Conventions for the degenerate cases: an empty clause evaluates to 0
//! (empty join) and an empty formula evaluates to 1 (empty meet).

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;
use rayon::prelude::*;
use thiserror::Error;

/// Largest `n` accepted by [`count_satisfying`] unless overridden.
pub const DEFAULT_ENUMERATION_CAP: u32 = 24;

/// Hard upper bound for the enumeration cap (assignments are packed in `u64`).
pub const MAX_ENUMERATION_CAP: u32 = 40;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CnfError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("literal set is not closed under negation: {0} has no partner")]
    NotClosedUnderNegation(Literal),
    #[error("variable {var} exceeds declared variable count {n}")]
    VariableOutOfRange { var: u32, n: u32 },
    #[error(
        "refusing to enumerate 2^{n} assignments: n = {n} exceeds the enumeration cap of {cap}"
    )]
    EnumerationCap { n: u32, cap: u32 },
}

/// A variable `x_var` or its negation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    var: u32,
    negated: bool,
}

impl Literal {
    /// Panics if `var == 0`; variables are 1-based as in DIMACS.
    pub fn new(var: u32, negated: bool) -> Self {
        assert!(var >= 1, "variable indices start at 1");
        Literal { var, negated }
    }

    pub fn pos(var: u32) -> Self {
        Self::new(var, false)
    }

    pub fn neg(var: u32) -> Self {
        Self::new(var, true)
    }

    /// DIMACS integer form: `k` for `x_k`, `-k` for its negation.
    pub fn from_dimacs(k: i64) -> Option<Self> {
        if k == 0 || k.unsigned_abs() > u32::MAX as u64 {
            return None;
        }
        Some(Self::new(k.unsigned_abs() as u32, k < 0))
    }

    pub fn to_dimacs(self) -> i64 {
        if self.negated {
            -(self.var as i64)
        } else {
            self.var as i64
        }
    }

    pub fn var(self) -> u32 {
        self.var
    }

    pub fn is_negated(self) -> bool {
        self.negated
    }

    /// Truth value of the literal under `bit` = value of its variable.
    #[inline]
    pub fn value(self, bit: bool) -> bool {
        bit != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "¬x{}", self.var)
        } else {
            write!(f, "x{}", self.var)
        }
    }
}

/// Flips polarity. An involution without fixed points.
pub fn negate(l: Literal) -> Literal {
    Literal {
        var: l.var,
        negated: !l.negated,
    }
}

/// Splits a negation-closed literal set into positive representatives and
/// their negations.
pub fn partition_literals(
    literals: &BTreeSet<Literal>,
) -> Result<(BTreeSet<Literal>, BTreeSet<Literal>), CnfError> {
    let mut pos = BTreeSet::new();
    let mut neg = BTreeSet::new();
    for &l in literals {
        if !literals.contains(&negate(l)) {
            return Err(CnfError::NotClosedUnderNegation(l));
        }
        if l.negated {
            neg.insert(l);
        } else {
            pos.insert(l);
        }
    }
    Ok((pos, neg))
}

/// A disjunction of literals. Duplicates collapse; literals are kept sorted
/// by variable, positive before negative.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Clause {
    literals: BTreeSet<Literal>,
}

impl Clause {
    pub fn new<I: IntoIterator<Item = Literal>>(literals: I) -> Self {
        Clause {
            literals: literals.into_iter().collect(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Returns `false` if the literal was already present.
    pub fn insert(&mut self, l: Literal) -> bool {
        self.literals.insert(l)
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.literals.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn max_var(&self) -> u32 {
        self.literals.iter().map(|l| l.var).max().unwrap_or(0)
    }

    /// Bit masks over variables (bit `v - 1` for `x_v`) of the positive and
    /// negated literals.
    fn masks(&self) -> (u64, u64) {
        let mut pos = 0u64;
        let mut neg = 0u64;
        for l in &self.literals {
            let bit = 1u64 << (l.var - 1);
            if l.negated {
                neg |= bit;
            } else {
                pos |= bit;
            }
        }
        (pos, neg)
    }
}

impl FromIterator<Literal> for Clause {
    fn from_iter<I: IntoIterator<Item = Literal>>(iter: I) -> Self {
        Clause::new(iter)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

/// True iff no variable appears in both polarities.
pub fn is_minimal(c: &Clause) -> bool {
    !c.literals().any(|l| c.literals.contains(&negate(l)))
}

/// A conjunction of clauses over variables `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    n: u32,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(n: u32, clauses: Vec<Clause>) -> Result<Self, CnfError> {
        for c in &clauses {
            let var = c.max_var();
            if var > n {
                return Err(CnfError::VariableOutOfRange { var, n });
            }
        }
        Ok(CnfFormula { n, clauses })
    }

    /// Builds a formula from DIMACS-style integer clauses, e.g. `&[&[1, -2]]`.
    pub fn from_ints(n: u32, clauses: &[&[i64]]) -> Result<Self, CnfError> {
        let clauses = clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&k| {
                        Literal::from_dimacs(k).ok_or(CnfError::Parse {
                            line: 0,
                            msg: format!("invalid literal {k}"),
                        })
                    })
                    .collect::<Result<Clause, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(n, clauses)
    }

    pub fn num_vars(&self) -> u32 {
        self.n
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// DIMACS text: header, then one clause per line, literals sorted by var.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.n, self.clauses.len());
        for c in &self.clauses {
            for l in c.literals() {
                out.push_str(&l.to_dimacs().to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Drops every clause containing a complementary pair.
///
/// Such a clause evaluates to 1 under every assignment, so removing it from
/// the conjunction leaves the truth table unchanged.
pub fn filter_minimal(f: &CnfFormula) -> CnfFormula {
    CnfFormula {
        n: f.n,
        clauses: f
            .clauses
            .iter()
            .filter(|c| is_minimal(c))
            .cloned()
            .collect(),
    }
}

/// Parses DIMACS CNF. Comment lines start with `c`; clauses may span lines
/// and must each end with `0`.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, CnfError> {
    let err = |line: usize, msg: String| CnfError::Parse { line, msg };

    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Clause::empty();
    let mut open_since: Option<usize> = None;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(lineno, "duplicate problem line".into()));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(err(
                    lineno,
                    format!("malformed header {line:?}, expected \"p cnf <n> <m>\""),
                ));
            }
            let n: u32 = parts[2]
                .parse()
                .map_err(|_| err(lineno, format!("bad variable count {:?}", parts[2])))?;
            let m: usize = parts[3]
                .parse()
                .map_err(|_| err(lineno, format!("bad clause count {:?}", parts[3])))?;
            header = Some((n, m));
            continue;
        }
        let Some((n, _)) = header else {
            return Err(err(lineno, "clause data before \"p cnf\" header".into()));
        };
        for tok in line.split_whitespace() {
            let k: i64 = tok
                .parse()
                .map_err(|_| err(lineno, format!("not an integer: {tok:?}")))?;
            if k == 0 {
                clauses.push(std::mem::take(&mut current));
                open_since = None;
                continue;
            }
            let lit = Literal::from_dimacs(k)
                .ok_or_else(|| err(lineno, format!("literal {k} out of range")))?;
            if lit.var > n {
                return Err(err(
                    lineno,
                    format!("variable {} exceeds declared n={n}", lit.var),
                ));
            }
            current.insert(lit);
            open_since.get_or_insert(lineno);
        }
    }

    let Some((n, m)) = header else {
        return Err(err(
            last_line.max(1),
            "missing \"p cnf\" header (empty input?)".into(),
        ));
    };
    if let Some(line) = open_since {
        return Err(err(line, "clause without terminating 0".into()));
    }
    if clauses.len() != m {
        return Err(err(
            last_line,
            format!(
                "header declares {m} clauses but {} were read",
                clauses.len()
            ),
        ));
    }
    CnfFormula::new(n, clauses)
}

/// A bit string `ε = (ε₁, …, εₙ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment {
    bits: Vec<bool>,
}

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Assignment { bits }
    }

    /// Decodes a ket label index: `ε₁` is the most significant of `n` bits.
    pub fn from_index(n: u32, index: u64) -> Self {
        let bits = (0..n).map(|i| (index >> (n - 1 - i)) & 1 == 1).collect();
        Assignment { bits }
    }

    /// Inverse of [`Assignment::from_index`].
    pub fn to_index(&self) -> u64 {
        self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Value of `x_var` (1-based).
    pub fn get(&self, var: u32) -> bool {
        self.bits[(var - 1) as usize]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

pub fn eval_clause(c: &Clause, a: &Assignment) -> bool {
    c.literals().any(|l| l.value(a.get(l.var)))
}

pub fn eval_formula(f: &CnfFormula, a: &Assignment) -> bool {
    f.clauses.iter().all(|c| eval_clause(c, a))
}

/// Satisfying-assignment count `r` with `q² = r / 2ⁿ` held exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountSummary {
    pub r: u64,
    pub total: u64,
    pub q_squared: Ratio<u64>,
}

impl CountSummary {
    fn new(r: u64, n: u32) -> Self {
        let total = 1u64 << n;
        CountSummary {
            r,
            total,
            q_squared: Ratio::new(r, total),
        }
    }

    pub fn is_sat(&self) -> bool {
        self.r > 0
    }

    pub fn q_squared_f64(&self) -> f64 {
        self.r as f64 / self.total as f64
    }
}

/// Brute-force model counter over all `2ⁿ` assignments.
#[derive(Clone, Copy, Debug)]
pub struct Enumerator {
    cap: u32,
}

impl Default for Enumerator {
    fn default() -> Self {
        Enumerator {
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

impl Enumerator {
    pub fn with_cap(cap: u32) -> Self {
        Enumerator {
            cap: cap.min(MAX_ENUMERATION_CAP),
        }
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn count(&self, f: &CnfFormula) -> Result<CountSummary, CnfError> {
        if f.n > self.cap {
            return Err(CnfError::EnumerationCap {
                n: f.n,
                cap: self.cap,
            });
        }
        let masks: Vec<(u64, u64)> = f.clauses.iter().map(Clause::masks).collect();
        // Internal packing: bit v-1 of `e` holds ε_v.
        let sat = |e: u64| masks.iter().all(|&(p, q)| e & p != 0 || !e & q != 0);
        let total = 1u64 << f.n;
        const CHUNK: u64 = 1 << 14;
        let r = if total <= CHUNK {
            (0..total).filter(|&e| sat(e)).count() as u64
        } else {
            (0..total / CHUNK)
                .into_par_iter()
                .map(|c| (c * CHUNK..(c + 1) * CHUNK).filter(|&e| sat(e)).count() as u64)
                .sum()
        };
        Ok(CountSummary::new(r, f.n))
    }
}

/// [`Enumerator::count`] with the default cap.
pub fn count_satisfying(f: &CnfFormula) -> Result<CountSummary, CnfError> {
    Enumerator::default().count(f)
}

pub fn is_sat(f: &CnfFormula) -> Result<bool, CnfError> {
    Ok(count_satisfying(f)?.is_sat())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lits(v: &[i64]) -> BTreeSet<Literal> {
        v.iter()
            .map(|&k| Literal::from_dimacs(k).unwrap())
            .collect()
    }

    fn clause(v: &[i64]) -> Clause {
        v.iter()
            .map(|&k| Literal::from_dimacs(k).unwrap())
            .collect()
    }

    fn bits(v: &[u8]) -> Assignment {
        Assignment::new(v.iter().map(|&b| b == 1).collect())
    }

    #[test]
    fn parse_examples() {
        let f = parse_dimacs("p cnf 2 1\n1 2 0").unwrap();
        assert_eq!(f.num_vars(), 2);
        assert_eq!(f.clauses(), &[clause(&[1, 2])]);

        let f = parse_dimacs("p cnf 1 2\n1 0\n-1 0").unwrap();
        assert_eq!(f.clauses(), &[clause(&[1]), clause(&[-1])]);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let e = parse_dimacs("p cnf 2 1\n3 0").unwrap_err();
        assert_eq!(
            e,
            CnfError::Parse {
                line: 2,
                msg: "variable 3 exceeds declared n=2".into()
            }
        );
        assert!(matches!(parse_dimacs(""), Err(CnfError::Parse { .. })));
        assert!(matches!(
            parse_dimacs("p cnf x 1\n1 0"),
            Err(CnfError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_dimacs("p cnf 2 1\n1 2"),
            Err(CnfError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_dimacs("1 2 0\np cnf 2 1"),
            Err(CnfError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn parse_comments_and_multiline_clauses() {
        let f = parse_dimacs("c hello\np cnf 3 2\n1 -2\n 3 0 -1 0\n").unwrap();
        assert_eq!(f.clauses(), &[clause(&[1, -2, 3]), clause(&[-1])]);
    }

    #[test]
    fn negation_is_fixed_point_free_involution() {
        assert_eq!(negate(Literal::pos(1)), Literal::neg(1));
        assert_eq!(negate(Literal::neg(3)), Literal::pos(3));
        assert_eq!(negate(negate(Literal::pos(2))), Literal::pos(2));
        assert_ne!(negate(Literal::pos(2)), Literal::pos(2));
    }

    #[test]
    fn partition() {
        let (i, ip) = partition_literals(&lits(&[1, -1, 2, -2])).unwrap();
        assert_eq!(i, lits(&[1, 2]));
        assert_eq!(ip, lits(&[-1, -2]));
        let (i, ip) = partition_literals(&BTreeSet::new()).unwrap();
        assert!(i.is_empty() && ip.is_empty());
        let (i, ip) = partition_literals(&lits(&[1, -1])).unwrap();
        assert_eq!((i, ip), (lits(&[1]), lits(&[-1])));
        assert_eq!(
            partition_literals(&lits(&[1, -1, 2])),
            Err(CnfError::NotClosedUnderNegation(Literal::pos(2)))
        );
    }

    #[test]
    fn minimality() {
        assert!(is_minimal(&clause(&[1, -2])));
        assert!(!is_minimal(&clause(&[1, -1])));
        assert!(is_minimal(&Clause::empty()));
    }

    #[test]
    fn filter_minimal_examples() {
        let f = CnfFormula::from_ints(2, &[&[1, -1], &[2]]).unwrap();
        let g = filter_minimal(&f);
        assert_eq!(g.clauses(), &[clause(&[2])]);
        // Truth table by enumeration: r unchanged (x2 = 1 in 2 of 4).
        assert_eq!(count_satisfying(&f).unwrap().r, 2);
        assert_eq!(count_satisfying(&g).unwrap().r, 2);

        let f = CnfFormula::from_ints(1, &[&[1]]).unwrap();
        assert_eq!(filter_minimal(&f), f);
        let f = CnfFormula::new(0, vec![]).unwrap();
        assert_eq!(filter_minimal(&f), f);
    }

    #[test]
    fn clause_evaluation() {
        let c = clause(&[1, -2]);
        assert!(!eval_clause(&c, &bits(&[0, 1])));
        assert!(eval_clause(&c, &bits(&[0, 0])));
        assert!(!eval_clause(&Clause::empty(), &bits(&[1, 1])));
    }

    #[test]
    fn formula_evaluation() {
        let f = CnfFormula::from_ints(2, &[&[1, 2]]).unwrap();
        assert!(eval_formula(&f, &bits(&[1, 0])));
        let f = CnfFormula::from_ints(1, &[&[1], &[-1]]).unwrap();
        assert!(!eval_formula(&f, &bits(&[0])));
        assert!(!eval_formula(&f, &bits(&[1])));
        let f = CnfFormula::new(2, vec![]).unwrap();
        assert!(eval_formula(&f, &bits(&[0, 1])));
    }

    #[test]
    fn counting_examples() {
        let f = CnfFormula::from_ints(2, &[&[1, 2]]).unwrap();
        let s = count_satisfying(&f).unwrap();
        assert_eq!((s.r, s.total), (3, 4));
        assert_eq!(s.q_squared, Ratio::new(3, 4));
        assert!(is_sat(&f).unwrap());

        let f = CnfFormula::from_ints(1, &[&[1], &[-1]]).unwrap();
        let s = count_satisfying(&f).unwrap();
        assert_eq!(s.r, 0);
        assert_eq!(s.q_squared, Ratio::new(0, 1));
        assert!(!is_sat(&f).unwrap());

        for n in 1..=10u32 {
            let units: Vec<Clause> = (1..=n).map(|v| clause(&[v as i64])).collect();
            let s = count_satisfying(&CnfFormula::new(n, units).unwrap()).unwrap();
            assert_eq!(s.r, 1);
            assert_eq!(s.q_squared, Ratio::new(1, 1u64 << n));
        }

        assert!(is_sat(&CnfFormula::new(3, vec![]).unwrap()).unwrap());
    }

    #[test]
    fn counting_parallel_path_matches_direct_enumeration() {
        // n = 16 exceeds the single-chunk path.
        let f =
            CnfFormula::from_ints(16, &[&[1, -5, 9], &[-2, 16], &[3, 4, -7], &[-16, 8]]).unwrap();
        let fast = count_satisfying(&f).unwrap().r;
        let slow = (0..1u64 << 16)
            .filter(|&k| eval_formula(&f, &Assignment::from_index(16, k)))
            .count() as u64;
        assert_eq!(fast, slow);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let f = CnfFormula::new(30, vec![]).unwrap();
        assert_eq!(
            count_satisfying(&f),
            Err(CnfError::EnumerationCap { n: 30, cap: 24 })
        );
        let f = CnfFormula::new(5, vec![]).unwrap();
        assert!(Enumerator::with_cap(4).count(&f).is_err());
    }

    #[test]
    fn assignment_index_roundtrip() {
        let a = Assignment::from_index(4, 0b1010);
        assert_eq!(a.bits(), &[true, false, true, false]);
        assert!(a.get(1) && !a.get(2));
        assert_eq!(a.to_index(), 0b1010);
    }

    #[test]
    fn serializer_emits_canonical_form() {
        let f = CnfFormula::from_ints(3, &[&[-3, 1], &[2]]).unwrap();
        assert_eq!(f.to_dimacs(), "p cnf 3 2\n1 -3 0\n2 0\n");
    }
}
