//! Pregroup types and contraction-only reduction.
//!
//! A simple type is a basic symbol together with an adjoint order `z`:
//! `0` is the plain type, negative orders are iterated left adjoints and
//! positive orders iterated right adjoints. Two adjacent simple types
//! `a^z a^(z+1)` contract to the unit. A [`Reduction`] records which
//! positions of a type sequence were contracted against each other and
//! which positions survive.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::ops::Range;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PregroupError {
    #[error("token {position} `{token}`: unknown basic type `{base}`")]
    UnknownBase {
        position: usize,
        token: String,
        base: String,
    },
    #[error("token {position} `{token}`: adjoint run mixes `l` and `r`")]
    MixedAdjoint { position: usize, token: String },
    #[error("token {position} `{token}`: malformed simple type")]
    Malformed { position: usize, token: String },
    #[error("empty type string")]
    Empty,
    #[error("lexicon line {line}: {message}")]
    Lexicon { line: usize, message: String },
    #[error("unknown word `{0}`")]
    UnknownWord(String),
}

/// The declared set of basic type symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out: Vec<String> = Vec::new();
        for s in symbols {
            let s = s.into();
            if !out.contains(&s) {
                out.push(s);
            }
        }
        Alphabet { symbols: out }
    }

    /// The `{n, s}` alphabet used throughout the relative-clause grammar.
    pub fn noun_sentence() -> Self {
        Alphabet::new(["n", "s"])
    }

    pub fn contains(&self, base: &str) -> bool {
        self.symbols.iter().any(|s| s == base)
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimpleType {
    pub base: String,
    pub adjoint_order: i32,
}

impl SimpleType {
    pub fn new(base: impl Into<String>, adjoint_order: i32) -> Self {
        SimpleType {
            base: base.into(),
            adjoint_order,
        }
    }

    pub fn plain(base: impl Into<String>) -> Self {
        Self::new(base, 0)
    }

    pub fn left_adjoint(&self) -> Self {
        Self::new(self.base.clone(), self.adjoint_order - 1)
    }

    pub fn right_adjoint(&self) -> Self {
        Self::new(self.base.clone(), self.adjoint_order + 1)
    }

    /// True when `self · other` contracts to the unit.
    pub fn contracts_with(&self, other: &SimpleType) -> bool {
        self.base == other.base && other.adjoint_order == self.adjoint_order + 1
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        let z = self.adjoint_order;
        if z != 0 {
            let mark = if z < 0 { "l" } else { "r" };
            write!(f, "^{}", mark.repeat(z.unsigned_abs() as usize))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// An ordered sequence of simple types; the empty sequence is the unit.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TypeSeq(pub Vec<SimpleType>);

impl TypeSeq {
    pub fn unit() -> Self {
        TypeSeq(Vec::new())
    }

    pub fn single(t: SimpleType) -> Self {
        TypeSeq(vec![t])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn items(&self) -> &[SimpleType] {
        &self.0
    }

    pub fn concat(&self, other: &TypeSeq) -> TypeSeq {
        let mut items = self.0.clone();
        items.extend(other.0.iter().cloned());
        TypeSeq(items)
    }

    /// Adjoint of a product: order reversed, every factor shifted.
    pub fn adjoint(&self, side: Side) -> TypeSeq {
        TypeSeq(
            self.0
                .iter()
                .rev()
                .map(|t| match side {
                    Side::Left => t.left_adjoint(),
                    Side::Right => t.right_adjoint(),
                })
                .collect(),
        )
    }
}

impl fmt::Display for TypeSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, t) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

pub fn seq_adjoint(t: &TypeSeq, side: Side) -> TypeSeq {
    t.adjoint(side)
}

/// Parses whitespace-separated simple types such as `n^r s n^l` or `n^ll`.
pub fn parse_type(s: &str, alphabet: &Alphabet) -> Result<TypeSeq, PregroupError> {
    let mut items = Vec::new();
    for (k, token) in s.split_whitespace().enumerate() {
        let position = k + 1;
        let (base, run) = match token.split_once('^') {
            Some((b, r)) => (b, Some(r)),
            None => (token, None),
        };
        if base.is_empty() {
            return Err(PregroupError::Malformed {
                position,
                token: token.to_string(),
            });
        }
        if !alphabet.contains(base) {
            return Err(PregroupError::UnknownBase {
                position,
                token: token.to_string(),
                base: base.to_string(),
            });
        }
        let order = match run {
            None => 0,
            Some(run) => {
                if run.is_empty() || run.chars().any(|c| c != 'l' && c != 'r') {
                    return Err(PregroupError::Malformed {
                        position,
                        token: token.to_string(),
                    });
                }
                let lefts = run.chars().filter(|&c| c == 'l').count();
                let rights = run.len() - lefts;
                if lefts > 0 && rights > 0 {
                    return Err(PregroupError::MixedAdjoint {
                        position,
                        token: token.to_string(),
                    });
                }
                if lefts > 0 {
                    -(lefts as i32)
                } else {
                    rights as i32
                }
            }
        };
        items.push(SimpleType::new(base, order));
    }
    if items.is_empty() {
        return Err(PregroupError::Empty);
    }
    Ok(TypeSeq(items))
}

/// A contraction-only derivation of a target type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    /// Contracted position pairs `(i, j)` with `i < j`, sorted by `i`.
    pub links: Vec<(usize, usize)>,
    /// Unlinked positions, in order.
    pub survivors: Vec<usize>,
}

impl Reduction {
    fn from_links(len: usize, mut links: Vec<(usize, usize)>) -> Self {
        links.sort_unstable();
        let linked: HashSet<usize> = links.iter().flat_map(|&(i, j)| [i, j]).collect();
        let survivors = (0..len).filter(|p| !linked.contains(p)).collect();
        Reduction { links, survivors }
    }

    /// Checks every structural invariant against the input and target.
    pub fn is_valid_for(&self, ts: &TypeSeq, target: &TypeSeq) -> bool {
        let items = ts.items();
        let mut seen = HashSet::new();
        for &(i, j) in &self.links {
            if i >= j || j >= items.len() || !seen.insert(i) || !seen.insert(j) {
                return false;
            }
            if !items[i].contracts_with(&items[j]) {
                return false;
            }
        }
        for &(i, j) in &self.links {
            for &(k, l) in &self.links {
                if i < k && k < j && j < l {
                    return false;
                }
            }
            // nothing may survive underneath a link
            if self.survivors.iter().any(|&p| i < p && p < j) {
                return false;
            }
        }
        let expected: Vec<usize> = (0..items.len()).filter(|p| !seen.contains(p)).collect();
        if expected != self.survivors {
            return false;
        }
        let read: Vec<&SimpleType> = self.survivors.iter().map(|&p| &items[p]).collect();
        read.len() == target.len() && read.iter().zip(target.items()).all(|(a, b)| *a == b)
    }

    /// Replays the links as adjacent contractions, returning the residue.
    pub fn replay(&self, ts: &TypeSeq) -> Option<TypeSeq> {
        let mut live: Vec<usize> = (0..ts.len()).collect();
        let mut pending: Vec<(usize, usize)> = self.links.clone();
        while !pending.is_empty() {
            let before = pending.len();
            pending.retain(|&(i, j)| {
                let pi = live.iter().position(|&p| p == i);
                match pi {
                    Some(pi) if live.get(pi + 1) == Some(&j) && ts.items()[i].contracts_with(&ts.items()[j]) => {
                        live.drain(pi..pi + 2);
                        false
                    }
                    _ => true,
                }
            });
            if pending.len() == before {
                return None;
            }
        }
        Some(TypeSeq(live.iter().map(|&p| ts.items()[p].clone()).collect()))
    }
}

fn matches_target(items: &[SimpleType], live: &[usize], target: &TypeSeq) -> bool {
    live.len() == target.len() && live.iter().zip(target.items()).all(|(&p, t)| &items[p] == t)
}

/// Finds one contraction-only reduction of `ts` to `target`.
///
/// Depth-first search that always tries the leftmost contractible adjacent
/// pair first, with memoisation of dead states.
pub fn reduce(ts: &TypeSeq, target: &TypeSeq) -> Option<Reduction> {
    fn go(
        items: &[SimpleType],
        live: &mut Vec<usize>,
        links: &mut Vec<(usize, usize)>,
        target: &TypeSeq,
        dead: &mut HashSet<Vec<usize>>,
    ) -> bool {
        if matches_target(items, live, target) {
            return true;
        }
        if live.len() < target.len() + 2 || !(live.len() - target.len()).is_multiple_of(2) {
            return false;
        }
        if dead.contains(live.as_slice()) {
            return false;
        }
        for k in 0..live.len() - 1 {
            let (i, j) = (live[k], live[k + 1]);
            if items[i].contracts_with(&items[j]) {
                live.drain(k..k + 2);
                links.push((i, j));
                if go(items, live, links, target, dead) {
                    return true;
                }
                links.pop();
                live.splice(k..k, [i, j]);
            }
        }
        dead.insert(live.clone());
        false
    }

    let mut live: Vec<usize> = (0..ts.len()).collect();
    let mut links = Vec::new();
    let mut dead = HashSet::new();
    go(ts.items(), &mut live, &mut links, target, &mut dead).then(|| Reduction::from_links(ts.len(), links))
}

/// Enumerates every distinct contraction-only reduction of `ts` to `target`.
pub fn reduce_all(ts: &TypeSeq, target: &TypeSeq) -> Vec<Reduction> {
    type Memo = HashMap<Vec<usize>, Vec<Vec<(usize, usize)>>>;

    fn go(items: &[SimpleType], live: &[usize], target: &TypeSeq, memo: &mut Memo) -> Vec<Vec<(usize, usize)>> {
        if let Some(hit) = memo.get(live) {
            return hit.clone();
        }
        let mut out: BTreeSet<Vec<(usize, usize)>> = BTreeSet::new();
        if matches_target(items, live, target) {
            out.insert(Vec::new());
        }
        if live.len() >= target.len() + 2 {
            for k in 0..live.len() - 1 {
                let (i, j) = (live[k], live[k + 1]);
                if items[i].contracts_with(&items[j]) {
                    let mut rest = live.to_vec();
                    rest.drain(k..k + 2);
                    for mut tail in go(items, &rest, target, memo) {
                        tail.push((i, j));
                        tail.sort_unstable();
                        out.insert(tail);
                    }
                }
            }
        }
        let out: Vec<_> = out.into_iter().collect();
        memo.insert(live.to_vec(), out.clone());
        out
    }

    let live: Vec<usize> = (0..ts.len()).collect();
    let mut memo = Memo::new();
    go(ts.items(), &live, target, &mut memo)
        .into_iter()
        .map(|links| Reduction::from_links(ts.len(), links))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub word: String,
    pub ty: TypeSeq,
    pub semantics_key: String,
}

/// Word-to-type assignments, read from a tab-separated file whose header
/// line `!alphabet ...` declares the basic types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    pub alphabet: Alphabet,
    pub entries: Vec<LexiconEntry>,
}

/// A successful typing of a word string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parse {
    pub entries: Vec<LexiconEntry>,
    /// Concatenated type of the whole string.
    pub types: TypeSeq,
    /// Positions in `types` covered by each word.
    pub spans: Vec<Range<usize>>,
    pub reduction: Reduction,
}

impl Lexicon {
    pub fn new(alphabet: Alphabet) -> Self {
        Lexicon {
            alphabet,
            entries: Vec::new(),
        }
    }

    pub fn add(&mut self, word: &str, ty: &str, key: &str) -> Result<(), PregroupError> {
        let ty = parse_type(ty, &self.alphabet)?;
        self.entries.push(LexiconEntry {
            word: word.to_string(),
            ty,
            semantics_key: key.to_string(),
        });
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, PregroupError> {
        let mut lexicon: Option<Lexicon> = None;
        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            if let Some(rest) = line.trim_start().strip_prefix("!alphabet") {
                if lexicon.is_some() {
                    return Err(PregroupError::Lexicon {
                        line: line_no,
                        message: "duplicate !alphabet header".into(),
                    });
                }
                let symbols: Vec<&str> = rest.split_whitespace().collect();
                if symbols.is_empty() {
                    return Err(PregroupError::Lexicon {
                        line: line_no,
                        message: "!alphabet declares no symbols".into(),
                    });
                }
                lexicon = Some(Lexicon::new(Alphabet::new(symbols)));
                continue;
            }
            let lex = lexicon.as_mut().ok_or_else(|| PregroupError::Lexicon {
                line: line_no,
                message: "entry before !alphabet header".into(),
            })?;
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            if fields.len() != 3 || fields.iter().any(|f| f.is_empty()) {
                return Err(PregroupError::Lexicon {
                    line: line_no,
                    message: "expected `word<TAB>type<TAB>semantics-key`".into(),
                });
            }
            lex.add(fields[0], fields[1], fields[2])
                .map_err(|e| PregroupError::Lexicon {
                    line: line_no,
                    message: e.to_string(),
                })?;
        }
        lexicon.ok_or(PregroupError::Lexicon {
            line: 0,
            message: "missing !alphabet header".into(),
        })
    }

    pub fn entries_for<'a>(&'a self, word: &'a str) -> impl Iterator<Item = &'a LexiconEntry> + 'a {
        self.entries.iter().filter(move |e| e.word == word)
    }

    /// Every combination of entries for `words`, in lexicon order with the
    /// last word varying fastest.
    pub fn typings(&self, words: &[&str]) -> Result<Vec<Vec<LexiconEntry>>, PregroupError> {
        let options: Vec<Vec<&LexiconEntry>> = words
            .iter()
            .map(|w| {
                let found: Vec<_> = self.entries_for(w).collect();
                if found.is_empty() {
                    Err(PregroupError::UnknownWord(w.to_string()))
                } else {
                    Ok(found)
                }
            })
            .collect::<Result<_, _>>()?;
        let mut out: Vec<Vec<LexiconEntry>> = vec![Vec::new()];
        for opts in &options {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    opts.iter().map(move |e| {
                        let mut next = prefix.clone();
                        next.push((*e).clone());
                        next
                    })
                })
                .collect();
        }
        Ok(out)
    }

    fn assemble(entries: Vec<LexiconEntry>) -> (Vec<LexiconEntry>, TypeSeq, Vec<Range<usize>>) {
        let mut types = TypeSeq::unit();
        let mut spans = Vec::with_capacity(entries.len());
        for e in &entries {
            let start = types.len();
            types = types.concat(&e.ty);
            spans.push(start..types.len());
        }
        (entries, types, spans)
    }

    /// First typing (see [`Lexicon::typings`]) that reduces to `target`,
    /// with the reduction found by [`reduce`].
    pub fn parse_words(&self, words: &[&str], target: &TypeSeq) -> Result<Option<Parse>, PregroupError> {
        for entries in self.typings(words)? {
            let (entries, types, spans) = Self::assemble(entries);
            if let Some(reduction) = reduce(&types, target) {
                return Ok(Some(Parse {
                    entries,
                    types,
                    spans,
                    reduction,
                }));
            }
        }
        Ok(None)
    }

    /// Every typing together with every reduction to `target`.
    pub fn parse_words_all(&self, words: &[&str], target: &TypeSeq) -> Result<Vec<Parse>, PregroupError> {
        let mut out = Vec::new();
        for entries in self.typings(words)? {
            let (entries, types, spans) = Self::assemble(entries);
            for reduction in reduce_all(&types, target) {
                out.push(Parse {
                    entries: entries.clone(),
                    types: types.clone(),
                    spans: spans.clone(),
                    reduction,
                });
            }
        }
        Ok(out)
    }
}
