//! From typed phrases to tensors.
//!
//! A [`TypeInterpretation`] sends each basic type to a space (or to the
//! monoidal unit when a model has no use for it). A phrase becomes a
//! diagram: the word states side by side, followed by one cup per link of
//! its pregroup reduction. Relative pronouns are not looked up in a model;
//! their meaning is built from caps, a merging spider and, when sentences
//! carry a space, a sentence-deleting spider.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::diagram::{self, DiagramError, MorphTerm};
use crate::pregroup::{parse_type, reduce, Alphabet, Parse, PregroupError, Reduction, SimpleType, TypeSeq};
use crate::tensor::{frob_zeta, tensordot, Space, Tensor, TensorError};

pub const SUBJECT_PRONOUN_KEY: &str = "rel:subj";
pub const OBJECT_PRONOUN_KEY: &str = "rel:obj";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemanticsError {
    #[error("unknown word `{0}`")]
    UnknownWord(String),
    #[error("basic type `{0}` has no space")]
    UnmappedSymbol(String),
    #[error("`{word}` has axes {got:?}, its type needs {expected:?}")]
    Shape {
        word: String,
        expected: Vec<Space>,
        got: Vec<Space>,
    },
    #[error("no meaning for `{word}` at type {ty}")]
    UnsupportedType { word: String, ty: String },
    #[error("invalid clause: {0}")]
    InvalidClause(String),
    #[error("model: {0}")]
    Model(String),
    #[error("`{0}` does not reduce to the requested type")]
    NoReduction(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Pregroup(#[from] PregroupError),
}

/// Basic type symbol to space; `None` maps the symbol to the unit.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TypeInterpretation {
    map: BTreeMap<String, Option<Space>>,
}

impl TypeInterpretation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, symbol: &str, space: &Space) -> Self {
        self.map.insert(symbol.to_string(), Some(space.clone()));
        self
    }

    /// Sends `symbol` to the unit, so its wires vanish.
    pub fn discard(mut self, symbol: &str) -> Self {
        self.map.insert(symbol.to_string(), None);
        self
    }

    pub fn space_of(&self, symbol: &str) -> Result<Option<&Space>, SemanticsError> {
        self.map
            .get(symbol)
            .map(Option::as_ref)
            .ok_or_else(|| SemanticsError::UnmappedSymbol(symbol.to_string()))
    }

    pub fn covers(&self, alphabet: &Alphabet) -> bool {
        alphabet.symbols().iter().all(|s| self.map.contains_key(s))
    }
}

/// One space per simple type; adjoint orders are forgotten.
pub fn interpret_typeseq(ts: &TypeSeq, ti: &TypeInterpretation) -> Result<Vec<Space>, SemanticsError> {
    let mut out = Vec::new();
    for t in ts.items() {
        if let Some(sp) = ti.space_of(&t.base)? {
            out.push(sp.clone());
        }
    }
    Ok(out)
}

pub fn noun_type() -> TypeSeq {
    TypeSeq::single(SimpleType::plain("n"))
}

pub fn sentence_type() -> TypeSeq {
    TypeSeq::single(SimpleType::plain("s"))
}

pub fn transitive_verb_type() -> TypeSeq {
    TypeSeq(vec![
        SimpleType::new("n", 1),
        SimpleType::plain("s"),
        SimpleType::new("n", -1),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PronounKind {
    /// `n^r n s^l n`: the head noun is the subject of the clause.
    SubjectRel,
    /// `n^r n n^ll s^l`: the head noun is the object of the clause.
    ObjectRel,
}

impl PronounKind {
    pub fn type_string(self) -> &'static str {
        match self {
            PronounKind::SubjectRel => "n^r n s^l n",
            PronounKind::ObjectRel => "n^r n n^ll s^l",
        }
    }

    pub fn pregroup_type(self) -> TypeSeq {
        parse_type(self.type_string(), &Alphabet::noun_sentence()).expect("pronoun types parse")
    }

    pub fn key(self) -> &'static str {
        match self {
            PronounKind::SubjectRel => SUBJECT_PRONOUN_KEY,
            PronounKind::ObjectRel => OBJECT_PRONOUN_KEY,
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        match key {
            SUBJECT_PRONOUN_KEY => Some(PronounKind::SubjectRel),
            OBJECT_PRONOUN_KEY => Some(PronounKind::ObjectRel),
            _ => None,
        }
    }
}

/// The pronoun as a diagram: two caps, then a merge of the two inner
/// wires and a fresh sentence wire (omitted when `sentence` is `None`).
pub fn pronoun_term(kind: PronounKind, noun: &Space, sentence: Option<&Space>) -> MorphTerm {
    let caps = MorphTerm::Cap(noun.clone()).par(MorphTerm::Cap(noun.clone()));
    let mu = MorphTerm::Spider(noun.clone(), 2, 1);
    let zeta = sentence.map(|s| MorphTerm::Spider(s.clone(), 0, 1));
    let id = || MorphTerm::Id(noun.clone());
    let pieces: Vec<MorphTerm> = match kind {
        PronounKind::SubjectRel => [Some(id()), Some(mu), zeta, Some(id())].into_iter().flatten().collect(),
        PronounKind::ObjectRel => [Some(id()), Some(mu), Some(id()), zeta].into_iter().flatten().collect(),
    };
    caps.seq(MorphTerm::par_all(pieces).expect("non-empty"))
}

/// Closed form of the pronoun: entry 1 exactly where the three noun
/// indices agree, for every sentence index.
pub fn pronoun_tensor(kind: PronounKind, noun: &Space, sentence: Option<&Space>) -> Tensor {
    let n = noun.clone();
    match (kind, sentence) {
        (_, None) => Tensor::from_fn(vec![n.clone(), n.clone(), n], |i| {
            (i[0] == i[1] && i[1] == i[2]) as u8 as f64
        }),
        (PronounKind::SubjectRel, Some(s)) => Tensor::from_fn(vec![n.clone(), n.clone(), s.clone(), n], |i| {
            (i[0] == i[1] && i[1] == i[3]) as u8 as f64
        }),
        (PronounKind::ObjectRel, Some(s)) => Tensor::from_fn(vec![n.clone(), n.clone(), n, s.clone()], |i| {
            (i[0] == i[1] && i[1] == i[2]) as u8 as f64
        }),
    }
}

/// Word meanings as seen by the semantic functor.
pub trait Model {
    fn interpretation(&self) -> TypeInterpretation;

    /// The tensor of the word with semantics key `key` at pregroup type `ty`.
    fn word_tensor(&self, key: &str, ty: &TypeSeq) -> Result<Tensor, SemanticsError>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypedWord {
    /// Surface form, used for labels.
    pub word: String,
    /// Name resolved by the model.
    pub key: String,
    pub ty: TypeSeq,
}

impl TypedWord {
    pub fn new(word: &str, key: &str, ty: TypeSeq) -> Self {
        TypedWord {
            word: word.to_string(),
            key: key.to_string(),
            ty,
        }
    }

    pub fn noun(key: &str) -> Self {
        Self::new(key, key, noun_type())
    }

    pub fn verb(key: &str) -> Self {
        Self::new(key, key, transitive_verb_type())
    }

    pub fn pronoun(kind: PronounKind) -> Self {
        let surface = match kind {
            PronounKind::SubjectRel => "who",
            PronounKind::ObjectRel => "whom",
        };
        Self::new(surface, kind.key(), kind.pregroup_type())
    }
}

pub fn typed_words(parse: &Parse) -> Vec<TypedWord> {
    parse
        .entries
        .iter()
        .map(|e| TypedWord::new(&e.word, &e.semantics_key, e.ty.clone()))
        .collect()
}

fn word_term(w: &TypedWord, m: &dyn Model, ti: &TypeInterpretation) -> Result<MorphTerm, SemanticsError> {
    let expected = interpret_typeseq(&w.ty, ti)?;
    if let Some(kind) = PronounKind::from_key(&w.key) {
        if w.ty != kind.pregroup_type() {
            return Err(SemanticsError::UnsupportedType {
                word: w.word.clone(),
                ty: w.ty.to_string(),
            });
        }
        let noun = ti
            .space_of("n")?
            .ok_or_else(|| SemanticsError::UnmappedSymbol("n".into()))?;
        return Ok(pronoun_term(kind, noun, ti.space_of("s")?));
    }
    let t = m.word_tensor(&w.key, &w.ty)?;
    if t.axes() != expected.as_slice() {
        return Err(SemanticsError::Shape {
            word: w.word.clone(),
            expected,
            got: t.axes().to_vec(),
        });
    }
    Ok(MorphTerm::named_state(w.word.clone(), t))
}

/// The diagram of a typed phrase: word meanings in parallel, then cups
/// for the links of `reduction`, innermost first.
pub fn phrase_term(words: &[TypedWord], reduction: &Reduction, m: &dyn Model) -> Result<MorphTerm, SemanticsError> {
    let ti = m.interpretation();
    let mut types = TypeSeq::unit();
    let mut terms = Vec::with_capacity(words.len());
    for w in words {
        types = types.concat(&w.ty);
        terms.push(word_term(w, m, &ti)?);
    }
    let mut term = MorphTerm::par_all(terms).ok_or_else(|| SemanticsError::InvalidClause("empty phrase".into()))?;

    // live simple-type positions and, for those with a space, their wire
    let mut live: Vec<(usize, Option<Space>)> = Vec::with_capacity(types.len());
    for (p, t) in types.items().iter().enumerate() {
        live.push((p, ti.space_of(&t.base)?.cloned()));
    }
    let mut links = reduction.links.clone();
    links.sort_by_key(|&(i, j)| (j - i, i));
    for (i, j) in links {
        let k = live
            .iter()
            .position(|&(p, _)| p == i)
            .filter(|&k| live.get(k + 1).map(|x| x.0) == Some(j))
            .ok_or_else(|| SemanticsError::InvalidClause(format!("link ({i}, {j}) is not contractible")))?;
        if let Some(sp) = live[k].1.clone() {
            let wires: Vec<&Space> = live.iter().filter_map(|(_, s)| s.as_ref()).collect();
            let before = live[..k].iter().filter(|(_, s)| s.is_some()).count();
            let layer = MorphTerm::par_all(
                wires[..before]
                    .iter()
                    .map(|s| MorphTerm::Id((*s).clone()))
                    .chain(std::iter::once(MorphTerm::Cup(sp)))
                    .chain(wires[before + 2..].iter().map(|s| MorphTerm::Id((*s).clone()))),
            )
            .expect("cup layer");
            term = term.seq(layer);
        }
        live.drain(k..k + 2);
    }
    Ok(term)
}

pub fn evaluate_phrase(words: &[TypedWord], reduction: &Reduction, m: &dyn Model) -> Result<Tensor, SemanticsError> {
    Ok(diagram::evaluate(&phrase_term(words, reduction, m)?)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseSpec {
    pub head_noun: String,
    pub pronoun: PronounKind,
    pub subject: Option<String>,
    pub verb: String,
    pub object: Option<String>,
}

impl ClauseSpec {
    /// `head who verb object`
    pub fn subject_clause(head: &str, verb: &str, object: &str) -> Self {
        ClauseSpec {
            head_noun: head.to_string(),
            pronoun: PronounKind::SubjectRel,
            subject: None,
            verb: verb.to_string(),
            object: Some(object.to_string()),
        }
    }

    /// `head whom subject verb`
    pub fn object_clause(head: &str, subject: &str, verb: &str) -> Self {
        ClauseSpec {
            head_noun: head.to_string(),
            pronoun: PronounKind::ObjectRel,
            subject: Some(subject.to_string()),
            verb: verb.to_string(),
            object: None,
        }
    }

    pub fn validate(&self) -> Result<(), SemanticsError> {
        let ok = match self.pronoun {
            PronounKind::SubjectRel => self.subject.is_none() && self.object.is_some(),
            PronounKind::ObjectRel => self.subject.is_some() && self.object.is_none(),
        };
        if ok {
            Ok(())
        } else {
            Err(SemanticsError::InvalidClause(format!(
                "{:?} clause on `{}` must leave exactly the head's slot empty",
                self.pronoun, self.head_noun
            )))
        }
    }

    /// The word of the clause other than head and verb.
    pub fn argument(&self) -> &str {
        self.subject.as_deref().or(self.object.as_deref()).unwrap_or_default()
    }

    /// Words after the head, in surface order.
    fn tail_words(&self) -> Vec<TypedWord> {
        let pron = TypedWord::pronoun(self.pronoun);
        match self.pronoun {
            PronounKind::SubjectRel => vec![pron, TypedWord::verb(&self.verb), TypedWord::noun(self.argument())],
            PronounKind::ObjectRel => vec![pron, TypedWord::noun(self.argument()), TypedWord::verb(&self.verb)],
        }
    }
}

fn check_chain(chain: &[ClauseSpec]) -> Result<(), SemanticsError> {
    let first = chain
        .first()
        .ok_or_else(|| SemanticsError::InvalidClause("empty clause chain".into()))?;
    for c in chain {
        c.validate()?;
        if c.head_noun != first.head_noun {
            return Err(SemanticsError::InvalidClause(format!(
                "clauses share no head: `{}` vs `{}`",
                first.head_noun, c.head_noun
            )));
        }
    }
    Ok(())
}

/// Head noun followed by every clause of the chain.
pub fn chain_words(chain: &[ClauseSpec]) -> Result<Vec<TypedWord>, SemanticsError> {
    check_chain(chain)?;
    let mut words = vec![TypedWord::noun(&chain[0].head_noun)];
    for c in chain {
        words.extend(c.tail_words());
    }
    Ok(words)
}

/// The reading in which every pronoun attaches to the head (through the
/// pronouns before it).
pub fn chain_reduction(chain: &[ClauseSpec]) -> Result<Reduction, SemanticsError> {
    check_chain(chain)?;
    let mut links = Vec::new();
    let mut carrier = 0usize;
    let mut p = 1usize;
    for c in chain {
        match c.pronoun {
            PronounKind::SubjectRel => {
                let (v, o) = (p + 4, p + 7);
                links.extend([(carrier, p), (p + 3, v), (p + 2, v + 1), (v + 2, o)]);
            }
            PronounKind::ObjectRel => {
                let (q, v) = (p + 4, p + 5);
                links.extend([(carrier, p), (q, v), (p + 3, v + 1), (p + 2, v + 2)]);
            }
        }
        carrier = p + 1;
        p += 8;
    }
    links.sort_unstable();
    Ok(Reduction {
        links,
        survivors: vec![carrier],
    })
}

/// Reads a typed parse back as a clause chain on one head, if it is one.
pub fn recognize_chain(words: &[TypedWord], reduction: &Reduction) -> Option<Vec<ClauseSpec>> {
    let (head, rest) = words.split_first()?;
    if head.ty != noun_type() || PronounKind::from_key(&head.key).is_some() {
        return None;
    }
    let is_noun = |w: &TypedWord| w.ty == noun_type() && PronounKind::from_key(&w.key).is_none();
    let is_verb = |w: &TypedWord| w.ty == transitive_verb_type();
    let mut chain = Vec::new();
    for group in rest.chunks(3) {
        let [pron, a, b] = group else { return None };
        let kind = PronounKind::from_key(&pron.key)?;
        if pron.ty != kind.pregroup_type() {
            return None;
        }
        let c = match kind {
            PronounKind::SubjectRel if is_verb(a) && is_noun(b) => {
                ClauseSpec::subject_clause(&head.key, &a.key, &b.key)
            }
            PronounKind::ObjectRel if is_noun(a) && is_verb(b) => ClauseSpec::object_clause(&head.key, &a.key, &b.key),
            _ => return None,
        };
        chain.push(c);
    }
    if chain.is_empty() {
        return None;
    }
    let canonical = chain_reduction(&chain).ok()?;
    (canonical.links == reduction.links).then_some(chain)
}

/// Verb as an `N (x) N` matrix, deleting a sentence axis if present.
fn verb_matrix(verb: &str, m: &dyn Model) -> Result<Tensor, SemanticsError> {
    let v = m.word_tensor(verb, &transitive_verb_type())?;
    match v.order() {
        2 => Ok(v),
        3 => {
            let s = v.axes()[1].clone();
            Ok(tensordot(&v, &frob_zeta(&s), &[(1, 0)])?)
        }
        _ => Err(SemanticsError::Shape {
            word: verb.to_string(),
            expected: Vec::new(),
            got: v.axes().to_vec(),
        }),
    }
}

fn noun_vector(word: &str, m: &dyn Model) -> Result<Tensor, SemanticsError> {
    let v = m.word_tensor(word, &noun_type())?;
    if v.order() != 1 {
        return Err(SemanticsError::Shape {
            word: word.to_string(),
            expected: Vec::new(),
            got: v.axes().to_vec(),
        });
    }
    Ok(v)
}

/// The verb applied to the clause's argument: `V x obj` for subject
/// clauses, `V^T x subj` for object clauses.
pub fn verb_application(c: &ClauseSpec, m: &dyn Model) -> Result<Tensor, SemanticsError> {
    c.validate()?;
    let v = verb_matrix(&c.verb, m)?;
    let arg = noun_vector(c.argument(), m)?;
    let out = match c.pronoun {
        PronounKind::SubjectRel => tensordot(&v, &arg, &[(1, 0)])?,
        PronounKind::ObjectRel => tensordot(&arg, &v, &[(0, 0)])?,
    };
    Ok(out)
}

/// Full diagram evaluation of a single relative clause.
pub fn clause_vector(c: &ClauseSpec, m: &dyn Model) -> Result<Tensor, SemanticsError> {
    c.validate()?;
    let words = chain_words(std::slice::from_ref(c))?;
    let types = words.iter().fold(TypeSeq::unit(), |acc, w| acc.concat(&w.ty));
    let reduction = reduce(&types, &noun_type()).ok_or_else(|| SemanticsError::NoReduction(format!("{c:?}")))?;
    evaluate_phrase(&words, &reduction, m)
}

/// Normal form of a relative clause: `head ⊙ (verb applied to argument)`.
pub fn clause_vector_fast(c: &ClauseSpec, m: &dyn Model) -> Result<Tensor, SemanticsError> {
    let head = noun_vector(&c.head_noun, m)?;
    Ok(head.hadamard(&verb_application(c, m)?)?)
}

/// `subject verb object`, contracted directly. The result lives in the
/// sentence space, or is a scalar when the model discards sentences.
pub fn sentence_vector(subject: &str, verb: &str, object: &str, m: &dyn Model) -> Result<Tensor, SemanticsError> {
    let s = noun_vector(subject, m)?;
    let o = noun_vector(object, m)?;
    let v = m.word_tensor(verb, &transitive_verb_type())?;
    let last = v
        .order()
        .checked_sub(1)
        .filter(|&k| k >= 1)
        .ok_or_else(|| SemanticsError::Shape {
            word: verb.to_string(),
            expected: Vec::new(),
            got: v.axes().to_vec(),
        })?;
    let vo = tensordot(&v, &o, &[(last, 0)])?;
    Ok(tensordot(&s, &vo, &[(0, 0)])?)
}

/// Several clauses on one head, evaluated as one diagram before any
/// spider fusion.
pub fn nested_clause_vector(chain: &[ClauseSpec], m: &dyn Model) -> Result<Tensor, SemanticsError> {
    let words = chain_words(chain)?;
    let reduction = chain_reduction(chain)?;
    evaluate_phrase(&words, &reduction, m)
}

/// Fused form of a clause chain: the head times every verb application.
pub fn nested_clause_vector_fast(chain: &[ClauseSpec], m: &dyn Model) -> Result<Tensor, SemanticsError> {
    check_chain(chain)?;
    let mut acc = noun_vector(&chain[0].head_noun, m)?;
    for c in chain {
        acc = acc.hadamard(&verb_application(c, m)?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Tolerance;
    use std::collections::HashMap;

    /// Words looked up by key; nouns and verbs kept apart.
    struct Table {
        ti: TypeInterpretation,
        nouns: HashMap<String, Tensor>,
        verbs: HashMap<String, Tensor>,
    }

    impl Model for Table {
        fn interpretation(&self) -> TypeInterpretation {
            self.ti.clone()
        }

        fn word_tensor(&self, key: &str, ty: &TypeSeq) -> Result<Tensor, SemanticsError> {
            let table = if *ty == noun_type() { &self.nouns } else { &self.verbs };
            table
                .get(key)
                .cloned()
                .ok_or_else(|| SemanticsError::UnknownWord(key.into()))
        }
    }

    fn n2() -> Space {
        Space::numbered("N", 2).unwrap()
    }

    fn bites_model() -> Table {
        let n = n2();
        let mut nouns = HashMap::new();
        nouns.insert("dog".into(), Tensor::vector(&n, vec![1.0, 2.0]).unwrap());
        nouns.insert("men".into(), Tensor::vector(&n, vec![3.0, 1.0]).unwrap());
        nouns.insert("ones".into(), Tensor::vector(&n, vec![1.0, 1.0]).unwrap());
        nouns.insert("zero".into(), Tensor::vector(&n, vec![0.0, 0.0]).unwrap());
        let mut verbs = HashMap::new();
        verbs.insert(
            "bites".into(),
            Tensor::new(vec![n.clone(), n.clone()], vec![1.0, 0.0, 2.0, 1.0]).unwrap(),
        );
        verbs.insert("same".into(), Tensor::identity(&n));
        Table {
            ti: TypeInterpretation::new().with("n", &n).discard("s"),
            nouns,
            verbs,
        }
    }

    #[test]
    fn interprets_types() {
        let n = Space::numbered("N", 3).unwrap();
        let s = Space::numbered("S", 2).unwrap();
        let ti = TypeInterpretation::new().with("n", &n).with("s", &s);
        let a = Alphabet::noun_sentence();
        assert_eq!(
            interpret_typeseq(&parse_type("n^r s n^l", &a).unwrap(), &ti).unwrap(),
            vec![n.clone(), s.clone(), n.clone()]
        );
        assert!(interpret_typeseq(&TypeSeq::unit(), &ti).unwrap().is_empty());
        assert_eq!(
            interpret_typeseq(&parse_type("n^r n n^ll s^l", &a).unwrap(), &ti).unwrap(),
            vec![n.clone(), n.clone(), n.clone(), s.clone()]
        );
        let partial = TypeInterpretation::new().with("n", &n);
        assert!(matches!(
            interpret_typeseq(&sentence_type(), &partial),
            Err(SemanticsError::UnmappedSymbol(_))
        ));
        assert!(ti.covers(&a));
    }

    #[test]
    fn pronoun_tensor_entries() {
        let n = n2();
        let s = Space::numbered("S", 1).unwrap();
        let t = pronoun_tensor(PronounKind::SubjectRel, &n, Some(&s));
        let nonzero: Vec<Vec<usize>> = (0..2)
            .flat_map(|i| (0..2).flat_map(move |j| (0..2).map(move |k| vec![i, j, 0, k])))
            .filter(|idx| t.get(idx) != 0.0)
            .collect();
        assert_eq!(nonzero, vec![vec![0, 0, 0, 0], vec![1, 1, 0, 1]]);
        let evaluated = diagram::evaluate(&pronoun_term(PronounKind::SubjectRel, &n, Some(&s))).unwrap();
        assert_eq!(evaluated, t);

        let one = Space::numbered("N", 1).unwrap();
        let s3 = Space::numbered("S", 3).unwrap();
        let obj = pronoun_tensor(PronounKind::ObjectRel, &one, Some(&s3));
        assert_eq!(obj.data(), &[1.0, 1.0, 1.0]);

        // same tensor up to moving the sentence axis
        let s2 = Space::numbered("S", 2).unwrap();
        let subj = pronoun_tensor(PronounKind::SubjectRel, &n, Some(&s2));
        let obj = pronoun_tensor(PronounKind::ObjectRel, &n, Some(&s2));
        assert_eq!(subj.permute(&[0, 1, 3, 2]).unwrap(), obj);
    }

    #[test]
    fn dog_that_bites_men() {
        let m = bites_model();
        let c = ClauseSpec::subject_clause("dog", "bites", "men");
        let fast = clause_vector_fast(&c, &m).unwrap();
        assert_eq!(fast.data(), &[3.0, 14.0]);
        let full = clause_vector(&c, &m).unwrap();
        assert!(full.approx_eq(&fast, Tolerance::DEFAULT));
        let ident = ClauseSpec::subject_clause("ones", "same", "men");
        assert_eq!(clause_vector_fast(&ident, &m).unwrap().data(), &[3.0, 1.0]);
        let zero = ClauseSpec::subject_clause("zero", "bites", "men");
        assert_eq!(clause_vector(&zero, &m).unwrap().data(), &[0.0, 0.0]);
    }

    #[test]
    fn object_clause_uses_transpose() {
        let m = bites_model();
        // men whom dog bites: men ⊙ (bites^T x dog) = (3,1) ⊙ (1*1+2*2, 0*1+1*2)
        let c = ClauseSpec::object_clause("men", "dog", "bites");
        assert_eq!(clause_vector_fast(&c, &m).unwrap().data(), &[15.0, 2.0]);
        assert!(clause_vector(&c, &m)
            .unwrap()
            .approx_eq(&clause_vector_fast(&c, &m).unwrap(), Tolerance::DEFAULT));
    }

    #[test]
    fn chain_reduction_is_a_valid_reduction() {
        let chain = [
            ClauseSpec::object_clause("movies", "Mary", "liked"),
            ClauseSpec::subject_clause("movies", "won", "awards"),
        ];
        let words = chain_words(&chain).unwrap();
        let types = words.iter().fold(TypeSeq::unit(), |acc, w| acc.concat(&w.ty));
        let r = chain_reduction(&chain).unwrap();
        assert!(r.is_valid_for(&types, &noun_type()));
        assert!(crate::pregroup::reduce_all(&types, &noun_type()).contains(&r));
        assert_eq!(recognize_chain(&words, &r), Some(chain.to_vec()));
        let single = [ClauseSpec::object_clause("men", "Mary", "loves")];
        let r1 = chain_reduction(&single).unwrap();
        assert_eq!(r1.links, vec![(0, 1), (3, 8), (4, 7), (5, 6)]);
    }

    #[test]
    fn invalid_clauses_are_rejected() {
        let mut c = ClauseSpec::subject_clause("dog", "bites", "men");
        c.subject = Some("cat".into());
        assert!(matches!(c.validate(), Err(SemanticsError::InvalidClause(_))));
        let chain = [
            ClauseSpec::subject_clause("dog", "bites", "men"),
            ClauseSpec::subject_clause("men", "bites", "dog"),
        ];
        assert!(chain_words(&chain).is_err());
        let m = bites_model();
        let unknown = ClauseSpec::subject_clause("cat", "bites", "men");
        assert!(matches!(
            clause_vector(&unknown, &m),
            Err(SemanticsError::UnknownWord(_))
        ));
    }

    #[test]
    fn sentence_with_sentence_space() {
        let n = n2();
        let s = Space::numbered("S", 2).unwrap();
        let mut nouns = HashMap::new();
        nouns.insert("a".into(), Tensor::vector(&n, vec![1.0, 2.0]).unwrap());
        nouns.insert("b".into(), Tensor::vector(&n, vec![0.5, -1.0]).unwrap());
        let mut verbs = HashMap::new();
        let cube = Tensor::from_fn(vec![n.clone(), s.clone(), n.clone()], |i| {
            (i[0] + 2 * i[1] + 3 * i[2]) as f64
        });
        verbs.insert("v".into(), cube);
        let m = Table {
            ti: TypeInterpretation::new().with("n", &n).with("s", &s),
            nouns,
            verbs,
        };
        let direct = sentence_vector("a", "v", "b", &m).unwrap();
        let words = [TypedWord::noun("a"), TypedWord::verb("v"), TypedWord::noun("b")];
        let types = words.iter().fold(TypeSeq::unit(), |acc, w| acc.concat(&w.ty));
        let r = reduce(&types, &sentence_type()).unwrap();
        let via_diagram = evaluate_phrase(&words, &r, &m).unwrap();
        assert_eq!(direct.axes(), &[s]);
        assert!(direct.approx_eq(&via_diagram, Tolerance::DEFAULT));
        let c = ClauseSpec::subject_clause("a", "v", "b");
        assert!(clause_vector(&c, &m)
            .unwrap()
            .approx_eq(&clause_vector_fast(&c, &m).unwrap(), Tolerance::DEFAULT));
    }
}
