//! Word meanings: truth-theoretic worlds, set/relation embeddings and
//! corpus-style distributional models.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::pregroup::TypeSeq;
use crate::semantics::{
    noun_type, transitive_verb_type, ClauseSpec, Model, PronounKind, SemanticsError, TypeInterpretation, TypedWord,
};
use crate::tensor::{tensor_product, Space, Tensor, TensorError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown word `{0}`")]
    UnknownWord(String),
    #[error("unknown individual `{0}`")]
    UnknownIndividual(String),
    #[error("`{word}`: weight {value} is outside [0, 1]")]
    Degree { word: String, value: f64 },
    #[error("`{word}`: `{entry}` is listed twice")]
    DuplicateEntry { word: String, entry: String },
    #[error("`{0}` is defined twice")]
    Redefined(String),
    #[error("the universe is empty")]
    EmptyUniverse,
    #[error("`{word}` has {got} components, expected {expected}")]
    Dimension { word: String, expected: usize, got: usize },
    #[error("no embeddings for: {}", .0.join(", "))]
    MissingEmbeddings(Vec<String>),
    #[error("{subject} {verb} {object}: count {count} must be finite and nonnegative")]
    Count {
        subject: String,
        verb: String,
        object: String,
        count: f64,
    },
    #[error("`{0}` occurs in no triple")]
    NoTriples(String),
    #[error("no words left to combine")]
    EmptyPhrase,
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

impl From<ModelError> for SemanticsError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::UnknownWord(w) => SemanticsError::UnknownWord(w),
            ModelError::Tensor(t) => SemanticsError::Tensor(t),
            other => SemanticsError::Model(other.to_string()),
        }
    }
}

/// Accepts decimals and fractions such as `1/4`.
pub fn parse_weight(s: &str) -> Option<f64> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
            if b == 0.0 {
                return None;
            }
            a / b
        }
        None => s.parse().ok()?,
    };
    v.is_finite().then_some(v)
}

fn check_degree(word: &str, value: f64) -> Result<(), ModelError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(ModelError::Degree {
            word: word.to_string(),
            value,
        })
    }
}

/// Content lines of a text file with their 1-based numbers, `#` comments removed.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

/// A world of individuals. Nouns are weighted sums of individuals, verbs
/// weighted sums of (subject, object) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthModel {
    space: Space,
    nouns: BTreeMap<String, Vec<(usize, f64)>>,
    verbs: BTreeMap<String, Vec<(usize, usize, f64)>>,
    sentence: Option<Space>,
}

impl TruthModel {
    pub fn new<I, S>(universe: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = universe.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(ModelError::EmptyUniverse);
        }
        let space = Space::new("N", labels).map_err(|e| match e {
            TensorError::DuplicateLabel { label, .. } => ModelError::Redefined(label),
            other => ModelError::Tensor(other),
        })?;
        Ok(TruthModel {
            space,
            nouns: BTreeMap::new(),
            verbs: BTreeMap::new(),
            sentence: None,
        })
    }

    /// Verbs become `N (x) S (x) N` cubes over a one-dimensional `S`
    /// instead of `N (x) N` matrices.
    pub fn with_sentence_axis(mut self, on: bool) -> Self {
        self.sentence = on.then(|| Space::new("S", ["true"]).expect("one label"));
        self
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn universe(&self) -> &[String] {
        self.space.basis_labels()
    }

    pub fn sentence_space(&self) -> Option<&Space> {
        self.sentence.as_ref()
    }

    fn individual(&self, label: &str) -> Result<usize, ModelError> {
        self.space
            .index_of(label)
            .ok_or_else(|| ModelError::UnknownIndividual(label.to_string()))
    }

    pub fn add_noun(&mut self, word: &str, members: &[(&str, f64)]) -> Result<(), ModelError> {
        if self.nouns.contains_key(word) || self.verbs.contains_key(word) {
            return Err(ModelError::Redefined(word.to_string()));
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(members.len());
        for &(label, w) in members {
            check_degree(word, w)?;
            let i = self.individual(label)?;
            if !seen.insert(i) {
                return Err(ModelError::DuplicateEntry {
                    word: word.to_string(),
                    entry: label.to_string(),
                });
            }
            out.push((i, w));
        }
        self.nouns.insert(word.to_string(), out);
        Ok(())
    }

    pub fn add_verb(&mut self, word: &str, pairs: &[(&str, &str, f64)]) -> Result<(), ModelError> {
        if self.nouns.contains_key(word) || self.verbs.contains_key(word) {
            return Err(ModelError::Redefined(word.to_string()));
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(pairs.len());
        for &(subj, obj, w) in pairs {
            check_degree(word, w)?;
            let (i, j) = (self.individual(subj)?, self.individual(obj)?);
            if !seen.insert((i, j)) {
                return Err(ModelError::DuplicateEntry {
                    word: word.to_string(),
                    entry: format!("{subj},{obj}"),
                });
            }
            out.push((i, j, w));
        }
        self.verbs.insert(word.to_string(), out);
        Ok(())
    }

    pub fn has_noun(&self, word: &str) -> bool {
        self.nouns.contains_key(word) || self.space.index_of(word).is_some()
    }

    pub fn has_verb(&self, word: &str) -> bool {
        self.verbs.contains_key(word)
    }

    /// Reads the `!universe` / `!noun` / `!verb` text format.
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let err = |line: usize, message: String| ModelError::Parse { line, message };
        let mut model: Option<TruthModel> = None;
        for (line, content) in content_lines(text) {
            let (directive, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
            let rest = rest.trim();
            match directive {
                "!universe" => {
                    if model.is_some() {
                        return Err(err(line, "second !universe".into()));
                    }
                    let labels = rest
                        .split(|c: char| c == ',' || c.is_whitespace())
                        .filter(|s| !s.is_empty());
                    model = Some(TruthModel::new(labels).map_err(|e| err(line, e.to_string()))?);
                }
                "!noun" | "!verb" => {
                    let m = model
                        .as_mut()
                        .ok_or_else(|| err(line, format!("{directive} before !universe")))?;
                    let (word, body) = rest
                        .split_once(':')
                        .ok_or_else(|| err(line, "expected `word: ...`".into()))?;
                    let word = word.trim();
                    if word.is_empty() {
                        return Err(err(line, "missing word".into()));
                    }
                    let weighted = |item: &str| -> Result<(String, f64), ModelError> {
                        match item.split_once('=') {
                            Some((k, w)) => {
                                let v =
                                    parse_weight(w).ok_or_else(|| err(line, format!("bad weight `{}`", w.trim())))?;
                                Ok((k.trim().to_string(), v))
                            }
                            None => Ok((item.trim().to_string(), 1.0)),
                        }
                    };
                    let result = if directive == "!noun" {
                        let items = body
                            .split(',')
                            .map(str::trim)
                            .filter(|s| !s.is_empty())
                            .map(weighted)
                            .collect::<Result<Vec<_>, _>>()?;
                        let refs: Vec<(&str, f64)> = items.iter().map(|(k, w)| (k.as_str(), *w)).collect();
                        m.add_noun(word, &refs)
                    } else {
                        let mut items = Vec::new();
                        for item in body.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                            let (pair, w) = weighted(item)?;
                            let (s, o) = pair
                                .split_once(',')
                                .ok_or_else(|| err(line, format!("expected `subject,object` in `{item}`")))?;
                            items.push((s.trim().to_string(), o.trim().to_string(), w));
                        }
                        let refs: Vec<(&str, &str, f64)> =
                            items.iter().map(|(s, o, w)| (s.as_str(), o.as_str(), *w)).collect();
                        m.add_verb(word, &refs)
                    };
                    result.map_err(|e| err(line, e.to_string()))?;
                }
                other => return Err(err(line, format!("unknown directive `{other}`"))),
            }
        }
        model.ok_or(ModelError::Parse {
            line: 0,
            message: "missing !universe".into(),
        })
    }
}

/// A common noun as the weighted sum of its individuals; an individual's
/// own name gives its basis vector.
pub fn truth_noun_vector(w: &str, tm: &TruthModel) -> Result<Tensor, ModelError> {
    let mut data = vec![0.0; tm.space.dim()];
    if let Some(members) = tm.nouns.get(w) {
        for &(i, weight) in members {
            data[i] = weight;
        }
    } else if let Some(i) = tm.space.index_of(w) {
        data[i] = 1.0;
    } else {
        return Err(ModelError::UnknownWord(w.to_string()));
    }
    Ok(Tensor::vector(&tm.space, data)?)
}

/// Subject-by-object matrix of degrees.
pub fn truth_verb_matrix(w: &str, tm: &TruthModel) -> Result<Tensor, ModelError> {
    let pairs = tm.verbs.get(w).ok_or_else(|| ModelError::UnknownWord(w.to_string()))?;
    let mut t = Tensor::zeros(vec![tm.space.clone(), tm.space.clone()]);
    for &(i, j, a) in pairs {
        t.set(&[i, j], a);
    }
    Ok(t)
}

impl Model for TruthModel {
    fn interpretation(&self) -> TypeInterpretation {
        let ti = TypeInterpretation::new().with("n", &self.space);
        match &self.sentence {
            Some(s) => ti.with("s", s),
            None => ti.discard("s"),
        }
    }

    fn word_tensor(&self, key: &str, ty: &TypeSeq) -> Result<Tensor, SemanticsError> {
        if *ty == noun_type() {
            return Ok(truth_noun_vector(key, self)?);
        }
        if *ty == transitive_verb_type() {
            let m = truth_verb_matrix(key, self)?;
            return Ok(match &self.sentence {
                None => m,
                Some(s) => {
                    let n = self.space.clone();
                    Tensor::from_fn(vec![n.clone(), s.clone(), n], |i| m.get(&[i[0], i[2]]))
                }
            });
        }
        Err(SemanticsError::UnsupportedType {
            word: key.to_string(),
            ty: ty.to_string(),
        })
    }
}

/// Sets and relations over a finite universe.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PredicateWorld {
    pub universe: Vec<String>,
    pub unary: BTreeMap<String, BTreeSet<usize>>,
    pub binary: BTreeMap<String, BTreeSet<(usize, usize)>>,
}

impl PredicateWorld {
    pub fn new<I, S>(universe: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        PredicateWorld {
            universe: universe.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    pub fn size(&self) -> usize {
        self.universe.len()
    }

    pub fn space(&self) -> Space {
        Space::new("N", self.universe.iter().cloned()).expect("distinct universe labels")
    }

    /// A common noun's extension, or the singleton of a named individual.
    pub fn denotation(&self, word: &str) -> Result<BTreeSet<usize>, ModelError> {
        if let Some(set) = self.unary.get(word) {
            return Ok(set.clone());
        }
        self.universe
            .iter()
            .position(|u| u == word)
            .map(|i| BTreeSet::from([i]))
            .ok_or_else(|| ModelError::UnknownWord(word.to_string()))
    }

    pub fn relation(&self, word: &str) -> Result<&BTreeSet<(usize, usize)>, ModelError> {
        self.binary
            .get(word)
            .ok_or_else(|| ModelError::UnknownWord(word.to_string()))
    }

    /// The 0/1 truth model with the same extensions.
    pub fn truth_model(&self) -> TruthModel {
        let mut tm = TruthModel::new(self.universe.iter().cloned()).expect("non-empty universe");
        for (w, set) in &self.unary {
            let members: Vec<(&str, f64)> = set.iter().map(|&i| (self.universe[i].as_str(), 1.0)).collect();
            tm.add_noun(w, &members).expect("members drawn from the universe");
        }
        for (w, rel) in &self.binary {
            let pairs: Vec<(&str, &str, f64)> = rel
                .iter()
                .map(|&(i, j)| (self.universe[i].as_str(), self.universe[j].as_str(), 1.0))
                .collect();
            tm.add_verb(w, &pairs).expect("pairs drawn from the universe");
        }
        tm
    }
}

/// The clause read as a set: members of the head related by the verb to
/// some member of the argument (subject clauses) or reached from some
/// member of the argument (object clauses).
pub fn predicate_clause_oracle(c: &ClauseSpec, pw: &PredicateWorld) -> Result<BTreeSet<usize>, ModelError> {
    c.validate().map_err(|e| ModelError::Parse {
        line: 0,
        message: e.to_string(),
    })?;
    let head = pw.denotation(&c.head_noun)?;
    let arg = pw.denotation(c.argument())?;
    let rel = pw.relation(&c.verb)?;
    let mut out = BTreeSet::new();
    for x in 0..pw.size() {
        if !head.contains(&x) {
            continue;
        }
        let related = (0..pw.size()).any(|y| {
            arg.contains(&y)
                && match c.pronoun {
                    PronounKind::SubjectRel => rel.contains(&(x, y)),
                    PronounKind::ObjectRel => rel.contains(&(y, x)),
                }
        });
        if related {
            out.insert(x);
        }
    }
    Ok(out)
}

pub fn embed_set(set: &BTreeSet<usize>, pw: &PredicateWorld) -> Tensor {
    let sp = pw.space();
    Tensor::from_fn(vec![sp], |i| set.contains(&i[0]) as u8 as f64)
}

pub fn embed_relation(rel: &BTreeSet<(usize, usize)>, pw: &PredicateWorld) -> Tensor {
    let sp = pw.space();
    Tensor::from_fn(vec![sp.clone(), sp], |i| rel.contains(&(i[0], i[1])) as u8 as f64)
}

/// Set intersection through the merging map: a pointwise product.
pub fn intersect_mu(a: &Tensor, b: &Tensor) -> Result<Tensor, ModelError> {
    if a.order() != 1 {
        return Err(ModelError::Tensor(TensorError::WrongOrder {
            expected: 1,
            got: a.order(),
        }));
    }
    Ok(a.hadamard(b)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerbKind {
    /// Sum of subject-object outer products over the verb's triples.
    Relational,
    /// The verb's own vector tensored with itself.
    Kronecker,
    /// Relational matrix with the subject index copied onto a middle axis.
    CopySubject,
    /// Relational matrix with the object index copied onto a middle axis.
    CopyObject,
}

impl VerbKind {
    pub const ALL: [VerbKind; 4] = [
        VerbKind::Relational,
        VerbKind::Kronecker,
        VerbKind::CopySubject,
        VerbKind::CopyObject,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VerbKind::Relational => "relational",
            VerbKind::Kronecker => "kronecker",
            VerbKind::CopySubject => "copy-subject",
            VerbKind::CopyObject => "copy-object",
        }
    }
}

impl fmt::Display for VerbKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VerbKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        VerbKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            format!("unknown verb kind `{s}` (expected relational, kronecker, copy-subject or copy-object)")
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Triple {
    pub subject: String,
    pub verb: String,
    pub object: String,
    pub count: f64,
}

impl Triple {
    pub fn new(subject: &str, verb: &str, object: &str, count: f64) -> Self {
        Triple {
            subject: subject.to_string(),
            verb: verb.to_string(),
            object: object.to_string(),
            count,
        }
    }
}

/// Reads `word <TAB> v1 <TAB> ... <TAB> vd` lines.
pub fn parse_embeddings(text: &str) -> Result<Vec<(String, Vec<f64>)>, ModelError> {
    let mut out = Vec::new();
    for (line, content) in content_lines(text) {
        let mut fields = content.split('\t').map(str::trim);
        let word = fields.next().unwrap_or_default().to_string();
        let values = fields
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| ModelError::Parse {
                        line,
                        message: format!("bad component `{f}`"),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if values.is_empty() {
            return Err(ModelError::Parse {
                line,
                message: format!("`{word}` has no components"),
            });
        }
        out.push((word, values));
    }
    Ok(out)
}

/// Reads `subject <TAB> verb <TAB> object <TAB> count` lines.
pub fn parse_triples(text: &str) -> Result<Vec<Triple>, ModelError> {
    let mut out = Vec::new();
    for (line, content) in content_lines(text) {
        let fields: Vec<&str> = content.split('\t').map(str::trim).collect();
        let [s, v, o, c] = fields.as_slice() else {
            return Err(ModelError::Parse {
                line,
                message: format!("expected 4 fields, found {}", fields.len()),
            });
        };
        let count = c.parse::<f64>().map_err(|_| ModelError::Parse {
            line,
            message: format!("bad count `{c}`"),
        })?;
        if !count.is_finite() || count < 0.0 {
            return Err(ModelError::Parse {
                line,
                message: format!("count {count} must be finite and nonnegative"),
            });
        }
        out.push(Triple::new(s, v, o, count));
    }
    Ok(out)
}

/// Embeddings plus subject-verb-object counts.
#[derive(Debug, Clone, PartialEq)]
pub struct DistModel {
    space: Space,
    embeddings: BTreeMap<String, Tensor>,
    triples: Vec<Triple>,
    verb_kind: VerbKind,
}

impl DistModel {
    pub fn new(
        embeddings: Vec<(String, Vec<f64>)>,
        triples: Vec<Triple>,
        verb_kind: VerbKind,
    ) -> Result<Self, ModelError> {
        let dim = embeddings
            .first()
            .map(|(_, v)| v.len())
            .ok_or(ModelError::EmptyPhrase)?;
        let space = Space::numbered("N", dim)?;
        Self::with_space(space, embeddings, triples, verb_kind)
    }

    pub fn with_space(
        space: Space,
        embeddings: Vec<(String, Vec<f64>)>,
        triples: Vec<Triple>,
        verb_kind: VerbKind,
    ) -> Result<Self, ModelError> {
        let mut map = BTreeMap::new();
        for (word, values) in embeddings {
            if values.len() != space.dim() {
                return Err(ModelError::Dimension {
                    word,
                    expected: space.dim(),
                    got: values.len(),
                });
            }
            let t = Tensor::vector(&space, values)?;
            if map.insert(word.clone(), t).is_some() {
                return Err(ModelError::Redefined(word));
            }
        }
        let mut missing = BTreeSet::new();
        for t in &triples {
            if !t.count.is_finite() || t.count < 0.0 {
                return Err(ModelError::Count {
                    subject: t.subject.clone(),
                    verb: t.verb.clone(),
                    object: t.object.clone(),
                    count: t.count,
                });
            }
            for w in [&t.subject, &t.object] {
                if !map.contains_key(w) {
                    missing.insert(w.clone());
                }
            }
        }
        if !missing.is_empty() {
            return Err(ModelError::MissingEmbeddings(missing.into_iter().collect()));
        }
        Ok(DistModel {
            space,
            embeddings: map,
            triples,
            verb_kind,
        })
    }

    pub fn with_kind(&self, verb_kind: VerbKind) -> Self {
        DistModel {
            verb_kind,
            ..self.clone()
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn verb_kind(&self) -> VerbKind {
        self.verb_kind
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.embeddings.keys().map(String::as_str)
    }

    pub fn embedding(&self, word: &str) -> Result<&Tensor, ModelError> {
        self.embeddings
            .get(word)
            .ok_or_else(|| ModelError::UnknownWord(word.to_string()))
    }

    pub fn has_verb(&self, word: &str) -> bool {
        match self.verb_kind {
            VerbKind::Kronecker => self.embeddings.contains_key(word),
            _ => self.triples.iter().any(|t| t.verb == word),
        }
    }

    /// `sum count * (subject (x) object)` over the verb's triples.
    pub fn relational_matrix(&self, verb: &str) -> Result<Tensor, ModelError> {
        let mut acc: Option<Tensor> = None;
        for t in self.triples.iter().filter(|t| t.verb == verb) {
            let outer = tensor_product(self.embedding(&t.subject)?, self.embedding(&t.object)?).scale(t.count);
            acc = Some(match acc {
                Some(a) => a.add(&outer)?,
                None => outer,
            });
        }
        acc.ok_or_else(|| ModelError::NoTriples(verb.to_string()))
    }
}

/// The verb tensor under the model's verb kind.
pub fn build_verb(v: &str, dm: &DistModel) -> Result<Tensor, ModelError> {
    let n = dm.space.clone();
    match dm.verb_kind {
        VerbKind::Relational => dm.relational_matrix(v),
        VerbKind::Kronecker => {
            let w = dm.embedding(v)?;
            Ok(tensor_product(w, w))
        }
        VerbKind::CopySubject => {
            let m = dm.relational_matrix(v)?;
            Ok(Tensor::from_fn(vec![n.clone(), n.clone(), n], |i| {
                if i[0] == i[1] {
                    m.get(&[i[0], i[2]])
                } else {
                    0.0
                }
            }))
        }
        VerbKind::CopyObject => {
            let m = dm.relational_matrix(v)?;
            Ok(Tensor::from_fn(vec![n.clone(), n.clone(), n], |i| {
                if i[1] == i[2] {
                    m.get(&[i[0], i[2]])
                } else {
                    0.0
                }
            }))
        }
    }
}

impl Model for DistModel {
    fn interpretation(&self) -> TypeInterpretation {
        let ti = TypeInterpretation::new().with("n", &self.space);
        match self.verb_kind {
            VerbKind::Relational | VerbKind::Kronecker => ti.discard("s"),
            VerbKind::CopySubject | VerbKind::CopyObject => ti.with("s", &self.space),
        }
    }

    fn word_tensor(&self, key: &str, ty: &TypeSeq) -> Result<Tensor, SemanticsError> {
        if *ty == noun_type() {
            return Ok(self.embedding(key)?.clone());
        }
        if *ty == transitive_verb_type() {
            return Ok(build_verb(key, self)?);
        }
        Err(SemanticsError::UnsupportedType {
            word: key.to_string(),
            ty: ty.to_string(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMode {
    Additive,
    Multiplicative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PronounPolicy {
    /// Leave relative pronouns out.
    Skip,
    /// Use the pronoun's own embedding, looked up by its surface form.
    Include,
}

/// Word vectors summed or multiplied together, ignoring syntax.
pub fn baseline_vector(
    words: &[TypedWord],
    mode: BaselineMode,
    policy: PronounPolicy,
    dm: &DistModel,
) -> Result<Tensor, ModelError> {
    let mut acc: Option<Tensor> = None;
    for w in words {
        let v = match (PronounKind::from_key(&w.key), policy) {
            (Some(_), PronounPolicy::Skip) => continue,
            (Some(_), PronounPolicy::Include) => dm.embedding(&w.word)?,
            (None, _) => dm.embedding(&w.key)?,
        };
        acc = Some(match (acc, mode) {
            (None, _) => v.clone(),
            (Some(a), BaselineMode::Additive) => a.add(v)?,
            (Some(a), BaselineMode::Multiplicative) => a.hadamard(v)?,
        });
    }
    acc.ok_or(ModelError::EmptyPhrase)
}
