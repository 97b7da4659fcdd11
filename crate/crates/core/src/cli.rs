//! Command-line front end.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::diagram::{self, MorphTerm};
use crate::models::{
    baseline_vector, parse_embeddings, parse_triples, BaselineMode, DistModel, ModelError, PronounPolicy, TruthModel,
    VerbKind,
};
use crate::pregroup::{parse_type, Lexicon, Parse, PregroupError, TypeSeq};
use crate::semantics::{
    noun_type, phrase_term, recognize_chain, sentence_type, sentence_vector, transitive_verb_type, typed_words,
    verb_application, Model, SemanticsError, TypeInterpretation,
};
use crate::tensor::{cosine, Space, Tensor, Tolerance};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Lexicon { path: PathBuf, source: PregroupError },
    #[error("{}: {source}", path.display())]
    ModelFile { path: PathBuf, source: ModelError },
    #[error("{}: line {line}: {message}", path.display())]
    TaskFile {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Pregroup(#[from] PregroupError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("missing: {}", .0.join(", "))]
    Missing(Vec<String>),
    #[error("{0}")]
    Usage(String),
    #[error("`{phrase}` does not reduce to {target}")]
    NoReduction { phrase: String, target: String },
    #[error("{0}")]
    NoResult(String),
}

impl CliError {
    /// 1 for a well-formed request with no answer, 2 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::NoReduction { .. } | CliError::NoResult(_) => 1,
            CliError::Semantics(SemanticsError::NoReduction(_)) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "relclause", version, about = "Compositional semantics of relative clauses")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Type a phrase with the lexicon and reduce it.
    Parse(ParseArgs),
    /// Evaluate a phrase in a model and print its coefficients.
    Eval(EvalArgs),
    /// Rank descriptions against terms by cosine similarity.
    Task(TaskArgs),
    /// Print the diagram of a phrase before and after normalization.
    Diagram(DiagramArgs),
}

#[derive(Debug, Args)]
pub struct PhraseArgs {
    #[arg(long, short)]
    pub lexicon: PathBuf,
    /// Target type of the reduction.
    #[arg(long, default_value = "n")]
    pub target: String,
    /// Pick reading K (1-based) from the full list of readings.
    #[arg(long, value_name = "K")]
    pub reading: Option<usize>,
    /// The phrase, as one or several arguments.
    #[arg(required = true, num_args = 1..)]
    pub words: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    #[command(flatten)]
    pub phrase: PhraseArgs,
    /// List every reading instead of the first.
    #[arg(long)]
    pub all: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Truth,
    Relational,
    Kronecker,
    CopySubject,
    CopyObject,
}

impl ModelKind {
    fn verb_kind(self) -> Option<VerbKind> {
        match self {
            ModelKind::Truth => None,
            ModelKind::Relational => Some(VerbKind::Relational),
            ModelKind::Kronecker => Some(VerbKind::Kronecker),
            ModelKind::CopySubject => Some(VerbKind::CopySubject),
            ModelKind::CopyObject => Some(VerbKind::CopyObject),
        }
    }
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Truth-theoretic model file.
    #[arg(long, short)]
    pub model: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model_kind: Option<ModelKind>,
    /// Embeddings TSV for distributional models.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Subject-verb-object counts TSV for distributional models.
    #[arg(long)]
    pub triples: Option<PathBuf>,
    /// Give truth-model verbs a one-dimensional sentence axis.
    #[arg(long)]
    pub sentence_axis: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Precision {
    /// Six significant digits.
    Short,
    /// Shortest representation that reads back exactly.
    Full,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub phrase: PhraseArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Use the closed form instead of evaluating the diagram.
    #[arg(long, conflicts_with = "diagram")]
    pub fast: bool,
    /// Evaluate the diagram (the default).
    #[arg(long)]
    pub diagram: bool,
    #[arg(long, value_enum, default_value = "short")]
    pub precision: Precision,
    /// Print zero coefficients too.
    #[arg(long)]
    pub all: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Baseline {
    Additive,
    Multiplicative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Pronouns {
    Skip,
    Include,
}

#[derive(Debug, Args)]
pub struct TaskArgs {
    /// Term <TAB> description rows.
    #[arg(long)]
    pub task: PathBuf,
    #[arg(long, short)]
    pub lexicon: PathBuf,
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub triples: PathBuf,
    #[arg(long, default_value = "relational")]
    pub verb_kind: VerbKind,
    /// Compose descriptions by a word-bag baseline instead of the diagram.
    #[arg(long, value_enum)]
    pub baseline: Option<Baseline>,
    #[arg(long, value_enum, default_value = "skip")]
    pub pronouns: Pronouns,
}

#[derive(Debug, Args)]
pub struct DiagramArgs {
    #[command(flatten)]
    pub phrase: PhraseArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Also print Graphviz dot for both forms.
    #[arg(long)]
    pub dot: bool,
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Parse(a) => cmd_parse(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Task(a) => cmd_task(a),
        Command::Diagram(a) => cmd_diagram(a),
    };
    match result {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_lexicon(path: &Path) -> Result<Lexicon, CliError> {
    Lexicon::parse(&read(path)?).map_err(|source| CliError::Lexicon {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_truth_model(path: &Path) -> Result<TruthModel, CliError> {
    TruthModel::parse(&read(path)?).map_err(|source| CliError::ModelFile {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_dist_model(embeddings: &Path, triples: &Path, kind: VerbKind) -> Result<DistModel, CliError> {
    let emb = parse_embeddings(&read(embeddings)?).map_err(|source| CliError::ModelFile {
        path: embeddings.to_path_buf(),
        source,
    })?;
    let tr = parse_triples(&read(triples)?).map_err(|source| CliError::ModelFile {
        path: triples.to_path_buf(),
        source,
    })?;
    Ok(DistModel::new(emb, tr, kind)?)
}

fn split_words(words: &[String]) -> Vec<&str> {
    words.iter().flat_map(|w| w.split_whitespace()).collect()
}

/// Types the phrase and picks a reading: the first one found, or the
/// requested entry of the full list.
pub fn parse_phrase(
    lex: &Lexicon,
    words: &[&str],
    target: &TypeSeq,
    reading: Option<usize>,
) -> Result<Parse, CliError> {
    let phrase = words.join(" ");
    let no_reduction = || CliError::NoReduction {
        phrase: phrase.clone(),
        target: target.to_string(),
    };
    match reading {
        None => lex.parse_words(words, target)?.ok_or_else(no_reduction),
        Some(0) => Err(CliError::Usage("readings are numbered from 1".into())),
        Some(k) => {
            let all = lex.parse_words_all(words, target)?;
            if all.is_empty() {
                return Err(no_reduction());
            }
            let n = all.len();
            all.into_iter()
                .nth(k - 1)
                .ok_or_else(|| CliError::Usage(format!("reading {k} requested, `{phrase}` has {n}")))
        }
    }
}

fn phrase_parse(a: &PhraseArgs, lex: &Lexicon) -> Result<Parse, CliError> {
    let target = parse_type(&a.target, &lex.alphabet)?;
    parse_phrase(lex, &split_words(&a.words), &target, a.reading)
}

fn describe_parse(p: &Parse, out: &mut String) {
    for (e, span) in p.entries.iter().zip(&p.spans) {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t[{}..{})",
            e.word, e.ty, e.semantics_key, span.start, span.end
        );
    }
    let links: Vec<String> = p.reduction.links.iter().map(|(i, j)| format!("{i}-{j}")).collect();
    let _ = writeln!(out, "type\t{}", p.types);
    let _ = writeln!(out, "links\t{}", links.join(" "));
    let surv: Vec<String> = p
        .reduction
        .survivors
        .iter()
        .map(|&i| format!("{i}:{}", p.types.items()[i]))
        .collect();
    let _ = writeln!(
        out,
        "survivors\t{}",
        if surv.is_empty() {
            "1".to_string()
        } else {
            surv.join(" ")
        }
    );
}

pub fn cmd_parse(a: &ParseArgs) -> Result<String, CliError> {
    let lex = load_lexicon(&a.phrase.lexicon)?;
    let mut out = String::new();
    if a.all {
        let target = parse_type(&a.phrase.target, &lex.alphabet)?;
        let words = split_words(&a.phrase.words);
        let all = lex.parse_words_all(&words, &target)?;
        if all.is_empty() {
            return Err(CliError::NoReduction {
                phrase: words.join(" "),
                target: target.to_string(),
            });
        }
        for (k, p) in all.iter().enumerate() {
            let _ = writeln!(out, "# reading {}", k + 1);
            describe_parse(p, &mut out);
        }
    } else {
        describe_parse(&phrase_parse(&a.phrase, &lex)?, &mut out);
    }
    Ok(out)
}

pub fn load_model(a: &ModelArgs) -> Result<Box<dyn Model>, CliError> {
    let kind = a.model_kind.unwrap_or(if a.model.is_some() {
        ModelKind::Truth
    } else {
        ModelKind::Relational
    });
    match kind.verb_kind() {
        None => {
            let path = a
                .model
                .as_ref()
                .ok_or_else(|| CliError::Usage("a truth model needs --model".into()))?;
            Ok(Box::new(load_truth_model(path)?.with_sentence_axis(a.sentence_axis)))
        }
        Some(vk) => match (&a.embeddings, &a.triples) {
            (Some(e), Some(t)) => Ok(Box::new(load_dist_model(e, t, vk)?)),
            _ => Err(CliError::Usage(format!(
                "a {} model needs --embeddings and --triples",
                vk
            ))),
        },
    }
}

/// Closed form of a parsed phrase, when it has one.
pub fn fast_value(p: &Parse, m: &dyn Model) -> Result<Tensor, CliError> {
    let words = typed_words(p);
    if let Some(chain) = recognize_chain(&words, &p.reduction) {
        let mut acc = m.word_tensor(&chain[0].head_noun, &noun_type())?;
        for c in &chain {
            acc = acc.hadamard(&verb_application(c, m)?).map_err(SemanticsError::from)?;
        }
        return Ok(acc);
    }
    let svo = words.len() == 3
        && words[0].ty == noun_type()
        && words[1].ty == transitive_verb_type()
        && words[2].ty == noun_type()
        && p.reduction.survivors.len() == 1
        && p.types.items()[p.reduction.survivors[0]] == sentence_type().items()[0];
    if svo {
        return Ok(sentence_vector(&words[0].key, &words[1].key, &words[2].key, m)?);
    }
    Err(CliError::NoResult(
        "no closed form for this reading; evaluate the diagram instead".into(),
    ))
}

/// Six significant digits, without trailing zeros.
pub fn format_short(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    let trim = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = trim(format!("{x:.decimals$}"));
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{x:.5e}");
        let (mant, e) = s.split_once('e').expect("exponent");
        format!("{}e{e}", trim(mant.to_string()))
    }
}

fn format_value(x: f64, p: Precision) -> String {
    match p {
        Precision::Short => format_short(x),
        Precision::Full => format!("{x:?}"),
    }
}

/// One `label <TAB> value` line per coefficient; multi-axis labels are
/// joined with commas, a scalar is labelled `value`.
pub fn write_tensor(t: &Tensor, precision: Precision, all: bool) -> String {
    let mut out = String::new();
    if t.order() == 0 {
        let _ = writeln!(out, "value\t{}", format_value(t.data()[0], precision));
        return out;
    }
    let shape = t.shape();
    let mut idx = vec![0usize; shape.len()];
    for &x in t.data() {
        if all || x != 0.0 {
            let label: Vec<&str> = idx
                .iter()
                .zip(t.axes())
                .map(|(&i, sp)| sp.basis_labels()[i].as_str())
                .collect();
            let _ = writeln!(out, "{}\t{}", label.join(","), format_value(x, precision));
        }
        for k in (0..shape.len()).rev() {
            idx[k] += 1;
            if idx[k] < shape[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    out
}

/// Reads the output of [`write_tensor`] back over the given axes; absent
/// labels are zero.
pub fn read_tensor(text: &str, axes: &[Space]) -> Result<Tensor, CliError> {
    let mut t = Tensor::zeros(axes.to_vec());
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| CliError::Usage(format!("line {}: {message}", n + 1));
        let (label, value) = line
            .split_once('\t')
            .ok_or_else(|| bad("expected `label<TAB>value`".into()))?;
        let x: f64 = value.trim().parse().map_err(|_| bad(format!("bad value `{value}`")))?;
        if axes.is_empty() {
            t = Tensor::scalar(x);
            continue;
        }
        let parts: Vec<&str> = label.split(',').collect();
        if parts.len() != axes.len() {
            return Err(bad(format!("`{label}` does not name {} axes", axes.len())));
        }
        let idx = parts
            .iter()
            .zip(axes)
            .map(|(p, sp)| sp.index_of(p).ok_or_else(|| bad(format!("unknown label `{p}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        t.set(&idx, x);
    }
    Ok(t)
}

pub fn cmd_eval(a: &EvalArgs) -> Result<String, CliError> {
    let lex = load_lexicon(&a.phrase.lexicon)?;
    let model = load_model(&a.model)?;
    let p = phrase_parse(&a.phrase, &lex)?;
    let value = if a.fast {
        fast_value(&p, model.as_ref())?
    } else {
        let term = phrase_term(&typed_words(&p), &p.reduction, model.as_ref())?;
        diagram::evaluate(&term).map_err(SemanticsError::from)?
    };
    Ok(write_tensor(&value, a.precision, a.all))
}

/// Placeholder meanings for drawing diagrams without a model: every noun
/// is the all-ones vector and every verb the all-ones matrix over a
/// two-dimensional space.
struct Schematic {
    noun: Space,
    sentence: Option<Space>,
}

impl Model for Schematic {
    fn interpretation(&self) -> TypeInterpretation {
        let ti = TypeInterpretation::new().with("n", &self.noun);
        match &self.sentence {
            Some(s) => ti.with("s", s),
            None => ti.discard("s"),
        }
    }

    fn word_tensor(&self, key: &str, ty: &TypeSeq) -> Result<Tensor, SemanticsError> {
        let ti = self.interpretation();
        let axes = crate::semantics::interpret_typeseq(ty, &ti)?;
        if axes.is_empty() {
            return Err(SemanticsError::UnsupportedType {
                word: key.to_string(),
                ty: ty.to_string(),
            });
        }
        Ok(Tensor::from_fn(axes, |_| 1.0))
    }
}

pub fn cmd_diagram(a: &DiagramArgs) -> Result<String, CliError> {
    let lex = load_lexicon(&a.phrase.lexicon)?;
    let model: Box<dyn Model> = if a.model.model.is_some() || a.model.embeddings.is_some() {
        load_model(&a.model)?
    } else {
        let noun = Space::numbered("N", 2).expect("dim 2");
        let sentence = a.model.sentence_axis.then(|| Space::numbered("S", 1).expect("dim 1"));
        Box::new(Schematic { noun, sentence })
    };
    let p = phrase_parse(&a.phrase, &lex)?;
    let raw = phrase_term(&typed_words(&p), &p.reduction, model.as_ref())?;
    let normal = diagram::normalize(&raw).map_err(SemanticsError::from)?;
    render_diagrams(&raw, &normal, a.dot)
}

fn render_diagrams(raw: &MorphTerm, normal: &MorphTerm, dot: bool) -> Result<String, CliError> {
    let mut out = String::new();
    let _ = writeln!(out, "# raw");
    out.push_str(&raw.pretty());
    let _ = writeln!(out, "# normalized");
    out.push_str(&normal.pretty());
    let spiders: Vec<String> = normal
        .spiders()
        .iter()
        .map(|(sp, m, n)| format!("{}({},{})", sp.name(), m, n))
        .collect();
    let _ = writeln!(
        out,
        "# spiders\t{}",
        if spiders.is_empty() {
            "none".into()
        } else {
            spiders.join(" ")
        }
    );
    if dot {
        out.push_str(&diagram::to_dot(raw, "raw").map_err(SemanticsError::from)?);
        out.push_str(&diagram::to_dot(normal, "normalized").map_err(SemanticsError::from)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskRow {
    pub term: String,
    pub description: String,
}

pub fn parse_task(text: &str) -> Result<Vec<TaskRow>, (usize, String)> {
    let mut rows = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (term, desc) = line
            .split_once('\t')
            .ok_or_else(|| (n + 1, "expected `term<TAB>description`".to_string()))?;
        let (term, desc) = (term.trim(), desc.trim());
        if term.is_empty() || desc.is_empty() || desc.contains('\t') {
            return Err((n + 1, "expected `term<TAB>description`".into()));
        }
        rows.push(TaskRow {
            term: term.to_string(),
            description: desc.to_string(),
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Composition {
    Diagram,
    Baseline(BaselineMode, PronounPolicy),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskReport {
    pub terms: Vec<String>,
    pub descriptions: Vec<String>,
    /// `cosines[t][d]`: term `t` against description `d`.
    pub cosines: Vec<Vec<f64>>,
    /// Description indices, best first; ties keep input order.
    pub rankings: Vec<Vec<usize>>,
    /// 1-based rank of each term's own description.
    pub own_rank: Vec<usize>,
    /// Set when a term's own description ties another description.
    pub ties: Vec<bool>,
    pub accuracy: f64,
}

pub fn description_vector(desc: &str, lex: &Lexicon, dm: &DistModel, how: Composition) -> Result<Tensor, CliError> {
    let words: Vec<&str> = desc.split_whitespace().collect();
    let p = parse_phrase(lex, &words, &noun_type(), None)?;
    let typed = typed_words(&p);
    match how {
        Composition::Diagram => {
            let term = phrase_term(&typed, &p.reduction, dm)?;
            Ok(diagram::evaluate(&term).map_err(SemanticsError::from)?)
        }
        Composition::Baseline(mode, policy) => Ok(baseline_vector(&typed, mode, policy, dm)?),
    }
}

/// Words that would stop the task: terms without embeddings and
/// description words absent from the lexicon or the model.
fn task_missing(rows: &[TaskRow], lex: &Lexicon, dm: &DistModel, how: Composition) -> Vec<String> {
    let mut missing = Vec::new();
    let mut note = |s: String| {
        if !missing.contains(&s) {
            missing.push(s)
        }
    };
    for r in rows {
        if dm.embedding(&r.term).is_err() {
            note(format!("embedding for term `{}`", r.term));
        }
        for w in r.description.split_whitespace() {
            let entries: Vec<_> = lex.entries_for(w).collect();
            if entries.is_empty() {
                note(format!("lexicon entry for `{w}`"));
                continue;
            }
            for e in entries {
                let pronoun = crate::semantics::PronounKind::from_key(&e.semantics_key).is_some();
                let ok = if pronoun {
                    !matches!(how, Composition::Baseline(_, PronounPolicy::Include)) || dm.embedding(w).is_ok()
                } else if e.ty == transitive_verb_type() && how == Composition::Diagram {
                    dm.has_verb(&e.semantics_key)
                } else {
                    dm.embedding(&e.semantics_key).is_ok()
                };
                if !ok {
                    note(format!("model entry for `{}`", e.semantics_key));
                }
            }
        }
    }
    missing
}

pub fn run_task(rows: &[TaskRow], lex: &Lexicon, dm: &DistModel, how: Composition) -> Result<TaskReport, CliError> {
    let missing = task_missing(rows, lex, dm, how);
    if !missing.is_empty() {
        return Err(CliError::Missing(missing));
    }
    let terms: Vec<Tensor> = rows
        .iter()
        .map(|r| dm.embedding(&r.term).cloned())
        .collect::<Result<_, _>>()?;
    let descs: Vec<Tensor> = rows
        .iter()
        .map(|r| description_vector(&r.description, lex, dm, how))
        .collect::<Result<_, _>>()?;
    let tol = Tolerance::DEFAULT;
    let mut cosines = Vec::with_capacity(rows.len());
    let mut rankings = Vec::with_capacity(rows.len());
    let mut own_rank = Vec::with_capacity(rows.len());
    let mut ties = Vec::with_capacity(rows.len());
    for (t, tv) in terms.iter().enumerate() {
        let row: Vec<f64> = descs
            .iter()
            .map(|d| cosine(tv, d).map(|c| c.value))
            .collect::<Result<_, _>>()
            .map_err(SemanticsError::from)?;
        let mut order: Vec<usize> = (0..row.len()).collect();
        order.sort_by(|&a, &b| row[b].total_cmp(&row[a]));
        own_rank.push(order.iter().position(|&d| d == t).expect("own description") + 1);
        ties.push((0..row.len()).any(|d| d != t && tol.close(row[d], row[t])));
        cosines.push(row);
        rankings.push(order);
    }
    let correct = own_rank.iter().filter(|&&r| r == 1).count();
    let accuracy = if rows.is_empty() {
        0.0
    } else {
        correct as f64 / rows.len() as f64
    };
    Ok(TaskReport {
        terms: rows.iter().map(|r| r.term.clone()).collect(),
        descriptions: rows.iter().map(|r| r.description.clone()).collect(),
        cosines,
        rankings,
        own_rank,
        ties,
        accuracy,
    })
}

impl TaskReport {
    pub fn correct(&self) -> usize {
        self.own_rank.iter().filter(|&&r| r == 1).count()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# cosine\t{}", self.descriptions.join("\t"));
        for (t, row) in self.terms.iter().zip(&self.cosines) {
            let cells: Vec<String> = row.iter().map(|&c| format!("{c:.6}")).collect();
            let _ = writeln!(out, "{t}\t{}", cells.join("\t"));
        }
        let _ = writeln!(out, "# term\town rank\tclosest description\ttie");
        for (k, t) in self.terms.iter().enumerate() {
            let best = self.rankings[k][0];
            let _ = writeln!(
                out,
                "{t}\t{}\t{}\t{}",
                self.own_rank[k],
                self.descriptions[best],
                if self.ties[k] { "tie" } else { "-" }
            );
        }
        let _ = writeln!(
            out,
            "accuracy\t{}/{}\t{:.6}",
            self.correct(),
            self.terms.len(),
            self.accuracy
        );
        out
    }
}

pub fn cmd_task(a: &TaskArgs) -> Result<String, CliError> {
    let text = read(&a.task)?;
    let rows = parse_task(&text).map_err(|(line, message)| CliError::TaskFile {
        path: a.task.clone(),
        line,
        message,
    })?;
    let lex = load_lexicon(&a.lexicon)?;
    let dm = load_dist_model(&a.embeddings, &a.triples, a.verb_kind)?;
    let how = match a.baseline {
        None => Composition::Diagram,
        Some(b) => Composition::Baseline(
            match b {
                Baseline::Additive => BaselineMode::Additive,
                Baseline::Multiplicative => BaselineMode::Multiplicative,
            },
            match a.pronouns {
                Pronouns::Skip => PronounPolicy::Skip,
                Pronouns::Include => PronounPolicy::Include,
            },
        ),
    };
    Ok(run_task(&rows, &lex, &dm, how)?.render())
}
