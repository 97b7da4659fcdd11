use std::collections::BTreeSet;

use relclause::diagram;
use relclause::models::{predicate_clause_oracle, PredicateWorld, TruthModel};
use relclause::pregroup::{Lexicon, TypeSeq};
use relclause::semantics::{
    clause_vector, evaluate_phrase, nested_clause_vector, nested_clause_vector_fast, noun_type, phrase_term,
    recognize_chain, sentence_type, typed_words, ClauseSpec,
};
use relclause::tensor::Tolerance;

const LEXICON: &str = "!alphabet n s
men\tn\tmen
books\tn\tbooks
movies\tn\tmovies
awards\tn\tawards
Mary\tn\tMary
love\tn^r s n^l\tlove
loves\tn^r s n^l\tlove
wrote\tn^r s n^l\twrote
liked\tn^r s n^l\tliked
won\tn^r s n^l\twon
who\tn^r n s^l n\trel:subj
whom\tn^r n n^ll s^l\trel:obj
which\tn^r n s^l n\trel:subj
that\tn^r n s^l n\trel:subj
that\tn^r n n^ll s^l\trel:obj
";

const LIBRARY: &str = "
!universe m1 m2 m3 f1 b1 b2 b3
!noun men: m1, m2, m3
!noun books: b1, b2, b3
!noun Mary: f1
!verb love: m1,b1=1/2; m2,b2; m3,b3=1/4; m1,m2
!verb wrote: f1,b1; f1,b2=1/2
";

fn lexicon() -> Lexicon {
    Lexicon::parse(LEXICON).unwrap()
}

fn words(s: &str) -> Vec<&str> {
    s.split_whitespace().collect()
}

const TIGHT: Tolerance = Tolerance { rel: 0.0, abs: 1e-12 };

#[test]
fn men_who_love_books_that_mary_wrote_has_a_non_fusing_reading() {
    let tm = TruthModel::parse(LIBRARY).unwrap();
    let readings = lexicon()
        .parse_words_all(&words("men who love books that Mary wrote"), &noun_type())
        .unwrap();
    assert_eq!(readings.len(), 2);

    let mut seen = (false, false);
    for p in &readings {
        let typed = typed_words(p);
        let term = phrase_term(&typed, &p.reduction, &tm).unwrap();
        let value = diagram::evaluate(&term).unwrap();
        let normal = diagram::normalize(&term).unwrap();
        let spiders = normal.spiders();
        match recognize_chain(&typed, &p.reduction) {
            // both clauses on `men`: men Mary wrote who love books, none here
            Some(chain) => {
                assert_eq!(chain.len(), 2);
                assert!(value.data().iter().all(|&x| x == 0.0));
                assert_eq!(spiders.len(), 1);
                assert_eq!((spiders[0].1, spiders[0].2), (3, 1));
                seen.0 = true;
            }
            // `that Mary wrote` restricts `books`: m1 loves b1 (1/2, written
            // with degree 1), m2 loves b2 (1, written with degree 1/2)
            None => {
                let want = [0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0];
                assert!(value.approx_eq(
                    &relclause::tensor::Tensor::vector(tm.space(), want.to_vec()).unwrap(),
                    TIGHT
                ));
                assert_eq!(spiders.len(), 2);
                assert!(spiders.iter().all(|s| s.1 + s.2 == 3), "{spiders:?}");
                seen.1 = true;
            }
        }
    }
    assert_eq!(seen, (true, true));
}

const CINEMA: &str = "
!universe f1 v1 v2 v3 a1 a2
!noun movies: v1, v2, v3
!noun awards: a1, a2
!noun Mary: f1
!verb liked: f1,v1=1/2; f1,v2=1/4; f1,v3
!verb won: v1,a1=1/2; v2,a2; v2,a1=1/2
";

#[test]
fn movies_that_mary_liked_which_won_awards() {
    let tm = TruthModel::parse(CINEMA).unwrap();
    let lex = lexicon();
    let p = lex
        .parse_words(&words("movies that Mary liked which won awards"), &noun_type())
        .unwrap()
        .unwrap();
    let typed = typed_words(&p);
    let chain = recognize_chain(&typed, &p.reduction).expect("both clauses on `movies`");
    let v = evaluate_phrase(&typed, &p.reduction, &tm).unwrap();
    // liked degree times the summed degree of winning
    let want = [0.0, 0.5 * 0.5, 0.25 * 1.5, 0.0, 0.0, 0.0];
    assert!(v.approx_eq(
        &relclause::tensor::Tensor::vector(tm.space(), want.to_vec()).unwrap(),
        TIGHT
    ));
    assert!(v.approx_eq(&nested_clause_vector(&chain, &tm).unwrap(), TIGHT));
    assert!(v.approx_eq(&nested_clause_vector_fast(&chain, &tm).unwrap(), TIGHT));
    let normal = diagram::normalize(&phrase_term(&typed, &p.reduction, &tm).unwrap()).unwrap();
    let spiders = normal.spiders();
    assert_eq!(spiders.len(), 1);
    assert_eq!((spiders[0].1, spiders[0].2), (3, 1));
}

#[test]
fn one_clause_chain_is_the_clause() {
    let tm = TruthModel::parse(CINEMA).unwrap();
    let c = ClauseSpec::object_clause("movies", "Mary", "liked");
    assert_eq!(
        nested_clause_vector(std::slice::from_ref(&c), &tm).unwrap(),
        clause_vector(&c, &tm).unwrap()
    );
}

/// "Mary loves men whom Mary loves" sums the squared degrees, so in the
/// 0/1 case it counts the men Mary loves.
#[test]
fn self_reinforcing_sentence_counts_loved_men() {
    let lex = lexicon();
    let sentence = words("Mary loves men whom Mary loves");
    let value = |model: &str| {
        let tm = TruthModel::parse(model).unwrap();
        let p = lex.parse_words(&sentence, &sentence_type()).unwrap().unwrap();
        evaluate_phrase(&typed_words(&p), &p.reduction, &tm)
            .unwrap()
            .value()
            .unwrap()
    };
    let weighted = "!universe f1 m1 m2 m3\n!noun men: m1, m2, m3\n!noun Mary: f1\n!verb love: f1,m1=1/4; f1,m2=1/2\n";
    assert!((value(weighted) - (1.0 / 16.0 + 1.0 / 4.0)).abs() < 1e-12);
    let one = "!universe f1 m1 m2\n!noun men: m1, m2\n!noun Mary: f1\n!verb love: f1,m2\n";
    assert_eq!(value(one), 1.0);
    let two = "!universe f1 m1 m2\n!noun men: m1, m2\n!noun Mary: f1\n!verb love: f1,m1; f1,m2\n";
    assert_eq!(value(two), 2.0);
    let none = "!universe f1 m1\n!noun men: m1\n!noun Mary: f1\n!verb love: m1,f1\n";
    assert_eq!(value(none), 0.0);
}

/// Reading the clause as "related to every member of the object" breaks
/// the match with the vectors; the existential reading keeps it.
#[test]
fn universal_reading_disagrees_with_the_vectors() {
    let mut pw = PredicateWorld::new(["x", "y1", "y2"]);
    pw.unary.insert("head".into(), BTreeSet::from([0]));
    pw.unary.insert("objs".into(), BTreeSet::from([1, 2]));
    pw.binary.insert("r".into(), BTreeSet::from([(0, 1)]));
    let c = ClauseSpec::subject_clause("head", "r", "objs");

    let universal: BTreeSet<usize> = pw.unary["head"]
        .iter()
        .copied()
        .filter(|&x| pw.unary["objs"].iter().all(|&y| pw.binary["r"].contains(&(x, y))))
        .collect();
    let existential = predicate_clause_oracle(&c, &pw).unwrap();
    let v = clause_vector(&c, &pw.truth_model()).unwrap();
    let support: BTreeSet<usize> = (0..3).filter(|&i| v.data()[i] != 0.0).collect();

    assert!(universal.is_empty());
    assert_eq!(existential, BTreeSet::from([0]));
    assert_eq!(support, existential);
    assert_ne!(support, universal);
}

#[test]
fn transitive_sentence_in_a_one_dimensional_sentence_space() {
    let tm = TruthModel::parse(LIBRARY).unwrap().with_sentence_axis(true);
    let lex = lexicon();
    let p = lex
        .parse_words(&words("men love books"), &sentence_type())
        .unwrap()
        .unwrap();
    let v = evaluate_phrase(&typed_words(&p), &p.reduction, &tm).unwrap();
    assert_eq!(v.order(), 1);
    assert!((v.data()[0] - (0.5 + 1.0 + 0.25)).abs() < 1e-12);
    let term = phrase_term(&typed_words(&p), &p.reduction, &tm).unwrap();
    assert!(diagram::normalize(&term).unwrap().spiders().is_empty());
    let unit = TypeSeq::unit();
    assert!(lex.parse_words(&words("men love books"), &unit).unwrap().is_none());
}
