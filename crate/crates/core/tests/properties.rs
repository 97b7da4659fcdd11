mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use common::{random_term, rng, RandomModel};
use relclause::diagram::{self, evaluate_direct};
use relclause::models::{build_verb, embed_set, DistModel, PredicateWorld, Triple, VerbKind};
use relclause::pregroup::{reduce, reduce_all, SimpleType, TypeSeq};
use relclause::semantics::{
    clause_vector, nested_clause_vector, pronoun_tensor, pronoun_term, sentence_type, ClauseSpec, PronounKind,
};
use relclause::tensor::{contract, cosine, tensordot, Space, Tensor, Tolerance};

fn tensor_strategy(dims: Vec<usize>) -> impl Strategy<Value = Tensor> {
    let len = dims.iter().product::<usize>();
    proptest::collection::vec(-1.0f64..1.0, len).prop_map(move |data| {
        let axes = dims
            .iter()
            .enumerate()
            .map(|(k, &d)| Space::numbered(format!("X{k}"), d).unwrap())
            .collect();
        Tensor::new(axes, data).unwrap()
    })
}

fn simple_type() -> impl Strategy<Value = SimpleType> {
    (prop_oneof![Just("n"), Just("s")], -2i32..=2).prop_map(|(b, z)| SimpleType::new(b, z))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn permute_round_trips(t in (1usize..4, 1usize..4, 1usize..4).prop_flat_map(|(a, b, c)| tensor_strategy(vec![a, b, c]))) {
        let p = t.permute(&[2, 0, 1]).unwrap();
        prop_assert_eq!(p.permute(&[1, 2, 0]).unwrap(), t.clone());
        for i in 0..t.shape()[0] {
            for j in 0..t.shape()[1] {
                for k in 0..t.shape()[2] {
                    prop_assert_eq!(p.get(&[k, i, j]), t.get(&[i, j, k]));
                }
            }
        }
    }

    #[test]
    fn tensordot_matches_loops(
        (a, b) in (1usize..5, 1usize..5, 1usize..5).prop_flat_map(|(m, k, n)| {
            (tensor_strategy(vec![m, k]), tensor_strategy(vec![k, n]))
        })
    ) {
        let b = Tensor::new(vec![a.axes()[1].clone(), Space::numbered("Y", b.shape()[1]).unwrap()], b.data().to_vec()).unwrap();
        let c = tensordot(&a, &b, &[(1, 0)]).unwrap();
        let (m, k, n) = (a.shape()[0], a.shape()[1], b.shape()[1]);
        for i in 0..m {
            for j in 0..n {
                let want: f64 = (0..k).map(|l| a.get(&[i, l]) * b.get(&[l, j])).sum();
                prop_assert!((c.get(&[i, j]) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn trace_by_contraction(t in (1usize..6).prop_flat_map(|d| tensor_strategy(vec![d, d]))) {
        let sq = Tensor::new(vec![t.axes()[0].clone(), t.axes()[0].clone()], t.data().to_vec()).unwrap();
        let tr = contract(&sq, 0, 1).unwrap().value().unwrap();
        let want: f64 = (0..sq.shape()[0]).map(|i| sq.get(&[i, i])).sum();
        prop_assert!((tr - want).abs() < 1e-12);
    }

    #[test]
    fn cosine_is_bounded(a in tensor_strategy(vec![5]), b in tensor_strategy(vec![5])) {
        let c = cosine(&a, &b).unwrap();
        prop_assert!(c.zero_norm || (-1.0 - 1e-12..=1.0 + 1e-12).contains(&c.value));
    }

    #[test]
    fn pronoun_tensor_is_its_diagram(n in 1usize..=4, s in proptest::option::of(1usize..=4), subj in any::<bool>()) {
        let noun = Space::numbered("N", n).unwrap();
        let sentence = s.map(|d| Space::numbered("S", d).unwrap());
        let kind = if subj { PronounKind::SubjectRel } else { PronounKind::ObjectRel };
        let term = pronoun_term(kind, &noun, sentence.as_ref());
        prop_assert_eq!(diagram::evaluate(&term).unwrap(), pronoun_tensor(kind, &noun, sentence.as_ref()));
    }

    #[test]
    fn normal_forms_keep_meaning(seed in any::<u64>()) {
        let (t, _) = random_term(&mut rng(seed), 6, 3);
        let normal = diagram::normalize(&t).unwrap();
        let tol = Tolerance::DEFAULT;
        prop_assert!(diagram::evaluate(&t).unwrap().approx_eq(&diagram::evaluate(&normal).unwrap(), tol));
        prop_assert!(evaluate_direct(&normal).unwrap().approx_eq(&diagram::evaluate(&t).unwrap(), tol));
        let twice = diagram::normalize(&normal).unwrap();
        prop_assert!(twice.node_count() <= normal.node_count());
        prop_assert!(diagram::evaluate(&twice).unwrap().approx_eq(&diagram::evaluate(&t).unwrap(), tol));
    }

    #[test]
    fn subject_clauses_stay_under_the_head(seed in any::<u64>(), dim in 1usize..=6) {
        let mut r = rng(seed);
        let mut m = RandomModel::new(&mut r, dim, None, 3, 1);
        // zero out part of the head
        let head = m.nouns.get_mut("w0").unwrap();
        for i in (0..dim).step_by(2) {
            head.set(&[i], 0.0);
        }
        let v = clause_vector(&ClauseSpec::subject_clause("w0", "v0", "w1"), &m).unwrap();
        for i in (0..dim).step_by(2) {
            prop_assert_eq!(v.data()[i], 0.0);
        }
    }

    #[test]
    fn reductions_are_valid(items in proptest::collection::vec(simple_type(), 0..9)) {
        let ts = TypeSeq(items);
        let target = sentence_type();
        let all = reduce_all(&ts, &target);
        prop_assert_eq!(reduce(&ts, &target).is_some(), !all.is_empty());
        for r in &all {
            prop_assert!(r.is_valid_for(&ts, &target));
            prop_assert_eq!(r.replay(&ts), Some(target.clone()));
        }
        let distinct: BTreeSet<_> = all.iter().map(|r| r.links.clone()).collect();
        prop_assert_eq!(distinct.len(), all.len());
    }

    #[test]
    fn relational_verbs_are_linear_in_counts(seed in any::<u64>(), d in 1usize..=5) {
        use rand::Rng;
        let mut r = rng(seed);
        let words = ["a", "b", "c"];
        let emb: Vec<(String, Vec<f64>)> = words.iter().map(|w| (w.to_string(), (0..d).map(|_| r.gen_range(-1.0..1.0)).collect())).collect();
        let triples: Vec<Triple> = (0..4).map(|k| Triple::new(words[k % 3], "v", words[(k + 1) % 3], (k + 1) as f64)).collect();
        let doubled: Vec<Triple> = triples.iter().map(|t| Triple { count: 2.0 * t.count, ..t.clone() }).collect();
        let once = build_verb("v", &DistModel::new(emb.clone(), triples, VerbKind::Relational).unwrap()).unwrap();
        let twice = build_verb("v", &DistModel::new(emb, doubled, VerbKind::Relational).unwrap()).unwrap();
        prop_assert!(twice.approx_eq(&once.scale(2.0), Tolerance::DEFAULT));
    }

    /// In a 0/1 model the clause sums `alpha_kl` over head members `k` and
    /// argument members `l`, on the basis vector of `k`.
    #[test]
    fn boolean_subject_clause_formula(n in 1usize..=5, bits in any::<u64>(), head in any::<u8>(), arg in any::<u8>()) {
        let mut pw = PredicateWorld::new((0..n).map(|i| format!("u{i}")));
        let hs: BTreeSet<usize> = (0..n).filter(|&i| head >> i & 1 == 1).collect();
        let args: BTreeSet<usize> = (0..n).filter(|&i| arg >> i & 1 == 1).collect();
        let rel: BTreeSet<(usize, usize)> = (0..n * n).filter(|&b| bits >> b & 1 == 1).map(|b| (b / n, b % n)).collect();
        pw.unary.insert("h".into(), hs.clone());
        pw.unary.insert("a".into(), args.clone());
        pw.binary.insert("r".into(), rel.clone());
        let v = clause_vector(&ClauseSpec::subject_clause("h", "r", "a"), &pw.truth_model()).unwrap();
        let mut want = vec![0.0; n];
        for &k in &hs {
            for &l in &args {
                want[k] += rel.contains(&(k, l)) as u8 as f64;
            }
        }
        prop_assert_eq!(v.data(), want.as_slice());
    }

    /// Two clauses on one head with singleton arguments pick out the
    /// intersection of what each clause picks out.
    #[test]
    fn boolean_chains_intersect(n in 1usize..=5, r1 in any::<u64>(), r2 in any::<u64>(), head in any::<u8>(), a in 0usize..5, b in 0usize..5) {
        let (a, b) = (a % n, b % n);
        let mut pw = PredicateWorld::new((0..n).map(|i| format!("u{i}")));
        pw.unary.insert("h".into(), (0..n).filter(|&i| head >> i & 1 == 1).collect());
        let rel = |bits: u64| -> BTreeSet<(usize, usize)> { (0..n * n).filter(|&k| bits >> k & 1 == 1).map(|k| (k / n, k % n)).collect() };
        pw.binary.insert("r1".into(), rel(r1));
        pw.binary.insert("r2".into(), rel(r2));
        let chain = [
            ClauseSpec::subject_clause("h", "r1", &format!("u{a}")),
            ClauseSpec::object_clause("h", &format!("u{b}"), "r2"),
        ];
        let want: BTreeSet<usize> = pw.unary["h"]
            .iter()
            .copied()
            .filter(|&x| pw.binary["r1"].contains(&(x, a)) && pw.binary["r2"].contains(&(b, x)))
            .collect();
        let v = nested_clause_vector(&chain, &pw.truth_model()).unwrap();
        prop_assert_eq!(v, embed_set(&want, &pw));
    }
}
