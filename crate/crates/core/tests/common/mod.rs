//! Shared generators for the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use relclause::diagram::MorphTerm;
use relclause::pregroup::TypeSeq;
use relclause::semantics::{noun_type, Model, SemanticsError, TypeInterpretation};
use relclause::tensor::{Space, Tensor};

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_tensor(rng: &mut ChaCha8Rng, axes: Vec<Space>) -> Tensor {
    Tensor::from_fn(axes, |_| rng.gen_range(-1.0..1.0))
}

pub fn random_vector(rng: &mut ChaCha8Rng, sp: &Space) -> Tensor {
    random_tensor(rng, vec![sp.clone()])
}

/// Nouns and verbs with random real entries.
pub struct RandomModel {
    pub noun: Space,
    pub sentence: Option<Space>,
    pub nouns: HashMap<String, Tensor>,
    pub verbs: HashMap<String, Tensor>,
}

impl RandomModel {
    /// `n_nouns` nouns `w0..`, `n_verbs` verbs `v0..`; verbs are cubes
    /// when a sentence space is given.
    pub fn new(rng: &mut ChaCha8Rng, dim: usize, sentence_dim: Option<usize>, n_nouns: usize, n_verbs: usize) -> Self {
        let noun = Space::numbered("N", dim).unwrap();
        let sentence = sentence_dim.map(|d| Space::numbered("S", d).unwrap());
        let nouns = (0..n_nouns)
            .map(|k| (format!("w{k}"), random_vector(rng, &noun)))
            .collect();
        let verbs = (0..n_verbs)
            .map(|k| {
                let axes = match &sentence {
                    Some(s) => vec![noun.clone(), s.clone(), noun.clone()],
                    None => vec![noun.clone(), noun.clone()],
                };
                (format!("v{k}"), random_tensor(rng, axes))
            })
            .collect();
        RandomModel {
            noun,
            sentence,
            nouns,
            verbs,
        }
    }
}

impl Model for RandomModel {
    fn interpretation(&self) -> TypeInterpretation {
        let ti = TypeInterpretation::new().with("n", &self.noun);
        match &self.sentence {
            Some(s) => ti.with("s", s),
            None => ti.discard("s"),
        }
    }

    fn word_tensor(&self, key: &str, ty: &TypeSeq) -> Result<Tensor, SemanticsError> {
        let table = if *ty == noun_type() { &self.nouns } else { &self.verbs };
        table
            .get(key)
            .cloned()
            .ok_or_else(|| SemanticsError::UnknownWord(key.to_string()))
    }
}

fn ids(ws: &[Space]) -> Option<MorphTerm> {
    MorphTerm::ids(ws)
}

/// Places `gen` (acting on `wires[at..at + width]`) between identities.
fn layer(wires: &[Space], at: usize, width: usize, gen: MorphTerm) -> MorphTerm {
    let parts = [ids(&wires[..at]), Some(gen), ids(&wires[at + width..])];
    MorphTerm::par_all(parts.into_iter().flatten()).unwrap()
}

/// A random well-typed term with at most `max_boxes` boxes over spaces of
/// dimension at most `max_dim`. Returns the term and its number of boxes.
pub fn random_term(rng: &mut ChaCha8Rng, max_boxes: usize, max_dim: usize) -> (MorphTerm, usize) {
    let pool: Vec<Space> = ["A", "B"]
        .iter()
        .map(|name| Space::numbered(*name, rng.gen_range(1..=max_dim)).unwrap())
        .collect();
    let pick = |rng: &mut ChaCha8Rng| pool.choose(rng).unwrap().clone();

    let n_inputs = rng.gen_range(0..=2);
    let mut wires: Vec<Space> = (0..n_inputs).map(|_| pick(rng)).collect();
    let mut term: Option<MorphTerm> = ids(&wires);
    let boxes = rng.gen_range(1..=max_boxes);
    let mut placed = 0;
    let mut attempts = 0;
    while placed < boxes && attempts < 100 {
        attempts += 1;
        let choice = rng.gen_range(0..6);
        let step: Option<(usize, usize, MorphTerm, Vec<Space>)> = match choice {
            // state of order 0..=2
            0 => {
                let order = rng.gen_range(0..=2);
                let axes: Vec<Space> = (0..order).map(|_| pick(rng)).collect();
                let at = rng.gen_range(0..=wires.len());
                let t = random_tensor(rng, axes.clone());
                Some((at, 0, MorphTerm::state(t), axes))
            }
            // spider on a run of equal wires
            1 | 2 => {
                let sp = pick(rng);
                let m = rng.gen_range(0..=3usize.min(wires.len()));
                let n = rng.gen_range(0..=3);
                if m + n == 0 || wires.len() + n - m > 5 {
                    None
                } else {
                    let starts: Vec<usize> = (0..=wires.len() - m)
                        .filter(|&s| wires[s..s + m].iter().all(|w| *w == sp))
                        .collect();
                    starts
                        .choose(rng)
                        .map(|&at| (at, m, MorphTerm::Spider(sp.clone(), m, n), vec![sp.clone(); n]))
                }
            }
            3 => {
                let starts: Vec<usize> = (0..wires.len().saturating_sub(1))
                    .filter(|&s| wires[s] == wires[s + 1])
                    .collect();
                starts
                    .choose(rng)
                    .map(|&at| (at, 2, MorphTerm::Cup(wires[at].clone()), Vec::new()))
            }
            4 => {
                let sp = pick(rng);
                let at = rng.gen_range(0..=wires.len());
                (wires.len() <= 3).then(|| (at, 0, MorphTerm::Cap(sp.clone()), vec![sp.clone(), sp]))
            }
            _ => {
                if wires.len() < 2 {
                    None
                } else {
                    let at = rng.gen_range(0..wires.len() - 1);
                    let (a, b) = (wires[at].clone(), wires[at + 1].clone());
                    Some((at, 2, MorphTerm::Swap(a.clone(), b.clone()), vec![b, a]))
                }
            }
        };
        let Some((at, width, gen, new)) = step else { continue };
        let l = layer(&wires, at, width, gen);
        term = Some(match term {
            Some(t) => t.seq(l),
            None => l,
        });
        wires.splice(at..at + width, new);
        placed += 1;
    }
    let term = term.unwrap_or_else(|| MorphTerm::state(Tensor::scalar(rng.gen_range(-1.0..1.0))));
    let count = term.node_count();
    (term, count)
}
