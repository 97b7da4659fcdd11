//! String-diagram terms, their normal forms and their tensor semantics.
//!
//! A [`MorphTerm`] is built from identities, cups, caps, swaps, spiders and
//! states with sequential (`Seq`, first argument applied first) and
//! parallel (`Par`) composition. Terms are compiled into a port graph in
//! which every wire is explicit; identities and swaps disappear into the
//! wiring, cups and caps become two-legged spiders. Normalisation rewrites
//! the graph and reads it back as a term with the same interface.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::tensor::{self, contract, spider, tensor_product, tensordot, Space, Tensor, TensorError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiagramError {
    #[error("at {path}: codomain {cod:?} does not match domain {dom:?}")]
    Mismatch {
        path: String,
        cod: Vec<Space>,
        dom: Vec<Space>,
    },
    #[error("at {path}: a spider needs at least one leg")]
    EmptySpider { path: String },
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub label: Option<String>,
    pub tensor: Tensor,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MorphTerm {
    Id(Space),
    /// `[A, A] -> []`
    Cup(Space),
    /// `[] -> [A, A]`
    Cap(Space),
    /// `[A, B] -> [B, A]`
    Swap(Space, Space),
    /// `m` inputs, `n` outputs.
    Spider(Space, usize, usize),
    State(State),
    Par(Box<MorphTerm>, Box<MorphTerm>),
    Seq(Box<MorphTerm>, Box<MorphTerm>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interface {
    pub inputs: Vec<Space>,
    pub outputs: Vec<Space>,
}

impl MorphTerm {
    pub fn state(tensor: Tensor) -> Self {
        MorphTerm::State(State { label: None, tensor })
    }

    pub fn named_state(label: impl Into<String>, tensor: Tensor) -> Self {
        MorphTerm::State(State {
            label: Some(label.into()),
            tensor,
        })
    }

    pub fn seq(self, then: MorphTerm) -> Self {
        MorphTerm::Seq(Box::new(self), Box::new(then))
    }

    pub fn par(self, right: MorphTerm) -> Self {
        MorphTerm::Par(Box::new(self), Box::new(right))
    }

    /// Left-nested parallel composition; `None` for an empty iterator.
    pub fn par_all(terms: impl IntoIterator<Item = MorphTerm>) -> Option<Self> {
        terms.into_iter().reduce(MorphTerm::par)
    }

    pub fn seq_all(terms: impl IntoIterator<Item = MorphTerm>) -> Option<Self> {
        terms.into_iter().reduce(MorphTerm::seq)
    }

    pub fn ids<'a>(spaces: impl IntoIterator<Item = &'a Space>) -> Option<Self> {
        Self::par_all(spaces.into_iter().cloned().map(MorphTerm::Id))
    }

    /// Number of boxes (leaves other than identities).
    pub fn node_count(&self) -> usize {
        match self {
            MorphTerm::Id(_) => 0,
            MorphTerm::Par(a, b) | MorphTerm::Seq(a, b) => a.node_count() + b.node_count(),
            _ => 1,
        }
    }

    /// Spider boxes `(space, inputs, outputs)`, excluding cups, caps and identities.
    pub fn spiders(&self) -> Vec<(Space, usize, usize)> {
        let mut out = Vec::new();
        self.visit(&mut |t| {
            if let MorphTerm::Spider(sp, m, n) = t {
                out.push((sp.clone(), *m, *n));
            }
        });
        out
    }

    pub fn states(&self) -> Vec<&State> {
        fn go<'a>(t: &'a MorphTerm, out: &mut Vec<&'a State>) {
            match t {
                MorphTerm::State(s) => out.push(s),
                MorphTerm::Par(a, b) | MorphTerm::Seq(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                _ => {}
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    fn visit(&self, f: &mut impl FnMut(&MorphTerm)) {
        f(self);
        if let MorphTerm::Par(a, b) | MorphTerm::Seq(a, b) = self {
            a.visit(f);
            b.visit(f);
        }
    }

    /// Indented multi-line rendering.
    pub fn pretty(&self) -> String {
        fn go(t: &MorphTerm, depth: usize, out: &mut String) {
            let pad = "  ".repeat(depth);
            match t {
                MorphTerm::Par(a, b) => {
                    let _ = writeln!(out, "{pad}par");
                    go(a, depth + 1, out);
                    go(b, depth + 1, out);
                }
                MorphTerm::Seq(a, b) => {
                    let _ = writeln!(out, "{pad}seq");
                    go(a, depth + 1, out);
                    go(b, depth + 1, out);
                }
                leaf => {
                    let _ = writeln!(out, "{pad}{leaf}");
                }
            }
        }
        let mut out = String::new();
        go(self, 0, &mut out);
        out
    }
}

fn spaces_str(v: &[Space]) -> String {
    v.iter().map(|s| s.name().to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for MorphTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphTerm::Id(a) => write!(f, "id {a}"),
            MorphTerm::Cup(a) => write!(f, "cup {a}"),
            MorphTerm::Cap(a) => write!(f, "cap {a}"),
            MorphTerm::Swap(a, b) => write!(f, "swap {a} {b}"),
            MorphTerm::Spider(a, m, n) => write!(f, "spider {a} {m} {n}"),
            MorphTerm::State(s) => write!(
                f,
                "state {} [{}]",
                s.label.as_deref().unwrap_or("_"),
                spaces_str(s.tensor.axes())
            ),
            MorphTerm::Par(a, b) => write!(f, "({a} * {b})"),
            MorphTerm::Seq(a, b) => write!(f, "({a} ; {b})"),
        }
    }
}

pub fn typecheck(t: &MorphTerm) -> Result<Interface, DiagramError> {
    fn go(t: &MorphTerm, path: &mut Vec<&'static str>) -> Result<Interface, DiagramError> {
        let render = |path: &[&str]| {
            if path.is_empty() {
                "root".to_string()
            } else {
                path.join("/")
            }
        };
        Ok(match t {
            MorphTerm::Id(a) => Interface {
                inputs: vec![a.clone()],
                outputs: vec![a.clone()],
            },
            MorphTerm::Cup(a) => Interface {
                inputs: vec![a.clone(), a.clone()],
                outputs: vec![],
            },
            MorphTerm::Cap(a) => Interface {
                inputs: vec![],
                outputs: vec![a.clone(), a.clone()],
            },
            MorphTerm::Swap(a, b) => Interface {
                inputs: vec![a.clone(), b.clone()],
                outputs: vec![b.clone(), a.clone()],
            },
            MorphTerm::Spider(a, m, n) => {
                if m + n == 0 {
                    return Err(DiagramError::EmptySpider { path: render(path) });
                }
                Interface {
                    inputs: vec![a.clone(); *m],
                    outputs: vec![a.clone(); *n],
                }
            }
            MorphTerm::State(s) => Interface {
                inputs: vec![],
                outputs: s.tensor.axes().to_vec(),
            },
            MorphTerm::Par(a, b) => {
                path.push("par.0");
                let ia = go(a, path)?;
                path.pop();
                path.push("par.1");
                let ib = go(b, path)?;
                path.pop();
                Interface {
                    inputs: ia.inputs.into_iter().chain(ib.inputs).collect(),
                    outputs: ia.outputs.into_iter().chain(ib.outputs).collect(),
                }
            }
            MorphTerm::Seq(a, b) => {
                path.push("seq.0");
                let ia = go(a, path)?;
                path.pop();
                path.push("seq.1");
                let ib = go(b, path)?;
                path.pop();
                if ia.outputs != ib.inputs {
                    return Err(DiagramError::Mismatch {
                        path: render(path),
                        cod: ia.outputs,
                        dom: ib.inputs,
                    });
                }
                Interface {
                    inputs: ia.inputs,
                    outputs: ib.outputs,
                }
            }
        })
    }
    go(t, &mut Vec::new())
}

/// Evaluates a term by structural recursion: `Par` is a tensor product,
/// `Seq` contracts the shared interface. The result has axes `dom ++ cod`.
pub fn evaluate_direct(t: &MorphTerm) -> Result<Tensor, DiagramError> {
    typecheck(t)?;
    fn go(t: &MorphTerm) -> Result<(Tensor, usize), DiagramError> {
        Ok(match t {
            MorphTerm::Id(a) => (Tensor::identity(a), 1),
            MorphTerm::Cup(a) => (Tensor::identity(a), 2),
            MorphTerm::Cap(a) => (Tensor::identity(a), 0),
            MorphTerm::Swap(a, b) => {
                let axes = vec![a.clone(), b.clone(), b.clone(), a.clone()];
                (
                    Tensor::from_fn(axes, |i| (i[0] == i[3] && i[1] == i[2]) as u8 as f64),
                    2,
                )
            }
            MorphTerm::Spider(a, m, n) => (spider(a, *m, *n)?, *m),
            MorphTerm::State(s) => (s.tensor.clone(), 0),
            MorphTerm::Par(f, g) => {
                let (tf, df) = go(f)?;
                let (tg, dg) = go(g)?;
                let (of, og) = (tf.order(), tg.order());
                let prod = tensor_product(&tf, &tg);
                let perm: Vec<usize> = (0..df)
                    .chain(of..of + dg)
                    .chain(df..of)
                    .chain(of + dg..of + og)
                    .collect();
                (prod.permute(&perm)?, df + dg)
            }
            MorphTerm::Seq(f, g) => {
                let (tf, df) = go(f)?;
                let (tg, _) = go(g)?;
                let mid = tf.order() - df;
                let pairs: Vec<(usize, usize)> = (0..mid).map(|k| (df + k, k)).collect();
                (tensordot(&tf, &tg, &pairs)?, df)
            }
        })
    }
    Ok(go(t)?.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dir {
    In,
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Leg {
    wire: usize,
    dir: Dir,
}

#[derive(Debug, Clone)]
enum NodeKind {
    State(State),
    Spider(Space),
}

#[derive(Debug, Clone)]
struct Node {
    kind: NodeKind,
    legs: Vec<Leg>,
}

impl Node {
    fn spider_space(&self) -> Option<&Space> {
        match &self.kind {
            NodeKind::Spider(sp) => Some(sp),
            NodeKind::State(_) => None,
        }
    }

    fn arity(&self) -> (usize, usize) {
        let m = self.legs.iter().filter(|l| l.dir == Dir::In).count();
        (m, self.legs.len() - m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum End {
    Input(usize),
    Output(usize),
    Leg(usize, usize),
}

/// Port-graph view of a term: nodes with legs, explicit wires and the
/// ordered boundary.
#[derive(Debug, Clone)]
pub struct Network {
    nodes: Vec<Option<Node>>,
    wire_space: Vec<Space>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
}

struct Builder {
    parent: Vec<usize>,
    space: Vec<Space>,
    nodes: Vec<(NodeKind, Vec<(usize, Dir)>)>,
}

impl Builder {
    fn point(&mut self, sp: &Space) -> usize {
        self.parent.push(self.parent.len());
        self.space.push(sp.clone());
        self.parent.len() - 1
    }

    fn find(&mut self, mut p: usize) -> usize {
        while self.parent[p] != p {
            self.parent[p] = self.parent[self.parent[p]];
            p = self.parent[p];
        }
        p
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[rb.max(ra)] = ra.min(rb);
        }
    }

    fn spider_node(&mut self, sp: &Space, m: usize, n: usize) -> (Vec<usize>, Vec<usize>) {
        let dom: Vec<usize> = (0..m).map(|_| self.point(sp)).collect();
        let cod: Vec<usize> = (0..n).map(|_| self.point(sp)).collect();
        let legs = dom
            .iter()
            .map(|&p| (p, Dir::In))
            .chain(cod.iter().map(|&p| (p, Dir::Out)))
            .collect();
        self.nodes.push((NodeKind::Spider(sp.clone()), legs));
        (dom, cod)
    }

    fn compile(&mut self, t: &MorphTerm) -> (Vec<usize>, Vec<usize>) {
        match t {
            MorphTerm::Id(a) => {
                let p = self.point(a);
                (vec![p], vec![p])
            }
            MorphTerm::Swap(a, b) => {
                let p = self.point(a);
                let q = self.point(b);
                (vec![p, q], vec![q, p])
            }
            MorphTerm::Cup(a) => self.spider_node(a, 2, 0),
            MorphTerm::Cap(a) => self.spider_node(a, 0, 2),
            MorphTerm::Spider(a, m, n) => self.spider_node(a, *m, *n),
            MorphTerm::State(s) => {
                let cod: Vec<usize> = s.tensor.axes().iter().map(|sp| self.point(sp)).collect();
                let legs = cod.iter().map(|&p| (p, Dir::Out)).collect();
                self.nodes.push((NodeKind::State(s.clone()), legs));
                (vec![], cod)
            }
            MorphTerm::Par(f, g) => {
                let (mut df, mut cf) = self.compile(f);
                let (dg, cg) = self.compile(g);
                df.extend(dg);
                cf.extend(cg);
                (df, cf)
            }
            MorphTerm::Seq(f, g) => {
                let (df, cf) = self.compile(f);
                let (dg, cg) = self.compile(g);
                for (a, b) in cf.into_iter().zip(dg) {
                    self.union(a, b);
                }
                (df, cg)
            }
        }
    }
}

impl Network {
    pub fn compile(t: &MorphTerm) -> Result<Network, DiagramError> {
        typecheck(t)?;
        let mut b = Builder {
            parent: Vec::new(),
            space: Vec::new(),
            nodes: Vec::new(),
        };
        let (dom, cod) = b.compile(t);
        let mut wire_of: HashMap<usize, usize> = HashMap::new();
        let mut wire_space = Vec::new();
        let mut wire = |b: &mut Builder, p: usize| {
            let root = b.find(p);
            *wire_of.entry(root).or_insert_with(|| {
                wire_space.push(b.space[root].clone());
                wire_space.len() - 1
            })
        };
        let inputs: Vec<usize> = dom.iter().map(|&p| wire(&mut b, p)).collect();
        let outputs: Vec<usize> = cod.iter().map(|&p| wire(&mut b, p)).collect();
        let raw = std::mem::take(&mut b.nodes);
        let nodes = raw
            .into_iter()
            .map(|(kind, legs)| {
                let legs = legs
                    .into_iter()
                    .map(|(p, dir)| Leg {
                        wire: wire(&mut b, p),
                        dir,
                    })
                    .collect();
                Some(Node { kind, legs })
            })
            .collect();
        Ok(Network {
            nodes,
            wire_space,
            inputs,
            outputs,
        })
    }

    fn ends(&self, w: usize) -> Vec<End> {
        let mut out = Vec::with_capacity(2);
        out.extend(
            self.inputs
                .iter()
                .enumerate()
                .filter(|(_, &x)| x == w)
                .map(|(k, _)| End::Input(k)),
        );
        out.extend(
            self.outputs
                .iter()
                .enumerate()
                .filter(|(_, &x)| x == w)
                .map(|(k, _)| End::Output(k)),
        );
        for (n, node) in self.nodes.iter().enumerate() {
            if let Some(node) = node {
                for (k, leg) in node.legs.iter().enumerate() {
                    if leg.wire == w {
                        out.push(End::Leg(n, k));
                    }
                }
            }
        }
        out
    }

    fn live_wires(&self) -> Vec<usize> {
        let mut ws: Vec<usize> = self
            .inputs
            .iter()
            .chain(&self.outputs)
            .copied()
            .chain(self.nodes.iter().flatten().flat_map(|n| n.legs.iter().map(|l| l.wire)))
            .collect();
        ws.sort_unstable();
        ws.dedup();
        ws
    }

    fn rename_wire(&mut self, from: usize, to: usize) {
        for w in self.inputs.iter_mut().chain(self.outputs.iter_mut()) {
            if *w == from {
                *w = to;
            }
        }
        for node in self.nodes.iter_mut().flatten() {
            for leg in &mut node.legs {
                if leg.wire == from {
                    leg.wire = to;
                }
            }
        }
    }

    fn closed_loop(sp: &Space) -> Node {
        Node {
            kind: NodeKind::State(State {
                label: Some(format!("loop {}", sp.name())),
                tensor: Tensor::scalar(sp.dim() as f64),
            }),
            legs: Vec::new(),
        }
    }

    /// Removes one-in/one-out spiders, joining their wires.
    fn eliminate_identities(&mut self) -> bool {
        for n in 0..self.nodes.len() {
            let Some(node) = &self.nodes[n] else { continue };
            if node.spider_space().is_none() || node.arity() != (1, 1) {
                continue;
            }
            let sp = node.spider_space().cloned().unwrap();
            let a = node.legs.iter().find(|l| l.dir == Dir::In).unwrap().wire;
            let b = node.legs.iter().find(|l| l.dir == Dir::Out).unwrap().wire;
            if a == b {
                self.nodes[n] = Some(Self::closed_loop(&sp));
            } else {
                self.nodes[n] = None;
                self.rename_wire(b, a);
            }
            return true;
        }
        false
    }

    /// Special law: a wire from a spider back to itself is dropped.
    fn remove_self_loops(&mut self) -> bool {
        let mut changed = false;
        for slot in self.nodes.iter_mut() {
            let Some(node) = slot else { continue };
            let Some(sp) = node.spider_space().cloned() else {
                continue;
            };
            let mut counts: HashMap<usize, usize> = HashMap::new();
            for l in &node.legs {
                *counts.entry(l.wire).or_default() += 1;
            }
            if counts.values().all(|&c| c < 2) {
                continue;
            }
            node.legs.retain(|l| counts[&l.wire] < 2);
            if node.legs.is_empty() {
                *slot = Some(Self::closed_loop(&sp));
            }
            changed = true;
        }
        changed
    }

    fn shares_wire(a: &Node, b: &Node) -> bool {
        a.legs.iter().any(|x| b.legs.iter().any(|y| x.wire == y.wire))
    }

    fn fuse_pair(&mut self, x: usize, y: usize) {
        debug_assert!(x < y);
        let bx = self.nodes[x].take().unwrap();
        let by = self.nodes[y].take().unwrap();
        let sp = bx.spider_space().cloned().unwrap();
        let shared: Vec<usize> = bx
            .legs
            .iter()
            .filter(|l| by.legs.iter().any(|m| m.wire == l.wire))
            .map(|l| l.wire)
            .collect();
        let legs: Vec<Leg> = bx
            .legs
            .into_iter()
            .chain(by.legs)
            .filter(|l| !shared.contains(&l.wire))
            .collect();
        self.nodes[x] = Some(if legs.is_empty() {
            Self::closed_loop(&sp)
        } else {
            Node {
                kind: NodeKind::Spider(sp),
                legs,
            }
        });
    }

    /// Cup meeting cap on a shared wire.
    fn yank(&mut self) -> bool {
        for x in 0..self.nodes.len() {
            for y in x + 1..self.nodes.len() {
                let (Some(a), Some(b)) = (&self.nodes[x], &self.nodes[y]) else {
                    continue;
                };
                if a.spider_space().is_none() || b.spider_space().is_none() {
                    continue;
                }
                let pair = [a.arity(), b.arity()];
                if (pair == [(2, 0), (0, 2)] || pair == [(0, 2), (2, 0)]) && Self::shares_wire(a, b) {
                    self.fuse_pair(x, y);
                    return true;
                }
            }
        }
        false
    }

    fn fuse_spiders(&mut self) -> bool {
        for x in 0..self.nodes.len() {
            for y in x + 1..self.nodes.len() {
                let (Some(a), Some(b)) = (&self.nodes[x], &self.nodes[y]) else {
                    continue;
                };
                if a.spider_space().is_some() && b.spider_space().is_some() && Self::shares_wire(a, b) {
                    self.fuse_pair(x, y);
                    return true;
                }
            }
        }
        false
    }

    /// Applies identity elimination, yanking and spider fusion until none applies.
    pub fn normalize(&mut self) {
        loop {
            if self.eliminate_identities() || self.remove_self_loops() {
                continue;
            }
            if self.yank() {
                continue;
            }
            if self.fuse_spiders() {
                continue;
            }
            break;
        }
    }

    fn open_position(&self, end: End) -> Option<usize> {
        match end {
            End::Input(k) => Some(k),
            End::Output(k) => Some(self.inputs.len() + k),
            End::Leg(..) => None,
        }
    }

    /// Contracts the network greedily, smallest intermediate first.
    pub fn evaluate(&self) -> Result<Tensor, DiagramError> {
        #[derive(Clone, Copy, PartialEq, Eq)]
        enum Lab {
            Wire(usize),
            Open(usize),
        }
        let mut factors: Vec<(Tensor, Vec<Lab>)> = Vec::new();
        let mut wire_ends: HashMap<usize, Vec<End>> = HashMap::new();
        for w in self.live_wires() {
            wire_ends.insert(w, self.ends(w));
        }
        let label_for = |w: usize, me: End| -> Lab {
            let other = wire_ends[&w].iter().copied().find(|&e| e != me);
            match other.and_then(|e| self.open_position(e)) {
                Some(p) => Lab::Open(p),
                None => Lab::Wire(w),
            }
        };
        for (n, node) in self.nodes.iter().enumerate() {
            let Some(node) = node else { continue };
            let t = match &node.kind {
                NodeKind::State(s) => s.tensor.clone(),
                NodeKind::Spider(sp) => spider(sp, node.legs.len(), 0)?,
            };
            let labs = node
                .legs
                .iter()
                .enumerate()
                .map(|(k, l)| label_for(l.wire, End::Leg(n, k)))
                .collect();
            factors.push((t, labs));
        }
        for (&w, ends) in &wire_ends {
            let opens: Vec<usize> = ends.iter().filter_map(|&e| self.open_position(e)).collect();
            if opens.len() == 2 {
                factors.push((
                    Tensor::identity(&self.wire_space[w]),
                    vec![Lab::Open(opens[0]), Lab::Open(opens[1])],
                ));
            }
        }
        factors.sort_by_key(|(_, labs)| {
            labs.iter()
                .map(|l| match l {
                    Lab::Open(p) => *p,
                    Lab::Wire(w) => 1_000_000 + w,
                })
                .min()
                .unwrap_or(usize::MAX)
        });

        let trace_repeats = |mut t: Tensor, mut labs: Vec<Lab>| -> Result<(Tensor, Vec<Lab>), DiagramError> {
            while let Some((i, j)) = (0..labs.len())
                .flat_map(|i| (i + 1..labs.len()).map(move |j| (i, j)))
                .find(|&(i, j)| labs[i] == labs[j])
            {
                t = contract(&t, i, j)?;
                labs.remove(j);
                labs.remove(i);
            }
            Ok((t, labs))
        };
        let mut work = Vec::with_capacity(factors.len());
        for (t, labs) in factors {
            work.push(trace_repeats(t, labs)?);
        }

        while work.len() > 1 {
            let mut best: Option<(usize, usize, usize)> = None;
            for a in 0..work.len() {
                for b in a + 1..work.len() {
                    let shared = work[a].1.iter().filter(|l| work[b].1.contains(l)).count();
                    if shared == 0 {
                        continue;
                    }
                    let size: usize = work[a]
                        .1
                        .iter()
                        .zip(work[a].0.axes())
                        .filter(|(l, _)| !work[b].1.contains(l))
                        .chain(
                            work[b]
                                .1
                                .iter()
                                .zip(work[b].0.axes())
                                .filter(|(l, _)| !work[a].1.contains(l)),
                        )
                        .map(|(_, sp)| sp.dim())
                        .product();
                    if best.is_none_or(|(_, _, s)| size < s) {
                        best = Some((a, b, size));
                    }
                }
            }
            let (a, b) = match best {
                Some((a, b, _)) => (a, b),
                None => {
                    // disconnected pieces: take the product of the two smallest
                    let mut idx: Vec<usize> = (0..work.len()).collect();
                    idx.sort_by_key(|&k| work[k].0.len());
                    (idx[0].min(idx[1]), idx[0].max(idx[1]))
                }
            };
            let (tb, lb) = work.remove(b);
            let (ta, la) = work.remove(a);
            let pairs: Vec<(usize, usize)> = la
                .iter()
                .enumerate()
                .filter_map(|(i, l)| lb.iter().position(|m| m == l).map(|j| (i, j)))
                .collect();
            let t = tensordot(&ta, &tb, &pairs)?;
            let labs: Vec<Lab> = la
                .iter()
                .filter(|l| !lb.contains(l))
                .chain(lb.iter().filter(|l| !la.contains(l)))
                .copied()
                .collect();
            work.push((t, labs));
        }
        let (t, labs) = work.pop().unwrap_or_else(|| (Tensor::scalar(1.0), Vec::new()));
        let perm: Vec<usize> = (0..labs.len())
            .map(|p| labs.iter().position(|l| *l == Lab::Open(p)).expect("open wire"))
            .collect();
        Ok(t.permute(&perm)?)
    }

    /// Reads a fully normalised network back as a term.
    fn read_back(&self) -> MorphTerm {
        // layer A: boundary inputs, then every state output
        let mut layer_a: Vec<usize> = self.inputs.clone();
        let mut first: Vec<MorphTerm> = self
            .inputs
            .iter()
            .map(|&w| MorphTerm::Id(self.wire_space[w].clone()))
            .collect();
        let mut spiders: Vec<&Node> = Vec::new();
        for node in self.nodes.iter().flatten() {
            match &node.kind {
                NodeKind::State(s) => {
                    layer_a.extend(node.legs.iter().map(|l| l.wire));
                    first.push(MorphTerm::State(s.clone()));
                }
                NodeKind::Spider(_) => spiders.push(node),
            }
        }
        let pos_a = |w: usize| layer_a.iter().position(|&x| x == w);
        let pos_out = |w: usize| self.outputs.iter().position(|&x| x == w);

        let mut b_inputs: Vec<usize> = Vec::new();
        let mut b_outputs: Vec<usize> = Vec::new();
        let mut boxes: Vec<MorphTerm> = Vec::new();
        for node in &spiders {
            let sp = node.spider_space().unwrap().clone();
            let mut ins: Vec<usize> = node.legs.iter().filter(|l| l.dir == Dir::In).map(|l| l.wire).collect();
            let mut outs: Vec<usize> = node.legs.iter().filter(|l| l.dir == Dir::Out).map(|l| l.wire).collect();
            ins.sort_by_key(|&w| pos_a(w).expect("spider input fed from layer A"));
            outs.sort_by_key(|&w| pos_out(w).expect("spider output reaches the boundary"));
            boxes.push(match (ins.len(), outs.len()) {
                (2, 0) => MorphTerm::Cup(sp),
                (0, 2) => MorphTerm::Cap(sp),
                (m, n) => MorphTerm::Spider(sp, m, n),
            });
            b_inputs.extend(ins);
            b_outputs.extend(outs);
        }
        for &w in &layer_a {
            if pos_out(w).is_some() {
                b_inputs.push(w);
                b_outputs.push(w);
                boxes.push(MorphTerm::Id(self.wire_space[w].clone()));
            }
        }

        // layers made only of identities are left out
        let has_states = first.iter().any(|t| matches!(t, MorphTerm::State(_)));
        let has_spiders = !spiders.is_empty();
        let mut stages: Vec<MorphTerm> = Vec::new();
        if has_states {
            stages.extend(MorphTerm::par_all(first));
        }
        stages.extend(self.permutation(&layer_a, &b_inputs));
        if has_spiders {
            stages.extend(MorphTerm::par_all(boxes));
        }
        stages.extend(self.permutation(&b_outputs, &self.outputs));
        MorphTerm::seq_all(stages)
            .or_else(|| MorphTerm::ids(self.inputs.iter().map(|&w| &self.wire_space[w])))
            .unwrap_or_else(|| MorphTerm::state(Tensor::scalar(1.0)))
    }

    /// Swap layers taking wire order `from` to wire order `to`
    /// (odd-even transposition sort).
    fn permutation(&self, from: &[usize], to: &[usize]) -> Vec<MorphTerm> {
        debug_assert_eq!(from.len(), to.len());
        let rank: HashMap<usize, usize> = to.iter().enumerate().map(|(k, &w)| (w, k)).collect();
        let mut cur: Vec<usize> = from.to_vec();
        let mut layers = Vec::new();
        let mut parity = 0;
        let mut quiet_rounds = 0;
        while quiet_rounds < 2 {
            let mut pieces = Vec::new();
            let mut k = 0;
            let mut swapped = false;
            if parity == 1 && !cur.is_empty() {
                pieces.push(MorphTerm::Id(self.wire_space[cur[0]].clone()));
                k = 1;
            }
            while k < cur.len() {
                if k + 1 < cur.len() && rank[&cur[k]] > rank[&cur[k + 1]] {
                    pieces.push(MorphTerm::Swap(
                        self.wire_space[cur[k]].clone(),
                        self.wire_space[cur[k + 1]].clone(),
                    ));
                    cur.swap(k, k + 1);
                    swapped = true;
                    k += 2;
                } else if k + 1 < cur.len() {
                    pieces.push(MorphTerm::Id(self.wire_space[cur[k]].clone()));
                    pieces.push(MorphTerm::Id(self.wire_space[cur[k + 1]].clone()));
                    k += 2;
                } else {
                    pieces.push(MorphTerm::Id(self.wire_space[cur[k]].clone()));
                    k += 1;
                }
            }
            if swapped {
                layers.push(MorphTerm::par_all(pieces).unwrap());
                quiet_rounds = 0;
            } else {
                quiet_rounds += 1;
            }
            parity ^= 1;
        }
        layers
    }

    /// Graphviz rendering: one node per box or spider, one edge per wire.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{name}\" {{");
        let _ = writeln!(out, "  rankdir=TB;");
        for k in 0..self.inputs.len() {
            let _ = writeln!(out, "  in{k} [shape=point, xlabel=\"in{k}\"];");
        }
        for k in 0..self.outputs.len() {
            let _ = writeln!(out, "  out{k} [shape=point, xlabel=\"out{k}\"];");
        }
        for (n, node) in self.nodes.iter().enumerate() {
            let Some(node) = node else { continue };
            let (label, shape) = match &node.kind {
                NodeKind::State(s) => (s.label.clone().unwrap_or_else(|| "state".into()), "triangle"),
                NodeKind::Spider(sp) => {
                    let glyph = match node.arity() {
                        (2, 0) => "cup".to_string(),
                        (0, 2) => "cap".to_string(),
                        (2, 1) => "mu".to_string(),
                        (1, 2) => "delta".to_string(),
                        (1, 0) => "iota".to_string(),
                        (0, 1) => "zeta".to_string(),
                        (m, k) => format!("spider {m},{k}"),
                    };
                    (format!("{glyph} {}", sp.name()), "circle")
                }
            };
            let _ = writeln!(out, "  n{n} [label=\"{label}\", shape={shape}];");
        }
        let name_of = |e: End| match e {
            End::Input(k) => format!("in{k}"),
            End::Output(k) => format!("out{k}"),
            End::Leg(n, _) => format!("n{n}"),
        };
        for w in self.live_wires() {
            let ends = self.ends(w);
            let is_source = |e: &End| match e {
                End::Input(_) => true,
                End::Output(_) => false,
                End::Leg(n, k) => self.nodes[*n].as_ref().unwrap().legs[*k].dir == Dir::Out,
            };
            let src = ends.iter().find(|e| is_source(e)).copied();
            let dst = ends.iter().find(|e| !is_source(e)).copied();
            if let (Some(s), Some(d)) = (src, dst) {
                let _ = writeln!(
                    out,
                    "  {} -> {} [label=\"{}\"];",
                    name_of(s),
                    name_of(d),
                    self.wire_space[w].name()
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Evaluates a term to the tensor of its linear map (axes `dom ++ cod`).
pub fn evaluate(t: &MorphTerm) -> Result<Tensor, DiagramError> {
    Network::compile(t)?.evaluate()
}

/// Rewrites to normal form: identities removed, cups and caps yanked,
/// connected spiders on one space fused.
pub fn normalize(t: &MorphTerm) -> Result<MorphTerm, DiagramError> {
    let mut net = Network::compile(t)?;
    net.normalize();
    Ok(net.read_back())
}

pub fn to_dot(t: &MorphTerm, name: &str) -> Result<String, DiagramError> {
    Ok(Network::compile(t)?.to_dot(name))
}

/// Entrywise comparison of two evaluations.
pub fn same_semantics(a: &MorphTerm, b: &MorphTerm, tol: tensor::Tolerance) -> Result<bool, DiagramError> {
    Ok(evaluate(a)?.approx_eq(&evaluate(b)?, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Tolerance;

    fn sp(name: &str, d: usize) -> Space {
        Space::numbered(name, d).unwrap()
    }

    fn yanking(a: &Space) -> MorphTerm {
        // (1 (x) cup) . (cap (x) 1)
        MorphTerm::Cap(a.clone())
            .par(MorphTerm::Id(a.clone()))
            .seq(MorphTerm::Id(a.clone()).par(MorphTerm::Cup(a.clone())))
    }

    #[test]
    fn typecheck_interfaces() {
        let n = sp("N", 2);
        let s = sp("S", 3);
        assert_eq!(
            typecheck(&yanking(&n)).unwrap(),
            Interface {
                inputs: vec![n.clone()],
                outputs: vec![n.clone()]
            }
        );
        let v = Tensor::vector(&n, vec![1.0, 2.0]).unwrap();
        let t = MorphTerm::Cup(n.clone()).seq(MorphTerm::state(v));
        assert_eq!(typecheck(&t).unwrap().outputs, vec![n.clone()]);
        let bad = MorphTerm::Id(n.clone()).par(MorphTerm::Id(n.clone()).seq(MorphTerm::Id(s)));
        match typecheck(&bad) {
            Err(DiagramError::Mismatch { path, .. }) => assert_eq!(path, "par.1"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            typecheck(&MorphTerm::Spider(n, 0, 0)),
            Err(DiagramError::EmptySpider { .. })
        ));
    }

    #[test]
    fn yanking_evaluates_and_normalizes_to_identity() {
        let n = sp("N", 4);
        let t = yanking(&n);
        assert_eq!(evaluate(&t).unwrap(), Tensor::identity(&n));
        assert_eq!(evaluate_direct(&t).unwrap(), Tensor::identity(&n));
        assert_eq!(normalize(&t).unwrap(), MorphTerm::Id(n.clone()));
        // the other snake
        let t2 = MorphTerm::Id(n.clone())
            .par(MorphTerm::Cap(n.clone()))
            .seq(MorphTerm::Cup(n.clone()).par(MorphTerm::Id(n.clone())));
        assert_eq!(normalize(&t2).unwrap(), MorphTerm::Id(n));
    }

    #[test]
    fn spider_unit_is_identity() {
        let n = sp("N", 3);
        assert_eq!(
            normalize(&MorphTerm::Spider(n.clone(), 1, 1)).unwrap(),
            MorphTerm::Id(n)
        );
    }

    #[test]
    fn state_alone() {
        let n = sp("N", 3);
        let v = Tensor::vector(&n, vec![1.0, -2.0, 0.5]).unwrap();
        let t = MorphTerm::state(v.clone());
        assert_eq!(evaluate(&t).unwrap(), v);
        assert_eq!(normalize(&t).unwrap(), t);
    }

    #[test]
    fn transitive_sentence_diagram() {
        let n = sp("N", 2);
        let s = sp("S", 1);
        let men = Tensor::vector(&n, vec![1.0, 1.0]).unwrap();
        let mary = Tensor::vector(&n, vec![0.0, 1.0]).unwrap();
        let mut love = Tensor::zeros(vec![n.clone(), s.clone(), n.clone()]);
        love.set(&[0, 0, 1], 1.0);
        let words = MorphTerm::par_all([
            MorphTerm::named_state("men", men),
            MorphTerm::named_state("love", love),
            MorphTerm::named_state("Mary", mary),
        ])
        .unwrap();
        let cups = MorphTerm::par_all([
            MorphTerm::Cup(n.clone()),
            MorphTerm::Id(s.clone()),
            MorphTerm::Cup(n.clone()),
        ])
        .unwrap();
        let t = words.seq(cups);
        let v = evaluate(&t).unwrap();
        assert_eq!(v.axes(), std::slice::from_ref(&s));
        assert_eq!(v.data(), &[1.0]);
        assert_eq!(evaluate_direct(&t).unwrap(), v);
        let nf = normalize(&t).unwrap();
        assert!(nf.spiders().is_empty());
        assert_eq!(evaluate(&nf).unwrap(), v);
    }

    #[test]
    fn two_mu_spiders_fuse() {
        let n = sp("N", 3);
        let mu = || MorphTerm::Spider(n.clone(), 2, 1);
        // (mu (x) id) ; mu
        let chain = mu().par(MorphTerm::Id(n.clone())).seq(mu());
        let nf = normalize(&chain).unwrap();
        assert_eq!(nf, MorphTerm::Spider(n.clone(), 3, 1));
        assert!(same_semantics(&chain, &nf, Tolerance::DEFAULT).unwrap());
    }

    #[test]
    fn closed_loops_become_dimension_scalars() {
        let n = sp("N", 5);
        let t = MorphTerm::Cap(n.clone()).seq(MorphTerm::Cup(n.clone()));
        assert_eq!(evaluate(&t).unwrap().value(), Some(5.0));
        let nf = normalize(&t).unwrap();
        assert_eq!(evaluate(&nf).unwrap().value(), Some(5.0));
        let zeta_iota = MorphTerm::Spider(n.clone(), 0, 1).seq(MorphTerm::Spider(n.clone(), 1, 0));
        assert_eq!(evaluate(&normalize(&zeta_iota).unwrap()).unwrap().value(), Some(5.0));
    }

    #[test]
    fn swaps_are_wiring() {
        let a = sp("A", 2);
        let b = sp("B", 3);
        let t = MorphTerm::Swap(a.clone(), b.clone()).seq(MorphTerm::Swap(b.clone(), a.clone()));
        let nf = normalize(&t).unwrap();
        assert_eq!(nf, MorphTerm::Id(a.clone()).par(MorphTerm::Id(b.clone())));
        assert_eq!(evaluate(&t).unwrap(), evaluate_direct(&t).unwrap());
        let single = MorphTerm::Swap(a.clone(), b.clone());
        assert_eq!(normalize(&single).unwrap(), single);
        assert_eq!(evaluate(&single).unwrap(), evaluate_direct(&single).unwrap());
    }

    #[test]
    fn normalize_is_idempotent_on_mixed_term() {
        let n = sp("N", 2);
        let s = sp("S", 2);
        let v = Tensor::vector(&n, vec![0.3, 0.7]).unwrap();
        let m = Tensor::from_fn(vec![s.clone(), n.clone()], |i| (i[0] + 2 * i[1]) as f64);
        let t = MorphTerm::state(m)
            .par(MorphTerm::state(v))
            .seq(MorphTerm::Id(s.clone()).par(MorphTerm::Spider(n.clone(), 2, 3)))
            .seq(MorphTerm::Swap(s.clone(), n.clone()).par(MorphTerm::Cup(n.clone())));
        let once = normalize(&t).unwrap();
        let twice = normalize(&once).unwrap();
        assert_eq!(once, twice);
        assert!(same_semantics(&t, &once, Tolerance::DEFAULT).unwrap());
        assert_eq!(typecheck(&once).unwrap(), typecheck(&t).unwrap());
    }

    #[test]
    fn dot_dump_lists_nodes_and_wires() {
        let n = sp("N", 2);
        let dot = to_dot(&yanking(&n), "snake").unwrap();
        assert!(dot.starts_with("digraph \"snake\""));
        assert!(dot.contains("cap N"));
        assert!(dot.contains("cup N"));
        assert_eq!(dot.matches("->").count(), 3);
    }
}
