//! Stallings folding of labelled graphs.
//!
//! Labels are signed integers; traversing an edge backwards reads the negated
//! label. Optionally every edge carries a value in a second free group (the
//! group on the wedge generators), maintained by gauge changes so that the
//! product of values along any closed path at the base vertex is preserved.

use crate::word::{Letter, Word};

pub(crate) struct Folder {
    parent: Vec<usize>,
    adj: Vec<Vec<usize>>,
    ends: Vec<(usize, usize)>,
    labels: Vec<Letter>,
    alive: Vec<bool>,
    values: Option<Vec<Word>>,
    base: usize,
    rank_loss: usize,
    dirty: Vec<usize>,
}

pub(crate) struct Folded {
    pub nv: usize,
    pub base: usize,
    pub edges: Vec<(usize, usize, Letter)>,
    pub values: Option<Vec<Word>>,
    pub rank_loss: usize,
}

impl Folder {
    pub fn new(nv: usize, base: usize, track: bool) -> Folder {
        Folder {
            parent: (0..nv).collect(),
            adj: vec![Vec::new(); nv],
            ends: Vec::new(),
            labels: Vec::new(),
            alive: Vec::new(),
            values: if track { Some(Vec::new()) } else { None },
            base,
            rank_loss: 0,
            dirty: (0..nv).collect(),
        }
    }

    pub fn add_vertex(&mut self) -> usize {
        let v = self.parent.len();
        self.parent.push(v);
        self.adj.push(Vec::new());
        self.dirty.push(v);
        v
    }

    pub fn add_edge(&mut self, o: usize, t: usize, label: Letter, value: Word) -> usize {
        let e = self.ends.len();
        let (ro, rt) = (self.find(o), self.find(t));
        self.ends.push((o, t));
        self.labels.push(label);
        self.alive.push(true);
        if let Some(vals) = self.values.as_mut() {
            vals.push(value);
        }
        self.adj[ro].push(e);
        if rt != ro {
            self.adj[rt].push(e);
        }
        self.dirty.push(ro);
        self.dirty.push(rt);
        e
    }

    /// Wedge of loops at vertex 0, one per nonempty path; the last edge of
    /// loop `j` carries the value `x_{j+1}` when tracking.
    pub fn wedge(paths: &[Vec<Letter>], track: bool) -> Folder {
        let mut f = Folder::new(1, 0, track);
        for (j, p) in paths.iter().enumerate() {
            if p.is_empty() {
                continue;
            }
            let mut cur = 0;
            for (k, &l) in p.iter().enumerate() {
                let last = k + 1 == p.len();
                let next = if last { 0 } else { f.add_vertex() };
                let val = if last { Word::gen(j as u32 + 1) } else { Word::empty() };
                f.add_edge(cur, next, l, val);
                cur = next;
            }
        }
        f
    }

    fn find(&mut self, v: usize) -> usize {
        let mut r = v;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut x = v;
        while self.parent[x] != r {
            let nx = self.parent[x];
            self.parent[x] = r;
            x = nx;
        }
        r
    }

    fn other_end(&mut self, e: usize, forward: bool) -> usize {
        let (o, t) = self.ends[e];
        if forward {
            self.find(t)
        } else {
            self.find(o)
        }
    }

    fn dir_value(&self, e: usize, forward: bool) -> Word {
        let v = &self.values.as_ref().expect("tracking")[e];
        if forward {
            v.clone()
        } else {
            v.inverse()
        }
    }

    fn find_fold(&mut self, v: usize) -> Option<((usize, bool), (usize, bool))> {
        let mut seen: Vec<(Letter, usize, bool)> = Vec::new();
        let incident = self.adj[v].clone();
        for e in incident {
            if !self.alive[e] {
                continue;
            }
            let (o, t) = self.ends[e];
            let (ro, rt) = (self.find(o), self.find(t));
            let mut dirs = Vec::with_capacity(2);
            if ro == v {
                dirs.push((self.labels[e], true));
            }
            if rt == v {
                dirs.push((-self.labels[e], false));
            }
            for (lab, fwd) in dirs {
                if let Some(&(_, e2, f2)) = seen.iter().find(|s| s.0 == lab) {
                    return Some(((e2, f2), (e, fwd)));
                }
                seen.push((lab, e, fwd));
            }
        }
        None
    }

    fn merge(&mut self, keep: usize, gone: usize) {
        self.parent[gone] = keep;
        let moved = std::mem::take(&mut self.adj[gone]);
        for e in moved {
            if self.alive[e] && !self.adj[keep].contains(&e) {
                self.adj[keep].push(e);
            }
        }
        self.adj[keep].retain(|&e| self.alive[e]);
    }

    fn gauge(&mut self, x: usize, g: &Word) {
        let gi = g.inverse();
        let incident = self.adj[x].clone();
        for e in incident {
            if !self.alive[e] {
                continue;
            }
            let (o, t) = self.ends[e];
            let (ro, rt) = (self.find(o), self.find(t));
            let vals = self.values.as_mut().expect("tracking");
            let mut val = vals[e].clone();
            if ro == x {
                val = g.mul(&val);
            }
            if rt == x {
                val = val.mul(&gi);
            }
            vals[e] = val;
        }
    }

    fn fold_pair(&mut self, v: usize, a: (usize, bool), b: (usize, bool)) {
        let xa = self.other_end(a.0, a.1);
        let xb = self.other_end(b.0, b.1);
        if xa == xb {
            self.alive[b.0] = false;
            self.rank_loss += 1;
            self.dirty.push(v);
            self.dirty.push(xa);
            return;
        }
        // Absorb one endpoint into the other, never absorbing the base.
        let ((es, xs), (ed, xd)) = if xb == self.base { ((b, xb), (a, xa)) } else { ((a, xa), (b, xb)) };
        if self.values.is_some() {
            let g = self.dir_value(es.0, es.1).inverse().mul(&self.dir_value(ed.0, ed.1));
            if !g.is_empty() {
                self.gauge(xd, &g);
            }
        }
        self.alive[ed.0] = false;
        self.merge(xs, xd);
        self.dirty.push(xs);
        self.dirty.push(v);
    }

    pub fn fold_all(&mut self) {
        while let Some(v) = self.dirty.pop() {
            let v = self.find(v);
            if let Some((a, b)) = self.find_fold(v) {
                self.fold_pair(v, a, b);
                self.dirty.push(v);
            }
        }
    }

    /// Compacts vertex and edge numbering.
    pub fn finish(mut self) -> Folded {
        let n = self.parent.len();
        let mut index = vec![usize::MAX; n];
        let mut nv = 0;
        let mut vertex_map = vec![0; n];
        for v in 0..n {
            let r = self.find(v);
            if index[r] == usize::MAX {
                index[r] = nv;
                nv += 1;
            }
            vertex_map[v] = index[r];
        }
        let mut edges = Vec::new();
        let mut values = self.values.as_ref().map(|_| Vec::new());
        for e in 0..self.ends.len() {
            if !self.alive[e] {
                continue;
            }
            let (o, t) = self.ends[e];
            edges.push((vertex_map[o], vertex_map[t], self.labels[e]));
            if let (Some(out), Some(vals)) = (values.as_mut(), self.values.as_ref()) {
                out.push(vals[e].clone());
            }
        }
        Folded { nv, base: vertex_map[self.base], edges, values, rank_loss: self.rank_loss }
    }
}
