//! Plain-text formats for graphs, marked graphs, pointed marked graphs,
//! splitting blueprints, free factor systems, automorphisms and spine paths.
//!
//! ```text
//! graph { v: v0 v1; e: e1 v0 v1; e2 v1 v1; e3 v0 v1; }
//! marking { a1 = e1 e3^-1; a2 = e1 e2 e1^-1; }
//! basepoint: v0
//! ```

use crate::covers::FreeFactorSystem;
use crate::error::{Error, Result};
use crate::graph::CoreGraph;
use crate::marked::MarkedGraph;
use crate::retract_split::{RayDatum, RetractionData, SplittingBlueprint};
use crate::spine::{Certificate, SpinePath};
use crate::word::{format_symbols, parse_symbol, Automorphism, Endo, Word};

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn strip_comments(s: &str) -> String {
    s.lines().map(|l| l.split('#').next().unwrap_or("")).collect::<Vec<_>>().join("\n")
}

/// Body of the first `name { ... }` block and the text with it removed.
fn take_block(s: &str, name: &str) -> Result<Option<(String, String)>> {
    let mut from = 0;
    while let Some(off) = s[from..].find(name) {
        let at = from + off;
        let before_ok = at == 0 || !s[..at].ends_with(|c: char| c.is_alphanumeric() || c == '_');
        let rest = s[at + name.len()..].trim_start();
        if before_ok && rest.starts_with('{') {
            let open = s.len() - rest.len();
            let close = s[open..].find('}').ok_or_else(|| perr(format!("unterminated {name} block")))? + open;
            let body = s[open + 1..close].to_string();
            let remaining = format!("{}{}", &s[..at], &s[close + 1..]);
            return Ok(Some((body, remaining)));
        }
        from = at + name.len();
    }
    Ok(None)
}

fn items(body: &str) -> impl Iterator<Item = &str> {
    body.split(';').map(str::trim).filter(|x| !x.is_empty())
}

fn parse_vertex(tok: &str) -> Result<usize> {
    tok.strip_prefix('v').and_then(|i| i.parse().ok()).ok_or_else(|| perr(format!("bad vertex '{tok}'")))
}

fn parse_path(s: &str) -> Result<Vec<i32>> {
    let s = s.trim();
    if s == "1" || s.is_empty() {
        return Ok(Vec::new());
    }
    s.split_whitespace().map(|t| parse_symbol(t, 'e')).collect()
}

/// Parses a word literal; `1` or an empty string is the identity.
pub fn parse_word(s: &str) -> Result<Word> {
    let s = s.trim();
    if s == "1" {
        return Ok(Word::empty());
    }
    Word::parse(s)
}

pub fn parse_graph(s: &str) -> Result<CoreGraph> {
    let s = strip_comments(s);
    let (body, _) = take_block(&s, "graph")?.ok_or_else(|| perr("missing graph block"))?;
    parse_graph_body(&body)
}

fn parse_graph_body(body: &str) -> Result<CoreGraph> {
    let mut nv = None;
    let mut edges: Vec<Option<(usize, usize)>> = Vec::new();
    let mut in_edges = false;
    for item in items(body) {
        let item = if let Some(rest) = item.strip_prefix("v:") {
            let vs: Vec<usize> = rest.split_whitespace().map(parse_vertex).collect::<Result<_>>()?;
            if vs.iter().enumerate().any(|(i, &v)| i != v) {
                return Err(perr("vertices must be listed as v0 v1 ... in order"));
            }
            nv = Some(vs.len());
            continue;
        } else if let Some(rest) = item.strip_prefix("e:") {
            in_edges = true;
            rest.trim()
        } else if in_edges {
            item
        } else {
            return Err(perr(format!("unexpected item '{item}' in graph block")));
        };
        let toks: Vec<&str> = item.split_whitespace().collect();
        let [name, o, t] = toks[..] else {
            return Err(perr(format!("bad edge '{item}'")));
        };
        let id = parse_symbol(name, 'e')?;
        if id < 0 {
            return Err(perr(format!("edge name '{name}' cannot be inverted")));
        }
        let idx = id as usize - 1;
        if edges.len() <= idx {
            edges.resize(idx + 1, None);
        }
        if edges[idx].replace((parse_vertex(o)?, parse_vertex(t)?)).is_some() {
            return Err(perr(format!("edge {name} listed twice")));
        }
    }
    let nv = nv.ok_or_else(|| perr("graph block has no vertex list"))?;
    let edges = edges
        .into_iter()
        .enumerate()
        .map(|(i, e)| e.ok_or_else(|| perr(format!("edge e{} missing", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    CoreGraph::new(nv, edges)
}

pub fn print_graph(g: &CoreGraph) -> String {
    let vs: Vec<String> = (0..g.nv()).map(|v| format!("v{v}")).collect();
    let es: Vec<String> = g.edges().iter().enumerate().map(|(i, (o, t))| format!("e{} v{o} v{t};", i + 1)).collect();
    format!("graph {{ v: {}; e: {} }}", vs.join(" "), es.join(" "))
}

/// Parses a graph block, a marking block and an optional basepoint line
/// (default `v0`).
pub fn parse_marked(s: &str) -> Result<MarkedGraph> {
    let s = strip_comments(s);
    let (gbody, rest) = take_block(&s, "graph")?.ok_or_else(|| perr("missing graph block"))?;
    let graph = parse_graph_body(&gbody)?;
    let (mbody, rest) = take_block(&rest, "marking")?.ok_or_else(|| perr("missing marking block"))?;
    let mut marking: Vec<Option<Vec<i32>>> = Vec::new();
    for item in items(&mbody) {
        let (lhs, rhs) = item.split_once('=').ok_or_else(|| perr(format!("bad marking entry '{item}'")))?;
        let l = parse_symbol(lhs.trim(), 'a')?;
        if l < 0 {
            return Err(perr("marking keys must be uninverted generators"));
        }
        let idx = l as usize - 1;
        if marking.len() <= idx {
            marking.resize(idx + 1, None);
        }
        if marking[idx].replace(parse_path(rhs)?).is_some() {
            return Err(perr(format!("generator a{l} marked twice")));
        }
    }
    let marking = marking
        .into_iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| perr(format!("generator a{} unmarked", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    let mut base = 0;
    for line in rest.lines().map(str::trim).filter(|l| !l.is_empty()) {
        match line.split_once(':') {
            Some(("basepoint", v)) => base = parse_vertex(v.trim())?,
            _ => return Err(perr(format!("unexpected line '{line}'"))),
        }
    }
    MarkedGraph::new(graph, base, marking)
}

pub fn print_marked(g: &MarkedGraph) -> String {
    let entries: Vec<String> =
        g.marking().iter().enumerate().map(|(i, p)| format!("a{} = {};", i + 1, format_symbols(p, 'e'))).collect();
    format!("{}\nmarking {{ {} }}\nbasepoint: v{}\n", print_graph(g.graph()), entries.join(" "), g.base())
}

/// Images of `a_1, ..., a_n`, either as `a1 -> w1, a2 -> w2` or as the
/// images alone separated by `;`.
pub fn parse_endo(s: &str) -> Result<Endo> {
    let images = if s.contains("->") {
        let mut imgs: Vec<Option<Word>> = Vec::new();
        for part in s.split([',', ';']).map(str::trim).filter(|p| !p.is_empty()) {
            let (lhs, rhs) = part.split_once("->").ok_or_else(|| perr(format!("bad image '{part}'")))?;
            let l = parse_symbol(lhs.trim(), 'a')?;
            if l < 0 {
                return Err(perr("images are given for uninverted generators"));
            }
            let idx = l as usize - 1;
            if imgs.len() <= idx {
                imgs.resize(idx + 1, None);
            }
            imgs[idx] = Some(parse_word(rhs)?);
        }
        imgs.into_iter()
            .enumerate()
            .map(|(i, w)| w.ok_or_else(|| perr(format!("no image for a{}", i + 1))))
            .collect::<Result<Vec<_>>>()?
    } else {
        s.split(';').map(str::trim).filter(|p| !p.is_empty()).map(parse_word).collect::<Result<Vec<_>>>()?
    };
    Endo::new(images)
}

pub fn parse_automorphism(s: &str) -> Result<Automorphism> {
    Automorphism::new(parse_endo(s)?)
}

pub fn print_endo(f: &Endo) -> String {
    f.images().iter().map(|w| w.to_string()).collect::<Vec<_>>().join("; ")
}

fn parse_gens(s: &str) -> Result<Vec<Word>> {
    if s.contains(',') {
        s.split(',').map(parse_word).collect()
    } else {
        s.split_whitespace().map(parse_word).collect()
    }
}

fn print_gens(gens: &[Word]) -> String {
    let sep = if gens.iter().all(|w| w.len() == 1) { " " } else { ", " };
    gens.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(sep)
}

/// Components separated by `|`, generators within a component by `,` (or
/// whitespace when every generator is a single letter).
pub fn parse_system(rank: usize, s: &str) -> Result<FreeFactorSystem> {
    let comps = s.split('|').map(str::trim).filter(|c| !c.is_empty()).map(parse_gens).collect::<Result<Vec<_>>>()?;
    FreeFactorSystem::new(rank, comps)
}

pub fn print_system(f: &FreeFactorSystem) -> String {
    f.components().iter().map(|c| print_gens(c)).collect::<Vec<_>>().join(" | ")
}

fn parse_ray(s: &str) -> Result<RayDatum> {
    let (p, q) = s.split_once(',').ok_or_else(|| perr(format!("bad ray '{s}'")))?;
    let prefix = p.trim().strip_prefix("prefix").ok_or_else(|| perr("ray needs a prefix"))?.trim();
    let prefix = prefix.trim_matches('"');
    let period = q.trim().strip_prefix("period").ok_or_else(|| perr("ray needs a period"))?;
    RayDatum::new(parse_word(prefix)?, parse_word(period)?)
}

fn print_ray(r: &RayDatum) -> String {
    let prefix = if r.prefix.is_empty() { String::new() } else { r.prefix.to_string() };
    format!("prefix \"{}\", period {}", prefix, r.period)
}

/// `splitting { type: loop; vertex A = a1 a2; stable: a3; ray1: prefix "", period a3; ray2: prefix "", period a3^-1 }`
/// or, for a segment, two vertex lines `vertex A0 = ...; vertex A1 = ...`.
/// Missing rays take their default values.
pub fn parse_splitting(s: &str) -> Result<RetractionData> {
    let s = strip_comments(s);
    let (body, _) = take_block(&s, "splitting")?.ok_or_else(|| perr("missing splitting block"))?;
    let mut kind = None;
    let mut vertices = Vec::new();
    let mut stable = None;
    let mut rays = [None, None];
    for item in items(&body) {
        if let Some(rest) = item.strip_prefix("vertex") {
            let (_, gens) = rest.split_once('=').ok_or_else(|| perr(format!("bad vertex line '{item}'")))?;
            vertices.push(parse_gens(gens)?);
            continue;
        }
        let (key, val) = item.split_once(':').ok_or_else(|| perr(format!("bad splitting entry '{item}'")))?;
        let val = val.trim();
        match key.trim() {
            "type" => kind = Some(val.to_string()),
            "stable" => stable = Some(parse_word(val)?),
            "ray1" => rays[0] = Some(parse_ray(val)?),
            "ray2" => rays[1] = Some(parse_ray(val)?),
            k => return Err(perr(format!("unknown splitting key '{k}'"))),
        }
    }
    let bp = match (kind.as_deref(), vertices.len()) {
        (Some("loop"), 1) => {
            let stable = stable.ok_or_else(|| perr("loop splitting needs a stable letter"))?;
            SplittingBlueprint::new_loop(vertices.remove(0), stable)?
        }
        (Some("segment"), 2) => {
            let a1 = vertices.pop().unwrap();
            SplittingBlueprint::new_segment(vertices.pop().unwrap(), a1)?
        }
        _ => return Err(perr("splitting needs type loop with one vertex or segment with two")),
    };
    let defaults = RetractionData::with_default_rays(bp.clone())?.rays;
    let [d0, d1] = defaults;
    let [r0, r1] = rays;
    RetractionData::new(bp, [r0.unwrap_or(d0), r1.unwrap_or(d1)])
}

pub fn print_splitting(d: &RetractionData) -> String {
    let head = match &d.blueprint {
        SplittingBlueprint::Loop { vertex, stable } => {
            format!("type: loop; vertex A = {}; stable: {};", print_gens(vertex), stable)
        }
        SplittingBlueprint::Segment { a0, a1 } => {
            format!("type: segment; vertex A0 = {}; vertex A1 = {};", print_gens(a0), print_gens(a1))
        }
    };
    format!("splitting {{ {} ray1: {}; ray2: {} }}\n", head, print_ray(&d.rays[0]), print_ray(&d.rays[1]))
}

fn print_edges(f: &[usize]) -> String {
    f.iter().map(|e| format!("e{}", e + 1)).collect::<Vec<_>>().join(" ")
}

/// Numbered vertices, each followed by the certificate to the next one.
pub fn print_path(p: &SpinePath) -> String {
    let mut out = String::new();
    for (i, v) in p.vertices.iter().enumerate() {
        out.push_str(&format!("vertex {i}\n{}", print_marked(v)));
        if let Some(c) = p.certificates.get(i) {
            let line = match c {
                Certificate::Collapse(f) => format!("collapse {}", print_edges(f)),
                Certificate::Expand(f) => format!("expand {}", print_edges(f)),
            };
            out.push_str(&line);
            out.push('\n');
        }
    }
    out
}

pub fn parse_path_dump(s: &str) -> Result<SpinePath> {
    let s = strip_comments(s);
    let mut vertices = Vec::new();
    let mut certificates = Vec::new();
    let mut chunk = String::new();
    let flush = |chunk: &mut String, vertices: &mut Vec<MarkedGraph>| -> Result<()> {
        if !chunk.trim().is_empty() {
            vertices.push(parse_marked(chunk)?);
        }
        chunk.clear();
        Ok(())
    };
    for line in s.lines() {
        let t = line.trim();
        if let Some(idx) = t.strip_prefix("vertex ") {
            flush(&mut chunk, &mut vertices)?;
            if idx.trim().parse::<usize>().ok() != Some(vertices.len()) {
                return Err(perr(format!("vertex {} out of order", idx.trim())));
            }
        } else if let Some((kind, rest)) = t.split_once(' ').filter(|(k, _)| *k == "collapse" || *k == "expand") {
            flush(&mut chunk, &mut vertices)?;
            let f = rest
                .split_whitespace()
                .map(|tok| match parse_symbol(tok, 'e')? {
                    e if e > 0 => Ok(e as usize - 1),
                    _ => Err(perr("certificate edges are uninverted")),
                })
                .collect::<Result<Vec<_>>>()?;
            certificates.push(if kind == "collapse" { Certificate::Collapse(f) } else { Certificate::Expand(f) });
        } else {
            chunk.push_str(line);
            chunk.push('\n');
        }
    }
    flush(&mut chunk, &mut vertices)?;
    if vertices.len() != certificates.len() + 1 {
        return Err(perr("path dump needs one certificate between consecutive vertices"));
    }
    Ok(SpinePath { vertices, certificates })
}

#[cfg(test)]
mod tests {
    use super::*;

    const THETA: &str =
        "graph { v: v0 v1; e: e1 v0 v1; e2 v0 v1; e3 v0 v1; }\nmarking { a1 = e1 e2^-1; a2 = e2 e3^-1; }\n";

    #[test]
    fn graph_round_trip() {
        let g = parse_graph("graph { v: v0 v1; e: e1 v0 v1; e2 v1 v1; }").unwrap();
        assert_eq!(g.nv(), 2);
        assert_eq!(g.edges(), &[(0, 1), (1, 1)]);
        assert_eq!(parse_graph(&print_graph(&g)).unwrap(), g);
    }

    #[test]
    fn marked_round_trip() {
        let g = parse_marked(THETA).unwrap();
        assert_eq!(g.base(), 0);
        let text = print_marked(&g);
        assert_eq!(parse_marked(&text).unwrap(), g);
        assert_eq!(print_marked(&parse_marked(&text).unwrap()), text);
    }

    #[test]
    fn basepoint_line() {
        let text = "graph { v: v0 v1; e: e1 v0 v1; e2 v1 v1; e3 v0 v0; }\nmarking { a1 = e2; a2 = e1^-1 e3 e1; }\nbasepoint: v1\n";
        let g = parse_marked(text).unwrap();
        assert_eq!(g.base(), 1);
        assert_eq!(print_marked(&g), text);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_graph("graph { v: v0; e: e1 v0 v3; }").is_err());
        assert!(parse_marked("graph { v: v0; e: e1 v0 v0; }\nmarking { a2 = e1; }").is_err());
        assert!(parse_marked("graph { v: v0; e: e1 v0 v0; }").is_err());
    }

    #[test]
    fn splitting_round_trip() {
        let s = "splitting { type: loop; vertex A = a1 a2; stable: a3; ray1: prefix \"\", period a3; ray2: prefix \"\", period a3^-1 }";
        let d = parse_splitting(s).unwrap();
        assert!(d.blueprint.is_loop());
        assert_eq!(parse_splitting(&print_splitting(&d)).unwrap(), d);
        let seg = parse_splitting("splitting { type: segment; vertex A0 = a1; vertex A1 = a2 a3 a2^-1, a2 }").unwrap();
        assert_eq!(seg.rays, RetractionData::with_default_rays(seg.blueprint.clone()).unwrap().rays);
        assert_eq!(parse_splitting(&print_splitting(&seg)).unwrap(), seg);
    }

    #[test]
    fn endo_forms_agree() {
        let a = parse_endo("a1 -> a1 a2, a2 -> a2").unwrap();
        let b = parse_endo("a1 a2; a2").unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_endo(&print_endo(&a)).unwrap(), a);
    }

    #[test]
    fn system_round_trip() {
        let f = parse_system(3, "a1, a2 a3 | ").unwrap();
        assert_eq!(f.components().len(), 1);
        assert_eq!(parse_system(3, &print_system(&f)).unwrap(), f);
    }

    #[test]
    fn path_round_trip() {
        let rose = MarkedGraph::rose(2);
        let theta = parse_marked(THETA).unwrap();
        let p = SpinePath { vertices: vec![theta.clone(), rose], certificates: vec![Certificate::Collapse(vec![0])] };
        let text = print_path(&p);
        let q = parse_path_dump(&text).unwrap();
        assert_eq!(q.vertices, p.vertices);
        assert_eq!(q.certificates, p.certificates);
        assert_eq!(print_path(&q), text);
    }
}
