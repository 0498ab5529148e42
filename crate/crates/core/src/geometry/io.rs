//! Line-based text format for patches and multipatch topologies.
//!
//! ```text
//! # comment
//! patch 2
//! degrees 2 1
//! knots 6 0 0 0 1 1 1
//! knots 4 0 0 1 1
//! controls 6
//! x y            (one control point per line, direction 0 most significant)
//! weights 6 w0 w1 ... (optional)
//! end
//! interface pa dir_a side_a pb dir_b side_b [target flip]...
//! ```
//!
//! Reals are written with 17 significant digits so a round trip is lossless.

use super::patch::Patch;
use super::topology::{Face, Interface, MultipatchTopology};
use crate::error::{Error, Result};
use crate::spline::KnotVector;
use std::fmt::Write;

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_topology(topo: &MultipatchTopology) -> String {
    let mut s = String::new();
    for p in topo.patches() {
        writeln!(s, "patch {}", p.dim()).unwrap();
        let degs: Vec<String> = p.knot_vectors().iter().map(|k| k.degree().to_string()).collect();
        writeln!(s, "degrees {}", degs.join(" ")).unwrap();
        for k in p.knot_vectors() {
            let v: Vec<String> = k.knots().iter().map(|&x| real(x)).collect();
            writeln!(s, "knots {} {}", v.len(), v.join(" ")).unwrap();
        }
        writeln!(s, "controls {}", p.control_points().len()).unwrap();
        for c in p.control_points() {
            let v: Vec<String> = c.iter().map(|&x| real(x)).collect();
            writeln!(s, "{}", v.join(" ")).unwrap();
        }
        if let Some(w) = p.weights() {
            let v: Vec<String> = w.iter().map(|&x| real(x)).collect();
            writeln!(s, "weights {} {}", v.len(), v.join(" ")).unwrap();
        }
        writeln!(s, "end").unwrap();
    }
    for i in topo.interfaces() {
        write!(
            s,
            "interface {} {} {} {} {} {}",
            i.patch_a, i.face_a.direction, i.face_a.side, i.patch_b, i.face_b.direction, i.face_b.side
        )
        .unwrap();
        for (t, f) in &i.orientation {
            write!(s, " {} {}", t, u8::from(*f)).unwrap();
        }
        writeln!(s).unwrap();
    }
    s
}

struct Lines<'a> {
    inner: std::iter::Peekable<std::vec::IntoIter<(usize, Vec<&'a str>)>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let v: Vec<(usize, Vec<&str>)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").split_whitespace().collect::<Vec<_>>()))
            .filter(|(_, t)| !t.is_empty())
            .collect();
        Self { inner: v.into_iter().peekable() }
    }

    fn next_line(&mut self, expect: &str) -> Result<(usize, Vec<&'a str>)> {
        self.inner.next().ok_or_else(|| Error::Parse { line: 0, message: format!("unexpected end of input, expected {expect}") })
    }
}

fn parse<T: std::str::FromStr>(line: usize, tok: Option<&&str>, what: &str) -> Result<T> {
    let t = tok.ok_or_else(|| Error::Parse { line, message: format!("missing {what}") })?;
    t.parse().map_err(|_| Error::Parse { line, message: format!("invalid {what} '{t}'") })
}

fn keyword(line: usize, toks: &[&str], kw: &str) -> Result<()> {
    if toks.first() != Some(&kw) {
        return Err(Error::Parse { line, message: format!("expected '{kw}', found '{}'", toks.first().unwrap_or(&"")) });
    }
    Ok(())
}

fn counted_reals(line: usize, toks: &[&str], what: &str) -> Result<Vec<f64>> {
    let n: usize = parse(line, toks.get(1), &format!("{what} count"))?;
    if toks.len() != n + 2 {
        return Err(Error::Parse { line, message: format!("{what}: expected {n} values, found {}", toks.len() - 2) });
    }
    toks[2..].iter().map(|t| parse(line, Some(t), what)).collect()
}

fn read_patch(lines: &mut Lines, line: usize, header: &[&str]) -> Result<Patch> {
    let d: usize = parse(line, header.get(1), "dimension")?;
    let (l, toks) = lines.next_line("degrees")?;
    keyword(l, &toks, "degrees")?;
    if toks.len() != d + 1 {
        return Err(Error::Parse { line: l, message: format!("expected {d} degrees") });
    }
    let degrees: Vec<usize> = toks[1..].iter().map(|t| parse(l, Some(t), "degree")).collect::<Result<_>>()?;
    let mut knots = Vec::with_capacity(d);
    for &p in &degrees {
        let (l, toks) = lines.next_line("knots")?;
        keyword(l, &toks, "knots")?;
        let k = counted_reals(l, &toks, "knots")?;
        knots.push(KnotVector::new(k, p).map_err(|e| Error::Parse { line: l, message: e.to_string() })?);
    }
    let (l, toks) = lines.next_line("controls")?;
    keyword(l, &toks, "controls")?;
    let n: usize = parse(l, toks.get(1), "control count")?;
    let mut control = Vec::with_capacity(n);
    for _ in 0..n {
        let (l, toks) = lines.next_line("control point")?;
        if toks.len() != d {
            return Err(Error::Parse { line: l, message: format!("control point needs {d} coordinates") });
        }
        control.push(toks.iter().map(|t| parse(l, Some(t), "coordinate")).collect::<Result<Vec<f64>>>()?);
    }
    let (mut l, mut toks) = lines.next_line("end")?;
    let mut weights = None;
    if toks[0] == "weights" {
        weights = Some(counted_reals(l, &toks, "weights")?);
        (l, toks) = lines.next_line("end")?;
    }
    keyword(l, &toks, "end")?;
    Patch::new(knots, control, weights).map_err(|e| Error::Parse { line, message: e.to_string() })
}

pub fn read_topology(text: &str) -> Result<MultipatchTopology> {
    let mut lines = Lines::new(text);
    let mut patches = Vec::new();
    let mut interfaces = Vec::new();
    let mut last_line = 0;
    while let Some((l, toks)) = lines.inner.next() {
        last_line = l;
        match toks[0] {
            "patch" => patches.push(read_patch(&mut lines, l, &toks)?),
            "interface" => {
                let n: Vec<usize> = toks[1..].iter().map(|t| parse(l, Some(t), "interface field")).collect::<Result<_>>()?;
                if n.len() < 6 || !n.len().is_multiple_of(2) {
                    return Err(Error::Parse { line: l, message: "interface needs 6 fields plus pairs".into() });
                }
                interfaces.push(Interface {
                    patch_a: n[0],
                    face_a: Face { direction: n[1], side: n[2] },
                    patch_b: n[3],
                    face_b: Face { direction: n[4], side: n[5] },
                    orientation: n[6..].chunks(2).map(|c| (c[0], c[1] != 0)).collect(),
                });
            }
            other => return Err(Error::Parse { line: l, message: format!("unknown keyword '{other}'") }),
        }
    }
    if patches.is_empty() {
        return Err(Error::Parse { line: last_line, message: "no patch defined".into() });
    }
    MultipatchTopology::new(patches, interfaces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::catalog;

    #[test]
    fn roundtrip_is_lossless() {
        for topo in [
            MultipatchTopology::single(catalog::plate_with_hole()),
            catalog::plate_with_hole_two_patch(),
            catalog::twisted_box(0.7),
        ] {
            let text = write_topology(&topo);
            let back = read_topology(&text).unwrap();
            assert_eq!(back, topo);
            assert_eq!(write_topology(&back), text);
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "patch 1\ndegrees 1\nknots 4 0 0 1 1\ncontrols 2\n0\nbad\nend\n";
        match read_topology(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("unexpected {other:?}"),
        }
    }
}
