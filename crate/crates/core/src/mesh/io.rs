//! Plain-text mesh format.
//!
//! ```text
//! vertices <n>
//! x y            (n lines)
//! triangles <m>
//! i j k r        (m lines, 0-based, r = refinement edge local index)
//! boundary <b>
//! i j            (b lines)
//! ```

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::{Mesh, Triangle};
use crate::{Error, Result};

impl Mesh {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "vertices {}", self.vertices.len());
        for p in &self.vertices {
            let _ = writeln!(s, "{:?} {:?}", p[0], p[1]);
        }
        let _ = writeln!(s, "triangles {}", self.triangles.len());
        for t in &self.triangles {
            let [i, j, k] = t.vertices;
            let _ = writeln!(s, "{i} {j} {k} {}", t.refinement_edge);
        }
        let _ = writeln!(s, "boundary {}", self.boundary.len());
        for [i, j] in &self.boundary {
            let _ = writeln!(s, "{i} {j}");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Mesh> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("unexpected end of input, expected {what}"),
            })
        };

        let n = section(next("vertices header")?, "vertices")?;
        let mut vertices = Vec::with_capacity(n);
        for _ in 0..n {
            let (line, l) = next("vertex")?;
            let [x, y] = fields::<f64, 2>(line, l)?;
            vertices.push([x, y]);
        }
        let m = section(next("triangles header")?, "triangles")?;
        let mut triangles = Vec::with_capacity(m);
        for _ in 0..m {
            let (line, l) = next("triangle")?;
            let [i, j, k, r] = fields::<usize, 4>(line, l)?;
            if r > 2 {
                return Err(Error::Parse {
                    line,
                    message: format!("refinement edge {r} not in 0..=2"),
                });
            }
            triangles.push(Triangle::new([i, j, k], r as u8));
        }
        let b = section(next("boundary header")?, "boundary")?;
        let mut boundary = Vec::with_capacity(b);
        for _ in 0..b {
            let (line, l) = next("boundary edge")?;
            boundary.push(fields::<usize, 2>(line, l)?);
        }
        Mesh::new(vertices, triangles, boundary)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Mesh> {
        Mesh::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn section((line, l): (usize, &str), name: &str) -> Result<usize> {
    let mut it = l.split_whitespace();
    if it.next() != Some(name) {
        return Err(Error::Parse {
            line,
            message: format!("expected `{name} <count>`"),
        });
    }
    let [count] = fields::<usize, 1>(line, it.next().unwrap_or(""))?;
    Ok(count)
}

fn fields<T: FromStr, const N: usize>(line: usize, l: &str) -> Result<[T; N]> {
    let parsed: Vec<T> = l
        .split_whitespace()
        .map(|f| f.parse::<T>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse {
            line,
            message: format!("malformed number in `{l}`"),
        })?;
    parsed.try_into().map_err(|v: Vec<T>| Error::Parse {
        line,
        message: format!("expected {N} fields, found {}", v.len()),
    })
}
