//! CSV export and import of point clouds.
//!
//! ```text
//! # case=hemisphere2 t=5 delta=0.4472135954999579 seed=1
//! kind,x0,x1,x2,weight,n0,n1,n2
//! interior,0.1,0.2,0.97,0.0123,,,
//! boundary,0.866,0,0.5,0.36,0.5,0,-0.866
//! ```
//!
//! Interior rows list all `n0` samples with their volume weights, boundary
//! rows repeat the last `m0` samples with boundary weights and co-normals.
//! Numbers use shortest round-trip formatting.

use std::fmt::Write as _;

use super::{ManifoldCase, PointCloud};
use crate::error::{Error, Result};

pub fn write_cloud_csv(cloud: &PointCloud) -> String {
    let d = cloud.dim;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# case={} t={} delta={:?} seed={}",
        cloud.case, cloud.t, cloud.delta, cloud.seed
    );
    s.push_str("kind");
    for a in 0..d {
        let _ = write!(s, ",x{a}");
    }
    s.push_str(",weight");
    for a in 0..d {
        let _ = write!(s, ",n{a}");
    }
    s.push('\n');
    for i in 0..cloud.len() {
        s.push_str("interior");
        for v in cloud.point(i) {
            let _ = write!(s, ",{v:?}");
        }
        let _ = write!(s, ",{:?}", cloud.volume_weights[i]);
        for _ in 0..d {
            s.push(',');
        }
        s.push('\n');
    }
    for k in 0..cloud.boundary_len() {
        s.push_str("boundary");
        for v in cloud.boundary_point(k) {
            let _ = write!(s, ",{v:?}");
        }
        let _ = write!(s, ",{:?}", cloud.boundary_weights[k]);
        for v in cloud.conormal(k) {
            let _ = write!(s, ",{v:?}");
        }
        s.push('\n');
    }
    s
}

pub fn read_cloud_csv(text: &str) -> Result<PointCloud> {
    let mut case = None;
    let mut t = 0usize;
    let mut delta = f64::NAN;
    let mut seed = 0u64;
    let mut header: Option<usize> = None;
    let mut interior: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut boundary: Vec<(Vec<f64>, f64, Vec<f64>)> = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let perr = |msg: String| Error::Parse(format!("line {}: {msg}", lineno + 1));
        if let Some(meta) = line.strip_prefix('#') {
            for kv in meta.split_whitespace() {
                let Some((k, v)) = kv.split_once('=') else { continue };
                match k {
                    "case" => case = Some(v.parse::<ManifoldCase>()?),
                    "t" => t = v.parse().map_err(|e| perr(format!("t: {e}")))?,
                    "delta" => delta = v.parse().map_err(|e| perr(format!("delta: {e}")))?,
                    "seed" => seed = v.parse().map_err(|e| perr(format!("seed: {e}")))?,
                    _ => {}
                }
            }
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let Some(d) = header else {
            if cols.first() != Some(&"kind") || cols.len() < 4 || (cols.len() - 2) % 2 != 0 {
                return Err(perr("expected header 'kind,x0..,weight,n0..'".into()));
            }
            header = Some((cols.len() - 2) / 2);
            continue;
        };
        if cols.len() != 2 * d + 2 {
            return Err(perr(format!("expected {} columns, found {}", 2 * d + 2, cols.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| perr(format!("'{s}': {e}")));
        let x = cols[1..=d].iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?;
        let w = num(cols[d + 1])?;
        match cols[0] {
            "interior" => interior.push((x, w)),
            "boundary" => {
                let n = cols[d + 2..].iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?;
                boundary.push((x, w, n));
            }
            other => return Err(perr(format!("unknown row kind '{other}'"))),
        }
    }
    let case = case.ok_or_else(|| Error::Parse("missing '# case=...' metadata line".into()))?;
    let d = header.ok_or_else(|| Error::Parse("missing header".into()))?;
    if d != case.ambient_dim() {
        return Err(Error::Parse(format!("{case} needs {} coordinates, file has {d}", case.ambient_dim())));
    }
    let m0 = boundary.len();
    let n0 = interior.len();
    if m0 > n0 {
        return Err(Error::Parse("more boundary rows than samples".into()));
    }
    for (k, (q, _, _)) in boundary.iter().enumerate() {
        if interior[n0 - m0 + k].0 != *q {
            return Err(Error::Parse(format!(
                "boundary row {k} does not alias sample {}",
                n0 - m0 + k
            )));
        }
    }
    Ok(PointCloud {
        case,
        dim: d,
        intrinsic_dim: case.intrinsic_dim(),
        points: interior.iter().flat_map(|(x, _)| x.iter().copied()).collect(),
        n_boundary: m0,
        volume_weights: interior.iter().map(|(_, w)| *w).collect(),
        boundary_weights: boundary.iter().map(|(_, w, _)| *w).collect(),
        conormals: boundary.into_iter().flat_map(|(_, _, n)| n).collect(),
        delta,
        t,
        seed,
    })
}
