//! Reading input files and element specifications.

use std::path::Path;

use qexpander::channels::{Channel, ChannelFile};
use qexpander::graphs::Graph;
use qexpander::groups::{parse_permutation, FiniteGroup};
use qexpander::ComplexMatrix;

pub fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

pub fn graph(path: &Path) -> Result<Graph, String> {
    Graph::from_edge_list(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn group(path: &Path) -> Result<FiniteGroup, String> {
    FiniteGroup::parse(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn channel(path: &Path) -> Result<Channel, String> {
    let file: ChannelFile =
        serde_json::from_str(&read(path)?).map_err(|e| format!("{}: invalid channel JSON: {e}", path.display()))?;
    Channel::from_file(&file).map_err(|e| format!("{}: {e}", path.display()))
}

/// One element: an index into the group, `e`, or a permutation in cycle
/// notation (1-based points).
pub fn element(group: &FiniteGroup, token: &str) -> Result<usize, String> {
    let token = token.trim();
    if token == "e" || token == "()" {
        return Ok(group.identity());
    }
    if let Ok(i) = token.parse::<usize>() {
        return if i < group.order() {
            Ok(i)
        } else {
            Err(format!("element index {i} out of range (order {})", group.order()))
        };
    }
    let degree = group
        .permutation(group.identity())
        .ok_or_else(|| format!("'{token}': cycle notation needs a permutation group"))?
        .len();
    let perm = parse_permutation(token, degree).map_err(|e| e.to_string())?;
    group
        .find_permutation(&perm)
        .ok_or_else(|| format!("'{token}' is not in the group"))
}

/// `transpositions`, `all`, `trivial`, or a `;`-separated list of elements.
pub fn elements(group: &FiniteGroup, spec: &str, symmetrize: bool) -> Result<Vec<usize>, String> {
    let mut out: Vec<usize> = match spec.trim() {
        "transpositions" => {
            let t = group.transpositions();
            if t.is_empty() {
                return Err("the group contains no transpositions".into());
            }
            t
        }
        "all" => (0..group.order()).filter(|&g| g != group.identity()).collect(),
        "trivial" => vec![group.identity()],
        list => list
            .split(';')
            .filter(|t| !t.trim().is_empty())
            .map(|t| element(group, t))
            .collect::<Result<_, _>>()?,
    };
    if symmetrize {
        let inverses: Vec<usize> = out.iter().map(|&g| group.inv(g)).collect();
        for g in inverses {
            if !out.contains(&g) {
                out.push(g);
            }
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    out.retain(|g| seen.insert(*g));
    if out.is_empty() {
        return Err(format!("empty element list '{spec}'"));
    }
    Ok(out)
}

/// The subgroup generated by an element list.
pub fn subgroup(group: &FiniteGroup, spec: &str) -> Result<Vec<usize>, String> {
    let gens = elements(group, spec, false)?;
    Ok(group.generated_subgroup(&gens))
}

pub fn indices(spec: &str, bound: usize) -> Result<Vec<usize>, String> {
    let out: Vec<usize> = spec
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad index '{t}'")))
        .collect::<Result<_, _>>()?;
    if let Some(bad) = out.iter().find(|&&i| i >= bound) {
        return Err(format!("index {bad} out of range (there are {bound})"));
    }
    if out.is_empty() {
        return Err("empty index list".into());
    }
    Ok(out)
}

/// `tr` (normalised trace) or `diag:w1,w2,…` on `C^m`.
pub fn state(spec: &str, m: usize) -> Result<ComplexMatrix, String> {
    if spec == "tr" {
        return Ok(ComplexMatrix::identity(m).scale_real(1.0 / m as f64));
    }
    let weights = spec
        .strip_prefix("diag:")
        .ok_or_else(|| format!("state must be 'tr' or 'diag:…', got '{spec}'"))?;
    let w: Vec<f64> = weights
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad weight '{t}'")))
        .collect::<Result<_, _>>()?;
    if w.len() != m {
        return Err(format!("state has {} weights, the orbit has {m} elements", w.len()));
    }
    Ok(ComplexMatrix::from_real_fn(m, m, |i, j| if i == j { w[i] } else { 0.0 }))
}
