//! One function per subcommand; each returns the `result` object of the report.

use std::fmt::Write as _;
use std::path::Path;

use qexpander::bicrossed::MatchedPair;
use qexpander::channels::{
    check_gap_certificate, gap_bounds, harrow_bound, harrow_channel, lift_graph, Channel, ChannelError,
};
use qexpander::dualcayley::{schreier_gap_certificate, DualCayleyError, DualGroupAlgebra};
use qexpander::graphs::{check_cheeger, cycle_cover_decomposition, schreier_graph, spectral_data};
use qexpander::groups::{irreps, kazhdan_lower_bound, FiniteGroup, Irrep};
use qexpander::numerics::is_projection;
use qexpander::qgraphs::QuantumGraph;
use serde_json::{json, Value};

use crate::{input, GlobalOpts, Outcome};

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn labels(group: &FiniteGroup, elements: &[usize]) -> Vec<String> {
    elements.iter().map(|&g| group.label(g)).collect()
}

fn spectrum_csv(values: &[f64]) -> String {
    let mut out = String::from("index,eigenvalue\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{i},{v}");
    }
    out
}

fn group_irreps_of(group: &FiniteGroup, g: &GlobalOpts) -> Result<Vec<Irrep>, String> {
    irreps(group, g.seed, g.tol.max(1e-9)).map_err(err)
}

pub fn graph_analyze(_g: &GlobalOpts, file: &Path) -> Result<Outcome, String> {
    let graph = input::graph(file)?;
    let spectrum = spectral_data(&graph);
    let (cheeger, passed) = match check_cheeger(&graph) {
        Ok(report) => {
            let holds = report.holds;
            (serde_json::to_value(report).map_err(err)?, holds)
        }
        Err(e) => (json!({ "skipped": e.to_string() }), true),
    };
    Ok(Outcome {
        result: json!({
            "vertices": graph.vertex_count(),
            "edges": graph.edges().len(),
            "spectrum": spectrum,
            "cheeger": cheeger,
        }),
        passed,
        csv: Some(spectrum_csv(&spectrum.eigenvalues)),
    })
}

pub fn graph_lift(g: &GlobalOpts, file: &Path) -> Result<Outcome, String> {
    let graph = input::graph(file)?;
    let d = graph.regular_degree().ok_or("the graph is not regular")?;
    let dec = cycle_cover_decomposition(&graph, g.seed).map_err(err)?;
    let channel = lift_graph(&graph, &dec).map_err(err)?;
    let validation = channel.validate();
    let qgraph = QuantumGraph::from_channel(&channel, d as f64);
    let quantum_adjacency = qgraph.is_quantum_adjacency(g.tol.max(1e-9));
    let choi_projection = qgraph
        .normalized_choi()
        .is_some_and(|p| is_projection(&p, g.tol.max(1e-9)));
    let spectrum = channel.spectrum();
    let passed = dec.sums_to(&graph)
        && validation.cp
        && validation.tp
        && validation.unital
        && validation.undirected
        && channel.degree() == d
        && quantum_adjacency
        && choi_projection;
    Ok(Outcome {
        result: json!({
            "degree": d,
            "permutations": dec.permutations,
            "decomposition_sums_to_adjacency": dec.sums_to(&graph),
            "validation": validation,
            "kraus_rank": channel.degree(),
            "quantum_adjacency": quantum_adjacency,
            "normalized_choi_is_projection": choi_projection,
            "spectrum": spectrum,
            "channel": channel.to_file(),
        }),
        passed,
        csv: Some(spectrum_csv(&spectrum)),
    })
}

pub fn group_irreps(g: &GlobalOpts, file: &Path) -> Result<Outcome, String> {
    let group = input::group(file)?;
    let reps = group_irreps_of(&group, g)?;
    let dim_square_sum: usize = reps.iter().map(|r| r.dimension().pow(2)).sum();
    let mut max_defect = 0.0f64;
    let list: Vec<Value> = reps
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let defect = r.homomorphism_defect(&group);
            max_defect = max_defect.max(defect);
            let character: Vec<[f64; 2]> = r.character().iter().map(|c| [c.re, c.im]).collect();
            json!({ "index": i, "dimension": r.dimension(), "character": character, "defect": defect })
        })
        .collect();
    let mut csv = String::from("irrep,dimension,defect\n");
    for (i, r) in reps.iter().enumerate() {
        let _ = writeln!(csv, "{i},{},{}", r.dimension(), r.homomorphism_defect(&group));
    }
    Ok(Outcome {
        result: json!({
            "order": group.order(),
            "abelian": group.is_abelian(),
            "elements": labels(&group, &(0..group.order()).collect::<Vec<_>>()),
            "conjugacy_classes": group.conjugacy_classes().len(),
            "dimension_square_sum": dim_square_sum,
            "irreps": list,
        }),
        passed: dim_square_sum == group.order() && max_defect <= 1e-8,
        csv: Some(csv),
    })
}

pub fn channel_analyze(g: &GlobalOpts, file: &Path) -> Result<Outcome, String> {
    let channel = input::channel(file)?;
    let validation = channel.validate();
    let spectrum = channel.spectrum();
    let estimate = channel.estimate_hq(g.budget, g.seed);
    Ok(Outcome {
        result: json!({
            "dim": channel.dim(),
            "kraus_count": channel.kraus().len(),
            "kraus_rank": channel.degree(),
            "validation": validation,
            "spectrum": spectrum,
            "second_singular_value": channel.second_singular_value(),
            "estimate": estimate,
        }),
        passed: validation.cp,
        csv: Some(spectrum_csv(&spectrum)),
    })
}

pub fn harrow(g: &GlobalOpts, file: &Path, set_spec: &str, symmetrize: bool) -> Result<Outcome, String> {
    let group = input::group(file)?;
    let set = input::elements(&group, set_spec, symmetrize)?;
    let reps = group_irreps_of(&group, g)?;
    let eps = kazhdan_lower_bound(&group, &set, &reps).map_err(err)?;
    let mut rows = Vec::new();
    let mut csv = String::from("irrep,dimension,lambda2,bound,gap_bound\n");
    let mut passed = true;
    for (i, irrep) in reps.iter().enumerate() {
        if irrep.is_trivial(1e-8) {
            continue;
        }
        let report = harrow_bound(&group, irrep, &set).map_err(err)?;
        let channel = harrow_channel(irrep, &set).map_err(err)?;
        let certificate = gap_certificate_value(&channel, eps, set.len(), Some(1.0 / set.len() as f64))?;
        passed &= report.holds && certificate.1;
        let _ = writeln!(
            csv,
            "{i},{},{},{},{}",
            report.irrep_dim,
            report.lambda2.map_or(String::new(), |l| l.to_string()),
            report.bound,
            certificate.0["lambda2_bound"]
        );
        rows.push(json!({ "irrep": i, "report": report, "certificate": certificate.0 }));
    }
    Ok(Outcome {
        result: json!({
            "order": group.order(),
            "set": labels(&group, &set),
            "kazhdan_eps": eps,
            "irreps": rows,
        }),
        passed,
        csv: Some(csv),
    })
}

/// The certificate as JSON, and whether it held. A violated certificate is
/// reported, not treated as an input error.
fn gap_certificate_value(
    channel: &Channel,
    eps: f64,
    dim_he: usize,
    lambda_min: Option<f64>,
) -> Result<(Value, bool), String> {
    match check_gap_certificate(channel, eps, dim_he, lambda_min) {
        Ok(cert) => Ok((serde_json::to_value(cert).map_err(err)?, true)),
        Err(ChannelError::CertificateViolated { lambda2, bound }) => {
            let (lmin, _, expansion_bound) = gap_bounds(eps, dim_he, lambda_min);
            Ok((
                json!({
                    "eps": eps, "dim_he": dim_he, "lambda_min": lmin, "lambda2": lambda2,
                    "lambda2_bound": bound, "expansion_bound": expansion_bound, "holds": false,
                }),
                false,
            ))
        }
        Err(e) => Err(e.to_string()),
    }
}

pub fn bicrossed(
    g: &GlobalOpts,
    file: &Path,
    gamma_spec: &str,
    g_spec: &str,
    orbit_spec: Option<&str>,
    state_spec: &str,
) -> Result<Outcome, String> {
    let ambient = input::group(file)?;
    let gamma = input::subgroup(&ambient, gamma_spec)?;
    let gpart = input::subgroup(&ambient, g_spec)?;
    let gamma_labels = labels(&ambient, &gamma);
    let g_labels = labels(&ambient, &gpart);
    let pair = MatchedPair::from_factorization(ambient.clone(), &gamma, &gpart).map_err(err)?;
    let orbit = match orbit_spec {
        Some(spec) => {
            let el = input::element(&ambient, spec)?;
            let idx = pair
                .gamma_elements()
                .iter()
                .position(|&x| x == el)
                .ok_or_else(|| format!("'{spec}' is not in Γ"))?;
            pair.beta_orbit(idx)
        }
        // first largest orbit in the canonical order
        None => pair
            .orbits()
            .into_iter()
            .rev()
            .max_by_key(Vec::len)
            .expect("Γ is nonempty"),
    };
    let state = input::state(state_spec, orbit.len())?;
    let report = pair.report(&orbit, &state).map_err(err)?;
    let channel = pair.channel(&orbit, &state).map_err(err)?;
    let tol = g.tol.max(1e-9);
    let passed = report.magic
        && report.v_unitarity_defect <= tol
        && report.tp_deviation <= tol
        && report.unital_deviation <= tol
        && report.mixed_unitary_deviation.is_none_or(|d| d <= tol);
    let orbit_labels: Vec<String> = orbit.iter().map(|&c| gamma_labels[c].clone()).collect();
    Ok(Outcome {
        result: json!({
            "gamma": gamma_labels,
            "g": g_labels,
            "alpha_trivial": pair.is_alpha_trivial(),
            "beta_trivial": pair.is_beta_trivial(),
            "covariance_defect": pair.covariance_defect(),
            "orbit_elements": orbit_labels,
            "report": report,
            "channel": channel.to_file(),
        }),
        passed,
        csv: None,
    })
}

pub fn dual_cayley(g: &GlobalOpts, file: &Path, irrep_spec: &str) -> Result<Outcome, String> {
    let group = input::group(file)?;
    let alg = DualGroupAlgebra::from_group(group, g.seed).map_err(err)?;
    let set = input::indices(irrep_spec, alg.irreps().len())?;
    let graph = alg.quantum_cayley(&set).map_err(err)?;
    let dims: Vec<usize> = set.iter().map(|&x| alg.irreps()[x].dimension()).collect();
    let gap = graph.gap().map_err(err)?;
    let spectrum: Vec<f64> = gap.eigenvalues.iter().map(|l| l * gap.degree).collect();
    let tol = g.tol.max(1e-9);
    let quantum_adjacency = graph.is_quantum_adjacency(tol);
    let generating = alg.is_generating(&set);
    let eps = alg.dual_kazhdan_constant(&set).map_err(err)?;
    let (full_cert, mut passed) = certificate_value(schreier_gap_certificate(&graph, eps, &dims))?;
    passed &= quantum_adjacency;

    let mut subgroups = Vec::new();
    for sub in alg.group().subgroups() {
        if sub.len() == 1 {
            continue;
        }
        let coideal = alg.coideal_from_subgroup(&sub).map_err(err)?;
        let entry = match alg.schreier_restrict(&graph, &coideal, g.seed) {
            Ok(restricted) => {
                let rgap = restricted.gap().map_err(err)?;
                let (cert, holds) = certificate_value(schreier_gap_certificate(&restricted, eps, &dims))?;
                passed &= holds;
                json!({
                    "order": sub.len(),
                    "elements": labels(alg.group(), &sub),
                    "spectrum": rgap.eigenvalues.iter().map(|l| l * rgap.degree).collect::<Vec<_>>(),
                    "certificate": cert,
                })
            }
            Err(DualCayleyError::NotInvariant(leak)) => {
                json!({ "order": sub.len(), "elements": labels(alg.group(), &sub), "not_invariant": leak })
            }
            Err(e) => return Err(e.to_string()),
        };
        subgroups.push(entry);
    }
    Ok(Outcome {
        result: json!({
            "order": alg.order(),
            "irrep_dims": alg.irrep_dims(),
            "set": set,
            "set_dims": dims,
            "degree": gap.degree,
            "spectrum": spectrum,
            "generating": generating,
            "quantum_adjacency": quantum_adjacency,
            "completely_positive": graph.is_completely_positive(tol),
            "dual_kazhdan_eps": eps,
            "certificate": full_cert,
            "subgroups": subgroups,
        }),
        passed,
        csv: Some(spectrum_csv(&spectrum)),
    })
}

fn certificate_value(
    cert: Result<qexpander::dualcayley::SchreierCertificate, DualCayleyError>,
) -> Result<(Value, bool), String> {
    match cert {
        Ok(c) => Ok((serde_json::to_value(c).map_err(err)?, true)),
        Err(DualCayleyError::CertificateViolated { lambda2, bound }) => {
            Ok((json!({ "lambda2": lambda2, "bound": bound, "holds": false }), false))
        }
        Err(e) => Err(e.to_string()),
    }
}

pub struct SchreierArgs<'a> {
    pub group: &'a Path,
    pub subgroup: &'a str,
    pub set: Option<&'a str>,
    pub symmetrize: bool,
    pub dual: bool,
    pub irreps: Option<&'a str>,
    pub simple: bool,
}

pub fn schreier(g: &GlobalOpts, args: SchreierArgs<'_>) -> Result<Outcome, String> {
    let group = input::group(args.group)?;
    let sub = input::subgroup(&group, args.subgroup)?;
    if args.dual {
        let spec = args.irreps.ok_or("--dual needs --irreps")?;
        let alg = DualGroupAlgebra::from_group(group, g.seed).map_err(err)?;
        let set = input::indices(spec, alg.irreps().len())?;
        let dims: Vec<usize> = set.iter().map(|&x| alg.irreps()[x].dimension()).collect();
        let graph = alg.quantum_cayley(&set).map_err(err)?;
        let coideal = alg.coideal_from_subgroup(&sub).map_err(err)?;
        let restricted = alg.schreier_restrict(&graph, &coideal, g.seed).map_err(err)?;
        let gap = restricted.gap().map_err(err)?;
        let spectrum: Vec<f64> = gap.eigenvalues.iter().map(|l| l * gap.degree).collect();
        let eps = alg.dual_kazhdan_constant(&set).map_err(err)?;
        let (cert, passed) = certificate_value(schreier_gap_certificate(&restricted, eps, &dims))?;
        return Ok(Outcome {
            result: json!({
                "mode": "dual",
                "subgroup": labels(alg.group(), &sub),
                "set": set,
                "block_dims": restricted.algebra().block_dims(),
                "spectrum": spectrum,
                "dual_kazhdan_eps": eps,
                "certificate": cert,
            }),
            passed,
            csv: Some(spectrum_csv(&spectrum)),
        });
    }

    let spec = args.set.ok_or("--set is required for the classical Schreier graph")?;
    let set = input::elements(&group, spec, args.symmetrize)?;
    let sg = schreier_graph(&group, &sub, &set).map_err(err)?;
    let spectrum = sg.spectrum();
    let reps = group_irreps_of(&group, g)?;
    let eps = kazhdan_lower_bound(&group, &set, &reps).map_err(err)?;
    let qgraph = QuantumGraph::commutative(sg.weight_matrix()).map_err(err)?;
    let (cert, passed) = certificate_value(schreier_gap_certificate(&qgraph, eps, &vec![1; set.len()]))?;
    let simple = if args.simple {
        let graph = sg.simple_projection();
        let cheeger = match check_cheeger(&graph) {
            Ok(r) => serde_json::to_value(r).map_err(err)?,
            Err(e) => json!({ "skipped": e.to_string() }),
        };
        Some(json!({ "spectrum": spectral_data(&graph), "cheeger": cheeger }))
    } else {
        None
    };
    Ok(Outcome {
        result: json!({
            "mode": "classical",
            "subgroup": labels(&group, &sub),
            "set": labels(&group, &set),
            "cosets": sg.cosets.iter().map(|c| labels(&group, c)).collect::<Vec<_>>(),
            "weights": sg.weights,
            "spectrum": spectrum,
            "kazhdan_eps": eps,
            "certificate": cert,
            "simple": simple,
        }),
        passed,
        csv: Some(sg.to_csv()),
    })
}

pub fn certify(
    _g: &GlobalOpts,
    eps: f64,
    dim_he: usize,
    lambda_min: Option<f64>,
    channel: Option<&Path>,
) -> Result<Outcome, String> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(format!("eps must be a nonnegative number, got {eps}"));
    }
    if dim_he == 0 {
        return Err("dimHE must be positive".into());
    }
    if let Some(l) = lambda_min {
        if !(l > 0.0 && l <= 1.0) {
            return Err(format!("lambda-min must lie in (0, 1], got {l}"));
        }
    }
    let (lmin, lambda2_bound, expansion_bound) = gap_bounds(eps, dim_he, lambda_min);
    let mut result = json!({
        "eps": eps,
        "dim_he": dim_he,
        "lambda_min": lmin,
        "lambda2_bound": lambda2_bound,
        "expansion_bound": expansion_bound,
    });
    let mut passed = true;
    if let Some(path) = channel {
        let ch = input::channel(path)?;
        let (cert, holds) = gap_certificate_value(&ch, eps, dim_he, lambda_min)?;
        result["channel_certificate"] = cert;
        passed = holds;
    }
    Ok(Outcome { result, passed, csv: None })
}
