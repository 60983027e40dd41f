use std::fs;
use std::io::Read;
use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use super::output::{complex, num};
use super::{Command, CurveSource, Settings};
use crate::arith::ComplexF;
use crate::cutset::{cutset, RootedGraph};
use crate::dirichlet::{l_one_chi_with, QuadraticField, DEFAULT_TOLERANCE};
use crate::elliptic::{
    coefficient_tail_bound, count_points, dirichlet_coefficients, hasse_weil_truncated, non_minimal_at, ApCache,
    EllipticCurve, LocalCurveData, WeierstrassCurve,
};
use crate::error::{Error, Result};
use crate::geometry::{clock_shift_pair, kronecker_orbit, linear_flow, verify_charts, SquareMatrix};
use crate::primes::{is_prime, primes_up_to};
use crate::zeta::{zeta_em, ZetaParams};

type Outcome = (&'static str, Map<String, Value>, Value);

fn inputs(pairs: Vec<(&str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn read_source(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
    }
}

fn read_curve(src: &CurveSource) -> Result<WeierstrassCurve> {
    match (&src.curve, &src.curve_file) {
        (Some(text), _) => text.parse(),
        (None, Some(path)) => read_source(path)?.parse(),
        (None, None) => Err(Error::Parse("give --curve or --curve-file".into())),
    }
}

fn local_json(d: &LocalCurveData) -> Value {
    json!({ "p": d.p, "A_p": d.point_count, "t_p": d.t_p, "type": d.reduction.as_str() })
}

fn parse_vector(text: &str) -> Result<Vec<f64>> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|w| !w.is_empty())
        .map(|w| w.parse::<f64>().map_err(|e| Error::Parse(format!("bad vector entry {w:?}: {e}"))))
        .collect()
}

pub(super) fn run(command: &Command, settings: Settings) -> Result<Outcome> {
    let prec = settings.precision;
    match command {
        Command::Zeta(a) => {
            let s = ComplexF::parse(prec, &a.s, &a.t)?;
            let defaults = ZetaParams::default_for(&s);
            let params = ZetaParams::new(a.n.unwrap_or(defaults.cutoff()), a.k.unwrap_or(defaults.terms()))?;
            let r = zeta_em(&s, params)?;
            Ok((
                "zeta",
                inputs(vec![("s", a.s.clone().into()), ("t", a.t.clone().into())]),
                json!({
                    "N": params.cutoff(),
                    "k": params.terms(),
                    "value": complex(&r.value, prec),
                    "bound": num(r.bound),
                }),
            ))
        }
        Command::Lchi(a) => {
            let field = QuadraticField::new(a.d)?;
            let tol = settings.tolerance.unwrap_or(DEFAULT_TOLERANCE);
            let r = l_one_chi_with(&field, a.m, tol)?;
            Ok((
                "lchi",
                inputs(vec![("D", a.d.into()), ("m", a.m.into())]),
                json!({
                    "discriminant": field.discriminant(),
                    "value": num(r.value),
                    "bound": num(r.bound),
                }),
            ))
        }
        Command::EcLocal(a) => {
            let curve = read_curve(&a.source)?;
            let primes = match (a.p, a.upto) {
                (Some(p), _) => {
                    if !is_prime(p) {
                        return Err(Error::NotPrime(p));
                    }
                    vec![p]
                }
                (None, Some(bound)) => primes_up_to(bound),
                (None, None) => return Err(Error::Parse("give --P or --p".into())),
            };
            let mut cache = a.cache_dir.as_deref().map(|dir| ApCache::open(dir, &curve)).transpose()?;
            let records: Vec<LocalCurveData> = primes
                .par_iter()
                .map(|&p| match cache.as_ref().and_then(|c| c.get(p)) {
                    Some(hit) => Ok(hit.clone()),
                    None => count_points(&curve, p),
                })
                .collect::<Result<_>>()?;
            if let Some(c) = cache.as_mut() {
                let before = c.len();
                c.extend(&records)?;
                log::info!("cache {}: {} hit(s), {} new", c.path().display(), records.len() - (c.len() - before), c.len() - before);
            }
            let non_minimal: Vec<u64> = records
                .iter()
                .filter(|d| d.reduction != crate::elliptic::ReductionType::Good && non_minimal_at(&curve, d.p))
                .map(|d| d.p)
                .collect();
            Ok((
                "ec-local",
                inputs(vec![
                    ("curve", curve.to_string().into()),
                    ("P", a.upto.map_or(Value::Null, Value::from)),
                    ("p", a.p.map_or(Value::Null, Value::from)),
                ]),
                json!({
                    "discriminant": curve.discriminant().to_string(),
                    "records": records.iter().map(local_json).collect::<Vec<_>>(),
                    "non_minimal_at": non_minimal,
                }),
            ))
        }
        Command::EcLseries(a) => {
            let curve = EllipticCurve::new(read_curve(&a.source)?)?;
            let s = ComplexF::parse(prec, &a.s, &a.t)?;
            let product = hasse_weil_truncated(&curve, a.upto, &s)?;
            let mut values = json!({
                "discriminant": curve.discriminant().to_string(),
                "euler_product": {
                    "value": complex(&product.value, prec),
                    "tail_bound": num(product.tail_bound),
                    "divergent": product.divergent,
                },
            });
            if let Some(m) = a.m {
                let series = dirichlet_coefficients(&curve, m)?;
                values["dirichlet_series"] = json!({
                    "M": m,
                    "partial_sum": complex(&series.partial_sum(&s), prec),
                    "tail_bound": num(coefficient_tail_bound(m, s.re_f64())),
                    "coefficients": series.coefficients,
                });
            }
            Ok((
                "ec-lseries",
                inputs(vec![
                    ("curve", curve.to_string().into()),
                    ("P", a.upto.into()),
                    ("s", a.s.clone().into()),
                    ("t", a.t.clone().into()),
                    ("M", a.m.map_or(Value::Null, Value::from)),
                ]),
                values,
            ))
        }
        Command::Cutset(a) => {
            let graph: RootedGraph = read_source(&a.file)?.parse()?;
            let r = cutset(&graph, a.strict);
            if !r.unreachable.is_empty() {
                log::warn!("ignoring nodes unreachable from {}: {}", graph.root(), r.unreachable.join(" "));
            }
            Ok((
                "cutset",
                inputs(vec![
                    ("file", a.file.display().to_string().into()),
                    ("strict", a.strict.into()),
                ]),
                json!({
                    "root": graph.root(),
                    "directed": graph.is_directed(),
                    "cutset": r.cutset,
                    "inverse_edges": r.inverse_edges,
                    "df": r.df,
                    "unreachable": r.unreachable,
                }),
            ))
        }
        Command::VerifyCharts(a) => {
            if a.samples == 0 {
                return Err(Error::domain("need at least one sample"));
            }
            let report = verify_charts(a.samples, a.seed);
            Ok((
                "verify-charts",
                inputs(vec![("samples", a.samples.into()), ("seed", a.seed.into())]),
                serde_json::to_value(&report).map_err(|e| Error::Internal(e.to_string()))?,
            ))
        }
        Command::Flow(a) => {
            let matrix: SquareMatrix = a.matrix.parse()?;
            let x0: Vec<_> = parse_vector(&a.x0)?.into_iter().map(|x| nalgebra::Complex::new(x, 0.0)).collect();
            let r = linear_flow(&matrix, a.t, &x0)?;
            let x: Vec<Value> = r.x.iter().map(|z| json!({ "re": num(z.re), "im": num(z.im) })).collect();
            Ok((
                "flow",
                inputs(vec![
                    ("matrix", a.matrix.clone().into()),
                    ("t", num(a.t)),
                    ("x0", a.x0.clone().into()),
                ]),
                json!({ "x": x, "truncation_bound": num(r.truncation_bound) }),
            ))
        }
        Command::Nctorus(a) => {
            let cs = clock_shift_pair(a.q, a.p)?;
            let mut values = json!({
                "theta": format!("{}/{}", a.p, a.q),
                "omega": { "re": num(cs.omega.re), "im": num(cs.omega.im) },
                "commutation_residual": num(cs.commutation_residual()),
                "unitarity_residual": num(cs.unitarity_residual()),
            });
            if let Some(theta) = a.orbit_theta {
                let o = kronecker_orbit(theta, a.orbit_n, a.orbit_start)?;
                values["orbit"] = json!({
                    "theta": num(o.theta),
                    "start": num(o.start),
                    "n": o.n,
                    "max_bin_deviation": num(o.max_bin_deviation),
                    "period": o.period,
                    "histogram": o.histogram,
                });
            }
            Ok((
                "nctorus",
                inputs(vec![
                    ("q", a.q.into()),
                    ("p", a.p.into()),
                    ("orbit_theta", a.orbit_theta.map_or(Value::Null, num)),
                    ("orbit_n", a.orbit_n.into()),
                    ("orbit_start", num(a.orbit_start)),
                ]),
                values,
            ))
        }
    }
}
