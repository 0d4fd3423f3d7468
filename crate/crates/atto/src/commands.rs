//! Subcommand bodies. Each returns a JSON value and an exit code; the
//! binary only parses arguments and prints.

use atto_core::membership::{
    clark_pairing, cross_validate, test_clark_recurrence, test_conjugate_residual,
    test_rank_two_residual, test_shift_invariance,
};
use atto_core::operators::{
    atto_matrix, clark_unitary, compressed_shift, modified_shift, span_dimension,
};
use atto_core::rankone::{decompose_rank_one, example_4_1};
use atto_core::{Complex64, MembershipVerdict, Method, ModelSpace, OperatorMatrix};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::JobConfig;
use crate::error::CliError;
use crate::format::{
    cx, cx_vec, BasisJson, BasisName, ClarkJson, DecompositionJson, MethodVerdictJson,
    OperatorJson, ProductJson, SymbolJson, VerdictJson,
};
use crate::sampling::Sampler;

/// Number of random `(a, b)` pairs added to the residual tests.
pub const EXTRA_PAIRS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub json: Value,
    pub exit: i32,
}

impl Output {
    pub fn ok(value: impl Serialize) -> Result<Self, CliError> {
        Ok(Output {
            json: serde_json::to_value(value)?,
            exit: 0,
        })
    }
}

fn basis_for(name: BasisName, lambda: Complex64) -> BasisJson {
    let lambda = matches!(name, BasisName::Clark | BasisName::ModifiedClark).then(|| cx(lambda));
    BasisJson {
        basis: name,
        lambda,
    }
}

pub fn clark(cfg: &JobConfig) -> Result<Output, CliError> {
    let tol = &cfg.tolerances;
    let alpha = cfg.alpha()?;
    let mut out = serde_json::Map::new();
    out.insert(
        "alpha".into(),
        serde_json::to_value(ClarkJson::from_set(
            alpha,
            &alpha.clark_points(cfg.lambda1, tol)?,
        ))?,
    );
    if let Some(beta) = &cfg.beta {
        out.insert(
            "beta".into(),
            serde_json::to_value(ClarkJson::from_set(
                beta,
                &beta.clark_points(cfg.lambda2, tol)?,
            ))?,
        );
    }
    Output::ok(out)
}

fn spaces(cfg: &JobConfig) -> Result<(ModelSpace, ModelSpace), CliError> {
    let alpha = ModelSpace::with_tolerances(cfg.alpha()?.clone(), cfg.tolerances)?;
    let beta = ModelSpace::with_tolerances(cfg.beta()?.clone(), cfg.tolerances)?;
    Ok((alpha, beta))
}

pub fn atto(
    cfg: &JobConfig,
    symbol: &SymbolJson,
    in_basis: BasisName,
    out_basis: BasisName,
) -> Result<Output, CliError> {
    let (alpha, beta) = spaces(cfg)?;
    let spec = symbol.to_symbol(&alpha, &beta)?;
    let vin = basis_for(in_basis, cfg.lambda1).build(&alpha)?;
    let vout = basis_for(out_basis, cfg.lambda2).build(&beta)?;
    Output::ok(OperatorJson::from_operator(&atto_matrix(
        &spec, &vin, &vout,
    )?))
}

/// `S_α`, or `S_{α,c}` when `c` is given, in the requested basis.
pub fn shift(cfg: &JobConfig, basis: BasisName, c: Option<Complex64>) -> Result<Output, CliError> {
    let space = ModelSpace::with_tolerances(cfg.alpha()?.clone(), cfg.tolerances)?;
    let basis = basis_for(basis, cfg.lambda1).build(&space)?;
    let op = match c {
        Some(c) => modified_shift(&basis, c),
        None => compressed_shift(&basis),
    };
    Output::ok(OperatorJson::from_operator(&op))
}

/// The Clark unitary `U_λ` for `λ = lambda1`.
pub fn unitary(cfg: &JobConfig, basis: BasisName) -> Result<Output, CliError> {
    let space = ModelSpace::with_tolerances(cfg.alpha()?.clone(), cfg.tolerances)?;
    let basis = basis_for(basis, cfg.lambda1).build(&space)?;
    Output::ok(OperatorJson::from_operator(&clark_unitary(
        &basis,
        cfg.lambda1,
    )?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    All,
    Single(Method),
}

impl MethodChoice {
    pub fn parse(s: &str) -> Result<Self, String> {
        Ok(match s {
            "all" => MethodChoice::All,
            "clark" => MethodChoice::Single(Method::ClarkRecurrence),
            "residual" => MethodChoice::Single(Method::RankTwoResidual),
            "conjugate" => MethodChoice::Single(Method::ConjugateResidual),
            "shift" => MethodChoice::Single(Method::ShiftInvariance),
            _ => {
                return Err(format!(
                    "unknown method `{s}`; expected all, clark, residual, conjugate or shift"
                ))
            }
        })
    }
}

fn verdict_exit(member: bool) -> i32 {
    if member {
        0
    } else {
        3
    }
}

/// Runs one or all membership procedures on `op`. For the residual tests
/// a single method uses `(a, b)`; `all` uses `(0, 0)`, the Clark
/// coefficients and [`EXTRA_PAIRS`] seeded random pairs.
pub fn membership(
    cfg: &JobConfig,
    op: &OperatorMatrix,
    method: MethodChoice,
    ab: (Complex64, Complex64),
) -> Result<Output, CliError> {
    let tol = &cfg.tolerances;
    let single = |v: MembershipVerdict| -> Result<Output, CliError> {
        let exit = verdict_exit(v.is_member);
        Ok(Output {
            json: serde_json::to_value(VerdictJson::from_verdict(&v))?,
            exit,
        })
    };
    match method {
        MethodChoice::Single(Method::ClarkRecurrence) => {
            let pairing = clark_pairing(op.alpha(), op.beta(), cfg.lambda1, cfg.lambda2)?;
            single(test_clark_recurrence(op, &pairing, tol)?)
        }
        MethodChoice::Single(Method::RankTwoResidual) => {
            single(test_rank_two_residual(op, ab.0, ab.1, tol)?)
        }
        MethodChoice::Single(Method::ConjugateResidual) => {
            single(test_conjugate_residual(op, ab.0, ab.1, tol)?)
        }
        MethodChoice::Single(Method::ShiftInvariance) => single(test_shift_invariance(op, tol)?),
        MethodChoice::All => {
            let mut rng = Sampler::new(cfg.seed);
            let extra: Vec<_> = (0..EXTRA_PAIRS)
                .map(|_| (rng.in_disk(0.9), rng.in_disk(0.9)))
                .collect();
            let cv = cross_validate(op, cfg.lambda1, cfg.lambda2, &extra, tol)?;
            let runs: Vec<MethodVerdictJson> = cv
                .verdicts
                .iter()
                .map(|v| MethodVerdictJson {
                    method: v.method.name().into(),
                    member: v.is_member,
                    max_residual: v.max_residual + 0.0,
                })
                .collect();
            let Some(member) = cv.consensus else {
                return Err(CliError::Disagreement(serde_json::to_string(&runs)?));
            };
            let witness = cv
                .verdicts
                .iter()
                .find(|v| v.method == Method::RankTwoResidual)
                .and_then(|v| VerdictJson::from_verdict(v).witness);
            let verdict = VerdictJson {
                member,
                method: "all".into(),
                max_residual: cv.max_residual() + 0.0,
                witness,
                runs,
            };
            Ok(Output {
                json: serde_json::to_value(verdict)?,
                exit: verdict_exit(member),
            })
        }
    }
}

pub fn rankone(cfg: &JobConfig, op: &OperatorMatrix) -> Result<Output, CliError> {
    let d = decompose_rank_one(op, cfg.lambda1, cfg.lambda2, &cfg.tolerances)?;
    Output::ok(DecompositionJson::from_decomposition(&d))
}

/// Decomposition of the example operator together with the candidate
/// points that rule out a standard form.
pub fn rankone_example(cfg: &JobConfig, a: Complex64) -> Result<Output, CliError> {
    let ex = example_4_1(a)?;
    let d = decompose_rank_one(&ex.operator, cfg.lambda1, cfg.lambda2, &cfg.tolerances)?;
    let mut value = serde_json::to_value(DecompositionJson::from_decomposition(&d))?;
    value["candidates"] = json!({
        "kernel": cx_vec(ex.kernel_candidates),
        "conj_kernel": cx_vec(ex.conj_candidates),
    });
    Ok(Output {
        json: value,
        exit: 0,
    })
}

pub fn dim(cfg: &JobConfig) -> Result<Output, CliError> {
    let (alpha, beta) = spaces(cfg)?;
    let r = span_dimension(&alpha, &beta)?;
    let mut value = json!({
        "dim": r.dim,
        "expected": r.expected,
        "gap_decades": r.gap_decades.is_finite().then_some(r.gap_decades),
        "singular_values": r.singular_values,
    });
    if r.is_full {
        value["note"] = json!("T = L");
    }
    Ok(Output {
        json: value,
        exit: if r.dim == r.expected { 0 } else { 4 },
    })
}

/// Everything about the example in one report: matrix, symbol, candidates,
/// membership under every procedure and the decomposition.
pub fn example(cfg: &JobConfig, a: Complex64) -> Result<Output, CliError> {
    let ex = example_4_1(a)?;
    let membership = membership(
        cfg,
        &ex.operator,
        MethodChoice::All,
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
    )?;
    let d = decompose_rank_one(&ex.operator, cfg.lambda1, cfg.lambda2, &cfg.tolerances)?;
    Output::ok(json!({
        "a": cx(a),
        "alpha": ProductJson::from_product(ex.alpha.alpha()),
        "beta": ProductJson::from_product(ex.beta.alpha()),
        "operator": OperatorJson::from_operator(&ex.operator),
        "symbol": SymbolJson::from_raw(&ex.symbol),
        "kernel_candidates": cx_vec(ex.kernel_candidates),
        "conj_candidates": cx_vec(ex.conj_candidates),
        "membership": membership.json,
        "decomposition": DecompositionJson::from_decomposition(&d),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ConfigFile, Overrides};

    fn cfg(alpha: &str, beta: Option<&str>) -> JobConfig {
        let over = Overrides {
            alpha: Some(alpha.into()),
            beta: beta.map(Into::into),
            ..Default::default()
        };
        JobConfig::resolve(ConfigFile::default(), over).unwrap()
    }

    #[test]
    fn clark_points_of_z2() {
        let out = clark(&cfg("z2", None)).unwrap();
        let pts = &out.json["alpha"]["points"];
        assert_eq!(pts.as_array().unwrap().len(), 2);
        assert!((pts[0][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert!((pts[1][0].as_f64().unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_report() {
        let out = dim(&cfg("z3", Some("z2"))).unwrap();
        assert_eq!(out.json["dim"], 4);
        assert!(out.json.get("note").is_none());
        let out = dim(&cfg("z1", Some("z3"))).unwrap();
        assert_eq!(out.json["dim"], 3);
        assert_eq!(out.json["note"], "T = L");
    }

    #[test]
    fn identity_symbol() {
        let c = cfg("z3", Some("z3"));
        let symbol: SymbolJson = serde_json::from_str(r#"{"raw":{"numerator":[[1,0]]}}"#).unwrap();
        let out = atto(&c, &symbol, BasisName::Tm, BasisName::Tm).unwrap();
        let op: OperatorJson = serde_json::from_value(out.json).unwrap();
        let tm = op.to_operator().unwrap().tm();
        assert!((tm - atto_core::CMatrix::identity(3, 3)).norm() < 1e-10);
    }

    #[test]
    fn example_candidates() {
        let out = rankone_example(&cfg("z1", None), Complex64::new(0.5, 0.0)).unwrap();
        assert_eq!(out.json["tag"], "nonstandard");
        let k = &out.json["candidates"]["kernel"];
        assert!((k[0][0].as_f64().unwrap() - 2.0 / 7.0).abs() < 1e-12);
        assert!((k[1][0].as_f64().unwrap() - 2.0 / 9.0).abs() < 1e-12);
    }
}
