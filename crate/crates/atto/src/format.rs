//! JSON file formats. Complex numbers are `[re, im]` pairs everywhere.

use std::sync::Arc;

use atto_core::{
    BasisKind, BlaschkeProduct, CMatrix, CVector, ClarkPointSet, Complex64, MembershipVerdict,
    ModelBasis, ModelSpace, ModelVector, OperatorMatrix, RankOneDecomposition, RankOneTag,
    RankOneVariant, RawSymbol, SymbolSpec,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub type Cx = [f64; 2];

pub fn cx(z: Complex64) -> Cx {
    [z.re, z.im]
}

pub fn from_cx(c: Cx) -> Complex64 {
    Complex64::new(c[0], c[1])
}

pub fn cx_vec(v: impl IntoIterator<Item = Complex64>) -> Vec<Cx> {
    v.into_iter().map(cx).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductJson {
    pub front: Cx,
    pub zeros: Vec<Cx>,
}

impl ProductJson {
    pub fn from_product(b: &BlaschkeProduct) -> Self {
        ProductJson {
            front: cx(b.front()),
            zeros: cx_vec(b.zeros().iter().copied()),
        }
    }

    pub fn to_product(&self) -> Result<BlaschkeProduct, CliError> {
        Ok(BlaschkeProduct::new(
            self.zeros.iter().copied().map(from_cx).collect(),
            from_cx(self.front),
        )?)
    }
}

/// A product given either in full or by one of the shorthands `z2`, `z3`,
/// `zn:<k>` (also `z<k>`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProductDesc {
    Short(String),
    Full(ProductJson),
}

impl ProductDesc {
    pub fn to_product(&self) -> Result<BlaschkeProduct, CliError> {
        match self {
            ProductDesc::Full(p) => p.to_product(),
            ProductDesc::Short(s) => parse_shorthand(s),
        }
    }
}

pub fn parse_shorthand(s: &str) -> Result<BlaschkeProduct, CliError> {
    let digits = s.strip_prefix("zn:").or_else(|| s.strip_prefix('z'));
    let k: usize = digits
        .and_then(|d| d.parse().ok())
        .ok_or_else(|| CliError::Usage(format!("unknown Blaschke product shorthand `{s}`")))?;
    Ok(BlaschkeProduct::monomial(k)?)
}

/// `"tm"`, `"kernel-zeros"`, `"clark"` or `"modified-clark"`, the last two
/// with a `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisJson {
    pub basis: BasisName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Cx>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisName {
    Tm,
    KernelZeros,
    Clark,
    ModifiedClark,
}

impl BasisName {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        serde_json::from_value(serde_json::Value::String(s.to_owned()))
            .map_err(|_| CliError::Usage(format!("unknown basis `{s}`")))
    }
}

impl BasisJson {
    pub fn from_kind(kind: BasisKind) -> Self {
        let (basis, lambda) = match kind {
            BasisKind::TakenakaMalmquist => (BasisName::Tm, None),
            BasisKind::KernelAtZeros => (BasisName::KernelZeros, None),
            BasisKind::Clark(l) => (BasisName::Clark, Some(cx(l))),
            BasisKind::ModifiedClark(l) => (BasisName::ModifiedClark, Some(cx(l))),
        };
        BasisJson { basis, lambda }
    }

    pub fn kind(&self) -> Result<BasisKind, CliError> {
        let lambda = || {
            self.lambda
                .map(from_cx)
                .ok_or_else(|| CliError::Usage("Clark bases need a lambda".into()))
        };
        Ok(match self.basis {
            BasisName::Tm => BasisKind::TakenakaMalmquist,
            BasisName::KernelZeros => BasisKind::KernelAtZeros,
            BasisName::Clark => BasisKind::Clark(lambda()?),
            BasisName::ModifiedClark => BasisKind::ModifiedClark(lambda()?),
        })
    }

    pub fn build(&self, space: &ModelSpace) -> Result<Arc<ModelBasis>, CliError> {
        Ok(space.basis(self.kind()?)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorJson {
    pub alpha: ProductDesc,
    #[serde(flatten)]
    pub basis: BasisJson,
    pub coeffs: Vec<Cx>,
}

impl VectorJson {
    pub fn from_vector(v: &ModelVector) -> Self {
        VectorJson {
            alpha: ProductDesc::Full(ProductJson::from_product(v.space().alpha())),
            basis: BasisJson::from_kind(v.basis().kind()),
            coeffs: cx_vec(v.coeffs().iter().copied()),
        }
    }

    pub fn to_vector(&self) -> Result<ModelVector, CliError> {
        let space = ModelSpace::new(self.alpha.to_product()?)?;
        self.to_vector_in(&space)
    }

    /// Reads the coefficients against an existing space, which must carry
    /// the same product.
    pub fn to_vector_in(&self, space: &ModelSpace) -> Result<ModelVector, CliError> {
        if self.alpha.to_product()? != *space.alpha() {
            return Err(CliError::Usage(
                "vector is attached to a different Blaschke product".into(),
            ));
        }
        let basis = self.basis.build(space)?;
        let coeffs =
            CVector::from_iterator(self.coeffs.len(), self.coeffs.iter().copied().map(from_cx));
        Ok(ModelVector::new(basis, coeffs)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub alpha: ProductDesc,
    pub beta: ProductDesc,
    pub in_basis: BasisJson,
    pub out_basis: BasisJson,
    /// Row-major, `dim K_β` rows of `dim K_α` entries.
    pub entries: Vec<Vec<Cx>>,
}

impl OperatorJson {
    pub fn from_operator(op: &OperatorMatrix) -> Self {
        let e = op.entries();
        OperatorJson {
            alpha: ProductDesc::Full(ProductJson::from_product(op.alpha().alpha())),
            beta: ProductDesc::Full(ProductJson::from_product(op.beta().alpha())),
            in_basis: BasisJson::from_kind(op.in_basis().kind()),
            out_basis: BasisJson::from_kind(op.out_basis().kind()),
            entries: (0..e.nrows())
                .map(|r| cx_vec(e.row(r).iter().copied()))
                .collect(),
        }
    }

    pub fn to_operator(&self) -> Result<OperatorMatrix, CliError> {
        let alpha = ModelSpace::new(self.alpha.to_product()?)?;
        let beta = ModelSpace::new(self.beta.to_product()?)?;
        let (m, n) = (alpha.dim(), beta.dim());
        if self.entries.len() != n || self.entries.iter().any(|r| r.len() != m) {
            return Err(CliError::Usage(format!(
                "entries must be a {n} x {m} array"
            )));
        }
        let entries = CMatrix::from_fn(n, m, |r, c| from_cx(self.entries[r][c]));
        Ok(OperatorMatrix::new(
            entries,
            self.in_basis.build(&alpha)?,
            self.out_basis.build(&beta)?,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawSymbolJson {
    pub numerator: Vec<Cx>,
    #[serde(default)]
    pub lowest_power: i32,
    #[serde(default = "one")]
    pub denominator: Vec<Cx>,
}

fn one() -> Vec<Cx> {
    vec![[1.0, 0.0]]
}

/// `conj(co_analytic) + analytic`, optionally with a raw boundary form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub co_analytic: Option<VectorJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analytic: Option<VectorJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw: Option<RawSymbolJson>,
}

impl SymbolJson {
    pub fn from_raw(raw: &RawSymbol) -> Self {
        SymbolJson {
            co_analytic: None,
            analytic: None,
            raw: Some(RawSymbolJson {
                numerator: cx_vec(raw.numerator.iter().copied()),
                lowest_power: raw.lowest_power,
                denominator: cx_vec(raw.denominator.iter().copied()),
            }),
        }
    }

    pub fn to_symbol(&self, alpha: &ModelSpace, beta: &ModelSpace) -> Result<SymbolSpec, CliError> {
        let chi = self
            .co_analytic
            .as_ref()
            .map(|v| v.to_vector_in(alpha))
            .transpose()?;
        let psi = self
            .analytic
            .as_ref()
            .map(|v| v.to_vector_in(beta))
            .transpose()?;
        let raw = match &self.raw {
            Some(r) => Some(RawSymbol::new(
                r.numerator.iter().copied().map(from_cx).collect(),
                r.lowest_power,
                r.denominator.iter().copied().map(from_cx).collect(),
            )?),
            None => None,
        };
        Ok(SymbolSpec::build(chi, psi, raw)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClarkJson {
    pub lambda: Cx,
    pub target: Cx,
    pub points: Vec<Cx>,
    pub weights: Vec<f64>,
    /// `max_j |α(η_j) - α_λ|`.
    pub max_residual: f64,
}

impl ClarkJson {
    pub fn from_set(alpha: &BlaschkeProduct, set: &ClarkPointSet) -> Self {
        let max_residual = set
            .points
            .iter()
            .map(|p| (alpha.eval(*p) - set.target).norm())
            .fold(0.0, f64::max);
        ClarkJson {
            lambda: cx(set.lambda),
            target: cx(set.target),
            points: cx_vec(set.points.iter().copied()),
            weights: set.weights.clone(),
            max_residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    /// TM coordinates of `χ ∈ K_α`.
    pub chi: Vec<Cx>,
    /// TM coordinates of `ψ ∈ K_β`.
    pub psi: Vec<Cx>,
    pub a: Cx,
    pub b: Cx,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodVerdictJson {
    pub method: String,
    pub member: bool,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub member: bool,
    pub method: String,
    pub max_residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
    /// Individual results when several procedures were run.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub runs: Vec<MethodVerdictJson>,
}

impl VerdictJson {
    pub fn from_verdict(v: &MembershipVerdict) -> Self {
        VerdictJson {
            member: v.is_member,
            method: v.method.name().to_owned(),
            max_residual: v.max_residual + 0.0,
            witness: v.witness.as_ref().map(|w| WitnessJson {
                chi: cx_vec(w.chi.tm_coords().iter().copied()),
                psi: cx_vec(w.psi.tm_coords().iter().copied()),
                a: cx(w.a),
                b: cx(w.b),
            }),
            runs: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub tag: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Cx>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Cx>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<bool>,
}

pub fn variant_name(v: RankOneVariant) -> &'static str {
    match v {
        RankOneVariant::ConjKKernel => "conjk-kernel",
        RankOneVariant::KernelConjK => "kernel-conjk",
    }
}

impl DecompositionJson {
    pub fn from_decomposition(d: &RankOneDecomposition) -> Self {
        match d.tag {
            RankOneTag::Standard => DecompositionJson {
                tag: "standard".into(),
                variant: d.variant.map(|v| variant_name(v).to_owned()),
                w: d.w.map(cx),
                scale: d.scale.map(cx),
                boundary: Some(d.boundary),
            },
            RankOneTag::NonStandard => DecompositionJson {
                tag: "nonstandard".into(),
                variant: None,
                w: None,
                scale: None,
                boundary: None,
            },
        }
    }
}
