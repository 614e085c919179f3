//! Name-keyed registries behind the command line: distribution families,
//! identity verifiers, order relations, aging classes, risk measures and
//! figures. Each entry is a trait object selected by name at runtime.

use std::collections::BTreeMap;

use crate::distributions::{make_model, FamilySpec, QuantileModel, Tabulated};
use crate::error::{Error, Result};
use crate::figures::FigureId;
use crate::identities::application::{ApplicationKind, ApplicationOptions, Levels};
use crate::identities::{
    verify_application, verify_corollary_power, verify_mvt, verify_proportional, verify_taylor1,
    verify_taylor_n, IdentityReport, TestFunction, Tolerances,
};
use crate::orders::{class_checks, ClassCheck, OrderCheck, OrderRelation};
use crate::risk::{derive, risk_measures, DerivedModelKind, RiskMeasure};

/// Builds a [`QuantileModel`] from the argument part of a `family:args` spec.
pub trait FamilyFactory: Send + Sync {
    fn name(&self) -> &'static str;
    /// Parameter names in spec order.
    fn parameters(&self) -> &'static [&'static str];
    fn build(&self, args: &str) -> Result<QuantileModel>;
}

struct Parametric {
    name: &'static str,
    parameters: &'static [&'static str],
    make: fn(&[f64]) -> FamilySpec,
}

impl FamilyFactory for Parametric {
    fn name(&self) -> &'static str {
        self.name
    }

    fn parameters(&self) -> &'static [&'static str] {
        self.parameters
    }

    fn build(&self, args: &str) -> Result<QuantileModel> {
        let values: Vec<f64> = if args.trim().is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|t| {
                    t.trim().parse::<f64>().map_err(|_| {
                        Error::InvalidParameter(format!("{}: bad number '{t}'", self.name))
                    })
                })
                .collect::<Result<_>>()?
        };
        if values.len() != self.parameters.len() {
            return Err(Error::InvalidParameter(format!(
                "{} takes {} parameter(s) ({}), got {}",
                self.name,
                self.parameters.len(),
                self.parameters.join(","),
                values.len()
            )));
        }
        make_model(&(self.make)(&values))
    }
}

/// `tab:path` reads `u,Q` pairs from a CSV file.
struct TabulatedFactory;

impl FamilyFactory for TabulatedFactory {
    fn name(&self) -> &'static str {
        "tab"
    }

    fn parameters(&self) -> &'static [&'static str] {
        &["path"]
    }

    fn build(&self, args: &str) -> Result<QuantileModel> {
        if args.is_empty() {
            return Err(Error::InvalidParameter("tab needs a file path".into()));
        }
        Ok(QuantileModel::new(Tabulated::from_csv_path(args)?))
    }
}

pub struct FamilyRegistry {
    factories: BTreeMap<&'static str, Box<dyn FamilyFactory>>,
    aliases: BTreeMap<&'static str, &'static str>,
}

impl FamilyRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
            aliases: BTreeMap::new(),
        }
    }

    /// Every catalog family plus `tab`.
    pub fn standard() -> Self {
        let mut r = Self::empty();
        let entries: [(
            &'static str,
            &'static [&'static str],
            fn(&[f64]) -> FamilySpec,
        ); 10] = [
            ("exp", &["lambda"], |v| FamilySpec::Exponential {
                lambda: v[0],
            }),
            ("uniform", &["a"], |v| FamilySpec::Uniform { a: v[0] }),
            ("powerunit", &["alpha"], |v| FamilySpec::PowerUnit {
                alpha: v[0],
            }),
            ("powerscale", &["alpha", "beta"], |v| {
                FamilySpec::PowerScale {
                    alpha: v[0],
                    beta: v[1],
                }
            }),
            ("lomax", &["alpha", "lambda"], |v| FamilySpec::Lomax {
                alpha: v[0],
                lambda: v[1],
            }),
            ("pareto1", &["alpha", "beta"], |v| FamilySpec::ParetoI {
                alpha: v[0],
                beta: v[1],
            }),
            ("rayleigh", &["alpha"], |v| FamilySpec::Rayleigh {
                alpha: v[0],
            }),
            ("geomax", &["lambda", "delta"], |v| FamilySpec::GeoMaxExp {
                lambda: v[0],
                delta: v[1],
            }),
            ("frechet", &["c", "gamma"], |v| FamilySpec::FrechetType {
                c: v[0],
                gamma: v[1],
            }),
            ("block", &[], |_| FamilySpec::BlockPiecewise),
        ];
        for (name, parameters, make) in entries {
            r.register(Box::new(Parametric {
                name,
                parameters,
                make,
            }));
        }
        r.register(Box::new(TabulatedFactory));
        for (alias, target) in [
            ("exponential", "exp"),
            ("paretoi", "pareto1"),
            ("pareto", "pareto1"),
            ("geomaxexp", "geomax"),
            ("frechettype", "frechet"),
            ("blockpiecewise", "block"),
        ] {
            r.aliases.insert(alias, target);
        }
        r
    }

    pub fn register(&mut self, factory: Box<dyn FamilyFactory>) {
        self.factories.insert(factory.name(), factory);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.factories.keys().copied().collect()
    }

    pub fn factory(&self, name: &str) -> Result<&dyn FamilyFactory> {
        let key = name.trim().to_ascii_lowercase();
        let key = self
            .aliases
            .get(key.as_str())
            .copied()
            .unwrap_or(key.as_str())
            .to_string();
        self.factories
            .get(key.as_str())
            .map(|f| f.as_ref())
            .ok_or_else(|| Error::UnknownName {
                kind: "family",
                name: name.to_string(),
            })
    }

    /// Parses `family:p1,p2`, optionally wrapped as `derived@family:…` with
    /// `derived` one of `residual:p`, `propresidual:p`, `star:v`, `hat:v`.
    pub fn parse(&self, spec: &str) -> Result<QuantileModel> {
        let spec = spec.trim();
        if let Some((derived, parent)) = spec.split_once('@') {
            let kind: DerivedModelKind = derived.parse()?;
            return derive(&self.parse(parent)?, kind);
        }
        let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
        self.factory(name)?.build(args)
    }
}

/// Inputs a verifier may draw on; which fields are required depends on the
/// identity.
#[derive(Debug, Clone, Default)]
pub struct VerifyArgs {
    pub x: Option<QuantileModel>,
    pub y: Option<QuantileModel>,
    pub g: Option<TestFunction>,
    pub phi: Option<TestFunction>,
    /// Expansion order for `taylorN` and `corollary`.
    pub order: Option<usize>,
    pub alpha: Option<f64>,
    pub levels: Levels,
    pub local: bool,
    pub tolerances: Tolerances,
}

impl VerifyArgs {
    fn need<'a, T>(field: &'a Option<T>, id: &str, flag: &str) -> Result<&'a T> {
        field
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter(format!("{id} needs --{flag}")))
    }

    pub fn x(&self, id: &str) -> Result<&QuantileModel> {
        Self::need(&self.x, id, "family (or --x)")
    }

    pub fn y(&self, id: &str) -> Result<&QuantileModel> {
        Self::need(&self.y, id, "y")
    }

    pub fn g(&self, id: &str) -> Result<&TestFunction> {
        Self::need(&self.g, id, "g")
    }
}

pub trait Verifier: Send + Sync {
    fn id(&self) -> &'static str;
    fn run(&self, args: &VerifyArgs) -> Result<Vec<IdentityReport>>;
}

struct Taylor1;
struct TaylorN;
struct Corollary;
struct Mvt;
struct Proportional;
struct Application(&'static str);

impl Verifier for Taylor1 {
    fn id(&self) -> &'static str {
        "taylor1"
    }

    fn run(&self, a: &VerifyArgs) -> Result<Vec<IdentityReport>> {
        Ok(vec![verify_taylor1(a.x(self.id())?, a.g(self.id())?)?])
    }
}

impl Verifier for TaylorN {
    fn id(&self) -> &'static str {
        "taylorN"
    }

    fn run(&self, a: &VerifyArgs) -> Result<Vec<IdentityReport>> {
        let n = *VerifyArgs::need(&a.order, self.id(), "n")?;
        Ok(vec![verify_taylor_n(a.x(self.id())?, a.g(self.id())?, n)?])
    }
}

impl Verifier for Corollary {
    fn id(&self) -> &'static str {
        "corollary"
    }

    fn run(&self, a: &VerifyArgs) -> Result<Vec<IdentityReport>> {
        let alpha = *VerifyArgs::need(&a.alpha, self.id(), "alpha")?;
        verify_corollary_power(a.x(self.id())?, alpha, a.order.unwrap_or(1))
    }
}

impl Verifier for Mvt {
    fn id(&self) -> &'static str {
        "mvt"
    }

    fn run(&self, a: &VerifyArgs) -> Result<Vec<IdentityReport>> {
        Ok(vec![verify_mvt(
            a.x(self.id())?,
            a.y(self.id())?,
            a.g(self.id())?,
        )?])
    }
}

impl Verifier for Proportional {
    fn id(&self) -> &'static str {
        "proportional"
    }

    fn run(&self, a: &VerifyArgs) -> Result<Vec<IdentityReport>> {
        let phi = VerifyArgs::need(&a.phi, self.id(), "phi")?;
        Ok(vec![verify_proportional(phi, a.g(self.id())?)?])
    }
}

impl Verifier for Application {
    fn id(&self) -> &'static str {
        self.0
    }

    fn run(&self, a: &VerifyArgs) -> Result<Vec<IdentityReport>> {
        let kind = ApplicationKind::from_id(self.0, a.levels)?;
        let options = ApplicationOptions {
            local: a.local,
            ..Default::default()
        };
        Ok(vec![verify_application(
            a.x(self.id())?,
            kind,
            a.g(self.id())?,
            options,
        )?])
    }
}

/// All registries in one place.
pub struct Registry {
    pub families: FamilyRegistry,
    verifiers: BTreeMap<&'static str, Box<dyn Verifier>>,
    classes: BTreeMap<&'static str, Box<dyn ClassCheck>>,
    measures: BTreeMap<&'static str, Box<dyn RiskMeasure>>,
}

impl Default for Registry {
    fn default() -> Self {
        Self::standard()
    }
}

impl Registry {
    pub fn standard() -> Self {
        let mut verifiers: BTreeMap<&'static str, Box<dyn Verifier>> = BTreeMap::new();
        let base: [Box<dyn Verifier>; 5] = [
            Box::new(Taylor1),
            Box::new(TaylorN),
            Box::new(Corollary),
            Box::new(Mvt),
            Box::new(Proportional),
        ];
        for v in base {
            verifiers.insert(v.id(), v);
        }
        for id in ApplicationKind::IDS {
            verifiers.insert(id, Box::new(Application(id)));
        }
        Self {
            families: FamilyRegistry::standard(),
            verifiers,
            classes: class_checks().into_iter().map(|c| (c.name(), c)).collect(),
            measures: risk_measures().into_iter().map(|m| (m.name(), m)).collect(),
        }
    }

    pub fn register_verifier(&mut self, v: Box<dyn Verifier>) {
        self.verifiers.insert(v.id(), v);
    }

    pub fn verifier(&self, id: &str) -> Result<&dyn Verifier> {
        // `taylorn` and `taylorN` both name the order-n expansion
        let key = if id.eq_ignore_ascii_case("taylorn") {
            "taylorN"
        } else {
            id
        };
        self.verifiers
            .get(key)
            .map(|v| v.as_ref())
            .ok_or_else(|| Error::UnknownName {
                kind: "identity",
                name: id.to_string(),
            })
    }

    /// Runs the named verifier and judges its reports at `args.tolerances`.
    pub fn verify(&self, id: &str, args: &VerifyArgs) -> Result<Vec<IdentityReport>> {
        let reports = self.verifier(id)?.run(args)?;
        Ok(reports
            .into_iter()
            .map(|r| r.with_tolerances(args.tolerances))
            .collect())
    }

    pub fn verifier_ids(&self) -> Vec<&'static str> {
        self.verifiers.keys().copied().collect()
    }

    pub fn order(&self, name: &str) -> Result<Box<dyn OrderCheck>> {
        Ok(name.parse::<OrderRelation>()?.checker())
    }

    pub fn class(&self, name: &str) -> Result<&dyn ClassCheck> {
        self.classes
            .get(name.to_ascii_lowercase().as_str())
            .map(|c| c.as_ref())
            .ok_or_else(|| Error::UnknownName {
                kind: "aging class",
                name: name.to_string(),
            })
    }

    pub fn class_names(&self) -> Vec<&'static str> {
        self.classes.keys().copied().collect()
    }

    pub fn measure(&self, name: &str) -> Result<&dyn RiskMeasure> {
        self.measures
            .get(name.to_ascii_lowercase().as_str())
            .map(|m| m.as_ref())
            .ok_or_else(|| Error::UnknownName {
                kind: "risk measure",
                name: name.to_string(),
            })
    }

    pub fn measure_names(&self) -> Vec<&'static str> {
        self.measures.keys().copied().collect()
    }

    pub fn figure(&self, name: &str) -> Result<FigureId> {
        name.parse()
    }
}
