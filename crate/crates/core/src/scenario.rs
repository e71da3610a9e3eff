//! TOML scenario files: a diagonal system, a Borel system, an optional
//! weight prefix and limit Weyl element, and analysis options.
//! The format is described in `docs/scenario-format.md`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bbw::{AnalyzeOptions, LeviMasks, MAX_PATHS};
use crate::borel::{BorelSystem, NamedBorel};
use crate::diagsys::{DiagonalSystem, RestrictionMap, StepPattern};
use crate::error::{Error, Result};
use crate::rootdata::{EpsWeight, Family, SignedIndex, WeylElt};
use crate::weights::{from_fundamental, SearchOptions, WeightSystem};
use crate::weyl_limit::{BranchElt, LimitWeylElt, DEFAULT_WINDOW};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub description: Option<String>,
    pub system: SystemSpec,
    pub borel: BorelSpec,
    #[serde(default)]
    pub weight: Option<WeightSpec>,
    #[serde(default)]
    pub weyl_element: Option<ElementSpec>,
    #[serde(default)]
    pub options: OptionsSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    #[serde(default)]
    pub family: Option<String>,
    #[serde(default)]
    pub initial_rank: Option<usize>,
    /// Number of levels; implied by `maps` when those are given.
    #[serde(default)]
    pub levels: Option<usize>,
    #[serde(default)]
    pub generator: Option<String>,
    #[serde(default)]
    pub pattern: Option<StepPattern>,
    /// Per step, the signed 1-based target of each level-(n+1) index; 0 marks a zero target.
    #[serde(default)]
    pub maps: Option<Vec<Vec<i64>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BorelSpec {
    #[serde(default)]
    pub named: Option<String>,
    #[serde(default)]
    pub orders: Option<Vec<Vec<i64>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Int(i64),
    /// `"p/2"` or an integer in text.
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopWeight {
    pub level: usize,
    #[serde(default)]
    pub fundamental: Option<Vec<i64>>,
    #[serde(default)]
    pub eps: Option<Vec<Coord>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    /// Fundamental coefficients of `λ_1, …, λ_N`.
    #[serde(default)]
    pub fundamental: Option<Vec<Vec<i64>>>,
    /// ε-coordinates of `λ_1, …, λ_N`.
    #[serde(default)]
    pub eps: Option<Vec<Vec<Coord>>>,
    /// A single weight restricted downwards.
    #[serde(default)]
    pub top: Option<TopWeight>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchSpec {
    pub copies: Vec<usize>,
    /// One-line signed notation at the base level, e.g. `"2 1 3"`.
    pub base: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    pub base_level: usize,
    #[serde(default)]
    pub branches: Vec<BranchSpec>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsSpec {
    #[serde(default)]
    pub horizon: Option<usize>,
    #[serde(default)]
    pub window: Option<usize>,
    #[serde(default)]
    pub bound: Option<i64>,
    #[serde(default)]
    pub prune: Option<bool>,
    #[serde(default)]
    pub max_results: Option<usize>,
    #[serde(default)]
    pub max_paths: Option<usize>,
    /// Levi simple roots (1-based) per level, for the parabolic variant.
    #[serde(default)]
    pub levi: Option<LeviMasks>,
}

/// A scenario with every section validated and built.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub scenario: Scenario,
    pub source: String,
    pub system: DiagonalSystem,
    pub borel: BorelSystem,
    pub weights: Option<WeightSystem>,
    pub element: Option<LimitWeylElt>,
}

fn at(section: &str, e: Error) -> Error {
    match e {
        Error::Validation(m) => Error::Validation(format!("{section}: {m}")),
        Error::Parse(m) => Error::Parse(format!("{section}: {m}")),
        Error::Precondition(m) => Error::Precondition(format!("{section}: {m}")),
        Error::Construction(m) => Error::Construction(format!("{section}: {m}")),
        Error::Domain(m) => Error::Domain(format!("{section}: {m}")),
        Error::LevelOutOfRange { level, max } => {
            Error::Validation(format!("{section}: level {level} is outside 1..={max}"))
        }
        other => other,
    }
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(self, source: String) -> Result<Loaded> {
        let system = self.build_system().map_err(|e| at("system", e))?;
        let borel = self.build_borel(&system).map_err(|e| at("borel", e))?;
        let weights = match &self.weight {
            Some(w) => Some(build_weights(w, &system, &borel).map_err(|e| at("weight", e))?),
            None => None,
        };
        let element = match &self.weyl_element {
            Some(e) => Some(build_element(e, &system).map_err(|e| at("weyl_element", e))?),
            None => None,
        };
        self.options.validate(&system, &borel).map_err(|e| at("options", e))?;
        Ok(Loaded { scenario: self, source, system, borel, weights, element })
    }

    fn build_system(&self) -> Result<DiagonalSystem> {
        let s = &self.system;
        let family: Option<Family> = s.family.as_deref().map(str::parse).transpose()?;
        let specified = [s.generator.is_some(), s.pattern.is_some(), s.maps.is_some()];
        if specified.iter().filter(|&&b| b).count() != 1 {
            return Err(Error::Validation("give exactly one of `generator`, `pattern`, `maps`".into()));
        }
        if let Some(maps) = &s.maps {
            let family = family.ok_or_else(|| Error::Validation("`family` is required with `maps`".into()))?;
            let rank = s.initial_rank.ok_or_else(|| Error::Validation("`initial_rank` is required with `maps`".into()))?;
            if let Some(n) = s.levels {
                if n != maps.len() + 1 {
                    return Err(Error::Validation(format!("{} maps give {} levels, not {n}", maps.len(), maps.len() + 1)));
                }
            }
            let mut level = crate::rootdata::Level::new(family, rank)?;
            let mut steps = Vec::new();
            for (k, map) in maps.iter().enumerate() {
                let targets = map
                    .iter()
                    .map(|&v| if v == 0 { Ok(None) } else { SignedIndex::from_signed(v).map(Some) })
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| at(&format!("maps[{k}]"), e))?;
                let step = RestrictionMap::from_targets(level, targets).map_err(|e| at(&format!("maps[{k}]"), e))?;
                level = step.target();
                steps.push(step);
            }
            return DiagonalSystem::new(family, rank, steps);
        }
        let levels = s.levels.ok_or_else(|| Error::Validation("`levels` is required".into()))?;
        if let Some(p) = s.pattern {
            let family = family.ok_or_else(|| Error::Validation("`family` is required with `pattern`".into()))?;
            let rank = s.initial_rank.ok_or_else(|| Error::Validation("`initial_rank` is required with `pattern`".into()))?;
            return DiagonalSystem::from_pattern(family, rank, p, levels);
        }
        let generator = s.generator.as_deref().expect("checked above");
        let (implied, sys) = match generator {
            "sl_infinity" => (Family::A, DiagonalSystem::sl_infinity(s.initial_rank.unwrap_or(1), levels)?),
            "sl_two_power" => (Family::A, DiagonalSystem::sl_two_power(levels)?),
            "sp_two_power_plus_one" => (Family::C, DiagonalSystem::sp_two_power_plus_one(levels)?),
            other => return Err(Error::Parse(format!("unknown generator `{other}`"))),
        };
        if family.is_some_and(|f| f != implied) {
            return Err(Error::Validation(format!("generator `{generator}` is of type {implied}")));
        }
        if generator != "sl_infinity" && s.initial_rank.is_some_and(|r| r != 1) {
            return Err(Error::Validation(format!("generator `{generator}` starts at rank 1")));
        }
        Ok(sys)
    }

    fn build_borel(&self, system: &DiagonalSystem) -> Result<BorelSystem> {
        match (&self.borel.named, &self.borel.orders) {
            (Some(n), None) => BorelSystem::named(system, n.parse::<NamedBorel>()?),
            (None, Some(o)) => BorelSystem::from_signed(system, o),
            _ => Err(Error::Validation("give exactly one of `named`, `orders`".into())),
        }
    }
}

fn parse_coord(c: &Coord) -> Result<i64> {
    match c {
        Coord::Int(v) => Ok(2 * v),
        Coord::Text(t) => {
            let t = t.trim();
            if let Some(num) = t.strip_suffix("/2") {
                num.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad coordinate `{t}`")))
            } else {
                t.parse::<i64>().map(|v| 2 * v).map_err(|_| Error::Parse(format!("bad coordinate `{t}`")))
            }
        }
    }
}

pub(crate) fn eps_weight(coords: &[Coord]) -> Result<EpsWeight> {
    Ok(EpsWeight::from_twice(coords.iter().map(parse_coord).collect::<Result<_>>()?))
}

fn build_weights(spec: &WeightSpec, system: &DiagonalSystem, borel: &BorelSystem) -> Result<WeightSystem> {
    let given = [spec.fundamental.is_some(), spec.eps.is_some(), spec.top.is_some()];
    if given.iter().filter(|&&b| b).count() != 1 {
        return Err(Error::Validation("give exactly one of `fundamental`, `eps`, `top`".into()));
    }
    if let Some(f) = &spec.fundamental {
        let ws = f
            .iter()
            .enumerate()
            .map(|(k, c)| from_fundamental(c, borel.chamber(k + 1)?).map_err(|e| at(&format!("fundamental[{k}]"), e)))
            .collect::<Result<Vec<_>>>()?;
        return WeightSystem::new(system, ws);
    }
    if let Some(e) = &spec.eps {
        let ws = e
            .iter()
            .enumerate()
            .map(|(k, c)| eps_weight(c).map_err(|e| at(&format!("eps[{k}]"), e)))
            .collect::<Result<Vec<_>>>()?;
        return WeightSystem::new(system, ws);
    }
    let top = spec.top.as_ref().expect("checked above");
    let w = match (&top.fundamental, &top.eps) {
        (Some(c), None) => from_fundamental(c, borel.chamber(top.level)?)?,
        (None, Some(e)) => eps_weight(e)?,
        _ => return Err(Error::Validation("top: give exactly one of `fundamental`, `eps`".into())),
    };
    WeightSystem::from_top(system, top.level, w).map_err(|e| at("top", e))
}

fn build_element(spec: &ElementSpec, system: &DiagonalSystem) -> Result<LimitWeylElt> {
    let level = system.level(spec.base_level)?;
    let support = spec
        .branches
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let base = WeylElt::from_one_line(level, &b.base).map_err(|e| at(&format!("branches[{k}]"), e))?;
            Ok(BranchElt { copies: b.copies.clone(), base })
        })
        .collect::<Result<Vec<_>>>()?;
    LimitWeylElt::new(system, spec.base_level, support)
}

impl OptionsSpec {
    fn validate(&self, system: &DiagonalSystem, borel: &BorelSystem) -> Result<()> {
        if let Some(h) = self.horizon {
            system.check_level(h)?;
        }
        if self.window == Some(0) {
            return Err(Error::Validation("`window` must be positive".into()));
        }
        if self.bound.is_some_and(|b| b < 0) {
            return Err(Error::Validation("`bound` must be non-negative".into()));
        }
        if let Some(levi) = &self.levi {
            for (k, mask) in levi.iter().enumerate() {
                let r = borel.chamber(k + 1)?.level().rank();
                if let Some(&i) = mask.iter().find(|&&i| i == 0 || i > r) {
                    return Err(Error::Validation(format!("levi[{k}]: simple root {i} outside 1..={r}")));
                }
            }
        }
        Ok(())
    }

    pub fn analyze_options(&self) -> AnalyzeOptions {
        AnalyzeOptions {
            horizon: self.horizon,
            window: self.window.unwrap_or(DEFAULT_WINDOW),
            max_paths: self.max_paths.unwrap_or(MAX_PATHS),
        }
    }

    pub fn search_options(&self) -> SearchOptions {
        let mut o = SearchOptions::pruned(self.bound.unwrap_or(5));
        if let Some(p) = self.prune {
            o.prune = p;
        }
        if let Some(m) = self.max_results {
            o.max_results = m;
        }
        o
    }
}

impl Loaded {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::from_str_named(&text, &path.display().to_string())
    }

    pub fn from_str_named(text: &str, name: &str) -> Result<Self> {
        let scenario = Scenario::parse(text).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{name}: {m}")),
            e => e,
        })?;
        scenario.load(text.to_string())
    }

    pub fn weights(&self) -> Result<&WeightSystem> {
        self.weights
            .as_ref()
            .ok_or_else(|| Error::Validation("the scenario has no [weight] section".into()))
    }

    pub fn element(&self) -> Result<&LimitWeylElt> {
        self.element
            .as_ref()
            .ok_or_else(|| Error::Validation("the scenario has no [weyl_element] section".into()))
    }
}
