//! Experiment configuration: TOML schema, defaults and validation with line references.

use crate::error::{CliError, CliResult};
use iga_lumping::lumping::Lumping;
use iga_lumping::spectral::DeflationMode;
use serde::Deserialize;
use std::path::PathBuf;
use toml::Spanned;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Spectrum,
    Convergence,
    Simulate,
    DeflateRatio,
    TrimmedSweep,
    BandwidthReport,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Spectrum => "spectrum",
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::DeflateRatio => "deflate-ratio",
            ExperimentKind::TrimmedSweep => "trimmed-sweep",
            ExperimentKind::BandwidthReport => "bandwidth-report",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            ExperimentKind::Spectrum,
            ExperimentKind::Convergence,
            ExperimentKind::Simulate,
            ExperimentKind::DeflateRatio,
            ExperimentKind::TrimmedSweep,
            ExperimentKind::BandwidthReport,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

/// Catalog geometry with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum GeometrySpec {
    UnitInterval,
    UnitSquare,
    UnitCube,
    StretchedSquare,
    QuarterAnnulus { r_in: f64, r_out: f64 },
    PlateWithHole,
    Magnet,
    PlateWithHoleTwoPatch,
    TwistedBox { twist: f64 },
    RectangleGrid { lx: f64, ly: f64, px: usize, py: usize },
    TwoIntervals,
}

impl GeometrySpec {
    pub fn dim(&self) -> usize {
        match self {
            GeometrySpec::UnitInterval | GeometrySpec::TwoIntervals => 1,
            GeometrySpec::UnitCube | GeometrySpec::Magnet | GeometrySpec::TwistedBox { .. } => 3,
            _ => 2,
        }
    }

    pub fn is_multipatch(&self) -> bool {
        matches!(
            self,
            GeometrySpec::PlateWithHoleTwoPatch
                | GeometrySpec::TwistedBox { .. }
                | GeometrySpec::RectangleGrid { .. }
                | GeometrySpec::TwoIntervals
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Density {
    One,
    /// `|sin(xy)| + x + y + 1`
    Nonseparable,
    /// `2 + sin(xy)`
    Smooth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenSource {
    Lanczos,
    Dense,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeflationSpec {
    pub ranks: Vec<usize>,
    pub mode: DeflationMode,
    pub tol: f64,
    pub max_restarts: usize,
    pub source: EigenSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumMethod {
    Dense,
    Lanczos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    Stiffness,
    Mass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSpec {
    pub method: SpectrumMethod,
    /// Number of top eigenvalues in Lanczos mode.
    pub count: usize,
    pub jacobi: bool,
    pub operator: Operator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    /// Consistent mass on a mesh this many dyadic levels finer than the finest level.
    Fine(usize),
    /// Closed form `pi sqrt(d)` for the unit box with unit coefficients.
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceSpec {
    pub levels: Vec<usize>,
    pub reference: Reference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimProblem {
    Manufactured,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Initial {
    Zero,
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateSpec {
    pub problem: SimProblem,
    pub initial: Initial,
    pub t_end: f64,
    pub safeguard: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioSpec {
    pub points: usize,
    pub growth: f64,
    pub safeguard: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrimSpec {
    pub side: f64,
    pub angle: f64,
    pub angles: usize,
    pub shift: [f64; 2],
    pub subdepth: usize,
}

/// Validated experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub geometry: GeometrySpec,
    pub degree: usize,
    pub regularity: usize,
    /// One entry per parametric direction.
    pub subdivisions: Vec<usize>,
    pub dirichlet: bool,
    pub density: Density,
    pub masses: Vec<Lumping>,
    pub deflation: Option<DeflationSpec>,
    pub spectrum: SpectrumSpec,
    pub convergence: Option<ConvergenceSpec>,
    pub simulate: Option<SimulateSpec>,
    pub ratio: RatioSpec,
    pub trim: Option<TrimSpec>,
    pub bandwidth: Vec<(usize, usize)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Spanned<String>,
    seed: Option<u64>,
    out: Option<String>,
    geometry: RawGeometry,
    #[serde(default)]
    discretization: RawDiscretization,
    masses: Option<Spanned<Vec<Spanned<String>>>>,
    deflation: Option<RawDeflation>,
    spectrum: Option<RawSpectrum>,
    convergence: Option<RawConvergence>,
    simulate: Option<RawSimulate>,
    ratio: Option<RawRatio>,
    trim: Option<RawTrim>,
    bandwidth: Option<RawBandwidth>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    id: Spanned<String>,
    r_in: Option<Spanned<f64>>,
    r_out: Option<Spanned<f64>>,
    twist: Option<f64>,
    lx: Option<Spanned<f64>>,
    ly: Option<Spanned<f64>>,
    px: Option<Spanned<usize>>,
    py: Option<Spanned<usize>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Subdivisions {
    All(usize),
    PerDirection(Vec<usize>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDiscretization {
    degree: Option<Spanned<usize>>,
    regularity: Option<Spanned<usize>>,
    subdivisions: Option<Spanned<Subdivisions>>,
    boundary: Option<Spanned<String>>,
    density: Option<Spanned<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDeflation {
    ranks: Spanned<Vec<usize>>,
    mode: Option<Spanned<String>>,
    tol: Option<Spanned<f64>>,
    max_restarts: Option<usize>,
    source: Option<Spanned<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpectrum {
    method: Option<Spanned<String>>,
    count: Option<Spanned<usize>>,
    jacobi: Option<bool>,
    operator: Option<Spanned<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConvergence {
    levels: Spanned<Vec<usize>>,
    reference: Option<Spanned<String>>,
    reference_levels: Option<Spanned<usize>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulate {
    problem: Option<Spanned<String>>,
    initial: Option<Spanned<String>>,
    t_end: Spanned<f64>,
    safeguard: Option<Spanned<f64>>,
    samples: Option<Spanned<usize>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRatio {
    points: Option<Spanned<usize>>,
    growth: Option<Spanned<f64>>,
    safeguard: Option<Spanned<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrim {
    side: Option<Spanned<f64>>,
    angle: Option<f64>,
    angles: Option<Spanned<usize>>,
    shift: Option<[f64; 2]>,
    subdepth: Option<Spanned<usize>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBandwidth {
    cases: Spanned<Vec<(usize, usize)>>,
}

/// 1-based line of a byte offset.
fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn err<T>(&self, span: std::ops::Range<usize>, message: impl Into<String>) -> CliResult<T> {
        Err(CliError::config(Some(line_of(self.text, span.start)), message))
    }

    fn choice<T: Copy>(&self, value: &Option<Spanned<String>>, key: &str, options: &[(&str, T)], default: T) -> CliResult<T> {
        let Some(v) = value else { return Ok(default) };
        match options.iter().find(|(name, _)| *name == v.get_ref().as_str()) {
            Some((_, t)) => Ok(*t),
            None => {
                let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
                self.err(v.span(), format!("{key} must be one of {names:?}, got {:?}", v.get_ref()))
            }
        }
    }

    fn positive(&self, value: &Option<Spanned<f64>>, key: &str, default: f64) -> CliResult<f64> {
        match value {
            None => Ok(default),
            Some(v) if *v.get_ref() > 0.0 && v.get_ref().is_finite() => Ok(*v.get_ref()),
            Some(v) => self.err(v.span(), format!("{key} must be positive, got {}", v.get_ref())),
        }
    }
}

/// Parse a mass treatment label: `consistent` (or `M`), `P<i>`, `H<k>` or `rowsum`.
pub fn parse_lumping(s: &str) -> Option<Lumping> {
    let index = |rest: &str| rest.parse::<usize>().ok().filter(|&i| i >= 1);
    match s {
        "consistent" | "M" => Some(Lumping::Consistent),
        "rowsum" => Some(Lumping::RowSum),
        _ => {
            if let Some(rest) = s.strip_prefix('P') {
                index(rest).map(Lumping::Block)
            } else if let Some(rest) = s.strip_prefix('H') {
                index(rest).map(Lumping::Hierarchical)
            } else {
                None
            }
        }
    }
}

impl Config {
    /// Parse and validate `text`. `expected` is the subcommand being run.
    pub fn from_toml(text: &str, expected: ExperimentKind) -> CliResult<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| line_of(text, s.start));
            CliError::config(line, e.message().trim().to_string())
        })?;
        let cx = Ctx { text };

        let kind = match ExperimentKind::parse(raw.experiment.get_ref()) {
            Some(k) => k,
            None => return cx.err(raw.experiment.span(), format!("unknown experiment {:?}", raw.experiment.get_ref())),
        };
        if kind != expected {
            return cx.err(
                raw.experiment.span(),
                format!("config describes a {} experiment but the {} subcommand was invoked", kind.name(), expected.name()),
            );
        }

        let geometry = parse_geometry(&cx, &raw.geometry)?;
        let d = geometry.dim();
        let disc = &raw.discretization;
        let degree = match &disc.degree {
            None => 2,
            Some(p) if *p.get_ref() >= 1 => *p.get_ref(),
            Some(p) => return cx.err(p.span(), "degree must be at least 1"),
        };
        let regularity = match &disc.regularity {
            None => degree - 1,
            Some(k) if *k.get_ref() < degree => *k.get_ref(),
            Some(k) => return cx.err(k.span(), format!("regularity must be below the degree {degree}")),
        };
        let subdivisions = match &disc.subdivisions {
            None => vec![8; d],
            Some(s) => {
                let v = match s.get_ref() {
                    Subdivisions::All(n) => vec![*n; d],
                    Subdivisions::PerDirection(v) => v.clone(),
                };
                if v.len() != d {
                    return cx.err(s.span(), format!("expected {d} subdivision counts, got {}", v.len()));
                }
                if v.contains(&0) {
                    return cx.err(s.span(), "subdivisions must be positive");
                }
                if geometry.is_multipatch() && v.iter().any(|&n| n != v[0]) {
                    return cx.err(s.span(), "multipatch geometries need the same subdivision count in every direction");
                }
                v
            }
        };
        let dirichlet =
            cx.choice(&disc.boundary, "boundary", &[("dirichlet", true), ("neumann", false)], kind != ExperimentKind::TrimmedSweep)?;
        let density = cx.choice(
            &disc.density,
            "density",
            &[("one", Density::One), ("nonseparable", Density::Nonseparable), ("smooth", Density::Smooth)],
            Density::One,
        )?;

        let masses = match &raw.masses {
            None => vec![Lumping::Consistent, Lumping::Block(1)],
            Some(list) => {
                if list.get_ref().is_empty() {
                    return cx.err(list.span(), "masses must not be empty");
                }
                let mut out = Vec::new();
                for m in list.get_ref() {
                    let Some(l) = parse_lumping(m.get_ref()) else {
                        return cx.err(m.span(), format!("unknown mass treatment {:?} (use consistent, P<i>, H<k> or rowsum)", m.get_ref()));
                    };
                    if let Lumping::Hierarchical(k) = l {
                        if k > d {
                            return cx.err(m.span(), format!("H{k} needs 1 <= k <= {d}"));
                        }
                    }
                    if let Lumping::Block(i) = l {
                        let n1 = degree + 1 + (subdivisions[0] - 1) * (degree - regularity) - if dirichlet { 2 } else { 0 };
                        if i > n1 {
                            return cx.err(m.span(), format!("P{i} exceeds the number of top-level blocks"));
                        }
                    }
                    if out.contains(&l) {
                        return cx.err(m.span(), format!("mass treatment {:?} listed twice", m.get_ref()));
                    }
                    out.push(l);
                }
                out
            }
        };

        let deflation = match &raw.deflation {
            None => None,
            Some(def) => {
                if def.ranks.get_ref().is_empty() || def.ranks.get_ref().contains(&0) {
                    return cx.err(def.ranks.span(), "ranks must be a nonempty list of positive integers");
                }
                let tol = cx.positive(&def.tol, "tol", 1e-3)?;
                Some(DeflationSpec {
                    ranks: def.ranks.get_ref().clone(),
                    mode: cx.choice(
                        &def.mode,
                        "mode",
                        &[("mass", DeflationMode::ScaleMass), ("stiffness", DeflationMode::ScaleStiffness)],
                        DeflationMode::ScaleMass,
                    )?,
                    tol,
                    max_restarts: def.max_restarts.unwrap_or(500),
                    source: cx.choice(&def.source, "source", &[("lanczos", EigenSource::Lanczos), ("dense", EigenSource::Dense)], EigenSource::Lanczos)?,
                })
            }
        };

        let spectrum = match &raw.spectrum {
            None => SpectrumSpec { method: SpectrumMethod::Dense, count: 20, jacobi: false, operator: Operator::Stiffness },
            Some(s) => SpectrumSpec {
                method: cx.choice(&s.method, "method", &[("dense", SpectrumMethod::Dense), ("lanczos", SpectrumMethod::Lanczos)], SpectrumMethod::Dense)?,
                count: match &s.count {
                    None => 20,
                    Some(c) if *c.get_ref() >= 1 => *c.get_ref(),
                    Some(c) => return cx.err(c.span(), "count must be positive"),
                },
                jacobi: s.jacobi.unwrap_or(false),
                operator: cx.choice(&s.operator, "operator", &[("stiffness", Operator::Stiffness), ("mass", Operator::Mass)], Operator::Stiffness)?,
            },
        };

        let convergence = match &raw.convergence {
            None => None,
            Some(c) => {
                let levels = c.levels.get_ref().clone();
                if levels.len() < 3 || levels.contains(&0) || levels.windows(2).any(|w| w[1] <= w[0]) {
                    return cx.err(c.levels.span(), "levels must be at least 3 increasing positive subdivision counts");
                }
                let finer = match &c.reference_levels {
                    None => 2,
                    Some(r) if *r.get_ref() >= 1 => *r.get_ref(),
                    Some(r) => return cx.err(r.span(), "reference_levels must be positive"),
                };
                let exact = cx.choice(&c.reference, "reference", &[("fine", false), ("exact", true)], false)?;
                if exact {
                    let boxed = matches!(geometry, GeometrySpec::UnitInterval | GeometrySpec::UnitSquare | GeometrySpec::UnitCube);
                    if !boxed || density != Density::One || !dirichlet {
                        let span = c.reference.as_ref().expect("exact was given").span();
                        return cx.err(span, "the exact reference needs a unit box, density one and Dirichlet boundaries");
                    }
                }
                Some(ConvergenceSpec { levels, reference: if exact { Reference::Exact } else { Reference::Fine(finer) } })
            }
        };

        let simulate = match &raw.simulate {
            None => None,
            Some(s) => {
                let problem = cx.choice(&s.problem, "problem", &[("manufactured", SimProblem::Manufactured), ("free", SimProblem::Free)], SimProblem::Manufactured)?;
                if problem == SimProblem::Manufactured && (geometry != GeometrySpec::PlateWithHole || !dirichlet || density != Density::One) {
                    let span = s.problem.as_ref().map_or(s.t_end.span(), |p| p.span());
                    return cx.err(span, "the manufactured problem is defined on plate_with_hole with Dirichlet boundaries and density one");
                }
                let t_end = cx.positive(&Some(s.t_end.clone()), "t_end", 1.0)?;
                let safeguard = cx.positive(&s.safeguard, "safeguard", 0.85)?;
                if safeguard > 1.0 {
                    return cx.err(s.safeguard.as_ref().expect("given").span(), "safeguard must not exceed 1");
                }
                Some(SimulateSpec {
                    problem,
                    initial: cx.choice(&s.initial, "initial", &[("zero", Initial::Zero), ("random", Initial::Random)], Initial::Random)?,
                    t_end,
                    safeguard,
                    samples: match &s.samples {
                        None => 100,
                        Some(n) if *n.get_ref() >= 1 => *n.get_ref(),
                        Some(n) => return cx.err(n.span(), "samples must be positive"),
                    },
                })
            }
        };

        let ratio = match &raw.ratio {
            None => RatioSpec { points: 25, growth: 2.0, safeguard: 0.85 },
            Some(r) => {
                let growth = cx.positive(&r.growth, "growth", 2.0)?;
                if growth <= 1.0 {
                    return cx.err(r.growth.as_ref().expect("given").span(), "growth must exceed 1");
                }
                let safeguard = cx.positive(&r.safeguard, "safeguard", 0.85)?;
                if safeguard > 1.0 {
                    return cx.err(r.safeguard.as_ref().expect("given").span(), "safeguard must not exceed 1");
                }
                RatioSpec {
                    points: match &r.points {
                        None => 25,
                        Some(n) if *n.get_ref() >= 2 => *n.get_ref(),
                        Some(n) => return cx.err(n.span(), "points must be at least 2"),
                    },
                    growth,
                    safeguard,
                }
            }
        };

        let trim = match &raw.trim {
            None => None,
            Some(t) => {
                let side = cx.positive(&t.side, "side", 0.4)?;
                let subdepth = match &t.subdepth {
                    None => 3,
                    Some(s) if *s.get_ref() <= 6 => *s.get_ref(),
                    Some(s) => return cx.err(s.span(), "subdepth must not exceed 6"),
                };
                let angles = match &t.angles {
                    None => 40,
                    Some(a) if *a.get_ref() >= 1 => *a.get_ref(),
                    Some(a) => return cx.err(a.span(), "angles must be positive"),
                };
                Some(TrimSpec { side, angle: t.angle.unwrap_or(0.6), angles, shift: t.shift.unwrap_or([0.03, -0.02]), subdepth })
            }
        };
        if trim.is_some() && (d != 2 || geometry.is_multipatch()) {
            return Err(CliError::config(None, "trimming needs a single-patch 2D background geometry"));
        }

        let bandwidth = match &raw.bandwidth {
            None => Vec::new(),
            Some(b) => {
                let cases = b.cases.get_ref().clone();
                if cases.is_empty() || cases.iter().any(|&(p, n)| p == 0 || n == 0) {
                    return cx.err(b.cases.span(), "cases must be a nonempty list of [degree, subdivisions] pairs");
                }
                cases
            }
        };

        let config = Config {
            kind,
            seed: raw.seed.unwrap_or(0),
            out: raw.out.map(PathBuf::from),
            geometry,
            degree,
            regularity,
            subdivisions,
            dirichlet,
            density,
            masses,
            deflation,
            spectrum,
            convergence,
            simulate,
            ratio,
            trim,
            bandwidth,
        };
        config.require_sections()?;
        Ok(config)
    }

    fn require_sections(&self) -> CliResult<()> {
        let missing = |section: &str| Err(CliError::config(None, format!("{} needs a [{section}] section", self.kind.name())));
        match self.kind {
            ExperimentKind::Convergence if self.convergence.is_none() => missing("convergence"),
            ExperimentKind::Convergence if !self.dirichlet => {
                Err(CliError::config(None, "convergence needs Dirichlet boundaries so that the stiffness is definite"))
            }
            ExperimentKind::Simulate if self.simulate.is_none() => missing("simulate"),
            ExperimentKind::DeflateRatio if self.deflation.is_none() => missing("deflation"),
            ExperimentKind::TrimmedSweep if self.trim.is_none() => missing("trim"),
            ExperimentKind::BandwidthReport if self.bandwidth.is_empty() => missing("bandwidth"),
            ExperimentKind::BandwidthReport if self.geometry.is_multipatch() => {
                Err(CliError::config(None, "bandwidth-report needs a single-patch geometry"))
            }
            _ => Ok(()),
        }
    }
}

fn parse_geometry(cx: &Ctx, g: &RawGeometry) -> CliResult<GeometrySpec> {
    let id = g.id.get_ref().as_str();
    let positive = |v: &Option<Spanned<f64>>, key: &str, default: f64| cx.positive(v, key, default);
    let spec = match id {
        "unit_interval" => GeometrySpec::UnitInterval,
        "unit_square" => GeometrySpec::UnitSquare,
        "unit_cube" => GeometrySpec::UnitCube,
        "stretched_square" => GeometrySpec::StretchedSquare,
        "quarter_annulus" => {
            let r_in = positive(&g.r_in, "r_in", 1.0)?;
            let r_out = positive(&g.r_out, "r_out", 2.0)?;
            if r_out <= r_in {
                return cx.err(g.r_out.as_ref().map_or(g.id.span(), |r| r.span()), "r_out must exceed r_in");
            }
            GeometrySpec::QuarterAnnulus { r_in, r_out }
        }
        "plate_with_hole" => GeometrySpec::PlateWithHole,
        "magnet" => GeometrySpec::Magnet,
        "plate_with_hole_two_patch" => GeometrySpec::PlateWithHoleTwoPatch,
        "twisted_box" => GeometrySpec::TwistedBox { twist: g.twist.unwrap_or(0.5) },
        "rectangle_grid" => {
            let count = |v: &Option<Spanned<usize>>, key: &str| match v {
                None => Ok(2),
                Some(n) if *n.get_ref() >= 1 => Ok(*n.get_ref()),
                Some(n) => cx.err(n.span(), format!("{key} must be positive")),
            };
            GeometrySpec::RectangleGrid {
                lx: positive(&g.lx, "lx", 1.0)?,
                ly: positive(&g.ly, "ly", 1.0)?,
                px: count(&g.px, "px")?,
                py: count(&g.py, "py")?,
            }
        }
        "two_intervals" => GeometrySpec::TwoIntervals,
        other => return cx.err(g.id.span(), format!("unknown geometry id {other:?}")),
    };
    Ok(spec)
}
