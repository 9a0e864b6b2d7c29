//! Scenario files: `key = value` lines grouped under `[section]` headers.
//!
//! ```text
//! [scenario]
//! name = fig3
//! output = fig3.csv
//!
//! [mechanism]
//! family = gaussian
//! noise_scales = 0.4, 0.6, 0.8
//!
//! [analysis]
//! baselines = fixed:0.1, fixed:0.25
//! methods = fdp, zcdp, rdp-t2
//! ```
//!
//! Several mechanisms may be given as `[mechanism.<label>]` sections. A
//! mechanism section holds either `family` with one of `noise_scale(s)`,
//! `mu(s)`, `rho(s)` or `epsilon(s)` + `delta` (Gaussian only), or a
//! curve source: `curve = <file>`, `profile = <file>`, or `epsilon(s)` +
//! `delta` without a family.

use fdp_risk::accountant::{Family, MechanismSpec, Neighborhood};
use fdp_risk::calibrate::Method;
use fdp_risk::risk::BaselineSpec;
use fdp_risk::tradeoff::{self, gaussian_mu_for, PrivacyProfile, TradeoffCurve};
use fdp_risk::{Error, Result};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: BTreeMap<String, (usize, String)>,
}

/// Parse the raw section structure. Keys before any header belong to
/// `[scenario]`.
pub fn parse_sections(text: &str) -> Result<Vec<Section>> {
    let mut sections = vec![Section {
        name: "scenario".into(),
        line: 0,
        entries: BTreeMap::new(),
    }];
    let mut current = 0;
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| parse_err(n, "unterminated section header"))?
                .trim();
            if name.is_empty() {
                return Err(parse_err(n, "empty section name"));
            }
            if name != "scenario" && sections.iter().any(|s| s.name == name) {
                return Err(parse_err(n, format!("duplicate section `{name}`")));
            }
            if name == "scenario" {
                sections[0].line = n;
                current = 0;
            } else {
                sections.push(Section {
                    name: name.to_string(),
                    line: n,
                    entries: BTreeMap::new(),
                });
                current = sections.len() - 1;
            }
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| parse_err(n, "expected `key = value`"))?;
        let (k, v) = (k.trim().to_ascii_lowercase(), v.trim().to_string());
        if k.is_empty() {
            return Err(parse_err(n, "empty key"));
        }
        if sections[current].entries.insert(k.clone(), (n, v)).is_some() {
            return Err(parse_err(n, format!("duplicate key `{k}`")));
        }
    }
    Ok(sections)
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone)]
pub enum SourceKind {
    Mechanism(MechanismSpec),
    Curve(TradeoffCurve),
}

#[derive(Debug, Clone)]
pub struct Source {
    pub label: String,
    pub kind: SourceKind,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub output: Option<String>,
    pub sources: Vec<Source>,
    pub baselines: Vec<BaselineSpec>,
    pub methods: Vec<Method>,
}

impl Scenario {
    pub fn from_file(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Scenario::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Parse scenario text; file references resolve against `dir`.
    pub fn parse(text: &str, dir: &Path) -> Result<Scenario> {
        let sections = parse_sections(text)?;
        let mut name = None;
        let mut output = None;
        let mut sources = Vec::new();
        let mut baselines = Vec::new();
        let mut methods = Vec::new();
        for s in &sections {
            match s.name.as_str() {
                "scenario" => {
                    let mut s = Cursor::new(s);
                    name = s.take("name");
                    output = s.take("output");
                    s.finish()?;
                }
                "analysis" => {
                    let mut c = Cursor::new(s);
                    let (bl, bv) = c.require("baselines")?;
                    for item in list(&bv) {
                        baselines.push(item.parse().map_err(|e| relocate(e, bl))?);
                    }
                    let (ml, mv) = c.require("methods")?;
                    for item in list(&mv) {
                        methods.push(item.parse().map_err(|e| relocate(e, ml))?);
                    }
                    c.finish()?;
                }
                other => {
                    let label = match other.strip_prefix("mechanism") {
                        Some("") => "mechanism".to_string(),
                        Some(rest) if rest.starts_with('.') && rest.len() > 1 => rest[1..].to_string(),
                        _ => return Err(parse_err(s.line, format!("unknown section `{other}`"))),
                    };
                    sources.extend(parse_sources(s, &label, dir)?);
                }
            }
        }
        if sources.is_empty() {
            return Err(parse_err(0, "scenario defines no mechanism"));
        }
        if baselines.is_empty() || methods.is_empty() {
            return Err(parse_err(0, "scenario needs at least one baseline and one method"));
        }
        Ok(Scenario {
            name: name.unwrap_or_else(|| "scenario".into()),
            output,
            sources,
            baselines,
            methods,
        })
    }
}

fn relocate(e: Error, line: usize) -> Error {
    match e {
        Error::Parse { message, .. } => Error::Parse { line, message },
        other => Error::Parse {
            line,
            message: other.to_string(),
        },
    }
}

fn list(v: &str) -> Vec<&str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

struct Cursor<'a> {
    section: &'a Section,
    entries: BTreeMap<String, (usize, String)>,
}

impl<'a> Cursor<'a> {
    fn new(section: &'a Section) -> Self {
        Cursor {
            section,
            entries: section.entries.clone(),
        }
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key).map(|(_, v)| v)
    }

    fn take_with_line(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<(usize, String)> {
        self.take_with_line(key).ok_or_else(|| {
            parse_err(
                self.section.line,
                format!("section `{}` is missing `{key}`", self.section.name),
            )
        })
    }

    /// Value of `singular` or the comma list under `plural`.
    fn numbers(&mut self, singular: &str, plural: &str) -> Result<Option<Vec<f64>>> {
        let entry = match (self.take_with_line(singular), self.take_with_line(plural)) {
            (Some(_), Some((l, _))) => {
                return Err(parse_err(l, format!("give either `{singular}` or `{plural}`")))
            }
            (Some(e), None) | (None, Some(e)) => e,
            (None, None) => return Ok(None),
        };
        let (line, v) = entry;
        let mut out = Vec::new();
        for item in list(&v) {
            out.push(
                item.parse::<f64>()
                    .map_err(|_| parse_err(line, format!("`{item}` is not a number")))?,
            );
        }
        if out.is_empty() {
            return Err(parse_err(line, "empty list"));
        }
        Ok(Some(out))
    }

    fn number(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take_with_line(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| parse_err(line, format!("`{v}` is not a number"))),
        }
    }

    fn finish(self) -> Result<()> {
        if let Some((k, (line, _))) = self.entries.iter().next() {
            return Err(parse_err(*line, format!("unknown key `{k}` in `{}`", self.section.name)));
        }
        Ok(())
    }
}

fn parse_sources(s: &Section, label: &str, dir: &Path) -> Result<Vec<Source>> {
    let mut c = Cursor::new(s);
    let at = |e: Error| relocate(e, s.line);
    let family = c
        .take_with_line("family")
        .map(|(l, v)| v.parse::<Family>().map_err(|e| relocate(e, l)))
        .transpose()?;
    let mut out = Vec::new();
    if let Some(path) = c.take("curve") {
        let text = read(dir, &path)?;
        let curve = TradeoffCurve::from_csv(&text).map_err(at)?.with_provenance(format!("curve({path})"));
        out.push(Source {
            label: label.to_string(),
            kind: SourceKind::Curve(curve),
        });
        c.finish()?;
        return Ok(out);
    }
    if let Some(path) = c.take("profile") {
        let text = read(dir, &path)?;
        let profile = PrivacyProfile::from_csv(&text).map_err(at)?;
        let curve = tradeoff::curve_from_profile(&profile).with_provenance(format!("profile({path})"));
        out.push(Source {
            label: label.to_string(),
            kind: SourceKind::Curve(curve),
        });
        c.finish()?;
        return Ok(out);
    }
    let epsilons = c.numbers("epsilon", "epsilons")?;
    let delta = c.number("delta")?;
    let Some(family) = family else {
        let (eps, delta) = match (epsilons, delta) {
            (Some(e), Some(d)) => (e, d),
            _ => {
                return Err(parse_err(
                    s.line,
                    format!("section `{}` needs `family`, `curve`, `profile` or `epsilon` + `delta`", s.name),
                ))
            }
        };
        for e in eps {
            let curve = TradeoffCurve::from_epsilon_delta(e, delta).map_err(at)?;
            out.push(Source {
                label: format!("{label}[eps={e}]"),
                kind: SourceKind::Curve(curve),
            });
        }
        c.finish()?;
        return Ok(out);
    };
    let sensitivity = c.number("sensitivity")?.unwrap_or(1.0);
    let compositions = match c.number("compositions")? {
        None => 1,
        Some(k) if k >= 1.0 && k.fract() == 0.0 && k <= u32::MAX as f64 => k as u32,
        Some(k) => return Err(parse_err(s.line, format!("compositions `{k}` must be a positive integer"))),
    };
    let neighborhood = c
        .take_with_line("neighborhood")
        .map(|(l, v)| v.parse::<Neighborhood>().map_err(|e| relocate(e, l)))
        .transpose()?
        .unwrap_or(Neighborhood::AddRemove);
    let scales = c.numbers("noise_scale", "noise_scales")?;
    let mus = c.numbers("mu", "mus")?;
    let rhos = c.numbers("rho", "rhos")?;
    let given = [scales.is_some(), mus.is_some(), rhos.is_some(), epsilons.is_some()]
        .iter()
        .filter(|&&b| b)
        .count();
    if given != 1 {
        return Err(parse_err(
            s.line,
            format!("section `{}` needs exactly one of noise_scale(s), mu(s), rho(s), epsilon(s)", s.name),
        ));
    }
    if family != Family::Gaussian && scales.is_none() {
        return Err(parse_err(s.line, "mu, rho and epsilon forms need family = gaussian"));
    }
    // every form reduces to a list of (label suffix, σ)
    let mut entries: Vec<(String, f64)> = Vec::new();
    if let Some(v) = scales {
        entries.extend(v.into_iter().map(|x| (format!("noise_scale={x}"), x)));
    }
    if let Some(v) = mus {
        entries.extend(v.into_iter().map(|m| (format!("mu={m}"), sensitivity / m)));
    }
    if let Some(v) = rhos {
        entries.extend(v.into_iter().map(|r| (format!("rho={r}"), sensitivity / (2.0 * r).sqrt())));
    }
    if let Some(v) = epsilons {
        let d = delta.ok_or_else(|| parse_err(s.line, "epsilon form needs `delta`"))?;
        for e in v {
            let mu = gaussian_mu_for(e, d).map_err(at)?;
            entries.push((format!("eps={e},delta={d}"), sensitivity / mu));
        }
    }
    let single = entries.len() == 1;
    for (suffix, sigma) in entries {
        let spec = MechanismSpec::new(family, sigma)
            .and_then(|m| m.with_sensitivity(sensitivity))
            .and_then(|m| m.with_compositions(compositions))
            .map_err(at)?
            .with_neighborhood(neighborhood);
        out.push(Source {
            label: if single { label.to_string() } else { format!("{label}[{suffix}]") },
            kind: SourceKind::Mechanism(spec),
        });
    }
    c.finish()?;
    Ok(out)
}

fn read(dir: &Path, path: &str) -> Result<String> {
    let p: PathBuf = if Path::new(path).is_absolute() {
        PathBuf::from(path)
    } else {
        dir.join(path)
    };
    std::fs::read_to_string(&p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG3: &str = "
# dominance table
[scenario]
name = fig3

[mechanism]
family = gaussian
noise_scales = 0.4, 0.6

[analysis]
baselines = fixed:0.1, worst-case
methods = fdp, zcdp, rdp-t2
";

    #[test]
    fn parses_scenario() {
        let s = Scenario::parse(FIG3, Path::new(".")).unwrap();
        assert_eq!(s.name, "fig3");
        assert_eq!(s.sources.len(), 2);
        assert_eq!(s.sources[1].label, "mechanism[noise_scale=0.6]");
        assert_eq!(s.baselines, vec![BaselineSpec::Fixed { base: 0.1 }, BaselineSpec::WorstCase]);
        assert_eq!(s.methods, vec![Method::UnifiedFdp, Method::Zcdp, Method::RdpOrder(2.0)]);
    }

    #[test]
    fn multiple_mechanisms_and_forms() {
        let text = "
[mechanism.state]
epsilon = 10.6
delta = 1e-10

[mechanism.zcdp]
family = gaussian
rho = 2

[analysis]
baselines = worst-case
methods = fdp
";
        let s = Scenario::parse(text, Path::new(".")).unwrap();
        assert_eq!(s.sources.len(), 2);
        assert!(matches!(s.sources[0].kind, SourceKind::Curve(_)));
        match &s.sources[1].kind {
            SourceKind::Mechanism(m) => assert!((m.gaussian_mu().unwrap() - 2.0).abs() < 1e-12),
            _ => panic!(),
        }
    }

    #[test]
    fn reports_line_numbers() {
        let cases = [
            ("[analysis\n", 1),
            ("name = a\nbogus\n", 2),
            ("[mechanism]\nfamily = poisson\n", 2),
            ("[mechanism]\nfamily = gaussian\nnoise_scale = x\n", 3),
            ("[mechanism]\nfamily = gaussian\nnoise_scale = 1\ncolour = red\n[analysis]\nbaselines = worst-case\nmethods = fdp\n", 4),
            ("[mechanism]\nfamily = gaussian\nnoise_scale = 1\n[analysis]\nbaselines = fixed:2\nmethods = fdp\n", 5),
            ("[mechanism]\nfamily = gaussian\nnoise_scale = 1\n[analysis]\nbaselines = worst-case\nmethods = magic\n", 6),
            ("a = 1\na = 2\n", 2),
        ];
        for (text, line) in cases {
            match Scenario::parse(text, Path::new(".")) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn requires_baselines_and_methods() {
        let text = "[mechanism]\nfamily = laplace\nnoise_scale = 5\n";
        assert!(Scenario::parse(text, Path::new(".")).is_err());
        let text = "[mechanism]\nfamily = laplace\nmu = 1\n[analysis]\nbaselines = worst-case\nmethods = fdp\n";
        assert!(Scenario::parse(text, Path::new(".")).is_err());
    }
}
