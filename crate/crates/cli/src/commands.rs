use crate::config::{Scenario, Source, SourceKind};
use crate::{BoundArgs, CalibrateArgs, CurveArgs, Format, MechanismArgs, QueriesArgs, TradeoffArgs, VerifyArgs};
use fdp_risk::accountant::{self, Family, MechanismSpec, Neighborhood};
use fdp_risk::calibrate::{self, CalibrationRequest, Method, Target};
use fdp_risk::risk::{self, BaselineSpec, RiskReport};
use fdp_risk::studies;
use fdp_risk::tradeoff::{self, PrivacyProfile, TradeoffCurve};
use fdp_risk::{grid, Error};
use serde_json::json;
use std::fmt::{self, Write as _};
use std::io::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
    Verification(String),
    Write(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Infeasible { .. }) => 3,
            CliError::Core(Error::NonMonotone { .. } | Error::InstanceTooLarge { .. }) => 1,
            CliError::Core(_) | CliError::Usage(_) => 2,
            CliError::Verification(_) => 4,
            CliError::Write(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) | CliError::Verification(m) | CliError::Write(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub struct Output {
    format: Format,
    path: Option<PathBuf>,
    dir: Option<PathBuf>,
}

impl Output {
    pub fn new(format: Format, path: Option<PathBuf>, dir: Option<PathBuf>) -> Self {
        Output { format, path, dir }
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        match &self.dir {
            Some(d) if p.is_relative() => d.join(p),
            _ => p.to_path_buf(),
        }
    }

    /// Write to `--output`, else `fallback` (a scenario's output key), else
    /// stdout.
    fn emit(&self, text: &str, fallback: Option<&str>) -> Result<()> {
        let target = self.path.clone().or_else(|| fallback.map(PathBuf::from));
        match target {
            None => {
                let mut stdout = std::io::stdout().lock();
                match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                    Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                        Err(CliError::Write(format!("stdout: {e}")))
                    }
                    _ => Ok(()),
                }
            }
            Some(p) => {
                let p = self.resolve(&p);
                if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(parent)
                        .map_err(|e| CliError::Write(format!("{}: {e}", parent.display())))?;
                }
                std::fs::write(&p, text).map_err(|e| CliError::Write(format!("{}: {e}", p.display())))?;
                eprintln!("wrote {}", p.display());
                Ok(())
            }
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Core(Error::Io(format!("{}: {e}", path.display()))))
}

fn mechanism_from(args: &MechanismArgs, noise_scale: Option<f64>) -> Result<MechanismSpec> {
    let family: Family = args
        .mechanism
        .as_deref()
        .ok_or_else(|| CliError::Usage("--mechanism is required".into()))?
        .parse()?;
    let neighborhood: Neighborhood = args.neighborhood.parse()?;
    let scale = noise_scale
        .or(args.noise_scale)
        .ok_or_else(|| CliError::Usage("--noise-scale is required".into()))?;
    Ok(MechanismSpec::new(family, scale)?
        .with_sensitivity(args.sensitivity)?
        .with_compositions(args.compositions)?
        .with_neighborhood(neighborhood))
}

fn source_from(args: &CurveArgs) -> Result<SourceKind> {
    let given = [
        args.mechanism.mechanism.is_some(),
        args.gaussian_mu.is_some(),
        args.laplace_eps.is_some(),
        args.epsilon.is_some() || args.delta.is_some(),
        args.profile.is_some(),
        args.curve.is_some(),
    ]
    .iter()
    .filter(|&&b| b)
    .count();
    if given != 1 {
        return Err(CliError::Usage(
            "give exactly one of --mechanism, --gaussian-mu, --laplace-eps, --epsilon/--delta, --profile, --curve".into(),
        ));
    }
    if args.mechanism.mechanism.is_some() {
        return Ok(SourceKind::Mechanism(mechanism_from(&args.mechanism, None)?));
    }
    let curve = if let Some(mu) = args.gaussian_mu {
        TradeoffCurve::gaussian(mu)?
    } else if let Some(e) = args.laplace_eps {
        TradeoffCurve::laplace(e)?
    } else if let Some(p) = &args.profile {
        let profile = PrivacyProfile::from_csv(&read(p)?)?;
        tradeoff::curve_from_profile(&profile).with_provenance(format!("profile({})", p.display()))
    } else if let Some(p) = &args.curve {
        TradeoffCurve::from_csv(&read(p)?)?.with_provenance(format!("curve({})", p.display()))
    } else {
        match (args.epsilon, args.delta) {
            (Some(e), Some(d)) => TradeoffCurve::from_epsilon_delta(e, d)?,
            _ => return Err(CliError::Usage("--epsilon and --delta go together".into())),
        }
    };
    Ok(SourceKind::Curve(curve))
}

fn curve_of_source(kind: &SourceKind) -> Result<TradeoffCurve> {
    match kind {
        SourceKind::Mechanism(m) => Ok(accountant::curve_of(m)?),
        SourceKind::Curve(c) => Ok(c.clone()),
    }
}

pub fn tradeoff(args: &TradeoffArgs, out: &Output) -> Result<()> {
    let curve = curve_of_source(&source_from(&args.source)?)?;
    let points: Vec<(f64, f64)> = if args.sample {
        grid::default_alpha_grid().into_iter().map(|a| (a, curve.eval(a))).collect()
    } else {
        curve.knots()
    };
    let text = match out.format {
        Format::Csv => {
            let mut s = format!("# source: {}\nalpha,f\n", curve.provenance());
            for (a, y) in &points {
                let _ = writeln!(s, "{a:.16e},{y:.16e}");
            }
            s
        }
        Format::Json => {
            let v = json!({
                "source": curve.provenance(),
                "kind": if args.sample { "samples" } else { "knots" },
                "points": points.iter().map(|&(a, y)| [a, y]).collect::<Vec<_>>(),
            });
            format!("{}\n", serde_json::to_string_pretty(&v).unwrap())
        }
    };
    out.emit(&text, None)
}

enum Row {
    Ok(RiskReport),
    Failed {
        source: String,
        method: String,
        baseline: String,
        message: String,
    },
}

fn bound_row(source: &Source, baseline: &BaselineSpec, method: Method) -> Row {
    let report = match (&source.kind, method) {
        (SourceKind::Curve(c), Method::UnifiedFdp) => risk::fdp_report(c, baseline),
        (SourceKind::Curve(_), m) => Err(Error::Unsupported {
            method: m.to_string(),
            family: "curve source".into(),
        }),
        (SourceKind::Mechanism(spec), m) => calibrate::method_report(spec, baseline, m),
    };
    match report {
        Ok(r) => Row::Ok(r.with_param("source", &source.label)),
        Err(e) => Row::Failed {
            source: source.label.clone(),
            method: method.to_string(),
            baseline: baseline.label(),
            message: e.to_string(),
        },
    }
}

fn parse_all<T: std::str::FromStr<Err = Error>>(items: &[String], default: &str) -> Result<Vec<T>> {
    if items.is_empty() {
        return Ok(vec![default.parse()?]);
    }
    items.iter().map(|s| s.parse().map_err(CliError::Core)).collect()
}

pub fn bound(args: &BoundArgs, out: &Output) -> Result<()> {
    let scenario = match &args.scenario {
        Some(p) => Scenario::from_file(p)?,
        None => Scenario {
            name: "cli".into(),
            output: None,
            sources: vec![Source {
                label: "cli".into(),
                kind: source_from(&args.source)?,
            }],
            baselines: parse_all(&args.baselines, "worst-case")?,
            methods: parse_all(&args.methods, "fdp")?,
        },
    };
    let mut rows = Vec::new();
    for source in &scenario.sources {
        for baseline in &scenario.baselines {
            for &method in &scenario.methods {
                rows.push(bound_row(source, baseline, method));
            }
        }
    }
    let text = match out.format {
        Format::Csv => {
            let mut s = format!("{}\n", RiskReport::CSV_HEADER);
            for r in &rows {
                match r {
                    Row::Ok(rep) => s.push_str(&rep.csv_row()),
                    Row::Failed {
                        source,
                        method,
                        baseline,
                        message,
                    } => {
                        let params = format!("source={source};error={message}");
                        let _ = write!(s, "{},{},error,error,{}", csv_field(method), csv_field(baseline), csv_field(&params));
                    }
                }
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let items: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| match r {
                    Row::Ok(rep) => serde_json::to_value(rep).unwrap(),
                    Row::Failed {
                        source,
                        method,
                        baseline,
                        message,
                    } => json!({"source": source, "method": method, "baseline": baseline, "error": message}),
                })
                .collect();
            let v = json!({"scenario": scenario.name, "rows": items});
            format!("{}\n", serde_json::to_string_pretty(&v).unwrap())
        }
    };
    out.emit(&text, scenario.output.as_deref())?;
    let failed = rows.iter().filter(|r| matches!(r, Row::Failed { .. })).count();
    for r in &rows {
        if let Row::Failed { source, method, message, .. } = r {
            eprintln!("warning: {source}/{method}: {message}");
        }
    }
    if failed == rows.len() {
        return Err(CliError::Usage("every row failed".into()));
    }
    Ok(())
}

pub fn calibrate(args: &CalibrateArgs, out: &Output) -> Result<()> {
    let target = match (args.target_adv, args.target_success) {
        (Some(v), None) => Target::Advantage(v),
        (None, Some(v)) => Target::Success(v),
        _ => return Err(CliError::Usage("give one of --target-adv or --target-success".into())),
    };
    let family: Family = args
        .mechanism
        .mechanism
        .as_deref()
        .ok_or_else(|| CliError::Usage("--mechanism is required".into()))?
        .parse()?;
    // the noise scale is what gets calibrated; any valid placeholder works
    let placeholder = match family {
        Family::RandomizedResponse => 0.25,
        _ => args.mechanism.sensitivity,
    };
    let spec = mechanism_from(&args.mechanism, Some(placeholder))?;
    let baseline: BaselineSpec = args.baseline.parse()?;
    let methods: Vec<Method> = parse_all(&args.methods, "fdp")?;
    let bracket = match &args.bracket {
        None => None,
        Some(b) => {
            let parts: Vec<f64> = b
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| CliError::Usage(format!("bad --bracket `{b}`")))?;
            match parts.as_slice() {
                [lo, hi] => Some((*lo, *hi)),
                _ => return Err(CliError::Usage(format!("bad --bracket `{b}`"))),
            }
        }
    };

    struct Done {
        method: Method,
        result: std::result::Result<calibrate::Calibration, Error>,
    }
    let mut done = Vec::new();
    for &method in &methods {
        let mut req = CalibrationRequest::new(spec.clone(), target, baseline, method)?;
        if let Some(t) = args.tolerance {
            req = req.with_tolerance(t)?;
        }
        if let Some((lo, hi)) = bracket {
            req = req.with_bracket(lo, hi)?;
        }
        let result = calibrate::calibrate_noise(&req);
        match &result {
            Ok(_) | Err(Error::Infeasible { .. }) => {}
            Err(_) => return Err(CliError::Core(result.unwrap_err())),
        }
        done.push(Done { method, result });
    }
    let first = done.iter().find_map(|d| d.result.as_ref().ok().map(|c| c.noise_scale));
    let (target_kind, target_value) = match target {
        Target::Advantage(v) => ("advantage", v),
        Target::Success(v) => ("success", v),
    };
    let params = format!(
        "mechanism={};sensitivity={};compositions={};neighborhood={}",
        spec.family, spec.sensitivity, spec.compositions, spec.neighborhood
    );
    let text = match out.format {
        Format::Csv => {
            let mut s = String::from("method,baseline,target,noise_scale,risk,status,ratio_to_first,params\n");
            for d in &done {
                let target_col = format!("{target_kind}={target_value}");
                match &d.result {
                    Ok(c) => {
                        let status = if c.trivial { "trivial" } else { "ok" };
                        let ratio = first.map(|f| c.noise_scale / f).unwrap_or(f64::NAN);
                        let _ = writeln!(
                            s,
                            "{},{},{target_col},{:.10e},{:.10e},{status},{ratio:.6},{}",
                            d.method,
                            csv_field(&baseline.label()),
                            c.noise_scale,
                            c.risk,
                            csv_field(&params)
                        );
                    }
                    Err(e) => {
                        let _ = writeln!(
                            s,
                            "{},{},{target_col},,,infeasible,,{}",
                            d.method,
                            csv_field(&baseline.label()),
                            csv_field(&format!("{params};error={e}"))
                        );
                    }
                }
            }
            s
        }
        Format::Json => {
            let items: Vec<serde_json::Value> = done
                .iter()
                .map(|d| match &d.result {
                    Ok(c) => json!({
                        "method": d.method.to_string(),
                        "noise_scale": c.noise_scale,
                        "risk": c.risk,
                        "trivial": c.trivial,
                        "evaluations": c.evaluations,
                        "ratio_to_first": first.map(|f| c.noise_scale / f),
                    }),
                    Err(e) => json!({"method": d.method.to_string(), "infeasible": true, "error": e.to_string()}),
                })
                .collect();
            let v = json!({
                "mechanism": spec,
                "baseline": baseline,
                "target": {"kind": target_kind, "value": target_value},
                "results": items,
            });
            format!("{}\n", serde_json::to_string_pretty(&v).unwrap())
        }
    };
    out.emit(&text, None)?;
    for d in &done {
        if let Ok(c) = &d.result {
            if c.trivial {
                eprintln!("note: {} target is met at the lower end of the bracket", d.method);
            }
        }
    }
    if let Some(d) = done.iter().find(|d| d.result.is_err()) {
        return Err(CliError::Core(d.result.clone().unwrap_err()));
    }
    Ok(())
}

pub fn queries(args: &QueriesArgs, out: &Output) -> Result<()> {
    if args.k_max < 1 {
        return Err(CliError::Usage("--k-max must be at least 1".into()));
    }
    let t = studies::queries_table(args.b, args.k_max, args.base, args.target_adv, args.delta_std)?;
    let text = match out.format {
        Format::Csv => t.to_csv(),
        Format::Json => {
            let mut v = serde_json::to_value(&t).unwrap();
            v["max_k_fdp"] = json!(t.max_k_fdp());
            v["max_k_standard"] = json!(t.max_k_standard());
            format!("{}\n", serde_json::to_string_pretty(&v).unwrap())
        }
    };
    out.emit(&text, None)?;
    eprintln!(
        "max feasible k: fdp={} standard={} (b={}, base={}, target={}, delta_std={:e})",
        t.max_k_fdp(),
        t.max_k_standard(),
        args.b,
        args.base,
        args.target_adv,
        args.delta_std
    );
    Ok(())
}

pub fn verify(args: &VerifyArgs, out: &Output) -> Result<()> {
    let cases = studies::verify_corpus(args.count, args.seed)?;
    let mut curve_rows = Vec::new();
    for p in &args.curves {
        let knots = tradeoff::parse_curve_csv(&read(p)?)?;
        let problems = tradeoff::validate_knots(&knots);
        for m in &problems {
            eprintln!("{}: {m}", p.display());
        }
        curve_rows.push((format!("curve({})", p.display()), problems.is_empty()));
    }
    let failed = cases.iter().filter(|c| !c.passed()).count() + curve_rows.iter().filter(|r| !r.1).count();
    let total = cases.len() + curve_rows.len();
    let text = match out.format {
        Format::Csv => {
            let mut s = String::from("case,attack_success,baseline,bound,gap,curve_ok,passed\n");
            for c in &cases {
                let _ = writeln!(
                    s,
                    "{},{:.16e},{:.16e},{:.16e},{:.6e},{},{}",
                    csv_field(&c.name),
                    c.attack_success,
                    c.baseline,
                    c.bound,
                    c.gap(),
                    c.curve_ok,
                    c.passed()
                );
            }
            for (name, ok) in &curve_rows {
                let _ = writeln!(s, "{},,,,,{ok},{ok}", csv_field(name));
            }
            s
        }
        Format::Json => {
            let mut items: Vec<serde_json::Value> = cases
                .iter()
                .map(|c| {
                    json!({
                        "case": c.name,
                        "attack_success": c.attack_success,
                        "baseline": c.baseline,
                        "bound": c.bound,
                        "gap": c.gap(),
                        "curve_ok": c.curve_ok,
                        "passed": c.passed(),
                    })
                })
                .collect();
            items.extend(curve_rows.iter().map(|(n, ok)| json!({"case": n, "curve_ok": ok, "passed": ok})));
            let v = json!({"total": total, "failed": failed, "cases": items});
            format!("{}\n", serde_json::to_string_pretty(&v).unwrap())
        }
    };
    out.emit(&text, None)?;
    eprintln!("verify: {}/{total} passed", total - failed);
    if failed > 0 {
        return Err(CliError::Verification(format!("{failed} of {total} cases failed")));
    }
    Ok(())
}
