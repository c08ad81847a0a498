use clap::{Args, Parser, Subcommand, ValueEnum};
use polyform::bars::{self, BarGraphStructure};
use polyform::codec::Container;
use polyform::grid::{self, Dir, Format, Polyomino};
use polyform::query::{check_against_oracle, HandleMap, Navigable, QueryError};
use polyform::sliced::{SlicedStructure, Thickness};
use polyform::{CoveringStructure, LabeledBfsTree, SpaceReport, Structure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

/// A failure carrying the process exit code.
#[derive(Debug)]
struct Fail(u8, String);

const EXIT_MISMATCH: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_PARAMS: u8 = 3;
const EXIT_CELL: u8 = 4;
const EXIT_UNSUPPORTED: u8 = 5;

fn fail<T>(code: u8, msg: impl Into<String>) -> Result<T, Fail> {
    Err(Fail(code, msg.into()))
}

#[derive(Parser)]
#[command(name = "polyform", version, about = "Space-efficient polyomino and bar-graph encodings")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Encode a polyomino into a container file
    Encode(EncodeArgs),
    /// Answer one query against a container
    Query(QueryArgs),
    /// Compare random inputs against the brute-force oracle
    Check(CheckArgs),
    /// Print the space report of a container or generated input (JSON line)
    Stats(StatsArgs),
    /// Measure query latency (JSON lines)
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum InFormat {
    Auto,
    Ascii,
    Coords,
    Composition,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Auto,
    Bfs,
    #[value(alias = "covering")]
    Nice,
    Sliced,
    #[value(alias = "bars")]
    Bar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Profile {
    MinSpace,
    ConstVis,
}

#[derive(Args, Clone)]
struct BuildOpts {
    #[arg(long, value_enum, default_value = "auto")]
    kind: KindArg,
    /// Slice thickness for the sliced structure
    #[arg(long, conflicts_with_all = ["epsilon", "profile"])]
    f: Option<usize>,
    /// ε for the const-vis profile (f = ceil(ε·n/3))
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_enum)]
    profile: Option<Profile>,
    /// Encode the polyomino rotated by 90°; coordinates and directions then
    /// refer to the rotated shape
    #[arg(long)]
    rotate: bool,
    /// BFS root as "x,y" (default: leftmost cell of the top row)
    #[arg(long)]
    root: Option<String>,
    /// Force the bar-graph block size k
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct EncodeArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    format: InFormat,
    #[command(flatten)]
    build: BuildOpts,
    /// Also write the "x y id" handle map to OUTPUT.map
    #[arg(long)]
    emit_map: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Op {
    Left,
    Right,
    Up,
    Down,
    Adj,
    Deg,
    Vis,
    Relpos,
}

#[derive(Args)]
struct QueryArgs {
    container: PathBuf,
    #[arg(long, value_enum)]
    op: Op,
    /// Cell as "x,y" (needs the map sidecar, except for bar graphs) or "#id"
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// Handle map sidecar (default: CONTAINER.map when present)
    #[arg(long)]
    map: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, value_enum, default_value = "auto")]
    kind: KindArg,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, env = "POLYFORM_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    max_n: usize,
    /// Bar graphs: every composition of every n ≤ max-n, k ∈ {2,3,4}
    #[arg(long)]
    exhaustive: bool,
    /// Slice thickness for sliced checks (default: random per trial)
    #[arg(long)]
    f: Option<usize>,
}

#[derive(Args)]
struct Source {
    /// Container file
    container: Option<PathBuf>,
    /// Generator instead of a container: composition:N[:P], strip:H:N,
    /// staircase:STEPS, subset:W:H:DENSITY, connected:N
    #[arg(long, conflicts_with = "container")]
    gen: Option<String>,
    #[arg(long, env = "POLYFORM_SEED", default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    build: BuildOpts,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    source: Source,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    source: Source,
    /// Timed queries per operation
    #[arg(long, default_value_t = 1_000_000)]
    queries: usize,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.cmd {
        Cmd::Encode(a) => encode(a),
        Cmd::Query(a) => query(a),
        Cmd::Check(a) => check(a),
        Cmd::Stats(a) => stats(a),
        Cmd::Bench(a) => bench(a),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

// ---- building ----

fn read_polyomino(path: &Path, format: InFormat) -> Result<Polyomino, Fail> {
    let text = std::fs::read_to_string(path).or_else(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    let format = match format {
        InFormat::Ascii => Format::Ascii,
        InFormat::Coords => Format::Coords,
        InFormat::Composition => Format::Composition,
        InFormat::Auto => {
            let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
            if text.chars().all(|c| "#. \r\n".contains(c)) {
                Format::Ascii
            } else if lines.len() == 1 && lines[0].split_whitespace().count() != 2 {
                Format::Composition
            } else {
                Format::Coords
            }
        }
    };
    Polyomino::parse(&text, format).or_else(|e| fail(EXIT_PARSE, e.to_string()))
}

fn parse_xy(s: &str) -> Option<(i64, i64)> {
    let (x, y) = s.split_once(',')?;
    Some((x.trim().parse().ok()?, y.trim().parse().ok()?))
}

fn thickness(o: &BuildOpts) -> Result<Thickness, Fail> {
    Ok(match (o.f, o.profile, o.epsilon) {
        (Some(0), _, _) => return fail(EXIT_PARAMS, "--f must be at least 1"),
        (Some(f), _, _) => Thickness::Fixed(f),
        (None, Some(Profile::ConstVis), e) | (None, None, e @ Some(_)) => Thickness::ConstVis(e.unwrap_or(0.3)),
        (None, _, None) | (None, Some(Profile::MinSpace), _) => Thickness::MinSpace,
    })
}

fn resolve_kind(p: &Polyomino, k: KindArg) -> KindArg {
    if k != KindArg::Auto {
        return k;
    }
    let c = p.classify();
    if c.is_bar_graph {
        KindArg::Bar
    } else if c.height <= (p.n() as f64).sqrt().ceil() as usize {
        KindArg::Nice
    } else {
        KindArg::Sliced
    }
}

fn build(p: &Polyomino, o: &BuildOpts) -> Result<Structure, Fail> {
    let rotated;
    let p = if o.rotate {
        rotated = p.rotate();
        &rotated
    } else {
        p
    };
    Ok(match resolve_kind(p, o.kind) {
        KindArg::Bfs => {
            let root = match &o.root {
                Some(r) => parse_xy(r).ok_or_else(|| Fail(EXIT_PARAMS, format!("bad --root {r:?}")))?,
                None => {
                    let top = p.height() as i64 - 1;
                    ((0..).find(|&x| p.contains(x, top)).unwrap(), top)
                }
            };
            Structure::Bfs(LabeledBfsTree::build(p, root).or_else(|e| fail(EXIT_PARAMS, e.to_string()))?)
        }
        KindArg::Nice => {
            if p.height() > p.n() / 4 {
                eprintln!(
                    "warning: strip height {} exceeds n/4 = {}; the sliced structure is smaller",
                    p.height(),
                    p.n() / 4
                );
            }
            Structure::Covering(CoveringStructure::build(p))
        }
        KindArg::Sliced => Structure::Sliced(
            SlicedStructure::build(p, thickness(o)?).or_else(|e| fail(EXIT_PARAMS, e.to_string()))?,
        ),
        KindArg::Bar => {
            let Some(comp) = p.composition() else {
                return fail(EXIT_PARAMS, "input is not a bar graph");
            };
            build_bars(&comp, o.k)?
        }
        KindArg::Auto => unreachable!(),
    })
}

fn build_bars(comp: &[usize], k: Option<usize>) -> Result<Structure, Fail> {
    let g = match k {
        Some(k) if !(1..=8).contains(&k) => return fail(EXIT_PARAMS, "--k must be in 1..=8"),
        Some(k) => BarGraphStructure::build_with_k(comp, k),
        None => BarGraphStructure::build(comp),
    };
    Ok(Structure::Bars(g.or_else(|e| fail(EXIT_PARAMS, e.to_string()))?))
}

fn encode(a: EncodeArgs) -> Result<(), Fail> {
    let p = read_polyomino(&a.input, a.format)?;
    let s = build(&p, &a.build)?;
    let bytes = s.to_container().to_bytes();
    std::fs::write(&a.output, bytes).or_else(|e| fail(EXIT_PARAMS, format!("{}: {e}", a.output.display())))?;
    if a.emit_map {
        let map = s.handle_map().expect("freshly built structures carry a map");
        let path = map_path(&a.output);
        std::fs::write(&path, map.to_sidecar()).or_else(|e| fail(EXIT_PARAMS, format!("{}: {e}", path.display())))?;
    }
    let mut line = report_json(&s.space_report());
    if let Structure::Sliced(ss) = &s {
        line["f"] = json!(ss.f());
        line["i_star"] = json!(ss.i_star());
        line["slice_count"] = json!(ss.slice_count());
    }
    println!("{line}");
    Ok(())
}

fn map_path(container: &Path) -> PathBuf {
    let mut s = container.as_os_str().to_owned();
    s.push(".map");
    PathBuf::from(s)
}

fn load(path: &Path) -> Result<Structure, Fail> {
    let bytes = std::fs::read(path).or_else(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    let c = Container::from_bytes(&bytes).or_else(|e| fail(EXIT_PARSE, e.to_string()))?;
    Structure::from_container(&c).or_else(|e| fail(EXIT_PARSE, e.to_string()))
}

// ---- query ----

fn navigable(s: &Structure) -> Option<&(dyn Navigable + Sync)> {
    match s {
        Structure::Bfs(_) => None,
        Structure::Covering(c) => Some(c),
        Structure::Sliced(c) => Some(c),
        Structure::Bars(c) => Some(c),
    }
}

fn cell_fail(e: QueryError) -> Fail {
    match e {
        QueryError::Unsupported => Fail(EXIT_UNSUPPORTED, e.to_string()),
        e => Fail(EXIT_CELL, e.to_string()),
    }
}

fn query(a: QueryArgs) -> Result<(), Fail> {
    let s = load(&a.container)?;
    let map_file = a.map.clone().or_else(|| Some(map_path(&a.container)).filter(|p| p.exists()));
    let map: Option<HandleMap> = match map_file {
        Some(f) => {
            let text = std::fs::read_to_string(&f).or_else(|e| fail(EXIT_PARSE, format!("{}: {e}", f.display())))?;
            Some(HandleMap::from_sidecar(&text).ok_or_else(|| Fail(EXIT_PARSE, "malformed map sidecar".into()))?)
        }
        None => match &s {
            Structure::Bars(_) => s.handle_map(),
            _ => None,
        },
    };
    let by_coord = !a.a.starts_with('#');
    let resolve = |r: &str| -> Result<usize, Fail> {
        if let Some(id) = r.strip_prefix('#') {
            return id.parse().or_else(|_| fail(EXIT_CELL, format!("bad handle {r:?}")));
        }
        let c = parse_xy(r).ok_or_else(|| Fail(EXIT_CELL, format!("bad cell {r:?}; use \"x,y\" or \"#id\"")))?;
        let m = map.as_ref().ok_or_else(|| Fail(EXIT_CELL, "coordinates need a map sidecar (--emit-map)".into()))?;
        m.handle(c).ok_or_else(|| Fail(EXIT_CELL, format!("({}, {}) is not a cell", c.0, c.1)))
    };
    let x = resolve(&a.a)?;
    let second = || -> Result<usize, Fail> {
        match &a.b {
            Some(b) => resolve(b),
            None => fail(EXIT_PARAMS, "this op needs --b"),
        }
    };
    let show = |h: Option<usize>| match h {
        None => "null".to_string(),
        Some(h) => match (&map, by_coord) {
            (Some(m), true) => m.coord(h).map_or(format!("#{h}"), |(x, y)| format!("{x},{y}")),
            _ => format!("#{h}"),
        },
    };
    let answer = match (&s, a.op) {
        (Structure::Bfs(t), Op::Relpos) => {
            let (dx, dy) = t.relative_position(x).map_err(cell_fail)?;
            format!("{dx} {dy}")
        }
        (Structure::Bfs(t), Op::Adj) => t.adjacent(x, second()?).map_err(cell_fail)?.to_string(),
        (Structure::Bfs(_), _) | (_, Op::Relpos) => {
            return fail(EXIT_UNSUPPORTED, format!("{:?} is not supported by kind {}", a.op, s.kind().name()))
        }
        (s, op) => {
            let nav = navigable(s).unwrap();
            match op {
                Op::Left => show(nav.neighbor(x, Dir::Left).map_err(cell_fail)?),
                Op::Right => show(nav.neighbor(x, Dir::Right).map_err(cell_fail)?),
                Op::Up => show(nav.neighbor(x, Dir::Up).map_err(cell_fail)?),
                Op::Down => show(nav.neighbor(x, Dir::Down).map_err(cell_fail)?),
                Op::Deg => nav.degree(x).map_err(cell_fail)?.to_string(),
                Op::Adj => nav.adjacent(x, second()?).map_err(cell_fail)?.to_string(),
                Op::Vis => nav.is_visible(x, second()?).map_err(cell_fail)?.to_string(),
                Op::Relpos => unreachable!(),
            }
        }
    };
    println!("{answer}");
    Ok(())
}

// ---- check ----

fn check(a: CheckArgs) -> Result<(), Fail> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let kind = match a.kind {
        KindArg::Auto => None,
        k => Some(k),
    };
    let mut queries = 0usize;
    let mut inputs = 0usize;
    let mismatch = |what: String| Fail(EXIT_MISMATCH, format!("FAIL {what}"));

    if a.exhaustive {
        if kind != Some(KindArg::Bar) {
            return fail(EXIT_PARAMS, "--exhaustive is only defined for --kind bar");
        }
        if a.max_n > 20 {
            return fail(EXIT_PARAMS, "--exhaustive needs --max-n ≤ 20");
        }
        for n in 1..=a.max_n {
            for bits in 0..1u64 << (n - 1) {
                let comp = composition_from_bits(bits, n);
                for k in [2, 3, 4] {
                    queries += check_bars(&comp, Some(k)).map_err(mismatch)?;
                    inputs += 1;
                }
            }
        }
    } else {
        for t in 0..a.trials {
            let which = kind.unwrap_or([KindArg::Bfs, KindArg::Nice, KindArg::Sliced, KindArg::Bar][t % 4]);
            let max_n = a.max_n.max(1);
            match which {
                KindArg::Bar => {
                    let n = rng.gen_range(1..=max_n);
                    let comp = grid::random_composition(&mut rng, n);
                    let k = rng.gen_range(1..=4);
                    queries += check_bars(&comp, Some(k)).map_err(mismatch)?;
                }
                KindArg::Bfs => {
                    let n = rng.gen_range(1..=max_n);
                    let p = grid::random_connected(&mut rng, n);
                    let cells: Vec<_> = p.cells().collect();
                    let root = cells[rng.gen_range(0..cells.len())];
                    let t = LabeledBfsTree::build(&p, root).expect("connected");
                    let m = t.handle_map().unwrap();
                    for &c in &cells {
                        for &d in &cells {
                            let got = t.adjacent(m.handle(c).unwrap(), m.handle(d).unwrap()).unwrap();
                            if got != p.oracle_adjacent(c, d).unwrap() {
                                return Err(mismatch(format!("bfs adj{c:?}{d:?} on\n{}", p.to_ascii())));
                            }
                            queries += 1;
                        }
                    }
                }
                KindArg::Nice | KindArg::Sliced => {
                    let p = grid::random_mixed(&mut rng, max_n);
                    let s: Box<dyn Navigable> = if which == KindArg::Nice {
                        Box::new(CoveringStructure::build(&p))
                    } else {
                        let f = a.f.unwrap_or_else(|| rng.gen_range(1..=8));
                        Box::new(SlicedStructure::build(&p, Thickness::Fixed(f)).unwrap())
                    };
                    queries += check_against_oracle(&p, &*s, None)
                        .map_err(|m| mismatch(format!("{}: {m} on\n{}", kind_label(which), p.to_ascii())))?;
                }
                KindArg::Auto => unreachable!(),
            }
            inputs += 1;
        }
    }
    println!(
        "PASS kind={} inputs={inputs} queries={queries} seed={} max_n={}{}",
        kind.map_or("all", kind_label),
        a.seed,
        a.max_n,
        if a.exhaustive { " exhaustive" } else { "" }
    );
    Ok(())
}

fn kind_label(k: KindArg) -> &'static str {
    match k {
        KindArg::Auto => "auto",
        KindArg::Bfs => "bfs",
        KindArg::Nice => "nice",
        KindArg::Sliced => "sliced",
        KindArg::Bar => "bar",
    }
}

fn composition_from_bits(bits: u64, n: usize) -> Vec<usize> {
    let mut c = vec![1usize];
    for t in 1..n {
        if bits >> (n - 1 - t) & 1 == 1 {
            c.push(1);
        } else {
            *c.last_mut().unwrap() += 1;
        }
    }
    c
}

/// Every neighbor and every visibility pair of a bar graph against the oracle.
fn check_bars(comp: &[usize], k: Option<usize>) -> Result<usize, String> {
    let g = match k {
        Some(k) => BarGraphStructure::build_with_k(comp, k),
        None => BarGraphStructure::build(comp),
    }
    .unwrap();
    let p = Polyomino::from_composition(comp).unwrap();
    let m = bars::handle_map(comp);
    let n = g.n();
    let mut count = 0;
    for x in 1..=n {
        let c = m.coord(x).unwrap();
        for d in Dir::ALL {
            let want = p.oracle_neighbor(c, d).unwrap().map(|c| m.handle(c).unwrap());
            if g.neighbor(x, d) != Ok(want) {
                return Err(format!("bar {d:?}(#{x}) on {comp:?} k={}", g.k()));
            }
            count += 1;
        }
    }
    let mut one = |a: usize, b: usize| -> Result<(), String> {
        let want = p.oracle_visible(m.coord(a).unwrap(), m.coord(b).unwrap()).unwrap();
        if g.is_visible(a, b) != Ok(want) {
            return Err(format!("bar vis(#{a}, #{b}) on {comp:?} k={}: expected {want}", g.k()));
        }
        count += 1;
        Ok(())
    };
    for a in 1..=n {
        for b in 1..=n {
            one(a, b)?;
        }
    }
    Ok(count)
}

// ---- stats / bench ----

fn generate(spec: &str, seed: u64) -> Result<Polyomino, Fail> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |i: usize| -> Result<usize, Fail> {
        parts.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| Fail(EXIT_PARSE, format!("bad generator {spec:?}")))
    };
    let real = |i: usize| -> Result<f64, Fail> {
        parts.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| Fail(EXIT_PARSE, format!("bad generator {spec:?}")))
    };
    let p = match parts[0] {
        "composition" => {
            let n = num(1)?;
            let comp = if parts.len() > 2 {
                grid::random_composition_with(&mut rng, n, real(2)?)
            } else {
                grid::random_composition(&mut rng, n)
            };
            Polyomino::from_composition(&comp)
        }
        "strip" => Ok(grid::random_strip(&mut rng, num(1)?, num(2)?)),
        "staircase" => Ok(grid::staircase(num(1)?)),
        "subset" => Ok(grid::random_subset(&mut rng, num(1)?, num(2)?, real(3)?)),
        "connected" => Ok(grid::random_connected(&mut rng, num(1)?)),
        _ => return fail(EXIT_PARSE, format!("unknown generator {spec:?}")),
    };
    p.or_else(|e| fail(EXIT_PARSE, e.to_string()))
}

fn source(s: &Source) -> Result<Structure, Fail> {
    match (&s.container, &s.gen) {
        (Some(c), _) => load(c),
        (None, Some(g)) => build(&generate(g, s.seed)?, &s.build),
        (None, None) => fail(EXIT_PARSE, "give a container or --gen"),
    }
}

fn report_json(r: &SpaceReport) -> serde_json::Value {
    let sections: serde_json::Map<String, serde_json::Value> =
        r.sections.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    json!({
        "kind": r.kind.name(),
        "n": r.n,
        "payload_bits": r.payload_bits,
        "bits_per_cell": r.bits_per_cell,
        "sections": sections,
        "runtime_index_bits": r.runtime_index_bits,
    })
}

fn stats(a: StatsArgs) -> Result<(), Fail> {
    let s = source(&a.source)?;
    println!("{}", report_json(&s.space_report()));
    Ok(())
}

/// Median and 99th percentile of per-query nanoseconds, measured over
/// batches of `BATCH` queries to keep timer overhead out of the numbers.
const BATCH: usize = 32;

fn percentiles(mut v: Vec<f64>) -> (f64, f64) {
    v.sort_by(|a, b| a.total_cmp(b));
    let at = |q: f64| v[((v.len() - 1) as f64 * q).round() as usize];
    (at(0.5), at(0.99))
}

fn time_op<F: Fn(usize, usize) -> usize + Sync>(ids: &[(usize, usize)], threads: usize, f: F) -> (f64, f64, usize) {
    // warm-up pass
    let mut sink = 0usize;
    for &(a, b) in ids.iter().take(ids.len().min(100_000)) {
        sink = sink.wrapping_add(f(a, b));
    }
    let chunk = ids.len().div_ceil(threads.max(1)).max(1);
    let samples: Vec<f64> = std::thread::scope(|sc| {
        let handles: Vec<_> = ids
            .chunks(chunk)
            .map(|part| {
                let f = &f;
                sc.spawn(move || {
                    let mut out = Vec::with_capacity(part.len() / BATCH + 1);
                    let mut local = 0usize;
                    for batch in part.chunks(BATCH) {
                        let t = Instant::now();
                        for &(a, b) in batch {
                            local = local.wrapping_add(f(a, b));
                        }
                        out.push(t.elapsed().as_nanos() as f64 / batch.len() as f64);
                    }
                    std::hint::black_box(local);
                    out
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    });
    let (med, p99) = percentiles(samples);
    (med, p99, std::hint::black_box(sink))
}

fn bench(a: BenchArgs) -> Result<(), Fail> {
    let s = source(&a.source)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.source.seed);
    let valid: Vec<usize> = match &s {
        Structure::Bars(g) => (1..=g.n()).collect(),
        Structure::Bfs(t) => (1..=t.cell_count()).collect(),
        Structure::Covering(c) => (1..=c.node_count()).filter(|&v| !c.is_dummy(v)).collect(),
        Structure::Sliced(c) => (1..=c.base().node_count()).filter(|&v| !c.base().is_dummy(v)).collect(),
    };
    let q = a.queries.max(BATCH);
    let ids: Vec<(usize, usize)> =
        (0..q).map(|_| (valid[rng.gen_range(0..valid.len())], valid[rng.gen_range(0..valid.len())])).collect();
    let n = s.cell_count();
    let emit = |op: &str, (med, p99, _): (f64, f64, usize)| {
        println!(
            "{}",
            json!({"kind": s.kind().name(), "n": n, "op": op, "queries": q, "median_ns": med, "p99_ns": p99, "threads": a.threads})
        );
    };
    match &s {
        Structure::Bfs(t) => {
            emit("adj", time_op(&ids, a.threads, |x, y| t.adjacent(x, y).unwrap() as usize));
            emit("relpos", time_op(&ids, a.threads, |x, _| t.relative_position(x).unwrap().0 as usize));
        }
        _ => {
            let nav = navigable(&s).unwrap();
            for (name, d) in [("left", Dir::Left), ("right", Dir::Right), ("up", Dir::Up), ("down", Dir::Down)] {
                emit(name, time_op(&ids, a.threads, |x, _| nav.neighbor(x, d).unwrap().unwrap_or(0)));
            }
            emit("deg", time_op(&ids, a.threads, |x, _| nav.degree(x).unwrap()));
            emit("vis", time_op(&ids, a.threads, |x, y| nav.is_visible(x, y).unwrap() as usize));
        }
    }
    if let Structure::Sliced(ss) = &s {
        let mut hist = vec![0usize; ss.slice_count() + 1];
        for &(x, y) in &ids {
            hist[ss.is_visible_traced(x, y).unwrap().1] += 1;
        }
        println!("{}", json!({"kind": "sliced", "n": n, "op": "vis_iterations", "slice_count": ss.slice_count(), "histogram": hist}));
    }
    Ok(())
}
