mod images;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use biaffine_core::contractivity::{check_ifs, ifs_certified};
use biaffine_core::geometry::{classify, focus_directrix, folding_line, folding_parabola, PARALLEL_EPS};
use biaffine_core::ifs::{chaos_game, iterate};
use biaffine_core::image::rasterize;
use biaffine_core::io::{read_spec, IoError};
use biaffine_core::sections::itinerary_line;
use biaffine_core::verify::{contraction_suite, geometry_suite, homeo_suite, section_suite, PropertyResult};
use biaffine_core::{
    itinerary, top_mask, transform_image, BiAffineMap, DegeneracyClass, Direction, HomeoConfig, HomeoError,
    IfsSpec, PointSet, Sampling, SectionError, Vec2, UNIT_CENTER,
};

use images::{read_image, write_image, ImageFileError};

#[derive(Parser)]
#[command(name = "biaffine", version, about = "Bi-affine IFS toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-map contraction report; exit 0 iff every map is certified.
    Check { spec: PathBuf },
    /// Render the attractor as black points on white.
    Attractor {
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Chaos)]
        method: Method,
        /// Hutchinson iterations for `iterate`.
        #[arg(long, default_value_t = 8)]
        k: usize,
        /// Point count for `chaos`.
        #[arg(long, default_value_t = 200_000)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        burn_in: usize,
        /// Point cap per `iterate` step.
        #[arg(long, default_value_t = 1 << 21)]
        cap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "256x256", value_parser = parse_size)]
        size: (usize, usize),
        #[arg(long)]
        out: PathBuf,
        /// Also dump the points as `x,y` lines.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Folding line, folding parabola, focus and directrix of one map.
    Fold {
        spec: Option<PathBuf>,
        /// 1-based map index within the spec.
        #[arg(long, default_value_t = 1)]
        map: usize,
        /// `ax,ay,bx,by,cx,cy,dx,dy` for `a + b·x + c·y + d·x·y`.
        #[arg(long, conflicts_with = "spec", allow_hyphen_values = true)]
        coeffs: Option<String>,
    },
    /// Warp an image by the fractal homeomorphism between two systems.
    Transform {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_enum, default_value_t = SamplingArg::Nearest)]
        sampling: SamplingArg,
        #[arg(long)]
        inverse: bool,
    },
    /// Top-mask itinerary of a point.
    Itinerary {
        spec: PathBuf,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        point: Vec2,
        #[arg(long, default_value_t = 20)]
        depth: usize,
    },
    /// Run a property suite; one summary line per property.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        spec2: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 20)]
        depth: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Iterate,
    Chaos,
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplingArg {
    Nearest,
    Bilinear,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Geometry,
    Contraction,
    Section,
    Homeo,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    ImageFile(#[from] ImageFileError),
    #[error("{0}")]
    Usage(String),
    #[error("not certified: {0}")]
    NotCertified(String),
    #[error("degenerate map ({0})")]
    Degenerate(DegeneracyClass),
    #[error(transparent)]
    Section(#[from] SectionError),
    #[error(transparent)]
    Homeo(#[from] HomeoError),
    #[error("{0} properties failed")]
    Properties(usize),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::NotCertified(_) | CliError::Properties(_) => 1,
            CliError::Io(_) | CliError::ImageFile(_) | CliError::Usage(_) | CliError::Section(_) => 2,
            CliError::Degenerate(_) => 3,
            CliError::Homeo(HomeoError::PixelBudget { .. }) => 4,
            CliError::Homeo(HomeoError::NotCertified(_)) => 1,
            CliError::Homeo(_) => 2,
        }
    }
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WxH")?;
    let w: usize = w.parse().map_err(|_| "bad width")?;
    let h: usize = h.parse().map_err(|_| "bad height")?;
    if w == 0 || h == 0 {
        return Err("size must be positive".into());
    }
    Ok((w, h))
}

fn parse_point(s: &str) -> Result<Vec2, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let x: f64 = x.trim().parse().map_err(|_| "bad x")?;
    let y: f64 = y.trim().parse().map_err(|_| "bad y")?;
    Ok(Vec2::new(x, y))
}

fn parse_coeffs(s: &str) -> Result<BiAffineMap, CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("--coeffs: {e}")))?;
    if v.len() != 8 || v.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Usage("--coeffs needs 8 finite numbers".into()));
    }
    Ok(BiAffineMap::new(
        Vec2::new(v[0], v[1]),
        Vec2::new(v[2], v[3]),
        Vec2::new(v[4], v[5]),
        Vec2::new(v[6], v[7]),
    ))
}

fn check(spec: &Path) -> Result<(), CliError> {
    let ifs = read_spec(spec)?;
    let reports = check_ifs(&ifs);
    println!("map s_min lipschitz_bound proper class certified");
    for (i, r) in reports.iter().enumerate() {
        println!(
            "{} {:.9} {:.9} {} {} {}",
            i + 1,
            r.s_min,
            r.lipschitz_bound,
            r.proper,
            r.degeneracy,
            r.certified()
        );
    }
    if ifs_certified(&reports) {
        println!("certified");
        Ok(())
    } else {
        let bad: Vec<String> = reports
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.certified())
            .map(|(i, _)| (i + 1).to_string())
            .collect();
        Err(CliError::NotCertified(format!("maps {}", bad.join(", "))))
    }
}

#[allow(clippy::too_many_arguments)]
fn attractor(
    spec: &Path,
    method: Method,
    k: usize,
    n: usize,
    burn_in: usize,
    cap: usize,
    seed: u64,
    (w, h): (usize, usize),
    out: &Path,
    csv: Option<&Path>,
) -> Result<(), CliError> {
    let ifs = read_spec(spec)?;
    let bad_args = |e: biaffine_core::IfsError| CliError::Usage(e.to_string());
    let points = match method {
        Method::Iterate => iterate(&ifs, &PointSet::singleton(UNIT_CENTER), k, cap).map_err(bad_args)?,
        Method::Chaos => {
            let game = chaos_game(&ifs, n, seed, burn_in).map_err(bad_args)?;
            if !game.certified {
                eprintln!("warning: system is not certified contractive");
            }
            game.points
        }
    };
    let img = rasterize(points.points(), w, h).map_err(|e| CliError::Usage(e.to_string()))?;
    write_image(out, &img)?;
    if let Some(path) = csv {
        biaffine_core::io::write_bytes(path, points.to_csv().as_bytes())?;
    }
    println!("points {}", points.len());
    Ok(())
}

fn fold(spec: Option<&Path>, map: usize, coeffs: Option<&str>) -> Result<(), CliError> {
    let f = match (spec, coeffs) {
        (_, Some(c)) => parse_coeffs(c)?,
        (Some(path), None) => {
            let ifs = read_spec(path)?;
            if map == 0 || map > ifs.len() {
                return Err(CliError::Usage(format!("--map must be in 1..={}", ifs.len())));
            }
            ifs.maps()[map - 1]
        }
        (None, None) => return Err(CliError::Usage("give a spec file or --coeffs".into())),
    };
    let class = classify(&f, PARALLEL_EPS);
    if class != DegeneracyClass::NonDegenerate {
        return Err(CliError::Degenerate(class));
    }
    let line = folding_line(&f).map_err(|_| CliError::Degenerate(class))?;
    let par = folding_parabola(&f).map_err(|_| CliError::Degenerate(class))?;
    println!("class {class}");
    println!(
        "folding_line {:.9} {:.9} {:.9}",
        line.alpha, line.beta, line.gamma
    );
    println!("parabola_u {}", par.u);
    println!("parabola_v {}", par.v);
    println!("parabola_w {}", par.w);
    match focus_directrix(&par) {
        Ok((focus, dir)) => {
            println!("focus {focus}");
            println!("directrix {:.9} {:.9} {:.9}", dir.alpha, dir.beta, dir.gamma);
        }
        Err(e) => println!("focus unavailable: {e}"),
    }
    Ok(())
}

fn transform(
    from: &Path,
    to: &Path,
    input: &Path,
    out: &Path,
    depth: Option<usize>,
    sampling: SamplingArg,
    inverse: bool,
) -> Result<(), CliError> {
    let f = read_spec(from)?;
    let g = read_spec(to)?;
    let img = read_image(input)?;
    let cfg = HomeoConfig {
        depth,
        sampling: match sampling {
            SamplingArg::Nearest => Sampling::Nearest,
            SamplingArg::Bilinear => Sampling::Bilinear,
        },
        direction: if inverse {
            Direction::Inverse
        } else {
            Direction::Forward
        },
    };
    let t = transform_image(&img, &f, &g, cfg)?;
    write_image(out, &t.image)?;
    println!("depth {}", t.depth);
    println!("err_bound {:.9}", t.err_bound);
    if t.failed_pixels > 0 {
        println!("failed_pixels {}", t.failed_pixels);
    }
    Ok(())
}

fn itinerary_cmd(spec: &Path, point: Vec2, depth: usize) -> Result<(), CliError> {
    let ifs = read_spec(spec)?;
    let mask = top_mask(&ifs);
    let addr = itinerary(&ifs, &mask, point, depth)?;
    println!("{}", itinerary_line(point, &addr));
    Ok(())
}

fn need_spec(p: Option<&Path>) -> Result<IfsSpec, CliError> {
    let p = p.ok_or_else(|| CliError::Usage("this suite needs --spec".into()))?;
    Ok(read_spec(p)?)
}

fn verify(
    suite: Suite,
    spec: Option<&Path>,
    spec2: Option<&Path>,
    seed: u64,
    samples: usize,
    depth: usize,
) -> Result<(), CliError> {
    let results: Vec<PropertyResult> = match suite {
        Suite::Geometry => geometry_suite(samples, seed),
        Suite::Contraction => contraction_suite(&need_spec(spec)?, samples, seed),
        Suite::Section => section_suite(&need_spec(spec)?, samples, depth, seed),
        Suite::Homeo => {
            let f = need_spec(spec)?;
            let g = match spec2 {
                Some(p) => read_spec(p)?,
                None => f.clone(),
            };
            homeo_suite(&f, &g, samples, depth, seed)
        }
    };
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(CliError::Properties(failed));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Command::Check { spec } => check(&spec),
        Command::Attractor {
            spec,
            method,
            k,
            n,
            burn_in,
            cap,
            seed,
            size,
            out,
            csv,
        } => attractor(
            &spec,
            method,
            k,
            n,
            burn_in,
            cap,
            seed,
            size,
            &out,
            csv.as_deref(),
        ),
        Command::Fold { spec, map, coeffs } => fold(spec.as_deref(), map, coeffs.as_deref()),
        Command::Transform {
            from,
            to,
            input,
            out,
            depth,
            sampling,
            inverse,
        } => transform(&from, &to, &input, &out, depth, sampling, inverse),
        Command::Itinerary { spec, point, depth } => itinerary_cmd(&spec, point, depth),
        Command::Verify {
            suite,
            spec,
            spec2,
            seed,
            samples,
            depth,
        } => verify(suite, spec.as_deref(), spec2.as_deref(), seed, samples, depth),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
