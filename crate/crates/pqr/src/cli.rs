//! The `pqr` command line. [`run`] takes its streams as arguments so tests
//! can drive it in-process.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use pqr_core::peacock::{peacock, PeacockError, MIN_PEACOCK_VERSION};
use pqr_core::qr::{generate_at, smallest_fitting, symbol_spec, EcLevel, QrError};
use pqr_core::scanner::{inspect, scan, Outcome, Policy};
use pqr_core::scene::{render_symbol, Rotation, SceneError, TrialConfig, TrialMode};

use crate::netpbm::{Format, Raster};
use crate::report::{to_json, PeacockReportJson, ScanReportJson, TrialStatsJson};
use crate::{matrix_text, render_artifact, trials};

pub const EXIT_OK: i32 = 0;
/// A file could not be written.
pub const EXIT_IO: i32 = 1;
pub const EXIT_NOT_FOUND: i32 = 2;
pub const EXIT_NO_UNIQUE_CODE: i32 = 3;
pub const EXIT_INVALID: i32 = 4;
pub const EXIT_INFEASIBLE: i32 = 5;
pub const EXIT_CAPACITY: i32 = 6;
pub const EXIT_DECODE_FAILED: i32 = 7;

#[derive(Debug, Parser)]
#[command(
    name = "pqr",
    about = "QR and peacocked-QR generator, scanner and selection simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Encode text as a plain QR symbol.
    Generate {
        #[arg(long)]
        text: String,
        #[arg(long, default_value = "M", value_parser = parse_ec)]
        ec: EcLevel,
        /// Exact version; the smallest fitting one when absent.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=10))]
        version: Option<u8>,
        /// Raster output (.pgm writes P5, .pbm writes P4).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Module matrix as '#'/'.' text.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Pixels per module.
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u16).range(1..=64))]
        scale: u16,
        /// Clockwise rotation in degrees, a multiple of 45.
        #[arg(long, default_value = "0", value_parser = parse_rotation, allow_negative_numbers = true)]
        rotate: Rotation,
    },
    /// Build a peacocked symbol that scans only with its corner covered.
    Peacock {
        #[arg(long)]
        text: String,
        #[arg(long, default_value = "M", value_parser = parse_ec)]
        ec: EcLevel,
        /// Lowest version to try; values below 2 are raised to 2.
        #[arg(long, default_value_t = MIN_PEACOCK_VERSION, value_parser = clap::value_parser!(u8).range(0..=10))]
        min_version: u8,
        #[arg(long)]
        out: PathBuf,
        /// JSON damage and certification report.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Render at 45 degrees with the covered corner at the bottom.
        #[arg(long)]
        diamond: bool,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u16).range(1..=64))]
        scale: u16,
    },
    /// Scan a netpbm image.
    Scan {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = PolicyArg::Arbitrary)]
        policy: PolicyArg,
        /// Seed for the arbitrary policy.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Run seeded selection trials on a grid of codes.
    Simulate {
        #[arg(long)]
        codes: usize,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        target: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "M", value_parser = parse_ec)]
        ec: EcLevel,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u16).range(1..=64))]
        scale: u16,
        #[arg(long)]
        json: bool,
    },
    /// Print the scanner's hypothesis census without selecting.
    Inspect { file: PathBuf },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    Strict,
    Arbitrary,
    First,
}

impl From<PolicyArg> for Policy {
    fn from(p: PolicyArg) -> Policy {
        match p {
            PolicyArg::Strict => Policy::StrictSingle,
            PolicyArg::Arbitrary => Policy::Arbitrary,
            PolicyArg::First => Policy::FirstFound,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Plain,
    Pqr,
}

fn parse_ec(s: &str) -> Result<EcLevel, String> {
    let mut chars = s.chars();
    match (
        chars.next().and_then(|c| EcLevel::from_char(c.to_ascii_uppercase())),
        chars.next(),
    ) {
        (Some(ec), None) => Ok(ec),
        _ => Err(format!("expected one of L, M, Q, H, got {s:?}")),
    }
}

fn parse_rotation(s: &str) -> Result<Rotation, String> {
    let deg: i32 = s.parse().map_err(|_| format!("not an integer: {s:?}"))?;
    Rotation::from_degrees(deg).ok_or_else(|| format!("{deg} is not a multiple of 45"))
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    EXIT_INVALID
                }
            };
        }
    };
    let mut io = Io { out, err };
    match cli.command {
        Command::Generate {
            text,
            ec,
            version,
            out,
            matrix,
            scale,
            rotate,
        } => io.generate(
            text.as_bytes(),
            ec,
            version,
            out.as_deref(),
            matrix.as_deref(),
            scale as usize,
            rotate,
        ),
        Command::Peacock {
            text,
            ec,
            min_version,
            out,
            report,
            diamond,
            scale,
        } => io.peacock(
            text.as_bytes(),
            ec,
            min_version,
            &out,
            report.as_deref(),
            diamond,
            scale as usize,
        ),
        Command::Scan {
            file,
            policy,
            seed,
            json,
        } => io.scan(&file, policy.into(), seed, json),
        Command::Simulate {
            codes,
            mode,
            target,
            trials,
            seed,
            ec,
            scale,
            json,
        } => {
            let mode = match mode {
                ModeArg::Plain => TrialMode::Plain,
                ModeArg::Pqr => TrialMode::Pqr,
            };
            let mut config = TrialConfig::new(codes, mode, target, trials, seed);
            config.ec = ec;
            config.scale = scale as usize;
            io.simulate(&config, json)
        }
        Command::Inspect { file } => io.inspect(&file),
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn fail(&mut self, code: i32, msg: impl std::fmt::Display) -> i32 {
        let _ = writeln!(self.err, "pqr: {msg}");
        code
    }

    fn write_file(&mut self, path: &Path, bytes: &[u8]) -> Result<(), i32> {
        std::fs::write(path, bytes).map_err(|e| self.fail(EXIT_IO, format_args!("{}: {e}", path.display())))
    }

    fn read_raster(&mut self, path: &Path) -> Result<Raster, i32> {
        Raster::read(path).map_err(|e| self.fail(EXIT_INVALID, format_args!("{}: {e}", path.display())))
    }

    #[allow(clippy::too_many_arguments)]
    fn generate(
        &mut self,
        payload: &[u8],
        ec: EcLevel,
        version: Option<u8>,
        out: Option<&Path>,
        matrix: Option<&Path>,
        scale: usize,
        rotate: Rotation,
    ) -> i32 {
        let spec = match version {
            Some(v) => symbol_spec(v, ec),
            None => smallest_fitting(payload.len(), ec, 1),
        };
        let built = spec.and_then(|s| generate_at(payload, &s));
        let m = match built {
            Ok((m, _)) => m,
            Err(e @ QrError::CapacityExceeded { .. }) => return self.fail(EXIT_CAPACITY, e),
            Err(e) => return self.fail(EXIT_INVALID, e),
        };
        let text = matrix_text::print(&m);
        if let Some(path) = matrix {
            if let Err(code) = self.write_file(path, text.as_bytes()) {
                return code;
            }
        }
        if let Some(path) = out {
            let raster = Raster::from_bitmap(&render_symbol(&m, scale, rotate, None), Format::for_path(path));
            if let Err(code) = self.write_file(path, &raster.encode()) {
                return code;
            }
        }
        if out.is_none() && matrix.is_none() {
            let _ = self.out.write_all(text.as_bytes());
        }
        EXIT_OK
    }

    #[allow(clippy::too_many_arguments)]
    fn peacock(
        &mut self,
        payload: &[u8],
        ec: EcLevel,
        min_version: u8,
        out: &Path,
        report: Option<&Path>,
        diamond: bool,
        scale: usize,
    ) -> i32 {
        if min_version < MIN_PEACOCK_VERSION {
            let _ = writeln!(
                self.err,
                "pqr: warning: --min-version {min_version} raised to {MIN_PEACOCK_VERSION}, the lowest version with an alignment pattern"
            );
        }
        let a = match peacock(payload, ec, min_version.max(MIN_PEACOCK_VERSION)) {
            Ok(a) => a,
            Err(e @ PeacockError::CapacityExceeded { .. }) => return self.fail(EXIT_CAPACITY, e),
            Err(e) => return self.fail(EXIT_INFEASIBLE, e),
        };
        if a.ec_substituted() {
            let _ = writeln!(
                self.err,
                "pqr: warning: EC {} infeasible, used {}",
                a.requested_ec.as_char(),
                a.spec.ec.as_char()
            );
        }
        let raster = Raster::from_bitmap(&render_artifact(&a, scale, diamond), Format::for_path(out));
        if let Err(code) = self.write_file(out, &raster.encode()) {
            return code;
        }
        if let Some(path) = report {
            if let Err(code) = self.write_file(path, to_json(&PeacockReportJson::from(&a)).as_bytes()) {
                return code;
            }
        }
        let _ = writeln!(
            self.out,
            "version {}-{}, envelope {} modules, certified: {}",
            a.spec.version.value(),
            a.spec.ec.as_char(),
            a.distracter.envelope.side_modules,
            a.certification.passed()
        );
        EXIT_OK
    }

    fn scan(&mut self, file: &Path, policy: Policy, seed: u64, json: bool) -> i32 {
        let raster = match self.read_raster(file) {
            Ok(r) => r,
            Err(code) => return code,
        };
        let r = scan(&raster.to_bitmap(), policy, seed);
        if json {
            let _ = self.out.write_all(to_json(&ScanReportJson::from(&r)).as_bytes());
        }
        match &r.outcome {
            Outcome::Decoded { payload, .. } => {
                if !json {
                    let _ = self.out.write_all(payload);
                    let _ = self.out.write_all(b"\n");
                }
                EXIT_OK
            }
            Outcome::NotFound => self.fail(EXIT_NOT_FOUND, "no code found"),
            Outcome::NoUniqueCode => self.fail(EXIT_NO_UNIQUE_CODE, "more than one code decoded"),
            Outcome::DecodeFailed => self.fail(EXIT_DECODE_FAILED, "no hypothesis decoded"),
        }
    }

    fn simulate(&mut self, config: &TrialConfig, json: bool) -> i32 {
        let stats = match trials::run_parallel(config) {
            Ok(s) => s,
            Err(e @ SceneError::Peacock(PeacockError::Infeasible)) => return self.fail(EXIT_INFEASIBLE, e),
            Err(
                e @ (SceneError::Qr(QrError::CapacityExceeded { .. })
                | SceneError::Peacock(PeacockError::CapacityExceeded { .. })),
            ) => return self.fail(EXIT_CAPACITY, e),
            Err(e) => return self.fail(EXIT_INVALID, e),
        };
        let j = TrialStatsJson::new(&stats, config);
        if json {
            let _ = self.out.write_all(to_json(&j).as_bytes());
        } else {
            let _ = writeln!(
                self.out,
                "trials: {}, target_hit: {}, other_hit: {}, none: {}\nhistogram: {:?}",
                j.trials, j.target_hit, j.other_hit, j.none, j.histogram
            );
        }
        EXIT_OK
    }

    fn inspect(&mut self, file: &Path) -> i32 {
        let raster = match self.read_raster(file) {
            Ok(r) => r,
            Err(code) => return code,
        };
        let c = inspect(&raster.to_bitmap()).census;
        let _ = writeln!(
            self.out,
            "finders: {}, triples: {}\ndecoded: {}, format failures: {}, rs failures: {}, structure failures: {}",
            c.finders, c.triples, c.decoded, c.format_failures, c.rs_failures, c.structure_failures
        );
        EXIT_OK
    }
}
