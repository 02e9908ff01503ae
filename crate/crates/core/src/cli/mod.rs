//! Command-line front end. Every subcommand writes its results to the given
//! writer and reports failures through [`Failure`]; `main` maps them to exit
//! codes (0 success, 1 runtime error, 2 usage error).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::apps::{rlz_compress, rlz_decompress, text_hash, OverlapEdge, OverlapIndex, RlzFile};
use crate::grammar::{grammar_from_bytes, terminals, to_bytes};
use crate::index::{Index, DEFAULT_RETRIES};
use crate::lcg::build_lcg;
use crate::mem::{
    find_kmems, find_krare, find_mems, find_mems_lcg, find_mems_quadratic, find_mums, matching_statistics, MemRecord,
};
use crate::Error;

#[derive(Parser, Debug)]
#[command(name = "gramem", version, about = "Maximal exact matches on a grammar-compressed text index")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Build an index bundle from a text file.
    Build(BuildArgs),
    /// Answer queries for every pattern in a file.
    Query(QueryArgs),
    /// Compress a text relative to an indexed reference, or decompress.
    Rlz(RlzArgs),
    /// Suffix-prefix overlaps among reads, one read per line.
    Overlaps(OverlapArgs),
    /// Check the index against brute-force answers on sample patterns.
    #[cfg(feature = "oracle")]
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct BuildArgs {
    text: PathBuf,
    out: PathBuf,
    #[arg(long, env = "GRAMEM_SEED", default_value_t = 0)]
    seed: u64,
    /// Grammar builds to try; the smallest is kept.
    #[arg(long, default_value_t = DEFAULT_RETRIES)]
    retries: u32,
    /// Index this serialized grammar instead of building one. It must
    /// generate the text.
    #[arg(long)]
    grammar_in: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Mem,
    Kmem,
    Mum,
    Krare,
    Ms,
    Locate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algo {
    Quadratic,
    Lcg,
}

#[derive(Args, Debug)]
struct QueryArgs {
    bundle: PathBuf,
    patterns: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Mem)]
    mode: Mode,
    /// Occurrence threshold, for kmem and krare only.
    #[arg(long)]
    k: Option<u64>,
    /// MEM algorithm for mem and ms: the scan over any grammar, or the one
    /// over the locally consistent grammar. Default: lcg when the bundle
    /// holds its levels.
    #[arg(long, value_enum)]
    algo: Option<Algo>,
    /// Patterns are records of a little-endian u32 length and that many bytes.
    #[arg(long)]
    binary: bool,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args, Debug)]
struct RlzArgs {
    reference: PathBuf,
    input: PathBuf,
    out: PathBuf,
    /// Input is a phrase file; write the text.
    #[arg(long)]
    decompress: bool,
}

#[derive(Args, Debug)]
struct OverlapArgs {
    reads: PathBuf,
    #[arg(long, default_value_t = 1)]
    lmin: usize,
    /// Every overlap length, not only the longest per pair.
    #[arg(long)]
    all: bool,
    #[arg(long, env = "GRAMEM_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[cfg(feature = "oracle")]
#[derive(Args, Debug)]
struct VerifyArgs {
    bundle: PathBuf,
    patterns: PathBuf,
    #[arg(long)]
    binary: bool,
}

#[derive(Debug)]
pub enum Failure {
    /// Bad command line; exit code 2.
    Usage(String),
    /// Exit code 1.
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Run(Error::Io(e))
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage: {m}"),
            Failure::Run(e) => write!(f, "{e}"),
        }
    }
}

type Out<'a> = &'a mut dyn Write;

pub fn main() -> i32 {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let code = match Cli::try_parse() {
        Ok(cli) => report(dispatch(cli, &mut out)),
        Err(e) => {
            let _ = e.print();
            e.exit_code()
        }
    };
    if out.flush().is_err() && code == 0 {
        return 1;
    }
    code
}

/// Runs a command line (including the program name) against `out`.
pub fn run<I, T>(args: I, out: Out) -> Result<(), Failure>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Failure::Usage(e.to_string()))?;
    dispatch(cli, out)
}

fn report(r: Result<(), Failure>) -> i32 {
    match r {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("gramem: {f}");
            match f {
                Failure::Usage(_) => 2,
                Failure::Run(_) => 1,
            }
        }
    }
}

fn dispatch(cli: Cli, out: Out) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Build(a) => cmd_build(&a, out),
        Cmd::Query(a) => cmd_query(&a, out),
        Cmd::Rlz(a) => cmd_rlz(&a, out),
        Cmd::Overlaps(a) => cmd_overlaps(&a, out),
        #[cfg(feature = "oracle")]
        Cmd::Verify(a) => cmd_verify(&a, out),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::Run(Error::Format(format!("{}: {e}", path.display()))))
}

/// One record per line, without the newline; a final newline does not start
/// an empty record.
fn split_lines(data: &[u8]) -> Vec<&[u8]> {
    if data.is_empty() {
        return Vec::new();
    }
    let body = data.strip_suffix(b"\n").unwrap_or(data);
    body.split(|&b| b == b'\n').collect()
}

fn split_records(data: &[u8]) -> Result<Vec<&[u8]>, Failure> {
    let mut v = Vec::new();
    let mut rest = data;
    while !rest.is_empty() {
        let Some((len, tail)) = rest.split_first_chunk::<4>() else {
            return Err(Error::Format("truncated record length".into()).into());
        };
        let len = u32::from_le_bytes(*len) as usize;
        if tail.len() < len {
            return Err(Error::Format("record runs past the end of the file".into()).into());
        }
        v.push(&tail[..len]);
        rest = &tail[len..];
    }
    Ok(v)
}

fn patterns(path: &Path, binary: bool) -> Result<Vec<Vec<u32>>, Failure> {
    let data = read(path)?;
    let recs = if binary { split_records(&data)? } else { split_lines(&data) };
    Ok(recs.into_iter().map(terminals).collect())
}

fn cmd_build(a: &BuildArgs, out: Out) -> Result<(), Failure> {
    let text = terminals(&read(&a.text)?);
    let idx = match &a.grammar_in {
        Some(path) => {
            let g = grammar_from_bytes(&read(path)?)?;
            g.validate(&text)?;
            Index::build(g, None, a.seed)
        }
        None => {
            let (g, lv) = build_lcg(&text, a.seed, a.retries)?;
            Index::build(g, Some(lv), a.seed)
        }
    };
    idx.save(&a.out)?;
    writeln!(out, "n\t{}", idx.text_len())?;
    writeln!(out, "grammar_size\t{}", idx.grammar().size())?;
    writeln!(out, "points\t{}", idx.points().len())?;
    writeln!(out, "levels\t{}", idx.levels().map_or(0, |lv| lv.height() + 1))?;
    Ok(())
}

/// Runs `f` over `items` on up to `threads` threads, keeping input order.
fn par_map<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(usize, &T) -> R + Sync) -> Vec<R> {
    let threads = threads.clamp(1, items.len().max(1));
    if threads == 1 {
        return items.iter().enumerate().map(|(i, x)| f(i, x)).collect();
    }
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .enumerate()
            .map(|(c, part)| {
                let f = &f;
                s.spawn(move || part.iter().enumerate().map(|(i, x)| f(c * chunk + i, x)).collect::<Vec<R>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn cmd_query(a: &QueryArgs, out: Out) -> Result<(), Failure> {
    let needs_k = matches!(a.mode, Mode::Kmem | Mode::Krare);
    let k = match (needs_k, a.k) {
        (true, None) => return Err(Failure::Usage(format!("--mode {:?} requires --k", a.mode).to_lowercase())),
        (true, Some(0)) => return Err(Failure::Usage("--k must be at least 1".into())),
        (false, Some(_)) => {
            return Err(Failure::Usage(format!("--k does not apply to --mode {:?}", a.mode).to_lowercase()))
        }
        (_, k) => k.unwrap_or(1),
    };
    if a.threads == 0 {
        return Err(Failure::Usage("--threads must be at least 1".into()));
    }
    let idx = Index::load(&a.bundle)?;
    let pats = patterns(&a.patterns, a.binary)?;
    let mems = |p: &[u32]| -> crate::Result<Vec<MemRecord>> {
        match a.algo {
            Some(Algo::Quadratic) => Ok(find_mems_quadratic(&idx, p)),
            Some(Algo::Lcg) => find_mems_lcg(&idx, p),
            None => Ok(find_mems(&idx, p)),
        }
    };
    let blocks = par_map(&pats, a.threads, |n, p| -> crate::Result<String> {
        let id = n + 1;
        let mut s = String::new();
        let recs = match a.mode {
            Mode::Mem => mems(p)?,
            Mode::Kmem => find_kmems(&idx, p, k),
            Mode::Mum => find_mums(&idx, p),
            Mode::Krare => find_krare(&idx, p, k),
            Mode::Ms => {
                let ms = matching_statistics(&mems(p)?, p.len())?;
                for (q, (l, pos)) in ms.len.iter().zip(&ms.pos).enumerate() {
                    let _ = writeln!(s, "{id}\t{}\t{l}\t{pos}", q + 1);
                }
                return Ok(s);
            }
            Mode::Locate => {
                if !p.is_empty() {
                    for o in idx.locate(p) {
                        let kind = if o.primary { "primary" } else { "secondary" };
                        let _ = writeln!(s, "{id}\t{}\t{kind}", o.pos);
                    }
                }
                return Ok(s);
            }
        };
        for m in recs {
            let _ = writeln!(s, "{id}\t{}\t{}\t{}", m.i, m.j, m.p);
        }
        Ok(s)
    });
    for b in blocks {
        out.write_all(b?.as_bytes())?;
    }
    Ok(())
}

fn cmd_rlz(a: &RlzArgs, out: Out) -> Result<(), Failure> {
    let idx = Index::load(&a.reference)?;
    let reference = idx.grammar().expand();
    let input = read(&a.input)?;
    let file = if a.decompress {
        let f = RlzFile::from_bytes(&input)?;
        if f.reference_hash != text_hash(&reference) {
            return Err(Error::Format("phrase file was made against a different reference".into()).into());
        }
        let text = rlz_decompress(&reference, &f.phrases)?;
        let bytes = to_bytes(&text).ok_or_else(|| Error::Format("decompressed text holds non-byte symbols".into()))?;
        std::fs::write(&a.out, bytes)?;
        f
    } else {
        let text = terminals(&input);
        let phrases = rlz_compress(&idx, &text)?;
        let f = RlzFile { reference_hash: text_hash(&reference), text_len: text.len() as u64, phrases };
        std::fs::write(&a.out, f.to_bytes())?;
        f
    };
    writeln!(out, "z\t{}", file.phrases.len())?;
    writeln!(out, "ratio\t{:.6}", file.ratio())?;
    Ok(())
}

fn cmd_overlaps(a: &OverlapArgs, out: Out) -> Result<(), Failure> {
    if a.threads == 0 {
        return Err(Failure::Usage("--threads must be at least 1".into()));
    }
    let data = read(&a.reads)?;
    let reads: Vec<Vec<u32>> = split_lines(&data).into_iter().map(terminals).collect();
    if reads.iter().all(|r| r.is_empty()) {
        return Ok(());
    }
    let ox = OverlapIndex::build(&reads, a.seed)?;
    let per_read = par_map(&reads, a.threads, |v, r| {
        if r.len() >= a.lmin {
            ox.edges_into(v + 1, r, a.lmin, a.all, None)
        } else {
            Vec::new()
        }
    });
    let mut edges: Vec<OverlapEdge> = per_read.into_iter().flatten().collect();
    edges.sort_unstable();
    for e in edges {
        writeln!(out, "{}\t{}\t{}", e.from, e.to, e.len)?;
    }
    Ok(())
}

#[cfg(feature = "oracle")]
fn cmd_verify(a: &VerifyArgs, out: Out) -> Result<(), Failure> {
    use crate::mem::verify;
    use crate::oracle::{naive_kmems_with, naive_krare, naive_mums, NaiveIndex};

    let idx = Index::load(&a.bundle)?;
    let text = idx.grammar().expand();
    let nx = NaiveIndex::new(&text);
    let pats = patterns(&a.patterns, a.binary)?;
    let mut bad = 0usize;
    for (n, p) in pats.iter().enumerate() {
        let mut fails: Vec<String> = Vec::new();
        let want = naive_kmems_with(&nx, p, 1);
        let same = |x: &[MemRecord], y: &[MemRecord]| x.iter().map(|m| (m.i, m.j)).eq(y.iter().map(|m| (m.i, m.j)));
        let quad = find_mems_quadratic(&idx, p);
        if !same(&quad, &want) {
            fails.push("mem/quadratic".into());
        }
        if idx.levels().is_some() && !same(&find_mems_lcg(&idx, p)?, &want) {
            fails.push("mem/lcg".into());
        }
        for k in [2, 3] {
            let got = find_kmems(&idx, p, k);
            if !same(&got, &naive_kmems_with(&nx, p, k)) || !got.iter().all(|m| verify(&idx, p, m)) {
                fails.push(format!("kmem/{k}"));
            }
        }
        if !same(&find_mums(&idx, p), &naive_mums(&text, p)) {
            fails.push("mum".into());
        }
        if !same(&find_krare(&idx, p, 2), &naive_krare(&text, p, 2)) {
            fails.push("krare/2".into());
        }
        if !quad.iter().all(|m| verify(&idx, p, m)) {
            fails.push("extraction".into());
        }
        if fails.is_empty() {
            writeln!(out, "{}\tok", n + 1)?;
        } else {
            bad += 1;
            writeln!(out, "{}\tmismatch\t{}", n + 1, fails.join(","))?;
        }
    }
    if bad > 0 {
        return Err(Error::Format(format!("{bad} of {} patterns disagree with the oracle", pats.len())).into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_and_record_splitting() {
        assert!(split_lines(b"").is_empty());
        assert_eq!(split_lines(b"ab\n\ncd"), vec![&b"ab"[..], b"", b"cd"]);
        assert_eq!(split_lines(b"ab\n"), vec![&b"ab"[..]]);
        assert_eq!(split_lines(b"\n"), vec![&b""[..]]);
        let recs = split_records(&[2, 0, 0, 0, b'a', b'\n', 0, 0, 0, 0]).unwrap();
        assert_eq!(recs, vec![&b"a\n"[..], b""]);
        assert!(split_records(&[5, 0, 0, 0, b'a']).is_err());
        assert!(split_records(&[1, 0]).is_err());
    }

    #[test]
    fn par_map_keeps_order() {
        let v: Vec<u32> = (0..37).collect();
        for t in [1, 2, 5, 64] {
            assert_eq!(par_map(&v, t, |i, x| (i as u32, *x * 2)), v.iter().map(|&x| (x, x * 2)).collect::<Vec<_>>());
        }
    }

    #[test]
    fn k_must_match_mode() {
        let mut sink = Vec::new();
        for args in [
            vec!["gramem", "query", "b", "p", "--mode", "kmem"],
            vec!["gramem", "query", "b", "p", "--mode", "mem", "--k", "2"],
            vec!["gramem", "query", "b", "p", "--mode", "krare", "--k", "0"],
            vec!["gramem", "query", "b", "p", "--mode", "nope"],
        ] {
            assert!(matches!(run(args, &mut sink), Err(Failure::Usage(_))));
        }
    }
}
