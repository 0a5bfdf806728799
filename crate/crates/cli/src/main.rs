// SPDX-License-Identifier: Apache-2.0

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use umap::attacks::AttackKind;
use umap::cost::cost_report;
use umap::simulator::{
    provision, run_session, Campaign, CampaignConfig, CampaignStats, Forcing, GroundTruth, KeyMode,
    NonceMode, NonceStream, Outcome, ReplayAbc, SimTag, TagDeck, Transcript,
};
use umap::store::Store;
use umap::Protocol;

const MANIFEST_FORMAT: &str = "umap-manifest/1";

/// Usage problems and I/O failures exit 2; a rejected single session exits 1.
#[derive(Debug)]
struct Rejected(Outcome);

impl std::fmt::Display for Rejected {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "session rejected: {:?}", self.0)
    }
}

impl std::error::Error for Rejected {}

#[derive(Parser, Debug)]
#[command(
    name = "umap",
    version,
    about = "Ultralightweight RFID mutual authentication simulator",
    args_conflicts_with_subcommands = true
)]
struct Cli {
    /// Re-run the command recorded in a manifest file.
    #[arg(long)]
    manifest: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Create tags and the reader database mirroring them.
    Provision(ProvisionArgs),
    /// Single protocol sessions.
    #[command(subcommand)]
    Session(SessionCommand),
    /// Run many sessions of one tag and write their transcripts.
    Campaign(CampaignArgs),
    /// Run a passive attack over recorded transcripts.
    Attack(AttackArgs),
    /// Cost figures.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum SessionCommand {
    /// Run one session of a provisioned tag.
    Run(SessionArgs),
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum BenchCommand {
    /// Print the communication and storage accounting.
    Cost {
        #[arg(long)]
        variant: Protocol,
    },
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct ProvisionArgs {
    #[arg(long)]
    count: usize,
    #[arg(long)]
    variant: Protocol,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    store: PathBuf,
    /// Tag memory file [default: next to the store]
    #[arg(long)]
    tags: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
struct ForcingArgs {
    /// Nonce forcing.
    #[arg(long, default_value = "random", value_parser = parse_serde::<NonceMode>)]
    forcing: NonceMode,
    /// Key forcing.
    #[arg(long, default_value = "stored", value_parser = parse_serde::<KeyMode>)]
    keys: KeyMode,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct SessionArgs {
    #[arg(long)]
    variant: Protocol,
    #[arg(long)]
    tag: String,
    #[arg(long)]
    seed: u64,
    /// Session index recorded in the transcript.
    #[arg(long, default_value_t = 0)]
    session: u64,
    /// Lose D on its way to the reader.
    #[arg(long)]
    drop_d: bool,
    /// Play the A||B||C of the last transcript in FILE to the tag.
    #[arg(long)]
    replay: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    forcing: ForcingArgs,
    #[arg(long)]
    store: PathBuf,
    #[arg(long)]
    tags: Option<PathBuf>,
    /// Write the transcript to FILE.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    ground_truth: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct CampaignArgs {
    #[arg(long)]
    variant: Protocol,
    #[arg(long)]
    sessions: u64,
    #[command(flatten)]
    #[serde(flatten)]
    forcing: ForcingArgs,
    /// Probability that each session drops D.
    #[arg(long, default_value_t = 0.0)]
    drop_rate: f64,
    /// Attacks to evaluate while running (repeatable).
    #[arg(long = "attack")]
    attacks: Vec<AttackKind>,
    #[arg(long)]
    seed: u64,
    /// Transcript output (JSONL).
    #[arg(long)]
    out: PathBuf,
    /// Ground-truth output [default: <out>.truth.jsonl]
    #[arg(long)]
    ground_truth: Option<PathBuf>,
    /// Run an existing tag instead of a fresh one; requires --tag.
    #[arg(long, requires = "tag")]
    store: Option<PathBuf>,
    #[arg(long, requires = "store")]
    tag: Option<String>,
    #[arg(long, requires = "store")]
    tags: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct AttackArgs {
    kind: AttackKind,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    ground_truth: Option<PathBuf>,
    /// Write every verdict to FILE (JSONL).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    format: String,
    subcommand: String,
    variant: Option<Protocol>,
    seed: Option<u64>,
    sessions: Option<u64>,
    forcing: Option<Forcing>,
    store: Option<PathBuf>,
    output: Option<PathBuf>,
    command: Command,
}

fn parse_serde<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_owned())).map_err(|e| e.to_string())
}

fn sibling(path: &Path, extension: &str) -> PathBuf {
    path.with_extension(extension)
}

fn tags_path(store: &Path, tags: &Option<PathBuf>) -> PathBuf {
    tags.clone().unwrap_or_else(|| sibling(store, "tags.json"))
}

fn print_json(value: &impl Serialize) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("{}", dir.display()))?;
    }
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("{}", path.display()))?,
    ))
}

fn write_line(w: &mut impl Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer(&mut *w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).with_context(|| format!("{}", path.display()))?;
    let mut items = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.with_context(|| format!("{}", path.display()))?;
        if line.trim().is_empty() {
            continue;
        }
        items.push(
            serde_json::from_str(&line).with_context(|| format!("{}:{}", path.display(), n + 1))?,
        );
    }
    Ok(items)
}

fn write_manifest(output: &Path, command: &Command) -> Result<()> {
    let (subcommand, variant, seed, sessions, forcing, store) = match command {
        Command::Provision(a) => (
            "provision",
            Some(a.variant),
            Some(a.seed),
            None,
            None,
            Some(a.store.clone()),
        ),
        Command::Session(SessionCommand::Run(a)) => (
            "session run",
            Some(a.variant),
            Some(a.seed),
            Some(1),
            Some(forcing_of(&a.forcing)),
            Some(a.store.clone()),
        ),
        Command::Campaign(a) => (
            "campaign",
            Some(a.variant),
            Some(a.seed),
            Some(a.sessions),
            Some(forcing_of(&a.forcing)),
            a.store.clone(),
        ),
        Command::Attack(_) => ("attack", None, None, None, None, None),
        Command::Bench(_) => return Ok(()),
    };
    let manifest = Manifest {
        format: MANIFEST_FORMAT.to_owned(),
        subcommand: subcommand.to_owned(),
        variant,
        seed,
        sessions,
        forcing,
        store,
        output: Some(output.to_owned()),
        command: command.clone(),
    };
    let path = sibling(output, "manifest.json");
    let mut w = create(&path)?;
    serde_json::to_writer_pretty(&mut w, &manifest)?;
    w.write_all(b"\n")?;
    w.flush()?;
    info!("manifest written to {}", path.display());
    Ok(())
}

fn forcing_of(f: &ForcingArgs) -> Forcing {
    Forcing {
        nonce_mode: f.forcing,
        key_mode: f.keys,
        ..Forcing::default()
    }
}

fn cmd_provision(a: &ProvisionArgs) -> Result<()> {
    let (store, deck) = provision(a.count, a.variant, a.seed)?;
    let tags = tags_path(&a.store, &a.tags);
    store.save(&a.store)?;
    deck.save(&tags)?;
    info!("provisioned {} {} tags", a.count, a.variant);
    print_json(&serde_json::json!({
        "variant": a.variant,
        "count": a.count,
        "seed": a.seed,
        "store": a.store,
        "tags": tags,
    }))
}

fn load_world(
    store_path: &Path,
    tags: &Option<PathBuf>,
    label: &str,
    variant: Protocol,
) -> Result<(Store, TagDeck, SimTag)> {
    let store = Store::load(store_path)?;
    let deck = TagDeck::load(tags_path(store_path, tags))?;
    let tag = deck.get(label).cloned().ok_or_else(|| {
        anyhow!(
            "no tag {label:?} in {}",
            tags_path(store_path, tags).display()
        )
    })?;
    if tag.variant != variant {
        bail!("tag {label:?} runs {}, not {variant}", tag.variant);
    }
    Ok((store, deck, tag))
}

fn save_world(
    store_path: &Path,
    tags: &Option<PathBuf>,
    store: &Store,
    mut deck: TagDeck,
    tag: SimTag,
) -> Result<()> {
    let slot = deck.get_mut(&tag.label).expect("tag came from this deck");
    *slot = tag;
    store.save(store_path)?;
    deck.save(tags_path(store_path, tags))?;
    Ok(())
}

fn cmd_session(a: &SessionArgs) -> Result<()> {
    let (mut store, deck, mut tag) = load_world(&a.store, &a.tags, &a.tag, a.variant)?;
    let mut forcing = forcing_of(&a.forcing);
    forcing.drop_d = a.drop_d;
    if let Some(path) = &a.replay {
        let ts: Vec<Transcript> = read_jsonl(path)?;
        let last = ts
            .last()
            .ok_or_else(|| anyhow!("{}: no transcripts", path.display()))?;
        forcing.replay_abc = Some(
            ReplayAbc::from_transcript(last)
                .ok_or_else(|| anyhow!("{}: transcript has no A||B||C", path.display()))?,
        );
    }
    let mut rng = NonceStream::new(a.seed);
    let record = run_session(&mut tag, &mut store, &forcing, &mut rng, a.session)?;
    save_world(&a.store, &a.tags, &store, deck, tag)?;
    if let Some(out) = &a.out {
        let mut w = create(out)?;
        write_line(&mut w, &record.transcript)?;
        w.flush()?;
        let gt = a
            .ground_truth
            .clone()
            .unwrap_or_else(|| sibling(out, "truth.jsonl"));
        let mut w = create(&gt)?;
        write_line(&mut w, &record.truth)?;
        w.flush()?;
        write_manifest(out, &Command::Session(SessionCommand::Run(a.clone())))?;
    } else if let Some(gt) = &a.ground_truth {
        let mut w = create(gt)?;
        write_line(&mut w, &record.truth)?;
        w.flush()?;
    }
    print_json(&record.transcript)?;
    match record.transcript.outcome {
        Outcome::ReaderRejected | Outcome::TagRejected | Outcome::LookupFailed => {
            Err(Rejected(record.transcript.outcome).into())
        }
        _ => Ok(()),
    }
}

fn cmd_campaign(a: &CampaignArgs) -> Result<()> {
    let config = CampaignConfig {
        forcing: forcing_of(&a.forcing),
        ..CampaignConfig::new(a.variant, a.sessions, a.seed)
    }
    .drop_rate(a.drop_rate);
    if !(0.0..=1.0).contains(&a.drop_rate) {
        bail!("--drop-rate must lie in [0, 1]");
    }
    let world = match (&a.store, &a.tag) {
        (Some(store), Some(label)) => Some(load_world(store, &a.tags, label, a.variant)?),
        _ => None,
    };
    let (mut campaign, deck) = match world {
        Some((store, deck, tag)) => (Campaign::with_tag(config, tag, store), Some(deck)),
        None => (Campaign::new(config), None),
    };

    let gt_path = a
        .ground_truth
        .clone()
        .unwrap_or_else(|| sibling(&a.out, "truth.jsonl"));
    let mut out = create(&a.out)?;
    let mut gt = create(&gt_path)?;
    let mut stats = CampaignStats::new(a.variant, &a.attacks);
    for record in campaign.by_ref() {
        let record = record?;
        write_line(&mut out, &record.transcript)?;
        write_line(&mut gt, &record.truth)?;
        stats.observe_record(&record);
    }
    out.flush()?;
    gt.flush()?;
    if let (Some(store_path), Some(deck)) = (&a.store, deck) {
        let (tag, store) = campaign.into_parts();
        save_world(store_path, &a.tags, &store, deck, tag)?;
    }
    write_manifest(&a.out, &Command::Campaign(a.clone()))?;
    let (summary, _) = stats.finish();
    print_json(&summary)
}

fn cmd_attack(a: &AttackArgs) -> Result<()> {
    let transcripts: Vec<Transcript> = read_jsonl(&a.input)?;
    let first = transcripts
        .first()
        .ok_or_else(|| anyhow!("{}: no transcripts", a.input.display()))?;
    let variant = first.variant;
    let expected = match a.kind {
        AttackKind::Sasi => Protocol::Sasi,
        _ => Protocol::Gossamer,
    };
    if variant != expected {
        warn!(
            "{} targets {expected} but the transcripts are {variant}",
            a.kind
        );
    }
    let truths: Vec<GroundTruth> = match &a.ground_truth {
        Some(p) => read_jsonl(p)?,
        None => Vec::new(),
    };
    let mut truths = truths.into_iter().peekable();
    let mut stats = CampaignStats::new(variant, &[a.kind]).keep_verdicts();
    for t in &transcripts {
        while truths.peek().is_some_and(|g| g.session < t.session) {
            truths.next();
        }
        let truth = truths.peek().filter(|g| g.session == t.session);
        stats.observe(t, truth);
    }
    let (summary, verdicts) = stats.finish();
    if let Some(out) = &a.out {
        let mut w = create(out)?;
        for v in &verdicts {
            write_line(&mut w, v)?;
        }
        w.flush()?;
        write_manifest(out, &Command::Attack(a.clone()))?;
    }
    print_json(&summary)
}

fn run(command: &Command) -> Result<()> {
    match command {
        Command::Provision(a) => {
            cmd_provision(a)?;
            write_manifest(&a.store, command)
        }
        Command::Session(SessionCommand::Run(a)) => cmd_session(a),
        Command::Campaign(a) => cmd_campaign(a),
        Command::Attack(a) => cmd_attack(a),
        Command::Bench(BenchCommand::Cost { variant }) => print_json(&cost_report(*variant)),
    }
}

fn load_manifest(path: &Path) -> Result<Command> {
    let text = fs::read_to_string(path).with_context(|| format!("{}", path.display()))?;
    let m: Manifest = serde_json::from_str(&text).with_context(|| format!("{}", path.display()))?;
    if m.format != MANIFEST_FORMAT {
        bail!(
            "{}: unsupported manifest format {:?}",
            path.display(),
            m.format
        );
    }
    Ok(m.command)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let command = match (cli.manifest, cli.command) {
        (Some(path), _) => match load_manifest(&path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
        },
        (None, Some(c)) => c,
        (None, None) => {
            eprintln!("error: a subcommand or --manifest is required (see --help)");
            return ExitCode::from(2);
        }
    };
    match run(&command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Rejected>() => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
