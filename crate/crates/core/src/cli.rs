//! Command-line front end. Data goes to `stdout`, diagnostics to `stderr`.
//!
//! Exit codes: 0 success, 1 data error, 2 usage error.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::aggregate::{summary_table, AggregateKind, AggregateSpec, CertaintyRule, SummaryScope, ValueRule};
use crate::encode::{CellVariant, Theme};
use crate::ingest::{parse, serialize, Mode};
use crate::layout::{
    layout_aggregate_matrix, layout_bipartite, layout_dotplot, layout_euler,
    layout_membership_matrix, BipartiteVariant, EulerMode, Scene,
};
use crate::model::{classify, AttributeKind, Facet, SetFamily};
use crate::render::render_svg;

#[derive(Debug, Parser)]
#[command(name = "uncertain-sets", version, about = "Inspect, aggregate and draw set-type data with uncertainty")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a dataset; with -o, also write its canonical form.
    Validate {
        #[command(flatten)]
        input: Input,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Print the uncertainty class of each facet.
    Classify {
        #[command(flatten)]
        input: Input,
    },
    /// Print aggregate values and certainty per region or per set.
    Aggregate {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value_t = ScopeArg::Regions)]
        scope: ScopeArg,
    },
    /// Draw a view as SVG.
    Render {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        view: View,
        #[arg(long, value_enum)]
        variant: Option<Variant>,
        #[command(flatten)]
        spec: SpecArgs,
        /// JSON file overriding theme defaults.
        #[arg(long)]
        theme: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Toggle::On)]
        legend: Toggle,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Input {
    /// Dataset file, or `-` for standard input.
    path: PathBuf,
    /// Ignore unknown fields instead of rejecting them.
    #[arg(long)]
    lenient: bool,
}

#[derive(Debug, Args)]
struct SpecArgs {
    #[arg(long)]
    attribute: Option<String>,
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// Level counted by a proportion.
    #[arg(long)]
    target: Option<String>,
    #[arg(long, value_enum, default_value_t = ValueRuleArg::UseGiven)]
    value_rule: ValueRuleArg,
    #[arg(long, value_enum, default_value_t = CertaintyRuleArg::OverAll)]
    certainty_rule: CertaintyRuleArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum View {
    Bipartite,
    MembershipMatrix,
    AggregateMatrix,
    Euler,
    Dotplot,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum Variant {
    FullLinks,
    Fans,
    Probability,
    Plain,
    SmallMarks,
    SizeColor,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Proportion,
    Mean,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ValueRuleArg {
    CertainOnly,
    UseGiven,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CertaintyRuleArg {
    OverAll,
    OverGiven,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScopeArg {
    Regions,
    Sets,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

enum Failure {
    Usage(String),
    Data(String),
}

fn data<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Data(e.to_string())
}

/// Run the tool on `args` (including the program name).
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
        Err(Failure::Data(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    let mut text = String::new();
    if path == Path::new("-") {
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::Data(format!("reading standard input: {e}")))?;
    } else {
        text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Data(format!("reading {}: {e}", path.display())))?;
    }
    Ok(text)
}

fn load(input: &Input) -> Result<SetFamily, Failure> {
    let text = read_text(&input.path)?;
    let mode = if input.lenient { Mode::Lenient } else { Mode::Strict };
    parse(&text, mode).map_err(|e| Failure::Data(format!("{}: {e}", input.path.display())))
}

fn write_out(output: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Data(format!("writing {}: {e}", p.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Data(format!("writing output: {e}"))),
    }
}

impl SpecArgs {
    /// Build an aggregate spec, inferring the kind from the attribute type.
    fn spec(&self, family: &SetFamily) -> Result<Option<AggregateSpec>, Failure> {
        let Some(attribute) = &self.attribute else {
            if self.kind.is_some() || self.target.is_some() {
                return Err(Failure::Usage("--kind and --target need --attribute".into()));
            }
            return Ok(None);
        };
        let schema = family
            .attribute(attribute)
            .ok_or_else(|| Failure::Data(format!("unknown attribute {attribute:?}")))?;
        let kind = match (self.kind, &schema.kind) {
            (Some(KindArg::Mean), _) | (None, AttributeKind::Numeric { .. }) => AggregateKind::Mean,
            (Some(KindArg::Proportion), _) | (None, AttributeKind::Categorical { .. }) => {
                let target = self
                    .target
                    .clone()
                    .ok_or_else(|| Failure::Usage("a proportion needs --target <level>".into()))?;
                AggregateKind::Proportion { target }
            }
        };
        if matches!(kind, AggregateKind::Mean) && self.target.is_some() {
            return Err(Failure::Usage("--target only applies to proportions".into()));
        }
        let spec = AggregateSpec {
            attribute: attribute.clone(),
            kind,
            value_rule: match self.value_rule {
                ValueRuleArg::CertainOnly => ValueRule::CertainOnly,
                ValueRuleArg::UseGiven => ValueRule::UseGiven,
            },
            certainty_rule: match self.certainty_rule {
                CertaintyRuleArg::OverAll => CertaintyRule::OverAll,
                CertaintyRuleArg::OverGiven => CertaintyRule::OverGiven,
            },
        };
        spec.schema(family).map_err(data)?;
        Ok(Some(spec))
    }
}

fn fmt_cell(v: f64) -> String {
    let s = format!("{v:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Validate { input, output } => {
            let family = load(&input)?;
            if let Some(path) = output {
                write_out(Some(&path), &serialize(&family), stdout)?;
            }
            write_out(
                None,
                &format!(
                    "valid: {} sets, {} elements, {} membership entries, {} attributes\n",
                    family.sets.len(),
                    family.elements.len(),
                    family.memberships.len(),
                    family.attributes.len()
                ),
                stdout,
            )
        }
        Command::Classify { input } => {
            let family = load(&input)?;
            let classes = classify(&family).map_err(data)?;
            let mut text = String::new();
            for facet in Facet::ALL {
                let key = match facet {
                    Facet::Membership => "membership",
                    Facet::SetAttributes => "set attributes",
                    Facet::ElementAttributes => "element attributes",
                };
                text.push_str(&format!("{key}: {}\n", classes.get(facet)));
            }
            for note in &classes.notes {
                text.push_str(&format!("note: {note}\n"));
            }
            write_out(None, &text, stdout)
        }
        Command::Aggregate { input, spec, scope } => {
            let family = load(&input)?;
            let spec = spec
                .spec(&family)?
                .ok_or_else(|| Failure::Usage("aggregate needs --attribute".into()))?;
            let scope = match scope {
                ScopeArg::Regions => SummaryScope::Regions,
                ScopeArg::Sets => SummaryScope::Sets,
            };
            let cells = summary_table(&family, &spec, scope).map_err(data)?;
            let mut text = String::from("scope\tvalue\tcertainty\tn_known\tn_flagged\tn_missing\n");
            for c in cells {
                text.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\n",
                    c.scope,
                    c.value.map(fmt_cell).unwrap_or_else(|| "undefined".into()),
                    fmt_cell(c.certainty),
                    c.counts.known,
                    c.counts.flagged,
                    c.counts.missing
                ));
            }
            write_out(None, &text, stdout)
        }
        Command::Render {
            input,
            view,
            variant,
            spec,
            theme,
            legend,
            output,
        } => {
            let family = load(&input)?;
            let theme = match theme {
                Some(path) => Theme::from_json(&read_text(&path)?).map_err(data)?,
                None => Theme::default(),
            };
            let spec = spec.spec(&family)?;
            let scene = build_scene(&family, view, variant, spec, &theme)?;
            let svg = render_svg(&scene, matches!(legend, Toggle::On));
            write_out(output.as_deref(), &svg, stdout)
        }
    }
}

fn build_scene(
    family: &SetFamily,
    view: View,
    variant: Option<Variant>,
    spec: Option<AggregateSpec>,
    theme: &Theme,
) -> Result<Scene, Failure> {
    let wrong_variant = |v: Variant| Failure::Usage(format!("variant {:?} does not apply to this view", v));
    let scene = match view {
        View::Bipartite => {
            let v = match variant {
                None | Some(Variant::FullLinks) => BipartiteVariant::FullLinks,
                Some(Variant::Fans) => BipartiteVariant::Fans,
                Some(Variant::Probability) => BipartiteVariant::Probability,
                Some(v) => return Err(wrong_variant(v)),
            };
            layout_bipartite(family, v, spec.as_ref(), theme)
        }
        View::MembershipMatrix => {
            let v = match variant {
                None | Some(Variant::Plain) => CellVariant::Plain,
                Some(Variant::SmallMarks) => CellVariant::SmallMarks,
                Some(Variant::SizeColor) => CellVariant::SizeColor,
                Some(v) => return Err(wrong_variant(v)),
            };
            layout_membership_matrix(family, v, theme)
        }
        View::AggregateMatrix => {
            if let Some(v) = variant {
                return Err(wrong_variant(v));
            }
            let spec = spec.ok_or_else(|| Failure::Usage("aggregate-matrix needs --attribute".into()))?;
            layout_aggregate_matrix(family, &spec, theme)
        }
        View::Euler => {
            if let Some(v) = variant {
                return Err(wrong_variant(v));
            }
            let mode = match spec {
                None => EulerMode::Membership,
                Some(spec) => {
                    let blanket = family.disclaimer_uncertain
                        || family.attribute(&spec.attribute).is_some_and(|a| a.uncertain_everywhere);
                    if blanket {
                        EulerMode::AggregateTextured(spec)
                    } else {
                        EulerMode::Aggregate(spec)
                    }
                }
            };
            layout_euler(family, &mode, theme)
        }
        View::Dotplot => {
            if let Some(v) = variant {
                return Err(wrong_variant(v));
            }
            let spec = spec.ok_or_else(|| Failure::Usage("dotplot needs --attribute".into()))?;
            layout_dotplot(family, &spec.attribute, theme)
        }
    };
    scene.map_err(data)
}
