use std::collections::BTreeSet;
use std::path::PathBuf;

use fractalmark_core::daily_returns;
use fractalmark_core::market_data::read_price_csv;

use crate::config::{load_optional, Layered};
use crate::error::CliError;
use crate::output::{file_stem, read_text, render, Outcome};
use crate::IngestArgs;

pub const KEYS: &[&str] = &["input", "out-dir"];

pub fn run(args: IngestArgs) -> Result<Outcome, CliError> {
    let file = load_optional(args.config.as_deref(), KEYS)?;
    let cfg = Layered::new(file.as_ref());
    let out_dir = cfg.or(args.out_dir, "out-dir", PathBuf::from("out"))?;
    let inputs: Vec<PathBuf> = cfg
        .list(
            args.input
                .iter()
                .map(|p| p.to_string_lossy().into_owned())
                .collect(),
            "input",
        )
        .into_iter()
        .map(PathBuf::from)
        .collect();
    if inputs.is_empty() {
        return Err(CliError::Usage("ingest needs at least one --input".into()));
    }

    let mut seen = BTreeSet::new();
    let mut outcome = Outcome::default();
    for path in &inputs {
        let id = file_stem(path);
        if !seen.insert(id.clone()) {
            return Err(CliError::Usage(format!(
                "two inputs share the instrument name `{id}`"
            )));
        }
        let text = read_text(path)?;
        let parsed = read_price_csv(&id, text.as_bytes()).map_err(|e| CliError::input(path, e))?;
        if !parsed.ignored_columns.is_empty() {
            outcome.warn(format!(
                "{}: ignored columns {}",
                path.display(),
                parsed.ignored_columns.join(", ")
            ));
        }
        let returns = daily_returns(&parsed.series);
        let bytes = render("returns", |w| returns.write_csv(w))?;
        outcome.write(out_dir.join(&id).join("returns.csv"), &bytes)?;
    }
    Ok(outcome)
}
