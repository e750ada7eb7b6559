//! Fluency, sentiment and reward.
//!
//! Fluency is the Flesch–Kincaid grade level with a vowel-group syllable
//! heuristic. Sentiment goes through [`SentimentScorer`]; the bundled
//! [`LexiconScorer`] averages word valences, and [`ProcessScorer`] /
//! [`FnScorer`] adapt external model-based scorers.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use thiserror::Error;

const BUNDLED_LEXICON: &str = include_str!("../assets/lexicon.txt");
pub const NEUTRAL_SENTIMENT: f64 = 0.5;

#[derive(Debug, Error)]
pub enum ScoringError {
    #[error("text is empty")]
    EmptyText,
    #[error("scorer returned {0}, outside [0, 1]")]
    OutOfRange(f64),
    #[error("lexicon line {line}: expected `word,valence`, got {content:?}")]
    MalformedLexicon { line: usize, content: String },
    #[error("lexicon line {line}: valence {value} outside [0, 1]")]
    InvalidValence { line: usize, value: f64 },
    #[error("lexicon line {line}: duplicate word {word:?}")]
    DuplicateWord { line: usize, word: String },
    #[error("external scorer: {0}")]
    External(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, ScoringError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluencyReport {
    pub words: usize,
    pub sentences: usize,
    pub syllables: usize,
    pub grade: f64,
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

/// Vowel groups, minus one for a silent final `e`, at least one.
pub fn count_syllables(word: &str) -> usize {
    if word.is_empty() || !word.chars().all(|c| c.is_ascii_alphabetic()) {
        return 1;
    }
    let chars: Vec<char> = word.chars().map(|c| c.to_ascii_lowercase()).collect();
    let mut groups = 0;
    let mut prev_vowel = false;
    for &c in &chars {
        let v = is_vowel(c);
        if v && !prev_vowel {
            groups += 1;
        }
        prev_vowel = v;
    }
    let n = chars.len();
    if groups > 1 && n >= 2 && chars[n - 1] == 'e' && !is_vowel(chars[n - 2]) {
        groups -= 1;
    }
    groups.max(1)
}

/// Whitespace token with punctuation removed; `None` if nothing is left.
fn clean_token(token: &str) -> Option<String> {
    let t: String = token.chars().filter(|c| c.is_alphanumeric()).collect();
    (!t.is_empty()).then_some(t)
}

fn count_sentences(text: &str) -> usize {
    let mut runs = 0;
    let mut in_run = false;
    for c in text.chars() {
        let terminal = matches!(c, '.' | '!' | '?');
        if terminal && !in_run {
            runs += 1;
        }
        in_run = terminal;
    }
    runs.max(1)
}

pub fn fk_grade(text: &str) -> Result<FluencyReport> {
    let words: Vec<String> = text.split_whitespace().filter_map(clean_token).collect();
    if words.is_empty() {
        return Err(ScoringError::EmptyText);
    }
    let sentences = count_sentences(text);
    let syllables: usize = words.iter().map(|w| count_syllables(w)).sum();
    let w = words.len() as f64;
    let grade = 0.39 * (w / sentences as f64) + 11.8 * (syllables as f64 / w) - 15.59;
    Ok(FluencyReport {
        words: words.len(),
        sentences,
        syllables,
        grade,
    })
}

pub trait SentimentScorer: Send + Sync {
    /// Sentiment in `[0, 1]`.
    fn score(&self, text: &str) -> Result<f64>;
}

/// Scores `text`, rejecting empty input and out-of-range results.
pub fn score_sentiment(scorer: &dyn SentimentScorer, text: &str) -> Result<f64> {
    if text.trim().is_empty() {
        return Err(ScoringError::EmptyText);
    }
    let s = scorer.score(text)?;
    if !(0.0..=1.0).contains(&s) {
        return Err(ScoringError::OutOfRange(s));
    }
    Ok(s)
}

/// Mean valence of the words found in a `word → valence` table.
#[derive(Debug, Clone, PartialEq)]
pub struct LexiconScorer {
    table: HashMap<String, f64>,
}

impl LexiconScorer {
    pub fn bundled() -> Self {
        Self::from_reader(BUNDLED_LEXICON.as_bytes()).expect("bundled lexicon is well formed")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_reader(BufReader::new(std::fs::File::open(path)?))
    }

    /// Reads `word,valence` lines. Blank lines and `#` comments are skipped.
    pub fn from_reader(reader: impl BufRead) -> Result<Self> {
        let mut table = HashMap::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let content = line.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let malformed = || ScoringError::MalformedLexicon {
                line: i + 1,
                content: content.to_owned(),
            };
            let (word, value) = content.split_once(',').ok_or_else(malformed)?;
            let word = word.trim().to_lowercase();
            let value: f64 = value.trim().parse().map_err(|_| malformed())?;
            if word.is_empty() {
                return Err(malformed());
            }
            if !(0.0..=1.0).contains(&value) {
                return Err(ScoringError::InvalidValence { line: i + 1, value });
            }
            if table.insert(word.clone(), value).is_some() {
                return Err(ScoringError::DuplicateWord { line: i + 1, word });
            }
        }
        Ok(Self { table })
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self> {
        let mut table = HashMap::new();
        for (i, (word, value)) in pairs.into_iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(ScoringError::InvalidValence { line: i + 1, value });
            }
            table.insert(word.to_lowercase(), value);
        }
        Ok(Self { table })
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn valence(&self, word: &str) -> Option<f64> {
        self.table.get(&word.to_lowercase()).copied()
    }

    /// Lexicon words found in `text`, in order.
    pub fn matches(&self, text: &str) -> Vec<(String, f64)> {
        text.split_whitespace()
            .filter_map(clean_token)
            .filter_map(|t| {
                let t = t.to_lowercase();
                self.table.get(&t).map(|&v| (t, v))
            })
            .collect()
    }
}

impl SentimentScorer for LexiconScorer {
    fn score(&self, text: &str) -> Result<f64> {
        if text.trim().is_empty() {
            return Err(ScoringError::EmptyText);
        }
        let hits = self.matches(text);
        if hits.is_empty() {
            return Ok(NEUTRAL_SENTIMENT);
        }
        Ok(hits.iter().map(|(_, v)| v).sum::<f64>() / hits.len() as f64)
    }
}

/// Wraps a closure, e.g. a model exposed through foreign bindings.
pub struct FnScorer<F>(pub F);

impl<F> SentimentScorer for FnScorer<F>
where
    F: Fn(&str) -> Result<f64> + Send + Sync,
{
    fn score(&self, text: &str) -> Result<f64> {
        let s = (self.0)(text)?;
        if !(0.0..=1.0).contains(&s) {
            return Err(ScoringError::OutOfRange(s));
        }
        Ok(s)
    }
}

struct Pipe {
    child: Child,
    stdin: BufWriter<ChildStdin>,
    stdout: BufReader<ChildStdout>,
}

/// Line protocol over a child process: `SCORE<TAB>text\n` in, a decimal in
/// `[0, 1]` out. Requests are serialised.
pub struct ProcessScorer {
    pipe: Mutex<Pipe>,
}

impl ProcessScorer {
    pub fn spawn(mut command: Command) -> Result<Self> {
        let mut child = command.stdin(Stdio::piped()).stdout(Stdio::piped()).spawn()?;
        let stdin = child.stdin.take().ok_or_else(|| ScoringError::External("no stdin".into()))?;
        let stdout = child
            .stdout
            .take()
            .ok_or_else(|| ScoringError::External("no stdout".into()))?;
        Ok(Self {
            pipe: Mutex::new(Pipe {
                child,
                stdin: BufWriter::new(stdin),
                stdout: BufReader::new(stdout),
            }),
        })
    }
}

impl SentimentScorer for ProcessScorer {
    fn score(&self, text: &str) -> Result<f64> {
        let flat: String = text
            .chars()
            .map(|c| if matches!(c, '\t' | '\n' | '\r') { ' ' } else { c })
            .collect();
        let mut pipe = self
            .pipe
            .lock()
            .map_err(|_| ScoringError::External("scorer lock poisoned".into()))?;
        writeln!(pipe.stdin, "SCORE\t{flat}")?;
        pipe.stdin.flush()?;
        let mut line = String::new();
        if pipe.stdout.read_line(&mut line)? == 0 {
            return Err(ScoringError::External("scorer closed its output".into()));
        }
        let s: f64 = line
            .trim()
            .parse()
            .map_err(|_| ScoringError::External(format!("bad response {:?}", line.trim())))?;
        if !(0.0..=1.0).contains(&s) {
            return Err(ScoringError::OutOfRange(s));
        }
        Ok(s)
    }
}

impl Drop for ProcessScorer {
    fn drop(&mut self) {
        if let Ok(pipe) = self.pipe.get_mut() {
            let _ = pipe.child.kill();
            let _ = pipe.child.wait();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reward {
    pub value: f64,
    pub fluency: f64,
    pub engagement: usize,
}

/// Geometric mean of clamped fluency and engagement.
pub fn reward(fluency: f64, engagement: usize) -> Reward {
    Reward {
        value: (fluency.max(0.0) * engagement as f64).sqrt(),
        fluency,
        engagement,
    }
}
