//! On-disk cache of the class enumerations that scans consume.
//!
//! One file per (prime, family, budget cap). The body lists subgroups
//! separated by blank lines; each subgroup is an optional `@shapes` line, an
//! `@gens` line and its sorted element encodings, one per line. The header
//! carries a SHA-256 digest of the body. Loading re-checks the digest, the
//! sort order, closure, and that the generators regenerate the element set;
//! any mismatch discards the entry and re-derives it.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::abelian::{enumerate_abelian_classes, AbelianClass, AbelianShape};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::lattice::enumerate_cyclic_subgroups;
use crate::mat2::{parse_mat2, Mat2};
use crate::subgroup::Subgroup;

const MAGIC: &str = "# gl2lab subgroup cache v1";
const EXTENSION: &str = "subgroups";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CacheFamily {
    Cyclic,
    Abelian,
}

impl CacheFamily {
    pub const ALL: [CacheFamily; 2] = [Self::Cyclic, Self::Abelian];

    pub fn name(self) -> &'static str {
        match self {
            Self::Cyclic => "cyclic",
            Self::Abelian => "abelian",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse {
                what: "cache family",
                input: s.to_string(),
            })
    }

    fn cap(self, budget: &Budget) -> u64 {
        match self {
            Self::Cyclic => budget.max_cyclic_p,
            Self::Abelian => budget.max_abelian_p,
        }
    }
}

/// A cache-load problem that was repaired by re-deriving the entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CacheEvent {
    pub file: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CacheEntryStat {
    pub file: String,
    pub family: Option<CacheFamily>,
    pub p: Option<u64>,
    pub subgroups: Option<usize>,
    pub bytes: u64,
    pub valid: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CacheStat {
    pub dir: String,
    pub entries: Vec<CacheEntryStat>,
    pub total_bytes: u64,
}

/// Cache handle; `Cache::disabled()` always recomputes.
#[derive(Debug, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
    events: Mutex<Vec<CacheEvent>>,
}

fn cache_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::CacheCorrupt {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

fn encode(classes: &[AbelianClass], with_shapes: bool) -> String {
    let mut body = String::new();
    for (i, c) in classes.iter().enumerate() {
        if i > 0 {
            body.push('\n');
        }
        if with_shapes {
            let names: Vec<&str> = c.shapes.iter().map(|s| s.name()).collect();
            body.push_str(&format!("@shapes {}\n", names.join(",")));
        }
        let gens: Vec<String> = c.group.generators().iter().map(Mat2::to_string).collect();
        body.push_str(&format!("@gens {}\n", gens.join(";")));
        for x in c.group.elements() {
            body.push_str(&format!("{x}\n"));
        }
    }
    body
}

fn digest(body: &str) -> String {
    hex::encode(Sha256::digest(body.as_bytes()))
}

fn parse_shape(s: &str) -> Option<AbelianShape> {
    [
        AbelianShape::SplitCartanSubgroup,
        AbelianShape::AntidiagonalWithScalars,
        AbelianShape::NonsplitCartanSubgroup,
        AbelianShape::ReflectionWithScalars,
        AbelianShape::GammaWithScalars,
    ]
    .into_iter()
    .find(|x| x.name() == s)
}

struct Header {
    family: CacheFamily,
    p: u64,
    digest: String,
}

fn parse_header<'a>(path: &Path, text: &'a str) -> Result<(Header, &'a str)> {
    let mut offset = 0;
    let mut fields = std::collections::BTreeMap::new();
    for (i, line) in text.split_inclusive('\n').enumerate() {
        if !line.starts_with('#') {
            break;
        }
        offset += line.len();
        let line = line.trim_end_matches('\n');
        if i == 0 {
            if line != MAGIC {
                return Err(cache_err(path, "unknown header"));
            }
        } else if let Some((k, v)) = line.trim_start_matches("# ").split_once(": ") {
            fields.insert(k, v);
        }
    }
    if offset == 0 {
        return Err(cache_err(path, "missing header"));
    }
    let get = |k: &str| {
        fields
            .get(k)
            .copied()
            .ok_or_else(|| cache_err(path, format!("missing header field {k}")))
    };
    let family = CacheFamily::parse(get("family")?)?;
    let p = get("p")?
        .parse()
        .map_err(|_| cache_err(path, "bad prime"))?;
    Ok((
        Header {
            family,
            p,
            digest: get("digest")?.to_string(),
        },
        &text[offset..],
    ))
}

fn decode(path: &Path, text: &str, family: CacheFamily, p: u64) -> Result<Vec<AbelianClass>> {
    let (header, body) = parse_header(path, text)?;
    if header.family != family || header.p != p {
        return Err(cache_err(path, "header does not match file name"));
    }
    if digest(body) != header.digest {
        return Err(cache_err(path, "digest mismatch"));
    }
    let mut out = Vec::new();
    for block in body.split("\n\n") {
        let mut shapes = Vec::new();
        let mut gens = Vec::new();
        let mut elements = Vec::new();
        for line in block.lines() {
            if let Some(s) = line.strip_prefix("@shapes ") {
                for name in s.split(',').filter(|x| !x.is_empty()) {
                    shapes.push(
                        parse_shape(name)
                            .ok_or_else(|| cache_err(path, format!("unknown shape {name}")))?,
                    );
                }
            } else if let Some(s) = line.strip_prefix("@gens ") {
                for g in s.split(';').filter(|x| !x.is_empty()) {
                    gens.push(parse_mat2(p, g)?);
                }
            } else {
                elements.push(parse_mat2(p, line)?);
            }
        }
        if !elements.windows(2).all(|w| w[0] < w[1]) {
            return Err(cache_err(path, "elements not strictly sorted"));
        }
        let regenerated = Subgroup::closure(p, &gens)?;
        if regenerated.elements() != elements.as_slice() {
            return Err(cache_err(
                path,
                "generators do not regenerate the stored element set",
            ));
        }
        if !regenerated.is_closed() {
            return Err(cache_err(path, "stored set is not a group"));
        }
        out.push(AbelianClass {
            group: regenerated,
            shapes,
        });
    }
    Ok(out)
}

impl Cache {
    pub fn disabled() -> Self {
        Self::default()
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: Some(dir.into()),
            events: Mutex::new(Vec::new()),
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// Repairs performed since the handle was created.
    pub fn events(&self) -> Vec<CacheEvent> {
        self.events.lock().expect("cache event lock").clone()
    }

    fn file_name(family: CacheFamily, p: u64, budget: &Budget) -> String {
        format!(
            "p{p}-{}-cap{}.{EXTENSION}",
            family.name(),
            family.cap(budget)
        )
    }

    /// Computes the class list without touching the disk.
    pub fn derive(family: CacheFamily, p: u64, budget: &Budget) -> Result<Vec<AbelianClass>> {
        Budget::check(
            &format!("prime for {} enumeration", family.name()),
            p,
            family.cap(budget),
        )?;
        match family {
            CacheFamily::Cyclic => Ok(enumerate_cyclic_subgroups(p, budget)?
                .into_iter()
                .map(|group| AbelianClass {
                    group,
                    shapes: Vec::new(),
                })
                .collect()),
            CacheFamily::Abelian => enumerate_abelian_classes(p, budget),
        }
    }

    /// Reads a stored entry. Missing files and disabled caches give `None`;
    /// an entry failing any re-check is recorded as an event and ignored.
    pub fn load(&self, family: CacheFamily, p: u64, budget: &Budget) -> Option<Vec<AbelianClass>> {
        let path = self.dir.as_ref()?.join(Self::file_name(family, p, budget));
        let text = fs::read_to_string(&path).ok()?;
        match decode(&path, &text, family, p) {
            Ok(classes) => Some(classes),
            Err(e) => {
                self.events
                    .lock()
                    .expect("cache event lock")
                    .push(CacheEvent {
                        file: path.display().to_string(),
                        reason: e.to_string(),
                    });
                None
            }
        }
    }

    /// Writes an entry atomically (temp file then rename). No-op when disabled.
    pub fn store(
        &self,
        family: CacheFamily,
        p: u64,
        budget: &Budget,
        classes: &[AbelianClass],
    ) -> Result<()> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        let body = encode(classes, family == CacheFamily::Abelian);
        fs::create_dir_all(dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        write!(
            tmp,
            "{MAGIC}\n# family: {}\n# p: {p}\n# budget: {}\n# digest: {}\n{body}",
            family.name(),
            budget.tag(),
            digest(&body)
        )?;
        tmp.persist(dir.join(Self::file_name(family, p, budget)))
            .map_err(|e| Error::Io(e.error))?;
        Ok(())
    }

    /// The class list for `(family, p)`, read from disk when present and
    /// valid, derived (and stored) otherwise.
    pub fn classes(
        &self,
        family: CacheFamily,
        p: u64,
        budget: &Budget,
    ) -> Result<Vec<AbelianClass>> {
        Budget::check(
            &format!("prime for {} enumeration", family.name()),
            p,
            family.cap(budget),
        )?;
        if let Some(classes) = self.load(family, p, budget) {
            return Ok(classes);
        }
        let classes = Self::derive(family, p, budget)?;
        self.store(family, p, budget, &classes)?;
        Ok(classes)
    }

    /// Computes and stores the given entries.
    pub fn warm(&self, family: CacheFamily, primes: &[u64], budget: &Budget) -> Result<CacheStat> {
        self.require_dir()?;
        for &p in primes {
            self.classes(family, p, budget)?;
        }
        self.stat()
    }

    /// Removes every cache file; returns how many were removed.
    pub fn clear(&self) -> Result<usize> {
        let dir = self.require_dir()?;
        let mut removed = 0;
        for path in cache_files(dir)? {
            fs::remove_file(path)?;
            removed += 1;
        }
        Ok(removed)
    }

    pub fn stat(&self) -> Result<CacheStat> {
        let dir = self.require_dir()?;
        let mut entries = Vec::new();
        for path in cache_files(dir)? {
            let bytes = fs::metadata(&path)?.len();
            let text = fs::read_to_string(&path).unwrap_or_default();
            let header = parse_header(&path, &text).ok();
            let (family, p) = header
                .as_ref()
                .map(|(h, _)| (Some(h.family), Some(h.p)))
                .unwrap_or((None, None));
            let decoded = header.and_then(|(h, _)| decode(&path, &text, h.family, h.p).ok());
            entries.push(CacheEntryStat {
                file: path
                    .file_name()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .into_owned(),
                family,
                p,
                subgroups: decoded.as_ref().map(Vec::len),
                bytes,
                valid: decoded.is_some(),
            });
        }
        Ok(CacheStat {
            dir: dir.display().to_string(),
            total_bytes: entries.iter().map(|e| e.bytes).sum(),
            entries,
        })
    }

    fn require_dir(&self) -> Result<&Path> {
        self.dir
            .as_deref()
            .ok_or_else(|| Error::InvalidKind("no cache directory configured".into()))
    }
}

fn cache_files(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.exists() {
        return Ok(Vec::new());
    }
    let mut out: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == EXTENSION))
        .collect();
    out.sort();
    Ok(out)
}
