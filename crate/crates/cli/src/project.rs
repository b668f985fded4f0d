use std::fs::{self, File, OpenOptions};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use tdss_core::dsl::{parse_file, ScenarioDoc};
use tdss_core::model::SystemModel;

/// Where a project keeps its files. Everything is relative to one root.
#[derive(Clone, Debug)]
pub struct ProjectLayout {
    pub root: PathBuf,
    pub model: PathBuf,
    pub requirements: PathBuf,
    pub scenarios: PathBuf,
    pub output: PathBuf,
}

impl ProjectLayout {
    pub fn new(root: &Path, model: &Path) -> Result<ProjectLayout> {
        let layout = ProjectLayout {
            root: root.to_path_buf(),
            model: root.join(model),
            requirements: root.join("requirements.tsv"),
            scenarios: root.join("scenarios"),
            output: root.join("out"),
        };
        let paths = [&layout.model, &layout.requirements, &layout.scenarios, &layout.output];
        for (i, a) in paths.iter().enumerate() {
            if paths[i + 1..].contains(a) {
                bail!("project paths must be distinct, `{}` is used twice", a.display());
            }
        }
        Ok(layout)
    }

    pub fn spec_file(&self) -> PathBuf {
        self.scenarios.join("spec.scn")
    }

    pub fn tests_file(&self) -> PathBuf {
        self.scenarios.join("tests.scn")
    }

    /// Relative paths resolve against the project root.
    pub fn resolve(&self, path: &Path) -> PathBuf {
        self.root.join(path)
    }

    /// A missing model file reads as an empty model.
    pub fn load_model(&self) -> Result<SystemModel> {
        if !self.model.exists() {
            return Ok(SystemModel::new());
        }
        let text = read(&self.model)?;
        SystemModel::from_json(&text).with_context(|| format!("{}", self.model.display()))
    }

    /// Takes the writer lock for the lifetime of the returned guard.
    pub fn lock(&self) -> Result<ModelLock> {
        if let Some(dir) = self.model.parent() {
            fs::create_dir_all(dir)?;
        }
        let path = lock_path(&self.model);
        let file = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(&path)
            .with_context(|| format!("cannot open lock file {}", path.display()))?;
        file.lock().with_context(|| format!("cannot lock {}", path.display()))?;
        Ok(ModelLock {
            _file: file,
            model: self.model.clone(),
        })
    }

    pub fn parse_scenarios(&self, path: &Path) -> Result<ScenarioDoc> {
        let text = read(path)?;
        Ok(parse_file(&path.display().to_string(), &text)?)
    }
}

fn lock_path(model: &Path) -> PathBuf {
    let mut name = model.file_name().unwrap_or_default().to_os_string();
    name.push(".lock");
    model.with_file_name(name)
}

/// Held while a command rewrites the model file. Other writers block on it.
pub struct ModelLock {
    _file: File,
    model: PathBuf,
}

impl ModelLock {
    /// Replaces the model file through a rename so readers never see a
    /// partial write.
    pub fn save(&self, model: &SystemModel) -> Result<()> {
        let tmp = self.model.with_extension("json.tmp");
        fs::write(&tmp, model.to_json()).with_context(|| format!("cannot write {}", tmp.display()))?;
        fs::rename(&tmp, &self.model).with_context(|| format!("cannot replace {}", self.model.display()))?;
        Ok(())
    }
}

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}
